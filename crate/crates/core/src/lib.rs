//! Directional minimal time functions
//! `T_v(x; S) = inf{t >= 0 : x + t v in S}` over a catalog of closed sets,
//! with their generalized derivatives, Lipschitz certificates and a
//! projected subgradient solver for directional location problems.

pub mod cones;
pub mod error;
pub mod ext;
pub mod geometry;
pub mod lipschitz;
pub mod mintime;
pub mod oracle;
pub mod point;
pub mod polyhedral;
pub mod solver;
pub mod subdiff;

mod linalg;
mod sampling;

pub use cones::ConeFamily;
pub use error::{Error, Result};
pub use ext::ExtReal;
pub use geometry::{CatalogId, Exactness, GeneratedCone, SetExpr};
pub use mintime::{min_time, projection_pi, scalarization, ProjectionResult};
pub use point::Point;
