//! Seeded random helpers shared by the sampling-based checks.

use rand::Rng;

/// Uniform point in the closed unit ball of R^d (rejection from the cube).
pub(crate) fn random_in_ball<R: Rng + ?Sized>(rng: &mut R, d: usize) -> Vec<f64> {
    loop {
        let w: Vec<f64> = (0..d).map(|_| rng.gen_range(-1.0..=1.0)).collect();
        let n2: f64 = w.iter().map(|x| x * x).sum();
        if n2 <= 1.0 {
            return w;
        }
    }
}

/// Uniform direction on the unit sphere of R^d.
pub(crate) fn random_unit<R: Rng + ?Sized>(rng: &mut R, d: usize) -> Vec<f64> {
    loop {
        let w = random_in_ball(rng, d);
        let n: f64 = w.iter().map(|x| x * x).sum::<f64>().sqrt();
        if n > 1e-3 {
            return w.into_iter().map(|x| x / n).collect();
        }
    }
}
