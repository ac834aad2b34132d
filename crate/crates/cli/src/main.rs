use clap::Parser;
use mintime_cli::{run, CommandRequest};

fn main() {
    let req = CommandRequest::parse();
    match run(&req) {
        Ok(out) => print!("{out}"),
        Err(e) => {
            eprintln!("error: {e}");
            std::process::exit(e.exit_code());
        }
    }
}
