// Two-box target with Dirac controls on `|x|_inf <= 3/4`.
//
// `cargo run --release --example two_box -- [nx] [output_dir]`

use std::error::Error;
use std::path::PathBuf;

use measure_control::cli::{execute, Preset, RunConfig};

pub fn run(nx: usize, output_dir: PathBuf) -> Result<(), Box<dyn Error>> {
    let mut config = RunConfig::for_preset(Preset::TwoBoxDirichlet);
    config.nx = nx;
    config.ny = nx;
    config.log_file = Some(output_dir.with_extension("log"));
    config.output_dir = output_dir;
    let outcome = execute(&config)?;
    println!("converged: {}", outcome.converged);
    for f in &outcome.files {
        println!("wrote {}", f.display());
    }
    Ok(())
}

fn main() -> Result<(), Box<dyn Error>> {
    let mut args = std::env::args().skip(1);
    let nx = args.next().map(|s| s.parse()).transpose()?.unwrap_or(64);
    let dir = args
        .next()
        .map(PathBuf::from)
        .unwrap_or_else(|| "two_box_out".into());
    run(nx, dir)
}
