// Attainable bump target: the optimal measure concentrates on the circle
// bounding the control disk.

use std::error::Error;

use measure_control::cli::presets::CONTROL_RADIUS;
use measure_control::cli::{build_preset, Preset};
use measure_control::ssn::{continuation_path, ContinuationOptions, SolverOptions};

pub fn run(nx: usize) -> Result<(), Box<dyn Error>> {
    let (mesh, problem) = build_preset(Preset::BumpDirichletDisk, nx, nx)?;
    let (state, report, _) = continuation_path(
        &problem,
        &ContinuationOptions::default(),
        &SolverOptions::default(),
    )?;
    let (h, _) = mesh.spacing();

    // mass by distance to the circle, in mesh cells
    let mut bins = [0.0f64; 6];
    for (&k, &u) in problem.control_nodes().indices().iter().zip(&state.u) {
        let [x, y] = mesh.node(k);
        let cells = ((CONTROL_RADIUS - x.hypot(y)) / h).max(0.0) as usize;
        bins[cells.min(bins.len() - 1)] += u;
    }
    let total: f64 = bins.iter().sum();
    println!(
        "converged {} in {} stages, mass {total:.6}",
        report.converged,
        report.stages.len()
    );
    for (k, m) in bins.iter().enumerate() {
        let label = if k + 1 == bins.len() {
            format!(">={k}")
        } else {
            k.to_string()
        };
        println!("cells from circle {label:>3}: {:6.2}%", 100.0 * m / total);
    }
    Ok(())
}

fn main() -> Result<(), Box<dyn Error>> {
    let nx = std::env::args()
        .nth(1)
        .map(|s| s.parse())
        .transpose()?
        .unwrap_or(64);
    run(nx)
}
