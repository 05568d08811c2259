// The L2-regularized path `alpha -> u_alpha` and its limit.

use std::error::Error;

use measure_control::cli::{build_preset, Preset};
use measure_control::ssn::{continuation_path, ContinuationOptions, SolverOptions};

pub fn run(nx: usize) -> Result<(), Box<dyn Error>> {
    let (_, problem) = build_preset(Preset::TwoBoxDirichlet, nx, nx)?;
    let (limit, report, path) = continuation_path(
        &problem,
        &ContinuationOptions::default(),
        &SolverOptions::default(),
    )?;
    println!(
        "{:>10} {:>14} {:>12} {:>8} {:>10} {:>12}",
        "alpha", "objective", "mass", "support", "newton", "|u - u_lim|"
    );
    let stages = report
        .stages
        .iter()
        .filter(|s| s.stage == "regularized" && s.converged);
    for (p, stage) in path.iter().zip(stages) {
        let gap =
            p.u.iter()
                .zip(&limit.u)
                .map(|(a, b)| (a - b).abs())
                .fold(0.0, f64::max);
        println!(
            "{:>10.1e} {:>14.6e} {:>12.6} {:>8} {:>10} {gap:>12.3e}",
            p.alpha_or_beta, p.objective, p.control_norm, p.support_size, stage.iterations
        );
    }
    let last = report.final_stage().expect("limit stage");
    println!(
        "limit: objective {:.6e}, mass {:.6}, residuals {:?}",
        problem.tracking(&limit.y),
        limit.control_norm(),
        last.residual_history()
    );
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
