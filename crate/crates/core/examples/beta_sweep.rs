// Adds `beta * sum u` to the objective and follows the solution as `beta`
// grows; the support can only shrink.

use std::error::Error;

use measure_control::cli::{build_preset, Preset};
use measure_control::ssn::{
    solve_beta, ContinuationOptions, PathPoint, SolverOptions, SolverState,
};

pub fn run(nx: usize) -> Result<(), Box<dyn Error>> {
    let (_, problem) = build_preset(Preset::TwoBoxDirichlet, nx, nx)?;
    let cont = ContinuationOptions::default();
    let opts = SolverOptions::default();
    let mut warm: Option<SolverState> = None;
    println!(
        "{:>10} {:>14} {:>12} {:>8}",
        "beta", "objective", "mass", "support"
    );
    for beta in [0.0, 1e-4, 3e-4, 1e-3, 3e-3, 1e-2] {
        let (state, report) = solve_beta(&problem, beta, warm.as_ref(), &cont, &opts)?;
        let p = PathPoint::from_state(beta, &state, &problem);
        println!(
            "{beta:>10.1e} {:>14.6e} {:>12.6} {:>8}{}",
            p.objective,
            p.control_norm,
            p.support_size,
            if report.converged {
                ""
            } else {
                "  (not converged)"
            }
        );
        warm = Some(state);
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
