// Boundary Dirac controls for `-Laplace y + 10^-2 y = u` with natural
// boundary conditions.

use std::error::Error;

use measure_control::cli::{build_preset, Preset};
use measure_control::diagnostics::{check_optimality, sparsity_stats};
use measure_control::ssn::{
    continuation_path, ContinuationOptions, SolverOptions, SUPPORT_THRESHOLD_REL,
};

pub fn run(nx: usize) -> Result<(), Box<dyn Error>> {
    let (mesh, problem) = build_preset(Preset::NeumannBoundary, nx, nx)?;
    let (state, report, _) = continuation_path(
        &problem,
        &ContinuationOptions::default(),
        &SolverOptions::default(),
    )?;
    let opt = check_optimality(&state, &problem);
    let stats = sparsity_stats(&state, problem.control_nodes(), SUPPORT_THRESHOLD_REL);
    println!(
        "converged {}, max residual {:.2e}, {} of {} boundary nodes active",
        report.converged,
        opt.max_residual(),
        stats.support_size,
        problem.n_control()
    );
    for &k in &stats.support_nodes {
        let j = problem
            .control_nodes()
            .position(k)
            .expect("support in control set");
        let [x, y] = mesh.node(k);
        println!("  node {k:>5} ({x:+.4}, {y:+.4})  u = {:.6e}", state.u[j]);
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
