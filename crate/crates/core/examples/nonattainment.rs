// The sequence `u_n = n delta_{1/n}` on `(0, 1)`: the objective goes to
// zero while the mass grows without bound, so no minimizer exists.

use std::error::Error;

use measure_control::oracle1d::{
    exact_counterexample_state, fem_point_source_1d, nonattainment_demo, uniform_nodes,
    write_nonattainment_csv,
};

pub fn run(cells: usize) -> Result<(), Box<dyn Error>> {
    let ns = [2, 4, 8, 16, 32];
    write_nonattainment_csv(&nonattainment_demo(&ns)?, std::io::stdout().lock())?;

    let cells = cells.div_ceil(32) * 32;
    let nodes = uniform_nodes(cells);
    for n in ns {
        let fem = fem_point_source_1d(n, &nodes)?;
        let mut err = 0.0f64;
        for (&x, &v) in nodes.iter().zip(&fem) {
            err = err.max((v - exact_counterexample_state(n, x)?).abs());
        }
        println!("n = {n:>2}: P1 nodal error on {cells} cells {err:.1e}");
    }
    Ok(())
}

fn main() -> Result<(), Box<dyn Error>> {
    let cells = std::env::args()
        .nth(1)
        .map(|s| s.parse())
        .transpose()?
        .unwrap_or(64);
    run(cells)
}
