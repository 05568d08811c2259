// Discrete Slater check `A^T p = M 1`, `min p > 0` on the control set, for
// the three control configurations.

use std::error::Error;

use measure_control::cli::{build_preset, Preset};
use measure_control::diagnostics::{
    check_slater, check_slater_on, default_slater_weight, SlaterReport,
};
use measure_control::mesh::{select_nodes, Region};

fn show(name: &str, r: &SlaterReport) {
    println!(
        "{name:<28} satisfied = {:<5} min p = {:.6e}",
        r.satisfied, r.min_on_control
    );
}

pub fn run(nx: usize) -> Result<(), Box<dyn Error>> {
    let (mesh, problem) = build_preset(Preset::TwoBoxDirichlet, nx, nx)?;
    let h = default_slater_weight(&problem);
    show(
        "Dirichlet, whole domain",
        &check_slater_on(&problem, &select_nodes(&mesh, &Region::Whole), &h)?,
    );
    show("Dirichlet, |x|_inf <= 3/4", &check_slater(&problem, &h)?);
    let (_, neumann) = build_preset(Preset::NeumannBoundary, nx, nx)?;
    show(
        "Neumann, boundary",
        &check_slater(&neumann, &default_slater_weight(&neumann))?,
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
