use std::fmt::Write as _;
use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use thiserror::Error;

use crate::assembly::DiscreteProblem;
use crate::diagnostics::SparsityStats;
use crate::mesh::Mesh;
use crate::ssn::{PathPoint, SolverState};

#[derive(Debug, Error)]
pub enum ExportError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },
}

pub(crate) fn write_file(dir: &Path, name: &str, bytes: &[u8]) -> Result<PathBuf, ExportError> {
    let path = dir.join(name);
    fs::write(&path, bytes).map_err(|source| ExportError::Io {
        path: path.clone(),
        source,
    })?;
    Ok(path)
}

pub(crate) fn write_json(
    dir: &Path,
    name: &str,
    value: &serde_json::Value,
) -> Result<PathBuf, ExportError> {
    let mut text = serde_json::to_string_pretty(value).expect("json values serialize");
    text.push('\n');
    write_file(dir, name, text.as_bytes())
}

/// Writes `alpha_or_beta,objective,mass,support_size`, one row per point.
pub fn write_path_csv<W: Write>(path: &[PathPoint], mut out: W) -> io::Result<()> {
    writeln!(out, "alpha_or_beta,objective,mass,support_size")?;
    for p in path {
        writeln!(
            out,
            "{:.16e},{:.16e},{:.16e},{}",
            p.alpha_or_beta, p.objective, p.control_norm, p.support_size
        )?;
    }
    Ok(())
}

fn nodal_csv(mesh: &Mesh, value_name: &str, nodes: &[usize], values: &[f64]) -> String {
    let mut s = format!("node,x,y,{value_name}\n");
    for (&k, v) in nodes.iter().zip(values) {
        let [x, y] = mesh.node(k);
        writeln!(s, "{k},{x:.16e},{y:.16e},{v:.16e}").expect("string write");
    }
    s
}

/// Writes `control.csv`, `state.csv`, `support.csv`, `path.csv`,
/// `report.json` and, with `emit_matrices`, the system matrices in
/// MatrixMarket form. Returns the written paths.
#[allow(clippy::too_many_arguments)]
pub fn export_results(
    dir: &Path,
    mesh: &Mesh,
    problem: &DiscreteProblem,
    state: &SolverState,
    path: &[PathPoint],
    sparsity: &SparsityStats,
    report: &serde_json::Value,
    emit_matrices: bool,
) -> Result<Vec<PathBuf>, ExportError> {
    let mut files = Vec::new();
    let control = problem.control_nodes().indices();
    files.push(write_file(
        dir,
        "control.csv",
        nodal_csv(mesh, "u", control, &state.u).as_bytes(),
    )?);

    let all: Vec<usize> = (0..mesh.n_nodes()).collect();
    let y = problem.extend_free(&state.y);
    files.push(write_file(
        dir,
        "state.csv",
        nodal_csv(mesh, "yh", &all, &y).as_bytes(),
    )?);

    let weights: Vec<f64> = sparsity
        .support_nodes
        .iter()
        .map(|&k| {
            let j = problem
                .control_nodes()
                .position(k)
                .expect("support in control set");
            state.u[j]
        })
        .collect();
    files.push(write_file(
        dir,
        "support.csv",
        nodal_csv(mesh, "u", &sparsity.support_nodes, &weights).as_bytes(),
    )?);

    let mut buf = Vec::new();
    write_path_csv(path, &mut buf).expect("in-memory write");
    files.push(write_file(dir, "path.csv", &buf)?);
    files.push(write_json(dir, "report.json", report)?);

    if emit_matrices {
        for (name, m) in [
            ("stiffness.mtx", problem.stiffness()),
            ("mass.mtx", problem.mass()),
            ("control.mtx", problem.control()),
        ] {
            let mut buf = Vec::new();
            m.write_matrix_market(&mut buf).expect("in-memory write");
            files.push(write_file(dir, name, &buf)?);
        }
    }
    Ok(files)
}
