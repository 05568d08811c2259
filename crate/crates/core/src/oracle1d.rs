//! Exact one-dimensional solutions for `-y'' = u` on `(0, 1)` with
//! homogeneous Dirichlet data, and the minimizing sequence
//! `u_n = n * delta_{1/n}` whose objective tends to zero while its mass
//! blows up.
//!
//! Also hosts the 1D assembly path (tridiagonal stiffness, P1 mass on
//! arbitrary sorted node lists) so the Newton solvers can be checked against
//! exact ground truth.

use std::io::{self, Write};

use thiserror::Error;

use crate::assembly::{AssemblyError, DiscreteProblem};
use crate::mesh::{NodeSet, GEOMETRIC_TOL};
use crate::sparse::{self, SparseError, SparseMatrix};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum OracleError {
    #[error("n must be at least 2, got {0}")]
    InvalidN(usize),
    #[error("x = {0} lies outside [0, 1]")]
    OutOfDomain(f64),
    #[error("1/{0} is not a mesh node")]
    NotANode(usize),
    #[error("node list must be strictly increasing from 0 to 1")]
    InvalidNodes,
    #[error(transparent)]
    Assembly(#[from] AssemblyError),
    #[error(transparent)]
    Sparse(#[from] SparseError),
}

/// `y_n(x) = (n - 1) x` for `x <= 1/n` and `1 - x` beyond.
pub fn exact_counterexample_state(n: usize, x: f64) -> Result<f64, OracleError> {
    if n < 2 {
        return Err(OracleError::InvalidN(n));
    }
    if !(0.0..=1.0).contains(&x) {
        return Err(OracleError::OutOfDomain(x));
    }
    let kink = 1.0 / n as f64;
    Ok(if x <= kink {
        (n - 1) as f64 * x
    } else {
        1.0 - x
    })
}

/// `cells + 1` equispaced nodes on `[0, 1]`.
pub fn uniform_nodes(cells: usize) -> Vec<f64> {
    (0..=cells)
        .map(|i| {
            if i == cells {
                1.0
            } else {
                i as f64 / cells as f64
            }
        })
        .collect()
}

fn check_nodes(nodes: &[f64]) -> Result<(), OracleError> {
    let ok = nodes.len() >= 3
        && nodes[0] == 0.0
        && *nodes.last().unwrap() == 1.0
        && nodes.windows(2).all(|w| w[0] < w[1]);
    if ok {
        Ok(())
    } else {
        Err(OracleError::InvalidNodes)
    }
}

/// `int u' v'` over all nodes of a 1D P1 mesh.
pub fn stiffness_1d(nodes: &[f64]) -> SparseMatrix {
    let mut t = Vec::with_capacity(4 * nodes.len());
    for (e, w) in nodes.windows(2).enumerate() {
        let k = 1.0 / (w[1] - w[0]);
        t.extend([(e, e, k), (e + 1, e + 1, k), (e, e + 1, -k), (e + 1, e, -k)]);
    }
    SparseMatrix::from_triplets(nodes.len(), nodes.len(), &t).expect("tridiagonal indices")
}

/// 1D P1 mass matrix over the elements whose end points both lie in
/// `observation`.
pub fn mass_1d(nodes: &[f64], observation: &NodeSet) -> SparseMatrix {
    let mut t = Vec::with_capacity(4 * nodes.len());
    for (e, w) in nodes.windows(2).enumerate() {
        if !(observation.contains(e) && observation.contains(e + 1)) {
            continue;
        }
        let h = w[1] - w[0];
        t.extend([
            (e, e, h / 3.0),
            (e + 1, e + 1, h / 3.0),
            (e, e + 1, h / 6.0),
            (e + 1, e, h / 6.0),
        ]);
    }
    SparseMatrix::from_triplets(nodes.len(), nodes.len(), &t).expect("tridiagonal indices")
}

fn nodes_in(nodes: &[f64], (lo, hi): (f64, f64), label: &str) -> NodeSet {
    NodeSet::new(
        label,
        nodes
            .iter()
            .enumerate()
            .filter(|(_, &x)| x >= lo - GEOMETRIC_TOL && x <= hi + GEOMETRIC_TOL)
            .map(|(k, _)| k)
            .collect(),
    )
}

/// Control problem for `-y'' = u` on `nodes`, observing on the closed
/// interval `observation` and placing Dirac weights at interior nodes inside
/// the closed interval `control`.
pub fn dirichlet_problem_1d(
    nodes: &[f64],
    target: &dyn Fn(f64) -> f64,
    observation: (f64, f64),
    control: (f64, f64),
) -> Result<DiscreteProblem, OracleError> {
    check_nodes(nodes)?;
    let last = nodes.len() - 1;
    let free = NodeSet::new("free", (1..last).collect());
    let obs = nodes_in(nodes, observation, "observation");
    let ctrl = NodeSet::new(
        "control",
        nodes_in(nodes, control, "control")
            .indices()
            .iter()
            .copied()
            .filter(|&k| k != 0 && k != last)
            .collect(),
    );
    if obs.is_empty() {
        return Err(AssemblyError::EmptyObservation.into());
    }
    let problem = DiscreteProblem::from_full_operators(
        &stiffness_1d(nodes),
        mass_1d(nodes, &obs),
        nodes.iter().map(|&x| target(x)).collect(),
        free,
        ctrl,
        obs,
    )?;
    Ok(problem)
}

/// Index of the node equal to `1/n`.
fn kink_node(n: usize, nodes: &[f64]) -> Option<usize> {
    let kink = 1.0 / n as f64;
    nodes
        .iter()
        .position(|&x| (x - kink).abs() <= GEOMETRIC_TOL)
}

/// P1 solution of `-y'' = n delta_{1/n}` with zero boundary values,
/// returned on every node (boundary entries are zero).
pub fn fem_point_source_1d(n: usize, nodes: &[f64]) -> Result<Vec<f64>, OracleError> {
    if n < 2 {
        return Err(OracleError::InvalidN(n));
    }
    check_nodes(nodes)?;
    let k = kink_node(n, nodes).ok_or(OracleError::NotANode(n))?;
    let last = nodes.len() - 1;
    let interior: Vec<usize> = (1..last).collect();
    let a = stiffness_1d(nodes).submatrix(&interior, &interior);
    let mut rhs = vec![0.0; interior.len()];
    rhs[k - 1] = n as f64;
    let sol = sparse::solve(&a, &rhs, 1e-14)?;
    let mut out = vec![0.0; nodes.len()];
    out[1..last].copy_from_slice(&sol.solution);
    Ok(out)
}

/// `int_a^b (c0 + c1 x)^2 dx`
fn integrate_linear_squared(c0: f64, c1: f64, a: f64, b: f64) -> f64 {
    if c1 == 0.0 {
        return c0 * c0 * (b - a);
    }
    let t = |x: f64| c0 + c1 * x;
    (t(b).powi(3) - t(a).powi(3)) / (3.0 * c1)
}

/// `J(y_n) = ||y_n - (1 - x)||^2_{L2(0,1)}`, integrated piece by piece.
pub fn counterexample_objective(n: usize) -> Result<f64, OracleError> {
    if n < 2 {
        return Err(OracleError::InvalidN(n));
    }
    let nf = n as f64;
    // y_n - (1 - x) is n x - 1 on [0, 1/n] and vanishes on [1/n, 1]
    Ok(integrate_linear_squared(-1.0, nf, 0.0, 1.0 / nf))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NonattainmentRow {
    pub n: usize,
    pub objective: f64,
    /// Total variation of `n delta_{1/n}`.
    pub mass: f64,
}

/// Objective and measure norm along `u_n = n delta_{1/n}` for each `n`.
pub fn nonattainment_demo(n_list: &[usize]) -> Result<Vec<NonattainmentRow>, OracleError> {
    n_list
        .iter()
        .map(|&n| {
            Ok(NonattainmentRow {
                n,
                objective: counterexample_objective(n)?,
                mass: n as f64,
            })
        })
        .collect()
}

/// Writes `n,objective,mass`.
pub fn write_nonattainment_csv<W: Write>(rows: &[NonattainmentRow], mut out: W) -> io::Result<()> {
    writeln!(out, "n,objective,mass")?;
    for r in rows {
        writeln!(out, "{},{:.16e},{:.16e}", r.n, r.objective, r.mass)?;
    }
    Ok(())
}
