//! Post-solve checks: the discrete Slater condition, optimality-system
//! residuals, the mass bound it implies, and support statistics.

use serde::Serialize;

use crate::assembly::{dot, DiscreteProblem};
use crate::mesh::NodeSet;
use crate::sparse::{self, SparseError, DEFAULT_LINEAR_TOL};
use crate::ssn::{sup_norm, support_cutoff, SolverState};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SlaterReport {
    /// Minimum of the pre-adjoint solution over the control nodes.
    pub min_on_control: f64,
    /// `min_on_control` when positive, zero otherwise.
    pub epsilon_margin: f64,
    pub satisfied: bool,
}

/// The all-ones weight on the observation nodes.
pub fn default_slater_weight(problem: &DiscreteProblem) -> Vec<f64> {
    vec![1.0; problem.observation_nodes().len()]
}

fn observation_vector(problem: &DiscreteProblem, h: &[f64]) -> Result<Vec<f64>, SparseError> {
    let obs = problem.observation_nodes();
    if h.len() != obs.len() {
        return Err(SparseError::DimensionMismatch {
            expected: obs.len(),
            found: h.len(),
        });
    }
    let mut full = vec![0.0; problem.n_nodes()];
    for (&k, &v) in obs.indices().iter().zip(h) {
        full[k] = v;
    }
    Ok(full)
}

/// Solves `A^T p = M h` on the free nodes and returns `p` on all nodes
/// (zero on eliminated Dirichlet nodes).
pub fn pre_adjoint(problem: &DiscreteProblem, h: &[f64]) -> Result<Vec<f64>, SparseError> {
    let h_full = observation_vector(problem, h)?;
    let mh = problem.mass_full().matvec(&h_full)?;
    let rhs: Vec<f64> = problem
        .free_nodes()
        .indices()
        .iter()
        .map(|&k| mh[k])
        .collect();
    let at = problem.stiffness().transpose();
    let p = sparse::solve(&at, &rhs, DEFAULT_LINEAR_TOL)?;
    Ok(problem.extend_free(&p.solution))
}

/// Slater check over the problem's own control nodes.
pub fn check_slater(problem: &DiscreteProblem, h: &[f64]) -> Result<SlaterReport, SparseError> {
    check_slater_on(problem, problem.control_nodes(), h)
}

/// Slater check over an arbitrary node set, which may include eliminated
/// Dirichlet nodes (where the pre-adjoint vanishes).
pub fn check_slater_on(
    problem: &DiscreteProblem,
    control: &NodeSet,
    h: &[f64],
) -> Result<SlaterReport, SparseError> {
    let p = pre_adjoint(problem, h)?;
    let min_on_control = control
        .indices()
        .iter()
        .map(|&k| p[k])
        .fold(f64::INFINITY, f64::min);
    let satisfied = min_on_control > 0.0 && min_on_control.is_finite();
    Ok(SlaterReport {
        min_on_control,
        epsilon_margin: if satisfied { min_on_control } else { 0.0 },
        satisfied,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OptimalityReport {
    /// `||A^T p - M(y - y_d)||_inf`
    pub stationarity_residual: f64,
    /// `||A y - B u||_inf`
    pub state_residual: f64,
    /// `||min(u, 0)||_inf`
    pub nonneg_violation_u: f64,
    /// `||min(B^T p + beta, 0)||_inf`
    pub nonneg_violation_lambda: f64,
    /// `|<u, B^T p + beta>|`
    pub complementarity_gap: f64,
    /// `sum_j u_j`
    pub mass: f64,
}

impl OptimalityReport {
    pub fn max_residual(&self) -> f64 {
        self.stationarity_residual
            .max(self.state_residual)
            .max(self.nonneg_violation_u)
            .max(self.nonneg_violation_lambda)
            .max(self.complementarity_gap)
    }
}

/// Residuals of the limit optimality system at `state`.
pub fn check_optimality(state: &SolverState, problem: &DiscreteProblem) -> OptimalityReport {
    check_optimality_with_beta(state, problem, 0.0)
}

/// Same as [`check_optimality`] with the multiplier shifted by `beta`.
pub fn check_optimality_with_beta(
    state: &SolverState,
    problem: &DiscreteProblem,
    beta: f64,
) -> OptimalityReport {
    let a = problem.stiffness();
    let b = problem.control();
    let atp = a.matvec_transpose(&state.p).expect("state shape");
    let my = problem.mass().matvec(&state.y).expect("state shape");
    let stationarity: Vec<f64> = atp
        .iter()
        .zip(&my)
        .zip(problem.target_load())
        .map(|((a, m), g)| a - (m - g))
        .collect();
    let ay = a.matvec(&state.y).expect("state shape");
    let bu = b.matvec(&state.u).expect("state shape");
    let state_res: Vec<f64> = ay.iter().zip(&bu).map(|(a, b)| a - b).collect();
    let lambda: Vec<f64> = b
        .matvec_transpose(&state.p)
        .expect("state shape")
        .into_iter()
        .map(|l| l + beta)
        .collect();
    let neg_part = |v: &[f64]| v.iter().fold(0.0f64, |m, &x| if -x > m { -x } else { m });
    OptimalityReport {
        stationarity_residual: sup_norm(&stationarity),
        state_residual: sup_norm(&state_res),
        nonneg_violation_u: neg_part(&state.u),
        nonneg_violation_lambda: neg_part(&lambda),
        complementarity_gap: dot(&state.u, &lambda).abs(),
        mass: state.control_norm(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MassBound {
    pub mass: f64,
    /// `||y||_M ||h||_M / epsilon`
    pub bound: f64,
    pub holds: bool,
}

/// Checks `eps * sum_j u_j <= ||y||_M ||h||_M`, which follows from testing
/// the state equation with the Slater pre-adjoint.
pub fn mass_bound(
    state: &SolverState,
    problem: &DiscreteProblem,
    slater: &SlaterReport,
    h: &[f64],
    slack: f64,
) -> Result<MassBound, SparseError> {
    let m = problem.mass_full();
    let y = problem.extend_free(&state.y);
    let h_full = observation_vector(problem, h)?;
    let norm =
        |v: &[f64]| -> Result<f64, SparseError> { Ok(dot(v, &m.matvec(v)?).max(0.0).sqrt()) };
    let bound = if slater.satisfied {
        norm(&y)? * norm(&h_full)? / slater.epsilon_margin
    } else {
        f64::INFINITY
    };
    let mass = state.control_norm();
    Ok(MassBound {
        mass,
        bound,
        holds: mass <= bound + slack,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SparsityStats {
    pub support_size: usize,
    pub support_fraction: f64,
    /// Mesh node indices carrying weight above the threshold.
    pub support_nodes: Vec<usize>,
}

/// Control nodes with `u_j > threshold_rel * max(1, ||u||_inf)`.
pub fn sparsity_stats(state: &SolverState, control: &NodeSet, threshold_rel: f64) -> SparsityStats {
    let cut = support_cutoff(&state.u, threshold_rel);
    let support_nodes: Vec<usize> = control
        .indices()
        .iter()
        .zip(&state.u)
        .filter(|(_, &u)| u > cut)
        .map(|(&k, _)| k)
        .collect();
    SparsityStats {
        support_size: support_nodes.len(),
        support_fraction: if control.is_empty() {
            0.0
        } else {
            support_nodes.len() as f64 / control.len() as f64
        },
        support_nodes,
    }
}

/// Renders a flat struct as `key = value` lines.
pub fn key_value_block<T: Serialize>(report: &T) -> String {
    let value = serde_json::to_value(report).expect("reports serialize");
    match value {
        serde_json::Value::Object(map) => map.iter().map(|(k, v)| format!("{k} = {v}\n")).collect(),
        other => format!("{other}\n"),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::assembly::{OperatorSpec, Target};
    use crate::mesh::{build_rect_mesh, select_nodes, Bounds, Mesh, Region};

    fn mesh() -> Mesh {
        build_rect_mesh(17, 17, Bounds::symmetric_unit()).unwrap()
    }

    fn dirichlet(mesh: &Mesh, control: NodeSet, target: &Target) -> DiscreteProblem {
        DiscreteProblem::assemble(
            mesh,
            &OperatorSpec::laplace_dirichlet(),
            control,
            select_nodes(mesh, &Region::Whole),
            target,
        )
        .unwrap()
    }

    fn box_control(m: &Mesh) -> NodeSet {
        select_nodes(
            m,
            &Region::InfBall {
                center: [0.0, 0.0],
                radius: 0.75,
            },
        )
    }

    #[test]
    fn slater_fails_with_boundary_in_control() {
        let m = mesh();
        let p = dirichlet(&m, m.interior_nodes(), &Target::TwoBox);
        let whole = select_nodes(&m, &Region::Whole);
        let r = check_slater_on(&p, &whole, &default_slater_weight(&p)).unwrap();
        assert_eq!(r.min_on_control, 0.0);
        assert!(!r.satisfied);
        assert_eq!(r.epsilon_margin, 0.0);
    }

    #[test]
    fn slater_holds_on_compact_control() {
        let m = mesh();
        let p = dirichlet(&m, box_control(&m), &Target::TwoBox);
        let h = default_slater_weight(&p);
        let r = check_slater(&p, &h).unwrap();
        assert!(r.satisfied && r.min_on_control > 0.0);
        assert_eq!(r.epsilon_margin, r.min_on_control);

        let scaled: Vec<f64> = h.iter().map(|v| 3.5 * v).collect();
        let r2 = check_slater(&p, &scaled).unwrap();
        assert!(r2.satisfied);
        assert!((r2.min_on_control - 3.5 * r.min_on_control).abs() < 1e-12 * r2.min_on_control);
    }

    #[test]
    fn slater_holds_for_neumann_boundary_control() {
        let m = mesh();
        let p = DiscreteProblem::assemble(
            &m,
            &OperatorSpec::neumann_reaction(1e-2),
            m.boundary_nodes(),
            select_nodes(&m, &Region::Whole),
            &Target::TwoBox,
        )
        .unwrap();
        let r = check_slater(&p, &default_slater_weight(&p)).unwrap();
        assert!(r.satisfied);
        // with h = 1 the pre-adjoint is the constant 1/c0
        assert!((r.min_on_control - 100.0).abs() < 1e-6);
    }

    #[test]
    fn zero_solution_has_zero_residuals() {
        let m = mesh();
        let p = dirichlet(&m, box_control(&m), &Target::Zero);
        let r = check_optimality(&SolverState::zero(&p), &p);
        assert_eq!(r.max_residual(), 0.0);
        assert_eq!(r.mass, 0.0);
    }

    #[test]
    fn negative_weight_is_reported() {
        let m = mesh();
        let p = dirichlet(&m, box_control(&m), &Target::Zero);
        let mut s = SolverState::zero(&p);
        s.u[3] = -0.25;
        s.y = crate::sparse::solve(p.stiffness(), &p.control().matvec(&s.u).unwrap(), 1e-13)
            .unwrap()
            .solution;
        let r = check_optimality(&s, &p);
        assert_eq!(r.nonneg_violation_u, 0.25);
        assert!(r.state_residual < 1e-12);
    }

    #[test]
    fn support_counts() {
        let control = NodeSet::new("control", vec![3, 5, 8, 9, 12]);
        let mut s = SolverState {
            y: vec![],
            p: vec![],
            u: vec![0.0; 5],
            alpha: 0.0,
            active_mask: vec![false; 5],
        };
        let st = sparsity_stats(&s, &control, 1e-8);
        assert_eq!(st.support_size, 0);
        s.u = vec![0.5, 1e-12, 2.0, 0.0, 0.3];
        let st = sparsity_stats(&s, &control, 1e-8);
        assert_eq!(st.support_size, 3);
        assert_eq!(st.support_nodes, vec![3, 8, 12]);
        assert!((st.support_fraction - 0.6).abs() < 1e-15);
    }

    #[test]
    fn key_value_rendering() {
        let r = SlaterReport {
            min_on_control: 0.5,
            epsilon_margin: 0.5,
            satisfied: true,
        };
        let text = key_value_block(&r);
        assert!(text.contains("min_on_control = 0.5\n"));
        assert!(text.contains("satisfied = true\n"));
        let json = serde_json::to_value(r).unwrap();
        assert_eq!(json["epsilon_margin"], 0.5);
    }
}
