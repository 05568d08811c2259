#![allow(dead_code)]

use measure_control::assembly::DiscreteProblem;
use measure_control::oracle1d::{dirichlet_problem_1d, uniform_nodes};
use measure_control::sparse::SparseMatrix;
use nalgebra::{DMatrix, DVector};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

pub fn dense(m: &SparseMatrix) -> DMatrix<f64> {
    let mut d = DMatrix::zeros(m.n_rows(), m.n_cols());
    for (r, c, v) in m.triplets() {
        d[(r, c)] += v;
    }
    d
}

pub fn sup_diff(a: &[f64], b: &[f64]) -> f64 {
    assert_eq!(a.len(), b.len());
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}

#[derive(Debug, Clone)]
pub struct KktPoint {
    pub y: Vec<f64>,
    pub p: Vec<f64>,
    pub u: Vec<f64>,
}

/// Minimizes `1/2 (y - y_d)^T M (y - y_d) + alpha/2 |u|^2 + beta sum u`
/// over `u >= 0` with `A y = B u` by trying every active set of the
/// reduced quadratic program and keeping the one satisfying the sign
/// conditions.
pub fn brute_force(problem: &DiscreteProblem, alpha: f64, beta: f64) -> KktPoint {
    let a = dense(problem.stiffness());
    let m = dense(problem.mass());
    let b = dense(problem.control());
    let g = DVector::from_column_slice(problem.target_load());
    let a_lu = a.clone().lu();
    let at_lu = a.transpose().lu();
    let s = a_lu.solve(&b).expect("A invertible");
    let h = s.transpose() * &m * &s + DMatrix::identity(b.ncols(), b.ncols()) * alpha;
    let f = s.transpose() * &g - DVector::from_element(b.ncols(), beta);
    let nc = b.ncols();
    assert!(nc <= 16, "enumeration limited to small control sets");

    let mut found: Option<DVector<f64>> = None;
    for mask in 0u32..(1u32 << nc) {
        let idx: Vec<usize> = (0..nc).filter(|j| mask & (1 << j) != 0).collect();
        let mut u = DVector::zeros(nc);
        if !idx.is_empty() {
            let hs = DMatrix::from_fn(idx.len(), idx.len(), |r, c| h[(idx[r], idx[c])]);
            let fs = DVector::from_fn(idx.len(), |r, _| f[idx[r]]);
            let Some(us) = hs.lu().solve(&fs) else {
                continue;
            };
            for (k, &j) in idx.iter().enumerate() {
                u[j] = us[k];
            }
        }
        let grad = &h * &u - &f;
        let scale = 1.0 + f.amax();
        let feasible = (0..nc).all(|j| {
            if mask & (1 << j) != 0 {
                u[j] >= -1e-12 * scale
            } else {
                grad[j] >= -1e-12 * scale
            }
        });
        if feasible {
            found = Some(u);
            break;
        }
    }
    let u = found.expect("strictly convex QP has a KKT point");
    let y = &s * &u;
    let p = at_lu.solve(&(&m * &y - &g)).expect("A invertible");
    KktPoint {
        y: y.as_slice().to_vec(),
        p: p.as_slice().to_vec(),
        u: u.as_slice().to_vec(),
    }
}

/// Random 1D problem on a uniform mesh with observation on all of `[0, 1]`,
/// a random nonnegative nodal target and at most `max_control` control
/// nodes.
pub fn random_1d_instance(rng: &mut StdRng, max_control: usize) -> DiscreteProblem {
    let cells = rng.random_range(4..=14);
    let nodes = uniform_nodes(cells);
    let values: Vec<f64> = (0..=cells).map(|_| rng.random_range(0.0..1.0)).collect();
    let lo_k = rng.random_range(1..cells);
    let hi_k = rng.random_range(lo_k..cells).min(lo_k + max_control - 1);
    let target = move |x: f64| values[(x * cells as f64).round() as usize];
    dirichlet_problem_1d(&nodes, &target, (0.0, 1.0), (nodes[lo_k], nodes[hi_k]))
        .expect("valid 1D instance")
}

pub fn seeded(seed: u64) -> StdRng {
    StdRng::seed_from_u64(seed)
}
