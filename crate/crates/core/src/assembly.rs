//! P1 finite element operators for the control problem.
//!
//! The bilinear form is
//! `a(y, v) = k * int grad y . grad v + int c y v + int_{boundary} r y v`,
//! with `k` a scalar diffusion multiplier. Homogeneous Dirichlet conditions
//! are imposed by dropping the boundary rows and columns.

use std::str::FromStr;

use thiserror::Error;

use crate::mesh::{Mesh, NodeSet};
use crate::sparse::{SparseError, SparseMatrix};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AssemblyError {
    #[error("natural boundary conditions need a positive reaction or Robin coefficient")]
    Coercivity,
    #[error("invalid coefficient: {0}")]
    InvalidCoefficient(String),
    #[error("observation node set is empty")]
    EmptyObservation,
    #[error("control node {node} is not a free node")]
    ControlOutsideFree { node: usize },
    #[error("unknown target descriptor {0:?}")]
    UnknownTarget(String),
    #[error("tabulated target has {found} values, mesh has {expected} nodes")]
    TargetLength { expected: usize, found: usize },
    #[error("node index {node} out of range ({n_nodes} nodes)")]
    NodeOutOfRange { node: usize, n_nodes: usize },
    #[error(transparent)]
    Sparse(#[from] SparseError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoundaryKind {
    DirichletHomogeneous,
    Natural,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Reaction {
    Constant(f64),
    /// Nodal values, interpolated linearly on each element.
    Nodal(Vec<f64>),
}

impl Reaction {
    fn is_zero(&self) -> bool {
        match self {
            Reaction::Constant(c) => *c == 0.0,
            Reaction::Nodal(v) => v.iter().all(|&c| c == 0.0),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct OperatorSpec {
    pub diffusion: f64,
    pub reaction: Reaction,
    pub robin: f64,
    pub bc_kind: BoundaryKind,
}

impl OperatorSpec {
    /// `-Laplace` with homogeneous Dirichlet data.
    pub fn laplace_dirichlet() -> Self {
        OperatorSpec {
            diffusion: 1.0,
            reaction: Reaction::Constant(0.0),
            robin: 0.0,
            bc_kind: BoundaryKind::DirichletHomogeneous,
        }
    }

    /// `-Laplace + c0 Id` with homogeneous Neumann data.
    pub fn neumann_reaction(c0: f64) -> Self {
        OperatorSpec {
            diffusion: 1.0,
            reaction: Reaction::Constant(c0),
            robin: 0.0,
            bc_kind: BoundaryKind::Natural,
        }
    }

    pub fn validate(&self, n_nodes: usize) -> Result<(), AssemblyError> {
        if !(self.diffusion >= 0.0) || !self.diffusion.is_finite() {
            return Err(AssemblyError::InvalidCoefficient(format!(
                "diffusion = {}",
                self.diffusion
            )));
        }
        if !(self.robin >= 0.0) || !self.robin.is_finite() {
            return Err(AssemblyError::InvalidCoefficient(format!(
                "robin = {}",
                self.robin
            )));
        }
        match &self.reaction {
            Reaction::Constant(c) if !(*c >= 0.0) || !c.is_finite() => {
                return Err(AssemblyError::InvalidCoefficient(format!("reaction = {c}")));
            }
            Reaction::Nodal(v) => {
                if v.len() != n_nodes {
                    return Err(AssemblyError::InvalidCoefficient(format!(
                        "{} nodal reaction values for {} nodes",
                        v.len(),
                        n_nodes
                    )));
                }
                if let Some(c) = v.iter().find(|c| !(**c >= 0.0) || !c.is_finite()) {
                    return Err(AssemblyError::InvalidCoefficient(format!("reaction = {c}")));
                }
            }
            _ => {}
        }
        if self.bc_kind == BoundaryKind::Natural && self.reaction.is_zero() && self.robin == 0.0 {
            return Err(AssemblyError::Coercivity);
        }
        Ok(())
    }
}

/// Nodes that carry unknowns: interior nodes for Dirichlet data, all nodes
/// otherwise.
pub fn free_nodes(mesh: &Mesh, bc_kind: BoundaryKind) -> NodeSet {
    match bc_kind {
        BoundaryKind::DirichletHomogeneous => mesh.interior_nodes().with_label("free"),
        BoundaryKind::Natural => NodeSet::new("free", (0..mesh.n_nodes()).collect()),
    }
}

fn triangle_geometry(mesh: &Mesh, tri: [usize; 3]) -> (f64, [[f64; 2]; 3]) {
    let p = tri.map(|k| mesh.node(k));
    let area = 0.5
        * ((p[1][0] - p[0][0]) * (p[2][1] - p[0][1]) - (p[2][0] - p[0][0]) * (p[1][1] - p[0][1]));
    // grad phi_i = (y_j - y_k, x_k - x_j) / (2 area), (i, j, k) cyclic
    let grads = std::array::from_fn(|i| {
        let j = (i + 1) % 3;
        let k = (i + 2) % 3;
        [
            (p[j][1] - p[k][1]) / (2.0 * area),
            (p[k][0] - p[j][0]) / (2.0 * area),
        ]
    });
    (area, grads)
}

/// `int phi_i phi_j phi_k` over a triangle of the given area.
fn triple_product(area: f64, i: usize, j: usize, k: usize) -> f64 {
    if i == j && j == k {
        area / 10.0
    } else if i == j || j == k || i == k {
        area / 30.0
    } else {
        area / 60.0
    }
}

fn element_mass(area: f64, i: usize, j: usize) -> f64 {
    if i == j {
        area / 6.0
    } else {
        area / 12.0
    }
}

/// Stiffness matrix over every mesh node, before any Dirichlet elimination.
pub fn assemble_stiffness_full(
    mesh: &Mesh,
    spec: &OperatorSpec,
) -> Result<SparseMatrix, AssemblyError> {
    spec.validate(mesh.n_nodes())?;
    let mut t = Vec::with_capacity(9 * mesh.n_triangles() + 4 * mesh.nx() + 4 * mesh.ny());
    for &tri in mesh.triangles() {
        let (area, grads) = triangle_geometry(mesh, tri);
        for i in 0..3 {
            for j in 0..3 {
                let mut v =
                    spec.diffusion * area * (grads[i][0] * grads[j][0] + grads[i][1] * grads[j][1]);
                match &spec.reaction {
                    Reaction::Constant(c) => v += c * element_mass(area, i, j),
                    Reaction::Nodal(c) => {
                        v += (0..3)
                            .map(|k| c[tri[k]] * triple_product(area, i, j, k))
                            .sum::<f64>()
                    }
                }
                t.push((tri[i], tri[j], v));
            }
        }
    }
    if spec.robin > 0.0 {
        for [a, b] in mesh.boundary_edges() {
            let [ax, ay] = mesh.node(a);
            let [bx, by] = mesh.node(b);
            let len = (bx - ax).hypot(by - ay);
            let diag = spec.robin * len / 3.0;
            let off = spec.robin * len / 6.0;
            t.extend([(a, a, diag), (b, b, diag), (a, b, off), (b, a, off)]);
        }
    }
    Ok(SparseMatrix::from_triplets(
        mesh.n_nodes(),
        mesh.n_nodes(),
        &t,
    )?)
}

/// Stiffness matrix `A_h` on the free nodes.
pub fn assemble_stiffness(mesh: &Mesh, spec: &OperatorSpec) -> Result<SparseMatrix, AssemblyError> {
    let full = assemble_stiffness_full(mesh, spec)?;
    Ok(match spec.bc_kind {
        BoundaryKind::Natural => full,
        BoundaryKind::DirichletHomogeneous => {
            let free = free_nodes(mesh, spec.bc_kind);
            full.submatrix(free.indices(), free.indices())
        }
    })
}

/// P1 mass matrix over all nodes, summed over the elements whose three
/// vertices are observation nodes.
pub fn assemble_mass(mesh: &Mesh, observation: &NodeSet) -> Result<SparseMatrix, AssemblyError> {
    if observation.is_empty() {
        return Err(AssemblyError::EmptyObservation);
    }
    let whole = observation.len() == mesh.n_nodes();
    let mut t = Vec::with_capacity(9 * mesh.n_triangles());
    for &tri in mesh.triangles() {
        if !whole && !tri.iter().all(|&k| observation.contains(k)) {
            continue;
        }
        let (area, _) = triangle_geometry(mesh, tri);
        for i in 0..3 {
            for j in 0..3 {
                t.push((tri[i], tri[j], element_mass(area, i, j)));
            }
        }
    }
    Ok(SparseMatrix::from_triplets(
        mesh.n_nodes(),
        mesh.n_nodes(),
        &t,
    )?)
}

/// Selection matrix `B_h` (free nodes x control nodes) placing a unit
/// Dirac weight at each control node.
pub fn assemble_control_restriction(
    control: &NodeSet,
    free: &NodeSet,
) -> Result<SparseMatrix, AssemblyError> {
    let mut t = Vec::with_capacity(control.len());
    for (j, &node) in control.indices().iter().enumerate() {
        let row = free
            .position(node)
            .ok_or(AssemblyError::ControlOutsideFree { node })?;
        t.push((row, j, 1.0));
    }
    Ok(SparseMatrix::from_triplets(free.len(), control.len(), &t)?)
}

/// Built-in desired states.
#[derive(Debug, Clone, PartialEq)]
pub enum Target {
    /// Indicator of `|x-0.5|,|y-0.5| < 1/4` plus half the indicator of
    /// `|x+0.5|,|y+0.5| < 1/4`.
    TwoBox,
    /// `(1 - x^2)(1 - y^2)`
    Bump,
    Zero,
    Tabulated(Vec<f64>),
}

impl Target {
    pub fn eval(&self, x: f64, y: f64) -> Option<f64> {
        let box_indicator =
            |c: f64| f64::from(u8::from((x - c).abs() < 0.25 && (y - c).abs() < 0.25));
        match self {
            Target::TwoBox => Some(box_indicator(0.5) + 0.5 * box_indicator(-0.5)),
            Target::Bump => Some((1.0 - x * x) * (1.0 - y * y)),
            Target::Zero => Some(0.0),
            Target::Tabulated(_) => None,
        }
    }
}

impl FromStr for Target {
    type Err = AssemblyError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "two_box" => Ok(Target::TwoBox),
            "bump" => Ok(Target::Bump),
            "zero" => Ok(Target::Zero),
            other => Err(AssemblyError::UnknownTarget(other.to_string())),
        }
    }
}

/// Nodal interpolant of `target` on every mesh node.
pub fn interpolate_target(mesh: &Mesh, target: &Target) -> Result<Vec<f64>, AssemblyError> {
    if let Target::Tabulated(values) = target {
        if values.len() != mesh.n_nodes() {
            return Err(AssemblyError::TargetLength {
                expected: mesh.n_nodes(),
                found: values.len(),
            });
        }
        return Ok(values.clone());
    }
    Ok(mesh
        .nodes()
        .iter()
        .map(|&[x, y]| target.eval(x, y).expect("analytic target"))
        .collect())
}

/// Discrete optimality-system data on the free nodes.
///
/// The tracking term is kept over all nodes so that targets that do not
/// vanish on eliminated Dirichlet nodes are still measured correctly; the
/// adjoint right-hand side uses `target_load = (M y_d)` restricted to the
/// free rows, which equals `M_h y_d` whenever `y_d` vanishes on eliminated
/// nodes.
#[derive(Debug, Clone)]
pub struct DiscreteProblem {
    stiffness: SparseMatrix,
    mass: SparseMatrix,
    control: SparseMatrix,
    target: Vec<f64>,
    target_load: Vec<f64>,
    mass_full: SparseMatrix,
    target_full: Vec<f64>,
    free_nodes: NodeSet,
    control_nodes: NodeSet,
    observation_nodes: NodeSet,
}

impl DiscreteProblem {
    /// Restricts full-node operators to `free` and builds `B_h`.
    pub fn from_full_operators(
        stiffness_full: &SparseMatrix,
        mass_full: SparseMatrix,
        target_full: Vec<f64>,
        free: NodeSet,
        control: NodeSet,
        observation: NodeSet,
    ) -> Result<Self, AssemblyError> {
        let n = stiffness_full.n_rows();
        for m in [stiffness_full, &mass_full] {
            if m.n_rows() != n || m.n_cols() != n {
                return Err(SparseError::DimensionMismatch {
                    expected: n,
                    found: m.n_rows(),
                }
                .into());
            }
        }
        if target_full.len() != n {
            return Err(AssemblyError::TargetLength {
                expected: n,
                found: target_full.len(),
            });
        }
        for set in [&free, &control, &observation] {
            if let Some(&node) = set.indices().last() {
                if node >= n {
                    return Err(AssemblyError::NodeOutOfRange { node, n_nodes: n });
                }
            }
        }
        if observation.is_empty() {
            return Err(AssemblyError::EmptyObservation);
        }
        let free_idx = free.indices();
        let stiffness = stiffness_full.submatrix(free_idx, free_idx);
        let mass = mass_full.submatrix(free_idx, free_idx);
        let load_full = mass_full.matvec(&target_full)?;
        let target_load = free_idx.iter().map(|&k| load_full[k]).collect();
        let target = free_idx.iter().map(|&k| target_full[k]).collect();
        let control_matrix = assemble_control_restriction(&control, &free)?;
        Ok(DiscreteProblem {
            stiffness,
            mass,
            control: control_matrix,
            target,
            target_load,
            mass_full,
            target_full,
            free_nodes: free,
            control_nodes: control.with_label("control"),
            observation_nodes: observation.with_label("observation"),
        })
    }

    /// Assembles the problem on a 2D mesh.
    pub fn assemble(
        mesh: &Mesh,
        spec: &OperatorSpec,
        control: NodeSet,
        observation: NodeSet,
        target: &Target,
    ) -> Result<Self, AssemblyError> {
        let stiffness_full = assemble_stiffness_full(mesh, spec)?;
        let mass_full = assemble_mass(mesh, &observation)?;
        let target_full = interpolate_target(mesh, target)?;
        DiscreteProblem::from_full_operators(
            &stiffness_full,
            mass_full,
            target_full,
            free_nodes(mesh, spec.bc_kind),
            control,
            observation,
        )
    }

    /// Same operators with the target scaled by `s`.
    pub fn with_scaled_target(&self, s: f64) -> Self {
        let mut out = self.clone();
        out.target.iter_mut().for_each(|v| *v *= s);
        out.target_load.iter_mut().for_each(|v| *v *= s);
        out.target_full.iter_mut().for_each(|v| *v *= s);
        out
    }

    /// `A_h`
    pub fn stiffness(&self) -> &SparseMatrix {
        &self.stiffness
    }

    /// `M_h`
    pub fn mass(&self) -> &SparseMatrix {
        &self.mass
    }

    /// `B_h`
    pub fn control(&self) -> &SparseMatrix {
        &self.control
    }

    /// `y_d` on the free nodes.
    pub fn target(&self) -> &[f64] {
        &self.target
    }

    /// Right-hand side of the adjoint equation at `y = 0`.
    pub fn target_load(&self) -> &[f64] {
        &self.target_load
    }

    pub fn mass_full(&self) -> &SparseMatrix {
        &self.mass_full
    }

    pub fn target_full(&self) -> &[f64] {
        &self.target_full
    }

    pub fn free_nodes(&self) -> &NodeSet {
        &self.free_nodes
    }

    pub fn control_nodes(&self) -> &NodeSet {
        &self.control_nodes
    }

    pub fn observation_nodes(&self) -> &NodeSet {
        &self.observation_nodes
    }

    pub fn n_free(&self) -> usize {
        self.free_nodes.len()
    }

    pub fn n_control(&self) -> usize {
        self.control_nodes.len()
    }

    pub fn n_nodes(&self) -> usize {
        self.target_full.len()
    }

    /// `||y_d||_inf` over all nodes.
    pub fn target_sup_norm(&self) -> f64 {
        self.target_full.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Extends a free-node vector by zero to all nodes.
    pub fn extend_free(&self, y: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.n_nodes()];
        for (&k, &v) in self.free_nodes.indices().iter().zip(y) {
            out[k] = v;
        }
        out
    }

    /// Tracking term `1/2 ||y - y_d||^2` in the observation mass norm.
    pub fn tracking(&self, y: &[f64]) -> f64 {
        let mut e = self.extend_free(y);
        e.iter_mut()
            .zip(&self.target_full)
            .for_each(|(a, b)| *a -= b);
        let me = self.mass_full.matvec(&e).expect("consistent dimensions");
        (0.5 * dot(&e, &me)).max(0.0)
    }
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::{build_rect_mesh, select_nodes, Bounds, Region};

    fn unit_square(n: usize) -> Mesh {
        build_rect_mesh(n, n, Bounds::new(0.0, 1.0, 0.0, 1.0)).unwrap()
    }

    /// Dense element sum written out independently of the sparse path.
    fn dense_laplacian(mesh: &Mesh) -> Vec<Vec<f64>> {
        let n = mesh.n_nodes();
        let mut k = vec![vec![0.0; n]; n];
        for tri in mesh.triangles() {
            let p: Vec<[f64; 2]> = tri.iter().map(|&i| mesh.node(i)).collect();
            let b = [p[1][1] - p[2][1], p[2][1] - p[0][1], p[0][1] - p[1][1]];
            let c = [p[2][0] - p[1][0], p[0][0] - p[2][0], p[1][0] - p[0][0]];
            let area2 = b[0] * c[1] - b[1] * c[0];
            for i in 0..3 {
                for j in 0..3 {
                    k[tri[i]][tri[j]] += (b[i] * b[j] + c[i] * c[j]) / (2.0 * area2);
                }
            }
        }
        k
    }

    #[test]
    fn three_by_three_dirichlet_laplacian() {
        let m = unit_square(3);
        let a = assemble_stiffness(&m, &OperatorSpec::laplace_dirichlet()).unwrap();
        assert_eq!(a.n_rows(), 1);
        assert!((a.get(0, 0) - 4.0).abs() < 1e-14);
    }

    #[test]
    fn galerkin_matches_dense_element_sum() {
        let m = unit_square(3);
        let spec = OperatorSpec {
            bc_kind: BoundaryKind::Natural,
            reaction: Reaction::Constant(0.0),
            robin: 0.0,
            diffusion: 1.0,
        };
        // pure diffusion with natural BC is not coercive, so compare the full operator before elimination
        assert_eq!(spec.validate(m.n_nodes()), Err(AssemblyError::Coercivity));
        let full = assemble_stiffness_full(
            &m,
            &OperatorSpec {
                bc_kind: BoundaryKind::DirichletHomogeneous,
                ..spec
            },
        )
        .unwrap()
        .to_dense();
        let reference = dense_laplacian(&m);
        for i in 0..9 {
            for j in 0..9 {
                assert!((full[i][j] - reference[i][j]).abs() <= 1e-13, "({i},{j})");
            }
        }
        // constant kernel of the pure diffusion form
        for row in &full {
            assert!(row.iter().sum::<f64>().abs() < 1e-13);
        }
    }

    #[test]
    fn zero_diffusion_unit_reaction_is_mass() {
        let m = build_rect_mesh(4, 3, Bounds::symmetric_unit()).unwrap();
        let spec = OperatorSpec {
            diffusion: 0.0,
            reaction: Reaction::Constant(1.0),
            robin: 0.0,
            bc_kind: BoundaryKind::Natural,
        };
        let a = assemble_stiffness(&m, &spec).unwrap();
        let mass = assemble_mass(&m, &select_nodes(&m, &Region::Whole)).unwrap();
        assert_eq!(a.to_dense(), mass.to_dense());

        let nodal = OperatorSpec {
            reaction: Reaction::Nodal(vec![1.0; m.n_nodes()]),
            ..spec
        };
        let b = assemble_stiffness(&m, &nodal).unwrap();
        for (x, y) in b.values().iter().zip(mass.values()) {
            assert!((x - y).abs() < 1e-15);
        }
    }

    #[test]
    fn neumann_reaction_operator() {
        let m = build_rect_mesh(9, 9, Bounds::symmetric_unit()).unwrap();
        let c0 = 1e-2;
        let a = assemble_stiffness(&m, &OperatorSpec::neumann_reaction(c0)).unwrap();
        assert_eq!(a.n_rows(), 81);
        let lap = dense_laplacian(&m);
        let mass = assemble_mass(&m, &select_nodes(&m, &Region::Whole))
            .unwrap()
            .to_dense();
        let ad = a.to_dense();
        for i in 0..81 {
            for j in 0..81 {
                assert!((ad[i][j] - (lap[i][j] + c0 * mass[i][j])).abs() < 1e-13);
            }
        }
        assert!(a.asymmetry() <= 1e-13);
        // positive definite: constant vector has energy c0 * area
        let ones = vec![1.0; 81];
        let energy = dot(&ones, &a.matvec(&ones).unwrap());
        assert!((energy - c0 * 4.0).abs() < 1e-12);
    }

    #[test]
    fn robin_term_on_boundary() {
        let m = build_rect_mesh(5, 5, Bounds::symmetric_unit()).unwrap();
        let spec = OperatorSpec {
            diffusion: 1.0,
            reaction: Reaction::Constant(0.0),
            robin: 2.0,
            bc_kind: BoundaryKind::Natural,
        };
        let a = assemble_stiffness(&m, &spec).unwrap();
        // 1^T A 1 = r * perimeter
        let ones = vec![1.0; 25];
        let energy = dot(&ones, &a.matvec(&ones).unwrap());
        assert!((energy - 2.0 * 8.0).abs() < 1e-12);
    }

    #[test]
    fn invalid_coefficients() {
        let m = unit_square(3);
        let mut spec = OperatorSpec::laplace_dirichlet();
        spec.reaction = Reaction::Constant(-1.0);
        assert!(matches!(
            assemble_stiffness(&m, &spec),
            Err(AssemblyError::InvalidCoefficient(_))
        ));
        let spec = OperatorSpec {
            reaction: Reaction::Constant(0.0),
            ..OperatorSpec::neumann_reaction(0.0)
        };
        assert_eq!(
            assemble_stiffness(&m, &spec),
            Err(AssemblyError::Coercivity)
        );
    }

    #[test]
    fn mass_row_sums_total_area() {
        let m = build_rect_mesh(7, 5, Bounds::symmetric_unit()).unwrap();
        let mass = assemble_mass(&m, &select_nodes(&m, &Region::Whole)).unwrap();
        let total: f64 = mass.values().iter().sum();
        assert!((total - 4.0).abs() < 1e-13);
        assert!(mass.asymmetry() == 0.0);
    }

    #[test]
    fn single_cell_mass_matrix() {
        let m = build_rect_mesh(2, 2, Bounds::new(0.0, 2.0, 0.0, 1.0)).unwrap();
        let mass = assemble_mass(&m, &select_nodes(&m, &Region::Whole))
            .unwrap()
            .to_dense();
        // triangles (0,1,3) and (0,3,2), each of area 1
        let el = |i: usize, j: usize| if i == j { 2.0 / 12.0 } else { 1.0 / 12.0 };
        let mut expected = [[0.0; 4]; 4];
        for tri in [[0, 1, 3], [0, 3, 2]] {
            for a in 0..3 {
                for b in 0..3 {
                    expected[tri[a]][tri[b]] += el(a, b);
                }
            }
        }
        for i in 0..4 {
            for j in 0..4 {
                assert!((mass[i][j] - expected[i][j]).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn empty_observation_is_rejected() {
        let m = unit_square(3);
        assert_eq!(
            assemble_mass(&m, &NodeSet::new("observation", vec![])),
            Err(AssemblyError::EmptyObservation)
        );
    }

    #[test]
    fn restricted_mass_uses_interior_elements_only() {
        let m = build_rect_mesh(5, 5, Bounds::symmetric_unit()).unwrap();
        let obs = select_nodes(
            &m,
            &Region::InfBall {
                center: [0.0, 0.0],
                radius: 0.5,
            },
        );
        let mass = assemble_mass(&m, &obs).unwrap();
        let total: f64 = mass.values().iter().sum();
        assert!((total - 1.0).abs() < 1e-14);
        for (r, c, _) in mass.triplets() {
            assert!(obs.contains(r) && obs.contains(c));
        }
    }

    #[test]
    fn control_restriction_shapes() {
        let free = NodeSet::new("free", vec![1, 4, 6, 9]);
        let b = assemble_control_restriction(&free, &free).unwrap();
        assert_eq!(b, SparseMatrix::identity(4));

        let single = assemble_control_restriction(&NodeSet::new("c", vec![6]), &free).unwrap();
        assert_eq!(single.n_cols(), 1);
        assert_eq!(
            single.to_dense(),
            vec![vec![0.0], vec![0.0], vec![1.0], vec![0.0]]
        );

        assert_eq!(
            assemble_control_restriction(&NodeSet::new("c", vec![2]), &free),
            Err(AssemblyError::ControlOutsideFree { node: 2 })
        );
    }

    #[test]
    fn boundary_control_for_natural_conditions() {
        let m = build_rect_mesh(6, 6, Bounds::symmetric_unit()).unwrap();
        let boundary = m.boundary_nodes();
        let free = free_nodes(&m, BoundaryKind::Natural);
        let b = assemble_control_restriction(&boundary, &free).unwrap();
        assert_eq!(b.n_cols(), 20);
        for j in 0..b.n_cols() {
            let col: Vec<_> = b.triplets().filter(|&(_, c, _)| c == j).collect();
            assert_eq!(col.len(), 1);
            assert_eq!(col[0].2, 1.0);
            assert!(m.is_boundary(col[0].0));
        }
    }

    #[test]
    fn targets() {
        assert_eq!(Target::Bump.eval(0.0, 0.0), Some(1.0));
        assert_eq!(Target::Bump.eval(1.0, 0.3), Some(0.0));
        assert_eq!(Target::Bump.eval(-1.0, -0.7), Some(0.0));
        assert_eq!(Target::TwoBox.eval(0.5, 0.5), Some(1.0));
        assert_eq!(Target::TwoBox.eval(-0.5, -0.5), Some(0.5));
        assert_eq!(Target::TwoBox.eval(0.75, 0.5), Some(0.0));
        let m = unit_square(4);
        assert_eq!(
            interpolate_target(&m, &Target::Zero).unwrap(),
            vec![0.0; 16]
        );
        assert_eq!(
            "sawtooth".parse::<Target>(),
            Err(AssemblyError::UnknownTarget("sawtooth".into()))
        );
        assert!(matches!(
            interpolate_target(&m, &Target::Tabulated(vec![1.0; 3])),
            Err(AssemblyError::TargetLength { .. })
        ));
    }

    #[test]
    fn discrete_problem_invariants() {
        let m = build_rect_mesh(9, 9, Bounds::symmetric_unit()).unwrap();
        let control = select_nodes(
            &m,
            &Region::InfBall {
                center: [0.0, 0.0],
                radius: 0.75,
            },
        );
        let p = DiscreteProblem::assemble(
            &m,
            &OperatorSpec::laplace_dirichlet(),
            control.clone(),
            select_nodes(&m, &Region::Whole),
            &Target::TwoBox,
        )
        .unwrap();
        assert_eq!(p.n_free(), 49);
        assert_eq!(p.n_control(), control.len());
        assert!(p.stiffness().asymmetry() <= 1e-13);
        assert!(p.mass().asymmetry() <= 1e-13);
        // M_h y_d equals the stored load since y_d vanishes on the boundary
        let my = p.mass().matvec(p.target()).unwrap();
        for (a, b) in my.iter().zip(p.target_load()) {
            assert!((a - b).abs() < 1e-15);
        }
        assert_eq!(p.tracking(p.target()), 0.0);
    }
}
