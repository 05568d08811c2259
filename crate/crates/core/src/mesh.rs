//! Structured triangulations of a rectangle and node selection by region.
//!
//! Nodes are numbered row by row with `x` varying fastest, so node `(i, j)`
//! has index `j * nx + i`. Every grid cell is split along the diagonal from
//! its lower-left to its upper-right corner.

use std::io::{self, Write};

use thiserror::Error;

/// Geometric tolerance for closed-set membership tests.
pub const GEOMETRIC_TOL: f64 = 1e-12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MeshError {
    #[error("invalid mesh dimension: nx = {nx}, ny = {ny} (need at least 2 nodes per axis)")]
    InvalidDimension { nx: usize, ny: usize },
    #[error("degenerate bounds [{x_min}, {x_max}] x [{y_min}, {y_max}]")]
    DegenerateBounds {
        x_min: f64,
        x_max: f64,
        y_min: f64,
        y_max: f64,
    },
}

/// Axis-aligned rectangle `[x_min, x_max] x [y_min, y_max]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bounds {
    pub x_min: f64,
    pub x_max: f64,
    pub y_min: f64,
    pub y_max: f64,
}

impl Bounds {
    pub const fn new(x_min: f64, x_max: f64, y_min: f64, y_max: f64) -> Self {
        Bounds {
            x_min,
            x_max,
            y_min,
            y_max,
        }
    }

    /// The square `[-1, 1]^2`.
    pub const fn symmetric_unit() -> Self {
        Bounds::new(-1.0, 1.0, -1.0, 1.0)
    }

    pub fn area(&self) -> f64 {
        (self.x_max - self.x_min) * (self.y_max - self.y_min)
    }
}

#[derive(Debug, Clone)]
pub struct Mesh {
    nx: usize,
    ny: usize,
    bounds: Bounds,
    nodes: Vec<[f64; 2]>,
    triangles: Vec<[usize; 3]>,
    boundary: Vec<bool>,
}

/// Builds the uniform triangulation with `nx * ny` nodes on `bounds`.
pub fn build_rect_mesh(nx: usize, ny: usize, bounds: Bounds) -> Result<Mesh, MeshError> {
    if nx < 2 || ny < 2 {
        return Err(MeshError::InvalidDimension { nx, ny });
    }
    let Bounds {
        x_min,
        x_max,
        y_min,
        y_max,
    } = bounds;
    // also rejects NaN bounds
    if !(x_min < x_max && y_min < y_max) {
        return Err(MeshError::DegenerateBounds {
            x_min,
            x_max,
            y_min,
            y_max,
        });
    }

    let hx = (x_max - x_min) / (nx - 1) as f64;
    let hy = (y_max - y_min) / (ny - 1) as f64;
    let mut nodes = Vec::with_capacity(nx * ny);
    let mut boundary = Vec::with_capacity(nx * ny);
    for j in 0..ny {
        // pin the last coordinate to the bound so boundary tests are exact
        let y = if j == ny - 1 {
            y_max
        } else {
            y_min + j as f64 * hy
        };
        for i in 0..nx {
            let x = if i == nx - 1 {
                x_max
            } else {
                x_min + i as f64 * hx
            };
            nodes.push([x, y]);
            boundary.push(i == 0 || j == 0 || i == nx - 1 || j == ny - 1);
        }
    }

    let mut triangles = Vec::with_capacity(2 * (nx - 1) * (ny - 1));
    for j in 0..ny - 1 {
        for i in 0..nx - 1 {
            let n00 = j * nx + i;
            let n10 = n00 + 1;
            let n01 = n00 + nx;
            let n11 = n01 + 1;
            triangles.push([n00, n10, n11]);
            triangles.push([n00, n11, n01]);
        }
    }

    Ok(Mesh {
        nx,
        ny,
        bounds,
        nodes,
        triangles,
        boundary,
    })
}

impl Mesh {
    pub fn nx(&self) -> usize {
        self.nx
    }

    pub fn ny(&self) -> usize {
        self.ny
    }

    pub fn bounds(&self) -> Bounds {
        self.bounds
    }

    pub fn n_nodes(&self) -> usize {
        self.nodes.len()
    }

    pub fn n_triangles(&self) -> usize {
        self.triangles.len()
    }

    pub fn nodes(&self) -> &[[f64; 2]] {
        &self.nodes
    }

    pub fn node(&self, index: usize) -> [f64; 2] {
        self.nodes[index]
    }

    pub fn triangles(&self) -> &[[usize; 3]] {
        &self.triangles
    }

    pub fn is_boundary(&self, index: usize) -> bool {
        self.boundary[index]
    }

    /// Grid spacing `(hx, hy)`.
    pub fn spacing(&self) -> (f64, f64) {
        let b = self.bounds;
        (
            (b.x_max - b.x_min) / (self.nx - 1) as f64,
            (b.y_max - b.y_min) / (self.ny - 1) as f64,
        )
    }

    pub fn boundary_nodes(&self) -> NodeSet {
        NodeSet::from_sorted_unchecked(
            "boundary",
            (0..self.n_nodes()).filter(|&k| self.boundary[k]).collect(),
        )
    }

    pub fn interior_nodes(&self) -> NodeSet {
        NodeSet::from_sorted_unchecked(
            "interior",
            (0..self.n_nodes()).filter(|&k| !self.boundary[k]).collect(),
        )
    }

    /// Signed area of a triangle; positive for counterclockwise orientation.
    pub fn signed_area(&self, tri: usize) -> f64 {
        let [a, b, c] = self.triangles[tri];
        let [ax, ay] = self.nodes[a];
        let [bx, by] = self.nodes[b];
        let [cx, cy] = self.nodes[c];
        0.5 * ((bx - ax) * (cy - ay) - (cx - ax) * (by - ay))
    }

    /// Boundary edges as ordered node pairs, walking the four sides.
    pub fn boundary_edges(&self) -> Vec<[usize; 2]> {
        let (nx, ny) = (self.nx, self.ny);
        let mut edges = Vec::with_capacity(2 * (nx - 1) + 2 * (ny - 1));
        for i in 0..nx - 1 {
            edges.push([i, i + 1]);
            edges.push([(ny - 1) * nx + i, (ny - 1) * nx + i + 1]);
        }
        for j in 0..ny - 1 {
            edges.push([j * nx, (j + 1) * nx]);
            edges.push([j * nx + nx - 1, (j + 1) * nx + nx - 1]);
        }
        edges
    }

    /// Writes `node,x,y,boundary`.
    pub fn write_nodes_csv<W: Write>(&self, mut out: W) -> io::Result<()> {
        writeln!(out, "node,x,y,boundary")?;
        for (k, [x, y]) in self.nodes.iter().enumerate() {
            writeln!(
                out,
                "{},{:.16e},{:.16e},{}",
                k,
                x,
                y,
                u8::from(self.boundary[k])
            )?;
        }
        Ok(())
    }

    /// Writes `tri,n0,n1,n2`.
    pub fn write_triangles_csv<W: Write>(&self, mut out: W) -> io::Result<()> {
        writeln!(out, "tri,n0,n1,n2")?;
        for (t, [a, b, c]) in self.triangles.iter().enumerate() {
            writeln!(out, "{t},{a},{b},{c}")?;
        }
        Ok(())
    }
}

/// Sorted set of node indices carrying a label such as `"control"`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NodeSet {
    label: String,
    indices: Vec<usize>,
}

impl NodeSet {
    /// Sorts and deduplicates `indices`.
    pub fn new(label: impl Into<String>, mut indices: Vec<usize>) -> Self {
        indices.sort_unstable();
        indices.dedup();
        NodeSet {
            label: label.into(),
            indices,
        }
    }

    fn from_sorted_unchecked(label: &str, indices: Vec<usize>) -> Self {
        debug_assert!(indices.windows(2).all(|w| w[0] < w[1]));
        NodeSet {
            label: label.to_string(),
            indices,
        }
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    pub fn contains(&self, index: usize) -> bool {
        self.indices.binary_search(&index).is_ok()
    }

    /// Position of `index` inside the set, if present.
    pub fn position(&self, index: usize) -> Option<usize> {
        self.indices.binary_search(&index).ok()
    }

    pub fn is_subset_of(&self, other: &NodeSet) -> bool {
        self.indices.iter().all(|&k| other.contains(k))
    }
}

/// Closed region used to pick control or observation nodes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Region {
    /// `|x - center|_inf <= radius`
    InfBall {
        center: [f64; 2],
        radius: f64,
    },
    /// `|x - center|_2 <= radius`
    L2Ball {
        center: [f64; 2],
        radius: f64,
    },
    Whole,
    Boundary,
}

impl Region {
    pub fn contains(&self, mesh: &Mesh, index: usize) -> bool {
        let [x, y] = mesh.node(index);
        match *self {
            Region::InfBall { center, radius } => {
                (x - center[0]).abs().max((y - center[1]).abs()) <= radius + GEOMETRIC_TOL
            }
            Region::L2Ball { center, radius } => {
                (x - center[0]).hypot(y - center[1]) <= radius + GEOMETRIC_TOL
            }
            Region::Whole => true,
            Region::Boundary => mesh.is_boundary(index),
        }
    }

    fn label(&self) -> &'static str {
        match self {
            Region::InfBall { .. } => "inf_ball",
            Region::L2Ball { .. } => "l2_ball",
            Region::Whole => "whole",
            Region::Boundary => "boundary",
        }
    }
}

/// Indices of all nodes lying in the closed `region`.
pub fn select_nodes(mesh: &Mesh, region: &Region) -> NodeSet {
    NodeSet::from_sorted_unchecked(
        region.label(),
        (0..mesh.n_nodes())
            .filter(|&k| region.contains(mesh, k))
            .collect(),
    )
}
