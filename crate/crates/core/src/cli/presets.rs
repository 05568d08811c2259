//! Built-in problem setups on `[-1, 1]^2`.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::assembly::{AssemblyError, DiscreteProblem, OperatorSpec, Target};
use crate::mesh::{build_rect_mesh, select_nodes, Bounds, Mesh, MeshError, NodeSet, Region};

/// Reaction coefficient of the Neumann boundary-control operator.
pub const NEUMANN_REACTION: f64 = 1e-2;
/// Radius of the control domains of the Dirichlet presets.
pub const CONTROL_RADIUS: f64 = 0.75;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Preset {
    /// Two-box target, Dirichlet Laplacian, control on `|x|_inf <= 3/4`.
    TwoBoxDirichlet,
    /// Bump target, Dirichlet Laplacian, control on `|x|_2 <= 3/4`.
    BumpDirichletDisk,
    /// Two-box target, `-Laplace + 10^-2` with Neumann data, boundary control.
    NeumannBoundary,
    /// Exact 1D counterexample checks.
    #[serde(rename = "oracle_1d")]
    Oracle1d,
    /// Slater diagnostics for the three control configurations.
    SlaterCheck,
}

impl Preset {
    pub const ALL: [Preset; 5] = [
        Preset::TwoBoxDirichlet,
        Preset::BumpDirichletDisk,
        Preset::NeumannBoundary,
        Preset::Oracle1d,
        Preset::SlaterCheck,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Preset::TwoBoxDirichlet => "two_box_dirichlet",
            Preset::BumpDirichletDisk => "bump_dirichlet_disk",
            Preset::NeumannBoundary => "neumann_boundary",
            Preset::Oracle1d => "oracle_1d",
            Preset::SlaterCheck => "slater_check",
        }
    }

    /// Whether the preset runs the control solver on a 2D mesh.
    pub fn is_control_problem(self) -> bool {
        matches!(
            self,
            Preset::TwoBoxDirichlet | Preset::BumpDirichletDisk | Preset::NeumannBoundary
        )
    }
}

impl fmt::Display for Preset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Preset {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Preset::ALL
            .into_iter()
            .find(|p| p.name() == s)
            .ok_or_else(|| format!("unknown preset {s:?}"))
    }
}

#[derive(Debug, thiserror::Error)]
pub enum PresetError {
    #[error(transparent)]
    Mesh(#[from] MeshError),
    #[error(transparent)]
    Assembly(#[from] AssemblyError),
    #[error("preset {0} does not define a 2D control problem")]
    NotAControlProblem(Preset),
}

pub fn box_control(mesh: &Mesh) -> NodeSet {
    select_nodes(
        mesh,
        &Region::InfBall {
            center: [0.0, 0.0],
            radius: CONTROL_RADIUS,
        },
    )
    .with_label("control")
}

pub fn disk_control(mesh: &Mesh) -> NodeSet {
    select_nodes(
        mesh,
        &Region::L2Ball {
            center: [0.0, 0.0],
            radius: CONTROL_RADIUS,
        },
    )
    .with_label("control")
}

/// Mesh and assembled problem of a control preset.
pub fn build_preset(
    preset: Preset,
    nx: usize,
    ny: usize,
) -> Result<(Mesh, DiscreteProblem), PresetError> {
    let mesh = build_rect_mesh(nx, ny, Bounds::symmetric_unit())?;
    let observation = select_nodes(&mesh, &Region::Whole);
    let problem = match preset {
        Preset::TwoBoxDirichlet => DiscreteProblem::assemble(
            &mesh,
            &OperatorSpec::laplace_dirichlet(),
            box_control(&mesh),
            observation,
            &Target::TwoBox,
        )?,
        Preset::BumpDirichletDisk => DiscreteProblem::assemble(
            &mesh,
            &OperatorSpec::laplace_dirichlet(),
            disk_control(&mesh),
            observation,
            &Target::Bump,
        )?,
        Preset::NeumannBoundary => DiscreteProblem::assemble(
            &mesh,
            &OperatorSpec::neumann_reaction(NEUMANN_REACTION),
            mesh.boundary_nodes(),
            observation,
            &Target::TwoBox,
        )?,
        other => return Err(PresetError::NotAControlProblem(other)),
    };
    Ok((mesh, problem))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn names_round_trip() {
        for p in Preset::ALL {
            assert_eq!(p.name().parse::<Preset>().unwrap(), p);
        }
        assert!("two_box".parse::<Preset>().is_err());
    }

    #[test]
    fn control_sets() {
        let (m, p) = build_preset(Preset::TwoBoxDirichlet, 9, 9).unwrap();
        // spacing 1/4: |x|_inf <= 3/4 gives 7 x 7 nodes
        assert_eq!(p.n_control(), 49);
        assert!(p
            .control_nodes()
            .indices()
            .iter()
            .all(|&k| !m.is_boundary(k)));
        let (_, p) = build_preset(Preset::NeumannBoundary, 9, 9).unwrap();
        assert_eq!(p.n_control(), 32);
        assert_eq!(p.n_free(), 81);
        assert!(build_preset(Preset::Oracle1d, 9, 9).is_err());
    }

    #[test]
    fn published_parameters() {
        assert_eq!(NEUMANN_REACTION, 1e-2);
        assert_eq!(CONTROL_RADIUS, 0.75);
        let cont = crate::ssn::ContinuationOptions::default();
        assert_eq!(cont.alpha_start, 1.0);
        for p in Preset::ALL {
            let json = serde_json::to_value(p).unwrap();
            assert_eq!(json, p.name());
        }
    }
}
