//! Uniform access to the slab and fiber solvers.

use serde::{Deserialize, Serialize};

use crate::fiber::{solve_fiber_mode, FiberGeometry, FiberMode};
use crate::materials::{MaterialSpec, PolarizationAxis};
use crate::planar::{solve_planar_mode, PlanarGeometry, PlanarMode};
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Waveguide {
    Planar(PlanarGeometry),
    Fiber(FiberGeometry),
}

/// Mode label: m for the slab, (l, m) for the fiber.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ModeIndex {
    Fiber { l: i32, m: u32 },
    Planar { m: u32 },
}

impl std::fmt::Display for ModeIndex {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ModeIndex::Planar { m } => write!(f, "{m}"),
            ModeIndex::Fiber { l, m } => write!(f, "{l}{m}"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum GuidedMode {
    Planar(PlanarMode),
    Fiber(FiberMode),
}

impl GuidedMode {
    pub fn beta(&self) -> f64 {
        match self {
            GuidedMode::Planar(m) => m.beta,
            GuidedMode::Fiber(m) => m.beta,
        }
    }

    pub fn omega(&self) -> f64 {
        match self {
            GuidedMode::Planar(m) => m.omega,
            GuidedMode::Fiber(m) => m.omega,
        }
    }

    pub fn residual(&self) -> f64 {
        match self {
            GuidedMode::Planar(m) => m.residual(),
            GuidedMode::Fiber(m) => m.residual(),
        }
    }
}

impl Waveguide {
    pub fn material(&self) -> &MaterialSpec {
        match self {
            Waveguide::Planar(g) => &g.material,
            Waveguide::Fiber(g) => &g.material,
        }
    }

    /// Thickness h (slab) or core radius a (fiber), in µm.
    pub fn size_um(&self) -> f64 {
        match self {
            Waveguide::Planar(g) => g.h_um,
            Waveguide::Fiber(g) => g.a_um,
        }
    }

    /// Copy with a different thickness or radius.
    pub fn with_size(&self, size_um: f64) -> Result<Self> {
        Ok(match self {
            Waveguide::Planar(g) => Waveguide::Planar(PlanarGeometry::new(size_um, g.material.clone())?),
            Waveguide::Fiber(g) => Waveguide::Fiber(FiberGeometry::new(size_um, g.material.clone())?),
        })
    }

    pub fn solve(&self, mode: ModeIndex, pol: PolarizationAxis, lambda_um: f64) -> Result<GuidedMode> {
        match (self, mode) {
            (Waveguide::Planar(g), ModeIndex::Planar { m }) => {
                solve_planar_mode(g, pol, m, lambda_um).map(GuidedMode::Planar)
            }
            (Waveguide::Fiber(g), ModeIndex::Fiber { l, m }) => {
                solve_fiber_mode(g, l, m, lambda_um).map(GuidedMode::Fiber)
            }
            (Waveguide::Planar(_), ModeIndex::Fiber { .. }) => {
                Err(Error::Invalid("slab modes take a single index m".into()))
            }
            (Waveguide::Fiber(_), ModeIndex::Planar { .. }) => {
                Err(Error::Invalid("fiber modes take indices (l, m)".into()))
            }
        }
    }
}
