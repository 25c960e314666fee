use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::scalar::Scalar;

/// Which boundary condition closes the reduced problem
/// `u'' = u²/(8t²) + λ/2` on `(0, 1/2]` (with `u(0) = 0` in every case).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum ProblemKind {
    /// `u(1/2) = 0`, i.e. `φ'(1) = 0` on the disk.
    #[serde(rename = "p1")]
    Dirichlet,
    /// `u'(1/2) = 0`, i.e. `φ'(1) + φ''(1) = 0` on the disk.
    #[serde(rename = "p2")]
    NeumannAtHalf,
    /// `u(1/2) = u'(1/2)`, i.e. `φ''(1) = 0` on the disk.
    #[serde(rename = "p3")]
    Robin,
}

/// The boundary condition at `r = 1` of the fourth-order radial equation that
/// a reduced problem corresponds to under `t = r²/2`, `u(t) = w(r) = rφ'(r)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RadialCondition {
    /// `φ(1) = 0, φ'(1) = 0`
    ZeroSlope,
    /// `φ(1) = 0, φ'(1) + φ''(1) = 0`
    ZeroLaplacian,
    /// `φ(1) = 0, φ''(1) = 0`
    ZeroCurvature,
}

impl ProblemKind {
    pub const ALL: [ProblemKind; 3] = [
        ProblemKind::Dirichlet,
        ProblemKind::NeumannAtHalf,
        ProblemKind::Robin,
    ];

    pub fn tag(self) -> &'static str {
        match self {
            ProblemKind::Dirichlet => "p1",
            ProblemKind::NeumannAtHalf => "p2",
            ProblemKind::Robin => "p3",
        }
    }

    pub fn radial_condition(self) -> RadialCondition {
        match self {
            ProblemKind::Dirichlet => RadialCondition::ZeroSlope,
            ProblemKind::NeumannAtHalf => RadialCondition::ZeroLaplacian,
            ProblemKind::Robin => RadialCondition::ZeroCurvature,
        }
    }

    /// Width `a` of the forcing template `-(λ/4)·t·(a - t)`, the solution of
    /// `u'' = λ/2` under this boundary condition.
    pub fn template_width<T: Scalar>(self) -> T {
        match self {
            ProblemKind::Dirichlet => T::lit(0.5),
            ProblemKind::NeumannAtHalf => T::one(),
            ProblemKind::Robin => T::lit(1.5),
        }
    }

    /// Shape constant `A` of the upper seed `-C·t·(A - √(2t))`.
    pub fn seed_shape<T: Scalar>(self) -> T {
        match self {
            ProblemKind::Dirichlet => T::one(),
            ProblemKind::NeumannAtHalf => T::lit(1.5),
            ProblemKind::Robin => T::lit(2.0),
        }
    }

    /// The quantity that vanishes when the condition at `t = 1/2` holds.
    pub fn boundary_defect<T: Scalar>(self, u_half: T, du_half: T) -> T {
        match self {
            ProblemKind::Dirichlet => u_half,
            ProblemKind::NeumannAtHalf => du_half,
            ProblemKind::Robin => u_half - du_half,
        }
    }

    /// Proven enclosure `[lo, hi]` of the critical flux intensity.
    pub fn lambda_bounds(self) -> (f64, f64) {
        match self {
            ProblemKind::Dirichlet => (144.0, 307.0),
            ProblemKind::NeumannAtHalf => (256.0 / 9.0, 384.0 / 11.0),
            ProblemKind::Robin => (9.0, 11.63),
        }
    }

    /// Upper end of the positive shift range for which the trigonometric
    /// Green's function keeps its sign.
    pub fn positive_shift_limit<T: Scalar>(self) -> T {
        let pi2 = T::PI() * T::PI();
        match self {
            ProblemKind::Dirichlet => T::lit(4.0) * pi2,
            ProblemKind::NeumannAtHalf => pi2,
            ProblemKind::Robin => pi2 / T::lit(4.0),
        }
    }
}

impl fmt::Display for ProblemKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

impl FromStr for ProblemKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "p1" | "1" | "dirichlet" => Ok(ProblemKind::Dirichlet),
            "p2" | "2" | "neumann" => Ok(ProblemKind::NeumannAtHalf),
            "p3" | "3" | "robin" => Ok(ProblemKind::Robin),
            other => Err(Error::InvalidConfig(format!("unknown problem '{other}'"))),
        }
    }
}
