//! Back-transform to the radial profile on the unit disk.
//!
//! With `t = r²/2` and `u(t) = w(r) = r·φ'(r)`, the height profile is
//! `φ(r) = -∫_r^1 w(ρ)/ρ dρ`, pinned by `φ(1) = 0`.

use serde::Serialize;

use crate::adm::{self, AdmBranch, BranchLabel};
use crate::error::{Error, Result};
use crate::problem::{ProblemKind, RadialCondition};
use crate::quadrature::{right_curvature, right_slope};
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RadialSample<T> {
    pub r: T,
    pub w: T,
    pub phi: T,
    /// Residual of the reduced equation at `t = r²/2`.
    pub residual: T,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RadialProfile<T> {
    pub problem: ProblemKind,
    pub lambda: T,
    pub label: BranchLabel,
    pub c: T,
    pub n_terms: usize,
    pub samples: Vec<RadialSample<T>>,
}

/// `n` uniform points on `[0, 1]`.
pub fn uniform_r_grid<T: Scalar>(n: usize) -> Vec<T> {
    let last = T::from_usize(n - 1).unwrap();
    (0..n)
        .map(|i| if i == n - 1 { T::one() } else { T::from_usize(i).unwrap() / last })
        .collect()
}

pub fn default_r_grid<T: Scalar>() -> Vec<T> {
    uniform_r_grid(1001)
}

/// `r = 0, 0.1, …, 0.9`.
pub fn table_r_points<T: Scalar>() -> Vec<T> {
    (0..10).map(|i| T::from_usize(i).unwrap() / T::lit(10.0)).collect()
}

fn residual_at<T: Scalar>(branch: &AdmBranch<T>, r: T) -> Result<T> {
    if r == T::zero() {
        return Ok(T::zero());
    }
    adm::reduced_residual(&branch.solution, branch.lambda, r * r * T::half())
}

/// Samples `w`, `φ` and the residual on a uniform grid that ends at `r = 1`.
pub fn to_radial<T: Scalar>(branch: &AdmBranch<T>, r_grid: &[T]) -> Result<RadialProfile<T>> {
    let n = r_grid.len();
    if n < 8 || r_grid[0] < T::zero() || r_grid[n - 1] != T::one() {
        return Err(Error::InvalidConfig(
            "radial grid needs at least 8 points in [0, 1] ending at 1".into(),
        ));
    }
    let h = (r_grid[n - 1] - r_grid[0]) / T::from_usize(n - 1).unwrap();
    let uniform = r_grid
        .windows(2)
        .all(|p| ((p[1] - p[0]) - h).abs() <= T::lit(1e-9) * (T::one() + h));
    if !uniform {
        return Err(Error::InvalidConfig("radial grid must be uniform".into()));
    }

    let w_at = |r: T| branch.solution.eval(r * r * T::half());
    let mut w = Vec::with_capacity(n);
    for &r in r_grid {
        w.push(w_at(r)?);
    }
    let ratio = |r: T, w: T| if r == T::zero() { T::zero() } else { w / r };
    // Simpson on each panel with its midpoint, summed from r = 1 inward:
    // one rule for every node keeps the error smooth in r
    let mut tail = vec![T::zero(); n];
    for i in (0..n - 1).rev() {
        let (a, b) = (r_grid[i], r_grid[i + 1]);
        let m = (a + b) * T::half();
        let panel = (ratio(a, w[i]) + T::lit(4.0) * ratio(m, w_at(m)?) + ratio(b, w[i + 1]))
            * (b - a)
            / T::lit(6.0);
        tail[i] = tail[i + 1] + panel;
    }

    let mut samples = Vec::with_capacity(n);
    for i in 0..n {
        samples.push(RadialSample {
            r: r_grid[i],
            w: w[i],
            phi: if i == n - 1 { T::zero() } else { -tail[i] },
            residual: residual_at(branch, r_grid[i])?,
        });
    }
    Ok(RadialProfile {
        problem: branch.problem,
        lambda: branch.lambda,
        label: branch.label,
        c: branch.c,
        n_terms: branch.n_terms,
        samples,
    })
}

/// `(r, residual)` rows; the `r = 0` row is zero by convention.
pub fn residual_table<T: Scalar>(branch: &AdmBranch<T>, r_points: &[T]) -> Result<Vec<(T, T)>> {
    r_points
        .iter()
        .map(|&r| {
            if !(T::zero()..=T::one()).contains(&r) {
                return Err(Error::Domain { t: r.as_f64() });
            }
            Ok((r, residual_at(branch, r)?))
        })
        .collect()
}

/// Finite-difference check of the disk boundary condition at `r = 1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BoundaryCheck<T> {
    pub condition: RadialCondition,
    pub phi_at_one: T,
    pub slope: T,
    pub curvature: T,
    /// The quantity the condition sets to zero.
    pub defect: T,
}

impl<T: Scalar> RadialProfile<T> {
    /// `{problem}_{lambda}_{label}.csv`
    pub fn file_name(&self) -> String {
        format!("{}_{}_{}.csv", self.problem, self.lambda, self.label)
    }

    fn step(&self) -> T {
        let n = self.samples.len();
        (self.samples[n - 1].r - self.samples[0].r) / T::from_usize(n - 1).unwrap()
    }

    pub fn phi(&self) -> Vec<T> {
        self.samples.iter().map(|s| s.phi).collect()
    }

    /// One-sided fourth-order differences of `φ` at `r = 1`.
    pub fn boundary_check(&self) -> BoundaryCheck<T> {
        let phi = self.phi();
        let h = self.step();
        let slope = right_slope(&phi, h);
        let curvature = right_curvature(&phi, h);
        let condition = self.problem.radial_condition();
        let defect = match condition {
            RadialCondition::ZeroSlope => slope,
            RadialCondition::ZeroLaplacian => slope + curvature,
            RadialCondition::ZeroCurvature => curvature,
        };
        BoundaryCheck {
            condition,
            phi_at_one: *phi.last().unwrap(),
            slope,
            curvature,
            defect,
        }
    }

    /// Largest `|r·φ'(r) - w(r)|` over interior samples in `[r_lo, r_hi]`,
    /// with `φ'` from fourth-order central differences.
    pub fn round_trip_error(&self, r_lo: T, r_hi: T) -> T {
        let h = self.step();
        let s = &self.samples;
        let eight = T::lit(8.0);
        (2..s.len().saturating_sub(2))
            .filter(|&i| s[i].r >= r_lo && s[i].r <= r_hi)
            .map(|i| {
                let d = (s[i - 2].phi - eight * s[i - 1].phi + eight * s[i + 1].phi - s[i + 2].phi)
                    / (T::lit(12.0) * h);
                (s[i].r * d - s[i].w).abs()
            })
            .fold(T::zero(), T::max)
    }
}
