//! Green's functions of the shifted operator `u'' + k·u` on `[0, 1/2]` with
//! `u(0) = 0` and one of the three conditions at `t = 1/2`.
//!
//! Every kernel factors as
//!
//! ```text
//! G(s, t) = -p(min(s, t))·q(max(s, t)) / D
//! ```
//!
//! where `p` solves the homogeneous equation with `p(0) = 0`, `q` solves it
//! with the condition at `1/2`, and `D = q·p' - p·q'` is their (constant)
//! Wronskian. The derivative in `t` then jumps by exactly one across `t = s`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::problem::ProblemKind;
use crate::quadrature::{self, UniformGrid};
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum KernelForm {
    /// `k < 0`: sinh/cosh.
    Hyperbolic,
    /// `k > 0`: sin/cos.
    Trigonometric,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GreensKernel<T> {
    problem: ProblemKind,
    k: T,
    form: KernelForm,
    /// `√|k|`
    root: T,
    denom: T,
}

impl<T: Scalar> GreensKernel<T> {
    pub fn new(problem: ProblemKind, k: T) -> Result<Self> {
        let out = |reason| Error::OutOfValidity {
            problem,
            k: k.as_f64(),
            reason,
        };
        if !k.is_finite() {
            return Err(out("k must be finite"));
        }
        if k == T::zero() {
            return Err(out("k = 0 has no shifted kernel"));
        }
        let form = if k < T::zero() {
            KernelForm::Hyperbolic
        } else {
            KernelForm::Trigonometric
        };
        if form == KernelForm::Trigonometric {
            let limit = problem.positive_shift_limit::<T>();
            let inside = match problem {
                ProblemKind::Robin => k <= limit,
                _ => k < limit,
            };
            if !inside {
                return Err(out(match problem {
                    ProblemKind::Dirichlet => "needs k < 4 pi^2",
                    ProblemKind::NeumannAtHalf => "needs k < pi^2",
                    ProblemKind::Robin => "needs k <= pi^2/4",
                }));
            }
        }
        let root = k.abs().sqrt();
        let h = root * T::half();
        let denom = match (problem, form) {
            (ProblemKind::Dirichlet, KernelForm::Hyperbolic) => root * h.sinh(),
            (ProblemKind::Dirichlet, KernelForm::Trigonometric) => root * h.sin(),
            (ProblemKind::NeumannAtHalf, KernelForm::Hyperbolic) => root * h.cosh(),
            (ProblemKind::NeumannAtHalf, KernelForm::Trigonometric) => root * h.cos(),
            (ProblemKind::Robin, KernelForm::Hyperbolic) => root * (root * h.cosh() - h.sinh()),
            (ProblemKind::Robin, KernelForm::Trigonometric) => root * (root * h.cos() - h.sin()),
        };
        if !(denom > T::zero()) {
            return Err(out(match form {
                KernelForm::Hyperbolic => "needs sqrt|k| cosh(sqrt|k|/2) - sinh(sqrt|k|/2) > 0",
                KernelForm::Trigonometric => "needs sqrt(k) cos(sqrt(k)/2) - sin(sqrt(k)/2) > 0",
            }));
        }
        Ok(Self {
            problem,
            k,
            form,
            root,
            denom,
        })
    }

    pub fn problem(&self) -> ProblemKind {
        self.problem
    }

    pub fn k(&self) -> T {
        self.k
    }

    pub fn form(&self) -> KernelForm {
        self.form
    }

    /// Solution of the homogeneous equation vanishing at 0.
    fn left(&self, x: T) -> T {
        match self.form {
            KernelForm::Hyperbolic => (self.root * x).sinh(),
            KernelForm::Trigonometric => (self.root * x).sin(),
        }
    }

    /// Solution of the homogeneous equation meeting the condition at 1/2.
    fn right(&self, x: T) -> T {
        let y = self.root * (T::half() - x);
        match (self.problem, self.form) {
            (ProblemKind::Dirichlet, KernelForm::Hyperbolic) => y.sinh(),
            (ProblemKind::Dirichlet, KernelForm::Trigonometric) => y.sin(),
            (ProblemKind::NeumannAtHalf, KernelForm::Hyperbolic) => y.cosh(),
            (ProblemKind::NeumannAtHalf, KernelForm::Trigonometric) => y.cos(),
            (ProblemKind::Robin, KernelForm::Hyperbolic) => self.root * y.cosh() - y.sinh(),
            (ProblemKind::Robin, KernelForm::Trigonometric) => self.root * y.cos() - y.sin(),
        }
    }

    /// `G(s, t)`; `s` is the integration variable.
    pub fn value(&self, s: T, t: T) -> T {
        let (lo, hi) = if s <= t { (s, t) } else { (t, s) };
        -(self.left(lo) * self.right(hi)) / self.denom
    }

    /// `u(t_i) = ∫₀^{1/2} G(s, t_i)·h(s) ds` at every grid node, with `h`
    /// sampled on the same nodes.
    ///
    /// The kernel factorizes, so both one-sided integrals are running
    /// Simpson sums and the whole map costs O(n).
    pub fn apply(&self, grid: &UniformGrid, h: &[T]) -> Vec<T> {
        assert_eq!(h.len(), grid.len(), "samples must match the grid");
        let step = grid.step::<T>();
        let nodes = grid.nodes::<T>();
        let p: Vec<T> = nodes.iter().map(|&x| self.left(x)).collect();
        let q: Vec<T> = nodes.iter().map(|&x| self.right(x)).collect();
        let ph: Vec<T> = p.iter().zip(h).map(|(a, b)| *a * *b).collect();
        let qh: Vec<T> = q.iter().zip(h).map(|(a, b)| *a * *b).collect();
        let below = quadrature::cumulative(&ph, step);
        let above = quadrature::cumulative_from_right(&qh, step);
        (0..grid.len())
            .map(|i| -(q[i] * below[i] + p[i] * above[i]) / self.denom)
            .collect()
    }

    /// Samples `G` on a `resolution × resolution` grid of `[0, 1/2]²`.
    pub fn sign_check(&self, resolution: usize) -> SignReport {
        let resolution = resolution.max(2);
        let grid = UniformGrid::new(resolution - 1);
        let nodes = grid.nodes::<T>();
        let mut max_value = T::neg_infinity();
        for &s in &nodes {
            for &t in &nodes {
                max_value = max_value.max(self.value(s, t));
            }
        }
        let max_value = max_value.as_f64();
        SignReport {
            problem: self.problem,
            k: self.k.as_f64(),
            resolution,
            max_value,
            pass: max_value <= SIGN_TOLERANCE,
        }
    }
}

/// Largest sampled kernel value still counted as non-positive.
pub const SIGN_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SignReport {
    pub problem: ProblemKind,
    pub k: f64,
    pub resolution: usize,
    pub max_value: f64,
    pub pass: bool,
}

pub fn kernel_value<T: Scalar>(problem: ProblemKind, k: T, s: T, t: T) -> Result<T> {
    Ok(GreensKernel::new(problem, k)?.value(s, t))
}

pub fn sign_check<T: Scalar>(problem: ProblemKind, k: T, resolution: usize) -> Result<SignReport> {
    Ok(GreensKernel::new(problem, k)?.sign_check(resolution))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dirichlet_kernel_vanishes_on_both_edges() {
        let g = GreensKernel::new(ProblemKind::Dirichlet, -1.0).unwrap();
        for x in [0.0, 0.1, 0.37, 0.5] {
            assert_eq!(g.value(0.0, x), 0.0);
            assert_eq!(g.value(x, 0.5), 0.0);
        }
    }

    #[test]
    fn neumann_kernel_on_the_diagonal() {
        let v = kernel_value(ProblemKind::NeumannAtHalf, -1.0, 0.25, 0.25).unwrap();
        let expect = -(0.25f64.cosh() * 0.25f64.sinh()) / 0.5f64.cosh();
        assert!((v - expect).abs() < 1e-15);
    }

    #[test]
    fn validity_ranges() {
        use std::f64::consts::PI;
        let bad = |p, k: f64| GreensKernel::new(p, k).is_err();
        assert!(bad(ProblemKind::Dirichlet, 0.0));
        assert!(bad(ProblemKind::Dirichlet, 4.0 * PI * PI));
        assert!(!bad(ProblemKind::Dirichlet, 4.0 * PI * PI - 0.01));
        assert!(bad(ProblemKind::NeumannAtHalf, PI * PI));
        assert!(!bad(ProblemKind::NeumannAtHalf, 9.0));
        assert!(bad(ProblemKind::Robin, 2.5));
        assert!(bad(ProblemKind::Robin, 3.0));
        assert!(!bad(ProblemKind::Robin, PI * PI / 4.0));
        assert!(!bad(ProblemKind::Robin, -1.0));
        assert!(bad(ProblemKind::Robin, f64::NAN));
    }

    #[test]
    fn zero_forcing_gives_zero() {
        let grid = UniformGrid::new(64);
        for p in ProblemKind::ALL {
            let g = GreensKernel::new(p, -3.0).unwrap();
            assert!(g.apply(&grid, &vec![0.0; grid.len()]).iter().all(|&v| v == 0.0));
        }
    }

    #[test]
    fn separable_apply_matches_direct_quadrature() {
        let grid = UniformGrid::new(400);
        let nodes = grid.nodes::<f64>();
        let h: Vec<f64> = nodes.iter().map(|&s| (3.0 * s).cos() + s).collect();
        for p in ProblemKind::ALL {
            let g = GreensKernel::new(p, 2.0).unwrap();
            let fast = g.apply(&grid, &h);
            for i in [0usize, 1, 57, 200, 333, 400] {
                let t = nodes[i];
                // split the integral at the kink, fine Simpson on each piece
                let piece = |a: f64, b: f64| {
                    let n = 2000;
                    let w = (b - a) / n as f64;
                    let f = |s: f64| g.value(s, t) * ((3.0 * s).cos() + s);
                    let y: Vec<f64> = (0..=n).map(|j| f(a + j as f64 * w)).collect();
                    quadrature::simpson(&y, w)
                };
                let direct = piece(0.0, t) + piece(t, 0.5);
                assert!((fast[i] - direct).abs() < 1e-10, "{p} i={i}");
            }
        }
    }
}
