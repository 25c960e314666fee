//! Monotone iteration between a reverse-ordered pair `β ≤ α`.
//!
//! Each step solves the shifted linear problem
//! `v'' + k·v = u²/(8t²) + λ/2 + k·u` through the Green's kernel of the same
//! boundary condition. For `k ≤ 0` the right-hand side is nonincreasing in
//! `u ≤ 0`, which makes `α_n` decrease and `β_n` increase.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::greens::GreensKernel;
use crate::powerseries::PowerSeries;
use crate::problem::ProblemKind;
use crate::quadrature::{right_slope, UniformGrid};
use crate::scalar::Scalar;

/// `β(t) = -C·t·(A - √(2t))`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SeedFunction<T> {
    #[serde(rename = "C")]
    pub c: T,
    #[serde(rename = "A")]
    pub a: T,
}

impl<T: Scalar> SeedFunction<T> {
    pub fn series(&self) -> PowerSeries<T> {
        let sqrt2 = T::lit(2.0).sqrt();
        PowerSeries::from_terms([(2, -self.c * self.a), (3, self.c * sqrt2)])
    }

    pub fn eval(&self, t: T) -> T {
        -self.c * t * (self.a - (T::lit(2.0) * t).sqrt())
    }

    pub fn second_derivative(&self, t: T) -> T {
        T::lit(1.5) * self.c / (T::lit(2.0) * t).sqrt()
    }
}

/// `(λ/C, cap on C)` for the seed of each problem.
fn seed_limits<T: Scalar>(problem: ProblemKind) -> (T, T) {
    match problem {
        ProblemKind::Dirichlet => (T::lit(3.0), T::lit(48.0)),
        ProblemKind::NeumannAtHalf => (T::lit(2.0), T::lit(128.0) / T::lit(9.0)),
        ProblemKind::Robin => (T::lit(1.5), T::lit(6.0)),
    }
}

/// Largest `λ` that some admissible seed covers.
pub fn max_seed_lambda<T: Scalar>(problem: ProblemKind) -> T {
    let (ratio, cap) = seed_limits::<T>(problem);
    ratio * cap
}

/// The tightest upper seed for `λ ≥ 0`, checked against the differential
/// inequality on the default grid.
pub fn seed_upper<T: Scalar>(problem: ProblemKind, lambda: T) -> Result<SeedFunction<T>> {
    let (ratio, cap) = seed_limits::<T>(problem);
    let none = || Error::NoAdmissibleSeed {
        problem,
        lambda: lambda.as_f64(),
        max_lambda: (ratio * cap).as_f64(),
    };
    if !(lambda >= T::zero()) {
        return Err(none());
    }
    let c = lambda / ratio;
    if c > cap * (T::one() + T::epsilon() * T::lit(4.0)) {
        return Err(none());
    }
    let seed = SeedFunction {
        c: c.min(cap),
        a: problem.seed_shape(),
    };
    let grid = UniformGrid::default();
    for i in 1..grid.len() {
        let t: T = grid.node(i);
        let b = seed.eval(t);
        let rhs = b * b / (T::lit(8.0) * t * t) + lambda * T::half();
        let lhs = seed.second_derivative(t);
        let slack = T::lit(1e-9) * (T::one() + lhs.abs() + rhs.abs());
        if lhs - rhs < -slack {
            return Err(none());
        }
    }
    Ok(seed)
}

/// The pair used for `λ < 0`: `β₀ = 0` below the forcing template
/// `α₀ = -(λ/4)·t·(a - t) ≥ 0`.
pub fn negative_lambda_pair<T: Scalar>(
    problem: ProblemKind,
    lambda: T,
    grid: &UniformGrid,
) -> (Vec<T>, Vec<T>) {
    let a: T = problem.template_width();
    let alpha = grid.sample(|t| -lambda / T::lit(4.0) * t * (a - t));
    (alpha, vec![T::zero(); grid.len()])
}

#[derive(Debug, Clone, PartialEq)]
pub struct MonotoneConfig<T> {
    pub k: T,
    pub max_iter: usize,
    pub tol: T,
    pub grid: UniformGrid,
    /// Allowed breach of the ordering chain.
    pub ordering_tol: T,
}

impl<T: Scalar> Default for MonotoneConfig<T> {
    fn default() -> Self {
        Self {
            k: -T::one(),
            max_iter: 200,
            tol: T::lit(1e-10),
            grid: UniformGrid::default(),
            ordering_tol: T::lit(1e-8),
        }
    }
}

/// Per-step diagnostics. Margins are minima over the grid and are
/// non-negative when the ordering holds.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StepRecord<T> {
    pub iteration: usize,
    pub alpha_change: T,
    pub beta_change: T,
    /// `min(α_{n} - α_{n+1})`
    pub alpha_margin: T,
    /// `min(β_{n+1} - β_{n})`
    pub beta_margin: T,
    /// `min(α_{n+1} - β_{n+1})`
    pub sandwich_margin: T,
}

#[derive(Debug, Clone, PartialEq)]
pub struct IterationTrace<T> {
    pub problem: ProblemKind,
    pub k: T,
    pub lambda: T,
    pub t: Vec<T>,
    pub alphas: Vec<Vec<T>>,
    pub betas: Vec<Vec<T>>,
    pub steps: Vec<StepRecord<T>>,
    pub converged: bool,
    pub iterations: usize,
    pub final_gap: T,
}

/// JSON form of a trace: per-step records and the final iterates.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TraceExport<'a, T> {
    pub problem: ProblemKind,
    pub k: T,
    pub lambda: T,
    pub converged: bool,
    pub iterations: usize,
    pub final_gap: T,
    pub steps: &'a [StepRecord<T>],
    pub t: &'a [T],
    pub alpha: &'a [T],
    pub beta: &'a [T],
}

impl<T: Scalar> IterationTrace<T> {
    pub fn alpha(&self) -> &[T] {
        self.alphas.last().expect("trace holds the initial iterate")
    }

    pub fn beta(&self) -> &[T] {
        self.betas.last().expect("trace holds the initial iterate")
    }

    pub fn export(&self) -> TraceExport<'_, T> {
        TraceExport {
            problem: self.problem,
            k: self.k,
            lambda: self.lambda,
            converged: self.converged,
            iterations: self.iterations,
            final_gap: self.final_gap,
            steps: &self.steps,
            t: &self.t,
            alpha: self.alpha(),
            beta: self.beta(),
        }
    }
}

/// Iterates from `α₀ = 0` and `β₀ = seed`.
pub fn iterate<T: Scalar>(
    problem: ProblemKind,
    lambda: T,
    seed: &SeedFunction<T>,
    config: &MonotoneConfig<T>,
) -> Result<IterationTrace<T>> {
    let alpha = vec![T::zero(); config.grid.len()];
    let beta = config.grid.sample(|t| seed.eval(t));
    iterate_from(problem, lambda, alpha, beta, config)
}

/// `u²/(8t²) + λ/2 + k·u` on the grid. At `t = 0` the ratio `u/t` is
/// extrapolated linearly from the first two interior nodes.
fn forcing<T: Scalar>(u: &[T], t: &[T], lambda: T, k: T) -> Vec<T> {
    let eight = T::lit(8.0);
    let mut out: Vec<T> = u
        .iter()
        .zip(t)
        .map(|(&u, &t)| {
            let sq = if t > T::zero() { u * u / (eight * t * t) } else { T::zero() };
            sq + lambda * T::half() + k * u
        })
        .collect();
    if u.len() > 2 {
        let v0 = T::lit(2.0) * u[1] / t[1] - u[2] / t[2];
        out[0] = v0 * v0 / eight + lambda * T::half();
    }
    out
}

fn min_diff<T: Scalar>(hi: &[T], lo: &[T]) -> T {
    hi.iter()
        .zip(lo)
        .map(|(&a, &b)| a - b)
        .fold(T::infinity(), T::min)
}

fn max_abs_diff<T: Scalar>(a: &[T], b: &[T]) -> T {
    a.iter()
        .zip(b)
        .map(|(&x, &y)| (x - y).abs())
        .fold(T::zero(), T::max)
}

/// Iterates from a given reverse-ordered pair `β₀ ≤ α₀` sampled on the grid.
pub fn iterate_from<T: Scalar>(
    problem: ProblemKind,
    lambda: T,
    alpha0: Vec<T>,
    beta0: Vec<T>,
    config: &MonotoneConfig<T>,
) -> Result<IterationTrace<T>> {
    let grid = config.grid;
    if alpha0.len() != grid.len() || beta0.len() != grid.len() {
        return Err(Error::InvalidConfig("initial pair must be sampled on the grid".into()));
    }
    if config.max_iter == 0 || !(config.tol > T::zero()) {
        return Err(Error::InvalidConfig("need max_iter >= 1 and tol > 0".into()));
    }
    let k = config.k;
    let kernel = GreensKernel::new(problem, k)?;
    let t = grid.nodes::<T>();
    let violation = |iteration, which, margin: T| Error::OrderingViolation {
        iteration,
        which,
        margin: margin.as_f64(),
    };

    let start = min_diff(&alpha0, &beta0);
    if start < -config.ordering_tol {
        return Err(violation(0, "beta above alpha", start));
    }

    let mut alphas = vec![alpha0];
    let mut betas = vec![beta0];
    let mut steps = Vec::new();
    let mut converged = false;

    for n in 0..config.max_iter {
        let a = &alphas[n];
        let b = &betas[n];
        if k > T::zero() {
            let bound = t
                .iter()
                .zip(a)
                .skip(1)
                .map(|(&t, &a)| -a / (T::lit(2.0) * t))
                .fold(T::infinity(), T::min);
            if !(k < bound.min(problem.positive_shift_limit())) {
                return Err(Error::OutOfValidity {
                    problem,
                    k: k.as_f64(),
                    reason: "positive shift must stay below -max alpha/(2t)",
                });
            }
        }
        let a_next = kernel.apply(&grid, &forcing(a, &t, lambda, k));
        let b_next = kernel.apply(&grid, &forcing(b, &t, lambda, k));

        let record = StepRecord {
            iteration: n + 1,
            alpha_change: max_abs_diff(&a_next, a),
            beta_change: max_abs_diff(&b_next, b),
            alpha_margin: min_diff(a, &a_next),
            beta_margin: min_diff(&b_next, b),
            sandwich_margin: min_diff(&a_next, &b_next),
        };
        for (which, margin) in [
            ("alpha increased", record.alpha_margin),
            ("beta decreased", record.beta_margin),
            ("beta above alpha", record.sandwich_margin),
        ] {
            if margin < -config.ordering_tol {
                return Err(violation(n + 1, which, margin));
            }
        }
        let done = record.alpha_change < config.tol && record.beta_change < config.tol;
        steps.push(record);
        alphas.push(a_next);
        betas.push(b_next);
        if done {
            converged = true;
            break;
        }
    }

    let final_gap = max_abs_diff(alphas.last().unwrap(), betas.last().unwrap());
    Ok(IterationTrace {
        problem,
        k,
        lambda,
        t,
        iterations: steps.len(),
        alphas,
        betas,
        steps,
        converged,
        final_gap,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum BoundKind {
    Lower,
    Upper,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundReport<T> {
    pub kind: BoundKind,
    pub pass: bool,
    /// Smallest slack in the differential inequality (negative = violated).
    pub worst_margin: T,
    pub worst_at: T,
    /// Slack in the boundary inequality at `t = 1/2`.
    pub boundary_margin: T,
}

/// Checks `u'' ≤ u²/(8t²) + λ/2` (lower) or `≥` (upper) at interior nodes
/// by central differences, plus the boundary inequality at `t = 1/2`.
/// Slack up to `1e-6` relative to the local magnitudes is tolerated.
pub fn verify_lower_upper<T: Scalar>(
    problem: ProblemKind,
    grid: &UniformGrid,
    candidate: &[T],
    lambda: T,
    kind: BoundKind,
) -> Result<BoundReport<T>> {
    if candidate.len() != grid.len() || grid.len() < 6 {
        return Err(Error::InvalidConfig("candidate must be sampled on the grid".into()));
    }
    let h: T = grid.step();
    let sign = match kind {
        BoundKind::Lower => T::one(),
        BoundKind::Upper => -T::one(),
    };
    let rel = T::lit(1e-6);
    let mut pass = true;
    let mut worst_margin = T::infinity();
    let mut worst_at = T::zero();
    for i in 1..grid.len() - 1 {
        let t: T = grid.node(i);
        let u = candidate[i];
        let d2 = (candidate[i + 1] - T::lit(2.0) * u + candidate[i - 1]) / (h * h);
        let rhs = u * u / (T::lit(8.0) * t * t) + lambda * T::half();
        let margin = sign * (rhs - d2);
        if margin < worst_margin {
            worst_margin = margin;
            worst_at = t;
        }
        if margin < -rel * (T::one() + rhs.abs() + d2.abs()) {
            pass = false;
        }
    }
    let u_half = *candidate.last().unwrap();
    let du_half = right_slope(candidate, h);
    let defect = problem.boundary_defect(u_half, du_half);
    // lower: u(1/2) ≤ 0, u'(1/2) ≤ 0, u(1/2) ≤ u'(1/2); upper reversed
    let boundary_margin = -sign * defect;
    if boundary_margin < -rel * (T::one() + u_half.abs() + du_half.abs()) {
        pass = false;
    }
    Ok(BoundReport {
        kind,
        pass,
        worst_margin,
        worst_at,
        boundary_margin,
    })
}
