//! Adomian decomposition of the Volterra form of the reduced problem.
//!
//! Splitting the Fredholm integral equation at `s = t` leaves one unknown
//! constant `c` (the slope `-u'(0)` minus the forcing part):
//!
//! ```text
//! u₀(t)     = -c·t - (λ/4)·t·(a - t)
//! u_{n+1}(t) = ∫₀ᵗ (s - t)·A_n(s)/(4s²) ds
//! F(c)      = c + ∫₀^{1/2} w(s)·Σ_{i<n} A_i(s)/s² ds = 0
//! ```
//!
//! with `A_n = -½ Σ_{j≤n} u_j u_{n-j}` the Adomian polynomials of
//! `N(u) = -u²/2`. The template width `a` and the weight `w` depend on the
//! boundary condition; the Volterra kernel does not. Every term is a
//! [`PowerSeries`], so all integrals are exact.

use serde::{Deserialize, Serialize};

use crate::bracket;
use crate::error::{Error, Result};
use crate::powerseries::PowerSeries;
use crate::problem::ProblemKind;
use crate::scalar::Scalar;

/// Hard cap on the number of correction terms.
pub const MAX_TERMS: usize = 30;

/// Correction terms used for residual tables. Odd: even truncations of the
/// Dirichlet problem lose the root pair near the critical value early.
pub const TABLE_TERMS: usize = 29;

#[derive(Debug, Clone, PartialEq)]
pub struct AdmConfig<T> {
    /// Number of correction terms; the solution is `u₀ + … + u_{n_terms}`.
    pub n_terms: usize,
    /// Interval scanned for roots of the c-equation.
    pub c_bracket: (T, T),
    /// Number of equally spaced samples in the scan.
    pub scan_samples: usize,
    /// Points `t ∈ (0, 1/2]` where residuals are reported.
    pub grid: Vec<T>,
    /// Largest `|F(c)|` accepted at a returned root.
    pub tol_c: T,
    /// Residual level above which a branch is reported as inaccurate.
    pub tol_residual: T,
}

impl<T: Scalar> Default for AdmConfig<T> {
    fn default() -> Self {
        Self {
            n_terms: 15,
            c_bracket: (T::lit(-60.0), T::lit(60.0)),
            scan_samples: 1001,
            grid: table_grid(),
            tol_c: T::lit(1e-9),
            tol_residual: T::lit(1e-8),
        }
    }
}

/// `t = r²/2` for `r = 0.1, 0.2, …, 1.0`.
pub fn table_grid<T: Scalar>() -> Vec<T> {
    (1..=10)
        .map(|i| {
            let r = T::from_u32(i).unwrap() / T::lit(10.0);
            r * r * T::half()
        })
        .collect()
}

impl<T: Scalar> AdmConfig<T> {
    pub fn with_terms(mut self, n_terms: usize) -> Self {
        self.n_terms = n_terms;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_terms == 0 || self.n_terms > MAX_TERMS {
            return Err(Error::InvalidConfig(format!(
                "n_terms must lie in 1..={MAX_TERMS}, got {}",
                self.n_terms
            )));
        }
        let (lo, hi) = self.c_bracket;
        if !(lo < hi) || !lo.is_finite() || !hi.is_finite() {
            return Err(Error::InvalidConfig("c_bracket must be a finite interval".into()));
        }
        if self.scan_samples < 2 {
            return Err(Error::InvalidConfig("scan_samples must be at least 2".into()));
        }
        if self.grid.iter().any(|&t| !(t > T::zero() && t <= T::half())) {
            return Err(Error::InvalidConfig("grid points must lie in (0, 1/2]".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BranchLabel {
    Trivial,
    /// For λ > 0, the branch continuing the trivial solution (nearest zero).
    Lower,
    /// For λ ≥ 0, the branch with the larger slope constant `c`.
    Upper,
    Positive,
    Negative,
}

impl BranchLabel {
    pub fn as_str(self) -> &'static str {
        match self {
            BranchLabel::Trivial => "trivial",
            BranchLabel::Lower => "lower",
            BranchLabel::Upper => "upper",
            BranchLabel::Positive => "positive",
            BranchLabel::Negative => "negative",
        }
    }
}

impl std::fmt::Display for BranchLabel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// One solution branch at a fixed `λ`.
#[derive(Debug, Clone, PartialEq)]
pub struct AdmBranch<T> {
    pub problem: ProblemKind,
    pub lambda: T,
    pub c: T,
    /// `F(c)` left at the refined root.
    pub c_defect: T,
    pub n_terms: usize,
    /// `u₀ … u_{n_terms}`
    pub terms: Vec<PowerSeries<T>>,
    pub solution: PowerSeries<T>,
    pub label: BranchLabel,
    pub residual_max: T,
    /// Set when the partner root lies within `1e-4` in `c`.
    pub near_critical: bool,
}

/// `A_n = -½ Σ_{j=0}^{n} u_j u_{n-j}`, the Adomian polynomial of `-u²/2`.
pub fn adomian_poly<T: Scalar>(terms: &[PowerSeries<T>], n: usize) -> PowerSeries<T> {
    assert!(terms.len() > n, "need u_0..u_{n}");
    let mut acc = PowerSeries::zero();
    for j in 0..=n / 2 {
        let prod = &terms[j] * &terms[n - j];
        acc = if 2 * j == n { &acc + &prod } else { &acc + &prod.scale(T::lit(2.0)) };
    }
    acc.scale(-T::half())
}

/// `u₀(t) = -c·t - (λ/4)·t·(a - t)`.
pub fn u0_template<T: Scalar>(problem: ProblemKind, lambda: T, c: T) -> PowerSeries<T> {
    let a: T = problem.template_width();
    let q = lambda / T::lit(4.0);
    PowerSeries::from_integer_powers(&[T::zero(), -c - q * a, q])
}

/// `∫₀ᵗ (s - t)·f(s)/4 ds`, split as `¼(∫₀ᵗ s·f - t·∫₀ᵗ f)`.
fn volterra_step<T: Scalar>(f: &PowerSeries<T>) -> PowerSeries<T> {
    let moment = f.shift(2).integrate();
    let mass = f.integrate().shift(2);
    (&moment - &mass).scale(T::lit(0.25))
}

/// The terms `u₀ … u_n` together with `A₀ … A_{n-1}`.
fn decompose<T: Scalar>(
    problem: ProblemKind,
    lambda: T,
    c: T,
    n_terms: usize,
) -> Result<(Vec<PowerSeries<T>>, Vec<PowerSeries<T>>)> {
    let mut terms = Vec::with_capacity(n_terms + 1);
    let mut adomians = Vec::with_capacity(n_terms);
    terms.push(u0_template(problem, lambda, c));
    for n in 0..n_terms {
        let a_n = adomian_poly(&terms, n);
        let next = volterra_step(&a_n.scale_div_t2()?);
        adomians.push(a_n);
        terms.push(next);
    }
    Ok((terms, adomians))
}

/// `[u₀, …, u_{n_terms}]` for a fixed constant `c`.
pub fn iterate_terms<T: Scalar>(
    problem: ProblemKind,
    lambda: T,
    c: T,
    n_terms: usize,
) -> Result<Vec<PowerSeries<T>>> {
    Ok(decompose(problem, lambda, c, n_terms)?.0)
}

/// Weight `w(s)` of the c-equation `c = -∫₀^{1/2} w(s)·Σ A_i/s² ds`.
fn c_weight<T: Scalar>(problem: ProblemKind) -> PowerSeries<T> {
    let half = T::half();
    let quarter = T::lit(0.25);
    match problem {
        ProblemKind::Dirichlet => PowerSeries::from_integer_powers(&[quarter, -half]),
        ProblemKind::NeumannAtHalf => PowerSeries::from_integer_powers(&[quarter]),
        ProblemKind::Robin => PowerSeries::from_integer_powers(&[quarter, half]),
    }
}

fn c_defect_from<T: Scalar>(problem: ProblemKind, c: T, adomians: &[PowerSeries<T>]) -> Result<T> {
    let total: PowerSeries<T> = adomians.iter().sum();
    let integrand = &c_weight(problem) * &total.scale_div_t2()?;
    Ok(c + integrand.definite_integral(T::half())?)
}

/// `F(c) = c - RHS(c)`; a root is a self-consistent constant.
pub fn c_equation<T: Scalar>(problem: ProblemKind, lambda: T, c: T, n_terms: usize) -> Result<T> {
    let (_, adomians) = decompose(problem, lambda, c, n_terms)?;
    c_defect_from(problem, c, &adomians)
}

/// `u'' - u²/(8t²) - λ/2` at `t > 0`, with `u''` from term-wise differentiation.
pub fn reduced_residual<T: Scalar>(solution: &PowerSeries<T>, lambda: T, t: T) -> Result<T> {
    let u = solution.eval(t)?;
    let d2 = match solution.derivative().and_then(|d| d.derivative()) {
        Ok(d2) => d2.eval(t)?,
        Err(_) => solution.eval_derivative(2, t)?,
    };
    Ok(d2 - u * u / (T::lit(8.0) * t * t) - lambda * T::half())
}

/// Per-point residuals of a branch on `grid`.
pub fn residual<T: Scalar>(branch: &AdmBranch<T>, grid: &[T]) -> Result<Vec<(T, T)>> {
    grid.iter()
        .map(|&t| Ok((t, reduced_residual(&branch.solution, branch.lambda, t)?)))
        .collect()
}

fn max_abs_residual<T: Scalar>(solution: &PowerSeries<T>, lambda: T, grid: &[T]) -> Result<T> {
    let mut worst = T::zero();
    for &t in grid {
        worst = worst.max(reduced_residual(solution, lambda, t)?.abs());
    }
    Ok(worst)
}

/// Signed extremes of the solution on the grid.
fn range_on<T: Scalar>(solution: &PowerSeries<T>, grid: &[T]) -> Result<(T, T)> {
    let mut lo = T::zero();
    let mut hi = T::zero();
    for &t in grid {
        let v = solution.eval(t)?;
        lo = lo.min(v);
        hi = hi.max(v);
    }
    Ok((lo, hi))
}

/// Builds the branch for a known constant `c`. The label is provisional.
pub fn branch_at<T: Scalar>(
    problem: ProblemKind,
    lambda: T,
    c: T,
    config: &AdmConfig<T>,
) -> Result<AdmBranch<T>> {
    let (terms, adomians) = decompose(problem, lambda, c, config.n_terms)?;
    let c_defect = c_defect_from(problem, c, &adomians)?;
    let solution: PowerSeries<T> = terms.iter().sum();
    let residual_max = max_abs_residual(&solution, lambda, &config.grid)?;
    Ok(AdmBranch {
        problem,
        lambda,
        c,
        c_defect,
        n_terms: config.n_terms,
        terms,
        solution,
        label: BranchLabel::Upper,
        residual_max,
        near_critical: false,
    })
}

/// Real roots of the c-equation inside the configured bracket.
pub fn c_roots<T: Scalar>(problem: ProblemKind, lambda: T, config: &AdmConfig<T>) -> Result<Vec<T>> {
    config.validate()?;
    let n = config.n_terms;
    let f = |c: T| c_equation(problem, lambda, c, n);
    let (lo, hi) = config.c_bracket;
    let mut roots = bracket::scan_roots(f, lo, hi, config.scan_samples)?;

    let mut f = |c: T| c_equation(problem, lambda, c, n);
    let h = T::lit(1e-6);
    for r in roots.iter_mut() {
        *r = bracket::polish(&mut f, *r, lo, hi, h)?.x;
    }
    if lambda == T::zero() && lo <= T::zero() && hi >= T::zero() {
        // F(0) = 0 identically at λ = 0
        roots.retain(|&r| r.abs() > T::lit(1e-10));
        roots.push(T::zero());
    }
    roots.retain(|&r| f(r).map(|v| v.abs() <= config.tol_c).unwrap_or(false));
    roots.sort_by(|a, b| a.partial_cmp(b).unwrap());
    Ok(roots)
}

/// All branches at `λ`, labelled.
///
/// For `λ > 0` the branch with the smaller `c` (closest to zero) is `lower`;
/// for `λ = 0` the zero solution is `trivial`; for `λ < 0` labels follow the
/// sign of the solution on the grid.
pub fn solve_branches<T: Scalar>(
    problem: ProblemKind,
    lambda: T,
    config: &AdmConfig<T>,
) -> Result<Vec<AdmBranch<T>>> {
    let roots = c_roots(problem, lambda, config)?;
    if roots.is_empty() {
        return Err(Error::NoRealRoot {
            problem,
            lambda: lambda.as_f64(),
        });
    }
    let mut branches = roots
        .iter()
        .map(|&c| branch_at(problem, lambda, c, config))
        .collect::<Result<Vec<_>>>()?;

    for (i, b) in branches.iter_mut().enumerate() {
        b.label = if lambda > T::zero() {
            if i == 0 { BranchLabel::Lower } else { BranchLabel::Upper }
        } else if lambda == T::zero() {
            if b.c == T::zero() { BranchLabel::Trivial } else { BranchLabel::Upper }
        } else {
            let (lo, hi) = range_on(&b.solution, &config.grid)?;
            if hi > -lo { BranchLabel::Positive } else { BranchLabel::Negative }
        };
    }
    let gap = T::lit(1e-4);
    for i in 1..branches.len() {
        if (branches[i].c - branches[i - 1].c).abs() < gap {
            branches[i].near_critical = true;
            branches[i - 1].near_critical = true;
        }
    }
    Ok(branches)
}
