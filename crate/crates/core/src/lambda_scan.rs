//! Location of the critical flux intensity by bisection on existence.

use rayon::prelude::*;
use serde::Serialize;

use crate::adm::{self, AdmConfig};
use crate::error::{Error, Result};
use crate::problem::ProblemKind;
use crate::scalar::Scalar;

/// One bisection probe.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Probe<T> {
    pub lambda: T,
    pub branches: usize,
    /// Gap between the two smallest roots of the c-equation, when both exist.
    pub c_gap: Option<T>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CriticalReport<T> {
    pub problem: ProblemKind,
    pub n_terms: usize,
    pub tol_lambda: T,
    /// Largest probed λ with two branches.
    pub lambda_lo: T,
    /// Smallest probed λ without them.
    pub lambda_hi: T,
    pub midpoint: T,
    pub bound_interval: (f64, f64),
    pub within_bounds: bool,
    /// Whether the branch gap shrank over the last five existence probes.
    pub branches_merging: bool,
    pub probes: Vec<Probe<T>>,
}

fn probe<T: Scalar>(problem: ProblemKind, lambda: T, config: &AdmConfig<T>) -> Result<Probe<T>> {
    let roots = adm::c_roots(problem, lambda, config)?;
    Ok(Probe {
        lambda,
        branches: roots.len(),
        c_gap: (roots.len() >= 2).then(|| roots[1] - roots[0]),
    })
}

/// Bisects on `[0, upper bound + 10]`.
pub fn find_critical<T: Scalar>(
    problem: ProblemKind,
    config: &AdmConfig<T>,
    tol_lambda: T,
) -> Result<CriticalReport<T>> {
    let hi = T::lit(problem.lambda_bounds().1 + 10.0);
    find_critical_in(problem, config, tol_lambda, (T::zero(), hi))
}

/// Bisects on an explicit bracket `[lo, hi]` with `0 ≤ lo < hi`.
///
/// Fails with `BracketFailure` if two branches still exist at `hi`.
pub fn find_critical_in<T: Scalar>(
    problem: ProblemKind,
    config: &AdmConfig<T>,
    tol_lambda: T,
    bracket: (T, T),
) -> Result<CriticalReport<T>> {
    config.validate()?;
    let (mut lo, mut hi) = bracket;
    if !(tol_lambda > T::zero()) {
        return Err(Error::InvalidConfig("tol_lambda must be positive".into()));
    }
    if !(lo >= T::zero() && hi > lo && hi.is_finite()) {
        return Err(Error::InvalidConfig(
            "lambda bracket must satisfy 0 <= lo < hi; use existence_profile for negative lambda".into(),
        ));
    }
    let mut probes = Vec::new();
    let top = probe(problem, hi, config)?;
    let exists_at_top = top.branches >= 2;
    probes.push(top);
    if exists_at_top {
        return Err(Error::BracketFailure {
            problem,
            lambda: hi.as_f64(),
        });
    }
    let bottom = probe(problem, lo, config)?;
    let exists_at_bottom = bottom.branches >= 2;
    probes.push(bottom);
    if !exists_at_bottom {
        return Err(Error::InvalidConfig(format!(
            "fewer than two branches at the lower bracket end lambda = {lo}; \
             widen the c bracket or raise the lower end"
        )));
    }
    while hi - lo > tol_lambda {
        let mid = (lo + hi) * T::half();
        if mid <= lo || mid >= hi {
            break;
        }
        let p = probe(problem, mid, config)?;
        if p.branches >= 2 {
            lo = mid;
        } else {
            hi = mid;
        }
        probes.push(p);
    }

    let gaps: Vec<T> = probes
        .iter()
        .filter(|p| p.branches >= 2 && p.lambda > T::zero())
        .filter_map(|p| p.c_gap)
        .collect();
    let tail = &gaps[gaps.len().saturating_sub(5)..];
    let branches_merging = tail.len() >= 2 && tail.windows(2).all(|w| w[1] < w[0]);

    let midpoint = (lo + hi) * T::half();
    let bound_interval = problem.lambda_bounds();
    let m = midpoint.as_f64();
    Ok(CriticalReport {
        problem,
        n_terms: config.n_terms,
        tol_lambda,
        lambda_lo: lo,
        lambda_hi: hi,
        midpoint,
        within_bounds: bound_interval.0 <= m && m <= bound_interval.1,
        bound_interval,
        branches_merging,
        probes,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExistenceRow<T> {
    pub lambda: T,
    pub branches: usize,
    pub c: Vec<T>,
}

/// Branch count and slope constants at every `λ`, computed in parallel.
/// Rows come back in input order.
pub fn existence_profile<T: Scalar>(
    problem: ProblemKind,
    lambdas: &[T],
    config: &AdmConfig<T>,
) -> Result<Vec<ExistenceRow<T>>> {
    config.validate()?;
    lambdas
        .par_iter()
        .map(|&lambda| {
            let c = adm::c_roots(problem, lambda, config)?;
            Ok(ExistenceRow {
                lambda,
                branches: c.len(),
                c,
            })
        })
        .collect()
}

/// True when, over `λ ≥ 0` in increasing order, the branch count never
/// increases.
pub fn is_monotone_profile<T: Scalar>(rows: &[ExistenceRow<T>]) -> bool {
    let mut sorted: Vec<&ExistenceRow<T>> = rows.iter().filter(|r| r.lambda >= T::zero()).collect();
    sorted.sort_by(|a, b| a.lambda.partial_cmp(&b.lambda).unwrap());
    sorted.windows(2).all(|w| w[1].branches <= w[0].branches)
}
