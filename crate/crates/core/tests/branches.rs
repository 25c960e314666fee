use epibvp::adm::{self, AdmConfig, BranchLabel};
use epibvp::lambda_scan;
use epibvp::{Error, ProblemKind};
use proptest::prelude::*;

fn cfg() -> AdmConfig<f64> {
    AdmConfig::default()
}

/// Critical values at 15 terms, rounded down.
fn below_critical(p: ProblemKind) -> f64 {
    match p {
        ProblemKind::Dirichlet => 166.0,
        ProblemKind::NeumannAtHalf => 31.9,
        ProblemKind::Robin => 11.3,
    }
}

fn problem() -> impl Strategy<Value = ProblemKind> {
    prop::sample::select(ProblemKind::ALL.to_vec())
}

fn boundary_defect(b: &epibvp::Branch64) -> f64 {
    let u = b.solution.eval(0.5).unwrap();
    let du = b.solution.eval_derivative(1, 0.5).unwrap();
    b.problem.boundary_defect(u, du)
}

#[test]
fn zero_lambda_has_trivial_and_one_nontrivial() {
    let branches = adm::solve_branches(ProblemKind::NeumannAtHalf, 0.0, &cfg()).unwrap();
    let labels: Vec<_> = branches.iter().map(|b| b.label).collect();
    assert_eq!(labels, [BranchLabel::Trivial, BranchLabel::Upper]);
    assert!(branches[0].solution.is_zero());
    assert_eq!(branches[0].residual_max, 0.0);
}

#[test]
fn above_the_proven_bound_there_is_no_root() {
    let r = adm::solve_branches(ProblemKind::NeumannAtHalf, 35.0, &cfg());
    assert!(matches!(r, Err(Error::NoRealRoot { .. })));
}

#[test]
fn even_truncations_carry_an_extra_root() {
    // odd orders give the lower/upper pair only; even ones add a far root
    let p = ProblemKind::NeumannAtHalf;
    let count = |n: usize| adm::c_roots(p, 20.0, &cfg().with_terms(n)).unwrap().len();
    let scan = |n: usize| {
        let f = |x: f64| adm::c_equation(p, 20.0, x, n).unwrap();
        let xs: Vec<f64> = (0..=1000).map(|i| -60.0 + 0.12 * i as f64).collect();
        xs.windows(2).filter(|w| f(w[0]).signum() != f(w[1]).signum()).count()
    };
    for n in [11, 13, 15] {
        assert_eq!(count(n), 2, "n={n}");
        assert_eq!(scan(n), 2, "n={n}");
    }
    assert_eq!(count(12), 3);
    assert_eq!(scan(12), 3);
    // the pair itself is stable across the parity change
    let r12 = adm::c_roots(p, 20.0, &cfg().with_terms(12)).unwrap();
    let r13 = adm::c_roots(p, 20.0, &cfg().with_terms(13)).unwrap();
    assert!((r12[0] - r13[0]).abs() < 1e-9);
    assert!((r12[1] - r13[1]).abs() < 0.5);
}

#[test]
fn negative_lambda_splits_by_sign() {
    let branches = adm::solve_branches(ProblemKind::Dirichlet, -1.0, &cfg()).unwrap();
    assert_eq!(branches.len(), 2);
    let grid = adm::table_grid::<f64>();
    for b in &branches {
        let v: Vec<f64> = grid.iter().map(|&t| b.solution.eval(t).unwrap()).collect();
        match b.label {
            BranchLabel::Positive => assert!(v.iter().all(|&x| x >= -1e-12)),
            BranchLabel::Negative => assert!(v.iter().all(|&x| x <= 1e-12)),
            other => panic!("unexpected label {other}"),
        }
    }
}

#[test]
fn residual_shrinks_with_more_terms() {
    // a flag in the library; here the lower branches are expected to improve
    let grid = adm::table_grid::<f64>();
    for (p, lambda) in [
        (ProblemKind::Dirichlet, 50.0),
        (ProblemKind::NeumannAtHalf, 10.0),
        (ProblemKind::Robin, 4.0),
        (ProblemKind::Dirichlet, -1.0),
    ] {
        let mut prev = f64::INFINITY;
        for n in (4..=12).step_by(2) {
            let c = cfg().with_terms(n);
            let roots = adm::c_roots(p, lambda, &c).unwrap();
            let b = adm::branch_at(p, lambda, roots[0], &c).unwrap();
            let worst = adm::residual(&b, &grid)
                .unwrap()
                .iter()
                .map(|r| r.1.abs())
                .fold(0.0, f64::max);
            assert!(worst <= prev * 1.0001 + 1e-14, "{p} lambda={lambda} n={n}: {worst} > {prev}");
            prev = worst;
        }
    }
}

#[test]
fn critical_report_contract() {
    let r = lambda_scan::find_critical(ProblemKind::Robin, &cfg(), 0.01).unwrap();
    assert!(r.lambda_lo < r.lambda_hi);
    assert!(r.lambda_hi - r.lambda_lo <= 0.01);
    assert!(r.within_bounds);
    assert!(r.branches_merging);
    assert_eq!(r.n_terms, 15);
}

#[test]
fn scanner_refuses_negative_brackets() {
    let r = lambda_scan::find_critical_in(ProblemKind::Robin, &cfg(), 0.1, (-20.0, 20.0));
    assert!(matches!(r, Err(Error::InvalidConfig(_))));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn branches_are_self_consistent(p in problem(), frac in 0.0f64..1.0) {
        let lambda = frac * below_critical(p);
        let c = cfg();
        let branches = adm::solve_branches(p, lambda, &c).unwrap();
        prop_assert_eq!(branches.len(), 2);
        for b in &branches {
            prop_assert!(adm::c_equation(p, lambda, b.c, c.n_terms).unwrap().abs() <= c.tol_c);
            prop_assert_eq!(b.solution.eval(0.0).unwrap(), 0.0);
            prop_assert!(boundary_defect(b).abs() <= 1e-9, "defect {}", boundary_defect(b));
            for i in 1..=200 {
                let t = 0.5 * i as f64 / 200.0;
                prop_assert!(b.solution.eval(t).unwrap() <= 1e-9);
            }
        }
    }

    #[test]
    fn negative_lambda_has_both_signs(p in problem(), lambda in -15.0f64..-0.05) {
        let branches = adm::solve_branches(p, lambda, &cfg()).unwrap();
        let mut labels: Vec<_> = branches.iter().map(|b| b.label).collect();
        labels.sort_by_key(|l| l.as_str());
        prop_assert_eq!(labels, vec![BranchLabel::Negative, BranchLabel::Positive]);
        for b in &branches {
            prop_assert!(boundary_defect(b).abs() <= 1e-9);
        }
    }

    #[test]
    fn existence_never_recovers(p in problem(), mut lambdas in prop::collection::vec(0.0f64..60.0, 2..8)) {
        lambdas.sort_by(f64::total_cmp);
        let rows = lambda_scan::existence_profile(p, &lambdas, &cfg()).unwrap();
        prop_assert!(lambda_scan::is_monotone_profile(&rows));
    }
}
