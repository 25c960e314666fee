use serde::Serialize;

use epibvp::adm::{self, AdmBranch, AdmConfig, BranchLabel};
use epibvp::greens::{GreensKernel, SignReport};
use epibvp::lambda_scan::{self, ExistenceRow};
use epibvp::monotone::{self, IterationTrace, MonotoneConfig};
use epibvp::radial::{self, BoundaryCheck, RadialProfile, RadialSample};
use epibvp::{PowerSeries, ProblemKind};

use crate::output::{num, Sink};
use crate::{
    Engine, Failure, Format, GreensArgs, MonotoneArgs, ProfileArgs, ScanArgs, SeriesArgs,
    SolveArgs, TableArgs,
};

type Outcome = Result<(), Failure>;

fn adm_config(s: &SeriesArgs) -> AdmConfig<f64> {
    let mut cfg = AdmConfig::default().with_terms(s.n_terms);
    cfg.c_bracket = (s.c_min, s.c_max);
    cfg
}

fn finite(name: &str, x: f64) -> Result<f64, Failure> {
    if x.is_finite() {
        Ok(x)
    } else {
        Err(Failure::Usage(format!("--{name} must be finite")))
    }
}

#[derive(Serialize)]
struct BranchRecord<'a> {
    problem: ProblemKind,
    lambda: f64,
    label: BranchLabel,
    c: f64,
    c_defect: f64,
    n_terms: usize,
    residual_max: f64,
    near_critical: bool,
    /// `(half exponent, coefficient)` pairs of the truncated solution.
    series: &'a PowerSeries<f64>,
    /// `(t, residual)` at `t = r²/2`, `r = 0.1, …, 1`.
    residuals: Vec<(f64, f64)>,
    boundary: BoundaryCheck<f64>,
    radial: &'a [RadialSample<f64>],
}

fn radial_rows(p: &RadialProfile<f64>) -> Vec<Vec<String>> {
    p.samples
        .iter()
        .map(|s| vec![num(s.r), num(s.w), num(s.phi), num(s.residual)])
        .collect()
}

/// Branch labels with `_2`, `_3`, … on repeats (even truncations can
/// produce a third root).
fn distinct_labels(branches: &[AdmBranch<f64>]) -> Vec<String> {
    let mut out = Vec::new();
    for (i, b) in branches.iter().enumerate() {
        let seen = branches[..i].iter().filter(|o| o.label == b.label).count();
        out.push(if seen == 0 {
            b.label.to_string()
        } else {
            format!("{}_{}", b.label, seen + 1)
        });
    }
    out
}

fn write_branch(
    sink: &mut Sink,
    stem: &str,
    branch: &AdmBranch<f64>,
    cfg: &AdmConfig<f64>,
    format: Format,
) -> Outcome {
    let profile = radial::to_radial(branch, &radial::default_r_grid())?;
    match format {
        Format::Csv => sink.csv(
            &format!("{stem}.csv"),
            &["r", "w", "phi", "residual"],
            &radial_rows(&profile),
        )?,
        Format::Json => {
            let record = BranchRecord {
                problem: branch.problem,
                lambda: branch.lambda,
                label: branch.label,
                c: branch.c,
                c_defect: branch.c_defect,
                n_terms: branch.n_terms,
                residual_max: branch.residual_max,
                near_critical: branch.near_critical,
                series: &branch.solution,
                residuals: adm::residual(branch, &cfg.grid)?,
                boundary: profile.boundary_check(),
                radial: &profile.samples,
            };
            sink.json(&format!("{stem}.json"), &record)?;
        }
    }
    Ok(())
}

/// Runs the monotone scheme from the pair that suits the sign of `λ`.
fn run_monotone(
    problem: ProblemKind,
    lambda: f64,
    cfg: &MonotoneConfig<f64>,
) -> Result<IterationTrace<f64>, Failure> {
    let trace = if lambda >= 0.0 {
        let seed = monotone::seed_upper(problem, lambda)?;
        monotone::iterate(problem, lambda, &seed, cfg)?
    } else {
        let (alpha, beta) = monotone::negative_lambda_pair(problem, lambda, &cfg.grid);
        monotone::iterate_from(problem, lambda, alpha, beta, cfg)?
    };
    if !trace.converged {
        eprintln!(
            "warning: monotone iteration stopped after {} steps with gap {:e}",
            trace.iterations, trace.final_gap
        );
    }
    Ok(trace)
}

#[derive(Serialize)]
struct MonotoneSide<'a> {
    problem: ProblemKind,
    lambda: f64,
    k: f64,
    side: &'static str,
    converged: bool,
    iterations: usize,
    final_gap: f64,
    t: &'a [f64],
    u: &'a [f64],
}

#[derive(Serialize)]
struct BranchGap {
    label: BranchLabel,
    c: f64,
    max_abs_diff: f64,
}

#[derive(Serialize)]
struct SideGap {
    side: &'static str,
    nearest: Option<BranchLabel>,
    gap: Option<f64>,
    branches: Vec<BranchGap>,
}

#[derive(Serialize)]
struct GapReport {
    problem: ProblemKind,
    lambda: f64,
    k: f64,
    n_terms: usize,
    sides: Vec<SideGap>,
}

fn side_gap(side: &'static str, t: &[f64], u: &[f64], branches: &[AdmBranch<f64>]) -> Result<SideGap, Failure> {
    let mut out = Vec::new();
    for b in branches {
        let mut worst = 0.0f64;
        for (&ti, &ui) in t.iter().zip(u) {
            worst = worst.max((b.solution.eval(ti)? - ui).abs());
        }
        out.push(BranchGap {
            label: b.label,
            c: b.c,
            max_abs_diff: worst,
        });
    }
    let best = out
        .iter()
        .min_by(|a, b| a.max_abs_diff.total_cmp(&b.max_abs_diff));
    Ok(SideGap {
        side,
        nearest: best.map(|g| g.label),
        gap: best.map(|g| g.max_abs_diff),
        branches: out,
    })
}

pub fn solve(a: &SolveArgs, sink: &mut Sink) -> Outcome {
    let lambda = finite("lambda", a.lambda)?;
    let p = a.problem;
    let cfg = adm_config(&a.series);
    let mono_cfg = MonotoneConfig {
        k: a.k,
        ..MonotoneConfig::default()
    };
    if a.engine != Engine::Adm {
        // fail on a bad shift before any work
        GreensKernel::new(p, a.k)?;
    }

    let mut branches = Vec::new();
    if a.engine != Engine::Monotone {
        branches = adm::solve_branches(p, lambda, &cfg)?;
        for b in &branches {
            println!("{p} lambda={lambda} {}: c = {}", b.label, num(b.c));
        }
    }
    let trace = if a.engine != Engine::Adm {
        Some(run_monotone(p, lambda, &mono_cfg)?)
    } else {
        None
    };

    for (b, label) in branches.iter().zip(distinct_labels(&branches)) {
        write_branch(sink, &format!("{p}_{lambda}_{label}"), b, &cfg, a.format)?;
    }
    if let Some(trace) = &trace {
        for (side, u) in [("alpha", trace.alpha()), ("beta", trace.beta())] {
            let name = format!("{p}_{lambda}_{side}_monotone");
            match a.format {
                Format::Json => sink.json(
                    &format!("{name}.json"),
                    &MonotoneSide {
                        problem: p,
                        lambda,
                        k: a.k,
                        side,
                        converged: trace.converged,
                        iterations: trace.iterations,
                        final_gap: trace.final_gap,
                        t: &trace.t,
                        u,
                    },
                )?,
                Format::Csv => {
                    let rows: Vec<Vec<String>> =
                        trace.t.iter().zip(u).map(|(t, u)| vec![num(*t), num(*u)]).collect();
                    sink.csv(&format!("{name}.csv"), &["t", "u"], &rows)?;
                }
            }
        }
        if a.engine == Engine::Both {
            let report = GapReport {
                problem: p,
                lambda,
                k: a.k,
                n_terms: cfg.n_terms,
                sides: vec![
                    side_gap("alpha", &trace.t, trace.alpha(), &branches)?,
                    side_gap("beta", &trace.t, trace.beta(), &branches)?,
                ],
            };
            for s in &report.sides {
                if let (Some(label), Some(gap)) = (s.nearest, s.gap) {
                    println!("monotone {} vs adm {label}: {gap:e}", s.side);
                }
            }
            sink.json(&format!("{p}_{lambda}_engine_gap.json"), &report)?;
        }
    }
    Ok(())
}

pub fn scan(a: &ScanArgs, sink: &mut Sink) -> Outcome {
    let p = a.problem;
    let cfg = adm_config(&a.series);
    let hi = a.lambda_max.unwrap_or(p.lambda_bounds().1 + 10.0);
    let report = lambda_scan::find_critical_in(p, &cfg, a.tol, (finite("lambda-min", a.lambda_min)?, hi))?;
    println!(
        "{p}: critical lambda in [{}, {}], midpoint {}",
        num(report.lambda_lo),
        num(report.lambda_hi),
        num(report.midpoint)
    );
    sink.json(&format!("{p}_critical.json"), &report)?;
    Ok(())
}

/// `start:step:stop` (inclusive) or `a,b,c`.
pub fn parse_lambdas(s: &str) -> Result<Vec<f64>, String> {
    let bad = || format!("cannot read lambdas '{s}'");
    let num = |x: &str| x.trim().parse::<f64>().ok().filter(|v| v.is_finite());
    let parts: Vec<&str> = s.split(':').collect();
    if parts.len() == 3 {
        let (start, step, stop) = (
            num(parts[0]).ok_or_else(bad)?,
            num(parts[1]).ok_or_else(bad)?,
            num(parts[2]).ok_or_else(bad)?,
        );
        if !(step > 0.0) || stop < start {
            return Err(format!("range '{s}' needs step > 0 and stop >= start"));
        }
        let count = ((stop - start) / step + 1e-9).floor() as usize + 1;
        if count > 100_000 {
            return Err(format!("range '{s}' has too many points"));
        }
        return Ok((0..count).map(|i| start + i as f64 * step).collect());
    }
    if parts.len() != 1 {
        return Err(bad());
    }
    s.split(',').map(|x| num(x).ok_or_else(bad)).collect()
}

#[derive(Serialize)]
struct ProfileReport<'a> {
    problem: ProblemKind,
    n_terms: usize,
    monotone: bool,
    rows: &'a [ExistenceRow<f64>],
}

pub fn existence_profile(a: &ProfileArgs, sink: &mut Sink) -> Outcome {
    let p = a.problem;
    let cfg = adm_config(&a.series);
    let lambdas = parse_lambdas(&a.lambdas)?;
    let rows = lambda_scan::existence_profile(p, &lambdas, &cfg)?;
    let monotone = lambda_scan::is_monotone_profile(&rows);
    println!(
        "{p}: {} lambdas, branch count non-increasing: {monotone}",
        rows.len()
    );
    match a.format {
        Format::Json => sink.json(
            &format!("{p}_existence.json"),
            &ProfileReport {
                problem: p,
                n_terms: cfg.n_terms,
                monotone,
                rows: &rows,
            },
        )?,
        Format::Csv => {
            let table: Vec<Vec<String>> = rows
                .iter()
                .map(|r| {
                    let c: Vec<String> = r.c.iter().map(|&c| num(c)).collect();
                    vec![num(r.lambda), r.branches.to_string(), c.join(";")]
                })
                .collect();
            sink.csv(&format!("{p}_existence.csv"), &["lambda", "branches", "c"], &table)?;
        }
    }
    Ok(())
}

pub fn monotone(a: &MonotoneArgs, sink: &mut Sink) -> Outcome {
    let p = a.problem;
    let lambda = finite("lambda", a.lambda)?;
    let cfg = MonotoneConfig {
        k: a.k,
        max_iter: a.max_iter,
        tol: a.tol,
        ..MonotoneConfig::default()
    };
    let trace = run_monotone(p, lambda, &cfg)?;
    println!(
        "{p} lambda={lambda} k={}: {} steps, converged {}, gap {:e}",
        a.k, trace.iterations, trace.converged, trace.final_gap
    );
    let name = format!("{p}_{lambda}_monotone");
    match a.format {
        Format::Json => sink.json(&format!("{name}.json"), &trace.export())?,
        Format::Csv => {
            let rows: Vec<Vec<String>> = trace
                .t
                .iter()
                .zip(trace.alpha().iter().zip(trace.beta()))
                .map(|(t, (al, be))| vec![num(*t), num(*al), num(*be)])
                .collect();
            sink.csv(&format!("{name}.csv"), &["t", "alpha", "beta"], &rows)?;
        }
    }
    Ok(())
}

/// One value or `a..b`, split into `samples` evenly spaced values.
pub fn parse_k_range(s: &str, samples: usize) -> Result<Vec<f64>, String> {
    let num = |x: &str| {
        x.trim()
            .parse::<f64>()
            .ok()
            .filter(|v| v.is_finite())
            .ok_or_else(|| format!("cannot read k from '{s}'"))
    };
    match s.split_once("..") {
        None => Ok(vec![num(s)?]),
        Some((lo, hi)) => {
            let (lo, hi) = (num(lo)?, num(hi.trim_start_matches('='))?);
            if hi < lo {
                return Err(format!("k range '{s}' is reversed"));
            }
            if samples < 2 || lo == hi {
                return Ok(vec![lo]);
            }
            let n = samples - 1;
            Ok((0..=n)
                .map(|i| if i == n { hi } else { lo + (hi - lo) * i as f64 / n as f64 })
                .collect())
        }
    }
}

#[derive(Serialize)]
struct GreensEntry {
    k: f64,
    pass: bool,
    report: Option<SignReport>,
    error: Option<String>,
}

#[derive(Serialize)]
struct GreensReport {
    problem: ProblemKind,
    resolution: usize,
    all_pass: bool,
    entries: Vec<GreensEntry>,
}

pub fn greens_check(a: &GreensArgs, sink: &mut Sink) -> Outcome {
    let p = a.problem;
    let ks = parse_k_range(&a.k, a.samples)?;
    let mut entries = Vec::new();
    let mut last_error = None;
    for &k in &ks {
        match GreensKernel::new(p, k) {
            Ok(kernel) => {
                let report = kernel.sign_check(a.resolution);
                println!("{p} k={k}: max G = {:e}, pass {}", report.max_value, report.pass);
                entries.push(GreensEntry {
                    k,
                    pass: report.pass,
                    report: Some(report),
                    error: None,
                });
            }
            Err(e) => {
                println!("{p} k={k}: {e}");
                entries.push(GreensEntry {
                    k,
                    pass: false,
                    report: None,
                    error: Some(e.to_string()),
                });
                last_error = Some(e);
            }
        }
    }
    let all_pass = entries.iter().all(|e| e.pass);
    let all_invalid = entries.iter().all(|e| e.error.is_some());
    sink.json(
        &format!("{p}_greens.json"),
        &GreensReport {
            problem: p,
            resolution: a.resolution,
            all_pass,
            entries,
        },
    )?;
    match last_error {
        Some(e) if all_invalid => Err(e.into()),
        _ => Ok(()),
    }
}

#[derive(Serialize)]
struct TableColumn {
    label: BranchLabel,
    c: f64,
    /// `(r, residual)`
    rows: Vec<(f64, f64)>,
}

#[derive(Serialize)]
struct ResidualReport {
    problem: ProblemKind,
    lambda: f64,
    n_terms: usize,
    columns: Vec<TableColumn>,
}

pub fn residual_table(a: &TableArgs, sink: &mut Sink) -> Outcome {
    let p = a.problem;
    let mut cfg = AdmConfig::default().with_terms(a.n_terms);
    cfg.c_bracket = (a.c_min, a.c_max);
    let (lambda, tag) = if a.lambda.trim() == "critical" {
        let (lo, hi) = p.lambda_bounds();
        let report = lambda_scan::find_critical_in(p, &cfg, 1e-6, (lo, hi + 10.0))?;
        println!("{p}: critical lambda {} at n_terms = {}", num(report.lambda_lo), a.n_terms);
        (report.lambda_lo, "critical".to_string())
    } else {
        let l: f64 = a
            .lambda
            .trim()
            .parse()
            .map_err(|_| Failure::Usage(format!("cannot read lambda '{}'", a.lambda)))?;
        (finite("lambda", l)?, l.to_string())
    };
    let branches = adm::solve_branches(p, lambda, &cfg)?;
    let r = radial::table_r_points::<f64>();
    let mut columns = Vec::new();
    for b in &branches {
        columns.push(TableColumn {
            label: b.label,
            c: b.c,
            rows: radial::residual_table(b, &r)?,
        });
    }
    let name = format!("{p}_{tag}_residuals");
    match a.format {
        Format::Json => sink.json(
            &format!("{name}.json"),
            &ResidualReport {
                problem: p,
                lambda,
                n_terms: a.n_terms,
                columns,
            },
        )?,
        Format::Csv => {
            let mut header = vec!["r".to_string()];
            header.extend(distinct_labels(&branches));
            let rows: Vec<Vec<String>> = (0..r.len())
                .map(|i| {
                    let mut row = vec![num(r[i])];
                    row.extend(columns.iter().map(|c| num(c.rows[i].1)));
                    row
                })
                .collect();
            let header: Vec<&str> = header.iter().map(String::as_str).collect();
            sink.csv(&format!("{name}.csv"), &header, &rows)?;
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lambda_lists() {
        assert_eq!(parse_lambdas("0:5:20").unwrap(), vec![0.0, 5.0, 10.0, 15.0, 20.0]);
        assert_eq!(parse_lambdas("-1, 0,2.5").unwrap(), vec![-1.0, 0.0, 2.5]);
        assert!(parse_lambdas("0:0:3").is_err());
        assert!(parse_lambdas("a,b").is_err());
        assert!(parse_lambdas("1:2").is_err());
    }

    #[test]
    fn k_ranges() {
        assert_eq!(parse_k_range("3", 5).unwrap(), vec![3.0]);
        let ks = parse_k_range("-10..-0.1", 5).unwrap();
        assert_eq!(ks.len(), 5);
        assert_eq!(ks[0], -10.0);
        assert_eq!(ks[4], -0.1);
        assert!(parse_k_range("2..1", 5).is_err());
        assert!(parse_k_range("x..1", 5).is_err());
    }
}
