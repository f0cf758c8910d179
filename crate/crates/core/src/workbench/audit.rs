//! Random frames for fuzzing the universal identities.
//!
//! Sample `s` of a run with seed `S` draws from ChaCha8 seeded with `S` on
//! stream `s`, so samples are reproducible independently of each other:
//!
//! - a base point `p` on the dyadic grid of `[−3, 3]^3`;
//! - frame coefficients `A(x) = I + 3/10 · P(x − p)` where every entry of `P`
//!   is a polynomial of degree ≤ 2 in `x − p` with coefficients `k/1024`,
//!   `|k| ≤ 1024`. At `p` each row of `3/10 · P` sums to at most `0.9` in
//!   absolute value, so `A(p)` is strictly diagonally dominant and invertible;
//! - frame metric `g(x) = I + 1/5 · M(x − p)` with `M` symmetric of degree ≤ 1,
//!   likewise diagonally dominant and positive definite at `p`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::report::{AuditSample, AuditSummary, Report, Verdict};
use super::run::Options;
use super::RunError;
use crate::classify::rr_qsr_defect;
use crate::expr::{BinOp, Chart, Expr};
use crate::frame::{curvature, decomposition_3d_defect, evaluate_frame, identity_suite, levi_civita, FrameSpec, MetricSpec};
use crate::scalar::Scalar;

pub const RR_QSR_MAX: f64 = 1e-7;
pub const DECOMPOSITION_MAX: f64 = 1e-7;
pub const FIRST_ORDER_MAX: f64 = 1e-9;
pub const BIANCHI_CONTRACTED_MAX: f64 = 1e-6;

const COEFF_GRID: i64 = 1024;

fn coeff(rng: &mut ChaCha8Rng) -> Expr {
    Expr::Ratio(rng.random_range(-COEFF_GRID..=COEFF_GRID), COEFF_GRID)
}

fn mul(a: Expr, b: Expr) -> Expr {
    Expr::binary(BinOp::Mul, a, b)
}

fn add(a: Expr, b: Expr) -> Expr {
    Expr::binary(BinOp::Add, a, b)
}

/// Random polynomial in the shifted coordinates `d` of degree at most `degree` (1 or 2).
fn polynomial(rng: &mut ChaCha8Rng, d: &[Expr], degree: usize) -> Expr {
    let mut acc = coeff(rng);
    for da in d {
        acc = add(acc, mul(coeff(rng), da.clone()));
    }
    if degree >= 2 {
        for a in 0..d.len() {
            for b in a..d.len() {
                acc = add(acc, mul(coeff(rng), mul(d[a].clone(), d[b].clone())));
            }
        }
    }
    acc
}

/// The frame and base point for sample `index`.
pub fn random_frame<S: Scalar>(seed: u64, index: usize) -> (FrameSpec, Vec<S>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index as u64);
    let chart = Chart::new(["x", "y", "z"]).expect("valid names");
    let n = chart.dim();
    let base: Vec<i64> = (0..n).map(|_| rng.random_range(-3 * 1024..=3 * 1024)).collect();
    let point: Vec<S> = base.iter().map(|&k| S::from_ratio(k, 1024).expect("nonzero")).collect();
    let d: Vec<Expr> =
        base.iter().enumerate().map(|(a, &k)| Expr::binary(BinOp::Sub, Expr::coord(&chart, a), Expr::Ratio(k, 1024))).collect();
    let frame: Vec<Vec<Expr>> = (0..n)
        .map(|i| (0..n).map(|m| add(Expr::int(i64::from(i == m)), mul(Expr::Ratio(3, 10), polynomial(&mut rng, &d, 2)))).collect())
        .collect();
    let mut metric = vec![vec![Expr::int(0); n]; n];
    for i in 0..n {
        for j in i..n {
            let e = add(Expr::int(i64::from(i == j)), mul(Expr::Ratio(1, 5), polynomial(&mut rng, &d, 1)));
            metric[i][j] = e.clone();
            metric[j][i] = e;
        }
    }
    let spec =
        FrameSpec::chart_frame(chart, frame).and_then(|f| f.with_metric(MetricSpec::Entries(metric))).expect("square by construction");
    (spec, point)
}

fn audit_one<S: Scalar>(seed: u64, index: usize, degree: usize) -> Result<AuditSample, RunError> {
    let (spec, point) = random_frame::<S>(seed, index);
    let at = |e: &dyn std::fmt::Display| RunError::AtPoint { point: format!("audit sample {index}"), message: e.to_string() };
    let fd = evaluate_frame(&spec, &point, degree).map_err(|e| at(&e))?;
    let pack = curvature(&fd, levi_civita(&fd).map_err(|e| at(&e))?).map_err(|e| at(&e))?;
    let ids = identity_suite(&pack, &fd).map_err(|e| at(&e))?;
    let bianchi_contracted = ids
        .bianchi_contracted
        .ok_or_else(|| RunError::Input(format!("jet degree {degree} is too low for the contracted Bianchi identity")))?;
    Ok(AuditSample {
        index,
        point: point.iter().map(Scalar::to_f64).collect(),
        rr_qsr: rr_qsr_defect(&pack, &fd),
        decomposition_3d: decomposition_3d_defect(&pack, &fd),
        torsion: ids.torsion,
        metric_compatibility: ids.metric_compatibility,
        bianchi_first: ids.bianchi_first,
        bianchi_contracted,
    })
}

pub fn random_audit<S: Scalar>(count: usize, seed: u64, opts: &Options) -> Result<Report, RunError> {
    if count == 0 {
        return Err(RunError::Input("--count must be at least 1".into()));
    }
    let samples = (0..count).into_par_iter().map(|i| audit_one::<S>(seed, i, opts.degree)).collect::<Result<Vec<_>, _>>()?;
    let worst = |f: fn(&AuditSample) -> f64| samples.iter().map(f).fold(0.0, f64::max);
    let verdicts = vec![
        Verdict::new("audit.rr_qsr", worst(|s| s.rr_qsr), RR_QSR_MAX, true),
        Verdict::new("audit.decomposition_3d", worst(|s| s.decomposition_3d), DECOMPOSITION_MAX, true),
        Verdict::new("audit.torsion", worst(|s| s.torsion), FIRST_ORDER_MAX, true),
        Verdict::new("audit.metric_compatibility", worst(|s| s.metric_compatibility), FIRST_ORDER_MAX, true),
        Verdict::new("audit.bianchi_first", worst(|s| s.bianchi_first), FIRST_ORDER_MAX, true),
        Verdict::new("audit.bianchi_contracted", worst(|s| s.bianchi_contracted), BIANCHI_CONTRACTED_MAX, true),
    ];
    let mut report = Report {
        command: "random-audit".into(),
        target: format!("{count} random frames"),
        mode: S::MODE,
        tol: opts.tol,
        degree: opts.degree,
        points: Vec::new(),
        soliton: None,
        classification: None,
        audit: Some(AuditSummary { count, seed, samples }),
        verdicts,
        exit_code: 0,
    };
    report.exit_code = if report.passed() { 0 } else { 1 };
    Ok(report)
}
