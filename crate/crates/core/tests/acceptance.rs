//! Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any failure.
//!
//! Tolerances are pinned here and never read from the library, so a change to a
//! library constant cannot silently loosen a criterion.

#![allow(clippy::needless_range_loop)]

use std::process::ExitCode;
use std::time::{Duration, Instant};

use kenframe::classify::ClassificationReport;
use kenframe::contact::ContactSpec;
use kenframe::expr::{parse, BinOp, Chart, Expr};
use kenframe::frame::{curvature, evaluate_frame, levi_civita, FrameKind, FrameSpec};
use kenframe::soliton::{fit_soliton, soliton_residual, MuMode, SolitonFit};
use kenframe::workbench::{analyze, builtin, parse_spec, run, sample_points, Command, ManifoldSpec, Options, Report, Task};
use kenframe::{Mode, Rational, Scalar};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const S7_REGRESSION_BUDGET: Duration = Duration::from_secs(1);
const SOLITON_FLOAT_RESIDUAL: f64 = 1e-12;
const LAMBDA_PLUS_MU: f64 = 1e-8;
const WARPED_MIN_SPREAD: f64 = 0.1;
const KENMOTSU_DEFECT: f64 = 1e-8;
const SPHERE_MIN_NABLA_XI: f64 = 0.5;
const FLAT_MIN_NABLA_XI: f64 = 1.0;
const AUDIT_RR_QSR: f64 = 1e-7;
const AUDIT_DECOMPOSITION: f64 = 1e-7;
const AUDIT_FIRST_ORDER: f64 = 1e-9;
const AUDIT_BIANCHI_CONTRACTED: f64 = 1e-6;
const AUDIT_BUDGET: Duration = Duration::from_secs(30);
const WARPED_MIN_DEFECT: f64 = 0.01;
const FD_RELATIVE: f64 = 1e-5;
const FRAME_INVARIANCE: f64 = 1e-9;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn q(n: i64, d: i64) -> Rational {
    Rational::from_ratio(n, d).unwrap()
}

fn without_points(mut spec: ManifoldSpec) -> ManifoldSpec {
    spec.points.clear();
    spec
}

fn opts(mode: Mode, points: usize, seed: u64) -> Options {
    Options { mode, points, seed, ..Options::default() }
}

fn s7_regression() -> Outcome {
    let start = Instant::now();
    let spec = parse_spec("name: s7\ncoords: x y z\ndomain: z > 0\nframe: e1 = z, 0, 0\nframe: e2 = 0, z, 0\nframe: e3 = 0, 0, -z\n")
        .map_err(|e| e.to_string())?;
    let point = vec![q(1, 2), q(-3, 1), q(5, 2)];
    let fd = evaluate_frame::<Rational>(&spec.frame, &point, 4).map_err(|e| e.to_string())?;
    let pack = curvature(&fd, levi_civita(&fd).map_err(|e| e.to_string())?).map_err(|e| e.to_string())?;
    let e = |k: usize| -> Vec<Rational> { (0..3).map(|m| q(i64::from(m == k), 1)).collect() };
    let v = |c: [i64; 3]| -> Vec<Rational> { c.iter().map(|&x| q(x, 1)).collect() };

    // [e_i, e_j] = c^k_ij e_k
    let bracket = |i: usize, j: usize| -> Vec<Rational> { (0..3).map(|k| fd.structure[[k, i, j]].value().clone()).collect() };
    ensure(bracket(0, 2) == e(0), || "[e1,e3] != e1".into())?;
    ensure(bracket(1, 2) == e(1), || "[e2,e3] != e2".into())?;
    ensure(bracket(0, 1) == v([0, 0, 0]), || "[e1,e2] != 0".into())?;

    let nabla = [
        ((0, 0), [0, 0, -1]),
        ((0, 1), [0, 0, 0]),
        ((0, 2), [1, 0, 0]),
        ((1, 0), [0, 0, 0]),
        ((1, 1), [0, 0, -1]),
        ((1, 2), [0, 1, 0]),
        ((2, 0), [0, 0, 0]),
        ((2, 1), [0, 0, 0]),
        ((2, 2), [0, 0, 0]),
    ];
    for ((i, j), want) in nabla {
        let got = pack.connection.nabla(i, j);
        ensure(got == v(want), || format!("nabla_e{} e{} = {got:?}, expected {want:?}", i + 1, j + 1))?;
    }

    // R(e_i, e_j) e_k for all i < j
    let table = [
        ((0, 1, 2), [0, 0, 0]),
        ((1, 2, 2), [0, -1, 0]),
        ((0, 2, 2), [-1, 0, 0]),
        ((0, 1, 1), [-1, 0, 0]),
        ((1, 2, 1), [0, 0, 1]),
        ((0, 2, 1), [0, 0, 0]),
        ((0, 1, 0), [0, 1, 0]),
        ((1, 2, 0), [0, 0, 0]),
        ((0, 2, 0), [0, 0, 1]),
    ];
    for ((i, j, k), want) in table {
        let got = pack.apply(&e(i), &e(j), &e(k));
        ensure(got == v(want), || format!("R(e{},e{})e{} = {got:?}, expected {want:?}", i + 1, j + 1, k + 1))?;
    }
    for i in 0..3 {
        for j in 0..3 {
            let want = q(if i == j { -2 } else { 0 }, 1);
            ensure(*pack.ricci[[i, j]].value() == want, || format!("S(e{},e{}) != {want}", i + 1, j + 1))?;
        }
    }
    ensure(*pack.scalar_value() == q(-6, 1), || format!("r = {}", pack.scalar_value()))?;
    let elapsed = start.elapsed();
    ensure(elapsed < S7_REGRESSION_BUDGET, || format!("took {elapsed:?}"))?;
    Ok(format!("brackets, connection, 9 curvature values, S = -2g, r = -6 exact in {elapsed:.2?}"))
}

fn soliton_values() -> Outcome {
    let s7 = builtin("kenmotsu-s7").map_err(|e| e.to_string())?;

    let exact = analyze::<Rational>(Task::Soliton, "kenmotsu-s7", &s7, &opts(Mode::Rational, 5, 0)).map_err(|e| e.to_string())?;
    let fit = exact.soliton.as_ref().ok_or("no soliton fit")?;
    ensure(fit.lambda == 1.0 && fit.mu == 1.0, || format!("rational fit ({}, {})", fit.lambda, fit.mu))?;
    ensure(fit.residual_max == 0.0, || format!("rational residual {}", fit.residual_max))?;
    ensure(exact.exit_code == 0, || "rational soliton run did not exit 0".into())?;

    let float = analyze::<f64>(Task::Soliton, "kenmotsu-s7", &s7, &opts(Mode::Float, 5, 0)).map_err(|e| e.to_string())?;
    let fit = float.soliton.as_ref().ok_or("no soliton fit")?;
    ensure(fit.residual_max <= SOLITON_FLOAT_RESIDUAL, || format!("float residual {}", fit.residual_max))?;
    ensure((fit.lambda + fit.mu - 2.0).abs() <= SOLITON_FLOAT_RESIDUAL, || format!("lambda + mu = {}", fit.lambda + fit.mu))?;

    // (λ, μ) = (-1, 3) does not solve the equation on this model
    let point = vec![q(1, 1), q(1, 1), q(1, 1)];
    let fd = evaluate_frame::<Rational>(&s7.frame, &point, 4).map_err(|e| e.to_string())?;
    let pack = curvature(&fd, levi_civita(&fd).map_err(|e| e.to_string())?).map_err(|e| e.to_string())?;
    let cs = s7.contact.as_ref().ok_or("no contact")?.evaluate(&fd).map_err(|e| e.to_string())?;
    let off = soliton_residual(&q(-1, 1), &q(3, 1), &cs.xi, Some(&cs), &fd, &pack).map_err(|e| e.to_string())?;
    ensure(off == 4.0, || format!("residual at (-1, 3) = {off}"))?;

    let frozen = fit_soliton(&cs.xi, Some(&cs), &fd, &pack, MuMode::FrozenZero).map_err(|e| e.to_string())?;
    ensure(frozen.mean_square == q(4, 9), || format!("mu-zero mean square {}", frozen.mean_square))?;
    let mut mu_zero = opts(Mode::Rational, 5, 0);
    mu_zero.mu_zero = true;
    let plain = analyze::<Rational>(Task::Soliton, "kenmotsu-s7", &s7, &mu_zero).map_err(|e| e.to_string())?;
    let rms = plain.soliton.as_ref().ok_or("no fit")?.residual;
    ensure((rms - 2.0 / 3.0).abs() < 1e-15 && plain.exit_code == 1, || format!("mu-zero residual {rms}, exit {}", plain.exit_code))?;
    Ok("(1, 1) exact, float residual <= 1e-12, residual(-1, 3) = 4, mu-zero residual 2/3".into())
}

fn lambda_plus_mu() -> Outcome {
    let mut notes = Vec::new();
    for (name, seed) in [("kenmotsu-s7", 11), ("kenmotsu-warped", 12)] {
        let spec = without_points(builtin(name).map_err(|e| e.to_string())?);
        let points = sample_points::<f64>(&spec, 10, seed).map_err(|e| e.to_string())?;
        let contact = spec.contact.as_ref().ok_or("no contact")?;
        let mut fits = Vec::new();
        for p in points {
            let fd = evaluate_frame(&spec.frame, &p, 4).map_err(|e| e.to_string())?;
            let pack = curvature(&fd, levi_civita(&fd).map_err(|e| e.to_string())?).map_err(|e| e.to_string())?;
            let cs = contact.evaluate(&fd).map_err(|e| e.to_string())?;
            let fit = fit_soliton(&cs.xi, Some(&cs), &fd, &pack, MuMode::Free).map_err(|e| e.to_string())?;
            let sum = fit.lambda + fit.mu;
            ensure((sum - 2.0).abs() <= LAMBDA_PLUS_MU, || format!("{name} at {p:?}: lambda + mu = {sum}"))?;
            fits.push((p, fit));
        }
        let agg = SolitonFit::aggregate(&fits, 1e-8);
        if name == "kenmotsu-warped" {
            ensure(agg.spread > WARPED_MIN_SPREAD && !agg.is_soliton, || format!("warped spread {}", agg.spread))?;
        }
        notes.push(format!("{name} spread {:.3e}", agg.spread));
    }
    Ok(format!("lambda + mu = 2 at 10 points each; {}", notes.join(", ")))
}

fn check_report(name: &str, seed: u64) -> Result<Report, String> {
    let spec = without_points(builtin(name).map_err(|e| e.to_string())?);
    analyze::<f64>(Task::Check, name, &spec, &opts(Mode::Float, 10, seed)).map_err(|e| e.to_string())
}

fn kenmotsu_suite() -> Outcome {
    let mut worst = 0.0f64;
    for name in ["kenmotsu-s7", "kenmotsu-warped"] {
        let report = check_report(name, 21)?;
        for p in &report.points {
            ensure(p.checks.kenmotsu.is_some() && p.checks.closed_forms.is_some(), || format!("{name}: checks missing"))?;
            for (group, entries) in p.checks.groups() {
                for (check, v) in entries {
                    ensure(v <= KENMOTSU_DEFECT, || format!("{name} {group}.{check} = {v:e} at {:?}", p.point))?;
                    worst = worst.max(v);
                }
            }
        }
    }
    let nabla_xi = |name: &str| -> Result<f64, String> {
        let report = check_report(name, 22)?;
        report
            .points
            .iter()
            .map(|p| p.checks.kenmotsu.as_ref().map(|k| k.nabla_xi).ok_or_else(|| format!("{name}: no kenmotsu checks")))
            .try_fold(f64::INFINITY, |m, v| v.map(|v| m.min(v)))
    };
    let sphere = nabla_xi("sphere3")?;
    let flat = nabla_xi("flat3")?;
    ensure(sphere >= SPHERE_MIN_NABLA_XI, || format!("sphere3 nabla_xi {sphere}"))?;
    ensure(flat >= FLAT_MIN_NABLA_XI, || format!("flat3 nabla_xi {flat}"))?;
    Ok(format!("worst defect {worst:.2e}; nabla_xi sphere3 {sphere}, flat3 {flat}"))
}

fn random_audit() -> Outcome {
    let start = Instant::now();
    let report = run(&Command::RandomAudit { count: 100, seed: 1 }, &Options::default()).map_err(|e| e.to_string())?;
    let elapsed = start.elapsed();
    let audit = report.audit.as_ref().ok_or("no audit section")?;
    ensure(audit.samples.len() == 100, || format!("{} samples", audit.samples.len()))?;
    let worst = |f: fn(&kenframe::workbench::AuditSample) -> f64| audit.samples.iter().map(f).fold(0.0, f64::max);
    let rows = [
        ("rr_qsr", worst(|s| s.rr_qsr), AUDIT_RR_QSR),
        ("decomposition", worst(|s| s.decomposition_3d), AUDIT_DECOMPOSITION),
        ("torsion", worst(|s| s.torsion), AUDIT_FIRST_ORDER),
        ("metric", worst(|s| s.metric_compatibility), AUDIT_FIRST_ORDER),
        ("bianchi_first", worst(|s| s.bianchi_first), AUDIT_FIRST_ORDER),
        ("bianchi_contracted", worst(|s| s.bianchi_contracted), AUDIT_BIANCHI_CONTRACTED),
    ];
    for (name, v, max) in rows {
        ensure(v <= max, || format!("{name} = {v:e} > {max:e}"))?;
    }
    ensure(report.exit_code == 0, || "audit exit code nonzero".into())?;
    ensure(elapsed < AUDIT_BUDGET, || format!("took {elapsed:?}"))?;
    let summary: Vec<String> = rows.iter().map(|(n, v, _)| format!("{n} {v:.1e}")).collect();
    Ok(format!("{} in {elapsed:.2?}", summary.join(", ")))
}

fn classification(report: &Report) -> Result<Vec<&ClassificationReport>, String> {
    report.points.iter().map(|p| p.classification.as_ref().ok_or_else(|| "missing classification".to_string())).collect()
}

fn ricci_conditions() -> Outcome {
    let s7 = builtin("kenmotsu-s7").map_err(|e| e.to_string())?;
    let report = analyze::<Rational>(Task::Classify, "kenmotsu-s7", &s7, &opts(Mode::Rational, 5, 0)).map_err(|e| e.to_string())?;
    for c in classification(&report)? {
        ensure(c.codazzi_defect == 0.0 && c.cyclic_defect == 0.0, || {
            format!("s7 codazzi {} cyclic {}", c.codazzi_defect, c.cyclic_defect)
        })?;
        ensure(c.phi_ricci_defect == Some(0.0), || format!("s7 phi_ricci {:?}", c.phi_ricci_defect))?;
        let sf = c.space_form.as_ref().ok_or("no space form")?;
        ensure(sf.kappa == -1.0 && sf.defect == 0.0, || format!("s7 kappa {} defect {}", sf.kappa, sf.defect))?;
        ensure(c.verdicts.space_form.as_deref() == Some("H(-1)"), || format!("s7 verdict {:?}", c.verdicts.space_form))?;
    }

    let warped = builtin("kenmotsu-warped").map_err(|e| e.to_string())?;
    let report = analyze::<f64>(Task::Classify, "kenmotsu-warped", &warped, &opts(Mode::Float, 5, 0)).map_err(|e| e.to_string())?;
    let mut least = f64::INFINITY;
    for c in classification(&report)? {
        let phi = c.phi_ricci_defect.ok_or("warped phi_ricci missing")?;
        for (name, v) in [("codazzi", c.codazzi_defect), ("cyclic", c.cyclic_defect), ("phi_ricci", phi)] {
            ensure(v > WARPED_MIN_DEFECT, || format!("warped {name} = {v}"))?;
            least = least.min(v);
        }
    }
    Ok(format!("s7 all zero, kappa = -1, H(-1); warped smallest defect {least:.3}"))
}

/// Random smooth expression in `x, y, z`; `exact` restricts to rational operations.
fn random_expr(rng: &mut ChaCha8Rng, depth: usize, exact: bool) -> String {
    const VARS: [&str; 3] = ["x", "y", "z"];
    if depth == 0 || rng.random_bool(0.2) {
        return if rng.random_bool(0.7) { VARS[rng.random_range(0..3)].to_string() } else { format!("{}/4", rng.random_range(1..=8)) };
    }
    let a = random_expr(rng, depth - 1, exact);
    let b = random_expr(rng, depth - 1, exact);
    let pick = if exact { rng.random_range(0..5) } else { rng.random_range(0..10) };
    match pick {
        0 => format!("({a}) + ({b})"),
        1 => format!("({a}) - ({b})"),
        2 => format!("({a}) * ({b})"),
        3 => format!("({a}) / (1 + ({b})^2)"),
        4 => format!("({a})^2"),
        5 => format!("sin({a})"),
        6 => format!("cos({a}) * ({b})"),
        7 => format!("exp(({a}) / 4)"),
        8 => format!("sqrt(1 + ({a})^2)"),
        _ => format!("ln(2 + cos({a}))"),
    }
}

fn jet_kernel() -> Outcome {
    let chart = Chart::new(["x", "y", "z"]).map_err(|e| e.to_string())?;
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut worst = 0.0f64;
    for _ in 0..50 {
        let text = random_expr(&mut rng, 4, false);
        let expr = parse(&text, &chart).map_err(|e| format!("{text}: {e}"))?;
        let p: Vec<f64> = (0..3).map(|_| rng.random_range(-1.0..1.0)).collect();
        let jet = expr.to_jet(&p, 2).map_err(|e| e.to_string())?;
        let f = |x: &[f64]| expr.eval_scalar::<f64>(x).unwrap();
        let shifted = |a: usize, da: f64, b: usize, db: f64| {
            let mut x = p.clone();
            x[a] += da;
            x[b] += db;
            f(&x)
        };
        let mut compare = |alpha: [u8; 3], fd: f64| {
            let exact = jet.derivative(&alpha);
            let rel = (exact - fd).abs() / fd.abs().max(1.0);
            worst = worst.max(rel);
            ensure(rel <= FD_RELATIVE, || format!("{text} at {p:?}, d{alpha:?}: jet {exact}, fd {fd}"))
        };
        for a in 0..3 {
            let h = 1e-5;
            let mut alpha = [0u8; 3];
            alpha[a] = 1;
            compare(alpha, (shifted(a, h, a, 0.0) - shifted(a, -h, a, 0.0)) / (2.0 * h))?;
            let h = 1e-4;
            for b in a..3 {
                let mut alpha = [0u8; 3];
                alpha[a] += 1;
                alpha[b] += 1;
                let fd = if a == b {
                    (shifted(a, h, a, 0.0) - 2.0 * f(&p) + shifted(a, -h, a, 0.0)) / (h * h)
                } else {
                    (shifted(a, h, b, h) - shifted(a, h, b, -h) - shifted(a, -h, b, h) + shifted(a, -h, b, -h)) / (4.0 * h * h)
                };
                compare(alpha, fd)?;
            }
        }
    }

    // Leibniz: D^α(fg) = Σ_{β ≤ α} C(α, β) D^β f D^{α−β} g, exactly
    let binom = |n: u8, k: u8| -> i64 { (0..k).fold(1i64, |acc, i| acc * i64::from(n - i) / i64::from(i + 1)) };
    for _ in 0..50 {
        let (ft, gt) = (random_expr(&mut rng, 3, true), random_expr(&mut rng, 3, true));
        let f = parse(&ft, &chart).map_err(|e| e.to_string())?;
        let g = parse(&gt, &chart).map_err(|e| e.to_string())?;
        let fg = Expr::binary(BinOp::Mul, f.clone(), g.clone());
        let p: Vec<Rational> = (0..3).map(|_| q(rng.random_range(-8..=8), 4)).collect();
        let deg = 3;
        let (jf, jg, jfg) = (
            f.to_jet(&p, deg).map_err(|e| e.to_string())?,
            g.to_jet(&p, deg).map_err(|e| e.to_string())?,
            fg.to_jet(&p, deg).map_err(|e| e.to_string())?,
        );
        for pos in 0..jfg.layout().len() {
            let alpha = jfg.layout().multi_index(pos).to_vec();
            let mut sum = Rational::zero();
            for b0 in 0..=alpha[0] {
                for b1 in 0..=alpha[1] {
                    for b2 in 0..=alpha[2] {
                        let beta = [b0, b1, b2];
                        let rest = [alpha[0] - b0, alpha[1] - b1, alpha[2] - b2];
                        let c = binom(alpha[0], b0) * binom(alpha[1], b1) * binom(alpha[2], b2);
                        sum += Rational::from_i64(c) * jf.derivative(&beta) * &jg.derivative(&rest);
                    }
                }
            }
            let lhs = jfg.derivative(&alpha);
            ensure(lhs == sum, || format!("Leibniz fails for ({ft})*({gt}) at {alpha:?}"))?;
        }
    }
    Ok(format!("50 expressions, worst relative error {worst:.1e}; Leibniz exact on 50 rational pairs"))
}

/// `e'_i = Σ_j O_ij e_j` with `O` orthogonal; `ξ' = Oξ`, `φ' = OφOᵀ`.
fn rotated(spec: &ManifoldSpec) -> Result<ManifoldSpec, String> {
    const O: [[i64; 3]; 3] = [[1, 2, 2], [2, 1, -2], [2, -2, 1]];
    let FrameKind::Chart(rows) = &spec.frame.kind else {
        return Err("expected a chart frame".into());
    };
    let combine = |terms: Vec<(i64, i64, Expr)>| {
        terms
            .into_iter()
            .map(|(n, d, e)| Expr::binary(BinOp::Mul, Expr::Ratio(n, d), e))
            .reduce(|a, b| Expr::binary(BinOp::Add, a, b))
            .unwrap()
    };
    let frame: Vec<Vec<Expr>> =
        (0..3).map(|i| (0..3).map(|m| combine((0..3).map(|j| (O[i][j], 3, rows[j][m].clone())).collect())).collect()).collect();
    let contact = spec.contact.as_ref().ok_or("no contact")?;
    let xi = (0..3).map(|i| combine((0..3).map(|j| (O[i][j], 3, contact.xi[j].clone())).collect())).collect();
    let phi = (0..3)
        .map(|i| {
            (0..3)
                .map(|k| {
                    let mut terms = Vec::new();
                    for j in 0..3 {
                        for l in 0..3 {
                            terms.push((O[i][j] * O[k][l], 9, contact.phi[j][l].clone()));
                        }
                    }
                    combine(terms)
                })
                .collect()
        })
        .collect();
    Ok(ManifoldSpec {
        name: format!("{} rotated", spec.name),
        frame: FrameSpec::chart_frame(spec.chart().clone(), frame).map_err(|e| e.to_string())?,
        contact: Some(ContactSpec { phi, xi }),
        points: spec.points.clone(),
    })
}

fn frame_invariance() -> Outcome {
    let base = without_points(builtin("kenmotsu-s7").map_err(|e| e.to_string())?);
    let turned = rotated(&base)?;
    let o = opts(Mode::Float, 5, 31);
    let a = analyze::<f64>(Task::Report, "kenmotsu-s7", &base, &o).map_err(|e| e.to_string())?;
    let b = analyze::<f64>(Task::Report, "rotated", &turned, &o).map_err(|e| e.to_string())?;
    let mut worst = 0.0f64;
    let mut compare = |what: String, x: f64, y: f64| {
        worst = worst.max((x - y).abs());
        ensure((x - y).abs() <= FRAME_INVARIANCE, || format!("{what}: {x} vs {y}"))
    };
    for (pa, pb) in a.points.iter().zip(&b.points) {
        compare(format!("r at {:?}", pa.point), pa.scalar_curvature, pb.scalar_curvature)?;
        let ka = pa.classification.as_ref().and_then(|c| c.space_form.as_ref()).ok_or("no kappa")?;
        let kb = pb.classification.as_ref().and_then(|c| c.space_form.as_ref()).ok_or("no kappa")?;
        compare("kappa".into(), ka.kappa, kb.kappa)?;
    }
    ensure(a.verdicts.len() == b.verdicts.len(), || "verdict lists differ".into())?;
    for (va, vb) in a.verdicts.iter().zip(&b.verdicts) {
        ensure(va.name == vb.name, || format!("{} vs {}", va.name, vb.name))?;
        compare(va.name.clone(), va.value, vb.value)?;
    }
    let (sa, sb) = (a.soliton.as_ref().ok_or("no fit")?, b.soliton.as_ref().ok_or("no fit")?);
    compare("lambda".into(), sa.lambda, sb.lambda)?;
    compare("mu".into(), sa.mu, sb.mu)?;
    Ok(format!("{} scalar quantities agree, worst difference {worst:.1e}", a.verdicts.len() + 2 * a.points.len() + 2))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 8] = [
        ("kenmotsu-s7 frame regression (rational)", s7_regression),
        ("soliton constants and residuals", soliton_values),
        ("lambda + mu = 2 pointwise", lambda_plus_mu),
        ("Kenmotsu suite and negative controls", kenmotsu_suite),
        ("random audit of universal identities", random_audit),
        ("Codazzi / cyclic / phi-Ricci / space form", ricci_conditions),
        ("jet kernel against finite differences", jet_kernel),
        ("frame invariance under rotation", frame_invariance),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        match check() {
            Ok(detail) => println!("PASS {} {name}: {detail}", i + 1),
            Err(detail) => {
                failed += 1;
                println!("FAIL {} {name}: {detail}", i + 1);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
