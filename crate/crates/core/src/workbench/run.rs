use rayon::prelude::*;

use super::report::{Checks, PointReport, Report, Verdict};
use super::sampling::{format_point, sample_points};
use super::{audit, resolve, ManifoldSpec, RunError};
use crate::classify::ClassificationReport;
use crate::contact::{check_3d_closed_forms, check_almost_contact, check_kenmotsu, check_kenmotsu_curvature};
use crate::expr::parse;
use crate::frame::{curvature, evaluate_frame, identity_suite, levi_civita};
use crate::scalar::{Mode, Scalar};
use crate::soliton::{fit_soliton, MuMode, PointFit, Potential, SolitonFit};
use crate::Rational;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PotentialArg {
    Xi,
    /// Frame-component expressions, parsed against the target's chart.
    Components(Vec<String>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Options {
    pub tol: f64,
    pub points: usize,
    pub seed: u64,
    pub mode: Mode,
    pub degree: usize,
    pub potential: PotentialArg,
    pub mu_zero: bool,
}

impl Default for Options {
    fn default() -> Self {
        Options { tol: 1e-8, points: 5, seed: 0, mode: Mode::Float, degree: 4, potential: PotentialArg::Xi, mu_zero: false }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Task {
    Check,
    Soliton,
    Classify,
    Report,
}

impl Task {
    pub fn name(self) -> &'static str {
        match self {
            Task::Check => "check",
            Task::Soliton => "soliton",
            Task::Classify => "classify",
            Task::Report => "report",
        }
    }

    fn wants_checks(self) -> bool {
        !matches!(self, Task::Soliton)
    }

    fn wants_soliton(self) -> bool {
        matches!(self, Task::Soliton | Task::Report)
    }

    fn wants_classification(self) -> bool {
        matches!(self, Task::Classify | Task::Report)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Command {
    Analyze { task: Task, target: String },
    RandomAudit { count: usize, seed: u64 },
}

/// Runs a command; `Err` means an input error (exit code 2).
pub fn run(command: &Command, opts: &Options) -> Result<Report, RunError> {
    if !(opts.tol.is_finite() && opts.tol >= 0.0) {
        return Err(RunError::Input(format!("tolerance must be a non-negative number, got {}", opts.tol)));
    }
    match command {
        Command::RandomAudit { count, seed } => match opts.mode {
            Mode::Float => audit::random_audit::<f64>(*count, *seed, opts),
            Mode::Rational => audit::random_audit::<Rational>(*count, *seed, opts),
        },
        Command::Analyze { task, target } => {
            let spec = resolve(target)?;
            match opts.mode {
                Mode::Float => analyze::<f64>(*task, target, &spec, opts),
                Mode::Rational => analyze::<Rational>(*task, target, &spec, opts),
            }
        }
    }
}

pub fn analyze<S: Scalar>(task: Task, target: &str, spec: &ManifoldSpec, opts: &Options) -> Result<Report, RunError> {
    if opts.points == 0 {
        return Err(RunError::Input("--points must be at least 1".into()));
    }
    let points: Vec<Vec<S>> = sample_points(spec, opts.points, opts.seed)?;
    let potential = match &opts.potential {
        PotentialArg::Xi => Potential::Xi,
        PotentialArg::Components(parts) => {
            let exprs = parts
                .iter()
                .map(|t| parse(t, spec.chart()).map_err(|e| RunError::Input(format!("--potential `{t}`: {e}"))))
                .collect::<Result<Vec<_>, _>>()?;
            if exprs.len() != spec.dim() {
                return Err(RunError::Input(format!("--potential needs {} components, got {}", spec.dim(), exprs.len())));
            }
            Potential::Field(exprs)
        }
    };
    if task == Task::Soliton && potential == Potential::Xi && spec.contact.is_none() {
        return Err(RunError::Input(format!("{target} has no contact structure; pass --potential components")));
    }

    let results = points
        .par_iter()
        .map(|p| analyze_point(task, spec, p, &potential, opts).map_err(|message| RunError::AtPoint { point: format_point(p), message }))
        .collect::<Result<Vec<_>, _>>()?;

    let mut fits = Vec::new();
    let mut reports = Vec::new();
    for (p, (report, fit)) in points.into_iter().zip(results) {
        if let Some(f) = fit {
            fits.push((p, f));
        }
        reports.push(report);
    }
    let soliton = (!fits.is_empty()).then(|| SolitonFit::aggregate(&fits, opts.tol));
    let classification = {
        let cls: Vec<ClassificationReport> = reports.iter().filter_map(|r| r.classification.clone()).collect();
        ClassificationReport::combine(&cls, opts.tol)
    };

    let verdicts = verdicts(task, &reports, soliton.as_ref(), classification.as_ref(), opts.tol);
    let mut report = Report {
        command: task.name().into(),
        target: target.into(),
        mode: S::MODE,
        tol: opts.tol,
        degree: opts.degree,
        points: reports,
        soliton,
        classification,
        audit: None,
        verdicts,
        exit_code: 0,
    };
    report.exit_code = if report.passed() { 0 } else { 1 };
    Ok(report)
}

type PointOutcome<S> = (PointReport, Option<PointFit<S>>);

fn analyze_point<S: Scalar>(
    task: Task,
    spec: &ManifoldSpec,
    point: &[S],
    potential: &Potential,
    opts: &Options,
) -> Result<PointOutcome<S>, String> {
    let err = |e: &dyn std::fmt::Display| e.to_string();
    let fd = evaluate_frame(&spec.frame, point, opts.degree).map_err(|e| err(&e))?;
    let pack = curvature(&fd, levi_civita(&fd).map_err(|e| err(&e))?).map_err(|e| err(&e))?;
    let cs = match &spec.contact {
        Some(c) => Some(c.evaluate(&fd).map_err(|e| err(&e))?),
        None => None,
    };

    let mut checks = Checks::default();
    if task.wants_checks() {
        checks.identities = Some(identity_suite(&pack, &fd).map_err(|e| err(&e))?);
        if let Some(cs) = &cs {
            if task != Task::Classify {
                checks.almost_contact = Some(check_almost_contact(cs, &fd));
            }
            checks.kenmotsu = Some(check_kenmotsu(cs, &fd, &pack).map_err(|e| err(&e))?);
            if task != Task::Classify {
                checks.kenmotsu_curvature = Some(check_kenmotsu_curvature(cs, &fd, &pack));
                if fd.dim() == 3 {
                    checks.closed_forms = Some(check_3d_closed_forms(cs, &fd, &pack).map_err(|e| err(&e))?);
                }
            }
        }
    }

    let mu_mode = if opts.mu_zero { MuMode::FrozenZero } else { MuMode::Free };
    let fit = if task.wants_soliton() && (spec.contact.is_some() || *potential != Potential::Xi) {
        let v = potential.evaluate(cs.as_ref(), &fd).map_err(|e| err(&e))?;
        Some(fit_soliton(&v, cs.as_ref(), &fd, &pack, mu_mode).map_err(|e| err(&e))?)
    } else {
        None
    };

    let classification = if task.wants_classification() {
        // the closed-form check uses the V = ξ soliton
        let xi_fit = match &cs {
            Some(c) => fit_soliton(&c.xi, Some(c), &fd, &pack, MuMode::Free).ok(),
            None => None,
        };
        Some(ClassificationReport::at_point(&pack, &fd, cs.as_ref(), xi_fit.as_ref(), opts.tol).map_err(|e| err(&e))?)
    } else {
        None
    };

    let f = |s: &S| s.to_f64();
    let n = fd.dim();
    let mut report = PointReport {
        point: point.iter().map(f).collect(),
        structure: (0..n).map(|k| (0..n).map(|i| (0..n).map(|j| f(fd.structure[[k, i, j]].value())).collect()).collect()).collect(),
        gamma: (0..n).map(|k| (0..n).map(|i| (0..n).map(|j| f(pack.gamma()[[k, i, j]].value())).collect()).collect()).collect(),
        riemann: (0..n)
            .map(|l| (0..n).map(|k| (0..n).map(|i| (0..n).map(|j| f(pack.riemann[[l, k, i, j]].value())).collect()).collect()).collect())
            .collect(),
        ricci: (0..n).map(|i| (0..n).map(|j| f(pack.ricci[[i, j]].value())).collect()).collect(),
        scalar_curvature: f(pack.scalar_value()),
        checks,
        soliton: None,
        classification,
    };
    if let Some(fit) = &fit {
        report.soliton = Some(crate::soliton::PointRecord {
            point: report.point.clone(),
            lambda: fit.lambda.to_f64(),
            mu: fit.mu.to_f64(),
            residual: fit.residual_rms,
            residual_max: fit.residual_max,
        });
    }
    Ok((report, fit))
}

fn worst_checks(reports: &[PointReport]) -> Vec<(String, f64)> {
    let mut out: Vec<(String, f64)> = Vec::new();
    for r in reports {
        for (group, entries) in r.checks.groups() {
            for (name, v) in entries {
                let key = format!("{group}.{name}");
                match out.iter_mut().find(|(k, _)| *k == key) {
                    Some(slot) => slot.1 = slot.1.max(v),
                    None => out.push((key, v)),
                }
            }
        }
    }
    out
}

fn verdicts(
    task: Task,
    reports: &[PointReport],
    soliton: Option<&SolitonFit>,
    classification: Option<&ClassificationReport>,
    tol: f64,
) -> Vec<Verdict> {
    let mut out: Vec<Verdict> = worst_checks(reports).into_iter().map(|(name, v)| Verdict::new(name, v, tol, true)).collect();
    if let Some(s) = soliton {
        let gating = task == Task::Soliton;
        out.push(Verdict::new("soliton.residual_max", s.residual_max, tol, gating));
        out.push(Verdict::new("soliton.spread", s.spread, tol, gating));
    }
    if let Some(c) = classification {
        out.push(Verdict::new("classify.rr_qsr", c.rr_qsr_defect, tol, true));
        out.push(Verdict::new("classify.nabla_q_paths", c.nabla_q_path_gap, tol, true));
        out.push(Verdict::new("classify.codazzi", c.codazzi_defect, tol, false));
        out.push(Verdict::new("classify.cyclic_parallel", c.cyclic_defect, tol, false));
        if let Some(d) = c.nabla_s_closed_form_defect {
            out.push(Verdict::new("classify.nabla_s_closed_form", d, tol, false));
        }
        if let Some(d) = c.phi_ricci_defect {
            out.push(Verdict::new("classify.phi_ricci", d, tol, false));
        }
        out.push(Verdict::new("classify.einstein", c.einstein_defect, tol, false));
        if let Some(sf) = &c.space_form {
            out.push(Verdict::new("classify.space_form", sf.defect, tol, false));
        }
    }
    out
}
