use std::fmt::Write as _;
use std::io;

use serde::{Deserialize, Serialize};

use crate::classify::ClassificationReport;
use crate::contact::{AlmostContactDefects, ClosedFormDefects, KenmotsuCurvatureDefects, KenmotsuDefects};
use crate::frame::IdentityDefects;
use crate::scalar::Mode;
use crate::soliton::{PointRecord, SolitonFit};

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Checks {
    pub identities: Option<IdentityDefects>,
    pub almost_contact: Option<AlmostContactDefects>,
    pub kenmotsu: Option<KenmotsuDefects>,
    pub kenmotsu_curvature: Option<KenmotsuCurvatureDefects>,
    pub closed_forms: Option<ClosedFormDefects>,
}

impl Checks {
    /// `(group, entries)` for every section that was computed.
    pub fn groups(&self) -> Vec<(&'static str, Vec<(&'static str, f64)>)> {
        let mut out = Vec::new();
        if let Some(d) = &self.identities {
            out.push(("identity", d.entries()));
        }
        if let Some(d) = &self.almost_contact {
            out.push(("almost_contact", d.entries()));
        }
        if let Some(d) = &self.kenmotsu {
            out.push(("kenmotsu", d.entries()));
        }
        if let Some(d) = &self.kenmotsu_curvature {
            out.push(("kenmotsu_curvature", d.entries()));
        }
        if let Some(d) = &self.closed_forms {
            out.push(("closed_form", d.entries()));
        }
        out
    }
}

/// Everything computed at one point. Tensor arrays use the frame module's index order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PointReport {
    pub point: Vec<f64>,
    /// `[k][i][j] = c^k_ij`
    pub structure: Vec<Vec<Vec<f64>>>,
    /// `[k][i][j] = Γ^k_ij`
    pub gamma: Vec<Vec<Vec<f64>>>,
    /// `[l][k][i][j] = R^l_kij`
    pub riemann: Vec<Vec<Vec<Vec<f64>>>>,
    pub ricci: Vec<Vec<f64>>,
    pub scalar_curvature: f64,
    pub checks: Checks,
    pub soliton: Option<PointRecord>,
    pub classification: Option<ClassificationReport>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Verdict {
    pub name: String,
    pub value: f64,
    pub threshold: f64,
    pub pass: bool,
    /// Whether a failure changes the exit code.
    pub gating: bool,
}

impl Verdict {
    pub fn new(name: impl Into<String>, value: f64, threshold: f64, gating: bool) -> Verdict {
        Verdict { name: name.into(), pass: value <= threshold, value, threshold, gating }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AuditSample {
    pub index: usize,
    pub point: Vec<f64>,
    pub rr_qsr: f64,
    pub decomposition_3d: f64,
    pub torsion: f64,
    pub metric_compatibility: f64,
    pub bianchi_first: f64,
    pub bianchi_contracted: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AuditSummary {
    pub count: usize,
    pub seed: u64,
    pub samples: Vec<AuditSample>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub command: String,
    pub target: String,
    pub mode: Mode,
    pub tol: f64,
    pub degree: usize,
    pub points: Vec<PointReport>,
    pub soliton: Option<SolitonFit>,
    pub classification: Option<ClassificationReport>,
    pub audit: Option<AuditSummary>,
    pub verdicts: Vec<Verdict>,
    pub exit_code: i32,
}

/// Writes every float as `{:.16e}`: 17 significant digits, which round-trips binary64.
struct SigDigits;

impl serde_json::ser::Formatter for SigDigits {
    fn write_f64<W: ?Sized + io::Write>(&mut self, writer: &mut W, value: f64) -> io::Result<()> {
        write!(writer, "{value:.16e}")
    }

    fn write_f32<W: ?Sized + io::Write>(&mut self, writer: &mut W, value: f32) -> io::Result<()> {
        self.write_f64(writer, f64::from(value))
    }
}

impl Report {
    pub fn passed(&self) -> bool {
        self.verdicts.iter().all(|v| v.pass || !v.gating)
    }

    pub fn to_json(&self) -> String {
        let mut buf = Vec::new();
        let mut ser = serde_json::Serializer::with_formatter(&mut buf, SigDigits);
        self.serialize(&mut ser).expect("report serializes");
        String::from_utf8(buf).expect("json is utf-8")
    }

    pub fn from_json(text: &str) -> serde_json::Result<Report> {
        serde_json::from_str(text)
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ =
            writeln!(out, "{} {}  [mode {}, degree {}, tol {:e}]", self.command, self.target, self.mode.as_str(), self.degree, self.tol);
        let full = self.command == "report";
        for (idx, p) in self.points.iter().enumerate() {
            let coords: Vec<String> = p.point.iter().map(|v| fmt_num(*v)).collect();
            let _ = writeln!(out, "\npoint {}: ({})", idx + 1, coords.join(", "));
            if full {
                write_tables(&mut out, p);
            }
            let _ = writeln!(out, "  scalar curvature r = {}", fmt_num(p.scalar_curvature));
            for (group, entries) in p.checks.groups() {
                let worst = entries.iter().map(|e| e.1).fold(0.0, f64::max);
                let _ = writeln!(out, "  {group}: max defect {}", fmt_num(worst));
                if full {
                    for (name, v) in entries {
                        let _ = writeln!(out, "    {name} = {}", fmt_num(v));
                    }
                }
            }
            if let Some(s) = &p.soliton {
                let _ = writeln!(
                    out,
                    "  soliton fit: lambda = {}, mu = {}, residual = {} (max component {})",
                    fmt_num(s.lambda),
                    fmt_num(s.mu),
                    fmt_num(s.residual),
                    fmt_num(s.residual_max)
                );
            }
            if let Some(c) = &p.classification {
                write_classification(&mut out, c, "  ");
            }
        }
        if let Some(s) = &self.soliton {
            let _ = writeln!(out, "\nsoliton over {} point(s):", s.per_point.len());
            let _ = writeln!(out, "  lambda = {}, mu = {}, lambda + mu = {}", fmt_num(s.lambda), fmt_num(s.mu), fmt_num(s.lambda + s.mu));
            let _ = writeln!(
                out,
                "  residual = {} (max component {}), spread = {}",
                fmt_num(s.residual),
                fmt_num(s.residual_max),
                fmt_num(s.spread)
            );
            let verdict = if s.is_soliton { "eta-Ricci soliton" } else { "not a global soliton" };
            let _ = writeln!(out, "  {}: {verdict}", s.description());
        }
        if let Some(c) = &self.classification {
            let _ = writeln!(out, "\nclassification over {} point(s):", self.points.len());
            write_classification(&mut out, c, "  ");
        }
        if let Some(a) = &self.audit {
            let _ = writeln!(out, "\nrandom audit: {} frame(s), seed {}", a.count, a.seed);
        }
        let _ = writeln!(out, "\nverdicts:");
        for v in &self.verdicts {
            let status = if v.pass { "PASS" } else { "FAIL" };
            let note = if v.gating { "" } else { "  (informational)" };
            let _ = writeln!(out, "  {status} {:<40} {} <= {:e}{note}", v.name, fmt_num(v.value), v.threshold);
        }
        let _ = writeln!(out, "exit code {}", self.exit_code);
        out
    }
}

fn write_classification(out: &mut String, c: &ClassificationReport, indent: &str) {
    let opt = |v: Option<f64>| v.map(fmt_num).unwrap_or_else(|| "n/a".into());
    let _ = writeln!(out, "{indent}codazzi defect = {}", fmt_num(c.codazzi_defect));
    let _ = writeln!(out, "{indent}cyclic-parallel defect = {}", fmt_num(c.cyclic_defect));
    let _ = writeln!(out, "{indent}nabla S closed-form defect = {}", opt(c.nabla_s_closed_form_defect));
    let _ = writeln!(out, "{indent}phi-Ricci defect = {}", opt(c.phi_ricci_defect));
    let _ = writeln!(out, "{indent}R.R = Q(S,R) defect = {}", fmt_num(c.rr_qsr_defect));
    let _ = writeln!(out, "{indent}Einstein defect = {}", fmt_num(c.einstein_defect));
    if let Some(sf) = &c.space_form {
        let label = c.verdicts.space_form.as_deref().unwrap_or("none");
        let _ = writeln!(out, "{indent}space form: kappa = {}, defect = {}, verdict {label}", fmt_num(sf.kappa), fmt_num(sf.defect));
    }
}

fn write_tables(out: &mut String, p: &PointReport) {
    let n = p.ricci.len();
    let _ = writeln!(out, "  brackets [e_i, e_j] = c^k_ij e_k (nonzero, i < j):");
    for i in 0..n {
        for j in (i + 1)..n {
            for k in 0..n {
                let v = p.structure[k][i][j];
                if v != 0.0 {
                    let _ = writeln!(out, "    c^{}_{}{} = {}", k + 1, i + 1, j + 1, fmt_num(v));
                }
            }
        }
    }
    let _ = writeln!(out, "  connection nabla_(e_i) e_j = Gamma^k_ij e_k (nonzero):");
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                let v = p.gamma[k][i][j];
                if v != 0.0 {
                    let _ = writeln!(out, "    Gamma^{}_{}{} = {}", k + 1, i + 1, j + 1, fmt_num(v));
                }
            }
        }
    }
    let _ = writeln!(out, "  curvature R(e_i, e_j) e_k = R^l_kij e_l (nonzero, i < j):");
    for i in 0..n {
        for j in (i + 1)..n {
            for k in 0..n {
                for l in 0..n {
                    let v = p.riemann[l][k][i][j];
                    if v != 0.0 {
                        let _ = writeln!(out, "    R^{}_{}{}{} = {}", l + 1, k + 1, i + 1, j + 1, fmt_num(v));
                    }
                }
            }
        }
    }
    let _ = writeln!(out, "  Ricci tensor S(e_i, e_j):");
    for row in &p.ricci {
        let cells: Vec<String> = row.iter().map(|v| format!("{:>12}", fmt_num(*v))).collect();
        let _ = writeln!(out, "    {}", cells.join(" "));
    }
}

/// Shortest round-tripping representation; scientific outside `[1e-4, 1e6)`, `-0` as `0`.
pub fn fmt_num(v: f64) -> String {
    if v == 0.0 {
        "0".into()
    } else if (1e-4..1e6).contains(&v.abs()) {
        format!("{v}")
    } else {
        format!("{v:e}")
    }
}
