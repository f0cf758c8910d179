//! Curvature conditions on the Ricci tensor and the curvature tensor.
//!
//! Every condition is reported as a continuous max-abs defect over frame
//! components; verdicts threshold those defects at a caller-supplied tolerance.

use ndarray::{Array2, ArrayD};

use crate::contact::ContactPoint;
use crate::frame::{covariant_derivative, CurvaturePack, FramePointData, GeometryError, Slot, TensorField};
use crate::scalar::{max_abs, Scalar};
use crate::soliton::PointFit;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ClassifyError {
    #[error("soliton prerequisite failed: {0}")]
    SolitonPrereqFailed(String),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
}

/// `(∇S)[a, i, j] = (∇_{e_a} S)(e_i, e_j)` at value level.
pub fn nabla_ricci<S: Scalar>(pack: &CurvaturePack<S>, fd: &FramePointData<S>) -> Result<ArrayD<S>, GeometryError> {
    let t = TensorField::from_matrix([Slot::Lower, Slot::Lower], &pack.ricci);
    Ok(covariant_derivative(&t, fd, &pack.connection)?.values())
}

/// `(∇_X S)(Y,Z) − (∇_Y S)(X,Z)` over frame triples.
pub fn codazzi_defect<S: Scalar>(pack: &CurvaturePack<S>, fd: &FramePointData<S>) -> Result<f64, GeometryError> {
    let ds = nabla_ricci(pack, fd)?;
    let n = fd.dim();
    let mut out = Vec::new();
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                out.push(ds[[i, j, k].as_slice()].clone() - &ds[[j, i, k].as_slice()]);
            }
        }
    }
    Ok(max_abs(&out))
}

/// Cyclic sum `(∇_X S)(Y,Z) + (∇_Y S)(Z,X) + (∇_Z S)(X,Y)` over frame triples.
pub fn cyclic_parallel_defect<S: Scalar>(pack: &CurvaturePack<S>, fd: &FramePointData<S>) -> Result<f64, GeometryError> {
    let ds = nabla_ricci(pack, fd)?;
    let n = fd.dim();
    let mut out = Vec::new();
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                out.push(ds[[i, j, k].as_slice()].clone() + &ds[[j, k, i].as_slice()] + &ds[[k, i, j].as_slice()]);
            }
        }
    }
    Ok(max_abs(&out))
}

/// `(∇_Z S)(X,Y) + (μ−1)[g(X,Z)η(Y) + g(Y,Z)η(X) − 2η(X)η(Y)η(Z)]`, using the
/// pointwise fitted `μ`. Needs a contact block and a fit with residual within `tol`.
pub fn nabla_s_closed_form_check<S: Scalar>(
    pack: &CurvaturePack<S>,
    fd: &FramePointData<S>,
    cs: Option<&ContactPoint<S>>,
    fit: &PointFit<S>,
    tol: f64,
) -> Result<f64, ClassifyError> {
    let cs = cs.ok_or_else(|| ClassifyError::SolitonPrereqFailed("no contact structure".into()))?;
    if fit.residual_max > tol {
        return Err(ClassifyError::SolitonPrereqFailed(format!("soliton fit residual {:e} exceeds tolerance {:e}", fit.residual_max, tol)));
    }
    let ds = nabla_ricci(pack, fd)?;
    let n = fd.dim();
    let eta = cs.eta_values();
    let g = fd.metric.map(|j| j.value().clone());
    let mu_minus_one = fit.mu.clone() - S::one();
    let two = S::from_i64(2);
    let mut out = Vec::new();
    for z in 0..n {
        for x in 0..n {
            for y in 0..n {
                let bracket = g[[x, z]].clone() * &eta[y] + g[[y, z]].clone() * &eta[x] - two.clone() * &eta[x] * &eta[y] * &eta[z];
                out.push(ds[[z, x, y].as_slice()].clone() + mu_minus_one.clone() * &bracket);
            }
        }
    }
    Ok(max_abs(&out))
}

/// `∇Q` computed two ways: `[a, i, j] = ((∇_{e_a} Q) e_j)^i`.
pub struct NablaQ<S> {
    /// Raising the first index of `∇S` with the inverse metric.
    pub raised: ArrayD<S>,
    /// Differentiating `Q` as a (1,1) tensor.
    pub direct: ArrayD<S>,
}

pub fn nabla_ricci_operator<S: Scalar>(pack: &CurvaturePack<S>, fd: &FramePointData<S>) -> Result<NablaQ<S>, GeometryError> {
    let n = fd.dim();
    let ds = nabla_ricci(pack, fd)?;
    let ginv = fd.metric_inv.map(|j| j.value().clone());
    let mut raised = ArrayD::from_elem(vec![n, n, n], S::zero());
    for a in 0..n {
        for i in 0..n {
            for j in 0..n {
                let mut acc = S::zero();
                for k in 0..n {
                    acc = acc + ginv[[i, k]].clone() * &ds[[a, k, j].as_slice()];
                }
                raised[[a, i, j].as_slice()] = acc;
            }
        }
    }
    let direct =
        covariant_derivative(&TensorField::from_matrix([Slot::Upper, Slot::Lower], &pack.ricci_operator), fd, &pack.connection)?.values();
    Ok(NablaQ { raised, direct })
}

#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct PhiRicci {
    /// Max-abs frame component of `φ²((∇_{e_i} Q) e_j)`.
    pub defect: f64,
    /// Disagreement between the two `∇Q` paths.
    pub path_gap: f64,
}

pub fn phi_ricci_defect<S: Scalar>(
    pack: &CurvaturePack<S>,
    cs: &ContactPoint<S>,
    fd: &FramePointData<S>,
) -> Result<PhiRicci, GeometryError> {
    let n = fd.dim();
    let nq = nabla_ricci_operator(pack, fd)?;
    let phi = cs.phi_values();
    let phi2 = Array2::from_shape_fn((n, n), |(i, j)| {
        let mut acc = S::zero();
        for k in 0..n {
            acc = acc + phi[[i, k]].clone() * &phi[[k, j]];
        }
        acc
    });
    let mut out = Vec::new();
    let mut gap = Vec::new();
    for a in 0..n {
        for j in 0..n {
            for l in 0..n {
                let mut acc = S::zero();
                for m in 0..n {
                    acc = acc + phi2[[l, m]].clone() * &nq.raised[[a, m, j].as_slice()];
                }
                out.push(acc);
                gap.push(nq.raised[[a, l, j].as_slice()].clone() - &nq.direct[[a, l, j].as_slice()]);
            }
        }
    }
    Ok(PhiRicci { defect: max_abs(&out), path_gap: max_abs(&gap) })
}

/// `(X ∧_A Y)Z = A(Y,Z)X − A(X,Z)Y` for frame-component vectors.
pub fn wedge_endomorphism<S: Scalar>(a: &Array2<S>, x: &[S], y: &[S], z: &[S]) -> Vec<S> {
    let form = |u: &[S], v: &[S]| {
        let mut acc = S::zero();
        for (i, ui) in u.iter().enumerate() {
            if ui.is_zero() {
                continue;
            }
            for (j, vj) in v.iter().enumerate() {
                acc = acc + ui.clone() * vj * &a[[i, j]];
            }
        }
        acc
    };
    let ayz = form(y, z);
    let axz = form(x, z);
    x.iter().zip(y).map(|(xi, yi)| ayz.clone() * xi - axz.clone() * yi).collect()
}

/// `R·R − Q(S,R)` on the (0,4) curvature tensor `R(U,V,W,Z) = g(R(U,V)W, Z)`,
/// over all frame 6-tuples, brute force. An endomorphism `D` acts as a derivation
/// on every slot: `(D·R)(U,V,W,Z) = −R(DU,V,W,Z) − R(U,DV,W,Z) − R(U,V,DW,Z) − R(U,V,W,DZ)`,
/// with `D = R(X,Y)` on the left and `D = X ∧_S Y` on the right.
pub fn rr_qsr_defect<S: Scalar>(pack: &CurvaturePack<S>, fd: &FramePointData<S>) -> f64 {
    let n = fd.dim();
    let s = pack.ricci.map(|j| j.value().clone());
    let e: Vec<Vec<S>> = (0..n).map(|k| (0..n).map(|m| if m == k { S::one() } else { S::zero() }).collect()).collect();
    let r4 = |u: &[S], v: &[S], w: &[S], z: &[S]| fd.inner(&pack.apply(u, v, w), z);
    let derivation = |op: &dyn Fn(&[S]) -> Vec<S>, u: &[S], v: &[S], w: &[S], z: &[S]| -> S {
        -(r4(&op(u), v, w, z) + r4(u, &op(v), w, z) + r4(u, v, &op(w), z) + r4(u, v, w, &op(z)))
    };
    let mut out = Vec::new();
    for x in &e {
        for y in &e {
            let rxy = |z: &[S]| pack.apply(x, y, z);
            let wxy = |z: &[S]| wedge_endomorphism(&s, x, y, z);
            for u in &e {
                for v in &e {
                    for w in &e {
                        for z in &e {
                            out.push(derivation(&rxy, u, v, w, z) - derivation(&wxy, u, v, w, z));
                        }
                    }
                }
            }
        }
    }
    max_abs(&out)
}

#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct SpaceForm {
    /// `r / (n(n−1))`.
    pub kappa: f64,
    /// Max-abs of `R_ijkl − κ(g_jk g_il − g_ik g_jl)` with `R_ijkl = g(R(e_i,e_j)e_k, e_l)`.
    pub defect: f64,
    /// Max-abs of `S − (r/n) g`.
    pub einstein_defect: f64,
}

pub fn space_form_detect<S: Scalar>(pack: &CurvaturePack<S>, fd: &FramePointData<S>) -> Result<SpaceForm, GeometryError> {
    let n = fd.dim();
    if n != 3 {
        return Err(GeometryError::RequiresDim3("space-form detection"));
    }
    let r = pack.scalar_value().clone();
    let kappa = r.checked_div(&S::from_i64(6))?;
    let r_over_n = r.checked_div(&S::from_i64(3))?;
    let g = fd.metric.map(|j| j.value().clone());
    let mut defect = Vec::new();
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                for l in 0..n {
                    let model = kappa.clone() * &(g[[j, k]].clone() * &g[[i, l]] - g[[i, k]].clone() * &g[[j, l]]);
                    defect.push(pack.riemann_low[[i, j, k, l]].value().clone() - model);
                }
            }
        }
    }
    let mut einstein = Vec::new();
    for i in 0..n {
        for j in 0..n {
            einstein.push(pack.ricci[[i, j]].value().clone() - r_over_n.clone() * &g[[i, j]]);
        }
    }
    Ok(SpaceForm { kappa: kappa.to_f64(), defect: max_abs(&defect), einstein_defect: max_abs(&einstein) })
}

#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct Verdicts {
    pub codazzi: bool,
    pub cyclic_parallel: bool,
    pub nabla_s_closed_form: Option<bool>,
    pub phi_ricci_symmetric: Option<bool>,
    pub rr_qsr: bool,
    pub einstein: bool,
    /// `H(-1)`, `constant curvature <κ>`, or `none`.
    pub space_form: Option<String>,
}

#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct ClassificationReport {
    pub codazzi_defect: f64,
    pub cyclic_defect: f64,
    /// `None` when the soliton prerequisite fails.
    pub nabla_s_closed_form_defect: Option<f64>,
    pub phi_ricci_defect: Option<f64>,
    pub nabla_q_path_gap: f64,
    pub rr_qsr_defect: f64,
    pub einstein_defect: f64,
    pub space_form: Option<SpaceForm>,
    /// Max minus min of `κ` over the points folded into this report.
    pub kappa_spread: f64,
    pub verdicts: Verdicts,
}

impl ClassificationReport {
    /// Classification at one point. `fit` is the pointwise `V = ξ` soliton fit, if any.
    pub fn at_point<S: Scalar>(
        pack: &CurvaturePack<S>,
        fd: &FramePointData<S>,
        cs: Option<&ContactPoint<S>>,
        fit: Option<&PointFit<S>>,
        tol: f64,
    ) -> Result<ClassificationReport, GeometryError> {
        let nabla_s_closed_form_defect = match fit {
            Some(fit) => match nabla_s_closed_form_check(pack, fd, cs, fit, tol) {
                Ok(v) => Some(v),
                Err(ClassifyError::SolitonPrereqFailed(_)) => None,
                Err(ClassifyError::Geometry(e)) => return Err(e),
            },
            None => None,
        };
        let (phi_ricci, gap) = match cs {
            Some(cs) => {
                let p = phi_ricci_defect(pack, cs, fd)?;
                (Some(p.defect), p.path_gap)
            }
            None => {
                let nq = nabla_ricci_operator(pack, fd)?;
                let diff: Vec<S> = nq.raised.iter().zip(nq.direct.iter()).map(|(a, b)| a.clone() - b).collect();
                (None, max_abs(&diff))
            }
        };
        let space_form = (fd.dim() == 3).then(|| space_form_detect(pack, fd)).transpose()?;
        let einstein_defect = match &space_form {
            Some(sf) => sf.einstein_defect,
            None => {
                let n = fd.dim();
                let r_over_n = pack.scalar_value().checked_div(&S::from_i64(n as i64)).map_err(GeometryError::from)?;
                let d: Vec<S> =
                    pack.ricci.indexed_iter().map(|((i, j), s)| s.value().clone() - r_over_n.clone() * fd.metric[[i, j]].value()).collect();
                max_abs(&d)
            }
        };
        let mut report = ClassificationReport {
            codazzi_defect: codazzi_defect(pack, fd)?,
            cyclic_defect: cyclic_parallel_defect(pack, fd)?,
            nabla_s_closed_form_defect,
            phi_ricci_defect: phi_ricci,
            nabla_q_path_gap: gap,
            rr_qsr_defect: rr_qsr_defect(pack, fd),
            einstein_defect,
            space_form,
            kappa_spread: 0.0,
            verdicts: Verdicts {
                codazzi: false,
                cyclic_parallel: false,
                nabla_s_closed_form: None,
                phi_ricci_symmetric: None,
                rr_qsr: false,
                einstein: false,
                space_form: None,
            },
        };
        report.verdicts = report.compute_verdicts(tol);
        Ok(report)
    }

    /// Worst case over several points. Optional defects survive only if present at every point.
    pub fn combine(reports: &[ClassificationReport], tol: f64) -> Option<ClassificationReport> {
        let first = reports.first()?;
        let worst = |f: fn(&ClassificationReport) -> f64| reports.iter().map(f).fold(0.0, f64::max);
        let worst_opt =
            |f: fn(&ClassificationReport) -> Option<f64>| reports.iter().map(f).try_fold(0.0, |acc: f64, v| v.map(|v| acc.max(v)));
        let space_form = if reports.iter().all(|r| r.space_form.is_some()) {
            first.space_form.map(|_| {
                let sfs: Vec<SpaceForm> = reports.iter().filter_map(|r| r.space_form).collect();
                SpaceForm {
                    kappa: sfs.iter().map(|s| s.kappa).sum::<f64>() / sfs.len() as f64,
                    defect: sfs.iter().map(|s| s.defect).fold(0.0, f64::max),
                    einstein_defect: sfs.iter().map(|s| s.einstein_defect).fold(0.0, f64::max),
                }
            })
        } else {
            None
        };
        let kappas: Vec<f64> = reports.iter().filter_map(|r| r.space_form.map(|s| s.kappa)).collect();
        let kappa_spread = if kappas.is_empty() {
            0.0
        } else {
            kappas.iter().cloned().fold(f64::MIN, f64::max) - kappas.iter().cloned().fold(f64::MAX, f64::min)
        };
        let mut out = ClassificationReport {
            codazzi_defect: worst(|r| r.codazzi_defect),
            cyclic_defect: worst(|r| r.cyclic_defect),
            nabla_s_closed_form_defect: worst_opt(|r| r.nabla_s_closed_form_defect),
            phi_ricci_defect: worst_opt(|r| r.phi_ricci_defect),
            nabla_q_path_gap: worst(|r| r.nabla_q_path_gap),
            rr_qsr_defect: worst(|r| r.rr_qsr_defect),
            einstein_defect: worst(|r| r.einstein_defect),
            space_form,
            kappa_spread: kappa_spread.max(worst(|r| r.kappa_spread)),
            verdicts: first.verdicts.clone(),
        };
        out.verdicts = out.compute_verdicts(tol);
        Some(out)
    }

    fn compute_verdicts(&self, tol: f64) -> Verdicts {
        let space_form = self.space_form.map(|sf| {
            if sf.defect > tol || self.kappa_spread > tol {
                "none".to_string()
            } else if (sf.kappa + 1.0).abs() <= tol {
                "H(-1)".to_string()
            } else {
                format!("constant curvature {}", sf.kappa)
            }
        });
        Verdicts {
            codazzi: self.codazzi_defect <= tol,
            cyclic_parallel: self.cyclic_defect <= tol,
            nabla_s_closed_form: self.nabla_s_closed_form_defect.map(|d| d <= tol),
            phi_ricci_symmetric: self.phi_ricci_defect.map(|d| d <= tol),
            rr_qsr: self.rr_qsr_defect <= tol,
            einstein: self.einstein_defect <= tol,
            space_form,
        }
    }
}
