//! η-Ricci solitons `£_V g + 2S + 2λg + 2μ η⊗η = 0`.
//!
//! `λ` and `μ` are fitted pointwise by least squares over the independent
//! components `i ≤ j`; constancy across points is judged by the spread.

use ndarray::Array2;

use crate::contact::ContactPoint;
use crate::expr::Expr;
use crate::frame::{covariant_derivative, CurvaturePack, FramePointData, GeometryError, TensorField};
use crate::jet::{Jet, JetError};
use crate::scalar::{max_abs, Scalar};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum SolitonError {
    #[error("least-squares design matrix is rank deficient (η⊗η parallel to g)")]
    RankDeficientFit,
    #[error("potential V = ξ needs a contact block")]
    MissingContact,
    #[error(transparent)]
    Geometry(#[from] GeometryError),
}

impl From<JetError> for SolitonError {
    fn from(e: JetError) -> Self {
        SolitonError::Geometry(e.into())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MuMode {
    Free,
    FrozenZero,
}

/// The soliton potential `V`.
#[derive(Debug, Clone, PartialEq)]
pub enum Potential {
    Xi,
    /// Frame components.
    Field(Vec<Expr>),
}

impl Potential {
    pub fn evaluate<S: Scalar>(&self, cs: Option<&ContactPoint<S>>, fd: &FramePointData<S>) -> Result<Vec<Jet<S>>, SolitonError> {
        match self {
            Potential::Xi => cs.map(|c| c.xi.clone()).ok_or(SolitonError::MissingContact),
            Potential::Field(components) => {
                if components.len() != fd.dim() {
                    return Err(GeometryError::DimensionMismatch { expected: fd.dim(), got: components.len() }.into());
                }
                components.iter().map(|e| e.to_jet(&fd.point, fd.degree).map_err(|e| GeometryError::from(e).into())).collect()
            }
        }
    }
}

/// `(£_V g)(e_i, e_j) = g(∇_{e_i} V, e_j) + g(e_i, ∇_{e_j} V)`.
pub fn lie_derivative_metric<S: Scalar>(
    v: &[Jet<S>],
    fd: &FramePointData<S>,
    pack: &CurvaturePack<S>,
) -> Result<Array2<Jet<S>>, SolitonError> {
    let n = fd.dim();
    let dv = covariant_derivative(&TensorField::vector(v), fd, &pack.connection)?;
    // lowered[[a, j]] = g(∇_{e_a} V, e_j)
    let lowered = Array2::from_shape_fn((n, n), |(a, j)| {
        let mut acc = fd.zero();
        for m in 0..n {
            acc = &acc + &(&dv.components[[a, m].as_slice()] * &fd.metric[[m, j]]);
        }
        acc
    });
    Ok(Array2::from_shape_fn((n, n), |(i, j)| &lowered[[i, j]] + &lowered[[j, i]]))
}

fn eta_or_zero<S: Scalar>(cs: Option<&ContactPoint<S>>, n: usize) -> Vec<S> {
    cs.map(|c| c.eta_values()).unwrap_or_else(|| vec![S::zero(); n])
}

/// Components `(£_V g)_ij + 2S_ij + 2λ g_ij + 2μ η_i η_j` for `i ≤ j`.
fn residual_components<S: Scalar>(
    lie: &Array2<S>,
    lambda: &S,
    mu: &S,
    eta: &[S],
    fd: &FramePointData<S>,
    pack: &CurvaturePack<S>,
) -> Vec<S> {
    let n = fd.dim();
    let two = S::from_i64(2);
    let mut out = Vec::with_capacity(n * (n + 1) / 2);
    for i in 0..n {
        for j in i..n {
            let v = lie[[i, j]].clone()
                + two.clone() * pack.ricci[[i, j]].value()
                + two.clone() * lambda * fd.metric[[i, j]].value()
                + two.clone() * mu * &eta[i] * &eta[j];
            out.push(v);
        }
    }
    out
}

/// Max-abs component of the soliton equation at given `(λ, μ)`.
/// Without a contact block the `μ` term vanishes.
pub fn soliton_residual<S: Scalar>(
    lambda: &S,
    mu: &S,
    v: &[Jet<S>],
    cs: Option<&ContactPoint<S>>,
    fd: &FramePointData<S>,
    pack: &CurvaturePack<S>,
) -> Result<f64, SolitonError> {
    let lie = lie_derivative_metric(v, fd, pack)?.map(|j| j.value().clone());
    let eta = eta_or_zero(cs, fd.dim());
    Ok(max_abs(&residual_components(&lie, lambda, mu, &eta, fd, pack)))
}

/// Least-squares fit at a single point.
#[derive(Debug, Clone, PartialEq)]
pub struct PointFit<S> {
    pub lambda: S,
    pub mu: S,
    /// Mean of the squared residual components (exact in rational mode).
    pub mean_square: S,
    pub residual_rms: f64,
    pub residual_max: f64,
}

/// Without a contact block there is no `η`, so the fit is a plain Ricci soliton (`μ = 0`).
pub fn fit_soliton<S: Scalar>(
    v: &[Jet<S>],
    cs: Option<&ContactPoint<S>>,
    fd: &FramePointData<S>,
    pack: &CurvaturePack<S>,
    mu_mode: MuMode,
) -> Result<PointFit<S>, SolitonError> {
    let mu_mode = if cs.is_none() { MuMode::FrozenZero } else { mu_mode };
    let n = fd.dim();
    let lie = lie_derivative_metric(v, fd, pack)?.map(|j| j.value().clone());
    let eta = eta_or_zero(cs, n);
    let two = S::from_i64(2);
    // columns a = 2g_ij, b = 2η_iη_j; target t = −(£_V g + 2S)_ij
    let (mut aa, mut ab, mut bb, mut at, mut bt) = (S::zero(), S::zero(), S::zero(), S::zero(), S::zero());
    for i in 0..n {
        for j in i..n {
            let a = two.clone() * fd.metric[[i, j]].value();
            let b = two.clone() * &eta[i] * &eta[j];
            let t = -(lie[[i, j]].clone() + two.clone() * pack.ricci[[i, j]].value());
            aa = aa + a.clone() * &a;
            ab = ab + a.clone() * &b;
            bb = bb + b.clone() * &b;
            at = at + a * &t;
            bt = bt + b * &t;
        }
    }
    let (lambda, mu) = match mu_mode {
        MuMode::FrozenZero => {
            if aa.is_zero() {
                return Err(SolitonError::RankDeficientFit);
            }
            (at.checked_div(&aa)?, S::zero())
        }
        MuMode::Free => {
            let det = aa.clone() * &bb - ab.clone() * &ab;
            if det.is_zero() || (S::MODE == crate::Mode::Float && det.abs().to_f64() <= 1e-12 * (aa.to_f64() * bb.to_f64()).max(1e-300)) {
                return Err(SolitonError::RankDeficientFit);
            }
            let lambda = (bb * &at - ab.clone() * &bt).checked_div(&det)?;
            let mu = (aa * &bt - ab * &at).checked_div(&det)?;
            (lambda, mu)
        }
    };
    let components = residual_components(&lie, &lambda, &mu, &eta, fd, pack);
    let mut sum_sq = S::zero();
    for c in &components {
        sum_sq = sum_sq + c.clone() * c;
    }
    let mean_square = sum_sq.checked_div(&S::from_i64(components.len() as i64))?;
    Ok(PointFit { residual_rms: mean_square.to_f64().max(0.0).sqrt(), residual_max: max_abs(&components), lambda, mu, mean_square })
}

/// `λ` and `μ` forced by the 3-dimensional Kenmotsu Ricci formula at scalar curvature `r`.
pub fn soliton_from_scalar<S: Scalar>(r: &S) -> (S, S) {
    let half = S::from_ratio(1, 2).expect("nonzero denominator");
    let lambda = -((r.clone() + &S::from_i64(2)) * &half) - S::one();
    let mu = (r.clone() + &S::from_i64(6)) * &half + S::one();
    (lambda, mu)
}

#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct PointRecord {
    pub point: Vec<f64>,
    pub lambda: f64,
    pub mu: f64,
    pub residual: f64,
    pub residual_max: f64,
}

/// Fits aggregated over sample points.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct SolitonFit {
    pub lambda: f64,
    pub mu: f64,
    /// Worst RMS residual over the points.
    pub residual: f64,
    /// Worst max-abs residual component over the points.
    pub residual_max: f64,
    pub per_point: Vec<PointRecord>,
    /// Max over point pairs of `|Δλ| + |Δμ|`.
    pub spread: f64,
    pub label: String,
    pub proper: bool,
    pub is_soliton: bool,
}

impl SolitonFit {
    pub fn aggregate<S: Scalar>(fits: &[(Vec<S>, PointFit<S>)], tol: f64) -> SolitonFit {
        let per_point: Vec<PointRecord> = fits
            .iter()
            .map(|(p, f)| PointRecord {
                point: p.iter().map(Scalar::to_f64).collect(),
                lambda: f.lambda.to_f64(),
                mu: f.mu.to_f64(),
                residual: f.residual_rms,
                residual_max: f.residual_max,
            })
            .collect();
        let count = per_point.len().max(1) as f64;
        let lambda = per_point.iter().map(|r| r.lambda).sum::<f64>() / count;
        let mu = per_point.iter().map(|r| r.mu).sum::<f64>() / count;
        let residual = per_point.iter().map(|r| r.residual).fold(0.0, f64::max);
        let residual_max = per_point.iter().map(|r| r.residual_max).fold(0.0, f64::max);
        let mut spread = 0.0_f64;
        for (i, p) in per_point.iter().enumerate() {
            for q in &per_point[i + 1..] {
                spread = spread.max((p.lambda - q.lambda).abs() + (p.mu - q.mu).abs());
            }
        }
        SolitonFit {
            label: classify_lambda(lambda, tol).to_string(),
            proper: mu.abs() > tol,
            is_soliton: residual_max <= tol && spread <= tol,
            lambda,
            mu,
            residual,
            residual_max,
            per_point,
            spread,
        }
    }

    /// e.g. `expanding, proper`.
    pub fn description(&self) -> String {
        if self.proper {
            format!("{}, proper", self.label)
        } else {
            self.label.clone()
        }
    }
}

pub fn classify_lambda(lambda: f64, tol: f64) -> &'static str {
    if lambda.abs() <= tol {
        "steady"
    } else if lambda < 0.0 {
        "shrinking"
    } else {
        "expanding"
    }
}
