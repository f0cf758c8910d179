//! Riemannian geometry in a moving frame.
//!
//! A frame `e_1..e_n` is given either by coordinate coefficients
//! `e_i = Σ_m a_i^m ∂_m` over a chart, or directly by constant structure
//! constants `[e_i, e_j] = c^k_ij e_k` (left-invariant frames on a Lie group).
//! The metric is given by its frame components `g_ij` (identity by default).
//!
//! Index conventions used by every array in this module:
//!
//! | array          | index order   | meaning                          |
//! |----------------|---------------|----------------------------------|
//! | `frame`        | `[i, m]`      | `a_i^m`                          |
//! | `frame_inv`    | `[m, k]`      | `∂_m = Σ_k frame_inv[m,k] e_k`   |
//! | `structure`    | `[k, i, j]`   | `c^k_ij`                         |
//! | `gamma`        | `[k, i, j]`   | `∇_{e_i} e_j = Γ^k_ij e_k`       |
//! | `riemann`      | `[l, k, i, j]`| `R(e_i,e_j)e_k = R^l_kij e_l`    |
//! | `riemann_low`  | `[i, j, k, l]`| `g(R(e_i,e_j)e_k, e_l)`          |

mod connection;
mod covariant;
mod identities;

use ndarray::{Array2, Array3};

use crate::expr::{Chart, Expr, ExprError};
use crate::jet::{Jet, JetError};
use crate::scalar::Scalar;
use crate::Rational;

pub use connection::{curvature, levi_civita, Connection, CurvaturePack};
pub use covariant::{covariant_derivative, Slot, TensorField};
pub use identities::{decomposition_3d_defect, identity_suite, IdentityDefects};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum GeometryError {
    #[error("frame is singular at the point (|det| = {det:e})")]
    SingularFrame { det: f64 },
    #[error("metric is not positive definite at the point (leading minor {minor} = {value:e})")]
    MetricNotPositiveDefinite { minor: usize, value: f64 },
    #[error("structure constants are not antisymmetric: c^{k}_{i}{j} != -c^{k}_{j}{i}")]
    NotAntisymmetric { k: usize, i: usize, j: usize },
    #[error("structure constants violate the Jacobi identity (component e_{l} of the cyclic sum over ({i},{j},{k}))")]
    JacobiViolated { i: usize, j: usize, k: usize, l: usize },
    #[error("structure constants must be exact constants: {0}")]
    NonConstantStructure(String),
    #[error("expected {expected} entries, found {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("{0} requires a 3-dimensional frame")]
    RequiresDim3(&'static str),
    #[error(transparent)]
    Expr(#[from] ExprError),
    #[error(transparent)]
    Jet(#[from] JetError),
}

#[derive(Debug, Clone, PartialEq)]
pub enum FrameKind {
    /// Row `i` holds the coordinate coefficients of `e_i`.
    Chart(Vec<Vec<Expr>>),
    /// `[k, i, j] = c^k_ij`, antisymmetric in `(i, j)`.
    Structure(Array3<Expr>),
}

#[derive(Debug, Clone, PartialEq)]
pub enum MetricSpec {
    Orthonormal,
    /// Symmetric matrix of frame components `g(e_i, e_j)`.
    Entries(Vec<Vec<Expr>>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct FrameSpec {
    pub chart: Chart,
    pub kind: FrameKind,
    pub metric: MetricSpec,
}

impl FrameSpec {
    pub fn chart_frame(chart: Chart, coeffs: Vec<Vec<Expr>>) -> Result<FrameSpec, GeometryError> {
        let n = chart.dim();
        check_square(&coeffs, n)?;
        Ok(FrameSpec { chart, kind: FrameKind::Chart(coeffs), metric: MetricSpec::Orthonormal })
    }

    /// Validates antisymmetry and the Jacobi identity exactly.
    pub fn structure_constants(chart: Chart, constants: Array3<Expr>) -> Result<FrameSpec, GeometryError> {
        let n = chart.dim();
        if constants.dim() != (n, n, n) {
            return Err(GeometryError::DimensionMismatch { expected: n * n * n, got: constants.len() });
        }
        let mut c = Array3::<Rational>::from_elem((n, n, n), Rational::zero());
        for ((k, i, j), e) in constants.indexed_iter() {
            c[[k, i, j]] = e.eval_constant::<Rational>().map_err(|_| GeometryError::NonConstantStructure(e.to_string()))?;
        }
        for k in 0..n {
            for i in 0..n {
                for j in 0..n {
                    if c[[k, i, j]] != -c[[k, j, i]].clone() {
                        return Err(GeometryError::NotAntisymmetric { k, i, j });
                    }
                }
            }
        }
        check_jacobi(&c)?;
        Ok(FrameSpec { chart, kind: FrameKind::Structure(constants), metric: MetricSpec::Orthonormal })
    }

    pub fn with_metric(mut self, metric: MetricSpec) -> Result<FrameSpec, GeometryError> {
        if let MetricSpec::Entries(rows) = &metric {
            check_square(rows, self.dim())?;
        }
        self.metric = metric;
        Ok(self)
    }

    pub fn dim(&self) -> usize {
        self.chart.dim()
    }
}

fn check_square(rows: &[Vec<Expr>], n: usize) -> Result<(), GeometryError> {
    if rows.len() != n {
        return Err(GeometryError::DimensionMismatch { expected: n, got: rows.len() });
    }
    for row in rows {
        if row.len() != n {
            return Err(GeometryError::DimensionMismatch { expected: n, got: row.len() });
        }
    }
    Ok(())
}

/// `Σ_cyclic [[e_i, e_j], e_k] = 0`, expanded in structure constants.
pub fn check_jacobi(c: &Array3<Rational>) -> Result<(), GeometryError> {
    let n = c.dim().0;
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                for l in 0..n {
                    let mut total = Rational::zero();
                    for m in 0..n {
                        total = total
                            + c[[m, i, j]].clone() * &c[[l, m, k]]
                            + c[[m, j, k]].clone() * &c[[l, m, i]]
                            + c[[m, k, i]].clone() * &c[[l, m, j]];
                    }
                    if !Scalar::is_zero(&total) {
                        return Err(GeometryError::JacobiViolated { i, j, k, l });
                    }
                }
            }
        }
    }
    Ok(())
}

/// Frame data evaluated as jets at a single point.
#[derive(Debug, Clone)]
pub struct FramePointData<S> {
    pub point: Vec<S>,
    pub degree: usize,
    pub frame: Array2<Jet<S>>,
    pub frame_inv: Array2<Jet<S>>,
    pub structure: Array3<Jet<S>>,
    pub metric: Array2<Jet<S>>,
    pub metric_inv: Array2<Jet<S>>,
    pub orthonormal: bool,
}

impl<S: Scalar> FramePointData<S> {
    pub fn dim(&self) -> usize {
        self.frame.nrows()
    }

    /// `e_i(f)`, the derivative of `f` along frame vector `i`.
    pub fn derive(&self, f: &Jet<S>, i: usize) -> Result<Jet<S>, JetError> {
        let row: Vec<Jet<S>> = self.frame.row(i).to_vec();
        f.directional_derivative(&row)
    }

    pub fn constant(&self, value: S) -> Jet<S> {
        Jet::constant(value, self.point.len(), self.degree)
    }

    pub fn zero(&self) -> Jet<S> {
        self.constant(S::zero())
    }

    /// `g(X, Y)` for frame-component vectors at value level.
    pub fn inner(&self, x: &[S], y: &[S]) -> S {
        let n = self.dim();
        let mut acc = S::zero();
        for i in 0..n {
            if x[i].is_zero() {
                continue;
            }
            for j in 0..n {
                acc = acc + x[i].clone() * &y[j] * self.metric[[i, j]].value();
            }
        }
        acc
    }
}

pub fn evaluate_frame<S: Scalar>(spec: &FrameSpec, point: &[S], degree: usize) -> Result<FramePointData<S>, GeometryError> {
    spec.chart.check_point(point)?;
    let n = spec.dim();
    let nv = point.len();
    let identity = || Array2::from_shape_fn((n, n), |(i, j)| Jet::constant(if i == j { S::one() } else { S::zero() }, nv, degree));

    let (frame, frame_inv, structure) = match &spec.kind {
        FrameKind::Chart(rows) => {
            let mut frame = Array2::from_elem((n, n), Jet::zero(nv, degree));
            for (i, row) in rows.iter().enumerate() {
                for (m, e) in row.iter().enumerate() {
                    frame[[i, m]] = e.to_jet(point, degree)?;
                }
            }
            check_frame_determinant(&frame)?;
            let frame_inv = invert(&frame).map_err(|_| GeometryError::SingularFrame { det: 0.0 })?;
            let rows: Vec<Vec<Jet<S>>> = (0..n).map(|i| frame.row(i).to_vec()).collect();
            // [e_i, e_j]^m = e_i(a_j^m) - e_j(a_i^m), then c^k_ij = Σ_m [e_i,e_j]^m (A^-1)_m^k
            let diagonal = Jet::zero(nv, degree).with_valid_order(degree.saturating_sub(1));
            let mut structure = Array3::from_elem((n, n, n), diagonal);
            for i in 0..n {
                for j in (i + 1)..n {
                    let bracket: Vec<Jet<S>> = (0..n)
                        .map(|m| Ok(&frame[[j, m]].directional_derivative(&rows[i])? - &frame[[i, m]].directional_derivative(&rows[j])?))
                        .collect::<Result<_, JetError>>()?;
                    for k in 0..n {
                        let mut c = Jet::zero(nv, degree);
                        for m in 0..n {
                            c = &c + &(&bracket[m] * &frame_inv[[m, k]]);
                        }
                        structure[[k, j, i]] = -&c;
                        structure[[k, i, j]] = c;
                    }
                }
            }
            (frame, frame_inv, structure)
        }
        FrameKind::Structure(constants) => {
            let structure = constants
                .map(|e| e.eval_constant::<S>().map(|v| Jet::constant(v, nv, degree)))
                .into_iter()
                .collect::<Result<Vec<_>, _>>()?;
            let structure = Array3::from_shape_vec((n, n, n), structure).expect("shape preserved");
            (identity(), identity(), structure)
        }
    };

    let (metric, metric_inv, orthonormal) = match &spec.metric {
        MetricSpec::Orthonormal => (identity(), identity(), true),
        MetricSpec::Entries(rows) => {
            let mut metric = Array2::from_elem((n, n), Jet::zero(nv, degree));
            for i in 0..n {
                for j in 0..n {
                    // only the upper triangle is read; symmetry by construction
                    let (a, b) = if i <= j { (i, j) } else { (j, i) };
                    metric[[i, j]] = rows[a][b].to_jet(point, degree)?;
                }
            }
            check_positive_definite(&metric)?;
            let inv = invert(&metric).map_err(|_| GeometryError::MetricNotPositiveDefinite { minor: n, value: 0.0 })?;
            (metric, inv, false)
        }
    };

    Ok(FramePointData { point: point.to_vec(), degree, frame, frame_inv, structure, metric, metric_inv, orthonormal })
}

/// Determinant of the leading `size × size` block of value-level entries.
pub fn determinant<S: Scalar>(m: &Array2<S>) -> S {
    let n = m.nrows();
    let mut a = m.clone();
    let mut det = S::one();
    for col in 0..n {
        let pivot = (col..n).max_by(|&x, &y| a[[x, col]].abs().partial_cmp(&a[[y, col]].abs()).unwrap_or(std::cmp::Ordering::Equal));
        let Some(p) = pivot.filter(|&p| !a[[p, col]].is_zero()) else {
            return S::zero();
        };
        if p != col {
            for k in 0..n {
                a.swap([p, k], [col, k]);
            }
            det = -det;
        }
        let piv = a[[col, col]].clone();
        det = det * &piv;
        for r in (col + 1)..n {
            let factor = a[[r, col]].checked_div(&piv).expect("nonzero pivot");
            if factor.is_zero() {
                continue;
            }
            for k in col..n {
                let v = a[[col, k]].clone() * &factor;
                a[[r, k]] = a[[r, k]].clone() - v;
            }
        }
    }
    det
}

fn check_frame_determinant<S: Scalar>(frame: &Array2<Jet<S>>) -> Result<(), GeometryError> {
    let n = frame.nrows();
    let values = frame.map(|j| j.value().clone());
    let det = determinant(&values);
    let singular = match S::MODE {
        crate::Mode::Rational => det.is_zero(),
        crate::Mode::Float => {
            let scale = (0..n).map(|i| values.row(i).iter().map(|v| v.to_f64().powi(2)).sum::<f64>().sqrt()).fold(0.0, f64::max);
            det.to_f64().abs() < 1e-10 * scale.powi(n as i32) || det.is_zero()
        }
    };
    if singular {
        return Err(GeometryError::SingularFrame { det: det.to_f64() });
    }
    Ok(())
}

fn check_positive_definite<S: Scalar>(metric: &Array2<Jet<S>>) -> Result<(), GeometryError> {
    let n = metric.nrows();
    for size in 1..=n {
        let block = Array2::from_shape_fn((size, size), |(i, j)| metric[[i, j]].value().clone());
        let minor = determinant(&block);
        if minor <= S::zero() {
            return Err(GeometryError::MetricNotPositiveDefinite { minor: size, value: minor.to_f64() });
        }
    }
    Ok(())
}

/// Gauss–Jordan inverse of a jet matrix, pivoting on the largest value.
pub fn invert<S: Scalar>(m: &Array2<Jet<S>>) -> Result<Array2<Jet<S>>, JetError> {
    let n = m.nrows();
    let template = &m[[0, 0]];
    let mut a = m.clone();
    let mut inv = Array2::from_shape_fn((n, n), |(i, j)| template.constant_like(if i == j { S::one() } else { S::zero() }));
    for col in 0..n {
        let p = (col..n)
            .max_by(|&x, &y| a[[x, col]].value().abs().partial_cmp(&a[[y, col]].value().abs()).unwrap_or(std::cmp::Ordering::Equal))
            .expect("non-empty range");
        if a[[p, col]].value().is_zero() {
            return Err(JetError::DivisionByZeroAtPoint);
        }
        if p != col {
            for k in 0..n {
                a.swap([p, k], [col, k]);
                inv.swap([p, k], [col, k]);
            }
        }
        let pivot_inv = a[[col, col]].recip()?;
        for k in 0..n {
            a[[col, k]] = &a[[col, k]] * &pivot_inv;
            inv[[col, k]] = &inv[[col, k]] * &pivot_inv;
        }
        for r in 0..n {
            if r == col || a[[r, col]].is_zero() {
                continue;
            }
            let factor = a[[r, col]].clone();
            for k in 0..n {
                a[[r, k]] = &a[[r, k]] - &(&factor * &a[[col, k]]);
                inv[[r, k]] = &inv[[r, k]] - &(&factor * &inv[[col, k]]);
            }
        }
    }
    Ok(inv)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parse;

    fn xyz() -> Chart {
        Chart::new(["x", "y", "z"]).unwrap()
    }

    fn q(n: i64) -> Rational {
        Rational::from_i64(n)
    }

    fn exprs(chart: &Chart, rows: &[[&str; 3]]) -> Vec<Vec<Expr>> {
        rows.iter().map(|r| r.iter().map(|t| parse(t, chart).unwrap()).collect()).collect()
    }

    #[test]
    fn section_seven_brackets() {
        let chart = xyz().with_constraint("z > 0").unwrap();
        let coeffs = exprs(&chart, &[["z", "0", "0"], ["0", "z", "0"], ["0", "0", "-z"]]);
        let spec = FrameSpec::chart_frame(chart, coeffs).unwrap();
        let fd = evaluate_frame(&spec, &[q(1), q(1), q(1)], 4).unwrap();
        for k in 0..3 {
            for i in 0..3 {
                for j in 0..3 {
                    let expected = match (k, i, j) {
                        (0, 0, 2) | (1, 1, 2) => q(1),
                        (0, 2, 0) | (1, 2, 1) => q(-1),
                        _ => q(0),
                    };
                    assert_eq!(*fd.structure[[k, i, j]].value(), expected, "c^{k}_{i}{j}");
                }
            }
        }
    }

    #[test]
    fn inverse_times_frame_is_identity() {
        let chart = xyz();
        let coeffs = exprs(&chart, &[["1 + x*y", "z", "0"], ["y^2", "2", "x"], ["0", "1/3", "1 + z^2"]]);
        let spec = FrameSpec::chart_frame(chart, coeffs).unwrap();
        let fd = evaluate_frame(&spec, &[Rational::from_ratio(1, 2).unwrap(), q(1), q(-1)], 3).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                let mut acc = fd.zero();
                for m in 0..3 {
                    acc = &acc + &(&fd.frame[[i, m]] * &fd.frame_inv[[m, j]]);
                }
                let expected = fd.constant(if i == j { q(1) } else { q(0) });
                assert_eq!(acc, expected);
            }
        }
    }

    #[test]
    fn flat_frame_has_no_structure() {
        let chart = xyz();
        let coeffs = exprs(&chart, &[["1", "0", "0"], ["0", "1", "0"], ["0", "0", "1"]]);
        let spec = FrameSpec::chart_frame(chart, coeffs).unwrap();
        let fd = evaluate_frame(&spec, &[0.3, -1.0, 2.0], 4).unwrap();
        assert!(fd.structure.iter().all(Jet::is_zero));
    }

    #[test]
    fn singular_frame_is_rejected() {
        let chart = xyz();
        let coeffs = exprs(&chart, &[["z", "0", "0"], ["0", "1", "0"], ["0", "0", "1"]]);
        let spec = FrameSpec::chart_frame(chart, coeffs).unwrap();
        assert!(matches!(evaluate_frame(&spec, &[q(1), q(1), q(0)], 2), Err(GeometryError::SingularFrame { .. })));
        assert!(matches!(evaluate_frame(&spec, &[1.0, 1.0, 1e-12], 2), Err(GeometryError::SingularFrame { .. })));
    }

    #[test]
    fn point_outside_domain() {
        let chart = xyz().with_constraint("z > 0").unwrap();
        let coeffs = exprs(&chart, &[["z", "0", "0"], ["0", "z", "0"], ["0", "0", "-z"]]);
        let spec = FrameSpec::chart_frame(chart, coeffs).unwrap();
        assert!(matches!(evaluate_frame(&spec, &[1.0, 1.0, -1.0], 2), Err(GeometryError::Expr(ExprError::PointOutsideDomain { .. }))));
    }

    fn structure(entries: &[((usize, usize, usize), i64)]) -> Array3<Expr> {
        let mut c = Array3::from_elem((3, 3, 3), Expr::int(0));
        for &((k, i, j), v) in entries {
            c[[k, i, j]] = Expr::int(v);
            c[[k, j, i]] = Expr::int(-v);
        }
        c
    }

    #[test]
    fn sphere_structure_constants_pass_jacobi() {
        // [e1,e2] = 2e3, [e2,e3] = 2e1, [e3,e1] = 2e2
        let c = structure(&[((2, 0, 1), 2), ((0, 1, 2), 2), ((1, 2, 0), 2)]);
        let spec = FrameSpec::structure_constants(xyz(), c).unwrap();
        let fd = evaluate_frame(&spec, &[q(0), q(0), q(0)], 2).unwrap();
        assert_eq!(*fd.structure[[2, 0, 1]].value(), q(2));
        assert_eq!(*fd.structure[[0, 2, 1]].value(), q(-2));
    }

    #[test]
    fn jacobi_violation_is_reported() {
        // [e1,e2] = e3, [e1,e3] = e1: the cyclic sum over (1,2,3) leaves -e3
        let c = structure(&[((2, 0, 1), 1), ((0, 0, 2), 1)]);
        assert!(matches!(FrameSpec::structure_constants(xyz(), c), Err(GeometryError::JacobiViolated { .. })));
        // a solvable algebra: [e2,e3] = e1, [e1,e3] = e2 satisfies Jacobi
        let ok = structure(&[((0, 1, 2), 1), ((1, 0, 2), 1)]);
        assert!(FrameSpec::structure_constants(xyz(), ok).is_ok());
    }

    #[test]
    fn non_antisymmetric_constants_are_rejected() {
        let mut c = Array3::from_elem((3, 3, 3), Expr::int(0));
        c[[0, 1, 2]] = Expr::int(1);
        assert!(matches!(FrameSpec::structure_constants(xyz(), c), Err(GeometryError::NotAntisymmetric { .. })));
    }

    #[test]
    fn indefinite_metric_is_rejected() {
        let chart = xyz();
        let coeffs = exprs(&chart, &[["1", "0", "0"], ["0", "1", "0"], ["0", "0", "1"]]);
        let metric = exprs(&chart, &[["1", "2", "0"], ["2", "1", "0"], ["0", "0", "1"]]);
        let spec = FrameSpec::chart_frame(chart, coeffs).unwrap().with_metric(MetricSpec::Entries(metric)).unwrap();
        assert!(matches!(evaluate_frame(&spec, &[0.0, 0.0, 0.0], 2), Err(GeometryError::MetricNotPositiveDefinite { minor: 2, .. })));
    }
}
