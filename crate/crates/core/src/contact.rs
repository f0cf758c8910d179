//! Almost-contact metric structures and the Kenmotsu conditions.
//!
//! `phi[[i, j]]` is `[φ]^i_j`, so `φ(e_j) = Σ_i phi[[i, j]] e_i`. The form `η`
//! is never supplied: it is always `η_i = g(e_i, ξ)`.

use ndarray::Array2;

use crate::expr::Expr;
use crate::frame::{covariant_derivative, CurvaturePack, FramePointData, GeometryError, Slot, TensorField};
use crate::jet::Jet;
use crate::scalar::{max_abs, Scalar};

#[derive(Debug, Clone, PartialEq)]
pub struct ContactSpec {
    /// Rows of `[φ]^i_j`.
    pub phi: Vec<Vec<Expr>>,
    /// Frame components of `ξ`.
    pub xi: Vec<Expr>,
}

/// A contact block evaluated at the frame's point.
#[derive(Debug, Clone)]
pub struct ContactPoint<S> {
    pub phi: Array2<Jet<S>>,
    pub xi: Vec<Jet<S>>,
    pub eta: Vec<Jet<S>>,
}

impl ContactSpec {
    pub fn evaluate<S: Scalar>(&self, fd: &FramePointData<S>) -> Result<ContactPoint<S>, GeometryError> {
        let n = fd.dim();
        if self.xi.len() != n {
            return Err(GeometryError::DimensionMismatch { expected: n, got: self.xi.len() });
        }
        if self.phi.len() != n {
            return Err(GeometryError::DimensionMismatch { expected: n, got: self.phi.len() });
        }
        let mut phi = Array2::from_elem((n, n), fd.zero());
        for (i, row) in self.phi.iter().enumerate() {
            if row.len() != n {
                return Err(GeometryError::DimensionMismatch { expected: n, got: row.len() });
            }
            for (j, e) in row.iter().enumerate() {
                phi[[i, j]] = e.to_jet(&fd.point, fd.degree)?;
            }
        }
        let xi = self.xi.iter().map(|e| e.to_jet(&fd.point, fd.degree)).collect::<Result<Vec<_>, _>>()?;
        let eta = (0..n)
            .map(|i| {
                if fd.orthonormal {
                    return xi[i].clone();
                }
                let mut acc = fd.zero();
                for (j, x) in xi.iter().enumerate() {
                    acc = &acc + &(&fd.metric[[i, j]] * x);
                }
                acc
            })
            .collect();
        Ok(ContactPoint { phi, xi, eta })
    }
}

impl<S: Scalar> ContactPoint<S> {
    pub fn dim(&self) -> usize {
        self.xi.len()
    }

    pub fn phi_values(&self) -> Array2<S> {
        self.phi.map(|j| j.value().clone())
    }

    pub fn xi_values(&self) -> Vec<S> {
        self.xi.iter().map(|j| j.value().clone()).collect()
    }

    pub fn eta_values(&self) -> Vec<S> {
        self.eta.iter().map(|j| j.value().clone()).collect()
    }

    /// Value-level `φX`.
    pub fn apply_phi(&self, x: &[S]) -> Vec<S> {
        let n = self.dim();
        (0..n)
            .map(|i| {
                let mut acc = S::zero();
                for (j, xj) in x.iter().enumerate() {
                    acc = acc + self.phi[[i, j]].value().clone() * xj;
                }
                acc
            })
            .collect()
    }

    /// Value-level `η(X)`.
    pub fn eta_of(&self, x: &[S]) -> S {
        let mut acc = S::zero();
        for (e, xi) in self.eta.iter().zip(x) {
            acc = acc + e.value().clone() * xi;
        }
        acc
    }
}

fn basis<S: Scalar>(n: usize, k: usize) -> Vec<S> {
    (0..n).map(|m| if m == k { S::one() } else { S::zero() }).collect()
}

fn delta<S: Scalar>(a: usize, b: usize) -> S {
    if a == b {
        S::one()
    } else {
        S::zero()
    }
}

macro_rules! defect_report {
    ($(#[$meta:meta])* $name:ident { $($(#[$fmeta:meta])* $field:ident),* $(,)? }) => {
        $(#[$meta])*
        #[derive(Debug, Clone, Default, PartialEq, serde::Serialize, serde::Deserialize)]
        pub struct $name {
            $($(#[$fmeta])* pub $field: f64,)*
        }

        impl $name {
            pub fn entries(&self) -> Vec<(&'static str, f64)> {
                vec![$((stringify!($field), self.$field)),*]
            }

            pub fn max(&self) -> f64 {
                self.entries().into_iter().map(|(_, v)| v).fold(0.0, f64::max)
            }

            pub fn passes(&self, tol: f64) -> bool {
                self.max() <= tol
            }
        }
    };
}

defect_report!(
    /// Axioms of an almost-contact metric structure.
    AlmostContactDefects {
        /// `φ² + I − η⊗ξ`
        phi_squared,
        /// `η(ξ) − 1`
        eta_of_xi,
        /// `φξ`
        phi_xi,
        /// `η∘φ`
        eta_phi,
        /// `g(φX,φY) − g(X,Y) + η(X)η(Y)`
        compatibility,
    }
);

defect_report!(
    /// The Kenmotsu condition on `∇φ` and its consequences for `ξ` and `η`.
    KenmotsuDefects {
        /// `(∇_X φ)Y − g(φX,Y)ξ + η(Y)φX`
        nabla_phi,
        /// `∇_X ξ − X + η(X)ξ`
        nabla_xi,
        /// `(∇_X η)Y − g(X,Y) + η(X)η(Y)`
        nabla_eta,
    }
);

defect_report!(
    /// Curvature identities every Kenmotsu manifold satisfies.
    KenmotsuCurvatureDefects {
        /// `R(X,Y)ξ − η(X)Y + η(Y)X`
        r_xy_xi,
        /// `R(ξ,X)Y − η(Y)X + g(X,Y)ξ`
        r_xi_x_y,
        /// `R(ξ,X)ξ − X + η(X)ξ`
        r_xi_x_xi,
        /// `S(X,ξ) + (n−1)η(X)`
        ricci_xi,
    }
);

defect_report!(
    /// Closed forms of `R` and `S` on a Kenmotsu 3-manifold in terms of `r`.
    ClosedFormDefects {
        curvature,
        ricci,
    }
);

pub fn check_almost_contact<S: Scalar>(cs: &ContactPoint<S>, fd: &FramePointData<S>) -> AlmostContactDefects {
    let n = fd.dim();
    let phi = cs.phi_values();
    let xi = cs.xi_values();
    let eta = cs.eta_values();

    let phi2 = phi.dot_generic(&phi);
    let mut phi_squared = Vec::new();
    for i in 0..n {
        for j in 0..n {
            phi_squared.push(phi2[[i, j]].clone() + &delta::<S>(i, j) - xi[i].clone() * &eta[j]);
        }
    }
    let eta_of_xi = cs.eta_of(&xi) - S::one();
    let phi_xi = cs.apply_phi(&xi);
    let eta_phi: Vec<S> = (0..n).map(|j| cs.eta_of(&cs.apply_phi(&basis(n, j)))).collect();
    let mut compatibility = Vec::new();
    for a in 0..n {
        let pa = cs.apply_phi(&basis(n, a));
        for b in a..n {
            let pb = cs.apply_phi(&basis(n, b));
            compatibility.push(fd.inner(&pa, &pb) - fd.metric[[a, b]].value() + eta[a].clone() * &eta[b]);
        }
    }
    AlmostContactDefects {
        phi_squared: max_abs(&phi_squared),
        eta_of_xi: eta_of_xi.abs().to_f64(),
        phi_xi: max_abs(&phi_xi),
        eta_phi: max_abs(&eta_phi),
        compatibility: max_abs(&compatibility),
    }
}

trait DotGeneric<S> {
    fn dot_generic(&self, rhs: &Array2<S>) -> Array2<S>;
}

impl<S: Scalar> DotGeneric<S> for Array2<S> {
    fn dot_generic(&self, rhs: &Array2<S>) -> Array2<S> {
        let n = self.nrows();
        let m = rhs.ncols();
        Array2::from_shape_fn((n, m), |(i, j)| {
            let mut acc = S::zero();
            for k in 0..self.ncols() {
                acc = acc + self[[i, k]].clone() * &rhs[[k, j]];
            }
            acc
        })
    }
}

pub fn check_kenmotsu<S: Scalar>(
    cs: &ContactPoint<S>,
    fd: &FramePointData<S>,
    pack: &CurvaturePack<S>,
) -> Result<KenmotsuDefects, GeometryError> {
    let n = fd.dim();
    let conn = &pack.connection;
    let phi = cs.phi_values();
    let xi = cs.xi_values();
    let eta = cs.eta_values();
    let g = fd.metric.map(|j| j.value().clone());

    // d_phi[[a, i, j]] = ((∇_{e_a} φ) e_j)^i
    let d_phi = covariant_derivative(&TensorField::from_matrix([Slot::Upper, Slot::Lower], &cs.phi), fd, conn)?.values();
    let mut nabla_phi = Vec::new();
    for a in 0..n {
        for j in 0..n {
            // g(φ e_a, e_j)
            let mut g_phi = S::zero();
            for m in 0..n {
                g_phi = g_phi + phi[[m, a]].clone() * &g[[m, j]];
            }
            for i in 0..n {
                let rhs = g_phi.clone() * &xi[i] - eta[j].clone() * &phi[[i, a]];
                nabla_phi.push(d_phi[[a, i, j].as_slice()].clone() - rhs);
            }
        }
    }

    let d_xi = covariant_derivative(&TensorField::vector(&cs.xi), fd, conn)?.values();
    let mut nabla_xi = Vec::new();
    for a in 0..n {
        for i in 0..n {
            nabla_xi.push(d_xi[[a, i].as_slice()].clone() - delta::<S>(a, i) + eta[a].clone() * &xi[i]);
        }
    }

    let d_eta = covariant_derivative(&TensorField::covector(&cs.eta), fd, conn)?.values();
    let mut nabla_eta = Vec::new();
    for a in 0..n {
        for j in 0..n {
            nabla_eta.push(d_eta[[a, j].as_slice()].clone() - &g[[a, j]] + eta[a].clone() * &eta[j]);
        }
    }

    Ok(KenmotsuDefects { nabla_phi: max_abs(&nabla_phi), nabla_xi: max_abs(&nabla_xi), nabla_eta: max_abs(&nabla_eta) })
}

pub fn check_kenmotsu_curvature<S: Scalar>(
    cs: &ContactPoint<S>,
    fd: &FramePointData<S>,
    pack: &CurvaturePack<S>,
) -> KenmotsuCurvatureDefects {
    let n = fd.dim();
    let xi = cs.xi_values();
    let eta = cs.eta_values();
    let g = fd.metric.map(|j| j.value().clone());
    let mut r_xy_xi = Vec::new();
    let mut r_xi_x_y = Vec::new();
    let mut r_xi_x_xi = Vec::new();
    let mut ricci_xi = Vec::new();
    let n_minus_one = S::from_i64(n as i64 - 1);
    for a in 0..n {
        let ea = basis::<S>(n, a);
        for b in 0..n {
            let eb = basis::<S>(n, b);
            let lhs = pack.apply(&ea, &eb, &xi);
            let lhs2 = pack.apply(&xi, &ea, &eb);
            for l in 0..n {
                r_xy_xi.push(lhs[l].clone() - eta[a].clone() * &eb[l] + eta[b].clone() * &ea[l]);
                r_xi_x_y.push(lhs2[l].clone() - eta[b].clone() * &ea[l] + g[[a, b]].clone() * &xi[l]);
            }
        }
        let lhs = pack.apply(&xi, &ea, &xi);
        for l in 0..n {
            r_xi_x_xi.push(lhs[l].clone() - &ea[l] + eta[a].clone() * &xi[l]);
        }
        ricci_xi.push(pack.ricci_form(&ea, &xi) + n_minus_one.clone() * &eta[a]);
    }
    KenmotsuCurvatureDefects {
        r_xy_xi: max_abs(&r_xy_xi),
        r_xi_x_y: max_abs(&r_xi_x_y),
        r_xi_x_xi: max_abs(&r_xi_x_xi),
        ricci_xi: max_abs(&ricci_xi),
    }
}

/// Compares `R` and `S` against their 3-dimensional Kenmotsu closed forms,
/// using the scalar curvature computed at the point.
pub fn check_3d_closed_forms<S: Scalar>(
    cs: &ContactPoint<S>,
    fd: &FramePointData<S>,
    pack: &CurvaturePack<S>,
) -> Result<ClosedFormDefects, GeometryError> {
    let n = fd.dim();
    if n != 3 {
        return Err(GeometryError::RequiresDim3("closed-form Kenmotsu curvature"));
    }
    let xi = cs.xi_values();
    let eta = cs.eta_values();
    let g = fd.metric.map(|j| j.value().clone());
    let r = pack.scalar_value().clone();
    let half = S::from_ratio(1, 2)?;
    let a = (r.clone() + &S::from_i64(4)) * &half;
    let b = (r.clone() + &S::from_i64(6)) * &half;
    let c = (r + &S::from_i64(2)) * &half;

    let mut curvature = Vec::new();
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                for l in 0..n {
                    let ei = delta::<S>(l, i);
                    let ej = delta::<S>(l, j);
                    let model = a.clone() * &(g[[j, k]].clone() * &ei - g[[i, k]].clone() * &ej)
                        - b.clone()
                            * &(g[[j, k]].clone() * &eta[i] * &xi[l] - g[[i, k]].clone() * &eta[j] * &xi[l]
                                + eta[j].clone() * &eta[k] * &ei
                                - eta[i].clone() * &eta[k] * &ej);
                    curvature.push(pack.riemann[[l, k, i, j]].value().clone() - model);
                }
            }
        }
    }
    let mut ricci = Vec::new();
    for i in 0..n {
        for j in i..n {
            let model = c.clone() * &g[[i, j]] - b.clone() * &eta[i] * &eta[j];
            ricci.push(pack.ricci[[i, j]].value().clone() - model);
        }
    }
    Ok(ClosedFormDefects { curvature: max_abs(&curvature), ricci: max_abs(&ricci) })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::{parse, Chart};
    use crate::frame::{curvature, evaluate_frame, levi_civita, FrameSpec};
    use crate::Rational;

    fn chart_spec(rows: [[&str; 3]; 3], domain: Option<&str>) -> FrameSpec {
        let mut chart = Chart::new(["x", "y", "z"]).unwrap();
        if let Some(d) = domain {
            chart = chart.with_constraint(d).unwrap();
        }
        let coeffs = rows.iter().map(|r| r.iter().map(|t| parse(t, &chart).unwrap()).collect()).collect();
        FrameSpec::chart_frame(chart, coeffs).unwrap()
    }

    fn standard_contact(chart: &Chart) -> ContactSpec {
        let p = |t: &str| parse(t, chart).unwrap();
        ContactSpec {
            phi: vec![vec![p("0"), p("1"), p("0")], vec![p("-1"), p("0"), p("0")], vec![p("0"), p("0"), p("0")]],
            xi: vec![p("0"), p("0"), p("1")],
        }
    }

    fn run(spec: &FrameSpec, point: [i64; 3]) -> (ContactPoint<Rational>, FramePointData<Rational>, CurvaturePack<Rational>) {
        let p: Vec<Rational> = point.iter().map(|&v| Rational::from_i64(v)).collect();
        let fd = evaluate_frame(spec, &p, 4).unwrap();
        let pack = curvature(&fd, levi_civita(&fd).unwrap()).unwrap();
        let cs = standard_contact(&spec.chart).evaluate(&fd).unwrap();
        (cs, fd, pack)
    }

    #[test]
    fn s7_is_kenmotsu() {
        let spec = chart_spec([["z", "0", "0"], ["0", "z", "0"], ["0", "0", "-z"]], Some("z > 0"));
        let (cs, fd, pack) = run(&spec, [1, 2, 3]);
        assert_eq!(check_almost_contact(&cs, &fd).max(), 0.0);
        assert_eq!(check_kenmotsu(&cs, &fd, &pack).unwrap().max(), 0.0);
        assert_eq!(check_kenmotsu_curvature(&cs, &fd, &pack).max(), 0.0);
        assert_eq!(check_3d_closed_forms(&cs, &fd, &pack).unwrap().max(), 0.0);
    }

    #[test]
    fn flat_space_is_not_kenmotsu() {
        let spec = chart_spec([["1", "0", "0"], ["0", "1", "0"], ["0", "0", "1"]], None);
        let (cs, fd, pack) = run(&spec, [0, 0, 0]);
        assert_eq!(check_almost_contact(&cs, &fd).max(), 0.0);
        let k = check_kenmotsu(&cs, &fd, &pack).unwrap();
        assert_eq!(k.nabla_xi, 1.0);
        assert_eq!(check_kenmotsu_curvature(&cs, &fd, &pack).r_xy_xi, 1.0);
    }

    #[test]
    fn zero_phi_fails_the_axioms() {
        let spec = chart_spec([["1", "0", "0"], ["0", "1", "0"], ["0", "0", "1"]], None);
        let fd = evaluate_frame::<Rational>(&spec, &[Rational::zero(), Rational::zero(), Rational::zero()], 2).unwrap();
        let p = |t: &str| parse(t, &spec.chart).unwrap();
        let cs = ContactSpec { phi: vec![vec![p("0"); 3], vec![p("0"); 3], vec![p("0"); 3]], xi: vec![p("0"), p("0"), p("1")] }
            .evaluate(&fd)
            .unwrap();
        let d = check_almost_contact(&cs, &fd);
        assert_eq!(d.phi_squared, 1.0);
        assert_eq!(d.eta_of_xi, 0.0);
    }

    #[test]
    fn closed_forms_need_three_dimensions() {
        let chart = Chart::new(["x", "y"]).unwrap();
        let p = |t: &str| parse(t, &chart).unwrap();
        let spec = FrameSpec::chart_frame(chart.clone(), vec![vec![p("1"), p("0")], vec![p("0"), p("1")]]).unwrap();
        let fd = evaluate_frame::<f64>(&spec, &[0.0, 0.0], 2).unwrap();
        let pack = curvature(&fd, levi_civita(&fd).unwrap()).unwrap();
        let cs = ContactSpec { phi: vec![vec![p("0"), p("0")], vec![p("0"), p("0")]], xi: vec![p("1"), p("0")] }.evaluate(&fd).unwrap();
        assert!(matches!(check_3d_closed_forms(&cs, &fd, &pack), Err(GeometryError::RequiresDim3(_))));
    }
}
