use ndarray::Array2;

use super::{covariant_derivative, CurvaturePack, FramePointData, GeometryError, Slot, TensorField};
use crate::jet::JetError;
use crate::scalar::{max_abs, Scalar};

/// Max-abs frame-component defects of identities every Levi-Civita curvature satisfies.
#[derive(Debug, Clone, Default, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct IdentityDefects {
    /// `Γ^k_ij − Γ^k_ji − c^k_ij`
    pub torsion: f64,
    /// `∇g`
    pub metric_compatibility: f64,
    /// `R(X,Y) + R(Y,X)`
    pub riemann_antisymmetry: f64,
    /// `R_ijkl + R_ijlk`
    pub lowered_antisymmetry: f64,
    /// `R_ijkl − R_klij`
    pub pair_symmetry: f64,
    pub bianchi_first: f64,
    /// `Σ g^ij (∇_i S)(e_j, X) − ½ X(r)`; `None` when the jet degree is too low.
    pub bianchi_contracted: Option<f64>,
    /// The 3-dimensional decomposition of `R` through `S`, `Q` and `r`.
    pub decomposition_3d: Option<f64>,
}

impl IdentityDefects {
    pub fn entries(&self) -> Vec<(&'static str, f64)> {
        let mut out = vec![
            ("torsion", self.torsion),
            ("metric_compatibility", self.metric_compatibility),
            ("riemann_antisymmetry", self.riemann_antisymmetry),
            ("lowered_antisymmetry", self.lowered_antisymmetry),
            ("pair_symmetry", self.pair_symmetry),
            ("bianchi_first", self.bianchi_first),
        ];
        if let Some(v) = self.bianchi_contracted {
            out.push(("bianchi_contracted", v));
        }
        if let Some(v) = self.decomposition_3d {
            out.push(("decomposition_3d", v));
        }
        out
    }

    pub fn max(&self) -> f64 {
        self.entries().into_iter().map(|(_, v)| v).fold(0.0, f64::max)
    }
}

pub fn identity_suite<S: Scalar>(pack: &CurvaturePack<S>, fd: &FramePointData<S>) -> Result<IdentityDefects, GeometryError> {
    let n = fd.dim();
    let gamma = pack.gamma();
    let c = &fd.structure;
    let r = &pack.riemann;
    let rl = &pack.riemann_low;
    let mut torsion = Vec::new();
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                torsion.push(gamma[[k, i, j]].value().clone() - gamma[[k, j, i]].value() - c[[k, i, j]].value());
            }
        }
    }

    let nabla_g = covariant_derivative(&TensorField::from_matrix([Slot::Lower, Slot::Lower], &fd.metric), fd, &pack.connection)?;

    let mut antisym = Vec::new();
    let mut low_antisym = Vec::new();
    let mut pair = Vec::new();
    let mut bianchi = Vec::new();
    for a in 0..n {
        for b in 0..n {
            for k in 0..n {
                for l in 0..n {
                    antisym.push(r[[l, k, a, b]].value().clone() + r[[l, k, b, a]].value());
                    low_antisym.push(rl[[a, b, k, l]].value().clone() + rl[[a, b, l, k]].value());
                    pair.push(rl[[a, b, k, l]].value().clone() - rl[[k, l, a, b]].value());
                    // component l of R(e_a,e_b)e_k + R(e_b,e_k)e_a + R(e_k,e_a)e_b
                    bianchi.push(r[[l, k, a, b]].value().clone() + r[[l, a, b, k]].value() + r[[l, b, k, a]].value());
                }
            }
        }
    }

    let bianchi_contracted = match contracted_bianchi(pack, fd) {
        Ok(v) => Some(v),
        Err(GeometryError::Jet(JetError::OrderExhausted { .. })) => None,
        Err(e) => return Err(e),
    };
    let decomposition_3d = (n == 3).then(|| decomposition_3d_defect(pack, fd));

    Ok(IdentityDefects {
        torsion: max_abs(&torsion),
        metric_compatibility: max_abs(nabla_g.components.iter().map(|j| j.value())),
        riemann_antisymmetry: max_abs(&antisym),
        lowered_antisymmetry: max_abs(&low_antisym),
        pair_symmetry: max_abs(&pair),
        bianchi_first: max_abs(&bianchi),
        bianchi_contracted,
        decomposition_3d,
    })
}

fn contracted_bianchi<S: Scalar>(pack: &CurvaturePack<S>, fd: &FramePointData<S>) -> Result<f64, GeometryError> {
    let n = fd.dim();
    let nabla_s = covariant_derivative(&TensorField::from_matrix([Slot::Lower, Slot::Lower], &pack.ricci), fd, &pack.connection)?;
    let half = S::from_ratio(1, 2)?;
    let mut defects = Vec::with_capacity(n);
    for x in 0..n {
        let mut div = S::zero();
        for i in 0..n {
            for j in 0..n {
                div = div + fd.metric_inv[[i, j]].value().clone() * nabla_s.components[[i, j, x].as_slice()].value();
            }
        }
        let dr = fd.derive(&pack.scalar, x)?;
        defects.push(div - half.clone() * dr.value());
    }
    Ok(max_abs(&defects))
}

/// `R(X,Y)Z − [g(Y,Z)QX − g(X,Z)QY + S(Y,Z)X − S(X,Z)Y − (r/2)(g(Y,Z)X − g(X,Z)Y)]`
/// over all frame triples.
pub fn decomposition_3d_defect<S: Scalar>(pack: &CurvaturePack<S>, fd: &FramePointData<S>) -> f64 {
    let n = fd.dim();
    let g = fd.metric.map(|j| j.value().clone());
    let s: Array2<S> = pack.ricci.map(|j| j.value().clone());
    let q: Array2<S> = pack.ricci_operator.map(|j| j.value().clone());
    let half_r = pack.scalar_value().clone() * &S::from_ratio(1, 2).expect("nonzero denominator");
    let delta = |a: usize, b: usize| if a == b { S::one() } else { S::zero() };
    let mut defects = Vec::new();
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                for l in 0..n {
                    let model = g[[j, k]].clone() * &q[[l, i]] - g[[i, k]].clone() * &q[[l, j]] + s[[j, k]].clone() * &delta(l, i)
                        - s[[i, k]].clone() * &delta(l, j)
                        - half_r.clone() * &(g[[j, k]].clone() * &delta(l, i) - g[[i, k]].clone() * &delta(l, j));
                    defects.push(pack.riemann[[l, k, i, j]].value().clone() - model);
                }
            }
        }
    }
    max_abs(&defects)
}
