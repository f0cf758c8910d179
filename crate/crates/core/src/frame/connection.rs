use ndarray::{Array2, Array3, Array4};

use super::{FramePointData, GeometryError};
use crate::jet::Jet;
use crate::scalar::Scalar;

/// Levi-Civita connection coefficients in the frame: `gamma[[k, i, j]] = Γ^k_ij`.
#[derive(Debug, Clone)]
pub struct Connection<S> {
    pub gamma: Array3<Jet<S>>,
}

impl<S: Scalar> Connection<S> {
    pub fn dim(&self) -> usize {
        self.gamma.dim().0
    }

    /// Value-level `∇_{e_i} e_j` as frame components.
    pub fn nabla(&self, i: usize, j: usize) -> Vec<S> {
        (0..self.dim()).map(|k| self.gamma[[k, i, j]].value().clone()).collect()
    }
}

#[derive(Debug, Clone)]
pub struct CurvaturePack<S> {
    pub connection: Connection<S>,
    /// `[l, k, i, j]`: `R(e_i, e_j) e_k = R^l_kij e_l`.
    pub riemann: Array4<Jet<S>>,
    /// `[i, j, k, l]`: `g(R(e_i, e_j) e_k, e_l)`.
    pub riemann_low: Array4<Jet<S>>,
    /// `S(e_i, e_j)`, the trace of `Z ↦ R(Z, e_i) e_j`.
    pub ricci: Array2<Jet<S>>,
    /// `[i, j] = Q^i_j` with `g(QX, Y) = S(X, Y)`.
    pub ricci_operator: Array2<Jet<S>>,
    pub scalar: Jet<S>,
}

impl<S: Scalar> CurvaturePack<S> {
    pub fn dim(&self) -> usize {
        self.ricci.nrows()
    }

    pub fn gamma(&self) -> &Array3<Jet<S>> {
        &self.connection.gamma
    }

    /// Value-level `R(X, Y) Z` for frame-component vectors.
    pub fn apply(&self, x: &[S], y: &[S], z: &[S]) -> Vec<S> {
        let n = self.dim();
        let mut out = vec![S::zero(); n];
        for i in 0..n {
            if x[i].is_zero() {
                continue;
            }
            for j in 0..n {
                if y[j].is_zero() {
                    continue;
                }
                let xy = x[i].clone() * &y[j];
                for k in 0..n {
                    if z[k].is_zero() {
                        continue;
                    }
                    let w = xy.clone() * &z[k];
                    for (l, o) in out.iter_mut().enumerate() {
                        *o = o.clone() + w.clone() * self.riemann[[l, k, i, j]].value();
                    }
                }
            }
        }
        out
    }

    /// Value-level `S(X, Y)`.
    pub fn ricci_form(&self, x: &[S], y: &[S]) -> S {
        let n = self.dim();
        let mut acc = S::zero();
        for i in 0..n {
            for j in 0..n {
                acc = acc + x[i].clone() * &y[j] * self.ricci[[i, j]].value();
            }
        }
        acc
    }

    pub fn scalar_value(&self) -> &S {
        self.scalar.value()
    }
}

/// Koszul formula in the frame:
/// `2g(∇_{e_i}e_j, e_k) = e_i g_jk + e_j g_ik − e_k g_ij − g(e_i,[e_j,e_k]) − g(e_j,[e_i,e_k]) + g(e_k,[e_i,e_j])`.
pub fn levi_civita<S: Scalar>(fd: &FramePointData<S>) -> Result<Connection<S>, GeometryError> {
    let n = fd.dim();
    let c = &fd.structure;
    let g = &fd.metric;
    // g(e_a, [e_b, e_d]) = Σ_l c^l_bd g_al
    let bracket_pairing = |a: usize, b: usize, d: usize| -> Jet<S> {
        let mut acc = fd.zero();
        for l in 0..n {
            if c[[l, b, d]].is_zero() {
                continue;
            }
            acc = if fd.orthonormal {
                if l == a {
                    &acc + &c[[l, b, d]]
                } else {
                    acc
                }
            } else {
                &acc + &(&c[[l, b, d]] * &g[[a, l]])
            };
        }
        acc.with_valid_order(c[[0, b, d]].valid_order())
    };

    let mut koszul = Array3::from_elem((n, n, n), fd.zero());
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                let mut twice = &(&bracket_pairing(k, i, j) - &bracket_pairing(i, j, k)) - &bracket_pairing(j, i, k);
                if !fd.orthonormal {
                    twice = &twice + &fd.derive(&g[[j, k]], i)?;
                    twice = &twice + &fd.derive(&g[[i, k]], j)?;
                    twice = &twice - &fd.derive(&g[[i, j]], k)?;
                }
                koszul[[i, j, k]] = twice;
            }
        }
    }

    let half = S::from_ratio(1, 2)?;
    let mut gamma = Array3::from_elem((n, n, n), fd.zero());
    for l in 0..n {
        for i in 0..n {
            for j in 0..n {
                gamma[[l, i, j]] = if fd.orthonormal {
                    koszul[[i, j, l]].scale(&half)
                } else {
                    let mut acc = fd.zero();
                    for k in 0..n {
                        acc = &acc + &(&fd.metric_inv[[l, k]] * &koszul[[i, j, k]]);
                    }
                    acc.scale(&half)
                };
            }
        }
    }
    Ok(Connection { gamma })
}

/// `R^l_kij = e_i(Γ^l_jk) − e_j(Γ^l_ik) + Γ^m_jk Γ^l_im − Γ^m_ik Γ^l_jm − c^m_ij Γ^l_mk`,
/// followed by the lowered tensor, Ricci tensor and operator, and scalar curvature.
pub fn curvature<S: Scalar>(fd: &FramePointData<S>, connection: Connection<S>) -> Result<CurvaturePack<S>, GeometryError> {
    let n = fd.dim();
    let gamma = &connection.gamma;
    let c = &fd.structure;

    let mut derived = Array4::from_elem((n, n, n, n), fd.zero());
    for l in 0..n {
        for a in 0..n {
            for b in 0..n {
                for i in 0..n {
                    // derived[[l, a, b, i]] = e_i(Γ^l_ab)
                    derived[[l, a, b, i]] = fd.derive(&gamma[[l, a, b]], i)?;
                }
            }
        }
    }

    let mut riemann = Array4::from_elem((n, n, n, n), fd.zero());
    for l in 0..n {
        for k in 0..n {
            for i in 0..n {
                for j in 0..n {
                    let mut r = &derived[[l, j, k, i]] - &derived[[l, i, k, j]];
                    for m in 0..n {
                        r = &r + &(&gamma[[m, j, k]] * &gamma[[l, i, m]]);
                        r = &r - &(&gamma[[m, i, k]] * &gamma[[l, j, m]]);
                        if !c[[m, i, j]].is_zero() {
                            r = &r - &(&c[[m, i, j]] * &gamma[[l, m, k]]);
                        }
                    }
                    riemann[[l, k, i, j]] = r;
                }
            }
        }
    }

    let mut riemann_low = Array4::from_elem((n, n, n, n), fd.zero());
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                for l in 0..n {
                    riemann_low[[i, j, k, l]] = if fd.orthonormal {
                        riemann[[l, k, i, j]].clone()
                    } else {
                        let mut acc = fd.zero();
                        for m in 0..n {
                            acc = &acc + &(&riemann[[m, k, i, j]] * &fd.metric[[m, l]]);
                        }
                        acc
                    };
                }
            }
        }
    }

    // S(e_j, e_k) = Σ_a R^a_k a j
    let ricci = Array2::from_shape_fn((n, n), |(j, k)| {
        let mut acc = fd.zero();
        for a in 0..n {
            acc = &acc + &riemann[[a, k, a, j]];
        }
        acc
    });
    let ricci_operator = Array2::from_shape_fn((n, n), |(i, j)| {
        if fd.orthonormal {
            return ricci[[i, j]].clone();
        }
        let mut acc = fd.zero();
        for k in 0..n {
            acc = &acc + &(&fd.metric_inv[[i, k]] * &ricci[[k, j]]);
        }
        acc
    });
    let mut scalar = fd.zero();
    for i in 0..n {
        scalar = &scalar + &ricci_operator[[i, i]];
    }

    Ok(CurvaturePack { connection, riemann, riemann_low, ricci, ricci_operator, scalar })
}
