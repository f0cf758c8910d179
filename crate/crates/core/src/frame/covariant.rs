use ndarray::{ArrayD, IxDyn};

use super::{Connection, FramePointData, GeometryError};
use crate::jet::Jet;
use crate::scalar::Scalar;

/// Variance of one tensor slot.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Slot {
    /// Contravariant (vector) index.
    Upper,
    /// Covariant (form) index.
    Lower,
}

/// Frame components of a tensor field at a point, one array axis per slot.
#[derive(Debug, Clone)]
pub struct TensorField<S> {
    pub slots: Vec<Slot>,
    pub components: ArrayD<Jet<S>>,
}

impl<S: Scalar> TensorField<S> {
    pub fn new(slots: Vec<Slot>, components: ArrayD<Jet<S>>) -> TensorField<S> {
        assert_eq!(slots.len(), components.ndim(), "one axis per slot");
        TensorField { slots, components }
    }

    pub fn vector(components: &[Jet<S>]) -> TensorField<S> {
        let arr = ArrayD::from_shape_vec(IxDyn(&[components.len()]), components.to_vec()).expect("1-d");
        TensorField::new(vec![Slot::Upper], arr)
    }

    pub fn covector(components: &[Jet<S>]) -> TensorField<S> {
        let arr = ArrayD::from_shape_vec(IxDyn(&[components.len()]), components.to_vec()).expect("1-d");
        TensorField::new(vec![Slot::Lower], arr)
    }

    pub fn from_matrix(slots: [Slot; 2], m: &ndarray::Array2<Jet<S>>) -> TensorField<S> {
        TensorField::new(slots.to_vec(), m.clone().into_dyn())
    }

    pub fn values(&self) -> ArrayD<S> {
        self.components.map(|j| j.value().clone())
    }
}

/// `∇T` with the new covariant slot first: `(∇T)[a, I] = (∇_{e_a} T)[I]`.
///
/// Upper slots pick up `+Γ^u_{a m} T[.. m ..]`, lower slots `−Γ^m_{a l} T[.. m ..]`.
pub fn covariant_derivative<S: Scalar>(
    t: &TensorField<S>,
    fd: &FramePointData<S>,
    connection: &Connection<S>,
) -> Result<TensorField<S>, GeometryError> {
    let n = fd.dim();
    let gamma = &connection.gamma;
    let rank = t.slots.len();
    let mut shape = vec![n];
    shape.extend_from_slice(t.components.shape());
    let mut out = ArrayD::from_elem(IxDyn(&shape), fd.zero());
    let mut index = vec![0usize; rank];
    for a in 0..n {
        for (idx, comp) in t.components.indexed_iter() {
            for (s, v) in index.iter_mut().enumerate() {
                *v = idx[s];
            }
            let mut acc = fd.derive(comp, a)?;
            for (s, slot) in t.slots.iter().enumerate() {
                let fixed = index[s];
                for m in 0..n {
                    index[s] = m;
                    let other = &t.components[IxDyn(&index)];
                    if other.is_zero() {
                        continue;
                    }
                    acc = match slot {
                        Slot::Upper => &acc + &(&gamma[[fixed, a, m]] * other),
                        Slot::Lower => &acc - &(&gamma[[m, a, fixed]] * other),
                    };
                }
                index[s] = fixed;
            }
            let mut target = vec![a];
            target.extend_from_slice(&index);
            out[IxDyn(&target)] = acc;
        }
    }
    let mut slots = vec![Slot::Lower];
    slots.extend_from_slice(&t.slots);
    Ok(TensorField::new(slots, out))
}
