//! Moving-frame curvature engine for 3-manifolds.
//!
//! Frames are given by coordinate expressions over a chart (or by constant
//! structure constants). Every derived quantity is carried as a truncated
//! Taylor jet at the evaluation point, so derivatives of the connection,
//! curvature and Ricci tensor are exact up to the jet degree. The scalar can
//! be `f64` or an exact big rational.
//!
//! On top of the frame machinery sit almost-contact and Kenmotsu checks,
//! η-Ricci soliton fitting, and curvature-condition classification (Codazzi,
//! cyclic-parallel and φ-Ricci-symmetric Ricci tensors, `R·R = Q(S,R)`,
//! space forms).

// tensor code indexes several arrays with the same frame index
#![allow(clippy::needless_range_loop)]

pub mod classify;
pub mod contact;
pub mod expr;
pub mod frame;
pub mod jet;
pub mod scalar;
pub mod soliton;
pub mod workbench;

pub use jet::{Jet, JetError};
pub use scalar::{Mode, Scalar};

/// Exact scalar used in rational mode.
pub type Rational = num::BigRational;
