//! Truncated multivariate Taylor expansions ("jets").
//!
//! A jet of degree `d` in `n` variables stores every Taylor coefficient
//! `c_α = ∂^α f / α!` with `|α| ≤ d`, so products are plain truncated
//! convolutions. Coefficients are kept in graded order (all order-0, then all
//! order-1, ...), which lets loops stop early once the total degree overflows.
//!
//! Each jet also tracks `valid_order`: the highest derivative order that is
//! still exact. Differentiating a jet drops its top-order information, so the
//! derivative is only trustworthy one order lower. Operations that would need
//! more orders than are available fail with [`JetError::OrderExhausted`].

use std::collections::HashMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::{Arc, LazyLock, Mutex};

use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum JetError {
    #[error("coordinate index {index} out of range for {n_vars} variables")]
    IndexOutOfRange { index: usize, n_vars: usize },
    #[error("division by zero")]
    DivisionByZero,
    #[error("division by a jet whose value vanishes at the point")]
    DivisionByZeroAtPoint,
    #[error("jets have different shapes ({0} vs {1})")]
    MixedJetShapes(String, String),
    #[error("{function} is undefined at {value}")]
    Domain { function: &'static str, value: f64 },
    #[error("{0} is not available in exact rational mode")]
    Transcendental(&'static str),
    #[error("derivative order exhausted: need {needed}, jet is valid to order {available}")]
    OrderExhausted { needed: usize, available: usize },
}

/// Multi-index bookkeeping shared by all jets of one `(n_vars, degree)` shape.
#[derive(Debug)]
pub struct Layout {
    n_vars: usize,
    degree: usize,
    indices: Vec<Vec<u8>>,
    orders: Vec<usize>,
    lookup: HashMap<Vec<u8>, usize>,
    /// `upto[k]` = number of coefficients of total order `≤ k`.
    upto: Vec<usize>,
    /// Flat `len × len` table: position of `α_i + α_j`, or `NONE` past the degree.
    product: Vec<u32>,
    /// Per variable: `(target, source, factor)` with `∂_m c[target] = factor · c[source]`.
    partials: Vec<Vec<(usize, usize, i64)>>,
}

const NONE: u32 = u32::MAX;

type LayoutCache = Mutex<HashMap<(usize, usize), Arc<Layout>>>;

static LAYOUTS: LazyLock<LayoutCache> = LazyLock::new(|| Mutex::new(HashMap::new()));

impl Layout {
    pub fn get(n_vars: usize, degree: usize) -> Arc<Layout> {
        let mut cache = LAYOUTS.lock().unwrap_or_else(|e| e.into_inner());
        cache.entry((n_vars, degree)).or_insert_with(|| Arc::new(Layout::build(n_vars, degree))).clone()
    }

    fn build(n_vars: usize, degree: usize) -> Layout {
        let mut indices = Vec::new();
        let mut upto = Vec::with_capacity(degree + 1);
        for order in 0..=degree {
            let mut current = vec![0u8; n_vars];
            push_compositions(&mut indices, &mut current, 0, order);
            upto.push(indices.len());
        }
        let orders: Vec<usize> = indices.iter().map(|a| a.iter().map(|&x| x as usize).sum()).collect();
        let lookup: HashMap<Vec<u8>, usize> = indices.iter().enumerate().map(|(i, a)| (a.clone(), i)).collect();
        let len = indices.len();
        let mut product = vec![NONE; len * len];
        for i in 0..len {
            for j in 0..len {
                if orders[i] + orders[j] <= degree {
                    let sum: Vec<u8> = indices[i].iter().zip(&indices[j]).map(|(a, b)| a + b).collect();
                    product[i * len + j] = lookup[&sum] as u32;
                }
            }
        }
        let partials = (0..n_vars)
            .map(|m| {
                let mut table = Vec::new();
                for (target, alpha) in indices.iter().enumerate() {
                    if orders[target] + 1 > degree {
                        continue;
                    }
                    let mut raised = alpha.clone();
                    raised[m] += 1;
                    table.push((target, lookup[&raised], raised[m] as i64));
                }
                table
            })
            .collect();
        Layout { n_vars, degree, indices, orders, lookup, upto, product, partials }
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    pub fn n_vars(&self) -> usize {
        self.n_vars
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn multi_index(&self, position: usize) -> &[u8] {
        &self.indices[position]
    }

    pub fn position(&self, alpha: &[u8]) -> Option<usize> {
        self.lookup.get(alpha).copied()
    }
}

fn push_compositions(out: &mut Vec<Vec<u8>>, current: &mut Vec<u8>, var: usize, remaining: usize) {
    if current.is_empty() {
        if remaining == 0 {
            out.push(Vec::new());
        }
        return;
    }
    if var == current.len() - 1 {
        current[var] = remaining as u8;
        out.push(current.clone());
        current[var] = 0;
        return;
    }
    for k in (0..=remaining).rev() {
        current[var] = k as u8;
        push_compositions(out, current, var + 1, remaining - k);
    }
    current[var] = 0;
}

/// `C(n + d, d)`, the number of coefficients of a jet.
pub fn coefficient_count(n_vars: usize, degree: usize) -> usize {
    let mut c = 1usize;
    for k in 1..=degree {
        c = c * (n_vars + k) / k;
    }
    c
}

#[derive(Clone)]
pub struct Jet<S> {
    layout: Arc<Layout>,
    coeffs: Vec<S>,
    valid_order: usize,
}

impl<S: Scalar> PartialEq for Jet<S> {
    fn eq(&self, other: &Self) -> bool {
        self.same_shape(other) && self.valid_order == other.valid_order && self.coeffs == other.coeffs
    }
}

impl<S: fmt::Debug> fmt::Debug for Jet<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Jet")
            .field("n_vars", &self.layout.n_vars)
            .field("degree", &self.layout.degree)
            .field("valid_order", &self.valid_order)
            .field("coeffs", &self.coeffs)
            .finish()
    }
}

/// Elementary functions available on jets.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ElemFn {
    Exp,
    Ln,
    Sin,
    Cos,
    Sqrt,
}

impl ElemFn {
    pub fn name(self) -> &'static str {
        match self {
            ElemFn::Exp => "exp",
            ElemFn::Ln => "ln",
            ElemFn::Sin => "sin",
            ElemFn::Cos => "cos",
            ElemFn::Sqrt => "sqrt",
        }
    }

    pub fn from_name(name: &str) -> Option<ElemFn> {
        Some(match name {
            "exp" => ElemFn::Exp,
            "ln" => ElemFn::Ln,
            "sin" => ElemFn::Sin,
            "cos" => ElemFn::Cos,
            "sqrt" => ElemFn::Sqrt,
            _ => return None,
        })
    }
}

/// Binary and unary arithmetic accepted by [`jet_arith`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum JetOp {
    Add,
    Sub,
    Mul,
    Div,
    Neg,
    IntPow,
}

pub enum Operand<'a, S> {
    Jet(&'a Jet<S>),
    Int(i32),
    None,
}

/// Shape-checked entry point for jet arithmetic.
pub fn jet_arith<S: Scalar>(op: JetOp, a: &Jet<S>, b: Operand<'_, S>) -> Result<Jet<S>, JetError> {
    let jet_operand = |b: Operand<'_, S>| -> Result<Jet<S>, JetError> {
        match b {
            Operand::Jet(j) => {
                a.check_shape(j)?;
                Ok(j.clone())
            }
            Operand::Int(k) => Ok(a.constant_like(S::from_i64(k as i64))),
            Operand::None => Err(JetError::MixedJetShapes(a.shape_string(), "nothing".into())),
        }
    };
    match op {
        JetOp::Neg => Ok(-a),
        JetOp::Add => Ok(a + &jet_operand(b)?),
        JetOp::Sub => Ok(a - &jet_operand(b)?),
        JetOp::Mul => Ok(a * &jet_operand(b)?),
        JetOp::Div => a.try_div(&jet_operand(b)?),
        JetOp::IntPow => match b {
            Operand::Int(k) => a.powi(k),
            _ => Err(JetError::MixedJetShapes(a.shape_string(), "non-integer exponent".into())),
        },
    }
}

impl<S: Scalar> Jet<S> {
    pub fn constant(value: S, n_vars: usize, degree: usize) -> Self {
        let layout = Layout::get(n_vars, degree);
        let mut coeffs = vec![S::zero(); layout.len()];
        coeffs[0] = value;
        Jet { layout, coeffs, valid_order: degree }
    }

    pub fn zero(n_vars: usize, degree: usize) -> Self {
        Self::constant(S::zero(), n_vars, degree)
    }

    /// The coordinate function `x^i` expanded at `point`.
    pub fn var(index: usize, point: &[S], degree: usize) -> Result<Self, JetError> {
        let n_vars = point.len();
        if index >= n_vars {
            return Err(JetError::IndexOutOfRange { index, n_vars });
        }
        let mut jet = Self::constant(point[index].clone(), n_vars, degree);
        if degree >= 1 {
            let mut alpha = vec![0u8; n_vars];
            alpha[index] = 1;
            let pos = jet.layout.lookup[&alpha];
            jet.coeffs[pos] = S::one();
        }
        Ok(jet)
    }

    pub fn from_coeffs(coeffs: Vec<S>, n_vars: usize, degree: usize) -> Result<Self, JetError> {
        let layout = Layout::get(n_vars, degree);
        if coeffs.len() != layout.len() {
            return Err(JetError::MixedJetShapes(format!("{} coefficients", coeffs.len()), format!("{} expected", layout.len())));
        }
        Ok(Jet { layout, coeffs, valid_order: degree })
    }

    pub fn constant_like(&self, value: S) -> Self {
        let mut coeffs = vec![S::zero(); self.layout.len()];
        coeffs[0] = value;
        Jet { layout: self.layout.clone(), coeffs, valid_order: self.layout.degree }
    }

    pub fn zero_like(&self) -> Self {
        self.constant_like(S::zero())
    }

    pub fn layout(&self) -> &Layout {
        &self.layout
    }

    pub fn n_vars(&self) -> usize {
        self.layout.n_vars
    }

    pub fn degree(&self) -> usize {
        self.layout.degree
    }

    pub fn valid_order(&self) -> usize {
        self.valid_order
    }

    pub fn coeffs(&self) -> &[S] {
        &self.coeffs
    }

    pub fn value(&self) -> &S {
        &self.coeffs[0]
    }

    /// Normalized coefficient `∂^α f / α!`; zero for `|α| > degree`.
    pub fn coeff(&self, alpha: &[u8]) -> S {
        self.layout.position(alpha).map(|p| self.coeffs[p].clone()).unwrap_or_else(S::zero)
    }

    /// The plain partial derivative `∂^α f` at the expansion point.
    pub fn derivative(&self, alpha: &[u8]) -> S {
        let factorial: i64 = alpha.iter().map(|&a| (1..=a as i64).product::<i64>()).product();
        self.coeff(alpha) * &S::from_i64(factorial)
    }

    pub fn gradient(&self) -> Vec<S> {
        (0..self.n_vars())
            .map(|m| {
                let mut alpha = vec![0u8; self.n_vars()];
                alpha[m] = 1;
                self.coeff(&alpha)
            })
            .collect()
    }

    /// True when every coefficient up to the valid order vanishes.
    pub fn is_zero(&self) -> bool {
        let n = self.layout.upto[self.valid_order];
        self.coeffs[..n].iter().all(Scalar::is_zero)
    }

    pub fn same_shape(&self, other: &Self) -> bool {
        self.layout.n_vars == other.layout.n_vars && self.layout.degree == other.layout.degree
    }

    fn shape_string(&self) -> String {
        format!("{} vars, degree {}", self.layout.n_vars, self.layout.degree)
    }

    pub fn check_shape(&self, other: &Self) -> Result<(), JetError> {
        if self.same_shape(other) {
            Ok(())
        } else {
            Err(JetError::MixedJetShapes(self.shape_string(), other.shape_string()))
        }
    }

    fn assert_shape(&self, other: &Self) {
        if let Err(e) = self.check_shape(other) {
            panic!("{e}");
        }
    }

    /// Caps the trusted order, e.g. when a jet stands for data known only to low order.
    pub fn with_valid_order(mut self, order: usize) -> Self {
        self.valid_order = order.min(self.valid_order);
        self
    }

    pub fn scale(&self, factor: &S) -> Self {
        Jet { layout: self.layout.clone(), coeffs: self.coeffs.iter().map(|c| c.clone() * factor).collect(), valid_order: self.valid_order }
    }

    fn zip_with(&self, other: &Self, f: impl Fn(&S, &S) -> S) -> Self {
        self.assert_shape(other);
        Jet {
            layout: self.layout.clone(),
            coeffs: self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| f(a, b)).collect(),
            valid_order: self.valid_order.min(other.valid_order),
        }
    }

    fn product(&self, other: &Self) -> Self {
        self.assert_shape(other);
        let layout = &self.layout;
        let len = layout.len();
        let mut out = vec![S::zero(); len];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            let reach = layout.upto[layout.degree - layout.orders[i]];
            let row = &layout.product[i * len..i * len + reach];
            for (j, &k) in row.iter().enumerate() {
                let b = &other.coeffs[j];
                if b.is_zero() {
                    continue;
                }
                let k = k as usize;
                out[k] = std::mem::replace(&mut out[k], S::zero()) + a.clone() * b;
            }
        }
        Jet { layout: self.layout.clone(), coeffs: out, valid_order: self.valid_order.min(other.valid_order) }
    }

    /// Substitutes `self − value` into the power series `Σ series[k] t^k`.
    fn compose(&self, series: &[S]) -> Self {
        let mut h = self.clone();
        h.coeffs[0] = S::zero();
        let mut acc = self.constant_like(series[0].clone());
        let mut power = self.constant_like(S::one());
        for a in &series[1..] {
            power = &power * &h;
            if !a.is_zero() {
                acc = &acc + &power.scale(a);
            }
        }
        acc.valid_order = self.valid_order;
        acc
    }

    pub fn recip(&self) -> Result<Self, JetError> {
        let b0 = self.value();
        if b0.is_zero() {
            return Err(JetError::DivisionByZeroAtPoint);
        }
        let inv = S::one().checked_div(b0)?;
        let mut series = Vec::with_capacity(self.degree() + 1);
        let mut term = inv.clone();
        for _ in 0..=self.degree() {
            series.push(term.clone());
            term = -(term * &inv);
        }
        Ok(self.compose(&series))
    }

    pub fn try_div(&self, rhs: &Self) -> Result<Self, JetError> {
        self.check_shape(rhs)?;
        Ok(self * &rhs.recip()?)
    }

    pub fn try_add(&self, rhs: &Self) -> Result<Self, JetError> {
        self.check_shape(rhs)?;
        Ok(self + rhs)
    }

    pub fn try_mul(&self, rhs: &Self) -> Result<Self, JetError> {
        self.check_shape(rhs)?;
        Ok(self * rhs)
    }

    pub fn powi(&self, n: i32) -> Result<Self, JetError> {
        if n < 0 {
            return self.recip()?.powi(-n);
        }
        let mut base = self.clone();
        let mut acc = self.constant_like(S::one());
        acc.valid_order = self.valid_order;
        let mut e = n as u32;
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        Ok(acc)
    }

    pub fn apply(&self, f: ElemFn) -> Result<Self, JetError> {
        let d = self.degree();
        let x = self.value();
        let factorials: Vec<S> = (0..=d)
            .scan(1i64, |acc, k| {
                if k > 0 {
                    *acc *= k as i64;
                }
                Some(S::from_i64(*acc))
            })
            .collect();
        let mut series = Vec::with_capacity(d + 1);
        match f {
            ElemFn::Exp => {
                let e = x.exp()?;
                for fact in &factorials {
                    series.push(e.checked_div(fact)?);
                }
            }
            ElemFn::Ln => {
                series.push(x.ln()?);
                let mut xpow = S::one();
                for k in 1..=d {
                    xpow = xpow * x;
                    let sign = if k % 2 == 1 { S::one() } else { -S::one() };
                    series.push(sign.checked_div(&(S::from_i64(k as i64) * &xpow))?);
                }
            }
            ElemFn::Sin | ElemFn::Cos => {
                let (s, c) = (x.sin()?, x.cos()?);
                // successive derivatives of sin: sin, cos, -sin, -cos
                let cycle = [s.clone(), c.clone(), -s, -c];
                let shift = if f == ElemFn::Sin { 0 } else { 1 };
                for (k, fact) in factorials.iter().enumerate() {
                    series.push(cycle[(k + shift) % 4].checked_div(fact)?);
                }
            }
            ElemFn::Sqrt => {
                let root = x.sqrt()?;
                let half = S::from_ratio(1, 2)?;
                let mut binom = S::one();
                let mut xpow = S::one();
                for k in 0..=d {
                    if k > 0 {
                        let km1 = S::from_i64(k as i64 - 1);
                        binom = (binom * &(half.clone() - km1)).checked_div(&S::from_i64(k as i64))?;
                        xpow = xpow * x;
                    }
                    series.push((root.clone() * &binom).checked_div(&xpow)?);
                }
            }
        }
        Ok(self.compose(&series))
    }

    pub fn exp(&self) -> Result<Self, JetError> {
        self.apply(ElemFn::Exp)
    }

    pub fn ln(&self) -> Result<Self, JetError> {
        self.apply(ElemFn::Ln)
    }

    pub fn sin(&self) -> Result<Self, JetError> {
        self.apply(ElemFn::Sin)
    }

    pub fn cos(&self) -> Result<Self, JetError> {
        self.apply(ElemFn::Cos)
    }

    pub fn sqrt(&self) -> Result<Self, JetError> {
        self.apply(ElemFn::Sqrt)
    }

    /// `∂f/∂x^m` as a jet one order less trustworthy.
    pub fn partial(&self, m: usize) -> Result<Self, JetError> {
        if m >= self.n_vars() {
            return Err(JetError::IndexOutOfRange { index: m, n_vars: self.n_vars() });
        }
        if self.valid_order == 0 {
            return Err(JetError::OrderExhausted { needed: 1, available: 0 });
        }
        let mut coeffs = vec![S::zero(); self.layout.len()];
        for &(target, source, factor) in &self.layout.partials[m] {
            let c = &self.coeffs[source];
            if !c.is_zero() {
                coeffs[target] = c.clone() * &S::from_i64(factor);
            }
        }
        Ok(Jet { layout: self.layout.clone(), coeffs, valid_order: self.valid_order - 1 })
    }

    /// `Σ_m v[m] · ∂f/∂x^m`: the derivative of `f` along the vector field `v`.
    pub fn directional_derivative(&self, v: &[Jet<S>]) -> Result<Self, JetError> {
        if v.len() != self.n_vars() {
            return Err(JetError::MixedJetShapes(self.shape_string(), format!("direction with {} components", v.len())));
        }
        if self.valid_order == 0 {
            return Err(JetError::OrderExhausted { needed: 1, available: 0 });
        }
        let mut acc = self.zero_like().with_valid_order(self.valid_order - 1);
        for (m, vm) in v.iter().enumerate() {
            self.check_shape(vm)?;
            if vm.is_zero() && vm.valid_order >= acc.valid_order {
                continue;
            }
            acc = &acc + &(&self.partial(m)? * vm);
        }
        Ok(acc)
    }
}

impl<S: Scalar> Add for &Jet<S> {
    type Output = Jet<S>;
    fn add(self, rhs: &Jet<S>) -> Jet<S> {
        self.zip_with(rhs, |a, b| a.clone() + b)
    }
}

impl<S: Scalar> Sub for &Jet<S> {
    type Output = Jet<S>;
    fn sub(self, rhs: &Jet<S>) -> Jet<S> {
        self.zip_with(rhs, |a, b| a.clone() - b)
    }
}

impl<S: Scalar> Mul for &Jet<S> {
    type Output = Jet<S>;
    fn mul(self, rhs: &Jet<S>) -> Jet<S> {
        self.product(rhs)
    }
}

impl<S: Scalar> Neg for &Jet<S> {
    type Output = Jet<S>;
    fn neg(self) -> Jet<S> {
        Jet { layout: self.layout.clone(), coeffs: self.coeffs.iter().map(|c| -c.clone()).collect(), valid_order: self.valid_order }
    }
}

macro_rules! owned_ops {
    ($($tr:ident $method:ident),*) => {$(
        impl<S: Scalar> $tr for Jet<S> {
            type Output = Jet<S>;
            fn $method(self, rhs: Jet<S>) -> Jet<S> {
                (&self).$method(&rhs)
            }
        }
        impl<S: Scalar> $tr<&Jet<S>> for Jet<S> {
            type Output = Jet<S>;
            fn $method(self, rhs: &Jet<S>) -> Jet<S> {
                (&self).$method(rhs)
            }
        }
    )*};
}

owned_ops!(Add add, Sub sub, Mul mul);

impl<S: Scalar> Neg for Jet<S> {
    type Output = Jet<S>;
    fn neg(self) -> Jet<S> {
        -&self
    }
}

/// Sum of jets; `None` for an empty iterator.
pub fn sum<S: Scalar>(terms: impl IntoIterator<Item = Jet<S>>) -> Option<Jet<S>> {
    terms.into_iter().reduce(|a, b| &a + &b)
}
