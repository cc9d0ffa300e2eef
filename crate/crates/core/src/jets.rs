//! Truncated Taylor series ("jets") of univariate functions expanded at c = 1.
//!
//! A jet of order K stores a_0..a_K with a_k = f^{(k)}(1)/k!. Arithmetic on
//! jets propagates all derivatives up to order K exactly (up to rounding).

use std::ops::{Add, Div, Mul, Neg, Sub};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct TaylorJet {
    coeffs: Vec<f64>,
}

impl TaylorJet {
    /// Builds a jet from raw Taylor coefficients; the order is `coeffs.len() - 1`.
    pub fn from_coeffs(coeffs: Vec<f64>) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(Error::domain("a jet needs at least one coefficient"));
        }
        Ok(TaylorJet { coeffs })
    }

    /// The constant function `value`.
    pub fn constant(value: f64, order: usize) -> Self {
        let mut coeffs = vec![0.0; order + 1];
        coeffs[0] = value;
        TaylorJet { coeffs }
    }

    /// The identity function c, expanded at c = 1: [1, 1, 0, ...].
    pub fn var(order: usize) -> Self {
        let mut jet = Self::constant(1.0, order);
        if order >= 1 {
            jet.coeffs[1] = 1.0;
        }
        jet
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn value(&self) -> f64 {
        self.coeffs[0]
    }

    /// f^{(k)}(1) = k!·a_k.
    pub fn derivative_at_one(&self, k: usize) -> Result<f64> {
        let a = self
            .coeffs
            .get(k)
            .ok_or_else(|| Error::domain(format!("derivative order {k} exceeds jet order {}", self.order())))?;
        Ok((1..=k).fold(*a, |acc, j| acc * j as f64))
    }

    pub fn scale(&self, s: f64) -> Self {
        TaylorJet {
            coeffs: self.coeffs.iter().map(|a| a * s).collect(),
        }
    }

    pub fn add_scalar(&self, s: f64) -> Self {
        let mut out = self.clone();
        out.coeffs[0] += s;
        out
    }

    fn check_order(&self, other: &Self) -> Result<()> {
        if self.order() != other.order() {
            return Err(Error::domain(format!(
                "jet orders differ: {} vs {}",
                self.order(),
                other.order()
            )));
        }
        Ok(())
    }

    pub fn try_add(&self, other: &Self) -> Result<Self> {
        self.check_order(other)?;
        Ok(TaylorJet {
            coeffs: self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a + b).collect(),
        })
    }

    pub fn try_sub(&self, other: &Self) -> Result<Self> {
        self.check_order(other)?;
        Ok(TaylorJet {
            coeffs: self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a - b).collect(),
        })
    }

    /// Truncated Cauchy product.
    pub fn try_mul(&self, other: &Self) -> Result<Self> {
        self.check_order(other)?;
        let n = self.coeffs.len();
        let coeffs = (0..n)
            .map(|k| (0..=k).map(|j| self.coeffs[j] * other.coeffs[k - j]).sum())
            .collect();
        Ok(TaylorJet { coeffs })
    }

    pub fn try_div(&self, other: &Self) -> Result<Self> {
        self.check_order(other)?;
        let b0 = other.coeffs[0];
        if b0 == 0.0 {
            return Err(Error::domain("jet division by a series with zero constant term"));
        }
        let n = self.coeffs.len();
        let mut q = vec![0.0; n];
        for k in 0..n {
            let s: f64 = (1..=k).map(|j| other.coeffs[j] * q[k - j]).sum();
            q[k] = (self.coeffs[k] - s) / b0;
        }
        Ok(TaylorJet { coeffs: q })
    }

    /// self^exponent for a real exponent; requires a positive constant term.
    pub fn powf(&self, exponent: f64) -> Result<Self> {
        let a = &self.coeffs;
        let a0 = a[0];
        if !(a0 > 0.0) {
            return Err(Error::domain(format!("jet power needs a positive constant term, got {a0}")));
        }
        let n = a.len();
        let mut b = vec![0.0; n];
        b[0] = a0.powf(exponent);
        // From a·b' = p·a'·b:  k a0 b_k = Σ_{j=1}^{k} (p j − (k − j)) a_j b_{k−j}
        for k in 1..n {
            let s: f64 = (1..=k)
                .map(|j| (exponent * j as f64 - (k - j) as f64) * a[j] * b[k - j])
                .sum();
            b[k] = s / (k as f64 * a0);
        }
        Ok(TaylorJet { coeffs: b })
    }

    /// Jet of the derivative d/dc, one order lower (order 0 stays order 0 with a zero).
    pub fn derivative(&self) -> Self {
        if self.coeffs.len() == 1 {
            return TaylorJet::constant(0.0, 0);
        }
        TaylorJet {
            coeffs: self.coeffs[1..]
                .iter()
                .enumerate()
                .map(|(k, a)| (k + 1) as f64 * a)
                .collect(),
        }
    }

    /// Antiderivative with constant term `c0`, one order higher.
    pub fn integral(&self, c0: f64) -> Self {
        let mut coeffs = Vec::with_capacity(self.coeffs.len() + 1);
        coeffs.push(c0);
        coeffs.extend(self.coeffs.iter().enumerate().map(|(k, a)| a / (k + 1) as f64));
        TaylorJet { coeffs }
    }

    /// arccos of the jet, via (arccos u)' = −u'/√(1−u²) integrated
    /// coefficient-wise and anchored at arccos(u₀). Requires |u₀| < 1.
    pub fn acos(&self) -> Result<Self> {
        let u0 = self.coeffs[0];
        if !(u0.abs() < 1.0) {
            return Err(Error::domain(format!("arccos of a jet needs |u0| < 1, got {u0}")));
        }
        let k = self.order();
        if k == 0 {
            return Ok(TaylorJet::constant(u0.acos(), 0));
        }
        let lower = self.truncate(k - 1);
        let one_minus_sq = lower.try_mul(&lower)?.scale(-1.0).add_scalar(1.0);
        let inv_sqrt = one_minus_sq.powf(-0.5)?;
        let slope = self.derivative().try_mul(&inv_sqrt)?.scale(-1.0);
        Ok(slope.integral(u0.acos()))
    }

    /// Drops coefficients above `order`.
    pub fn truncate(&self, order: usize) -> Self {
        TaylorJet {
            coeffs: self.coeffs[..=order.min(self.order())].to_vec(),
        }
    }
}

/// Identity jet of order K at c = 1.
pub fn jet_var(order: usize) -> TaylorJet {
    TaylorJet::var(order)
}

pub fn jet_pow(base: &TaylorJet, exponent: f64) -> Result<TaylorJet> {
    base.powf(exponent)
}

/// Jet of g(c) = arccos(−d/√c) at c = 1.
pub fn jet_sqrt_inv_arccos(d: f64, order: usize) -> Result<TaylorJet> {
    if !(d.abs() < 1.0) {
        return Err(Error::domain(format!("|d| must be below 1, got {d}")));
    }
    jet_var(order).powf(-0.5)?.scale(-d).acos()
}

/// k-th derivative at c = 1.
pub fn derivative_at_one(f: &TaylorJet, k: usize) -> Result<f64> {
    f.derivative_at_one(k)
}

macro_rules! impl_binop {
    ($trait:ident, $method:ident, $inner:ident) => {
        impl $trait for &TaylorJet {
            type Output = TaylorJet;
            /// Panics when the jet orders differ; use the `try_` method to get an error instead.
            fn $method(self, rhs: &TaylorJet) -> TaylorJet {
                self.$inner(rhs).expect("jet operands must have equal order")
            }
        }
        impl $trait for TaylorJet {
            type Output = TaylorJet;
            fn $method(self, rhs: TaylorJet) -> TaylorJet {
                (&self).$method(&rhs)
            }
        }
    };
}

impl_binop!(Add, add, try_add);
impl_binop!(Sub, sub, try_sub);
impl_binop!(Mul, mul, try_mul);
impl_binop!(Div, div, try_div);

impl Neg for TaylorJet {
    type Output = TaylorJet;
    fn neg(self) -> TaylorJet {
        self.scale(-1.0)
    }
}

impl Add<f64> for TaylorJet {
    type Output = TaylorJet;
    fn add(self, rhs: f64) -> TaylorJet {
        self.add_scalar(rhs)
    }
}

impl Mul<f64> for TaylorJet {
    type Output = TaylorJet;
    fn mul(self, rhs: f64) -> TaylorJet {
        self.scale(rhs)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn assert_coeffs(jet: &TaylorJet, expected: &[f64]) {
        assert_eq!(jet.coeffs().len(), expected.len());
        for (a, b) in jet.coeffs().iter().zip(expected) {
            assert!((a - b).abs() < 1e-14, "{:?} vs {:?}", jet.coeffs(), expected);
        }
    }

    #[test]
    fn identity_jets() {
        assert_coeffs(&jet_var(0), &[1.0]);
        assert_coeffs(&jet_var(2), &[1.0, 1.0, 0.0]);
        assert_coeffs(&jet_var(4), &[1.0, 1.0, 0.0, 0.0, 0.0]);
    }

    #[test]
    fn arithmetic_examples() {
        let c = jet_var(2);
        assert_coeffs(&(&c * &c), &[1.0, 2.0, 1.0]);
        assert_coeffs(&(&TaylorJet::constant(1.0, 2) / &c), &[1.0, -1.0, 1.0]);
        assert_coeffs(&(jet_var(1) + (-1.0)), &[0.0, 1.0]);
        assert!(jet_var(2).try_div(&TaylorJet::constant(0.0, 2)).is_err());
        assert!(jet_var(2).try_add(&jet_var(3)).is_err());
    }

    #[test]
    fn power_examples() {
        assert_coeffs(&jet_pow(&jet_var(3), 1.0).unwrap(), jet_var(3).coeffs());
        assert_coeffs(&jet_pow(&jet_var(2), -1.0).unwrap(), &[1.0, -1.0, 1.0]);
        let shifted = jet_var(3) + (-0.25);
        let p = jet_pow(&shifted, -1.5).unwrap();
        assert_relative_eq!(p.value(), 0.75f64.powf(-1.5), max_relative = 1e-15);
        assert_relative_eq!(p.value(), 1.539_600_717_839_002, max_relative = 1e-12);
        assert!(jet_pow(&(jet_var(2) + (-1.0)), 0.5).is_err());
    }

    #[test]
    fn arccos_jet_examples() {
        let j = jet_sqrt_inv_arccos(0.0, 5).unwrap();
        assert_relative_eq!(j.value(), std::f64::consts::FRAC_PI_2, max_relative = 1e-15);
        assert!(j.coeffs()[1..].iter().all(|a| a.abs() < 1e-15));

        let j = jet_sqrt_inv_arccos(0.5, 3).unwrap();
        assert_relative_eq!(j.value(), 2.0 * std::f64::consts::PI / 3.0, max_relative = 1e-15);
        let g = |c: f64| (-0.5 / c.sqrt()).acos();
        let h = 1e-5;
        let fd = (g(1.0 + h) - g(1.0 - h)) / (2.0 * h);
        assert!((j.coeffs()[1] - fd).abs() < 1e-7);
        assert!(jet_sqrt_inv_arccos(1.0, 3).is_err());
    }

    #[test]
    fn derivative_extraction() {
        let inv = &TaylorJet::constant(1.0, 4) / &jet_var(4);
        assert_relative_eq!(derivative_at_one(&inv, 3).unwrap(), -6.0, max_relative = 1e-14);
        let sq = &jet_var(3) * &jet_var(3);
        assert_relative_eq!(derivative_at_one(&sq, 1).unwrap(), 2.0, max_relative = 1e-15);
        assert!(derivative_at_one(&sq, 4).is_err());
    }

    #[test]
    fn h_jet_without_correlation_is_inverse() {
        // d = 0 leaves h(c) = 1/c.
        for l in 1..=10usize {
            let k = l - 1;
            let h = &TaylorJet::constant(1.0, k) / &jet_var(k);
            let expected = if k % 2 == 0 { 1.0 } else { -1.0 } * (1..=k).product::<usize>() as f64;
            assert_relative_eq!(derivative_at_one(&h, k).unwrap(), expected, max_relative = 1e-13);
        }
    }

    /// k-th derivative at 1 by a central finite-difference stencil of step h.
    fn fd_derivative(f: &dyn Fn(f64) -> f64, k: usize, h: f64) -> f64 {
        let binom = |n: usize, r: usize| (0..r).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64);
        (0..=k)
            .map(|i| {
                let sign = if i % 2 == 0 { 1.0 } else { -1.0 };
                sign * binom(k, i) * f(1.0 + (k as f64 / 2.0 - i as f64) * h)
            })
            .sum::<f64>()
            / h.powi(k as i32)
    }

    /// Richardson-extrapolated central differences (error O(h^6)).
    fn fd_richardson(f: &dyn Fn(f64) -> f64, k: usize, h: f64) -> f64 {
        let d1 = fd_derivative(f, k, h);
        let d2 = fd_derivative(f, k, h / 2.0);
        let d3 = fd_derivative(f, k, h / 4.0);
        let e1 = (4.0 * d2 - d1) / 3.0;
        let e2 = (4.0 * d3 - d2) / 3.0;
        (16.0 * e2 - e1) / 15.0
    }

    #[test]
    fn elementary_ops_match_finite_differences() {
        let d = 0.4;
        type Case = (Box<dyn Fn(f64) -> f64>, TaylorJet);
        let k = 4;
        let c = jet_var(k);
        let cases: Vec<Case> = vec![
            (Box::new(|x: f64| x * x * x), &(&c * &c) * &c),
            (Box::new(move |x: f64| 1.0 / (x - d * d)), &TaylorJet::constant(1.0, k) / &(c.clone() + (-d * d))),
            (Box::new(move |x: f64| (x - d * d).powf(-1.5)), (c.clone() + (-d * d)).powf(-1.5).unwrap()),
            (Box::new(|x: f64| x.sqrt()), c.powf(0.5).unwrap()),
            (Box::new(move |x: f64| (-d / x.sqrt()).acos()), jet_sqrt_inv_arccos(d, k).unwrap()),
        ];
        let steps = [0.0, 1e-2, 2e-2, 4e-2, 6e-2];
        for (f, jet) in &cases {
            for kk in 1..=k {
                let fd = fd_richardson(f.as_ref(), kk, steps[kk]);
                let exact = jet.derivative_at_one(kk).unwrap();
                assert!(
                    (fd - exact).abs() <= 1e-6f64.max(1e-6 * exact.abs()),
                    "k={kk} fd={fd} jet={exact}"
                );
            }
        }
    }

    #[test]
    fn division_and_power_agree() {
        for d in [0.0, 0.3, 0.5, 0.9] {
            let base = jet_var(9) + (-d * d);
            let via_div = &TaylorJet::constant(1.0, 9) / &base;
            let via_pow = base.powf(-1.0).unwrap();
            for (a, b) in via_div.coeffs().iter().zip(via_pow.coeffs()) {
                assert!((a - b).abs() <= 1e-12 * a.abs().max(1.0));
            }
        }
    }

    proptest! {
        #[test]
        fn leibniz_rule(f in proptest::collection::vec(-2.0..2.0f64, 7), g in proptest::collection::vec(-2.0..2.0f64, 7), k in 0usize..7) {
            let fj = TaylorJet::from_coeffs(f).unwrap();
            let gj = TaylorJet::from_coeffs(g).unwrap();
            let prod = &fj * &gj;
            let binom = |n: usize, r: usize| (0..r).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64);
            let lhs = prod.derivative_at_one(k).unwrap();
            let rhs: f64 = (0..=k)
                .map(|j| binom(k, j) * fj.derivative_at_one(j).unwrap() * gj.derivative_at_one(k - j).unwrap())
                .sum();
            let scale = (0..=k)
                .map(|j| (binom(k, j) * fj.derivative_at_one(j).unwrap() * gj.derivative_at_one(k - j).unwrap()).abs())
                .sum::<f64>();
            prop_assert!((lhs - rhs).abs() <= 1e-10 * scale.max(1e-300));
        }
    }
}
