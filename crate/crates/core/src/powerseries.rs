//! Finite generalized polynomials `Σ a_k t^(k/2)` with non-negative
//! half-integer exponents.
//!
//! This is the function class every Adomian iterate lives in: products,
//! division by `t²` of series vanishing like `t²`, and integration from 0
//! all stay inside it. The upper seeds `-C·t·(A - √(2t))` need the half
//! steps, the Adomian iterates built from polynomial templates do not.

use std::ops::{Add, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::{compensated_sum, Scalar};

/// Coefficients with magnitude below this are dropped on normalization.
const DROP_BELOW: f64 = 1e-300;

/// Sparse series stored as `(k, a_k)` pairs, `k` counting half powers of `t`.
///
/// Terms are sorted by `k` with no zero coefficients.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(
    from = "Vec<(u32, T)>",
    into = "Vec<(u32, T)>",
    bound(serialize = "T: Scalar + Serialize", deserialize = "T: Scalar + Deserialize<'de>")
)]
pub struct PowerSeries<T> {
    terms: Vec<(u32, T)>,
}

impl<T: Scalar> Default for PowerSeries<T> {
    fn default() -> Self {
        Self::zero()
    }
}

impl<T: Scalar> From<Vec<(u32, T)>> for PowerSeries<T> {
    fn from(terms: Vec<(u32, T)>) -> Self {
        Self::from_terms(terms)
    }
}

impl<T: Scalar> From<PowerSeries<T>> for Vec<(u32, T)> {
    fn from(s: PowerSeries<T>) -> Self {
        s.terms
    }
}

fn negligible<T: Scalar>(a: T) -> bool {
    a == T::zero() || a.abs() < T::lit(DROP_BELOW)
}

impl<T: Scalar> PowerSeries<T> {
    pub fn zero() -> Self {
        Self { terms: Vec::new() }
    }

    /// `coeff · t^(half_exponent/2)`
    pub fn monomial(half_exponent: u32, coeff: T) -> Self {
        Self::from_terms([(half_exponent, coeff)])
    }

    /// `Σ coeffs[i] · t^i` with integer exponents.
    pub fn from_integer_powers(coeffs: &[T]) -> Self {
        Self::from_terms(coeffs.iter().enumerate().map(|(i, &a)| (2 * i as u32, a)))
    }

    /// Builds a series from arbitrary `(k, a_k)` pairs; repeated exponents are summed.
    pub fn from_terms(terms: impl IntoIterator<Item = (u32, T)>) -> Self {
        let mut v: Vec<(u32, T)> = terms.into_iter().collect();
        v.sort_by_key(|&(k, _)| k);
        let mut out: Vec<(u32, T)> = Vec::with_capacity(v.len());
        for (k, a) in v {
            match out.last_mut() {
                Some((lk, la)) if *lk == k => *la += a,
                _ => out.push((k, a)),
            }
        }
        out.retain(|&(_, a)| !negligible(a));
        Self { terms: out }
    }

    /// Builds from a dense buffer indexed by `k`.
    fn from_dense(buf: Vec<T>) -> Self {
        let terms = buf
            .into_iter()
            .enumerate()
            .filter(|&(_, a)| !negligible(a))
            .map(|(k, a)| (k as u32, a))
            .collect();
        Self { terms }
    }

    pub fn terms(&self) -> &[(u32, T)] {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Coefficient of `t^(half_exponent/2)`.
    pub fn coeff(&self, half_exponent: u32) -> T {
        self.terms
            .binary_search_by_key(&half_exponent, |&(k, _)| k)
            .map(|i| self.terms[i].1)
            .unwrap_or_else(|_| T::zero())
    }

    pub fn min_half_exponent(&self) -> Option<u32> {
        self.terms.first().map(|&(k, _)| k)
    }

    pub fn max_half_exponent(&self) -> Option<u32> {
        self.terms.last().map(|&(k, _)| k)
    }

    pub fn scale(&self, factor: T) -> Self {
        Self::from_terms(self.terms.iter().map(|&(k, a)| (k, a * factor)))
    }

    /// Multiplies by `t^(half_steps/2)`.
    pub fn shift(&self, half_steps: u32) -> Self {
        Self {
            terms: self.terms.iter().map(|&(k, a)| (k + half_steps, a)).collect(),
        }
    }

    /// Divides by `t²`; every exponent must be at least 2.
    pub fn scale_div_t2(&self) -> Result<Self> {
        if let Some(&(k, _)) = self.terms.iter().find(|&&(k, _)| k < 4) {
            return Err(Error::NegativeExponent { half_exponent: k });
        }
        Ok(Self {
            terms: self.terms.iter().map(|&(k, a)| (k - 4, a)).collect(),
        })
    }

    /// Antiderivative vanishing at `t = 0`, so `eval(integrate(a), t) = ∫₀ᵗ a`.
    pub fn integrate(&self) -> Self {
        let two = T::lit(2.0);
        Self::from_terms(self.terms.iter().map(|&(k, a)| {
            let kp = k + 2;
            (kp, a * two / T::from_u32(kp).unwrap())
        }))
    }

    /// Term-wise derivative. A `t^(1/2)` term has no derivative in this class.
    pub fn derivative(&self) -> Result<Self> {
        let half = T::half();
        let mut out = Vec::with_capacity(self.terms.len());
        for &(k, a) in &self.terms {
            match k {
                0 => {}
                1 => return Err(Error::NegativeExponent { half_exponent: k }),
                _ => out.push((k - 2, a * T::from_u32(k).unwrap() * half)),
            }
        }
        Ok(Self::from_terms(out))
    }

    /// `∫₀^upper a(t) dt`.
    pub fn definite_integral(&self, upper: T) -> Result<T> {
        self.integrate().eval(upper)
    }

    /// `Σ a_k t^(k/2)` with compensated summation.
    pub fn eval(&self, t: T) -> Result<T> {
        if !(t >= T::zero()) {
            return Err(Error::Domain { t: t.as_f64() });
        }
        let root = t.sqrt();
        Ok(compensated_sum(
            self.terms.iter().map(|&(k, a)| {
                let whole = a * t.powi((k / 2) as i32);
                if k % 2 == 1 { whole * root } else { whole }
            }),
        ))
    }

    /// Pointwise value of the `order`-th derivative at `t > 0`; half-integer
    /// exponents are allowed to go negative here.
    pub fn eval_derivative(&self, order: u32, t: T) -> Result<T> {
        if !(t > T::zero()) && order > 0 {
            return Err(Error::Domain { t: t.as_f64() });
        }
        let half = T::half();
        Ok(compensated_sum(self.terms.iter().map(|&(k, a)| {
            let p = T::from_u32(k).unwrap() * half;
            let mut factor = T::one();
            for j in 0..order {
                factor *= p - T::from_u32(j).unwrap();
            }
            a * factor * t.powf(p - T::from_u32(order).unwrap())
        })))
    }
}

impl<T: Scalar> Add for &PowerSeries<T> {
    type Output = PowerSeries<T>;

    fn add(self, rhs: Self) -> PowerSeries<T> {
        let mut out = Vec::with_capacity(self.terms.len() + rhs.terms.len());
        let (mut i, mut j) = (0, 0);
        let (a, b) = (&self.terms, &rhs.terms);
        while i < a.len() || j < b.len() {
            if j == b.len() || (i < a.len() && a[i].0 < b[j].0) {
                out.push(a[i]);
                i += 1;
            } else if i == a.len() || b[j].0 < a[i].0 {
                out.push(b[j]);
                j += 1;
            } else {
                let s = a[i].1 + b[j].1;
                if !negligible(s) {
                    out.push((a[i].0, s));
                }
                i += 1;
                j += 1;
            }
        }
        PowerSeries { terms: out }
    }
}

impl<T: Scalar> Neg for &PowerSeries<T> {
    type Output = PowerSeries<T>;

    fn neg(self) -> PowerSeries<T> {
        PowerSeries {
            terms: self.terms.iter().map(|&(k, a)| (k, -a)).collect(),
        }
    }
}

impl<T: Scalar> Sub for &PowerSeries<T> {
    type Output = PowerSeries<T>;

    fn sub(self, rhs: Self) -> PowerSeries<T> {
        self + &(-rhs)
    }
}

impl<T: Scalar> Mul for &PowerSeries<T> {
    type Output = PowerSeries<T>;

    fn mul(self, rhs: Self) -> PowerSeries<T> {
        let (Some(ma), Some(mb)) = (self.max_half_exponent(), rhs.max_half_exponent()) else {
            return PowerSeries::zero();
        };
        let mut buf = vec![T::zero(); (ma + mb) as usize + 1];
        for &(ka, a) in &self.terms {
            for &(kb, b) in &rhs.terms {
                buf[(ka + kb) as usize] += a * b;
            }
        }
        PowerSeries::from_dense(buf)
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl<T: Scalar> $tr for PowerSeries<T> {
            type Output = PowerSeries<T>;
            fn $m(self, rhs: Self) -> PowerSeries<T> {
                (&self).$m(&rhs)
            }
        }
        impl<T: Scalar> $tr<&PowerSeries<T>> for PowerSeries<T> {
            type Output = PowerSeries<T>;
            fn $m(self, rhs: &PowerSeries<T>) -> PowerSeries<T> {
                (&self).$m(rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl<T: Scalar> Neg for PowerSeries<T> {
    type Output = PowerSeries<T>;
    fn neg(self) -> PowerSeries<T> {
        -&self
    }
}

impl<T: Scalar> std::iter::Sum for PowerSeries<T> {
    fn sum<I: Iterator<Item = Self>>(iter: I) -> Self {
        iter.fold(PowerSeries::zero(), |acc, s| &acc + &s)
    }
}

impl<'a, T: Scalar> std::iter::Sum<&'a PowerSeries<T>> for PowerSeries<T> {
    fn sum<I: Iterator<Item = &'a PowerSeries<T>>>(iter: I) -> Self {
        iter.fold(PowerSeries::zero(), |acc, s| &acc + s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    type S = PowerSeries<f64>;

    fn t() -> S {
        S::monomial(2, 1.0)
    }

    #[test]
    fn add_examples() {
        assert!((&t() + &(-&t())).is_zero());
        let a = S::from_integer_powers(&[0.0, 2.0, 1.0]);
        assert_eq!(&a + &t(), S::from_integer_powers(&[0.0, 3.0, 1.0]));
        let sum = &S::monomial(1, 1.0) + &t();
        assert_eq!(sum.terms(), &[(1, 1.0), (2, 1.0)]);
    }

    #[test]
    fn mul_examples() {
        assert_eq!(&t() * &t(), S::monomial(4, 1.0));
        // (1 - √2·t^(1/2))² = 1 - 2√2 t^(1/2) + 2t
        let f = S::from_terms([(0, 1.0), (1, -2f64.sqrt())]);
        let sq = &f * &f;
        let expected = [(0, 1.0), (1, -2.0 * 2f64.sqrt()), (2, 2.0)];
        assert_eq!(sq.len(), 3);
        for ((k, a), (ke, ae)) in sq.terms().iter().zip(expected) {
            assert_eq!(*k, ke);
            assert!((a - ae).abs() < 1e-15);
        }
        assert!((&t() * &S::zero()).is_zero());
    }

    #[test]
    fn div_t2_examples() {
        assert_eq!(S::monomial(4, 1.0).scale_div_t2().unwrap(), S::monomial(0, 1.0));
        let a = S::from_integer_powers(&[0.0, 0.0, 1.0, 1.0]);
        assert_eq!(a.scale_div_t2().unwrap(), S::from_integer_powers(&[1.0, 1.0]));
        assert_eq!(
            t().scale_div_t2(),
            Err(Error::NegativeExponent { half_exponent: 2 })
        );
    }

    #[test]
    fn integrate_examples() {
        assert_eq!(S::monomial(0, 1.0).integrate(), t());
        let r = S::monomial(1, 1.0).integrate();
        assert_eq!(r.terms()[0].0, 3);
        assert!((r.terms()[0].1 - 2.0 / 3.0).abs() < 1e-15);
        assert_eq!(S::monomial(4, 3.0).integrate(), S::monomial(6, 1.0));
    }

    #[test]
    fn eval_examples() {
        let a = S::from_integer_powers(&[0.0, 0.5, -1.0]);
        assert_eq!(a.eval(0.5).unwrap(), 0.0);
        // -t(1 - √(2t)) = -t + √2 t^(3/2)
        let beta = S::from_terms([(2, -1.0), (3, 2f64.sqrt())]);
        assert!(beta.eval(0.5).unwrap().abs() < 1e-15);
        assert_eq!(S::monomial(4, 1.0).eval(0.25).unwrap(), 0.0625);
        assert_eq!(a.eval(-0.1), Err(Error::Domain { t: -0.1 }));
    }

    #[test]
    fn derivative_rejects_sqrt_term() {
        assert!(S::monomial(1, 1.0).derivative().is_err());
        assert_eq!(
            S::from_integer_powers(&[5.0, 1.0, 1.0]).derivative().unwrap(),
            S::from_integer_powers(&[1.0, 2.0])
        );
    }

    #[test]
    fn pointwise_derivative_handles_half_powers() {
        // d²/dt² t^(3/2) = (3/4) t^(-1/2)
        let s = S::monomial(3, 1.0);
        let v = s.eval_derivative(2, 0.25).unwrap();
        assert!((v - 0.75 / 0.5).abs() < 1e-14);
    }

    #[test]
    fn json_is_pair_list() {
        let s = S::from_terms([(4, 2.0), (1, -1.0)]);
        let js = serde_json::to_string(&s).unwrap();
        assert_eq!(js, "[[1,-1.0],[4,2.0]]");
        let back: S = serde_json::from_str(&js).unwrap();
        assert_eq!(back, s);
    }

    #[test]
    fn f32_series() {
        let a = PowerSeries::<f32>::from_integer_powers(&[0.0, 1.0]);
        assert_eq!((&a * &a).eval(0.5).unwrap(), 0.25);
    }

    fn small_series() -> impl Strategy<Value = S> {
        prop::collection::vec((0u32..8, -3.0f64..3.0), 0..6).prop_map(S::from_terms)
    }

    fn assert_close(a: &S, b: &S) -> Result<(), TestCaseError> {
        let diff = a - b;
        for &(_, c) in diff.terms() {
            prop_assert!(c.abs() <= 1e-12, "{a:?} vs {b:?}");
        }
        Ok(())
    }

    /// Composite Simpson with many panels; independent of `integrate`.
    fn simpson(a: &S, upper: f64) -> f64 {
        let n = 20_000;
        let h = upper / n as f64;
        let f = |x: f64| a.eval(x).unwrap();
        let mut acc = f(0.0) + f(upper);
        for i in 1..n {
            acc += if i % 2 == 1 { 4.0 } else { 2.0 } * f(i as f64 * h);
        }
        acc * h / 3.0
    }

    proptest! {
        #[test]
        fn add_mul_commute_and_associate(a in small_series(), b in small_series(), c in small_series()) {
            assert_close(&(&a + &b), &(&b + &a))?;
            assert_close(&(&a * &b), &(&b * &a))?;
            assert_close(&(&(&a + &b) + &c), &(&a + &(&b + &c)))?;
            assert_close(&(&(&a * &b) * &c), &(&a * &(&b * &c)))?;
        }

        #[test]
        fn integrate_matches_quadrature(
            a in prop::collection::vec((0u32..8, -3.0f64..3.0), 0..6)
                .prop_map(|v| S::from_terms(v.into_iter().map(|(k, c)| (2 * (k / 2) + 2 * (k % 2), c))))
        ) {
            for upper in [0.1, 0.3, 0.5] {
                let exact = a.integrate().eval(upper).unwrap();
                prop_assert!((exact - simpson(&a, upper)).abs() <= 1e-10);
            }
        }

        #[test]
        fn square_of_linear_vanishing_series_divides_by_t2(
            a in prop::collection::vec((2u32..8, -3.0f64..3.0), 1..6).prop_map(S::from_terms)
        ) {
            let q = (&a * &a).scale_div_t2();
            prop_assert!(q.is_ok());
        }
    }
}
