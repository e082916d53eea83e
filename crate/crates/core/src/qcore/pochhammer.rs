//! q-shifted factorials, rising factorials and binomials.

use serde::{Deserialize, Serialize};

use super::scalar::Scalar;
use crate::error::{Error, Result};

/// Pole test applied to denominator factors.
///
/// Exact arithmetic only rejects exact zeros. In float mode a factor with
/// `|x| <= margin` is treated as a pole so that residuals near poles are not
/// mistaken for identity failures.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Guard {
    pub margin: f64,
}

impl Guard {
    pub const STRICT: Guard = Guard { margin: 0.0 };

    pub fn with_margin(margin: f64) -> Self {
        Guard { margin }
    }

    pub fn check<S: Scalar>(&self, x: &S, what: impl FnOnce() -> String) -> Result<()> {
        if x.is_zero() || (!S::is_exact() && x.abs_f64() <= self.margin) {
            Err(Error::Pole(what()))
        } else {
            Ok(())
        }
    }

    /// `num / den` with `den` checked.
    pub fn div<S: Scalar>(&self, num: S, den: &S, what: impl FnOnce() -> String) -> Result<S> {
        self.check(den, what)?;
        Ok(num.checked_div(den).expect("checked nonzero"))
    }
}

impl Default for Guard {
    fn default() -> Self {
        Guard::STRICT
    }
}

/// `∏_{j=lo}^{hi-1} (1 - a q^j)` for `lo <= hi`, optionally guarding every factor.
fn factor_product<S: Scalar>(a: &S, q: &S, lo: i64, hi: i64, guard: Option<&Guard>) -> Result<S> {
    let one = S::one();
    let mut t = a.clone()
        * q.powi(lo)
            .ok_or_else(|| Error::InvalidParameter("q = 0".into()))?;
    let mut acc = S::one();
    for j in lo..hi {
        let f = one.clone() - t.clone();
        if let Some(g) = guard {
            g.check(&f, || format!("1 - ({a})*q^{j} vanishes"))?;
        }
        acc = acc * f;
        t = t * q.clone();
    }
    Ok(acc)
}

/// `(a;q)_k` for any integer `k`, from the quotient definition
/// `(a;q)_∞ / (aq^k;q)_∞`.
pub fn qpoch_finite<S: Scalar>(a: &S, q: &S, k: i64) -> Result<S> {
    qpoch_guarded(a, q, k, &Guard::STRICT)
}

/// As [`qpoch_finite`]; negative-index factors are checked with `guard`.
pub fn qpoch_guarded<S: Scalar>(a: &S, q: &S, k: i64, guard: &Guard) -> Result<S> {
    if k >= 0 {
        factor_product(a, q, 0, k, None)
    } else {
        let den = factor_product(a, q, k, 0, Some(guard))?;
        Ok(den.recip().expect("factors checked nonzero"))
    }
}

/// `1 / (a;q)_k`. Never a pole for `k < 0` (then it is the finite product
/// `∏_{j=1}^{-k} (1 - a q^{-j})`, possibly zero).
pub fn qpoch_recip<S: Scalar>(a: &S, q: &S, k: i64, guard: &Guard) -> Result<S> {
    if k >= 0 {
        let den = factor_product(a, q, 0, k, Some(guard))?;
        Ok(den.recip().expect("factors checked nonzero"))
    } else {
        factor_product(a, q, k, 0, None)
    }
}

/// `q^{k(k-1)/2}`; the exponent is a nonnegative integer for every integer `k`.
pub fn q_triangular<S: Scalar>(q: &S, k: i64) -> S {
    q.powi(k * (k - 1) / 2).expect("nonnegative exponent")
}

/// Rising factorial `(a)_k = a (a+1) ... (a+k-1)`.
pub fn rising_factorial<S: Scalar>(a: &S, k: u32) -> S {
    (0..k).fold(S::one(), |acc, j| acc * (a.clone() + S::from_int(j as i64)))
}

/// Generalised binomial `x (x-1) ... (x-k+1) / k!`.
pub fn binomial<S: Scalar>(x: &S, k: u32) -> S {
    let mut num = S::one();
    let mut den = S::one();
    for j in 0..k {
        num = num * (x.clone() - S::from_int(j as i64));
        den = den * S::from_int(j as i64 + 1);
    }
    num.checked_div(&den).expect("k! is nonzero")
}

/// Whether `(x;q)_∞` is exactly zero, i.e. `x q^j = 1` for some `j >= 0`.
/// Only meaningful in exact arithmetic.
pub fn infinite_product_vanishes<S: Scalar>(x: &S, q: &S) -> bool {
    let one = S::one();
    let mut t = x.clone();
    for _ in 0..100_000 {
        if t == one {
            return true;
        }
        if t.log2_abs() < -1e-12 {
            return false;
        }
        t = t * q.clone();
    }
    false
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qcore::{Rational, Wide};

    fn r(n: i64, d: i64) -> Rational {
        Rational::from_ratio(n, d)
    }

    #[test]
    fn finite_examples() {
        let q = r(1, 4);
        assert_eq!(qpoch_finite(&r(1, 2), &q, 0).unwrap(), r(1, 1));
        assert_eq!(qpoch_finite(&r(1, 2), &q, 1).unwrap(), r(1, 2));
        // 1 / (1 - (1/2)(1/4)^{-1}) = 1 / (1 - 2)
        assert_eq!(qpoch_finite(&r(1, 2), &q, -1).unwrap(), r(-1, 1));
    }

    #[test]
    fn negative_index_pole() {
        // a q^{-2} = 1
        let q = r(1, 3);
        let a = r(1, 9);
        assert!(matches!(qpoch_finite(&a, &q, -2), Err(Error::Pole(_))));
        assert!(qpoch_finite(&a, &q, -1).is_ok());
        assert_eq!(qpoch_recip(&a, &q, -2, &Guard::STRICT).unwrap(), r(0, 1));
    }

    #[test]
    fn recip_matches_inverse() {
        let q = r(2, 7);
        for k in -4..=4 {
            let a = r(3, 5);
            let p = qpoch_finite(&a, &q, k).unwrap();
            let rp = qpoch_recip(&a, &q, k, &Guard::STRICT).unwrap();
            assert_eq!(p * rp, r(1, 1));
        }
    }

    #[test]
    fn rising_and_binomial() {
        assert_eq!(rising_factorial(&r(7, 3), 0), r(1, 1));
        assert_eq!(rising_factorial(&r(3, 1), 3), r(60, 1));
        assert_eq!(rising_factorial(&r(-2, 1), 4), r(0, 1));
        assert_eq!(binomial(&r(9, 2), 0), r(1, 1));
        assert_eq!(binomial(&r(5, 1), 2), r(10, 1));
        assert_eq!(binomial(&r(1, 2), 2), r(-1, 8));
    }

    #[test]
    fn triangular_powers_for_negative_k() {
        let q = r(1, 2);
        assert_eq!(q_triangular(&q, -2), r(1, 8));
        assert_eq!(q_triangular(&q, 0), r(1, 1));
        assert_eq!(q_triangular(&q, 1), r(1, 1));
        assert_eq!(q_triangular(&q, 3), r(1, 8));
    }

    #[test]
    fn vanishing_detection() {
        let q = r(1, 2);
        assert!(infinite_product_vanishes(&r(8, 1), &q));
        assert!(infinite_product_vanishes(&r(1, 1), &q));
        assert!(!infinite_product_vanishes(&r(3, 1), &q));
        assert!(!infinite_product_vanishes(&r(-8, 1), &q));
    }

    #[test]
    fn float_guard_margin() {
        let q = Wide::from_real(0.5);
        let a = Wide::from_real(1.0 - 1e-9);
        let g = Guard::with_margin(1e-6);
        assert!(matches!(qpoch_recip(&a, &q, 2, &g), Err(Error::Pole(_))));
        assert!(qpoch_recip(&a, &q, 2, &Guard::STRICT).is_ok());
    }
}
