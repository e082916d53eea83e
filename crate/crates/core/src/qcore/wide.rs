//! Complex binary64 mantissa with an unbounded binary exponent.
//!
//! Bilateral summands carry intermediate products like `q^{-k(k-1)/2}` that
//! leave the f64 range long before the terms themselves become negligible.
//! [`Wide`] keeps the mantissa normalised so that `max(|re|, |im|)` lies in
//! `[0.5, 1)` and moves the scale into `exp`.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;

/// `mant * 2^exp`. Zero is stored as `(0, 0)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Wide {
    mant: Complex64,
    exp: i64,
}

/// Unit roundoff of the mantissa.
pub const UNIT_ROUNDOFF: f64 = f64::EPSILON / 2.0;

/// `x * 2^n` without intermediate overflow.
pub(crate) fn ldexp(mut x: f64, mut n: i64) -> f64 {
    while n > 1000 {
        x *= 2f64.powi(1000);
        n -= 1000;
        if x.is_infinite() {
            return x;
        }
    }
    while n < -1000 {
        x *= 2f64.powi(-1000);
        n += 1000;
        if x == 0.0 {
            return x;
        }
    }
    x * 2f64.powi(n as i32)
}

/// Binary exponent `e` with `x = f * 2^e`, `|f|` in `[0.5, 1)`. `x` must be finite and nonzero.
fn frexp_exp(x: f64) -> i64 {
    let bits = x.abs().to_bits();
    let biased = ((bits >> 52) & 0x7ff) as i64;
    if biased == 0 {
        frexp_exp(x * 2f64.powi(64)) - 64
    } else {
        biased - 1022
    }
}

impl Wide {
    pub const ZERO: Wide = Wide {
        mant: Complex64::new(0.0, 0.0),
        exp: 0,
    };

    pub fn new(re: f64, im: f64) -> Self {
        Self::from_parts(Complex64::new(re, im), 0)
    }

    pub fn from_real(x: f64) -> Self {
        Self::new(x, 0.0)
    }

    pub fn from_complex(z: Complex64) -> Self {
        Self::from_parts(z, 0)
    }

    fn from_parts(mant: Complex64, exp: i64) -> Self {
        let m = mant.re.abs().max(mant.im.abs());
        if m == 0.0 {
            return Self::ZERO;
        }
        assert!(m.is_finite(), "non-finite mantissa in Wide: {mant}");
        let e = frexp_exp(m);
        Wide {
            mant: Complex64::new(ldexp(mant.re, -e), ldexp(mant.im, -e)),
            exp: exp + e,
        }
    }

    pub fn is_zero(&self) -> bool {
        self.mant.re == 0.0 && self.mant.im == 0.0
    }

    /// `log2 |self|`, `-inf` for zero.
    pub fn log2_abs(&self) -> f64 {
        if self.is_zero() {
            f64::NEG_INFINITY
        } else {
            self.mant.norm().log2() + self.exp as f64
        }
    }

    /// `|self|`, saturating to `0` or `inf` outside the f64 range.
    pub fn abs(&self) -> f64 {
        if self.is_zero() {
            0.0
        } else {
            ldexp(self.mant.norm(), self.exp)
        }
    }

    /// Lossy conversion; components saturate outside the f64 range.
    pub fn to_complex(&self) -> Complex64 {
        Complex64::new(ldexp(self.mant.re, self.exp), ldexp(self.mant.im, self.exp))
    }

    pub fn recip(&self) -> Option<Wide> {
        if self.is_zero() {
            return None;
        }
        Some(Self::from_parts(self.mant.inv(), -self.exp))
    }

    pub fn conj(&self) -> Wide {
        Wide {
            mant: self.mant.conj(),
            exp: self.exp,
        }
    }
}

impl From<f64> for Wide {
    fn from(x: f64) -> Self {
        Wide::from_real(x)
    }
}

impl From<Complex64> for Wide {
    fn from(z: Complex64) -> Self {
        Wide::from_complex(z)
    }
}

impl Add for Wide {
    type Output = Wide;
    fn add(self, rhs: Wide) -> Wide {
        if self.is_zero() {
            return rhs;
        }
        if rhs.is_zero() {
            return self;
        }
        let (big, small) = if self.exp >= rhs.exp {
            (self, rhs)
        } else {
            (rhs, self)
        };
        let shift = big.exp - small.exp;
        if shift > 1100 {
            return big;
        }
        let s = Complex64::new(ldexp(small.mant.re, -shift), ldexp(small.mant.im, -shift));
        Wide::from_parts(big.mant + s, big.exp)
    }
}

impl Sub for Wide {
    type Output = Wide;
    fn sub(self, rhs: Wide) -> Wide {
        self + (-rhs)
    }
}

impl Neg for Wide {
    type Output = Wide;
    fn neg(self) -> Wide {
        Wide {
            mant: -self.mant,
            exp: self.exp,
        }
    }
}

impl Mul for Wide {
    type Output = Wide;
    fn mul(self, rhs: Wide) -> Wide {
        if self.is_zero() || rhs.is_zero() {
            return Wide::ZERO;
        }
        Wide::from_parts(self.mant * rhs.mant, self.exp + rhs.exp)
    }
}

impl fmt::Display for Wide {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.exp.abs() < 1000 {
            let z = self.to_complex();
            if z.im >= 0.0 || z.im.is_nan() {
                write!(f, "{}+{}i", z.re, z.im)
            } else {
                write!(f, "{}{}i", z.re, z.im)
            }
        } else {
            write!(f, "({}+{}i)*2^{}", self.mant.re, self.mant.im, self.exp)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn normalises_and_round_trips() {
        for x in [1.0, -3.5, 1e-300, 7e300, 0.1] {
            let w = Wide::from_real(x);
            assert_eq!(w.to_complex().re, x);
            let m = w.mant.re.abs().max(w.mant.im.abs());
            assert!((0.5..1.0).contains(&m));
        }
        assert!(Wide::from_real(0.0).is_zero());
    }

    #[test]
    fn survives_far_outside_f64_range() {
        let big = Wide::from_real(1e300);
        let huge = big * big * big;
        assert!((huge.log2_abs() - 3.0 * 1e300f64.log2()).abs() < 1e-9);
        let back = huge * big.recip().unwrap() * big.recip().unwrap();
        assert!((back.to_complex().re / 1e300 - 1.0).abs() < 1e-14);
        assert_eq!(huge.abs(), f64::INFINITY);
    }

    #[test]
    fn addition_aligns_exponents() {
        let a = Wide::new(1.5, -2.0);
        let b = Wide::new(1e-20, 3.0);
        let s = (a + b).to_complex();
        assert_eq!(s, Complex64::new(1.5 + 1e-20, 1.0));
        let tiny = Wide::from_real(1e-300) * Wide::from_real(1e-300);
        assert_eq!((a + tiny).to_complex(), a.to_complex());
        assert!((a - a).is_zero());
    }

    #[test]
    fn subnormal_inputs() {
        let w = Wide::from_real(5e-320);
        assert!((w.log2_abs() - 5e-320f64.log2()).abs() < 1e-6);
    }
}
