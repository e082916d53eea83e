use std::fmt::{Debug, Display};
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use super::wide::{Wide, UNIT_ROUNDOFF};

pub type Rational = BigRational;

/// Decimal digits carried by the float backend (binary64 mantissa).
pub const FLOAT_PRECISION_DIGITS: u32 = 15;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Exact,
    Float,
}

impl Display for Mode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Mode::Exact => "exact",
            Mode::Float => "float",
        })
    }
}

impl FromStr for Mode {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "exact" => Ok(Mode::Exact),
            "float" => Ok(Mode::Float),
            other => Err(format!("unknown mode `{other}` (expected exact|float)")),
        }
    }
}

/// Serialised form of a scalar: `"p/q"` for rationals, `[re, im]` for floats.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Value {
    Complex([f64; 2]),
    Text(String),
}

/// Field operations shared by the exact and float backends.
///
/// Division is never an operator: [`Scalar::recip`] returns `None` on zero so
/// callers turn it into a pole error instead of a NaN or a panic.
pub trait Scalar:
    Clone
    + Debug
    + Display
    + PartialEq
    + Send
    + Sync
    + 'static
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Neg<Output = Self>
{
    const MODE: Mode;

    fn zero() -> Self;
    fn one() -> Self;
    fn from_int(v: i64) -> Self;
    /// `num / den`; `den` must be nonzero.
    fn from_ratio(num: i64, den: i64) -> Self;
    fn is_zero(&self) -> bool;
    fn recip(&self) -> Option<Self>;
    /// `log2 |self|`, `-inf` for zero.
    fn log2_abs(&self) -> f64;
    fn to_wide(&self) -> Wide;
    fn to_value(&self) -> Value;
    fn from_value(v: &Value) -> Option<Self>;

    /// Relative rounding unit of one arithmetic operation (0 when exact).
    fn rounding_unit() -> f64;

    fn is_exact() -> bool {
        Self::MODE == Mode::Exact
    }

    /// `|self|` as f64, saturating.
    fn abs_f64(&self) -> f64 {
        self.log2_abs().exp2()
    }

    fn checked_div(&self, rhs: &Self) -> Option<Self> {
        rhs.recip().map(|r| self.clone() * r)
    }

    /// Integer power; `None` for a negative power of zero.
    fn powi(&self, k: i64) -> Option<Self> {
        let base = if k < 0 { self.recip()? } else { self.clone() };
        let mut e = k.unsigned_abs();
        let mut acc = Self::one();
        let mut sq = base;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc * sq.clone();
            }
            e >>= 1;
            if e > 0 {
                sq = sq.clone() * sq;
            }
        }
        Some(acc)
    }
}

fn log2_bigint(x: &BigInt) -> f64 {
    let bits = x.bits();
    if bits <= 1000 {
        x.to_f64().map(|v| v.abs().log2()).unwrap_or(f64::INFINITY)
    } else {
        let shift = bits - 60;
        let top: BigInt = x.abs() >> shift;
        top.to_f64().unwrap().log2() + shift as f64
    }
}

impl Scalar for Rational {
    const MODE: Mode = Mode::Exact;

    fn zero() -> Self {
        Zero::zero()
    }
    fn one() -> Self {
        One::one()
    }
    fn from_int(v: i64) -> Self {
        Rational::from_integer(BigInt::from(v))
    }
    fn from_ratio(num: i64, den: i64) -> Self {
        Rational::new(BigInt::from(num), BigInt::from(den))
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn recip(&self) -> Option<Self> {
        if Zero::is_zero(self) {
            None
        } else {
            Some(num_traits::Inv::inv(self))
        }
    }
    fn log2_abs(&self) -> f64 {
        if Zero::is_zero(self) {
            f64::NEG_INFINITY
        } else {
            log2_bigint(self.numer()) - log2_bigint(self.denom())
        }
    }
    fn to_wide(&self) -> Wide {
        match self.to_f64() {
            Some(v) if v.is_finite() && (v != 0.0 || Zero::is_zero(self)) => Wide::from_real(v),
            _ => {
                // Outside the f64 range: rebuild from the binary logarithm.
                let l = self.log2_abs();
                let whole = l.floor();
                let sign = if self.is_negative() { -1.0 } else { 1.0 };
                Wide::from_real(sign * (l - whole).exp2())
                    * Wide::from_real(2.0).powi(whole as i64).expect("nonzero base")
            }
        }
    }
    fn to_value(&self) -> Value {
        Value::Text(self.to_string())
    }
    fn from_value(v: &Value) -> Option<Self> {
        match v {
            Value::Text(s) => s.parse().ok(),
            Value::Complex(_) => None,
        }
    }
    fn rounding_unit() -> f64 {
        0.0
    }
}

impl Scalar for Wide {
    const MODE: Mode = Mode::Float;

    fn zero() -> Self {
        Wide::ZERO
    }
    fn one() -> Self {
        Wide::from_real(1.0)
    }
    fn from_int(v: i64) -> Self {
        Wide::from_real(v as f64)
    }
    fn from_ratio(num: i64, den: i64) -> Self {
        Wide::from_real(num as f64 / den as f64)
    }
    fn is_zero(&self) -> bool {
        Wide::is_zero(self)
    }
    fn recip(&self) -> Option<Self> {
        Wide::recip(self)
    }
    fn log2_abs(&self) -> f64 {
        Wide::log2_abs(self)
    }
    fn abs_f64(&self) -> f64 {
        self.abs()
    }
    fn to_wide(&self) -> Wide {
        *self
    }
    fn to_value(&self) -> Value {
        let z = self.to_complex();
        if z.re.is_finite() && z.im.is_finite() && (self.log2_abs() > -1000.0 || self.is_zero()) {
            Value::Complex([z.re, z.im])
        } else {
            Value::Text(self.to_string())
        }
    }
    fn from_value(v: &Value) -> Option<Self> {
        match v {
            Value::Complex([re, im]) => Some(Wide::new(*re, *im)),
            Value::Text(_) => None,
        }
    }
    fn rounding_unit() -> f64 {
        UNIT_ROUNDOFF
    }
}

/// Exact rational to complex float, usable for mixed-mode comparisons.
pub fn rational_to_wide(r: &Rational) -> Wide {
    r.to_wide()
}
