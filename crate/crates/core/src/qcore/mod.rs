//! Scalar kernel: q-shifted factorials, infinite products and series summation.

mod infinite;
mod pochhammer;
mod point;
mod scalar;
mod series;
mod term;
mod wide;

pub use infinite::{infinite_product, qpoch_infinite, QPochResult, Tolerance};
pub use pochhammer::{
    binomial, infinite_product_vanishes, q_triangular, qpoch_finite, qpoch_guarded, qpoch_recip,
    rising_factorial, Guard,
};
pub use point::{IntSym, ParameterPoint, PointRecord, Sym};
pub use scalar::{rational_to_wide, Mode, Rational, Scalar, Value, FLOAT_PRECISION_DIGITS};
pub use series::{sum_series, AdaptiveConfig, SeriesKind, SeriesSum, TermSeries, Truncation};
pub use term::{Evaluated, Term, TermBuilder};
pub use wide::{Wide, UNIT_ROUNDOFF};
