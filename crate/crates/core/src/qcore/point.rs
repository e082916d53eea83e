use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use super::scalar::{Scalar, Value};
use crate::error::{Error, Result};

/// Continuous identity parameters.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Sym {
    A,
    B,
    C,
    D,
    E,
    Z,
}

impl Sym {
    pub fn name(self) -> &'static str {
        match self {
            Sym::A => "a",
            Sym::B => "b",
            Sym::C => "c",
            Sym::D => "d",
            Sym::E => "e",
            Sym::Z => "z",
        }
    }
}

/// Integer identity parameters.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum IntSym {
    N,
    L,
}

impl IntSym {
    pub fn name(self) -> &'static str {
        match self {
            IntSym::N => "n",
            IntSym::L => "l",
        }
    }
}

/// Assignment of values to `q` and the identity parameters.
///
/// When `sqrt_a` is set, `a` is always `sqrt_a^2`; square roots are never
/// taken, so very-well-poised parameters `±q√a` have no branch ambiguity.
#[derive(Clone, Debug, PartialEq)]
pub struct ParameterPoint<S> {
    q: S,
    params: BTreeMap<Sym, S>,
    ints: BTreeMap<IntSym, i64>,
    sqrt_a: Option<S>,
}

impl<S: Scalar> ParameterPoint<S> {
    /// Requires `0 < |q| < 1`.
    pub fn new(q: S) -> Result<Self> {
        let l = q.log2_abs();
        if !(l < 0.0) || q.is_zero() {
            return Err(Error::InvalidParameter(format!("base q = {q} must satisfy 0 < |q| < 1")));
        }
        Ok(ParameterPoint {
            q,
            params: BTreeMap::new(),
            ints: BTreeMap::new(),
            sqrt_a: None,
        })
    }

    pub fn q(&self) -> &S {
        &self.q
    }

    pub fn get(&self, sym: Sym) -> Result<&S> {
        self.params.get(&sym).ok_or(Error::MissingParameter(sym.name()))
    }

    /// Several parameters at once, in the order given.
    pub fn vals<const N: usize>(&self, syms: [Sym; N]) -> Result<[S; N]> {
        let v = syms.iter().map(|s| self.get(*s).cloned()).collect::<Result<Vec<_>>>()?;
        Ok(v.try_into().unwrap_or_else(|_| unreachable!()))
    }

    pub fn int(&self, sym: IntSym) -> Result<i64> {
        self.ints.get(&sym).copied().ok_or(Error::MissingParameter(sym.name()))
    }

    pub fn sqrt_a(&self) -> Result<&S> {
        self.sqrt_a.as_ref().ok_or(Error::MissingParameter("sqrt_a"))
    }

    pub fn has_sqrt_a(&self) -> bool {
        self.sqrt_a.is_some()
    }

    /// Sets a parameter. Setting `a` directly drops any stored `sqrt_a`.
    pub fn set(&mut self, sym: Sym, v: S) {
        if sym == Sym::A {
            self.sqrt_a = None;
        }
        self.params.insert(sym, v);
    }

    pub fn with(mut self, sym: Sym, v: S) -> Self {
        self.set(sym, v);
        self
    }

    pub fn set_int(&mut self, sym: IntSym, v: i64) {
        self.ints.insert(sym, v);
    }

    pub fn with_int(mut self, sym: IntSym, v: i64) -> Self {
        self.set_int(sym, v);
        self
    }

    pub fn set_sqrt_a(&mut self, s: S) {
        self.params.insert(Sym::A, s.clone() * s.clone());
        self.sqrt_a = Some(s);
    }

    pub fn with_sqrt_a(mut self, s: S) -> Self {
        self.set_sqrt_a(s);
        self
    }

    pub fn params(&self) -> impl Iterator<Item = (Sym, &S)> {
        self.params.iter().map(|(k, v)| (*k, v))
    }

    pub fn ints(&self) -> impl Iterator<Item = (IntSym, i64)> + '_ {
        self.ints.iter().map(|(k, v)| (*k, *v))
    }

    pub fn map<T: Scalar>(&self, f: impl Fn(&S) -> T) -> ParameterPoint<T> {
        ParameterPoint {
            q: f(&self.q),
            params: self.params.iter().map(|(k, v)| (*k, f(v))).collect(),
            ints: self.ints.clone(),
            sqrt_a: self.sqrt_a.as_ref().map(&f),
        }
    }

    pub fn to_record(&self) -> PointRecord {
        PointRecord {
            q: self.q.to_value(),
            params: self.params.iter().map(|(k, v)| (k.name().to_string(), v.to_value())).collect(),
            ints: self.ints.iter().map(|(k, v)| (k.name().to_string(), *v)).collect(),
            sqrt_a: self.sqrt_a.as_ref().map(Scalar::to_value),
        }
    }

    pub fn from_record(rec: &PointRecord) -> Result<Self> {
        let parse = |v: &Value| {
            S::from_value(v).ok_or_else(|| Error::InvalidParameter(format!("cannot read value {v:?}")))
        };
        let mut p = ParameterPoint::new(parse(&rec.q)?)?;
        for (k, v) in &rec.params {
            let sym = match k.as_str() {
                "a" => Sym::A,
                "b" => Sym::B,
                "c" => Sym::C,
                "d" => Sym::D,
                "e" => Sym::E,
                "z" => Sym::Z,
                other => return Err(Error::InvalidParameter(format!("unknown symbol `{other}`"))),
            };
            p.set(sym, parse(v)?);
        }
        for (k, v) in &rec.ints {
            let sym = match k.as_str() {
                "n" => IntSym::N,
                "l" => IntSym::L,
                other => return Err(Error::InvalidParameter(format!("unknown symbol `{other}`"))),
            };
            p.set_int(sym, *v);
        }
        if let Some(s) = &rec.sqrt_a {
            p.set_sqrt_a(parse(s)?);
        }
        Ok(p)
    }
}

impl<S: Scalar> fmt::Display for ParameterPoint<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "q={}", self.q)?;
        if let Some(s) = &self.sqrt_a {
            write!(f, " sqrt_a={s}")?;
        }
        for (k, v) in &self.params {
            if *k == Sym::A && self.sqrt_a.is_some() {
                continue;
            }
            write!(f, " {}={}", k.name(), v)?;
        }
        for (k, v) in &self.ints {
            write!(f, " {}={}", k.name(), v)?;
        }
        Ok(())
    }
}

/// Serialisable, lossless form of a [`ParameterPoint`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PointRecord {
    pub q: Value,
    pub params: BTreeMap<String, Value>,
    pub ints: BTreeMap<String, i64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub sqrt_a: Option<Value>,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qcore::{Rational, Wide};

    #[test]
    fn base_must_be_inside_unit_disc() {
        assert!(ParameterPoint::new(Rational::from_ratio(1, 2)).is_ok());
        assert!(ParameterPoint::new(Rational::from_ratio(-1, 1)).is_err());
        assert!(ParameterPoint::new(Rational::from_ratio(0, 1)).is_err());
        assert!(ParameterPoint::new(Wide::new(0.6, 0.8)).is_err());
        assert!(ParameterPoint::new(Wide::new(0.6, 0.7)).is_ok());
    }

    #[test]
    fn sqrt_a_defines_a() {
        let p = ParameterPoint::new(Rational::from_ratio(1, 3))
            .unwrap()
            .with_sqrt_a(Rational::from_ratio(2, 5));
        assert_eq!(p.get(Sym::A).unwrap(), &Rational::from_ratio(4, 25));
        let p = p.with(Sym::A, Rational::from_ratio(1, 7));
        assert!(!p.has_sqrt_a());
    }

    #[test]
    fn record_round_trip() {
        let p = ParameterPoint::new(Wide::new(0.3, 0.1))
            .unwrap()
            .with(Sym::B, Wide::new(-2.0, 0.5))
            .with_sqrt_a(Wide::new(0.25, 0.0))
            .with_int(IntSym::N, 4);
        let back = ParameterPoint::<Wide>::from_record(&p.to_record()).unwrap();
        assert_eq!(back, p);
    }
}
