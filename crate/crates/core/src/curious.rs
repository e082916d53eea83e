//! Summations whose summands are not hypergeometric terms.
//!
//! The q-identities share the mixing ratio `R(k) = M1(k)/M2(k)` with
//! `M1(k) = 1 - bq^k` and `M2(k) = c - q^k`. It is recomputed for every `k`;
//! term ratios are not products of fixed factors, so no recurrence is used.

use crate::error::{Error, Result};
use crate::identity::{
    div, lookup, no_constraints, ratio, sides, Backend, Constraint, Degeneration, Draw,
    IdentityRecord, Kind, LinkPoints,
};
use crate::qcore::{
    binomial, infinite_product, qpoch_finite, rising_factorial, sum_series, AdaptiveConfig, Guard,
    IntSym, ParameterPoint, Rational, Scalar, SeriesKind, SeriesSum, Sym, Term, TermBuilder,
    TermSeries, Tolerance, Truncation, Wide,
};

const MAX_N: i64 = 8;

fn degenerate(e: Error) -> Error {
    match e {
        Error::Pole(s) => Error::DegenerateInput(s),
        other => other,
    }
}

fn nonneg(k: i64) -> Result<u32> {
    u32::try_from(k).map_err(|_| Error::InvalidParameter(format!("index {k} must be >= 0")))
}

/// The mixing factors at one index.
#[derive(Clone, Debug)]
pub struct Mixing<S> {
    pub m1: S,
    pub m2: S,
    /// `M1/M2`
    pub r: S,
    /// `M2/M1`
    pub r_inv: S,
}

impl<S: Scalar> Mixing<S> {
    /// Fails when `c = q^k` (degenerate) or `bq^k = 1` (pole).
    pub fn at(b: &S, c: &S, q: &S, k: i64, g: &Guard) -> Result<Self> {
        let qk = q.powi(k).expect("q nonzero");
        let m1 = S::one() - b.clone() * qk.clone();
        let m2 = c.clone() - qk;
        g.check(&m2, || format!("c = q^{k}")).map_err(degenerate)?;
        g.check(&m1, || format!("1 - bq^{k} vanishes"))?;
        Ok(Mixing {
            r: div(&m1, &m2, "R")?,
            r_inv: div(&m2, &m1, "1/R")?,
            m1,
            m2,
        })
    }
}

// Abel and Hagen–Rothe

fn abel_lhs<S: Scalar>(p: &ParameterPoint<S>, _: &Guard) -> Result<Term<S>> {
    let [a, c] = p.vals([Sym::A, Sym::C])?;
    Ok(Term::scalar((a + c).powi(p.int(IntSym::N)?).expect("n >= 0")))
}

fn abel_summand<S: Scalar>(p: &ParameterPoint<S>, k: i64, _: &Guard) -> Result<Term<S>> {
    let [a, b, c] = p.vals([Sym::A, Sym::B, Sym::C])?;
    let n = p.int(IntSym::N)?;
    if a.is_zero() {
        return Err(Error::DegenerateInput("a = 0".into()));
    }
    let bk = b * S::from_int(k);
    let head = (a.clone() + bk.clone())
        .powi(k - 1)
        .ok_or_else(|| Error::DegenerateInput(format!("a + bk = 0 at k = {k}")))?;
    let tail = (c - bk).powi(n - k).expect("k <= n");
    Ok(Term::scalar(binomial(&S::from_int(n), nonneg(k)?) * a * head * tail))
}

fn abel_sample<S: Backend>(d: &mut Draw) -> Result<ParameterPoint<S>> {
    let p = d.base::<S>()?;
    let n = d.n(MAX_N);
    Ok(p
        .with(Sym::A, d.value(0.2, 5.0))
        .with(Sym::B, d.value(0.2, 5.0))
        .with(Sym::C, d.value(0.2, 5.0))
        .with_int(IntSym::N, n))
}

fn abel_to_binomial(p: &ParameterPoint<Rational>, _: i64) -> Result<LinkPoints> {
    Ok(LinkPoints {
        source: p.clone().with(Sym::B, Rational::zero()),
        target: p.clone(),
        factor: Term::one(),
    })
}

fn rothe_lhs<S: Scalar>(p: &ParameterPoint<S>, _: &Guard) -> Result<Term<S>> {
    let [a, c] = p.vals([Sym::A, Sym::C])?;
    Ok(Term::scalar(binomial(&(a + c), nonneg(p.int(IntSym::N)?)?)))
}

fn rothe_summand<S: Scalar>(p: &ParameterPoint<S>, k: i64, _: &Guard) -> Result<Term<S>> {
    let [a, b, c] = p.vals([Sym::A, Sym::B, Sym::C])?;
    let n = p.int(IntSym::N)?;
    let bk = b * S::from_int(k);
    let abk = a.clone() + bk.clone();
    let lead = a
        .checked_div(&abk)
        .ok_or_else(|| Error::DegenerateInput(format!("a + bk = 0 at k = {k}")))?;
    Ok(Term::scalar(
        lead * binomial(&abk, nonneg(k)?) * binomial(&(c - bk), nonneg(n - k)?),
    ))
}

fn rothe_to_chu(p: &ParameterPoint<Rational>, _: i64) -> Result<LinkPoints> {
    abel_to_binomial(p, 0)
}

/// `|n! · HR(ma, mb, mc) / m^n - (a+c)^n|`, evaluated exactly.
///
/// The Hagen–Rothe sum at scaled parameters grows like `m^n (a+c)^n / n!`;
/// the normalised difference decays like `1/m`.
pub fn abel_from_rothe_probe(a: &Rational, b: &Rational, c: &Rational, n: i64, m: i64) -> Result<f64> {
    let mm = Rational::from_int(m);
    let p = ParameterPoint::new(Rational::from_ratio(1, 2))?
        .with(Sym::A, a.clone() * mm.clone())
        .with(Sym::B, b.clone() * mm.clone())
        .with(Sym::C, c.clone() * mm.clone())
        .with_int(IntSym::N, n);
    let mut s = Rational::zero();
    for k in 0..=n {
        s += rothe_summand(&p, k, &Guard::STRICT)?.into_exact()?;
    }
    let fact = (1..=n).fold(Rational::one(), |acc, j| acc * Rational::from_int(j));
    let scaled = s * fact * mm.powi(-n).expect("m nonzero");
    let target = (a.clone() + c.clone()).powi(n).expect("n >= 0");
    Ok((scaled - target).abs_f64())
}

// curious Pfaff–Saalschütz extension

fn cps_lhs<S: Scalar>(p: &ParameterPoint<S>, g: &Guard) -> Result<Term<S>> {
    let c = p.get(Sym::C)?.clone();
    let n = nonneg(p.int(IntSym::N)?)?;
    let two_c = c.clone() + c.clone() + S::one();
    let num = rising_factorial(&two_c, n);
    let den = rising_factorial(&(c + S::one()), n);
    Ok(Term::scalar(g.div(num, &den, || "(c+1)_n".into()).map_err(degenerate)?))
}

fn cps_summand<S: Scalar>(p: &ParameterPoint<S>, k: i64, g: &Guard) -> Result<Term<S>> {
    cps_summand_inner(p, k, g).map_err(degenerate)
}

fn cps_summand_inner<S: Scalar>(p: &ParameterPoint<S>, k: i64, g: &Guard) -> Result<Term<S>> {
    let [a, b, c] = p.vals([Sym::A, Sym::B, Sym::C])?;
    let n = p.int(IntSym::N)?;
    let (ku, nu) = (nonneg(k)?, nonneg(n)?);
    let one = S::one();
    let ak = a.clone() + S::from_int(k);
    g.check(&ak, || format!("a + k = 0 at k = {k}"))?;
    let y = div(&b, &ak, "b/(a+k)")?;
    let amc = a.clone() - c.clone();
    // Both prefactor ratios are identically 1 at k = 0.
    let (pre_num, d1, d2) = if k == 0 {
        (one.clone(), one.clone(), one.clone())
    } else {
        let pre = (b.clone() + amc.clone() * a.clone()) * (b.clone() + ak.clone() * ak.clone());
        (pre, b.clone() + amc * ak.clone(), b + a.clone() * ak)
    };
    g.check(&d1, || format!("b + (a-c)(a+k) = 0 at k = {k}"))?;
    g.check(&d2, || format!("b + a(a+k) = 0 at k = {k}"))?;
    let top = a.clone() + c.clone() + y.clone() + one.clone();
    let num = rising_factorial(&S::from_int(-n), ku)
        * rising_factorial(&c, ku)
        * rising_factorial(&(a.clone() - c.clone() + y.clone()), ku)
        * rising_factorial(&top, nu);
    let den = rising_factorial(&one, ku)
        * rising_factorial(&(-c - S::from_int(n)), ku)
        * rising_factorial(&top, ku)
        * rising_factorial(&(a + y + one), nu)
        * d1
        * d2;
    Ok(Term::scalar(g.div(pre_num * num, &den, || "shifted factorial".into())?))
}

fn cps_sample<S: Backend>(d: &mut Draw) -> Result<ParameterPoint<S>> {
    let p = d.base::<S>()?;
    let n = d.n(MAX_N);
    Ok(p
        .with(Sym::A, d.value(0.2, 4.0))
        .with(Sym::B, d.value(0.2, 4.0))
        .with(Sym::C, d.value(0.2, 4.0))
        .with_int(IntSym::N, n))
}

// curious q-Pfaff–Saalschütz extension

fn cqps_lhs<S: Scalar>(p: &ParameterPoint<S>, g: &Guard) -> Result<Term<S>> {
    let q = p.q();
    let c = p.get(Sym::C)?.clone();
    let n = p.int(IntSym::N)?;
    let cq = c.clone() * q.clone();
    let mut t = TermBuilder::new(q, *g);
    t.poch(&(c * cq.clone()), n)?.rpoch(&cq, n).map_err(degenerate)?;
    Ok(t.finish())
}

fn cqps_summand<S: Scalar>(p: &ParameterPoint<S>, k: i64, g: &Guard) -> Result<Term<S>> {
    cqps_summand_inner(p, k, g).map_err(degenerate)
}

fn cqps_summand_inner<S: Scalar>(p: &ParameterPoint<S>, k: i64, g: &Guard) -> Result<Term<S>> {
    let q = p.q();
    let [a, b, c] = p.vals([Sym::A, Sym::B, Sym::C])?;
    let n = p.int(IntSym::N)?;
    let one = S::one();
    let u = a.clone() - q.powi(-k).expect("q nonzero");
    g.check(&u, || format!("a = q^-{k}"))?;
    let x = div(&(b.clone() + a.clone() * u.clone()), &u, "X")?;
    let amc = a.clone() - c.clone();
    let am1 = a - one.clone();
    // Both prefactor ratios are identically 1 at k = 0.
    let (pre_num, d1, d2) = if k == 0 {
        (one.clone(), one.clone(), one.clone())
    } else {
        let pre = (b.clone() + amc.clone() * am1.clone()) * (b.clone() + u.clone() * u.clone());
        (pre, b.clone() + amc * u.clone(), b + am1 * u)
    };
    let qn = q.powi(-n).expect("q nonzero");
    let cqx = c.clone() * q.clone() * x.clone();
    let mut t = TermBuilder::new(q, *g);
    t.mul(pre_num)
        .div(&d1, "b + (a-c)(a-q^-k)")?
        .div(&d2, "b + (a-1)(a-q^-k)")?
        .poch(&qn, k)?
        .poch(&c, k)?
        .poch(&div(&x, &c, "X/c")?, k)?
        .rpoch(q, k)?
        .rpoch(&div(&qn, &c, "q^-n/c")?, k)?
        .rpoch(&cqx, k)?
        .poch(&cqx, n)?
        .rpoch(&(q.clone() * x), n)?
        .pow(q, k)?;
    Ok(t.finish())
}

fn cqps_sample<S: Backend>(d: &mut Draw) -> Result<ParameterPoint<S>> {
    let p = d.base::<S>()?;
    let n = d.n(MAX_N);
    Ok(p
        .with(Sym::A, d.value(0.2, 4.0))
        .with(Sym::B, d.value(0.2, 4.0))
        .with(Sym::C, d.value(0.2, 4.0))
        .with_int(IntSym::N, n))
}

// nonterminating curious identity

fn cnt_lhs<S: Scalar>(p: &ParameterPoint<S>, g: &Guard) -> Result<Term<S>> {
    let q = p.q();
    let b = p.get(Sym::B)?.clone();
    let bq = b.clone() * q.clone();
    let mut t = TermBuilder::new(q, *g);
    t.inf(&(b * bq.clone()))?.rinf(&bq)?;
    Ok(t.finish())
}

fn cnt_summand<S: Scalar>(p: &ParameterPoint<S>, k: i64, g: &Guard) -> Result<Term<S>> {
    let q = p.q();
    let [a, b, c] = p.vals([Sym::A, Sym::B, Sym::C])?;
    let qk = q.powi(k).expect("q nonzero");
    let one = S::one();
    let y = a.clone() + b.clone() * qk.clone();
    let w = c.clone() - a.clone() * y.clone();
    let a1 = a.clone() + one;
    let ab = a + b.clone();
    let bq = b.clone() * q.clone();
    let ybq_w = div(&(y.clone() * bq.clone()), &w, "Ybq/W")?;
    let mut t = TermBuilder::new(q, *g);
    t.mul((c.clone() - a1.clone() * ab.clone()) * (c.clone() - y.clone() * y.clone()))
        .div(&(c.clone() - a1 * y.clone()), "c - (a+1)Y")?
        .div(&(c - ab * y.clone()), "c - (a+b)Y")?
        .poch(&b, k)?
        .poch(&div(&y, &w, "Y/W")?, k)?
        .inf(&(ybq_w.clone() * b * qk))?
        .rpoch(q, k)?
        .rinf(&ybq_w)?
        .pow(&bq, k)?;
    Ok(t.finish())
}

fn cnt_sample<S: Backend>(d: &mut Draw) -> Result<ParameterPoint<S>> {
    let p = d.base::<S>()?;
    let w: S = d.value(0.05, 0.85);
    let b = div(&w, p.q(), "b")?;
    Ok(p
        .with(Sym::A, d.value(0.1, 2.0))
        .with(Sym::B, b)
        .with(Sym::C, d.value(0.5, 6.0)))
}

fn cnt_domain(p: &ParameterPoint<Wide>) -> Result<Vec<Constraint>> {
    Ok(vec![ratio("bq", *p.get(Sym::B)? * *p.q())])
}

// Theorem: terminating curious summation

fn ts_lhs<S: Scalar>(p: &ParameterPoint<S>, g: &Guard) -> Result<Term<S>> {
    let q = p.q();
    let [a, d] = p.vals([Sym::A, Sym::D])?;
    let n = p.int(IntSym::N)?;
    let ad = a * d.clone();
    let mut t = TermBuilder::new(q, *g);
    t.poch(&div(q, &d, "q/d")?, n)?.rpoch(&ad, n)?.pow(&ad, n)?;
    Ok(t.finish())
}

fn ts_summand<S: Scalar>(p: &ParameterPoint<S>, k: i64, g: &Guard) -> Result<Term<S>> {
    let q = p.q();
    let [a, b, c, d] = p.vals([Sym::A, Sym::B, Sym::C, Sym::D])?;
    let n = p.int(IntSym::N)?;
    let one = S::one();
    let mk = Mixing::at(&b, &c, q, k, g)?;
    let mn = Mixing::at(&b, &c, q, n, g)?;
    let (qk, qn) = (q.powi(k).expect("q nonzero"), q.powi(n).expect("q nonzero"));
    let a_r = a.clone() * mk.r_inv.clone();
    let mut t = TermBuilder::new(q, *g);
    t.mul(mn.m1.clone())
        .div(&mk.m1, "1 - bq^k")?
        .pow(&mk.r, n)?
        .poch(&qn.recip().expect("q nonzero"), k)?
        .poch(&(a.clone() * qn.clone()), k)?
        .rpoch(q, k)?
        .rpoch(&(a.clone() * d.clone()), k)?
        .mul(one.clone() - a.clone() * qn * mn.r_inv)
        .div(&(one.clone() - a_r.clone() * qk.clone()), "1 - aq^k/R(k)")?
        .mul(one.clone() - mk.r.clone() * qk)
        .div(&(one - mk.r.clone()), "1 - R(k)")?
        .poch(&(a_r.clone() * d), k)?
        .rpoch(&a_r, k)?
        .poch(&a_r, n)?
        .rpoch(&(q.clone() * mk.r), n)?
        .pow(q, k)?;
    Ok(t.finish())
}

fn ts_sample<S: Backend>(d: &mut Draw) -> Result<ParameterPoint<S>> {
    let p = d.base::<S>()?;
    let n = d.n(MAX_N);
    Ok(p
        .with(Sym::A, d.value(0.2, 3.0))
        .with(Sym::B, d.value(0.2, 3.0))
        .with(Sym::C, d.value(0.2, 8.0))
        .with(Sym::D, d.value(0.2, 3.0))
        .with_int(IntSym::N, n))
}

fn ts_to_qps(p: &ParameterPoint<Rational>, _: i64) -> Result<LinkPoints> {
    let q = p.q();
    let [a, b, d] = p.vals([Sym::A, Sym::B, Sym::D])?;
    let n = p.int(IntSym::N)?;
    let ad = a.clone() * d;
    let target = ParameterPoint::new(q.clone())?
        .with(Sym::A, div(&ad, &b, "ad/b")?)
        .with(Sym::B, a.clone() * q.powi(n).expect("q nonzero"))
        .with(Sym::C, ad)
        .with_int(IntSym::N, n);
    let mut k = TermBuilder::new(q, Guard::STRICT);
    k.pow(&b, n)?.poch(&div(&(a * q.clone()), &b, "aq/b")?, n)?.rpoch(&b, n)?;
    Ok(LinkPoints {
        source: p.clone().with(Sym::C, div(&Rational::one(), &b, "1/b")?),
        target,
        factor: k.finish(),
    })
}

// Theorem: nonterminating curious summation

fn tns_lhs<S: Scalar>(p: &ParameterPoint<S>, g: &Guard) -> Result<Term<S>> {
    let q = p.q();
    let [a, b, c, d] = p.vals([Sym::A, Sym::B, Sym::C, Sym::D])?;
    let one = S::one();
    let den = one.clone() - b + a.clone() * (one - c);
    let mut t = TermBuilder::new(q, *g);
    t.div(&den, "1 - b + a(1-c)")?.inf(&(a.clone() * d))?.rinf(&(a * q.clone()))?;
    Ok(t.finish())
}

fn tns_summand<S: Scalar>(p: &ParameterPoint<S>, k: i64, g: &Guard) -> Result<Term<S>> {
    let q = p.q();
    let [a, b, c, d] = p.vals([Sym::A, Sym::B, Sym::C, Sym::D])?;
    let m = Mixing::at(&b, &c, q, k, g)?;
    let qk = q.powi(k).expect("q nonzero");
    let aq = a * q.clone();
    let mut t = TermBuilder::new(q, *g);
    t.div(&m.m1, "1 - bq^k")?
        .pow(&m.r, k)?
        .mul(S::one() - m.r.clone() * qk)
        .poch(&div(q, &d, "q/d")?, k)?
        .rpoch(q, k)?
        .rpoch(&aq, k)?
        .poch(&(aq * m.r_inv), k - 1)?
        .inf(&(m.r.clone() * d.clone()))?
        .rinf(&m.r)?
        .pow(&d, k)?;
    Ok(t.finish())
}

fn tns_sample<S: Backend>(d: &mut Draw) -> Result<ParameterPoint<S>> {
    let p = d.base::<S>()?;
    let c: S = d.value(0.5, 6.0);
    let dd = c.clone() * d.value(0.05, 0.7);
    Ok(p
        .with(Sym::A, d.value(0.05, 2.0))
        .with(Sym::B, d.value(0.05, 2.0))
        .with(Sym::C, c)
        .with(Sym::D, dd))
}

fn d_over_c(p: &ParameterPoint<Wide>) -> Result<Vec<Constraint>> {
    let [c, d] = p.vals([Sym::C, Sym::D])?;
    Ok(vec![ratio("d/c", div(&d, &c, "d/c")?)])
}

fn tns_to_qgauss(p: &ParameterPoint<Rational>, _: i64) -> Result<LinkPoints> {
    let q = p.q();
    let [a, b, d] = p.vals([Sym::A, Sym::B, Sym::D])?;
    let target = ParameterPoint::new(q.clone())?
        .with(Sym::A, div(q, &d, "q/d")?)
        .with(Sym::B, div(&a, &b, "a/b")?)
        .with(Sym::C, a.clone() * q.clone());
    let mut k = TermBuilder::new(q, Guard::STRICT);
    k.inf(&(b.clone() * d))?
        .rinf(&b)?
        .div(&(Rational::one() - div(&a, &b, "a/b")?), "1 - a/b")?;
    Ok(LinkPoints {
        source: p.clone().with(Sym::C, div(&Rational::one(), &b, "1/b")?),
        target,
        factor: k.finish(),
    })
}

// Theorem: contiguous nonterminating curious summation

fn tnsc_lhs<S: Scalar>(p: &ParameterPoint<S>, g: &Guard) -> Result<Term<S>> {
    let q = p.q();
    let [a, c, d] = p.vals([Sym::A, Sym::C, Sym::D])?;
    let aq = a * q.clone();
    let mut t = TermBuilder::new(q, *g);
    t.div(&(c - d.clone()), "c - d")?.inf(&(aq.clone() * d))?.rinf(&aq)?;
    Ok(t.finish())
}

fn tnsc_summand<S: Scalar>(p: &ParameterPoint<S>, k: i64, g: &Guard) -> Result<Term<S>> {
    let q = p.q();
    let [a, b, c, d] = p.vals([Sym::A, Sym::B, Sym::C, Sym::D])?;
    let m = Mixing::at(&b, &c, q, k, g)?;
    let qk = q.powi(k).expect("q nonzero");
    let aq = a * q.clone();
    let mut t = TermBuilder::new(q, *g);
    t.div(&m.m2, "c - q^k")?
        .pow(&m.r, k)?
        .mul(S::one() - m.r.clone() * qk)
        .poch(&div(&S::one(), &d, "1/d")?, k)?
        .rpoch(q, k)?
        .rpoch(&aq, k)?
        .poch(&(aq * m.r_inv), k)?
        .inf(&(m.r.clone() * d.clone() * q.clone()))?
        .rinf(&m.r)?
        .pow(&d, k)?;
    Ok(t.finish())
}

fn tnsc_to_qgauss(p: &ParameterPoint<Rational>, _: i64) -> Result<LinkPoints> {
    let q = p.q();
    let [a, b, d] = p.vals([Sym::A, Sym::B, Sym::D])?;
    let target = ParameterPoint::new(q.clone())?
        .with(Sym::A, div(&Rational::one(), &d, "1/d")?)
        .with(Sym::B, div(&(a.clone() * q.clone()), &b, "aq/b")?)
        .with(Sym::C, a * q.clone());
    let mut k = TermBuilder::new(q, Guard::STRICT);
    k.mul(b.clone()).inf(&(b.clone() * d * q.clone()))?.rinf(&b)?;
    Ok(LinkPoints {
        source: p.clone().with(Sym::C, div(&Rational::one(), &b, "1/b")?),
        target,
        factor: k.finish(),
    })
}

// Theorem: bilateral curious summation

fn bns_lhs<S: Scalar>(p: &ParameterPoint<S>, g: &Guard) -> Result<Term<S>> {
    let q = p.q();
    let [b, d, e] = p.vals([Sym::B, Sym::D, Sym::E])?;
    let mut t = TermBuilder::new(q, *g);
    t.div(&(e.clone() - b), "e - b")?
        .inf(q)?
        .inf(&(d.clone() * e.clone()))?
        .rinf(&d)?
        .rinf(&(e * q.clone()))?;
    Ok(t.finish())
}

/// Shared bilateral shape; `contiguous` selects the second theorem.
fn bilateral_summand<S: Scalar>(p: &ParameterPoint<S>, k: i64, g: &Guard, contiguous: bool) -> Result<Term<S>> {
    let q = p.q();
    let [b, c, d, e] = p.vals([Sym::B, Sym::C, Sym::D, Sym::E])?;
    let m = Mixing::at(&b, &c, q, k, g)?;
    let qk = q.powi(k).expect("q nonzero");
    let rd = m.r.clone() * d.clone();
    let mut t = TermBuilder::new(q, *g);
    if contiguous {
        t.div(&m.m2, "c - q^k")?
            .inf(&(rd.clone() * q.clone()))?
            .poch(&div(&S::one(), &d, "1/d")?, k)?;
    } else {
        t.div(&m.m1, "1 - bq^k")?.inf(&rd)?.poch(&div(q, &d, "q/d")?, k)?;
    }
    t.mul(S::one() - m.r.clone() * qk)
        .inf(&(e.clone() * q.clone() * m.r_inv.clone()))?
        .rinf(&m.r)?
        .rinf(&(q.clone() * m.r_inv))?
        .rpoch(&(e * q.clone()), k)?
        .pow(&rd, k)?;
    Ok(t.finish())
}

fn bns_summand<S: Scalar>(p: &ParameterPoint<S>, k: i64, g: &Guard) -> Result<Term<S>> {
    bilateral_summand(p, k, g, false)
}

fn bnsc_summand<S: Scalar>(p: &ParameterPoint<S>, k: i64, g: &Guard) -> Result<Term<S>> {
    bilateral_summand(p, k, g, true)
}

fn bnsc_lhs<S: Scalar>(p: &ParameterPoint<S>, g: &Guard) -> Result<Term<S>> {
    let q = p.q();
    let [c, d, e] = p.vals([Sym::C, Sym::D, Sym::E])?;
    let dq = d.clone() * q.clone();
    let mut t = TermBuilder::new(q, *g);
    t.div(&(c - d), "c - d")?
        .inf(q)?
        .inf(&(dq.clone() * e.clone()))?
        .rinf(&dq)?
        .rinf(&(e * q.clone()))?;
    Ok(t.finish())
}

fn bns_sample<S: Backend>(d: &mut Draw) -> Result<ParameterPoint<S>> {
    let p = d.base::<S>()?;
    let b: S = d.value(0.2, 2.0);
    let c: S = d.value(0.5, 6.0);
    let dd = c.clone() * d.value(0.05, 0.7);
    let e = b.clone() * d.value(0.05, 0.7);
    Ok(p.with(Sym::B, b).with(Sym::C, c).with(Sym::D, dd).with(Sym::E, e))
}

fn bns_domain(p: &ParameterPoint<Wide>) -> Result<Vec<Constraint>> {
    let [b, c, d, e] = p.vals([Sym::B, Sym::C, Sym::D, Sym::E])?;
    Ok(vec![ratio("d/c", div(&d, &c, "d/c")?), ratio("e/b", div(&e, &b, "e/b")?)])
}

/// The `1ψ1` factor shared by both bilateral `c = 1/b` links.
fn psi11_link(p: &ParameterPoint<Rational>, a: Rational) -> Result<(ParameterPoint<Rational>, ParameterPoint<Rational>)> {
    let q = p.q();
    let [b, d, e] = p.vals([Sym::B, Sym::D, Sym::E])?;
    let target = ParameterPoint::new(q.clone())?
        .with(Sym::A, a)
        .with(Sym::B, e * q.clone())
        .with(Sym::Z, b.clone() * d);
    Ok((p.clone().with(Sym::C, div(&Rational::one(), &b, "1/b")?), target))
}

fn bns_to_psi11(p: &ParameterPoint<Rational>, _: i64) -> Result<LinkPoints> {
    let q = p.q();
    let [b, d, e] = p.vals([Sym::B, Sym::D, Sym::E])?;
    let (source, target) = psi11_link(p, div(q, &d, "q/d")?)?;
    let mut k = TermBuilder::new(q, Guard::STRICT);
    k.inf(&(b.clone() * d))?
        .inf(&div(&(e * q.clone()), &b, "eq/b")?)?
        .rinf(&b)?
        .rinf(&div(q, &b, "q/b")?)?;
    Ok(LinkPoints {
        source,
        target,
        factor: k.finish(),
    })
}

fn bnsc_to_psi11(p: &ParameterPoint<Rational>, _: i64) -> Result<LinkPoints> {
    let q = p.q();
    let [b, d, e] = p.vals([Sym::B, Sym::D, Sym::E])?;
    let (source, target) = psi11_link(p, div(&Rational::one(), &d, "1/d")?)?;
    let mut k = TermBuilder::new(q, Guard::STRICT);
    k.mul(b.clone())
        .inf(&(b.clone() * d * q.clone()))?
        .inf(&div(&(e * q.clone()), &b, "eq/b")?)?
        .rinf(&b)?
        .rinf(&div(q, &b, "q/b")?)?;
    Ok(LinkPoints {
        source,
        target,
        factor: k.finish(),
    })
}

fn bilateral_to_unilateral(p: &ParameterPoint<Rational>, _: i64) -> Result<LinkPoints> {
    Ok(LinkPoints {
        source: p.clone().with(Sym::E, Rational::one()),
        target: p.clone().with(Sym::A, Rational::zero()),
        factor: Term::one(),
    })
}

pub(crate) fn records() -> Vec<IdentityRecord> {
    use Sym::*;
    let (abel_e, abel_f) = sides!(abel_lhs, abel_summand, abel_sample);
    let (rothe_e, rothe_f) = sides!(rothe_lhs, rothe_summand, abel_sample);
    let (cps_e, cps_f) = sides!(cps_lhs, cps_summand, cps_sample);
    let (cqps_e, cqps_f) = sides!(cqps_lhs, cqps_summand, cqps_sample);
    let (cnt_e, cnt_f) = sides!(cnt_lhs, cnt_summand, cnt_sample);
    let (ts_e, ts_f) = sides!(ts_lhs, ts_summand, ts_sample);
    let (tns_e, tns_f) = sides!(tns_lhs, tns_summand, tns_sample);
    let (tnsc_e, tnsc_f) = sides!(tnsc_lhs, tnsc_summand, tns_sample);
    let (bns_e, bns_f) = sides!(bns_lhs, bns_summand, bns_sample);
    let (bnsc_e, bnsc_f) = sides!(bnsc_lhs, bnsc_summand, bns_sample);
    vec![
        IdentityRecord {
            id: "abel",
            title: "Abel's summation",
            params: &[A, B, C],
            ints: &[IntSym::N],
            needs_sqrt_a: false,
            kind: Kind::Terminating,
            domain_text: "a != 0",
            domain: no_constraints,
            exact: abel_e,
            float: abel_f,
            degenerations: vec![Degeneration {
                target: "binomial",
                substitution: "b = 0",
                map: abel_to_binomial,
            }],
        },
        IdentityRecord {
            id: "hagen_rothe",
            title: "Hagen-Rothe summation",
            params: &[A, B, C],
            ints: &[IntSym::N],
            needs_sqrt_a: false,
            kind: Kind::Terminating,
            domain_text: "a + bk != 0 for 0 <= k <= n",
            domain: no_constraints,
            exact: rothe_e,
            float: rothe_f,
            degenerations: vec![Degeneration {
                target: "chu_vandermonde",
                substitution: "b = 0",
                map: rothe_to_chu,
            }],
        },
        IdentityRecord {
            id: "curious_ps",
            title: "curious extension of the Pfaff-Saalschütz summation",
            params: &[A, B, C],
            ints: &[IntSym::N],
            needs_sqrt_a: false,
            kind: Kind::Terminating,
            domain_text: "a+k, b+a(a+k), b+(a-c)(a+k) nonzero for 0 <= k <= n",
            domain: no_constraints,
            exact: cps_e,
            float: cps_f,
            degenerations: Vec::new(),
        },
        IdentityRecord {
            id: "curious_qps",
            title: "curious extension of the q-Pfaff-Saalschütz summation",
            params: &[A, B, C],
            ints: &[IntSym::N],
            needs_sqrt_a: false,
            kind: Kind::Terminating,
            domain_text: "a != q^-k, b+(a-1)(a-q^-k) != 0, b+(a-c)(a-q^-k) != 0 for 0 <= k <= n",
            domain: no_constraints,
            exact: cqps_e,
            float: cqps_f,
            degenerations: Vec::new(),
        },
        IdentityRecord {
            id: "curious_nt",
            title: "nonterminating curious q-summation",
            params: &[A, B, C],
            ints: &[],
            needs_sqrt_a: false,
            kind: Kind::Unilateral,
            domain_text: "|bq| < 1",
            domain: cnt_domain,
            exact: cnt_e,
            float: cnt_f,
            degenerations: Vec::new(),
        },
        IdentityRecord {
            id: "thm_ts",
            title: "terminating curious summation",
            params: &[A, B, C, D],
            ints: &[IntSym::N],
            needs_sqrt_a: false,
            kind: Kind::Terminating,
            domain_text: "c != q^k, bq^k != 1 for 0 <= k <= n",
            domain: no_constraints,
            exact: ts_e,
            float: ts_f,
            degenerations: vec![Degeneration {
                target: "qps",
                substitution: "c = 1/b",
                map: ts_to_qps,
            }],
        },
        IdentityRecord {
            id: "thm_tns",
            title: "nonterminating curious summation",
            params: &[A, B, C, D],
            ints: &[],
            needs_sqrt_a: false,
            kind: Kind::Unilateral,
            domain_text: "|d/c| < 1",
            domain: d_over_c,
            exact: tns_e,
            float: tns_f,
            degenerations: vec![Degeneration {
                target: "qgauss",
                substitution: "c = 1/b",
                map: tns_to_qgauss,
            }],
        },
        IdentityRecord {
            id: "thm_tnsc",
            title: "contiguous nonterminating curious summation",
            params: &[A, B, C, D],
            ints: &[],
            needs_sqrt_a: false,
            kind: Kind::Unilateral,
            domain_text: "|d/c| < 1",
            domain: d_over_c,
            exact: tnsc_e,
            float: tnsc_f,
            degenerations: vec![Degeneration {
                target: "qgauss",
                substitution: "c = 1/b",
                map: tnsc_to_qgauss,
            }],
        },
        IdentityRecord {
            id: "thm_bns",
            title: "bilateral curious summation",
            params: &[B, C, D, E],
            ints: &[],
            needs_sqrt_a: false,
            kind: Kind::Bilateral,
            domain_text: "|d/c| < 1 and |e/b| < 1",
            domain: bns_domain,
            exact: bns_e,
            float: bns_f,
            degenerations: vec![
                Degeneration {
                    target: "thm_tns",
                    substitution: "e = 1 (target at a = 0)",
                    map: bilateral_to_unilateral,
                },
                Degeneration {
                    target: "1psi1",
                    substitution: "c = 1/b",
                    map: bns_to_psi11,
                },
            ],
        },
        IdentityRecord {
            id: "thm_bnsc",
            title: "contiguous bilateral curious summation",
            params: &[B, C, D, E],
            ints: &[],
            needs_sqrt_a: false,
            kind: Kind::Bilateral,
            domain_text: "|d/c| < 1 and |e/b| < 1",
            domain: bns_domain,
            exact: bnsc_e,
            float: bnsc_f,
            degenerations: vec![
                Degeneration {
                    target: "thm_tnsc",
                    substitution: "e = 1 (target at a = 0)",
                    map: bilateral_to_unilateral,
                },
                Degeneration {
                    target: "1psi1",
                    substitution: "c = 1/b",
                    map: bnsc_to_psi11,
                },
            ],
        },
    ]
}

/// Relative accuracy of infinite products inside probes and chains.
const PRODUCT_TOL: f64 = 1e-17;

fn value(t: &Term<Wide>, q: &Wide) -> Result<Wide> {
    Ok(t.evaluate(q, PRODUCT_TOL, &Guard::STRICT)?.value)
}

fn adaptive(tol: f64) -> Truncation {
    Truncation::Adaptive(AdaptiveConfig {
        tol,
        ..Default::default()
    })
}

/// Fixed point for the large-`B` probes.
#[derive(Clone, Debug)]
pub struct ProbePoint {
    pub q: f64,
    /// `√c` of the substituted `c`; the target's `√a`.
    pub s: f64,
    pub a: f64,
    pub d: f64,
    pub e: f64,
    pub n: i64,
}

impl Default for ProbePoint {
    fn default() -> Self {
        ProbePoint {
            q: 0.37,
            s: 0.8,
            a: 0.3,
            d: 1.7,
            e: 0.4,
            n: 4,
        }
    }
}

/// Termwise deviation of the source identity at `b = B`, `c ↦ -B/c` from
/// its very-well-poised limit.
///
/// Returns `max_k |M·src_k - K·tgt_k| / max_k |K·tgt_k|` where `M` is the
/// side multiplier (`1`, `B` or the substituted `c`) and `K` the
/// `k`-independent factor of the limit. Decays like `1/B`.
pub fn vwp_limit_probe(source: &IdentityRecord, target: &IdentityRecord, big_b: f64) -> Result<f64> {
    vwp_limit_probe_at(source, target, big_b, &ProbePoint::default())
}

pub fn vwp_limit_probe_at(
    source: &IdentityRecord,
    target: &IdentityRecord,
    big_b: f64,
    pt: &ProbePoint,
) -> Result<f64> {
    let w = Wide::from_real;
    let q = w(pt.q);
    let (s, a, d, e) = (w(pt.s), w(pt.a), w(pt.d), w(pt.e));
    let c = s * s;
    let bb = w(big_b);
    let c_sub = -div(&bb, &c, "B/c")?;
    let one = Wide::one();
    let g = Guard::STRICT;
    let inf = |x: Wide| -> Result<Wide> { Ok(infinite_product(&x, &q, Tolerance::Relative(PRODUCT_TOL), None)?.value) };
    let base = ParameterPoint::new(q)?;
    let src = base.clone().with(Sym::B, bb).with(Sym::C, c_sub).with(Sym::D, d);
    let tgt = base.clone().with_sqrt_a(s);
    let (src, tgt, mult, factor, ks) = match (source.id, target.id) {
        ("thm_ts", "65s") => {
            let n = pt.n;
            let qn = q.powi(n).expect("q nonzero");
            let k = qn * c.powi(n).expect("n >= 0") * qpoch_finite(&div(&a, &c, "a/c")?, &q, n)?
                * qpoch_finite(&(c * q), &q, n)?.recip().ok_or_else(|| Error::Pole("(cq)_n".into()))?;
            (
                src.with(Sym::A, a).with_int(IntSym::N, n),
                tgt.with(Sym::B, div(&(c * q), &(a * d), "cq/ad")?).with(Sym::C, a * qn).with_int(IntSym::N, n),
                one,
                k,
                (0, n),
            )
        }
        ("thm_tns", "55ns") => (
            src.with(Sym::A, a),
            tgt.with(Sym::B, div(&q, &d, "q/d")?).with(Sym::C, div(&c, &a, "c/a")?),
            bb,
            div(&(c * (one - c)), &(a - c), "a-c")? * inf(c * d)? * inf(c)?.recip().expect("nonzero"),
            (0, 7),
        ),
        ("thm_tnsc", "55ns") => (
            src.with(Sym::A, a),
            tgt.with(Sym::B, div(&one, &d, "1/d")?).with(Sym::C, div(&c, &a, "c/a")?),
            c_sub,
            (one - c) * inf(c * d * q)? * inf(c)?.recip().expect("nonzero"),
            (0, 7),
        ),
        ("thm_bns", "46s") => (
            src.with(Sym::E, e),
            tgt.with(Sym::B, div(&q, &d, "q/d")?).with(Sym::C, div(&c, &e, "c/e")?),
            bb,
            -((one - c) * inf(c * d)? * inf(div(&(e * q), &c, "eq/c")?)?)
                * (inf(c)? * inf(div(&q, &c, "q/c")?)?).recip().expect("nonzero"),
            (-4, 7),
        ),
        ("thm_bnsc", "46s") => (
            src.with(Sym::E, e),
            tgt.with(Sym::B, div(&one, &d, "1/d")?).with(Sym::C, div(&c, &e, "c/e")?),
            c_sub,
            (one - c) * inf(c * d * q)? * inf(div(&(e * q), &c, "eq/c")?)?
                * (inf(c)? * inf(div(&q, &c, "q/c")?)?).recip().expect("nonzero"),
            (-4, 7),
        ),
        (s, t) => {
            return Err(Error::InvalidParameter(format!(
                "no large-b limit from `{s}` to `{t}`"
            )))
        }
    };
    let mut num = 0.0f64;
    let mut den = 0.0f64;
    for k in ks.0..=ks.1 {
        let x = mult * value(&source.term(&src, k, &g)?, &q)?;
        let y = factor * value(&target.term(&tgt, k, &g)?, &q)?;
        num = num.max((x - y).abs());
        den = den.max(y.abs());
    }
    if den == 0.0 {
        return Err(Error::DegenerateInput("limit summand vanishes on the probe range".into()));
    }
    Ok(num / den)
}

/// The stages of the `e = q^l` evaluation of the bilateral theorem.
#[derive(Clone, Debug)]
pub struct ShiftChain {
    pub l: i64,
    /// Adaptive bilateral sum at `e = q^l`.
    pub bilateral: SeriesSum<Wide>,
    /// `Σ_{m>=0} t(m - l)`: terms below `-l` vanish.
    pub shifted: SeriesSum<Wide>,
    /// `(q;q)_l / (d;q)_l · q^{-l} Σ_{k>=0}` of the unilateral theorem at
    /// `a = 0` and `(bq^{-l}, cq^l, dq^l)`.
    pub reduced: Wide,
    /// The same with the unilateral sum replaced by its closed form.
    pub reduced_closed: Wide,
    /// `(q;q)_∞ (dq^l;q)_∞ / ((d;q)_∞ (q^{1+l};q)_∞) / (q^l - b)`.
    pub closed: Wide,
}

impl ShiftChain {
    /// Largest relative difference between any stage and the closed form.
    pub fn max_rel_deviation(&self) -> f64 {
        let c = self.closed;
        [self.bilateral.value, self.shifted.value, self.reduced, self.reduced_closed]
            .iter()
            .map(|v| (*v - c).abs() / c.abs())
            .fold(0.0, f64::max)
    }
}

/// Evaluates the reduction chain for `e = q^l` at a point with `b, c, d`.
pub fn bns_shift_chain(p: &ParameterPoint<Wide>, l: i64, tol: f64) -> Result<ShiftChain> {
    let bns = lookup("thm_bns")?;
    let tns = lookup("thm_tns")?;
    let q = *p.q();
    let [b, c, d] = p.vals([Sym::B, Sym::C, Sym::D])?;
    let ql = q.powi(l).expect("q nonzero");
    let g = Guard::STRICT;
    let src = p.clone().with(Sym::E, ql);
    let term = |k: i64| value(&(bns.sides::<Wide>().summand)(&src, k, &g)?, &q);
    let bilateral = sum_series(&TermSeries::new(SeriesKind::Bilateral, adaptive(tol), term))?;
    let shifted = sum_series(&TermSeries::new(SeriesKind::Unilateral, adaptive(tol), |m| term(m - l)))?;
    let pre = qpoch_finite(&q, &q, l)? * qpoch_finite(&d, &q, l)?.recip().ok_or_else(|| Error::Pole("(d;q)_l".into()))?
        * ql.recip().expect("q nonzero");
    let red = ParameterPoint::new(q)?
        .with(Sym::A, Wide::zero())
        .with(Sym::B, b * ql.recip().expect("q nonzero"))
        .with(Sym::C, c * ql)
        .with(Sym::D, d * ql);
    let uni = sum_series(&TermSeries::new(SeriesKind::Unilateral, adaptive(tol), |k| {
        value(&(tns.sides::<Wide>().summand)(&red, k, &g)?, &q)
    }))?;
    let uni_closed = value(&(tns.sides::<Wide>().lhs)(&red, &g)?, &q)?;
    let inf = |x: Wide| -> Result<Wide> { Ok(infinite_product(&x, &q, Tolerance::Relative(PRODUCT_TOL), None)?.value) };
    let closed = inf(q)? * inf(d * ql)?
        * (inf(d)? * inf(q * ql)? * (ql - b)).recip().ok_or_else(|| Error::Pole("closed form".into()))?;
    Ok(ShiftChain {
        l,
        bilateral,
        shifted,
        reduced: pre * uni.value,
        reduced_closed: pre * uni_closed,
        closed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(n: i64, d: i64) -> Rational {
        Rational::from_ratio(n, d)
    }

    fn exact_sides(id: &str, p: &ParameterPoint<Rational>) -> (Rational, Rational) {
        let rec = lookup(id).unwrap();
        let g = Guard::STRICT;
        let lhs = (rec.exact.lhs)(p, &g).unwrap().reduce(p.q()).unwrap().into_exact().unwrap();
        let n = p.int(IntSym::N).unwrap();
        let rhs = (0..=n).fold(Rational::zero(), |acc, k| {
            acc + (rec.exact.summand)(p, k, &g).unwrap().into_exact().unwrap()
        });
        (lhs, rhs)
    }

    fn pt(q: Rational, vals: &[(Sym, Rational)], n: i64) -> ParameterPoint<Rational> {
        let mut p = ParameterPoint::new(q).unwrap().with_int(IntSym::N, n);
        for (s, v) in vals {
            p.set(*s, v.clone());
        }
        p
    }

    #[test]
    fn abel_example() {
        let p = pt(r(1, 2), &[(Sym::A, r(1, 1)), (Sym::B, r(2, 1)), (Sym::C, r(3, 1))], 2);
        assert_eq!(exact_sides("abel", &p), (r(16, 1), r(16, 1)));
        let p0 = p.clone().with_int(IntSym::N, 0);
        assert_eq!(exact_sides("abel", &p0), (r(1, 1), r(1, 1)));
        let bad = p.with(Sym::A, r(0, 1));
        let rec = lookup("abel").unwrap();
        assert!(matches!(
            (rec.exact.summand)(&bad, 0, &Guard::STRICT),
            Err(Error::DegenerateInput(_))
        ));
    }

    #[test]
    fn hagen_rothe_example() {
        let p = pt(r(1, 2), &[(Sym::A, r(2, 1)), (Sym::B, r(1, 1)), (Sym::C, r(3, 1))], 2);
        assert_eq!(exact_sides("hagen_rothe", &p), (r(10, 1), r(10, 1)));
        let bad = pt(r(1, 2), &[(Sym::A, r(2, 1)), (Sym::B, r(-1, 1)), (Sym::C, r(3, 1))], 2);
        let rec = lookup("hagen_rothe").unwrap();
        assert!(matches!(
            (rec.exact.summand)(&bad, 2, &Guard::STRICT),
            Err(Error::DegenerateInput(_))
        ));
    }

    #[test]
    fn abel_probe_decays_like_one_over_m() {
        let (a, b, c) = (r(1, 1), r(2, 1), r(3, 1));
        let r3 = abel_from_rothe_probe(&a, &b, &c, 3, 1_000).unwrap();
        let r6 = abel_from_rothe_probe(&a, &b, &c, 3, 1_000_000).unwrap();
        let ratio = r3 / r6;
        assert!((ratio / 1000.0 - 1.0).abs() < 0.01, "ratio {ratio}");
        assert!(abel_from_rothe_probe(&a, &b, &c, 3, 1_000_000_000).unwrap() < 1e-6);
        assert_eq!(abel_from_rothe_probe(&a, &b, &c, 0, 17).unwrap(), 0.0);
    }

    #[test]
    fn curious_ps_examples() {
        let p = pt(r(1, 2), &[(Sym::A, r(1, 1)), (Sym::B, r(1, 1)), (Sym::C, r(1, 2))], 1);
        let (l, s) = exact_sides("curious_ps", &p);
        assert_eq!(l, s);
        // b = -(a-c)a kills the prefactor numerator at k = 0
        let (a, c) = (r(2, 3), r(1, 5));
        let b = -(a.clone() - c.clone()) * a.clone();
        let p = pt(r(1, 2), &[(Sym::A, a), (Sym::B, b), (Sym::C, c)], 2);
        let (l, s) = exact_sides("curious_ps", &p);
        assert_eq!(l, s);
        let p0 = p.with_int(IntSym::N, 0);
        assert_eq!(exact_sides("curious_ps", &p0), (r(1, 1), r(1, 1)));
    }

    #[test]
    fn curious_qps_example() {
        // a = 2, q = 1/2 would put a at q^{-1}; a = 3 keeps the other values
        let p = pt(r(1, 2), &[(Sym::A, r(3, 1)), (Sym::B, r(1, 3)), (Sym::C, r(1, 5))], 2);
        let (l, s) = exact_sides("curious_qps", &p);
        assert_eq!(l, s);
        let pole = p.with(Sym::A, r(2, 1));
        let rec = lookup("curious_qps").unwrap();
        assert!(matches!(
            (rec.exact.summand)(&pole, 1, &Guard::STRICT),
            Err(Error::DegenerateInput(_))
        ));
    }

    #[test]
    fn terminating_theorem_example() {
        let p = pt(
            r(1, 2),
            &[(Sym::A, r(1, 3)), (Sym::B, r(1, 5)), (Sym::C, r(7, 1)), (Sym::D, r(2, 1))],
            3,
        );
        let (l, s) = exact_sides("thm_ts", &p);
        assert_eq!(l, s);
        let p0 = p.clone().with_int(IntSym::N, 0);
        assert_eq!(exact_sides("thm_ts", &p0), (r(1, 1), r(1, 1)));
        // c = q^2
        let bad = p.with(Sym::C, r(1, 4));
        let rec = lookup("thm_ts").unwrap();
        assert!(matches!(
            (rec.exact.summand)(&bad, 2, &Guard::STRICT),
            Err(Error::DegenerateInput(_))
        ));
    }

    fn float_residual(id: &str, p: &ParameterPoint<Wide>) -> f64 {
        let rec = lookup(id).unwrap();
        let g = Guard::STRICT;
        let q = *p.q();
        let lhs = value(&(rec.float.lhs)(p, &g).unwrap(), &q).unwrap();
        let kind = match rec.kind {
            Kind::Bilateral => SeriesKind::Bilateral,
            _ => SeriesKind::Unilateral,
        };
        let s = sum_series(&TermSeries::new(kind, adaptive(1e-13), |k| {
            value(&rec.term(p, k, &g)?, &q)
        }))
        .unwrap();
        (s.value - lhs).abs() / lhs.abs()
    }

    fn fpt(q: f64, vals: &[(Sym, f64)]) -> ParameterPoint<Wide> {
        let mut p = ParameterPoint::new(Wide::from_real(q)).unwrap();
        for (s, v) in vals {
            p.set(*s, Wide::from_real(*v));
        }
        p
    }

    #[test]
    fn nonterminating_examples() {
        let p = fpt(0.5, &[(Sym::A, 1.0 / 3.0), (Sym::B, 0.5), (Sym::C, 5.0)]);
        assert!(float_residual("curious_nt", &p) < 1e-12);
        let p0 = p.with(Sym::B, Wide::zero());
        assert!(float_residual("curious_nt", &p0) < 1e-15);
        for id in ["thm_tns", "thm_tnsc"] {
            let p = fpt(0.5, &[(Sym::A, 0.0), (Sym::B, 1.0 / 3.0), (Sym::C, 4.0), (Sym::D, 0.5)]);
            assert!(float_residual(id, &p) < 1e-12, "{id}");
        }
        // d = q and d = 1 leave only the k = 0 term
        let p = fpt(0.5, &[(Sym::A, 0.2), (Sym::B, 1.0 / 3.0), (Sym::C, 4.0), (Sym::D, 0.5)]);
        assert!(float_residual("thm_tns", &p) < 1e-12);
        let p = p.with(Sym::D, Wide::one());
        assert!(float_residual("thm_tnsc", &p) < 1e-12);
        for id in ["thm_bns", "thm_bnsc"] {
            let p = fpt(0.5, &[(Sym::B, 0.2), (Sym::C, 5.0), (Sym::D, 1.0 / 3.0), (Sym::E, 0.1)]);
            assert!(float_residual(id, &p) < 1e-12, "{id}");
        }
    }

    #[test]
    fn shift_chain_agrees() {
        // c = 4 would equal q^-2
        let p = fpt(0.5, &[(Sym::B, 0.2), (Sym::C, 5.0), (Sym::D, 1.0 / 3.0)]);
        for l in 0..=5 {
            let ch = bns_shift_chain(&p, l, 1e-13).unwrap();
            assert!(ch.max_rel_deviation() < 1e-10, "l={l}: {ch:?}");
            assert_eq!(ch.shifted.window.0, 0);
        }
    }

    #[test]
    fn limit_probes_decay() {
        for (s, t) in [
            ("thm_ts", "65s"),
            ("thm_tns", "55ns"),
            ("thm_tnsc", "55ns"),
            ("thm_bns", "46s"),
            ("thm_bnsc", "46s"),
        ] {
            let (s, t) = (lookup(s).unwrap(), lookup(t).unwrap());
            let d1 = vwp_limit_probe(s, t, 1e6).unwrap();
            let d2 = vwp_limit_probe(s, t, 2e6).unwrap();
            assert!(d1 < 1e-4, "{} {d1}", s.id);
            assert!((d2 / d1 - 0.5).abs() < 0.05, "{} {}", s.id, d2 / d1);
        }
        let bad = vwp_limit_probe(lookup("thm_ts").unwrap(), lookup("46s").unwrap(), 1e6);
        assert!(matches!(bad, Err(Error::InvalidParameter(_))));
    }
}
