//! Classical summations: the bilateral 1ψ1 sum, q-Gauss, q-Pfaff–Saalschütz,
//! the very-well-poised 6φ5/5φ5/6ψ6/4ψ6 sums and their ordinary
//! hypergeometric counterparts.

use crate::error::Result;
use crate::identity::{
    div, no_constraints, ratio, sides, Backend, Constraint, Degeneration, Draw, IdentityRecord,
    Kind, LinkPoints,
};
use crate::qcore::{
    binomial, q_triangular, rising_factorial, Guard, IntSym, ParameterPoint, Rational, Scalar,
    Sym, Term, TermBuilder, Wide,
};

const MAX_N: i64 = 8;

fn one<S: Scalar>() -> S {
    S::one()
}

/// `(q√a;q)_k (-q√a;q)_k / ((√a;q)_k (-√a;q)_k)`, evaluated as `(1 - aq^{2k}) / (1 - a)`
/// so that `a = q^{2j}` leaves no removable pole at negative `k`.
pub(crate) fn vwp_factor<S: Scalar>(t: &mut TermBuilder<'_, S>, s: &S, k: i64) -> Result<()> {
    let a = s.clone() * s.clone();
    let q2k = t.q().powi(2 * k).expect("q nonzero");
    t.mul(S::one() - a.clone() * q2k).div(&(S::one() - a), "1 - a")?;
    Ok(())
}

// 1psi1

fn psi11_lhs<S: Scalar>(p: &ParameterPoint<S>, g: &Guard) -> Result<Term<S>> {
    let q = p.q();
    let [a, b, z] = p.vals([Sym::A, Sym::B, Sym::Z])?;
    let az = a.clone() * z.clone();
    let mut t = TermBuilder::new(q, *g);
    t.inf(q)?
        .inf(&div(&b, &a, "b/a")?)?
        .inf(&az)?
        .inf(&div(q, &az, "q/az")?)?
        .rinf(&b)?
        .rinf(&div(q, &a, "q/a")?)?
        .rinf(&z)?
        .rinf(&div(&b, &az, "b/az")?)?;
    Ok(t.finish())
}

fn psi11_summand<S: Scalar>(p: &ParameterPoint<S>, k: i64, g: &Guard) -> Result<Term<S>> {
    let [a, b, z] = p.vals([Sym::A, Sym::B, Sym::Z])?;
    let mut t = TermBuilder::new(p.q(), *g);
    t.poch(&a, k)?.rpoch(&b, k)?.pow(&z, k)?;
    Ok(t.finish())
}

fn psi11_sample<S: Backend>(d: &mut Draw) -> Result<ParameterPoint<S>> {
    let p = d.base::<S>()?;
    let a: S = d.value(0.3, 3.0);
    let z: S = d.value(0.1, 0.85);
    let b = a.clone() * z.clone() * d.value(0.1, 0.85);
    Ok(p.with(Sym::A, a).with(Sym::B, b).with(Sym::Z, z))
}

fn psi11_domain(p: &ParameterPoint<Wide>) -> Result<Vec<Constraint>> {
    let [a, b, z] = p.vals([Sym::A, Sym::B, Sym::Z])?;
    Ok(vec![ratio("z", z), ratio("b/az", div(&b, &(a * z), "b/az")?)])
}

// q-Gauss

fn qgauss_lhs<S: Scalar>(p: &ParameterPoint<S>, g: &Guard) -> Result<Term<S>> {
    let q = p.q();
    let [a, b, c] = p.vals([Sym::A, Sym::B, Sym::C])?;
    let mut t = TermBuilder::new(q, *g);
    t.inf(&div(&c, &a, "c/a")?)?
        .inf(&div(&c, &b, "c/b")?)?
        .rinf(&c)?
        .rinf(&div(&c, &(a * b), "c/ab")?)?;
    Ok(t.finish())
}

fn qgauss_summand<S: Scalar>(p: &ParameterPoint<S>, k: i64, g: &Guard) -> Result<Term<S>> {
    let q = p.q();
    let [a, b, c] = p.vals([Sym::A, Sym::B, Sym::C])?;
    let z = div(&c, &(a.clone() * b.clone()), "c/ab")?;
    let mut t = TermBuilder::new(q, *g);
    t.poch(&a, k)?.poch(&b, k)?.rpoch(q, k)?.rpoch(&c, k)?.pow(&z, k)?;
    Ok(t.finish())
}

fn qgauss_sample<S: Backend>(d: &mut Draw) -> Result<ParameterPoint<S>> {
    let p = d.base::<S>()?;
    let a: S = d.value(0.3, 3.0);
    let b: S = d.value(0.3, 3.0);
    let c = a.clone() * b.clone() * d.value(0.05, 0.85);
    Ok(p.with(Sym::A, a).with(Sym::B, b).with(Sym::C, c))
}

fn qgauss_domain(p: &ParameterPoint<Wide>) -> Result<Vec<Constraint>> {
    let [a, b, c] = p.vals([Sym::A, Sym::B, Sym::C])?;
    Ok(vec![ratio("c/ab", div(&c, &(a * b), "c/ab")?)])
}

// q-Pfaff–Saalschütz

fn qps_lhs<S: Scalar>(p: &ParameterPoint<S>, g: &Guard) -> Result<Term<S>> {
    let [a, b, c] = p.vals([Sym::A, Sym::B, Sym::C])?;
    let n = p.int(IntSym::N)?;
    let mut t = TermBuilder::new(p.q(), *g);
    t.poch(&div(&c, &a, "c/a")?, n)?
        .poch(&div(&c, &b, "c/b")?, n)?
        .rpoch(&c, n)?
        .rpoch(&div(&c, &(a * b), "c/ab")?, n)?;
    Ok(t.finish())
}

fn qps_summand<S: Scalar>(p: &ParameterPoint<S>, k: i64, g: &Guard) -> Result<Term<S>> {
    let q = p.q();
    let [a, b, c] = p.vals([Sym::A, Sym::B, Sym::C])?;
    let n = p.int(IntSym::N)?;
    let qn = q.powi(-n).expect("q nonzero");
    let last = div(&(a.clone() * b.clone() * q.clone() * qn.clone()), &c, "abq^{1-n}/c")?;
    let mut t = TermBuilder::new(q, *g);
    t.poch(&a, k)?
        .poch(&b, k)?
        .poch(&qn, k)?
        .rpoch(q, k)?
        .rpoch(&c, k)?
        .rpoch(&last, k)?
        .pow(q, k)?;
    Ok(t.finish())
}

fn qps_sample<S: Backend>(d: &mut Draw) -> Result<ParameterPoint<S>> {
    let p = d.base::<S>()?;
    let n = d.n(MAX_N);
    Ok(p
        .with(Sym::A, d.value(0.2, 3.0))
        .with(Sym::B, d.value(0.2, 3.0))
        .with(Sym::C, d.value(0.2, 3.0))
        .with_int(IntSym::N, n))
}

// terminating very-well-poised 6φ5

fn vwp65s_lhs<S: Scalar>(p: &ParameterPoint<S>, g: &Guard) -> Result<Term<S>> {
    let q = p.q();
    let [a, b, c] = p.vals([Sym::A, Sym::B, Sym::C])?;
    let n = p.int(IntSym::N)?;
    let aq = a * q.clone();
    let mut t = TermBuilder::new(q, *g);
    t.poch(&aq, n)?
        .poch(&div(&aq, &(b.clone() * c.clone()), "aq/bc")?, n)?
        .rpoch(&div(&aq, &b, "aq/b")?, n)?
        .rpoch(&div(&aq, &c, "aq/c")?, n)?;
    Ok(t.finish())
}

fn vwp65s_summand<S: Scalar>(p: &ParameterPoint<S>, k: i64, g: &Guard) -> Result<Term<S>> {
    let q = p.q();
    let [a, b, c] = p.vals([Sym::A, Sym::B, Sym::C])?;
    let s = p.sqrt_a()?;
    let n = p.int(IntSym::N)?;
    let aq = a.clone() * q.clone();
    let qn = q.powi(n).expect("q nonzero");
    let mut t = TermBuilder::new(q, *g);
    vwp_factor(&mut t, s, k)?;
    t.poch(&a, k)?
        .poch(&b, k)?
        .poch(&c, k)?
        .poch(&qn.recip().expect("q nonzero"), k)?
        .rpoch(q, k)?
        .rpoch(&div(&aq, &b, "aq/b")?, k)?
        .rpoch(&div(&aq, &c, "aq/c")?, k)?
        .rpoch(&(aq.clone() * qn.clone()), k)?
        .pow(&div(&(aq * qn), &(b * c), "aq^{1+n}/bc")?, k)?;
    Ok(t.finish())
}

fn vwp65s_sample<S: Backend>(d: &mut Draw) -> Result<ParameterPoint<S>> {
    let p = d.base::<S>()?;
    let n = d.n(MAX_N);
    Ok(p
        .with_sqrt_a(d.value(0.2, 2.0))
        .with(Sym::B, d.value(0.2, 3.0))
        .with(Sym::C, d.value(0.2, 3.0))
        .with_int(IntSym::N, n))
}

// nonterminating very-well-poised 6φ5

fn vwp65ns_lhs<S: Scalar>(p: &ParameterPoint<S>, g: &Guard) -> Result<Term<S>> {
    let q = p.q();
    let [a, b, c, d] = p.vals([Sym::A, Sym::B, Sym::C, Sym::D])?;
    let aq = a * q.clone();
    let (bc, bd, cd) = (b.clone() * c.clone(), b.clone() * d.clone(), c.clone() * d.clone());
    let mut t = TermBuilder::new(q, *g);
    t.inf(&aq)?
        .inf(&div(&aq, &bc, "aq/bc")?)?
        .inf(&div(&aq, &bd, "aq/bd")?)?
        .inf(&div(&aq, &cd, "aq/cd")?)?
        .rinf(&div(&aq, &b, "aq/b")?)?
        .rinf(&div(&aq, &c, "aq/c")?)?
        .rinf(&div(&aq, &d, "aq/d")?)?
        .rinf(&div(&aq, &(bc * d), "aq/bcd")?)?;
    Ok(t.finish())
}

fn vwp65ns_summand<S: Scalar>(p: &ParameterPoint<S>, k: i64, g: &Guard) -> Result<Term<S>> {
    let q = p.q();
    let [a, b, c, d] = p.vals([Sym::A, Sym::B, Sym::C, Sym::D])?;
    let s = p.sqrt_a()?;
    let aq = a.clone() * q.clone();
    let mut t = TermBuilder::new(q, *g);
    vwp_factor(&mut t, s, k)?;
    t.poch(&a, k)?
        .poch(&b, k)?
        .poch(&c, k)?
        .poch(&d, k)?
        .rpoch(q, k)?
        .rpoch(&div(&aq, &b, "aq/b")?, k)?
        .rpoch(&div(&aq, &c, "aq/c")?, k)?
        .rpoch(&div(&aq, &d, "aq/d")?, k)?
        .pow(&div(&aq, &(b * c * d), "aq/bcd")?, k)?;
    Ok(t.finish())
}

fn vwp65ns_sample<S: Backend>(d: &mut Draw) -> Result<ParameterPoint<S>> {
    let p = d.base::<S>()?;
    let s: S = d.value(0.2, 1.5);
    let b: S = d.value(0.5, 3.0);
    let c: S = d.value(0.5, 3.0);
    let a = s.clone() * s.clone();
    let w: S = d.value(0.05, 0.85);
    let dd = div(&(a * p.q().clone()), &(b.clone() * c.clone() * w), "d")?;
    Ok(p.with_sqrt_a(s).with(Sym::B, b).with(Sym::C, c).with(Sym::D, dd))
}

fn vwp65ns_domain(p: &ParameterPoint<Wide>) -> Result<Vec<Constraint>> {
    let [a, b, c, d] = p.vals([Sym::A, Sym::B, Sym::C, Sym::D])?;
    Ok(vec![ratio("aq/bcd", div(&(a * *p.q()), &(b * c * d), "aq/bcd")?)])
}

fn vwp65ns_to_65s(p: &ParameterPoint<Rational>, n: i64) -> Result<LinkPoints> {
    let q = p.q();
    let qn = q.powi(-n).expect("q nonzero");
    Ok(LinkPoints {
        source: p.clone().with(Sym::D, qn),
        target: p.clone().with_int(IntSym::N, n),
        factor: Term::one(),
    })
}

// very-well-poised 5φ5

fn vwp55ns_lhs<S: Scalar>(p: &ParameterPoint<S>, g: &Guard) -> Result<Term<S>> {
    let q = p.q();
    let [a, b, c] = p.vals([Sym::A, Sym::B, Sym::C])?;
    let aq = a * q.clone();
    let mut t = TermBuilder::new(q, *g);
    t.inf(&aq)?
        .inf(&div(&aq, &(b.clone() * c.clone()), "aq/bc")?)?
        .rinf(&div(&aq, &b, "aq/b")?)?
        .rinf(&div(&aq, &c, "aq/c")?)?;
    Ok(t.finish())
}

fn vwp55ns_summand<S: Scalar>(p: &ParameterPoint<S>, k: i64, g: &Guard) -> Result<Term<S>> {
    let q = p.q();
    let [a, b, c] = p.vals([Sym::A, Sym::B, Sym::C])?;
    let s = p.sqrt_a()?;
    let aq = a.clone() * q.clone();
    let mut t = TermBuilder::new(q, *g);
    vwp_factor(&mut t, s, k)?;
    t.poch(&a, k)?
        .poch(&b, k)?
        .poch(&c, k)?
        .rpoch(q, k)?
        .rpoch(&div(&aq, &b, "aq/b")?, k)?
        .rpoch(&div(&aq, &c, "aq/c")?, k)?
        .mul(q_triangular(q, k))
        .pow(&-div(&aq, &(b * c), "aq/bc")?, k)?;
    Ok(t.finish())
}

fn vwp55ns_sample<S: Backend>(d: &mut Draw) -> Result<ParameterPoint<S>> {
    let p = d.base::<S>()?;
    Ok(p
        .with_sqrt_a(d.value(0.2, 1.5))
        .with(Sym::B, d.value(0.3, 3.0))
        .with(Sym::C, d.value(0.3, 3.0)))
}

// very-well-poised 6ψ6

fn vwp66s_lhs<S: Scalar>(p: &ParameterPoint<S>, g: &Guard) -> Result<Term<S>> {
    let q = p.q();
    let [a, b, c, d, e] = p.vals([Sym::A, Sym::B, Sym::C, Sym::D, Sym::E])?;
    let aq = a.clone() * q.clone();
    let mut t = TermBuilder::new(q, *g);
    t.inf(q)?.inf(&aq)?.inf(&div(q, &a, "q/a")?)?;
    let pars = [&b, &c, &d, &e];
    for i in 0..4 {
        for j in i + 1..4 {
            t.inf(&div(&aq, &(pars[i].clone() * pars[j].clone()), "aq/xy")?)?;
        }
    }
    for x in pars {
        t.rinf(&div(q, x, "q/x")?)?.rinf(&div(&aq, x, "aq/x")?)?;
    }
    let z = div(&(aq * a), &(b * c * d * e), "a^2q/bcde")?;
    t.rinf(&z)?;
    Ok(t.finish())
}

fn vwp66s_summand<S: Scalar>(p: &ParameterPoint<S>, k: i64, g: &Guard) -> Result<Term<S>> {
    let q = p.q();
    let [a, b, c, d, e] = p.vals([Sym::A, Sym::B, Sym::C, Sym::D, Sym::E])?;
    let s = p.sqrt_a()?;
    let aq = a.clone() * q.clone();
    let mut t = TermBuilder::new(q, *g);
    vwp_factor(&mut t, s, k)?;
    for x in [&b, &c, &d, &e] {
        t.poch(x, k)?.rpoch(&div(&aq, x, "aq/x")?, k)?;
    }
    t.pow(&div(&(aq * a), &(b * c * d * e), "a^2q/bcde")?, k)?;
    Ok(t.finish())
}

fn vwp66s_sample<S: Backend>(d: &mut Draw) -> Result<ParameterPoint<S>> {
    let p = d.base::<S>()?;
    let s: S = d.value(0.2, 1.5);
    let b: S = d.value(0.5, 3.0);
    let c: S = d.value(0.5, 3.0);
    let dd: S = d.value(0.5, 3.0);
    let a = s.clone() * s.clone();
    let w: S = d.value(0.05, 0.85);
    let e = div(&(a.clone() * a * p.q().clone()), &(b.clone() * c.clone() * dd.clone() * w), "e")?;
    Ok(p.with_sqrt_a(s).with(Sym::B, b).with(Sym::C, c).with(Sym::D, dd).with(Sym::E, e))
}

/// The series argument `a²q/bcde`; the bound `|aq²/bcde| < 1` printed in
/// some sources is not the convergence condition of this series.
fn vwp66s_domain(p: &ParameterPoint<Wide>) -> Result<Vec<Constraint>> {
    let [a, b, c, d, e] = p.vals([Sym::A, Sym::B, Sym::C, Sym::D, Sym::E])?;
    Ok(vec![ratio("a^2q/bcde", div(&(a * a * *p.q()), &(b * c * d * e), "a^2q/bcde")?)])
}

fn vwp66s_to_65ns(p: &ParameterPoint<Rational>, _: i64) -> Result<LinkPoints> {
    let a = p.get(Sym::A)?.clone();
    Ok(LinkPoints {
        source: p.clone().with_sqrt_a(p.sqrt_a()?.clone()).with(Sym::E, a),
        target: p.clone(),
        factor: Term::one(),
    })
}

// very-well-poised 4ψ6

fn vwp46s_lhs<S: Scalar>(p: &ParameterPoint<S>, g: &Guard) -> Result<Term<S>> {
    let q = p.q();
    let [a, b, c] = p.vals([Sym::A, Sym::B, Sym::C])?;
    let aq = a.clone() * q.clone();
    let mut t = TermBuilder::new(q, *g);
    t.inf(q)?
        .inf(&aq)?
        .inf(&div(q, &a, "q/a")?)?
        .inf(&div(&aq, &(b.clone() * c.clone()), "aq/bc")?)?
        .rinf(&div(q, &b, "q/b")?)?
        .rinf(&div(q, &c, "q/c")?)?
        .rinf(&div(&aq, &b, "aq/b")?)?
        .rinf(&div(&aq, &c, "aq/c")?)?;
    Ok(t.finish())
}

fn vwp46s_summand<S: Scalar>(p: &ParameterPoint<S>, k: i64, g: &Guard) -> Result<Term<S>> {
    let q = p.q();
    let [a, b, c] = p.vals([Sym::A, Sym::B, Sym::C])?;
    let s = p.sqrt_a()?;
    let aq = a.clone() * q.clone();
    let tri = q_triangular(q, k);
    let mut t = TermBuilder::new(q, *g);
    vwp_factor(&mut t, s, k)?;
    t.poch(&b, k)?
        .poch(&c, k)?
        .rpoch(&div(&aq, &b, "aq/b")?, k)?
        .rpoch(&div(&aq, &c, "aq/c")?, k)?
        .mul(tri.clone() * tri)
        .pow(&div(&(aq * a), &(b * c), "a^2q/bc")?, k)?;
    Ok(t.finish())
}

fn vwp46s_sample<S: Backend>(d: &mut Draw) -> Result<ParameterPoint<S>> {
    vwp55ns_sample(d)
}

// binomial theorem, Chu–Vandermonde, Pfaff–Saalschütz

fn small_n(p_n: i64) -> Result<u32> {
    u32::try_from(p_n).map_err(|_| crate::Error::InvalidParameter(format!("n = {p_n} must be >= 0")))
}

fn binomial_lhs<S: Scalar>(p: &ParameterPoint<S>, _: &Guard) -> Result<Term<S>> {
    let [a, c] = p.vals([Sym::A, Sym::C])?;
    Ok(Term::scalar((a + c).powi(p.int(IntSym::N)?).expect("nonnegative power")))
}

fn binomial_summand<S: Scalar>(p: &ParameterPoint<S>, k: i64, _: &Guard) -> Result<Term<S>> {
    let [a, c] = p.vals([Sym::A, Sym::C])?;
    let n = p.int(IntSym::N)?;
    let coeff = binomial(&S::from_int(n), small_n(k)?);
    Ok(Term::scalar(
        coeff * a.powi(k).expect("k >= 0") * c.powi(n - k).expect("k <= n"),
    ))
}

fn ordinary_sample<S: Backend>(d: &mut Draw) -> Result<ParameterPoint<S>> {
    let p = d.base::<S>()?;
    let n = d.n(MAX_N);
    Ok(p
        .with(Sym::A, d.value(0.2, 5.0))
        .with(Sym::B, d.value(0.2, 5.0))
        .with(Sym::C, d.value(0.2, 5.0))
        .with_int(IntSym::N, n))
}

fn chu_lhs<S: Scalar>(p: &ParameterPoint<S>, _: &Guard) -> Result<Term<S>> {
    let [a, c] = p.vals([Sym::A, Sym::C])?;
    Ok(Term::scalar(binomial(&(a + c), small_n(p.int(IntSym::N)?)?)))
}

fn chu_summand<S: Scalar>(p: &ParameterPoint<S>, k: i64, _: &Guard) -> Result<Term<S>> {
    let [a, c] = p.vals([Sym::A, Sym::C])?;
    let n = p.int(IntSym::N)?;
    Ok(Term::scalar(binomial(&a, small_n(k)?) * binomial(&c, small_n(n - k)?)))
}

fn pfaff_lhs<S: Scalar>(p: &ParameterPoint<S>, g: &Guard) -> Result<Term<S>> {
    let [a, b, c] = p.vals([Sym::A, Sym::B, Sym::C])?;
    let n = small_n(p.int(IntSym::N)?)?;
    let num = rising_factorial(&(c.clone() - a.clone()), n) * rising_factorial(&(c.clone() - b.clone()), n);
    let den = rising_factorial(&c, n) * rising_factorial(&(c - a - b), n);
    Ok(Term::scalar(g.div(num, &den, || "(c)_n (c-a-b)_n".into())?))
}

fn pfaff_summand<S: Scalar>(p: &ParameterPoint<S>, k: i64, g: &Guard) -> Result<Term<S>> {
    let [a, b, c] = p.vals([Sym::A, Sym::B, Sym::C])?;
    let n = p.int(IntSym::N)?;
    let ku = small_n(k)?;
    let num = rising_factorial(&a, ku) * rising_factorial(&b, ku) * rising_factorial(&S::from_int(-n), ku);
    let last = one::<S>() + a + b - c.clone() - S::from_int(n);
    let den = rising_factorial(&one::<S>(), ku) * rising_factorial(&c, ku) * rising_factorial(&last, ku);
    Ok(Term::scalar(g.div(num, &den, || "(c)_k (1+a+b-c-n)_k".into())?))
}

pub(crate) fn records() -> Vec<IdentityRecord> {
    use Sym::*;
    let none: Vec<Degeneration> = Vec::new();
    let (psi11_e, psi11_f) = sides!(psi11_lhs, psi11_summand, psi11_sample);
    let (qgauss_e, qgauss_f) = sides!(qgauss_lhs, qgauss_summand, qgauss_sample);
    let (qps_e, qps_f) = sides!(qps_lhs, qps_summand, qps_sample);
    let (s65_e, s65_f) = sides!(vwp65s_lhs, vwp65s_summand, vwp65s_sample);
    let (ns65_e, ns65_f) = sides!(vwp65ns_lhs, vwp65ns_summand, vwp65ns_sample);
    let (ns55_e, ns55_f) = sides!(vwp55ns_lhs, vwp55ns_summand, vwp55ns_sample);
    let (s66_e, s66_f) = sides!(vwp66s_lhs, vwp66s_summand, vwp66s_sample);
    let (s46_e, s46_f) = sides!(vwp46s_lhs, vwp46s_summand, vwp46s_sample);
    let (bin_e, bin_f) = sides!(binomial_lhs, binomial_summand, ordinary_sample);
    let (chu_e, chu_f) = sides!(chu_lhs, chu_summand, ordinary_sample);
    let (pf_e, pf_f) = sides!(pfaff_lhs, pfaff_summand, ordinary_sample);
    vec![
        IdentityRecord {
            id: "1psi1",
            title: "Ramanujan's 1psi1 summation",
            params: &[A, B, Z],
            ints: &[],
            needs_sqrt_a: false,
            kind: Kind::Bilateral,
            domain_text: "|b/a| < |z| < 1",
            domain: psi11_domain,
            exact: psi11_e,
            float: psi11_f,
            degenerations: none.clone(),
        },
        IdentityRecord {
            id: "qgauss",
            title: "q-Gauss summation",
            params: &[A, B, C],
            ints: &[],
            needs_sqrt_a: false,
            kind: Kind::Unilateral,
            domain_text: "|c/ab| < 1",
            domain: qgauss_domain,
            exact: qgauss_e,
            float: qgauss_f,
            degenerations: none.clone(),
        },
        IdentityRecord {
            id: "qps",
            title: "q-Pfaff-Saalschütz summation",
            params: &[A, B, C],
            ints: &[IntSym::N],
            needs_sqrt_a: false,
            kind: Kind::Terminating,
            domain_text: "n >= 0",
            domain: no_constraints,
            exact: qps_e,
            float: qps_f,
            degenerations: none.clone(),
        },
        IdentityRecord {
            id: "65s",
            title: "terminating very-well-poised 6phi5 summation",
            params: &[A, B, C],
            ints: &[IntSym::N],
            needs_sqrt_a: true,
            kind: Kind::Terminating,
            domain_text: "n >= 0 (closed form uses the terminating index n)",
            domain: no_constraints,
            exact: s65_e,
            float: s65_f,
            degenerations: none.clone(),
        },
        IdentityRecord {
            id: "65ns",
            title: "nonterminating very-well-poised 6phi5 summation",
            params: &[A, B, C, D],
            ints: &[],
            needs_sqrt_a: true,
            kind: Kind::Unilateral,
            domain_text: "|aq/bcd| < 1",
            domain: vwp65ns_domain,
            exact: ns65_e,
            float: ns65_f,
            degenerations: vec![Degeneration {
                target: "65s",
                substitution: "d = q^-n",
                map: vwp65ns_to_65s,
            }],
        },
        IdentityRecord {
            id: "55ns",
            title: "very-well-poised 5phi5 summation",
            params: &[A, B, C],
            ints: &[],
            needs_sqrt_a: true,
            kind: Kind::Unilateral,
            domain_text: "converges everywhere",
            domain: no_constraints,
            exact: ns55_e,
            float: ns55_f,
            degenerations: none.clone(),
        },
        IdentityRecord {
            id: "66s",
            title: "Bailey's very-well-poised 6psi6 summation",
            params: &[A, B, C, D, E],
            ints: &[],
            needs_sqrt_a: true,
            kind: Kind::Bilateral,
            domain_text: "|a^2q/bcde| < 1 (also printed as |aq^2/bcde| < 1; the series argument is used)",
            domain: vwp66s_domain,
            exact: s66_e,
            float: s66_f,
            degenerations: vec![Degeneration {
                target: "65ns",
                substitution: "e = a",
                map: vwp66s_to_65ns,
            }],
        },
        IdentityRecord {
            id: "46s",
            title: "very-well-poised 4psi6 summation",
            params: &[A, B, C],
            ints: &[],
            needs_sqrt_a: true,
            kind: Kind::Bilateral,
            domain_text: "converges for all nonzero parameters",
            domain: no_constraints,
            exact: s46_e,
            float: s46_f,
            degenerations: none.clone(),
        },
        IdentityRecord {
            id: "binomial",
            title: "binomial theorem",
            params: &[A, C],
            ints: &[IntSym::N],
            needs_sqrt_a: false,
            kind: Kind::Terminating,
            domain_text: "n >= 0",
            domain: no_constraints,
            exact: bin_e,
            float: bin_f,
            degenerations: none.clone(),
        },
        IdentityRecord {
            id: "chu_vandermonde",
            title: "Chu-Vandermonde summation",
            params: &[A, C],
            ints: &[IntSym::N],
            needs_sqrt_a: false,
            kind: Kind::Terminating,
            domain_text: "n >= 0",
            domain: no_constraints,
            exact: chu_e,
            float: chu_f,
            degenerations: none.clone(),
        },
        IdentityRecord {
            id: "pfaff_saalschutz",
            title: "Pfaff-Saalschütz summation",
            params: &[A, B, C],
            ints: &[IntSym::N],
            needs_sqrt_a: false,
            kind: Kind::Terminating,
            domain_text: "n >= 0",
            domain: no_constraints,
            exact: pf_e,
            float: pf_f,
            degenerations: none,
        },
    ]
}
