//! Lower-triangular matrix inverses and the inverse relations they induce.
//!
//! Entries are built as a numerator and a denominator and divided once, so a
//! vanishing denominator surfaces as [`Error::DegenerateInput`] in both
//! backends instead of a pole deep inside a product.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::qcore::{q_triangular, Mode, Rational, Scalar};

type Entry<S> = Arc<dyn Fn(i64, i64) -> Result<S> + Send + Sync>;

/// A pair of lower-triangular matrices `F = (f_nk)`, `G = (g_kl)` claimed to
/// be mutually inverse.
#[derive(Clone)]
pub struct InversePair<S> {
    pub name: String,
    f: Entry<S>,
    g: Entry<S>,
}

impl<S: Scalar> InversePair<S> {
    pub fn new(
        name: impl Into<String>,
        f: impl Fn(i64, i64) -> Result<S> + Send + Sync + 'static,
        g: impl Fn(i64, i64) -> Result<S> + Send + Sync + 'static,
    ) -> Self {
        InversePair {
            name: name.into(),
            f: Arc::new(f),
            g: Arc::new(g),
        }
    }

    /// `f_nk`, zero above the diagonal.
    pub fn f(&self, n: i64, k: i64) -> Result<S> {
        if n < k {
            Ok(S::zero())
        } else {
            (self.f)(n, k)
        }
    }

    /// `g_kl`, zero above the diagonal.
    pub fn g(&self, k: i64, l: i64) -> Result<S> {
        if k < l {
            Ok(S::zero())
        } else {
            (self.g)(k, l)
        }
    }

    /// The pair with the roles of `F` and `G` exchanged.
    pub fn swapped(&self) -> Self {
        InversePair {
            name: format!("{}^T", self.name),
            f: self.g.clone(),
            g: self.f.clone(),
        }
    }
}

/// A quotient under construction.
struct Frac<S> {
    num: S,
    den: S,
}

impl<S: Scalar> Frac<S> {
    fn new() -> Self {
        Frac {
            num: S::one(),
            den: S::one(),
        }
    }

    fn mul(&mut self, x: S) -> &mut Self {
        self.num = self.num.clone() * x;
        self
    }

    fn div(&mut self, x: S) -> &mut Self {
        self.den = self.den.clone() * x;
        self
    }

    /// Multiply by `(x;q)_k`, `k >= 0`.
    fn poch(&mut self, x: &S, q: &S, k: i64) -> &mut Self {
        let p = poch(x, q, k);
        self.mul(p)
    }

    /// Divide by `(x;q)_k`, `k >= 0`.
    fn rpoch(&mut self, x: &S, q: &S, k: i64) -> &mut Self {
        let p = poch(x, q, k);
        self.div(p)
    }

    fn finish(&self, what: impl FnOnce() -> String) -> Result<S> {
        self.num
            .checked_div(&self.den)
            .ok_or_else(|| Error::DegenerateInput(format!("{}: vanishing denominator", what())))
    }
}

fn poch<S: Scalar>(x: &S, q: &S, k: i64) -> S {
    debug_assert!(k >= 0);
    let mut acc = S::one();
    let mut t = x.clone();
    for _ in 0..k {
        acc = acc * (S::one() - t.clone());
        t = t * q.clone();
    }
    acc
}

fn qpow<S: Scalar>(q: &S, k: i64) -> S {
    q.powi(k).expect("base checked nonzero")
}

fn quot<S: Scalar>(x: &S, y: &S, what: &str) -> Result<S> {
    x.checked_div(y)
        .ok_or_else(|| Error::DegenerateInput(format!("{what}: division by zero")))
}

/// The general inverse pair in the arbitrary sequences `a_j`, `c_j` and the
/// indeterminate `d`:
///
/// `f_nk = ∏_{j=k}^{n-1} (a_j - d/c_k)(a_j - c_k) / ∏_{j=k+1}^{n} (c_j - d/c_k)(c_j - c_k)`,
///
/// `g_kl = (a_l c_l - d)(a_l - c_l) / ((a_k c_k - d)(a_k - c_k))
///        · ∏_{j=l+1}^{k} (a_j - d/c_k)(a_j - c_k) / ∏_{j=l}^{k-1} (c_j - d/c_k)(c_j - c_k)`.
pub fn krattenthaler_pair<S: Scalar>(
    a_seq: impl Fn(i64) -> S + Send + Sync + 'static,
    c_seq: impl Fn(i64) -> S + Send + Sync + 'static,
    d: S,
) -> InversePair<S> {
    let a_seq = Arc::new(a_seq);
    let c_seq = Arc::new(c_seq);
    let (af, cf, df) = (a_seq.clone(), c_seq.clone(), d.clone());
    let f = move |n: i64, k: i64| {
        let ck = cf(k);
        let dk = quot(&df, &ck, "d/c_k")?;
        let mut e = Frac::new();
        for j in k..n {
            let a = af(j);
            e.mul((a.clone() - dk.clone()) * (a - ck.clone()));
        }
        for j in k + 1..=n {
            let c = cf(j);
            e.div((c.clone() - dk.clone()) * (c - ck.clone()));
        }
        e.finish(|| format!("f({n},{k})"))
    };
    let g = move |k: i64, l: i64| {
        if k == l {
            // the prefactor cancels identically, even where a_k = c_k
            return Ok(S::one());
        }
        let ck = c_seq(k);
        let dk = quot(&d, &ck, "d/c_k")?;
        let (al, cl, ak) = (a_seq(l), c_seq(l), a_seq(k));
        let mut e = Frac::new();
        e.mul((al.clone() * cl.clone() - d.clone()) * (al - cl))
            .div((ak.clone() * ck.clone() - d.clone()) * (ak - ck.clone()));
        for j in l + 1..=k {
            let a = a_seq(j);
            e.mul((a.clone() - dk.clone()) * (a - ck.clone()));
        }
        for j in l..k {
            let c = c_seq(j);
            e.div((c.clone() - dk.clone()) * (c - ck.clone()));
        }
        e.finish(|| format!("g({k},{l})"))
    };
    InversePair::new("krattenthaler", f, g)
}

/// The specialisation `a_j = (1-bc)/(1-acq^j)`, `c_j = 1 - cq^{-j}`, `d = 1-bc`
/// of [`krattenthaler_pair`], without any diagonal rescaling.
pub fn specialized_krattenthaler<S: Scalar>(a: S, b: S, c: S, q: S) -> Result<InversePair<S>> {
    let qi = q.recip().ok_or_else(|| Error::InvalidParameter("q = 0".into()))?;
    let d = S::one() - b * c.clone();
    let (d1, ac, q1, c1) = (d.clone(), a * c.clone(), q.clone(), c);
    let a_seq = move |j: i64| {
        let den = S::one() - ac.clone() * qpow(&q1, j);
        // a pole of a_j makes every entry using it degenerate; mark it with zero
        d1.checked_div(&den).unwrap_or_else(S::zero)
    };
    let c_seq = move |j: i64| S::one() - c1.clone() * qpow(&qi, j);
    Ok(krattenthaler_pair(a_seq, c_seq, d))
}

/// `R(k) = (1 - bq^k)/(c - q^k)`.
#[derive(Clone)]
struct Cor<S> {
    a: S,
    b: S,
    c: S,
    q: S,
}

impl<S: Scalar> Cor<S> {
    fn new(a: S, b: S, c: S, q: S) -> Result<Self> {
        if q.is_zero() {
            return Err(Error::InvalidParameter("q = 0".into()));
        }
        Ok(Cor { a, b, c, q })
    }

    fn r(&self, k: i64) -> Result<S> {
        let qk = qpow(&self.q, k);
        quot(
            &(S::one() - self.b.clone() * qk.clone()),
            &(self.c.clone() - qk),
            "(1-bq^k)/(c-q^k)",
        )
    }

    fn qk(&self, k: i64) -> S {
        qpow(&self.q, k)
    }
}

/// The inverse pair attached to the terminating side:
///
/// `f_nk = (1-bq^n)/(1-bq^k) R_k^n (1-aq^n/R_n)/(1-a/R_k) (1-R_k q^k)/(1-R_k) q^k
///        (q^{-n})_k (aq^n)_k / ((q)_k (aq)_k) · (a/R_k)_n / (R_k q)_n`,
///
/// `g_kl = R_k^{-l} q^{kl} (1-aq^{2l})/(1-a) (a)_l (q^{-k})_l / ((q)_l (aq^{1+k})_l)
///        · (R_k)_l / (aq/R_k)_l`,
///
/// with `R_k = (1-bq^k)/(c-q^k)`.
pub fn cor1_pair<S: Scalar>(a: S, b: S, c: S, q: S) -> Result<InversePair<S>> {
    let cf = Cor::new(a, b, c, q)?;
    let cg = cf.clone();
    let f = move |n: i64, k: i64| {
        let Cor { a, b, q, .. } = &cf;
        let (rk, rn) = (cf.r(k)?, cf.r(n)?);
        let (qn, qk) = (cf.qk(n), cf.qk(k));
        let a_rk = quot(a, &rk, "a/R_k")?;
        let aqn_rn = quot(&(a.clone() * qn.clone()), &rn, "aq^n/R_n")?;
        let mut e = Frac::new();
        e.mul(S::one() - b.clone() * qn.clone())
            .div(S::one() - b.clone() * qk.clone())
            .mul(qpow(&rk, n))
            .mul(S::one() - aqn_rn)
            .div(S::one() - a_rk.clone())
            .mul(S::one() - rk.clone() * qk.clone())
            .div(S::one() - rk.clone())
            .mul(qk)
            .poch(&qn.recip().expect("q nonzero"), q, k)
            .poch(&(a.clone() * qn), q, k)
            .rpoch(q, q, k)
            .rpoch(&(a.clone() * q.clone()), q, k)
            .poch(&a_rk, q, n)
            .rpoch(&(rk * q.clone()), q, n);
        e.finish(|| format!("f({n},{k})"))
    };
    let g = move |k: i64, l: i64| {
        let Cor { a, q, .. } = &cg;
        let rk = cg.r(k)?;
        let aq_rk = quot(&(a.clone() * q.clone()), &rk, "aq/R_k")?;
        let mut e = Frac::new();
        e.div(qpow(&rk, l))
            .mul(qpow(q, k * l))
            .mul(S::one() - a.clone() * qpow(q, 2 * l))
            .div(S::one() - a.clone())
            .poch(a, q, l)
            .poch(&qpow(q, -k), q, l)
            .rpoch(q, q, l)
            .rpoch(&(a.clone() * qpow(q, 1 + k)), q, l)
            .poch(&rk, q, l)
            .rpoch(&aq_rk, q, l);
        e.finish(|| format!("g({k},{l})"))
    };
    Ok(InversePair::new("cor1", f, g))
}

/// The inverse pair attached to the nonterminating side:
///
/// `f_nk = (R_k q^{-k})^{n-k} (1-aq^{2n})/(1-aq^{2k}) (aq^{2k})_{n-k}/(q)_{n-k}
///        · (aq^k/R_k)_{n-k} / (R_k q^{1+k})_{n-k}`,
///
/// `g_kl = (-1)^{k-l} q^{C(l,2)-C(k,2)} (aq)_{2k} / ((q)_{k-l} (aq)_{k+l})
///        · (1-bq^l)/(1-bq^k) R_k^{k-l} (1-aq^l/R_l)/(1-aq^k/R_k)
///        · (aq/R_k)_k/(R_k)_k · (R_k)_l/(aq/R_k)_l`.
pub fn cor2_pair<S: Scalar>(a: S, b: S, c: S, q: S) -> Result<InversePair<S>> {
    let cf = Cor::new(a, b, c, q)?;
    let cg = cf.clone();
    let f = move |n: i64, k: i64| {
        let Cor { a, q, .. } = &cf;
        let rk = cf.r(k)?;
        let qk = cf.qk(k);
        let m = n - k;
        let mut e = Frac::new();
        e.mul(qpow(&rk, m))
            .div(qpow(&qk, m))
            .mul(S::one() - a.clone() * qpow(q, 2 * n))
            .div(S::one() - a.clone() * qpow(q, 2 * k))
            .poch(&(a.clone() * qpow(q, 2 * k)), q, m)
            .rpoch(q, q, m)
            .poch(&quot(&(a.clone() * qk.clone()), &rk, "aq^k/R_k")?, q, m)
            .rpoch(&(rk * qk * q.clone()), q, m);
        e.finish(|| format!("f({n},{k})"))
    };
    let g = move |k: i64, l: i64| {
        let Cor { a, b, q, .. } = &cg;
        let (rk, rl) = (cg.r(k)?, cg.r(l)?);
        let aq = a.clone() * q.clone();
        let aq_rk = quot(&aq, &rk, "aq/R_k")?;
        let sign = if (k - l) % 2 == 0 { S::one() } else { -S::one() };
        let mut e = Frac::new();
        e.mul(sign)
            .mul(q_triangular(q, l))
            .div(q_triangular(q, k))
            .poch(&aq, q, 2 * k)
            .rpoch(q, q, k - l)
            .rpoch(&aq, q, k + l)
            .mul(S::one() - b.clone() * cg.qk(l))
            .div(S::one() - b.clone() * cg.qk(k))
            .mul(qpow(&rk, k - l))
            .mul(S::one() - quot(&(a.clone() * cg.qk(l)), &rl, "aq^l/R_l")?)
            .div(S::one() - quot(&(a.clone() * cg.qk(k)), &rk, "aq^k/R_k")?)
            .poch(&aq_rk, q, k)
            .rpoch(&rk, q, k)
            .poch(&rk, q, l)
            .rpoch(&aq_rk, q, l);
        e.finish(|| format!("g({k},{l})"))
    };
    Ok(InversePair::new("cor2", f, g))
}

/// Which inverse pair a CLI or campaign refers to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PairKind {
    Krattenthaler,
    Cor1,
    Cor2,
}

impl PairKind {
    pub const ALL: [PairKind; 3] = [PairKind::Krattenthaler, PairKind::Cor1, PairKind::Cor2];
}

impl fmt::Display for PairKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            PairKind::Krattenthaler => "krattenthaler",
            PairKind::Cor1 => "cor1",
            PairKind::Cor2 => "cor2",
        })
    }
}

impl FromStr for PairKind {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        PairKind::ALL
            .into_iter()
            .find(|k| k.to_string() == s)
            .ok_or_else(|| format!("unknown pair `{s}` (expected krattenthaler|cor1|cor2)"))
    }
}

/// Rational parameters of a pair. For the general pair the sequences are
/// geometric, `a_j = a^j` and `c_j = c^j`, with `d` the indeterminate.
#[derive(Clone, Debug, PartialEq)]
pub struct PairSpec {
    pub kind: PairKind,
    pub a: Rational,
    pub b: Rational,
    pub c: Rational,
    pub d: Rational,
    pub q: Rational,
}

impl PairSpec {
    /// `a_j = 2^j`, `c_j = 3^j`, `d = 5` for the general pair;
    /// `a = 1/3`, `b = 1/5`, `c = 7`, `q = 1/2` for the specialisations.
    pub fn default_for(kind: PairKind) -> Self {
        let r = Rational::from_ratio;
        match kind {
            PairKind::Krattenthaler => PairSpec {
                kind,
                a: r(2, 1),
                b: r(0, 1),
                c: r(3, 1),
                d: r(5, 1),
                q: r(1, 2),
            },
            _ => PairSpec {
                kind,
                a: r(1, 3),
                b: r(1, 5),
                c: r(7, 1),
                d: r(0, 1),
                q: r(1, 2),
            },
        }
    }

    pub fn build<S: Scalar>(&self) -> Result<InversePair<S>> {
        let conv = |x: &Rational| S::from_value(&x.to_value()).or_else(|| S::from_value(&x.to_wide().to_value()));
        let get = |x: &Rational| conv(x).ok_or_else(|| Error::InvalidParameter(format!("cannot convert {x}")));
        let (a, b, c, d, q) = (get(&self.a)?, get(&self.b)?, get(&self.c)?, get(&self.d)?, get(&self.q)?);
        match self.kind {
            PairKind::Krattenthaler => {
                let (a2, c2) = (a, c);
                Ok(krattenthaler_pair(
                    move |j| qpow(&a2, j),
                    move |j| qpow(&c2, j),
                    d,
                ))
            }
            PairKind::Cor1 => cor1_pair(a, b, c, q),
            PairKind::Cor2 => cor2_pair(a, b, c, q),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OrthogonalityReport {
    pub pair: String,
    pub mode: Mode,
    /// Inclusive index window `(l, n)`.
    pub window: (i64, i64),
    /// Largest `|Σ f g|` (and `|Σ g f|`) off the diagonal, divided by
    /// `max(1, Σ |f g|)` so that rounding in large entries is not mistaken
    /// for a failure.
    pub max_offdiag: f64,
    /// Largest `|Σ f g - 1|` (and `|Σ g f - 1|`) on the diagonal, scaled alike.
    pub diag_dev: f64,
    /// Exact mode and every sum equals the Kronecker delta identically.
    pub exact: bool,
    /// Number of `(n, l)` sums checked over both orientations.
    pub sums_checked: usize,
}

impl OrthogonalityReport {
    pub fn passes(&self, tol: f64) -> bool {
        if self.mode == Mode::Exact {
            self.exact
        } else {
            self.max_offdiag <= tol && self.diag_dev <= tol
        }
    }
}

/// Entries of `F` and `G` over `lo..=hi`, row-major, zero above the diagonal.
fn matrices<S: Scalar>(p: &InversePair<S>, lo: i64, hi: i64) -> Result<(Vec<Vec<S>>, Vec<Vec<S>>)> {
    let m = (hi - lo + 1) as usize;
    let mut f = vec![vec![S::zero(); m]; m];
    let mut g = vec![vec![S::zero(); m]; m];
    for i in 0..m {
        for j in 0..=i {
            let (n, k) = (lo + i as i64, lo + j as i64);
            f[i][j] = p.f(n, k)?;
            g[i][j] = p.g(n, k)?;
        }
    }
    Ok((f, g))
}

/// Checks `Σ_{l'≤k≤n'} f_{n'k} g_{kl'} = δ` and the dual `Σ g_{n'k} f_{kl'} = δ`
/// for every `l ≤ l' ≤ n' ≤ n`.
pub fn verify_orthogonality<S: Scalar>(p: &InversePair<S>, l: i64, n: i64) -> Result<OrthogonalityReport> {
    if n < l {
        return Err(Error::InvalidParameter(format!("window ({l}, {n}) has n < l")));
    }
    let (f, g) = matrices(p, l, n)?;
    let m = f.len();
    let mut max_offdiag = 0.0f64;
    let mut diag_dev = 0.0f64;
    let mut exact = S::is_exact();
    let mut sums = 0;
    for (x, y) in [(&f, &g), (&g, &f)] {
        for i in 0..m {
            for j in 0..=i {
                let mut s = S::zero();
                let mut mag = 0.0f64;
                for k in j..=i {
                    let t = x[i][k].clone() * y[k][j].clone();
                    mag += t.abs_f64();
                    s = s + t;
                }
                let dev = if i == j { s - S::one() } else { s };
                if !dev.is_zero() {
                    exact = false;
                }
                let d = dev.abs_f64() / mag.max(1.0);
                if i == j {
                    diag_dev = diag_dev.max(d);
                } else {
                    max_offdiag = max_offdiag.max(d);
                }
                sums += 1;
            }
        }
    }
    Ok(OrthogonalityReport {
        pair: p.name.clone(),
        mode: S::MODE,
        window: (l, n),
        max_offdiag,
        diag_dev,
        exact,
        sums_checked: sums,
    })
}

/// Diagonal factors relating two pairs:
/// `to.f(n,k) = u_n v_k from.f(n,k)` and `to.g(k,l) = from.g(k,l) / (v_k u_l)`.
#[derive(Clone, Debug)]
pub struct Transfer<S> {
    pub u: Vec<S>,
    pub v: Vec<S>,
    /// Largest relative deviation from the factorised form over the window.
    pub max_dev: f64,
    /// Every entry factorises identically (exact mode).
    pub exact: bool,
}

impl<S: Scalar> Transfer<S> {
    pub fn consistent(&self, tol: f64) -> bool {
        if S::is_exact() {
            self.exact
        } else {
            self.max_dev <= tol
        }
    }
}

/// Reconstructs the diagonal transfer from `from` to `to` on `0..=size`:
/// `u_n = ρ(n,0)` and `v_k = ρ(k,k)/u_k` with `ρ = to.f/from.f`, then measures
/// how far every other entry of both matrices is from the factorised form.
pub fn reconstruct_transfer<S: Scalar>(
    from: &InversePair<S>,
    to: &InversePair<S>,
    size: i64,
) -> Result<Transfer<S>> {
    let rho = |n: i64, k: i64| quot(&to.f(n, k)?, &from.f(n, k)?, "transfer ratio");
    let u = (0..=size).map(|n| rho(n, 0)).collect::<Result<Vec<_>>>()?;
    let v = (0..=size)
        .map(|k| quot(&rho(k, k)?, &u[k as usize], "transfer diagonal"))
        .collect::<Result<Vec<_>>>()?;
    let mut max_dev = 0.0f64;
    let mut exact = S::is_exact();
    let mut record = |want: S, got: S| {
        let diff = want.clone() - got;
        if !diff.is_zero() {
            exact = false;
        }
        max_dev = max_dev.max(diff.abs_f64() / want.abs_f64().max(f64::MIN_POSITIVE));
    };
    for n in 0..=size {
        for k in 0..=n {
            let (ni, ki) = (n as usize, k as usize);
            record(to.f(n, k)?, u[ni].clone() * v[ki].clone() * from.f(n, k)?);
            let scaled = quot(&from.g(n, k)?, &(v[ni].clone() * u[ki].clone()), "transfer g")?;
            record(to.g(n, k)?, scaled);
        }
    }
    Ok(Transfer { u, v, max_dev, exact })
}

/// Both sides of `∏_{j=l+1}^{k} (a_j - c_k)
///   = (c(1-bq^k)/q^k)^{k-l} ((c-q^k)/(1-bq^k) · aq^{1+l})_{k-l} / (acq^{1+l})_{k-l}`
/// under `a_j = (1-bc)/(1-acq^j)`, `c_j = 1 - cq^{-j}`.
pub fn product_identity<S: Scalar>(a: &S, b: &S, c: &S, q: &S, l: i64, k: i64) -> Result<(S, S)> {
    let cq = |j: i64| S::one() - c.clone() * qpow(q, -j);
    let aq = |j: i64| quot(&(S::one() - b.clone() * c.clone()), &(S::one() - a.clone() * c.clone() * qpow(q, j)), "a_j");
    let ck = cq(k);
    let mut lhs = S::one();
    for j in l + 1..=k {
        lhs = lhs * (aq(j)? - ck.clone());
    }
    let qk = qpow(q, k);
    let one_bqk = S::one() - b.clone() * qk.clone();
    let base = quot(&(c.clone() * one_bqk.clone()), &qk, "q^k")?;
    let arg = quot(&(c.clone() - qk), &one_bqk, "1-bq^k")? * a.clone() * qpow(q, 1 + l);
    let mut e = Frac::new();
    e.mul(qpow(&base, k - l))
        .poch(&arg, q, k - l)
        .rpoch(&(a.clone() * c.clone() * qpow(q, 1 + l)), q, k - l);
    Ok((lhs, e.finish(|| format!("product identity at ({l},{k})"))?))
}

/// Which of the four inverse relations to apply.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    /// `b_n = Σ_{k=lo}^{n} f_nk a_k`
    InvF,
    /// `a_k = Σ_{l=lo}^{k} g_kl b_l`
    InvG,
    /// `b_k = Σ_{n≥k} f_nk a_n`
    RotinvF,
    /// `a_l = Σ_{k≥l} g_kl b_k`
    RotinvG,
}

/// Controls the truncation of the infinite relations.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RotinvConfig {
    /// Stop after three consecutive terms each moving the partial sum by less
    /// than `tol/10` relative to its size.
    pub tol: f64,
    /// Maximum number of terms per output entry.
    pub max_terms: i64,
}

impl Default for RotinvConfig {
    fn default() -> Self {
        RotinvConfig {
            tol: 1e-12,
            max_terms: 2_000,
        }
    }
}

const QUIET_RUN: usize = 3;

/// Applies one inverse relation to `seq`, returning the output sequence on
/// `range.0..=range.1`. Finite relations start their sums at `range.0`.
pub fn apply_inverse_relation<S: Scalar>(
    p: &InversePair<S>,
    seq: &dyn Fn(i64) -> Result<S>,
    direction: Direction,
    range: (i64, i64),
    cfg: &RotinvConfig,
) -> Result<Vec<S>> {
    let (lo, hi) = range;
    (lo..=hi)
        .map(|i| match direction {
            Direction::InvF => (lo..=i).try_fold(S::zero(), |acc, k| Ok(acc + p.f(i, k)? * seq(k)?)),
            Direction::InvG => (lo..=i).try_fold(S::zero(), |acc, l| Ok(acc + p.g(i, l)? * seq(l)?)),
            Direction::RotinvF => infinite_column(|n| Ok(p.f(n, i)? * seq(n)?), i, cfg),
            Direction::RotinvG => infinite_column(|k| Ok(p.g(k, i)? * seq(k)?), i, cfg),
        })
        .collect()
}

fn infinite_column<S: Scalar>(term: impl Fn(i64) -> Result<S>, start: i64, cfg: &RotinvConfig) -> Result<S> {
    let mut acc = S::zero();
    let mut quiet = 0;
    for m in start..start + cfg.max_terms {
        let t = term(m)?;
        let scale = acc.abs_f64().max(f64::MIN_POSITIVE);
        acc = acc + t.clone();
        if t.abs_f64() < cfg.tol / 10.0 * scale {
            quiet += 1;
            if quiet == QUIET_RUN {
                return Ok(acc);
            }
        } else {
            quiet = 0;
        }
    }
    Err(Error::Nonconvergence(format!(
        "inverse relation from index {start}: tail did not settle within {} terms",
        cfg.max_terms
    )))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::identity::lookup;
    use crate::qcore::{qpoch_infinite, Guard, IntSym, ParameterPoint, Sym, Wide};

    fn r(n: i64, d: i64) -> Rational {
        Rational::from_ratio(n, d)
    }

    fn cor_args() -> (Rational, Rational, Rational, Rational) {
        (r(1, 3), r(1, 5), r(7, 1), r(1, 2))
    }

    #[test]
    fn general_pair_is_orthogonal() {
        let p = krattenthaler_pair(|j| r(2, 1).powi(j).unwrap(), |j| r(3, 1).powi(j).unwrap(), r(5, 1));
        assert_eq!(p.f(2, 2).unwrap(), r(1, 1));
        assert_eq!(p.g(2, 2).unwrap(), r(1, 1));
        let rep = verify_orthogonality(&p, 0, 3).unwrap();
        assert!(rep.exact, "{rep:?}");
        assert!(verify_orthogonality(&p, 1, 4).unwrap().exact);
    }

    #[test]
    fn specialisations_are_orthogonal() {
        let (a, b, c, q) = cor_args();
        for p in [
            cor1_pair(a.clone(), b.clone(), c.clone(), q.clone()).unwrap(),
            cor2_pair(a.clone(), b.clone(), c.clone(), q.clone()).unwrap(),
        ] {
            assert!(verify_orthogonality(&p, 0, 4).unwrap().exact, "{}", p.name);
            let single = verify_orthogonality(&p, 2, 2).unwrap();
            assert!(single.exact && single.sums_checked == 2);
            assert!(verify_orthogonality(&p, 0, 5).unwrap().exact);
        }
        let q2 = r(2, 3);
        let p = cor2_pair(r(2, 7), r(3, 11), r(5, 2), q2).unwrap();
        assert!(verify_orthogonality(&p, 0, 3).unwrap().exact);
    }

    #[test]
    fn float_orthogonality() {
        let p = cor1_pair(Wide::from_real(1.0 / 3.0), Wide::from_real(0.2), Wide::from_real(7.0), Wide::from_real(0.5))
            .unwrap();
        let rep = verify_orthogonality(&p, 0, 5).unwrap();
        assert!(!rep.exact);
        assert!(rep.passes(1e-12), "{rep:?}");
    }

    #[test]
    fn cor1_diagonal_closed_form() {
        let (a, b, c, q) = cor_args();
        let p = cor1_pair(a.clone(), b.clone(), c.clone(), q.clone()).unwrap();
        for k in 0..5 {
            let rk = (r(1, 1) - b.clone() * q.powi(k).unwrap()) / (c.clone() - q.powi(k).unwrap());
            // f_kk = (R_k q)^k (-1)^k q^{-k(k+1)/2} (aq^k)_k/(aq)_k · (aq/R_k)_k/(R_k)_k
            let sign = if k % 2 == 0 { r(1, 1) } else { r(-1, 1) };
            let want = (rk.clone() * q.clone()).powi(k).unwrap()
                * sign
                * q.powi(-k * (k + 1) / 2).unwrap()
                * poch(&(a.clone() * q.powi(k).unwrap()), &q, k)
                / poch(&(a.clone() * q.clone()), &q, k)
                * poch(&(a.clone() * q.clone() / rk.clone()), &q, k)
                / poch(&rk, &q, k);
            assert_eq!(p.f(k, k).unwrap(), want, "k={k}");
        }
    }

    #[test]
    fn cor2_unit_diagonal() {
        for (a, b, c, q) in [
            (r(1, 3), r(1, 5), r(7, 1), r(1, 2)),
            (r(5, 7), r(2, 9), r(11, 3), r(1, 3)),
            (r(-3, 4), r(7, 5), r(9, 2), r(2, 5)),
        ] {
            let p = cor2_pair(a, b, c, q).unwrap();
            for k in 0..5 {
                assert_eq!(p.g(k, k).unwrap(), r(1, 1));
                assert_eq!(p.f(k, k).unwrap(), r(1, 1));
            }
        }
    }

    #[test]
    fn pole_reports_degenerate_input() {
        // c = q^2 makes R_2 a pole
        let p = cor1_pair(r(1, 3), r(1, 5), r(1, 4), r(1, 2)).unwrap();
        assert!(matches!(p.f(3, 2), Err(Error::DegenerateInput(_))));
        let p = krattenthaler_pair(|_| r(1, 1), |_| r(2, 1), r(5, 1));
        assert!(matches!(p.f(2, 0), Err(Error::DegenerateInput(_))));
    }

    #[test]
    fn transfers_from_the_general_pair() {
        let (a, b, c, q) = cor_args();
        let gen = specialized_krattenthaler(a.clone(), b.clone(), c.clone(), q.clone()).unwrap();
        let c1 = cor1_pair(a.clone(), b.clone(), c.clone(), q.clone()).unwrap();
        let c2 = cor2_pair(a, b, c, q).unwrap();
        assert!(reconstruct_transfer(&gen, &c1, 5).unwrap().exact);
        assert!(reconstruct_transfer(&gen, &c2, 5).unwrap().exact);
        assert!(reconstruct_transfer(&c2, &c1, 5).unwrap().exact);
    }

    #[test]
    fn worked_product_identity() {
        let (a, b, c, q) = cor_args();
        for k in 0..=6 {
            for l in 0..=k {
                let (lhs, rhs) = product_identity(&a, &b, &c, &q, l, k).unwrap();
                assert_eq!(lhs, rhs, "l={l} k={k}");
            }
        }
    }

    #[test]
    fn finite_round_trip() {
        let (a, b, c, q) = cor_args();
        let p = cor1_pair(a, b, c, q).unwrap();
        let seq = |k: i64| Ok(r(k * k + 1, k + 2));
        let cfg = RotinvConfig::default();
        let bs = apply_inverse_relation(&p, &seq, Direction::InvF, (0, 6), &cfg).unwrap();
        let back = apply_inverse_relation(&p, &|k| Ok(bs[k as usize].clone()), Direction::InvG, (0, 6), &cfg).unwrap();
        for k in 0..=6 {
            assert_eq!(back[k as usize], seq(k).unwrap());
        }
    }

    /// Terminating summation from the finite inverse relation: with
    /// `a_k = (aq)_k/(ad)_k · (ad/R_k)_k/(aq/R_k)_k` and
    /// `b_l = (q/d)_l/(ad)_l (ad)^l`, `Σ g_kl b_l = a_k` is the terminating
    /// 6φ5 sum, so `Σ f_nk a_k = b_n` term by term is the curious sum.
    #[test]
    fn terminating_curious_sum_from_inversion() {
        let (a, b, c, q) = (r(1, 3), r(1, 5), r(7, 1), r(1, 3));
        let d = r(2, 1);
        let p = cor1_pair(a.clone(), b.clone(), c.clone(), q.clone()).unwrap();
        let rk = |k: i64| (r(1, 1) - b.clone() * q.powi(k).unwrap()) / (c.clone() - q.powi(k).unwrap());
        let ad = a.clone() * d.clone();
        let a_seq = |k: i64| {
            let x = rk(k);
            Ok(poch(&(a.clone() * q.clone()), &q, k) / poch(&ad, &q, k) * poch(&(ad.clone() / x.clone()), &q, k)
                / poch(&(a.clone() * q.clone() / x), &q, k))
        };
        let b_seq = |l: i64| Ok(poch(&(q.clone() / d.clone()), &q, l) / poch(&ad, &q, l) * ad.powi(l).unwrap());
        let cfg = RotinvConfig::default();
        let via_g = apply_inverse_relation(&p, &b_seq, Direction::InvG, (0, 5), &cfg).unwrap();
        for k in 0..=5 {
            assert_eq!(via_g[k as usize], a_seq(k).unwrap());
        }
        let n = 3;
        let rec = lookup("thm_ts").unwrap();
        let pt = ParameterPoint::new(q.clone())
            .unwrap()
            .with(Sym::A, a.clone())
            .with(Sym::B, b.clone())
            .with(Sym::C, c.clone())
            .with(Sym::D, d.clone())
            .with_int(IntSym::N, n);
        for k in 0..=n {
            let term = (rec.exact.summand)(&pt, k, &Guard::STRICT).unwrap().into_exact().unwrap();
            assert_eq!(p.f(n, k).unwrap() * a_seq(k).unwrap(), term, "k={k}");
        }
        let via_f = apply_inverse_relation(&p, &a_seq, Direction::InvF, (0, n), &cfg).unwrap();
        assert_eq!(via_f[n as usize], b_seq(n).unwrap());
    }

    /// Nonterminating summation from the infinite inverse relation with
    /// `a_n = (-1)^n q^{C(n,2)} (q/d)_n/(ad)_n d^n` and
    /// `b_k = (-1)^k q^{C(k,2)} d^k (q/d)_k (aq^{1+2k})_∞/(ad)_∞
    ///        · (R_k d)_∞ / (R_k q^{1+k})_∞`.
    #[test]
    fn nonterminating_curious_sum_from_inversion() {
        let w = Wide::from_real;
        let (a, b, c, d, q) = (w(0.3), w(0.4), w(2.5), w(0.6), w(0.5));
        let p = cor2_pair(a, b, c, q).unwrap();
        let inf = |x: Wide| qpoch_infinite(&x, &q, 1e-18).unwrap().value;
        let rk = |k: i64| (w(1.0) - b * qpow(&q, k)) * (c - qpow(&q, k)).recip().unwrap();
        let sgn = |k: i64| if k % 2 == 0 { w(1.0) } else { w(-1.0) };
        let ad = a * d;
        let qd = q * d.recip().unwrap();
        let a_seq = |n: i64| Ok(sgn(n) * q_triangular(&q, n) * poch(&qd, &q, n) * poch(&ad, &q, n).recip().unwrap() * qpow(&d, n));
        let b_seq = |k: i64| {
            let x = rk(k);
            Ok(sgn(k) * q_triangular(&q, k) * qpow(&d, k) * poch(&qd, &q, k) * inf(a * qpow(&q, 1 + 2 * k))
                * inf(ad).recip().unwrap()
                * inf(x * d)
                * inf(x * qpow(&q, 1 + k)).recip().unwrap())
        };
        let cfg = RotinvConfig::default();
        let b_back = apply_inverse_relation(&p, &a_seq, Direction::RotinvF, (0, 3), &cfg).unwrap();
        for k in 0..=3 {
            let want = b_seq(k).unwrap();
            assert!((b_back[k as usize] - want).abs() < 1e-12 * want.abs(), "k={k}");
        }
        let a_back = apply_inverse_relation(&p, &b_seq, Direction::RotinvG, (0, 2), &cfg).unwrap();
        for l in 0..=2 {
            let want = a_seq(l).unwrap();
            assert!((a_back[l as usize] - want).abs() < 1e-10 * want.abs(), "l={l}");
        }
        // l = 0 is the nonterminating curious sum itself
        let rec = lookup("thm_tns").unwrap();
        let pt = ParameterPoint::new(q)
            .unwrap()
            .with(Sym::A, a)
            .with(Sym::B, b)
            .with(Sym::C, c)
            .with(Sym::D, d);
        let g = Guard::STRICT;
        let eval = |t: crate::qcore::Term<Wide>| t.evaluate(&q, 1e-17, &g).unwrap().value;
        let scale = inf(ad) * inf(a * q).recip().unwrap() * (w(1.0) - b + a * (w(1.0) - c)).recip().unwrap();
        let lhs = eval((rec.float.lhs)(&pt, &g).unwrap());
        assert!((lhs - scale).abs() < 1e-13 * lhs.abs());
        for k in 0..8 {
            let via = p.g(k, 0).unwrap() * b_seq(k).unwrap() * scale;
            let want = eval((rec.float.summand)(&pt, k, &g).unwrap());
            assert!((via - want).abs() < 1e-12 * want.abs().max(1e-300), "k={k}");
        }
        assert!((a_back[0] - w(1.0)).abs() < 1e-10);
    }

    #[test]
    fn divergent_relation_is_reported() {
        let p = InversePair::new("ones", |_, _| Ok(r(1, 1)), |_, _| Ok(r(1, 1)));
        let cfg = RotinvConfig { tol: 1e-12, max_terms: 50 };
        let res = apply_inverse_relation(&p, &|_| Ok(r(1, 1)), Direction::RotinvF, (0, 0), &cfg);
        assert!(matches!(res, Err(Error::Nonconvergence(_))));
    }
}
