//! Generic unilateral and bilateral summation.

use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

use super::scalar::Scalar;
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SeriesKind {
    /// `k = 0, 1, 2, ...`
    Unilateral,
    /// `k = 0..=n`, summed exactly whatever the truncation policy.
    Terminating(u64),
    /// `k ∈ ℤ`
    Bilateral,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AdaptiveConfig {
    /// Target truncation error relative to the magnitude of the sum.
    pub tol: f64,
    /// Largest acceptable empirical term ratio.
    pub rho_max: f64,
    /// Maximum number of terms per direction.
    pub k_max: u64,
}

impl Default for AdaptiveConfig {
    fn default() -> Self {
        AdaptiveConfig {
            tol: 1e-12,
            rho_max: 0.995,
            k_max: 20_000,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum Truncation {
    /// Sum `k = 0..=n` (unilateral) or `k = -n..=n` (bilateral).
    Exact(u64),
    Adaptive(AdaptiveConfig),
}

pub struct TermSeries<'a, S> {
    pub summand: Box<dyn Fn(i64) -> Result<S> + Send + Sync + 'a>,
    pub kind: SeriesKind,
    pub truncation: Truncation,
}

impl<'a, S: Scalar> TermSeries<'a, S> {
    pub fn new(
        kind: SeriesKind,
        truncation: Truncation,
        summand: impl Fn(i64) -> Result<S> + Send + Sync + 'a,
    ) -> Self {
        TermSeries {
            summand: Box::new(summand),
            kind,
            truncation,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SeriesSum<S> {
    pub value: S,
    /// Bound on the truncation error; zero for finite sums.
    pub tail_bound: f64,
    pub terms_used: usize,
    /// Inclusive index range that was summed.
    pub window: (i64, i64),
    /// `Σ |t_k|` over the window, the scale for rounding error.
    pub abs_sum: f64,
}

/// Number of trailing ratios inspected by the tail test.
const RATIO_WINDOW: usize = 5;
const MIN_TERMS: usize = RATIO_WINDOW + 3;

/// One direction of an adaptive sum.
struct Side {
    next: i64,
    step: i64,
    count: u64,
    recent: VecDeque<f64>,
    rho: f64,
}

impl Side {
    fn new(start: i64, step: i64) -> Self {
        Side {
            next: start,
            step,
            count: 0,
            recent: VecDeque::with_capacity(RATIO_WINDOW + 1),
            rho: f64::INFINITY,
        }
    }

    fn record(&mut self, log2_abs: f64) {
        if self.recent.len() == RATIO_WINDOW + 1 {
            self.recent.pop_front();
        }
        self.recent.push_back(log2_abs);
        self.next += self.step;
        self.count += 1;
    }

    /// log2 of the geometric tail estimate, or `None` while undetermined.
    fn log2_tail(&mut self, cfg: &AdaptiveConfig) -> Option<f64> {
        if (self.count as usize) < MIN_TERMS {
            return None;
        }
        if self.recent.iter().rev().take(RATIO_WINDOW).all(|l| *l == f64::NEG_INFINITY) {
            self.rho = 0.0;
            return Some(f64::NEG_INFINITY);
        }
        let mut worst = f64::NEG_INFINITY;
        let mut pairs = 0;
        for (a, b) in self.recent.iter().zip(self.recent.iter().skip(1)) {
            if a.is_finite() && b.is_finite() {
                worst = worst.max(b - a);
                pairs += 1;
            } else if !a.is_finite() && b.is_finite() {
                // A nonzero term after a zero one: no ratio information.
                return None;
            }
        }
        if pairs < 3 {
            return None;
        }
        self.rho = worst.exp2();
        if self.rho >= cfg.rho_max {
            return None;
        }
        let last = self
            .recent
            .iter()
            .rev()
            .take(2)
            .copied()
            .fold(f64::NEG_INFINITY, f64::max);
        Some(last + (self.rho / (1.0 - self.rho)).log2())
    }
}

/// Executes a [`TermSeries`].
///
/// Adaptive bilateral sums grow each direction independently until its
/// geometric tail estimate drops below `tol/4` of the current sum, so a
/// slowly decaying side gets more terms than a fast one.
pub fn sum_series<S: Scalar>(s: &TermSeries<'_, S>) -> Result<SeriesSum<S>> {
    match (s.kind, s.truncation) {
        (SeriesKind::Terminating(n), _) => finite_sum(s, 0, n as i64),
        (SeriesKind::Unilateral, Truncation::Exact(n)) => finite_sum(s, 0, n as i64),
        (SeriesKind::Bilateral, Truncation::Exact(n)) => finite_sum(s, -(n as i64), n as i64),
        (_, Truncation::Adaptive(cfg)) => {
            if S::is_exact() {
                return Err(Error::Mode(
                    "adaptive truncation of a nonterminating series is not exact".into(),
                ));
            }
            adaptive_sum(s, &cfg)
        }
    }
}

fn finite_sum<S: Scalar>(s: &TermSeries<'_, S>, lo: i64, hi: i64) -> Result<SeriesSum<S>> {
    let mut value = S::zero();
    let mut abs_sum = 0.0;
    for k in lo..=hi {
        let t = (s.summand)(k)?;
        abs_sum += t.abs_f64();
        value = value + t;
    }
    Ok(SeriesSum {
        value,
        tail_bound: 0.0,
        terms_used: (hi - lo + 1).max(0) as usize,
        window: (lo, hi),
        abs_sum,
    })
}

fn adaptive_sum<S: Scalar>(s: &TermSeries<'_, S>, cfg: &AdaptiveConfig) -> Result<SeriesSum<S>> {
    let bilateral = s.kind == SeriesKind::Bilateral;
    let share = if bilateral { 0.25 } else { 0.5 };
    let mut sides = vec![Side::new(0, 1)];
    if bilateral {
        sides.push(Side::new(-1, -1));
    }
    let mut value = S::zero();
    let mut abs_sum = 0.0;
    let mut tails = vec![f64::INFINITY; sides.len()];
    loop {
        let scale = value.abs_f64().max(abs_sum * f64::EPSILON).max(f64::MIN_POSITIVE);
        let limit = (share * cfg.tol * scale).log2();
        let mut all_done = true;
        for (i, side) in sides.iter_mut().enumerate() {
            let tail = side.log2_tail(cfg);
            if let Some(t) = tail {
                if t <= limit {
                    tails[i] = t.exp2();
                    continue;
                }
            }
            all_done = false;
            if side.count >= cfg.k_max {
                return Err(Error::Nonconvergence(format!(
                    "no geometric tail below rho_max={} within {} terms (k={}, last ratio {:.4})",
                    cfg.rho_max, cfg.k_max, side.next, side.rho
                )));
            }
            let t = (s.summand)(side.next)?;
            side.record(t.log2_abs());
            abs_sum += t.abs_f64();
            value = value + t;
        }
        if all_done {
            break;
        }
    }
    let pos = &sides[0];
    let (lo, used) = if bilateral {
        (sides[1].next + 1, pos.count + sides[1].count)
    } else {
        (0, pos.count)
    };
    Ok(SeriesSum {
        value,
        tail_bound: tails.iter().sum(),
        terms_used: used as usize,
        window: (lo, pos.next - 1),
        abs_sum,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qcore::{Rational, Wide};

    #[test]
    fn kronecker_delta_bilateral() {
        let s = TermSeries::new(SeriesKind::Bilateral, Truncation::Adaptive(Default::default()), |k| {
            Ok(if k == 0 { Wide::from_real(1.0) } else { Wide::ZERO })
        });
        let r = sum_series(&s).unwrap();
        assert_eq!(r.value, Wide::from_real(1.0));
        assert_eq!(r.tail_bound, 0.0);
    }

    #[test]
    fn geometric_series() {
        let s = TermSeries::new(SeriesKind::Unilateral, Truncation::Adaptive(Default::default()), |k| {
            Ok(Wide::from_real(0.5f64.powi(k as i32)))
        });
        let r = sum_series(&s).unwrap();
        let err = (r.value.to_complex().re - 2.0).abs();
        assert!(err <= r.tail_bound + 1e-15, "err {err} bound {}", r.tail_bound);
        assert!(r.tail_bound < 1e-12 * 2.0);
    }

    #[test]
    fn asymmetric_decay_grows_unevenly() {
        // 0.9^k for k >= 0, 0.2^{|k|} for k < 0
        let s = TermSeries::new(SeriesKind::Bilateral, Truncation::Adaptive(Default::default()), |k| {
            Ok(Wide::from_real(if k >= 0 { 0.9f64.powi(k as i32) } else { 0.2f64.powi(-k as i32) }))
        });
        let r = sum_series(&s).unwrap();
        assert!(r.window.1 > 5 * (-r.window.0));
        let exact = 10.0 + 0.25;
        assert!((r.value.to_complex().re - exact).abs() < 1e-11 * exact);
    }

    #[test]
    fn divergent_series_reports_nonconvergence() {
        let cfg = AdaptiveConfig {
            k_max: 500,
            ..Default::default()
        };
        let s = TermSeries::new(SeriesKind::Unilateral, Truncation::Adaptive(cfg), |k| {
            Ok(Wide::from_real(1.0 / (k as f64 + 1.0)))
        });
        assert!(matches!(sum_series(&s), Err(Error::Nonconvergence(_))));
    }

    #[test]
    fn terminating_ignores_policy() {
        let f = |k: i64| Ok(Rational::from_ratio(k + 1, 3));
        let a = sum_series(&TermSeries::new(SeriesKind::Terminating(4), Truncation::Exact(1), f)).unwrap();
        let b = sum_series(&TermSeries::new(
            SeriesKind::Terminating(4),
            Truncation::Adaptive(Default::default()),
            f,
        ))
        .unwrap();
        assert_eq!(a.value, b.value);
        assert_eq!(a.value, Rational::from_ratio(5, 1));
    }

    #[test]
    fn exact_mode_rejects_adaptive_nonterminating() {
        let s = TermSeries::new(SeriesKind::Unilateral, Truncation::Adaptive(Default::default()), |_| {
            Ok(Rational::from_ratio(0, 1))
        });
        assert!(matches!(sum_series(&s), Err(Error::Mode(_))));
    }
}
