//! Algebraic invariants checked over random inputs.

use proptest::prelude::*;

use qpsi_core::harness::{sample, to_json, verify, SampleSpec};
use qpsi_core::inversion::{
    apply_inverse_relation, cor1_pair, cor2_pair, krattenthaler_pair, Direction, InversePair, RotinvConfig,
};
use qpsi_core::qcore::{
    qpoch_finite, qpoch_infinite, sum_series, AdaptiveConfig, Mode, Rational, Scalar, SeriesKind, TermSeries,
    Truncation, Wide,
};
use qpsi_core::Error;

fn rat(num: i64, den: i64) -> Rational {
    Rational::from_ratio(num, den)
}

fn nonzero_rational() -> impl Strategy<Value = Rational> {
    (1i64..40, 1i64..25, any::<bool>()).prop_map(|(n, d, neg)| rat(if neg { -n } else { n }, d))
}

/// `q` with `0.1 < |q| < 0.7`.
fn base() -> impl Strategy<Value = Rational> {
    (2i64..15, any::<bool>()).prop_map(|(n, neg)| rat(if neg { -n } else { n }, 20))
}

fn complex(lo: f64, hi: f64) -> impl Strategy<Value = Wide> {
    (lo..hi, 0.0..std::f64::consts::TAU).prop_map(|(r, t)| Wide::new(r * t.cos(), r * t.sin()))
}

fn rel_dev(x: Wide, y: Wide) -> f64 {
    (x - y).abs() / x.abs().max(y.abs()).max(1e-300)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn qpoch_is_additive_in_the_index(a in nonzero_rational(), q in base(), m in -6i64..=6, n in -6i64..=6) {
        let amq = a.clone() * q.powi(m).unwrap();
        let split = match (qpoch_finite(&a, &q, m), qpoch_finite(&amq, &q, n)) {
            (Ok(x), Ok(y)) => x * y,
            // a factor of a negative-index symbol is a pole
            _ => return Ok(()),
        };
        prop_assert_eq!(qpoch_finite(&a, &q, m + n).unwrap(), split);
    }

    #[test]
    fn infinite_product_quotient_relation(a in complex(0.05, 3.0), q in complex(0.1, 0.7), k in -6i64..=6) {
        let full = qpoch_infinite(&a, &q, 1e-16).unwrap();
        let tail = qpoch_infinite(&(a * q.powi(k).unwrap()), &q, 1e-16).unwrap();
        let finite = match qpoch_finite(&a, &q, k) {
            Ok(v) => v,
            Err(_) => return Ok(()),
        };
        let lhs = finite * tail.value;
        let scale = full.value.abs().max(lhs.abs());
        prop_assume!(scale > 1e-8);
        prop_assert!((lhs - full.value).abs() <= 1e-12 * scale);
    }

    #[test]
    fn terminating_sum_ignores_truncation_policy(q in base(), b in nonzero_rational(), n in 0u64..10) {
        // q-binomial terms (q^-n;q)_k b^k / (q;q)_k vanish beyond n
        let qn = q.powi(-(n as i64)).unwrap();
        let summand = |k: i64| -> qpsi_core::Result<Rational> {
            Ok(qpoch_finite(&qn, &q, k)? * b.powi(k).unwrap() * Scalar::recip(&qpoch_finite(&q, &q, k)?).unwrap())
        };
        let adaptive = Truncation::Adaptive(AdaptiveConfig::default());
        let a = sum_series(&TermSeries::new(SeriesKind::Terminating(n), Truncation::Exact(n), summand)).unwrap();
        let b2 = sum_series(&TermSeries::new(SeriesKind::Terminating(n), adaptive, summand)).unwrap();
        let c = sum_series(&TermSeries::new(SeriesKind::Unilateral, Truncation::Exact(n + 4), summand)).unwrap();
        prop_assert_eq!(&a.value, &b2.value);
        prop_assert_eq!(&a.value, &c.value);
        prop_assert_eq!(a.tail_bound, 0.0);
    }

    #[test]
    fn exact_and_float_agree(a in nonzero_rational(), q in base(), k in -8i64..=8) {
        let exact = match qpoch_finite(&a, &q, k) {
            Ok(v) => v,
            Err(_) => return Ok(()),
        };
        let float = qpoch_finite(&a.to_wide(), &q.to_wide(), k).unwrap();
        let dev = rel_dev(exact.to_wide(), float);
        prop_assert!(dev <= 10.0 * 1e-15 * (k.abs() + 1) as f64, "dev {dev:e}");
    }
}

fn round_trip<S: Scalar>(p: &InversePair<S>, a: &[S], lo: i64) {
    let hi = lo + a.len() as i64 - 1;
    let seq = |k: i64| Ok(a[(k - lo) as usize].clone());
    let cfg = RotinvConfig::default();
    let b = match apply_inverse_relation(p, &seq, Direction::InvF, (lo, hi), &cfg) {
        Ok(b) => b,
        Err(Error::DegenerateInput(_)) | Err(Error::Pole(_)) => return,
        Err(e) => panic!("{e}"),
    };
    let bseq = |k: i64| Ok(b[(k - lo) as usize].clone());
    match apply_inverse_relation(p, &bseq, Direction::InvG, (lo, hi), &cfg) {
        Ok(back) => assert_eq!(back, a),
        // f can be finite where g is not: the context is not pole-free
        Err(Error::DegenerateInput(_)) | Err(Error::Pole(_)) => {}
        Err(e) => panic!("{e}"),
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn inverse_relations_round_trip(
        ctx in (nonzero_rational(), nonzero_rational(), nonzero_rational(), base()),
        seq in prop::collection::vec((-30i64..30, 1i64..9), 1..7),
        lo in 0i64..3,
    ) {
        let (a, b, c, q) = ctx;
        let data: Vec<Rational> = seq.iter().map(|&(n, d)| rat(n, d)).collect();
        if let Ok(p) = cor1_pair(a.clone(), b.clone(), c.clone(), q.clone()) {
            round_trip(&p, &data, lo);
        }
        if let Ok(p) = cor2_pair(a.clone(), b.clone(), c.clone(), q.clone()) {
            round_trip(&p, &data, lo);
        }
        let (a2, c2) = (a.clone(), c.clone());
        let p = krattenthaler_pair(
            move |j| a2.clone() + Rational::from_int(j),
            move |j| c2.clone() * Rational::from_int(j + 2),
            b,
        );
        round_trip(&p, &data, lo);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(6))]

    #[test]
    fn residuals_stay_within_the_error_budget(seed in any::<u64>(), which in 0usize..4) {
        let id = ["1psi1", "thm_bns", "thm_tnsc", "curious_nt"][which];
        let rep = verify(&SampleSpec::new(id, Mode::Float).with_count(10).with_seed(seed)).unwrap();
        for s in &rep.samples {
            prop_assert!(s.error.is_none(), "{:?}", s.error);
            prop_assert!(s.within_budget, "sample {} of {id}: {:?}", s.index, s.abs_residual);
        }
        prop_assert_eq!(rep.summary.budget_violations, 0);
    }

    #[test]
    fn sampling_is_deterministic(seed in any::<u64>(), which in 0usize..3) {
        let id = ["thm_bns", "qgauss", "66s"][which];
        let spec = SampleSpec::new(id, Mode::Float).with_count(5).with_seed(seed);
        prop_assert_eq!(sample::<Wide>(&spec).unwrap(), sample::<Wide>(&spec).unwrap());
        let exact = SampleSpec::new("curious_qps", Mode::Exact).with_count(5).with_seed(seed);
        prop_assert_eq!(sample::<Rational>(&exact).unwrap(), sample::<Rational>(&exact).unwrap());
        let r1 = to_json(&verify(&spec).unwrap()).unwrap();
        let r2 = to_json(&verify(&spec).unwrap()).unwrap();
        prop_assert_eq!(r1, r2);
    }
}
