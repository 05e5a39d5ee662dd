use proptest::prelude::*;
use talenti::lorentz::{lorentz_norm, lp_norm_pow, LorentzIndex};
use talenti::measure::{decreasing_rearrangement, distribution, hardy_littlewood_pairing, LevelMeasure, SampledFunction};

fn cells(max: usize) -> impl Strategy<Value = Vec<(f64, f64)>> {
    prop::collection::vec((-10.0..10.0f64, 0.01..2.0f64), 1..max)
}

fn sampled(pairs: &[(f64, f64)]) -> SampledFunction<f64> {
    SampledFunction::from_pairs(pairs.iter().copied()).unwrap()
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(1e-300)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn hardy_littlewood_pairing_holds(pairs in cells(40), seed in prop::collection::vec(-10.0..10.0f64, 40)) {
        let h = sampled(&pairs);
        let g = sampled(&pairs.iter().zip(&seed).map(|((_, m), v)| (*v, *m)).collect::<Vec<_>>());
        let hl = hardy_littlewood_pairing(&h, &g).unwrap();
        prop_assert!(hl.lhs <= hl.rhs + 1e-12 * hl.rhs.abs().max(1.0), "{hl:?}");
    }

    #[test]
    fn rearrangement_is_equimeasurable(pairs in cells(40), levels in prop::collection::vec(0.0..11.0f64, 32)) {
        let f = sampled(&pairs);
        let (a, b) = (distribution(&f), decreasing_rearrangement(&f).distribution());
        for t in levels.iter().chain(a.breakpoints()) {
            prop_assert!((a.measure_above(*t) - b.measure_above(*t)).abs() <= 1e-12 * f.total_measure());
        }
    }

    #[test]
    fn norms_are_preserved(pairs in cells(40)) {
        let f = sampled(&pairs);
        let d = distribution(&f);
        for p in [1.0, 2.0, 6.0] {
            let direct = f.abs_power_integral(p);
            prop_assert!(rel(direct, lp_norm_pow(&d, p).unwrap()) <= 1e-12);
            // the diagonal Lorentz norm is the Lebesgue norm
            let idx = LorentzIndex::lebesgue(p).unwrap();
            prop_assert!(rel(direct.powf(1.0 / p), lorentz_norm(&d, idx)) <= 1e-12);
        }
    }

    #[test]
    fn layer_cake_matches_plateau_sum(pairs in cells(30), p in 0.2..8.0f64) {
        let f = sampled(&pairs);
        let d = distribution(&f);
        // ∫|f|^p = Σ (b^p - a^p) μ on each plateau (a, b]
        let mut prev = 0.0f64;
        let mut sum = 0.0;
        for (&t, &m) in d.breakpoints().iter().zip(d.plateau_measures()) {
            sum += (t.powf(p) - prev.powf(p)) * m;
            prev = t;
        }
        prop_assert!(rel(sum, f.abs_power_integral(p)) <= 1e-11);
    }

    #[test]
    fn distribution_and_rearrangement_are_monotone(pairs in cells(40)) {
        let f = sampled(&pairs);
        let d = distribution(&f);
        let star = decreasing_rearrangement(&f);
        let top = d.max_level();
        let total = f.total_measure();
        let (mut last_mu, mut last_star) = (f64::INFINITY, f64::INFINITY);
        for k in 0..=10_000 {
            let x = k as f64 / 10_000.0;
            let mu = d.measure_above(top * x);
            let s = star.value_at(total * x * (1.0 - 1e-15));
            prop_assert!(mu <= last_mu && s <= last_star);
            last_mu = mu;
            last_star = s;
        }
    }

    #[test]
    fn lorentz_norm_is_homogeneous(pairs in cells(30), lambda in 0.01..100.0f64, p in 0.2..6.0f64, q in 0.5..6.0f64) {
        let f = sampled(&pairs);
        let scaled = f.map_values(|v| lambda * v).unwrap();
        let idx = LorentzIndex::new(p, q).unwrap();
        let (a, b) = (lorentz_norm(&distribution(&f), idx), lorentz_norm(&distribution(&scaled), idx));
        prop_assert!(rel(lambda * a, b) <= 1e-10);
        let weak = LorentzIndex::weak(p).unwrap();
        let (a, b) = (lorentz_norm(&distribution(&f), weak), lorentz_norm(&distribution(&scaled), weak));
        // the weak quasi-norm is taken without the p-th root
        prop_assert!(rel(lambda.powf(p) * a, b) <= 1e-10);
    }
}
