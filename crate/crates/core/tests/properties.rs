use electoral_core::contest::{expected_policy, win_probability};
use electoral_core::solver::{best_response, extremal_equilibria};
use electoral_core::{
    BestResponseOptions, ElectionModel, EquilibriumOptions, IdealPair, MedianBelief, PlatformProfile, Side,
    UtilitySpec,
};
use proptest::prelude::*;

fn belief() -> impl Strategy<Value = MedianBelief> {
    prop_oneof![
        Just(MedianBelief::uniform()),
        (0.05f64..0.95).prop_map(|m| MedianBelief::triangular(m).unwrap()),
        (0.3f64..4.0).prop_map(|k| MedianBelief::power(k).unwrap()),
        (0.0f64..2.0).prop_map(|a| {
            let samples = (0..=100).map(|i| i as f64 / 100.0).map(|x| (x, 0.1 + a * x + (1.0 - x) * x)).collect();
            MedianBelief::numeric(samples).unwrap()
        }),
    ]
}

fn utility() -> impl Strategy<Value = UtilitySpec> {
    prop_oneof![
        Just(UtilitySpec::Quadratic),
        Just(UtilitySpec::Exponential),
        (0.2f64..5.0, -2.0f64..2.0).prop_map(|(a, b)| UtilitySpec::affine(UtilitySpec::Quadratic, a, b).unwrap()),
    ]
}

fn ideals() -> impl Strategy<Value = (f64, f64)> {
    (0.0f64..1.0, 0.0f64..1.0)
        .prop_filter("distinct ideals", |(a, b)| (a - b).abs() > 0.02)
        .prop_map(|(a, b)| (a.min(b), a.max(b)))
}

fn model() -> impl Strategy<Value = ElectionModel> {
    (utility(), belief(), ideals())
        .prop_map(|(u, b, (l, r))| ElectionModel::new(u, b, IdealPair::new(l, r).unwrap()).unwrap())
}

fn side() -> impl Strategy<Value = Side> {
    prop_oneof![Just(Side::Left), Just(Side::Right)]
}

// best responses agree with the monotone selections up to this slack
const BR_TOL: f64 = 1e-7;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn cdf_is_a_distribution(b in belief(), x in 0.0f64..=1.0, y in 0.0f64..=1.0) {
        let (fx, fy) = (b.cdf(x).unwrap(), b.cdf(y).unwrap());
        prop_assert!((0.0..=1.0).contains(&fx));
        if x < y {
            prop_assert!(fx < fy);
        }
        prop_assert!(b.cdf(0.0).unwrap().abs() < 1e-12);
        prop_assert!((b.cdf(1.0).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn policy_lies_between_platforms(b in belief(), x_l in 0.0f64..=1.0, x_r in 0.0f64..=1.0) {
        let p = PlatformProfile { x_l, x_r };
        let pi = expected_policy(&b, &p).unwrap();
        prop_assert!(x_l.min(x_r) <= pi && pi <= x_l.max(x_r));
        let swapped = win_probability(&b, &PlatformProfile { x_l: x_r, x_r: x_l }).unwrap();
        prop_assert!((win_probability(&b, &p).unwrap() + swapped - 1.0).abs() < 1e-12);
    }

    #[test]
    fn best_response_is_affine_invariant(m in model(), s in side(), x in 0.0f64..=1.0, a in 0.2f64..5.0, c in -3.0f64..3.0) {
        let opts = BestResponseOptions::default();
        let base = best_response(&m, s, x, &opts).unwrap();
        let scaled = ElectionModel { utility: UtilitySpec::affine(m.utility.clone(), a, c).unwrap(), ..m.clone() };
        let other = best_response(&scaled, s, x, &opts).unwrap();
        prop_assert!((base.smallest - other.smallest).abs() < BR_TOL);
        prop_assert!((base.largest - other.largest).abs() < BR_TOL);
    }

    /// Both selections of the best response are nondecreasing in the
    /// opponent's platform.
    #[test]
    fn best_response_monotone_in_opponent(m in model(), s in side(), x in 0.0f64..=1.0, y in 0.0f64..=1.0) {
        let opts = BestResponseOptions::default();
        let (lo, hi) = (x.min(y), x.max(y));
        let (a, b) = (best_response(&m, s, lo, &opts).unwrap(), best_response(&m, s, hi, &opts).unwrap());
        prop_assert!(a.smallest <= b.smallest + BR_TOL, "{a:?} vs {b:?}");
        prop_assert!(a.largest <= b.largest + BR_TOL, "{a:?} vs {b:?}");
    }

    /// A candidate further right responds further right to the same opponent.
    #[test]
    fn best_response_monotone_in_own_ideal(m in model(), shift in 0.0f64..1.0, x_r in 0.0f64..=1.0) {
        let opts = BestResponseOptions::default();
        let (t_l, t_r) = (m.ideals.t_l(), m.ideals.t_r());
        let t_l2 = t_l + shift * (t_r - t_l) * 0.99;
        let moved = m.with_ideals(IdealPair::new(t_l2, t_r).unwrap());
        let (a, b) = (best_response(&m, Side::Left, x_r, &opts).unwrap(), best_response(&moved, Side::Left, x_r, &opts).unwrap());
        prop_assert!(a.smallest <= b.smallest + BR_TOL && a.largest <= b.largest + BR_TOL, "{a:?} vs {b:?}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn extremal_equilibria_are_ordered_fixed_points(m in model()) {
        let opts = EquilibriumOptions::default();
        let eq = extremal_equilibria(&m, &opts).unwrap();
        prop_assert!(eq.converged);
        prop_assert!(eq.smallest.x_l <= eq.largest.x_l + 1e-9 && eq.smallest.x_r <= eq.largest.x_r + 1e-9);
        for p in [eq.smallest, eq.largest] {
            prop_assert!(m.ideals.t_l() - 1e-9 <= p.x_l && p.x_l < p.x_r && p.x_r <= m.ideals.t_r() + 1e-9);
            let bl = best_response(&m, Side::Left, p.x_r, &opts.best_response).unwrap();
            let br = best_response(&m, Side::Right, p.x_l, &opts.best_response).unwrap();
            prop_assert!(bl.distance(p.x_l) < 1e-8 && br.distance(p.x_r) < 1e-8, "{p:?}: {bl:?} {br:?}");
        }
    }
}

#[test]
fn f32_and_f64_equilibria_agree() {
    use electoral_core::beliefs::MedianBelief as Belief;
    use electoral_core::contest::{ElectionModel as Model, IdealPair as Ideals};
    use electoral_core::preferences::UtilitySpec as Utility;
    use electoral_core::solver::EquilibriumOptions as Options;

    let m32 = Model::new(Utility::<f32>::Exponential, Belief::triangular(0.4).unwrap(), Ideals::new(0.1, 0.8).unwrap()).unwrap();
    let m64 = Model::new(Utility::<f64>::Exponential, Belief::triangular(0.4).unwrap(), Ideals::new(0.1, 0.8).unwrap()).unwrap();
    let e32 = extremal_equilibria(&m32, &Options::<f32>::default()).unwrap();
    let e64 = extremal_equilibria(&m64, &Options::<f64>::default()).unwrap();
    assert!(e32.converged && e64.converged);
    assert!((e32.smallest.x_l as f64 - e64.smallest.x_l).abs() < 1e-3);
    assert!((e32.largest.x_r as f64 - e64.largest.x_r).abs() < 1e-3);
}
