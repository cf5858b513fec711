use epipolicy::{
    step_observed, step_pair, step_population, Action, ModelParams, ObservedState, PopulationState, Purpose,
    Reproduction, RngStream, TransitionProbs,
};
use proptest::prelude::*;

fn params_strategy() -> impl Strategy<Value = ModelParams> {
    (0.0..=1.0f64, 0.0..=0.5f64, 0.0..=0.5f64, 0.0..=0.25f64, 0.0..=0.25f64, 0u64..2_000).prop_map(
        |(p_l_im, p_im_is, p_im_r, p_is_r, p_is_d1, cap)| {
            ModelParams::new(
                TransitionProbs { p_l_im, p_im_is, p_im_r, p_is_r, p_is_d1 },
                Reproduction::default(),
                3.0,
                cap,
            )
            .unwrap()
        },
    )
}

fn states_strategy() -> impl Strategy<Value = (PopulationState, ObservedState)> {
    (
        prop::array::uniform6(0u64..50_000),
        prop::array::uniform4(0.0..=1.0f64),
        1u32..200,
    )
        .prop_map(|([s, l, i_m, i_s, r, d], f, day)| {
            let pop = PopulationState { day, s, l, i_m, i_s, r, d };
            let part = |x: u64, frac: f64| (x as f64 * frac).floor() as u64;
            let obs = ObservedState { day, i_m: part(i_m, f[0]), i_s: part(i_s, f[1]), r: part(r, f[2]), d: part(d, f[3]) };
            (pop, obs)
        })
}

fn action_strategy() -> impl Strategy<Value = Action> {
    prop::sample::select(Action::ALL.to_vec())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(512))]

    #[test]
    fn population_step_conserves_and_orders(
        params in params_strategy(),
        (pop, _) in states_strategy(),
        action in action_strategy(),
        seed in any::<u64>(),
    ) {
        let mut rng = RngStream::for_purpose(seed, Purpose::Test, 1, 0);
        let next = step_population(&pop, &params, action, &mut rng);
        prop_assert_eq!(next.total(), pop.total());
        prop_assert_eq!(next.day, pop.day + 1);
        prop_assert!(next.s <= pop.s);
        prop_assert!(next.r >= pop.r);
        prop_assert!(next.d >= pop.d);
    }

    #[test]
    fn observed_step_terminal_compartments_grow(
        params in params_strategy(),
        (pop, obs) in states_strategy(),
        t_m in 0.0..=1.0f64,
        t_s in 0.0..=1.0f64,
        seed in any::<u64>(),
    ) {
        let mut rng = RngStream::for_purpose(seed, Purpose::Test, 2, 0);
        let next = step_observed(&pop, &obs, &params, t_m, t_s, &mut rng).unwrap();
        prop_assert_eq!(next.day, obs.day + 1);
        prop_assert!(next.r >= obs.r);
        prop_assert!(next.d >= obs.d);
        // Documented infected can only come from the undocumented pools or stay.
        prop_assert!(next.i_m + next.i_s + next.r + next.d <= obs.i_m + obs.i_s + obs.r + obs.d + (pop.i_m - obs.i_m) + (pop.i_s - obs.i_s));
    }

    #[test]
    fn coupled_step_keeps_documented_inside_hidden(
        params in params_strategy(),
        (pop, obs) in states_strategy(),
        action in action_strategy(),
        t_m in 0.0..=1.0f64,
        t_s in 0.0..=1.0f64,
        seed in any::<u64>(),
    ) {
        let mut rng = RngStream::for_purpose(seed, Purpose::Test, 3, 0);
        let (mut p, mut o) = (pop, obs);
        for _ in 0..5 {
            let (np, no) = step_pair(&p, &o, &params, action, t_m, t_s, &mut rng).unwrap();
            prop_assert_eq!(np.total(), pop.total());
            prop_assert!(no.fits_within(&np));
            prop_assert!(np.r >= p.r && np.d >= p.d && no.r >= o.r && no.d >= o.d);
            p = np;
            o = no;
        }
    }

    #[test]
    fn same_stream_same_step(
        params in params_strategy(),
        (pop, obs) in states_strategy(),
        seed in any::<u64>(),
        id in any::<u32>(),
    ) {
        let a = step_pair(&pop, &obs, &params, Action::Partial, 0.1, 0.2, &mut RngStream::for_purpose(seed, Purpose::Test, 0, id));
        let b = step_pair(&pop, &obs, &params, Action::Partial, 0.1, 0.2, &mut RngStream::for_purpose(seed, Purpose::Test, 0, id));
        prop_assert_eq!(a, b);
    }
}

#[test]
fn mild_dwell_time_matches_geometric_mean() {
    // A closed cohort of mildly infected with no new infections: the expected
    // number of person-days spent in I_m per person is 1/q with q the exit
    // probability.
    let probs = TransitionProbs::initial_estimate();
    let params = ModelParams::new(probs, Reproduction::default(), 3.0, 0).unwrap();
    let q = probs.p_im_is + probs.p_im_r;
    let n = 200_000u64;
    let mut pop = PopulationState { day: 1, s: 0, l: 0, i_m: n, i_s: 0, r: 0, d: 0 };
    let mut rng = RngStream::for_purpose(11, Purpose::Test, 9, 0);
    let mut person_days = 0u64;
    while pop.i_m > 0 {
        person_days += pop.i_m;
        pop = step_population(&pop, &params, Action::Full, &mut rng);
    }
    let mean_dwell = person_days as f64 / n as f64;
    let expected = 1.0 / q;
    assert!((mean_dwell / expected - 1.0).abs() < 0.02, "dwell {mean_dwell} vs {expected}");
}

#[test]
fn capacity_regime_raises_deaths() {
    // Same severe count on each side of the capacity boundary.
    let base = ModelParams::new(TransitionProbs { p_is_d1: 0.05, ..TransitionProbs::zero() }, Reproduction::default(), 3.0, 1_000).unwrap();
    let deaths = |i_s: u64| {
        let mut total = 0u64;
        for run in 0..200u32 {
            let pop = PopulationState { day: 1, s: 0, l: 0, i_m: 0, i_s, r: 0, d: 0 };
            let mut rng = RngStream::for_purpose(5, Purpose::Test, 4, run);
            total += step_population(&pop, &base, Action::NoLockdown, &mut rng).d;
        }
        total as f64 / (200.0 * i_s as f64)
    };
    let below = deaths(1_000);
    let above = deaths(1_001);
    assert!((below - 0.05).abs() < 0.005, "{below}");
    assert!((above - 0.15).abs() < 0.01, "{above}");
}
