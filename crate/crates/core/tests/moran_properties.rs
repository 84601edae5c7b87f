use evoswitch::game::Game2x2;
use evoswitch::moran::{
    fixation_closed_form, fixation_linear_solve, fixation_monte_carlo, simulate, transition_row, MoranModel,
};
use proptest::prelude::*;

fn positive_game() -> impl Strategy<Value = Game2x2> {
    (0.1..5.0f64, 0.1..5.0f64, 0.1..5.0f64, 0.1..5.0f64).prop_map(|(a, b, c, d)| Game2x2::new(a, b, c, d).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(500))]

    #[test]
    fn rows_are_distributions(g in positive_game(), (n, i) in (2usize..200).prop_flat_map(|n| (Just(n), 0..=n))) {
        let row = transition_row(&g, i, n).unwrap();
        for v in [row.up, row.down, row.stay] {
            prop_assert!((0.0..=1.0).contains(&v));
        }
        prop_assert!((row.up + row.down + row.stay - 1.0).abs() < 1e-12);
        if i == 0 {
            prop_assert_eq!(row.down, 0.0);
        }
        if i == n {
            prop_assert_eq!(row.up, 0.0);
        }
    }

    #[test]
    fn absorption_is_monotone(g1 in positive_game(), g2 in positive_game(), p in 0.0..=1.0f64, n in 2usize..150) {
        let phi: Vec<f64> = fixation_linear_solve(&MoranModel::new(n, g1, g2, p).unwrap())
            .iter()
            .map(|r| r.probability)
            .collect();
        prop_assert_eq!(phi[0], 0.0);
        prop_assert_eq!(phi[n], 1.0);
        prop_assert!(phi.windows(2).all(|w| w[1] >= w[0]));
        prop_assert!(phi.iter().all(|v| (0.0..=1.0).contains(v)));
    }

    #[test]
    fn closed_form_agrees_with_solve(r in 0.2..5.0f64, n in 2usize..120, p in 0.0..=1.0f64) {
        let model = MoranModel::relative_fitness(n, r, r, p).unwrap();
        for (i, res) in fixation_linear_solve(&model).iter().enumerate() {
            let closed = fixation_closed_form(r, i, n).unwrap().probability;
            prop_assert!((res.probability - closed).abs() < 1e-10);
        }
    }

    #[test]
    fn fixation_grows_with_p(s in 0.5..4.0f64, dt in 0.1..2.0f64, n in 2usize..100) {
        let t = (s - dt).max(0.0);
        let phi: Vec<f64> = (0..=20)
            .map(|k| {
                let m = MoranModel::relative_fitness(n, s, t, k as f64 / 20.0).unwrap();
                fixation_linear_solve(&m)[1].probability
            })
            .collect();
        prop_assert!(phi.windows(2).all(|w| w[1] >= w[0] - 1e-15), "{:?}", phi);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(50))]

    #[test]
    fn seeds_reproduce_runs(s in 0.5..3.0f64, t in 0.5..3.0f64, p in 0.0..=1.0f64, seed in any::<u64>()) {
        let m = MoranModel::relative_fitness(25, s, t, p).unwrap();
        prop_assert_eq!(simulate(&m, 3, seed).unwrap(), simulate(&m, 3, seed).unwrap());
    }
}

#[test]
fn neutral_martingale_in_all_methods() {
    let n = 12;
    let m = MoranModel::relative_fitness(n, 1.0, 1.0, 0.5).unwrap();
    let exact = fixation_linear_solve(&m);
    for i in 0..=n {
        let expected = i as f64 / n as f64;
        assert!((exact[i].probability - expected).abs() < 1e-12);
        assert!((fixation_closed_form(1.0, i, n).unwrap().probability - expected).abs() < 1e-12);
    }
    for i in [1, 6, 11] {
        let est = fixation_monte_carlo(&m, i, 20_000, i as u64).unwrap();
        let expected = i as f64 / n as f64;
        assert!((est.probability - expected).abs() < 3.0 * est.stderr.unwrap(), "i = {i}: {est:?}");
    }
}

#[test]
fn switching_ensembles_match_the_mean_chain() {
    for (k, &(p, s, t, n)) in [(0.2, 3.0, 0.5, 10), (0.5, 0.5, 2.0, 15), (0.8, 2.0, 1.0, 20), (0.5, 0.0, 2.0, 8)]
        .iter()
        .enumerate()
    {
        let m = MoranModel::relative_fitness(n, s, t, p).unwrap();
        let exact = fixation_linear_solve(&m)[n / 2].probability;
        let est = fixation_monte_carlo(&m, n / 2, 40_000, 100 + k as u64).unwrap();
        assert!((est.probability - exact).abs() < 3.0 * est.stderr.unwrap(), "{:?}: {est:?} vs {exact}", (p, s, t, n));
    }
}
