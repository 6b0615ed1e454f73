use egt_core::chain::{build_transition_matrix, classify_states, TransitionMatrix};
use egt_core::game::MetaGame;
use egt_core::population::{enumerate_states, StateVector};
use egt_core::presets;
use egt_core::revision::{Eta, Protocol};
use egt_core::simulator::batch_absorption;
use egt_core::solver::{absorption_probabilities, rgb_colors, Rgb};
use egt_core::Error;

fn chain(meta: &MetaGame, n: usize, protocol: &Protocol) -> TransitionMatrix {
    build_transition_matrix(&enumerate_states(n, 3).unwrap(), meta, protocol).unwrap()
}

fn idx(p: &TransitionMatrix, s: [usize; 3]) -> usize {
    p.space().index_of(&s.into()).unwrap()
}

#[test]
fn three_player_prisoners_dilemma() {
    let p = chain(
        &presets::ipd(3.0, 1000).unwrap(),
        3,
        &Protocol::BestResponse,
    );
    let cls = classify_states(&p);
    let res = absorption_probabilities(&p, &cls).unwrap();
    assert!(res.residual() <= 1e-10);
    let blue = idx(&p, [0, 1, 2]);
    assert!((res.pure()[blue][2] - 1.0).abs() < 1e-12);
    let start = idx(&p, [2, 1, 0]);
    assert!((res.pure()[start][1] - 1.0).abs() < 1e-12);
    for class in res.classes() {
        for &s in class {
            let k = res.class_of(s).unwrap();
            assert!(res.probs()[s]
                .iter()
                .enumerate()
                .all(|(j, &v)| v == if j == k { 1.0 } else { 0.0 }));
        }
    }
    let colors = rgb_colors(&res);
    assert_eq!(colors[idx(&p, [3, 0, 0])].hex(), "#FF0000");
    assert_eq!(colors[idx(&p, [0, 3, 0])].hex(), "#00FF00");
    assert_eq!(colors[idx(&p, [0, 0, 3])].hex(), "#0000FF");
}

fn harmonic_residual(p: &TransitionMatrix, probs: &[Vec<f64>], transient: &[usize]) -> f64 {
    let mut worst = 0.0f64;
    for &t in transient {
        for (k, &here) in probs[t].iter().enumerate() {
            let one_step: f64 = p.row(t).iter().map(|&(s, w)| w * probs[s][k]).sum();
            worst = worst.max((one_step - here).abs());
        }
    }
    worst
}

#[test]
fn solutions_are_harmonic() {
    let games = [
        presets::ipd(3.0, 1000).unwrap(),
        presets::iterated_stag_hunt(10.0, 1000).unwrap(),
        presets::rps().unwrap(),
    ];
    let protocols = [
        Protocol::BestResponse,
        Protocol::PairwiseProportionalComparison,
        Protocol::PairwiseComparison,
        Protocol::ComparisonToAverage,
        Protocol::Logit(Eta::new(1.0).unwrap()),
        Protocol::Logit(Eta::new(1000.0).unwrap()),
    ];
    for meta in &games {
        for protocol in &protocols {
            for n in [3, 8, 15] {
                let p = chain(meta, n, protocol);
                let cls = classify_states(&p);
                let res = absorption_probabilities(&p, &cls).unwrap();
                assert!(res.residual() <= 1e-10);
                assert!(res.max_row_sum_error() <= 1e-9, "{protocol} N={n}");
                assert!(harmonic_residual(&p, res.probs(), cls.transient()) <= 1e-9);
                for row in res.pure() {
                    assert!(row.iter().sum::<f64>() <= 1.0 + 1e-9);
                }
            }
        }
    }
}

#[test]
fn pure_channels_sum_to_one_when_only_pure_states_recur() {
    let p = chain(&presets::rps().unwrap(), 9, &Protocol::BestResponse);
    let cls = classify_states(&p);
    assert_eq!(cls.recurrent_classes().len(), 3);
    let res = absorption_probabilities(&p, &cls).unwrap();
    for row in res.pure() {
        assert!((row.iter().sum::<f64>() - 1.0).abs() <= 1e-9);
    }
}

#[test]
fn non_pure_absorbing_states_are_black() {
    // Under PC an AllC/TFT mix has equal totals only when s1 = s3, and such
    // states stay put: every revising player sees no surplus.
    let p = chain(
        &presets::ipd(3.0, 1000).unwrap(),
        4,
        &Protocol::PairwiseComparison,
    );
    let cls = classify_states(&p);
    let res = absorption_probabilities(&p, &cls).unwrap();
    let colors = rgb_colors(&res);
    let mixed = idx(&p, [2, 0, 2]);
    assert!(cls.is_absorbing(mixed));
    assert_eq!(colors[mixed], Rgb::BLACK);
    assert_eq!(colors[idx(&p, [4, 0, 0])].hex(), "#FF0000");
}

#[test]
fn closed_class_labeled_transient_is_singular() {
    let space = enumerate_states(2, 2).unwrap();
    // states 0 and 1 swap forever, state 2 absorbs
    let p =
        TransitionMatrix::from_rows(space, vec![vec![(1, 1.0)], vec![(0, 1.0)], vec![(2, 1.0)]]);
    assert_eq!(
        classify_states(&p).recurrent_classes(),
        &[vec![0, 1], vec![2]]
    );
    // classification of a chain in which 0 and 1 drain into 2
    let other = TransitionMatrix::from_rows(
        p.space().clone(),
        vec![vec![(2, 1.0)], vec![(2, 1.0)], vec![(2, 1.0)]],
    );
    let wrong = classify_states(&other);
    let err = absorption_probabilities(&p, &wrong).unwrap_err();
    assert!(matches!(err, Error::Singular { .. }), "{err:?}");
}

fn check_against_simulation(meta: &MetaGame, n: usize, start: [usize; 3], seed: u64) {
    const RUNS: u64 = 20_000;
    let p = chain(meta, n, &Protocol::BestResponse);
    let cls = classify_states(&p);
    let res = absorption_probabilities(&p, &cls).unwrap();
    let origin: StateVector = start.into();
    let batch = batch_absorption(&p, &cls, &origin, RUNS, 1_000_000, seed).unwrap();
    assert_eq!(batch.non_absorbed, 0);
    let i = p.space().index_of(&origin).unwrap();
    for (k, freq) in batch.frequencies().into_iter().enumerate() {
        let prob = res.prob(i, k);
        let se = (prob * (1.0 - prob) / RUNS as f64).sqrt();
        assert!(
            (freq - prob).abs() <= (3.0 * se).max(1e-9),
            "N={n} start={start:?} class {k}: empirical {freq} vs solved {prob}"
        );
    }
}

#[test]
fn monte_carlo_agrees_with_solver() {
    let ipd = presets::ipd(3.0, 1000).unwrap();
    let rps = presets::rps().unwrap();
    check_against_simulation(&ipd, 3, [0, 1, 2], 11);
    check_against_simulation(&ipd, 3, [1, 1, 1], 12);
    check_against_simulation(&ipd, 9, [3, 3, 3], 13);
    check_against_simulation(&ipd, 9, [6, 1, 2], 14);
    check_against_simulation(&rps, 3, [1, 1, 1], 15);
    check_against_simulation(&rps, 9, [3, 3, 3], 16);
    check_against_simulation(&rps, 9, [5, 3, 1], 17);
}

#[test]
fn large_chains_solve_accurately() {
    for (meta, n) in [
        (presets::ipd(3.0, 1000).unwrap(), 60),
        (presets::rps().unwrap(), 75),
    ] {
        let p = chain(&meta, n, &Protocol::BestResponse);
        let cls = classify_states(&p);
        let res = absorption_probabilities(&p, &cls).unwrap();
        assert!(res.residual() <= 1e-12, "N={n}: {:e}", res.residual());
        assert!(harmonic_residual(&p, res.probs(), cls.transient()) <= 1e-12);
        assert!(res.max_row_sum_error() <= 1e-12);
    }
}

#[test]
fn symmetric_ties_are_exact() {
    // (2, 26, 2) under a = 3.2 lies exactly on the one-half boundary
    let p = chain(
        &presets::ipd(3.2, 1000).unwrap(),
        30,
        &Protocol::BestResponse,
    );
    let res = absorption_probabilities(&p, &classify_states(&p)).unwrap();
    assert!((res.pure()[idx(&p, [2, 26, 2])][1] - 0.5).abs() < 1e-14);
}
