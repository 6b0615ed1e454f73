use std::collections::BTreeMap;

use egt_core::chain::{build_transition_matrix, classify_states, TransitionMatrix};
use egt_core::game::MetaGame;
use egt_core::population::{enumerate_states, payoff_profile, StateVector};
use egt_core::presets;
use egt_core::revision::{rate_matrix, Eta, Protocol};
use egt_core::simulator::{batch_absorption, rng_from_seed, simulate, uniform, Rng};
use egt_core::Error;
use proptest::prelude::*;

fn chain(meta: &MetaGame, n: usize, protocol: &Protocol) -> TransitionMatrix {
    build_transition_matrix(&enumerate_states(n, 3).unwrap(), meta, protocol).unwrap()
}

fn ipd_chain(n: usize) -> TransitionMatrix {
    chain(
        &presets::ipd(3.0, 1000).unwrap(),
        n,
        &Protocol::BestResponse,
    )
}

#[test]
fn absorbing_start_is_constant() {
    let p = ipd_chain(3);
    let t = simulate(&p, &[3, 0, 0].into(), 50, 1).unwrap();
    assert_eq!(t.states.len(), 51);
    assert!(t.states.iter().all(|s| s.counts() == [3, 0, 0]));
}

#[test]
fn zero_generations() {
    let p = ipd_chain(3);
    let t = simulate(&p, &[1, 1, 1].into(), 0, 9).unwrap();
    assert_eq!(t.states, vec![StateVector::from([1, 1, 1])]);
}

#[test]
fn start_outside_space_rejected() {
    let p = ipd_chain(3);
    assert_eq!(
        simulate(&p, &[1, 1, 2].into(), 5, 0),
        Err(Error::StateNotInSpace)
    );
    let cls = classify_states(&p);
    assert!(batch_absorption(&p, &cls, &[4, 0, 0].into(), 10, 10, 0).is_err());
}

#[test]
fn balanced_start_settles_in_pure_state() {
    let p = ipd_chain(3);
    for seed in 0..20 {
        let t = simulate(&p, &[1, 1, 1].into(), 100, seed).unwrap();
        let last = t.states.last().unwrap();
        assert!(last.is_pure());
        let first_pure = t.states.iter().position(|s| s.is_pure()).unwrap();
        assert!(t.states[first_pure..].iter().all(|s| s == last));
    }
}

#[test]
fn batch_from_blue_side() {
    let p = ipd_chain(3);
    let cls = classify_states(&p);
    let batch = batch_absorption(&p, &cls, &[0, 1, 2].into(), 10_000, 10_000, 3).unwrap();
    let blue = cls.class_of(p.space().pure_state(2)).unwrap();
    assert_eq!(batch.frequencies()[blue], 1.0);
    assert_eq!(batch.non_absorbed, 0);

    let batch = batch_absorption(&p, &cls, &[0, 3, 0].into(), 100, 10, 3).unwrap();
    let green = cls.class_of(p.space().pure_state(1)).unwrap();
    assert_eq!(batch.class_counts[green], 100);
}

#[test]
fn horizon_limits_runs() {
    let p = ipd_chain(9);
    let cls = classify_states(&p);
    let batch = batch_absorption(&p, &cls, &[3, 3, 3].into(), 50, 0, 3).unwrap();
    assert_eq!(batch.non_absorbed, 50);
}

/// Plays the revision step with explicit players: pick one uniformly, then
/// draw its new strategy from its rate row.
fn replay_step(meta: &MetaGame, protocol: &Protocol, z: &mut [usize], rng: &mut Rng) {
    let n = z.len();
    let mut counts = vec![0; 3];
    for &m in z.iter() {
        counts[m] += 1;
    }
    let s = StateVector::new(counts);
    let profile = payoff_profile(&s, meta).unwrap();
    let rates = rate_matrix(protocol, &s, &profile).unwrap();
    let chosen = ((uniform(rng) * n as f64) as usize).min(n - 1);
    let u = uniform(rng);
    let mut acc = 0.0;
    for (to, &r) in rates.row(z[chosen]).iter().enumerate() {
        acc += r;
        if u < acc {
            z[chosen] = to;
            return;
        }
    }
}

#[test]
fn protocol_replay_matches_chain() {
    const DRAWS: usize = 20_000;
    let games = [presets::ipd(3.0, 1000).unwrap(), presets::rps().unwrap()];
    let protocols = [
        Protocol::BestResponse,
        Protocol::PairwiseProportionalComparison,
        Protocol::ComparisonToAverage,
        Protocol::Logit(Eta::new(2.0).unwrap()),
    ];
    let mut rng = rng_from_seed(2024);
    for meta in &games {
        for protocol in &protocols {
            let p = chain(meta, 4, protocol);
            for (i, s) in p.space().states().iter().enumerate() {
                let mut hits: BTreeMap<usize, usize> = BTreeMap::new();
                for _ in 0..DRAWS {
                    let mut z: Vec<usize> = (0..3)
                        .flat_map(|m| std::iter::repeat_n(m, s.count(m)))
                        .collect();
                    replay_step(meta, protocol, &mut z, &mut rng);
                    let mut c = vec![0; 3];
                    z.iter().for_each(|&m| c[m] += 1);
                    *hits
                        .entry(p.space().index_of(&c.into()).unwrap())
                        .or_default() += 1;
                }
                for (&j, &count) in &hits {
                    assert!(p.get(i, j) > 0.0, "replay reached an impossible state");
                    let prob = p.get(i, j);
                    let freq = count as f64 / DRAWS as f64;
                    let se = (prob * (1.0 - prob) / DRAWS as f64).sqrt();
                    assert!(
                        (freq - prob).abs() <= 4.0 * se + 1e-12,
                        "{protocol} {s}: {freq} vs {prob}"
                    );
                }
            }
        }
    }
}

proptest! {
    #[test]
    fn trajectories_follow_support(seed in any::<u64>(), start in 0usize..55, n in 3usize..=9) {
        let p = chain(&presets::rps().unwrap(), n, &Protocol::PairwiseComparison);
        let start = p.space().state(start % p.len()).clone();
        let a = simulate(&p, &start, 200, seed).unwrap();
        let b = simulate(&p, &start, 200, seed).unwrap();
        prop_assert_eq!(&a, &b);
        for w in a.indices.windows(2) {
            prop_assert!(p.get(w[0], w[1]) > 0.0);
        }
    }
}
