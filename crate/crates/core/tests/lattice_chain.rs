use std::collections::HashMap;

use airy_gibbs::ensemble::{default_sweeps, sample_nonintersecting};
use airy_gibbs::lattice::{lowest_initial_configuration, run_coupled_chains, Flip, FlipEvent};
use airy_gibbs::stats::mean_var;
use airy_gibbs::{BoundaryData, GridPath, RngSeed};

#[test]
fn single_line_chain_is_uniform_over_walks() {
    // One walk of 6 steps from 0 to 0: C(6, 3) = 20 states.
    let b = BoundaryData::new(0.0, 1.5, vec![0.0], vec![0.0], None).unwrap();
    let mut sys = lowest_initial_configuration(&b, 2).unwrap();
    let mut rng = RngSeed::new(4, 0).rng();
    let mut counts: HashMap<Vec<i64>, usize> = HashMap::new();
    let updates = 400_000;
    for _ in 0..updates {
        sys.glauber_step(FlipEvent::random(sys.steps(), 1, &mut rng));
        *counts.entry(sys.heights()[0].clone()).or_default() += 1;
    }
    assert_eq!(counts.len(), 20);
    for c in counts.values() {
        let p = *c as f64 / updates as f64;
        assert!((p - 0.05).abs() < 0.01, "{p}");
    }
}

#[test]
fn flips_are_involutions() {
    let b = BoundaryData::new(
        0.0,
        2.0,
        vec![1.0, 0.0],
        vec![1.0, 0.0],
        Some(GridPath::constant(0.0, 2.0, 1, -2.0).unwrap()),
    )
    .unwrap();
    let mut sys = lowest_initial_configuration(&b, 2).unwrap();
    let mut rng = RngSeed::new(5, 0).rng();
    for _ in 0..20_000 {
        let ev = FlipEvent::random(sys.steps(), sys.k(), &mut rng);
        let before = sys.clone();
        if sys.glauber_step(ev) {
            let back = FlipEvent {
                flip: if ev.flip == Flip::Up { Flip::Down } else { Flip::Up },
                ..ev
            };
            let mut undo = sys.clone();
            assert!(undo.glauber_step(back));
            assert_eq!(undo, before);
        }
    }
}

#[test]
fn one_line_limit_is_a_brownian_bridge() {
    // Midpoint of a 1/n walk bridge on [0, 1] pinned at 0: mean 0, variance 1/4.
    let b = BoundaryData::new(0.0, 1.0, vec![0.0], vec![0.0], None).unwrap();
    let mut rng = RngSeed::new(6, 0).rng();
    let sweeps = default_sweeps(0.5, 8);
    let mids: Vec<f64> = (0..1500)
        .map(|_| sample_nonintersecting(&b, 2, 8, sweeps, &mut rng).unwrap().line(0)[1])
        .collect();
    let (m, v) = mean_var(&mids);
    assert!(m.abs() < 0.03 && (v - 0.25).abs() < 0.025, "{m} {v}");
}

#[test]
fn coupled_chains_with_floors_stay_ordered() {
    let lower = BoundaryData::new(
        0.0,
        1.0,
        vec![0.0, -0.5],
        vec![0.0, -0.5],
        Some(GridPath::constant(0.0, 1.0, 1, -1.5).unwrap()),
    )
    .unwrap();
    let upper = BoundaryData::new(
        0.0,
        1.0,
        vec![0.5, 0.0],
        vec![1.0, -0.5],
        Some(GridPath::constant(0.0, 1.0, 1, -1.0).unwrap()),
    )
    .unwrap();
    for s in 0..50 {
        let (f, g) = run_coupled_chains(&lower, &upper, 4, 40, &mut RngSeed::new(7, s).rng()).unwrap();
        assert!(f.dominated_by(&g));
        f.validate().unwrap();
        g.validate().unwrap();
    }
}
