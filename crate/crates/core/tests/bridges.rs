use airy_gibbs::bridge::{refine_bridge, sample_bridge, sample_supremum};
use airy_gibbs::resample::estimate_acceptance_probability;
use airy_gibbs::stats::{ks_two_sample, mean_var};
use airy_gibbs::{BoundaryData, GridPath, RngSeed};

#[test]
fn refinement_matches_direct_sampling() {
    let mut rng = RngSeed::new(1, 0).rng();
    let reps = 5000;
    // Value at t = 1/8, which the coarse grid (m = 4) does not contain.
    let refined: Vec<f64> = (0..reps)
        .map(|_| {
            let coarse = sample_bridge(0.0, 1.0, 0.5, -0.5, 4, 1.0, &mut rng).unwrap();
            refine_bridge(&coarse, 1.0, &mut rng).values()[1]
        })
        .collect();
    let direct: Vec<f64> = (0..reps)
        .map(|_| sample_bridge(0.0, 1.0, 0.5, -0.5, 8, 1.0, &mut rng).unwrap().values()[1])
        .collect();
    let ks = ks_two_sample(&refined, &direct).unwrap();
    assert!(ks.p_value > 1e-3, "{ks:?}");
    // Marginal: mean 0.5 - t, variance t (1 - t).
    let (m, v) = mean_var(&direct);
    assert!((m - 0.375).abs() < 0.02 && (v - 7.0 / 64.0).abs() < 0.01, "{m} {v}");
}

#[test]
fn stay_positive_estimate_brackets_exact_probability() {
    // Exact continuous probability 1 - exp(-2 delta M). The grid check can
    // only over-estimate it, by O(sqrt(dt)).
    let mut rng = RngSeed::new(2, 0).rng();
    for (delta, m_end) in [(0.2, 1.0), (0.5, 0.5)] {
        let floor = GridPath::constant(0.0, 1.0, 1, 0.0).unwrap();
        let b = BoundaryData::new(0.0, 1.0, vec![delta], vec![m_end], Some(floor)).unwrap();
        let p = estimate_acceptance_probability(&b, 20_000, 256, 1.0, &mut rng).unwrap();
        let exact = 1.0 - (-2.0f64 * delta * m_end).exp();
        assert!(p.estimate() > exact - 3.0 * p.stderr(), "{} vs {exact}", p.estimate());
        assert!(p.estimate() < exact + 0.08, "{} vs {exact}", p.estimate());
    }
}

#[test]
fn supremum_law_holds_on_a_coarse_grid() {
    // Exact conditional sampling makes the law independent of the grid.
    let mut rng = RngSeed::new(3, 0).rng();
    let reps = 20_000;
    let hits = (0..reps)
        .filter(|_| {
            let b = sample_bridge(0.0, 2.0, 0.0, 0.0, 8, 1.0, &mut rng).unwrap();
            sample_supremum(&b, 1.0, &mut rng) > 1.0
        })
        .count() as f64
        / reps as f64;
    let law = (-2.0f64 * 1.0 / 2.0).exp();
    assert!(
        (hits - law).abs() < 4.0 * (law * (1.0 - law) / reps as f64).sqrt(),
        "{hits} vs {law}"
    );
}
