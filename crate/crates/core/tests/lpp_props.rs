use airy_gibbs::lpp::{endpoint, passage_profile, rescale_profile, LppField};
use airy_gibbs::parallel::run_replicas;
use airy_gibbs::RngSeed;
use proptest::prelude::*;

fn rows(n: usize) -> impl Strategy<Value = Vec<Vec<u32>>> {
    (1..=n)
        .map(|i| prop::collection::vec(0u32..6, i + 1))
        .collect::<Vec<_>>()
}

proptest! {
    #[test]
    fn raising_a_weight_never_lowers_passage_times(w in rows(9), i in 1usize..=9, k in 0usize..10, bump in 1u32..4) {
        let k = k % (i + 1);
        let base = passage_profile(&LppField::from_rows(0.5, w.clone()).unwrap());
        let mut raised = w;
        raised[i - 1][k] += bump;
        let up = passage_profile(&LppField::from_rows(0.5, raised).unwrap());
        prop_assert!(base.values().iter().zip(up.values()).all(|(a, b)| b >= a));
    }

    #[test]
    fn mirrored_field_gives_mirrored_profile(w in rows(8)) {
        let mirrored: Vec<Vec<u32>> = w.iter().map(|r| r.iter().rev().copied().collect()).collect();
        let a = passage_profile(&LppField::from_rows(0.3, w).unwrap());
        let b = passage_profile(&LppField::from_rows(0.3, mirrored).unwrap());
        let rev: Vec<i64> = b.values().iter().rev().copied().collect();
        prop_assert_eq!(a.values(), rev.as_slice());
    }

    #[test]
    fn endpoint_is_leftmost_maximiser(w in rows(10)) {
        let prof = passage_profile(&LppField::from_rows(0.5, w).unwrap());
        let r = rescale_profile(&prof, 0.5).unwrap();
        let pts = r.points();
        let best = pts.iter().map(|p| p.1).fold(f64::NEG_INFINITY, f64::max);
        let scan = pts.iter().find(|p| p.1 == best).unwrap().0;
        prop_assert_eq!(endpoint(&r), scan);
    }
}

#[test]
fn endpoint_is_symmetric_in_law() {
    let k = run_replicas(RngSeed::new(15, 0), 2000, 1, |_, rng| {
        airy_gibbs::lpp::simulate(200, 0.5, rng).unwrap().k_hat
    });
    let (m, v) = airy_gibbs::stats::mean_var(&k);
    assert!(m.abs() < 4.0 * (v / k.len() as f64).sqrt(), "mean {m}");
}
