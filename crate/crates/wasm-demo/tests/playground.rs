use airy_gibbs_wasm::Playground;

#[test]
fn sample_then_resample_keeps_outside_fixed() {
    let mut p = Playground::with_seed(3);
    p.sample(32, 4, 2.0).unwrap();
    let before = p.ensemble().unwrap().clone();
    assert_eq!(before.k(), 4);
    let attempts = p.resample(0, 1, -0.51, 0.49).unwrap();
    assert!(attempts >= 1);
    let after = p.ensemble().unwrap();
    assert!(after.is_strictly_ordered_interior());
    for j in 0..=after.m() {
        let t = after.time(j);
        if !(-0.5..=0.5).contains(&t) {
            assert_eq!(after.line(0)[j], before.line(0)[j]);
        }
        assert_eq!(after.line(2)[j], before.line(2)[j]);
    }
    assert_eq!(p.values().len(), 4 * (after.m() + 1));
}

#[test]
fn bad_requests_are_errors() {
    let mut p = Playground::with_seed(1);
    assert!(p.resample(0, 0, -1.0, 1.0).is_err());
    assert!(p.sample(8, 9, 1.0).is_err());
    assert!(p.sample(8, 2, 10.0).is_err());
    p.sample(16, 3, 1.0).unwrap();
    assert!(p.resample(0, 2, -1.0, 1.0).is_err());
    assert!(p.resample(0, 0, 0.2, 0.2).is_err());
}

#[test]
fn passage_profile_ends_with_endpoint() {
    let mut p = Playground::with_seed(2);
    let out = p.passage(40, 0.5).unwrap();
    assert_eq!(out.len() % 2, 1);
    let pts: Vec<(f64, f64)> = out[..out.len() - 1].chunks(2).map(|c| (c[0], c[1])).collect();
    assert_eq!(pts.len(), 41);
    let k = *out.last().unwrap();
    let best = pts.iter().map(|p| p.1).fold(f64::NEG_INFINITY, f64::max);
    assert_eq!(pts.iter().find(|p| p.1 == best).unwrap().0, k);
}
