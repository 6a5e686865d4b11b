use airy_gibbs::ensemble::{default_sweeps, sample_watermelon, sample_watermelon_dyson};
use airy_gibbs::parallel::run_replicas;
use airy_gibbs::stats::mean_var;
use airy_gibbs::RngSeed;

#[test]
fn watermelon_top_is_near_sqrt2_n() {
    let n = 64;
    let tops = run_replicas(RngSeed::new(8, 0), 20, 1, |_, rng| {
        sample_watermelon_dyson(n, n as f64, 16, 1.0, rng).unwrap().eval(0, 0.0) / n as f64
    });
    let (m, _) = mean_var(&tops);
    assert!((m / std::f64::consts::SQRT_2 - 1.0).abs() < 0.1, "{m}");
}

#[test]
fn lattice_and_exact_watermelons_agree() {
    let reps = 600;
    let n = 6;
    // Lattice pins sit at -i * 2/n; their mean is the centre of mass.
    let shift = 3.0 / n as f64;
    let sweeps = default_sweeps(1.0, n);
    let lattice = run_replicas(RngSeed::new(9, 0), reps, 1, |_, rng| {
        sample_watermelon(2, 1.0, 8, n, sweeps, rng).unwrap().eval(0, 0.0) + shift
    });
    let exact = run_replicas(RngSeed::new(9, 1), reps, 1, |_, rng| {
        sample_watermelon_dyson(2, 1.0, 8, 1.0, rng).unwrap().eval(0, 0.0)
    });
    let (ml, vl) = mean_var(&lattice);
    let (me, ve) = mean_var(&exact);
    assert!((ml - me).abs() < 0.1, "{ml} vs {me}");
    // Lattice values are atoms 2/n apart, so compare moments rather than CDFs.
    assert!((vl - ve).abs() < 0.25 * ve, "{vl} vs {ve}");
}

#[test]
fn more_lines_push_the_top_line_up() {
    let reps = 2000;
    let one = run_replicas(RngSeed::new(10, 0), reps, 1, |_, rng| {
        sample_watermelon_dyson(1, 1.0, 8, 1.0, rng).unwrap().eval(0, 0.0)
    });
    let two = run_replicas(RngSeed::new(10, 1), reps, 1, |_, rng| {
        sample_watermelon_dyson(2, 1.0, 8, 1.0, rng).unwrap().eval(0, 0.0)
    });
    let (m1, _) = mean_var(&one);
    let (m2, _) = mean_var(&two);
    assert!(m2 > m1 + 0.2, "{m1} {m2}");
    for q in [0.25, 0.5, 0.75] {
        let quant = |v: &[f64]| {
            let mut s = v.to_vec();
            s.sort_by(f64::total_cmp);
            s[(q * s.len() as f64) as usize]
        };
        assert!(quant(&two) > quant(&one));
    }
}
