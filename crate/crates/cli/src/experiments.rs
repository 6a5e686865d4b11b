//! The experiment table. Each experiment is a pure function of its
//! resolved parameters; all randomness flows from the `seed` key.

use std::f64::consts::SQRT_2;

use airy_gibbs::bridge::{bridge_max_law, sample_bridge, sample_supremum};
use airy_gibbs::ensemble::{
    close_gap_frequency, default_sweeps, edge_scale, height_extremes, min_gap, parabolic_shift, sample_watermelon,
    sample_watermelon_dyson,
};
use airy_gibbs::geometry::least_concave_majorant;
use airy_gibbs::io::{write_ensemble, write_lpp_samples, write_oracle_samples, write_stats, StatRecord};
use airy_gibbs::lattice::CoupledChains;
use airy_gibbs::lpp::{self, endpoint_tail_report, LppSample};
use airy_gibbs::parallel::try_run_replicas;
use airy_gibbs::resample::{
    estimate_acceptance_probability, estimate_lattice_acceptance, gibbs_resample, snapped_stopping_domain,
    strong_gibbs_check, ResampleOptions, StrongGibbsOptions,
};
use airy_gibbs::rmt::sample_tw_gue;
use airy_gibbs::stats::{ks_two_sample, mean_var, Proportion};
use airy_gibbs::{BoundaryData, GridPath, LineEnsemble, RngSeed};
use rand::Rng;

use crate::config::{key, KeySpec, Params};
use crate::error::CliError;
use crate::output::Artifacts;
use crate::svg::{ecdf_points, Plot, Series};

type Run = fn(&Params) -> Result<Artifacts, CliError>;

pub struct Experiment {
    pub name: &'static str,
    pub about: &'static str,
    pub keys: &'static [KeySpec],
    pub run: Run,
}

pub const EXPERIMENTS: &[Experiment] = &[
    Experiment {
        name: "bridge-max",
        about: "Maximum of a Brownian bridge against exp(-2r^2/T)",
        keys: &[
            key("replicas", "100000", "number of bridges"),
            key("m", "512", "grid steps"),
            key("t", "1", "bridge duration"),
            key("radii", "0.25,0.5,0.75,1", "levels r"),
            key("maximum", "exact", "exact (continuous supremum given the grid) or grid"),
        ],
        run: bridge_max,
    },
    Experiment {
        name: "gibbs-invariance",
        about: "Top-line marginal of a watermelon before and after Gibbs resampling",
        keys: &[
            key("lines", "6", "number of lines"),
            key("half_width", "1", "ensemble lives on [-half_width, half_width]"),
            key("m", "256", "grid steps"),
            key("a", "-0.5", "resampling interval start"),
            key("b", "0.5", "resampling interval end"),
            key("probe", "0", "time at which the top line is compared"),
            key("replicas", "10000", "replicas per sample"),
            key("max_attempts", "1000000", "rejection attempts before giving up"),
        ],
        run: gibbs_invariance,
    },
    Experiment {
        name: "coupling-monotone",
        about: "Pointwise order of two lattice chains driven by shared flips",
        keys: &[
            key("lines", "3", "lines per system"),
            key("n", "4", "lattice refinement"),
            key("a", "0", "interval start"),
            key("b", "1", "interval end"),
            key("sweeps", "100", "sweeps per run"),
            key("runs", "1000", "independent coupled runs"),
        ],
        run: coupling_monotone,
    },
    Experiment {
        name: "acceptance-prob",
        about: "Probability that free bridges avoid each other and the floor",
        keys: &[
            key("a", "0", "interval start"),
            key("b", "1", "interval end"),
            key("entrance", "0.5,0", "entrance values, top first"),
            key("exit", "0.5,0", "exit values, top first"),
            key("floor", "none", "constant floor or none"),
            key("trials", "100000", "bridge systems drawn"),
            key("m", "256", "grid steps"),
            key("diffusion", "1", "variance rate"),
            key("lattice_n", "none", "also estimate with 1/n lattice walks"),
        ],
        run: acceptance_prob,
    },
    Experiment {
        name: "min-gap",
        about: "Minimal gap among the top lines of an edge-scaled watermelon",
        keys: &[
            key("big_n", "32", "watermelon line count N"),
            key("m", "512", "grid steps on [-N, N]"),
            key("k", "2", "lines entering the gap"),
            key("window", "1", "scaled window [-T, T]"),
            key("m_out", "256", "grid steps of the scaled window"),
            key("delta", "0.1", "gap threshold"),
            key("replicas", "200", "watermelons sampled"),
        ],
        run: min_gap_experiment,
    },
    Experiment {
        name: "watermelon-edge",
        about: "Edge-scaled, parabola-shifted top lines of a watermelon",
        keys: &[
            key("big_n", "32", "watermelon line count N"),
            key("m", "512", "grid steps on [-N, N]"),
            key("window", "1", "scaled window [-T, T]"),
            key("m_out", "256", "grid steps of the scaled window"),
            key("replicas", "200", "watermelons sampled"),
            key("keep_lines", "4", "lines written to ensemble.csv"),
            key("sampler", "dyson", "dyson (exact) or lattice (flip chain)"),
            key("lattice_n", "2", "lattice refinement for the lattice sampler"),
            key(
                "sweeps",
                "0",
                "chain sweeps; 0 picks max(10 L, L^2/2) for L lattice steps",
            ),
        ],
        run: watermelon_edge,
    },
    Experiment {
        name: "lpp-tw",
        about: "Rescaled point-to-point passage time against Tracy-Widom samples",
        keys: &[
            key("q", "0.5", "geometric weight parameter"),
            key("n", "1000", "path length"),
            key("replicas", "10000", "passage-time replicas"),
            key("oracle_s", "400", "tridiagonal matrix size"),
            key("oracle_replicas", "10000", "reference samples"),
        ],
        run: lpp_tw,
    },
    Experiment {
        name: "endpoint",
        about: "Location of the maximiser of the rescaled passage-time profile",
        keys: &[
            key("q", "0.5", "geometric weight parameter"),
            key("n", "1000", "path length"),
            key("replicas", "10000", "passage-time replicas"),
            key("tail_x", "0.5,1,1.5,2", "levels for P(|K| >= x)"),
            key("tail_c", "0.5", "constant c in the reference bound exp(-c x^3)"),
        ],
        run: endpoint_experiment,
    },
    Experiment {
        name: "stopping-domain",
        about: "Resampling on the concave-majorant stopping domain leaves the law unchanged",
        keys: &[
            key("lines", "6", "number of lines"),
            key("half_width", "1", "ensemble lives on [-half_width, half_width]"),
            key("m", "256", "grid steps"),
            key("k", "1", "lines resampled; the domain is read off line k"),
            key("slope", "2", "majorant slope bound K"),
            key("window", "1", "domain search window [-T, T]"),
            key("replicas", "2000", "replicas"),
            key("probes", "-0.25,0,0.25", "comparison times"),
            key("alpha", "0.01", "family-wise significance level"),
        ],
        run: stopping_domain_experiment,
    },
    Experiment {
        name: "oracle-tw",
        about: "Tracy-Widom GUE samples from the tridiagonal model",
        keys: &[key("s", "400", "matrix size"), key("replicas", "10000", "samples")],
        run: oracle_tw,
    },
];

pub fn find(name: &str) -> Option<&'static Experiment> {
    EXPERIMENTS.iter().find(|e| e.name == name)
}

const TW_MEAN: f64 = -1.7711;
const TW_VAR: f64 = 0.8132;

fn rec(statistic: impl Into<String>, value: f64, stderr: f64, n_trials: usize, seed: RngSeed) -> StatRecord {
    StatRecord {
        statistic: statistic.into(),
        value,
        stderr,
        n_trials: n_trials as u64,
        seed: seed.seed,
    }
}

fn stats_csv(records: &[StatRecord]) -> Result<Vec<u8>, CliError> {
    let mut buf = Vec::new();
    write_stats(records, &mut buf)?;
    Ok(buf)
}

fn ensemble_csv(ens: &LineEnsemble) -> Result<Vec<u8>, CliError> {
    let mut buf = Vec::new();
    write_ensemble(ens, &mut buf)?;
    Ok(buf)
}

fn mean_stderr(xs: &[f64]) -> (f64, f64) {
    let (m, v) = mean_var(xs);
    (m, (v / xs.len() as f64).sqrt())
}

fn proportion_rec(name: impl Into<String>, p: Proportion, seed: RngSeed) -> StatRecord {
    rec(name, p.estimate(), p.stderr(), p.trials as usize, seed)
}

fn positive(p: &Params, key: &str) -> Result<usize, CliError> {
    let v: usize = p.get(key)?;
    if v == 0 {
        return Err(CliError::Usage(format!("{key} must be positive")));
    }
    Ok(v)
}

fn bridge_max(p: &Params) -> Result<Artifacts, CliError> {
    let replicas = positive(p, "replicas")?;
    let m = positive(p, "m")?;
    let t: f64 = p.get("t")?;
    let radii: Vec<f64> = p.list("radii")?;
    let exact = match p.raw("maximum") {
        "exact" => true,
        "grid" => false,
        other => return Err(CliError::Usage(format!("maximum must be exact or grid, got {other}"))),
    };
    let seed = p.seed()?;
    let mut maxima = try_run_replicas(seed, replicas, p.workers()?, |_, rng| {
        let b = sample_bridge(0.0, t, 0.0, 0.0, m, 1.0, rng)?;
        Ok::<_, airy_gibbs::Error>(if exact { sample_supremum(&b, 1.0, rng) } else { b.max() })
    })?;
    maxima.sort_by(f64::total_cmp);
    let n = replicas as f64;
    let survival = |r: f64| (replicas - maxima.partition_point(|&x| x <= r)) as f64 / n;
    let mut art = Artifacts::default();
    let mut recs = Vec::new();
    for &r in &radii {
        let ph = survival(r);
        let se = (ph * (1.0 - ph) / n).sqrt();
        let law = bridge_max_law(r, t)?;
        let tol = 3.0 * se + 0.3 * r / (m as f64).sqrt();
        recs.push(rec(format!("p_max_gt_{r}"), ph, se, replicas, seed));
        recs.push(rec(format!("law_max_gt_{r}"), law, 0.0, replicas, seed));
        art.note(&format!("within_tolerance_r_{r}"), (ph - law).abs() <= tol);
    }
    art.file("stats.csv", stats_csv(&recs)?);
    let grid: Vec<f64> = (1..=100).map(|i| 2.0 * t.sqrt() * i as f64 / 100.0).collect();
    let plot = Plot::new("Bridge maximum", "r", "P(max > r)")
        .with(Series::new(
            "empirical",
            grid.iter().map(|&r| (r, survival(r))).collect(),
        ))
        .with(
            Series::new(
                "exp(-2r^2/T)",
                grid.iter().map(|&r| (r, (-2.0 * r * r / t).exp())).collect(),
            )
            .dashed(),
        );
    art.file("bridge_max.svg", plot.render().into_bytes());
    Ok(art)
}

fn gibbs_invariance(p: &Params) -> Result<Artifacts, CliError> {
    let lines = positive(p, "lines")?;
    let hw: f64 = p.get("half_width")?;
    let m = positive(p, "m")?;
    let (a, b, probe): (f64, f64, f64) = (p.get("a")?, p.get("b")?, p.get("probe")?);
    let replicas = positive(p, "replicas")?;
    let opts = ResampleOptions {
        max_attempts: p.get("max_attempts")?,
        ..ResampleOptions::default()
    };
    let seed = p.seed()?;
    let workers = p.workers()?;
    let resample_one = |rng: &mut airy_gibbs::rng::SimRng| -> Result<(LineEnsemble, LineEnsemble, usize), CliError> {
        let e = sample_watermelon_dyson(lines, hw, m, 1.0, rng)?;
        let r = gibbs_resample(&e, 0..=0, a, b, &opts, rng)?;
        Ok((e, r.ensemble, r.attempts))
    };
    let pairs = try_run_replicas(seed.stream(1), replicas, workers, |_, rng| {
        resample_one(rng).map(|(e, r, n)| (e.eval(0, probe), r.eval(0, probe), n as f64))
    })?;
    let before: Vec<f64> = pairs.iter().map(|x| x.0).collect();
    let after_vals: Vec<f64> = pairs.iter().map(|x| x.1).collect();
    let attempts: Vec<f64> = pairs.iter().map(|x| x.2).collect();
    let fresh = try_run_replicas(seed.stream(2), replicas, workers, |_, rng| {
        sample_watermelon_dyson(lines, hw, m, 1.0, rng).map(|e| e.eval(0, probe))
    })?;
    let ks = ks_two_sample(&before, &after_vals)?;
    let control = ks_two_sample(&fresh, &after_vals)?;
    let (mb, sb) = mean_stderr(&before);
    let (ma, sa) = mean_stderr(&after_vals);
    let (mt, st) = mean_stderr(&attempts);
    let recs = vec![
        rec("ks_statistic", ks.statistic, 0.0, replicas, seed),
        rec("ks_p_value", ks.p_value, 0.0, replicas, seed),
        rec("ks_statistic_independent", control.statistic, 0.0, replicas, seed),
        rec("ks_p_value_independent", control.p_value, 0.0, replicas, seed),
        rec("mean_top_before", mb, sb, replicas, seed),
        rec("mean_top_after", ma, sa, replicas, seed),
        rec("mean_attempts", mt, st, replicas, seed),
    ];
    let mut art = Artifacts::default();
    art.note("ks_statistic", ks.statistic);
    art.note("ks_p_value", ks.p_value);
    art.file("stats.csv", stats_csv(&recs)?);
    let (e0, e1, _) = resample_one(&mut seed.stream(1).fork(0).rng())?;
    art.file("ensemble_before.csv", ensemble_csv(&e0)?);
    art.file("ensemble_after.csv", ensemble_csv(&e1)?);
    let plot = Plot::new("Top line at the probe time", "value", "ECDF")
        .with(Series::new("before", ecdf_points(&before)))
        .with(Series::new("after", ecdf_points(&after_vals)).dashed());
    art.file("ecdf.svg", plot.render().into_bytes());
    Ok(art)
}

fn decreasing<R: Rng + ?Sized>(lines: usize, rng: &mut R) -> Vec<i64> {
    let mut v = vec![rng.random_range(-2..=2)];
    for _ in 1..lines {
        let last = *v.last().expect("non-empty");
        v.push(last - rng.random_range(1..=3));
    }
    v
}

fn strictly_decreasing(v: &[i64]) -> bool {
    v.windows(2).all(|w| w[0] > w[1])
}

/// A random pair of lattice boundary data with the second dominating the
/// first line by line by even amounts, and floors (if any) ordered.
pub fn random_dominated_pair<R: Rng + ?Sized>(
    lines: usize,
    n: u32,
    a: f64,
    b: f64,
    rng: &mut R,
) -> Result<(BoundaryData, BoundaryData), CliError> {
    let steps = ((b - a) * (n * n) as f64).round() as i64;
    let nf = n as f64;
    loop {
        let ent = decreasing(lines, rng);
        let mut ext = decreasing(lines, rng);
        for (y, x) in ext.iter_mut().zip(&ent) {
            if (*y - x - steps).rem_euclid(2) != 0 {
                *y -= 1;
            }
        }
        let mut shifted = |v: &[i64]| v.iter().map(|x| x + 2 * rng.random_range(0..=2)).collect::<Vec<_>>();
        let (gent, gext) = (shifted(&ent), shifted(&ext));
        if ![&ext, &gent, &gext].iter().all(|v| strictly_decreasing(v)) {
            continue;
        }
        let lo = ent[lines - 1].min(ext[lines - 1]);
        let glo = gent[lines - 1].min(gext[lines - 1]);
        let f_floor = rng.random_bool(0.5).then(|| lo - 1 - rng.random_range(0..4));
        let g_floor = match f_floor {
            None => rng.random_bool(0.5).then(|| glo - 1 - rng.random_range(0..4)),
            Some(c) => Some(rng.random_range(c..=glo - 1)),
        };
        let make = |x: &[i64], y: &[i64], floor: Option<i64>| -> Result<BoundaryData, CliError> {
            let floor = floor.map(|c| GridPath::constant(a, b, 1, c as f64 / nf)).transpose()?;
            let scale = |v: &[i64]| v.iter().map(|&h| h as f64 / nf).collect();
            Ok(BoundaryData::new(a, b, scale(x), scale(y), floor)?)
        };
        return Ok((make(&ent, &ext, f_floor)?, make(&gent, &gext, g_floor)?));
    }
}

fn coupling_monotone(p: &Params) -> Result<Artifacts, CliError> {
    let lines = positive(p, "lines")?;
    let n: u32 = p.get("n")?;
    let (a, b): (f64, f64) = (p.get("a")?, p.get("b")?);
    let sweeps: usize = p.get("sweeps")?;
    let runs = positive(p, "runs")?;
    let seed = p.seed()?;
    let bad_sweeps = try_run_replicas(seed, runs, p.workers()?, |_, rng| -> Result<usize, CliError> {
        let (bf, bg) = random_dominated_pair(lines, n, a, b, rng)?;
        let mut chains = CoupledChains::new(&bf, &bg, n)?;
        let mut bad = 0;
        chains.run(sweeps, rng, |_, lo, up| {
            if !lo.dominated_by(up) {
                bad += 1;
            }
        });
        Ok(bad)
    })?;
    let bad_runs = bad_sweeps.iter().filter(|&&s| s > 0).count();
    let mut art = Artifacts::default();
    art.note("runs", runs);
    art.note("runs_with_violation", bad_runs);
    art.note("dominated_in_all_runs", bad_runs == 0);
    let recs = vec![
        rec(
            "fraction_runs_dominated",
            1.0 - bad_runs as f64 / runs as f64,
            0.0,
            runs,
            seed,
        ),
        rec(
            "violating_sweeps",
            bad_sweeps.iter().sum::<usize>() as f64,
            0.0,
            runs * sweeps,
            seed,
        ),
    ];
    art.file("stats.csv", stats_csv(&recs)?);
    Ok(art)
}

const CHUNKS: usize = 64;

fn chunked_tally(
    seed: RngSeed,
    trials: u64,
    workers: usize,
    f: impl Fn(u64, &mut airy_gibbs::rng::SimRng) -> airy_gibbs::Result<Proportion> + Sync,
) -> Result<Proportion, CliError> {
    let per = |i: usize| trials / CHUNKS as u64 + u64::from((i as u64) < trials % CHUNKS as u64);
    let tallies = try_run_replicas(seed, CHUNKS, workers, |i, rng| match per(i) {
        0 => Ok(Proportion::default()),
        t => f(t, rng),
    })?;
    Ok(tallies.into_iter().fold(Proportion::default(), Proportion::merge))
}

fn acceptance_prob(p: &Params) -> Result<Artifacts, CliError> {
    let (a, b): (f64, f64) = (p.get("a")?, p.get("b")?);
    let floor = p
        .optional::<f64>("floor")?
        .map(|c| GridPath::constant(a, b, 1, c))
        .transpose()?;
    let boundary = BoundaryData::new(a, b, p.list("entrance")?, p.list("exit")?, floor)?;
    boundary.validate()?;
    let trials: u64 = p.get("trials")?;
    if trials == 0 {
        return Err(CliError::Usage("trials must be positive".into()));
    }
    let m = positive(p, "m")?;
    let diffusion: f64 = p.get("diffusion")?;
    let seed = p.seed()?;
    let workers = p.workers()?;
    let cont = chunked_tally(seed.stream(1), trials, workers, |t, rng| {
        estimate_acceptance_probability(&boundary, t, m, diffusion, rng)
    })?;
    let mut recs = vec![proportion_rec("acceptance_probability", cont, seed)];
    let mut art = Artifacts::default();
    art.note("acceptance_probability", cont.estimate());
    if let Some(n) = p.optional::<u32>("lattice_n")? {
        let lat = chunked_tally(seed.stream(2), trials, workers, |t, rng| {
            estimate_lattice_acceptance(&boundary, n, t, rng)
        })?;
        art.note("lattice_acceptance_probability", lat.estimate());
        recs.push(proportion_rec("lattice_acceptance_probability", lat, seed));
    }
    art.file("stats.csv", stats_csv(&recs)?);
    Ok(art)
}

struct EdgeParams {
    big_n: usize,
    m: usize,
    window: f64,
    m_out: usize,
    replicas: usize,
}

fn edge_params(p: &Params) -> Result<EdgeParams, CliError> {
    Ok(EdgeParams {
        big_n: positive(p, "big_n")?,
        m: positive(p, "m")?,
        window: p.get("window")?,
        m_out: positive(p, "m_out")?,
        replicas: positive(p, "replicas")?,
    })
}

/// Edge-scaled watermelons together with the unscaled top value `B_1(0)`.
fn edge_scaled_watermelons(
    ep: &EdgeParams,
    seed: RngSeed,
    workers: usize,
    sample: impl Fn(&mut airy_gibbs::rng::SimRng) -> airy_gibbs::Result<LineEnsemble> + Sync,
) -> Result<Vec<(LineEnsemble, f64)>, CliError> {
    let nf = ep.big_n as f64;
    Ok(try_run_replicas(seed, ep.replicas, workers, |_, rng| {
        let e = sample(rng)?;
        let top = e.eval(0, 0.0);
        edge_scale(&e, nf, ep.window, ep.m_out).map(|s| (s, top))
    })?)
}

fn min_gap_experiment(p: &Params) -> Result<Artifacts, CliError> {
    let ep = edge_params(p)?;
    let k: usize = p.get("k")?;
    if k < 2 || k > ep.big_n {
        return Err(CliError::Usage("k must lie in [2, big_n]".into()));
    }
    let delta: f64 = p.get("delta")?;
    let seed = p.seed()?;
    let nf = ep.big_n as f64;
    let scaled = edge_scaled_watermelons(&ep, seed, p.workers()?, |rng| {
        sample_watermelon_dyson(ep.big_n, nf, ep.m, 1.0, rng)
    })?;
    let ens: Vec<LineEnsemble> = scaled.into_iter().map(|(e, _)| e).collect();
    let gaps = ens
        .iter()
        .map(|e| min_gap(e, k, -ep.window, ep.window))
        .collect::<airy_gibbs::Result<Vec<f64>>>()?;
    let small = Proportion {
        successes: gaps.iter().filter(|&&g| g < delta).count() as u64,
        trials: gaps.len() as u64,
    };
    let close = close_gap_frequency(&ens, k, 0.0, delta)?;
    let extremes = ens
        .iter()
        .map(|e| height_extremes(e, 0, ep.window))
        .collect::<airy_gibbs::Result<Vec<_>>>()?;
    let lows: Vec<f64> = extremes.iter().map(|x| x.0).collect();
    let highs: Vec<f64> = extremes.iter().map(|x| x.1).collect();
    let (mg, sg) = mean_stderr(&gaps);
    let (ml, sl) = mean_stderr(&lows);
    let (mh, sh) = mean_stderr(&highs);
    let r = ep.replicas;
    let recs = vec![
        proportion_rec("p_min_gap_lt_delta", small, seed),
        rec("mean_min_gap", mg, sg, r, seed),
        proportion_rec("p_gap_at_0_lt_delta", close.tally, seed),
        rec("mean_top_line_min", ml, sl, r, seed),
        rec("mean_top_line_max", mh, sh, r, seed),
    ];
    let mut art = Artifacts::default();
    art.note("p_min_gap_lt_delta", small.estimate());
    art.note("p_gap_at_0_lt_delta", close.tally.estimate());
    art.note(
        "p_gap_at_0_lt_delta_ci95",
        format!("[{}, {}]", close.ci.lo, close.ci.hi),
    );
    art.file("stats.csv", stats_csv(&recs)?);
    let plot = Plot::new("Minimal gap", "gap", "ECDF").with(Series::new("min gap", ecdf_points(&gaps)));
    art.file("min_gap.svg", plot.render().into_bytes());
    Ok(art)
}

fn watermelon_edge(p: &Params) -> Result<Artifacts, CliError> {
    let ep = edge_params(p)?;
    let keep = positive(p, "keep_lines")?.min(ep.big_n);
    let nf = ep.big_n as f64;
    let seed = p.seed()?;
    let sampler = p.raw("sampler").to_string();
    let n: u32 = p.get("lattice_n")?;
    let sweeps = match p.get::<usize>("sweeps")? {
        0 => default_sweeps(nf, n),
        s => s,
    };
    let sample = |rng: &mut airy_gibbs::rng::SimRng| match sampler.as_str() {
        "lattice" => sample_watermelon(ep.big_n, nf, ep.m, n, sweeps, rng),
        _ => sample_watermelon_dyson(ep.big_n, nf, ep.m, 1.0, rng),
    };
    if sampler != "dyson" && sampler != "lattice" {
        return Err(CliError::Usage(format!(
            "sampler must be dyson or lattice, got {sampler}"
        )));
    }
    let out = edge_scaled_watermelons(&ep, seed, p.workers()?, sample)?;
    let a0: Vec<f64> = out.iter().map(|(e, _)| SQRT_2 * e.eval(0, 0.0)).collect();
    let centering: Vec<f64> = out.iter().map(|(_, top)| top / nf).collect();
    let (ma, va) = mean_var(&a0);
    let (mc, sc) = mean_stderr(&centering);
    let r = ep.replicas;
    let recs = vec![
        rec("mean_top_scaled_at_0", ma, (va / r as f64).sqrt(), r, seed),
        rec("var_top_scaled_at_0", va, 0.0, r, seed),
        rec("mean_top_over_n_at_0", mc, sc, r, seed),
    ];
    let mut art = Artifacts::default();
    art.note("mean_top_scaled_at_0", ma);
    art.note("var_top_scaled_at_0", va);
    art.note("tracy_widom_reference_mean", TW_MEAN);
    art.note("tracy_widom_reference_var", TW_VAR);
    art.note("mean_top_over_n_at_0", mc);
    art.note("sqrt2", SQRT_2);
    art.file("stats.csv", stats_csv(&recs)?);
    let first = parabolic_shift(&out[0].0);
    let kept = LineEnsemble::new(first.t_start(), first.t_end(), first.lines()[..keep].to_vec())?;
    art.file("ensemble.csv", ensemble_csv(&kept)?);
    let mut plot = Plot::new("Edge-scaled watermelon plus parabola", "t", "value");
    for i in 0..keep {
        let pts = (0..=kept.m()).map(|j| (kept.time(j), kept.line(i)[j])).collect();
        plot = plot.with(Series::new(format!("line {}", i + 1), pts));
    }
    art.file("ensemble.svg", plot.render().into_bytes());
    Ok(art)
}

pub fn lpp_samples(
    q: f64,
    n: usize,
    replicas: usize,
    seed: RngSeed,
    workers: usize,
) -> Result<Vec<LppSample>, CliError> {
    Ok(try_run_replicas(seed, replicas, workers, |_, rng| {
        lpp::simulate(n, q, rng)
    })?)
}

fn lpp_csv(samples: &[LppSample], n: usize, q: f64) -> Result<Vec<u8>, CliError> {
    let mut buf = Vec::new();
    write_lpp_samples(samples, n, q, &mut buf)?;
    Ok(buf)
}

fn oracle_csv(samples: &[f64], s: usize) -> Result<Vec<u8>, CliError> {
    let mut buf = Vec::new();
    write_oracle_samples(samples, s, &mut buf)?;
    Ok(buf)
}

fn lpp_tw(p: &Params) -> Result<Artifacts, CliError> {
    let q: f64 = p.get("q")?;
    let n = positive(p, "n")?;
    let replicas = positive(p, "replicas")?;
    let s: usize = p.get("oracle_s")?;
    let or = positive(p, "oracle_replicas")?;
    let seed = p.seed()?;
    let workers = p.workers()?;
    let samples = lpp_samples(q, n, replicas, seed.stream(1), workers)?;
    let oracle = sample_tw_gue(s, or, seed.stream(2), workers)?;
    let h: Vec<f64> = samples.iter().map(|x| x.h_n_0).collect();
    let ks = ks_two_sample(&h, &oracle)?;
    let (mh, vh) = mean_var(&h);
    let (mo, vo) = mean_var(&oracle);
    let recs = vec![
        rec("mean_h", mh, (vh / replicas as f64).sqrt(), replicas, seed),
        rec("var_h", vh, 0.0, replicas, seed),
        rec("mean_oracle", mo, (vo / or as f64).sqrt(), or, seed),
        rec("var_oracle", vo, 0.0, or, seed),
        rec("ks_statistic", ks.statistic, 0.0, replicas, seed),
        rec("ks_p_value", ks.p_value, 0.0, replicas, seed),
        rec("mean_difference", mh - mo, 0.0, replicas, seed),
    ];
    let mut art = Artifacts::default();
    art.note("ks_statistic", ks.statistic);
    art.note("mean_difference", mh - mo);
    art.note("var_h", vh);
    art.note("var_oracle", vo);
    art.file("stats.csv", stats_csv(&recs)?);
    art.file("lpp.csv", lpp_csv(&samples, n, q)?);
    art.file("oracle.csv", oracle_csv(&oracle, s)?);
    let plot = Plot::new("Rescaled passage time at 0", "value", "ECDF")
        .with(Series::new("passage time", ecdf_points(&h)))
        .with(Series::new("tridiagonal oracle", ecdf_points(&oracle)).dashed());
    art.file("ecdf.svg", plot.render().into_bytes());
    Ok(art)
}

fn endpoint_experiment(p: &Params) -> Result<Artifacts, CliError> {
    let q: f64 = p.get("q")?;
    let n = positive(p, "n")?;
    let replicas = positive(p, "replicas")?;
    let xs: Vec<f64> = p.list("tail_x")?;
    let c: f64 = p.get("tail_c")?;
    let seed = p.seed()?;
    let samples = lpp_samples(q, n, replicas, seed.stream(1), p.workers()?)?;
    let k: Vec<f64> = samples.iter().map(|x| x.k_hat).collect();
    let report = endpoint_tail_report(&k, &xs)?;
    let (mk, vk) = mean_var(&k);
    let sd = vk.sqrt();
    let mut art = Artifacts::default();
    let mut recs = vec![
        rec("mean_k_hat", mk, sd / (replicas as f64).sqrt(), replicas, seed),
        rec("std_k_hat", sd, 0.0, replicas, seed),
    ];
    art.note("mean_over_std", mk / sd);
    for &(x, s) in &report.survival {
        let bound = (-c * x.powi(3)).exp();
        recs.push(rec(
            format!("p_abs_k_ge_{x}"),
            s,
            (s * (1.0 - s) / replicas as f64).sqrt(),
            replicas,
            seed,
        ));
        recs.push(rec(format!("bound_{x}"), bound, 0.0, replicas, seed));
        art.note(&format!("below_bound_x_{x}"), s <= bound);
    }
    let exponent = report.exponent.unwrap_or(f64::NAN);
    recs.push(rec("tail_exponent", exponent, 0.0, replicas, seed));
    art.note("tail_exponent", exponent);
    art.file("stats.csv", stats_csv(&recs)?);
    art.file("lpp.csv", lpp_csv(&samples, n, q)?);
    let mut abs: Vec<f64> = k.iter().map(|x| x.abs()).collect();
    abs.sort_by(f64::total_cmp);
    let tail: Vec<(f64, f64)> = abs
        .iter()
        .enumerate()
        .step_by((abs.len() / 300).max(1))
        .map(|(i, &x)| (x, ((abs.len() - i) as f64 / abs.len() as f64).log10()))
        .collect();
    let xmax = abs.last().copied().unwrap_or(1.0);
    let bound: Vec<(f64, f64)> = (0..=100)
        .map(|i| {
            let x = xmax * i as f64 / 100.0;
            (x, (-c * x.powi(3)).exp().log10())
        })
        .filter(|p| p.1 >= -5.0)
        .collect();
    let plot = Plot::new("Endpoint tail", "x", "log10 P(|K| >= x)")
        .with(Series::new("empirical", tail))
        .with(Series::new("exp(-c x^3)", bound).dashed());
    art.file("tail.svg", plot.render().into_bytes());
    Ok(art)
}

fn stopping_domain_experiment(p: &Params) -> Result<Artifacts, CliError> {
    let lines = positive(p, "lines")?;
    let hw: f64 = p.get("half_width")?;
    let m = positive(p, "m")?;
    let k = positive(p, "k")?;
    let slope: f64 = p.get("slope")?;
    let window: f64 = p.get("window")?;
    let replicas = positive(p, "replicas")?;
    let opts = StrongGibbsOptions {
        resample: ResampleOptions::default(),
        probe_times: p.list("probes")?,
        alpha: p.get("alpha")?,
    };
    let seed = p.seed()?;
    let ens = try_run_replicas(seed.stream(1), replicas, p.workers()?, |_, rng| {
        sample_watermelon_dyson(lines, hw, m, 1.0, rng)
    })?;
    let (report, _) = strong_gibbs_check(&ens, k, slope, window, &opts, seed.stream(2))?;
    let domains: Vec<(f64, f64)> = ens
        .iter()
        .map(|e| snapped_stopping_domain(e, k, slope, window))
        .collect::<airy_gibbs::Result<Vec<_>>>()?
        .into_iter()
        .flatten()
        .collect();
    let widths: Vec<f64> = domains.iter().map(|d| d.1 - d.0).collect();
    let mut recs = Vec::new();
    let mut art = Artifacts::default();
    for pr in &report.probes {
        recs.push(rec(
            format!("ks_statistic_t_{}", pr.time),
            pr.statistic,
            0.0,
            replicas,
            seed,
        ));
        recs.push(rec(
            format!("ks_p_value_t_{}", pr.time),
            pr.p_value,
            0.0,
            replicas,
            seed,
        ));
    }
    if !widths.is_empty() {
        let (mw, sw) = mean_stderr(&widths);
        recs.push(rec("mean_domain_width", mw, sw, widths.len(), seed));
    }
    recs.push(rec("resampled", report.resampled as f64, 0.0, replicas, seed));
    recs.push(rec("degenerate", report.excluded as f64, 0.0, replicas, seed));
    recs.push(rec("timeouts", report.timeouts as f64, 0.0, replicas, seed));
    art.note("passed", report.passed);
    art.note("resampled", report.resampled);
    art.note("degenerate", report.excluded);
    art.note("timeouts", report.timeouts);
    art.file("stats.csv", stats_csv(&recs)?);
    let e0 = &ens[0];
    let range = e0.index_range(-window, window)?;
    let (j0, j1) = (*range.start(), *range.end());
    let line = GridPath::new(e0.time(j0), e0.time(j1), e0.line(k)[j0..=j1].to_vec())?;
    let maj = least_concave_majorant(&line);
    let pts: Vec<(f64, f64)> = (0..=line.m()).map(|j| (line.time(j), line.values()[j])).collect();
    let plot = Plot::new("Line below the block and its concave majorant", "t", "value")
        .with(Series::new(format!("line {}", k + 1), pts))
        .with(Series::new("majorant", maj.breakpoints().to_vec()).dashed());
    art.file("majorant.svg", plot.render().into_bytes());
    Ok(art)
}

fn oracle_tw(p: &Params) -> Result<Artifacts, CliError> {
    let s: usize = p.get("s")?;
    let replicas = positive(p, "replicas")?;
    let seed = p.seed()?;
    let xs = sample_tw_gue(s, replicas, seed, p.workers()?)?;
    let (m, v) = mean_var(&xs);
    let recs = vec![
        rec("mean", m, (v / replicas as f64).sqrt(), replicas, seed),
        rec("var", v, 0.0, replicas, seed),
    ];
    let mut art = Artifacts::default();
    art.note("mean", m);
    art.note("var", v);
    art.note("tracy_widom_reference_mean", TW_MEAN);
    art.note("tracy_widom_reference_var", TW_VAR);
    art.file("stats.csv", stats_csv(&recs)?);
    art.file("oracle.csv", oracle_csv(&xs, s)?);
    let plot = Plot::new("Tridiagonal edge statistic", "value", "ECDF").with(Series::new("oracle", ecdf_points(&xs)));
    art.file("ecdf.svg", plot.render().into_bytes());
    Ok(art)
}
