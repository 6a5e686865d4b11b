//! Brownian Gibbs resampling.
//!
//! A block of consecutive lines is erased on `[a, b]` and redrawn as
//! independent Brownian bridges between the existing endpoint values,
//! repeating until the proposal stays strictly between the line above the
//! block and the line (or floor) below it. Avoidance is checked at the grid
//! points and, by default, also inside each grid cell through the exact
//! no-crossing probability of a Brownian gap (see [`Avoidance`]).

use std::ops::RangeInclusive;

use rand::Rng;

use crate::boundary::BoundaryData;
use crate::bridge::{fill_bridge, GridPath};
use crate::ensemble::LineEnsemble;
use crate::error::{invalid, Error, Result};
use crate::geometry::stopping_domain;
use crate::lattice::{LatticeBoundary, LatticeBridgeSystem};
use crate::rng::RngSeed;
use crate::stats::{ks_two_sample, Proportion};

pub const DEFAULT_MAX_ATTEMPTS: usize = 1_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum BlockMode {
    /// Propose the whole block at once; accept only if it is mutually
    /// avoiding and avoids its neighbours.
    #[default]
    Joint,
    /// Resample the block one line at a time, top to bottom.
    Sequential,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Avoidance {
    /// Ordering is checked at grid points only.
    GridPoints,
    /// Grid-point ordering, and in addition each grid cell is kept with the
    /// probability that the gap to the neighbouring curve, a Brownian bridge
    /// between its observed end values, never hits zero. Neighbouring lines
    /// count as independent bridges inside a cell; the floor counts as
    /// linear.
    #[default]
    Continuous,
}

#[derive(Debug, Clone)]
pub struct ResampleOptions {
    pub diffusion: f64,
    pub max_attempts: usize,
    pub mode: BlockMode,
    pub avoidance: Avoidance,
    /// Floor below the bottom line of the ensemble; `None` is minus infinity.
    pub floor: Option<GridPath>,
}

impl Default for ResampleOptions {
    fn default() -> Self {
        Self {
            diffusion: 1.0,
            max_attempts: DEFAULT_MAX_ATTEMPTS,
            mode: BlockMode::Joint,
            avoidance: Avoidance::Continuous,
            floor: None,
        }
    }
}

fn grid_indices(ens: &LineEnsemble, a: f64, b: f64) -> Result<(usize, usize)> {
    if !(a < b) {
        return invalid(format!("resampling interval needs a < b, got [{a}, {b}]"));
    }
    let ja = ens
        .grid_index(a)
        .ok_or_else(|| Error::InvalidArgument(format!("{a} is not a grid time")))?;
    let jb = ens
        .grid_index(b)
        .ok_or_else(|| Error::InvalidArgument(format!("{b} is not a grid time")))?;
    Ok((ja, jb))
}

/// A Brownian bridge on `[a, b]` joining line `i` at `a` to line `i` at `b`:
/// the affine chord plus an independent zero-pinned bridge.
pub fn propose_resample<R: Rng + ?Sized>(
    ens: &LineEnsemble,
    i: usize,
    a: f64,
    b: f64,
    diffusion: f64,
    rng: &mut R,
) -> Result<GridPath> {
    if i >= ens.k() {
        return invalid(format!("line {i} out of range (k = {})", ens.k()));
    }
    let (ja, jb) = grid_indices(ens, a, b)?;
    let line = ens.line(i);
    crate::bridge::sample_bridge(ens.time(ja), ens.time(jb), line[ja], line[jb], jb - ja, diffusion, rng)
}

/// Strictly between `upper` and `lower` at every interior grid point.
pub fn accept(candidate: &GridPath, upper: Option<&GridPath>, lower: Option<&GridPath>) -> Result<bool> {
    for other in [upper, lower].into_iter().flatten() {
        if !other.same_grid(candidate) {
            return invalid("accept: bounding curve is on a different grid");
        }
    }
    let c = candidate.values();
    let interior = 1..c.len() - 1;
    let above = |j: usize| upper.is_none_or(|u| u.values()[j] > c[j]);
    let below = |j: usize| lower.is_none_or(|l| c[j] > l.values()[j]);
    Ok(interior.into_iter().all(|j| above(j) && below(j)))
}

#[derive(Debug, Clone)]
pub struct Resampled {
    pub ensemble: LineEnsemble,
    pub attempts: usize,
}

/// Replaces lines `block` on `[a, b]` by the first accepted proposal.
pub fn gibbs_resample<R: Rng + ?Sized>(
    ens: &LineEnsemble,
    block: RangeInclusive<usize>,
    a: f64,
    b: f64,
    opts: &ResampleOptions,
    rng: &mut R,
) -> Result<Resampled> {
    let (k1, k2) = (*block.start(), *block.end());
    if k1 > k2 || k2 >= ens.k() {
        return invalid(format!("block {k1}..={k2} outside ensemble of {} lines", ens.k()));
    }
    if !(opts.diffusion > 0.0) {
        return invalid("diffusion must be positive");
    }
    let (ja, jb) = grid_indices(ens, a, b)?;
    let floor: Option<Vec<f64>> = opts
        .floor
        .as_ref()
        .map(|f| (ja..=jb).map(|j| f.eval(ens.time(j))).collect());
    let mut out = ens.clone();
    let attempts = match opts.mode {
        BlockMode::Joint => resample_block(&mut out, k1, k2, ja, jb, floor.as_deref(), opts, rng)?,
        BlockMode::Sequential => {
            let mut total = 0;
            for i in k1..=k2 {
                total += resample_block(&mut out, i, i, ja, jb, floor.as_deref(), opts, rng).map_err(|e| match e {
                    Error::ResampleTimeout { attempts, .. } => Error::ResampleTimeout {
                        attempts: total + attempts,
                        acceptance_estimate: (i - k1) as f64 / (total + attempts) as f64,
                    },
                    other => other,
                })?;
            }
            total
        }
    };
    Ok(Resampled {
        ensemble: out,
        attempts,
    })
}

#[allow(clippy::too_many_arguments)]
fn resample_block<R: Rng + ?Sized>(
    ens: &mut LineEnsemble,
    k1: usize,
    k2: usize,
    ja: usize,
    jb: usize,
    floor: Option<&[f64]>,
    opts: &ResampleOptions,
    rng: &mut R,
) -> Result<usize> {
    let len = jb - ja + 1;
    let dt = ens.dt();
    let upper: Option<Vec<f64>> = (k1 > 0).then(|| ens.line(k1 - 1)[ja..=jb].to_vec());
    let below_is_line = k2 + 1 < ens.k();
    let lower: Option<Vec<f64>> = if below_is_line {
        Some(ens.line(k2 + 1)[ja..=jb].to_vec())
    } else {
        floor.map(<[f64]>::to_vec)
    };
    let lower_rate = if below_is_line { 2.0 } else { 1.0 } * opts.diffusion;
    let mut proposal: Vec<Vec<f64>> = (k1..=k2)
        .map(|i| {
            let mut v = vec![0.0; len];
            v[0] = ens.line(i)[ja];
            v[len - 1] = ens.line(i)[jb];
            v
        })
        .collect();
    for attempt in 1..=opts.max_attempts {
        for p in proposal.iter_mut() {
            fill_bridge(p, dt, opts.diffusion, rng);
        }
        let mut ok = avoids(&proposal, upper.as_deref(), lower.as_deref());
        if ok && opts.avoidance == Avoidance::Continuous {
            let p = no_crossing_probability(
                &proposal,
                upper.as_deref(),
                lower.as_deref(),
                lower_rate,
                dt,
                opts.diffusion,
            );
            ok = rng.random::<f64>() < p;
        }
        if ok {
            for (p, i) in proposal.iter().zip(k1..=k2) {
                ens.line_mut(i)[ja..=jb].copy_from_slice(p);
            }
            return Ok(attempt);
        }
    }
    Err(Error::ResampleTimeout {
        attempts: opts.max_attempts,
        acceptance_estimate: 0.0,
    })
}

/// Probability that no gap hits zero inside any grid cell, given the gaps at
/// the grid points: `prod (1 - exp(-2 d0 d1 / (rate dt)))`. Cells whose end
/// gap is not positive (pinned, touching ends) are skipped.
fn no_crossing_probability(
    block: &[Vec<f64>],
    upper: Option<&[f64]>,
    lower: Option<&[f64]>,
    lower_rate: f64,
    dt: f64,
    diffusion: f64,
) -> f64 {
    let mut p = 1.0;
    let mut pair = |hi: &[f64], lo: &[f64], rate: f64| {
        for j in 0..hi.len() - 1 {
            let (d0, d1) = (hi[j] - lo[j], hi[j + 1] - lo[j + 1]);
            if d0 > 0.0 && d1 > 0.0 {
                p *= -(-2.0 * d0 * d1 / (rate * dt)).exp_m1();
            }
        }
    };
    if let Some(u) = upper {
        pair(u, &block[0], 2.0 * diffusion);
    }
    for w in block.windows(2) {
        pair(&w[0], &w[1], 2.0 * diffusion);
    }
    if let (Some(l), Some(last)) = (lower, block.last()) {
        pair(last, l, lower_rate);
    }
    p
}

fn avoids(block: &[Vec<f64>], upper: Option<&[f64]>, lower: Option<&[f64]>) -> bool {
    let len = block[0].len();
    for j in 1..len - 1 {
        let mut above = upper.map_or(f64::INFINITY, |u| u[j]);
        for line in block {
            if !(line[j] < above) {
                return false;
            }
            above = line[j];
        }
        if let Some(l) = lower {
            if !(above > l[j]) {
                return false;
            }
        }
    }
    true
}

/// Fraction of independent bridge systems between the boundary data that
/// stay ordered and above the floor at every interior grid point.
pub fn estimate_acceptance_probability<R: Rng + ?Sized>(
    boundary: &BoundaryData,
    trials: u64,
    m: usize,
    diffusion: f64,
    rng: &mut R,
) -> Result<Proportion> {
    boundary.validate()?;
    if trials == 0 || m == 0 || !(diffusion > 0.0) {
        return invalid("acceptance estimate needs trials >= 1, m >= 1, diffusion > 0");
    }
    let (a, b) = (boundary.a, boundary.b);
    let dt = (b - a) / m as f64;
    let floor: Option<Vec<f64>> = boundary
        .floor
        .as_ref()
        .map(|f| (0..=m).map(|j| f.eval(a + j as f64 * dt)).collect());
    let mut lines: Vec<Vec<f64>> = boundary
        .entrance
        .iter()
        .zip(&boundary.exit)
        .map(|(&x, &y)| {
            let mut v = vec![0.0; m + 1];
            v[0] = x;
            v[m] = y;
            v
        })
        .collect();
    let mut successes = 0;
    for _ in 0..trials {
        for l in lines.iter_mut() {
            fill_bridge(l, dt, diffusion, rng);
        }
        if avoids(&lines, None, floor.as_deref()) {
            successes += 1;
        }
    }
    Ok(Proportion { successes, trials })
}

/// Lattice analogue of [`estimate_acceptance_probability`]: independent
/// uniform walk bridges on the `1/n` lattice.
pub fn estimate_lattice_acceptance<R: Rng + ?Sized>(
    boundary: &BoundaryData,
    n: u32,
    trials: u64,
    rng: &mut R,
) -> Result<Proportion> {
    let lb = LatticeBoundary::from_boundary(boundary, n)?;
    if trials == 0 {
        return invalid("acceptance estimate needs trials >= 1");
    }
    let successes = (0..trials)
        .filter(|_| LatticeBridgeSystem::rejection_sample(&lb, 1, rng).is_some())
        .count() as u64;
    Ok(Proportion { successes, trials })
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProbeResult {
    pub time: f64,
    pub statistic: f64,
    pub p_value: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct StrongGibbsReport {
    pub probes: Vec<ProbeResult>,
    /// Replicas whose stopping domain spans fewer than two grid steps.
    pub excluded: usize,
    pub timeouts: usize,
    pub resampled: usize,
    /// Bonferroni-corrected: every probe has `p >= alpha / probes`.
    pub passed: bool,
}

#[derive(Debug, Clone)]
pub struct StrongGibbsOptions {
    pub resample: ResampleOptions,
    pub probe_times: Vec<f64>,
    pub alpha: f64,
}

/// Resamples the top `k` lines of every replica on the random domain
/// `(l_K, r_K)` read off the concave majorant of line `k` (0-based, i.e. the
/// first line below the block) on `[-window, window]`, then compares the
/// top-line marginals at the probe times before and after.
pub fn strong_gibbs_check(
    replicas: &[LineEnsemble],
    k: usize,
    slope: f64,
    window: f64,
    opts: &StrongGibbsOptions,
    seed: RngSeed,
) -> Result<(StrongGibbsReport, Vec<LineEnsemble>)> {
    if replicas.is_empty() || k == 0 || replicas.iter().any(|e| e.k() <= k) {
        return invalid("strong Gibbs check needs replicas with more than k >= 1 lines");
    }
    let mut after = Vec::with_capacity(replicas.len());
    let (mut excluded, mut timeouts, mut resampled) = (0, 0, 0);
    for (idx, ens) in replicas.iter().enumerate() {
        match resample_on_stopping_domain(ens, k, slope, window, &opts.resample, seed.fork(idx as u64))? {
            DomainOutcome::Resampled(e) => {
                resampled += 1;
                after.push(e);
            }
            DomainOutcome::Degenerate => {
                excluded += 1;
                after.push(ens.clone());
            }
            DomainOutcome::TimedOut => {
                timeouts += 1;
                after.push(ens.clone());
            }
        }
    }
    let mut probes = Vec::new();
    for &t in &opts.probe_times {
        let before: Vec<f64> = replicas.iter().map(|e| e.eval(0, t)).collect();
        let post: Vec<f64> = after.iter().map(|e| e.eval(0, t)).collect();
        let ks = ks_two_sample(&before, &post)?;
        probes.push(ProbeResult {
            time: t,
            statistic: ks.statistic,
            p_value: ks.p_value,
        });
    }
    let cutoff = opts.alpha / probes.len().max(1) as f64;
    let passed = probes.iter().all(|p| p.p_value >= cutoff);
    Ok((
        StrongGibbsReport {
            probes,
            excluded,
            timeouts,
            resampled,
            passed,
        },
        after,
    ))
}

pub enum DomainOutcome {
    Resampled(LineEnsemble),
    Degenerate,
    TimedOut,
}

/// Grid-snapped stopping domain `[time(ja), time(jb)]` for the block above
/// line `k`, or `None` when it spans fewer than two grid steps.
pub fn snapped_stopping_domain(ens: &LineEnsemble, k: usize, slope: f64, window: f64) -> Result<Option<(f64, f64)>> {
    let range = ens.index_range(-window, window)?;
    let (j0, j1) = (*range.start(), *range.end());
    if j1 <= j0 {
        return Ok(None);
    }
    let sub = GridPath::new(ens.time(j0), ens.time(j1), ens.line(k)[j0..=j1].to_vec())?;
    let (l, r) = stopping_domain(&sub, slope)?;
    let ja = j0 + ((l - sub.t_start()) / sub.dt() - 1e-9).ceil().max(0.0) as usize;
    let jb = j0 + ((r - sub.t_start()) / sub.dt() + 1e-9).floor().max(0.0) as usize;
    if jb < ja + 2 {
        return Ok(None);
    }
    Ok(Some((ens.time(ja), ens.time(jb))))
}

pub fn resample_on_stopping_domain(
    ens: &LineEnsemble,
    k: usize,
    slope: f64,
    window: f64,
    opts: &ResampleOptions,
    seed: RngSeed,
) -> Result<DomainOutcome> {
    let Some((a, b)) = snapped_stopping_domain(ens, k, slope, window)? else {
        return Ok(DomainOutcome::Degenerate);
    };
    match gibbs_resample(ens, 0..=k - 1, a, b, opts, &mut seed.rng()) {
        Ok(r) => Ok(DomainOutcome::Resampled(r.ensemble)),
        Err(Error::ResampleTimeout { .. }) => Ok(DomainOutcome::TimedOut),
        Err(e) => Err(e),
    }
}
