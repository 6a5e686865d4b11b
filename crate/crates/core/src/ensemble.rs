//! Line ensembles on a shared grid: construction, edge scaling and the
//! statistics used to diagnose them.

use nalgebra::{Complex, DMatrix};
use rand::Rng;

pub use crate::boundary::BoundaryData;
use crate::bridge::{fill_bridge, interpolate, GridPath};
use crate::error::{invalid, Result};
use crate::lattice::{LatticeBoundary, LatticeBridgeSystem};
use crate::stats::{binom_ci, Interval, Proportion};

/// Rejection draws tried before falling back to the lowest configuration.
const WARM_START_ATTEMPTS: usize = 64;

/// `k` curves on the uniform grid `t_start + j * (t_end - t_start) / m`.
/// Line 0 is the top curve.
#[derive(Debug, Clone, PartialEq)]
pub struct LineEnsemble {
    t_start: f64,
    t_end: f64,
    lines: Vec<Vec<f64>>,
}

impl LineEnsemble {
    pub fn new(t_start: f64, t_end: f64, lines: Vec<Vec<f64>>) -> Result<Self> {
        if !(t_start < t_end) {
            return invalid(format!("ensemble interval [{t_start}, {t_end}] is empty"));
        }
        let Some(first) = lines.first() else {
            return invalid("ensemble needs at least one line");
        };
        if first.len() < 2 {
            return invalid("ensemble grid needs at least two points");
        }
        if lines.iter().any(|l| l.len() != first.len()) {
            return invalid("ensemble lines do not share a grid");
        }
        if lines.iter().flatten().any(|v| !v.is_finite()) {
            return invalid("ensemble contains non-finite values");
        }
        Ok(Self { t_start, t_end, lines })
    }

    pub fn from_paths(paths: &[GridPath]) -> Result<Self> {
        let Some(p0) = paths.first() else {
            return invalid("ensemble needs at least one line");
        };
        if paths.iter().any(|p| !p.same_grid(p0)) {
            return invalid("paths do not share a grid");
        }
        Self::new(
            p0.t_start(),
            p0.t_end(),
            paths.iter().map(|p| p.values().to_vec()).collect(),
        )
    }

    pub fn k(&self) -> usize {
        self.lines.len()
    }

    pub fn m(&self) -> usize {
        self.lines[0].len() - 1
    }

    pub fn t_start(&self) -> f64 {
        self.t_start
    }

    pub fn t_end(&self) -> f64 {
        self.t_end
    }

    pub fn dt(&self) -> f64 {
        (self.t_end - self.t_start) / self.m() as f64
    }

    pub fn time(&self, j: usize) -> f64 {
        if j == self.m() {
            self.t_end
        } else {
            self.t_start + j as f64 * self.dt()
        }
    }

    pub fn lines(&self) -> &[Vec<f64>] {
        &self.lines
    }

    pub fn line(&self, i: usize) -> &[f64] {
        &self.lines[i]
    }

    pub fn line_mut(&mut self, i: usize) -> &mut [f64] {
        &mut self.lines[i]
    }

    pub fn line_path(&self, i: usize) -> GridPath {
        GridPath::new(self.t_start, self.t_end, self.lines[i].clone()).expect("ensemble lines are valid paths")
    }

    /// Linear interpolation of line `i`; clamped outside the grid.
    pub fn eval(&self, i: usize, t: f64) -> f64 {
        interpolate(&self.lines[i], self.t_start, self.t_end, t)
    }

    /// Index of the grid point at time `t`, if `t` is (up to rounding) a grid time.
    pub fn grid_index(&self, t: f64) -> Option<usize> {
        let u = (t - self.t_start) / self.dt();
        let j = u.round();
        if (u - j).abs() < 1e-7 && j >= 0.0 && j <= self.m() as f64 {
            Some(j as usize)
        } else {
            None
        }
    }

    /// Grid indices whose times lie in `[a, b]`.
    pub fn index_range(&self, a: f64, b: f64) -> Result<std::ops::RangeInclusive<usize>> {
        let tol = 1e-9 * self.dt();
        if a < self.t_start - tol || b > self.t_end + tol || a > b {
            return invalid(format!(
                "window [{a}, {b}] not inside the grid [{}, {}]",
                self.t_start, self.t_end
            ));
        }
        let lo = ((a - self.t_start) / self.dt() - 1e-7).ceil().max(0.0) as usize;
        let hi = (((b - self.t_start) / self.dt() + 1e-7).floor() as usize).min(self.m());
        if lo > hi {
            return invalid(format!("window [{a}, {b}] contains no grid point"));
        }
        Ok(lo..=hi)
    }

    /// Strict ordering at every grid point in `range`.
    pub fn is_strictly_ordered_on(&self, range: std::ops::RangeInclusive<usize>) -> bool {
        self.lines.windows(2).all(|w| range.clone().all(|j| w[0][j] > w[1][j]))
    }

    pub fn is_strictly_ordered(&self) -> bool {
        self.is_strictly_ordered_on(0..=self.m())
    }

    /// Ordering at interior grid points only (pinned watermelons meet at the ends).
    pub fn is_strictly_ordered_interior(&self) -> bool {
        self.m() < 2 || self.is_strictly_ordered_on(1..=self.m() - 1)
    }

    /// Restricts a lattice system to an `m`-step grid on its interval, by
    /// linear interpolation of the piecewise-linear walks.
    pub fn from_lattice(sys: &LatticeBridgeSystem, m: usize) -> Result<Self> {
        if m == 0 {
            return invalid("grid needs m >= 1");
        }
        let (a, b) = (sys.boundary().a(), sys.boundary().b());
        let nf = sys.n() as f64;
        let lines = sys
            .heights()
            .iter()
            .map(|h| {
                let vals: Vec<f64> = h.iter().map(|&x| x as f64 / nf).collect();
                (0..=m)
                    .map(|j| interpolate(&vals, a, b, a + (b - a) * j as f64 / m as f64))
                    .collect()
            })
            .collect();
        Self::new(a, b, lines)
    }
}

/// Approximate sample of `k` Brownian bridges conditioned to stay ordered
/// and above the floor: the `1/n` lattice walk system is equilibrated by
/// `sweeps` sweeps of flip dynamics and then restricted to an `m`-step grid.
///
/// The chain starts from an exact rejection draw when one is found within a
/// few attempts, otherwise from the lowest admissible configuration.
pub fn sample_nonintersecting<R: Rng + ?Sized>(
    boundary: &BoundaryData,
    m: usize,
    n: u32,
    sweeps: usize,
    rng: &mut R,
) -> Result<LineEnsemble> {
    let sys = sample_lattice_system(boundary, n, sweeps, rng)?;
    LineEnsemble::from_lattice(&sys, m)
}

pub fn sample_lattice_system<R: Rng + ?Sized>(
    boundary: &BoundaryData,
    n: u32,
    sweeps: usize,
    rng: &mut R,
) -> Result<LatticeBridgeSystem> {
    let lb = LatticeBoundary::from_boundary(boundary, n)?;
    // Feasibility check first so infeasible data errors instead of silently
    // failing every rejection draw.
    let lowest = LatticeBridgeSystem::lowest(lb.clone())?;
    let mut sys = LatticeBridgeSystem::rejection_sample(&lb, WARM_START_ATTEMPTS, rng).unwrap_or(lowest);
    sys.run_chain(sweeps, rng);
    Ok(sys)
}

/// Default burn-in for an interval of `L = 2 half_width n^2` lattice steps:
/// `max(10 L, L^2 / 2)` sweeps. Single-site dynamics relax diffusively, so the
/// centre of mass needs order `L^2` sweeps to leave the lowest configuration.
pub fn default_sweeps(half_width: f64, n: u32) -> usize {
    let steps = (2.0 * half_width * (n as f64).powi(2)).round();
    (10.0 * steps).max(steps * steps / 2.0) as usize
}

/// `lines` bridges on `[-half_width, half_width]` pinned at `-i * 2/n`,
/// `i = 1..=lines`, sampled with the lattice chain.
pub fn sample_watermelon<R: Rng + ?Sized>(
    lines: usize,
    half_width: f64,
    m: usize,
    n: u32,
    sweeps: usize,
    rng: &mut R,
) -> Result<LineEnsemble> {
    if lines == 0 {
        return invalid("watermelon needs at least one line");
    }
    let eps = 2.0 / n as f64;
    let pins: Vec<f64> = (1..=lines).map(|i| -(i as f64) * eps).collect();
    let boundary = BoundaryData::new(-half_width, half_width, pins.clone(), pins, None)?;
    sample_nonintersecting(&boundary, m, n, sweeps, rng)
}

/// Exact watermelon on the grid: the ordered eigenvalues of an `lines x lines`
/// Hermitian Brownian bridge pinned at zero on `[-half_width, half_width]`.
/// Diagonal entries are real bridges with variance rate `diffusion`; real and
/// imaginary parts of off-diagonal entries have rate `diffusion / 2`, which
/// gives every eigenvalue curve variance rate `diffusion`.
pub fn sample_watermelon_dyson<R: Rng + ?Sized>(
    lines: usize,
    half_width: f64,
    m: usize,
    diffusion: f64,
    rng: &mut R,
) -> Result<LineEnsemble> {
    if lines == 0 || m == 0 || !(half_width > 0.0) || !(diffusion > 0.0) {
        return invalid("dyson watermelon needs lines >= 1, m >= 1, half_width > 0, diffusion > 0");
    }
    let dt = 2.0 * half_width / m as f64;
    let mut entry = |rate: f64| {
        let mut v = vec![0.0; m + 1];
        fill_bridge(&mut v, dt, rate, rng);
        v
    };
    let mut diag = Vec::with_capacity(lines);
    let mut off = Vec::new();
    for r in 0..lines {
        diag.push(entry(diffusion));
        for _ in r + 1..lines {
            off.push((entry(diffusion / 2.0), entry(diffusion / 2.0)));
        }
    }
    let mut out = vec![vec![0.0; m + 1]; lines];
    let mut mat = DMatrix::<Complex<f64>>::zeros(lines, lines);
    for j in 0..=m {
        let mut idx = 0;
        for r in 0..lines {
            mat[(r, r)] = Complex::new(diag[r][j], 0.0);
            for c in r + 1..lines {
                let (re, im) = (&off[idx].0, &off[idx].1);
                mat[(r, c)] = Complex::new(re[j], im[j]);
                mat[(c, r)] = Complex::new(re[j], -im[j]);
                idx += 1;
            }
        }
        let mut eig: Vec<f64> = mat.clone().symmetric_eigenvalues().iter().copied().collect();
        eig.sort_by(|a, b| b.total_cmp(a));
        for (i, e) in eig.into_iter().enumerate() {
            out[i][j] = e;
        }
    }
    LineEnsemble::new(-half_width, half_width, out)
}

/// Edge scaling `t -> N^{-1/3} (B(N^{2/3} t) - sqrt(2) N)` onto an
/// `m_out`-step grid over `[-window, window]`.
pub fn edge_scale(ens: &LineEnsemble, big_n: f64, window: f64, m_out: usize) -> Result<LineEnsemble> {
    if !(big_n > 0.0) || !(window > 0.0) || m_out == 0 {
        return invalid("edge_scale needs N > 0, window > 0 and m_out >= 1");
    }
    let h = big_n.powf(2.0 / 3.0);
    let v = big_n.powf(1.0 / 3.0);
    let tol = 1e-9 * ens.dt();
    if -h * window < ens.t_start - tol || h * window > ens.t_end + tol {
        return invalid(format!(
            "window {window} needs source times [{}, {}], grid covers [{}, {}]",
            -h * window,
            h * window,
            ens.t_start,
            ens.t_end
        ));
    }
    let shift = std::f64::consts::SQRT_2 * big_n;
    let lines = (0..ens.k())
        .map(|i| {
            (0..=m_out)
                .map(|j| {
                    let t = -window + 2.0 * window * j as f64 / m_out as f64;
                    (ens.eval(i, h * t) - shift) / v
                })
                .collect()
        })
        .collect();
    LineEnsemble::new(-window, window, lines)
}

/// Inverse of [`edge_scale`] on the scaled ensemble's own grid.
pub fn edge_unscale(scaled: &LineEnsemble, big_n: f64) -> Result<LineEnsemble> {
    if !(big_n > 0.0) {
        return invalid("edge_unscale needs N > 0");
    }
    let h = big_n.powf(2.0 / 3.0);
    let v = big_n.powf(1.0 / 3.0);
    let shift = std::f64::consts::SQRT_2 * big_n;
    let lines = scaled
        .lines
        .iter()
        .map(|l| l.iter().map(|&d| v * d + shift).collect())
        .collect();
    LineEnsemble::new(h * scaled.t_start, h * scaled.t_end, lines)
}

/// `A(t) = sqrt(2) D(t) + t^2`.
pub fn parabolic_shift(ens: &LineEnsemble) -> LineEnsemble {
    map_with_time(ens, |t, x| std::f64::consts::SQRT_2 * x + t * t)
}

/// `L(t) = (A(t) - t^2) / sqrt(2)`.
pub fn parabolic_unshift(ens: &LineEnsemble) -> LineEnsemble {
    map_with_time(ens, |t, a| (a - t * t) / std::f64::consts::SQRT_2)
}

fn map_with_time(ens: &LineEnsemble, f: impl Fn(f64, f64) -> f64) -> LineEnsemble {
    let lines = ens
        .lines
        .iter()
        .map(|l| l.iter().enumerate().map(|(j, &x)| f(ens.time(j), x)).collect())
        .collect();
    LineEnsemble {
        t_start: ens.t_start,
        t_end: ens.t_end,
        lines,
    }
}

/// Smallest vertical distance between consecutive lines among the top `k`
/// over grid points in `[a, b]`.
pub fn min_gap(ens: &LineEnsemble, k: usize, a: f64, b: f64) -> Result<f64> {
    if k < 2 {
        return invalid("min_gap needs k >= 2");
    }
    if k > ens.k() {
        return invalid(format!("min_gap over {k} lines but ensemble has {}", ens.k()));
    }
    let range = ens.index_range(a, b)?;
    let mut best = f64::INFINITY;
    for i in 0..k - 1 {
        for j in range.clone() {
            best = best.min((ens.lines[i][j] - ens.lines[i + 1][j]).abs());
        }
    }
    Ok(best)
}

/// Grid minimum and maximum of line `i` over `[-t, t]`.
pub fn height_extremes(ens: &LineEnsemble, i: usize, t: f64) -> Result<(f64, f64)> {
    if i >= ens.k() {
        return invalid(format!("line {i} out of range (k = {})", ens.k()));
    }
    let range = ens.index_range(-t, t)?;
    let vals = &ens.lines[i][range];
    Ok((
        vals.iter().copied().fold(f64::INFINITY, f64::min),
        vals.iter().copied().fold(f64::NEG_INFINITY, f64::max),
    ))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GapEventEstimate {
    pub tally: Proportion,
    /// 95% Wilson interval.
    pub ci: Interval,
}

/// Frequency over replicas of `min_{i<k} |L_i(t) - L_{i+1}(t)| < delta`.
pub fn close_gap_frequency(replicas: &[LineEnsemble], k: usize, t: f64, delta: f64) -> Result<GapEventEstimate> {
    if replicas.is_empty() {
        return invalid("gap statistic needs at least one replica");
    }
    if k < 2 || replicas.iter().any(|e| e.k() < k) {
        return invalid("gap statistic needs 2 <= k <= line count");
    }
    let hits = replicas
        .iter()
        .filter(|e| (0..k - 1).any(|i| (e.eval(i, t) - e.eval(i + 1, t)).abs() < delta))
        .count() as u64;
    let tally = Proportion {
        successes: hits,
        trials: replicas.len() as u64,
    };
    Ok(GapEventEstimate {
        tally,
        ci: binom_ci(hits, tally.trials, 0.95)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::RngSeed;

    fn const_ens(t0: f64, t1: f64, m: usize, vals: &[f64]) -> LineEnsemble {
        LineEnsemble::new(t0, t1, vals.iter().map(|&v| vec![v; m + 1]).collect()).unwrap()
    }

    #[test]
    fn edge_scale_centering_and_scale() {
        let n = 8.0f64;
        let c = std::f64::consts::SQRT_2 * n;
        let e = const_ens(-8.0, 8.0, 64, &[c, c + n.cbrt()]);
        let s = edge_scale(&e, n, 2.0, 16).unwrap();
        assert!(s.line(0).iter().all(|v| v.abs() < 1e-12));
        assert!(s.line(1).iter().all(|v| (v - 1.0).abs() < 1e-12));
    }

    #[test]
    fn edge_scale_time_map() {
        // N = 8: source time 4 is output time 1.
        let e = LineEnsemble::new(-8.0, 8.0, vec![(0..=16).map(|j| -8.0 + j as f64).collect()]).unwrap();
        let s = edge_scale(&e, 8.0, 2.0, 4).unwrap();
        let j = s.grid_index(1.0).unwrap();
        let want = (4.0 - std::f64::consts::SQRT_2 * 8.0) / 2.0;
        assert!((s.line(0)[j] - want).abs() < 1e-12);
        assert!(edge_scale(&e, 8.0, 2.5, 4).is_err());
    }

    #[test]
    fn edge_scale_round_trip() {
        let mut rng = RngSeed::new(1, 0).rng();
        let n = 27.0f64;
        let e = sample_watermelon_dyson(3, 9.0, 90, 1.0, &mut rng).unwrap();
        let s = edge_scale(&e, n, 1.0, 90).unwrap();
        let back = edge_unscale(&s, n).unwrap();
        for i in 0..3 {
            for j in 0..=90 {
                assert!((back.line(i)[j] - e.line(i)[j]).abs() < 1e-9, "{i} {j}");
            }
        }
    }

    #[test]
    fn parabolic_shift_examples() {
        let z = const_ens(-1.0, 1.0, 4, &[0.0]);
        let s = parabolic_shift(&z);
        for j in 0..=4 {
            let t = z.time(j);
            assert!((s.line(0)[j] - t * t).abs() < 1e-15);
        }
        let p = LineEnsemble::new(
            -1.0,
            1.0,
            vec![(0..=4)
                .map(|j| {
                    let t = -1.0 + 0.5 * j as f64;
                    -t * t / std::f64::consts::SQRT_2
                })
                .collect()],
        )
        .unwrap();
        assert!(parabolic_shift(&p).line(0).iter().all(|v| v.abs() < 1e-15));
        let mut rng = RngSeed::new(2, 0).rng();
        let e = sample_watermelon_dyson(4, 1.0, 20, 1.0, &mut rng).unwrap();
        let rt = parabolic_unshift(&parabolic_shift(&e));
        for (a, b) in rt.lines().iter().flatten().zip(e.lines().iter().flatten()) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn min_gap_examples() {
        let e = const_ens(0.0, 1.0, 4, &[1.0, 0.0]);
        assert_eq!(min_gap(&e, 2, 0.0, 1.0).unwrap(), 1.0);
        let x = LineEnsemble::new(
            -1.0,
            1.0,
            vec![
                (0..=4).map(|j| -1.0 + 0.5 * j as f64).collect(),
                (0..=4).map(|j| 1.0 - 0.5 * j as f64).collect(),
            ],
        )
        .unwrap();
        assert_eq!(min_gap(&x, 2, -1.0, 1.0).unwrap(), 0.0);
        assert!(min_gap(&e, 1, 0.0, 1.0).is_err());
    }

    #[test]
    fn min_gap_and_extremes_match_scan() {
        let mut rng = RngSeed::new(3, 0).rng();
        for _ in 0..50 {
            let e = sample_watermelon_dyson(4, 1.0, 40, 1.0, &mut rng).unwrap();
            let (a, b) = (-0.5, 0.75);
            let mut brute = f64::INFINITY;
            let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
            for j in 0..=40 {
                let t = e.time(j);
                if t >= a - 1e-12 && t <= b + 1e-12 {
                    for i in 0..2 {
                        brute = brute.min((e.line(i)[j] - e.line(i + 1)[j]).abs());
                    }
                }
                if t.abs() <= 0.5 + 1e-12 {
                    lo = lo.min(e.line(1)[j]);
                    hi = hi.max(e.line(1)[j]);
                }
            }
            assert_eq!(min_gap(&e, 3, a, b).unwrap(), brute);
            assert_eq!(height_extremes(&e, 1, 0.5).unwrap(), (lo, hi));
        }
    }

    #[test]
    fn extremes_examples() {
        let e = const_ens(-1.0, 1.0, 8, &[2.5]);
        assert_eq!(height_extremes(&e, 0, 1.0).unwrap(), (2.5, 2.5));
        let t = LineEnsemble::new(-1.0, 1.0, vec![(0..=8).map(|j| -1.0 + 0.25 * j as f64).collect()]).unwrap();
        assert_eq!(height_extremes(&t, 0, 1.0).unwrap(), (-1.0, 1.0));
        assert!(height_extremes(&t, 1, 1.0).is_err());
        assert!(height_extremes(&t, 0, 2.0).is_err());
    }

    #[test]
    fn gap_event_limits() {
        let mut rng = RngSeed::new(4, 0).rng();
        let reps: Vec<_> = (0..20)
            .map(|_| sample_watermelon_dyson(3, 1.0, 8, 1.0, &mut rng).unwrap())
            .collect();
        assert_eq!(close_gap_frequency(&reps, 3, 0.0, 0.0).unwrap().tally.successes, 0);
        assert_eq!(
            close_gap_frequency(&reps, 3, 0.0, f64::INFINITY)
                .unwrap()
                .tally
                .successes,
            20
        );
    }

    #[test]
    fn dyson_watermelon_is_ordered_and_pinned() {
        let mut rng = RngSeed::new(5, 0).rng();
        let e = sample_watermelon_dyson(5, 2.0, 64, 1.0, &mut rng).unwrap();
        assert!(e.is_strictly_ordered_interior());
        for i in 0..5 {
            assert!(e.line(i)[0].abs() < 1e-12 && e.line(i)[64].abs() < 1e-12);
        }
    }

    #[test]
    fn lattice_watermelon_is_ordered() {
        let mut rng = RngSeed::new(6, 0).rng();
        for _ in 0..20 {
            let e = sample_watermelon(5, 1.0, 32, 4, 200, &mut rng).unwrap();
            assert!(e.is_strictly_ordered());
        }
    }
}
