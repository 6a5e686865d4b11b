//! Single Brownian bridges on uniform grids.
//!
//! Bridges are built by midpoint decomposition: the value at the middle grid
//! index of a pinned segment is Gaussian around the chord with variance
//! `diffusion * (t_mid - t_lo) * (t_hi - t_mid) / (t_hi - t_lo)`, after which
//! the two halves are independent bridges. This produces the exact
//! finite-dimensional law of the continuum bridge on the grid.

use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{invalid, Result};

/// One curve sampled on the uniform grid `t_start + j * (t_end - t_start) / m`,
/// `j = 0..=m`.
#[derive(Debug, Clone, PartialEq)]
pub struct GridPath {
    t_start: f64,
    t_end: f64,
    values: Vec<f64>,
}

impl GridPath {
    pub fn new(t_start: f64, t_end: f64, values: Vec<f64>) -> Result<Self> {
        if !(t_start.is_finite() && t_end.is_finite()) || t_start >= t_end {
            return invalid(format!("grid interval [{t_start}, {t_end}] is empty"));
        }
        if values.len() < 2 {
            return invalid("a grid path needs at least two points");
        }
        if let Some(j) = values.iter().position(|v| !v.is_finite()) {
            return invalid(format!("non-finite value at grid index {j}"));
        }
        Ok(Self { t_start, t_end, values })
    }

    pub fn constant(t_start: f64, t_end: f64, m: usize, value: f64) -> Result<Self> {
        Self::new(t_start, t_end, vec![value; m + 1])
    }

    /// Samples `f` at the grid times.
    pub fn from_fn(t_start: f64, t_end: f64, m: usize, f: impl Fn(f64) -> f64) -> Result<Self> {
        if m == 0 {
            return invalid("grid needs m >= 1");
        }
        let dt = (t_end - t_start) / m as f64;
        Self::new(t_start, t_end, (0..=m).map(|j| f(t_start + j as f64 * dt)).collect())
    }

    pub fn t_start(&self) -> f64 {
        self.t_start
    }

    pub fn t_end(&self) -> f64 {
        self.t_end
    }

    /// Number of grid steps.
    pub fn m(&self) -> usize {
        self.values.len() - 1
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

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    /// Linear interpolation; times outside the grid are clamped.
    pub fn eval(&self, t: f64) -> f64 {
        interpolate(&self.values, self.t_start, self.t_end, t)
    }

    pub fn same_grid(&self, other: &GridPath) -> bool {
        self.m() == other.m() && self.t_start == other.t_start && self.t_end == other.t_end
    }

    pub fn max(&self) -> f64 {
        self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn min(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }
}

pub(crate) fn interpolate(values: &[f64], t_start: f64, t_end: f64, t: f64) -> f64 {
    let m = values.len() - 1;
    let u = ((t - t_start) / (t_end - t_start) * m as f64).clamp(0.0, m as f64);
    let j = (u.floor() as usize).min(m - 1);
    let w = u - j as f64;
    if w == 0.0 {
        values[j]
    } else {
        values[j] * (1.0 - w) + values[j + 1] * w
    }
}

/// Fills the interior of `values` with a bridge between the two pinned end
/// values, drawing standard normals from `normal` in midpoint order.
///
/// With an all-zero normal stream the result is the straight chord.
pub fn fill_bridge_with(values: &mut [f64], dt: f64, diffusion: f64, mut normal: impl FnMut() -> f64) {
    let m = values.len() - 1;
    if m < 2 {
        return;
    }
    let mut stack = vec![(0usize, m)];
    while let Some((lo, hi)) = stack.pop() {
        if hi - lo < 2 {
            continue;
        }
        let mid = lo + (hi - lo) / 2;
        let (left, right) = ((mid - lo) as f64, (hi - mid) as f64);
        let span = left + right;
        let mean = (values[lo] * right + values[hi] * left) / span;
        let var = diffusion * dt * left * right / span;
        values[mid] = mean + var.sqrt() * normal();
        // Right half pushed first so the left half consumes normals first.
        stack.push((mid, hi));
        stack.push((lo, mid));
    }
}

pub fn fill_bridge<R: Rng + ?Sized>(values: &mut [f64], dt: f64, diffusion: f64, rng: &mut R) {
    fill_bridge_with(values, dt, diffusion, || rng.sample(StandardNormal));
}

/// Samples a Brownian bridge from `(t_start, x)` to `(t_end, y)` on an
/// `m`-step grid. `diffusion` is the variance rate of the underlying motion.
pub fn sample_bridge<R: Rng + ?Sized>(
    t_start: f64,
    t_end: f64,
    x: f64,
    y: f64,
    m: usize,
    diffusion: f64,
    rng: &mut R,
) -> Result<GridPath> {
    check_bridge_args(t_start, t_end, x, y, m, diffusion)?;
    let mut values = vec![0.0; m + 1];
    values[0] = x;
    values[m] = y;
    fill_bridge(&mut values, (t_end - t_start) / m as f64, diffusion, rng);
    GridPath::new(t_start, t_end, values)
}

/// Deterministic variant of [`sample_bridge`] driven by a caller-supplied
/// sequence of standard normals (consumed in midpoint order, zeros when the
/// sequence runs out).
pub fn bridge_from_normals(
    t_start: f64,
    t_end: f64,
    x: f64,
    y: f64,
    m: usize,
    diffusion: f64,
    normals: &[f64],
) -> Result<GridPath> {
    check_bridge_args(t_start, t_end, x, y, m, diffusion)?;
    let mut values = vec![0.0; m + 1];
    values[0] = x;
    values[m] = y;
    let mut it = normals.iter().copied();
    fill_bridge_with(&mut values, (t_end - t_start) / m as f64, diffusion, || {
        it.next().unwrap_or(0.0)
    });
    GridPath::new(t_start, t_end, values)
}

fn check_bridge_args(t_start: f64, t_end: f64, x: f64, y: f64, m: usize, diffusion: f64) -> Result<()> {
    if m == 0 {
        return invalid("bridge needs m >= 1 grid steps");
    }
    if !(diffusion > 0.0 && diffusion.is_finite()) {
        return invalid(format!("diffusion must be positive, got {diffusion}"));
    }
    if !(t_start < t_end) {
        return invalid(format!("t_end ({t_end}) must exceed t_start ({t_start})"));
    }
    if !(x.is_finite() && y.is_finite()) {
        return invalid("bridge endpoints must be finite");
    }
    Ok(())
}

/// Doubles the grid resolution of a bridge by inserting conditionally
/// independent midpoints: each new point is Gaussian around the average of
/// its neighbours with variance `diffusion * dt / 4`.
pub fn refine_bridge<R: Rng + ?Sized>(path: &GridPath, diffusion: f64, rng: &mut R) -> GridPath {
    let sd = (diffusion * path.dt() / 4.0).sqrt();
    let v = path.values();
    let mut out = Vec::with_capacity(2 * v.len() - 1);
    for w in v.windows(2) {
        out.push(w[0]);
        let z: f64 = rng.sample(StandardNormal);
        out.push(0.5 * (w[0] + w[1]) + sd * z);
    }
    out.push(v[v.len() - 1]);
    GridPath {
        t_start: path.t_start,
        t_end: path.t_end,
        values: out,
    }
}

/// Draws the supremum over the whole interval of a Brownian bridge with
/// variance rate `diffusion`, conditionally on its grid values. Between
/// neighbouring grid points `a`, `b` the path is an independent bridge whose
/// maximum satisfies `P(M > r) = exp(-2 (r - a)(r - b) / (diffusion dt))`,
/// which is inverted directly.
pub fn sample_supremum<R: Rng + ?Sized>(path: &GridPath, diffusion: f64, rng: &mut R) -> f64 {
    let s = diffusion * path.dt();
    path.values
        .windows(2)
        .map(|w| {
            let (a, b) = (w[0], w[1]);
            let u = 1.0 - rng.random::<f64>();
            0.5 * (a + b + ((a - b) * (a - b) - 2.0 * s * u.ln()).sqrt())
        })
        .fold(f64::NEG_INFINITY, f64::max)
}

/// `P(sup B > r) = exp(-2 r^2 / T)` for a standard bridge on `[0, T]` pinned
/// at zero at both ends.
pub fn bridge_max_law(r: f64, t: f64) -> Result<f64> {
    if !(r > 0.0) || !(t > 0.0) {
        return invalid(format!("bridge_max_law needs r > 0 and T > 0, got r={r}, T={t}"));
    }
    Ok((-2.0 * r * r / t).exp())
}

/// Upper bound on the probability that a unit-time bridge from `delta` to
/// `m` stays positive: `min(1, 4 (2/pi)^{1/2} (delta m)^{1/2})`.
pub fn stay_positive_upper_bound(delta: f64, m: f64) -> Result<f64> {
    if !(delta > 0.0) || !(m > 0.0) {
        return invalid(format!("stay-positive bound needs delta, M > 0, got {delta}, {m}"));
    }
    let b = 4.0 * (2.0 / std::f64::consts::PI).sqrt() * (delta * m).sqrt();
    Ok(b.min(1.0))
}

/// Largest oscillation `|f_i(s) - f_i(t)|` over lines `i` and grid pairs
/// with `|s - t| < r`.
pub fn modulus_of_continuity(paths: &[GridPath], r: f64) -> Result<f64> {
    let Some(first) = paths.first() else {
        return Ok(0.0);
    };
    if paths.iter().any(|p| !p.same_grid(first)) {
        return invalid("modulus_of_continuity: paths do not share a grid");
    }
    if !(r > 0.0) || r > first.t_end - first.t_start {
        return invalid(format!("modulus window r={r} outside (0, interval length]"));
    }
    let dt = first.dt();
    let m = first.m();
    let mut max_lag = 0;
    while max_lag < m && ((max_lag + 1) as f64) * dt < r {
        max_lag += 1;
    }
    let mut best = 0.0f64;
    for p in paths {
        let v = p.values();
        for lag in 1..=max_lag {
            for j in 0..=m - lag {
                best = best.max((v[j + lag] - v[j]).abs());
            }
        }
    }
    Ok(best)
}
