//! Least concave majorants of grid curves and the stopping domain they
//! induce.

use crate::bridge::GridPath;
use crate::error::{invalid, Result};

/// Continuous piecewise-linear function through `breakpoints`, strictly
/// increasing in time.
#[derive(Debug, Clone, PartialEq)]
pub struct PiecewiseLinear {
    breakpoints: Vec<(f64, f64)>,
}

impl PiecewiseLinear {
    pub fn new(breakpoints: Vec<(f64, f64)>) -> Result<Self> {
        if breakpoints.len() < 2 {
            return invalid("piecewise-linear function needs two breakpoints");
        }
        if breakpoints.windows(2).any(|w| !(w[0].0 < w[1].0)) {
            return invalid("breakpoint times must increase strictly");
        }
        Ok(Self { breakpoints })
    }

    pub fn breakpoints(&self) -> &[(f64, f64)] {
        &self.breakpoints
    }

    pub fn slopes(&self) -> impl Iterator<Item = f64> + '_ {
        self.breakpoints
            .windows(2)
            .map(|w| (w[1].1 - w[0].1) / (w[1].0 - w[0].0))
    }

    pub fn start(&self) -> f64 {
        self.breakpoints[0].0
    }

    pub fn end(&self) -> f64 {
        self.breakpoints[self.breakpoints.len() - 1].0
    }

    /// Value at `t`, clamped to the end values outside the domain.
    pub fn eval(&self, t: f64) -> f64 {
        let bp = &self.breakpoints;
        if t <= bp[0].0 {
            return bp[0].1;
        }
        let k = bp.partition_point(|p| p.0 < t);
        if k >= bp.len() {
            return bp[bp.len() - 1].1;
        }
        let (t0, v0) = bp[k - 1];
        let (t1, v1) = bp[k];
        v0 + (v1 - v0) * (t - t0) / (t1 - t0)
    }

    pub fn is_concave(&self) -> bool {
        let s: Vec<f64> = self.slopes().collect();
        s.windows(2).all(|w| w[1] <= w[0] + 1e-12 * (1.0 + w[0].abs()))
    }
}

/// Upper hull of the points `(t_j, v_j)`, by a single monotone scan.
/// Collinear middle points are dropped.
pub fn upper_hull(points: &[(f64, f64)]) -> Vec<(f64, f64)> {
    let mut hull: Vec<(f64, f64)> = Vec::with_capacity(points.len());
    for &p in points {
        while hull.len() >= 2 {
            let (o, a) = (hull[hull.len() - 2], hull[hull.len() - 1]);
            let cross = (a.0 - o.0) * (p.1 - o.1) - (a.1 - o.1) * (p.0 - o.0);
            if cross >= 0.0 {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push(p);
    }
    hull
}

pub fn least_concave_majorant(path: &GridPath) -> PiecewiseLinear {
    let pts: Vec<(f64, f64)> = path
        .values()
        .iter()
        .enumerate()
        .map(|(j, &v)| (path.time(j), v))
        .collect();
    PiecewiseLinear {
        breakpoints: upper_hull(&pts),
    }
}

/// Largest absolute segment slope, i.e. the Lipschitz constant.
pub fn majorant_slope_bound(maj: &PiecewiseLinear) -> f64 {
    maj.slopes().map(f64::abs).fold(0.0, f64::max)
}

/// `(l, r)` with `l = inf{t : c'_+(t) <= K}` and `r = sup{t : c'_+(t) >= -K}`,
/// where `c` is the least concave majorant of `path` on its interval
/// `[-T, T]`-style domain `[t_start, t_end]`. Empty sets follow the
/// conventions `inf = t_end`, `sup = t_start`. The right derivative at the
/// last point is the incoming slope.
pub fn stopping_domain(path: &GridPath, k: f64) -> Result<(f64, f64)> {
    if !(k > 0.0) {
        return invalid(format!("slope bound K must be positive, got {k}"));
    }
    Ok(stopping_domain_of(&least_concave_majorant(path), k))
}

pub fn stopping_domain_of(maj: &PiecewiseLinear, k: f64) -> (f64, f64) {
    let bp = maj.breakpoints();
    let slopes: Vec<f64> = maj.slopes().collect();
    let left = slopes.iter().position(|&s| s <= k).map_or(maj.end(), |j| bp[j].0);
    let right = slopes
        .iter()
        .rposition(|&s| s >= -k)
        .map_or(maj.start(), |j| bp[j + 1].0);
    (left, right)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::RngSeed;
    use rand::Rng;

    fn path(vals: &[f64]) -> GridPath {
        GridPath::new(0.0, (vals.len() - 1) as f64, vals.to_vec()).unwrap()
    }

    #[test]
    fn three_point_peak() {
        let maj = least_concave_majorant(&path(&[0.0, 2.0, 0.0]));
        assert_eq!(maj.breakpoints().len(), 3);
        assert_eq!(maj.eval(0.5), 1.0);
    }

    #[test]
    fn collinear_keeps_endpoints() {
        let maj = least_concave_majorant(&path(&[0.0, 1.0, 2.0, 3.0]));
        assert_eq!(maj.breakpoints(), &[(0.0, 0.0), (3.0, 3.0)]);
    }

    #[test]
    fn slope_bound_examples() {
        assert_eq!(majorant_slope_bound(&least_concave_majorant(&path(&[1.0; 5]))), 0.0);
        let tent = PiecewiseLinear::new(vec![(-1.0, 0.0), (0.0, 3.0), (1.0, 0.0)]).unwrap();
        assert_eq!(majorant_slope_bound(&tent), 3.0);
    }

    #[test]
    fn slope_bound_is_max_difference_quotient() {
        let mut rng = RngSeed::new(1, 0).rng();
        for _ in 0..200 {
            let vals: Vec<f64> = (0..15).map(|_| rng.random_range(-3.0..3.0)).collect();
            let maj = least_concave_majorant(&path(&vals));
            let bp = maj.breakpoints();
            let mut brute = 0.0f64;
            for i in 0..bp.len() {
                for j in i + 1..bp.len() {
                    brute = brute.max(((bp[j].1 - bp[i].1) / (bp[j].0 - bp[i].0)).abs());
                }
            }
            assert!((majorant_slope_bound(&maj) - brute).abs() < 1e-12);
        }
    }

    #[test]
    fn flat_majorant_gives_full_domain() {
        let p = GridPath::from_fn(-2.0, 2.0, 40, |t| 0.1 * t.sin()).unwrap();
        assert_eq!(stopping_domain(&p, 1.0).unwrap(), (-2.0, 2.0));
    }

    #[test]
    fn steep_tent_collapses_to_peak() {
        let (t, k) = (2.0, 1.5);
        let p = GridPath::from_fn(-t, t, 8, |s| 2.0 * k * (t - s.abs())).unwrap();
        let (l, r) = stopping_domain(&p, k).unwrap();
        assert!(l.abs() < 1e-12 && r.abs() < 1e-12, "{l} {r}");
    }

    #[test]
    fn empty_sets_use_conventions() {
        // Everywhere steeper than K upward: l = T, r = T.
        let up = GridPath::from_fn(-1.0, 1.0, 4, |s| 5.0 * s).unwrap();
        assert_eq!(stopping_domain(&up, 1.0).unwrap(), (1.0, 1.0));
        // Everywhere steeper than K downward: l = -T, r = -T.
        let down = GridPath::from_fn(-1.0, 1.0, 4, |s| -5.0 * s).unwrap();
        assert_eq!(stopping_domain(&down, 1.0).unwrap(), (-1.0, -1.0));
        assert!(stopping_domain(&down, 0.0).is_err());
    }

    #[test]
    fn idempotent() {
        let mut rng = RngSeed::new(2, 0).rng();
        let vals: Vec<f64> = (0..30).map(|_| rng.random_range(-1.0..1.0)).collect();
        let p = path(&vals);
        let maj = least_concave_majorant(&p);
        let again = least_concave_majorant(&GridPath::from_fn(0.0, 29.0, 29, |t| maj.eval(t)).unwrap());
        for (j, v) in vals.iter().enumerate() {
            let t = j as f64;
            assert!((again.eval(t) - maj.eval(t)).abs() < 1e-12);
            assert!(maj.eval(t) >= v - 1e-12);
        }
        assert!(maj.is_concave());
    }
}
