//! Last passage percolation with geometric weights on nearest-neighbour
//! paths `x(0) = 0, x(i) - x(i-1) = ±1`.
//!
//! Site `(i, j)` with `1 <= i <= n`, `|j| <= i` and `j ≡ i (mod 2)` carries an
//! i.i.d. weight with `P[w = m] = (1 - q) q^m`. A path of `n` steps ending at
//! `y` is an up-right path across the `((n+y)/2, (n-y)/2)` rectangle, so the
//! KPZ scaling is written in the half-diagonal `tau = n/2` and the
//! displacement `u = y/2`:
//!
//! `L(n, y) ≈ c1 tau + c2 tau^{1/3} H(c3 u tau^{-2/3})`.

use rand::Rng;

use crate::error::{invalid, Result};
use crate::stats::survival_exponent;

/// Inversion sampler: `floor(ln U / ln q)` with `U` uniform on `(0, 1]`.
pub fn sample_geometric<R: Rng + ?Sized>(ln_q: f64, rng: &mut R) -> u32 {
    let u = 1.0 - rng.random::<f64>();
    (u.ln() / ln_q) as u32
}

fn check_q(q: f64) -> Result<()> {
    if !(q > 0.0 && q < 1.0) {
        return invalid(format!("geometric parameter q must lie in (0, 1), got {q}"));
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq)]
pub struct LppField {
    q: f64,
    /// `rows[i - 1][k]` is the weight at `(i, -i + 2k)`.
    rows: Vec<Vec<u32>>,
}

impl LppField {
    pub fn sample<R: Rng + ?Sized>(n: usize, q: f64, rng: &mut R) -> Result<Self> {
        check_q(q)?;
        let ln_q = q.ln();
        let rows = (1..=n)
            .map(|i| (0..=i).map(|_| sample_geometric(ln_q, rng)).collect())
            .collect();
        Ok(Self { q, rows })
    }

    pub fn from_rows(q: f64, rows: Vec<Vec<u32>>) -> Result<Self> {
        check_q(q)?;
        if let Some(i) = rows.iter().enumerate().position(|(i, r)| r.len() != i + 2) {
            return invalid(format!("row {} must hold {} weights", i + 1, i + 2));
        }
        Ok(Self { q, rows })
    }

    pub fn n(&self) -> usize {
        self.rows.len()
    }

    pub fn q(&self) -> f64 {
        self.q
    }

    /// Weight at `(i, j)`; `None` off the lattice.
    pub fn weight(&self, i: usize, j: i64) -> Option<u32> {
        let ii = i as i64;
        if i == 0 || i > self.n() || j.abs() > ii || (j + ii) % 2 != 0 {
            return None;
        }
        Some(self.rows[i - 1][((j + ii) / 2) as usize])
    }
}

/// `L(n, y)` for every reachable endpoint `y = -n, -n+2, ..., n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PassageProfile {
    n: usize,
    values: Vec<i64>,
}

impl PassageProfile {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn values(&self) -> &[i64] {
        &self.values
    }

    pub fn endpoints(&self) -> impl Iterator<Item = i64> + '_ {
        let n = self.n as i64;
        (0..self.values.len()).map(move |k| -n + 2 * k as i64)
    }

    pub fn at(&self, y: i64) -> Option<i64> {
        let n = self.n as i64;
        if y.abs() > n || (y + n) % 2 != 0 {
            return None;
        }
        Some(self.values[((y + n) / 2) as usize])
    }
}

fn advance(prev: &[i64], next: &mut Vec<i64>, weight: impl FnMut(usize) -> u32) {
    let i = prev.len();
    let mut weight = weight;
    next.clear();
    for k in 0..=i {
        let left = if k >= 1 { prev[k - 1] } else { i64::MIN };
        let right = if k < i { prev[k] } else { i64::MIN };
        next.push(left.max(right) + weight(k) as i64);
    }
}

/// Point-to-point passage times by the recursion
/// `L(i, j) = w(i, j) + max(L(i-1, j-1), L(i-1, j+1))`, `L(0, 0) = 0`.
pub fn passage_profile(field: &LppField) -> PassageProfile {
    let mut prev = vec![0i64];
    let mut next = Vec::new();
    for row in &field.rows {
        advance(&prev, &mut next, |k| row[k]);
        std::mem::swap(&mut prev, &mut next);
    }
    PassageProfile {
        n: field.n(),
        values: prev,
    }
}

/// Samples weights on the fly with rolling rows; `O(n)` memory.
pub fn sample_passage_profile<R: Rng + ?Sized>(n: usize, q: f64, rng: &mut R) -> Result<PassageProfile> {
    check_q(q)?;
    let ln_q = q.ln();
    let mut prev = Vec::with_capacity(n + 1);
    prev.push(0i64);
    let mut next = Vec::with_capacity(n + 1);
    for _ in 0..n {
        advance(&prev, &mut next, |_| sample_geometric(ln_q, rng));
        std::mem::swap(&mut prev, &mut next);
    }
    Ok(PassageProfile { n, values: prev })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScalingConstants {
    pub c1: f64,
    pub c2: f64,
    pub c3: f64,
}

impl ScalingConstants {
    /// `c1 = 2 sqrt(q) / (1 - sqrt(q))`,
    /// `c2 = q^{1/6} (1 + sqrt(q))^{1/3} / (1 - sqrt(q))`,
    /// `c3 = c2 (1 - sqrt(q)) / (1 + sqrt(q))`.
    pub fn new(q: f64) -> Result<Self> {
        check_q(q)?;
        let s = q.sqrt();
        let c1 = 2.0 * s / (1.0 - s);
        let c2 = q.powf(1.0 / 6.0) * (1.0 + s).cbrt() / (1.0 - s);
        let c3 = c2 * (1.0 - s) / (1.0 + s);
        Ok(Self { c1, c2, c3 })
    }
}

pub fn scaling_constants(q: f64) -> Result<ScalingConstants> {
    ScalingConstants::new(q)
}

/// Samples `(t, H_n(t))` of the rescaled profile, increasing in `t`; linear
/// in between.
#[derive(Debug, Clone, PartialEq)]
pub struct RescaledProfile {
    points: Vec<(f64, f64)>,
}

impl RescaledProfile {
    pub fn points(&self) -> &[(f64, f64)] {
        &self.points
    }

    pub fn eval(&self, t: f64) -> f64 {
        let p = &self.points;
        if p.len() == 1 || t <= p[0].0 {
            return p[0].1;
        }
        let k = p.partition_point(|x| x.0 < t);
        if k >= p.len() {
            return p[p.len() - 1].1;
        }
        let (t0, h0) = p[k - 1];
        let (t1, h1) = p[k];
        h0 + (h1 - h0) * (t - t0) / (t1 - t0)
    }
}

fn half_diagonal(n: usize) -> Result<f64> {
    if n == 0 {
        return invalid("profile needs n >= 1");
    }
    Ok(n as f64 / 2.0)
}

pub fn rescale_profile(profile: &PassageProfile, q: f64) -> Result<RescaledProfile> {
    let c = ScalingConstants::new(q)?;
    let tau = half_diagonal(profile.n)?;
    let horiz = c.c3 * tau.powf(-2.0 / 3.0) / 2.0;
    let vert = c.c2 * tau.cbrt();
    let points = profile
        .endpoints()
        .zip(&profile.values)
        .map(|(y, &l)| (horiz * y as f64, (l as f64 - c.c1 * tau) / vert))
        .collect();
    Ok(RescaledProfile { points })
}

/// Inverse of [`rescale_profile`]: the passage times at the profile points.
pub fn unrescale_profile(rescaled: &RescaledProfile, n: usize, q: f64) -> Result<Vec<f64>> {
    let c = ScalingConstants::new(q)?;
    let tau = half_diagonal(n)?;
    let vert = c.c2 * tau.cbrt();
    Ok(rescaled.points.iter().map(|&(_, h)| c.c1 * tau + vert * h).collect())
}

/// Index and location of the leftmost global maximiser.
pub fn endpoint_index(profile: &RescaledProfile) -> (usize, f64) {
    let mut best = 0;
    for (k, p) in profile.points.iter().enumerate() {
        if p.1 > profile.points[best].1 {
            best = k;
        }
    }
    (best, profile.points[best].0)
}

/// `inf{u : sup_{t <= u} H_n(t) = sup H_n}`. The interpolated maximum is
/// attained at a sample point, so the leftmost maximising sample is exact.
pub fn endpoint(profile: &RescaledProfile) -> f64 {
    endpoint_index(profile).1
}

/// One LPP replica summarised for the one-point and endpoint experiments.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LppSample {
    pub l_n_0: i64,
    pub h_n_0: f64,
    /// Lattice displacement `y` of the leftmost maximiser of `L(n, .)`.
    pub k_n: i64,
    /// The same location on the rescaled axis.
    pub k_hat: f64,
}

pub fn simulate<R: Rng + ?Sized>(n: usize, q: f64, rng: &mut R) -> Result<LppSample> {
    if !n.is_multiple_of(2) {
        return invalid("n must be even so that y = 0 is reachable");
    }
    let profile = sample_passage_profile(n, q, rng)?;
    summarize(&profile, q)
}

pub fn summarize(profile: &PassageProfile, q: f64) -> Result<LppSample> {
    let l_n_0 = profile
        .at(0)
        .ok_or_else(|| crate::Error::InvalidArgument("y = 0 unreachable for odd n".into()))?;
    let rescaled = rescale_profile(profile, q)?;
    let (idx, k_hat) = endpoint_index(&rescaled);
    Ok(LppSample {
        l_n_0,
        h_n_0: rescaled.points[profile.n / 2].1,
        k_n: -(profile.n as i64) + 2 * idx as i64,
        k_hat,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct TailReport {
    /// `(x, P(|K| >= x))`.
    pub survival: Vec<(f64, f64)>,
    /// Fitted `a` in `P(|K| >= x) ~ exp(-c x^a)` over `S in [1e-3, 1e-1]`;
    /// `None` when the tail has too little mass to fit.
    pub exponent: Option<f64>,
}

pub fn endpoint_tail_report(samples: &[f64], xs: &[f64]) -> Result<TailReport> {
    if samples.is_empty() {
        return invalid("tail report needs samples");
    }
    let n = samples.len() as f64;
    let survival = xs
        .iter()
        .map(|&x| (x, samples.iter().filter(|s| s.abs() >= x).count() as f64 / n))
        .collect();
    Ok(TailReport {
        survival,
        exponent: survival_exponent(samples, 1e-3, 1e-1),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::RngSeed;

    #[test]
    fn constants_at_quarter() {
        let c = scaling_constants(0.25).unwrap();
        assert!((c.c1 - 2.0).abs() < 1e-12);
        // q^{1/6} (1 + sqrt q)^{1/3} / (1 - sqrt q) = 2 (3/4)^{1/3}
        assert!((c.c2 - 2.0 * 0.75f64.cbrt()).abs() < 1e-12);
        assert!((c.c3 - c.c2 / 3.0).abs() < 1e-12);
        assert!(scaling_constants(1e-12).unwrap().c1 < 1e-5);
        assert!(scaling_constants(0.0).is_err());
        assert!(scaling_constants(1.0).is_err());
    }

    #[test]
    fn single_step_profile() {
        let f = LppField::from_rows(0.5, vec![vec![4, 7]]).unwrap();
        let p = passage_profile(&f);
        assert_eq!((p.at(-1), p.at(1)), (Some(4), Some(7)));
    }

    #[test]
    fn two_step_profile() {
        let f = LppField::from_rows(0.5, vec![vec![3, 0], vec![0, 1, 5]]).unwrap();
        let p = passage_profile(&f);
        assert_eq!(p.values(), &[3, 4, 5]);
        assert_eq!(f.weight(2, 0), Some(1));
        assert_eq!(f.weight(2, 1), None);
    }

    #[test]
    fn geometric_pmf() {
        let q: f64 = 0.5;
        let mut rng = RngSeed::new(1, 0).rng();
        let reps = 200_000;
        let mut counts = [0usize; 6];
        for _ in 0..reps {
            let w = sample_geometric(q.ln(), &mut rng) as usize;
            if w < 6 {
                counts[w] += 1;
            }
        }
        for (m, &c) in counts.iter().enumerate() {
            let p = (1.0 - q) * q.powi(m as i32);
            let se = (p * (1.0 - p) / reps as f64).sqrt();
            assert!((c as f64 / reps as f64 - p).abs() < 4.0 * se, "m={m}");
        }
    }

    #[test]
    fn rescale_examples() {
        let q = 0.5;
        let c = scaling_constants(q).unwrap();
        let n = 64usize;
        let tau = 32.0f64;
        let mut values = vec![0i64; n + 1];
        values[n / 2] = (c.c1 * tau).round() as i64;
        let p = PassageProfile { n, values };
        let r = rescale_profile(&p, q).unwrap();
        let h0 = r.points()[n / 2].1;
        let want = ((c.c1 * tau).round() - c.c1 * tau) / (c.c2 * tau.cbrt());
        assert!((h0 - want).abs() < 1e-12);
        assert_eq!(r.points()[n / 2].0, 0.0);
        let back = unrescale_profile(&r, n, q).unwrap();
        for (b, v) in back.iter().zip(p.values()) {
            assert!((b - *v as f64).abs() < 1e-9);
        }
    }

    #[test]
    fn endpoint_examples() {
        let r = RescaledProfile {
            points: vec![(-1.0, 0.0), (0.0, 2.0), (1.0, 1.0)],
        };
        assert_eq!(endpoint(&r), 0.0);
        let plateau = RescaledProfile {
            points: vec![(-1.0, 0.0), (0.0, 2.0), (1.0, 2.0)],
        };
        assert_eq!(endpoint(&plateau), 0.0);
    }

    #[test]
    fn tail_report_zero_samples() {
        let r = endpoint_tail_report(&[0.0; 2000], &[0.5, 1.0]).unwrap();
        assert!(r.survival.iter().all(|&(_, s)| s == 0.0));
        assert!(r.exponent.is_none());
    }

    #[test]
    fn rolling_and_stored_profiles_agree() {
        // Same stream consumed in the same order.
        let seed = RngSeed::new(3, 0);
        let f = LppField::sample(40, 0.3, &mut seed.rng()).unwrap();
        let rolled = sample_passage_profile(40, 0.3, &mut seed.rng()).unwrap();
        assert_eq!(passage_profile(&f), rolled);
    }
}
