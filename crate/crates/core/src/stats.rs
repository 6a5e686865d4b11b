//! Empirical-distribution utilities used by the experiments and tests.

use rand::Rng;
use statrs::distribution::{ContinuousCDF, Normal};

use crate::error::{invalid, Result};

/// Right-continuous empirical CDF.
#[derive(Debug, Clone)]
pub struct Ecdf {
    sorted: Vec<f64>,
}

impl Ecdf {
    pub fn new(samples: &[f64]) -> Result<Self> {
        if samples.is_empty() {
            return invalid("ecdf of an empty sample");
        }
        if samples.iter().any(|x| x.is_nan()) {
            return invalid("ecdf sample contains NaN");
        }
        let mut sorted = samples.to_vec();
        sorted.sort_by(f64::total_cmp);
        Ok(Self { sorted })
    }

    /// Fraction of samples `<= x`.
    pub fn eval(&self, x: f64) -> f64 {
        self.sorted.partition_point(|&s| s <= x) as f64 / self.sorted.len() as f64
    }

    pub fn len(&self) -> usize {
        self.sorted.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sorted.is_empty()
    }

    pub fn sorted(&self) -> &[f64] {
        &self.sorted
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KsResult {
    pub statistic: f64,
    /// Asymptotic Kolmogorov p-value with the effective-sample-size
    /// correction `lambda = (sqrt(ne) + 0.12 + 0.11 / sqrt(ne)) * D`.
    pub p_value: f64,
}

/// Two-sample Kolmogorov-Smirnov test.
pub fn ks_two_sample(a: &[f64], b: &[f64]) -> Result<KsResult> {
    let ea = Ecdf::new(a)?;
    let eb = Ecdf::new(b)?;
    let statistic = ks_statistic_sorted(ea.sorted(), eb.sorted());
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let ne = na * nb / (na + nb);
    let sq = ne.sqrt();
    let p_value = kolmogorov_q((sq + 0.12 + 0.11 / sq) * statistic);
    Ok(KsResult { statistic, p_value })
}

fn ks_statistic_sorted(a: &[f64], b: &[f64]) -> f64 {
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let (mut i, mut j) = (0, 0);
    let mut d = 0.0f64;
    while i < a.len() && j < b.len() {
        let x = a[i].min(b[j]);
        while i < a.len() && a[i] <= x {
            i += 1;
        }
        while j < b.len() && b[j] <= x {
            j += 1;
        }
        d = d.max((i as f64 / na - j as f64 / nb).abs());
    }
    d
}

/// Survival function of the Kolmogorov distribution.
pub fn kolmogorov_q(lambda: f64) -> f64 {
    if lambda < 0.2 {
        return 1.0;
    }
    let mut sum = 0.0;
    let mut sign = 1.0;
    for k in 1..=100 {
        let term = (-2.0 * (k * k) as f64 * lambda * lambda).exp();
        sum += sign * term;
        if term < 1e-16 {
            break;
        }
        sign = -sign;
    }
    (2.0 * sum).clamp(0.0, 1.0)
}

/// Sup distance between an ECDF and a reference CDF.
pub fn ks_one_sample(samples: &[f64], cdf: impl Fn(f64) -> f64) -> Result<f64> {
    let e = Ecdf::new(samples)?;
    let n = e.len() as f64;
    Ok(e.sorted()
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = cdf(x);
            (f - i as f64 / n).abs().max(((i + 1) as f64 / n - f).abs())
        })
        .fold(0.0, f64::max))
}

fn normal_quantile(p: f64) -> f64 {
    Normal::new(0.0, 1.0).expect("standard normal").inverse_cdf(p)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub fn contains(&self, x: f64) -> bool {
        self.lo <= x && x <= self.hi
    }
}

/// Wilson score interval for a binomial proportion.
pub fn binom_ci(successes: u64, trials: u64, level: f64) -> Result<Interval> {
    if trials == 0 {
        return invalid("binomial interval with zero trials");
    }
    if successes > trials {
        return invalid("more successes than trials");
    }
    if !(level > 0.0 && level < 1.0) {
        return invalid(format!("confidence level {level} outside (0,1)"));
    }
    let z = normal_quantile(0.5 + level / 2.0);
    let n = trials as f64;
    let p = successes as f64 / n;
    let denom = 1.0 + z * z / n;
    let centre = (p + z * z / (2.0 * n)) / denom;
    let half = z * (p * (1.0 - p) / n + z * z / (4.0 * n * n)).sqrt() / denom;
    Ok(Interval {
        lo: (centre - half).max(0.0),
        hi: (centre + half).min(1.0),
    })
}

/// Percentile bootstrap interval for the mean.
pub fn bootstrap_mean_ci<R: Rng + ?Sized>(
    samples: &[f64],
    resamples: usize,
    level: f64,
    rng: &mut R,
) -> Result<Interval> {
    if samples.is_empty() || resamples == 0 {
        return invalid("bootstrap needs samples and at least one resample");
    }
    if !(level > 0.0 && level < 1.0) {
        return invalid(format!("confidence level {level} outside (0,1)"));
    }
    let n = samples.len();
    let mut means: Vec<f64> = (0..resamples)
        .map(|_| (0..n).map(|_| samples[rng.random_range(0..n)]).sum::<f64>() / n as f64)
        .collect();
    means.sort_by(f64::total_cmp);
    let idx = |q: f64| ((q * (resamples - 1) as f64).round() as usize).min(resamples - 1);
    let alpha = (1.0 - level) / 2.0;
    Ok(Interval {
        lo: means[idx(alpha)],
        hi: means[idx(1.0 - alpha)],
    })
}

/// Counts per bin over `[lo, hi)`; values outside are dropped.
pub fn histogram(samples: &[f64], lo: f64, hi: f64, bins: usize) -> Result<Vec<usize>> {
    if bins == 0 || !(hi > lo) {
        return invalid("histogram needs bins >= 1 and hi > lo");
    }
    let mut counts = vec![0; bins];
    let w = (hi - lo) / bins as f64;
    for &x in samples {
        if x >= lo && x < hi {
            counts[(((x - lo) / w) as usize).min(bins - 1)] += 1;
        }
    }
    Ok(counts)
}

/// Sample mean and unbiased variance.
pub fn mean_var(samples: &[f64]) -> (f64, f64) {
    let n = samples.len() as f64;
    let mean = samples.iter().sum::<f64>() / n;
    let var = if samples.len() > 1 {
        samples.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0)
    } else {
        0.0
    };
    (mean, var)
}

/// A Monte Carlo proportion with its binomial standard error.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Proportion {
    pub successes: u64,
    pub trials: u64,
}

impl Proportion {
    pub fn estimate(&self) -> f64 {
        self.successes as f64 / self.trials as f64
    }

    pub fn stderr(&self) -> f64 {
        let p = self.estimate();
        (p * (1.0 - p) / self.trials as f64).sqrt()
    }

    /// Order-independent merge of two tallies.
    pub fn merge(self, other: Proportion) -> Proportion {
        Proportion {
            successes: self.successes + other.successes,
            trials: self.trials + other.trials,
        }
    }
}

/// Fits the exponent `a` in `S(x) ~ exp(-c x^a)` from samples of a
/// non-negative variable: least-squares slope of `log(-log S)` against
/// `log x` over the order statistics whose empirical survival lies in
/// `[s_lo, s_hi]`. Returns `None` with fewer than five usable points.
pub fn survival_exponent(samples: &[f64], s_lo: f64, s_hi: f64) -> Option<f64> {
    let mut xs: Vec<f64> = samples.iter().map(|x| x.abs()).collect();
    xs.sort_by(f64::total_cmp);
    let n = xs.len() as f64;
    let mut pts = Vec::new();
    for (i, &x) in xs.iter().enumerate() {
        // Empirical P(X >= x) at the i-th order statistic.
        let s = (xs.len() - i) as f64 / n;
        if x > 0.0 && s >= s_lo && s <= s_hi && s < 1.0 {
            pts.push((x.ln(), (-s.ln()).ln()));
        }
    }
    if pts.len() < 5 {
        return None;
    }
    let k = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / k;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / k;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    if sxx <= 0.0 {
        return None;
    }
    Some(sxy / sxx)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::RngSeed;
    use rand::Rng;

    #[test]
    fn ecdf_examples() {
        let e = Ecdf::new(&[1.0, 2.0, 3.0]).unwrap();
        assert!((e.eval(2.0) - 2.0 / 3.0).abs() < 1e-15);
        assert_eq!(e.eval(0.5), 0.0);
        assert_eq!(e.eval(3.0), 1.0);
        assert!(Ecdf::new(&[]).is_err());
    }

    #[test]
    fn ks_identical_samples() {
        let x = [0.3, 1.0, -2.0, 5.0];
        let r = ks_two_sample(&x, &x).unwrap();
        assert_eq!(r.statistic, 0.0);
        assert_eq!(r.p_value, 1.0);
        assert!(ks_two_sample(&[], &x).is_err());
    }

    fn brute_ks(a: &[f64], b: &[f64]) -> f64 {
        let cdf = |s: &[f64], x: f64| s.iter().filter(|&&v| v <= x).count() as f64 / s.len() as f64;
        a.iter()
            .chain(b)
            .map(|&x| (cdf(a, x) - cdf(b, x)).abs())
            .fold(0.0, f64::max)
    }

    #[test]
    fn ks_matches_brute_force() {
        let mut rng = RngSeed::new(2, 0).rng();
        for _ in 0..200 {
            let na = rng.random_range(1..30);
            let nb = rng.random_range(1..30);
            // Coarse values so ties occur.
            let a: Vec<f64> = (0..na).map(|_| rng.random_range(0..10) as f64).collect();
            let b: Vec<f64> = (0..nb).map(|_| rng.random_range(0..12) as f64 * 0.9).collect();
            let fast = ks_two_sample(&a, &b).unwrap().statistic;
            assert!((fast - brute_ks(&a, &b)).abs() < 1e-12);
        }
    }

    #[test]
    fn kolmogorov_tail_values() {
        // Classical critical values: Q(1.36) ~ 0.049, Q(1.63) ~ 0.0098.
        assert!((kolmogorov_q(1.36) - 0.0494).abs() < 1e-3);
        assert!((kolmogorov_q(1.63) - 0.0098).abs() < 5e-4);
        assert_eq!(kolmogorov_q(0.0), 1.0);
    }

    #[test]
    fn wilson_interval() {
        let ci = binom_ci(50, 100, 0.95).unwrap();
        assert!(ci.contains(0.5));
        assert!((ci.lo - 0.4038).abs() < 1e-3, "{ci:?}");
        let zero = binom_ci(0, 100, 0.95).unwrap();
        assert_eq!(zero.lo, 0.0);
        assert!(binom_ci(1, 0, 0.95).is_err());
    }

    #[test]
    fn bootstrap_covers_mean() {
        let mut rng = RngSeed::new(4, 0).rng();
        let xs: Vec<f64> = (0..500).map(|_| rng.random::<f64>()).collect();
        let ci = bootstrap_mean_ci(&xs, 500, 0.99, &mut rng).unwrap();
        assert!(ci.contains(0.5), "{ci:?}");
    }

    #[test]
    fn histogram_counts() {
        let h = histogram(&[0.0, 0.1, 0.5, 0.99, 1.0, -0.1], 0.0, 1.0, 2).unwrap();
        assert_eq!(h, vec![2, 2]);
    }

    #[test]
    fn survival_exponent_recovers_cubic_decay() {
        let mut rng = RngSeed::new(6, 0).rng();
        // P(X >= x) = exp(-x^3) by inversion.
        let xs: Vec<f64> = (0..20_000)
            .map(|_| (-(1.0 - rng.random::<f64>()).ln()).cbrt())
            .collect();
        let a = survival_exponent(&xs, 1e-3, 1e-1).unwrap();
        assert!((a - 3.0).abs() < 0.3, "{a}");
        assert!(survival_exponent(&[0.0; 100], 1e-3, 1e-1).is_none());
    }
}
