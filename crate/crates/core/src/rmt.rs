//! Tracy-Widom (GUE) reference samples from the tridiagonal beta = 2 model.
//!
//! The matrix has diagonal `N(0, 1)` and off-diagonal `chi_{2k} / sqrt(2)`
//! for `k = s-1, ..., 1`. Its spectrum fills `[-2 sqrt(s), 2 sqrt(s)]` and
//! `(lambda_max - 2 sqrt(s)) s^{1/6}` converges to the GUE Tracy-Widom law.

use rand::Rng;
use rand_distr::{ChiSquared, Distribution, StandardNormal};

use crate::error::{invalid, Result};
use crate::parallel::run_replicas;
use crate::rng::RngSeed;

/// Eigenvalues strictly below `x` of the symmetric tridiagonal matrix.
fn count_below(diag: &[f64], off: &[f64], x: f64) -> usize {
    let mut count = 0;
    let mut d = 1.0;
    for (i, &a) in diag.iter().enumerate() {
        let b2 = if i == 0 { 0.0 } else { off[i - 1] * off[i - 1] };
        d = a - x - if i == 0 { 0.0 } else { b2 / d };
        if d == 0.0 {
            d = -f64::EPSILON * (a.abs() + x.abs() + 1.0);
        }
        if d < 0.0 {
            count += 1;
        }
    }
    count
}

/// Largest eigenvalue by Sturm-sequence bisection inside the Gershgorin
/// bracket, to relative tolerance `1e-12`.
pub fn largest_eigenvalue_tridiagonal(diag: &[f64], off: &[f64]) -> Result<f64> {
    let n = diag.len();
    if n == 0 {
        return invalid("empty matrix");
    }
    if off.len() + 1 != n {
        return invalid(format!("off-diagonal needs {} entries, got {}", n - 1, off.len()));
    }
    if diag.iter().chain(off).any(|v| !v.is_finite()) {
        return invalid("matrix entries must be finite");
    }
    let radius = |i: usize| {
        let l = if i > 0 { off[i - 1].abs() } else { 0.0 };
        let r = if i + 1 < n { off[i].abs() } else { 0.0 };
        l + r
    };
    let mut lo = (0..n).map(|i| diag[i] - radius(i)).fold(f64::INFINITY, f64::min);
    let mut hi = (0..n).map(|i| diag[i] + radius(i)).fold(f64::NEG_INFINITY, f64::max);
    let scale = lo.abs().max(hi.abs()).max(f64::MIN_POSITIVE);
    while hi - lo > 1e-12 * scale {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if count_below(diag, off, mid) == n {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// One draw of the tridiagonal model of size `s`.
pub fn sample_tridiagonal<R: Rng + ?Sized>(s: usize, rng: &mut R) -> (Vec<f64>, Vec<f64>) {
    let diag = (0..s).map(|_| rng.sample::<f64, _>(StandardNormal)).collect();
    let off = (1..s)
        .rev()
        .map(|k| {
            let chi2 = ChiSquared::new(2.0 * k as f64).expect("positive degrees of freedom");
            (chi2.sample(rng) / 2.0).sqrt()
        })
        .collect();
    (diag, off)
}

/// Edge-rescaled largest eigenvalue for one matrix of size `s`.
pub fn scaled_top_eigenvalue<R: Rng + ?Sized>(s: usize, rng: &mut R) -> Result<f64> {
    if s < 2 {
        return invalid("matrix size must be at least 2");
    }
    let (diag, off) = sample_tridiagonal(s, rng);
    let top = largest_eigenvalue_tridiagonal(&diag, &off)?;
    let sf = s as f64;
    Ok((top - 2.0 * sf.sqrt()) * sf.powf(1.0 / 6.0))
}

/// `replicas` independent approximate GUE Tracy-Widom samples.
pub fn sample_tw_gue(s: usize, replicas: usize, seed: RngSeed, workers: usize) -> Result<Vec<f64>> {
    if s < 2 {
        return invalid("matrix size must be at least 2");
    }
    run_replicas(seed, replicas, workers, |_, rng| scaled_top_eigenvalue(s, rng))
        .into_iter()
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::DMatrix;

    #[test]
    fn matches_dense_eigensolver() {
        let mut rng = RngSeed::new(5, 0).rng();
        for s in [2usize, 3, 10, 40] {
            let (d, o) = sample_tridiagonal(s, &mut rng);
            let m = DMatrix::from_fn(s, s, |i, j| {
                if i == j {
                    d[i]
                } else if i + 1 == j {
                    o[i]
                } else if j + 1 == i {
                    o[j]
                } else {
                    0.0
                }
            });
            let dense = m.symmetric_eigenvalues().max();
            let bis = largest_eigenvalue_tridiagonal(&d, &o).unwrap();
            assert!((dense - bis).abs() < 1e-9 * dense.abs().max(1.0), "s={s}");
        }
    }

    #[test]
    fn rejects_bad_input() {
        assert!(largest_eigenvalue_tridiagonal(&[], &[]).is_err());
        assert!(largest_eigenvalue_tridiagonal(&[1.0, f64::NAN], &[0.0]).is_err());
        assert!(largest_eigenvalue_tridiagonal(&[1.0, 2.0], &[]).is_err());
        assert_eq!(largest_eigenvalue_tridiagonal(&[3.0], &[]).unwrap(), 3.0);
    }

    #[test]
    fn tracy_widom_moments() {
        // GUE Tracy-Widom: mean -1.7711, variance 0.8132.
        let xs = sample_tw_gue(400, 4000, RngSeed::new(9, 0), 1).unwrap();
        let (m, v) = crate::stats::mean_var(&xs);
        assert!((m + 1.771).abs() < 0.1, "mean {m}");
        assert!((v - 0.813).abs() < 0.1, "variance {v}");
    }
}
