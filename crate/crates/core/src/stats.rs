//! Goodness-of-fit helpers for the statistical checks.

use statrs::distribution::{ChiSquared, ContinuousCDF};

/// Upper-tail probability of a chi-square statistic.
pub fn chi_square_p(stat: f64, dof: usize) -> f64 {
    if dof == 0 {
        return 1.0;
    }
    let dist = ChiSquared::new(dof as f64).expect("positive degrees of freedom");
    1.0 - dist.cdf(stat)
}

/// Pearson test of `counts` against the uniform distribution over its bins.
pub fn uniformity_p(counts: &[u64]) -> f64 {
    let total: u64 = counts.iter().sum();
    if total == 0 || counts.len() < 2 {
        return 1.0;
    }
    let expected = total as f64 / counts.len() as f64;
    let stat = counts.iter().map(|&c| (c as f64 - expected).powi(2) / expected).sum();
    chi_square_p(stat, counts.len() - 1)
}

/// Two-sample chi-square test that `a` and `b` come from one distribution.
/// Bins empty in both samples are dropped.
pub fn homogeneity_p(a: &[u64], b: &[u64]) -> f64 {
    assert_eq!(a.len(), b.len(), "samples need the same bins");
    let (na, nb) = (a.iter().sum::<u64>() as f64, b.iter().sum::<u64>() as f64);
    let n = na + nb;
    let mut stat = 0.0;
    let mut bins = 0;
    for (&x, &y) in a.iter().zip(b) {
        let col = (x + y) as f64;
        if col == 0.0 {
            continue;
        }
        bins += 1;
        for (obs, row) in [(x as f64, na), (y as f64, nb)] {
            let exp = row * col / n;
            stat += (obs - exp).powi(2) / exp;
        }
    }
    chi_square_p(stat, bins.max(1) - 1)
}

/// Fraction of true values.
pub fn ones_fraction<I: IntoIterator<Item = bool>>(bits: I) -> f64 {
    let (mut ones, mut total) = (0u64, 0u64);
    for b in bits {
        ones += u64::from(b);
        total += 1;
    }
    if total == 0 {
        0.0
    } else {
        ones as f64 / total as f64
    }
}

/// Histogram of `values` (each below `range`) over `bins` equal-width bins.
pub fn histogram(values: impl IntoIterator<Item = u64>, range: u64, bins: usize) -> Vec<u64> {
    let mut counts = vec![0u64; bins];
    for v in values {
        let i = (u128::from(v) * bins as u128 / u128::from(range)) as usize;
        counts[i.min(bins - 1)] += 1;
    }
    counts
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn known_tail_values() {
        // P(chi2_1 > 3.841) = 0.05, P(chi2_10 > 23.209) = 0.01
        assert!((chi_square_p(3.841, 1) - 0.05).abs() < 1e-3);
        assert!((chi_square_p(23.209, 10) - 0.01).abs() < 1e-4);
    }

    #[test]
    fn uniform_and_skewed_counts() {
        assert!(uniformity_p(&[100, 100, 100, 100]) > 0.99);
        assert!(uniformity_p(&[400, 0, 0, 0]) < 1e-6);
        assert!(homogeneity_p(&[50, 50, 0], &[500, 500, 0]) > 0.99);
        assert!(homogeneity_p(&[90, 10], &[10, 90]) < 1e-6);
    }

    #[test]
    fn histogram_bins() {
        assert_eq!(histogram([0, 1, 2, 3, 9], 10, 2), vec![4, 1]);
        assert_eq!(ones_fraction([true, false, true, true]), 0.75);
    }
}
