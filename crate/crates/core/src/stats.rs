//! Small statistical tests used by the experiments and their test suites.

use statrs::distribution::{Binomial, ChiSquared, ContinuousCDF, DiscreteCDF};

/// Binomial standard deviation of a frequency over `n` trials.
pub fn binomial_sigma(p: f64, n: u64) -> f64 {
    (p * (1.0 - p) / n as f64).sqrt()
}

/// `|k/n - p| <= z` binomial standard deviations.
pub fn within_sigma(successes: u64, n: u64, p: f64, z: f64) -> bool {
    let freq = successes as f64 / n as f64;
    (freq - p).abs() <= z * binomial_sigma(p, n)
}

/// Two-sided exact binomial p-value for `k` successes in `n` trials at rate `p`
/// (doubling the smaller tail, capped at 1).
pub fn binomial_two_sided_p(k: u64, n: u64, p: f64) -> f64 {
    let dist = Binomial::new(p, n).expect("valid binomial parameters");
    let lower = dist.cdf(k);
    let upper = if k == 0 { 1.0 } else { dist.sf(k - 1) };
    (2.0 * lower.min(upper)).min(1.0)
}

/// Pearson goodness-of-fit against a uniform distribution. Returns the p-value.
pub fn chi_square_uniform(counts: &[u64]) -> f64 {
    let total: u64 = counts.iter().sum();
    let expected = total as f64 / counts.len() as f64;
    let stat: f64 = counts.iter().map(|&c| (c as f64 - expected).powi(2) / expected).sum();
    chi_square_sf(stat, (counts.len() - 1) as f64)
}

/// Two-sample chi-square test of homogeneity over shared categories. Cells
/// empty in both samples are dropped. Returns the p-value.
pub fn chi_square_homogeneity(a: &[u64], b: &[u64]) -> f64 {
    assert_eq!(a.len(), b.len(), "category counts differ");
    let na: u64 = a.iter().sum();
    let nb: u64 = b.iter().sum();
    let n = (na + nb) as f64;
    let mut stat = 0.0;
    let mut cells = 0usize;
    for (&ca, &cb) in a.iter().zip(b) {
        let col = (ca + cb) as f64;
        if col == 0.0 {
            continue;
        }
        cells += 1;
        let ea = col * na as f64 / n;
        let eb = col * nb as f64 / n;
        stat += (ca as f64 - ea).powi(2) / ea + (cb as f64 - eb).powi(2) / eb;
    }
    if cells < 2 {
        return 1.0;
    }
    chi_square_sf(stat, (cells - 1) as f64)
}

fn chi_square_sf(stat: f64, dof: f64) -> f64 {
    ChiSquared::new(dof).expect("positive degrees of freedom").sf(stat)
}
