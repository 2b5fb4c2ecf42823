//! Shared helpers for statistical tests.

use statrs::distribution::{ChiSquared, ContinuousCDF};

/// Pearson chi-square p-value of observed counts against expected
/// probabilities (which must sum to 1).
pub fn chi_square_p(observed: &[u64], expected_probs: &[f64]) -> f64 {
    assert_eq!(observed.len(), expected_probs.len());
    let n: u64 = observed.iter().sum();
    let mut stat = 0.0;
    let mut df = 0.0;
    for (&o, &p) in observed.iter().zip(expected_probs) {
        let e = n as f64 * p;
        if e == 0.0 {
            assert_eq!(o, 0, "observed mass where expected probability is zero");
            continue;
        }
        stat += (o as f64 - e) * (o as f64 - e) / e;
        df += 1.0;
    }
    let dist = ChiSquared::new(df - 1.0).unwrap();
    1.0 - dist.cdf(stat)
}

pub fn uniform_probs(k: usize) -> Vec<f64> {
    vec![1.0 / k as f64; k]
}
