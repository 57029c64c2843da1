//! Binomial tail probabilities and quantiles.

use libm::lgamma;

fn ln_pmf(n: u64, t: f64, k: u64) -> f64 {
    let (nf, kf) = (n as f64, k as f64);
    lgamma(nf + 1.0) - lgamma(kf + 1.0) - lgamma(nf - kf + 1.0)
        + kf * t.ln()
        + (nf - kf) * (-t).ln_1p()
}

/// `P(Z >= j)` for `Z ~ Binomial(n, t)`.
///
/// The smaller tail is summed directly, starting from its boundary term and
/// walking outward with the pmf ratio recurrence.
pub fn survival(n: u64, t: f64, j: i64) -> f64 {
    if j <= 0 {
        return 1.0;
    }
    let j = j as u64;
    if j > n || t <= 0.0 {
        return 0.0;
    }
    if t >= 1.0 {
        return 1.0;
    }
    let odds = t / (1.0 - t);
    if j as f64 > n as f64 * t {
        // upper tail k = j..=n
        let mut term = ln_pmf(n, t, j).exp();
        let mut sum = term;
        for k in j..n {
            term *= (n - k) as f64 / (k + 1) as f64 * odds;
            sum += term;
            if term <= sum * 1e-17 {
                break;
            }
        }
        sum.min(1.0)
    } else {
        // lower tail k = 0..j, complemented
        let mut k = j - 1;
        let mut term = ln_pmf(n, t, k).exp();
        let mut sum = term;
        while k > 0 {
            term *= k as f64 / ((n - k + 1) as f64 * odds);
            sum += term;
            k -= 1;
            if term <= sum * 1e-17 {
                break;
            }
        }
        (1.0 - sum).max(0.0)
    }
}

/// `P(Z <= j)` for `Z ~ Binomial(n, t)`.
pub fn cdf(n: u64, t: f64, j: i64) -> f64 {
    1.0 - survival(n, t, j + 1)
}

/// The `(1 - alpha)`-quantile of `Binomial(n, t)`:
/// `min{j in 0..=n : P(Z <= j) >= 1 - alpha}`, evaluated as
/// `min{j : P(Z >= j + 1) <= alpha}`.
pub fn binomial_quantile(n: u64, t: f64, alpha: f64) -> u64 {
    let (mut lo, mut hi) = (0u64, n);
    while lo < hi {
        let mid = lo + (hi - lo) / 2;
        if survival(n, t, mid as i64 + 1) <= alpha {
            hi = mid;
        } else {
            lo = mid + 1;
        }
    }
    lo
}

#[cfg(test)]
mod tests {
    use super::*;
    use statrs::distribution::{Binomial, DiscreteCDF};

    /// Exact pmf by direct multiplication, for small n.
    fn pmf_table(n: u64, t: f64) -> Vec<f64> {
        (0..=n)
            .map(|k| {
                let mut c = 1.0;
                for i in 0..k {
                    c *= (n - i) as f64 / (i + 1) as f64;
                }
                c * t.powi(k as i32) * (1.0 - t).powi((n - k) as i32)
            })
            .collect()
    }

    #[test]
    fn quantile_examples() {
        assert_eq!(binomial_quantile(4, 0.5, 0.5), 2);
        assert_eq!(binomial_quantile(4, 0.1, 0.5), 0);
        assert_eq!(binomial_quantile(7, 0.0, 0.05), 0);
        assert_eq!(binomial_quantile(7, 1.0, 0.05), 7);
        assert_eq!(binomial_quantile(0, 0.3, 0.05), 0);
    }

    #[test]
    fn survival_matches_pmf_summation() {
        for n in 0..=50u64 {
            for &t in &[1e-6, 0.01, 0.1, 0.25, 0.5, 0.73, 0.9, 0.999] {
                let pmf = pmf_table(n, t);
                for j in 0..=n as i64 + 1 {
                    let want: f64 = pmf.iter().skip(j.max(0) as usize).sum();
                    let got = survival(n, t, j);
                    assert!(
                        (got - want).abs() <= 1e-13 + 1e-11 * want,
                        "n={n} t={t} j={j}: {got} vs {want}"
                    );
                }
            }
        }
    }

    #[test]
    fn survival_matches_statrs_for_large_n() {
        for &n in &[100u64, 500, 2000] {
            let mut rng = 0.123f64;
            for _ in 0..40 {
                rng = (rng * 9301.0 + 0.49297).fract();
                let t = rng;
                let dist = Binomial::new(t, n).unwrap();
                for j in [1, n / 10, n / 3, n / 2, (n as f64 * t) as u64, n - 1, n] {
                    let j = j.max(1);
                    let want = dist.sf(j - 1);
                    let got = survival(n, t, j as i64);
                    assert!(
                        (got - want).abs() <= 1e-12 + 1e-9 * want,
                        "n={n} t={t} j={j}: {got} vs {want}"
                    );
                }
            }
        }
    }

    #[test]
    fn tiny_upper_tail_keeps_relative_accuracy() {
        // P(Z >= 10) for Z ~ Bin(10, 0.01) is exactly 1e-20.
        let got = survival(10, 0.01, 10);
        assert!((got / 1e-20 - 1.0).abs() < 1e-12);
    }

    #[test]
    fn quantile_bracketing_against_cumulative_pmf() {
        for n in 0..=50u64 {
            for &t in &[0.0, 0.02, 0.1, 0.33, 0.5, 0.8, 1.0] {
                let pmf = pmf_table(n, t);
                for &alpha in &[0.01, 0.05, 0.2, 0.5, 0.9] {
                    let q = binomial_quantile(n, t, alpha) as usize;
                    let upto = |j: usize| pmf[..=j].iter().sum::<f64>();
                    assert!(upto(q) >= 1.0 - alpha - 1e-12);
                    if q > 0 {
                        assert!(upto(q - 1) < 1.0 - alpha + 1e-12);
                    }
                }
            }
        }
    }

    #[test]
    fn quantile_monotone_in_t_and_n() {
        for &alpha in &[0.05, 0.5] {
            for n in 0..60u64 {
                let mut prev = 0;
                for i in 0..=200 {
                    let t = i as f64 / 200.0;
                    let q = binomial_quantile(n, t, alpha);
                    assert!(q >= prev);
                    assert!(binomial_quantile(n + 1, t, alpha) >= q);
                    prev = q;
                }
            }
        }
    }
}
