//! Control of the false discovery proportion exceedance `P(FDP > gamma)`.
//!
//! A threshold family `t_1 <= ... <= t_m` defines nested procedures
//! `R_l = {i : p_i <= t_l}`; [`step_down_select`] picks the index `l_hat`.
//! The built-in families bound the `(floor(gamma l) + 1)`-FWER of `R_l`
//! through the count of true nulls below `t_l`, which is dominated by a
//! binomial with `n_l = m - l + floor(gamma (l - 1)) + 1` trials.

use crate::binomial::{binomial_quantile, survival};
use crate::error::{check_level, invalid, Error, Result};
use crate::family::{PValueFamily, RejectionSet};
use crate::numeric::{bisect_last_true, floor_guarded};

/// Absolute tolerance of the bisection that solves for `t^Q`.
pub const QUANTILE_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FdpParams {
    gamma: f64,
    alpha: f64,
    m: usize,
}

impl FdpParams {
    pub fn new(m: usize, gamma: f64, alpha: f64) -> Result<Self> {
        check_level("gamma", gamma)?;
        check_level("alpha", alpha)?;
        if m < 2 {
            return Err(invalid(format!("m must be at least 2, got {m}")));
        }
        Ok(Self { gamma, alpha, m })
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn m(&self) -> usize {
        self.m
    }

    /// Number of binomial trials `m - l + floor(gamma (l - 1)) + 1`.
    pub fn trials(&self, l: usize) -> u64 {
        let carried = floor_guarded(self.gamma * (l - 1) as f64) as usize;
        (self.m - l + carried + 1) as u64
    }

    /// Exceedance count `floor(gamma l) + 1`.
    pub fn exceedance(&self, l: usize) -> u64 {
        floor_guarded(self.gamma * l as f64) as u64 + 1
    }

    /// `q_l(t)`: the `(1 - alpha)`-quantile of `Binomial(trials(l), t)`.
    pub fn q(&self, l: usize, t: f64) -> u64 {
        binomial_quantile(self.trials(l), t, self.alpha)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ThresholdKind {
    LehmannRomano,
    Quantile,
    /// `max(t^LR, t^Ho, t^Be)`.
    QuantilePrime,
    Gavrilov,
    Custom,
}

/// A nondecreasing sequence `t_1 <= ... <= t_m` in `[0, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct ThresholdFamily {
    values: Vec<f64>,
    kind: ThresholdKind,
}

impl ThresholdFamily {
    pub fn new(values: Vec<f64>, kind: ThresholdKind) -> Result<Self> {
        if values.is_empty() {
            return Err(invalid("threshold family must be nonempty"));
        }
        for (i, &t) in values.iter().enumerate() {
            if !(0.0..=1.0).contains(&t) {
                return Err(invalid(format!("threshold t_{} = {t} outside [0, 1]", i + 1)));
            }
            if i > 0 && t < values[i - 1] {
                return Err(Error::NotMonotone {
                    rank: i + 1,
                    previous: values[i - 1],
                    current: t,
                });
            }
        }
        Ok(Self { values, kind })
    }

    pub fn kind(&self) -> ThresholdKind {
        self.kind
    }

    pub fn m(&self) -> usize {
        self.values.len()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// `t_l` for `l` in `0..=m`, with `t_0 = 0`.
    pub fn at(&self, l: usize) -> f64 {
        if l == 0 {
            0.0
        } else {
            self.values[l - 1]
        }
    }
}

pub fn lr_threshold(params: &FdpParams, l: usize) -> f64 {
    (params.alpha * params.exceedance(l) as f64 / params.trials(l) as f64).min(1.0)
}

/// Largest `t` with `P(Z >= floor(gamma l) + 1) <= alpha` for
/// `Z ~ Binomial(n_l, t)`; 1 when the exceedance exceeds `n_l`.
pub fn q_threshold(params: &FdpParams, l: usize) -> f64 {
    let n = params.trials(l);
    let j = params.exceedance(l);
    if j > n {
        return 1.0;
    }
    let feasible = |t: f64| survival(n, t, j as i64) <= params.alpha;
    // The Markov bound makes t^LR feasible. If the tail evaluates just above
    // alpha there, that is rounding at the boundary itself.
    let lr = lr_threshold(params, l);
    if !feasible(lr) {
        return lr;
    }
    bisect_last_true(lr, 1.0, QUANTILE_TOLERANCE, feasible)
}

pub fn hoeffding_threshold(params: &FdpParams, l: usize) -> f64 {
    let n = params.trials(l) as f64;
    let j = params.exceedance(l) as f64;
    (j / n - ((1.0 / params.alpha).ln() / (2.0 * n)).sqrt()).clamp(0.0, 1.0)
}

pub fn bennett_threshold(params: &FdpParams, l: usize) -> f64 {
    let n = params.trials(l) as f64;
    let j = params.exceedance(l) as f64;
    (j / n * h_inverse((1.0 / params.alpha).ln() / j)).min(1.0)
}

/// `h(u) = u - ln u - 1`, decreasing from `+inf` to 0 on `(0, 1]`.
pub fn h(u: f64) -> f64 {
    u - u.ln() - 1.0
}

/// Inverse of [`h`] on `(0, 1]`, for `y >= 0`.
pub fn h_inverse(y: f64) -> f64 {
    if y <= 0.0 {
        return 1.0;
    }
    // h(u) >= -ln u - 1, so h(u) > y for u < exp(-y - 1)
    let mut lo = (-y - 1.0).exp();
    let mut hi = 1.0;
    while lo > 0.0 && h(lo) < y {
        lo *= 0.5;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if h(mid) > y {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

fn build(params: &FdpParams, kind: ThresholdKind, f: impl Fn(&FdpParams, usize) -> f64) -> ThresholdFamily {
    let values = (1..=params.m).map(|l| f(params, l)).collect();
    ThresholdFamily::new(values, kind).expect("built-in threshold family is nondecreasing")
}

pub fn lr_thresholds(params: &FdpParams) -> ThresholdFamily {
    build(params, ThresholdKind::LehmannRomano, lr_threshold)
}

pub fn q_thresholds(params: &FdpParams) -> ThresholdFamily {
    build(params, ThresholdKind::Quantile, q_threshold)
}

pub fn hoeffding_bennett_thresholds(params: &FdpParams) -> ThresholdFamily {
    build(params, ThresholdKind::QuantilePrime, |p, l| {
        lr_threshold(p, l)
            .max(hoeffding_threshold(p, l))
            .max(bennett_threshold(p, l))
    })
}

/// `t_l = gamma l / (m - (1 - gamma) l + 1)`, for curve comparison only.
pub fn gavrilov_thresholds(m: usize, gamma: f64) -> Result<ThresholdFamily> {
    check_level("gamma", gamma)?;
    let values = (1..=m)
        .map(|l| {
            let l = l as f64;
            gamma * l / (m as f64 - (1.0 - gamma) * l + 1.0)
        })
        .collect();
    ThresholdFamily::new(values, ThresholdKind::Gavrilov)
}

/// The linear curve `gamma l / m`.
pub fn bh_curve(m: usize, gamma: f64) -> Result<ThresholdFamily> {
    check_level("gamma", gamma)?;
    let values = (1..=m).map(|l| gamma * l as f64 / m as f64).collect();
    ThresholdFamily::new(values, ThresholdKind::Custom)
}

fn check_size(thresholds: &ThresholdFamily, family: &PValueFamily) -> Result<()> {
    if thresholds.m() != family.m() {
        return Err(invalid(format!(
            "threshold family has {} entries for {} p-values",
            thresholds.m(),
            family.m()
        )));
    }
    Ok(())
}

fn rejection_at(thresholds: &ThresholdFamily, family: &PValueFamily, l: usize) -> RejectionSet {
    if l == 0 {
        RejectionSet::empty()
    } else {
        RejectionSet::at_threshold(family, thresholds.at(l))
    }
}

/// Step-down selection: `l_hat = max{l : |R_l'| >= l' for all l' <= l}`,
/// returning `R_{l_hat}`.
pub fn step_down_select(thresholds: &ThresholdFamily, family: &PValueFamily) -> Result<RejectionSet> {
    check_size(thresholds, family)?;
    let ordered = family.order();
    // |R_l| >= l  <=>  p_(l) <= t_l
    let l_hat = (1..=family.m())
        .take_while(|&l| ordered.at_rank(l) <= thresholds.at(l))
        .last()
        .unwrap_or(0);
    Ok(rejection_at(thresholds, family, l_hat))
}

/// Same selection via `l_tilde = min{l in 1..=m+1 : |R_l| <= l - 1}` with
/// `R_{m+1} = R_m`, returning `R_{l_tilde - 1}`.
pub fn step_down_select_first_failure(
    thresholds: &ThresholdFamily,
    family: &PValueFamily,
) -> Result<RejectionSet> {
    check_size(thresholds, family)?;
    let m = family.m();
    let size = |l: usize| family.count_at_most(thresholds.at(l.min(m)));
    let l_tilde = (1..=m + 1)
        .find(|&l| size(l) < l)
        .expect("|R_(m+1)| <= m");
    Ok(rejection_at(thresholds, family, l_tilde - 1))
}

/// Lehmann-Romano step-down procedure.
pub fn lehmann_romano(family: &PValueFamily, gamma: f64, alpha: f64) -> Result<RejectionSet> {
    let params = FdpParams::new(family.m(), gamma, alpha)?;
    step_down_select(&lr_thresholds(&params), family)
}

/// Quantile-binomial procedure through its threshold family `t^Q`.
/// With `alpha = 1/2` this is the median-binomial procedure.
pub fn quantile_binomial(family: &PValueFamily, gamma: f64, alpha: f64) -> Result<RejectionSet> {
    let params = FdpParams::new(family.m(), gamma, alpha)?;
    step_down_select(&q_thresholds(&params), family)
}

/// Quantile-binomial procedure by direct recursion over the ordered
/// p-values: stop at the first `l` with `q_l(p_(l)) > gamma l` and reject
/// the `l - 1` smallest.
pub fn quantile_binomial_recursive(
    family: &PValueFamily,
    gamma: f64,
    alpha: f64,
) -> Result<RejectionSet> {
    let params = FdpParams::new(family.m(), gamma, alpha)?;
    let ordered = family.order();
    let m = family.m();
    let stop = (1..=m)
        .find(|&l| params.q(l, ordered.at_rank(l)) as i64 > floor_guarded(gamma * l as f64))
        .unwrap_or(m + 1);
    let indices = (1..stop).map(|r| ordered.index_at_rank(r)).collect();
    Ok(RejectionSet::from_indices(indices))
}

/// `k_hat = min{k in 1..=m+1 : gamma |S_k| < k - gamma}` for nested sets
/// with sizes `|S_1| <= ... <= |S_m| <= m` and `S_{m+1} = S_m`.
pub fn romano_wolf_select(sizes: &[usize], gamma: f64) -> Result<usize> {
    check_level("gamma", gamma)?;
    let m = sizes.len();
    if m == 0 {
        return Err(invalid("sizes must be nonempty"));
    }
    for (i, w) in sizes.windows(2).enumerate() {
        if w[1] < w[0] {
            return Err(Error::NotMonotone {
                rank: i + 2,
                previous: w[0] as f64,
                current: w[1] as f64,
            });
        }
    }
    if sizes[m - 1] > m {
        return Err(invalid(format!("set sizes cannot exceed m = {m}")));
    }
    let size = |k: usize| sizes[k.min(m) - 1];
    // gamma |S_k| < k - gamma  <=>  gamma (|S_k| + 1) < k, k an integer
    Ok((1..=m + 1)
        .find(|&k| floor_guarded(gamma * (size(k) + 1) as f64) < k as i64)
        .expect("gamma (m + 1) < m + 1"))
}
