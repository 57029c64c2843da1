//! FDR-controlling step-up procedures.
//!
//! Every procedure here is a step-up scan over nondecreasing critical values
//! `c_1 <= ... <= c_m`: with `k_hat = max{k : p_(k) <= c_k}` (zero if none),
//! the hypotheses with `p_i <= c_{k_hat}` are rejected.

use crate::error::{check_level, invalid, Result};
use crate::family::{OrderedPValues, PValueFamily, RejectionSet};
use crate::numeric::ceil_guarded;

/// Relative slack used in [`is_self_consistent`] to absorb rounding in the
/// products `t * m` and `count * alpha`.
const SELF_CONSISTENCY_SLACK: f64 = 4.0 * f64::EPSILON;

/// Largest rank `k` with `p_(k) <= critical(k)`, scanning `k = m, ..., 1`.
/// Returns 0 if no rank qualifies.
pub fn step_up_rank(ordered: &OrderedPValues, critical: impl Fn(usize) -> f64) -> usize {
    (1..=ordered.m())
        .rev()
        .find(|&k| ordered.at_rank(k) <= critical(k))
        .unwrap_or(0)
}

/// Runs the step-up scan and turns the selected rank into a rejection set.
pub fn step_up(family: &PValueFamily, critical: impl Fn(usize) -> f64) -> RejectionSet {
    let ordered = family.order();
    let k_hat = step_up_rank(&ordered, &critical);
    if k_hat == 0 {
        return RejectionSet::empty();
    }
    RejectionSet::at_threshold(family, critical(k_hat))
}

/// `t` is self-consistent at level `alpha` when `G(p, t) >= t / alpha`.
pub fn is_self_consistent(t: f64, family: &PValueFamily, alpha: f64) -> bool {
    let count = family.count_at_most(t) as f64;
    // count / m >= t / alpha, cross-multiplied
    count * alpha >= t * family.m() as f64 * (1.0 - SELF_CONSISTENCY_SLACK)
}

/// Benjamini-Hochberg linear step-up: threshold `alpha k_hat / m` with
/// `k_hat = max{k : p_(k) <= alpha k / m}`.
pub fn linear_step_up(family: &PValueFamily, alpha: f64) -> Result<RejectionSet> {
    check_level("alpha", alpha)?;
    let m = family.m() as f64;
    Ok(step_up(family, |k| alpha * k as f64 / m))
}

/// The same threshold computed as `max{u : G(p, u) >= u / alpha}`, searching
/// the candidate thresholds `alpha k / m` through the empirical c.d.f.
pub fn linear_step_up_via_ecdf(family: &PValueFamily, alpha: f64) -> Result<RejectionSet> {
    check_level("alpha", alpha)?;
    let m = family.m();
    for k in (1..=m).rev() {
        let u = alpha * k as f64 / m as f64;
        // G(u) >= u / alpha  <=>  #{p_i <= u} >= k
        if family.count_at_most(u) >= k {
            return Ok(RejectionSet::at_threshold(family, u));
        }
    }
    Ok(RejectionSet::empty())
}

/// Estimators of `1 / pi0` plugged into the adaptive step-up procedure.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Pi0Estimator {
    /// `m (1 - lambda) / (#{p_i > lambda} + 1)`.
    Storey { lambda: f64 },
    /// `m (1 - p_(k0)) / (m - k0 + 1)`.
    Quantile { k0: usize },
    Constant { value: f64 },
}

impl Pi0Estimator {
    pub fn validate(&self, m: usize) -> Result<()> {
        match *self {
            Pi0Estimator::Storey { lambda } => check_level("lambda", lambda),
            Pi0Estimator::Quantile { k0 } if (1..=m).contains(&k0) => Ok(()),
            Pi0Estimator::Quantile { k0 } => {
                Err(invalid(format!("k0 must lie in 1..={m}, got {k0}")))
            }
            Pi0Estimator::Constant { value } if value >= 0.0 && value.is_finite() => Ok(()),
            Pi0Estimator::Constant { value } => {
                Err(invalid(format!("constant estimator must be finite and >= 0, got {value}")))
            }
        }
    }

    pub fn evaluate(&self, family: &PValueFamily) -> Result<f64> {
        self.validate(family.m())?;
        Ok(match *self {
            Pi0Estimator::Storey { lambda } => storey_estimator(family, lambda)?,
            Pi0Estimator::Quantile { k0 } => quantile_estimator(family, k0)?,
            Pi0Estimator::Constant { value } => value,
        })
    }
}

pub fn storey_estimator(family: &PValueFamily, lambda: f64) -> Result<f64> {
    check_level("lambda", lambda)?;
    let above = family.values().iter().filter(|&&p| p > lambda).count();
    Ok(family.m() as f64 * (1.0 - lambda) / (above as f64 + 1.0))
}

pub fn quantile_estimator(family: &PValueFamily, k0: usize) -> Result<f64> {
    let m = family.m();
    if !(1..=m).contains(&k0) {
        return Err(invalid(format!("k0 must lie in 1..={m}, got {k0}")));
    }
    let p_k0 = family.order().at_rank(k0);
    Ok(m as f64 * (1.0 - p_k0) / (m - k0 + 1) as f64)
}

/// Plug-in adaptive linear step-up at effective level `alpha * f(p)`, with
/// critical values capped at 1.
pub fn adaptive_step_up(
    family: &PValueFamily,
    alpha: f64,
    estimator: Pi0Estimator,
) -> Result<RejectionSet> {
    check_level("alpha", alpha)?;
    let level = alpha * estimator.evaluate(family)?;
    let m = family.m() as f64;
    Ok(step_up(family, |k| (level * k as f64 / m).min(1.0)))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CurveKind {
    /// `r(t) = (1 + 1/m) t / (t + alpha (1 - alpha))` for `t <= alpha`.
    BlanchardRoquain,
    /// Asymptotically optimal rejection curve `r(t) = t / (alpha + t (1 - alpha))`.
    Aorc,
}

/// A rejection curve `r_alpha` for one-stage adaptive step-up procedures.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RejectionCurve {
    pub kind: CurveKind,
    pub alpha: f64,
}

impl RejectionCurve {
    pub fn new(kind: CurveKind, alpha: f64) -> Result<Self> {
        check_level("alpha", alpha)?;
        Ok(Self { kind, alpha })
    }

    /// `r_alpha(t)`; `+inf` outside the curve's domain.
    pub fn evaluate(&self, t: f64, m: usize) -> f64 {
        let a = self.alpha;
        match self.kind {
            CurveKind::BlanchardRoquain if t <= a => {
                (1.0 + 1.0 / m as f64) * t / (t + a * (1.0 - a))
            }
            CurveKind::BlanchardRoquain => f64::INFINITY,
            CurveKind::Aorc => t / (a + t * (1.0 - a)),
        }
    }

    /// `c_k = sup{t : r_alpha(t) <= k / m}`, capped at 1.
    pub fn critical_value(&self, k: usize, m: usize) -> f64 {
        let a = self.alpha;
        let (k, mf) = (k as f64, m as f64);
        match self.kind {
            CurveKind::BlanchardRoquain => a.min(a * k * (1.0 - a) / (mf + 1.0 - k)),
            // (m - k) + k alpha keeps c_m exactly 1
            CurveKind::Aorc => (k * a / ((mf - k) + k * a)).min(1.0),
        }
    }
}

/// Machine-readable diagnostics attached to a procedure's output.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Warning {
    /// The AORC critical value at `k = m` equals 1, so every hypothesis is
    /// rejected regardless of the data.
    AorcDegenerate,
}

impl Warning {
    pub fn code(&self) -> &'static str {
        match self {
            Warning::AorcDegenerate => "aorc_degenerate",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct OneStageOutcome {
    pub rejections: RejectionSet,
    pub warning: Option<Warning>,
}

/// One-stage adaptive step-up with critical values read off a rejection curve.
pub fn one_stage_step_up(family: &PValueFamily, curve: RejectionCurve) -> OneStageOutcome {
    let m = family.m();
    let rejections = step_up(family, |k| curve.critical_value(k, m));
    let warning = (curve.kind == CurveKind::Aorc && rejections.len() == m)
        .then_some(Warning::AorcDegenerate);
    OneStageOutcome {
        rejections,
        warning,
    }
}

/// Nonnegative weights `nu_1, ..., nu_m` summing to one that define the
/// reshaping function `beta(alpha k / m) = sum_{j <= k} (alpha j / m) nu_j`.
#[derive(Debug, Clone, PartialEq)]
pub struct BetaWeights {
    weights: Vec<f64>,
}

impl BetaWeights {
    pub const SUM_TOLERANCE: f64 = 1e-9;

    pub fn new(weights: Vec<f64>) -> Result<Self> {
        if weights.is_empty() {
            return Err(invalid("beta weights must be nonempty"));
        }
        if let Some(w) = weights.iter().find(|&&w| !(w >= 0.0) || !w.is_finite()) {
            return Err(invalid(format!("beta weights must be finite and nonnegative, got {w}")));
        }
        let sum: f64 = weights.iter().sum();
        if (sum - 1.0).abs() > Self::SUM_TOLERANCE {
            return Err(invalid(format!("beta weights sum to {sum}, expected 1")));
        }
        Ok(Self { weights })
    }

    /// `nu_i = 1 / (i delta)` with `delta = 1 + 1/2 + ... + 1/m`.
    pub fn benjamini_yekutieli(m: usize) -> Self {
        let delta = harmonic(m);
        Self {
            weights: (1..=m).map(|i| 1.0 / (i as f64 * delta)).collect(),
        }
    }

    /// All mass on rank `rank` (1-based).
    pub fn point_mass(m: usize, rank: usize) -> Result<Self> {
        if !(1..=m).contains(&rank) {
            return Err(invalid(format!("point-mass rank must lie in 1..={m}")));
        }
        let mut weights = vec![0.0; m];
        weights[rank - 1] = 1.0;
        Ok(Self { weights })
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// `beta(alpha k / m)` for `k = 0..=m`.
    pub fn reshaped_critical_values(&self, alpha: f64) -> Vec<f64> {
        let m = self.weights.len() as f64;
        let mut out = Vec::with_capacity(self.weights.len() + 1);
        let mut acc = 0.0;
        out.push(0.0);
        for (j, &nu) in self.weights.iter().enumerate() {
            acc += alpha * (j + 1) as f64 / m * nu;
            out.push(acc);
        }
        out
    }
}

fn harmonic(m: usize) -> f64 {
    (1..=m).map(|i| 1.0 / i as f64).sum()
}

/// Step-up procedure under arbitrary dependence using a reshaping function
/// `beta`: `k_hat = max{k : p_(k) <= beta(alpha k / m)}`.
pub fn beta_step_up(family: &PValueFamily, alpha: f64, weights: &BetaWeights) -> Result<RejectionSet> {
    check_level("alpha", alpha)?;
    if weights.len() != family.m() {
        return Err(invalid(format!(
            "expected {} beta weights, got {}",
            family.m(),
            weights.len()
        )));
    }
    let critical = weights.reshaped_critical_values(alpha);
    Ok(step_up(family, |k| critical[k]))
}

/// Benjamini-Yekutieli: the linear step-up at level `alpha / delta`.
pub fn benjamini_yekutieli(family: &PValueFamily, alpha: f64) -> Result<RejectionSet> {
    beta_step_up(family, alpha, &BetaWeights::benjamini_yekutieli(family.m()))
}

/// Aggregated global p-value `min(p_(ceil(gamma m)) / gamma, 1)`, valid under
/// arbitrary dependence when all p-values test the same null.
pub fn aggregate_pvalues(family: &PValueFamily, gamma: f64) -> Result<f64> {
    if !(gamma > 0.0 && gamma <= 1.0) {
        return Err(invalid(format!("gamma must lie in (0, 1], got {gamma}")));
    }
    let m = family.m();
    let rank = (ceil_guarded(gamma * m as f64).max(1) as usize).min(m);
    Ok((family.order().at_rank(rank) / gamma).min(1.0))
}
