//! A uniform handle over every procedure in the crate.
//!
//! [`Procedure::prepare`] precomputes the parts that depend only on `m`
//! (threshold families, reshaping weights), so Monte Carlo loops pay for
//! them once.

use crate::error::{invalid, Result};
use crate::family::{PValueFamily, RejectionSet};
use crate::fdp::{self, FdpParams, ThresholdFamily};
use crate::kfwer;
use crate::stepup::{self, BetaWeights, Pi0Estimator, RejectionCurve, Warning};

#[derive(Debug, Clone, PartialEq)]
pub enum Procedure {
    RejectNothing,
    Uncorrected { alpha: f64 },
    Bonferroni { alpha: f64 },
    BenjaminiHochberg { alpha: f64 },
    BenjaminiYekutieli { alpha: f64 },
    Adaptive { alpha: f64, estimator: Pi0Estimator },
    OneStage { curve: RejectionCurve },
    Beta { alpha: f64, weights: BetaWeights },
    Holm { alpha: f64 },
    GeneralizedHolm { alpha: f64, k: usize },
    LehmannRomano { alpha: f64, gamma: f64 },
    QuantileBinomial { alpha: f64, gamma: f64 },
}

impl Procedure {
    /// Stable identifier used in CLI flags and output records.
    pub fn id(&self) -> &'static str {
        match self {
            Procedure::RejectNothing => "reject-nothing",
            Procedure::Uncorrected { .. } => "uncorrected",
            Procedure::Bonferroni { .. } => "bonferroni",
            Procedure::BenjaminiHochberg { .. } => "bh",
            Procedure::BenjaminiYekutieli { .. } => "by",
            Procedure::Adaptive { .. } => "adaptive",
            Procedure::OneStage { .. } => "one-stage",
            Procedure::Beta { .. } => "beta",
            Procedure::Holm { .. } => "holm",
            Procedure::GeneralizedHolm { .. } => "generalized-holm",
            Procedure::LehmannRomano { .. } => "lehmann-romano",
            Procedure::QuantileBinomial { .. } => "quantile-binomial",
        }
    }

    pub fn prepare(&self, m: usize) -> Result<PreparedProcedure> {
        if m < 2 {
            return Err(invalid(format!("m must be at least 2, got {m}")));
        }
        let plan = match self {
            Procedure::LehmannRomano { alpha, gamma } => {
                Plan::StepDown(fdp::lr_thresholds(&FdpParams::new(m, *gamma, *alpha)?))
            }
            Procedure::QuantileBinomial { alpha, gamma } => {
                Plan::StepDown(fdp::q_thresholds(&FdpParams::new(m, *gamma, *alpha)?))
            }
            Procedure::Beta { weights, .. } if weights.len() != m => {
                return Err(invalid(format!(
                    "expected {m} beta weights, got {}",
                    weights.len()
                )))
            }
            Procedure::GeneralizedHolm { k, .. } if !(1..=m).contains(k) => {
                return Err(invalid(format!("k must lie in 1..={m}, got {k}")))
            }
            Procedure::Adaptive { estimator, .. } => {
                estimator.validate(m)?;
                Plan::Direct
            }
            _ => Plan::Direct,
        };
        if let Plan::Direct = plan {
            // surface parameter errors at preparation time
            self.apply_direct(&PValueFamily::new(vec![1.0; m])?)?;
        }
        Ok(PreparedProcedure {
            procedure: self.clone(),
            m,
            plan,
        })
    }

    /// Runs the procedure once, without caching.
    pub fn apply(&self, family: &PValueFamily) -> Result<Outcome> {
        self.prepare(family.m())?.apply(family)
    }

    fn apply_direct(&self, family: &PValueFamily) -> Result<Outcome> {
        let m = family.m() as f64;
        let rejections = match self {
            Procedure::RejectNothing => RejectionSet::empty(),
            Procedure::Uncorrected { alpha } => {
                crate::error::check_level("alpha", *alpha)?;
                RejectionSet::at_threshold(family, *alpha)
            }
            Procedure::Bonferroni { alpha } => {
                crate::error::check_level("alpha", *alpha)?;
                RejectionSet::at_threshold(family, alpha / m)
            }
            Procedure::BenjaminiHochberg { alpha } => stepup::linear_step_up(family, *alpha)?,
            Procedure::BenjaminiYekutieli { alpha } => stepup::benjamini_yekutieli(family, *alpha)?,
            Procedure::Adaptive { alpha, estimator } => {
                stepup::adaptive_step_up(family, *alpha, *estimator)?
            }
            Procedure::OneStage { curve } => {
                let out = stepup::one_stage_step_up(family, *curve);
                return Ok(Outcome {
                    rejections: out.rejections,
                    warning: out.warning,
                });
            }
            Procedure::Beta { alpha, weights } => stepup::beta_step_up(family, *alpha, weights)?,
            Procedure::Holm { alpha } => kfwer::holm(family, *alpha)?,
            Procedure::GeneralizedHolm { alpha, k } => kfwer::generalized_holm(family, *alpha, *k)?,
            Procedure::LehmannRomano { alpha, gamma } => fdp::lehmann_romano(family, *gamma, *alpha)?,
            Procedure::QuantileBinomial { alpha, gamma } => {
                fdp::quantile_binomial(family, *gamma, *alpha)?
            }
        };
        Ok(Outcome {
            rejections,
            warning: None,
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub rejections: RejectionSet,
    pub warning: Option<Warning>,
}

#[derive(Debug, Clone)]
enum Plan {
    Direct,
    StepDown(ThresholdFamily),
}

/// A procedure bound to a number of hypotheses `m`.
#[derive(Debug, Clone)]
pub struct PreparedProcedure {
    procedure: Procedure,
    m: usize,
    plan: Plan,
}

impl PreparedProcedure {
    pub fn procedure(&self) -> &Procedure {
        &self.procedure
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn apply(&self, family: &PValueFamily) -> Result<Outcome> {
        if family.m() != self.m {
            return Err(invalid(format!(
                "procedure prepared for m = {}, got {} p-values",
                self.m,
                family.m()
            )));
        }
        match &self.plan {
            Plan::Direct => self.procedure.apply_direct(family),
            Plan::StepDown(thresholds) => Ok(Outcome {
                rejections: fdp::step_down_select(thresholds, family)?,
                warning: None,
            }),
        }
    }

    pub fn rejections(&self, family: &PValueFamily) -> Result<RejectionSet> {
        Ok(self.apply(family)?.rejections)
    }
}
