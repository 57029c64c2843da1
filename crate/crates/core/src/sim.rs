//! Reproducible data generators and Monte Carlo error-rate estimation.
//!
//! Replicate `r` draws from its own ChaCha8 stream `(seed, r)`, so replicates
//! are independent of each other and of scheduling. Per-replicate statistics
//! are collected and reduced in index order, which makes every estimate
//! bit-identical between sequential and parallel execution.

use crate::error::{check_level, invalid, Result};
use crate::family::{false_discovery_proportion, false_rejections, GroundTruth, PValueFamily, RejectionSet};
use crate::numeric::normal_upper_tail;
use crate::stepup::Pi0Estimator;
use rand::distr::Open01;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// How replicates are scheduled. `Parallel` runs sequentially when the crate
/// is built without the `parallel` feature.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Execution {
    Sequential,
    #[default]
    Parallel,
}

/// The random stream of replicate `replicate` under `seed`.
pub fn replicate_rng(seed: u64, replicate: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(replicate);
    rng
}

/// Evaluates `f(r)` for `r = 0..n`, in replicate order.
pub fn run_replicates<T, F>(n: u64, execution: Execution, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(u64) -> T + Sync + Send,
{
    match execution {
        #[cfg(feature = "parallel")]
        Execution::Parallel => (0..n).into_par_iter().map(f).collect(),
        _ => (0..n).map(f).collect(),
    }
}

/// Equi-correlated one-sided Gaussian model. The first `m0` coordinates are
/// true nulls with mean 0; the others have mean `tau`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussianModel {
    pub m: usize,
    pub m0: usize,
    pub rho: f64,
    pub tau: f64,
    pub seed: u64,
}

impl GaussianModel {
    pub fn new(m: usize, m0: usize, rho: f64, tau: f64, seed: u64) -> Result<Self> {
        if m < 2 {
            return Err(invalid(format!("m must be at least 2, got {m}")));
        }
        if m0 > m {
            return Err(invalid(format!("m0 = {m0} exceeds m = {m}")));
        }
        if !(0.0..1.0).contains(&rho) {
            return Err(invalid(format!("rho must lie in [0, 1), got {rho}")));
        }
        if !(tau > 0.0 && tau.is_finite()) {
            return Err(invalid(format!("tau must be positive and finite, got {tau}")));
        }
        Ok(Self { m, m0, rho, tau, seed })
    }

    /// The statistics `X_i = sqrt(rho) W + sqrt(1 - rho) Z_i + mu_i`.
    pub fn statistics(&self, replicate: u64) -> Vec<f64> {
        let mut rng = replicate_rng(self.seed, replicate);
        let w: f64 = rng.sample(StandardNormal);
        let shared = self.rho.sqrt() * w;
        let own = (1.0 - self.rho).sqrt();
        (0..self.m)
            .map(|i| {
                let z: f64 = rng.sample(StandardNormal);
                let mu = if i < self.m0 { 0.0 } else { self.tau };
                shared + own * z + mu
            })
            .collect()
    }
}

pub fn gen_gaussian(model: &GaussianModel, replicate: u64) -> (PValueFamily, GroundTruth) {
    let p = model
        .statistics(replicate)
        .into_iter()
        .map(normal_upper_tail)
        .collect();
    (
        PValueFamily::new(p).expect("normal tails lie in [0, 1]"),
        GroundTruth::leading_nulls(model.m, model.m0),
    )
}

/// Null p-values i.i.d. uniform on (0, 1) in the first `m0` coordinates,
/// alternative p-values exactly 0.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DiracUniformModel {
    pub m: usize,
    pub m0: usize,
    pub seed: u64,
}

impl DiracUniformModel {
    pub fn new(m: usize, m0: usize, seed: u64) -> Result<Self> {
        if m < 2 {
            return Err(invalid(format!("m must be at least 2, got {m}")));
        }
        if m0 > m {
            return Err(invalid(format!("m0 = {m0} exceeds m = {m}")));
        }
        Ok(Self { m, m0, seed })
    }
}

pub fn gen_dirac_uniform(model: &DiracUniformModel, replicate: u64) -> (PValueFamily, GroundTruth) {
    let mut rng = replicate_rng(model.seed, replicate);
    let p = (0..model.m)
        .map(|i| if i < model.m0 { rng.sample(Open01) } else { 0.0 })
        .collect();
    (
        PValueFamily::new(p).expect("uniforms lie in (0, 1)"),
        GroundTruth::leading_nulls(model.m, model.m0),
    )
}

/// A source of labelled p-value families, one per replicate.
pub trait Generator: Sync {
    fn generate(&self, replicate: u64) -> (PValueFamily, GroundTruth);
}

impl Generator for GaussianModel {
    fn generate(&self, replicate: u64) -> (PValueFamily, GroundTruth) {
        gen_gaussian(self, replicate)
    }
}

impl Generator for DiracUniformModel {
    fn generate(&self, replicate: u64) -> (PValueFamily, GroundTruth) {
        gen_dirac_uniform(self, replicate)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Metric {
    /// Expected false discovery proportion.
    Fdr,
    /// Probability of at least `k` false rejections.
    Kfwer(usize),
    /// Probability that the false discovery proportion exceeds `gamma`.
    FdpTail(f64),
}

impl Metric {
    pub fn validate(&self) -> Result<()> {
        match *self {
            Metric::Fdr => Ok(()),
            Metric::Kfwer(0) => Err(invalid("kFWER needs k >= 1")),
            Metric::Kfwer(_) => Ok(()),
            Metric::FdpTail(gamma) => check_level("gamma", gamma),
        }
    }

    pub fn name(&self) -> String {
        match *self {
            Metric::Fdr => "fdr".to_string(),
            Metric::Kfwer(k) => format!("kfwer:{k}"),
            Metric::FdpTail(gamma) => format!("fdp-tail:{gamma}"),
        }
    }

    /// The per-replicate statistic.
    pub fn evaluate(&self, rejected: &RejectionSet, truth: &GroundTruth) -> f64 {
        match *self {
            Metric::Fdr => false_discovery_proportion(rejected, truth),
            Metric::Kfwer(k) => indicator(false_rejections(rejected, truth) >= k),
            Metric::FdpTail(gamma) => indicator(fdp_exceeds(rejected, truth, gamma)),
        }
    }
}

fn indicator(b: bool) -> f64 {
    if b {
        1.0
    } else {
        0.0
    }
}

/// `FDP > gamma`, decided in integers: `V > gamma R`.
fn fdp_exceeds(rejected: &RejectionSet, truth: &GroundTruth, gamma: f64) -> bool {
    let v = false_rejections(rejected, truth) as f64;
    v > gamma * rejected.len() as f64
}

/// A Monte Carlo mean with its standard error `sd / sqrt(N)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ErrorRateEstimate {
    pub estimate: f64,
    pub std_error: f64,
    pub replicates: u64,
}

impl ErrorRateEstimate {
    /// Mean and standard error, accumulated in slice order.
    pub fn from_values(values: &[f64]) -> Self {
        let n = values.len() as f64;
        let mean = values.iter().sum::<f64>() / n;
        let ss: f64 = values.iter().map(|v| (v - mean) * (v - mean)).sum();
        let sd = if values.len() > 1 { (ss / (n - 1.0)).sqrt() } else { 0.0 };
        Self {
            estimate: mean,
            std_error: sd / n.sqrt(),
            replicates: values.len() as u64,
        }
    }

    /// `estimate <= bound + sigmas * std_error`.
    pub fn within(&self, bound: f64, sigmas: f64) -> bool {
        self.estimate <= bound + sigmas * self.std_error
    }
}

fn check_replicates(n: u64) -> Result<()> {
    if n == 0 {
        return Err(invalid("at least one replicate is required"));
    }
    Ok(())
}

/// Monte Carlo estimate of `metric` for `procedure` on data from `generator`.
pub fn estimate<P, G>(
    procedure: P,
    metric: Metric,
    generator: &G,
    replicates: u64,
    execution: Execution,
) -> Result<ErrorRateEstimate>
where
    P: Fn(&PValueFamily) -> Result<RejectionSet> + Sync + Send,
    G: Generator + ?Sized,
{
    check_replicates(replicates)?;
    metric.validate()?;
    let values = run_replicates(replicates, execution, |r| {
        let (family, truth) = generator.generate(r);
        procedure(&family).map(|rejected| metric.evaluate(&rejected, &truth))
    })
    .into_iter()
    .collect::<Result<Vec<_>>>()?;
    Ok(ErrorRateEstimate::from_values(&values))
}

/// Monte Carlo estimate of `E f(p)` for `p ~ DU(m0 - 1, m)`.
pub fn verify_estimator_condition(
    estimator: Pi0Estimator,
    m: usize,
    m0: usize,
    replicates: u64,
    seed: u64,
    execution: Execution,
) -> Result<ErrorRateEstimate> {
    check_replicates(replicates)?;
    if !(1..=m).contains(&m0) {
        return Err(invalid(format!("m0 must lie in 1..={m}, got {m0}")));
    }
    estimator.validate(m)?;
    let model = DiracUniformModel::new(m, m0 - 1, seed)?;
    let values = run_replicates(replicates, execution, |r| {
        let (family, _) = gen_dirac_uniform(&model, r);
        estimator.evaluate(&family).expect("validated estimator")
    });
    Ok(ErrorRateEstimate::from_values(&values))
}

/// Monte Carlo estimate of `E[1{U <= g(U)} / g(U)]` for `U` uniform on (0, 1).
pub fn lemma_dc_check<G>(
    g: G,
    replicates: u64,
    seed: u64,
    execution: Execution,
) -> Result<ErrorRateEstimate>
where
    G: Fn(f64) -> f64 + Sync + Send,
{
    check_replicates(replicates)?;
    let values = run_replicates(replicates, execution, |r| {
        let u: f64 = replicate_rng(seed, r).sample(Open01);
        let gu = g(u);
        if u <= gu {
            1.0 / gu
        } else {
            0.0
        }
    });
    Ok(ErrorRateEstimate::from_values(&values))
}
