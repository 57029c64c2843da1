//! Super-uniform p-values built from test statistics that reject for large
//! values: `p(x) = sup_P P(S >= s)` over a finite set of null distributions.

use std::fmt;
use std::sync::Arc;

use crate::error::{invalid, Result};
use crate::numeric::normal_upper_tail;

/// A discrete null distribution on finitely many support points.
///
/// Stored as the upper tail `T(x_j) = P(S >= x_j)` at each sorted support
/// point, so the p-value at a support point is read off exactly.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteNull {
    points: Vec<f64>,
    tails: Vec<f64>,
}

impl DiscreteNull {
    /// Builds the distribution from support points and their probabilities.
    pub fn new(points: Vec<f64>, probabilities: Vec<f64>) -> Result<Self> {
        if points.is_empty() || points.len() != probabilities.len() {
            return Err(invalid("support points and probabilities must be nonempty and of equal length"));
        }
        if points.windows(2).any(|w| !(w[0] < w[1])) {
            return Err(invalid("support points must be strictly increasing"));
        }
        if probabilities.iter().any(|&q| !(q >= 0.0)) {
            return Err(invalid("probabilities must be nonnegative"));
        }
        let mut tails = vec![0.0; points.len()];
        let mut acc = 0.0;
        for j in (0..points.len()).rev() {
            acc += probabilities[j];
            tails[j] = acc;
        }
        if (acc - 1.0).abs() > 1e-9 {
            return Err(invalid(format!("probabilities sum to {acc}, expected 1")));
        }
        Ok(Self { points, tails })
    }

    /// Uniform distribution on the integers `lo..=hi`; tails are computed as
    /// exact ratios `(hi - x + 1) / (hi - lo + 1)`.
    pub fn uniform_integers(lo: i64, hi: i64) -> Result<Self> {
        if hi < lo {
            return Err(invalid("empty integer range"));
        }
        let n = (hi - lo + 1) as f64;
        let points = (lo..=hi).map(|x| x as f64).collect();
        let tails = (lo..=hi).map(|x| (hi - x + 1) as f64 / n).collect();
        Ok(Self { points, tails })
    }

    /// Poisson distribution truncated where the remaining upper mass drops
    /// below `tail_mass`; the remainder is folded into the last point.
    pub fn poisson(mean: f64, tail_mass: f64) -> Result<Self> {
        if !(mean > 0.0) || !(tail_mass > 0.0) {
            return Err(invalid("Poisson mean and tail mass must be positive"));
        }
        let mut pmf = vec![(-mean).exp()];
        let mut cdf = pmf[0];
        let mut x = 0.0;
        while 1.0 - cdf > tail_mass || x < mean {
            x += 1.0;
            let next = pmf.last().unwrap() * mean / x;
            pmf.push(next);
            cdf += next;
        }
        let last = pmf.len() - 1;
        pmf[last] += (1.0 - cdf).max(0.0);
        let points = (0..pmf.len()).map(|x| x as f64).collect();
        Self::new(points, pmf)
    }

    pub fn points(&self) -> &[f64] {
        &self.points
    }

    /// `P(S >= s)`.
    pub fn upper_tail(&self, s: f64) -> f64 {
        let j = self.points.partition_point(|&x| x < s);
        self.tails.get(j).copied().unwrap_or(0.0)
    }

    /// `P(S = x_j)` for the `j`-th support point.
    pub fn mass(&self, j: usize) -> f64 {
        self.tails[j] - self.tails.get(j + 1).copied().unwrap_or(0.0)
    }

    /// Exact `P(p(S) <= u)` when `S` follows this distribution and the
    /// p-value is its own upper tail.
    pub fn pvalue_cdf(&self, u: f64) -> f64 {
        // p(x_j) = T(x_j) is nonincreasing in j, so {p <= u} = {S >= x_j*}
        // and its probability is T(x_j*) itself.
        let j = self.tails.partition_point(|&t| t > u);
        self.tails.get(j).copied().unwrap_or(0.0)
    }

    /// `F^{-1}(q) = min{x : P(S <= x) >= q}` for `q = 1 - alpha`, evaluated
    /// as `min{x_j : T(x_{j+1}) <= alpha}` to stay on the tail scale.
    pub fn upper_quantile(&self, alpha: f64) -> f64 {
        let n = self.points.len();
        for j in 0..n {
            let next_tail = self.tails.get(j + 1).copied().unwrap_or(0.0);
            if next_tail <= alpha {
                return self.points[j];
            }
        }
        self.points[n - 1]
    }
}

/// The upper-tail distribution function of a test statistic under one null
/// distribution.
#[derive(Clone)]
pub enum NullTail {
    /// `S ~ N(mean, sd^2)`.
    Normal { mean: f64, sd: f64 },
    Discrete(DiscreteNull),
    /// Any continuous distribution given through its upper tail.
    Continuous(Arc<dyn Fn(f64) -> f64 + Send + Sync>),
}

impl fmt::Debug for NullTail {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NullTail::Normal { mean, sd } => f
                .debug_struct("Normal")
                .field("mean", mean)
                .field("sd", sd)
                .finish(),
            NullTail::Discrete(d) => f.debug_tuple("Discrete").field(d).finish(),
            NullTail::Continuous(_) => f.write_str("Continuous(..)"),
        }
    }
}

impl NullTail {
    pub fn standard_normal() -> Self {
        NullTail::Normal { mean: 0.0, sd: 1.0 }
    }

    /// `P(S >= s)` under this null.
    pub fn upper_tail(&self, s: f64) -> f64 {
        match self {
            NullTail::Normal { mean, sd } => normal_upper_tail((s - mean) / sd),
            NullTail::Discrete(d) => d.upper_tail(s),
            NullTail::Continuous(tail) => tail(s).clamp(0.0, 1.0),
        }
    }

    /// `P(p <= u)` for the p-value `p = T(S)` with `S` drawn from this null.
    ///
    /// Continuous nulls give exactly `u` (probability integral transform);
    /// discrete nulls are enumerated.
    pub fn pvalue_cdf(&self, u: f64) -> f64 {
        match self {
            NullTail::Normal { .. } | NullTail::Continuous(_) => u.clamp(0.0, 1.0),
            NullTail::Discrete(d) => d.pvalue_cdf(u),
        }
    }
}

/// A composite null hypothesis approximated by finitely many distributions.
#[derive(Debug, Clone)]
pub struct CompositeNull {
    tails: Vec<NullTail>,
}

impl CompositeNull {
    pub fn new(tails: Vec<NullTail>) -> Result<Self> {
        if tails.is_empty() {
            return Err(invalid("a composite null needs at least one distribution"));
        }
        Ok(Self { tails })
    }

    pub fn simple(tail: NullTail) -> Self {
        Self { tails: vec![tail] }
    }

    pub fn tails(&self) -> &[NullTail] {
        &self.tails
    }

    /// `sup` over the member distributions of `P(S >= s)`.
    pub fn pvalue(&self, s: f64) -> f64 {
        self.tails
            .iter()
            .map(|t| t.upper_tail(s))
            .fold(0.0, f64::max)
    }
}

/// p-value of the observed statistic `s` under a composite null.
pub fn pvalue_from_statistic(s: f64, null: &CompositeNull) -> f64 {
    null.pvalue(s)
}

/// Slack allowed when comparing `P(p <= u)` against `u`.
pub const SUPERUNIFORM_TOLERANCE: f64 = 1e-12;

/// True iff `P(p <= u) <= u` at every grid point (within
/// [`SUPERUNIFORM_TOLERANCE`]).
pub fn superuniformity_grid_check(null: &NullTail, grid: &[f64]) -> bool {
    grid.iter()
        .all(|&u| null.pvalue_cdf(u) <= u + SUPERUNIFORM_TOLERANCE)
}
