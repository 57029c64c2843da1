//! Shared domain types: p-value families, their order statistics, rejection
//! sets and the ground truth attached to simulated data.
//!
//! Hypothesis indices are 0-based throughout the Rust API. Ranks of order
//! statistics are 1-based (`p_(1) <= ... <= p_(m)`) with the convention
//! `p_(0) = 0`, see [`OrderedPValues::at_rank`].

use std::cmp::Ordering;

use crate::error::{invalid, Error, Result};

/// A family of `m >= 2` p-values in `[0, 1]`, kept in the caller's index order.
#[derive(Debug, Clone, PartialEq)]
pub struct PValueFamily {
    values: Vec<f64>,
}

impl PValueFamily {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.len() < 2 {
            return Err(invalid(format!(
                "a p-value family needs at least 2 values, got {}",
                values.len()
            )));
        }
        for (index, &value) in values.iter().enumerate() {
            // Also rejects NaN.
            if !(0.0..=1.0).contains(&value) {
                return Err(Error::PValueOutOfRange { index, value });
            }
        }
        Ok(Self { values })
    }

    #[inline]
    pub fn m(&self) -> usize {
        self.values.len()
    }

    #[inline]
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    #[inline]
    pub fn get(&self, index: usize) -> f64 {
        self.values[index]
    }

    /// Stable order statistics; ties keep ascending original index.
    pub fn order(&self) -> OrderedPValues {
        let mut permutation: Vec<usize> = (0..self.values.len()).collect();
        // sort_by is stable, so equal values keep index order.
        permutation.sort_by(|&a, &b| {
            self.values[a]
                .partial_cmp(&self.values[b])
                .unwrap_or(Ordering::Equal)
        });
        let sorted = permutation.iter().map(|&i| self.values[i]).collect();
        OrderedPValues {
            sorted,
            permutation,
        }
    }

    /// Empirical c.d.f. `m^-1 #{i : p_i <= u}`.
    pub fn ecdf(&self, u: f64) -> f64 {
        self.count_at_most(u) as f64 / self.m() as f64
    }

    /// `#{i : p_i <= t}`, using exact floating-point comparison.
    pub fn count_at_most(&self, t: f64) -> usize {
        self.values.iter().filter(|&&p| p <= t).count()
    }

    /// Copy of the family with one coordinate replaced.
    pub fn with_value(&self, index: usize, value: f64) -> Result<Self> {
        let mut values = self.values.clone();
        values[index] = value;
        Self::new(values)
    }
}

/// Order statistics of a [`PValueFamily`] together with the rank-to-index map.
#[derive(Debug, Clone, PartialEq)]
pub struct OrderedPValues {
    sorted: Vec<f64>,
    permutation: Vec<usize>,
}

impl OrderedPValues {
    #[inline]
    pub fn m(&self) -> usize {
        self.sorted.len()
    }

    /// Nondecreasing values `p_(1), ..., p_(m)`.
    #[inline]
    pub fn sorted(&self) -> &[f64] {
        &self.sorted
    }

    /// `permutation()[r - 1]` is the original index holding `p_(r)`.
    #[inline]
    pub fn permutation(&self) -> &[usize] {
        &self.permutation
    }

    /// `p_(rank)` for `rank` in `0..=m`, with `p_(0) = 0`.
    #[inline]
    pub fn at_rank(&self, rank: usize) -> f64 {
        if rank == 0 {
            0.0
        } else {
            self.sorted[rank - 1]
        }
    }

    /// Original index of the hypothesis at 1-based `rank`.
    #[inline]
    pub fn index_at_rank(&self, rank: usize) -> usize {
        self.permutation[rank - 1]
    }

    /// Number of order statistics `<= t` (binary search on the sorted values).
    pub fn count_at_most(&self, t: f64) -> usize {
        self.sorted.partition_point(|&p| p <= t)
    }

    /// Inverse of the permutation: rank (0-based) of each original index.
    pub fn ranks(&self) -> Vec<usize> {
        let mut ranks = vec![0; self.permutation.len()];
        for (rank, &index) in self.permutation.iter().enumerate() {
            ranks[index] = rank;
        }
        ranks
    }
}

/// Indices of rejected hypotheses plus the realized threshold, when the
/// procedure is of thresholding type.
///
/// When `threshold` is present, `i` is rejected iff `p_i <= threshold`.
#[derive(Debug, Clone, PartialEq)]
pub struct RejectionSet {
    indices: Vec<usize>,
    threshold: Option<f64>,
}

impl RejectionSet {
    pub fn empty() -> Self {
        Self {
            indices: Vec::new(),
            threshold: None,
        }
    }

    /// `{i : p_i <= threshold}`.
    pub fn at_threshold(family: &PValueFamily, threshold: f64) -> Self {
        let indices = family
            .values()
            .iter()
            .enumerate()
            .filter(|(_, &p)| p <= threshold)
            .map(|(i, _)| i)
            .collect();
        Self {
            indices,
            threshold: Some(threshold),
        }
    }

    /// A rejection set with no associated threshold; indices are sorted and
    /// deduplicated.
    pub fn from_indices(mut indices: Vec<usize>) -> Self {
        indices.sort_unstable();
        indices.dedup();
        Self {
            indices,
            threshold: None,
        }
    }

    #[inline]
    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    #[inline]
    pub fn threshold(&self) -> Option<f64> {
        self.threshold
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.indices.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    pub fn contains(&self, index: usize) -> bool {
        self.indices.binary_search(&index).is_ok()
    }

    pub fn is_subset_of(&self, other: &RejectionSet) -> bool {
        self.indices.iter().all(|&i| other.contains(i))
    }

    pub fn same_indices(&self, other: &RejectionSet) -> bool {
        self.indices == other.indices
    }
}

/// The set of true null hypotheses attached to simulated data.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroundTruth {
    is_null: Vec<bool>,
    m0: usize,
}

impl GroundTruth {
    pub fn from_null_indices(m: usize, nulls: &[usize]) -> Result<Self> {
        let mut is_null = vec![false; m];
        for &i in nulls {
            if i >= m {
                return Err(invalid(format!("null index {i} out of range for m = {m}")));
            }
            is_null[i] = true;
        }
        Ok(Self::from_mask(is_null))
    }

    /// The first `m0` indices are null, the remaining ones are alternatives.
    pub fn leading_nulls(m: usize, m0: usize) -> Self {
        Self::from_mask((0..m).map(|i| i < m0).collect())
    }

    pub fn from_mask(is_null: Vec<bool>) -> Self {
        let m0 = is_null.iter().filter(|&&b| b).count();
        Self { is_null, m0 }
    }

    #[inline]
    pub fn m(&self) -> usize {
        self.is_null.len()
    }

    #[inline]
    pub fn m0(&self) -> usize {
        self.m0
    }

    #[inline]
    pub fn is_null(&self, index: usize) -> bool {
        self.is_null[index]
    }

    pub fn null_indices(&self) -> Vec<usize> {
        (0..self.is_null.len()).filter(|&i| self.is_null[i]).collect()
    }

    /// Proportion of true nulls, `m0 / m`.
    pub fn pi0(&self) -> f64 {
        self.m0 as f64 / self.m() as f64
    }
}

/// `|R ∩ H0|`.
pub fn false_rejections(rejected: &RejectionSet, truth: &GroundTruth) -> usize {
    rejected
        .indices()
        .iter()
        .filter(|&&i| i < truth.m() && truth.is_null(i))
        .count()
}

/// False discovery proportion `|R ∩ H0| / max(|R|, 1)`; zero when nothing is
/// rejected.
pub fn false_discovery_proportion(rejected: &RejectionSet, truth: &GroundTruth) -> f64 {
    false_rejections(rejected, truth) as f64 / rejected.len().max(1) as f64
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn fam(v: &[f64]) -> PValueFamily {
        PValueFamily::new(v.to_vec()).unwrap()
    }

    #[test]
    fn rejects_bad_families() {
        assert!(PValueFamily::new(vec![0.5]).is_err());
        assert!(PValueFamily::new(vec![0.5, 1.5]).is_err());
        assert!(PValueFamily::new(vec![0.5, f64::NAN]).is_err());
        assert!(matches!(
            PValueFamily::new(vec![0.1, -0.1]),
            Err(Error::PValueOutOfRange { index: 1, .. })
        ));
    }

    #[test]
    fn order_sorts_and_maps_back() {
        let o = fam(&[0.3, 0.1, 0.2]).order();
        assert_eq!(o.sorted(), &[0.1, 0.2, 0.3]);
        // 1-based (2, 3, 1)
        assert_eq!(o.permutation(), &[1, 2, 0]);
        assert_eq!(o.at_rank(0), 0.0);
        assert_eq!(o.at_rank(3), 0.3);
    }

    #[test]
    fn ties_keep_index_order() {
        let o = fam(&[0.5, 0.5]).order();
        assert_eq!(o.permutation(), &[0, 1]);
        let o = fam(&[0.2, 0.1, 0.2, 0.1]).order();
        assert_eq!(o.permutation(), &[1, 3, 0, 2]);
    }

    #[test]
    fn order_round_trip_on_random_vectors() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..1000 {
            let m = rng.random_range(2..40);
            let v: Vec<f64> = (0..m)
                .map(|_| (rng.random_range(0..20) as f64) / 19.0)
                .collect();
            let o = fam(&v).order();
            assert!(o.sorted().windows(2).all(|w| w[0] <= w[1]));
            let mut back = vec![f64::NAN; m];
            for (r, &i) in o.permutation().iter().enumerate() {
                back[i] = o.sorted()[r];
            }
            assert_eq!(back, v);
            let ranks = o.ranks();
            for i in 0..m {
                assert_eq!(o.permutation()[ranks[i]], i);
            }
        }
    }

    #[test]
    fn ecdf_examples() {
        let f = fam(&[0.1, 0.2, 0.3, 0.9]);
        assert_eq!(f.ecdf(1.0), 1.0);
        assert_eq!(f.ecdf(0.25), 0.5);
        assert_eq!(f.ecdf(0.0), 0.0);
        // right-continuous: the jump is included at the atom
        assert_eq!(f.ecdf(0.2), 0.5);
        assert_eq!(fam(&[0.0, 0.0, 0.4]).ecdf(0.0), 2.0 / 3.0);
    }

    #[test]
    fn switching_relation() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..1000 {
            let m = rng.random_range(2..30);
            let f = fam(&(0..m).map(|_| rng.random::<f64>() * 0.3).collect::<Vec<_>>());
            let o = f.order();
            let k = rng.random_range(1..=m);
            let alpha: f64 = rng.random_range(0.001..0.999);
            let t = alpha * k as f64 / m as f64;
            // m * G(t) >= k, with m * G(t) computed as the integer count
            let lhs = f.count_at_most(t) >= k;
            let rhs = o.at_rank(k) <= t;
            assert_eq!(lhs, rhs);
        }
    }

    #[test]
    fn fdp_examples() {
        let truth = GroundTruth::from_null_indices(4, &[1, 2]).unwrap();
        let r = RejectionSet::from_indices(vec![0, 1, 2]);
        assert!((false_discovery_proportion(&r, &truth) - 2.0 / 3.0).abs() < 1e-15);
        assert_eq!(false_discovery_proportion(&RejectionSet::empty(), &truth), 0.0);
        let all = GroundTruth::leading_nulls(5, 5);
        let r = RejectionSet::from_indices((0..5).collect());
        assert_eq!(false_discovery_proportion(&r, &all), 1.0);
    }

    #[test]
    fn false_rejection_examples() {
        let truth = GroundTruth::from_null_indices(3, &[1]).unwrap();
        assert_eq!(false_rejections(&RejectionSet::from_indices(vec![0, 1]), &truth), 1);
        assert_eq!(false_rejections(&RejectionSet::empty(), &truth), 0);
        assert!(GroundTruth::from_null_indices(3, &[3]).is_err());
    }

    #[test]
    fn threshold_invariant() {
        let f = fam(&[0.05, 0.01, 0.5, 0.05]);
        let r = RejectionSet::at_threshold(&f, 0.05);
        assert_eq!(r.indices(), &[0, 1, 3]);
        for i in 0..f.m() {
            assert_eq!(r.contains(i), f.get(i) <= 0.05);
        }
    }

    proptest! {
        #[test]
        fn fdp_is_ratio_of_false_rejections(
            mask in proptest::collection::vec(any::<(bool, bool)>(), 2..40)
        ) {
            let m = mask.len();
            let truth = GroundTruth::from_mask(mask.iter().map(|x| x.0).collect());
            let rejected = RejectionSet::from_indices((0..m).filter(|&i| mask[i].1).collect());
            let v = false_discovery_proportion(&rejected, &truth);
            let v_count = false_rejections(&rejected, &truth);
            prop_assert!((0.0..=1.0).contains(&v));
            prop_assert_eq!((v * rejected.len().max(1) as f64).round() as usize, v_count);
        }

        #[test]
        fn ecdf_nondecreasing(values in proptest::collection::vec(0.0f64..=1.0, 2..30),
                              a in 0.0f64..=1.0, b in 0.0f64..=1.0) {
            let f = PValueFamily::new(values).unwrap();
            let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
            prop_assert!(f.ecdf(lo) <= f.ecdf(hi));
        }
    }
}
