//! k-FWER control through subset-indexed families `C -> R_C`.
//!
//! A family maps each candidate set `C` of true nulls to a rejection set
//! `R_C` and must be non-increasing: `C ⊆ C'` implies `R_C' ⊆ R_C`. The
//! step-down recursion shrinks `C` from the full index set to a fixed point
//! and rejects its complement. When fewer than `k` candidates remain the
//! family rejects everything, since `k` false rejections are impossible.

use crate::error::{check_level, invalid, Error, Result};
use crate::family::{PValueFamily, RejectionSet};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Upper bound on the number of sets `I` that [`phi`] may enumerate.
pub const ENUMERATION_LIMIT: u128 = 100_000;

/// Number of random chains used to probe a custom family for monotonicity.
pub const NI_PROBE_CHAINS: usize = 64;

/// A subset of `{0, .., m-1}` stored as a membership mask.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Subset {
    mask: Vec<bool>,
}

impl Subset {
    pub fn full(m: usize) -> Self {
        Self {
            mask: vec![true; m],
        }
    }

    pub fn empty(m: usize) -> Self {
        Self {
            mask: vec![false; m],
        }
    }

    pub fn from_indices(m: usize, indices: &[usize]) -> Result<Self> {
        let mut mask = vec![false; m];
        for &i in indices {
            if i >= m {
                return Err(invalid(format!("index {i} out of range for m = {m}")));
            }
            mask[i] = true;
        }
        Ok(Self { mask })
    }

    pub fn universe(&self) -> usize {
        self.mask.len()
    }

    pub fn len(&self) -> usize {
        self.mask.iter().filter(|&&b| b).count()
    }

    pub fn is_empty(&self) -> bool {
        !self.mask.iter().any(|&b| b)
    }

    pub fn contains(&self, i: usize) -> bool {
        self.mask[i]
    }

    pub fn indices(&self) -> Vec<usize> {
        (0..self.mask.len()).filter(|&i| self.mask[i]).collect()
    }

    pub fn complement(&self) -> Self {
        Self {
            mask: self.mask.iter().map(|&b| !b).collect(),
        }
    }

    pub fn is_subset_of(&self, other: &Subset) -> bool {
        self.mask.iter().zip(&other.mask).all(|(&a, &b)| !a || b)
    }

    fn insert(&mut self, i: usize) {
        self.mask[i] = true;
    }

    fn union_with(&mut self, other: &Subset) {
        for (a, &b) in self.mask.iter_mut().zip(&other.mask) {
            *a |= b;
        }
    }

    /// The non-rejected set `A = R^c` of a rejection set over `m` indices.
    pub fn accepted(m: usize, rejected: &RejectionSet) -> Self {
        let mut mask = vec![true; m];
        for &i in rejected.indices() {
            mask[i] = false;
        }
        Self { mask }
    }
}

/// A map `C -> R_C` from candidate null sets to rejection sets.
pub trait SubsetIndexedFamily {
    /// `R_C` for nonempty `C`.
    fn reject_for(&self, c: &Subset, family: &PValueFamily) -> RejectionSet;

    /// For thresholding families whose threshold depends only on `|C|` and
    /// is nonincreasing in it: the threshold at size `n >= 1`.
    fn size_threshold(&self, _n: usize) -> Option<f64> {
        None
    }

    /// Checks the non-increasing property on `family`.
    fn validate(&self, _family: &PValueFamily) -> Result<()> {
        Ok(())
    }
}

/// `R_C = {i : p_i <= min(alpha k / |C|, 1)}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BonferroniFamily {
    k: usize,
    alpha: f64,
}

impl BonferroniFamily {
    pub fn new(k: usize, alpha: f64) -> Result<Self> {
        check_level("alpha", alpha)?;
        if k == 0 {
            return Err(invalid("k must be at least 1"));
        }
        Ok(Self { k, alpha })
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }
}

impl SubsetIndexedFamily for BonferroniFamily {
    fn reject_for(&self, c: &Subset, family: &PValueFamily) -> RejectionSet {
        RejectionSet::at_threshold(family, self.size_threshold(c.len()).unwrap_or(1.0))
    }

    fn size_threshold(&self, n: usize) -> Option<f64> {
        Some((self.alpha * self.k as f64 / n as f64).min(1.0))
    }
}

/// Rejection set of the Bonferroni family at a given `C`.
pub fn bonferroni_family(
    c: &Subset,
    k: usize,
    alpha: f64,
    family: &PValueFamily,
) -> Result<RejectionSet> {
    if c.is_empty() {
        return Err(invalid("candidate set C must be nonempty"));
    }
    Ok(BonferroniFamily::new(k, alpha)?.reject_for(c, family))
}

type RejectFn = dyn Fn(&Subset, &PValueFamily) -> RejectionSet + Send + Sync;

/// A user-supplied family. Its monotonicity is probed on random chains
/// `C_1 ⊂ C_2 ⊂ ... ⊂ {0..m-1}` before any step-down run.
pub struct CustomFamily {
    reject: Box<RejectFn>,
    seed: u64,
}

impl CustomFamily {
    pub fn new(reject: impl Fn(&Subset, &PValueFamily) -> RejectionSet + Send + Sync + 'static) -> Self {
        Self {
            reject: Box::new(reject),
            seed: 0,
        }
    }

    pub fn with_probe_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }
}

impl std::fmt::Debug for CustomFamily {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("CustomFamily").field("seed", &self.seed).finish_non_exhaustive()
    }
}

impl SubsetIndexedFamily for CustomFamily {
    fn reject_for(&self, c: &Subset, family: &PValueFamily) -> RejectionSet {
        (self.reject)(c, family)
    }

    fn validate(&self, family: &PValueFamily) -> Result<()> {
        check_non_increasing(self, family, NI_PROBE_CHAINS, self.seed)
    }
}

/// Probes `C ⊆ C' => R_C' ⊆ R_C` along `chains` random maximal chains.
pub fn check_non_increasing<F: SubsetIndexedFamily + ?Sized>(
    fam: &F,
    family: &PValueFamily,
    chains: usize,
    seed: u64,
) -> Result<()> {
    let m = family.m();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut order: Vec<usize> = (0..m).collect();
    for _ in 0..chains {
        order.shuffle(&mut rng);
        let mut c = Subset::empty(m);
        c.insert(order[0]);
        let mut prev = fam.reject_for(&c, family);
        for &i in &order[1..] {
            c.insert(i);
            let next = fam.reject_for(&c, family);
            if !next.is_subset_of(&prev) {
                return Err(Error::NonIncreasingViolated(format!(
                    "adding index {i} to a candidate set of size {} enlarged the rejection set",
                    c.len() - 1
                )));
            }
            prev = next;
        }
    }
    Ok(())
}

/// `A_C` with the convention that `|C| < k` rejects everything.
fn accepted_for<F: SubsetIndexedFamily + ?Sized>(
    fam: &F,
    c: &Subset,
    k: usize,
    family: &PValueFamily,
) -> Subset {
    if c.len() < k {
        return Subset::empty(family.m());
    }
    Subset::accepted(family.m(), &fam.reject_for(c, family))
}

/// The single-step procedure `R_{0..m-1}`.
pub fn single_step<F: SubsetIndexedFamily + ?Sized>(fam: &F, family: &PValueFamily) -> RejectionSet {
    fam.reject_for(&Subset::full(family.m()), family)
}

fn finish(c_hat: &Subset) -> RejectionSet {
    RejectionSet::from_indices(c_hat.complement().indices())
}

/// FWER step-down: `C_{j+1} = A_{C_j}` from the full set to a fixed point.
pub fn step_down_fwer<F: SubsetIndexedFamily + ?Sized>(
    fam: &F,
    family: &PValueFamily,
) -> Result<RejectionSet> {
    fam.validate(family)?;
    let mut c = Subset::full(family.m());
    loop {
        let next = accepted_for(fam, &c, 1, family);
        if next == c {
            return Ok(finish(&c));
        }
        c = next;
    }
}

fn binomial_coefficient(n: u128, k: u128) -> u128 {
    let k = k.min(n - k.min(n));
    (0..k).fold(1u128, |acc, i| acc.saturating_mul(n - i) / (i + 1))
}

/// Number of sets `I ⊆ C^c` with `|I| <= k - 1`.
pub fn enumeration_count(complement_size: usize, k: usize) -> u128 {
    let n = complement_size as u128;
    (0..k.min(complement_size + 1) as u128)
        .fold(0u128, |acc, j| acc.saturating_add(binomial_coefficient(n, j)))
}

/// `phi(C)`: union over `I ⊆ C^c`, `|I| <= k - 1`, of `A_{C ∪ I}`.
///
/// Families with a size-only threshold take the closed form at effective
/// size `min(m, |C| + k - 1)`; others are enumerated, subject to
/// [`ENUMERATION_LIMIT`].
pub fn phi<F: SubsetIndexedFamily + ?Sized>(
    c: &Subset,
    fam: &F,
    k: usize,
    family: &PValueFamily,
) -> Result<Subset> {
    if k == 0 {
        return Err(invalid("k must be at least 1"));
    }
    let m = family.m();
    let effective = m.min(c.len() + k - 1);
    if let Some(t) = fam.size_threshold(effective.max(1)) {
        if effective < k {
            return Ok(Subset::empty(m));
        }
        let rejected = RejectionSet::at_threshold(family, t);
        return Ok(Subset::accepted(m, &rejected));
    }
    phi_enumerated(c, fam, k, family)
}

/// [`phi`] by explicit enumeration of every admissible `I`.
pub fn phi_enumerated<F: SubsetIndexedFamily + ?Sized>(
    c: &Subset,
    fam: &F,
    k: usize,
    family: &PValueFamily,
) -> Result<Subset> {
    let outside = c.complement().indices();
    let required = enumeration_count(outside.len(), k);
    if required > ENUMERATION_LIMIT {
        return Err(Error::EnumerationLimit {
            required,
            limit: ENUMERATION_LIMIT,
        });
    }
    let mut out = Subset::empty(family.m());
    let mut current = c.clone();
    enumerate(&outside, 0, k - 1, &mut current, &mut |set| {
        out.union_with(&accepted_for(fam, set, k, family));
    });
    Ok(out)
}

fn enumerate(
    pool: &[usize],
    start: usize,
    budget: usize,
    current: &mut Subset,
    visit: &mut impl FnMut(&Subset),
) {
    visit(current);
    if budget == 0 {
        return;
    }
    for pos in start..pool.len() {
        let i = pool[pos];
        current.mask[i] = true;
        enumerate(pool, pos + 1, budget - 1, current, visit);
        current.mask[i] = false;
    }
}

/// Iterates `C_j = phi(C_{j-1})` from the full set and returns every iterate
/// up to and including the fixed point.
pub fn step_down_kfwer_iterates<F: SubsetIndexedFamily + ?Sized>(
    fam: &F,
    k: usize,
    family: &PValueFamily,
) -> Result<Vec<Subset>> {
    iterate(fam, family, |c| phi(c, fam, k, family))
}

/// k-FWER step-down: the complement of the fixed point of `phi`.
pub fn step_down_kfwer<F: SubsetIndexedFamily + ?Sized>(
    fam: &F,
    k: usize,
    family: &PValueFamily,
) -> Result<RejectionSet> {
    let iterates = step_down_kfwer_iterates(fam, k, family)?;
    Ok(finish(iterates.last().expect("at least one iterate")))
}

fn iterate<F: SubsetIndexedFamily + ?Sized>(
    fam: &F,
    family: &PValueFamily,
    step: impl Fn(&Subset) -> Result<Subset>,
) -> Result<Vec<Subset>> {
    fam.validate(family)?;
    let mut iterates = vec![Subset::full(family.m())];
    loop {
        let next = step(iterates.last().expect("nonempty"))?;
        if &next == iterates.last().expect("nonempty") {
            return Ok(iterates);
        }
        iterates.push(next);
    }
}

/// `A_{C ∪ I}` for the single set `I` of the `k - 1` largest p-values in
/// `C^c` (all of `C^c` when it has fewer than `k - 1` elements).
///
/// The k-FWER guarantee of the resulting step-down procedure is only
/// established when alternative p-values are exactly zero.
pub fn streamlined_phi<F: SubsetIndexedFamily + ?Sized>(
    c: &Subset,
    fam: &F,
    k: usize,
    family: &PValueFamily,
) -> Result<Subset> {
    if k == 0 {
        return Err(invalid("k must be at least 1"));
    }
    let mut outside = c.complement().indices();
    // largest p-values first, ties broken by larger index
    outside.sort_by(|&a, &b| family.get(b).total_cmp(&family.get(a)).then(b.cmp(&a)));
    let mut set = c.clone();
    for &i in outside.iter().take(k - 1) {
        set.insert(i);
    }
    Ok(accepted_for(fam, &set, k, family))
}

/// Step-down recursion driven by [`streamlined_phi`].
pub fn streamlined_step_down_kfwer<F: SubsetIndexedFamily + ?Sized>(
    fam: &F,
    k: usize,
    family: &PValueFamily,
) -> Result<RejectionSet> {
    let iterates = iterate(fam, family, |c| streamlined_phi(c, fam, k, family))?;
    Ok(finish(iterates.last().expect("at least one iterate")))
}

fn step_down_scan(family: &PValueFamily, critical: impl Fn(usize) -> f64) -> RejectionSet {
    let ordered = family.order();
    let l_hat = (1..=family.m())
        .take_while(|&l| ordered.at_rank(l) <= critical(l))
        .last()
        .unwrap_or(0);
    if l_hat == 0 {
        return RejectionSet::empty();
    }
    RejectionSet::at_threshold(family, critical(l_hat))
}

/// Holm step-down with critical values `alpha / (m - l + 1)`.
pub fn holm(family: &PValueFamily, alpha: f64) -> Result<RejectionSet> {
    check_level("alpha", alpha)?;
    let m = family.m();
    Ok(step_down_scan(family, |l| alpha / (m - l + 1) as f64))
}

/// Generalized Holm with critical values `alpha k / min(m, m - l + k)`.
pub fn generalized_holm(family: &PValueFamily, alpha: f64, k: usize) -> Result<RejectionSet> {
    check_level("alpha", alpha)?;
    let m = family.m();
    if !(1..=m).contains(&k) {
        return Err(invalid(format!("k must lie in 1..={m}, got {k}")));
    }
    Ok(step_down_scan(family, |l| {
        (alpha * k as f64 / m.min(m - l + k) as f64).min(1.0)
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    fn fam(v: &[f64]) -> PValueFamily {
        PValueFamily::new(v.to_vec()).unwrap()
    }

    fn random_family(rng: &mut ChaCha8Rng, m: usize) -> PValueFamily {
        let v: Vec<f64> = (0..m)
            .map(|_| match rng.random_range(0..3) {
                0 => rng.random::<f64>() * 0.01,
                1 => rng.random::<f64>() * 0.1,
                _ => rng.random::<f64>(),
            })
            .collect();
        fam(&v)
    }

    /// Bonferroni family hidden behind the generic interface so that only
    /// the enumeration path can be used.
    fn opaque_bonferroni(k: usize, alpha: f64) -> CustomFamily {
        let inner = BonferroniFamily::new(k, alpha).unwrap();
        CustomFamily::new(move |c, f| inner.reject_for(c, f))
    }

    #[test]
    fn bonferroni_family_examples() {
        let f = fam(&[0.001, 0.01, 0.02, 0.9]);
        let full = Subset::full(4);
        let r = bonferroni_family(&full, 1, 0.05, &f).unwrap();
        assert_eq!(r.threshold(), Some(0.0125));
        let r = bonferroni_family(&Subset::from_indices(4, &[0, 1]).unwrap(), 1, 0.1, &f).unwrap();
        assert_eq!(r.threshold(), Some(0.05));
        let r = bonferroni_family(&Subset::from_indices(4, &[2]).unwrap(), 3, 0.5, &f).unwrap();
        assert_eq!(r.threshold(), Some(1.0));
        assert_eq!(r.len(), 4);
        assert!(bonferroni_family(&Subset::empty(4), 1, 0.05, &f).is_err());
    }

    #[test]
    fn holm_examples() {
        let f = fam(&[0.001, 0.01, 0.02, 0.9]);
        let r = holm(&f, 0.05).unwrap();
        assert_eq!(r.indices(), &[0, 1, 2]);
        assert_eq!(r.threshold(), Some(0.025));
        assert!(holm(&fam(&[0.06, 0.5, 0.07]), 0.05).unwrap().is_empty());
    }

    #[test]
    fn generalized_holm_examples() {
        let f = fam(&[0.02, 0.024, 0.03, 0.2]);
        let r = generalized_holm(&f, 0.05, 2).unwrap();
        assert_eq!(r.indices(), &[0, 1, 2]);
        let f = fam(&[0.01, 0.04, 0.06, 0.05]);
        assert_eq!(generalized_holm(&f, 0.05, 4).unwrap().indices(), &[0, 1, 3]);
        assert!(generalized_holm(&f, 0.05, 0).is_err());
        assert!(generalized_holm(&f, 0.05, 5).is_err());
    }

    #[test]
    fn generalized_holm_k1_is_holm_and_k_m_is_uncorrected() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..1000 {
            let m = rng.random_range(2..20);
            let f = random_family(&mut rng, m);
            let alpha = rng.random_range(0.01..0.5);
            assert_eq!(generalized_holm(&f, alpha, 1).unwrap(), holm(&f, alpha).unwrap());
            let all = generalized_holm(&f, alpha, m).unwrap();
            assert!(all.same_indices(&RejectionSet::at_threshold(&f, alpha)));
        }
    }

    #[test]
    fn step_down_fwer_equals_holm() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..1000 {
            let m = rng.random_range(2..30);
            let f = random_family(&mut rng, m);
            let alpha = rng.random_range(0.01..0.5);
            let b = BonferroniFamily::new(1, alpha).unwrap();
            let sd = step_down_fwer(&b, &f).unwrap();
            assert!(sd.same_indices(&holm(&f, alpha).unwrap()));
            assert!(single_step(&b, &f).is_subset_of(&sd));
        }
    }

    #[test]
    fn step_down_fwer_trivial_cases() {
        let b = BonferroniFamily::new(1, 0.05).unwrap();
        assert!(step_down_fwer(&b, &fam(&[1.0; 5])).unwrap().is_empty());
        assert_eq!(step_down_fwer(&b, &fam(&[0.0; 5])).unwrap().len(), 5);
        let iterates = step_down_kfwer_iterates(&b, 1, &fam(&[1.0; 5])).unwrap();
        assert_eq!(iterates.len(), 1);
    }

    #[test]
    fn phi_k1_is_acceptance_region() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for _ in 0..200 {
            let m = rng.random_range(2..10);
            let f = random_family(&mut rng, m);
            let b = BonferroniFamily::new(1, 0.1).unwrap();
            let members: Vec<usize> = (0..m).filter(|_| rng.random_bool(0.6)).collect();
            let c = Subset::from_indices(m, &members).unwrap();
            let want = accepted_for(&b, &c, 1, &f);
            assert_eq!(phi(&c, &b, 1, &f).unwrap(), want);
            assert_eq!(phi_enumerated(&c, &b, 1, &f).unwrap(), want);
        }
    }

    #[test]
    fn phi_fast_path_matches_enumeration() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        for _ in 0..500 {
            let m = rng.random_range(2..=8);
            let k = rng.random_range(1..=m);
            let alpha = rng.random_range(0.01..0.5);
            let f = random_family(&mut rng, m);
            let b = BonferroniFamily::new(k, alpha).unwrap();
            let members: Vec<usize> = (0..m).filter(|_| rng.random_bool(0.5)).collect();
            let c = Subset::from_indices(m, &members).unwrap();
            let fast = phi(&c, &b, k, &f).unwrap();
            let slow = phi(&c, &opaque_bonferroni(k, alpha), k, &f).unwrap();
            assert_eq!(fast, slow);
        }
    }

    #[test]
    fn phi_is_nondecreasing_in_c() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..300 {
            let m = rng.random_range(2..=7);
            let k = rng.random_range(1..=3);
            let f = random_family(&mut rng, m);
            let fam_opaque = opaque_bonferroni(k, 0.2);
            let small: Vec<usize> = (0..m).filter(|_| rng.random_bool(0.4)).collect();
            let c = Subset::from_indices(m, &small).unwrap();
            let mut big = c.clone();
            for i in 0..m {
                if rng.random_bool(0.5) {
                    big.insert(i);
                }
            }
            let a = phi(&c, &fam_opaque, k, &f).unwrap();
            let b = phi(&big, &fam_opaque, k, &f).unwrap();
            assert!(a.is_subset_of(&b));
        }
    }

    #[test]
    fn step_down_kfwer_equals_generalized_holm() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for _ in 0..1000 {
            let m = rng.random_range(2..=30);
            let k = rng.random_range(1..=m.min(5));
            let alpha = rng.random_range(0.01..0.5);
            let f = random_family(&mut rng, m);
            let b = BonferroniFamily::new(k, alpha).unwrap();
            let sd = step_down_kfwer(&b, k, &f).unwrap();
            assert!(sd.same_indices(&generalized_holm(&f, alpha, k).unwrap()));
            assert!(single_step(&b, &f).is_subset_of(&sd));
            if k == 1 {
                assert_eq!(sd, step_down_fwer(&b, &f).unwrap());
            }
        }
    }

    #[test]
    fn iterates_shrink_and_terminate() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..300 {
            let m = rng.random_range(2..=8);
            let k = rng.random_range(1..=3);
            let f = random_family(&mut rng, m);
            let iterates = step_down_kfwer_iterates(&opaque_bonferroni(k, 0.3), k, &f).unwrap();
            assert!(iterates.len() <= m + 1);
            for w in iterates.windows(2) {
                assert!(w[1].is_subset_of(&w[0]) && w[1] != w[0]);
            }
        }
    }

    #[test]
    fn streamlined_agrees_with_full_phi_under_dirac() {
        let mut rng = ChaCha8Rng::seed_from_u64(10);
        for _ in 0..500 {
            let m = rng.random_range(2..=8);
            let k = rng.random_range(1..=3);
            let v: Vec<f64> = (0..m)
                .map(|_| if rng.random_bool(0.4) { 0.0 } else { rng.random() })
                .collect();
            let f = fam(&v);
            let custom = opaque_bonferroni(k, 0.2);
            let full = step_down_kfwer(&custom, k, &f).unwrap();
            let streamlined = streamlined_step_down_kfwer(&custom, k, &f).unwrap();
            assert_eq!(full, streamlined);
        }
    }

    #[test]
    fn streamlined_rejects_at_least_as_much() {
        // Weighted Bonferroni: R_C = {i : p_i <= alpha k w_i / sum_{j in C} w_j}
        // with w_i = i + 1. Non-increasing, but not a size-only threshold.
        let make = |k: usize| {
            CustomFamily::new(move |c: &Subset, f: &PValueFamily| {
                let total: f64 = c.indices().iter().map(|&j| (j + 1) as f64).sum();
                RejectionSet::from_indices(
                    (0..f.m())
                        .filter(|&i| f.get(i) <= 0.3 * k as f64 * (i + 1) as f64 / total)
                        .collect(),
                )
            })
        };
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        let mut checked = 0;
        for _ in 0..400 {
            let m = rng.random_range(2..=8);
            let k = rng.random_range(1..=3);
            let f = random_family(&mut rng, m);
            let custom = make(k);
            custom.validate(&f).unwrap();
            if f.m() > 3 {
                checked += 1;
            }
            let full = step_down_kfwer(&custom, k, &f).unwrap();
            let streamlined = streamlined_step_down_kfwer(&custom, k, &f).unwrap();
            assert!(full.is_subset_of(&streamlined));
        }
        assert!(checked > 100);
    }

    #[test]
    fn streamlined_k1_is_acceptance_region() {
        let f = fam(&[0.01, 0.2, 0.03, 0.5]);
        let b = BonferroniFamily::new(1, 0.1).unwrap();
        let c = Subset::from_indices(4, &[1, 3]).unwrap();
        assert_eq!(streamlined_phi(&c, &b, 1, &f).unwrap(), accepted_for(&b, &c, 1, &f));
    }

    #[test]
    fn enumeration_guard_triggers() {
        assert_eq!(enumeration_count(4, 3), 1 + 4 + 6);
        assert_eq!(enumeration_count(2, 5), 4);
        let m = 60;
        let f = fam(&vec![0.5; m]);
        let c = Subset::from_indices(m, &[0]).unwrap();
        // 1 + 59 + 1711 + 32509 + 455126 sets for k = 5
        let err = phi(&c, &opaque_bonferroni(5, 0.1), 5, &f).unwrap_err();
        assert!(matches!(err, Error::EnumerationLimit { .. }));
        assert!(err.to_string().contains("streamlined"));
        // the streamlined variant has no such limit
        assert!(streamlined_phi(&c, &opaque_bonferroni(5, 0.1), 5, &f).is_ok());
    }

    #[test]
    fn non_monotone_custom_family_is_rejected() {
        // larger C => larger threshold: violates the non-increasing property
        let bad = CustomFamily::new(|c: &Subset, f: &PValueFamily| {
            RejectionSet::at_threshold(f, 0.1 * c.len() as f64 / f.m() as f64)
        });
        let f = fam(&[0.01, 0.04, 0.07, 0.2]);
        assert!(matches!(step_down_fwer(&bad, &f), Err(Error::NonIncreasingViolated(_))));
        assert!(matches!(step_down_kfwer(&bad, 2, &f), Err(Error::NonIncreasingViolated(_))));
        assert!(opaque_bonferroni(2, 0.1).validate(&f).is_ok());
    }

    #[test]
    fn bonferroni_family_is_non_increasing_on_random_chains() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        for seed in 0..100 {
            let m = rng.random_range(2..15);
            let f = random_family(&mut rng, m);
            let b = BonferroniFamily::new(rng.random_range(1..4), 0.2).unwrap();
            assert!(check_non_increasing(&b, &f, 8, seed).is_ok());
        }
    }
}
