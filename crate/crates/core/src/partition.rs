//! Set partitions of `{0, ..., n-1}`, their enumeration, the exact
//! Poisson-Dirichlet partition probability, and the three samplers that
//! realize it: the Chinese restaurant process, stick-breaking paintboxes,
//! and paintboxes over normalized subordinator jumps.
//!
//! Partitions are stored as restricted growth strings: element 0 carries
//! label 0 and each later element carries either an existing label or the
//! smallest unused one. Two partitions are equal exactly when their
//! strings are equal, which gives O(n) comparison and hashing and a
//! canonical text form such as `0,0,1,0`.

use std::collections::HashMap;
use std::fmt;

use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::sampling::{sample_beta, RngStream};
use crate::subordinator::JumpSequence;

/// Largest `n` for which exhaustive enumeration is offered;
/// Bell(12) = 4,213,597 cells.
pub const MAX_ENUMERATION_N: usize = 12;

/// A partition of `{0, ..., n-1}` in restricted growth form.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SetPartition {
    assignment: Vec<u32>,
}

impl SetPartition {
    /// Canonicalize an arbitrary label sequence: elements with equal
    /// labels land in the same block, labels are renumbered by first
    /// appearance.
    pub fn from_labels<T: Eq + std::hash::Hash>(labels: &[T]) -> Result<Self> {
        if labels.is_empty() {
            return Err(Error::invalid("partition needs at least one element"));
        }
        let mut seen: HashMap<&T, u32> = HashMap::new();
        let mut assignment = Vec::with_capacity(labels.len());
        for l in labels {
            let next = seen.len() as u32;
            assignment.push(*seen.entry(l).or_insert(next));
        }
        Ok(SetPartition { assignment })
    }

    /// Canonicalize an explicit block collection. Blocks must be
    /// disjoint, nonempty, and cover `{0, ..., n-1}` where `n` is the
    /// total number of elements.
    pub fn from_blocks(blocks: &[Vec<usize>]) -> Result<Self> {
        let n: usize = blocks.iter().map(|b| b.len()).sum();
        if n == 0 {
            return Err(Error::invalid("partition needs at least one element"));
        }
        let mut raw = vec![usize::MAX; n];
        for (b, block) in blocks.iter().enumerate() {
            if block.is_empty() {
                return Err(Error::invalid("blocks must be nonempty"));
            }
            for &e in block {
                if e >= n {
                    return Err(Error::invalid(format!(
                        "element {e} outside 0..{n}"
                    )));
                }
                if raw[e] != usize::MAX {
                    return Err(Error::invalid(format!("element {e} appears twice")));
                }
                raw[e] = b;
            }
        }
        // Coverage is implied: n slots, n placements, no duplicates.
        Self::from_labels(&raw)
    }

    /// Accept a sequence already in restricted growth form.
    pub fn from_assignment(assignment: Vec<u32>) -> Result<Self> {
        if assignment.is_empty() {
            return Err(Error::invalid("partition needs at least one element"));
        }
        let mut max_label = None::<u32>;
        for (i, &a) in assignment.iter().enumerate() {
            let bound = max_label.map_or(0, |m| m + 1);
            if a > bound {
                return Err(Error::invalid(format!(
                    "label {a} at position {i} violates restricted growth"
                )));
            }
            max_label = Some(max_label.map_or(a, |m| m.max(a)));
        }
        Ok(SetPartition { assignment })
    }

    pub fn n(&self) -> usize {
        self.assignment.len()
    }

    pub fn assignment(&self) -> &[u32] {
        &self.assignment
    }

    pub fn num_blocks(&self) -> usize {
        self.assignment.iter().map(|&a| a as usize + 1).max().unwrap_or(0)
    }

    pub fn is_single_block(&self) -> bool {
        self.assignment.iter().all(|&a| a == 0)
    }

    /// Blocks as element lists, indexed by label.
    pub fn blocks(&self) -> Vec<Vec<usize>> {
        let mut blocks = vec![Vec::new(); self.num_blocks()];
        for (i, &a) in self.assignment.iter().enumerate() {
            blocks[a as usize].push(i);
        }
        blocks
    }

    /// Multiset of block sizes in nonincreasing order.
    pub fn block_sizes(&self) -> BlockSizes {
        let mut counts = vec![0usize; self.num_blocks()];
        for &a in &self.assignment {
            counts[a as usize] += 1;
        }
        BlockSizes::new(counts).expect("valid partition yields valid sizes")
    }

    /// Partition induced on the first `k` elements.
    pub fn restrict(&self, k: usize) -> Result<SetPartition> {
        if k == 0 || k > self.n() {
            return Err(Error::invalid(format!(
                "restriction length {k} outside 1..={}",
                self.n()
            )));
        }
        Self::from_labels(&self.assignment[..k])
    }
}

impl fmt::Display for SetPartition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, a) in self.assignment.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{a}")?;
        }
        Ok(())
    }
}

impl Serialize for SetPartition {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

/// Block sizes of a partition of `n` elements, stored nonincreasing.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct BlockSizes {
    sizes: Vec<usize>,
}

impl BlockSizes {
    pub fn new(mut sizes: Vec<usize>) -> Result<Self> {
        if sizes.is_empty() {
            return Err(Error::invalid("at least one block required"));
        }
        if sizes.contains(&0) {
            return Err(Error::invalid("block sizes must be positive"));
        }
        sizes.sort_unstable_by(|a, b| b.cmp(a));
        Ok(BlockSizes { sizes })
    }

    pub fn sizes(&self) -> &[usize] {
        &self.sizes
    }

    /// Number of blocks.
    pub fn k(&self) -> usize {
        self.sizes.len()
    }

    /// Number of elements.
    pub fn n(&self) -> usize {
        self.sizes.iter().sum()
    }
}

/// Parameter pair `(alpha, theta)` of the two-parameter Poisson-Dirichlet
/// family. Legitimate values are `alpha < 0` with `theta = -m * alpha`
/// for a positive integer `m`, or `alpha` in `[0, 1]` with
/// `theta > -alpha`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PDParams {
    alpha: f64,
    theta: f64,
}

impl PDParams {
    pub fn new(alpha: f64, theta: f64) -> Result<Self> {
        if !alpha.is_finite() || !theta.is_finite() {
            return Err(Error::invalid("parameters must be finite"));
        }
        let legitimate = if alpha < 0.0 {
            let m = theta / -alpha;
            m > 0.5 && (m - m.round()).abs() <= 1e-9 * m.max(1.0)
        } else {
            alpha <= 1.0 && theta > -alpha
        };
        if !legitimate {
            return Err(Error::invalid(format!(
                "(alpha, theta) = ({alpha}, {theta}) is not a legitimate \
                 Poisson-Dirichlet parameter pair"
            )));
        }
        Ok(PDParams { alpha, theta })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    fn require_sampler_domain(&self) -> Result<()> {
        if !(self.alpha >= 0.0 && self.alpha < 1.0) {
            return Err(Error::invalid(format!(
                "samplers support alpha in [0,1), got {}",
                self.alpha
            )));
        }
        Ok(())
    }
}

/// Paintbox weights: finitely many block frequencies plus a dust mass
/// whose draws become singletons. Frequencies and dust sum to one.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WeightVector {
    weights: Vec<f64>,
    dust: f64,
}

impl WeightVector {
    pub fn new(weights: Vec<f64>, dust: f64) -> Result<Self> {
        if weights.iter().any(|&w| !(w >= 0.0)) || !(dust >= 0.0) {
            return Err(Error::invalid("weights and dust must be nonnegative"));
        }
        let sum: f64 = weights.iter().sum::<f64>() + dust;
        if (sum - 1.0).abs() > 1e-12 {
            return Err(Error::invalid(format!(
                "weights plus dust must sum to 1, got {sum}"
            )));
        }
        Ok(WeightVector { weights, dust })
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn dust(&self) -> f64 {
        self.dust
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }
}

/// Iterator over all partitions of `{0,...,n-1}` in lexicographic
/// restricted-growth order. Yields Bell(n) partitions.
pub struct PartitionIter {
    assignment: Vec<u32>,
    // bound[i] = 1 + max(assignment[..i]), the largest admissible label
    // at position i.
    bound: Vec<u32>,
    started: bool,
    done: bool,
}

impl Iterator for PartitionIter {
    type Item = SetPartition;

    fn next(&mut self) -> Option<SetPartition> {
        if self.done {
            return None;
        }
        if !self.started {
            self.started = true;
            return Some(SetPartition {
                assignment: self.assignment.clone(),
            });
        }
        let n = self.assignment.len();
        let mut i = n;
        loop {
            if i <= 1 {
                self.done = true;
                return None;
            }
            i -= 1;
            if self.assignment[i] < self.bound[i] {
                break;
            }
        }
        self.assignment[i] += 1;
        for j in i + 1..n {
            self.assignment[j] = 0;
            self.bound[j] = self.bound[j - 1].max(self.assignment[j - 1] + 1);
        }
        Some(SetPartition {
            assignment: self.assignment.clone(),
        })
    }
}

/// Enumerate every partition of `{0,...,n-1}` for `n` up to
/// [`MAX_ENUMERATION_N`].
pub fn enumerate_partitions(n: usize) -> Result<PartitionIter> {
    if n == 0 || n > MAX_ENUMERATION_N {
        return Err(Error::invalid(format!(
            "enumeration supports 1..={MAX_ENUMERATION_N} elements, got {n}"
        )));
    }
    // For the initial all-zeros string the admissible bound is 1
    // everywhere except at position 0, whose label is pinned to 0.
    let mut bound = vec![1u32; n];
    bound[0] = 0;
    Ok(PartitionIter {
        assignment: vec![0; n],
        bound,
        started: false,
        done: false,
    })
}

/// Exact probability that a Poisson-Dirichlet partition of `[n]` takes a
/// given value, as a function of its block sizes `n_1, ..., n_k`:
///
/// ```text
/// p(n_1,...,n_k) = (theta+alpha)_{k-1^alpha} prod_i (1-alpha)_{n_i-1^1}
///                  / (theta+1)_{n-1^1}
/// ```
///
/// with `(x)_{m^a} = x (x+a) ... (x+(m-1)a)`. Computed in log space with
/// sign bookkeeping so that rising factorials neither overflow nor lose
/// the zero cases (`alpha < 0` with more than `theta/-alpha` blocks).
pub fn pd_eppf(params: &PDParams, sizes: &BlockSizes) -> f64 {
    let alpha = params.alpha();
    let theta = params.theta();
    let n = sizes.n();
    let k = sizes.k();

    let mut log_abs = 0.0;
    let mut sign = 1.0;
    let mut push = |factor: f64| -> bool {
        if factor == 0.0 {
            return false;
        }
        if factor < 0.0 {
            sign = -sign;
        }
        log_abs += factor.abs().ln();
        true
    };

    // (theta + alpha)_{k-1 ^ alpha}
    for j in 0..k.saturating_sub(1) {
        if !push(theta + alpha + j as f64 * alpha) {
            return 0.0;
        }
    }
    // prod_i (1 - alpha)_{n_i - 1 ^ 1}
    for &size in sizes.sizes() {
        for j in 0..size - 1 {
            if !push(1.0 - alpha + j as f64) {
                return 0.0;
            }
        }
    }
    // divide by (theta + 1)_{n-1 ^ 1}
    for j in 0..n - 1 {
        let factor = theta + 1.0 + j as f64;
        debug_assert!(factor > 0.0);
        log_abs -= factor.ln();
    }

    let p = sign * log_abs.exp();
    debug_assert!(
        (-1e-12..=1.0 + 1e-9).contains(&p),
        "EPPF out of range: {p}"
    );
    p
}

/// Probability that all of `[n]` falls in one block under the logistic
/// (stable) model: `p(n) = prod_{k=1}^{n-1} (1 - alpha/k)`.
pub fn concurrence_logistic(alpha: f64, n: usize) -> Result<f64> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::invalid(format!(
            "concurrence requires alpha in (0,1), got {alpha}"
        )));
    }
    if n == 0 {
        return Err(Error::invalid("n must be at least 1"));
    }
    let mut p = 1.0;
    for k in 1..n {
        p *= 1.0 - alpha / k as f64;
    }
    Ok(p)
}

/// Paintbox sample: each element draws an independent color, positive
/// colors with the given frequencies merge equal draws, dust draws become
/// singletons.
pub fn paintbox_sample(weights: &WeightVector, n: usize, rng: &mut RngStream) -> Result<SetPartition> {
    if n == 0 {
        return Err(Error::invalid("n must be at least 1"));
    }
    // Dust labels are made unique per element so no two dust draws merge.
    let mut labels = Vec::with_capacity(n);
    for i in 0..n {
        let u = rng.uniform_open01();
        let mut acc = 0.0;
        let mut label = u64::MAX - i as u64;
        for (l, w) in weights.weights().iter().enumerate() {
            acc += w;
            if u < acc {
                label = l as u64;
                break;
            }
        }
        labels.push(label);
    }
    SetPartition::from_labels(&labels)
}

/// Chinese restaurant sampler for `alpha` in `[0,1)`, `theta > -alpha`:
/// element `m+1` joins a block of current size `s` with probability
/// `(s - alpha)/(m + theta)` and opens a new block with probability
/// `(theta + k alpha)/(m + theta)`. The resulting partition law is
/// exactly [`pd_eppf`].
pub fn crp_sample(params: &PDParams, n: usize, rng: &mut RngStream) -> Result<SetPartition> {
    params.require_sampler_domain()?;
    if n == 0 {
        return Err(Error::invalid("n must be at least 1"));
    }
    let alpha = params.alpha();
    let theta = params.theta();
    let mut assignment = Vec::with_capacity(n);
    let mut block_sizes: Vec<usize> = Vec::new();
    assignment.push(0u32);
    block_sizes.push(1);
    for m in 1..n {
        let mut u = rng.uniform_open01() * (m as f64 + theta);
        let mut chosen = block_sizes.len();
        for (b, &s) in block_sizes.iter().enumerate() {
            let w = s as f64 - alpha;
            if u < w {
                chosen = b;
                break;
            }
            u -= w;
        }
        if chosen == block_sizes.len() {
            block_sizes.push(1);
        } else {
            block_sizes[chosen] += 1;
        }
        assignment.push(chosen as u32);
    }
    // Blocks are created in order of first appearance, so the assignment
    // is already in restricted growth form.
    Ok(SetPartition { assignment })
}

/// Stick-breaking frequencies of the size-biased (GEM) ordering: the
/// l-th stick is `W_l prod_{j<l} (1-W_j)` with `W_l ~ Beta(1-alpha,
/// theta + l alpha)`. Returns the first `count` frequencies; the
/// unbroken remainder is reported as dust.
pub fn gem_stick_breaking(
    params: &PDParams,
    count: usize,
    rng: &mut RngStream,
) -> Result<WeightVector> {
    params.require_sampler_domain()?;
    if count == 0 {
        return Err(Error::invalid("count must be at least 1"));
    }
    let alpha = params.alpha();
    let theta = params.theta();
    let mut weights = Vec::with_capacity(count);
    let mut remaining = 1.0f64;
    for l in 1..=count {
        let w = sample_beta(1.0 - alpha, theta + l as f64 * alpha, rng)?;
        let p = remaining * w;
        weights.push(p);
        remaining = (remaining - p).max(0.0);
    }
    WeightVector::new(weights, remaining)
}

/// Smallest stick count whose expected leftover dust drops below 1e-8,
/// capped at 100_000. For `alpha > 0` the expected dust decays only
/// polynomially and the cap binds; callers needing unbiased paintbox
/// draws should prefer [`gem_paintbox_sample`], which breaks sticks on
/// demand and pays no fixed truncation.
pub fn gem_default_count(params: &PDParams) -> usize {
    const TARGET: f64 = 1e-8;
    const CAP: usize = 100_000;
    let alpha = params.alpha();
    let theta = params.theta();
    let mut expected_dust = 1.0f64;
    for l in 1..=CAP {
        // E(1 - W_l) = (theta + l alpha) / (theta + l alpha + 1 - alpha)
        let b = theta + l as f64 * alpha;
        expected_dust *= b / (b + 1.0 - alpha);
        if expected_dust < TARGET {
            return l;
        }
    }
    CAP
}

/// Paintbox over GEM frequencies with sticks broken lazily: each element
/// draws a uniform, and sticks are generated until every uniform is
/// covered (or `max_sticks` is hit, in which case the uncovered elements
/// become dust singletons). Distributionally identical to
/// `paintbox_sample(gem_stick_breaking(params, L, ...), n, ...)` with L
/// large, at a cost that adapts to the sample.
pub fn gem_paintbox_sample(
    params: &PDParams,
    n: usize,
    max_sticks: usize,
    rng: &mut RngStream,
) -> Result<SetPartition> {
    params.require_sampler_domain()?;
    if n == 0 {
        return Err(Error::invalid("n must be at least 1"));
    }
    let alpha = params.alpha();
    let theta = params.theta();
    let coords: Vec<f64> = (0..n).map(|_| rng.uniform_open01()).collect();
    let mut labels: Vec<u64> = (0..n).map(|i| u64::MAX - i as u64).collect();
    let mut unassigned: Vec<usize> = (0..n).collect();
    let mut covered = 0.0f64;
    let mut remaining = 1.0f64;
    let mut l = 0u64;
    while !unassigned.is_empty() && (l as usize) < max_sticks {
        l += 1;
        let w = sample_beta(1.0 - alpha, theta + l as f64 * alpha, rng)?;
        let p = remaining * w;
        covered += p;
        remaining = (remaining - p).max(0.0);
        unassigned.retain(|&i| {
            if coords[i] < covered {
                labels[i] = l - 1;
                false
            } else {
                true
            }
        });
    }
    SetPartition::from_labels(&labels)
}

/// Normalize retained jumps into paintbox weights `P_l = J_l / total`.
/// The dust mass is zero: the omitted tail is certified small by the
/// sequence itself rather than folded into dust.
pub fn normalized_jump_weights(jumps: &JumpSequence) -> WeightVector {
    let total = jumps.total();
    let weights: Vec<f64> = jumps.jumps().iter().map(|j| j / total).collect();
    WeightVector::new(weights, 0.0).expect("jump weights sum to 1 by construction")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::subordinator::LevyMeasure;
    use proptest::prelude::*;

    fn partition(labels: &[u32]) -> SetPartition {
        SetPartition::from_assignment(labels.to_vec()).unwrap()
    }

    #[test]
    fn canonicalize_examples() {
        // one block
        let p = SetPartition::from_blocks(&[vec![0, 1, 2]]).unwrap();
        assert_eq!(p.assignment(), &[0, 0, 0]);
        // element 0 always gets label 0 regardless of block order
        let p = SetPartition::from_blocks(&[vec![1], vec![0, 2]]).unwrap();
        assert_eq!(p.assignment(), &[0, 1, 0]);
        // all singletons
        let p = SetPartition::from_blocks(&[vec![2], vec![0], vec![1]]).unwrap();
        assert_eq!(p.assignment(), &[0, 1, 2]);
    }

    #[test]
    fn canonicalize_is_idempotent() {
        let p = SetPartition::from_blocks(&[vec![3], vec![0, 2], vec![1, 4]]).unwrap();
        let again = SetPartition::from_labels(p.assignment()).unwrap();
        assert_eq!(p, again);
        let from_blocks = SetPartition::from_blocks(&p.blocks()).unwrap();
        assert_eq!(p, from_blocks);
    }

    #[test]
    fn canonicalize_rejects_overlap_and_gap() {
        assert!(SetPartition::from_blocks(&[vec![0, 1], vec![1]]).is_err());
        assert!(SetPartition::from_blocks(&[vec![0], vec![2]]).is_err());
        assert!(SetPartition::from_blocks(&[vec![0], vec![]]).is_err());
    }

    #[test]
    fn restricted_growth_validation() {
        assert!(SetPartition::from_assignment(vec![0, 1, 1, 2]).is_ok());
        assert!(SetPartition::from_assignment(vec![1]).is_err());
        assert!(SetPartition::from_assignment(vec![0, 2]).is_err());
    }

    #[test]
    fn display_form() {
        assert_eq!(partition(&[0, 0, 1, 0]).to_string(), "0,0,1,0");
    }

    #[test]
    fn enumeration_counts_are_bell_numbers() {
        let bell = [1usize, 2, 5, 15, 52, 203, 877, 4140];
        for (i, &b) in bell.iter().enumerate() {
            let n = i + 1;
            let parts: Vec<_> = enumerate_partitions(n).unwrap().collect();
            assert_eq!(parts.len(), b, "Bell({n})");
            // all distinct and valid
            let mut set: std::collections::HashSet<_> = Default::default();
            for p in &parts {
                assert_eq!(p.n(), n);
                assert!(SetPartition::from_assignment(p.assignment().to_vec()).is_ok());
                set.insert(p.clone());
            }
            assert_eq!(set.len(), b);
        }
    }

    #[test]
    fn enumeration_bounds() {
        assert!(enumerate_partitions(0).is_err());
        assert!(enumerate_partitions(13).is_err());
    }

    #[test]
    fn pd_params_domain() {
        assert!(PDParams::new(0.5, 0.0).is_ok());
        assert!(PDParams::new(0.0, 1.0).is_ok());
        assert!(PDParams::new(-0.5, 1.0).is_ok()); // m = 2
        assert!(PDParams::new(-0.5, 1.25).is_err());
        assert!(PDParams::new(0.5, -0.5).is_err());
        assert!(PDParams::new(1.2, 1.0).is_err());
        assert!(PDParams::new(-0.5, -1.0).is_err());
    }

    #[test]
    fn eppf_pair_probability() {
        // single block of [2] has probability 1 - alpha under (alpha, 0)
        let params = PDParams::new(0.5, 0.0).unwrap();
        let p = pd_eppf(&params, &BlockSizes::new(vec![2]).unwrap());
        assert!((p - 0.5).abs() < 1e-15);
        // and 1/(1+theta) under (0, theta)
        let params = PDParams::new(0.0, 1.0).unwrap();
        let p = pd_eppf(&params, &BlockSizes::new(vec![2]).unwrap());
        assert!((p - 0.5).abs() < 1e-15);
    }

    #[test]
    fn eppf_vanishes_beyond_block_budget() {
        // alpha = -0.5, theta = 1 means m = 2 blocks at most
        let params = PDParams::new(-0.5, 1.0).unwrap();
        assert_eq!(pd_eppf(&params, &BlockSizes::new(vec![1, 1, 1]).unwrap()), 0.0);
        assert!(pd_eppf(&params, &BlockSizes::new(vec![2, 1]).unwrap()) > 0.0);
    }

    #[test]
    fn concurrence_matches_eppf_single_block() {
        for n in 1..=8 {
            for alpha in [0.1, 0.3, 0.5, 0.7, 0.9] {
                let exact = concurrence_logistic(alpha, n).unwrap();
                let params = PDParams::new(alpha, 0.0).unwrap();
                let via_eppf = pd_eppf(&params, &BlockSizes::new(vec![n]).unwrap());
                assert!((exact - via_eppf).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn concurrence_known_values() {
        assert!((concurrence_logistic(0.5, 2).unwrap() - 0.5).abs() < 1e-15);
        assert!((concurrence_logistic(0.5, 3).unwrap() - 0.375).abs() < 1e-15);
        assert!((concurrence_logistic(0.5, 1).unwrap() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn paintbox_degenerate_weights() {
        let mut rng = RngStream::new(3, 0);
        let single = WeightVector::new(vec![1.0], 0.0).unwrap();
        let all_dust = WeightVector::new(vec![], 1.0).unwrap();
        for _ in 0..50 {
            let p = paintbox_sample(&single, 3, &mut rng).unwrap();
            assert_eq!(p.assignment(), &[0, 0, 0]);
            let p = paintbox_sample(&all_dust, 3, &mut rng).unwrap();
            assert_eq!(p.assignment(), &[0, 1, 2]);
        }
    }

    #[test]
    fn crp_first_element_always_alone() {
        let params = PDParams::new(0.5, 0.5).unwrap();
        let mut rng = RngStream::new(9, 0);
        let p = crp_sample(&params, 1, &mut rng).unwrap();
        assert_eq!(p.assignment(), &[0]);
    }

    #[test]
    fn crp_rejects_alpha_one_and_negative() {
        let mut rng = RngStream::new(9, 0);
        let one = PDParams::new(1.0, 1.0).unwrap();
        assert!(crp_sample(&one, 3, &mut rng).is_err());
        let neg = PDParams::new(-0.5, 1.0).unwrap();
        assert!(crp_sample(&neg, 3, &mut rng).is_err());
    }

    #[test]
    fn gem_weights_sum_to_one() {
        let mut rng = RngStream::new(13, 0);
        let params = PDParams::new(0.3, 0.7).unwrap();
        for count in [1, 5, 200] {
            let w = gem_stick_breaking(&params, count, &mut rng).unwrap();
            let sum: f64 = w.weights().iter().sum::<f64>() + w.dust();
            assert!((sum - 1.0).abs() < 1e-12);
            assert_eq!(w.len(), count);
        }
    }

    #[test]
    fn gem_default_count_for_theta_one() {
        // alpha = 0: expected dust is (theta/(theta+1))^L, so theta = 1
        // needs ceil(8 ln 10 / ln 2) = 27 sticks.
        let params = PDParams::new(0.0, 1.0).unwrap();
        assert_eq!(gem_default_count(&params), 27);
        // alpha > 0 hits the cap
        let params = PDParams::new(0.5, 0.0).unwrap();
        assert_eq!(gem_default_count(&params), 100_000);
    }

    #[test]
    fn normalized_weights_from_known_jumps() {
        let measure = LevyMeasure::stable(0.5).unwrap();
        let seq = JumpSequence::from_arrivals(&measure, &[1.0, 2.0, 3.0]).unwrap();
        let w = normalized_jump_weights(&seq);
        let expect = [36.0 / 49.0, 9.0 / 49.0, 4.0 / 49.0];
        for (a, b) in w.weights().iter().zip(expect) {
            assert!((a - b).abs() < 1e-12);
        }
        assert_eq!(w.dust(), 0.0);
        assert!(w.weights().windows(2).all(|p| p[0] >= p[1]));
    }

    #[test]
    fn weight_vector_validation() {
        assert!(WeightVector::new(vec![0.5, 0.5], 0.1).is_err());
        assert!(WeightVector::new(vec![-0.1, 1.1], 0.0).is_err());
        assert!(WeightVector::new(vec![0.25, 0.25], 0.5).is_ok());
    }

    proptest! {
        #[test]
        fn canonicalize_invariant_under_block_reorder(perm_seed in 0u64..1000) {
            let blocks = vec![vec![0usize, 3], vec![1], vec![2, 4, 5]];
            let p1 = SetPartition::from_blocks(&blocks).unwrap();
            let mut shuffled = blocks.clone();
            shuffled.rotate_left((perm_seed % 3) as usize);
            let p2 = SetPartition::from_blocks(&shuffled).unwrap();
            prop_assert_eq!(p1, p2);
        }

        #[test]
        fn crp_emits_restricted_growth(seed in 0u64..500, n in 1usize..12) {
            let params = PDParams::new(0.5, 0.5).unwrap();
            let mut rng = RngStream::new(seed, 0);
            let p = crp_sample(&params, n, &mut rng).unwrap();
            prop_assert!(SetPartition::from_assignment(p.assignment().to_vec()).is_ok());
        }

        #[test]
        fn gem_paintbox_emits_restricted_growth(seed in 0u64..200, n in 1usize..10) {
            let params = PDParams::new(0.3, 0.7).unwrap();
            let mut rng = RngStream::new(seed, 1);
            let p = gem_paintbox_sample(&params, n, 10_000, &mut rng).unwrap();
            prop_assert!(SetPartition::from_assignment(p.assignment().to_vec()).is_ok());
            prop_assert_eq!(p.n(), n);
        }

        #[test]
        fn eppf_depends_only_on_size_multiset(sizes in proptest::collection::vec(1usize..5, 1..5)) {
            let params = PDParams::new(0.3, 0.7).unwrap();
            let a = BlockSizes::new(sizes.clone()).unwrap();
            let mut rev = sizes.clone();
            rev.reverse();
            let b = BlockSizes::new(rev).unwrap();
            let pa = pd_eppf(&params, &a);
            let pb = pd_eppf(&params, &b);
            prop_assert!((pa - pb).abs() <= 1e-15 * pa.abs().max(1.0));
        }
    }
}
