//! Statistical machinery turning simulation output into verdicts:
//! chi-square goodness of fit against an exact partition law, two-sample
//! chi-square between samplers, binomial confidence intervals, and the
//! orchestration that checks a simulated hitting-partition distribution
//! against its Poisson-Dirichlet target.

use std::collections::HashMap;
use std::fmt::Display;
use std::hash::Hash;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::maxid::{simulate_partition, SubFrechetModel};
use crate::partition::{enumerate_partitions, pd_eppf, PDParams, SetPartition};
use crate::sampling::RngStream;
use crate::special::{normal_quantile, reg_gamma_upper};
use crate::subordinator::LevyMeasure;

/// Verdict threshold: a fit passes when the p-value exceeds this. Kept
/// deliberately low because dozens of statistical checks run per suite.
pub const GOF_PASS_P_VALUE: f64 = 0.001;

/// Minimum expected count per retained chi-square cell.
const MIN_EXPECTED: f64 = 5.0;

/// One retained chi-square cell.
#[derive(Debug, Clone, Serialize)]
pub struct GofCell {
    pub label: String,
    pub observed: u64,
    pub expected: f64,
}

/// Pearson goodness-of-fit report.
#[derive(Debug, Clone, Serialize)]
pub struct GofReport {
    pub statistic: f64,
    pub dof: usize,
    pub p_value: f64,
    /// Retained cells, largest expectation first; a pooled cell, when
    /// present, is labeled `pooled(<count>)`.
    pub cells: Vec<GofCell>,
    /// Number of low-expectation cells merged into the pooled cell.
    pub merged_cells: usize,
}

impl GofReport {
    pub fn passes(&self) -> bool {
        self.p_value > GOF_PASS_P_VALUE
    }
}

/// Chi-square upper tail probability at `statistic` with `dof` degrees
/// of freedom.
pub fn chi_square_upper_tail(statistic: f64, dof: usize) -> Result<f64> {
    if dof == 0 {
        return Err(Error::invalid("degrees of freedom must be positive"));
    }
    if !(statistic >= 0.0) {
        return Err(Error::invalid(format!(
            "chi-square statistic must be nonnegative, got {statistic}"
        )));
    }
    reg_gamma_upper(dof as f64 / 2.0, statistic / 2.0)
}

/// Pearson chi-square test of observed counts against expected cell
/// probabilities. Cells whose expected count falls below five are pooled
/// into a single cell (smallest expectations first) before the statistic
/// is formed; the upper tail is evaluated with `retained cells - 1`
/// degrees of freedom.
pub fn chi_square_gof<K>(observed: &HashMap<K, u64>, expected: &[(K, f64)]) -> Result<GofReport>
where
    K: Eq + Hash + Display,
{
    let prob_sum: f64 = expected.iter().map(|(_, p)| p).sum();
    if (prob_sum - 1.0).abs() > 1e-9 {
        return Err(Error::invalid(format!(
            "expected probabilities sum to {prob_sum}, not 1"
        )));
    }
    let total: u64 = observed.values().sum();
    if total < 1000 {
        return Err(Error::invalid(format!(
            "need at least 1000 observations, got {total}"
        )));
    }
    let known: HashMap<&K, f64> = expected.iter().map(|(k, p)| (k, *p)).collect();
    for k in observed.keys() {
        if !known.contains_key(k) {
            return Err(Error::invalid(format!(
                "observed cell {k} missing from the expected table"
            )));
        }
    }

    let nf = total as f64;
    let mut cells: Vec<(String, u64, f64)> = expected
        .iter()
        .map(|(k, p)| (k.to_string(), observed.get(k).copied().unwrap_or(0), p * nf))
        .collect();
    // Ascending by expectation, label as tiebreak, so pooling is
    // deterministic.
    cells.sort_by(|a, b| a.2.partial_cmp(&b.2).unwrap().then(a.0.cmp(&b.0)));

    let mut pooled_obs = 0u64;
    let mut pooled_exp = 0.0f64;
    let mut merged = 0usize;
    let mut retained: Vec<(String, u64, f64)> = Vec::new();
    for (label, obs, exp) in cells {
        if exp < MIN_EXPECTED || (merged > 0 && pooled_exp < MIN_EXPECTED) {
            pooled_obs += obs;
            pooled_exp += exp;
            merged += 1;
        } else {
            retained.push((label, obs, exp));
        }
    }
    if merged > 0 {
        if pooled_exp < MIN_EXPECTED && !retained.is_empty() {
            // Absorb the smallest retained cell so the pool itself is
            // valid.
            let (_, obs, exp) = retained.remove(0);
            pooled_obs += obs;
            pooled_exp += exp;
            merged += 1;
        }
        retained.push((format!("pooled({merged})"), pooled_obs, pooled_exp));
    }
    if retained.len() < 2 {
        return Err(Error::DegenerateTest(
            "fewer than two cells remain after pooling".into(),
        ));
    }

    let statistic: f64 = retained
        .iter()
        .map(|(_, obs, exp)| {
            let d = *obs as f64 - exp;
            d * d / exp
        })
        .sum();
    let dof = retained.len() - 1;
    let p_value = chi_square_upper_tail(statistic, dof)?;

    retained.sort_by(|a, b| b.2.partial_cmp(&a.2).unwrap().then(a.0.cmp(&b.0)));
    Ok(GofReport {
        statistic,
        dof,
        p_value,
        cells: retained
            .into_iter()
            .map(|(label, observed, expected)| GofCell {
                label,
                observed,
                expected,
            })
            .collect(),
        merged_cells: merged,
    })
}

/// One cell of a two-sample comparison.
#[derive(Debug, Clone, Serialize)]
pub struct TwoSampleCell {
    pub label: String,
    pub observed_left: u64,
    pub observed_right: u64,
}

/// Two-sample chi-square homogeneity report.
#[derive(Debug, Clone, Serialize)]
pub struct TwoSampleReport {
    pub statistic: f64,
    pub dof: usize,
    pub p_value: f64,
    pub cells: Vec<TwoSampleCell>,
    pub merged_cells: usize,
}

impl TwoSampleReport {
    pub fn passes(&self) -> bool {
        self.p_value > GOF_PASS_P_VALUE
    }
}

/// Chi-square homogeneity test between two count tables: under the null
/// both samples come from the same (unspecified) distribution over cells.
pub fn chi_square_two_sample<K>(
    left: &HashMap<K, u64>,
    right: &HashMap<K, u64>,
) -> Result<TwoSampleReport>
where
    K: Eq + Hash + Display + Clone,
{
    let n_left: u64 = left.values().sum();
    let n_right: u64 = right.values().sum();
    if n_left < 1000 || n_right < 1000 {
        return Err(Error::invalid(
            "need at least 1000 observations in each sample",
        ));
    }
    let mut keys: Vec<K> = left.keys().chain(right.keys()).cloned().collect();
    keys.sort_by_key(|k| k.to_string());
    keys.dedup_by_key(|k| k.to_string());

    let nl = n_left as f64;
    let nr = n_right as f64;
    let nt = nl + nr;
    let min_group = nl.min(nr);
    let mut cells: Vec<(String, u64, u64)> = keys
        .into_iter()
        .map(|k| {
            (
                k.to_string(),
                left.get(&k).copied().unwrap_or(0),
                right.get(&k).copied().unwrap_or(0),
            )
        })
        .collect();
    // Pool by the smaller group's expected count.
    cells.sort_by(|a, b| {
        (a.1 + a.2).cmp(&(b.1 + b.2)).then(a.0.cmp(&b.0))
    });
    let mut retained: Vec<(String, u64, u64)> = Vec::new();
    let mut pool = (0u64, 0u64);
    let mut merged = 0usize;
    for (label, l, r) in cells {
        let expected_small = min_group * (l + r) as f64 / nt;
        let pool_small = min_group * (pool.0 + pool.1) as f64 / nt;
        if expected_small < MIN_EXPECTED || (merged > 0 && pool_small < MIN_EXPECTED) {
            pool.0 += l;
            pool.1 += r;
            merged += 1;
        } else {
            retained.push((label, l, r));
        }
    }
    if merged > 0 {
        if min_group * (pool.0 + pool.1) as f64 / nt < MIN_EXPECTED && !retained.is_empty() {
            let (_, l, r) = retained.remove(0);
            pool.0 += l;
            pool.1 += r;
            merged += 1;
        }
        retained.push((format!("pooled({merged})"), pool.0, pool.1));
    }
    if retained.len() < 2 {
        return Err(Error::DegenerateTest(
            "fewer than two cells remain after pooling".into(),
        ));
    }

    let mut statistic = 0.0;
    for (_, l, r) in &retained {
        let p_hat = (*l + *r) as f64 / nt;
        for (obs, ng) in [(*l as f64, nl), (*r as f64, nr)] {
            let exp = ng * p_hat;
            let d = obs - exp;
            statistic += d * d / exp;
        }
    }
    let dof = retained.len() - 1;
    let p_value = chi_square_upper_tail(statistic, dof)?;
    retained.sort_by(|a, b| (b.1 + b.2).cmp(&(a.1 + a.2)).then(a.0.cmp(&b.0)));
    Ok(TwoSampleReport {
        statistic,
        dof,
        p_value,
        cells: retained
            .into_iter()
            .map(|(label, observed_left, observed_right)| TwoSampleCell {
                label,
                observed_left,
                observed_right,
            })
            .collect(),
        merged_cells: merged,
    })
}

/// Normal-approximation binomial confidence interval.
#[derive(Debug, Clone, Serialize)]
pub struct CiReport {
    pub estimate: f64,
    pub half_width: f64,
    pub level: f64,
    pub n: u64,
    /// True when the plug-in variance collapses to zero (all successes
    /// or all failures), making the reported width meaningless.
    pub degenerate: bool,
}

/// Two-sided interval `p_hat +/- z sqrt(p_hat (1 - p_hat) / trials)`.
/// Approximate by construction; degenerate at the boundary estimates.
pub fn binomial_ci(successes: u64, trials: u64, level: f64) -> Result<CiReport> {
    if trials == 0 {
        return Err(Error::invalid("trials must be at least 1"));
    }
    if successes > trials {
        return Err(Error::invalid("successes cannot exceed trials"));
    }
    if !(level > 0.0 && level < 1.0) {
        return Err(Error::invalid(format!("level must lie in (0,1), got {level}")));
    }
    let p_hat = successes as f64 / trials as f64;
    let z = normal_quantile((1.0 + level) / 2.0)?;
    let half_width = z * (p_hat * (1.0 - p_hat) / trials as f64).sqrt();
    Ok(CiReport {
        estimate: p_hat,
        half_width,
        level,
        n: trials,
        degenerate: successes == 0 || successes == trials,
    })
}

/// Outcome of checking a simulated hitting-partition distribution
/// against its Poisson-Dirichlet target.
#[derive(Debug, Clone, Serialize)]
pub struct VerifyOutcome {
    pub report: GofReport,
    pub pass: bool,
    /// Target law implied by the Lévy measure.
    pub target: PDParams,
    /// Worst certified truncation over all replicates.
    pub max_truncation_ratio: f64,
    pub samples: usize,
    pub seed: u64,
}

/// Default truncation tolerance for verification runs: at 2e5 samples the
/// induced partition-law bias is orders of magnitude below the chi-square
/// noise floor, while keeping the stable jump budget near 2/tolerance
/// jumps per replicate.
pub const VERIFY_DEFAULT_TOLERANCE: f64 = 1e-4;

/// Poisson-Dirichlet law induced by a Lévy measure: `PD(alpha, 0)` for
/// the stable measure, `PD(0, theta)` for the gamma measure.
pub fn pd_target(measure: &LevyMeasure) -> PDParams {
    match measure.stable_alpha() {
        Some(alpha) => PDParams::new(alpha, 0.0).expect("alpha in (0,1) is legitimate"),
        None => {
            let theta = measure.gamma_theta().expect("measure is stable or gamma");
            PDParams::new(0.0, theta).expect("theta > 0 is legitimate")
        }
    }
}

/// Exact partition probabilities for all partitions of `[n]` under the
/// Poisson-Dirichlet law.
pub fn pd_partition_table(params: &PDParams, n: usize) -> Result<Vec<(SetPartition, f64)>> {
    Ok(enumerate_partitions(n)?
        .map(|p| {
            let prob = pd_eppf(params, &p.block_sizes());
            (p, prob)
        })
        .collect())
}

/// Simulate `samples` hitting partitions of the max-i.d. vector with the
/// given Lévy measure and test them against the Poisson-Dirichlet target
/// by chi-square over all partitions of `[n]`.
///
/// Replicate `i` draws from the stream `(seed, i)`, so results are
/// independent of the number of worker threads.
pub fn verify_corollary(
    measure: &LevyMeasure,
    n: usize,
    samples: usize,
    seed: u64,
    residual_tolerance: f64,
    max_jumps: usize,
) -> Result<VerifyOutcome> {
    if !(2..=6).contains(&n) {
        return Err(Error::invalid(format!(
            "verification supports n in 2..=6, got {n}"
        )));
    }
    if samples < 100_000 {
        return Err(Error::invalid(format!(
            "verification needs at least 100000 samples, got {samples}"
        )));
    }
    let model = SubFrechetModel::standard(*measure, n)?;
    let (observed, max_ratio) = count_partitions_parallel(samples, seed, |rng| {
        let draw = simulate_partition(&model, residual_tolerance, max_jumps, rng)?;
        Ok((draw.partition, draw.truncation_ratio))
    })?;

    let target = pd_target(measure);
    let expected = pd_partition_table(&target, n)?;
    let report = chi_square_gof(&observed, &expected)?;
    let pass = report.passes();
    Ok(VerifyOutcome {
        report,
        pass,
        target,
        max_truncation_ratio: max_ratio,
        samples,
        seed,
    })
}

/// Shard `samples` replicates over worker threads, one stream per
/// replicate, and merge the partition counts along with the worst
/// truncation ratio.
pub fn count_partitions_parallel<F>(
    samples: usize,
    seed: u64,
    draw: F,
) -> Result<(HashMap<SetPartition, u64>, f64)>
where
    F: Fn(&mut RngStream) -> Result<(SetPartition, f64)> + Sync,
{
    (0..samples)
        .into_par_iter()
        .try_fold(
            || (HashMap::new(), 0.0f64),
            |(mut counts, mut worst), i| {
                let mut rng = RngStream::new(seed, i as u64);
                let (p, ratio) = draw(&mut rng)?;
                *counts.entry(p).or_insert(0) += 1;
                if ratio > worst {
                    worst = ratio;
                }
                Ok((counts, worst))
            },
        )
        .try_reduce(
            || (HashMap::new(), 0.0f64),
            |(mut a, wa), (b, wb)| {
                for (k, v) in b {
                    *a.entry(k).or_insert(0) += v;
                }
                Ok((a, wa.max(wb)))
            },
        )
}

#[cfg(test)]
mod tests {
    use super::*;

    fn counts(pairs: &[(&str, u64)]) -> HashMap<String, u64> {
        pairs.iter().map(|(k, v)| (k.to_string(), *v)).collect()
    }

    #[test]
    fn exact_proportional_counts_give_zero_statistic() {
        let observed = counts(&[("a", 600), ("b", 400)]);
        let expected = vec![("a".to_string(), 0.6), ("b".to_string(), 0.4)];
        let r = chi_square_gof(&observed, &expected).unwrap();
        assert!(r.statistic.abs() < 1e-9);
        assert!((r.p_value - 1.0).abs() < 1e-9);
        assert_eq!(r.dof, 1);
    }

    #[test]
    fn hand_computed_statistic() {
        // uniform over 2 cells, observed (600, 400) of 1000:
        // (100^2/500) * 2 = 40
        let observed = counts(&[("a", 600), ("b", 400)]);
        let expected = vec![("a".to_string(), 0.5), ("b".to_string(), 0.5)];
        let r = chi_square_gof(&observed, &expected).unwrap();
        assert!((r.statistic - 40.0).abs() < 1e-9);
        assert!(r.p_value < 1e-9);
    }

    #[test]
    fn upper_tail_quantile() {
        let p = chi_square_upper_tail(3.841, 1).unwrap();
        assert!((p - 0.05).abs() < 1e-3);
    }

    #[test]
    fn permutation_invariant_in_cell_order() {
        let observed = counts(&[("a", 300), ("b", 400), ("c", 300)]);
        let fwd = vec![
            ("a".to_string(), 0.3),
            ("b".to_string(), 0.4),
            ("c".to_string(), 0.3),
        ];
        let mut rev = fwd.clone();
        rev.reverse();
        let r1 = chi_square_gof(&observed, &fwd).unwrap();
        let r2 = chi_square_gof(&observed, &rev).unwrap();
        assert_eq!(r1.statistic.to_bits(), r2.statistic.to_bits());
        assert_eq!(r1.p_value.to_bits(), r2.p_value.to_bits());
    }

    #[test]
    fn pooling_respects_minimum_expectation() {
        // 1e-4 of 2000 = 0.2 expected: must be pooled away.
        let observed = counts(&[("a", 1000), ("b", 990), ("rare1", 5), ("rare2", 5)]);
        let expected = vec![
            ("a".to_string(), 0.5),
            ("b".to_string(), 0.4955),
            ("rare1".to_string(), 0.002),
            ("rare2".to_string(), 0.0025),
        ];
        let r = chi_square_gof(&observed, &expected).unwrap();
        assert!(r.merged_cells >= 2);
        assert!(r.cells.iter().all(|c| c.expected >= MIN_EXPECTED));
        let total_obs: u64 = r.cells.iter().map(|c| c.observed).sum();
        assert_eq!(total_obs, 2000);
        let total_exp: f64 = r.cells.iter().map(|c| c.expected).sum();
        assert!((total_exp - 2000.0).abs() < 1e-6 * 2000.0);
    }

    #[test]
    fn degenerate_expected_vector_rejected() {
        let observed = counts(&[("a", 2000)]);
        let expected = vec![("a".to_string(), 1.0)];
        assert!(matches!(
            chi_square_gof(&observed, &expected),
            Err(Error::DegenerateTest(_))
        ));
    }

    #[test]
    fn unknown_observed_cell_rejected() {
        let observed = counts(&[("a", 600), ("zz", 400)]);
        let expected = vec![("a".to_string(), 0.5), ("b".to_string(), 0.5)];
        assert!(chi_square_gof(&observed, &expected).is_err());
    }

    #[test]
    fn small_sample_rejected() {
        let observed = counts(&[("a", 300), ("b", 400)]);
        let expected = vec![("a".to_string(), 0.5), ("b".to_string(), 0.5)];
        assert!(chi_square_gof(&observed, &expected).is_err());
    }

    #[test]
    fn two_sample_identical_counts_pass() {
        let a = counts(&[("x", 5000), ("y", 5000)]);
        let r = chi_square_two_sample(&a, &a).unwrap();
        assert!(r.statistic.abs() < 1e-9);
        assert!(r.passes());
    }

    #[test]
    fn two_sample_detects_gross_difference() {
        let a = counts(&[("x", 7000), ("y", 3000)]);
        let b = counts(&[("x", 3000), ("y", 7000)]);
        let r = chi_square_two_sample(&a, &b).unwrap();
        assert!(!r.passes());
    }

    #[test]
    fn binomial_ci_values() {
        let r = binomial_ci(375, 1000, 0.95).unwrap();
        assert!((r.estimate - 0.375).abs() < 1e-12);
        assert!(!r.degenerate);

        // level 0.997 has z close to 3, giving half width near
        // 3 sqrt(0.25/1000) = 0.04743
        let r = binomial_ci(500, 1000, 0.997).unwrap();
        assert!((r.half_width - 0.0474).abs() < 1e-3);

        let r = binomial_ci(0, 1000, 0.99).unwrap();
        assert_eq!(r.estimate, 0.0);
        assert_eq!(r.half_width, 0.0);
        assert!(r.degenerate);
    }

    #[test]
    fn binomial_ci_rejects_bad_input() {
        assert!(binomial_ci(5, 0, 0.95).is_err());
        assert!(binomial_ci(5, 4, 0.95).is_err());
        assert!(binomial_ci(5, 10, 1.0).is_err());
    }

    #[test]
    fn verify_rejects_out_of_range_config() {
        let measure = LevyMeasure::stable(0.5).unwrap();
        assert!(verify_corollary(&measure, 7, 200_000, 1, 1e-4, 1000).is_err());
        assert!(verify_corollary(&measure, 4, 5_000, 1, 1e-4, 1000).is_err());
    }

    #[test]
    fn pd_targets() {
        let t = pd_target(&LevyMeasure::stable(0.4).unwrap());
        assert_eq!((t.alpha(), t.theta()), (0.4, 0.0));
        let t = pd_target(&LevyMeasure::gamma(2.5).unwrap());
        assert_eq!((t.alpha(), t.theta()), (0.0, 2.5));
    }
}
