//! Simulation of sub-Fréchet max-infinitely-divisible vectors
//!
//! ```text
//! zeta_k = max_l J_l * Y_{l,k},   k = 1..n,
//! ```
//!
//! where `{J_l}` are the jumps of a subordinator with Lévy measure `nu`
//! and the marks `Y_{l,k}` are independent 1-Fréchet with scales
//! `sigma_k`. Each coordinate records which jump attains its maximum;
//! coordinates sharing a jump form the hitting partition.
//!
//! Conditionally on the jumps, the attaining label of every coordinate is
//! distributed over `l` with probability `J_l / sum J`, independently
//! across coordinates and independently of the scales. That identity
//! justifies the partition-only fast path [`simulate_partition`] and is
//! itself exposed for testing via [`conditional_label_law`].
//!
//! The stable subordinator enters the model in standardized form: raw
//! jumps `Γ^{-1/alpha}` are scaled by `Γ(1-alpha)^{-1/alpha}` so that the
//! total mass has Laplace transform `exp(-t^alpha)` and the coordinates
//! are alpha-Fréchet with exactly the given scales. Normalizing a jump
//! sequence washes the constant out, so hitting partitions are identical
//! with or without it; only the magnitudes of `zeta` depend on it.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::partition::{normalized_jump_weights, SetPartition, WeightVector};
use crate::sampling::{frechet_quantile, FrechetScale, RngStream};
use crate::subordinator::{generate_jumps, JumpSequence, LevyMeasure};

/// A Lévy measure together with the marginal Fréchet scales; fully
/// specifies the max-i.d. vector.
#[derive(Debug, Clone)]
pub struct SubFrechetModel {
    measure: LevyMeasure,
    scales: Vec<FrechetScale>,
}

impl SubFrechetModel {
    pub fn new(measure: LevyMeasure, scales: Vec<f64>) -> Result<Self> {
        if scales.is_empty() {
            return Err(Error::invalid("at least one coordinate required"));
        }
        let scales = scales
            .into_iter()
            .map(FrechetScale::new)
            .collect::<Result<Vec<_>>>()?;
        Ok(SubFrechetModel { measure, scales })
    }

    /// All scales equal to one.
    pub fn standard(measure: LevyMeasure, n: usize) -> Result<Self> {
        Self::new(measure, vec![1.0; n])
    }

    pub fn n(&self) -> usize {
        self.scales.len()
    }

    pub fn measure(&self) -> &LevyMeasure {
        &self.measure
    }

    pub fn scales(&self) -> Vec<f64> {
        self.scales.iter().map(|s| s.sigma()).collect()
    }
}

/// One draw of the vector with its hitting partition and truncation
/// diagnostics.
#[derive(Debug, Clone, Serialize)]
pub struct SimulationResult {
    /// Coordinate maxima `zeta_k = J_{l*(k)} Y_{l*(k),k}` over the
    /// standardized jumps.
    pub values: Vec<f64>,
    /// Hitting partition: coordinates with equal attaining labels.
    pub partition: SetPartition,
    /// Attaining jump index per coordinate (0-based within the retained
    /// sequence).
    pub argmax_labels: Vec<usize>,
    /// Exact floating-point argmax ties encountered (broken toward the
    /// smaller jump index). Almost surely zero in exact arithmetic.
    pub tie_count: usize,
    /// `residual_mean / total` of the jump sequence used.
    pub truncation_ratio: f64,
}

/// Result of the partition-only fast path.
#[derive(Debug, Clone)]
pub struct PartitionDraw {
    pub partition: SetPartition,
    pub truncation_ratio: f64,
}

/// Scaling constant that standardizes the subordinator inside the
/// max-i.d. model: `Γ(1-alpha)^{-1/alpha}` for the stable measure (whose
/// raw Laplace exponent is `Γ(1-alpha) t^alpha`), and 1 for the gamma
/// measure (already standardized, with exponent `theta ln(1+t)`).
pub fn standardized_jump_scale(measure: &LevyMeasure) -> f64 {
    match measure.stable_alpha() {
        Some(alpha) => (-crate::special::ln_gamma(1.0 - alpha) / alpha).exp(),
        None => 1.0,
    }
}

/// One coordinate's direct argmax over a fixed jump sequence: draws a
/// fresh 1-Fréchet mark per retained jump and reports which jump attains
/// the maximum.
pub fn coordinate_argmax(
    jumps: &JumpSequence,
    scale: FrechetScale,
    rng: &mut RngStream,
) -> (usize, f64, usize) {
    let mut best = f64::NEG_INFINITY;
    let mut label = 0usize;
    let mut ties = 0usize;
    for (l, &j) in jumps.jumps().iter().enumerate() {
        let v = j * frechet_quantile(scale, rng.uniform_open01());
        if v > best {
            best = v;
            label = l;
        } else if v == best {
            ties += 1;
        }
    }
    (label, best, ties)
}

/// Draw the max-i.d. vector directly: generate jumps, give every
/// coordinate independent marks over every retained jump, and read off
/// maxima, attaining labels, and the induced partition.
///
/// Marks are drawn coordinate-major: all marks of coordinate 1, then
/// coordinate 2, and so on.
pub fn simulate(
    model: &SubFrechetModel,
    residual_tolerance: f64,
    max_jumps: usize,
    rng: &mut RngStream,
) -> Result<SimulationResult> {
    let jumps = generate_jumps(model.measure(), residual_tolerance, max_jumps, rng)?;
    let scale = standardized_jump_scale(model.measure());
    let n = model.n();
    let mut values = Vec::with_capacity(n);
    let mut labels = Vec::with_capacity(n);
    let mut tie_count = 0;
    for k in 0..n {
        let (label, value, ties) = coordinate_argmax(&jumps, model.scales[k], rng);
        values.push(scale * value);
        labels.push(label);
        tie_count += ties;
    }
    let partition = SetPartition::from_labels(&labels)?;
    Ok(SimulationResult {
        values,
        partition,
        argmax_labels: labels,
        tie_count,
        truncation_ratio: jumps.truncation_ratio(),
    })
}

/// Partition-only fast path: generate jumps, then draw each coordinate's
/// attaining label from the conditional law `P(l) = J_l / total` instead
/// of materializing per-jump marks. Same partition distribution as
/// [`simulate`]; the scales play no role.
pub fn simulate_partition(
    model: &SubFrechetModel,
    residual_tolerance: f64,
    max_jumps: usize,
    rng: &mut RngStream,
) -> Result<PartitionDraw> {
    let jumps = generate_jumps(model.measure(), residual_tolerance, max_jumps, rng)?;
    let cumulative = jumps.cumulative();
    let total = jumps.total();
    let n = model.n();
    let mut labels = Vec::with_capacity(n);
    for _ in 0..n {
        let u = rng.uniform_open01() * total;
        let label = cumulative.partition_point(|&c| c <= u);
        labels.push(label.min(cumulative.len() - 1));
    }
    let partition = SetPartition::from_labels(&labels)?;
    Ok(PartitionDraw {
        partition,
        truncation_ratio: jumps.truncation_ratio(),
    })
}

/// Conditional law of the attaining label given the jumps: identical to
/// [`normalized_jump_weights`]. Exposed separately so tests can compare
/// direct argmax frequencies over a fixed jump sequence against it.
pub fn conditional_label_law(jumps: &JumpSequence) -> WeightVector {
    normalized_jump_weights(jumps)
}

/// Laplace transform of the total jump mass: `exp(-t^alpha)` for the
/// stable measure, `(1+t)^{-theta}` for the gamma measure.
pub fn laplace_transform(measure: &LevyMeasure, t: f64) -> f64 {
    assert!(t >= 0.0 && t.is_finite(), "Laplace transform needs t >= 0");
    match measure.stable_alpha() {
        Some(alpha) => (-t.powf(alpha)).exp(),
        None => {
            let theta = measure.gamma_theta().expect("measure is stable or gamma");
            (1.0 + t).powf(-theta)
        }
    }
}

/// Joint distribution function `P(zeta_k <= x_k, k = 1..n)`, which equals
/// the Laplace transform of the total jump mass at `sum_k sigma_k / x_k`.
pub fn joint_cdf(model: &SubFrechetModel, x: &[f64]) -> Result<f64> {
    if x.len() != model.n() {
        return Err(Error::invalid(format!(
            "expected {} coordinates, got {}",
            model.n(),
            x.len()
        )));
    }
    if x.iter().any(|&v| !(v > 0.0)) {
        return Err(Error::invalid("evaluation point must be strictly positive"));
    }
    let t: f64 = model
        .scales
        .iter()
        .zip(x)
        .map(|(s, &xi)| s.sigma() / xi)
        .sum();
    Ok(laplace_transform(model.measure(), t))
}

/// Nested Monte Carlo estimate with its outer-level standard error.
#[derive(Debug, Clone, Serialize)]
pub struct McEstimate {
    pub estimate: f64,
    pub std_error: f64,
    pub outer: usize,
    pub inner: usize,
}

/// Nested Monte Carlo estimator of the concurrence probability in the
/// logistic setting,
///
/// ```text
/// p(n) = E[ 1 / E( max_k (Y*_k / Y_k)^alpha | Y ) ],
/// ```
///
/// with `Y`, `Y*` independent vectors of i.i.d. 1-Fréchet components.
/// The inner expectation is estimated with `inner` draws, inverted, and
/// averaged over `outer` draws of `Y`. Inverting a finite-sample mean
/// makes the estimator biased upward for finite `inner`; the bias
/// vanishes as `inner` grows, so treat the reported standard error as
/// the outer-level noise only.
pub fn concurrence_mc_general(
    alpha: f64,
    n: usize,
    outer: usize,
    inner: usize,
    rng: &mut RngStream,
) -> Result<McEstimate> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::invalid(format!(
            "concurrence requires alpha in (0,1), got {alpha}"
        )));
    }
    if n == 0 {
        return Err(Error::invalid("n must be at least 1"));
    }
    if outer < 100 || inner < 100 {
        return Err(Error::invalid("outer and inner must be at least 100"));
    }
    let unit = FrechetScale::new(1.0).expect("1 is a valid scale");
    let mut sum = 0.0;
    let mut sum_sq = 0.0;
    let mut y = vec![0.0f64; n];
    for _ in 0..outer {
        for yk in y.iter_mut() {
            *yk = frechet_quantile(unit, rng.uniform_open01());
        }
        let mut inner_sum = 0.0;
        for _ in 0..inner {
            let mut m = f64::NEG_INFINITY;
            for yk in &y {
                let ystar = frechet_quantile(unit, rng.uniform_open01());
                let r = (ystar / yk).powf(alpha);
                if r > m {
                    m = r;
                }
            }
            inner_sum += m;
        }
        let w = inner as f64 / inner_sum;
        sum += w;
        sum_sq += w * w;
    }
    let mean = sum / outer as f64;
    let var = (sum_sq / outer as f64 - mean * mean).max(0.0);
    Ok(McEstimate {
        estimate: mean,
        std_error: (var / outer as f64).sqrt(),
        outer,
        inner,
    })
}
