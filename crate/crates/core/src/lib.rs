//! Simulation and verification of sub-Fréchet max-infinitely-divisible
//! random vectors and their hitting partitions.
//!
//! A sub-Fréchet max-i.d. vector arises as the coordinatewise maximum of
//! subordinator jumps times independent 1-Fréchet marks. The jump that
//! attains each coordinate's maximum induces a random partition of the
//! coordinates (the hitting partition), and for the stable and gamma
//! Lévy measures that partition follows the Poisson-Dirichlet laws
//! `PD(alpha, 0)` and `PD(0, theta)`. This crate simulates the
//! construction directly, evaluates the exact partition probabilities and
//! joint distribution functions, and provides the goodness-of-fit
//! machinery that checks the two against each other.
//!
//! Module map:
//!
//! - [`sampling`]: seeded `(seed, stream_id)` random streams plus the
//!   Fréchet, Beta, and Poisson-arrival primitives.
//! - [`subordinator`]: decreasing jump sequences via inverse-tail mapping
//!   with certified residual mass.
//! - [`partition`]: restricted-growth set partitions, enumeration, the
//!   exact Poisson-Dirichlet partition probability, and the Chinese
//!   restaurant / stick-breaking / paintbox samplers.
//! - [`maxid`]: the max-i.d. vector itself, its hitting partition, joint
//!   distribution functions, and the nested concurrence estimator.
//! - [`stats`]: chi-square goodness of fit, two-sample comparison,
//!   binomial intervals, and the verification orchestration.

pub mod error;
pub mod maxid;
pub mod partition;
pub mod sampling;
pub mod special;
pub mod stats;
pub mod subordinator;

pub use error::{Error, Result};
pub use maxid::{
    concurrence_mc_general, conditional_label_law, coordinate_argmax, joint_cdf,
    laplace_transform, simulate, simulate_partition, standardized_jump_scale, McEstimate,
    PartitionDraw, SimulationResult, SubFrechetModel,
};
pub use partition::{
    concurrence_logistic, crp_sample, enumerate_partitions, gem_default_count,
    gem_paintbox_sample, gem_stick_breaking, normalized_jump_weights, paintbox_sample, pd_eppf,
    BlockSizes, PDParams, SetPartition, WeightVector, MAX_ENUMERATION_N,
};
pub use sampling::{
    frechet_quantile, poisson_arrivals, sample_beta, sample_frechet, FrechetScale, RngStream,
};
pub use stats::{
    binomial_ci, chi_square_gof, chi_square_two_sample, chi_square_upper_tail, pd_partition_table,
    pd_target, verify_corollary, CiReport, GofCell, GofReport, TwoSampleCell, TwoSampleReport,
    VerifyOutcome, GOF_PASS_P_VALUE, VERIFY_DEFAULT_TOLERANCE,
};
pub use subordinator::{
    exp_integral_e1, gamma_tail_inverse, generate_jumps, residual_mean_mass, stable_tail_inverse,
    JumpSequence, LevyMeasure, DEFAULT_MAX_JUMPS,
};
