//! Oracle checks of the statistical machinery: the chi-square upper tail
//! against direct quadrature of the density, and the pooling bookkeeping
//! under partition-shaped inputs.

mod common;

use std::collections::HashMap;

use common::adaptive_simpson;
use subfrechet::*;

/// ln Gamma via quadrature-free Stirling series would defeat the point;
/// instead integrate the chi-square density with the Gamma factor taken
/// from a product formula at half-integer arguments.
fn chi_square_density(dof: usize) -> impl Fn(f64) -> f64 {
    let s = dof as f64 / 2.0;
    // Gamma(s) for integer or half-integer s by direct recursion from
    // Gamma(1) = 1 or Gamma(1/2) = sqrt(pi).
    let mut g = if dof % 2 == 0 {
        1.0
    } else {
        std::f64::consts::PI.sqrt()
    };
    let mut a = if dof % 2 == 0 { 1.0 } else { 0.5 };
    while a < s {
        g *= a;
        a += 1.0;
    }
    move |x: f64| x.powf(s - 1.0) * (-x / 2.0).exp() / (2.0f64.powf(s) * g)
}

#[test]
fn upper_tail_matches_density_quadrature() {
    for (stat, dof) in [(3.841, 1), (10.0, 4), (25.0, 14), (60.0, 51)] {
        let density = chi_square_density(dof);
        // integrate to a far cutoff; the tail beyond is dominated by
        // e^{-x/2} and is negligible at these magnitudes.
        let oracle = adaptive_simpson(&density, stat, stat + 400.0, 1e-13);
        let implemented = chi_square_upper_tail(stat, dof).unwrap();
        assert!(
            (implemented - oracle).abs() <= 1e-9 + 1e-8 * oracle,
            "stat={stat} dof={dof}: {implemented} vs {oracle}"
        );
    }
    // the classical 5% point of one degree of freedom
    assert!((chi_square_upper_tail(3.841, 1).unwrap() - 0.05).abs() < 1e-3);
}

#[test]
fn gof_report_accounts_for_every_observation() {
    // Partition-shaped keys, including cells the sampler never hit.
    let params = PDParams::new(0.5, 0.0).unwrap();
    let expected = pd_partition_table(&params, 4).unwrap();
    let mut rng = RngStream::new(8801, 0);
    let mut observed: HashMap<SetPartition, u64> = HashMap::new();
    let n = 5_000;
    for _ in 0..n {
        *observed
            .entry(crp_sample(&params, 4, &mut rng).unwrap())
            .or_insert(0) += 1;
    }
    let report = chi_square_gof(&observed, &expected).unwrap();
    let total_obs: u64 = report.cells.iter().map(|c| c.observed).sum();
    assert_eq!(total_obs, n);
    let total_exp: f64 = report.cells.iter().map(|c| c.expected).sum();
    assert!((total_exp - n as f64).abs() <= 1e-6 * n as f64);
    assert!(report.cells.iter().all(|c| c.expected >= 5.0));
}
