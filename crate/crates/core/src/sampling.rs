//! Seeded random-number streams and the elementary distributions the
//! simulation layers consume.
//!
//! Everything downstream draws through [`RngStream`], a ChaCha8 generator
//! addressed by a `(seed, stream_id)` pair. ChaCha guarantees that the same
//! pair reproduces the identical bit sequence on every platform, and that
//! distinct stream ids of the same seed yield independent streams, which is
//! what lets replicates fan out across worker threads deterministically.

use rand::distr::Open01;
use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Beta, Distribution};

use crate::error::{Error, Result};

/// A deterministic random stream addressed by `(seed, stream_id)`.
///
/// A stream is single-owner: parallel work takes a distinct `stream_id`
/// per task instead of sharing one generator.
#[derive(Debug, Clone)]
pub struct RngStream {
    rng: ChaCha8Rng,
    seed: u64,
    stream_id: u64,
}

impl RngStream {
    pub fn new(seed: u64, stream_id: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(stream_id);
        RngStream {
            rng,
            seed,
            stream_id,
        }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn stream_id(&self) -> u64 {
        self.stream_id
    }

    /// Uniform draw from the open interval (0, 1). Endpoints are excluded
    /// so that `ln(u)` and `1/u` are always finite.
    #[inline]
    pub fn uniform_open01(&mut self) -> f64 {
        self.rng.sample(Open01)
    }

    /// Standard exponential via inversion.
    #[inline]
    pub(crate) fn standard_exponential(&mut self) -> f64 {
        -self.uniform_open01().ln()
    }
}

impl RngCore for RngStream {
    #[inline]
    fn next_u32(&mut self) -> u32 {
        self.rng.next_u32()
    }

    #[inline]
    fn next_u64(&mut self) -> u64 {
        self.rng.next_u64()
    }

    fn fill_bytes(&mut self, dest: &mut [u8]) {
        self.rng.fill_bytes(dest)
    }
}

/// Scale parameter of a 1-Fréchet law, `P(Z <= x) = exp(-sigma/x)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FrechetScale(f64);

impl FrechetScale {
    pub fn new(sigma: f64) -> Result<Self> {
        if !(sigma > 0.0) || !sigma.is_finite() {
            return Err(Error::invalid(format!(
                "Fréchet scale must be positive and finite, got {sigma}"
            )));
        }
        Ok(FrechetScale(sigma))
    }

    pub fn sigma(&self) -> f64 {
        self.0
    }
}

/// Quantile function of the 1-Fréchet law with scale `sigma`:
/// `x = sigma / (-ln p)` solves `exp(-sigma/x) = p` for `p` in (0, 1).
#[inline]
pub fn frechet_quantile(scale: FrechetScale, p: f64) -> f64 {
    debug_assert!(p > 0.0 && p < 1.0);
    scale.sigma() / -p.ln()
}

/// Draw from the 1-Fréchet law by inversion. Always positive and finite
/// because the underlying uniform excludes both endpoints.
#[inline]
pub fn sample_frechet(scale: FrechetScale, rng: &mut RngStream) -> f64 {
    frechet_quantile(scale, rng.uniform_open01())
}

/// Draw from the Beta(a, b) law.
pub fn sample_beta(a: f64, b: f64, rng: &mut RngStream) -> Result<f64> {
    if !(a > 0.0) || !(b > 0.0) {
        return Err(Error::invalid(format!(
            "Beta parameters must be positive, got a={a}, b={b}"
        )));
    }
    let beta = Beta::new(a, b)
        .map_err(|e| Error::invalid(format!("Beta({a}, {b}): {e}")))?;
    Ok(beta.sample(rng))
}

/// First `count` arrival times of a unit-rate Poisson process, i.e. the
/// partial sums of i.i.d. standard exponentials. Strictly increasing.
pub fn poisson_arrivals(count: usize, rng: &mut RngStream) -> Result<Vec<f64>> {
    if count == 0 {
        return Err(Error::invalid("arrival count must be at least 1"));
    }
    let mut arrivals = Vec::with_capacity(count);
    let mut t = 0.0;
    for _ in 0..count {
        t += rng.standard_exponential();
        arrivals.push(t);
    }
    Ok(arrivals)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn frechet_quantile_unit_scale() {
        let s = FrechetScale::new(1.0).unwrap();
        let u = (-1.0f64).exp();
        assert!((frechet_quantile(s, u) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn frechet_quantile_scales_linearly() {
        let s = FrechetScale::new(2.0).unwrap();
        let u = (-1.0f64).exp();
        assert!((frechet_quantile(s, u) - 2.0).abs() < 1e-15);
    }

    #[test]
    fn frechet_scale_rejects_nonpositive() {
        assert!(FrechetScale::new(0.0).is_err());
        assert!(FrechetScale::new(-1.0).is_err());
        assert!(FrechetScale::new(f64::NAN).is_err());
    }

    #[test]
    fn beta_rejects_nonpositive_parameters() {
        let mut rng = RngStream::new(1, 0);
        assert!(sample_beta(0.0, 1.0, &mut rng).is_err());
        assert!(sample_beta(1.0, -2.0, &mut rng).is_err());
    }

    #[test]
    fn arrivals_strictly_increasing() {
        let mut rng = RngStream::new(7, 0);
        for _ in 0..100 {
            let a = poisson_arrivals(3, &mut rng).unwrap();
            assert!(a[0] > 0.0 && a[0] < a[1] && a[1] < a[2]);
        }
    }

    #[test]
    fn arrivals_reject_zero_count() {
        let mut rng = RngStream::new(7, 0);
        assert!(poisson_arrivals(0, &mut rng).is_err());
    }

    #[test]
    fn identical_stream_reproduces_sequence() {
        let mut a = RngStream::new(42, 3);
        let mut b = RngStream::new(42, 3);
        let s = FrechetScale::new(1.0).unwrap();
        for _ in 0..1000 {
            assert_eq!(sample_frechet(s, &mut a).to_bits(), sample_frechet(s, &mut b).to_bits());
        }
    }

    #[test]
    fn distinct_streams_differ() {
        let mut a = RngStream::new(42, 0);
        let mut b = RngStream::new(42, 1);
        let xs: Vec<u64> = (0..8).map(|_| a.next_u64()).collect();
        let ys: Vec<u64> = (0..8).map(|_| b.next_u64()).collect();
        assert_ne!(xs, ys);
    }
}
