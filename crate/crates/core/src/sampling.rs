//! Random variates for the Lamperti / Mittag-Leffler constructions.
//!
//! Every sampler draws from an [`RngStream`], a ChaCha8 generator keyed by a
//! 64-bit seed and a 64-bit stream id. Distinct stream ids give independent
//! streams, so Monte Carlo replicas use `stream_id = replica index` and the
//! result does not depend on how replicas are scheduled across threads.

use std::f64::consts::PI;

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Exp1, Open01};

use crate::error::{domain, Result};
use crate::ml_special::{check_nu, MLParams};

/// Seeded, stream-addressable random number generator.
#[derive(Debug, Clone)]
pub struct RngStream {
    seed: u64,
    stream_id: u64,
    inner: ChaCha8Rng,
}

impl RngStream {
    pub fn new(seed: u64, stream_id: u64) -> Self {
        let mut inner = ChaCha8Rng::seed_from_u64(seed);
        inner.set_stream(stream_id);
        Self {
            seed,
            stream_id,
            inner,
        }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn stream_id(&self) -> u64 {
        self.stream_id
    }

    /// Standard exponential variate.
    pub fn exp1(&mut self) -> f64 {
        self.sample(Exp1)
    }

    /// Uniform on the open interval (0, 1).
    pub fn open01(&mut self) -> f64 {
        self.sample(Open01)
    }
}

impl RngCore for RngStream {
    fn next_u32(&mut self) -> u32 {
        self.inner.next_u32()
    }

    fn next_u64(&mut self) -> u64 {
        self.inner.next_u64()
    }

    fn fill_bytes(&mut self, dst: &mut [u8]) {
        self.inner.fill_bytes(dst)
    }
}

/// A draw of the Lamperti random scale `L`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LampertiSample {
    pub value: f64,
}

/// `ln S` for a one-sided ν-stable `S` with `E e^{−sS} = e^{−s^ν}`
/// (Kanter's representation).
fn ln_stable(nu: f64, rng: &mut RngStream) -> f64 {
    let u = PI * rng.open01();
    let w = rng.exp1();
    let a = 1.0 - nu;
    let ln_a = (nu / a) * (nu * u).sin().ln() + (a * u).sin().ln() - u.sin().ln() / a;
    (a / nu) * (ln_a - w.ln())
}

/// One-sided ν-stable variate with Laplace transform `e^{−s^ν}`.
pub fn sample_stable_positive(nu: f64, rng: &mut RngStream) -> Result<f64> {
    if !(nu > 0.0 && nu < 1.0) {
        return domain(format!("stable index must lie in (0, 1), got {nu}"));
    }
    Ok(ln_stable(nu, rng).exp())
}

/// Natural log of a Lamperti draw; avoids overflow of the ratio for small ν.
pub fn sample_ln_lamperti(nu: f64, rng: &mut RngStream) -> Result<f64> {
    check_nu(nu)?;
    if nu == 1.0 {
        return Ok(0.0);
    }
    Ok(ln_stable(nu, rng) - ln_stable(nu, rng))
}

/// Lamperti variate `L = S₁/S₂`; exactly 1 when `ν = 1`.
pub fn sample_lamperti(nu: f64, rng: &mut RngStream) -> Result<LampertiSample> {
    let ln_l = sample_ln_lamperti(nu, rng)?;
    Ok(LampertiSample { value: ln_l.exp() })
}

/// Density of the Lamperti law.
pub fn lamperti_pdf(nu: f64, t: f64) -> Result<f64> {
    if !(nu > 0.0 && nu < 1.0) {
        return domain(format!("Lamperti density needs nu in (0, 1), got {nu}"));
    }
    if !(t > 0.0) {
        return domain(format!("Lamperti density needs t > 0, got {t}"));
    }
    let tn = t.powf(nu);
    let (s, c) = (PI * nu).sin_cos();
    // written in t^{-ν} form for t > 1 so that t^{2ν} cannot overflow
    let v = if t <= 1.0 {
        s / PI * tn / t / (tn * tn + 2.0 * tn * c + 1.0)
    } else {
        let r = 1.0 / tn;
        s / PI * r / t / (1.0 + 2.0 * r * c + r * r)
    };
    Ok(v)
}

/// Closed-form Lamperti distribution function, used for checks and by the CLI.
pub fn lamperti_cdf(nu: f64, t: f64) -> Result<f64> {
    if !(nu > 0.0 && nu < 1.0) {
        return domain(format!("Lamperti cdf needs nu in (0, 1), got {nu}"));
    }
    if t <= 0.0 {
        return Ok(0.0);
    }
    let (s, c) = (PI * nu).sin_cos();
    // F(t) = 1 − (1/πν) · atan2(sin πν, t^ν + cos πν)
    Ok(1.0 - s.atan2(t.powf(nu) + c) / (PI * nu))
}

/// One Mittag-Leffler waiting time with survival `𝓜_ν(−λ t^ν)`, where
/// `λ = params.lambda`: an `Exp(λ^{1/ν})` variate divided by a Lamperti scale.
pub fn sample_ml_waiting(params: &MLParams, rng: &mut RngStream) -> Result<f64> {
    let p = MLParams::new(params.nu, params.lambda)?;
    let rate = p.lambda.powf(1.0 / p.nu);
    let ln_l = sample_ln_lamperti(p.nu, rng)?;
    let theta = rng.exp1() / rate;
    Ok(positive((theta.ln() - ln_l).exp()))
}

/// Schur-constant waiting times `J_k = θ_k / L` sharing one Lamperti scale,
/// with `θ_k ~ Exp(rates[k])` independent.
pub fn sample_schur_sequence(rates: &[f64], nu: f64, rng: &mut RngStream) -> Result<Vec<f64>> {
    if rates.is_empty() {
        return domain("rate list is empty");
    }
    if let Some(r) = rates.iter().find(|r| !(**r > 0.0 && r.is_finite())) {
        return domain(format!("rates must be positive and finite, got {r}"));
    }
    let ln_l = sample_ln_lamperti(nu, rng)?;
    Ok(rates
        .iter()
        .map(|r| positive(((rng.exp1() / r).ln() - ln_l).exp()))
        .collect())
}

/// Waiting times must be strictly positive; an underflow to 0 is bumped to
/// the smallest positive double.
pub(crate) fn positive(x: f64) -> f64 {
    if x > 0.0 {
        x
    } else {
        f64::MIN_POSITIVE
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ml_special::ml_one;

    fn mean_se(xs: &[f64]) -> (f64, f64) {
        let n = xs.len() as f64;
        let m = xs.iter().sum::<f64>() / n;
        let v = xs.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (n - 1.0);
        (m, (v / n).sqrt())
    }

    #[test]
    fn streams_replay_and_differ() {
        let a: Vec<u64> = {
            let mut r = RngStream::new(1, 7);
            (0..5).map(|_| r.next_u64()).collect()
        };
        let b: Vec<u64> = {
            let mut r = RngStream::new(1, 7);
            (0..5).map(|_| r.next_u64()).collect()
        };
        let c: Vec<u64> = {
            let mut r = RngStream::new(1, 8);
            (0..5).map(|_| r.next_u64()).collect()
        };
        assert_eq!(a, b);
        assert_ne!(a, c);
    }

    #[test]
    fn stable_laplace_transform() {
        let mut rng = RngStream::new(1, 0);
        let nu = 0.6;
        let draws: Vec<f64> = (0..100_000).map(|_| sample_stable_positive(nu, &mut rng).unwrap()).collect();
        assert!(draws.iter().all(|&x| x > 0.0));
        for s in [1.0f64, 2.0] {
            let e: Vec<f64> = draws.iter().map(|x| (-s * x).exp()).collect();
            let (m, se) = mean_se(&e);
            assert!((m - (-s.powf(nu)).exp()).abs() < 3.0 * se + 1e-12, "s = {s}: {m}");
        }
        assert!(sample_stable_positive(1.0, &mut rng).is_err());
    }

    #[test]
    fn lamperti_degenerates_at_one() {
        let mut rng = RngStream::new(3, 0);
        for _ in 0..10 {
            assert_eq!(sample_lamperti(1.0, &mut rng).unwrap().value, 1.0);
        }
    }

    #[test]
    fn lamperti_median_and_laplace() {
        let mut rng = RngStream::new(1, 1);
        let mut draws: Vec<f64> = (0..100_000).map(|_| sample_lamperti(0.5, &mut rng).unwrap().value).collect();
        let e: Vec<f64> = draws.iter().map(|l| (-l).exp()).collect();
        let (m, se) = mean_se(&e);
        assert!((m - ml_one(0.5, -1.0).unwrap()).abs() < 3.0 * se, "{m}");
        draws.sort_by(f64::total_cmp);
        assert!((draws[50_000] - 1.0).abs() < 0.02);
    }

    #[test]
    fn lamperti_density_values() {
        assert!((lamperti_pdf(0.5, 1.0).unwrap() - 1.0 / (2.0 * PI)).abs() < 1e-15);
        for t in [0.01, 0.3, 2.0, 70.0] {
            let lhs = lamperti_pdf(0.37, t).unwrap();
            let rhs = lamperti_pdf(0.37, 1.0 / t).unwrap() / (t * t);
            assert!((lhs - rhs).abs() < 1e-13 * lhs);
        }
        assert!(lamperti_pdf(0.5, 0.0).is_err());
        assert!(lamperti_pdf(1.0, 1.0).is_err());
    }

    #[test]
    fn lamperti_cdf_is_integral_of_pdf() {
        use crate::quad::{integrate, QuadConfig};
        let nu = 0.4;
        for t in [0.1f64, 1.0, 5.0] {
            // substitution x = s^{1/ν} removes the t^{ν-1} endpoint blow-up
            let f = |s: f64| {
                let x = s.powf(1.0 / nu);
                lamperti_pdf(nu, x).unwrap() * x / (nu * s)
            };
            let q = integrate(f, &[1e-300, t.powf(nu)], &QuadConfig::default()).unwrap();
            assert!((q.value - lamperti_cdf(nu, t).unwrap()).abs() < 1e-9);
        }
        assert!((lamperti_cdf(0.5, 1.0).unwrap() - 0.5).abs() < 1e-15);
    }

    #[test]
    fn ml_waiting_survival() {
        let p = MLParams::new(0.7, 1.3).unwrap();
        let mut rng = RngStream::new(5, 0);
        let hits: Vec<f64> = (0..100_000)
            .map(|_| {
                let w = sample_ml_waiting(&p, &mut rng).unwrap();
                assert!(w > 0.0);
                if w > 1.0 {
                    1.0
                } else {
                    0.0
                }
            })
            .collect();
        let (m, se) = mean_se(&hits);
        assert!((m - ml_one(0.7, -1.3).unwrap()).abs() < 3.0 * se, "{m}");
    }

    #[test]
    fn schur_sequences_share_scale() {
        let mut rng = RngStream::new(9, 0);
        assert!(sample_schur_sequence(&[], 0.5, &mut rng).is_err());
        let pairs: Vec<(f64, f64)> = (0..100_000)
            .map(|_| {
                let j = sample_schur_sequence(&[1.0, 1.0], 0.6, &mut rng).unwrap();
                // rank-like transform keeps the correlation estimate finite
                ((-j[0]).exp(), (-j[1]).exp())
            })
            .collect();
        let n = pairs.len() as f64;
        let (mx, my) = pairs.iter().fold((0.0, 0.0), |a, p| (a.0 + p.0 / n, a.1 + p.1 / n));
        let cov = pairs.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum::<f64>() / n;
        assert!(cov > 0.01, "{cov}");
    }
}
