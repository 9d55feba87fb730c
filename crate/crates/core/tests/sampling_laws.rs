//! Goodness of fit of the samplers.

use paramarkov::ml_special::{ml_one, MLParams};
use paramarkov::sampling::{lamperti_cdf, sample_lamperti, sample_ml_waiting, RngStream};

/// Kolmogorov–Smirnov statistic of `xs` against `cdf`.
fn ks(mut xs: Vec<f64>, cdf: impl Fn(f64) -> f64) -> f64 {
    xs.sort_by(f64::total_cmp);
    let n = xs.len() as f64;
    xs.iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = cdf(x);
            (f - i as f64 / n).abs().max(((i + 1) as f64 / n - f).abs())
        })
        .fold(0.0, f64::max)
}

#[test]
fn lamperti_samples_fit_the_closed_form_cdf() {
    for (k, nu) in [0.1, 0.3, 0.5, 0.7, 0.9].into_iter().enumerate() {
        let mut rng = RngStream::new(5, k as u64);
        let xs: Vec<f64> = (0..100_000).map(|_| sample_lamperti(nu, &mut rng).unwrap().value).collect();
        let d = ks(xs, |x| lamperti_cdf(nu, x).unwrap());
        assert!(d <= 0.01, "nu {nu}: KS {d}");
    }
}

#[test]
fn lamperti_law_is_symmetric_under_inversion() {
    // L and 1/L have the same law, so the median is 1
    let mut rng = RngStream::new(6, 0);
    let n = 100_000;
    let below = (0..n).filter(|_| sample_lamperti(0.4, &mut rng).unwrap().value < 1.0).count();
    assert!((below as f64 / n as f64 - 0.5).abs() < 4.0 * 0.5 / (n as f64).sqrt());
}

#[test]
fn ml_waiting_times_fit_their_survival() {
    for (k, (nu, lambda)) in [(0.3, 1.0), (0.6, 2.5), (0.95, 0.7)].into_iter().enumerate() {
        let params = MLParams::new(nu, lambda).unwrap();
        let mut rng = RngStream::new(8, k as u64);
        let xs: Vec<f64> = (0..50_000).map(|_| sample_ml_waiting(&params, &mut rng).unwrap()).collect();
        let d = ks(xs, |t| 1.0 - ml_one(nu, -lambda * t.powf(nu)).unwrap());
        assert!(d <= 0.01, "nu {nu}: KS {d}");
    }
}
