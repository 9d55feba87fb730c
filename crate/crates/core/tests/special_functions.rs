//! Special functions against high-precision reference values
//! (`tests/data/ml_oracle.csv`, produced by `tests/oracles/gen_ml_values.py`).

use paramarkov::ml_special::{faa_coeff, ml_deriv_n, ml_one, prabhakar, PrabhakarParams};

struct Row {
    alpha: f64,
    beta: f64,
    gamma: f64,
    z: f64,
    value: f64,
}

fn oracle() -> Vec<Row> {
    let text = include_str!("data/ml_oracle.csv");
    text.lines()
        .skip(1)
        .map(|l| {
            let f: Vec<f64> = l.split(',').map(|x| x.parse().unwrap()).collect();
            Row {
                alpha: f[0],
                beta: f[1],
                gamma: f[2],
                z: f[3],
                value: f[4],
            }
        })
        .collect()
}

fn derivative_order(r: &Row) -> Option<usize> {
    let n = r.gamma - 1.0;
    ((r.beta - (n * r.alpha + 1.0)).abs() < 1e-12).then_some(n as usize)
}

#[test]
fn prabhakar_matches_reference() {
    let mut worst = 0.0f64;
    for r in oracle() {
        let p = PrabhakarParams::new(r.alpha, r.beta, r.gamma).unwrap();
        let got = prabhakar(&p, r.z).unwrap();
        let err = (got - r.value).abs() / r.value.abs();
        worst = worst.max(err);
        assert!(err <= 1e-10, "{},{},{} at {}: {got} vs {}", r.alpha, r.beta, r.gamma, r.z, r.value);
    }
    eprintln!("worst relative error {worst:.2e}");
}

#[test]
fn ml_one_and_derivatives_match_reference() {
    for r in oracle() {
        let Some(n) = derivative_order(&r) else { continue };
        let want = r.value * (1..=n).product::<usize>() as f64;
        let got = if n == 0 { ml_one(r.alpha, r.z).unwrap() } else { ml_deriv_n(r.alpha, r.z, n).unwrap() };
        assert!((got - want).abs() <= 1e-10 * want.abs(), "nu {} n {n} z {}: {got} vs {want}", r.alpha, r.z);
    }
}

fn brute_force(k: usize, n: usize, nu: f64) -> f64 {
    // enumerate compositions of n into k positive parts
    fn rec(k: usize, n: usize, nu: f64) -> f64 {
        if k == 0 {
            return if n == 0 { 1.0 } else { 0.0 };
        }
        (1..=n)
            .map(|h| {
                let mut w = 1.0;
                for i in 0..h {
                    w *= (nu - i as f64) / (i + 1) as f64;
                }
                w * rec(k - 1, n - h, nu)
            })
            .sum()
    }
    rec(k, n, nu)
}

#[test]
fn faa_coefficients_match_enumeration() {
    for nu in [0.1, 0.5, 0.9, 1.0] {
        for n in 1..=10 {
            for k in 1..=n {
                let a = faa_coeff(k, n, nu).unwrap();
                let b = brute_force(k, n, nu);
                assert!((a - b).abs() <= 1e-14 * b.abs().max(1e-300), "c({k},{n};{nu}) = {a} vs {b}");
            }
        }
    }
}
