//! Mittag-Leffler machinery on the real line and, where matrix spectra need
//! it, in the complex plane.
//!
//! Everything funnels into one evaluator for the three-parameter (Prabhakar)
//! function
//!
//! ```text
//! E^γ_{α,β}(z) = 1/Γ(γ) Σ_k Γ(k+γ) z^k / (k! Γ(αk+β))
//! ```
//!
//! with two regimes. Close to the origin the series is summed directly
//! (compensated, with its condition number tracked). Elsewhere, for
//! `0 < α < 1`, the inverse Laplace transform `s^{αγ-β} / (s^α - z)^γ` is
//! integrated along a Hankel contour: two rays at angles `±φ` joined by an
//! arc around the origin. The ray angle is picked so that `|s^α - z|` stays
//! bounded away from zero on the whole contour. Poles enclosed by the
//! contour only occur for the derivative family
//! `E^{n+1}_{α,nα+1} = (1/n!) dⁿ/dzⁿ E_α`, where the residue is the n-th
//! derivative of `exp(z^{1/α})/α` and is added in closed form.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use statrs::function::gamma::{gamma, ln_gamma};

use crate::error::{domain, Error, Result};
use crate::quad::{integrate, QuadConfig};

/// Largest `|z|` for which the series is considered at all.
pub const Z_SWITCH: f64 = 4.0;
/// Hard cap on series terms.
pub const MAX_SERIES_TERMS: usize = 10_000;
/// Largest `n` accepted by [`faa_coeff`] and the pmf tables built on it.
pub const MAX_FAA_N: usize = 200;

const SERIES_MAX_CONDITION: f64 = 1e4;
const SERIES_FALLBACK_CONDITION: f64 = 1e8;

/// `(ν, λ)` pair parameterizing the Mittag-Leffler laws.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MLParams {
    pub nu: f64,
    pub lambda: f64,
}

impl MLParams {
    pub fn new(nu: f64, lambda: f64) -> Result<Self> {
        check_nu(nu)?;
        if !(lambda > 0.0 && lambda.is_finite()) {
            return domain(format!("rate must be positive and finite, got {lambda}"));
        }
        Ok(Self { nu, lambda })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PrabhakarParams {
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
}

impl PrabhakarParams {
    pub fn new(alpha: f64, beta: f64, gamma: f64) -> Result<Self> {
        for (name, v) in [("alpha", alpha), ("beta", beta), ("gamma", gamma)] {
            if !(v > 0.0 && v.is_finite()) {
                return domain(format!("{name} must be positive and finite, got {v}"));
            }
        }
        Ok(Self { alpha, beta, gamma })
    }

    /// `E^{n+1}_{ν, nν+1}`, the n-th derivative of `E_ν` divided by `n!`.
    pub fn derivative_family(nu: f64, n: usize) -> Self {
        Self {
            alpha: nu,
            beta: n as f64 * nu + 1.0,
            gamma: n as f64 + 1.0,
        }
    }

    fn family_order(&self) -> Option<usize> {
        let n = self.gamma - 1.0;
        if n >= 0.0 && n.fract() == 0.0 && (self.beta - (n * self.alpha + 1.0)).abs() <= 1e-14 * self.beta {
            Some(n as usize)
        } else {
            None
        }
    }
}

pub(crate) fn check_nu(nu: f64) -> Result<()> {
    if nu > 0.0 && nu <= 1.0 {
        Ok(())
    } else {
        domain(format!("nu must lie in (0, 1], got {nu}"))
    }
}

fn check_finite(z: Complex64) -> Result<()> {
    if z.re.is_finite() && z.im.is_finite() {
        Ok(())
    } else {
        domain(format!("argument must be finite, got {z}"))
    }
}

/// One-parameter Mittag-Leffler function `𝓜_ν(z) = Σ z^k / Γ(1+νk)`.
pub fn ml_one(nu: f64, z: f64) -> Result<f64> {
    Ok(ml_one_complex(nu, Complex64::new(z, 0.0))?.re)
}

pub fn ml_one_complex(nu: f64, z: Complex64) -> Result<Complex64> {
    check_nu(nu)?;
    check_finite(z)?;
    evaluate(&PrabhakarParams::derivative_family(nu, 0), z, 0.0)
}

/// Three-parameter Mittag-Leffler (Prabhakar) function.
pub fn prabhakar(params: &PrabhakarParams, z: f64) -> Result<f64> {
    Ok(prabhakar_complex(params, Complex64::new(z, 0.0))?.re)
}

pub fn prabhakar_complex(params: &PrabhakarParams, z: Complex64) -> Result<Complex64> {
    let p = PrabhakarParams::new(params.alpha, params.beta, params.gamma)?;
    check_finite(z)?;
    evaluate(&p, z, 0.0)
}

/// n-th derivative of `𝓜_ν` at `z`, i.e. `n! 𝓜^{n+1}_{ν,nν+1}(z)`.
pub fn ml_deriv_n(nu: f64, z: f64, n: usize) -> Result<f64> {
    Ok(ml_deriv_n_complex(nu, Complex64::new(z, 0.0), n)?.re)
}

pub fn ml_deriv_n_complex(nu: f64, z: Complex64, n: usize) -> Result<Complex64> {
    check_nu(nu)?;
    check_finite(z)?;
    let v = evaluate(&PrabhakarParams::derivative_family(nu, n), z, 0.0)?;
    Ok(v * factorial(n))
}

/// `x^k 𝓜^{k+1}_{ν,kν+1}(−x)` for `x > 0`, evaluated without forming the
/// (possibly under- or overflowing) factors separately.
pub fn scaled_deriv_term(nu: f64, x: f64, k: usize) -> Result<f64> {
    check_nu(nu)?;
    if !(x > 0.0 && x.is_finite()) {
        return domain(format!("scaled derivative needs x > 0, got {x}"));
    }
    Ok(evaluate(&PrabhakarParams::derivative_family(nu, k), Complex64::new(-x, 0.0), k as f64)?.re)
}

pub(crate) fn factorial(n: usize) -> f64 {
    (1..=n).fold(1.0, |acc, i| acc * i as f64)
}

/// `Γ(x)` for `x > 0`, exact at small integers (the Lanczos form in
/// `statrs` is off by a few ulps there, and `Γ(1)`, `Γ(2)` are hit often).
pub(crate) fn gamma_pos(x: f64) -> f64 {
    if x.fract() == 0.0 && (1.0..=30.0).contains(&x) {
        factorial(x as usize - 1)
    } else {
        gamma(x)
    }
}

fn ln_gamma_pos(x: f64) -> f64 {
    if x < 150.0 {
        gamma_pos(x).ln()
    } else {
        ln_gamma(x)
    }
}

/// Dispatches between the regimes; returns `|z|^scale · E^γ_{α,β}(z)`.
fn evaluate(p: &PrabhakarParams, z: Complex64, scale: f64) -> Result<Complex64> {
    let r = z.norm();
    if r == 0.0 {
        return Ok(if scale > 0.0 {
            Complex64::new(0.0, 0.0)
        } else {
            Complex64::new(1.0 / gamma_pos(p.beta), 0.0)
        });
    }
    let family = p.family_order();
    if p.alpha == 1.0 {
        if let Some(n) = family {
            let ln_mag = scale * r.ln() - ln_gamma_pos(n as f64 + 1.0);
            return Ok(z.exp() * ln_mag.exp());
        }
    }

    let mut fallback: Option<Result<Complex64>> = None;
    if r <= Z_SWITCH || (z.im == 0.0 && z.re > 0.0) {
        match series(p, z, scale) {
            Ok(s) if s.condition <= SERIES_MAX_CONDITION => return Ok(s.value),
            Ok(s) if s.condition <= SERIES_FALLBACK_CONDITION => fallback = Some(Ok(s.value)),
            Ok(s) => {
                fallback = Some(Err(Error::Accuracy(format!(
                    "series condition number {:.2e} at z = {z}",
                    s.condition
                ))))
            }
            Err(e) => fallback = Some(Err(e)),
        }
    }

    if p.alpha < 1.0 {
        match contour(p, z, scale, family) {
            Ok(v) => return Ok(v),
            Err(e) => {
                if let Some(Ok(v)) = fallback {
                    return Ok(v);
                }
                return Err(e);
            }
        }
    }
    if p.alpha == 1.0 && z.im == 0.0 && z.re < 0.0 {
        return kummer_negative(p, -z.re, scale);
    }
    match fallback {
        Some(res) => res,
        None => match series(p, z, scale) {
            Ok(s) if s.condition <= SERIES_FALLBACK_CONDITION => Ok(s.value),
            Ok(s) => Err(Error::Accuracy(format!(
                "no stable regime for alpha = {} at z = {z} (series condition {:.2e})",
                p.alpha, s.condition
            ))),
            Err(e) => Err(e),
        },
    }
}

struct SeriesValue {
    value: Complex64,
    condition: f64,
}

/// Neumaier-compensated accumulator for complex sums.
#[derive(Default, Clone, Copy)]
struct Compensated {
    sum: Complex64,
    comp: Complex64,
}

impl Compensated {
    fn add(&mut self, x: Complex64) {
        self.sum.re = neumaier(self.sum.re, x.re, &mut self.comp.re);
        self.sum.im = neumaier(self.sum.im, x.im, &mut self.comp.im);
    }

    fn value(&self) -> Complex64 {
        self.sum + self.comp
    }
}

fn neumaier(sum: f64, x: f64, comp: &mut f64) -> f64 {
    let t = sum + x;
    if sum.abs() >= x.abs() {
        *comp += (sum - t) + x;
    } else {
        *comp += (x - t) + sum;
    }
    t
}

fn series(p: &PrabhakarParams, z: Complex64, scale: f64) -> Result<SeriesValue> {
    let ln_r = z.norm().ln();
    let theta = z.arg();
    // ln of Γ(k+γ)/(Γ(γ) k!)
    let mut ln_coeff = 0.0;
    let mut acc = Compensated::default();
    let mut abs_sum = 0.0;
    let mut small_run = 0;
    for k in 0..MAX_SERIES_TERMS {
        let kf = k as f64;
        if k > 0 {
            ln_coeff += ((kf - 1.0 + p.gamma) / kf).ln();
        }
        let ln_mag = ln_coeff + kf * ln_r + scale * ln_r - ln_gamma_pos(p.alpha * kf + p.beta);
        let mag = ln_mag.exp();
        let term = Complex64::from_polar(mag, kf * theta);
        acc.add(term);
        abs_sum += mag;
        let current = acc.value().norm();
        if mag < 1e-16 * current {
            small_run += 1;
            if small_run >= 3 {
                let condition = if current > 0.0 { abs_sum / current } else { f64::INFINITY };
                return Ok(SeriesValue {
                    value: acc.value(),
                    condition,
                });
            }
        } else {
            small_run = 0;
        }
        if !mag.is_finite() {
            break;
        }
    }
    Err(Error::Accuracy(format!(
        "series for E^{}_{{{},{}}} did not converge within {MAX_SERIES_TERMS} terms at z = {z}",
        p.gamma, p.alpha, p.beta
    )))
}

/// `α = 1`, `z = −x < 0`: Kummer's transformation
/// `₁F₁(γ; β; −x) = e^{−x} ₁F₁(β−γ; β; x)`.
fn kummer_negative(p: &PrabhakarParams, x: f64, scale: f64) -> Result<Complex64> {
    let a = p.beta - p.gamma;
    let mut term = 1.0;
    let mut acc = 0.0;
    let mut comp = 0.0;
    let mut abs_sum = 0.0;
    for k in 0..MAX_SERIES_TERMS {
        if k > 0 {
            let kf = (k - 1) as f64;
            term *= (a + kf) / (p.beta + kf) * x / (kf + 1.0);
        }
        acc = neumaier(acc, term, &mut comp);
        abs_sum += term.abs();
        if term == 0.0 || (term.abs() < 1e-17 * (acc + comp).abs() && k as f64 > x) {
            let total = acc + comp;
            if abs_sum > SERIES_FALLBACK_CONDITION * total.abs() {
                break;
            }
            let ln_pre = -x + scale * x.ln() - ln_gamma_pos(p.beta);
            return Ok(Complex64::new(total * ln_pre.exp(), 0.0));
        }
    }
    Err(Error::Accuracy(format!("Kummer series failed at z = {}", -x)))
}

/// Lower bound factor of `|s^α − z| / |z|` over a ray at angle `a` (in the
/// `s^α` plane) for an argument at angle `theta`.
fn ray_margin(a: f64, theta: f64) -> f64 {
    let mut d = a - theta;
    while d > PI {
        d -= 2.0 * PI;
    }
    while d <= -PI {
        d += 2.0 * PI;
    }
    if d.abs() >= 0.5 * PI {
        1.0
    } else {
        d.sin().abs()
    }
}

fn choose_angle(alpha: f64, theta: f64) -> (f64, f64) {
    const STEPS: usize = 24;
    let mut best = (PI, -1.0);
    for j in (1..=STEPS).rev() {
        let phi = 0.5 * PI + 0.5 * PI * j as f64 / STEPS as f64;
        let m = ray_margin(alpha * phi, theta).min(ray_margin(-alpha * phi, theta));
        if m > best.1 + 1e-12 {
            best = (phi, m);
        }
    }
    best
}

fn contour(p: &PrabhakarParams, z: Complex64, scale: f64, family: Option<usize>) -> Result<Complex64> {
    let alpha = p.alpha;
    let r_z = z.norm();
    let theta = z.arg();
    let z_unit = z / r_z;
    let expo = p.alpha * p.gamma - p.beta;
    let real_axis = z.im == 0.0;

    let (phi, margin) = choose_angle(alpha, theta);
    if margin < 1e-3 {
        return Err(Error::Accuracy(format!("no safe Hankel contour for z = {z}")));
    }
    let pole_angle = theta / alpha;
    let pole_inside = pole_angle.abs() < phi;
    if pole_inside && family.is_none() {
        return Err(Error::Domain(format!(
            "three-parameter function with an enclosed singularity at z = {z} is unsupported"
        )));
    }
    if !real_axis && family.is_none() && p.gamma.fract() != 0.0 {
        return Err(Error::Domain(format!(
            "non-integer gamma off the real axis is unsupported (z = {z})"
        )));
    }

    let pole_radius = r_z.powf(1.0 / alpha);
    let rho = (0.5 * r_z).powf(1.0 / alpha).min(1.0);
    let ln_pref = (scale - p.gamma) * r_z.ln();

    // h(s) ds / (2πi) on the upper branch, s = r e^{iψ} in polar form.
    let kernel = |r: f64, psi: f64| -> Complex64 {
        let s = Complex64::from_polar(r, psi);
        let s_alpha = Complex64::from_polar(r.powf(alpha) / r_z, alpha * psi);
        let base = s_alpha - z_unit;
        let ln_val = s + Complex64::new(expo * r.ln() + ln_pref, expo * psi) - p.gamma * base.ln();
        ln_val.exp()
    };
    let two_pi_i = Complex64::new(0.0, 2.0 * PI);

    let cos_phi = phi.cos().abs();
    let mut r_max = 50.0 / cos_phi;
    if expo > 0.0 {
        r_max += expo * r_max.ln() / cos_phi;
    }
    r_max += rho;

    let typical = (ln_pref + expo.min(0.0) * rho.ln()).exp().max(f64::MIN_POSITIVE);
    let cfg = QuadConfig {
        abs_tol: 1e-17 * typical,
        rel_tol: 1e-13,
        max_intervals: 4000,
    };

    // arc: s = ρ e^{iψ}, ds = i s dψ, ψ ∈ [0, φ] (upper) and its mirror.
    let arc = |t: f64| -> Complex64 {
        let up = kernel(rho, t) * Complex64::new(0.0, 1.0) * Complex64::from_polar(rho, t);
        let down = kernel(rho, -t) * Complex64::new(0.0, 1.0) * Complex64::from_polar(rho, -t);
        (up + down) / two_pi_i
    };
    // rays: s = r e^{±iφ}
    let ray = |r: f64| -> Complex64 {
        let up = kernel(r, phi) * Complex64::from_polar(1.0, phi);
        let down = kernel(r, -phi) * Complex64::from_polar(1.0, -phi);
        (up - down) / two_pi_i
    };

    let mut arc_pts = vec![0.0, 0.25 * phi, 0.5 * phi, 0.75 * phi, phi];
    arc_pts.dedup();
    let mut ray_pts = vec![rho];
    let mut x = rho;
    while x * 2.0 < r_max {
        x *= 2.0;
        ray_pts.push(x);
    }
    ray_pts.push(r_max);
    if pole_radius > rho && pole_radius < r_max {
        ray_pts.push(pole_radius);
        ray_pts.sort_by(f64::total_cmp);
        ray_pts.dedup_by(|a, b| (*a - *b).abs() <= 1e-12 * b.abs());
    }

    let total = if real_axis {
        // conjugate symmetry: the integrand combination is real
        let a = integrate(|t| arc(t).re, &arc_pts, &cfg)?;
        let b = integrate(|r| ray(r).re, &ray_pts, &cfg)?;
        Complex64::new(a.value + b.value, 0.0)
    } else {
        let a = integrate(arc, &arc_pts, &cfg)?;
        let b = integrate(ray, &ray_pts, &cfg)?;
        a.value + b.value
    };

    let residue = if pole_inside {
        residue_family(alpha, z, family.unwrap_or(0), scale)
    } else {
        Complex64::new(0.0, 0.0)
    };
    let v = total + residue;
    if !(v.re.is_finite() && v.im.is_finite()) {
        return Err(Error::Accuracy(format!("non-finite contour value at z = {z}")));
    }
    Ok(v)
}

/// `|z|^scale · (1/n!) dⁿ/dzⁿ [exp(z^{1/α}) / α]` on the principal branch.
fn residue_family(alpha: f64, z: Complex64, n: usize, scale: f64) -> Complex64 {
    let inv = 1.0 / alpha;
    let w = z.powf(inv);
    // derivatives of z^{1/α}: (1/α)_k z^{1/α - k}
    let mut derivs = Vec::with_capacity(n);
    let mut ff = 1.0;
    for k in 1..=n {
        ff *= inv - (k - 1) as f64;
        derivs.push(w * ff / z.powu(k as u32));
    }
    let bell = complete_bell(&derivs);
    let ln_scale = scale * z.norm().ln() - ln_gamma_pos(n as f64 + 1.0);
    (w.exp() * bell[n] * inv) * ln_scale.exp()
}

/// Complete Bell polynomials `Y_0 … Y_n` of `x_1 … x_n`.
pub(crate) fn complete_bell<T>(x: &[T]) -> Vec<T>
where
    T: Copy + std::ops::Add<Output = T> + std::ops::Mul<Output = T> + std::ops::Mul<f64, Output = T> + From<f64>,
{
    let n = x.len();
    let mut y: Vec<T> = vec![T::from(1.0)];
    for m in 0..n {
        let mut acc = T::from(0.0);
        let mut binom = 1.0;
        for k in 0..=m {
            acc = acc + y[m - k] * x[k] * binom;
            binom *= (m - k) as f64 / (k + 1) as f64;
        }
        y.push(acc);
    }
    y
}

/// Falling factorial `(ν)_h = ν(ν−1)⋯(ν−h+1)`, with `(ν)_0 = 1`.
pub fn falling_factorial(nu: f64, h: usize) -> f64 {
    (0..h).fold(1.0, |acc, i| acc * (nu - i as f64))
}

/// Generalized binomial coefficient `ν(ν−1)⋯(ν−j+1)/j!`.
pub fn frac_binomial(nu: f64, j: usize) -> f64 {
    (0..j).fold(1.0, |acc, i| acc * (nu - i as f64) / (i + 1) as f64)
}

/// Table of `c(k, n; ν) = Σ_{h_1+⋯+h_k=n, h_i ≥ 1} Π (ν)_{h_i}/h_i!` for all
/// `1 ≤ k ≤ n ≤ n_max`, built by the recursion over the last part.
#[derive(Debug, Clone)]
pub struct FaaTable {
    nu: f64,
    n_max: usize,
    // row-major (k, n), k, n ∈ [0, n_max]
    values: Vec<f64>,
}

impl FaaTable {
    pub fn new(nu: f64, n_max: usize) -> Result<Self> {
        if n_max > MAX_FAA_N {
            return Err(Error::Size(format!("n = {n_max} exceeds the cap {MAX_FAA_N}")));
        }
        let w = n_max + 1;
        let b: Vec<f64> = (0..=n_max).map(|h| frac_binomial(nu, h)).collect();
        let mut values = vec![0.0; w * w];
        values[0] = 1.0;
        for k in 1..=n_max {
            for n in k..=n_max {
                let mut acc = 0.0;
                let mut comp = 0.0;
                for h in 1..=(n - k + 1) {
                    acc = neumaier(acc, b[h] * values[(k - 1) * w + n - h], &mut comp);
                }
                values[k * w + n] = acc + comp;
            }
        }
        Ok(Self { nu, n_max, values })
    }

    pub fn nu(&self) -> f64 {
        self.nu
    }

    pub fn n_max(&self) -> usize {
        self.n_max
    }

    pub fn get(&self, k: usize, n: usize) -> f64 {
        self.values[k * (self.n_max + 1) + n]
    }
}

/// Faà di Bruno composition coefficient `c(k, n; ν)` over positive parts.
pub fn faa_coeff(k: usize, n: usize, nu: f64) -> Result<f64> {
    if k == 0 || k > n {
        return domain(format!("c(k, n) needs 1 <= k <= n, got k = {k}, n = {n}"));
    }
    Ok(FaaTable::new(nu, n)?.get(k, n))
}
