//! Closed-form laws of the efPp and its waiting times, plus residual checks
//! of the governing equations.
//!
//! The pmf of `N_t` is evaluated by two independent routes:
//!
//! * the composition-coefficient sum
//!   `p_n(t) = Σ_k (−1)^{n+k} c(k,n;ν) x^k 𝓜^{k+1}_{ν,kν+1}(−x)`, `x = (λt)^ν`,
//!   whose terms are all nonnegative for `ν ≤ 1`;
//! * the derivative form `p_n(t) = (tⁿ/n!)(−d/dt)ⁿ 𝓜_ν(−λ^ν t^ν)` expanded
//!   with partial Bell polynomials over [`ml_deriv_n`].

use std::io::Write;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::chains::ChainSpec;
use crate::error::{domain, Error, Result};
use crate::fmt::g17;
use crate::matfun::{frac_power_neg_gen, from_spec, transition_para_from, transition_semi, Generator};
use crate::ml_special::{
    factorial, falling_factorial, frac_binomial, ml_deriv_n, ml_one, scaled_deriv_term, FaaTable, MLParams,
    MAX_FAA_N,
};
use crate::quad::{integrate, QuadConfig};

/// Tail target used when growing the pmf support adaptively.
pub const TAIL_TARGET: f64 = 1e-6;
/// Largest `n` for the derivative form (its Bell-polynomial table overflows
/// double precision beyond this).
pub const MAX_DERIV_FORM_N: usize = 100;
/// Largest number of arguments accepted by [`joint_cdf`].
pub const MAX_CDF_ARGS: usize = 20;

/// Where a pmf column came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PmfSource {
    Analytic,
    MonteCarlo,
}

/// `p_0(t), …, p_N(t)` with the mass not covered.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PmfTable {
    pub t: f64,
    pub lambda: f64,
    pub nu: f64,
    pub probs: Vec<f64>,
    pub tail_bound: f64,
    pub source: PmfSource,
}

impl PmfTable {
    pub fn nmax(&self) -> usize {
        self.probs.len() - 1
    }

    /// Probabilities clamped at 0 for reporting.
    pub fn clamped(&self) -> Vec<f64> {
        self.probs.iter().map(|p| p.max(0.0)).collect()
    }

    /// Empirical table from a histogram whose last bucket counts `N_t > nmax`.
    pub fn from_histogram(params: &MLParams, t: f64, counts: &[u64]) -> Result<Self> {
        if counts.len() < 2 {
            return Err(Error::Size("histogram needs at least one value and a tail bucket".into()));
        }
        let total: u64 = counts.iter().sum();
        if total == 0 {
            return Err(Error::Size("empty histogram".into()));
        }
        let n = total as f64;
        let (body, tail) = counts.split_at(counts.len() - 1);
        Ok(Self {
            t,
            lambda: params.lambda,
            nu: params.nu,
            probs: body.iter().map(|&c| c as f64 / n).collect(),
            tail_bound: tail[0] as f64 / n,
            source: PmfSource::MonteCarlo,
        })
    }
}

fn check_time(t: f64) -> Result<()> {
    if t >= 0.0 && t.is_finite() {
        Ok(())
    } else {
        domain(format!("time must be nonnegative and finite, got {t}"))
    }
}

fn validated(params: &MLParams) -> Result<MLParams> {
    MLParams::new(params.nu, params.lambda)
}

/// `(λt)^ν`, the argument scale of every efPp formula.
fn x_of(p: &MLParams, t: f64) -> f64 {
    (p.lambda * t).powf(p.nu)
}

/// `p_n(t)` for all `n ≤ nmax` from the composition-coefficient sum.
pub fn efpp_pmf_table(params: &MLParams, t: f64, nmax: usize) -> Result<PmfTable> {
    let p = validated(params)?;
    check_time(t)?;
    if nmax > MAX_FAA_N {
        return Err(Error::Size(format!("nmax = {nmax} exceeds the cap {MAX_FAA_N}")));
    }
    let probs = if t == 0.0 {
        (0..=nmax).map(|n| if n == 0 { 1.0 } else { 0.0 }).collect::<Vec<_>>()
    } else {
        let x = x_of(&p, t);
        let faa = FaaTable::new(p.nu, nmax)?;
        let terms: Vec<f64> = (1..=nmax)
            .map(|k| scaled_deriv_term(p.nu, x, k))
            .collect::<Result<_>>()?;
        let mut probs = vec![ml_one(p.nu, -x)?];
        for n in 1..=nmax {
            let mut acc = 0.0;
            for k in 1..=n {
                let sign = if (n + k) % 2 == 0 { 1.0 } else { -1.0 };
                acc += sign * faa.get(k, n) * terms[k - 1];
            }
            probs.push(acc);
        }
        probs
    };
    let tail_bound = 1.0 - probs.iter().sum::<f64>();
    Ok(PmfTable {
        t,
        lambda: p.lambda,
        nu: p.nu,
        probs,
        tail_bound,
        source: PmfSource::Analytic,
    })
}

/// Grows the support until the uncovered mass drops below [`TAIL_TARGET`]
/// or `n` reaches [`MAX_FAA_N`].
pub fn efpp_pmf_adaptive(params: &MLParams, t: f64) -> Result<PmfTable> {
    let mut nmax = 16;
    loop {
        let table = efpp_pmf_table(params, t, nmax)?;
        if table.tail_bound < TAIL_TARGET || nmax == MAX_FAA_N {
            return Ok(table);
        }
        nmax = (nmax * 2).min(MAX_FAA_N);
    }
}

/// `P(N_t = n)`.
pub fn efpp_pmf(params: &MLParams, t: f64, n: usize) -> Result<f64> {
    Ok(efpp_pmf_table(params, t, n)?.probs[n])
}

/// Partial Bell polynomials `B_{m,k}(a_1, a_2, …)` for `m, k ≤ n`,
/// row-major with stride `n + 1`.
fn partial_bell(a: &[f64], n: usize) -> Vec<f64> {
    let w = n + 1;
    let mut b = vec![0.0; w * w];
    b[0] = 1.0;
    // binomial(m−1, i−1) built row by row
    let mut binom = vec![vec![1.0f64]];
    for m in 1..=n {
        let prev = &binom[m - 1];
        let mut row = vec![1.0; m + 1];
        for i in 1..m {
            row[i] = prev[i - 1] + prev[i];
        }
        binom.push(row);
    }
    for m in 1..=n {
        for k in 1..=m {
            let mut acc = 0.0;
            for i in 1..=(m - k + 1) {
                acc += binom[m - 1][i - 1] * a[i - 1] * b[(m - i) * w + k - 1];
            }
            b[m * w + k] = acc;
        }
    }
    b
}

/// `(sⁿ/n!)(−d/ds)ⁿ 𝓜_ν(−λ^ν s^ν)` via Faà di Bruno over `ml_deriv_n`.
fn derivative_route(p: &MLParams, s: f64, n: usize) -> Result<f64> {
    if n > MAX_DERIV_FORM_N {
        return Err(Error::Size(format!("derivative form supports n <= {MAX_DERIV_FORM_N}, got {n}")));
    }
    let x = x_of(p, s);
    if n == 0 {
        return ml_one(p.nu, -x);
    }
    // s^i d^i/ds^i (−x(s)) = −x (ν)_i, so sⁿ Bₙ,ₖ(u', u'', …) = (−x)^k Bₙ,ₖ((ν)_1, (ν)_2, …)
    let a: Vec<f64> = (1..=n).map(|i| falling_factorial(p.nu, i)).collect();
    let bell = partial_bell(&a, n);
    let w = n + 1;
    let sign_n = if n.is_multiple_of(2) { 1.0 } else { -1.0 };
    let mut acc = 0.0;
    let ln_nfact = (1..=n).map(|i| (i as f64).ln()).sum::<f64>();
    for k in 1..=n {
        let b = bell[n * w + k];
        if b == 0.0 {
            continue;
        }
        let sign_k = if k % 2 == 0 { 1.0 } else { -1.0 };
        let d = ml_deriv_n(p.nu, -x, k)?;
        let ln_mag = k as f64 * x.ln() + b.abs().ln() - ln_nfact;
        acc += sign_n * sign_k * b.signum() * d * ln_mag.exp();
    }
    Ok(acc)
}

/// `p_n(t)` from the n-th derivative of the survival function.
pub fn efpp_pmf_deriv_form(params: &MLParams, t: f64, n: usize) -> Result<f64> {
    let p = validated(params)?;
    check_time(t)?;
    if t == 0.0 {
        return Ok(if n == 0 { 1.0 } else { 0.0 });
    }
    derivative_route(&p, t, n)
}

fn check_times(times: &[f64]) -> Result<f64> {
    if times.is_empty() {
        return domain("need at least one time");
    }
    if let Some(t) = times.iter().find(|t| !(**t >= 0.0 && t.is_finite())) {
        return domain(format!("times must be nonnegative and finite, got {t}"));
    }
    Ok(times.iter().sum())
}

/// `P(J_1 > t_1, …, J_n > t_n) = 𝓜_ν(−λ^ν (Σ t_k)^ν)`.
pub fn joint_survival(params: &MLParams, times: &[f64]) -> Result<f64> {
    let p = validated(params)?;
    let s = check_times(times)?;
    ml_one(p.nu, -x_of(&p, s))
}

/// `P(J_1 ≤ t_1, …, J_n ≤ t_n)` by inclusion–exclusion over subsets.
pub fn joint_cdf(params: &MLParams, times: &[f64]) -> Result<f64> {
    let p = validated(params)?;
    check_times(times)?;
    let n = times.len();
    if n > MAX_CDF_ARGS {
        return Err(Error::Size(format!("joint cdf supports at most {MAX_CDF_ARGS} times, got {n}")));
    }
    let mut acc = 0.0;
    for mask in 0u32..(1 << n) {
        let s: f64 = (0..n).filter(|i| mask >> i & 1 == 1).map(|i| times[i]).sum();
        let sign = if mask.count_ones() % 2 == 0 { 1.0 } else { -1.0 };
        acc += sign * if s == 0.0 { 1.0 } else { ml_one(p.nu, -x_of(&p, s))? };
    }
    Ok(acc.clamp(0.0, 1.0))
}

/// Joint density of `(J_1, …, J_n)`: `(−1)ⁿ g⁽ⁿ⁾(Σ t_k)` with
/// `g(s) = 𝓜_ν(−λ^ν s^ν)`.
pub fn joint_density(params: &MLParams, times: &[f64]) -> Result<f64> {
    let p = validated(params)?;
    let s = check_times(times)?;
    let n = times.len();
    if s == 0.0 {
        if p.nu == 1.0 {
            return Ok(p.lambda.powi(n as i32));
        }
        return domain("joint density is singular at the origin for nu < 1");
    }
    let v = derivative_route(&p, s, n)?;
    let ln_scale = (1..=n).map(|i| (i as f64).ln()).sum::<f64>() - n as f64 * s.ln();
    Ok((v * ln_scale.exp()).max(0.0))
}

/// Density of the n-th jump time `T_n`: `n p_n(u) / u`, equivalently
/// `u^{n−1}/Γ(n) · (−1)ⁿ g⁽ⁿ⁾(u)`.
pub fn jump_time_pdf(params: &MLParams, n: usize, u: f64) -> Result<f64> {
    let p = validated(params)?;
    if n == 0 {
        return domain("jump index must be at least 1");
    }
    if !(u > 0.0 && u.is_finite()) {
        return domain(format!("jump-time density needs u > 0, got {u}"));
    }
    Ok((n as f64 * efpp_pmf(&p, u, n)? / u).max(0.0))
}

/// Probability generating function `E[u^{N_t}]`.
pub fn pgf(params: &MLParams, t: f64, u: f64) -> Result<f64> {
    let p = validated(params)?;
    check_time(t)?;
    if !(u.abs() <= 1.0) {
        return domain(format!("pgf argument must satisfy |u| <= 1, got {u}"));
    }
    ml_one(p.nu, -x_of(&p, t) * (1.0 - u).powf(p.nu))
}

/// Uniform time grid `t_j = j h` used by the residual checks; the residual
/// is reported over the points in `[t_min, t_max]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ResidualGrid {
    pub h: f64,
    pub t_min: f64,
    pub t_max: f64,
}

impl ResidualGrid {
    pub fn new(h: f64, t_min: f64, t_max: f64) -> Result<Self> {
        if !(t_max > 0.0 && t_max.is_finite() && t_min >= 0.0 && t_min < t_max) {
            return domain(format!("invalid residual window [{t_min}, {t_max}]"));
        }
        if !(h > 0.0) || h > 1e-3 * t_max {
            return Err(Error::Size(format!("grid step {h} is coarser than 1e-3 * {t_max}")));
        }
        Ok(Self { h, t_min, t_max })
    }

    fn len(&self) -> usize {
        (self.t_max / self.h).round() as usize + 1
    }

    /// Points evaluated: the window plus two for the centred stencils.
    fn eval_len(&self) -> usize {
        self.len() + 2
    }

    fn time(&self, j: usize) -> f64 {
        j as f64 * self.h
    }

    fn window(&self) -> impl Iterator<Item = usize> + '_ {
        let first = (self.t_min / self.h).ceil().max(1.0) as usize;
        (first..self.len()).filter(move |&j| self.time(j) <= self.t_max * (1.0 + 1e-12))
    }
}

/// L1 approximation of the Caputo derivative at every grid point.
fn l1_caputo(values: &[f64], h: f64, nu: f64) -> Vec<f64> {
    let n = values.len();
    let b: Vec<f64> = (0..n)
        .map(|j| ((j + 1) as f64).powf(1.0 - nu) - (j as f64).powf(1.0 - nu))
        .collect();
    let c = h.powf(-nu) / crate::ml_special::gamma_pos(2.0 - nu);
    let diffs: Vec<f64> = values.windows(2).map(|w| w[1] - w[0]).collect();
    let mut out = vec![0.0; n];
    for (m, o) in out.iter_mut().enumerate().skip(1) {
        let mut acc = 0.0;
        for j in 0..m {
            acc += b[j] * diffs[m - j - 1];
        }
        *o = c * acc;
    }
    out
}

/// Derivative estimate used for the residuals: L1 for `ν < 1`, fourth-order
/// differences for `ν = 1` (the series carries two points past the window).
fn time_derivative(values: &[f64], h: f64, nu: f64, j: usize) -> Option<f64> {
    let f = |i: usize| values[i];
    if nu < 1.0 {
        None
    } else if j >= 2 {
        Some((f(j - 2) - 8.0 * f(j - 1) + 8.0 * f(j + 1) - f(j + 2)) / (12.0 * h))
    } else {
        Some((-25.0 * f(j) + 48.0 * f(j + 1) - 36.0 * f(j + 2) + 16.0 * f(j + 3) - 3.0 * f(j + 4)) / (12.0 * h))
    }
}

/// Max over the grid window of `|D^ν p_k − (−λ^ν Σ_j (ν choose j)(−1)^j p_{k−j})|`.
pub fn caputo_residual_efpp(params: &MLParams, k: usize, grid: &ResidualGrid) -> Result<f64> {
    let p = validated(params)?;
    let n = grid.eval_len();
    let mut series: Vec<Vec<f64>> = vec![Vec::with_capacity(n); k + 1];
    for j in 0..n {
        let table = efpp_pmf_table(&p, grid.time(j), k)?;
        for (i, s) in series.iter_mut().enumerate() {
            s.push(table.probs[i]);
        }
    }
    let lhs_l1 = (p.nu < 1.0).then(|| l1_caputo(&series[k], grid.h, p.nu));
    let coef: Vec<f64> = (0..=k)
        .map(|j| frac_binomial(p.nu, j) * if j % 2 == 0 { 1.0 } else { -1.0 })
        .collect();
    let lam_nu = p.lambda.powf(p.nu);
    let mut worst = 0.0f64;
    for j in grid.window() {
        let lhs = match &lhs_l1 {
            Some(l) => l[j],
            None => time_derivative(&series[k], grid.h, p.nu, j).expect("nu = 1"),
        };
        let rhs: f64 = -lam_nu * (0..=k).map(|i| coef[i] * series[k - i][j]).sum::<f64>();
        worst = worst.max((lhs - rhs).abs());
    }
    Ok(worst)
}

/// Which matrix equation [`caputo_residual_matrix`] checks.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MatrixMode {
    /// `D^ν P = G P` with `P = 𝓜_ν(G t^ν)`.
    Semi,
    /// `D^ν P = −(−G)^ν P` with `P = 𝓜_ν(−(−G)^ν t^ν)`.
    Para,
}

/// Entrywise residual of the fractional Kolmogorov equation on the grid.
pub fn caputo_residual_matrix(g: &Generator, nu: f64, grid: &ResidualGrid, mode: MatrixMode) -> Result<f64> {
    crate::ml_special::check_nu(nu)?;
    let dim = g.dim();
    let (rhs_op, mats) = match mode {
        MatrixMode::Semi => {
            let mats = (0..grid.eval_len())
                .map(|j| transition_semi(g, nu, grid.time(j)).map(|p| p.entries))
                .collect::<Result<Vec<_>>>()?;
            (g.matrix().clone(), mats)
        }
        MatrixMode::Para => {
            if !crate::matfun::is_irreducible(g) {
                return Err(Error::SpectralDomain(
                    "para-Markov equation requires an irreducible generator".into(),
                ));
            }
            let b = frac_power_neg_gen(g, nu)?;
            let mats = (0..grid.eval_len())
                .map(|j| transition_para_from(&b, nu, grid.time(j)).map(|p| p.entries))
                .collect::<Result<Vec<_>>>()?;
            (b, mats)
        }
    };
    let mut worst = 0.0f64;
    for r in 0..dim {
        for c in 0..dim {
            let series: Vec<f64> = mats.iter().map(|m| m[(r, c)]).collect();
            let l1 = (nu < 1.0).then(|| l1_caputo(&series, grid.h, nu));
            for j in grid.window() {
                let lhs = match &l1 {
                    Some(l) => l[j],
                    None => time_derivative(&series, grid.h, nu, j).expect("nu = 1"),
                };
                let rhs = (rhs_op.row(r) * mats[j].column(c))[(0, 0)];
                worst = worst.max((lhs - rhs).abs());
            }
        }
    }
    Ok(worst)
}

/// Max over `(i, j, t)` of the semi-Markov renewal-equation residual
/// `p_ij(t) − Σ_k h_ik ∫₀ᵗ f_i(τ) p_kj(t−τ) dτ − S_i(t) δ_ij`.
pub fn renewal_residual(spec: &ChainSpec, times: &[f64]) -> Result<f64> {
    let g = from_spec(spec)?;
    let nu = spec.nu;
    let n = spec.len();
    let h = DMatrix::from_fn(n, n, |i, j| spec.h[i][j]);
    let cfg = QuadConfig::default();
    let mut worst = 0.0f64;
    for &t in times {
        if !(t > 0.0 && t.is_finite()) {
            return domain(format!("renewal residual needs t > 0, got {t}"));
        }
        let p_t = transition_semi(&g, nu, t)?.entries;
        for i in 0..n {
            let lam = spec.rates[i];
            let survival = ml_one(nu, -lam * t.powf(nu))?;
            // τ = s^{1/ν}: f_i(τ) dτ = λ 𝓜_ν'(−λ s) ds, smooth in s
            let s_max = t.powf(nu);
            for j in 0..n {
                let integrand = |s: f64| -> f64 {
                    let tau = s.powf(1.0 / nu).min(t);
                    let dens = lam * ml_deriv_n(nu, -lam * s, 1).unwrap_or(f64::NAN);
                    let p = transition_semi(&g, nu, t - tau).map(|m| m.entries).unwrap_or_else(|_| DMatrix::from_element(n, n, f64::NAN));
                    let hp = (h.row(i) * p.column(j))[(0, 0)];
                    dens * hp
                };
                let conv = integrate(integrand, &[0.0, 0.5 * s_max, s_max], &cfg)?.value;
                let delta = if i == j { survival } else { 0.0 };
                worst = worst.max((p_t[(i, j)] - conv - delta).abs());
            }
        }
    }
    Ok(worst)
}

/// `½ Σ |p_n − q_n| + ½ |tail_p − tail_q|`.
pub fn tv_distance(p: &PmfTable, q: &PmfTable) -> Result<f64> {
    if p.probs.len() != q.probs.len() {
        return Err(Error::Size(format!(
            "pmf supports differ: {} vs {} values",
            p.probs.len(),
            q.probs.len()
        )));
    }
    let body: f64 = p.probs.iter().zip(&q.probs).map(|(a, b)| (a - b).abs()).sum();
    Ok(0.5 * body + 0.5 * (p.tail_bound - q.tail_bound).abs())
}

/// Analytic vs Monte Carlo table as CSV: `n,p_analytic,p_mc,abs_diff`,
/// followed by a tail-bound row and a total-variation row.
pub fn write_comparison_csv<W: Write>(analytic: &PmfTable, mc: &PmfTable, mut out: W) -> Result<()> {
    let tv = tv_distance(analytic, mc)?;
    writeln!(out, "n,p_analytic,p_mc,abs_diff")?;
    for (n, (a, m)) in analytic.clamped().iter().zip(&mc.probs).enumerate() {
        writeln!(out, "{n},{},{},{}", g17(*a), g17(*m), g17((a - m).abs()))?;
    }
    let (ta, tm) = (analytic.tail_bound.max(0.0), mc.tail_bound);
    writeln!(out, "tail_bound,{},{},{}", g17(ta), g17(tm), g17((ta - tm).abs()))?;
    writeln!(out, "tv_distance,{},,", g17(tv))?;
    Ok(())
}

/// Poisson(μ) pmf at `n`, computed in log space.
pub fn poisson_pmf(mu: f64, n: usize) -> f64 {
    if mu == 0.0 {
        return if n == 0 { 1.0 } else { 0.0 };
    }
    (n as f64 * mu.ln() - mu - factorial_ln(n)).exp()
}

fn factorial_ln(n: usize) -> f64 {
    if n <= 30 {
        factorial(n).ln()
    } else {
        statrs::function::gamma::ln_gamma(n as f64 + 1.0)
    }
}
