//! Finite-state jump processes and the exchangeable fractional Poisson
//! process (efPp).
//!
//! All four classes share one construction: an embedded jump chain driven by
//! `H`, and waiting times that differ only in how they are randomized:
//!
//! | class      | wait in state `y`                                   |
//! |------------|-----------------------------------------------------|
//! | Markov     | `Exp(λ(y))`                                         |
//! | semi-Markov| independent Mittag-Leffler, survival `𝓜_ν(−λ(y)tᵛ)` |
//! | para-Markov| `Exp(λ(y)) / L`, one Lamperti `L` per trajectory    |
//! | efPp       | `Exp(λ) / L`, counting states `0, 1, 2, …`          |

use std::io::Write;
use std::path::Path;

use nalgebra::DMatrix;
use rand_distr::{Distribution, Normal, Poisson};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::fmt::g17;
use crate::ml_special::{check_nu, MLParams};
use crate::sampling::{positive, sample_ln_lamperti, sample_ml_waiting, RngStream};

/// Default cap on the number of simulated jumps per trajectory.
pub const DEFAULT_MAX_EVENTS: usize = 10_000_000;
/// Largest supported state space.
pub const MAX_STATES: usize = 512;

/// Finite state space, embedded chain and rates.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChainSpec {
    pub states: Vec<String>,
    #[serde(rename = "H")]
    pub h: Vec<Vec<f64>>,
    pub rates: Vec<f64>,
    pub nu: f64,
}

impl ChainSpec {
    pub fn new(states: Vec<String>, h: Vec<Vec<f64>>, rates: Vec<f64>, nu: f64) -> Result<Self> {
        let spec = Self { states, h, rates, nu };
        spec.validate()?;
        Ok(spec)
    }

    /// States named `0, 1, …, n−1`.
    pub fn unnamed(h: Vec<Vec<f64>>, rates: Vec<f64>, nu: f64) -> Result<Self> {
        let states = (0..rates.len()).map(|i| i.to_string()).collect();
        Self::new(states, h, rates, nu)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let spec: Self = serde_json::from_str(text)
            .map_err(|e| Error::Parse(format!("line {}, column {}: {e}", e.line(), e.column())))?;
        spec.validate()?;
        Ok(spec)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("spec serializes")
    }

    pub fn len(&self) -> usize {
        self.rates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rates.is_empty()
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.rates.len();
        if n < 2 {
            return Err(Error::Size(format!("need at least 2 states, got {n}")));
        }
        if n > MAX_STATES {
            return Err(Error::Size(format!("{n} states exceed the cap {MAX_STATES}")));
        }
        if self.states.len() != n || self.h.len() != n {
            return Err(Error::Size(format!(
                "{} state names, {} rows of H and {n} rates",
                self.states.len(),
                self.h.len()
            )));
        }
        check_nu(self.nu)?;
        for (i, row) in self.h.iter().enumerate() {
            if row.len() != n {
                return Err(Error::Size(format!("row {i} of H has {} entries, expected {n}", row.len())));
            }
            if row[i] != 0.0 {
                return domain(format!("H[{i}][{i}] must be 0, got {}", row[i]));
            }
            if let Some(v) = row.iter().find(|v| !(**v >= 0.0 && v.is_finite())) {
                return domain(format!("row {i} of H has invalid entry {v}"));
            }
            let s: f64 = row.iter().sum();
            if (s - 1.0).abs() > 1e-12 {
                return domain(format!("row {i} of H sums to {s}, not 1"));
            }
        }
        if let Some((i, r)) = self.rates.iter().enumerate().find(|(_, r)| !(**r > 0.0 && r.is_finite())) {
            return domain(format!("rate of state {i} must be positive, got {r}"));
        }
        Ok(())
    }

    /// `G = diag(λ)(H − I)` as a dense matrix.
    pub(crate) fn generator_matrix(&self) -> DMatrix<f64> {
        let n = self.len();
        DMatrix::from_fn(n, n, |i, j| {
            let d = if i == j { 1.0 } else { 0.0 };
            self.rates[i] * (self.h[i][j] - d)
        })
    }

    fn jump_table(&self) -> Vec<Vec<f64>> {
        self.h
            .iter()
            .map(|row| {
                let mut acc = 0.0;
                row.iter()
                    .map(|v| {
                        acc += v;
                        acc
                    })
                    .collect()
            })
            .collect()
    }
}

fn next_state(cum: &[f64], current: usize, rng: &mut RngStream) -> usize {
    let u = rng.open01() * cum[cum.len() - 1];
    let j = cum.partition_point(|&c| c <= u).min(cum.len() - 1);
    if j == current {
        // only reachable through rounding at a zero-width slot; take the
        // nearest state with positive probability
        (0..cum.len())
            .rev()
            .find(|&k| k != current && (if k == 0 { cum[0] } else { cum[k] - cum[k - 1] }) > 0.0)
            .unwrap_or(j)
    } else {
        j
    }
}

/// Process classes sharing the jump-chain construction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Process {
    Markov,
    Semi,
    Para,
    Efpp,
}

impl std::str::FromStr for Process {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "markov" => Ok(Self::Markov),
            "semi" => Ok(Self::Semi),
            "para" => Ok(Self::Para),
            "efpp" => Ok(Self::Efpp),
            other => Err(Error::Parse(format!("unknown process '{other}'"))),
        }
    }
}

/// When to stop a simulation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Stop {
    /// Run until the first jump time at or beyond the horizon.
    Horizon(f64),
    /// Run exactly this many jumps.
    Events(usize),
}

impl Stop {
    fn validate(&self) -> Result<()> {
        match *self {
            Stop::Horizon(h) if !(h > 0.0 && h.is_finite()) => domain(format!("horizon must be positive, got {h}")),
            _ => Ok(()),
        }
    }
}

/// A simulated path: jump epochs `T_0 = 0 < T_1 < …` and visited states.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<usize>,
    /// True when the event cap stopped the run before the requested horizon.
    pub truncated: bool,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn last_time(&self) -> f64 {
        *self.times.last().expect("trajectory holds T_0")
    }

    /// Successive waiting times `T_k − T_{k−1}`.
    pub fn waits(&self) -> Vec<f64> {
        self.times.windows(2).map(|w| w[1] - w[0]).collect()
    }

    /// `X_t`, right-continuous; defined on `[0, T_last]`.
    pub fn state_at(&self, t: f64) -> Result<usize> {
        let last = self.last_time();
        if !(t >= 0.0) || t > last {
            return Err(Error::OutOfRange { t, horizon: last });
        }
        let k = self.times.partition_point(|&x| x <= t);
        Ok(self.states[k - 1])
    }

    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "k,T_k,Y_k")?;
        for (k, (t, y)) in self.times.iter().zip(&self.states).enumerate() {
            writeln!(out, "{k},{},{y}", g17(*t))?;
        }
        Ok(())
    }

    pub fn save_csv(&self, path: &Path) -> Result<()> {
        let f = std::io::BufWriter::new(std::fs::File::create(path)?);
        self.write_csv(f)
    }
}

/// Appends `T_prev + wait`, forcing strict increase when the wait is below
/// the resolution of `T_prev`.
fn advance(t: f64, wait: f64) -> f64 {
    let next = t + wait;
    if next > t {
        next
    } else {
        t.next_up()
    }
}

fn run<W>(spec: &ChainSpec, y0: usize, stop: Stop, max_events: usize, rng: &mut RngStream, mut wait: W) -> Result<Trajectory>
where
    W: FnMut(usize, &mut RngStream) -> Result<f64>,
{
    spec.validate()?;
    stop.validate()?;
    if y0 >= spec.len() {
        return domain(format!("initial state {y0} outside 0..{}", spec.len()));
    }
    let cum = spec.jump_table();
    let mut times = vec![0.0];
    let mut states = vec![y0];
    let mut t = 0.0;
    let mut y = y0;
    let mut truncated = false;
    loop {
        let n = times.len() - 1;
        match stop {
            Stop::Horizon(h) if t >= h => break,
            Stop::Events(k) if n >= k => break,
            _ => {}
        }
        if n >= max_events {
            truncated = true;
            break;
        }
        t = advance(t, wait(y, rng)?);
        y = next_state(&cum[y], y, rng);
        times.push(t);
        states.push(y);
    }
    Ok(Trajectory { times, states, truncated })
}

/// Continuous-time Markov chain.
pub fn simulate_markov(spec: &ChainSpec, y0: usize, stop: Stop, rng: &mut RngStream) -> Result<Trajectory> {
    simulate_markov_capped(spec, y0, stop, DEFAULT_MAX_EVENTS, rng)
}

pub fn simulate_markov_capped(
    spec: &ChainSpec,
    y0: usize,
    stop: Stop,
    max_events: usize,
    rng: &mut RngStream,
) -> Result<Trajectory> {
    let rates = spec.rates.clone();
    run(spec, y0, stop, max_events, rng, |y, r| Ok(positive(r.exp1() / rates[y])))
}

/// Semi-Markov chain with independent Mittag-Leffler waits.
pub fn simulate_semi_markov(spec: &ChainSpec, y0: usize, stop: Stop, rng: &mut RngStream) -> Result<Trajectory> {
    simulate_semi_markov_capped(spec, y0, stop, DEFAULT_MAX_EVENTS, rng)
}

pub fn simulate_semi_markov_capped(
    spec: &ChainSpec,
    y0: usize,
    stop: Stop,
    max_events: usize,
    rng: &mut RngStream,
) -> Result<Trajectory> {
    let params: Vec<MLParams> = spec
        .rates
        .iter()
        .map(|&r| MLParams::new(spec.nu, r))
        .collect::<Result<_>>()?;
    run(spec, y0, stop, max_events, rng, |y, r| sample_ml_waiting(&params[y], r))
}

/// Para-Markov chain: one Lamperti scale `L` per trajectory, every
/// exponential wait divided by it.
pub fn simulate_para_markov(spec: &ChainSpec, y0: usize, stop: Stop, rng: &mut RngStream) -> Result<Trajectory> {
    simulate_para_markov_capped(spec, y0, stop, DEFAULT_MAX_EVENTS, rng)
}

pub fn simulate_para_markov_capped(
    spec: &ChainSpec,
    y0: usize,
    stop: Stop,
    max_events: usize,
    rng: &mut RngStream,
) -> Result<Trajectory> {
    spec.validate()?;
    let ln_l = sample_ln_lamperti(spec.nu, rng)?;
    let rates = spec.rates.clone();
    run(spec, y0, stop, max_events, rng, |y, r| {
        Ok(positive(((r.exp1() / rates[y]).ln() - ln_l).exp()))
    })
}

/// Exchangeable fractional Poisson process with Schur-constant waits
/// `θ_k / L`, `θ_k ~ Exp(λ)`.
pub fn simulate_efpp(nu: f64, lambda: f64, stop: Stop, rng: &mut RngStream) -> Result<Trajectory> {
    simulate_efpp_capped(nu, lambda, stop, DEFAULT_MAX_EVENTS, rng)
}

pub fn simulate_efpp_capped(
    nu: f64,
    lambda: f64,
    stop: Stop,
    max_events: usize,
    rng: &mut RngStream,
) -> Result<Trajectory> {
    MLParams::new(nu, lambda)?;
    stop.validate()?;
    let ln_l = sample_ln_lamperti(nu, rng)?;
    let mut times = vec![0.0];
    let mut t = 0.0;
    let mut truncated = false;
    loop {
        let n = times.len() - 1;
        match stop {
            Stop::Horizon(h) if t >= h => break,
            Stop::Events(k) if n >= k => break,
            _ => {}
        }
        if n >= max_events {
            truncated = true;
            break;
        }
        t = advance(t, positive(((rng.exp1() / lambda).ln() - ln_l).exp()));
        times.push(t);
    }
    let states = (0..times.len()).collect();
    Ok(Trajectory { times, states, truncated })
}

/// Dispatches on the process class; efPp ignores `spec` except for `ν` and
/// uses `λ = spec.rates[0]`.
pub fn simulate(process: Process, spec: &ChainSpec, y0: usize, stop: Stop, rng: &mut RngStream) -> Result<Trajectory> {
    match process {
        Process::Markov => simulate_markov(spec, y0, stop, rng),
        Process::Semi => simulate_semi_markov(spec, y0, stop, rng),
        Process::Para => simulate_para_markov(spec, y0, stop, rng),
        Process::Efpp => simulate_efpp(spec.nu, spec.rates[0], stop, rng),
    }
}

/// Poisson count with mean `mean`; above 10¹² the normal approximation is
/// used (relative error far below Monte Carlo resolution).
pub(crate) fn poisson_count(mean: f64, rng: &mut RngStream) -> u64 {
    if mean <= 0.0 {
        0
    } else if mean <= 1e12 {
        let p = Poisson::new(mean).expect("valid Poisson mean");
        p.sample(rng) as u64
    } else {
        let z: f64 = Normal::new(0.0, 1.0).expect("unit normal").sample(rng);
        let v = mean + z * mean.sqrt();
        if v >= u64::MAX as f64 {
            u64::MAX
        } else {
            v.max(0.0).round() as u64
        }
    }
}

/// `N_t` of the efPp as a Lamperti-mixed Poisson variate: `Poisson(λ L t)`.
pub fn sample_efpp_count(nu: f64, lambda: f64, t: f64, rng: &mut RngStream) -> Result<u64> {
    MLParams::new(nu, lambda)?;
    if !(t >= 0.0) {
        return domain(format!("time must be nonnegative, got {t}"));
    }
    let ln_l = sample_ln_lamperti(nu, rng)?;
    let mean = (ln_l + (lambda * t).ln()).exp();
    Ok(poisson_count(mean, rng))
}

/// Histogram of `N_t` over `replicas` independent replicas: entries
/// `0..=nmax` count exact values, the final entry counts `N_t > nmax`.
pub fn efpp_count_histogram(nu: f64, lambda: f64, t: f64, nmax: usize, replicas: u64, seed: u64) -> Result<Vec<u64>> {
    MLParams::new(nu, lambda)?;
    par_histogram(replicas, nmax + 2, |i| {
        let mut rng = RngStream::new(seed, i);
        let n = sample_efpp_count(nu, lambda, t, &mut rng)?;
        Ok((n as usize).min(nmax + 1))
    })
}

/// Replica-parallel histogram; each replica gets its own stream, and the
/// merge is an integer sum, so the result is schedule independent.
pub(crate) fn par_histogram<F>(replicas: u64, buckets: usize, f: F) -> Result<Vec<u64>>
where
    F: Fn(u64) -> Result<usize> + Sync,
{
    const CHUNK: u64 = 4096;
    let chunks = replicas.div_ceil(CHUNK);
    let partial: Vec<Result<Vec<u64>>> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut h = vec![0u64; buckets];
            for i in c * CHUNK..((c + 1) * CHUNK).min(replicas) {
                h[f(i)?] += 1;
            }
            Ok(h)
        })
        .collect();
    let mut total = vec![0u64; buckets];
    for h in partial {
        for (a, b) in total.iter_mut().zip(h?) {
            *a += b;
        }
    }
    Ok(total)
}

/// Above this many expected jumps a para-Markov replica is sampled from the
/// conditional law `e^{G L t}` instead of jump by jump.
const PARA_DIRECT_THRESHOLD: f64 = 1e3;
/// `e^{Gs}` is at stationarity to machine precision long before this.
const PARA_MAX_EXPONENT: f64 = 1e15;

/// State at time `t` for one replica, without storing the path.
pub fn sample_state_at(process: Process, spec: &ChainSpec, y0: usize, t: f64, rng: &mut RngStream) -> Result<usize> {
    if !(t >= 0.0 && t.is_finite()) {
        return domain(format!("time must be nonnegative and finite, got {t}"));
    }
    if y0 >= spec.len() {
        return domain(format!("initial state {y0} outside 0..{}", spec.len()));
    }
    let cum = spec.jump_table();
    let walk = |rng: &mut RngStream, wait: &mut dyn FnMut(usize, &mut RngStream) -> Result<f64>| -> Result<usize> {
        let mut s = 0.0;
        let mut y = y0;
        for _ in 0..DEFAULT_MAX_EVENTS {
            s += wait(y, rng)?;
            if s > t {
                return Ok(y);
            }
            y = next_state(&cum[y], y, rng);
        }
        Err(Error::Accuracy(format!("more than {DEFAULT_MAX_EVENTS} jumps before t = {t}")))
    };
    match process {
        Process::Markov => walk(rng, &mut |y, r| Ok(r.exp1() / spec.rates[y])),
        Process::Semi => {
            let params: Vec<MLParams> = spec.rates.iter().map(|&r| MLParams::new(spec.nu, r)).collect::<Result<_>>()?;
            walk(rng, &mut |y, r| sample_ml_waiting(&params[y], r))
        }
        Process::Para => {
            let ln_l = sample_ln_lamperti(spec.nu, rng)?;
            let lt = (ln_l + t.ln()).exp();
            let max_rate = spec.rates.iter().cloned().fold(0.0, f64::max);
            if lt * max_rate <= PARA_DIRECT_THRESHOLD {
                walk(rng, &mut |y, r| Ok(r.exp1() / (spec.rates[y] * lt / t)))
            } else {
                // given L the process at t is the Markov chain at L t
                let s = lt.min(PARA_MAX_EXPONENT / max_rate);
                let p = (spec.generator_matrix() * s).exp();
                let row: Vec<f64> = (0..spec.len()).map(|k| p[(y0, k)].max(0.0)).collect();
                let u = rng.open01() * row.iter().sum::<f64>();
                let mut acc = 0.0;
                for (j, pj) in row.iter().enumerate() {
                    acc += pj;
                    if u < acc {
                        return Ok(j);
                    }
                }
                Ok(spec.len() - 1)
            }
        }
        Process::Efpp => {
            let n = sample_efpp_count(spec.nu, spec.rates[0], t, rng)?;
            Ok(n.min(usize::MAX as u64) as usize)
        }
    }
}

/// Monte Carlo estimate of `P(X_t = j | X_0 = y0)`: counts per state.
pub fn marginal_counts(process: Process, spec: &ChainSpec, y0: usize, t: f64, replicas: u64, seed: u64) -> Result<Vec<u64>> {
    if process == Process::Efpp {
        return domain("use efpp_count_histogram for the counting process");
    }
    spec.validate()?;
    par_histogram(replicas, spec.len(), |i| {
        let mut rng = RngStream::new(seed, i);
        sample_state_at(process, spec, y0, t, &mut rng)
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn two_state(a: f64, b: f64, nu: f64) -> ChainSpec {
        ChainSpec::unnamed(vec![vec![0.0, 1.0], vec![1.0, 0.0]], vec![a, b], nu).unwrap()
    }

    #[test]
    fn spec_validation() {
        assert!(ChainSpec::unnamed(vec![vec![0.0]], vec![1.0], 0.5).is_err());
        assert!(ChainSpec::unnamed(vec![vec![0.5, 0.5], vec![1.0, 0.0]], vec![1.0, 1.0], 0.5).is_err());
        assert!(ChainSpec::unnamed(vec![vec![0.0, 0.9], vec![1.0, 0.0]], vec![1.0, 1.0], 0.5).is_err());
        assert!(ChainSpec::unnamed(vec![vec![0.0, 1.0], vec![1.0, 0.0]], vec![1.0, 0.0], 0.5).is_err());
        assert!(ChainSpec::unnamed(vec![vec![0.0, 1.0], vec![1.0, 0.0]], vec![1.0, 1.0], 1.5).is_err());
    }

    #[test]
    fn json_round_trip_and_diagnostics() {
        let s = two_state(1.0, 2.0, 0.5);
        assert_eq!(ChainSpec::from_json(&s.to_json()).unwrap(), s);
        let err = ChainSpec::from_json("{\"states\": [\"a\"],\n \"H\": 3}").unwrap_err();
        assert!(matches!(err, Error::Parse(ref m) if m.contains("line 2")), "{err}");
    }

    #[test]
    fn paths_are_valid() {
        let spec = ChainSpec::unnamed(
            vec![vec![0.0, 0.5, 0.5], vec![0.3, 0.0, 0.7], vec![0.6, 0.4, 0.0]],
            vec![1.0, 2.0, 1.5],
            0.6,
        )
        .unwrap();
        for p in [Process::Markov, Process::Semi, Process::Para] {
            let mut rng = RngStream::new(1, 0);
            let tr = simulate(p, &spec, 0, Stop::Horizon(20.0), &mut rng).unwrap();
            assert!(tr.times.windows(2).all(|w| w[1] > w[0]));
            assert!(tr.states.windows(2).all(|w| w[0] != w[1]));
            assert!(tr.last_time() >= 20.0 || tr.truncated);
            assert_eq!(tr.times[0], 0.0);
        }
    }

    #[test]
    fn replay_is_identical() {
        let spec = two_state(1.0, 2.0, 0.5);
        let a = simulate_para_markov(&spec, 0, Stop::Events(100), &mut RngStream::new(4, 2)).unwrap();
        let b = simulate_para_markov(&spec, 0, Stop::Events(100), &mut RngStream::new(4, 2)).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.len(), 101);
    }

    #[test]
    fn state_at_is_right_continuous() {
        let tr = Trajectory {
            times: vec![0.0, 1.0, 2.5],
            states: vec![0, 1, 0],
            truncated: false,
        };
        assert_eq!(tr.state_at(0.0).unwrap(), 0);
        assert_eq!(tr.state_at(1.0).unwrap(), 1);
        assert_eq!(tr.state_at(1.0f64.next_down()).unwrap(), 0);
        assert_eq!(tr.state_at(2.5).unwrap(), 0);
        assert!(matches!(tr.state_at(2.6), Err(Error::OutOfRange { .. })));
        assert!(tr.state_at(-1.0).is_err());
    }

    #[test]
    fn truncation_is_flagged() {
        let spec = two_state(1.0, 1.0, 1.0);
        let tr = simulate_markov_capped(&spec, 0, Stop::Horizon(1e9), 50, &mut RngStream::new(1, 0)).unwrap();
        assert!(tr.truncated);
        assert_eq!(tr.len(), 51);
    }

    #[test]
    fn efpp_counts_up_by_one() {
        let tr = simulate_efpp(0.75, 1.0, Stop::Events(1000), &mut RngStream::new(1, 0)).unwrap();
        assert_eq!(tr.states, (0..=1000).collect::<Vec<_>>());
        assert!(tr.times.windows(2).all(|w| w[1] > w[0]));
    }

    #[test]
    fn markov_sojourn_mean() {
        let spec = two_state(1.0, 3.0, 1.0);
        let tr = simulate_markov(&spec, 0, Stop::Events(200_000), &mut RngStream::new(2, 0)).unwrap();
        let w = tr.waits();
        let s1: Vec<f64> = w.iter().step_by(2).cloned().collect();
        let m = s1.iter().sum::<f64>() / s1.len() as f64;
        let se = 1.0 / (s1.len() as f64).sqrt();
        assert!((m - 1.0).abs() < 3.0 * se, "{m}");
    }

    #[test]
    fn csv_format() {
        let tr = Trajectory {
            times: vec![0.0, 0.1],
            states: vec![0, 1],
            truncated: false,
        };
        let mut buf = Vec::new();
        tr.write_csv(&mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "k,T_k,Y_k\n0,0,0\n1,0.10000000000000001,1\n");
    }

    #[test]
    fn histogram_is_deterministic() {
        let a = efpp_count_histogram(0.5, 1.0, 1.0, 9, 10_000, 1).unwrap();
        let b = efpp_count_histogram(0.5, 1.0, 1.0, 9, 10_000, 1).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.iter().sum::<u64>(), 10_000);
    }
}
