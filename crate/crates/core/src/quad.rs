//! Globally adaptive Gauss–Kronrod (10/21 point) quadrature for real and
//! complex integrands.

use std::ops::{Add, Mul, Sub};

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Values that can be integrated: real or complex scalars.
pub trait QuadValue: Copy + Add<Output = Self> + Sub<Output = Self> + Mul<f64, Output = Self> {
    fn zero() -> Self;
    fn magnitude(self) -> f64;
}

impl QuadValue for f64 {
    fn zero() -> Self {
        0.0
    }
    fn magnitude(self) -> f64 {
        self.abs()
    }
}

impl QuadValue for Complex64 {
    fn zero() -> Self {
        Complex64::new(0.0, 0.0)
    }
    fn magnitude(self) -> f64 {
        self.norm()
    }
}

#[derive(Debug, Clone, Copy)]
pub struct QuadConfig {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_intervals: usize,
}

impl Default for QuadConfig {
    fn default() -> Self {
        Self {
            abs_tol: 1e-9,
            rel_tol: 1e-12,
            max_intervals: 2000,
        }
    }
}

impl QuadConfig {
    pub fn tight() -> Self {
        Self {
            abs_tol: 0.0,
            rel_tol: 1e-14,
            max_intervals: 4000,
        }
    }

    fn target(&self, value: f64) -> f64 {
        self.abs_tol.max(self.rel_tol * value)
    }
}

#[derive(Debug, Clone, Copy)]
pub struct Estimate<T> {
    pub value: T,
    pub abs_error: f64,
    pub evaluations: usize,
}

#[allow(clippy::excessive_precision)]
const XGK: [f64; 11] = [
    0.995_657_163_025_808_080_735_527_280_689_003,
    0.973_906_528_517_171_720_077_964_012_084_452,
    0.930_157_491_355_708_226_001_207_180_059_508,
    0.865_063_366_688_984_510_732_096_688_423_493,
    0.780_817_726_586_416_897_063_717_578_345_042,
    0.679_409_568_299_024_406_234_327_365_114_874,
    0.562_757_134_668_604_683_339_000_099_272_694,
    0.433_395_394_129_247_190_799_265_943_165_784,
    0.294_392_862_701_460_198_131_126_603_103_866,
    0.148_874_338_981_631_210_884_826_001_129_720,
    0.0,
];

#[allow(clippy::excessive_precision)]
const WGK: [f64; 11] = [
    0.011_694_638_867_371_874_278_064_396_062_192,
    0.032_558_162_307_964_727_478_818_972_459_390,
    0.054_755_896_574_351_996_031_381_300_244_580,
    0.075_039_674_810_919_952_767_043_140_916_190,
    0.093_125_454_583_697_605_535_065_465_083_366,
    0.109_387_158_802_297_641_899_210_590_325_805,
    0.123_491_976_262_065_851_077_600_525_452_802,
    0.134_709_217_311_473_325_928_054_001_771_707,
    0.142_775_938_577_060_080_797_094_273_138_717,
    0.147_739_104_901_338_491_374_841_515_972_068,
    0.149_445_554_002_916_905_664_936_468_389_821,
];

// Gauss weights for XGK[1], XGK[3], ..., XGK[9].
#[allow(clippy::excessive_precision)]
const WG: [f64; 5] = [
    0.066_671_344_308_688_137_593_568_809_893_332,
    0.149_451_349_150_580_593_145_776_339_657_697,
    0.219_086_362_515_982_043_995_534_934_228_163,
    0.269_266_719_309_996_355_091_226_921_569_469,
    0.295_524_224_714_752_870_173_892_994_651_338,
];

struct Panel<T> {
    a: f64,
    b: f64,
    value: T,
    error: f64,
}

fn kronrod<T: QuadValue, F: FnMut(f64) -> T>(f: &mut F, a: f64, b: f64) -> Panel<T> {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut resk = fc * WGK[10];
    let mut resg = T::zero();
    let mut fv = [T::zero(); 20];
    for j in 0..10 {
        let dx = half * XGK[j];
        let f1 = f(center - dx);
        let f2 = f(center + dx);
        fv[2 * j] = f1;
        fv[2 * j + 1] = f2;
        resk = resk + (f1 + f2) * WGK[j];
        if j % 2 == 1 {
            resg = resg + (f1 + f2) * WG[j / 2];
        }
    }
    let mean = resk * 0.5;
    let mut resasc = (fc - mean).magnitude() * WGK[10];
    for j in 0..10 {
        resasc += WGK[j] * ((fv[2 * j] - mean).magnitude() + (fv[2 * j + 1] - mean).magnitude());
    }
    resasc *= half.abs();
    let mut error = ((resk - resg) * half).magnitude();
    if resasc != 0.0 && error != 0.0 {
        error = resasc * (200.0 * error / resasc).powf(1.5).min(1.0);
    }
    Panel {
        a,
        b,
        value: resk * half,
        error,
    }
}

/// Integrates `f` over `[points[0], points[last]]`, starting from the panels
/// delimited by `points` (which must be increasing).
pub fn integrate<T: QuadValue, F: FnMut(f64) -> T>(
    mut f: F,
    points: &[f64],
    cfg: &QuadConfig,
) -> Result<Estimate<T>> {
    if points.len() < 2 || points.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::Domain(format!("invalid integration breakpoints {points:?}")));
    }
    let mut panels: Vec<Panel<T>> = points.windows(2).map(|w| kronrod(&mut f, w[0], w[1])).collect();
    let mut evaluations = 21 * panels.len();
    loop {
        let mut total = T::zero();
        let mut err = 0.0;
        for p in &panels {
            total = total + p.value;
            err += p.error;
        }
        if !err.is_finite() || !total.magnitude().is_finite() {
            return Err(Error::Accuracy("non-finite integrand".into()));
        }
        if err <= cfg.target(total.magnitude()) {
            return Ok(Estimate {
                value: total,
                abs_error: err,
                evaluations,
            });
        }
        if panels.len() >= cfg.max_intervals {
            return Err(Error::Accuracy(format!(
                "quadrature did not converge: estimated error {err:.3e} on value {:.6e}",
                total.magnitude()
            )));
        }
        let worst = panels
            .iter()
            .enumerate()
            .max_by(|x, y| x.1.error.total_cmp(&y.1.error))
            .map(|(i, _)| i)
            .unwrap();
        let Panel { a, b, .. } = panels.swap_remove(worst);
        let mid = 0.5 * (a + b);
        if !(mid > a && mid < b) {
            return Err(Error::Accuracy("quadrature panel below machine resolution".into()));
        }
        panels.push(kronrod(&mut f, a, mid));
        panels.push(kronrod(&mut f, mid, b));
        evaluations += 42;
    }
}

/// Integrates `f` over `[a, ∞)` through the map `x = a + u / (1 − u)`.
pub fn integrate_to_infinity<T: QuadValue, F: FnMut(f64) -> T>(
    mut f: F,
    a: f64,
    cfg: &QuadConfig,
) -> Result<Estimate<T>> {
    let g = move |u: f64| {
        let v = 1.0 - u;
        let x = a + u / v;
        let y = f(x) * (1.0 / (v * v));
        if y.magnitude().is_finite() {
            y
        } else {
            T::zero()
        }
    };
    integrate(g, &[0.0, 0.5, 1.0], cfg)
}
