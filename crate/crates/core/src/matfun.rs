//! Generators, matrix functions and the three transition-matrix families.
//!
//! `f(A)` is computed with a Schur–Parlett scheme: complex Schur form
//! `A = Q T Qᴴ`, eigenvalues grouped into clusters that are moved to
//! contiguous diagonal blocks, Taylor series on each block around the
//! cluster mean, and the block Parlett recurrence (triangular Sylvester
//! solves) for everything above the diagonal. Well-conditioned
//! diagonalizable inputs take an eigendecomposition shortcut instead.

use std::collections::VecDeque;
use std::io::Write;

use log::warn;
use nalgebra::{DMatrix, Schur};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::chains::{ChainSpec, MAX_STATES};
use crate::error::{domain, Error, Result};
use crate::fmt::g17;
use crate::ml_special::{check_nu, ml_deriv_n_complex};

type CMat = DMatrix<Complex64>;

const CLUSTER_TOL: f64 = 1e-8;
const PARLETT_DELTA: f64 = 0.1;
const EIG_PATH_MAX_CONDITION: f64 = 1e6;
const TAYLOR_EXTRA_TERMS: usize = 40;

/// Markov generator: nonnegative off-diagonal entries, zero row sums,
/// negative diagonal.
#[derive(Debug, Clone, PartialEq)]
pub struct Generator {
    entries: DMatrix<f64>,
}

impl Generator {
    pub fn new(entries: DMatrix<f64>) -> Result<Self> {
        let n = entries.nrows();
        if n != entries.ncols() {
            return Err(Error::Size(format!("generator is {}x{}", n, entries.ncols())));
        }
        if n == 0 || n > MAX_STATES {
            return Err(Error::Size(format!("generator dimension {n} outside 1..={MAX_STATES}")));
        }
        for i in 0..n {
            let row = entries.row(i);
            let scale = row.iter().fold(1.0f64, |m, v| m.max(v.abs()));
            for j in 0..n {
                let v = entries[(i, j)];
                if !v.is_finite() {
                    return domain(format!("G[{i}][{j}] is not finite"));
                }
                if i != j && v < 0.0 {
                    return domain(format!("off-diagonal G[{i}][{j}] = {v} is negative"));
                }
            }
            if !(entries[(i, i)] < 0.0) {
                return domain(format!("diagonal G[{i}][{i}] = {} must be negative", entries[(i, i)]));
            }
            let s: f64 = row.iter().sum();
            if s.abs() > 1e-12 * scale {
                return domain(format!("row {i} of G sums to {s}, not 0"));
            }
        }
        Ok(Self { entries })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let n = rows.len();
        if rows.iter().any(|r| r.len() != n) {
            return Err(Error::Size("generator rows have unequal lengths".into()));
        }
        Self::new(DMatrix::from_fn(n, n, |i, j| rows[i][j]))
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.entries
    }

    /// Parses a raw CSV matrix (one row per line, optional `#` comments).
    pub fn from_csv(text: &str) -> Result<Self> {
        let mut rows = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let row = line
                .split(',')
                .enumerate()
                .map(|(col, field)| {
                    field.trim().parse::<f64>().map_err(|e| {
                        Error::Parse(format!("line {}, field {}: '{}': {e}", lineno + 1, col + 1, field.trim()))
                    })
                })
                .collect::<Result<Vec<f64>>>()?;
            rows.push(row);
        }
        Self::from_rows(&rows)
    }

    /// Reads either the JSON chain description or a raw CSV matrix.
    pub fn from_text(text: &str) -> Result<Self> {
        if text.trim_start().starts_with('{') {
            from_spec(&ChainSpec::from_json(text)?)
        } else {
            Self::from_csv(text)
        }
    }

    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        write_matrix_csv(&self.entries, out)
    }
}

/// Row-stochastic matrix `P(t)`.
#[derive(Debug, Clone, PartialEq)]
pub struct TransitionMatrix {
    pub t: f64,
    pub entries: DMatrix<f64>,
}

impl TransitionMatrix {
    const EPS: f64 = 1e-9;

    fn checked(t: f64, entries: DMatrix<f64>) -> Result<Self> {
        let n = entries.nrows();
        for i in 0..n {
            let s: f64 = entries.row(i).iter().sum();
            if (s - 1.0).abs() > Self::EPS {
                return Err(Error::Accuracy(format!("row {i} of P({t}) sums to {s}")));
            }
            for j in 0..n {
                let v = entries[(i, j)];
                if !(-Self::EPS..=1.0 + Self::EPS).contains(&v) {
                    return Err(Error::Accuracy(format!("P({t})[{i}][{j}] = {v} is not a probability")));
                }
            }
        }
        Ok(Self { t, entries })
    }

    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        write_matrix_csv(&self.entries, out)
    }
}

pub fn write_matrix_csv<W: Write>(m: &DMatrix<f64>, mut out: W) -> Result<()> {
    for i in 0..m.nrows() {
        let row: Vec<String> = m.row(i).iter().map(|v| g17(*v)).collect();
        writeln!(out, "{}", row.join(","))?;
    }
    Ok(())
}

/// `G = diag(λ)(H − I)`.
pub fn from_spec(spec: &ChainSpec) -> Result<Generator> {
    spec.validate()?;
    Generator::new(spec.generator_matrix())
}

/// Strong connectivity of the graph with edges `i → j` where `g_ij > 0`.
pub fn is_irreducible(g: &Generator) -> bool {
    let n = g.dim();
    let m = g.matrix();
    let reach = |forward: bool| -> usize {
        let mut seen = vec![false; n];
        let mut queue = VecDeque::from([0usize]);
        seen[0] = true;
        let mut count = 1;
        while let Some(i) = queue.pop_front() {
            for j in 0..n {
                let w = if forward { m[(i, j)] } else { m[(j, i)] };
                if i != j && w > 0.0 && !seen[j] {
                    seen[j] = true;
                    count += 1;
                    queue.push_back(j);
                }
            }
        }
        count
    };
    reach(true) == n && reach(false) == n
}

/// Outcome of the spectral assertions on a generator.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SpectralReport {
    /// Eigenvalues as `[re, im]` pairs, sorted by decreasing real part.
    pub eigenvalues: Vec<[f64; 2]>,
    pub left_half_plane: bool,
    pub zero_is_eigenvalue: bool,
    pub ones_in_kernel: bool,
    pub irreducible: bool,
    /// Only assessed for irreducible generators.
    pub zero_is_simple: Option<bool>,
    pub passed: bool,
}

pub fn spectral_check(g: &Generator) -> Result<SpectralReport> {
    let norm = inf_norm(g.matrix());
    let tol = CLUSTER_TOL * norm.max(f64::MIN_POSITIVE);
    let schur = complex_schur(g.matrix())?;
    let mut eig: Vec<Complex64> = (0..g.dim()).map(|i| schur.t[(i, i)]).collect();
    eig.sort_by(|a, b| b.re.total_cmp(&a.re));
    let left_half_plane = eig.iter().all(|z| z.re <= tol);
    let mut by_modulus: Vec<f64> = eig.iter().map(|z| z.norm()).collect();
    by_modulus.sort_by(f64::total_cmp);
    let zero_is_eigenvalue = by_modulus[0] <= tol;
    let ones_in_kernel = g.matrix().row_iter().all(|r| r.sum().abs() <= 1e-12 * norm.max(1.0));
    let irreducible = is_irreducible(g);
    let zero_is_simple = irreducible.then(|| by_modulus.get(1).is_none_or(|m| *m > tol));
    let passed = left_half_plane && zero_is_eigenvalue && ones_in_kernel && zero_is_simple.unwrap_or(true);
    Ok(SpectralReport {
        eigenvalues: eig.iter().map(|z| [z.re, z.im]).collect(),
        left_half_plane,
        zero_is_eigenvalue,
        ones_in_kernel,
        irreducible,
        zero_is_simple,
        passed,
    })
}

/// Scalar function with access to its derivatives, for use in
/// [`matrix_function`].
pub trait ScalarFunction {
    /// `[f(z), f'(z), …, f^{(order)}(z)]`.
    fn derivatives(&self, z: Complex64, order: usize) -> Result<Vec<Complex64>>;

    /// A point where derivatives do not exist but a value is assigned
    /// (e.g. `z^ν` at 0). A cluster there is only accepted when its Schur
    /// block vanishes, i.e. the eigenvalue is semisimple.
    fn singular_point(&self) -> Option<(Complex64, Complex64)> {
        None
    }
}

/// `exp`, mostly for testing the machinery.
#[derive(Debug, Clone, Copy)]
pub struct Exp;

impl ScalarFunction for Exp {
    fn derivatives(&self, z: Complex64, order: usize) -> Result<Vec<Complex64>> {
        Ok(vec![z.exp(); order + 1])
    }
}

/// Identity map.
#[derive(Debug, Clone, Copy)]
pub struct Identity;

impl ScalarFunction for Identity {
    fn derivatives(&self, z: Complex64, order: usize) -> Result<Vec<Complex64>> {
        let mut d = vec![Complex64::new(0.0, 0.0); order + 1];
        d[0] = z;
        if order >= 1 {
            d[1] = Complex64::new(1.0, 0.0);
        }
        Ok(d)
    }
}

/// `z ↦ z^ν` on the principal branch with `0^ν := 0`.
#[derive(Debug, Clone, Copy)]
pub struct FracPower(pub f64);

impl ScalarFunction for FracPower {
    fn derivatives(&self, z: Complex64, order: usize) -> Result<Vec<Complex64>> {
        if z.norm() == 0.0 {
            return Err(Error::SpectralDomain("z^nu has no derivatives at 0".into()));
        }
        let mut out = Vec::with_capacity(order + 1);
        let mut c = 1.0;
        for k in 0..=order {
            out.push(z.powf(self.0 - k as f64) * c);
            c *= self.0 - k as f64;
        }
        Ok(out)
    }

    fn singular_point(&self) -> Option<(Complex64, Complex64)> {
        Some((Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0)))
    }
}

/// One-parameter Mittag-Leffler function `𝓜_ν`.
#[derive(Debug, Clone, Copy)]
pub struct MittagLeffler(pub f64);

impl ScalarFunction for MittagLeffler {
    fn derivatives(&self, z: Complex64, order: usize) -> Result<Vec<Complex64>> {
        (0..=order).map(|n| ml_deriv_n_complex(self.0, z, n)).collect()
    }
}

struct ComplexSchur {
    q: CMat,
    t: CMat,
}

fn inf_norm<T: nalgebra::ComplexField<RealField = f64>>(m: &DMatrix<T>) -> f64 {
    m.row_iter()
        .map(|r| r.iter().map(|v| v.clone().abs()).sum::<f64>())
        .fold(0.0, f64::max)
}

/// Applies the unitary `Z = [v, w]` (with `v = (c1, c2)`, `w = (−c̄2, c̄1)`)
/// to rows and columns `k, k+1` of `T` and to columns of `Q`.
fn rotate_pair(s: &mut ComplexSchur, k: usize, c1: Complex64, c2: Complex64) {
    let n = s.t.nrows();
    let (w1, w2) = (-c2.conj(), c1.conj());
    for j in 0..n {
        // rows: Zᴴ T
        let a = s.t[(k, j)];
        let b = s.t[(k + 1, j)];
        s.t[(k, j)] = c1.conj() * a + c2.conj() * b;
        s.t[(k + 1, j)] = w1.conj() * a + w2.conj() * b;
    }
    for i in 0..n {
        let a = s.t[(i, k)];
        let b = s.t[(i, k + 1)];
        s.t[(i, k)] = a * c1 + b * c2;
        s.t[(i, k + 1)] = a * w1 + b * w2;
        let a = s.q[(i, k)];
        let b = s.q[(i, k + 1)];
        s.q[(i, k)] = a * c1 + b * c2;
        s.q[(i, k + 1)] = a * w1 + b * w2;
    }
    s.t[(k + 1, k)] = Complex64::new(0.0, 0.0);
}

fn unit(a: Complex64, b: Complex64) -> (Complex64, Complex64) {
    let r = (a.norm_sqr() + b.norm_sqr()).sqrt();
    (a / r, b / r)
}

/// Complex Schur form of a real matrix: real Schur form from nalgebra, with
/// each 2×2 block split by a complex rotation.
fn complex_schur(a: &DMatrix<f64>) -> Result<ComplexSchur> {
    let n = a.nrows();
    let real = Schur::try_new(a.clone(), f64::EPSILON, 1000 * n.max(10))
        .ok_or_else(|| Error::Accuracy("real Schur decomposition did not converge".into()))?;
    let (q, t) = real.unpack();
    let mut s = ComplexSchur {
        q: q.map(|v| Complex64::new(v, 0.0)),
        t: t.map(|v| Complex64::new(v, 0.0)),
    };
    let mut k = 0;
    while k + 1 < n {
        if s.t[(k + 1, k)].norm() == 0.0 {
            k += 1;
            continue;
        }
        let (a11, a12, a21, a22) = (s.t[(k, k)], s.t[(k, k + 1)], s.t[(k + 1, k)], s.t[(k + 1, k + 1)]);
        let half_tr = (a11 + a22) * 0.5;
        let disc = ((a11 - a22) * 0.5).powu(2) + a12 * a21;
        let mu = half_tr + disc.sqrt();
        // eigenvector of the block for μ, from whichever row is better scaled
        let (v1, v2) = if (mu - a22).norm() + a21.norm() >= a12.norm() + (mu - a11).norm() {
            (mu - a22, a21)
        } else {
            (a12, mu - a11)
        };
        let (c1, c2) = unit(v1, v2);
        rotate_pair(&mut s, k, c1, c2);
        k += 2;
    }
    for i in 0..n {
        for j in 0..i {
            s.t[(i, j)] = Complex64::new(0.0, 0.0);
        }
    }
    let back = &s.q * &s.t * s.q.adjoint();
    let err = (back - a.map(|v| Complex64::new(v, 0.0))).iter().fold(0.0f64, |m, v| m.max(v.norm()));
    if err > 1e-10 * inf_norm(a).max(1e-300) {
        return Err(Error::Accuracy(format!("Schur residual {err:.3e} too large")));
    }
    Ok(s)
}

/// Swaps the diagonal entries `k` and `k+1` of the triangular factor.
fn swap_diagonal(s: &mut ComplexSchur, k: usize) {
    let a = s.t[(k, k)];
    let b = s.t[(k + 1, k + 1)];
    let x = s.t[(k, k + 1)];
    let (c1, c2) = unit(x, b - a);
    rotate_pair(s, k, c1, c2);
    s.t[(k, k)] = b;
    s.t[(k + 1, k + 1)] = a;
}

/// Groups eigenvalues (transitively) and reorders the Schur form so each
/// group occupies a contiguous diagonal block. Returns block boundaries.
///
/// Eigenvalues within `tight` of each other always merge. Beyond that they
/// merge within the Parlett separation `PARLETT_DELTA`, capped near the
/// function's singular point so that every Taylor expansion stays inside
/// its disc of convergence; eigenvalues at the singular point only group
/// among themselves.
fn cluster_and_reorder(s: &mut ComplexSchur, tight: f64, singular: Option<Complex64>) -> Vec<(usize, usize)> {
    let n = s.t.nrows();
    let eig: Vec<Complex64> = (0..n).map(|i| s.t[(i, i)]).collect();
    let dist_p = |z: Complex64| singular.map_or(f64::INFINITY, |p| (z - p).norm());
    let joins = |i: usize, j: usize| -> bool {
        let d = (eig[i] - eig[j]).norm();
        let (pi, pj) = (dist_p(eig[i]), dist_p(eig[j]));
        if pi <= tight || pj <= tight {
            return pi <= tight && pj <= tight;
        }
        d <= tight || d <= PARLETT_DELTA.min(0.25 * pi.min(pj))
    };
    let mut label: Vec<usize> = (0..n).collect();
    loop {
        let mut changed = false;
        for i in 0..n {
            for j in i + 1..n {
                if label[i] != label[j] && joins(i, j) {
                    let (lo, hi) = (label[i].min(label[j]), label[i].max(label[j]));
                    for l in label.iter_mut() {
                        if *l == hi {
                            *l = lo;
                        }
                    }
                    changed = true;
                }
            }
        }
        if !changed {
            break;
        }
    }
    // rank clusters by first appearance, then bubble into place
    let mut rank_of = vec![usize::MAX; n];
    let mut next = 0;
    for &l in &label {
        if rank_of[l] == usize::MAX {
            rank_of[l] = next;
            next += 1;
        }
    }
    let mut key: Vec<usize> = label.iter().map(|&l| rank_of[l]).collect();
    for pass in 0..n {
        let mut swapped = false;
        for k in 0..n - 1 - pass.min(n - 1) {
            if key[k] > key[k + 1] {
                swap_diagonal(s, k);
                key.swap(k, k + 1);
                swapped = true;
            }
        }
        if !swapped {
            break;
        }
    }
    let mut blocks = Vec::new();
    let mut start = 0;
    for k in 1..=n {
        if k == n || key[k] != key[start] {
            blocks.push((start, k));
            start = k;
        }
    }
    blocks
}

fn sub(m: &CMat, r: (usize, usize), c: (usize, usize)) -> CMat {
    m.view((r.0, c.0), (r.1 - r.0, c.1 - c.0)).into_owned()
}

/// `f` on one diagonal block by Taylor expansion about the cluster mean.
fn diagonal_block<F: ScalarFunction + ?Sized>(f: &F, t: &CMat, tol: f64) -> Result<CMat> {
    let m = t.nrows();
    if m == 1 {
        let z = t[(0, 0)];
        if let Some((p, value)) = f.singular_point() {
            if (z - p).norm() <= tol {
                return Ok(CMat::from_element(1, 1, value));
            }
        }
        return Ok(CMat::from_element(1, 1, f.derivatives(z, 0)?[0]));
    }
    let sigma = (0..m).map(|i| t[(i, i)]).sum::<Complex64>() / m as f64;
    if let Some((p, value)) = f.singular_point() {
        if (sigma - p).norm() <= tol {
            let shifted = t - CMat::identity(m, m) * p;
            let block_norm = shifted.iter().fold(0.0f64, |a, v| a.max(v.norm()));
            if block_norm <= tol {
                return Ok(CMat::identity(m, m) * value);
            }
            return Err(Error::SpectralDomain(format!(
                "function undefined on a defective eigenvalue at {p} (block norm {block_norm:.3e})"
            )));
        }
    }
    let shift = t - CMat::identity(m, m) * sigma;
    let max_order = m + TAYLOR_EXTRA_TERMS;
    let d = f.derivatives(sigma, max_order)?;
    let mut result = CMat::identity(m, m) * d[0];
    let mut power = CMat::identity(m, m);
    let mut factorial = 1.0;
    let mut quiet = 0;
    for (k, dk) in d.iter().enumerate().skip(1) {
        power = &power * &shift;
        factorial *= k as f64;
        let term = &power * (*dk / factorial);
        result += &term;
        let tn = term.iter().fold(0.0f64, |a, v| a.max(v.norm()));
        let rn = result.iter().fold(0.0f64, |a, v| a.max(v.norm()));
        if k >= m && tn <= f64::EPSILON * rn {
            quiet += 1;
            if quiet >= 2 {
                return Ok(result);
            }
        } else {
            quiet = 0;
        }
    }
    Err(Error::Accuracy(format!(
        "Taylor series on a {m}x{m} eigenvalue cluster did not converge in {max_order} terms"
    )))
}

/// Solves `A X − X B = C` for upper-triangular `A`, `B` with disjoint spectra.
fn triangular_sylvester(a: &CMat, b: &CMat, c: &CMat) -> CMat {
    let (p, q) = (a.nrows(), b.nrows());
    let mut x = CMat::zeros(p, q);
    for j in 0..q {
        let mut rhs: Vec<Complex64> = (0..p).map(|i| c[(i, j)]).collect();
        for l in 0..j {
            let blj = b[(l, j)];
            for (i, r) in rhs.iter_mut().enumerate() {
                *r += x[(i, l)] * blj;
            }
        }
        let mu = b[(j, j)];
        for i in (0..p).rev() {
            let mut s = rhs[i];
            for k in i + 1..p {
                s -= a[(i, k)] * x[(k, j)];
            }
            x[(i, j)] = s / (a[(i, i)] - mu);
        }
    }
    x
}

fn schur_parlett<F: ScalarFunction + ?Sized>(f: &F, s: &mut ComplexSchur, tol: f64) -> Result<CMat> {
    let n = s.t.nrows();
    let blocks = cluster_and_reorder(s, tol, f.singular_point().map(|p| p.0));
    let t = &s.t;
    let nb = blocks.len();
    let mut fm = CMat::zeros(n, n);
    for &bl in &blocks {
        let d = diagonal_block(f, &sub(t, bl, bl), tol)?;
        fm.view_mut((bl.0, bl.0), (bl.1 - bl.0, bl.1 - bl.0)).copy_from(&d);
    }
    for dist in 1..nb {
        for i in 0..nb - dist {
            let j = i + dist;
            let (bi, bj) = (blocks[i], blocks[j]);
            let tij = sub(t, bi, bj);
            let mut c = sub(&fm, bi, bi) * &tij - &tij * sub(&fm, bj, bj);
            for &bk in &blocks[i + 1..j] {
                c += sub(&fm, bi, bk) * sub(t, bk, bj) - sub(t, bi, bk) * sub(&fm, bk, bj);
            }
            let x = triangular_sylvester(&sub(t, bi, bi), &sub(t, bj, bj), &c);
            fm.view_mut((bi.0, bj.0), (bi.1 - bi.0, bj.1 - bj.0)).copy_from(&x);
        }
    }
    Ok(&s.q * fm * s.q.adjoint())
}

/// Eigenvectors of the triangular factor, when every eigenvalue is isolated.
fn eigen_shortcut<F: ScalarFunction + ?Sized>(f: &F, s: &ComplexSchur, tol: f64) -> Result<Option<CMat>> {
    let n = s.t.nrows();
    let t = &s.t;
    let mut w = CMat::zeros(n, n);
    for k in 0..n {
        w[(k, k)] = Complex64::new(1.0, 0.0);
        for i in (0..k).rev() {
            let mut acc = Complex64::new(0.0, 0.0);
            for l in i + 1..=k {
                acc += t[(i, l)] * w[(l, k)];
            }
            w[(i, k)] = -acc / (t[(i, i)] - t[(k, k)]);
        }
        let norm = w.column(k).norm();
        w.column_mut(k).unscale_mut(norm);
    }
    let v = &s.q * &w;
    let Some(vinv) = v.clone().try_inverse() else {
        return Ok(None);
    };
    let cond = inf_norm(&v) * inf_norm(&vinv);
    if !(cond < EIG_PATH_MAX_CONDITION) {
        return Ok(None);
    }
    let mut d = CMat::zeros(n, n);
    for i in 0..n {
        let z = t[(i, i)];
        d[(i, i)] = match f.singular_point() {
            Some((p, value)) if (z - p).norm() <= tol => value,
            _ => f.derivatives(z, 0)?[0],
        };
    }
    Ok(Some(v * d * vinv))
}

fn complex_to_real(m: CMat) -> DMatrix<f64> {
    let scale = m.iter().fold(0.0f64, |a, v| a.max(v.norm()));
    let imag = m.iter().fold(0.0f64, |a, v| a.max(v.im.abs()));
    if imag > 1e-8 * scale.max(1.0) {
        warn!("matrix function has imaginary part {imag:.3e}; discarded");
    }
    m.map(|v| v.re)
}

/// `f(A)` for a real square matrix `A` and a function real on the real axis.
pub fn matrix_function<F: ScalarFunction + ?Sized>(a: &DMatrix<f64>, f: &F) -> Result<DMatrix<f64>> {
    let n = a.nrows();
    if n != a.ncols() {
        return Err(Error::Size(format!("matrix is {}x{}", n, a.ncols())));
    }
    if n == 0 || n > MAX_STATES {
        return Err(Error::Size(format!("dimension {n} outside 1..={MAX_STATES}")));
    }
    if a.iter().any(|v| !v.is_finite()) {
        return domain("matrix has non-finite entries");
    }
    let norm = inf_norm(a);
    let tol = CLUSTER_TOL * norm.max(f64::MIN_POSITIVE);
    let mut s = complex_schur(a)?;
    let distinct = (0..n).all(|i| (0..i).all(|j| (s.t[(i, i)] - s.t[(j, j)]).norm() > tol));
    if distinct {
        if let Some(m) = eigen_shortcut(f, &s, tol)? {
            return Ok(complex_to_real(m));
        }
    }
    Ok(complex_to_real(schur_parlett(f, &mut s, tol)?))
}

/// `−(−G)^ν`, the generator of the para-Markov equation.
pub fn frac_power_neg_gen(g: &Generator, nu: f64) -> Result<DMatrix<f64>> {
    check_nu(nu)?;
    if nu == 1.0 {
        return Ok(g.matrix().clone());
    }
    if !is_irreducible(g) {
        warn!("generator is reducible; the fractional power exists only if 0 is semisimple");
    }
    let p = matrix_function(&(-g.matrix()), &FracPower(nu))?;
    Ok(-p)
}

/// `e^{Gt}` (scaling-and-squaring Padé from nalgebra).
pub fn transition_markov(g: &Generator, t: f64) -> Result<TransitionMatrix> {
    check_time(t)?;
    TransitionMatrix::checked(t, (g.matrix() * t).exp())
}

/// `𝓜_ν(G t^ν)`.
pub fn transition_semi(g: &Generator, nu: f64, t: f64) -> Result<TransitionMatrix> {
    check_nu(nu)?;
    check_time(t)?;
    if t == 0.0 {
        return Ok(TransitionMatrix {
            t,
            entries: DMatrix::identity(g.dim(), g.dim()),
        });
    }
    if nu == 1.0 {
        return transition_markov(g, t);
    }
    let a = g.matrix() * t.powf(nu);
    TransitionMatrix::checked(t, matrix_function(&a, &MittagLeffler(nu))?)
}

/// `𝓜_ν(−(−G)^ν t^ν)`; requires an irreducible generator.
pub fn transition_para(g: &Generator, nu: f64, t: f64) -> Result<TransitionMatrix> {
    check_nu(nu)?;
    check_time(t)?;
    if !is_irreducible(g) {
        return Err(Error::SpectralDomain(
            "para-Markov transition matrix requires an irreducible generator".into(),
        ));
    }
    let b = frac_power_neg_gen(g, nu)?;
    transition_para_from(&b, nu, t)
}

/// As [`transition_para`] with `−(−G)^ν` already computed.
pub fn transition_para_from(b: &DMatrix<f64>, nu: f64, t: f64) -> Result<TransitionMatrix> {
    let n = b.nrows();
    if t == 0.0 {
        return Ok(TransitionMatrix {
            t,
            entries: DMatrix::identity(n, n),
        });
    }
    if nu == 1.0 {
        return TransitionMatrix::checked(t, (b * t).exp());
    }
    let a = b * t.powf(nu);
    TransitionMatrix::checked(t, matrix_function(&a, &MittagLeffler(nu))?)
}

fn check_time(t: f64) -> Result<()> {
    if t >= 0.0 && t.is_finite() {
        Ok(())
    } else {
        domain(format!("time must be nonnegative and finite, got {t}"))
    }
}
