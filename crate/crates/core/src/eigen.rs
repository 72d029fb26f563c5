//! Smallest eigenpair of a real symmetric matrix.
//!
//! Banded matrices are handled directly: the smallest eigenvalue is bracketed
//! by bisection on the shift `σ`, using the fact that a Cholesky factorization
//! of `B - σI` exists exactly when `σ` lies below the spectrum. Inverse
//! iteration with the last successful factorization then yields the vector.
//! Cost is `O(n b²)` per factorization, so pentadiagonal problems with
//! millions of rows are cheap.
//!
//! Dense matrices are first reduced to tridiagonal form by Householder
//! similarity transforms and then solved as a band of width one. When a good
//! estimate of the eigenpair is known (for example from a nearby matrix in a
//! parameter scan), [`min_eigenpair_warm`] skips the reduction: a shift just
//! below the estimate is certified by a dense Cholesky factorization and the
//! vector follows from inverse iteration.

use nalgebra::{DMatrix, DVector, SymmetricTridiagonal};
use serde::Serialize;

use crate::error::{Error, Result};

/// Required residual `‖Bv - μv‖ / ‖B‖`.
pub const RESIDUAL_TOL: f64 = 1e-9;
/// Largest asymmetry `|b_ij - b_ji|` accepted for dense input.
pub const SYMMETRY_TOL: f64 = 1e-12;

const MAX_BISECTIONS: usize = 200;
const MAX_INVERSE_STEPS: usize = 30;
const WARM_SHIFT_ATTEMPTS: usize = 16;
const WARM_INVERSE_STEPS: usize = 40;

/// Symmetric band matrix. `bands[0]` is the diagonal, `bands[k]` the k-th
/// superdiagonal (length `n - k`).
#[derive(Debug, Clone, PartialEq)]
pub struct BandedSym {
    bands: Vec<Vec<f64>>,
}

impl BandedSym {
    pub fn new(bands: Vec<Vec<f64>>) -> Result<Self> {
        let n = bands.first().map(Vec::len).unwrap_or(0);
        if n == 0 {
            return Err(Error::InvalidArgument("band matrix needs a nonempty diagonal".into()));
        }
        for (k, band) in bands.iter().enumerate() {
            let expected = n.saturating_sub(k);
            if band.len() != expected {
                return Err(Error::DimensionMismatch {
                    expected,
                    found: band.len(),
                });
            }
            if let Some(index) = band.iter().position(|v| !v.is_finite()) {
                return Err(Error::NonFinite { index });
            }
        }
        Ok(Self { bands })
    }

    pub fn dim(&self) -> usize {
        self.bands[0].len()
    }

    pub fn bandwidth(&self) -> usize {
        self.bands.len() - 1
    }

    pub fn diagonal(&self) -> &[f64] {
        &self.bands[0]
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        let (lo, hi) = if i <= j { (i, j) } else { (j, i) };
        self.bands
            .get(hi - lo)
            .and_then(|band| band.get(lo))
            .copied()
            .unwrap_or(0.0)
    }

    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        let mut y: Vec<f64> = self.bands[0].iter().zip(x).map(|(d, v)| d * v).collect();
        for (k, band) in self.bands.iter().enumerate().skip(1) {
            for (i, &b) in band.iter().enumerate() {
                y[i] += b * x[i + k];
                y[i + k] += b * x[i];
            }
        }
        y
    }

    /// Maximum absolute row sum, an upper bound on the spectral norm.
    pub fn norm_inf(&self) -> f64 {
        self.row_sums().iter().fold(0.0, |a: f64, &b| a.max(b))
    }

    fn row_sums(&self) -> Vec<f64> {
        let mut sums: Vec<f64> = self.bands[0].iter().map(|d| d.abs()).collect();
        for (k, band) in self.bands.iter().enumerate().skip(1) {
            for (i, &b) in band.iter().enumerate() {
                sums[i] += b.abs();
                sums[i + k] += b.abs();
            }
        }
        sums
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        let n = self.dim();
        DMatrix::from_fn(n, n, |i, j| self.get(i, j))
    }

    /// Cholesky factor of `self - shift·I`, or `None` if it is not positive definite.
    fn cholesky_shifted(&self, shift: f64) -> Option<BandCholesky> {
        let n = self.dim();
        let b = self.bandwidth();
        let w = b + 1;
        // Row i holds L[i][i-b..=i] at offsets 0..=b.
        let mut l = vec![0.0; n * w];
        for i in 0..n {
            let j0 = i.saturating_sub(b);
            for j in j0..=i {
                let mut s = self.get(i, j) - if i == j { shift } else { 0.0 };
                let k0 = j0.max(j.saturating_sub(b));
                for k in k0..j {
                    s -= l[i * w + (k + b - i)] * l[j * w + (k + b - j)];
                }
                if i == j {
                    if !(s > 0.0) {
                        return None;
                    }
                    l[i * w + b] = s.sqrt();
                } else {
                    l[i * w + (j + b - i)] = s / l[j * w + b];
                }
            }
        }
        Some(BandCholesky { n, b, l })
    }
}

struct BandCholesky {
    n: usize,
    b: usize,
    l: Vec<f64>,
}

impl BandCholesky {
    fn lower(&self, i: usize, j: usize) -> f64 {
        self.l[i * (self.b + 1) + (j + self.b - i)]
    }

    fn solve(&self, rhs: &[f64]) -> Vec<f64> {
        let (n, b) = (self.n, self.b);
        let mut y = rhs.to_vec();
        for i in 0..n {
            let mut s = y[i];
            let lo = i.saturating_sub(b);
            for (k, yk) in (lo..i).zip(&y[lo..i]) {
                s -= self.lower(i, k) * yk;
            }
            y[i] = s / self.lower(i, i);
        }
        for i in (0..n).rev() {
            let mut s = y[i];
            let hi = (i + b + 1).min(n);
            for (k, yk) in ((i + 1)..hi).zip(&y[i + 1..hi]) {
                s -= self.lower(k, i) * yk;
            }
            y[i] = s / self.lower(i, i);
        }
        y
    }
}

#[derive(Debug, Clone)]
pub enum SymMatrix {
    Dense(DMatrix<f64>),
    Banded(BandedSym),
}

impl SymMatrix {
    pub fn dim(&self) -> usize {
        match self {
            SymMatrix::Dense(m) => m.nrows(),
            SymMatrix::Banded(b) => b.dim(),
        }
    }

    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        match self {
            SymMatrix::Dense(m) => (m * DVector::from_column_slice(x)).data.into(),
            SymMatrix::Banded(b) => b.matvec(x),
        }
    }

    pub fn norm_inf(&self) -> f64 {
        match self {
            SymMatrix::Dense(m) => m
                .row_iter()
                .map(|r| r.iter().map(|v| v.abs()).sum::<f64>())
                .fold(0.0, f64::max),
            SymMatrix::Banded(b) => b.norm_inf(),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct EigenPair {
    pub value: f64,
    pub vector: Vec<f64>,
    /// `‖Bv - μv‖₂`.
    pub residual: f64,
    /// Bisection steps plus inverse-iteration steps.
    pub iterations: usize,
}

pub fn min_eigenpair(matrix: &SymMatrix) -> Result<EigenPair> {
    match matrix {
        SymMatrix::Dense(m) => min_eigenpair_dense(m),
        SymMatrix::Banded(b) => min_eigenpair_banded(b),
    }
}

/// Approximate smallest eigenpair used to start [`min_eigenpair_warm`].
#[derive(Debug, Clone, Copy)]
pub struct WarmStart<'a> {
    /// Estimate of the smallest eigenvalue, ideally from above.
    pub value: f64,
    pub vector: &'a [f64],
}

/// Like [`min_eigenpair`], but starts dense problems from `warm`. Falls back
/// to the full reduction when the shifted iteration does not converge.
pub fn min_eigenpair_warm(matrix: &SymMatrix, warm: Option<WarmStart<'_>>) -> Result<EigenPair> {
    match (matrix, warm) {
        (SymMatrix::Dense(m), Some(w)) if m.nrows() > 1 && w.vector.len() == m.nrows() => {
            check_dense(m)?;
            match shifted_inverse_dense(m, w) {
                Some(pair) => Ok(pair),
                None => min_eigenpair_dense(m),
            }
        }
        _ => min_eigenpair(matrix),
    }
}

fn shifted_inverse_dense(m: &DMatrix<f64>, warm: WarmStart<'_>) -> Option<EigenPair> {
    let n = m.nrows();
    let matrix = SymMatrix::Dense(m.clone());
    let norm = matrix.norm_inf().max(f64::MIN_POSITIVE);
    let target = 1e-3 * RESIDUAL_TOL * norm;
    let mut estimate = warm.value;
    let mut offset = 0.05 * estimate.abs() + 16.0 * f64::EPSILON * norm;
    let mut v = warm.vector.to_vec();
    normalize(&mut v);
    let mut iterations = 0;
    for _ in 0..WARM_SHIFT_ATTEMPTS {
        let shift = estimate - offset;
        let mut shifted = m.clone();
        for i in 0..n {
            shifted[(i, i)] -= shift;
        }
        iterations += 1;
        // Success proves the whole spectrum lies above `shift`.
        let Some(chol) = shifted.cholesky() else {
            offset *= 4.0;
            continue;
        };
        let mut rayleigh = estimate;
        for _ in 0..WARM_INVERSE_STEPS {
            iterations += 1;
            let mut w: Vec<f64> = chol.solve(&DVector::from_column_slice(&v)).data.into();
            normalize(&mut w);
            let bw = matrix.matvec(&w);
            rayleigh = dot(&w, &bw);
            let res = residual_norm(&bw, &w, rayleigh);
            v = w;
            if res <= target {
                fix_sign(&mut v);
                return finish(&matrix, v, iterations).ok();
            }
        }
        // Slow convergence: move the shift closer, keeping it below the
        // Rayleigh quotient, which bounds the smallest eigenvalue from above.
        estimate = rayleigh;
        offset = 0.1 * (rayleigh - shift).max(16.0 * f64::EPSILON * norm);
    }
    None
}

fn check_dense(m: &DMatrix<f64>) -> Result<()> {
    let n = m.nrows();
    if n == 0 || m.ncols() != n {
        return Err(Error::DimensionMismatch {
            expected: n.max(1),
            found: m.ncols(),
        });
    }
    let mut asymmetry: f64 = 0.0;
    for i in 0..n {
        for j in 0..i {
            asymmetry = asymmetry.max((m[(i, j)] - m[(j, i)]).abs());
        }
    }
    if asymmetry > SYMMETRY_TOL {
        return Err(Error::NotSymmetric { asymmetry });
    }
    Ok(())
}

fn residual_norm(bv: &[f64], v: &[f64], value: f64) -> f64 {
    bv.iter()
        .zip(v)
        .map(|(x, y)| (x - value * y).powi(2))
        .sum::<f64>()
        .sqrt()
}

pub fn min_eigenpair_dense(m: &DMatrix<f64>) -> Result<EigenPair> {
    check_dense(m)?;
    let n = m.nrows();
    if n == 1 {
        return Ok(EigenPair {
            value: m[(0, 0)],
            vector: vec![1.0],
            residual: 0.0,
            iterations: 0,
        });
    }

    let (q, diag, off) = SymmetricTridiagonal::new(m.clone()).unpack();
    let tri = BandedSym::new(vec![diag.as_slice().to_vec(), off.as_slice().to_vec()])?;
    let inner = smallest_banded(&tri)?;
    let y = DVector::from_vec(inner.vector);
    let mut v: Vec<f64> = (q * y).data.into();
    normalize(&mut v);
    fix_sign(&mut v);
    finish(&SymMatrix::Dense(m.clone()), v, inner.iterations)
}

pub fn min_eigenpair_banded(b: &BandedSym) -> Result<EigenPair> {
    let inner = smallest_banded(b)?;
    let mut v = inner.vector;
    fix_sign(&mut v);
    finish(&SymMatrix::Banded(b.clone()), v, inner.iterations)
}

struct Inner {
    vector: Vec<f64>,
    iterations: usize,
}

fn smallest_banded(b: &BandedSym) -> Result<Inner> {
    let n = b.dim();
    let norm = b.norm_inf().max(f64::MIN_POSITIVE);
    let diag = b.diagonal();
    let sums = b.row_sums();
    // Gershgorin lower bound, and the smallest diagonal entry as an upper bound.
    let mut lo = diag
        .iter()
        .zip(&sums)
        .map(|(d, s)| d - (s - d.abs()))
        .fold(f64::INFINITY, f64::min)
        - 1e-12 * norm;
    let mut hi = diag.iter().copied().fold(f64::INFINITY, f64::min);
    let mut factor = loop {
        match b.cholesky_shifted(lo) {
            Some(f) => break f,
            None => lo -= norm.max(1.0),
        }
    };
    let mut iterations = 0;
    let width_tol = 4.0 * f64::EPSILON * norm;
    while hi - lo > width_tol && iterations < MAX_BISECTIONS {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        iterations += 1;
        match b.cholesky_shifted(mid) {
            Some(f) => {
                lo = mid;
                factor = f;
            }
            None => hi = mid,
        }
    }

    // Deterministic, generic start vector.
    let mut v: Vec<f64> = (0..n)
        .map(|i| 1.0 + 0.5 * (0.618_033_988_749_895 * i as f64).sin())
        .collect();
    normalize(&mut v);
    for _ in 0..MAX_INVERSE_STEPS {
        iterations += 1;
        let mut w = factor.solve(&v);
        normalize(&mut w);
        let bw = b.matvec(&w);
        let mu = dot(&w, &bw);
        let res = residual_norm(&bw, &w, mu);
        v = w;
        if res <= 1e-3 * RESIDUAL_TOL * norm {
            break;
        }
    }
    Ok(Inner {
        vector: v,
        iterations,
    })
}

fn finish(matrix: &SymMatrix, v: Vec<f64>, iterations: usize) -> Result<EigenPair> {
    let bv = matrix.matvec(&v);
    let value = dot(&v, &bv);
    let residual = residual_norm(&bv, &v, value);
    let norm = matrix.norm_inf();
    if !(residual <= RESIDUAL_TOL * norm.max(f64::MIN_POSITIVE)) {
        return Err(Error::NonConvergence {
            what: "smallest eigenpair",
            detail: format!("residual {residual:e} against norm {norm:e}"),
        });
    }
    Ok(EigenPair {
        value,
        vector: v,
        residual,
        iterations,
    })
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn normalize(v: &mut [f64]) {
    let n = dot(v, v).sqrt();
    if n > 0.0 {
        v.iter_mut().for_each(|x| *x /= n);
    }
}

/// Makes the largest-magnitude component positive.
fn fix_sign(v: &mut [f64]) {
    let (mut best, mut idx) = (0.0, 0);
    for (i, x) in v.iter().enumerate() {
        if x.abs() > best {
            best = x.abs();
            idx = i;
        }
    }
    if v[idx] < 0.0 {
        v.iter_mut().for_each(|x| *x = -*x);
    }
}
