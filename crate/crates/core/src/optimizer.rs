//! Minimum phase error at fixed mean generator value.
//!
//! For a real unit vector `c` the cost `⟨θ²⟩` of its canonical phase
//! distribution is the quadratic form `cᵀAc` with the symmetric Toeplitz
//! matrix built from the cosine series of `θ²`. Minimizing it under
//! `Σ n c_n² = n̄` leads to the smallest eigenpair of `A + λ·diag(n)`; the
//! multiplier `λ` is tuned until the eigenvector has the requested mean.
//! Since the smallest eigenvalue is the global minimum of the penalized form,
//! the resulting cost is the global minimum within the truncation.

use std::cell::{Cell, RefCell};
use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use nalgebra::DMatrix;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bounds::k_c;
use crate::eigen::{dot, min_eigenpair_warm, BandedSym, SymMatrix, WarmStart};
use crate::error::{Error, Result};
use crate::fock::{ProbeState, TAIL_TOL};

pub const DEFAULT_MEAN_TOL: f64 = 1e-8;
pub const DEFAULT_DENSE_CAP: usize = 4096;
pub const DEFAULT_BANDED_CAP: usize = 1 << 22;
const MAX_SOLVES: usize = 200;
const MAX_BRACKET_STEPS: usize = 80;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum CostKind {
    /// `θ²`, the mean-square phase error.
    #[serde(rename = "exact")]
    ExactSquare,
    /// `5/2 - (8/3) cos θ + (1/6) cos 2θ ≤ θ²`, giving a pentadiagonal problem.
    #[serde(rename = "surrogate")]
    Surrogate,
}

impl CostKind {
    pub fn name(self) -> &'static str {
        match self {
            CostKind::ExactSquare => "exact",
            CostKind::Surrogate => "surrogate",
        }
    }

    fn default_cap(self) -> usize {
        match self {
            CostKind::ExactSquare => DEFAULT_DENSE_CAP,
            CostKind::Surrogate => DEFAULT_BANDED_CAP,
        }
    }

    /// Coefficient `A[n][n+k]` of the cost matrix.
    fn coefficient(self, k: usize) -> f64 {
        match (self, k) {
            (CostKind::ExactSquare, 0) => PI * PI / 3.0,
            (CostKind::ExactSquare, k) => {
                let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
                2.0 * sign / (k * k) as f64
            }
            (CostKind::Surrogate, 0) => 2.5,
            (CostKind::Surrogate, 1) => -4.0 / 3.0,
            (CostKind::Surrogate, 2) => 1.0 / 12.0,
            (CostKind::Surrogate, _) => 0.0,
        }
    }
}

impl fmt::Display for CostKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for CostKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "exact" | "exact-square" => Ok(CostKind::ExactSquare),
            "surrogate" => Ok(CostKind::Surrogate),
            other => Err(Error::InvalidArgument(format!("unknown cost kind '{other}'"))),
        }
    }
}

/// Symmetric matrix `A` with `cᵀAc` equal to the expected cost of the
/// canonical phase distribution of the real unit vector `c`.
pub fn cost_matrix(kind: CostKind, dim: usize) -> Result<DMatrix<f64>> {
    if dim < 1 {
        return Err(Error::InvalidArgument("dimension must be at least 1".into()));
    }
    Ok(DMatrix::from_fn(dim, dim, |i, j| kind.coefficient(i.abs_diff(j))))
}

/// `A + λ·diag(0, 1, …, dim-1)`, dense for the exact cost and banded for the surrogate.
pub fn penalized_matrix(kind: CostKind, dim: usize, lambda: f64) -> Result<SymMatrix> {
    if dim < 1 {
        return Err(Error::InvalidArgument("dimension must be at least 1".into()));
    }
    match kind {
        CostKind::ExactSquare => {
            let mut a = cost_matrix(kind, dim)?;
            for n in 0..dim {
                a[(n, n)] += lambda * n as f64;
            }
            Ok(SymMatrix::Dense(a))
        }
        CostKind::Surrogate => {
            let bands = (0..=2.min(dim - 1))
                .map(|k| {
                    (0..dim - k)
                        .map(|n| kind.coefficient(k) + if k == 0 { lambda * n as f64 } else { 0.0 })
                        .collect()
                })
                .collect();
            Ok(SymMatrix::Banded(BandedSym::new(bands)?))
        }
    }
}

#[derive(Debug, Clone)]
pub struct MultiplierSolution {
    pub lambda: f64,
    pub mu: f64,
    pub state: Vec<f64>,
    pub mean: f64,
    pub residual: f64,
}

fn mean_of(v: &[f64]) -> f64 {
    v.iter().enumerate().map(|(n, c)| n as f64 * c * c).sum()
}

/// Smallest eigenpair of the penalized matrix and the mean it achieves.
pub fn solve_at_multiplier(kind: CostKind, dim: usize, lambda: f64) -> Result<MultiplierSolution> {
    if !(lambda >= 0.0) || !lambda.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "multiplier must be finite and nonnegative, got {lambda}"
        )));
    }
    solve_near(kind, dim, lambda, None)
}

/// As [`solve_at_multiplier`], warm-started from a solution at a nearby
/// multiplier. `μ(λ)` is concave, so its tangent at `prev` overestimates it.
fn solve_near(
    kind: CostKind,
    dim: usize,
    lambda: f64,
    prev: Option<&MultiplierSolution>,
) -> Result<MultiplierSolution> {
    let warm = prev
        .filter(|p| p.state.len() == dim)
        .map(|p| WarmStart {
            value: p.mu + (lambda - p.lambda) * p.mean,
            vector: &p.state,
        });
    let pair = min_eigenpair_warm(&penalized_matrix(kind, dim, lambda)?, warm)?;
    Ok(MultiplierSolution {
        lambda,
        mu: pair.value,
        mean: mean_of(&pair.vector),
        state: pair.vector,
        residual: pair.residual,
    })
}

/// How the truncation dimension is chosen.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DimPolicy {
    /// Starting dimension; `None` uses `max(64, ceil(8·mean))`.
    pub initial: Option<usize>,
    /// Largest dimension tried when doubling; `None` uses the per-kind default.
    pub cap: Option<usize>,
}

impl Default for DimPolicy {
    fn default() -> Self {
        Self::auto()
    }
}

impl DimPolicy {
    pub fn auto() -> Self {
        Self {
            initial: None,
            cap: None,
        }
    }

    pub fn fixed(dim: usize) -> Self {
        Self {
            initial: Some(dim),
            cap: Some(dim),
        }
    }

    pub fn starting_at(dim: usize) -> Self {
        Self {
            initial: Some(dim),
            cap: None,
        }
    }

    fn initial_dim(&self, target: f64) -> usize {
        self.initial
            .unwrap_or_else(|| 64usize.max((8.0 * target).ceil() as usize))
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct OptimizationResult {
    pub kind: CostKind,
    pub target_mean: f64,
    pub state: ProbeState,
    /// Expected cost of the state, `⟨θ²⟩` or the surrogate, in rad².
    pub cost: f64,
    pub achieved_mean: f64,
    pub lambda: f64,
    /// Smallest eigenvalue `μ = cost + λ·mean`.
    pub eigenvalue: f64,
    pub dim: usize,
    pub tail_mass: f64,
    pub residual: f64,
    /// Eigenpair solves used, over all dimensions tried.
    pub iterations: usize,
}

impl OptimizationResult {
    pub fn delta(&self) -> f64 {
        self.cost.sqrt()
    }

    /// `⟨N+1⟩·δ`.
    pub fn product(&self) -> f64 {
        (self.achieved_mean + 1.0) * self.delta()
    }
}

/// Minimizes the cost over real states with `⟨N⟩ = target_mean`.
///
/// `mean_tol` is relative: success means `|⟨N⟩ - target| ≤ mean_tol·(1 + target)`.
pub fn optimize_at_mean(
    kind: CostKind,
    target_mean: f64,
    policy: &DimPolicy,
    mean_tol: f64,
) -> Result<OptimizationResult> {
    if !(target_mean >= 0.0) || !target_mean.is_finite() {
        return Err(Error::Infeasible {
            target: target_mean,
            reason: "mean must be finite and nonnegative".into(),
        });
    }
    if !(mean_tol > 0.0) {
        return Err(Error::InvalidArgument(format!("mean tolerance must be positive, got {mean_tol}")));
    }
    let cap = policy.cap.unwrap_or_else(|| kind.default_cap());
    let mut dim = policy.initial_dim(target_mean);
    if dim < 1 {
        return Err(Error::InvalidArgument("dimension must be at least 1".into()));
    }
    let mut iterations = 0;
    loop {
        let mut result = optimize_in_dim(kind, target_mean, dim, mean_tol)?;
        iterations += result.iterations;
        result.iterations = iterations;
        if result.tail_mass < TAIL_TOL {
            return Ok(result);
        }
        if dim >= cap {
            return Err(Error::TruncationCap {
                cap,
                tail_mass: result.tail_mass,
            });
        }
        dim = (2 * dim).min(cap);
    }
}

fn optimize_in_dim(kind: CostKind, target: f64, dim: usize, mean_tol: f64) -> Result<OptimizationResult> {
    if target > (dim - 1) as f64 {
        return Err(Error::Infeasible {
            target,
            reason: format!("exceeds largest eigenvalue {} in dimension {dim}", dim - 1),
        });
    }
    let a = penalized_matrix(kind, dim, 0.0)?;
    if target == 0.0 {
        let mut v = vec![0.0; dim];
        v[0] = 1.0;
        let cost = kind.coefficient(0);
        return package(kind, target, &a, MultiplierSolution {
            lambda: 0.0,
            mu: cost,
            mean: 0.0,
            residual: 0.0,
            state: v,
        }, 0);
    }

    let tol = mean_tol * (1.0 + target);
    let solves = Cell::new(0usize);
    let last: RefCell<Option<MultiplierSolution>> = RefCell::new(None);
    let eval = |lambda: f64| -> Result<MultiplierSolution> {
        solves.set(solves.get() + 1);
        if solves.get() > MAX_SOLVES {
            return Err(Error::NonConvergence {
                what: "multiplier search",
                detail: format!("no multiplier within {MAX_SOLVES} solves"),
            });
        }
        if !lambda.is_finite() {
            return Err(Error::InvalidArgument(format!("multiplier must be finite, got {lambda}")));
        }
        let s = solve_near(kind, dim, lambda, last.borrow().as_ref())?;
        *last.borrow_mut() = Some(s.clone());
        Ok(s)
    };

    // Asymptotically cost ≈ k²/(n̄+1)², so λ = -d cost/d n̄ ≈ 2k²/(n̄+1)³.
    let guess = 2.0 * k_c().powi(2) / (target + 1.0).powi(3);
    let first = eval(guess)?;
    if (first.mean - target).abs() <= tol {
        return package(kind, target, &a, first, solves.get());
    }

    // Bracket with mean(lo) > target > mean(hi); mean is nonincreasing in λ.
    let (mut lo, mut hi);
    if first.mean > target {
        lo = first;
        let mut lambda = lo.lambda;
        loop {
            lambda *= 4.0;
            let s = eval(lambda)?;
            if (s.mean - target).abs() <= tol {
                return package(kind, target, &a, s, solves.get());
            }
            if s.mean < target {
                hi = s;
                break;
            }
            lo = s;
            if solves.get() > MAX_BRACKET_STEPS {
                return Err(bracket_failure(target, "mean stays above target"));
            }
        }
    } else {
        hi = first;
        let mut lambda = hi.lambda;
        loop {
            lambda /= 4.0;
            let s = if solves.get() > MAX_BRACKET_STEPS / 2 { eval(0.0)? } else { eval(lambda)? };
            if (s.mean - target).abs() <= tol {
                return package(kind, target, &a, s, solves.get());
            }
            if s.mean > target {
                lo = s;
                break;
            }
            if s.lambda == 0.0 {
                return Err(Error::Infeasible {
                    target,
                    reason: format!(
                        "largest mean reachable with a nonnegative multiplier in dimension {dim} is {}",
                        s.mean
                    ),
                });
            }
            hi = s;
        }
    }

    // Safeguarded secant (Illinois) on ln λ ↦ ln mean, which is nearly linear
    // for large means; falls back to bisection when a step stalls.
    let x = |s: &MultiplierSolution| s.lambda.max(f64::MIN_POSITIVE).ln();
    let g = |s: &MultiplierSolution| s.mean.max(f64::MIN_POSITIVE).ln() - target.ln();
    let (mut glo, mut ghi) = (g(&lo), g(&hi));
    let mut side = 0i8;
    loop {
        let (xl, xh) = (x(&lo), x(&hi));
        let secant = if lo.lambda == 0.0 {
            0.5 * (lo.lambda + hi.lambda)
        } else {
            (xl - glo * (xh - xl) / (ghi - glo)).exp()
        };
        let span = hi.lambda - lo.lambda;
        let lambda = if secant.is_finite()
            && secant > lo.lambda + 1e-3 * span
            && secant < hi.lambda - 1e-3 * span
        {
            secant
        } else {
            0.5 * (lo.lambda + hi.lambda)
        };
        if !(lambda > lo.lambda && lambda < hi.lambda) {
            return Err(bracket_failure(
                target,
                &format!(
                    "bracket collapsed at λ = {} with means {} and {}",
                    lo.lambda, lo.mean, hi.mean
                ),
            ));
        }
        let s = eval(lambda)?;
        if (s.mean - target).abs() <= tol {
            return package(kind, target, &a, s, solves.get());
        }
        let gs = g(&s);
        if s.mean > target {
            lo = s;
            glo = gs;
            if side == -1 {
                ghi *= 0.5;
            }
            side = -1;
        } else {
            hi = s;
            ghi = gs;
            if side == 1 {
                glo *= 0.5;
            }
            side = 1;
        }
    }
}

fn bracket_failure(target: f64, detail: &str) -> Error {
    Error::NonConvergence {
        what: "multiplier bracket",
        detail: format!("target {target}: {detail}"),
    }
}

fn package(
    kind: CostKind,
    target: f64,
    cost_matrix: &SymMatrix,
    s: MultiplierSolution,
    iterations: usize,
) -> Result<OptimizationResult> {
    let cost = dot(&s.state, &cost_matrix.matvec(&s.state));
    let state = ProbeState::from_real(&s.state)?;
    Ok(OptimizationResult {
        kind,
        target_mean: target,
        cost,
        achieved_mean: s.mean,
        lambda: s.lambda,
        eigenvalue: s.mu,
        dim: s.state.len(),
        tail_mass: state.tail_mass(),
        residual: s.residual,
        iterations,
        state,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct CurveRow {
    pub mean: f64,
    pub dim: usize,
    pub lambda: f64,
    pub cost: f64,
    pub delta: f64,
    pub product: f64,
    pub tail_mass: f64,
    pub residual: f64,
    pub iterations: usize,
}

impl From<&OptimizationResult> for CurveRow {
    fn from(r: &OptimizationResult) -> Self {
        CurveRow {
            mean: r.target_mean,
            dim: r.dim,
            lambda: r.lambda,
            cost: r.cost,
            delta: r.delta(),
            product: r.product(),
            tail_mass: r.tail_mass,
            residual: r.residual,
            iterations: r.iterations,
        }
    }
}

/// Minimum of `⟨N+1⟩·δ` at each mean. Points run in parallel on the current
/// rayon pool; rows come back in input order.
pub fn figure2_curve(
    kind: CostKind,
    means: &[f64],
    policy: &DimPolicy,
    mean_tol: f64,
) -> Result<Vec<CurveRow>> {
    if means.is_empty() {
        return Err(Error::InvalidArgument("no means given".into()));
    }
    if means.iter().any(|m| !(*m >= 0.0) || !m.is_finite()) {
        return Err(Error::InvalidArgument("means must be finite and nonnegative".into()));
    }
    if means.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidArgument("means must be strictly ascending".into()));
    }
    means
        .par_iter()
        .map(|&m| optimize_at_mean(kind, m, policy, mean_tol).map(|r| CurveRow::from(&r)))
        .collect()
}
