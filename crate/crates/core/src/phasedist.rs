//! 2π-periodic phase-error distributions held as trigonometric moments.
//!
//! Every distribution produced here is a trigonometric polynomial, so it is
//! represented exactly by the finite list `m_k = ⟨e^{ikΘ}⟩`, `k = 0..=kmax`,
//! and the density is
//!
//! ```text
//! p(θ) = (1/2π) [1 + 2 Σ_{k≥1} Re(m_k e^{-ikθ})]
//! ```
//!
//! Polynomial functionals (mean-square error, Holevo variance, surrogate cost)
//! are closed-form in the moments. Only the differential entropy is computed
//! by quadrature.

use std::f64::consts::{PI, TAU};
use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::fock::ProbeState;

/// Grid used to check density nonnegativity on construction.
pub const NONNEG_GRID: usize = 4096;
/// Most negative reconstructed density value accepted as round-off.
pub const NONNEG_TOL: f64 = -1e-9;
/// Default midpoint grid for entropy quadrature.
pub const DEFAULT_ENTROPY_GRID: usize = 8192;
/// Maximum change in entropy when the grid is doubled.
pub const ENTROPY_REFINE_TOL: f64 = 1e-8;
/// Largest grid tried by [`PhaseDistribution::refined_entropy`].
pub const MAX_ENTROPY_GRID: usize = 1 << 20;
/// Below this `|m_1|` the Holevo variance is reported as unbounded.
pub const HOLEVO_FLOOR: f64 = 1e-14;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "DistRepr", into = "DistRepr")]
pub struct PhaseDistribution {
    moments: Vec<Complex64>,
}

#[derive(Serialize, Deserialize)]
struct DistRepr {
    kmax: usize,
    moments: Vec<[f64; 2]>,
}

impl TryFrom<DistRepr> for PhaseDistribution {
    type Error = Error;
    fn try_from(r: DistRepr) -> Result<Self> {
        if r.moments.len() != r.kmax + 1 {
            return Err(Error::DimensionMismatch {
                expected: r.kmax + 1,
                found: r.moments.len(),
            });
        }
        PhaseDistribution::new(
            r.moments
                .into_iter()
                .map(|[re, im]| Complex64::new(re, im))
                .collect(),
        )
    }
}

impl From<PhaseDistribution> for DistRepr {
    fn from(d: PhaseDistribution) -> Self {
        DistRepr {
            kmax: d.kmax(),
            moments: d.moments.iter().map(|m| [m.re, m.im]).collect(),
        }
    }
}

/// Holevo variance `|m_1|^{-2} - 1`, which diverges for flat distributions.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum HolevoVariance {
    Finite(f64),
    Unbounded,
}

impl HolevoVariance {
    pub fn value(self) -> f64 {
        match self {
            HolevoVariance::Finite(v) => v,
            HolevoVariance::Unbounded => f64::INFINITY,
        }
    }

    pub fn is_unbounded(self) -> bool {
        matches!(self, HolevoVariance::Unbounded)
    }
}

impl fmt::Display for HolevoVariance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            HolevoVariance::Finite(v) => write!(f, "{v}"),
            HolevoVariance::Unbounded => f.write_str("unbounded"),
        }
    }
}

impl Serialize for HolevoVariance {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            HolevoVariance::Finite(v) => s.serialize_f64(*v),
            HolevoVariance::Unbounded => s.serialize_str("unbounded"),
        }
    }
}

impl PhaseDistribution {
    /// Validates and wraps a moment vector `m_0..=m_kmax`.
    pub fn new(moments: Vec<Complex64>) -> Result<Self> {
        let Some(m0) = moments.first() else {
            return Err(Error::InvalidMoments("no moments given".into()));
        };
        if (m0 - Complex64::new(1.0, 0.0)).norm() > 1e-12 {
            return Err(Error::InvalidMoments(format!("m_0 = {m0}, expected 1")));
        }
        for (k, m) in moments.iter().enumerate() {
            if !m.re.is_finite() || !m.im.is_finite() {
                return Err(Error::NonFinite { index: k });
            }
            if m.norm() > 1.0 + 1e-12 {
                return Err(Error::InvalidMoments(format!("|m_{k}| = {} > 1", m.norm())));
            }
        }
        let dist = Self::from_moments_unchecked(moments);
        let min = dist.min_density(NONNEG_GRID);
        if min < NONNEG_TOL {
            return Err(Error::InvalidMoments(format!(
                "reconstructed density reaches {min:e}"
            )));
        }
        Ok(dist)
    }

    /// Trusted construction for moments computed from states or measurements.
    pub(crate) fn from_moments_unchecked(mut moments: Vec<Complex64>) -> Self {
        moments[0] = Complex64::new(1.0, 0.0);
        Self { moments }
    }

    pub fn uniform() -> Self {
        Self::from_moments_unchecked(vec![Complex64::new(1.0, 0.0)])
    }

    pub fn kmax(&self) -> usize {
        self.moments.len() - 1
    }

    pub fn moments(&self) -> &[Complex64] {
        &self.moments
    }

    /// `m_k`, zero above `kmax`.
    pub fn moment(&self, k: usize) -> Complex64 {
        self.moments.get(k).copied().unwrap_or_default()
    }

    pub fn density_at(&self, theta: f64) -> f64 {
        let rot = Complex64::from_polar(1.0, -theta);
        let mut w = Complex64::new(1.0, 0.0);
        let mut sum = 0.0;
        for m in &self.moments[1..] {
            w *= rot;
            sum += (m * w).re;
        }
        (1.0 + 2.0 * sum) / TAU
    }

    /// Density on the midpoint grid `θ_j = -π + (j + ½)·2π/points`.
    pub fn density_grid(&self, points: usize) -> Vec<(f64, f64)> {
        let h = TAU / points as f64;
        (0..points)
            .map(|j| {
                let theta = -PI + (j as f64 + 0.5) * h;
                (theta, self.density_at(theta))
            })
            .collect()
    }

    /// Smallest density value on a uniform grid that includes `θ = ±π` and `0`.
    pub fn min_density(&self, points: usize) -> f64 {
        let h = TAU / points as f64;
        (0..points)
            .map(|j| self.density_at(-PI + j as f64 * h))
            .fold(f64::INFINITY, f64::min)
    }

    /// `⟨Θ²⟩` over `[-π, π)`, exact from the cosine series of `θ²`.
    pub fn mean_square_deviation(&self) -> f64 {
        let series: f64 = self.moments[1..]
            .iter()
            .enumerate()
            .map(|(i, m)| {
                let k = (i + 1) as f64;
                let sign = if (i + 1) % 2 == 0 { 1.0 } else { -1.0 };
                sign * m.re / (k * k)
            })
            .sum();
        PI * PI / 3.0 + 4.0 * series
    }

    pub fn holevo_variance(&self) -> HolevoVariance {
        let m1 = self.moment(1).norm();
        if m1 < HOLEVO_FLOOR {
            HolevoVariance::Unbounded
        } else {
            HolevoVariance::Finite(1.0 / (m1 * m1) - 1.0)
        }
    }

    /// Expectation of `5/2 - (8/3) cos θ + (1/6) cos 2θ`, a pointwise lower bound on `θ²`.
    pub fn surrogate_cost(&self) -> f64 {
        2.5 - 8.0 / 3.0 * self.moment(1).re + self.moment(2).re / 6.0
    }

    /// `-∫ p ln p` by the midpoint rule, checked against a doubled grid.
    pub fn differential_entropy(&self, grid_points: usize) -> Result<f64> {
        if grid_points < 64 || !grid_points.is_power_of_two() {
            return Err(Error::InvalidArgument(format!(
                "entropy grid must be a power of two ≥ 64, got {grid_points}"
            )));
        }
        let coarse = self.midpoint_entropy(grid_points);
        let fine = self.midpoint_entropy(2 * grid_points);
        if (coarse - fine).abs() >= ENTROPY_REFINE_TOL {
            return Err(Error::NonConvergence {
                what: "entropy quadrature",
                detail: format!(
                    "{grid_points} points gave {coarse}, {} gave {fine}",
                    2 * grid_points
                ),
            });
        }
        Ok(fine)
    }

    /// [`differential_entropy`](Self::differential_entropy) starting at
    /// `grid_points` and doubling until two successive grids agree.
    /// Densities with near-double zeros need more than the default grid.
    pub fn refined_entropy(&self, grid_points: usize) -> Result<f64> {
        if grid_points < 64 || !grid_points.is_power_of_two() {
            return Err(Error::InvalidArgument(format!(
                "entropy grid must be a power of two ≥ 64, got {grid_points}"
            )));
        }
        let mut points = grid_points;
        let mut coarse = self.midpoint_entropy(points);
        while points < MAX_ENTROPY_GRID {
            let fine = self.midpoint_entropy(2 * points);
            if (coarse - fine).abs() < ENTROPY_REFINE_TOL {
                return Ok(fine);
            }
            points *= 2;
            coarse = fine;
        }
        Err(Error::NonConvergence {
            what: "entropy quadrature",
            detail: format!("no agreement between successive grids up to {MAX_ENTROPY_GRID} points"),
        })
    }

    fn midpoint_entropy(&self, points: usize) -> f64 {
        let h = TAU / points as f64;
        -h * self
            .density_grid(points)
            .into_iter()
            .map(|(_, p)| if p > 0.0 { p * p.ln() } else { 0.0 })
            .sum::<f64>()
    }

    /// `e^{H(Θ)}`, the effective support length of the distribution.
    pub fn ensemble_length(&self) -> Result<f64> {
        Ok(self.refined_entropy(DEFAULT_ENTROPY_GRID)?.exp())
    }
}

/// Canonical phase distribution `p(θ) = |Σ c_n e^{inθ}|² / 2π` of a state.
pub fn canonical_distribution(state: &ProbeState) -> PhaseDistribution {
    let c = state.amplitudes();
    let d = c.len();
    let moments = (0..d)
        .map(|k| {
            c[..d - k]
                .iter()
                .zip(&c[k..])
                .map(|(a, b)| a * b.conj())
                .sum()
        })
        .collect();
    PhaseDistribution::from_moments_unchecked(moments)
}
