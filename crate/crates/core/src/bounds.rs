//! Analytic constants and the inequality chain bounding phase resolution.
//!
//! With `H(N)` the number entropy and `Θ` the phase error:
//!
//! ```text
//! H(Θ) + H(N) ≥ ln 2π                         (entropic uncertainty)
//! δ² > (2π/e) e^{-2H(N)} > (2π/e³) / ⟨N+1⟩²
//! L = e^{H(Θ)} ≥ 2π e^{-H(N)} > (2π/e) / ⟨N+1⟩
//! ```
//!
//! which gives `δ > k_A / ⟨N+1⟩` with `k_A = √(2π/e³)`. The conjectured sharp
//! constant is `k_C = 2(-z_A/3)^{3/2}` with `z_A` the first zero of `Ai`.

use std::f64::consts::{E, TAU};
use std::fmt;
use std::sync::OnceLock;

use serde::Serialize;

use crate::airy;
use crate::error::{Error, Result};
use crate::fock::{thermal_entropy, NumberDistribution, ProbeState};
use crate::phasedist::{canonical_distribution, PhaseDistribution, DEFAULT_ENTROPY_GRID};

/// Slack granted to non-strict entries.
pub const RELATION_TOL: f64 = 1e-10;

pub fn k_a() -> f64 {
    (TAU / E.powi(3)).sqrt()
}

/// First (negative) zero of the Airy function `Ai`.
pub fn airy_first_zero() -> Result<f64> {
    static ZERO: OnceLock<std::result::Result<f64, String>> = OnceLock::new();
    ZERO.get_or_init(|| airy::airy_root_in(-2.4, -2.3).map_err(|e| e.to_string()))
        .clone()
        .map_err(|detail| Error::NonConvergence {
            what: "airy root",
            detail,
        })
}

pub fn k_c() -> f64 {
    let z = airy_first_zero().expect("Ai has a simple root in [-2.4, -2.3]");
    2.0 * (-z / 3.0).powf(1.5)
}

fn check_mean(nbar: f64) -> Result<()> {
    if nbar >= 0.0 && nbar.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!(
            "mean number must be finite and nonnegative, got {nbar}"
        )))
    }
}

/// `k_A / (⟨N⟩ + 1)`, a rigorous lower bound on the RMS phase error.
pub fn heisenberg_bound(nbar: f64) -> Result<f64> {
    check_mean(nbar)?;
    Ok(k_a() / (nbar + 1.0))
}

/// `k_C / (⟨N⟩ + 1)`, the conjectured optimal lower bound.
pub fn conjectured_bound(nbar: f64) -> Result<f64> {
    check_mean(nbar)?;
    Ok(k_c() / (nbar + 1.0))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Relation {
    #[serde(rename = ">")]
    Greater,
    #[serde(rename = ">=")]
    AtLeast,
}

impl fmt::Display for Relation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Relation::Greater => ">",
            Relation::AtLeast => ">=",
        })
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct BoundEntry {
    pub name: String,
    pub lhs: f64,
    pub rhs: f64,
    pub relation: Relation,
    pub satisfied: bool,
    pub margin: f64,
}

impl BoundEntry {
    pub fn new(name: &str, lhs: f64, relation: Relation, rhs: f64) -> Self {
        let margin = lhs - rhs;
        let satisfied = match relation {
            Relation::Greater => margin > 0.0,
            Relation::AtLeast => margin >= -RELATION_TOL,
        };
        Self {
            name: name.to_string(),
            lhs,
            rhs,
            relation,
            satisfied,
            margin,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct BoundReport {
    pub mean_number: f64,
    pub entries: Vec<BoundEntry>,
}

impl BoundReport {
    pub fn all_satisfied(&self) -> bool {
        self.entries.iter().all(|e| e.satisfied)
    }

    pub fn entry(&self, name: &str) -> Option<&BoundEntry> {
        self.entries.iter().find(|e| e.name == name)
    }

    /// Aligned plain-text table.
    pub fn to_table(&self) -> String {
        let width = self.entries.iter().map(|e| e.name.len()).max().unwrap_or(4).max(4);
        let mut out = format!("mean_number = {:.12}\n", self.mean_number);
        out += &format!(
            "{:<width$}  {:>20}  {:>2}  {:>20}  {:>13}  {}\n",
            "name", "lhs", "", "rhs", "margin", "ok"
        );
        for e in &self.entries {
            out += &format!(
                "{:<width$}  {:>20.12e}  {:>2}  {:>20.12e}  {:>13.5e}  {}\n",
                e.name,
                e.lhs,
                e.relation,
                e.rhs,
                e.margin,
                if e.satisfied { "yes" } else { "NO" }
            );
        }
        out
    }
}

/// Entry names, in chain order.
pub mod entry {
    pub const ENTROPIC_UNCERTAINTY: &str = "entropic_uncertainty";
    pub const VARIANCE_VS_NUMBER_ENTROPY: &str = "variance_vs_number_entropy";
    pub const NUMBER_ENTROPY_VS_MEAN: &str = "number_entropy_vs_mean";
    pub const HEISENBERG: &str = "heisenberg";
    pub const LENGTH_VS_NUMBER_ENTROPY: &str = "length_vs_number_entropy";
    pub const LENGTH_VS_MEAN: &str = "length_vs_mean";
    /// Informational: the chain with the exact thermal entropy instead of `+1`.
    pub const THERMAL_SHARP: &str = "thermal_sharp";

    pub const CHAIN: [&str; 6] = [
        ENTROPIC_UNCERTAINTY,
        VARIANCE_VS_NUMBER_ENTROPY,
        NUMBER_ENTROPY_VS_MEAN,
        HEISENBERG,
        LENGTH_VS_NUMBER_ENTROPY,
        LENGTH_VS_MEAN,
    ];
}

/// Evaluates the chain for an error distribution `dist` produced from a probe
/// with number distribution `numbers`.
///
/// The entropy grid starts at the default size and is refined as needed.
pub fn bound_report(dist: &PhaseDistribution, numbers: &NumberDistribution) -> Result<BoundReport> {
    report_with_entropy(dist.refined_entropy(DEFAULT_ENTROPY_GRID)?, dist, numbers)
}

/// [`bound_report`] on a fixed entropy grid, which must agree with its
/// doubling.
pub fn bound_report_with_grid(
    dist: &PhaseDistribution,
    numbers: &NumberDistribution,
    grid_points: usize,
) -> Result<BoundReport> {
    report_with_entropy(dist.differential_entropy(grid_points)?, dist, numbers)
}

fn report_with_entropy(h_theta: f64, dist: &PhaseDistribution, numbers: &NumberDistribution) -> Result<BoundReport> {
    let h_n = numbers.entropy();
    let nbar = numbers.mean();
    let var = dist.mean_square_deviation();
    let shifted = nbar + 1.0;
    let length = h_theta.exp();
    let var_from_entropy = TAU / E * (-2.0 * h_n).exp();
    let length_from_entropy = TAU * (-h_n).exp();

    use entry::*;
    use Relation::*;
    let entries = vec![
        BoundEntry::new(ENTROPIC_UNCERTAINTY, h_theta + h_n, AtLeast, TAU.ln()),
        BoundEntry::new(VARIANCE_VS_NUMBER_ENTROPY, var, Greater, var_from_entropy),
        BoundEntry::new(
            NUMBER_ENTROPY_VS_MEAN,
            var_from_entropy,
            Greater,
            TAU / E.powi(3) / (shifted * shifted),
        ),
        BoundEntry::new(HEISENBERG, var.sqrt(), Greater, k_a() / shifted),
        BoundEntry::new(LENGTH_VS_NUMBER_ENTROPY, length, AtLeast, length_from_entropy),
        BoundEntry::new(LENGTH_VS_MEAN, length_from_entropy, Greater, TAU / E / shifted),
        BoundEntry::new(
            THERMAL_SHARP,
            var_from_entropy,
            AtLeast,
            TAU / E * (-2.0 * thermal_entropy(nbar)?).exp(),
        ),
    ];
    Ok(BoundReport {
        mean_number: nbar,
        entries,
    })
}

/// The chain for the canonical phase distribution of `state`.
pub fn entropy_chain_report(state: &ProbeState) -> Result<BoundReport> {
    bound_report(&canonical_distribution(state), &state.number_distribution())
}
