//! Discrete estimate-valued measurements and the phase-averaged error
//! distribution.
//!
//! A measurement is a list of outcomes, each an operator `M_j ≥ 0` on the
//! number basis with an attached phase estimate `φ̂_j`. For a probe shifted to
//! `ρ_φ = e^{-iNφ} ρ₀ e^{iNφ}`, outcome `j` occurs with probability
//! `tr[M_j ρ_φ]`. Averaging the error `Θ = φ̂ - φ` uniformly over `φ` gives a
//! trigonometric polynomial whose moments follow in closed form:
//!
//! ```text
//! ⟨e^{ikΘ}⟩ = Σ_j e^{ik φ̂_j} Σ_n (M_j)_{n+k,n} c_n c̄_{n+k}
//! ```
//!
//! The same moments are produced by the covariant measurement generated by
//! `M̄₀ = (1/2π) Σ_j e^{iNφ̂_j} M_j e^{-iNφ̂_j}`.

use std::f64::consts::{PI, TAU};

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fock::ProbeState;
use crate::phasedist::PhaseDistribution;

pub type CMatrix = DMatrix<Complex64>;

/// Smallest eigenvalue accepted for a measurement element.
pub const PSD_TOL: f64 = -1e-10;
/// Entrywise tolerance for Hermiticity and completeness.
pub const COMPLETENESS_TOL: f64 = 1e-10;

/// Maps a phase difference into `[-π, π)`, with `π ↦ -π`.
pub fn wrap_phase(x: f64) -> f64 {
    (x + PI).rem_euclid(TAU) - PI
}

fn wrap_estimate(x: f64) -> f64 {
    let w = x.rem_euclid(TAU);
    if w >= TAU {
        0.0
    } else {
        w
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub estimate: f64,
    pub element: CMatrix,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "PomRepr", into = "PomRepr")]
pub struct EstimatePOM {
    outcomes: Vec<Outcome>,
    dim: usize,
}

#[derive(Serialize, Deserialize)]
struct PomRepr {
    outcomes: Vec<OutcomeRepr>,
}

#[derive(Serialize, Deserialize)]
struct OutcomeRepr {
    estimate: f64,
    element: Vec<Vec<[f64; 2]>>,
}

impl TryFrom<PomRepr> for EstimatePOM {
    type Error = Error;
    fn try_from(r: PomRepr) -> Result<Self> {
        let outcomes = r
            .outcomes
            .into_iter()
            .map(|o| {
                let d = o.element.len();
                if let Some(row) = o.element.iter().find(|row| row.len() != d) {
                    return Err(Error::DimensionMismatch {
                        expected: d,
                        found: row.len(),
                    });
                }
                Ok(Outcome {
                    estimate: o.estimate,
                    element: CMatrix::from_fn(d, d, |i, j| {
                        let [re, im] = o.element[i][j];
                        Complex64::new(re, im)
                    }),
                })
            })
            .collect::<Result<Vec<_>>>()?;
        EstimatePOM::new(outcomes)
    }
}

impl From<EstimatePOM> for PomRepr {
    fn from(p: EstimatePOM) -> Self {
        PomRepr {
            outcomes: p
                .outcomes
                .into_iter()
                .map(|o| OutcomeRepr {
                    estimate: o.estimate,
                    element: o
                        .element
                        .row_iter()
                        .map(|row| row.iter().map(|c| [c.re, c.im]).collect())
                        .collect(),
                })
                .collect(),
        }
    }
}

impl EstimatePOM {
    /// Validates Hermiticity, positivity and completeness. Estimates are
    /// reduced into `[0, 2π)`.
    pub fn new(outcomes: Vec<Outcome>) -> Result<Self> {
        let Some(first) = outcomes.first() else {
            return Err(Error::InvalidArgument("measurement has no outcomes".into()));
        };
        let dim = first.element.nrows();
        if dim == 0 {
            return Err(Error::InvalidArgument("measurement elements are empty".into()));
        }
        let mut total = CMatrix::zeros(dim, dim);
        let mut checked = Vec::with_capacity(outcomes.len());
        for (index, o) in outcomes.into_iter().enumerate() {
            let m = &o.element;
            if m.nrows() != dim || m.ncols() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: m.nrows().max(m.ncols()),
                });
            }
            if !o.estimate.is_finite() {
                return Err(Error::NonFinite { index });
            }
            if m.iter().any(|c| !c.re.is_finite() || !c.im.is_finite()) {
                return Err(Error::InvalidElement {
                    index,
                    reason: "non-finite entry".into(),
                });
            }
            let asym = (m - m.adjoint()).iter().map(|c| c.norm()).fold(0.0, f64::max);
            if asym > COMPLETENESS_TOL {
                return Err(Error::InvalidElement {
                    index,
                    reason: format!("not Hermitian (deviation {asym:e})"),
                });
            }
            let hermitian = (m + m.adjoint()) * Complex64::new(0.5, 0.0);
            let min_eig = SymmetricEigen::new(hermitian.clone())
                .eigenvalues
                .iter()
                .copied()
                .fold(f64::INFINITY, f64::min);
            if min_eig < PSD_TOL {
                return Err(Error::InvalidElement {
                    index,
                    reason: format!("negative eigenvalue {min_eig:e}"),
                });
            }
            total += &hermitian;
            checked.push(Outcome {
                estimate: wrap_estimate(o.estimate),
                element: hermitian,
            });
        }
        let deviation = (total - CMatrix::identity(dim, dim))
            .iter()
            .map(|c| c.norm())
            .fold(0.0, f64::max);
        if deviation > COMPLETENESS_TOL {
            return Err(Error::Incomplete { deviation });
        }
        Ok(Self {
            outcomes: checked,
            dim,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn outcomes(&self) -> &[Outcome] {
        &self.outcomes
    }

    pub fn len(&self) -> usize {
        self.outcomes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.outcomes.is_empty()
    }

    /// Projective number measurement; outcome `n` reports `estimates[n]`.
    pub fn number_measurement(estimates: &[f64]) -> Result<Self> {
        let d = estimates.len();
        let outcomes = estimates
            .iter()
            .enumerate()
            .map(|(n, &estimate)| {
                let mut element = CMatrix::zeros(d, d);
                element[(n, n)] = Complex64::new(1.0, 0.0);
                Outcome { estimate, element }
            })
            .collect();
        Self::new(outcomes)
    }

    /// Canonical phase measurement realized with `outcomes ≥ dim` equally
    /// spaced phase states starting at `offset`.
    pub fn canonical(dim: usize, outcomes: usize, offset: f64) -> Result<Self> {
        if outcomes < dim {
            return Err(Error::InvalidArgument(format!(
                "{outcomes} outcomes cannot resolve dimension {dim}"
            )));
        }
        let k = outcomes as f64;
        let list = (0..outcomes)
            .map(|j| {
                let theta = offset + TAU * j as f64 / k;
                Outcome {
                    estimate: theta,
                    element: CMatrix::from_fn(dim, dim, |a, b| {
                        Complex64::from_polar(1.0 / k, -(a as f64 - b as f64) * theta)
                    }),
                }
            })
            .collect();
        Self::new(list)
    }

    /// Projective measurement onto the columns of a unitary `basis`.
    pub fn projective(basis: &CMatrix, estimates: &[f64]) -> Result<Self> {
        if basis.ncols() != estimates.len() {
            return Err(Error::DimensionMismatch {
                expected: basis.ncols(),
                found: estimates.len(),
            });
        }
        let outcomes = basis
            .column_iter()
            .zip(estimates)
            .map(|(col, &estimate)| Outcome {
                estimate,
                element: col * col.adjoint(),
            })
            .collect();
        Self::new(outcomes)
    }

    /// Random measurement: random positive operators `G_j`, made complete as
    /// `S^{-1/2} G_j S^{-1/2}` with `S = Σ G_j`, at random estimates.
    pub fn random<R: Rng + ?Sized>(dim: usize, outcomes: usize, rank: usize, rng: &mut R) -> Result<Self> {
        if dim == 0 || outcomes == 0 || rank == 0 {
            return Err(Error::InvalidArgument("random measurement needs positive sizes".into()));
        }
        let raw: Vec<CMatrix> = (0..outcomes)
            .map(|_| {
                let g = CMatrix::from_fn(dim, rank, |_, _| {
                    Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
                });
                &g * g.adjoint()
            })
            .collect();
        let total = raw.iter().fold(CMatrix::zeros(dim, dim), |acc, g| acc + g);
        let eig = SymmetricEigen::new(total);
        let inv_sqrt = CMatrix::from_diagonal(&eig.eigenvalues.map(|v| Complex64::new(1.0 / v.sqrt(), 0.0)));
        let s = &eig.eigenvectors * inv_sqrt * eig.eigenvectors.adjoint();
        let list = raw
            .into_iter()
            .map(|g| Outcome {
                estimate: rng.random::<f64>() * TAU,
                element: &s * g * &s,
            })
            .collect();
        Self::new(list)
    }

    /// The same elements with every estimate shifted by `delta`.
    pub fn shifted_estimates(&self, delta: f64) -> Self {
        Self {
            outcomes: self
                .outcomes
                .iter()
                .map(|o| Outcome {
                    estimate: wrap_estimate(o.estimate + delta),
                    element: o.element.clone(),
                })
                .collect(),
            dim: self.dim,
        }
    }
}

fn check_dims(povm: &EstimatePOM, state: &ProbeState) -> Result<()> {
    if povm.dim() != state.dim() {
        return Err(Error::DimensionMismatch {
            expected: povm.dim(),
            found: state.dim(),
        });
    }
    Ok(())
}

/// `tr[M_j ρ_φ]` for every outcome.
pub fn outcome_probabilities(povm: &EstimatePOM, state: &ProbeState, phi: f64) -> Result<Vec<f64>> {
    check_dims(povm, state)?;
    let shifted: Vec<Complex64> = state
        .amplitudes()
        .iter()
        .enumerate()
        .map(|(n, c)| c * Complex64::from_polar(1.0, -(n as f64) * phi))
        .collect();
    Ok(povm
        .outcomes
        .iter()
        .map(|o| expectation(&o.element, &shifted).max(0.0))
        .collect())
}

/// `v† M v`, real part.
fn expectation(m: &CMatrix, v: &[Complex64]) -> f64 {
    let mut total = Complex64::new(0.0, 0.0);
    for (col, vb) in m.column_iter().zip(v) {
        let dot: Complex64 = col.iter().zip(v).map(|(x, va)| va.conj() * x).sum();
        total += dot * vb;
    }
    total.re
}

pub fn conditional_probability(
    povm: &EstimatePOM,
    state: &ProbeState,
    phi: f64,
    outcome_index: usize,
) -> Result<f64> {
    if outcome_index >= povm.len() {
        return Err(Error::OutOfRange(format!(
            "outcome {outcome_index} out of {}",
            povm.len()
        )));
    }
    Ok(outcome_probabilities(povm, state, phi)?[outcome_index])
}

/// Exact moments of the error distribution averaged over all phase shifts.
pub fn average_distribution(povm: &EstimatePOM, state: &ProbeState) -> Result<PhaseDistribution> {
    check_dims(povm, state)?;
    let c = state.amplitudes();
    let d = c.len();
    let moments = (0..d)
        .map(|k| {
            povm.outcomes
                .iter()
                .map(|o| {
                    let inner: Complex64 = (0..d - k)
                        .map(|n| o.element[(n + k, n)] * c[n] * c[n + k].conj())
                        .sum();
                    Complex64::from_polar(1.0, k as f64 * o.estimate) * inner
                })
                .sum()
        })
        .collect();
    Ok(PhaseDistribution::from_moments_unchecked(moments))
}

/// `M̄₀ = (1/2π) Σ_j e^{iNφ̂_j} M_j e^{-iNφ̂_j}`, the seed of the equivalent
/// covariant measurement `{e^{-iNθ} M̄₀ e^{iNθ} dθ}`.
pub fn covariant_seed(povm: &EstimatePOM) -> Result<CMatrix> {
    let d = povm.dim();
    let mut seed = CMatrix::zeros(d, d);
    for o in &povm.outcomes {
        for a in 0..d {
            for b in 0..d {
                let phase = Complex64::from_polar(1.0, (a as f64 - b as f64) * o.estimate);
                seed[(a, b)] += phase * o.element[(a, b)];
            }
        }
    }
    seed /= Complex64::new(TAU, 0.0);
    let deviation = (0..d)
        .map(|n| (seed[(n, n)] * TAU - Complex64::new(1.0, 0.0)).norm())
        .fold(0.0, f64::max);
    if deviation > COMPLETENESS_TOL {
        return Err(Error::Incomplete { deviation });
    }
    Ok(seed)
}

/// Error distribution of the covariant measurement with seed `seed`.
pub fn covariant_distribution(seed: &CMatrix, state: &ProbeState) -> Result<PhaseDistribution> {
    let c = state.amplitudes();
    let d = c.len();
    if seed.nrows() != d || seed.ncols() != d {
        return Err(Error::DimensionMismatch {
            expected: seed.nrows(),
            found: d,
        });
    }
    let moments = (0..d)
        .map(|k| {
            (0..d - k)
                .map(|n| seed[(n + k, n)] * c[n] * c[n + k].conj())
                .sum::<Complex64>()
                * TAU
        })
        .collect();
    Ok(PhaseDistribution::from_moments_unchecked(moments))
}

/// Moments of the averaged error distribution by direct averaging of the
/// outcome probabilities over `points` equally spaced phase shifts. Exact for
/// `points > 2·(dim - 1)`.
pub fn average_distribution_by_quadrature(
    povm: &EstimatePOM,
    state: &ProbeState,
    points: usize,
) -> Result<PhaseDistribution> {
    let d = state.dim();
    if points == 0 {
        return Err(Error::InvalidArgument("quadrature needs at least one point".into()));
    }
    check_dims(povm, state)?;
    let mut moments = vec![Complex64::new(0.0, 0.0); d];
    for g in 0..points {
        let phi = TAU * g as f64 / points as f64;
        let probs = outcome_probabilities(povm, state, phi)?;
        for (o, p) in povm.outcomes.iter().zip(probs) {
            let step = Complex64::from_polar(1.0, o.estimate - phi);
            let mut term = Complex64::new(p, 0.0);
            for m in moments.iter_mut() {
                *m += term;
                term *= step;
            }
        }
    }
    let scale = 1.0 / points as f64;
    Ok(PhaseDistribution::from_moments_unchecked(
        moments.into_iter().map(|m| m * scale).collect(),
    ))
}

/// `Σ_j wrap(φ̂_j - φ)² p(j|φ)`.
pub fn per_phase_variance(povm: &EstimatePOM, state: &ProbeState, phi: f64) -> Result<f64> {
    let probs = outcome_probabilities(povm, state, phi)?;
    Ok(povm
        .outcomes
        .iter()
        .zip(probs)
        .map(|(o, p)| wrap_phase(o.estimate - phi).powi(2) * p)
        .sum())
}

/// Mean of [`per_phase_variance`] over `points` equally spaced phase shifts.
pub fn averaged_per_phase_variance(povm: &EstimatePOM, state: &ProbeState, points: usize) -> Result<f64> {
    if points == 0 {
        return Err(Error::InvalidArgument("quadrature needs at least one point".into()));
    }
    let mut total = 0.0;
    for g in 0..points {
        total += per_phase_variance(povm, state, TAU * g as f64 / points as f64)?;
    }
    Ok(total / points as f64)
}

/// Probe, measurement and diagnostics for perfect discrimination of the
/// phases `2πk/K`.
#[derive(Debug, Clone)]
pub struct KPhaseDemo {
    pub k: usize,
    pub state: ProbeState,
    pub povm: EstimatePOM,
    /// `⟨ψ_k|ψ_l⟩` for the shifted probes `ψ_k = e^{-iNφ_k} ψ`.
    pub gram: CMatrix,
    /// `p(k | φ_k)`.
    pub success_probabilities: Vec<f64>,
    /// `Var_{φ_k}` of the estimate at each special phase.
    pub errors_at_special_phases: Vec<f64>,
    pub mean_number: f64,
}

impl KPhaseDemo {
    /// Largest entrywise deviation of the Gram matrix from the identity.
    pub fn gram_deviation(&self) -> f64 {
        let k = self.gram.nrows();
        (&self.gram - CMatrix::identity(k, k))
            .iter()
            .map(|c| c.norm())
            .fold(0.0, f64::max)
    }
}

pub fn kphase_construction(k: usize) -> Result<KPhaseDemo> {
    if k < 1 {
        return Err(Error::InvalidArgument("K must be at least 1".into()));
    }
    let state = ProbeState::uniform(k)?;
    let kf = k as f64;
    let phases: Vec<f64> = (0..k).map(|j| TAU * j as f64 / kf).collect();
    let outcomes = phases
        .iter()
        .map(|&phi| Outcome {
            estimate: phi,
            element: CMatrix::from_fn(k, k, |a, b| {
                Complex64::from_polar(1.0 / kf, -(a as f64 - b as f64) * phi)
            }),
        })
        .collect();
    let povm = EstimatePOM::new(outcomes)?;
    let gram = CMatrix::from_fn(k, k, |a, b| {
        (0..k)
            .map(|n| Complex64::from_polar(1.0 / kf, n as f64 * (phases[a] - phases[b])))
            .sum()
    });
    let mut success_probabilities = Vec::with_capacity(k);
    let mut errors_at_special_phases = Vec::with_capacity(k);
    for (j, &phi) in phases.iter().enumerate() {
        success_probabilities.push(conditional_probability(&povm, &state, phi, j)?);
        errors_at_special_phases.push(per_phase_variance(&povm, &state, phi)?);
    }
    Ok(KPhaseDemo {
        k,
        mean_number: state.mean_number(),
        state,
        povm,
        gram,
        success_probabilities,
        errors_at_special_phases,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn identity_pom(d: usize) -> EstimatePOM {
        EstimatePOM::new(vec![Outcome {
            estimate: 0.0,
            element: CMatrix::identity(d, d),
        }])
        .unwrap()
    }

    #[test]
    fn wrap_convention() {
        assert_eq!(wrap_phase(PI), -PI);
        assert_eq!(wrap_phase(-PI), -PI);
        assert_abs_diff_eq!(wrap_phase(3.0 * PI / 2.0), -PI / 2.0, epsilon = 1e-15);
        assert_abs_diff_eq!(wrap_phase(0.3), 0.3, epsilon = 1e-15);
        assert_eq!(wrap_estimate(-0.0), 0.0);
        assert_abs_diff_eq!(wrap_estimate(-PI / 2.0), 1.5 * PI, epsilon = 1e-15);
    }

    #[test]
    fn identity_measurement() {
        let s = ProbeState::from_real(&[0.3, 0.5, 0.2]).unwrap();
        let p = identity_pom(3);
        for phi in [0.0, 1.0, 4.0] {
            assert_abs_diff_eq!(conditional_probability(&p, &s, phi, 0).unwrap(), 1.0, epsilon = 1e-14);
        }
        assert!(conditional_probability(&p, &s, 0.0, 1).is_err());
        let d = average_distribution(&identity_pom(1), &ProbeState::vacuum()).unwrap();
        assert_eq!(d.kmax(), 0);
    }

    #[test]
    fn number_measurement_has_no_phase_information() {
        let s = ProbeState::new(vec![
            Complex64::new(0.3, 0.1),
            Complex64::new(-0.5, 0.2),
            Complex64::new(0.2, 0.7),
        ])
        .unwrap();
        let p = EstimatePOM::number_measurement(&[0.0, 1.0, 2.5]).unwrap();
        let p0 = outcome_probabilities(&p, &s, 0.0).unwrap();
        let p1 = outcome_probabilities(&p, &s, 2.1).unwrap();
        for (a, b) in p0.iter().zip(&p1) {
            assert_abs_diff_eq!(a, b, epsilon = 1e-14);
        }
        let avg = average_distribution(&p, &s).unwrap();
        assert!(avg.moments()[1..].iter().all(|m| m.norm() < 1e-15));

        let zero = EstimatePOM::number_measurement(&[0.0; 3]).unwrap();
        assert_abs_diff_eq!(
            per_phase_variance(&zero, &s, PI / 2.0).unwrap(),
            (PI / 2.0).powi(2),
            epsilon = 1e-14
        );
    }

    #[test]
    fn validation_errors() {
        let bad = vec![Outcome {
            estimate: 0.0,
            element: CMatrix::identity(2, 2) * Complex64::new(0.5, 0.0),
        }];
        assert!(matches!(EstimatePOM::new(bad), Err(Error::Incomplete { .. })));

        let mut neg = CMatrix::identity(2, 2);
        neg[(1, 1)] = Complex64::new(-0.5, 0.0);
        let mut rest = CMatrix::zeros(2, 2);
        rest[(1, 1)] = Complex64::new(1.5, 0.0);
        let r = EstimatePOM::new(vec![
            Outcome { estimate: 0.0, element: neg },
            Outcome { estimate: 1.0, element: rest },
        ]);
        assert!(matches!(r, Err(Error::InvalidElement { index: 0, .. })));

        let mut skew = CMatrix::identity(2, 2);
        skew[(0, 1)] = Complex64::new(0.0, 0.1);
        assert!(matches!(
            EstimatePOM::new(vec![Outcome { estimate: 0.0, element: skew }]),
            Err(Error::InvalidElement { .. })
        ));
        assert!(EstimatePOM::new(vec![]).is_err());
        assert!(EstimatePOM::canonical(4, 3, 0.0).is_err());

        let s = ProbeState::uniform(3).unwrap();
        assert!(matches!(
            average_distribution(&identity_pom(2), &s),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn estimates_are_reduced() {
        let p = EstimatePOM::number_measurement(&[-1.0, 7.0]).unwrap();
        assert_abs_diff_eq!(p.outcomes()[0].estimate, TAU - 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(p.outcomes()[1].estimate, 7.0 - TAU, epsilon = 1e-15);
    }

    #[test]
    fn canonical_measurement_reproduces_canonical_distribution() {
        let s = ProbeState::new(vec![
            Complex64::new(0.4, 0.0),
            Complex64::new(0.5, -0.3),
            Complex64::new(0.1, 0.6),
        ])
        .unwrap();
        let p = EstimatePOM::canonical(3, 5, 0.2).unwrap();
        let via_pom = average_distribution(&p, &s).unwrap();
        let direct = crate::phasedist::canonical_distribution(&s);
        for (a, b) in via_pom.moments().iter().zip(direct.moments()) {
            assert_abs_diff_eq!(a.re, b.re, epsilon = 1e-14);
            assert_abs_diff_eq!(a.im, b.im, epsilon = 1e-14);
        }
    }

    #[test]
    fn covariant_seed_has_unit_diagonal() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let p = EstimatePOM::random(4, 5, 2, &mut rng).unwrap();
        let seed = covariant_seed(&p).unwrap();
        for n in 0..4 {
            assert_abs_diff_eq!((seed[(n, n)] * TAU).re, 1.0, epsilon = 1e-12);
        }
        let single = identity_pom(3);
        let seed = covariant_seed(&single).unwrap();
        assert_abs_diff_eq!(seed[(1, 1)].re, 1.0 / TAU, epsilon = 1e-15);
    }

    #[test]
    fn kphase_small_cases() {
        let one = kphase_construction(1).unwrap();
        assert_eq!(one.mean_number, 0.0);
        assert_abs_diff_eq!(one.success_probabilities[0], 1.0, epsilon = 1e-14);

        let two = kphase_construction(2).unwrap();
        assert_abs_diff_eq!(two.mean_number, 0.5, epsilon = 1e-15);
        assert!(two.gram_deviation() < 1e-12);
        for p in &two.success_probabilities {
            assert_abs_diff_eq!(*p, 1.0, epsilon = 1e-12);
        }
        let seed = covariant_seed(&two.povm).unwrap();
        for a in 0..2 {
            for b in 0..2 {
                assert_abs_diff_eq!(seed[(a, b)].re, 1.0 / TAU, epsilon = 1e-14);
                assert_abs_diff_eq!(seed[(a, b)].im, 0.0, epsilon = 1e-14);
            }
        }
        assert!(kphase_construction(0).is_err());
    }

    #[test]
    fn json_round_trip() {
        let two = kphase_construction(2).unwrap();
        let text = serde_json::to_string(&two.povm).unwrap();
        let back: EstimatePOM = serde_json::from_str(&text).unwrap();
        assert_eq!(back.len(), 2);
        assert!(serde_json::from_str::<EstimatePOM>(
            r#"{"outcomes": [{"estimate": 0, "element": [[[0.5, 0]]]}]}"#
        )
        .is_err());
    }
}
