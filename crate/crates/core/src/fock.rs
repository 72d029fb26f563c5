//! Probe states in the eigenbasis of the shift generator.
//!
//! A probe is a pure state `Σ c_n |n⟩` over the nonnegative integer eigenvalues
//! `n` of the generator `N`. Everything the bounds depend on is a function of
//! the number distribution `p_n = |c_n|²`, which is why multimode generators
//! can be reduced to a single-mode description without loss.

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Tolerance on `Σ|c_n|² = 1` for inputs that claim to be normalized.
pub const NORM_TOL: f64 = 1e-10;

/// Tail mass below which a truncated state is considered adequate.
pub const TAIL_TOL: f64 = 1e-10;

/// Normalized pure state, amplitudes indexed by generator eigenvalue.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "StateRepr", into = "StateRepr")]
pub struct ProbeState {
    amplitudes: Vec<Complex64>,
}

/// Result of [`make_state`]: the normalized state and the factor applied.
#[derive(Debug, Clone)]
pub struct Normalized {
    pub state: ProbeState,
    pub norm_factor: f64,
}

/// Normalizes `amplitudes` into a [`ProbeState`], reporting the factor used.
pub fn make_state(amplitudes: Vec<Complex64>) -> Result<Normalized> {
    if amplitudes.is_empty() {
        return Err(Error::EmptyState);
    }
    if let Some(index) = amplitudes
        .iter()
        .position(|c| !c.re.is_finite() || !c.im.is_finite())
    {
        return Err(Error::NonFinite { index });
    }
    let norm = amplitudes.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
    if norm == 0.0 || !norm.is_finite() {
        return Err(Error::ZeroNorm);
    }
    let norm_factor = 1.0 / norm;
    let amplitudes = amplitudes.into_iter().map(|c| c * norm_factor).collect();
    Ok(Normalized {
        state: ProbeState { amplitudes },
        norm_factor,
    })
}

impl ProbeState {
    pub fn new(amplitudes: Vec<Complex64>) -> Result<Self> {
        make_state(amplitudes).map(|n| n.state)
    }

    pub fn from_real(amplitudes: &[f64]) -> Result<Self> {
        Self::new(amplitudes.iter().map(|&a| Complex64::new(a, 0.0)).collect())
    }

    pub fn vacuum() -> Self {
        Self::fock(0, 1).expect("vacuum is valid")
    }

    /// Number state `|n⟩` in a space of dimension `dim`.
    pub fn fock(n: usize, dim: usize) -> Result<Self> {
        if n >= dim {
            return Err(Error::OutOfRange(format!(
                "fock index {n} outside dimension {dim}"
            )));
        }
        let mut amplitudes = vec![Complex64::new(0.0, 0.0); dim];
        amplitudes[n] = Complex64::new(1.0, 0.0);
        Ok(Self { amplitudes })
    }

    /// Equal superposition of `|0⟩ .. |k-1⟩`.
    pub fn uniform(k: usize) -> Result<Self> {
        if k == 0 {
            return Err(Error::EmptyState);
        }
        Self::from_real(&vec![1.0; k])
    }

    /// State with independent complex Gaussian amplitudes, normalized.
    pub fn random<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> Result<Self> {
        if dim == 0 {
            return Err(Error::EmptyState);
        }
        let amplitudes = (0..dim)
            .map(|_| Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)))
            .collect();
        Self::new(amplitudes)
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn number_distribution(&self) -> NumberDistribution {
        NumberDistribution {
            probabilities: self.amplitudes.iter().map(|c| c.norm_sqr()).collect(),
        }
    }

    pub fn mean_number(&self) -> f64 {
        self.number_distribution().mean()
    }

    /// Shannon entropy of the number distribution, in nats.
    pub fn number_entropy(&self) -> f64 {
        self.number_distribution().entropy()
    }

    /// Probability carried by the last two basis states, `Σ_{n ≥ dim-2} |c_n|²`.
    pub fn tail_mass(&self) -> f64 {
        let start = self.dim().saturating_sub(2);
        self.amplitudes[start..].iter().map(|c| c.norm_sqr()).sum()
    }

    /// The state multiplied by a global phase `e^{iα}`.
    pub fn with_global_phase(&self, alpha: f64) -> Self {
        let w = Complex64::from_polar(1.0, alpha);
        Self {
            amplitudes: self.amplitudes.iter().map(|&c| c * w).collect(),
        }
    }
}

/// JSON form: array of `[re, im]` pairs, or plain reals.
#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum StateRepr {
    Pairs(Vec<[f64; 2]>),
    Reals(Vec<f64>),
}

impl TryFrom<StateRepr> for ProbeState {
    type Error = Error;

    fn try_from(repr: StateRepr) -> Result<Self> {
        match repr {
            StateRepr::Pairs(p) => {
                ProbeState::new(p.into_iter().map(|[re, im]| Complex64::new(re, im)).collect())
            }
            StateRepr::Reals(r) => ProbeState::from_real(&r),
        }
    }
}

impl From<ProbeState> for StateRepr {
    fn from(s: ProbeState) -> Self {
        StateRepr::Pairs(s.amplitudes.iter().map(|c| [c.re, c.im]).collect())
    }
}

/// Distribution of the generator eigenvalue `n`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct NumberDistribution {
    probabilities: Vec<f64>,
}

impl NumberDistribution {
    pub fn new(probabilities: Vec<f64>) -> Result<Self> {
        if probabilities.is_empty() {
            return Err(Error::EmptyState);
        }
        if let Some(index) = probabilities
            .iter()
            .position(|p| !p.is_finite() || *p < 0.0)
        {
            return Err(Error::NonFinite { index });
        }
        let total: f64 = probabilities.iter().sum();
        if (total - 1.0).abs() > NORM_TOL {
            return Err(Error::NotNormalized { norm_sq: total });
        }
        Ok(Self { probabilities })
    }

    pub fn probabilities(&self) -> &[f64] {
        &self.probabilities
    }

    pub fn mean(&self) -> f64 {
        self.probabilities
            .iter()
            .enumerate()
            .map(|(n, p)| n as f64 * p)
            .sum()
    }

    /// `-Σ p ln p` with `0 ln 0 = 0`.
    pub fn entropy(&self) -> f64 {
        -self
            .probabilities
            .iter()
            .filter(|&&p| p > 0.0)
            .map(|&p| p * p.ln())
            .sum::<f64>()
    }
}

impl TryFrom<Vec<f64>> for NumberDistribution {
    type Error = Error;
    fn try_from(v: Vec<f64>) -> Result<Self> {
        Self::new(v)
    }
}

impl From<NumberDistribution> for Vec<f64> {
    fn from(d: NumberDistribution) -> Self {
        d.probabilities
    }
}

/// Entropy of the thermal (geometric) distribution with mean `nbar`, the
/// maximum over all number distributions with that mean.
pub fn thermal_entropy(nbar: f64) -> Result<f64> {
    if !(nbar >= 0.0) || !nbar.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "mean number must be finite and nonnegative, got {nbar}"
        )));
    }
    if nbar == 0.0 {
        return Ok(0.0);
    }
    Ok((nbar + 1.0).ln() + nbar * (1.0 / nbar).ln_1p())
}

/// Shift generator `N = Σ_k p_k (N_k)^q` over several modes.
///
/// Mode `k` has occupations `0..=cutoffs[k]`. The joint basis is ordered
/// row-major: the last mode varies fastest.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeneratorSpec {
    passes: Vec<u64>,
    exponent: u32,
    cutoffs: Vec<usize>,
}

impl GeneratorSpec {
    pub fn new(passes: Vec<u64>, exponent: u32, cutoffs: Vec<usize>) -> Result<Self> {
        if passes.is_empty() {
            return Err(Error::InvalidArgument("at least one mode is required".into()));
        }
        if passes.len() != cutoffs.len() {
            return Err(Error::DimensionMismatch {
                expected: passes.len(),
                found: cutoffs.len(),
            });
        }
        if passes.contains(&0) {
            return Err(Error::InvalidArgument("pass counts must be at least 1".into()));
        }
        if exponent == 0 {
            return Err(Error::InvalidArgument("exponent must be at least 1".into()));
        }
        let spec = Self {
            passes,
            exponent,
            cutoffs,
        };
        // Largest eigenvalue must fit; everything smaller then fits too.
        spec.eigenvalue(&spec.cutoffs.clone())?;
        Ok(spec)
    }

    /// Single mode, one pass, linear phase shift.
    pub fn single_mode(cutoff: usize) -> Self {
        Self::new(vec![1], 1, vec![cutoff]).expect("single-mode spec is valid")
    }

    pub fn mode_count(&self) -> usize {
        self.passes.len()
    }

    pub fn passes(&self) -> &[u64] {
        &self.passes
    }

    pub fn exponent(&self) -> u32 {
        self.exponent
    }

    pub fn cutoffs(&self) -> &[usize] {
        &self.cutoffs
    }

    /// Dimension of the joint occupation basis.
    pub fn joint_dim(&self) -> usize {
        self.cutoffs.iter().map(|c| c + 1).product()
    }

    /// `Σ_k p_k n_k^q` for the given occupations.
    pub fn eigenvalue(&self, occupations: &[usize]) -> Result<u64> {
        if occupations.len() != self.mode_count() {
            return Err(Error::DimensionMismatch {
                expected: self.mode_count(),
                found: occupations.len(),
            });
        }
        let overflow = || Error::OutOfRange("generator eigenvalue overflows u64".into());
        let mut total: u64 = 0;
        for (k, (&n, &p)) in occupations.iter().zip(&self.passes).enumerate() {
            if n > self.cutoffs[k] {
                return Err(Error::OutOfRange(format!(
                    "occupation {n} of mode {k} exceeds cutoff {}",
                    self.cutoffs[k]
                )));
            }
            let term = (n as u64)
                .checked_pow(self.exponent)
                .and_then(|v| v.checked_mul(p))
                .ok_or_else(overflow)?;
            total = total.checked_add(term).ok_or_else(overflow)?;
        }
        Ok(total)
    }

    /// Occupations of joint basis index `index`.
    pub fn occupations(&self, mut index: usize) -> Vec<usize> {
        let mut occ = vec![0; self.mode_count()];
        for k in (0..self.mode_count()).rev() {
            let base = self.cutoffs[k] + 1;
            occ[k] = index % base;
            index /= base;
        }
        occ
    }
}

/// Single-mode state with the same distribution of `N` as the multimode state.
///
/// Amplitudes of the result are the nonnegative square roots of the merged
/// probabilities; phases are discarded.
pub fn reduce_to_single_mode(
    spec: &GeneratorSpec,
    multimode_amplitudes: &[Complex64],
) -> Result<ProbeState> {
    let joint = spec.joint_dim();
    if multimode_amplitudes.len() != joint {
        return Err(Error::DimensionMismatch {
            expected: joint,
            found: multimode_amplitudes.len(),
        });
    }
    let norm_sq: f64 = multimode_amplitudes.iter().map(|c| c.norm_sqr()).sum();
    if !norm_sq.is_finite() || (norm_sq - 1.0).abs() > NORM_TOL {
        return Err(Error::NotNormalized { norm_sq });
    }
    let max_eig = spec.eigenvalue(spec.cutoffs())? as usize;
    let mut probs = vec![0.0; max_eig + 1];
    for (index, c) in multimode_amplitudes.iter().enumerate() {
        let m = spec.eigenvalue(&spec.occupations(index))? as usize;
        probs[m] += c.norm_sqr();
    }
    let amplitudes = probs
        .into_iter()
        .map(|p| Complex64::new(p.sqrt(), 0.0))
        .collect();
    ProbeState::new(amplitudes)
}
