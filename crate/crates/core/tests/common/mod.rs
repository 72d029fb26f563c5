//! Reference computations for the integration tests. None of these reuse the
//! library's numerical paths.
#![allow(dead_code)]

use std::f64::consts::{PI, TAU};

use nalgebra::DMatrix;
use num_complex::Complex64;
use phaselimit::ProbeState;
use rand::Rng;
use rand_distr::StandardNormal;

/// Full spectrum of a symmetric matrix by cyclic Jacobi rotations.
/// Returns eigenvalues ascending with matching eigenvector columns.
pub fn jacobi_eigen(a: &DMatrix<f64>) -> (Vec<f64>, DMatrix<f64>) {
    let n = a.nrows();
    let mut a = a.clone();
    let mut v = DMatrix::<f64>::identity(n, n);
    for _sweep in 0..100 {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| a[(i, j)] * a[(i, j)])
            .sum();
        let scale: f64 = a.iter().map(|x| x * x).sum();
        if off <= 1e-30 * scale.max(f64::MIN_POSITIVE) {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = a[(p, q)];
                if apq == 0.0 {
                    continue;
                }
                let theta = (a[(q, q)] - a[(p, p)]) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let akp = a[(k, p)];
                    let akq = a[(k, q)];
                    a[(k, p)] = c * akp - s * akq;
                    a[(k, q)] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[(p, k)];
                    let aqk = a[(q, k)];
                    a[(p, k)] = c * apk - s * aqk;
                    a[(q, k)] = s * apk + c * aqk;
                }
                for k in 0..n {
                    let vkp = v[(k, p)];
                    let vkq = v[(k, q)];
                    v[(k, p)] = c * vkp - s * vkq;
                    v[(k, q)] = s * vkp + c * vkq;
                }
            }
        }
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(i, i)].partial_cmp(&a[(j, j)]).unwrap());
    let values = order.iter().map(|&i| a[(i, i)]).collect();
    let vectors = DMatrix::from_fn(n, n, |r, c| v[(r, order[c])]);
    (values, vectors)
}

/// Canonical phase density evaluated straight from the amplitudes.
pub fn density_from_amplitudes(c: &[Complex64], theta: f64) -> f64 {
    let s: Complex64 = c
        .iter()
        .enumerate()
        .map(|(n, a)| a * Complex64::from_polar(1.0, n as f64 * theta))
        .sum();
    s.norm_sqr() / TAU
}

/// Composite Simpson rule for `f` on `[a, b]` with `intervals` (even) panels.
pub fn simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, intervals: usize) -> f64 {
    assert!(intervals.is_multiple_of(2));
    let h = (b - a) / intervals as f64;
    let mut total = f(a) + f(b);
    for i in 1..intervals {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        total += w * f(a + i as f64 * h);
    }
    total * h / 3.0
}

/// `∫_{-π}^{π} θ² p(θ) dθ` by quadrature of the directly evaluated density.
pub fn quadrature_msd(state: &ProbeState) -> f64 {
    let c = state.amplitudes();
    simpson(|t| t * t * density_from_amplitudes(c, t), -PI, PI, 1 << 14)
}

pub fn random_state<R: Rng>(rng: &mut R, dim: usize) -> ProbeState {
    ProbeState::random(dim, rng).unwrap()
}

/// Random state with real amplitudes whose magnitudes decay, giving
/// concentrated phase distributions.
pub fn random_decaying_state<R: Rng>(rng: &mut R, dim: usize) -> ProbeState {
    let width = 1.0 + rng.random::<f64>() * dim as f64;
    let center = rng.random::<f64>() * dim as f64;
    let amps: Vec<Complex64> = (0..dim)
        .map(|n| {
            let g: f64 = rng.sample(StandardNormal);
            let x = (n as f64 - center) / width;
            Complex64::new((-(x * x)).exp() * (1.0 + 0.1 * g), 0.0)
        })
        .collect();
    ProbeState::new(amps).unwrap()
}

use phaselimit::optimizer::DEFAULT_MEAN_TOL;
use phaselimit::povm::{CMatrix, EstimatePOM, Outcome};
use phaselimit::{optimize_at_mean, CostKind, DimPolicy};

pub struct Case {
    pub label: String,
    pub povm: EstimatePOM,
    pub state: ProbeState,
}

fn case(label: impl Into<String>, povm: EstimatePOM, state: ProbeState) -> Case {
    Case {
        label: label.into(),
        povm,
        state,
    }
}

/// `U M U†` for every element, with `U = exp(iεH)` for a random Hermitian `H`.
pub fn rotate_pom<R: Rng>(povm: &EstimatePOM, eps: f64, rng: &mut R) -> EstimatePOM {
    let d = povm.dim();
    let g = CMatrix::from_fn(d, d, |_, _| {
        Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
    });
    let h = (&g + g.adjoint()) * Complex64::new(0.5 * eps, 0.0);
    let eig = nalgebra::SymmetricEigen::new(h);
    let phases = CMatrix::from_diagonal(&eig.eigenvalues.map(|x| Complex64::from_polar(1.0, x)));
    let u = &eig.eigenvectors * phases * eig.eigenvectors.adjoint();
    let outcomes = povm
        .outcomes()
        .iter()
        .map(|o| Outcome {
            estimate: o.estimate,
            element: &u * &o.element * u.adjoint(),
        })
        .collect();
    EstimatePOM::new(outcomes).unwrap()
}

/// Optimal exact-cost probe at `mean`.
pub fn optimal_probe(mean: f64) -> ProbeState {
    optimize_at_mean(CostKind::ExactSquare, mean, &DimPolicy::auto(), DEFAULT_MEAN_TOL)
        .unwrap()
        .state
}

/// (measurement, probe) pairs: random, structured and adversarial.
pub fn pom_corpus() -> &'static [Case] {
    static CORPUS: std::sync::OnceLock<Vec<Case>> = std::sync::OnceLock::new();
    CORPUS.get_or_init(build_corpus)
}

fn build_corpus() -> Vec<Case> {
    use rand::SeedableRng;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(0x5eed);
    let mut cases = Vec::new();

    for (i, &(dim, outcomes, rank)) in [
        (2, 2, 1),
        (2, 5, 1),
        (3, 3, 2),
        (4, 8, 1),
        (5, 5, 3),
        (6, 12, 2),
        (8, 8, 1),
        (8, 20, 4),
        (12, 16, 2),
        (16, 24, 3),
    ]
    .iter()
    .enumerate()
    {
        let povm = EstimatePOM::random(dim, outcomes, rank, &mut rng).unwrap();
        for j in 0..2 {
            let state = if j == 0 {
                random_state(&mut rng, dim)
            } else {
                random_decaying_state(&mut rng, dim)
            };
            cases.push(case(format!("random pom {i} / state {j}"), povm.clone(), state));
        }
    }

    for dim in [1, 3, 6] {
        let estimates: Vec<f64> = (0..dim).map(|_| rng.random::<f64>() * TAU).collect();
        let povm = EstimatePOM::number_measurement(&estimates).unwrap();
        cases.push(case(format!("number measurement dim {dim}"), povm, random_state(&mut rng, dim)));
    }

    for k in [1, 2, 3, 4, 8, 16] {
        let demo = phaselimit::povm::kphase_construction(k).unwrap();
        cases.push(case(format!("K-phase {k}"), demo.povm, demo.state));
    }

    // Canonical measurements on optimal probes attain the optimizer minimum;
    // rotated and relabeled variants probe the neighbourhood.
    for mean in [0.5, 1.0, 2.0, 4.0, 8.0] {
        let state = optimal_probe(mean);
        let d = state.dim();
        let canonical = EstimatePOM::canonical(d, d, 0.0).unwrap();
        cases.push(case(format!("canonical on optimum {mean}"), canonical.clone(), state.clone()));
        let offset = EstimatePOM::canonical(d, d + 3, 0.37).unwrap();
        cases.push(case(format!("offset canonical on optimum {mean}"), offset, state.clone()));
        let biased = canonical.shifted_estimates(0.05);
        cases.push(case(format!("biased canonical on optimum {mean}"), biased, state.clone()));
        for eps in [1e-3, 1e-1] {
            let rotated = rotate_pom(&canonical, eps, &mut rng);
            cases.push(case(format!("rotated canonical {eps} on optimum {mean}"), rotated, state.clone()));
        }
    }

    // Projective measurements in random bases with phase-state-like labels.
    for dim in [3, 7] {
        let g = CMatrix::from_fn(dim, dim, |_, _| {
            Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
        });
        let q = g.qr().q();
        let estimates: Vec<f64> = (0..dim).map(|j| TAU * j as f64 / dim as f64).collect();
        let povm = EstimatePOM::projective(&q, &estimates).unwrap();
        cases.push(case(format!("random basis dim {dim}"), povm, random_state(&mut rng, dim)));
    }
    cases
}
