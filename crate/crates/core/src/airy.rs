//! Airy function of the first kind on a bounded real interval.
//!
//! Uses the Maclaurin expansion `Ai(z) = Ai(0) f(z) + Ai'(0) g(z)` with
//!
//! ```text
//! f(z) = Σ_k 3^k (1/3)_k z^{3k}   / (3k)!
//! g(z) = Σ_k 3^k (2/3)_k z^{3k+1} / (3k+1)!
//! ```
//!
//! which converges everywhere but loses accuracy to cancellation for large
//! `|z|`. It is only used for `|z| ≲ 4` here.

use crate::error::{Error, Result};

/// `Ai(0) = 3^{-2/3} / Γ(2/3)`.
pub const AI_ZERO: f64 = 0.355_028_053_887_817_2;
/// `Ai'(0) = -3^{-1/3} / Γ(1/3)`.
pub const AI_PRIME_ZERO: f64 = -0.258_819_403_792_806_8;

const TERM_FLOOR: f64 = 1e-18;
const MAX_TERMS: usize = 200;

/// `(Ai(z), Ai'(z))`.
pub fn airy_ai_with_derivative(z: f64) -> (f64, f64) {
    let z3 = z * z * z;
    // f, f', g, g' summed together; each term follows from the previous one.
    let (mut f, mut df) = (1.0, 0.0);
    let (mut g, mut dg) = (z, 1.0);
    let mut tf = 1.0; // z^{3k} coefficient term of f
    let mut tg = z; // z^{3k+1} coefficient term of g
    for k in 0..MAX_TERMS {
        let kf = k as f64;
        tf *= z3 / ((3.0 * kf + 2.0) * (3.0 * kf + 3.0));
        tg *= z3 / ((3.0 * kf + 3.0) * (3.0 * kf + 4.0));
        f += tf;
        g += tg;
        // d/dz z^m = m z^{m-1}, so the derivative terms are m·t/z.
        let mf = 3.0 * (kf + 1.0);
        let mg = 3.0 * (kf + 1.0) + 1.0;
        if z != 0.0 {
            df += mf * tf / z;
            dg += mg * tg / z;
        }
        if tf.abs().max(tg.abs()) * (1.0 + mg) < TERM_FLOOR {
            break;
        }
    }
    (
        AI_ZERO * f + AI_PRIME_ZERO * g,
        AI_ZERO * df + AI_PRIME_ZERO * dg,
    )
}

pub fn airy_ai(z: f64) -> f64 {
    airy_ai_with_derivative(z).0
}

/// Root of `Ai` inside `[lo, hi]`: bisection to a narrow bracket, then Newton.
pub fn airy_root_in(lo: f64, hi: f64) -> Result<f64> {
    let (mut a, mut b) = (lo, hi);
    let (mut fa, fb) = (airy_ai(a), airy_ai(b));
    if fa * fb > 0.0 {
        return Err(Error::NonConvergence {
            what: "airy root",
            detail: format!("no sign change on [{lo}, {hi}]"),
        });
    }
    while b - a > 1e-6 {
        let mid = 0.5 * (a + b);
        let fm = airy_ai(mid);
        if fa * fm <= 0.0 {
            b = mid;
        } else {
            a = mid;
            fa = fm;
        }
    }
    let mut z = 0.5 * (a + b);
    for _ in 0..50 {
        let (v, dv) = airy_ai_with_derivative(z);
        let step = v / dv;
        z -= step;
        if step.abs() < 1e-16 * z.abs() {
            break;
        }
    }
    if !(lo..=hi).contains(&z) || airy_ai(z).abs() >= 1e-13 {
        return Err(Error::NonConvergence {
            what: "airy root",
            detail: format!("Newton polish left z = {z}, Ai = {:e}", airy_ai(z)),
        });
    }
    Ok(z)
}
