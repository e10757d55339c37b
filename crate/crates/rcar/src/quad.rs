//! Tanh-sinh (double-exponential) quadrature on a finite interval.
//!
//! Used for the moment integrals against coefficient laws. The
//! substitution `x = mid + half * tanh((pi/2) sinh t)` pushes the
//! endpoints to infinity at double-exponential speed, so integrable
//! algebraic singularities at either endpoint (the relevant case here:
//! `(1-x)^(beta-2)` with `beta > 1`) are handled without special-casing.
//!
//! Floating-point `x` near an endpoint carries catastrophic cancellation,
//! so the integrand receives the distances to both endpoints, computed
//! stably from the transform itself; singular factors must be evaluated
//! from those distances.

use crate::error::{Error, Result};
use std::f64::consts::FRAC_PI_2;

/// Truncation point of the transformed axis; node weights underflow f64
/// shortly beyond it.
const T_MAX: f64 = 4.0;
/// Finest level: step `2^-MAX_LEVEL` on the transformed axis.
const MAX_LEVEL: u32 = 12;

/// Integrates `f` over `(a, b)` to the requested relative tolerance.
///
/// `f(x, x - a, b - x)` is never evaluated at the endpoints themselves;
/// the two distance arguments stay exact down to the underflow threshold.
/// Returns [`Error::Convergence`] if successive refinements fail to
/// settle, which for the integrands used here signals a non-integrable
/// endpoint.
pub(crate) fn tanh_sinh<F: Fn(f64, f64, f64) -> f64>(
    f: F,
    a: f64,
    b: f64,
    rel_tol: f64,
) -> Result<f64> {
    debug_assert!(a < b);
    let half = 0.5 * (b - a);

    // Contribution of the pair of nodes at +t and -t (one node for t = 0).
    let node_pair = |t: f64| -> f64 {
        let u = FRAC_PI_2 * t.sinh();
        // 1 -+ tanh(u) without cancellation: 2e^(-2u)/(1+e^(-2u)) and
        // 2/(1+e^(-2u)).
        let e = (-2.0 * u).exp();
        let near = half * 2.0 * e / (1.0 + e); // distance to the closer endpoint
        let far = half * 2.0 / (1.0 + e); // distance to the farther endpoint
        let ch = u.cosh();
        let w = half * FRAC_PI_2 * t.cosh() / (ch * ch);
        if near <= 0.0 || w < 1e-290 {
            return 0.0;
        }
        if t == 0.0 {
            return f(a + near, near, far) * w;
        }
        // +t: x approaches b; -t: x approaches a.
        f(b - near, far, near) * w + f(a + near, near, far) * w
    };

    // Level 0: step 1 over [-T_MAX, T_MAX].
    let mut h = 1.0f64;
    let mut sum = node_pair(0.0);
    let mut k = 1.0;
    while k <= T_MAX {
        sum += node_pair(k);
        k += 1.0;
    }
    let mut prev = sum * h;

    for _ in 1..=MAX_LEVEL {
        h *= 0.5;
        // Add the new midpoints (odd multiples of the refined step).
        let mut add = 0.0;
        let mut t = h;
        while t <= T_MAX {
            add += node_pair(t);
            t += 2.0 * h;
        }
        let cur = 0.5 * prev + add * h;
        let scale = cur.abs().max(1e-300);
        if (cur - prev).abs() <= rel_tol * scale && cur.is_finite() {
            return Ok(cur);
        }
        prev = cur;
    }
    Err(Error::Convergence {
        routine: "tanh-sinh quadrature",
        iterations: 1 << MAX_LEVEL,
    })
}
