//! Adaptive quadrature on the positive half-line, in log space.
//!
//! Radial integrands here look like `r^e * h^{(k)}(A r + B)`: a gamma-type
//! kernel whose magnitude can overflow `f64` and whose sign can flip a
//! finite number of times. The integrator
//!
//! 1. probes `ln|f|` on a geometric grid to find the dominant scale and
//!    a global log-magnitude `C`,
//! 2. maps `(0, inf)` to `(0, 1)` by `r = s0 z / (1 - z)` centered on
//!    the peak, and
//! 3. runs adaptive Simpson on `sign(f) * exp(ln|f| - C)`, restoring
//!    `C` at the end.

use crate::error::Error;
use crate::slv::SignedLogValue;
use crate::Result;

/// Outcome of an adaptive integration.
#[derive(Debug, Clone, Copy)]
pub struct QuadResult {
    /// The integral as a signed log-space value.
    pub value: SignedLogValue,
    /// Estimated relative error (from the final Simpson refinements).
    pub rel_error: f64,
    /// Number of integrand evaluations.
    pub evaluations: usize,
}

/// Integrate `f` over `(0, inf)` to the requested relative tolerance.
///
/// `f` returns a [`SignedLogValue`] so the integrand may overflow plain
/// `f64`. Fails with [`Error::Nonconvergence`] if the refinement budget
/// is exhausted before the tolerance is met.
pub fn integrate_semi_infinite(
    f: impl Fn(f64) -> SignedLogValue,
    rel_tol: f64,
) -> Result<QuadResult> {
    // --- probe for scale and magnitude ---
    let mut peak_r = 1.0;
    let mut peak_ln = f64::NEG_INFINITY;
    let mut evals = 0usize;
    for i in -60..=60 {
        let r = 10f64.powf(i as f64 / 5.0); // 1e-12 .. 1e12
        let v = f(r);
        evals += 1;
        // weight by r: on a log grid each node represents a slab of
        // width proportional to r.
        let score = v.ln_abs() + r.ln();
        if score > peak_ln {
            peak_ln = score;
            peak_r = r;
        }
    }
    if peak_ln == f64::NEG_INFINITY {
        // integrand identically ~0 on the probe: treat as zero
        return Ok(QuadResult {
            value: SignedLogValue::ZERO,
            rel_error: 0.0,
            evaluations: evals,
        });
    }
    let s0 = peak_r;

    // --- transformed integrand on (0, 1) ---
    // r = s0 z/(1-z), dr = s0/(1-z)^2 dz
    let g_ln = |z: f64| -> SignedLogValue {
        if z <= 0.0 || z >= 1.0 {
            return SignedLogValue::ZERO;
        }
        let r = s0 * z / (1.0 - z);
        f(r) * SignedLogValue::exp_of(s0.ln() - 2.0 * (1.0 - z).ln())
    };

    // global scale from a uniform scan
    let mut c = f64::NEG_INFINITY;
    const SCAN: usize = 129;
    for i in 1..SCAN {
        let z = i as f64 / SCAN as f64;
        c = c.max(g_ln(z).ln_abs());
    }
    evals += SCAN - 1;
    if c == f64::NEG_INFINITY {
        return Ok(QuadResult {
            value: SignedLogValue::ZERO,
            rel_error: 0.0,
            evaluations: evals,
        });
    }

    let g = |z: f64, evals: &mut usize| -> f64 {
        *evals += 1;
        let v = g_ln(z);
        if v.is_zero() {
            0.0
        } else {
            v.sign() as f64 * (v.ln_abs() - c).exp()
        }
    };

    // --- adaptive Simpson on (0,1) ---
    struct Seg {
        a: f64,
        b: f64,
        fa: f64,
        fm: f64,
        fb: f64,
        whole: f64,
        depth: u32,
    }
    let simpson = |fa: f64, fm: f64, fb: f64, h: f64| (fa + 4.0 * fm + fb) * h / 6.0;

    const MAX_EVALS: usize = 200_000;
    const MAX_DEPTH: u32 = 50;
    // Start from a moderately fine uniform split so far-apart features
    // are all seen.
    const INIT: usize = 16;
    let mut stack: Vec<Seg> = Vec::new();
    let mut nodes: Vec<f64> = (0..=2 * INIT).map(|i| i as f64 / (2 * INIT) as f64).collect();
    let vals: Vec<f64> = nodes.iter().map(|&z| g(z, &mut evals)).collect();
    let mut coarse_total = 0.0;
    for i in 0..INIT {
        let (a, b) = (nodes[2 * i], nodes[2 * i + 2]);
        let whole = simpson(vals[2 * i], vals[2 * i + 1], vals[2 * i + 2], b - a);
        coarse_total += whole;
        stack.push(Seg {
            a,
            b,
            fa: vals[2 * i],
            fm: vals[2 * i + 1],
            fb: vals[2 * i + 2],
            whole,
            depth: 0,
        });
    }
    nodes.clear();

    let scale_ref = coarse_total.abs().max(1e-300);
    let mut total = 0.0;
    let mut err_acc = 0.0;
    while let Some(seg) = stack.pop() {
        if evals > MAX_EVALS {
            return Err(Error::Nonconvergence(
                "adaptive quadrature exhausted its evaluation budget".into(),
            ));
        }
        let m1 = 0.5 * (seg.a + (seg.a + seg.b) * 0.5);
        let m2 = 0.5 * ((seg.a + seg.b) * 0.5 + seg.b);
        let mid = 0.5 * (seg.a + seg.b);
        let f1 = g(m1, &mut evals);
        let f2 = g(m2, &mut evals);
        let left = simpson(seg.fa, f1, seg.fm, mid - seg.a);
        let right = simpson(seg.fm, f2, seg.fb, seg.b - mid);
        let delta = left + right - seg.whole;
        if seg.depth >= MAX_DEPTH || delta.abs() <= 15.0 * rel_tol * scale_ref * (seg.b - seg.a) {
            total += left + right + delta / 15.0;
            err_acc += delta.abs() / 15.0;
        } else {
            stack.push(Seg {
                a: seg.a,
                b: mid,
                fa: seg.fa,
                fm: f1,
                fb: seg.fm,
                whole: left,
                depth: seg.depth + 1,
            });
            stack.push(Seg {
                a: mid,
                b: seg.b,
                fa: seg.fm,
                fm: f2,
                fb: seg.fb,
                whole: right,
                depth: seg.depth + 1,
            });
        }
    }

    let rel_error = if total.abs() > 0.0 {
        err_acc / total.abs()
    } else {
        err_acc
    };
    Ok(QuadResult {
        value: SignedLogValue::from_f64(total) * SignedLogValue::exp_of(c),
        rel_error,
        evaluations: evals,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use statrs::function::gamma::ln_gamma;

    const REL_TOL: f64 = 1e-10;

    #[test]
    fn gamma_integral() {
        // int r^4 e^{-3r} dr = Gamma(5)/3^5
        let f = |r: f64| SignedLogValue::exp_of(4.0 * r.ln() - 3.0 * r);
        let q = integrate_semi_infinite(f, REL_TOL).unwrap();
        assert_relative_eq!(q.value.to_f64(), 24.0 / 243.0, max_relative = 1e-9);
    }

    #[test]
    fn huge_magnitude_stays_in_log_space() {
        // int r^{200} e^{-r} dr = Gamma(201), ~ 10^374
        let f = |r: f64| SignedLogValue::exp_of(200.0 * r.ln() - r);
        let q = integrate_semi_infinite(f, REL_TOL).unwrap();
        assert_eq!(q.value.sign(), 1);
        assert_relative_eq!(q.value.ln().unwrap(), ln_gamma(201.0), max_relative = 1e-10);
    }

    #[test]
    fn signed_integrand() {
        // int (r - 2) r^2 e^{-r} dr = Gamma(4) - 2 Gamma(3) = 2
        let f = |r: f64| {
            SignedLogValue::from_f64(r - 2.0) * SignedLogValue::exp_of(2.0 * r.ln() - r)
        };
        let q = integrate_semi_infinite(f, REL_TOL).unwrap();
        assert_relative_eq!(q.value.to_f64(), 2.0, max_relative = 1e-8);
    }

    #[test]
    fn zero_integrand() {
        let q = integrate_semi_infinite(|_| SignedLogValue::ZERO, REL_TOL).unwrap();
        assert!(q.value.is_zero());
    }
}
