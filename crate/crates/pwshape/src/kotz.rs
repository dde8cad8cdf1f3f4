//! Elliptical density generators of Kotz type I.
//!
//! A generator for dimension parameter `M` is the function `h` in an
//! elliptical density `f(x) = h(x' Sigma^{-1} x)` on `R^M`; it must
//! satisfy the mass identity
//! `int_0^inf s^{M/2 - 1} h(s) ds = Gamma(M/2) / pi^{M/2}`.
//!
//! The Kotz type-I family used here is
//!
//! ```text
//! h(y) = R^{T-1+M/2} Gamma(M/2) / ( pi^{M/2} Gamma(T-1+M/2) ) * y^{T-1} e^{-R y},
//! ```
//!
//! which reduces to the Gaussian generator `(2 pi)^{-M/2} e^{-y/2}` at
//! `T = 1`, `R = 1/2`. Because `h` is a polynomial-times-exponential,
//! every derivative is available exactly through the Leibniz rule, and
//! for integer `T` the radial integrals
//! `int_0^inf r^e h^{(2t)}(A r + B) dr` reduce to finite gamma sums.

use crate::error::Error;
use crate::quad::integrate_semi_infinite;
use crate::slv::SignedLogValue;
use crate::special::ln_factorial;
use crate::Result;
use statrs::function::gamma::ln_gamma;

/// Interface the density evaluators need from a generator.
///
/// Implementations must be normalized for their own `m_half = M/2`, with
/// `M = (N-1) K` the dimension of the vectorized Helmertized
/// configuration.
pub trait RadialGenerator: Send + Sync {
    /// Dimension parameter `M/2` the generator is normalized for.
    fn m_half(&self) -> f64;

    /// `h^{(k)}(y)` as a signed log-space value, `y >= 0`.
    fn h_deriv_slv(&self, k: u32, y: f64) -> Result<SignedLogValue>;

    /// Plain `h(y)`.
    fn h(&self, y: f64) -> Result<f64> {
        Ok(self.h_deriv_slv(0, y)?.to_f64())
    }

    /// Closed form for `int_0^inf r^e h^{(2t)}(A r + B) dr`, if the
    /// family admits one; `None` routes the caller to quadrature.
    fn radial_integral_closed(
        &self,
        _e: f64,
        _two_t: u32,
        _a_coef: f64,
        _b_coef: f64,
    ) -> Option<Result<SignedLogValue>> {
        None
    }
}

/// Kotz type-I generator.
#[derive(Debug, Clone, Copy)]
pub struct KotzGenerator {
    t_param: f64,
    r_param: f64,
    m_half: f64,
    /// ln of the normalizing constant.
    ln_c: f64,
}

impl KotzGenerator {
    /// Build a generator with shape `T`, rate `R`, for dimension `M`
    /// (`m_half = M/2`). Requires `R > 0` and `T - 1 + M/2 > 0`.
    pub fn new(t_param: f64, r_param: f64, m_half: f64) -> Result<Self> {
        if r_param.is_nan() || r_param <= 0.0 {
            return Err(Error::OutOfRange(format!("Kotz R must be > 0, got {r_param}")));
        }
        if m_half.is_nan() || m_half <= 0.0 {
            return Err(Error::OutOfRange(format!("M/2 must be > 0, got {m_half}")));
        }
        let gamma_arg = t_param - 1.0 + m_half;
        if gamma_arg.is_nan() || gamma_arg <= 0.0 {
            return Err(Error::OutOfRange(format!(
                "Kotz needs T - 1 + M/2 > 0, got T = {t_param}, M/2 = {m_half}"
            )));
        }
        let ln_c = (t_param - 1.0 + m_half) * r_param.ln() + ln_gamma(m_half)
            - m_half * std::f64::consts::PI.ln()
            - ln_gamma(t_param - 1.0 + m_half);
        Ok(Self {
            t_param,
            r_param,
            m_half,
            ln_c,
        })
    }

    /// The Gaussian member `T = 1`, `R = 1/2`.
    pub fn gaussian(m_half: f64) -> Result<Self> {
        Self::new(1.0, 0.5, m_half)
    }

    /// Shape parameter `T`.
    pub fn t_param(&self) -> f64 {
        self.t_param
    }

    /// Rate parameter `R`.
    pub fn r_param(&self) -> f64 {
        self.r_param
    }

    /// True when `T` is a positive integer, so radial integrals have a
    /// finite closed form.
    pub fn has_closed_radial(&self) -> bool {
        self.t_param >= 1.0 && self.t_param.fract() == 0.0
    }

    /// Falling product `pi_v = (T-1)(T-2)...(T-v)`, `pi_0 = 1`.
    fn falling(&self, v: u32) -> f64 {
        let mut p = 1.0;
        for i in 0..v {
            p *= self.t_param - 1.0 - i as f64;
        }
        p
    }
}

impl RadialGenerator for KotzGenerator {
    fn m_half(&self) -> f64 {
        self.m_half
    }

    /// Exact `k`-th derivative via the Leibniz rule:
    ///
    /// ```text
    /// h^{(k)}(y) = C e^{-Ry} sum_{v=0}^{k} binom(k,v) pi_v (-R)^{k-v} y^{T-1-v}.
    /// ```
    ///
    /// For integer `T` the sum truncates at `v = T-1`; for noninteger
    /// `T`, `y = 0` is a singularity of the derivatives and is rejected.
    fn h_deriv_slv(&self, k: u32, y: f64) -> Result<SignedLogValue> {
        if y < 0.0 {
            return Err(Error::OutOfRange(format!("generator argument y = {y} < 0")));
        }
        let ln_r = self.r_param.ln();
        let mut acc = SignedLogValue::ZERO;
        let mut pi_v = 1.0; // falling product, updated per iteration
        for v in 0..=k {
            if pi_v != 0.0 {
                let expo = self.t_param - 1.0 - v as f64;
                let y_pow = if y == 0.0 {
                    if expo == 0.0 {
                        SignedLogValue::ONE
                    } else if expo > 0.0 {
                        SignedLogValue::ZERO
                    } else {
                        return Err(Error::OutOfRange(format!(
                            "h^({k})(0) diverges for noninteger T = {}",
                            self.t_param
                        )));
                    }
                } else {
                    SignedLogValue::exp_of(expo * y.ln())
                };
                let ln_binom = ln_factorial(k) - ln_factorial(v) - ln_factorial(k - v);
                let sign_r = if (k - v).is_multiple_of(2) { 1 } else { -1 };
                let coef = SignedLogValue::from_parts(sign_r, ln_binom + (k - v) as f64 * ln_r)
                    * SignedLogValue::from_f64(pi_v);
                acc += coef * y_pow;
            }
            pi_v *= self.t_param - 1.0 - v as f64;
        }
        Ok(acc * SignedLogValue::exp_of(self.ln_c - self.r_param * y))
    }

    /// For integer `T`: expanding `(A r + B)^{T-1-v}` binomially and
    /// integrating term by term,
    ///
    /// ```text
    /// int_0^inf r^e h^{(2t)}(Ar+B) dr
    ///   = C e^{-RB} A^{-(e+1)}
    ///     sum_{v=0}^{min(2t,T-1)} binom(2t,v) pi_v (-1)^v R^{2t-v}
    ///     sum_{u=0}^{T-1-v} binom(T-1-v,u) B^{T-1-v-u} Gamma(e+u+1) R^{-(e+u+1)}.
    /// ```
    fn radial_integral_closed(
        &self,
        e: f64,
        two_t: u32,
        a_coef: f64,
        b_coef: f64,
    ) -> Option<Result<SignedLogValue>> {
        if !self.has_closed_radial() {
            return None;
        }
        if e <= -1.0 {
            return Some(Err(Error::DivergentIntegral { exponent: e }));
        }
        if a_coef.is_nan() || a_coef <= 0.0 || b_coef < 0.0 {
            return Some(Err(Error::OutOfRange(format!(
                "radial integral needs A > 0, B >= 0; got A = {a_coef}, B = {b_coef}"
            ))));
        }
        let t_int = self.t_param as u32; // exact: has_closed_radial checked
        let ln_r = self.r_param.ln();
        let v_cap = two_t.min(t_int - 1);
        let mut sum = SignedLogValue::ZERO;
        for v in 0..=v_cap {
            let pi_v = self.falling(v);
            if pi_v == 0.0 {
                continue;
            }
            let ln_binom_v = ln_factorial(two_t) - ln_factorial(v) - ln_factorial(two_t - v);
            let sign_v = if v % 2 == 0 { 1 } else { -1 };
            let outer = SignedLogValue::from_parts(sign_v, ln_binom_v + (two_t - v) as f64 * ln_r)
                * SignedLogValue::from_f64(pi_v);
            let p = t_int - 1 - v; // exponent of (Ar + B)
            let mut inner = SignedLogValue::ZERO;
            for u in 0..=p {
                let b_pow = if p - u == 0 {
                    SignedLogValue::ONE
                } else if b_coef == 0.0 {
                    continue;
                } else {
                    SignedLogValue::exp_of((p - u) as f64 * b_coef.ln())
                };
                let ln_binom_u = ln_factorial(p) - ln_factorial(u) - ln_factorial(p - u);
                inner += b_pow
                    * SignedLogValue::exp_of(
                        ln_binom_u + ln_gamma(e + u as f64 + 1.0)
                            - (e + u as f64 + 1.0) * ln_r,
                    );
            }
            sum += outer * inner;
        }
        let prefactor =
            SignedLogValue::exp_of(self.ln_c - self.r_param * b_coef - (e + 1.0) * a_coef.ln());
        Some(Ok(prefactor * sum))
    }
}

/// Derivatives of the Gaussian generator, written independently of the
/// Kotz machinery as a cross-check: `h^{(k)}(y) = (-1/2)^k (2 pi)^{-M/2}
/// e^{-y/2}`.
pub fn gaussian_h_deriv(m_half: f64, k: u32, y: f64) -> f64 {
    let ln_mag = -m_half * (2.0 * std::f64::consts::PI).ln() - y / 2.0
        - k as f64 * std::f64::consts::LN_2;
    let sign = if k.is_multiple_of(2) { 1.0 } else { -1.0 };
    sign * ln_mag.exp()
}

/// Numerical check of the generator mass identity: returns
/// `int_0^inf s^{M/2-1} h(s) ds / ( Gamma(M/2) / pi^{M/2} )`,
/// which must be 1 for a correctly normalized generator.
pub fn generator_mass_check(gen: &dyn RadialGenerator, rel_tol: f64) -> Result<f64> {
    let m_half = gen.m_half();
    let q = integrate_semi_infinite(
        |s| {
            gen.h_deriv_slv(0, s)
                .map(|h| h * SignedLogValue::exp_of((m_half - 1.0) * s.ln()))
                .unwrap_or(SignedLogValue::ZERO)
        },
        rel_tol,
    )?;
    let ln_ref = ln_gamma(m_half) - m_half * std::f64::consts::PI.ln();
    Ok((q.value * SignedLogValue::exp_of(-ln_ref)).to_f64())
}
