//! Shape and size-and-shape log-densities for elliptical landmark
//! models.
//!
//! A Helmertized configuration `Y` (`q x K`, `q = N - 1`) follows a
//! matrix elliptical law with mean `mu`, row covariance `Sigma`, column
//! covariance `Theta`, and generator `h`. The induced density of the
//! size-and-shape matrix `V = Y Y'` is the zonal series
//!
//! ```text
//! f(V) = pi^{nK/2} |V*|^{(K-N)/2} / ( Gamma_n(K/2) |Sigma|^{K/2} )
//!        * sum_t sum_{kappa |- t}
//!            h^{(2t)}( tr Sigma^{-1}V + tr Omega )
//!            C_kappa( Omega Sigma^{-1} V ) / ( t! (K/2)_kappa ),
//! ```
//!
//! with noncentrality `Omega = Sigma^{-1} mu Theta^{-1} mu'` and
//! `n = min(q, K)`. Integrating out the radius in polar coordinates
//! gives the shape density over the `m` angles `u`: the generator
//! derivative is replaced by the radial integral
//!
//! ```text
//! I_t = int_0^inf r^{e(t)} h^{(2t)}( r A + B ) dr,
//!     A = tr Sigma^{-1} W,  B = tr Omega,
//! ```
//!
//! where two conventions circulate for the exponent
//! ([`RadialConvention`]). For Kotz generators with integer shape
//! parameter the integral reduces to finite gamma sums; otherwise it is
//! computed by adaptive quadrature.
//!
//! # Chart normalization
//!
//! The polar angles describe the unit vector of the `m + 1` independent
//! elements of `V`, i.e. the matrix `V / rho` with
//! `rho = ||vecw(V)||_2` — not `V / r` with the Frobenius radius
//! `r = ||V||_F` (off-diagonal elements are counted twice by the
//! Frobenius norm). All shape densities here therefore evaluate their
//! matrix-dependent factors at the chart matrix `V / rho`; Monte-Carlo
//! integration over the angle chart confirms that this normalization
//! (and only this one) integrates to unity under the `Derived`
//! exponent (see [`crate::oracle::mc_normalization`]).

use crate::error::Error;
use crate::geometry::{angle_count, sqrt_pd, v_star_logdet, w_star_logdet, PseudoWishartShape, VStarMode};
use crate::kotz::{KotzGenerator, RadialGenerator};
use crate::quad::integrate_semi_infinite;
use crate::series::{SeriesEngine, SeriesSpec};
use crate::slv::SignedLogValue;
use crate::special::mv_gamma_ln;
use crate::zonal::ZonalBasis;
use crate::Result;
use nalgebra::{Cholesky, DMatrix, SymmetricEigen};
use statrs::function::gamma::ln_gamma;
use std::f64::consts::PI;
use std::sync::Arc;

/// Relative tolerance of the adaptive quadrature used for generic
/// radial weights.
pub const RADIAL_QUAD_TOL: f64 = 1e-9;

/// Convention for the radial exponent `e(t)` in the shape-marginal
/// integral `I_t = ∫ r^{e(t)} h^{(2t)}(rA + B) dr`.
///
/// Two variants circulate for the same density:
/// `e(t) = m - n(K-N)/2 + t` (`Printed`) and
/// `e(t) = m + n(K-N)/2 + t` (`Derived`). They coincide when `q = K`.
/// Only `Derived` makes the central density integrate to one over the
/// angle chart and renders it generator-free (the radial integral then
/// collapses onto the generator mass identity, since
/// `m + n(K-N)/2 = M/2 - 1` with `M = qK`); `Printed` is the default
/// for compatibility with existing tabulated analyses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum RadialConvention {
    /// `e(t) = m - n(K-N)/2 + t`.
    #[default]
    Printed,
    /// `e(t) = m + n(K-N)/2 + t` (normalizing variant).
    Derived,
}

/// Row covariance of the Helmertized configuration.
#[derive(Debug, Clone)]
pub enum CovSpec {
    /// `Sigma = sigma2 * I_q`; evaluated through dedicated scalar
    /// formulas.
    Isotropic(f64),
    /// Full symmetric positive definite `q x q` matrix.
    General(DMatrix<f64>),
}

/// Elliptical generator family of a model.
#[derive(Clone)]
pub enum GeneratorFamily {
    /// Gaussian generator (Kotz `T = 1`, `R = 1/2`).
    Gaussian,
    /// Kotz type-I generator with shape `t` and rate `r`.
    Kotz {
        /// Shape parameter `T`.
        t: f64,
        /// Rate parameter `R`.
        r: f64,
    },
    /// Caller-supplied generator; radial weights fall back to
    /// quadrature unless the implementation provides a closed form.
    Custom(Arc<dyn RadialGenerator>),
}

impl std::fmt::Debug for GeneratorFamily {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Self::Gaussian => write!(f, "Gaussian"),
            Self::Kotz { t, r } => f.debug_struct("Kotz").field("t", t).field("r", r).finish(),
            Self::Custom(g) => write!(f, "Custom(m_half = {})", g.m_half()),
        }
    }
}

/// Full specification of an elliptical shape model. Only primary data
/// is stored; every derived quantity (`Omega`, `tr Omega`,
/// `Sigma^{-1}`, exponents) is recomputed by [`DensityContext`].
#[derive(Debug, Clone)]
pub struct ModelSpec {
    /// Generator family.
    pub generator: GeneratorFamily,
    /// Mean of the Helmertized configuration, `q x K`.
    pub mu: DMatrix<f64>,
    /// Row covariance.
    pub cov: CovSpec,
    /// Column covariance; `None` means the identity.
    pub theta: Option<DMatrix<f64>>,
    /// Hard truncation degree of the zonal series.
    pub truncation: u32,
    /// Relative stopping tolerance of the series.
    pub tol: f64,
    /// Radial exponent convention.
    pub convention: RadialConvention,
    /// Which `n x n` reduction the `|V*|` factor uses.
    pub vstar: VStarMode,
    /// Force radial weights through adaptive quadrature even when a
    /// closed form exists (cross-validation path).
    pub radial_by_quadrature: bool,
}

impl ModelSpec {
    /// Default truncation degree.
    pub const DEFAULT_TRUNCATION: u32 = 120;

    /// Model with the default truncation (120), tolerance, identity
    /// `Theta`, printed exponent convention, and Cholesky `V*`.
    pub fn new(generator: GeneratorFamily, mu: DMatrix<f64>, cov: CovSpec) -> Self {
        Self {
            generator,
            mu,
            cov,
            theta: None,
            truncation: Self::DEFAULT_TRUNCATION,
            tol: SeriesSpec::DEFAULT_TOL,
            convention: RadialConvention::default(),
            vstar: VStarMode::default(),
            radial_by_quadrature: false,
        }
    }

    /// Replace the mean configuration.
    pub fn with_mu(mut self, mu: DMatrix<f64>) -> Self {
        self.mu = mu;
        self
    }

    /// Replace the column covariance.
    pub fn with_theta(mut self, theta: DMatrix<f64>) -> Self {
        self.theta = Some(theta);
        self
    }

    /// Replace the truncation degree.
    pub fn with_truncation(mut self, truncation: u32) -> Self {
        self.truncation = truncation;
        self
    }

    /// Replace the exponent convention.
    pub fn with_convention(mut self, convention: RadialConvention) -> Self {
        self.convention = convention;
        self
    }

    /// Replace the `V*` reduction mode.
    pub fn with_vstar(mut self, vstar: VStarMode) -> Self {
        self.vstar = vstar;
        self
    }

    /// Replace the series stopping tolerance.
    pub fn with_tolerance(mut self, tol: f64) -> Self {
        self.tol = tol;
        self
    }

    /// Route radial weights through quadrature.
    pub fn with_radial_quadrature(mut self, on: bool) -> Self {
        self.radial_by_quadrature = on;
        self
    }
}

/// A log-density value together with series diagnostics.
#[derive(Debug, Clone, Copy)]
pub struct LogDensity {
    /// Natural logarithm of the density.
    pub log_density: f64,
    /// Highest series degree actually accumulated.
    pub degrees_used: u32,
    /// Whether the series stopping rule fired before the truncation.
    pub converged: bool,
}

enum CovInternal {
    Isotropic { inv_s2: f64 },
    General { sigma_inv: DMatrix<f64> },
}

/// Prepared evaluator for one [`ModelSpec`]: caches the covariance
/// factorization, the noncentrality reduction, the generator, and the
/// zonal series engine. Construction through [`DensityContext::new`]
/// builds a fresh basis; [`DensityContext::with_engine`] reuses an
/// existing one (the basis depends only on `min(q, K)` and the
/// truncation, not on `mu`), which keeps refitting cheap.
pub struct DensityContext {
    model: ModelSpec,
    q: usize,
    k: usize,
    n: usize,
    m: usize,
    m_half: f64,
    cov: CovInternal,
    ln_det_sigma: f64,
    /// `Sigma^{-1} mu Theta^{-1/2}` — the `q x K` reduction whose Gram
    /// matrices carry the noncentral spectrum.
    p_mat: DMatrix<f64>,
    /// `tr Omega`.
    b_noncentral: f64,
    generator: Arc<dyn RadialGenerator>,
    engine: Arc<SeriesEngine>,
    /// `ln Gamma_n(K/2)`.
    ln_mv_gamma: f64,
}

impl DensityContext {
    /// Build a context with a fresh zonal basis sized by the model.
    pub fn new(model: ModelSpec) -> Result<Self> {
        let q = model.mu.nrows();
        let k = model.mu.ncols();
        if q == 0 || k == 0 {
            return Err(Error::Dimension("mean matrix must be nonempty".into()));
        }
        let n = q.min(k);
        let basis = Arc::new(ZonalBasis::build(n, model.truncation));
        let engine = Arc::new(SeriesEngine::new(basis, Some(k as f64 / 2.0)));
        Self::with_engine(model, engine)
    }

    /// Build a context sharing `engine`. The engine must have been
    /// built for the same `min(q, K)`, denominator `K/2`, and a degree
    /// at least the model truncation.
    pub fn with_engine(model: ModelSpec, engine: Arc<SeriesEngine>) -> Result<Self> {
        let q = model.mu.nrows();
        let k = model.mu.ncols();
        if q == 0 || k == 0 {
            return Err(Error::Dimension("mean matrix must be nonempty".into()));
        }
        let n = q.min(k);
        let m = angle_count(q, k);
        let m_half = (q * k) as f64 / 2.0;
        if model.tol.is_nan() || model.tol <= 0.0 {
            return Err(Error::OutOfRange(format!(
                "series tolerance must be positive, got {}",
                model.tol
            )));
        }
        if engine.basis().max_len() != n {
            return Err(Error::Dimension(format!(
                "series engine built for partition length {}, model needs {}",
                engine.basis().max_len(),
                n
            )));
        }
        if engine.basis().max_degree() < model.truncation {
            return Err(Error::OutOfRange(format!(
                "series engine degree {} below model truncation {}",
                engine.basis().max_degree(),
                model.truncation
            )));
        }
        if engine.denominator() != Some(k as f64 / 2.0) {
            return Err(Error::Dimension(format!(
                "series engine denominator {:?} does not match K/2 = {}",
                engine.denominator(),
                k as f64 / 2.0
            )));
        }
        let (cov, ln_det_sigma) = match &model.cov {
            CovSpec::Isotropic(s2) => {
                if s2.is_nan() || *s2 <= 0.0 {
                    return Err(Error::NotPositiveDefinite(format!(
                        "isotropic variance must be positive, got {s2}"
                    )));
                }
                (
                    CovInternal::Isotropic { inv_s2: 1.0 / s2 },
                    q as f64 * s2.ln(),
                )
            }
            CovSpec::General(sigma) => {
                if sigma.nrows() != q || sigma.ncols() != q {
                    return Err(Error::Dimension(format!(
                        "Sigma is {}x{}, expected {q}x{q}",
                        sigma.nrows(),
                        sigma.ncols()
                    )));
                }
                if (sigma - sigma.transpose()).norm() > 1e-10 * sigma.norm().max(1.0) {
                    return Err(Error::InvalidData("Sigma must be symmetric".into()));
                }
                let chol = Cholesky::new(sigma.clone()).ok_or_else(|| {
                    Error::NotPositiveDefinite("Sigma admits no Cholesky factor".into())
                })?;
                let ln_det: f64 = chol.l().diagonal().iter().map(|d| 2.0 * d.ln()).sum();
                (
                    CovInternal::General {
                        sigma_inv: chol.inverse(),
                    },
                    ln_det,
                )
            }
        };
        let mu_theta = match &model.theta {
            None => model.mu.clone(),
            Some(theta) => {
                if theta.nrows() != k || theta.ncols() != k {
                    return Err(Error::Dimension(format!(
                        "Theta is {}x{}, expected {k}x{k}",
                        theta.nrows(),
                        theta.ncols()
                    )));
                }
                let root = sqrt_pd(theta)?;
                let root_inv = root.try_inverse().ok_or_else(|| {
                    Error::NotPositiveDefinite("Theta root is not invertible".into())
                })?;
                &model.mu * root_inv
            }
        };
        let p_mat = match &cov {
            CovInternal::Isotropic { inv_s2 } => &mu_theta * *inv_s2,
            CovInternal::General { sigma_inv } => sigma_inv * &mu_theta,
        };
        let b_noncentral = p_mat.iter().zip(mu_theta.iter()).map(|(a, b)| a * b).sum();
        let generator: Arc<dyn RadialGenerator> = match &model.generator {
            GeneratorFamily::Gaussian => Arc::new(KotzGenerator::gaussian(m_half)?),
            GeneratorFamily::Kotz { t, r } => Arc::new(KotzGenerator::new(*t, *r, m_half)?),
            GeneratorFamily::Custom(g) => {
                if (g.m_half() - m_half).abs() > 1e-9 * m_half.max(1.0) {
                    return Err(Error::OutOfRange(format!(
                        "generator normalized for M/2 = {}, model needs {m_half}",
                        g.m_half()
                    )));
                }
                g.clone()
            }
        };
        let ln_mv_gamma = mv_gamma_ln(n, k as f64 / 2.0)?;
        Ok(Self {
            model,
            q,
            k,
            n,
            m,
            m_half,
            cov,
            ln_det_sigma,
            p_mat,
            b_noncentral,
            generator,
            engine,
            ln_mv_gamma,
        })
    }

    /// The model this context evaluates.
    pub fn model(&self) -> &ModelSpec {
        &self.model
    }

    /// Shared series engine (reusable across mean updates).
    pub fn engine(&self) -> Arc<SeriesEngine> {
        self.engine.clone()
    }

    /// Dimensions `(q, K, n, m)`.
    pub fn dims(&self) -> (usize, usize, usize, usize) {
        (self.q, self.k, self.n, self.m)
    }

    /// `tr Omega`.
    pub fn noncentrality(&self) -> f64 {
        self.b_noncentral
    }

    /// Base radial exponent `e(0)` under the model's convention.
    pub fn radial_exponent_base(&self) -> f64 {
        let d = self.n as f64 * (self.k as f64 - self.q as f64 - 1.0) / 2.0;
        match self.model.convention {
            RadialConvention::Printed => self.m as f64 - d,
            RadialConvention::Derived => self.m as f64 + d,
        }
    }

    fn spec(&self) -> SeriesSpec {
        SeriesSpec {
            denominator: Some(self.k as f64 / 2.0),
            t_max: self.model.truncation,
            tol: self.model.tol,
        }
    }

    fn trace_sigma_inv(&self, v: &DMatrix<f64>) -> f64 {
        match &self.cov {
            CovInternal::Isotropic { inv_s2 } => v.trace() * inv_s2,
            CovInternal::General { sigma_inv } => trace_prod(sigma_inv, v),
        }
    }

    /// Eigenvalues of the `K x K` reduction `P' V P`, which carries the
    /// nonzero spectrum of `Omega Sigma^{-1} V`.
    fn noncentral_eigenvalues(&self, v: &DMatrix<f64>) -> Vec<f64> {
        let s = self.p_mat.transpose() * v * &self.p_mat;
        psd_eigenvalues(&s)
    }

    fn check_shape(&self, shape: &PseudoWishartShape) -> Result<()> {
        if shape.q != self.q || shape.k != self.k {
            return Err(Error::Dimension(format!(
                "shape is ({}, {}), model is ({}, {})",
                shape.q, shape.k, self.q, self.k
            )));
        }
        Ok(())
    }

    /// `ln |W*|` of the chart matrix `V / rho` (the matrix the angles
    /// parameterize), under the model's `V*` mode.
    fn chart_w_star_ln(&self, shape: &PseudoWishartShape) -> Result<f64> {
        let base = match self.model.vstar {
            VStarMode::Cholesky => shape.log_w_star,
            VStarMode::Spectral => w_star_logdet(shape, VStarMode::Spectral)?,
        };
        Ok(base + self.n as f64 * shape.chart_scale.ln())
    }

    /// Shared log-prefactor of every shape density:
    /// `(nK/2) ln pi - ln Gamma_n(K/2) - (K/2) ln|Sigma|
    ///  + ((K-N)/2) ln|W*| + ln J(u)` at the chart matrix.
    fn shape_prefactor_ln(&self, shape: &PseudoWishartShape) -> Result<f64> {
        let half_exp = (self.k as f64 - self.q as f64 - 1.0) / 2.0;
        Ok(self.n as f64 * self.k as f64 / 2.0 * PI.ln() - self.ln_mv_gamma
            - self.k as f64 / 2.0 * self.ln_det_sigma
            + half_exp * self.chart_w_star_ln(shape)?
            + shape.log_jacobian)
    }

    /// Radial weight `I_t` for the shape series: closed form when the
    /// generator provides one (and quadrature is not forced), adaptive
    /// quadrature otherwise.
    fn radial_weight(&self, e: f64, two_t: u32, a: f64, b: f64) -> Result<SignedLogValue> {
        if !self.model.radial_by_quadrature {
            if let Some(res) = self.generator.radial_integral_closed(e, two_t, a, b) {
                return res;
            }
        }
        radial_weight_quadrature(self.generator.as_ref(), e, two_t, a, b)
    }

    /// Log-density of the shape angles `u` under the model
    /// (the series over `t` of `I_t`-weighted zonal terms).
    pub fn shape_logdensity(&self, shape: &PseudoWishartShape) -> Result<LogDensity> {
        self.check_shape(shape)?;
        let what = shape.chart_matrix();
        let a = self.trace_sigma_inv(&what);
        if a.is_nan() || a <= 0.0 {
            return Err(Error::OutOfRange(format!(
                "tr Sigma^{{-1}} W = {a} must be positive"
            )));
        }
        let b = self.b_noncentral;
        let eigs = self.noncentral_eigenvalues(&what);
        let e0 = self.radial_exponent_base();
        let series = self.engine.sum(&eigs, &self.spec(), |t| {
            self.radial_weight(e0 + t as f64, 2 * t, a, b)
        })?;
        let ln_series = series.value.ln().ok_or_else(|| {
            Error::NonpositiveDensity(format!(
                "shape series sign {} after degree {}",
                series.value.sign(),
                series.degrees_used
            ))
        })?;
        Ok(LogDensity {
            log_density: self.shape_prefactor_ln(shape)? + ln_series,
            degrees_used: series.degrees_used,
            converged: series.converged,
        })
    }

    /// Log-density of the size-and-shape matrix `V` with respect to
    /// Lebesgue measure on its independent elements. Exponent
    /// conventions play no role here (no radial integral is taken).
    pub fn size_shape_logdensity(&self, v: &DMatrix<f64>) -> Result<LogDensity> {
        if v.nrows() != self.q || v.ncols() != self.q {
            return Err(Error::Dimension(format!(
                "V is {}x{}, expected {}x{}",
                v.nrows(),
                v.ncols(),
                self.q,
                self.q
            )));
        }
        let ln_v_star = v_star_logdet(v, self.n, self.model.vstar)?;
        let y0 = self.trace_sigma_inv(v) + self.b_noncentral;
        let eigs = self.noncentral_eigenvalues(v);
        let series = self
            .engine
            .sum(&eigs, &self.spec(), |t| self.generator.h_deriv_slv(2 * t, y0))?;
        let ln_series = series.value.ln().ok_or_else(|| {
            Error::NonpositiveDensity(format!(
                "size-and-shape series sign {} after degree {}",
                series.value.sign(),
                series.degrees_used
            ))
        })?;
        let half_exp = (self.k as f64 - self.q as f64 - 1.0) / 2.0;
        let pref = self.n as f64 * self.k as f64 / 2.0 * PI.ln() - self.ln_mv_gamma
            - self.k as f64 / 2.0 * self.ln_det_sigma
            + half_exp * ln_v_star;
        Ok(LogDensity {
            log_density: pref + ln_series,
            degrees_used: series.degrees_used,
            converged: series.converged,
        })
    }

    /// Closed-form shape density for the Kotz `T = 1` family (general
    /// `Sigma`, `Theta`, `R`): the radial integral collapses to a
    /// single gamma factor per degree,
    /// `I_t ∝ Gamma(e(t) + 1) (RA)^{-(e(t)+1)} R^{2t}`, and the
    /// leftover `R^t A^{-t}` is absorbed into the zonal argument.
    pub fn kotz_t1_shape_logdensity(&self, shape: &PseudoWishartShape) -> Result<LogDensity> {
        self.check_shape(shape)?;
        let (t_param, r_param) = self.kotz_params()?;
        if t_param != 1.0 {
            return Err(Error::OutOfRange(format!(
                "T = {t_param} generator passed to the T = 1 closed form"
            )));
        }
        let what = shape.chart_matrix();
        let a = self.trace_sigma_inv(&what);
        let b = self.b_noncentral;
        let e0 = self.radial_exponent_base();
        let scale = r_param / a;
        let eigs: Vec<f64> = self
            .noncentral_eigenvalues(&what)
            .into_iter()
            .map(|x| x * scale)
            .collect();
        let series = self.engine.sum(&eigs, &self.spec(), |t| {
            Ok(SignedLogValue::exp_of(ln_gamma(e0 + t as f64 + 1.0)))
        })?;
        let ln_series = series.value.ln().expect("positive-weight series");
        let ln_front = ln_kotz_constant(1.0, r_param, self.m_half) - r_param * b
            - (e0 + 1.0) * (r_param * a).ln();
        Ok(LogDensity {
            log_density: self.shape_prefactor_ln(shape)? + ln_front + ln_series,
            degrees_used: series.degrees_used,
            converged: series.converged,
        })
    }

    /// Closed-form shape density for Kotz generators with integer
    /// shape parameter `T >= 1`, via the finite polynomial expansion of
    /// each radial integral: writing `x = RAr` and `beta = RB`,
    ///
    /// ```text
    /// I_t = G e^{-beta} R^{2t-T+1} (RA)^{-(e(t)+1)}
    ///       sum_{j=0}^{T-1} c_j(t) Gamma(e(t) + j + 1),
    /// ```
    ///
    /// where the `c_j` are the coefficients of `x^j` in
    /// `sum_v binom(2t, v) pi_v (-1)^v (x + beta)^{T-1-v}`. This is an
    /// independent assembly of the same integral computed by
    /// [`crate::kotz::KotzGenerator::radial_integral_closed`].
    pub fn kotz_general_shape_logdensity(&self, shape: &PseudoWishartShape) -> Result<LogDensity> {
        self.check_shape(shape)?;
        let (t_param, r_param) = self.kotz_params()?;
        if !(t_param >= 1.0 && t_param.fract() == 0.0) {
            return Err(Error::OutOfRange(format!(
                "integer-shape closed form needs integer T >= 1, got {t_param}"
            )));
        }
        let t_int = t_param as u32;
        let what = shape.chart_matrix();
        let a = self.trace_sigma_inv(&what);
        let b = self.b_noncentral;
        let beta = r_param * b;
        let e0 = self.radial_exponent_base();
        let ln_g = ln_kotz_constant(t_param, r_param, self.m_half);
        let eigs = self.noncentral_eigenvalues(&what);
        let series = self.engine.sum(&eigs, &self.spec(), |t| {
            let e = e0 + t as f64;
            let two_t = 2 * t;
            let tm1 = t_int - 1;
            // c_j(t): expand sum_v binom(2t,v) pi_v (-1)^v (x+beta)^{T-1-v}.
            let mut coef = vec![0.0f64; tm1 as usize + 1];
            let mut pi_v = 1.0;
            for v in 0..=two_t.min(tm1) {
                let sign = if v % 2 == 0 { 1.0 } else { -1.0 };
                let p = tm1 - v;
                let outer = sign * binomial(two_t, v) * pi_v;
                for j in 0..=p {
                    coef[j as usize] +=
                        outer * binomial(p, j) * beta.powi((p - j) as i32);
                }
                pi_v *= t_param - 1.0 - v as f64;
            }
            let mut sum = SignedLogValue::ZERO;
            for (j, &c) in coef.iter().enumerate() {
                if c != 0.0 {
                    sum += SignedLogValue::from_f64(c)
                        * SignedLogValue::exp_of(ln_gamma(e + j as f64 + 1.0));
                }
            }
            let ln_front = ln_g - beta + (two_t as f64 - tm1 as f64) * r_param.ln()
                - (e + 1.0) * (r_param * a).ln();
            Ok(sum * SignedLogValue::exp_of(ln_front))
        })?;
        let ln_series = series.value.ln().ok_or_else(|| {
            Error::NonpositiveDensity(format!(
                "integer-shape Kotz series sign {} after degree {}",
                series.value.sign(),
                series.degrees_used
            ))
        })?;
        Ok(LogDensity {
            log_density: self.shape_prefactor_ln(shape)? + ln_series,
            degrees_used: series.degrees_used,
            converged: series.converged,
        })
    }

    /// Closed-form isotropic shape density for Kotz `T = 2`
    /// (`Sigma = sigma2 I`, `Theta = I`): per-degree weight
    /// `(RB - 2t) Gamma(a) + Gamma(a + 1)` with `a = e(t) + 1`.
    pub fn kotz_t2_shape_logdensity(&self, shape: &PseudoWishartShape) -> Result<LogDensity> {
        self.isotropic_kotz_display(shape, 2.0, |t, e, beta| {
            let a_exp = e + 1.0;
            SignedLogValue::from_f64(beta - 2.0 * t as f64)
                * SignedLogValue::exp_of(ln_gamma(a_exp))
                + SignedLogValue::exp_of(ln_gamma(a_exp + 1.0))
        })
    }

    /// Closed-form isotropic shape density for Kotz `T = 3`: per-degree
    /// weight `((RB - 2t)^2 - 2t) Gamma(a) + 2 (RB - 2t) Gamma(a + 1)
    /// + Gamma(a + 2)` with `a = e(t) + 1`.
    pub fn kotz_t3_shape_logdensity(&self, shape: &PseudoWishartShape) -> Result<LogDensity> {
        self.isotropic_kotz_display(shape, 3.0, |t, e, beta| {
            let a_exp = e + 1.0;
            let centred = beta - 2.0 * t as f64;
            SignedLogValue::from_f64(centred * centred - 2.0 * t as f64)
                * SignedLogValue::exp_of(ln_gamma(a_exp))
                + SignedLogValue::from_f64(2.0 * centred)
                    * SignedLogValue::exp_of(ln_gamma(a_exp + 1.0))
                + SignedLogValue::exp_of(ln_gamma(a_exp + 2.0))
        })
    }

    /// Common frame of the isotropic `T = 2` / `T = 3` displays: the
    /// zonal argument is `R mu' W mu / (sigma2 tr W)` at the chart
    /// matrix, the series weight is the display's gamma polynomial, and
    /// the leftover radial factor is `R^{1-T} (RA)^{-(e(0)+1)}`.
    fn isotropic_kotz_display<F>(
        &self,
        shape: &PseudoWishartShape,
        t_required: f64,
        weight: F,
    ) -> Result<LogDensity>
    where
        F: Fn(u32, f64, f64) -> SignedLogValue,
    {
        self.check_shape(shape)?;
        let (t_param, r_param) = self.kotz_params()?;
        if t_param != t_required {
            return Err(Error::OutOfRange(format!(
                "T = {t_param} generator passed to the T = {t_required} closed form"
            )));
        }
        let inv_s2 = match &self.cov {
            CovInternal::Isotropic { inv_s2 } => *inv_s2,
            CovInternal::General { .. } => {
                return Err(Error::OutOfRange(
                    "this closed form requires an isotropic covariance".into(),
                ))
            }
        };
        if self.model.theta.is_some() {
            return Err(Error::OutOfRange(
                "this closed form requires the identity column covariance".into(),
            ));
        }
        let what = shape.chart_matrix();
        let trace_w = what.trace();
        let a = trace_w * inv_s2;
        let b = self.b_noncentral;
        let beta = r_param * b;
        let e0 = self.radial_exponent_base();
        let gram = self.model.mu.transpose() * &what * &self.model.mu;
        let scale = r_param * inv_s2 / trace_w;
        let eigs: Vec<f64> = psd_eigenvalues(&gram).into_iter().map(|x| x * scale).collect();
        let series = self.engine.sum(&eigs, &self.spec(), |t| {
            Ok(weight(t, e0 + t as f64, beta))
        })?;
        let ln_series = series.value.ln().ok_or_else(|| {
            Error::NonpositiveDensity(format!(
                "isotropic Kotz display series sign {} after degree {}",
                series.value.sign(),
                series.degrees_used
            ))
        })?;
        let ln_front = ln_kotz_constant(t_param, r_param, self.m_half) - beta
            + (1.0 - t_param) * r_param.ln()
            - (e0 + 1.0) * (r_param * a).ln();
        Ok(LogDensity {
            log_density: self.shape_prefactor_ln(shape)? + ln_front + ln_series,
            degrees_used: series.degrees_used,
            converged: series.converged,
        })
    }

    fn kotz_params(&self) -> Result<(f64, f64)> {
        match &self.model.generator {
            GeneratorFamily::Gaussian => Ok((1.0, 0.5)),
            GeneratorFamily::Kotz { t, r } => Ok((*t, *r)),
            GeneratorFamily::Custom(_) => Err(Error::OutOfRange(
                "closed Kotz forms need a Kotz generator family".into(),
            )),
        }
    }
}

/// Radial weight by adaptive quadrature:
/// `∫_0^∞ r^e h^{(2t)}(a r + b) dr` to [`RADIAL_QUAD_TOL`].
pub fn radial_weight_quadrature(
    gen: &dyn RadialGenerator,
    e: f64,
    two_t: u32,
    a: f64,
    b: f64,
) -> Result<SignedLogValue> {
    if e <= -1.0 {
        return Err(Error::DivergentIntegral { exponent: e });
    }
    if a.is_nan() || a <= 0.0 || b < 0.0 {
        return Err(Error::OutOfRange(format!(
            "radial integral needs A > 0, B >= 0; got A = {a}, B = {b}"
        )));
    }
    let q = integrate_semi_infinite(
        |r| {
            // The derivative only fails at the r = 0 endpoint of
            // noninteger-T generators; a single endpoint cannot carry
            // mass, so treat it as zero.
            gen.h_deriv_slv(two_t, a * r + b)
                .map(|h| h * SignedLogValue::exp_of(e * r.ln()))
                .unwrap_or(SignedLogValue::ZERO)
        },
        RADIAL_QUAD_TOL,
    )?;
    Ok(q.value)
}

/// Generator-free central (`mu = 0`) shape log-density.
///
/// Under the `Derived` exponent the central radial integral is exactly
/// the generator mass identity, leaving
///
/// ```text
/// ln f(u) = (nK/2) ln pi + ln Gamma(M/2) - (M/2) ln pi
///           - ln Gamma_n(K/2) - (K/2) ln|Sigma|
///           + ((K-N)/2) ln|W*| + ln J(u) - (M/2) ln tr Sigma^{-1} W
/// ```
///
/// at the chart matrix. Under `Printed` the literal closed form
/// `pi^{nK - m + n(K-N)/2 - 1} Gamma(m - n(K-N)/2 + 1) / (Gamma_n(K/2)
/// |Sigma|^{K/2}) |W*|^{(K-N)/2} J(u) (tr Sigma^{-1} W)^{n(K-N)/2-m-1}`
/// is evaluated at the Frobenius-normalized `W = V / r`; it is neither
/// generator-consistent nor normalized unless `q = K`, and is kept for
/// reproduction of analyses that used it.
pub fn central_invariant_logdensity(
    shape: &PseudoWishartShape,
    cov: &CovSpec,
    convention: RadialConvention,
    vstar: VStarMode,
) -> Result<f64> {
    let q = shape.q;
    let k = shape.k;
    let n = shape.n;
    let m = shape.m as f64;
    let d = n as f64 * (k as f64 - q as f64 - 1.0) / 2.0;
    let m_half = (q * k) as f64 / 2.0;
    let half_exp = (k as f64 - q as f64 - 1.0) / 2.0;
    let ln_mv = mv_gamma_ln(n, k as f64 / 2.0)?;
    type TraceFn = Box<dyn Fn(&DMatrix<f64>) -> f64>;
    let (ln_det_sigma, trace_fn): (f64, TraceFn) = match cov {
        CovSpec::Isotropic(s2) => {
            if s2.is_nan() || *s2 <= 0.0 {
                return Err(Error::NotPositiveDefinite(format!(
                    "isotropic variance must be positive, got {s2}"
                )));
            }
            let inv = 1.0 / s2;
            (q as f64 * s2.ln(), Box::new(move |w| w.trace() * inv))
        }
        CovSpec::General(sigma) => {
            let chol = Cholesky::new(sigma.clone()).ok_or_else(|| {
                Error::NotPositiveDefinite("Sigma admits no Cholesky factor".into())
            })?;
            let ln_det: f64 = chol.l().diagonal().iter().map(|x| 2.0 * x.ln()).sum();
            let inv = chol.inverse();
            (ln_det, Box::new(move |w| trace_prod(&inv, w)))
        }
    };
    let w_star_base = match vstar {
        VStarMode::Cholesky => shape.log_w_star,
        VStarMode::Spectral => w_star_logdet(shape, VStarMode::Spectral)?,
    };
    match convention {
        RadialConvention::Derived => {
            let what = shape.chart_matrix();
            let a = trace_fn(&what);
            let ln_w_star = w_star_base + n as f64 * shape.chart_scale.ln();
            Ok(n as f64 * k as f64 / 2.0 * PI.ln() + ln_gamma(m_half) - m_half * PI.ln()
                - ln_mv
                - k as f64 / 2.0 * ln_det_sigma
                + half_exp * ln_w_star
                + shape.log_jacobian
                - m_half * a.ln())
        }
        RadialConvention::Printed => {
            let gamma_arg = m - d + 1.0;
            if gamma_arg <= 0.0 && gamma_arg == gamma_arg.floor() {
                return Err(Error::GammaPole {
                    n: 1,
                    a: gamma_arg,
                });
            }
            let w = shape.w();
            let a = trace_fn(&w);
            Ok((n as f64 * k as f64 - m + d - 1.0) * PI.ln() + ln_gamma(gamma_arg)
                - ln_mv
                - k as f64 / 2.0 * ln_det_sigma
                + half_exp * w_star_base
                + shape.log_jacobian
                + (d - m - 1.0) * a.ln())
        }
    }
}

/// `ln` of the Kotz type-I normalizing constant
/// `R^{T-1+M/2} Gamma(M/2) / (pi^{M/2} Gamma(T-1+M/2))`.
fn ln_kotz_constant(t_param: f64, r_param: f64, m_half: f64) -> f64 {
    (t_param - 1.0 + m_half) * r_param.ln() + ln_gamma(m_half)
        - m_half * PI.ln()
        - ln_gamma(t_param - 1.0 + m_half)
}

/// `tr(A B)` for square matrices of equal size.
fn trace_prod(a: &DMatrix<f64>, b: &DMatrix<f64>) -> f64 {
    let mut sum = 0.0;
    for i in 0..a.nrows() {
        for j in 0..a.ncols() {
            sum += a[(i, j)] * b[(j, i)];
        }
    }
    sum
}

/// Eigenvalues of a symmetric PSD matrix, with small negative rounding
/// noise clamped to zero.
fn psd_eigenvalues(mat: &DMatrix<f64>) -> Vec<f64> {
    SymmetricEigen::new(mat.clone())
        .eigenvalues
        .iter()
        .map(|&x| x.max(0.0))
        .collect()
}

/// Exact binomial coefficient in floating point (small arguments).
fn binomial(n: u32, k: u32) -> f64 {
    let k = k.min(n - k);
    let mut acc = 1.0f64;
    for i in 0..k {
        acc = acc * (n - i) as f64 / (i + 1) as f64;
    }
    acc
}
