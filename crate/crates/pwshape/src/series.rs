//! Weighted zonal polynomial series.
//!
//! Every density in this crate reduces to a series of the form
//!
//! ```text
//! sum_{t=0}^{t_max} w(t)/t! sum_{kappa |- t, len(kappa) <= L} C_kappa(X) / (a)_kappa,
//! ```
//!
//! with a model-specific weight `w(t)` (a radial integral or a generator
//! derivative) that may be negative and may span hundreds of orders of
//! magnitude. Terms are therefore accumulated as [`SignedLogValue`]s;
//! within one degree the zonal values are combined in linear `f64`
//! against a common log-scale, which is safe because the per-degree
//! coefficients are nonnegative.

use crate::error::Error;
use crate::slv::SignedLogValue;
use crate::special::{gen_pochhammer_slv, ln_factorial};
use crate::zonal::{scaled_power_table, ZonalBasis};
use crate::Result;
use std::sync::Arc;

/// Configuration of a weighted zonal series.
#[derive(Debug, Clone, Copy)]
pub struct SeriesSpec {
    /// Divide each term by the generalized Pochhammer `(a)_kappa` when
    /// `Some(a)`; omit the denominator entirely when `None`.
    pub denominator: Option<f64>,
    /// Hard truncation degree.
    pub t_max: u32,
    /// Relative-increment stopping tolerance; the sum stops early once
    /// two consecutive degrees contribute less than `tol` relative to
    /// the running total.
    pub tol: f64,
}

impl SeriesSpec {
    /// Default stopping tolerance.
    pub const DEFAULT_TOL: f64 = 1e-12;
}

/// Outcome of a series evaluation.
#[derive(Debug, Clone, Copy)]
pub struct SeriesResult {
    /// The accumulated sum.
    pub value: SignedLogValue,
    /// Highest degree actually added.
    pub degrees_used: u32,
    /// Whether the stopping rule fired before `t_max`.
    pub converged: bool,
}

/// Reusable series evaluator: a zonal basis plus cached log-Pochhammer
/// denominators. Construction is the expensive part; evaluations share
/// it immutably (`SeriesEngine` is `Send + Sync`).
#[derive(Debug, Clone)]
pub struct SeriesEngine {
    basis: Arc<ZonalBasis>,
    denominator: Option<f64>,
    /// Per degree: (ln|(a)_kappa|, sign) aligned with the degree's
    /// partition list. Empty when no denominator is used.
    ln_poch: Vec<(Vec<f64>, Vec<i8>)>,
}

impl SeriesEngine {
    /// Build an engine over `basis`, caching `(a)_kappa` for every
    /// partition in range when a denominator is requested.
    pub fn new(basis: Arc<ZonalBasis>, denominator: Option<f64>) -> Self {
        let ln_poch = match denominator {
            None => Vec::new(),
            Some(a) => (0..=basis.max_degree())
                .map(|t| {
                    let table = basis.degree(t);
                    let mut lns = Vec::with_capacity(table.partitions().len());
                    let mut signs = Vec::with_capacity(table.partitions().len());
                    for kappa in table.partitions() {
                        let p = gen_pochhammer_slv(a, kappa);
                        lns.push(p.ln_abs());
                        signs.push(p.sign());
                    }
                    (lns, signs)
                })
                .collect(),
        };
        Self {
            basis,
            denominator,
            ln_poch,
        }
    }

    /// The Pochhammer denominator parameter, if any.
    pub fn denominator(&self) -> Option<f64> {
        self.denominator
    }

    /// The zonal basis evaluations run against.
    pub fn basis(&self) -> &ZonalBasis {
        &self.basis
    }

    /// Evaluate the series at the eigenvalues of the matrix argument.
    ///
    /// Errors if a partition with a vanishing Pochhammer denominator
    /// contributes a nonzero zonal value, or if `spec.t_max` exceeds the
    /// basis degree.
    pub fn sum(
        &self,
        eigenvalues: &[f64],
        spec: &SeriesSpec,
        mut weight: impl FnMut(u32) -> Result<SignedLogValue>,
    ) -> Result<SeriesResult> {
        if spec.t_max > self.basis.max_degree() {
            return Err(Error::OutOfRange(format!(
                "series degree {} exceeds basis degree {}",
                spec.t_max,
                self.basis.max_degree()
            )));
        }
        let (pows, ln_scale) = scaled_power_table(eigenvalues, spec.t_max);
        let mut sum = SignedLogValue::ZERO;
        let mut used = 0;
        let mut streak = 0;
        let mut converged = false;
        for t in 0..=spec.t_max {
            let table = self.basis.degree(t);
            let values = table.eval_all(&pows);
            let term = if let Some(denominator) = self.denominator {
                let (lns, signs) = &self.ln_poch[t as usize];
                let mut ln_min = f64::INFINITY;
                for (i, &c) in values.iter().enumerate() {
                    if c != 0.0 {
                        if signs[i] == 0 {
                            return Err(Error::OutOfRange(format!(
                                "Pochhammer denominator ({})_{} vanishes",
                                denominator,
                                table.partitions()[i]
                            )));
                        }
                        ln_min = ln_min.min(lns[i]);
                    }
                }
                if ln_min.is_infinite() {
                    SignedLogValue::ZERO
                } else {
                    let inner: f64 = values
                        .iter()
                        .enumerate()
                        .filter(|(_, &c)| c != 0.0)
                        .map(|(i, &c)| c * signs[i] as f64 * (ln_min - lns[i]).exp())
                        .sum();
                    SignedLogValue::from_f64(inner)
                        * SignedLogValue::exp_of(t as f64 * ln_scale - ln_min - ln_factorial(t))
                }
            } else {
                let inner: f64 = values.iter().sum();
                SignedLogValue::from_f64(inner)
                    * SignedLogValue::exp_of(t as f64 * ln_scale - ln_factorial(t))
            };
            let term = term * weight(t)?;
            sum += term;
            used = t;
            let rel = if term.is_zero() {
                0.0
            } else if sum.is_zero() {
                f64::INFINITY
            } else {
                (term.ln_abs() - sum.ln_abs()).exp()
            };
            if rel < spec.tol {
                streak += 1;
                if streak >= 2 && t >= 1 {
                    converged = true;
                    break;
                }
            } else {
                streak = 0;
            }
        }
        Ok(SeriesResult {
            value: sum,
            degrees_used: used,
            converged,
        })
    }
}

/// One-shot weighted zonal series over the given eigenvalues; builds a
/// throwaway basis of the required size. For repeated evaluation reuse
/// a [`SeriesEngine`].
pub fn weighted_zonal_series(
    eigenvalues: &[f64],
    spec: &SeriesSpec,
    weight: impl FnMut(u32) -> Result<SignedLogValue>,
) -> Result<SeriesResult> {
    let max_len = eigenvalues.len().min(spec.t_max.max(1) as usize);
    let basis = Arc::new(ZonalBasis::build(max_len, spec.t_max));
    SeriesEngine::new(basis, spec.denominator).sum(eigenvalues, spec, weight)
}
