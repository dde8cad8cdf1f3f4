//! Numerical oracles: independent checks that validate closed-form
//! code paths against quadrature, finite differences, Monte-Carlo
//! integration, and truncation studies.
//!
//! These live in the library (not in test code) so the command-line
//! interface can expose them as a self-check battery; the test suite
//! builds its acceptance gates on top of the same functions.

use crate::density::{radial_weight_quadrature, DensityContext};
use crate::error::Error;
use crate::geometry::{matrix_from_angles, shape_from_v};
use crate::kotz::{generator_mass_check, RadialGenerator};
use crate::zonal::{scaled_power_table, ZonalBasis};
use crate::Result;
use crate::SignedLogValue;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use std::f64::consts::PI;

/// Outcome of one oracle run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    /// Relative error within the oracle's declared tolerance.
    Pass,
    /// Relative error above the declared tolerance.
    Fail,
}

impl std::fmt::Display for Verdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Self::Pass => "pass",
            Self::Fail => "fail",
        })
    }
}

/// A self-describing oracle result; `verdict` is `Pass` exactly when
/// `rel_error <= tolerance`.
#[derive(Debug, Clone)]
pub struct OracleReport {
    /// Which oracle produced the report.
    pub name: String,
    /// Value computed by the code path under test.
    pub computed: f64,
    /// Independent reference value.
    pub reference: f64,
    /// `|computed - reference| / max(|reference|, eps)`.
    pub rel_error: f64,
    /// Sample count (Monte Carlo) or node count (quadrature / grids).
    pub samples_or_nodes: u64,
    /// Declared tolerance the verdict is judged against.
    pub tolerance: f64,
    /// Pass/fail.
    pub verdict: Verdict,
    /// Monte-Carlo standard error, when the oracle is stochastic.
    pub standard_error: Option<f64>,
}

impl OracleReport {
    fn judge(
        name: impl Into<String>,
        computed: f64,
        reference: f64,
        samples_or_nodes: u64,
        tolerance: f64,
        standard_error: Option<f64>,
    ) -> Self {
        let rel_error = (computed - reference).abs() / reference.abs().max(f64::MIN_POSITIVE);
        Self {
            name: name.into(),
            computed,
            reference,
            rel_error,
            samples_or_nodes,
            tolerance,
            verdict: if rel_error <= tolerance {
                Verdict::Pass
            } else {
                Verdict::Fail
            },
            standard_error,
        }
    }
}

/// Radial integral `∫_0^∞ r^e h^{(2t)}(ar + b) dr` forced through
/// adaptive quadrature, bypassing any closed form the generator offers.
pub fn radial_quadrature(
    gen: &dyn RadialGenerator,
    e: f64,
    two_t: u32,
    a: f64,
    b: f64,
) -> Result<SignedLogValue> {
    radial_weight_quadrature(gen, e, two_t, a, b)
}

/// Compare a generator's closed radial integral against quadrature at
/// one `(e, 2t, a, b)` point. Errors if the generator offers no closed
/// form.
pub fn radial_closed_vs_quadrature(
    gen: &dyn RadialGenerator,
    e: f64,
    two_t: u32,
    a: f64,
    b: f64,
    tolerance: f64,
) -> Result<OracleReport> {
    let closed = gen.radial_integral_closed(e, two_t, a, b).ok_or_else(|| {
        Error::OutOfRange("generator offers no closed radial integral".into())
    })??;
    let quad = radial_quadrature(gen, e, two_t, a, b)?;
    Ok(OracleReport::judge(
        format!("radial_quadrature(e={e}, 2t={two_t}, A={a}, B={b})"),
        closed.to_f64(),
        quad.to_f64(),
        1,
        tolerance,
        None,
    ))
}

/// Generator mass identity `∫_0^∞ s^{M/2-1} h(s) ds = Gamma(M/2) /
/// pi^{M/2}` as a pass/fail report (tolerance on the ratio minus one).
pub fn mass_identity_report(gen: &dyn RadialGenerator, tolerance: f64) -> Result<OracleReport> {
    let ratio = generator_mass_check(gen, tolerance.min(1e-9))?;
    Ok(OracleReport::judge(
        format!("generator_mass(M/2={})", gen.m_half()),
        ratio,
        1.0,
        1,
        tolerance,
        None,
    ))
}

/// Zonal normalization identity `sum_{kappa |- t} C_kappa(X) =
/// (tr X)^t` checked across all degrees `t <= t_max`; the report
/// carries the worst degree's relative error.
pub fn zonal_sum_report(eigenvalues: &[f64], t_max: u32, tolerance: f64) -> OracleReport {
    let basis = ZonalBasis::build(eigenvalues.len(), t_max);
    let (pows, ln_scale) = scaled_power_table(eigenvalues, t_max);
    let trace: f64 = eigenvalues.iter().sum();
    let mut worst = (0.0f64, 1.0f64, 1.0f64);
    for t in 0..=t_max {
        let total: f64 = basis.degree(t).eval_all(&pows).iter().sum();
        let total = total * (t as f64 * ln_scale).exp();
        let reference = trace.powi(t as i32);
        let rel = (total - reference).abs() / reference.abs().max(f64::MIN_POSITIVE);
        if rel >= worst.0 {
            worst = (rel, total, reference);
        }
    }
    OracleReport::judge(
        format!("zonal_sum_identity(t<= {t_max})"),
        worst.1,
        worst.2,
        u64::from(t_max) + 1,
        tolerance,
        None,
    )
}

/// `k`-th derivative of a scalar function by central differences with
/// Richardson extrapolation (`k <= 4`). The step ladder halves from
/// `y / 8`; the estimate is taken at the error plateau, and the
/// function errors when no plateau forms (noise-dominated input).
pub fn finite_difference(
    f: impl Fn(f64) -> Result<f64>,
    y: f64,
    k: u32,
) -> Result<f64> {
    if k > 4 {
        return Err(Error::OutOfRange(format!(
            "finite differences implemented for k <= 4, got {k}"
        )));
    }
    if y.is_nan() || y <= 0.0 {
        return Err(Error::OutOfRange(format!(
            "differentiation point must be positive, got {y}"
        )));
    }
    if k == 0 {
        return f(y);
    }
    let stencil = |h: f64| -> Result<f64> {
        Ok(match k {
            1 => (f(y + h)? - f(y - h)?) / (2.0 * h),
            2 => (f(y + h)? - 2.0 * f(y)? + f(y - h)?) / (h * h),
            3 => {
                (f(y + 2.0 * h)? - 2.0 * f(y + h)? + 2.0 * f(y - h)? - f(y - 2.0 * h)?)
                    / (2.0 * h * h * h)
            }
            _ => {
                (f(y + 2.0 * h)? - 4.0 * f(y + h)? + 6.0 * f(y)? - 4.0 * f(y - h)?
                    + f(y - 2.0 * h)?)
                    / (h * h * h * h)
            }
        })
    };
    // Richardson table over a halving ladder; the stencils are O(h^2),
    // so each column gains a factor-4 error reduction.
    const LEVELS: usize = 12;
    let h0 = y / 8.0;
    let mut table: Vec<Vec<f64>> = Vec::with_capacity(LEVELS);
    let mut best = f64::NAN;
    let mut best_err = f64::INFINITY;
    for j in 0..LEVELS {
        let h = h0 / 2f64.powi(j as i32);
        let mut row = vec![stencil(h)?];
        for l in 1..=j {
            let pow = 4f64.powi(l as i32);
            let extrap = (pow * row[l - 1] - table[j - 1][l - 1]) / (pow - 1.0);
            row.push(extrap);
        }
        if j > 0 {
            let l = row.len() - 1;
            let err = (row[l] - table[j - 1][l - 1]).abs()
                + (row[l] - row[l - 1]).abs();
            if err < best_err {
                best_err = err;
                best = row[l];
            }
        }
        table.push(row);
    }
    if best_err > 1e-7 * best.abs().max(1.0) {
        return Err(Error::Nonconvergence(format!(
            "finite-difference ladder found no plateau (residual {best_err:.3e})"
        )));
    }
    Ok(best)
}

/// Compare a generator derivative `h^{(k)}(y)` against the
/// finite-difference ladder applied to `h` itself.
pub fn derivative_report(
    gen: &dyn RadialGenerator,
    k: u32,
    y: f64,
    tolerance: f64,
) -> Result<OracleReport> {
    let computed = gen.h_deriv_slv(k, y)?.to_f64();
    let reference = finite_difference(|x| gen.h(x), y, k)?;
    Ok(OracleReport::judge(
        format!("generator_derivative(k={k}, y={y})"),
        computed,
        reference,
        1,
        tolerance,
        None,
    ))
}

/// Number of Monte-Carlo shards; each shard draws from its own
/// deterministic substream so the reduction order is fixed.
const MC_SHARDS: u64 = 16;

/// Minimum admissible support acceptance rate before the chart is
/// declared degenerate.
const MC_MIN_ACCEPTANCE: f64 = 1e-4;

/// Monte-Carlo normalization of a density over the `m`-angle chart:
/// uniform angles on `(0, pi)^{m-1} x (0, 2 pi)`, with the density
/// handle returning `Ok(None)` outside its support (counted as zero).
/// The estimate is `volume * mean`, reported against reference 1.
///
/// Errors if the acceptance rate falls below `1e-4` (degenerate
/// support). Sampling is sharded with per-shard seeds derived from the
/// master seed; shard reduction order is fixed, so results are
/// reproducible for a given `(n_samples, seed)`.
pub fn mc_normalization(
    f: impl Fn(&[f64]) -> Result<Option<f64>>,
    m: usize,
    n_samples: u64,
    seed: u64,
    tolerance: f64,
) -> Result<OracleReport> {
    if m == 0 {
        return Err(Error::Dimension("chart needs at least one angle".into()));
    }
    if n_samples == 0 {
        return Err(Error::OutOfRange("need at least one sample".into()));
    }
    let volume = PI.powi(m as i32 - 1) * 2.0 * PI;
    let mut total = 0.0;
    let mut total_sq = 0.0;
    let mut accepted: u64 = 0;
    let mut angles = vec![0.0f64; m];
    for shard in 0..MC_SHARDS {
        let count = n_samples / MC_SHARDS + u64::from(shard < n_samples % MC_SHARDS);
        let mut rng = ChaCha20Rng::seed_from_u64(
            seed ^ (shard + 1).wrapping_mul(0x9E37_79B9_7F4A_7C15),
        );
        let mut sum = 0.0;
        let mut sum_sq = 0.0;
        for _ in 0..count {
            for (i, a) in angles.iter_mut().enumerate() {
                // (0, 1) strictly: rejects the measure-zero 0.0 draw so
                // every angle is in the chart's open range.
                let x = loop {
                    let x: f64 = rng.gen();
                    if x > 0.0 {
                        break x;
                    }
                };
                *a = if i + 1 < m { x * PI } else { x * 2.0 * PI };
            }
            if let Some(ln_f) = f(&angles)? {
                let val = ln_f.exp();
                sum += val;
                sum_sq += val * val;
                accepted += 1;
            }
        }
        total += sum;
        total_sq += sum_sq;
    }
    let acceptance = accepted as f64 / n_samples as f64;
    if acceptance < MC_MIN_ACCEPTANCE {
        return Err(Error::OutOfRange(format!(
            "chart support is degenerate: acceptance rate {acceptance:.2e}"
        )));
    }
    let mean = total / n_samples as f64;
    let var = (total_sq / n_samples as f64 - mean * mean).max(0.0);
    let se = volume * (var / n_samples as f64).sqrt();
    Ok(OracleReport {
        standard_error: Some(se),
        ..OracleReport::judge(
            format!("mc_normalization(m={m}, n={n_samples}, seed={seed})"),
            volume * mean,
            1.0,
            n_samples,
            tolerance,
            None,
        )
    })
}

/// Monte-Carlo normalization of a model's shape density over its angle
/// chart. Angle draws outside the positive-semidefinite support are
/// rejected (density zero there).
pub fn shape_density_normalization(
    ctx: &DensityContext,
    n_samples: u64,
    seed: u64,
    tolerance: f64,
) -> Result<OracleReport> {
    let (q, k, _, m) = ctx.dims();
    mc_normalization(
        |u| {
            let vhat = match matrix_from_angles(u, q, k) {
                Ok(v) => v,
                Err(Error::RankDeficient(_)) => return Ok(None),
                Err(e) => return Err(e),
            };
            let shape = match shape_from_v(&vhat, k) {
                Ok(s) => s,
                Err(Error::NotPositiveDefinite(_))
                | Err(Error::RankDeficient(_))
                | Err(Error::InvalidData(_)) => return Ok(None),
                Err(e) => return Err(e),
            };
            Ok(Some(ctx.shape_logdensity(&shape)?.log_density))
        },
        m,
        n_samples,
        seed,
        tolerance,
    )
}

/// Truncation study: evaluate a log-density (or any scalar) on a grid
/// of truncation degrees and flag the first grid point after which all
/// successive increments stay below [`TRUNCATION_STABILITY_TOL`].
#[derive(Debug, Clone)]
pub struct TruncationStudy {
    /// `(t_max, value)` per grid point, in grid order.
    pub rows: Vec<(u32, f64)>,
    /// First grid `t_max` from which the value has stabilized, if any.
    pub stabilized_at: Option<u32>,
}

/// Absolute increment threshold under which successive truncations are
/// considered stabilized.
pub const TRUNCATION_STABILITY_TOL: f64 = 1e-6;

/// Run a truncation study over `grid` (strictly increasing degrees).
pub fn truncation_study(
    eval: impl Fn(u32) -> Result<f64>,
    grid: &[u32],
) -> Result<TruncationStudy> {
    if grid.len() < 2 || grid.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::OutOfRange(
            "truncation grid must be strictly increasing with >= 2 points".into(),
        ));
    }
    let mut rows = Vec::with_capacity(grid.len());
    for &t in grid {
        rows.push((t, eval(t)?));
    }
    let mut stabilized_at = None;
    for start in 0..rows.len() - 1 {
        let stable = rows[start..]
            .windows(2)
            .all(|w| (w[1].1 - w[0].1).abs() < TRUNCATION_STABILITY_TOL);
        if stable {
            stabilized_at = Some(rows[start].0);
            break;
        }
    }
    Ok(TruncationStudy {
        rows,
        stabilized_at,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::chart_log_jacobian;
    use crate::kotz::KotzGenerator;
    use approx::assert_relative_eq;
    use statrs::function::gamma::ln_gamma;

    const FD_TOL: f64 = 1e-6;

    #[test]
    fn finite_difference_recovers_polynomial_derivatives() {
        // f(y) = y^5: derivatives 5y^4, 20y^3, 60y^2, 120y.
        let f = |y: f64| Ok(y.powi(5));
        assert_relative_eq!(finite_difference(f, 1.3, 1).unwrap(), 5.0 * 1.3f64.powi(4), max_relative = 1e-8);
        assert_relative_eq!(finite_difference(f, 1.3, 2).unwrap(), 20.0 * 1.3f64.powi(3), max_relative = 1e-8);
        assert_relative_eq!(finite_difference(f, 1.3, 3).unwrap(), 60.0 * 1.3f64.powi(2), max_relative = 1e-7);
        assert_relative_eq!(finite_difference(f, 1.3, 4).unwrap(), 120.0 * 1.3, max_relative = 1e-6);
    }

    #[test]
    fn finite_difference_flags_a_kink() {
        // |y - 1| has no second derivative at 1: the difference ladder
        // diverges like 2/h and never forms a plateau.
        let f = |y: f64| Ok((y - 1.0).abs());
        assert!(matches!(
            finite_difference(f, 1.0, 2),
            Err(Error::Nonconvergence(_))
        ));
    }

    #[test]
    fn gaussian_derivatives_match_ladder() {
        let gen = KotzGenerator::gaussian(5.0).unwrap();
        for k in 1..=4u32 {
            for y in [0.5, 1.0, 5.0] {
                let report = derivative_report(&gen, k, y, FD_TOL).unwrap();
                assert_eq!(report.verdict, Verdict::Pass, "{report:?}");
            }
        }
    }

    #[test]
    fn mc_integrates_the_chart_jacobian_to_sphere_area() {
        // J(u) over the chart integrates to the area of S^m; dividing by
        // it makes the integral 1.
        let m = 3usize;
        let ln_area = ((m as f64 + 1.0) / 2.0) * PI.ln() + 2f64.ln()
            - ln_gamma((m as f64 + 1.0) / 2.0);
        let report = mc_normalization(
            |u| Ok(Some(chart_log_jacobian(u) - ln_area)),
            m,
            200_000,
            31,
            0.02,
        )
        .unwrap();
        assert_eq!(report.verdict, Verdict::Pass, "{report:?}");
        assert!(report.standard_error.unwrap() < 0.01);
    }

    #[test]
    fn mc_rejects_degenerate_support() {
        let err = mc_normalization(|_| Ok(None), 2, 10_000, 5, 0.02);
        assert!(matches!(err, Err(Error::OutOfRange(_))));
    }

    #[test]
    fn mc_is_reproducible_for_a_seed() {
        let f = |u: &[f64]| Ok(Some(chart_log_jacobian(u)));
        let a = mc_normalization(f, 2, 50_000, 9, 10.0).unwrap();
        let b = mc_normalization(f, 2, 50_000, 9, 10.0).unwrap();
        assert_eq!(a.computed, b.computed);
        let c = mc_normalization(f, 2, 50_000, 10, 10.0).unwrap();
        assert_ne!(a.computed, c.computed);
    }

    #[test]
    fn truncation_study_finds_stabilization() {
        // Value settles after t = 30.
        let eval = |t: u32| Ok(if t < 30 { t as f64 } else { 30.0 + 1e-9 * t as f64 });
        let study = truncation_study(eval, &[10, 20, 30, 40, 50]).unwrap();
        assert_eq!(study.stabilized_at, Some(30));
        let none = truncation_study(|t| Ok(t as f64), &[10, 20, 30]).unwrap();
        assert_eq!(none.stabilized_at, None);
    }

    #[test]
    fn radial_closed_and_quadrature_agree() {
        let gen = KotzGenerator::new(2.0, 0.5, 5.0).unwrap();
        let report = radial_closed_vs_quadrature(&gen, 8.0, 4, 0.7, 1.3, 1e-8).unwrap();
        assert_eq!(report.verdict, Verdict::Pass, "{report:?}");
    }

    #[test]
    fn reports_judge_against_declared_tolerance() {
        let good = OracleReport::judge("x", 1.0 + 1e-9, 1.0, 1, 1e-8, None);
        assert_eq!(good.verdict, Verdict::Pass);
        let bad = OracleReport::judge("x", 1.1, 1.0, 1, 1e-8, None);
        assert_eq!(bad.verdict, Verdict::Fail);
        assert!(bad.rel_error > 0.09);
    }
}
