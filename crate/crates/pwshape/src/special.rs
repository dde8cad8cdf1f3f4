//! Scalar special functions for the zonal series machinery.
//!
//! Gamma-family evaluations delegate to `statrs`; this module adds the
//! partition-indexed (generalized) Pochhammer symbol and the
//! multivariate gamma function, in both linear and log form.

use crate::error::Error;
use crate::partition::Partition;
use crate::slv::SignedLogValue;
use crate::Result;
use statrs::function::gamma::{gamma, ln_gamma};

/// Natural log of `t!`.
pub fn ln_factorial(t: u32) -> f64 {
    ln_gamma(t as f64 + 1.0)
}

/// Generalized Pochhammer symbol
/// `(a)_kappa = prod_j (a - (j-1)/2)_{kappa_j}`,
/// where `(x)_k = x (x+1) ... (x+k-1)` is the rising factorial.
///
/// `(a)_{()} = 1` for every `a`; for a single-part partition this is the
/// ordinary rising factorial.
pub fn gen_pochhammer(a: f64, kappa: &Partition) -> f64 {
    let mut prod = 1.0;
    for (j, &kj) in kappa.parts().iter().enumerate() {
        let base = a - j as f64 / 2.0;
        for i in 0..kj {
            prod *= base + i as f64;
        }
    }
    prod
}

/// [`gen_pochhammer`] in signed log space, for partitions too heavy for
/// linear `f64`.
pub fn gen_pochhammer_slv(a: f64, kappa: &Partition) -> SignedLogValue {
    let mut acc = SignedLogValue::ONE;
    for (j, &kj) in kappa.parts().iter().enumerate() {
        let base = a - j as f64 / 2.0;
        for i in 0..kj {
            acc *= SignedLogValue::from_f64(base + i as f64);
            if acc.is_zero() {
                return acc;
            }
        }
    }
    acc
}

/// Multivariate gamma function
/// `Gamma_n(a) = pi^{n(n-1)/4} prod_{j=1}^{n} Gamma(a - (j-1)/2)`.
///
/// Errors with [`Error::GammaPole`] if any gamma factor sits at a
/// nonpositive integer.
pub fn mv_gamma(n: usize, a: f64) -> Result<f64> {
    check_poles(n, a)?;
    let mut prod = std::f64::consts::PI.powf(n as f64 * (n as f64 - 1.0) / 4.0);
    for j in 1..=n {
        prod *= gamma(a - (j as f64 - 1.0) / 2.0);
    }
    Ok(prod)
}

/// `ln Gamma_n(a)` for the positive-argument regime
/// (`a > (n-1)/2`). Outside it the multivariate gamma can be negative,
/// so the log form refuses with [`Error::OutOfRange`].
pub fn mv_gamma_ln(n: usize, a: f64) -> Result<f64> {
    check_poles(n, a)?;
    if n > 0 && a <= (n as f64 - 1.0) / 2.0 {
        return Err(Error::OutOfRange(format!(
            "ln Gamma_{n}({a}) needs a > (n-1)/2"
        )));
    }
    let mut sum = (n as f64 * (n as f64 - 1.0) / 4.0) * std::f64::consts::PI.ln();
    for j in 1..=n {
        sum += ln_gamma(a - (j as f64 - 1.0) / 2.0);
    }
    Ok(sum)
}

fn check_poles(n: usize, a: f64) -> Result<()> {
    for j in 1..=n {
        let arg = a - (j as f64 - 1.0) / 2.0;
        if arg <= 0.0 && arg == arg.floor() {
            return Err(Error::GammaPole { n, a });
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use std::f64::consts::PI;

    const TOL: f64 = 1e-13;

    #[test]
    fn pochhammer_examples() {
        assert_relative_eq!(gen_pochhammer(2.7, &Partition::empty()), 1.0);
        // (1)_{(1,1)} = (1)_1 * (1/2)_1 = 1/2
        assert_relative_eq!(
            gen_pochhammer(1.0, &Partition::new(vec![1, 1])),
            0.5,
            max_relative = TOL
        );
        // single part reduces to the scalar rising factorial
        assert_relative_eq!(
            gen_pochhammer(1.5, &Partition::new(vec![4])),
            1.5 * 2.5 * 3.5 * 4.5,
            max_relative = TOL
        );
    }

    #[test]
    fn pochhammer_log_form_matches_linear() {
        let kappa = Partition::new(vec![3, 2, 1]);
        for &a in &[0.3, 1.0, 2.5, -0.7] {
            let lin = gen_pochhammer(a, &kappa);
            let log = gen_pochhammer_slv(a, &kappa);
            assert_relative_eq!(log.to_f64(), lin, max_relative = 1e-12);
        }
        // (1)_{(1,1,1)} contains the factor (1 - 1) = 0
        assert!(gen_pochhammer_slv(1.0, &Partition::new(vec![1, 1, 1])).is_zero());
        assert_eq!(gen_pochhammer(1.0, &Partition::new(vec![1, 1, 1])), 0.0);
    }

    #[test]
    fn mv_gamma_examples() {
        assert_relative_eq!(mv_gamma(1, 2.5).unwrap(), gamma(2.5), max_relative = TOL);
        // Gamma_2(3/2) = pi^{1/2} Gamma(3/2) Gamma(1) = pi/2
        assert_relative_eq!(mv_gamma(2, 1.5).unwrap(), PI / 2.0, max_relative = TOL);
        assert_relative_eq!(
            mv_gamma_ln(2, 1.5).unwrap(),
            (PI / 2.0).ln(),
            max_relative = TOL
        );
    }

    #[test]
    fn mv_gamma_pole_detection() {
        assert!(matches!(
            mv_gamma(2, 0.5),
            Err(Error::GammaPole { n: 2, a }) if a == 0.5
        ));
        assert!(mv_gamma(1, -3.0).is_err());
        // negative non-integer arguments are finite in the linear form
        assert!(mv_gamma(1, -0.5).unwrap().is_finite());
    }
}
