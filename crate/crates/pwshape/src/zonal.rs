//! Zonal polynomials of a symmetric matrix argument.
//!
//! `C_kappa(X)` is evaluated through its expansion in monomial symmetric
//! functions of the eigenvalues,
//! `C_kappa = sum_{lambda <= kappa} z_{kappa,lambda} m_lambda`,
//! with coefficients obtained from the classical recurrence on the
//! dominance order: for `lambda < kappa`,
//!
//! ```text
//! z_{kappa,lambda} = [ sum_{(i,j,r)} ((lambda_i + r) - (lambda_j - r)) z_{kappa,mu} ]
//!                    / (rho_kappa - rho_lambda),
//! rho_nu = sum_i nu_i (nu_i - i),
//! ```
//!
//! where `mu` runs over partitions obtained from `lambda` by moving `r`
//! units from part `j` up to part `i` (re-sorted), restricted to
//! `lambda < mu <= kappa`. The diagonal seed is chosen so that the
//! normalization satisfies `sum_{kappa |- t} C_kappa(X) = (tr X)^t`:
//! `z_{kappa,kappa} = 2^t t! / prod_s (2 a(s) + l(s) + 2)` over the boxes
//! `s` of `kappa` with arm and leg lengths `a`, `l`.
//!
//! Coefficient tables depend only on the degree and the maximum
//! partition length, so they are built once ([`ZonalBasis::build`]) and
//! shared immutably afterwards.

use crate::partition::{partitions, Partition};
use crate::special::ln_factorial;
use std::collections::HashMap;

/// Monomial-expansion coefficients for every partition of one degree.
#[derive(Debug, Clone)]
pub struct DegreeTable {
    parts: Vec<Partition>,
    /// `rows[k][l]` = coefficient of `m_{parts[l]}` in `C_{parts[k]}`.
    rows: Vec<Vec<f64>>,
}

impl DegreeTable {
    fn build(t: u32, max_len: usize) -> Self {
        let parts = partitions(t, max_len);
        let n = parts.len();
        let index: HashMap<&[u32], usize> = parts
            .iter()
            .enumerate()
            .map(|(i, p)| (p.parts(), i))
            .collect();
        let rho: Vec<f64> = parts
            .iter()
            .map(|p| {
                p.parts()
                    .iter()
                    .enumerate()
                    .map(|(i, &pi)| pi as f64 * (pi as f64 - (i as f64 + 1.0)))
                    .sum()
            })
            .collect();

        let mut rows = vec![Vec::new(); n];
        for k in 0..n {
            let kappa = &parts[k];
            let mut row = vec![0.0; n];
            row[k] = diagonal_seed(t, kappa);
            // Reverse-lex order extends dominance, so every mu > lambda
            // needed below is already filled when lambda is reached.
            for l in (k + 1)..n {
                let lambda = &parts[l];
                if !kappa.dominates(lambda) {
                    continue;
                }
                let lp = lambda.parts();
                let mut sum = 0.0;
                let mut scratch: Vec<u32> = Vec::with_capacity(lp.len());
                for i in 0..lp.len() {
                    for j in (i + 1)..lp.len() {
                        for r in 1..=lp[j] {
                            let hi = lp[i] + r;
                            let lo = lp[j] - r;
                            scratch.clear();
                            scratch.extend_from_slice(lp);
                            scratch[i] = hi;
                            scratch[j] = lo;
                            scratch.sort_unstable_by(|a, b| b.cmp(a));
                            while scratch.last() == Some(&0) {
                                scratch.pop();
                            }
                            if let Some(&mu_idx) = index.get(scratch.as_slice()) {
                                if kappa.dominates(&parts[mu_idx]) {
                                    sum += (hi as f64 - lo as f64) * row[mu_idx];
                                }
                            }
                        }
                    }
                }
                row[l] = sum / (rho[k] - rho[l]);
            }
            rows[k] = row;
        }
        Self { parts, rows }
    }

    /// Partitions of this degree, reverse-lexicographic.
    pub fn partitions(&self) -> &[Partition] {
        &self.parts
    }

    /// Evaluate every `C_kappa` of this degree at the (pre-scaled)
    /// eigenvalues, using `pows[v][e] = x_v^e`. Values are returned in
    /// partition order.
    pub fn eval_all(&self, pows: &[Vec<f64>]) -> Vec<f64> {
        let monomials: Vec<f64> = self
            .parts
            .iter()
            .map(|p| monomial_sym(p.parts(), pows))
            .collect();
        self.rows
            .iter()
            .map(|row| {
                row.iter()
                    .zip(&monomials)
                    .map(|(&z, &m)| z * m)
                    .sum::<f64>()
            })
            .collect()
    }

    /// Evaluate a single `C_kappa` (index into [`Self::partitions`]).
    pub fn eval_one(&self, k: usize, pows: &[Vec<f64>]) -> f64 {
        self.rows[k]
            .iter()
            .enumerate()
            .filter(|(_, &z)| z != 0.0)
            .map(|(l, &z)| z * monomial_sym(self.parts[l].parts(), pows))
            .sum()
    }
}

/// `2^t t! / prod_s (2 a(s) + l(s) + 2)`, the coefficient of
/// `m_kappa` in `C_kappa`, computed in log space to survive large `t`.
fn diagonal_seed(t: u32, kappa: &Partition) -> f64 {
    let p = kappa.parts();
    let mut ln_hooks = 0.0;
    for (i, &pi) in p.iter().enumerate() {
        for j in 1..=pi {
            let arm = (pi - j) as f64;
            // leg: number of rows below i whose length reaches column j
            let leg = p[(i + 1)..].iter().filter(|&&q| q >= j).count() as f64;
            ln_hooks += (2.0 * arm + leg + 2.0).ln();
        }
    }
    (t as f64 * std::f64::consts::LN_2 + ln_factorial(t) - ln_hooks).exp()
}

/// Monomial symmetric function `m_lambda(x_1..x_L)` from precomputed
/// powers; zero when `lambda` has more parts than variables.
fn monomial_sym(lambda: &[u32], pows: &[Vec<f64>]) -> f64 {
    let nvars = pows.len();
    if lambda.is_empty() {
        return 1.0;
    }
    if lambda.len() > nvars {
        return 0.0;
    }
    match nvars {
        1 => pows[0][lambda[0] as usize],
        2 => {
            let a = lambda[0] as usize;
            let b = lambda.get(1).copied().unwrap_or(0) as usize;
            if a == b {
                pows[0][a] * pows[1][b]
            } else {
                pows[0][a] * pows[1][b] + pows[0][b] * pows[1][a]
            }
        }
        _ => {
            let mut padded: Vec<u32> = lambda.to_vec();
            padded.resize(nvars, 0);
            let mut sum = 0.0;
            for_each_unique_permutation(&mut padded, 0, &mut |perm| {
                let mut prod = 1.0;
                for (v, &e) in perm.iter().enumerate() {
                    prod *= pows[v][e as usize];
                }
                sum += prod;
            });
            sum
        }
    }
}

/// Visit every distinct permutation of `items[start..]` in place.
fn for_each_unique_permutation(items: &mut [u32], start: usize, f: &mut impl FnMut(&[u32])) {
    if start == items.len() {
        f(items);
        return;
    }
    let mut seen: Vec<u32> = Vec::new();
    for i in start..items.len() {
        if seen.contains(&items[i]) {
            continue;
        }
        seen.push(items[i]);
        items.swap(start, i);
        for_each_unique_permutation(items, start + 1, f);
        items.swap(start, i);
    }
}

/// Immutable store of [`DegreeTable`]s for degrees `0..=t_max`, shared
/// across series evaluations.
#[derive(Debug, Clone)]
pub struct ZonalBasis {
    max_len: usize,
    degrees: Vec<DegreeTable>,
}

impl ZonalBasis {
    /// Build coefficient tables for all degrees up to `t_max`, with
    /// partition length capped at `max_len` (the rank of the intended
    /// matrix arguments).
    pub fn build(max_len: usize, t_max: u32) -> Self {
        let degrees = (0..=t_max)
            .map(|t| DegreeTable::build(t, max_len))
            .collect();
        Self { max_len, degrees }
    }

    /// Length cap the basis was built with.
    pub fn max_len(&self) -> usize {
        self.max_len
    }

    /// Largest degree available.
    pub fn max_degree(&self) -> u32 {
        (self.degrees.len() - 1) as u32
    }

    /// Table for degree `t`.
    ///
    /// # Panics
    /// Panics if `t` exceeds [`Self::max_degree`].
    pub fn degree(&self, t: u32) -> &DegreeTable {
        &self.degrees[t as usize]
    }
}

/// Power table `pows[v][e] = x_v^e`, `e <= t`, with the eigenvalues
/// scaled by `1/scale` for overflow control. Returns `(pows, ln scale)`;
/// callers restore `C_kappa(X) = C_kappa(X/scale) * scale^t` in log
/// space. A zero matrix yields `scale = 1`.
pub fn scaled_power_table(eigenvalues: &[f64], t_max: u32) -> (Vec<Vec<f64>>, f64) {
    let scale = eigenvalues
        .iter()
        .fold(0.0f64, |acc, &x| acc.max(x.abs()))
        .max(f64::MIN_POSITIVE);
    let scale = if scale > f64::MIN_POSITIVE { scale } else { 1.0 };
    let pows = eigenvalues
        .iter()
        .map(|&x| {
            let xs = x / scale;
            let mut col = Vec::with_capacity(t_max as usize + 1);
            let mut acc = 1.0;
            for _ in 0..=t_max {
                col.push(acc);
                acc *= xs;
            }
            col
        })
        .collect();
    (pows, scale.ln())
}

/// One-shot zonal polynomial `C_kappa(X)` at the given eigenvalues.
///
/// Exactly zero when `kappa` has more parts than `X` has nonzero
/// eigenvalues. For repeated evaluation across degrees use
/// [`ZonalBasis`] directly.
pub fn zonal(kappa: &Partition, eigenvalues: &[f64]) -> f64 {
    let t = kappa.weight();
    if t == 0 {
        return 1.0;
    }
    if kappa.len() > eigenvalues.len() {
        return 0.0;
    }
    let table = DegreeTable::build(t, eigenvalues.len().min(t as usize));
    let (pows, ln_scale) = scaled_power_table(eigenvalues, t);
    let k = table
        .partitions()
        .iter()
        .position(|p| p == kappa)
        .expect("kappa is a partition of t with admissible length");
    table.eval_one(k, &pows) * (t as f64 * ln_scale).exp()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    const TOL: f64 = 1e-12;

    #[test]
    fn degree_one_is_the_trace() {
        let eigs = [0.7, 2.1, -0.3];
        assert_relative_eq!(
            zonal(&Partition::new(vec![1]), &eigs),
            eigs.iter().sum::<f64>(),
            max_relative = TOL
        );
    }

    #[test]
    fn degree_two_closed_forms() {
        // C_(2) = ((tr X)^2 + 2 tr X^2)/3, C_(1,1) = 2((tr X)^2 - tr X^2)/3
        let eigs = [1.0f64, 1.0];
        assert_relative_eq!(
            zonal(&Partition::new(vec![2]), &eigs),
            8.0 / 3.0,
            max_relative = TOL
        );
        assert_relative_eq!(
            zonal(&Partition::new(vec![1, 1]), &eigs),
            4.0 / 3.0,
            max_relative = TOL
        );
        let eigs = [0.4f64, -1.7];
        let tr = eigs[0] + eigs[1];
        let tr2 = eigs[0] * eigs[0] + eigs[1] * eigs[1];
        assert_relative_eq!(
            zonal(&Partition::new(vec![2]), &eigs),
            (tr * tr + 2.0 * tr2) / 3.0,
            max_relative = TOL
        );
        assert_relative_eq!(
            zonal(&Partition::new(vec![1, 1]), &eigs),
            2.0 * (tr * tr - tr2) / 3.0,
            max_relative = TOL
        );
    }

    #[test]
    fn rank_deficiency_kills_long_partitions() {
        let eigs = [1.3, 0.0];
        assert_eq!(zonal(&Partition::new(vec![1, 1]), &eigs), 0.0);
        assert_eq!(zonal(&Partition::new(vec![2, 1]), &[0.5]), 0.0);
    }

    #[test]
    fn sum_identity_small_degrees() {
        // sum over kappa |- t of C_kappa(X) = (tr X)^t
        let eigs = [0.9, 0.35, 1.6];
        for t in 0..=6u32 {
            let table = DegreeTable::build(t, eigs.len().min(t.max(1) as usize));
            let (pows, ln_scale) = scaled_power_table(&eigs, t);
            let total: f64 = table.eval_all(&pows).iter().sum();
            let total = total * (t as f64 * ln_scale).exp();
            let tr: f64 = eigs.iter().sum();
            assert_relative_eq!(total, tr.powi(t as i32), max_relative = 1e-11);
        }
    }

    #[test]
    fn unique_permutations_cover_multisets() {
        let mut items = vec![2u32, 1, 1, 0];
        let mut count = 0;
        for_each_unique_permutation(&mut items, 0, &mut |_| count += 1);
        // 4!/ (2! 1! 1!) = 12
        assert_eq!(count, 12);
    }
}
