//! Integer partitions.
//!
//! Zonal polynomial series are indexed by partitions `kappa` of the
//! series degree `t`, restricted to at most `max_len` parts (the rank of
//! the matrix argument). Enumeration order is reverse-lexicographic —
//! `(4) > (3,1) > (2,2) > (2,1,1) > (1,1,1,1)` — which is a linear
//! extension of the dominance order, the order required by the zonal
//! coefficient recurrence.

/// A partition of a nonnegative integer: a nonincreasing list of
/// positive parts. The empty partition is the unique partition of 0.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Partition {
    parts: Vec<u32>,
}

impl Partition {
    /// Build from a list of parts, which must be nonincreasing and
    /// positive.
    ///
    /// # Panics
    /// Panics if the parts are not a valid partition; partitions are
    /// produced programmatically, so a violation is a caller bug.
    pub fn new(parts: Vec<u32>) -> Self {
        assert!(
            parts.windows(2).all(|w| w[0] >= w[1]),
            "partition parts must be nonincreasing: {parts:?}"
        );
        assert!(
            parts.iter().all(|&p| p > 0),
            "partition parts must be positive: {parts:?}"
        );
        Self { parts }
    }

    /// The empty partition of 0.
    pub fn empty() -> Self {
        Self { parts: Vec::new() }
    }

    /// The parts, largest first.
    pub fn parts(&self) -> &[u32] {
        &self.parts
    }

    /// Number of (positive) parts.
    pub fn len(&self) -> usize {
        self.parts.len()
    }

    /// True for the empty partition.
    pub fn is_empty(&self) -> bool {
        self.parts.is_empty()
    }

    /// Sum of the parts.
    pub fn weight(&self) -> u32 {
        self.parts.iter().sum()
    }

    /// Part `i` (0-based), zero beyond the length.
    pub fn part(&self, i: usize) -> u32 {
        self.parts.get(i).copied().unwrap_or(0)
    }

    /// True if `self` dominates `other` (same weight assumed): every
    /// prefix sum of `self` is >= the corresponding prefix sum of
    /// `other`.
    pub fn dominates(&self, other: &Partition) -> bool {
        let mut acc_s = 0u32;
        let mut acc_o = 0u32;
        for i in 0..self.parts.len().max(other.parts.len()) {
            acc_s += self.part(i);
            acc_o += other.part(i);
            if acc_s < acc_o {
                return false;
            }
        }
        true
    }
}

impl std::fmt::Display for Partition {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "(")?;
        for (i, p) in self.parts.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{p}")?;
        }
        write!(f, ")")
    }
}

/// All partitions of `t` with at most `max_len` parts, in
/// reverse-lexicographic (descending) order.
///
/// `partitions(0, k)` is the single empty partition for any `k`;
/// `partitions(t, 0)` is empty for `t > 0`.
pub fn partitions(t: u32, max_len: usize) -> Vec<Partition> {
    let mut out = Vec::new();
    let mut prefix = Vec::new();
    descend(t, t, max_len, &mut prefix, &mut out);
    out
}

fn descend(rest: u32, max_part: u32, slots: usize, prefix: &mut Vec<u32>, out: &mut Vec<Partition>) {
    if rest == 0 {
        out.push(Partition {
            parts: prefix.clone(),
        });
        return;
    }
    if slots == 0 {
        return;
    }
    // Largest feasible first part down to the smallest that still lets
    // the remaining slots absorb the rest.
    let hi = rest.min(max_part);
    let lo = rest.div_ceil(slots as u32);
    let mut p = hi;
    while p >= lo {
        prefix.push(p);
        descend(rest - p, p, slots - 1, prefix, out);
        prefix.pop();
        if p == 0 {
            break;
        }
        p -= 1;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reverse_lex_enumeration() {
        let got: Vec<Vec<u32>> = partitions(4, 4)
            .into_iter()
            .map(|p| p.parts().to_vec())
            .collect();
        assert_eq!(
            got,
            vec![
                vec![4],
                vec![3, 1],
                vec![2, 2],
                vec![2, 1, 1],
                vec![1, 1, 1, 1]
            ]
        );
    }

    #[test]
    fn length_restriction() {
        let got: Vec<Vec<u32>> = partitions(3, 2)
            .into_iter()
            .map(|p| p.parts().to_vec())
            .collect();
        assert_eq!(got, vec![vec![3], vec![2, 1]]);
    }

    #[test]
    fn degenerate_cases() {
        assert_eq!(partitions(0, 3), vec![Partition::empty()]);
        assert!(partitions(5, 0).is_empty());
    }

    #[test]
    fn dominance() {
        let a = Partition::new(vec![4, 1, 1]);
        let b = Partition::new(vec![3, 3]);
        assert!(!a.dominates(&b));
        assert!(!b.dominates(&a));
        let c = Partition::new(vec![3, 2, 1]);
        let d = Partition::new(vec![2, 2, 2]);
        assert!(c.dominates(&d));
        assert!(c.dominates(&c));
    }
}
