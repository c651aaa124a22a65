use serde::Serialize;

/// Topology induced on four distinct taxa: one of the three resolutions
/// `(ij:kl)`, or the unresolved star.
///
/// Resolved quartets are stored canonically: each cherry sorted, and the
/// cherry holding the smallest index first.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum QuartetTopology {
    Resolved {
        cherry1: (usize, usize),
        cherry2: (usize, usize),
    },
    Star([usize; 4]),
}

impl QuartetTopology {
    /// The resolution `(ij:kl)` in canonical form.
    pub fn resolved(i: usize, j: usize, k: usize, l: usize) -> Self {
        let p = (i.min(j), i.max(j));
        let q = (k.min(l), k.max(l));
        let (cherry1, cherry2) = if p <= q { (p, q) } else { (q, p) };
        QuartetTopology::Resolved { cherry1, cherry2 }
    }

    pub fn star(mut taxa: [usize; 4]) -> Self {
        taxa.sort_unstable();
        QuartetTopology::Star(taxa)
    }

    pub fn is_resolved(&self) -> bool {
        matches!(self, QuartetTopology::Resolved { .. })
    }

    /// Sorted taxa of the quartet.
    pub fn taxa(&self) -> [usize; 4] {
        match *self {
            QuartetTopology::Resolved { cherry1, cherry2 } => {
                let mut t = [cherry1.0, cherry1.1, cherry2.0, cherry2.1];
                t.sort_unstable();
                t
            }
            QuartetTopology::Star(t) => t,
        }
    }

    /// The three resolutions of a 4-set, in the order
    /// `(ab:cd), (ac:bd), (ad:bc)` for sorted `a < b < c < d`.
    pub fn resolutions(taxa: [usize; 4]) -> [QuartetTopology; 3] {
        let mut t = taxa;
        t.sort_unstable();
        let [a, b, c, d] = t;
        [
            Self::resolved(a, b, c, d),
            Self::resolved(a, c, b, d),
            Self::resolved(a, d, b, c),
        ]
    }
}

/// Checks that four taxa are pairwise distinct.
pub(crate) fn distinct4(i: usize, j: usize, k: usize, l: usize) -> bool {
    i != j && i != k && i != l && j != k && j != l && k != l
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn canonical_equality() {
        assert_eq!(
            QuartetTopology::resolved(5, 1, 3, 2),
            QuartetTopology::resolved(2, 3, 1, 5)
        );
        assert_ne!(
            QuartetTopology::resolved(0, 1, 2, 3),
            QuartetTopology::resolved(0, 2, 1, 3)
        );
        assert_eq!(QuartetTopology::star([3, 1, 0, 2]).taxa(), [0, 1, 2, 3]);
    }
}
