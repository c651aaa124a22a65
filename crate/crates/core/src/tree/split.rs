use std::collections::BTreeSet;
use std::fmt;

/// Fixed-universe bitset over taxon indices `0..n`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TaxonSet {
    n: usize,
    words: Vec<u64>,
}

impl TaxonSet {
    pub fn empty(n: usize) -> Self {
        TaxonSet {
            n,
            words: vec![0; n.div_ceil(64)],
        }
    }

    pub fn from_indices(n: usize, indices: impl IntoIterator<Item = usize>) -> Self {
        let mut s = Self::empty(n);
        for i in indices {
            s.insert(i);
        }
        s
    }

    /// Size of the universe, not the number of members.
    pub fn universe(&self) -> usize {
        self.n
    }

    pub fn insert(&mut self, i: usize) {
        assert!(i < self.n, "taxon {i} outside universe of {}", self.n);
        self.words[i / 64] |= 1 << (i % 64);
    }

    pub fn contains(&self, i: usize) -> bool {
        i < self.n && self.words[i / 64] & (1 << (i % 64)) != 0
    }

    pub fn len(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn union_with(&mut self, other: &TaxonSet) {
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a |= b;
        }
    }

    pub fn complement(&self) -> Self {
        let mut out = self.clone();
        for w in out.words.iter_mut() {
            *w = !*w;
        }
        let tail = self.n % 64;
        if tail != 0 {
            if let Some(last) = out.words.last_mut() {
                *last &= (1u64 << tail) - 1;
            }
        }
        out
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.n).filter(move |&i| self.contains(i))
    }
}

impl fmt::Debug for TaxonSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

/// A bipartition `A|B` of the taxa, stored with the side containing taxon 0
/// as `A`, so two splits are equal exactly when they describe the same
/// bipartition.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Split {
    side_a: TaxonSet,
}

impl Split {
    /// Builds the split with `side` on one side. Either side may be given.
    ///
    /// Returns `None` if one side would be empty.
    pub fn new(side: TaxonSet) -> Option<Self> {
        let len = side.len();
        if len == 0 || len == side.universe() {
            return None;
        }
        let side_a = if side.contains(0) {
            side
        } else {
            side.complement()
        };
        Some(Split { side_a })
    }

    pub fn from_side(n: usize, side: impl IntoIterator<Item = usize>) -> Option<Self> {
        Self::new(TaxonSet::from_indices(n, side))
    }

    pub fn side_a(&self) -> &TaxonSet {
        &self.side_a
    }

    pub fn side_b(&self) -> TaxonSet {
        self.side_a.complement()
    }

    pub fn n_taxa(&self) -> usize {
        self.side_a.universe()
    }

    /// True when `i` and `j` lie on the same side.
    pub fn same_side(&self, i: usize, j: usize) -> bool {
        self.side_a.contains(i) == self.side_a.contains(j)
    }

    /// Smaller side size.
    pub fn minor_size(&self) -> usize {
        let a = self.side_a.len();
        a.min(self.n_taxa() - a)
    }

    pub fn is_trivial(&self) -> bool {
        self.minor_size() == 1
    }

    /// Maps each taxon index through `perm` (old index -> new index).
    pub fn relabel(&self, perm: &[usize]) -> Split {
        let n = self.n_taxa();
        Split::from_side(n, self.side_a.iter().map(|i| perm[i]))
            .expect("relabelling preserves non-emptiness")
    }
}

impl fmt::Debug for Split {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}|{:?}", self.side_a, self.side_b())
    }
}

/// Size of the symmetric difference of two split sets.
pub fn symmetric_difference(a: &BTreeSet<Split>, b: &BTreeSet<Split>) -> usize {
    a.symmetric_difference(b).count()
}
