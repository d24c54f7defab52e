//! Dense binary relations over `0..n`, stored as bit rows.

#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct Relation {
    n: usize,
    rows: Vec<Vec<u64>>,
}

impl Relation {
    pub fn empty(n: usize) -> Self {
        let words = n.div_ceil(64);
        Relation { n, rows: vec![vec![0; words]; n] }
    }

    pub fn identity(n: usize) -> Self {
        let mut r = Self::empty(n);
        for w in 0..n {
            r.insert(w, w);
        }
        r
    }

    pub fn from_pairs<I: IntoIterator<Item = (usize, usize)>>(n: usize, pairs: I) -> Self {
        let mut r = Self::empty(n);
        for (a, b) in pairs {
            r.insert(a, b);
        }
        r
    }

    pub fn size(&self) -> usize {
        self.n
    }

    pub fn contains(&self, a: usize, b: usize) -> bool {
        self.rows[a][b / 64] >> (b % 64) & 1 == 1
    }

    /// Inserts a pair, returning whether it was new.
    pub fn insert(&mut self, a: usize, b: usize) -> bool {
        let word = &mut self.rows[a][b / 64];
        let bit = 1u64 << (b % 64);
        let new = *word & bit == 0;
        *word |= bit;
        new
    }

    pub fn succ(&self, a: usize) -> impl Iterator<Item = usize> + '_ {
        self.rows[a].iter().enumerate().flat_map(|(i, &word)| {
            let mut w = word;
            std::iter::from_fn(move || {
                if w == 0 {
                    return None;
                }
                let t = w.trailing_zeros() as usize;
                w &= w - 1;
                Some(i * 64 + t)
            })
        })
    }

    pub fn pairs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.n).flat_map(move |a| self.succ(a).map(move |b| (a, b)))
    }

    pub fn len(&self) -> usize {
        self.rows.iter().flatten().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.iter().flatten().all(|&w| w == 0)
    }

    /// Whether row `a` is a subset of row `b`.
    pub fn row_subset(&self, a: usize, b: usize) -> bool {
        self.rows[a].iter().zip(&self.rows[b]).all(|(x, y)| x & !y == 0)
    }

    fn or_row_from(&mut self, dst: usize, src: &[u64]) -> bool {
        let mut changed = false;
        for (d, s) in self.rows[dst].iter_mut().zip(src) {
            let nd = *d | s;
            changed |= nd != *d;
            *d = nd;
        }
        changed
    }

    pub fn union(&self, other: &Relation) -> Relation {
        let mut out = self.clone();
        for a in 0..self.n {
            out.or_row_from(a, &other.rows[a]);
        }
        out
    }

    pub fn reflexive_closure(&self) -> Relation {
        let mut out = self.clone();
        for w in 0..self.n {
            out.insert(w, w);
        }
        out
    }

    pub fn transitive_closure(&self) -> Relation {
        let mut out = self.clone();
        for k in 0..self.n {
            let row_k = out.rows[k].clone();
            for i in 0..self.n {
                if out.contains(i, k) {
                    out.or_row_from(i, &row_k);
                }
            }
        }
        out
    }

    pub fn inverse(&self) -> Relation {
        Relation::from_pairs(self.n, self.pairs().map(|(a, b)| (b, a)))
    }

    /// The composition `self ; other`: pairs `(a, c)` with `a self b` and `b other c`.
    pub fn compose(&self, other: &Relation) -> Relation {
        let mut out = Relation::empty(self.n);
        for a in 0..self.n {
            let mut acc = vec![0u64; self.n.div_ceil(64)];
            for b in self.succ(a) {
                for (x, y) in acc.iter_mut().zip(&other.rows[b]) {
                    *x |= y;
                }
            }
            out.rows[a] = acc;
        }
        out
    }

    /// Restriction to the given elements, renumbered in order.
    pub fn restrict(&self, keep: &[usize]) -> Relation {
        let mut out = Relation::empty(keep.len());
        for (i, &a) in keep.iter().enumerate() {
            for (j, &b) in keep.iter().enumerate() {
                if self.contains(a, b) {
                    out.insert(i, j);
                }
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn closures() {
        let r = Relation::from_pairs(4, [(0, 1), (1, 2), (2, 3)]);
        let t = r.transitive_closure();
        assert!(t.contains(0, 3));
        assert!(!t.contains(3, 0));
        assert_eq!(t.len(), 6);
        let rt = t.reflexive_closure();
        assert_eq!(rt.len(), 10);
        assert_eq!(r.succ(1).collect::<Vec<_>>(), vec![2]);
        let c = r.compose(&r);
        assert_eq!(c.pairs().collect::<Vec<_>>(), vec![(0, 2), (1, 3)]);
    }

    #[test]
    fn wide_rows() {
        let mut r = Relation::empty(130);
        r.insert(0, 129);
        r.insert(0, 64);
        assert_eq!(r.succ(0).collect::<Vec<_>>(), vec![64, 129]);
        assert!(r.contains(0, 129));
        assert!(!r.contains(129, 0));
    }
}
