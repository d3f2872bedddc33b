use std::fmt;

/// A subset of the traces of a [`TraceSet`](crate::kripke::TraceSet), by index.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TraceSubset {
    universe: usize,
    words: Vec<u64>,
}

impl TraceSubset {
    pub fn empty(universe: usize) -> Self {
        TraceSubset {
            universe,
            words: vec![0; universe.div_ceil(64).max(1)],
        }
    }

    pub fn full(universe: usize) -> Self {
        let mut s = Self::empty(universe);
        for i in 0..universe {
            s.insert(i);
        }
        s
    }

    /// Subset given by the low `universe` bits of `mask` (`universe <= 64`).
    pub fn from_mask(universe: usize, mask: u64) -> Self {
        debug_assert!(universe <= 64);
        let mut s = Self::empty(universe);
        s.words[0] = mask;
        s
    }

    pub fn from_indices(universe: usize, idx: impl IntoIterator<Item = usize>) -> Self {
        let mut s = Self::empty(universe);
        for i in idx {
            s.insert(i);
        }
        s
    }

    pub fn universe(&self) -> usize {
        self.universe
    }

    #[inline]
    pub fn contains(&self, i: usize) -> bool {
        i < self.universe && self.words[i / 64] >> (i % 64) & 1 == 1
    }

    /// Returns `true` if `i` was not present.
    #[inline]
    pub fn insert(&mut self, i: usize) -> bool {
        assert!(i < self.universe, "trace index {i} out of range");
        let w = &mut self.words[i / 64];
        let bit = 1u64 << (i % 64);
        let fresh = *w & bit == 0;
        *w |= bit;
        fresh
    }

    pub fn len(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn is_subset(&self, other: &TraceSubset) -> bool {
        self.words
            .iter()
            .zip(&other.words)
            .all(|(a, b)| a & !b == 0)
    }

    pub fn union(&self, other: &TraceSubset) -> TraceSubset {
        TraceSubset {
            universe: self.universe,
            words: self.words.iter().zip(&other.words).map(|(a, b)| a | b).collect(),
        }
    }

    pub fn difference(&self, other: &TraceSubset) -> TraceSubset {
        TraceSubset {
            universe: self.universe,
            words: self.words.iter().zip(&other.words).map(|(a, b)| a & !b).collect(),
        }
    }

    /// Smallest member `>= from`.
    #[inline]
    pub fn next_from(&self, from: usize) -> Option<usize> {
        if from >= self.universe {
            return None;
        }
        let mut wi = from / 64;
        let mut w = self.words[wi] & (!0u64 << (from % 64));
        loop {
            if w != 0 {
                return Some(wi * 64 + w.trailing_zeros() as usize);
            }
            wi += 1;
            if wi >= self.words.len() {
                return None;
            }
            w = self.words[wi];
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        let mut next = self.next_from(0);
        std::iter::from_fn(move || {
            let cur = next?;
            next = self.next_from(cur + 1);
            Some(cur)
        })
    }

    pub fn to_vec(&self) -> Vec<usize> {
        self.iter().collect()
    }
}

impl fmt::Debug for TraceSubset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

/// All subsets of `{0..n}` as bitmasks: by increasing cardinality, and within one
/// cardinality in increasing numeric order (Gosper's hack).
pub fn masks_by_cardinality(n: usize) -> impl Iterator<Item = u64> {
    assert!(n <= 63);
    let limit = 1u64 << n;
    let mut k = 0usize;
    let mut cur: Option<u64> = Some(0);
    std::iter::from_fn(move || {
        let out = cur?;
        // advance to the next mask with k bits, or to the first mask with k+1 bits
        let next = if out == 0 {
            None
        } else {
            let c = out & out.wrapping_neg();
            let r = out + c;
            let nx = (((r ^ out) >> 2) / c) | r;
            (nx < limit).then_some(nx)
        };
        cur = match next {
            Some(m) => Some(m),
            None => {
                k += 1;
                (k <= n).then(|| (1u64 << k) - 1)
            }
        };
        Some(out)
    })
}
