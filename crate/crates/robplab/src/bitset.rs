//! A small fixed-capacity bit set used for variable and vertex sets.

/// Set of small non-negative integers (variable or vertex ids) backed by
/// 64-bit words. The capacity is fixed at construction; binary operations
/// expect both operands to share it.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct VarSet {
    words: Vec<u64>,
}

impl VarSet {
    pub fn with_capacity(n: u32) -> Self {
        VarSet {
            words: vec![0; (n as usize).div_ceil(64)],
        }
    }

    pub fn insert(&mut self, x: u32) {
        self.words[x as usize / 64] |= 1u64 << (x % 64);
    }

    pub fn remove(&mut self, x: u32) {
        self.words[x as usize / 64] &= !(1u64 << (x % 64));
    }

    pub fn contains(&self, x: u32) -> bool {
        self.words
            .get(x as usize / 64)
            .is_some_and(|w| w >> (x % 64) & 1 == 1)
    }

    pub fn len(&self) -> u32 {
        self.words.iter().map(|w| w.count_ones()).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn union_with(&mut self, other: &VarSet) {
        debug_assert_eq!(self.words.len(), other.words.len());
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a |= b;
        }
    }

    pub fn intersect_with(&mut self, other: &VarSet) {
        debug_assert_eq!(self.words.len(), other.words.len());
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a &= b;
        }
    }

    pub fn is_subset_of(&self, other: &VarSet) -> bool {
        self.words
            .iter()
            .zip(&other.words)
            .all(|(a, b)| a & !b == 0)
    }

    pub fn intersects(&self, other: &VarSet) -> bool {
        self.words.iter().zip(&other.words).any(|(a, b)| a & b != 0)
    }

    /// Elements in ascending order.
    pub fn iter(&self) -> impl Iterator<Item = u32> + '_ {
        self.words.iter().enumerate().flat_map(|(i, &w)| {
            let mut w = w;
            std::iter::from_fn(move || {
                if w == 0 {
                    None
                } else {
                    let b = w.trailing_zeros();
                    w &= w - 1;
                    Some(i as u32 * 64 + b)
                }
            })
        })
    }

    pub fn to_vec(&self) -> Vec<u32> {
        self.iter().collect()
    }

    pub fn from_slice(n: u32, xs: &[u32]) -> Self {
        let mut s = VarSet::with_capacity(n);
        for &x in xs {
            s.insert(x);
        }
        s
    }
}

impl std::fmt::Debug for VarSet {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}
