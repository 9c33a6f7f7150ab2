//! Fixed-length bitsets over instance indices with cached population counts.

const BITS: usize = 64;

/// Set of instance indices of a dataset, stored as a bitset.
///
/// The length is fixed at construction and all bits beyond `len` are kept at
/// zero so that equality, hashing and popcounts can work on whole blocks.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SupportSet {
    blocks: Vec<u64>,
    len: usize,
    count: usize,
}

impl SupportSet {
    /// All-zeros set over `len` instances.
    pub fn empty(len: usize) -> Self {
        SupportSet {
            blocks: vec![0; len.div_ceil(BITS)],
            len,
            count: 0,
        }
    }

    /// All-ones set over `len` instances.
    pub fn full(len: usize) -> Self {
        let mut blocks = vec![!0u64; len.div_ceil(BITS)];
        Self::mask_tail(&mut blocks, len);
        SupportSet {
            blocks,
            len,
            count: len,
        }
    }

    /// Build from a predicate evaluated on every index in `0..len`.
    pub fn from_pred<F: FnMut(usize) -> bool>(len: usize, mut pred: F) -> Self {
        let mut blocks = vec![0u64; len.div_ceil(BITS)];
        let mut count = 0;
        for i in 0..len {
            if pred(i) {
                blocks[i / BITS] |= 1u64 << (i % BITS);
                count += 1;
            }
        }
        SupportSet { blocks, len, count }
    }

    /// Build from explicit member indices (duplicates are harmless).
    pub fn from_indices(len: usize, indices: &[u32]) -> Self {
        let mut set = Self::empty(len);
        for &i in indices {
            let i = i as usize;
            assert!(i < len, "index {i} out of range for length {len}");
            set.blocks[i / BITS] |= 1u64 << (i % BITS);
        }
        set.count = set.blocks.iter().map(|b| b.count_ones() as usize).sum();
        set
    }

    fn mask_tail(blocks: &mut [u64], len: usize) {
        let rem = len % BITS;
        if rem != 0 {
            if let Some(last) = blocks.last_mut() {
                *last &= (1u64 << rem) - 1;
            }
        }
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.count == 0
    }

    /// Number of set bits (cached).
    pub fn count(&self) -> usize {
        self.count
    }

    pub fn contains(&self, i: usize) -> bool {
        i < self.len && self.blocks[i / BITS] >> (i % BITS) & 1 == 1
    }

    /// Intersection with another set of the same length.
    pub fn intersect(&self, other: &SupportSet) -> SupportSet {
        assert_eq!(self.len, other.len, "support sets of different lengths");
        let blocks: Vec<u64> = self
            .blocks
            .iter()
            .zip(&other.blocks)
            .map(|(a, b)| a & b)
            .collect();
        let count = blocks.iter().map(|b| b.count_ones() as usize).sum();
        SupportSet {
            blocks,
            len: self.len,
            count,
        }
    }

    /// True iff every member of `other` is a member of `self`.
    pub fn is_superset_of(&self, other: &SupportSet) -> bool {
        self.len == other.len
            && self
                .blocks
                .iter()
                .zip(&other.blocks)
                .all(|(a, b)| a & b == *b)
    }

    /// True iff `self` ⊋ `other`.
    pub fn is_strict_superset_of(&self, other: &SupportSet) -> bool {
        self.is_superset_of(other) && self.count > other.count
    }

    /// Member indices in ascending order.
    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.blocks.iter().enumerate().flat_map(|(bi, &block)| {
            let mut bits = block;
            std::iter::from_fn(move || {
                if bits == 0 {
                    None
                } else {
                    let tz = bits.trailing_zeros() as usize;
                    bits &= bits - 1;
                    Some(bi * BITS + tz)
                }
            })
        })
    }

    /// Member indices collected into a vector.
    pub fn indices(&self) -> Vec<u32> {
        self.iter().map(|i| i as u32).collect()
    }

    pub(crate) fn blocks(&self) -> &[u64] {
        &self.blocks
    }
}
