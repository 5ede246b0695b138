/// Fixed-width set of transaction indices, one bit per transaction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) struct TidSet {
    words: Vec<u64>,
}

impl TidSet {
    pub fn empty(len: usize) -> Self {
        TidSet {
            words: vec![0; len.div_ceil(64)],
        }
    }

    pub fn insert(&mut self, idx: usize) {
        self.words[idx / 64] |= 1 << (idx % 64);
    }

    pub fn count(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn intersect(&self, other: &TidSet) -> TidSet {
        TidSet {
            words: self.words.iter().zip(&other.words).map(|(a, b)| a & b).collect(),
        }
    }

    /// Size of the intersection without materializing it.
    pub fn intersect_count(&self, other: &TidSet) -> usize {
        self.words
            .iter()
            .zip(&other.words)
            .map(|(a, b)| (a & b).count_ones() as usize)
            .sum()
    }
}
