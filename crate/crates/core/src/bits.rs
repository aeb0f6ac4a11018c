//! Fixed-length bit strings backed by 64-bit words.
//!
//! All reachability indices pack sets of exploded vertices into these
//! strings so that set union is a word-wise OR and emptiness of an
//! intersection is a word-wise AND scan. The shifted variants support the
//! "append a fresh low-order segment, then OR parent data above it" step of
//! the ancestor pass and the "align a subtree range" step of the descendant
//! pass without materializing intermediate strings.

pub const WORD_BITS: usize = 64;

/// A bit string of fixed length, little-endian within and across words:
/// bit `i` lives in word `i / 64` at position `i % 64`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BitString {
    len: usize,
    words: Vec<u64>,
}

impl BitString {
    pub fn new(len: usize) -> Self {
        BitString {
            len,
            words: vec![0; len.div_ceil(WORD_BITS)],
        }
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn words(&self) -> &[u64] {
        &self.words
    }

    pub fn from_words(len: usize, words: Vec<u64>) -> Self {
        assert_eq!(words.len(), len.div_ceil(WORD_BITS));
        let mut s = BitString { len, words };
        s.clear_tail();
        s
    }

    pub fn set(&mut self, i: usize) {
        debug_assert!(i < self.len);
        self.words[i / WORD_BITS] |= 1u64 << (i % WORD_BITS);
    }

    pub fn clear(&mut self, i: usize) {
        debug_assert!(i < self.len);
        self.words[i / WORD_BITS] &= !(1u64 << (i % WORD_BITS));
    }

    pub fn get(&self, i: usize) -> bool {
        debug_assert!(i < self.len);
        self.words[i / WORD_BITS] >> (i % WORD_BITS) & 1 != 0
    }

    pub fn any(&self) -> bool {
        self.words.iter().any(|&w| w != 0)
    }

    /// Reads the 64 bits starting at bit offset `off` (may straddle a word
    /// boundary; bits past the end read as zero).
    #[inline]
    fn read_word(&self, off: usize) -> u64 {
        let w = off / WORD_BITS;
        let s = off % WORD_BITS;
        if w >= self.words.len() {
            return 0;
        }
        let lo = self.words[w] >> s;
        if s == 0 || w + 1 >= self.words.len() {
            lo
        } else {
            lo | self.words[w + 1] << (WORD_BITS - s)
        }
    }

    fn clear_tail(&mut self) {
        let tail = self.len % WORD_BITS;
        if tail != 0 {
            if let Some(last) = self.words.last_mut() {
                *last &= (1u64 << tail) - 1;
            }
        }
    }

    /// `self |= other`, which must have the same length.
    pub fn or_assign(&mut self, other: &BitString) {
        debug_assert_eq!(self.len, other.len);
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a |= b;
        }
    }

    /// `self &= !other`, which must have the same length.
    pub fn and_not_assign(&mut self, other: &BitString) {
        debug_assert_eq!(self.len, other.len);
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a &= !b;
        }
    }

    /// `self |= other << shift`; bits shifted past `self.len` are dropped.
    pub fn or_shifted(&mut self, other: &BitString, shift: usize) {
        self.or_range(other, 0, shift, other.len);
    }

    /// ORs `count` bits of `src` starting at `src_off` into `self` starting
    /// at `dst_off`. Bits that would land past `self.len` are dropped.
    pub fn or_range(&mut self, src: &BitString, src_off: usize, dst_off: usize, count: usize) {
        if count == 0 || dst_off >= self.len {
            return;
        }
        let count = count.min(self.len - dst_off);
        let s = dst_off % WORD_BITS;
        let mut dw = dst_off / WORD_BITS;
        let mut remaining = count;
        let mut pos = src_off;
        // First partial destination word.
        if s != 0 {
            let take = remaining.min(WORD_BITS - s);
            let mask = if take == WORD_BITS { !0 } else { (1u64 << take) - 1 };
            self.words[dw] |= (src.read_word(pos) & mask) << s;
            pos += take;
            remaining -= take;
            dw += 1;
        }
        while remaining >= WORD_BITS {
            self.words[dw] |= src.read_word(pos);
            pos += WORD_BITS;
            remaining -= WORD_BITS;
            dw += 1;
        }
        if remaining > 0 {
            self.words[dw] |= src.read_word(pos) & ((1u64 << remaining) - 1);
        }
        self.clear_tail();
    }

    /// Whether `self[a_off..a_off+count] AND other[b_off..b_off+count]` is
    /// nonzero, without materializing either slice.
    pub fn range_and_nonzero(&self, a_off: usize, other: &BitString, b_off: usize, count: usize) -> bool {
        let mut done = 0;
        while done < count {
            let take = (count - done).min(WORD_BITS);
            let mask = if take == WORD_BITS { !0 } else { (1u64 << take) - 1 };
            if self.read_word(a_off + done) & other.read_word(b_off + done) & mask != 0 {
                return true;
            }
            done += take;
        }
        false
    }

    /// As `range_and_nonzero`, but scanning only word indices
    /// `word_lo..word_hi` of the slice (for partitioning one AND scan
    /// across workers).
    pub fn range_and_nonzero_words(
        &self,
        a_off: usize,
        other: &BitString,
        b_off: usize,
        count: usize,
        word_lo: usize,
        word_hi: usize,
    ) -> bool {
        let mut done = word_lo * WORD_BITS;
        let end = count.min(word_hi * WORD_BITS);
        while done < end {
            let take = (end - done).min(WORD_BITS);
            let mask = if take == WORD_BITS { !0 } else { (1u64 << take) - 1 };
            if self.read_word(a_off + done) & other.read_word(b_off + done) & mask != 0 {
                return true;
            }
            done += take;
        }
        false
    }

    /// Indices of all set bits, in increasing order.
    pub fn iter_ones(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(wi, &w)| {
            let mut w = w;
            std::iter::from_fn(move || {
                if w == 0 {
                    None
                } else {
                    let b = w.trailing_zeros() as usize;
                    w &= w - 1;
                    Some(wi * WORD_BITS + b)
                }
            })
        })
    }

    pub fn count_ones(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }
}
