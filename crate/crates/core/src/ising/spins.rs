use std::fmt;

use rand::Rng;

use crate::error::{check_len, Error, Result};

const WORD_BITS: usize = 64;

/// A configuration of `len` Ising spins packed one bit per spin.
///
/// Bit `b_i` encodes `s_i = 1 - 2 b_i`: a cleared bit is spin up (+1) and a
/// set bit is spin down (-1). Padding bits past `len` are always zero, so
/// derived equality and hashing compare configurations exactly.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct SpinConfiguration {
    len: usize,
    words: Vec<u64>,
}

fn word_count(len: usize) -> usize {
    len.div_ceil(WORD_BITS)
}

impl SpinConfiguration {
    /// All spins up.
    pub fn all_up(len: usize) -> Self {
        Self {
            len,
            words: vec![0; word_count(len)],
        }
    }

    /// All spins down.
    pub fn all_down(len: usize) -> Self {
        Self::all_up(len).complement()
    }

    /// Builds a configuration from explicit `+1` / `-1` values.
    pub fn from_spins(spins: &[i8]) -> Result<Self> {
        let mut config = Self::all_up(spins.len());
        for (i, &s) in spins.iter().enumerate() {
            match s {
                1 => {}
                -1 => config.words[i / WORD_BITS] |= 1 << (i % WORD_BITS),
                other => return Err(Error::invalid(format!("spin {i} has value {other}, expected ±1"))),
            }
        }
        Ok(config)
    }

    /// Builds a configuration where `down[i]` selects spin -1.
    pub fn from_down_bits<I: IntoIterator<Item = bool>>(down: I) -> Self {
        let mut words = Vec::new();
        let mut len = 0;
        for bit in down {
            if len % WORD_BITS == 0 {
                words.push(0);
            }
            if bit {
                *words.last_mut().unwrap() |= 1 << (len % WORD_BITS);
            }
            len += 1;
        }
        Self { len, words }
    }

    /// Uniformly random configuration.
    pub fn random<R: Rng + ?Sized>(len: usize, rng: &mut R) -> Self {
        let mut words: Vec<u64> = (0..word_count(len)).map(|_| rng.gen()).collect();
        mask_tail(len, &mut words);
        Self { len, words }
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    /// Packed words, least significant bit first.
    pub fn words(&self) -> &[u64] {
        &self.words
    }

    pub fn is_down(&self, i: usize) -> bool {
        assert!(i < self.len, "spin index {i} out of range for length {}", self.len);
        self.words[i / WORD_BITS] >> (i % WORD_BITS) & 1 == 1
    }

    /// Value of spin `i` as `+1` or `-1`.
    pub fn spin(&self, i: usize) -> i8 {
        if self.is_down(i) {
            -1
        } else {
            1
        }
    }

    pub fn flip(&mut self, i: usize) {
        assert!(i < self.len, "spin index {i} out of range for length {}", self.len);
        self.words[i / WORD_BITS] ^= 1 << (i % WORD_BITS);
    }

    pub fn set_spin(&mut self, i: usize, value: i8) {
        if self.spin(i) != value {
            self.flip(i);
        }
    }

    pub fn spins(&self) -> impl Iterator<Item = i8> + '_ {
        (0..self.len).map(move |i| self.spin(i))
    }

    pub fn to_spin_vec(&self) -> Vec<i8> {
        self.spins().collect()
    }

    /// Global spin flip `s -> -s`.
    pub fn complement(&self) -> Self {
        let mut words: Vec<u64> = self.words.iter().map(|w| !w).collect();
        mask_tail(self.len, &mut words);
        Self { len: self.len, words }
    }

    /// Elementwise XOR of the packed bits; `self.xor(other)` marks the sites
    /// where the two configurations disagree.
    pub fn xor(&self, other: &Self) -> Result<Self> {
        check_len(self.len, other.len)?;
        Ok(Self {
            len: self.len,
            words: self.words.iter().zip(&other.words).map(|(a, b)| a ^ b).collect(),
        })
    }

    pub fn count_down(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    /// Number of sites where the spins differ.
    pub fn hamming_distance(&self, other: &Self) -> Result<usize> {
        check_len(self.len, other.len)?;
        Ok(self.hamming_unchecked(other))
    }

    /// Hamming distance without the length check; lengths must agree.
    #[inline]
    pub(crate) fn hamming_unchecked(&self, other: &Self) -> usize {
        debug_assert_eq!(self.len, other.len);
        self.words
            .iter()
            .zip(&other.words)
            .map(|(a, b)| (a ^ b).count_ones() as usize)
            .sum()
    }

    /// Packed bytes, spin `8k + b` in bit `b` of byte `k`.
    pub fn to_bytes(&self) -> Vec<u8> {
        let mut bytes: Vec<u8> = self.words.iter().flat_map(|w| w.to_le_bytes()).collect();
        bytes.truncate(self.len.div_ceil(8));
        bytes
    }

    pub fn from_bytes(len: usize, bytes: &[u8]) -> Result<Self> {
        let expected = len.div_ceil(8);
        if bytes.len() != expected {
            return Err(Error::invalid(format!(
                "{} packed bytes given for {len} spins, expected {expected}",
                bytes.len()
            )));
        }
        let mut words = vec![0u64; word_count(len)];
        for (k, &b) in bytes.iter().enumerate() {
            words[k / 8] |= (b as u64) << (8 * (k % 8));
        }
        let config = Self { len, words };
        let mut masked = config.words.clone();
        mask_tail(len, &mut masked);
        if masked != config.words {
            return Err(Error::invalid("non-zero padding bits in packed spins"));
        }
        Ok(config)
    }

    /// Lower-case hex of [`to_bytes`](Self::to_bytes).
    pub fn to_hex(&self) -> String {
        hex::encode(self.to_bytes())
    }

    pub fn from_hex(len: usize, text: &str) -> Result<Self> {
        let bytes = hex::decode(text).map_err(|e| Error::invalid(format!("bad spin hex: {e}")))?;
        Self::from_bytes(len, &bytes)
    }
}

fn mask_tail(len: usize, words: &mut [u64]) {
    let rem = len % WORD_BITS;
    if rem != 0 {
        if let Some(last) = words.last_mut() {
            *last &= (1u64 << rem) - 1;
        }
    }
}

impl fmt::Debug for SpinConfiguration {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s: String = self.spins().map(|s| if s > 0 { '+' } else { '-' }).collect();
        write!(f, "SpinConfiguration({s})")
    }
}
