use rand::Rng;

use super::SpinConfiguration;
use crate::error::{check_len, Error, Result};

/// Spin-reversal transformation: spin `i` is flipped where `α_i = -1`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Gauge {
    signs: Vec<i8>,
    mask: SpinConfiguration,
}

impl Gauge {
    pub fn new(signs: Vec<i8>) -> Result<Self> {
        if let Some(i) = signs.iter().position(|&a| a != 1 && a != -1) {
            return Err(Error::invalid(format!("gauge entry {i} is {}, expected ±1", signs[i])));
        }
        let mask = SpinConfiguration::from_spins(&signs)?;
        Ok(Self { signs, mask })
    }

    pub fn identity(len: usize) -> Self {
        Self::new(vec![1; len]).unwrap()
    }

    pub fn random<R: Rng + ?Sized>(len: usize, rng: &mut R) -> Self {
        let mask = SpinConfiguration::random(len, rng);
        Self {
            signs: mask.to_spin_vec(),
            mask,
        }
    }

    pub fn len(&self) -> usize {
        self.signs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.signs.is_empty()
    }

    pub fn signs(&self) -> &[i8] {
        &self.signs
    }

    /// `s_i -> α_i s_i`.
    pub fn apply(&self, config: &SpinConfiguration) -> Result<SpinConfiguration> {
        check_len(self.len(), config.len())?;
        config.xor(&self.mask)
    }
}
