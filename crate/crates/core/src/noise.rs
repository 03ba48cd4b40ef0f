//! Code-capacity i.i.d. noise: bit-flip and depolarizing channels,
//! per-pattern weight probabilities, and (stratified) error sampling.

use rand::Rng;
use thiserror::Error;

use crate::pauli::{PauliLetter, PauliString, MAX_QUBITS};

#[derive(Debug, Error)]
pub enum NoiseError {
    #[error("error probability must lie in [0, 1), got {0}")]
    InvalidProbability(f64),
    #[error("qubit count {0} exceeds the supported maximum {MAX_QUBITS}")]
    TooManyQubits(usize),
    #[error("stratum weight {k} out of range for {n} qubits")]
    WeightRange { n: usize, k: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NoiseKind {
    /// X with probability p per qubit.
    BitFlip,
    /// X, Y, Z each with probability p/3 per qubit.
    Depolarizing,
}

/// An i.i.d. single-qubit error channel acting on n data qubits.
#[derive(Debug, Clone, Copy)]
pub struct NoiseSpec {
    kind: NoiseKind,
    p: f64,
    n: usize,
}

impl NoiseSpec {
    pub fn new(kind: NoiseKind, p: f64, n: usize) -> Result<Self, NoiseError> {
        if !(0.0..1.0).contains(&p) {
            return Err(NoiseError::InvalidProbability(p));
        }
        if n > MAX_QUBITS {
            return Err(NoiseError::TooManyQubits(n));
        }
        Ok(NoiseSpec { kind, p, n })
    }

    pub fn kind(&self) -> NoiseKind {
        self.kind
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Per-pattern probability P_k = p^k (1-p)^(N-k) of one specific
    /// weight-k error pattern (not summed over patterns).
    ///
    /// Evaluated in log space so that large N with small p cannot underflow
    /// through intermediate products.
    pub fn weight_probability(&self, k: usize) -> Result<f64, NoiseError> {
        if k > self.n {
            return Err(NoiseError::WeightRange { n: self.n, k });
        }
        Ok(weight_probability(self.p, self.n, k))
    }

    /// Draw one error from the i.i.d. channel.
    pub fn sample_error<R: Rng>(&self, rng: &mut R) -> PauliString {
        let mut e = PauliString::identity(self.n);
        for q in 0..self.n {
            if rng.gen::<f64>() < self.p {
                e.apply_letter(q, self.letter(rng));
            }
        }
        e
    }

    /// Draw one error conditioned on having exactly `k` error sites: the
    /// support is a uniformly random k-subset, letters are uniform for the
    /// depolarizing channel.
    pub fn sample_error_in_stratum<R: Rng>(
        &self,
        k: usize,
        rng: &mut R,
    ) -> Result<PauliString, NoiseError> {
        if k > self.n {
            return Err(NoiseError::WeightRange { n: self.n, k });
        }
        let full = if self.n == 128 {
            u128::MAX
        } else {
            (1u128 << self.n) - 1
        };
        let support = sample_subset(full, k, rng);
        Ok(self.letters_on(support, rng))
    }

    /// Pauli string with channel-appropriate letters on each site of `mask`
    /// (X for bit-flip, uniform X/Y/Z for depolarizing).
    pub fn letters_on<R: Rng>(&self, mask: u128, rng: &mut R) -> PauliString {
        match self.kind {
            NoiseKind::BitFlip => PauliString::x_string(self.n, mask),
            NoiseKind::Depolarizing => {
                let mut e = PauliString::identity(self.n);
                let mut m = mask;
                while m != 0 {
                    let q = m.trailing_zeros() as usize;
                    m &= m - 1;
                    e.apply_letter(q, self.letter(rng));
                }
                e
            }
        }
    }

    fn letter<R: Rng>(&self, rng: &mut R) -> PauliLetter {
        match self.kind {
            NoiseKind::BitFlip => PauliLetter::X,
            NoiseKind::Depolarizing => PauliLetter::ALL[rng.gen_range(0..3)],
        }
    }
}

/// P_k = p^k (1-p)^(N-k) in log space, with exact handling of the endpoints
/// (callers sometimes evaluate at q = 1 - p, which can be exactly 1).
pub fn weight_probability(p: f64, n: usize, k: usize) -> f64 {
    debug_assert!(k <= n);
    if p == 0.0 {
        return if k == 0 { 1.0 } else { 0.0 };
    }
    if p == 1.0 {
        return if k == n { 1.0 } else { 0.0 };
    }
    let log_p = p.ln();
    let log_q = (-p).ln_1p();
    (k as f64 * log_p + (n - k) as f64 * log_q).exp()
}

/// Uniform k-subset of the set bits of `pool` (Floyd's algorithm over the
/// pool's bit positions).
pub fn sample_subset<R: Rng>(pool: u128, k: usize, rng: &mut R) -> u128 {
    let size = pool.count_ones() as usize;
    debug_assert!(k <= size);
    let nth = |idx: usize| -> u128 {
        // position of the idx-th set bit of pool
        let mut m = pool;
        for _ in 0..idx {
            m &= m - 1;
        }
        1u128 << m.trailing_zeros()
    };
    let mut chosen = 0u128;
    for j in (size - k)..size {
        let t = nth(rng.gen_range(0..=j));
        if chosen & t != 0 {
            chosen |= nth(j);
        } else {
            chosen |= t;
        }
    }
    chosen
}
