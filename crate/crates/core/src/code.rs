//! Repetition and rotated surface codes: stabilizers, syndromes, and the
//! logical-failure judgement for residual errors.
//!
//! Rotated surface layout: data qubits sit at grid positions (r, c) with
//! 0 <= r, c < d and qubit index r*d + c. Bulk plaquettes are the (d-1)^2
//! unit cells; the cell with top-left qubit (i, j) is Z-type when i+j is
//! even and X-type otherwise. Weight-2 Z-checks close the top/bottom
//! boundaries and weight-2 X-checks close the left/right boundaries, so
//! logical Z is the Z-chain down column 0 and logical X is the X-chain
//! along row 0. (Placing the weight-2 Z-checks on the left/right boundaries
//! instead would force the column-0 Z-chain to anticommute with a boundary
//! X-check; the two layouts differ by a 90-degree rotation only.)

use thiserror::Error;

use crate::combinatorics;
use crate::pauli::{PauliString, MAX_QUBITS};

#[derive(Debug, Error)]
pub enum CodeError {
    #[error("code distance must be odd and >= 3, got {0}")]
    InvalidDistance(usize),
    #[error("operator acts on {got} qubits but the code has {expected}")]
    SizeMismatch { expected: usize, got: usize },
    #[error("support parameters out of range: n={n}, k={k}")]
    SupportRange { n: usize, k: usize },
    #[error("stabilizers {0} and {1} anticommute")]
    StabilizerCommutation(usize, usize),
    #[error("logical operator fails its (anti)commutation relations")]
    LogicalCommutation,
    #[error("residual error has a non-trivial syndrome in the decoded sector")]
    ResidualSyndromeNonTrivial,
}

/// Which code family a `CodeSpec` describes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CodeKind {
    Repetition,
    RotatedSurface,
}

/// Measurement outcome of all stabilizer checks, one bit per stabilizer.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Syndrome {
    bits: u128,
    len: usize,
}

impl Syndrome {
    pub fn bits(&self) -> u128 {
        self.bits
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn bit(&self, i: usize) -> bool {
        debug_assert!(i < self.len);
        self.bits >> i & 1 == 1
    }

    pub fn is_trivial(&self) -> bool {
        self.bits == 0
    }

    pub fn xor(&self, other: &Syndrome) -> Syndrome {
        debug_assert_eq!(self.len, other.len);
        Syndrome {
            bits: self.bits ^ other.bits,
            len: self.len,
        }
    }
}

/// A distance-d stabilizer code instance with a fixed logical pair.
#[derive(Debug, Clone)]
pub struct CodeSpec {
    kind: CodeKind,
    n: usize,
    d: usize,
    omega: usize,
    stabilizers: Vec<PauliString>,
    logical_z: PauliString,
    logical_x: PauliString,
    z_stabilizer_indices: Vec<usize>,
}

impl CodeSpec {
    pub fn kind(&self) -> CodeKind {
        self.kind
    }

    /// Number of data qubits N.
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn distance(&self) -> usize {
        self.d
    }

    /// Smallest error weight that can cause a logical failure: ceil(d/2).
    pub fn omega(&self) -> usize {
        self.omega
    }

    pub fn stabilizers(&self) -> &[PauliString] {
        &self.stabilizers
    }

    pub fn logical_z(&self) -> &PauliString {
        &self.logical_z
    }

    pub fn logical_x(&self) -> &PauliString {
        &self.logical_x
    }

    /// Indices of the pure-Z stabilizers (the X-error detection sector).
    pub fn z_stabilizer_indices(&self) -> &[usize] {
        &self.z_stabilizer_indices
    }

    /// Stable identifier for this exact stabilizer/logical layout.
    ///
    /// FNV-1a over the canonical mask encoding; failure-count artifacts are
    /// only comparable between runs when this hash (and the decoder version)
    /// agree.
    pub fn layout_hash(&self) -> u64 {
        const OFFSET: u64 = 0xcbf29ce484222325;
        const PRIME: u64 = 0x100000001b3;
        let mut h = OFFSET;
        let mut eat = |v: u128| {
            for byte in v.to_le_bytes() {
                h = (h ^ byte as u64).wrapping_mul(PRIME);
            }
        };
        eat(self.kind as u128);
        eat(self.n as u128);
        eat(self.d as u128);
        for s in &self.stabilizers {
            eat(s.x_mask());
            eat(s.z_mask());
        }
        eat(self.logical_z.z_mask());
        eat(self.logical_x.x_mask());
        h
    }

    /// Syndrome of `error`: bit i is set iff `error` anticommutes with
    /// stabilizer i.
    pub fn syndrome(&self, error: &PauliString) -> Result<Syndrome, CodeError> {
        if error.n() != self.n {
            return Err(CodeError::SizeMismatch {
                expected: self.n,
                got: error.n(),
            });
        }
        let mut bits = 0u128;
        for (i, s) in self.stabilizers.iter().enumerate() {
            if error.anticommutes_with(s) {
                bits |= 1 << i;
            }
        }
        Ok(Syndrome {
            bits,
            len: self.stabilizers.len(),
        })
    }

    /// Whether `residual` acts as a logical X on the |0_L> state.
    ///
    /// The caller must already have applied the correction: `residual` must
    /// commute with every Z-type stabilizer (the decoded sector). Z-sector
    /// components of the residual are irrelevant to the tracked observable
    /// and are not checked.
    pub fn is_logical_failure(&self, residual: &PauliString) -> Result<bool, CodeError> {
        if residual.n() != self.n {
            return Err(CodeError::SizeMismatch {
                expected: self.n,
                got: residual.n(),
            });
        }
        for &i in &self.z_stabilizer_indices {
            if residual.anticommutes_with(&self.stabilizers[i]) {
                return Err(CodeError::ResidualSyndromeNonTrivial);
            }
        }
        Ok(residual.anticommutes_with(&self.logical_z))
    }

    fn validate(&self) -> Result<(), CodeError> {
        for i in 0..self.stabilizers.len() {
            for j in (i + 1)..self.stabilizers.len() {
                if self.stabilizers[i].anticommutes_with(&self.stabilizers[j]) {
                    return Err(CodeError::StabilizerCommutation(i, j));
                }
            }
        }
        let logicals_ok = self
            .stabilizers
            .iter()
            .all(|s| s.commutes_with(&self.logical_z) && s.commutes_with(&self.logical_x))
            && self.logical_z.anticommutes_with(&self.logical_x);
        if !logicals_ok {
            return Err(CodeError::LogicalCommutation);
        }
        Ok(())
    }
}

fn check_distance(d: usize) -> Result<(), CodeError> {
    if d < 3 || d.is_multiple_of(2) {
        return Err(CodeError::InvalidDistance(d));
    }
    Ok(())
}

/// Distance-d repetition code: d qubits, the d-1 adjacent ZZ checks,
/// logical Z = Z on every qubit, logical X = X on every qubit.
pub fn build_repetition_code(d: usize) -> Result<CodeSpec, CodeError> {
    check_distance(d)?;
    let n = d;
    let stabilizers: Vec<PauliString> = (0..n - 1)
        .map(|i| PauliString::z_string(n, 0b11 << i))
        .collect();
    let full = if n == 128 { u128::MAX } else { (1u128 << n) - 1 };
    let code = CodeSpec {
        kind: CodeKind::Repetition,
        n,
        d,
        omega: d.div_ceil(2),
        z_stabilizer_indices: (0..stabilizers.len()).collect(),
        stabilizers,
        logical_z: PauliString::z_string(n, full),
        logical_x: PauliString::x_string(n, full),
    };
    code.validate()?;
    Ok(code)
}

/// Distance-d rotated surface code on d^2 data qubits (layout in the module
/// docs): (d^2-1)/2 stabilizers of each type, logical Z on column 0,
/// logical X on row 0.
pub fn build_rotated_surface_code(d: usize) -> Result<CodeSpec, CodeError> {
    check_distance(d)?;
    let n = d * d;
    assert!(n <= MAX_QUBITS);
    let q = |r: usize, c: usize| -> u128 { 1u128 << (r * d + c) };
    let cell = |i: usize, j: usize| q(i, j) | q(i, j + 1) | q(i + 1, j) | q(i + 1, j + 1);

    let mut z_masks = Vec::new();
    let mut x_masks = Vec::new();
    for i in 0..d - 1 {
        for j in 0..d - 1 {
            if (i + j) % 2 == 0 {
                z_masks.push(cell(i, j));
            } else {
                x_masks.push(cell(i, j));
            }
        }
    }
    // top Z-checks at odd j, bottom Z-checks at even j
    for j in (1..d - 1).step_by(2) {
        z_masks.push(q(0, j) | q(0, j + 1));
    }
    for j in (0..d - 1).step_by(2) {
        z_masks.push(q(d - 1, j) | q(d - 1, j + 1));
    }
    // left X-checks at even i, right X-checks at odd i
    for i in (0..d - 1).step_by(2) {
        x_masks.push(q(i, 0) | q(i + 1, 0));
    }
    for i in (1..d - 1).step_by(2) {
        x_masks.push(q(i, d - 1) | q(i + 1, d - 1));
    }
    debug_assert_eq!(z_masks.len(), (n - 1) / 2);
    debug_assert_eq!(x_masks.len(), (n - 1) / 2);

    let mut stabilizers: Vec<PauliString> = Vec::with_capacity(n - 1);
    stabilizers.extend(z_masks.iter().map(|&m| PauliString::z_string(n, m)));
    stabilizers.extend(x_masks.iter().map(|&m| PauliString::x_string(n, m)));

    let col0 = (0..d).fold(0u128, |m, r| m | q(r, 0));
    let row0 = (0..d).fold(0u128, |m, c| m | q(0, c));
    let code = CodeSpec {
        kind: CodeKind::RotatedSurface,
        n,
        d,
        omega: d.div_ceil(2),
        z_stabilizer_indices: (0..z_masks.len()).collect(),
        stabilizers,
        logical_z: PauliString::z_string(n, col0),
        logical_x: PauliString::x_string(n, row0),
    };
    code.validate()?;
    Ok(code)
}

pub use crate::combinatorics::{enumerate_supports, unrank_support, SupportIter};

/// Total count of weight-k supports, C(n, k).
pub fn support_count(n: usize, k: usize) -> u128 {
    combinatorics::binomial_u128(n, k)
}
