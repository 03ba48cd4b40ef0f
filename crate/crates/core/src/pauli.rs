//! Pauli strings on up to 128 qubits, stored as X/Z support bitmasks.
//!
//! Phases are not tracked: every observable in this crate is a failure
//! indicator, so only the support structure and commutation relations matter.

use std::fmt;

/// Hard upper bound on qubit count imposed by the bitmask representation.
pub const MAX_QUBITS: usize = 128;

/// One of the three non-identity Pauli letters.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PauliLetter {
    X,
    Y,
    Z,
}

impl PauliLetter {
    pub const ALL: [PauliLetter; 3] = [PauliLetter::X, PauliLetter::Y, PauliLetter::Z];

    fn masks(self) -> (bool, bool) {
        match self {
            PauliLetter::X => (true, false),
            PauliLetter::Y => (true, true),
            PauliLetter::Z => (false, true),
        }
    }
}

/// An n-qubit Pauli string as a pair of support bitmasks.
///
/// Composition is mask-XOR per sector, so it is associative and self-inverse.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct PauliString {
    n: usize,
    x_mask: u128,
    z_mask: u128,
}

impl PauliString {
    /// The identity string on `n` qubits.
    pub fn identity(n: usize) -> Self {
        assert!(n <= MAX_QUBITS, "at most {MAX_QUBITS} qubits supported");
        PauliString {
            n,
            x_mask: 0,
            z_mask: 0,
        }
    }

    /// Build from explicit sector masks. Masks must fit in the low `n` bits.
    pub fn from_masks(n: usize, x_mask: u128, z_mask: u128) -> Self {
        assert!(n <= MAX_QUBITS);
        if n < 128 {
            assert_eq!(x_mask >> n, 0, "x_mask has bits beyond qubit count");
            assert_eq!(z_mask >> n, 0, "z_mask has bits beyond qubit count");
        }
        PauliString { n, x_mask, z_mask }
    }

    /// Pure X string supported on `mask`.
    pub fn x_string(n: usize, mask: u128) -> Self {
        Self::from_masks(n, mask, 0)
    }

    /// Pure Z string supported on `mask`.
    pub fn z_string(n: usize, mask: u128) -> Self {
        Self::from_masks(n, 0, mask)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn x_mask(&self) -> u128 {
        self.x_mask
    }

    pub fn z_mask(&self) -> u128 {
        self.z_mask
    }

    /// Qubits acted on by any non-identity letter.
    pub fn support(&self) -> u128 {
        self.x_mask | self.z_mask
    }

    pub fn weight(&self) -> u32 {
        self.support().count_ones()
    }

    pub fn is_identity(&self) -> bool {
        self.x_mask == 0 && self.z_mask == 0
    }

    /// Multiply `letter` onto qubit `q`.
    pub fn apply_letter(&mut self, q: usize, letter: PauliLetter) {
        debug_assert!(q < self.n);
        let (x, z) = letter.masks();
        if x {
            self.x_mask ^= 1 << q;
        }
        if z {
            self.z_mask ^= 1 << q;
        }
    }

    /// Group composition (phase dropped): XOR of both sector masks.
    pub fn compose(&self, other: &PauliString) -> PauliString {
        assert_eq!(self.n, other.n, "composing strings of different size");
        PauliString {
            n: self.n,
            x_mask: self.x_mask ^ other.x_mask,
            z_mask: self.z_mask ^ other.z_mask,
        }
    }

    /// True iff the symplectic product is even.
    pub fn commutes_with(&self, other: &PauliString) -> bool {
        debug_assert_eq!(self.n, other.n);
        let cross = (self.x_mask & other.z_mask).count_ones()
            + (self.z_mask & other.x_mask).count_ones();
        cross.is_multiple_of(2)
    }

    pub fn anticommutes_with(&self, other: &PauliString) -> bool {
        !self.commutes_with(other)
    }
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for q in 0..self.n {
            let x = self.x_mask >> q & 1 == 1;
            let z = self.z_mask >> q & 1 == 1;
            f.write_str(match (x, z) {
                (false, false) => "I",
                (true, false) => "X",
                (true, true) => "Y",
                (false, true) => "Z",
            })?;
        }
        Ok(())
    }
}

impl fmt::Debug for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}
