//! Binomial coefficients and deterministic enumeration of fixed-weight supports.
//!
//! Supports are bitmasks over at most 128 qubits. Enumeration follows the
//! colexicographic order (ascending numeric value of the mask), which lets
//! parallel consumers seek into the stream with [`unrank_support`].

use num_bigint::BigInt;

use crate::code::CodeError;

/// Exact binomial coefficient as `u128`. Computed in arbitrary precision to
/// dodge intermediate overflow; every value for n <= 128 fits the result
/// type (C(128, 64) < 2^125).
pub fn binomial_u128(n: usize, k: usize) -> u128 {
    use num_traits::ToPrimitive;
    binomial_big(n, k)
        .to_u128()
        .expect("binomial exceeds u128")
}

/// Binomial coefficient as `f64`, exact while the value stays below 2^53.
pub fn binomial_f64(n: usize, k: usize) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    let mut acc = 1.0f64;
    for i in 0..k {
        acc = acc * (n - i) as f64 / (i + 1) as f64;
    }
    acc
}

/// Natural log of the binomial coefficient; stable for very large n.
pub fn ln_binomial(n: usize, k: usize) -> f64 {
    if k > n {
        return f64::NEG_INFINITY;
    }
    let k = k.min(n - k);
    let mut acc = 0.0f64;
    for i in 0..k {
        acc += ((n - i) as f64).ln() - ((i + 1) as f64).ln();
    }
    acc
}

/// Exact binomial coefficient as an arbitrary-precision integer.
pub fn binomial_big(n: usize, k: usize) -> BigInt {
    if k > n {
        return BigInt::from(0);
    }
    let k = k.min(n - k);
    let mut acc = BigInt::from(1);
    for i in 0..k {
        acc = acc * BigInt::from(n - i) / BigInt::from(i + 1);
    }
    acc
}

/// Iterator over all weight-`k` supports of `[0, n)` in colex order.
///
/// Uses Gosper's hack to step to the next mask; total count is C(n, k).
pub struct SupportIter {
    next: Option<u128>,
    limit: u128, // first mask outside the n-bit range
}

impl Iterator for SupportIter {
    type Item = u128;

    fn next(&mut self) -> Option<u128> {
        let cur = self.next?;
        self.next = if cur == 0 {
            None
        } else {
            let c = cur & cur.wrapping_neg();
            let r = cur.wrapping_add(c);
            if r >= self.limit || r == 0 {
                None
            } else {
                Some((((r ^ cur) >> 2) / c) | r)
            }
        };
        Some(cur)
    }
}

/// Stream of every k-subset of `[0, n)`, each exactly once, in colex order.
pub fn enumerate_supports(n: usize, k: usize) -> Result<SupportIter, CodeError> {
    if n > 128 || k > n {
        return Err(CodeError::SupportRange { n, k });
    }
    let first = if k == 0 { 0u128 } else { (1u128 << k) - 1 };
    let limit = if n == 128 { u128::MAX } else { 1u128 << n };
    Ok(SupportIter {
        next: Some(first),
        limit,
    })
}

/// The `rank`-th weight-`k` support in colex order (0-based).
///
/// Inverse of the enumeration order above; used to chunk exhaustive
/// enumeration across workers.
pub fn unrank_support(n: usize, k: usize, rank: u128) -> Result<u128, CodeError> {
    if n > 128 || k > n || rank >= binomial_u128(n, k) {
        return Err(CodeError::SupportRange { n, k });
    }
    let mut mask = 0u128;
    let mut r = rank;
    for i in (1..=k).rev() {
        // largest c with C(c, i) <= r
        let mut c = i - 1;
        let mut next = binomial_u128(c + 1, i);
        while next <= r {
            c += 1;
            next = binomial_u128(c + 1, i);
        }
        mask |= 1u128 << c;
        r -= binomial_u128(c, i);
    }
    Ok(mask)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn binomial_small_values() {
        assert_eq!(binomial_u128(3, 2), 3);
        assert_eq!(binomial_u128(9, 2), 36);
        assert_eq!(binomial_u128(49, 4), 211_876);
        assert_eq!(binomial_u128(5, 0), 1);
        assert_eq!(binomial_u128(4, 5), 0);
        assert_eq!(binomial_f64(49, 4), 211_876.0);
    }

    #[test]
    fn ln_binomial_matches_exact() {
        for &(n, k) in &[(10, 3), (81, 5), (128, 64)] {
            let exact = binomial_big(n, k).to_string().parse::<f64>().unwrap();
            let err = (ln_binomial(n, k) - exact.ln()).abs();
            assert!(err < 1e-10, "n={n} k={k} err={err}");
        }
        // the largest representable case stays within u128
        let widest = binomial_u128(128, 64) as f64;
        assert!((widest.ln() - ln_binomial(128, 64)).abs() < 1e-10);
    }

    #[test]
    fn enumerate_counts_and_uniqueness() {
        let items: Vec<u128> = enumerate_supports(3, 2).unwrap().collect();
        assert_eq!(items, vec![0b011, 0b101, 0b110]);

        let items: Vec<u128> = enumerate_supports(9, 2).unwrap().collect();
        assert_eq!(items.len(), 36);
        let mut sorted = items.clone();
        sorted.sort_unstable();
        sorted.dedup();
        assert_eq!(sorted, items, "colex order is ascending and duplicate-free");

        // weight-4 supports over 49 qubits: C(49,4) = 211876 by direct
        // binomial evaluation
        assert_eq!(enumerate_supports(49, 4).unwrap().count(), 211_876);
    }

    #[test]
    fn enumerate_edge_weights() {
        let zero: Vec<u128> = enumerate_supports(5, 0).unwrap().collect();
        assert_eq!(zero, vec![0]);
        let full: Vec<u128> = enumerate_supports(5, 5).unwrap().collect();
        assert_eq!(full, vec![0b11111]);
        assert!(enumerate_supports(5, 6).is_err());
    }

    #[test]
    fn unrank_matches_enumeration() {
        for (n, k) in [(6, 3), (9, 2), (10, 5), (7, 0)] {
            for (rank, mask) in enumerate_supports(n, k).unwrap().enumerate() {
                assert_eq!(unrank_support(n, k, rank as u128).unwrap(), mask);
            }
        }
        assert!(unrank_support(6, 3, binomial_u128(6, 3)).is_err());
    }
}
