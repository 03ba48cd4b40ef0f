//! The approximate inverse channel targeting all weight-omega errors:
//! quasi-probability weights, branch sampling, normalization, pole, and
//! sampling overhead.
//!
//! For noise rate p on N qubits the channel has one identity branch with
//! weight P_0/A and C(N, omega) support branches (times 3^omega Pauli-letter
//! assignments for depolarizing noise) whose weights sum to -C(N, omega)
//! P_omega / A, with A = P_0 - C(N, omega) P_omega.

use rand::Rng;
use thiserror::Error;

use crate::code::CodeSpec;
use crate::combinatorics::{binomial_f64, ln_binomial};
use crate::noise::{sample_subset, weight_probability, NoiseKind, NoiseSpec};
use crate::pauli::PauliString;

#[derive(Debug, Error)]
pub enum PecError {
    #[error("p = {p} is at or beyond the pole p_pole = {pole}; the inverse channel is invalid there")]
    PoleViolation { p: f64, pole: f64 },
    #[error("noise acts on {noise_n} qubits but the code has {code_n}")]
    SizeMismatch { code_n: usize, noise_n: usize },
    #[error("invalid arguments: omega = {omega} must satisfy 1 <= omega <= n = {n}")]
    InvalidArguments { n: usize, omega: usize },
}

/// Physical error rate at which the channel normalization A vanishes:
/// 1 / (1 + C(n, omega)^(1/omega)).
pub fn pole(n: usize, omega: usize) -> Result<f64, PecError> {
    if omega == 0 || omega > n {
        return Err(PecError::InvalidArguments { n, omega });
    }
    let root = (ln_binomial(n, omega) / omega as f64).exp();
    Ok(1.0 / (1.0 + root))
}

/// One sampled branch of the quasi-probability decomposition.
#[derive(Debug, Clone)]
pub struct Branch {
    /// Sign of the branch weight beta_b.
    pub sign: i8,
    /// Pauli string inserted before decoding (identity for the identity
    /// branch, a weight-omega string otherwise).
    pub inserted: PauliString,
}

/// Fully evaluated inverse-channel structure for one (code, noise) pair.
#[derive(Debug, Clone)]
pub struct InverseChannelSpec {
    n: usize,
    omega: usize,
    noise_kind: NoiseKind,
    p: f64,
    p0: f64,
    p_omega: f64,
    support_count: f64,
    a: f64,
    l1_norm: f64,
    pole: f64,
}

impl InverseChannelSpec {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn omega(&self) -> usize {
        self.omega
    }

    pub fn noise_kind(&self) -> NoiseKind {
        self.noise_kind
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    /// Normalization A = P_0 - C(N, omega) P_omega; positive below the pole.
    pub fn normalization(&self) -> f64 {
        self.a
    }

    /// L1 norm of the quasi-probability weights,
    /// (P_0 + C(N, omega) P_omega) / |A|.
    pub fn l1_norm(&self) -> f64 {
        self.l1_norm
    }

    /// Weight of the identity branch, beta_0 = P_0 / A.
    pub fn identity_weight(&self) -> f64 {
        self.p0 / self.a
    }

    /// Summed (signed) weight of all non-identity branches,
    /// -C(N, omega) P_omega / A.
    pub fn superbranch_total_weight(&self) -> f64 {
        -self.support_count * self.p_omega / self.a
    }

    pub fn pole(&self) -> f64 {
        self.pole
    }

    /// Probability of drawing the identity branch, |beta_0| / ||beta||_1.
    pub fn identity_probability(&self) -> f64 {
        self.p0 / (self.p0 + self.support_count * self.p_omega)
    }

    /// Variance inflation factor of the signed estimator, ||beta||_1^2.
    pub fn sampling_overhead(&self) -> f64 {
        self.l1_norm * self.l1_norm
    }

    /// G = C(N, omega) P_omega / A, so that
    /// P_L^PEC = (1 + G) P_L^(0) - G P_L^(omega).
    pub fn combination_factor(&self) -> f64 {
        self.support_count * self.p_omega / self.a
    }

    /// Draw one branch: the identity with probability |beta_0|/||beta||_1,
    /// otherwise a uniformly random weight-omega insertion with sign -1.
    pub fn sample_branch<R: Rng>(&self, rng: &mut R) -> Branch {
        if rng.gen::<f64>() < self.identity_probability() {
            Branch {
                sign: 1,
                inserted: PauliString::identity(self.n),
            }
        } else {
            Branch {
                sign: -1,
                inserted: self.sample_insertion(rng),
            }
        }
    }

    /// A uniformly random weight-omega insertion (uniform support; uniform
    /// letters for depolarizing noise).
    pub fn sample_insertion<R: Rng>(&self, rng: &mut R) -> PauliString {
        let full = if self.n == 128 {
            u128::MAX
        } else {
            (1u128 << self.n) - 1
        };
        let support = sample_subset(full, self.omega, rng);
        // letters follow the targeted error channel
        let letter_noise = NoiseSpec::new(self.noise_kind, 0.5, self.n).expect("valid");
        letter_noise.letters_on(support, rng)
    }
}

/// Build the inverse channel for `code` under `noise`.
///
/// Refuses p >= p_pole: past the pole the decomposition changes sign
/// structure and the leading-order cancellation no longer holds.
pub fn build_inverse_channel(
    code: &CodeSpec,
    noise: &NoiseSpec,
) -> Result<InverseChannelSpec, PecError> {
    if noise.n() != code.n() {
        return Err(PecError::SizeMismatch {
            code_n: code.n(),
            noise_n: noise.n(),
        });
    }
    let n = code.n();
    let omega = code.omega();
    let p = noise.p();
    let pole = pole(n, omega)?;
    if p >= pole {
        return Err(PecError::PoleViolation { p, pole });
    }
    let p0 = weight_probability(p, n, 0);
    let p_omega = weight_probability(p, n, omega);
    let support_count = binomial_f64(n, omega);
    let a = p0 - support_count * p_omega;
    debug_assert!(a > 0.0);
    Ok(InverseChannelSpec {
        n,
        omega,
        noise_kind: noise.kind(),
        p,
        p0,
        p_omega,
        support_count,
        a,
        l1_norm: (p0 + support_count * p_omega) / a.abs(),
        pole,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::code::{build_repetition_code, build_rotated_surface_code};
    use crate::rng::shot_rng;

    fn channel(d: usize, p: f64) -> InverseChannelSpec {
        let code = build_repetition_code(d).unwrap();
        let noise = NoiseSpec::new(NoiseKind::BitFlip, p, code.n()).unwrap();
        build_inverse_channel(&code, &noise).unwrap()
    }

    #[test]
    fn normalization_example() {
        // N=3, omega=2, p=0.1: A = (1-p)(1-2p-2p^2) = 0.9 * 0.78
        let chan = channel(3, 0.1);
        assert!((chan.normalization() - 0.702).abs() < 1e-12);
        assert!((chan.l1_norm() - 0.756 / 0.702).abs() < 1e-12);
        assert!((chan.identity_probability() - 0.729 / 0.756).abs() < 1e-12);
    }

    #[test]
    fn zero_noise_channel_is_identity() {
        let chan = channel(3, 0.0);
        assert_eq!(chan.identity_weight(), 1.0);
        assert_eq!(chan.superbranch_total_weight(), 0.0);
        assert_eq!(chan.sampling_overhead(), 1.0);
        assert_eq!(chan.combination_factor(), 0.0);
        let mut rng = shot_rng(1, 1, 1);
        for _ in 0..16 {
            let b = chan.sample_branch(&mut rng);
            assert_eq!(b.sign, 1);
            assert!(b.inserted.is_identity());
        }
    }

    #[test]
    fn overhead_and_combination_examples() {
        let chan = channel(3, 0.1);
        assert!((chan.sampling_overhead() - (0.756f64 / 0.702).powi(2)).abs() < 1e-12);
        assert!((chan.combination_factor() - 0.027 / 0.702).abs() < 1e-12);

        // the two forms of the combined rate agree identically:
        // (P0/A) P_I - (C P_w / A) P_S = (1+G) P_I - G P_S
        for p in [0.01, 0.05, 0.2, 0.3] {
            let chan = channel(3, p);
            let (p_i, p_s) = (0.37, 0.81); // arbitrary rates
            let lhs = chan.identity_weight() * p_i + chan.superbranch_total_weight() * p_s;
            let g = chan.combination_factor();
            let rhs = (1.0 + g) * p_i - g * p_s;
            assert!((lhs - rhs).abs() < 1e-12);
        }
    }

    #[test]
    fn pole_values() {
        assert!((pole(3, 2).unwrap() - 1.0 / (1.0 + 3f64.sqrt())).abs() < 1e-15);
        // d = 9 surface: p_pole ~ 0.03
        let p81 = pole(81, 5).unwrap();
        assert!((0.028..=0.036).contains(&p81), "pole(81,5)={p81}");
        assert!(pole(3, 0).is_err());
        assert!(pole(3, 4).is_err());
    }

    #[test]
    fn pole_decreases_along_both_code_families() {
        let mut last = f64::INFINITY;
        for d in [3usize, 5, 7, 9] {
            let p = pole(d, d.div_ceil(2)).unwrap();
            assert!(p < last);
            last = p;
            // repetition family stays above 0.2 for all odd d
            assert!(p > 0.2);
        }
        let mut last = f64::INFINITY;
        for d in [3usize, 5, 7, 9] {
            let p = pole(d * d, d.div_ceil(2)).unwrap();
            assert!(p < last);
            last = p;
        }
        // the repetition bound holds far along the family
        for d in (3..=99).step_by(2) {
            assert!(pole(d, d.div_ceil(2)).unwrap() > 0.2, "d={d}");
        }
    }

    #[test]
    fn pole_circuit_level_asymptotics() {
        // with N = d^3 error locations the pole tracks (2 e d^2)^-1 up to a
        // finite-size factor ((d+1)/d) (pi (d+1))^(1/(d+1)) that decays
        // towards 1: the ratio is ~1.57 at d=9, ~1.36 at d=15, and first
        // drops within 25% at d=25
        let ratio = |d: usize| {
            let omega = d.div_ceil(2);
            pole(d * d * d, omega).unwrap() * 2.0 * std::f64::consts::E * (d * d) as f64
        };
        let mut last = f64::INFINITY;
        for d in (9..=27).step_by(2) {
            let r = ratio(d);
            assert!(r > 1.0 && r < last, "d={d} ratio={r}");
            last = r;
        }
        assert!(ratio(9) < 1.65);
        assert!(ratio(15) < 1.40);
        assert!((ratio(25) - 1.0).abs() < 0.25);
        assert!((ratio(27) - 1.0).abs() < 0.25);
    }

    #[test]
    fn rejects_p_at_or_beyond_pole() {
        let code = build_rotated_surface_code(3).unwrap();
        let pole_val = pole(9, 2).unwrap();
        let noise = NoiseSpec::new(NoiseKind::BitFlip, pole_val + 1e-3, 9).unwrap();
        assert!(matches!(
            build_inverse_channel(&code, &noise),
            Err(PecError::PoleViolation { .. })
        ));
        let noise = NoiseSpec::new(NoiseKind::BitFlip, 0.1, 9).unwrap();
        assert!(build_inverse_channel(&code, &noise).is_ok());
    }

    #[test]
    fn l1_norm_at_least_one_below_pole() {
        for d in [3usize, 5, 7, 9] {
            for p in [0.0, 0.01, 0.05, 0.1, 0.2] {
                let chan = channel(d, p);
                assert!(chan.normalization() > 0.0);
                if p == 0.0 {
                    assert_eq!(chan.l1_norm(), 1.0);
                } else {
                    assert!(chan.l1_norm() > 1.0);
                }
            }
        }
    }

    #[test]
    fn superbranch_frequency_matches_pi() {
        // N=3, omega=2, p=0.1: superbranch probability 0.027/0.756
        let chan = channel(3, 0.1);
        let expect = 1.0 - 0.729 / 0.756;
        let mut rng = shot_rng(2, 0, 0);
        let shots = 1_000_000;
        let mut hits = 0u64;
        for _ in 0..shots {
            let b = chan.sample_branch(&mut rng);
            if b.sign < 0 {
                assert_eq!(b.inserted.weight(), 2, "every insertion has weight omega");
                hits += 1;
            }
        }
        let freq = hits as f64 / shots as f64;
        let sigma = (expect * (1.0 - expect) / shots as f64).sqrt();
        assert!((freq - expect).abs() < 3.0 * sigma, "freq={freq}");
    }

    #[test]
    fn depolarizing_insertions_use_all_letters() {
        let code = build_rotated_surface_code(3).unwrap();
        let noise = NoiseSpec::new(NoiseKind::Depolarizing, 0.05, 9).unwrap();
        let chan = build_inverse_channel(&code, &noise).unwrap();
        let mut rng = shot_rng(3, 0, 0);
        let (mut saw_x, mut saw_z) = (false, false);
        for _ in 0..256 {
            let ins = chan.sample_insertion(&mut rng);
            assert_eq!(ins.weight(), 2);
            saw_x |= ins.x_mask() != 0;
            saw_z |= ins.z_mask() != 0;
        }
        assert!(saw_x && saw_z);
    }
}
