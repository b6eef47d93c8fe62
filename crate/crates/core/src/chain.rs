//! Chain topology, basis states, diagonal energies, and detunings.
//!
//! Everything here is exact arithmetic on the diagonal part of the problem:
//! no dynamics, no approximations. The two detuning helpers
//! ([`ChainSpec::pair_detuning`] and [`ChainSpec::nonresonant_detuning`]) are
//! the quantities the perturbative error analysis is built from.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::Error;

/// Largest chain length representable by [`BasisState`] (index fits a `u64`).
pub const MAX_INDEX_BITS: usize = 63;

/// Static parameters of a linear chain of Ising-coupled spin-1/2 nuclei in a
/// field with a uniform gradient along the chain axis.
///
/// Spin `k` precesses at `ω_k = omega0 + k · delta_omega`; nearest neighbors
/// share an Ising coupling of strength `j_coupling`. All frequencies are
/// angular, in one consistent unit (conventionally the Ising constant).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChainSpec {
    length: usize,
    omega0: f64,
    delta_omega: f64,
    j_coupling: f64,
}

impl ChainSpec {
    /// Chain with the common convention `omega0 = delta_omega`, i.e. spin `k`
    /// precesses at `(k + 1) · delta_omega`.
    ///
    /// # Panics
    /// If `length` is 0 or exceeds [`MAX_INDEX_BITS`], or if `delta_omega`
    /// or `j_coupling` is not strictly positive and finite.
    pub fn new(length: usize, delta_omega: f64, j_coupling: f64) -> Self {
        Self::with_omega0(length, delta_omega, delta_omega, j_coupling)
    }

    /// Chain with an explicit base frequency `omega0 ≥ 0`.
    ///
    /// # Panics
    /// See [`ChainSpec::new`]; additionally if `omega0` is negative or
    /// non-finite.
    pub fn with_omega0(length: usize, omega0: f64, delta_omega: f64, j_coupling: f64) -> Self {
        assert!(length >= 1, "chain needs at least one spin");
        assert!(
            length <= MAX_INDEX_BITS,
            "chain length {length} exceeds the basis-index limit of {MAX_INDEX_BITS}"
        );
        assert!(
            omega0.is_finite() && omega0 >= 0.0,
            "base frequency must be finite and non-negative"
        );
        assert!(
            delta_omega.is_finite() && delta_omega > 0.0,
            "frequency gradient must be finite and positive"
        );
        assert!(
            j_coupling.is_finite() && j_coupling > 0.0,
            "Ising coupling must be finite and positive"
        );
        Self {
            length,
            omega0,
            delta_omega,
            j_coupling,
        }
    }

    /// Number of spins `L`.
    pub fn len(&self) -> usize {
        self.length
    }

    /// `true` only for the (disallowed) zero-length chain; present to satisfy
    /// the usual `len`/`is_empty` pairing.
    pub fn is_empty(&self) -> bool {
        self.length == 0
    }

    /// Hilbert-space dimension `2^L`.
    pub fn dim(&self) -> usize {
        1usize << self.length
    }

    /// Base Larmor frequency `ω_0` (frequency of spin 0).
    pub fn omega0(&self) -> f64 {
        self.omega0
    }

    /// Per-site frequency increment `δω` from the field gradient.
    pub fn delta_omega(&self) -> f64 {
        self.delta_omega
    }

    /// Nearest-neighbor Ising coupling `J`.
    pub fn j_coupling(&self) -> f64 {
        self.j_coupling
    }

    /// Larmor frequency of spin `k`: `ω_k = ω_0 + k · δω`.
    pub fn larmor_frequency(&self, k: usize) -> f64 {
        assert!(k < self.length, "spin index {k} out of range");
        self.omega0 + k as f64 * self.delta_omega
    }

    /// Energy of a basis state under the drive-free Hamiltonian
    /// `E = −Σ_k ω_k σ_k/2 − (J/2) Σ_k σ_k σ_{k+1}`,
    /// where `σ_k = ±1` is twice the spin projection ([`BasisState::spin_sign`]).
    pub fn diagonal_energy(&self, state: BasisState) -> f64 {
        assert_eq!(
            state.len(),
            self.length,
            "basis state length does not match chain length"
        );
        let mut zeeman = 0.0;
        for k in 0..self.length {
            zeeman += self.larmor_frequency(k) * state.spin_sign(k);
        }
        let mut ising = 0.0;
        for k in 0..self.length - 1 {
            ising += state.spin_sign(k) * state.spin_sign(k + 1);
        }
        -0.5 * zeeman - 0.5 * self.j_coupling * ising
    }

    /// Energy change `E(flip(state, k)) − E(state)` from flipping spin `k`,
    /// computed locally: `σ_k · (ω_k + J Σ_neighbors σ)`.
    ///
    /// Positive when the flip absorbs energy (bit `0 → 1` against aligned
    /// neighbors), negative for the reverse flip; end spins have a single
    /// neighbor term.
    pub fn transition_frequency(&self, state: BasisState, k: usize) -> f64 {
        assert!(k < self.length, "spin index {k} out of range");
        let mut neighbors = 0.0;
        if k > 0 {
            neighbors += state.spin_sign(k - 1);
        }
        if k + 1 < self.length {
            neighbors += state.spin_sign(k + 1);
        }
        state.spin_sign(k) * (self.larmor_frequency(k) + self.j_coupling * neighbors)
    }

    /// Detuning `δ` of the drive from the pair transition that flips spin `k`
    /// of `state`: magnitude of the transition frequency minus the drive
    /// frequency `ν`.
    ///
    /// `δ = 0` means the pulse is exactly resonant with this pair; `δ = ±2J`
    /// is the generic near-resonant case in which both neighbors of `k`
    /// differ from the resonant configuration.
    pub fn pair_detuning(&self, state: BasisState, k: usize, nu: f64) -> f64 {
        self.transition_frequency(state, k).abs() - nu
    }

    /// Large detuning `D` that suppresses the unwanted flip of spectator spin
    /// `k_prime` while the pulse addresses spin `k` of `state`.
    ///
    /// With `i = flip(state, k_prime)` and `σ = sign(E_i − E_state)`,
    /// `D = (E_i − E_state) − σ·ν − (δ − Δ)/2`, where `δ` is the driven
    /// pair's detuning and `Δ` the same quantity evaluated on `i`. When the
    /// drive is resonant with the intended transition, `|D|` decomposes as
    /// `|k − k_prime| · δω + α·J` with integer `α` fixed by the neighbor
    /// bits (see [`crate::perturb::alpha_coefficients`]). For the usual
    /// addressing scenario — single excitation next to an interior driven
    /// spin — `α ∈ {−2, …, 2}`; over arbitrary states `|α|` can reach 5.
    ///
    /// # Panics
    /// If `k == k_prime`: the driven spin itself has no spectator detuning.
    pub fn nonresonant_detuning(
        &self,
        state: BasisState,
        k: usize,
        k_prime: usize,
        nu: f64,
    ) -> f64 {
        assert_ne!(
            k, k_prime,
            "spectator detuning is undefined for the driven spin itself"
        );
        let gap = self.transition_frequency(state, k_prime);
        let sigma = if gap >= 0.0 { 1.0 } else { -1.0 };
        let delta = self.pair_detuning(state, k, nu);
        let shifted = self.pair_detuning(state.flip(k_prime), k, nu);
        gap - sigma * nu - 0.5 * (delta - shifted)
    }
}

/// A computational basis state of the chain: `L` classical bits.
///
/// Bit `k = 0` is the rightmost character of the bit string and contributes
/// `2^k` to the index. Bit value `0` is the lower Zeeman level (spin
/// projection +1/2, `σ = +1`); bit value `1` is the upper level (`σ = −1`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct BasisState {
    index: usize,
    length: usize,
}

impl BasisState {
    /// State with the given basis index on an `length`-spin chain.
    ///
    /// # Panics
    /// If `length` is 0 or exceeds [`MAX_INDEX_BITS`], or `index ≥ 2^length`.
    pub fn from_index(index: usize, length: usize) -> Self {
        assert!(
            length >= 1 && length <= MAX_INDEX_BITS,
            "basis state length {length} out of range"
        );
        assert!(
            index < (1usize << length),
            "index {index} out of range for {length} spins"
        );
        Self { index, length }
    }

    /// The all-zeros (spin-up, lowest Zeeman) state.
    pub fn zero(length: usize) -> Self {
        Self::from_index(0, length)
    }

    /// Basis index `Σ_k b_k · 2^k`.
    pub fn index(&self) -> usize {
        self.index
    }

    /// Number of spins.
    pub fn len(&self) -> usize {
        self.length
    }

    /// `true` only for the (disallowed) zero-length state.
    pub fn is_empty(&self) -> bool {
        self.length == 0
    }

    /// Bit value of spin `k` (`false` = 0 = lower level).
    pub fn bit(&self, k: usize) -> bool {
        assert!(k < self.length, "spin index {k} out of range");
        (self.index >> k) & 1 == 1
    }

    /// Twice the spin projection `σ_k`: `+1.0` for bit 0, `−1.0` for bit 1.
    pub fn spin_sign(&self, k: usize) -> f64 {
        if self.bit(k) {
            -1.0
        } else {
            1.0
        }
    }

    /// State with spin `k` flipped; an involution.
    pub fn flip(&self, k: usize) -> Self {
        assert!(k < self.length, "spin index {k} out of range");
        Self {
            index: self.index ^ (1usize << k),
            length: self.length,
        }
    }

    /// Number of bits set to 1.
    pub fn count_ones(&self) -> u32 {
        self.index.count_ones()
    }

    /// Total spin projection `M = Σ_k σ_k / 2`.
    pub fn total_projection(&self) -> f64 {
        0.5 * (self.length as f64 - 2.0 * self.count_ones() as f64)
    }

    /// Spins at which `self` and `other` differ, in ascending order.
    pub fn flipped_spins(&self, other: BasisState) -> Vec<usize> {
        assert_eq!(self.length, other.length, "length mismatch");
        (0..self.length)
            .filter(|&k| (self.index ^ other.index) >> k & 1 == 1)
            .collect()
    }

    /// Bit string `b_{L−1} … b_0` (spin 0 rightmost).
    pub fn bit_string(&self) -> String {
        (0..self.length)
            .rev()
            .map(|k| if self.bit(k) { '1' } else { '0' })
            .collect()
    }
}

impl fmt::Display for BasisState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.bit_string())
    }
}

impl FromStr for BasisState {
    type Err = Error;

    /// Parses a bit string such as `"00010"`; the leftmost character is the
    /// highest spin, the rightmost is spin 0.
    fn from_str(s: &str) -> Result<Self, Error> {
        let length = s.len();
        if length == 0 || length > MAX_INDEX_BITS {
            return Err(Error::BadStateString {
                string: s.to_owned(),
                reason: format!("length must be 1..={MAX_INDEX_BITS}"),
            });
        }
        let mut index = 0usize;
        for (pos, c) in s.chars().enumerate() {
            let bit = match c {
                '0' => 0,
                '1' => 1,
                other => {
                    return Err(Error::BadStateString {
                        string: s.to_owned(),
                        reason: format!("unexpected character {other:?}"),
                    })
                }
            };
            index |= bit << (length - 1 - pos);
        }
        Ok(Self { index, length })
    }
}
