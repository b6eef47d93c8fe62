//! First-order perturbation theory for the unwanted transitions driven by a
//! pulse, and the closed-form error minimum at the integer matching
//! conditions.
//!
//! While a pulse addresses spin `k` of state `m`, the same drive couples
//! every other spin `k′` far off resonance, with detuning `D` from
//! [`ChainSpec::nonresonant_detuning`]. To first order in `Ω/D` the leaked
//! amplitude lands on two states: `i = flip(m, k′)` (spectator flip only)
//! and `j = flip(i, k)` (spectator plus driven spin). This module evaluates
//! those amplitudes, sums their probabilities into a per-pulse error budget,
//! and exposes the closed-form minimum the budget reaches when
//! `δω/Ω = 2Q` and `K = 2𝒦` are (even) integers.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::chain::{BasisState, ChainSpec};
use crate::pulse::{effective_rabi, pi_pulse_duration};

/// Which member of the driven pair holds the population before the pulse.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InitialLevel {
    /// The initial state is the lower-energy member of its driven pair.
    Lower,
    /// The initial state is the upper-energy member.
    Upper,
}

/// First-order amplitudes leaked to the spectator-flipped states during one
/// pulse, in the rotating frame of the source pair (overall phases that do
/// not affect probabilities are dropped).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ForcedPairAmplitudes {
    /// Amplitude on the state one spectator flip away from the initial state.
    pub single_flip: Complex64,
    /// Amplitude on the state with both the spectator and the driven spin
    /// flipped.
    pub double_flip: Complex64,
    /// `true` when `|D| ≥ 5Ω`, the regime where first order is trustworthy.
    pub well_separated: bool,
}

impl ForcedPairAmplitudes {
    /// Total leaked probability `|single|² + |double|²`.
    pub fn probability(&self) -> f64 {
        self.single_flip.norm_sqr() + self.double_flip.norm_sqr()
    }
}

/// First-order amplitudes for a spectator flip with detuning `offset` (`D`),
/// driven pair detuning `delta` (`δ`), and flipped-pair detuning `shifted`
/// (`Δ`), after a pulse of Rabi frequency `rabi` and duration `tau`.
///
/// `offset` must be computed from the actual initial state
/// ([`ChainSpec::nonresonant_detuning`]); `shifted` is the driven pair's
/// detuning after the spectator flip. Both leaked amplitudes start at zero
/// and stay `O(Ω/2D)`; the result is meaningful when `|D|` dominates `Ω`,
/// `|δ|`, and `|Δ|` (`well_separated` flags `|D| ≥ 5Ω`).
///
/// # Panics
/// If `offset == 0` (the perturbative form diverges on resonance) or `rabi`
/// or `tau` is not strictly positive and finite.
pub fn forced_pair_amplitudes(
    delta: f64,
    shifted: f64,
    offset: f64,
    rabi: f64,
    tau: f64,
    initial: InitialLevel,
) -> ForcedPairAmplitudes {
    assert!(
        offset != 0.0 && offset.is_finite(),
        "spectator detuning D must be finite and nonzero"
    );
    assert!(rabi.is_finite() && rabi > 0.0, "Rabi frequency must be positive");
    assert!(tau.is_finite() && tau > 0.0, "pulse duration must be positive");

    let lambda = effective_rabi(delta, rabi);
    let big_lambda = effective_rabi(shifted, rabi);
    let (sin_l, cos_l) = (0.5 * lambda * tau).sin_cos();
    let (sin_b, cos_b) = (0.5 * big_lambda * tau).sin_cos();
    let beat = Complex64::from_polar(1.0, offset * tau); // e^{iDτ}
    let prefactor = rabi / (2.0 * offset); // Ω/2D, signed

    // The driven pair's own return amplitude, with the sign of the detuning
    // tilt set by which member was populated.
    let tilt_sign = match initial {
        InitialLevel::Lower => 1.0,
        InitialLevel::Upper => -1.0,
    };
    let source = Complex64::new(cos_l, tilt_sign * delta / lambda * sin_l);

    let single_flip = -prefactor * (Complex64::new(cos_b, 0.0) - source * beat);
    let double_flip = -Complex64::i()
        * prefactor
        * (rabi / big_lambda * sin_b - rabi / lambda * sin_l * beat);

    ForcedPairAmplitudes {
        single_flip,
        double_flip,
        well_separated: offset.abs() >= 5.0 * rabi,
    }
}

/// Specialization of [`forced_pair_amplitudes`] to a resonant π pulse under
/// the 2πK condition with even `K`.
///
/// For a distant spectator (`neighbor = false`: `δ = Δ = 0`) the single-flip
/// amplitude cancels and the double flip oscillates as
/// `−i(Ω/2D)(1 − e^{iπD/Ω})`. For a neighbor (`Δ = ±2J` absorbed by the 2πK
/// condition) both amplitudes survive with magnitude `Ω/2|D|` each. Odd `K`
/// flips the sign of the neighbor single-flip amplitude; magnitudes are
/// unaffected.
pub fn pi_pulse_amplitudes(offset: f64, rabi: f64, neighbor: bool) -> ForcedPairAmplitudes {
    assert!(
        offset != 0.0 && offset.is_finite(),
        "spectator detuning D must be finite and nonzero"
    );
    assert!(rabi.is_finite() && rabi > 0.0, "Rabi frequency must be positive");
    let prefactor = rabi / (2.0 * offset);
    let beat = Complex64::from_polar(1.0, PI * offset / rabi); // e^{iDτ}, τ = π/Ω
    let (single_flip, double_flip) = if neighbor {
        (
            Complex64::new(-prefactor, 0.0),
            Complex64::i() * prefactor * beat,
        )
    } else {
        (
            Complex64::new(0.0, 0.0),
            -Complex64::i() * prefactor * (Complex64::new(1.0, 0.0) - beat),
        )
    };
    ForcedPairAmplitudes {
        single_flip,
        double_flip,
        well_separated: offset.abs() >= 5.0 * rabi,
    }
}

/// Per-pulse error budget of a resonant π pulse on spin `k` of `state`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ErrorBudget {
    /// Driven spin.
    pub k: usize,
    /// Rabi frequency of the pulse.
    pub rabi: f64,
    /// Drive frequency (resonant with the addressed transition).
    pub nu: f64,
    /// Gradient-to-drive ratio `δω/Ω` the budget was evaluated at.
    pub gradient_ratio: f64,
    /// Total probability of ending anywhere but the intended pair.
    pub p_total: f64,
    /// Per-spectator contributions `(k′, probability)`, ascending in `k′`.
    pub contributions: Vec<(usize, f64)>,
}

/// First-order probability that a resonant π pulse on spin `k` of `state`
/// deposits population outside the intended two-level pair.
///
/// Every spectator spin `k′ ≠ k` contributes the probability of its
/// [`forced_pair_amplitudes`]; the pulse is the resonant π pulse of
/// [`crate::pulse::Pulse::resonant_pi`] at Rabi frequency `rabi`. The
/// closed-form π-pulse magnitudes are recovered exactly when `rabi`
/// satisfies the 2πK condition.
pub fn error_probability(chain: &ChainSpec, state: BasisState, k: usize, rabi: f64) -> ErrorBudget {
    let nu = chain.transition_frequency(state, k).abs();
    let tau = pi_pulse_duration(rabi);
    let delta = chain.pair_detuning(state, k, nu); // exactly 0 by construction
    let initial = if chain.transition_frequency(state, k) >= 0.0 {
        InitialLevel::Lower
    } else {
        InitialLevel::Upper
    };
    let mut contributions = Vec::with_capacity(chain.len() - 1);
    let mut p_total = 0.0;
    for k_prime in 0..chain.len() {
        if k_prime == k {
            continue;
        }
        let offset = chain.nonresonant_detuning(state, k, k_prime, nu);
        let shifted = chain.pair_detuning(state.flip(k_prime), k, nu);
        let amps = forced_pair_amplitudes(delta, shifted, offset, rabi, tau, initial);
        let p = amps.probability();
        contributions.push((k_prime, p));
        p_total += p;
    }
    ErrorBudget {
        k,
        rabi,
        nu,
        gradient_ratio: chain.delta_omega() / rabi,
        p_total,
        contributions,
    }
}

/// Integer coefficients `α` in the decomposition
/// `|D| = |k − k′| δω + α J` of every spectator detuning, for a resonant
/// drive on spin `k` of `state`.
///
/// Returns `(k′ − k, α)` pairs in ascending spectator order. Each
/// `α ∈ {−2, …, 2}`; spectators at odd distance from an end spin see
/// different shifts than interior ones, which is what makes the error budget
/// state-dependent.
///
/// # Panics
/// If the decomposition does not land on an integer within `10⁻³ J` — that
/// happens only when `δω` and `J` are close enough to mix the two terms
/// (`δω ≤ 4J` territory), where `α` stops being meaningful.
pub fn alpha_coefficients(chain: &ChainSpec, state: BasisState, k: usize) -> Vec<(i64, i64)> {
    let nu = chain.transition_frequency(state, k).abs();
    let mut alphas = Vec::with_capacity(chain.len() - 1);
    for k_prime in 0..chain.len() {
        if k_prime == k {
            continue;
        }
        let d = chain.nonresonant_detuning(state, k, k_prime, nu).abs();
        let distance = k_prime.abs_diff(k) as f64;
        let alpha = (d - distance * chain.delta_omega()) / chain.j_coupling();
        let rounded = alpha.round();
        assert!(
            (alpha - rounded).abs() < 1e-3,
            "detuning decomposition is not integer (α = {alpha}); \
             need δω well above 4J for the α table to be meaningful"
        );
        alphas.push((k_prime as i64 - k as i64, rounded as i64));
    }
    alphas
}

/// Closed-form error minimum at the integer matching conditions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MinErrorEstimate {
    /// Estimated total error probability per π pulse at the minimum.
    pub p_min: f64,
    /// Leading term `1/(2Q)² = (Ω/δω)²/4 · 4 = 1/q²` — the floor set by the
    /// nearest neighbors alone.
    pub leading: f64,
    /// Residual distant-spectator contributions `(k′ − k, probability)`.
    pub per_spectator: Vec<(i64, f64)>,
}

/// Evaluates the closed-form minimum of the per-pulse error at
/// `δω/Ω = 2Q` and `K = 2𝒦`, given the `α` table of the addressed
/// state ([`alpha_coefficients`]).
///
/// The estimate is
/// `P ≈ 1/(4Q²) · [1 − (2𝒦/Q)(α₋₁ + α₊₁)(1 − 1/32𝒦²) + (π/32𝒦)² Σ (α/(k−k′))²]`,
/// where the sum runs over spectators at distance ≥ 2. Valid for `Q ≫ 1`.
///
/// # Panics
/// If `q == 0`, `k_script == 0`, or any table entry has distance 0.
pub fn min_error_estimate(q: u64, k_script: u64, alphas: &[(i64, i64)]) -> MinErrorEstimate {
    assert!(q >= 1, "gradient quantum number Q must be ≥ 1");
    assert!(k_script >= 1, "pulse quantum number 𝒦 must be ≥ 1");
    let qf = q as f64;
    let kf = k_script as f64;
    let leading = 1.0 / (4.0 * qf * qf);
    let mut neighbor_alpha = 0i64;
    let mut distant_sum = 0.0;
    let mut per_spectator = Vec::new();
    for &(offset, alpha) in alphas {
        assert!(offset != 0, "spectator offset k′ − k cannot be 0");
        if offset.abs() == 1 {
            neighbor_alpha += alpha;
        } else {
            let relative = (PI / (32.0 * kf)).powi(2) * (alpha as f64 / offset as f64).powi(2);
            per_spectator.push((offset, leading * relative));
            distant_sum += relative;
        }
    }
    let neighbor_correction =
        (2.0 * kf / qf) * neighbor_alpha as f64 * (1.0 - 1.0 / (32.0 * kf * kf));
    MinErrorEstimate {
        p_min: leading * (1.0 - neighbor_correction + distant_sum),
        leading,
        per_spectator,
    }
}

/// Diagnosis of a `(δω/Ω, K)` working point against the integer matching
/// conditions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OptimalityCheck {
    /// Whether both integer conditions hold: `δω/Ω = 2Q` and `K = 2𝒦`.
    pub optimal: bool,
    /// `Q` when `δω/Ω` is an even integer.
    pub q: Option<u64>,
    /// `𝒦` when `K` is even.
    pub k_script: Option<u64>,
    /// Nearest even-integer gradient ratio.
    pub nearest_ratio: f64,
    /// Whether the closed-form minimum is trustworthy (`Q ≥ 10`).
    pub q_is_large: bool,
}

/// Checks a gradient ratio `δω/Ω` and 2πK index `K` against the optimal
/// operating conditions `δω/Ω = 2Q`, `K = 2𝒦` with integer `Q`, `𝒦`.
pub fn check_optimal(ratio: f64, big_k: u32) -> OptimalityCheck {
    assert!(ratio.is_finite() && ratio > 0.0, "gradient ratio must be positive");
    let half = 0.5 * ratio;
    let q_rounded = half.round();
    let ratio_is_even = q_rounded >= 1.0 && (half - q_rounded).abs() <= 1e-9 * half.max(1.0);
    let q = if ratio_is_even {
        Some(q_rounded as u64)
    } else {
        None
    };
    let k_script = if big_k >= 2 && big_k % 2 == 0 {
        Some(u64::from(big_k / 2))
    } else {
        None
    };
    OptimalityCheck {
        optimal: q.is_some() && k_script.is_some(),
        q,
        k_script,
        nearest_ratio: 2.0 * q_rounded.max(1.0),
        q_is_large: q_rounded >= 10.0,
    }
}

/// Approximate spectator detuning `|D|/Ω ≈ 2Q·|k − k′| + α(2𝒦 − 1/16𝒦)` at
/// the optimal working point — handy for reading oscillation phases off a
/// sweep without rebuilding the chain.
pub fn approx_detuning_ratio(q: u64, k_script: u64, distance: u64, alpha: i64) -> f64 {
    assert!(distance >= 1, "spectator distance must be ≥ 1");
    assert!(q >= 1 && k_script >= 1, "Q and 𝒦 must be ≥ 1");
    let kf = k_script as f64;
    2.0 * q as f64 * distance as f64 + alpha as f64 * (2.0 * kf - 1.0 / (16.0 * kf))
}
