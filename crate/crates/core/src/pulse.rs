//! Rectangular rf pulses and the closed-form dynamics of a driven two-level
//! pair.
//!
//! A pulse drives one transition of the chain; within the pair approximation
//! every basis state `m` and its partner `p = flip(m, k)` form an isolated
//! two-level system whose evolution has the familiar Rabi solution, dressed
//! with detuning phases that carry the pulse's start time and rf phase.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::chain::{BasisState, ChainSpec};

/// A rectangular rf pulse: constant amplitude and frequency from `t_start`
/// to `t_start + duration`.
///
/// `nu` is the angular drive frequency, `rabi` the Rabi frequency `Ω > 0`
/// (proportional to the rf field amplitude), and `phase` the rf phase `φ`
/// at `t = 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Pulse {
    pub nu: f64,
    pub rabi: f64,
    pub phase: f64,
    pub t_start: f64,
    pub duration: f64,
}

impl Pulse {
    /// # Panics
    /// If `rabi` or `duration` is not strictly positive and finite, or `nu`
    /// is negative or non-finite.
    pub fn new(nu: f64, rabi: f64, phase: f64, t_start: f64, duration: f64) -> Self {
        assert!(nu.is_finite() && nu >= 0.0, "drive frequency must be ≥ 0");
        assert!(
            rabi.is_finite() && rabi > 0.0,
            "Rabi frequency must be positive"
        );
        assert!(
            duration.is_finite() && duration > 0.0,
            "pulse duration must be positive"
        );
        assert!(phase.is_finite() && t_start.is_finite(), "pulse parameters must be finite");
        Self {
            nu,
            rabi,
            phase,
            t_start,
            duration,
        }
    }

    /// π pulse resonant with the transition that flips spin `k` of `state`:
    /// `ν = |transition frequency|`, `τ = π/Ω`, zero phase, starting at `t = 0`.
    pub fn resonant_pi(chain: &ChainSpec, state: BasisState, k: usize, rabi: f64) -> Self {
        Self::new(
            chain.transition_frequency(state, k).abs(),
            rabi,
            0.0,
            0.0,
            pi_pulse_duration(rabi),
        )
    }

    /// Time at which the pulse ends.
    pub fn end_time(&self) -> f64 {
        self.t_start + self.duration
    }
}

/// Amplitudes of a two-level pair, ordered by diagonal energy.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PairAmplitudes {
    /// Amplitude of the lower-energy member of the pair.
    pub lower: Complex64,
    /// Amplitude of the upper-energy member.
    pub upper: Complex64,
}

impl PairAmplitudes {
    /// Pair fully in its lower level.
    pub fn lower_populated() -> Self {
        Self {
            lower: Complex64::new(1.0, 0.0),
            upper: Complex64::new(0.0, 0.0),
        }
    }

    /// Pair fully in its upper level.
    pub fn upper_populated() -> Self {
        Self {
            lower: Complex64::new(0.0, 0.0),
            upper: Complex64::new(1.0, 0.0),
        }
    }

    /// Total population `|lower|² + |upper|²` (conserved by [`evolve_pair`]).
    pub fn norm_sqr(&self) -> f64 {
        self.lower.norm_sqr() + self.upper.norm_sqr()
    }
}

/// Effective Rabi frequency `λ = √(δ² + Ω²)` of a pair detuned by `δ` and
/// driven at Rabi frequency `Ω`.
pub fn effective_rabi(delta: f64, rabi: f64) -> f64 {
    delta.hypot(rabi)
}

/// Rabi frequency satisfying the 2πK condition, `Ω = 2J / √(4K² − 1)`.
///
/// At this amplitude a pair detuned by exactly `±2J` — the generic
/// near-resonant error in a chain — completes `K` full cycles during a π
/// pulse and returns to its initial level: `λ τ/2 = πK` exactly.
///
/// # Panics
/// If `k == 0` or `j_coupling` is not strictly positive and finite.
pub fn rabi_for_2pik(j_coupling: f64, k: u32) -> f64 {
    assert!(k >= 1, "2πK condition needs K ≥ 1");
    assert!(
        j_coupling.is_finite() && j_coupling > 0.0,
        "Ising coupling must be finite and positive"
    );
    2.0 * j_coupling / (4.0 * f64::from(k) * f64::from(k) - 1.0).sqrt()
}

/// Duration `τ = π/Ω` of a resonant π pulse at Rabi frequency `rabi`.
pub fn pi_pulse_duration(rabi: f64) -> f64 {
    assert!(rabi.is_finite() && rabi > 0.0, "Rabi frequency must be positive");
    std::f64::consts::PI / rabi
}

/// Propagator of a single pair over the pulse, in the interaction picture of
/// the drive-free Hamiltonian (basis: `[lower, upper]`).
///
/// `delta` is the pair detuning `|E_upper − E_lower| − ν`. The matrix is
/// unitary and composes over consecutive sub-intervals of the same pulse.
pub(crate) fn pair_propagator(delta: f64, pulse: &Pulse) -> [[Complex64; 2]; 2] {
    let lambda = effective_rabi(delta, pulse.rabi);
    let (sin, cos) = (0.5 * lambda * pulse.duration).sin_cos();
    let mix = pulse.rabi / lambda * sin;
    let tilt = delta / lambda * sin;
    // e^{−iδτ/2}: free detuning phase accumulated by the lower level.
    let half_slip = Complex64::from_polar(1.0, -0.5 * delta * pulse.duration);
    // e^{i(δ t0 − φ + δτ/2)}: where in its beat cycle the drive catches the pair.
    let drive_phase = Complex64::from_polar(
        1.0,
        delta * pulse.t_start - pulse.phase + 0.5 * delta * pulse.duration,
    );
    let i = Complex64::i();
    [
        [
            Complex64::new(cos, tilt) * half_slip,
            i * mix * drive_phase.conj(),
        ],
        [
            i * mix * drive_phase,
            Complex64::new(cos, -tilt) * half_slip.conj(),
        ],
    ]
}

/// Evolves one two-level pair through a pulse.
///
/// `delta` is the pair detuning at the drive frequency; `amps` are the
/// interaction-picture amplitudes at `pulse.t_start`, and the result holds
/// them at `pulse.end_time()`. Population is conserved exactly (the
/// propagator is unitary), and evolving through two back-to-back
/// sub-intervals equals evolving through their union.
pub fn evolve_pair(amps: PairAmplitudes, delta: f64, pulse: &Pulse) -> PairAmplitudes {
    let u = pair_propagator(delta, pulse);
    PairAmplitudes {
        lower: u[0][0] * amps.lower + u[0][1] * amps.upper,
        upper: u[1][0] * amps.lower + u[1][1] * amps.upper,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::{assert_abs_diff_eq, assert_relative_eq};
    use proptest::prelude::*;
    use std::f64::consts::PI;

    #[test]
    fn effective_rabi_reference_values() {
        assert_abs_diff_eq!(effective_rabi(0.0, 2.0), 2.0);
        assert_abs_diff_eq!(effective_rabi(3.0, 4.0), 5.0);
        // Near-resonant error pair at δ = ±2J.
        let omega = rabi_for_2pik(1.0, 2);
        assert_abs_diff_eq!(
            effective_rabi(2.0, omega),
            (4.0 + omega * omega).sqrt(),
            epsilon = 1e-15
        );
    }

    #[test]
    fn rabi_for_2pik_reference_values() {
        assert_relative_eq!(rabi_for_2pik(1.0, 2), 2.0 / 15.0f64.sqrt(), epsilon = 1e-15);
        assert_relative_eq!(rabi_for_2pik(1.0, 5), 2.0 / 99.0f64.sqrt(), epsilon = 1e-15);
        assert_relative_eq!(
            rabi_for_2pik(1.0, 10),
            2.0 / 399.0f64.sqrt(),
            epsilon = 1e-15
        );
        // Large K: Ω·K/J → 1 (pulses must slow down as 1/K).
        let k = 1_000_000u32;
        assert_relative_eq!(
            rabi_for_2pik(1.0, k) * f64::from(k),
            1.0,
            epsilon = 1e-9
        );
    }

    #[test]
    fn pi_pulse_inverts_a_resonant_pair() {
        let pulse = Pulse::new(5.0, 0.8, 0.3, 1.7, pi_pulse_duration(0.8));
        let out = evolve_pair(PairAmplitudes::lower_populated(), 0.0, &pulse);
        assert_abs_diff_eq!(out.lower.norm(), 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(out.upper.norm(), 1.0, epsilon = 1e-15);
        // Flip direction carries the drive phase: upper amplitude is i·e^{−iφ}.
        let expected = Complex64::i() * Complex64::from_polar(1.0, -0.3);
        assert_abs_diff_eq!((out.upper - expected).norm(), 0.0, epsilon = 1e-14);
    }

    #[test]
    fn detuned_pair_splits_population_at_half_cycle() {
        // δ = Ω, τ = π/λ: transition probability (Ω/λ)² sin²(λτ/2) = 1/2.
        let rabi = 1.3;
        let lambda = effective_rabi(rabi, rabi);
        let pulse = Pulse::new(2.0, rabi, 0.0, 0.0, PI / lambda);
        let out = evolve_pair(PairAmplitudes::lower_populated(), rabi, &pulse);
        assert_abs_diff_eq!(out.upper.norm_sqr(), 0.5, epsilon = 1e-12);
        assert_abs_diff_eq!(out.lower.norm_sqr(), 0.5, epsilon = 1e-12);
    }

    /// Under the 2πK condition a δ = ±2J pair completes K full cycles during
    /// a π pulse: λτ/2 lands on πK exactly and the transition probability
    /// vanishes to rounding.
    #[test]
    fn two_pi_k_condition_suppresses_near_resonant_flips() {
        for k in 1..=12u32 {
            let j = 0.7;
            let rabi = rabi_for_2pik(j, k);
            let lambda = effective_rabi(2.0 * j, rabi);
            let tau = pi_pulse_duration(rabi);
            assert_relative_eq!(
                0.5 * lambda * tau,
                PI * f64::from(k),
                epsilon = 1e-12
            );
            for delta in [2.0 * j, -2.0 * j] {
                let pulse = Pulse::new(11.0, rabi, 0.4, 2.2, tau);
                let out = evolve_pair(PairAmplitudes::lower_populated(), delta, &pulse);
                assert!(
                    out.upper.norm_sqr() <= 1e-20,
                    "K = {k}: residual flip probability {}",
                    out.upper.norm_sqr()
                );
            }
        }
    }

    #[test]
    fn upper_initial_pair_mirrors_lower_initial() {
        let pulse = Pulse::new(3.0, 0.9, 1.1, 0.5, 2.4);
        let delta = 0.37;
        let down = evolve_pair(PairAmplitudes::upper_populated(), delta, &pulse);
        let up = evolve_pair(PairAmplitudes::lower_populated(), delta, &pulse);
        // Transition probabilities are symmetric between the two directions.
        assert_abs_diff_eq!(
            down.lower.norm_sqr(),
            up.upper.norm_sqr(),
            epsilon = 1e-14
        );
    }

    fn arbitrary_amps(re0: f64, im0: f64, re1: f64, im1: f64) -> PairAmplitudes {
        let raw_lower = Complex64::new(re0, im0);
        let raw_upper = Complex64::new(re1, im1);
        let norm = (raw_lower.norm_sqr() + raw_upper.norm_sqr()).sqrt().max(1e-3);
        PairAmplitudes {
            lower: raw_lower / norm,
            upper: raw_upper / norm,
        }
    }

    proptest! {
        /// The pair propagator conserves population for any parameters.
        #[test]
        fn evolution_is_unitary(
            delta in -20.0f64..20.0,
            rabi in 1e-3f64..10.0,
            phase in -7.0f64..7.0,
            t_start in -5.0f64..5.0,
            duration in 1e-3f64..50.0,
            re0 in -1.0f64..1.0, im0 in -1.0f64..1.0,
            re1 in -1.0f64..1.0, im1 in -1.0f64..1.0,
        ) {
            let amps = arbitrary_amps(re0, im0, re1, im1);
            let pulse = Pulse::new(8.0, rabi, phase, t_start, duration);
            let out = evolve_pair(amps, delta, &pulse);
            prop_assert!((out.norm_sqr() - amps.norm_sqr()).abs() < 1e-12);
        }

        /// Splitting a pulse at any interior time composes exactly: the pair
        /// solution is the true propagator, not a per-pulse approximation.
        #[test]
        fn evolution_composes_over_subintervals(
            delta in -10.0f64..10.0,
            rabi in 1e-2f64..5.0,
            phase in -7.0f64..7.0,
            t_start in -5.0f64..5.0,
            duration in 0.1f64..20.0,
            split in 0.05f64..0.95,
            re0 in -1.0f64..1.0, im0 in -1.0f64..1.0,
            re1 in -1.0f64..1.0, im1 in -1.0f64..1.0,
        ) {
            let amps = arbitrary_amps(re0, im0, re1, im1);
            let whole = Pulse::new(8.0, rabi, phase, t_start, duration);
            let first = Pulse::new(8.0, rabi, phase, t_start, split * duration);
            let second = Pulse::new(
                8.0,
                rabi,
                phase,
                t_start + split * duration,
                (1.0 - split) * duration,
            );
            let direct = evolve_pair(amps, delta, &whole);
            let stepped = evolve_pair(evolve_pair(amps, delta, &first), delta, &second);
            prop_assert!((direct.lower - stepped.lower).norm() < 1e-12);
            prop_assert!((direct.upper - stepped.upper).norm() < 1e-12);
        }
    }
}
