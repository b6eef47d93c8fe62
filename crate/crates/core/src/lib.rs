//! Simulation and error analysis for a linear chain of Ising-coupled
//! spin-1/2 qubits addressed by rectangular rf pulses.
//!
//! The chain sits in a magnetic field with a uniform gradient, so every spin
//! has its own Larmor frequency and can be addressed in frequency space.
//! Nearest neighbors are coupled by an Ising interaction of strength `J`,
//! which makes a spin's resonance frequency depend on the state of its
//! neighbors — the basis of conditional logic, but also the source of
//! unwanted off-resonant transitions during every pulse.
//!
//! The crate provides three complementary tools:
//!
//! * **Exact evolution** ([`evolve::apply_pulse_exact`]): Krylov-space
//!   propagation of the full 2^L state vector in the frame rotating with the
//!   drive, with no rotating-wave approximation beyond the circularly
//!   polarized drive itself.
//! * **Pair dynamics** ([`pulse::evolve_pair`], [`evolve::apply_pulse_pairs`]):
//!   the closed-form two-level solution that treats each basis state and its
//!   driven-spin partner as an independent pair — the workhorse approximation
//!   for pulse design.
//! * **Perturbative error analysis** ([`perturb`]): first-order amplitudes of
//!   the unwanted off-resonant transitions, per-spin error budgets, and the
//!   closed-form minimum reached when the field gradient and pulse strength
//!   satisfy the integer matching conditions.
//!
//! Conventions used throughout: ħ = 1, all frequencies are angular and share
//! a single unit per run (multiples of the Ising constant `J` by convention).
//! Bit `0` of a basis state is the *lower* Zeeman level (spin projection
//! +1/2 along the field), so flipping `0 → 1` absorbs one quantum at the
//! spin's transition frequency. Spin `k = 0` is the rightmost character in a
//! bit string and contributes `2^k` to the basis index.

pub mod chain;
pub mod error;
pub mod evolve;
pub mod perturb;
pub mod pulse;
pub mod statevec;
pub mod sweep;

mod generator;
mod krylov;

pub use chain::{BasisState, ChainSpec};
pub use error::{Error, Result};
pub use evolve::{
    apply_pulse_dense, apply_pulse_exact, apply_pulse_pairs, classify_outcomes, DENSE_MAX_LEN,
};
pub use perturb::{
    alpha_coefficients, check_optimal, error_probability, forced_pair_amplitudes,
    min_error_estimate, pi_pulse_amplitudes, ErrorBudget, ForcedPairAmplitudes, InitialLevel,
    MinErrorEstimate, OptimalityCheck,
};
pub use pulse::{
    effective_rabi, evolve_pair, pi_pulse_duration, rabi_for_2pik, PairAmplitudes, Pulse,
};
pub use statevec::{ErrorReport, OutcomeLine, StateVector, MAX_CHAIN_LEN};
pub use sweep::{
    error_vs_length, find_minima, parabolic_refine, random_basis_states, ratio_grid,
    single_excitation_state, sweep_error, Method, Minimum, SweepCurve, SweepMetadata,
};
