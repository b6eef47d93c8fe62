//! Error-versus-gradient sweeps, minima location, and curve serialization.
//!
//! A sweep fixes the chain's coupling `J`, the addressed state and spin, and
//! the 2πK pulse index `K` (which pins the Rabi frequency `Ω`), then varies
//! the gradient-to-drive ratio `δω/Ω`. Values are per-pulse error
//! probabilities, computed either from the first-order budget (`analytic`,
//! cheap, any chain length) or from full state-vector propagation (`exact`).

use std::fmt;
use std::io::Write as IoWrite;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::chain::{BasisState, ChainSpec};
use crate::error::{Error, Result};
use crate::evolve::{apply_pulse_exact, classify_outcomes};
use crate::perturb::error_probability;
use crate::pulse::{rabi_for_2pik, Pulse};
use crate::statevec::StateVector;

/// How sweep values are computed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    /// First-order perturbative error budget.
    Analytic,
    /// Full state-vector propagation through the resonant π pulse.
    Exact,
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Method::Analytic => "analytic",
            Method::Exact => "exact",
        })
    }
}

/// What a sweep curve was computed from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepMetadata {
    /// Chain length.
    pub length: usize,
    /// Addressed spin.
    pub k: usize,
    /// 2πK pulse index fixing `Ω = 2J/√(4K²−1)`.
    pub big_k: u32,
    /// Ising coupling (the frequency unit of the run).
    pub j_coupling: f64,
    /// Initial basis state (bit string).
    pub state: String,
    /// Computation method.
    pub method: Method,
    /// RNG seed, when the state was drawn rather than given.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub seed: Option<u64>,
}

/// Per-pulse error probability versus the gradient ratio `δω/Ω`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepCurve {
    pub metadata: SweepMetadata,
    /// Gradient ratios, strictly increasing.
    pub ratios: Vec<f64>,
    /// Error probability at each ratio.
    pub values: Vec<f64>,
}

/// A grid-exact local minimum of a sweep curve.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Minimum {
    /// Index into the curve arrays.
    pub index: usize,
    /// Gradient ratio at the minimum.
    pub ratio: f64,
    /// Curve value at the minimum.
    pub value: f64,
}

impl SweepCurve {
    /// Writes the curve as CSV: `# key = value` comment lines from the
    /// metadata (plus any caller-provided extras), one header row, then
    /// `ratio,value,method` records with full float precision.
    pub fn write_csv<W: IoWrite>(&self, extra_comments: &[String], mut w: W) -> Result<()> {
        writeln!(w, "# spinpulse sweep curve")?;
        writeln!(w, "# length = {}", self.metadata.length)?;
        writeln!(w, "# k = {}", self.metadata.k)?;
        writeln!(w, "# big_k = {}", self.metadata.big_k)?;
        writeln!(w, "# j_coupling = {:.16e}", self.metadata.j_coupling)?;
        writeln!(w, "# state = {}", self.metadata.state)?;
        if let Some(seed) = self.metadata.seed {
            writeln!(w, "# seed = {seed}")?;
        }
        for line in extra_comments {
            writeln!(w, "# {line}")?;
        }
        writeln!(w, "ratio,value,method")?;
        for (r, v) in self.ratios.iter().zip(&self.values) {
            writeln!(w, "{r:.16e},{v:.16e},{}", self.metadata.method)?;
        }
        Ok(())
    }
}

/// Uniform grid of `points` gradient ratios from `min` to `max` inclusive.
pub fn ratio_grid(min: f64, max: f64, points: usize) -> Result<Vec<f64>> {
    if !(min.is_finite() && max.is_finite()) || min <= 0.0 {
        return Err(Error::BadGrid(format!(
            "ratios must be finite and positive, got [{min}, {max}]"
        )));
    }
    if points == 0 {
        return Err(Error::BadGrid("grid needs at least one point".to_owned()));
    }
    if points == 1 {
        if min != max {
            return Err(Error::BadGrid(
                "a single-point grid needs min == max".to_owned(),
            ));
        }
        return Ok(vec![min]);
    }
    if min >= max {
        return Err(Error::BadGrid(format!(
            "need min < max, got [{min}, {max}]"
        )));
    }
    let step = (max - min) / (points - 1) as f64;
    Ok((0..points)
        .map(|i| {
            if i == points - 1 {
                max
            } else {
                min + i as f64 * step
            }
        })
        .collect())
}

fn validate_grid(grid: &[f64]) -> Result<()> {
    if grid.is_empty() {
        return Err(Error::BadGrid("grid is empty".to_owned()));
    }
    for pair in grid.windows(2) {
        if pair[1] <= pair[0] {
            return Err(Error::BadGrid(
                "grid must be strictly increasing".to_owned(),
            ));
        }
    }
    if grid[0] <= 0.0 || !grid.iter().all(|r| r.is_finite()) {
        return Err(Error::BadGrid(
            "ratios must be finite and positive".to_owned(),
        ));
    }
    Ok(())
}

/// Sweeps the per-pulse error of a resonant π pulse on spin `k` of `state`
/// over the gradient ratios in `grid`.
///
/// At each ratio the chain is rebuilt with `δω = ratio · Ω` (and the
/// conventional `ω_0 = δω`); error budgets depend only on `δω` and `J`, so
/// this choice is a pure convention. Points are evaluated in parallel.
pub fn sweep_error(
    length: usize,
    j_coupling: f64,
    state: BasisState,
    k: usize,
    big_k: u32,
    grid: &[f64],
    method: Method,
) -> Result<SweepCurve> {
    assert_eq!(state.len(), length, "state length must match chain length");
    assert!(k < length, "driven spin {k} out of range");
    validate_grid(grid)?;
    let rabi = rabi_for_2pik(j_coupling, big_k);
    let values: Result<Vec<f64>> = grid
        .par_iter()
        .map(|&ratio| error_at_ratio(length, j_coupling, state, k, rabi, ratio, method))
        .collect();
    Ok(SweepCurve {
        metadata: SweepMetadata {
            length,
            k,
            big_k,
            j_coupling,
            state: state.bit_string(),
            method,
            seed: None,
        },
        ratios: grid.to_vec(),
        values: values?,
    })
}

fn error_at_ratio(
    length: usize,
    j_coupling: f64,
    state: BasisState,
    k: usize,
    rabi: f64,
    ratio: f64,
    method: Method,
) -> Result<f64> {
    let chain = ChainSpec::new(length, ratio * rabi, j_coupling);
    match method {
        Method::Analytic => Ok(error_probability(&chain, state, k, rabi).p_total),
        Method::Exact => {
            let psi = StateVector::from_basis(state)?;
            let pulse = Pulse::resonant_pi(&chain, state, k, rabi);
            let out = apply_pulse_exact(&psi, &chain, &pulse)?;
            Ok(classify_outcomes(&out, state, k).unwanted_total)
        }
    }
}

/// Grid-exact interior local minima of a curve (strictly below both
/// neighbors); needs at least three points.
pub fn find_minima(curve: &SweepCurve) -> Result<Vec<Minimum>> {
    if curve.ratios.len() < 3 {
        return Err(Error::BadGrid(format!(
            "need at least 3 points to locate minima, got {}",
            curve.ratios.len()
        )));
    }
    let v = &curve.values;
    Ok((1..v.len() - 1)
        .filter(|&i| v[i] < v[i - 1] && v[i] < v[i + 1])
        .map(|index| Minimum {
            index,
            ratio: curve.ratios[index],
            value: curve.values[index],
        })
        .collect())
}

/// Parabolic refinement of a grid minimum through its two neighbors;
/// returns the interpolated `(ratio, value)`. Off by default everywhere so
/// emitted curves and minima stay grid-exact.
pub fn parabolic_refine(curve: &SweepCurve, minimum: &Minimum) -> (f64, f64) {
    let i = minimum.index;
    assert!(
        i >= 1 && i + 1 < curve.values.len(),
        "refinement needs both neighbors"
    );
    let (x0, x1, x2) = (curve.ratios[i - 1], curve.ratios[i], curve.ratios[i + 1]);
    let (y0, y1, y2) = (curve.values[i - 1], curve.values[i], curve.values[i + 1]);
    let curvature = y0 - 2.0 * y1 + y2;
    if curvature <= 0.0 {
        return (x1, y1); // flat or inverted triplet: keep the grid point
    }
    let h = 0.5 * (x2 - x0);
    let ratio = x1 + 0.5 * h * (y0 - y2) / curvature;
    let value = y1 - (y0 - y2) * (y0 - y2) / (8.0 * curvature);
    (ratio, value)
}

/// Analytic error-versus-ratio curves for a family of chain lengths, each
/// addressed at its center spin `k = ⌊L/2⌋` with the single-excitation state
/// that has the bit at `k − 1` set — the canonical worst-ish case with one
/// near neighbor excited.
///
/// `k_script` is the half-index `𝒦` of the pulse condition (`K = 2𝒦`).
pub fn error_vs_length(
    lengths: &[usize],
    j_coupling: f64,
    k_script: u32,
    grid: &[f64],
) -> Result<Vec<SweepCurve>> {
    lengths
        .iter()
        .map(|&length| {
            assert!(length >= 3, "length {length} too short for the canonical state");
            let k = length / 2;
            let state = single_excitation_state(length, k - 1);
            sweep_error(
                length,
                j_coupling,
                state,
                k,
                2 * k_script,
                grid,
                Method::Analytic,
            )
        })
        .collect()
}

/// Basis state with exactly one bit set.
pub fn single_excitation_state(length: usize, site: usize) -> BasisState {
    assert!(site < length, "site {site} out of range");
    BasisState::from_index(1usize << site, length)
}

/// `count` basis states drawn uniformly (with replacement) from a ChaCha8
/// stream seeded by `seed` — reproducible across runs and platforms.
pub fn random_basis_states(length: usize, count: usize, seed: u64) -> Vec<BasisState> {
    assert!(length >= 1, "chain needs at least one spin");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let index = rng.random_range(0..(1u64 << length));
            BasisState::from_index(index as usize, length)
        })
        .collect()
}
