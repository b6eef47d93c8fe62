//! Full state vectors over the chain's computational basis, snapshot I/O,
//! and per-basis-state outcome reports.
//!
//! Snapshots exist in two interchangeable encodings: a JSON document and a
//! compact little-endian binary layout. Both carry the chain length and a
//! free-form unit label so a file is interpretable on its own.

use std::io::{Read, Write};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::chain::BasisState;
use crate::error::{Error, Result};

/// Longest chain whose state vector this crate will allocate (2^24
/// amplitudes, 256 MiB; Krylov propagation needs ~50 such buffers).
pub const MAX_CHAIN_LEN: usize = 24;

/// Magic bytes opening a binary snapshot.
const BINARY_MAGIC: &[u8; 8] = b"SPNSTATE";
/// Binary and JSON snapshot format revision.
const SNAPSHOT_VERSION: u32 = 1;

/// Complex amplitudes of an `L`-spin chain over all `2^L` basis states,
/// indexed by [`BasisState::index`].
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    length: usize,
    amps: Vec<Complex64>,
}

impl StateVector {
    /// State vector with all population on one basis state.
    pub fn from_basis(state: BasisState) -> Result<Self> {
        let length = state.len();
        if length > MAX_CHAIN_LEN {
            return Err(Error::ChainTooLong {
                length,
                max: MAX_CHAIN_LEN,
            });
        }
        let mut amps = vec![Complex64::new(0.0, 0.0); 1 << length];
        amps[state.index()] = Complex64::new(1.0, 0.0);
        Ok(Self { length, amps })
    }

    /// State vector from raw amplitudes (basis order, `2^length` entries).
    pub fn new(length: usize, amps: Vec<Complex64>) -> Result<Self> {
        if length == 0 || length > MAX_CHAIN_LEN {
            return Err(Error::ChainTooLong {
                length,
                max: MAX_CHAIN_LEN,
            });
        }
        let expected = 1usize << length;
        if amps.len() != expected {
            return Err(Error::DimensionMismatch {
                got: amps.len(),
                expected,
                length,
            });
        }
        Ok(Self { length, amps })
    }

    /// Number of spins.
    pub fn len(&self) -> usize {
        self.length
    }

    /// `true` only for the (disallowed) zero-length state.
    pub fn is_empty(&self) -> bool {
        self.length == 0
    }

    /// Hilbert-space dimension `2^L`.
    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    /// All amplitudes in basis order.
    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    /// Amplitude of one basis index.
    pub fn amplitude(&self, index: usize) -> Complex64 {
        self.amps[index]
    }

    /// Euclidean norm (1 for a physical state; evolution preserves it).
    pub fn norm(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Probability of measuring basis index `index`.
    pub fn probability(&self, index: usize) -> f64 {
        self.amps[index].norm_sqr()
    }

    /// Probability of measuring a particular basis state.
    pub fn probability_of(&self, state: BasisState) -> f64 {
        assert_eq!(state.len(), self.length, "basis state length mismatch");
        self.probability(state.index())
    }

    /// Writes the JSON snapshot encoding. `units` is a free-form label for
    /// the frequency unit the producing run used (e.g. `"J"`).
    pub fn write_snapshot_json<W: Write>(&self, units: &str, writer: W) -> Result<()> {
        let doc = JsonSnapshot {
            format: "spinpulse-state".to_owned(),
            version: SNAPSHOT_VERSION,
            length: self.length,
            units: units.to_owned(),
            convention: CONVENTION_NOTE.to_owned(),
            amplitudes: self.amps.iter().map(|a| [a.re, a.im]).collect(),
        };
        serde_json::to_writer(writer, &doc)?;
        Ok(())
    }

    /// Reads a JSON snapshot; returns the state and its unit label.
    pub fn read_snapshot_json<R: Read>(reader: R) -> Result<(Self, String)> {
        let doc: JsonSnapshot = serde_json::from_reader(reader)?;
        if doc.format != "spinpulse-state" {
            return Err(Error::Snapshot(format!(
                "unexpected format tag {:?}",
                doc.format
            )));
        }
        if doc.version != SNAPSHOT_VERSION {
            return Err(Error::Snapshot(format!(
                "unsupported snapshot version {}",
                doc.version
            )));
        }
        let amps = doc
            .amplitudes
            .iter()
            .map(|&[re, im]| Complex64::new(re, im))
            .collect();
        Ok((Self::new(doc.length, amps)?, doc.units))
    }

    /// Writes the binary snapshot encoding: magic `SPNSTATE`, version,
    /// chain length, unit label, then `2^L` little-endian `(re, im)` f64
    /// pairs in basis order.
    pub fn write_snapshot_binary<W: Write>(&self, units: &str, mut writer: W) -> Result<()> {
        writer.write_all(BINARY_MAGIC)?;
        writer.write_all(&SNAPSHOT_VERSION.to_le_bytes())?;
        writer.write_all(&(self.length as u32).to_le_bytes())?;
        writer.write_all(&(units.len() as u32).to_le_bytes())?;
        writer.write_all(units.as_bytes())?;
        for a in &self.amps {
            writer.write_all(&a.re.to_le_bytes())?;
            writer.write_all(&a.im.to_le_bytes())?;
        }
        Ok(())
    }

    /// Reads a binary snapshot; returns the state and its unit label.
    pub fn read_snapshot_binary<R: Read>(mut reader: R) -> Result<(Self, String)> {
        let mut magic = [0u8; 8];
        reader.read_exact(&mut magic)?;
        if &magic != BINARY_MAGIC {
            return Err(Error::Snapshot("bad magic bytes".to_owned()));
        }
        let version = read_u32(&mut reader)?;
        if version != SNAPSHOT_VERSION {
            return Err(Error::Snapshot(format!(
                "unsupported snapshot version {version}"
            )));
        }
        let length = read_u32(&mut reader)? as usize;
        if length == 0 || length > MAX_CHAIN_LEN {
            return Err(Error::Snapshot(format!(
                "chain length {length} out of range"
            )));
        }
        let units_len = read_u32(&mut reader)? as usize;
        let mut units_bytes = vec![0u8; units_len];
        reader.read_exact(&mut units_bytes)?;
        let units = String::from_utf8(units_bytes)
            .map_err(|e| Error::Snapshot(format!("unit label is not UTF-8: {e}")))?;
        let dim = 1usize << length;
        let mut amps = Vec::with_capacity(dim);
        let mut buf = [0u8; 16];
        for _ in 0..dim {
            reader.read_exact(&mut buf)?;
            let re = f64::from_le_bytes(buf[0..8].try_into().expect("slice length"));
            let im = f64::from_le_bytes(buf[8..16].try_into().expect("slice length"));
            amps.push(Complex64::new(re, im));
        }
        Ok((Self::new(length, amps)?, units))
    }
}

/// One-line statement of the basis conventions, embedded in JSON snapshots.
const CONVENTION_NOTE: &str = "bit 0 = lower Zeeman level (spin +1/2); spin 0 is the \
                               rightmost bit; index = sum of b_k 2^k; hbar = 1";

#[derive(Serialize, Deserialize)]
struct JsonSnapshot {
    format: String,
    version: u32,
    length: usize,
    units: String,
    convention: String,
    amplitudes: Vec<[f64; 2]>,
}

fn read_u32<R: Read>(reader: &mut R) -> Result<u32> {
    let mut buf = [0u8; 4];
    reader.read_exact(&mut buf)?;
    Ok(u32::from_le_bytes(buf))
}

/// Probability of one measurement outcome after a pulse.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OutcomeLine {
    /// Bit string of the outcome (spin 0 rightmost).
    pub state: String,
    /// Basis index of the outcome.
    pub index: usize,
    /// Measurement probability.
    pub probability: f64,
    /// Spins at which the outcome differs from the *initial* state.
    pub flipped: Vec<usize>,
}

/// Where the population went after driving spin `k` of an initial basis
/// state: the intended transition, the initial state's residue, and
/// everything unwanted.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ErrorReport {
    /// Number of spins.
    pub length: usize,
    /// Initial basis state (bit string).
    pub initial: String,
    /// The driven spin.
    pub driven_spin: usize,
    /// Target of the intended transition, `flip(initial, k)` (bit string).
    pub intended: String,
    /// Probability of the intended outcome.
    pub intended_probability: f64,
    /// Probability left on the initial state.
    pub initial_residual: f64,
    /// Total probability outside the driven pair — the per-pulse error.
    pub unwanted_total: f64,
    /// Every basis state's probability, descending (ties by index).
    pub outcomes: Vec<OutcomeLine>,
}

impl ErrorReport {
    /// Builds the report from a post-pulse state vector.
    pub(crate) fn from_state(psi: &StateVector, initial: BasisState, k: usize) -> Self {
        assert_eq!(psi.len(), initial.len(), "state vector length mismatch");
        let target = initial.flip(k);
        let mut outcomes: Vec<OutcomeLine> = (0..psi.dim())
            .map(|index| {
                let state = BasisState::from_index(index, psi.len());
                OutcomeLine {
                    state: state.bit_string(),
                    index,
                    probability: psi.probability(index),
                    flipped: initial.flipped_spins(state),
                }
            })
            .collect();
        outcomes.sort_by(|a, b| {
            b.probability
                .partial_cmp(&a.probability)
                .expect("probabilities are finite")
                .then(a.index.cmp(&b.index))
        });
        let intended_probability = psi.probability_of(target);
        let initial_residual = psi.probability_of(initial);
        ErrorReport {
            length: psi.len(),
            initial: initial.bit_string(),
            driven_spin: k,
            intended: target.bit_string(),
            intended_probability,
            initial_residual,
            unwanted_total: psi.norm().powi(2) - intended_probability - initial_residual,
            outcomes,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn sample_state() -> StateVector {
        let mut amps = vec![Complex64::new(0.0, 0.0); 8];
        amps[1] = Complex64::new(0.6, 0.0);
        amps[5] = Complex64::new(0.0, -0.8);
        StateVector::new(3, amps).unwrap()
    }

    #[test]
    fn basis_state_vector_has_unit_norm() {
        let psi = StateVector::from_basis(BasisState::from_index(5, 3)).unwrap();
        assert_abs_diff_eq!(psi.norm(), 1.0);
        assert_abs_diff_eq!(psi.probability(5), 1.0);
        assert_abs_diff_eq!(psi.probability(0), 0.0);
    }

    #[test]
    fn dimension_mismatch_is_rejected() {
        let err = StateVector::new(3, vec![Complex64::new(1.0, 0.0); 7]).unwrap_err();
        assert!(matches!(err, Error::DimensionMismatch { got: 7, expected: 8, .. }));
    }

    #[test]
    fn capacity_limit_is_enforced() {
        let err = StateVector::new(25, Vec::new()).unwrap_err();
        assert!(matches!(err, Error::ChainTooLong { length: 25, max: 24 }));
    }

    #[test]
    fn json_snapshot_round_trips() {
        let psi = sample_state();
        let mut buf = Vec::new();
        psi.write_snapshot_json("J", &mut buf).unwrap();
        let (back, units) = StateVector::read_snapshot_json(buf.as_slice()).unwrap();
        assert_eq!(units, "J");
        assert_eq!(back.len(), 3);
        for (a, b) in back.amplitudes().iter().zip(psi.amplitudes()) {
            assert!((a - b).norm() == 0.0, "JSON snapshot must be lossless");
        }
    }

    #[test]
    fn binary_snapshot_round_trips() {
        let psi = sample_state();
        let mut buf = Vec::new();
        psi.write_snapshot_binary("rad/s", &mut buf).unwrap();
        let (back, units) = StateVector::read_snapshot_binary(buf.as_slice()).unwrap();
        assert_eq!(units, "rad/s");
        assert_eq!(back, psi);
    }

    #[test]
    fn corrupted_snapshots_are_rejected() {
        let psi = sample_state();
        let mut buf = Vec::new();
        psi.write_snapshot_binary("J", &mut buf).unwrap();
        buf[0] = b'X';
        assert!(StateVector::read_snapshot_binary(buf.as_slice()).is_err());

        let mut buf = Vec::new();
        psi.write_snapshot_json("J", &mut buf).unwrap();
        let truncated = &buf[..buf.len() / 2];
        assert!(StateVector::read_snapshot_json(truncated).is_err());
    }

    #[test]
    fn error_report_orders_outcomes_and_accounts_population() {
        let initial = BasisState::from_index(1, 3); // |001⟩
        let psi = sample_state(); // 0.36 on |001⟩, 0.64 on |101⟩
        let report = ErrorReport::from_state(&psi, initial, 2);
        assert_eq!(report.intended, "101");
        assert_abs_diff_eq!(report.intended_probability, 0.64, epsilon = 1e-15);
        assert_abs_diff_eq!(report.initial_residual, 0.36, epsilon = 1e-15);
        assert_abs_diff_eq!(report.unwanted_total, 0.0, epsilon = 1e-15);
        assert_eq!(report.outcomes[0].index, 5);
        assert_eq!(report.outcomes[0].flipped, vec![2]);
        assert_eq!(report.outcomes[1].index, 1);
        assert!(report.outcomes[1].flipped.is_empty());
        assert_eq!(report.outcomes.len(), 8);
    }
}
