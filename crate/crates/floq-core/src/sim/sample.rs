//! Born-rule measurement sampling and the depolarizing channel.

use alloc::{format, string::String, vec::Vec};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::lattice::Axis;
use crate::sim::state::StateVector;

/// Per-site measurement basis.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MeasBasis {
    /// Computational basis; outcome bit 1 means `Z = -1`.
    Z,
    /// Hadamard-rotated basis; outcome bit 1 means `X = -1` (the `|->`
    /// state).
    X,
}

/// Raw bitstring samples from one measurement setting.
#[derive(Debug, Clone, PartialEq)]
pub struct ShotBatch {
    /// Number of sites.
    pub sites: u32,
    /// Basis per site, length `sites`.
    pub bases: Vec<MeasBasis>,
    /// One outcome word per shot; site `i` owns bit `i`.
    pub outcomes: Vec<u64>,
}

impl ShotBatch {
    /// Number of shots.
    pub fn len(&self) -> usize {
        self.outcomes.len()
    }

    /// True when no shots are stored.
    pub fn is_empty(&self) -> bool {
        self.outcomes.is_empty()
    }

    /// The common basis when all sites share one.
    pub fn uniform_basis(&self) -> Option<MeasBasis> {
        let first = *self.bases.first()?;
        self.bases.iter().all(|&b| b == first).then_some(first)
    }

    /// Global X-parity flag of one outcome: `+1` for an even number of
    /// `|->` results. Only meaningful for all-X batches.
    pub fn x_parity(&self, outcome: u64) -> i8 {
        if (outcome & ((1u64 << self.sites) - 1)).count_ones() % 2 == 0 {
            1
        } else {
            -1
        }
    }

    /// Renders one outcome as a bitstring, site 0 leftmost.
    pub fn bitstring(&self, outcome: u64) -> String {
        (0..self.sites)
            .map(|i| if outcome >> i & 1 == 0 { '0' } else { '1' })
            .collect()
    }
}

/// Draws `shots` bitstrings from the Born distribution of the state in the
/// requested per-site bases. Deterministic for a fixed seed.
pub fn sample_measurements(
    state: &StateVector,
    bases: &[MeasBasis],
    shots: u32,
    seed: u64,
) -> Result<ShotBatch> {
    if bases.len() != state.sites() as usize {
        return Err(Error::DimensionMismatch(format!(
            "{} bases for {} sites",
            bases.len(),
            state.sites()
        )));
    }
    if shots == 0 {
        return Err(Error::Domain("need at least one shot".into()));
    }
    // Rotate a scratch copy into the measurement frame.
    let mut scratch = state.clone();
    for (site, &basis) in bases.iter().enumerate() {
        if basis == MeasBasis::X {
            apply_hadamard(&mut scratch, site as u32);
        }
    }
    // Cumulative Born weights.
    let mut cumulative = Vec::with_capacity(scratch.dim());
    let mut running = 0.0;
    for a in scratch.amplitudes() {
        running += a.norm_sqr();
        cumulative.push(running);
    }
    let total = running;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let outcomes = (0..shots)
        .map(|_| {
            let u: f64 = rng.gen::<f64>() * total;
            let idx = cumulative.partition_point(|&c| c <= u);
            idx.min(scratch.dim() - 1) as u64
        })
        .collect();
    Ok(ShotBatch {
        sites: state.sites(),
        bases: bases.to_vec(),
        outcomes,
    })
}

fn apply_hadamard(state: &mut StateVector, site: u32) {
    let dim = state.dim();
    let stride = 1usize << site;
    let inv_sqrt2 = core::f64::consts::FRAC_1_SQRT_2;
    let amps = state.amplitudes_mut();
    let mut base = 0usize;
    while base < dim {
        for idx0 in base..base + stride {
            let idx1 = idx0 + stride;
            let (a, b) = (amps[idx0], amps[idx1]);
            amps[idx0] = (a + b) * inv_sqrt2;
            amps[idx1] = (a - b) * inv_sqrt2;
        }
        base += stride << 1;
    }
}

/// Applies the two-site Pauli with code `1..=15` (base-4 digits select
/// `I, X, Y, Z` on the first and second site; 0 = identity is excluded).
pub fn apply_two_site_pauli(state: &mut StateVector, i: u32, j: u32, code: u8) -> Result<()> {
    if code == 0 || code > 15 {
        return Err(Error::Domain(format!(
            "two-site pauli code must be 1..=15, got {code}"
        )));
    }
    let axis_of = |digit: u8| match digit {
        1 => Some(Axis::X),
        2 => Some(Axis::Y),
        3 => Some(Axis::Z),
        _ => None,
    };
    let mut factors = Vec::with_capacity(2);
    if let Some(a) = axis_of(code / 4) {
        factors.push((i, a));
    }
    if let Some(a) = axis_of(code % 4) {
        factors.push((j, a));
    }
    state.apply_pauli(&factors)
}

/// Uniform draw from the 15 non-identity two-site Pauli codes.
pub fn random_pauli_code(rng: &mut ChaCha8Rng) -> u8 {
    rng.gen_range(1..=15)
}

/// True when the coded Pauli anticommutes with global X-parity (odd number
/// of Y/Z factors).
pub fn flips_x_parity(code: u8) -> bool {
    let odd = |digit: u8| digit == 2 || digit == 3;
    odd(code / 4) != odd(code % 4)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn plus_state_in_x_basis_is_all_zero_outcomes() {
        let s = StateVector::plus_state(6).unwrap();
        let batch = sample_measurements(&s, &[MeasBasis::X; 6], 200, 11).unwrap();
        assert!(batch.outcomes.iter().all(|&o| o == 0));
        assert_eq!(batch.x_parity(0), 1);
    }

    #[test]
    fn zero_state_in_z_basis_is_all_zeros() {
        let s = StateVector::basis_state(4, 0).unwrap();
        let batch = sample_measurements(&s, &[MeasBasis::Z; 4], 64, 3).unwrap();
        assert!(batch.outcomes.iter().all(|&o| o == 0));
    }

    #[test]
    fn two_outcome_frequencies_follow_born_rule() {
        // |psi> = cos(t)|0> + sin(t)|1> on one site.
        let mut s = StateVector::basis_state(1, 0).unwrap();
        s.apply_rx(0, 0.8).unwrap(); // p(1) = sin^2(0.4)
        let p1 = (0.4f64).sin().powi(2);
        let shots = 4000u32;
        let batch = sample_measurements(&s, &[MeasBasis::Z], shots, 97).unwrap();
        let ones = batch.outcomes.iter().filter(|&&o| o == 1).count() as f64;
        let freq = ones / shots as f64;
        let sigma = (p1 * (1.0 - p1) / shots as f64).sqrt();
        assert!(
            (freq - p1).abs() < 3.0 * sigma,
            "freq {freq} vs p {p1} (3 sigma = {})",
            3.0 * sigma
        );
    }

    #[test]
    fn sampling_is_deterministic_per_seed() {
        let mut s = StateVector::plus_state(5).unwrap();
        s.apply_rzz(1, 3, 0.9).unwrap();
        let a = sample_measurements(&s, &[MeasBasis::X; 5], 50, 42).unwrap();
        let b = sample_measurements(&s, &[MeasBasis::X; 5], 50, 42).unwrap();
        let c = sample_measurements(&s, &[MeasBasis::X; 5], 50, 43).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, c);
    }

    #[test]
    fn bitstring_renders_site_zero_first() {
        let batch = ShotBatch {
            sites: 4,
            bases: alloc::vec![MeasBasis::Z; 4],
            outcomes: alloc::vec![0b0010],
        };
        assert_eq!(batch.bitstring(0b0010), "0100");
    }

    #[test]
    fn pauli_codes_cover_parity_rule() {
        // Codes with exactly one Y/Z digit flip parity.
        assert!(flips_x_parity(2)); // I Y
        assert!(flips_x_parity(3)); // I Z
        assert!(!flips_x_parity(5)); // X X
        assert!(!flips_x_parity(10)); // Y Y
        assert!(!flips_x_parity(15)); // Z Z
        assert!(flips_x_parity(7)); // X Z
        let mut s = StateVector::plus_state(3).unwrap();
        apply_two_site_pauli(&mut s, 0, 2, 15).unwrap();
        assert_abs_diff_eq!(s.norm(), 1.0, epsilon = 1e-12);
        assert!(apply_two_site_pauli(&mut s, 0, 1, 0).is_err());
    }
}
