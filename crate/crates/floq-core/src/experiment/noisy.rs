//! Shot-level trajectory simulation.
//!
//! Each shot is one noise trajectory: the preparation circuit, the Floquet
//! cycles and the echo-measurement circuit are replayed with a fresh
//! two-site depolarizing draw after every two-qubit gate. Trajectories are
//! seeded independently from the master seed by their index, so any
//! scheduling (sequential here, parallel in callers) produces identical
//! batches.

use alloc::vec::Vec;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::mera::{MeraLayout, MeraParams};
use crate::sim::{
    apply_two_site_pauli, mera_gate_matrix, random_pauli_code, sample_measurements, MeasBasis,
    ShotBatch, StateVector, TwoQubitGate,
};
use crate::util::derive_seed;

use super::{Preparation, RunConfig, ShotData};

/// One sampled bitstring per cycle and measurement setting.
#[derive(Debug, Clone, PartialEq)]
pub struct TrajectoryRecord {
    /// X-basis outcome after the inverted preparation circuit, per cycle.
    pub echo_outcomes: Vec<u64>,
    /// Plain Z-basis outcome per cycle.
    pub z_outcomes: Vec<u64>,
    /// Plain X-basis outcome per cycle.
    pub x_outcomes: Vec<u64>,
}

struct NoisyCtx {
    rng: ChaCha8Rng,
    probability: f64,
}

impl NoisyCtx {
    fn maybe_inject(&mut self, state: &mut StateVector, sites: (u32, u32)) -> Result<()> {
        if self.probability > 0.0 && self.rng.gen::<f64>() < self.probability {
            let code = random_pauli_code(&mut self.rng);
            apply_two_site_pauli(state, sites.0, sites.1, code)?;
        }
        Ok(())
    }

    fn sample_seed(&mut self) -> u64 {
        self.rng.gen()
    }
}

fn mera_of(config: &RunConfig) -> Result<(&MeraLayout, &MeraParams)> {
    match &config.preparation {
        Preparation::MeraCircuit { layout, params } => Ok((layout, params)),
        Preparation::ExactGroundState => Err(Error::Domain(
            "sampled runs require circuit preparation".into(),
        )),
    }
}

fn apply_mera_noisy(
    state: &mut StateVector,
    layout: &MeraLayout,
    params: &MeraParams,
    inverse: bool,
    ctx: &mut NoisyCtx,
) -> Result<()> {
    let gate_iter: Vec<(usize, (u32, u32))> = layout
        .gates
        .iter()
        .enumerate()
        .map(|(k, g)| (k, g.sites))
        .collect();
    let ordered: Vec<(usize, (u32, u32))> = if inverse {
        gate_iter.into_iter().rev().collect()
    } else {
        gate_iter
    };
    for (k, sites) in ordered {
        let (phi, gamma) = params.angles[k];
        let (phi, gamma) = if inverse { (-phi, -gamma) } else { (phi, gamma) };
        state.apply_gate(&TwoQubitGate::new(mera_gate_matrix(phi, gamma), sites))?;
        ctx.maybe_inject(state, sites)?;
    }
    Ok(())
}

fn noisy_trotter(
    state: &mut StateVector,
    h: &crate::lattice::HamiltonianSpec,
    tau: f64,
    ctx: &mut NoisyCtx,
) -> Result<()> {
    let (z_layer, x_layer) = crate::sim::evolve_internals::split_layers(h)?;
    let mut hook = |s: &mut StateVector, sites: (u32, u32)| ctx.maybe_inject(s, sites);
    crate::sim::evolve_internals::apply_layer(state, &z_layer, 0.5 * tau, &mut hook)?;
    crate::sim::evolve_internals::apply_layer(state, &x_layer, tau, &mut hook)?;
    crate::sim::evolve_internals::apply_layer(state, &z_layer, 0.5 * tau, &mut hook)?;
    Ok(())
}

/// Simulates one trajectory, producing one shot per cycle and setting.
///
/// Deterministic in `(config.seed, index)` regardless of evaluation order;
/// callers may fan trajectories out across threads and reassemble with
/// [`shot_data_from_records`].
pub fn simulate_trajectory(config: &RunConfig, index: u32) -> Result<TrajectoryRecord> {
    config.validate()?;
    let (layout, params) = mera_of(config)?;
    let h0 = config.model.reference_hamiltonian(&config.drive)?;
    let h1 = config.model.driven_hamiltonian(&config.drive)?;
    let n = config.drive.sites;
    let mut ctx = NoisyCtx {
        rng: ChaCha8Rng::seed_from_u64(derive_seed(config.seed, index as u64)),
        probability: config.noise_probability.unwrap_or(0.0),
    };

    let mut state = StateVector::plus_state(n)?;
    apply_mera_noisy(&mut state, layout, params, false, &mut ctx)?;

    let x_bases = alloc::vec![MeasBasis::X; n as usize];
    let z_bases = alloc::vec![MeasBasis::Z; n as usize];
    let mut record = TrajectoryRecord {
        echo_outcomes: Vec::with_capacity(config.cycles as usize + 1),
        z_outcomes: Vec::with_capacity(config.cycles as usize + 1),
        x_outcomes: Vec::with_capacity(config.cycles as usize + 1),
    };
    for cycle in 0..=config.cycles {
        if cycle > 0 {
            noisy_trotter(&mut state, &h0, config.drive.t0, &mut ctx)?;
            noisy_trotter(&mut state, &h1, config.drive.t1, &mut ctx)?;
        }
        // Echo setting: invert the preparation circuit (with its own noise)
        // and measure in the X basis.
        let mut echo_branch = state.clone();
        apply_mera_noisy(&mut echo_branch, layout, params, true, &mut ctx)?;
        let echo_shot =
            sample_measurements(&echo_branch, &x_bases, 1, ctx.sample_seed())?.outcomes[0];
        // Raw settings for the energy profile.
        let z_shot = sample_measurements(&state, &z_bases, 1, ctx.sample_seed())?.outcomes[0];
        let x_shot = sample_measurements(&state, &x_bases, 1, ctx.sample_seed())?.outcomes[0];
        record.echo_outcomes.push(echo_shot);
        record.z_outcomes.push(z_shot);
        record.x_outcomes.push(x_shot);
    }
    Ok(record)
}

/// Reassembles per-cycle batches from trajectory records (one shot each).
pub fn shot_data_from_records(config: &RunConfig, records: &[TrajectoryRecord]) -> ShotData {
    let n = config.drive.sites;
    let cycles = config.cycles as usize + 1;
    let x_bases = alloc::vec![MeasBasis::X; n as usize];
    let z_bases = alloc::vec![MeasBasis::Z; n as usize];
    let batch = |bases: &Vec<MeasBasis>, pick: &dyn Fn(&TrajectoryRecord) -> &Vec<u64>,
                 cycle: usize| ShotBatch {
        sites: n,
        bases: bases.clone(),
        outcomes: records.iter().map(|r| pick(r)[cycle]).collect(),
    };
    ShotData {
        echo: (0..cycles)
            .map(|c| batch(&x_bases, &|r| &r.echo_outcomes, c))
            .collect(),
        z: (0..cycles)
            .map(|c| batch(&z_bases, &|r| &r.z_outcomes, c))
            .collect(),
        x: (0..cycles)
            .map(|c| batch(&x_bases, &|r| &r.x_outcomes, c))
            .collect(),
    }
}

/// Collects all shots of a sampled run, sequentially.
///
/// Noiseless sampled runs share one state trajectory, so the per-cycle
/// batches are drawn in bulk; noisy runs simulate one trajectory per shot.
pub fn collect_shot_data(config: &RunConfig) -> Result<ShotData> {
    config.validate()?;
    let p = config.noise_probability.unwrap_or(0.0);
    if p > 0.0 {
        let records: Vec<TrajectoryRecord> = (0..config.shots)
            .map(|i| simulate_trajectory(config, i))
            .collect::<Result<_>>()?;
        return Ok(shot_data_from_records(config, &records));
    }
    // Noiseless: one pass, bulk sampling.
    let (layout, params) = mera_of(config)?;
    let h0 = config.model.reference_hamiltonian(&config.drive)?;
    let h1 = config.model.driven_hamiltonian(&config.drive)?;
    let n = config.drive.sites;
    let x_bases = alloc::vec![MeasBasis::X; n as usize];
    let z_bases = alloc::vec![MeasBasis::Z; n as usize];
    let mut state = crate::mera::prepare_state(layout, params)?;
    let mut data = ShotData {
        echo: Vec::new(),
        z: Vec::new(),
        x: Vec::new(),
    };
    for cycle in 0..=config.cycles {
        if cycle > 0 {
            crate::sim::trotter_segment(&mut state, &h0, config.drive.t0)?;
            crate::sim::trotter_segment(&mut state, &h1, config.drive.t1)?;
        }
        let mut echo_branch = state.clone();
        crate::mera::apply_circuit(&mut echo_branch, layout, params, true)?;
        data.echo.push(sample_measurements(
            &echo_branch,
            &x_bases,
            config.shots,
            derive_seed(config.seed, 0xe000_0000 + cycle as u64),
        )?);
        data.z.push(sample_measurements(
            &state,
            &z_bases,
            config.shots,
            derive_seed(config.seed, 0x2000_0000 + cycle as u64),
        )?);
        data.x.push(sample_measurements(
            &state,
            &x_bases,
            config.shots,
            derive_seed(config.seed, 0x1000_0000 + cycle as u64),
        )?);
    }
    Ok(data)
}
