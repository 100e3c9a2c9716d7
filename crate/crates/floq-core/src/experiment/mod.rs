//! Full experiment orchestration.
//!
//! A run prepares the initial state (exact ground state or the hierarchical
//! circuit), drives it for up to [`MAX_CYCLES`] Floquet cycles, and records
//! the Loschmidt echo, the total energy, and the per-bond energy profile at
//! every cycle — either as exact expectations or through the shot pipeline
//! (Born sampling, optional depolarizing noise, parity post-selection,
//! bootstrap confidence intervals). Velocity estimation, reference
//! normalization and central-charge fitting live here too.

mod bootstrap;
mod fit;
mod noisy;

pub use bootstrap::bootstrap_ci;
pub use fit::{fit_central_charge, CGrid, FitResult};
pub use noisy::{collect_shot_data, shot_data_from_records, simulate_trajectory, TrajectoryRecord};

use alloc::{format, vec::Vec};
use num_traits::Float;

use crate::cft::DriveSpec;
use crate::error::{Error, Result};
use crate::lattice::{
    build_generalized_ising, build_tfim, local_energy_op, CouplingProfile, HamiltonianSpec,
    IsingCouplings, PauliTerm,
};
use crate::mera::{prepare_state, MeraLayout, MeraParams};
use crate::sim::{
    exact_evolve, ground_state, lowest_eigenvalues, trotter_segment, MeasBasis, ShotBatch,
    StateVector,
};
use crate::util::derive_seed;

/// Cap on the cycle count of a single run.
pub const MAX_CYCLES: u32 = 64;

/// Which lattice family realizes the drive.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ModelSpec {
    /// The deformed transverse-field Ising chain.
    DeformedTfim,
    /// The generalized Ising family with explicit `(J, g, Gamma)`.
    GeneralizedIsing(IsingCouplings),
}

impl ModelSpec {
    fn build(&self, kappa: crate::cft::KappaTriplet, drive: &DriveSpec) -> Result<HamiltonianSpec> {
        let profile = CouplingProfile::new(kappa, drive.wavenumber, drive.sites);
        match self {
            ModelSpec::DeformedTfim => build_tfim(&profile),
            ModelSpec::GeneralizedIsing(c) => {
                build_generalized_ising(*c, Some(&profile), drive.sites)
            }
        }
    }

    /// Hamiltonian of segment 0 (the reference envelope).
    pub fn reference_hamiltonian(&self, drive: &DriveSpec) -> Result<HamiltonianSpec> {
        self.build(drive.kappa_ref, drive)
    }

    /// Hamiltonian of segment 1 (the deformed envelope).
    pub fn driven_hamiltonian(&self, drive: &DriveSpec) -> Result<HamiltonianSpec> {
        self.build(drive.kappa_drive, drive)
    }

    /// Smallest scaling dimension of the model's continuum description,
    /// used by [`estimate_velocity`]: 1/8 for Ising-class models, 1/4 for
    /// the XX class (no transverse field, pure exchange couplings).
    pub fn default_min_dimension(&self) -> f64 {
        match self {
            ModelSpec::DeformedTfim => 0.125,
            ModelSpec::GeneralizedIsing(c) => {
                if c.x == 0.0 && c.xx != 0.0 {
                    0.25
                } else {
                    0.125
                }
            }
        }
    }

    /// Tiling of the model into per-bond energy operators: bond `i` carries
    /// its two-site terms plus half of each adjacent single-site field, so
    /// the tiles sum to the uniform reference Hamiltonian exactly.
    pub fn bond_energy_ops(&self, sites: u32) -> Vec<Vec<PauliTerm>> {
        match self {
            ModelSpec::DeformedTfim => (0..sites).map(|i| local_energy_op(i, sites)).collect(),
            ModelSpec::GeneralizedIsing(c) => (0..sites)
                .map(|i| {
                    let j = (i + 1) % sites;
                    let mut ops = Vec::with_capacity(4);
                    if c.zz != 0.0 {
                        ops.push(PauliTerm::pair(
                            -c.zz,
                            i,
                            crate::lattice::Axis::Z,
                            j,
                            crate::lattice::Axis::Z,
                        ));
                    }
                    if c.xx != 0.0 {
                        ops.push(PauliTerm::pair(
                            -c.xx,
                            i,
                            crate::lattice::Axis::X,
                            j,
                            crate::lattice::Axis::X,
                        ));
                    }
                    if c.x != 0.0 {
                        ops.push(PauliTerm::single(-0.5 * c.x, i, crate::lattice::Axis::X));
                        ops.push(PauliTerm::single(-0.5 * c.x, j, crate::lattice::Axis::X));
                    }
                    ops
                })
                .collect(),
        }
    }
}

/// How the initial state is produced.
#[derive(Debug, Clone, PartialEq)]
pub enum Preparation {
    /// Lanczos ground state of the reference Hamiltonian.
    ExactGroundState,
    /// The hierarchical circuit with fixed parameters.
    MeraCircuit {
        /// Circuit structure.
        layout: MeraLayout,
        /// Angles aligned with the layout.
        params: MeraParams,
    },
}

/// Complete description of one run.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    /// Drive geometry, envelopes, durations and velocity.
    pub drive: DriveSpec,
    /// Lattice family realizing the drive.
    pub model: ModelSpec,
    /// Number of Floquet cycles (records span `0..=cycles`).
    pub cycles: u32,
    /// Initial-state preparation.
    pub preparation: Preparation,
    /// Shots per cycle and measurement setting; 0 means exact expectations.
    pub shots: u32,
    /// Two-site depolarizing probability after each two-qubit gate.
    pub noise_probability: Option<f64>,
    /// Master seed for everything stochastic in the run.
    pub seed: u64,
}

impl RunConfig {
    /// Checks cross-field invariants.
    pub fn validate(&self) -> Result<()> {
        self.drive.validate()?;
        if self.cycles > MAX_CYCLES {
            return Err(Error::Domain(format!(
                "cycle count {} exceeds the cap {MAX_CYCLES}",
                self.cycles
            )));
        }
        if let Some(p) = self.noise_probability {
            if !(0.0..=0.05).contains(&p) {
                return Err(Error::Domain(format!(
                    "depolarizing probability must lie in [0, 0.05], got {p}"
                )));
            }
            if self.shots == 0 && p > 0.0 {
                return Err(Error::Domain(
                    "noise only acts on sampled runs; set shots > 0".into(),
                ));
            }
        }
        if self.shots > 0 && !matches!(self.preparation, Preparation::MeraCircuit { .. }) {
            return Err(Error::Domain(
                "shot-based echo estimation inverts the preparation circuit; \
                 it requires circuit preparation"
                    .into(),
            ));
        }
        if let Preparation::MeraCircuit { layout, params } = &self.preparation {
            if layout.sites != self.drive.sites {
                return Err(Error::DimensionMismatch(format!(
                    "preparation circuit on {} sites, drive on {}",
                    layout.sites, self.drive.sites
                )));
            }
            if params.len() != layout.gate_count() {
                return Err(Error::Misaligned(format!(
                    "{} angle pairs for {} gates",
                    params.len(),
                    layout.gate_count()
                )));
            }
        }
        Ok(())
    }

    /// Builds the initial state.
    pub fn prepare(&self) -> Result<StateVector> {
        match &self.preparation {
            Preparation::ExactGroundState => {
                let h0 = self.model.reference_hamiltonian(&self.drive)?;
                Ok(ground_state(&h0, 1e-10)?.state)
            }
            Preparation::MeraCircuit { layout, params } => prepare_state(layout, params),
        }
    }
}

/// Exponential fit of a reference decay, `amplitude * exp(-rate * n)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DecayFit {
    /// Fitted amplitude.
    pub amplitude: f64,
    /// Fitted decay rate per cycle.
    pub rate: f64,
}

/// Observables of one cycle.
#[derive(Debug, Clone, PartialEq)]
pub struct CycleRecord {
    /// Cycle index `n`.
    pub cycle: u32,
    /// Loschmidt echo estimate (post-selected when sampled).
    pub echo: f64,
    /// Bootstrap confidence interval when shots were used.
    pub echo_ci: Option<(f64, f64)>,
    /// `<H0>` (sum of the bond energies).
    pub total_energy: f64,
    /// Per-bond energy expectations.
    pub bond_energy: Vec<f64>,
    /// Fraction of shots surviving parity post-selection.
    pub retained_fraction: Option<f64>,
}

/// Stroboscopic observables of a full run.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeSeries {
    /// Site count of the underlying chain.
    pub sites: u32,
    /// One record per cycle, `0..=cycles`.
    pub records: Vec<CycleRecord>,
    /// Reference decay divided out of the echoes, when applied.
    pub normalization: Option<DecayFit>,
}

impl TimeSeries {
    /// Echo column.
    pub fn echoes(&self) -> Vec<f64> {
        self.records.iter().map(|r| r.echo).collect()
    }

    /// Number of cycles (records minus the `n = 0` row).
    pub fn cycles(&self) -> u32 {
        self.records.len() as u32 - 1
    }
}

enum Evolver {
    Trotter,
    Krylov { tol: f64 },
}

fn run_exact_expectations(config: &RunConfig, evolver: Evolver) -> Result<TimeSeries> {
    config.validate()?;
    let h0 = config.model.reference_hamiltonian(&config.drive)?;
    let h1 = config.model.driven_hamiltonian(&config.drive)?;
    let bond_ops = config.model.bond_energy_ops(config.drive.sites);
    let psi0 = config.prepare()?;
    let mut psi = psi0.clone();
    let mut records = Vec::with_capacity(config.cycles as usize + 1);
    for n in 0..=config.cycles {
        if n > 0 {
            match evolver {
                Evolver::Trotter => {
                    trotter_segment(&mut psi, &h0, config.drive.t0)?;
                    trotter_segment(&mut psi, &h1, config.drive.t1)?;
                }
                Evolver::Krylov { tol } => {
                    exact_evolve(&mut psi, &h0, config.drive.t0, tol)?;
                    exact_evolve(&mut psi, &h1, config.drive.t1, tol)?;
                }
            }
        }
        let echo = psi0.overlap(&psi)?.norm_sqr();
        let bond_energy: Vec<f64> = bond_ops
            .iter()
            .map(|ops| psi.expectation(ops))
            .collect::<Result<_>>()?;
        let total_energy = bond_energy.iter().sum();
        records.push(CycleRecord {
            cycle: n,
            echo,
            echo_ci: None,
            total_energy,
            bond_energy,
            retained_fraction: None,
        });
    }
    Ok(TimeSeries {
        sites: config.drive.sites,
        records,
        normalization: None,
    })
}

/// Runs the drive protocol: one second-order Trotter step per segment and
/// cycle, recording echo, total energy and bond energies.
///
/// With `shots = 0` observables are exact expectations; otherwise they are
/// estimated from sampled bitstrings (echo through the inverted preparation
/// circuit in the X basis with parity post-selection and a bootstrap
/// confidence interval; bond energies raw from one Z- and one X-basis
/// setting).
pub fn run_floquet(config: &RunConfig) -> Result<TimeSeries> {
    if config.shots == 0 {
        run_exact_expectations(config, Evolver::Trotter)
    } else {
        config.validate()?;
        let data = collect_shot_data(config)?;
        assemble_series(config, &data)
    }
}

/// Like [`run_floquet`] but propagating each segment with the Krylov
/// matrix-exponential instead of a Trotter step; exact expectations only.
pub fn run_floquet_exact(config: &RunConfig, tol: f64) -> Result<TimeSeries> {
    if config.shots != 0 {
        return Err(Error::Domain(
            "exact-propagator runs record exact expectations; set shots = 0".into(),
        ));
    }
    run_exact_expectations(config, Evolver::Krylov { tol })
}

/// Per-cycle shot batches of one sampled run.
#[derive(Debug, Clone)]
pub struct ShotData {
    /// X-basis outcomes after the inverted preparation circuit (echo
    /// estimator), one batch per cycle.
    pub echo: Vec<ShotBatch>,
    /// Plain Z-basis outcomes per cycle.
    pub z: Vec<ShotBatch>,
    /// Plain X-basis outcomes per cycle.
    pub x: Vec<ShotBatch>,
}

/// Raw (not post-selected) echo estimates of the sampled batches.
pub fn raw_echo_series(data: &ShotData) -> Vec<f64> {
    data.echo
        .iter()
        .map(|batch| {
            batch.outcomes.iter().filter(|&&o| o == 0).count() as f64 / batch.len() as f64
        })
        .collect()
}

/// Builds the time series from sampled batches: post-selected echo with a
/// bootstrap confidence interval, raw bond energies from the two settings.
pub fn assemble_series(config: &RunConfig, data: &ShotData) -> Result<TimeSeries> {
    let n_sites = config.drive.sites;
    let bond_ops = config.model.bond_energy_ops(n_sites);
    let mut records = Vec::with_capacity(data.echo.len());
    for n in 0..data.echo.len() {
        let (filtered, retained) = parity_postselect(&data.echo[n])?;
        let hits: Vec<f64> = filtered
            .outcomes
            .iter()
            .map(|&o| if o == 0 { 1.0 } else { 0.0 })
            .collect();
        let echo = if hits.is_empty() {
            0.0
        } else {
            hits.iter().sum::<f64>() / hits.len() as f64
        };
        let echo_ci = if hits.is_empty() {
            None
        } else {
            Some(bootstrap_ci(
                &hits,
                0.95,
                1000,
                derive_seed(config.seed, 0x0c1_0000 + n as u64),
            )?)
        };
        // Bond energies from the two raw settings.
        let z_means = basis_site_pair_means(&data.z[n], n_sites);
        let x_means = basis_site_means(&data.x[n], n_sites);
        let x_pair_means = basis_site_pair_means(&data.x[n], n_sites);
        let bond_energy: Vec<f64> = (0..n_sites)
            .map(|i| {
                let mut e = 0.0;
                for term in &bond_ops[i as usize] {
                    e += term.coefficient
                        * match term.factors.as_slice() {
                            [(s, crate::lattice::Axis::X)] => x_means[*s as usize],
                            [(a, crate::lattice::Axis::Z), (b, crate::lattice::Axis::Z)] => {
                                z_means[(*a).min(*b) as usize
                                    + n_sites as usize * (*a).max(*b) as usize]
                            }
                            [(a, crate::lattice::Axis::X), (b, crate::lattice::Axis::X)] => {
                                x_pair_means[(*a).min(*b) as usize
                                    + n_sites as usize * (*a).max(*b) as usize]
                            }
                            _ => 0.0,
                        };
                }
                e
            })
            .collect();
        let total_energy = bond_energy.iter().sum();
        records.push(CycleRecord {
            cycle: n as u32,
            echo,
            echo_ci,
            total_energy,
            bond_energy,
            retained_fraction: Some(retained),
        });
    }
    Ok(TimeSeries {
        sites: n_sites,
        records,
        normalization: None,
    })
}

/// Mean single-site eigenvalues (+1 for bit 0) per site.
fn basis_site_means(batch: &ShotBatch, sites: u32) -> Vec<f64> {
    let shots = batch.len() as f64;
    (0..sites)
        .map(|i| {
            batch
                .outcomes
                .iter()
                .map(|&o| if o >> i & 1 == 0 { 1.0 } else { -1.0 })
                .sum::<f64>()
                / shots
        })
        .collect()
}

/// Mean two-site products, indexed `min + sites * max`.
fn basis_site_pair_means(batch: &ShotBatch, sites: u32) -> Vec<f64> {
    let shots = batch.len() as f64;
    let mut out = alloc::vec![0.0; sites as usize * sites as usize];
    for i in 0..sites {
        let j = (i + 1) % sites;
        let (lo, hi) = (i.min(j), i.max(j));
        let mean = batch
            .outcomes
            .iter()
            .map(|&o| {
                let same = (o >> i ^ o >> j) & 1 == 0;
                if same {
                    1.0
                } else {
                    -1.0
                }
            })
            .sum::<f64>()
            / shots;
        out[lo as usize + sites as usize * hi as usize] = mean;
    }
    out
}

/// Keeps the shots in the positive X-parity sector (even number of `|->`
/// outcomes) and reports the retained fraction.
pub fn parity_postselect(batch: &ShotBatch) -> Result<(ShotBatch, f64)> {
    if batch.uniform_basis() != Some(MeasBasis::X) {
        return Err(Error::Basis(
            "parity post-selection requires an all-X-basis batch".into(),
        ));
    }
    if batch.is_empty() {
        return Err(Error::Domain("cannot post-select an empty batch".into()));
    }
    let kept: Vec<u64> = batch
        .outcomes
        .iter()
        .copied()
        .filter(|&o| batch.x_parity(o) == 1)
        .collect();
    let retained = kept.len() as f64 / batch.len() as f64;
    Ok((
        ShotBatch {
            sites: batch.sites,
            bases: batch.bases.clone(),
            outcomes: kept,
        },
        retained,
    ))
}

/// Divides the echo column by an exponential fit of a reference run.
///
/// The reference echo is fit to `A exp(-rate n)` by least squares on its
/// logarithm; every (positive) reference point must exist on the same cycle
/// grid. Confidence bounds are rescaled by the same factor; the fit is
/// stored in the returned series.
pub fn reference_normalize(series: &TimeSeries, reference: &TimeSeries) -> Result<TimeSeries> {
    if series.records.len() != reference.records.len() {
        return Err(Error::DimensionMismatch(format!(
            "series has {} records, reference {}",
            series.records.len(),
            reference.records.len()
        )));
    }
    let fit = fit_exponential_decay(&reference.echoes())?;
    let mut out = series.clone();
    for record in &mut out.records {
        let scale = fit.amplitude * (-fit.rate * record.cycle as f64).exp();
        record.echo /= scale;
        if let Some((lo, hi)) = record.echo_ci {
            record.echo_ci = Some((lo / scale, hi / scale));
        }
    }
    out.normalization = Some(fit);
    Ok(out)
}

/// Least-squares fit of `A exp(-rate n)` on the log of the data.
pub fn fit_exponential_decay(echoes: &[f64]) -> Result<DecayFit> {
    if echoes.len() < 2 {
        return Err(Error::Fit("need at least two reference points".into()));
    }
    let mut sx = 0.0;
    let mut sy = 0.0;
    let mut sxx = 0.0;
    let mut sxy = 0.0;
    let m = echoes.len() as f64;
    for (n, &e) in echoes.iter().enumerate() {
        if !(e > 0.0) {
            return Err(Error::Fit(format!(
                "reference echo must be positive everywhere, got {e} at cycle {n}"
            )));
        }
        let x = n as f64;
        let y = e.ln();
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    let denom = m * sxx - sx * sx;
    let slope = (m * sxy - sx * sy) / denom;
    let intercept = (sy - slope * sx) / m;
    Ok(DecayFit {
        amplitude: intercept.exp(),
        rate: -slope,
    })
}

/// Velocity estimate from the finite-size spectrum.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VelocityEstimate {
    /// `gap * L / (2 pi * min_dimension)`.
    pub velocity: f64,
    /// Gap to the lowest distinct excited level.
    pub gap: f64,
    /// Scaling dimension used.
    pub min_dimension: f64,
}

/// Estimates the lattice velocity of a model's uniform critical point:
/// the finite-size gap to the lowest excited level equals
/// `2 pi v Delta_min / L`. The model's default smallest dimension can be
/// overridden.
pub fn estimate_velocity(
    model: &ModelSpec,
    sites: u32,
    min_dimension: Option<f64>,
) -> Result<VelocityEstimate> {
    let delta = min_dimension.unwrap_or_else(|| model.default_min_dimension());
    if !(delta > 0.0) {
        return Err(Error::Domain(format!(
            "smallest scaling dimension must be positive, got {delta}"
        )));
    }
    // Any drive geometry works here; only the uniform Hamiltonian matters.
    let drive = DriveSpec::new(sites, 1.max(1), crate::cft::KappaTriplet::UNIFORM, 0.0, 0.0);
    let h = model.reference_hamiltonian(&DriveSpec {
        wavenumber: 1,
        ..drive
    })?;
    let values = lowest_eigenvalues(&h, 6, 1e-9)?;
    let e0 = values[0];
    let scale = e0.abs().max(1.0);
    let gap = values
        .iter()
        .skip(1)
        .map(|v| v - e0)
        .find(|g| *g > 1e-7 * scale)
        .ok_or_else(|| {
            Error::Numerical("no distinct excited level among the lowest six".into())
        })?;
    Ok(VelocityEstimate {
        velocity: gap * sites as f64 / (2.0 * core::f64::consts::PI * delta),
        gap,
        min_dimension: delta,
    })
}
