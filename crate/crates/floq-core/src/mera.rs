//! Hierarchical ground-state preparation circuit and its optimizer.
//!
//! The circuit builds the critical state top-down: one long-range gate on
//! the two maximally separated representatives, then per layer an isometry
//! branching every representative to the midpoint of its interval followed
//! by entanglers across adjacent branch boundaries (with the periodic
//! wrap). Each two-qubit gate carries two angles and commutes with global
//! X-parity, so prepared states stay in the +1 parity sector exactly.

use alloc::{format, vec::Vec};
use num_traits::Float;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::lattice::HamiltonianSpec;
use crate::sim::{ground_state, mera_gate_matrix, StateVector, TwoQubitGate};
use crate::util::{derive_seed, fnv1a};

/// Role of a gate in the hierarchy.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GateKind {
    /// The first long-range gate on the two top-level representatives.
    Top,
    /// Couples an existing representative to the midpoint of its interval.
    Isometry,
    /// Entangles the nearest new qubits of adjacent branches.
    Entangler,
}

/// One slot in the circuit.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MeraGate {
    /// Gate role.
    pub kind: GateKind,
    /// Target sites `(i, j)`.
    pub sites: (u32, u32),
    /// Expansion layer; the top gate is layer 0.
    pub layer: u32,
}

/// Ordered gate list of the hierarchical circuit.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MeraLayout {
    /// Number of sites; a power of two.
    pub sites: u32,
    /// Gates in application order.
    pub gates: Vec<MeraGate>,
}

impl MeraLayout {
    /// Number of gates.
    pub fn gate_count(&self) -> usize {
        self.gates.len()
    }

    /// Number of layers including the top gate.
    pub fn layer_count(&self) -> u32 {
        self.gates.last().map_or(0, |g| g.layer + 1)
    }

    /// Stable 64-bit descriptor of the gate list; parameter fixtures embed
    /// it so a params file cannot silently pair with the wrong circuit.
    pub fn descriptor_hash(&self) -> u64 {
        let bytes = self.gates.iter().flat_map(|g| {
            let kind = match g.kind {
                GateKind::Top => 0u8,
                GateKind::Isometry => 1,
                GateKind::Entangler => 2,
            };
            let mut enc = Vec::with_capacity(10);
            enc.push(kind);
            enc.extend_from_slice(&g.sites.0.to_le_bytes());
            enc.extend_from_slice(&g.sites.1.to_le_bytes());
            enc.push(g.layer as u8);
            enc
        });
        fnv1a(bytes).wrapping_add(self.sites as u64)
    }
}

/// Builds the deterministic layout for `sites in {4, 8, 16, 32}`.
pub fn build_layout(sites: u32) -> Result<MeraLayout> {
    if !matches!(sites, 4 | 8 | 16 | 32) {
        return Err(Error::Domain(format!(
            "hierarchical layout supports 4, 8, 16 or 32 sites, got {sites}"
        )));
    }
    let mut gates = Vec::new();
    gates.push(MeraGate {
        kind: GateKind::Top,
        sites: (0, sites / 2),
        layer: 0,
    });
    let mut spacing = sites / 2;
    let mut layer = 1;
    while spacing >= 2 {
        let representatives: Vec<u32> = (0..sites).step_by(spacing as usize).collect();
        for &r in &representatives {
            gates.push(MeraGate {
                kind: GateKind::Isometry,
                sites: (r, r + spacing / 2),
                layer,
            });
        }
        for &r in &representatives {
            gates.push(MeraGate {
                kind: GateKind::Entangler,
                sites: (r + spacing / 2, (r + spacing) % sites),
                layer,
            });
        }
        spacing /= 2;
        layer += 1;
    }
    Ok(MeraLayout { sites, gates })
}

/// Per-gate `(phi, gamma)` angles aligned with a layout's gate order.
#[derive(Debug, Clone, PartialEq)]
pub struct MeraParams {
    /// One angle pair per gate.
    pub angles: Vec<(f64, f64)>,
}

impl MeraParams {
    /// All-zero parameters (every gate the identity).
    pub fn zeros(gate_count: usize) -> Self {
        Self {
            angles: alloc::vec![(0.0, 0.0); gate_count],
        }
    }

    /// Number of angle pairs.
    pub fn len(&self) -> usize {
        self.angles.len()
    }

    /// True when no gates are parameterized.
    pub fn is_empty(&self) -> bool {
        self.angles.is_empty()
    }

    fn check_alignment(&self, layout: &MeraLayout) -> Result<()> {
        if self.angles.len() != layout.gates.len() {
            return Err(Error::Misaligned(format!(
                "{} angle pairs for {} gates",
                self.angles.len(),
                layout.gates.len()
            )));
        }
        Ok(())
    }
}

/// Applies the parameterized circuit (or its inverse) to a state.
///
/// Each gate factors into the two commuting rotations
/// `exp(-i phi Y_i Z_j / 2)` and `exp(-i gamma Z_i Y_j / 2)`, applied with
/// the dedicated pair kernels.
pub fn apply_circuit(
    state: &mut StateVector,
    layout: &MeraLayout,
    params: &MeraParams,
    inverse: bool,
) -> Result<()> {
    params.check_alignment(layout)?;
    let apply_one = |state: &mut StateVector, gate: &MeraGate, angles: (f64, f64)| {
        let (phi, gamma) = if inverse {
            (-angles.0, -angles.1)
        } else {
            angles
        };
        let (i, j) = gate.sites;
        state.apply_ryz(i, j, phi)?;
        state.apply_ryz(j, i, gamma)
    };
    if inverse {
        for (gate, &angles) in layout.gates.iter().zip(&params.angles).rev() {
            apply_one(state, gate, angles)?;
        }
    } else {
        for (gate, &angles) in layout.gates.iter().zip(&params.angles) {
            apply_one(state, gate, angles)?;
        }
    }
    Ok(())
}

/// Runs the circuit on `|+>^N`.
pub fn prepare_state(layout: &MeraLayout, params: &MeraParams) -> Result<StateVector> {
    let mut state = StateVector::plus_state(layout.sites)?;
    apply_circuit(&mut state, layout, params, false)?;
    Ok(state)
}

/// Knobs of the variational search.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OptimizeOptions {
    /// Number of random initializations.
    pub restarts: u32,
    /// Iteration cap per restart.
    pub max_iters: u32,
    /// Central-difference step for the gradient.
    pub fd_step: f64,
    /// Stop when the gradient norm falls below this.
    pub grad_tol: f64,
    /// Stop when an accepted step improves the objective by less than this.
    pub objective_tol: f64,
    /// Initial angles are uniform in `[-init_range, init_range]`.
    pub init_range: f64,
    /// Master seed for the restart initializations.
    pub seed: u64,
}

impl Default for OptimizeOptions {
    fn default() -> Self {
        Self {
            restarts: 8,
            max_iters: 2000,
            fd_step: 1e-5,
            grad_tol: 2e-6,
            objective_tol: 1e-11,
            init_range: 0.3,
            seed: 0x6d65_7261,
        }
    }
}

/// Outcome of an optimization run.
#[derive(Debug, Clone)]
pub struct OptimizeOutcome {
    /// Best angles found.
    pub params: MeraParams,
    /// Objective at the best angles.
    pub energy: f64,
    /// Objective after every accepted step (monotone non-increasing).
    pub trace: Vec<f64>,
    /// False when the run stopped at the iteration cap without meeting a
    /// tolerance; the best-so-far point is still returned.
    pub converged: bool,
    /// Index of the restart that produced the best objective.
    pub best_restart: u32,
}

/// Random initial angles for one restart of a seeded search.
pub fn restart_init(layout: &MeraLayout, opts: &OptimizeOptions, restart: u32) -> MeraParams {
    let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(opts.seed, restart as u64));
    let angles = (0..layout.gates.len())
        .map(|_| {
            (
                rng.gen_range(-opts.init_range..=opts.init_range),
                rng.gen_range(-opts.init_range..=opts.init_range),
            )
        })
        .collect();
    MeraParams { angles }
}

/// Minimizes `<psi(theta)|H|psi(theta)>` from a single starting point by
/// gradient descent: central-difference gradients and a backtracking line
/// search with warm-started step length.
pub fn optimize_single(
    layout: &MeraLayout,
    h0: &HamiltonianSpec,
    init: &MeraParams,
    opts: &OptimizeOptions,
) -> Result<OptimizeOutcome> {
    init.check_alignment(layout)?;
    if h0.sites != layout.sites {
        return Err(Error::DimensionMismatch(format!(
            "hamiltonian on {} sites, layout on {}",
            h0.sites, layout.sites
        )));
    }
    let objective = |angles: &[f64]| -> Result<f64> {
        let params = MeraParams {
            angles: angles
                .chunks_exact(2)
                .map(|c| (c[0], c[1]))
                .collect(),
        };
        prepare_state(layout, &params)?.expectation(&h0.terms)
    };

    let mut theta: Vec<f64> = init
        .angles
        .iter()
        .flat_map(|&(p, g)| [p, g])
        .collect();
    let mut energy = objective(&theta)?;
    let mut trace = alloc::vec![energy];
    let mut step = 0.5;
    let mut converged = false;

    let mut grad = alloc::vec![0.0; theta.len()];
    let mut probe = theta.clone();
    for _ in 0..opts.max_iters {
        // Central differences.
        let mut grad_norm_sq = 0.0;
        for k in 0..theta.len() {
            probe.copy_from_slice(&theta);
            probe[k] = theta[k] + opts.fd_step;
            let up = objective(&probe)?;
            probe[k] = theta[k] - opts.fd_step;
            let down = objective(&probe)?;
            grad[k] = (up - down) / (2.0 * opts.fd_step);
            grad_norm_sq += grad[k] * grad[k];
        }
        if grad_norm_sq.sqrt() < opts.grad_tol {
            converged = true;
            break;
        }
        // Backtracking line search along -grad (Armijo condition).
        let mut accepted = false;
        while step > 1e-14 {
            for k in 0..theta.len() {
                probe[k] = theta[k] - step * grad[k];
            }
            let trial = objective(&probe)?;
            if trial < energy - 1e-4 * step * grad_norm_sq {
                let gain = energy - trial;
                theta.copy_from_slice(&probe);
                energy = trial;
                trace.push(energy);
                step *= 1.3;
                accepted = true;
                if gain < opts.objective_tol {
                    converged = true;
                }
                break;
            }
            step *= 0.5;
        }
        if !accepted || converged {
            converged = converged || !accepted;
            break;
        }
    }

    Ok(OptimizeOutcome {
        params: MeraParams {
            angles: theta.chunks_exact(2).map(|c| (c[0], c[1])).collect(),
        },
        energy,
        trace,
        converged,
        best_restart: 0,
    })
}

/// Multi-start search: the provided initialization runs first, then
/// `restarts - 1` seeded random starts; the best objective wins. Sequential
/// and deterministic; restarts are independent, so callers may instead fan
/// out [`optimize_single`] over [`restart_init`] points and keep the
/// smallest energy.
pub fn optimize(
    layout: &MeraLayout,
    h0: &HamiltonianSpec,
    init: Option<&MeraParams>,
    opts: &OptimizeOptions,
) -> Result<OptimizeOutcome> {
    if opts.restarts == 0 {
        return Err(Error::Domain("need at least one restart".into()));
    }
    let mut best: Option<OptimizeOutcome> = None;
    for restart in 0..opts.restarts {
        let start = match (restart, init) {
            (0, Some(p)) => p.clone(),
            _ => restart_init(layout, opts, restart),
        };
        let mut outcome = optimize_single(layout, h0, &start, opts)?;
        outcome.best_restart = restart;
        let better = best
            .as_ref()
            .map_or(true, |b| outcome.energy < b.energy);
        if better {
            best = Some(outcome);
        }
    }
    Ok(best.expect("at least one restart ran"))
}

/// Quality of a prepared state against the exact ground space of `h0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FidelityMetrics {
    /// `(<H> - E0) / N`.
    pub energy_density_error: f64,
    /// `1 - |<ground|psi>|^2`; against the ground-space projector when the
    /// ground state is degenerate.
    pub infidelity: f64,
    /// The exact ground energy used.
    pub ground_energy: f64,
}

/// Computes energy-density error and infidelity of a state.
///
/// With a degenerate ground space, fidelity is taken against the projector:
/// further ground vectors are resolved by deflated solves until the next
/// level separates.
pub fn fidelity_metrics(state: &StateVector, h0: &HamiltonianSpec) -> Result<FidelityMetrics> {
    let gs = ground_state(h0, 1e-10)?;
    let energy = state.expectation(&h0.terms)?;
    let mut fidelity = gs.state.overlap(state)?.norm_sqr();
    if gs.degenerate {
        let mut members = alloc::vec![gs.state.clone()];
        loop {
            let refs: Vec<&StateVector> = members.iter().collect();
            let next = crate::sim::ground_state_deflated(h0, 1e-10, &refs)?;
            if (next.energy - gs.energy).abs() > 1e-7 * gs.energy.abs().max(1.0) {
                break;
            }
            fidelity += next.state.overlap(state)?.norm_sqr();
            members.push(next.state);
            if members.len() >= 8 {
                break;
            }
        }
    }
    Ok(FidelityMetrics {
        energy_density_error: (energy - gs.energy) / h0.sites as f64,
        infidelity: 1.0 - fidelity,
        ground_energy: gs.energy,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::{build_tfim, parity_op, CouplingProfile};
    use approx::assert_abs_diff_eq;

    #[test]
    fn smallest_layout_matches_the_expand_and_entangle_rule() {
        let layout = build_layout(4).unwrap();
        let pairs: Vec<(u32, u32)> = layout.gates.iter().map(|g| g.sites).collect();
        assert_eq!(pairs, alloc::vec![(0, 2), (0, 1), (2, 3), (1, 2), (3, 0)]);
        assert_eq!(layout.gates[0].kind, GateKind::Top);
        assert_eq!(layout.gates[1].kind, GateKind::Isometry);
        assert_eq!(layout.gates[3].kind, GateKind::Entangler);
    }

    #[test]
    fn sixteen_site_layout_shape() {
        let layout = build_layout(16).unwrap();
        assert_eq!(layout.gate_count(), 29);
        assert_eq!(layout.layer_count(), 4);
        // The quoted layer-1 branchings and crossing.
        assert!(layout
            .gates
            .iter()
            .any(|g| g.kind == GateKind::Isometry && g.sites == (0, 4) && g.layer == 1));
        assert!(layout
            .gates
            .iter()
            .any(|g| g.kind == GateKind::Isometry && g.sites == (8, 12) && g.layer == 1));
        assert!(layout
            .gates
            .iter()
            .any(|g| g.kind == GateKind::Entangler && g.sites == (4, 8) && g.layer == 1));
        // Every site is touched.
        let mut touched = alloc::vec![false; 16];
        for g in &layout.gates {
            touched[g.sites.0 as usize] = true;
            touched[g.sites.1 as usize] = true;
        }
        assert!(touched.iter().all(|&t| t));
    }

    #[test]
    fn unsupported_sizes_are_rejected() {
        assert!(build_layout(6).is_err());
        assert!(build_layout(64).is_err());
    }

    #[test]
    fn descriptor_hash_tracks_structure() {
        let a = build_layout(8).unwrap();
        let b = build_layout(16).unwrap();
        assert_ne!(a.descriptor_hash(), b.descriptor_hash());
        assert_eq!(a.descriptor_hash(), build_layout(8).unwrap().descriptor_hash());
    }

    #[test]
    fn zero_params_leave_plus_state() {
        let layout = build_layout(8).unwrap();
        let params = MeraParams::zeros(layout.gate_count());
        let state = prepare_state(&layout, &params).unwrap();
        let plus = StateVector::plus_state(8).unwrap();
        let fid = state.overlap(&plus).unwrap().norm_sqr();
        assert_abs_diff_eq!(fid, 1.0, epsilon = 1e-12);
    }

    #[test]
    fn prepared_states_keep_positive_parity() {
        let layout = build_layout(16).unwrap();
        let init = restart_init(&layout, &OptimizeOptions::default(), 3);
        let state = prepare_state(&layout, &init).unwrap();
        let parity = state.expectation(&parity_op(16)).unwrap();
        assert_abs_diff_eq!(parity, 1.0, epsilon = 1e-10);
    }

    #[test]
    fn misaligned_params_are_rejected() {
        let layout = build_layout(8).unwrap();
        let params = MeraParams::zeros(3);
        assert!(matches!(
            prepare_state(&layout, &params),
            Err(Error::Misaligned(_))
        ));
    }

    #[test]
    fn inverse_circuit_undoes_preparation() {
        let layout = build_layout(8).unwrap();
        let params = restart_init(&layout, &OptimizeOptions::default(), 1);
        let mut state = prepare_state(&layout, &params).unwrap();
        apply_circuit(&mut state, &layout, &params, true).unwrap();
        let plus = StateVector::plus_state(8).unwrap();
        assert_abs_diff_eq!(
            state.overlap(&plus).unwrap().norm_sqr(),
            1.0,
            epsilon = 1e-12
        );
    }

    #[test]
    fn tiny_instance_optimizes_to_the_exact_ground_state() {
        let layout = build_layout(4).unwrap();
        let h0 = build_tfim(&CouplingProfile::uniform(4)).unwrap();
        let opts = OptimizeOptions {
            restarts: 3,
            max_iters: 4000,
            ..OptimizeOptions::default()
        };
        let out = optimize(&layout, &h0, None, &opts).unwrap();
        let gs = ground_state(&h0, 1e-10).unwrap();
        assert!(
            out.energy - gs.energy < 1e-6,
            "optimized {} vs exact {}",
            out.energy,
            gs.energy
        );
        // Monotone trace.
        assert!(out.trace.windows(2).all(|w| w[1] <= w[0] + 1e-12));
        // Metrics agree.
        let state = prepare_state(&layout, &out.params).unwrap();
        let metrics = fidelity_metrics(&state, &h0).unwrap();
        assert!(metrics.energy_density_error < 1e-6 / 4.0 * 10.0);
        assert!(metrics.infidelity < 1e-5);
    }
}
