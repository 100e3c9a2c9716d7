//! Time evolution: symmetric Trotter segments and a Krylov propagator.

use alloc::{format, vec::Vec};
use num_complex::Complex64;
use num_traits::Float;

use crate::error::{Error, Result};
use crate::lattice::{Axis, HamiltonianSpec, PauliTerm};
use crate::sim::state::{accumulate_term, StateVector};
use crate::sim::tridiag::eigen_tridiagonal;

/// One second-order Trotter step of duration `tau` (sign allowed).
///
/// The Hamiltonian is split into two internally commuting layers — the
/// Z-diagonal terms and the X-diagonal terms — and applied as
/// `exp(-i H_Z tau/2) exp(-i H_X tau) exp(-i H_Z tau/2)`,
/// each layer as an exact product of commuting exponentials. Any term that
/// mixes axes (or uses Y) has no layer to live in and is rejected.
pub fn trotter_segment(state: &mut StateVector, h: &HamiltonianSpec, tau: f64) -> Result<()> {
    if h.sites != state.sites() {
        return Err(Error::DimensionMismatch(format!(
            "hamiltonian on {} sites, state on {}",
            h.sites,
            state.sites()
        )));
    }
    let (z_layer, x_layer) = split_layers(h)?;
    apply_layer(state, &z_layer, 0.5 * tau, &mut |_, _| Ok(()))?;
    apply_layer(state, &x_layer, tau, &mut |_, _| Ok(()))?;
    apply_layer(state, &z_layer, 0.5 * tau, &mut |_, _| Ok(()))?;
    Ok(())
}

/// Splits a Hamiltonian into its Z-diagonal and X-diagonal commuting layers.
pub(crate) fn split_layers(h: &HamiltonianSpec) -> Result<(Vec<&PauliTerm>, Vec<&PauliTerm>)> {
    let mut z_layer: Vec<&PauliTerm> = Vec::new();
    let mut x_layer: Vec<&PauliTerm> = Vec::new();
    for term in &h.terms {
        if term.factors.len() > 2 || term.factors.is_empty() {
            return Err(Error::UnsupportedStructure(format!(
                "trotter step supports 1- and 2-site terms, got {} factors",
                term.factors.len()
            )));
        }
        if term.is_axis_uniform(Axis::Z) {
            z_layer.push(term);
        } else if term.is_axis_uniform(Axis::X) {
            x_layer.push(term);
        } else {
            return Err(Error::UnsupportedStructure(
                "trotter step requires terms uniform in X or in Z".into(),
            ));
        }
    }
    Ok((z_layer, x_layer))
}

/// `exp(-i coeff P tau)` for every term of a commuting layer, in list
/// order; `after_two_site` runs after every two-qubit rotation (the noise
/// hook of sampled runs).
pub(crate) fn apply_layer(
    state: &mut StateVector,
    layer: &[&PauliTerm],
    tau: f64,
    after_two_site: &mut dyn FnMut(&mut StateVector, (u32, u32)) -> Result<()>,
) -> Result<()> {
    for term in layer {
        let theta = 2.0 * term.coefficient * tau;
        match term.factors.as_slice() {
            [(i, Axis::X)] => state.apply_rx(*i, theta)?,
            [(i, Axis::Z)] => state.apply_rz(*i, theta)?,
            [(i, Axis::Z), (j, Axis::Z)] => {
                state.apply_rzz(*i, *j, theta)?;
                after_two_site(state, (*i, *j))?;
            }
            [(i, Axis::X), (j, Axis::X)] => {
                state.apply_rxx(*i, *j, theta)?;
                after_two_site(state, (*i, *j))?;
            }
            _ => {
                return Err(Error::UnsupportedStructure(
                    "unexpected term shape in commuting layer".into(),
                ))
            }
        }
    }
    Ok(())
}

/// Hard cap on the Krylov subspace per substep.
const MAX_KRYLOV: usize = 48;
/// Deepest time-step bisection before giving up.
const MAX_SPLITS: u32 = 24;

/// Applies `exp(-i H t)` to the state within `tol`, using a Lanczos
/// approximation of the matrix-exponential action with term-wise
/// Hamiltonian application.
///
/// The time interval is bisected adaptively whenever the Krylov residual
/// estimate does not reach the (proportionally budgeted) local tolerance
/// within [`MAX_KRYLOV`] vectors.
pub fn exact_evolve(state: &mut StateVector, h: &HamiltonianSpec, t: f64, tol: f64) -> Result<()> {
    if h.sites != state.sites() {
        return Err(Error::DimensionMismatch(format!(
            "hamiltonian on {} sites, state on {}",
            h.sites,
            state.sites()
        )));
    }
    if t == 0.0 {
        return Ok(());
    }
    if !(tol > 0.0) {
        return Err(Error::Domain(format!("tolerance must be positive, got {tol}")));
    }
    let mut remaining = t;
    let mut step = t;
    let mut splits = 0u32;
    while remaining != 0.0 {
        if step.abs() > remaining.abs() {
            step = remaining;
        }
        let local_tol = tol * (step / t).abs();
        match krylov_step(state, h, step, local_tol)? {
            true => {
                remaining -= step;
            }
            false => {
                step *= 0.5;
                splits += 1;
                if splits > MAX_SPLITS {
                    return Err(Error::Numerical(format!(
                        "krylov propagator stalled: step {step:e} after {splits} bisections \
                         still misses tolerance {tol:e}"
                    )));
                }
            }
        }
    }
    Ok(())
}

/// One Krylov substep; returns false when the subspace cap was hit before
/// the residual estimate met `tol`.
fn krylov_step(
    state: &mut StateVector,
    h: &HamiltonianSpec,
    dt: f64,
    tol: f64,
) -> Result<bool> {
    let dim = state.dim();
    let mut basis: Vec<Vec<Complex64>> = Vec::with_capacity(MAX_KRYLOV);
    let mut alphas: Vec<f64> = Vec::new();
    let mut betas: Vec<f64> = Vec::new();

    let norm = state.norm();
    if norm == 0.0 {
        return Err(Error::Numerical("cannot evolve the zero vector".into()));
    }
    let mut v: Vec<Complex64> = state.amplitudes().iter().map(|a| a / norm).collect();
    basis.push(v.clone());

    let mut happy = false;
    for j in 0..MAX_KRYLOV {
        // w = H v_j - alpha_j v_j - beta_{j-1} v_{j-1}
        let mut w = alloc::vec![Complex64::new(0.0, 0.0); dim];
        for term in &h.terms {
            accumulate_term(&mut w, &basis[j], term);
        }
        let alpha: f64 = basis[j]
            .iter()
            .zip(&w)
            .map(|(x, y)| (x.conj() * y).re)
            .sum();
        alphas.push(alpha);
        for (wk, vk) in w.iter_mut().zip(&basis[j]) {
            *wk -= alpha * vk;
        }
        if j > 0 {
            let beta_prev = betas[j - 1];
            for (wk, vk) in w.iter_mut().zip(&basis[j - 1]) {
                *wk -= beta_prev * vk;
            }
        }
        let beta: f64 = w.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();

        // Residual estimate: beta * |last coefficient of exp(-i T dt) e1|.
        let m = alphas.len();
        let check_now = beta < 1e-13 || m >= 6 && (m % 2 == 0 || m == MAX_KRYLOV);
        if check_now {
            let coeffs = propagator_coefficients(&alphas, &betas, dt)?;
            let err = beta * coeffs[m - 1].norm() * dt.abs();
            if beta < 1e-13 || err < tol {
                happy = true;
                // Combine: psi = norm * sum_k coeffs[k] basis[k].
                let mut out = alloc::vec![Complex64::new(0.0, 0.0); dim];
                for (k, coeff) in coeffs.iter().enumerate() {
                    let scaled = coeff * norm;
                    for (o, b) in out.iter_mut().zip(&basis[k]) {
                        *o += scaled * b;
                    }
                }
                *state = StateVector::from_amplitudes(state.sites(), out)?;
                break;
            }
        }
        if j + 1 == MAX_KRYLOV {
            break;
        }
        betas.push(beta);
        for wk in w.iter_mut() {
            *wk /= beta;
        }
        core::mem::swap(&mut v, &mut w);
        basis.push(v.clone());
    }
    Ok(happy)
}

/// `exp(-i T dt) e1` for the projected tridiagonal matrix.
fn propagator_coefficients(alphas: &[f64], betas: &[f64], dt: f64) -> Result<Vec<Complex64>> {
    let m = alphas.len();
    let eig = eigen_tridiagonal(alphas, betas)?;
    let mut out = alloc::vec![Complex64::new(0.0, 0.0); m];
    for k in 0..m {
        let phase = Complex64::from_polar(1.0, -eig.values[k] * dt);
        let weight = eig.vectors[k]; // first row: e1 component of column k
        for row in 0..m {
            out[row] += eig.vectors[row * m + k] * phase * weight;
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cft::KappaTriplet;
    use crate::lattice::{build_generalized_ising, build_tfim, CouplingProfile, IsingCouplings};
    use approx::assert_abs_diff_eq;

    fn uniform_h(n: u32) -> HamiltonianSpec {
        build_tfim(&CouplingProfile::uniform(n)).unwrap()
    }

    #[test]
    fn zero_tau_is_identity() {
        let h = uniform_h(6);
        let mut s = StateVector::plus_state(6).unwrap();
        let orig = s.clone();
        trotter_segment(&mut s, &h, 0.0).unwrap();
        assert_eq!(s, orig);
        exact_evolve(&mut s, &h, 0.0, 1e-10).unwrap();
        assert_eq!(s, orig);
    }

    #[test]
    fn trotter_is_reversible() {
        let h = build_tfim(&CouplingProfile::new(
            KappaTriplet::new(1.0, 1.2, -0.2),
            2,
            8,
        ))
        .unwrap();
        let mut s = StateVector::plus_state(8).unwrap();
        s.apply_rx(3, 0.7).unwrap();
        let orig = s.clone();
        trotter_segment(&mut s, &h, 0.37).unwrap();
        trotter_segment(&mut s, &h, -0.37).unwrap();
        let dist: f64 = s
            .amplitudes()
            .iter()
            .zip(orig.amplitudes())
            .map(|(a, b)| (a - b).norm_sqr())
            .sum::<f64>()
            .sqrt();
        assert!(dist < 1e-12, "round trip distance {dist}");
    }

    #[test]
    fn single_term_hamiltonian_is_exact_for_any_tau() {
        let mut h = uniform_h(4);
        h.terms.truncate(1); // one ZZ term
        let mut a = StateVector::plus_state(4).unwrap();
        let mut b = a.clone();
        trotter_segment(&mut a, &h, 1.7).unwrap();
        exact_evolve(&mut b, &h, 1.7, 1e-12).unwrap();
        let dist: f64 = a
            .amplitudes()
            .iter()
            .zip(b.amplitudes())
            .map(|(x, y)| (x - y).norm_sqr())
            .sum::<f64>()
            .sqrt();
        assert!(dist < 1e-10, "distance {dist}");
    }

    #[test]
    fn mixed_axis_terms_are_rejected() {
        let mut h = uniform_h(4);
        h.terms.push(PauliTerm::pair(0.1, 0, Axis::X, 1, Axis::Z));
        let mut s = StateVector::plus_state(4).unwrap();
        assert!(matches!(
            trotter_segment(&mut s, &h, 0.1),
            Err(Error::UnsupportedStructure(_))
        ));
    }

    #[test]
    fn generalized_family_is_layerable() {
        let h = build_generalized_ising(IsingCouplings::new(1.0, 0.6066, 0.25), None, 6).unwrap();
        let mut s = StateVector::plus_state(6).unwrap();
        trotter_segment(&mut s, &h, 0.3).unwrap();
        assert_abs_diff_eq!(s.norm(), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn krylov_conserves_energy_and_norm() {
        let h = build_tfim(&CouplingProfile::new(
            KappaTriplet::new(1.0, 1.2, -0.2),
            2,
            10,
        ))
        .unwrap();
        let mut s = StateVector::plus_state(10).unwrap();
        s.apply_rzz(0, 5, 0.4).unwrap();
        let e_before = s.expectation(&h.terms).unwrap();
        exact_evolve(&mut s, &h, 2.3, 1e-10).unwrap();
        assert_abs_diff_eq!(s.norm(), 1.0, epsilon = 1e-9);
        let e_after = s.expectation(&h.terms).unwrap();
        assert_abs_diff_eq!(e_before, e_after, epsilon = 1e-9);
    }

    #[test]
    fn trotter_error_shrinks_fourfold_per_halving() {
        // Second order: state error ~ tau^2 at fixed total time.
        let h = build_tfim(&CouplingProfile::new(
            KappaTriplet::new(1.0, 1.2, -0.2),
            2,
            8,
        ))
        .unwrap();
        let mut exact = StateVector::plus_state(8).unwrap();
        exact_evolve(&mut exact, &h, 0.6, 1e-12).unwrap();
        let mut dists = Vec::new();
        for steps in [1u32, 2, 4, 8] {
            let mut s = StateVector::plus_state(8).unwrap();
            let tau = 0.6 / steps as f64;
            for _ in 0..steps {
                trotter_segment(&mut s, &h, tau).unwrap();
            }
            let ov = exact.overlap(&s).unwrap();
            // Phase-aligned distance.
            let fid = ov.norm();
            dists.push((2.0 * (1.0 - fid)).max(1e-30).sqrt());
        }
        for w in dists.windows(2) {
            let ratio = w[0] / w[1];
            assert!(
                (3.0..5.5).contains(&ratio),
                "expected ~4x error reduction, got {ratio} ({dists:?})"
            );
        }
    }
}
