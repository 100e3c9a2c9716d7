//! Statevector storage and gate kernels.
//!
//! Site `i` owns bit `i` of the amplitude index (see the crate-level
//! conventions); a two-qubit gate on `(i, j)` acts in the 4-dim basis
//! `m = 2*b_i + b_j`.

use alloc::{format, vec, vec::Vec};
use num_complex::Complex64;
use num_traits::Float;

use crate::error::{Error, Result};
use crate::lattice::{Axis, PauliTerm};

/// Largest supported chain; `2^24` amplitudes is 256 MiB.
pub const MAX_SITES: u32 = 24;

/// A normalized many-body state of `2^N` complex amplitudes.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    sites: u32,
    amps: Vec<Complex64>,
}

impl StateVector {
    /// The product state `|+>^N` (every amplitude `2^{-N/2}`).
    pub fn plus_state(sites: u32) -> Result<Self> {
        Self::check_capacity(sites)?;
        let dim = 1usize << sites;
        let amp = Complex64::new((dim as f64).sqrt().recip(), 0.0);
        Ok(Self {
            sites,
            amps: vec![amp; dim],
        })
    }

    /// The computational basis state `|index>`.
    pub fn basis_state(sites: u32, index: u64) -> Result<Self> {
        Self::check_capacity(sites)?;
        let dim = 1usize << sites;
        if index as usize >= dim {
            return Err(Error::Domain(format!(
                "basis index {index} out of range for {sites} sites"
            )));
        }
        let mut amps = vec![Complex64::new(0.0, 0.0); dim];
        amps[index as usize] = Complex64::new(1.0, 0.0);
        Ok(Self { sites, amps })
    }

    /// Wraps raw amplitudes; the length must be `2^sites`.
    pub fn from_amplitudes(sites: u32, amps: Vec<Complex64>) -> Result<Self> {
        Self::check_capacity(sites)?;
        if amps.len() != 1usize << sites {
            return Err(Error::DimensionMismatch(format!(
                "expected {} amplitudes for {sites} sites, got {}",
                1usize << sites,
                amps.len()
            )));
        }
        Ok(Self { sites, amps })
    }

    fn check_capacity(sites: u32) -> Result<()> {
        if sites == 0 || sites > MAX_SITES {
            return Err(Error::Capacity {
                sites,
                cap: MAX_SITES,
            });
        }
        Ok(())
    }

    /// Number of sites.
    pub fn sites(&self) -> u32 {
        self.sites
    }

    /// Hilbert-space dimension `2^N`.
    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    /// Read-only amplitudes.
    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub(crate) fn amplitudes_mut(&mut self) -> &mut [Complex64] {
        &mut self.amps
    }

    /// Euclidean norm.
    pub fn norm(&self) -> f64 {
        self.amps
            .iter()
            .map(Complex64::norm_sqr)
            .sum::<f64>()
            .sqrt()
    }

    /// Rescales to unit norm.
    pub fn normalize(&mut self) {
        let n = self.norm();
        if n > 0.0 {
            let inv = n.recip();
            for a in &mut self.amps {
                *a *= inv;
            }
        }
    }

    fn check_site(&self, site: u32) -> Result<()> {
        if site >= self.sites {
            return Err(Error::Domain(format!(
                "site {site} out of range for {} sites",
                self.sites
            )));
        }
        Ok(())
    }

    /// `exp(-i theta X_site / 2)`.
    pub fn apply_rx(&mut self, site: u32, theta: f64) -> Result<()> {
        self.check_site(site)?;
        let c = (0.5 * theta).cos();
        let s = Complex64::new(0.0, -(0.5 * theta).sin());
        let stride = 1usize << site;
        let dim = self.dim();
        let mut base = 0usize;
        while base < dim {
            for idx0 in base..base + stride {
                let idx1 = idx0 + stride;
                let (a0, a1) = (self.amps[idx0], self.amps[idx1]);
                self.amps[idx0] = c * a0 + s * a1;
                self.amps[idx1] = s * a0 + c * a1;
            }
            base += stride << 1;
        }
        Ok(())
    }

    /// `exp(-i theta Z_site / 2)`.
    pub fn apply_rz(&mut self, site: u32, theta: f64) -> Result<()> {
        self.check_site(site)?;
        let plus = Complex64::from_polar(1.0, -0.5 * theta);
        let minus = plus.conj();
        for (idx, a) in self.amps.iter_mut().enumerate() {
            *a *= if idx >> site & 1 == 0 { plus } else { minus };
        }
        Ok(())
    }

    /// `exp(-i theta Z_i Z_j / 2)`; diagonal phases by the bond sign.
    pub fn apply_rzz(&mut self, i: u32, j: u32, theta: f64) -> Result<()> {
        self.check_site(i)?;
        self.check_site(j)?;
        if i == j {
            return Err(Error::Domain("rzz needs two distinct sites".into()));
        }
        let aligned = Complex64::from_polar(1.0, -0.5 * theta);
        let opposed = aligned.conj();
        for (idx, a) in self.amps.iter_mut().enumerate() {
            let same = (idx >> i ^ idx >> j) & 1 == 0;
            *a *= if same { aligned } else { opposed };
        }
        Ok(())
    }

    /// `exp(-i theta (Y_i Z_j) / 2)`: a real rotation on bit-`i` pairs whose
    /// sense follows the `Z` sign of bit `j`.
    pub fn apply_ryz(&mut self, i: u32, j: u32, theta: f64) -> Result<()> {
        self.check_site(i)?;
        self.check_site(j)?;
        if i == j {
            return Err(Error::Domain("ryz needs two distinct sites".into()));
        }
        let c = (0.5 * theta).cos();
        let s = (0.5 * theta).sin();
        let stride = 1usize << i;
        let jbit = 1usize << j;
        let dim = self.dim();
        let mut base = 0usize;
        while base < dim {
            for idx0 in base..base + stride {
                let idx1 = idx0 + stride;
                let sz = if idx0 & jbit == 0 { s } else { -s };
                let (a0, a1) = (self.amps[idx0], self.amps[idx1]);
                self.amps[idx0] = c * a0 - sz * a1;
                self.amps[idx1] = sz * a0 + c * a1;
            }
            base += stride << 1;
        }
        Ok(())
    }

    /// `exp(-i theta X_i X_j / 2)`; mixes amplitude pairs with both bits
    /// flipped.
    pub fn apply_rxx(&mut self, i: u32, j: u32, theta: f64) -> Result<()> {
        self.check_site(i)?;
        self.check_site(j)?;
        if i == j {
            return Err(Error::Domain("rxx needs two distinct sites".into()));
        }
        let c = (0.5 * theta).cos();
        let s = Complex64::new(0.0, -(0.5 * theta).sin());
        let mask = (1usize << i) | (1usize << j);
        // Visit each {idx, idx^mask} pair once via the clear pivot bit.
        let pivot = 1usize << i.max(j);
        for idx in 0..self.dim() {
            if idx & pivot == 0 {
                let other = idx ^ mask;
                let (a0, a1) = (self.amps[idx], self.amps[other]);
                self.amps[idx] = c * a0 + s * a1;
                self.amps[other] = s * a0 + c * a1;
            }
        }
        Ok(())
    }

    /// Applies an arbitrary two-qubit unitary.
    pub fn apply_gate(&mut self, gate: &TwoQubitGate) -> Result<()> {
        let (i, j) = gate.sites;
        self.check_site(i)?;
        self.check_site(j)?;
        if i == j {
            return Err(Error::Domain("gate needs two distinct sites".into()));
        }
        let bi = 1usize << i;
        let bj = 1usize << j;
        let u = &gate.matrix;
        for idx in 0..self.dim() {
            if idx & (bi | bj) == 0 {
                let ids = [idx, idx | bj, idx | bi, idx | bi | bj];
                let v = [
                    self.amps[ids[0]],
                    self.amps[ids[1]],
                    self.amps[ids[2]],
                    self.amps[ids[3]],
                ];
                for (row, &id) in ids.iter().enumerate() {
                    self.amps[id] =
                        u[row][0] * v[0] + u[row][1] * v[1] + u[row][2] * v[2] + u[row][3] * v[3];
                }
            }
        }
        Ok(())
    }

    /// Multiplies by a Pauli string (a unitary, possibly with phase).
    pub fn apply_pauli(&mut self, factors: &[(u32, Axis)]) -> Result<()> {
        let mut flip = 0usize;
        for &(site, axis) in factors {
            self.check_site(site)?;
            if axis != Axis::Z {
                flip |= 1 << site;
            }
        }
        if flip == 0 {
            // Diagonal string: pure signs.
            for (idx, a) in self.amps.iter_mut().enumerate() {
                if pauli_phase(factors, idx) == Complex64::new(-1.0, 0.0) {
                    *a = -*a;
                }
            }
            return Ok(());
        }
        let pivot = 1usize << (usize::BITS - 1 - flip.leading_zeros());
        for idx in 0..self.dim() {
            if idx & pivot == 0 {
                let other = idx ^ flip;
                // P|idx> = phase(idx) |other>; swap with phases.
                let ph_a = pauli_phase(factors, idx);
                let ph_b = pauli_phase(factors, other);
                let (a, b) = (self.amps[idx], self.amps[other]);
                self.amps[other] = ph_a * a;
                self.amps[idx] = ph_b * b;
            }
        }
        Ok(())
    }

    /// `sum_terms coeff * <psi|P|psi>`.
    pub fn expectation(&self, terms: &[PauliTerm]) -> Result<f64> {
        let mut total = 0.0;
        for term in terms {
            total += term.coefficient * self.pauli_expectation(term)?;
        }
        Ok(total)
    }

    fn pauli_expectation(&self, term: &PauliTerm) -> Result<f64> {
        let mut flip = 0usize;
        for &(site, axis) in &term.factors {
            self.check_site(site)?;
            if axis != Axis::Z {
                flip |= 1 << site;
            }
        }
        let mut acc = Complex64::new(0.0, 0.0);
        if flip == 0 {
            for (idx, a) in self.amps.iter().enumerate() {
                acc += pauli_phase(&term.factors, idx) * a.norm_sqr();
            }
        } else {
            for (idx, a) in self.amps.iter().enumerate() {
                let target = idx ^ flip;
                acc += self.amps[target].conj() * pauli_phase(&term.factors, idx) * a;
            }
        }
        Ok(acc.re)
    }

    /// Inner product `<self|other>`.
    pub fn overlap(&self, other: &Self) -> Result<Complex64> {
        if self.sites != other.sites {
            return Err(Error::DimensionMismatch(format!(
                "overlap of {} and {} sites",
                self.sites, other.sites
            )));
        }
        Ok(self
            .amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| a.conj() * b)
            .sum())
    }

    /// Raw export: 8-byte little-endian site count, then interleaved
    /// little-endian `(re, im)` doubles.
    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(8 + 16 * self.dim());
        out.extend_from_slice(&(self.sites as u64).to_le_bytes());
        for a in &self.amps {
            out.extend_from_slice(&a.re.to_le_bytes());
            out.extend_from_slice(&a.im.to_le_bytes());
        }
        out
    }

    /// Inverse of [`Self::to_bytes`].
    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        if bytes.len() < 8 {
            return Err(Error::Domain("state blob shorter than its header".into()));
        }
        let sites = u64::from_le_bytes(bytes[..8].try_into().expect("checked length")) as u32;
        Self::check_capacity(sites)?;
        let dim = 1usize << sites;
        if bytes.len() != 8 + 16 * dim {
            return Err(Error::Domain(format!(
                "state blob for {sites} sites must be {} bytes, got {}",
                8 + 16 * dim,
                bytes.len()
            )));
        }
        let mut amps = Vec::with_capacity(dim);
        for chunk in bytes[8..].chunks_exact(16) {
            let re = f64::from_le_bytes(chunk[..8].try_into().expect("checked length"));
            let im = f64::from_le_bytes(chunk[8..].try_into().expect("checked length"));
            amps.push(Complex64::new(re, im));
        }
        Ok(Self { sites, amps })
    }
}

/// `Im <lambda| Y_i Z_j |phi>`, fused over amplitude pairs; the adjoint
/// gradient of the variational circuit reduces to brackets of this shape.
pub(crate) fn imag_yz_bracket(lambda: &StateVector, phi: &StateVector, i: u32, j: u32) -> f64 {
    debug_assert_eq!(lambda.dim(), phi.dim());
    let stride = 1usize << i;
    let jbit = 1usize << j;
    let dim = lambda.dim();
    let (l, p) = (&lambda.amps, &phi.amps);
    let mut acc = 0.0;
    let mut base = 0usize;
    while base < dim {
        for idx0 in base..base + stride {
            let idx1 = idx0 + stride;
            let zj = if idx0 & jbit == 0 { 1.0 } else { -1.0 };
            // Im(i zj (l1* p0 - l0* p1)) = zj Re(l1* p0 - l0* p1).
            let re = l[idx1].conj() * p[idx0] - l[idx0].conj() * p[idx1];
            acc += zj * re.re;
        }
        base += stride << 1;
    }
    acc
}

/// Phase picked up by basis state `idx` under the Pauli string:
/// `P |idx> = phase * |idx ^ flips>`.
fn pauli_phase(factors: &[(u32, Axis)], idx: usize) -> Complex64 {
    let mut phase = Complex64::new(1.0, 0.0);
    for &(site, axis) in factors {
        let bit = idx >> site & 1;
        phase *= match axis {
            Axis::X => Complex64::new(1.0, 0.0),
            Axis::Y => {
                if bit == 0 {
                    Complex64::new(0.0, 1.0)
                } else {
                    Complex64::new(0.0, -1.0)
                }
            }
            Axis::Z => {
                if bit == 0 {
                    Complex64::new(1.0, 0.0)
                } else {
                    Complex64::new(-1.0, 0.0)
                }
            }
        };
    }
    phase
}

/// Accumulates `dst += coeff * P * src` for one Pauli term.
pub(crate) fn accumulate_term(dst: &mut [Complex64], src: &[Complex64], term: &PauliTerm) {
    let coeff = term.coefficient;
    let mut flip = 0usize;
    let mut diag_mask = 0usize;
    let mut has_y = false;
    for &(site, axis) in &term.factors {
        match axis {
            Axis::X => flip |= 1 << site,
            Axis::Y => {
                flip |= 1 << site;
                has_y = true;
            }
            Axis::Z => diag_mask |= 1 << site,
        }
    }
    if flip == 0 {
        // Z-type string: diagonal signs.
        for (idx, d) in dst.iter_mut().enumerate() {
            let sign = if (idx & diag_mask).count_ones() % 2 == 0 {
                coeff
            } else {
                -coeff
            };
            *d += sign * src[idx];
        }
    } else if diag_mask == 0 && !has_y {
        // X-type string: pure bit flips.
        for (idx, d) in dst.iter_mut().enumerate() {
            *d += coeff * src[idx ^ flip];
        }
    } else {
        for (idx, d) in dst.iter_mut().enumerate() {
            let source = idx ^ flip;
            *d += coeff * pauli_phase(&term.factors, source) * src[source];
        }
    }
}

/// `H |psi>` applied term-wise; never materializes an operator matrix.
pub fn apply_hamiltonian(
    terms: &[PauliTerm],
    state: &StateVector,
) -> Result<StateVector> {
    let mut out = vec![Complex64::new(0.0, 0.0); state.dim()];
    for term in terms {
        for &(site, _) in &term.factors {
            if site >= state.sites() {
                return Err(Error::DimensionMismatch(format!(
                    "term touches site {site} outside a {}-site state",
                    state.sites()
                )));
            }
        }
        accumulate_term(&mut out, state.amplitudes(), term);
    }
    StateVector::from_amplitudes(state.sites(), out)
}

/// A 4x4 unitary bound to an ordered site pair.
#[derive(Debug, Clone, PartialEq)]
pub struct TwoQubitGate {
    /// Row-major matrix in the `m = 2*b_i + b_j` basis.
    pub matrix: [[Complex64; 4]; 4],
    /// Target sites `(i, j)`; `i` is the high bit of the gate basis.
    pub sites: (u32, u32),
}

impl TwoQubitGate {
    /// Binds a matrix to a site pair.
    pub fn new(matrix: [[Complex64; 4]; 4], sites: (u32, u32)) -> Self {
        Self { matrix, sites }
    }

    /// Largest row deviation of `U U^dag` from the identity.
    pub fn unitarity_defect(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for r in 0..4 {
            for c in 0..4 {
                let mut acc = Complex64::new(0.0, 0.0);
                for k in 0..4 {
                    acc += self.matrix[r][k] * self.matrix[c][k].conj();
                }
                let expect = if r == c { 1.0 } else { 0.0 };
                worst = worst.max((acc - expect).norm());
            }
        }
        worst
    }

    /// Hermitian adjoint bound to the same sites.
    pub fn dagger(&self) -> Self {
        let mut matrix = [[Complex64::new(0.0, 0.0); 4]; 4];
        for r in 0..4 {
            for c in 0..4 {
                matrix[r][c] = self.matrix[c][r].conj();
            }
        }
        Self {
            matrix,
            sites: self.sites,
        }
    }
}

/// The variational two-qubit gate `exp(-i (phi Y(x)Z + gamma Z(x)Y) / 2)`.
///
/// `Y(x)Z` and `Z(x)Y` commute and square to the identity, so the
/// exponential factors into two independent rotations, each evaluated in
/// closed form.
pub fn mera_gate_matrix(phi: f64, gamma: f64) -> [[Complex64; 4]; 4] {
    let yz = kron2(PAULI_Y, PAULI_Z);
    let zy = kron2(PAULI_Z, PAULI_Y);
    let a = rotation4(&yz, phi);
    let b = rotation4(&zy, gamma);
    mat4_mul(&a, &b)
}

const PAULI_Y: [[Complex64; 2]; 2] = [
    [Complex64::new(0.0, 0.0), Complex64::new(0.0, -1.0)],
    [Complex64::new(0.0, 1.0), Complex64::new(0.0, 0.0)],
];
const PAULI_Z: [[Complex64; 2]; 2] = [
    [Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)],
    [Complex64::new(0.0, 0.0), Complex64::new(-1.0, 0.0)],
];

fn kron2(a: [[Complex64; 2]; 2], b: [[Complex64; 2]; 2]) -> [[Complex64; 4]; 4] {
    let mut out = [[Complex64::new(0.0, 0.0); 4]; 4];
    for r in 0..4 {
        for c in 0..4 {
            out[r][c] = a[r >> 1][c >> 1] * b[r & 1][c & 1];
        }
    }
    out
}

/// `cos(theta/2) I - i sin(theta/2) G` for an involutory generator `G`.
fn rotation4(g: &[[Complex64; 4]; 4], theta: f64) -> [[Complex64; 4]; 4] {
    let c = (0.5 * theta).cos();
    let s = Complex64::new(0.0, -(0.5 * theta).sin());
    let mut out = [[Complex64::new(0.0, 0.0); 4]; 4];
    for r in 0..4 {
        for col in 0..4 {
            out[r][col] = s * g[r][col];
            if r == col {
                out[r][col] += c;
            }
        }
    }
    out
}

fn mat4_mul(a: &[[Complex64; 4]; 4], b: &[[Complex64; 4]; 4]) -> [[Complex64; 4]; 4] {
    let mut out = [[Complex64::new(0.0, 0.0); 4]; 4];
    for r in 0..4 {
        for c in 0..4 {
            let mut acc = Complex64::new(0.0, 0.0);
            for k in 0..4 {
                acc += a[r][k] * b[k][c];
            }
            out[r][c] = acc;
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::{build_tfim, parity_op, CouplingProfile};
    use approx::assert_abs_diff_eq;

    #[test]
    fn plus_state_anchors() {
        let s = StateVector::plus_state(1).unwrap();
        let inv_sqrt2 = core::f64::consts::FRAC_1_SQRT_2;
        assert_abs_diff_eq!(s.amplitudes()[0].re, inv_sqrt2, epsilon = 1e-15);
        assert_abs_diff_eq!(s.amplitudes()[1].re, inv_sqrt2, epsilon = 1e-15);

        let s16 = StateVector::plus_state(16).unwrap();
        assert_abs_diff_eq!(s16.norm(), 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(
            s16.expectation(&parity_op(16)).unwrap(),
            1.0,
            epsilon = 1e-12
        );
        let h0 = build_tfim(&CouplingProfile::uniform(16)).unwrap();
        assert_abs_diff_eq!(s16.expectation(&h0.terms).unwrap(), -8.0, epsilon = 1e-10);
    }

    #[test]
    fn capacity_is_enforced() {
        assert!(matches!(
            StateVector::plus_state(MAX_SITES + 1),
            Err(Error::Capacity { .. })
        ));
        assert!(StateVector::plus_state(20).is_ok());
    }

    #[test]
    fn rx_pi_maps_zero_to_minus_i_one() {
        let mut s = StateVector::basis_state(1, 0).unwrap();
        s.apply_rx(0, core::f64::consts::PI).unwrap();
        assert_abs_diff_eq!(s.amplitudes()[0].norm(), 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(
            (s.amplitudes()[1] - Complex64::new(0.0, -1.0)).norm(),
            0.0,
            epsilon = 1e-15
        );
    }

    #[test]
    fn rzz_inverts_cleanly() {
        let mut s = StateVector::plus_state(2).unwrap();
        let orig = s.clone();
        s.apply_rzz(0, 1, 0.737).unwrap();
        s.apply_rzz(0, 1, -0.737).unwrap();
        let diff: f64 = s
            .amplitudes()
            .iter()
            .zip(orig.amplitudes())
            .map(|(a, b)| (a - b).norm())
            .sum();
        assert!(diff < 1e-14);
    }

    #[test]
    fn mera_gate_identity_and_commutation() {
        let id = mera_gate_matrix(0.0, 0.0);
        for r in 0..4 {
            for c in 0..4 {
                let expect = if r == c { 1.0 } else { 0.0 };
                assert_abs_diff_eq!((id[r][c] - expect).norm(), 0.0, epsilon = 1e-15);
            }
        }
        // exp(-i pi A / 2) = -i A for A^2 = I.
        let half_turn = mera_gate_matrix(core::f64::consts::PI, 0.0);
        let yz = kron2(PAULI_Y, PAULI_Z);
        for r in 0..4 {
            for c in 0..4 {
                let expect = Complex64::new(0.0, -1.0) * yz[r][c];
                assert_abs_diff_eq!((half_turn[r][c] - expect).norm(), 0.0, epsilon = 1e-15);
            }
        }
        // Unitary and commutes with X(x)X at generic angles.
        let g = TwoQubitGate::new(mera_gate_matrix(0.83, -1.21), (0, 1));
        assert!(g.unitarity_defect() < 1e-12);
        let xx = kron2(
            [
                [Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0)],
                [Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)],
            ],
            [
                [Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0)],
                [Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)],
            ],
        );
        let lhs = mat4_mul(&g.matrix, &xx);
        let rhs = mat4_mul(&xx, &g.matrix);
        for r in 0..4 {
            for c in 0..4 {
                assert_abs_diff_eq!((lhs[r][c] - rhs[r][c]).norm(), 0.0, epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn gate_application_matches_rotation_kernels() {
        // The dedicated rxx kernel and the generic gate path must agree.
        let mut a = StateVector::plus_state(3).unwrap();
        a.apply_rx(1, 0.3).unwrap();
        a.apply_rzz(0, 2, -0.9).unwrap();
        let mut b = a.clone();

        a.apply_rxx(2, 0, 0.41).unwrap();
        let xx = kron2(
            [
                [Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0)],
                [Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)],
            ],
            [
                [Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0)],
                [Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)],
            ],
        );
        b.apply_gate(&TwoQubitGate::new(rotation4(&xx, 0.41), (2, 0)))
            .unwrap();
        for (x, y) in a.amplitudes().iter().zip(b.amplitudes()) {
            assert_abs_diff_eq!((x - y).norm(), 0.0, epsilon = 1e-14);
        }
    }

    #[test]
    fn expectation_and_overlap_basics() {
        let s = StateVector::plus_state(4).unwrap();
        assert_abs_diff_eq!(s.overlap(&s).unwrap().re, 1.0, epsilon = 1e-14);
        assert_abs_diff_eq!(s.overlap(&s).unwrap().im, 0.0, epsilon = 1e-14);

        let other = StateVector::basis_state(3, 0).unwrap();
        assert!(s.overlap(&other).is_err());
    }

    #[test]
    fn pauli_string_multiplication_is_involutive_for_xz() {
        let mut s = StateVector::plus_state(4).unwrap();
        s.apply_rzz(0, 1, 0.3).unwrap();
        s.apply_rx(2, -0.7).unwrap();
        let orig = s.clone();
        let string = [(0, Axis::Y), (3, Axis::Z)];
        s.apply_pauli(&string).unwrap();
        s.apply_pauli(&string).unwrap();
        for (x, y) in s.amplitudes().iter().zip(orig.amplitudes()) {
            assert_abs_diff_eq!((x - y).norm(), 0.0, epsilon = 1e-14);
        }
    }

    #[test]
    fn bytes_round_trip() {
        let mut s = StateVector::plus_state(5).unwrap();
        s.apply_rx(3, 1.234).unwrap();
        s.apply_rzz(0, 4, -0.55).unwrap();
        let back = StateVector::from_bytes(&s.to_bytes()).unwrap();
        assert_eq!(s, back);
        assert!(StateVector::from_bytes(&[1, 2, 3]).is_err());
    }

    #[test]
    fn long_circuit_preserves_norm() {
        let mut s = StateVector::plus_state(10).unwrap();
        let mut seed = 0xfeed_beefu64;
        for k in 0..642 {
            let r = crate::util::splitmix64(&mut seed);
            let i = (r % 10) as u32;
            let j = ((r >> 8) % 10) as u32;
            let theta = ((r >> 16) % 1000) as f64 / 500.0 - 1.0;
            if i == j {
                s.apply_rx(i, theta).unwrap();
            } else if k % 2 == 0 {
                s.apply_rzz(i, j, theta).unwrap();
            } else {
                s.apply_rxx(i, j, theta).unwrap();
            }
        }
        assert_abs_diff_eq!(s.norm(), 1.0, epsilon = 1e-9);
    }
}
