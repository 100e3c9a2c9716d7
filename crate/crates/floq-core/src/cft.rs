//! Closed-form continuum predictions for the two-segment Floquet drive.
//!
//! A single-harmonic deformation of the coupling envelope keeps the driven
//! theory inside an su(1,1) sector, so each drive segment acts on primary
//! fields as a Mobius transformation. Composing the per-segment 2x2 matrices
//! gives the one-cycle matrix; its trace classifies the dynamical phase and
//! its powers determine every observable in scope: Loschmidt echo, energy
//! density and total energy per cycle, and the positions where energy
//! localizes in the heating phase.

use alloc::{format, vec::Vec};
use num_complex::Complex64;
use num_traits::Float;

use crate::error::{Error, Result};

/// Amplitudes of the single-harmonic coupling envelope
/// `f(x) = mean + cos_amp*cos(2 pi q x / L) + sin_amp*sin(2 pi q x / L)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KappaTriplet {
    /// Constant offset of the envelope.
    pub mean: f64,
    /// Cosine amplitude.
    pub cos_amp: f64,
    /// Sine amplitude.
    pub sin_amp: f64,
}

impl KappaTriplet {
    /// The undeformed envelope `f(x) = 1`.
    pub const UNIFORM: Self = Self {
        mean: 1.0,
        cos_amp: 0.0,
        sin_amp: 0.0,
    };

    /// Builds a triplet from its three amplitudes.
    pub const fn new(mean: f64, cos_amp: f64, sin_amp: f64) -> Self {
        Self {
            mean,
            cos_amp,
            sin_amp,
        }
    }

    /// `s^2 = mean^2 - cos_amp^2 - sin_amp^2`; its sign selects the
    /// trigonometric (`> 0`), parabolic (`= 0`) or hyperbolic (`< 0`)
    /// branch of the segment matrix.
    pub fn s_squared(&self) -> f64 {
        self.mean * self.mean - self.cos_amp * self.cos_amp - self.sin_amp * self.sin_amp
    }

    /// True when all three components are finite.
    pub fn is_finite(&self) -> bool {
        self.mean.is_finite() && self.cos_amp.is_finite() && self.sin_amp.is_finite()
    }
}

/// An SU(1,1) element `[[a, b], [b*, a*]]` with `|a|^2 - |b|^2 = 1`.
///
/// Only the first row is stored; the second is determined by conjugation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MobiusMatrix {
    /// Top-left element.
    pub a: Complex64,
    /// Top-right element.
    pub b: Complex64,
}

impl MobiusMatrix {
    /// The identity transformation.
    pub const IDENTITY: Self = Self {
        a: Complex64::new(1.0, 0.0),
        b: Complex64::new(0.0, 0.0),
    };

    /// Builds a matrix from its first row.
    pub const fn new(a: Complex64, b: Complex64) -> Self {
        Self { a, b }
    }

    /// `| (|a|^2 - |b|^2) - 1 |`, the deviation from SU(1,1) membership.
    pub fn su11_defect(&self) -> f64 {
        (self.a.norm_sqr() - self.b.norm_sqr() - 1.0).abs()
    }

    /// Matrix product `self * rhs`.
    pub fn compose(&self, rhs: &Self) -> Self {
        Self {
            a: self.a * rhs.a + self.b * rhs.b.conj(),
            b: self.a * rhs.b + self.b * rhs.a.conj(),
        }
    }

    /// The matrix of the opposite chirality: `(a, -b*)`.
    pub fn antichiral(&self) -> Self {
        Self {
            a: self.a,
            b: -self.b.conj(),
        }
    }

    /// Trace; real by the SU(1,1) structure (`a + a* = 2 Re a`).
    pub fn trace(&self) -> f64 {
        2.0 * self.a.re
    }

    /// `self^n` through the Cayley-Hamilton closed form.
    ///
    /// For a unimodular 2x2 matrix, `M^n = U_{n-1}(tr/2) M - U_{n-2}(tr/2) I`
    /// with Chebyshev polynomials of the second kind. Evaluating `U_k` in its
    /// circular/hyperbolic closed form keeps the result in SU(1,1) for powers
    /// far beyond what repeated multiplication sustains; near the parabolic
    /// point `|tr| = 2` the closed forms degenerate and the three-term
    /// recurrence takes over.
    pub fn power(&self, n: u32) -> Self {
        if n == 0 {
            return Self::IDENTITY;
        }
        let (u_prev, u_prev2) = chebyshev_u_pair(0.5 * self.trace(), n);
        Self {
            a: self.a * u_prev - u_prev2,
            b: self.b * u_prev,
        }
    }

    /// Direction `(alpha, beta)` of the first row of `self^n` as `n -> inf`,
    /// i.e. the left eigenvector for the expanding eigenvalue.
    ///
    /// Only defined in the heating phase (`|tr| > 2`), where the eigenvalues
    /// are real with `|lambda| > 1 > |1/lambda|`.
    pub fn attracting_direction(&self) -> Result<(Complex64, Complex64)> {
        let half_trace = 0.5 * self.trace();
        if half_trace.abs() <= 1.0 {
            return Err(Error::Phase(format!(
                "attracting direction requires |trace| > 2, got {}",
                2.0 * half_trace.abs()
            )));
        }
        let lambda = half_trace + half_trace.signum() * (half_trace * half_trace - 1.0).sqrt();
        if self.b.norm() == 0.0 {
            return Err(Error::Phase(
                "diagonal matrix has no expanding direction".into(),
            ));
        }
        // Left eigenvector (l0, l1) with l M = lambda l; normalize l0 = 1.
        let l1 = (Complex64::new(lambda, 0.0) - self.a) / self.b.conj();
        Ok((Complex64::new(1.0, 0.0), l1))
    }
}

/// `(U_{n-1}(x), U_{n-2}(x))` for Chebyshev polynomials of the second kind.
///
/// Requires `n >= 1`. Branches on the argument: circular for `|x| < 1`,
/// hyperbolic for `|x| > 1`, three-term recurrence in a narrow band around
/// `|x| = 1` where both closed forms lose accuracy.
fn chebyshev_u_pair(x: f64, n: u32) -> (f64, f64) {
    const PARABOLIC_BAND: f64 = 1e-8;
    debug_assert!(n >= 1);
    if n == 1 {
        return (1.0, 0.0);
    }
    let ax = x.abs();
    // U_k(-x) = (-1)^k U_k(x): reduce to x >= 0.
    let sign = |k: u32| if x < 0.0 && k % 2 == 1 { -1.0 } else { 1.0 };
    let (u1, u2) = if ax < 1.0 - PARABOLIC_BAND {
        let gamma = ax.acos();
        let s = gamma.sin();
        (
            ((n as f64) * gamma).sin() / s,
            ((n as f64 - 1.0) * gamma).sin() / s,
        )
    } else if ax > 1.0 + PARABOLIC_BAND {
        let mu = ax.acosh();
        let s = mu.sinh();
        (
            ((n as f64) * mu).sinh() / s,
            ((n as f64 - 1.0) * mu).sinh() / s,
        )
    } else {
        // Near-parabolic: the recurrence grows at most linearly here.
        let (mut prev, mut cur) = (1.0, 2.0 * ax);
        for _ in 2..n {
            let next = 2.0 * ax * cur - prev;
            prev = cur;
            cur = next;
        }
        (cur, prev)
    };
    (sign(n - 1) * u1, sign(n - 2) * u2)
}

/// Full description of a two-segment drive on a periodic chain.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DriveSpec {
    /// Number of lattice sites `N`.
    pub sites: u32,
    /// Continuum circumference `L`; equals `sites` unless overridden.
    pub circumference: f64,
    /// Deformation wavenumber `q`.
    pub wavenumber: u32,
    /// Envelope of segment 0 (the reference Hamiltonian).
    pub kappa_ref: KappaTriplet,
    /// Envelope of segment 1 (the deformed Hamiltonian).
    pub kappa_drive: KappaTriplet,
    /// Duration of segment 0 in lattice time; may be negative.
    pub t0: f64,
    /// Duration of segment 1 in lattice time; may be negative.
    pub t1: f64,
    /// Lattice velocity relating lattice and continuum time,
    /// `t_cft = velocity * t_lattice`.
    pub velocity: f64,
}

impl DriveSpec {
    /// Drive with the uniform reference segment, `L = N` and unit velocity.
    pub fn new(sites: u32, wavenumber: u32, kappa_drive: KappaTriplet, t0: f64, t1: f64) -> Self {
        Self {
            sites,
            circumference: sites as f64,
            wavenumber,
            kappa_ref: KappaTriplet::UNIFORM,
            kappa_drive,
            t0,
            t1,
            velocity: 1.0,
        }
    }

    /// Replaces the reference-segment envelope.
    pub fn with_kappa_ref(mut self, kappa: KappaTriplet) -> Self {
        self.kappa_ref = kappa;
        self
    }

    /// Replaces the velocity.
    pub fn with_velocity(mut self, velocity: f64) -> Self {
        self.velocity = velocity;
        self
    }

    /// Replaces both segment durations.
    pub fn with_times(mut self, t0: f64, t1: f64) -> Self {
        self.t0 = t0;
        self.t1 = t1;
        self
    }

    /// Checks the geometric invariants.
    pub fn validate(&self) -> Result<()> {
        if self.sites == 0 {
            return Err(Error::Domain("drive needs at least one site".into()));
        }
        if !(self.circumference > 0.0) {
            return Err(Error::Domain(format!(
                "circumference must be positive, got {}",
                self.circumference
            )));
        }
        if self.wavenumber < 1 {
            return Err(Error::Domain("wavenumber must be >= 1".into()));
        }
        if 2 * self.wavenumber >= self.sites {
            return Err(Error::Domain(format!(
                "wavenumber {} is not resolvable on {} sites (need q < N/2)",
                self.wavenumber, self.sites
            )));
        }
        if !(self.velocity > 0.0) {
            return Err(Error::Domain(format!(
                "velocity must be positive, got {}",
                self.velocity
            )));
        }
        if !self.kappa_ref.is_finite() || !self.kappa_drive.is_finite() {
            return Err(Error::Domain("envelope amplitudes must be finite".into()));
        }
        Ok(())
    }
}

/// Dynamical phase of the one-cycle map.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Phase {
    /// `|tr| > 2`: hyperbolic map, exponential energy growth.
    Heating,
    /// `|tr| < 2`: elliptic map, bounded oscillations.
    NonHeating,
    /// `|tr| = 2` within tolerance: parabolic boundary.
    Critical,
}

/// Classification of a one-cycle matrix together with the evidence.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhaseLabel {
    /// The three-way phase label.
    pub phase: Phase,
    /// `|tr Pi|` of the classified matrix.
    pub trace_magnitude: f64,
    /// Tolerance used for the critical band around 2.
    pub tol: f64,
}

/// Chiral and antichiral one-cycle matrices of a drive.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CyclePair {
    /// Product of the chiral segment matrices.
    pub chiral: MobiusMatrix,
    /// Product of the antichiral segment matrices, composed in the same
    /// order.
    pub antichiral: MobiusMatrix,
}

/// Mobius matrix of a single constant-envelope segment evolved for
/// continuum time `t` on circumference `length` at wavenumber `q`.
///
/// Uses complex `s = sqrt(mean^2 - cos_amp^2 - sin_amp^2)` so the
/// trigonometric, parabolic, and hyperbolic branches share one code path:
/// for `s^2 < 0` the circular functions of imaginary argument continue to
/// hyperbolic ones, and `sin(s u)/s` is evaluated as `u * sinc(s u)` which
/// is regular at `s = 0`.
pub fn segment_matrix(kappa: &KappaTriplet, t: f64, q: u32, length: f64) -> Result<MobiusMatrix> {
    if !(length > 0.0) {
        return Err(Error::Domain(format!(
            "circumference must be positive, got {length}"
        )));
    }
    if q < 1 {
        return Err(Error::Domain("wavenumber must be >= 1".into()));
    }
    if !kappa.is_finite() {
        return Err(Error::Domain("envelope amplitudes must be finite".into()));
    }
    let s = Complex64::new(kappa.s_squared(), 0.0).sqrt();
    let u = core::f64::consts::PI * q as f64 * t / length;
    let arg = s * u;
    let cos_term = arg.cos();
    // sin(s u)/s = u * sinc(s u), regular across s = 0.
    let sin_over_s = u * csinc(arg);
    let a = -cos_term - Complex64::i() * kappa.mean * sin_over_s;
    let b = -Complex64::i() * Complex64::new(kappa.cos_amp, kappa.sin_amp) * sin_over_s;
    // a and b are real-linear in {cos, sinc}; both stay numerically complex
    // but the matrix entries are exact in the closed form.
    Ok(MobiusMatrix::new(a, b))
}

/// Wraps a coordinate into `[0, length)`.
fn wrap_periodic(x: f64, length: f64) -> f64 {
    let r = x % length;
    if r < 0.0 {
        r + length
    } else {
        r
    }
}

/// `sin(z)/z`, series-expanded near the origin.
fn csinc(z: Complex64) -> Complex64 {
    if z.norm_sqr() < 1e-12 {
        let z2 = z * z;
        Complex64::new(1.0, 0.0) - z2 / 6.0 + z2 * z2 / 120.0
    } else {
        z.sin() / z
    }
}

/// Chiral and antichiral one-cycle matrices
/// `Pi = G_ref(v t0) * G_drive(v t1)` of a validated drive.
///
/// Lattice durations are rescaled by the velocity before the matrices are
/// built; the antichiral product composes the antichiral images of the
/// segment matrices in the same order.
pub fn one_cycle(drive: &DriveSpec) -> Result<CyclePair> {
    drive.validate()?;
    let q = drive.wavenumber;
    let length = drive.circumference;
    let g0 = segment_matrix(&drive.kappa_ref, drive.velocity * drive.t0, q, length)?;
    let g1 = segment_matrix(&drive.kappa_drive, drive.velocity * drive.t1, q, length)?;
    Ok(CyclePair {
        chiral: g0.compose(&g1),
        antichiral: g0.antichiral().compose(&g1.antichiral()),
    })
}

/// Default tolerance for the critical band in [`classify`].
pub const DEFAULT_PHASE_TOL: f64 = 1e-9;

/// Three-way phase classification by `|tr Pi|` against 2.
pub fn classify(pi: &MobiusMatrix, tol: f64) -> PhaseLabel {
    let trace_magnitude = pi.trace().abs();
    let phase = if trace_magnitude > 2.0 + tol {
        Phase::Heating
    } else if trace_magnitude < 2.0 - tol {
        Phase::NonHeating
    } else {
        Phase::Critical
    };
    PhaseLabel {
        phase,
        trace_magnitude,
        tol,
    }
}

/// Loschmidt echo after `n` cycles for central charge `c`:
/// `|alpha_n| ^ (-(q^2 - 1) c / (3 q))` with `alpha_n` from the chiral
/// one-cycle matrix power.
pub fn loschmidt_echo(drive: &DriveSpec, n: u32, central_charge: f64) -> Result<f64> {
    if !(central_charge > 0.0) {
        return Err(Error::Domain(format!(
            "central charge must be positive, got {central_charge}"
        )));
    }
    let pair = one_cycle(drive)?;
    let alpha = pair.chiral.power(n).a;
    let q = drive.wavenumber as f64;
    let exponent = -(q * q - 1.0) * central_charge / (3.0 * q);
    Ok(alpha.norm().powf(exponent))
}

/// Energy density contribution of one chirality at phase angle `theta`.
fn chirality_density(m: &MobiusMatrix, theta: f64, q: f64, c: f64, length: f64) -> f64 {
    let prefactor = core::f64::consts::PI * c / (12.0 * length * length);
    let denom = (m.a * Complex64::from_polar(1.0, theta) + m.b).norm_sqr();
    -prefactor * q * q + prefactor * (q * q - 1.0) / (denom * denom)
}

/// Continuum energy density `eps(x)` after `n` cycles at central charge `c`.
///
/// `x` wraps periodically into `[0, L)`. At `n = 0` the profile is the
/// uniform ground-state value `-pi c / (6 L^2)`.
pub fn energy_density(drive: &DriveSpec, n: u32, central_charge: f64, x: f64) -> Result<f64> {
    let pair = one_cycle(drive)?;
    let length = drive.circumference;
    let x = wrap_periodic(x, length);
    let q = drive.wavenumber as f64;
    let theta = 2.0 * core::f64::consts::PI * q * x / length;
    let chi = pair.chiral.power(n);
    let anti = pair.antichiral.power(n);
    Ok(chirality_density(&chi, theta, q, central_charge, length)
        + chirality_density(&anti, -theta, q, central_charge, length))
}

/// Total continuum energy after `n` cycles:
/// `-pi c q^2 / (6 L) + pi c (q^2 - 1) / (12 L) * (|a_n|^2 + |b_n|^2 + |ab_n|^2 + |bb_n|^2)`
/// summed over both chiralities. Equals `-pi c / (6 L)` at `n = 0`.
pub fn total_energy(drive: &DriveSpec, n: u32, central_charge: f64) -> Result<f64> {
    let pair = one_cycle(drive)?;
    let length = drive.circumference;
    let q = drive.wavenumber as f64;
    let chi = pair.chiral.power(n);
    let anti = pair.antichiral.power(n);
    let quad = chi.a.norm_sqr() + chi.b.norm_sqr() + anti.a.norm_sqr() + anti.b.norm_sqr();
    let c = central_charge;
    Ok(-core::f64::consts::PI * c * q * q / (6.0 * length)
        + core::f64::consts::PI * c * (q * q - 1.0) / (12.0 * length) * quad)
}

/// The `2q` positions in `[0, L)` where energy accumulates in the heating
/// phase, sorted ascending.
///
/// For each chirality the density maximizes where
/// `|alpha_inf e^{+-i 2 pi q x / L} + beta_inf|` is smallest, with
/// `(alpha_inf, beta_inf)` the limiting row direction of the cycle powers —
/// the left eigenvector of the one-cycle matrix for its expanding
/// eigenvalue. Each chirality contributes `q` equally spaced solutions.
pub fn heating_peaks(drive: &DriveSpec) -> Result<Vec<f64>> {
    let pair = one_cycle(drive)?;
    let label = classify(&pair.chiral, DEFAULT_PHASE_TOL);
    if label.phase != Phase::Heating {
        return Err(Error::Phase(format!(
            "heating peaks require a heating drive; |trace| = {}",
            label.trace_magnitude
        )));
    }
    let q = drive.wavenumber;
    let length = drive.circumference;
    let mut peaks = Vec::with_capacity(2 * q as usize);
    for (matrix, orientation) in [(pair.chiral, 1.0), (pair.antichiral, -1.0)] {
        let (alpha, beta) = matrix.attracting_direction()?;
        // |alpha e^{i theta} + beta| is minimal at theta = pi + arg beta - arg alpha.
        let theta_star = core::f64::consts::PI + beta.arg() - alpha.arg();
        for m in 0..q {
            let theta = theta_star + 2.0 * core::f64::consts::PI * m as f64;
            let x = orientation * theta * length / (2.0 * core::f64::consts::PI * q as f64);
            peaks.push(wrap_periodic(x, length));
        }
    }
    peaks.sort_by(|p, r| p.partial_cmp(r).expect("peak positions are finite"));
    Ok(peaks)
}

/// Phase diagram over a rectangular `(t0, t1)` grid.
///
/// Cells are row-major: the cell for `(t0_values[i], t1_values[j])` sits at
/// index `i * t1_values.len() + j`.
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseDiagram {
    /// Sampled segment-0 durations (row axis).
    pub t0_values: Vec<f64>,
    /// Sampled segment-1 durations (column axis).
    pub t1_values: Vec<f64>,
    /// Row-major classification per grid point.
    pub cells: Vec<PhaseLabel>,
}

impl PhaseDiagram {
    /// The label at row `i` (t0 index) and column `j` (t1 index).
    pub fn cell(&self, i: usize, j: usize) -> &PhaseLabel {
        &self.cells[i * self.t1_values.len() + j]
    }
}

/// Classifies every `(t0, t1)` combination of the two grids, holding the
/// rest of the drive fixed.
pub fn phase_diagram(
    template: &DriveSpec,
    t0_grid: &[f64],
    t1_grid: &[f64],
    tol: f64,
) -> Result<PhaseDiagram> {
    if t0_grid.is_empty() || t1_grid.is_empty() {
        return Err(Error::Domain("phase diagram grids must be non-empty".into()));
    }
    let mut cells = Vec::with_capacity(t0_grid.len() * t1_grid.len());
    for &t0 in t0_grid {
        for &t1 in t1_grid {
            let drive = template.with_times(t0, t1);
            let pair = one_cycle(&drive)?;
            cells.push(classify(&pair.chiral, tol));
        }
    }
    Ok(PhaseDiagram {
        t0_values: t0_grid.to_vec(),
        t1_values: t1_grid.to_vec(),
        cells,
    })
}
