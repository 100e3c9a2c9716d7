//! Spin-chain Hamiltonians as explicit Pauli-term lists.
//!
//! Two families are built here: the deformed transverse-field Ising chain
//! (bond couplings from the single-harmonic envelope, site fields as bond
//! averages) and a generalized Ising family with an additional `XX`
//! exchange. Also provides the per-bond energy operator and the global
//! parity operator.

use alloc::{format, string::String, vec, vec::Vec};
use core::fmt::Write as _;
use num_traits::Float;

use crate::cft::KappaTriplet;
use crate::error::{Error, Result};

/// Pauli axis of a single factor.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Axis {
    /// Pauli X.
    X,
    /// Pauli Y.
    Y,
    /// Pauli Z.
    Z,
}

impl Axis {
    fn letter(self) -> char {
        match self {
            Axis::X => 'X',
            Axis::Y => 'Y',
            Axis::Z => 'Z',
        }
    }

    fn from_letter(c: char) -> Option<Self> {
        match c {
            'X' => Some(Axis::X),
            'Y' => Some(Axis::Y),
            'Z' => Some(Axis::Z),
            _ => None,
        }
    }
}

/// One weighted Pauli string; factors act on distinct sites.
#[derive(Debug, Clone, PartialEq)]
pub struct PauliTerm {
    /// Real coefficient.
    pub coefficient: f64,
    /// `(site, axis)` factors, at most two for every Hamiltonian in scope.
    pub factors: Vec<(u32, Axis)>,
}

impl PauliTerm {
    /// Single-site term.
    pub fn single(coefficient: f64, site: u32, axis: Axis) -> Self {
        Self {
            coefficient,
            factors: vec![(site, axis)],
        }
    }

    /// Two-site term.
    pub fn pair(coefficient: f64, i: u32, ai: Axis, j: u32, aj: Axis) -> Self {
        debug_assert_ne!(i, j, "factors must act on distinct sites");
        Self {
            coefficient,
            factors: vec![(i, ai), (j, aj)],
        }
    }

    /// True when every factor axis equals `axis`.
    pub fn is_axis_uniform(&self, axis: Axis) -> bool {
        self.factors.iter().all(|&(_, a)| a == axis)
    }
}

/// A coupling deformation bound to a concrete chain geometry.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CouplingProfile {
    /// Envelope amplitudes.
    pub kappa: KappaTriplet,
    /// Deformation wavenumber `q`.
    pub wavenumber: u32,
    /// Number of sites `N`.
    pub sites: u32,
}

impl CouplingProfile {
    /// Uniform profile (`f = 1`) on `sites` sites.
    pub fn uniform(sites: u32) -> Self {
        Self {
            kappa: KappaTriplet::UNIFORM,
            wavenumber: 1,
            sites,
        }
    }

    /// Deformed profile.
    pub fn new(kappa: KappaTriplet, wavenumber: u32, sites: u32) -> Self {
        Self {
            kappa,
            wavenumber,
            sites,
        }
    }

    /// Bond coupling `J_{i+1/2} = f(i + 1/2)`.
    pub fn bond_coupling(&self, bond: u32) -> f64 {
        envelope(
            &self.kappa,
            self.wavenumber,
            self.sites,
            bond as f64 + 0.5,
        )
    }

    /// Site field `g_i = (J_{i-1/2} + J_{i+1/2}) / 2`; indices wrap.
    pub fn site_field(&self, site: u32) -> f64 {
        let prev = (site + self.sites - 1) % self.sites;
        0.5 * (self.bond_coupling(prev) + self.bond_coupling(site))
    }
}

/// Single-harmonic coupling envelope
/// `f(x) = mean + cos_amp cos(2 pi q x / N) + sin_amp sin(2 pi q x / N)`.
pub fn envelope(kappa: &KappaTriplet, wavenumber: u32, sites: u32, x: f64) -> f64 {
    let phase = 2.0 * core::f64::consts::PI * wavenumber as f64 * x / sites as f64;
    kappa.mean + kappa.cos_amp * phase.cos() + kappa.sin_amp * phase.sin()
}

/// Which constructor produced a Hamiltonian.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ModelFamily {
    /// `H = -sum J_{i+1/2}/2 Z_i Z_{i+1} - sum g_i/2 X_i`.
    DeformedTfim,
    /// `H = -sum [J Z_i Z_{i+1} + g X_i + Gamma X_i X_{i+1}]`, optionally
    /// deformed by the same envelope.
    GeneralizedIsing,
}

/// The `(J, g, Gamma)` amplitudes of the generalized Ising family.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IsingCouplings {
    /// `Z_i Z_{i+1}` amplitude.
    pub zz: f64,
    /// `X_i` field amplitude.
    pub x: f64,
    /// `X_i X_{i+1}` exchange amplitude.
    pub xx: f64,
}

impl IsingCouplings {
    /// Builds the triple.
    pub const fn new(zz: f64, x: f64, xx: f64) -> Self {
        Self { zz, x, xx }
    }
}

/// An explicit Hamiltonian: term list plus provenance.
#[derive(Debug, Clone, PartialEq)]
pub struct HamiltonianSpec {
    /// Number of sites.
    pub sites: u32,
    /// Weighted Pauli strings in canonical order (ZZ by bond, then X by
    /// site, then XX by bond) so serialized Hamiltonians are byte-stable.
    pub terms: Vec<PauliTerm>,
    /// Constructor family.
    pub family: ModelFamily,
    /// Generalized-family amplitudes; `(1/2, 1/2, 0)` for the TFIM.
    pub couplings: IsingCouplings,
}

impl HamiltonianSpec {
    /// Serializes to the line-oriented text format
    /// `coeff site:axis [site:axis]`, one term per line, full double
    /// precision.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for term in &self.terms {
            let _ = write!(out, "{:.16e}", term.coefficient);
            for &(site, axis) in &term.factors {
                let _ = write!(out, " {}:{}", site, axis.letter());
            }
            out.push('\n');
        }
        out
    }

    /// Parses the text format produced by [`Self::to_text`]. The site count
    /// must be supplied (blank lines are ignored); family metadata is not
    /// part of the format and defaults to the generalized family.
    pub fn from_text(sites: u32, text: &str) -> Result<Self> {
        let mut terms = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            let mut fields = line.split_whitespace();
            let coeff_str = fields
                .next()
                .ok_or_else(|| Error::Domain(format!("line {}: empty term", lineno + 1)))?;
            let coefficient: f64 = coeff_str.parse().map_err(|_| {
                Error::Domain(format!("line {}: bad coefficient {coeff_str:?}", lineno + 1))
            })?;
            let mut factors = Vec::new();
            for field in fields {
                let (site_str, axis_str) = field.split_once(':').ok_or_else(|| {
                    Error::Domain(format!("line {}: bad factor {field:?}", lineno + 1))
                })?;
                let site: u32 = site_str.parse().map_err(|_| {
                    Error::Domain(format!("line {}: bad site {site_str:?}", lineno + 1))
                })?;
                if site >= sites {
                    return Err(Error::Domain(format!(
                        "line {}: site {site} out of range for {sites} sites",
                        lineno + 1
                    )));
                }
                let axis = axis_str
                    .chars()
                    .next()
                    .and_then(Axis::from_letter)
                    .filter(|_| axis_str.len() == 1)
                    .ok_or_else(|| {
                        Error::Domain(format!("line {}: bad axis {axis_str:?}", lineno + 1))
                    })?;
                factors.push((site, axis));
            }
            if factors.is_empty() {
                return Err(Error::Domain(format!(
                    "line {}: term has no factors",
                    lineno + 1
                )));
            }
            terms.push(PauliTerm {
                coefficient,
                factors,
            });
        }
        Ok(Self {
            sites,
            terms,
            family: ModelFamily::GeneralizedIsing,
            couplings: IsingCouplings::new(0.0, 0.0, 0.0),
        })
    }

    /// Merges duplicate Pauli strings (site-sorted factors) and drops exact
    /// zeros; useful for comparing constructions term-by-term.
    pub fn merged_terms(&self) -> Vec<PauliTerm> {
        let mut canon: Vec<(Vec<(u32, Axis)>, f64)> = Vec::new();
        for term in &self.terms {
            let mut key = term.factors.clone();
            key.sort();
            match canon.iter_mut().find(|(k, _)| *k == key) {
                Some((_, c)) => *c += term.coefficient,
                None => canon.push((key, term.coefficient)),
            }
        }
        canon.sort_by(|(ka, _), (kb, _)| ka.cmp(kb));
        canon
            .into_iter()
            .filter(|&(_, c)| c != 0.0)
            .map(|(factors, coefficient)| PauliTerm {
                coefficient,
                factors,
            })
            .collect()
    }
}

/// Deformed transverse-field Ising chain: for each bond `i`, coefficient
/// `-J_{i+1/2}/2` on `Z_i Z_{i+1}`; for each site, `-g_i/2` on `X_i`, with
/// the site field averaging the adjacent bond couplings. Periodic boundary.
pub fn build_tfim(profile: &CouplingProfile) -> Result<HamiltonianSpec> {
    let n = profile.sites;
    if n < 2 {
        return Err(Error::Domain("chain needs at least two sites".into()));
    }
    let mut terms = Vec::with_capacity(2 * n as usize);
    for i in 0..n {
        terms.push(PauliTerm::pair(
            -0.5 * profile.bond_coupling(i),
            i,
            Axis::Z,
            (i + 1) % n,
            Axis::Z,
        ));
    }
    for i in 0..n {
        terms.push(PauliTerm::single(-0.5 * profile.site_field(i), i, Axis::X));
    }
    Ok(HamiltonianSpec {
        sites: n,
        terms,
        family: ModelFamily::DeformedTfim,
        couplings: IsingCouplings::new(0.5, 0.5, 0.0),
    })
}

/// Generalized Ising chain `-sum [J ZZ + g X + Gamma XX]`.
///
/// With a deformation profile, bond terms (`ZZ`, `XX`) pick up the envelope
/// at their bond centers and site terms the average of the two adjacent
/// bond envelopes, mirroring the TFIM construction.
pub fn build_generalized_ising(
    couplings: IsingCouplings,
    profile: Option<&CouplingProfile>,
    sites: u32,
) -> Result<HamiltonianSpec> {
    if sites < 2 {
        return Err(Error::Domain("chain needs at least two sites".into()));
    }
    if let Some(p) = profile {
        if p.sites != sites {
            return Err(Error::DimensionMismatch(format!(
                "profile is on {} sites, Hamiltonian on {sites}",
                p.sites
            )));
        }
    }
    let bond_scale = |i: u32| profile.map_or(1.0, |p| p.bond_coupling(i));
    let site_scale = |i: u32| profile.map_or(1.0, |p| p.site_field(i));
    let mut terms = Vec::new();
    if couplings.zz != 0.0 {
        for i in 0..sites {
            terms.push(PauliTerm::pair(
                -couplings.zz * bond_scale(i),
                i,
                Axis::Z,
                (i + 1) % sites,
                Axis::Z,
            ));
        }
    }
    if couplings.x != 0.0 {
        for i in 0..sites {
            terms.push(PauliTerm::single(-couplings.x * site_scale(i), i, Axis::X));
        }
    }
    if couplings.xx != 0.0 {
        for i in 0..sites {
            terms.push(PauliTerm::pair(
                -couplings.xx * bond_scale(i),
                i,
                Axis::X,
                (i + 1) % sites,
                Axis::X,
            ));
        }
    }
    Ok(HamiltonianSpec {
        sites,
        terms,
        family: ModelFamily::GeneralizedIsing,
        couplings,
    })
}

/// Local energy operator of bond `i`:
/// `h_i = -1/2 Z_i Z_{i+1} - 1/4 (X_i + X_{i+1})`, indices mod `N`.
///
/// Summed over all bonds this tiles the uniform critical TFIM exactly.
pub fn local_energy_op(bond: u32, sites: u32) -> Vec<PauliTerm> {
    let i = bond % sites;
    let j = (bond + 1) % sites;
    vec![
        PauliTerm::pair(-0.5, i, Axis::Z, j, Axis::Z),
        PauliTerm::single(-0.25, i, Axis::X),
        PauliTerm::single(-0.25, j, Axis::X),
    ]
}

/// Global parity operator `prod_i X_i` as a single unit-coefficient term.
pub fn parity_op(sites: u32) -> Vec<PauliTerm> {
    vec![PauliTerm {
        coefficient: 1.0,
        factors: (0..sites).map(|i| (i, Axis::X)).collect(),
    }]
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn envelope_anchors() {
        let k = KappaTriplet::new(1.0, 1.2, -0.2);
        assert_abs_diff_eq!(envelope(&KappaTriplet::UNIFORM, 3, 16, 7.13), 1.0);
        assert_abs_diff_eq!(envelope(&k, 2, 16, 0.0), 2.2, epsilon = 1e-15);
        // x = 4: phase = pi, cos = -1, sin ~ 0.
        assert_abs_diff_eq!(envelope(&k, 2, 16, 4.0), -0.2, epsilon = 1e-14);
    }

    #[test]
    fn uniform_tfim_term_list() {
        let h = build_tfim(&CouplingProfile::uniform(4)).unwrap();
        assert_eq!(h.terms.len(), 8);
        for term in &h.terms[..4] {
            assert_abs_diff_eq!(term.coefficient, -0.5);
            assert_eq!(term.factors.len(), 2);
            assert!(term.is_axis_uniform(Axis::Z));
        }
        for term in &h.terms[4..] {
            assert_abs_diff_eq!(term.coefficient, -0.5);
            assert!(term.is_axis_uniform(Axis::X));
        }
        // Periodic closure: last bond couples sites 3 and 0.
        assert_eq!(h.terms[3].factors, vec![(3, Axis::Z), (0, Axis::Z)]);
    }

    #[test]
    fn site_fields_average_bond_envelopes_and_sum_to_mean() {
        let profile = CouplingProfile::new(KappaTriplet::new(1.0, 1.2, -0.2), 2, 16);
        let h = build_tfim(&profile).unwrap();
        let g0_expected = 0.5 * (profile.bond_coupling(15) + profile.bond_coupling(0));
        assert_abs_diff_eq!(h.terms[16].coefficient, -0.5 * g0_expected, epsilon = 1e-15);
        // Discrete orthogonality: mean of J over bonds equals the envelope mean.
        let sum_j: f64 = (0..16).map(|i| profile.bond_coupling(i)).sum();
        assert_abs_diff_eq!(sum_j, 16.0, epsilon = 1e-12);
        let sum_g: f64 = (0..16).map(|i| profile.site_field(i)).sum();
        assert_abs_diff_eq!(sum_g, 16.0, epsilon = 1e-12);
    }

    #[test]
    fn generalized_family_reduces_to_tfim() {
        let tfim = build_tfim(&CouplingProfile::uniform(6)).unwrap();
        let gen =
            build_generalized_ising(IsingCouplings::new(0.5, 0.5, 0.0), None, 6).unwrap();
        assert_eq!(tfim.merged_terms(), gen.merged_terms());
    }

    #[test]
    fn xx_point_builds_only_exchange_terms() {
        let h = build_generalized_ising(IsingCouplings::new(0.0, 0.0, 0.5), None, 8).unwrap();
        assert_eq!(h.terms.len(), 8);
        assert!(h.terms.iter().all(|t| t.is_axis_uniform(Axis::X)));
        assert!(h.terms.iter().all(|t| t.factors.len() == 2));
    }

    #[test]
    fn local_energy_tiles_uniform_hamiltonian() {
        let n = 16;
        let mut all = Vec::new();
        for i in 0..n {
            all.extend(local_energy_op(i, n));
        }
        let tiled = HamiltonianSpec {
            sites: n,
            terms: all,
            family: ModelFamily::DeformedTfim,
            couplings: IsingCouplings::new(0.5, 0.5, 0.0),
        };
        let h0 = build_tfim(&CouplingProfile::uniform(n)).unwrap();
        assert_eq!(tiled.merged_terms(), h0.merged_terms());
    }

    #[test]
    fn local_energy_transcription() {
        let terms = local_energy_op(0, 16);
        assert_eq!(terms.len(), 3);
        assert_eq!(terms[0].factors, vec![(0, Axis::Z), (1, Axis::Z)]);
        assert_abs_diff_eq!(terms[0].coefficient, -0.5);
        assert_abs_diff_eq!(terms[1].coefficient, -0.25);
        assert_abs_diff_eq!(terms[2].coefficient, -0.25);
    }

    #[test]
    fn parity_is_x_on_every_site() {
        let p = parity_op(2);
        assert_eq!(p.len(), 1);
        assert_eq!(p[0].coefficient, 1.0);
        assert_eq!(p[0].factors, vec![(0, Axis::X), (1, Axis::X)]);
    }

    #[test]
    fn every_hamiltonian_commutes_with_parity() {
        // A Pauli string commutes with prod X iff it contains an even number
        // of Y/Z factors; check the rule over both families.
        let check = |h: &HamiltonianSpec| {
            for term in &h.terms {
                let odd = term
                    .factors
                    .iter()
                    .filter(|&&(_, a)| a != Axis::X)
                    .count();
                assert_eq!(odd % 2, 0, "term {term:?} anticommutes with parity");
            }
        };
        let profile = CouplingProfile::new(KappaTriplet::new(1.0, 1.2, -0.4), 2, 16);
        check(&build_tfim(&profile).unwrap());
        check(
            &build_generalized_ising(IsingCouplings::new(1.0, 0.6066, 0.25), Some(&profile), 16)
                .unwrap(),
        );
    }

    #[test]
    fn text_format_round_trips() {
        let profile = CouplingProfile::new(KappaTriplet::new(1.0, 1.2, -0.2), 2, 16);
        let h = build_tfim(&profile).unwrap();
        let text = h.to_text();
        let back = HamiltonianSpec::from_text(16, &text).unwrap();
        assert_eq!(h.terms, back.terms);
        // Byte stability.
        assert_eq!(text, back.to_text());
    }

    #[test]
    fn text_format_rejects_garbage() {
        assert!(HamiltonianSpec::from_text(4, "nonsense 0:Z").is_err());
        assert!(HamiltonianSpec::from_text(4, "-0.5 9:Z").is_err());
        assert!(HamiltonianSpec::from_text(4, "-0.5 0:W").is_err());
        assert!(HamiltonianSpec::from_text(4, "-0.5").is_err());
    }
}
