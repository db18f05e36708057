//! SLH triplets of linear quantum networks and their series product.

use std::fmt;

use rand::Rng;

use crate::dup::{self, delta_mat, flat, flat_parts, gaussian_matrix, seeded_rng, split_delta};
use crate::error::{dim_err, Error, Result};
use crate::matrix::{c64, ComplexMatrix};
use crate::DEFAULT_TOL;

/// Quadratic Hamiltonian `Σ ω⁻ᵢⱼ aᵢ*aⱼ + ½ω⁺ᵢⱼ aᵢ*aⱼ* + ½ω⁺ᵢⱼ* aᵢaⱼ`,
/// stored as its coefficient blocks.
#[derive(Debug, Clone, PartialEq)]
pub struct Hamiltonian {
    /// Hermitian `n x n` block.
    pub omega_minus: ComplexMatrix,
    /// Symmetric `n x n` block.
    pub omega_plus: ComplexMatrix,
}

impl Hamiltonian {
    pub fn new(omega_minus: ComplexMatrix, omega_plus: ComplexMatrix) -> Self {
        Self {
            omega_minus,
            omega_plus,
        }
    }

    pub fn zero(n: usize) -> Self {
        Self::new(ComplexMatrix::zeros(n, n), ComplexMatrix::zeros(n, n))
    }

    /// `δ a*a` on a single mode.
    pub fn detuning(delta: f64) -> Self {
        Self::new(ComplexMatrix::diag(&[c64(delta, 0.0)]), ComplexMatrix::zeros(1, 1))
    }

    pub fn modes(&self) -> usize {
        self.omega_minus.rows()
    }

    pub fn try_add(&self, rhs: &Self) -> Result<Self> {
        Ok(Self::new(
            self.omega_minus.try_add(&rhs.omega_minus)?,
            self.omega_plus.try_add(&rhs.omega_plus)?,
        ))
    }

    pub fn try_sub(&self, rhs: &Self) -> Result<Self> {
        Ok(Self::new(
            self.omega_minus.try_sub(&rhs.omega_minus)?,
            self.omega_plus.try_sub(&rhs.omega_plus)?,
        ))
    }

    pub fn scale(&self, k: f64) -> Self {
        Self::new(self.omega_minus.scale_re(k), self.omega_plus.scale_re(k))
    }

    /// Shape, finiteness, Hermitian `Ω⁻` and symmetric `Ω⁺`.
    pub fn validate(&self, tol: f64) -> Vec<Diagnostic> {
        let mut out = Vec::new();
        let n = self.omega_minus.rows();
        for (name, m) in [("Omega_minus", &self.omega_minus), ("Omega_plus", &self.omega_plus)] {
            if m.shape() != (n, n) {
                out.push(Diagnostic::shape(format!(
                    "{name} is {:?}, expected {n}x{n}",
                    m.shape()
                )));
            } else if !m.is_finite() {
                out.push(Diagnostic::new(
                    DiagnosticKind::NonFinite,
                    format!("{name} has non-finite entries"),
                    f64::INFINITY,
                ));
            }
        }
        if !out.is_empty() {
            return out;
        }
        let herm = self.omega_minus.max_abs_diff(&self.omega_minus.adjoint());
        if herm > tol {
            out.push(Diagnostic::new(
                DiagnosticKind::Hermiticity,
                "Omega_minus is not Hermitian".into(),
                herm,
            ));
        }
        let sym = self.omega_plus.max_abs_diff(&self.omega_plus.transpose());
        if sym > tol {
            out.push(Diagnostic::new(
                DiagnosticKind::Symmetry,
                "Omega_plus is not symmetric".into(),
                sym,
            ));
        }
        out
    }
}

/// Coupling operator `L = C⁻ a + C⁺ a#`.
#[derive(Debug, Clone, PartialEq)]
pub struct Coupling {
    pub c_minus: ComplexMatrix,
    pub c_plus: ComplexMatrix,
}

impl Coupling {
    pub fn new(c_minus: ComplexMatrix, c_plus: ComplexMatrix) -> Self {
        Self { c_minus, c_plus }
    }

    pub fn zero(m: usize, n: usize) -> Self {
        Self::new(ComplexMatrix::zeros(m, n), ComplexMatrix::zeros(m, n))
    }

    /// Annihilation-only coupling `L = C⁻ a`.
    pub fn passive(c_minus: ComplexMatrix) -> Self {
        let (m, n) = c_minus.shape();
        Self::new(c_minus, ComplexMatrix::zeros(m, n))
    }

    pub fn channels(&self) -> usize {
        self.c_minus.rows()
    }

    pub fn modes(&self) -> usize {
        self.c_minus.cols()
    }

    /// `C̃ = Δ(C⁻, C⁺)`.
    pub fn doubled(&self) -> Result<ComplexMatrix> {
        delta_mat(&self.c_minus, &self.c_plus)
    }

    pub fn try_add(&self, rhs: &Self) -> Result<Self> {
        Ok(Self::new(
            self.c_minus.try_add(&rhs.c_minus)?,
            self.c_plus.try_add(&rhs.c_plus)?,
        ))
    }

    pub fn try_sub(&self, rhs: &Self) -> Result<Self> {
        Ok(Self::new(
            self.c_minus.try_sub(&rhs.c_minus)?,
            self.c_plus.try_sub(&rhs.c_plus)?,
        ))
    }

    /// `(M C⁻, M C⁺)` for an `m x m` matrix acting on the channels.
    pub fn left_mul(&self, m: &ComplexMatrix) -> Result<Self> {
        Ok(Self::new(m.try_mul(&self.c_minus)?, m.try_mul(&self.c_plus)?))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SlhModel {
    pub n_modes: usize,
    pub m_channels: usize,
    pub scattering: ComplexMatrix,
    pub coupling: Coupling,
    pub hamiltonian: Hamiltonian,
}

impl SlhModel {
    /// Assembles a model and checks that all shapes agree; physical
    /// invariants are left to [`validate_slh`].
    pub fn new(scattering: ComplexMatrix, coupling: Coupling, hamiltonian: Hamiltonian) -> Result<Self> {
        let g = Self {
            n_modes: coupling.modes(),
            m_channels: scattering.rows(),
            scattering,
            coupling,
            hamiltonian,
        };
        let shape: Vec<_> = g.shape_diagnostics().into_iter().map(|d| d.message).collect();
        if !shape.is_empty() {
            return Err(dim_err("SlhModel::new", shape.join("; ")));
        }
        Ok(g)
    }

    fn shape_diagnostics(&self) -> Vec<Diagnostic> {
        let (m, n) = (self.m_channels, self.n_modes);
        let expect = [
            ("S", &self.scattering, (m, m)),
            ("C_minus", &self.coupling.c_minus, (m, n)),
            ("C_plus", &self.coupling.c_plus, (m, n)),
            ("Omega_minus", &self.hamiltonian.omega_minus, (n, n)),
            ("Omega_plus", &self.hamiltonian.omega_plus, (n, n)),
        ];
        expect
            .iter()
            .filter(|(_, mat, s)| mat.shape() != *s)
            .map(|(name, mat, (r, c))| {
                Diagnostic::shape(format!(
                    "{name} is {}x{}, expected {r}x{c} for {n} modes and {m} channels",
                    mat.rows(),
                    mat.cols()
                ))
            })
            .collect()
    }

    pub fn is_valid(&self, tol: f64) -> bool {
        validate_slh(self, tol).is_empty()
    }

    /// Fails with [`Error::Validation`] unless the model passes at `tol`.
    pub fn ensure_valid(&self, tol: f64) -> Result<()> {
        let diags = validate_slh(self, tol);
        if diags.is_empty() {
            Ok(())
        } else {
            Err(Error::Validation(diags))
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum DiagnosticKind {
    Shape,
    NonFinite,
    Unitarity,
    Hermiticity,
    Symmetry,
}

impl DiagnosticKind {
    pub fn code(self) -> &'static str {
        match self {
            DiagnosticKind::Shape => "DIMENSION",
            DiagnosticKind::NonFinite => "NON_FINITE",
            DiagnosticKind::Unitarity => "UNITARITY",
            DiagnosticKind::Hermiticity => "HERMITICITY",
            DiagnosticKind::Symmetry => "SYMMETRY",
        }
    }
}

/// One violated model invariant.
#[derive(Debug, Clone, PartialEq)]
pub struct Diagnostic {
    pub kind: DiagnosticKind,
    pub message: String,
    /// Max-norm deviation from the invariant.
    pub deviation: f64,
}

impl Diagnostic {
    fn new(kind: DiagnosticKind, message: String, deviation: f64) -> Self {
        Self {
            kind,
            message,
            deviation,
        }
    }

    fn shape(message: String) -> Self {
        Self::new(DiagnosticKind::Shape, message, f64::INFINITY)
    }
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.deviation.is_finite() {
            write!(
                f,
                "{}: {} (deviation {:e})",
                self.kind.code(),
                self.message,
                self.deviation
            )
        } else {
            write!(f, "{}: {}", self.kind.code(), self.message)
        }
    }
}

/// Every violated invariant of `g` at tolerance `tol`; empty when valid.
pub fn validate_slh(g: &SlhModel, tol: f64) -> Vec<Diagnostic> {
    let shape = g.shape_diagnostics();
    if !shape.is_empty() {
        return shape;
    }
    let mut out = Vec::new();
    for (name, m) in [
        ("S", &g.scattering),
        ("C_minus", &g.coupling.c_minus),
        ("C_plus", &g.coupling.c_plus),
    ] {
        if !m.is_finite() {
            out.push(Diagnostic::new(
                DiagnosticKind::NonFinite,
                format!("{name} has non-finite entries"),
                f64::INFINITY,
            ));
        }
    }
    if out.is_empty() {
        let chk = dup::is_unitary(&g.scattering, tol).expect("scattering shape checked");
        if !chk.unitary {
            out.push(Diagnostic::new(
                DiagnosticKind::Unitarity,
                "scattering matrix is not unitary".into(),
                chk.deviation,
            ));
        }
    }
    out.extend(g.hamiltonian.validate(tol));
    out
}

/// `-iΩ̃ = -Δ(iΩ⁻, iΩ⁺)`, the Hamiltonian's contribution to the state matrix.
pub fn neg_i_omega(h: &Hamiltonian) -> Result<ComplexMatrix> {
    let diags = h.validate(DEFAULT_TOL);
    if !diags.is_empty() {
        return Err(Error::Validation(diags));
    }
    let i = c64(0.0, 1.0);
    Ok(-&delta_mat(&h.omega_minus.scale(i), &h.omega_plus.scale(i))?)
}

/// Hamiltonian blocks of `Im(L₂† S₂ L₁)`.
///
/// The doubled-up form is `Ω̃ = Im♭(C̃₂♭ Δ(S₂, 0) C̃₁)`; the blocks are read
/// back from `-iΩ̃ = Δ(-iΩ⁻, -iΩ⁺)` and symmetrized after a structure check
/// at ten times the working tolerance, scaled by `max(1, ‖X‖)`.
pub fn interaction_hamiltonian(c2: &Coupling, s2: &ComplexMatrix, c1: &Coupling) -> Result<Hamiltonian> {
    let (m, n) = (c1.channels(), c1.modes());
    if c2.c_minus.shape() != (m, n)
        || c2.c_plus.shape() != (m, n)
        || c1.c_plus.shape() != (m, n)
        || s2.shape() != (m, m)
    {
        return Err(Error::InvalidComposition(format!(
            "interaction term needs matching couplings and an {m}x{m} scattering matrix"
        )));
    }
    let x = interaction_kernel(c2, s2, c1)?;
    let (_, im) = flat_parts(&x)?;
    let neg_i_tilde = im.scale(c64(0.0, -1.0));
    let tol = 10.0 * DEFAULT_TOL * x.max_norm().max(1.0);
    let (p, q) = split_delta(&neg_i_tilde, tol).map_err(|e| match e {
        Error::NotDoubledUp { max_deviation, .. } => Error::InternalConsistency {
            what: "interaction_hamiltonian",
            deviation: max_deviation,
        },
        other => other,
    })?;
    let i = c64(0.0, 1.0);
    let h = Hamiltonian::new(p.scale(i), q.scale(i));
    let dev = h
        .omega_minus
        .max_abs_diff(&h.omega_minus.adjoint())
        .max(h.omega_plus.max_abs_diff(&h.omega_plus.transpose()));
    if !(dev <= tol) {
        return Err(Error::InternalConsistency {
            what: "interaction_hamiltonian",
            deviation: dev,
        });
    }
    Ok(Hamiltonian::new(
        dup::hermitize(&h.omega_minus),
        dup::symmetrize(&h.omega_plus),
    ))
}

/// `C̃₂♭ Δ(S₂, 0) C̃₁`, whose `Im♭` part is the interaction Hamiltonian.
pub fn interaction_kernel(c2: &Coupling, s2: &ComplexMatrix, c1: &Coupling) -> Result<ComplexMatrix> {
    let s = delta_mat(s2, &ComplexMatrix::zeros(s2.rows(), s2.cols()))?;
    flat(&c2.doubled()?)?.try_mul(&s)?.try_mul(&c1.doubled()?)
}

/// Series product `G₂ ◁ G₁`: the outputs of `g1` drive the inputs of `g2`.
///
/// Both systems must act on the same mode space.
pub fn cascade(g2: &SlhModel, g1: &SlhModel) -> Result<SlhModel> {
    if g1.m_channels != g2.m_channels || g1.n_modes != g2.n_modes {
        return Err(Error::InvalidComposition(format!(
            "cannot cascade a {}-mode/{}-channel system into a {}-mode/{}-channel system",
            g1.n_modes, g1.m_channels, g2.n_modes, g2.m_channels
        )));
    }
    let s2 = &g2.scattering;
    let scattering = s2.try_mul(&g1.scattering)?;
    let coupling = g2.coupling.try_add(&g1.coupling.left_mul(s2)?)?;
    let hamiltonian = g1
        .hamiltonian
        .try_add(&g2.hamiltonian)?
        .try_add(&interaction_hamiltonian(&g2.coupling, s2, &g1.coupling)?)?;
    SlhModel::new(scattering, coupling, hamiltonian)
}

/// `(I_m, 0, 0)`: the neutral element of the series product.
pub fn identity_system(m: usize, n: usize) -> SlhModel {
    SlhModel {
        n_modes: n,
        m_channels: m,
        scattering: ComplexMatrix::identity(m),
        coupling: Coupling::zero(m, n),
        hamiltonian: Hamiltonian::zero(n),
    }
}

/// Seeded random valid model.
///
/// Draw order from one ChaCha8 stream: `S` (random unitary), `C⁻`, `C⁺`,
/// then Gaussian matrices that are hermitized into `Ω⁻` and symmetrized
/// into `Ω⁺`.
pub fn random_slh(n: usize, m: usize, seed: u64) -> SlhModel {
    random_slh_with(n, m, &mut seeded_rng(seed))
}

pub(crate) fn random_slh_with(n: usize, m: usize, rng: &mut impl Rng) -> SlhModel {
    let scattering = dup::random_unitary_with(m, rng);
    let coupling = Coupling::new(gaussian_matrix(m, n, rng), gaussian_matrix(m, n, rng));
    let hamiltonian = random_hamiltonian(n, rng);
    SlhModel {
        n_modes: n,
        m_channels: m,
        scattering,
        coupling,
        hamiltonian,
    }
}

pub(crate) fn random_hamiltonian(n: usize, rng: &mut impl Rng) -> Hamiltonian {
    let om = gaussian_matrix(n, n, rng);
    let op = gaussian_matrix(n, n, rng);
    Hamiltonian::new(dup::hermitize(&om), dup::symmetrize(&op))
}

/// Max-norm deviations of each SLH component, in the order
/// `S, C_minus, C_plus, Omega_minus, Omega_plus`.
pub fn component_residuals(a: &SlhModel, b: &SlhModel) -> [(&'static str, f64); 5] {
    [
        ("S", a.scattering.max_abs_diff(&b.scattering)),
        ("C_minus", a.coupling.c_minus.max_abs_diff(&b.coupling.c_minus)),
        ("C_plus", a.coupling.c_plus.max_abs_diff(&b.coupling.c_plus)),
        (
            "Omega_minus",
            a.hamiltonian.omega_minus.max_abs_diff(&b.hamiltonian.omega_minus),
        ),
        (
            "Omega_plus",
            a.hamiltonian.omega_plus.max_abs_diff(&b.hamiltonian.omega_plus),
        ),
    ]
}

/// Largest of [`component_residuals`].
pub fn max_component_residual(a: &SlhModel, b: &SlhModel) -> f64 {
    component_residuals(a, b).iter().map(|(_, r)| *r).fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::ComplexScalar;

    fn col(vals: &[f64]) -> ComplexMatrix {
        ComplexMatrix::from_fn(vals.len(), 1, |i, _| c64(vals[i], 0.0))
    }

    fn cavity_nominal() -> SlhModel {
        SlhModel::new(
            ComplexMatrix::identity(3),
            Coupling::passive(col(&[1.0, 1.0, 1.0])),
            Hamiltonian::zero(1),
        )
        .unwrap()
    }

    #[test]
    fn validate_examples() {
        assert!(validate_slh(&identity_system(3, 1), 0.0).is_empty());
        assert!(validate_slh(&cavity_nominal(), 1e-12).is_empty());

        let mut g = identity_system(2, 1);
        g.scattering = ComplexMatrix::from_real_rows(&[[1.0, 1.0], [0.0, 1.0]]).unwrap();
        let diags = validate_slh(&g, 1e-10);
        assert_eq!(diags.len(), 1);
        assert_eq!(diags[0].kind, DiagnosticKind::Unitarity);
        assert!(diags[0].deviation >= 1.0);
    }

    #[test]
    fn validate_reports_each_violation() {
        let mut g = identity_system(1, 2);
        g.hamiltonian.omega_minus[(0, 1)] = c64(1.0, 0.0);
        g.hamiltonian.omega_plus[(1, 0)] = c64(0.5, 0.0);
        let kinds: Vec<_> = validate_slh(&g, 1e-10).iter().map(|d| d.kind).collect();
        assert_eq!(kinds, vec![DiagnosticKind::Hermiticity, DiagnosticKind::Symmetry]);

        g.coupling.c_plus = ComplexMatrix::zeros(2, 2);
        let kinds: Vec<_> = validate_slh(&g, 1e-10).iter().map(|d| d.kind).collect();
        assert_eq!(kinds, vec![DiagnosticKind::Shape]);
        assert!(SlhModel::new(g.scattering.clone(), g.coupling.clone(), g.hamiltonian.clone()).is_err());
    }

    #[test]
    fn neg_i_omega_examples() {
        assert_eq!(neg_i_omega(&Hamiltonian::zero(2)).unwrap().max_norm(), 0.0);
        let d = 0.37;
        let m = neg_i_omega(&Hamiltonian::detuning(d)).unwrap();
        let expected = ComplexMatrix::diag(&[c64(0.0, -d), c64(0.0, d)]);
        assert_eq!(m, expected);
        let mut bad = Hamiltonian::zero(2);
        bad.omega_minus[(0, 1)] = c64(0.0, 1.0);
        assert!(matches!(neg_i_omega(&bad), Err(Error::Validation(_))));
    }

    #[test]
    fn neg_i_omega_is_doubled_up() {
        for seed in 0..20 {
            let g = random_slh(3, 2, seed);
            let m = neg_i_omega(&g.hamiltonian).unwrap();
            split_delta(&m, 1e-12).unwrap();
        }
    }

    #[test]
    fn interaction_of_zero_coupling_vanishes() {
        let g = random_slh(2, 3, 4);
        let h = interaction_hamiltonian(&g.coupling, &g.scattering, &Coupling::zero(3, 2)).unwrap();
        assert_eq!(h.omega_minus.max_norm(), 0.0);
        assert_eq!(h.omega_plus.max_norm(), 0.0);
    }

    #[test]
    fn interaction_of_equal_real_couplings_vanishes() {
        let c = Coupling::new(
            ComplexMatrix::from_real_rows(&[[1.0, -0.5], [0.3, 2.0]]).unwrap(),
            ComplexMatrix::from_real_rows(&[[0.2, 0.0], [0.0, 0.7]]).unwrap(),
        );
        let h = interaction_hamiltonian(&c, &ComplexMatrix::identity(2), &c).unwrap();
        assert!(h.omega_minus.max_norm() < 1e-15);
        assert!(h.omega_plus.max_norm() < 1e-15);
    }

    #[test]
    fn interaction_for_real_cavity_couplings_vanishes() {
        // Lₙ = (√k₁, √k₂, √k₃) a and ΔL = (√(k₁+γ) − √k₁) a on channel one
        let cn = Coupling::passive(col(&[1.0, 1.0, 1.0]));
        let dl = Coupling::passive(col(&[1.21f64.sqrt() - 1.0, 0.0, 0.0]));
        let h = interaction_hamiltonian(&cn, &ComplexMatrix::identity(3), &dl).unwrap();
        assert!(h.omega_minus.max_norm() < 1e-15);
        assert!(h.omega_plus.max_norm() < 1e-15);
    }

    #[test]
    fn interaction_matches_scalar_imaginary_part() {
        // single mode, single channel, passive: Im(conj(c₂) s c₁) a*a
        let (c2, s, c1) = (c64(0.3, 0.8), c64(0.6, 0.8), c64(-1.1, 0.4));
        let h = interaction_hamiltonian(
            &Coupling::passive(ComplexMatrix::diag(&[c2])),
            &ComplexMatrix::diag(&[s]),
            &Coupling::passive(ComplexMatrix::diag(&[c1])),
        )
        .unwrap();
        let expected: ComplexScalar = c2.conj() * s * c1;
        assert!((h.omega_minus[(0, 0)] - c64(expected.im, 0.0)).norm() < 1e-15);
        assert_eq!(h.omega_plus.max_norm(), 0.0);
    }

    #[test]
    fn im_flat_definition_on_kernel() {
        let g = random_slh(2, 2, 17);
        let x = interaction_kernel(&g.coupling, &ComplexMatrix::identity(2), &g.coupling).unwrap();
        let (_, im) = flat_parts(&x).unwrap();
        let direct = (&x - &flat(&x).unwrap()).scale(c64(0.0, 1.0).scale(2.0).inv());
        assert!(im.approx_eq(&direct, 1e-14));
    }

    #[test]
    fn cascade_with_identity_is_neutral() {
        let g = random_slh(2, 3, 8);
        let id = identity_system(3, 2);
        assert!(max_component_residual(&cascade(&id, &g).unwrap(), &g) < 1e-15);
        assert!(max_component_residual(&cascade(&g, &id).unwrap(), &g) < 1e-15);
        assert_eq!(cascade(&id, &id).unwrap(), id);
    }

    #[test]
    fn cascade_rejects_mismatch() {
        let a = random_slh(1, 2, 1);
        let b = random_slh(2, 2, 2);
        let c = random_slh(1, 3, 3);
        assert!(matches!(cascade(&a, &b), Err(Error::InvalidComposition(_))));
        assert!(matches!(cascade(&a, &c), Err(Error::InvalidComposition(_))));
    }

    #[test]
    fn cascade_preserves_invariants() {
        for seed in 0..30 {
            let g1 = random_slh(2, 3, seed);
            let g2 = random_slh(2, 3, seed + 1000);
            let g = cascade(&g2, &g1).unwrap();
            assert!(validate_slh(&g, 1e-10).is_empty());
        }
    }

    #[test]
    fn random_slh_contract() {
        assert_eq!(random_slh(2, 3, 5), random_slh(2, 3, 5));
        for seed in 0..100 {
            let n = 1 + (seed as usize % 4);
            let m = 1 + (seed as usize / 4 % 4);
            assert!(validate_slh(&random_slh(n, m, seed), 1e-10).is_empty());
        }
        let g = random_slh(1, 1, 0);
        assert_eq!((g.n_modes, g.m_channels), (1, 1));
        cascade(&g, &random_slh(1, 1, 1)).unwrap();
    }

    #[test]
    fn identity_contract() {
        let id = identity_system(3, 1);
        assert!(validate_slh(&id, 0.0).is_empty());
        let empty = identity_system(2, 0);
        assert!(validate_slh(&empty, 0.0).is_empty());
    }
}
