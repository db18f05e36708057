//! Uncertain SLH models: perturbation sets, the nominal/uncertain cascade
//! decomposition, the induced state-space relations, and grid sweeps of
//! robust stability.
//!
//! An admissible system is `(Sₙ ΔS, Lₙ + ΔL, Hₙ + ΔH)` with `ΔS` unitary,
//! `ΔL = δc⁻ a + δc⁺ a#` and `ΔH` quadratic. It factors as `Gₙ ◁ Δ` with
//! `Gₙ = (Sₙ, Lₙ, Hₙ)` and `Δ = (ΔS, Sₙ†ΔL, ΔH - Im(Lₙ†ΔL))`.
//!
//! The coupling perturbation is always stored in its raw additive form
//! `(δc⁻, δc⁺)`; every state-space formula below is written for that form.

use rand::Rng;

use crate::dup::{self, delta_mat, flat, flat_parts, gaussian_matrix, seeded_rng};
use crate::error::{Error, Result};
use crate::matrix::{c64, ComplexMatrix};
use crate::par::{map_ordered, Execution};
use crate::slh::{
    self, cascade, component_residuals, interaction_hamiltonian, neg_i_omega, Coupling, Diagnostic, Hamiltonian,
    SlhModel,
};
use crate::statespace::{self, realize, series_connect, spectral_abscissa};
use crate::DEFAULT_TOL;

/// The uncertain parts `(ΔS, δc⁻, δc⁺, ΔH)` of an admissible system.
#[derive(Debug, Clone, PartialEq)]
pub struct Perturbation {
    pub delta_s: ComplexMatrix,
    pub delta_c: Coupling,
    pub delta_h: Hamiltonian,
}

impl Perturbation {
    /// `ΔS = I`, `δc = 0`, `ΔH = 0`.
    pub fn zero(n: usize, m: usize) -> Self {
        Self {
            delta_s: ComplexMatrix::identity(m),
            delta_c: Coupling::zero(m, n),
            delta_h: Hamiltonian::zero(n),
        }
    }

    /// Seeded random perturbation: ChaCha8 stream drawing `ΔS` (random
    /// unitary), `δc⁻`, `δc⁺` (Gaussian times `scale`), then `ΔH` (Gaussian,
    /// hermitized/symmetrized, times `scale`).
    pub fn random(n: usize, m: usize, seed: u64, scale: f64) -> Self {
        let mut rng = seeded_rng(seed);
        Self::random_with(n, m, scale, &mut rng)
    }

    pub(crate) fn random_with(n: usize, m: usize, scale: f64, rng: &mut impl Rng) -> Self {
        let delta_s = dup::random_unitary_with(m, rng);
        let delta_c = Coupling::new(
            gaussian_matrix(m, n, rng).scale_re(scale),
            gaussian_matrix(m, n, rng).scale_re(scale),
        );
        let delta_h = slh::random_hamiltonian(n, rng).scale(scale);
        Self {
            delta_s,
            delta_c,
            delta_h,
        }
    }

    pub fn modes(&self) -> usize {
        self.delta_c.modes()
    }

    pub fn channels(&self) -> usize {
        self.delta_s.rows()
    }

    /// Unitary `ΔS`, well-formed `ΔH` and consistent shapes, checked by
    /// validating `(ΔS, δc, ΔH)` as an SLH model.
    pub fn validate(&self, tol: f64) -> Vec<Diagnostic> {
        let as_model = SlhModel {
            n_modes: self.modes(),
            m_channels: self.channels(),
            scattering: self.delta_s.clone(),
            coupling: self.delta_c.clone(),
            hamiltonian: self.delta_h.clone(),
        };
        slh::validate_slh(&as_model, tol)
    }

    /// `Δ(δc⁻, δc⁺)`
    pub fn doubled_coupling(&self) -> Result<ComplexMatrix> {
        self.delta_c.doubled()
    }
}

fn check_compatible(nominal: &SlhModel, p: &Perturbation) -> Result<()> {
    if p.modes() != nominal.n_modes || p.channels() != nominal.m_channels {
        return Err(Error::InvalidComposition(format!(
            "perturbation with {} modes/{} channels for a {}-mode/{}-channel nominal system",
            p.modes(),
            p.channels(),
            nominal.n_modes,
            nominal.m_channels
        )));
    }
    let diags = p.validate(DEFAULT_TOL);
    if !diags.is_empty() {
        return Err(Error::Validation(diags));
    }
    Ok(())
}

/// `(Sₙ ΔS, Lₙ + ΔL, Hₙ + ΔH)`.
pub fn apply_perturbation(nominal: &SlhModel, p: &Perturbation) -> Result<SlhModel> {
    check_compatible(nominal, p)?;
    let g = SlhModel::new(
        nominal.scattering.try_mul(&p.delta_s)?,
        nominal.coupling.try_add(&p.delta_c)?,
        nominal.hamiltonian.try_add(&p.delta_h)?,
    )?;
    g.ensure_valid(DEFAULT_TOL)?;
    Ok(g)
}

/// Recovers `(ΔS, δc, ΔH)` from a nominal model and a perturbed one.
pub fn extract_perturbation(nominal: &SlhModel, full: &SlhModel) -> Result<Perturbation> {
    if nominal.n_modes != full.n_modes || nominal.m_channels != full.m_channels {
        return Err(Error::InvalidComposition(
            "nominal and perturbed systems differ in size".into(),
        ));
    }
    Ok(Perturbation {
        delta_s: nominal.scattering.adjoint().try_mul(&full.scattering)?,
        delta_c: full.coupling.try_sub(&nominal.coupling)?,
        delta_h: full.hamiltonian.try_sub(&nominal.hamiltonian)?,
    })
}

/// `Δ = (ΔS, Sₙ†ΔL, ΔH - Im(Lₙ†ΔL))`.
pub fn delta_subsystem(nominal: &SlhModel, p: &Perturbation) -> Result<SlhModel> {
    check_compatible(nominal, p)?;
    let correction = interaction_hamiltonian(
        &nominal.coupling,
        &ComplexMatrix::identity(nominal.m_channels),
        &p.delta_c,
    )?;
    build_delta(nominal, p, p.delta_h.try_sub(&correction)?)
}

/// `(ΔS, Sₙ†ΔL, ΔH)`: the uncertain subsystem with the interaction
/// correction left out. It does not reproduce the perturbed system unless
/// `Im(Lₙ†ΔL)` vanishes.
pub fn uncorrected_delta_subsystem(nominal: &SlhModel, p: &Perturbation) -> Result<SlhModel> {
    check_compatible(nominal, p)?;
    build_delta(nominal, p, p.delta_h.clone())
}

fn build_delta(nominal: &SlhModel, p: &Perturbation, h: Hamiltonian) -> Result<SlhModel> {
    let rot = nominal.scattering.adjoint();
    SlhModel::new(p.delta_s.clone(), p.delta_c.left_mul(&rot)?, h)
}

/// State-matrix pieces relating the perturbed and nominal realizations.
#[derive(Debug, Clone, PartialEq)]
pub struct Theorem2Matrices {
    /// `Ã′ = -C̃ₙ♭ δ̃c`
    pub a_prime: ComplexMatrix,
    /// `ΔÃ = -½ δ̃c♭δ̃c - iΩ̃_ΔH - Re♭(C̃ₙ♭ δ̃c)`
    pub delta_a: ComplexMatrix,
    /// `Ãδ = -½ δ̃c_Δ♭δ̃c_Δ - iΩ̃_ΔH + i Im♭(C̃ₙ♭ δ̃c)`
    pub a_delta: ComplexMatrix,
}

/// With `δ̃c = Δ(δc⁻, δc⁺)` and `δ̃c_Δ = Δ(Sₙ†δc⁻, Sₙ†δc⁺)`.
///
/// `ΔÃ` is computed on its own rather than as `Ã′ + Ãδ`, so the split
/// identity can be checked.
pub fn theorem2_matrices(nominal: &SlhModel, p: &Perturbation) -> Result<Theorem2Matrices> {
    check_compatible(nominal, p)?;
    let cn = nominal.coupling.doubled()?;
    let dc = p.doubled_coupling()?;
    let dc_delta = p.delta_c.left_mul(&nominal.scattering.adjoint())?.doubled()?;
    let y = flat(&cn)?.try_mul(&dc)?;
    let (re_y, im_y) = flat_parts(&y)?;
    let h_term = neg_i_omega(&p.delta_h)?;

    let a_prime = -&y;
    let a_delta = flat(&dc_delta)?
        .try_mul(&dc_delta)?
        .scale_re(-0.5)
        .try_add(&h_term)?
        .try_add(&im_y.scale(c64(0.0, 1.0)))?;
    let delta_a = flat(&dc)?
        .try_mul(&dc)?
        .scale_re(-0.5)
        .try_add(&h_term)?
        .try_sub(&re_y)?;
    Ok(Theorem2Matrices {
        a_prime,
        delta_a,
        a_delta,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct DecompositionResult {
    pub g_full: SlhModel,
    pub g_nominal: SlhModel,
    pub g_delta: SlhModel,
    pub a_prime: ComplexMatrix,
    pub delta_a: ComplexMatrix,
    pub a_delta: ComplexMatrix,
    /// `delta_a_split = ‖ΔÃ - (Ã′ + Ãδ)‖` and
    /// `a_delta_realized = ‖Ãδ - Ã(realize(Δ))‖`.
    pub residuals: Vec<(String, f64)>,
}

pub fn decompose(nominal: &SlhModel, p: &Perturbation) -> Result<DecompositionResult> {
    let g_full = apply_perturbation(nominal, p)?;
    let g_delta = delta_subsystem(nominal, p)?;
    let t2 = theorem2_matrices(nominal, p)?;
    let split = t2.delta_a.max_abs_diff(&(&t2.a_prime + &t2.a_delta));
    let realized = t2.a_delta.max_abs_diff(&realize(&g_delta)?.a);
    Ok(DecompositionResult {
        g_full,
        g_nominal: nominal.clone(),
        g_delta,
        a_prime: t2.a_prime,
        delta_a: t2.delta_a,
        a_delta: t2.a_delta,
        residuals: vec![("delta_a_split".into(), split), ("a_delta_realized".into(), realized)],
    })
}

/// Named max-norm residuals checked against one tolerance.
#[derive(Debug, Clone, PartialEq)]
pub struct ResidualReport {
    pub tol: f64,
    pub entries: Vec<(String, f64)>,
}

impl ResidualReport {
    pub fn new(tol: f64) -> Self {
        Self {
            tol,
            entries: Vec::new(),
        }
    }

    pub fn push(&mut self, name: impl Into<String>, value: f64) {
        self.entries.push((name.into(), value));
    }

    pub fn get(&self, name: &str) -> Option<f64> {
        self.entries.iter().find(|(n, _)| n == name).map(|(_, v)| *v)
    }

    pub fn max(&self) -> f64 {
        self.entries.iter().map(|(_, v)| *v).fold(0.0, f64::max)
    }

    /// Every residual is at most `tol` (NaN fails).
    pub fn passed(&self) -> bool {
        self.entries.iter().all(|(_, v)| *v <= self.tol)
    }
}

/// Compares `Gₙ ◁ Δ` against the perturbed system component by component.
pub fn verify_theorem1(nominal: &SlhModel, p: &Perturbation, tol: f64) -> Result<ResidualReport> {
    let full = apply_perturbation(nominal, p)?;
    let composed = cascade(nominal, &delta_subsystem(nominal, p)?)?;
    let mut report = ResidualReport::new(tol);
    for (name, r) in component_residuals(&composed, &full) {
        report.push(name, r);
    }
    Ok(report)
}

/// Checks the realization relations
/// `Ã = Ãₙ + ΔÃ`, `ΔÃ = Ã′ + Ãδ`, `C̃ = C̃ₙ + δ̃c`, `D̃ = D̃ₙ Δ(ΔS, 0)` and
/// `B̃ = B̃ₙ Δ(ΔS, 0) - δ̃c♭ D̃ₙ Δ(ΔS, 0)`.
pub fn verify_theorem2(nominal: &SlhModel, p: &Perturbation, tol: f64) -> Result<ResidualReport> {
    let full = realize(&apply_perturbation(nominal, p)?)?;
    let nom = realize(nominal)?;
    let delta_ss = realize(&delta_subsystem(nominal, p)?)?;
    let t2 = theorem2_matrices(nominal, p)?;
    let dc = p.doubled_coupling()?;
    let m = nominal.m_channels;
    let d_delta = delta_mat(&p.delta_s, &ComplexMatrix::zeros(m, m))?;

    let mut report = ResidualReport::new(tol);
    report.push("A", full.a.max_abs_diff(&(&nom.a + &t2.delta_a)));
    report.push("delta_a_split", t2.delta_a.max_abs_diff(&(&t2.a_prime + &t2.a_delta)));
    report.push("a_delta_realized", t2.a_delta.max_abs_diff(&delta_ss.a));
    report.push("C", full.c.max_abs_diff(&(&nom.c + &dc)));
    report.push("D", full.d.max_abs_diff(&(&nom.d * &d_delta)));
    let b_expected = &(&nom.b * &d_delta) - &(&(&flat(&dc)? * &nom.d) * &d_delta);
    report.push("B", full.b.max_abs_diff(&b_expected));
    Ok(report)
}

/// Transfer-function comparisons of the decomposition against the
/// perturbed system, at the standard 20 sample points.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BehavioralResiduals {
    /// `realize(Gₙ ◁ Δ)` on the shared mode space versus `realize(G)`.
    pub shared_mode: f64,
    /// `series_connect(realize(Gₙ), realize(Δ))` on stacked, separate
    /// states versus `realize(G)`.
    pub series_connect: f64,
}

pub fn behavioral_residuals(nominal: &SlhModel, p: &Perturbation) -> Result<BehavioralResiduals> {
    let full = realize(&apply_perturbation(nominal, p)?)?;
    let g_delta = delta_subsystem(nominal, p)?;
    let shared = realize(&cascade(nominal, &g_delta)?)?;
    let stacked = series_connect(&realize(nominal)?, &realize(&g_delta)?)?;
    Ok(BehavioralResiduals {
        shared_mode: statespace::behavioral_residual(&shared, &full)?,
        series_connect: statespace::behavioral_residual(&stacked, &full)?,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct Parameter {
    pub name: String,
    pub lower: f64,
    pub upper: f64,
}

impl Parameter {
    pub fn new(name: impl Into<String>, lower: f64, upper: f64) -> Self {
        Self {
            name: name.into(),
            lower,
            upper,
        }
    }
}

/// Linear direction of a generic additive family: one parameter value `t`
/// contributes `t · coupling` to `δc` and `t · hamiltonian` to `ΔH`.
#[derive(Debug, Clone, PartialEq)]
pub struct Direction {
    pub coupling: Coupling,
    pub hamiltonian: Hamiltonian,
}

/// How a parameter assignment becomes a [`Perturbation`].
#[derive(Debug, Clone, PartialEq)]
pub enum Family {
    /// Parameters `gamma` and `delta`. `gamma` moves the squared coupling of
    /// `(channel, mode)` from `k₁ = |c|²` to `k₁ + γ`; `delta` adds the
    /// detuning `δ a*a` on `mode`. `ΔS = I`.
    ///
    /// While `k₁ + γ >= 0` the perturbed entry is `√(k₁ + γ)` with the
    /// nominal phase. Below zero the annihilation entry is removed and the
    /// mode couples through the creation block with weight `√(-(k₁ + γ))`,
    /// so `|C⁻|² - |C⁺|²` keeps tracking `k₁ + γ`.
    CavityGammaDelta { channel: usize, mode: usize },
    /// `ΔS = I`, `δc = Σ tᵢ cᵢ`, `ΔH = Σ tᵢ hᵢ`, one direction per parameter.
    GenericAdditive { directions: Vec<Direction> },
}

/// Box `[lower, upper]` per parameter plus the family mapping points of the
/// box to perturbations.
#[derive(Debug, Clone, PartialEq)]
pub struct UncertaintyBox {
    parameters: Vec<Parameter>,
    family: Family,
}

impl UncertaintyBox {
    pub fn new(parameters: Vec<Parameter>, family: Family) -> Result<Self> {
        for p in &parameters {
            if !(p.lower.is_finite() && p.upper.is_finite()) {
                return Err(Error::InvalidParameter(format!(
                    "bounds of `{}` must be finite",
                    p.name
                )));
            }
            if p.lower > p.upper {
                return Err(Error::InvalidParameter(format!(
                    "`{}` has lower bound {} above upper bound {}",
                    p.name, p.lower, p.upper
                )));
            }
        }
        for (i, p) in parameters.iter().enumerate() {
            if parameters[..i].iter().any(|q| q.name == p.name) {
                return Err(Error::InvalidParameter(format!("duplicate parameter `{}`", p.name)));
            }
        }
        match &family {
            Family::CavityGammaDelta { .. } => {
                let mut names: Vec<&str> = parameters.iter().map(|p| p.name.as_str()).collect();
                names.sort_unstable();
                if names != ["delta", "gamma"] {
                    return Err(Error::InvalidParameter(
                        "cavity family needs exactly the parameters `gamma` and `delta`".into(),
                    ));
                }
            }
            Family::GenericAdditive { directions } => {
                if directions.len() != parameters.len() {
                    return Err(Error::InvalidParameter(format!(
                        "{} directions for {} parameters",
                        directions.len(),
                        parameters.len()
                    )));
                }
            }
        }
        Ok(Self { parameters, family })
    }

    pub fn parameters(&self) -> &[Parameter] {
        &self.parameters
    }

    pub fn family(&self) -> &Family {
        &self.family
    }

    pub fn upper_corner(&self) -> Vec<f64> {
        self.parameters.iter().map(|p| p.upper).collect()
    }

    /// Values in parameter order from named overrides; parameters not named
    /// take their upper bound.
    pub fn assignment(&self, overrides: &[(String, f64)]) -> Result<Vec<f64>> {
        let mut values = self.upper_corner();
        for (name, v) in overrides {
            let idx = self
                .parameters
                .iter()
                .position(|p| &p.name == name)
                .ok_or_else(|| Error::InvalidParameter(format!("unknown parameter `{name}`")))?;
            values[idx] = *v;
        }
        Ok(values)
    }

    /// Cartesian grid, first parameter varying slowest. Each axis has
    /// `points_per_axis` evenly spaced values including both bounds, or a
    /// single value when the bounds coincide.
    pub fn grid(&self, points_per_axis: usize) -> Vec<Vec<f64>> {
        let axes: Vec<Vec<f64>> = self
            .parameters
            .iter()
            .map(|p| {
                if p.lower == p.upper || points_per_axis < 2 {
                    vec![p.lower]
                } else {
                    let last = (points_per_axis - 1) as f64;
                    (0..points_per_axis)
                        .map(|k| {
                            if k + 1 == points_per_axis {
                                p.upper
                            } else {
                                p.lower + (p.upper - p.lower) * (k as f64 / last)
                            }
                        })
                        .collect()
                }
            })
            .collect();
        let mut out = vec![Vec::with_capacity(axes.len())];
        for axis in &axes {
            out = out
                .into_iter()
                .flat_map(|prefix| {
                    axis.iter().map(move |&v| {
                        let mut p = prefix.clone();
                        p.push(v);
                        p
                    })
                })
                .collect();
        }
        out
    }

    /// Perturbation at one point of the box, for the given nominal system.
    pub fn instantiate(&self, nominal: &SlhModel, values: &[f64]) -> Result<Perturbation> {
        if values.len() != self.parameters.len() {
            return Err(Error::InvalidParameter(format!(
                "{} values for {} parameters",
                values.len(),
                self.parameters.len()
            )));
        }
        let (n, m) = (nominal.n_modes, nominal.m_channels);
        let mut p = Perturbation::zero(n, m);
        match &self.family {
            Family::CavityGammaDelta { channel, mode } => {
                let (ch, md) = (*channel, *mode);
                if ch >= m || md >= n {
                    return Err(Error::InvalidParameter(format!(
                        "cavity entry ({ch}, {md}) outside a {m}-channel/{n}-mode system"
                    )));
                }
                let value = |name: &str| {
                    let i = self.parameters.iter().position(|p| p.name == name).unwrap();
                    values[i]
                };
                let (gamma, delta) = (value("gamma"), value("delta"));
                let c0 = nominal.coupling.c_minus[(ch, md)];
                let k1 = c0.norm_sqr();
                let phase = if c0.norm() > 0.0 { c0 / c0.norm() } else { c64(1.0, 0.0) };
                let target = k1 + gamma;
                if target >= 0.0 {
                    p.delta_c.c_minus[(ch, md)] = phase * target.sqrt() - c0;
                } else {
                    p.delta_c.c_minus[(ch, md)] = -c0;
                    p.delta_c.c_plus[(ch, md)] = c64((-target).sqrt(), 0.0);
                }
                p.delta_h.omega_minus[(md, md)] = c64(delta, 0.0);
            }
            Family::GenericAdditive { directions } => {
                for (dir, &t) in directions.iter().zip(values) {
                    p.delta_c = p.delta_c.try_add(&Coupling::new(
                        dir.coupling.c_minus.scale_re(t),
                        dir.coupling.c_plus.scale_re(t),
                    ))?;
                    p.delta_h = p.delta_h.try_add(&dir.hamiltonian.scale(t))?;
                }
            }
        }
        Ok(p)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepPoint {
    pub values: Vec<f64>,
    /// `None` when the point was skipped.
    pub abscissa: Option<f64>,
    pub diagnostic: Option<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepReport {
    pub parameter_names: Vec<String>,
    pub points: Vec<SweepPoint>,
    pub worst_abscissa: Option<f64>,
    pub worst_point: Option<Vec<f64>>,
    pub margin: f64,
    /// Worst abscissa strictly below `-margin`; false when every point was
    /// skipped.
    pub robustly_stable: bool,
}

impl SweepReport {
    pub fn skipped(&self) -> usize {
        self.points.iter().filter(|p| p.abscissa.is_none()).count()
    }
}

/// Spectral abscissa of the perturbed system over the box grid.
pub fn stability_sweep(
    nominal: &SlhModel,
    ubox: &UncertaintyBox,
    grid_points_per_axis: usize,
    margin: f64,
) -> Result<SweepReport> {
    stability_sweep_with(nominal, ubox, grid_points_per_axis, margin, Execution::default())
}

pub fn stability_sweep_with(
    nominal: &SlhModel,
    ubox: &UncertaintyBox,
    grid_points_per_axis: usize,
    margin: f64,
    exec: Execution,
) -> Result<SweepReport> {
    if grid_points_per_axis < 2 {
        return Err(Error::InvalidParameter("grid needs at least 2 points per axis".into()));
    }
    if !(margin >= 0.0) {
        return Err(Error::InvalidParameter("margin must be nonnegative".into()));
    }
    let grid = ubox.grid(grid_points_per_axis);
    let points = map_ordered(&grid, exec, |values| {
        let outcome = ubox
            .instantiate(nominal, values)
            .and_then(|p| apply_perturbation(nominal, &p))
            .and_then(|g| realize(&g))
            .and_then(|ss| spectral_abscissa(&ss));
        match outcome {
            Ok(sp) => SweepPoint {
                values: values.clone(),
                abscissa: Some(sp.abscissa),
                diagnostic: None,
            },
            Err(e) => SweepPoint {
                values: values.clone(),
                abscissa: None,
                diagnostic: Some(e.to_string()),
            },
        }
    });
    let mut worst: Option<(f64, usize)> = None;
    for (i, pt) in points.iter().enumerate() {
        if let Some(a) = pt.abscissa {
            if worst.is_none_or(|(w, _)| a > w) {
                worst = Some((a, i));
            }
        }
    }
    Ok(SweepReport {
        parameter_names: ubox.parameters.iter().map(|p| p.name.clone()).collect(),
        worst_abscissa: worst.map(|(a, _)| a),
        worst_point: worst.map(|(_, i)| points[i].values.clone()),
        robustly_stable: worst.is_some_and(|(a, _)| a < -margin),
        margin,
        points,
    })
}

/// Cavity with one mode coupled to three channels with rates `k`, `S = I`
/// and no Hamiltonian.
pub fn cavity_nominal(k: [f64; 3]) -> Result<SlhModel> {
    if k.iter().any(|&x| !(x >= 0.0)) {
        return Err(Error::InvalidParameter("coupling rates must be nonnegative".into()));
    }
    let c = ComplexMatrix::from_fn(3, 1, |i, _| c64(k[i].sqrt(), 0.0));
    SlhModel::new(ComplexMatrix::identity(3), Coupling::passive(c), Hamiltonian::zero(1))
}

/// Cavity family on channel 0 with `gamma` and `delta` bounds.
pub fn cavity_box(gamma: (f64, f64), delta: (f64, f64)) -> Result<UncertaintyBox> {
    UncertaintyBox::new(
        vec![
            Parameter::new("gamma", gamma.0, gamma.1),
            Parameter::new("delta", delta.0, delta.1),
        ],
        Family::CavityGammaDelta { channel: 0, mode: 0 },
    )
}
