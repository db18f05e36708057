//! Doubled-up state-space realizations `(Ã, B̃, C̃, D̃)` of SLH models.

use crate::dup::{delta_mat, flat, signature_matrix};
use crate::error::{Error, Result};
use crate::linalg::{self, Lu};
use crate::matrix::{c64, ComplexMatrix, ComplexScalar};
use crate::slh::{neg_i_omega, SlhModel};
use crate::DEFAULT_TOL;

pub use crate::linalg::eigenvalues;

/// `dX̆ = Ã X̆ dt + B̃ dĂ_in`, `dĂ_out = C̃ X̆ dt + D̃ dĂ_in`.
#[derive(Debug, Clone, PartialEq)]
pub struct StateSpaceModel {
    pub n_modes: usize,
    pub m_channels: usize,
    /// `2n x 2n`
    pub a: ComplexMatrix,
    /// `2n x 2m`
    pub b: ComplexMatrix,
    /// `2m x 2n`
    pub c: ComplexMatrix,
    /// `2m x 2m`
    pub d: ComplexMatrix,
}

impl StateSpaceModel {
    /// Worst doubled-up structure deviation over the four matrices.
    pub fn structure_deviation(&self) -> f64 {
        [&self.a, &self.b, &self.c, &self.d]
            .iter()
            .map(|m| {
                if m.rows() % 2 == 0 && m.cols() % 2 == 0 {
                    structure_dev(m)
                } else {
                    f64::INFINITY
                }
            })
            .fold(0.0, f64::max)
    }
}

fn structure_dev(m: &ComplexMatrix) -> f64 {
    let (r, c) = (m.rows() / 2, m.cols() / 2);
    m.block(r, 0, r, c)
        .max_abs_diff(&m.block(0, c, r, c).conj())
        .max(m.block(r, c, r, c).max_abs_diff(&m.block(0, 0, r, c).conj()))
}

/// `C̃ = Δ(C⁻, C⁺)`, `D̃ = Δ(S, 0)`, `B̃ = -C̃♭D̃`, `Ã = -½C̃♭C̃ - iΩ̃`.
pub fn realize(g: &SlhModel) -> Result<StateSpaceModel> {
    g.ensure_valid(DEFAULT_TOL)?;
    let m = g.m_channels;
    let c = g.coupling.doubled()?;
    let d = delta_mat(&g.scattering, &ComplexMatrix::zeros(m, m))?;
    let cf = flat(&c)?;
    let b = -&cf.try_mul(&d)?;
    let a = cf.try_mul(&c)?.scale_re(-0.5).try_add(&neg_i_omega(&g.hamiltonian)?)?;
    Ok(StateSpaceModel {
        n_modes: g.n_modes,
        m_channels: m,
        a,
        b,
        c,
        d,
    })
}

/// `Ξ(s) = C̃ (sI - Ã)⁻¹ B̃ + D̃`, evaluated with a pivoted LU solve.
pub fn transfer_function(ss: &StateSpaceModel, s: ComplexScalar) -> Result<ComplexMatrix> {
    let n = ss.a.rows();
    if n == 0 {
        return Ok(ss.d.clone());
    }
    let resolvent = ComplexMatrix::from_fn(n, n, |i, j| if i == j { s - ss.a[(i, j)] } else { -ss.a[(i, j)] });
    let lu = Lu::factor(&resolvent)?;
    if lu.is_singular() {
        return Err(Error::PoleProximity {
            re: s.re,
            im: s.im,
            pivot_ratio: lu.pivot_ratio(),
        });
    }
    let x = lu.solve(&ss.b)?;
    ss.c.try_mul(&x)?.try_add(&ss.d)
}

/// Realization of the upstream system feeding the downstream one.
///
/// With `1 = upstream` and `2 = downstream` on stacked states
/// `(x₁, x₂)` the blocks are `A = [[A₁, 0], [B₂C₁, A₂]]`,
/// `B = [[B₁], [B₂D₁]]`, `C = [D₂C₁, C₂]`, `D = D₂D₁`. The states are then
/// reordered as `(a₁, a₂, a₁#, a₂#)` so the result is again doubled-up
/// with `n₁ + n₂` modes.
pub fn series_connect(downstream: &StateSpaceModel, upstream: &StateSpaceModel) -> Result<StateSpaceModel> {
    if downstream.m_channels != upstream.m_channels {
        return Err(Error::InvalidComposition(format!(
            "series connection of {} channels into {} channels",
            upstream.m_channels, downstream.m_channels
        )));
    }
    let (n1, n2) = (upstream.n_modes, downstream.n_modes);
    let (s1, s2) = (2 * n1, 2 * n2);
    let zero = ComplexMatrix::zeros(s1, s2);
    let a = ComplexMatrix::from_blocks(&upstream.a, &zero, &downstream.b.try_mul(&upstream.c)?, &downstream.a)?;
    let mut b = ComplexMatrix::zeros(s1 + s2, upstream.b.cols());
    b.set_block(0, 0, &upstream.b);
    b.set_block(s1, 0, &downstream.b.try_mul(&upstream.d)?);
    let mut c = ComplexMatrix::zeros(downstream.c.rows(), s1 + s2);
    c.set_block(0, 0, &downstream.d.try_mul(&upstream.c)?);
    c.set_block(0, s1, &downstream.c);
    let d = downstream.d.try_mul(&upstream.d)?;

    // stacked index -> doubled-up index
    let n = n1 + n2;
    let perm: Vec<usize> = (0..s1 + s2)
        .map(|k| {
            if k < n1 {
                k
            } else if k < s1 {
                n + (k - n1)
            } else if k < s1 + n2 {
                n1 + (k - s1)
            } else {
                n + n1 + (k - s1 - n2)
            }
        })
        .collect();
    let mut pa = ComplexMatrix::zeros(2 * n, 2 * n);
    let mut pb = ComplexMatrix::zeros(2 * n, b.cols());
    let mut pc = ComplexMatrix::zeros(c.rows(), 2 * n);
    for (i, &pi) in perm.iter().enumerate() {
        for (j, &pj) in perm.iter().enumerate() {
            pa[(pi, pj)] = a[(i, j)];
        }
        for j in 0..b.cols() {
            pb[(pi, j)] = b[(i, j)];
        }
        for r in 0..c.rows() {
            pc[(r, pi)] = c[(r, i)];
        }
    }
    Ok(StateSpaceModel {
        n_modes: n,
        m_channels: downstream.m_channels,
        a: pa,
        b: pb,
        c: pc,
        d,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    pub eigenvalues: Vec<ComplexScalar>,
    /// Largest real part; `-inf` for a system without modes.
    pub abscissa: f64,
}

impl Spectrum {
    pub fn from_eigenvalues(eigenvalues: Vec<ComplexScalar>) -> Self {
        let abscissa = eigenvalues.iter().map(|z| z.re).fold(f64::NEG_INFINITY, f64::max);
        Self { eigenvalues, abscissa }
    }

    /// Hurwitz: abscissa strictly below zero.
    pub fn is_stable(&self) -> bool {
        self.abscissa < 0.0
    }

    /// Abscissa strictly below `-margin`.
    pub fn is_stable_with_margin(&self, margin: f64) -> bool {
        self.abscissa < -margin
    }
}

pub fn spectral_abscissa(ss: &StateSpaceModel) -> Result<Spectrum> {
    Ok(Spectrum::from_eigenvalues(linalg::eigenvalues(&ss.a)?))
}

/// `‖ÃJₙ + JₙÃ† + B̃JₘB̃†‖_max`, zero for every realization built by
/// [`realize`].
pub fn physical_realizability_residual(ss: &StateSpaceModel) -> Result<f64> {
    if ss.n_modes == 0 {
        return Ok(0.0);
    }
    let jn = signature_matrix(ss.n_modes)?;
    let jm = signature_matrix(ss.m_channels)?;
    let lhs =
        ss.a.try_mul(&jn)?
            .try_add(&jn.try_mul(&ss.a.adjoint())?)?
            .try_add(&ss.b.try_mul(&jm)?.try_mul(&ss.b.adjoint())?)?;
    Ok(lhs.max_norm())
}

/// `count` points on the vertical line `Re(s) = 1 + |abscissa|`, with
/// imaginary parts evenly spaced over `[-5, 5]`.
pub fn sample_points(abscissa: f64, count: usize) -> Vec<ComplexScalar> {
    let re = 1.0 + if abscissa.is_finite() { abscissa.abs() } else { 0.0 };
    (0..count)
        .map(|k| {
            let t = if count > 1 { k as f64 / (count - 1) as f64 } else { 0.5 };
            c64(re, -5.0 + 10.0 * t)
        })
        .collect()
}

/// Max-norm difference of two transfer functions over `points`.
pub fn transfer_residual(lhs: &StateSpaceModel, rhs: &StateSpaceModel, points: &[ComplexScalar]) -> Result<f64> {
    let mut worst = 0.0f64;
    for &s in points {
        let a = transfer_function(lhs, s)?;
        let b = transfer_function(rhs, s)?;
        worst = worst.max(a.max_abs_diff(&b));
    }
    Ok(worst)
}

/// Transfer residual at 20 sample points placed to the right of both
/// systems' spectra.
pub fn behavioral_residual(lhs: &StateSpaceModel, rhs: &StateSpaceModel) -> Result<f64> {
    let abscissa = spectral_abscissa(lhs)?.abscissa.max(spectral_abscissa(rhs)?.abscissa);
    transfer_residual(lhs, rhs, &sample_points(abscissa, 20))
}
