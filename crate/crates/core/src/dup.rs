//! Doubled-up matrix algebra.
//!
//! A vector of mode operators `a` is paired with its adjoint vector `a#` and
//! every linear map acting on the stacked pair has the block form
//! `Δ(E⁻, E⁺) = [[E⁻, E⁺], [E⁺#, E⁻#]]`. The flat operation
//! `Z♭ = J Z† J` is the adjoint that respects the signature `J = diag(I, -I)`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{dim_err, Error, Result};
use crate::matrix::{c64, ComplexMatrix, ComplexScalar};

/// `J_n = diag(I_n, -I_n)`.
pub fn signature_matrix(n: usize) -> Result<ComplexMatrix> {
    if n == 0 {
        return Err(dim_err("signature_matrix", "n must be at least 1"));
    }
    let mut j = ComplexMatrix::zeros(2 * n, 2 * n);
    for i in 0..2 * n {
        j[(i, i)] = c64(if i < n { 1.0 } else { -1.0 }, 0.0);
    }
    Ok(j)
}

/// `Z♭` for a `2m x 2n` matrix, giving a `2n x 2m` result.
///
/// The signature on the left has the size of the result's rows and the one
/// on the right the size of its columns, so for square `Z` both are `J_m`.
pub fn flat(z: &ComplexMatrix) -> Result<ComplexMatrix> {
    let (r, c) = z.shape();
    if r % 2 != 0 || c % 2 != 0 {
        return Err(dim_err("flat", format!("{r}x{c} is not even-sized")));
    }
    let (hm, hn) = (r / 2, c / 2);
    // (J_n Z† J_m)_{ij} = s_n(i) conj(z_ji) s_m(j)
    Ok(ComplexMatrix::from_fn(c, r, |i, j| {
        let s = if (i < hn) == (j < hm) { 1.0 } else { -1.0 };
        z[(j, i)].conj() * s
    }))
}

/// A `2m x 2n` matrix known to have the `Δ(E⁻, E⁺)` block structure.
#[derive(Debug, Clone, PartialEq)]
pub struct DoubledUpMatrix {
    m: usize,
    n: usize,
    mat: ComplexMatrix,
}

impl DoubledUpMatrix {
    /// Checks the block structure of `mat` to within `tol`.
    pub fn from_matrix(mat: ComplexMatrix, tol: f64) -> Result<Self> {
        let (em, _) = split_delta(&mat, tol)?;
        Ok(Self {
            m: em.rows(),
            n: em.cols(),
            mat,
        })
    }

    /// Half row count.
    pub fn m(&self) -> usize {
        self.m
    }

    /// Half column count.
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn as_matrix(&self) -> &ComplexMatrix {
        &self.mat
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.mat
    }

    pub fn minus(&self) -> ComplexMatrix {
        self.mat.block(0, 0, self.m, self.n)
    }

    pub fn plus(&self) -> ComplexMatrix {
        self.mat.block(0, self.n, self.m, self.n)
    }
}

impl From<DoubledUpMatrix> for ComplexMatrix {
    fn from(d: DoubledUpMatrix) -> Self {
        d.mat
    }
}

/// `Δ(E⁻, E⁺)`.
pub fn delta(e_minus: &ComplexMatrix, e_plus: &ComplexMatrix) -> Result<DoubledUpMatrix> {
    if e_minus.shape() != e_plus.shape() {
        return Err(dim_err(
            "delta",
            format!("E- is {:?} but E+ is {:?}", e_minus.shape(), e_plus.shape()),
        ));
    }
    let (m, n) = e_minus.shape();
    let mat = ComplexMatrix::from_blocks(e_minus, e_plus, &e_plus.conj(), &e_minus.conj())?;
    Ok(DoubledUpMatrix { m, n, mat })
}

/// Shorthand for `delta(..)` when only the plain matrix is wanted.
pub(crate) fn delta_mat(e_minus: &ComplexMatrix, e_plus: &ComplexMatrix) -> Result<ComplexMatrix> {
    delta(e_minus, e_plus).map(DoubledUpMatrix::into_matrix)
}

/// Inverse of [`delta`]: returns the top blocks after checking that the
/// bottom blocks are their conjugates to within `tol`.
pub fn split_delta(mat: &ComplexMatrix, tol: f64) -> Result<(ComplexMatrix, ComplexMatrix)> {
    let (r, c) = mat.shape();
    if r % 2 != 0 || c % 2 != 0 {
        return Err(dim_err("split_delta", format!("{r}x{c} is not even-sized")));
    }
    let (m, n) = (r / 2, c / 2);
    let em = mat.block(0, 0, m, n);
    let ep = mat.block(0, n, m, n);
    let dev = mat
        .block(m, 0, m, n)
        .max_abs_diff(&ep.conj())
        .max(mat.block(m, n, m, n).max_abs_diff(&em.conj()));
    // NaN deviations must not pass
    if !(dev <= tol) {
        return Err(Error::NotDoubledUp {
            max_deviation: dev,
            tol,
        });
    }
    Ok((em, ep))
}

/// `(Re♭ X, Im♭ X) = (½(X + X♭), (X - X♭)/2i)`, so that
/// `X = Re♭ X + i Im♭ X`.
pub fn flat_parts(x: &ComplexMatrix) -> Result<(ComplexMatrix, ComplexMatrix)> {
    if !x.is_square() || !x.rows().is_multiple_of(2) {
        return Err(dim_err(
            "flat_parts",
            format!("{:?} is not square with even size", x.shape()),
        ));
    }
    let xf = flat(x)?;
    let re = (x + &xf).scale_re(0.5);
    // 1/(2i) = -i/2
    let im = (x - &xf).scale(c64(0.0, -0.5));
    Ok((re, im))
}

/// Outcome of a unitarity check.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UnitaryCheck {
    pub unitary: bool,
    /// `max(‖M†M - I‖_max, ‖MM† - I‖_max)`
    pub deviation: f64,
}

pub fn is_unitary(m: &ComplexMatrix, tol: f64) -> Result<UnitaryCheck> {
    if !m.is_square() {
        return Err(dim_err("is_unitary", format!("{:?} is not square", m.shape())));
    }
    let id = ComplexMatrix::identity(m.rows());
    let h = m.adjoint();
    let dev = (&h * m).max_abs_diff(&id).max((m * &h).max_abs_diff(&id));
    Ok(UnitaryCheck {
        unitary: dev <= tol,
        deviation: dev,
    })
}

/// Deterministic generator shared by the random test-input constructors.
pub type SeededRng = ChaCha8Rng;

pub fn seeded_rng(seed: u64) -> SeededRng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub(crate) fn gaussian(rng: &mut impl Rng) -> ComplexScalar {
    c64(rng.sample(StandardNormal), rng.sample(StandardNormal))
}

/// Matrix of i.i.d. standard complex Gaussian entries, drawn row-major with
/// the real part before the imaginary part of each entry.
pub fn gaussian_matrix(rows: usize, cols: usize, rng: &mut impl Rng) -> ComplexMatrix {
    ComplexMatrix::from_fn(rows, cols, |_, _| gaussian(rng))
}

/// Seeded random unitary.
///
/// The stream is ChaCha8 seeded from `seed`; a `dim x dim` complex Gaussian
/// matrix is drawn with [`gaussian_matrix`] and its columns are orthonormalized
/// left to right by modified Gram-Schmidt.
pub fn random_unitary(dim: usize, seed: u64) -> Result<ComplexMatrix> {
    if dim == 0 {
        return Err(dim_err("random_unitary", "dim must be at least 1"));
    }
    Ok(random_unitary_with(dim, &mut seeded_rng(seed)))
}

pub(crate) fn random_unitary_with(dim: usize, rng: &mut impl Rng) -> ComplexMatrix {
    loop {
        let g = gaussian_matrix(dim, dim, rng);
        if let Some(q) = gram_schmidt(&g) {
            return q;
        }
    }
}

fn gram_schmidt(g: &ComplexMatrix) -> Option<ComplexMatrix> {
    let n = g.rows();
    let mut cols: Vec<Vec<ComplexScalar>> = (0..n).map(|j| (0..n).map(|i| g[(i, j)]).collect()).collect();
    for j in 0..n {
        for k in 0..j {
            let (done, rest) = cols.split_at_mut(j);
            let q = &done[k];
            let v = &mut rest[0];
            let proj: ComplexScalar = q.iter().zip(v.iter()).map(|(a, b)| a.conj() * b).sum();
            for (vi, qi) in v.iter_mut().zip(q) {
                *vi -= proj * qi;
            }
        }
        let norm = cols[j].iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm < 1e-8 {
            return None;
        }
        for z in cols[j].iter_mut() {
            *z /= norm;
        }
    }
    Some(ComplexMatrix::from_fn(n, n, |i, j| cols[j][i]))
}

/// `½(M + M†)`
pub(crate) fn hermitize(m: &ComplexMatrix) -> ComplexMatrix {
    (m + &m.adjoint()).scale_re(0.5)
}

/// `½(M + Mᵀ)`
pub(crate) fn symmetrize(m: &ComplexMatrix) -> ComplexMatrix {
    (m + &m.transpose()).scale_re(0.5)
}
