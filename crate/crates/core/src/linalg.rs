//! Linear solves and eigenvalues for small dense complex matrices.

use num_complex::Complex64;

use crate::error::{dim_err, Error, Result};
use crate::matrix::{c64, ComplexMatrix, ComplexScalar};

/// Largest dimension accepted by [`eigenvalues`].
pub const MAX_EIGEN_DIM: usize = 128;

/// Smallest admissible ratio `min |pivot| / max |pivot|` of an LU
/// factorization before the matrix is treated as singular.
pub const PIVOT_RATIO_FLOOR: f64 = 1e-13;

/// LU factorization with partial pivoting, `P A = L U`.
#[derive(Debug, Clone)]
pub struct Lu {
    n: usize,
    lu: ComplexMatrix,
    perm: Vec<usize>,
    pivot_ratio: f64,
}

impl Lu {
    pub fn factor(a: &ComplexMatrix) -> Result<Self> {
        if !a.is_square() {
            return Err(dim_err("lu", format!("{:?} is not square", a.shape())));
        }
        let n = a.rows();
        let mut lu = a.clone();
        let mut perm: Vec<usize> = (0..n).collect();
        let (mut pmin, mut pmax) = (f64::INFINITY, 0.0f64);
        for k in 0..n {
            let p = (k..n)
                .max_by(|&i, &j| lu[(i, k)].norm().total_cmp(&lu[(j, k)].norm()))
                .unwrap();
            if p != k {
                for j in 0..n {
                    let t = lu[(k, j)];
                    lu[(k, j)] = lu[(p, j)];
                    lu[(p, j)] = t;
                }
                perm.swap(k, p);
            }
            let piv = lu[(k, k)];
            pmin = pmin.min(piv.norm());
            pmax = pmax.max(piv.norm());
            if piv.norm() == 0.0 {
                continue;
            }
            for i in k + 1..n {
                let f = lu[(i, k)] / piv;
                lu[(i, k)] = f;
                for j in k + 1..n {
                    let u = lu[(k, j)];
                    lu[(i, j)] -= f * u;
                }
            }
        }
        let pivot_ratio = if n == 0 {
            1.0
        } else if pmax == 0.0 {
            0.0
        } else {
            pmin / pmax
        };
        Ok(Self {
            n,
            lu,
            perm,
            pivot_ratio,
        })
    }

    /// `min |pivot| / max |pivot|`, a cheap conditioning indicator.
    pub fn pivot_ratio(&self) -> f64 {
        self.pivot_ratio
    }

    pub fn is_singular(&self) -> bool {
        !(self.pivot_ratio > PIVOT_RATIO_FLOOR)
    }

    pub fn determinant(&self) -> ComplexScalar {
        let mut det = c64(1.0, 0.0);
        for i in 0..self.n {
            det *= self.lu[(i, i)];
        }
        if permutation_parity_odd(&self.perm) {
            -det
        } else {
            det
        }
    }

    /// Solves `A X = B` for every column of `B`.
    pub fn solve(&self, b: &ComplexMatrix) -> Result<ComplexMatrix> {
        if b.rows() != self.n {
            return Err(dim_err(
                "lu solve",
                format!("rhs has {} rows, expected {}", b.rows(), self.n),
            ));
        }
        let n = self.n;
        let mut x = ComplexMatrix::from_fn(n, b.cols(), |i, j| b[(self.perm[i], j)]);
        for c in 0..b.cols() {
            for i in 0..n {
                let mut s = x[(i, c)];
                for k in 0..i {
                    s -= self.lu[(i, k)] * x[(k, c)];
                }
                x[(i, c)] = s;
            }
            for i in (0..n).rev() {
                let mut s = x[(i, c)];
                for k in i + 1..n {
                    s -= self.lu[(i, k)] * x[(k, c)];
                }
                x[(i, c)] = s / self.lu[(i, i)];
            }
        }
        Ok(x)
    }
}

fn permutation_parity_odd(perm: &[usize]) -> bool {
    let mut seen = vec![false; perm.len()];
    let mut odd = false;
    for start in 0..perm.len() {
        if seen[start] {
            continue;
        }
        let mut len = 0;
        let mut i = start;
        while !seen[i] {
            seen[i] = true;
            i = perm[i];
            len += 1;
        }
        if len % 2 == 0 {
            odd = !odd;
        }
    }
    odd
}

/// Solves `A X = B`, rejecting numerically singular `A`.
pub fn solve(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<ComplexMatrix> {
    let lu = Lu::factor(a)?;
    if lu.is_singular() {
        return Err(Error::InvalidParameter(format!(
            "singular system (pivot ratio {:e})",
            lu.pivot_ratio()
        )));
    }
    lu.solve(b)
}

/// All eigenvalues of a square matrix, with multiplicity.
///
/// Householder reduction to upper Hessenberg form followed by single-shift
/// complex QR iterations with Wilkinson shifts. A subdiagonal entry is
/// deflated once `|h[k][k-1]| <= ε (|h[k-1][k-1]| + |h[k][k]|)`, falling back
/// to `ε ‖H‖` when both diagonal entries vanish. An exceptional shift is
/// used after every 10 iterations without deflation; the total number of QR
/// sweeps is capped at `100 · dim`.
pub fn eigenvalues(m: &ComplexMatrix) -> Result<Vec<ComplexScalar>> {
    if !m.is_square() {
        return Err(dim_err("eigenvalues", format!("{:?} is not square", m.shape())));
    }
    let n = m.rows();
    if n > MAX_EIGEN_DIM {
        return Err(dim_err("eigenvalues", format!("dimension {n} exceeds {MAX_EIGEN_DIM}")));
    }
    if !m.is_finite() {
        return Err(Error::InvalidParameter("matrix has non-finite entries".into()));
    }
    let mut h = m.clone();
    hessenberg_in_place(&mut h);
    qr_eigenvalues(h)
}

fn hessenberg_in_place(a: &mut ComplexMatrix) {
    let n = a.rows();
    if n < 3 {
        return;
    }
    for k in 0..n - 2 {
        let mut v: Vec<ComplexScalar> = (k + 1..n).map(|i| a[(i, k)]).collect();
        let xnorm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if xnorm == 0.0 {
            continue;
        }
        let phase = if v[0].norm() == 0.0 {
            c64(1.0, 0.0)
        } else {
            v[0] / v[0].norm()
        };
        // reflect onto -phase * ‖x‖ e₁ to avoid cancellation
        v[0] += phase * xnorm;
        let vnorm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        for z in v.iter_mut() {
            *z /= vnorm;
        }
        // A <- (I - 2vv†) A on rows k+1..n
        for j in 0..n {
            let s: ComplexScalar = v.iter().enumerate().map(|(t, vt)| vt.conj() * a[(k + 1 + t, j)]).sum();
            for (t, vt) in v.iter().enumerate() {
                a[(k + 1 + t, j)] -= *vt * s * 2.0;
            }
        }
        // A <- A (I - 2vv†) on columns k+1..n
        for i in 0..n {
            let s: ComplexScalar = v.iter().enumerate().map(|(t, vt)| a[(i, k + 1 + t)] * vt).sum();
            for (t, vt) in v.iter().enumerate() {
                a[(i, k + 1 + t)] -= s * vt.conj() * 2.0;
            }
        }
        for i in k + 2..n {
            a[(i, k)] = c64(0.0, 0.0);
        }
    }
}

fn qr_eigenvalues(mut h: ComplexMatrix) -> Result<Vec<ComplexScalar>> {
    let n = h.rows();
    let mut eig = vec![c64(0.0, 0.0); n];
    if n == 0 {
        return Ok(eig);
    }
    let eps = f64::EPSILON;
    let hnorm = h.max_norm();
    let cap = 100 * n;
    let mut total = 0usize;
    let mut since_deflation = 0usize;
    let mut hi = n - 1;
    loop {
        if hi == 0 {
            eig[0] = h[(0, 0)];
            break;
        }
        // locate the start of the trailing unreduced block
        let mut lo = hi;
        while lo > 0 {
            let scale = h[(lo - 1, lo - 1)].norm() + h[(lo, lo)].norm();
            let scale = if scale == 0.0 { hnorm } else { scale };
            if h[(lo, lo - 1)].norm() <= eps * scale {
                h[(lo, lo - 1)] = c64(0.0, 0.0);
                break;
            }
            lo -= 1;
        }
        if lo == hi {
            eig[hi] = h[(hi, hi)];
            hi -= 1;
            since_deflation = 0;
            continue;
        }
        total += 1;
        since_deflation += 1;
        if total > cap {
            return Err(Error::NoConvergence { iterations: cap });
        }
        let mu = if since_deflation.is_multiple_of(10) {
            h[(hi, hi)] + c64(h[(hi, hi - 1)].norm() * 0.75, h[(hi, hi - 1)].norm() * 0.4375)
        } else {
            wilkinson_shift(h[(hi - 1, hi - 1)], h[(hi - 1, hi)], h[(hi, hi - 1)], h[(hi, hi)])
        };
        qr_sweep(&mut h, lo, hi, mu);
    }
    Ok(eig)
}

/// Eigenvalue of the trailing 2x2 block closest to its last diagonal entry.
fn wilkinson_shift(a: ComplexScalar, b: ComplexScalar, c: ComplexScalar, d: ComplexScalar) -> ComplexScalar {
    let half = (a - d) * 0.5;
    let disc = (half * half + b * c).sqrt();
    let mean = (a + d) * 0.5;
    let (l1, l2) = (mean + disc, mean - disc);
    if (l1 - d).norm() <= (l2 - d).norm() {
        l1
    } else {
        l2
    }
}

/// One shifted QR step `H - μI = QR, H <- RQ + μI` on the active block.
fn qr_sweep(h: &mut ComplexMatrix, lo: usize, hi: usize, mu: ComplexScalar) {
    for k in lo..=hi {
        h[(k, k)] -= mu;
    }
    let mut rots: Vec<(ComplexScalar, ComplexScalar)> = Vec::with_capacity(hi - lo);
    for k in lo..hi {
        let f = h[(k, k)];
        let g = h[(k + 1, k)];
        let r = (f.norm_sqr() + g.norm_sqr()).sqrt();
        let (c, s) = if r == 0.0 {
            (c64(1.0, 0.0), c64(0.0, 0.0))
        } else {
            (f / r, g / r)
        };
        // rows k, k+1 <- [[c̄, s̄], [-s, c]] rows
        for j in k..=hi {
            let x = h[(k, j)];
            let y = h[(k + 1, j)];
            h[(k, j)] = c.conj() * x + s.conj() * y;
            h[(k + 1, j)] = -s * x + c * y;
        }
        rots.push((c, s));
    }
    for (t, &(c, s)) in rots.iter().enumerate() {
        let k = lo + t;
        // columns k, k+1 <- times [[c, -s̄], [s, c̄]]
        for i in lo..=(k + 2).min(hi) {
            let x = h[(i, k)];
            let y = h[(i, k + 1)];
            h[(i, k)] = x * c + y * s;
            h[(i, k + 1)] = -x * s.conj() + y * c.conj();
        }
    }
    for k in lo..=hi {
        h[(k, k)] += mu;
    }
}

/// `‖Mv - λv‖ / ‖M‖` for an eigenvector recovered by inverse iteration; a
/// check on the output of [`eigenvalues`].
pub fn eigen_residual(m: &ComplexMatrix, lambda: ComplexScalar) -> f64 {
    let n = m.rows();
    let mnorm = m.max_norm().max(f64::MIN_POSITIVE);
    let shift = lambda + Complex64::new(1e-10 * mnorm, 1e-10 * mnorm);
    let shifted = ComplexMatrix::from_fn(n, n, |i, j| if i == j { m[(i, j)] - shift } else { m[(i, j)] });
    let lu = match Lu::factor(&shifted) {
        Ok(lu) => lu,
        Err(_) => return f64::INFINITY,
    };
    let mut v = ComplexMatrix::from_fn(n, 1, |i, _| c64(1.0, 0.1 * i as f64));
    for _ in 0..3 {
        v = match lu.solve(&v) {
            Ok(w) => w,
            Err(_) => return f64::INFINITY,
        };
        let norm = (0..n).map(|i| v[(i, 0)].norm_sqr()).sum::<f64>().sqrt();
        if !(norm.is_finite() && norm > 0.0) {
            return 0.0;
        }
        v = v.scale_re(1.0 / norm);
    }
    let mv = m * &v;
    let r = (0..n)
        .map(|i| (mv[(i, 0)] - lambda * v[(i, 0)]).norm_sqr())
        .sum::<f64>()
        .sqrt();
    r / mnorm
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dup::{gaussian_matrix, seeded_rng};

    fn sorted(mut v: Vec<ComplexScalar>) -> Vec<ComplexScalar> {
        v.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
        v
    }

    /// Roots of the characteristic polynomial of a 2x2 matrix.
    fn char_roots_2x2(m: &ComplexMatrix) -> Vec<ComplexScalar> {
        let tr = m[(0, 0)] + m[(1, 1)];
        let det = m[(0, 0)] * m[(1, 1)] - m[(0, 1)] * m[(1, 0)];
        let disc = (tr * tr - det * 4.0).sqrt();
        vec![(tr + disc) * 0.5, (tr - disc) * 0.5]
    }

    /// det(M - λI) via LU, compared against ‖M‖^n.
    fn char_poly_rel(m: &ComplexMatrix, lambda: ComplexScalar) -> f64 {
        let n = m.rows();
        let shifted = ComplexMatrix::from_fn(n, n, |i, j| if i == j { m[(i, j)] - lambda } else { m[(i, j)] });
        let det = Lu::factor(&shifted).unwrap().determinant();
        det.norm() / m.max_norm().max(1.0).powi(n as i32)
    }

    #[test]
    fn diagonal_and_rotation() {
        let d = ComplexMatrix::diag(&[c64(-1.5, 0.0), c64(-1.5, 0.0)]);
        assert_eq!(eigenvalues(&d).unwrap(), vec![c64(-1.5, 0.0); 2]);
        let r = ComplexMatrix::from_real_rows(&[[0.0, 1.0], [-1.0, 0.0]]).unwrap();
        let ev = sorted(eigenvalues(&r).unwrap());
        let expected = sorted(char_roots_2x2(&r));
        assert!((ev[0] - c64(0.0, -1.0)).norm() < 1e-12);
        assert!((ev[1] - c64(0.0, 1.0)).norm() < 1e-12);
        for (a, b) in ev.iter().zip(&expected) {
            assert!((a - b).norm() < 1e-12);
        }
    }

    #[test]
    fn upper_triangular_gives_diagonal() {
        let mut rng = seeded_rng(21);
        let mut m = gaussian_matrix(4, 4, &mut rng);
        for i in 0..4 {
            for j in 0..i {
                m[(i, j)] = c64(0.0, 0.0);
            }
        }
        let ev = sorted(eigenvalues(&m).unwrap());
        let diag = sorted((0..4).map(|i| m[(i, i)]).collect());
        for (a, b) in ev.iter().zip(&diag) {
            assert!((a - b).norm() < 1e-12);
        }
    }

    #[test]
    fn random_2x2_match_closed_form() {
        let mut rng = seeded_rng(2);
        for _ in 0..50 {
            let m = gaussian_matrix(2, 2, &mut rng);
            let ev = sorted(eigenvalues(&m).unwrap());
            let roots = sorted(char_roots_2x2(&m));
            for (a, b) in ev.iter().zip(&roots) {
                assert!((a - b).norm() < 1e-10, "{a} vs {b}");
            }
        }
    }

    #[test]
    fn small_matrices_are_characteristic_roots() {
        let mut rng = seeded_rng(33);
        for n in 3..=4 {
            for _ in 0..30 {
                let m = gaussian_matrix(n, n, &mut rng);
                for l in eigenvalues(&m).unwrap() {
                    assert!(char_poly_rel(&m, l) < 1e-10);
                }
            }
        }
    }

    #[test]
    fn residuals_on_larger_matrices() {
        let mut rng = seeded_rng(77);
        for n in [5, 8, 16, 32] {
            let m = gaussian_matrix(n, n, &mut rng);
            let ev = eigenvalues(&m).unwrap();
            assert_eq!(ev.len(), n);
            let tr: ComplexScalar = ev.iter().sum();
            assert!((tr - m.trace()).norm() < 1e-9 * n as f64);
            for l in ev {
                assert!(eigen_residual(&m, l) <= 1e-8);
            }
        }
    }

    #[test]
    fn jordan_block_converges() {
        let m = ComplexMatrix::from_real_rows(&[[2.0, 1.0, 0.0], [0.0, 2.0, 1.0], [0.0, 0.0, 2.0]]).unwrap();
        for l in eigenvalues(&m).unwrap() {
            assert!((l - c64(2.0, 0.0)).norm() < 1e-4);
        }
    }

    #[test]
    fn eigen_rejects_bad_input() {
        assert!(eigenvalues(&ComplexMatrix::zeros(2, 3)).is_err());
        assert!(eigenvalues(&ComplexMatrix::zeros(129, 129)).is_err());
        assert!(eigenvalues(&ComplexMatrix::zeros(0, 0)).unwrap().is_empty());
    }

    #[test]
    fn lu_solves_and_detects_singularity() {
        let mut rng = seeded_rng(4);
        let a = gaussian_matrix(5, 5, &mut rng);
        let b = gaussian_matrix(5, 2, &mut rng);
        let x = solve(&a, &b).unwrap();
        assert!((&a * &x).approx_eq(&b, 1e-12));
        let s = ComplexMatrix::from_real_rows(&[[1.0, 2.0], [2.0, 4.0]]).unwrap();
        assert!(solve(&s, &ComplexMatrix::identity(2)).is_err());
        let d = ComplexMatrix::from_real_rows(&[[0.0, 1.0], [1.0, 0.0]]).unwrap();
        assert_eq!(Lu::factor(&d).unwrap().determinant(), c64(-1.0, 0.0));
    }
}
