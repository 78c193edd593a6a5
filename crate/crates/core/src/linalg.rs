//! Dense Hermitian linear algebra.
//!
//! Two independent eigen-solvers:
//!
//! - [`hermitian_eigs`]: cyclic Jacobi with complex rotations, returning
//!   eigenvalues and a unitary eigenvector matrix.
//! - [`hermitian_eigenvalues`]: Householder reduction to real symmetric
//!   tridiagonal form followed by implicit QL, eigenvalues only. This is the
//!   route used inside the Monte Carlo loops.

use ndarray::Array2;
use num_complex::Complex64;

use crate::error::{domain, Error, Result};

pub type CMatrix = Array2<Complex64>;

/// Relative tolerance for the Hermitian input check.
pub const HERMITIAN_TOL: f64 = 1e-10;

const MAX_SWEEPS: usize = 64;

/// Eigenvalues sorted in decreasing order with matching eigenvector columns.
#[derive(Debug, Clone)]
pub struct HermitianEigen {
    pub values: Vec<f64>,
    pub vectors: CMatrix,
}

pub fn identity(n: usize) -> CMatrix {
    Array2::from_diag_elem(n, Complex64::new(1.0, 0.0))
}

pub fn from_real_diagonal(diag: &[f64]) -> CMatrix {
    let mut m = CMatrix::zeros((diag.len(), diag.len()));
    for (i, &d) in diag.iter().enumerate() {
        m[[i, i]] = Complex64::new(d, 0.0);
    }
    m
}

pub fn frobenius_norm(a: &CMatrix) -> f64 {
    a.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

pub fn conj_transpose(a: &CMatrix) -> CMatrix {
    a.t().mapv(|z| z.conj())
}

pub fn trace(a: &CMatrix) -> Complex64 {
    a.diag().iter().sum()
}

/// Checks that `a` is square and Hermitian within `HERMITIAN_TOL · ‖a‖_F`.
pub fn check_hermitian(a: &CMatrix) -> Result<()> {
    let (r, c) = a.dim();
    if r != c {
        return Err(domain(format!("matrix is {r}x{c}, expected square")));
    }
    let scale = frobenius_norm(a).max(f64::MIN_POSITIVE);
    if !scale.is_finite() {
        return Err(domain("matrix has non-finite entries"));
    }
    let mut worst = 0.0f64;
    for i in 0..r {
        for j in i..r {
            worst = worst.max((a[[i, j]] - a[[j, i]].conj()).norm());
        }
    }
    if worst > HERMITIAN_TOL * scale {
        return Err(domain(format!(
            "matrix is not Hermitian: max |A - A^H| = {worst:e}"
        )));
    }
    Ok(())
}

fn to_row_major_hermitian(a: &CMatrix) -> Vec<Complex64> {
    let n = a.nrows();
    let mut m = vec![Complex64::new(0.0, 0.0); n * n];
    for i in 0..n {
        for j in 0..n {
            m[i * n + j] = if i == j {
                Complex64::new(a[[i, i]].re, 0.0)
            } else {
                0.5 * (a[[i, j]] + a[[j, i]].conj())
            };
        }
    }
    m
}

/// Eigen-decomposition of a Hermitian matrix by cyclic complex Jacobi rotations.
pub fn hermitian_eigs(a: &CMatrix) -> Result<HermitianEigen> {
    check_hermitian(a)?;
    let n = a.nrows();
    let mut m = to_row_major_hermitian(a);
    let mut v = vec![Complex64::new(0.0, 0.0); n * n];
    for i in 0..n {
        v[i * n + i] = Complex64::new(1.0, 0.0);
    }
    let frob = frobenius_norm(a);

    let off_norm = |m: &[Complex64]| -> f64 {
        let mut s = 0.0;
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    s += m[i * n + j].norm_sqr();
                }
            }
        }
        s.sqrt()
    };

    let skip = 1e-17 * frob;
    let mut converged = frob == 0.0;
    for _ in 0..MAX_SWEEPS {
        if converged || off_norm(&m) <= 1e-14 * frob {
            converged = true;
            break;
        }
        let mut rotated = false;
        for p in 0..n {
            for q in p + 1..n {
                let b = m[p * n + q];
                let ab = b.norm();
                if ab <= skip {
                    continue;
                }
                rotated = true;
                let e = b / ab;
                let app = m[p * n + p].re;
                let aqq = m[q * n + q].re;
                let theta = (aqq - app) / (2.0 * ab);
                let t = if theta.abs() > 1e150 {
                    0.5 / theta
                } else {
                    theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                let se = e.conj() * s; // s e^{-iφ}
                let ce = e.conj() * c; // c e^{-iφ}

                // M <- M G, V <- V G
                for k in 0..n {
                    let x = m[k * n + p];
                    let y = m[k * n + q];
                    m[k * n + p] = x * c - se * y;
                    m[k * n + q] = x * s + ce * y;
                    let x = v[k * n + p];
                    let y = v[k * n + q];
                    v[k * n + p] = x * c - se * y;
                    v[k * n + q] = x * s + ce * y;
                }
                // M <- G^H M
                for k in 0..n {
                    let x = m[p * n + k];
                    let y = m[q * n + k];
                    m[p * n + k] = x * c - se.conj() * y;
                    m[q * n + k] = x * s + ce.conj() * y;
                }
                m[p * n + q] = Complex64::new(0.0, 0.0);
                m[q * n + p] = Complex64::new(0.0, 0.0);
                m[p * n + p] = Complex64::new(app - t * ab, 0.0);
                m[q * n + q] = Complex64::new(aqq + t * ab, 0.0);
            }
        }
        if !rotated {
            converged = true;
            break;
        }
    }
    if !converged && off_norm(&m) > 1e-10 * frob {
        return Err(Error::Numeric(format!(
            "Jacobi did not converge in {MAX_SWEEPS} sweeps (n = {n})"
        )));
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| m[j * n + j].re.total_cmp(&m[i * n + i].re));
    let values = order.iter().map(|&i| m[i * n + i].re).collect();
    let mut vectors = CMatrix::zeros((n, n));
    for (col, &src) in order.iter().enumerate() {
        for row in 0..n {
            vectors[[row, col]] = v[row * n + src];
        }
    }
    Ok(HermitianEigen { values, vectors })
}

/// Eigenvalues of a Hermitian matrix, decreasing, via Householder
/// tridiagonalization and implicit QL.
pub fn hermitian_eigenvalues(a: &CMatrix) -> Result<Vec<f64>> {
    check_hermitian(a)?;
    let n = a.nrows();
    if n == 0 {
        return Ok(Vec::new());
    }
    let mut m = to_row_major_hermitian(a);
    let mut d = vec![0.0; n];
    let mut e = vec![0.0; n];
    let zero = Complex64::new(0.0, 0.0);

    let mut v = vec![zero; n];
    let mut p = vec![zero; n];
    for k in 0..n.saturating_sub(2) {
        d[k] = m[k * n + k].re;
        let r = n - k - 1;
        let norm = (k + 1..n).map(|i| m[i * n + k].norm_sqr()).sum::<f64>().sqrt();
        if norm == 0.0 {
            e[k] = 0.0;
            continue;
        }
        let x0 = m[(k + 1) * n + k];
        let phase = if x0.norm() > 0.0 { x0 / x0.norm() } else { Complex64::new(1.0, 0.0) };
        let alpha = -phase * norm;
        let v = &mut v[..r];
        for (j, vj) in v.iter_mut().enumerate() {
            *vj = m[(k + 1 + j) * n + k];
        }
        v[0] -= alpha;
        let vnorm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        for vj in v.iter_mut() {
            *vj /= vnorm;
        }
        // p = S v, K = v^H p, w = p - K v, S <- S - 2 (v w^H + w v^H)
        let p = &mut p[..r];
        for i in 0..r {
            let row = (k + 1 + i) * n + k + 1;
            p[i] = m[row..row + r].iter().zip(v.iter()).map(|(s, vj)| s * vj).sum();
        }
        let kk: f64 = v.iter().zip(p.iter()).map(|(vi, pi)| (vi.conj() * pi).re).sum();
        for i in 0..r {
            p[i] -= v[i] * kk;
        }
        for i in 0..r {
            let row = (k + 1 + i) * n + k + 1;
            let (vi, wi) = (v[i], p[i]);
            for j in 0..r {
                m[row + j] -= 2.0 * (vi * p[j].conj() + wi * v[j].conj());
            }
        }
        e[k] = norm;
    }
    if n >= 2 {
        d[n - 2] = m[(n - 2) * n + n - 2].re;
        e[n - 2] = m[(n - 1) * n + n - 2].norm();
    }
    d[n - 1] = m[(n - 1) * n + n - 1].re;
    e[n - 1] = 0.0;

    tridiagonal_ql(&mut d, &mut e)?;
    d.sort_by(|a, b| b.total_cmp(a));
    Ok(d)
}

/// Implicit QL with Wilkinson shifts on a real symmetric tridiagonal matrix
/// (diagonal `d`, sub-diagonal `e[0..n-1]`). Eigenvalues are left in `d`.
fn tridiagonal_ql(d: &mut [f64], e: &mut [f64]) -> Result<()> {
    let n = d.len();
    for l in 0..n {
        let mut iter = 0;
        loop {
            let mut mm = l;
            while mm + 1 < n {
                let dd = d[mm].abs() + d[mm + 1].abs();
                if e[mm].abs() <= f64::EPSILON * dd {
                    break;
                }
                mm += 1;
            }
            if mm == l {
                break;
            }
            iter += 1;
            if iter > 60 {
                return Err(Error::Numeric("tridiagonal QL did not converge".into()));
            }
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = g.hypot(1.0);
            g = d[mm] - d[l] + e[l] / (g + r.copysign(g));
            let (mut s, mut c, mut p) = (1.0f64, 1.0f64, 0.0f64);
            let mut underflow = false;
            for i in (l..mm).rev() {
                let f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == 0.0 {
                    d[i + 1] -= p;
                    e[mm] = 0.0;
                    underflow = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
            }
            if underflow {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[mm] = 0.0;
        }
    }
    Ok(())
}

/// Hermitian positive semi-definite square root `V diag(√λ) V^H`.
///
/// Eigenvalues down to `-1e-10 · tr(A)` are treated as rounding noise and
/// clamped to zero; anything more negative is an error.
pub fn hermitian_sqrt(a: &CMatrix) -> Result<CMatrix> {
    let eig = hermitian_eigs(a)?;
    let tr = trace(a).re.abs();
    let floor = -1e-10 * tr.max(f64::MIN_POSITIVE);
    let n = a.nrows();
    let mut roots = Vec::with_capacity(n);
    for &l in &eig.values {
        if l < floor {
            return Err(domain(format!("matrix is not positive semi-definite (eigenvalue {l:e})")));
        }
        roots.push(l.max(0.0).sqrt());
    }
    let mut scaled = eig.vectors.clone();
    for (j, r) in roots.iter().enumerate() {
        scaled.column_mut(j).mapv_inplace(|z| z * r);
    }
    Ok(scaled.dot(&conj_transpose(&eig.vectors)))
}

/// `H H^H` when `H` has no more rows than columns, otherwise `H^H H`; either
/// way the nonzero eigenvalues are those of `H H^H`.
pub fn gram_smaller(h: &CMatrix) -> CMatrix {
    let (r, c) = h.dim();
    if r <= c {
        gram_rows(h)
    } else {
        gram_rows(&conj_transpose(h))
    }
}

/// `H H^H`, filled from its upper triangle.
pub fn gram_rows(h: &CMatrix) -> CMatrix {
    let r = h.nrows();
    let mut g = CMatrix::zeros((r, r));
    for i in 0..r {
        let hi = h.row(i);
        for j in i..r {
            let hj = h.row(j);
            let s: Complex64 = hi.iter().zip(hj.iter()).map(|(a, b)| a * b.conj()).sum();
            g[[i, j]] = s;
            g[[j, i]] = s.conj();
        }
        g[[i, i]].im = 0.0;
    }
    g
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn random_hermitian(n: usize, seed: u64) -> CMatrix {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut a = CMatrix::zeros((n, n));
        for i in 0..n {
            a[[i, i]] = c(rng.random_range(-1.0..1.0), 0.0);
            for j in i + 1..n {
                let z = c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
                a[[i, j]] = z;
                a[[j, i]] = z.conj();
            }
        }
        a
    }

    #[test]
    fn diagonal_sorted() {
        let a = from_real_diagonal(&[3.0, 1.0, 2.0]);
        let e = hermitian_eigs(&a).unwrap();
        assert_eq!(e.values, vec![3.0, 2.0, 1.0]);
        assert_eq!(hermitian_eigenvalues(&a).unwrap(), vec![3.0, 2.0, 1.0]);
    }

    #[test]
    fn pauli_x() {
        let mut a = CMatrix::zeros((2, 2));
        a[[0, 1]] = c(1.0, 0.0);
        a[[1, 0]] = c(1.0, 0.0);
        let e = hermitian_eigs(&a).unwrap();
        assert!((e.values[0] - 1.0).abs() < 1e-15 && (e.values[1] + 1.0).abs() < 1e-15);
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let v0 = e.vectors.column(0);
        // (1, 1)/√2 up to a phase
        assert!((v0[0].norm() - s).abs() < 1e-14 && (v0[0] - v0[1]).norm() < 1e-14);
        let v1 = e.vectors.column(1);
        assert!((v1[0] + v1[1]).norm() < 1e-14);
    }

    #[test]
    fn random_reconstruction_and_unitarity() {
        let a = random_hermitian(50, 7);
        let e = hermitian_eigs(&a).unwrap();
        let norm = frobenius_norm(&a);
        let lam = from_real_diagonal(&e.values);
        let rec = e.vectors.dot(&lam).dot(&conj_transpose(&e.vectors));
        assert!(frobenius_norm(&(&rec - &a)) <= 1e-9 * norm);
        let vhv = conj_transpose(&e.vectors).dot(&e.vectors);
        assert!(frobenius_norm(&(&vhv - &identity(50))) <= 1e-9);
        for w in e.values.windows(2) {
            assert!(w[0] >= w[1]);
        }
        for i in 0..50 {
            let v = e.vectors.column(i);
            let av = a.dot(&v);
            let res: f64 = av.iter().zip(v.iter()).map(|(x, y)| (x - y * e.values[i]).norm_sqr()).sum::<f64>().sqrt();
            assert!(res <= 1e-9 * norm);
        }
    }

    #[test]
    fn solvers_agree() {
        for (n, seed) in [(1, 1), (2, 2), (3, 3), (17, 4), (64, 5), (120, 6)] {
            let a = random_hermitian(n, seed);
            let j = hermitian_eigs(&a).unwrap().values;
            let t = hermitian_eigenvalues(&a).unwrap();
            let scale = frobenius_norm(&a);
            for (x, y) in j.iter().zip(&t) {
                assert!((x - y).abs() <= 1e-11 * scale, "n = {n}: {x} vs {y}");
            }
        }
    }

    #[test]
    fn rejects_non_hermitian() {
        let mut a = CMatrix::zeros((2, 2));
        a[[0, 1]] = c(1.0, 0.0);
        assert!(hermitian_eigs(&a).is_err());
        assert!(hermitian_eigenvalues(&a).is_err());
        assert!(hermitian_eigs(&CMatrix::zeros((2, 3))).is_err());
    }

    #[test]
    fn sqrt_squares_back() {
        let b = random_hermitian(20, 9);
        let a = b.dot(&b); // PSD
        let s = hermitian_sqrt(&a).unwrap();
        let back = s.dot(&conj_transpose(&s));
        assert!(frobenius_norm(&(&back - &a)) <= 1e-9 * trace(&a).re);
        assert!(hermitian_sqrt(&from_real_diagonal(&[1.0, -1.0])).is_err());
        let id = hermitian_sqrt(&identity(4)).unwrap();
        assert!(frobenius_norm(&(&id - &identity(4))) < 1e-15);
    }

    #[test]
    fn gram_shapes() {
        let mut h = CMatrix::zeros((2, 3));
        h[[0, 0]] = c(1.0, 1.0);
        h[[1, 2]] = c(0.0, 2.0);
        let g = gram_smaller(&h);
        assert_eq!(g.dim(), (2, 2));
        assert_eq!(g[[0, 0]], c(2.0, 0.0));
        assert_eq!(g[[1, 1]], c(4.0, 0.0));
        let gt = gram_smaller(&conj_transpose(&h));
        assert_eq!(gt.dim(), (2, 2));
    }
}
