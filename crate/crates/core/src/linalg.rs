//! Dense Hermitian eigenvalues: Householder reduction to a real symmetric
//! tridiagonal matrix (nalgebra) followed by implicit QL with Wilkinson shifts
//! under a fixed iteration budget.

use std::io::Write;
use std::path::PathBuf;

use nalgebra::linalg::SymmetricTridiagonal;
use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;

use crate::error::{Error, Result};

/// QL iterations allowed per eigenvalue before giving up.
pub const QL_ITERATIONS_PER_EIGENVALUE: usize = 30;

/// Eigenvalues of the symmetric tridiagonal matrix with diagonal `diag` and
/// off-diagonal `off` (`off[i]` couples `i` and `i + 1`). Overwrites `diag`
/// with the unsorted eigenvalues. Returns the number of iterations used, or
/// `Err(iterations)` when an eigenvalue exhausted its budget.
pub fn tridiagonal_ql(diag: &mut [f64], off: &[f64]) -> std::result::Result<usize, usize> {
    let n = diag.len();
    if n == 0 {
        return Ok(0);
    }
    let mut e = vec![0.0; n];
    e[..n - 1].copy_from_slice(&off[..n - 1]);
    let d = diag;
    let mut total = 0usize;

    for l in 0..n {
        let mut iter = 0;
        loop {
            let mut m = l;
            while m < n - 1 {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= f64::EPSILON * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iter += 1;
            total += 1;
            if iter > QL_ITERATIONS_PER_EIGENVALUE {
                return Err(total);
            }
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = g.hypot(1.0);
            g = d[m] - d[l] + e[l] / (g + r.copysign(g));
            let (mut s, mut c, mut p) = (1.0, 1.0, 0.0);
            let mut underflow = false;
            let mut i = m;
            while i > l {
                i -= 1;
                let f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == 0.0 {
                    d[i + 1] -= p;
                    e[m] = 0.0;
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
            e[m] = 0.0;
        }
    }
    Ok(total)
}

/// Ascending eigenvalues of a real symmetric tridiagonal matrix.
pub fn symmetric_tridiagonal_eigenvalues(diag: &[f64], off: &[f64]) -> Option<Vec<f64>> {
    let mut d = diag.to_vec();
    tridiagonal_ql(&mut d, off).ok()?;
    d.sort_by(f64::total_cmp);
    Some(d)
}

/// Ascending eigenvalues of a dense Hermitian matrix. Only the lower triangle
/// is read. On non-convergence the matrix is dumped as CSV to the system temp
/// directory and the path is reported in the error.
pub fn hermitian_eigenvalues(m: &DMatrix<Complex64>) -> Result<Vec<f64>> {
    let n = m.nrows();
    assert_eq!(n, m.ncols(), "eigenvalues of a non-square matrix");
    if n == 0 {
        return Ok(Vec::new());
    }
    let scale = m.iter().map(|z| z.norm()).fold(0.0, f64::max);
    if scale == 0.0 {
        return Ok(vec![0.0; n]);
    }
    let real = m.iter().all(|z| z.im == 0.0);
    let (mut diag, off) = if n == 1 {
        (vec![m[(0, 0)].re / scale], Vec::new())
    } else if real {
        // real symmetric input: a quarter of the complex work
        let (d, o) = SymmetricTridiagonal::new(m.map(|z| z.re / scale)).unpack_tridiagonal();
        (d.as_slice().to_vec(), o.as_slice().to_vec())
    } else {
        let (d, o) = SymmetricTridiagonal::new(m.map(|z| z / scale)).unpack_tridiagonal();
        (d.as_slice().to_vec(), o.as_slice().to_vec())
    };
    match tridiagonal_ql(&mut diag, &off) {
        Ok(_) => {
            let mut vals: Vec<f64> = diag.into_iter().map(|v| v * scale).collect();
            vals.sort_by(f64::total_cmp);
            Ok(vals)
        }
        Err(_) => Err(Error::NoConvergence {
            sweeps: QL_ITERATIONS_PER_EIGENVALUE * n,
            dim: n,
            dump: dump_matrix(m)?,
        }),
    }
}

/// Eigenvalues (ascending) and matching unit eigenvectors as columns.
pub fn hermitian_eigen(m: &DMatrix<Complex64>) -> Result<(Vec<f64>, DMatrix<Complex64>)> {
    let n = m.nrows();
    let max_iter = QL_ITERATIONS_PER_EIGENVALUE * n.max(1);
    let eig = SymmetricEigen::try_new(m.clone(), f64::EPSILON, max_iter).ok_or_else(|| {
        match dump_matrix(m) {
            Ok(dump) => Error::NoConvergence {
                sweeps: max_iter,
                dim: n,
                dump,
            },
            Err(e) => e,
        }
    })?;
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = DMatrix::from_fn(n, n, |r, c| eig.eigenvectors[(r, order[c])]);
    Ok((values, vectors))
}

/// Largest singular value of a real matrix.
pub fn spectral_norm(m: &DMatrix<f64>) -> f64 {
    m.clone()
        .svd(false, false)
        .singular_values
        .iter()
        .fold(0.0, |a: f64, &b| a.max(b))
}

/// Writes `(row, col, re, im)` rows for every entry.
pub fn write_matrix_csv(m: &DMatrix<Complex64>, mut out: impl Write) -> std::io::Result<()> {
    writeln!(out, "row,col,re,im")?;
    for r in 0..m.nrows() {
        for c in 0..m.ncols() {
            let z = m[(r, c)];
            writeln!(out, "{r},{c},{:e},{:e}", z.re, z.im)?;
        }
    }
    Ok(())
}

fn dump_matrix(m: &DMatrix<Complex64>) -> Result<PathBuf> {
    let path = std::env::temp_dir().join(format!(
        "channel-spectra-nonconvergent-{}x{}-{}.csv",
        m.nrows(),
        m.ncols(),
        std::process::id()
    ));
    let file = std::fs::File::create(&path)?;
    write_matrix_csv(m, std::io::BufWriter::new(file))?;
    Ok(path)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tridiagonal_matches_known_spectrum() {
        // 1D Dirichlet Laplacian: 2 - 2 cos(k pi / (n + 1))
        let n = 50;
        let vals = symmetric_tridiagonal_eigenvalues(&vec![2.0; n], &vec![-1.0; n - 1]).unwrap();
        for (k, v) in vals.iter().enumerate() {
            let exact = 2.0 - 2.0 * ((k + 1) as f64 * std::f64::consts::PI / (n + 1) as f64).cos();
            assert!((v - exact).abs() < 1e-13);
        }
    }

    #[test]
    fn hermitian_agrees_with_nalgebra() {
        let n = 24;
        let m = DMatrix::from_fn(n, n, |r, c| {
            let (a, b) = (r.min(c) as f64, r.max(c) as f64);
            let re = ((a + 1.0) * (b + 2.0)).sin();
            let im = if r == c { 0.0 } else { ((a + 3.0) * b).cos() * if r > c { 1.0 } else { -1.0 } };
            Complex64::new(re, im)
        });
        let ours = hermitian_eigenvalues(&m).unwrap();
        let (theirs, vecs) = hermitian_eigen(&m).unwrap();
        for (a, b) in ours.iter().zip(&theirs) {
            assert!((a - b).abs() < 1e-12, "{a} vs {b}");
        }
        let re = m.map(|z| Complex64::new(z.re, 0.0));
        let ours = hermitian_eigenvalues(&re).unwrap();
        let real = nalgebra::SymmetricEigen::new(m.map(|z| z.re)).eigenvalues;
        let mut real: Vec<f64> = real.iter().copied().collect();
        real.sort_by(f64::total_cmp);
        for (a, b) in ours.iter().zip(&real) {
            assert!((a - b).abs() < 1e-12, "{a} vs {b}");
        }
        let resid = &m * vecs.column(3) - vecs.column(3) * Complex64::new(theirs[3], 0.0);
        assert!(resid.norm() < 1e-12);
    }

    #[test]
    fn diagonal_and_trivial_inputs() {
        let m = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![
            Complex64::new(3.0, 0.0),
            Complex64::new(-1.0, 0.0),
            Complex64::new(2.0, 0.0),
        ]));
        assert_eq!(hermitian_eigenvalues(&m).unwrap(), vec![-1.0, 2.0, 3.0]);
        assert_eq!(hermitian_eigenvalues(&DMatrix::zeros(2, 2)).unwrap(), vec![0.0, 0.0]);
        let one = DMatrix::from_element(1, 1, Complex64::new(4.5, 0.0));
        assert_eq!(hermitian_eigenvalues(&one).unwrap(), vec![4.5]);
    }

    #[test]
    fn spectral_norm_of_rank_one() {
        let m = DMatrix::from_fn(3, 4, |r, c| (r + 1) as f64 * (c + 1) as f64);
        let expected = (14.0f64).sqrt() * (30.0f64).sqrt();
        assert!((spectral_norm(&m) - expected).abs() < 1e-12);
    }
}
