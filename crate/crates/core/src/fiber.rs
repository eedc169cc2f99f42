//! Truncated matrix of the Bloch fiber `H(θ)` in the Fourier × Hermite basis
//! `e^{i(m+θ)x} φ_n(√α y)`.
//!
//! Rows are ordered `row = (m - m_lo) N + n`. On this basis `-i∂_x` acts as
//! multiplication by `p = m + θ`, so the entries are
//!
//! ```text
//! <n,m|H|n,m>     = α(2n+1) + p² + c^{(n,n)}_0
//! <n+1,m|H|n,m>   = B sqrt(2(n+1)/α) p
//! <n',m'|H|n,m>   = c^{(n',n)}_{m'-m}          (other pairs)
//! ```

use std::io::Write;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::Serialize;

use crate::basis::ProjectedPotential;
use crate::error::{Error, Result};
use crate::linalg::{hermitian_eigenvalues, write_matrix_csv};
use crate::model::ChannelParams;

#[derive(Clone, Debug)]
pub struct FiberMatrix {
    theta: f64,
    n_hermite: usize,
    m_lo: i64,
    m_hi: i64,
    entries: DMatrix<Complex64>,
}

impl FiberMatrix {
    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn n_hermite(&self) -> usize {
        self.n_hermite
    }

    /// Inclusive Fourier window `(m_lo, m_hi)`.
    pub fn fourier_window(&self) -> (i64, i64) {
        (self.m_lo, self.m_hi)
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn entries(&self) -> &DMatrix<Complex64> {
        &self.entries
    }

    pub fn entry(&self, (n, m): (usize, i64), (n2, m2): (usize, i64)) -> Complex64 {
        self.entries[(self.index(n, m), self.index(n2, m2))]
    }

    /// Row of the basis function `(n, m)`.
    pub fn index(&self, n: usize, m: i64) -> usize {
        assert!(n < self.n_hermite && (self.m_lo..=self.m_hi).contains(&m), "({n},{m}) outside the truncation");
        (m - self.m_lo) as usize * self.n_hermite + n
    }

    /// Inverse of [`FiberMatrix::index`].
    pub fn label(&self, row: usize) -> (usize, i64) {
        (row % self.n_hermite, self.m_lo + (row / self.n_hermite) as i64)
    }

    /// The `N x N` diagonal block of Fourier mode `m`.
    pub fn block(&self, m: i64) -> DMatrix<Complex64> {
        let start = self.index(0, m);
        self.entries
            .view((start, start), (self.n_hermite, self.n_hermite))
            .into_owned()
    }

    /// `max |H_ij - conj(H_ji)|`.
    pub fn hermiticity_defect(&self) -> f64 {
        let n = self.dim();
        let mut worst = 0.0f64;
        for i in 0..n {
            for j in 0..=i {
                worst = worst.max((self.entries[(i, j)] - self.entries[(j, i)].conj()).norm());
            }
        }
        worst
    }

    /// No coupling between different Fourier modes (x-independent potential).
    pub fn is_block_diagonal(&self) -> bool {
        let nh = self.n_hermite;
        let dim = self.dim();
        (0..dim).all(|i| {
            let block = i / nh;
            (0..dim)
                .filter(|j| j / nh != block)
                .all(|j| self.entries[(i, j)] == Complex64::default())
        })
    }

    pub fn eigenvalues(&self, count: usize) -> Result<Vec<f64>> {
        eigenvalues_fiber(self, count)
    }

    /// Rows `row,col,re,im`.
    pub fn write_csv(&self, out: impl Write) -> std::io::Result<()> {
        write_matrix_csv(&self.entries, out)
    }
}

/// Fiber matrix on the symmetric window `m = -M..=M`, `|θ| <= 1/2`.
pub fn assemble_fiber(
    params: &ChannelParams,
    proj: &ProjectedPotential,
    theta: f64,
    n_hermite: usize,
    m_fourier: usize,
) -> Result<FiberMatrix> {
    if !(theta.abs() <= 0.5 + 1e-12) {
        return Err(Error::invalid(format!("Bloch parameter {theta} outside [-1/2, 1/2]")));
    }
    let m = m_fourier as i64;
    assemble_fiber_window(params, proj, theta, n_hermite, -m, m)
}

/// Fiber matrix on an arbitrary Fourier window `m_lo..=m_hi`. Any real `θ`
/// is accepted; `(θ - 1, window + 1)` describes the same truncation as
/// `(θ, window)`.
pub fn assemble_fiber_window(
    params: &ChannelParams,
    proj: &ProjectedPotential,
    theta: f64,
    n_hermite: usize,
    m_lo: i64,
    m_hi: i64,
) -> Result<FiberMatrix> {
    if n_hermite == 0 || m_hi < m_lo {
        return Err(Error::invalid("empty truncation"));
    }
    if !theta.is_finite() {
        return Err(Error::invalid("Bloch parameter must be finite"));
    }
    let alpha = params.alpha();
    if (proj.alpha() - alpha).abs() > 1e-12 * alpha {
        return Err(Error::IncompatibleProjection(format!(
            "projection built for alpha = {}, fiber has alpha = {alpha}",
            proj.alpha()
        )));
    }
    if proj.nmax() + 1 < n_hermite {
        return Err(Error::IncompatibleProjection(format!(
            "projection holds {} oscillator indices, fiber needs {n_hermite}",
            proj.nmax() + 1
        )));
    }
    let span = (m_hi - m_lo) as usize;
    if proj.mfourier() < span {
        return Err(Error::IncompatibleProjection(format!(
            "projection cutoff {} below the Fourier window span {span}",
            proj.mfourier()
        )));
    }

    let nh = n_hermite;
    let dim = nh * (span + 1);
    let b = params.b();
    let mut h = DMatrix::<Complex64>::zeros(dim, dim);
    let idx = |n: usize, m: i64| (m - m_lo) as usize * nh + n;

    for m in m_lo..=m_hi {
        let p = m as f64 + theta;
        for n in 0..nh {
            let i = idx(n, m);
            let diag = alpha * (2 * n + 1) as f64 + p * p + proj.coeff(n, n, 0).re;
            h[(i, i)] = Complex64::new(diag, 0.0);
            if n + 1 < nh {
                let c = b * (2.0 * (n + 1) as f64 / alpha).sqrt() * p;
                let j = idx(n + 1, m);
                h[(i, j)] += Complex64::new(c, 0.0);
            }
        }
    }
    // potential couplings: upper triangle, mirrored below
    for m in m_lo..=m_hi {
        for m2 in m..=m_hi {
            let k = m - m2;
            for n in 0..nh {
                let n2_start = if m2 == m { n + 1 } else { 0 };
                for n2 in n2_start..nh {
                    let c = proj.coeff(n, n2, k);
                    if c.norm() != 0.0 {
                        h[(idx(n, m), idx(n2, m2))] += c;
                    }
                }
            }
        }
    }
    for i in 0..dim {
        for j in 0..i {
            h[(i, j)] = h[(j, i)].conj();
        }
    }

    Ok(FiberMatrix {
        theta,
        n_hermite,
        m_lo,
        m_hi,
        entries: h,
    })
}

/// The lowest `count` eigenvalues, ascending.
pub fn eigenvalues_fiber(mat: &FiberMatrix, count: usize) -> Result<Vec<f64>> {
    if count > mat.dim() {
        return Err(Error::invalid(format!(
            "requested {count} eigenvalues of a {}-dimensional fiber",
            mat.dim()
        )));
    }
    let mut vals = if mat.is_block_diagonal() {
        let mut all = Vec::with_capacity(mat.dim());
        for m in mat.m_lo..=mat.m_hi {
            all.extend(hermitian_eigenvalues(&mat.block(m))?);
        }
        all.sort_by(f64::total_cmp);
        all
    } else {
        hermitian_eigenvalues(mat.entries())?
    };
    vals.truncate(count);
    Ok(vals)
}

/// Complex-θ diagnostic of the unperturbed fibers.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ResolventBound {
    pub sup_value: f64,
    pub bound: f64,
    pub pass: bool,
}

/// Unperturbed band function continued to complex momentum,
/// `E_n(z) = α(2n+1) + β z²`.
pub fn unperturbed_band_complex(params: &ChannelParams, n: usize, z: Complex64) -> Complex64 {
    Complex64::new(params.alpha() * (2 * n + 1) as f64, 0.0) + params.beta() * z * z
}

/// `sup 1/|E_n(m + 1/2 + iθ₂) + 1|²` over `n <= n_range`, `|m| <= m_range`,
/// checked against `1 / (β² θ₂²)`.
pub fn complex_theta_resolvent_bound(
    params: &ChannelParams,
    theta2: f64,
    n_range: usize,
    m_range: usize,
) -> Result<ResolventBound> {
    if !(theta2 > 0.0 && theta2.is_finite()) {
        return Err(Error::invalid(format!("imaginary part theta2 must be positive, got {theta2}")));
    }
    let m_range = m_range as i64;
    let mut sup_value = 0.0f64;
    for n in 0..=n_range {
        for m in -m_range..=m_range {
            let z = Complex64::new(m as f64 + 0.5, theta2);
            let e = unperturbed_band_complex(params, n, z) + 1.0;
            sup_value = sup_value.max(1.0 / e.norm_sqr());
        }
    }
    let beta = params.beta();
    let bound = 1.0 / (beta * beta * theta2 * theta2);
    Ok(ResolventBound {
        sup_value,
        bound,
        pass: sup_value <= bound,
    })
}

/// Block of the unperturbed fiber at complex momentum `p` in the un-shifted
/// Hermite basis (complex symmetric, not Hermitian).
pub fn unperturbed_block_complex(params: &ChannelParams, p: Complex64, n_hermite: usize) -> DMatrix<Complex64> {
    let alpha = params.alpha();
    DMatrix::from_fn(n_hermite, n_hermite, |i, j| {
        if i == j {
            alpha * (2 * i + 1) as f64 + p * p
        } else if i + 1 == j || j + 1 == i {
            let n = i.min(j);
            params.b() * (2.0 * (n + 1) as f64 / alpha).sqrt() * p
        } else {
            Complex64::default()
        }
    })
}
