use std::f64::consts::PI;
use std::io::Write;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;

use super::hermite::HermiteBasis;
use crate::error::{Error, Result};
use crate::model::{ChannelParams, PotentialKind, PotentialSpec};

/// Default Fourier cutoff for projections.
pub const DEFAULT_FOURIER_CUTOFF: usize = 16;

/// Relative size of the highest retained harmonic above which a projection
/// is flagged as possibly aliased.
pub const ALIASING_THRESHOLD: f64 = 1e-8;

/// Fourier coefficients of the transverse projections
/// `W_{n,m}(x) = ∫ φ_n(s) φ_m(s) W(x, s/√α) ds`, for `n, m <= nmax` and
/// harmonics `|k| <= mfourier`.
#[derive(Clone, Debug)]
pub struct ProjectedPotential {
    alpha: f64,
    nmax: usize,
    mfourier: usize,
    quadrature_order: usize,
    /// indexed by `(n * (nmax + 1) + m) * (2 mfourier + 1) + (k + mfourier)`
    coeffs: Vec<Complex64>,
    aliasing_warning: bool,
    periodized: bool,
}

impl ProjectedPotential {
    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn nmax(&self) -> usize {
        self.nmax
    }

    pub fn mfourier(&self) -> usize {
        self.mfourier
    }

    pub fn quadrature_order(&self) -> usize {
        self.quadrature_order
    }

    /// Highest retained harmonic exceeded the aliasing threshold.
    pub fn aliasing_warning(&self) -> bool {
        self.aliasing_warning
    }

    /// The source potential is not x-periodic; its restriction to `[0, 2π)`
    /// was projected as if repeated periodically.
    pub fn periodized(&self) -> bool {
        self.periodized
    }

    /// `c^{(n,m)}_k`; zero beyond the cutoff.
    pub fn coeff(&self, n: usize, m: usize, k: i64) -> Complex64 {
        assert!(n <= self.nmax && m <= self.nmax, "projection index out of range");
        let mf = self.mfourier as i64;
        if k.abs() > mf {
            return Complex64::default();
        }
        self.coeffs[self.offset(n, m) + (k + mf) as usize]
    }

    /// Coefficients of `W_n(x)` as `(k, c_k)`, `k = -mfourier..=mfourier`.
    pub fn diagonal_series(&self, n: usize) -> Vec<(i64, Complex64)> {
        let mf = self.mfourier as i64;
        (-mf..=mf).map(|k| (k, self.coeff(n, n, k))).collect()
    }

    pub fn max_abs(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    fn offset(&self, n: usize, m: usize) -> usize {
        (n * (self.nmax + 1) + m) * (2 * self.mfourier + 1)
    }

    /// Rows `n,m,k,re,im`.
    pub fn write_csv(&self, mut out: impl Write) -> std::io::Result<()> {
        writeln!(out, "n,m,k,re,im")?;
        let mf = self.mfourier as i64;
        for n in 0..=self.nmax {
            for m in 0..=self.nmax {
                for k in -mf..=mf {
                    let c = self.coeff(n, m, k);
                    writeln!(out, "{n},{m},{k},{:e},{:e}", c.re, c.im)?;
                }
            }
        }
        Ok(())
    }
}

/// Number of x samples: enough that the trapezoid rule is exact for
/// band-limited potentials up to the cutoff.
fn x_samples(spec: &PotentialSpec, mfourier: usize) -> usize {
    let harmonic = match spec.kind() {
        PotentialKind::XOnly { series } | PotentialKind::XPeriodicFourier { series, .. } => {
            Some(series.max_harmonic() as usize)
        }
        PotentialKind::Zero | PotentialKind::YOnly { .. } => Some(0),
        _ => None,
    };
    match harmonic {
        Some(h) => (2 * (mfourier + h) + 2).max(4 * mfourier).max(64),
        None => (8 * mfourier).max(256),
    }
}

/// Projects `spec` with the default rule order `2 nmax + 16`.
pub fn project_potential(
    spec: &PotentialSpec,
    params: &ChannelParams,
    nmax: usize,
    mfourier: usize,
) -> Result<ProjectedPotential> {
    project_potential_with_order(spec, params, nmax, mfourier, 2 * nmax + 16)
}

pub fn project_potential_with_order(
    spec: &PotentialSpec,
    params: &ChannelParams,
    nmax: usize,
    mfourier: usize,
    order: usize,
) -> Result<ProjectedPotential> {
    if mfourier == 0 {
        return Err(Error::invalid("Fourier cutoff must be at least 1"));
    }
    let alpha = params.alpha();
    let width = 2 * mfourier + 1;
    let pairs = (nmax + 1) * (nmax + 1);
    let periodized = !spec.is_x_periodic();
    if periodized {
        log::warn!("projecting a non-periodic potential: its restriction to [0, 2π) is periodized");
    }

    if spec.is_zero() {
        return Ok(ProjectedPotential {
            alpha,
            nmax,
            mfourier,
            quadrature_order: order,
            coeffs: vec![Complex64::default(); pairs * width],
            aliasing_warning: false,
            periodized,
        });
    }

    let basis = HermiteBasis::new(nmax, order)?;
    let q = basis.nodes().len();
    let nx = x_samples(spec, mfourier);
    let dx = 2.0 * PI / nx as f64;
    let inv_sqrt_alpha = alpha.sqrt().recip();

    let phi = DMatrix::from_fn(q, nmax + 1, |i, n| basis.value_at_node(i, n));
    let phi_t = phi.transpose();

    // W_{n,m}(x_j) for every sample column
    let blocks: Vec<DMatrix<f64>> = (0..nx)
        .into_par_iter()
        .map(|j| {
            let x = j as f64 * dx;
            let mut weighted = phi.clone();
            for i in 0..q {
                let w = basis.weights()[i] * spec.evaluate(x, basis.nodes()[i] * inv_sqrt_alpha);
                weighted.row_mut(i).scale_mut(w);
            }
            &phi_t * weighted
        })
        .collect();

    let mf = mfourier as i64;
    let twiddle: Vec<Vec<Complex64>> = (-mf..=mf)
        .map(|k| {
            (0..nx)
                .map(|j| Complex64::from_polar(1.0 / nx as f64, -(k as f64) * j as f64 * dx))
                .collect()
        })
        .collect();

    let upper: Vec<(usize, usize)> = (0..=nmax)
        .flat_map(|n| (n..=nmax).map(move |m| (n, m)))
        .collect();
    let computed: Vec<Vec<Complex64>> = upper
        .par_iter()
        .map(|&(n, m)| {
            twiddle
                .iter()
                .map(|tw| {
                    tw.iter()
                        .zip(&blocks)
                        .fold(Complex64::default(), |acc, (t, b)| acc + t * b[(n, m)])
                })
                .collect()
        })
        .collect();

    let mut coeffs = vec![Complex64::default(); pairs * width];
    for (&(n, m), series) in upper.iter().zip(&computed) {
        // enforce exact hermiticity: c_{-k} = conj(c_k), W_{n,m} = W_{m,n}
        for k in 0..=mf {
            let plus = series[(k + mf) as usize];
            let minus = series[(mf - k) as usize];
            let sym = 0.5 * (plus + minus.conj());
            let (ip, im) = ((k + mf) as usize, (mf - k) as usize);
            for &(a, b) in &[(n, m), (m, n)] {
                let off = (a * (nmax + 1) + b) * width;
                coeffs[off + ip] = if k == 0 { Complex64::new(sym.re, 0.0) } else { sym };
                coeffs[off + im] = if k == 0 { Complex64::new(sym.re, 0.0) } else { sym.conj() };
            }
        }
    }

    let largest = coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max);
    // drop round-off so that exactly real or block-diagonal structure survives
    let floor = 4.0 * f64::EPSILON * largest;
    for c in coeffs.iter_mut() {
        if c.re.abs() <= floor {
            c.re = 0.0;
        }
        if c.im.abs() <= floor {
            c.im = 0.0;
        }
    }
    let edge = (0..pairs)
        .map(|p| coeffs[p * width].norm().max(coeffs[p * width + width - 1].norm()))
        .fold(0.0, f64::max);
    let aliasing_warning = largest > 0.0 && edge > ALIASING_THRESHOLD * largest;
    if aliasing_warning {
        log::warn!(
            "projection cutoff {mfourier} may alias: highest harmonic {edge:.3e} vs largest {largest:.3e}"
        );
    }

    Ok(ProjectedPotential {
        alpha,
        nmax,
        mfourier,
        quadrature_order: order,
        coeffs,
        aliasing_warning,
        periodized,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{FourierSeries, YProfile};

    fn params(b: f64, w: f64) -> ChannelParams {
        ChannelParams::new(b, w).unwrap()
    }

    #[test]
    fn zero_potential_projects_to_zero() {
        let p = project_potential(&PotentialSpec::zero(), &params(3.0, 4.0), 6, 8).unwrap();
        assert_eq!(p.max_abs(), 0.0);
        assert!(!p.aliasing_warning());
    }

    #[test]
    fn y_independent_cosine() {
        let p = project_potential(&PotentialSpec::cosine_x(2.0, 1), &params(3.0, 4.0), 8, 6).unwrap();
        for n in 0..=8 {
            for m in 0..=8 {
                for k in -6..=6i64 {
                    let expected = if n == m && k.abs() == 1 { 1.0 } else { 0.0 };
                    assert!((p.coeff(n, m, k) - Complex64::new(expected, 0.0)).norm() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn linear_profile_couples_neighbours() {
        let spec = PotentialSpec::new(PotentialKind::XPeriodicFourier {
            series: FourierSeries::cosine(1.0, 1),
            profile: YProfile::Polynomial { coeffs: vec![0.0, 1.0] },
        })
        .unwrap();
        // alpha = 1
        let p = project_potential(&spec, &params(0.0, 1.0), 4, 4).unwrap();
        // oracle: <φ0|s|φ1> by direct quadrature on a fine trapezoid grid
        let h = 1e-3;
        let me: f64 = (-20_000..=20_000)
            .map(|i| {
                let s = i as f64 * h;
                let v = super::super::hermite::hermite_values(1, s);
                v[0] * s * v[1] * h
            })
            .sum();
        assert!((me - 0.5f64.sqrt()).abs() < 1e-10);
        let expected = 0.5 * me;
        assert!((p.coeff(0, 1, 1).re - expected).abs() < 1e-10);
        assert!((p.coeff(0, 1, -1).re - expected).abs() < 1e-10);
        assert!((expected - 0.353553).abs() < 1e-6);
        for n in 0..=4 {
            for k in -4..=4 {
                assert!(p.coeff(n, n, k).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn csv_dump_has_every_coefficient() {
        let p = project_potential(&PotentialSpec::cosine_x(1.0, 1), &params(1.0, 1.0), 2, 3).unwrap();
        let mut buf = Vec::new();
        p.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text.lines().count(), 1 + 9 * 7);
        assert!(text.starts_with("n,m,k,re,im"));
    }

    #[test]
    fn aliasing_is_flagged() {
        let spec = PotentialSpec::cosine_x(1.0, 5);
        let p = project_potential(&spec, &params(1.0, 1.0), 2, 5).unwrap();
        assert!(p.aliasing_warning());
        let p = project_potential(&spec, &params(1.0, 1.0), 2, 6).unwrap();
        assert!(!p.aliasing_warning());
    }
}
