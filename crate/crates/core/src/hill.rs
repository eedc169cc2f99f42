//! One-dimensional Bloch operators `K(θ) = -∂²_x + V(x)` on `[0, 2π]` with
//! `f(2π) = e^{2πiθ} f(0)`, in the plane-wave basis `e^{i(m+θ)x}`,
//! `|m| <= M`: diagonal `(m+θ)² + c_0`, off-diagonal `c_{m-m'}`.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::bands::{band_extent, gaps_from_intervals, theta_grid, GapReport, Memo, DEFAULT_GAP_TOLERANCE};
use crate::basis::{project_potential, DEFAULT_FOURIER_CUTOFF};
use crate::error::{Error, Result};
use crate::linalg::hermitian_eigenvalues;
use crate::model::{ChannelParams, FourierSeries, PotentialKind, PotentialSpec};

/// Default plane-wave cutoff `M`.
pub const DEFAULT_HILL_MODES: usize = 32;

pub fn hill_matrix(series: &FourierSeries, theta: f64, m: usize) -> DMatrix<Complex64> {
    let mm = m as i64;
    DMatrix::from_fn(2 * m + 1, 2 * m + 1, |i, j| {
        let (mi, mj) = (i as i64 - mm, j as i64 - mm);
        let mut v = series.coeff(mi - mj);
        if i == j {
            let p = mi as f64 + theta;
            v = Complex64::new(v.re + p * p, 0.0);
        }
        v
    })
}

/// Lowest `count` eigenvalues of `K(θ)`, ascending.
pub fn hill_spectrum(series: &FourierSeries, theta: f64, m: usize, count: usize) -> Result<Vec<f64>> {
    if !(theta.abs() <= 0.5 + 1e-12) {
        return Err(Error::invalid(format!("Bloch parameter {theta} outside [-1/2, 1/2]")));
    }
    if count > 2 * m + 1 {
        return Err(Error::invalid(format!("requested {count} eigenvalues of a {}-mode Hill matrix", 2 * m + 1)));
    }
    let mut v = hermitian_eigenvalues(&hill_matrix(series, theta, m))?;
    v.truncate(count);
    Ok(v)
}

#[derive(Clone, Debug, Serialize)]
pub struct HillBand {
    /// Transverse index the potential came from.
    pub n: usize,
    /// Constant added to every eigenvalue (`α(2n+1)` for `H_{n,n}`).
    pub offset: f64,
    pub theta_grid: Vec<f64>,
    /// `offset + ε_k(θ)` per grid point.
    pub eigenvalues: Vec<Vec<f64>>,
    pub band_intervals: Vec<(f64, f64)>,
    /// `θ` of each band's minimum and maximum after refinement.
    pub edge_thetas: Vec<(f64, f64)>,
    /// Every refined band edge sits at `θ ∈ {0, ±1/2}` to `1e-6`.
    pub edges_at_symmetric_points: bool,
    pub gaps: GapReport,
}

impl HillBand {
    pub fn write_csv(&self, mut out: impl std::io::Write) -> std::io::Result<()> {
        writeln!(out, "theta,j,E")?;
        for (t, row) in self.theta_grid.iter().zip(&self.eigenvalues) {
            for (j, e) in row.iter().enumerate().take(self.band_intervals.len()) {
                writeln!(out, "{t},{},{e}", j + 1)?;
            }
        }
        Ok(())
    }
}

/// Band intervals and gaps of `offset + spec(K)` below `ceiling`.
pub fn hill_bands(
    series: &FourierSeries,
    n: usize,
    offset: f64,
    theta_count: usize,
    m: usize,
    ceiling: f64,
    gap_tolerance: f64,
) -> Result<HillBand> {
    if theta_count < 3 || theta_count.is_multiple_of(2) {
        return Err(Error::invalid(format!("theta grid size must be odd and at least 3, got {theta_count}")));
    }
    let grid = theta_grid(theta_count);
    let size = 2 * m + 1;
    let solve = |t: f64| -> Result<Vec<f64>> {
        Ok(hill_spectrum(series, t, m, size)?.into_iter().map(|e| e + offset).collect())
    };
    let full: Vec<Vec<f64>> = grid.par_iter().map(|&t| solve(t)).collect::<Result<_>>()?;
    let below = full
        .iter()
        .map(|r| r.iter().take_while(|e| **e <= ceiling).count())
        .max()
        .unwrap_or(0);
    let tracked = (below + 1).min(size);
    let eigenvalues: Vec<Vec<f64>> = full
        .into_iter()
        .map(|mut r| {
            r.truncate(tracked);
            r
        })
        .collect();
    let memo = Memo::new(|t| {
        let mut v = solve(t)?;
        v.truncate(tracked);
        Ok(v)
    });
    let extents = (0..tracked)
        .map(|j| band_extent(&grid, &eigenvalues, j, &memo, true, true, 1e-10))
        .collect::<Result<Vec<_>>>()?;

    let mut band_intervals = Vec::new();
    let mut edge_thetas = Vec::new();
    for e in extents.iter().take_while(|e| e.min <= ceiling) {
        band_intervals.push((e.min, e.max.min(ceiling)));
        edge_thetas.push((e.argmin, e.argmax));
    }
    let symmetric = |t: f64| [0.0, -0.5, 0.5].iter().any(|s| (t - s).abs() < 1e-6);
    let edges_at_symmetric_points = edge_thetas.iter().all(|&(a, b)| symmetric(a) && symmetric(b));
    let gaps = gaps_from_intervals(&band_intervals, gap_tolerance);
    Ok(HillBand {
        n,
        offset,
        theta_grid: grid,
        eigenvalues,
        band_intervals,
        edge_thetas,
        edges_at_symmetric_points,
        gaps,
    })
}

/// `W^{(α)}_n` of `spec` as a Fourier series.
pub fn transverse_series(params: &ChannelParams, spec: &PotentialSpec, n: usize) -> Result<FourierSeries> {
    let harmonic = match spec.kind() {
        PotentialKind::XOnly { series } | PotentialKind::XPeriodicFourier { series, .. } => {
            series.max_harmonic() as usize
        }
        _ => 0,
    };
    let proj = project_potential(spec, params, n, DEFAULT_FOURIER_CUTOFF.max(harmonic))?;
    FourierSeries::new(proj.diagonal_series(n))
}

/// Hill band data of `H_{n,n} = α(2n+1) + K_n`.
pub fn hnn_bands(params: &ChannelParams, spec: &PotentialSpec, n: usize, ceiling: f64) -> Result<HillBand> {
    let series = transverse_series(params, spec, n)?;
    let offset = params.alpha() * (2 * n + 1) as f64;
    hill_bands(
        &series,
        n,
        offset,
        33,
        DEFAULT_HILL_MODES,
        ceiling,
        DEFAULT_GAP_TOLERANCE * params.alpha(),
    )
}

/// Gaps of `H_{0,0} = α + K₀` below `ceiling`.
pub fn h00_gaps(params: &ChannelParams, spec: &PotentialSpec, ceiling: f64) -> Result<GapReport> {
    if !spec.is_x_periodic() {
        return Err(Error::invalid("H00 gaps need an x-periodic potential"));
    }
    Ok(hnn_bands(params, spec, 0, ceiling)?.gaps)
}
