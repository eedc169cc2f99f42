//! Band functions `E_j(θ)` over the Brillouin zone, band intervals and gaps.
//!
//! Bands are the sorted eigenvalue curves of the truncated fibers; crossings
//! are not disentangled. Only eigenvalues below the energy ceiling are
//! reported, and the truncation is raised until doubling either cutoff moves
//! none of them by more than the Cauchy tolerance.

use std::collections::HashMap;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::{Arc, Mutex};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::basis::{project_potential, ProjectedPotential};
use crate::error::{Error, Result};
use crate::fiber::{assemble_fiber, eigenvalues_fiber};
use crate::hill::h00_gaps;
use crate::linalg::hermitian_eigen;
use crate::model::{ChannelParams, PotentialSpec};

/// Relative gap tolerance: gaps narrower than this times `α` are dropped.
pub const DEFAULT_GAP_TOLERANCE: f64 = 1e-6;

/// `3α + W₀`, or `3α` when `W₀` is unbounded.
pub fn default_ceiling(params: &ChannelParams, spec: &PotentialSpec) -> f64 {
    3.0 * params.alpha() + spec.norms().w0.value().unwrap_or(0.0)
}

/// Uniform grid `θ_k = -1/2 + k/(count-1)`, both endpoints included.
pub fn theta_grid(count: usize) -> Vec<f64> {
    (0..count)
        .map(|k| -0.5 + k as f64 / (count - 1) as f64)
        .collect()
}

/// Which band extrema get golden-section refinement.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Refinement {
    None,
    /// Every band minimum and maximum.
    All,
    /// Only extrema that can bound a gap (and the spectral bottom). Band
    /// intervals elsewhere stay at their grid values; gaps are unaffected
    /// because refinement can only widen a band.
    GapEdges,
}

#[derive(Clone, Debug)]
pub struct BandOptions {
    pub theta_count: usize,
    pub energy_ceiling: Option<f64>,
    /// Initial truncation; chosen from the ceiling when absent.
    pub n_hermite: Option<usize>,
    pub m_fourier: Option<usize>,
    pub cauchy_tolerance: f64,
    pub refine_tolerance: f64,
    pub refinement: Refinement,
    /// The truncation is never raised beyond this matrix dimension.
    pub max_dimension: usize,
}

impl Default for BandOptions {
    fn default() -> Self {
        BandOptions {
            theta_count: 33,
            energy_ceiling: None,
            n_hermite: None,
            m_fourier: None,
            cauchy_tolerance: 1e-7,
            refine_tolerance: 1e-8,
            refinement: Refinement::All,
            max_dimension: 2400,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Truncation {
    pub n_hermite: usize,
    pub m_fourier: usize,
    pub converged: bool,
    /// Largest change of a tracked eigenvalue under doubling, last check.
    pub cauchy_change: f64,
    pub raises: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct BandStructure {
    pub params: ChannelParams,
    pub theta_grid: Vec<f64>,
    /// `bands[i][j] = E_j(theta_grid[i])`.
    pub bands: Vec<Vec<f64>>,
    /// `[min E_j, max E_j]` clipped at the ceiling, for every band whose
    /// minimum lies below it.
    pub band_intervals: Vec<(f64, f64)>,
    /// Unclipped `max E_j - min E_j`.
    pub band_variation: Vec<f64>,
    /// `θ` at which each band attains its minimum and maximum.
    pub extremum_thetas: Vec<(f64, f64)>,
    pub energy_ceiling: f64,
    pub truncation: Truncation,
    pub refinement: Refinement,
}

impl BandStructure {
    pub fn band_count(&self) -> usize {
        self.band_intervals.len()
    }

    /// `inf` of the computed spectrum.
    pub fn bottom(&self) -> f64 {
        self.band_intervals.first().map_or(f64::INFINITY, |b| b.0)
    }

    /// Rows `theta,j,E` (`j` from 1) for every eigenvalue below the ceiling.
    pub fn write_csv(&self, mut out: impl Write) -> std::io::Result<()> {
        writeln!(out, "theta,j,E")?;
        for (theta, row) in self.theta_grid.iter().zip(&self.bands) {
            for (j, e) in row.iter().enumerate().take(self.band_count()) {
                if *e <= self.energy_ceiling {
                    writeln!(out, "{theta},{},{e}", j + 1)?;
                }
            }
        }
        Ok(())
    }

    /// One two-column `theta E` file per band, named `band_<j>.dat`.
    pub fn write_plot_files(&self, dir: &Path) -> std::io::Result<Vec<PathBuf>> {
        let mut paths = Vec::new();
        for j in 0..self.band_count() {
            let path = dir.join(format!("band_{}.dat", j + 1));
            let mut f = std::io::BufWriter::new(std::fs::File::create(&path)?);
            writeln!(f, "# theta E_{}", j + 1)?;
            for (theta, row) in self.theta_grid.iter().zip(&self.bands) {
                writeln!(f, "{theta} {}", row[j])?;
            }
            paths.push(path);
        }
        Ok(paths)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Gap {
    pub lo: f64,
    pub hi: f64,
    pub width: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GapReport {
    pub gaps: Vec<Gap>,
    pub count: usize,
    pub tolerance: f64,
}

/// Gaps of the union of `intervals`: open intervals between consecutive
/// merged components wider than `tolerance`.
pub fn gaps_from_intervals(intervals: &[(f64, f64)], tolerance: f64) -> GapReport {
    let mut sorted: Vec<(f64, f64)> = intervals.to_vec();
    sorted.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut gaps = Vec::new();
    let mut reach = f64::NEG_INFINITY;
    for (lo, hi) in sorted {
        if reach.is_finite() && lo - reach > tolerance {
            gaps.push(Gap {
                lo: reach,
                hi: lo,
                width: lo - reach,
            });
        }
        reach = reach.max(hi);
    }
    GapReport {
        count: gaps.len(),
        gaps,
        tolerance,
    }
}

pub fn detect_gaps(bs: &BandStructure, gap_tolerance: f64) -> GapReport {
    gaps_from_intervals(&bs.band_intervals, gap_tolerance)
}

/// Bands with the default options and the given grid size and ceiling.
pub fn compute_bands(
    params: &ChannelParams,
    spec: &PotentialSpec,
    theta_count: usize,
    energy_ceiling: f64,
) -> Result<BandStructure> {
    compute_bands_with(
        params,
        spec,
        &BandOptions {
            theta_count,
            energy_ceiling: Some(energy_ceiling),
            ..BandOptions::default()
        },
    )
}

/// Starting truncation for a ceiling: every Landau band `(n, p)` with
/// `α(2n+1) + βp² <= ceiling + W₀` fits, with room for the shift of the
/// transverse Gaussian by `B p / α^{3/2}`.
pub fn initial_truncation(params: &ChannelParams, spec: &PotentialSpec, ceiling: f64) -> (usize, usize) {
    let (a, b) = (params.alpha(), params.b());
    let e = ceiling + spec.norms().w0.value().unwrap_or(0.0);
    let p_max = ((e - a).max(0.0) / params.beta()).sqrt();
    let m = p_max.ceil() as usize + 3;
    let n_top = ((e / a - 1.0) / 2.0).max(0.0).floor() as usize;
    let shift = b * (p_max + 1.0) / a.powf(1.5);
    let n = n_top + 16 + (shift * shift / 2.0 + 4.0 * shift).ceil() as usize;
    (n, m)
}

struct Solver<'a> {
    params: &'a ChannelParams,
    proj: ProjectedPotential,
}

impl Solver<'_> {
    fn eigenvalues(&self, theta: f64, n: usize, m: usize) -> Result<Vec<f64>> {
        let f = assemble_fiber(self.params, &self.proj, theta, n, m)?;
        eigenvalues_fiber(&f, f.dim())
    }
}

fn projection_for(params: &ChannelParams, spec: &PotentialSpec, n: usize, m: usize) -> Result<ProjectedPotential> {
    project_potential(spec, params, n - 1, m.max(1))
}

fn cauchy_change(base: &[f64], other: &[f64], ceiling: f64) -> f64 {
    base.iter()
        .zip(other)
        .take_while(|(b, _)| **b <= ceiling)
        .map(|(b, o)| (b - o).abs())
        .fold(0.0, f64::max)
}

const CAUCHY_THETAS: [f64; 2] = [-0.5, 0.2];

/// Raises `(N, M)` until doubling either one leaves the eigenvalues below the
/// ceiling unchanged to `tol`. Returns the truncation and a projection valid
/// for it.
fn settle_truncation(
    params: &ChannelParams,
    spec: &PotentialSpec,
    ceiling: f64,
    mut n: usize,
    mut m: usize,
    opts: &BandOptions,
) -> Result<(Truncation, ProjectedPotential)> {
    let dim = |n: usize, m: usize| n * (2 * m + 1);
    let mut raises = 0;
    loop {
        let solver = Solver {
            params,
            proj: projection_for(params, spec, 2 * n, 4 * m)?,
        };
        let checks: Vec<(f64, f64)> = CAUCHY_THETAS
            .par_iter()
            .map(|&theta| -> Result<(f64, f64)> {
                let base = solver.eigenvalues(theta, n, m)?;
                let dn = cauchy_change(&base, &solver.eigenvalues(theta, 2 * n, m)?, ceiling);
                let dm = cauchy_change(&base, &solver.eigenvalues(theta, n, 2 * m)?, ceiling);
                Ok((dn, dm))
            })
            .collect::<Result<_>>()?;
        let dn = checks.iter().map(|c| c.0).fold(0.0, f64::max);
        let dm = checks.iter().map(|c| c.1).fold(0.0, f64::max);
        let change = dn.max(dm);
        if change <= opts.cauchy_tolerance {
            let trunc = Truncation {
                n_hermite: n,
                m_fourier: m,
                converged: true,
                cauchy_change: change,
                raises,
            };
            return Ok((trunc, solver.proj));
        }
        let next_n = if dn > opts.cauchy_tolerance { 2 * n } else { n };
        let next_m = if dm > opts.cauchy_tolerance { 2 * m } else { m };
        if dim(next_n, next_m) > opts.max_dimension {
            log::warn!(
                "truncation N = {n}, M = {m} not converged below ceiling {ceiling} (change {change:.2e}); \
                 raising would exceed dimension {}",
                opts.max_dimension
            );
            let trunc = Truncation {
                n_hermite: n,
                m_fourier: m,
                converged: false,
                cauchy_change: change,
                raises,
            };
            return Ok((trunc, solver.proj));
        }
        log::info!("raising truncation to N = {next_n}, M = {next_m} (change {change:.2e})");
        n = next_n;
        m = next_m;
        raises += 1;
    }
}

/// Memoized `θ -> sorted eigenvalues`.
pub(crate) struct Memo<'a> {
    cache: Mutex<HashMap<u64, Arc<Vec<f64>>>>,
    eval: Box<dyn Fn(f64) -> Result<Vec<f64>> + Sync + 'a>,
}

impl<'a> Memo<'a> {
    pub(crate) fn new(eval: impl Fn(f64) -> Result<Vec<f64>> + Sync + 'a) -> Self {
        Memo {
            cache: Mutex::new(HashMap::new()),
            eval: Box::new(eval),
        }
    }

    pub(crate) fn get(&self, theta: f64) -> Result<Arc<Vec<f64>>> {
        if let Some(v) = self.cache.lock().expect("memo lock").get(&theta.to_bits()) {
            return Ok(v.clone());
        }
        let v = Arc::new((self.eval)(theta)?);
        self.cache
            .lock()
            .expect("memo lock")
            .insert(theta.to_bits(), v.clone());
        Ok(v)
    }
}

/// Golden-section minimum of `f` on `[a, b]` down to a bracket of `tol`;
/// returns the best `(θ, f(θ))` evaluated.
pub(crate) fn golden_min(f: &impl Fn(f64) -> Result<f64>, mut a: f64, mut b: f64, tol: f64) -> Result<(f64, f64)> {
    let r = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - r * (b - a);
    let mut d = a + r * (b - a);
    let (mut fc, mut fd) = (f(c)?, f(d)?);
    let mut best = if fc <= fd { (c, fc) } else { (d, fd) };
    while b - a > tol {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - r * (b - a);
            fc = f(c)?;
            if fc < best.1 {
                best = (c, fc);
            }
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + r * (b - a);
            fd = f(d)?;
            if fd < best.1 {
                best = (d, fd);
            }
        }
    }
    Ok(best)
}

#[derive(Clone, Copy, Debug)]
pub(crate) struct Extent {
    pub min: f64,
    pub argmin: f64,
    pub max: f64,
    pub argmax: f64,
}

/// Locates the minimum of `f` near grid point `k` to `tol`. Points `tol`
/// away on each side are probed first; a side is searched by golden section
/// only when its probe lies below the grid value. Both searches assume the
/// band is unimodal between neighbouring grid points. The grid is periodic:
/// `±1/2` are the same point and are searched on both sides.
fn locate_min(f: &impl Fn(f64) -> Result<f64>, grid: &[f64], k: usize, tol: f64) -> Result<(f64, f64)> {
    let last = grid.len() - 1;
    let v0 = f(grid[k])?;
    let mut best = (grid[k], v0);
    // (base point, direction, neighbour)
    let sides: Vec<(f64, f64, f64)> = if k == 0 || k == last {
        vec![(grid[0], 1.0, grid[1]), (grid[last], -1.0, grid[last - 1])]
    } else {
        vec![(grid[k], 1.0, grid[k + 1]), (grid[k], -1.0, grid[k - 1])]
    };
    for (base, dir, far) in sides {
        let probe = base + dir * tol;
        let vp = f(probe)?;
        if vp < best.1 {
            best = (probe, vp);
        }
        if vp < v0 {
            let (a, b) = if dir > 0.0 { (base, far) } else { (far, base) };
            let found = golden_min(f, a, b, tol)?;
            if found.1 < best.1 {
                best = found;
            }
        }
    }
    Ok(best)
}

/// Grid extent of band `j`, refined around the grid extremum where
/// `refine_min` / `refine_max` ask for it.
pub(crate) fn band_extent(
    grid: &[f64],
    values: &[Vec<f64>],
    j: usize,
    memo: &Memo,
    refine_min: bool,
    refine_max: bool,
    tol: f64,
) -> Result<Extent> {
    let col: Vec<f64> = values.iter().map(|row| row[j]).collect();
    let (kmin, _) = col.iter().enumerate().min_by(|a, b| a.1.total_cmp(b.1)).expect("grid");
    let (kmax, _) = col.iter().enumerate().max_by(|a, b| a.1.total_cmp(b.1)).expect("grid");
    let mut ext = Extent {
        min: col[kmin],
        argmin: grid[kmin],
        max: col[kmax],
        argmax: grid[kmax],
    };
    if refine_min {
        let (t, v) = locate_min(&|t| Ok(memo.get(t)?[j]), grid, kmin, tol)?;
        if v < ext.min {
            ext.min = v;
            ext.argmin = t;
        }
    }
    if refine_max {
        let (t, v) = locate_min(&|t| Ok(-memo.get(t)?[j]), grid, kmax, tol)?;
        if -v > ext.max {
            ext.max = -v;
            ext.argmax = t;
        }
    }
    Ok(ext)
}

/// Band structure with explicit options.
pub fn compute_bands_with(params: &ChannelParams, spec: &PotentialSpec, opts: &BandOptions) -> Result<BandStructure> {
    let count = opts.theta_count;
    if count < 9 || count.is_multiple_of(2) {
        return Err(Error::invalid(format!("theta grid size must be odd and at least 9, got {count}")));
    }
    let ceiling = opts.energy_ceiling.unwrap_or_else(|| default_ceiling(params, spec));
    if !(ceiling.is_finite() && ceiling > 0.0) {
        return Err(Error::invalid(format!("energy ceiling must be positive, got {ceiling}")));
    }
    if !spec.norms().w0.is_finite() {
        log::warn!("potential is unbounded; band truncation is not validated");
    }
    let (n0, m0) = initial_truncation(params, spec, ceiling);
    let (n0, m0) = (opts.n_hermite.unwrap_or(n0), opts.m_fourier.unwrap_or(m0));
    let (truncation, proj) = settle_truncation(params, spec, ceiling, n0, m0, opts)?;
    let solver = Solver { params, proj };
    let (n, m) = (truncation.n_hermite, truncation.m_fourier);

    let grid = theta_grid(count);
    let full: Vec<Vec<f64>> = grid
        .par_iter()
        .map(|&t| solver.eigenvalues(t, n, m))
        .collect::<Result<_>>()?;
    let below = full
        .iter()
        .map(|row| row.iter().take_while(|e| **e <= ceiling).count())
        .max()
        .unwrap_or(0);
    let tracked = (below + 1).min(n * (2 * m + 1));
    let bands: Vec<Vec<f64>> = full.into_iter().map(|mut r| {
        r.truncate(tracked);
        r
    }).collect();

    let memo = Memo::new(|t| {
        let mut v = solver.eigenvalues(t, n, m)?;
        v.truncate(tracked);
        Ok(v)
    });
    let grid_min = |j: usize| bands.iter().map(|r| r[j]).fold(f64::INFINITY, f64::min);
    let grid_max = |j: usize| bands.iter().map(|r| r[j]).fold(f64::NEG_INFINITY, f64::max);
    let flags: Vec<(bool, bool)> = (0..tracked)
        .map(|j| match opts.refinement {
            Refinement::None => (false, false),
            Refinement::All => (true, true),
            Refinement::GapEdges => {
                let below_open = j == 0 || grid_max(j - 1) < grid_min(j);
                let above_open = j + 1 < tracked && grid_max(j) < grid_min(j + 1);
                (below_open, above_open)
            }
        })
        .collect();
    let extents: Vec<Extent> = (0..tracked)
        .into_par_iter()
        .map(|j| band_extent(&grid, &bands, j, &memo, flags[j].0, flags[j].1, opts.refine_tolerance))
        .collect::<Result<_>>()?;

    let mut band_intervals = Vec::new();
    let mut band_variation = Vec::new();
    let mut extremum_thetas = Vec::new();
    for e in extents.iter().take_while(|e| e.min <= ceiling) {
        band_intervals.push((e.min, e.max.min(ceiling)));
        band_variation.push(e.max - e.min);
        extremum_thetas.push((e.argmin, e.argmax));
    }

    Ok(BandStructure {
        params: *params,
        theta_grid: grid,
        bands,
        band_intervals,
        band_variation,
        extremum_thetas,
        energy_ceiling: ceiling,
        truncation,
        refinement: opts.refinement,
    })
}

/// Eigenvalues of a fiber paired with the Hermite index carrying most of
/// each eigenvector's weight.
pub fn dominant_hermite_index(
    params: &ChannelParams,
    proj: &ProjectedPotential,
    theta: f64,
    n_hermite: usize,
    m_fourier: usize,
) -> Result<Vec<(f64, usize)>> {
    let f = assemble_fiber(params, proj, theta, n_hermite, m_fourier)?;
    let (vals, vecs) = hermitian_eigen(f.entries())?;
    Ok(vals
        .iter()
        .enumerate()
        .map(|(c, &e)| {
            let mut weight = vec![0.0; n_hermite];
            for r in 0..f.dim() {
                weight[f.label(r).0] += vecs[(r, c)].norm_sqr();
            }
            let (n, _) = weight
                .iter()
                .enumerate()
                .max_by(|a, b| a.1.total_cmp(b.1))
                .expect("nonempty");
            (e, n)
        })
        .collect())
}

#[derive(Clone, Debug, Serialize)]
pub struct PersistenceRow {
    pub omega: f64,
    pub alpha: f64,
    pub ceiling: f64,
    pub full: GapReport,
    pub h00: GapReport,
    /// Per gap index below the target count: `max(|Δlo|, |Δhi|)` between
    /// the full-H gap and the H00 gap, when both exist.
    pub edge_discrepancy: Vec<Option<f64>>,
    pub truncation: Truncation,
}

#[derive(Clone, Debug, Serialize)]
pub struct PersistenceTable {
    pub b: f64,
    pub target_gap_count: usize,
    pub rows: Vec<PersistenceRow>,
    /// Per tracked gap: discrepancy strictly decreasing along increasing `ω`.
    pub shrinking: Vec<bool>,
}

/// Gaps of `H` below `3α` against those of `H_{0,0} = α + K₀` for each `ω`.
pub fn gap_persistence_sweep(
    b: f64,
    omega_list: &[f64],
    spec: &PotentialSpec,
    target_gap_count: usize,
) -> Result<PersistenceTable> {
    persistence_sweep_with(b, omega_list, spec, target_gap_count, &BandOptions::default())
}

pub fn persistence_sweep_with(
    b: f64,
    omega_list: &[f64],
    spec: &PotentialSpec,
    target_gap_count: usize,
    base: &BandOptions,
) -> Result<PersistenceTable> {
    if !spec.is_x_periodic() {
        return Err(Error::invalid("gap persistence needs an x-periodic potential"));
    }
    if !spec.norms().w0.is_finite() {
        return Err(Error::invalid("gap persistence needs a bounded potential"));
    }
    let mut omegas = omega_list.to_vec();
    omegas.sort_by(f64::total_cmp);
    let mut rows = Vec::new();
    for omega in omegas {
        let params = ChannelParams::new(b, omega)?;
        let ceiling = 3.0 * params.alpha();
        let tol = DEFAULT_GAP_TOLERANCE * params.alpha();
        let opts = BandOptions {
            energy_ceiling: Some(ceiling),
            refinement: Refinement::GapEdges,
            ..base.clone()
        };
        let bs = compute_bands_with(&params, spec, &opts)?;
        if !bs.truncation.converged {
            log::warn!("omega = {omega}: truncation did not converge");
        }
        let full = detect_gaps(&bs, tol);
        let h00 = h00_gaps(&params, spec, ceiling)?;
        let edge_discrepancy = (0..target_gap_count)
            .map(|i| match (full.gaps.get(i), h00.gaps.get(i)) {
                (Some(f), Some(h)) => Some((f.lo - h.lo).abs().max((f.hi - h.hi).abs())),
                _ => None,
            })
            .collect();
        rows.push(PersistenceRow {
            omega,
            alpha: params.alpha(),
            ceiling,
            full,
            h00,
            edge_discrepancy,
            truncation: bs.truncation,
        });
    }
    let shrinking = (0..target_gap_count)
        .map(|i| {
            let d: Vec<Option<f64>> = rows.iter().map(|r| r.edge_discrepancy[i]).collect();
            d.iter().all(|v| v.is_some()) && d.windows(2).all(|w| w[1] < w[0])
        })
        .collect();
    Ok(PersistenceTable {
        b,
        target_gap_count,
        rows,
        shrinking,
    })
}
