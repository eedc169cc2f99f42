//! Potential descriptors `W(x, y)`.
//!
//! Periodic kinds have period `2π` in `x`; inputs with another period are
//! rescaled by the caller. Fourier series use the convention
//! `W(x) = Σ_k c_k e^{ikx}` throughout the crate.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::io::Read;
use std::path::{Path, PathBuf};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::norms::{estimate_norms, NormEstimates};
use crate::error::{Error, Result};

pub const PERIOD: f64 = 2.0 * PI;

/// Highest polynomial degree accepted for a y-profile.
pub const MAX_POLY_DEGREE: usize = 8;

const HERMITIAN_TOL: f64 = 1e-12;

/// Real 2π-periodic function stored by its Fourier coefficients.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<FourierTerm>", into = "Vec<FourierTerm>")]
pub struct FourierSeries {
    coeffs: BTreeMap<i64, Complex64>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct FourierTerm {
    k: i64,
    re: f64,
    #[serde(default)]
    im: f64,
}

impl TryFrom<Vec<FourierTerm>> for FourierSeries {
    type Error = Error;

    fn try_from(terms: Vec<FourierTerm>) -> Result<Self> {
        FourierSeries::new(
            terms
                .into_iter()
                .map(|t| (t.k, Complex64::new(t.re, t.im))),
        )
    }
}

impl From<FourierSeries> for Vec<FourierTerm> {
    fn from(s: FourierSeries) -> Self {
        s.coeffs
            .into_iter()
            .map(|(k, c)| FourierTerm {
                k,
                re: c.re,
                im: c.im,
            })
            .collect()
    }
}

impl FourierSeries {
    /// Builds a series from `(k, c_k)` pairs. Repeated harmonics are summed;
    /// the result must satisfy `c_{-k} = conj(c_k)`.
    pub fn new(terms: impl IntoIterator<Item = (i64, Complex64)>) -> Result<Self> {
        let mut coeffs: BTreeMap<i64, Complex64> = BTreeMap::new();
        for (k, c) in terms {
            if !c.re.is_finite() || !c.im.is_finite() {
                return Err(Error::invalid(format!("non-finite Fourier coefficient at k = {k}")));
            }
            *coeffs.entry(k).or_default() += c;
        }
        coeffs.retain(|_, c| c.norm() > 0.0);
        let scale = coeffs.values().map(|c| c.norm()).fold(0.0, f64::max);
        for (&k, &c) in &coeffs {
            let partner = coeffs.get(&-k).copied().unwrap_or_default();
            if (partner - c.conj()).norm() > HERMITIAN_TOL * scale.max(1.0) {
                return Err(Error::invalid(format!(
                    "Fourier coefficients violate c_(-k) = conj(c_k) at k = {k}; the potential must be real"
                )));
            }
        }
        Ok(FourierSeries { coeffs })
    }

    pub fn zero() -> Self {
        FourierSeries {
            coeffs: BTreeMap::new(),
        }
    }

    pub fn constant(c: f64) -> Self {
        Self::new([(0, Complex64::new(c, 0.0))]).expect("constant is real")
    }

    /// `amplitude * cos(k x)`.
    pub fn cosine(amplitude: f64, k: i64) -> Self {
        if k == 0 {
            return Self::constant(amplitude);
        }
        let h = Complex64::new(amplitude / 2.0, 0.0);
        Self::new([(k, h), (-k, h)]).expect("cosine is real")
    }

    /// `amplitude * sin(k x)`.
    pub fn sine(amplitude: f64, k: i64) -> Self {
        if k == 0 {
            return Self::zero();
        }
        let h = Complex64::new(0.0, -amplitude / 2.0);
        Self::new([(k, h), (-k, h.conj())]).expect("sine is real")
    }

    pub fn plus(&self, other: &FourierSeries) -> FourierSeries {
        FourierSeries::new(
            self.coeffs
                .iter()
                .chain(other.coeffs.iter())
                .map(|(&k, &c)| (k, c)),
        )
        .expect("sum of real series is real")
    }

    pub fn coeff(&self, k: i64) -> Complex64 {
        self.coeffs.get(&k).copied().unwrap_or_default()
    }

    pub fn iter(&self) -> impl Iterator<Item = (i64, Complex64)> + '_ {
        self.coeffs.iter().map(|(&k, &c)| (k, c))
    }

    pub fn max_harmonic(&self) -> i64 {
        self.coeffs.keys().map(|k| k.abs()).max().unwrap_or(0)
    }

    /// True when only `c_0` is present.
    pub fn is_constant(&self) -> bool {
        self.coeffs.keys().all(|&k| k == 0)
    }

    /// `Σ |k|^p |c_k|`, an upper bound on `sup |d^p W / dx^p|`.
    pub fn weighted_abs_sum(&self, p: i32) -> f64 {
        self.coeffs
            .iter()
            .map(|(&k, c)| (k.abs() as f64).powi(p) * c.norm())
            .sum()
    }

    /// `sup |W|` when it is known in closed form: a constant or a constant
    /// plus a single harmonic pair.
    pub(crate) fn exact_sup(&self) -> Option<f64> {
        let c0 = self.coeff(0).re;
        let positive: Vec<_> = self.coeffs.iter().filter(|(&k, _)| k > 0).collect();
        match positive.as_slice() {
            [] => Some(c0.abs()),
            [(_, c)] => Some(c0.abs() + 2.0 * c.norm()),
            _ => None,
        }
    }

    /// Evaluates the `order`-th derivative. Order 0 is the function itself.
    pub fn eval_derivative(&self, x: f64, order: u32) -> f64 {
        let mut acc = 0.0;
        for (&k, &c) in &self.coeffs {
            let factor = Complex64::new(0.0, k as f64).powu(order);
            let phase = Complex64::from_polar(1.0, k as f64 * x);
            acc += (factor * c * phase).re;
        }
        acc
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.eval_derivative(x, 0)
    }
}

/// Transverse shape multiplying an x-periodic factor.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum YProfile {
    Constant,
    /// `exp(-y^2 / (2 sigma^2))`.
    Gaussian { sigma: f64 },
    /// `Σ_j coeffs[j] y^j`.
    Polynomial { coeffs: Vec<f64> },
}

impl YProfile {
    fn validate(&self) -> Result<()> {
        match self {
            YProfile::Constant => Ok(()),
            YProfile::Gaussian { sigma } => {
                if sigma.is_finite() && *sigma > 0.0 {
                    Ok(())
                } else {
                    Err(Error::invalid(format!("gaussian sigma must be positive, got {sigma}")))
                }
            }
            YProfile::Polynomial { coeffs } => {
                if coeffs.iter().any(|c| !c.is_finite()) {
                    return Err(Error::invalid("polynomial coefficients must be finite"));
                }
                if coeffs.len() > MAX_POLY_DEGREE + 1 {
                    return Err(Error::invalid(format!(
                        "polynomial y-profile degree exceeds {MAX_POLY_DEGREE}"
                    )));
                }
                Ok(())
            }
        }
    }

    /// Degree of the polynomial with trailing zeros removed; `None` for
    /// non-polynomial profiles.
    pub fn degree(&self) -> Option<usize> {
        match self {
            YProfile::Constant => Some(0),
            YProfile::Gaussian { .. } => None,
            YProfile::Polynomial { coeffs } => {
                Some(coeffs.iter().rposition(|&c| c != 0.0).unwrap_or(0))
            }
        }
    }

    pub fn eval_derivative(&self, y: f64, order: u32) -> f64 {
        match self {
            YProfile::Constant => {
                if order == 0 {
                    1.0
                } else {
                    0.0
                }
            }
            YProfile::Gaussian { sigma } => {
                let s2 = sigma * sigma;
                let g = (-y * y / (2.0 * s2)).exp();
                match order {
                    0 => g,
                    1 => -y / s2 * g,
                    2 => (y * y / (s2 * s2) - 1.0 / s2) * g,
                    _ => unimplemented!("only derivatives up to second order are used"),
                }
            }
            YProfile::Polynomial { coeffs } => {
                let mut acc = 0.0;
                for (j, &c) in coeffs.iter().enumerate().rev() {
                    if j < order as usize {
                        break;
                    }
                    let falling: f64 = (0..order as usize).map(|i| (j - i) as f64).product();
                    acc += c * falling * y.powi((j - order as usize) as i32);
                }
                acc
            }
        }
    }

    pub fn eval(&self, y: f64) -> f64 {
        self.eval_derivative(y, 0)
    }
}

/// Gaussian bump `a exp(-((x-x_c)^2 + (y-y_c)^2) / (2 s^2))`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Bump {
    pub amplitude: f64,
    pub x: f64,
    pub y: f64,
    pub width: f64,
}

impl Bump {
    fn envelope(&self, x: f64, y: f64) -> f64 {
        let s2 = self.width * self.width;
        let (u, v) = (x - self.x, y - self.y);
        self.amplitude * (-(u * u + v * v) / (2.0 * s2)).exp()
    }

    pub fn eval(&self, x: f64, y: f64) -> f64 {
        self.envelope(x, y)
    }

    pub fn gradient(&self, x: f64, y: f64) -> (f64, f64) {
        let s2 = self.width * self.width;
        let e = self.envelope(x, y);
        (-(x - self.x) / s2 * e, -(y - self.y) / s2 * e)
    }

    /// Second derivatives `(W_xx, W_yy, W_xy)`.
    pub fn hessian(&self, x: f64, y: f64) -> (f64, f64, f64) {
        let s2 = self.width * self.width;
        let e = self.envelope(x, y);
        let (u, v) = (x - self.x, y - self.y);
        (
            (u * u / (s2 * s2) - 1.0 / s2) * e,
            (v * v / (s2 * s2) - 1.0 / s2) * e,
            u * v / (s2 * s2) * e,
        )
    }
}

/// Values on a uniform rectangular grid, bilinearly interpolated.
///
/// `values` is row-major with `y` as the outer index. With `periodic_x` the
/// grid covers one period (`nx * dx = 2π`, right edge excluded) and column
/// `nx` wraps to column 0. Outside the covered range the potential is zero.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SampledGrid {
    pub x0: f64,
    pub dx: f64,
    pub nx: usize,
    pub y0: f64,
    pub dy: f64,
    pub ny: usize,
    pub values: Vec<f64>,
    #[serde(default)]
    pub periodic_x: bool,
}

/// A potential value plus whether the point fell outside a sampled grid.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Sample {
    pub value: f64,
    pub clipped: bool,
}

impl SampledGrid {
    fn validate(&self) -> Result<()> {
        if self.nx < 2 || self.ny < 2 {
            return Err(Error::invalid("sampled grid needs at least 2x2 points"));
        }
        if !(self.dx > 0.0 && self.dy > 0.0 && self.dx.is_finite() && self.dy.is_finite()) {
            return Err(Error::invalid("sampled grid spacing must be positive"));
        }
        if !(self.x0.is_finite() && self.y0.is_finite()) {
            return Err(Error::invalid("sampled grid origin must be finite"));
        }
        if self.values.len() != self.nx * self.ny {
            return Err(Error::invalid(format!(
                "sampled grid has {} values, expected {}",
                self.values.len(),
                self.nx * self.ny
            )));
        }
        if self.values.iter().any(|v| !v.is_finite()) {
            return Err(Error::invalid("sampled grid values must be finite"));
        }
        if self.periodic_x && ((self.nx as f64 * self.dx) - PERIOD).abs() > 1e-9 {
            return Err(Error::invalid(format!(
                "periodic grid must span one period: nx * dx = {} != 2π",
                self.nx as f64 * self.dx
            )));
        }
        Ok(())
    }

    pub fn value(&self, ix: usize, iy: usize) -> f64 {
        self.values[iy * self.nx + ix]
    }

    pub fn x_max(&self) -> f64 {
        self.x0 + (self.nx - 1) as f64 * self.dx
    }

    pub fn y_max(&self) -> f64 {
        self.y0 + (self.ny - 1) as f64 * self.dy
    }

    pub fn sample(&self, x: f64, y: f64) -> Sample {
        const EDGE: f64 = 1e-12;
        let fy = (y - self.y0) / self.dy;
        if !(fy >= -EDGE && fy <= (self.ny - 1) as f64 + EDGE) {
            return Sample {
                value: 0.0,
                clipped: true,
            };
        }
        let fy = fy.clamp(0.0, (self.ny - 1) as f64);
        let iy0 = (fy.floor() as usize).min(self.ny - 2);
        let ty = fy - iy0 as f64;

        let (ix0, ix1, tx) = if self.periodic_x {
            let fx = ((x - self.x0) / self.dx).rem_euclid(self.nx as f64);
            let ix0 = (fx.floor() as usize).min(self.nx - 1);
            (ix0, (ix0 + 1) % self.nx, fx - ix0 as f64)
        } else {
            let fx = (x - self.x0) / self.dx;
            if !(fx >= -EDGE && fx <= (self.nx - 1) as f64 + EDGE) {
                return Sample {
                    value: 0.0,
                    clipped: true,
                };
            }
            let fx = fx.clamp(0.0, (self.nx - 1) as f64);
            let ix0 = (fx.floor() as usize).min(self.nx - 2);
            (ix0, ix0 + 1, fx - ix0 as f64)
        };

        let v00 = self.value(ix0, iy0);
        let v10 = self.value(ix1, iy0);
        let v01 = self.value(ix0, iy0 + 1);
        let v11 = self.value(ix1, iy0 + 1);
        let value = (1.0 - ty) * ((1.0 - tx) * v00 + tx * v10) + ty * ((1.0 - tx) * v01 + tx * v11);
        Sample {
            value,
            clipped: false,
        }
    }

    /// Reads `(x, y, W)` triples (one per line, comma separated, optional
    /// header) on a rectangular uniform grid. The grid is marked periodic in
    /// `x` when the sampled columns span exactly one period.
    pub fn from_csv_reader(mut reader: impl Read) -> Result<Self> {
        let mut text = String::new();
        reader.read_to_string(&mut text)?;
        let mut triples = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let fields: Vec<&str> = line.split(',').map(str::trim).collect();
            if fields.len() != 3 {
                return Err(Error::Parse(format!(
                    "grid csv line {}: expected 3 columns, found {}",
                    lineno + 1,
                    fields.len()
                )));
            }
            let parsed: std::result::Result<Vec<f64>, _> =
                fields.iter().map(|f| f.parse::<f64>()).collect();
            match parsed {
                Ok(v) => triples.push((v[0], v[1], v[2])),
                Err(_) if triples.is_empty() => continue,
                Err(e) => {
                    return Err(Error::Parse(format!("grid csv line {}: {e}", lineno + 1)));
                }
            }
        }
        Self::from_triples(&triples)
    }

    pub fn from_csv_path(path: &Path) -> Result<Self> {
        let f = std::fs::File::open(path)?;
        Self::from_csv_reader(std::io::BufReader::new(f))
    }

    fn from_triples(triples: &[(f64, f64, f64)]) -> Result<Self> {
        let axis = |sel: fn(&(f64, f64, f64)) -> f64| -> Result<(f64, f64, usize)> {
            let mut v: Vec<f64> = triples.iter().map(sel).collect();
            v.sort_by(f64::total_cmp);
            v.dedup_by(|a, b| (*a - *b).abs() <= 1e-12 * (1.0 + b.abs()));
            if v.len() < 2 {
                return Err(Error::Parse("grid csv needs at least two distinct values per axis".into()));
            }
            let d = (v[v.len() - 1] - v[0]) / (v.len() - 1) as f64;
            for (i, &x) in v.iter().enumerate() {
                if (x - (v[0] + i as f64 * d)).abs() > 1e-9 * (1.0 + d) {
                    return Err(Error::Parse("grid csv axis is not uniformly spaced".into()));
                }
            }
            Ok((v[0], d, v.len()))
        };
        let (x0, dx, nx) = axis(|t| t.0)?;
        let (y0, dy, ny) = axis(|t| t.1)?;
        if triples.len() != nx * ny {
            return Err(Error::Parse(format!(
                "grid csv has {} rows, a {nx}x{ny} grid needs {}",
                triples.len(),
                nx * ny
            )));
        }
        let mut values = vec![f64::NAN; nx * ny];
        for &(x, y, w) in triples {
            let ix = ((x - x0) / dx).round() as usize;
            let iy = ((y - y0) / dy).round() as usize;
            values[iy * nx + ix] = w;
        }
        if values.iter().any(|v| v.is_nan()) {
            return Err(Error::Parse("grid csv does not fill a rectangular grid".into()));
        }
        let grid = SampledGrid {
            x0,
            dx,
            nx,
            y0,
            dy,
            ny,
            values,
            periodic_x: ((nx as f64 * dx) - PERIOD).abs() < 1e-9,
        };
        grid.validate()?;
        Ok(grid)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", try_from = "RawKind")]
pub enum PotentialKind {
    Zero,
    /// `f(x) g(y)` with `f` a real Fourier series.
    XPeriodicFourier { series: FourierSeries, profile: YProfile },
    XOnly { series: FourierSeries },
    YOnly { profile: YProfile },
    LocalizedBumps { bumps: Vec<Bump> },
    GridSampled(SampledGrid),
}

/// Deserialization mirror of [`PotentialKind`] that also accepts a grid given
/// by a CSV path.
#[derive(Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
enum RawKind {
    Zero {},
    XPeriodicFourier { series: FourierSeries, profile: YProfile },
    XOnly { series: FourierSeries },
    YOnly { profile: YProfile },
    LocalizedBumps { bumps: Vec<Bump> },
    GridSampled(SampledGrid),
    GridCsv { path: PathBuf },
}

impl TryFrom<RawKind> for PotentialKind {
    type Error = Error;

    fn try_from(raw: RawKind) -> Result<Self> {
        Ok(match raw {
            RawKind::Zero {} => PotentialKind::Zero,
            RawKind::XPeriodicFourier { series, profile } => {
                PotentialKind::XPeriodicFourier { series, profile }
            }
            RawKind::XOnly { series } => PotentialKind::XOnly { series },
            RawKind::YOnly { profile } => PotentialKind::YOnly { profile },
            RawKind::LocalizedBumps { bumps } => PotentialKind::LocalizedBumps { bumps },
            RawKind::GridSampled(g) => PotentialKind::GridSampled(g),
            RawKind::GridCsv { path } => PotentialKind::GridSampled(SampledGrid::from_csv_path(&path)?),
        })
    }
}

impl PotentialKind {
    fn validate(&self) -> Result<()> {
        match self {
            PotentialKind::Zero | PotentialKind::XOnly { .. } => Ok(()),
            PotentialKind::XPeriodicFourier { profile, .. } | PotentialKind::YOnly { profile } => {
                profile.validate()
            }
            PotentialKind::LocalizedBumps { bumps } => {
                for b in bumps {
                    let finite = [b.amplitude, b.x, b.y, b.width].iter().all(|v| v.is_finite());
                    if !finite || b.width <= 0.0 {
                        return Err(Error::invalid(format!("malformed bump {b:?}")));
                    }
                }
                Ok(())
            }
            PotentialKind::GridSampled(g) => g.validate(),
        }
    }
}

/// A validated potential together with its sup-norm metadata.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "PotentialKind", into = "PotentialKind")]
pub struct PotentialSpec {
    kind: PotentialKind,
    norms: NormEstimates,
}

impl TryFrom<PotentialKind> for PotentialSpec {
    type Error = Error;

    fn try_from(kind: PotentialKind) -> Result<Self> {
        PotentialSpec::new(kind)
    }
}

impl From<PotentialSpec> for PotentialKind {
    fn from(s: PotentialSpec) -> Self {
        s.kind
    }
}

impl PotentialSpec {
    pub fn new(kind: PotentialKind) -> Result<Self> {
        kind.validate()?;
        let norms = estimate_norms(&kind);
        Ok(PotentialSpec { kind, norms })
    }

    pub fn zero() -> Self {
        Self::new(PotentialKind::Zero).expect("zero potential is valid")
    }

    /// `amplitude * cos(k x)`, independent of `y`.
    pub fn cosine_x(amplitude: f64, k: i64) -> Self {
        Self::new(PotentialKind::XOnly {
            series: FourierSeries::cosine(amplitude, k),
        })
        .expect("cosine potential is valid")
    }

    pub fn constant(c: f64) -> Result<Self> {
        Self::new(PotentialKind::XOnly {
            series: FourierSeries::constant(c),
        })
    }

    pub fn single_bump(amplitude: f64, x: f64, y: f64, width: f64) -> Result<Self> {
        Self::new(PotentialKind::LocalizedBumps {
            bumps: vec![Bump {
                amplitude,
                x,
                y,
                width,
            }],
        })
    }

    pub fn kind(&self) -> &PotentialKind {
        &self.kind
    }

    pub fn norms(&self) -> &NormEstimates {
        &self.norms
    }

    pub fn is_zero(&self) -> bool {
        match &self.kind {
            PotentialKind::Zero => true,
            PotentialKind::XOnly { series } | PotentialKind::XPeriodicFourier { series, .. } => {
                series.iter().next().is_none()
            }
            PotentialKind::LocalizedBumps { bumps } => bumps.iter().all(|b| b.amplitude == 0.0),
            PotentialKind::GridSampled(g) => g.values.iter().all(|&v| v == 0.0),
            PotentialKind::YOnly { .. } => false,
        }
    }

    /// Whether `W(x + 2π, y) = W(x, y)` holds by construction.
    pub fn is_x_periodic(&self) -> bool {
        match &self.kind {
            PotentialKind::Zero
            | PotentialKind::XPeriodicFourier { .. }
            | PotentialKind::XOnly { .. }
            | PotentialKind::YOnly { .. } => true,
            PotentialKind::LocalizedBumps { .. } => false,
            PotentialKind::GridSampled(g) => g.periodic_x,
        }
    }

    pub fn sample(&self, x: f64, y: f64) -> Sample {
        let value = match &self.kind {
            PotentialKind::Zero => 0.0,
            PotentialKind::XPeriodicFourier { series, profile } => series.eval(x) * profile.eval(y),
            PotentialKind::XOnly { series } => series.eval(x),
            PotentialKind::YOnly { profile } => profile.eval(y),
            PotentialKind::LocalizedBumps { bumps } => bumps.iter().map(|b| b.eval(x, y)).sum(),
            PotentialKind::GridSampled(g) => return g.sample(x, y),
        };
        Sample {
            value,
            clipped: false,
        }
    }

    pub fn evaluate(&self, x: f64, y: f64) -> f64 {
        self.sample(x, y).value
    }

    /// `(∂_x W, ∂_y W)`. Grid-sampled potentials use central differences of
    /// the interpolant with a step of a hundredth of the grid spacing.
    pub fn gradient(&self, x: f64, y: f64) -> (f64, f64) {
        match &self.kind {
            PotentialKind::Zero => (0.0, 0.0),
            PotentialKind::XPeriodicFourier { series, profile } => (
                series.eval_derivative(x, 1) * profile.eval(y),
                series.eval(x) * profile.eval_derivative(y, 1),
            ),
            PotentialKind::XOnly { series } => (series.eval_derivative(x, 1), 0.0),
            PotentialKind::YOnly { profile } => (0.0, profile.eval_derivative(y, 1)),
            PotentialKind::LocalizedBumps { bumps } => bumps.iter().fold((0.0, 0.0), |acc, b| {
                let g = b.gradient(x, y);
                (acc.0 + g.0, acc.1 + g.1)
            }),
            PotentialKind::GridSampled(g) => {
                let (hx, hy) = (g.dx * 1e-2, g.dy * 1e-2);
                (
                    (g.sample(x + hx, y).value - g.sample(x - hx, y).value) / (2.0 * hx),
                    (g.sample(x, y + hy).value - g.sample(x, y - hy).value) / (2.0 * hy),
                )
            }
        }
    }
}

/// `W(x, y)` for the given descriptor.
pub fn evaluate_potential(spec: &PotentialSpec, x: f64, y: f64) -> f64 {
    spec.evaluate(x, y)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn evaluation_examples() {
        assert_eq!(PotentialSpec::zero().evaluate(1.3, -0.7), 0.0);
        let w = PotentialSpec::cosine_x(2.0, 1);
        assert!((w.evaluate(0.0, 5.0) - 2.0).abs() < 1e-15);
        let bump = PotentialSpec::single_bump(1.0, 0.0, 0.0, 1.0).unwrap();
        assert_eq!(bump.evaluate(0.0, 0.0), 1.0);
    }

    #[test]
    fn fourier_convention() {
        let s = FourierSeries::new([(1, Complex64::new(1.0, 0.0)), (-1, Complex64::new(1.0, 0.0))]).unwrap();
        assert!((s.eval(0.3) - 2.0 * 0.3f64.cos()).abs() < 1e-15);
        let sn = FourierSeries::sine(3.0, 2);
        assert!((sn.eval(0.4) - 3.0 * (0.8f64).sin()).abs() < 1e-14);
        assert!((sn.eval_derivative(0.4, 1) - 6.0 * (0.8f64).cos()).abs() < 1e-13);
        assert!((sn.eval_derivative(0.4, 2) + 12.0 * (0.8f64).sin()).abs() < 1e-13);
    }

    #[test]
    fn non_hermitian_coefficients_rejected() {
        let r = FourierSeries::new([(1, Complex64::new(1.0, 0.0))]);
        assert!(r.is_err());
        let r = FourierSeries::new([(2, Complex64::new(0.0, 1.0)), (-2, Complex64::new(0.0, 1.0))]);
        assert!(r.is_err());
    }

    #[test]
    fn periodic_kinds_are_periodic() {
        let series = FourierSeries::cosine(1.5, 1)
            .plus(&FourierSeries::sine(0.3, 3))
            .plus(&FourierSeries::constant(0.2));
        let specs = [
            PotentialSpec::new(PotentialKind::XPeriodicFourier {
                series: series.clone(),
                profile: YProfile::Gaussian { sigma: 0.7 },
            })
            .unwrap(),
            PotentialSpec::new(PotentialKind::XOnly { series }).unwrap(),
            PotentialSpec::new(PotentialKind::YOnly {
                profile: YProfile::Polynomial {
                    coeffs: vec![0.1, 0.0, 1.0],
                },
            })
            .unwrap(),
        ];
        for spec in &specs {
            let mut worst: f64 = 0.0;
            for i in 0..4096 {
                let x = -PERIOD + 3.0 * PERIOD * i as f64 / 4096.0;
                let y = -2.0 + 4.0 * ((i * 37) % 4096) as f64 / 4096.0;
                worst = worst.max((spec.evaluate(x + PERIOD, y) - spec.evaluate(x, y)).abs());
            }
            assert!(worst < 1e-12, "{worst}");
        }
    }

    #[test]
    fn grid_bilinear_and_clipping() {
        let g = SampledGrid {
            x0: 0.0,
            dx: 1.0,
            nx: 2,
            y0: 0.0,
            dy: 1.0,
            ny: 2,
            values: vec![0.0, 1.0, 2.0, 3.0],
            periodic_x: false,
        };
        let spec = PotentialSpec::new(PotentialKind::GridSampled(g)).unwrap();
        assert!((spec.evaluate(0.5, 0.5) - 1.5).abs() < 1e-15);
        assert_eq!(spec.evaluate(1.0, 1.0), 3.0);
        let s = spec.sample(0.5, 1.5);
        assert!(s.clipped);
        assert_eq!(s.value, 0.0);
        assert!(!spec.sample(0.5, 0.2).clipped);
    }

    #[test]
    fn grid_periodic_wraps() {
        let nx = 8;
        let dx = PERIOD / nx as f64;
        let mut values = Vec::new();
        for iy in 0..3 {
            for ix in 0..nx {
                values.push((ix as f64 * dx).cos() + iy as f64);
            }
        }
        let g = SampledGrid {
            x0: 0.0,
            dx,
            nx,
            y0: -1.0,
            dy: 1.0,
            ny: 3,
            values,
            periodic_x: true,
        };
        let spec = PotentialSpec::new(PotentialKind::GridSampled(g)).unwrap();
        for &x in &[0.1, 2.0, 6.2, -0.3] {
            assert!((spec.evaluate(x + PERIOD, 0.3) - spec.evaluate(x, 0.3)).abs() < 1e-12);
        }
        // between the last column and the wrapped first one
        let x = PERIOD - dx / 2.0;
        let expected = 0.5 * ((7.0 * dx).cos() + 1.0) + 1.0;
        assert!((spec.evaluate(x, 0.0) - expected).abs() < 1e-12);
    }

    #[test]
    fn grid_csv_parsing() {
        let csv = "x,y,W\n0,0,1\n1,0,2\n0,1,3\n1,1,4\n";
        let g = SampledGrid::from_csv_reader(csv.as_bytes()).unwrap();
        assert_eq!((g.nx, g.ny), (2, 2));
        assert_eq!(g.values, vec![1.0, 2.0, 3.0, 4.0]);
        assert!(!g.periodic_x);
        assert!(SampledGrid::from_csv_reader("0,0,1\n1,0,2\n0,1,3\n".as_bytes()).is_err());
        assert!(SampledGrid::from_csv_reader("0,0,1\n1,0\n".as_bytes()).is_err());
    }

    #[test]
    fn json_schema_round_trip() {
        let text = r#"{"kind":"x_periodic_fourier",
            "series":[{"k":1,"re":1.0},{"k":-1,"re":1.0}],
            "profile":{"kind":"gaussian","sigma":0.5}}"#;
        let spec: PotentialSpec = serde_json::from_str(text).unwrap();
        assert!((spec.evaluate(0.0, 0.0) - 2.0).abs() < 1e-15);
        let back: PotentialSpec = serde_json::from_str(&serde_json::to_string(&spec).unwrap()).unwrap();
        assert_eq!(spec, back);

        let bad = r#"{"kind":"zero","extra":1}"#;
        assert!(serde_json::from_str::<PotentialSpec>(bad).is_err());
        let bad = r#"{"kind":"localized_bumps","bumps":[{"amplitude":1,"x":0,"y":0,"width":-1}]}"#;
        assert!(serde_json::from_str::<PotentialSpec>(bad).is_err());
    }

    #[test]
    fn polynomial_profile_derivatives() {
        let p = YProfile::Polynomial {
            coeffs: vec![1.0, -2.0, 0.5, 1.0],
        };
        let y = 1.7;
        assert!((p.eval(y) - (1.0 - 2.0 * y + 0.5 * y * y + y * y * y)).abs() < 1e-12);
        assert!((p.eval_derivative(y, 1) - (-2.0 + y + 3.0 * y * y)).abs() < 1e-12);
        assert!((p.eval_derivative(y, 2) - (1.0 + 6.0 * y)).abs() < 1e-12);
        assert_eq!(p.degree(), Some(3));
    }
}
