//! Sup-norm metadata for potentials.
//!
//! Every value is an upper bound. Closed forms are used where the kind allows
//! (zero, single bump, single harmonic); otherwise the sup over a dense grid
//! is padded by `L h / 2` with the Lipschitz constant `L` estimated from
//! finite differences, and combined with triangle-inequality bounds.

use serde::{Serialize, Serializer};

use super::potential::{Bump, FourierSeries, PotentialKind, SampledGrid, YProfile, PERIOD};

/// An upper bound that may be infinite (the quantity is unbounded) or
/// unavailable (not defined for this kind, e.g. second derivatives of a
/// bilinear interpolant).
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum NormBound {
    Finite(f64),
    Infinite,
    Unavailable,
}

impl NormBound {
    pub fn value(self) -> Option<f64> {
        match self {
            NormBound::Finite(v) => Some(v),
            _ => None,
        }
    }

    pub fn is_finite(self) -> bool {
        matches!(self, NormBound::Finite(_))
    }

    /// The bound as a float: `+inf` for infinite, NaN when unavailable.
    pub fn as_f64(self) -> f64 {
        match self {
            NormBound::Finite(v) => v,
            NormBound::Infinite => f64::INFINITY,
            NormBound::Unavailable => f64::NAN,
        }
    }

    fn times(self, other: NormBound) -> NormBound {
        use NormBound::*;
        match (self, other) {
            (Finite(a), Finite(b)) => Finite(a * b),
            (Finite(z), Infinite) | (Infinite, Finite(z)) if z == 0.0 => Finite(0.0),
            (Unavailable, _) | (_, Unavailable) => Unavailable,
            _ => Infinite,
        }
    }

    fn plus(self, other: NormBound) -> NormBound {
        use NormBound::*;
        match (self, other) {
            (Finite(a), Finite(b)) => Finite(a + b),
            (Unavailable, _) | (_, Unavailable) => Unavailable,
            _ => Infinite,
        }
    }

    fn min_finite(self, v: f64) -> NormBound {
        match self {
            NormBound::Finite(a) => NormBound::Finite(a.min(v)),
            _ => NormBound::Finite(v),
        }
    }
}

impl Serialize for NormBound {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            NormBound::Finite(v) => s.serialize_f64(*v),
            NormBound::Infinite => s.serialize_str("inf"),
            NormBound::Unavailable => s.serialize_none(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct NormEstimates {
    /// `‖W‖_∞`.
    pub w0: NormBound,
    /// `‖x ∂_x W‖_∞`.
    pub w0_prime: NormBound,
    pub d2x: NormBound,
    pub d2y: NormBound,
    pub dxdy: NormBound,
    /// `‖x² ∂²_x W‖_∞`.
    pub x2_d2x: NormBound,
    /// True when `w0` and `w0_prime` are closed forms rather than padded grid
    /// bounds.
    pub exact: bool,
}

impl NormEstimates {
    fn zero() -> Self {
        let z = NormBound::Finite(0.0);
        NormEstimates {
            w0: z,
            w0_prime: z,
            d2x: z,
            d2y: z,
            dxdy: z,
            x2_d2x: z,
            exact: true,
        }
    }
}

pub(crate) fn estimate_norms(kind: &PotentialKind) -> NormEstimates {
    match kind {
        PotentialKind::Zero => NormEstimates::zero(),
        PotentialKind::XOnly { series } => separable(series, &YProfile::Constant),
        PotentialKind::XPeriodicFourier { series, profile } => separable(series, profile),
        PotentialKind::YOnly { profile } => {
            let (g0, _, g2) = profile_sups(profile);
            NormEstimates {
                w0: g0,
                d2y: g2,
                ..NormEstimates::zero()
            }
        }
        PotentialKind::LocalizedBumps { bumps } => bumps_norms(bumps),
        PotentialKind::GridSampled(g) => grid_norms(g),
    }
}

fn separable(series: &FourierSeries, profile: &YProfile) -> NormEstimates {
    let (g0, g1, g2) = profile_sups(profile);
    let (f0, exact) = fourier_sup(series);
    let f1 = NormBound::Finite(series.weighted_abs_sum(1));
    let f2 = NormBound::Finite(series.weighted_abs_sum(2));
    let x_dependent = !series.is_constant() && g0 != NormBound::Finite(0.0);
    let localized = if x_dependent {
        NormBound::Infinite
    } else {
        NormBound::Finite(0.0)
    };
    NormEstimates {
        w0: f0.times(g0),
        w0_prime: localized,
        d2x: f2.times(g0),
        d2y: f0.times(g2),
        dxdy: f1.times(g1),
        x2_d2x: localized,
        exact: exact || series.exact_sup().is_some(),
    }
}

/// `sup |f|` for a Fourier series: exact for one harmonic pair, otherwise the
/// smaller of `Σ|c_k|` and a padded 4096-point grid maximum.
fn fourier_sup(series: &FourierSeries) -> (NormBound, bool) {
    if let Some(v) = series.exact_sup() {
        return (NormBound::Finite(v), true);
    }
    let n = 4096;
    let h = PERIOD / n as f64;
    let grid_max = (0..n)
        .map(|j| series.eval(j as f64 * h).abs())
        .fold(0.0, f64::max);
    let lipschitz = series.weighted_abs_sum(1);
    let padded = grid_max + lipschitz * h / 2.0;
    (NormBound::Finite(padded.min(series.weighted_abs_sum(0))), false)
}

/// `(sup|g|, sup|g'|, sup|g''|)`.
fn profile_sups(profile: &YProfile) -> (NormBound, NormBound, NormBound) {
    use NormBound::*;
    match profile {
        YProfile::Constant => (Finite(1.0), Finite(0.0), Finite(0.0)),
        YProfile::Gaussian { sigma } => (
            Finite(1.0),
            Finite((-0.5f64).exp() / sigma),
            Finite(1.0 / (sigma * sigma)),
        ),
        YProfile::Polynomial { coeffs } => {
            let c = |j: usize| coeffs.get(j).copied().unwrap_or(0.0);
            match profile.degree().unwrap_or(0) {
                0 => (Finite(c(0).abs()), Finite(0.0), Finite(0.0)),
                1 => (Infinite, Finite(c(1).abs()), Finite(0.0)),
                2 => (Infinite, Infinite, Finite(2.0 * c(2).abs())),
                _ => (Infinite, Infinite, Infinite),
            }
        }
    }
}

/// Real roots of `x³ + a x² + b x + c`.
fn monic_cubic_roots(a: f64, b: f64, c: f64) -> Vec<f64> {
    let q = (a * a - 3.0 * b) / 9.0;
    let r = (2.0 * a * a * a - 9.0 * a * b + 27.0 * c) / 54.0;
    let shift = a / 3.0;
    if r * r < q * q * q {
        let t = (r / q.powf(1.5)).clamp(-1.0, 1.0).acos();
        let m = -2.0 * q.sqrt();
        (0..3)
            .map(|j| m * ((t + 2.0 * std::f64::consts::PI * j as f64) / 3.0).cos() - shift)
            .collect()
    } else {
        let big_a = -r.signum() * (r.abs() + (r * r - q * q * q).sqrt()).cbrt();
        let big_b = if big_a != 0.0 { q / big_a } else { 0.0 };
        vec![big_a + big_b - shift]
    }
}

/// `sup_x |x ∂_x W|` for one bump; the maximum over `y` sits on the bump's
/// centre line, and the critical points in `u = x - x_c` solve
/// `u³ + x_c u² - 2 s² u - x_c s² = 0`.
fn bump_w0_prime(b: &Bump) -> f64 {
    let s2 = b.width * b.width;
    let f = |u: f64| ((u + b.x) * u).abs() / s2 * (-u * u / (2.0 * s2)).exp();
    monic_cubic_roots(b.x, -2.0 * s2, -b.x * s2)
        .into_iter()
        .map(|u| {
            // polish the root against cancellation in the closed form
            let mut u = u;
            for _ in 0..3 {
                let p = u * u * u + b.x * u * u - 2.0 * s2 * u - b.x * s2;
                let dp = 3.0 * u * u + 2.0 * b.x * u - 2.0 * s2;
                if dp.abs() > 0.0 {
                    u -= p / dp;
                }
            }
            f(u)
        })
        .fold(0.0, f64::max)
        * b.amplitude.abs()
}

/// Padded maximum of `|f|` on `[lo, hi]` sampled at `n + 1` points.
pub(crate) fn certified_sup_1d(f: impl Fn(f64) -> f64, lo: f64, hi: f64, n: usize) -> f64 {
    let h = (hi - lo) / n as f64;
    let vals: Vec<f64> = (0..=n).map(|i| f(lo + i as f64 * h)).collect();
    let max = vals.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let slope = vals
        .windows(2)
        .map(|w| (w[1] - w[0]).abs() / h)
        .fold(0.0, f64::max);
    max + 1.25 * slope * h / 2.0
}

/// Padded maximum of `|f|` on a rectangle with `n + 1` nodes per axis.
pub(crate) fn certified_sup_2d(
    f: impl Fn(f64, f64) -> f64,
    (x_lo, x_hi): (f64, f64),
    (y_lo, y_hi): (f64, f64),
    n: usize,
) -> f64 {
    let hx = (x_hi - x_lo) / n as f64;
    let hy = (y_hi - y_lo) / n as f64;
    let mut vals = vec![0.0; (n + 1) * (n + 1)];
    for j in 0..=n {
        for i in 0..=n {
            vals[j * (n + 1) + i] = f(x_lo + i as f64 * hx, y_lo + j as f64 * hy);
        }
    }
    let at = |i: usize, j: usize| vals[j * (n + 1) + i];
    let (mut max, mut lx, mut ly) = (0.0f64, 0.0f64, 0.0f64);
    for j in 0..=n {
        for i in 0..=n {
            max = max.max(at(i, j).abs());
            if i < n {
                lx = lx.max((at(i + 1, j) - at(i, j)).abs() / hx);
            }
            if j < n {
                ly = ly.max((at(i, j + 1) - at(i, j)).abs() / hy);
            }
        }
    }
    max + 1.25 * (lx * hx + ly * hy) / 2.0
}

fn bumps_norms(bumps: &[Bump]) -> NormEstimates {
    use NormBound::Finite;
    if bumps.is_empty() {
        return NormEstimates::zero();
    }
    let single: Vec<NormEstimates> = bumps
        .iter()
        .map(|b| {
            let a = b.amplitude.abs();
            let s = b.width;
            let s2 = s * s;
            let x2_d2x = certified_sup_1d(
                |u| (u + b.x).powi(2) * (u * u / s2 - 1.0) / s2 * (-u * u / (2.0 * s2)).exp(),
                -14.0 * s,
                14.0 * s,
                20_000,
            );
            NormEstimates {
                w0: Finite(a),
                w0_prime: Finite(bump_w0_prime(b)),
                d2x: Finite(a / s2),
                d2y: Finite(a / s2),
                dxdy: Finite(a / (std::f64::consts::E * s2)),
                x2_d2x: Finite(a * x2_d2x),
                exact: true,
            }
        })
        .collect();
    if single.len() == 1 {
        return single[0];
    }

    let mut total = NormEstimates::zero();
    for e in &single {
        total.w0 = total.w0.plus(e.w0);
        total.w0_prime = total.w0_prime.plus(e.w0_prime);
        total.d2x = total.d2x.plus(e.d2x);
        total.d2y = total.d2y.plus(e.d2y);
        total.dxdy = total.dxdy.plus(e.dxdy);
        total.x2_d2x = total.x2_d2x.plus(e.x2_d2x);
    }
    total.exact = false;

    let reach = |c: fn(&Bump) -> f64| {
        let lo = bumps.iter().map(|b| c(b) - 10.0 * b.width).fold(f64::INFINITY, f64::min);
        let hi = bumps.iter().map(|b| c(b) + 10.0 * b.width).fold(f64::NEG_INFINITY, f64::max);
        (lo, hi)
    };
    let xr = reach(|b| b.x);
    let yr = reach(|b| b.y);
    let s_min = bumps.iter().map(|b| b.width).fold(f64::INFINITY, f64::min);
    let span = (xr.1 - xr.0).max(yr.1 - yr.0);
    let n = ((8.0 * span / s_min).ceil() as usize).clamp(200, 1200);
    // beyond ten widths every bump is below e^-50 of its amplitude
    let tail: f64 = bumps.iter().map(|b| b.amplitude.abs()).sum::<f64>() * (-50.0f64).exp();
    let w = |x: f64, y: f64| bumps.iter().map(|b| b.eval(x, y)).sum::<f64>();
    let xwx = |x: f64, y: f64| x * bumps.iter().map(|b| b.gradient(x, y).0).sum::<f64>();
    let x_extent = xr.0.abs().max(xr.1.abs());
    total.w0 = total.w0.min_finite(certified_sup_2d(w, xr, yr, n) + tail);
    total.w0_prime = total
        .w0_prime
        .min_finite(certified_sup_2d(xwx, xr, yr, n) + tail * (1.0 + x_extent * x_extent));
    total
}

fn grid_norms(g: &SampledGrid) -> NormEstimates {
    use NormBound::*;
    let w0 = g.values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let x_constant = (0..g.ny).all(|iy| {
        let first = g.value(0, iy);
        (1..g.nx).all(|ix| g.value(ix, iy) == first)
    });
    let w0_prime = if x_constant && !g.periodic_x && w0 > 0.0 {
        // a localized grid that is nonzero at its x edges jumps to zero there
        Infinite
    } else if x_constant {
        Finite(0.0)
    } else if g.periodic_x {
        Infinite
    } else {
        let edge_nonzero = (0..g.ny).any(|iy| g.value(0, iy) != 0.0 || g.value(g.nx - 1, iy) != 0.0);
        if edge_nonzero {
            Infinite
        } else {
            // ∂_x of the bilinear interpolant is piecewise linear in y, so
            // its extremes sit on cell corners
            let mut sup = 0.0f64;
            for iy in 0..g.ny {
                for ix in 0..g.nx - 1 {
                    let slope = (g.value(ix + 1, iy) - g.value(ix, iy)).abs() / g.dx;
                    let xa = (g.x0 + ix as f64 * g.dx).abs();
                    let xb = (g.x0 + (ix + 1) as f64 * g.dx).abs();
                    sup = sup.max(slope * xa.max(xb));
                }
            }
            Finite(sup)
        }
    };
    NormEstimates {
        w0: Finite(w0),
        w0_prime,
        d2x: Unavailable,
        d2y: Unavailable,
        dxdy: Unavailable,
        x2_d2x: Unavailable,
        exact: true,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::potential::PotentialSpec;

    #[test]
    fn cubic_roots() {
        // (x-1)(x-2)(x+3) = x³ - 7x + 6
        let mut r = monic_cubic_roots(0.0, -7.0, 6.0);
        r.sort_by(f64::total_cmp);
        assert!((r[0] + 3.0).abs() < 1e-12 && (r[1] - 1.0).abs() < 1e-12 && (r[2] - 2.0).abs() < 1e-12);
        let r = monic_cubic_roots(0.0, 0.0, -8.0);
        assert_eq!(r.len(), 1);
        assert!((r[0] - 2.0).abs() < 1e-12);
    }

    #[test]
    fn zero_potential() {
        let n = *PotentialSpec::zero().norms();
        assert_eq!(n.w0, NormBound::Finite(0.0));
        assert_eq!(n.w0_prime, NormBound::Finite(0.0));
    }

    #[test]
    fn single_centred_bump_matches_calculus() {
        let spec = PotentialSpec::single_bump(1.0, 0.0, 0.0, 1.0).unwrap();
        let n = spec.norms();
        assert_eq!(n.w0, NormBound::Finite(1.0));
        let oracle = (0..=200_000)
            .map(|i| {
                let x = -10.0 + 20.0 * i as f64 / 200_000.0;
                x * x * (-x * x / 2.0).exp()
            })
            .fold(0.0, f64::max);
        let w0p = n.w0_prime.value().unwrap();
        assert!((w0p - 2.0 / std::f64::consts::E).abs() < 1e-12);
        assert!((w0p - oracle).abs() < 1e-8);
        assert_eq!(n.d2x, NormBound::Finite(1.0));
        assert!(n.x2_d2x.value().unwrap() >= 0.0);
    }

    #[test]
    fn off_centre_bump_w0_prime_against_grid() {
        let b = Bump {
            amplitude: -0.7,
            x: 1.5,
            y: 0.2,
            width: 0.6,
        };
        let exact = bump_w0_prime(&b);
        let s2 = b.width * b.width;
        let grid = (0..=400_000)
            .map(|i| {
                let x = -8.0 + 16.0 * i as f64 / 400_000.0;
                let u = x - b.x;
                (x * u / s2 * (-u * u / (2.0 * s2)).exp()).abs() * 0.7
            })
            .fold(0.0, f64::max);
        assert!(exact >= grid - 1e-12);
        assert!((exact - grid).abs() < 1e-8, "{exact} vs {grid}");
    }

    #[test]
    fn pure_cosine_is_non_localized() {
        let n = *PotentialSpec::cosine_x(2.0, 1).norms();
        assert_eq!(n.w0, NormBound::Finite(2.0));
        assert_eq!(n.w0_prime, NormBound::Infinite);
        assert_eq!(n.d2x, NormBound::Finite(2.0));
        assert!(n.exact);
    }

    #[test]
    fn constant_potential_is_localized() {
        let n = *PotentialSpec::constant(1.0).unwrap().norms();
        assert_eq!(n.w0, NormBound::Finite(1.0));
        assert_eq!(n.w0_prime, NormBound::Finite(0.0));
    }

    #[test]
    fn serializes_infinite_flag() {
        let n = *PotentialSpec::cosine_x(2.0, 1).norms();
        let s = serde_json::to_value(n).unwrap();
        assert_eq!(s["w0_prime"], "inf");
        assert_eq!(s["w0"], 2.0);
    }
}
