//! Transport certificate: excluded intervals `I(α, δ)` around the modified
//! Landau levels `(2n+1)α`, the two smallness conditions on `W`, the
//! certified set `{λ <= E} \ I(α, δ+ε)`, and numerical checks of the
//! relative bounds of `H₀` used to derive them.
//!
//! With `C(ω, B) = c(1+α²)/ω²` the conditions read
//!
//! ```text
//! (I)   W₀ < δ / (2 (δ/α + β C) (1 + E/ε))
//! (II)  W₀' + B α⁻² sqrt(c C) W₀ (E + W₀) < δ/2
//! ```

use std::fmt::Write as _;
use std::io::Write;

use nalgebra::{DMatrix, Matrix2, SymmetricEigen};
use rayon::prelude::*;
use serde::Serialize;

use crate::bands::theta_grid;
use crate::error::{Error, Result};
use crate::linalg::spectral_norm;
use crate::model::{ChannelParams, NormBound, PotentialSpec};

/// The constant `c` of the relative bounds.
pub const SQRT6: f64 = 2.449_489_742_783_178;

const NORM_SLACK: f64 = 1e-6;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
    pub lo_closed: bool,
    pub hi_closed: bool,
}

impl Interval {
    pub fn closed(lo: f64, hi: f64) -> Self {
        Interval {
            lo,
            hi,
            lo_closed: true,
            hi_closed: true,
        }
    }

    pub fn length(&self) -> f64 {
        (self.hi - self.lo).max(0.0)
    }

    pub fn contains(&self, x: f64) -> bool {
        (x > self.lo || (self.lo_closed && x == self.lo)) && (x < self.hi || (self.hi_closed && x == self.hi))
    }
}

/// `[(2n+1)α - δ, (2n+1)α + δ]` for every `n` whose interval starts at or
/// below `ceiling`.
pub fn excluded_intervals(params: &ChannelParams, delta: f64, ceiling: f64) -> Result<Vec<Interval>> {
    let a = params.alpha();
    if !(delta > 0.0 && delta < a) {
        return Err(Error::invalid(format!("need 0 < delta < alpha = {a}, got {delta}")));
    }
    Ok(level_neighbourhoods(a, delta, ceiling))
}

fn level_neighbourhoods(a: f64, radius: f64, ceiling: f64) -> Vec<Interval> {
    (0..)
        .map(|n| a * (2 * n + 1) as f64)
        .take_while(|level| level - radius <= ceiling)
        .map(|level| Interval::closed(level - radius, level + radius))
        .collect()
}

/// `[lower, upper]` minus a sorted list of closed intervals. Boundary points
/// of removed intervals are excluded.
fn complement(lower: f64, upper: f64, removed: &[Interval]) -> Vec<Interval> {
    let mut out = Vec::new();
    let mut cur = lower;
    let mut cur_closed = true;
    for r in removed {
        if r.hi < cur || (r.hi == cur && !cur_closed) {
            continue;
        }
        if r.lo > upper {
            break;
        }
        if r.lo > cur {
            out.push(Interval {
                lo: cur,
                hi: r.lo,
                lo_closed: cur_closed,
                hi_closed: false,
            });
        }
        if r.hi > cur || cur_closed {
            cur = r.hi;
            cur_closed = false;
        }
    }
    if upper > cur || (upper == cur && cur_closed) {
        out.push(Interval {
            lo: cur,
            hi: upper,
            lo_closed: cur_closed,
            hi_closed: true,
        });
    }
    out
}

/// `C(ω, B) = c (1 + α²) / ω²`.
pub fn relative_bound_constant(params: &ChannelParams, c: f64) -> f64 {
    c * (1.0 + params.alpha().powi(2)) / params.omega().powi(2)
}

/// Right side of condition (I).
pub fn condition_i_threshold(params: &ChannelParams, e: f64, delta: f64, eps: f64, c: f64) -> f64 {
    let big_c = relative_bound_constant(params, c);
    delta / (2.0 * (delta / params.alpha() + params.beta() * big_c) * (1.0 + e / eps))
}

/// Left side of condition (II); infinite when `W₀'` is.
pub fn condition_ii_lhs(params: &ChannelParams, e: f64, w0: f64, w0_prime: f64, c: f64) -> f64 {
    let big_c = relative_bound_constant(params, c);
    w0_prime + params.b() / params.alpha().powi(2) * (c * big_c).sqrt() * w0 * (e + w0)
}

#[derive(Clone, Debug, Serialize)]
pub struct MourreReport {
    pub params: ChannelParams,
    #[serde(rename = "E")]
    pub e: f64,
    pub delta: f64,
    pub eps: f64,
    pub c: f64,
    pub big_c: f64,
    pub w0: NormBound,
    pub w0_prime: NormBound,
    /// `I(α, δ+ε)` up to `E`.
    pub i_intervals: Vec<Interval>,
    pub intervals_disjoint: bool,
    pub condition_i_threshold: f64,
    pub condition_i_holds: bool,
    pub condition_ii_lhs: f64,
    pub condition_ii_rhs: f64,
    pub condition_ii_holds: bool,
    pub w0_below_alpha: bool,
    pub e_outside_intervals: bool,
    pub admissible: bool,
    pub reasons: Vec<String>,
    /// Lower end of the certified set: `α - W₀`, a lower bound of the
    /// spectrum.
    pub spectral_lower_bound: f64,
    pub certified_set: Vec<Interval>,
}

impl MourreReport {
    pub fn certified_length(&self) -> f64 {
        self.certified_set.iter().map(Interval::length).sum()
    }

    pub fn summary(&self) -> String {
        let mut s = String::new();
        let p = &self.params;
        let _ = writeln!(s, "B = {}, omega = {}, alpha = {:.6}, beta = {:.6}", p.b(), p.omega(), p.alpha(), p.beta());
        let _ = writeln!(s, "E = {}, delta = {}, eps = {}, c = {:.6}, C = {:.6}", self.e, self.delta, self.eps, self.c, self.big_c);
        let _ = writeln!(s, "W0 = {}, W0' = {}", fmt_bound(self.w0), fmt_bound(self.w0_prime));
        let _ = writeln!(
            s,
            "condition (I):  W0 < {:.6e}  {}",
            self.condition_i_threshold,
            verdict(self.condition_i_holds)
        );
        let _ = writeln!(
            s,
            "condition (II): {:.6e} < {:.6e}  {}",
            self.condition_ii_lhs,
            self.condition_ii_rhs,
            verdict(self.condition_ii_holds)
        );
        let _ = writeln!(s, "W0 < alpha: {}", verdict(self.w0_below_alpha));
        let _ = writeln!(s, "E outside I(alpha, delta+eps): {}", verdict(self.e_outside_intervals));
        if self.admissible {
            let _ = writeln!(s, "admissible; certified set:");
            for iv in &self.certified_set {
                let _ = writeln!(
                    s,
                    "  {}{:.6}, {:.6}{}",
                    if iv.lo_closed { '[' } else { '(' },
                    iv.lo,
                    iv.hi,
                    if iv.hi_closed { ']' } else { ')' }
                );
            }
        } else {
            let _ = writeln!(s, "inadmissible: {}", self.reasons.join("; "));
        }
        s
    }

    /// Rows `set,lo,hi,lo_closed,hi_closed` for the excluded and certified
    /// intervals.
    pub fn write_intervals_csv(&self, mut out: impl Write) -> std::io::Result<()> {
        writeln!(out, "set,lo,hi,lo_closed,hi_closed")?;
        for (name, set) in [("excluded", &self.i_intervals), ("certified", &self.certified_set)] {
            for iv in set {
                writeln!(out, "{name},{},{},{},{}", iv.lo, iv.hi, iv.lo_closed, iv.hi_closed)?;
            }
        }
        Ok(())
    }
}

fn fmt_bound(b: NormBound) -> String {
    match b {
        NormBound::Finite(v) => format!("{v:.6e}"),
        NormBound::Infinite => "inf".into(),
        NormBound::Unavailable => "unavailable".into(),
    }
}

fn verdict(ok: bool) -> &'static str {
    if ok {
        "holds"
    } else {
        "fails"
    }
}

/// Evaluates both conditions with `c = √6`.
pub fn evaluate_certificate(
    params: &ChannelParams,
    spec: &PotentialSpec,
    e: f64,
    delta: f64,
    eps: f64,
) -> Result<MourreReport> {
    evaluate_certificate_with(params, spec, e, delta, eps, SQRT6)
}

pub fn evaluate_certificate_with(
    params: &ChannelParams,
    spec: &PotentialSpec,
    e: f64,
    delta: f64,
    eps: f64,
    c: f64,
) -> Result<MourreReport> {
    for (name, v) in [("delta", delta), ("eps", eps), ("c", c)] {
        if !(v > 0.0 && v.is_finite()) {
            return Err(Error::invalid(format!("{name} must be positive, got {v}")));
        }
    }
    if !e.is_finite() {
        return Err(Error::invalid("energy E must be finite"));
    }
    let a = params.alpha();
    let norms = spec.norms();
    let (w0, w0_prime) = (norms.w0, norms.w0_prime);
    let mut reasons = Vec::new();

    let radius = delta + eps;
    let i_intervals = level_neighbourhoods(a, radius, e);
    let intervals_disjoint = radius < a;
    if !intervals_disjoint {
        reasons.push(format!("I(alpha, delta+eps) intervals overlap (delta+eps = {radius} >= alpha = {a})"));
    }
    let e_outside_intervals = !i_intervals.iter().any(|iv| iv.contains(e));
    if !e_outside_intervals {
        reasons.push(format!("E = {e} lies in I(alpha, delta+eps)"));
    }

    let threshold = condition_i_threshold(params, e, delta, eps, c);
    let (condition_i_holds, w0_below_alpha, w0_val) = match w0 {
        NormBound::Finite(v) => (v < threshold, v < a, v),
        _ => (false, false, f64::INFINITY),
    };
    if !w0.is_finite() {
        reasons.push("W0 unbounded".into());
    } else {
        if !condition_i_holds {
            reasons.push(format!("condition (I) violated: W0 = {w0_val:.6e} >= {threshold:.6e}"));
        }
        if !w0_below_alpha {
            reasons.push(format!("condition (a) violated: W0 = {w0_val:.6e} >= alpha"));
        }
    }
    let rhs = delta / 2.0;
    let lhs = match (w0, w0_prime) {
        (NormBound::Finite(v), NormBound::Finite(vp)) => condition_ii_lhs(params, e, v, vp, c),
        _ => f64::INFINITY,
    };
    let condition_ii_holds = lhs < rhs;
    if !w0_prime.is_finite() {
        reasons.push("localization condition (a) violated: sup |x dW/dx| is not finite".into());
    } else if !condition_ii_holds {
        reasons.push(format!("condition (II) violated: {lhs:.6e} >= {rhs:.6e}"));
    }

    let spectral_lower_bound = if w0_val.is_finite() { a - w0_val } else { f64::NEG_INFINITY };
    let certified_set = if spectral_lower_bound.is_finite() && e >= spectral_lower_bound {
        complement(spectral_lower_bound, e, &i_intervals)
    } else {
        Vec::new()
    };
    // a vacuous certificate is not reported as admissible
    if spectral_lower_bound.is_finite() && certified_set.iter().map(Interval::length).sum::<f64>() <= 0.0 {
        reasons.push(format!("certified set is empty (E = {e} below the admissible range)"));
    }
    let admissible = reasons.is_empty();

    Ok(MourreReport {
        params: *params,
        e,
        delta,
        eps,
        c,
        big_c: relative_bound_constant(params, c),
        w0,
        w0_prime,
        i_intervals,
        intervals_disjoint,
        condition_i_threshold: threshold,
        condition_i_holds,
        condition_ii_lhs: lhs,
        condition_ii_rhs: rhs,
        condition_ii_holds,
        w0_below_alpha,
        e_outside_intervals,
        admissible,
        reasons,
        spectral_lower_bound,
        certified_set,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct ScalingRow {
    pub omega: f64,
    pub alpha: f64,
    #[serde(rename = "E")]
    pub e: f64,
    pub delta: f64,
    pub eps: f64,
    pub condition_i_threshold: f64,
    /// `δ/2 - lhs(II)`.
    pub condition_ii_slack: f64,
    pub e_outside_intervals: bool,
    pub admissible: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct ScalingTable {
    pub rows: Vec<ScalingRow>,
    pub thresholds_increasing: bool,
    pub slack_increasing: bool,
    pub first_admissible_omega: Option<f64>,
}

/// Certificates at `E = E₀α`, `δ = δ₀α`, `ε = ε₀α` along increasing `ω`.
pub fn scaling_sweep(
    b: f64,
    e0: f64,
    delta0: f64,
    eps0: f64,
    spec: &PotentialSpec,
    omega_list: &[f64],
) -> Result<ScalingTable> {
    let mut omegas = omega_list.to_vec();
    omegas.sort_by(f64::total_cmp);
    let rows: Vec<ScalingRow> = omegas
        .par_iter()
        .map(|&omega| -> Result<ScalingRow> {
            let p = ChannelParams::new(b, omega)?;
            let a = p.alpha();
            let r = evaluate_certificate(&p, spec, e0 * a, delta0 * a, eps0 * a)?;
            Ok(ScalingRow {
                omega,
                alpha: a,
                e: r.e,
                delta: r.delta,
                eps: r.eps,
                condition_i_threshold: r.condition_i_threshold,
                condition_ii_slack: r.condition_ii_rhs - r.condition_ii_lhs,
                e_outside_intervals: r.e_outside_intervals,
                admissible: r.admissible,
            })
        })
        .collect::<Result<_>>()?;
    let thresholds_increasing = rows
        .windows(2)
        .all(|w| w[1].condition_i_threshold > w[0].condition_i_threshold);
    let slack_increasing = rows
        .windows(2)
        .all(|w| w[1].condition_ii_slack > w[0].condition_ii_slack || w[0].condition_ii_slack.is_infinite());
    let first_admissible_omega = rows.iter().find(|r| r.admissible).map(|r| r.omega);
    Ok(ScalingTable {
        rows,
        thresholds_increasing,
        slack_increasing,
        first_admissible_omega,
    })
}

/// `λ± = (1 + α² ± sqrt((1+α²)² - 4ω²)) / 2`, the eigenvalues of the
/// quadratic form `u² + 2Buv + α²v²`.
pub fn appendix_eigenvalues(params: &ChannelParams) -> (f64, f64) {
    let s = 1.0 + params.alpha().powi(2);
    let disc = (s * s - 4.0 * params.omega().powi(2)).max(0.0).sqrt();
    ((s + disc) / 2.0, (s - disc) / 2.0)
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct NormCheck {
    pub name: &'static str,
    pub estimate: f64,
    pub bound: f64,
    pub pass: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct AppendixReport {
    pub lambda: f64,
    pub n_hermite: usize,
    pub m_fourier: usize,
    pub lambda_plus: f64,
    pub lambda_minus: f64,
    /// `ω² / (1 + α²)`.
    pub lambda_minus_bound: f64,
    /// `λ±` agree with a direct 2x2 eigen-solve to `1e-10`.
    pub eigenvalues_match: bool,
    pub lambda_minus_bound_holds: bool,
    pub checks: Vec<NormCheck>,
    pub pass: bool,
    pub violations: Vec<String>,
}

/// Operator norms of `X R₀(λ)` with `R₀(λ) = (H₀ + λ)⁻¹` for the operators of
/// the relative bounds, estimated fiberwise. On the fiber with momentum
/// `p = m + θ`, `∂_x -> ip`, and `y`, `∂_y` act through the ladder operators
/// of `φ_n(√α y)`. Each `X` is applied exactly to the `N`-dimensional
/// truncation (rows up to `N + 1`), so no image component is lost.
pub fn appendix_norm_checks(params: &ChannelParams, lambda: f64, n: usize, m: usize) -> Result<AppendixReport> {
    if !(lambda >= 0.0 && lambda.is_finite()) {
        return Err(Error::invalid(format!("lambda must be non-negative, got {lambda}")));
    }
    if n < 2 {
        return Err(Error::invalid("need at least two oscillator functions"));
    }
    let a = params.alpha();
    let w2 = params.omega().powi(2);
    let (lp, lm) = appendix_eigenvalues(params);
    let direct = SymmetricEigen::new(Matrix2::new(1.0, params.b(), params.b(), a * a)).eigenvalues;
    let (dmax, dmin) = (direct.max(), direct.min());
    let eigenvalues_match = (dmax - lp).abs() <= 1e-10 * lp && (dmin - lm).abs() <= 1e-10 * lp;
    let lambda_minus_bound = w2 / (1.0 + a * a);
    let lambda_minus_bound_holds = lm >= lambda_minus_bound * (1.0 - 1e-12);

    let big = n + 2;
    // s and ∂_s on φ_0..φ_{N+1}
    let s = DMatrix::from_fn(big, big, |i, j| {
        if j == i + 1 {
            (j as f64 / 2.0).sqrt()
        } else if i == j + 1 {
            (i as f64 / 2.0).sqrt()
        } else {
            0.0
        }
    });
    let ds = DMatrix::from_fn(big, big, |i, j| {
        if j == i + 1 {
            (j as f64 / 2.0).sqrt()
        } else if i == j + 1 {
            -(i as f64 / 2.0).sqrt()
        } else {
            0.0
        }
    });
    let cols = |x: DMatrix<f64>| x.columns(0, n).into_owned();
    let y = cols(&s / a.sqrt());
    let dy = cols(&ds * a.sqrt());
    let y2 = cols(&s * &s / a);
    let dy2 = cols(&ds * &ds * a);
    let identity = DMatrix::<f64>::identity(big, n);

    let ratio = (1.0 + a * a) / w2;
    let bounds = [SQRT6, SQRT6 * ratio, SQRT6 * ratio, SQRT6 * ratio, SQRT6 * ratio.sqrt()];
    let names = ["d2y_R0", "d2x_R0", "2_y_dx_R0", "y2_R0", "dx_dy_R0"];

    let momenta: Vec<f64> = (-(m as i64)..=m as i64)
        .flat_map(|k| theta_grid(9).into_iter().map(move |t| k as f64 + t))
        .collect();
    let per_p: Vec<[f64; 5]> = momenta
        .par_iter()
        .map(|&p| -> Result<[f64; 5]> {
            let h = DMatrix::from_fn(n, n, |i, j| {
                if i == j {
                    a * (2 * i + 1) as f64 + p * p + lambda
                } else if i.abs_diff(j) == 1 {
                    params.b() * (2.0 * (i.max(j)) as f64 / a).sqrt() * p
                } else {
                    0.0
                }
            });
            let r = h
                .cholesky()
                .ok_or_else(|| Error::invalid("H0 + lambda is not positive definite"))?
                .inverse();
            Ok([
                spectral_norm(&(&dy2 * &r)),
                spectral_norm(&(&identity * (p * p) * &r)),
                2.0 * spectral_norm(&(&y * p * &r)),
                spectral_norm(&(&y2 * &r)),
                spectral_norm(&(&dy * p * &r)),
            ])
        })
        .collect::<Result<_>>()?;

    let mut checks = Vec::new();
    let mut violations = Vec::new();
    for i in 0..5 {
        let estimate = per_p.iter().map(|v| v[i]).fold(0.0, f64::max);
        let pass = estimate <= bounds[i] * (1.0 + NORM_SLACK);
        if !pass {
            violations.push(format!("{}: {estimate:.6e} > {:.6e}", names[i], bounds[i]));
        }
        checks.push(NormCheck {
            name: names[i],
            estimate,
            bound: bounds[i],
            pass,
        });
    }
    if !eigenvalues_match {
        violations.push("lambda_pm formula disagrees with the 2x2 eigen-solve".into());
    }
    if !lambda_minus_bound_holds {
        violations.push(format!("lambda_minus = {lm} below omega^2/(1+alpha^2) = {lambda_minus_bound}"));
    }
    Ok(AppendixReport {
        lambda,
        n_hermite: n,
        m_fourier: m,
        lambda_plus: lp,
        lambda_minus: lm,
        lambda_minus_bound,
        eigenvalues_match,
        lambda_minus_bound_holds,
        pass: violations.is_empty(),
        checks,
        violations,
    })
}
