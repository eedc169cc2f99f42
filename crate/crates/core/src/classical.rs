//! Classical motion under `H_cl = (p_x + yB)² + p_y² + ω²y² + W(x, y)`.
//!
//! Hamilton's equations:
//!
//! ```text
//! ẋ = 2(p_x + yB)           ẏ = 2 p_y
//! ṗ_x = -∂_x W              ṗ_y = -2B(p_x + yB) - 2ω²y - ∂_y W
//! ```
//!
//! With `W = 0` the motion is a cyclotron ellipse of angular frequency `2α`
//! whose centre `S = (x + μ p_y, -μ p_x)` drifts at speed `2β p_x`.

use std::io::Write;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::{ChannelParams, PotentialSpec};

/// Coordinates beyond this magnitude abort an integration.
pub const BLOW_UP_LIMIT: f64 = 1e9;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ClassicalState {
    pub t: f64,
    pub x: f64,
    pub y: f64,
    pub px: f64,
    pub py: f64,
}

impl ClassicalState {
    pub fn new(x: f64, y: f64, px: f64, py: f64) -> Self {
        ClassicalState { t: 0.0, x, y, px, py }
    }

    /// `(p_x + yB)² + p_y² + ω²y²`.
    pub fn kinetic_energy(&self, params: &ChannelParams) -> f64 {
        let v = self.px + self.y * params.b();
        v * v + self.py * self.py + params.omega().powi(2) * self.y * self.y
    }

    pub fn energy(&self, params: &ChannelParams, spec: &PotentialSpec) -> f64 {
        self.kinetic_energy(params) + spec.evaluate(self.x, self.y)
    }

    /// Guiding centre `(x + μ p_y, -μ p_x)`.
    pub fn guiding_center(&self, params: &ChannelParams) -> (f64, f64) {
        (self.x + params.mu() * self.py, -params.mu() * self.px)
    }

    /// `p_x S_x`.
    pub fn px_sx(&self, params: &ChannelParams) -> f64 {
        self.px * self.guiding_center(params).0
    }

    fn is_sane(&self) -> bool {
        [self.x, self.y, self.px, self.py]
            .iter()
            .all(|v| v.is_finite() && v.abs() <= BLOW_UP_LIMIT)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    ClosedForm,
    Rk4,
}

#[derive(Clone, Debug)]
pub struct Trajectory {
    pub params: ChannelParams,
    pub potential: PotentialSpec,
    pub method: Method,
    pub states: Vec<ClassicalState>,
}

impl Trajectory {
    pub fn last(&self) -> &ClassicalState {
        self.states.last().expect("trajectory holds the initial state")
    }

    pub fn energies(&self) -> Vec<f64> {
        self.states
            .iter()
            .map(|s| s.energy(&self.params, &self.potential))
            .collect()
    }

    /// `max_t |H(t) - H(0)| / |H(0)|`, or the absolute drift when `H(0) = 0`.
    pub fn energy_drift(&self) -> f64 {
        let e = self.energies();
        let scale = if e[0] == 0.0 { 1.0 } else { e[0].abs() };
        e.iter().map(|v| (v - e[0]).abs()).fold(0.0, f64::max) / scale
    }

    /// Rows `t,x,y,px,py,energy,pxSx`.
    pub fn write_csv(&self, mut out: impl Write) -> std::io::Result<()> {
        writeln!(out, "t,x,y,px,py,energy,pxSx")?;
        for s in &self.states {
            writeln!(
                out,
                "{},{},{},{},{},{},{}",
                s.t,
                s.x,
                s.y,
                s.px,
                s.py,
                s.energy(&self.params, &self.potential),
                s.px_sx(&self.params)
            )?;
        }
        Ok(())
    }
}

/// Exact state at time `t` for `W = 0`.
pub fn closed_form_solution(
    params: &ChannelParams,
    spec: &PotentialSpec,
    initial: &ClassicalState,
    t: f64,
) -> Result<ClassicalState> {
    if !spec.is_zero() {
        return Err(Error::invalid("closed-form motion requires W = 0"));
    }
    Ok(closed_form_unchecked(params, initial, t))
}

fn closed_form_unchecked(params: &ChannelParams, s0: &ClassicalState, t: f64) -> ClassicalState {
    let (a, b, mu) = (params.alpha(), params.b(), params.mu());
    let px = s0.px;
    let u = s0.y + mu * px;
    let tau = t - s0.t;
    let (sn, cs) = (2.0 * a * tau).sin_cos();
    ClassicalState {
        t,
        x: s0.x + 2.0 * params.beta() * px * tau + (b / a) * u * sn + b * s0.py / (a * a) * (1.0 - cs),
        y: -mu * px + u * cs + s0.py / a * sn,
        px,
        py: -a * u * sn + s0.py * cs,
    }
}

/// Closed-form samples at `t0 + k dt` up to `t_end`.
pub fn closed_form_trajectory(
    params: &ChannelParams,
    spec: &PotentialSpec,
    initial: &ClassicalState,
    t_end: f64,
    dt: f64,
) -> Result<Trajectory> {
    if !spec.is_zero() {
        return Err(Error::invalid("closed-form motion requires W = 0"));
    }
    let times = time_grid(initial.t, t_end, dt)?;
    Ok(Trajectory {
        params: *params,
        potential: spec.clone(),
        method: Method::ClosedForm,
        states: times
            .into_iter()
            .map(|t| closed_form_unchecked(params, initial, t))
            .collect(),
    })
}

fn time_grid(t0: f64, t_end: f64, dt: f64) -> Result<Vec<f64>> {
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(Error::invalid(format!("time step must be positive, got {dt}")));
    }
    if !(t_end >= t0 && t_end.is_finite()) {
        return Err(Error::invalid(format!("end time {t_end} precedes start {t0}")));
    }
    let steps = ((t_end - t0) / dt - 1e-9).ceil().max(0.0) as usize;
    let mut out: Vec<f64> = (0..steps).map(|k| t0 + k as f64 * dt).collect();
    out.push(t_end);
    Ok(out)
}

fn rhs(params: &ChannelParams, spec: &PotentialSpec, s: [f64; 4]) -> [f64; 4] {
    let [x, y, px, py] = s;
    let b = params.b();
    let v = px + y * b;
    let (gx, gy) = spec.gradient(x, y);
    [
        2.0 * v,
        2.0 * py,
        -gx,
        -2.0 * b * v - 2.0 * params.omega().powi(2) * y - gy,
    ]
}

fn axpy(s: [f64; 4], h: f64, k: [f64; 4]) -> [f64; 4] {
    [s[0] + h * k[0], s[1] + h * k[1], s[2] + h * k[2], s[3] + h * k[3]]
}

/// Classical RK4 with fixed step `dt` (the final step is shortened to land on
/// `t_end`).
pub fn integrate(
    params: &ChannelParams,
    spec: &PotentialSpec,
    initial: &ClassicalState,
    t_end: f64,
    dt: f64,
) -> Result<Trajectory> {
    let times = time_grid(initial.t, t_end, dt)?;
    let mut traj = Trajectory {
        params: *params,
        potential: spec.clone(),
        method: Method::Rk4,
        states: Vec::with_capacity(times.len()),
    };
    traj.states.push(ClassicalState { t: times[0], ..*initial });
    let mut s = [initial.x, initial.y, initial.px, initial.py];
    for w in times.windows(2) {
        let h = w[1] - w[0];
        let k1 = rhs(params, spec, s);
        let k2 = rhs(params, spec, axpy(s, 0.5 * h, k1));
        let k3 = rhs(params, spec, axpy(s, 0.5 * h, k2));
        let k4 = rhs(params, spec, axpy(s, h, k3));
        for i in 0..4 {
            s[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        }
        let state = ClassicalState {
            t: w[1],
            x: s[0],
            y: s[1],
            px: s[2],
            py: s[3],
        };
        if !state.is_sane() {
            return Err(Error::BlowUp {
                t: w[1],
                partial: Box::new(traj),
            });
        }
        traj.states.push(state);
    }
    Ok(traj)
}

/// Integrates every initial condition independently; output order follows
/// the input.
pub fn integrate_ensemble(
    params: &ChannelParams,
    spec: &PotentialSpec,
    initials: &[ClassicalState],
    t_end: f64,
    dt: f64,
) -> Vec<Result<Trajectory>> {
    initials
        .par_iter()
        .map(|s| integrate(params, spec, s, t_end, dt))
        .collect()
}

#[derive(Clone, Debug, Serialize)]
pub struct EnsembleMember {
    pub initial: ClassicalState,
    pub last: Option<ClassicalState>,
    pub energy_drift: Option<f64>,
    pub slope: Option<f64>,
    pub error: Option<String>,
}

pub fn summarize_ensemble(initials: &[ClassicalState], runs: &[Result<Trajectory>]) -> Vec<EnsembleMember> {
    initials
        .iter()
        .zip(runs)
        .map(|(init, run)| match run {
            Ok(tr) => EnsembleMember {
                initial: *init,
                last: Some(*tr.last()),
                energy_drift: Some(tr.energy_drift()),
                slope: Some(mourre_observable(tr).slope),
                error: None,
            },
            Err(e) => EnsembleMember {
                initial: *init,
                last: None,
                energy_drift: None,
                slope: None,
                error: Some(e.to_string()),
            },
        })
        .collect()
}

#[derive(Clone, Debug, Serialize)]
pub struct MourreSeries {
    pub t: Vec<f64>,
    pub px_sx: Vec<f64>,
    /// Least-squares slope of `p_x S_x` against `t`.
    pub slope: f64,
}

pub fn mourre_observable(traj: &Trajectory) -> MourreSeries {
    let t: Vec<f64> = traj.states.iter().map(|s| s.t).collect();
    let v: Vec<f64> = traj.states.iter().map(|s| s.px_sx(&traj.params)).collect();
    let slope = least_squares_slope(&t, &v);
    MourreSeries { t, px_sx: v, slope }
}

fn least_squares_slope(t: &[f64], v: &[f64]) -> f64 {
    let n = t.len() as f64;
    if t.len() < 2 {
        return 0.0;
    }
    let tm = t.iter().sum::<f64>() / n;
    let vm = v.iter().sum::<f64>() / n;
    let (mut num, mut den) = (0.0, 0.0);
    for (a, b) in t.iter().zip(v) {
        num += (a - tm) * (b - vm);
        den += (a - tm) * (a - tm);
    }
    if den == 0.0 {
        0.0
    } else {
        num / den
    }
}
