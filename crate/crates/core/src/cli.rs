//! Configuration, command dispatch and artifact output for the
//! `channel-spectra` binary.
//!
//! A run merges three layers: built-in defaults, an optional JSON config
//! file and `--set key=value` overrides (dotted keys reach into nested
//! objects, values are parsed as JSON and fall back to plain strings). The
//! merged object is deserialized strictly, so unknown keys are errors.

use std::collections::BTreeMap;
use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use crate::bands::{self, BandOptions, BandStructure, Refinement};
use crate::classical::{self, ClassicalState, Trajectory};
use crate::commutator::{self, QuadraticObservable};
use crate::error::{Error, Result};
use crate::fiber::{self, assemble_fiber};
use crate::hill;
use crate::model::{ChannelParams, PotentialSpec};
use crate::mourre;
use crate::basis::project_potential;

/// Bumped whenever the manifest layout changes.
pub const MANIFEST_SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    Bands,
    Gaps,
    SweepOmega,
    Hill,
    Classical,
    Mourre,
    Commutator,
    Diagnostics,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Bands => "bands",
            Command::Gaps => "gaps",
            Command::SweepOmega => "sweep-omega",
            Command::Hill => "hill",
            Command::Classical => "classical",
            Command::Mourre => "mourre",
            Command::Commutator => "commutator",
            Command::Diagnostics => "diagnostics",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MethodChoice {
    /// Closed form when `W = 0`, RK4 otherwise.
    Auto,
    ClosedForm,
    Rk4,
}

/// Missing coordinates take their defaults, so `--set initial.px=2` works.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct InitialState {
    pub x: f64,
    pub y: f64,
    pub px: f64,
    pub py: f64,
}

impl Default for InitialState {
    fn default() -> Self {
        InitialState {
            x: 0.0,
            y: 0.5,
            px: 1.0,
            py: 0.0,
        }
    }
}

/// Every knob of every command. Fields irrelevant to the chosen command are
/// ignored but still echoed in the manifest.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    pub b: f64,
    pub omega: f64,
    pub potential: PotentialSpec,
    /// Odd, at least 9.
    pub theta_count: usize,
    /// Initial Hermite and Fourier truncation; chosen from the ceiling when
    /// null.
    pub n_hermite: Option<usize>,
    pub m_fourier: Option<usize>,
    /// Energy ceiling; `3α + W₀` when null.
    pub ceiling: Option<f64>,
    /// Gaps narrower than `gap_tolerance · α` are ignored.
    pub gap_tolerance: f64,
    pub refinement: Refinement,
    pub cauchy_tolerance: f64,
    pub max_dimension: usize,
    pub dt: f64,
    pub t_end: f64,
    pub initial: InitialState,
    pub method: MethodChoice,
    #[serde(rename = "E")]
    pub energy: f64,
    pub delta: f64,
    pub eps: f64,
    pub omega_list: Vec<f64>,
    /// Gaps tracked by `sweep-omega`.
    pub target_gaps: usize,
    /// Transverse index `n` of the Hill operator `H_{n,n}`.
    pub hill_index: usize,
    pub hill_modes: usize,
    /// Spectral shift `λ` of the resolvent in the norm checks.
    pub lambda: f64,
    pub appendix_n: usize,
    pub appendix_m: usize,
    pub theta2_list: Vec<f64>,
    pub gen_nogo: bool,
    pub beta11_free: bool,
    pub svg: bool,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            b: 3.0,
            omega: 4.0,
            potential: PotentialSpec::zero(),
            theta_count: 33,
            n_hermite: None,
            m_fourier: None,
            ceiling: None,
            gap_tolerance: bands::DEFAULT_GAP_TOLERANCE,
            refinement: Refinement::All,
            cauchy_tolerance: 1e-7,
            max_dimension: 2400,
            dt: 1e-3,
            t_end: 1.0,
            initial: InitialState::default(),
            method: MethodChoice::Auto,
            energy: 8.0,
            delta: 1.0,
            eps: 1.0,
            omega_list: vec![4.0, 10.0, 40.0],
            target_gaps: 2,
            hill_index: 0,
            hill_modes: hill::DEFAULT_HILL_MODES,
            lambda: 0.0,
            appendix_n: 40,
            appendix_m: 6,
            theta2_list: vec![1.0, 10.0, 100.0],
            gen_nogo: false,
            beta11_free: false,
            svg: false,
        }
    }
}

impl RunConfig {
    pub fn params(&self) -> Result<ChannelParams> {
        ChannelParams::new(self.b, self.omega)
    }

    /// Defaults overlaid with `file` (a JSON object) and then `overrides`.
    pub fn resolve(file: Option<&Path>, overrides: &[String]) -> Result<Self> {
        let mut root = match file {
            Some(p) => {
                let text = fs::read_to_string(p)
                    .map_err(|e| Error::Config(format!("cannot read {}: {e}", p.display())))?;
                serde_json::from_str::<Value>(&text)
                    .map_err(|e| Error::Config(format!("{}: {e}", p.display())))?
            }
            None => Value::Object(Map::new()),
        };
        if !root.is_object() {
            return Err(Error::Config("config file must hold a JSON object".into()));
        }
        for o in overrides {
            apply_override(&mut root, o)?;
        }
        let cfg: RunConfig = serde_json::from_value(root).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    fn validate(&self) -> Result<()> {
        self.params().map_err(|e| Error::Config(e.to_string()))?;
        if self.theta_count < 9 || self.theta_count.is_multiple_of(2) {
            return Err(Error::Config(format!("theta_count must be odd and at least 9, got {}", self.theta_count)));
        }
        if !(self.dt > 0.0 && self.t_end.is_finite()) {
            return Err(Error::Config("need dt > 0 and finite t_end".into()));
        }
        if self.omega_list.is_empty() {
            return Err(Error::Config("omega_list is empty".into()));
        }
        Ok(())
    }

    fn band_options(&self) -> BandOptions {
        BandOptions {
            theta_count: self.theta_count,
            energy_ceiling: self.ceiling,
            n_hermite: self.n_hermite,
            m_fourier: self.m_fourier,
            cauchy_tolerance: self.cauchy_tolerance,
            refinement: self.refinement,
            max_dimension: self.max_dimension,
            ..BandOptions::default()
        }
    }
}

fn apply_override(root: &mut Value, assignment: &str) -> Result<()> {
    let (key, raw) = assignment
        .split_once('=')
        .ok_or_else(|| Error::Config(format!("--set expects key=value, got {assignment:?}")))?;
    let value = serde_json::from_str(raw).unwrap_or_else(|_| Value::String(raw.to_string()));
    let parts: Vec<&str> = key.split('.').collect();
    if parts.iter().any(|p| p.is_empty()) {
        return Err(Error::Config(format!("bad key {key:?}")));
    }
    let mut node = root;
    for part in &parts[..parts.len() - 1] {
        let obj = node
            .as_object_mut()
            .ok_or_else(|| Error::Config(format!("{key}: {part} is not an object")))?;
        node = obj.entry(part.to_string()).or_insert_with(|| Value::Object(Map::new()));
    }
    node.as_object_mut()
        .ok_or_else(|| Error::Config(format!("{key}: parent is not an object")))?
        .insert(parts[parts.len() - 1].to_string(), value);
    Ok(())
}

#[derive(Clone, Debug, Serialize)]
pub struct Manifest {
    pub schema_version: u32,
    pub command: String,
    pub config: RunConfig,
    pub workers: Option<usize>,
    pub artifacts: Vec<String>,
    /// `ok`, `numerical_failure` or `config_error`.
    pub status: String,
    pub message: Option<String>,
    pub exit_code: i32,
}

/// Exit code for an error: 1 for bad input, 2 for numerical failure.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::NoConvergence { .. } | Error::BlowUp { .. } | Error::IncompatibleProjection(_) => 2,
        Error::InvalidParameter(_)
        | Error::NotQuadratic(_)
        | Error::Config(_)
        | Error::Parse(_)
        | Error::Io(_)
        | Error::Json(_) => 1,
    }
}

struct Out {
    dir: PathBuf,
    artifacts: Vec<String>,
}

impl Out {
    fn create(&mut self, name: &str) -> Result<BufWriter<File>> {
        self.artifacts.push(name.to_string());
        Ok(BufWriter::new(File::create(self.dir.join(name))?))
    }

    fn json<T: Serialize>(&mut self, name: &str, v: &T) -> Result<()> {
        let mut f = self.create(name)?;
        serde_json::to_writer_pretty(&mut f, v)?;
        writeln!(f)?;
        Ok(())
    }

    fn text(&mut self, name: &str, s: &str) -> Result<()> {
        self.create(name)?.write_all(s.as_bytes())?;
        Ok(())
    }
}

/// Outcome of a command that ran to completion: `numerical_failure` carries
/// the reason when results were written but are not trustworthy (an
/// unconverged truncation).
struct Outcome {
    numerical_failure: Option<String>,
}

impl Outcome {
    fn ok() -> Self {
        Outcome { numerical_failure: None }
    }
}

/// Runs `command`, writes its artifacts and `manifest.json` into `out_dir`,
/// and returns the process exit code.
pub fn run(command: Command, cfg: &RunConfig, out_dir: &Path, workers: Option<usize>) -> Result<i32> {
    fs::create_dir_all(out_dir)?;
    let mut out = Out {
        dir: out_dir.to_path_buf(),
        artifacts: Vec::new(),
    };
    let result = dispatch(command, cfg, &mut out);
    let (status, message, code) = match &result {
        Ok(o) => match &o.numerical_failure {
            None => ("ok", None, 0),
            Some(m) => ("numerical_failure", Some(m.clone()), 2),
        },
        Err(e) => {
            let code = exit_code(e);
            (if code == 2 { "numerical_failure" } else { "config_error" }, Some(e.to_string()), code)
        }
    };
    let manifest = Manifest {
        schema_version: MANIFEST_SCHEMA_VERSION,
        command: command.name().to_string(),
        config: cfg.clone(),
        workers,
        artifacts: out.artifacts.clone(),
        status: status.to_string(),
        message: message.clone(),
        exit_code: code,
    };
    let mut f = BufWriter::new(File::create(out_dir.join("manifest.json"))?);
    serde_json::to_writer_pretty(&mut f, &manifest)?;
    writeln!(f)?;
    f.flush()?;
    match result {
        Ok(_) => {
            if let Some(m) = message {
                log::error!("{m}");
            }
            Ok(code)
        }
        Err(e) => Err(e),
    }
}

fn dispatch(command: Command, cfg: &RunConfig, out: &mut Out) -> Result<Outcome> {
    match command {
        Command::Bands => run_bands(cfg, out),
        Command::Gaps => run_gaps(cfg, out),
        Command::SweepOmega => run_sweep(cfg, out),
        Command::Hill => run_hill(cfg, out),
        Command::Classical => run_classical(cfg, out),
        Command::Mourre => run_mourre(cfg, out),
        Command::Commutator => run_commutator(cfg, out),
        Command::Diagnostics => run_diagnostics(cfg, out),
    }
}

fn truncation_outcome(bs: &BandStructure) -> Outcome {
    let t = bs.truncation;
    Outcome {
        numerical_failure: (!t.converged).then(|| {
            format!(
                "truncation N = {}, M = {} did not converge (last change {:.3e})",
                t.n_hermite, t.m_fourier, t.cauchy_change
            )
        }),
    }
}

fn write_intervals(out: &mut Out, name: &str, intervals: &[(f64, f64)]) -> Result<()> {
    let mut f = out.create(name)?;
    writeln!(f, "j,lo,hi")?;
    for (j, (lo, hi)) in intervals.iter().enumerate() {
        writeln!(f, "{},{lo},{hi}", j + 1)?;
    }
    Ok(())
}

fn write_gaps(out: &mut Out, name: &str, report: &bands::GapReport) -> Result<()> {
    let mut f = out.create(name)?;
    writeln!(f, "lo,hi,width")?;
    for g in &report.gaps {
        writeln!(f, "{},{},{}", g.lo, g.hi, g.width)?;
    }
    Ok(())
}

fn run_bands(cfg: &RunConfig, out: &mut Out) -> Result<Outcome> {
    let params = cfg.params()?;
    let bs = bands::compute_bands_with(&params, &cfg.potential, &cfg.band_options())?;
    bs.write_csv(out.create("bands.csv")?)?;
    write_intervals(out, "band_intervals.csv", &bs.band_intervals)?;
    for p in bs.write_plot_files(&out.dir)? {
        out.artifacts.push(p.file_name().expect("file").to_string_lossy().into_owned());
    }
    if cfg.svg {
        let svg = band_svg(&bs);
        out.text("bands.svg", &svg)?;
    }
    out.json(
        "bands.json",
        &serde_json::json!({
            "bottom": bs.bottom(),
            "band_intervals": bs.band_intervals,
            "band_variation": bs.band_variation,
            "extremum_thetas": bs.extremum_thetas,
            "energy_ceiling": bs.energy_ceiling,
            "truncation": bs.truncation,
        }),
    )?;
    println!("{} bands below {:.6}, bottom {:.9}", bs.band_count(), bs.energy_ceiling, bs.bottom());
    Ok(truncation_outcome(&bs))
}

fn run_gaps(cfg: &RunConfig, out: &mut Out) -> Result<Outcome> {
    let params = cfg.params()?;
    let bs = bands::compute_bands_with(&params, &cfg.potential, &cfg.band_options())?;
    let report = bands::detect_gaps(&bs, cfg.gap_tolerance * params.alpha());
    write_intervals(out, "band_intervals.csv", &bs.band_intervals)?;
    write_gaps(out, "gaps.csv", &report)?;
    out.json("gaps.json", &report)?;
    println!("{} gaps below {:.6}", report.count, bs.energy_ceiling);
    for g in &report.gaps {
        println!("  ({:.9}, {:.9})  width {:.3e}", g.lo, g.hi, g.width);
    }
    Ok(truncation_outcome(&bs))
}

fn run_sweep(cfg: &RunConfig, out: &mut Out) -> Result<Outcome> {
    let base = BandOptions {
        theta_count: cfg.theta_count,
        cauchy_tolerance: cfg.cauchy_tolerance,
        max_dimension: cfg.max_dimension,
        ..BandOptions::default()
    };
    let table = bands::persistence_sweep_with(cfg.b, &cfg.omega_list, &cfg.potential, cfg.target_gaps, &base)?;
    out.json("persistence.json", &table)?;
    let mut f = out.create("persistence.csv")?;
    writeln!(f, "omega,alpha,gap,full_lo,full_hi,h00_lo,h00_hi,discrepancy")?;
    for row in &table.rows {
        for i in 0..cfg.target_gaps {
            let cell = |g: Option<&bands::Gap>| g.map_or((String::new(), String::new()), |g| (g.lo.to_string(), g.hi.to_string()));
            let (flo, fhi) = cell(row.full.gaps.get(i));
            let (hlo, hhi) = cell(row.h00.gaps.get(i));
            let d = row.edge_discrepancy[i].map_or(String::new(), |d| d.to_string());
            writeln!(f, "{},{},{},{flo},{fhi},{hlo},{hhi},{d}", row.omega, row.alpha, i + 1)?;
        }
    }
    drop(f);
    println!("gap discrepancy shrinking along omega: {:?}", table.shrinking);
    let bad: Vec<String> = table
        .rows
        .iter()
        .filter(|r| !r.truncation.converged)
        .map(|r| r.omega.to_string())
        .collect();
    Ok(Outcome {
        numerical_failure: (!bad.is_empty()).then(|| format!("truncation did not converge at omega = {}", bad.join(", "))),
    })
}

fn run_hill(cfg: &RunConfig, out: &mut Out) -> Result<Outcome> {
    let params = cfg.params()?;
    let series = hill::transverse_series(&params, &cfg.potential, cfg.hill_index)?;
    let offset = params.alpha() * (2 * cfg.hill_index + 1) as f64;
    let ceiling = cfg.ceiling.unwrap_or_else(|| bands::default_ceiling(&params, &cfg.potential));
    let hb = hill::hill_bands(
        &series,
        cfg.hill_index,
        offset,
        cfg.theta_count,
        cfg.hill_modes,
        ceiling,
        cfg.gap_tolerance * params.alpha(),
    )?;
    hb.write_csv(out.create("hill_bands.csv")?)?;
    write_intervals(out, "hill_intervals.csv", &hb.band_intervals)?;
    write_gaps(out, "hill_gaps.csv", &hb.gaps)?;
    out.json("hill.json", &hb)?;
    println!(
        "H_{{{n},{n}}}: {} bands, {} gaps below {ceiling:.6}; edges at symmetric points: {}",
        hb.band_intervals.len(),
        hb.gaps.count,
        hb.edges_at_symmetric_points,
        n = cfg.hill_index
    );
    Ok(Outcome::ok())
}

fn run_classical(cfg: &RunConfig, out: &mut Out) -> Result<Outcome> {
    let params = cfg.params()?;
    let i = cfg.initial;
    let s0 = ClassicalState::new(i.x, i.y, i.px, i.py);
    let closed = match cfg.method {
        MethodChoice::Auto => cfg.potential.is_zero(),
        MethodChoice::ClosedForm => true,
        MethodChoice::Rk4 => false,
    };
    let traj: Trajectory = if closed {
        classical::closed_form_trajectory(&params, &cfg.potential, &s0, cfg.t_end, cfg.dt)?
    } else {
        match classical::integrate(&params, &cfg.potential, &s0, cfg.t_end, cfg.dt) {
            Ok(t) => t,
            Err(Error::BlowUp { t, partial }) => {
                partial.write_csv(out.create("trajectory.csv")?)?;
                return Err(Error::BlowUp { t, partial });
            }
            Err(e) => return Err(e),
        }
    };
    traj.write_csv(out.create("trajectory.csv")?)?;
    let series = classical::mourre_observable(&traj);
    let expected = 2.0 * i.px * i.px * params.beta();
    let last = traj.last();
    out.json(
        "classical.json",
        &serde_json::json!({
            "method": traj.method,
            "steps": traj.states.len() - 1,
            "final": {"t": last.t, "x": last.x, "y": last.y, "px": last.px, "py": last.py},
            "energy_drift": traj.energy_drift(),
            "px_drift": (last.px - i.px).abs(),
            "mourre_slope": series.slope,
            "mourre_slope_unperturbed": expected,
            "guiding_center_velocity": 2.0 * i.px * params.beta(),
        }),
    )?;
    println!(
        "{:?}: energy drift {:.3e}, d(px Sx)/dt = {:.12} (unperturbed {:.12})",
        traj.method,
        traj.energy_drift(),
        series.slope,
        expected
    );
    Ok(Outcome::ok())
}

fn run_mourre(cfg: &RunConfig, out: &mut Out) -> Result<Outcome> {
    let params = cfg.params()?;
    let report = mourre::evaluate_certificate(&params, &cfg.potential, cfg.energy, cfg.delta, cfg.eps)?;
    out.json("mourre.json", &report)?;
    out.text("mourre.txt", &report.summary())?;
    report.write_intervals_csv(out.create("intervals.csv")?)?;
    let a = params.alpha();
    let table = mourre::scaling_sweep(
        cfg.b,
        cfg.energy / a,
        cfg.delta / a,
        cfg.eps / a,
        &cfg.potential,
        &cfg.omega_list,
    )?;
    out.json("scaling.json", &table)?;
    let mut f = out.create("scaling.csv")?;
    writeln!(f, "omega,alpha,E,delta,eps,condition_i_threshold,condition_ii_slack,admissible")?;
    for r in &table.rows {
        writeln!(
            f,
            "{},{},{},{},{},{},{},{}",
            r.omega, r.alpha, r.e, r.delta, r.eps, r.condition_i_threshold, r.condition_ii_slack, r.admissible
        )?;
    }
    print!("{}", report.summary());
    Ok(Outcome::ok())
}

fn run_commutator(cfg: &RunConfig, out: &mut Out) -> Result<Outcome> {
    let params = cfg.params()?;
    let h0 = QuadraticObservable::h0(cfg.b, cfg.omega);
    let a = QuadraticObservable::conjugate_operator(cfg.b, cfg.omega);
    let c = commutator::commutator_ia(&h0, &a);
    let text = format!(
        "H0 = {h0}\nA = {a}\n[H0, iA]:\n{}expected 2*beta*p1^2 with 2*beta = {}\npositive semidefinite: {}\n",
        c.table(),
        2.0 * params.beta(),
        c.quad_is_psd()
    );
    out.text("commutator.txt", &text)?;
    c.write_csv(out.create("commutator.csv")?)?;
    print!("{text}");
    if cfg.gen_nogo {
        let r = commutator::gen_nogo_scan(cfg.b, params.alpha(), cfg.beta11_free)?;
        out.text("nogo.txt", &r.text())?;
        out.json("nogo.json", &r)?;
        print!("{}", r.text());
    }
    Ok(Outcome::ok())
}

fn run_diagnostics(cfg: &RunConfig, out: &mut Out) -> Result<Outcome> {
    let params = cfg.params()?;
    let mut resolvent = BTreeMap::new();
    let mut f = out.create("resolvent.csv")?;
    writeln!(f, "theta2,sup_value,bound,pass")?;
    for &t2 in &cfg.theta2_list {
        let r = fiber::complex_theta_resolvent_bound(&params, t2, 20, 50)?;
        writeln!(f, "{t2},{},{},{}", r.sup_value, r.bound, r.pass)?;
        resolvent.insert(t2.to_string(), r);
    }
    drop(f);
    let appendix = mourre::appendix_norm_checks(&params, cfg.lambda, cfg.appendix_n, cfg.appendix_m)?;
    let mut f = out.create("appendix.csv")?;
    writeln!(f, "operator,estimate,bound,pass")?;
    for c in &appendix.checks {
        writeln!(f, "{},{},{},{}", c.name, c.estimate, c.bound, c.pass)?;
    }
    drop(f);
    let n = cfg.n_hermite.unwrap_or(20);
    let m = cfg.m_fourier.unwrap_or(4);
    let proj = project_potential(&cfg.potential, &params, n - 1, 2 * m)?;
    let mat = assemble_fiber(&params, &proj, 0.0, n, m)?;
    let fiber_info = serde_json::json!({
        "theta": 0.0,
        "n_hermite": n,
        "m_fourier": m,
        "dim": mat.dim(),
        "hermiticity_defect": mat.hermiticity_defect(),
        "block_diagonal": mat.is_block_diagonal(),
        "aliasing_warning": proj.aliasing_warning(),
        "periodized": proj.periodized(),
    });
    out.json(
        "diagnostics.json",
        &serde_json::json!({
            "complex_theta_resolvent": resolvent,
            "appendix": appendix,
            "fiber": fiber_info,
        }),
    )?;
    let all_resolvent = resolvent.values().all(|r| r.pass);
    println!("complex-theta resolvent bound: {}", if all_resolvent { "pass" } else { "FAIL" });
    println!("relative bound checks: {}", if appendix.pass { "pass" } else { "FAIL" });
    for v in &appendix.violations {
        println!("  {v}");
    }
    Ok(Outcome::ok())
}

/// Minimal band diagram: one polyline per band over `θ`.
fn band_svg(bs: &BandStructure) -> String {
    let (w, h, pad) = (640.0, 480.0, 40.0);
    let lo = bs.bottom();
    let hi = bs.energy_ceiling;
    let span = (hi - lo).max(1e-12);
    let xs = |t: f64| pad + (t + 0.5) * (w - 2.0 * pad);
    let ys = |e: f64| h - pad - (e.min(hi) - lo) / span * (h - 2.0 * pad);
    let mut s = format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{w}\" height=\"{h}\">\n<rect x=\"{pad}\" y=\"{pad}\" width=\"{}\" height=\"{}\" fill=\"none\" stroke=\"black\"/>\n",
        w - 2.0 * pad,
        h - 2.0 * pad
    );
    for j in 0..bs.band_count() {
        let pts: Vec<String> = bs
            .theta_grid
            .iter()
            .zip(&bs.bands)
            .map(|(t, row)| format!("{:.2},{:.2}", xs(*t), ys(row[j])))
            .collect();
        s.push_str(&format!(
            "<polyline fill=\"none\" stroke=\"steelblue\" stroke-width=\"1.5\" points=\"{}\"/>\n",
            pts.join(" ")
        ));
    }
    s.push_str(&format!(
        "<text x=\"{pad}\" y=\"{}\" font-size=\"12\">E from {lo:.4} to {hi:.4}, theta from -1/2 to 1/2</text>\n</svg>\n",
        h - 10.0
    ));
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn overrides_and_strictness() {
        let cfg = RunConfig::resolve(None, &["b=0".into(), "omega=2".into(), "initial.px=3".into()]).unwrap();
        assert_eq!((cfg.b, cfg.omega, cfg.initial.px), (0.0, 2.0, 3.0));
        assert_eq!(cfg.initial.y, 0.5);
        assert!(matches!(RunConfig::resolve(None, &["bogus=1".into()]), Err(Error::Config(_))));
        assert!(matches!(RunConfig::resolve(None, &["omega=0".into()]), Err(Error::Config(_))));
        assert!(matches!(RunConfig::resolve(None, &["theta_count=10".into()]), Err(Error::Config(_))));
        let cfg = RunConfig::resolve(
            None,
            &[r#"potential={"kind":"x_only","series":[{"k":1,"re":1},{"k":-1,"re":1}]}"#.into()],
        )
        .unwrap();
        assert!(cfg.potential.is_x_periodic());
        let cfg = RunConfig::resolve(None, &["refinement=gap_edges".into()]).unwrap();
        assert_eq!(cfg.refinement, Refinement::GapEdges);
    }

    #[test]
    fn config_file_layer() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("c.json");
        fs::write(&p, r#"{"b": 1.5, "E": 20}"#).unwrap();
        let cfg = RunConfig::resolve(Some(&p), &["E=12".into()]).unwrap();
        assert_eq!((cfg.b, cfg.energy), (1.5, 12.0));
        fs::write(&p, "[1, 2]").unwrap();
        assert!(RunConfig::resolve(Some(&p), &[]).is_err());
    }

    #[test]
    fn resolved_config_round_trips() {
        let cfg = RunConfig::resolve(None, &["ceiling=12.5".into()]).unwrap();
        let v = serde_json::to_value(&cfg).unwrap();
        let back: RunConfig = serde_json::from_value(v).unwrap();
        assert_eq!(back.ceiling, Some(12.5));
    }
}
