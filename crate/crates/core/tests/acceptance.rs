//! Acceptance suite. Runs every criterion, prints one `PASS`/`FAIL` line
//! each and exits non-zero if any failed.

mod oracle;

use std::time::Instant;

use channel_spectra::bands::{compute_bands, compute_bands_with, gap_persistence_sweep, BandOptions};
use channel_spectra::basis::project_potential;
use channel_spectra::classical::{closed_form_trajectory, integrate, mourre_observable, ClassicalState};
use channel_spectra::commutator::{commutator_ia, gen_nogo_scan, QuadraticObservable, Var};
use channel_spectra::fiber::{assemble_fiber, complex_theta_resolvent_bound, eigenvalues_fiber};
use channel_spectra::hill::hill_spectrum;
use channel_spectra::model::{ChannelParams, FourierSeries, PotentialSpec};
use channel_spectra::mourre::{appendix_eigenvalues, appendix_norm_checks, evaluate_certificate};
use nalgebra::{Matrix2, SymmetricEigen};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Check = Result<String, String>;

fn ensure(ok: bool, detail: String) -> Check {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn exact_spectrum() -> Check {
    let start = Instant::now();
    let p = ChannelParams::new(3.0, 4.0).map_err(|e| e.to_string())?;
    let proj = project_potential(&PotentialSpec::zero(), &p, 39, 6).map_err(|e| e.to_string())?;
    let mut worst = 0.0f64;
    for &theta in &[0.0, 0.25, -0.25, 0.49] {
        let mat = assemble_fiber(&p, &proj, theta, 40, 3).map_err(|e| e.to_string())?;
        let ev = eigenvalues_fiber(&mat, mat.dim()).map_err(|e| e.to_string())?;
        for n in 0..=4 {
            for m in -3..=3i64 {
                let exact = p.alpha() * (2 * n + 1) as f64 + p.beta() * (m as f64 + theta).powi(2);
                let near = ev.iter().map(|e| (e - exact).abs()).fold(f64::INFINITY, f64::min);
                worst = worst.max(near);
            }
        }
    }
    let secs = start.elapsed().as_secs_f64();
    ensure(worst < 1e-8 && secs < 5.0, format!("max error {worst:.2e}, {secs:.2} s"))
}

fn spectral_bottom() -> Check {
    let mut detail = Vec::new();
    let mut ok = true;
    for &(b, w) in &[(3.0, 4.0), (0.0, 1.0), (1.0, 1.0)] {
        let p = ChannelParams::new(b, w).map_err(|e| e.to_string())?;
        let bs = compute_bands(&p, &PotentialSpec::zero(), 33, 3.0 * p.alpha()).map_err(|e| e.to_string())?;
        let err = (bs.bottom() - p.alpha()).abs();
        ok &= err <= 1e-6;
        detail.push(format!("({b},{w}): {err:.1e}"));
    }
    ensure(ok, detail.join(", "))
}

fn hill_oracle_agreement() -> Check {
    let series = FourierSeries::cosine(2.0, 1);
    let mut worst = 0.0f64;
    for &theta in &[0.0, 0.25, 0.5] {
        let ours = hill_spectrum(&series, theta, 32, 5).map_err(|e| e.to_string())?;
        let reference = oracle::hill_oracle(|x| 2.0 * x.cos(), theta, 2048, 5);
        for (a, b) in ours.iter().zip(&reference) {
            worst = worst.max((a - b).abs());
        }
    }
    ensure(worst < 1e-6, format!("max difference {worst:.2e}"))
}

fn gap_persistence() -> Check {
    let start = Instant::now();
    let table =
        gap_persistence_sweep(3.0, &[4.0, 10.0, 40.0], &PotentialSpec::cosine_x(2.0, 1), 1).map_err(|e| e.to_string())?;
    let secs = start.elapsed().as_secs_f64();
    let disc: Vec<Option<f64>> = table.rows.iter().map(|r| r.edge_discrepancy[0]).collect();
    let last = table.rows.last().ok_or("empty sweep")?;
    let width = last.h00.gaps.first().ok_or("H00 has no gap")?.width;
    let final_disc = disc.last().copied().flatten().ok_or("no full-H gap at the largest omega")?;
    let ok = table.shrinking[0] && final_disc <= 0.2 * width && secs < 120.0;
    ensure(
        ok,
        format!(
            "discrepancies {:?}, H00 width {width:.4}, ratio {:.3}, {secs:.0} s",
            disc.iter().map(|d| d.map(|v| (v * 1e4).round() / 1e4)).collect::<Vec<_>>(),
            final_disc / width
        ),
    )
}

fn no_flat_bands() -> Check {
    let p = ChannelParams::new(3.0, 4.0).map_err(|e| e.to_string())?;
    let opts = BandOptions {
        energy_ceiling: Some(3.0 * p.alpha()),
        ..BandOptions::default()
    };
    let bs = compute_bands_with(&p, &PotentialSpec::cosine_x(2.0, 1), &opts).map_err(|e| e.to_string())?;
    let min = bs.band_variation.iter().cloned().fold(f64::INFINITY, f64::min);
    ensure(
        bs.band_count() > 0 && min > 1e-10,
        format!("{} bands, smallest variation {min:.3e}", bs.band_count()),
    )
}

fn classical_invariants() -> Check {
    let p = ChannelParams::new(3.0, 4.0).map_err(|e| e.to_string())?;
    let zero = PotentialSpec::zero();
    let s0 = ClassicalState::new(0.0, 0.5, 1.0, 0.0);
    let exact = closed_form_trajectory(&p, &zero, &s0, 1.0, 1e-3).map_err(|e| e.to_string())?;
    let rk = integrate(&p, &zero, &s0, 1.0, 1e-3).map_err(|e| e.to_string())?;
    let pos = exact
        .states
        .iter()
        .zip(&rk.states)
        .map(|(a, b)| (a.x - b.x).abs().max((a.y - b.y).abs()))
        .fold(0.0, f64::max);
    let px_drift = exact.states.iter().map(|s| (s.px - 1.0).abs()).fold(0.0, f64::max);
    let drift = exact.energy_drift().max(rk.energy_drift());
    let slope = mourre_observable(&exact).slope;
    let expected = 2.0 * 1.0 * 16.0 / 25.0;
    let ok = pos < 1e-8 && px_drift == 0.0 && drift < 1e-9 && (slope - expected).abs() < 1e-10 && (expected - 1.28).abs() < 1e-15;
    ensure(
        ok,
        format!("position {pos:.1e}, px drift {px_drift:e}, energy drift {drift:.1e}, slope {slope:.12}"),
    )
}

fn quantum_classical_drift() -> Check {
    let p = ChannelParams::new(3.0, 4.0).map_err(|e| e.to_string())?;
    let zero = PotentialSpec::zero();
    let proj = project_potential(&zero, &p, 39, 4).map_err(|e| e.to_string())?;
    let lowest_of_block = |m: i64, theta: f64| -> Result<f64, String> {
        let mat = assemble_fiber(&p, &proj, theta, 40, 2).map_err(|e| e.to_string())?;
        let block = mat.block(m);
        let ev = channel_spectra::linalg::hermitian_eigenvalues(&block).map_err(|e| e.to_string())?;
        Ok(ev[0])
    };
    let h = 1e-4;
    let mut worst = 0.0f64;
    for &(m, theta) in &[(0i64, 0.2), (1, -0.3), (-2, 0.1)] {
        let slope = (lowest_of_block(m, theta + h)? - lowest_of_block(m, theta - h)?) / (2.0 * h);
        let px = m as f64 + theta;
        let traj = closed_form_trajectory(&p, &zero, &ClassicalState::new(0.0, 0.3, px, 0.2), 2.0, 1e-3)
            .map_err(|e| e.to_string())?;
        // guiding-centre velocity along the channel
        let (s_end, _) = traj.last().guiding_center(&p);
        let (s_start, _) = traj.states[0].guiding_center(&p);
        let classical = (s_end - s_start) / 2.0;
        worst = worst.max((slope - classical).abs()).max((classical - 2.0 * p.beta() * px).abs());
    }
    ensure(worst < 1e-6, format!("max mismatch {worst:.2e}"))
}

fn certificate_arithmetic() -> Check {
    let p = ChannelParams::new(3.0, 4.0).map_err(|e| e.to_string())?;
    let r = evaluate_certificate(&p, &PotentialSpec::zero(), 8.0, 1.0, 1.0).map_err(|e| e.to_string())?;
    let independent = 1.0 / (2.0 * (1.0 / 5.0 + (16.0 / 25.0) * 6f64.sqrt() * 26.0 / 16.0) * (1.0 + 8.0));
    let diff = (r.condition_i_threshold - independent).abs();
    let es: Vec<f64> = (0..=20).map(|k| 8.0 * 10f64.powf(k as f64 / 10.0)).collect();
    let pts: Vec<(f64, f64)> = es
        .iter()
        .map(|&e| {
            let t = evaluate_certificate(&p, &PotentialSpec::zero(), e, 1.0, 1.0).unwrap().condition_i_threshold;
            (e.ln(), t.ln())
        })
        .collect();
    let n = pts.len() as f64;
    let (mx, my) = (pts.iter().map(|p| p.0).sum::<f64>() / n, pts.iter().map(|p| p.1).sum::<f64>() / n);
    let exponent = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum::<f64>() / pts.iter().map(|p| (p.0 - mx).powi(2)).sum::<f64>();
    ensure(
        diff <= 1e-12 && (exponent + 1.0).abs() <= 0.05,
        format!("threshold {:.6} (diff {diff:.1e}), exponent {exponent:.4}", r.condition_i_threshold),
    )
}

fn appendix_bounds() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut detail = Vec::new();
    let mut ok = true;
    for _ in 0..5 {
        let (b, w) = (rng.gen_range(0.0..5.0), rng.gen_range(0.5..5.0));
        let p = ChannelParams::new(b, w).map_err(|e| e.to_string())?;
        let (lp, lm) = appendix_eigenvalues(&p);
        let direct = SymmetricEigen::new(Matrix2::new(1.0, b, b, b * b + w * w)).eigenvalues;
        let formula_ok = (lp - direct.max()).abs() < 1e-10 * lp && (lm - direct.min()).abs() < 1e-10 * lp;
        let bound_ok = lm >= w * w / (1.0 + p.alpha().powi(2)) * (1.0 - 1e-12);
        let r = appendix_norm_checks(&p, 0.0, 40, 6).map_err(|e| e.to_string())?;
        ok &= formula_ok && bound_ok && r.pass;
        let worst = r.checks.iter().map(|c| c.estimate / c.bound).fold(0.0, f64::max);
        detail.push(format!("({b:.2},{w:.2}) ratio {worst:.3}"));
    }
    ensure(ok, detail.join(", "))
}

fn commutator_algebra() -> Check {
    let (b, w) = (3.0, 4.0);
    let r = commutator_ia(&QuadraticObservable::h0(b, w), &QuadraticObservable::conjugate_operator(b, w));
    let two_beta = 2.0 * w * w / (b * b + w * w);
    let mut others = r.coefficients();
    let p1p1 = r.coefficient(Var::P1, Var::P1);
    others[7] = 0.0; // p1^2 slot
    let stray = others.iter().map(|c| c.abs()).fold(0.0, f64::max);
    let nogo = gen_nogo_scan(b, 5.0, false).map_err(|e| e.to_string())?;

    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut random = || {
        let q = nalgebra::Matrix4::from_fn(|_, _| rng.gen_range(-1.0..1.0));
        let l = nalgebra::Vector4::from_fn(|_, _| rng.gen_range(-1.0..1.0));
        QuadraticObservable::new(q, l, rng.gen_range(-1.0..1.0))
    };
    let mut jacobi = 0.0f64;
    for _ in 0..100 {
        let (f, g, h) = (random(), random(), random());
        let j = commutator_ia(&f, &commutator_ia(&g, &h))
            .add(&commutator_ia(&g, &commutator_ia(&h, &f)))
            .add(&commutator_ia(&h, &commutator_ia(&f, &g)));
        jacobi = jacobi.max(j.max_abs_coefficient());
    }
    let ok = (p1p1 - two_beta).abs() < 1e-12 && stray < 1e-12 && nogo.verdict == "no-go" && jacobi < 1e-12;
    ensure(
        ok,
        format!("p1^2 {p1p1}, stray {stray:.1e}, verdict {}, Jacobi {jacobi:.1e}", nogo.verdict),
    )
}

fn complex_theta() -> Check {
    let mut ok = true;
    let mut detail = Vec::new();
    for &(b, w) in &[(3.0, 4.0), (0.0, 1.0)] {
        let p = ChannelParams::new(b, w).map_err(|e| e.to_string())?;
        for &t2 in &[1.0, 10.0, 100.0] {
            let r = complex_theta_resolvent_bound(&p, t2, 20, 50).map_err(|e| e.to_string())?;
            ok &= r.pass;
            detail.push(format!("{:.2}", r.sup_value / r.bound));
        }
    }
    ensure(ok, format!("sup/bound {}", detail.join(" ")))
}

fn main() {
    let criteria: [(&str, fn() -> Check); 11] = [
        ("exact spectrum reproduction", exact_spectrum),
        ("spectral bottom", spectral_bottom),
        ("hill oracle equivalence", hill_oracle_agreement),
        ("gap persistence trend", gap_persistence),
        ("no flat bands", no_flat_bands),
        ("classical invariants", classical_invariants),
        ("quantum-classical drift", quantum_classical_drift),
        ("certificate arithmetic", certificate_arithmetic),
        ("relative bounds", appendix_bounds),
        ("commutator algebra", commutator_algebra),
        ("complex-theta resolvent bound", complex_theta),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let (tag, detail) = match f() {
            Ok(d) => ("PASS", d),
            Err(d) => {
                failed += 1;
                ("FAIL", d)
            }
        };
        println!(
            "criterion {:>2} {tag}  {name}: {detail} [{:.1} s]",
            i + 1,
            start.elapsed().as_secs_f64()
        );
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
