use channel_spectra::bands::{compute_bands_with, BandOptions, Refinement};
use channel_spectra::basis::project_potential;
use channel_spectra::fiber::{assemble_fiber, eigenvalues_fiber};
use channel_spectra::model::{ChannelParams, FourierSeries, PotentialKind, PotentialSpec, YProfile};

fn p34() -> ChannelParams {
    ChannelParams::new(3.0, 4.0).unwrap()
}

fn fiber_spectrum(p: &ChannelParams, spec: &PotentialSpec, theta: f64, n: usize, m: usize) -> Vec<f64> {
    let proj = project_potential(spec, p, n - 1, 2 * m).unwrap();
    let mat = assemble_fiber(p, &proj, theta, n, m).unwrap();
    eigenvalues_fiber(&mat, mat.dim()).unwrap()
}

#[test]
fn transverse_quadratic_potential_renormalizes_omega() {
    // W = c y² is the same operator with ω² + c
    let c = 2.0;
    let spec = PotentialSpec::new(PotentialKind::YOnly {
        profile: YProfile::Polynomial { coeffs: vec![0.0, 0.0, c] },
    })
    .unwrap();
    let p = p34();
    let shifted = ChannelParams::new(3.0, (16.0 + c).sqrt()).unwrap();
    let ev = fiber_spectrum(&p, &spec, 0.2, 40, 2);
    for n in 0..3 {
        for m in -1..=1i64 {
            let exact = shifted.landau_band(n, m as f64 + 0.2);
            let near = ev.iter().map(|e| (e - exact).abs()).fold(f64::INFINITY, f64::min);
            assert!(near < 1e-8, "n {n} m {m}: {near}");
        }
    }
}

#[test]
fn time_reversal_symmetry() {
    let spec = PotentialSpec::new(PotentialKind::XOnly {
        series: FourierSeries::cosine(1.0, 1).plus(&FourierSeries::sine(0.5, 2)),
    })
    .unwrap();
    for &t in &[0.1, 0.37] {
        let a = fiber_spectrum(&p34(), &spec, t, 24, 6);
        let b = fiber_spectrum(&p34(), &spec, -t, 24, 6);
        for (x, y) in a.iter().zip(&b).take(20) {
            assert!((x - y).abs() < 1e-9);
        }
    }
}

#[test]
fn translation_in_x_is_unitary() {
    // cos(x - 1) = cos 1 cos x + sin 1 sin x
    let shifted = PotentialSpec::new(PotentialKind::XOnly {
        series: FourierSeries::cosine(2.0 * 1f64.cos(), 1).plus(&FourierSeries::sine(2.0 * 1f64.sin(), 1)),
    })
    .unwrap();
    let a = fiber_spectrum(&p34(), &PotentialSpec::cosine_x(2.0, 1), 0.2, 24, 6);
    let b = fiber_spectrum(&p34(), &shifted, 0.2, 24, 6);
    for (x, y) in a.iter().zip(&b).take(20) {
        assert!((x - y).abs() < 1e-9);
    }
}

#[test]
fn perturbation_moves_eigenvalues_by_at_most_w0() {
    let spec = PotentialSpec::cosine_x(0.7, 1);
    let w0 = spec.norms().w0.value().unwrap();
    let a = fiber_spectrum(&p34(), &PotentialSpec::zero(), 0.3, 24, 6);
    let b = fiber_spectrum(&p34(), &spec, 0.3, 24, 6);
    for (x, y) in a.iter().zip(&b).take(30) {
        assert!((x - y).abs() <= w0 + 1e-10);
    }
}

// compressions of H₀ + W are bounded below by α - W₀
#[test]
fn bottom_respects_lower_bound() {
    let p = p34();
    let spec = PotentialSpec::single_bump(-1.5, 0.0, 0.0, 0.7).unwrap();
    let w0 = spec.norms().w0.value().unwrap();
    for &t in &[-0.5, 0.0, 0.25] {
        let ev = fiber_spectrum(&p, &spec, t, 16, 4);
        assert!(ev[0] >= p.alpha() - w0 - 1e-9, "{}", ev[0]);
        assert!(ev[0] < p.alpha());
    }
}

#[test]
fn constant_potential_shifts_bands() {
    let p = p34();
    let opts = BandOptions {
        theta_count: 9,
        energy_ceiling: Some(13.0),
        refinement: Refinement::None,
        ..BandOptions::default()
    };
    let free = compute_bands_with(&p, &PotentialSpec::zero(), &opts).unwrap();
    let shifted = compute_bands_with(&p, &PotentialSpec::constant(0.5).unwrap(), &BandOptions {
        energy_ceiling: Some(13.5),
        ..opts.clone()
    })
    .unwrap();
    assert_eq!(free.band_count(), shifted.band_count());
    for (a, b) in free.band_intervals.iter().zip(&shifted.band_intervals) {
        assert!((b.0 - a.0 - 0.5).abs() < 1e-9);
    }
}
