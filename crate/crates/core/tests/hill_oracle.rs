mod oracle;

use channel_spectra::hill::hill_spectrum;
use channel_spectra::model::FourierSeries;
use proptest::prelude::*;

#[test]
fn oracle_reproduces_free_spectrum() {
    // -f'' on the twisted circle: (m + θ)² exactly; the discretization error
    // is removed by the extrapolation to well below 1e-8
    let ev = oracle::hill_oracle(|_| 0.0, 0.3, 2048, 4);
    let exact = [0.09, 0.49, 1.69, 2.89];
    for (a, b) in ev.iter().zip(exact) {
        assert!((a - b).abs() < 1e-8, "{a} vs {b}");
    }
}

#[test]
fn two_harmonic_potential() {
    let series = FourierSeries::cosine(1.5, 1).plus(&FourierSeries::sine(0.8, 2));
    for &theta in &[0.0, 0.13, 0.5] {
        let ours = hill_spectrum(&series, theta, 32, 5).unwrap();
        let reference = oracle::hill_oracle(|x| 1.5 * x.cos() + 0.8 * (2.0 * x).sin(), theta, 2048, 5);
        for (a, b) in ours.iter().zip(&reference) {
            assert!((a - b).abs() < 1e-6, "theta {theta}: {a} vs {b}");
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn random_cosine_amplitudes(amp in -3.0f64..3.0, theta in -0.5f64..0.5) {
        let ours = hill_spectrum(&FourierSeries::cosine(amp, 1), theta, 32, 3).unwrap();
        let reference = oracle::hill_oracle(|x| amp * x.cos(), theta, 2048, 3);
        for (a, b) in ours.iter().zip(&reference) {
            prop_assert!((a - b).abs() < 1e-6);
        }
    }
}
