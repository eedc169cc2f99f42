//! Band functions of the free channel and of a periodic corrugation.
use channel_spectra::bands::{compute_bands_with, BandOptions};
use channel_spectra::{ChannelParams, PotentialSpec};

fn main() -> channel_spectra::Result<()> {
    let params = ChannelParams::new(3.0, 4.0)?;
    for (name, spec) in [("W = 0", PotentialSpec::zero()), ("W = 2 cos x", PotentialSpec::cosine_x(2.0, 1))] {
        let bs = compute_bands_with(&params, &spec, &BandOptions { theta_count: 17, ..BandOptions::default() })?;
        println!("{name}: N = {}, M = {}", bs.truncation.n_hermite, bs.truncation.m_fourier);
        for (j, (lo, hi)) in bs.band_intervals.iter().enumerate() {
            println!("  band {:>2}: [{lo:.6}, {hi:.6}]", j + 1);
        }
    }
    Ok(())
}
