//! Spectral gaps opened by `W = 2 cos x` below `3α`.
use channel_spectra::bands::{compute_bands_with, detect_gaps, BandOptions, Refinement, DEFAULT_GAP_TOLERANCE};
use channel_spectra::{ChannelParams, PotentialSpec};

fn main() -> channel_spectra::Result<()> {
    let params = ChannelParams::new(3.0, 10.0)?;
    let opts = BandOptions {
        energy_ceiling: Some(3.0 * params.alpha()),
        refinement: Refinement::GapEdges,
        ..BandOptions::default()
    };
    let bs = compute_bands_with(&params, &PotentialSpec::cosine_x(2.0, 1), &opts)?;
    let report = detect_gaps(&bs, DEFAULT_GAP_TOLERANCE * params.alpha());
    println!("alpha = {:.6}, {} gaps", params.alpha(), report.count);
    for g in &report.gaps {
        println!("  ({:.6}, {:.6}) width {:.6}", g.lo, g.hi, g.width);
    }
    Ok(())
}
