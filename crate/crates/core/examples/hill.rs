//! Hill operators of the diagonal Hermite blocks `H_{n,n}`.
use channel_spectra::hill::hnn_bands;
use channel_spectra::{ChannelParams, PotentialSpec};

fn main() -> channel_spectra::Result<()> {
    let params = ChannelParams::new(3.0, 4.0)?;
    let spec = PotentialSpec::cosine_x(2.0, 1);
    for n in 0..3 {
        let hb = hnn_bands(&params, &spec, n, 3.0 * params.alpha() + 6.0)?;
        println!("H_{{{n},{n}}}: {} gaps, edges at symmetric points: {}", hb.gaps.count, hb.edges_at_symmetric_points);
        for g in hb.gaps.gaps.iter().take(3) {
            println!("  ({:.6}, {:.6})", g.lo, g.hi);
        }
    }
    Ok(())
}
