//! Transport certificate for a small localized bump, and its large-omega
//! scaling.
use channel_spectra::mourre::{evaluate_certificate, scaling_sweep};
use channel_spectra::{ChannelParams, PotentialSpec};

fn main() -> channel_spectra::Result<()> {
    let spec = PotentialSpec::single_bump(0.01, 0.0, 0.0, 1.0)?;
    let params = ChannelParams::new(3.0, 4.0)?;
    print!("{}", evaluate_certificate(&params, &spec, 8.0, 1.0, 1.0)?.summary());
    let table = scaling_sweep(3.0, 1.6, 0.2, 0.2, &spec, &[4.0, 16.0, 64.0, 256.0])?;
    for r in &table.rows {
        println!("omega {:>5}: threshold {:.4e}, slack {:.4e}, admissible {}", r.omega, r.condition_i_threshold, r.condition_ii_slack, r.admissible);
    }
    println!("first admissible omega: {:?}", table.first_admissible_omega);
    Ok(())
}
