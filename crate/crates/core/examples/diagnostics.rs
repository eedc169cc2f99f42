//! Relative bounds of the unperturbed resolvent and the complex-momentum
//! resolvent estimate.
use channel_spectra::fiber::complex_theta_resolvent_bound;
use channel_spectra::mourre::appendix_norm_checks;
use channel_spectra::ChannelParams;

fn main() -> channel_spectra::Result<()> {
    let params = ChannelParams::new(3.0, 4.0)?;
    let r = appendix_norm_checks(&params, 0.0, 40, 6)?;
    println!("lambda+ = {:.6}, lambda- = {:.6} >= {:.6}", r.lambda_plus, r.lambda_minus, r.lambda_minus_bound);
    for c in &r.checks {
        println!("  {:<10} {:.6} <= {:.6}  {}", c.name, c.estimate, c.bound, c.pass);
    }
    for t2 in [1.0, 10.0, 100.0] {
        let b = complex_theta_resolvent_bound(&params, t2, 20, 50)?;
        println!("theta2 = {t2}: sup {:.3e} <= {:.3e}  {}", b.sup_value, b.bound, b.pass);
    }
    Ok(())
}
