//! Drifting cyclotron orbits: closed form against RK4 and the linear growth
//! of `p_x S_x`.
use channel_spectra::classical::{closed_form_trajectory, integrate, mourre_observable, ClassicalState};
use channel_spectra::{ChannelParams, PotentialSpec};

fn main() -> channel_spectra::Result<()> {
    let params = ChannelParams::new(3.0, 4.0)?;
    let s0 = ClassicalState::new(0.0, 0.5, 1.0, 0.0);
    let exact = closed_form_trajectory(&params, &PotentialSpec::zero(), &s0, 1.0, 1e-3)?;
    let rk = integrate(&params, &PotentialSpec::zero(), &s0, 1.0, 1e-3)?;
    let (a, b) = (exact.last(), rk.last());
    println!("final x: closed {:.12}, rk4 {:.12}", a.x, b.x);
    println!("d(px Sx)/dt = {:.12}, expected {:.12}", mourre_observable(&exact).slope, 2.0 * params.beta());

    let bump = PotentialSpec::single_bump(1.0, 2.0, 0.0, 0.5)?;
    let scattered = integrate(&params, &bump, &s0, 4.0, 1e-3)?;
    println!("with a bump: energy drift {:.2e}, final px {:.6}", scattered.energy_drift(), scattered.last().px);
    Ok(())
}
