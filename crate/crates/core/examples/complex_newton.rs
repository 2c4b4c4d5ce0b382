//! Complex trajectory built from the mean and the width: its conservation law
//! and the velocity fields of the probability current.

use ermakov::observables::{ermakov_invariant, velocity_fields};
use ermakov::trajectories::mean_position;
use ermakov::width::complex_trajectory;
use ermakov::{Branch, InitialState, Scenario, SystemParams};

fn main() -> ermakov::Result<()> {
    let p = SystemParams::new(1.0, 1.0, 0.5, 1.0)?;
    let sc = Scenario::new(p, InitialState::new(1.0, 0.5, 1.2, 0.4, Branch::Plus))?;
    println!("invariant I = {:.10}", ermakov_invariant(&sc, 0.0).i_expanding);
    for k in 0..=8 {
        let t = 0.5 * k as f64;
        let c = complex_trajectory(&sc, t)?;
        let (eta, _) = mean_position(&sc, t);
        let v = velocity_fields(&sc, t, eta + 0.5);
        println!(
            "t={t:<4} lambda={:+.5} conservation={:.12} v_total={:+.5} v_tun={:+.5}",
            c.lambda(),
            c.conservation(),
            v.v_total,
            v.v_tun
        );
    }
    Ok(())
}
