//! The complex Riccati variable reached three ways: from the width closed
//! form, by Bernoulli linearisation about either constant solution, and by
//! direct integration. Also shows the map into the other two representations.

use ermakov::oracle::{integrate_riccati, IntegratorConfig};
use ermakov::width::{initial_riccati, riccati_bernoulli, riccati_closed_form, riccati_particular, transform_representation};
use ermakov::{Branch, InitialState, Representation, Scenario, SystemParams};

fn main() -> ermakov::Result<()> {
    let p = SystemParams::new(1.0, 1.0, 1.0, 1.0)?;
    let sc = Scenario::new(p, InitialState::new(1.0, 0.0, 1.0, 0.3, Branch::Minus))?;
    let (plus, minus) = riccati_particular(&p);
    println!("constant solutions: {:.6} and {:.6}", plus.value, minus.value);

    let cfg = IntegratorConfig::new(0.0, 5.0)?;
    let times = cfg.uniform_times(5);
    let direct = integrate_riccati(&p, initial_riccati(&sc), Representation::NL, &cfg, &times)?;
    for (t, c) in direct.iter() {
        let closed = riccati_closed_form(&sc, t);
        let via_plus = riccati_bernoulli(&sc, Branch::Plus, t);
        let via_minus = riccati_bernoulli(&sc, Branch::Minus, t);
        let ck = transform_representation(&closed, Representation::CK, t, &p);
        let e = transform_representation(&closed, Representation::E, t, &p);
        println!(
            "t={t:.1} C={:.8} |bernoulli-|={:.1e} |bernoulli+|={:.1e} |ode|={:.1e}  C_CK={:.4} C_E={:.4}",
            closed.value,
            (via_plus.value - closed.value).norm(),
            (via_minus.value - closed.value).norm(),
            (c.value - closed.value).norm(),
            ck.value,
            e.value
        );
    }
    Ok(())
}
