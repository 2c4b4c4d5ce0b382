//! Width and quantum energy of the damped oscillator in the under-critical,
//! aperiodic and overdamped regimes, plus the constant-width fixed point.

use ermakov::observables::{energy_gap, moments, quantum_energy};
use ermakov::run::config::RunConfig;

fn main() {
    for name in ["ho-under", "ho-aperiodic", "ho-over", "ho-fixed-point"] {
        let cfg = RunConfig::preset(name).expect("shipped preset");
        let sc = cfg.scenarios().expect("valid preset").remove(0);
        println!("{name}: regime {}, initial gap {:.6}", sc.regime().as_str(), energy_gap(&sc).gap);
        for t in [0.0, 1.0, 2.0, 4.0] {
            let m = moments(&sc, t);
            println!("  t={t:<4} sigma_x^2={:<14.6e} sigma_xp={:<14.6e} E~={:.6e}", m.sigma_x2, m.sigma_xp, quantum_energy(&sc, t));
        }
    }
}
