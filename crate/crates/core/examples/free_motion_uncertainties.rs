//! Damped free motion: position and momentum uncertainties for the three
//! initial-condition families, and the long-time product limit.

use ermakov::observables::{free_motion_product_limit, moments, quantum_energy};
use ermakov::run::config::RunConfig;

fn main() {
    let cfg = RunConfig::preset("fig1-free-motion").expect("shipped preset");
    for sc in cfg.scenarios().expect("valid preset") {
        println!("{} (alpha-dot(0) = {:+})", sc.init().label.as_deref().unwrap_or("run"), sc.init().alphadot0());
        println!("{:>6} {:>12} {:>12} {:>12} {:>12}", "t", "sigma_x^2", "sigma_p^2", "product", "E~");
        for t in [0.0, 0.5, 1.0, 2.0, 5.0, 10.0] {
            let m = moments(&sc, t);
            println!(
                "{t:>6.1} {:>12.6} {:>12.6} {:>12.6} {:>12.6}",
                m.sigma_x2,
                m.sigma_p2,
                m.sigma_x2 * m.sigma_p2,
                quantum_energy(&sc, t)
            );
        }
        let limit = free_motion_product_limit(&sc).expect("free motion with friction");
        println!("product limit as t -> infinity: {limit:.6}\n");
    }
}
