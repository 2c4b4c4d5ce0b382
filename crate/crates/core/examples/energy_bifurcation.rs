//! Initial quantum energy of the zero-rate, plus and minus families as the
//! friction coefficient grows from zero.

use ermakov::run::config::RunConfig;
use ermakov::run::scan::scan_gamma;

fn main() {
    let cfg = RunConfig::preset("fig1.0-bifurcation").expect("shipped preset");
    let rows = scan_gamma(&cfg).expect("valid scan");
    println!("{:>6} {:>10} {:>10} {:>10} {:>10}", "gamma", "zero", "plus", "minus", "gap");
    for r in rows.iter().step_by(4) {
        println!("{:>6.2} {:>10.6} {:>10.6} {:>10.6} {:>10.6}", r.gamma, r.zero, r.plus, r.minus, r.minus - r.plus);
    }
}
