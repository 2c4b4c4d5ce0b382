//! Wigner function on an automatic grid: normalisation, recovered moments and
//! the convergence of the Fokker–Planck residual under grid refinement.
//!
//! Pass a path to also write the grid as CSV.

use ermakov::observables::moments;
use ermakov::phase_space::{
    default_dt, fill_wigner, fokker_planck_convergence, resolving_points, DriftConvention, PhaseSpaceGrid,
};
use ermakov::run::config::RunConfig;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let sc = RunConfig::preset("ho-under")?.scenarios()?.remove(0);
    let t = 2.5;
    let mut g = PhaseSpaceGrid::auto(&sc, t, resolving_points(&sc, t, 129))?;
    fill_wigner(&sc, t, &mut g);
    let (mean, rec) = g.recovered_moments();
    let exact = moments(&sc, t);
    println!("grid {}x{}, mass {:.12}", g.nx, g.np, g.mass());
    println!("mean (x, p) = ({:.6}, {:.6})", mean.0, mean.1);
    println!("sigma_x^2 {:.9} vs {:.9}", rec.sigma_x2, exact.sigma_x2);
    println!("sigma_p^2 {:.9} vs {:.9}", rec.sigma_p2, exact.sigma_p2);
    println!("sigma_xp  {:.9} vs {:.9}", rec.sigma_xp, exact.sigma_xp);

    let coarse = PhaseSpaceGrid::auto(&sc, t, 65)?;
    let c = fokker_planck_convergence(&sc, t, &coarse, default_dt(&sc), 3, DriftConvention::LocalForce)?;
    let norms: Vec<String> = c.norms.iter().map(|n| format!("{n:.3e}")).collect();
    println!("Fokker-Planck residual norms [{}]", norms.join(", "));
    println!("refinement ratios {:.3?}", c.ratios);

    if let Some(path) = std::env::args().nth(1) {
        let mut out = std::io::BufWriter::new(std::fs::File::create(&path)?);
        g.write_csv(&mut out, None)?;
        println!("wrote {path}");
    }
    Ok(())
}
