//! Phase-space grid dumps.

use std::io::Write;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::error::{io_error, Result};
use crate::model::Scenario;
use crate::phase_space::{
    default_dt, fokker_planck_convergence, fokker_planck_residual, marginals, resolving_points, DriftConvention,
    PhaseSpaceGrid,
};
use crate::run::config::RunConfig;
use crate::run::simulate::{label, FileSet};

#[derive(Clone, Debug, Serialize)]
pub struct GridReport {
    pub t: f64,
    pub file: String,
    pub nx: usize,
    pub np: usize,
    pub mass: f64,
    pub peak: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub fp_max_norm: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub d_x: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub d_p: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub refinement_ratios: Option<Vec<f64>>,
}

fn grid_for(sc: &Scenario, cfg: &RunConfig, tau: f64) -> Result<PhaseSpaceGrid> {
    match &cfg.wigner_grid {
        Some(spec) => {
            let auto = PhaseSpaceGrid::auto(sc, tau, spec.nx)?;
            let x = spec.x.map(|[a, b]| (a, b)).unwrap_or((auto.x_min, auto.x_max));
            let p = spec.p.map(|[a, b]| (a, b)).unwrap_or((auto.p_min, auto.p_max));
            PhaseSpaceGrid::new(x, p, spec.nx, spec.np)
        }
        None => PhaseSpaceGrid::auto(sc, tau, resolving_points(sc, tau, crate::phase_space::AUTO_POINTS)),
    }
}

pub(crate) fn dump_grids(
    sc: &Scenario,
    cfg: &RunConfig,
    dir: &Path,
    fp_residual: bool,
    refine: usize,
    files: &mut FileSet,
) -> Result<Vec<GridReport>> {
    let name = label(sc);
    let times = cfg.wigner_grid.as_ref().map(|g| g.times.clone()).unwrap_or_else(|| vec![cfg.time.t0]);
    let mut reports = Vec::with_capacity(times.len());
    for (k, &t) in times.iter().enumerate() {
        let tau = t - cfg.time.t0;
        let mut grid = grid_for(sc, cfg, tau)?;
        marginals(sc, tau, &mut grid)?;
        let file = format!("{name}-wigner-{k}.csv");
        let path = dir.join(&file);
        let mut report = GridReport {
            t,
            file,
            nx: grid.nx,
            np: grid.np,
            mass: grid.mass(),
            peak: grid.values.iter().copied().fold(0.0, f64::max),
            fp_max_norm: None,
            d_x: None,
            d_p: None,
            refinement_ratios: None,
        };
        let mut out = files.create(path.clone())?;
        if fp_residual {
            let dt = default_dt(sc);
            let r = fokker_planck_residual(sc, tau, &mut grid, dt, DriftConvention::LocalForce);
            grid.write_csv(&mut out, Some(&r.residual)).map_err(io_error(&path))?;
            report.fp_max_norm = Some(r.max_norm);
            report.d_x = Some(r.d_x);
            report.d_p = Some(r.d_p);
            if refine > 0 {
                let c = fokker_planck_convergence(sc, tau, &grid, dt, refine, DriftConvention::LocalForce)?;
                report.refinement_ratios = Some(c.ratios);
            }
        } else {
            grid.write_csv(&mut out, None).map_err(io_error(&path))?;
        }
        out.flush().map_err(io_error(&path))?;
        reports.push(report);
    }

    let path = dir.join(format!("{name}-wigner.json"));
    let mut out = files.create(path.clone())?;
    serde_json::to_writer_pretty(&mut out, &reports)?;
    writeln!(out).map_err(io_error(&path))?;
    out.flush().map_err(io_error(&path))?;
    Ok(reports)
}

/// Writes Wigner grids (and, with `fp_residual`, the Fokker–Planck residual
/// column plus `refine` levels of convergence ratios) for every initial state.
pub fn wigner_dump(cfg: &RunConfig, dir: &Path, fp_residual: bool, refine: usize) -> Result<(Vec<PathBuf>, Vec<GridReport>)> {
    cfg.validate()?;
    std::fs::create_dir_all(dir).map_err(io_error(dir))?;
    let mut files = FileSet::default();
    let mut reports = Vec::new();
    for sc in cfg.scenarios()? {
        reports.extend(dump_grids(&sc, cfg, dir, fp_residual, refine, &mut files)?);
    }
    Ok((files.keep(), reports))
}
