//! Time-series output for each configured initial state.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::Serialize;
use serde_json::json;

use crate::error::{io_error, Result};
use crate::model::{DampingRegime, Scenario};
use crate::observables::{energy_gap, ermakov_invariant, free_motion_product_limit, moments, total_energy, velocity_fields, EnergyGap};
use crate::run::config::{Output, RunConfig};
use crate::run::wigner::dump_grids;
use crate::trajectories::mean_position;
use crate::width::{riccati_closed_form, riccati_particular, WidthProfile};

pub const CSV_HEADER: &str = "t,eta,etadot,alpha,alphadot,c_re,c_im,sigma_x2,sigma_p2,sigma_xp,product,e_total,e_quantum,i_ermakov";

/// One output row; closed forms are evaluated at `t − t0`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Row {
    pub t: f64,
    pub eta: f64,
    pub etadot: f64,
    pub alpha: f64,
    pub alphadot: f64,
    pub c_re: f64,
    pub c_im: f64,
    pub sigma_x2: f64,
    pub sigma_p2: f64,
    pub sigma_xp: f64,
    pub product: f64,
    pub e_total: f64,
    pub e_quantum: f64,
    pub i_ermakov: f64,
}

impl Row {
    pub fn at(sc: &Scenario, t0: f64, t: f64) -> Self {
        let tau = t - t0;
        let (eta, etadot) = mean_position(sc, tau);
        let w = WidthProfile::at(sc, tau);
        let c = riccati_closed_form(sc, tau);
        let m = moments(sc, tau);
        let e = total_energy(sc, tau);
        Self {
            t,
            eta,
            etadot,
            alpha: w.alpha,
            alphadot: w.alphadot,
            c_re: c.re(),
            c_im: c.im(),
            sigma_x2: m.sigma_x2,
            sigma_p2: m.sigma_p2,
            sigma_xp: m.sigma_xp,
            product: m.determinant(),
            e_total: e.e_total,
            e_quantum: e.e_quantum,
            i_ermakov: ermakov_invariant(sc, tau).i_expanding,
        }
    }

    pub fn values(&self) -> [f64; 14] {
        [
            self.t,
            self.eta,
            self.etadot,
            self.alpha,
            self.alphadot,
            self.c_re,
            self.c_im,
            self.sigma_x2,
            self.sigma_p2,
            self.sigma_xp,
            self.product,
            self.e_total,
            self.e_quantum,
            self.i_ermakov,
        ]
    }
}

pub(crate) fn write_row<W: Write>(out: &mut W, values: &[f64]) -> std::io::Result<()> {
    for (k, v) in values.iter().enumerate() {
        if k > 0 {
            out.write_all(b",")?;
        }
        write!(out, "{v:.16e}")?;
    }
    out.write_all(b"\n")
}

/// Removes every file it created unless [`FileSet::keep`] is called.
#[derive(Debug, Default)]
pub(crate) struct FileSet {
    paths: Vec<PathBuf>,
    keep: bool,
}

impl FileSet {
    pub fn create(&mut self, path: PathBuf) -> Result<BufWriter<File>> {
        let f = File::create(&path).map_err(io_error(&path))?;
        self.paths.push(path);
        Ok(BufWriter::new(f))
    }

    pub fn keep(mut self) -> Vec<PathBuf> {
        self.keep = true;
        std::mem::take(&mut self.paths)
    }
}

impl Drop for FileSet {
    fn drop(&mut self) {
        if !self.keep {
            for p in &self.paths {
                let _ = std::fs::remove_file(p);
            }
        }
    }
}

#[derive(Clone, Debug, Serialize)]
struct Limits {
    #[serde(skip_serializing_if = "Option::is_none")]
    free_motion_product: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    fixed_point_alpha0: Option<f64>,
}

fn limits(sc: &Scenario) -> Limits {
    let p = sc.params();
    let fixed_point_alpha0 = (sc.regime() == DampingRegime::UnderCritical).then(|| p.omega_sq_shifted().sqrt().recip().sqrt());
    Limits {
        free_motion_product: free_motion_product_limit(sc),
        fixed_point_alpha0,
    }
}

#[derive(Clone, Debug, Serialize)]
struct Sidecar<'a> {
    config: &'a RunConfig,
    run: &'a str,
    regime: DampingRegime,
    branch: serde_json::Value,
    energy_gap0: EnergyGap,
    invariant0: f64,
    particular_solutions: [[f64; 2]; 2],
    limits: Limits,
    rows: usize,
}

/// Rows for one scenario over the configured window.
pub fn rows(sc: &Scenario, cfg: &RunConfig) -> Vec<Row> {
    cfg.time.samples().iter().map(|&t| Row::at(sc, cfg.time.t0, t)).collect()
}

pub(crate) fn label(sc: &Scenario) -> &str {
    sc.init().label.as_deref().unwrap_or("run")
}

fn write_run(sc: &Scenario, cfg: &RunConfig, dir: &Path, files: &mut FileSet) -> Result<()> {
    let name = label(sc);
    let rows = rows(sc, cfg);

    let path = dir.join(format!("{name}.csv"));
    let mut out = files.create(path.clone())?;
    writeln!(out, "{CSV_HEADER}").map_err(io_error(&path))?;
    for r in &rows {
        write_row(&mut out, &r.values()).map_err(io_error(&path))?;
    }
    out.flush().map_err(io_error(&path))?;

    if cfg.wants(Output::Velocity) {
        let path = dir.join(format!("{name}-velocity.csv"));
        let mut out = files.create(path.clone())?;
        writeln!(out, "t,x,v_nl,v_diff,v_total,v_tun").map_err(io_error(&path))?;
        for r in &rows {
            // one position standard deviation ahead of the mean
            let x = r.eta + r.sigma_x2.sqrt();
            let v = velocity_fields(sc, r.t - cfg.time.t0, x);
            write_row(&mut out, &[r.t, x, v.v_nl, v.v_diff, v.v_total, v.v_tun]).map_err(io_error(&path))?;
        }
        out.flush().map_err(io_error(&path))?;
    }

    if cfg.wants(Output::Wigner) {
        dump_grids(sc, cfg, dir, false, 0, files)?;
    }

    let (cp, cm) = riccati_particular(sc.params());
    let init = sc.init();
    let sidecar = Sidecar {
        config: cfg,
        run: name,
        regime: sc.regime(),
        branch: json!({
            "branch": sc.branch().as_str(),
            "alphadot0": init.alphadot0(),
            "plus": "alphadot(t0) = +|alphadot0|",
            "minus": "alphadot(t0) = -|alphadot0|",
        }),
        energy_gap0: energy_gap(sc),
        invariant0: ermakov_invariant(sc, 0.0).i_expanding,
        particular_solutions: [[cp.re(), cp.im()], [cm.re(), cm.im()]],
        limits: limits(sc),
        rows: rows.len(),
    };
    let path = dir.join(format!("{name}.json"));
    let mut out = files.create(path.clone())?;
    serde_json::to_writer_pretty(&mut out, &sidecar)?;
    writeln!(out).map_err(io_error(&path))?;
    out.flush().map_err(io_error(&path))?;
    Ok(())
}

/// Writes `<label>.csv` and `<label>.json` (plus optional velocity and Wigner
/// files) for every initial state into `dir`. On error every file written by
/// this call is removed.
pub fn simulate(cfg: &RunConfig, dir: &Path) -> Result<Vec<PathBuf>> {
    cfg.validate()?;
    std::fs::create_dir_all(dir).map_err(io_error(dir))?;
    let scenarios = cfg.scenarios()?;
    let results: Vec<(Result<()>, FileSet)> = scenarios
        .par_iter()
        .map(|sc| {
            let mut files = FileSet::default();
            let r = write_run(sc, cfg, dir, &mut files);
            (r, files)
        })
        .collect();
    let mut kept = Vec::new();
    let mut sets = Vec::new();
    for (r, files) in results {
        r?;
        sets.push(files);
    }
    for files in sets {
        kept.extend(files.keep());
    }
    Ok(kept)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn row_at_origin() {
        let cfg = RunConfig::preset("fig1-free-motion").unwrap();
        let sc = &cfg.scenarios().unwrap()[0];
        let r = Row::at(sc, 0.0, 0.0);
        assert_eq!((r.eta, r.etadot, r.alpha, r.alphadot), (1.0, 1.0, 1.0, 0.0));
        assert_eq!((r.c_re, r.c_im), (-0.5, 1.0));
        assert_eq!(r.product, 0.25);
    }

    #[test]
    fn shifted_origin() {
        let mut cfg = RunConfig::preset("ho-under").unwrap();
        cfg.time.t0 = 3.0;
        cfg.time.t1 = 4.0;
        let sc = &cfg.scenarios().unwrap()[0];
        let r = Row::at(sc, 3.0, 3.0);
        assert_eq!((r.t, r.eta, r.alpha), (3.0, 1.0, 1.0));
    }
}
