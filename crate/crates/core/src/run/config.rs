//! JSON run configuration and the shipped presets.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{io_error, Error, Result};
use crate::model::{InitialState, Scenario, SystemParams};

pub const CONFIG_VERSION: u32 = 1;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TimeWindow {
    pub t0: f64,
    pub t1: f64,
    pub dt: f64,
}

impl TimeWindow {
    /// `t0, t0 + dt, …`, always ending exactly on `t1`.
    pub fn samples(&self) -> Vec<f64> {
        let span = self.t1 - self.t0;
        let n = (span / self.dt * (1.0 + 1e-12)).floor() as usize;
        let mut ts: Vec<f64> = (0..=n).map(|k| self.t0 + self.dt * k as f64).collect();
        let last = *ts.last().expect("at least t0");
        if self.t1 - last > 1e-9 * self.dt {
            ts.push(self.t1);
        } else if let Some(l) = ts.last_mut() {
            *l = self.t1;
        }
        ts
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Output {
    Moments,
    Energy,
    Invariant,
    Riccati,
    Wigner,
    Velocity,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WignerGridSpec {
    pub times: Vec<f64>,
    /// Explicit `[x_min, x_max]`; auto-sized to ±6σ when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub x: Option<[f64; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p: Option<[f64; 2]>,
    #[serde(default = "default_points")]
    pub nx: usize,
    #[serde(default = "default_points")]
    pub np: usize,
}

fn default_points() -> usize {
    crate::phase_space::AUTO_POINTS
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ScanVariable {
    Gamma,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScanSpec {
    pub variable: ScanVariable,
    pub values: Vec<f64>,
}

/// One initial state or a list of them.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Initial {
    One(InitialState),
    Many(Vec<InitialState>),
}

impl Initial {
    pub fn states(&self) -> &[InitialState] {
        match self {
            Initial::One(s) => std::slice::from_ref(s),
            Initial::Many(v) => v,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default = "current_version")]
    pub version: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    pub params: SystemParams,
    pub initial: Initial,
    pub time: TimeWindow,
    #[serde(default)]
    pub outputs: Vec<Output>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub wigner_grid: Option<WignerGridSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scan: Option<ScanSpec>,
}

fn current_version() -> u32 {
    CONFIG_VERSION
}

fn config_err(msg: impl Into<String>) -> Error {
    Error::Config(msg.into())
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: RunConfig = serde_json::from_str(text).map_err(|e| config_err(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(io_error(path))?;
        Self::from_json(&text)
    }

    pub fn preset(name: &str) -> Result<Self> {
        let text = PRESETS
            .iter()
            .find(|(n, _)| *n == name)
            .map(|(_, t)| *t)
            .ok_or_else(|| config_err(format!("unknown preset `{name}`")))?;
        Self::from_json(text)
    }

    pub fn validate(&self) -> Result<()> {
        if self.version != CONFIG_VERSION {
            return Err(config_err(format!("unsupported config version {}", self.version)));
        }
        let t = &self.time;
        if !(t.dt > 0.0 && t.dt.is_finite()) {
            return Err(config_err(format!("time.dt must be positive, got {}", t.dt)));
        }
        if !(t.t0.is_finite() && t.t1.is_finite() && t.t1 >= t.t0) {
            return Err(config_err(format!("time window [{}, {}] is not ordered", t.t0, t.t1)));
        }
        if self.initial.states().is_empty() {
            return Err(config_err("at least one initial state is required"));
        }
        self.scenarios()?;
        if let Some(scan) = &self.scan {
            if scan.values.is_empty() {
                return Err(config_err("scan.values is empty"));
            }
            if let Some(v) = scan.values.iter().find(|v| !(v.is_finite() && **v >= 0.0)) {
                return Err(config_err(format!("scan value {v} must be finite and non-negative")));
            }
        }
        if let Some(g) = &self.wigner_grid {
            if g.nx < 3 || g.np < 3 {
                return Err(config_err("wigner_grid needs at least 3 points per axis"));
            }
            if let Some(bad) = g.times.iter().find(|&&s| !(s >= t.t0 && s <= t.t1)) {
                return Err(config_err(format!("wigner_grid time {bad} lies outside the time window")));
            }
        }
        Ok(())
    }

    /// Validated scenarios, labelled `run0`, `run1`, … when unlabelled.
    pub fn scenarios(&self) -> Result<Vec<Scenario>> {
        self.initial
            .states()
            .iter()
            .enumerate()
            .map(|(k, s)| {
                let mut s = s.clone();
                if s.label.is_none() {
                    s.label = Some(format!("run{k}"));
                }
                Scenario::new(self.params, s).map_err(|e| config_err(e.to_string()))
            })
            .collect()
    }

    pub fn wants(&self, o: Output) -> bool {
        self.outputs.contains(&o)
    }
}

/// Preset names with their embedded JSON.
pub const PRESETS: [(&str, &str); 6] = [
    ("fig1-free-motion", include_str!("../../presets/fig1-free-motion.json")),
    ("fig1.0-bifurcation", include_str!("../../presets/fig1.0-bifurcation.json")),
    ("ho-under", include_str!("../../presets/ho-under.json")),
    ("ho-aperiodic", include_str!("../../presets/ho-aperiodic.json")),
    ("ho-over", include_str!("../../presets/ho-over.json")),
    ("ho-fixed-point", include_str!("../../presets/ho-fixed-point.json")),
];

pub fn preset_names() -> impl Iterator<Item = &'static str> {
    PRESETS.iter().map(|(n, _)| *n)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn presets_parse() {
        for name in preset_names() {
            let cfg = RunConfig::preset(name).unwrap();
            assert_eq!(cfg.name.as_deref(), Some(name));
            assert!(!cfg.scenarios().unwrap().is_empty());
        }
        assert!(RunConfig::preset("nope").is_err());
    }

    #[test]
    fn samples_end_on_t1() {
        let w = TimeWindow { t0: 0.0, t1: 10.0, dt: 0.01 };
        let s = w.samples();
        assert_eq!(s.len(), 1001);
        assert_eq!(*s.last().unwrap(), 10.0);
        let w = TimeWindow { t0: 0.0, t1: 1.0, dt: 0.3 };
        assert_eq!(w.samples(), vec![0.0, 0.3, 0.6, 0.8999999999999999, 1.0]);
        let w = TimeWindow { t0: 2.0, t1: 2.0, dt: 0.1 };
        assert_eq!(w.samples(), vec![2.0]);
    }

    #[test]
    fn single_initial_object() {
        let cfg = RunConfig::from_json(
            r#"{"params":{"gamma":1,"omega0":0},"initial":{"alpha0":1},"time":{"t0":0,"t1":1,"dt":0.5}}"#,
        )
        .unwrap();
        assert_eq!(cfg.initial.states().len(), 1);
        assert_eq!(cfg.scenarios().unwrap()[0].init().label.as_deref(), Some("run0"));
    }

    #[test]
    fn rejects_bad_configs() {
        let bad = [
            r#"{"params":{"gamma":1,"omega0":0},"initial":{"alpha0":1},"time":{"t0":0,"t1":1,"dt":0}}"#,
            r#"{"params":{"gamma":1,"omega0":0},"initial":{"alpha0":1},"time":{"t0":1,"t1":0,"dt":0.1}}"#,
            r#"{"params":{"gamma":-1,"omega0":0},"initial":{"alpha0":1},"time":{"t0":0,"t1":1,"dt":0.1}}"#,
            r#"{"params":{"gamma":1,"omega0":0},"initial":{"alpha0":0},"time":{"t0":0,"t1":1,"dt":0.1}}"#,
            r#"{"params":{"gamma":1,"omega0":0},"initial":[],"time":{"t0":0,"t1":1,"dt":0.1}}"#,
            r#"{"params":{"gamma":1,"omega0":0},"initial":{"alpha0":1},"time":{"t0":0,"t1":1,"dt":0.1},"scan":{"variable":"gamma","values":[-1]}}"#,
            r#"{"params":{"gamma":1,"omega0":0},"initial":{"alpha0":1},"time":{"t0":0,"t1":1,"dt":0.1},"outputs":["bogus"]}"#,
            r#"{"params":{"gamma":1,"omega0":0},"initial":{"alpha0":1},"time":{"t0":0,"t1":1,"dt":0.1},"extra":1}"#,
            r#"{"version":2,"params":{"gamma":1,"omega0":0},"initial":{"alpha0":1},"time":{"t0":0,"t1":1,"dt":0.1}}"#,
            "not json",
        ];
        for b in bad {
            assert!(matches!(RunConfig::from_json(b), Err(Error::Config(_))), "{b}");
        }
    }
}
