//! Experiment configuration files and run manifests.
//!
//! A configuration is a flat, sectioned key-value file (TOML syntax) with the
//! sections `channel`, `fluid`, `particles`, `flow` and `sim`. Every key is
//! optional; omitted keys take the reference carotid values. All quantities
//! are SI.
//!
//! ```toml
//! [channel]
//! r_p_rel = 0.5
//!
//! [fluid]
//! model = "herschel_bulkley"
//! zeta = 0.05
//!
//! [flow]
//! mode = "pulsatile"
//! release = "ps"
//!
//! [sim]
//! seed = 42
//! ```

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::channel::DiffusionSpec;
use crate::defaults;
use crate::error::{Error, Result};
use crate::geometry::VesselGeometry;
use crate::pulsatile::{default_waveform, PulsatileWaveform};
use crate::rheology::{FluidKind, FluidModel};
use crate::transport::{FlowMode, SimulationConfig};

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ConfigFile {
    pub channel: ChannelSection,
    pub fluid: FluidSection,
    pub particles: ParticleSection,
    pub flow: FlowSection,
    pub sim: SimSection,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ChannelSection {
    pub r_c: f64,
    pub l_c: f64,
    /// Absolute plaque extension [m]. Mutually exclusive with `r_p_rel`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub r_p: Option<f64>,
    /// Plaque extension relative to `r_c`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub r_p_rel: Option<f64>,
    pub l_p_outer: f64,
    pub l_p_inner: f64,
    /// Plaque center; defaults to `l_c / 2`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub x_center: Option<f64>,
}

impl Default for ChannelSection {
    fn default() -> Self {
        Self {
            r_c: defaults::CHANNEL_RADIUS,
            l_c: defaults::CHANNEL_LENGTH,
            r_p: None,
            r_p_rel: None,
            l_p_outer: defaults::PLAQUE_OUTER_LENGTH,
            l_p_inner: defaults::PLAQUE_INNER_LENGTH,
            x_center: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct FluidSection {
    pub model: FluidKind,
    /// Consistency index (the viscosity for a Newtonian fluid).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tau_y: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub zeta: Option<f64>,
    pub density: f64,
}

impl Default for FluidSection {
    fn default() -> Self {
        Self {
            model: FluidKind::Newtonian,
            k: None,
            n: None,
            tau_y: None,
            zeta: None,
            density: defaults::BLOOD_DENSITY,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ParticleSection {
    pub count: usize,
    pub radius: f64,
    pub temperature: f64,
    /// Viscosity entering the Stokes-Einstein estimate.
    pub viscosity: f64,
    pub boltzmann: f64,
    /// Overrides the Stokes-Einstein estimate [m^2/s].
    #[serde(skip_serializing_if = "Option::is_none")]
    pub diffusion: Option<f64>,
}

impl Default for ParticleSection {
    fn default() -> Self {
        Self {
            count: defaults::PARTICLE_COUNT,
            radius: defaults::PARTICLE_RADIUS,
            temperature: defaults::TEMPERATURE,
            viscosity: defaults::BLOOD_VISCOSITY,
            boltzmann: defaults::BOLTZMANN,
            diffusion: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FlowKind {
    Constant,
    Pulsatile,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct FlowSection {
    pub mode: FlowKind,
    /// Mean speed of the constant flow, and the cycle mean of a normalized waveform [m/s].
    pub u_avg: f64,
    /// Waveform table; the shipped carotid cycle when absent.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub waveform: Option<PathBuf>,
    pub period: f64,
    /// `ps`, `ed`, `ld` or `t=<seconds>`.
    pub release: String,
    /// Rescale the waveform so its cycle mean equals `u_avg`.
    pub normalize: bool,
}

impl Default for FlowSection {
    fn default() -> Self {
        Self {
            mode: FlowKind::Constant,
            u_avg: defaults::MEAN_SPEED,
            waveform: None,
            period: defaults::CARDIAC_PERIOD,
            release: "ps".to_string(),
            normalize: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SimSection {
    /// Integration step; chosen from the plaque size when absent.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dt: Option<f64>,
    pub t_end: f64,
    pub seed: u64,
}

impl Default for SimSection {
    fn default() -> Self {
        Self {
            dt: None,
            t_end: defaults::DURATION,
            seed: defaults::SEED,
        }
    }
}

/// Parses configuration text. Unknown keys are rejected.
pub fn parse_config(text: &str) -> Result<ConfigFile> {
    toml::from_str(text).map_err(|e| {
        let line = e
            .span()
            .map(|s| text[..s.start.min(text.len())].matches('\n').count() + 1)
            .unwrap_or(0);
        Error::Config {
            line,
            msg: e.message().to_string(),
        }
    })
}

pub fn load_config(path: &Path) -> Result<ConfigFile> {
    let text = std::fs::read_to_string(path)?;
    let mut cfg = parse_config(&text)?;
    // waveform paths are relative to the config file
    if let (Some(wf), Some(dir)) = (&cfg.flow.waveform, path.parent()) {
        if wf.is_relative() {
            cfg.flow.waveform = Some(dir.join(wf));
        }
    }
    Ok(cfg)
}

/// Release instant within the cardiac cycle.
pub fn parse_release(spec: &str, period: f64) -> Result<f64> {
    let t = match spec.trim().to_ascii_lowercase().as_str() {
        "ps" => defaults::T_PEAK_SYSTOLE,
        "ed" => defaults::T_EARLY_DIASTOLE,
        "ld" => defaults::T_LATE_DIASTOLE,
        other => {
            let value = other.strip_prefix("t=").unwrap_or(other);
            value.parse::<f64>().map_err(|_| {
                Error::Validation(vec![format!(
                    "release must be ps, ed, ld or t=<seconds>, got {spec:?}"
                )])
            })?
        }
    };
    if !(t >= 0.0 && t.is_finite()) {
        return Err(Error::Validation(vec![format!("release time must be non-negative, got {t}")]));
    }
    // the end of one cycle is the start of the next
    Ok(t.rem_euclid(period))
}

impl ConfigFile {
    pub fn plaque_rel(&self) -> f64 {
        match (self.channel.r_p, self.channel.r_p_rel) {
            (Some(r_p), _) => r_p / self.channel.r_c,
            (None, Some(rel)) => rel,
            (None, None) => 0.0,
        }
    }

    pub fn geometry(&self) -> Result<VesselGeometry> {
        let c = &self.channel;
        if c.r_p.is_some() && c.r_p_rel.is_some() {
            return Err(Error::Validation(vec![
                "set either channel.r_p or channel.r_p_rel, not both".to_string(),
            ]));
        }
        let r_p = c.r_p.unwrap_or_else(|| c.r_p_rel.unwrap_or(0.0) * c.r_c);
        Ok(VesselGeometry {
            r_c: c.r_c,
            l_c: c.l_c,
            r_p,
            l_p_outer: c.l_p_outer,
            l_p_inner: c.l_p_inner,
            x_center: c.x_center.unwrap_or(c.l_c / 2.0),
        })
    }

    pub fn fluid(&self) -> FluidModel {
        let f = &self.fluid;
        let model = match f.model {
            FluidKind::Newtonian => FluidModel {
                index: f.n.unwrap_or(1.0),
                yield_stress: f.tau_y.unwrap_or(0.0),
                yield_surface: f.zeta.unwrap_or(0.0),
                ..FluidModel::newtonian(f.k.unwrap_or(defaults::BLOOD_VISCOSITY))
            },
            FluidKind::PowerLaw => FluidModel {
                yield_stress: f.tau_y.unwrap_or(0.0),
                yield_surface: f.zeta.unwrap_or(0.0),
                ..FluidModel::power_law(
                    f.k.unwrap_or(defaults::CONSISTENCY_INDEX),
                    f.n.unwrap_or(defaults::POWER_LAW_INDEX),
                )
            },
            FluidKind::HerschelBulkley => FluidModel::herschel_bulkley(
                f.k.unwrap_or(defaults::CONSISTENCY_INDEX),
                f.n.unwrap_or(defaults::POWER_LAW_INDEX),
                f.tau_y.unwrap_or(defaults::YIELD_STRESS),
                f.zeta.unwrap_or(defaults::YIELD_SURFACE),
            ),
        };
        model.with_density(f.density)
    }

    pub fn diffusion(&self) -> DiffusionSpec {
        let p = &self.particles;
        DiffusionSpec {
            boltzmann: p.boltzmann,
            temperature: p.temperature,
            viscosity: p.viscosity,
            particle_radius: p.radius,
            coefficient: p.diffusion,
        }
    }

    pub fn time_step(&self) -> f64 {
        self.sim.dt.unwrap_or_else(|| defaults::time_step_for(self.plaque_rel()))
    }

    /// Loads the configured waveform without normalization.
    pub fn waveform(&self) -> Result<PulsatileWaveform> {
        match &self.flow.waveform {
            None => {
                let w = default_waveform();
                if (w.period() - self.flow.period).abs() > 1e-12 {
                    return Err(Error::Validation(vec![format!(
                        "the built-in waveform has a {} s period, config declares {} s",
                        w.period(),
                        self.flow.period
                    )]));
                }
                Ok(w)
            }
            Some(path) => {
                let text = std::fs::read_to_string(path)?;
                PulsatileWaveform::parse(&text, Some(self.flow.period))
            }
        }
    }

    /// Every optional key made explicit, waveform paths absolute.
    pub fn resolved(&self) -> Result<Self> {
        let geometry = self.geometry()?;
        let fluid = self.fluid();
        let mut out = self.clone();
        out.channel.r_p = None;
        out.channel.r_p_rel = Some(geometry.r_p / geometry.r_c);
        out.channel.x_center = Some(geometry.x_center);
        out.fluid.k = Some(fluid.consistency);
        out.fluid.n = Some(fluid.index);
        out.fluid.tau_y = Some(fluid.yield_stress);
        out.fluid.zeta = Some(fluid.yield_surface);
        out.sim.dt = Some(self.time_step());
        if let Some(wf) = &self.flow.waveform {
            out.flow.waveform = Some(std::path::absolute(wf)?);
        }
        Ok(out)
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Validation(vec![e.to_string()]))
    }

    pub fn to_simulation(&self) -> Result<SimulationConfig> {
        let geometry = self.geometry()?;
        let flow = match self.flow.mode {
            FlowKind::Constant => FlowMode::Constant {
                u_avg: self.flow.u_avg,
            },
            FlowKind::Pulsatile => {
                let mut waveform = self.waveform()?;
                if self.flow.normalize {
                    waveform = waveform.normalize_mean(self.flow.u_avg, geometry.r_c)?;
                }
                let release_time = parse_release(&self.flow.release, waveform.period())?;
                FlowMode::Pulsatile {
                    waveform,
                    release_time,
                }
            }
        };
        let cfg = SimulationConfig {
            geometry,
            fluid: self.fluid(),
            diffusion: self.diffusion(),
            flow,
            particles: self.particles.count,
            dt: self.time_step(),
            duration: self.sim.t_end,
            seed: self.sim.seed,
        };
        cfg.validate().map_err(Error::Validation)?;
        Ok(cfg)
    }

    /// SHA-256 over the resolved configuration and, in pulsatile mode, the
    /// waveform samples. Independent of key order in the source file.
    pub fn hash(&self) -> Result<String> {
        let resolved = self.resolved()?;
        let mut hasher = Sha256::new();
        hasher.update(resolved.to_toml()?.as_bytes());
        if resolved.flow.mode == FlowKind::Pulsatile {
            for (t, q) in resolved.waveform()?.samples() {
                hasher.update(t.to_le_bytes());
                hasher.update(q.to_le_bytes());
            }
        }
        Ok(hasher
            .finalize()
            .iter()
            .map(|b| format!("{b:02x}"))
            .collect())
    }
}

/// Record of a `simulate` invocation, enough to reproduce its outputs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub tool: String,
    pub version: String,
    pub config_hash: String,
    pub seed: u64,
    /// Resolved configuration in file syntax.
    pub config: String,
    pub outputs: Vec<PathBuf>,
    pub wall_clock_s: f64,
}

impl RunManifest {
    pub fn new(config: &ConfigFile, outputs: Vec<PathBuf>, wall_clock_s: f64) -> Result<Self> {
        let resolved = config.resolved()?;
        Ok(Self {
            tool: env!("CARGO_PKG_NAME").to_string(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            config_hash: config.hash()?,
            seed: resolved.sim.seed,
            config: resolved.to_toml()?,
            outputs,
            wall_clock_s,
        })
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("manifest serializes") + "\n"
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Config {
            line: e.line(),
            msg: e.to_string(),
        })
    }

    pub fn config(&self) -> Result<ConfigFile> {
        parse_config(&self.config)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_file_gives_reference_setup() {
        let cfg = parse_config("").unwrap();
        assert_eq!(cfg, ConfigFile::default());
        let sim = cfg.to_simulation().unwrap();
        assert_eq!(sim.geometry, VesselGeometry::carotid(0.0));
        assert_eq!(sim.particles, 1000);
        assert_eq!(sim.dt, 1e-4);
        assert_eq!(sim.fluid.density, 1050.0);
        assert_eq!(sim.flow, FlowMode::Constant { u_avg: 0.342 });
    }

    #[test]
    fn relative_plaque() {
        let cfg = parse_config("[channel]\nr_p_rel = 0.25\n").unwrap();
        let g = cfg.geometry().unwrap();
        assert!((g.r_p - 0.75e-3).abs() < 1e-18);
        let cfg = parse_config("[channel]\nr_p_rel = 0.75\n").unwrap();
        assert_eq!(cfg.time_step(), 1e-5);
        let both = parse_config("[channel]\nr_p_rel = 0.25\nr_p = 1e-3\n").unwrap();
        assert!(both.geometry().is_err());
    }

    #[test]
    fn errors() {
        let cfg = parse_config("[sim]\ndt = -1e-4\n").unwrap();
        assert!(matches!(cfg.to_simulation(), Err(Error::Validation(_))));
        match parse_config("[channel]\nr_c = 3e-3\n\n[sim]\nbogus = 1\n") {
            Err(Error::Config { line, .. }) => assert_eq!(line, 5),
            other => panic!("{other:?}"),
        }
        match parse_config("[sim]\nt_end = = 2\n") {
            Err(Error::Config { line, .. }) => assert_eq!(line, 2),
            other => panic!("{other:?}"),
        }
        assert!(parse_config("[nope]\n").is_err());
        assert!(parse_config("[fluid]\nmodel = \"casson\"\n").is_err());
    }

    #[test]
    fn release_spec() {
        assert_eq!(parse_release("ps", 0.9).unwrap(), 0.16);
        assert_eq!(parse_release("ED", 0.9).unwrap(), 0.4);
        assert_eq!(parse_release("ld", 0.9).unwrap(), 0.0);
        assert_eq!(parse_release("t=0.25", 0.9).unwrap(), 0.25);
        assert!(parse_release("noon", 0.9).is_err());
    }

    #[test]
    fn pulsatile_resolves_normalized_waveform() {
        let cfg = parse_config("[flow]\nmode = \"pulsatile\"\nrelease = \"ed\"\n").unwrap();
        let sim = cfg.to_simulation().unwrap();
        match &sim.flow {
            FlowMode::Pulsatile {
                waveform,
                release_time,
            } => {
                assert_eq!(*release_time, 0.4);
                assert!((waveform.cycle_mean_velocity(3e-3) - 0.342).abs() < 1e-9);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn hash_ignores_key_order() {
        let a = parse_config("[sim]\nseed = 3\nt_end = 0.5\n[channel]\nr_p_rel = 0.5\n").unwrap();
        let b = parse_config("[channel]\nr_p_rel = 0.5\n[sim]\nt_end = 0.5\nseed = 3\n").unwrap();
        assert_eq!(a.hash().unwrap(), b.hash().unwrap());
        let c = parse_config("[sim]\nseed = 4\n").unwrap();
        assert_ne!(a.hash().unwrap(), c.hash().unwrap());
        // explicit defaults hash like implicit ones
        let d = parse_config("[channel]\nr_p_rel = 0.0\n[sim]\ndt = 1e-4\n").unwrap();
        assert_eq!(d.hash().unwrap(), ConfigFile::default().hash().unwrap());
    }

    #[test]
    fn manifest_round_trip() {
        let cfg = parse_config("[sim]\nseed = 9\n").unwrap();
        let m = RunManifest::new(&cfg, vec!["out/cir.csv".into()], 0.5).unwrap();
        let back = RunManifest::from_json(&m.to_json()).unwrap();
        assert_eq!(back, m);
        assert_eq!(back.config().unwrap().hash().unwrap(), cfg.hash().unwrap());
        assert_eq!(back.seed, 9);
    }
}
