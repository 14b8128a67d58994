//! Monte-Carlo Lagrangian particle transport through the plaque channel.
//!
//! Particles are released uniformly over the transmitter disc at `x = 0`,
//! advected by a quasi-steady streamtube velocity field, perturbed by
//! Brownian increments and reflected at the vessel wall and the inlet plane.
//! The receiver at `x = l_c` counts first crossings; a particle is frozen
//! once it has been counted.
//!
//! Times inside this module are measured from the release instant. In
//! pulsatile mode the inlet waveform is sampled at `release_time + t`.

mod cir;
mod ensemble;
mod field;
mod rng;

use rayon::prelude::*;

use crate::channel::DiffusionSpec;
use crate::defaults;
use crate::error::{Error, Result};
use crate::geometry::VesselGeometry;
use crate::pulsatile::PulsatileWaveform;
use crate::rheology::FluidModel;

pub use cir::{empirical_cir, ks_distance, EmpiricalCir};
pub use ensemble::{release_ensemble, ParticleEnsemble};
pub use field::{local_velocity, FlowField};
pub use rng::ParticleRng;

#[derive(Debug, Clone, PartialEq)]
pub enum FlowMode {
    /// Steady inlet with the given cross-section average speed [m/s].
    Constant { u_avg: f64 },
    /// Periodic inlet. Particles are released at `release_time` within the cycle.
    Pulsatile {
        waveform: PulsatileWaveform,
        release_time: f64,
    },
}

impl FlowMode {
    pub fn release_time(&self) -> f64 {
        match self {
            FlowMode::Constant { .. } => 0.0,
            FlowMode::Pulsatile { release_time, .. } => *release_time,
        }
    }

    /// Cross-section average speed in the unobstructed vessel at absolute time `t`.
    #[inline]
    pub fn mean_speed_at(&self, t: f64, r_c: f64) -> f64 {
        match self {
            FlowMode::Constant { u_avg } => *u_avg,
            FlowMode::Pulsatile { waveform, .. } => waveform.mean_velocity_at(t, r_c),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimulationConfig {
    pub geometry: VesselGeometry,
    pub fluid: FluidModel,
    pub diffusion: DiffusionSpec,
    pub flow: FlowMode,
    /// Number of released particles.
    pub particles: usize,
    /// Integration step [s].
    pub dt: f64,
    /// Simulated time after release [s].
    pub duration: f64,
    pub seed: u64,
}

impl Default for SimulationConfig {
    fn default() -> Self {
        Self {
            geometry: VesselGeometry::default(),
            fluid: FluidModel::blood_newtonian(),
            diffusion: DiffusionSpec::default(),
            flow: FlowMode::Constant {
                u_avg: defaults::MEAN_SPEED,
            },
            particles: defaults::PARTICLE_COUNT,
            dt: defaults::TIME_STEP,
            duration: defaults::DURATION,
            seed: defaults::SEED,
        }
    }
}

impl SimulationConfig {
    pub fn validate(&self) -> std::result::Result<(), Vec<String>> {
        let mut errors = Vec::new();
        for result in [
            self.geometry.validate(),
            self.fluid.validate(),
            self.diffusion.validate(),
        ] {
            if let Err(e) = result {
                errors.extend(e);
            }
        }
        if self.particles == 0 {
            errors.push("particle count must be at least 1".to_string());
        }
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            errors.push(format!("time step must be positive, got {}", self.dt));
        }
        if !(self.duration > 0.0 && self.duration.is_finite()) {
            errors.push(format!("duration must be positive, got {}", self.duration));
        }
        match &self.flow {
            FlowMode::Constant { u_avg } => {
                if !(*u_avg > 0.0 && u_avg.is_finite()) {
                    errors.push(format!("mean speed must be positive, got {u_avg}"));
                }
            }
            FlowMode::Pulsatile {
                waveform,
                release_time,
            } => {
                if !(0.0..waveform.period()).contains(release_time) {
                    errors.push(format!(
                        "release time {release_time} s outside [0, {}) s",
                        waveform.period()
                    ));
                }
            }
        }
        if errors.is_empty() {
            Ok(())
        } else {
            Err(errors)
        }
    }

    /// Number of integration steps covering `duration`.
    pub fn step_count(&self) -> usize {
        ((self.duration / self.dt) * (1.0 - 1e-12)).ceil() as usize
    }

    pub fn diffusion_coefficient(&self) -> f64 {
        self.diffusion.diffusion_coefficient()
    }
}

/// Everything a run produces.
#[derive(Debug, Clone)]
pub struct SimulationOutput {
    pub cir: EmpiricalCir,
    /// Per-particle arrival time after release, `None` if not received.
    pub arrival_times: Vec<Option<f64>>,
}

impl SimulationOutput {
    pub fn received(&self) -> impl Iterator<Item = f64> + '_ {
        self.arrival_times.iter().filter_map(|t| *t)
    }
}

/// Runs the simulation on the global worker pool.
pub fn run(cfg: &SimulationConfig) -> Result<EmpiricalCir> {
    Ok(run_with_threads(cfg, None)?.cir)
}

/// Runs the simulation on `threads` workers, or the global pool for `None`.
///
/// The output is bit-identical for any worker count.
pub fn run_with_threads(cfg: &SimulationConfig, threads: Option<usize>) -> Result<SimulationOutput> {
    cfg.validate().map_err(Error::Validation)?;
    let ensemble = release_ensemble(cfg);
    run_ensemble(cfg, ensemble, threads)
}

/// Integrates an already released ensemble for the configured duration.
pub fn run_ensemble(
    cfg: &SimulationConfig,
    mut ensemble: ParticleEnsemble,
    threads: Option<usize>,
) -> Result<SimulationOutput> {
    let field = FlowField::new(cfg);
    let steps = cfg.step_count();
    let dt = cfg.dt;
    let sigma = (2.0 * cfg.diffusion_coefficient() * dt).sqrt();

    let work = |ensemble: &mut ParticleEnsemble| {
        ensemble.particles_mut().par_iter_mut().for_each(|p| {
            for k in 0..steps {
                if p.arrival.is_some() {
                    break;
                }
                field.advance(p, k as f64 * dt, dt, sigma);
            }
        });
    };
    match threads {
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n.max(1))
                .build()
                .map_err(|e| Error::domain(format!("cannot start worker pool: {e}")))?;
            pool.install(|| work(&mut ensemble));
        }
        None => work(&mut ensemble),
    }

    let arrival_times = ensemble.arrival_times();
    let grid: Vec<f64> = (1..=steps).map(|k| k as f64 * dt).collect();
    let received: Vec<f64> = arrival_times.iter().filter_map(|t| *t).collect();
    let mut cir = empirical_cir(&received, cfg.particles, &grid)?;
    cir.seed = cfg.seed;
    Ok(SimulationOutput { cir, arrival_times })
}
