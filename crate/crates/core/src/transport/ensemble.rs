use std::f64::consts::PI;

use rayon::prelude::*;

use super::field::FlowField;
use super::rng::ParticleRng;
use super::SimulationConfig;

#[derive(Debug, Clone)]
pub(crate) struct Particle {
    pub pos: [f64; 3],
    /// Time after release of the first receiver crossing.
    pub arrival: Option<f64>,
    pub rng: ParticleRng,
}

/// Particle positions, receiver bookkeeping and per-particle random streams.
#[derive(Debug, Clone)]
pub struct ParticleEnsemble {
    particles: Vec<Particle>,
}

/// Releases `cfg.particles` particles uniformly over the transmitter disc at `x = 0`.
pub fn release_ensemble(cfg: &SimulationConfig) -> ParticleEnsemble {
    let radius = cfg.geometry.radius_unchecked(0.0);
    let particles = (0..cfg.particles)
        .map(|i| {
            let mut rng = ParticleRng::new(cfg.seed, i as u64);
            let rho = radius * rng.uniform().sqrt();
            let phi = 2.0 * PI * rng.uniform();
            Particle {
                pos: [0.0, rho * phi.cos(), rho * phi.sin()],
                arrival: None,
                rng,
            }
        })
        .collect();
    ParticleEnsemble { particles }
}

impl ParticleEnsemble {
    /// Ensemble at explicit positions; particle `i` gets random stream `i` of `seed`.
    pub fn from_positions(positions: &[[f64; 3]], seed: u64) -> Self {
        let particles = positions
            .iter()
            .enumerate()
            .map(|(i, &pos)| Particle {
                pos,
                arrival: None,
                rng: ParticleRng::new(seed, i as u64),
            })
            .collect();
        Self { particles }
    }

    pub fn len(&self) -> usize {
        self.particles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.particles.is_empty()
    }

    pub fn positions(&self) -> impl Iterator<Item = [f64; 3]> + '_ {
        self.particles.iter().map(|p| p.pos)
    }

    pub fn is_alive(&self, i: usize) -> bool {
        self.particles[i].arrival.is_none()
    }

    pub fn alive_count(&self) -> usize {
        self.particles.iter().filter(|p| p.arrival.is_none()).count()
    }

    pub fn arrived_count(&self) -> usize {
        self.particles.len() - self.alive_count()
    }

    pub fn arrival_times(&self) -> Vec<Option<f64>> {
        self.particles.iter().map(|p| p.arrival).collect()
    }

    pub(crate) fn particles_mut(&mut self) -> &mut [Particle] {
        &mut self.particles
    }

    /// Advances every alive particle by one step from time `t` after release.
    pub fn step(&mut self, cfg: &SimulationConfig, t: f64, dt: f64) {
        let field = FlowField::new(cfg);
        let sigma = (2.0 * cfg.diffusion_coefficient() * dt).sqrt();
        self.particles.par_iter_mut().for_each(|p| {
            if p.arrival.is_none() {
                field.advance(p, t, dt, sigma);
            }
        });
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::DiffusionSpec;
    use crate::geometry::VesselGeometry;

    #[test]
    fn release_counts_and_plane() {
        let cfg = SimulationConfig::default();
        let e = release_ensemble(&cfg);
        assert_eq!(e.len(), 1000);
        assert_eq!(e.alive_count(), 1000);
        assert_eq!(e.arrived_count(), 0);
        assert!(e.positions().all(|p| p[0] == 0.0));
        assert!(e.positions().all(|p| p[1].hypot(p[2]) <= cfg.geometry.r_c));
    }

    #[test]
    fn release_is_uniform_on_disc() {
        let cfg = SimulationConfig {
            particles: 1_000_000,
            ..SimulationConfig::default()
        };
        let e = release_ensemble(&cfg);
        let n = e.len() as f64;
        let m2 = e.positions().map(|p| p[1] * p[1] + p[2] * p[2]).sum::<f64>() / n;
        let r2 = cfg.geometry.r_c.powi(2);
        assert!((m2 / (r2 / 2.0) - 1.0).abs() < 0.005, "{}", m2 / r2);
        let my = e.positions().map(|p| p[1]).sum::<f64>() / n;
        assert!(my.abs() < 1e-5);
    }

    #[test]
    fn stepping_conserves_and_contains() {
        let cfg = SimulationConfig {
            geometry: VesselGeometry::carotid(0.5),
            particles: 2000,
            diffusion: DiffusionSpec::default().with_coefficient(1e-9),
            ..SimulationConfig::default()
        };
        let mut e = release_ensemble(&cfg);
        let dt = cfg.dt;
        for k in 0..2000 {
            e.step(&cfg, k as f64 * dt, dt);
            assert_eq!(e.alive_count() + e.arrived_count(), cfg.particles);
            for (i, p) in e.positions().enumerate() {
                if e.is_alive(i) {
                    let r = cfg.geometry.radius_unchecked(p[0]);
                    assert!(p[1].hypot(p[2]) <= r * (1.0 + 1e-12));
                    assert!((0.0..cfg.geometry.l_c).contains(&p[0]));
                }
            }
        }
        assert!(e.arrived_count() > 0);
    }
}
