//! Quasi-steady streamtube velocity field.
//!
//! At axial position `x` the lumen has radius `r = r(x)`. The local profile
//! keeps the fully developed shape of the fluid model, with its centerline
//! speed scaled by `(r_c / r)^2` so the volume flow is the same in every
//! cross-section. A radial component `xi * u_x * dr/dx` (with `xi = rho / r`)
//! keeps particles on the streamtube `xi = const` through the ramps.

use super::ensemble::Particle;
use super::{FlowMode, SimulationConfig};
use crate::error::{Error, Result};
use crate::geometry::VesselGeometry;
use crate::rheology::FluidModel;

/// Maximum number of successive wall reflections before clamping.
const MAX_REFLECTIONS: usize = 8;

#[derive(Debug, Clone)]
pub struct FlowField<'a> {
    geometry: &'a VesselGeometry,
    fluid: &'a FluidModel,
    flow: &'a FlowMode,
    ratio: f64,
    release_time: f64,
}

impl<'a> FlowField<'a> {
    pub fn new(cfg: &'a SimulationConfig) -> Self {
        Self {
            geometry: &cfg.geometry,
            fluid: &cfg.fluid,
            flow: &cfg.flow,
            ratio: cfg.fluid.centerline_ratio(),
            release_time: cfg.flow.release_time(),
        }
    }

    /// Centerline speed of the unobstructed vessel at time `t` after release.
    #[inline]
    pub fn centerline_speed(&self, t: f64) -> f64 {
        self.ratio * self.flow.mean_speed_at(self.release_time + t, self.geometry.r_c)
    }

    /// Velocity at a point assumed to lie inside the lumen.
    #[inline]
    pub fn velocity_unchecked(&self, pos: [f64; 3], t: f64) -> [f64; 3] {
        let [x, y, z] = pos;
        let g = self.geometry;
        let r = g.radius_unchecked(x);
        let rho = y.hypot(z);
        let xi = (rho / r).min(1.0);
        let scale = g.r_c / r;
        let u0 = self.centerline_speed(t) * scale * scale;
        let ux = u0 * self.fluid.profile_shape(xi);
        let slope = g.radius_slope(x);
        if slope == 0.0 || rho == 0.0 {
            return [ux, 0.0, 0.0];
        }
        let radial = xi * ux * slope;
        [ux, radial * y / rho, radial * z / rho]
    }

    pub fn velocity(&self, pos: [f64; 3], t: f64) -> Result<[f64; 3]> {
        let [x, y, z] = pos;
        let r = self.geometry.lumen_radius(x)?;
        let rho = y.hypot(z);
        if rho > r * (1.0 + 1e-12) {
            return Err(Error::domain(format!(
                "point at rho = {rho} m lies outside the lumen (r = {r} m) at x = {x} m"
            )));
        }
        Ok(self.velocity_unchecked(pos, t))
    }

    /// One Euler-Maruyama step of length `dt` starting at time `t`.
    ///
    /// `sigma` is the per-axis Brownian displacement `sqrt(2 D dt)`.
    #[inline]
    pub(crate) fn advance(&self, p: &mut Particle, t: f64, dt: f64, sigma: f64) {
        let g = self.geometry;
        let old = p.pos;
        let v = self.velocity_unchecked(old, t);
        let mut pos = [old[0] + v[0] * dt, old[1] + v[1] * dt, old[2] + v[2] * dt];
        if sigma > 0.0 {
            for c in pos.iter_mut() {
                *c += sigma * p.rng.normal();
            }
        }
        if pos[0] < 0.0 {
            pos[0] = -pos[0];
        }
        if pos[0] >= g.l_c {
            let travelled = pos[0] - old[0];
            let frac = if travelled > 0.0 {
                ((g.l_c - old[0]) / travelled).clamp(0.0, 1.0)
            } else {
                1.0
            };
            p.arrival = Some(t + frac * dt);
            p.pos = pos;
            return;
        }
        let r = g.radius_unchecked(pos[0]);
        reflect_into_lumen(&mut pos, r);
        debug_assert!(
            pos[1].hypot(pos[2]) <= g.radius_unchecked(pos[0]) * (1.0 + 1e-9),
            "particle escaped the lumen"
        );
        p.pos = pos;
    }
}

/// Specular reflection of the radial coordinate at the wall `rho = r`.
fn reflect_into_lumen(pos: &mut [f64; 3], r: f64) {
    let mut rho = pos[1].hypot(pos[2]);
    let mut n = 0;
    while rho > r && n < MAX_REFLECTIONS {
        let reflected = 2.0 * r - rho;
        let s = reflected / rho;
        pos[1] *= s;
        pos[2] *= s;
        rho = reflected.abs();
        n += 1;
    }
    if rho > r {
        let s = r / rho;
        pos[1] *= s;
        pos[2] *= s;
    }
}

/// Velocity at `(x, y, z)` at time `t` after release.
pub fn local_velocity(cfg: &SimulationConfig, x: f64, y: f64, z: f64, t: f64) -> Result<[f64; 3]> {
    FlowField::new(cfg).velocity([x, y, z], t)
}
