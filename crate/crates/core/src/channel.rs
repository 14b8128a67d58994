//! Closed-form channel impulse responses, the Venturi traversal-time model and
//! diffusion-regime diagnostics.
//!
//! All impulse responses here are cumulative: `h(t)` is the fraction of an
//! instantaneous, uniform-over-the-disc release that has crossed the receiver
//! plane by time `t`, assuming flow-dominated transport.

use serde::{Deserialize, Serialize};

use crate::defaults;
use crate::error::{Error, Result};
use crate::geometry::VesselGeometry;
use crate::rheology::{FluidKind, FluidModel};

/// `1 - l_c / (u0 t)` after the first arrival, zero before.
pub fn cir_newtonian(t: f64, u0: f64, l_c: f64) -> f64 {
    let t_min = l_c / u0;
    if t < t_min {
        0.0
    } else {
        1.0 - l_c / (u0 * t)
    }
}

pub fn cir_power_law(t: f64, u0: f64, l_c: f64, m: f64) -> f64 {
    let t_min = l_c / u0;
    if t < t_min {
        0.0
    } else {
        (1.0 - l_c / (u0 * t)).powf(2.0 / (m + 1.0))
    }
}

/// The plug fraction `zeta^2` arrives as a front at `l_c / u0`.
pub fn cir_herschel_bulkley(t: f64, u0: f64, l_c: f64, m: f64, zeta: f64) -> f64 {
    let t_min = l_c / u0;
    if t < t_min {
        0.0
    } else {
        let sheared = (1.0 - l_c / (u0 * t)).powf(1.0 / (m + 1.0));
        let edge = zeta + (1.0 - zeta) * sheared;
        edge * edge
    }
}

/// Impulse response of a straight channel for one fluid model.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AnalyticalCir {
    pub model: FluidModel,
    pub u0: f64,
    pub l_c: f64,
}

impl AnalyticalCir {
    pub fn new(model: FluidModel, u0: f64, l_c: f64) -> Result<Self> {
        if !(u0 > 0.0 && l_c > 0.0) {
            return Err(Error::domain(format!(
                "impulse response needs positive u0 and l_c, got {u0} and {l_c}"
            )));
        }
        Ok(Self { model, u0, l_c })
    }

    /// Impulse response for a given mean speed, using the model's centerline ratio.
    pub fn from_mean_speed(model: FluidModel, u_avg: f64, l_c: f64) -> Result<Self> {
        Self::new(model, model.centerline_ratio() * u_avg, l_c)
    }

    pub fn first_arrival(&self) -> f64 {
        self.l_c / self.u0
    }

    pub fn eval(&self, t: f64) -> f64 {
        match self.model.kind {
            FluidKind::Newtonian => cir_newtonian(t, self.u0, self.l_c),
            FluidKind::PowerLaw => cir_power_law(t, self.u0, self.l_c, self.model.m()),
            FluidKind::HerschelBulkley => {
                cir_herschel_bulkley(t, self.u0, self.l_c, self.model.m(), self.model.yield_surface)
            }
        }
    }
}

/// Minimum traversal time of a particle riding the centerline, whose speed
/// scales as `u0 (r_c / r(x))^2` by volume conservation.
///
/// The integral of `(r(x)/r_c)^2` is evaluated exactly over each linear
/// segment of the lumen.
pub fn venturi_traversal_time(geom: &VesselGeometry, u0: f64) -> f64 {
    let vertices = geom.vertices();
    let integral: f64 = vertices
        .windows(2)
        .map(|w| {
            let (x0, r0) = w[0];
            let (x1, r1) = w[1];
            let a = r0 / geom.r_c;
            let b = r1 / geom.r_c;
            (x1 - x0) * (a * a + a * b + b * b) / 3.0
        })
        .sum();
    integral / u0
}

/// Traversal time without a plaque.
pub fn ideal_traversal_time(geom: &VesselGeometry, u0: f64) -> f64 {
    geom.l_c / u0
}

/// Relative increase of the average traversal speed, `T_ideal / T - 1`.
pub fn venturi_speed_increase(geom: &VesselGeometry) -> f64 {
    ideal_traversal_time(geom, 1.0) / venturi_traversal_time(geom, 1.0) - 1.0
}

/// Relative reduction of the traversal time, `1 - T / T_ideal`.
pub fn venturi_time_reduction(geom: &VesselGeometry) -> f64 {
    1.0 - venturi_traversal_time(geom, 1.0) / ideal_traversal_time(geom, 1.0)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VenturiPoint {
    pub l_c: f64,
    pub plaque_rel: f64,
    pub reduction: f64,
    pub speed_increase: f64,
}

/// Sweeps `r_p / r_c` over `i / samples` for `i` in `0..samples` for each channel
/// length, keeping the plaque dimensions of `template` and centering it.
pub fn venturi_reduction_curve(
    template: &VesselGeometry,
    lengths: &[f64],
    samples: usize,
) -> Result<Vec<VenturiPoint>> {
    let mut rows = Vec::with_capacity(lengths.len() * samples);
    for &l_c in lengths {
        let base = template.with_length(l_c);
        if base.l_p_outer > l_c {
            return Err(Error::domain(format!(
                "plaque footprint {} m does not fit channel of length {l_c} m",
                base.l_p_outer
            )));
        }
        for i in 0..samples {
            let plaque_rel = i as f64 / samples as f64;
            let geom = base.with_plaque(plaque_rel * base.r_c);
            rows.push(VenturiPoint {
                l_c,
                plaque_rel,
                reduction: venturi_time_reduction(&geom),
                speed_increase: venturi_speed_increase(&geom),
            });
        }
    }
    Ok(rows)
}

/// Inputs of the Stokes-Einstein estimate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DiffusionSpec {
    pub boltzmann: f64,
    /// [K]
    pub temperature: f64,
    /// Dynamic viscosity of the carrier fluid [Pa s].
    pub viscosity: f64,
    /// Hydrodynamic particle radius [m].
    pub particle_radius: f64,
    /// Overrides the estimate when set [m^2/s].
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub coefficient: Option<f64>,
}

impl Default for DiffusionSpec {
    fn default() -> Self {
        Self {
            boltzmann: defaults::BOLTZMANN,
            temperature: defaults::TEMPERATURE,
            viscosity: defaults::BLOOD_VISCOSITY,
            particle_radius: defaults::PARTICLE_RADIUS,
            coefficient: None,
        }
    }
}

impl DiffusionSpec {
    pub fn with_coefficient(self, d: f64) -> Self {
        Self {
            coefficient: Some(d),
            ..self
        }
    }

    pub fn diffusion_coefficient(&self) -> f64 {
        self.coefficient.unwrap_or_else(|| stokes_einstein_diffusion(self))
    }

    pub fn validate(&self) -> std::result::Result<(), Vec<String>> {
        let mut errors = Vec::new();
        for (name, v) in [
            ("boltzmann constant", self.boltzmann),
            ("temperature", self.temperature),
            ("viscosity", self.viscosity),
            ("particle radius", self.particle_radius),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                errors.push(format!("{name} must be positive, got {v}"));
            }
        }
        if let Some(d) = self.coefficient {
            if !(d >= 0.0 && d.is_finite()) {
                errors.push(format!("diffusion coefficient must be non-negative, got {d}"));
            }
        }
        if errors.is_empty() {
            Ok(())
        } else {
            Err(errors)
        }
    }
}

/// `k_B T / (6 pi eta r)`.
pub fn stokes_einstein_diffusion(spec: &DiffusionSpec) -> f64 {
    spec.boltzmann * spec.temperature
        / (6.0 * std::f64::consts::PI * spec.viscosity * spec.particle_radius)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Regime {
    FlowDominated,
    Dispersive,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Dispersion {
    pub alpha: f64,
    pub regime: Regime,
}

/// `alpha = D l_c / (u_avg r_c^2)`; flow dominated below
/// [`defaults::FLOW_DOMINATED_THRESHOLD`].
pub fn dispersion_factor(d: f64, l_c: f64, u_avg: f64, r_c: f64) -> Dispersion {
    let alpha = d * l_c / (u_avg * r_c * r_c);
    let regime = if alpha < defaults::FLOW_DOMINATED_THRESHOLD {
        Regime::FlowDominated
    } else {
        Regime::Dispersive
    };
    Dispersion { alpha, regime }
}
