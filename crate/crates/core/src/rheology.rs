//! Constitutive laws and fully developed pipe-flow profiles.
//!
//! Three fluids are supported. For each, the axial velocity in a straight
//! pipe of radius `r` is written in terms of the centerline speed `u0`:
//!
//! * Newtonian: `u0 (1 - (rho/r)^2)`
//! * power law: `u0 (1 - (rho/r)^(m+1))` with `m = 1/n`
//! * Herschel-Bulkley: a rigid plug of radius `zeta r` moving at `u0`,
//!   surrounded by a sheared annulus `u0 (1 - ((rho - rho_p)/(r - rho_p))^(m+1))`.

use serde::{Deserialize, Serialize};

use crate::defaults;
use crate::error::{Error, Result};
use crate::quadrature::adaptive_simpson;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FluidKind {
    Newtonian,
    PowerLaw,
    HerschelBulkley,
}

impl FluidKind {
    pub fn name(self) -> &'static str {
        match self {
            FluidKind::Newtonian => "newtonian",
            FluidKind::PowerLaw => "power_law",
            FluidKind::HerschelBulkley => "herschel_bulkley",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FluidModel {
    pub kind: FluidKind,
    /// Consistency index K [Pa s^n]. Equals the dynamic viscosity for a Newtonian fluid.
    pub consistency: f64,
    /// Flow behaviour index n.
    pub index: f64,
    /// Yield stress [Pa].
    pub yield_stress: f64,
    /// Plug radius as a fraction of the lumen radius.
    pub yield_surface: f64,
    /// Density [kg/m^3].
    pub density: f64,
}

/// Result of [`FluidModel::plug_radius`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Plug {
    pub radius: f64,
    /// False for fluids without a yield stress.
    pub present: bool,
}

impl FluidModel {
    pub fn newtonian(viscosity: f64) -> Self {
        Self {
            kind: FluidKind::Newtonian,
            consistency: viscosity,
            index: 1.0,
            yield_stress: 0.0,
            yield_surface: 0.0,
            density: defaults::BLOOD_DENSITY,
        }
    }

    pub fn power_law(consistency: f64, index: f64) -> Self {
        Self {
            kind: FluidKind::PowerLaw,
            consistency,
            index,
            ..Self::newtonian(consistency)
        }
    }

    pub fn herschel_bulkley(consistency: f64, index: f64, yield_stress: f64, yield_surface: f64) -> Self {
        Self {
            kind: FluidKind::HerschelBulkley,
            consistency,
            index,
            yield_stress,
            yield_surface,
            density: defaults::BLOOD_DENSITY,
        }
    }

    /// Blood at its average viscosity.
    pub fn blood_newtonian() -> Self {
        Self::newtonian(defaults::BLOOD_VISCOSITY)
    }

    pub fn blood_power_law() -> Self {
        Self::power_law(defaults::CONSISTENCY_INDEX, defaults::POWER_LAW_INDEX)
    }

    pub fn blood_herschel_bulkley() -> Self {
        Self::herschel_bulkley(
            defaults::CONSISTENCY_INDEX,
            defaults::POWER_LAW_INDEX,
            defaults::YIELD_STRESS,
            defaults::YIELD_SURFACE,
        )
    }

    pub fn with_density(self, density: f64) -> Self {
        Self { density, ..self }
    }

    /// Inverse flow index `m = 1/n`.
    pub fn m(&self) -> f64 {
        1.0 / self.index
    }

    /// Plug fraction actually used by the profile; zero unless Herschel-Bulkley.
    pub fn zeta(&self) -> f64 {
        match self.kind {
            FluidKind::HerschelBulkley => self.yield_surface,
            _ => 0.0,
        }
    }

    pub fn validate(&self) -> std::result::Result<(), Vec<String>> {
        let mut errors = Vec::new();
        if !(self.consistency > 0.0 && self.consistency.is_finite()) {
            errors.push(format!("consistency index must be positive, got {}", self.consistency));
        }
        if !(self.index > 0.0 && self.index <= 1.5) {
            errors.push(format!("flow index must lie in (0, 1.5], got {}", self.index));
        }
        if !(self.yield_stress >= 0.0 && self.yield_stress.is_finite()) {
            errors.push(format!("yield stress must be non-negative, got {}", self.yield_stress));
        }
        if !(0.0..1.0).contains(&self.yield_surface) {
            errors.push(format!("yield surface must lie in [0, 1), got {}", self.yield_surface));
        }
        if !(self.density > 0.0 && self.density.is_finite()) {
            errors.push(format!("density must be positive, got {}", self.density));
        }
        match self.kind {
            FluidKind::Newtonian => {
                if self.index != 1.0 || self.yield_stress != 0.0 || self.yield_surface != 0.0 {
                    errors.push("newtonian fluid requires n = 1 and no yield stress".to_string());
                }
            }
            FluidKind::PowerLaw => {
                if self.yield_stress != 0.0 || self.yield_surface != 0.0 {
                    errors.push("power-law fluid has no yield stress".to_string());
                }
            }
            FluidKind::HerschelBulkley => {}
        }
        if errors.is_empty() {
            Ok(())
        } else {
            Err(errors)
        }
    }

    pub fn validated(self) -> Result<Self> {
        self.validate().map_err(Error::Validation)?;
        Ok(self)
    }

    /// Shear stress [Pa] at shear rate `gamma_dot` [1/s].
    pub fn shear_stress(&self, gamma_dot: f64) -> Result<f64> {
        if gamma_dot < 0.0 || gamma_dot.is_nan() {
            return Err(Error::domain(format!("negative shear rate {gamma_dot}")));
        }
        Ok(match self.kind {
            FluidKind::Newtonian => self.consistency * gamma_dot,
            FluidKind::PowerLaw => self.consistency * gamma_dot.powf(self.index),
            // at zero shear the stress sits at the yield limit
            FluidKind::HerschelBulkley => self.consistency * gamma_dot.powf(self.index) + self.yield_stress,
        })
    }

    /// `u0 / u_avg` for the fully developed profile.
    pub fn centerline_ratio(&self) -> f64 {
        let m = self.m();
        match self.kind {
            FluidKind::Newtonian => 2.0,
            FluidKind::PowerLaw => (m + 3.0) / (m + 1.0),
            FluidKind::HerschelBulkley => {
                let z = self.yield_surface;
                (m + 2.0) * (m + 3.0) / (2.0 * z * z + 2.0 * (m + 1.0) * z + (m + 2.0) * (m + 1.0))
            }
        }
    }

    /// `u(xi) / u0` for the normalized radius `xi = rho / r` in `[0, 1]`.
    #[inline]
    pub fn profile_shape(&self, xi: f64) -> f64 {
        match self.kind {
            FluidKind::Newtonian => 1.0 - xi * xi,
            FluidKind::PowerLaw => 1.0 - xi.powf(self.m() + 1.0),
            FluidKind::HerschelBulkley => {
                let z = self.yield_surface;
                if xi < z {
                    1.0
                } else {
                    1.0 - ((xi - z) / (1.0 - z)).powf(self.m() + 1.0)
                }
            }
        }
    }

    /// Axial speed at radial position `rho` in a lumen of radius `r_lumen`.
    pub fn axial_velocity(&self, u0: f64, r_lumen: f64, rho: f64) -> Result<f64> {
        if r_lumen <= 0.0 {
            return Err(Error::domain(format!("lumen radius must be positive, got {r_lumen}")));
        }
        if rho < 0.0 || rho > r_lumen {
            return Err(Error::domain(format!(
                "radial position {rho} m outside lumen of radius {r_lumen} m"
            )));
        }
        Ok(u0 * self.profile_shape(rho / r_lumen))
    }

    pub fn plug_radius(&self, r_lumen: f64) -> Plug {
        match self.kind {
            FluidKind::HerschelBulkley => Plug {
                radius: self.yield_surface * r_lumen,
                present: true,
            },
            _ => Plug {
                radius: 0.0,
                present: false,
            },
        }
    }

    /// Area-weighted mean of the profile over the disc, by adaptive quadrature.
    ///
    /// Should agree with `u0 / centerline_ratio()`.
    pub fn mean_velocity_check(&self, u0: f64, r_lumen: f64) -> f64 {
        // mean = (2 / r^2) * integral_0^r rho u(rho) drho
        let integrand = |rho: f64| rho * u0 * self.profile_shape((rho / r_lumen).min(1.0));
        let tol = 1e-13 * u0.abs() * r_lumen * r_lumen;
        let plug = self.plug_radius(r_lumen).radius;
        let integral = if plug > 0.0 {
            adaptive_simpson(integrand, 0.0, plug, tol, 3)
                + adaptive_simpson(integrand, plug, r_lumen, tol, 3)
        } else {
            adaptive_simpson(integrand, 0.0, r_lumen, tol, 3)
        };
        2.0 * integral / (r_lumen * r_lumen)
    }
}

/// Yield-surface position for pipe flow, where the shear stress grows
/// linearly from zero on the axis to `tau_w` at the wall.
pub fn zeta_from_wall_stress(tau_y: f64, tau_w: f64) -> Result<f64> {
    if tau_y < 0.0 {
        return Err(Error::domain(format!("negative yield stress {tau_y}")));
    }
    if tau_w <= tau_y {
        return Err(Error::Unyielded { tau_y, tau_w });
    }
    Ok(tau_y / tau_w)
}

/// Mean and centerline speed of a fully developed flow.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FlowConditions {
    pub u_avg: f64,
    pub u0: f64,
}

impl FlowConditions {
    pub fn new(model: &FluidModel, u_avg: f64) -> Result<Self> {
        if !(u_avg > 0.0 && u_avg.is_finite()) {
            return Err(Error::domain(format!("mean speed must be positive, got {u_avg}")));
        }
        Ok(Self {
            u_avg,
            u0: model.centerline_ratio() * u_avg,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rel(a: f64, b: f64) -> f64 {
        ((a - b) / b).abs()
    }

    #[test]
    fn shear_stress_laws() {
        let newt = FluidModel::newtonian(4e-3);
        assert!((newt.shear_stress(100.0).unwrap() - 0.4).abs() < 1e-15);
        let pl = FluidModel::power_law(17e-3, 0.708);
        assert!((pl.shear_stress(1.0).unwrap() - 17e-3).abs() < 1e-15);
        let hb = FluidModel::herschel_bulkley(17e-3, 0.708, 5e-3, 0.1);
        assert!((hb.shear_stress(1.0).unwrap() - 22e-3).abs() < 1e-15);
        assert_eq!(hb.shear_stress(0.0).unwrap(), 5e-3);
        assert!(matches!(pl.shear_stress(-1.0), Err(Error::Domain(_))));
    }

    #[test]
    fn centerline_ratios() {
        assert_eq!(FluidModel::blood_newtonian().centerline_ratio(), 2.0);
        let pl = FluidModel::blood_power_law();
        let m = 1.0 / 0.708;
        assert!((pl.centerline_ratio() - (m + 3.0) / (m + 1.0)).abs() < 1e-15);
        assert!((pl.centerline_ratio() - 1.8286).abs() < 5e-4);
        let hb0 = FluidModel::herschel_bulkley(17e-3, 0.708, 5e-3, 0.0);
        assert!(rel(hb0.centerline_ratio(), pl.centerline_ratio()) < 1e-15);
    }

    #[test]
    fn profile_values() {
        let newt = FluidModel::blood_newtonian();
        let r = 3e-3;
        assert!((newt.axial_velocity(0.684, r, r / 2.0).unwrap() - 0.513).abs() < 1e-12);
        for model in [
            newt,
            FluidModel::blood_power_law(),
            FluidModel::blood_herschel_bulkley(),
        ] {
            assert_eq!(model.axial_velocity(0.7, r, r).unwrap(), 0.0);
        }
        let hb = FluidModel::herschel_bulkley(17e-3, 0.708, 5e-3, 0.2);
        assert_eq!(hb.axial_velocity(0.6, r, 0.1 * r).unwrap(), 0.6);
        assert!(matches!(hb.axial_velocity(0.6, r, 1.01 * r), Err(Error::Domain(_))));
        assert!(matches!(hb.axial_velocity(0.6, 0.0, 0.0), Err(Error::Domain(_))));
    }

    #[test]
    fn plug() {
        let hb = FluidModel::herschel_bulkley(17e-3, 0.708, 5e-3, 0.2);
        let p = hb.plug_radius(3e-3);
        assert!(p.present);
        assert!((p.radius - 0.6e-3).abs() < 1e-18);
        let p0 = FluidModel::herschel_bulkley(17e-3, 0.708, 5e-3, 0.0).plug_radius(3e-3);
        assert_eq!(p0.radius, 0.0);
        let pn = FluidModel::blood_newtonian().plug_radius(3e-3);
        assert_eq!((pn.radius, pn.present), (0.0, false));
    }

    #[test]
    fn zeta_from_stress() {
        assert_eq!(zeta_from_wall_stress(0.0, 1.0).unwrap(), 0.0);
        assert!((zeta_from_wall_stress(5e-3, 50e-3).unwrap() - 0.1).abs() < 1e-15);
        assert!(matches!(
            zeta_from_wall_stress(5e-3, 4e-3),
            Err(Error::Unyielded { .. })
        ));
    }

    #[test]
    fn mean_velocity_examples() {
        let newt = FluidModel::blood_newtonian();
        assert!(rel(newt.mean_velocity_check(0.684, 3e-3), 0.342) < 1e-9);

        let pl = FluidModel::blood_power_law();
        let u0 = pl.centerline_ratio() * 0.342;
        assert!((u0 - 0.6254).abs() < 2e-4);
        assert!(rel(pl.mean_velocity_check(u0, 3e-3), 0.342) < 1e-6);

        let hb = FluidModel::herschel_bulkley(17e-3, 0.708, 5e-3, 0.2);
        let u0 = 0.6;
        assert!(rel(hb.mean_velocity_check(u0, 3e-3), u0 / hb.centerline_ratio()) < 1e-6);
    }

    #[test]
    fn validation() {
        assert!(FluidModel::blood_herschel_bulkley().validate().is_ok());
        let bad = FluidModel {
            index: 0.7,
            ..FluidModel::blood_newtonian()
        };
        assert!(bad.validate().is_err());
        let bad = FluidModel::herschel_bulkley(-1.0, 2.0, -1.0, 1.0);
        assert_eq!(bad.validate().unwrap_err().len(), 4);
    }

    #[test]
    fn flow_conditions() {
        let fc = FlowConditions::new(&FluidModel::blood_newtonian(), 0.342).unwrap();
        assert!((fc.u0 - 0.684).abs() < 1e-15);
        assert!(FlowConditions::new(&FluidModel::blood_newtonian(), 0.0).is_err());
    }
}
