//! Vessel lumen with an axisymmetric plaque.
//!
//! The plaque footprint is split into four axial regions: unobstructed
//! vessel (1), a converging ramp (2), the plateau of minimum radius (3) and
//! a diverging ramp (4). Region 1 also covers everything downstream of the
//! plaque. The lumen radius is linear inside each region and continuous
//! across them whenever the ramps have non-zero length.

use serde::{Deserialize, Serialize};

use crate::defaults;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Region {
    Open = 1,
    Converging = 2,
    Plateau = 3,
    Diverging = 4,
}

impl Region {
    pub fn id(self) -> u8 {
        self as u8
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VesselGeometry {
    /// Channel radius [m].
    pub r_c: f64,
    /// Transmitter to receiver distance [m].
    pub l_c: f64,
    /// Radial plaque extension [m]; zero means no plaque.
    pub r_p: f64,
    /// Plaque footprint length at the wall [m].
    pub l_p_outer: f64,
    /// Plaque plateau length [m].
    pub l_p_inner: f64,
    /// Axial position of the plaque center [m].
    pub x_center: f64,
}

impl Default for VesselGeometry {
    fn default() -> Self {
        Self::carotid(0.0)
    }
}

impl VesselGeometry {
    /// Reference carotid segment with a plaque of relative size `plaque_rel = r_p / r_c`.
    pub fn carotid(plaque_rel: f64) -> Self {
        Self {
            r_c: defaults::CHANNEL_RADIUS,
            l_c: defaults::CHANNEL_LENGTH,
            r_p: plaque_rel * defaults::CHANNEL_RADIUS,
            l_p_outer: defaults::PLAQUE_OUTER_LENGTH,
            l_p_inner: defaults::PLAQUE_INNER_LENGTH,
            x_center: defaults::CHANNEL_LENGTH / 2.0,
        }
    }

    /// Same plaque, different channel length, plaque re-centered.
    pub fn with_length(self, l_c: f64) -> Self {
        Self {
            l_c,
            x_center: l_c / 2.0,
            ..self
        }
    }

    pub fn with_plaque(self, r_p: f64) -> Self {
        Self { r_p, ..self }
    }

    pub fn plaque_rel(&self) -> f64 {
        self.r_p / self.r_c
    }

    pub fn min_radius(&self) -> f64 {
        self.r_c - self.r_p
    }

    /// Axial breakpoints `[start of ramp, start of plateau, end of plateau, end of ramp]`.
    pub fn breakpoints(&self) -> [f64; 4] {
        let half_outer = self.l_p_outer / 2.0;
        let half_inner = self.l_p_inner / 2.0;
        [
            self.x_center - half_outer,
            self.x_center - half_inner,
            self.x_center + half_inner,
            self.x_center + half_outer,
        ]
    }

    fn ramp_length(&self) -> f64 {
        (self.l_p_outer - self.l_p_inner) / 2.0
    }

    fn check_axial(&self, x: f64) -> Result<()> {
        if !(0.0..=self.l_c).contains(&x) {
            return Err(Error::domain(format!(
                "axial position {x} m outside [0, {}] m",
                self.l_c
            )));
        }
        Ok(())
    }

    /// Region containing `x`. Boundary points belong to the downstream region.
    pub fn region_of(&self, x: f64) -> Result<Region> {
        self.check_axial(x)?;
        Ok(self.region_unchecked(x))
    }

    pub(crate) fn region_unchecked(&self, x: f64) -> Region {
        let [a, b, c, d] = self.breakpoints();
        if x < a || x >= d {
            Region::Open
        } else if x < b {
            Region::Converging
        } else if x < c {
            Region::Plateau
        } else {
            Region::Diverging
        }
    }

    pub fn lumen_radius(&self, x: f64) -> Result<f64> {
        self.check_axial(x)?;
        Ok(self.radius_unchecked(x))
    }

    /// Lumen radius without the range check. Positions outside `[0, l_c]`
    /// see the unobstructed radius.
    #[inline]
    pub fn radius_unchecked(&self, x: f64) -> f64 {
        if self.r_p == 0.0 {
            return self.r_c;
        }
        let [a, b, c, d] = self.breakpoints();
        match self.region_unchecked(x) {
            Region::Open => self.r_c,
            Region::Converging => self.r_c - self.r_p * (x - a) / (b - a),
            Region::Plateau => self.r_c - self.r_p,
            Region::Diverging => self.r_c - self.r_p * (d - x) / (d - c),
        }
    }

    /// Axial derivative of the lumen radius, zero outside the ramps.
    #[inline]
    pub fn radius_slope(&self, x: f64) -> f64 {
        if self.r_p == 0.0 {
            return 0.0;
        }
        let ramp = self.ramp_length();
        match self.region_unchecked(x) {
            Region::Converging => -self.r_p / ramp,
            Region::Diverging => self.r_p / ramp,
            _ => 0.0,
        }
    }

    /// Piecewise-linear description of `r(x)` as `(x, r)` vertices from 0 to `l_c`.
    pub fn vertices(&self) -> Vec<(f64, f64)> {
        let [a, b, c, d] = self.breakpoints();
        let inner = self.r_c - self.r_p;
        vec![
            (0.0, self.r_c),
            (a, self.r_c),
            (b, inner),
            (c, inner),
            (d, self.r_c),
            (self.l_c, self.r_c),
        ]
    }

    /// Every violated invariant, or `Ok` when there are none.
    pub fn validate(&self) -> std::result::Result<(), Vec<String>> {
        let mut errors = Vec::new();
        let finite = [
            self.r_c,
            self.l_c,
            self.r_p,
            self.l_p_outer,
            self.l_p_inner,
            self.x_center,
        ]
        .iter()
        .all(|v| v.is_finite());
        if !finite {
            errors.push("geometry contains non-finite values".to_string());
            return Err(errors);
        }
        if self.r_c <= 0.0 {
            errors.push(format!("channel radius must be positive, got {}", self.r_c));
        }
        if self.l_c <= 0.0 {
            errors.push(format!("channel length must be positive, got {}", self.l_c));
        }
        if self.r_p < 0.0 {
            errors.push(format!("plaque extension must be non-negative, got {}", self.r_p));
        }
        if self.r_p >= self.r_c && self.r_c > 0.0 {
            errors.push(format!(
                "full occlusion: plaque extension {} m reaches channel radius {} m",
                self.r_p, self.r_c
            ));
        }
        if self.l_p_inner <= 0.0 {
            errors.push(format!(
                "plaque plateau length must be positive, got {}",
                self.l_p_inner
            ));
        }
        if self.l_p_inner > self.l_p_outer {
            errors.push(format!(
                "plaque plateau ({} m) longer than its footprint ({} m)",
                self.l_p_inner, self.l_p_outer
            ));
        }
        let [start, _, _, end] = self.breakpoints();
        if start < 0.0 || end > self.l_c {
            errors.push(format!(
                "plaque footprint [{start}, {end}] m exceeds channel [0, {}] m",
                self.l_c
            ));
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
}
