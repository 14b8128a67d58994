//! Reference parameter set for the carotid scenario. All values SI.

/// Vessel radius [m].
pub const CHANNEL_RADIUS: f64 = 3.0e-3;
/// Transmitter to receiver distance [m].
pub const CHANNEL_LENGTH: f64 = 50.0e-3;
/// Plaque footprint length along the wall [m].
pub const PLAQUE_OUTER_LENGTH: f64 = 20.0e-3;
/// Plaque plateau length [m].
pub const PLAQUE_INNER_LENGTH: f64 = 10.0e-3;

/// Cross-section average inlet speed [m/s].
pub const MEAN_SPEED: f64 = 0.342;
/// Blood density [kg/m^3].
pub const BLOOD_DENSITY: f64 = 1050.0;
/// Average dynamic viscosity of blood [Pa s].
pub const BLOOD_VISCOSITY: f64 = 4.0e-3;

pub const POWER_LAW_INDEX: f64 = 0.708;
/// Consistency index [Pa s^n].
pub const CONSISTENCY_INDEX: f64 = 17.0e-3;
/// Yield stress [Pa].
pub const YIELD_STRESS: f64 = 5.0e-3;
/// Yield-surface position used for model comparisons. Not a measured value.
pub const YIELD_SURFACE: f64 = 0.05;

/// Boltzmann constant as used for the nanoparticle estimate [J/K].
pub const BOLTZMANN: f64 = 1.38e-23;
pub const TEMPERATURE: f64 = 300.0;
/// Iron-oxide nanoparticle radius [m].
pub const PARTICLE_RADIUS: f64 = 50.0e-9;

pub const PARTICLE_COUNT: usize = 1000;
/// Integration step [s].
pub const TIME_STEP: f64 = 1.0e-4;
/// Integration step for severe stenoses (r_p >= 0.75 r_c) [s].
pub const TIME_STEP_FINE: f64 = 1.0e-5;
/// Simulated time after release [s].
pub const DURATION: f64 = 1.0;
pub const SEED: u64 = 0x5eed_2024;

/// Cardiac cycle length [s].
pub const CARDIAC_PERIOD: f64 = 0.9;
/// Peak systole [s].
pub const T_PEAK_SYSTOLE: f64 = 0.16;
/// Early diastole trough [s].
pub const T_EARLY_DIASTOLE: f64 = 0.4;
/// Late diastole, coincides with the end of the cycle [s].
pub const T_LATE_DIASTOLE: f64 = 0.9;

/// Dispersion factors below this value are treated as flow dominated.
pub const FLOW_DOMINATED_THRESHOLD: f64 = 1.0e-2;

/// Default step for a given relative plaque size.
pub fn time_step_for(plaque_rel: f64) -> f64 {
    if plaque_rel >= 0.75 - 1e-12 {
        TIME_STEP_FINE
    } else {
        TIME_STEP
    }
}
