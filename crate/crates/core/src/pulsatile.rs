//! Periodic inlet waveform.
//!
//! Samples are volume flow rates in mL/s, the unit carotid flow curves are
//! usually reported in. Everything else in the crate is SI; the conversion
//! happens in [`PulsatileWaveform::mean_velocity_at`].

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::defaults;
use crate::error::{Error, Result};

const DEFAULT_TABLE: &str = include_str!("../data/carotid_waveform.csv");

/// Cardiac-cycle release instants [s].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Landmarks {
    pub peak_systole: f64,
    pub early_diastole: f64,
    pub late_diastole: f64,
}

impl Default for Landmarks {
    fn default() -> Self {
        Self {
            peak_systole: defaults::T_PEAK_SYSTOLE,
            early_diastole: defaults::T_EARLY_DIASTOLE,
            late_diastole: defaults::T_LATE_DIASTOLE,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PulsatileWaveform {
    times: Vec<f64>,
    rates: Vec<f64>,
    period: f64,
    pub landmarks: Landmarks,
}

impl PulsatileWaveform {
    /// Builds a waveform from `(t [s], Q [mL/s])` samples.
    ///
    /// A final sample at exactly `t = period` closes the cycle; it is dropped
    /// after checking that it repeats the first sample.
    pub fn from_samples(samples: &[(f64, f64)], period: f64) -> Result<Self> {
        if !(period > 0.0 && period.is_finite()) {
            return Err(Error::Waveform(format!("period must be positive, got {period}")));
        }
        let mut samples = samples.to_vec();
        if samples.len() >= 2 {
            let (t_last, q_last) = samples[samples.len() - 1];
            if (t_last - period).abs() <= 1e-9 * period {
                let q_first = samples[0].1;
                if samples[0].0 != 0.0 || (q_last - q_first).abs() > 1e-9 * q_first.abs().max(1.0) {
                    return Err(Error::Waveform(format!(
                        "closing sample at t = {t_last} s must repeat the sample at t = 0"
                    )));
                }
                samples.pop();
            }
        }
        if samples.len() < 2 {
            return Err(Error::Waveform("need at least two samples per cycle".to_string()));
        }
        for (i, &(t, q)) in samples.iter().enumerate() {
            if !(t.is_finite() && q.is_finite()) {
                return Err(Error::Waveform(format!("sample {i} is not finite")));
            }
            if q < 0.0 {
                return Err(Error::Waveform(format!("negative flow rate {q} at t = {t} s")));
            }
            if !(0.0..period).contains(&t) {
                return Err(Error::Waveform(format!(
                    "sample time {t} s outside [0, {period}) s"
                )));
            }
        }
        if let Some(w) = samples.windows(2).find(|w| w[1].0 <= w[0].0) {
            return Err(Error::Waveform(format!(
                "sample times must be strictly increasing ({} s followed by {} s)",
                w[0].0, w[1].0
            )));
        }
        let (times, rates) = samples.into_iter().unzip();
        Ok(Self {
            times,
            rates,
            period,
            landmarks: Landmarks::default(),
        })
    }

    /// Parses a `time_s,flow_rate_ml_per_s` table. `#` starts a comment and
    /// a non-numeric first row is taken as the header.
    pub fn parse(text: &str, period: Option<f64>) -> Result<Self> {
        let mut samples = Vec::new();
        let mut seen_row = false;
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let fields: Vec<&str> = line.split(',').map(str::trim).collect();
            let parsed: Option<Vec<f64>> = fields.iter().map(|f| f.parse().ok()).collect();
            match parsed {
                Some(v) if v.len() == 2 => samples.push((v[0], v[1])),
                _ if !seen_row => {}
                _ => {
                    return Err(Error::Waveform(format!(
                        "line {}: expected two numeric columns, got {line:?}",
                        lineno + 1
                    )))
                }
            }
            seen_row = true;
        }
        if samples.is_empty() {
            return Err(Error::Waveform("empty waveform table".to_string()));
        }
        Self::from_samples(&samples, period.unwrap_or(defaults::CARDIAC_PERIOD))
    }

    pub fn period(&self) -> f64 {
        self.period
    }

    pub fn samples(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.times.iter().copied().zip(self.rates.iter().copied())
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn min_rate(&self) -> f64 {
        self.rates.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max_rate(&self) -> f64 {
        self.rates.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    /// Volume flow [mL/s], linearly interpolated and wrapped across the period boundary.
    pub fn flow_rate_at(&self, t: f64) -> f64 {
        let s = t.rem_euclid(self.period);
        let n = self.times.len();
        // index of the first sample strictly after s
        let hi = self.times.partition_point(|&ti| ti <= s);
        let (t0, q0, t1, q1) = if hi == 0 {
            (
                self.times[n - 1] - self.period,
                self.rates[n - 1],
                self.times[0],
                self.rates[0],
            )
        } else if hi == n {
            (
                self.times[n - 1],
                self.rates[n - 1],
                self.times[0] + self.period,
                self.rates[0],
            )
        } else {
            (self.times[hi - 1], self.rates[hi - 1], self.times[hi], self.rates[hi])
        };
        let w = (s - t0) / (t1 - t0);
        q0 + w * (q1 - q0)
    }

    /// Cross-section average speed [m/s] in a vessel of radius `r_c`.
    pub fn mean_velocity_at(&self, t: f64, r_c: f64) -> f64 {
        self.flow_rate_at(t) * 1e-6 / (PI * r_c * r_c)
    }

    /// Cycle-averaged flow [mL/s], exact for the piecewise-linear interpolant.
    pub fn cycle_mean_rate(&self) -> f64 {
        let n = self.times.len();
        let mut area = 0.0;
        for i in 0..n {
            let (t0, q0) = (self.times[i], self.rates[i]);
            let (t1, q1) = if i + 1 < n {
                (self.times[i + 1], self.rates[i + 1])
            } else {
                (self.times[0] + self.period, self.rates[0])
            };
            area += 0.5 * (q0 + q1) * (t1 - t0);
        }
        area / self.period
    }

    pub fn cycle_mean_velocity(&self, r_c: f64) -> f64 {
        self.cycle_mean_rate() * 1e-6 / (PI * r_c * r_c)
    }

    pub fn scaled(&self, factor: f64) -> Self {
        Self {
            rates: self.rates.iter().map(|q| q * factor).collect(),
            ..self.clone()
        }
    }

    /// Uniformly rescales the waveform so that its cycle-mean speed in a vessel
    /// of radius `r_c` equals `target_u_avg`.
    pub fn normalize_mean(&self, target_u_avg: f64, r_c: f64) -> Result<Self> {
        let current = self.cycle_mean_velocity(r_c);
        if !(current > 0.0 && current.is_finite()) {
            return Err(Error::Waveform("cannot normalize a zero-mean waveform".to_string()));
        }
        let factor = target_u_avg / current;
        if factor == 1.0 {
            return Ok(self.clone());
        }
        Ok(self.scaled(factor))
    }
}

/// The shipped carotid cycle: 0.9 s period, 10 ms spacing.
pub fn default_waveform() -> PulsatileWaveform {
    PulsatileWaveform::parse(DEFAULT_TABLE, Some(defaults::CARDIAC_PERIOD))
        .expect("shipped waveform table is valid")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_waveform() {
        let w = PulsatileWaveform::from_samples(&[(0.0, 9.67), (0.45, 9.67)], 0.9).unwrap();
        for t in [0.0, 0.1, 0.45, 0.7, 0.899, 3.3] {
            assert!((w.flow_rate_at(t) - 9.67).abs() < 1e-12);
        }
        assert!((w.mean_velocity_at(0.3, 3e-3) - 0.342).abs() < 1e-3);
    }

    #[test]
    fn default_table_shape() {
        let w = default_waveform();
        assert_eq!(w.len(), 90);
        assert_eq!(w.period(), 0.9);
        let (t_peak, q_peak) = w
            .samples()
            .fold((0.0, f64::MIN), |acc, s| if s.1 > acc.1 { s } else { acc });
        assert!((0.12..=0.20).contains(&t_peak), "{t_peak}");
        assert_eq!(w.samples().filter(|s| s.1 == q_peak).count(), 1);
        let lm = w.landmarks;
        assert_eq!(w.flow_rate_at(lm.peak_systole), q_peak);
        assert!((q_peak - 24.0).abs() < 2.4);
        assert!(w.flow_rate_at(lm.early_diastole) < w.flow_rate_at(lm.peak_systole));
        // local minimum around early diastole
        let ed = w.flow_rate_at(lm.early_diastole);
        assert!(ed <= w.flow_rate_at(lm.early_diastole - 0.02));
        assert!(ed <= w.flow_rate_at(lm.early_diastole + 0.02));
        assert!(w.flow_rate_at(lm.late_diastole) < w.cycle_mean_rate());
        assert!(w.samples().all(|s| s.1 >= 0.0));
    }

    #[test]
    fn wraps_between_last_and_first() {
        let w = PulsatileWaveform::from_samples(&[(0.1, 2.0), (0.5, 6.0)], 1.0).unwrap();
        // from 6.0 at 0.5 to 2.0 at 1.1
        assert!((w.flow_rate_at(0.8) - 4.0).abs() < 1e-12);
        assert!((w.flow_rate_at(0.05) - (6.0 - 4.0 * 0.55 / 0.6)).abs() < 1e-12);
        assert!((w.flow_rate_at(0.3) - 4.0).abs() < 1e-12);
    }

    #[test]
    fn rejects_bad_tables() {
        assert!(PulsatileWaveform::from_samples(&[(0.0, 1.0), (0.0, 2.0)], 0.9).is_err());
        assert!(PulsatileWaveform::from_samples(&[(0.2, 1.0), (0.1, 2.0)], 0.9).is_err());
        assert!(PulsatileWaveform::from_samples(&[(0.0, 1.0), (0.1, -2.0)], 0.9).is_err());
        assert!(PulsatileWaveform::from_samples(&[(0.0, 1.0)], 0.9).is_err());
        assert!(PulsatileWaveform::parse("# nothing\n", None).is_err());
        assert!(PulsatileWaveform::parse("t,q\n0,1\n0.1,x\n", None).is_err());
        assert!(PulsatileWaveform::from_samples(&[(0.0, 1.0), (0.5, 2.0), (0.9, 3.0)], 0.9).is_err());
    }

    #[test]
    fn parse_with_header_and_comments() {
        let w = PulsatileWaveform::parse("# c\ntime_s,flow_rate_ml_per_s\n0.0, 1.0 # a\n0.3,2\n\n0.6,3\n", Some(0.9)).unwrap();
        assert_eq!(w.len(), 3);
        let w = PulsatileWaveform::parse("0.0,1.0\n0.3,2\n", None).unwrap();
        assert_eq!(w.period(), 0.9);
    }

    #[test]
    fn normalization() {
        let w = default_waveform();
        let n = w.normalize_mean(0.342, 3e-3).unwrap();
        assert!(((n.cycle_mean_velocity(3e-3) - 0.342) / 0.342).abs() < 1e-9);
        let again = n.normalize_mean(0.342, 3e-3).unwrap();
        for ((_, a), (_, b)) in n.samples().zip(again.samples()) {
            assert!((a - b).abs() <= 1e-12 * a.abs());
        }
        let c = PulsatileWaveform::from_samples(&[(0.0, 2.0), (0.4, 2.0)], 0.9).unwrap();
        let target = 0.5 * c.cycle_mean_velocity(3e-3);
        let half = c.normalize_mean(target, 3e-3).unwrap();
        assert!(half.samples().all(|(_, q)| (q - 1.0).abs() < 1e-12));
        let zero = PulsatileWaveform::from_samples(&[(0.0, 0.0), (0.4, 0.0)], 0.9).unwrap();
        assert!(zero.normalize_mean(0.342, 3e-3).is_err());
    }

    #[test]
    fn unit_bridge() {
        let w = PulsatileWaveform::from_samples(&[(0.0, 9.67), (0.5, 0.0)], 0.9).unwrap();
        assert!((w.mean_velocity_at(0.0, 3e-3) - 9.67e-6 / (PI * 9e-6)).abs() < 1e-15);
        assert_eq!(w.mean_velocity_at(0.5, 3e-3), 0.0);
        let ratio = w.mean_velocity_at(0.0, 3e-3) / w.mean_velocity_at(0.0, 6e-3);
        assert!((ratio - 4.0).abs() < 1e-12);
    }
}
