use crate::error::{Error, Result};

/// Cumulative receiver count on a time grid measured from release.
#[derive(Debug, Clone, PartialEq)]
pub struct EmpiricalCir {
    pub times: Vec<f64>,
    pub counts: Vec<u64>,
    /// Number of released particles.
    pub total: usize,
    pub seed: u64,
    pub config_hash: Option<String>,
}

impl EmpiricalCir {
    pub fn fraction(&self, i: usize) -> f64 {
        self.counts[i] as f64 / self.total as f64
    }

    pub fn final_count(&self) -> u64 {
        self.counts.last().copied().unwrap_or(0)
    }

    /// Count at time `t`, holding the last grid value to the left.
    pub fn count_at(&self, t: f64) -> u64 {
        let i = self.times.partition_point(|&g| g <= t);
        if i == 0 {
            0
        } else {
            self.counts[i - 1]
        }
    }

    /// First grid time at which at least `fraction` of the release has arrived.
    pub fn time_to_fraction(&self, fraction: f64) -> Option<f64> {
        let need = fraction * self.total as f64;
        self.counts
            .iter()
            .position(|&c| c as f64 >= need)
            .map(|i| self.times[i])
    }
}

/// Counts arrivals at or before each grid point.
pub fn empirical_cir(arrival_times: &[f64], total: usize, grid: &[f64]) -> Result<EmpiricalCir> {
    if let Some(w) = grid.windows(2).find(|w| w[1] <= w[0]) {
        return Err(Error::domain(format!(
            "time grid must be strictly increasing ({} followed by {})",
            w[0], w[1]
        )));
    }
    let mut sorted = arrival_times.to_vec();
    sorted.sort_by(f64::total_cmp);
    let counts = grid
        .iter()
        .map(|&t| sorted.partition_point(|&a| a <= t) as u64)
        .collect();
    Ok(EmpiricalCir {
        times: grid.to_vec(),
        counts,
        total,
        seed: 0,
        config_hash: None,
    })
}

/// Kolmogorov-Smirnov distance between the empirical arrival distribution of
/// `total` particles and `cdf`, over `[0, horizon]`.
///
/// Particles that never arrive are censored at `horizon`. Both one-sided
/// limits are checked at every arrival.
pub fn ks_distance<F>(arrivals: &[f64], total: usize, horizon: f64, cdf: F) -> f64
where
    F: Fn(f64) -> f64,
{
    let mut sorted: Vec<f64> = arrivals.iter().copied().filter(|&t| t <= horizon).collect();
    sorted.sort_by(f64::total_cmp);
    let n = total as f64;
    let mut worst: f64 = 0.0;
    for (i, &t) in sorted.iter().enumerate() {
        let left = cdf(t - t.abs() * 1e-12);
        let at = cdf(t);
        worst = worst
            .max((left - i as f64 / n).abs())
            .max((at - (i + 1) as f64 / n).abs());
    }
    worst.max((cdf(horizon) - sorted.len() as f64 / n).abs())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn counting() {
        let c = empirical_cir(&[], 10, &[0.1, 0.2]).unwrap();
        assert_eq!(c.counts, vec![0, 0]);
        let c = empirical_cir(&[0.01, 0.02], 2, &[0.1, 0.2]).unwrap();
        assert_eq!(c.counts, vec![2, 2]);
        let c = empirical_cir(&[0.3, 0.1, 0.2], 3, &[0.15, 0.25]).unwrap();
        assert_eq!(c.counts, vec![1, 2]);
        assert_eq!(c.count_at(0.2), 1);
        assert_eq!(c.count_at(0.3), 2);
        assert_eq!(c.count_at(0.0), 0);
        assert_eq!(c.time_to_fraction(0.5), Some(0.25));
        assert_eq!(c.time_to_fraction(1.0), None);
        assert!(empirical_cir(&[0.1], 1, &[0.2, 0.2]).is_err());
    }

    #[test]
    fn ks_against_uniform() {
        let arrivals: Vec<f64> = (0..1000).map(|i| (i as f64 + 0.5) / 1000.0).collect();
        let d = ks_distance(&arrivals, 1000, 1.0, |t| t.clamp(0.0, 1.0));
        assert!((d - 0.0005).abs() < 1e-9, "{d}");
        // half censored
        let d = ks_distance(&arrivals[..500], 1000, 0.5, |t| t.clamp(0.0, 1.0));
        assert!(d < 1e-3);
        let d = ks_distance(&[], 10, 1.0, |_| 0.3);
        assert!((d - 0.3).abs() < 1e-15);
    }
}
