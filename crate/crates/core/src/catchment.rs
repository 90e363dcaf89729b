//! Discrete-event check of the catchment-window group model.
//!
//! Requests arrive as a Poisson process of rate `mu` on `[0, T]`. The first
//! request opens a window of length `tau`; requests strictly before the
//! window closes join it, the next one after that opens a new window.

use std::fmt::Write as _;

use rand::Rng;
use rand_distr::{Distribution, Exp};
use serde::{Deserialize, Serialize};

use crate::capacity::{expected_group_count, expected_group_size};
use crate::error::{Error, Result};

/// One simulated content period.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CatchmentTrace {
    pub rate: f64,
    pub catchment_s: f64,
    pub duration_s: f64,
    pub arrivals: Vec<f64>,
    /// Clients per window, in opening order.
    pub group_sizes: Vec<u64>,
}

impl CatchmentTrace {
    pub fn group_count(&self) -> usize {
        self.group_sizes.len()
    }

    pub fn mean_group_size(&self) -> Option<f64> {
        if self.group_sizes.is_empty() {
            None
        } else {
            Some(self.arrivals.len() as f64 / self.group_sizes.len() as f64)
        }
    }
}

pub fn simulate_catchment<R: Rng + ?Sized>(
    rate: f64,
    catchment_s: f64,
    duration_s: f64,
    rng: &mut R,
) -> Result<CatchmentTrace> {
    if !(rate > 0.0 && rate.is_finite()) {
        return Err(Error::InvalidParameter(format!("rate must be positive, got {rate}")));
    }
    if !(catchment_s > 0.0 && catchment_s < duration_s) {
        return Err(Error::InvalidParameter(format!(
            "need 0 < tau < T, got tau = {catchment_s}, T = {duration_s}"
        )));
    }
    let exp = Exp::new(rate).map_err(|e| Error::InvalidParameter(e.to_string()))?;
    let mut arrivals = Vec::new();
    let mut group_sizes: Vec<u64> = Vec::new();
    let mut window_end = f64::NEG_INFINITY;
    let mut t = 0.0;
    loop {
        t += exp.sample(rng);
        if t > duration_s {
            break;
        }
        arrivals.push(t);
        if t < window_end {
            *group_sizes.last_mut().expect("open window") += 1;
        } else {
            window_end = t + catchment_s;
            group_sizes.push(1);
        }
    }
    Ok(CatchmentTrace {
        rate,
        catchment_s,
        duration_s,
        arrivals,
        group_sizes,
    })
}

/// `replication,arrivals,groups,mean_size`, one row per trace.
pub fn trace_table(traces: &[CatchmentTrace]) -> String {
    let mut out = String::from("replication,arrivals,groups,mean_size\n");
    for (k, t) in traces.iter().enumerate() {
        let _ = writeln!(
            out,
            "{k},{},{},{}",
            t.arrivals.len(),
            t.group_count(),
            t.mean_group_size().unwrap_or(0.0)
        );
    }
    out
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Verdict {
    pub traces: usize,
    pub expected_count: f64,
    pub simulated_count: f64,
    pub count_error: f64,
    pub expected_size: f64,
    pub simulated_size: f64,
    pub size_error: f64,
    pub tolerance: f64,
}

impl Verdict {
    pub fn count_ok(&self) -> bool {
        self.count_error <= self.tolerance
    }

    pub fn size_ok(&self) -> bool {
        self.size_error <= self.tolerance
    }

    pub fn passed(&self) -> bool {
        self.count_ok() && self.size_ok()
    }
}

/// Mean window count per trace and pooled mean window size against the
/// expected values, as relative errors.
pub fn validate_analytic(
    traces: &[CatchmentTrace],
    expected_count: f64,
    expected_size: f64,
    rel_tol: f64,
) -> Result<Verdict> {
    if traces.len() < 100 {
        return Err(Error::InvalidParameter(format!(
            "need at least 100 traces, got {}",
            traces.len()
        )));
    }
    let first = &traces[0];
    let key = (first.rate, first.catchment_s, first.duration_s);
    if let Some(t) = traces
        .iter()
        .find(|t| (t.rate, t.catchment_s, t.duration_s) != key)
    {
        return Err(Error::MixedTraces(format!(
            "({}, {}, {}) vs ({}, {}, {})",
            key.0, key.1, key.2, t.rate, t.catchment_s, t.duration_s
        )));
    }
    let groups: usize = traces.iter().map(|t| t.group_count()).sum();
    let arrivals: usize = traces.iter().map(|t| t.arrivals.len()).sum();
    let simulated_count = groups as f64 / traces.len() as f64;
    let simulated_size = if groups == 0 {
        0.0
    } else {
        arrivals as f64 / groups as f64
    };
    Ok(Verdict {
        traces: traces.len(),
        expected_count,
        simulated_count,
        count_error: (simulated_count - expected_count).abs() / expected_count,
        expected_size,
        simulated_size,
        size_error: (simulated_size - expected_size).abs() / expected_size,
        tolerance: rel_tol,
    })
}

/// Simulate `reps` traces and compare with the renewal-model predictions.
pub fn validate_model<R: Rng + ?Sized>(
    rate: f64,
    catchment_s: f64,
    duration_s: f64,
    reps: usize,
    rel_tol: f64,
    rng: &mut R,
) -> Result<Verdict> {
    let traces = (0..reps)
        .map(|_| simulate_catchment(rate, catchment_s, duration_s, rng))
        .collect::<Result<Vec<_>>>()?;
    validate_analytic(
        &traces,
        expected_group_count(duration_s, catchment_s, rate)?,
        expected_group_size(rate, catchment_s)?,
        rel_tol,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn windows_do_not_extend() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let t = simulate_catchment(5.0, 1.0, 100.0, &mut rng).unwrap();
        assert_eq!(t.group_sizes.iter().sum::<u64>() as usize, t.arrivals.len());
        let mut start = f64::NEG_INFINITY;
        let mut opened = 0;
        for &a in &t.arrivals {
            if a >= start + 1.0 {
                start = a;
                opened += 1;
            }
        }
        assert_eq!(opened, t.group_count());
        assert!(t.arrivals.windows(2).all(|w| w[0] <= w[1]));
        assert!(t.arrivals.iter().all(|&a| a <= 100.0));
        let table = trace_table(std::slice::from_ref(&t));
        assert_eq!(table.lines().count(), 2);
        assert!(table.lines().nth(1).unwrap().starts_with(&format!("0,{},", t.arrivals.len())));
    }

    #[test]
    fn mean_count_and_size_near_prediction() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let v = validate_model(1.0, 1.0, 900.0, 1000, 0.02, &mut rng).unwrap();
        assert!(v.passed(), "{v:?}");
        assert!((v.expected_count - 450.5).abs() < 1e-9);
    }

    #[test]
    fn wrong_prediction_fails() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let traces: Vec<_> = (0..200)
            .map(|_| simulate_catchment(1.0, 1.0, 900.0, &mut rng).unwrap())
            .collect();
        let v = validate_analytic(&traces, 2.0, 2.0, 0.02).unwrap();
        assert!(!v.count_ok() && v.size_ok());
    }

    #[test]
    fn input_checks() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        assert!(simulate_catchment(0.0, 1.0, 10.0, &mut rng).is_err());
        assert!(simulate_catchment(1.0, 10.0, 10.0, &mut rng).is_err());
        let few: Vec<_> = (0..10)
            .map(|_| simulate_catchment(1.0, 1.0, 10.0, &mut rng).unwrap())
            .collect();
        assert!(validate_analytic(&few, 1.0, 1.0, 0.1).is_err());
        let mut mixed: Vec<_> = (0..100)
            .map(|_| simulate_catchment(1.0, 1.0, 10.0, &mut rng).unwrap())
            .collect();
        mixed.push(simulate_catchment(2.0, 1.0, 10.0, &mut rng).unwrap());
        assert!(matches!(
            validate_analytic(&mixed, 1.0, 1.0, 0.1),
            Err(Error::MixedTraces(_))
        ));
    }
}
