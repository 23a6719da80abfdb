// Copyright 2026 Pulseforge Contributors
// SPDX-License-Identifier: Apache-2.0

//! Sampled drive schedules.

use crate::error::PulseError;

/// Rabi-frequency samples Ω₀₁(t), Ω₁₂(t) on a uniform time grid, interpreted
/// piecewise-linearly between samples (matching arbitrary-waveform-generator
/// behavior).
#[derive(Debug, Clone, PartialEq)]
pub struct PulseSchedule {
    times: Vec<f64>,
    omega01: Vec<f64>,
    omega12: Vec<f64>,
    step: f64,
}

impl PulseSchedule {
    /// Validates grid uniformity (relative step tolerance 1e-9), equal list
    /// lengths and finiteness.
    pub fn new(times: Vec<f64>, omega01: Vec<f64>, omega12: Vec<f64>) -> Result<Self, PulseError> {
        if times.len() < 2 || times.len() != omega01.len() || times.len() != omega12.len() {
            return Err(PulseError::LengthMismatch {
                times: times.len(),
                omega01: omega01.len(),
                omega12: omega12.len(),
            });
        }
        if times[0] != 0.0 {
            return Err(PulseError::NonUniformGrid { index: 0 });
        }
        let step = times[1] - times[0];
        if !(step > 0.0) {
            return Err(PulseError::NonUniformGrid { index: 1 });
        }
        for (k, w) in times.windows(2).enumerate() {
            let d = w[1] - w[0];
            if !(d > 0.0) || (d - step).abs() > 1e-9 * step.max(1.0) {
                return Err(PulseError::NonUniformGrid { index: k + 1 });
            }
        }
        for (k, v) in times
            .iter()
            .chain(omega01.iter())
            .chain(omega12.iter())
            .enumerate()
        {
            if !v.is_finite() {
                return Err(PulseError::NonFiniteSample { index: k % times.len() });
            }
        }
        Ok(PulseSchedule {
            times,
            omega01,
            omega12,
            step,
        })
    }

    /// All-zero drive over [0, t_f] with `n` steps.
    pub fn zero(t_f: f64, n: usize) -> Self {
        let n = n.max(1);
        let step = t_f / n as f64;
        let times = (0..=n).map(|k| k as f64 * step).collect();
        PulseSchedule {
            times,
            omega01: vec![0.0; n + 1],
            omega12: vec![0.0; n + 1],
            step,
        }
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn omega01(&self) -> &[f64] {
        &self.omega01
    }

    pub fn omega12(&self) -> &[f64] {
        &self.omega12
    }

    pub fn step(&self) -> f64 {
        self.step
    }

    pub fn t_f(&self) -> f64 {
        *self.times.last().unwrap()
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn max_abs_omega01(&self) -> f64 {
        self.omega01.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn max_abs_omega12(&self) -> f64 {
        self.omega12.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Piecewise-linear drive values at an arbitrary time, clamped to the
    /// grid span (RK4 stage times may fall mid-segment or a rounding step
    /// beyond either end).
    pub fn value_at(&self, t: f64) -> (f64, f64) {
        if t <= 0.0 {
            return (self.omega01[0], self.omega12[0]);
        }
        let last = self.times.len() - 1;
        let x = t / self.step;
        let i = (x as usize).min(last - 1);
        let frac = (x - i as f64).clamp(0.0, 1.0);
        (
            self.omega01[i] * (1.0 - frac) + self.omega01[i + 1] * frac,
            self.omega12[i] * (1.0 - frac) + self.omega12[i + 1] * frac,
        )
    }
}
