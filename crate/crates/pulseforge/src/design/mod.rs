// Copyright 2026 Pulseforge Contributors
// SPDX-License-Identifier: Apache-2.0

//! Inverse engineering of drive schedules.
//!
//! Both control modes share the same structure: two of the five family
//! parameters follow a prescribed profile, the drive amplitudes are solved
//! algebraically from the master equation at each instant, and the remaining
//! three parameters are advanced by their constraint ODEs with RK4 on the
//! output grid.
//!
//! At t = 0 the state is exactly |0⟩⟨0| and the drive formulas are 0/0; the
//! divergence is integrable (the relevant coherences grow like √t), so
//! integration starts at a small offset δ with √-law seeds and the drive is
//! amplitude-capped inside a short startup window. Outside that window the
//! raw amplitudes are recorded and a target is declared infeasible when they
//! exceed the cap on more than a configured fraction of grid points, or when
//! any designed state leaves the physical set.

pub mod coherence;
pub mod population;

use crate::error::{DesignError, InfeasibleReason};
use crate::pulse::PulseSchedule;
use crate::state::{params_to_matrix, DensityParams};

/// Eigenvalue floor for the designed family states. Slightly looser than the
/// integrator guard: the √t startup seeds sit a hair outside the exact
/// physical set (minimum eigenvalue of order −h(δ)²).
pub const DESIGN_MIN_EIG: f64 = -1e-6;

/// Knobs shared by all design routines.
#[derive(Debug, Clone, Copy)]
pub struct DesignOptions {
    /// Output grid step in µs (also the internal integration step).
    pub dt: f64,
    /// Drive-amplitude cap in µs⁻¹.
    pub omega_cap: f64,
    /// Startup offset as a fraction of t_f.
    pub delta_frac: f64,
    /// Fraction of post-startup grid points allowed to exceed the cap.
    pub cap_fraction: f64,
}

impl Default for DesignOptions {
    fn default() -> Self {
        DesignOptions {
            dt: 1e-3,
            omega_cap: 100.0,
            delta_frac: 1e-4,
            cap_fraction: 0.01,
        }
    }
}

impl DesignOptions {
    pub fn with_dt(mut self, dt: f64) -> Self {
        self.dt = dt;
        self
    }

    pub fn with_omega_cap(mut self, cap: f64) -> Self {
        self.omega_cap = cap;
        self
    }
}

/// A designed schedule plus the auxiliary (iterated) parameter track.
#[derive(Debug, Clone)]
pub struct DesignResult {
    pub pulses: PulseSchedule,
    /// The three iterated parameters at each grid node; component order is
    /// (h1, h2, h3) for population control and (f1, f2, h1) for coherence
    /// control.
    pub aux: Vec<[f64; 3]>,
    pub max_omega01: f64,
    pub max_omega12: f64,
    /// Startup offset actually used, in µs.
    pub delta: f64,
}

/// One control mode's coupled system: prescribed components + iterated ones.
///
/// `omegas` solves the instantaneous drive from the iterated state (already
/// capped when `capped` is set); `derivs` is the constraint ODE right-hand
/// side; `full_params` assembles the complete family state for physicality
/// checks; `seed` gives the iterated state at the startup offset δ.
pub(crate) trait ControlSystem {
    fn seed(&self, delta: f64) -> [f64; 3];
    fn omegas(&self, t: f64, y: &[f64; 3]) -> Result<(f64, f64), DesignError>;
    fn derivs(&self, t: f64, y: &[f64; 3], omega01: f64, omega12: f64) -> [f64; 3];
    fn full_params(&self, t: f64, y: &[f64; 3]) -> DensityParams;
}

/// Shared fixed-grid integration driver for both control modes.
pub(crate) fn run_design<S: ControlSystem>(
    system: &S,
    t_f: f64,
    opts: &DesignOptions,
) -> Result<DesignResult, DesignError> {
    let n = (t_f / opts.dt).round().max(1.0) as usize;
    let dt = t_f / n as f64;
    let delta = opts.delta_frac * t_f;
    let cap_window = 100.0 * delta;
    let cap = opts.omega_cap;

    let eval = |t: f64, y: &[f64; 3]| -> Result<(f64, f64), DesignError> {
        let (mut w01, mut w12) = system.omegas(t, y)?;
        if t < cap_window {
            // the startup divergence is integrable; bound it instead of
            // resolving it
            if !w01.is_finite() {
                w01 = 0.0;
            }
            if !w12.is_finite() {
                w12 = 0.0;
            }
            w01 = w01.clamp(-cap, cap);
            w12 = w12.clamp(-cap, cap);
        }
        Ok((w01, w12))
    };

    let step = |t: f64, y: &[f64; 3], h: f64| -> Result<[f64; 3], DesignError> {
        let f = |t: f64, y: &[f64; 3]| -> Result<[f64; 3], DesignError> {
            let (w01, w12) = eval(t, y)?;
            Ok(system.derivs(t, y, w01, w12))
        };
        let k1 = f(t, y)?;
        let y2 = [
            y[0] + 0.5 * h * k1[0],
            y[1] + 0.5 * h * k1[1],
            y[2] + 0.5 * h * k1[2],
        ];
        let k2 = f(t + 0.5 * h, &y2)?;
        let y3 = [
            y[0] + 0.5 * h * k2[0],
            y[1] + 0.5 * h * k2[1],
            y[2] + 0.5 * h * k2[2],
        ];
        let k3 = f(t + 0.5 * h, &y3)?;
        let y4 = [y[0] + h * k3[0], y[1] + h * k3[1], y[2] + h * k3[2]];
        let k4 = f(t + h, &y4)?;
        Ok([
            y[0] + h / 6.0 * (k1[0] + 2.0 * k2[0] + 2.0 * k3[0] + k4[0]),
            y[1] + h / 6.0 * (k1[1] + 2.0 * k2[1] + 2.0 * k3[1] + k4[1]),
            y[2] + h / 6.0 * (k1[2] + 2.0 * k2[2] + 2.0 * k3[2] + k4[2]),
        ])
    };

    let mut y = system.seed(delta);
    let mut times = Vec::with_capacity(n + 1);
    let mut omega01 = Vec::with_capacity(n + 1);
    let mut omega12 = Vec::with_capacity(n + 1);
    let mut aux = Vec::with_capacity(n + 1);
    let mut over_cap = 0usize;
    let mut post_window = 0usize;

    let mut record =
        |t: f64, t_eval: f64, y: &[f64; 3]| -> Result<(f64, f64), DesignError> {
            let (w01, w12) = eval(t_eval, y)?;
            if !(w01.is_finite() && w12.is_finite() && y.iter().all(|v| v.is_finite())) {
                return Err(DesignError::InfeasibleTarget {
                    reason: InfeasibleReason::Unphysical,
                });
            }
            let p = system.full_params(t_eval, y);
            if params_to_matrix(&p).min_eigenvalue() < DESIGN_MIN_EIG {
                return Err(DesignError::InfeasibleTarget {
                    reason: InfeasibleReason::Unphysical,
                });
            }
            if t >= cap_window {
                post_window += 1;
                if w01.abs() > cap || w12.abs() > cap {
                    over_cap += 1;
                }
            }
            times.push(t);
            omega01.push(w01);
            omega12.push(w12);
            aux.push(*y);
            Ok((w01, w12))
        };

    // node 0 carries the capped drive at the offset δ
    record(0.0, delta, &y)?;
    // first step covers [δ, dt], the rest are regular
    y = step(delta, &y, dt - delta)?;
    record(dt, dt, &y)?;
    for k in 1..n {
        let t = k as f64 * dt;
        y = step(t, &y, dt)?;
        record((k + 1) as f64 * dt, (k + 1) as f64 * dt, &y)?;
    }

    if post_window > 0 && (over_cap as f64) / (post_window as f64) > opts.cap_fraction {
        return Err(DesignError::InfeasibleTarget {
            reason: InfeasibleReason::Cap,
        });
    }

    let max_omega01 = omega01.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let max_omega12 = omega12.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let pulses = PulseSchedule::new(times, omega01, omega12).map_err(|_| {
        DesignError::InfeasibleTarget {
            reason: InfeasibleReason::Unphysical,
        }
    })?;
    Ok(DesignResult {
        pulses,
        aux,
        max_omega01,
        max_omega12,
        delta,
    })
}
