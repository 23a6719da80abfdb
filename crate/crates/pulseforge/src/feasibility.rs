// Copyright 2026 Pulseforge Contributors
// SPDX-License-Identifier: Apache-2.0

//! Feasible-region mapping by exhaustive grid scan.
//!
//! Each cell designs its target and then verifies the schedule against the
//! master equation; a cell is feasible only when the design succeeds *and*
//! the closed loop tracks the prescription within [`CLOSED_LOOP_TOL`].
//! Cells are independent and evaluated in parallel (with the `parallel`
//! feature); results come back in deterministic row-major grid order.

use crate::design::coherence::{design_coherence_pulses, CoherenceTarget};
use crate::design::population::{design_population_pulses, PopulationTarget};
use crate::design::DesignOptions;
use crate::error::InfeasibleReason;
use crate::lindblad::evolve;
use crate::rates::DecoherenceRates;
use crate::state::DensityMatrix;

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Closed-loop tracking tolerance a feasible cell must meet.
pub const CLOSED_LOOP_TOL: f64 = 1e-3;

/// Sampling stride of the verification trajectory.
const SCAN_SAMPLE_EVERY: usize = 10;

/// One scanned grid cell. `x`/`y` are (p1, p2) for population scans and
/// (h2, h3) for coherence scans.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RegionCell {
    pub x: f64,
    pub y: f64,
    pub feasible: bool,
    pub reason: Option<InfeasibleReason>,
    /// Max deviation of the verified trajectory from the prescription;
    /// present whenever the design step succeeded.
    pub closed_loop_error: Option<f64>,
    /// Largest recorded drive amplitude; present whenever the design step
    /// succeeded.
    pub max_omega: Option<f64>,
}

impl RegionCell {
    fn infeasible(x: f64, y: f64, reason: InfeasibleReason) -> Self {
        RegionCell {
            x,
            y,
            feasible: false,
            reason: Some(reason),
            closed_loop_error: None,
            max_omega: None,
        }
    }
}

fn map_cells<F>(targets: Vec<(f64, f64)>, eval: F) -> Vec<RegionCell>
where
    F: Fn(&(f64, f64)) -> RegionCell + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        targets.par_iter().map(&eval).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        targets.iter().map(&eval).collect()
    }
}

fn grid_values(step: f64, lo: f64, hi: f64) -> Vec<f64> {
    let n = ((hi - lo) / step).round() as usize;
    (0..=n).map(|k| lo + k as f64 * step).collect()
}

/// Scans final-population targets over {p1 ≥ 0, p2 ≥ 0, p1 + p2 ≤ 1}.
pub fn population_feasible_region(
    t_f: f64,
    r: &DecoherenceRates,
    grid_step: f64,
    opts: &DesignOptions,
) -> Vec<RegionCell> {
    assert!(grid_step > 0.0 && grid_step <= 0.5, "grid step in (0, 0.5]");
    let values = grid_values(grid_step, 0.0, 1.0);
    let mut targets = Vec::new();
    for &p1 in &values {
        for &p2 in &values {
            if p1 + p2 <= 1.0 + 1e-9 {
                targets.push((p1, p2));
            }
        }
    }
    let r = *r;
    let opts = *opts;
    map_cells(targets, move |&(p1, p2)| {
        let target = match PopulationTarget::new(p1, p2, t_f) {
            Ok(t) => t,
            Err(e) => return RegionCell::infeasible(p1, p2, e.reason()),
        };
        let design = match design_population_pulses(&target, &r, &opts) {
            Ok(d) => d,
            Err(e) => return RegionCell::infeasible(p1, p2, e.reason()),
        };
        let max_omega = design.max_omega01.max(design.max_omega12);
        let traj = match evolve(
            &DensityMatrix::ground(),
            &design.pulses,
            &r,
            opts.dt,
            SCAN_SAMPLE_EVERY,
        ) {
            Ok(t) => t,
            Err(_) => {
                return RegionCell {
                    max_omega: Some(max_omega),
                    ..RegionCell::infeasible(p1, p2, InfeasibleReason::Unphysical)
                }
            }
        };
        let mut err = 0.0f64;
        for (i, &t) in traj.times.iter().enumerate() {
            let (f1p, f2p) = target.prescribed(t);
            let pops = traj.populations(i);
            err = err.max((pops[1] - f1p).abs()).max((pops[2] - f2p).abs());
        }
        RegionCell {
            x: p1,
            y: p2,
            feasible: err <= CLOSED_LOOP_TOL,
            reason: (err > CLOSED_LOOP_TOL).then_some(InfeasibleReason::Unphysical),
            closed_loop_error: Some(err),
            max_omega: Some(max_omega),
        }
    })
}

/// Scans final-coherence targets over |h2|, |h3| ≤ 0.5 with
/// h2² + h3² ≤ 1/3. Out-of-bound grid nodes are reported as constraint
/// cells so the output grid stays rectangular.
pub fn coherence_feasible_region(
    t_f: f64,
    r: &DecoherenceRates,
    grid_step: f64,
    opts: &DesignOptions,
) -> Vec<RegionCell> {
    assert!(grid_step > 0.0 && grid_step <= 0.5, "grid step in (0, 0.5]");
    let values = grid_values(grid_step, -0.5, 0.5);
    let mut targets = Vec::new();
    for &h2 in &values {
        for &h3 in &values {
            targets.push((h2, h3));
        }
    }
    let r = *r;
    let opts = *opts;
    map_cells(targets, move |&(h2, h3)| {
        let target = match CoherenceTarget::new(h2, h3, t_f) {
            Ok(t) => t,
            Err(e) => return RegionCell::infeasible(h2, h3, e.reason()),
        };
        let design = match design_coherence_pulses(&target, &r, &opts) {
            Ok(d) => d,
            Err(e) => return RegionCell::infeasible(h2, h3, e.reason()),
        };
        let max_omega = design.max_omega01.max(design.max_omega12);
        let traj = match evolve(
            &DensityMatrix::ground(),
            &design.pulses,
            &r,
            opts.dt,
            SCAN_SAMPLE_EVERY,
        ) {
            Ok(t) => t,
            Err(_) => {
                return RegionCell {
                    max_omega: Some(max_omega),
                    ..RegionCell::infeasible(h2, h3, InfeasibleReason::Unphysical)
                }
            }
        };
        let step = design.pulses.step();
        let mut err = 0.0f64;
        for (i, &t) in traj.times.iter().enumerate() {
            let (h2p, h3p) = target.prescribed(t);
            let m = traj.states[i].matrix();
            let node = (t / step).round() as usize;
            let h1_pred = design.aux[node.min(design.aux.len() - 1)][2];
            err = err
                .max((m[(2, 0)].re - h2p).abs())
                .max((m[(2, 1)].im - h3p).abs())
                .max((m[(1, 0)].im - h1_pred).abs());
        }
        RegionCell {
            x: h2,
            y: h3,
            feasible: err <= CLOSED_LOOP_TOL,
            reason: (err > CLOSED_LOOP_TOL).then_some(InfeasibleReason::Unphysical),
            closed_loop_error: Some(err),
            max_omega: Some(max_omega),
        }
    })
}
