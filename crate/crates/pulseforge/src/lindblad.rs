// Copyright 2026 Pulseforge Contributors
// SPDX-License-Identifier: Apache-2.0

//! Markovian master equation and its fixed-step integrator.
//!
//! This module is the verification oracle for every designed pulse: it knows
//! nothing about the inverse-engineering formulas and integrates
//!
//! ```text
//!   ρ̇ = -i[H, ρ] + Σⱼ ( Lⱼ ρ Lⱼ† − ½{Lⱼ†Lⱼ, ρ} )
//! ```
//!
//! with H = Ω₀₁|0⟩⟨1| + Ω₁₂|1⟩⟨2| + H.c. and the four jump operators
//! √γ₁|1⟩⟨1|, √γ₂|2⟩⟨2|, √Γ₁|0⟩⟨1|, √Γ₂|1⟩⟨2| as an explicit operator sum.
//!
//! The integrator is classical fixed-step RK4. The right-hand side is
//! traceless and Hermiticity-preserving, so trace and Hermiticity survive to
//! rounding; positivity is monitored at every recorded sample instead of
//! being enforced.

use crate::error::EvolveError;
use crate::linalg::Mat3;
use crate::pulse::PulseSchedule;
use crate::rates::DecoherenceRates;
use crate::state::{index_of_label, matrix_to_params, DensityMatrix, DensityParams};
use num_complex::Complex64;

/// Positivity floor at which `evolve` aborts: well below anything a sane
/// step size produces, well above genuine blow-ups.
pub const UNPHYSICAL_MIN_EIG: f64 = -1e-6;

/// Family-membership tolerance used when attaching parameter tracks to a
/// trajectory.
pub const FAMILY_TOL: f64 = 1e-7;

fn ketbra(a: usize, b: usize) -> Mat3 {
    let mut m = Mat3::zeros();
    m[(index_of_label(a), index_of_label(b))] = Complex64::new(1.0, 0.0);
    m
}

/// The four jump operators and the precomputed ½ Σ Lⱼ†Lⱼ.
struct LindbladOps {
    jumps: [Mat3; 4],
    half_ldl: Mat3,
}

impl LindbladOps {
    fn new(r: &DecoherenceRates) -> Self {
        let jumps = [
            r.dephase1.sqrt() * ketbra(1, 1),
            r.dephase2.sqrt() * ketbra(2, 2),
            r.relax1.sqrt() * ketbra(0, 1),
            r.relax2.sqrt() * ketbra(1, 2),
        ];
        let mut half_ldl = Mat3::zeros();
        for l in &jumps {
            half_ldl = half_ldl + (l.adjoint() * *l).scale(0.5);
        }
        LindbladOps { jumps, half_ldl }
    }

    fn apply(&self, rho: &Mat3, omega01: f64, omega12: f64) -> Mat3 {
        let mut h = Mat3::zeros();
        h[(2, 1)] = Complex64::new(omega01, 0.0);
        h[(1, 2)] = Complex64::new(omega01, 0.0);
        h[(1, 0)] = Complex64::new(omega12, 0.0);
        h[(0, 1)] = Complex64::new(omega12, 0.0);

        let mut out = Complex64::new(0.0, -1.0) * (h * *rho - *rho * h);
        for l in &self.jumps {
            out = out + *l * *rho * l.adjoint();
        }
        out - self.half_ldl * *rho - *rho * self.half_ldl
    }
}

/// Master-equation right-hand side dρ/dt for a single drive value.
pub fn lindblad_rhs(m: &DensityMatrix, omega01: f64, omega12: f64, r: &DecoherenceRates) -> Mat3 {
    LindbladOps::new(r).apply(m.matrix(), omega01, omega12)
}

/// Time-indexed integration output.
#[derive(Debug, Clone)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<DensityMatrix>,
    /// |tr ρ − 1| at each sample.
    pub trace_dev: Vec<f64>,
    /// Smallest eigenvalue at each sample.
    pub min_eig: Vec<f64>,
    /// Family parameters per sample; present iff every sample stays inside
    /// the five-parameter family at tolerance [`FAMILY_TOL`].
    pub params: Option<Vec<DensityParams>>,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn final_state(&self) -> &DensityMatrix {
        self.states.last().expect("trajectory is never empty")
    }

    /// Populations (P0, P1, P2) at sample `i`.
    pub fn populations(&self, i: usize) -> [f64; 3] {
        self.states[i].populations()
    }

    pub fn max_trace_dev(&self) -> f64 {
        self.trace_dev.iter().fold(0.0, |m, v| m.max(*v))
    }

    pub fn worst_min_eig(&self) -> f64 {
        self.min_eig.iter().fold(f64::INFINITY, |m, v| m.min(*v))
    }
}

/// Integrates the master equation from `rho0` over the full span of
/// `pulses`, recording every `sample_every`-th step (plus start and end).
///
/// `dt` is snapped to divide the span exactly. Pulses are interpolated
/// piecewise-linearly at RK4 stage times, so `dt` need not divide the pulse
/// grid step, though the default (equal steps) keeps every RK4 step inside
/// one linear segment and preserves clean fourth-order convergence.
///
/// States are never renormalized; trace deviation is reported per sample.
pub fn evolve(
    rho0: &DensityMatrix,
    pulses: &PulseSchedule,
    r: &DecoherenceRates,
    dt: f64,
    sample_every: usize,
) -> Result<Trajectory, EvolveError> {
    assert!(dt > 0.0, "dt must be positive");
    let sample_every = sample_every.max(1);
    let t_f = pulses.t_f();
    let n_steps = (t_f / dt).round().max(1.0) as usize;
    let dt = t_f / n_steps as f64;

    let ops = LindbladOps::new(r);
    let mut rho = *rho0.matrix();

    let cap = n_steps / sample_every + 2;
    let mut traj = Trajectory {
        times: Vec::with_capacity(cap),
        states: Vec::with_capacity(cap),
        trace_dev: Vec::with_capacity(cap),
        min_eig: Vec::with_capacity(cap),
        params: None,
    };

    let mut record = |t: f64, m: &Mat3, traj: &mut Trajectory| -> Result<(), EvolveError> {
        let state = DensityMatrix::from_matrix(*m);
        let min_eig = m.min_eigenvalue();
        if !m.is_finite() || min_eig < UNPHYSICAL_MIN_EIG {
            return Err(EvolveError::UnphysicalState { t, min_eig });
        }
        traj.times.push(t);
        traj.trace_dev.push(state.trace_deviation());
        traj.min_eig.push(min_eig);
        traj.states.push(state);
        Ok(())
    };

    record(0.0, &rho, &mut traj)?;
    for k in 0..n_steps {
        let t = k as f64 * dt;
        let (w1, v1) = pulses.value_at(t);
        let (w2, v2) = pulses.value_at(t + 0.5 * dt);
        let (w3, v3) = pulses.value_at(t + dt);

        let k1 = ops.apply(&rho, w1, v1);
        let k2 = ops.apply(&(rho + 0.5 * dt * k1), w2, v2);
        let k3 = ops.apply(&(rho + 0.5 * dt * k2), w2, v2);
        let k4 = ops.apply(&(rho + dt * k3), w3, v3);
        rho = rho + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);

        if (k + 1) % sample_every == 0 || k + 1 == n_steps {
            record((k + 1) as f64 * dt, &rho, &mut traj)?;
        }
    }

    let params: Result<Vec<_>, _> = traj
        .states
        .iter()
        .map(|s| matrix_to_params(s, FAMILY_TOL))
        .collect();
    traj.params = params.ok();
    Ok(traj)
}
