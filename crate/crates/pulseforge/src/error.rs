// Copyright 2026 Pulseforge Contributors
// SPDX-License-Identifier: Apache-2.0

//! Error types shared across the crate.

use thiserror::Error;

/// Why a control target was rejected.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InfeasibleReason {
    /// Target violates an algebraic precondition (e.g. populations summing
    /// above one).
    Constraint,
    /// Drive amplitude exceeded the cap on more than the allowed fraction of
    /// grid points outside the startup window.
    Cap,
    /// The designed state left the physical set, the auxiliary system
    /// diverged, or master-equation verification failed to track the target.
    Unphysical,
}

impl InfeasibleReason {
    pub fn as_str(&self) -> &'static str {
        match self {
            InfeasibleReason::Constraint => "constraint",
            InfeasibleReason::Cap => "cap",
            InfeasibleReason::Unphysical => "unphysical",
        }
    }
}

impl std::fmt::Display for InfeasibleReason {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Error)]
pub enum CoreError {
    /// The matrix cannot be represented by the five-parameter family.
    #[error("matrix is outside the five-parameter family (residual {residual:.3e} > tol {tol:.3e})")]
    OutsideFamily { residual: f64, tol: f64 },

    /// A decoherence rate deduced from T1/T2 came out negative.
    #[error("deduced decoherence rate {name} = {value} is negative; inconsistent T1/T2 input")]
    NegativeRate { name: &'static str, value: f64 },

    #[error("times must be positive, got {name} = {value}")]
    NonPositiveTime { name: &'static str, value: f64 },
}

#[derive(Debug, Error)]
pub enum PulseError {
    #[error("pulse schedule lists must have equal nonzero lengths ({times}, {omega01}, {omega12})")]
    LengthMismatch {
        times: usize,
        omega01: usize,
        omega12: usize,
    },

    #[error("time grid must start at 0 and increase with a constant step (index {index})")]
    NonUniformGrid { index: usize },

    #[error("pulse schedule contains a non-finite sample at index {index}")]
    NonFiniteSample { index: usize },
}

#[derive(Debug, Error)]
pub enum EvolveError {
    #[error("state lost positivity at t = {t} µs (min eigenvalue {min_eig:.3e}); reduce dt or check the pulses")]
    UnphysicalState { t: f64, min_eig: f64 },

    #[error("initial state failed the physicality check: {0}")]
    BadInitialState(String),
}

#[derive(Debug, Error)]
pub enum DesignError {
    #[error("infeasible target ({reason})")]
    InfeasibleTarget { reason: InfeasibleReason },

    /// The shared denominator of the coherence-control drive formulas
    /// vanished away from the regularized start.
    #[error("drive denominator collapsed at t = {t} µs")]
    DenominatorCollapse { t: f64 },
}

impl DesignError {
    /// Collapse any design failure onto the three scan reason codes.
    pub fn reason(&self) -> InfeasibleReason {
        match self {
            DesignError::InfeasibleTarget { reason } => *reason,
            DesignError::DenominatorCollapse { .. } => InfeasibleReason::Unphysical,
        }
    }
}

#[derive(Debug, Error)]
pub enum TomoError {
    #[error("calibration matrix is singular or too ill-conditioned (det = {det:.3e})")]
    SingularMatrix { det: f64 },

    #[error("calibration column {column} sums to {sum}, expected {shots} counts")]
    ColumnSumMismatch { column: usize, sum: u64, shots: u64 },

    #[error("calibration matrix entry ({row},{col}) = {value} outside [0, 1]")]
    EntryOutOfRange { row: usize, col: usize, value: f64 },

    #[error("calibration column {column} sums to {sum}, must be 1 within 1e-9")]
    ColumnNotStochastic { column: usize, sum: f64 },
}
