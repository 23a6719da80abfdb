// Copyright 2026 Pulseforge Contributors
// SPDX-License-Identifier: Apache-2.0

//! Simplified four-rotation tomography and readout calibration.
//!
//! Only diagonal elements are directly measurable, so the three coherences
//! are reconstructed from the diagonals of four rotated copies of the state:
//!
//!   U₁ = I, U₂ = (X/2)₀₁, U₃ = (X/2)₁₂, U₄ = U₃U₂,
//!
//! with (X/2)ₐᵦ = exp(−i(π/4)(|a⟩⟨b|+|b⟩⟨a|)) acting as identity on the
//! third level.
//!
//! Diagonal reads are indexed by state *label* |i⟩, not by matrix row; with
//! the {|2⟩,|1⟩,|0⟩} basis order, label |2⟩ is row 0. This module owns that
//! conversion.
//!
//! The h₂ line is inverted from the |1⟩ population of ρ₄ = U₄ρU₄†; the
//! diagonals of ρ₁..ρ₃ carry no h₂ information.

use crate::error::TomoError;
use crate::linalg::Mat3;
use crate::state::{index_of_label, DensityMatrix};
use num_complex::Complex64;
use std::f64::consts::FRAC_1_SQRT_2;

/// π/2 rotation over X on the {|0⟩,|1⟩} subspace.
pub fn rotation_x01() -> Mat3 {
    let c = Complex64::new(FRAC_1_SQRT_2, 0.0);
    let s = Complex64::new(0.0, -FRAC_1_SQRT_2);
    let mut u = Mat3::zeros();
    u[(0, 0)] = Complex64::new(1.0, 0.0);
    u[(1, 1)] = c;
    u[(2, 2)] = c;
    u[(1, 2)] = s;
    u[(2, 1)] = s;
    u
}

/// π/2 rotation over X on the {|1⟩,|2⟩} subspace.
pub fn rotation_x12() -> Mat3 {
    let c = Complex64::new(FRAC_1_SQRT_2, 0.0);
    let s = Complex64::new(0.0, -FRAC_1_SQRT_2);
    let mut u = Mat3::zeros();
    u[(2, 2)] = Complex64::new(1.0, 0.0);
    u[(0, 0)] = c;
    u[(1, 1)] = c;
    u[(0, 1)] = s;
    u[(1, 0)] = s;
    u
}

/// The four tomography rotations U₁..U₄.
pub fn tomo_unitaries() -> [Mat3; 4] {
    let u2 = rotation_x01();
    let u3 = rotation_x12();
    [Mat3::identity(), u2, u3, u3 * u2]
}

/// Diagonal populations of the four rotated states.
///
/// `reads[p][i]` is the population of state label |i⟩ in UₚρUₚ†.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiagonalReads {
    pub reads: [[f64; 3]; 4],
}

impl DiagonalReads {
    /// P(|label⟩) in the `setting`-th rotated copy (settings 0..=3 map to
    /// U₁..U₄).
    pub fn read(&self, setting: usize, label: usize) -> f64 {
        self.reads[setting][label]
    }
}

/// Measures the diagonal (state-labeled) populations of UₚρUₚ† for the four
/// rotation settings.
pub fn tomo_rotations(m: &DensityMatrix) -> DiagonalReads {
    let mut reads = [[0.0; 3]; 4];
    for (p, u) in tomo_unitaries().iter().enumerate() {
        let rotated = *u * *m.matrix() * u.adjoint();
        for label in 0..3 {
            let i = index_of_label(label);
            reads[p][label] = rotated[(i, i)].re;
        }
    }
    DiagonalReads { reads }
}

/// Recovers (h₁, h₂, h₃) from the four diagonal reads; exact on noiseless
/// reads of a family state.
pub fn reconstruct_coherences(reads: &DiagonalReads) -> (f64, f64, f64) {
    let sqrt2 = std::f64::consts::SQRT_2;
    let r1_2 = reads.read(0, 2); // f2
    let r1_1 = reads.read(0, 1); // f1
    let h1 = reads.read(2, 2) - 0.5 * (r1_2 + r1_1);
    let h3 = reads.read(1, 1) - 0.5 * (1.0 - r1_2);
    let h2 = -(r1_2 - 2.0 * sqrt2 * h1 + 2.0 * h3 + 1.0 - 4.0 * reads.read(3, 1)) / (2.0 * sqrt2);
    (h1, h2, h3)
}

/// Column-stochastic readout-confusion matrix: `F[i][i']` is the probability
/// of measuring |i⟩ given prepared |i'⟩.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CalibrationMatrix {
    f: [[f64; 3]; 3],
}

impl CalibrationMatrix {
    /// Validates entries in [0, 1] and column sums equal to 1 within 1e-9.
    /// Invertibility is checked at use ([`calibrate`]).
    pub fn new(f: [[f64; 3]; 3]) -> Result<Self, TomoError> {
        for (i, row) in f.iter().enumerate() {
            for (j, &v) in row.iter().enumerate() {
                if !(0.0..=1.0).contains(&v) {
                    return Err(TomoError::EntryOutOfRange {
                        row: i,
                        col: j,
                        value: v,
                    });
                }
            }
        }
        for j in 0..3 {
            let sum = f[0][j] + f[1][j] + f[2][j];
            if (sum - 1.0).abs() > 1e-9 {
                return Err(TomoError::ColumnNotStochastic { column: j, sum });
            }
        }
        Ok(CalibrationMatrix { f })
    }

    pub fn identity() -> Self {
        CalibrationMatrix {
            f: [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]],
        }
    }

    pub fn entries(&self) -> &[[f64; 3]; 3] {
        &self.f
    }

    /// Measured probabilities for true populations `p`: F·p.
    pub fn apply(&self, p: &[f64; 3]) -> [f64; 3] {
        let f = &self.f;
        [
            f[0][0] * p[0] + f[0][1] * p[1] + f[0][2] * p[2],
            f[1][0] * p[0] + f[1][1] * p[1] + f[1][2] * p[2],
            f[2][0] * p[0] + f[2][1] * p[1] + f[2][2] * p[2],
        ]
    }

    fn det(&self) -> f64 {
        let f = &self.f;
        f[0][0] * (f[1][1] * f[2][2] - f[1][2] * f[2][1])
            - f[0][1] * (f[1][0] * f[2][2] - f[1][2] * f[2][0])
            + f[0][2] * (f[1][0] * f[2][1] - f[1][1] * f[2][0])
    }
}

/// Corrects a measured probability triple: P^c = F⁻¹ P^m. Entries of the
/// result may fall slightly outside [0, 1]; they are reported as-is.
pub fn calibrate(measured: &[f64; 3], cal: &CalibrationMatrix) -> Result<[f64; 3], TomoError> {
    let det = cal.det();
    if det.abs() < 1e-12 {
        return Err(TomoError::SingularMatrix { det });
    }
    let f = cal.entries();
    // adjugate / det
    let inv = [
        [
            (f[1][1] * f[2][2] - f[1][2] * f[2][1]) / det,
            (f[0][2] * f[2][1] - f[0][1] * f[2][2]) / det,
            (f[0][1] * f[1][2] - f[0][2] * f[1][1]) / det,
        ],
        [
            (f[1][2] * f[2][0] - f[1][0] * f[2][2]) / det,
            (f[0][0] * f[2][2] - f[0][2] * f[2][0]) / det,
            (f[0][2] * f[1][0] - f[0][0] * f[1][2]) / det,
        ],
        [
            (f[1][0] * f[2][1] - f[1][1] * f[2][0]) / det,
            (f[0][1] * f[2][0] - f[0][0] * f[2][1]) / det,
            (f[0][0] * f[1][1] - f[0][1] * f[1][0]) / det,
        ],
    ];
    Ok([
        inv[0][0] * measured[0] + inv[0][1] * measured[1] + inv[0][2] * measured[2],
        inv[1][0] * measured[0] + inv[1][1] * measured[1] + inv[1][2] * measured[2],
        inv[2][0] * measured[0] + inv[2][1] * measured[1] + inv[2][2] * measured[2],
    ])
}

/// Builds the confusion matrix from per-prepared-state assignment counts:
/// F[i][i'] = counts[i][i'] / shots. Each column must sum to `shots`.
pub fn calibration_from_counts(
    counts: &[[u64; 3]; 3],
    shots: u64,
) -> Result<CalibrationMatrix, TomoError> {
    for j in 0..3 {
        let sum = counts[0][j] + counts[1][j] + counts[2][j];
        if sum != shots {
            return Err(TomoError::ColumnSumMismatch {
                column: j,
                sum,
                shots,
            });
        }
    }
    let mut f = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            f[i][j] = counts[i][j] as f64 / shots as f64;
        }
    }
    CalibrationMatrix::new(f)
}
