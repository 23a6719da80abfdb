// Copyright 2026 Pulseforge Contributors
// SPDX-License-Identifier: Apache-2.0

//! Qutrit states: the five-parameter density-matrix family and physicality
//! checks.
//!
//! Basis order is {|2⟩, |1⟩, |0⟩} throughout the crate: matrix row/column 0
//! is state |2⟩ and row/column 2 is the ground state |0⟩. Every module uses
//! this single convention; the tomography module owns the only conversion
//! between matrix indices and state labels.
//!
//! The family is
//!
//! ```text
//!         ⎛  f2   -i·h1   h2  ⎞
//!     ρ = ⎜ i·h1    f1  -i·h3 ⎟
//!         ⎝  h2    i·h3  1-f1-f2 ⎠
//! ```
//!
//! with f1, f2 the populations of |1⟩ and |2⟩ and h1, h2, h3 the imaginary
//! |2⟩↔|1⟩, real |2⟩↔|0⟩ and imaginary |1⟩↔|0⟩ coherences. Five real degrees
//! of freedom rather than the general eight; sufficient for the drive-design
//! scheme and closed under it.

use crate::error::CoreError;
use crate::linalg::Mat3;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

/// Matrix index of a state label under the {|2⟩, |1⟩, |0⟩} basis order.
pub(crate) fn index_of_label(label: usize) -> usize {
    2 - label
}

/// The five real parameters of the density-matrix family.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DensityParams {
    /// Population of |1⟩.
    pub f1: f64,
    /// Population of |2⟩.
    pub f2: f64,
    /// Imaginary part of the |2⟩↔|1⟩ coherence.
    pub h1: f64,
    /// Real part of the |2⟩↔|0⟩ coherence.
    pub h2: f64,
    /// Imaginary part of the |1⟩↔|0⟩ coherence.
    pub h3: f64,
}

impl DensityParams {
    pub fn new(f1: f64, f2: f64, h1: f64, h2: f64, h3: f64) -> Self {
        DensityParams { f1, f2, h1, h2, h3 }
    }

    /// All-zero parameters: the ground state |0⟩⟨0|.
    pub fn ground() -> Self {
        DensityParams::new(0.0, 0.0, 0.0, 0.0, 0.0)
    }

    /// 1 - tr(ρ²) written out in the five parameters; ≥ 0 for physical
    /// states, 0 exactly on pure ones.
    pub fn purity_slack(&self) -> f64 {
        let p0 = 1.0 - self.f1 - self.f2;
        1.0 - self.f1 * self.f1
            - self.f2 * self.f2
            - p0 * p0
            - 2.0 * (self.h1 * self.h1 + self.h2 * self.h2 + self.h3 * self.h3)
    }
}

/// A 3×3 density matrix in the {|2⟩, |1⟩, |0⟩} basis order.
///
/// Construction through [`params_to_matrix`] gives exact Hermiticity and
/// unit trace but deliberately does not enforce positivity; callers check
/// with [`physicality_check`] where it matters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DensityMatrix(Mat3);

impl DensityMatrix {
    /// Wraps a raw matrix without validation.
    pub fn from_matrix(m: Mat3) -> Self {
        DensityMatrix(m)
    }

    /// The basis projector |label⟩⟨label|.
    pub fn basis_state(label: usize) -> Self {
        assert!(label < 3, "qutrit labels are 0, 1, 2");
        let mut m = Mat3::zeros();
        let i = index_of_label(label);
        m[(i, i)] = Complex64::new(1.0, 0.0);
        DensityMatrix(m)
    }

    pub fn ground() -> Self {
        Self::basis_state(0)
    }

    pub fn matrix(&self) -> &Mat3 {
        &self.0
    }

    /// Populations (P0, P1, P2) by state label.
    pub fn populations(&self) -> [f64; 3] {
        [
            self.0[(2, 2)].re,
            self.0[(1, 1)].re,
            self.0[(0, 0)].re,
        ]
    }

    pub fn trace_deviation(&self) -> f64 {
        (self.0.trace() - Complex64::new(1.0, 0.0)).norm()
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.0.min_eigenvalue()
    }
}

/// Builds the family matrix from its five parameters; total on finite input,
/// exactly Hermitian and unit-trace by construction, no positivity check.
pub fn params_to_matrix(p: &DensityParams) -> DensityMatrix {
    let c = Complex64::new;
    DensityMatrix(Mat3::from_rows([
        [c(p.f2, 0.0), c(0.0, -p.h1), c(p.h2, 0.0)],
        [c(0.0, p.h1), c(p.f1, 0.0), c(0.0, -p.h3)],
        [c(p.h2, 0.0), c(0.0, p.h3), c(1.0 - p.f1 - p.f2, 0.0)],
    ]))
}

/// Reads the five parameters back from a matrix.
///
/// The parameters are taken from single entries (f2 = m00, f1 = m11,
/// h1 = Im m10, h2 = Re m20, h3 = Im m21); the matrix is then rebuilt and
/// compared entry-wise. Any residual above `tol` — an imaginary part on the
/// |2⟩↔|0⟩ coherence, a real part on the |2⟩↔|1⟩ or |1⟩↔|0⟩ coherences,
/// non-Hermiticity, or a trace defect — means the state has left the family.
pub fn matrix_to_params(m: &DensityMatrix, tol: f64) -> Result<DensityParams, CoreError> {
    let e = m.matrix();
    let p = DensityParams {
        f1: e[(1, 1)].re,
        f2: e[(0, 0)].re,
        h1: e[(1, 0)].im,
        h2: e[(2, 0)].re,
        h3: e[(2, 1)].im,
    };
    let rebuilt = params_to_matrix(&p);
    let residual = e.max_abs_diff(rebuilt.matrix());
    if residual > tol {
        return Err(CoreError::OutsideFamily { residual, tol });
    }
    Ok(p)
}

/// Result of a physicality check.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PhysicalityReport {
    /// |tr ρ - 1|
    pub trace_dev: f64,
    /// max |ρ - ρ†|
    pub herm_dev: f64,
    /// Smallest eigenvalue of the Hermitian part.
    pub min_eig: f64,
    /// True iff all three stay within `tol` (eigenvalue down to `-tol`).
    pub ok: bool,
}

/// Checks unit trace, Hermiticity and positive semidefiniteness at `tol`.
pub fn physicality_check(m: &DensityMatrix, tol: f64) -> PhysicalityReport {
    let trace_dev = m.trace_deviation();
    let herm_dev = m.matrix().hermiticity_deviation();
    let min_eig = m.matrix().min_eigenvalue();
    PhysicalityReport {
        trace_dev,
        herm_dev,
        min_eig,
        ok: trace_dev <= tol && herm_dev <= tol && min_eig >= -tol,
    }
}

/// Default tolerance for exact-structure checks (Hermiticity, trace).
pub const ALGEBRAIC_TOL: f64 = 1e-12;
/// Default tolerance for positivity, which only holds up to integration
/// error.
pub const POSITIVITY_TOL: f64 = 1e-9;
