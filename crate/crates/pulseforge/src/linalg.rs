// Copyright 2026 Pulseforge Contributors
// SPDX-License-Identifier: Apache-2.0

//! Minimal dense 3×3 complex linear algebra.
//!
//! Everything in this crate lives in a fixed three-dimensional Hilbert
//! space, so a stack-allocated matrix type beats a general-purpose linear
//! algebra crate: no allocation in the integrator hot loop, and the whole
//! crate stays portable to `wasm32` (no BLAS/LAPACK linkage).

use num_complex::Complex64;
use std::ops::{Add, Index, IndexMut, Mul, Neg, Sub};

/// 3×3 complex matrix, row-major.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Mat3 {
    e: [[Complex64; 3]; 3],
}

impl Mat3 {
    pub const fn zeros() -> Self {
        Mat3 {
            e: [[Complex64::new(0.0, 0.0); 3]; 3],
        }
    }

    pub fn identity() -> Self {
        let mut m = Mat3::zeros();
        for i in 0..3 {
            m.e[i][i] = Complex64::new(1.0, 0.0);
        }
        m
    }

    pub fn from_rows(rows: [[Complex64; 3]; 3]) -> Self {
        Mat3 { e: rows }
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Mat3 {
        let mut m = Mat3::zeros();
        for i in 0..3 {
            for j in 0..3 {
                m.e[i][j] = self.e[j][i].conj();
            }
        }
        m
    }

    pub fn trace(&self) -> Complex64 {
        self.e[0][0] + self.e[1][1] + self.e[2][2]
    }

    pub fn scale(&self, s: f64) -> Mat3 {
        let mut m = *self;
        for row in m.e.iter_mut() {
            for v in row.iter_mut() {
                *v *= s;
            }
        }
        m
    }

    /// Largest entry magnitude of `self - other`.
    pub fn max_abs_diff(&self, other: &Mat3) -> f64 {
        let mut d: f64 = 0.0;
        for i in 0..3 {
            for j in 0..3 {
                d = d.max((self.e[i][j] - other.e[i][j]).norm());
            }
        }
        d
    }

    /// Largest deviation from Hermitian symmetry, max |m - m†|.
    pub fn hermiticity_deviation(&self) -> f64 {
        self.max_abs_diff(&self.adjoint())
    }

    pub fn is_finite(&self) -> bool {
        self.e
            .iter()
            .flatten()
            .all(|v| v.re.is_finite() && v.im.is_finite())
    }

    /// Eigenvalues of a Hermitian matrix, ascending.
    ///
    /// Embeds H = X + iY into the real symmetric 6×6 block matrix
    /// [[X, -Y], [Y, X]] (whose spectrum is that of H with every eigenvalue
    /// doubled) and runs cyclic Jacobi to machine precision. Non-Hermitian
    /// input gives the spectrum of the Hermitian part.
    pub fn hermitian_eigenvalues(&self) -> [f64; 3] {
        let mut a = [[0.0f64; 6]; 6];
        for i in 0..3 {
            for j in 0..3 {
                let x = 0.5 * (self.e[i][j].re + self.e[j][i].re);
                let y = 0.5 * (self.e[i][j].im - self.e[j][i].im);
                a[i][j] = x;
                a[i + 3][j + 3] = x;
                a[i][j + 3] = -y;
                a[i + 3][j] = y;
            }
        }
        jacobi_eigenvalues_6(&mut a)
    }

    /// Smallest eigenvalue of a Hermitian matrix.
    pub fn min_eigenvalue(&self) -> f64 {
        self.hermitian_eigenvalues()[0]
    }
}

/// Cyclic Jacobi on a symmetric 6×6; returns every other eigenvalue of the
/// doubled spectrum, ascending.
fn jacobi_eigenvalues_6(a: &mut [[f64; 6]; 6]) -> [f64; 3] {
    for _ in 0..60 {
        let mut off = 0.0;
        for p in 0..6 {
            for q in (p + 1)..6 {
                off += a[p][q] * a[p][q];
            }
        }
        if off < 1e-30 {
            break;
        }
        for p in 0..6 {
            for q in (p + 1)..6 {
                let apq = a[p][q];
                if apq.abs() < 1e-300 {
                    continue;
                }
                let theta = 0.5 * (2.0 * apq).atan2(a[q][q] - a[p][p]);
                let (s, c) = theta.sin_cos();
                for k in 0..6 {
                    let akp = a[k][p];
                    let akq = a[k][q];
                    a[k][p] = c * akp - s * akq;
                    a[k][q] = s * akp + c * akq;
                }
                for k in 0..6 {
                    let apk = a[p][k];
                    let aqk = a[q][k];
                    a[p][k] = c * apk - s * aqk;
                    a[q][k] = s * apk + c * aqk;
                }
            }
        }
    }
    let mut d = [a[0][0], a[1][1], a[2][2], a[3][3], a[4][4], a[5][5]];
    d.sort_by(|x, y| x.partial_cmp(y).unwrap());
    [d[0], d[2], d[4]]
}

impl Index<(usize, usize)> for Mat3 {
    type Output = Complex64;
    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        &self.e[i][j]
    }
}

impl IndexMut<(usize, usize)> for Mat3 {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        &mut self.e[i][j]
    }
}

impl Add for Mat3 {
    type Output = Mat3;
    fn add(self, rhs: Mat3) -> Mat3 {
        let mut m = self;
        for i in 0..3 {
            for j in 0..3 {
                m.e[i][j] += rhs.e[i][j];
            }
        }
        m
    }
}

impl Sub for Mat3 {
    type Output = Mat3;
    fn sub(self, rhs: Mat3) -> Mat3 {
        let mut m = self;
        for i in 0..3 {
            for j in 0..3 {
                m.e[i][j] -= rhs.e[i][j];
            }
        }
        m
    }
}

impl Neg for Mat3 {
    type Output = Mat3;
    fn neg(self) -> Mat3 {
        self.scale(-1.0)
    }
}

impl Mul for Mat3 {
    type Output = Mat3;
    fn mul(self, rhs: Mat3) -> Mat3 {
        let mut m = Mat3::zeros();
        for i in 0..3 {
            for k in 0..3 {
                let aik = self.e[i][k];
                if aik.re == 0.0 && aik.im == 0.0 {
                    continue;
                }
                for j in 0..3 {
                    m.e[i][j] += aik * rhs.e[k][j];
                }
            }
        }
        m
    }
}

impl Mul<Mat3> for f64 {
    type Output = Mat3;
    fn mul(self, rhs: Mat3) -> Mat3 {
        rhs.scale(self)
    }
}

impl Mul<Mat3> for Complex64 {
    type Output = Mat3;
    fn mul(self, rhs: Mat3) -> Mat3 {
        let mut m = rhs;
        for row in m.e.iter_mut() {
            for v in row.iter_mut() {
                *v *= self;
            }
        }
        m
    }
}
