// Copyright 2026 Pulseforge Contributors
// SPDX-License-Identifier: Apache-2.0

//! Decoherence rates and their deduction from measured T1/T2 times.

use crate::error::CoreError;
use serde::{Deserialize, Serialize};

/// Relaxation and dephasing rates in µs⁻¹.
///
/// The jump operators are √Γ₁|0⟩⟨1|, √Γ₂|1⟩⟨2| (cascade relaxation) and
/// √γ₁|1⟩⟨1|, √γ₂|2⟩⟨2| (pure dephasing).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DecoherenceRates {
    /// Γ₁: relaxation |1⟩→|0⟩.
    pub relax1: f64,
    /// Γ₂: relaxation |2⟩→|1⟩.
    pub relax2: f64,
    /// γ₁: dephasing of |1⟩.
    pub dephase1: f64,
    /// γ₂: dephasing of |2⟩.
    pub dephase2: f64,
}

impl DecoherenceRates {
    pub fn new(relax1: f64, relax2: f64, dephase1: f64, dephase2: f64) -> Self {
        DecoherenceRates {
            relax1,
            relax2,
            dephase1,
            dephase2,
        }
    }

    /// All rates zero: closed-system dynamics.
    pub fn zero() -> Self {
        DecoherenceRates::new(0.0, 0.0, 0.0, 0.0)
    }

    /// Deduces the four rates from relaxation and Ramsey times:
    ///
    /// Γ₁ = 1/T₁⁰¹, γ₁ = 2/T₂⁰¹ − Γ₁, Γ₂ = 1/T₁¹², γ₂ = 2/T₂¹² − Γ₂ − Γ₁ − γ₁.
    ///
    /// A negative deduced rate (e.g. T₂ > 2T₁) is a hard input error.
    pub fn from_times(t1_01: f64, t1_12: f64, t2_01: f64, t2_12: f64) -> Result<Self, CoreError> {
        for (name, value) in [
            ("t1_01", t1_01),
            ("t1_12", t1_12),
            ("t2_01", t2_01),
            ("t2_12", t2_12),
        ] {
            if !(value > 0.0) {
                return Err(CoreError::NonPositiveTime { name, value });
            }
        }
        let relax1 = 1.0 / t1_01;
        let dephase1 = 2.0 / t2_01 - relax1;
        let relax2 = 1.0 / t1_12;
        let dephase2 = 2.0 / t2_12 - relax2 - relax1 - dephase1;
        for (name, value) in [
            ("Gamma1", relax1),
            ("gamma1", dephase1),
            ("Gamma2", relax2),
            ("gamma2", dephase2),
        ] {
            if value < 0.0 {
                return Err(CoreError::NegativeRate { name, value });
            }
        }
        Ok(DecoherenceRates::new(relax1, relax2, dephase1, dephase2))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn device_times_give_expected_rates() {
        // direct substitution, computed independently:
        //   Γ₁ = 1/9.5, γ₁ = 2/6 − 1/9.5, Γ₂ = 1/4.6,
        //   γ₂ = 2/1.9 − Γ₂ − Γ₁ − γ₁
        let r = DecoherenceRates::from_times(9.5, 4.6, 6.0, 1.9).unwrap();
        assert_abs_diff_eq!(r.relax1, 0.105_263_157_894_736_84, epsilon = 1e-15);
        assert_abs_diff_eq!(r.dephase1, 0.228_070_175_438_596_48, epsilon = 1e-15);
        assert_abs_diff_eq!(r.relax2, 0.217_391_304_347_826_08, epsilon = 1e-15);
        assert_abs_diff_eq!(r.dephase2, 0.501_906_941_266_209, epsilon = 1e-12);
    }

    #[test]
    fn pure_relaxation_limit_has_zero_dephasing() {
        // T₂ = 2 T₁ on both transitions forces γ₁ = γ₂ = 0
        let r = DecoherenceRates::from_times(1.0, 1.0, 2.0, 1.0).unwrap();
        assert_eq!(r.dephase1, 0.0);
        assert_eq!(r.dephase2, 0.0);
    }

    #[test]
    fn inconsistent_times_are_rejected() {
        let err = DecoherenceRates::from_times(1.0, 1.0, 3.0, 1.0).unwrap_err();
        match err {
            CoreError::NegativeRate { name, value } => {
                assert_eq!(name, "gamma1");
                assert!(value < 0.0);
            }
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn rates_invert_back_to_times() {
        let (t1_01, t1_12, t2_01, t2_12) = (9.5, 4.6, 6.0, 1.9);
        let r = DecoherenceRates::from_times(t1_01, t1_12, t2_01, t2_12).unwrap();
        assert_abs_diff_eq!(1.0 / r.relax1, t1_01, epsilon = 1e-12);
        assert_abs_diff_eq!(2.0 / (r.dephase1 + r.relax1), t2_01, epsilon = 1e-12);
        assert_abs_diff_eq!(1.0 / r.relax2, t1_12, epsilon = 1e-12);
        assert_abs_diff_eq!(
            2.0 / (r.dephase2 + r.relax2 + r.relax1 + r.dephase1),
            t2_12,
            epsilon = 1e-12
        );
    }
}
