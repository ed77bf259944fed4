use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Width of the window in which `1/(p+1) + 1/(q+1) = (n-2)/n` counts as equality.
pub const CRITICAL_WINDOW: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Regime {
    Subcritical,
    Critical,
    Supercritical,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExponentPair {
    pub p: f64,
    pub q: f64,
    pub n: usize,
    pub regime: Regime,
}

impl ExponentPair {
    pub fn new(p: f64, q: f64, n: usize) -> Result<Self> {
        if !(p > 0.0 && q > 0.0 && p.is_finite() && q.is_finite()) {
            return Err(Error::InvalidInput(format!("exponents must be positive, got p = {p}, q = {q}")));
        }
        if n < 3 {
            return Err(Error::InvalidInput(format!("dimension n = {n} must be at least 3")));
        }
        let gap = Self::gap_of(p, q, n);
        let regime = if gap.abs() <= CRITICAL_WINDOW {
            Regime::Critical
        } else if gap < 0.0 {
            Regime::Supercritical
        } else {
            Regime::Subcritical
        };
        if regime != Regime::Subcritical {
            assert!(p * q > 1.0, "critical-supercritical pair with pq <= 1");
        }
        Ok(ExponentPair { p, q, n, regime })
    }

    fn gap_of(p: f64, q: f64, n: usize) -> f64 {
        1.0 / (p + 1.0) + 1.0 / (q + 1.0) - (n as f64 - 2.0) / n as f64
    }

    /// `1/(p+1) + 1/(q+1) - (n-2)/n`: zero on the critical hyperbola, negative above it.
    pub fn criticality_gap(&self) -> f64 {
        Self::gap_of(self.p, self.q, self.n)
    }

    pub fn is_critical_supercritical(&self) -> bool {
        self.regime != Regime::Subcritical
    }

    /// The `q` that makes `(p, q)` critical in dimension `n`, if any.
    pub fn critical_partner(p: f64, n: usize) -> Option<f64> {
        let s = (n as f64 - 2.0) / n as f64 - 1.0 / (p + 1.0);
        (s > 0.0).then(|| 1.0 / s - 1.0)
    }

    pub fn swapped(&self) -> Self {
        ExponentPair { p: self.q, q: self.p, ..*self }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn classifies_standard_pairs() {
        assert_eq!(ExponentPair::new(5.0, 5.0, 3).unwrap().regime, Regime::Critical);
        assert_eq!(ExponentPair::new(4.0, 6.5, 3).unwrap().regime, Regime::Critical);
        assert_eq!(ExponentPair::new(6.0, 6.0, 3).unwrap().regime, Regime::Supercritical);
        assert_eq!(ExponentPair::new(2.0, 2.0, 3).unwrap().regime, Regime::Subcritical);
        assert_eq!(ExponentPair::new(3.0, 3.0, 4).unwrap().regime, Regime::Critical);
    }

    #[test]
    fn rejects_nonpositive_exponents() {
        assert!(ExponentPair::new(0.0, 5.0, 3).is_err());
        assert!(ExponentPair::new(5.0, -1.0, 3).is_err());
        assert!(ExponentPair::new(5.0, 5.0, 2).is_err());
    }

    #[test]
    fn critical_partner_lands_on_hyperbola() {
        let q = ExponentPair::critical_partner(4.0, 3).unwrap();
        assert!((q - 6.5).abs() < 1e-12);
        assert!(ExponentPair::critical_partner(1.0, 3).is_none());
    }

    proptest! {
        #[test]
        fn regime_is_symmetric(p in 0.5f64..20.0, q in 0.5f64..20.0, n in 3usize..8) {
            let a = ExponentPair::new(p, q, n).unwrap();
            let b = ExponentPair::new(q, p, n).unwrap();
            prop_assert_eq!(a.regime, b.regime);
            if a.is_critical_supercritical() {
                prop_assert!(p * q > 1.0);
            }
        }
    }
}
