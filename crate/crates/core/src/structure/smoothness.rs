use std::fmt;

use serde::{Deserialize, Serialize};

use crate::levy::LevyMeasureComponent;
use crate::scalar::Scalar;

/// Largest `k` with `∫_{|x|≥1} |x|ᵏ ν(dx) < ∞`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SmoothnessOrder {
    Finite(u32),
    Infinite,
}

impl fmt::Display for SmoothnessOrder {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SmoothnessOrder::Finite(k) => write!(f, "{k}"),
            SmoothnessOrder::Infinite => write!(f, "inf"),
        }
    }
}

/// Atoms and radial densities have bounded support; a stable tail
/// `r^{−1−α}` integrates `rᵏ` exactly for `k < α`.
pub fn smoothness_order<T: Scalar>(nu: &[LevyMeasureComponent<T>]) -> SmoothnessOrder {
    nu.iter()
        .map(|c| match c {
            LevyMeasureComponent::IsotropicStable(s) => {
                SmoothnessOrder::Finite((s.alpha.as_f64().ceil() as u32).saturating_sub(1))
            }
            _ => SmoothnessOrder::Infinite,
        })
        .min()
        .unwrap_or(SmoothnessOrder::Infinite)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::levy::{Atom, RadialProfile};

    #[test]
    fn examples() {
        let atoms = vec![LevyMeasureComponent::atoms(vec![Atom::new(vec![7.0], 1.0)])];
        assert_eq!(smoothness_order(&atoms), SmoothnessOrder::Infinite);
        assert_eq!(smoothness_order(&[LevyMeasureComponent::stable(1.5f64, 1.0)]), SmoothnessOrder::Finite(1));
        assert_eq!(smoothness_order(&[LevyMeasureComponent::stable(1.0f64, 1.0)]), SmoothnessOrder::Finite(0));
        let radial = LevyMeasureComponent::radial(RadialProfile::Power { coef: 1.0f64, exponent: -2.0 }, 0.1, 5.0);
        assert_eq!(smoothness_order(&[radial]), SmoothnessOrder::Infinite);
    }
}
