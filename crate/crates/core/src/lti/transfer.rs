use serde::{Deserialize, Serialize};

use super::{LtiError, Polynomial};

/// Proper rational transfer function `num(s) / den(s)` with a monic
/// denominator.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawTransferFunction")]
pub struct TransferFunction {
    num: Polynomial,
    den: Polynomial,
}

#[derive(Deserialize)]
struct RawTransferFunction {
    num: Polynomial,
    den: Polynomial,
}

impl TryFrom<RawTransferFunction> for TransferFunction {
    type Error = LtiError;

    fn try_from(raw: RawTransferFunction) -> Result<Self, Self::Error> {
        Self::new(raw.num, raw.den)
    }
}

impl TransferFunction {
    pub fn new(num: Polynomial, den: Polynomial) -> Result<Self, LtiError> {
        if den.is_zero() {
            return Err(LtiError::ZeroDenominator);
        }
        if !num.is_zero() && num.degree() > den.degree() {
            return Err(LtiError::Improper {
                num: num.degree(),
                den: den.degree(),
            });
        }
        let lead = den.leading();
        if lead == 1.0 {
            return Ok(Self { num, den });
        }
        Ok(Self {
            num: num.scale(1.0 / lead),
            den: den.scale(1.0 / lead),
        })
    }

    pub fn from_coeffs(num: &[f64], den: &[f64]) -> Result<Self, LtiError> {
        Self::new(
            Polynomial::new(num.to_vec())?,
            Polynomial::new(den.to_vec())?,
        )
    }

    /// Static gain `k / 1`.
    pub fn gain(k: f64) -> Self {
        Self {
            num: Polynomial::constant(k),
            den: Polynomial::constant(1.0),
        }
    }

    pub fn num(&self) -> &Polynomial {
        &self.num
    }

    pub fn den(&self) -> &Polynomial {
        &self.den
    }

    pub fn order(&self) -> usize {
        self.den.degree()
    }

    pub fn relative_degree(&self) -> usize {
        self.den.degree() - self.num.degree()
    }

    /// `G(s)` at a real point; infinite at a real pole.
    pub fn eval(&self, s: f64) -> f64 {
        self.num.eval(s) / self.den.eval(s)
    }

    pub fn dc_gain(&self) -> f64 {
        self.eval(0.0)
    }
}

/// Yaw-angle response to thrust input of the reference ROV,
/// `0.01394 / (s^2 + 2.08 s + 0.4681)`.
pub fn default_yaw_plant() -> TransferFunction {
    TransferFunction {
        num: Polynomial::constant(0.01394),
        den: Polynomial::new(vec![1.0, 2.08, 0.4681]).expect("literal coefficients"),
    }
}

/// Cascade `c` then `g`. No pole-zero cancellation.
pub fn series(c: &TransferFunction, g: &TransferFunction) -> TransferFunction {
    // Product of monic polynomials is monic and degrees add, so the result
    // stays proper.
    TransferFunction {
        num: c.num.mul(&g.num),
        den: c.den.mul(&g.den),
    }
}

/// Closes a unity negative-feedback loop around `l`, returning `L / (1 + L)`.
pub fn unity_feedback(l: &TransferFunction) -> Result<TransferFunction, LtiError> {
    let den = l.den.add(&l.num);
    if den.is_zero() {
        return Err(LtiError::AlgebraicLoop);
    }
    match TransferFunction::new(l.num.clone(), den) {
        // A cancelled leading term leaves the loop improper, which is also an
        // algebraic loop (1 + D = 0).
        Err(LtiError::Improper { .. }) => Err(LtiError::AlgebraicLoop),
        other => other,
    }
}
