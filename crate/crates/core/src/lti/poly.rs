use std::fmt;

use serde::{Deserialize, Serialize};

use super::LtiError;

/// Real polynomial in `s`, coefficients stored in descending powers.
///
/// The leading coefficient is nonzero unless the polynomial is the zero
/// polynomial, which is stored as `[0.0]`. Trimming only removes exact zeros.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct Polynomial {
    coeffs: Vec<f64>,
}

impl Polynomial {
    pub fn new(coeffs: Vec<f64>) -> Result<Self, LtiError> {
        if coeffs.is_empty() {
            return Err(LtiError::EmptyPolynomial);
        }
        if let Some(bad) = coeffs.iter().find(|c| !c.is_finite()) {
            return Err(LtiError::NonFiniteCoefficient(*bad));
        }
        Ok(Self::trimmed(coeffs))
    }

    pub fn zero() -> Self {
        Self { coeffs: vec![0.0] }
    }

    pub fn constant(c: f64) -> Self {
        Self { coeffs: vec![c] }
    }

    /// Strips leading exact zeros; never returns an empty list.
    fn trimmed(mut coeffs: Vec<f64>) -> Self {
        let lead = coeffs.iter().position(|&c| c != 0.0);
        match lead {
            Some(0) => {}
            Some(i) => {
                coeffs.drain(..i);
            }
            None => coeffs = vec![0.0],
        }
        Self { coeffs }
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.len() == 1 && self.coeffs[0] == 0.0
    }

    pub fn leading(&self) -> f64 {
        self.coeffs[0]
    }

    /// Horner evaluation at a real point.
    pub fn eval(&self, s: f64) -> f64 {
        self.coeffs.iter().fold(0.0, |acc, &c| acc * s + c)
    }

    pub fn scale(&self, k: f64) -> Self {
        Self::trimmed(self.coeffs.iter().map(|c| c * k).collect())
    }

    /// Coefficient-wise sum after left-padding the shorter operand.
    pub fn add(&self, other: &Self) -> Self {
        let n = self.coeffs.len().max(other.coeffs.len());
        let pad_a = n - self.coeffs.len();
        let pad_b = n - other.coeffs.len();
        let sum = (0..n)
            .map(|i| {
                let a = if i >= pad_a {
                    self.coeffs[i - pad_a]
                } else {
                    0.0
                };
                let b = if i >= pad_b {
                    other.coeffs[i - pad_b]
                } else {
                    0.0
                };
                a + b
            })
            .collect();
        Self::trimmed(sum)
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(-1.0))
    }

    /// Convolution of the coefficient lists.
    pub fn mul(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return Self::zero();
        }
        let mut out = vec![0.0; self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Self::trimmed(out)
    }
}

impl TryFrom<Vec<f64>> for Polynomial {
    type Error = LtiError;

    fn try_from(coeffs: Vec<f64>) -> Result<Self, Self::Error> {
        Self::new(coeffs)
    }
}

impl From<Polynomial> for Vec<f64> {
    fn from(p: Polynomial) -> Self {
        p.coeffs
    }
}

impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let n = self.degree();
        let mut first = true;
        for (i, &c) in self.coeffs.iter().enumerate() {
            if c == 0.0 && !(first && i == n) {
                continue;
            }
            let power = n - i;
            if !first {
                f.write_str(if c < 0.0 { " - " } else { " + " })?;
            } else if c < 0.0 {
                f.write_str("-")?;
            }
            let mag = c.abs();
            match power {
                0 => write!(f, "{mag}")?,
                1 => write!(f, "{mag} s")?,
                p => write!(f, "{mag} s^{p}")?,
            }
            first = false;
        }
        Ok(())
    }
}
