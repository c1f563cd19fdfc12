use super::{LtiError, Polynomial, TransferFunction};

/// Substitute for a zero first-column pivot.
const ZERO_PIVOT_EPSILON: f64 = 1e-9;

/// First column of the Routh array of `p`, normalized so the leading entry
/// is positive.
///
/// Exact-zero pivots are replaced by `+ε` before the next row is formed.
/// The second value reports whether any such replacement happened.
pub fn routh_first_column(p: &Polynomial) -> Result<(Vec<f64>, bool), LtiError> {
    if p.degree() < 1 {
        return Err(LtiError::DegenerateDenominator);
    }
    let sign = p.leading().signum();
    let coeffs: Vec<f64> = p.coeffs().iter().map(|c| c * sign).collect();
    let n = coeffs.len();
    let width = n.div_ceil(2);

    let mut upper: Vec<f64> = (0..width)
        .map(|j| coeffs.get(2 * j).copied().unwrap_or(0.0))
        .collect();
    let mut lower: Vec<f64> = (0..width)
        .map(|j| coeffs.get(2 * j + 1).copied().unwrap_or(0.0))
        .collect();
    let mut column = vec![upper[0]];
    let mut perturbed = false;

    for _ in 1..n {
        if lower[0] == 0.0 {
            lower[0] = ZERO_PIVOT_EPSILON;
            perturbed = true;
        }
        column.push(lower[0]);
        let next: Vec<f64> = (0..width)
            .map(|j| {
                let a = upper.get(j + 1).copied().unwrap_or(0.0);
                let b = lower.get(j + 1).copied().unwrap_or(0.0);
                (lower[0] * a - upper[0] * b) / lower[0]
            })
            .collect();
        upper = std::mem::replace(&mut lower, next);
    }
    Ok((column, perturbed))
}

/// True iff every pole has strictly negative real part.
///
/// Uses the Routh–Hurwitz array of the denominator. Any zero pivot means a
/// root on or to the right of the imaginary axis, so marginally stable
/// systems are reported as not stable.
pub fn is_stable(tf: &TransferFunction) -> Result<bool, LtiError> {
    let (column, perturbed) = routh_first_column(tf.den())?;
    Ok(!perturbed && column.iter().all(|&x| x > 0.0))
}
