use super::{LtiError, Polynomial, TransferFunction};

/// Single-input single-output realization `x' = A x + B u`, `y = C x + D u`.
///
/// `a` is stored row-major, `n × n`.
#[derive(Debug, Clone, PartialEq)]
pub struct StateSpace {
    n: usize,
    a: Vec<f64>,
    b: Vec<f64>,
    c: Vec<f64>,
    d: f64,
}

impl StateSpace {
    pub fn new(a: Vec<f64>, b: Vec<f64>, c: Vec<f64>, d: f64) -> Self {
        let n = b.len();
        assert_eq!(a.len(), n * n, "A must be n x n");
        assert_eq!(c.len(), n, "C must be 1 x n");
        Self { n, a, b, c, d }
    }

    pub fn order(&self) -> usize {
        self.n
    }

    pub fn a(&self) -> &[f64] {
        &self.a
    }

    pub fn a_at(&self, row: usize, col: usize) -> f64 {
        self.a[row * self.n + col]
    }

    pub fn b(&self) -> &[f64] {
        &self.b
    }

    pub fn c(&self) -> &[f64] {
        &self.c
    }

    pub fn d(&self) -> f64 {
        self.d
    }

    /// Recovers `C (sI - A)^-1 B + D` with the Faddeev–LeVerrier recursion.
    ///
    /// Works for any realization, not only the canonical one produced by
    /// [`to_state_space`].
    pub fn to_transfer_function(&self) -> Result<TransferFunction, LtiError> {
        let n = self.n;
        if n == 0 {
            return Ok(TransferFunction::gain(self.d));
        }
        // char poly s^n + c1 s^(n-1) + ... + cn; adj(sI - A) = sum_k M_k s^(n-k)
        let mut char_poly = vec![1.0];
        let mut num = Vec::with_capacity(n);
        let mut m = identity(n);
        for k in 1..=n {
            if k > 1 {
                let prev = char_poly[k - 1];
                m = matmul(&self.a, &m, n);
                for i in 0..n {
                    m[i * n + i] += prev;
                }
            }
            num.push(quad_form(&self.c, &m, &self.b, n));
            let am = matmul(&self.a, &m, n);
            let trace: f64 = (0..n).map(|i| am[i * n + i]).sum();
            char_poly.push(-trace / k as f64);
        }
        let den = Polynomial::new(char_poly)?;
        let strict = Polynomial::new(num)?;
        let num = strict.add(&den.scale(self.d));
        TransferFunction::new(num, den)
    }
}

fn identity(n: usize) -> Vec<f64> {
    let mut m = vec![0.0; n * n];
    for i in 0..n {
        m[i * n + i] = 1.0;
    }
    m
}

fn matmul(x: &[f64], y: &[f64], n: usize) -> Vec<f64> {
    let mut out = vec![0.0; n * n];
    for i in 0..n {
        for k in 0..n {
            let xik = x[i * n + k];
            for j in 0..n {
                out[i * n + j] += xik * y[k * n + j];
            }
        }
    }
    out
}

fn quad_form(c: &[f64], m: &[f64], b: &[f64], n: usize) -> f64 {
    (0..n)
        .map(|i| c[i] * (0..n).map(|j| m[i * n + j] * b[j]).sum::<f64>())
        .sum()
}

/// Controllable canonical realization of a proper transfer function.
///
/// With monic `den = s^n + a1 s^(n-1) + ... + an`, the first row of `A` is
/// `[-a1 ... -an]` with ones on the subdiagonal, `B = e1`, and `C` holds the
/// strictly proper numerator left-padded to length `n`. `D` is the numerator
/// coefficient of `s^n`, nonzero only for biproper systems.
pub fn to_state_space(tf: &TransferFunction) -> StateSpace {
    let den = tf.den().coeffs();
    let n = den.len() - 1;
    let num = tf.num();
    let (d, strict) = if !num.is_zero() && num.degree() == n {
        let d = num.leading();
        (d, num.sub(&tf.den().scale(d)))
    } else {
        (0.0, num.clone())
    };

    let mut a = vec![0.0; n * n];
    for j in 0..n {
        a[j] = -den[j + 1];
    }
    for i in 1..n {
        a[i * n + i - 1] = 1.0;
    }
    let mut b = vec![0.0; n];
    if n > 0 {
        b[0] = 1.0;
    }
    let mut c = vec![0.0; n];
    if !strict.is_zero() {
        let sc = strict.coeffs();
        // Cancellation in `num - d*den` can only lower the degree below n.
        let offset = n - sc.len();
        c[offset..].copy_from_slice(sc);
    }
    StateSpace::new(a, b, c, d)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lti::default_yaw_plant;

    #[test]
    fn yaw_plant_canonical_form() {
        let ss = to_state_space(&default_yaw_plant());
        assert_eq!(ss.order(), 2);
        assert_eq!(ss.a(), &[-2.08, -0.4681, 1.0, 0.0]);
        assert_eq!(ss.b(), &[1.0, 0.0]);
        assert_eq!(ss.c(), &[0.0, 0.01394]);
        assert_eq!(ss.d(), 0.0);
    }

    #[test]
    fn static_gain_has_empty_state() {
        let ss = to_state_space(&TransferFunction::gain(3.5));
        assert_eq!(ss.order(), 0);
        assert_eq!(ss.d(), 3.5);
        assert_eq!(
            ss.to_transfer_function().unwrap(),
            TransferFunction::gain(3.5)
        );
    }

    #[test]
    fn feedthrough_only_when_biproper() {
        let bi = TransferFunction::from_coeffs(&[2.0, 3.0], &[1.0, 1.0]).unwrap();
        let ss = to_state_space(&bi);
        assert_eq!(ss.d(), 2.0);
        assert_eq!(ss.c(), &[1.0]);
        let strict = TransferFunction::from_coeffs(&[3.0], &[1.0, 1.0]).unwrap();
        assert_eq!(to_state_space(&strict).d(), 0.0);
    }

    #[test]
    fn recovery_of_yaw_plant() {
        let g = default_yaw_plant();
        let back = to_state_space(&g).to_transfer_function().unwrap();
        assert_eq!(back.den().coeffs(), g.den().coeffs());
        assert_eq!(back.num().coeffs(), g.num().coeffs());
    }

    #[test]
    fn recovery_of_non_canonical_realization() {
        // diag(-1, -2), B = [1, 1], C = [1, 1] => (2s + 3) / (s^2 + 3s + 2)
        let ss = StateSpace::new(
            vec![-1.0, 0.0, 0.0, -2.0],
            vec![1.0, 1.0],
            vec![1.0, 1.0],
            0.0,
        );
        let tf = ss.to_transfer_function().unwrap();
        assert_eq!(tf.den().coeffs(), &[1.0, 3.0, 2.0]);
        assert_eq!(tf.num().coeffs(), &[2.0, 3.0]);
    }
}
