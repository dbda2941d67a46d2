//! Exact-coefficient real polynomials in one variable.
//!
//! Coefficients are stored ascending; the zero polynomial is the empty
//! coefficient vector (degree "-infinity", [`Polynomial::degree`] = `None`).
//! Evaluation, differentiation and antidifferentiation are coefficient
//! arithmetic: one correctly-rounded operation per coefficient, no
//! approximation.

use crate::fp;
use alloc::vec;
use alloc::vec::Vec;

#[derive(Clone, Debug, PartialEq)]
pub struct Polynomial {
    coeffs: Vec<f64>,
}

impl Polynomial {
    pub fn zero() -> Self {
        Polynomial { coeffs: Vec::new() }
    }

    pub fn constant(c: f64) -> Self {
        Polynomial::from_coeffs(vec![c])
    }

    /// Builds from ascending coefficients, trimming exact trailing zeros.
    pub fn from_coeffs(mut coeffs: Vec<f64>) -> Self {
        while coeffs.last() == Some(&0.0) {
            coeffs.pop();
        }
        Polynomial { coeffs }
    }

    /// `c * x^n`.
    pub fn monomial(n: usize, c: f64) -> Self {
        if c == 0.0 {
            return Polynomial::zero();
        }
        let mut coeffs = vec![0.0; n + 1];
        coeffs[n] = c;
        Polynomial { coeffs }
    }

    #[inline]
    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    #[inline]
    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Index of the last nonzero coefficient; `None` for the zero polynomial.
    #[inline]
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn leading_coefficient(&self) -> f64 {
        self.coeffs.last().copied().unwrap_or(0.0)
    }

    /// Horner evaluation.
    pub fn eval(&self, x: f64) -> f64 {
        let mut acc = 0.0;
        for &c in self.coeffs.iter().rev() {
            acc = acc * x + c;
        }
        acc
    }

    pub fn derivative(&self) -> Polynomial {
        if self.coeffs.len() <= 1 {
            return Polynomial::zero();
        }
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(i, &c)| c * i as f64)
            .collect();
        Polynomial::from_coeffs(coeffs)
    }

    /// The antiderivative through the anchor: result `F` has `F' = self`
    /// and `F(anchor_x) = anchor_value`.
    pub fn antiderivative(&self, anchor_x: f64, anchor_value: f64) -> Polynomial {
        let mut coeffs = Vec::with_capacity(self.coeffs.len() + 1);
        coeffs.push(0.0);
        for (i, &c) in self.coeffs.iter().enumerate() {
            coeffs.push(c / (i + 1) as f64);
        }
        let mut f = Polynomial::from_coeffs(coeffs);
        let c0 = anchor_value - f.eval(anchor_x);
        if f.coeffs.is_empty() {
            return Polynomial::constant(c0);
        }
        f.coeffs[0] = c0;
        Polynomial::from_coeffs(f.coeffs)
    }

    pub fn add(&self, rhs: &Polynomial) -> Polynomial {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        let mut coeffs = vec![0.0; n];
        for (i, &c) in self.coeffs.iter().enumerate() {
            coeffs[i] += c;
        }
        for (i, &c) in rhs.coeffs.iter().enumerate() {
            coeffs[i] += c;
        }
        Polynomial::from_coeffs(coeffs)
    }

    pub fn sub(&self, rhs: &Polynomial) -> Polynomial {
        self.add(&rhs.scale(-1.0))
    }

    pub fn scale(&self, factor: f64) -> Polynomial {
        Polynomial::from_coeffs(self.coeffs.iter().map(|&c| c * factor).collect())
    }

    pub fn mul(&self, rhs: &Polynomial) -> Polynomial {
        if self.is_zero() || rhs.is_zero() {
            return Polynomial::zero();
        }
        let mut coeffs = vec![0.0; self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            for (j, &b) in rhs.coeffs.iter().enumerate() {
                coeffs[i + j] += a * b;
            }
        }
        Polynomial::from_coeffs(coeffs)
    }

    /// Adds `c` to the constant term.
    pub fn add_constant(&self, c: f64) -> Polynomial {
        self.add(&Polynomial::constant(c))
    }

    /// Synthetic division by `(x - r)`: returns `(quotient, remainder)` with
    /// `self = (x - r) * quotient + remainder`.
    pub fn deflate(&self, r: f64) -> (Polynomial, f64) {
        if self.coeffs.is_empty() {
            return (Polynomial::zero(), 0.0);
        }
        let n = self.coeffs.len();
        let mut q = vec![0.0; n - 1];
        let mut acc = self.coeffs[n - 1];
        for i in (0..n - 1).rev() {
            q[i] = acc;
            acc = self.coeffs[i] + r * acc;
        }
        (Polynomial::from_coeffs(q), acc)
    }

    /// `self(a x + b)`, expanded in `x`.
    pub fn compose_affine(&self, a: f64, b: f64) -> Polynomial {
        let mut acc = Polynomial::zero();
        let inner = Polynomial::from_coeffs(vec![b, a]);
        for &c in self.coeffs.iter().rev() {
            acc = acc.mul(&inner).add_constant(c);
        }
        acc
    }

    /// Max-abs coefficient; 0 for the zero polynomial.
    pub fn max_abs_coeff(&self) -> f64 {
        self.coeffs.iter().fold(0.0, |m, &c| m.max(fp::abs(c)))
    }

    /// Cauchy bound: every real root lies in `[-B, B]`.
    pub fn cauchy_root_bound(&self) -> f64 {
        match self.degree() {
            None | Some(0) => 0.0,
            Some(n) => {
                let lead = fp::abs(self.coeffs[n]);
                let m = self.coeffs[..n]
                    .iter()
                    .fold(0.0f64, |m, &c| m.max(fp::abs(c)));
                1.0 + m / lead
            }
        }
    }
}
