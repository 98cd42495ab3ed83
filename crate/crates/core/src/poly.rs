//! Dense real polynomials with ascending coefficients.

use std::ops::{Add, Mul, Sub};

use nalgebra::DMatrix;
use num_complex::Complex64;

#[derive(Debug, Clone, PartialEq)]
pub struct Poly {
    /// `coeffs[k]` multiplies `x^k`.
    pub coeffs: Vec<f64>,
}

impl Poly {
    pub fn new(coeffs: Vec<f64>) -> Self {
        let mut p = Self { coeffs };
        p.trim();
        p
    }

    pub fn constant(c: f64) -> Self {
        Self::new(vec![c])
    }

    /// `a + b·x`
    pub fn linear(a: f64, b: f64) -> Self {
        Self::new(vec![a, b])
    }

    fn trim(&mut self) {
        while self.coeffs.len() > 1 && *self.coeffs.last().unwrap() == 0.0 {
            self.coeffs.pop();
        }
        if self.coeffs.is_empty() {
            self.coeffs.push(0.0);
        }
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn leading(&self) -> f64 {
        *self.coeffs.last().unwrap()
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, &c| acc * x + c)
    }

    pub fn derivative(&self) -> Self {
        if self.coeffs.len() == 1 {
            return Self::constant(0.0);
        }
        Self::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, &c)| k as f64 * c)
                .collect(),
        )
    }

    pub fn scale(&self, s: f64) -> Self {
        Self::new(self.coeffs.iter().map(|c| c * s).collect())
    }

    /// Largest term magnitude `max_k |a_k x^k|`, the natural scale of `p(x)`.
    pub fn term_scale(&self, x: f64) -> f64 {
        let mut xk = 1.0;
        let mut m: f64 = 0.0;
        for &c in &self.coeffs {
            m = m.max((c * xk).abs());
            xk *= x;
        }
        m
    }

    /// Fujiwara's bound on the modulus of every root.
    pub fn root_bound(&self) -> f64 {
        let n = self.degree();
        if n == 0 {
            return 0.0;
        }
        let an = self.leading().abs();
        let mut best = f64::NEG_INFINITY;
        for k in 1..=n {
            let c = self.coeffs[n - k].abs();
            if c == 0.0 {
                continue;
            }
            let mut r = (c.ln() - an.ln()) / k as f64;
            if k == n {
                r -= std::f64::consts::LN_2 / k as f64;
            }
            best = best.max(r);
        }
        if best == f64::NEG_INFINITY {
            0.0
        } else {
            2.0 * best.exp()
        }
    }

    /// Substitutes `x = s·y` and returns the polynomial in `y`.
    pub fn rescaled(&self, s: f64) -> Self {
        let mut sk = 1.0;
        let mut out = Vec::with_capacity(self.coeffs.len());
        for &c in &self.coeffs {
            out.push(c * sk);
            sk *= s;
        }
        Self::new(out)
    }

    /// All complex roots from the eigenvalues of the companion matrix of the
    /// polynomial rescaled by `x_scale`.
    pub fn companion_roots(&self, x_scale: f64) -> Vec<Complex64> {
        let n = self.degree();
        if n == 0 {
            return Vec::new();
        }
        let scaled = self.rescaled(x_scale);
        let lead = scaled.leading();
        let mut m = DMatrix::<f64>::zeros(n, n);
        for i in 1..n {
            m[(i, i - 1)] = 1.0;
        }
        for i in 0..n {
            m[(i, n - 1)] = -scaled.coeffs[i] / lead;
        }
        m.complex_eigenvalues()
            .iter()
            .map(|z| z * x_scale)
            .collect()
    }
}

impl Add for &Poly {
    type Output = Poly;
    fn add(self, rhs: &Poly) -> Poly {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        let mut out = vec![0.0; n];
        for (i, c) in self.coeffs.iter().enumerate() {
            out[i] += c;
        }
        for (i, c) in rhs.coeffs.iter().enumerate() {
            out[i] += c;
        }
        Poly::new(out)
    }
}

impl Sub for &Poly {
    type Output = Poly;
    fn sub(self, rhs: &Poly) -> Poly {
        self + &rhs.scale(-1.0)
    }
}

impl Mul for &Poly {
    type Output = Poly;
    fn mul(self, rhs: &Poly) -> Poly {
        let mut out = vec![0.0; self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in rhs.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Poly::new(out)
    }
}
