//! Dense univariate polynomials over ℚ with exact arithmetic.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::rational::{exact_sqrt, rat_int};
use crate::{Error, Result};

/// A polynomial over ℚ, stored densely: `coeffs[i]` is the coefficient of
/// `x^i`. Invariant: no trailing zero coefficients, so the zero polynomial is
/// exactly the empty vector and `deg = coeffs.len() - 1` otherwise.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Poly {
    coeffs: Vec<BigRational>,
}

impl Poly {
    /// Build from low-to-high coefficients, trimming trailing zeros.
    pub fn new(mut coeffs: Vec<BigRational>) -> Self {
        while coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        Poly { coeffs }
    }

    /// Build from small integer coefficients, low to high.
    pub fn from_ints(coeffs: &[i64]) -> Self {
        Poly::new(coeffs.iter().map(|&c| rat_int(c)).collect())
    }

    pub fn zero() -> Self {
        Poly { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        Poly::constant(BigRational::one())
    }

    pub fn constant(c: BigRational) -> Self {
        Poly::new(vec![c])
    }

    /// The monomial `x`.
    pub fn x() -> Self {
        Poly::from_ints(&[0, 1])
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.coeffs.len() == 1 && self.coeffs[0].is_one()
    }

    /// Degree, or `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn coeffs(&self) -> &[BigRational] {
        &self.coeffs
    }

    /// Coefficient of `x^i` (zero beyond the degree).
    pub fn coeff(&self, i: usize) -> BigRational {
        self.coeffs.get(i).cloned().unwrap_or_else(BigRational::zero)
    }

    /// Leading coefficient; zero polynomial has none.
    pub fn leading(&self) -> Option<&BigRational> {
        self.coeffs.last()
    }

    /// Scale by a nonzero rational.
    pub fn scale(&self, c: &BigRational) -> Self {
        if c.is_zero() {
            return Poly::zero();
        }
        Poly {
            coeffs: self.coeffs.iter().map(|a| a * c).collect(),
        }
    }

    /// Divide by the leading coefficient (zero polynomial stays zero).
    pub fn monic(&self) -> Self {
        match self.leading() {
            None => Poly::zero(),
            Some(lc) => self.scale(&lc.recip()),
        }
    }

    /// Exact quotient and remainder: `self = q·div + r` with
    /// `deg r < deg div`.
    pub fn divrem(&self, div: &Poly) -> Result<(Poly, Poly)> {
        let dd = div.degree().ok_or(Error::ZeroPolynomialDivision)?;
        let lc = div.leading().unwrap().clone();
        let mut rem = self.coeffs.clone();
        if rem.len() < dd + 1 {
            return Ok((Poly::zero(), self.clone()));
        }
        let qlen = rem.len() - dd;
        let mut q = vec![BigRational::zero(); qlen];
        for i in (0..qlen).rev() {
            let c = &rem[i + dd] / &lc;
            if c.is_zero() {
                continue;
            }
            for (j, dc) in div.coeffs.iter().enumerate() {
                let t = &c * dc;
                rem[i + j] -= t;
            }
            q[i] = c;
        }
        Ok((Poly::new(q), Poly::new(rem)))
    }

    /// Monic greatest common divisor (Euclid). Errors only if both inputs are
    /// zero.
    pub fn gcd(&self, other: &Poly) -> Result<Poly> {
        if self.is_zero() && other.is_zero() {
            return Err(Error::ZeroPolynomialDivision);
        }
        let mut a = self.clone();
        let mut b = other.clone();
        while !b.is_zero() {
            let (_, r) = a.divrem(&b)?;
            a = b;
            b = r;
        }
        Ok(a.monic())
    }

    /// Evaluate at a rational point (Horner).
    pub fn eval(&self, x0: &BigRational) -> BigRational {
        let mut acc = BigRational::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * x0 + c;
        }
        acc
    }

    pub fn pow(&self, mut e: u32) -> Poly {
        let mut base = self.clone();
        let mut acc = Poly::one();
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            base = &base * &base;
            e >>= 1;
        }
        acc
    }

    /// Exact polynomial square root: returns `g` with `g² = self` and
    /// positive leading coefficient, or `None` if no such `g` exists in
    /// ℚ[x].
    pub fn sqrt(&self) -> Option<Poly> {
        if self.is_zero() {
            return Some(Poly::zero());
        }
        let d = self.degree().unwrap();
        if d % 2 != 0 {
            return None;
        }
        let m = d / 2;
        let lead = exact_sqrt(self.leading().unwrap())?;
        if lead.is_zero() {
            return None;
        }
        // Determine g top-down from the coefficient identity
        //   f_{m+j} = 2·g_m·g_j + Σ_{i+k = m+j, j < i,k < m} g_i·g_k.
        let mut g = vec![BigRational::zero(); m + 1];
        g[m] = lead;
        let two_gm = &g[m] + &g[m];
        for j in (0..m).rev() {
            let mut s = self.coeff(m + j);
            for i in (j + 1)..m {
                let k = m + j - i;
                if k < i {
                    break;
                }
                let prod = &g[i] * &g[k];
                if k == i {
                    s -= prod;
                } else {
                    s -= &prod + &prod;
                }
            }
            g[j] = s / &two_gm;
        }
        let cand = Poly::new(g);
        if &(&cand * &cand) == self {
            Some(cand)
        } else {
            None
        }
    }

    /// Render with a chosen variable name, highest degree first.
    pub fn to_string_var(&self, var: &str) -> String {
        if self.is_zero() {
            return "0".to_string();
        }
        let mut out = String::new();
        for (i, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let first = out.is_empty();
            let mag = c.abs();
            if first {
                if c.is_negative() {
                    out.push('-');
                }
            } else if c.is_negative() {
                out.push_str(" - ");
            } else {
                out.push_str(" + ");
            }
            let show_coeff = i == 0 || !mag.is_one();
            if show_coeff {
                out.push_str(&mag.to_string());
            }
            if i > 0 {
                if show_coeff {
                    out.push('*');
                }
                out.push_str(var);
                if i > 1 {
                    out.push_str(&format!("^{}", i));
                }
            }
        }
        out
    }
}

impl fmt::Debug for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_string_var("x"))
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_string_var("x"))
    }
}

impl Add for &Poly {
    type Output = Poly;
    fn add(self, rhs: &Poly) -> Poly {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        let mut out = Vec::with_capacity(n);
        for i in 0..n {
            out.push(self.coeff(i) + rhs.coeff(i));
        }
        Poly::new(out)
    }
}

impl Sub for &Poly {
    type Output = Poly;
    fn sub(self, rhs: &Poly) -> Poly {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        let mut out = Vec::with_capacity(n);
        for i in 0..n {
            out.push(self.coeff(i) - rhs.coeff(i));
        }
        Poly::new(out)
    }
}

impl Mul for &Poly {
    type Output = Poly;
    fn mul(self, rhs: &Poly) -> Poly {
        if self.is_zero() || rhs.is_zero() {
            return Poly::zero();
        }
        let mut out = vec![BigRational::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Poly::new(out)
    }
}

impl Neg for &Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        Poly {
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
        }
    }
}
