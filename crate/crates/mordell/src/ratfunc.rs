//! Rational functions over ℚ: quotients of [`Poly`] kept in lowest terms.

use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_rational::BigRational;

use crate::poly::Poly;
use crate::{Error, Result};

/// A reduced rational function num/den. Invariants: `den` is monic and
/// nonzero, `gcd(num, den) = 1`. Zero is represented as `0/1`.
#[derive(Clone, PartialEq, Eq)]
pub struct RatFunc {
    num: Poly,
    den: Poly,
}

impl RatFunc {
    /// Build and reduce. Errors if `den` is the zero polynomial.
    pub fn new(num: Poly, den: Poly) -> Result<Self> {
        if den.is_zero() {
            return Err(Error::ZeroRatFuncDivision);
        }
        if num.is_zero() {
            return Ok(RatFunc {
                num: Poly::zero(),
                den: Poly::one(),
            });
        }
        let g = num.gcd(&den)?;
        let (num, _) = num.divrem(&g)?;
        let (den, _) = den.divrem(&g)?;
        // Normalize so the denominator is monic.
        let lc = den.leading().unwrap().clone();
        Ok(RatFunc {
            num: num.scale(&lc.recip()),
            den: den.monic(),
        })
    }

    pub fn from_poly(p: Poly) -> Self {
        RatFunc {
            num: p,
            den: Poly::one(),
        }
    }

    pub fn from_ints(num: &[i64], den: &[i64]) -> Result<Self> {
        RatFunc::new(Poly::from_ints(num), Poly::from_ints(den))
    }

    pub fn zero() -> Self {
        RatFunc::from_poly(Poly::zero())
    }

    pub fn one() -> Self {
        RatFunc::from_poly(Poly::one())
    }

    pub fn x() -> Self {
        RatFunc::from_poly(Poly::x())
    }

    pub fn constant(c: BigRational) -> Self {
        RatFunc::from_poly(Poly::constant(c))
    }

    pub fn num(&self) -> &Poly {
        &self.num
    }

    pub fn den(&self) -> &Poly {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_constant(&self) -> bool {
        self.num.degree().is_none_or(|d| d == 0) && self.den.is_one()
    }

    /// Multiplicative inverse. Errors on zero.
    pub fn recip(&self) -> Result<Self> {
        if self.is_zero() {
            return Err(Error::ZeroRatFuncDivision);
        }
        RatFunc::new(self.den.clone(), self.num.clone())
    }

    /// Evaluate at a rational point; a vanishing denominator is a pole.
    pub fn eval(&self, x0: &BigRational) -> Result<BigRational> {
        let d = self.den.eval(x0);
        if num_traits::Zero::is_zero(&d) {
            return Err(Error::PoleAtPoint { at: x0.clone() });
        }
        Ok(self.num.eval(x0) / d)
    }

    /// Substitute another rational function for the variable.
    pub fn compose(&self, inner: &RatFunc) -> Result<Self> {
        // Horner on numerator and denominator separately, tracking a common
        // power of inner's denominator so everything stays polynomial:
        //   f(p/q) = Σ a_i p^i q^(n-i)  /  Σ b_j p^j q^(n-j),
        // with n = max(deg num, deg den).
        let n = self
            .num
            .degree()
            .unwrap_or(0)
            .max(self.den.degree().unwrap_or(0));
        let p = inner.num.clone();
        let q = inner.den.clone();
        let lift = |f: &Poly| -> Poly {
            let mut acc = Poly::zero();
            // acc = Σ f_i p^i q^(n-i)
            let mut p_pow = Poly::one();
            let mut powers = Vec::with_capacity(n + 1);
            for _ in 0..=n {
                powers.push(p_pow.clone());
                p_pow = &p_pow * &p;
            }
            let mut q_pow = Poly::one();
            for i in (0..=n).rev() {
                let c = f.coeff(i);
                if !num_traits::Zero::is_zero(&c) {
                    let term = powers[i].scale(&c);
                    acc = &acc + &(&term * &q_pow);
                }
                q_pow = &q_pow * &q;
            }
            acc
        };
        RatFunc::new(lift(&self.num), lift(&self.den))
    }

    /// Exact square root in ℚ(x): returns `g` with `g² = self`, normalized
    /// so the numerator has positive leading coefficient, or `None`.
    ///
    /// Because `self` is reduced with monic denominator, `g²` in lowest terms
    /// has numerator `(num g)²` and denominator `(den g)²`, so it suffices to
    /// test numerator and denominator separately.
    pub fn sqrt(&self) -> Option<RatFunc> {
        let sn = self.num.sqrt()?;
        let sd = self.den.sqrt()?;
        Some(RatFunc::new(sn, sd).expect("square root of monic nonzero denominator is nonzero"))
    }

    /// Is this a square in ℚ(x)? Convenience wrapper over [`Self::sqrt`].
    pub fn is_square(&self) -> bool {
        self.sqrt().is_some()
    }

    /// Render with a chosen variable name.
    pub fn to_string_var(&self, var: &str) -> String {
        if self.den.is_one() {
            return self.num.to_string_var(var);
        }
        let wrap = |p: &Poly| -> String {
            let s = p.to_string_var(var);
            // Multi-term polynomials get parentheses; monomials stand alone.
            if s.contains(' ') {
                format!("({})", s)
            } else {
                s
            }
        };
        format!("{} / {}", wrap(&self.num), wrap(&self.den))
    }
}

impl fmt::Debug for RatFunc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_string_var("x"))
    }
}

impl fmt::Display for RatFunc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_string_var("x"))
    }
}

impl Add for &RatFunc {
    type Output = RatFunc;
    fn add(self, rhs: &RatFunc) -> RatFunc {
        let num = &(&self.num * &rhs.den) + &(&rhs.num * &self.den);
        let den = &self.den * &rhs.den;
        RatFunc::new(num, den).expect("product of nonzero denominators is nonzero")
    }
}

impl Sub for &RatFunc {
    type Output = RatFunc;
    fn sub(self, rhs: &RatFunc) -> RatFunc {
        self + &(-rhs)
    }
}

impl Mul for &RatFunc {
    type Output = RatFunc;
    fn mul(self, rhs: &RatFunc) -> RatFunc {
        RatFunc::new(&self.num * &rhs.num, &self.den * &rhs.den)
            .expect("product of nonzero denominators is nonzero")
    }
}

impl Div for &RatFunc {
    type Output = RatFunc;
    fn div(self, rhs: &RatFunc) -> RatFunc {
        self * &rhs.recip().expect("division by the zero rational function")
    }
}

impl Neg for &RatFunc {
    type Output = RatFunc;
    fn neg(self) -> RatFunc {
        RatFunc {
            num: -&self.num,
            den: self.den.clone(),
        }
    }
}

impl RatFunc {
    /// `self^e` for signed exponents (negative exponents invert; errors on
    /// zero base with negative exponent).
    pub fn powi(&self, e: i32) -> Result<RatFunc> {
        let base = if e < 0 { self.recip()? } else { self.clone() };
        let mut acc = RatFunc::one();
        for _ in 0..e.unsigned_abs() {
            acc = &acc * &base;
        }
        Ok(acc)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::rat;

    fn rf(num: &[i64], den: &[i64]) -> RatFunc {
        RatFunc::from_ints(num, den).unwrap()
    }

    #[test]
    fn reduction_and_normalization() {
        // (x^2 - 1)/(x - 1) reduces to x + 1
        let f = rf(&[-1, 0, 1], &[-1, 1]);
        assert_eq!(f, rf(&[1, 1], &[1]));
        assert!(f.den().is_one());
        // denominator is forced monic: x / (2x + 2) = (1/2 x)/(x + 1)
        let g = rf(&[0, 1], &[2, 2]);
        assert_eq!(g.den(), &Poly::from_ints(&[1, 1]));
        assert_eq!(g.num(), &Poly::from_ints(&[0, 1]).scale(&rat(1, 2)));
        assert!(RatFunc::new(Poly::one(), Poly::zero()).is_err());
    }

    #[test]
    fn field_ops() {
        let f = rf(&[0, 1], &[1, 1]); // x/(x+1)
        let g = rf(&[1], &[0, 1]); // 1/x
        let sum = &f + &g;
        // x/(x+1) + 1/x = (x^2 + x + 1)/(x^2 + x)
        assert_eq!(sum, rf(&[1, 1, 1], &[0, 1, 1]));
        let prod = &f * &g;
        assert_eq!(prod, rf(&[1], &[1, 1]));
        let quot = &f / &g;
        assert_eq!(quot, rf(&[0, 0, 1], &[1, 1]));
        assert_eq!(&f - &f, RatFunc::zero());
        assert_eq!(&(&f * &g) / &g, f);
    }

    #[test]
    fn eval_and_poles() {
        let f = rf(&[-1, 0, 1], &[2, 1]); // (x^2-1)/(x+2)
        assert_eq!(f.eval(&rat(3, 1)).unwrap(), rat(8, 5));
        assert!(matches!(
            f.eval(&rat(-2, 1)),
            Err(Error::PoleAtPoint { .. })
        ));
        // reduction removes the removable singularity at x = 1
        let g = rf(&[-1, 0, 1], &[-1, 1]);
        assert_eq!(g.eval(&rat(1, 1)).unwrap(), rat(2, 1));
    }

    #[test]
    fn composition() {
        // f(x) = x^2 - 1 composed with inner = (k-2)^2/((k-1)(k+1))
        let f = rf(&[-1, 0, 1], &[1]);
        let inner = rf(&[4, -4, 1], &[-1, 0, 1]);
        let comp = f.compose(&inner).unwrap();
        // at k = 3: inner = 1/8, f(1/8) = 1/64 - 1 = -63/64
        assert_eq!(comp.eval(&rat(3, 1)).unwrap(), rat(-63, 64));
        // composing with x is the identity
        assert_eq!(f.compose(&RatFunc::x()).unwrap(), f);
        // denominator cancellation: (1/x) ∘ (1/x) = x
        let inv = rf(&[1], &[0, 1]);
        assert_eq!(inv.compose(&inv).unwrap(), RatFunc::x());
    }

    #[test]
    fn squares() {
        let f = rf(&[1, 2, 1], &[0, 0, 1]); // (x+1)^2/x^2
        let s = f.sqrt().unwrap();
        assert_eq!(s, rf(&[1, 1], &[0, 1]));
        assert!(f.is_square());
        assert!(!rf(&[0, 1], &[1]).is_square());
        assert!(!rf(&[1], &[0, 1]).is_square());
        // sign normalization: sqrt picks positive leading numerator
        let g = rf(&[-1, -1], &[3, 1]);
        let s = (&g * &g).sqrt().unwrap();
        assert_eq!(s, -&g);
        // negative constants are not squares
        assert!(!RatFunc::constant(rat(-4, 1)).is_square());
        assert!(RatFunc::constant(rat(9, 4)).is_square());
    }

    #[test]
    fn powers() {
        let f = rf(&[0, 1], &[1, 1]);
        assert_eq!(f.powi(0).unwrap(), RatFunc::one());
        assert_eq!(f.powi(2).unwrap(), &f * &f);
        assert_eq!(f.powi(-1).unwrap(), f.recip().unwrap());
        assert!(RatFunc::zero().powi(-2).is_err());
    }

    #[test]
    fn display() {
        let f = rf(&[-1, 0, 1], &[2, 1]);
        assert_eq!(f.to_string_var("n"), "(n^2 - 1) / (n + 2)");
        assert_eq!(rf(&[3, 1], &[1]).to_string_var("n"), "n + 3");
    }
}
