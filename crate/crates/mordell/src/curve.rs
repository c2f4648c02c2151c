//! The Mordell curve y² = x³ + d over ℚ and its chord–tangent group law.

use std::fmt;

use num_rational::BigRational;
use num_traits::{Signed, Zero};

use crate::{Error, Result};

/// A curve y² = x³ + d with d ≠ 0 (d = 0 is singular).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MordellCurve {
    d: BigRational,
}

/// A point on a Mordell curve: either affine (x, y) or the point at
/// infinity, the group identity. Construct affine points through
/// [`MordellCurve::point`] so membership is always checked.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum CurvePoint {
    Infinity,
    Affine { x: BigRational, y: BigRational },
}

impl MordellCurve {
    pub fn new(d: BigRational) -> Result<Self> {
        if d.is_zero() {
            return Err(Error::ZeroCurveCoefficient);
        }
        Ok(MordellCurve { d })
    }

    pub fn d(&self) -> &BigRational {
        &self.d
    }

    pub fn contains(&self, x: &BigRational, y: &BigRational) -> bool {
        y * y == x * x * x + &self.d
    }

    /// Checked affine point constructor.
    pub fn point(&self, x: BigRational, y: BigRational) -> Result<CurvePoint> {
        if !self.contains(&x, &y) {
            return Err(Error::PointNotOnCurve { x, y });
        }
        Ok(CurvePoint::Affine { x, y })
    }

    pub fn infinity(&self) -> CurvePoint {
        CurvePoint::Infinity
    }

    pub fn on_curve(&self, p: &CurvePoint) -> bool {
        match p {
            CurvePoint::Infinity => true,
            CurvePoint::Affine { x, y } => self.contains(x, y),
        }
    }

    pub fn negate(&self, p: &CurvePoint) -> CurvePoint {
        match p {
            CurvePoint::Infinity => CurvePoint::Infinity,
            CurvePoint::Affine { x, y } => CurvePoint::Affine {
                x: x.clone(),
                y: -y,
            },
        }
    }

    /// Chord–tangent addition.
    pub fn add(&self, p: &CurvePoint, q: &CurvePoint) -> CurvePoint {
        let (x1, y1) = match p {
            CurvePoint::Infinity => return q.clone(),
            CurvePoint::Affine { x, y } => (x, y),
        };
        let (x2, y2) = match q {
            CurvePoint::Infinity => return p.clone(),
            CurvePoint::Affine { x, y } => (x, y),
        };
        let lambda = if x1 == x2 {
            if (y1 + y2).is_zero() {
                // Q = -P (covers 2-torsion doubling, where y = 0).
                return CurvePoint::Infinity;
            }
            // Tangent: λ = 3x²/(2y); y ≠ 0 here.
            let x1sq = x1 * x1;
            (&x1sq + &x1sq + &x1sq) / (y1 + y1)
        } else {
            (y2 - y1) / (x2 - x1)
        };
        let x3 = &lambda * &lambda - x1 - x2;
        let y3 = &lambda * &(x1 - &x3) - y1;
        CurvePoint::Affine { x: x3, y: y3 }
    }

    pub fn double(&self, p: &CurvePoint) -> CurvePoint {
        self.add(p, p)
    }

    pub fn sub(&self, p: &CurvePoint, q: &CurvePoint) -> CurvePoint {
        self.add(p, &self.negate(q))
    }

    /// n·P by signed double-and-add.
    pub fn scalar_mul(&self, n: i64, p: &CurvePoint) -> CurvePoint {
        if n == 0 || matches!(p, CurvePoint::Infinity) {
            return CurvePoint::Infinity;
        }
        let base = if n < 0 { self.negate(p) } else { p.clone() };
        let mut k = n.unsigned_abs();
        let mut acc = CurvePoint::Infinity;
        let mut pow = base;
        while k > 0 {
            if k & 1 == 1 {
                acc = self.add(&acc, &pow);
            }
            k >>= 1;
            if k > 0 {
                pow = self.double(&pow);
            }
        }
        acc
    }

    /// Rational torsion test. Over ℚ the torsion of y² = x³ + d embeds in
    /// ℤ/6, so P is torsion iff 6P = O.
    pub fn is_torsion(&self, p: &CurvePoint) -> bool {
        matches!(self.scalar_mul(6, p), CurvePoint::Infinity)
    }
}

impl CurvePoint {
    pub fn is_infinity(&self) -> bool {
        matches!(self, CurvePoint::Infinity)
    }

    pub fn x(&self) -> Option<&BigRational> {
        match self {
            CurvePoint::Infinity => None,
            CurvePoint::Affine { x, .. } => Some(x),
        }
    }

    pub fn y(&self) -> Option<&BigRational> {
        match self {
            CurvePoint::Infinity => None,
            CurvePoint::Affine { y, .. } => Some(y),
        }
    }

    /// Naive height of the x-coordinate: log max(|num|, den), 0 at infinity.
    /// Used only for ordering search candidates, so f64 precision suffices.
    pub fn naive_height_f64(&self) -> f64 {
        match self {
            CurvePoint::Infinity => 0.0,
            CurvePoint::Affine { x, .. } => {
                let n = x.numer().abs();
                let d = x.denom().abs();
                let m = if n > d { n } else { d };
                // log via bit length to avoid overflow on huge integers
                let bits = m.bits();
                if bits <= 52 {
                    let v: f64 = m.to_string().parse().unwrap_or(1.0);
                    v.max(1.0).ln()
                } else {
                    let s = m.to_string();
                    let lead: f64 = s[..15.min(s.len())].parse().unwrap_or(1.0);
                    lead.ln() + (s.len() - 15.min(s.len())) as f64 * std::f64::consts::LN_10
                }
            }
        }
    }
}

impl fmt::Display for CurvePoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CurvePoint::Infinity => write!(f, "O"),
            CurvePoint::Affine { x, y } => write!(f, "({}, {})", x, y),
        }
    }
}
