//! Minimal p-adic arithmetic with explicit precision tracking.
//!
//! Used by the local-height contraction at p = 2 and 3, where only the
//! valuations along a doubling orbit matter. A value is `p^v · unit` with
//! the unit known modulo p^prec; multiplication and division are lossless,
//! while an equal-valuation addition can cancel leading digits and consume
//! precision. When too few digits remain to pin down a valuation, operations
//! report exhaustion and the caller retries at higher precision (the true
//! values are fixed nonzero rationals, so some precision always suffices).

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::rational::valuation_int;

/// A cancellation left too few known digits to continue.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) struct Exhausted;

pub(crate) struct PadicCtx {
    p: BigInt,
    /// Units are stored in ℤ/p^k.
    k: u32,
    pk: BigInt,
    /// Give up once a value's correct-digit count falls below this.
    floor: u32,
}

/// `p^v · unit` with `unit` a p-adic unit correct modulo p^prec, or exact 0.
#[derive(Clone, Debug, PartialEq, Eq)]
pub(crate) enum Padic {
    Zero,
    Val { v: i64, unit: BigInt, prec: u32 },
}

impl Padic {
    pub(crate) fn valuation(&self) -> Option<i64> {
        match self {
            Padic::Zero => None,
            Padic::Val { v, .. } => Some(*v),
        }
    }

    #[cfg(test)]
    pub(crate) fn is_zero(&self) -> bool {
        matches!(self, Padic::Zero)
    }
}

impl PadicCtx {
    pub(crate) fn new(p: &BigInt, k: u32) -> Self {
        let pk = p.pow(k);
        PadicCtx {
            p: p.clone(),
            k,
            pk,
            floor: 8,
        }
    }

    /// Decompose an exact rational: full stored precision.
    pub(crate) fn from_rational(&self, q: &BigRational) -> Padic {
        if q.is_zero() {
            return Padic::Zero;
        }
        let vn = valuation_int(q.numer(), &self.p);
        let vd = valuation_int(q.denom(), &self.p);
        let un = q.numer() / self.p.pow(vn);
        let ud = q.denom() / self.p.pow(vd);
        let unit = (un * self.invert(&ud)).mod_floor(&self.pk);
        Padic::Val {
            v: vn as i64 - vd as i64,
            unit,
            prec: self.k,
        }
    }

    pub(crate) fn from_int(&self, n: i64) -> Padic {
        self.from_rational(&BigRational::from_integer(BigInt::from(n)))
    }

    /// Inverse of a unit modulo p^k.
    fn invert(&self, u: &BigInt) -> BigInt {
        let e = u.extended_gcd(&self.pk);
        debug_assert!(e.gcd.is_one() || e.gcd == -BigInt::one());
        if e.gcd.is_one() {
            e.x.mod_floor(&self.pk)
        } else {
            (-e.x).mod_floor(&self.pk)
        }
    }

    pub(crate) fn mul(&self, a: &Padic, b: &Padic) -> Padic {
        match (a, b) {
            (Padic::Zero, _) | (_, Padic::Zero) => Padic::Zero,
            (
                Padic::Val { v: va, unit: ua, prec: pa },
                Padic::Val { v: vb, unit: ub, prec: pb },
            ) => Padic::Val {
                v: va + vb,
                unit: (ua * ub).mod_floor(&self.pk),
                prec: (*pa).min(*pb),
            },
        }
    }

    /// Division; the divisor must be nonzero.
    pub(crate) fn div(&self, a: &Padic, b: &Padic) -> Padic {
        match (a, b) {
            (_, Padic::Zero) => panic!("p-adic division by zero"),
            (Padic::Zero, _) => Padic::Zero,
            (
                Padic::Val { v: va, unit: ua, prec: pa },
                Padic::Val { v: vb, unit: ub, prec: pb },
            ) => Padic::Val {
                v: va - vb,
                unit: (ua * self.invert(ub)).mod_floor(&self.pk),
                prec: (*pa).min(*pb),
            },
        }
    }

    pub(crate) fn neg(&self, a: &Padic) -> Padic {
        match a {
            Padic::Zero => Padic::Zero,
            Padic::Val { v, unit, prec } => Padic::Val {
                v: *v,
                unit: (-unit).mod_floor(&self.pk),
                prec: *prec,
            },
        }
    }

    pub(crate) fn add(&self, a: &Padic, b: &Padic) -> Result<Padic, Exhausted> {
        let (lo, hi) = match (a, b) {
            (Padic::Zero, _) => return Ok(b.clone()),
            (_, Padic::Zero) => return Ok(a.clone()),
            (Padic::Val { v: va, .. }, Padic::Val { v: vb, .. }) => {
                if va <= vb {
                    (a, b)
                } else {
                    (b, a)
                }
            }
        };
        let (vl, ul, pl) = match lo {
            Padic::Val { v, unit, prec } => (*v, unit, *prec),
            Padic::Zero => unreachable!(),
        };
        let (vh, uh, ph) = match hi {
            Padic::Val { v, unit, prec } => (*v, unit, *prec),
            Padic::Zero => unreachable!(),
        };
        let diff = (vh - vl) as u32;
        if diff > 0 {
            // The result keeps the lower valuation and stays a unit.
            let shifted = if diff >= self.k {
                BigInt::zero()
            } else {
                (uh * self.p.pow(diff)).mod_floor(&self.pk)
            };
            let unit = (ul + shifted).mod_floor(&self.pk);
            let prec = pl.min(ph.saturating_add(diff)).min(self.k);
            return Ok(Padic::Val { v: vl, unit, prec });
        }
        // Equal valuations: the sum can cancel p-adic digits.
        let m = pl.min(ph);
        let s = (ul + uh).mod_floor(&self.pk);
        let pm = self.p.pow(m);
        if s.mod_floor(&pm).is_zero() {
            // Cancellation beyond the known digits: could be zero, could be
            // any deeper valuation.
            return Err(Exhausted);
        }
        let j = valuation_int(&s, &self.p);
        let prec = m - j;
        if prec < self.floor {
            return Err(Exhausted);
        }
        Ok(Padic::Val {
            v: vl + j as i64,
            unit: (s / self.p.pow(j)).mod_floor(&self.pk),
            prec,
        })
    }

    pub(crate) fn sub(&self, a: &Padic, b: &Padic) -> Result<Padic, Exhausted> {
        self.add(a, &self.neg(b))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::rat;

    fn two() -> BigInt {
        BigInt::from(2)
    }

    fn three() -> BigInt {
        BigInt::from(3)
    }

    #[test]
    fn decomposition_and_valuation() {
        let ctx = PadicCtx::new(&two(), 64);
        assert_eq!(ctx.from_rational(&rat(12, 1)).valuation(), Some(2));
        assert_eq!(ctx.from_rational(&rat(5, 8)).valuation(), Some(-3));
        assert_eq!(ctx.from_rational(&rat(-48, 7)).valuation(), Some(4));
        assert!(ctx.from_rational(&rat(0, 1)).is_zero());
        let ctx3 = PadicCtx::new(&three(), 64);
        assert_eq!(ctx3.from_rational(&rat(18, 5)).valuation(), Some(2));
    }

    #[test]
    fn ring_ops_match_exact_valuations() {
        let ctx = PadicCtx::new(&three(), 64);
        let a = ctx.from_rational(&rat(15, 2)); // v=1
        let b = ctx.from_rational(&rat(6, 1)); // v=1
        // 15/2 · 6 = 45, v=2
        assert_eq!(ctx.mul(&a, &b).valuation(), Some(2));
        // 15/2 ÷ 6 = 5/4, v=0
        assert_eq!(ctx.div(&a, &b).valuation(), Some(0));
        // 15/2 + 6 = 27/2, v=3: equal-valuation cancellation resolved
        assert_eq!(ctx.add(&a, &b).unwrap().valuation(), Some(3));
        // 15/2 − 6 = 3/2, v=1
        assert_eq!(ctx.sub(&a, &b).unwrap().valuation(), Some(1));
    }

    #[test]
    fn unit_digits_survive_round_trips() {
        let ctx = PadicCtx::new(&two(), 64);
        let a = ctx.from_rational(&rat(7, 5));
        let b = ctx.from_rational(&rat(5, 7));
        let prod = ctx.mul(&a, &b);
        match prod {
            Padic::Val { v, ref unit, .. } => {
                assert_eq!(v, 0);
                assert!(unit.is_one());
            }
            Padic::Zero => panic!("nonzero product"),
        }
    }

    #[test]
    fn exact_cancellation_exhausts() {
        let ctx = PadicCtx::new(&two(), 32);
        let a = ctx.from_rational(&rat(3, 1));
        let b = ctx.from_rational(&rat(-3, 1));
        assert_eq!(ctx.add(&a, &b), Err(Exhausted));
    }

    #[test]
    fn deep_cancellation_exhausts_at_low_precision() {
        // 1 + (2^30 − 1) = 2^30: resolvable at k=64, exhausted at k=16.
        let one_plus = rat(1, 1);
        let near = rat((1i64 << 30) - 1, 1);
        let wide = PadicCtx::new(&two(), 64);
        let got = wide
            .add(&wide.from_rational(&one_plus), &wide.from_rational(&near))
            .unwrap();
        assert_eq!(got.valuation(), Some(30));
        let narrow = PadicCtx::new(&two(), 16);
        assert_eq!(
            narrow.add(
                &narrow.from_rational(&one_plus),
                &narrow.from_rational(&near)
            ),
            Err(Exhausted)
        );
    }

    #[test]
    fn mixed_valuation_addition_is_lossless() {
        let ctx = PadicCtx::new(&two(), 64);
        let a = ctx.from_rational(&rat(1, 4)); // v=-2
        let b = ctx.from_rational(&rat(96, 1)); // v=5
        let s = ctx.add(&a, &b).unwrap();
        // 1/4 + 96 = 385/4, v = −2
        assert_eq!(s.valuation(), Some(-2));
        match s {
            Padic::Val { prec, .. } => assert_eq!(prec, 64),
            Padic::Zero => panic!(),
        }
    }
}
