//! Canonical (Néron–Tate) heights on Mordell curves over ℚ.
//!
//! The height is assembled from local data on a sixth-power-reduced integral
//! model Y² = X³ + D:
//!
//! ```text
//!   ĥ(P) = λ_∞(P) + 2·log B + Σ_{p | 6D, p ∤ B} μ_p(P)·log p ,      x(P) = A/B²
//! ```
//!
//! where λ_∞ is the archimedean local height (patch-switching series) and
//! μ_p is an exact rational exponent computed by case analysis, with a
//! duplication contraction at p ∈ {2, 3}. The `2·log B` term absorbs every
//! pole contribution, which is why primes dividing B are skipped in the sum.
//!
//! Two normalizations are in circulation. [`Normalization::Full`] satisfies
//! ĥ(P) = lim 4^{-N}·h(x(2^N P)) with h the naive height of the
//! x-coordinate; [`Normalization::Halved`] is exactly half that. Full is the
//! default and is what the regulator values in this crate refer to.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use astro_float::BigFloat;

use crate::bigfloat::RealCtx;
use crate::curve::{CurvePoint, MordellCurve};
use crate::factor::FactorCache;
use crate::padic::{Exhausted, Padic, PadicCtx};
use crate::rational::{exact_isqrt, rat, valuation, valuation_int};
use crate::{Error, Result};

/// Smallest usable working precision, in decimal digits.
pub const MIN_PRECISION: u32 = 20;
/// Default working precision, in decimal digits.
pub const DEFAULT_PRECISION: u32 = 50;

/// Doublings attempted before declaring a singular orbit persistent. Each
/// step divides the unresolved tail by 4, so 8 steps leave a window of
/// 24/4⁸ < 1/2000, far below the 1/12 lattice spacing of μ values.
const MAX_CONTRACTIONS: usize = 8;

/// Outcome of a duplication-contraction run at p ∈ {2, 3}.
enum Contraction {
    /// The orbit reached a closed-form case; μ is fully determined.
    Resolved(BigRational),
    /// Still singular after the iteration cap: μ ∈ acc + scl·[−24, 0].
    Persistent { acc: BigRational, scl: BigRational },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Normalization {
    /// ĥ(P) = lim 4^{-N} h(x(2^N P)). Doubling multiplies heights by 4.
    #[default]
    Full,
    /// Half of [`Normalization::Full`].
    Halved,
}

/// A sixth-power-reduced integral model Y² = X³ + D of y² = x³ + d, with the
/// change of coordinates X = u²x, Y = u³y for a rational scale u (so
/// D = u⁶·d).
#[derive(Clone, Debug)]
pub struct IntegralModel {
    d_int: BigInt,
    scale: BigRational,
    /// Primes dividing 6D, sorted ascending: the only places where a
    /// non-pole local height can be nonzero.
    disc_primes: Vec<BigInt>,
    curve: MordellCurve,
}

impl IntegralModel {
    pub fn d_int(&self) -> &BigInt {
        &self.d_int
    }

    /// The coordinate scale u.
    pub fn scale(&self) -> &BigRational {
        &self.scale
    }

    pub fn disc_primes(&self) -> &[BigInt] {
        &self.disc_primes
    }

    /// The integral model as a curve in its own right.
    pub fn integral_curve(&self) -> &MordellCurve {
        &self.curve
    }

    /// Carry a point of the original curve onto the integral model.
    pub fn to_integral(&self, p: &CurvePoint) -> CurvePoint {
        match p {
            CurvePoint::Infinity => CurvePoint::Infinity,
            CurvePoint::Affine { x, y } => {
                let u2 = &self.scale * &self.scale;
                let u3 = &u2 * &self.scale;
                CurvePoint::Affine {
                    x: x * &u2,
                    y: y * &u3,
                }
            }
        }
    }

    /// Inverse of [`Self::to_integral`].
    pub fn from_integral(&self, p: &CurvePoint) -> CurvePoint {
        match p {
            CurvePoint::Infinity => CurvePoint::Infinity,
            CurvePoint::Affine { x, y } => {
                let u2 = &self.scale * &self.scale;
                let u3 = &u2 * &self.scale;
                CurvePoint::Affine {
                    x: x / &u2,
                    y: y / &u3,
                }
            }
        }
    }
}

/// Shared state for height computations: working precision, normalization
/// convention, and a factorization cache.
///
/// Not `Sync`; clone one per worker for parallel use.
#[derive(Clone)]
pub struct HeightContext {
    real: RealCtx,
    normalization: Normalization,
    factors: FactorCache,
}

impl HeightContext {
    pub fn new(precision_digits: u32) -> Result<Self> {
        if precision_digits < MIN_PRECISION {
            return Err(Error::PrecisionTooLow {
                got: precision_digits,
                min: MIN_PRECISION,
            });
        }
        Ok(HeightContext {
            real: RealCtx::new(precision_digits),
            normalization: Normalization::Full,
            factors: FactorCache::new(),
        })
    }

    pub fn with_normalization(mut self, n: Normalization) -> Self {
        self.normalization = n;
        self
    }

    pub fn precision(&self) -> u32 {
        self.real.digits()
    }

    pub fn normalization(&self) -> Normalization {
        self.normalization
    }

    pub fn real(&self) -> &RealCtx {
        &self.real
    }

    fn norm_factor(&self, v: BigFloat) -> BigFloat {
        match self.normalization {
            Normalization::Full => v,
            Normalization::Halved => self.real.mul(&v, &self.real.from_ratio(&rat(1, 2))),
        }
    }

    /// Build the sixth-power-reduced integral model for y² = x³ + d.
    pub fn integralize(&self, d: &BigRational) -> Result<IntegralModel> {
        integralize(&self.factors, d)
    }

    /// Archimedean local height λ_∞ of an integral-model point, in the Full
    /// convention scaled by the context's normalization.
    pub fn local_height_arch(&self, model: &IntegralModel, p: &CurvePoint) -> Result<BigFloat> {
        let x = match p {
            CurvePoint::Infinity => return Err(Error::HeightAtInfinity),
            CurvePoint::Affine { x, .. } => x,
        };
        let lam = self.lam_inf_raw(model.d_int(), x)?;
        Ok(self.norm_factor(lam))
    }

    /// The series core: Full-convention λ_∞ for x(P) on Y² = X³ + D.
    fn lam_inf_raw(&self, d_int: &BigInt, x: &BigRational) -> Result<BigFloat> {
        let r = &self.real;
        // b-invariants of the model and of its shift X ↦ X + 1.
        let d_f = r.from_bigint(d_int);
        let four = r.from_i64(4);
        let b6 = r.mul(&four, &d_f);
        let b2s = r.from_i64(-12);
        let b4s = r.from_i64(6);
        let b6s = r.sub(&b6, &four);
        let b8s = r.add(&r.mul(&r.from_i64(-12), &d_f), &r.from_i64(3));

        let xf = r.from_ratio(x);
        let half = r.from_ratio(&rat(1, 2));
        // Start on the patch where the series contracts.
        let (mut t, mut beta) = if r.cmp(&r.abs(&xf), &half) != std::cmp::Ordering::Less {
            (r.div(&r.one(), &xf), true)
        } else {
            (r.div(&r.one(), &r.add(&xf, &r.one())), false)
        };
        let mut lam = r.neg(&r.ln(&r.abs(&t)));

        let quarter = r.from_ratio(&rat(1, 4));
        let two = r.from_i64(2);
        let nterms = (self.real.digits() as usize + 12) * 17 / 10 + 32;
        let mut weight = r.one();
        for _ in 0..nterms {
            weight = r.mul(&weight, &quarter);
            // Duplication on the current patch:
            //   main:    w = t(4 + b6·t³)            z = 1 − t³(2·b6·t⁰… )
            //   shifted: full b-coefficient Horner forms.
            let (w, z) = if beta {
                let w = {
                    // t·(4 + t·(0 + t·(0 + t·b6)))
                    let inner = r.mul(&t, &b6);
                    let inner = r.mul(&t, &inner);
                    let inner = r.mul(&t, &inner);
                    r.mul(&t, &r.add(&four, &inner))
                };
                let z = {
                    // 1 − t²·(0 + t·(2·b6 + t·0))
                    let tb = r.mul(&t, &r.mul(&two, &b6));
                    let t2 = r.mul(&t, &t);
                    r.sub(&r.one(), &r.mul(&t2, &tb))
                };
                (w, z)
            } else {
                let w = {
                    // t·(4 + t·(b2s + t·(2·b4s + t·b6s)))
                    let mut inner = r.mul(&t, &b6s);
                    inner = r.add(&r.mul(&two, &b4s), &inner);
                    inner = r.add(&b2s, &r.mul(&t, &inner));
                    r.mul(&t, &r.add(&four, &r.mul(&t, &inner)))
                };
                let z = {
                    // 1 − t²·(b4s + t·(2·b6s + t·b8s))
                    let mut inner = r.mul(&t, &b8s);
                    inner = r.add(&r.mul(&two, &b6s), &inner);
                    inner = r.add(&b4s, &r.mul(&t, &inner));
                    let t2 = r.mul(&t, &t);
                    r.sub(&r.one(), &r.mul(&t2, &inner))
                };
                (w, z)
            };
            // Stay on this patch while |w| ≤ 2|z|; otherwise switch, which
            // replaces z by z ± w.
            let stay = r.cmp(&r.abs(&w), &r.mul(&two, &r.abs(&z))) != std::cmp::Ordering::Greater;
            let zeff = if stay {
                z
            } else if beta {
                r.add(&z, &w)
            } else {
                r.sub(&z, &w)
            };
            if zeff.is_zero() {
                return Err(Error::ArchSeriesDiverged { cap: nterms });
            }
            lam = r.add(&lam, &r.mul(&weight, &r.ln(&r.abs(&zeff))));
            t = r.div(&w, &zeff);
            if !stay {
                beta = !beta;
            }
        }
        Ok(lam)
    }

    /// Exact exponent μ_p of the local height at a finite prime p on the
    /// integral model: λ_p = μ_p·log p in the Full convention. `p` must be
    /// prime. Normalization-independent.
    pub fn mu_exponent(
        &self,
        model: &IntegralModel,
        point: &CurvePoint,
        p: &BigInt,
    ) -> Result<BigRational> {
        let (x, y) = match point {
            CurvePoint::Infinity => return Err(Error::HeightAtInfinity),
            CurvePoint::Affine { x, y } => (x, y),
        };
        let d = model.d_int();
        if let Some(v) = Self::classify(d, x, y, p) {
            return Ok(v);
        }
        // Remaining case: singular reduction at p ∈ {2, 3}, resolved by the
        // duplication contraction μ(P) = (μ(2P) − v_p(4y²))/4. Only the
        // valuations along the doubling orbit matter, so the orbit is traced
        // in p-adic arithmetic — exact coordinates quadruple in digit count
        // per doubling, which makes persistent orbits ruinously slow. If a
        // cancellation ever outruns the working precision, retry with more
        // digits; past a generous cap fall back to exact arithmetic.
        let mut prec = 96u32;
        let contraction = loop {
            match Self::contract_padic(x, y, p, prec) {
                Ok(c) => break c,
                Err(Exhausted) => {
                    if prec >= 1 << 16 {
                        break Self::contract_exact(d, model.integral_curve(), point, p);
                    }
                    prec *= 2;
                }
            }
        };
        let (acc, scl) = match contraction {
            Contraction::Resolved(v) => return Ok(v),
            Contraction::Persistent { acc, scl } => (acc, scl),
        };
        // Persistently singular orbit: μ lies in acc + scale·[−24, 0] and in
        // (1/12)ℤ; the window is far narrower than the lattice spacing, so
        // round to the unique candidate.
        let lo = &acc - &scl * rat(24, 1);
        let twelve = BigInt::from(12);
        let k = (&acc * BigRational::from(twelve.clone())).floor();
        let cand = k / BigRational::from(twelve);
        assert!(
            cand >= lo && cand <= acc,
            "local height lattice rounding failed at p = {p}"
        );
        Ok(cand)
    }

    /// The contraction orbit in p-adic arithmetic. The orbit never meets
    /// infinity or a 2-torsion point: the start survived classification, so
    /// it is affine with y ≠ 0, and a doubled point with y = 0 would force
    /// the start to have order 4 or 8, which Mordell curves do not carry.
    fn contract_padic(
        x: &BigRational,
        y: &BigRational,
        p: &BigInt,
        prec: u32,
    ) -> std::result::Result<Contraction, Exhausted> {
        let ctx = PadicCtx::new(p, prec);
        let mut acc = BigRational::zero();
        let mut scl = BigRational::one();
        let mut qx = ctx.from_rational(x);
        let mut qy = ctx.from_rational(y);
        let two = ctx.from_int(2);
        let three = ctx.from_int(3);
        for _ in 0..MAX_CONTRACTIONS {
            let two_y = ctx.mul(&two, &qy);
            let v4y2 = 2 * two_y.valuation().expect("y ≠ 0 along the contraction orbit");
            acc -= &scl * rat(v4y2, 4);
            scl /= rat(4, 1);
            // λ = 3x²/(2y), x' = λ² − 2x, y' = −(y + λ(x' − x))
            let lam = ctx.div(&ctx.mul(&three, &ctx.mul(&qx, &qx)), &two_y);
            let x2 = ctx.sub(&ctx.mul(&lam, &lam), &ctx.mul(&two, &qx))?;
            let y2 = ctx.neg(&ctx.add(&qy, &ctx.mul(&lam, &ctx.sub(&x2, &qx)?))?);
            qx = x2;
            qy = y2;
            if let Some(v) = Self::classify_padic(&qx, &qy, p) {
                return Ok(Contraction::Resolved(acc + &scl * v));
            }
        }
        Ok(Contraction::Persistent { acc, scl })
    }

    /// The same orbit in exact rational arithmetic; reference fallback.
    fn contract_exact(
        d: &BigInt,
        curve: &MordellCurve,
        point: &CurvePoint,
        p: &BigInt,
    ) -> Contraction {
        let mut acc = BigRational::zero();
        let mut scl = BigRational::one();
        let mut q = point.clone();
        let four = BigInt::from(4);
        for _ in 0..MAX_CONTRACTIONS {
            let qy = q.y().expect("contraction operand is affine");
            let v4y2 = valuation(&(BigRational::from(four.clone()) * qy * qy), p);
            acc -= &scl * rat(v4y2, 4);
            scl /= BigRational::from(four.clone());
            q = curve.double(&q);
            let (qx, qy) = match &q {
                CurvePoint::Infinity => unreachable!("2-torsion is classified before doubling"),
                CurvePoint::Affine { x, y } => (x, y),
            };
            if let Some(v) = Self::classify(d, qx, qy, p) {
                return Contraction::Resolved(acc + &scl * v);
            }
        }
        Contraction::Persistent { acc, scl }
    }

    /// Classification of an orbit point from valuations alone. Infinity,
    /// y = 0, and p ≥ 5 cannot occur here (see `contract_padic`), leaving
    /// the pole, nonsingular, and still-singular cases.
    fn classify_padic(x: &Padic, y: &Padic, p: &BigInt) -> Option<BigRational> {
        if let Some(v) = x.valuation() {
            if v < 0 {
                return Some(rat_i64(-v));
            }
        }
        let singular = if *p == BigInt::from(2) {
            // singular point has X ≡ 0 (mod 2)
            x.valuation().map_or(true, |v| v >= 1)
        } else {
            // p = 3: singular point has Y ≡ 0 (mod 3)
            y.valuation().map_or(true, |v| v >= 1)
        };
        if singular {
            None
        } else {
            Some(BigRational::zero())
        }
    }

    /// The closed-form μ_p cases; `None` means "singular at p ∈ {2,3}",
    /// which needs the contraction loop.
    fn classify(d: &BigInt, x: &BigRational, y: &BigRational, p: &BigInt) -> Option<BigRational> {
        if !x.is_zero() && valuation(x, p) < 0 {
            return Some(rat_i64(-valuation(x, p)));
        }
        if y.is_zero() {
            // 2-torsion: tripling gives μ = −v_p(ψ₃)/4 with ψ₃ = 3x(x³+4D).
            let df = BigRational::from(d.clone());
            let psi3 = BigRational::from(BigInt::from(3))
                * x
                * (x * x * x + BigRational::from(BigInt::from(4)) * &df);
            return Some(rat_i64(-valuation(&psi3, p)) / BigRational::from(BigInt::from(4)));
        }
        if !Self::singular_at(x, y, p) {
            return Some(BigRational::zero());
        }
        if *p >= BigInt::from(5) {
            let vd = valuation_int(d, p) as i64;
            return Some(rat_i64(-vd) / BigRational::from(BigInt::from(3)));
        }
        None
    }

    /// Does P reduce to the singular point of Y² = X³ + D mod p? The
    /// coordinates are p-integral here (poles are handled first).
    fn singular_at(x: &BigRational, y: &BigRational, p: &BigInt) -> bool {
        let two = BigInt::from(2);
        let three = BigInt::from(3);
        if *p == two {
            // singular point has X ≡ 0 (mod 2)
            x.is_zero() || valuation(x, p) >= 1
        } else if *p == three {
            // singular point has Y ≡ 0 (mod 3)
            y.is_zero() || valuation(y, p) >= 1
        } else {
            (x.is_zero() || valuation(x, p) >= 1) && (y.is_zero() || valuation(y, p) >= 1)
        }
    }

    /// Local height at a finite prime, in the context's normalization.
    pub fn local_height_nonarch(
        &self,
        model: &IntegralModel,
        point: &CurvePoint,
        p: &BigInt,
    ) -> Result<BigFloat> {
        let mu = self.mu_exponent(model, point, p)?;
        let r = &self.real;
        let v = r.mul(&r.from_ratio(&mu), &r.ln(&r.from_bigint(p)));
        Ok(self.norm_factor(v))
    }

    /// The canonical height ĥ(P). Zero exactly on torsion (including O).
    pub fn canonical_height(&self, curve: &MordellCurve, p: &CurvePoint) -> Result<BigFloat> {
        if !curve.on_curve(p) {
            if let CurvePoint::Affine { x, y } = p {
                return Err(Error::PointNotOnCurve {
                    x: x.clone(),
                    y: y.clone(),
                });
            }
        }
        if curve.is_torsion(p) {
            return Ok(self.real.zero());
        }
        let model = self.integralize(curve.d())?;
        let xp = model.to_integral(p);
        let x = xp.x().expect("non-torsion point is affine");

        let b2 = x.denom().clone();
        debug_assert!(
            exact_isqrt(&b2).is_some(),
            "x-denominator must be a square on an integral model"
        );
        let r = &self.real;
        let mut h = self.lam_inf_raw(model.d_int(), x)?;
        h = r.add(&h, &r.ln(&r.from_bigint(&b2)));
        for q in model.disc_primes() {
            if (&b2 % q).is_zero() {
                continue; // pole at q: already inside the log B² term
            }
            let mu = self.mu_exponent(&model, &xp, q)?;
            if !mu.is_zero() {
                h = r.add(&h, &r.mul(&r.from_ratio(&mu), &r.ln(&r.from_bigint(q))));
            }
        }
        Ok(self.norm_factor(h))
    }

    /// Néron–Tate pairing ⟨P, Q⟩ = (ĥ(P+Q) − ĥ(P) − ĥ(Q))/2.
    pub fn nt_pairing(
        &self,
        curve: &MordellCurve,
        p: &CurvePoint,
        q: &CurvePoint,
    ) -> Result<BigFloat> {
        let r = &self.real;
        let hpq = self.canonical_height(curve, &curve.add(p, q))?;
        let hp = self.canonical_height(curve, p)?;
        let hq = self.canonical_height(curve, q)?;
        let num = r.sub(&r.sub(&hpq, &hp), &hq);
        Ok(r.mul(&num, &r.from_ratio(&rat(1, 2))))
    }

    /// Naive height of the x-coordinate: log max(|num x|, den x), and 0 at
    /// infinity. Normalization-independent.
    pub fn naive_height_x(&self, p: &CurvePoint) -> BigFloat {
        match p {
            CurvePoint::Infinity => self.real.zero(),
            CurvePoint::Affine { x, .. } => {
                let n = x.numer().abs();
                let d = x.denom().abs();
                let m = if n > d { n } else { d };
                if m <= BigInt::one() {
                    return self.real.zero();
                }
                self.real.ln(&self.real.from_bigint(&m))
            }
        }
    }

    /// Slowly converging definition-level estimate ĥ ≈ 4^{-N}·h(x(2^N P)),
    /// for cross-checking the series implementation. Exact coordinates blow
    /// up doubly exponentially, so keep `iters` small (≤ 6 or so).
    pub fn doubling_limit_estimate(
        &self,
        curve: &MordellCurve,
        p: &CurvePoint,
        iters: u32,
    ) -> Result<BigFloat> {
        let mut q = p.clone();
        for _ in 0..iters {
            q = curve.double(&q);
        }
        if q.is_infinity() {
            return Ok(self.real.zero());
        }
        let r = &self.real;
        let mut est = self.naive_height_x(&q);
        let quarter = r.from_ratio(&rat(1, 4));
        for _ in 0..iters {
            est = r.mul(&est, &quarter);
        }
        Ok(self.norm_factor(est))
    }
}

fn rat_i64(v: i64) -> BigRational {
    BigRational::from(BigInt::from(v))
}

/// Build the sixth-power-reduced integral model Y² = X³ + D for y² = x³ + d.
pub fn integralize(factors: &FactorCache, d: &BigRational) -> Result<IntegralModel> {
    if d.is_zero() {
        return Err(Error::ZeroCurveCoefficient);
    }
    // u₀ clears the denominator: u₀ = Π p^⌈e/6⌉ over den(d).
    let den_factors = factors.factorize(d.denom())?;
    let mut u0 = BigInt::one();
    for (p, e) in &den_factors {
        u0 *= p.pow(e.div_ceil(6));
    }
    let u0_6 = u0.pow(6u32);
    let d_num = d.numer() * &u0_6 / d.denom();

    // Factor D by merging: factors(|D|) = factors(|num d|) + 6·factors(u₀)
    // − factors(den d). Cheaper than factoring the possibly huge D.
    let mut exps: std::collections::BTreeMap<BigInt, i64> = Default::default();
    for (p, e) in factors.factorize(d.numer())? {
        *exps.entry(p).or_insert(0) += e as i64;
    }
    for (p, e) in factors.factorize(&u0)? {
        *exps.entry(p).or_insert(0) += 6 * e as i64;
    }
    for (p, e) in den_factors {
        *exps.entry(p).or_insert(0) -= e as i64;
    }
    exps.retain(|_, e| *e != 0);
    debug_assert!(exps.values().all(|&e| e > 0));

    // Sixth-power reduction: p^{6k} | D moves into the scale.
    let mut d_int = d_num;
    let mut scale = BigRational::from(u0);
    for (p, e) in exps.iter_mut() {
        let k = (*e / 6) as u32;
        if k > 0 {
            d_int /= p.pow(6 * k);
            scale /= BigRational::from(p.pow(k));
            *e -= 6 * k as i64;
        }
    }
    exps.retain(|_, e| *e != 0);

    let mut disc_primes: Vec<BigInt> = exps.into_keys().collect();
    for small in [BigInt::from(2), BigInt::from(3)] {
        if !disc_primes.contains(&small) {
            disc_primes.push(small);
        }
    }
    disc_primes.sort();

    let curve = MordellCurve::new(BigRational::from(d_int.clone()))?;
    Ok(IntegralModel {
        d_int,
        scale,
        disc_primes,
        curve,
    })
}
