//! Integer factorization sized for this crate's workloads: trial division
//! handles the small smooth numbers the curve family produces, with
//! deterministic Miller–Rabin and Brent's rho behind it so unusually large
//! inputs still resolve (or fail loudly) instead of hanging.

use std::cell::RefCell;
use std::collections::{BTreeMap, HashMap};

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};

use crate::{Error, Result};

const TRIAL_BOUND: u64 = 1_000_000;
/// Total modular-multiplication budget across one factorize() call. Brent's
/// rho splits 40-digit semiprimes well inside this; anything that exhausts it
/// is outside the sizes this crate is meant for.
const RHO_BUDGET: u64 = 50_000_000;

/// Deterministic Miller–Rabin. The witness set {2, 3, ..., 37} is proven
/// deterministic below 3.3·10²⁴, far beyond anything factorize() leaves
/// unsplit; above that it is still a strong probable-prime test.
pub fn is_prime(n: &BigUint) -> bool {
    const SMALL: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
    if n < &BigUint::from(2u32) {
        return false;
    }
    for &p in &SMALL {
        let pb = BigUint::from(p);
        if *n == pb {
            return true;
        }
        if (n % &pb).is_zero() {
            return false;
        }
    }
    let one = BigUint::one();
    let n_minus_1 = n - &one;
    let s = n_minus_1.trailing_zeros().expect("n > 2 is odd here");
    let d = &n_minus_1 >> s;
    'witness: for &a in &SMALL {
        let mut x = BigUint::from(a).modpow(&d, n);
        if x.is_one() || x == n_minus_1 {
            continue;
        }
        for _ in 1..s {
            x = (&x * &x) % n;
            if x == n_minus_1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// Brent-cycle Pollard rho with polynomial x² + c. Deterministic: no RNG,
/// the caller sweeps c = 1, 2, 3, ... Returns a nontrivial factor, or None
/// if this c fails or the shared budget runs out.
fn rho_brent(n: &BigUint, c: u64, budget: &mut u64) -> Option<BigUint> {
    let c = BigUint::from(c);
    let step = |x: &BigUint| (x * x + &c) % n;
    let mut y = BigUint::from(2u32);
    let mut r: u64 = 1;
    let mut q = BigUint::one();
    let batch: u64 = 128;
    let mut g = BigUint::one();
    let mut x = y.clone();
    let mut ys = y.clone();
    while g.is_one() {
        x = y.clone();
        for _ in 0..r {
            if *budget == 0 {
                return None;
            }
            *budget -= 1;
            y = step(&y);
        }
        let mut k: u64 = 0;
        while k < r && g.is_one() {
            ys = y.clone();
            for _ in 0..batch.min(r - k) {
                if *budget == 0 {
                    return None;
                }
                *budget -= 1;
                y = step(&y);
                let diff = if x > y { &x - &y } else { &y - &x };
                q = (q * diff) % n;
            }
            g = q.gcd(n);
            k += batch;
        }
        r *= 2;
    }
    if g == *n {
        // The batched gcd collapsed; replay one step at a time.
        loop {
            if *budget == 0 {
                return None;
            }
            *budget -= 1;
            ys = step(&ys);
            let diff = if x > ys { &x - &ys } else { &ys - &x };
            g = diff.gcd(n);
            if !g.is_one() {
                break;
            }
        }
    }
    if g == *n || g.is_one() {
        None
    } else {
        Some(g)
    }
}

fn trial_divide_u128(mut v: u128, out: &mut BTreeMap<BigUint, u32>) -> u128 {
    let mut p: u64 = 2;
    while p <= TRIAL_BOUND {
        let pw = p as u128;
        if pw * pw > v {
            break;
        }
        while v % pw == 0 {
            v /= pw;
            *out.entry(BigUint::from(p)).or_insert(0) += 1;
        }
        p = match p {
            2 => 3,
            3 => 5,
            _ if p % 6 == 5 => p + 2,
            _ => p + 4,
        };
    }
    v
}

fn trial_divide_big(mut v: BigUint, out: &mut BTreeMap<BigUint, u32>) -> BigUint {
    let mut p: u64 = 2;
    while p <= TRIAL_BOUND {
        if let Some(small) = v.to_u128() {
            return trial_divide_u128_from(small, p, out);
        }
        let pb = BigUint::from(p);
        while (&v % &pb).is_zero() {
            v /= &pb;
            *out.entry(pb.clone()).or_insert(0) += 1;
        }
        p = match p {
            2 => 3,
            3 => 5,
            _ if p % 6 == 5 => p + 2,
            _ => p + 4,
        };
    }
    v
}

fn trial_divide_u128_from(mut v: u128, start: u64, out: &mut BTreeMap<BigUint, u32>) -> BigUint {
    let mut p = start;
    while p <= TRIAL_BOUND {
        let pw = p as u128;
        if pw * pw > v {
            break;
        }
        while v % pw == 0 {
            v /= pw;
            *out.entry(BigUint::from(p)).or_insert(0) += 1;
        }
        p = match p {
            2 => 3,
            3 => 5,
            _ if p % 6 == 5 => p + 2,
            _ => p + 4,
        };
    }
    BigUint::from(v)
}

/// Factor |n| into sorted (prime, exponent) pairs. |n| = 1 gives an empty
/// list. The sign is the caller's business.
///
/// # Panics
/// On n = 0, which has no factorization.
pub fn factorize(n: &BigInt) -> Result<Vec<(BigInt, u32)>> {
    assert!(!n.is_zero(), "factorize(0) is undefined");
    let mut out: BTreeMap<BigUint, u32> = BTreeMap::new();
    let cofactor = match n.magnitude().to_u128() {
        Some(v) => BigUint::from(trial_divide_u128(v, &mut out)),
        None => trial_divide_big(n.magnitude().clone(), &mut out),
    };

    let mut budget = RHO_BUDGET;
    let mut stack = vec![cofactor];
    while let Some(v) = stack.pop() {
        if v.is_one() {
            continue;
        }
        if is_prime(&v) {
            *out.entry(v).or_insert(0) += 1;
            continue;
        }
        let mut split = None;
        for c in 1..=64u64 {
            if budget == 0 {
                break;
            }
            if let Some(f) = rho_brent(&v, c, &mut budget) {
                split = Some(f);
                break;
            }
        }
        match split {
            Some(f) => {
                stack.push(&v / &f);
                stack.push(f);
            }
            None => {
                return Err(Error::FactorBudgetExceeded {
                    composite: BigInt::from(v),
                })
            }
        }
    }
    Ok(out.into_iter().map(|(p, e)| (BigInt::from(p), e)).collect())
}

/// Memoizing wrapper around [`factorize`]. Interior mutability keeps the
/// call sites `&self`; the cache is intentionally not shared across threads
/// (each worker clones its own).
#[derive(Default, Clone)]
pub struct FactorCache {
    map: RefCell<HashMap<BigInt, Vec<(BigInt, u32)>>>,
}

impl FactorCache {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn factorize(&self, n: &BigInt) -> Result<Vec<(BigInt, u32)>> {
        if let Some(hit) = self.map.borrow().get(n) {
            return Ok(hit.clone());
        }
        let computed = factorize(n)?;
        self.map.borrow_mut().insert(n.clone(), computed.clone());
        Ok(computed)
    }
}
