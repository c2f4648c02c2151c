//! Rational point search and rank certification.
//!
//! The search works on the integral model Y² = X³ + D, where every rational
//! point has X = A/b² with gcd(A, b) = 1. Candidates are swept
//! denominator-major with cheap quadratic-residue filters in front of the
//! exact square-root test, and survivors are mapped back to the original
//! curve. Certification then feeds family points and search hits through a
//! greedy Gram-eigenvalue filter to produce a provable rank lower bound.

use std::time::{Duration, Instant};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive};

use astro_float::BigFloat;
use rayon::prelude::*;

use crate::curve::{CurvePoint, MordellCurve};
use crate::factor::FactorCache;
use crate::family::{specialize, stage_n};
use crate::gram::{jacobi_eigenvalues, lu_determinant, INDEPENDENCE_THRESHOLD};
use crate::heights::{integralize, HeightContext};
use crate::rational::{exact_isqrt, icbrt_floor};
use crate::Result;

/// Bounds for the point search.
#[derive(Clone, Debug)]
pub struct SearchConfig {
    /// Bound on b in X = A/b² (integral model coordinates).
    pub denom_bound: u32,
    /// Bound on |A|.
    pub numer_bound: i64,
    /// Wall-clock budget; exceeding it truncates the sweep.
    pub time_budget: Option<Duration>,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig {
            denom_bound: 30,
            numer_bound: 100_000,
            time_budget: None,
        }
    }
}

/// What a search produced.
#[derive(Clone, Debug)]
pub struct SearchOutcome {
    /// Points on the original curve, y ≥ 0, ascending naive height.
    pub points: Vec<CurvePoint>,
    /// True if the time budget cut the sweep short.
    pub truncated: bool,
}

/// Quadratic-residue tables modulo 64, 63, 65 and 11. A value that is a
/// square in ℤ is a square residue modulo each, so a single table miss
/// rejects a candidate without any big-integer work.
struct QrFilter {
    m64: [bool; 64],
    m63: [bool; 63],
    m65: [bool; 65],
    m11: [bool; 11],
}

impl QrFilter {
    fn new() -> Self {
        let mut f = QrFilter {
            m64: [false; 64],
            m63: [false; 63],
            m65: [false; 65],
            m11: [false; 11],
        };
        for i in 0..64u64 {
            f.m64[((i * i) % 64) as usize] = true;
        }
        for i in 0..63u64 {
            f.m63[((i * i) % 63) as usize] = true;
        }
        for i in 0..65u64 {
            f.m65[((i * i) % 65) as usize] = true;
        }
        for i in 0..11u64 {
            f.m11[((i * i) % 11) as usize] = true;
        }
        f
    }

    /// Is `a³ + c` possibly a square, judging by residues? `c` is the value
    /// of D·b⁶ reduced modulo each table size.
    fn admits(&self, a: i64, c: &[u64; 4]) -> bool {
        let t = |m: u64, cm: u64| -> u64 {
            let am = a.rem_euclid(m as i64) as u64;
            (am * am % m * am + cm) % m
        };
        self.m64[t(64, c[0]) as usize]
            && self.m63[t(63, c[1]) as usize]
            && self.m65[t(65, c[2]) as usize]
            && self.m11[t(11, c[3]) as usize]
    }
}

/// Search for rational points on y² = x³ + d within the configured bounds.
pub fn search_points(curve: &MordellCurve, cfg: &SearchConfig) -> Result<SearchOutcome> {
    let cache = FactorCache::new();
    let model = integralize(&cache, curve.d())?;
    let dd = model.d_int().clone();
    let filter = QrFilter::new();
    let start = Instant::now();

    let mut found: Vec<CurvePoint> = Vec::new();
    let mut truncated = false;

    'sweep: for b in 1..=cfg.denom_bound as i64 {
        let b_big = BigInt::from(b);
        let db6 = &dd * b_big.pow(6);
        // A³ ≥ −D·b⁶ keeps the radicand nonnegative.
        let lower = {
            let neg = -&db6;
            let c = icbrt_floor(&neg);
            let c = if c.pow(3) < neg { c + 1 } else { c };
            c.to_i64().unwrap_or(i64::MIN).max(-cfg.numer_bound)
        };
        if lower > cfg.numer_bound {
            continue;
        }
        // Residues of D·b⁶ for the filter moduli.
        let cmods: [u64; 4] = {
            let m = |k: u64| db6.mod_floor(&BigInt::from(k)).to_u64().unwrap();
            [m(64), m(63), m(65), m(11)]
        };
        let mut steps: u32 = 0;
        for a in lower..=cfg.numer_bound {
            steps = steps.wrapping_add(1);
            if steps & 0xFFFF == 0 {
                if let Some(budget) = cfg.time_budget {
                    if start.elapsed() > budget {
                        truncated = true;
                        break 'sweep;
                    }
                }
            }
            if b > 1 && a.gcd(&b) != 1 {
                continue;
            }
            if !filter.admits(a, &cmods) {
                continue;
            }
            let t = BigInt::from(a).pow(3) + &db6;
            if t.is_negative() {
                continue;
            }
            if let Some(y_num) = exact_isqrt(&t) {
                let x = BigRational::new(BigInt::from(a), b_big.pow(2));
                let y = BigRational::new(y_num, b_big.pow(3));
                let p = model
                    .integral_curve()
                    .point(x, y)
                    .expect("exact square root puts the point on the curve");
                found.push(model.from_integral(&p));
            }
        }
        if let Some(budget) = cfg.time_budget {
            if start.elapsed() > budget {
                truncated = true;
                break;
            }
        }
    }

    found.sort_by(|p, q| {
        p.naive_height_f64()
            .partial_cmp(&q.naive_height_f64())
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    Ok(SearchOutcome {
        points: found,
        truncated,
    })
}

/// A provable rank lower bound with the witnesses behind it.
pub struct RankCertificate {
    /// Independent points (a basis of the certified subgroup).
    pub basis: Vec<CurvePoint>,
    /// Number of eigenvalues of the basis Gram matrix above threshold, i.e.
    /// the certified lower bound for the Mordell–Weil rank.
    pub rank_lower_bound: usize,
    /// Regulator (Gram determinant) of the basis.
    pub regulator: BigFloat,
    /// Eigenvalues of the basis Gram matrix, ascending.
    pub eigenvalues: Vec<BigFloat>,
    /// Distinct candidate points examined (seeds plus search hits).
    pub num_candidates: usize,
    /// True if the underlying search was cut short by its time budget.
    pub truncated: bool,
}

/// Certify a rank lower bound for the curve by greedily extending a basis:
/// seeds first (in the given order), then search hits by ascending naive
/// height. A candidate joins the basis if it keeps the smallest Gram
/// eigenvalue above the independence threshold.
pub fn certify_rank(
    hctx: &HeightContext,
    curve: &MordellCurve,
    seeds: &[CurvePoint],
    cfg: &SearchConfig,
) -> Result<RankCertificate> {
    let outcome = search_points(curve, cfg)?;
    let mut candidates: Vec<CurvePoint> = Vec::new();
    for p in seeds.iter().chain(outcome.points.iter()) {
        let dup = candidates.iter().any(|q| q.x() == p.x());
        if !dup && !p.is_infinity() {
            candidates.push(p.clone());
        }
    }
    let num_candidates = candidates.len();

    let r = hctx.real();
    let half = r.from_ratio(&crate::rational::rat(1, 2));
    let mut basis: Vec<CurvePoint> = Vec::new();
    let mut heights: Vec<BigFloat> = Vec::new();
    let mut gram: Vec<Vec<BigFloat>> = Vec::new();
    for c in candidates {
        if curve.is_torsion(&c) {
            continue;
        }
        let hc = hctx.canonical_height(curve, &c)?;
        // Tentatively extend the Gram matrix by one row/column.
        let mut row = Vec::with_capacity(basis.len());
        for (b, hb) in basis.iter().zip(&heights) {
            let hsum = hctx.canonical_height(curve, &curve.add(b, &c))?;
            let v = r.mul(&r.sub(&r.sub(&hsum, hb), &hc), &half);
            row.push(v);
        }
        let k = basis.len() + 1;
        let mut trial = vec![vec![r.zero(); k]; k];
        for i in 0..k - 1 {
            for j in 0..k - 1 {
                trial[i][j] = gram[i][j].clone();
            }
            trial[i][k - 1] = row[i].clone();
            trial[k - 1][i] = row[i].clone();
        }
        trial[k - 1][k - 1] = hc.clone();
        let eigs = jacobi_eigenvalues(r, &trial);
        let min_eig = r.to_f64(&eigs[0]);
        if min_eig > INDEPENDENCE_THRESHOLD {
            basis.push(c);
            heights.push(hc);
            gram = trial;
        }
    }

    let (regulator, eigenvalues) = if basis.is_empty() {
        (r.zero(), Vec::new())
    } else {
        (lu_determinant(r, &gram), jacobi_eigenvalues(r, &gram))
    };
    let rank_lower_bound = eigenvalues
        .iter()
        .filter(|e| r.to_f64(e) > INDEPENDENCE_THRESHOLD)
        .count();
    Ok(RankCertificate {
        basis,
        rank_lower_bound,
        regulator,
        eigenvalues,
        num_candidates,
        truncated: outcome.truncated,
    })
}

/// A batch scan request over family parameter values.
#[derive(Clone, Debug)]
pub struct ScanRequest {
    pub n_values: Vec<BigRational>,
    pub precision: u32,
    pub search: SearchConfig,
}

/// One row of scan output. `error` is set (and the data fields empty) for
/// parameter values where the pipeline could not run to completion.
#[derive(Clone, Debug)]
pub struct ScanRow {
    pub n0: BigRational,
    pub d: Option<BigRational>,
    pub rank_lower_bound: Option<usize>,
    /// Regulator of the certified basis, as a decimal string.
    pub regulator: Option<String>,
    /// Distinct candidate points examined.
    pub num_points: Option<usize>,
    pub truncated: bool,
    pub error: Option<String>,
}

fn scan_one(n0: &BigRational, precision: u32, search: &SearchConfig) -> ScanRow {
    let fail = |msg: String| ScanRow {
        n0: n0.clone(),
        d: None,
        rank_lower_bound: None,
        regulator: None,
        num_points: None,
        truncated: false,
        error: Some(msg),
    };
    let spec = match specialize(&stage_n(), n0) {
        Ok(s) => s,
        Err(e) => return fail(e.to_string()),
    };
    let hctx = match HeightContext::new(precision) {
        Ok(c) => c,
        Err(e) => return fail(e.to_string()),
    };
    match certify_rank(&hctx, &spec.curve, &spec.points, search) {
        Ok(cert) => ScanRow {
            n0: n0.clone(),
            d: Some(spec.d),
            rank_lower_bound: Some(cert.rank_lower_bound),
            regulator: Some(hctx.real().to_default_string(&cert.regulator)),
            num_points: Some(cert.num_candidates),
            truncated: cert.truncated,
            error: None,
        },
        Err(e) => fail(e.to_string()),
    }
}

/// Run the scan, one row per requested parameter value, preserving input
/// order. Rows are computed in parallel on the current rayon pool.
pub fn scan(req: &ScanRequest) -> Vec<ScanRow> {
    req.n_values
        .par_iter()
        .map(|n0| scan_one(n0, req.precision, &req.search))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{rat, rat_int};

    fn small_cfg(denom: u32, numer: i64) -> SearchConfig {
        SearchConfig {
            denom_bound: denom,
            numer_bound: numer,
            time_budget: None,
        }
    }

    #[test]
    fn rediscovers_integral_points() {
        let e = MordellCurve::new(rat_int(-2)).unwrap();
        let out = search_points(&e, &small_cfg(1, 200)).unwrap();
        assert!(!out.truncated);
        let xs: Vec<_> = out.points.iter().map(|p| p.x().unwrap().clone()).collect();
        assert!(xs.contains(&rat(3, 1)));
        // the only integral points on y² = x³ − 2 have x = 3
        assert_eq!(xs, vec![rat(3, 1)]);
        assert!(out.points[0].y().unwrap() >= &rat(0, 1));
    }

    #[test]
    fn finds_torsion_and_small_points() {
        let e = MordellCurve::new(rat_int(1)).unwrap();
        let out = search_points(&e, &small_cfg(2, 50)).unwrap();
        let xs: Vec<_> = out.points.iter().map(|p| p.x().unwrap().clone()).collect();
        assert!(xs.contains(&rat(0, 1)));
        assert!(xs.contains(&rat(-1, 1)));
        assert!(xs.contains(&rat(2, 1)));
    }

    #[test]
    fn finds_fractional_points() {
        // (1/4, 33/8) lies on y² = x³ + 17, needing b = 2.
        let e = MordellCurve::new(rat_int(17)).unwrap();
        let narrow = search_points(&e, &small_cfg(1, 50)).unwrap();
        assert!(!narrow.points.iter().any(|p| p.x().unwrap() == &rat(1, 4)));
        let wide = search_points(&e, &small_cfg(2, 50)).unwrap();
        assert!(wide.points.iter().any(|p| p.x().unwrap() == &rat(1, 4)));
    }

    #[test]
    fn respects_numer_bound() {
        // x = 3 on y² = x³ − 2 is invisible when |A| ≤ 2
        let e = MordellCurve::new(rat_int(-2)).unwrap();
        let out = search_points(&e, &small_cfg(1, 2)).unwrap();
        assert!(out.points.is_empty());
    }

    #[test]
    fn search_works_on_non_integral_d() {
        // y² = x³ + 1/64 carries (0, 1/8) and the image of (2, 3).
        let e = MordellCurve::new(rat(1, 64)).unwrap();
        let out = search_points(&e, &small_cfg(2, 50)).unwrap();
        let pts: Vec<_> = out
            .points
            .iter()
            .map(|p| (p.x().unwrap().clone(), p.y().unwrap().clone()))
            .collect();
        assert!(pts.contains(&(rat(0, 1), rat(1, 8))));
        assert!(pts.contains(&(rat(1, 2), rat(3, 8))));
        for p in &out.points {
            assert!(e.on_curve(p), "search returned an off-curve point");
        }
    }

    #[test]
    fn zero_time_budget_truncates() {
        let e = MordellCurve::new(rat_int(-2)).unwrap();
        let cfg = SearchConfig {
            denom_bound: 50,
            numer_bound: 1_000_000,
            time_budget: Some(Duration::ZERO),
        };
        let out = search_points(&e, &cfg).unwrap();
        assert!(out.truncated);
    }

    #[test]
    fn certify_single_generator() {
        let hctx = HeightContext::new(30).unwrap();
        let e = MordellCurve::new(rat_int(-2)).unwrap();
        let p = e.point(rat_int(3), rat_int(5)).unwrap();
        let cert = certify_rank(&hctx, &e, &[p.clone()], &small_cfg(1, 200)).unwrap();
        assert_eq!(cert.rank_lower_bound, 1);
        assert_eq!(cert.basis.len(), 1);
        // the search rediscovers P; the duplicate must not inflate the rank
        assert_eq!(cert.num_candidates, 1);
        let reg = hctx.real().to_f64(&cert.regulator);
        assert!((reg - 1.3495768356801180).abs() < 1e-10);
    }

    #[test]
    fn certify_filters_torsion_and_multiples() {
        let hctx = HeightContext::new(30).unwrap();
        // pure torsion curve: rank lower bound 0
        let e = MordellCurve::new(rat_int(1)).unwrap();
        let cert = certify_rank(&hctx, &e, &[], &small_cfg(2, 50)).unwrap();
        assert_eq!(cert.rank_lower_bound, 0);
        assert!(cert.basis.is_empty());
        assert_eq!(hctx.real().to_f64(&cert.regulator), 0.0);
        // seeds P and 2P are dependent: rank stays 1
        let e = MordellCurve::new(rat_int(-2)).unwrap();
        let p = e.point(rat_int(3), rat_int(5)).unwrap();
        let p2 = e.double(&p);
        let cert = certify_rank(&hctx, &e, &[p, p2], &small_cfg(1, 2)).unwrap();
        assert_eq!(cert.rank_lower_bound, 1);
        assert_eq!(cert.basis.len(), 1);
    }

    #[test]
    fn scan_rows_preserve_order_and_flag_degenerates() {
        let req = ScanRequest {
            n_values: vec![rat(3, 1), rat(2, 1), rat(1, 2)],
            precision: 25,
            search: small_cfg(1, 10),
        };
        let rows = scan(&req);
        assert_eq!(rows.len(), 3);
        assert_eq!(rows[0].n0, rat(3, 1));
        assert!(rows[0].error.is_none());
        assert_eq!(rows[0].d, Some(rat(142945242561, 157351936)));
        assert!(rows[0].rank_lower_bound.unwrap() >= 3);
        // n = 2 is degenerate
        assert_eq!(rows[1].n0, rat(2, 1));
        assert!(rows[1].error.is_some());
        assert!(rows[1].d.is_none());
        // n = 1/2 is fine
        assert!(rows[2].error.is_none());
        assert_eq!(rows[2].d, Some(rat(314721, 4096)));
    }

    #[test]
    fn scan_is_deterministic() {
        let req = ScanRequest {
            n_values: vec![rat(3, 1), rat(1, 2)],
            precision: 25,
            search: small_cfg(1, 10),
        };
        let a = scan(&req);
        let b = scan(&req);
        for (x, y) in a.iter().zip(&b) {
            assert_eq!(x.regulator, y.regulator);
            assert_eq!(x.rank_lower_bound, y.rank_lower_bound);
            assert_eq!(x.num_points, y.num_points);
        }
    }
}
