//! Gram matrices of the Néron–Tate pairing: regulators and independence
//! certificates.
//!
//! For points P₁, …, P_r the Gram matrix G = (⟨P_i, P_j⟩) is positive
//! semidefinite, and det G > 0 exactly when the points are independent in
//! the free part of the Mordell–Weil group. Eigenvalues certify this
//! robustly: every eigenvalue clearly above zero contributes one to the
//! provable rank lower bound.

use astro_float::BigFloat;

use crate::bigfloat::RealCtx;
use crate::curve::{CurvePoint, MordellCurve};
use crate::heights::HeightContext;
use crate::{Error, Result};

/// Eigenvalues at or below this are treated as numerical zeros (dependent
/// directions). Independent points in this family sit far above it.
pub const INDEPENDENCE_THRESHOLD: f64 = 1e-4;

/// Everything the regulator computation produces.
pub struct GramReport {
    /// The full symmetric pairing matrix.
    pub matrix: Vec<Vec<BigFloat>>,
    /// det(matrix): the regulator of the point set.
    pub regulator: BigFloat,
    /// Eigenvalues in ascending order.
    pub eigenvalues: Vec<BigFloat>,
    /// Number of eigenvalues above [`INDEPENDENCE_THRESHOLD`].
    pub rank_lower_bound: usize,
}

/// Determinant by LU decomposition with partial pivoting.
pub fn lu_determinant(r: &RealCtx, m: &[Vec<BigFloat>]) -> BigFloat {
    let n = m.len();
    let mut a: Vec<Vec<BigFloat>> = m.to_vec();
    let mut det = r.one();
    for k in 0..n {
        let pivot = (k..n)
            .max_by(|&i, &j| r.cmp(&r.abs(&a[i][k]), &r.abs(&a[j][k])))
            .unwrap();
        if a[pivot][k].is_zero() {
            return r.zero();
        }
        if pivot != k {
            a.swap(pivot, k);
            det = r.neg(&det);
        }
        det = r.mul(&det, &a[k][k]);
        for i in (k + 1)..n {
            let f = r.div(&a[i][k], &a[k][k]);
            for j in k..n {
                let t = r.mul(&f, &a[k][j]);
                a[i][j] = r.sub(&a[i][j], &t);
            }
        }
    }
    det
}

/// Eigenvalues of a symmetric matrix by cyclic Jacobi rotations, ascending.
pub fn jacobi_eigenvalues(r: &RealCtx, m: &[Vec<BigFloat>]) -> Vec<BigFloat> {
    let n = m.len();
    let mut a: Vec<Vec<BigFloat>> = m.to_vec();
    // Stop once every off-diagonal entry is negligible at working precision.
    let eps = {
        let digits = r.digits().saturating_sub(5).max(10);
        r.parse_decimal(&format!("1e-{digits}"))
    };
    let max_sweeps = 64;
    for _ in 0..max_sweeps {
        let mut off = r.zero();
        for i in 0..n {
            for j in (i + 1)..n {
                off = r.add(&off, &r.abs(&a[i][j]));
            }
        }
        if r.cmp(&off, &eps) != std::cmp::Ordering::Greater {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                if a[p][q].is_zero() {
                    continue;
                }
                // Rotation angle from tan(2θ) = 2a_pq / (a_qq − a_pp).
                let theta_den = r.mul(&r.from_i64(2), &a[p][q]);
                let tau = r.div(&r.sub(&a[q][q], &a[p][p]), &theta_den);
                let abs_tau = r.abs(&tau);
                let root = r.sqrt(&r.add(&r.one(), &r.mul(&tau, &tau)));
                let t_mag = r.div(&r.one(), &r.add(&abs_tau, &root));
                let t = if r.is_negative(&tau) {
                    r.neg(&t_mag)
                } else {
                    t_mag
                };
                let c = r.div(&r.one(), &r.sqrt(&r.add(&r.one(), &r.mul(&t, &t))));
                let s = r.mul(&t, &c);
                // Apply the rotation to rows/columns p and q.
                for k in 0..n {
                    let akp = a[k][p].clone();
                    let akq = a[k][q].clone();
                    a[k][p] = r.sub(&r.mul(&c, &akp), &r.mul(&s, &akq));
                    a[k][q] = r.add(&r.mul(&s, &akp), &r.mul(&c, &akq));
                }
                for k in 0..n {
                    let apk = a[p][k].clone();
                    let aqk = a[q][k].clone();
                    a[p][k] = r.sub(&r.mul(&c, &apk), &r.mul(&s, &aqk));
                    a[q][k] = r.add(&r.mul(&s, &apk), &r.mul(&c, &aqk));
                }
            }
        }
    }
    let mut eigs: Vec<BigFloat> = (0..n).map(|i| a[i][i].clone()).collect();
    eigs.sort_by(|x, y| r.cmp(x, y));
    eigs
}

/// Pairing matrix of a point set, computing each individual height once.
pub fn gram_matrix(
    hctx: &HeightContext,
    curve: &MordellCurve,
    points: &[CurvePoint],
) -> Result<Vec<Vec<BigFloat>>> {
    if points.is_empty() {
        return Err(Error::EmptyPointList);
    }
    let r = hctx.real();
    let n = points.len();
    let hs: Vec<BigFloat> = points
        .iter()
        .map(|p| hctx.canonical_height(curve, p))
        .collect::<Result<_>>()?;
    let half = r.from_ratio(&crate::rational::rat(1, 2));
    let mut g = vec![vec![r.zero(); n]; n];
    for i in 0..n {
        g[i][i] = hs[i].clone();
        for j in (i + 1)..n {
            let hij = hctx.canonical_height(curve, &curve.add(&points[i], &points[j]))?;
            let v = r.mul(&r.sub(&r.sub(&hij, &hs[i]), &hs[j]), &half);
            g[i][j] = v.clone();
            g[j][i] = v;
        }
    }
    Ok(g)
}

/// Full regulator report for a point set.
pub fn gram_regulator(
    hctx: &HeightContext,
    curve: &MordellCurve,
    points: &[CurvePoint],
) -> Result<GramReport> {
    let r = hctx.real();
    let matrix = gram_matrix(hctx, curve, points)?;
    let regulator = lu_determinant(r, &matrix);
    let eigenvalues = jacobi_eigenvalues(r, &matrix);
    let rank_lower_bound = eigenvalues
        .iter()
        .filter(|e| r.to_f64(e) > INDEPENDENCE_THRESHOLD)
        .count();
    Ok(GramReport {
        matrix,
        regulator,
        eigenvalues,
        rank_lower_bound,
    })
}
