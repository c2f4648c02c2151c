//! The parametric family of Mordell curves y² = x³ + d carrying three
//! rational points, built in three stages:
//!
//! * **Stage M** (parameter m): d = (m²−1)², with P1 = (m²−1, m(m²−1)).
//!   Here x(P1) + 1 = m² is a square by construction.
//! * **Stage K** (parameter k): substituting m = m(k) = (k−2)²/((k−1)(k+1))
//!   makes m(m+3) a square as well, which buys a second point P2 with
//!   x(P2) = m(k) − 1.
//! * **Stage N** (parameter n): substituting k = k(n) = (n²−2n−6)/(n²+2)
//!   rationalizes the conic u² = −(2k²+4k−7), which forces a third point P3.
//!
//! Every formula below is kept as a table of literal integer coefficients.
//! The stage-N tables for d and for the points deliberately do **not** share
//! structure: perturbing one printed coefficient of d (see
//! [`NTable::mutated`]) must make the symbolic verification fail, which
//! would be masked if the same table fed both sides of an identity.

use num_rational::BigRational;
use num_traits::Zero;

use crate::curve::{CurvePoint, MordellCurve};
use crate::poly::Poly;
use crate::ratfunc::RatFunc;
use crate::rational::rat_int;
use crate::{Error, Result};

/// Which stage of the construction.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum StageName {
    M,
    K,
    N,
}

impl StageName {
    pub fn variable(self) -> &'static str {
        match self {
            StageName::M => "m",
            StageName::K => "k",
            StageName::N => "n",
        }
    }
}

impl std::fmt::Display for StageName {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            StageName::M => "m",
            StageName::K => "k",
            StageName::N => "n",
        })
    }
}

/// A parametric point (x(t), y(t)) with a display label.
#[derive(Clone, Debug)]
pub struct PointFormula {
    pub label: &'static str,
    pub x: RatFunc,
    pub y: RatFunc,
    /// Factored rendering for presentation (the reduced rational functions
    /// expand the products).
    pub display: (String, String),
}

/// One stage of the construction: a coefficient d(t) and its points.
#[derive(Clone, Debug)]
pub struct FamilyStage {
    pub name: StageName,
    pub d: RatFunc,
    pub points: Vec<PointFormula>,
    pub d_display: String,
}

/// The literal coefficient table behind stage N. All fields are the printed
/// constants of the formulas; [`NTable::default`] holds the true values and
/// [`NTable::mutated`] perturbs exactly one of them.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NTable {
    /// Coefficient triples (constant, linear, quadratic) of the four
    /// quadratics whose squares form the numerator of d.
    pub d_q: [[i64; 3]; 4],
    /// Exponent on each quadratic in the numerator of d.
    pub d_q_exp: [u32; 4],
    /// Scalar in the denominator of d.
    pub d_scale: i64,
    /// Constant terms of the linear factors (n + 4), (n − 2), (n + 1).
    pub d_l_const: [i64; 3],
    /// Exponent on the product of linear factors in the denominator of d.
    pub d_l_exp: u32,
    /// Additive offsets on (x, y) of P1, P2, P3; zero except under mutation.
    pub point_offset: [[i64; 2]; 3],
}

impl Default for NTable {
    fn default() -> Self {
        NTable {
            d_q: [[6, 4, 1], [34, 8, 1], [2, 0, 1], [22, -4, 1]],
            d_q_exp: [2, 2, 2, 2],
            d_scale: 256,
            d_l_const: [4, -2, 1],
            d_l_exp: 4,
            point_offset: [[0, 0], [0, 0], [0, 0]],
        }
    }
}

/// All recognized mutation target identifiers.
pub fn mutation_targets() -> Vec<String> {
    let mut out = Vec::new();
    for q in 1..=4 {
        for c in 0..=2 {
            out.push(format!("d.q{q}.c{c}"));
        }
    }
    out.push("d.den.scale".to_string());
    for l in 1..=3 {
        out.push(format!("d.l{l}.c0"));
    }
    for q in 1..=4 {
        out.push(format!("d.q{q}.exp"));
    }
    out.push("d.l.exp".to_string());
    for p in 1..=3 {
        out.push(format!("P{p}.x"));
        out.push(format!("P{p}.y"));
    }
    out
}

impl NTable {
    /// The table with the named entry bumped by +1.
    pub fn mutated(target: &str) -> Result<Self> {
        let mut t = NTable::default();
        let unknown = || Error::UnknownMutationTarget {
            target: target.to_string(),
        };
        if let Some(rest) = target.strip_prefix("d.q") {
            let (qs, field) = rest.split_once('.').ok_or_else(unknown)?;
            let q: usize = qs.parse().map_err(|_| unknown())?;
            if !(1..=4).contains(&q) {
                return Err(unknown());
            }
            match field {
                "c0" => t.d_q[q - 1][0] += 1,
                "c1" => t.d_q[q - 1][1] += 1,
                "c2" => t.d_q[q - 1][2] += 1,
                "exp" => t.d_q_exp[q - 1] += 1,
                _ => return Err(unknown()),
            }
            return Ok(t);
        }
        if let Some(rest) = target.strip_prefix("d.l") {
            match rest {
                "1.c0" => t.d_l_const[0] += 1,
                "2.c0" => t.d_l_const[1] += 1,
                "3.c0" => t.d_l_const[2] += 1,
                ".exp" => t.d_l_exp += 1,
                _ => return Err(unknown()),
            }
            return Ok(t);
        }
        if target == "d.den.scale" {
            t.d_scale += 1;
            return Ok(t);
        }
        if let Some(rest) = target.strip_prefix('P') {
            let (ps, coord) = rest.split_once('.').ok_or_else(unknown)?;
            let p: usize = ps.parse().map_err(|_| unknown())?;
            if !(1..=3).contains(&p) {
                return Err(unknown());
            }
            match coord {
                "x" => t.point_offset[p - 1][0] += 1,
                "y" => t.point_offset[p - 1][1] += 1,
                _ => return Err(unknown()),
            }
            return Ok(t);
        }
        Err(unknown())
    }
}

fn poly_rf(coeffs: &[i64]) -> RatFunc {
    RatFunc::from_poly(Poly::from_ints(coeffs))
}

/// Stage M: d = (m²−1)² with the tautological point.
pub fn stage_m() -> FamilyStage {
    let a = poly_rf(&[-1, 0, 1]); // m² − 1
    let m = RatFunc::x();
    let d = &a * &a;
    let x1 = a.clone();
    let y1 = &m * &a;
    FamilyStage {
        name: StageName::M,
        d,
        points: vec![PointFormula {
            label: "P1",
            x: x1,
            y: y1,
            display: ("m^2 - 1".to_string(), "m*(m^2 - 1)".to_string()),
        }],
        d_display: "(m^2 - 1)^2".to_string(),
    }
}

/// The substitution m(k) = (k−2)²/((k−1)(k+1)) that powers stage K.
pub fn m_of_k() -> RatFunc {
    RatFunc::from_ints(&[4, -4, 1], &[-1, 0, 1]).expect("fixed nonzero denominator")
}

/// Stage K: m = m(k) makes m(m+3) a square, giving a second point.
pub fn stage_k() -> FamilyStage {
    let mk = m_of_k();
    // d_K = (4k−5)²(2k²−4k+3)² / ((k−1)⁴(k+1)⁴)
    let f1 = Poly::from_ints(&[-5, 4]);
    let f2 = Poly::from_ints(&[3, -4, 2]);
    let num = &(&f1 * &f1) * &(&f2 * &f2);
    let den = Poly::from_ints(&[-1, 0, 1]).pow(4);
    let d = RatFunc::new(num, den).expect("fixed nonzero denominator");
    // P2 = ((5−4k)/((k−1)(k+1)), (4k−5)(k−2)(2k−1)/((k−1)²(k+1)²))
    let x2 = RatFunc::from_ints(&[5, -4], &[-1, 0, 1]).expect("fixed nonzero denominator");
    let y2num = &(&Poly::from_ints(&[-5, 4]) * &Poly::from_ints(&[-2, 1]))
        * &Poly::from_ints(&[-1, 2]);
    let y2den = Poly::from_ints(&[-1, 0, 1]).pow(2);
    let y2 = RatFunc::new(y2num, y2den).expect("fixed nonzero denominator");
    // P1 carried over from stage M via m ↦ m(k).
    let m_stage = stage_m();
    let x1 = m_stage.points[0].x.compose(&mk).expect("composition with nonconstant map");
    let y1 = m_stage.points[0].y.compose(&mk).expect("composition with nonconstant map");
    FamilyStage {
        name: StageName::K,
        d,
        points: vec![
            PointFormula {
                label: "P1",
                x: x1,
                y: y1,
                display: (
                    "m(k)^2 - 1 with m(k) = (k - 2)^2/((k - 1)*(k + 1))".to_string(),
                    "m(k)*(m(k)^2 - 1)".to_string(),
                ),
            },
            PointFormula {
                label: "P2",
                x: x2,
                y: y2,
                display: (
                    "(5 - 4*k) / ((k - 1)*(k + 1))".to_string(),
                    "(4*k - 5)*(k - 2)*(2*k - 1) / ((k - 1)^2*(k + 1)^2)".to_string(),
                ),
            },
        ],
        d_display: "(4*k - 5)^2*(2*k^2 - 4*k + 3)^2 / ((k - 1)^4*(k + 1)^4)".to_string(),
    }
}

/// The substitution k(n) = (n²−2n−6)/(n²+2) that powers stage N.
pub fn k_of_n() -> RatFunc {
    RatFunc::from_ints(&[-6, -2, 1], &[2, 0, 1]).expect("fixed nonzero denominator")
}

/// The conic parametrization u(n) = (n²+8n−2)/(n²+2), satisfying
/// u² = −(2k² + 4k − 7) along k = k(n).
pub fn u_of_n() -> RatFunc {
    RatFunc::from_ints(&[-2, 8, 1], &[2, 0, 1]).expect("fixed nonzero denominator")
}

/// Stage N with the default (true) table.
pub fn stage_n() -> FamilyStage {
    stage_n_from(&NTable::default())
}

fn pow_str(base: &str, e: u32) -> String {
    match e {
        1 => format!("({base})"),
        _ => format!("({base})^{e}"),
    }
}

/// Stage N assembled from an explicit literal table.
pub fn stage_n_from(t: &NTable) -> FamilyStage {
    // ---- d from the (mutable) d-table ----
    let dq: Vec<Poly> = t.d_q.iter().map(|c| Poly::from_ints(c)).collect();
    let mut d_num = Poly::one();
    for (q, &e) in dq.iter().zip(&t.d_q_exp) {
        d_num = &d_num * &q.pow(e);
    }
    let mut l_poly = Poly::one();
    for &c in &t.d_l_const {
        l_poly = &l_poly * &Poly::from_ints(&[c, 1]);
    }
    let d_den = l_poly.pow(t.d_l_exp).scale(&rat_int(t.d_scale));
    let d = RatFunc::new(d_num, d_den).expect("nonzero scalar keeps denominator nonzero");

    let d_display = {
        let qs: Vec<String> = t
            .d_q
            .iter()
            .zip(&t.d_q_exp)
            .map(|(c, &e)| pow_str(&Poly::from_ints(c).to_string_var("n"), e))
            .collect();
        let ls: Vec<String> = t
            .d_l_const
            .iter()
            .map(|&c| pow_str(&Poly::from_ints(&[c, 1]).to_string_var("n"), t.d_l_exp))
            .collect();
        format!("{} / ({}*{})", qs.join("*"), t.d_scale, ls.join("*"))
    };

    // ---- points from fixed literals (independent of the d-table) ----
    let q1 = Poly::from_ints(&[6, 4, 1]);
    let q2 = Poly::from_ints(&[34, 8, 1]);
    let q3 = Poly::from_ints(&[2, 0, 1]);
    let q4 = Poly::from_ints(&[22, -4, 1]);
    let l = &(&Poly::from_ints(&[4, 1]) * &Poly::from_ints(&[-2, 1])) * &Poly::from_ints(&[1, 1]);
    let s = Poly::from_ints(&[10, 2, 1]); // n² + 2n + 10
    let q_all = &(&q1 * &q2) * &(&q3 * &q4);

    let offset = |v: i64| RatFunc::constant(rat_int(v));

    // P1 = (Q1Q2Q3Q4/(16L²), (n²+2n+10)²·Q1Q2Q3Q4/(64L³))
    let p1x = RatFunc::new(q_all.clone(), l.pow(2).scale(&rat_int(16)))
        .expect("fixed nonzero denominator");
    let p1y = RatFunc::new(&s.pow(2) * &q_all, l.pow(3).scale(&rat_int(64)))
        .expect("fixed nonzero denominator");
    // P2 = (−Q2Q3/(4L), Q2·(n²−4n−14)·Q3·(n²+2n+10)/(16L²))
    let p2x = RatFunc::new(-&(&q2 * &q3), l.scale(&rat_int(4))).expect("fixed nonzero denominator");
    let p2y = RatFunc::new(
        &(&q2 * &Poly::from_ints(&[-14, -4, 1])) * &(&q3 * &s),
        l.pow(2).scale(&rat_int(16)),
    )
    .expect("fixed nonzero denominator");
    // P3 = (Q1Q4/(4L), Q1·(n²+8n−2)·Q4·(n²+2n+10)/(16L²))
    let p3x = RatFunc::new(&q1 * &q4, l.scale(&rat_int(4))).expect("fixed nonzero denominator");
    let p3y = RatFunc::new(
        &(&q1 * &Poly::from_ints(&[-2, 8, 1])) * &(&q4 * &s),
        l.pow(2).scale(&rat_int(16)),
    )
    .expect("fixed nonzero denominator");

    let with_offset = |f: RatFunc, v: i64| if v == 0 { f } else { &f + &offset(v) };
    let off_str = |base: &str, v: i64| {
        if v == 0 {
            base.to_string()
        } else {
            format!("{base} + {v}")
        }
    };

    let points = vec![
        PointFormula {
            label: "P1",
            x: with_offset(p1x, t.point_offset[0][0]),
            y: with_offset(p1y, t.point_offset[0][1]),
            display: (
                off_str(
                    "(n^2 + 4*n + 6)*(n^2 + 8*n + 34)*(n^2 + 2)*(n^2 - 4*n + 22) / (16*((n + 4)*(n - 2)*(n + 1))^2)",
                    t.point_offset[0][0],
                ),
                off_str(
                    "(n^2 + 2*n + 10)^2*(n^2 + 4*n + 6)*(n^2 + 8*n + 34)*(n^2 + 2)*(n^2 - 4*n + 22) / (64*((n + 4)*(n - 2)*(n + 1))^3)",
                    t.point_offset[0][1],
                ),
            ),
        },
        PointFormula {
            label: "P2",
            x: with_offset(p2x, t.point_offset[1][0]),
            y: with_offset(p2y, t.point_offset[1][1]),
            display: (
                off_str(
                    "-(n^2 + 8*n + 34)*(n^2 + 2) / (4*(n + 4)*(n - 2)*(n + 1))",
                    t.point_offset[1][0],
                ),
                off_str(
                    "(n^2 + 8*n + 34)*(n^2 - 4*n - 14)*(n^2 + 2)*(n^2 + 2*n + 10) / (16*((n + 4)*(n - 2)*(n + 1))^2)",
                    t.point_offset[1][1],
                ),
            ),
        },
        PointFormula {
            label: "P3",
            x: with_offset(p3x, t.point_offset[2][0]),
            y: with_offset(p3y, t.point_offset[2][1]),
            display: (
                off_str(
                    "(n^2 + 4*n + 6)*(n^2 - 4*n + 22) / (4*(n + 4)*(n - 2)*(n + 1))",
                    t.point_offset[2][0],
                ),
                off_str(
                    "(n^2 + 4*n + 6)*(n^2 + 8*n - 2)*(n^2 - 4*n + 22)*(n^2 + 2*n + 10) / (16*((n + 4)*(n - 2)*(n + 1))^2)",
                    t.point_offset[2][1],
                ),
            ),
        },
    ];

    FamilyStage {
        name: StageName::N,
        d,
        points,
        d_display,
    }
}

/// The whole construction. Stages M and K are fixed; stage N can carry a
/// mutated table for verification hardening.
#[derive(Clone)]
pub struct Family {
    pub m: FamilyStage,
    pub k: FamilyStage,
    pub n: FamilyStage,
}

impl Default for Family {
    fn default() -> Self {
        Family::new()
    }
}

/// One verified identity of the construction.
#[derive(Clone, Debug)]
pub struct IdentityCheck {
    pub name: &'static str,
    pub pass: bool,
}

impl Family {
    pub fn new() -> Self {
        Family {
            m: stage_m(),
            k: stage_k(),
            n: stage_n(),
        }
    }

    pub fn with_table(t: &NTable) -> Self {
        Family {
            m: stage_m(),
            k: stage_k(),
            n: stage_n_from(t),
        }
    }

    pub fn stage(&self, s: StageName) -> &FamilyStage {
        match s {
            StageName::M => &self.m,
            StageName::K => &self.k,
            StageName::N => &self.n,
        }
    }

    /// Run the full identity battery. Every check is a symbolic statement in
    /// ℚ(m), ℚ(k) or ℚ(n); `pass` records exact equality.
    pub fn verify(&self) -> Vec<IdentityCheck> {
        let mut out = Vec::new();
        let mut chk = |name: &'static str, pass: bool| out.push(IdentityCheck { name, pass });

        let on_curve = |st: &FamilyStage, i: usize| {
            let p = &st.points[i];
            let x3 = &(&p.x * &p.x) * &p.x;
            (&(&p.y * &p.y) - &x3) == st.d
        };

        // ---- stage M ----
        let m1 = &self.m.points[0];
        chk("M: P1 lies on y^2 = x^3 + d", on_curve(&self.m, 0));
        chk(
            "M: x(P1) + 1 is a square in Q(m)",
            (&m1.x + &RatFunc::one()).is_square(),
        );

        // ---- stage K ----
        let mk = m_of_k();
        chk("K: P2 lies on y^2 = x^3 + d", on_curve(&self.k, 1));
        chk("K: P1 lies on y^2 = x^3 + d", on_curve(&self.k, 0));
        let p2k = &self.k.points[1];
        chk(
            "K: x(P2) = m(k) - 1",
            p2k.x == (&mk - &RatFunc::one()),
        );
        chk(
            "K: m(k)*(m(k) + 3) is a square in Q(k)",
            (&mk * &(&mk + &RatFunc::constant(rat_int(3)))).is_square(),
        );
        let dm_of_mk = stage_m().d.compose(&mk).expect("valid composition");
        chk("K: d_M(m(k)) = d_K", dm_of_mk == self.k.d);

        // ---- stage N ----
        let kn = k_of_n();
        let un = u_of_n();
        // u(n)² + 2k(n)² + 4k(n) − 7 = 0 rationalizes the conic.
        let conic = {
            let two = RatFunc::constant(rat_int(2));
            let four = RatFunc::constant(rat_int(4));
            let seven = RatFunc::constant(rat_int(7));
            &(&(&un * &un) + &(&two * &(&kn * &kn))) + &(&(&four * &kn) - &seven)
        };
        chk("N: u(n)^2 = -(2k(n)^2 + 4k(n) - 7)", conic.is_zero());
        chk("N: P1 lies on y^2 = x^3 + d", on_curve(&self.n, 0));
        chk("N: P2 lies on y^2 = x^3 + d", on_curve(&self.n, 1));
        chk("N: P3 lies on y^2 = x^3 + d", on_curve(&self.n, 2));
        let dk_of_kn = stage_k().d.compose(&kn).expect("valid composition");
        chk("N: d_K(k(n)) = d_N", dk_of_kn == self.n.d);

        let p1n = &self.n.points[0];
        let p2n = &self.n.points[1];
        let p3n = &self.n.points[2];
        let k_stage = stage_k();
        let x2k = k_stage.points[1].x.compose(&kn).expect("valid composition");
        let y2k = k_stage.points[1].y.compose(&kn).expect("valid composition");
        chk("N: x(P2) = x_K(P2) at k = k(n)", p2n.x == x2k);
        chk("N: y(P2) = y_K(P2) at k = k(n)", p2n.y == y2k);
        // The third point's abscissa is forced by the conic:
        // x(P3) = −(2k² − 4k + 3)/((k − 1)(k + 1)) at k = k(n).
        let x3_forced = RatFunc::from_ints(&[-3, 4, -2], &[-1, 0, 1])
            .expect("fixed nonzero denominator")
            .compose(&kn)
            .expect("valid composition");
        chk("N: x(P3) = -(2k^2 - 4k + 3)/((k - 1)(k + 1)) at k = k(n)", p3n.x == x3_forced);
        // P1 relations: the slope y/x recovers the stage-M parameter up to
        // sign, and the coordinates match stage M under m = −m(k(n)).
        let slope = &p1n.y / &p1n.x;
        chk(
            "N: x(P1) = (y(P1)/x(P1))^2 - 1",
            p1n.x == (&(&slope * &slope) - &RatFunc::one()),
        );
        let mk_at_kn = mk.compose(&kn).expect("valid composition");
        chk("N: y(P1)/x(P1) = -m(k(n))", slope == -&mk_at_kn);
        let m_stage = stage_m();
        let x1m = m_stage.points[0].x.compose(&mk_at_kn).expect("valid composition");
        let y1m = m_stage.points[0].y.compose(&mk_at_kn).expect("valid composition");
        chk("N: x(P1) = x_M(P1) at m = m(k(n))", p1n.x == x1m);
        chk("N: y(P1) = -y_M(P1) at m = m(k(n))", p1n.y == -&y1m);

        out
    }
}

/// Do all identities pass?
pub fn all_pass(checks: &[IdentityCheck]) -> bool {
    checks.iter().all(|c| c.pass)
}

/// Recover the stage-K parameter from the stage-N abscissa of P2,
/// symbolically: solving X·k² + 4k − (X + 5) = 0 for k with
/// X = x(P2)(n) picks out k(n) through the square root of
/// (X + 1)(X + 4).
pub fn recover_k_of_n() -> Result<RatFunc> {
    let x = stage_n().points[1].x.clone();
    let one = RatFunc::one();
    let four = RatFunc::constant(rat_int(4));
    let disc = &(&x + &one) * &(&x + &four);
    let s = disc.sqrt().ok_or(Error::NoConsistentRoot)?;
    let two = RatFunc::constant(rat_int(2));
    for root in [&(&s - &two) / &x, &(&(-&s) - &two) / &x] {
        // accept the root that satisfies the defining relation of x(P2)
        let lhs = &(&x * &(&root * &root)) + &(&(&four * &root) - &(&x + &RatFunc::constant(rat_int(5))));
        if lhs.is_zero() && root == k_of_n() {
            return Ok(root);
        }
    }
    Err(Error::NoConsistentRoot)
}

/// Recover k numerically from a specialized x(P2) value. The defining
/// quadratic X·k² + 4k − (X+5) = 0 generically has two rational roots, and
/// both parametrize the same abscissa; all consistent roots are returned,
/// in ascending order.
pub fn recover_k(x: &BigRational) -> Result<Vec<BigRational>> {
    let one = BigRational::from(num_bigint::BigInt::from(1));
    let four = BigRational::from(num_bigint::BigInt::from(4));
    let five = BigRational::from(num_bigint::BigInt::from(5));
    if x.is_zero() {
        // degenerate quadratic: 4k − 5 = 0
        return Ok(vec![&five / &four]);
    }
    let disc = (x + &one) * (x + &four);
    let s = crate::rational::exact_sqrt(&disc).ok_or(Error::NoConsistentRoot)?;
    let two = BigRational::from(num_bigint::BigInt::from(2));
    let mut roots = Vec::new();
    for root in [(&s - &two) / x, (-&s - &two) / x] {
        // keep the roots the actual stage-K formula confirms
        let xk = stage_k().points[1].x.eval(&root);
        if matches!(xk, Ok(v) if &v == x) && !roots.contains(&root) {
            roots.push(root);
        }
    }
    if roots.is_empty() {
        return Err(Error::NoConsistentRoot);
    }
    roots.sort();
    Ok(roots)
}

/// A specialization of stage N at a rational parameter value.
#[derive(Clone, Debug)]
pub struct Specialization {
    pub n0: BigRational,
    pub d: BigRational,
    pub curve: MordellCurve,
    /// P1, P2, P3 evaluated at n0, verified on the curve.
    pub points: Vec<CurvePoint>,
    pub flags: SpecializationFlags,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct SpecializationFlags {
    /// Two of the specialized points share an x-coordinate.
    pub coincident_points: bool,
    /// Some specialized point is torsion (these never occur in this family,
    /// but a mutated table or future stage could produce them).
    pub torsion_hits: bool,
}

/// Evaluate a stage at a parameter value. Parameter values where d or a
/// point formula has a pole are degenerate: there the construction
/// collapses and no curve is produced.
pub fn specialize(stage: &FamilyStage, t0: &BigRational) -> Result<Specialization> {
    let degenerate = |_e: Error| Error::DegenerateParameter { n0: t0.clone() };
    let d = stage.d.eval(t0).map_err(degenerate)?;
    if d.is_zero() {
        return Err(Error::DegenerateParameter { n0: t0.clone() });
    }
    let curve = MordellCurve::new(d.clone())?;
    let mut points = Vec::with_capacity(stage.points.len());
    for p in &stage.points {
        let x = p.x.eval(t0).map_err(degenerate)?;
        let y = p.y.eval(t0).map_err(degenerate)?;
        points.push(curve.point(x, y)?);
    }
    let mut coincident = false;
    for i in 0..points.len() {
        for j in (i + 1)..points.len() {
            if points[i].x() == points[j].x() {
                coincident = true;
            }
        }
    }
    let torsion_hits = points.iter().any(|p| curve.is_torsion(p));
    Ok(Specialization {
        n0: t0.clone(),
        d,
        curve,
        points,
        flags: SpecializationFlags {
            coincident_points: coincident,
            torsion_hits,
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{parse_rational, rat};

    #[test]
    fn all_identities_pass() {
        let fam = Family::new();
        let checks = fam.verify();
        assert_eq!(checks.len(), 19);
        for c in &checks {
            assert!(c.pass, "identity failed: {}", c.name);
        }
        assert!(all_pass(&checks));
    }

    #[test]
    fn exact_specialization_at_3() {
        let spec = specialize(&stage_n(), &rat(3, 1)).unwrap();
        assert_eq!(spec.d, rat(142945242561, 157351936));
        assert_eq!(spec.points[0].x().unwrap(), &rat(378081, 12544));
        assert_eq!(spec.points[0].y().unwrap(), &rat(236300625, 1404928));
        assert_eq!(spec.points[1].x().unwrap(), &rat(-737, 112));
        assert_eq!(spec.points[1].y().unwrap(), &rat(-313225, 12544));
        assert_eq!(spec.points[2].x().unwrap(), &rat(513, 112));
        assert_eq!(spec.points[2].y().unwrap(), &rat(397575, 12544));
        assert!(!spec.flags.coincident_points);
        assert!(!spec.flags.torsion_hits);
    }

    #[test]
    fn degenerate_parameters_error() {
        // Exactly the zeros of (n+4)(n−2)(n+1), found via the pole check.
        for bad in [rat(2, 1), rat(-1, 1), rat(-4, 1)] {
            assert!(matches!(
                specialize(&stage_n(), &bad),
                Err(Error::DegenerateParameter { .. })
            ));
        }
        // near-misses are fine
        for ok in [rat(19, 10), rat(-9, 10), rat(-41, 10)] {
            assert!(specialize(&stage_n(), &ok).is_ok());
        }
    }

    #[test]
    fn stage_m_and_k_specialize() {
        // stage M at m = 2: d = 9, P1 = (3, 6)
        let spec = specialize(&stage_m(), &rat(2, 1)).unwrap();
        assert_eq!(spec.d, rat(9, 1));
        assert_eq!(spec.points[0].x().unwrap(), &rat(3, 1));
        assert_eq!(spec.points[0].y().unwrap(), &rat(6, 1));
        // stage K at k = 3: m(k) = 1/8; d = (7·9)²/(2·4)⁴ = 3969/4096
        let spec = specialize(&stage_k(), &rat(3, 1)).unwrap();
        assert_eq!(spec.d, rat(3969, 4096));
        // P2 = (−7/8, (7·1·5)/64) = (−7/8, 35/64)
        assert_eq!(spec.points[1].x().unwrap(), &rat(-7, 8));
        assert_eq!(spec.points[1].y().unwrap(), &rat(35, 64));
        // P1 = (m²−1, m(m²−1)) at m = 1/8 = (−63/64, −63/512)
        assert_eq!(spec.points[0].x().unwrap(), &rat(-63, 64));
        assert_eq!(spec.points[0].y().unwrap(), &rat(-63, 512));
        // stage K degenerates at k = ±1
        assert!(specialize(&stage_k(), &rat(1, 1)).is_err());
        assert!(specialize(&stage_k(), &rat(-1, 1)).is_err());
    }

    #[test]
    fn transition_maps_compose() {
        // m(k(n)) at n = 3: k(3) = −3/11, m(−3/11) = (−3/11 − 2)² / ((−3/11)² − 1)
        let kn = k_of_n().eval(&rat(3, 1)).unwrap();
        assert_eq!(kn, rat(-3, 11));
        let mk = m_of_k().eval(&kn).unwrap();
        assert_eq!(mk, rat(625, 112) * rat(-1, 1)); // (−25/11)²/(9/121 − 1) = (625/121)/(−112/121)
        // u(n) satisfies the conic at numeric level too
        let un = u_of_n().eval(&rat(3, 1)).unwrap();
        assert_eq!(
            &un * &un,
            -(rat(2, 1) * &kn * &kn + rat(4, 1) * &kn - rat(7, 1))
        );
    }

    #[test]
    fn mutation_targets_are_complete_and_valid() {
        let targets = mutation_targets();
        assert_eq!(targets.len(), 27);
        for t in &targets {
            let table = NTable::mutated(t).unwrap();
            assert_ne!(table, NTable::default(), "mutation {t} is a no-op");
        }
        assert!(matches!(
            NTable::mutated("d.q5.c0"),
            Err(Error::UnknownMutationTarget { .. })
        ));
        assert!(matches!(
            NTable::mutated("bogus"),
            Err(Error::UnknownMutationTarget { .. })
        ));
    }

    #[test]
    fn mutations_break_verification() {
        // spot checks; the exhaustive sweep lives in the acceptance suite
        for target in ["d.q1.c0", "d.den.scale", "d.l.exp", "P3.y", "P1.x"] {
            let fam = Family::with_table(&NTable::mutated(target).unwrap());
            let checks = fam.verify();
            assert!(
                !all_pass(&checks),
                "mutation {target} slipped through verification"
            );
        }
    }

    #[test]
    fn mutated_d_display_changes() {
        let base = stage_n().d_display.clone();
        let mutated = stage_n_from(&NTable::mutated("d.q2.c1").unwrap()).d_display;
        assert_ne!(base, mutated);
        assert!(base.contains("(n^2 + 8*n + 34)^2"));
        assert!(mutated.contains("(n^2 + 9*n + 34)^2"));
    }

    #[test]
    fn k_recovery() {
        assert_eq!(recover_k_of_n().unwrap(), k_of_n());
        // numeric recovery round-trips through the stage-K formula; the
        // original k is always among the (up to two) recovered roots
        for k0 in [rat(-3, 11), rat(2, 7), rat(9, 4)] {
            let x = stage_k().points[1].x.eval(&k0).unwrap();
            let roots = recover_k(&x).unwrap();
            assert!(roots.contains(&k0), "lost root {k0} among {roots:?}");
            for r in &roots {
                assert_eq!(stage_k().points[1].x.eval(r).unwrap(), x);
            }
        }
        // x(P2) = 0 forces the linear root k = 5/4
        assert_eq!(recover_k(&rat(0, 1)).unwrap(), vec![rat(5, 4)]);
        // an x value outside the family has no rational root
        assert!(matches!(
            recover_k(&rat(1, 1)),
            Err(Error::NoConsistentRoot)
        ));
    }

    #[test]
    fn coefficient_positivity() {
        // d(n) > 0 wherever defined: the numerator factors are positive
        // definite quadratics. Spot-check a spread of parameter values.
        for s in ["-100", "-7/5", "-1/2", "0", "1/3", "1/2", "5", "99/10"] {
            let n0 = parse_rational(s).unwrap();
            let spec = specialize(&stage_n(), &n0).unwrap();
            assert!(spec.d > rat(0, 1), "d({s}) not positive");
        }
    }

    #[test]
    fn coincident_specializations_share_curve() {
        // n = 1/2 and n = 5 sit over the same k up to the k ↔ 1/k symmetry
        // and give the same curve with permuted/negated points.
        let a = specialize(&stage_n(), &rat(1, 2)).unwrap();
        let b = specialize(&stage_n(), &rat(5, 1)).unwrap();
        assert_eq!(a.d, b.d);
        assert_eq!(a.d, rat(314721, 4096));
    }
}
