//! Canonical-height machinery pinned against values computed independently
//! with a multi-precision Python stack (mpmath/sympy) and frozen here as
//! decimal strings. Tolerances reflect the working precision of each run.

use std::cmp::Ordering;

use astro_float::BigFloat;
use mordell::bigfloat::RealCtx;
use mordell::curve::{CurvePoint, MordellCurve};
use mordell::family::{specialize, Family, StageName};
use mordell::gram::gram_regulator;
use mordell::heights::{HeightContext, Normalization};
use mordell::rational::{parse_rational, rat, rat_int};
use num_bigint::BigInt;
use num_rational::BigRational;

fn q(s: &str) -> BigRational {
    parse_rational(s).unwrap()
}

fn curve(d: &str) -> MordellCurve {
    MordellCurve::new(q(d)).unwrap()
}

fn pt(c: &MordellCurve, x: &str, y: &str) -> CurvePoint {
    c.point(q(x), q(y)).unwrap()
}

fn assert_close(r: &RealCtx, got: &BigFloat, want: &str, tol: &str, what: &str) {
    let w = r.parse_decimal(want);
    let t = r.parse_decimal(tol);
    let diff = r.abs(&r.sub(got, &w));
    assert!(
        r.cmp(&diff, &t) == Ordering::Less,
        "{what}: got {}, want {want} (|diff| = {})",
        r.to_default_string(got),
        r.to_default_string(&diff)
    );
}

fn n3_specialization() -> mordell::family::Specialization {
    let fam = Family::new();
    specialize(fam.stage(StageName::N), &rat_int(3)).unwrap()
}

#[test]
fn archimedean_local_heights_match_oracles() {
    let hctx = HeightContext::new(60).unwrap();
    let r = hctx.real();
    let tol = "1e-48";

    let c1 = curve("1");
    let m1 = hctx.integralize(c1.d()).unwrap();
    assert_close(
        r,
        &hctx.local_height_arch(&m1, &pt(&c1, "0", "1")).unwrap(),
        "0.462098120373296872944821414305451045383666756240170169413787",
        tol,
        "lambda_inf(d=1, (0,1))",
    );
    assert_close(
        r,
        &hctx.local_height_arch(&m1, &pt(&c1, "2", "3")).unwrap(),
        "1.01140426470735171864244403276671389770741203515154489528113",
        tol,
        "lambda_inf(d=1, (2,3))",
    );
    // At the 2-torsion point the archimedean part is exactly (log 3)/2.
    let half_log3 = r.mul(&r.ln(&r.from_i64(3)), &r.from_ratio(&rat(1, 2)));
    let got = hctx.local_height_arch(&m1, &pt(&c1, "-1", "0")).unwrap();
    let diff = r.abs(&r.sub(&got, &half_log3));
    assert!(r.cmp(&diff, &r.parse_decimal(tol)) == Ordering::Less);

    let c2 = curve("-2");
    let m2 = hctx.integralize(c2.d()).unwrap();
    assert_close(
        r,
        &hctx.local_height_arch(&m2, &pt(&c2, "3", "5")).unwrap(),
        "1.34957683568011804547776118564460186905968074585299447086048",
        tol,
        "lambda_inf(d=-2, (3,5))",
    );
}

#[test]
fn nonarchimedean_exponents_match_oracles() {
    let hctx = HeightContext::new(30).unwrap();
    let c1 = curve("1");
    let m1 = hctx.integralize(c1.d()).unwrap();
    let two = BigInt::from(2);
    let three = BigInt::from(3);

    let cases: &[(&str, &str, &BigInt, &str)] = &[
        ("0", "1", &two, "-2/3"),
        ("2", "3", &three, "-1/2"),
        ("2", "3", &two, "-2/3"),
        ("-1", "0", &two, "0"),
        ("-1", "0", &three, "-1/2"),
    ];
    for (x, y, p, want) in cases {
        let got = hctx.mu_exponent(&m1, &pt(&c1, x, y), p).unwrap();
        assert_eq!(got, q(want), "mu_{p}(d=1, ({x},{y}))");
    }
}

#[test]
fn canonical_heights_match_oracles() {
    let hctx = HeightContext::new(60).unwrap();
    let r = hctx.real();
    let tol = "1e-48";

    let cases: &[(&str, &str, &str, &str)] = &[
        (
            "2",
            "-1",
            "1",
            "0.754576903181227264422071178458682024433204830709677002217118",
        ),
        (
            "-2",
            "3",
            "5",
            "1.34957683568011804547776118564460186905968074585299447086048",
        ),
        (
            "8",
            "1",
            "3",
            "0.653234677542976856520153537176789099277710746077702118714417",
        ),
        (
            "8",
            "2",
            "4",
            "0.653234677542976856520153537176789099277710746077702118714417",
        ),
        (
            "-4",
            "2",
            "2",
            "0.450320685639874993531863563969484614747051054748530565560661",
        ),
    ];
    for (d, x, y, want) in cases {
        let c = curve(d);
        let got = hctx.canonical_height(&c, &pt(&c, x, y)).unwrap();
        assert_close(r, &got, want, tol, &format!("h(d={d}, ({x},{y}))"));
    }
}

#[test]
fn torsion_points_have_vanishing_height() {
    let hctx = HeightContext::new(40).unwrap();
    let r = hctx.real();
    let bound = r.parse_decimal("1e-35");

    let c1 = curve("1");
    for (x, y) in [("0", "1"), ("0", "-1"), ("-1", "0"), ("2", "3"), ("2", "-3")] {
        let p = pt(&c1, x, y);
        assert!(c1.is_torsion(&p));
        let h = r.abs(&hctx.canonical_height(&c1, &p).unwrap());
        assert!(
            r.cmp(&h, &bound) == Ordering::Less,
            "h(d=1, ({x},{y})) = {}",
            r.to_default_string(&h)
        );
    }

    // Fractional torsion on a non-integral model.
    let c = curve("1/64");
    let p = pt(&c, "1/2", "3/8");
    assert!(c.is_torsion(&p));
    let h = r.abs(&hctx.canonical_height(&c, &p).unwrap());
    assert!(r.cmp(&h, &bound) == Ordering::Less);
}

#[test]
fn height_is_quadratic_under_doubling() {
    let hctx = HeightContext::new(40).unwrap();
    let r = hctx.real();
    let tol = r.parse_decimal("1e-20");
    let four = r.from_i64(4);

    let spec = n3_specialization();
    let c2 = curve("-2");
    let samples: Vec<(MordellCurve, CurvePoint)> = vec![
        (c2.clone(), pt(&c2, "3", "5")),
        (spec.curve.clone(), spec.points[0].clone()),
        (spec.curve.clone(), spec.points[1].clone()),
    ];
    for (c, p) in &samples {
        let h1 = hctx.canonical_height(c, p).unwrap();
        let h2 = hctx.canonical_height(c, &c.double(p)).unwrap();
        let diff = r.abs(&r.sub(&h2, &r.mul(&four, &h1)));
        assert!(
            r.cmp(&diff, &tol) == Ordering::Less,
            "h(2P) - 4h(P) = {}",
            r.to_default_string(&diff)
        );
    }
}

#[test]
fn parallelogram_law_holds() {
    let hctx = HeightContext::new(40).unwrap();
    let r = hctx.real();
    let tol = r.parse_decimal("1e-20");
    let two = r.from_i64(2);

    let spec = n3_specialization();
    let c = &spec.curve;
    let pairs = [(0usize, 1usize), (0, 2), (1, 2)];
    for (i, j) in pairs {
        let p = &spec.points[i];
        let qq = &spec.points[j];
        let sum = hctx.canonical_height(c, &c.add(p, qq)).unwrap();
        let dif = hctx.canonical_height(c, &c.sub(p, qq)).unwrap();
        let hp = hctx.canonical_height(c, p).unwrap();
        let hq = hctx.canonical_height(c, qq).unwrap();
        let lhs = r.add(&sum, &dif);
        let rhs = r.mul(&two, &r.add(&hp, &hq));
        let diff = r.abs(&r.sub(&lhs, &rhs));
        assert!(
            r.cmp(&diff, &tol) == Ordering::Less,
            "parallelogram defect for (P{}, P{}) = {}",
            i + 1,
            j + 1,
            r.to_default_string(&diff)
        );
    }
}

#[test]
fn published_curve_heights_pairings_and_regulator() {
    let hctx = HeightContext::new(50).unwrap();
    let r = hctx.real();
    let spec = n3_specialization();
    let c = &spec.curve;
    let tol = "1e-30";

    // Integral model bookkeeping.
    let model = hctx.integralize(&spec.d).unwrap();
    assert_eq!(model.d_int(), &BigInt::from(38432465764u64));
    assert_eq!(model.scale(), &q("56/3"));

    // Heights of the three construction points.
    let h_want = [
        "4.48202655397361867835659911020661663331",
        "4.20817657953721053378545734720074124595",
        "4.44375606530821807176455960508430284658",
    ];
    for (p, want) in spec.points.iter().zip(h_want) {
        let got = hctx.canonical_height(c, p).unwrap();
        assert_close(r, &got, want, tol, "height at n = 3");
    }

    // All nine pairings: symmetry, diagonal = height, off-diagonal oracles.
    let pair_want = [
        "0.292042143414275485952079290828480442943",
        "-0.123612124425791461848717389148593945205",
        "-0.0533169010789608431010015119433636694039",
    ];
    let idx = [(0usize, 1usize, 0usize), (0, 2, 1), (1, 2, 2)];
    for (i, j, w) in idx {
        let pij = hctx.nt_pairing(c, &spec.points[i], &spec.points[j]).unwrap();
        let pji = hctx.nt_pairing(c, &spec.points[j], &spec.points[i]).unwrap();
        assert_close(r, &pij, pair_want[w], tol, "off-diagonal pairing");
        let sym = r.abs(&r.sub(&pij, &pji));
        assert!(r.cmp(&sym, &r.parse_decimal("1e-30")) == Ordering::Less);
    }
    for (p, want) in spec.points.iter().zip(h_want) {
        let diag = hctx.nt_pairing(c, p, p).unwrap();
        assert_close(r, &diag, want, "1e-25", "diagonal pairing");
    }

    // Regulator, eigenvalues, certified rank.
    let report = gram_regulator(&hctx, c, &spec.points).unwrap();
    assert_close(
        r,
        &report.regulator,
        "83.3621963770719290707328769517702369077251423161058201664698",
        tol,
        "regulator at n = 3",
    );
    assert_eq!(report.rank_lower_bound, 3);
    let eig_want = [4.02140407f64, 4.38295493, 4.72960019];
    assert_eq!(report.eigenvalues.len(), 3);
    for (e, w) in report.eigenvalues.iter().zip(eig_want) {
        assert!((r.to_f64(e) - w).abs() < 1e-6);
    }
}

#[test]
fn regulators_match_oracles_across_parameters() {
    let hctx = HeightContext::new(50).unwrap();
    let r = hctx.real();
    let fam = Family::new();
    let cases: &[(&str, &str)] = &[
        ("1/3", "238.805047561082097558435176897884824103"),
        ("1/2", "10.7174741804544127524502811786863657085"),
        ("5", "10.7174741804544127524502811786863657085"),
        ("-7/5", "392.344934720480670164334592542967076851"),
    ];
    for (n0, want) in cases {
        let spec = specialize(fam.stage(StageName::N), &q(n0)).unwrap();
        let report = gram_regulator(&hctx, &spec.curve, &spec.points).unwrap();
        assert_close(r, &report.regulator, want, "1e-25", &format!("regulator at n = {n0}"));
        assert_eq!(report.rank_lower_bound, 3, "rank bound at n = {n0}");
    }
}

#[test]
fn halved_normalization_scales_consistently() {
    let full = HeightContext::new(50).unwrap();
    let halved = HeightContext::new(50).unwrap().with_normalization(Normalization::Halved);
    assert_eq!(halved.normalization(), Normalization::Halved);
    let r = full.real();

    let c = curve("-2");
    let p = pt(&c, "3", "5");
    let hf = full.canonical_height(&c, &p).unwrap();
    let hh = halved.canonical_height(&c, &p).unwrap();
    let diff = r.abs(&r.sub(&hf, &r.mul(&r.from_i64(2), &hh)));
    assert!(r.cmp(&diff, &r.parse_decimal("1e-40")) == Ordering::Less);

    // A rank-3 Gram determinant picks up a factor of 2^3.
    let spec = n3_specialization();
    let rf = gram_regulator(&full, &spec.curve, &spec.points).unwrap();
    let rh = gram_regulator(&halved, &spec.curve, &spec.points).unwrap();
    let diff = r.abs(&r.sub(&rf.regulator, &r.mul(&r.from_i64(8), &rh.regulator)));
    assert!(r.cmp(&diff, &r.parse_decimal("1e-25")) == Ordering::Less);
}

#[test]
fn doubling_limit_estimate_approximates_height() {
    let hctx = HeightContext::new(40).unwrap();
    let r = hctx.real();
    let c = curve("-2");
    let p = pt(&c, "3", "5");
    let est = hctx.doubling_limit_estimate(&c, &p, 5).unwrap();
    assert_close(
        r,
        &est,
        "1.34957683568011804547776118564460186905968074585299447086048",
        "1e-2",
        "definition-level estimate",
    );
}

#[test]
fn precision_scaling_is_consistent() {
    // The default-precision regulator agrees with a higher-precision rerun.
    let spec = n3_specialization();
    let lo = HeightContext::new(30).unwrap();
    let hi = HeightContext::new(80).unwrap();
    let rl = gram_regulator(&lo, &spec.curve, &spec.points).unwrap();
    let rh = gram_regulator(&hi, &spec.curve, &spec.points).unwrap();
    let r = hi.real();
    let diff = r.abs(&r.sub(&rl.regulator, &rh.regulator));
    assert!(r.cmp(&diff, &r.parse_decimal("1e-25")) == Ordering::Less);
}

#[test]
fn published_model_exponents_match_oracles() {
    let hctx = HeightContext::new(30).unwrap();
    let spec = n3_specialization();
    let model = hctx.integralize(&spec.d).unwrap();
    let pts: Vec<CurvePoint> = spec.points.iter().map(|p| model.to_integral(p)).collect();

    assert_eq!(pts[0].x().unwrap(), &q("42009/4"));
    assert_eq!(pts[1].x().unwrap(), &q("-20636/9"));
    assert_eq!(pts[2].x().unwrap(), &q("1596"));

    // mu exponents over the primes dividing 6·D.
    let table: &[(usize, i64, &str)] = &[
        (0, 2, "2"),
        (0, 7, "0"),
        (0, 11, "-2/3"),
        (0, 19, "-2/3"),
        (0, 67, "-2/3"),
        (1, 2, "-4/3"),
        (1, 3, "2"),
        (1, 7, "-2/3"),
        (1, 11, "-2/3"),
        (1, 19, "0"),
        (1, 67, "-2/3"),
        (2, 2, "-4/3"),
        (2, 3, "0"),
        (2, 7, "-2/3"),
        (2, 11, "0"),
        (2, 19, "-2/3"),
        (2, 67, "0"),
    ];
    for (i, p, want) in table {
        let got = hctx.mu_exponent(&model, &pts[*i], &BigInt::from(*p)).unwrap();
        assert_eq!(got, q(want), "mu_{p}(P{})", i + 1);
    }
}
