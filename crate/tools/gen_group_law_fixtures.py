#!/usr/bin/env python3
"""Regenerate crates/mordell/tests/fixtures/group_law.json.

Independent oracle for the curve group law: everything here is computed with
stdlib Fraction arithmetic and shares no code with the Rust crate. The cases
pin chord-and-tangent addition and scalar multiplication on one concrete
curve y^2 = x^3 + d with three known rational points.

Deterministic (seeded); rerunning must reproduce the checked-in file.
"""

import json
import random
from fractions import Fraction
from pathlib import Path

# y^2 = x^3 + d and three points on it.
D = Fraction(142945242561, 157351936)
P1 = (Fraction(378081, 12544), Fraction(236300625, 1404928))
P2 = (Fraction(-737, 112), Fraction(-313225, 12544))
P3 = (Fraction(513, 112), Fraction(397575, 12544))

# None encodes the point at infinity.


def on_curve(p):
    if p is None:
        return True
    x, y = p
    return y * y == x * x * x + D


def neg(p):
    if p is None:
        return None
    return (p[0], -p[1])


def add(p, q):
    if p is None:
        return q
    if q is None:
        return p
    x1, y1 = p
    x2, y2 = q
    if x1 == x2:
        if y1 == -y2:
            return None
        lam = 3 * x1 * x1 / (2 * y1)
    else:
        lam = (y2 - y1) / (x2 - x1)
    x3 = lam * lam - x1 - x2
    y3 = lam * (x1 - x3) - y1
    return (x3, y3)


def mul(k, p):
    if k < 0:
        return mul(-k, neg(p))
    acc = None
    base = p
    while k:
        if k & 1:
            acc = add(acc, base)
        base = add(base, base)
        k >>= 1
    return acc


def mul_slow(k, p):
    # Cross-check for mul: repeated addition.
    if k < 0:
        return mul_slow(-k, neg(p))
    acc = None
    for _ in range(k):
        acc = add(acc, p)
    return acc


def enc(p):
    if p is None:
        return None
    return [str(p[0]), str(p[1])]


def add_case(name, p, q):
    r = add(p, q)
    assert on_curve(p) and on_curve(q) and on_curve(r), name
    return {"name": name, "op": "add", "p": enc(p), "q": enc(q), "expect": enc(r)}


def mul_case(name, k, p):
    r = mul(k, p)
    assert on_curve(p) and on_curve(r), name
    assert r == mul_slow(k, p), name
    return {"name": name, "op": "mul", "k": k, "p": enc(p), "expect": enc(r)}


def main():
    for p in (P1, P2, P3):
        assert on_curve(p)

    rng = random.Random(1729)
    cases = [
        add_case("o_plus_o", None, None),
        add_case("p1_plus_o", P1, None),
        add_case("o_plus_p2", None, P2),
        add_case("p1_plus_neg_p1", P1, neg(P1)),
        add_case("p1_doubled", P1, P1),
        add_case("p2_doubled", P2, P2),
        add_case("p1_plus_p2", P1, P2),
        add_case("p2_plus_p3", P2, P3),
        add_case("p1_plus_p3", P1, P3),
        add_case("p1p2_plus_p3", add(P1, P2), P3),
        mul_case("zero_times_p1", 0, P1),
        mul_case("one_times_p3", 1, P3),
        mul_case("neg_one_times_p2", -1, P2),
        mul_case("two_times_p1", 2, P1),
        mul_case("three_times_p2", 3, P2),
        mul_case("five_times_p3", 5, P3),
        mul_case("neg_three_times_p1", -3, P1),
        mul_case("four_times_p1p2", 4, add(P1, P2)),
        mul_case("seven_times_p2", 7, P2),
    ]

    # Random small combinations a*P1 + b*P2 + c*P3, added pairwise.
    combos = []
    while len(combos) < 12:
        a, b, c = (rng.randint(-2, 2) for _ in range(3))
        p = add(add(mul(a, P1), mul(b, P2)), mul(c, P3))
        if p is not None:
            combos.append((f"{a}p1{b:+}p2{c:+}p3", p))
    for i in range(6):
        (ln, lp), (rn, rp) = combos[2 * i], combos[2 * i + 1]
        cases.append(add_case(f"combo_{ln}_plus_{rn}", lp, rp))

    assert len(cases) == 25, len(cases)
    doc = {"d": str(D), "cases": cases}

    out = Path(__file__).resolve().parent.parent / "crates" / "mordell" / "tests" / "fixtures" / "group_law.json"
    out.parent.mkdir(parents=True, exist_ok=True)
    out.write_text(json.dumps(doc, indent=2) + "\n")
    print(f"wrote {out} ({len(cases)} cases)")


if __name__ == "__main__":
    main()
