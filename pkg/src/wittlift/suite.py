"""The acceptance battery behind ``wittlift suite``.

Each ``criterion_N`` returns a plain dict with a boolean ``passed`` and
deterministic details (no timings), so that two runs serialize identically.
The curve computations shared by criteria 4-6 are cached per process.
"""

from __future__ import annotations

import json
import random
from functools import lru_cache

from . import crysfrob, frobord, qfsplit
from .canlift import (
    in_twist_orbit,
    twist_orbit,
    legendre_modular_frobenius,
    weierstrass_canonical_lift,
    weierstrass_form,
)
from .exactring import Modulus, ModPoly, TruncSeries, parse_poly
from .fsplit import fedder_fsplit_test
from .hassewitt import hasse_scalar, smooth_curves
from .witt2 import Witt2, embed_zp2, ghost_value

SEED = 20240229


def _result(n, title, tolerance, checks: dict, **details):
    return {
        "criterion": n,
        "title": title,
        "tolerance": tolerance,
        "checks": checks,
        "passed": all(checks.values()),
        "details": details,
    }


# 1 -------------------------------------------------------------------------


def witt_exhaustive(p: int) -> int:
    """Number of (m, n) pairs where W_2(F_p) disagrees with Z/p^2; 0 is a pass."""
    q = p * p
    E = [embed_zp2(n, p) for n in range(q)]
    bad = sum(ghost_value(x) != n for n, x in enumerate(E))
    bad += sum(ghost_value(-x) != (-n) % q for n, x in enumerate(E))
    for m in range(q):
        x = E[m]
        for n in range(q):
            y = E[n]
            if (
                ghost_value(x + y) != (m + n) % q
                or ghost_value(x * y) != (m * n) % q
                or ghost_value(x - y) != (m - n) % q
            ):
                bad += 1
    return bad


def _random_witt2(p, rng, vars=("x",)):
    m = Modulus(p)

    def poly():
        terms = {}
        for _ in range(rng.randint(0, 3)):
            terms[(rng.randint(0, 3),)] = rng.randrange(p)
        return ModPoly(m, vars, terms)

    return Witt2(poly(), poly())


def witt_axioms(p: int, trials: int, seed: int = SEED) -> int:
    """Ring-axiom violations on random triples in W_2(F_p[x])."""
    rng = random.Random(seed)
    bad = 0
    for _ in range(trials):
        x, y, z = (_random_witt2(p, rng) for _ in range(3))
        one = x.one_like()
        zero = x.zero_like()
        ok = (
            (x + y) + z == x + (y + z)
            and x + y == y + x
            and (x * y) * z == x * (y * z)
            and x * y == y * x
            and x * (y + z) == x * y + x * z
            and x * one == x
            and x + zero == x
            and x + (-x) == zero
        )
        bad += not ok
    return bad


def criterion_1():
    exhaustive = {str(p): witt_exhaustive(p) for p in (3, 5, 7, 13)}
    axioms = {str(p): witt_axioms(p, 250) for p in (3, 5, 7, 13)}
    checks = {
        "exhaustive_ghost_match": all(v == 0 for v in exhaustive.values()),
        "ring_axioms": all(v == 0 for v in axioms.values()),
    }
    return _result(
        1,
        "W_2(F_p) matches Z/p^2 through the ghost map; ring axioms",
        "exact",
        checks,
        mismatches=exhaustive,
        axiom_failures=axioms,
        random_triples=1000,
    )


# 2 -------------------------------------------------------------------------


def ordinarity_table(p: int):
    rows = []
    for a, b in smooth_curves(p):
        fedder = fedder_fsplit_test(weierstrass_form(a, b, p)).split
        hasse = hasse_scalar(a, b, p) != 0
        counted = crysfrob.point_count_ap(a, b, p) % p != 0
        rows.append((a, b, fedder, hasse, counted))
    return rows


def criterion_2():
    details = {}
    ok = True
    for p in (5, 7):
        rows = ordinarity_table(p)
        disagree = [[a, b] for a, b, f, h, c in rows if not f == h == c]
        ok = ok and not disagree
        details[str(p)] = {
            "curves": len(rows),
            "ordinary": sum(r[3] for r in rows),
            "disagreements": disagree,
        }
    return _result(2, "Fedder test, Hasse scalar and a_p mod p agree", "exact", {"agreement": ok}, **details)


# 3 -------------------------------------------------------------------------


def criterion_3():
    vals = {}
    for p in (5, 7):
        f = parse_poly("x^3 + y^3 + z^3", Modulus(p))
        vals[str(p)] = fedder_fsplit_test(f).hasse_scalar
    checks = {"p7_is_6": vals["7"] == 6, "p5_is_0": vals["5"] == 0}
    return _result(3, "Fermat cubic Hasse scalars", "exact", checks, hasse_scalars=vals)


# 4-6 -----------------------------------------------------------------------


def ordinary_curves(p: int):
    return [(a, b) for a, b in smooth_curves(p) if hasse_scalar(a, b, p)]


def sampled_curves(p: int):
    """All ordinary curves for p = 5; every third one (in sorted order) otherwise."""
    curves = ordinary_curves(p)
    return curves if p == 5 else curves[::3]


@lru_cache(maxsize=None)
def curve_battery(a: int, b: int, p: int):
    """Everything criteria 4-6 need about one ordinary curve."""
    canon = weierstrass_canonical_lift(a, b, p)
    mats = crysfrob.lift_matrices(a, b, p)
    ap = crysfrob.point_count_ap(a, b, p)
    preserved = sorted((m.a_tilde, m.b_tilde) for m in mats if crysfrob.f1_preserved(m))
    canon_mat = next(m for m in mats if (m.a_tilde, m.b_tilde) == (canon.a_tilde, canon.b_tilde))
    q = p * p
    anchors_bad = [
        [m.a_tilde, m.b_tilde] for m in mats if m.trace != ap % q or m.det != p % q
    ]
    beta = crysfrob.beta_scalar(canon_mat) if crysfrob.f1_preserved(canon_mat) else None
    return {
        "canonical": [canon.a_tilde, canon.b_tilde],
        "canonical_preserves_f1": crysfrob.f1_preserved(canon_mat),
        "f1_lifts": [list(x) for x in preserved],
        "single_orbit": preserved == twist_orbit(canon.a_tilde, canon.b_tilde, p),
        "contains_canonical": (canon.a_tilde, canon.b_tilde) in preserved,
        "matrices": len(mats),
        "anchor_failures": anchors_bad,
        "a_p": ap,
        "beta": beta,
    }


def _battery(p: int):
    return {f"{a},{b}": curve_battery(a, b, p) for a, b in sampled_curves(p)}


def criterion_4():
    checks = {}
    details = {}
    for p in (5, 7):
        rows = _battery(p)
        checks[f"p{p}_canonical_preserves_f1"] = all(r["canonical_preserves_f1"] for r in rows.values())
        checks[f"p{p}_single_twist_orbit"] = all(
            r["single_orbit"] and r["contains_canonical"] for r in rows.values()
        )
        details[str(p)] = {
            "curves": len(rows),
            "lifts_per_curve": p * p,
            "f1_lift_counts": sorted({len(r["f1_lifts"]) for r in rows.values()}),
            "failures": sorted(
                k for k, r in rows.items()
                if not (r["canonical_preserves_f1"] and r["single_orbit"] and r["contains_canonical"])
            ),
        }
    return _result(4, "canonical lift preserves F^1 and the F^1 lifts form one twist orbit", "exact", checks, **details)


def criterion_5():
    checks = {}
    details = {}
    for p in (5, 7):
        rows = _battery(p)
        bad = {k: r["anchor_failures"] for k, r in rows.items() if r["anchor_failures"]}
        checks[f"p{p}_trace_and_det"] = not bad
        details[str(p)] = {"matrices": sum(r["matrices"] for r in rows.values()), "failures": bad}
    return _result(5, "trace = a_p and det = p mod p^2", "exact", checks, **details)


def criterion_6():
    checks = {}
    details = {}
    for p in (5, 7):
        rows = _battery(p)
        bad = sorted(
            k for k, r in rows.items() if r["beta"] is None or (r["beta"] * r["a_p"]) % p != 1
        )
        checks[f"p{p}_beta_times_ap"] = not bad
        details[str(p)] = {"curves": len(rows), "failures": bad}
    return _result(6, "beta * a_p = 1 mod p on canonical lifts", "exact", checks, **details)


# 7 -------------------------------------------------------------------------


def random_ordinary_lift(p: int, r: int, rng: random.Random, degree: int = 3) -> frobord.FrobeniusLift:
    """t_i -> t_i^p + p f_i with f_i = c_i + t_i + random terms of degree 2..degree.

    The Jacobian at 0 is the identity, so the lift is ordinary and every
    constant vector is fixed by J(0)^T; the fixed-form space then has full
    dimension r.
    """
    vars = tuple("stu"[:r])
    m2 = Modulus(p, 2)
    images = []
    for i in range(r):
        terms = {tuple(int(j == i) for j in range(r)): 1, (0,) * r: rng.randrange(p * p)}
        for _ in range(3):
            e = [0] * r
            for _ in range(rng.randint(2, degree)):
                e[rng.randrange(r)] += 1
            e = tuple(e)
            terms[e] = (terms.get(e, 0) + rng.randrange(p * p)) % (p * p)
        images.append(ModPoly(m2, vars, terms))
    return frobord.FrobeniusLift(p, vars, tuple(images))


# truncation per (p, r) keeping the cost of the three-variable cases small
_DEGREES = {1: 12, 2: 8, 3: 5}


def _lift_sample(n: int, seed: int = SEED):
    rng = random.Random(seed)
    out = []
    for k in range(n):
        p = (3, 5, 7)[k % 3]
        r = 1 + (k // 3) % 3
        D = rng.randint(2, _DEGREES[r])
        out.append((p, r, D, random_ordinary_lift(p, r, rng)))
    return out


def _random_form(F, D, rng):
    m1 = Modulus(F.p)
    comps = []
    for _ in range(F.r):
        terms = {}
        for _ in range(4):
            e = [0] * F.r
            for _ in range(rng.randint(0, D)):
                e[rng.randrange(F.r)] += 1
            terms[tuple(e)] = rng.randrange(F.p)
        comps.append(TruncSeries(m1, F.vars, D, terms))
    return frobord.OneForm(tuple(comps))


def multiplicative_suite(p: int, D: int = 20) -> dict:
    F = frobord.FrobeniusLift.multiplicative(p)
    forms = frobord.fixed_forms(F, D)
    m1 = Modulus(p)
    t = TruncSeries(m1, F.vars, D + 1, {(1,): 1})
    one = TruncSeries(m1, F.vars, D + 1, {(0,): 1})
    expected = frobord.dlog(one + t).truncate(D)
    coords = frobord.multiplicative_coordinates(F, D)
    qt = coords.q_tilde[0]
    target = TruncSeries(Modulus(p, 2), F.vars, D, {(0,): 1, (1,): 1})
    return {
        "dimension": len(forms),
        "form_is_dlog": len(forms) == 1 and forms[0] == expected,
        "teichmuller_point": list(frobord.teichmuller_point(F)),
        "q_tilde_is_1_plus_t": qt == target,
    }


def ambiguity_sample(n: int = 50, seed: int = SEED):
    """Two solver runs per sampled lift; per-lift results of every check."""
    rows = []
    for idx, (p, r, D, F) in enumerate(_lift_sample(n, seed)):
        forms = frobord.fixed_forms(F, p * D - 1)
        c1 = frobord.multiplicative_coordinates(F, D)
        c2 = frobord.multiplicative_coordinates(
            F, D, tie_break="random", rng=random.Random(seed + idx), validate=False
        )
        diffs = [a - b for a, b in zip(c1.q_tilde, c2.q_tilde)]
        rng = random.Random(seed ^ idx)
        Dw = max(1, D // 2)
        d_xi = all(
            frobord.xi_apply(F, _random_form(F, Dw, rng)).is_closed()
            for _ in range(2)
        )
        rows.append(
            {
                "p": p,
                "r": r,
                "D": D,
                "dimension": len(forms),
                "runs_differ": any(not d.is_zero() for d in diffs),
                "containment": all(frobord.in_frobenius_ideal(F, d) for d in diffs),
                "weak_containment": all(frobord.in_point_ideal_power(F, d) for d in diffs),
                "d_xi_zero": d_xi,
            }
        )
    return rows


@lru_cache(maxsize=None)
def _criterion_7_data():
    mult = {str(p): multiplicative_suite(p) for p in (3, 5, 7)}
    rows = ambiguity_sample()
    return mult, rows


def criterion_7():
    mult, rows = _criterion_7_data()
    checks = {
        "multiplicative_lift": all(
            v["dimension"] == 1 and v["form_is_dlog"] and v["teichmuller_point"] == [0] and v["q_tilde_is_1_plus_t"]
            for v in mult.values()
        ),
        "fixed_form_dimension": all(r["dimension"] == r["r"] for r in rows),
        "d_xi_vanishes": all(r["d_xi_zero"] for r in rows),
        "ambiguity_containment": all(r["containment"] for r in rows),
    }
    return _result(
        7,
        "multiplicative coordinates on formal disks",
        "exact",
        checks,
        multiplicative=mult,
        lifts=len(rows),
        containment_failures=sum(not r["containment"] for r in rows),
        runs_that_differ=sum(r["runs_differ"] for r in rows),
        weak_containment_failures=sum(not r["weak_containment"] for r in rows),
    )


# 8 -------------------------------------------------------------------------


def legendre_check(p: int) -> dict:
    L = legendre_modular_frobenius(p)
    bad_lift = []
    bad_scalar = []
    for lam in L.ordinary_points:
        A, B = L.specialization(lam)
        canon = weierstrass_canonical_lift(A % p, B % p, p)
        if not in_twist_orbit((A, B), (canon.a_tilde, canon.b_tilde), p):
            bad_lift.append(lam)
        if L.ordinarity_scalar(lam) == 0:
            bad_scalar.append(lam)
    return {
        "ordinary_points": list(L.ordinary_points),
        "specialization_failures": bad_lift,
        "ordinarity_failures": bad_scalar,
    }


def criterion_8():
    details = {str(p): legendre_check(p) for p in (5, 7)}
    checks = {
        "specializes_to_canonical": all(not v["specialization_failures"] for v in details.values()),
        "ordinary_frobenius": all(not v["ordinarity_failures"] for v in details.values()),
    }
    return _result(8, "Legendre-line Frobenius lift", "exact", checks, **details)


# 9 -------------------------------------------------------------------------


def witt_quotient_properties(seed: int = SEED, trials: int = 10) -> dict:
    rng = random.Random(seed)
    p = 3
    vars = ("x",)
    out = {}
    ok = True
    for m in (2, 3):
        for _ in range(trials):
            x = qfsplit.random_poly(p, vars, rng, 4, 3)
            y = qfsplit.random_poly(p, vars, rng, 4, 3)
            ok &= qfsplit.rho(x + y, m) == qfsplit.rho(x, m) + qfsplit.rho(y, m)
            ok &= qfsplit.rho(x, m).vec.restrict(m - 1).comps[0] == x**p
    out["rho_additive"] = bool(ok)
    ok = True
    for m in (2, 3):
        for _ in range(trials):
            u = qfsplit.random_witt(m - 1, p, vars, rng, 4, 3)
            v = qfsplit.random_witt(m - 1, p, vars, rng, 4, 3)
            ok &= qfsplit.WittBar(u.verschiebung() * v.verschiebung()).is_zero()
            ok &= qfsplit.WittBar(u.extend(m) * p).is_zero()
    out["v_times_v_zero"] = bool(ok)
    ideal = True
    times_p = True
    for level in (1, 2):
        L = qfsplit.quasi_canonical_lift(qfsplit.affine_line_splitting(p, level))
        for _ in range(20):
            x = qfsplit.random_witt(level + 1, p, vars, rng, 2 * p * p, 3)
            u = L.kernel_element(qfsplit.random_witt(level, p, vars, rng, 2 * p * p, 3))
            ideal &= L.in_ideal(x * u.verschiebung())
            times_p &= L.times_p_check(x)
    out["kernel_ideal"] = bool(ideal)
    out["multiplication_by_p"] = bool(times_p)
    return out


def heights(p: int) -> dict:
    rows = {}
    for a, b in smooth_curves(p):
        h = qfsplit.qf_height_elliptic(a, b, p)
        rows[f"{a},{b}"] = h.height
    return rows


def criterion_9():
    props = witt_quotient_properties()
    checks = dict(props)
    details = {"properties": props}
    for p in (5, 7):
        hs = heights(p)
        expected = {f"{a},{b}": 1 if hasse_scalar(a, b, p) else 2 for a, b in smooth_curves(p)}
        checks[f"p{p}_heights"] = hs == expected
        details[str(p)] = {
            "height_1": sum(v == 1 for v in hs.values()),
            "height_2": sorted(k for k, v in hs.items() if v == 2),
        }
    return _result(9, "quasi-F-splittings and heights", "exact", checks, **details)


# 10 ------------------------------------------------------------------------


DETERMINISM_COMMANDS = (
    ["hasse", "--curve", "1,0", "-p", "5"],
    ["fsplit", "--poly", "x^3+y^3+z^3", "-p", "7"],
    ["canlift", "--curve", "1,0", "-p", "5"],
    ["canlift", "--legendre", "-p", "5", "-D", "8"],
    ["frobmat", "--curve", "1,1", "-p", "5"],
    ["coords", "--lift", "((1+t)^p-1-t^p)/p", "-p", "5", "-D", "12"],
    ["qfsplit", "--curve", "0,1", "-p", "5"],
)


def criterion_10():
    from .cli import run

    same = {}
    for argv in DETERMINISM_COMMANDS:
        first = run(argv)
        second = run(argv)
        same[" ".join(argv)] = first == second
    return _result(
        10,
        "CLI output is byte-identical across runs",
        "exact",
        {"in_process_repeat": all(same.values())},
        commands=same,
    )


CRITERIA = {
    1: criterion_1,
    2: criterion_2,
    3: criterion_3,
    4: criterion_4,
    5: criterion_5,
    6: criterion_6,
    7: criterion_7,
    8: criterion_8,
    9: criterion_9,
    10: criterion_10,
}


def run_suite(only=None) -> dict:
    ids = sorted(CRITERIA) if not only else sorted(set(only))
    results = [CRITERIA[i]() for i in ids]
    return {"criteria": results, "passed": all(r["passed"] for r in results)}


def report_lines(report: dict):
    for r in report["criteria"]:
        status = "PASS" if r["passed"] else "FAIL"
        failed = [k for k, v in r["checks"].items() if not v]
        tail = f" (failed: {', '.join(failed)})" if failed else ""
        yield f"criterion {r['criterion']}: {status} [{r['tolerance']}] {r['title']}{tail}"


def dumps(report: dict) -> str:
    return json.dumps(report, sort_keys=True)
