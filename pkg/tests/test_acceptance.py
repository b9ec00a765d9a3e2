"""Acceptance criteria 1-10, each at its stated tolerance.

Every test prints one ``criterion N: PASS|FAIL`` line; the terminal summary
(see conftest) repeats them after the run.
"""
import math
import time
from collections import Counter

import pytest

from latvol import catalog
from latvol.catalog import COUNTEREXAMPLE, TABLE1
from latvol.checker import (
    Verdict,
    check_bounds,
    medial_truncation_family,
    proof_constants,
    table1,
)
from latvol.entropy import (
    LaurentPoly2,
    entropy_finite_size,
    entropy_logdet,
    mahler_measure,
    tau_exact,
    tau_log_fourier,
)
from latvol.hyp import V_OCT, V_TET, bipyramid_volume
from latvol.invariants import nu_bar, nu_bipyramid, regular_angles, right_angled_volume
from latvol.torus_map import (
    MultiGraph,
    cover,
    degree_multiset,
    dual,
    faces,
    isomorphic,
    medial,
    parallel_edges,
    temperleyan,
    truncate,
    validate,
)

TWO_PI = 2 * math.pi

# printed bipyramid volumes; 81.5409 is given to four decimals
BIPYRAMID_TABLE = {
    2: 0.0, 3: 2.02988, 4: 3.66386, 5: 4.98677, 6: 6.08965, 7: 7.03257, 8: 7.85498,
    9: 8.58367, 10: 9.23755, 11: 9.83040, 12: 10.37255, 13: 10.87192, 14: 11.33474,
    15: 11.76597, 20: 13.56682, 100: 23.67095, 1000: 38.13817, 10**6: 81.5409,
}

COUNTEREXAMPLE_POLY = """\
-1 4 1
1 2 2
11 3 1
1 1 2
-24 2 1
1 3 0
11 1 1
1 2 0
-1 0 1
"""


def report(n, ok, detail=""):
    print(f"criterion {n}: {'PASS' if ok else 'FAIL'} {detail}")
    return ok


@pytest.mark.criterion(1, "bipyramid table")
def test_criterion_1_bipyramid_table():
    t = time.perf_counter()
    devs = {n: abs(bipyramid_volume(n) - v) for n, v in BIPYRAMID_TABLE.items()}
    elapsed = time.perf_counter() - t
    tol = {n: (1e-4 if n == 10**6 else 5e-6) for n in BIPYRAMID_TABLE}
    bad = {n: d for n, d in devs.items() if d > tol[n]}
    ok = len(devs) == 18 and not bad and elapsed < 1.0
    report(1, ok, f"max dev {max(devs.values()):.1e}, {elapsed * 1e3:.1f} ms")
    assert not bad
    assert elapsed < 1.0


@pytest.mark.criterion(2, "regular-lattice identities")
def test_criterion_2_regular_identities(entries):
    tri, sq, hx = (entries[n].map for n in ("triangular", "square", "hexagonal"))
    checks = [
        abs(nu_bipyramid(tri) - 10 * V_TET) <= 1e-12,
        abs(nu_bipyramid(sq) - 2 * V_OCT) <= 1e-12,
        abs(nu_bar(sq) - 2 * V_OCT) <= 1e-12,
        abs(2 * nu_bipyramid(hx) - 10 * V_TET) <= 1e-12,
        abs(right_angled_volume(tri, regular_angles(tri)) - 10 * V_TET) <= 1e-9,
        abs(right_angled_volume(sq, regular_angles(sq)) - 2 * V_OCT) <= 1e-9,
        abs(right_angled_volume(hx, regular_angles(hx)) - 10 * V_TET) <= 1e-9,
    ]
    report(2, all(checks), f"{sum(checks)}/{len(checks)} identities")
    assert all(checks)


@pytest.mark.criterion(3, "table reproduction")
def test_criterion_3_table():
    t = time.perf_counter()
    reps = table1(tol=1e-4)
    elapsed = time.perf_counter() - t
    bad = []
    for r in reps:
        row = TABLE1[r.name]
        if r.error:
            bad.append((r.name, r.error))
            continue
        if abs(r.nu_diamond - row.nu_diamond) > 1e-5:
            bad.append((r.name, "nu_diamond", r.nu_diamond))
        if abs(r.nu_bar - row.nu_bar) > 1e-5:
            bad.append((r.name, "nu_bar", r.nu_bar))
        if abs(r.z - row.z) > 2e-3:
            bad.append((r.name, "z", r.z))
    worst_z = max(abs(r.z - TABLE1[r.name].z) for r in reps if r.z is not None)
    ok = len(reps) == 16 and not bad and elapsed < 300
    report(3, ok, f"16 rows, max |dz| {worst_z:.1e}, {elapsed:.1f} s")
    assert len(reps) == 16
    assert not bad, bad
    assert elapsed < 300


@pytest.mark.criterion(4, "counterexample ordering")
def test_criterion_4_counterexample():
    e = catalog.get("3^3-4^2")
    m = e.map
    two_pi_zfd = TWO_PI * entropy_logdet(m, tol=1e-4).value
    vsum = nu_bipyramid(m) * m.n_vertices
    evoct = nu_bar(m) * m.n_vertices
    rep = check_bounds(e)
    by = {v.label: v for v in rep.verdicts}
    checks = [
        17.676 <= two_pi_zfd <= 17.684,
        abs(vsum - COUNTEREXAMPLE["vol_diamond_sum"]) <= 1e-4,
        abs(evoct - COUNTEREXAMPLE["e_voct"]) <= 1e-4,
        by["lower"].verdict is Verdict.FAILS and rep.failed,
        e.references["vol_hyperbolic"] == 17.55732,
        by["volume-lower"].verdict is Verdict.HOLDS,
    ]
    report(4, all(checks), f"2pi zfd {two_pi_zfd:.5f}, vol sum {vsum:.5f}, |E| v_oct {evoct:.5f}")
    assert all(checks)


@pytest.mark.criterion(5, "Mahler cross-check")
def test_criterion_5_mahler():
    p = LaurentPoly2.parse(COUNTEREXAMPLE_POLY)
    mm = mahler_measure(p).value
    z = entropy_logdet(catalog.get("3^3-4^2").map, tol=1e-4).value
    ok = abs(mm - z) <= 2e-3
    report(5, ok, f"m(p) {mm:.6f} vs logdet {z:.6f}")
    assert ok


def brute_force_trees(n, edges):
    import itertools

    count = 0
    for sub in itertools.combinations(edges, n - 1):
        comp = list(range(n))
        for a, b in sub:
            ca, cb = comp[a], comp[b]
            comp = [ca if c == cb else c for c in comp]
        count += len(set(comp)) == 1
    return count


@pytest.mark.criterion(6, "oracle equivalence")
def test_criterion_6_oracles():
    worst = 0.0
    for name in catalog.names():
        m = catalog.get(name).map
        for n in (1, 2, 3, 4):
            worst = max(worst, abs(tau_log_fourier(m, n) - math.log(tau_exact(cover(m, n, n)))))
    k4 = [(a, b) for a in range(4) for b in range(a + 1, 4)]
    c4 = [(0, 1), (1, 2), (2, 3), (3, 0)]
    small = [
        tau_exact(MultiGraph(4, tuple(k4))) == 16 == brute_force_trees(4, k4),
        tau_exact(MultiGraph(4, tuple(c4))) == 4 == brute_force_trees(4, c4),
    ]
    ok = worst <= 1e-8 and all(small)
    report(6, ok, f"max |log tau diff| {worst:.1e} over {len(catalog.names())} lattices")
    assert worst <= 1e-8
    assert all(small)


@pytest.mark.criterion(7, "finite-size consistency")
def test_criterion_7_finite_size():
    refs = {
        "square": V_OCT / math.pi,
        "triangular": 10 * V_TET / TWO_PI,
        "hexagonal": 10 * V_TET / TWO_PI / 2,
    }
    devs = {}
    for name, z in refs.items():
        est = entropy_finite_size(catalog.get(name).map, (8, 16, 32, 64))
        devs[name] = abs(est.value - z)
    ok = all(d <= 1e-3 for d in devs.values())
    report(7, ok, ", ".join(f"{k} {v:.1e}" for k, v in devs.items()))
    assert ok, devs


@pytest.mark.criterion(8, "entropy shifts and proof constants")
def test_criterion_8_entropy_shifts():
    tol = 1e-6
    shifts = []
    for name in ("square", "hexagonal"):
        m = catalog.get(name).map
        z0 = entropy_logdet(m, tol=tol).value
        for s in (2, 3):
            z = entropy_logdet(parallel_edges(m, s), tol=tol).value
            # s parallel copies scale the symbol by s, so det gains s^|V|
            shifts.append((f"{name} G_{s}", z - z0, m.n_vertices * math.log(s)))
        if (m.degrees == 3).all():
            V = m.n_vertices
            zt = entropy_logdet(truncate(m), tol=tol).value
            zm = entropy_logdet(medial(m), tol=tol).value
            shifts.append((f"{name} truncate", zt - z0, V / 2 * math.log(15)))
            shifts.append((f"{name} medial", zm - z0, V / 2 * math.log(6)))
    bad = [(lab, got, want) for lab, got, want in shifts if abs(got - want) > 3e-3]
    consts = [
        math.pi * math.log(2) + 6 * V_TET < math.pi * math.log(15),
        3 * V_OCT < TWO_PI * math.log(6),
        math.log(15) < 6 * V_OCT / TWO_PI,
    ]
    checker_consts = all(v.verdict is Verdict.HOLDS for v in proof_constants())
    ok = not bad and all(consts) and checker_consts
    worst = max(abs(g - w) for _, g, w in shifts)
    report(8, ok, f"{len(shifts)} shifts, worst {worst:.1e}; constants {sum(consts)}/3")
    assert not bad, bad
    assert all(consts) and checker_consts


@pytest.mark.criterion(9, "medial-truncation family")
def test_criterion_9_family():
    fam = medial_truncation_family(3)
    closed = [v for fc in fam for v in fc.verdicts if v.label == "closed-form"]
    upper = [v for fc in fam for v in fc.verdicts if v.label == "strict-upper"]
    ok = (
        len(fam) == 4
        and all(abs(v.lhs) <= 1e-12 for v in closed)
        and all(v.verdict is Verdict.HOLDS and v.margin > 0 for v in upper)
    )
    report(9, ok, f"n = 0..3, min margin {min(v.margin for v in upper):.3f}")
    assert len(closed) == 4 and len(upper) == 4
    assert ok


def face_degrees(m):
    return degree_multiset(w.degree for w in faces(m))


@pytest.mark.criterion(10, "structural properties")
def test_criterion_10_structure():
    failures = []
    total = 0
    for name in catalog.names():
        m = catalog.get(name).map

        def check(label, cond):
            nonlocal total
            total += 1
            if not cond:
                failures.append((name, label))

        check("valid", validate(m).ok)
        check("euler", m.n_vertices - m.n_edges + m.n_faces == 0)
        check("dual involution", isomorphic(dual(dual(m)), m))
        md = medial(m)
        check("medial faces", face_degrees(md) == degree_multiset(list(m.degrees) + face_degrees(m)))
        check("medial 4-regular", bool((md.degrees == 4).all()) and md.n_vertices == m.n_edges)
        t = temperleyan(m)
        check("temperleyan balanced", t.n_black == t.map.n_vertices - t.n_black == m.n_edges)
        check("temperleyan quads", set(face_degrees(t.map)) == {4})
        if (m.degrees == 3).all():
            tr = truncate(m)
            check(
                "truncation counts",
                (tr.n_vertices, tr.n_edges, tr.n_faces) == (3 * m.n_vertices, 3 * m.n_edges, m.n_faces + m.n_vertices)
                and Counter(face_degrees(tr))[3] >= m.n_vertices,
            )
    ok = not failures
    report(10, ok, f"{total - len(failures)}/{total} checks")
    assert ok, failures
