"""Acceptance criteria AC1-AC11 as runnable checks.

Each ``criterion_N`` returns a dict with ``id``, ``title``, ``passed`` and
``details``; tolerances are pinned here, not passed in. The same functions
back ``tests/test_acceptance.py`` and the ``suite`` scenario kind.
"""

from __future__ import annotations

import time

import numpy as np

from . import hormander as hm
from . import maslov as ms
from . import surface as sf
from .symplectic import LagrangianFrame, random_lagrangian

# pairing(X, Y) = WINDING_SIGN * (index(Y) - index(X)); calibrated once on the
# rotating line against the constant horizontal section.
WINDING_SIGN = -1

AC1_RUNTIME_LIMIT = 10.0
AC7_MAX_AT_64 = 0.1
AC7_MIN_RATIO = 1.8
AC7_ROUNDOFF_FLOOR = 1e-12
AC8_TOL = {256: 0.05, 1024: 0.01}
AC8_RUNTIME_LIMIT = 30.0


def _result(cid, title, passed, **details):
    return {"id": f"AC{cid}", "title": title, "passed": bool(passed), "details": details}


# Shared suites

def parity_suite(seed=0, count=50):
    """50 loops through random planes plus k extra det^2 turns, k in 0..3."""
    return [ms.interpolated_random_loop(n=1 + i % 3, seed=[seed, i], k=i % 4)
            for i in range(count)]


def section_pair_suite(seed=0, count=20):
    """Seeded (X, Y) section pairs on a common grid, n in {1, 2, 3}."""
    pairs = []
    for i in range(count):
        n = 1 + i % 3
        x = hm.random_section(n, [seed, i, 0], k=i % 4)
        y = hm.random_section(n, [seed, i, 1], k=(i // 4) % 3, N=x.N)
        pairs.append((x, y))
    return pairs


def section_pair_arcs(n: int) -> int:
    return 16 * n


def curvature_presets(m):
    """Circle, product torus and three trigonometric graph tori at grid size m."""
    return {
        "circle": sf.circle(1.0, m),
        "product_torus": sf.product_torus((1.0, 0.8), m),
        "graph_a": sf.lagrangian_graph([{"k": [1, 0], "a": 0.3}, {"k": [0, 1], "b": 0.2},
                                        {"k": [1, 1], "a": 0.1}], m),
        "graph_b": sf.lagrangian_graph([{"k": [1, -1], "a": 0.15, "b": 0.1},
                                        {"k": [2, 1], "a": 0.05}], m),
        "graph_c": sf.lagrangian_graph(sf.random_terms(2, 11), m),
    }


def perturbed_tori(seed=0, count=20, m=48):
    """Lagrangian tori built as graphs of closed 1-forms: over the product
    torus (even i) and over T^2 in T*T^2 (odd i)."""
    out = []
    for i in range(count):
        rng = np.random.default_rng([seed, i])
        terms = sf.random_terms(2, [seed, i], amplitude=0.1)
        shift = (0.1 * rng.standard_normal(2)).tolist()
        if i % 2 == 0:
            radii = (1.0 + 0.3 * rng.random(), 0.8 + 0.3 * rng.random())
            imm = sf.perturbed_torus(radii, terms, m, shift)
        else:
            imm = sf.lagrangian_graph(terms, m, 2, shift)
        imm.name = f"perturbed[{i}] " + imm.name
        out.append(imm)
    return out


LEMNISCATE = [{"freq": 1, "re": 0.5}, {"freq": -1, "re": 0.5},
              {"freq": 2, "re": 0.5}, {"freq": -2, "re": -0.5}]


def named_presets(m=64):
    return [sf.circle(1.0, 4 * m), sf.circle(2.0, 4 * m), sf.product_torus((1.0, 1.0), m),
            sf.product_torus((1.0, 0.5), m), sf.flat_plane(2, m),
            sf.linear_graph([[0.3, 0.1], [0.1, -0.2]], m),
            sf.plane_curve([{"freq": 1, "re": 1.0}, {"freq": -2, "re": 0.3}], 4 * m),
            sf.plane_curve([{"freq": 2, "re": 1.0}, {"freq": 1, "re": 0.4}], 4 * m),
            sf.plane_curve(LEMNISCATE, 4 * m)]


# Criteria

def criterion_1(seed=0):
    start = time.perf_counter()
    loops = parity_suite(seed)
    rows = [(ms.maslov_index(lp), ms.is_liftable(lp)) for lp in loops]
    elapsed = time.perf_counter() - start
    agree = sum((idx % 2 == 0) == lift for idx, lift in rows)
    return _result(1, "parity law: liftable iff Maslov index even",
                   agree == len(rows) and elapsed < AC1_RUNTIME_LIMIT,
                   loops=len(rows), agreements=agree, seconds=round(elapsed, 3),
                   indices=[r[0] for r in rows])


def criterion_2():
    got = {k: ms.maslov_index(ms.rotating_line_loop(k, 64)) for k in range(-3, 4)}
    circle = ms.maslov_index(ms.circle_gauss_loop(256))
    ok = all(got[k] == k for k in got) and circle == 2
    return _result(2, "winding exactness", ok,
                   rotating_line={str(k): v for k, v in got.items()}, circle=circle)


def criterion_3(seed=0, count=200):
    violations = []
    for i in range(count):
        n = 1 + i % 3
        x, y, z, w, v = (random_lagrangian(n, [seed, i, j]) for j in range(5))
        a = hm.hormander_index(x, y, z, w)
        if a != -hm.hormander_index(x, y, w, z):
            violations.append((i, "swap"))
        if a + hm.hormander_index(x, y, w, v) + hm.hormander_index(x, y, v, z) != 0:
            violations.append((i, "cyclic"))
        if a != -hm.hormander_index(z, w, x, y):
            violations.append((i, "pair exchange"))
    return _result(3, "Hörmander index relations", not violations,
                   cases=count, violations=violations)


def criterion_4():
    x, y = LagrangianFrame([[1], [0]]), LagrangianFrame([[0], [1]])
    z, w = LagrangianFrame([[1], [1]]), LagrangianFrame([[1], [-1]])
    value = hm.hormander_index(x, y, z, w)
    return _result(4, "R^2 quadruple oracle", value == 1, index=value)


def criterion_5(seed=0):
    horiz = hm.section_preset("horizontal", N=256)
    rot = hm.rotating_line_section(1, 256)
    cover_vals = {f"m={m},seed={s}": hm.hormander_pairing(horiz, rot, m=m, seed=[seed, s])
                  for m in (4, 8, 16) for s in range(5)}
    cover_ok = len(set(cover_vals.values())) == 1
    base = next(iter(cover_vals.values()))

    anti, diag = [], []
    for x, y in section_pair_suite(seed):
        arcs = section_pair_arcs(x.n)
        p = hm.hormander_pairing(x, y, m=arcs, seed=seed)
        anti.append(p == -hm.hormander_pairing(y, x, m=arcs, seed=seed))
        diag.append(hm.hormander_pairing(x, x, m=arcs, seed=seed) == 0)

    cover = hm.GoodCoverOnLoop.uniform(8)
    pulled = {d: hm.pullback_pairing(d, horiz, rot, cover, seed) for d in (-2, -1, 1, 2, 3)}
    pull_ok = all(v == d * base for d, v in pulled.items())
    return _result(5, "Čech cocycle machinery",
                   cover_ok and all(anti) and all(diag) and pull_ok,
                   cover_pairings=cover_vals, antisymmetry=sum(anti), diagonal_zero=sum(diag),
                   pairs=len(anti), pullbacks={str(d): v for d, v in pulled.items()},
                   base_pairing=base)


def criterion_6(seed=0):
    rows = []
    for x, y in section_pair_suite(seed):
        lx, ly = ms.maslov_index(x.to_loop()), ms.maslov_index(y.to_loop())
        p = hm.hormander_pairing(x, y, m=section_pair_arcs(x.n), seed=seed)
        rows.append((p, lx, ly))
    pinned = all(p == WINDING_SIGN * (ly - lx) for p, lx, ly in rows)
    flipped = all(p == -WINDING_SIGN * (ly - lx) for p, lx, ly in rows)
    return _result(6, "winding-difference oracle with pinned sign", pinned and not flipped,
                   sign=WINDING_SIGN, rows=[list(r) for r in rows], flipped_sign_passes=flipped)


def criterion_7(grids=(64, 128, 256, 512)):
    table = {}
    ok = True
    for m in grids:
        for name, imm in curvature_presets(m).items():
            table.setdefault(name, []).append(sf.curvature_data(imm).max_abs_d_beta)
    for name, vals in table.items():
        if vals[0] > AC7_MAX_AT_64:
            ok = False
        for coarse, fine in zip(vals, vals[1:]):
            if coarse <= AC7_ROUNDOFF_FLOOR and fine <= AC7_ROUNDOFF_FLOOR:
                continue
            if fine <= 0 or coarse / fine < AC7_MIN_RATIO:
                ok = False
    return _result(7, "flat Chern identity: d(beta) -> 0", ok, grids=list(grids),
                   max_abs_d_beta=table)


def criterion_8():
    start = time.perf_counter()
    rows = {}
    ok = True
    for m, tol in AC8_TOL.items():
        for name, imm in (("circle", sf.circle(1.0, m)), ("product_torus", sf.product_torus((1.0, 0.8), m))):
            ratio = sf.maslov_via_beta(sf.curvature_data(imm))
            ell = sf.gauss_indices(imm)
            err = float(np.max(np.abs(ratio - np.array(ell))))
            rows[f"{name}@{m}"] = {"period_over_pi": ratio.tolist(), "index": ell, "error": err}
            ok &= err <= tol and all(v == 2 for v in ell)
    elapsed = time.perf_counter() - start
    return _result(8, "period/pi equals the Maslov index", ok and elapsed < AC8_RUNTIME_LIMIT,
                   rows=rows, seconds=round(elapsed, 3))


def criterion_9(seed=0):
    rows = []
    for imm in named_presets() + list(curvature_presets(64).values()) + perturbed_tori(seed):
        g = sf.gauss_indices(imm)
        h = [sf.maslov_class_hormander(imm, j, seed=seed) for j in range(imm.k)]
        rows.append({"immersion": imm.name, "gauss": g, "hormander": h})
    ok = all(r["gauss"] == r["hormander"] for r in rows)
    return _result(9, "Gauss-loop and Hörmander Maslov classes agree", ok, rows=rows)


def fomenko_suite(seed=0):
    graphs = [imm for name, imm in curvature_presets(64).items() if name.startswith("graph")]
    graphs += [sf.lagrangian_graph(sf.random_terms(2, [seed, i]), 64) for i in range(5)]
    graphs += [sf.flat_plane(2, 32), sf.linear_graph([[0.5, 0.2], [0.2, 0.1]], 32)]
    others = [sf.circle(1.0, 256), sf.product_torus((1.0, 0.8), 64)] + perturbed_tori(seed, 4)
    return graphs, others


def criterion_10(seed=0):
    graphs, others = fomenko_suite(seed)
    rows, ok = [], True
    for imm in graphs:
        rep = sf.fomenko_check(imm, seed=seed)
        ok &= rep["in_lh"] and rep["verdict"] == "CONSISTENT"
        ok &= all(v == 0 for v in rep["indices_gauss"] + rep["indices_hormander"])
        rows.append(rep)
    for imm in others:
        rep = sf.fomenko_check(imm, seed=seed)
        ok &= rep["verdict"] == "CONSISTENT"
        rows.append(rep)
    return _result(10, "Fomenko consistency on the shipped suite", ok,
                   rows=[{k: r[k] for k in ("immersion", "in_lh", "indices_gauss",
                                            "indices_hormander", "verdict", "notes")}
                         for r in rows])


def criterion_11(seed=0):
    """Run the shipped scenario suite twice; reports must match byte for byte
    once the timing block is removed."""
    from .scenarios import canonical_report, load_scenario, run_scenario, shipped_suite_dir

    paths = [p for p in sorted(shipped_suite_dir().glob("*.json"))
             if load_scenario(p).get("params", {}).get("criterion") != 11]
    mismatched = []
    for p in paths:
        a = canonical_report(run_scenario(load_scenario(p))[0])
        b = canonical_report(run_scenario(load_scenario(p))[0])
        if a != b:
            mismatched.append(p.name)
    return _result(11, "determinism of the acceptance suite", not mismatched,
                   scenarios=len(paths), mismatched=mismatched)


CRITERIA = {i: globals()[f"criterion_{i}"] for i in range(1, 12)}


def run_criterion(cid: int, seed=0) -> dict:
    fn = CRITERIA[int(cid)]
    if fn.__code__.co_argcount and "seed" in fn.__code__.co_varnames[:fn.__code__.co_argcount]:
        return fn(seed=seed)
    return fn()
