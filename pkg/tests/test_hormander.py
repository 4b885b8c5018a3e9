import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from maslovkit.errors import (DegenerateForm, InconsistentOverlap, NotTransversal,
                              RetryExhausted, ValidationError)
from maslovkit.hormander import (CechCocycle, GoodCoverOnLoop, SectionOverLoop,
                                 build_cocycle, choose_transversal_sections,
                                 hormander_index, hormander_pairing,
                                 intersection_split, pair_with_fundamental_cycle,
                                 pullback_pairing, q_form, random_section,
                                 rotating_line_section, section_preset, signature)
from maslovkit.maslov import maslov_index
from maslovkit.symplectic import (LagrangianFrame, horizontal, line, principal_angles,
                                  random_lagrangian, vertical)

X, Y = LagrangianFrame([[1], [0]]), LagrangianFrame([[0], [1]])
Z, W = LagrangianFrame([[1], [1]]), LagrangianFrame([[1], [-1]])
seeds = st.integers(0, 2**32 - 1)


def test_q_form_examples():
    assert np.allclose(q_form(X, Y, Z).S, [[1.0]])
    assert np.allclose(q_form(X, Y, W).S, [[-1.0]])
    assert signature(q_form(X, Y, Z)) == (1, 0)
    empty = q_form(X, X, Z)
    assert empty.rank == 0 and signature(empty) == (0, 0)


def test_q_form_quotient_lies_in_y():
    x, y, z = (random_lagrangian(3, j) for j in range(3))
    form = q_form(x, y, z)
    assert np.allclose(form.S, form.S.T)
    yb = np.linalg.qr(y.basis)[0]
    assert np.allclose(yb @ (yb.T @ form.quotient_basis), form.quotient_basis)


def test_signature_examples():
    assert signature(np.diag([2.0, -3.0])) == (1, 1)
    assert signature(np.array([[1.0]])) == (1, 0)
    with pytest.raises(DegenerateForm):
        signature(np.diag([1.0, 1e-12]))


def test_index_examples():
    assert hormander_index(X, Y, Z, W) == 1
    assert hormander_index(X, Y, W, Z) == -1
    assert hormander_index(X, Y, Z, Z) == 0


def test_index_needs_transversality():
    with pytest.raises(NotTransversal):
        hormander_index(X, Y, X, W)
    with pytest.raises(NotTransversal):
        q_form(X, Y, X)


def test_partial_intersection():
    # X ∩ Y is one-dimensional in R^4
    x = horizontal(2)
    y = LagrangianFrame(np.array([[1, 0], [0, 0], [0, 0], [0, 1]], float))
    meet, comp = intersection_split(x, y)
    assert meet.shape[1] == 1 and comp.shape[1] == 1
    z = random_lagrangian(2, 4)
    assert q_form(x, y, z).rank == 1


@settings(max_examples=40)
@given(st.integers(1, 4), seeds)
def test_relations(n, seed):
    x, y, z, w, v = (random_lagrangian(n, [seed, j]) for j in range(5))
    a = hormander_index(x, y, z, w)
    assert a == -hormander_index(x, y, w, z)
    assert a + hormander_index(x, y, w, v) + hormander_index(x, y, v, z) == 0
    assert a == -hormander_index(z, w, x, y)
    assert abs(a) <= n


@settings(max_examples=30)
@given(st.integers(1, 3), seeds)
def test_index_independent_of_bases(n, seed):
    rng = np.random.default_rng(seed)
    planes = [random_lagrangian(n, rng) for _ in range(4)]
    mixed = [LagrangianFrame(p.basis @ (np.eye(n) + 0.3 * rng.standard_normal((n, n))))
             for p in planes]
    assert hormander_index(*mixed) == hormander_index(*planes)


# Covers and cocycles

@pytest.mark.parametrize("m", [3, 4, 8, 16])
def test_uniform_cover(m):
    cover = GoodCoverOnLoop.uniform(m, 0.5)
    assert cover.m == m
    grid = np.arange(512) / 512
    hits = np.zeros(512, int)
    for a in range(m):
        hits[cover.arc_samples(a, 512)] += 1
        lo, hi = cover.overlap(a)
        assert hi - lo == pytest.approx(0.5 / m)
    assert np.all(hits >= 1) and np.all(hits <= 2)
    assert len(grid) == 512


def test_cover_validation():
    with pytest.raises(ValidationError):
        GoodCoverOnLoop(((0.0, 0.6), (0.5, 1.1)))
    with pytest.raises(ValidationError):
        GoodCoverOnLoop(((0.0, 0.3), (0.4, 0.7), (0.6, 1.05)))  # gap
    with pytest.raises(ValidationError):
        GoodCoverOnLoop.uniform(4, 1.0)
    with pytest.raises(ValidationError):
        GoodCoverOnLoop.uniform(8).check_sampling(16)


def test_cocycle_antisymmetry():
    c = CechCocycle((1, -2, 0))
    assert c.value(0, 1) == 1 and c.value(1, 0) == -1
    assert (-c).values == (-1, 2, 0)
    assert pair_with_fundamental_cycle(CechCocycle((0, 0, 0))) == 0


def test_choose_transversal_sections():
    h = section_preset("horizontal", N=256)
    cover = GoodCoverOnLoop.uniform(8)
    zs = choose_transversal_sections(h, h, cover, 0)
    assert all(np.min(principal_angles(z, horizontal(1))) > 1e-2 for z in zs)
    rot = rotating_line_section(1, 256)
    zs = choose_transversal_sections(h, rot, cover, 3)
    for a, z in enumerate(zs):
        for j in cover.arc_samples(a, 256):
            assert np.min(principal_angles(z, rot.frame(j))) > 1e-3
    again = choose_transversal_sections(h, rot, cover, 3)
    assert all(np.array_equal(p.basis, q.basis) for p, q in zip(zs, again))


def test_arc_choice_is_order_independent():
    # arc a's plane depends on (seed, a) only, not on the other arcs
    rot = rotating_line_section(1, 256)
    h = section_preset("horizontal", N=256)
    c8 = choose_transversal_sections(h, rot, GoodCoverOnLoop.uniform(8), 5)
    c8b = choose_transversal_sections(h, rot, GoodCoverOnLoop.uniform(8), 5)
    assert [z.basis.tolist() for z in c8] == [z.basis.tolist() for z in c8b]


def test_rotating_line_pairing():
    h = section_preset("horizontal", N=256)
    rot = rotating_line_section(1, 256)
    values = {hormander_pairing(h, rot, m=m, seed=s) for m in (4, 8, 16) for s in range(5)}
    assert values == {-1}
    assert hormander_pairing(rot, h, m=8) == 1


def test_identical_sections_give_zero():
    rot = rotating_line_section(2, 256)
    c = build_cocycle(rot, rot, GoodCoverOnLoop.uniform(8), 0)
    assert c.values == (0,) * 8
    h = section_preset("horizontal", N=64)
    v = SectionOverLoop.constant(vertical(1), 64)
    assert hormander_pairing(h, v) == 0


def test_reversing_roles_negates_every_value():
    x, y = random_section(2, 1, 1, N=900), random_section(2, 2, 0, N=900)
    cover = GoodCoverOnLoop.uniform(32)
    a, b = build_cocycle(x, y, cover, 0), build_cocycle(y, x, cover, 0)
    assert a.values == tuple(-v for v in b.values)


@pytest.mark.parametrize("d", [-2, -1, 1, 2, 3])
def test_pullback(d):
    h = section_preset("horizontal", N=256)
    rot = rotating_line_section(1, 256)
    assert pullback_pairing(d, h, rot, GoodCoverOnLoop.uniform(8), 0) == -d


def test_pullback_section_grid():
    rot = rotating_line_section(1, 64)
    assert rot.pullback(2).N == 128
    assert maslov_index(rot.pullback(-3).to_loop()) == -3
    with pytest.raises(ValidationError):
        rot.pullback(0)


@settings(max_examples=8)
@given(st.integers(1, 2), seeds, seeds, st.integers(0, 2), st.integers(0, 2))
def test_winding_difference(n, sx, sy, kx, ky):
    N = 400 * n + 64
    x, y = random_section(n, sx, kx, N=N), random_section(n, sy, ky, N=N)
    lx, ly = maslov_index(x.to_loop()), maslov_index(y.to_loop())
    assert hormander_pairing(x, y, m=16 * n, seed=0) == -(ly - lx)


def test_coarse_sampling_surfaces_as_error():
    # the adaptive margin exceeds any achievable angle: no plane qualifies
    fast = rotating_line_section(12, 40)
    h = section_preset("horizontal", N=40)
    with pytest.raises(RetryExhausted):
        hormander_pairing(h, fast, m=4, seed=0)


def test_plane_crossed_inside_overlap_is_inconsistent():
    from maslovkit.hormander import _cocycle_from
    h = section_preset("horizontal", N=256)
    rot = rotating_line_section(1, 256)
    cover = GoodCoverOnLoop.uniform(4)
    lo, hi = cover.overlap(0)
    # Z_0 is crossed by Y(t) halfway through the first overlap
    eps = np.pi / 512   # keep every Z off the sample grid
    zs = [line(np.pi * (lo + hi) / 2 + eps), line(0.9 * np.pi + eps),
          line(0.1 * np.pi + eps), line(0.4 * np.pi + eps)]
    with pytest.raises(InconsistentOverlap):
        _cocycle_from(h, rot, cover, zs)


def test_section_validation_and_json():
    with pytest.raises(ValidationError):
        SectionOverLoop(np.zeros((2, 2, 1)))
    sec = rotating_line_section(1, 16)
    again = SectionOverLoop(sec.to_json()["samples"])
    assert np.array_equal(again.bases, sec.bases)
    with pytest.raises(ValidationError):
        section_preset("missing")
