import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from maslovkit.errors import NotClosed, NotLagrangian, Undersampled, ValidationError
from maslovkit.maslov import (LagrangianLoop, circle_gauss_loop, constant_loop,
                              det2_phase_increments, holonomy, interpolated_random_loop,
                              is_liftable, loop_preset, maslov_index,
                              random_constant_loop, rotating_line_loop, winding)
from maslovkit.symplectic import LagrangianFrame, line, random_lagrangian

ks = st.integers(-4, 4)
seeds = st.integers(0, 2**32 - 1)


def test_constant_loop_is_trivial():
    assert maslov_index(constant_loop(m=8)) == 0
    assert maslov_index(random_constant_loop(3, 5, m=8)) == 0
    assert is_liftable(random_constant_loop(2, 1))


@pytest.mark.parametrize("k", range(-3, 4))
def test_rotating_line(k):
    loop = rotating_line_loop(k, 64)
    assert maslov_index(loop) == k
    assert abs(winding(loop) - k) < 1e-6
    assert is_liftable(loop) == (k % 2 == 0)


def test_circle_gauss_loop():
    assert maslov_index(circle_gauss_loop(256)) == 2
    assert is_liftable(circle_gauss_loop(64))


def test_rotating_line_higher_n():
    assert maslov_index(rotating_line_loop(3, 64, n=3)) == 3


def test_undersampled_is_reported():
    with pytest.raises(Undersampled):
        maslov_index(rotating_line_loop(1, 3))
    # exactly pi/2 per step is still rejected
    with pytest.raises(Undersampled):
        maslov_index(rotating_line_loop(1, 4))
    assert maslov_index(rotating_line_loop(1, 5)) == 1


def test_from_path_closure():
    frames = [line(np.pi * t) for t in np.linspace(0, 1, 33)]
    assert maslov_index(LagrangianLoop.from_path(frames)) == 1
    with pytest.raises(NotClosed):
        LagrangianLoop.from_path([line(0.1 * j) for j in range(10)])


def test_loop_validation():
    with pytest.raises(ValidationError):
        LagrangianLoop([line(0.0), line(1.0)])
    with pytest.raises(ValidationError):
        LagrangianLoop([line(0.0), line(1.0), random_lagrangian(2, 0)])
    bad = LagrangianFrame(np.array([[1, 0], [0, 0], [0, 1], [0, 0]], float))
    with pytest.raises(NotLagrangian):
        maslov_index(LagrangianLoop([bad] * 4))


@given(ks, st.integers(1, 4))
def test_refinement_invariance(k, factor):
    m = 16 + 4 * abs(k)
    assert maslov_index(rotating_line_loop(k, m)) == maslov_index(rotating_line_loop(k, m * factor))


@settings(max_examples=25)
@given(st.integers(1, 3), seeds, st.integers(0, 3), st.integers(0, 500))
def test_cyclic_reindexing_and_reversal(n, seed, k, shift):
    loop = interpolated_random_loop(n, seed, k, nodes=3)
    idx = maslov_index(loop)
    assert maslov_index(loop.rotated(shift)) == idx
    assert maslov_index(loop.reversed()) == -idx


@given(ks, ks)
def test_concatenation_is_additive(a, b):
    la, lb = rotating_line_loop(a, 32), rotating_line_loop(b, 32)
    assert maslov_index(la.concatenate(lb)) == a + b


def test_concatenation_needs_common_base():
    shifted = LagrangianLoop([line(0.5 + np.pi * j / 16) for j in range(16)])
    with pytest.raises(NotClosed):
        rotating_line_loop(1, 16).concatenate(shifted)


@settings(max_examples=25)
@given(st.integers(1, 3), seeds, st.integers(0, 3))
def test_parity_law(n, seed, k):
    loop = interpolated_random_loop(n, seed, k, nodes=3)
    idx = maslov_index(loop)
    assert idx % 2 == k % 2
    assert is_liftable(loop) == (idx % 2 == 0)


@settings(max_examples=25)
@given(st.integers(1, 3), seeds)
def test_index_independent_of_frame_choice(n, seed):
    rng = np.random.default_rng(seed)
    loop = interpolated_random_loop(n, seed, 1, nodes=3)
    mixed = LagrangianLoop([LagrangianFrame(f.basis @ (np.eye(n) + 0.3 * rng.standard_normal((n, n))))
                            for f in loop.samples])
    assert maslov_index(mixed) == maslov_index(loop)
    assert is_liftable(mixed) == is_liftable(loop)


def test_holonomy_is_orthogonal():
    h = holonomy(interpolated_random_loop(3, 4, 1, nodes=3))
    assert np.allclose(h.T @ h, np.eye(3), atol=1e-10)
    assert np.linalg.det(h) == pytest.approx(-1.0)


def test_increments_sum_to_turns():
    inc = det2_phase_increments(rotating_line_loop(2, 40))
    assert np.allclose(inc, 2 * np.pi * 2 / 40)


def test_json_roundtrip():
    loop = interpolated_random_loop(2, 9, 1, nodes=3, m=200)
    again = LagrangianLoop.from_json(loop.to_json())
    assert np.array_equal(again.bases, loop.bases)
    closed = dict(loop.to_json(), samples=loop.to_json()["samples"] + [loop.to_json()["samples"][0]],
                  endpoint_included=True)
    assert maslov_index(LagrangianLoop.from_json(closed)) == maslov_index(loop)
    with pytest.raises(ValidationError):
        LagrangianLoop.from_json({"samples": []})


def test_presets():
    assert maslov_index(loop_preset("rotating_line", k=2, m=32)) == 2
    assert maslov_index(loop_preset("constant", n=2, seed=3)) == 0
    with pytest.raises(ValidationError):
        loop_preset("nope")
    with pytest.raises(ValidationError):
        loop_preset("circle", q=1)
