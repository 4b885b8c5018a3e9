"""Maslov index of closed sampled loops of Lagrangian planes.

The index is the winding number of det^2 along the loop, computed by
principal-branch phase unwrapping. Every increment must stay below pi/2 in
magnitude, otherwise the loop is rejected as undersampled rather than
silently aliased.
"""

from __future__ import annotations

import json

import numpy as np
import scipy.linalg

from . import kernels
from .errors import NotClosed, NumericalError, Undersampled, ValidationError
from .symplectic import (LagrangianFrame, from_unitary, horizontal,
                         principal_angles, random_lagrangian, random_unitary,
                         stack_bases, standard_space, unitary_batch)
from .tolerances import current as _tol

GUARD = np.pi / 2


class LagrangianLoop:
    """A closed loop of m >= 3 planes; sample m is identified with sample 0."""

    def __init__(self, samples, *, check_isotropy: bool = True):
        samples = tuple(samples)
        if len(samples) < 3:
            raise ValidationError(f"a loop needs at least 3 samples, got {len(samples)}")
        n = samples[0].n
        if any(s.n != n for s in samples):
            raise ValidationError("loop samples live in different spaces")
        self.samples = samples
        self.space = standard_space(n)
        self.check_isotropy = check_isotropy

    @classmethod
    def from_path(cls, frames, **kw) -> "LagrangianLoop":
        """Build from a path whose last sample repeats the first plane."""
        frames = list(frames)
        if len(frames) < 2:
            raise ValidationError("path needs at least 2 samples")
        gap = float(np.max(principal_angles(frames[0], frames[-1])))
        if gap > _tol().closure:
            raise NotClosed(f"first and last planes differ by principal angle {gap:.3e}")
        return cls(frames[:-1], **kw)

    @classmethod
    def from_unitaries(cls, us, **kw) -> "LagrangianLoop":
        return cls([from_unitary(u) for u in us], **kw)

    @property
    def n(self) -> int:
        return self.space.n

    @property
    def m(self) -> int:
        return len(self.samples)

    def __len__(self):
        return self.m

    @property
    def bases(self) -> np.ndarray:
        return stack_bases(self.samples)

    def reversed(self) -> "LagrangianLoop":
        s = self.samples
        return LagrangianLoop((s[0],) + s[:0:-1], check_isotropy=self.check_isotropy)

    def rotated(self, shift: int) -> "LagrangianLoop":
        shift %= self.m
        return LagrangianLoop(self.samples[shift:] + self.samples[:shift],
                              check_isotropy=self.check_isotropy)

    def concatenate(self, other: "LagrangianLoop") -> "LagrangianLoop":
        """Traverse self then other; both must start at the same plane."""
        if other.n != self.n:
            raise ValidationError("cannot concatenate loops of different dimension")
        gap = float(np.max(principal_angles(self.samples[0], other.samples[0])))
        if gap > _tol().closure:
            raise NotClosed(f"loops do not share a base plane (angle {gap:.3e})")
        return LagrangianLoop(self.samples + other.samples,
                              check_isotropy=self.check_isotropy and other.check_isotropy)

    def to_json(self) -> dict:
        return {"n": self.n, "samples": [s.basis.tolist() for s in self.samples]}

    @classmethod
    def from_json(cls, data) -> "LagrangianLoop":
        if isinstance(data, str):
            data = json.loads(data)
        try:
            n = int(data["n"])
            frames = [LagrangianFrame(b) for b in data["samples"]]
        except (KeyError, TypeError, ValueError) as exc:
            raise ValidationError(f"loop JSON needs 'n' and 'samples': {exc}") from None
        if any(f.n != n for f in frames):
            raise ValidationError(f"samples do not match declared n={n}")
        if data.get("endpoint_included", False):
            return cls.from_path(frames)
        return cls(frames)


def det2_phase_increments(loop: LagrangianLoop) -> np.ndarray:
    """Principal-branch increments of arg det^2 between consecutive samples."""
    d2 = np.linalg.det(unitary_batch(loop.bases, check=loop.check_isotropy)) ** 2
    return kernels.wrapped_increments(np.angle(d2))


def _guarded_increments(loop):
    inc = det2_phase_increments(loop)
    worst = int(np.argmax(np.abs(inc)))
    if abs(inc[worst]) >= GUARD:
        raise Undersampled(
            f"det^2 phase jumps by {inc[worst]:+.3f} rad between samples "
            f"{worst} and {(worst + 1) % loop.m}")
    return inc


def winding(loop: LagrangianLoop) -> float:
    """Total det^2 phase change in turns (before rounding)."""
    return float(np.sum(_guarded_increments(loop)) / (2 * np.pi))


def maslov_index(loop: LagrangianLoop) -> int:
    w = winding(loop)
    k = round(w)
    if abs(w - k) > _tol().winding:
        raise NumericalError(f"total winding {w!r} is not an integer")
    return int(k)


def procrustes_factors(loop: LagrangianLoop) -> np.ndarray:
    """Orthogonal factors aligning each unitary representative to its predecessor.

    Entry k (k = 1..m) is the polar factor of Re(U_k^* U_{k-1}) with
    U_m = U_0; entry 0 is the identity.
    """
    u = unitary_batch(loop.bases, check=loop.check_isotropy)
    nxt = np.roll(u, -1, axis=0)
    gram = np.einsum("mji,mjk->mik", nxt.conj(), u).real
    w, s, vt = np.linalg.svd(gram)
    weakest = int(np.argmin(s[:, -1]))
    if s[weakest, -1] < _tol().procrustes:
        raise Undersampled(
            f"Procrustes alignment is singular between samples {weakest} "
            f"and {(weakest + 1) % loop.m}")
    factors = w @ vt
    return np.concatenate([np.eye(loop.n)[None], factors])


def holonomy(loop: LagrangianLoop) -> np.ndarray:
    """O in O(n) such that the transported representative returns as U_0 @ O."""
    return kernels.left_chain(procrustes_factors(loop))[-1]


def is_liftable(loop: LagrangianLoop) -> bool:
    """Whether the loop lifts to a closed loop in U(n).

    Exactly the loops of even Maslov index lift.
    """
    _guarded_increments(loop)
    return bool(np.linalg.det(holonomy(loop)) > 0)


# Presets

def _grid(m: int) -> np.ndarray:
    return np.arange(m) / m


def sample_unitary_loop(fn, m: int) -> LagrangianLoop:
    """Sample t -> U(t) on t = j/m; U(1) must span the same plane as U(0)."""
    return LagrangianLoop.from_unitaries([fn(t) for t in _grid(m)])


def constant_loop(frame: LagrangianFrame | None = None, m: int = 8, n: int = 1) -> LagrangianLoop:
    frame = horizontal(n) if frame is None else frame
    return LagrangianLoop([frame] * m)


def rotating_line_loop(k: int = 1, m: int = 64, n: int = 1) -> LagrangianLoop:
    """The line t -> span(cos k pi t, sin k pi t) in the first R^2 factor."""
    def fn(t):
        u = np.eye(n, dtype=complex)
        u[0, 0] = np.exp(1j * np.pi * k * t)
        return u
    return sample_unitary_loop(fn, m)


def circle_gauss_loop(m: int = 256) -> LagrangianLoop:
    """Tangent lines of the unit circle in C."""
    return sample_unitary_loop(lambda t: np.array([[1j * np.exp(2j * np.pi * t)]]), m)


def interpolated_unitary_path(n: int, seed, nodes: int = 4, k: int = 0):
    """t -> U(t): geodesic interpolation through seeded random unitaries,
    closed up, times diag(exp(i pi k t), 1, ...).

    The geodesic part closes in U(n), so it contributes an even index; the
    twist adds exactly k.
    """
    ss = np.random.SeedSequence(seed)
    us = [random_unitary(n, np.random.default_rng(child)) for child in ss.spawn(nodes)]
    logs = [scipy.linalg.logm(us[j].conj().T @ us[(j + 1) % nodes]) for j in range(nodes)]
    logs = [0.5 * (x - x.conj().T) for x in logs]

    def fn(t):
        s = (t % 1.0) * nodes
        j = min(int(s), nodes - 1)
        u = us[j] @ scipy.linalg.expm((s - j) * logs[j])
        twist = np.ones(n, dtype=complex)
        twist[0] = np.exp(1j * np.pi * k * t)
        return u * twist
    return fn


def interpolated_random_loop(n: int = 2, seed: int = 0, k: int = 0, nodes: int = 4,
                             m: int | None = None) -> LagrangianLoop:
    if m is None:
        m = 64 * nodes * n + 16 * abs(k)
    return sample_unitary_loop(interpolated_unitary_path(n, seed, nodes, k), m)


def random_constant_loop(n: int, seed, m: int = 8) -> LagrangianLoop:
    return constant_loop(random_lagrangian(n, seed), m)


LOOP_PRESETS = {
    "constant": lambda n=1, m=8, seed=None: (
        constant_loop(None, m, n) if seed is None else random_constant_loop(n, seed, m)),
    "rotating_line": lambda k=1, m=64, n=1: rotating_line_loop(k, m, n),
    "circle": lambda m=256: circle_gauss_loop(m),
    "interpolated_random": interpolated_random_loop,
}


def loop_preset(name: str, **params) -> LagrangianLoop:
    try:
        factory = LOOP_PRESETS[name]
    except KeyError:
        raise ValidationError(f"unknown loop preset {name!r}; "
                              f"choose from {sorted(LOOP_PRESETS)}") from None
    try:
        return factory(**params)
    except TypeError as exc:
        raise ValidationError(f"bad parameters for preset {name!r}: {exc}") from None
