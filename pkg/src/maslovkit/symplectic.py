"""Linear algebra of the standard symplectic space R^{2n}.

Coordinates are ordered (x_1..x_n, y_1..y_n) with

    omega = sum_k dx_k ^ dy_k,   J(x, y) = (-y, x),   g = Euclidean,

so a real frame with blocks (A over B) corresponds to the complex matrix
A + iB under C^n = R^n + i R^n, and a g-orthonormal Lagrangian frame gives a
unitary matrix.
"""

from __future__ import annotations

import dataclasses
import functools
import json

import numpy as np
import scipy.linalg

from . import kernels
from .errors import (DimensionMismatch, NotLagrangian, NotTransversal,
                     RankDeficient, ValidationError)
from .tolerances import current as _tol


@dataclasses.dataclass(frozen=True)
class SymplecticSpace:
    """R^{2n} with its standard symplectic form, complex structure and metric."""

    n: int

    def __post_init__(self):
        if not isinstance(self.n, (int, np.integer)) or self.n < 1:
            raise ValidationError(f"half-dimension must be a positive integer, got {self.n!r}")

    @property
    def dim(self) -> int:
        return 2 * self.n

    @functools.cached_property
    def omega(self) -> np.ndarray:
        eye, zero = np.eye(self.n), np.zeros((self.n, self.n))
        m = np.block([[zero, eye], [-eye, zero]])
        m.setflags(write=False)
        return m

    @functools.cached_property
    def J(self) -> np.ndarray:
        eye, zero = np.eye(self.n), np.zeros((self.n, self.n))
        m = np.block([[zero, -eye], [eye, zero]])
        m.setflags(write=False)
        return m

    @functools.cached_property
    def g(self) -> np.ndarray:
        m = np.eye(2 * self.n)
        m.setflags(write=False)
        return m

    def form(self, u, v):
        """omega(u, v); broadcasts over leading axes."""
        u, v = np.asarray(u), np.asarray(v)
        n = self.n
        return (np.sum(u[..., :n] * v[..., n:], axis=-1)
                - np.sum(u[..., n:] * v[..., :n], axis=-1))

    def metric(self, u, v):
        return np.sum(np.asarray(u) * np.asarray(v), axis=-1)

    def apply_J(self, v):
        v = np.asarray(v)
        n = self.n
        return np.concatenate([-v[..., n:], v[..., :n]], axis=-1)

    def fundamental_form(self, u, v):
        """The Kähler form g(Ju, v); equals omega(u, v) in these coordinates.

        Note that g(u, Jv) = -omega(u, v) = omega(v, u) here.
        """
        return self.metric(self.apply_J(u), v)


@functools.lru_cache(maxsize=None)
def standard_space(n: int) -> SymplecticSpace:
    return SymplecticSpace(int(n))


class LagrangianFrame:
    """A 2n x n real matrix whose columns span a (nearly) Lagrangian plane.

    Construction checks shape and finiteness only. Isotropy is measured by
    :func:`lagrangian_residual` and enforced by the operations that need it,
    because frames coming from discretized immersions are Lagrangian only up
    to discretization error.
    """

    __slots__ = ("basis", "space")

    def __init__(self, basis, space: SymplecticSpace | None = None):
        b = np.array(basis, dtype=np.float64)
        if b.ndim == 1:
            b = b[:, None]
        if b.ndim != 2 or b.shape[0] != 2 * b.shape[1]:
            raise ValidationError(f"basis must be 2n x n, got shape {b.shape}")
        if not np.all(np.isfinite(b)):
            raise ValidationError("basis has non-finite entries")
        if space is None:
            space = standard_space(b.shape[1])
        elif space.n != b.shape[1]:
            raise DimensionMismatch(f"basis is for n={b.shape[1]}, space has n={space.n}")
        b.setflags(write=False)
        self.basis = b
        self.space = space

    @property
    def n(self) -> int:
        return self.space.n

    def __repr__(self):
        return f"LagrangianFrame(n={self.n}, basis={self.basis.tolist()!r})"

    def __eq__(self, other):
        if not isinstance(other, LagrangianFrame):
            return NotImplemented
        return self.space == other.space and np.array_equal(self.basis, other.basis)

    __hash__ = None

    def to_json(self) -> dict:
        return {"n": self.n, "basis": self.basis.tolist()}

    @classmethod
    def from_json(cls, data) -> "LagrangianFrame":
        if isinstance(data, str):
            data = json.loads(data)
        try:
            n, basis = int(data["n"]), data["basis"]
        except (KeyError, TypeError, ValueError) as exc:
            raise ValidationError(f"frame JSON needs 'n' and 'basis': {exc}") from None
        frame = cls(basis)
        if frame.n != n:
            raise ValidationError(f"declared n={n} but basis is 2*{frame.n} x {frame.n}")
        return frame


def _numerical_rank(m: np.ndarray) -> int:
    s = np.linalg.svd(m, compute_uv=False)
    if s.size == 0 or s[0] == 0:
        return 0
    return int(np.sum(s > _tol().rank * s[0]))


def _check_rank(frame: LagrangianFrame):
    if _numerical_rank(frame.basis) < frame.n:
        raise RankDeficient(f"frame basis has numerical rank < {frame.n}")


def lagrangian_residual(frame: LagrangianFrame) -> float:
    """Largest |omega(b_j, b_k)| over the column-normalized basis."""
    _check_rank(frame)
    b = frame.basis / np.linalg.norm(frame.basis, axis=0)
    return float(np.max(np.abs(b.T @ frame.space.omega @ b)))


def orthonormal_basis(frame: LagrangianFrame) -> np.ndarray:
    q, ratio = kernels.orthonormalize(frame.basis[None])
    if ratio[0] <= _tol().rank:
        raise RankDeficient(f"frame basis has numerical rank < {frame.n}")
    return q[0]


def to_unitary(frame: LagrangianFrame) -> np.ndarray:
    """Unitary representative U = A + iB of the plane.

    Defined up to right multiplication by O(n): another frame of the same
    plane gives U @ O with O real orthogonal.
    """
    res = lagrangian_residual(frame)
    if res > _tol().isotropy:
        raise NotLagrangian(f"isotropy residual {res:.3e} exceeds {_tol().isotropy:.1e}")
    q = orthonormal_basis(frame)
    n = frame.n
    return q[:n] + 1j * q[n:]


def det_squared(frame: LagrangianFrame) -> complex:
    d = np.linalg.det(to_unitary(frame))
    return complex(d * d)


def from_unitary(u) -> LagrangianFrame:
    """The plane spanned by the real and imaginary parts of U's columns."""
    u = np.asarray(u, dtype=np.complex128)
    return LagrangianFrame(np.vstack([u.real, u.imag]))


def nearest_lagrangian(frame: LagrangianFrame) -> LagrangianFrame:
    """Project a nearly Lagrangian plane onto L(V) via the polar factor.

    The complex matrix A + iB of an orthonormalized frame is unitary exactly
    when the plane is Lagrangian; replacing it by its unitary polar factor
    moves the plane by O(isotropy residual).
    """
    q = orthonormal_basis(frame)
    n = frame.n
    w, _, vh = np.linalg.svd(q[:n] + 1j * q[n:])
    return from_unitary(w @ vh)


def _same_space(p: LagrangianFrame, q: LagrangianFrame):
    if p.space != q.space:
        raise DimensionMismatch(f"frames live in R^{p.space.dim} and R^{q.space.dim}")


def principal_angles(p: LagrangianFrame, q: LagrangianFrame) -> np.ndarray:
    """Principal angles between the two planes, descending."""
    _same_space(p, q)
    return scipy.linalg.subspace_angles(p.basis, q.basis)


def transversal(p: LagrangianFrame, q: LagrangianFrame) -> bool:
    """True iff P ∩ Q = {0}, decided on [P|Q] with orthonormalized blocks."""
    _same_space(p, q)
    stacked = np.hstack([orthonormal_basis(p), orthonormal_basis(q)])
    return _numerical_rank(stacked) == p.space.dim


def projection_across(x: LagrangianFrame, z: LagrangianFrame) -> np.ndarray:
    """The projection onto Z with kernel X (V = X ⊕ Z)."""
    if not transversal(x, z):
        raise NotTransversal("projection needs X ∩ Z = {0}")
    xb, zb = orthonormal_basis(x), orthonormal_basis(z)
    n = x.n
    coords = np.linalg.solve(np.hstack([xb, zb]), np.eye(2 * n))
    return zb @ coords[n:]


def _rng(seed) -> np.random.Generator:
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)


def random_unitary(n: int, seed) -> np.ndarray:
    """Haar-distributed U(n) sample from a seeded complex Gaussian matrix."""
    rng = _rng(seed)
    z = (rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))) / np.sqrt(2.0)
    q, r = np.linalg.qr(z)
    d = np.diag(r)
    return q * (d / np.abs(d))


def random_lagrangian(space, seed) -> LagrangianFrame:
    """The plane U·R^n for a seeded random unitary U."""
    if isinstance(space, SymplecticSpace):
        space = space.n
    return from_unitary(random_unitary(int(space), seed))


def horizontal(n: int) -> LagrangianFrame:
    return LagrangianFrame(np.vstack([np.eye(n), np.zeros((n, n))]))


def vertical(n: int) -> LagrangianFrame:
    return LagrangianFrame(np.vstack([np.zeros((n, n)), np.eye(n)]))


def line(angle: float) -> LagrangianFrame:
    """The line through (cos a, sin a) in R^2."""
    return LagrangianFrame([[np.cos(angle)], [np.sin(angle)]])


# Batched helpers used by the loop code.

def stack_bases(frames) -> np.ndarray:
    return np.stack([f.basis for f in frames])


def unitary_batch(bases: np.ndarray, *, check: bool = True) -> np.ndarray:
    """Unitary representatives for a stack of (m, 2n, n) bases."""
    bases = np.asarray(bases, dtype=np.float64)
    n = bases.shape[2]
    q, ratio = kernels.orthonormalize(bases)
    if np.any(ratio <= _tol().rank):
        raise RankDeficient(f"{int(np.sum(ratio <= _tol().rank))} frame(s) have rank < {n}")
    if check:
        iso = np.abs(np.einsum("mdi,de,mej->mij", q, standard_space(n).omega, q))
        worst = float(iso.max()) if iso.size else 0.0
        if worst > _tol().isotropy:
            raise NotLagrangian(f"isotropy residual {worst:.3e} exceeds {_tol().isotropy:.1e}")
    return q[:, :n] + 1j * q[:, n:]


def det_squared_batch(bases: np.ndarray, *, check: bool = True) -> np.ndarray:
    d = np.linalg.det(unitary_batch(bases, check=check))
    return d * d
