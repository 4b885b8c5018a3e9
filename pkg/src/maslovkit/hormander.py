"""Hörmander's four-plane index and the Čech cocycle it defines over a loop.

The index of (X, Y, Z, W) is half the signature difference of the forms

    Q_Z(y) = omega(p_Z^X y, y),   Q_W(y) = omega(p_W^X y, y)

on a complement of X ∩ Y in Y, where p_Z^X projects onto Z along X.
Over a loop covered by arcs U_a with constant planes Z_a transversal to
the sections X(t), Y(t), the values (X, Y, Z_a, Z_{a+1}) on the overlaps
form an integer 1-cocycle; its sum around the circle is the pairing of the
class with the fundamental cycle.
"""

from __future__ import annotations

import dataclasses
from typing import NamedTuple

import numpy as np

from .errors import (DegenerateForm, InconsistentOverlap, NotTransversal,
                     RetryExhausted, ValidationError)
from .maslov import LagrangianLoop, interpolated_unitary_path
from .symplectic import (LagrangianFrame, from_unitary, horizontal,
                         orthonormal_basis,
                         random_lagrangian, standard_space, transversal)
from .tolerances import current as _tol

MAX_CANDIDATES = 1000


class LagrangianQuadruple(NamedTuple):
    X: LagrangianFrame
    Y: LagrangianFrame
    Z: LagrangianFrame
    W: LagrangianFrame


@dataclasses.dataclass(frozen=True, eq=False)
class QuadraticFormOnQuotient:
    quotient_basis: np.ndarray  # 2n x r, inside Y, complementary to X ∩ Y
    S: np.ndarray               # r x r symmetric

    @property
    def rank(self) -> int:
        return self.S.shape[0]


def _split(xb: np.ndarray, yb: np.ndarray):
    resid = yb - xb @ (xb.T @ yb)
    _, s, vt = np.linalg.svd(resid)
    keep = s > _tol().intersection
    return yb @ vt[~keep].T, yb @ vt[keep].T


def intersection_split(x: LagrangianFrame, y: LagrangianFrame):
    """Orthonormal bases (meet, complement) of X ∩ Y and its g-orthogonal
    complement inside Y."""
    return _split(orthonormal_basis(x), orthonormal_basis(y))


def _q_matrix(xb, zb, comp, omega):
    # Z-component of v along V = X + Z, paired with v
    n = xb.shape[1]
    coords = np.linalg.solve(np.hstack([xb, zb]), comp)
    s = (zb @ coords[n:]).T @ omega @ comp
    return 0.5 * (s + s.T)


def q_form(x: LagrangianFrame, y: LagrangianFrame, z: LagrangianFrame) -> QuadraticFormOnQuotient:
    if not transversal(x, z):
        raise NotTransversal("Q_Z needs Z transversal to X")
    _, comp = intersection_split(x, y)
    s = _q_matrix(orthonormal_basis(x), orthonormal_basis(z), comp, x.space.omega)
    _inertia(s)
    return QuadraticFormOnQuotient(comp, s)


def _inertia(s: np.ndarray):
    if s.shape[0] == 0:
        return 0, 0
    ev = np.linalg.eigvalsh(s)
    scale = np.max(np.abs(ev))
    if scale == 0 or np.min(np.abs(ev)) < _tol().degenerate * scale:
        raise DegenerateForm(f"form has a near-zero eigenvalue (spectrum {ev})")
    return int(np.sum(ev > 0)), int(np.sum(ev < 0))


def signature(form) -> tuple[int, int]:
    """(number of positive, number of negative) eigenvalues."""
    s = form.S if isinstance(form, QuadraticFormOnQuotient) else np.asarray(form, dtype=float)
    return _inertia(s)


def _index_orthonormal(xb, yb, zb, wb, omega) -> int:
    """Index from orthonormal bases already known to be transversal."""
    _, comp = _split(xb, yb)
    pz, qz = _inertia(_q_matrix(xb, zb, comp, omega))
    pw, qw = _inertia(_q_matrix(xb, wb, comp, omega))
    diff = (pz - qz) - (pw - qw)
    # both forms live on the same quotient, so the difference is even
    assert diff % 2 == 0, (pz, qz, pw, qw)
    return diff // 2


def hormander_index(x: LagrangianFrame, y: LagrangianFrame,
                    z: LagrangianFrame, w: LagrangianFrame) -> int:
    """(X, Y, Z, W) = (sign Q_Z - sign Q_W) / 2 = ind Q_W - ind Q_Z."""
    for name, p in (("Z", z), ("W", w)):
        for other, q in (("X", x), ("Y", y)):
            if not transversal(p, q):
                raise NotTransversal(f"{name} is not transversal to {other}")
    xb, yb, zb, wb = (orthonormal_basis(f) for f in (x, y, z, w))
    return _index_orthonormal(xb, yb, zb, wb, x.space.omega)


# Sections over the parameter circle [0, 1)

class SectionOverLoop:
    """Lagrangian planes sampled on the periodic grid t_j = j / N."""

    def __init__(self, bases, *, check_isotropy: bool = True):
        b = np.array(bases, dtype=np.float64)
        if b.ndim != 3 or b.shape[1] != 2 * b.shape[2]:
            raise ValidationError(f"section samples must have shape (N, 2n, n), got {b.shape}")
        if b.shape[0] < 3:
            raise ValidationError("a section needs at least 3 samples")
        b.setflags(write=False)
        self.bases = b
        self.check_isotropy = check_isotropy

    @property
    def N(self) -> int:
        return self.bases.shape[0]

    @property
    def n(self) -> int:
        return self.bases.shape[2]

    @property
    def grid(self) -> np.ndarray:
        return np.arange(self.N) / self.N

    def frame(self, j: int) -> LagrangianFrame:
        return LagrangianFrame(self.bases[j % self.N])

    def to_loop(self) -> LagrangianLoop:
        return LagrangianLoop([self.frame(j) for j in range(self.N)],
                              check_isotropy=self.check_isotropy)

    @classmethod
    def from_loop(cls, loop: LagrangianLoop) -> "SectionOverLoop":
        return cls(loop.bases, check_isotropy=loop.check_isotropy)

    @classmethod
    def constant(cls, frame: LagrangianFrame, N: int = 256) -> "SectionOverLoop":
        return cls(np.repeat(frame.basis[None], N, axis=0))

    @classmethod
    def from_unitary_path(cls, fn, N: int = 256) -> "SectionOverLoop":
        return cls(np.stack([from_unitary(fn(t)).basis for t in np.arange(N) / N]))

    def pullback(self, d: int) -> "SectionOverLoop":
        """Precompose with the degree-d map s -> d*s, on a grid |d| times finer.

        The sample s_j = j / (N|d|) maps to the original grid point
        sign(d) * j / N, so no interpolation is involved.
        """
        if d == 0:
            raise ValidationError("pullback degree must be nonzero")
        idx = (np.sign(d) * np.arange(self.N * abs(d))) % self.N
        return SectionOverLoop(self.bases[idx], check_isotropy=self.check_isotropy)

    def to_json(self) -> dict:
        return {"n": self.n, "samples": self.bases.tolist()}


def rotating_line_section(k: int = 1, N: int = 256, n: int = 1) -> SectionOverLoop:
    def fn(t):
        u = np.eye(n, dtype=complex)
        u[0, 0] = np.exp(1j * np.pi * k * t)
        return u
    return SectionOverLoop.from_unitary_path(fn, N)


def random_section(n: int, seed, k: int = 0, nodes: int = 3, N: int | None = None) -> SectionOverLoop:
    """A seeded loop through random planes, twisted to have index parity k."""
    if N is None:
        N = 128 * nodes * n + 32 * abs(k)
    return SectionOverLoop.from_unitary_path(interpolated_unitary_path(n, seed, nodes, k), N)


SECTION_PRESETS = {
    "horizontal": lambda n=1, N=256: SectionOverLoop.constant(horizontal(n), N),
    "constant_random": lambda n=1, seed=0, N=256: SectionOverLoop.constant(random_lagrangian(n, seed), N),
    "rotating_line": lambda k=1, n=1, N=256: rotating_line_section(k, N, n),
    "random": lambda n=1, seed=0, k=0, nodes=3, N=None: random_section(n, seed, k, nodes, N),
}


def section_preset(name: str, **params) -> SectionOverLoop:
    try:
        factory = SECTION_PRESETS[name]
    except KeyError:
        raise ValidationError(f"unknown section preset {name!r}; "
                              f"choose from {sorted(SECTION_PRESETS)}") from None
    try:
        return factory(**params)
    except TypeError as exc:
        raise ValidationError(f"bad parameters for section preset {name!r}: {exc}") from None


# Good covers of the circle

def _circular_members(grid: np.ndarray, start: float, end: float) -> np.ndarray:
    """Indices of grid points inside the closed arc [start, end] mod 1, in
    order along the arc."""
    off = np.mod(grid - start + 1e-12, 1.0) - 1e-12
    idx = np.flatnonzero(off <= (end - start) + 1e-12)
    return idx[np.argsort(off[idx], kind="stable")]


@dataclasses.dataclass(frozen=True)
class GoodCoverOnLoop:
    """Arcs (start, end) of the parameter circle, sorted by start.

    Consecutive arcs overlap in a single interval and no three arcs meet,
    so the nerve is the cyclic graph a -> a+1 (mod m).
    """

    arcs: tuple

    def __post_init__(self):
        arcs = tuple((float(a), float(b)) for a, b in self.arcs)
        object.__setattr__(self, "arcs", arcs)
        m = len(arcs)
        if m < 3:
            raise ValidationError("a cyclic good cover needs at least 3 arcs")
        for a, b in arcs:
            if not (0.0 <= a < 1.0 and a < b < a + 1.0):
                raise ValidationError(f"bad arc ({a}, {b})")
        starts = [a for a, _ in arcs]
        if starts != sorted(starts):
            raise ValidationError("arcs must be sorted by start")
        for i in range(m):
            _, end = arcs[i]
            nxt = arcs[(i + 1) % m][0] + (1.0 if i == m - 1 else 0.0)
            nxt2 = arcs[(i + 2) % m][0] + (1.0 if i >= m - 2 else 0.0)
            if end <= nxt:
                raise ValidationError(f"arcs {i} and {(i + 1) % m} do not overlap")
            if end >= nxt2:
                raise ValidationError(f"arcs {i} and {(i + 2) % m} overlap (triple intersection)")

    @classmethod
    def uniform(cls, m: int, overlap_fraction: float = 0.5) -> "GoodCoverOnLoop":
        """m arcs [a/m - e, (a+1)/m + e] with overlaps of width overlap_fraction/m."""
        if not 0.0 < overlap_fraction < 1.0:
            raise ValidationError("overlap_fraction must lie in (0, 1)")
        e = overlap_fraction / (2.0 * m)
        arcs = [((a / m - e) % 1.0, (a / m - e) % 1.0 + 1.0 / m + 2 * e) for a in range(m)]
        arcs.sort()
        return cls(tuple(arcs))

    @property
    def m(self) -> int:
        return len(self.arcs)

    def overlap(self, a: int) -> tuple[float, float]:
        """The interval U_a ∩ U_{a+1}."""
        m = self.m
        start = self.arcs[(a + 1) % m][0]
        end = self.arcs[a][1]
        if a == m - 1:
            start += 1.0
        return start % 1.0, start % 1.0 + (end - start)

    def arc_samples(self, a: int, N: int) -> np.ndarray:
        start, end = self.arcs[a]
        return _circular_members(np.arange(N) / N, start, end)

    def overlap_samples(self, a: int, N: int) -> np.ndarray:
        start, end = self.overlap(a)
        return _circular_members(np.arange(N) / N, start, end)

    def check_sampling(self, N: int, minimum: int = 2):
        for a in range(self.m):
            if len(self.overlap_samples(a, N)) < minimum:
                raise ValidationError(
                    f"overlap {a}/{(a + 1) % self.m} holds fewer than {minimum} "
                    f"samples of a grid with N={N}")

    def pullback(self, d: int) -> tuple["GoodCoverOnLoop", list[int]]:
        """Preimage cover under s -> d*s and, per new arc, the arc it maps into."""
        if d == 0:
            raise ValidationError("pullback degree must be nonzero")
        pieces = []
        for a, (start, end) in enumerate(self.arcs):
            for i in range(abs(d)):
                if d > 0:
                    lo = (start + i) / d
                else:
                    lo = -(end + i) / abs(d)
                lo %= 1.0
                pieces.append((lo, lo + (end - start) / abs(d), a))
        pieces.sort()
        return GoodCoverOnLoop(tuple((lo, hi) for lo, hi, _ in pieces)), [a for _, _, a in pieces]


@dataclasses.dataclass(frozen=True)
class CechCocycle:
    """Integer values on the oriented nerve edges a -> a+1 of a cyclic cover."""

    values: tuple

    @property
    def m(self) -> int:
        return len(self.values)

    def value(self, a: int, b: int) -> int:
        m = self.m
        a, b = a % m, b % m
        if a == b:
            return 0
        if b == (a + 1) % m:
            return self.values[a]
        if a == (b + 1) % m:
            return -self.values[b]
        raise ValidationError(f"arcs {a} and {b} do not intersect")

    def __neg__(self):
        return CechCocycle(tuple(-v for v in self.values))

    def to_json(self) -> list:
        return list(self.values)


def pair_with_fundamental_cycle(cocycle: CechCocycle) -> int:
    return int(sum(cocycle.values))


def _transversal_everywhere(zq: np.ndarray, others: np.ndarray, margin: float) -> bool:
    """All principal angles between Z and each stacked plane exceed margin."""
    cos = np.linalg.svd(np.einsum("mdi,dj->mij", others, zq), compute_uv=False)
    return bool(np.all(cos <= np.cos(margin)))


def _max_step(q: np.ndarray) -> float:
    """Largest principal angle between consecutive stacked orthonormal planes."""
    cos = np.linalg.svd(np.einsum("mdi,mdj->mij", q[:-1], q[1:]), compute_uv=False)
    return float(np.arccos(np.clip(cos.min(), -1.0, 1.0))) if cos.size else 0.0


def _orthonormal_stack(section: SectionOverLoop, idx) -> np.ndarray:
    q, _ = np.linalg.qr(section.bases[idx])
    return q


def choose_transversal_sections(x: SectionOverLoop, y: SectionOverLoop,
                                cover: GoodCoverOnLoop, seed) -> list[LagrangianFrame]:
    """One constant plane per arc, transversal to X(t) and Y(t) on the arc.

    Candidates for arc a come from a generator seeded by (seed, a) alone, so
    the result does not depend on the order arcs are processed in.
    """
    if x.N != y.N or x.n != y.n:
        raise ValidationError("sections must share grid size and dimension")
    chosen = []
    for a in range(cover.m):
        idx = cover.arc_samples(a, x.N)
        xq = _orthonormal_stack(x, np.append(idx, (idx[-1] + 1) % x.N))
        yq = _orthonormal_stack(y, np.append(idx, (idx[-1] + 1) % y.N))
        # angles to Z move by at most one sampling step between samples
        margin = max(_tol().transversal_margin, _max_step(xq), _max_step(yq))
        planes = np.concatenate([xq, yq])
        rng = np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(a,)))
        for _ in range(MAX_CANDIDATES):
            z = random_lagrangian(x.n, rng)
            if _transversal_everywhere(z.basis, planes, margin):
                chosen.append(z)
                break
        else:
            raise RetryExhausted(f"no plane transversal to both sections on arc {a} "
                                 f"after {MAX_CANDIDATES} candidates")
    return chosen


def _overlap_value(x, y, za, zb, samples, label) -> int:
    # Z_a, Z_b were chosen with a margin covering both arcs, so transversality
    # holds at every sample and is not re-checked here.
    xq, yq = _orthonormal_stack(x, samples), _orthonormal_stack(y, samples)
    qa, qb = orthonormal_basis(za), orthonormal_basis(zb)
    omega = standard_space(x.n).omega
    vals = {_index_orthonormal(xq[i], yq[i], qa, qb, omega) for i in range(len(samples))}
    if len(vals) != 1:
        raise InconsistentOverlap(f"index varies across overlap {label}: {sorted(vals)}")
    return vals.pop()


def _cocycle_from(x, y, cover, zs) -> CechCocycle:
    cover.check_sampling(x.N)
    values = []
    for a in range(cover.m):
        b = (a + 1) % cover.m
        samples = cover.overlap_samples(a, x.N)
        values.append(_overlap_value(x, y, zs[a], zs[b], samples, f"{a}/{b}"))
    return CechCocycle(tuple(values))


def build_cocycle(x: SectionOverLoop, y: SectionOverLoop,
                  cover: GoodCoverOnLoop, seed) -> CechCocycle:
    """sigma(a, a+1) = (X(t), Y(t), Z_a, Z_{a+1}), checked constant on each overlap."""
    zs = choose_transversal_sections(x, y, cover, seed)
    return _cocycle_from(x, y, cover, zs)


def hormander_pairing(x: SectionOverLoop, y: SectionOverLoop, m: int = 8,
                      overlap_fraction: float = 0.5, seed=0) -> int:
    return pair_with_fundamental_cycle(
        build_cocycle(x, y, GoodCoverOnLoop.uniform(m, overlap_fraction), seed))


def pullback_cocycle(d: int, x: SectionOverLoop, y: SectionOverLoop,
                     cover: GoodCoverOnLoop, seed) -> CechCocycle:
    """The cocycle of X∘f, Y∘f over the preimage cover, f(s) = d*s, with the
    transversal planes pulled back along f as well."""
    zs = choose_transversal_sections(x, y, cover, seed)
    src_cover, owner = cover.pullback(d)
    return _cocycle_from(x.pullback(d), y.pullback(d), src_cover, [zs[a] for a in owner])


def pullback_pairing(d: int, x: SectionOverLoop, y: SectionOverLoop,
                     cover: GoodCoverOnLoop, seed) -> int:
    return pair_with_fundamental_cycle(pullback_cocycle(d, x, y, cover, seed))


__all__ = [
    "LagrangianQuadruple", "QuadraticFormOnQuotient", "SectionOverLoop",
    "GoodCoverOnLoop", "CechCocycle", "q_form", "signature", "hormander_index",
    "choose_transversal_sections", "build_cocycle", "pair_with_fundamental_cycle",
    "pullback_cocycle", "pullback_pairing", "hormander_pairing",
    "rotating_line_section", "random_section", "section_preset", "standard_space",
]
