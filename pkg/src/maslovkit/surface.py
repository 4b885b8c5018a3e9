"""Discretized Lagrangian immersions of tori in flat C^n.

A k-torus (k = n) is sampled on a periodic parameter grid with spacing
2*pi/m_j along each axis. Positions may be periodic only up to a lattice
translation per axis, which lets graphs over T^n = R^n / (2 pi Z)^n be
represented in C^n directly.

From the samples we compute tangent frames (central differences), the mean
curvature vector H, the 1-form beta(v) = g(H, Jv) as edge integrals, its
periods along the grid generators and its discrete exterior derivative on
plaquettes. In flat C^n, beta = d(theta) with theta the Lagrangian angle
arg det U, so each period equals pi times the Maslov index of the
corresponding Gauss loop.
"""

from __future__ import annotations

import dataclasses
import itertools
import json

import numpy as np

from . import kernels
from .errors import RankDeficient, ValidationError
from .hormander import (GoodCoverOnLoop, SectionOverLoop, build_cocycle,
                        pair_with_fundamental_cycle)
from .maslov import LagrangianLoop, maslov_index
from .symplectic import (LagrangianFrame, nearest_lagrangian, standard_space,
                         vertical)
from .tolerances import current as _tol

# pairing(G, A) = maslov_index(G) - maslov_index(A) with the cocycle
# orientation used in hormander.py, and A = vertical has index 0.
MASLOV_CLASS_SIGN = +1


class ImmersedLagrangianGrid:
    """Samples of an immersion of a k-torus in R^{2n}.

    positions : array of shape (m_1, ..., m_k, 2n)
    translations : (k, 2n); stepping once around axis j adds translations[j]
    periodic : which axes close up (only periodic axes carry curvature data)
    """

    def __init__(self, positions, translations=None, periodic=None, spacings=None, name="custom"):
        p = np.array(positions, dtype=np.float64)
        if p.ndim < 2 or p.shape[-1] % 2:
            raise ValidationError(f"positions must have shape (m_1..m_k, 2n), got {p.shape}")
        k, n = p.ndim - 1, p.shape[-1] // 2
        if k != n:
            raise ValidationError(f"a Lagrangian immersion needs k = n, got k={k}, n={n}")
        if any(s < 3 for s in p.shape[:-1]):
            raise ValidationError("each grid axis needs at least 3 samples")
        if not np.all(np.isfinite(p)):
            raise ValidationError("positions have non-finite entries")
        t = np.zeros((k, 2 * n)) if translations is None else np.array(translations, dtype=np.float64)
        if t.shape != (k, 2 * n):
            raise ValidationError(f"translations must have shape {(k, 2 * n)}, got {t.shape}")
        per = (True,) * k if periodic is None else tuple(bool(x) for x in periodic)
        if len(per) != k:
            raise ValidationError("periodic needs one flag per axis")
        if spacings is None:
            spacings = [2 * np.pi / s for s in p.shape[:-1]]
        h = tuple(float(x) for x in spacings)
        if len(h) != k or any(not x > 0 for x in h):
            raise ValidationError("spacings must be positive, one per axis")
        for arr in (p, t):
            arr.setflags(write=False)
        self.positions, self.translations, self.periodic, self.spacings = p, t, per, h
        self.name = name
        self.ambient = standard_space(n)

    @property
    def k(self) -> int:
        return self.positions.ndim - 1

    @property
    def n(self) -> int:
        return self.ambient.n

    @property
    def shape(self) -> tuple:
        return self.positions.shape[:-1]

    def shifted(self, axis: int, step: int) -> np.ndarray:
        """positions at index + step*e_axis, with lattice translations applied."""
        out = np.roll(self.positions, -step, axis=axis)
        if not self.periodic[axis]:
            return out
        m = self.shape[axis]
        out = out.copy()
        sl = [slice(None)] * (self.k + 1)
        if step > 0:
            sl[axis] = slice(m - step, m)
            out[tuple(sl)] += self.translations[axis]
        elif step < 0:
            sl[axis] = slice(0, -step)
            out[tuple(sl)] -= self.translations[axis]
        return out

    def edge_vectors(self, axis: int) -> np.ndarray:
        return self.shifted(axis, 1) - self.positions

    def rolled(self, axis: int, steps: int) -> "ImmersedLagrangianGrid":
        """The same immersion with grid indices cyclically relabelled."""
        if not self.periodic[axis]:
            raise ValidationError("can only rotate indices along a periodic axis")
        p = self.shifted(axis, steps) if steps else self.positions
        return ImmersedLagrangianGrid(p, self.translations, self.periodic, self.spacings, self.name)

    def to_json(self) -> dict:
        return {"k": self.k, "n": self.n, "periodic": list(self.periodic),
                "positions": self.positions.tolist(),
                "translations": self.translations.tolist(),
                "spacings": list(self.spacings)}

    @classmethod
    def from_json(cls, data) -> "ImmersedLagrangianGrid":
        if isinstance(data, str):
            data = json.loads(data)
        try:
            k, n = int(data["k"]), int(data["n"])
            pos = np.array(data["positions"], dtype=np.float64)
        except (KeyError, TypeError, ValueError) as exc:
            raise ValidationError(f"immersion JSON needs 'k', 'n', 'positions': {exc}") from None
        if pos.ndim != k + 1 or pos.shape[-1] != 2 * n:
            raise ValidationError(f"positions shape {pos.shape} does not match k={k}, n={n}")
        return cls(pos, data.get("translations"), data.get("periodic"), data.get("spacings"))


@dataclasses.dataclass(frozen=True, eq=False)
class MeanCurvatureData:
    immersion: ImmersedLagrangianGrid
    tangents: np.ndarray               # (..., 2n, k) central differences
    frames: np.ndarray                 # (..., 2n, k) orthonormalized
    H: np.ndarray                      # (..., 2n)
    alpha_H: np.ndarray                # (..., 2n); g-dual of H, acts on normal vectors
    beta: np.ndarray | None = None     # (k, ...) edge integrals along +axis
    periods: np.ndarray | None = None  # (k,)
    generator_lengths: np.ndarray | None = None  # (k,)
    d_beta: np.ndarray | None = None   # (k(k-1)/2, ...) plaquette sums

    @property
    def max_abs_d_beta(self) -> float:
        if self.d_beta is None or self.d_beta.size == 0:
            return 0.0
        return float(np.max(np.abs(self.d_beta)))

    @property
    def normal_residual(self) -> float:
        """Largest |g(H, e_i)|: H should be normal."""
        return float(np.max(np.abs(np.einsum("...d,...di->...i", self.H, self.frames))))


def _require_periodic(imm: ImmersedLagrangianGrid):
    if not all(imm.periodic):
        raise ValidationError("curvature data needs every grid axis to be periodic")


def tangent_frames(imm: ImmersedLagrangianGrid) -> np.ndarray:
    """Central-difference tangent vectors, shape (..., 2n, k)."""
    cols = []
    for j in range(imm.k):
        if imm.periodic[j]:
            d = (imm.shifted(j, 1) - imm.shifted(j, -1)) / (2 * imm.spacings[j])
        else:
            d = np.gradient(imm.positions, imm.spacings[j], axis=j)
        cols.append(d)
    t = np.stack(cols, axis=-1)
    _, ratio = kernels.orthonormalize(t.reshape(-1, 2 * imm.n, imm.k))
    if np.any(ratio <= _tol().rank):
        bad = int(np.argmin(ratio))
        raise RankDeficient(f"tangent frame degenerate at node {np.unravel_index(bad, imm.shape)}")
    return t


def tangent_frame_list(imm: ImmersedLagrangianGrid) -> list[LagrangianFrame]:
    t = tangent_frames(imm)
    return [LagrangianFrame(b) for b in t.reshape(-1, 2 * imm.n, imm.k)]


def lagrangian_residual_max(imm: ImmersedLagrangianGrid) -> float:
    """Largest |omega(e_i, e_j)| over nodes, for orthonormalized tangents."""
    t = tangent_frames(imm)
    q, _ = kernels.orthonormalize(t.reshape(-1, 2 * imm.n, imm.k))
    iso = np.einsum("mdi,de,mej->mij", q, imm.ambient.omega, q)
    return float(np.max(np.abs(iso)))


def _central(field: np.ndarray, axis: int, h: float) -> np.ndarray:
    return (np.roll(field, -1, axis=axis) - np.roll(field, 1, axis=axis)) / (2 * h)


def mean_curvature(imm: ImmersedLagrangianGrid) -> MeanCurvatureData:
    """H = sum_i (D_{e_i} e_i)^normal for the orthonormalized tangent fields e_i.

    With e_i = sum_j T_j (R^{-1})_{ji} (T = E R), the derivative along e_i
    is sum_j (R^{-1})_{ji} d/du_j, taken by central differences of the
    periodic field E.
    """
    _require_periodic(imm)
    k, dim = imm.k, 2 * imm.n
    t = tangent_frames(imm)
    flat = t.reshape(-1, dim, k)
    q, _ = kernels.orthonormalize(flat)
    e = q.reshape(t.shape)
    r = np.einsum("mdi,mdj->mij", q, flat)
    rinv = np.linalg.inv(r).reshape(imm.shape + (k, k))
    acc = np.zeros(imm.shape + (dim,))
    for j in range(k):
        de = _central(e, j, imm.spacings[j])          # (..., 2n, k)
        acc += np.einsum("...di,...i->...d", de, rinv[..., j, :])
    h = acc - np.einsum("...di,...i->...d", e, np.einsum("...di,...d->...i", e, acc))
    return MeanCurvatureData(imm, t, e, h, h.copy())


def beta_covector(data: MeanCurvatureData) -> np.ndarray:
    """Ambient covector b with beta(v) = b . v = g(H, Jv)."""
    return -data.immersion.ambient.apply_J(data.H)


def beta_form(data: MeanCurvatureData) -> MeanCurvatureData:
    """beta = J^* alpha_H as edge integrals (average of the endpoint covectors
    applied to the edge chord)."""
    imm = data.immersion
    b = beta_covector(data)
    edges = []
    for j in range(imm.k):
        b_mid = 0.5 * (b + np.roll(b, -1, axis=j))
        edges.append(np.sum(b_mid * imm.edge_vectors(j), axis=-1))
    return dataclasses.replace(data, beta=np.stack(edges))


def _line(arr: np.ndarray, axis: int, base) -> np.ndarray:
    idx = list(base)
    idx[axis] = slice(None)
    return arr[tuple(idx)]


def plaquette_sums(edge: np.ndarray, i: int, j: int) -> np.ndarray:
    """Oriented boundary sum of a discrete 1-form over the (i, j) plaquettes."""
    return (edge[i] + np.roll(edge[j], -1, axis=i)
            - np.roll(edge[i], -1, axis=j) - edge[j])


def periods_and_dbeta(data: MeanCurvatureData, base=None) -> MeanCurvatureData:
    """Periods of beta along the generator lines through ``base`` and d(beta)."""
    if data.beta is None:
        data = beta_form(data)
    imm = data.immersion
    base = (0,) * imm.k if base is None else tuple(base)
    periods = np.array([np.sum(_line(data.beta[j], j, base)) for j in range(imm.k)])
    lengths = np.array([np.sum(np.linalg.norm(_line(imm.edge_vectors(j), j, base), axis=-1))
                        for j in range(imm.k)])
    pairs = list(itertools.combinations(range(imm.k), 2))
    if pairs:
        d = np.stack([plaquette_sums(data.beta, i, j) for i, j in pairs])
    else:
        d = np.zeros((0,) + imm.shape)
    return dataclasses.replace(data, periods=periods, generator_lengths=lengths, d_beta=d)


def curvature_data(imm: ImmersedLagrangianGrid, base=None) -> MeanCurvatureData:
    return periods_and_dbeta(beta_form(mean_curvature(imm)), base)


def lh_tolerance(data: MeanCurvatureData) -> float:
    return _tol().lh * float(np.sum(data.generator_lengths))


def in_lh(data: MeanCurvatureData) -> bool:
    return bool(np.all(np.abs(data.periods) < lh_tolerance(data)))


def maslov_via_beta(data: MeanCurvatureData) -> np.ndarray:
    """period / pi for each generator."""
    return np.asarray(data.periods) / np.pi


def gauss_frames(imm: ImmersedLagrangianGrid, axis: int, base=None) -> list[LagrangianFrame]:
    """Tangent planes along the generator line, projected onto L(V).

    Central-difference planes are Lagrangian only to O(h^2); the polar
    projection removes that defect so the loop satisfies the isotropy
    invariant exactly.
    """
    base = (0,) * imm.k if base is None else tuple(base)
    t = _line(tangent_frames(imm), axis, base)
    return [nearest_lagrangian(LagrangianFrame(b)) for b in t]


def gauss_loops(imm: ImmersedLagrangianGrid, base=None) -> list[LagrangianLoop]:
    return [LagrangianLoop(gauss_frames(imm, j, base))
            for j in range(imm.k) if imm.periodic[j]]


def gauss_indices(imm: ImmersedLagrangianGrid, base=None) -> list[int]:
    return [maslov_index(loop) for loop in gauss_loops(imm, base)]


def maslov_class_hormander(imm: ImmersedLagrangianGrid, generator: int, *, arcs: int = 8,
                           overlap_fraction: float = 0.5, seed=0, base=None) -> int:
    """Pairing of sigma(G, A) with the generator loop; A is the vertical plane."""
    g = SectionOverLoop(np.stack([f.basis for f in gauss_frames(imm, generator, base)]))
    a = SectionOverLoop.constant(vertical(imm.n), g.N)
    cover = GoodCoverOnLoop.uniform(arcs, overlap_fraction)
    return MASLOV_CLASS_SIGN * pair_with_fundamental_cycle(build_cocycle(g, a, cover, seed))


def fomenko_check(imm: ImmersedLagrangianGrid, *, arcs: int = 8, seed=0) -> dict:
    """Instance-level consistency of 'N in LH implies vanishing Maslov class'."""
    data = curvature_data(imm)
    lh = in_lh(data)
    by_gauss = gauss_indices(imm)
    by_hormander = [maslov_class_hormander(imm, j, arcs=arcs, seed=seed) for j in range(imm.k)]
    by_beta = maslov_via_beta(data)
    vanishing = all(v == 0 for v in by_gauss) and all(v == 0 for v in by_hormander)
    consistent = (not lh) or vanishing
    notes = []
    if not lh:
        notes.append("not in LH")
    if by_gauss != by_hormander:
        notes.append("Gauss-loop and Hörmander indices disagree")
    return {
        "immersion": imm.name,
        "grid": list(imm.shape),
        "in_lh": lh,
        "periods": data.periods.tolist(),
        "lh_tolerance": lh_tolerance(data),
        "max_abs_d_beta": data.max_abs_d_beta,
        "lagrangian_residual": lagrangian_residual_max(imm),
        "normal_residual": data.normal_residual,
        "indices_gauss": by_gauss,
        "indices_hormander": by_hormander,
        "indices_beta": by_beta.tolist(),
        "verdict": "CONSISTENT" if consistent else "VIOLATION",
        "notes": notes,
    }


# Presets

def plane_curve(terms, m: int = 256) -> ImmersedLagrangianGrid:
    """Closed curve z(t) = sum c_f e^{i f t} in C; every curve is Lagrangian
    and its Maslov index is twice its rotation index."""
    t = 2 * np.pi * np.arange(m) / m
    z = np.zeros(m, dtype=complex)
    for term in terms:
        try:
            f = int(term["freq"])
            c = complex(float(term.get("re", 0.0)), float(term.get("im", 0.0)))
        except (KeyError, TypeError, ValueError) as exc:
            raise ValidationError(f"bad curve term {term!r}: {exc}") from None
        z += c * np.exp(1j * f * t)
    return ImmersedLagrangianGrid(np.stack([z.real, z.imag], axis=-1),
                                  name=f"plane_curve(terms={len(terms)}, m={m})")


def _axes(m, k: int) -> list[int]:
    ms = [int(m)] * k if np.ndim(m) == 0 else [int(x) for x in m]
    if len(ms) != k:
        raise ValidationError(f"need {k} grid sizes, got {len(ms)}")
    return ms


def _mesh(ms) -> list[np.ndarray]:
    return np.meshgrid(*[2 * np.pi * np.arange(mi) / mi for mi in ms], indexing="ij")


def circle(r: float = 1.0, m: int = 256) -> ImmersedLagrangianGrid:
    t = 2 * np.pi * np.arange(m) / m
    return ImmersedLagrangianGrid(np.stack([r * np.cos(t), r * np.sin(t)], axis=-1),
                                  name=f"circle(r={r}, m={m})")


def product_torus(radii=(1.0, 1.0), m=128) -> ImmersedLagrangianGrid:
    radii = [float(r) for r in radii]
    k = len(radii)
    ts = _mesh(_axes(m, k))
    x = [r * np.cos(t) for r, t in zip(radii, ts)]
    y = [r * np.sin(t) for r, t in zip(radii, ts)]
    return ImmersedLagrangianGrid(np.stack(x + y, axis=-1),
                                  name=f"product_torus(radii={radii}, m={m})")


def _parse_terms(terms, n: int):
    out = []
    for term in terms:
        try:
            kv = np.array(term["k"], dtype=float)
            a, b = float(term.get("a", 0.0)), float(term.get("b", 0.0))
        except (KeyError, TypeError, ValueError) as exc:
            raise ValidationError(f"bad trigonometric term {term!r}: {exc}") from None
        if kv.shape != (n,) or not np.all(kv == np.round(kv)):
            raise ValidationError(f"wave vector {term['k']!r} must be {n} integers")
        out.append((kv, a, b))
    return out


def trig_gradient(terms, xs) -> list[np.ndarray]:
    """grad f for f(x) = sum a cos(k.x) + b sin(k.x)."""
    n = len(xs)
    grad = [np.zeros_like(xs[0]) for _ in range(n)]
    for kv, a, b in _parse_terms(terms, n):
        phase = sum(kv[i] * xs[i] for i in range(n))
        coef = -a * np.sin(phase) + b * np.cos(phase)
        for i in range(n):
            grad[i] = grad[i] + kv[i] * coef
    return grad


def trig_hessian(terms, xs) -> np.ndarray:
    n = len(xs)
    hess = np.zeros(xs[0].shape + (n, n))
    for kv, a, b in _parse_terms(terms, n):
        phase = sum(kv[i] * xs[i] for i in range(n))
        coef = -a * np.cos(phase) - b * np.sin(phase)
        hess += coef[..., None, None] * np.outer(kv, kv)
    return hess


def lagrangian_graph(terms=(), m=128, n: int = 2, shift=None) -> ImmersedLagrangianGrid:
    """Graph {(x, c + grad f(x))} over T^n, f a trigonometric polynomial."""
    xs = _mesh(_axes(m, n))
    grad = trig_gradient(terms, xs)
    c = np.zeros(n) if shift is None else np.asarray(shift, dtype=float)
    pos = np.stack(list(xs) + [g + ci for g, ci in zip(grad, c)], axis=-1)
    trans = np.hstack([2 * np.pi * np.eye(n), np.zeros((n, n))])
    return ImmersedLagrangianGrid(pos, trans, name=f"lagrangian_graph(n={n}, terms={len(terms)}, m={m})")


def flat_plane(n: int = 2, m=64) -> ImmersedLagrangianGrid:
    imm = lagrangian_graph((), m, n)
    imm.name = f"flat_plane(n={n}, m={m})"
    return imm


def linear_graph(slopes, m=64) -> ImmersedLagrangianGrid:
    """The flat Lagrangian torus {(x, S x)} in C^n / lattice, S symmetric."""
    s = np.asarray(slopes, dtype=float)
    n = s.shape[0]
    if s.shape != (n, n) or not np.allclose(s, s.T):
        raise ValidationError("slopes must be a symmetric square matrix")
    xs = _mesh(_axes(m, n))
    x = np.stack(xs, axis=-1)
    pos = np.concatenate([x, x @ s.T], axis=-1)
    trans = np.hstack([2 * np.pi * np.eye(n), 2 * np.pi * s.T])
    return ImmersedLagrangianGrid(pos, trans, name=f"linear_graph(n={n}, m={m})")


def perturbed_torus(radii=(1.0, 1.0), terms=(), m=128, shift=None) -> ImmersedLagrangianGrid:
    """Graph of the closed 1-form c + df over the product torus.

    With actions a_j = (|z_j|^2 - r_j^2)/2 and angles t_j the form
    omega = sum da_j ^ dt_j, so z_j = sqrt(r_j^2 + 2 a_j(t)) e^{i t_j} with
    a = c + grad f is exactly Lagrangian.
    """
    radii = np.asarray(radii, dtype=float)
    n = len(radii)
    ts = _mesh(_axes(m, n))
    grad = trig_gradient(terms, ts)
    c = np.zeros(n) if shift is None else np.asarray(shift, dtype=float)
    rho2 = [radii[j] ** 2 + 2 * (c[j] + grad[j]) for j in range(n)]
    if min(float(np.min(x)) for x in rho2) <= 0:
        raise ValidationError("perturbation too large: a radius becomes imaginary")
    rho = [np.sqrt(x) for x in rho2]
    x = [rho[j] * np.cos(ts[j]) for j in range(n)]
    y = [rho[j] * np.sin(ts[j]) for j in range(n)]
    return ImmersedLagrangianGrid(np.stack(x + y, axis=-1),
                                  name=f"perturbed_torus(n={n}, terms={len(terms)}, m={m})")


def random_terms(n: int, seed, count: int = 3, max_freq: int = 2, amplitude: float = 0.15) -> list[dict]:
    """Seeded trigonometric coefficient table with nonzero wave vectors."""
    rng = np.random.default_rng(seed)
    terms = []
    while len(terms) < count:
        kv = rng.integers(-max_freq, max_freq + 1, size=n)
        if not kv.any():
            continue
        a, b = amplitude * rng.standard_normal(2) / max(1.0, float(kv @ kv))
        terms.append({"k": kv.tolist(), "a": float(a), "b": float(b)})
    return terms


IMMERSION_PRESETS = {
    "circle": circle,
    "plane_curve": plane_curve,
    "product_torus": product_torus,
    "lagrangian_graph": lagrangian_graph,
    "flat_plane": flat_plane,
    "linear_graph": linear_graph,
    "perturbed_torus": perturbed_torus,
}


def immersion_preset(name: str, **params) -> ImmersedLagrangianGrid:
    try:
        factory = IMMERSION_PRESETS[name]
    except KeyError:
        raise ValidationError(f"unknown immersion preset {name!r}; "
                              f"choose from {sorted(IMMERSION_PRESETS)}") from None
    try:
        return factory(**params)
    except TypeError as exc:
        raise ValidationError(f"bad parameters for immersion preset {name!r}: {exc}") from None
