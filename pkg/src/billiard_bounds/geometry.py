"""Embedded manifolds and the two polygon functionals on them.

``length`` is the closed-polygon length on M^k; ``extended`` is the sum of
<a_i, x_i - x_{i+1}> over auxiliary unit directions a_i. Array-level helpers
accept any leading batch shape, ``(..., k, m)`` chart points.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np
from scipy.linalg import null_space

from .errors import (
    DiagonalViolation,
    DimensionMismatch,
    HessianError,
    NonUnitDirection,
    RankDeficientFrame,
)

TWO_PI = 2.0 * math.pi
RANK_TOL = 1e-9
UNIT_TOL = 1e-9


class EmbeddedManifold:
    """A closed m-manifold given by a global (wrapping) chart into R^n.

    Subclasses implement ``_embed`` and ``_frame`` on arrays of shape (..., m)
    and declare ``periods``: the period of each chart coordinate, or None for
    a polar angle in [0, pi].
    """

    name = "manifold"
    #: mod-2 Betti numbers (k_0..k_m), when known
    betti: Optional[tuple[int, ...]] = None
    intrinsic_dim: int
    ambient_dim: int
    periods: tuple[Optional[float], ...]

    def __init__(self, intrinsic_dim: int, ambient_dim: int, periods):
        if intrinsic_dim < 1:
            raise DimensionMismatch(f"intrinsic dimension must be >= 1, got {intrinsic_dim}")
        if ambient_dim <= intrinsic_dim:
            raise DimensionMismatch(f"need n > m, got m={intrinsic_dim}, n={ambient_dim}")
        self.intrinsic_dim = intrinsic_dim
        self.ambient_dim = ambient_dim
        self.periods = tuple(periods)
        self._diameter = None

    # -- subclass interface -------------------------------------------------
    def _embed(self, t: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def _frame(self, t: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def params(self) -> dict:
        return {}

    def rotated(self, rng: np.random.Generator) -> "EmbeddedManifold":
        """Same image with a randomly rotated chart (only where that helps)."""
        return self

    # -- public -----------------------------------------------------------
    def _check(self, t) -> np.ndarray:
        t = np.asarray(t, dtype=float)
        if t.ndim == 0:
            t = t[None]
        if t.shape[-1] != self.intrinsic_dim:
            raise DimensionMismatch(
                f"chart point has {t.shape[-1]} coordinates, manifold needs {self.intrinsic_dim}"
            )
        return t

    def embed(self, t) -> np.ndarray:
        return self._embed(self._check(t))

    def frame(self, t) -> np.ndarray:
        """n x m matrix of chart partial derivatives (batched)."""
        return self._frame(self._check(t))

    def wrap(self, t) -> np.ndarray:
        t = np.array(self._check(t), dtype=float)
        for c, period in enumerate(self.periods):
            if period is not None:
                t[..., c] = np.mod(t[..., c], period)
        return t

    def chart_from_unit(self, u) -> np.ndarray:
        """Map points of the unit cube onto the chart domain."""
        u = np.asarray(u, dtype=float)
        t = np.empty_like(u)
        for c, period in enumerate(self.periods):
            if period is None:
                t[..., c] = np.arccos(1.0 - 2.0 * u[..., c])
            else:
                t[..., c] = period * u[..., c]
        return t

    def diameter_estimate(self) -> float:
        if self._diameter is None:
            rng = np.random.default_rng(12345)
            pts = self.embed(self.chart_from_unit(rng.random((2048, self.intrinsic_dim))))
            extent = pts.max(axis=0) - pts.min(axis=0)
            self._diameter = float(np.linalg.norm(extent))
        return self._diameter

    def to_config(self) -> dict:
        return {"name": self.name, "params": self.params()}

    def __repr__(self):
        args = ", ".join(f"{k}={v!r}" for k, v in self.params().items())
        return f"{type(self).__name__}({args})"


def embed_point(M: EmbeddedManifold, t) -> np.ndarray:
    return M.embed(t)


def tangent_frame(M: EmbeddedManifold, t, rank_tol: float = RANK_TOL) -> np.ndarray:
    """Frame J(t), checked for full column rank."""
    J = M.frame(t)
    sv = np.linalg.svd(J, compute_uv=False)
    if np.min(sv) <= rank_tol:
        raise RankDeficientFrame(f"tangent frame rank deficient, smallest singular value {np.min(sv):.3g}")
    return J


def frame_fd_error(M: EmbeddedManifold, t, h: float = 1e-6) -> float:
    """Relative deviation of the frame from central differences of embed."""
    t = M._check(t)
    J = M.frame(t)
    fd = np.empty_like(J)
    for c in range(M.intrinsic_dim):
        e = np.zeros(M.intrinsic_dim)
        e[c] = h
        fd[..., c] = (M.embed(t + e) - M.embed(t - e)) / (2 * h)
    return float(np.linalg.norm(J - fd) / max(np.linalg.norm(J), 1e-300))


@dataclass(frozen=True, eq=False)
class PolygonConfig:
    """k chart points; ambient points are derived and cached."""

    chart_points: np.ndarray
    ambient_points: Optional[np.ndarray] = field(default=None, repr=False)

    def __post_init__(self):
        t = np.array(self.chart_points, dtype=float)
        if t.ndim == 1:
            t = t[:, None]
        if t.ndim != 2 or t.shape[0] < 2:
            raise DimensionMismatch("need a (k, m) array of chart points with k >= 2")
        t.setflags(write=False)
        object.__setattr__(self, "chart_points", t)
        if self.ambient_points is not None:
            x = np.array(self.ambient_points, dtype=float)
            x.setflags(write=False)
            object.__setattr__(self, "ambient_points", x)

    @classmethod
    def on(cls, M: EmbeddedManifold, chart_points) -> "PolygonConfig":
        t = M._check(np.asarray(chart_points, dtype=float).reshape(-1, M.intrinsic_dim))
        return cls(t, M.embed(t))

    @property
    def k(self) -> int:
        return self.chart_points.shape[0]

    def ambient(self, M: EmbeddedManifold) -> np.ndarray:
        if self.ambient_points is not None:
            return self.ambient_points
        return M.embed(self.chart_points)

    def act(self, shift: int, reverse: bool = False) -> "PolygonConfig":
        """Dihedral image: rotate by ``shift`` then optionally reverse."""
        order = [(a + shift) % self.k for a in range(self.k)]
        if reverse:
            order = order[::-1]
        amb = None if self.ambient_points is None else self.ambient_points[order]
        return PolygonConfig(self.chart_points[order], amb)

    def dihedral_images(self) -> list["PolygonConfig"]:
        return [self.act(s, r) for s in range(self.k) for r in (False, True)]


@dataclass(frozen=True, eq=False)
class ExtendedConfig:
    """A polygon together with unit directions (one per segment; one for k=2)."""

    base: PolygonConfig
    directions: np.ndarray

    def __post_init__(self):
        a = np.array(self.directions, dtype=float)
        if a.ndim == 1:
            a = a[None, :]
        a.setflags(write=False)
        object.__setattr__(self, "directions", a)
        expected = 1 if self.base.k == 2 else self.base.k
        if a.shape[0] != expected:
            raise DimensionMismatch(f"expected {expected} directions, got {a.shape[0]}")


# ---------------------------------------------------------------------------
# array kernels


def segments(x: np.ndarray) -> np.ndarray:
    """d_i = x_i - x_{i+1} along axis -2."""
    return x - np.roll(x, -1, axis=-2)


def length_gradient_array(M: EmbeddedManifold, t: np.ndarray) -> np.ndarray:
    """Chart gradient J_i^T (u_i + v_i), batched over leading axes of t."""
    x = M._embed(t)
    J = M._frame(t)
    d = segments(x)
    u = d / np.linalg.norm(d, axis=-1, keepdims=True)
    v = -np.roll(u, 1, axis=-2)
    w = u + v
    return np.einsum("...nm,...n->...m", J, w)


def min_segment(M: EmbeddedManifold, c: PolygonConfig) -> float:
    return float(np.min(np.linalg.norm(segments(c.ambient(M)), axis=-1)))


def default_guard(M: EmbeddedManifold) -> float:
    return 1e-6 * M.diameter_estimate()


def _guard(M, c, delta):
    delta = default_guard(M) if delta is None else delta
    ms = min_segment(M, c)
    if ms <= delta:
        raise DiagonalViolation(f"segment of length {ms:.3g} within guard {delta:.3g}")


# ---------------------------------------------------------------------------
# public operations


def polygon_length(M: EmbeddedManifold, c: PolygonConfig) -> float:
    """Sum of |x_i - x_{i+1}| over all k cyclic segments.

    Summed with fsum, so the value is invariant under reordering of segments.
    """
    lengths = np.linalg.norm(segments(c.ambient(M)), axis=-1)
    return math.fsum(lengths.tolist())


def length_gradient(M: EmbeddedManifold, c: PolygonConfig, delta: Optional[float] = None) -> np.ndarray:
    """(k, m) array of partial derivatives of the length in chart coordinates."""
    _guard(M, c, delta)
    return length_gradient_array(M, c.chart_points)


def reflection_residual(M: EmbeddedManifold, c: PolygonConfig, delta: Optional[float] = None) -> float:
    """Largest tangential component of u_i + v_i over vertices; 0 at trajectories."""
    _guard(M, c, delta)
    x = c.ambient(M)
    J = M.frame(c.chart_points)
    d = segments(x)
    u = d / np.linalg.norm(d, axis=-1, keepdims=True)
    w = u - np.roll(u, 1, axis=-2)
    Q, _ = np.linalg.qr(J)
    tangential = np.einsum("knm,kn->km", Q, w)
    return float(np.max(np.linalg.norm(tangential, axis=-1)))


def extended_value(M: EmbeddedManifold, e: ExtendedConfig) -> float:
    """sum <a_i, x_i - x_{i+1}>; for k = 2 the single term <a, x_1 - x_2>."""
    a = e.directions
    dev = np.abs(np.linalg.norm(a, axis=-1) - 1.0)
    if np.max(dev) > UNIT_TOL:
        raise NonUnitDirection(f"direction norm deviates from 1 by {np.max(dev):.3g}")
    x = e.base.ambient(M)
    if e.base.k == 2:
        return float(a[0] @ (x[0] - x[1]))
    return math.fsum(np.einsum("kn,kn->k", a, segments(x)).tolist())


def lift_trajectory(M: EmbeddedManifold, c: PolygonConfig, delta: Optional[float] = None) -> ExtendedConfig:
    """Attach the unit chord directions a_i = (x_i - x_{i+1}) / |x_i - x_{i+1}|."""
    _guard(M, c, delta)
    d = segments(c.ambient(M))
    a = d / np.linalg.norm(d, axis=-1, keepdims=True)
    if c.k == 2:
        a = a[:1]
    return ExtendedConfig(c, a)


# ---------------------------------------------------------------------------
# Hessians


def fd_hessian(func: Callable[[np.ndarray], float], x0, h: float = 1e-4) -> np.ndarray:
    """Second central differences of a scalar function (symmetric by construction)."""
    x0 = np.asarray(x0, dtype=float).ravel()
    N = x0.size
    f0 = func(x0)
    H = np.empty((N, N))
    E = np.eye(N) * h
    for i in range(N):
        H[i, i] = (func(x0 + E[i]) - 2 * f0 + func(x0 - E[i])) / h**2
        for j in range(i):
            val = (
                func(x0 + E[i] + E[j])
                - func(x0 + E[i] - E[j])
                - func(x0 - E[i] + E[j])
                + func(x0 - E[i] - E[j])
            ) / (4 * h**2)
            H[i, j] = H[j, i] = val
    return H


def fd_jacobian(grad: Callable[[np.ndarray], np.ndarray], x0, h: float) -> np.ndarray:
    """Central differences of a batched gradient map; columns = perturbed coordinate."""
    x0 = np.asarray(x0, dtype=float)
    N = x0.size
    E = np.eye(N).reshape((N,) + x0.shape) * h
    batch = np.concatenate([x0 + E, x0 - E])
    g = grad(batch).reshape(2, N, N)
    return ((g[0] - g[1]) / (2 * h)).T


def symmetry_defect(H: np.ndarray) -> float:
    scale = np.linalg.norm(H)
    return float(np.linalg.norm(H - H.T) / scale) if scale > 0 else 0.0


def length_hessian_array(
    M: EmbeddedManifold, t: np.ndarray, h: float = 1e-4, sym_tol: float = 1e-4, strict: bool = True
) -> np.ndarray:
    """Hessian of the length in the km chart coordinates.

    Differences the analytic gradient; falls back to Richardson
    extrapolation when the raw matrix is not symmetric enough.
    """
    t = np.asarray(t, dtype=float)
    shape = t.shape

    def grad(batch):
        return length_gradient_array(M, batch.reshape((-1,) + shape)).reshape(batch.shape[0], -1)

    H = fd_jacobian(grad, t, h)
    if strict and symmetry_defect(H) > sym_tol:
        H2 = fd_jacobian(grad, t, h / 2)
        H = (4 * H2 - H) / 3
        if symmetry_defect(H) > sym_tol:
            raise HessianError(f"Hessian symmetry defect {symmetry_defect(H):.3g} after Richardson")
    return 0.5 * (H + H.T)


def sphere_bases(a: np.ndarray) -> list[np.ndarray]:
    """Orthonormal n x (n-1) basis of the tangent space of S^{n-1} at each a_i."""
    return [null_space(ai[None, :]) for ai in a]


def extended_chart_function(M: EmbeddedManifold, e: ExtendedConfig) -> tuple[Callable[[np.ndarray], float], np.ndarray]:
    """f in local coordinates (sphere-tangent offsets s, then chart t) around e.

    a_i(s_i) = normalize(a_i + E_i s_i). Returns (f, origin vector).
    """
    base_t = e.base.chart_points
    k, m = base_t.shape
    a0 = e.directions
    bases = sphere_bases(a0)
    n = M.ambient_dim
    ns = a0.shape[0] * (n - 1)

    def f(z):
        s = z[:ns].reshape(a0.shape[0], n - 1)
        t = z[ns:].reshape(k, m)
        a = a0 + np.einsum("inj,ij->in", np.stack(bases), s)
        a = a / np.linalg.norm(a, axis=-1, keepdims=True)
        x = M._embed(t)
        if k == 2:
            return float(a[0] @ (x[0] - x[1]))
        return float(np.einsum("kn,kn->", a, segments(x)))

    z0 = np.concatenate([np.zeros(ns), base_t.ravel()])
    return f, z0


def hessian_fd(kind: str, M: EmbeddedManifold, config, h: Optional[float] = None, delta: Optional[float] = None) -> np.ndarray:
    """Finite-difference Hessian of ``"length"`` (PolygonConfig, km coordinates)
    or ``"extended"`` (ExtendedConfig, sphere-tangent then chart coordinates)."""
    h = 1e-4 if h is None else h
    if kind == "length":
        _guard(M, config, delta)
        return length_hessian_array(M, config.chart_points, h)
    if kind == "extended":
        _guard(M, config.base, delta)
        f, z0 = extended_chart_function(M, config)
        return fd_hessian(f, z0, h)
    raise ValueError(f"unknown functional {kind!r}")


def extended_gradient_fd(M: EmbeddedManifold, e: ExtendedConfig, h: float = 1e-6) -> np.ndarray:
    """Central-difference gradient of the extended functional in local coordinates."""
    f, z0 = extended_chart_function(M, e)
    g = np.empty_like(z0)
    for i in range(z0.size):
        dz = np.zeros_like(z0)
        dz[i] = h
        g[i] = (f(z0 + dz) - f(z0 - dz)) / (2 * h)
    return g


def as_config(M: EmbeddedManifold, points: Sequence) -> PolygonConfig:
    return PolygonConfig.on(M, points)
