"""Built-in manifolds and construction from ``{"name": ..., "params": {...}}``."""

from __future__ import annotations

import math
from typing import Optional

import numpy as np
from scipy.stats import special_ortho_group

from .errors import ConfigInvalid
from .geometry import TWO_PI, EmbeddedManifold


def _sphere_coords(t: np.ndarray) -> np.ndarray:
    """Unit vector in R^{m+1} from polar angles t[..., :m-1] and azimuth t[..., m-1].

    S^1: (cos t, sin t). S^m: (sin t_0 * s_{m-1}(rest), cos t_0), so t = 0 is
    the north pole (0, ..., 0, 1).
    """
    m = t.shape[-1]
    if m == 1:
        return np.stack([np.cos(t[..., 0]), np.sin(t[..., 0])], axis=-1)
    inner = _sphere_coords(t[..., 1:])
    th = t[..., :1]
    return np.concatenate([np.sin(th) * inner, np.cos(th)], axis=-1)


def _sphere_frame(t: np.ndarray) -> np.ndarray:
    m = t.shape[-1]
    if m == 1:
        return np.stack([-np.sin(t[..., 0]), np.cos(t[..., 0])], axis=-1)[..., None]
    inner = _sphere_coords(t[..., 1:])
    inner_J = _sphere_frame(t[..., 1:])
    th = t[..., 0][..., None]
    d_theta = np.concatenate([np.cos(th) * inner, -np.sin(th)], axis=-1)
    zeros = np.zeros(inner_J.shape[:-2] + (1, m - 1))
    d_rest = np.concatenate([np.sin(th)[..., None] * inner_J, zeros], axis=-2)
    return np.concatenate([d_theta[..., None], d_rest], axis=-1)


class Circle(EmbeddedManifold):
    name = "circle"
    betti = (1, 1)

    def __init__(self, radius: float = 1.0):
        super().__init__(1, 2, (TWO_PI,))
        self.radius = float(radius)

    def _embed(self, t):
        return self.radius * _sphere_coords(t)

    def _frame(self, t):
        return self.radius * _sphere_frame(t)

    def params(self):
        return {"radius": self.radius}


class Ellipse(EmbeddedManifold):
    """(a cos t, b sin t)."""

    name = "ellipse"
    betti = (1, 1)

    def __init__(self, a: float = 2.0, b: float = 1.0):
        super().__init__(1, 2, (TWO_PI,))
        self.a, self.b = float(a), float(b)
        self._scale = np.array([self.a, self.b])

    def _embed(self, t):
        return self._scale * _sphere_coords(t)

    def _frame(self, t):
        return self._scale[:, None] * _sphere_frame(t)

    def params(self):
        return {"a": self.a, "b": self.b}


DEFAULT_OVAL = {"cos": {2: 0.05, 3: 0.03}, "sin": {5: 0.01}}


class FourierOval(EmbeddedManifold):
    """Polar curve r(t) = 1 + sum_j c_j cos(j t) + s_j sin(j t)."""

    name = "oval"
    betti = (1, 1)

    def __init__(self, cos: Optional[dict] = None, sin: Optional[dict] = None):
        super().__init__(1, 2, (TWO_PI,))
        if cos is None and sin is None:
            cos, sin = DEFAULT_OVAL["cos"], DEFAULT_OVAL["sin"]
        self.cos = {int(j): float(v) for j, v in (cos or {}).items()}
        self.sin = {int(j): float(v) for j, v in (sin or {}).items()}

    def _radius(self, th):
        r = np.ones_like(th)
        dr = np.zeros_like(th)
        for j, c in self.cos.items():
            r = r + c * np.cos(j * th)
            dr = dr - j * c * np.sin(j * th)
        for j, s in self.sin.items():
            r = r + s * np.sin(j * th)
            dr = dr + j * s * np.cos(j * th)
        return r, dr

    def _embed(self, t):
        r, _ = self._radius(t[..., 0])
        return r[..., None] * _sphere_coords(t)

    def _frame(self, t):
        r, dr = self._radius(t[..., 0])
        J = dr[..., None] * _sphere_coords(t) + r[..., None] * _sphere_frame(t)[..., 0]
        return J[..., None]

    def curvature_sign_min(self, samples: int = 4096) -> float:
        """min over t of r^2 + 2 r'^2 - r r''; positive means strictly convex."""
        th = np.linspace(0, TWO_PI, samples, endpoint=False)
        r, dr = self._radius(th)
        h = 1e-5
        ddr = (self._radius(th + h)[1] - self._radius(th - h)[1]) / (2 * h)
        return float(np.min(r**2 + 2 * dr**2 - r * ddr))

    def params(self):
        return {"cos": {str(j): v for j, v in self.cos.items()}, "sin": {str(j): v for j, v in self.sin.items()}}


class _RotatableChart(EmbeddedManifold):
    """x = scale * R s(t); R only moves the chart's polar singularities."""

    def __init__(self, m: int, scale: np.ndarray, rotation: Optional[np.ndarray]):
        periods = (None,) * (m - 1) + (TWO_PI,)
        super().__init__(m, m + 1, periods)
        self.scale = np.asarray(scale, dtype=float)
        self.rotation = np.eye(m + 1) if rotation is None else np.asarray(rotation, dtype=float)

    def _embed(self, t):
        s = _sphere_coords(t)
        return self.scale * (s @ self.rotation.T)

    def _frame(self, t):
        J = _sphere_frame(t)
        return self.scale[:, None] * np.einsum("ij,...jm->...im", self.rotation, J)

    @property
    def betti(self):
        return (1,) + (0,) * (self.intrinsic_dim - 1) + (1,)

    def rotated(self, rng):
        R = special_ortho_group.rvs(self.ambient_dim, random_state=rng)
        new = type(self).__new__(type(self))
        new.__dict__.update(self.__dict__)
        new.rotation = np.asarray(R)
        return new


class Sphere(_RotatableChart):
    name = "sphere"

    def __init__(self, m: int = 2, radius: float = 1.0, rotation=None):
        self.radius = float(radius)
        super().__init__(int(m), np.full(int(m) + 1, self.radius), rotation)

    def params(self):
        return {"m": self.intrinsic_dim, "radius": self.radius}


class Ellipsoid(_RotatableChart):
    """Axis-aligned ellipsoid with semi-axes ``axes`` (triaxial for three)."""

    name = "ellipsoid"

    def __init__(self, axes=(1.0, 2.0, 3.0), rotation=None):
        axes = tuple(float(v) for v in axes)
        self.axes = axes
        super().__init__(len(axes) - 1, np.array(axes), rotation)

    def params(self):
        return {"axes": list(self.axes)}


class FlatTorus(EmbeddedManifold):
    """(r1 cos u, r1 sin u, r2 cos v, r2 sin v) in R^4."""

    name = "flat_torus"
    betti = (1, 2, 1)

    def __init__(self, r1: float = 1.0, r2: float = 1.0):
        super().__init__(2, 4, (TWO_PI, TWO_PI))
        self.r1, self.r2 = float(r1), float(r2)

    def _embed(self, t):
        return np.concatenate(
            [self.r1 * _sphere_coords(t[..., :1]), self.r2 * _sphere_coords(t[..., 1:])], axis=-1
        )

    def _frame(self, t):
        J = np.zeros(t.shape[:-1] + (4, 2))
        J[..., :2, 0] = self.r1 * _sphere_frame(t[..., :1])[..., 0]
        J[..., 2:, 1] = self.r2 * _sphere_frame(t[..., 1:])[..., 0]
        return J

    def params(self):
        return {"r1": self.r1, "r2": self.r2}


class Torus(EmbeddedManifold):
    """Torus of revolution in R^3 with tube radius r around a circle of radius R."""

    name = "torus"
    betti = (1, 2, 1)

    def __init__(self, R: float = 2.0, r: float = 1.0):
        super().__init__(2, 3, (TWO_PI, TWO_PI))
        if not 0 < r < R:
            raise ValueError("need 0 < r < R")
        self.R, self.r = float(R), float(r)

    def _embed(self, t):
        u, v = t[..., 0], t[..., 1]
        rho = self.R + self.r * np.cos(v)
        return np.stack([rho * np.cos(u), rho * np.sin(u), self.r * np.sin(v)], axis=-1)

    def _frame(self, t):
        u, v = t[..., 0], t[..., 1]
        rho = self.R + self.r * np.cos(v)
        du = np.stack([-rho * np.sin(u), rho * np.cos(u), np.zeros_like(u)], axis=-1)
        dv = np.stack(
            [-self.r * np.sin(v) * np.cos(u), -self.r * np.sin(v) * np.sin(u), self.r * np.cos(v)], axis=-1
        )
        return np.stack([du, dv], axis=-1)

    def params(self):
        return {"R": self.R, "r": self.r}


class Suspended(EmbeddedManifold):
    """Base manifold pushed onto a sphere of radius ``radius`` in R^{n+1}
    by inverse stereographic projection; approaches twice the base as the
    radius grows."""

    name = "suspend"

    def __init__(self, base: EmbeddedManifold, radius: float = 10.0):
        super().__init__(base.intrinsic_dim, base.ambient_dim + 1, base.periods)
        self.base = base
        self.radius = float(radius)

    def _embed(self, t):
        x = self.base._embed(t)
        rho = self.radius
        D = np.sum(x * x, axis=-1, keepdims=True) + rho**2
        top = 2 * rho**2 * x / D
        last = rho * (D - 2 * rho**2) / D
        return np.concatenate([top, last], axis=-1)

    def _frame(self, t):
        x = self.base._embed(t)
        J = self.base._frame(t)
        rho = self.radius
        D = np.sum(x * x, axis=-1)[..., None, None] + rho**2
        n = x.shape[-1]
        outer = x[..., :, None] * x[..., None, :]
        d_top = 2 * rho**2 * (np.eye(n) / D - 2 * outer / D**2)
        d_last = 4 * rho**3 * x[..., None, :] / D**2
        dS = np.concatenate([d_top, d_last], axis=-2)
        return dS @ J

    @property
    def betti(self):
        return self.base.betti

    def rotated(self, rng):
        return Suspended(self.base.rotated(rng), self.radius)

    def params(self):
        return {"base": self.base.to_config(), "radius": self.radius}


CATALOG = {
    "circle": Circle,
    "ellipse": Ellipse,
    "oval": FourierOval,
    "sphere": Sphere,
    "ellipsoid": Ellipsoid,
    "flat_torus": FlatTorus,
    "torus": Torus,
    "suspend": Suspended,
}


def from_config(record: dict) -> EmbeddedManifold:
    """Build a catalog manifold from ``{"name": str, "params": {...}}``."""
    if not isinstance(record, dict) or "name" not in record:
        raise ConfigInvalid([{"field": "manifold", "message": "expected an object with a 'name'"}])
    name = record["name"]
    params = dict(record.get("params") or {})
    cls = CATALOG.get(name)
    if cls is None:
        raise ConfigInvalid([{"field": "manifold.name", "message": f"unknown manifold {name!r}; known: {sorted(CATALOG)}"}])
    try:
        if cls is Suspended:
            base = from_config(params.pop("base", {"name": "circle"}))
            return Suspended(base, **params)
        return cls(**params)
    except (TypeError, ValueError) as exc:
        if isinstance(exc, ConfigInvalid):
            raise
        raise ConfigInvalid([{"field": "manifold.params", "message": str(exc)}]) from exc


def default_catalog() -> list[EmbeddedManifold]:
    """One instance of every catalog entry, for sweeping tests."""
    return [
        Circle(),
        Ellipse(2.0, 1.0),
        FourierOval(),
        Sphere(2),
        Sphere(3),
        Ellipsoid((1.0, 2.0, 3.0)),
        FlatTorus(1.0, 1.5),
        Torus(2.0, 1.0),
        Suspended(Ellipse(2.0, 1.0), 5.0),
    ]
