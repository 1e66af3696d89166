"""Multistart Newton search for closed k-periodic billiard trajectories."""

from __future__ import annotations

import logging
import os
import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, replace
from typing import Optional

import numpy as np
from scipy.stats import qmc

from .errors import DegenerateInput, DiagonalCollapse, HessianError, NoConvergence
from .geometry import (
    EmbeddedManifold,
    PolygonConfig,
    default_guard,
    hessian_fd,
    length_gradient_array,
    length_hessian_array,
    lift_trajectory,
    polygon_length,
    reflection_residual,
    segments,
)

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class SolveSettings:
    multistart_count: int = 200
    rng_seed: int = 0
    newton_tol: float = 1e-10
    max_newton_iters: int = 60
    diagonal_guard: Optional[float] = None
    dedup_tol: float = 1e-5
    degeneracy_threshold: float = 1e-6
    trust_radius: float = 0.5
    stall_iters: int = 15
    hessian_step: float = 1e-4
    rotate_charts: bool = True

    def __post_init__(self):
        if self.multistart_count < 1:
            raise ValueError("multistart_count must be >= 1")
        if self.max_newton_iters < 1:
            raise ValueError("max_newton_iters must be >= 1")
        for name in ("newton_tol", "dedup_tol", "degeneracy_threshold", "trust_radius", "hessian_step"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be strictly positive")
        if self.diagonal_guard is not None and not self.diagonal_guard > 0:
            raise ValueError("diagonal_guard must be strictly positive")

    def guard(self, M: EmbeddedManifold) -> float:
        return default_guard(M) if self.diagonal_guard is None else self.diagonal_guard

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass
class TrajectorySolution:
    config: PolygonConfig
    length: float
    residual: float
    morse_index: int
    min_abs_eigenvalue: float
    degenerate: bool
    eigenvalues: list[float] = field(default_factory=list, repr=False)

    def ambient(self, M) -> np.ndarray:
        return self.config.ambient(M)

    def to_dict(self) -> dict:
        return {
            "chart_points": self.config.chart_points.tolist(),
            "ambient_points": self.config.ambient_points.tolist() if self.config.ambient_points is not None else None,
            "length": self.length,
            "residual": self.residual,
            "morse_index": self.morse_index,
            "min_abs_eigenvalue": self.min_abs_eigenvalue,
            "degenerate": self.degenerate,
        }


@dataclass
class SolutionSet:
    manifold: EmbeddedManifold
    k: int
    settings: SolveSettings
    solutions: list[TrajectorySolution]
    diagnostics: dict = field(default_factory=dict)

    @property
    def nondegenerate(self) -> list[TrajectorySolution]:
        return [s for s in self.solutions if not s.degenerate]

    @property
    def degenerate(self) -> list[TrajectorySolution]:
        return [s for s in self.solutions if s.degenerate]

    def __len__(self):
        return len(self.solutions)


def canonicalize(c: PolygonConfig, M: Optional[EmbeddedManifold] = None) -> PolygonConfig:
    """Lexicographically least chart tuple over the 2k dihedral images.

    With a manifold, periodic chart coordinates are wrapped first.
    """
    if M is not None:
        t = M.wrap(c.chart_points)
        c = PolygonConfig(t, c.ambient_points)
    images = c.dihedral_images()
    keys = [tuple(img.chart_points.ravel().tolist()) for img in images]
    best = min(range(len(images)), key=lambda i: keys[i])
    return images[best]


def orbit_distance(x: np.ndarray, y: np.ndarray) -> float:
    """min over dihedral g of max_i |x_i - y_{g(i)}| for ambient vertex arrays."""
    k = x.shape[0]
    best = np.inf
    for s in range(k):
        rot = np.roll(y, -s, axis=0)
        for img in (rot, rot[::-1]):
            best = min(best, float(np.max(np.linalg.norm(x - img, axis=-1))))
    return best


def _min_seg(M, t):
    return float(np.min(np.linalg.norm(segments(M._embed(t)), axis=-1)))


def newton_refine(M: EmbeddedManifold, c: PolygonConfig, s: SolveSettings) -> PolygonConfig:
    """Damped Newton on the chart gradient of the length.

    Steps are capped at the trust radius and backtracked on the gradient
    norm; when backtracking finds no decrease the first admissible trial
    step is taken anyway, which gets iterates out of local minima of the
    gradient norm. Landing in the diagonal tube halves the step; three
    consecutive landings raise DiagonalCollapse. The search gives up when
    the gradient norm has not halved for ``stall_iters`` iterations.
    """
    delta = s.guard(M)
    t = np.array(c.chart_points, dtype=float)
    shape = t.shape
    if _min_seg(M, t) <= delta:
        raise DiagonalCollapse("start configuration lies in the diagonal tube")

    def state(tt):
        g = length_gradient_array(M, tt)
        return g, float(np.linalg.norm(g))

    g, gn = state(t)
    best, since_best = gn, 0
    for _ in range(s.max_newton_iters):
        cfg = PolygonConfig.on(M, t)
        if gn <= s.newton_tol and reflection_residual(M, cfg, delta) <= s.newton_tol:
            return cfg
        H = length_hessian_array(M, t, s.hessian_step, strict=False)
        step = -np.linalg.lstsq(H, g.ravel(), rcond=None)[0].reshape(shape)
        norm = np.linalg.norm(step)
        if norm > s.trust_radius:
            step *= s.trust_radius / norm
        alpha, tube_hits, accepted = 1.0, 0, False
        fallback = None
        while alpha >= 1 / 64:
            trial = t + alpha * step
            if _min_seg(M, trial) <= delta:
                tube_hits += 1
                if tube_hits >= 3:
                    raise DiagonalCollapse("iterates kept entering the diagonal tube")
                alpha *= 0.5
                continue
            g_new, gn_new = state(trial)
            if fallback is None:
                fallback = (trial, g_new, gn_new)
            if gn_new < (1 - 1e-4 * alpha) * gn:
                t, g, gn = trial, g_new, gn_new
                accepted = True
                break
            alpha *= 0.5
        if not accepted:
            if fallback is None:
                raise DiagonalCollapse("every trial step entered the diagonal tube")
            # escape a local minimum of |grad| with the first admissible step
            t, g, gn = fallback
        if gn < 0.5 * best:
            best, since_best = gn, 0
        else:
            since_best += 1
            if since_best >= s.stall_iters:
                break
    cfg = PolygonConfig.on(M, t)
    if gn <= s.newton_tol and reflection_residual(M, cfg, delta) <= s.newton_tol:
        return cfg
    exc = NoConvergence(f"gradient norm {gn:.3g} after {s.max_newton_iters} iterations")
    exc.last = cfg
    raise exc


def morse_index(M: EmbeddedManifold, c: PolygonConfig, s: Optional[SolveSettings] = None) -> tuple[int, float]:
    """(number of Hessian eigenvalues below -eps, smallest |eigenvalue|)."""
    s = s or SolveSettings()
    eig = np.linalg.eigvalsh(hessian_fd("length", M, c, s.hessian_step, s.guard(M)))
    return int(np.sum(eig < -s.degeneracy_threshold)), float(np.min(np.abs(eig)))


def classify(M: EmbeddedManifold, c: PolygonConfig, s: SolveSettings) -> TrajectorySolution:
    c = canonicalize(c, M)
    c = PolygonConfig.on(M, c.chart_points)
    eig = np.linalg.eigvalsh(hessian_fd("length", M, c, s.hessian_step, s.guard(M)))
    min_abs = float(np.min(np.abs(eig)))
    return TrajectorySolution(
        config=c,
        length=polygon_length(M, c),
        residual=reflection_residual(M, c, s.guard(M)),
        morse_index=int(np.sum(eig < -s.degeneracy_threshold)),
        min_abs_eigenvalue=min_abs,
        degenerate=min_abs < s.degeneracy_threshold,
        eigenvalues=eig.tolist(),
    )


def start_points(M: EmbeddedManifold, k: int, s: SolveSettings) -> np.ndarray:
    """Scrambled Sobol points over the k-fold chart domain, shape (N, k, m).

    The sequence for N starts is a prefix of the one for any larger N.
    """
    m = M.intrinsic_dim
    engine = qmc.Sobol(d=k * m, scramble=True, seed=s.rng_seed)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", UserWarning)
        u = engine.random(s.multistart_count)
    return M.chart_from_unit(u.reshape(-1, k, m))


def _refine_one(args):
    M, t0, s = args
    try:
        return "ok", newton_refine(M, PolygonConfig.on(M, t0), s).chart_points
    except DiagonalCollapse:
        return "collapse", None
    except NoConvergence:
        return "no_convergence", None
    except (np.linalg.LinAlgError, HessianError):
        return "linalg", None


def _threads() -> int:
    try:
        return max(1, int(os.environ.get("BBL_THREADS", "1")))
    except ValueError:
        return 1


def find_periodic_trajectories(M: EmbeddedManifold, k: int, s: Optional[SolveSettings] = None) -> SolutionSet:
    """All distinct k-periodic trajectories found from the multistart sweep."""
    if k < 2:
        raise ValueError("k must be >= 2")
    s = s or SolveSettings()
    if s.rotate_charts:
        M = M.rotated(np.random.default_rng(s.rng_seed))
    delta = s.guard(M)
    starts = start_points(M, k, s)
    tally = {"rejected_starts": 0, "collapse": 0, "no_convergence": 0, "linalg": 0, "duplicates": 0}
    jobs = []
    for t0 in starts:
        if _min_seg(M, t0) < 10 * delta:
            tally["rejected_starts"] += 1
            continue
        jobs.append((M, t0, s))

    workers = _threads()
    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_refine_one, jobs, chunksize=max(1, len(jobs) // (4 * workers))))
    else:
        results = [_refine_one(j) for j in jobs]

    found: list[np.ndarray] = []
    ambient: list[np.ndarray] = []
    for status, t in results:
        if status != "ok":
            tally[status] += 1
            continue
        x = M._embed(t)
        if any(orbit_distance(x, y) <= s.dedup_tol for y in ambient):
            tally["duplicates"] += 1
            continue
        found.append(t)
        ambient.append(x)

    solutions = [classify(M, PolygonConfig.on(M, t), s) for t in found]
    solutions.sort(key=lambda sol: (sol.length, tuple(sol.config.chart_points.ravel())))
    tally["starts"] = len(starts)
    tally["converged"] = sum(1 for st, _ in results if st == "ok")
    log.info("k=%d on %r: %d solutions, diagnostics %s", k, M, len(solutions), tally)
    return SolutionSet(manifold=M, k=k, settings=s, solutions=solutions, diagnostics=tally)


@dataclass
class IndexShiftReport:
    mu: int
    extended_index: int
    expected: int
    extended_dim: int
    min_abs_eigenvalue: float

    @property
    def passed(self) -> bool:
        return self.extended_index == self.expected

    def to_dict(self) -> dict:
        d = asdict(self)
        d["pass"] = self.passed
        return d


def verify_index_shift(M: EmbeddedManifold, sol: TrajectorySolution, s: Optional[SolveSettings] = None) -> IndexShiftReport:
    """Check that the lifted critical point of the extended functional has
    index mu + k(n-1) (k > 2) or mu + (n-1) (k = 2)."""
    s = s or SolveSettings()
    if sol.degenerate:
        raise DegenerateInput("index shift needs a non-degenerate solution")
    c = sol.config
    k, n = c.k, M.ambient_dim
    lift = lift_trajectory(M, c, s.guard(M))
    eig = np.linalg.eigvalsh(hessian_fd("extended", M, lift, s.hessian_step, s.guard(M)))
    ext_index = int(np.sum(eig < -s.degeneracy_threshold))
    shift = (n - 1) if k == 2 else k * (n - 1)
    return IndexShiftReport(
        mu=sol.morse_index,
        extended_index=ext_index,
        expected=sol.morse_index + shift,
        extended_dim=len(eig),
        min_abs_eigenvalue=float(np.min(np.abs(eig))),
    )


def with_settings(s: SolveSettings, **overrides) -> SolveSettings:
    return replace(s, **overrides)
