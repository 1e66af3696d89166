"""Dispatch an ExperimentConfig to the library and collect a RunReport."""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Optional

from . import bounds as bnd
from .catalog import from_config
from .config import ExperimentConfig
from .errors import BilliardError, BudgetExceeded, ConfigInvalid, UnsupportedAmbientDim
from .homology import DEFAULT_BUDGET, SphereBouquet, build_complex, necklace_free_floor, parse_mode
from .render import render_svg
from .solver import SolveSettings, find_periodic_trajectories, verify_index_shift

FORMAT_VERSION = "1.0"

EXIT_OK, EXIT_CHECK, EXIT_CONFIG, EXIT_BUDGET = 0, 1, 2, 3


@dataclass
class RunReport:
    config: dict
    results: dict = field(default_factory=dict)
    checks: dict = field(default_factory=dict)
    diagnostics: dict = field(default_factory=dict)
    errors: list = field(default_factory=list)
    format_version: str = FORMAT_VERSION

    @property
    def exit_code(self) -> int:
        if any(e["type"] == "BudgetExceeded" for e in self.errors):
            return EXIT_BUDGET
        if any(e["type"] == "ConfigInvalid" for e in self.errors):
            return EXIT_CONFIG
        if self.errors or not all(self.checks.values()):
            return EXIT_CHECK
        return EXIT_OK

    def to_dict(self) -> dict:
        return {
            "format_version": self.format_version,
            "config": self.config,
            "results": self.results,
            "checks": self.checks,
            "diagnostics": self.diagnostics,
            "errors": self.errors,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "RunReport":
        return cls(
            config=data["config"],
            results=data.get("results", {}),
            checks=data.get("checks", {}),
            diagnostics=data.get("diagnostics", {}),
            errors=data.get("errors", []),
            format_version=data.get("format_version", FORMAT_VERSION),
        )


def _frac(v):
    if isinstance(v, Fraction):
        return v.numerator if v.denominator == 1 else str(v)
    return v


def _settings(cfg: ExperimentConfig) -> SolveSettings:
    return SolveSettings(**cfg.settings.values())


def _run_bound(cfg, report):
    betti = bnd.BettiVector.of(cfg.betti)
    rep = bnd.bound_report(betti, cfg.period)
    report.results["bounds"] = rep.to_dict()
    report.checks["poincare_weighted_sum"] = 2 * rep.weighted_sum == betti.m * rep.B


def _bouquet(cfg) -> SphereBouquet:
    if cfg.bouquet is not None:
        return SphereBouquet(tuple(cfg.bouquet))
    return SphereBouquet.from_betti(cfg.betti)


def _run_homology(cfg, report, out_dir):
    bouquet = _bouquet(cfg)
    relative, quotient = parse_mode(cfg.mode)
    budget = cfg.budget or DEFAULT_BUDGET
    cx = build_complex(bouquet, cfg.p, relative, quotient, budget=budget, check=True)
    res = cx.betti_numbers()
    report.results["bouquet"] = list(bouquet.sphere_dims)
    report.results["mode"] = cx.mode
    report.results["homology"] = res.to_dict()
    report.results["cells_per_dim"] = [cx.count(d) for d in range(cx.top_dim + 1)]
    report.checks["boundary_squared_zero"] = True
    if relative and quotient:
        floor = necklace_free_floor(bouquet, cfg.p)
        report.results["lemma_floor"] = floor
        report.checks["bouquet_floor"] = res.total >= floor
    if out_dir is not None:
        path = Path(out_dir) / "complex.txt"
        path.write_text(cx.to_text())
        report.diagnostics["complex_listing"] = str(path)


def _solution_block(S):
    return {
        "manifold_used": S.manifold.to_config(),
        "k": S.k,
        "count": len(S.solutions),
        "nondegenerate_count": len(S.nondegenerate),
        "solutions": [s.to_dict() for s in S.nondegenerate],
        "degenerate_solutions": [s.to_dict() for s in S.degenerate],
    }


def applicable_bound(m: int, betti, k: int) -> Optional[int]:
    """Largest counting bound known for (m, B, k), rounded up; None if none applies."""
    B = sum(betti)
    candidates: list[Fraction] = []
    small = bnd.small_period_bounds(m, B)
    if k == 2:
        candidates.append(small["p2"])
    elif k == 3:
        candidates.append(small["p3"])
    elif bnd.is_prime(k):
        candidates.append(Fraction(bnd.theorem_bound(m, B, k)))
    if m == 1:
        candidates.append(Fraction(bnd.birkhoff_phi(k)))
    if not candidates:
        return None
    return math.ceil(max(candidates))


def _solve(cfg, report):
    M = from_config(cfg.manifold.model_dump())
    S = find_periodic_trajectories(M, cfg.k, _settings(cfg))
    report.results["solve"] = _solution_block(S)
    report.diagnostics["solver"] = S.diagnostics
    tol = S.settings.newton_tol
    report.checks["residuals_within_tol"] = all(s.residual <= tol for s in S.solutions)
    return M, S


def _run_verify(cfg, report, S, M):
    betti = tuple(cfg.betti) if cfg.betti is not None else M.betti
    if betti is None:
        raise ConfigInvalid([{"field": "betti", "message": "manifold has no known Betti numbers; give 'betti'"}])
    bv = bnd.BettiVector.of(betti)
    count = len(S.nondegenerate)
    bound = applicable_bound(bv.m, bv.k, cfg.k)
    report.results["verify"] = {"betti": list(bv.k), "B": bv.B, "count": count, "bound": bound}
    if bound is not None:
        report.checks["count_ge_bound"] = count >= bound
    shifts = [verify_index_shift(S.manifold, s, S.settings).to_dict() for s in S.nondegenerate]
    report.results["index_shift"] = shifts
    report.checks["index_shift"] = all(r["pass"] for r in shifts)


def _svg_path(cfg, out_dir):
    if cfg.output.svg:
        return cfg.output.svg
    if out_dir is not None:
        return str(Path(out_dir) / "trajectories.svg")
    return None


def run(cfg: ExperimentConfig, out_dir=None) -> RunReport:
    report = RunReport(config=cfg.model_dump(mode="json", exclude_none=False))
    start = time.perf_counter()
    try:
        if cfg.command == "bound":
            _run_bound(cfg, report)
        elif cfg.command == "homology":
            _run_homology(cfg, report, out_dir)
        else:
            M, S = _solve(cfg, report)
            if cfg.command == "verify":
                _run_verify(cfg, report, S, M)
            path = _svg_path(cfg, out_dir)
            if cfg.command == "render" or path is not None:
                title = f"{M!r}, k={cfg.k}"
                render_svg(S.manifold, S.solutions, path, title=title)
                if path is not None:
                    report.diagnostics["svg"] = path
    except BudgetExceeded as exc:
        report.errors.append({"type": "BudgetExceeded", "message": str(exc), "estimate": exc.estimate})
    except ConfigInvalid as exc:
        report.errors.append({"type": "ConfigInvalid", "message": str(exc), "fields": exc.errors})
    except (BilliardError, ValueError, ArithmeticError) as exc:
        report.errors.append({"type": type(exc).__name__, "message": str(exc)})
    report.diagnostics["wall_time"] = time.perf_counter() - start
    return report


def numeric_fields(report: dict) -> dict:
    """The reproducible part of a report (everything except timing and paths)."""
    return {"results": report["results"], "checks": report["checks"], "errors": report["errors"]}
