"""Witness points by generic affine slicing, solved with a total-degree
start system (scaled roots of unity) and the gamma-trick homotopy.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from typing import Iterator, List, Optional

import numpy as np

from .linalg import SingularMatrixError, lu_factor, lu_solve_factored
from .poly import MultiPoly, PolySystem
from .tracker import (
    CONVERGED,
    FAILED,
    HomotopyPair,
    NoConvergenceError,
    PathResult,
    TrackConfig,
    newton_correct,
    track_path,
)

DEDUP_TOL = 1e-6
RESIDUAL_TOL = 1e-8


class ZeroPolynomialError(ValueError):
    pass


class AllPathsFailedError(RuntimeError):
    pass


def unit_complex(rng: np.random.Generator) -> complex:
    return cmath.exp(2j * math.pi * rng.random())


@dataclass
class SlicedSystem:
    f: PolySystem
    L: List[MultiPoly]

    @property
    def square(self) -> PolySystem:
        return PolySystem(self.f.n_vars, list(self.f.polys) + list(self.L))


@dataclass
class TotalDegreeStart:
    degrees: List[int]
    offsets: List[complex]

    def system(self) -> PolySystem:
        n = len(self.degrees)
        polys = []
        for i, (d, r) in enumerate(zip(self.degrees, self.offsets)):
            exps = [0] * n
            exps[i] = d
            polys.append(MultiPoly(n, [(tuple(exps), 1.0), ((0,) * n, -r)]))
        return PolySystem(n, polys)


def random_slice(f: PolySystem, rng: np.random.Generator) -> SlicedSystem:
    """n-k affine-linear polynomials with unit-modulus coefficients."""
    n = f.n_vars
    k = len(f)
    if k >= n:
        raise ValueError("slicing requires k < n")
    L = []
    for _ in range(n - k):
        terms = [(tuple(int(i == j) for j in range(n)), unit_complex(rng)) for i in range(n)]
        terms.append(((0,) * n, 2.0 * (2.0 * rng.random() - 1.0)))
        L.append(MultiPoly(n, terms))
    return SlicedSystem(f, L)


def total_degree_roots(ts: TotalDegreeStart) -> Iterator[np.ndarray]:
    """All prod(d_i) roots of {z_i^d_i - r_i}, as scaled roots of unity."""
    per_coord = []
    for d, r in zip(ts.degrees, ts.offsets):
        mag = abs(r) ** (1.0 / d)
        arg = cmath.phase(r)
        per_coord.append([mag * cmath.exp(1j * (arg + 2 * math.pi * j) / d) for j in range(d)])
    counts = [len(c) for c in per_coord]
    total = math.prod(counts)
    for flat in range(total):
        root = []
        rem = flat
        for c in per_coord:
            root.append(c[rem % len(c)])
            rem //= len(c)
        yield np.array(root, dtype=complex)


def dedup_points(points, tol: float = DEDUP_TOL):
    kept: list = []
    for p in points:
        if not any(np.abs(p - q).max() < tol for q in kept):
            kept.append(p)
    return kept


def refine_on(system: PolySystem, point: np.ndarray, tol: float = RESIDUAL_TOL,
              max_iters: int = 20) -> Optional[np.ndarray]:
    """Newton-polish a point against `system`; None if it does not reach tol."""
    ident = HomotopyPair(system, system, 1.0)
    cfg = TrackConfig(newton_tol=tol, newton_max_iters=max_iters)
    try:
        refined = newton_correct(ident, point, 1.0, cfg, polish=2)
    except (SingularMatrixError, NoConvergenceError):
        return None
    scale = max(1.0, ident.scale(refined, 1.0))
    if float(np.abs(system.evaluate(refined)).max()) > tol * scale:
        return None
    # same contraction test as endpoint refinement: reject points where the
    # Newton step has not collapsed to round-off level
    try:
        step = lu_solve_factored(
            lu_factor(ident.eval_dh_dz(refined, 1.0)), ident.eval_h(refined, 1.0)
        )
    except SingularMatrixError:
        return None
    if float(np.abs(step).max()) > 1e-6 * (1.0 + float(np.abs(refined).max())):
        return None
    return refined


def solve_square(F: PolySystem, cfg: Optional[TrackConfig] = None,
                 rng: Optional[np.random.Generator] = None,
                 return_results: bool = False):
    """All isolated solutions of a square system via a total-degree homotopy."""
    cfg = cfg or TrackConfig()
    rng = rng if rng is not None else np.random.default_rng(0)
    if len(F) != F.n_vars:
        raise ValueError("system must be square")
    degrees = []
    for p in F.polys:
        if p.is_zero:
            raise ZeroPolynomialError("zero polynomial in square system")
        degrees.append(max(p.degree, 1))
    ts = TotalDegreeStart(degrees, [unit_complex(rng) for _ in degrees])
    gamma = unit_complex(rng)
    H = HomotopyPair(ts.system(), F, gamma)
    results: List[PathResult] = []
    endpoints = []
    for z0 in total_degree_roots(ts):
        res = track_path(H, z0, cfg)
        results.append(res)
        if res.status == CONVERGED:
            refined = refine_on(F, res.endpoint)
            if refined is not None:
                endpoints.append(refined)
    if not endpoints and results and all(r.status == FAILED for r in results):
        raise AllPathsFailedError("every path of the total-degree homotopy failed")
    solutions = dedup_points(endpoints)
    if return_results:
        return solutions, results
    return solutions


def witness_points(f: PolySystem, rng: Optional[np.random.Generator] = None,
                   cfg: Optional[TrackConfig] = None):
    """Witness points of V(f) on a random slice; returns (points, D)."""
    rng = rng if rng is not None else np.random.default_rng(0)
    sliced = random_slice(f, rng)
    M = solve_square(sliced.square, cfg, rng)
    return M, len(M), sliced
