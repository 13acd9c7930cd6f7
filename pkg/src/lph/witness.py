"""Real witness sets: at least one real point per connected component of a
real variety, via critical points of random linear objectives and recursive
hyperplane augmentation.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import List, Optional

import numpy as np

from .poly import MultiPoly, PolySystem, jacobian_transpose
from .solver import LPHProblem, lph_solve
from .start_systems import DEDUP_TOL, solve_square
from .tracker import SystemEvaluator, TrackConfig

logger = logging.getLogger(__name__)

REAL_RESIDUAL_TOL = 1e-6


@dataclass
class RealFilterConfig:
    tau_imag: float = 1e-6
    refine: bool = True

    def __post_init__(self):
        if self.tau_imag <= 0:
            raise ValueError("tau_imag must be positive")


@dataclass
class WitnessPoint:
    point: np.ndarray  # real vector in the x-space
    stage: int
    residual: float


@dataclass
class RealWitnessSet:
    points: List[WitnessPoint]
    beta_used: np.ndarray
    c_values: List[float]

    def as_array(self) -> np.ndarray:
        return np.array([wp.point for wp in self.points], dtype=float)


def build_critical_system(f: PolySystem, beta) -> LPHProblem:
    """Lagrange critical system of the linear objective with gradient beta:
    {f, sum_i lambda_i grad(f_i) - beta}."""
    return LPHProblem(f, jacobian_transpose(f), np.asarray(beta, dtype=complex))


def augment(f: PolySystem, beta, c: float) -> PolySystem:
    """Append the hyperplane beta . x + c = 0 to f."""
    n = f.n_vars
    beta = np.asarray(beta, dtype=float)
    terms = [(tuple(int(i == j) for j in range(n)), beta[i]) for i in range(n)]
    terms.append(((0,) * n, float(c)))
    return PolySystem(n, list(f.polys) + [MultiPoly(n, terms)])


def _real_newton(ev: SystemEvaluator, x: np.ndarray, max_iters: int = 20) -> Optional[np.ndarray]:
    for _ in range(max_iters):
        vals = ev.values(x.astype(complex))
        if np.abs(vals).max() <= 1e-8:
            return x
        J = ev.jacobian(x.astype(complex)).real
        try:
            step = np.linalg.solve(J, vals.real)
        except np.linalg.LinAlgError:
            return None
        x = x - step
    vals = ev.values(x.astype(complex))
    return x if np.abs(vals).max() <= 1e-8 else None


def real_filter(
    points, cfg: Optional[RealFilterConfig], square_system: PolySystem
) -> List[np.ndarray]:
    """Keep near-real points, drop imaginary parts, optionally re-converge
    with a real Newton iteration on the (real-coefficient) square system."""
    cfg = cfg or RealFilterConfig()
    ev = SystemEvaluator(square_system) if cfg.refine else None
    out = []
    for z in points:
        z = np.asarray(z, dtype=complex)
        if np.abs(z.imag).max() >= cfg.tau_imag:
            continue
        x = z.real.copy()
        if cfg.refine:
            x = _real_newton(ev, x)
            if x is None:
                continue
        out.append(x)
    return out


def witness_bound(n: int, k: int, d_f: int, D: int) -> int:
    """Upper bound on the real witness set size over all recursion stages."""
    if not (n > k > 0):
        raise ValueError("require n > k > 0")
    if d_f <= 1:
        raise ValueError("require max degree > 1")
    return sum(
        math.comb(n - 1 - j, n - k - j) * (d_f - 1) ** (n - k - j) * D
        for j in range(n - k + 1)
    )


def numerical_rank(M: np.ndarray, rel_tol: float = 1e-8) -> int:
    """Rank by full-pivot Gaussian elimination with a relative threshold."""
    M = np.array(M, dtype=complex)
    if M.size == 0:
        return 0
    norm = float(np.abs(M).max())
    if norm == 0:
        return 0
    rank = 0
    while min(M.shape) > 0:
        flat = int(np.argmax(np.abs(M)))
        r, c = divmod(flat, M.shape[1])
        if abs(M[r, c]) <= rel_tol * norm:
            break
        rank += 1
        row = M[r] / M[r, c]
        M = M - np.outer(M[:, c], row)
        M = np.delete(np.delete(M, r, axis=0), c, axis=1)
    return rank


def full_rank_check(f: PolySystem, sample_points) -> List[dict]:
    """Advisory Jacobian-rank report at sample points near V(f)."""
    k = len(f)
    Jt = jacobian_transpose(f)
    report = []
    for pt in sample_points:
        pt = np.asarray(pt, dtype=complex)
        Jmat = np.array(
            [[Jt[i][j].evaluate(pt) for i in range(f.n_vars)] for j in range(k)],
            dtype=complex,
        )
        r = numerical_rank(Jmat)
        deficient = r < k
        if deficient:
            logger.warning("rank-deficient Jacobian (rank %d < %d) at sample", r, k)
        report.append({"point": pt, "rank": r, "deficient": deficient})
    return report


def real_witness_set(
    f: PolySystem,
    cfg: Optional[TrackConfig] = None,
    rng: Optional[np.random.Generator] = None,
    beta=None,
    c_values=None,
    filter_cfg: Optional[RealFilterConfig] = None,
    dedup_tol: float = DEDUP_TOL,
) -> RealWitnessSet:
    """Real witness points of V_R(f), tagged by the recursion stage that
    produced them.  beta is drawn once and reused; each stage augments with
    a fresh constant c."""
    cfg = cfg or TrackConfig()
    rng = rng if rng is not None else np.random.default_rng(0)
    filter_cfg = filter_cfg or RealFilterConfig()
    n, k0 = f.n_vars, len(f)
    if k0 > n:
        raise ValueError("more equations than variables")

    if beta is None:
        beta = (0.5 + rng.random(n)) * np.where(rng.random(n) < 0.5, -1.0, 1.0)
    beta = np.asarray(beta, dtype=float)
    n_stages = n - k0
    if c_values is None:
        c_values = [float(rng.uniform(-5, 5)) for _ in range(n_stages)]
    c_values = [float(c) for c in list(c_values)]
    if len(c_values) < n_stages:
        c_values = c_values + [float(rng.uniform(-5, 5)) for _ in range(n_stages - len(c_values))]

    kept: List[WitnessPoint] = []
    cur = f
    for stage in range(n_stages + 1):
        k = k0 + stage
        if k == n:
            sols = solve_square(cur, cfg, rng)
            reals = real_filter(sols, filter_cfg, cur)
        else:
            prob = build_critical_system(cur, beta)
            result = lph_solve(prob, cfg, rng, dedup_tol=dedup_tol)
            for w in result.warnings:
                logger.warning("stage %d: %s", stage, w)
            full_rank_check(cur, result.witness_M)
            reals_full = real_filter(result.solutions, filter_cfg, prob.full_system())
            reals = [r[:n] for r in reals_full]
        for x in reals:
            if f.residual(x.astype(complex)) > REAL_RESIDUAL_TOL:
                continue
            if any(np.abs(x - wp.point).max() < dedup_tol for wp in kept):
                continue
            kept.append(WitnessPoint(x, stage, f.residual(x.astype(complex))))
        if k < n:
            cur = augment(cur, beta, c_values[stage])
    return RealWitnessSet(kept, beta, c_values)
