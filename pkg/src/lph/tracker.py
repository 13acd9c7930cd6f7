"""Predictor-corrector continuation of one path of
H(z, t) = (1 - t) * G(z) + gamma * t * F(z) from t = 0 to t = 1.

The predictor is explicit Euler on the Davidenko ODE; the corrector is a
full Newton iteration at fixed t.  Paths end in one of three states:
Converged (finite endpoint, refined at t = 1), Divergent (left every
bounded region), or Failed (tracking broke down at bounded norm).
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Optional

import numpy as np

from .linalg import SingularMatrixError, lu_factor, lu_solve_factored
from .poly import PolySystem

CONVERGED = "Converged"
DIVERGENT = "Divergent"
FAILED = "Failed"


class NoConvergenceError(RuntimeError):
    pass


class InvalidStartError(ValueError):
    pass


class SystemEvaluator:
    """Compiled evaluator for a square polynomial system and its Jacobian.

    All terms of all polynomials (and of all Jacobian entries) are packed
    into flat exponent/coefficient arrays so one call does one vectorized
    power evaluation.
    """

    def __init__(self, system: PolySystem):
        self.n_vars = system.n_vars
        self.n_polys = len(system)
        self._val_exps, self._val_coeffs, self._val_idx = self._pack(
            [(i, p) for i, p in enumerate(system.polys)]
        )
        jac_entries = []
        for i, p in enumerate(system.polys):
            for j in range(system.n_vars):
                jac_entries.append((i * system.n_vars + j, p.differentiate(j)))
        self._jac_exps, self._jac_coeffs, self._jac_idx = self._pack(jac_entries)

    @staticmethod
    def _pack(indexed_polys):
        exps, coeffs, idx = [], [], []
        for slot, p in indexed_polys:
            if p.is_zero:
                continue
            exps.append(p.exps)
            coeffs.append(p.coeffs)
            idx.append(np.full(len(p.coeffs), slot, dtype=np.int64))
        if not exps:
            nv = indexed_polys[0][1].n_vars if indexed_polys else 0
            return (
                np.zeros((0, nv), dtype=np.int64),
                np.zeros(0, dtype=complex),
                np.zeros(0, dtype=np.int64),
            )
        return np.vstack(exps), np.concatenate(coeffs), np.concatenate(idx)

    def values(self, z: np.ndarray) -> np.ndarray:
        out = np.zeros(self.n_polys, dtype=complex)
        if len(self._val_coeffs):
            mono = np.prod(z[None, :] ** self._val_exps, axis=1)
            np.add.at(out, self._val_idx, self._val_coeffs * mono)
        return out

    def jacobian(self, z: np.ndarray) -> np.ndarray:
        out = np.zeros(self.n_polys * self.n_vars, dtype=complex)
        if len(self._jac_coeffs):
            mono = np.prod(z[None, :] ** self._jac_exps, axis=1)
            np.add.at(out, self._jac_idx, self._jac_coeffs * mono)
        return out.reshape(self.n_polys, self.n_vars)

    def magnitude(self, z: np.ndarray) -> float:
        """Max over polynomials of sum_t |c_t| * |z|^e_t: the scale against
        which the evaluation round-off floor is set."""
        out = np.zeros(self.n_polys, dtype=float)
        if len(self._val_coeffs):
            mono = np.prod(np.abs(z)[None, :] ** self._val_exps, axis=1)
            np.add.at(out, self._val_idx, np.abs(self._val_coeffs) * mono)
        return float(out.max()) if self.n_polys else 0.0


@dataclass
class TrackConfig:
    initial_step: float = 0.05
    min_step: float = 1e-7
    max_step: float = 0.1
    newton_tol: float = 1e-10
    newton_max_iters: int = 10
    max_steps: int = 10000
    divergence_norm: float = 1e7
    t_endgame: float = 1e-3

    def __post_init__(self):
        if not (0 < self.min_step <= self.initial_step <= self.max_step < 1):
            raise ValueError("require 0 < min_step <= initial_step <= max_step < 1")
        for name in ("newton_tol", "t_endgame", "divergence_norm"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be positive")


class HomotopyPair:
    """Start/target pair with shared dimension and the gamma constant."""

    def __init__(self, start: PolySystem, target: PolySystem, gamma: complex):
        if start.n_vars != target.n_vars or len(start) != len(target):
            raise ValueError("start and target must have identical shape")
        if len(start) != start.n_vars:
            raise ValueError("homotopy systems must be square")
        if gamma == 0:
            raise ValueError("gamma must be nonzero")
        self.start = start
        self.target = target
        self.gamma = complex(gamma)
        self.n_vars = start.n_vars
        self._g = SystemEvaluator(start)
        self._f = SystemEvaluator(target)

    def eval_h(self, z: np.ndarray, t: float) -> np.ndarray:
        return (1 - t) * self._g.values(z) + self.gamma * t * self._f.values(z)

    def eval_dh_dz(self, z: np.ndarray, t: float) -> np.ndarray:
        return (1 - t) * self._g.jacobian(z) + self.gamma * t * self._f.jacobian(z)

    def eval_dh_dt(self, z: np.ndarray) -> np.ndarray:
        return self.gamma * self._f.values(z) - self._g.values(z)

    def target_values(self, z: np.ndarray) -> np.ndarray:
        return self._f.values(z)

    def scale(self, z: np.ndarray, t: float) -> float:
        """Evaluation magnitude of H at (z, t); residual tolerances below
        roughly eps times this are not numerically meaningful."""
        return (1 - t) * self._g.magnitude(z) + abs(self.gamma) * t * self._f.magnitude(z)


@dataclass
class PathResult:
    status: str
    endpoint: Optional[np.ndarray]
    t_reached: float
    residual: float
    steps_taken: int


def homotopy_eval(H: HomotopyPair, z, t: float) -> np.ndarray:
    z = np.asarray(z, dtype=complex)
    if z.shape != (H.n_vars,):
        raise ValueError("dimension mismatch")
    return H.eval_h(z, t)


def davidenko_rhs(H: HomotopyPair, z, t: float) -> np.ndarray:
    """Tangent dz/dt from (dH/dz) dz/dt = -dH/dt."""
    z = np.asarray(z, dtype=complex)
    J = H.eval_dh_dz(z, t)
    return lu_solve_factored(lu_factor(J), -H.eval_dh_dt(z))


def _cos_angle(u: np.ndarray, v: np.ndarray) -> float:
    nu = float(np.linalg.norm(u))
    nv = float(np.linalg.norm(v))
    if nu == 0.0 or nv == 0.0:
        return 1.0
    return float(np.real(np.vdot(u, v)) / (nu * nv))


def newton_correct(H: HomotopyPair, z, t: float, cfg: TrackConfig,
                   polish: int = 0) -> np.ndarray:
    """Full Newton steps on H(., t) until the inf-norm residual is below
    cfg.newton_tol (relaxed by the local evaluation magnitude, so the target
    stays above the round-off floor).  Optional extra polish steps push the
    residual toward that floor.  Raises on singular Jacobian or
    non-convergence."""
    z = np.asarray(z, dtype=complex).copy()

    def tol_at(zz):
        return cfg.newton_tol * max(1.0, H.scale(zz, t))

    converged = False
    for _ in range(cfg.newton_max_iters):
        r = H.eval_h(z, t)
        if np.abs(r).max() <= tol_at(z):
            converged = True
            break
        J = H.eval_dh_dz(z, t)
        z = z - lu_solve_factored(lu_factor(J), r)
    if not converged and np.abs(H.eval_h(z, t)).max() > tol_at(z):
        raise NoConvergenceError(f"Newton did not reach {cfg.newton_tol} at t={t}")
    for _ in range(polish):
        r = H.eval_h(z, t)
        try:
            factored = lu_factor(H.eval_dh_dz(z, t))
        except SingularMatrixError:
            break
        z_next = z - lu_solve_factored(factored, r)
        if np.abs(H.eval_h(z_next, t)).max() >= np.abs(r).max():
            break
        z = z_next
    return z


def _refine_endpoint(H: HomotopyPair, z: np.ndarray, cfg: TrackConfig):
    """Final Newton polish at t = 1; returns (point, residual) or None."""
    try:
        z1 = newton_correct(H, z, 1.0, cfg, polish=2)
    except (SingularMatrixError, NoConvergenceError):
        return None
    residual = float(np.abs(H.target_values(z1)).max())
    scale = max(1.0, H._f.magnitude(z1))
    if residual > 100 * cfg.newton_tol * scale:
        return None
    # contraction check: at a regular root the Newton step is at round-off
    # level, while a truncated diverging path keeps steps of order |z| even
    # when the magnitude-scaled residual test passes
    try:
        step = lu_solve_factored(
            lu_factor(H.eval_dh_dz(z1, 1.0)), H.eval_h(z1, 1.0)
        )
    except SingularMatrixError:
        return None
    if float(np.abs(step).max()) > 1e-6 * (1.0 + float(np.abs(z1).max())):
        return None
    return z1, residual


def track_path(H: HomotopyPair, z0, cfg: Optional[TrackConfig] = None) -> PathResult:
    cfg = cfg or TrackConfig()
    z = np.asarray(z0, dtype=complex).copy()
    if z.shape != (H.n_vars,):
        raise InvalidStartError("start point has wrong dimension")
    if np.abs(H.eval_h(z, 0.0)).max() > cfg.newton_tol * max(1.0, H.scale(z, 0.0)):
        raise InvalidStartError("start point does not satisfy the start system")

    t = 0.0
    t_end = 1.0 - cfg.t_endgame
    # Truncation point of the endgame tail; the final Newton jump to t = 1
    # happens from here.
    t_tail = 1.0 - 1e-5 * cfg.t_endgame
    step = cfg.initial_step
    successes = 0
    steps_taken = 0
    norm = float(np.abs(z).max())
    # Tight per-step corrector budget: a predictor point that needs many
    # Newton iterations has likely strayed toward another path, so fail the
    # step and halve instead.  The full budget is reserved for the endgame.
    step_cfg = replace(cfg, newton_max_iters=min(cfg.newton_max_iters, 2))

    in_tail = False
    while t < t_tail:
        if steps_taken >= cfg.max_steps:
            return PathResult(FAILED, None, t, float("inf"), steps_taken)
        if not in_tail and t >= t_end:
            in_tail = True
        if in_tail:
            # Geometric tail: cap the step by a fraction of the remaining
            # distance so far-away endpoints are followed, not jumped at.
            h = min(step, 0.5 * (1.0 - t), t_tail - t)
        else:
            h = min(step, t_end - t)
        # once the step is tiny the prediction is accurate and jumping is
        # not a concern, so give Newton its full budget and drop the guard
        tight = h > 1e-4
        try:
            dz = davidenko_rhs(H, z, t)
            z_pred = z + h * dz
            z_new = newton_correct(H, z_pred, t + h, step_cfg if tight else cfg)
            if tight:
                # corrector success also requires the correction to stay
                # small against the predicted move; a large pull-back means
                # the iteration latched onto a different path
                move = float(np.abs(z_pred - z).max())
                corr = float(np.abs(z_new - z_pred).max())
                ok = corr <= max(
                    0.5 * move, 10 * cfg.newton_tol * (1.0 + float(np.abs(z).max()))
                )
            else:
                ok = True
            if ok and h > 10 * cfg.min_step:
                # tangent consistency: a rotation past 60 degrees in one
                # step means either a hairpin the step cannot resolve or a
                # hop onto a neighboring path, so halve and retry
                dz_new = davidenko_rhs(H, z_new, t + h)
                ok = _cos_angle(dz, dz_new) >= 0.5
        except (SingularMatrixError, NoConvergenceError):
            ok = False
        steps_taken += 1
        if ok:
            z = z_new
            t = t + h
            new_norm = float(np.abs(z).max())
            if new_norm > cfg.divergence_norm:
                return PathResult(DIVERGENT, None, t, float("inf"), steps_taken)
            norm = new_norm
            successes += 1
            if successes >= 3:
                step = min(step * 1.5, cfg.max_step)
                successes = 0
        else:
            successes = 0
            step = step / 2
            if step < cfg.min_step:
                try:
                    growing = float(np.abs(z + cfg.min_step * davidenko_rhs(H, z, t)).max()) > norm
                except SingularMatrixError:
                    growing = False
                status = DIVERGENT if growing else FAILED
                return PathResult(status, None, t, float("inf"), steps_taken)

    refined = _refine_endpoint(H, z, cfg)
    steps_taken += 1
    if refined is None:
        status = DIVERGENT if float(np.abs(z).max()) > cfg.divergence_norm else FAILED
        return PathResult(status, None, t, float("inf"), steps_taken)
    z1, residual = refined
    return PathResult(CONVERGED, z1, 1.0, residual, steps_taken)
