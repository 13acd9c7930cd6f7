"""Linear-product homotopy for the system class {f, J(x) * lambda - beta}.

The solver exploits the product structure: beta is normalized to e_n, a
start system G is built whose first n-1 extra equations are products of d
affine-linear x-factors and one linear lambda-factor, start points are
enumerated combinatorially from witness points of V(f), and two linear
homotopies (x-space slice moves, then G -> F) carry them to the target.
"""

from __future__ import annotations

import itertools
import logging
import math
from dataclasses import dataclass, field
from typing import Iterator, List, Optional

import numpy as np

from .linalg import InvalidBetaError, SingularMatrixError, lu_solve
from .poly import MultiPoly, PolySystem
from .start_systems import (
    DEDUP_TOL,
    RESIDUAL_TOL,
    dedup_points,
    refine_on,
    unit_complex,
    witness_points,
)
from .tracker import (
    CONVERGED,
    DIVERGENT,
    FAILED,
    HomotopyPair,
    NoConvergenceError,
    TrackConfig,
    newton_correct,
    track_path,
)

logger = logging.getLogger(__name__)


class DegreeZeroJacobianError(ValueError):
    pass


def root_bound(n: int, k: int, d: int, D: int) -> int:
    """C(n-1, n-k) * d^(n-k) * D, the path/root count of the method."""
    if not (n > k >= 1):
        raise ValueError("require n > k >= 1")
    if d < 0 or D < 0:
        raise ValueError("require d >= 0 and D >= 0")
    return math.comb(n - 1, n - k) * d ** (n - k) * D


@dataclass
class LPHProblem:
    """The triple (f, J, beta): k polynomials f in n variables, an n x k
    polynomial matrix J, and a nonzero constant vector beta."""

    f: PolySystem
    J: List[List[MultiPoly]]
    beta: np.ndarray

    def __post_init__(self):
        self.beta = np.asarray(self.beta, dtype=complex)
        n, k = self.f.n_vars, len(self.f)
        if not (n > k >= 1):
            raise ValueError("require n > k >= 1")
        if len(self.J) != n or any(len(row) != k for row in self.J):
            raise ValueError("J must be an n x k matrix of polynomials")
        if self.beta.shape != (n,) or np.abs(self.beta).max() == 0:
            raise InvalidBetaError("beta must be a nonzero vector of length n")

    @property
    def n(self) -> int:
        return self.f.n_vars

    @property
    def k(self) -> int:
        return len(self.f)

    @property
    def d(self) -> int:
        return max(max(entry.degree, 0) for row in self.J for entry in row)

    def full_system(self) -> PolySystem:
        """The square (n+k)-dimensional system {f, J * lambda - beta}."""
        n, k = self.n, self.k
        N = n + k
        polys = [p.lift(N) for p in self.f.polys]
        for i in range(n):
            row = MultiPoly.constant(N, -self.beta[i])
            for j in range(k):
                lam = MultiPoly.variable(n + j, N)
                row = row + self.J[i][j].lift(N) * lam
            polys.append(row)
        return PolySystem(N, polys)


@dataclass
class NormalizedProblem:
    """Problem with beta rotated to e_n: J_prime = A @ J, A @ beta = e_n."""

    original: LPHProblem
    A: np.ndarray
    J_prime: List[List[MultiPoly]]

    def normalized_full_system(self) -> PolySystem:
        n, k = self.original.n, self.original.k
        N = n + k
        polys = [p.lift(N) for p in self.original.f.polys]
        for i in range(n):
            row = MultiPoly.zero(N)
            for j in range(k):
                row = row + self.J_prime[i][j].lift(N) * MultiPoly.variable(n + j, N)
            if i == n - 1:
                row = row - 1
            polys.append(row)
        return PolySystem(N, polys)


def normalize(p: LPHProblem) -> NormalizedProblem:
    from .linalg import beta_normalizer

    A = beta_normalizer(p.beta)
    n, k = p.n, p.k
    J_prime = []
    for i in range(n):
        row = []
        for j in range(k):
            entry = MultiPoly.zero(n)
            for m in range(n):
                entry = entry + p.J[m][j] * A[i, m]
            row.append(entry)
        J_prime.append(row)
    return NormalizedProblem(p, A, J_prime)


@dataclass
class LinearProductG:
    """Start system G = {f, g_1, ..., g_n} with g_i = l_i1 ... l_id * h_i
    for i < n and g_n the last row of the normalized linear part."""

    n: int
    k: int
    d: int
    l_x: List[List[MultiPoly]]        # (n-1) x d affine-linear factors, n x-vars
    h_coeffs: np.ndarray              # (n-1) x k lambda-factor coefficients
    g_last_row: List[MultiPoly]       # J_prime[n-1], n x-vars
    system: PolySystem                # assembled G, n+k vars

    @property
    def N(self) -> int:
        return self.n + self.k


def build_G(np_: NormalizedProblem, rng: np.random.Generator) -> LinearProductG:
    p = np_.original
    n, k, d = p.n, p.k, p.d
    if d < 1:
        raise DegreeZeroJacobianError("constant J: linear-product start system undefined")
    N = n + k
    l_x = []
    for _ in range(n - 1):
        row = []
        for _ in range(d):
            terms = [
                (tuple(int(i == j) for j in range(n)), unit_complex(rng)) for i in range(n)
            ]
            terms.append(((0,) * n, unit_complex(rng)))
            row.append(MultiPoly(n, terms))
        l_x.append(row)
    h_coeffs = np.array(
        [[unit_complex(rng) for _ in range(k)] for _ in range(n - 1)], dtype=complex
    )
    polys = [q.lift(N) for q in p.f.polys]
    for i in range(n - 1):
        g = MultiPoly.constant(N, 1.0)
        for fac in l_x[i]:
            g = g * fac.lift(N)
        h = MultiPoly.zero(N)
        for j in range(k):
            h = h + h_coeffs[i, j] * MultiPoly.variable(n + j, N)
        polys.append(g * h)
    g_last_row = np_.J_prime[n - 1]
    g_n = MultiPoly.constant(N, -1.0)
    for j in range(k):
        g_n = g_n + g_last_row[j].lift(N) * MultiPoly.variable(n + j, N)
    polys.append(g_n)
    return LinearProductG(n, k, d, l_x, h_coeffs, g_last_row, PolySystem(N, polys))


@dataclass(frozen=True)
class ChoiceIndex:
    """One start-root class: which of the first n-1 product rows contribute
    an x-factor (alpha_i = 1) and which factor is picked in each."""

    alpha: tuple
    factor_pick: tuple  # one 0-based pick per alpha_i = 1 row, in row order

    def picked_rows(self):
        return [i for i, a in enumerate(self.alpha) if a == 1]


def enumerate_choices(n: int, k: int, d: int) -> Iterator[ChoiceIndex]:
    """All C(n-1, n-k) * d^(n-k) choices, lexicographic on alpha then picks."""
    if not (n > k >= 1) or d < 1:
        raise ValueError("require n > k >= 1 and d >= 1")
    alphas = sorted(
        {
            tuple(1 if i in ones else 0 for i in range(n - 1))
            for ones in itertools.combinations(range(n - 1), n - k)
        }
    )
    for alpha in alphas:
        for picks in itertools.product(range(d), repeat=n - k):
            yield ChoiceIndex(alpha, picks)


def h1_track(
    M: List[np.ndarray],
    f: PolySystem,
    L: List[MultiPoly],
    L_prime: List[MultiPoly],
    cfg: TrackConfig,
    gamma1: complex,
    warnings: Optional[list] = None,
) -> List[np.ndarray]:
    """Move witness points from the slice L to the slice L_prime."""
    n = f.n_vars
    start = PolySystem(n, list(f.polys) + list(L))
    target = PolySystem(n, list(f.polys) + list(L_prime))
    H = HomotopyPair(start, target, gamma1)
    out = []
    for m in M:
        try:
            z0 = newton_correct(H, m, 0.0, cfg)
            res = track_path(H, z0, cfg)
        except (SingularMatrixError, NoConvergenceError) as exc:
            if warnings is not None:
                warnings.append(f"H1 start correction failed: {exc}")
            continue
        if res.status != CONVERGED:
            msg = f"H1 path ended {res.status}; point dropped"
            logger.warning(msg)
            if warnings is not None:
                warnings.append(msg)
            continue
        refined = refine_on(target, res.endpoint)
        if refined is not None:
            out.append(refined)
        elif warnings is not None:
            warnings.append("H1 endpoint failed refinement; point dropped")
    return out


def backsolve_lambda(
    x_star: np.ndarray, G: LinearProductG, choice: ChoiceIndex
) -> np.ndarray:
    """Unique lambda with (x_star, lambda) a root of G for this choice:
    h_i(lambda) = 0 on the rows whose product vanished through lambda,
    plus the inhomogeneous last row."""
    k = G.k
    rows = []
    rhs = []
    for i, a in enumerate(choice.alpha):
        if a == 0:
            rows.append(G.h_coeffs[i])
            rhs.append(0.0)
    rows.append(np.array([g.evaluate(x_star) for g in G.g_last_row], dtype=complex))
    rhs.append(1.0)
    A = np.array(rows, dtype=complex)
    if A.shape != (k, k):
        raise ValueError("lambda system is not square")
    return lu_solve(A, np.array(rhs, dtype=complex))


@dataclass
class LPHResult:
    solutions: List[np.ndarray]
    D: int
    omega_count: int
    bound: int
    converged: int
    divergent: int
    failed: int
    witness_M: List[np.ndarray] = field(default_factory=list)
    warnings: List[str] = field(default_factory=list)


def _solve_constant_J(p: LPHProblem, cfg, rng, dedup_tol) -> LPHResult:
    # Degenerate d = 0 route: J is constant, so lambda decouples from x.
    M, D, _ = witness_points(p.f, rng, cfg)
    Jc = np.array(
        [[entry.evaluate(np.zeros(p.n, dtype=complex)) for entry in row] for row in p.J],
        dtype=complex,
    )
    lam, res_lsq, *_ = np.linalg.lstsq(Jc, p.beta, rcond=None)
    solutions = []
    if np.abs(Jc @ lam - p.beta).max() <= RESIDUAL_TOL:
        for x in M:
            solutions.append(np.concatenate([x, lam]))
    return LPHResult(
        dedup_points(solutions, dedup_tol), D, 0, 0, len(solutions), 0, 0, witness_M=M
    )


def lph_solve(
    p: LPHProblem,
    cfg: Optional[TrackConfig] = None,
    rng: Optional[np.random.Generator] = None,
    dedup_tol: float = DEDUP_TOL,
) -> LPHResult:
    """All isolated solutions of {f, J * lambda - beta} via the
    linear-product start system (witness slice -> slice moves -> lambda
    back-solve -> final homotopy to the target)."""
    cfg = cfg or TrackConfig()
    rng = rng if rng is not None else np.random.default_rng(0)
    n, k, d = p.n, p.k, p.d
    if d == 0:
        return _solve_constant_J(p, cfg, rng, dedup_tol)

    warnings: List[str] = []
    M, D, sliced = witness_points(p.f, rng, cfg)
    np_ = normalize(p)
    G = build_G(np_, rng)
    gamma1 = unit_complex(rng)
    gamma2 = unit_complex(rng)

    omega: List[np.ndarray] = []
    for choice in enumerate_choices(n, k, d):
        L_prime = [
            G.l_x[row][pick] for row, pick in zip(choice.picked_rows(), choice.factor_pick)
        ]
        M_prime = h1_track(M, p.f, sliced.L, L_prime, cfg, gamma1, warnings)
        for x_star in M_prime:
            try:
                lam = backsolve_lambda(x_star, G, choice)
            except SingularMatrixError:
                msg = "singular lambda back-solve; point dropped"
                logger.warning(msg)
                warnings.append(msg)
                continue
            omega.append(np.concatenate([x_star, lam]))

    target = np_.normalized_full_system()
    H2 = HomotopyPair(G.system, target, gamma2)
    original = p.full_system()
    counts = {CONVERGED: 0, DIVERGENT: 0, FAILED: 0}
    endpoints = []
    for w in omega:
        try:
            z0 = newton_correct(H2, w, 0.0, cfg)
            res = track_path(H2, z0, cfg)
        except (SingularMatrixError, NoConvergenceError):
            counts[FAILED] += 1
            warnings.append("H2 start correction failed")
            continue
        counts[res.status] += 1
        if res.status == CONVERGED:
            refined = refine_on(original, res.endpoint)
            if refined is not None:
                endpoints.append(refined)
            else:
                counts[CONVERGED] -= 1
                counts[FAILED] += 1
    solutions = dedup_points(endpoints, dedup_tol)
    solutions.sort(key=lambda z: tuple(v for c in z for v in (c.real, c.imag)))
    return LPHResult(
        solutions,
        D,
        len(omega),
        root_bound(n, k, d, D),
        counts[CONVERGED],
        counts[DIVERGENT],
        counts[FAILED],
        witness_M=M,
        warnings=warnings,
    )
