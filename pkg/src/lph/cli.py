"""Command-line front end: read a polynomial system file, run one of
solve / witness / bound / verify, and emit text or JSON results.

Input file grammar (blank lines and `#` comments ignored):

    vars: x y z
    f:
        <one polynomial per line>
    J: jacobian            # build J as the transposed Jacobian of f
    J:                     # ... or explicit n rows of k comma-separated polys
        <row 1>
        ...
    beta: 1 0 0

Exit codes: 0 success, 1 verification failure, 2 parse/usage error,
3 numerical failure.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
import time
from dataclasses import dataclass
from typing import List, Optional

import numpy as np

from .linalg import InvalidBetaError, SingularMatrixError
from .poly import MultiPoly, ParseError, PolySystem, jacobian_transpose, parse_poly
from .solver import DegreeZeroJacobianError, LPHProblem, lph_solve, root_bound
from .start_systems import AllPathsFailedError, witness_points
from .tracker import NoConvergenceError, TrackConfig
from .witness import RealFilterConfig, real_witness_set, witness_bound

EXIT_OK = 0
EXIT_VERIFY_FAIL = 1
EXIT_PARSE = 2
EXIT_NUMERICAL = 3

VERIFY_TOL = 1e-6


class InputFormatError(ValueError):
    pass


@dataclass
class SystemInput:
    """Parsed contents of an input file."""

    variables: List[str]
    f: PolySystem
    f_text: List[str]
    J: Optional[List[List[MultiPoly]]]
    J_text: Optional[object]  # "jacobian" or list of row strings
    beta: Optional[np.ndarray]

    @property
    def n(self) -> int:
        return len(self.variables)

    @property
    def k(self) -> int:
        return len(self.f)


def read_system(path: str) -> SystemInput:
    with open(path, "r") as fh:
        raw_lines = fh.read().splitlines()

    variables: Optional[List[str]] = None
    f_lines: List[tuple] = []
    j_lines: List[tuple] = []
    j_directive = None
    beta_vals = None
    section = None
    for ln, raw in enumerate(raw_lines, start=1):
        line = raw.split("#", 1)[0].rstrip()
        if not line.strip():
            continue
        stripped = line.strip()
        lower = stripped.lower()
        if lower.startswith("vars:"):
            variables = stripped[5:].split()
            if not variables:
                raise InputFormatError(f"line {ln}: empty vars declaration")
            section = None
        elif lower.startswith("f:"):
            rest = stripped[2:].strip()
            if rest:
                f_lines.append((ln, rest))
            section = "f"
        elif lower.startswith("j:"):
            rest = stripped[2:].strip()
            if rest:
                if rest.lower() != "jacobian":
                    raise InputFormatError(
                        f"line {ln}: J directive must be 'jacobian' or an indented block"
                    )
                j_directive = "jacobian"
                section = None
            else:
                section = "J"
        elif lower.startswith("beta:"):
            try:
                beta_vals = [float(tok) for tok in stripped[5:].split()]
            except ValueError:
                raise InputFormatError(f"line {ln}: beta entries must be numbers")
            if not beta_vals:
                raise InputFormatError(f"line {ln}: empty beta line")
            section = None
        elif section == "f":
            f_lines.append((ln, stripped))
        elif section == "J":
            j_lines.append((ln, stripped))
        else:
            raise InputFormatError(f"line {ln}: unexpected content {stripped!r}")

    if variables is None:
        raise InputFormatError("missing 'vars:' declaration")
    if not f_lines:
        raise InputFormatError("missing 'f:' block")

    polys = [parse_poly(text, variables, line_no=ln) for ln, text in f_lines]
    f = PolySystem(len(variables), polys)

    J = None
    J_text: Optional[object] = None
    if j_directive == "jacobian":
        J = jacobian_transpose(f)
        J_text = "jacobian"
    elif j_lines:
        n, k = len(variables), len(polys)
        if len(j_lines) != n:
            raise InputFormatError(
                f"J block has {len(j_lines)} rows, expected n = {n}"
            )
        J = []
        for ln, text in j_lines:
            cells = [c.strip() for c in text.split(",")]
            if len(cells) != k:
                raise InputFormatError(
                    f"line {ln}: J row has {len(cells)} entries, expected k = {k}"
                )
            J.append([parse_poly(c, variables, line_no=ln) for c in cells])
        J_text = [text for _, text in j_lines]

    beta = np.array(beta_vals, dtype=complex) if beta_vals is not None else None
    if beta is not None and beta.shape != (len(variables),):
        raise InputFormatError("beta length does not match vars")
    return SystemInput(variables, f, [t for _, t in f_lines], J, J_text, beta)


# -- JSON with fixed float formatting ---------------------------------------


def _fmt_float(v: float) -> str:
    if v != v or v in (float("inf"), float("-inf")):
        raise ValueError("non-finite float in JSON output")
    return format(float(v), ".17g")


def to_json(obj) -> str:
    """Serialize with floats at 17 significant digits so identical runs
    produce byte-identical output."""
    if isinstance(obj, dict):
        inner = ",".join(f"{json.dumps(str(k))}:{to_json(v)}" for k, v in obj.items())
        return "{" + inner + "}"
    if isinstance(obj, (list, tuple)):
        return "[" + ",".join(to_json(v) for v in obj) + "]"
    if isinstance(obj, bool):
        return "true" if obj else "false"
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return _fmt_float(float(obj))
    if isinstance(obj, str):
        return json.dumps(obj)
    if obj is None:
        return "null"
    raise TypeError(f"cannot serialize {type(obj)!r}")


def _complex_pairs(z: np.ndarray) -> list:
    return [[float(c.real), float(c.imag)] for c in z]


def _echo_system(inp: SystemInput) -> dict:
    doc = {"vars": inp.variables, "f": inp.f_text}
    if inp.J_text is not None:
        doc["J"] = inp.J_text
    if inp.beta is not None:
        doc["beta"] = [float(b.real) for b in inp.beta]
    return doc


# -- commands ----------------------------------------------------------------


def _parse_float_list(text: str, flag: str) -> List[float]:
    try:
        return [float(tok) for tok in text.replace(",", " ").split()]
    except ValueError:
        raise InputFormatError(f"{flag} expects comma-separated numbers")


def _track_config(args) -> TrackConfig:
    return TrackConfig(newton_tol=args.newton_tol, max_steps=args.max_steps)


def cmd_solve(args) -> int:
    inp = read_system(args.input)
    beta = inp.beta
    if args.beta is not None:
        beta = np.array(_parse_float_list(args.beta, "--beta"), dtype=complex)
    if beta is None:
        raise InputFormatError("solve requires a beta line or --beta")
    J = inp.J if inp.J is not None else jacobian_transpose(inp.f)
    problem = LPHProblem(inp.f, J, beta)
    cfg = _track_config(args)
    rng = np.random.default_rng(args.seed)
    t0 = time.perf_counter()
    result = lph_solve(problem, cfg, rng, dedup_tol=args.dedup_tol)
    elapsed = time.perf_counter() - t0
    original = problem.full_system()

    records = []
    for z in result.solutions:
        records.append(
            {
                "x": _complex_pairs(z[: inp.n]),
                "lambda": _complex_pairs(z[inp.n :]),
                "residual": original.residual(z),
            }
        )
    if args.json:
        doc = {
            "system": _echo_system(inp),
            "seed": args.seed,
            "bound": result.bound,
            "counts": {
                "D": result.D,
                "omega": result.omega_count,
                "converged": result.converged,
                "divergent": result.divergent,
                "failed": result.failed,
            },
            "solutions": records,
        }
        print(to_json(doc))
    else:
        for i, rec in enumerate(records):
            x = ", ".join(f"{re:+.12g}{im:+.12g}i" for re, im in rec["x"])
            lam = ", ".join(f"{re:+.12g}{im:+.12g}i" for re, im in rec["lambda"])
            print(f"solution {i}: x = ({x})  lambda = ({lam})  residual = {rec['residual']:.3e}")
        print(
            f"summary: D={result.D} omega={result.omega_count} bound={result.bound} "
            f"converged={result.converged} divergent={result.divergent} "
            f"failed={result.failed} solutions={len(records)} elapsed={elapsed:.2f}s"
        )
    return EXIT_OK


def cmd_witness(args) -> int:
    inp = read_system(args.input)
    beta = None
    if args.beta is not None:
        beta = _parse_float_list(args.beta, "--beta")
        if len(beta) != inp.n:
            raise InputFormatError("--beta length does not match vars")
    elif inp.beta is not None:
        beta = [float(b.real) for b in inp.beta]
    c_values = _parse_float_list(args.c, "--c") if args.c is not None else None
    cfg = _track_config(args)
    rng = np.random.default_rng(args.seed)
    filter_cfg = RealFilterConfig(tau_imag=args.tau_imag)
    t0 = time.perf_counter()
    rws = real_witness_set(
        inp.f,
        cfg,
        rng,
        beta=beta,
        c_values=c_values,
        filter_cfg=filter_cfg,
        dedup_tol=args.dedup_tol,
    )
    elapsed = time.perf_counter() - t0

    records = [
        {
            "x": [float(v) for v in wp.point],
            "stage": wp.stage,
            "residual": float(wp.residual),
        }
        for wp in rws.points
    ]
    if args.json:
        doc = {
            "system": _echo_system(inp),
            "seed": args.seed,
            "beta": [float(b) for b in rws.beta_used],
            "c": [float(c) for c in rws.c_values],
            "solutions": records,
        }
        print(to_json(doc))
    else:
        print(f"beta = {np.asarray(rws.beta_used)}  c = {rws.c_values}")
        for i, rec in enumerate(records):
            coords = ", ".join(f"{v:+.12g}" for v in rec["x"])
            print(
                f"point {i}: ({coords})  stage = {rec['stage']}  "
                f"residual = {rec['residual']:.3e}"
            )
        print(f"summary: points={len(records)} elapsed={elapsed:.2f}s")
    return EXIT_OK


def cmd_bound(args) -> int:
    inp = read_system(args.input)
    n, k = inp.n, inp.k
    if not (n > k >= 1):
        raise InputFormatError("bound requires k < n (an underdetermined f block)")
    J = inp.J if inp.J is not None else jacobian_transpose(inp.f)
    d = max(max(entry.degree, 0) for row in J for entry in row)
    d_f = max(max(p.degree, 1) for p in inp.f.polys)
    prod_deg = math.prod(max(p.degree, 1) for p in inp.f.polys)
    cfg = _track_config(args)
    rng = np.random.default_rng(args.seed)
    t0 = time.perf_counter()
    _, D, _ = witness_points(inp.f, rng, cfg)
    elapsed = time.perf_counter() - t0
    eq3 = root_bound(n, k, d, D)
    eq6 = witness_bound(n, k, d_f, D) if d_f > 1 else None
    bezout_chain = math.comb(n - 1, k - 1) * (d_f - 1) ** (n - k) * prod_deg
    total_degree = d_f**n * prod_deg
    if args.json:
        doc = {
            "system": _echo_system(inp),
            "seed": args.seed,
            "D": D,
            "root_bound": eq3,
            "witness_bound": eq6 if eq6 is not None else "n/a",
            "bezout_chain": bezout_chain,
            "total_degree": total_degree,
            "mixed_volume": "n/a",
        }
        print(to_json(doc))
    else:
        print(f"D = {D}")
        print(f"root bound (linear product) = {eq3}")
        print(f"witness bound = {eq6 if eq6 is not None else 'n/a'}")
        print(f"Bezout chain bound = {bezout_chain}")
        print(f"total degree product = {total_degree}")
        print("mixed volume = n/a")
        print(f"elapsed = {elapsed:.2f}s")
    return EXIT_OK


def cmd_verify(args) -> int:
    inp = read_system(args.input)
    try:
        with open(args.solutions, "r") as fh:
            doc = json.load(fh)
    except json.JSONDecodeError as exc:
        raise InputFormatError(f"solutions file is not valid JSON: {exc}")
    records = doc.get("solutions")
    if records is None:
        raise InputFormatError("solutions file lacks a 'solutions' array")
    if not records:
        print("warning: empty solution list, verifying vacuously", file=sys.stderr)
        print("verified 0 solutions")
        return EXIT_OK

    # decide which system the records belong to: full critical system when
    # lambda is present, the plain f block otherwise
    worst = -1.0
    worst_idx = -1
    for i, rec in enumerate(records):
        x = np.array([complex(re, im) for re, im in rec["x"]], dtype=complex) \
            if rec["x"] and isinstance(rec["x"][0], list) \
            else np.array([complex(v) for v in rec["x"]], dtype=complex)
        if "lambda" in rec:
            lam = np.array([complex(re, im) for re, im in rec["lambda"]], dtype=complex)
            beta = inp.beta
            if beta is None and "beta" in doc:
                beta = np.array(doc["beta"], dtype=complex)
            if beta is None:
                raise InputFormatError("verify with lambda records requires beta")
            J = inp.J if inp.J is not None else jacobian_transpose(inp.f)
            system = LPHProblem(inp.f, J, beta).full_system()
            r = system.residual(np.concatenate([x, lam]))
        else:
            r = inp.f.residual(x)
        if r > worst:
            worst, worst_idx = r, i
    status = worst <= VERIFY_TOL
    print(
        f"verified {len(records)} solutions; worst residual {worst:.3e} "
        f"at index {worst_idx}: {'PASS' if status else 'FAIL'}"
    )
    return EXIT_OK if status else EXIT_VERIFY_FAIL


def _positive_float(text: str) -> float:
    v = float(text)
    if v <= 0:
        raise argparse.ArgumentTypeError("must be positive")
    return v


def _positive_int(text: str) -> int:
    v = int(text)
    if v <= 0:
        raise argparse.ArgumentTypeError("must be positive")
    return v


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="lph",
        description="Linear-product homotopy solver and real witness sets",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("input", help="system input file")
        p.add_argument("--seed", type=int, default=None, help="RNG seed (default: $LPH_SEED or 0)")
        p.add_argument("--json", action="store_true", help="emit JSON instead of text")
        p.add_argument("--threads", type=_positive_int, default=1,
                       help="cap on concurrent path tracking")
        p.add_argument("--newton-tol", type=_positive_float, default=1e-10)
        p.add_argument("--tau-imag", type=_positive_float, default=1e-6)
        p.add_argument("--dedup-tol", type=_positive_float, default=1e-6)
        p.add_argument("--beta", default=None, help="comma-separated beta override")
        p.add_argument("--c", default=None, help="comma-separated c values (witness)")
        p.add_argument("--max-steps", type=_positive_int, default=10000)

    p_solve = sub.add_parser("solve", help="solve {f, J*lambda - beta}")
    common(p_solve)
    p_witness = sub.add_parser("witness", help="real witness set of V_R(f)")
    common(p_witness)
    p_bound = sub.add_parser("bound", help="degree and root-count bounds")
    common(p_bound)
    p_verify = sub.add_parser("verify", help="re-check a JSON solution file")
    common(p_verify)
    p_verify.add_argument("solutions", help="JSON solutions file")
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.seed is None:
        env = os.environ.get("LPH_SEED")
        try:
            args.seed = int(env) if env is not None else 0
        except ValueError:
            print(f"error: LPH_SEED must be an integer, got {env!r}", file=sys.stderr)
            return EXIT_PARSE
    if args.seed < 0 or args.seed >= 2**64:
        print("error: --seed must be an unsigned 64-bit integer", file=sys.stderr)
        return EXIT_PARSE

    dispatch = {
        "solve": cmd_solve,
        "witness": cmd_witness,
        "bound": cmd_bound,
        "verify": cmd_verify,
    }
    try:
        return dispatch[args.command](args)
    except (ParseError, InputFormatError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except (
        SingularMatrixError,
        NoConvergenceError,
        AllPathsFailedError,
        InvalidBetaError,
        DegreeZeroJacobianError,
    ) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except ValueError as exc:
        # remaining ValueErrors come from input validation (shape and
        # positivity checks in the library constructors)
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE


if __name__ == "__main__":
    sys.exit(main())
