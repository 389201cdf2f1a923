"""Command-line front end.

Subcommands: analyze, classify, orbit, equiv, invariants, selftest.  States
come from file paths (JSON or text) or named specs like ghz:4:0.8; every
random draw derives from the single --seed value.  Exit codes are a stable
contract: 0 success (or equivalent), 1 failure (or inequivalent), 2 parse or
usage error, 3 size guard, 4 undecided equivalence.
"""

import argparse
import json
import sys
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from .states import to_density
from .local_unitary import apply_local_unitary, haar_random_local_unitary
from .stabilizer import (
    NULL_TOL,
    algebra_type,
    stabilizer_density,
    stabilizer_pure,
)
from .invariants import fingerprint_drift, invariant_fingerprint
from .equivalence import EQUIV_TOL, FINGERPRINT_TOL, decide_equivalence
from .classify import classify
from .io import GuardError, StateFormatError, resolve_state
from .selftest import run_selftest

EXIT_OK = 0
EXIT_FAIL = 1
EXIT_PARSE = 2
EXIT_GUARD = 3
EXIT_UNKNOWN = 4


def _scalar(value) -> str:
    if value is None:
        return "none"
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return format(value, ".12g")
    if isinstance(value, (list, tuple)):
        return "[" + ", ".join(_scalar(v) for v in value) + "]"
    return str(value)


def _text_lines(obj, prefix=""):
    if isinstance(obj, dict):
        for key, value in obj.items():
            path = f"{prefix}.{key}" if prefix else str(key)
            yield from _text_lines(value, path)
    elif isinstance(obj, list) and obj and isinstance(obj[0], (dict, list)):
        for i, row in enumerate(obj):
            yield from _text_lines(row, f"{prefix}[{i}]")
    else:
        yield f"{prefix} = {_scalar(obj)}"


def _emit(args, payload: dict) -> None:
    if args.format == "json":
        print(json.dumps(payload, indent=2))
    else:
        for line in _text_lines(payload):
            print(line)


def _states(args, expected: int):
    specs = list(args.state or []) + list(args.paths)
    if len(specs) != expected:
        raise StateFormatError(
            f"{args.command} needs exactly {expected} state argument(s) "
            f"(via --state or positional paths), got {len(specs)}"
        )
    out = []
    for i, spec in enumerate(specs):
        rng = np.random.default_rng(np.random.SeedSequence(args.seed, spawn_key=(99, i)))
        out.append((spec, resolve_state(spec, rng)))
    return out


def cmd_analyze(args) -> int:
    (spec, psi), = _states(args, 1)
    k = stabilizer_pure(psi, args.tol_null)
    k_rho = stabilizer_density(to_density(psi), args.tol_null)
    at = algebra_type(k_rho)
    rep = classify(psi, tol=args.tol_null, confirm=False)
    payload = {
        "state": spec,
        "n": psi.n,
        "stab_dim": k.dim,
        "proj_dims": list(k.proj_dims),
        "density_stab_dim": k_rho.dim,
        "algebra_type": at.kind,
        "singular_gap": None if not np.isfinite(k.gap) else float(k.gap),
        "product_structure": rep.to_dict()["product_structure"],
    }
    _emit(args, payload)
    return EXIT_OK


def cmd_classify(args) -> int:
    (spec, psi), = _states(args, 1)
    rep = classify(psi, tol=args.tol_null, restarts=args.restarts, seed=args.seed)
    payload = {"state": spec, **rep.to_dict()}
    _emit(args, payload)
    return EXIT_OK


def cmd_orbit(args) -> int:
    (spec, psi), = _states(args, 1)
    if args.samples < 1:
        raise StateFormatError(f"--samples must be at least 1, got {args.samples}")
    base_k = stabilizer_pure(psi, args.tol_null)
    base_fp = invariant_fingerprint(psi)

    def sample(i: int):
        rng = np.random.default_rng(np.random.SeedSequence(args.seed, spawn_key=(7, i)))
        moved = apply_local_unitary(haar_random_local_unitary(psi.n, rng), psi)
        k = stabilizer_pure(moved, args.tol_null)
        drift = fingerprint_drift(base_fp, invariant_fingerprint(moved))
        return {
            "sample": i,
            "stab_dim": k.dim,
            "proj_dims": list(k.proj_dims),
            "drift": float(drift),
        }

    with ThreadPoolExecutor(max_workers=4) as pool:
        rows = list(pool.map(sample, range(args.samples)))
    max_drift = max(row["drift"] for row in rows)
    consistent = all(
        row["stab_dim"] == base_k.dim and tuple(row["proj_dims"]) == base_k.proj_dims
        for row in rows
    ) and max_drift < FINGERPRINT_TOL
    payload = {
        "state": spec,
        "n": psi.n,
        "base": {"stab_dim": base_k.dim, "proj_dims": list(base_k.proj_dims)},
        "samples": args.samples,
        "rows": rows,
        "max_drift": max_drift,
        "consistent": consistent,
    }
    _emit(args, payload)
    return EXIT_OK if consistent else EXIT_FAIL


def cmd_equiv(args) -> int:
    (spec_a, psi), (spec_b, phi) = _states(args, 2)
    verdict = decide_equivalence(
        psi,
        phi,
        tol=args.tol_equiv,
        restarts=args.restarts,
        seed=args.seed,
        null_tol=args.tol_null,
    )
    payload = {"state_a": spec_a, "state_b": spec_b, **verdict.to_dict()}
    _emit(args, payload)
    if verdict.status == "equivalent":
        return EXIT_OK
    if verdict.status == "inequivalent":
        return EXIT_FAIL
    return EXIT_UNKNOWN


def cmd_invariants(args) -> int:
    (spec, psi), = _states(args, 1)
    payload = {"state": spec, **invariant_fingerprint(psi).to_dict()}
    _emit(args, payload)
    return EXIT_OK


def cmd_selftest(args) -> int:
    if args.format == "json":
        report = run_selftest(args.seed)
        payload = {
            "passed": report.passed,
            "elapsed": report.elapsed,
            "criteria": [
                {
                    "index": r.index,
                    "name": r.name,
                    "passed": r.passed,
                    "checks": r.checks,
                    "elapsed": r.elapsed,
                    "failures": list(r.failures),
                }
                for r in report.results
            ],
        }
        print(json.dumps(payload, indent=2))
    else:
        report = run_selftest(args.seed, stream=sys.stdout)
    return EXIT_OK if report.passed else EXIT_FAIL


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=0, help="master random seed")
    common.add_argument(
        "--tol-null", type=float, default=NULL_TOL, dest="tol_null",
        help="singular-value cutoff for stabilizer ranks",
    )
    common.add_argument(
        "--tol-equiv", type=float, default=EQUIV_TOL, dest="tol_equiv",
        help="infidelity below which states count as equivalent",
    )
    common.add_argument("--restarts", type=int, default=20, help="optimizer restarts")
    common.add_argument("--samples", type=int, default=20, help="orbit sample count")
    common.add_argument("--format", choices=("json", "text"), default="text")
    common.add_argument(
        "--state", action="append", metavar="SPEC",
        help="named state (ghz:4:0.8, w:3, canon4:0.5:-0.25:0.25, singlets, "
        "haar:3, basis:0101) or file path; repeatable",
    )
    common.add_argument("paths", nargs="*", help="state file paths")

    parser = argparse.ArgumentParser(
        prog="stabscope",
        description="Stabilizer Lie algebras, local-unitary invariants, and "
        "canonical forms for n-qubit pure states.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name, func, help_text in (
        ("analyze", cmd_analyze, "stabilizer dimensions and algebra type of one state"),
        ("classify", cmd_classify, "run the maximal-stabilizer classification"),
        ("orbit", cmd_orbit, "sample the local-unitary orbit and check invariance"),
        ("equiv", cmd_equiv, "decide local-unitary equivalence of two states"),
        ("invariants", cmd_invariants, "print the invariant fingerprint"),
        ("selftest", cmd_selftest, "run the full acceptance suite"),
    ):
        sp = sub.add_parser(name, parents=[common], help=help_text)
        sp.set_defaults(func=func)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.tol_null <= 0 or args.tol_equiv <= 0:
        print("error: tolerances must be positive", file=sys.stderr)
        return EXIT_PARSE
    try:
        return args.func(args)
    except GuardError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_GUARD
    except StateFormatError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE


if __name__ == "__main__":
    sys.exit(main())
