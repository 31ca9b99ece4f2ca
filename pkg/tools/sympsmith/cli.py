"""Command-line front end for symplectic Smith normal forms.

Exit codes: 0 success, 1 semantic failure (failed verification, different
double cosets, internal error), 2 input error (unreadable file, bad shape,
bad argument), 3 domain error (not symplectic, not in Mp(n, Z)).
"""

import argparse
import json
import math
import sys
import time

import numpy as np
from tqdm import tqdm

from .errors import (
    InternalError,
    InvalidArgumentError,
    InvalidDimensionError,
    NotInMpError,
    NotSymplecticError,
    SympSmithError,
)
from .exactcore import is_integral, to_int_matrix
from .localdata import local_report, reconstruct_global, require_prime
from .matrixfile import DecompositionReport, format_matrix, matrix_to_json, read_decomposition, read_matrix
from .snf import minor_gcd_divisors, smith_normal_form
from .sympgen import DEFAULT_DMAX, DEFAULT_WORD_LENGTH, random_divisor_chain, random_sp
from .sympsnf import (
    DenominatorScale,
    double_coset_invariant,
    elementary_divisor_oracle,
    inverse_of,
    plant,
    symp_smith,
    symp_smith_integral,
    verify_decomposition,
    verify_integral_decomposition,
)

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_INPUT = 2
EXIT_DOMAIN = 3

DEFAULT_SUITE_INSTANCES = 50


def _note(args, message):
    if not args.quiet:
        print(message, file=sys.stderr)


def _emit(args, text):
    out = getattr(args, "out", None)
    if out:
        with open(out, "w", encoding="utf-8") as f:
            f.write(text)
        _note(args, f"Wrote {out}")
    else:
        sys.stdout.write(text)


def _load(args, path):
    _note(args, f"Loading matrix from {path}")
    g, _ = read_matrix(path)
    return g


def _load_integral(args, path):
    g = _load(args, path)
    if not is_integral(g):
        raise InvalidArgumentError(f"{path} has rational entries; an integer matrix is required")
    return to_int_matrix(g)


def _join(values):
    return " ".join(str(x) for x in values)


def _parse_primes(text):
    try:
        return [int(p) for p in text.split(",") if p.strip()]
    except ValueError:
        raise InvalidArgumentError(f"invalid prime list {text!r}") from None


def _require_seed(seed):
    if seed < 0:
        raise InvalidArgumentError(f"seed must be nonnegative, got {seed}")


def cmd_decompose(args):
    g = _load(args, args.path)
    start = time.perf_counter()
    dec = symp_smith(g)
    _note(args, f"Decomposed {g.shape[0]}x{g.shape[1]} matrix in {time.perf_counter() - start:.2f}s")
    locals_ = local_report(dec.d) if args.locals else None
    report = DecompositionReport(g, dec, locals=locals_, words=args.words)
    if not report.verification.ok:
        for line in report.verification.lines():
            print(line, file=sys.stderr)
        print("Error: decomposition failed verification; nothing written", file=sys.stderr)
        return EXIT_FAILURE
    _emit(args, report.to_json() if args.format == "json" else report.to_text())
    return EXIT_OK


def cmd_snf(args):
    g = _load_integral(args, args.path)
    if min(g.shape) > 8:
        _note(args, f"WARNING: the minor-gcd check enumerates every k x k minor of a {g.shape[0]}x{g.shape[1]} matrix")
    dec = smith_normal_form(g)
    oracle = []
    for k in range(1, len(dec.divisors) + 1):
        product = math.prod(dec.divisors[:k])
        oracle.append({"k": k, "minor_gcd": minor_gcd_divisors(g, k), "product": product})
    oracle_ok = all(o["minor_gcd"] == o["product"] for o in oracle)
    if args.format == "json":
        text = json.dumps(
            {
                "divisors": list(dec.divisors),
                "u": matrix_to_json(dec.u),
                "v": matrix_to_json(dec.v),
                "oracle": {"ok": oracle_ok, "minors": oracle},
            },
            indent=2,
        ) + "\n"
    else:
        lines = [
            "divisors: " + _join(dec.divisors),
            "u:",
            format_matrix(dec.u).rstrip("\n"),
            "v:",
            format_matrix(dec.v).rstrip("\n"),
        ]
        lines += [f"  k={o['k']}: minor gcd {o['minor_gcd']}, product {o['product']}" for o in oracle]
        lines.append(f"minor-gcd oracle: {'PASS' if oracle_ok else 'FAIL'}")
        text = "\n".join(lines) + "\n"
    _emit(args, text)
    return EXIT_OK if oracle_ok else EXIT_FAILURE


def cmd_verify(args):
    g = _load(args, args.g_path)
    _note(args, f"Loading decomposition from {args.dec_path}")
    dec = read_decomposition(args.dec_path)
    rows, cols = g.shape
    if rows != cols or rows != 2 * dec.n:
        raise InvalidDimensionError(f"matrix is {rows}x{cols} but the decomposition has n={dec.n}")
    report = verify_decomposition(g, dec)
    if args.format == "json":
        _emit(args, json.dumps({"ok": report.ok, "checks": report.to_dict()}, indent=2) + "\n")
    else:
        _emit(args, "\n".join(report.lines() + ["OK" if report.ok else "FAILED"]) + "\n")
    return EXIT_OK if report.ok else EXIT_FAILURE


def cmd_local(args):
    primes = None if args.support else _parse_primes(args.primes)
    if primes is not None:
        primes = [require_prime(p) for p in primes]
    g = _load(args, args.path)
    d = double_coset_invariant(g)
    report = local_report(d, primes)
    if args.format == "json":
        _emit(args, json.dumps({"d": list(d), "locals": [r.to_dict() for r in report]}, indent=2) + "\n")
    else:
        _emit(args, "".join(r.line() + "\n" for r in report))
    return EXIT_OK


def cmd_gen(args):
    _require_seed(args.seed)
    n, length = args.n, args.length
    if n < 1:
        raise InvalidArgumentError(f"dimension n must be at least 1, got {n}")
    if args.kind == "spz":
        g = random_sp(n, length, args.seed).matrix
        comments = [f"Sp({n}, Z) word of length {length}, seed {args.seed}"]
    else:
        sigma = random_sp(n, length, [args.seed, 1]).matrix
        sigma_prime = random_sp(n, length, [args.seed, 2]).matrix
        d = random_divisor_chain(n, args.dmax, np.random.default_rng([args.seed, 3]))
        g = plant(sigma, d, sigma_prime)
        comments = [f"planted d: {_join(d)}"]
    _emit(args, format_matrix(g, comments))
    return EXIT_OK


def cmd_coset_eq(args):
    g = _load(args, args.path1)
    h = _load(args, args.path2)
    if g.shape != h.shape:
        raise InvalidDimensionError(f"shapes differ: {g.shape[0]}x{g.shape[1]} and {h.shape[0]}x{h.shape[1]}")
    d_g = double_coset_invariant(g)
    d_h = double_coset_invariant(h)
    same = d_g == d_h
    if args.format == "json":
        _emit(args, json.dumps({"d1": list(d_g), "d2": list(d_h), "same": same}, indent=2) + "\n")
    else:
        _emit(args, f"d1: {_join(d_g)}\nd2: {_join(d_h)}\nsame double coset: {'yes' if same else 'no'}\n")
    return EXIT_OK if same else EXIT_FAILURE


def cmd_mp(args):
    g = _load_integral(args, args.path)
    dec = symp_smith_integral(g)
    report = verify_integral_decomposition(g, dec)
    if args.format == "json":
        text = json.dumps(
            {
                "n": dec.n,
                "a": list(dec.a),
                "lambda_sq": dec.lambda_sq,
                "sigma": matrix_to_json(dec.sigma.matrix),
                "sigma_prime": matrix_to_json(dec.sigma_prime.matrix),
                "verification": report.to_dict(),
                "ok": report.ok,
            },
            indent=2,
        ) + "\n"
    else:
        lines = [
            "a: " + _join(dec.a),
            f"lambda^2: {dec.lambda_sq}",
            "sigma:",
            format_matrix(dec.sigma.matrix).rstrip("\n"),
            "sigma_prime:",
            format_matrix(dec.sigma_prime.matrix).rstrip("\n"),
            "verification:",
        ]
        lines += ["  " + line for line in report.lines()]
        text = "\n".join(lines) + "\n"
    _emit(args, text)
    return EXIT_OK if report.ok else EXIT_FAILURE


SUITE_CHECKS = ("reconstruction", "planted d", "snf oracle", "lambda^2", "canonicality", "local-global")


def suite_instance(n, seed, index, length, dmax):
    """Run every suite check on one planted instance.

    Returns:
        dict: check name -> bool
    """
    key = [seed, n, index]
    sigma = random_sp(n, length, key + [1]).matrix
    sigma_prime = random_sp(n, length, key + [2]).matrix
    d = random_divisor_chain(n, dmax, np.random.default_rng(key + [3]))
    g = plant(sigma, d, sigma_prime)
    dec = symp_smith(g)
    scaled = DenominatorScale.of(g).scale(g)
    left = random_sp(n, length, key + [4]).matrix
    right = random_sp(n, length, key + [5]).matrix
    locals_ = local_report(dec.d)
    return {
        "reconstruction": verify_decomposition(g, dec).ok,
        "planted d": dec.d == d,
        "snf oracle": elementary_divisor_oracle(g, dec)[0],
        "lambda^2": verify_integral_decomposition(scaled, symp_smith_integral(scaled)).ok,
        "canonicality": double_coset_invariant(left @ g @ right) == d and double_coset_invariant(inverse_of(g)) == d,
        "local-global": reconstruct_global(locals_, n) == dec.d,
    }


def cmd_suite(args):
    _require_seed(args.seed)
    jobs = [(n, i) for n in args.dims for i in range(args.instances)]
    passed = {n: dict.fromkeys(SUITE_CHECKS, 0) for n in args.dims}
    failures = []
    start = time.perf_counter()
    for n, i in tqdm(jobs, desc="suite", disable=args.quiet, file=sys.stderr):
        try:
            results = suite_instance(n, args.seed, i, args.length, args.dmax)
        except SympSmithError as e:
            results = dict.fromkeys(SUITE_CHECKS, False)
            failures.append({"n": n, "instance": i, "check": "exception", "detail": str(e)})
        for name, ok in results.items():
            if ok:
                passed[n][name] += 1
            elif not any(f["n"] == n and f["instance"] == i for f in failures):
                failures.append({"n": n, "instance": i, "check": name, "detail": ""})
    _note(args, f"Ran {len(jobs)} instances in {time.perf_counter() - start:.2f}s")
    if args.format == "json":
        text = json.dumps(
            {
                "instances": args.instances,
                "seed": args.seed,
                "passed": {str(n): counts for n, counts in passed.items()},
                "failures": failures,
                "ok": not failures,
            },
            indent=2,
        ) + "\n"
    else:
        width = max(len(c) for c in SUITE_CHECKS) + 2
        lines = ["n".ljust(4) + "".join(c.ljust(width) for c in SUITE_CHECKS)]
        for n, counts in passed.items():
            lines.append(str(n).ljust(4) + "".join(f"{counts[c]}/{args.instances}".ljust(width) for c in SUITE_CHECKS))
        for f in failures:
            lines.append(f"FAIL n={f['n']} instance={f['instance']} {f['check']} {f['detail']}".rstrip())
        lines.append("OK" if not failures else "FAILED")
        text = "\n".join(lines) + "\n"
    _emit(args, text)
    return EXIT_OK if not failures else EXIT_FAILURE


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    fmt = common.add_mutually_exclusive_group()
    fmt.add_argument("--json", dest="format", action="store_const", const="json", default="text",
                     help="Machine-readable JSON output")
    fmt.add_argument("--text", dest="format", action="store_const", const="text", default="text",
                     help="Plain text output (default)")
    common.add_argument("--quiet", "-q", action="store_true",
                        help="Suppress diagnostics and progress bars on stderr")

    parser = argparse.ArgumentParser(
        prog="sympsmith",
        description="Exact symplectic Smith normal forms of rational symplectic matrices")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("decompose", parents=[common],
                       help="Decompose g in Sp(n, Q) as sigma . diag(d, 1/d) . sigma'")
    p.add_argument("path", help="Matrix file")
    p.add_argument("--locals", action="store_true", help="Include Cartan exponents at the support primes")
    p.add_argument("--words", action="store_true", help="Include the generator words of the witnesses")
    p.add_argument("--out", help="Write the report to this file instead of stdout")
    p.set_defaults(func=cmd_decompose)

    p = sub.add_parser("snf", parents=[common], help="Ordinary Smith normal form of an integer matrix")
    p.add_argument("path", help="Matrix file")
    p.set_defaults(func=cmd_snf)

    p = sub.add_parser("verify", parents=[common], help="Check a decomposition against its matrix")
    p.add_argument("g_path", help="Matrix file")
    p.add_argument("dec_path", help="Decomposition JSON written by decompose --json")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("local", parents=[common], help="Per-prime Cartan exponents")
    p.add_argument("path", help="Matrix file")
    which = p.add_mutually_exclusive_group(required=True)
    which.add_argument("--primes", help="Comma-separated primes, e.g. 2,3,5")
    which.add_argument("--support", action="store_true", help="Use the primes dividing d_n")
    p.set_defaults(func=cmd_local)

    p = sub.add_parser("gen", parents=[common], help="Generate a seeded random test matrix")
    p.add_argument("n", type=int, help="Half dimension")
    p.add_argument("--kind", choices=["spz", "spq"], default="spz",
                   help="spz: random word in Sp(n, Z); spq: sigma . diag(d, 1/d) . sigma' with a planted d")
    p.add_argument("--seed", type=int, default=0, help="Random seed")
    p.add_argument("--length", type=int, default=DEFAULT_WORD_LENGTH, help="Generator word length")
    p.add_argument("--dmax", type=int, default=DEFAULT_DMAX, help="Bound on the planted d entries")
    p.add_argument("--out", help="Write the matrix to this file instead of stdout")
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("coset-eq", parents=[common], help="Decide whether two matrices share a double coset")
    p.add_argument("path1", help="First matrix file")
    p.add_argument("path2", help="Second matrix file")
    p.set_defaults(func=cmd_coset_eq)

    p = sub.add_parser("mp", parents=[common], help="Integral normal form of g in Mp(n, Z)")
    p.add_argument("path", help="Matrix file")
    p.set_defaults(func=cmd_mp)

    p = sub.add_parser("suite", parents=[common], help="Seeded self-check over planted instances")
    p.add_argument("--dims", type=int, nargs="+", default=[1, 2, 3, 4], help="Half dimensions to test")
    p.add_argument("--instances", type=int, default=DEFAULT_SUITE_INSTANCES, help="Instances per dimension")
    p.add_argument("--seed", type=int, default=0, help="Base random seed")
    p.add_argument("--length", type=int, default=DEFAULT_WORD_LENGTH, help="Generator word length")
    p.add_argument("--dmax", type=int, default=DEFAULT_DMAX, help="Bound on the planted d entries")
    p.set_defaults(func=cmd_suite)
    return parser


def main(argv=None):
    """Run one subcommand and return its exit code."""
    if hasattr(sys, "set_int_max_str_digits"):
        # exact entries may run past the default 4300-digit conversion limit
        sys.set_int_max_str_digits(0)
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (NotSymplecticError, NotInMpError) as e:
        print(f"Error: {e}", file=sys.stderr)
        return EXIT_DOMAIN
    except InternalError as e:
        print(f"Error: internal error: {e}", file=sys.stderr)
        return EXIT_FAILURE
    except (SympSmithError, OSError) as e:
        print(f"Error: {e}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
