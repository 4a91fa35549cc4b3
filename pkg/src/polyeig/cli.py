"""Command-line front end.

Subcommands: ``generate`` (problem instances to disk), ``solve`` (run the
iteration and stream the trace), ``predict`` (theoretical rate constants),
``verify`` (inertia counting / bisection oracle) and ``compare`` (two
traces side by side).

Exit codes: 0 success/converged, 2 max-iterations, 3 solver failure,
64 usage errors.  The environment variable ``POLYEIG_SEED`` supplies the
default seed.
"""

import argparse
import os
import sys

import numpy as np

from . import io as pio
from . import rate, verify
from .exceptions import PolyeigError
from .precond import Preconditioner, coefficient_preconditioner
from .problems import definite_pencil, prescribed_hyperbolic, symmetric_spectrum, wiresaw1
from .solver import CONVERGED, LUCKY_BREAKDOWN, MAX_ITERS, SolverConfig, solve

EXIT_OK = 0
EXIT_MAX_ITERS = 2
EXIT_FAILURE = 3
EXIT_USAGE = 64


class _Parser(argparse.ArgumentParser):
    """argparse with exit code 64 on usage errors."""

    def error(self, message):
        self.print_usage(sys.stderr)
        sys.stderr.write(f"{self.prog}: error: {message}\n")
        sys.exit(EXIT_USAGE)


def _default_seed():
    return int(os.environ.get("POLYEIG_SEED", "0"))


def _parse_spectrum(text, n, kind):
    """Spectrum syntax: 'pmA..B' for symmetric +-A..+-B hyperbolic spectra,
    'A..B' for an integer range, or a comma list of values."""
    if kind == "hyperbolic":
        if text.startswith("pm"):
            lo_hi = text[2:].split("..")
            if len(lo_hi) != 2:
                raise ValueError(f"bad spectrum {text!r}; expected pmA..B")
            lo, hi = int(lo_hi[0]), int(lo_hi[1])
            if hi - lo + 1 != n:
                raise ValueError(
                    f"spectrum pm{lo}..{hi} needs n = {hi - lo + 1}, got n = {n}"
                )
            pos = np.arange(float(lo), float(hi) + 1.0)
            return pos, -pos[::-1]
        raise ValueError(f"hyperbolic spectra use the pmA..B form, got {text!r}")
    if ".." in text:
        lo, hi = text.split("..")
        return np.arange(float(int(lo)), float(int(hi)) + 1.0), None
    return np.array([float(t) for t in text.split(",")]), None


def _build_parser():
    parser = _Parser(prog="polyeig", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p_gen = sub.add_parser("generate", help="write a problem instance to a directory")
    p_gen.add_argument("--problem", required=True,
                       choices=["wiresaw1", "hyperbolic", "pencil"])
    p_gen.add_argument("--n", type=int, required=True)
    p_gen.add_argument("--nu", type=float, default=0.1,
                       help="wire speed parameter (wiresaw1)")
    p_gen.add_argument("--spectrum", default=None,
                       help="pmA..B (hyperbolic) or A..B / comma list (pencil)")
    p_gen.add_argument("--seed", type=int, default=None)
    p_gen.add_argument("--out", required=True)

    p_solve = sub.add_parser("solve", help="run the iteration on a stored problem")
    p_solve.add_argument("--in", dest="indir", required=True)
    p_solve.add_argument("--variant", choices=["locg", "sd"], default="locg")
    p_solve.add_argument("--me", type=int, default=1)
    p_solve.add_argument("--precond", choices=["identity", "inv-c", "inv-c-cg"],
                         default="inv-c")
    p_solve.add_argument("--cg-tol", type=float, default=0.1)
    p_solve.add_argument("--cg-maxit", type=int, default=10)
    p_solve.add_argument("--tol", type=float, default=1e-10)
    p_solve.add_argument("--max-iters", type=int, default=500)
    p_solve.add_argument("--seed", type=int, default=None)
    p_solve.add_argument("--trace", default=None)
    p_solve.add_argument("--lambda1", default=None,
                         help="'auto' (bisection oracle), 'final' (treat the final "
                              "value as exact), or a number; fills the abs_err column")
    p_solve.add_argument("--diagnostics", choices=["off", "cheap", "full"],
                         default="cheap")

    p_pred = sub.add_parser("predict", help="theoretical rate constants")
    p_pred.add_argument("--in", dest="indir", required=True)
    p_pred.add_argument("--me", type=int, default=1)
    p_pred.add_argument("--lambda1", default="auto")
    p_pred.add_argument("--csv", default=None)

    p_ver = sub.add_parser("verify", help="inertia counting and bisection oracle")
    p_ver.add_argument("--in", dest="indir", required=True)
    p_ver.add_argument("--mu", type=float, default=None)
    p_ver.add_argument("--bisect", action="store_true")
    p_ver.add_argument("--tol", type=float, default=1e-10)

    p_cmp = sub.add_parser("compare", help="per-iteration comparison of two traces")
    p_cmp.add_argument("--trace", action="append", required=True,
                       help="give twice: --trace A --trace B")
    return parser


def _make_preconditioner(F, args):
    if args.precond == "identity":
        return Preconditioner.identity(F.n)
    if args.precond == "inv-c":
        return coefficient_preconditioner(F)
    return coefficient_preconditioner(
        F, inexact=True, rel_tol=args.cg_tol, max_steps=args.cg_maxit
    )


def _resolve_lambda1(text, bundle, tol=1e-11):
    if text is None or text == "final":
        return None
    if text == "auto":
        if bundle.known_lambda1 is not None:
            return bundle.known_lambda1
        return verify.bisect_lambda1(bundle.polynomial, tol=tol)
    return float(text)


def _cmd_generate(args):
    seed = args.seed if args.seed is not None else _default_seed()
    if args.problem == "wiresaw1":
        bundle = wiresaw1(args.n, args.nu)
    elif args.problem == "hyperbolic":
        if args.spectrum is None:
            pos, neg = symmetric_spectrum(args.n)
        else:
            pos, neg = _parse_spectrum(args.spectrum, args.n, "hyperbolic")
        bundle = prescribed_hyperbolic(args.n, pos, neg, seed=seed)
    else:
        if args.spectrum is None:
            eigs = np.arange(1.0, args.n // 2 + 1.0)
        else:
            eigs, _ = _parse_spectrum(args.spectrum, args.n, "pencil")
        bundle = definite_pencil(args.n, eigs, seed=seed)
    pio.save_problem(bundle, args.out)
    print(f"wrote {bundle.kind} problem (n={bundle.polynomial.n}, "
          f"degree={bundle.polynomial.degree}) to {args.out}")
    return EXIT_OK


def _cmd_solve(args):
    bundle = pio.load_problem(args.indir)
    F = bundle.polynomial
    K = _make_preconditioner(F, args)
    seed = args.seed if args.seed is not None else _default_seed()
    lambda1 = _resolve_lambda1(args.lambda1, bundle)
    config = SolverConfig(
        m_e=args.me, variant=args.variant, tol=args.tol, max_iters=args.max_iters,
        seed=seed, diagnostics_level=args.diagnostics, lambda1=lambda1,
    )
    result, trace = solve(F, K, config)
    if args.lambda1 == "final":
        for row in trace:
            row.abs_err = row.rho - result.lambda_hat
    if args.trace:
        pio.write_trace(trace, args.trace)
    final = trace[-1]
    print(f"status = {result.status}")
    print(f"lambda_hat = {result.lambda_hat:.17g}")
    print(f"iterations = {result.iterations}")
    print(f"normalized_residual = {final.normalized_residual:.3e}")
    if result.status in (CONVERGED, LUCKY_BREAKDOWN):
        return EXIT_OK
    if result.status == MAX_ITERS:
        return EXIT_MAX_ITERS
    print(f"failure reason: {result.reason}", file=sys.stderr)
    return EXIT_FAILURE


def _cmd_predict(args):
    bundle = pio.load_problem(args.indir)
    F = bundle.polynomial
    K = coefficient_preconditioner(F)
    lambda1 = _resolve_lambda1(args.lambda1, bundle)
    pred = rate.rate_prediction(F, K, args.me, lambda1)
    for key in ("gamma", "Gamma", "kappa", "Delta", "eta"):
        print(f"{key} = {getattr(pred, key):.17g}")
    print(f"eta_squared = {pred.eta**2:.17g}")
    if args.csv:
        with open(args.csv, "w") as fh:
            fh.write("gamma,Gamma,kappa,Delta,eta,eta_squared\n")
            fh.write(
                f"{pred.gamma:.17g},{pred.Gamma:.17g},{pred.kappa:.17g},"
                f"{pred.Delta:.17g},{pred.eta:.17g},{pred.eta**2:.17g}\n"
            )
    return EXIT_OK


def _cmd_verify(args):
    bundle = pio.load_problem(args.indir)
    F = bundle.polynomial
    did_something = False
    if args.mu is not None:
        from .linalg import inertia

        ine = inertia(F.eval(args.mu))
        count = verify.count_eigs_upto(F, args.mu)
        print(f"inertia = ({ine.negative}, {ine.zero}, {ine.positive})")
        print(f"count_upto({args.mu:g}) = {count}")
        did_something = True
    if args.bisect:
        lam = verify.bisect_lambda1(F, tol=args.tol)
        print(f"{lam:.10f}")
        did_something = True
    if not did_something:
        print("nothing to do: pass --mu and/or --bisect", file=sys.stderr)
        return EXIT_USAGE
    return EXIT_OK


def _cmd_compare(args):
    if len(args.trace) != 2:
        print("compare needs exactly two --trace files", file=sys.stderr)
        return EXIT_USAGE
    rows_a = pio.read_trace(args.trace[0])
    rows_b = pio.read_trace(args.trace[1])
    print(f"{'iter':>5} {'nres_A':>12} {'nres_B':>12} {'ratio B/A':>12}")
    for i in range(max(len(rows_a), len(rows_b))):
        ra = rows_a[i] if i < len(rows_a) else None
        rb = rows_b[i] if i < len(rows_b) else None
        na = f"{ra.normalized_residual:.4e}" if ra else "-"
        nb = f"{rb.normalized_residual:.4e}" if rb else "-"
        ratio = "-"
        if ra and rb and ra.normalized_residual > 0:
            ratio = f"{rb.normalized_residual / ra.normalized_residual:.4e}"
        print(f"{i:>5} {na:>12} {nb:>12} {ratio:>12}")
    for label, rows, path in (("A", rows_a, args.trace[0]),
                              ("B", rows_b, args.trace[1])):
        final = rows[-1]
        print(f"{label} ({path}): iterations = {final.iter}, "
              f"final rho = {final.rho:.12g}, "
              f"final normalized residual = {final.normalized_residual:.4e}")
    return EXIT_OK


def main(argv=None):
    parser = _build_parser()
    args = parser.parse_args(argv)
    handlers = {
        "generate": _cmd_generate,
        "solve": _cmd_solve,
        "predict": _cmd_predict,
        "verify": _cmd_verify,
        "compare": _cmd_compare,
    }
    try:
        return handlers[args.command](args)
    except PolyeigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FAILURE


if __name__ == "__main__":
    sys.exit(main())
