"""Command-line driver: ``hyptrig <command> [options]``.

Exit codes: 0 success, 1 verification failure, 2 scan contradiction (a joint
zero), 64 usage error.
"""

from __future__ import annotations

import argparse
import contextlib
import csv
import json
import math
import sys

import numpy as np

from .cocycle import coboundary_report, random_quadruples
from .errors import HyptrigError, SingularTransform, UnsupportedFunction
from .functions import CATALOG, by_name, catalog_functions
from .helgason_fourier import F_numeric_result, JOINT_ZERO_TOL, wiener_zero_scan
from .hyperbolic_core import MobiusTransform
from .ideal_transform import transform_table, write_table_csv
from .quadrature import QuadratureConfig
from .special_functions import F_closed, SpectralParameter, gamma_complex, identity_suite

EXIT_OK, EXIT_FAIL, EXIT_CONTRADICTION, EXIT_USAGE = 0, 1, 2, 64
F_TABLE_BOUND = 1e-6


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _positive(text: str) -> float:
    v = float(text)
    if not v > 0:
        raise argparse.ArgumentTypeError(f"must be > 0, got {text}")
    return v


def _complex_list(text: str) -> list[complex]:
    try:
        return [complex(t.strip().replace(" ", "")) for t in text.split(",") if t.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _float_list(text: str) -> list[float]:
    try:
        return [float(t) for t in text.split(",") if t.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


@contextlib.contextmanager
def _output(path):
    if path in (None, "-"):
        yield sys.stdout
    else:
        with open(path, "w", newline="") as fh:
            yield fh


def _g(v: float) -> str:
    return f"{v:.17g}"


# ---------------------------------------------------------------------------

def _faulty_gamma(z):
    # negative control: a z-dependent relative perturbation of size 1e-6
    return gamma_complex(z) * (1.0 + 1e-6 * np.asarray(z))


def cmd_verify_gamma(args) -> int:
    gamma = _faulty_gamma if args.inject_fault else gamma_complex
    rows = identity_suite(seed=args.seed, gamma=gamma)
    for r in rows:
        r["residual"] = float(r["residual"])
        r["pass"] = r["residual"] <= r["bound"]
    failing = [r["identity"] for r in rows if not r["pass"]]
    report = {"seed": args.seed, "passed": not failing, "results": rows}
    with _output(args.out) as fh:
        fh.write(json.dumps(report, indent=2) + "\n")
    if failing:
        print(f"verify-gamma: identity {failing[0]} exceeds its bound", file=sys.stderr)
        return EXIT_FAIL
    return EXIT_OK


F_TABLE_COLUMNS = ["re_s", "im_s", "b", "re_F_num", "im_F_num", "re_F_closed", "im_F_closed", "abs_diff", "note"]


def cmd_f_table(args) -> int:
    cfg = QuadratureConfig(tol=args.tol)
    status = EXIT_OK
    with _output(args.out) as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(F_TABLE_COLUMNS)
        for s in args.s:
            for b in args.b:
                head = [_g(s.real), _g(s.imag), _g(b)]
                try:
                    SpectralParameter(s)
                    val = F_numeric_result(s, b, cfg).value
                except HyptrigError as exc:
                    w.writerow(head + [""] * 5 + [f"{type(exc).__name__}: {exc}"])
                    continue
                row = head + [_g(val.real), _g(val.imag)]
                if b == 0.0:
                    ref = F_closed(s)
                    diff = abs(val - ref)
                    row += [_g(ref.real), _g(ref.imag), _g(diff), ""]
                    if diff > F_TABLE_BOUND * (1.0 + abs(ref)):
                        status = EXIT_FAIL
                else:
                    row += ["", "", "", ""]
                w.writerow(row)
    return status


def cmd_zero_scan(args) -> int:
    if not args.step > 0:
        raise UsageError("--step must be > 0")
    try:
        report = wiener_zero_scan((args.re_min, args.re_max), (args.im_min, args.im_max), args.step,
                                  spot_check=not args.no_spot_check,
                                  cfg=QuadratureConfig(tol=min(args.tol, 1e-10)))
    except HyptrigError as exc:
        raise UsageError(str(exc)) from None
    with _output(args.out) as fh:
        report.write_csv(fh)
    argmin = "none" if report.argmin is None else f"{_g(report.argmin.real)}{report.argmin.imag:+.17g}i"
    factor = "; ".join(f"{name} at {_g(z.real)}{z.imag:+.17g}i ({_g(m)})" for name, z, m in report.factor_zeros)
    summary = sys.stderr if args.out in (None, "-") else sys.stdout
    print(f"points={report.n_points} min_joint={_g(report.min_joint)} argmin={argmin}", file=summary)
    print(f"factor_zeros: {factor or 'none'}", file=summary)
    if report.spot_checks:
        print(f"spot_checks={len(report.spot_checks)} max_rel_diff={_g(report.spot_check_max)}", file=summary)
    print(f"note: {report.rigor_note}", file=summary)
    if report.joint_near_zeros:
        print(f"joint near-zeros found: {report.joint_near_zeros[:5]}", file=sys.stderr)
        return EXIT_CONTRADICTION
    if not report.min_joint > JOINT_ZERO_TOL:
        return EXIT_CONTRADICTION
    if report.spot_check_max > F_TABLE_BOUND:
        print("zero-scan: quadrature spot check disagrees with the closed forms", file=sys.stderr)
        return EXIT_FAIL
    return EXIT_OK


def read_isometries(path: str) -> list[MobiusTransform]:
    out = []
    try:
        fh = open(path)
    except OSError as exc:
        raise UsageError(f"{path}: {exc.strerror}") from None
    with fh:
        for n, line in enumerate(fh, 1):
            text = line.strip()
            if not text or text.startswith("#"):
                continue
            parts = text.split()
            try:
                if len(parts) != 4:
                    raise ValueError(f"expected 4 numbers, got {len(parts)}")
                out.append(MobiusTransform(*(float(p) for p in parts)))
            except (ValueError, SingularTransform) as exc:
                raise UsageError(f"{path}:{n}: malformed isometry line: {exc}") from None
    if not out:
        raise UsageError(f"{path}: no isometries")
    return out


def cmd_transform(args) -> int:
    try:
        f = by_name(args.function, args.params)
    except UnsupportedFunction as exc:
        raise UsageError(str(exc)) from None
    except (TypeError, ValueError) as exc:
        raise UsageError(f"bad parameters for {args.function}: {exc}") from None
    isos = read_isometries(args.isometries)
    rows = transform_table(f, isos, cfg=QuadratureConfig(tol=args.tol))
    with _output(args.out) as fh:
        write_table_csv(rows, fh)
    bad = [r for r in rows if r.error]
    for r in bad:
        print(f"transform: row {r.g.coefficients} failed: {r.error}", file=sys.stderr)
    return EXIT_FAIL if bad else EXIT_OK


def cmd_cocycle_check(args) -> int:
    if args.n_samples < 1:
        raise UsageError("--n-samples must be >= 1")
    cfg = QuadratureConfig(tol=args.tol)
    quads = random_quadruples(args.n_samples, args.seed)
    per = [coboundary_report(f, args.n_samples, args.seed, cfg, quads) for f in catalog_functions()]
    worst = max(r.max_defect for r in per)
    mean = math.fsum(r.mean_defect for r in per) / len(per)
    bound = 4.0 * args.tol
    report = {
        "seed": args.seed,
        "n_samples": args.n_samples,
        "max_defect": worst,
        "mean_defect": mean,
        "tol": args.tol,
        "bound": bound,
        "passed": worst <= bound,
        "functions": [r.to_dict() for r in per],
    }
    with _output(args.out) as fh:
        fh.write(json.dumps(report, indent=2) + "\n")
    if worst > bound:
        print(f"cocycle-check: max defect {_g(worst)} exceeds {_g(bound)}", file=sys.stderr)
        return EXIT_FAIL
    return EXIT_OK


def _common(seed: int = 0) -> argparse.ArgumentParser:
    # a fresh parent per command: argparse parents share their Action objects
    common = _Parser(add_help=False)
    common.add_argument("--tol", type=_positive, default=1e-8, help="absolute quadrature tolerance")
    common.add_argument("--seed", type=int, default=seed)
    common.add_argument("--out", default=None, help="output file (default stdout)")
    return common


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="hyptrig", description="Ideal triangle integrals and their verification suites.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    g = sub.add_parser("verify-gamma", parents=[_common()], help="Gamma function identity suite")
    g.add_argument("--inject-fault", action="store_true", help=argparse.SUPPRESS)
    g.set_defaults(func=cmd_verify_gamma)

    t = sub.add_parser("f-table", parents=[_common()], help="F(s, b) by quadrature against the closed form")
    t.add_argument("--s", type=_complex_list, default=_complex_list("0,0.5,1,2,-0.5,1-2j,1.5+2j"),
                   help="comma-separated complex values, e.g. '0,1,2,1.5+2j'")
    t.add_argument("--b", type=_float_list, default=[0.0, 0.5, 3.0], help="comma-separated reals")
    t.set_defaults(func=cmd_f_table)

    z = sub.add_parser("zero-scan", parents=[_common()], help="joint zero scan of the closed forms")
    z.add_argument("--re-min", type=float, default=-0.9)
    z.add_argument("--re-max", type=float, default=3.1)
    z.add_argument("--im-min", type=float, default=-12.0)
    z.add_argument("--im-max", type=float, default=12.0)
    z.add_argument("--step", type=float, default=0.05)
    z.add_argument("--no-spot-check", action="store_true", help="skip the quadrature re-verification")
    z.set_defaults(func=cmd_zero_scan)

    x = sub.add_parser("transform", parents=[_common()], help="ideal triangle transform over a list of isometries")
    x.add_argument("function", help=f"one of {', '.join(CATALOG)}")
    x.add_argument("isometries", help="file with one 'a b c d' per line; '#' starts a comment line")
    x.add_argument("--params", type=_float_list, default=[], help="comma-separated function parameters")
    x.set_defaults(func=cmd_transform)

    c = sub.add_parser("cocycle-check", parents=[_common(seed=42)], help="coboundary defect on random quadruples")
    c.add_argument("--n-samples", type=int, default=100)
    c.set_defaults(func=cmd_cocycle_check)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"hyptrig {args.command}: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
