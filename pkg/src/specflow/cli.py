"""``specflow`` command line: sfl, spectrum, gap and verify.

Exit codes: 0 success, 1 numerical failure (the library error message is
printed verbatim), 2 disagreement between methods, 64 usage or parse error.
Reports are JSON with sorted keys and 17-digit floats, so identical inputs
give byte-identical output.
"""

import argparse
import json
import math
import os
import sys
from pathlib import Path

import numpy as np

from . import crossings as cx
from . import engine, gallery, hermitian as hm, io, verify
from .errors import DescriptorError, IrregularCrossingError, SpecflowError

EXIT_OK = 0
EXIT_NUMERICAL = 1
EXIT_DISAGREEMENT = 2
EXIT_USAGE = 64

METHODS = ("partition", "tracking", "crossing", "morse")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _load_json(text_or_path, what):
    candidate = Path(text_or_path)
    text = text_or_path
    if not text_or_path.lstrip().startswith(("{", "[")) and candidate.is_file():
        text = candidate.read_text()
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise UsageError(f"{what} is neither a readable file nor valid JSON: {exc}") from None


def _coerce(value):
    for cast in (int, float):
        try:
            return cast(value)
        except ValueError:
            pass
    try:
        return json.loads(value)
    except json.JSONDecodeError:
        return value


def _descriptor(args):
    sources = [x for x in (args.family, args.descriptor, args.spectrum_csv) if x is not None]
    if len(sources) != 1:
        raise UsageError("give exactly one of --family, --descriptor or --spectrum-csv")
    if args.descriptor is not None:
        desc = _load_json(args.descriptor, "--descriptor")
    elif args.spectrum_csv is not None:
        try:
            text = Path(args.spectrum_csv).read_text()
        except OSError as exc:
            raise UsageError(f"cannot read {args.spectrum_csv}: {exc}") from None
        desc = io.spectrum_csv_to_descriptor(text)
    else:
        params = {}
        for item in args.param:
            key, sep, value = item.partition("=")
            if not sep or not key:
                raise UsageError(f"--param expects KEY=VALUE, got {item!r}")
            params[key] = _coerce(value)
        desc = {"family": args.family, "params": params}
    if isinstance(desc, dict) and "samples" not in desc:
        if args.t0 is not None:
            desc["t0"] = args.t0
        if args.t1 is not None:
            desc["t1"] = args.t1
    return desc


def _build_path(args):
    desc = _descriptor(args)
    try:
        return desc, gallery.path_from_descriptor(desc)
    except (ValueError, TypeError) as exc:
        raise DescriptorError(str(exc)) from None


def _seed(args):
    if args.seed is not None:
        return args.seed
    env = os.environ.get("SPECFLOW_SEED")
    if env is None or env == "":
        return None
    try:
        return int(env)
    except ValueError:
        raise UsageError(f"SPECFLOW_SEED must be an integer, got {env!r}") from None


def _plain(obj):
    """Convert results into JSON-ready builtins; non-finite floats become null."""
    if isinstance(obj, dict):
        return {str(k): _plain(v) for k, v in obj.items()}
    if hasattr(obj, "to_json"):
        return _plain(obj.to_json())
    if hasattr(obj, "_asdict"):
        return _plain(obj._asdict())
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _plain(obj.tolist())
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        return float(obj) if math.isfinite(obj) else None
    return obj


def _endpoints_invertible(path, eps0):
    for t in (path.t0, path.t1):
        w = path.eigenvalues(t)
        if np.any(np.abs(w) <= engine.zero_tolerance(w, eps0)):
            return False
    return True


def _run_crossing(path, args, notices):
    opts = cx.CrossingOptions(
        samples=max(args.samples, 2), kernel_rtol=args.kernel_tol, form_rtol=args.form_tol
    )
    try:
        return cx.sfl_crossings(path, opts)
    except IrregularCrossingError as exc:
        if not _endpoints_invertible(path, args.eps0):
            raise
        delta, shifted = cx.regularize(path, opts=opts, eps0=args.eps0)
        notices.append(f"crossing: {exc}; regularized with shift {delta:.17g}")
        res = cx.sfl_crossings(shifted, opts)
        return engine.SflResult(res.value, res.method, res.certificate, {**res.diagnostics, "shift": delta})


def cmd_sfl(args):
    desc, path = _build_path(args)
    opts = engine.SflOptions(eps0=args.eps0, samples=args.samples, seed=_seed(args))
    methods = METHODS if args.method == "all" else (args.method,)
    notices = []
    results = {}
    for m in methods:
        if m == "morse" and args.method == "all" and not _endpoints_invertible(path, args.eps0):
            notices.append("morse: skipped because an endpoint operator is not invertible")
            continue
        if m == "partition":
            results[m] = engine.sfl_partition(path, opts)
        elif m == "tracking":
            results[m] = engine.sfl_tracking(path, opts)
        elif m == "crossing":
            results[m] = _run_crossing(path, args, notices)
        else:
            results[m] = engine.sfl_morse_oracle(path, opts)
    values = {m: r.value for m, r in results.items()}
    agreement = len(set(values.values())) == 1
    report = {
        "command": "sfl",
        "path": desc,
        "values": values,
        "value": next(iter(values.values())) if agreement else None,
        "agreement": agreement,
        "certificates": {m: r.certificate for m, r in results.items()},
        "diagnostics": {m: r.diagnostics for m, r in results.items()},
        "notices": notices,
        "seed": opts.seed,
    }
    _emit(io.dumps(_plain(report)) + "\n", args.output)
    return EXIT_OK if agreement else EXIT_DISAGREEMENT


def cmd_spectrum(args):
    _, path = _build_path(args)
    if args.samples < 2:
        raise UsageError("spectrum needs --samples >= 2")
    ts = np.linspace(path.t0, path.t1, args.samples)
    eigs = np.array([np.sort(path.eigenvalues(t)) for t in ts])
    _emit(io.spectrum_csv(ts, eigs), args.output)
    return EXIT_OK


def _operator(text):
    """Matrix literal (inline or file), or a comma-separated real diagonal."""
    stripped = text.strip()
    try:
        if stripped.startswith("{") or Path(text).is_file():
            return io.hermitian_from_json(_load_json(text, "operator"))
        return hm.HermitianOperator.diag([float(x) for x in stripped.split(",")])
    except ValueError as exc:
        raise UsageError(f"cannot parse operator {text!r}: {exc}") from None


def cmd_gap(args):
    a, b = _operator(args.a), _operator(args.b)
    d_g = hm.gap_distance(a, b)
    delta = hm.delta_distance(a, b)
    report = {
        "command": "gap",
        "norm_distance": hm.norm_distance(a, b),
        "gap_distance": d_g,
        "delta": delta,
        "riesz_distance": hm.riesz_distance(a, b),
        "gap_equals_twice_delta": abs(d_g - 2 * delta) <= 1e-12 * max(d_g, 1e-300) or d_g == 2 * delta,
    }
    _emit(io.dumps(_plain(report)) + "\n", args.output)
    return EXIT_OK


def cmd_verify(args):
    seed = _seed(args)
    try:
        report = verify.run_suite(seed=0 if seed is None else seed, groups=args.group, inject=args.inject_fault)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    failed = [f"{g}.{c}" for g, checks in report["groups"].items() for c, r in checks.items() if not r["passed"]]
    report["failed"] = failed
    _emit(io.dumps(_plain(report)) + "\n", args.output)
    return EXIT_OK if report["passed"] else EXIT_NUMERICAL


def _emit(text, destination):
    if destination in (None, "-"):
        sys.stdout.write(text)
    else:
        Path(destination).write_text(text)


def _path_options(p):
    src = p.add_argument_group("path")
    src.add_argument("--family", choices=gallery.FAMILIES)
    src.add_argument("--param", action="append", default=[], metavar="KEY=VALUE", help="family parameter (repeatable)")
    src.add_argument("--descriptor", help="path descriptor JSON, inline or as a file path")
    src.add_argument("--spectrum-csv", help="spectrum CSV to reinterpret as a diagonal sampled path")
    src.add_argument("--t0", type=float)
    src.add_argument("--t1", type=float)
    p.add_argument("--samples", type=int, default=None)
    p.add_argument("--seed", type=int, default=None, help="defaults to $SPECFLOW_SEED")
    p.add_argument("--output", "-o", default=None, help="destination file (default stdout)")


def build_parser():
    parser = _Parser(prog="specflow", description="Spectral flow of paths of Hermitian matrices.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("sfl", help="spectral flow of a path")
    _path_options(p)
    p.add_argument("--method", choices=METHODS + ("all",), default="partition")
    p.add_argument("--eps0", type=float, default=engine.SflOptions.eps0, help="relative zero tolerance")
    p.add_argument("--kernel-tol", type=float, default=cx.KERNEL_RTOL, help="relative kernel threshold")
    p.add_argument("--form-tol", type=float, default=cx.FORM_RTOL, help="relative crossing-form null threshold")
    p.set_defaults(func=cmd_sfl, default_samples=engine.SflOptions.samples)

    p = sub.add_parser("spectrum", help="eigenvalue traces as CSV")
    _path_options(p)
    p.set_defaults(func=cmd_spectrum, default_samples=101)

    p = sub.add_parser("gap", help="distances between two operators")
    p.add_argument("--a", required=True, help="matrix literal JSON (inline or file) or comma-separated diagonal")
    p.add_argument("--b", required=True)
    p.add_argument("--output", "-o", default=None)
    p.set_defaults(func=cmd_gap)

    p = sub.add_parser("verify", help="run the invariant suite")
    p.add_argument("--group", action="append", choices=verify.GROUPS, help="restrict to a group (repeatable)")
    p.add_argument("--inject-fault", choices=verify.FAULTS, help="negative control")
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--output", "-o", default=None)
    p.set_defaults(func=cmd_verify)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    if hasattr(args, "default_samples") and args.samples is None:
        args.samples = args.default_samples
    try:
        return args.func(args)
    except (UsageError, DescriptorError) as exc:
        print(f"specflow: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except SpecflowError as exc:
        print(f"specflow: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
