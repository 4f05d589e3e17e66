"""Command-line interface: ``genjacobi <command> ...``.

Every command except ``contour`` writes one JSON envelope to stdout::

    {"schema_version": 1, "tool": "genjacobi", "version": ..., "command": ...,
     "input": {"n": ..., "alpha": ..., "beta": ...}, "regime": ..., "tol": ...,
     "verdict": ..., "payload": {...}}

Keys appear in that order, floats use the shortest repr that round-trips,
complex numbers are {"re": x, "im": y}, and non-finite floats are the
strings "nan", "inf", "-inf".  Wall time goes to stderr so that stdout is
byte-identical between runs.

Exit codes: 0 success, 1 verification failure or unusable input,
2 command-line parse error, 3 integer parameter, 4 divergent block,
5 root-finding cap exceeded.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
import time

import numpy as np

from . import __version__, contour
from .errors import CapExceeded, GenJacobiError, IntegerParameter
from .jacobi import jacobi_eval
from .regimes import ROOT_CAP, classify, zero_report

SCHEMA_VERSION = 1
EXIT_OK, EXIT_FAIL, EXIT_PARSE, EXIT_INTEGER, EXIT_DIVERGENT, EXIT_CAP = 0, 1, 2, 3, 4, 5
TOL_ENV = "GENJACOBI_TOL"


# ----------------------------------------------------------------- output


def _jsonable(x):
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, np.ndarray):
        return [_jsonable(v) for v in x.tolist()]
    if isinstance(x, (bool, np.bool_)):
        return bool(x)
    if isinstance(x, (int, np.integer)):
        return int(x)
    if isinstance(x, (complex, np.complexfloating)):
        return {"re": _jsonable(float(x.real)), "im": _jsonable(float(x.imag))}
    if isinstance(x, (float, np.floating)):
        x = float(x)
        if math.isnan(x):
            return "nan"
        if math.isinf(x):
            return "inf" if x > 0 else "-inf"
        return x
    if x is None or isinstance(x, str):
        return x
    return str(x)


def dumps(obj):
    """Deterministic JSON text (insertion order, repr floats)."""
    return json.dumps(_jsonable(obj), indent=2, allow_nan=False) + "\n"


def _parse_complex(text):
    try:
        return complex(text.replace(" ", "").replace("i", "j"))
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None


def _param(text):
    z = _parse_complex(text)
    return z.real if z.imag == 0 else z


def _positive_float(text):
    v = float(text)
    if not v > 0:
        raise argparse.ArgumentTypeError("must be positive")
    return v


def _positive_int(text):
    v = int(text)
    if v <= 0:
        raise argparse.ArgumentTypeError("must be positive")
    return v


def _default_tol():
    env = os.environ.get(TOL_ENV)
    if env is None:
        return contour.TOL_DEFAULT
    try:
        return _positive_float(env)
    except (ValueError, argparse.ArgumentTypeError):
        raise SystemExit(f"{TOL_ENV} must be a positive number, got {env!r}") from None


def _grid(text):
    """``a:b:N`` for a real grid, ``a:b:N,c:d:M`` for a complex rectangle."""
    parts = text.split(",")
    axes = []
    for p in parts:
        a, b, m = p.split(":")
        axes.append(np.linspace(float(a), float(b), int(m)))
    if len(axes) == 1:
        return list(axes[0].astype(complex))
    if len(axes) == 2:
        return [complex(x, y) for y in axes[1] for x in axes[0]]
    raise argparse.ArgumentTypeError("grid is a:b:N or a:b:N,c:d:M")


def _envelope(args, payload, regime=None, verdict=None):
    return {
        "schema_version": SCHEMA_VERSION,
        "tool": "genjacobi",
        "version": __version__,
        "command": args.command,
        "argv": list(args.argv),
        "input": {"n": getattr(args, "n", None), "alpha": getattr(args, "alpha", None),
                  "beta": getattr(args, "beta", None)},
        "regime": regime,
        "tol": args.tol,
        "verdict": verdict,
        "payload": payload,
    }


# --------------------------------------------------------------- commands


def cmd_eval(args, out):
    zs = list(args.z or [])
    if args.grid:
        zs += _grid(args.grid)
    if not zs:
        raise GenJacobiError("give --z or --grid")
    vals = [complex(jacobi_eval(args.n, args.alpha, args.beta, z)) for z in zs]
    if args.format == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["z_re", "z_im", "re", "im"])
        for z, v in zip(zs, vals):
            w.writerow([repr(z.real), repr(z.imag), repr(v.real), repr(v.imag)])
        out.write(buf.getvalue())
    elif args.format == "text":
        for z, v in zip(zs, vals):
            out.write(f"{z!r}\t{v!r}\n")
    else:
        rows = [{"z": z, "value": v} for z, v in zip(zs, vals)]
        out.write(dumps(_envelope(args, {"values": rows})))
    return EXIT_OK


def cmd_classify(args, out):
    rep = classify(args.n, args.alpha, args.beta)
    out.write(dumps(_envelope(args, rep.as_dict(), regime=rep.tag)))
    return EXIT_OK


def _verdict_code(verdict):
    return {"PASS": EXIT_OK, "FAIL": EXIT_FAIL, "DIVERGENT": EXIT_DIVERGENT}[verdict]


def cmd_verify(args, out):
    from . import rh, verify

    if args.which == "main":
        rep = verify.verify_main(args.n, args.alpha, args.beta, tol=args.tol, xi=args.xi)
        out.write(dumps(_envelope(args, rep.as_dict(), verdict=rep.verdict)))
        return _verdict_code(rep.verdict)
    if args.which == "regime":
        res = verify.verify_regime(args.n, args.alpha, args.beta, tol=args.tol)
        payload = res.as_dict()
        notes = [note for r in res.reports for note in r.notes]
        if notes:
            payload["divergence_notes"] = notes
        out.write(dumps(_envelope(args, payload, regime=res.tag, verdict=res.verdict)))
        if res.verdict == "DIVERGENT":
            for note in notes:
                print(f"divergent: {note}", file=sys.stderr)
        return _verdict_code(res.verdict)
    rep = rh.rh_verify(args.n, args.alpha, args.beta, probe=args.probe)
    payload = rep.as_dict()
    payload["tolerances"] = {"jump": rep.tol_jump, "det": rep.tol_det, "decay_ratio": "2 +- 10%"}
    verdict = "PASS" if rep.passed else "FAIL"
    out.write(dumps(_envelope(args, payload, verdict=verdict)))
    return _verdict_code(verdict)


def cmd_characterize(args, out):
    from . import verify

    kwargs = {"contour": "gamma"} if args.gamma else {}
    rep = verify.characterize(args.n, args.alpha, args.beta, tol=args.tol, **kwargs)
    verdict = "PASS" if rep.deviation <= args.match_tol else "FAIL"
    payload = rep.as_dict()
    payload["match_tol"] = args.match_tol
    out.write(dumps(_envelope(args, payload, regime=rep.tag, verdict=verdict)))
    return _verdict_code(verdict)


def cmd_zeros(args, out):
    rep = zero_report(args.n, args.alpha, args.beta, cap=args.cap, seed=args.seed)
    if args.csv:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["re", "im", "region"])
        for r, g in zip(rep.roots, rep.regions):
            w.writerow([repr(float(r.real)), repr(float(r.imag)), g])
        contour.write_atomic(args.csv, buf.getvalue())
    out.write(dumps(_envelope(args, rep.as_dict())))
    return EXIT_OK


def cmd_contour(args, out):
    label = args.label
    if label == "gamma":
        path = contour.build_gamma_double_loop(args.xi, args.radius)
    elif label == "gamma1":
        path = contour.build_gamma_plus1()
    elif label == "gammam1":
        path = contour.build_gamma_minus1()
    elif label == "gammainf":
        path = contour.build_gamma_inf()
    else:
        path = contour.build_interval(label)
    text = contour.polyline_csv(path, args.points, args.truncation)
    if args.csv:
        contour.write_atomic(args.csv, text)
    else:
        out.write(text)
    return EXIT_OK


# ----------------------------------------------------------------- parser


def build_parser():
    p = argparse.ArgumentParser(prog="genjacobi",
                                description="Jacobi polynomials with general parameters")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    def triple(sp):
        sp.add_argument("--n", type=int, required=True)
        sp.add_argument("--alpha", type=_param, required=True)
        sp.add_argument("--beta", type=_param, required=True)

    def common(sp):
        sp.add_argument("--tol", type=_positive_float, default=None,
                        help=f"tolerance (default 1e-10 or ${TOL_ENV})")
        sp.add_argument("--depth-cap", type=_positive_int, default=None,
                        help=f"refinement depth cap of the quadrature (default {contour.DEPTH_CAP})")

    sp = sub.add_parser("eval", help="evaluate P_n at points")
    triple(sp)
    common(sp)
    sp.add_argument("--z", type=_parse_complex, action="append")
    sp.add_argument("--grid", help="a:b:N (real) or a:b:N,c:d:M (rectangle)")
    sp.add_argument("--format", choices=("json", "csv", "text"), default="json")
    sp.set_defaults(func=cmd_eval)

    sp = sub.add_parser("classify", help="orthogonality regime")
    triple(sp)
    common(sp)
    sp.set_defaults(func=cmd_classify)

    sp = sub.add_parser("verify", help="check orthogonality numerically")
    triple(sp)
    common(sp)
    sp.add_argument("--which", choices=("main", "regime", "rh"), default="main")
    sp.add_argument("--xi", type=float, default=0.0, help="base point of the double loop")
    sp.add_argument("--probe", action="store_true",
                    help="with --which rh, also report |Y| near the self-intersections")
    sp.set_defaults(func=cmd_verify)

    sp = sub.add_parser("characterize", help="recover P_n from its conditions")
    triple(sp)
    common(sp)
    sp.add_argument("--gamma", action="store_true", help="use the double loop conditions")
    sp.add_argument("--match-tol", type=_positive_float, default=1e-7)
    sp.set_defaults(func=cmd_characterize)

    sp = sub.add_parser("zeros", help="zeros of P_n and predicted counts")
    triple(sp)
    common(sp)
    sp.add_argument("--csv", help="also write the roots to this CSV file")
    sp.add_argument("--cap", type=_positive_int, default=ROOT_CAP)
    sp.add_argument("--seed", type=int, default=0)
    sp.set_defaults(func=cmd_zeros)

    sp = sub.add_parser("contour", help="polyline of a contour as CSV")
    common(sp)
    sp.add_argument("--label", required=True,
                    choices=("gamma", "gamma1", "gammam1", "gammainf", "[-1,1]", "[1,inf)",
                             "(-inf,-1]", "interval"))
    sp.add_argument("--xi", type=float, default=0.0)
    sp.add_argument("--radius", type=float, default=0.5)
    sp.add_argument("--truncation", type=_positive_float, default=10.0)
    sp.add_argument("--points", type=_positive_int, default=128)
    sp.add_argument("--csv", help="write to this file instead of stdout")
    sp.set_defaults(func=cmd_contour)
    return p


_FLAGS = ("--probe", "--gamma", "--version", "--help")


def _attach_negative_values(argv):
    # argparse reads "-1:1:5" or "-1.3+0.5i" as an option; glue such values to their flag
    out = []
    for tok in argv:
        prev = out[-1] if out else ""
        if (len(tok) > 1 and tok[0] == "-" and (tok[1].isdigit() or tok[1] == ".")
                and prev.startswith("--") and "=" not in prev and prev not in _FLAGS):
            out[-1] = f"{prev}={tok}"
        else:
            out.append(tok)
    return out


def main(argv=None, out=None):
    out = sys.stdout if out is None else out
    argv = sys.argv[1:] if argv is None else list(argv)
    args = build_parser().parse_args(_attach_negative_values(argv))
    args.argv = argv
    if args.tol is None:
        args.tol = _default_tol()
    if getattr(args, "label", None) == "interval":
        args.label = "[-1,1]"
    saved_cap = contour.DEPTH_CAP
    if args.depth_cap is not None:
        contour.DEPTH_CAP = args.depth_cap
    t0 = time.perf_counter()
    try:
        code = args.func(args, out)
    except IntegerParameter as e:
        out.write(dumps(_envelope(args, {"error": "IntegerParameter", "message": str(e)})))
        code = EXIT_INTEGER
    except CapExceeded as e:
        out.write(dumps(_envelope(args, {"error": "CapExceeded", "message": str(e)})))
        code = EXIT_CAP
    except (GenJacobiError, ValueError) as e:
        out.write(dumps(_envelope(args, {"error": type(e).__name__, "message": str(e)},
                                  verdict="FAIL")))
        code = EXIT_FAIL
    finally:
        contour.DEPTH_CAP = saved_cap
    print(f"wall time {time.perf_counter() - t0:.3f} s", file=sys.stderr)
    return code


def main_entry():
    """Console-script entry point."""
    sys.exit(main())


if __name__ == "__main__":  # pragma: no cover
    main_entry()
