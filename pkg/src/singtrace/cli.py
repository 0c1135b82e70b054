"""Command-line interface.

Exit codes: 0 success, 1 property violations under ``verify``, 2 invalid
input, 3 numeric non-convergence when ``--strict`` is given.
"""
from __future__ import annotations

import argparse
import sys
import time

from . import __version__
from .convergence import DEFAULT_TOL, classify
from .dixmier import DEFAULT_HORIZON, KAPPA, PSI, phi_exp, trace_analyze
from .errors import DomainError, InputError, NotInSpaceError
from .families import parse_call
from .io import InputSpec, ReportEnvelope, family_spec, ingest, render_text
from .kappa_growth import Restricted, classify_kappa, psi_dichotomies
from .marcinkiewicz import marcinkiewicz_norm
from .probes import build_function, build_sequence

EXIT_OK, EXIT_VIOLATION, EXIT_INPUT, EXIT_STRICT = 0, 1, 2, 3


def _common():
    p = argparse.ArgumentParser(add_help=False)
    p.add_argument("--tol", type=float, default=DEFAULT_TOL, help="matching tolerance (default 1e-2)")
    p.add_argument("--format", choices=("json", "text"), default="json")
    p.add_argument("--strict", action="store_true", help="exit 3 on non-convergence diagnostics")
    p.add_argument("--timing", action="store_true", help="include wall_time in the report")
    p.add_argument("--seed", type=int, default=42, help="corpus seed (verify)")
    return p


def _data_inputs(p, required):
    g = p.add_mutually_exclusive_group(required=required)
    g.add_argument("--family", help="named family, e.g. harmonic or 'power(1.5)'")
    g.add_argument("--csv", help="CSV file of singular values")
    g.add_argument("--json", help="JSON file of singular values")
    g.add_argument("--step", help="step-function pieces (CSV value,measure or JSON)")
    p.add_argument("--scale", type=float, default=1.0, help="multiply the data by this factor")
    return g


def build_parser():
    common = _common()
    parser = argparse.ArgumentParser(prog="singtrace", description="Dixmier-trace data from singular values")
    parser.add_argument("--version", action="version", version=f"singtrace {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    a = sub.add_parser("analyze", parents=[common], help="measurability verdict and trace value or band")
    _data_inputs(a, True)
    a.add_argument("--horizon", type=float, default=DEFAULT_HORIZON)
    a.add_argument("--no-cross-checks", action="store_true", help="skip zeta and heat-kernel estimates")

    k = sub.add_parser("classify-kappa", parents=[common], help="growth classes of kappa against psi")
    k.add_argument("--kappa", required=True)
    k.add_argument("--psi", default="log1p")
    k.add_argument("--horizon", type=float, default=1e4)

    b = sub.add_parser("band", parents=[common], help="Cesaro band and S/F/C verdict")
    g = _data_inputs(b, False)
    g.add_argument("--function", help="bounded function, e.g. 'sin_log(0.5, 1)'")
    g.add_argument("--sequence", help="bounded sequence, e.g. 'alternating(1)'")
    b.add_argument("--horizon", type=float, default=1e6)

    s = sub.add_parser("psi-check", parents=[common], help="large-t dichotomies of psi")
    s.add_argument("--psi", required=True)
    s.add_argument("--horizon", type=float, default=1e6)

    v = sub.add_parser("verify", parents=[common], help="run the property corpus")
    v.add_argument("--corpus-size", type=int, default=200)
    v.add_argument("--threads", type=int, default=None, help="worker threads (capped by SINGTRACE_THREADS)")
    return parser


def _data_spec(args):
    if args.family:
        return InputSpec("named_family", family=family_spec(args.family, "sequence", args.scale),
                         horizon=args.horizon, tolerances={"tol": args.tol})
    for attr, kind in (("csv", "csv_sequence"), ("json", "json_sequence"), ("step", "step_function")):
        path = getattr(args, attr, None)
        if path:
            return InputSpec(kind, path=path, horizon=args.horizon, tolerances={"tol": args.tol})
    return None


def _scaled(spec, x, scale):
    return x if spec.kind == "named_family" or scale == 1.0 else x.scaled(scale)


def _named(text, target, psi=None):
    name, params = parse_call(text)
    fam = {"name": name, "params": params, "type": target}
    if psi:
        fam["psi"] = psi
    spec = InputSpec("named_family", family=fam)
    return spec, ingest(spec)


def cmd_analyze(args):
    spec = _data_spec(args)
    x = _scaled(spec, ingest(spec), args.scale)
    report = trace_analyze(x, args.horizon, args.tol, cross_checks=not args.no_cross_checks)
    problems = []
    if not report.trace_band.stabilized:
        problems.append("Cesaro band not stabilized")
    if not report.riesz_stabilized:
        problems.append("Riesz seminorm not stabilized")
    return spec.echo(), report, problems


def cmd_classify_kappa(args):
    pspec, psi = _named(args.psi, "psi")
    kname = parse_call(args.kappa)[0]
    kspec, kappa = _named(args.kappa, "kappa", args.psi if kname == "psi_inverse" else None)
    verdict = classify_kappa(kappa, psi, args.horizon, args.tol)
    problems = ["restricted growth undetermined"] if verdict.restricted == Restricted.UNDETERMINED else []
    echo = {"kappa": kspec.family, "psi": pspec.family, "horizon": args.horizon, "tolerances": {"tol": args.tol}}
    return echo, verdict, problems


def cmd_band(args):
    tol = args.tol
    if args.function:
        obj = build_function(args.function)
        echo = {"function": args.function, "horizon": args.horizon, "tolerances": {"tol": tol}}
    elif args.sequence:
        obj = build_sequence(args.sequence)
        echo = {"sequence": args.sequence, "horizon": args.horizon, "tolerances": {"tol": tol}}
    else:
        spec = _data_spec(args)
        if spec is None:
            raise InputError("band needs one of --function, --sequence, --family, --csv, --json, --step")
        x = _scaled(spec, ingest(spec), args.scale)
        norm = marcinkiewicz_norm(x, PSI, max(args.horizon, 1e3), KAPPA)
        obj = phi_exp(x, norm.value)
        echo = spec.echo()
        echo["transform"] = "phi_exp"
    verdict = classify(obj, args.horizon, tol)
    problems = [] if verdict.band.stabilized else ["Cesaro band not stabilized"]
    return echo, verdict, problems


def cmd_psi_check(args):
    spec, psi = _named(args.psi, "psi")
    d = psi_dichotomies(psi, args.horizon, args.tol)
    return {"psi": spec.family, "horizon": args.horizon, "tolerances": {"tol": args.tol}}, d, []


def cmd_verify(args):
    from .verify import run_verify

    rep = run_verify(args.seed, args.corpus_size, args.threads)
    echo = {"seed": args.seed, "corpus_size": args.corpus_size, "tolerances": {"tol": args.tol}}
    return echo, rep, []


COMMANDS = {"analyze": cmd_analyze, "classify-kappa": cmd_classify_kappa, "band": cmd_band,
            "psi-check": cmd_psi_check, "verify": cmd_verify}


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    if not getattr(args, "horizon", 1.0) > 0:
        parser.error("--horizon must be positive")
    start = time.perf_counter()
    try:
        echo, results, problems = COMMANDS[args.command](args)
    except (InputError, DomainError, NotInSpaceError, KeyError, OSError) as exc:
        msg = exc.args[0] if isinstance(exc, KeyError) and exc.args else str(exc)
        print(f"singtrace {args.command}: error: {msg}", file=sys.stderr)
        return EXIT_INPUT
    env = ReportEnvelope(args.command, echo, results, wall_time=time.perf_counter() - start)
    out = env.to_json(args.timing) if args.format == "json" else render_text(env, args.timing)
    sys.stdout.write(out)
    sys.stdout.flush()
    if args.command == "verify" and not results.passed:
        return EXIT_VIOLATION
    if args.strict and problems:
        for p in problems:
            print(f"singtrace {args.command}: non-convergence: {p}", file=sys.stderr)
        return EXIT_STRICT
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
