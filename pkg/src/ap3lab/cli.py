"""Command-line front end.

Exit codes: 0 success, 1 invalid arguments, 2 precondition or constraint
violation, 3 resource limit.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import bounds as bd
from .bohr import build_bohr_set
from .cyclic import CyclicFunction, forward_transform, load_function, save_spectrum
from .errors import InvalidArgumentError, LabError
from .pipeline import (
    PipelineConfig,
    canonical_json,
    delta_sweep,
    load_member_file,
    norm_sweep,
    run_pipeline,
    write_csv,
    write_report,
)
from .primes import sieve_primes
from .sieve_bounds import (
    TupleSpec,
    count_prime_tuples,
    hypothesis_flags,
    klimov_upper_bound,
    singular_series,
)
from .threeap import lambda_direct, lambda_fourier, trivial_mass
from .wtrick import build_context, build_sieved_function


class _CliArgumentError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # argparse default exits with code 2
        raise _CliArgumentError(message)


def _build_parser() -> _Parser:
    parser = _Parser(prog="ap3lab", description=__doc__)
    parser.add_argument("--config", help="JSON config file merged into pipeline runs")
    parser.add_argument("--threads", type=int, default=1,
                        help="worker hint; results never depend on it")
    parser.add_argument("--force", action="store_true",
                        help="lift theory-range guards, tagging output exploratory")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("primes", help="write primes up to a limit, one per line")
    p.add_argument("--limit", type=int, required=True)
    p.add_argument("--out")

    p = sub.add_parser("transform", help="spectrum of a serialized function")
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--out", required=True)

    p = sub.add_parser("wtrick", help="sieving construction report")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--z", type=float)
    p.add_argument("--set", dest="set_file")
    p.add_argument("--out", required=True)

    p = sub.add_parser("bohr", help="Bohr set size and members")
    p.add_argument("--p", type=int, required=True)
    p.add_argument("--freqs", required=True, help="comma-separated frequencies")
    p.add_argument("--eps", required=True, help="radius as a decimal string")
    p.add_argument("--members", action="store_true")
    p.add_argument("--out")

    p = sub.add_parser("lambda", help="three-term progression operator of a set")
    p.add_argument("--p", type=int, required=True)
    p.add_argument("--set", dest="set_file", required=True)
    p.add_argument("--fourier", action="store_true")
    p.add_argument("--direct", action="store_true")
    p.add_argument("--both", action="store_true")
    p.add_argument("--out")

    p = sub.add_parser("tuples", help="prime tuple count against its sieve bound")
    p.add_argument("--w", type=int, required=True)
    p.add_argument("--offsets", required=True, help="comma-separated offsets")
    p.add_argument("--limit", type=int, required=True)
    p.add_argument("--series-cutoff", type=int, default=10**6)
    p.add_argument("--out")

    p = sub.add_parser("pipeline", help="full experiment; JSON plus CSV")
    _add_pipeline_args(p)
    p.add_argument("--out", required=True)

    p = sub.add_parser("norm-sweep", help="norm table rows over a k grid")
    _add_pipeline_args(p)
    p.add_argument("--k-grid")
    p.add_argument("--out", required=True)

    p = sub.add_parser("delta-sweep", help="rows over a (delta, epsilon) grid")
    _add_pipeline_args(p)
    p.add_argument("--delta-grid")
    p.add_argument("--eps-grid")
    p.add_argument("--out", required=True)

    p = sub.add_parser("bounds", help="density bound comparison table")
    p.add_argument("--n", type=float, required=True)
    p.add_argument("--out")

    return parser


def _add_pipeline_args(p):
    p.add_argument("--n", type=int)
    p.add_argument("--z", type=float)
    p.add_argument("--set", dest="set_file")
    p.add_argument("--delta")
    p.add_argument("--eps")
    p.add_argument("--k", help="comma-separated k values")


def _pipeline_config(args) -> PipelineConfig:
    raw: dict = {}
    if args.config:
        raw.update(json.loads(Path(args.config).read_text()))
    if args.n is not None:
        raw["n"] = args.n
    if args.z is not None:
        raw["z_override"] = args.z
    if args.set_file:
        raw["set_source"] = args.set_file
    if args.delta:
        raw["delta"] = args.delta
    if args.eps:
        raw["epsilon"] = args.eps
    if args.k:
        raw["k_values"] = [int(v) for v in args.k.split(",")]
    if getattr(args, "k_grid", None):
        raw["k_grid"] = [int(v) for v in args.k_grid.split(",")]
    if getattr(args, "delta_grid", None):
        raw["delta_grid"] = [v for v in args.delta_grid.split(",")]
    if getattr(args, "eps_grid", None):
        raw["epsilon_grid"] = [v for v in args.eps_grid.split(",")]
    raw["threads"] = args.threads
    raw["force"] = args.force
    if "n" not in raw:
        raise InvalidArgumentError("--n (or a config file with n) is required")
    return PipelineConfig.from_dict(raw)


def _emit(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def _cmd_primes(args) -> int:
    table = sieve_primes(args.limit)
    sink = open(args.out, "w", encoding="utf-8") if args.out else sys.stdout
    try:
        for block in table.iter_blocks():
            sink.write("\n".join(str(int(p)) for p in block.tolist()))
            sink.write("\n")
    finally:
        if args.out:
            sink.close()
    return 0


def _cmd_transform(args) -> int:
    function = load_function(args.infile)
    save_spectrum(forward_transform(function), args.out)
    return 0


def _cmd_wtrick(args) -> int:
    table = sieve_primes(args.n)
    members = load_member_file(args.set_file) if args.set_file else table.primes()
    ctx, params = build_context(members, args.n, args.z)
    sieved = build_sieved_function(members, ctx, prime_table=table)
    report = {
        "n": args.n,
        "z": ctx.z,
        "w": ctx.w,
        "phi_w": ctx.phi_w,
        "b": ctx.b,
        "p": ctx.p,
        "set_size": int(np.asarray(members).size),
        "a0_size": int(ctx.a0.size),
        "alpha": sieved.alpha,
        "l1_norm": sieved.l1_norm,
        "bounds_hold": {
            "log_w_in_band": params.log_w_in_band,
            "ratio_in_band": params.ratio_in_band,
            "mass_ok": sieved.mass_ok,
            "alpha_threshold_ok": sieved.alpha >= float(np.log(args.n)) ** -0.25,
        },
    }
    _emit(canonical_json(report), args.out)
    return 0


def _cmd_bohr(args) -> int:
    freqs = [int(v) for v in args.freqs.split(",")]
    bohr = build_bohr_set(args.p, freqs, args.eps)
    report = {
        "p": args.p,
        "frequencies": list(bohr.frequencies),
        "epsilon": str(bohr.radius),
        "size": bohr.size,
        "measure": bohr.measure,
    }
    if args.members:
        report["members"] = bohr.members().tolist()
    _emit(canonical_json(report), args.out)
    return 0


def _cmd_lambda(args) -> int:
    members = load_member_file(args.set_file)
    f = CyclicFunction.indicator(args.p, members.tolist())
    use_direct = args.direct or args.both
    use_fourier = args.fourier or args.both or not use_direct
    report: dict = {"p": args.p, "set_size": int(members.size)}
    triv = trivial_mass(f, f, f)
    if use_fourier:
        lam = lambda_fourier(f, f, f)
        report["fourier"] = {
            "lambda": lam, "trivial": triv, "nontrivial": lam - triv,
        }
    if use_direct:
        direct = lambda_direct(f, f, f)
        report["direct"] = {
            "lambda": direct.lambda_value,
            "trivial": direct.trivial_mass,
            "nontrivial": direct.nontrivial_mass,
            "pair_count": direct.pair_count,
        }
    _emit(canonical_json(report), args.out)
    return 0


def _cmd_tuples(args) -> int:
    spec = TupleSpec(w=args.w, offsets=tuple(int(v) for v in args.offsets.split(",")))
    count = count_prime_tuples(spec, args.limit)
    series = singular_series(spec, args.series_cutoff)
    report = {
        "w": spec.w,
        "offsets": list(spec.offsets),
        "limit": args.limit,
        "count": count,
        "singular_series": series.value,
        "tail_estimate": series.tail_estimate,
        "hypotheses": hypothesis_flags(spec, args.limit),
    }
    if spec.k >= 2:
        bound = klimov_upper_bound(spec, args.limit, series)
        report["klimov_bound"] = bound
        report["ratio"] = count / bound
    else:
        report["klimov_bound"] = None
        report["ratio"] = None
    _emit(canonical_json(report), args.out)
    return 0


def _cmd_pipeline(args) -> int:
    report = run_pipeline(_pipeline_config(args))
    write_report(report, args.out)
    return 0


def _cmd_norm_sweep(args) -> int:
    header, rows = norm_sweep(_pipeline_config(args))
    write_csv(args.out, header, rows)
    return 0


def _cmd_delta_sweep(args) -> int:
    header, rows = delta_sweep(_pipeline_config(args))
    write_csv(args.out, header, rows)
    return 0


def _cmd_bounds(args) -> int:
    report = {"n": args.n, "table": bd.density_bound_table(args.n)}
    _emit(canonical_json(report), args.out)
    return 0


_COMMANDS = {
    "primes": _cmd_primes,
    "transform": _cmd_transform,
    "wtrick": _cmd_wtrick,
    "bohr": _cmd_bohr,
    "lambda": _cmd_lambda,
    "tuples": _cmd_tuples,
    "pipeline": _cmd_pipeline,
    "norm-sweep": _cmd_norm_sweep,
    "delta-sweep": _cmd_delta_sweep,
    "bounds": _cmd_bounds,
}


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
        return _COMMANDS[args.command](args)
    except _CliArgumentError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except LabError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.exit_code
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    raise SystemExit(main())
