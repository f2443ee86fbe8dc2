"""Command-line interface: ``approxh {construct,verify,decompose,flat,sweep}``.

Exit codes: 0 on success, 1 on bad input or an infeasible request (with a JSON
error body on stdout), 2 when a constructed matrix fails certification.
"""

from __future__ import annotations

import argparse
import csv
import logging
import sys
from pathlib import Path

import numpy as np

from . import __version__, io
from .assembly import assemble
from .config import RunConfig
from .errors import ApproxHError, CertificationFailure, InvalidArgument
from .flatgen import sample_flat_vector
from .frames import DISTRIBUTIONS, phase_sweep, write_sweep_csv
from .hadamard import default_registry
from .numtheory import decompose_even, decompose_odd
from .spectral import spectral_report

EXIT_OK, EXIT_INPUT, EXIT_CERT = 0, 1, 2


class _Parser(argparse.ArgumentParser):
    # argparse exits with 2 on usage errors; 2 is reserved for certification
    def error(self, message):
        self.print_usage(sys.stderr)
        sys.stdout.write(io.dumps({"error": "usage", "message": message}))
        raise SystemExit(EXIT_INPUT)


def _config(args) -> RunConfig:
    changes = {"seed": args.seed}
    if getattr(args, "eps", None) is not None:
        changes["eps_decompose"] = args.eps
    if getattr(args, "budget", None) is not None:
        changes["exhaustive_budget"] = args.budget
    return RunConfig().with_(**changes)


def _emit(payload: dict, out: str | None) -> None:
    if out:
        io.write_json(payload, out)
    else:
        sys.stdout.write(io.dumps(payload))


def cmd_construct(args) -> int:
    config = _config(args)
    V, report = assemble(args.n, config)
    out = Path(args.out or f"V_{args.n}.txt")
    io.write_signs(V, out)
    payload = {
        "provenance": config.provenance(),
        "matrix_file": out.name,
        "k_accept": config.k_accept,
        "certified": report.spectral.kappa <= config.k_accept,
        "report": report.to_dict(),
    }
    io.write_json(payload, out.with_suffix(".json"))
    sys.stdout.write(io.dumps({k: payload[k] for k in ("matrix_file", "certified")} | {"kappa": report.spectral.kappa}))
    if not payload["certified"]:
        return EXIT_CERT
    return EXIT_OK


def cmd_verify(args) -> int:
    M = io.read_matrix(args.matrix)
    payload = spectral_report(M).to_dict()
    payload["sign_matrix"] = io.is_sign_matrix(M)
    payload["version"] = __version__
    _emit(payload, args.out)
    return EXIT_OK


def cmd_decompose(args) -> int:
    eps = 0.3 if args.eps is None else args.eps
    if args.n % 2 == 0:
        d = decompose_even(args.n, eps, args.objective)
        payload = {"n": d.n, "eps": d.eps, "q": list(d.q), "max_deviation": d.max_deviation}
    else:
        d = decompose_odd(args.n, eps, default_registry().orders, args.objective)
        payload = {"n": d.n, "eps": d.eps, "m": d.m, "q": list(d.q), "max_deviation": d.max_deviation}
    payload["version"] = __version__
    _emit(payload, args.out)
    return EXIT_OK


def cmd_flat(args) -> int:
    config = _config(args)
    fv = sample_flat_vector(args.q, np.random.default_rng([config.seed, args.q]), config.c_flat, config.max_retries)
    payload = fv.to_dict() | {"provenance": config.provenance()}
    _emit(payload, args.out)
    return EXIT_OK


def _read_grid(path) -> list[tuple[int, int, str, int]]:
    with open(path, newline="") as fh:
        try:
            return [(int(r["n"]), int(r["N"]), r["distribution"], int(r["trials"])) for r in csv.DictReader(fh)]
        except (KeyError, ValueError) as exc:
            raise InvalidArgument(f"grid file needs columns n,N,distribution,trials: {exc}") from exc


def cmd_sweep(args) -> int:
    config = _config(args)
    if args.grid:
        grid = _read_grid(args.grid)
    elif args.n and args.N:
        grid = [(args.n, N, args.dist, args.trials) for N in args.N]
    else:
        raise InvalidArgument("sweep needs --grid or both --n and --N")
    records = phase_sweep(grid, args.threshold, config)
    if args.out:
        write_sweep_csv(records, args.out)
        io.write_json(config.provenance() | {"grid": grid}, Path(args.out).with_suffix(".meta.json"))
    else:
        write_sweep_csv(records, sys.stdout)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="approxh", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=f"approxh {__version__}")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(sp, eps=True):
        sp.add_argument("--seed", type=int, default=0)
        sp.add_argument("--out")
        if eps:
            sp.add_argument("--eps", type=float)

    sp = sub.add_parser("construct", help="build a ±1 matrix of order n with a spectral report")
    sp.add_argument("--n", type=int, required=True)
    common(sp)
    sp.set_defaults(func=cmd_construct)

    sp = sub.add_parser("verify", help="spectral report of a sign-text or numeric matrix file")
    sp.add_argument("matrix")
    sp.add_argument("--out")
    sp.set_defaults(func=cmd_verify)

    sp = sub.add_parser("decompose", help="prime decomposition of n")
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--eps", type=float)
    sp.add_argument("--objective", choices=("deviation", "height"), default="deviation")
    sp.add_argument("--out")
    sp.set_defaults(func=cmd_decompose)

    sp = sub.add_parser("flat", help="sample a flat ±1 vector of prime length q")
    sp.add_argument("--q", type=int, required=True)
    common(sp, eps=False)
    sp.set_defaults(func=cmd_flat)

    sp = sub.add_parser("sweep", help="random-frame harvesting sweep written as CSV")
    sp.add_argument("--grid", help="CSV with columns n,N,distribution,trials")
    sp.add_argument("--n", type=int)
    sp.add_argument("--N", type=int, nargs="+")
    sp.add_argument("--dist", choices=DISTRIBUTIONS, default="two-point")
    sp.add_argument("--trials", type=int, default=1)
    sp.add_argument("--threshold", type=float, default=RunConfig().k_accept)
    sp.add_argument("--budget", type=int)
    common(sp, eps=False)
    sp.set_defaults(func=cmd_sweep)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING, format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except CertificationFailure as exc:
        sys.stdout.write(io.dumps({"error": exc.code, "message": str(exc)}))
        return EXIT_CERT
    except (ApproxHError, ValueError, OSError) as exc:
        code = getattr(exc, "code", type(exc).__name__)
        sys.stdout.write(io.dumps({"error": code, "message": str(exc)}))
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
