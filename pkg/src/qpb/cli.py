"""Command-line driver. Every subcommand writes CSV to ``--out`` (default stdout)."""

from __future__ import annotations

import argparse
import contextlib
import sys
from typing import Sequence

from qpb import experiments as ex
from qpb.spectral import coherence_bounds, coherent_info_bounds, multi_info_bounds

BOUNDS_HEADER = ["quantity", "lower", "upper", "tightness_epsilon", "clamped"]

_DEFAULT_SHOTS = {
    "shadow": ex.DEFAULT_SHADOW_M,
    "collective": ex.DEFAULT_COLLECTIVE_SHOTS,
    "tomo": ex.DEFAULT_TOMO_SHOTS,
}


def _u64(text: str) -> int:
    value = int(text, 0)
    if not 0 <= value < 2**64:
        raise argparse.ArgumentTypeError("seed must be an unsigned 64-bit integer")
    return value


def _angle(text: str) -> float:
    try:
        return ex.parse_angle(text)
    except ValueError as err:
        raise argparse.ArgumentTypeError(str(err)) from None


def _common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--seed", type=_u64, default=0, help="unsigned 64-bit seed (default 0)")
    p.add_argument("--out", default="-", help="output CSV path, '-' for stdout")


def _sweep_args(p: argparse.ArgumentParser, family: str, protocol: str | None) -> None:
    _common(p)
    p.add_argument("--family", choices=[f.value for f in ex.Family], default=family)
    if protocol is None:
        p.add_argument(
            "--protocol",
            choices=["exact", "shadow", "collective", "tomo"],
            default="exact",
        )
    p.add_argument("--shots", type=int, default=None,
                   help="snapshots M (shadow), copies-pair shots (collective), total budget (tomo)")
    p.add_argument("--repeats", type=int, default=ex.DEFAULT_REPEATS)
    grid = p.add_mutually_exclusive_group()
    grid.add_argument("--theta", type=_angle, help="single angle, e.g. 3pi/20")
    grid.add_argument("--thetas", default=ex.DEFAULT_THETAS, help="start:end:count (default 0:pi/2:11)")
    p.add_argument("--subsystem", action="append", default=None,
                   help="labels of B, e.g. 1 or 1,1p,2 (repeatable)")
    p.add_argument("--noise-p", type=float, default=0.0, help="white-noise weight p")
    p.add_argument("--diag-mode", default=None,
                   help="shadow: unbiased|plugin; collective: general|product")
    p.add_argument("--err-kind", choices=["sd", "sem"], default="sd",
                   help="spread across repeats: standard deviation or standard error")
    p.add_argument("--dump-shadows", default=None, help="write raw shadow snapshots here")
    p.add_argument("--dump-counts", default=None, help="write raw Bell counts here")
    p.set_defaults(fixed_protocol=protocol)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qpb",
        description="Purity-based bounds on coherent information and coherence.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    b = sub.add_parser("bounds", help="evaluate bounds from given purities")
    _common(b)
    b.add_argument("--p-global", type=float, required=True)
    b.add_argument("--d-total", type=int, required=True)
    b.add_argument("--p-marginal", type=float)
    b.add_argument("--d-b", type=int)
    b.add_argument("--p-diag", type=float)
    b.add_argument("--marginals", default=None,
                   help="multi-information parties as P:d,P:d,...")

    _sweep_args(sub.add_parser("sweep", help="theta sweep with a chosen protocol"), "ghz", None)
    _sweep_args(sub.add_parser("shadow", help="classical-shadow sweep"), "ghz", "shadow")
    _sweep_args(sub.add_parser("collective", help="two-copy Bell-measurement sweep"), "psi2", "collective")
    _sweep_args(sub.add_parser("tomo", help="Pauli tomography baseline sweep"), "ghz", "tomo")

    n = sub.add_parser("noise-sweep", help="exact quantities of white-noise GHZ states")
    _common(n)
    n.add_argument("--p-grid", default="0:0.1:21", help="start:end:count for p")
    n.add_argument("--thetas", default="pi/20,3pi/20,5pi/20",
                   help="comma-separated angles or start:end:count")
    n.add_argument("--subsystem", action="append", default=None)
    return parser


@contextlib.contextmanager
def _open_out(path: str | None):
    if path is None:
        yield None
    elif path == "-":
        yield sys.stdout
    else:
        with open(path, "w", newline="") as fh:
            yield fh


def _run_bounds(args) -> None:
    rows = []
    if args.p_marginal is not None:
        if args.d_b is None:
            raise ValueError("--p-marginal needs --d-b")
        rows.append(coherent_info_bounds(args.p_global, args.p_marginal, args.d_total, args.d_b))
    if args.p_diag is not None:
        rows.append(coherence_bounds(args.p_global, args.p_diag, args.d_total))
    if args.marginals:
        parties = []
        for item in args.marginals.split(","):
            p, d = item.split(":")
            parties.append((float(p), int(d)))
        rows.append(multi_info_bounds(parties, args.p_global, args.d_total))
    if not rows:
        raise ValueError("give at least one of --p-marginal, --p-diag, --marginals")
    with _open_out(args.out) as fh:
        fh.write(",".join(BOUNDS_HEADER) + "\n")
        for r in rows:
            fh.write(
                f"{r.quantity.value},{ex._fmt(r.lower)},{ex._fmt(r.upper)},"
                f"{ex._fmt(r.tightness_epsilon)},{ex._fmt(r.clamped)}\n"
            )


def _run_sweep(args) -> None:
    proto_name = args.fixed_protocol or args.protocol
    protocol = {
        "exact": ex.Protocol.EXACT,
        "shadow": ex.Protocol.SHADOW,
        "collective": ex.Protocol.COLLECTIVE,
        "tomo": ex.Protocol.TOMOGRAPHY,
    }[proto_name]
    shots = args.shots if args.shots is not None else _DEFAULT_SHOTS.get(proto_name, ex.DEFAULT_SHADOW_M)
    thetas = [args.theta] if args.theta is not None else ex.parse_grid(args.thetas)
    with _open_out(args.dump_shadows) as ds, _open_out(args.dump_counts) as dc:
        cfg = ex.SweepConfig(
            family=ex.Family(args.family),
            thetas=thetas,
            protocol=protocol,
            shots=shots,
            repeats=args.repeats,
            seed=args.seed,
            subsystems=args.subsystem,
            noise_p=args.noise_p,
            diag_mode=args.diag_mode,
            err_kind=args.err_kind,
            dump_shadows=ds,
            dump_counts=dc,
        )
        rows = ex.run_sweep(cfg)
    with _open_out(args.out) as fh:
        ex.emit_csv(rows, fh)


def _run_noise(args) -> None:
    p_grid = ex.parse_grid(args.p_grid, float)
    if ":" in args.thetas:
        thetas = ex.parse_grid(args.thetas)
    else:
        thetas = [ex.parse_angle(t) for t in args.thetas.split(",")]
    subsystems = args.subsystem or ex.DEFAULT_SUBSYSTEMS[ex.Family.GHZ_THETA]
    rows = ex.run_noise_sweep(p_grid, thetas, subsystems)
    with _open_out(args.out) as fh:
        ex.emit_noise_csv(rows, fh)


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "bounds":
            _run_bounds(args)
        elif args.command == "noise-sweep":
            _run_noise(args)
        else:
            _run_sweep(args)
    except BrokenPipeError:
        sys.stderr.close()
        return 0
    except (ValueError, OSError) as err:
        print(f"qpb: error: {err}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
