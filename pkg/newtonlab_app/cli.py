"""Command-line front end: ``python -m newtonlab_app.cli <command> ...``.

Exit codes: 0 success, 2 when a report fails its own verification, 1 on errors.
"""
import argparse
import json
import logging
import sys
from typing import Optional, Sequence

from . import config
from .basins import Window
from .errors import NewtonLabError, VerificationError
from .executor import record_run_if_enabled
from .render import RenderJob, parse_resolution, parse_window, render_julia, render_param_per2, write_image
from .reports import (
    berkovich_report,
    blaschke_report,
    blaschke_text,
    classify_report,
    cycles_report,
    degenerate_report,
    epstein_report,
    is_verified,
    newton_for,
    parse_t_values,
)

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_UNVERIFIED = 2


# Subcommands each of the shared inputs applies to.
APPLIES = {
    "roots": ("classify", "epstein", "cycles", "render-julia"),
    "period": ("cycles", "degenerate"),
    "family": ("berkovich", "degenerate"),
    "t_values": ("degenerate",),
}
REQUIRED = {"roots": APPLIES["roots"], "family": APPLIES["family"]}
DEFAULT_PERIOD = 2


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--roots", help='JSON list ("[[0,0],[1,0],...]"), exact list or preset name')
    p.add_argument("--family", help='"r = t; s = 1/2", "roots = -1, -t, 0, t, 1" or "c = 3/4 + t"')
    p.add_argument("--period", type=int, help=f"cycle period (default {DEFAULT_PERIOD})")
    p.add_argument("--t-values", help="comma list, decreasing")
    p.add_argument("--window", help="x0,y0,x1,y1")
    p.add_argument("--res", default="256x256", help="WxH")
    p.add_argument("--iter-cap", type=int, default=config.ITER_CAP)
    p.add_argument("--eps", type=float, default=config.EPS)
    p.add_argument("--out", help="output path (default stdout for reports)")
    p.add_argument("--format", choices=("json", "ppm", "png", "text"), default=None)
    p.add_argument("--record", action="store_true", help="store the run when DATABASE_URL is set")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="newtonlab", description="Newton map dynamics and degenerations")
    sub = parser.add_subparsers(dest="command", required=True)

    for name, help_text in (
        ("classify", "hyperbolic type of a quartic Newton map"),
        ("epstein", "γ, δ and the refined fatou-shishikura inequality"),
        ("cycles", "cycles of a given period with their invariants"),
        ("render-julia", "dynamical plane image"),
    ):
        _add_common(sub.add_parser(name, help=help_text))

    p = sub.add_parser("render-per2", help="parameter plane of the Per_2(0) slice")
    p.add_argument("--mark", action="append", default=[], help="re,im of a parameter to letter (repeatable)")
    _add_common(p)

    _add_common(sub.add_parser("berkovich", help="type, tree, Σ and reductions of a family over the Puiseux field"))

    p = sub.add_parser("degenerate", help="numeric degeneration against its limit")
    p.add_argument("--negate", action="store_true", help="use -N_t")
    p.add_argument("--shrink", action="store_true", help="also run the basin-shrink raster check")
    _add_common(p)

    p = sub.add_parser("blaschke", help="escape diagnostics of B_a(w) = -w^k (w - a)/(1 - a w)")
    p.add_argument("--k", type=int, default=2)
    p.add_argument("--a-seq", type=int, default=6, help="a = 1 - 10^-j for j = 1..N")
    _add_common(p)
    return parser


def check_flags(args: argparse.Namespace) -> None:
    """Reject shared inputs a subcommand does not use and require the ones it needs."""
    for dest, commands in APPLIES.items():
        flag = "--" + dest.replace("_", "-")
        given = getattr(args, dest) is not None
        if given and args.command not in commands:
            raise ValueError(f"{flag} does not apply to {args.command} (used by {', '.join(commands)})")
        if not given and args.command in REQUIRED.get(dest, ()):
            raise ValueError(f"{args.command} needs {flag}")
    if args.period is None:
        args.period = DEFAULT_PERIOD


def _emit(text: str, out: Optional[str]) -> None:
    if out:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text + "\n")
    else:
        sys.stdout.write(text + "\n")


def _render(args) -> int:
    width, height = parse_resolution(args.res)
    fmt = args.format if args.format in ("ppm", "png") else "png"
    job = RenderJob(
        mode="julia" if args.command == "render-julia" else "param-per2",
        window=parse_window(args.window) if args.window else None,
        resolution=(width, height),
        iter_cap=args.iter_cap,
        eps=args.eps,
        marks=[tuple(float(x) for x in m.split(",")) for m in getattr(args, "mark", [])],
        format=fmt,
        out=args.out,
    )
    if job.mode == "julia":
        image = render_julia(job, newton_for(args.roots))
    else:
        image = render_param_per2(job)
    path = args.out or f"{job.mode}.{fmt}"
    write_image(image, path, fmt)
    logger.info("wrote %s", path)
    if args.record:
        record_run_if_enabled(args.command, job.model_dump(mode="json"), {"path": path}, True)
    return EXIT_OK


def _report(args):
    if args.command == "classify":
        window = Window(*parse_window(args.window)) if args.window else None
        width, height = parse_resolution(args.res)
        if width != height:
            raise ValueError(f"classify rasters are square; got --res {args.res}")
        return classify_report(args.roots, width, window, args.iter_cap, args.eps)
    if args.command == "epstein":
        return epstein_report(args.roots, args.iter_cap)
    if args.command == "cycles":
        return cycles_report(args.roots, args.period)
    if args.command == "berkovich":
        return berkovich_report(args.family)
    if args.command == "degenerate":
        return degenerate_report(args.family, parse_t_values(args.t_values), args.period, args.negate, args.shrink)
    if args.command == "blaschke":
        return blaschke_report(args.k, args.a_seq)
    raise ValueError(f"unknown command {args.command}")


def main(argv: Optional[Sequence[str]] = None) -> int:
    logging.basicConfig(level=config.LOG_LEVEL, stream=sys.stderr)
    args = build_parser().parse_args(argv)
    params = {k: v for k, v in vars(args).items() if k not in ("record",)}
    try:
        check_flags(args)
        if args.command.startswith("render-"):
            return _render(args)
        if args.command == "blaschke" and args.format == "text":
            _emit(blaschke_text(args.k, args.a_seq), args.out)
            return EXIT_OK
        model = _report(args)
    except VerificationError as e:
        logger.error("verification failed (%s): %s", e.quantity, e)
        return EXIT_UNVERIFIED
    except (NewtonLabError, ValueError, OSError) as e:
        logger.error("%s failed: %s", args.command, e)
        if args.record:
            record_run_if_enabled(args.command, params, error=str(e))
        return EXIT_ERROR

    payload = model.model_dump(mode="json")
    verified = is_verified(model)
    _emit(json.dumps(payload, indent=2), args.out)
    if args.record:
        record_run_if_enabled(args.command, params, payload, verified)
    return EXIT_UNVERIFIED if verified is False else EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
