"""Command-line front door.

Verdicts and summaries print to standard output as JSON only; messages go to
standard error.  Exit codes: 0 any computed verdict, 2 incommensurate
parameters, 3 configuration error, 4 I/O error.

The CLI is a thin client of the service layer: by default it calls the same
handlers the HTTP app serves, in process; with --server URL it sends the
identical request to a running instance instead.  Files are always written
atomically (temp file + rename).
"""

from __future__ import annotations

import argparse
import os
import sys

from .errors import IncommensurateParameters
from .service import handlers
from .service.schemas import (
    CheckRequest,
    OracleRequest,
    ReportRequest,
    ScaleStudyRequest,
    SweepRequest,
    SweepSpecIn,
    TolerancesIn,
    TripleIn,
)
from .sweep import write_bytes_atomic, write_text_atomic
from .verdict import canonical_json, to_jsonable

EXIT_OK = 0
EXIT_INCOMMENSURATE = 2
EXIT_CONFIG = 3
EXIT_IO = 4


class _Parser(argparse.ArgumentParser):
    # argparse exits with 2 on bad flags; 2 is reserved for incommensurate
    # parameters here, so remap usage errors to the config code.
    def error(self, message):
        self.exit(EXIT_CONFIG, f"{self.prog}: error: {message}\n")


def _triple(text: str) -> TripleIn:
    parts = text.split(",")
    if len(parts) != 3:
        raise argparse.ArgumentTypeError(
            f"expected three comma-separated values, got {text!r}"
        )
    try:
        shift, mod_step, win_len = (float(v) for v in parts)
    except ValueError:
        raise argparse.ArgumentTypeError(f"non-numeric triple {text!r}")
    return TripleIn(shift=shift, mod_step=mod_step, win_len=win_len)


def _int_list(text: str) -> list[int]:
    try:
        return [int(v) for v in text.split(",") if v != ""]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}")


def _default_workers() -> int:
    try:
        return max(1, int(os.environ.get("ASF_LAB_THREADS", "1")))
    except ValueError:
        return 1


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(
        prog="asf-lab",
        description="Classify Gabor-type frame pairs on finite cyclic models.",
    )
    parser.add_argument(
        "--server",
        metavar="URL",
        default=None,
        help="send the request to a running asf-lab service instead of computing in process",
    )
    sub = parser.add_subparsers(dest="command", required=True, metavar="COMMAND", parser_class=_Parser)

    check = sub.add_parser("check", help="classify a single parameter tuple")
    check.add_argument("--p", type=float, required=True, help="Lebesgue exponent, 1 < p < inf")
    check.add_argument("--synth", type=_triple, required=True, metavar="A,B,C",
                       help="synthesis triple: shift, modulation step, window length")
    check.add_argument("--anal", type=_triple, default=None, metavar="ALPHA,BETA,RHO",
                       help="analysis triple (default: same as --synth)")
    check.add_argument("--grid-res", type=float, required=True, help="grid spacing h")
    check.add_argument("--period", type=float, required=True, help="model period")
    check.add_argument("--eps-sing", type=float, default=1e-8,
                       help="relative lower/upper cutoff for NOT_ASF")
    check.add_argument("--kappa-max", type=float, default=1e8,
                       help="condition cap for an ASF verdict")
    check.add_argument("--seed", type=int, default=0, help="estimator start-vector seed")

    sweep = sub.add_parser("sweep", help="run a parameter grid sweep")
    sweep.add_argument("--spec", required=True, metavar="PATH", help="TOML or JSON sweep spec")
    sweep.add_argument("--out", required=True, metavar="PATH", help="output CSV path")
    sweep.add_argument("--workers", type=int, default=_default_workers(),
                       help="worker threads (default: ASF_LAB_THREADS or 1)")
    sweep.add_argument("--resume", action="store_true",
                       help="reuse rows from an existing --out file")
    sweep.add_argument("--timing", action="store_true",
                       help="record wall-clock ms per row (breaks byte-level reproducibility)")
    sweep.add_argument("--seed", type=int, default=None, help="override the spec's seed")

    study = sub.add_parser("scale-study",
                           help="track verdicts across increasing model sizes")
    study.add_argument("--p", type=float, required=True, help="Lebesgue exponent, 1 < p < inf")
    study.add_argument("--synth", type=_triple, required=True, metavar="A,B,C",
                       help="synthesis triple: shift, modulation step, window length")
    study.add_argument("--anal", type=_triple, default=None, metavar="ALPHA,BETA,RHO",
                       help="analysis triple (default: same as --synth)")
    study.add_argument("--period", type=float, required=True, help="model period")
    study.add_argument("--sizes", type=_int_list, required=True, metavar="L1,L2,...",
                       help="strictly increasing model sizes")
    study.add_argument("--seed", type=int, default=0, help="estimator start-vector seed")
    study.add_argument("--out", default=None, metavar="PATH",
                       help="write the study JSON here instead of standard output")

    oracle = sub.add_parser("oracle",
                            help="covering counts and exact bounds for a short indicator window")
    oracle.add_argument("--synth", type=_triple, required=True, metavar="A,B,C",
                        help="synthesis triple: shift, modulation step, window length")
    oracle.add_argument("--grid-res", type=float, required=True, help="grid spacing h")
    oracle.add_argument("--period", type=float, required=True, help="model period")

    report = sub.add_parser("report",
                            help="render a sweep CSV slice as a PGM heatmap")
    report.add_argument("--in", dest="in_path", required=True, metavar="PATH", help="sweep CSV")
    report.add_argument("--x", required=True, help="sweep axis mapped to image columns")
    report.add_argument("--y", required=True, help="sweep axis mapped to image rows")
    report.add_argument("--metric", choices=("classification", "condition"),
                        default="classification", help="pixel metric")
    report.add_argument("--out", required=True, metavar="PATH", help="output PGM path")
    report.add_argument("--fix", action="append", default=[], metavar="AXIS=VALUE",
                        help="pin a non-plotted axis (repeatable)")
    return parser


def _post(args, path: str, payload) -> dict:
    """Send a request to the remote service; mirror its error contract."""
    import httpx

    url = args.server.rstrip("/") + path
    try:
        resp = httpx.post(url, json=to_jsonable(payload.model_dump()), timeout=None)
    except httpx.HTTPError as exc:
        raise OSError(f"request to {url} failed: {exc}") from exc
    if resp.status_code == 200:
        return resp.json()
    try:
        detail = resp.json()
    except ValueError:
        detail = {}
    message = str(detail.get("error", {}).get("message", resp.text))
    kind = detail.get("error", {}).get("kind")
    if resp.status_code == 409 or kind == "incommensurate":
        raise IncommensurateParameters(message)
    if resp.status_code in (400, 422):
        raise ValueError(message)
    raise OSError(f"service error {resp.status_code}: {message}")


def _print_json(payload: dict) -> None:
    sys.stdout.write(canonical_json(payload) + "\n")


def _cmd_check(args) -> int:
    req = CheckRequest(
        p=args.p,
        synth=args.synth,
        anal=args.anal,
        grid_res=args.grid_res,
        period=args.period,
        tolerances=TolerancesIn(
            eps_singular=args.eps_sing, kappa_max=args.kappa_max, seed=args.seed
        ),
    )
    out = _post(args, "/check", req) if args.server else handlers.check(req)
    _print_json(out)
    return EXIT_OK


def _cmd_oracle(args) -> int:
    req = OracleRequest(synth=args.synth, grid_res=args.grid_res, period=args.period)
    out = _post(args, "/oracle", req) if args.server else handlers.oracle(req)
    _print_json(out)
    return EXIT_OK


def _cmd_scale_study(args) -> int:
    req = ScaleStudyRequest(
        p=args.p,
        synth=args.synth,
        anal=args.anal,
        period=args.period,
        sizes=args.sizes,
        tolerances=TolerancesIn(seed=args.seed),
    )
    out = _post(args, "/scale-study", req) if args.server else handlers.study(req)
    if args.out:
        write_text_atomic(args.out, canonical_json(out) + "\n")
        _print_json({"out": args.out, "trend": out["trend"]})
    else:
        _print_json(out)
    return EXIT_OK


def _load_spec_dict(path: str) -> dict:
    if path.endswith(".toml"):
        try:
            import tomllib
        except ImportError:
            import tomli as tomllib
        with open(path, "rb") as fh:
            return tomllib.load(fh)
    import json

    with open(path, "r", encoding="utf-8") as fh:
        return json.load(fh)


def _cmd_sweep(args) -> int:
    raw = _load_spec_dict(args.spec)
    if args.seed is not None:
        raw["seed"] = args.seed
    partial_csv = None
    if args.resume and os.path.exists(args.out):
        with open(args.out, "r", encoding="utf-8") as fh:
            partial_csv = fh.read()
    req = SweepRequest(
        spec=SweepSpecIn(**raw),
        workers=args.workers,
        partial_csv=partial_csv,
        timing=args.timing,
    )
    out = _post(args, "/sweep", req) if args.server else handlers.sweep(req)
    write_text_atomic(args.out, out["csv"])
    _print_json(
        {
            "out": args.out,
            "rows": out["rows"],
            "skipped": out["skipped"],
            "spec_hash": out["spec_hash"],
        }
    )
    return EXIT_OK


def _cmd_report(args) -> int:
    fixed = {}
    for item in args.fix:
        name, sep, value = item.partition("=")
        if not sep:
            raise ValueError(f"--fix expects AXIS=VALUE, got {item!r}")
        fixed[name.strip()] = float(value)
    with open(args.in_path, "r", encoding="utf-8") as fh:
        csv_text = fh.read()
    req = ReportRequest(
        csv=csv_text, x_axis=args.x, y_axis=args.y, metric=args.metric, fixed=fixed
    )
    out = _post(args, "/report", req) if args.server else handlers.report(req)
    import base64

    write_bytes_atomic(args.out, base64.b64decode(out["pgm_base64"]))
    _print_json({"out": args.out, "width": out["width"], "height": out["height"]})
    return EXIT_OK


_COMMANDS = {
    "check": _cmd_check,
    "sweep": _cmd_sweep,
    "scale-study": _cmd_scale_study,
    "oracle": _cmd_oracle,
    "report": _cmd_report,
}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except IncommensurateParameters as exc:
        sys.stderr.write(f"asf-lab: incommensurate parameters: {exc}\n")
        return EXIT_INCOMMENSURATE
    except OSError as exc:
        sys.stderr.write(f"asf-lab: i/o error: {exc}\n")
        return EXIT_IO
    except ValueError as exc:
        sys.stderr.write(f"asf-lab: configuration error: {exc}\n")
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
