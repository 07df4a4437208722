"""``fanstalk`` command-line front end.

Exit status: 0 on success, 1 for usage or input errors, 2 when the
computation finishes but a verdict fails.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import sys

from . import __version__
from .errors import FanstalkError
from .oracle import (
    certify_facet,
    facet_normals_bruteforce,
    minkowski_vertices_bruteforce,
    sample_fan,
)
from .parser import parse_system
from .pipeline import Report, fan_for, ideal, primes_report, resolve, scan_chart
from .polyhedra import fan_to_json, newton_polyhedron
from .fantastack import build_stacky_fan, charts
from .transform import pullback, problematic_primes

SCHEMA = 1
COMMANDS = ("resolve", "ideal", "primes", "fan", "oracle")
ORACLE_CHECKS = ("minkowski", "facets", "sample", "smoothness")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _char(text: str) -> int:
    try:
        p = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"{text!r} is not an integer")
    if p != 0 and (p < 2 or any(p % d == 0 for d in range(2, int(p ** 0.5) + 1))):
        raise argparse.ArgumentTypeError(f"characteristic {p} is neither 0 nor prime")
    return p


def _subset_size(text: str) -> int:
    try:
        k = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"{text!r} is not an integer")
    if not 1 <= k <= 12:
        raise argparse.ArgumentTypeError("max subset size must lie in 1..12")
    return k


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="fanstalk", description="Fantastack resolution data for binomial systems.")
    ap.add_argument("--version", action="version", version=f"fanstalk {__version__}")
    ap.add_argument("command", choices=COMMANDS)
    ap.add_argument("--input", required=True, help="system file ('vars:' line, one binomial per line)")
    ap.add_argument("--char", type=_char, default=0, help="characteristic: 0 or a prime")
    ap.add_argument("--format", choices=("json", "text"), default="json")
    ap.add_argument("--star-subdivide", action="store_true",
                    help="star-subdivide the fan at every ray (simplicial charts)")
    ap.add_argument("--oracle-verify", action="store_true",
                    help="cross-check results with brute-force oracles")
    ap.add_argument("--max-subset-size", type=_subset_size, default=None)
    ap.add_argument("--check", choices=ORACLE_CHECKS + ("all",), default="all",
                    help="which oracle to run for the 'oracle' command")
    return ap


def _oracle(system, args) -> Report:
    failures = []
    data: dict = {"command": "oracle", "char": args.char}
    np_ = newton_polyhedron(system)
    fan = fan_for(system)
    want = ORACLE_CHECKS if args.check == "all" else (args.check,)
    if "minkowski" in want:
        brute = sorted(minkowski_vertices_bruteforce(system))
        agree = brute == list(np_.vertices)
        data["minkowski"] = {"vertices": [list(v) for v in brute], "agrees": agree}
        if not agree:
            failures.append("brute-force vertices differ")
    if "facets" in want:
        brute = sorted(facet_normals_bruteforce(np_))
        agree = brute == list(fan.rays) and all(certify_facet(np_, r) for r in fan.rays)
        data["facets"] = {"normals": [list(v) for v in brute], "agrees": agree}
        if not agree:
            failures.append("brute-force facet normals differ from the fan rays")
    if "sample" in want:
        bad = sample_fan(fan, np_)
        data["sample"] = {"mismatches": [list(w) for w in bad]}
        if bad:
            failures.append("sampled weights disagree with the fan")
    if "smoothness" in want:
        sf = build_stacky_fan(fan)
        pulled = pullback(system, sf)
        bad_primes = problematic_primes(system) if system.pure_members else set()
        qs = [args.char] if args.char else [5, 7]
        scans = []
        for q in qs:
            for chart in charts(sf, system.order):
                if q in bad_primes:
                    scans.append({"q": q, "chart": chart.cone_index, "skipped": "problematic prime"})
                    continue
                bad = scan_chart(pulled, chart, q)
                scans.append({
                    "q": q,
                    "chart": chart.cone_index,
                    "singular_points": None if bad is None else [list(pt) for _, pt in bad],
                })
                if bad:
                    failures.append(f"singular points on chart {chart.cone_index} over F_{q}")
        data["smoothness"] = scans
    data["verdict"] = {"ok": not failures, "failures": failures}
    return Report(data, failures)


def run(args, text: str) -> Report:
    system = parse_system(text)
    if args.command == "resolve":
        return resolve(system, args.char, args.star_subdivide, args.oracle_verify,
                       args.max_subset_size)
    if args.command == "ideal":
        return ideal(system, args.char, args.oracle_verify)
    if args.command == "primes":
        rep = primes_report(system, args.char, args.max_subset_size)
        rep.data = {"command": "primes", **rep.data,
                    "verdict": {"ok": rep.ok, "failures": rep.failures}}
        return rep
    if args.command == "fan":
        fan = fan_for(system, args.star_subdivide)
        np_ = newton_polyhedron(system)
        data = {"command": "fan", **fan_to_json(fan, np_.vertices),
                "verdict": {"ok": True, "failures": []}}
        return Report(data)
    return _oracle(system, args)


def dumps(obj, indent=0) -> str:
    """JSON with scalar-only lists kept on one line."""
    pad, inner = "  " * indent, "  " * (indent + 1)
    if isinstance(obj, dict) and obj:
        body = ",\n".join(f"{inner}{json.dumps(k)}: {dumps(v, indent + 1)}" for k, v in obj.items())
        return "{\n" + body + "\n" + pad + "}"
    if isinstance(obj, list) and obj and not all(_is_scalar(x) for x in obj):
        body = ",\n".join(inner + dumps(x, indent + 1) for x in obj)
        return "[\n" + body + "\n" + pad + "]"
    return json.dumps(obj)


def _is_scalar(x) -> bool:
    return not isinstance(x, (dict, list))


def render_text(data, indent=0) -> str:
    pad = "  " * indent
    lines = []
    if isinstance(data, dict):
        for k, v in data.items():
            if isinstance(v, (dict, list)) and v and not _flat(v):
                lines.append(f"{pad}{k}:")
                lines.append(render_text(v, indent + 1))
            else:
                lines.append(f"{pad}{k}: {_scalar(v)}")
    elif isinstance(data, list):
        for v in data:
            if isinstance(v, (dict, list)) and not _flat(v):
                lines.append(f"{pad}-")
                lines.append(render_text(v, indent + 1))
            else:
                lines.append(f"{pad}- {_scalar(v)}")
    else:
        lines.append(pad + _scalar(data))
    return "\n".join(lines)


def _flat(v) -> bool:
    return isinstance(v, list) and all(not isinstance(x, (dict, list)) or
                                       (isinstance(x, list) and _flat(x)) for x in v)


def _scalar(v) -> str:
    if isinstance(v, list):
        return "[" + ", ".join(_scalar(x) for x in v) + "]"
    if v is None:
        return "-"
    if isinstance(v, bool):
        return "yes" if v else "no"
    return str(v)


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except UsageError as exc:
        print(f"fanstalk: error: {exc}", file=sys.stderr)
        return 1
    try:
        with open(args.input, "rb") as fh:
            raw = fh.read()
        report = run(args, raw.decode("utf-8"))
    except (OSError, UnicodeDecodeError) as exc:
        print(f"fanstalk: cannot read {args.input}: {exc}", file=sys.stderr)
        return 1
    except FanstalkError as exc:
        print(f"fanstalk: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1
    payload = {
        "schema": SCHEMA,
        "version": __version__,
        "input_sha256": hashlib.sha256(raw).hexdigest(),
        **report.data,
    }
    if args.format == "json":
        sys.stdout.write(dumps(payload) + "\n")
    else:
        sys.stdout.write(render_text(payload) + "\n")
    return 0 if report.ok else 2


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
