"""Command-line interface.

Subcommands: membership, volume, ratios, polytope, examples, sample-quantum,
distance.  Exit codes: 0 success, 1 computation error, 2 usage error.
Outputs contain no timestamps, so identical invocations produce identical
bytes.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys

import numpy as np

from . import polytopes, quantum, toggles, volumes
from .regions import (
    DEFAULT_TOLERANCE,
    RegionId,
    chsh_value,
    in_local,
    in_quantum_arcsin,
    membership_profile,
)

_REGION_BY_LETTER = {r.value: r for r in RegionId}

_POINT_KEYS = ("c00", "c01", "c10", "c11")


def _default_workers() -> int:
    raw = os.environ.get("BELLVOL_WORKERS", "1")
    try:
        value = int(raw)
    except ValueError:
        value = 1
    return max(1, value)


def _parse_point(text: str, parser: argparse.ArgumentParser) -> tuple[float, ...]:
    """Accept '{"c00": ...}' JSON or inline 'c00,c01,c10,c11'."""
    text = text.strip()
    if text.startswith("{"):
        try:
            obj = json.loads(text)
        except json.JSONDecodeError as exc:
            parser.error(f"malformed point JSON: {exc}")
        if not isinstance(obj, dict):
            parser.error("point JSON must be an object")
        unknown = sorted(set(obj) - set(_POINT_KEYS))
        if unknown:
            parser.error(f"unknown point field '{unknown[0]}'")
        vals = []
        for key in _POINT_KEYS:
            if key not in obj:
                parser.error(f"point JSON missing field '{key}'")
            v = obj[key]
            if isinstance(v, bool) or not isinstance(v, (int, float)):
                parser.error(f"point field '{key}' is not a number")
            vals.append(float(v))
        return tuple(vals)
    parts = text.split(",")
    if len(parts) != 4:
        parser.error("inline point must be 'c00,c01,c10,c11'")
    vals = []
    for key, part in zip(_POINT_KEYS, parts):
        try:
            vals.append(float(part))
        except ValueError:
            parser.error(f"point field '{key}' is not a number: {part!r}")
    return tuple(vals)


def _emit_table(rows: list[dict], headers: list[str]) -> str:
    cells = [[_fmt(r.get(h)) for h in headers] for r in rows]
    widths = [max(len(h), *(len(c[i]) for c in cells)) if cells else len(h)
              for i, h in enumerate(headers)]
    out = ["  ".join(h.ljust(w) for h, w in zip(headers, widths)).rstrip()]
    for c in cells:
        out.append("  ".join(v.ljust(w) for v, w in zip(c, widths)).rstrip())
    return "\n".join(out)


def _emit_csv(rows: list[dict], headers: list[str]) -> str:
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=headers, lineterminator="\n")
    writer.writeheader()
    for r in rows:
        writer.writerow({h: _fmt(r.get(h)) for h in headers})
    return buf.getvalue().rstrip("\n")


def _fmt(v) -> str:
    if v is None:
        return ""
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return format(v, ".12g")
    return str(v)


def _emit(args, rows: list[dict], headers: list[str], json_obj) -> None:
    if args.format == "json":
        print(json.dumps(json_obj, indent=2))
    elif args.format == "csv":
        print(_emit_csv(rows, headers))
    else:
        print(_emit_table(rows, headers))


# -- membership --------------------------------------------------------------

def _cmd_membership(args, parser):
    point = _parse_point(args.point, parser)
    profile = membership_profile(point, tol=args.tolerance)
    rows = []
    for rid, res in profile.regions().items():
        char = res.characterization.value if res.characterization else ""
        rows.append({"region": rid.value, "characterization": char,
                     "inside": res.inside, "margin": res.margin})
    for ch, res in profile.quantum().items():
        if ch.value == "arcsin":
            continue  # already listed as the canonical Q row
        rows.append({"region": "Q", "characterization": ch.value,
                     "inside": res.inside, "margin": res.margin})
    json_obj = {"point": dict(zip(_POINT_KEYS, point)),
                "profile": profile.as_dict()}
    _emit(args, rows, ["region", "characterization", "inside", "margin"], json_obj)
    return 0


# -- volume ------------------------------------------------------------------

def _cmd_volume(args, parser):
    region = _REGION_BY_LETTER[args.region]
    if args.method == "mc":
        cfg = volumes.EstimatorConfig(sample_count=args.n, seed=args.seed,
                                      worker_count=args.workers,
                                      batch_size=args.batch_size)
        est = volumes.mc_volume(region, cfg)
        record = est.as_json_record()
    elif args.method == "quadrature":
        est = volumes.quadrature_volume(region, abs_tol=args.abs_tol)
        record = est.as_json_record()
    else:  # exact
        if region not in (RegionId.LOCAL_C, RegionId.NO_SIGNALING_L):
            parser.error(f"--method exact supports regions C and L, not"
                         f" {region.value}")
        frac = volumes.exact_region_volume(region)
        est = volumes.VolumeEstimate(region=region.value, method="exact",
                                     value=float(frac), std_error=0.0)
        record = est.as_json_record()
        record["exact"] = str(frac)
    _emit(args, [record], ["region", "method", "value", "std_error", "n", "seed"],
          record)
    return 0


# -- ratios ------------------------------------------------------------------

def _cmd_ratios(args, parser):
    cfg = volumes.EstimatorConfig(sample_count=args.n, seed=args.seed,
                                  worker_count=args.workers)
    report = volumes.headline_report(cfg)
    rows = []
    for letter, rec in report["volumes"].items():
        rows.append({"kind": "volume", "name": f"V_{letter}",
                     "value": rec["value"], "std_error": rec["std_error"],
                     "analytic": rec["analytic"],
                     "deviation_sigmas": rec["deviation_sigmas"]})
    for name, rec in report["ratios"].items():
        rows.append({"kind": "ratio", "name": name, "value": rec["value"],
                     "std_error": rec["std_error"], "analytic": rec["analytic"],
                     "deviation_sigmas": rec["deviation_sigmas"]})
    for name, rec in report["excesses"].items():
        rows.append({"kind": "excess", "name": name, "value": rec["value"],
                     "std_error": rec["std_error"], "analytic": None,
                     "deviation_sigmas": None})
    _emit(args, rows,
          ["kind", "name", "value", "std_error", "analytic", "deviation_sigmas"],
          report)
    return 0


# -- polytope ----------------------------------------------------------------

def _polytope_for(which: str) -> polytopes.RationalPolytope:
    if which == "local":
        return polytopes.local_polytope_v()
    if which == "ns":
        return polytopes.ns_polytope_h()
    return polytopes.correlation_polytope_C()


def _cmd_polytope(args, parser):
    poly = _polytope_for(args.which)
    if args.task == "vertices":
        if poly.vertices is None:
            poly = polytopes.enumerate_vertices(poly)
        sys.stdout.write(poly.to_text("V"))
        return 0
    if args.task == "facets":
        if poly.halfspaces is None:
            poly = polytopes.enumerate_facets(poly)
        sys.stdout.write(poly.to_text("H"))
        return 0
    if args.task == "counts":
        if poly.vertices is None:
            poly = polytopes.enumerate_vertices(poly)
        if poly.halfspaces is None:
            poly = polytopes.enumerate_facets(poly)
        print(f"vertices: {len(poly.vertices)}, facets: {len(poly.halfspaces)}")
        return 0
    # volume
    if poly.dim > 4:
        parser.error(f"--task volume needs dimension <= 4; '{args.which}'"
                     f" has dimension {poly.dim}")
    if poly.vertices is None:
        poly = polytopes.enumerate_vertices(poly)
    vol = polytopes.exact_volume(poly)
    print(f"volume: {vol} ({float(vol):.12g})")
    return 0


# -- examples ----------------------------------------------------------------

def _table_rows(table: polytopes.JointProbabilityTable) -> list[dict]:
    rows = []
    for i, j in ((0, 0), (0, 1), (1, 0), (1, 1)):
        row = {"i": i, "j": j}
        for a, label_a in ((1, "+"), (-1, "-")):
            for b, label_b in ((1, "+"), (-1, "-")):
                row[label_a + label_b] = str(table.entry(i, j, a, b))
        rows.append(row)
    return rows


def _cmd_examples(args, parser):
    table = polytopes.pr_box() if args.which == "pr-box" \
        else polytopes.signaling_example()
    rows = _table_rows(table)
    json_obj = {"which": args.which,
                "settings": [{"i": r["i"], "j": r["j"],
                              "p": {k: r[k] for k in ("++", "+-", "-+", "--")}}
                             for r in rows]}
    checks = []
    ns_ok, discrepancy = polytopes.check_no_signaling(table)
    point = [float(sum(a * b * table.entry(i, j, a, b)
                       for a in (-1, 1) for b in (-1, 1)))
             for i, j in ((0, 0), (0, 1), (1, 0), (1, 1))]
    if args.which == "pr-box":
        behavior = polytopes.behavior_from_table(table)
        checks.append(("no-signaling holds", ns_ok))
        checks.append(("marginals all zero",
                       all(behavior.as_vector()[k] == 0 for k in range(4))))
        checks.append(("correlations (1, 1, 1, -1)",
                       tuple(behavior.as_vector()[4:]) == (1, 1, 1, -1)))
        checks.append(("CHSH functional at (1,1) equals 4",
                       abs(chsh_value(point, 1, 1) - 4.0) < 1e-12))
        checks.append(("outside the local set",
                       not in_local(point).inside))
        checks.append(("outside the quantum set",
                       not in_quantum_arcsin(point).inside))
    else:
        checks.append(("no-signaling violated", not ns_ok))
        checks.append(("max marginal discrepancy 1", discrepancy == 1))
        checks.append(("projection (0, 0, 0, 0)",
                       point == [0.0, 0.0, 0.0, 0.0]))
        checks.append(("projection satisfies all CHSH inequalities",
                       in_local(point).inside))
    json_obj["projection"] = dict(zip(_POINT_KEYS, point))
    if args.verify:
        json_obj["checks"] = {name: bool(ok) for name, ok in checks}
    if args.format == "json":
        print(json.dumps(json_obj, indent=2))
    else:
        headers = ["i", "j", "++", "+-", "-+", "--"]
        print(_emit_csv(rows, headers) if args.format == "csv"
              else _emit_table(rows, headers))
        if args.verify:
            for name, ok in checks:
                print(f"{'PASS' if ok else 'FAIL'}  {name}")
    if args.verify and not all(ok for _, ok in checks):
        return 1
    return 0


# -- sample-quantum ----------------------------------------------------------

def _cmd_sample_quantum(args, parser):
    key = np.array([args.seed, 0], dtype=np.uint64)
    rng = np.random.Generator(np.random.Philox(key=key))
    points = quantum.sample_quantum_points(args.n, rng)
    for row in points:
        profile = membership_profile(row)
        rec = dict(zip(_POINT_KEYS, (float(v) for v in row)))
        rec["profile"] = profile.as_dict()
        print(json.dumps(rec))
    return 0


# -- distance ----------------------------------------------------------------

def _cmd_distance(args, parser):
    p = _parse_point(getattr(args, "from"), parser)
    q = _parse_point(args.to, parser)
    dist = toggles.toggle_distance(p, q)
    obj = {"from": dict(zip(_POINT_KEYS, p)), "to": dict(zip(_POINT_KEYS, q))}
    obj.update(dist.as_dict())
    print(json.dumps(obj, indent=2))
    return 0


# -- parser ------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="bellvol",
        description="Memberships, volumes and volume ratios of the nested"
                    " two-party correlation sets.")
    sub = parser.add_subparsers(dest="command", required=True)

    def add_format(p):
        p.add_argument("--format", choices=("table", "json", "csv"),
                       default="table")

    p = sub.add_parser("membership", help="membership profile of one point")
    p.add_argument("--point", required=True,
                   help="JSON object with c00..c11 or inline 'c00,c01,c10,c11'")
    p.add_argument("--tolerance", type=float, default=DEFAULT_TOLERANCE)
    add_format(p)
    p.set_defaults(func=_cmd_membership)

    p = sub.add_parser("volume", help="volume of one region")
    p.add_argument("--region", required=True, choices=sorted(_REGION_BY_LETTER))
    p.add_argument("--method", choices=("mc", "quadrature", "exact"),
                   default="mc")
    p.add_argument("--n", type=int, default=10_000_000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--workers", type=int, default=_default_workers())
    p.add_argument("--batch-size", type=int, default=None)
    p.add_argument("--abs-tol", type=float, default=1e-6)
    add_format(p)
    p.set_defaults(func=_cmd_volume)

    p = sub.add_parser("ratios", help="headline volume/ratio table")
    p.add_argument("--n", type=int, default=10_000_000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--workers", type=int, default=_default_workers())
    add_format(p)
    p.set_defaults(func=_cmd_ratios)

    p = sub.add_parser("polytope", help="vertex/facet enumeration and volume")
    p.add_argument("--which", required=True, choices=("local", "ns", "corrC"))
    p.add_argument("--task", required=True,
                   choices=("vertices", "facets", "counts", "volume"))
    p.set_defaults(func=_cmd_polytope)

    p = sub.add_parser("examples", help="reference probability tables")
    p.add_argument("--which", required=True, choices=("pr-box", "signaling"))
    p.add_argument("--verify", action="store_true")
    add_format(p)
    p.set_defaults(func=_cmd_examples)

    p = sub.add_parser("sample-quantum",
                       help="sample quantum points as JSON lines")
    p.add_argument("--n", type=int, default=100)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=_cmd_sample_quantum)

    p = sub.add_parser("distance", help="toggle distance between two points")
    p.add_argument("--from", required=True, dest="from")
    p.add_argument("--to", required=True)
    p.set_defaults(func=_cmd_distance)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args, parser)
    except (volumes.ToleranceNotMet, volumes.DegenerateDenominator,
            polytopes.PolytopeError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


def entrypoint() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entrypoint()
