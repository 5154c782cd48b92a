"""Command-line interface.

Exit codes: 0 on success, 1 on domain errors (one line on stderr),
2 on usage errors.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
from fractions import Fraction
from pathlib import Path
from typing import List, Optional

from . import formats
from .determinant import det_closed_form, det_closed_form_any_center, det_exact, simplex_volume
from .embedding import gram_matrix, path_counts
from .errors import MinfillError
from .oracle import OracleConfig, float_gram_det, simulate_class_frequencies
from .probability import (
    Convention,
    asymptotic_ratio_symmetric_vs_path,
    family_det_three_mustache_path,
    family_det_three_mustache_symmetric,
    family_ratio_law,
    probability_ratio,
    published_asymptotic_ratio,
    published_det_three_mustache_path,
    symmetric_three_mustache_tree,
    topology_probabilities,
)
from .recovery import is_additive, reconstruct_topology, recover_weights
from .topology import (
    emit_newick,
    enumerate_labeled_topologies,
    enumerate_topology_classes,
    mustache_count,
    parse_newick,
)


class Output:
    """What a command produced: a JSON document and a flat table."""

    def __init__(self, doc, rows: List[dict], columns: Optional[List[str]] = None):
        self.doc = doc
        self.rows = rows
        self.columns = columns or (list(rows[0]) if rows else [])


def _n_guard(args, n):
    if n > args.max_n and not args.force:
        raise MinfillError(f"n={n} exceeds --max-n {args.max_n}; pass --force to continue")


def _tree(args, flag="newick", index_flag="class_index"):
    text = getattr(args, flag, None)
    if text:
        if os.path.isfile(text):
            text = Path(text).read_text()
        return parse_newick(text.strip())
    if args.n is None or getattr(args, index_flag, None) is None:
        raise MinfillError(f"give --{flag.replace('_', '-')} or --n with --class-index")
    _n_guard(args, args.n)
    classes = enumerate_topology_classes(args.n)
    idx = getattr(args, index_flag)
    if not 0 <= idx < len(classes):
        raise MinfillError(f"class index {idx} out of range 0..{len(classes) - 1}")
    return classes[idx].representative


def _matrix(args):
    if not args.matrix:
        raise MinfillError("--matrix is required")
    text = sys.stdin.read() if args.matrix == "-" else Path(args.matrix).read_text()
    return formats.read_distance(text)


def cmd_enumerate(args) -> Output:
    _n_guard(args, args.n)
    if args.labeled:
        trees = [emit_newick(t) for t in enumerate_labeled_topologies(args.n)]
        return Output(
            {"n": args.n, "count": len(trees), "topologies": trees},
            [{"index": i, "newick": s} for i, s in enumerate(trees)],
        )
    rows = []
    for i, c in enumerate(enumerate_topology_classes(args.n)):
        rows.append(
            {
                "index": i,
                "newick": emit_newick(c.representative),
                "simm": c.simm,
                "labeled_count": c.labeled_count,
                "mustaches": mustache_count(c.representative),
            }
        )
    doc = {"n": args.n, "classes": rows, "labeled_total": sum(r["labeled_count"] for r in rows)}
    return Output(doc, rows)


def cmd_det(args) -> Output:
    t = _tree(args)
    direct = det_exact(gram_matrix(t))
    closed = det_closed_form_any_center(t, verify=args.all_centers)
    vol = simplex_volume(t)
    doc = {
        "newick": emit_newick(t),
        "n": t.n,
        "m": t.m,
        "q": list(path_counts(t)),
        "det": formats.frac_str(direct),
        "det_closed_form": formats.frac_str(closed),
        "agree": direct == closed,
        "det_float": float(direct),
        "det_numeric": float_gram_det(t),
        "volume_squared": formats.frac_str(vol.volume_squared),
        "volume": str(vol.volume(30)),
    }
    if args.all_centers:
        doc["centers"] = {
            str(c): formats.frac_str(det_closed_form(t, c)) for c in t.internal_vertices
        }
    row = dict(doc)
    row["det"] = formats.format_factored(direct) if args.format == "table" else doc["det"]
    row["det_closed_form"] = (
        formats.format_factored(closed) if args.format == "table" else doc["det_closed_form"]
    )
    row.pop("centers", None)
    row["q"] = " ".join(map(str, doc["q"]))
    rows = [{"field": k, "value": v} for k, v in row.items()]
    return Output(doc, rows)


def _prob_str(p):
    return formats.frac_str(p) if isinstance(p, Fraction) else f"{p:.30g}"


def cmd_prob(args) -> Output:
    _n_guard(args, args.n)
    reports = topology_probabilities(args.n, args.convention, max_n=max(args.max_n, args.n))
    doc = [formats.report_to_dict(r) for r in reports]
    for d, r in zip(doc, reports):
        d["probability"] = _prob_str(r.probability)
    rows = [
        {
            "index": i,
            "newick": d["newick"],
            "simm": d["simm"],
            "labeled_count": d["labeled_count"],
            "det": formats.format_factored(r.det) if args.format == "table" else d["det"],
            "probability": d["probability"],
        }
        for i, (d, r) in enumerate(zip(doc, reports))
    ]
    return Output(doc, rows)


def cmd_ratio(args) -> Output:
    t1 = _tree(args, "newick", "class_index")
    t2 = _tree(args, "newick2", "class_index2")
    conv = Convention.parse(args.convention)
    value = probability_ratio(t1, t2, conv)
    doc = {
        "first": emit_newick(t1),
        "second": emit_newick(t2),
        "convention": conv.value,
        "ratio": str(value),
        "ratio_float": float(value),
    }
    return Output(doc, [doc])


def cmd_recover(args) -> Output:
    t = _tree(args)
    rho = _matrix(args)
    w = recover_weights(t, rho)
    doc = formats.weights_to_dict(w)
    rows = [
        {"edge": i, "u": u, "v": v, "weight": formats.frac_str(x)}
        for i, ((u, v), x) in enumerate(zip(t.edges, w.weights))
    ]
    return Output(doc, rows)


def cmd_reconstruct(args) -> Output:
    rho = _matrix(args)
    t, w = reconstruct_topology(rho)
    doc = formats.weights_to_dict(w)
    rows = [
        {"edge": i, "u": u, "v": v, "weight": formats.frac_str(x)}
        for i, ((u, v), x) in enumerate(zip(t.edges, w.weights))
    ]
    return Output(doc, rows)


def cmd_check_additive(args) -> Output:
    report = is_additive(_matrix(args))
    doc = {"is_additive": report.is_additive, "witness": list(report.witness) if report.witness else None}
    return Output(doc, [{"is_additive": doc["is_additive"], "witness": report.witness or ""}])


def cmd_family(args) -> Output:
    n = args.n
    rows = []
    doc: dict = {"n": n, "path": []}
    ks = [args.k] if args.k is not None else list(range(2, n - 3))
    for k in ks:
        fd = family_det_three_mustache_path(n, k)
        entry = {
            "k": k,
            "published": formats.frac_str(fd.published),
            "published_squared_factorial": formats.frac_str(
                published_det_three_mustache_path(n, k, squared_factorial=True)
            ),
            "constructed": formats.frac_str(fd.constructed),
            "constructed_over_published": formats.frac_str(fd.discrepancy),
            "ratio_to_k2": formats.frac_str(
                fd.constructed / family_det_three_mustache_path(n, 2).constructed
            ),
            "ratio_law": formats.frac_str(family_ratio_law(n, k, 2)),
        }
        doc["path"].append(entry)
        rows.append(entry)
    if n % 2 == 0:
        sym = det_closed_form_any_center(symmetric_three_mustache_tree(n))
        doc["symmetric"] = {
            "published": formats.frac_str(family_det_three_mustache_symmetric(n)),
            "constructed": formats.frac_str(sym),
        }
        if n >= 8:
            doc["symmetric_over_k2"] = formats.frac_str(asymptotic_ratio_symmetric_vs_path(n))
            doc["published_symmetric_over_k2"] = formats.frac_str(published_asymptotic_ratio(n))
    return Output(doc, rows)


def cmd_oracle(args) -> Output:
    cfg = OracleConfig(seed=args.seed, samples=args.samples, round_trip_stride=args.stride)
    res = simulate_class_frequencies(args.n, args.convention, cfg)
    doc = res.to_dict()
    ses = res.standard_errors()
    rows = [
        {
            "shape": s,
            "count": c,
            "frequency": f"{f:.6f}",
            "analytic": f"{p:.6f}",
            "z": f"{(f - p) / se:.3f}" if se else "0",
        }
        for s, c, f, p, se in zip(res.shapes, res.counts, res.frequencies, res.analytic, ses)
    ]
    return Output(doc, rows)


COMMANDS = {
    "enumerate": cmd_enumerate,
    "det": cmd_det,
    "prob": cmd_prob,
    "ratio": cmd_ratio,
    "recover": cmd_recover,
    "reconstruct": cmd_reconstruct,
    "check-additive": cmd_check_additive,
    "family": cmd_family,
    "oracle": cmd_oracle,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=["json", "csv", "table"], default=None)
    common.add_argument("--out", help="write output here instead of stdout")
    common.add_argument("--max-n", type=int, default=10)
    common.add_argument("--force", action="store_true", help="allow n above --max-n")

    conv = argparse.ArgumentParser(add_help=False)
    conv.add_argument("--convention", choices=[c.value for c in Convention], default="paper-det")

    tree = argparse.ArgumentParser(add_help=False)
    tree.add_argument("--newick", help="Newick string or file")
    tree.add_argument("--n", type=int)
    tree.add_argument("--class-index", type=int)

    parser = argparse.ArgumentParser(
        prog="minfill",
        description="Topology probabilities of minimal fillings of additive metric spaces.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("enumerate", parents=[common], help="list topology classes")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--labeled", action="store_true", help="list every labeled tree")

    p = sub.add_parser("det", parents=[common, tree], help="Gram determinant of one tree")
    p.add_argument("--all-centers", action="store_true")

    p = sub.add_parser("prob", parents=[common, conv], help="class probabilities")
    p.add_argument("--n", type=int, required=True)

    p = sub.add_parser("ratio", parents=[common, conv, tree], help="probability ratio of two trees")
    p.add_argument("--newick2")
    p.add_argument("--class-index2", type=int)

    p = sub.add_parser("recover", parents=[common, tree], help="edge weights from a matrix")
    p.add_argument("--matrix", help="CSV or JSON file, '-' for stdin")

    p = sub.add_parser("reconstruct", parents=[common], help="tree and weights from a matrix")
    p.add_argument("--matrix", required=True)

    p = sub.add_parser("check-additive", parents=[common], help="four-point test")
    p.add_argument("--matrix", required=True)

    p = sub.add_parser("family", parents=[common], help="three-mustache family determinants")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--k", type=int)

    p = sub.add_parser("oracle", parents=[common, conv], help="Monte-Carlo simulation")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--samples", type=int, default=100_000)
    p.add_argument("--stride", type=int, default=50, help="reconstruct every k-th sample")
    return parser


def _render_table(out: Output, color: bool) -> str:
    cols = out.columns
    cells = [[str(r.get(c, "")) for c in cols] for r in out.rows]
    widths = [max([len(c)] + [len(row[i]) for row in cells]) for i, c in enumerate(cols)]
    head = "  ".join(c.ljust(w) for c, w in zip(cols, widths)).rstrip()
    if color:
        head = f"\033[1m{head}\033[0m"
    lines = [head]
    lines += ["  ".join(v.ljust(w) for v, w in zip(row, widths)).rstrip() for row in cells]
    return "\n".join(lines) + "\n"


def _render_csv(out: Output) -> str:
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=out.columns, lineterminator="\n", extrasaction="ignore")
    writer.writeheader()
    for r in out.rows:
        writer.writerow(r)
    return buf.getvalue()


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    to_terminal = args.out is None and sys.stdout.isatty()
    if args.format is None:
        args.format = "table" if to_terminal else "json"
    try:
        out = COMMANDS[args.command](args)
    except (MinfillError, OSError, AssertionError) as exc:
        msg = " ".join(str(exc).split())
        print(f"error: {type(exc).__name__}: {msg}", file=sys.stderr)
        return 1
    if args.format == "json":
        text = json.dumps(out.doc, indent=2) + "\n"
    elif args.format == "csv":
        text = _render_csv(out)
    else:
        text = _render_table(out, color=to_terminal and "NO_COLOR" not in os.environ)
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)
    return 0


if __name__ == "__main__":
    sys.exit(main())
