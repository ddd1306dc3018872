"""Command-line front end.

Every subcommand writes one JSON document (schema 1) to --output or stdout.
``render`` writes SVG (and optionally PNG); ``report`` writes a CSV table of
per-depth statistics with matplotlib figures next to it.

Exit codes: 0 success, 1 bad input, 2 invariant violation, 3 resource limit.
"""

from __future__ import annotations

import argparse
import csv
import io
import os
import sys
from fractions import Fraction
from typing import List, Optional

from . import jsonio
from .errors import (
    ConstructionError,
    DomainError,
    InvariantViolation,
    ResourceError,
    UsageError,
)
from .qfield import format_rational, parse_rational

EXIT_OK, EXIT_INPUT, EXIT_INVARIANT, EXIT_RESOURCE = 0, 1, 2, 3


def _params(args):
    from .lozi import make_params

    return make_params(parse_rational(args.a), parse_rational(args.b))


def _header(args, command: str) -> dict:
    return {"schema": jsonio.SCHEMA, "command": command,
            "params": {"a": format_rational(parse_rational(args.a)), "b": format_rational(parse_rational(args.b))}}


def _depth(v: str) -> int:
    try:
        n = int(v)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {v!r}") from None
    if n < 0:
        raise argparse.ArgumentTypeError("depth must be >= 0")
    return n


def _float_param(text: str) -> float:
    try:
        return float(Fraction(text))
    except (ValueError, ZeroDivisionError):
        raise UsageError(f"not a number: {text!r}") from None


# -- commands ------------------------------------------------------------------------


def cmd_params(args) -> dict:
    from .lozi import check_trapping, eigen_right, fixed_points, in_misiurewicz

    doc = _header(args, "params")
    a, b = parse_rational(args.a), parse_rational(args.b)
    doc["in_misiurewicz"] = in_misiurewicz(a, b)
    p = _params(args)
    tr = check_trapping(p)
    doc["trapping"] = tr.ok
    if not tr.ok:
        doc["trapping_witness"] = {"image": jsonio.point(tr.witness), "source": jsonio.point(tr.source)}
    doc["D"] = format_rational(p.D)
    for name in ("X", "Y", "Z", "Z1", "Z2", "V0"):
        pt = getattr(p, name)
        doc[name] = jsonio.point(pt)
        doc[name + "_approx"] = jsonio.point_approx(pt)
    doc["fixed_points"] = [jsonio.point(q) for q in fixed_points(p)]
    ls, lu = eigen_right(p)
    doc["eigenvalues_at_X"] = {"stable": ls.to_text(), "unstable": lu.to_text(),
                               "stable_approx": jsonio._float(ls.to_float()),
                               "unstable_approx": jsonio._float(lu.to_float())}
    doc["jacobian_det"] = format_rational(-p.b)
    return doc


def cmd_manifold(args) -> dict:
    from .manifold import grow_stable, grow_unstable

    p = _params(args)
    doc = _header(args, "manifold")
    S = grow_stable(p, args.stable_depth, args.budget)
    U = grow_unstable(p, args.unstable_depth, args.budget)
    doc["stable"] = {"depth": S.depth, "n_vertices": len(S.polyline), "prefix_lengths": S.prefix_lengths,
                     "polyline": jsonio.polyline(S.polyline), "provenance": S.provenance}
    b1, b2 = U.branches
    doc["unstable"] = {"depth": U.depth, "branch_Z": jsonio.polyline(b1), "branch_Z1": jsonio.polyline(b2),
                       "n_vertices": len(U.vertices())}
    return doc


def cmd_vpoints(args) -> dict:
    from .manifold import basin_anchors, find_v_points, grow_stable

    p = _params(args)
    doc = _header(args, "vpoints")
    S = grow_stable(p, args.depth, args.budget)
    recs = find_v_points(p, S)
    doc["depth"] = args.depth
    doc["v_points"] = [{"point": jsonio.point(r.point), "index": r.index, "first_axis_hit": r.first_axis_hit,
                        "level": r.level, "basic_status": r.basic_status, "axis_hits": list(r.hits),
                        "multiple_axis_hits": len(r.hits) > 1} for r in recs]
    ba = basin_anchors(p, 1)
    doc["basin"] = {"M": jsonio.point(ba.M), "N": jsonio.point(ba.N), "M_minus1": jsonio.point(ba.M_pullbacks[0]),
                    "M_approx": jsonio.point_approx(ba.M), "N_approx": jsonio.point_approx(ba.N)}
    return doc


def _arc_doc(a) -> dict:
    return {"id": a.id, "c": a.c, "c_transversal_only": a.c_transversal, "depth_created": a.depth_created,
            "polyline": jsonio.polyline(a.polyline),
            "interior_touches": [{"point": jsonio.point(t.point), "kind": t.kind, "grazing": t.grazing}
                                 for t in a.interior_touches]}


def cmd_gamma(args) -> dict:
    from .treemodel import gamma_arcs

    p = _params(args)
    fam = gamma_arcs(p, args.depth, budget=args.budget)
    doc = _header(args, "gamma")
    doc["depth"] = args.depth
    doc["arcs"] = [_arc_doc(a) for a in fam.arcs]
    doc["incomplete_components"] = fam.incomplete
    return doc


def _node(n) -> str:
    return f"{n[0]}{n[1]}"


def cmd_tree(args) -> dict:
    from .treemodel import build_tree

    p = _params(args)
    tree = build_tree(p, args.depth, budget=args.budget)
    ok, info = tree.tree_check()
    doc = _header(args, "tree")
    doc["depth"] = args.depth
    doc["nodes"] = [{"id": _node(n), "degree": tree.degree(n)} for n in tree.nodes]
    doc["edges"] = sorted([_node(u), _node(v)] for u in tree.nodes for v in tree.adj[u] if u[0] == "a")
    doc["is_tree"] = ok
    doc["check"] = info
    doc["euler"] = list(tree.family.subdivision.euler)
    return doc


def cmd_census(args) -> dict:
    from .treemodel import branch_census

    p = _params(args)
    from .treemodel import build_tree

    c = branch_census(p, args.depth, tree=build_tree(p, args.depth, budget=args.budget))
    doc = _header(args, "census")
    doc["depth"] = c.depth
    doc["histogram"] = {str(k): v for k, v in c.histogram.items()}
    doc["histogram_transversal_only"] = {str(k): v for k, v in c.histogram_transversal_only.items()}
    doc["face_histogram"] = {str(k): v for k, v in c.face_histogram.items()}
    doc["min_order"] = c.min_order
    doc["max_order"] = c.max_order
    doc["n_arcs"] = c.n_arcs
    doc["n_faces"] = c.n_faces
    doc["orders_are_lower_bounds"] = True
    return doc


def cmd_stems(args) -> dict:
    from .treemodel import build_tree, stems_and_levels

    p = _params(args)
    r = stems_and_levels(p, args.depth, tree=build_tree(p, args.depth, budget=args.budget))
    doc = _header(args, "stems")
    doc["depth"] = r.depth
    doc["stems"] = [{"level": s.level, "members": s.members, "anchor": None if s.anchor is None else _node(s.anchor),
                     "start": s.start, "nodes": [_node(n) for n in s.nodes]} for s in r.stems]
    doc["branches"] = [{"node": _node(b.node), "order": b.order, "level": b.level} for b in r.branches]
    doc["shared"] = [{"level": k, "p": pi, "node": _node(n)} for k, pi, n in r.shared]
    doc["unresolved"] = [{"level": u.level, "p": u.index, "reason": u.reason} for u in r.unresolved]
    doc["b0_is_B0_cap_B1"] = r.b0_check
    doc["interleaving_violations"] = [[_node(u), _node(v)] for u, v in r.interleaving_violations]
    return doc


def cmd_henon(args) -> dict:
    import numpy as np

    from .henon import count_crossings, henon, henon_params, trace_stable, trace_unstable

    a, b = _float_param(args.a), _float_param(args.b)
    hp = henon_params(a, b)
    U = trace_unstable(hp, args.budget_arclength, tol=args.tol)
    S = trace_stable(hp, args.budget_arclength, tol=args.tol, side=-1)
    res = float(np.hypot(*np.subtract(henon(a, b, hp.P), hp.P)))
    doc = {"schema": jsonio.SCHEMA, "command": "henon", "params": {"a": args.a, "b": args.b},
           "P_approx": list(hp.P), "fixed_point_residual_approx": res,
           "eigenvalues_approx": list(hp.eigenvalues),
           "unstable": {"n_points": len(U.points), "arclength_approx": U.arclength, "truncated": U.truncated},
           "stable": {"n_points": len(S.points), "arclength_approx": S.arclength, "truncated": S.truncated},
           "crossings": count_crossings(U.points, S.points)}
    if args.svg:
        from .render import henon_scene, scene_to_svg

        U2 = trace_unstable(hp, args.budget_arclength, tol=args.tol, side=-1)
        box = (-1.5, -0.5, 1.5, 0.5)
        with open(args.svg, "w", encoding="utf-8") as fh:
            fh.write(scene_to_svg(henon_scene([U.points, U2.points], [S.points], hp.P, box)))
        doc["svg"] = os.path.basename(args.svg)
    return doc


def cmd_render(args) -> dict:
    from .render import lozi_scene, scene_to_png, scene_to_svg

    p = _params(args)
    scene = lozi_scene(p, args.stable_depth, args.unstable_depth, region_depth=args.region_depth, budget=args.budget)
    svg = scene_to_svg(scene)
    with open(args.output_svg, "w", encoding="utf-8") as fh:
        fh.write(svg)
    doc = _header(args, "render")
    doc["svg"] = os.path.basename(args.output_svg)
    doc["layers"] = {l.role: sum(len(i) for i in l.items) for l in scene.layers}
    doc["viewport_approx"] = list(scene.viewport)
    if args.png:
        scene_to_png(scene, args.png)
        doc["png"] = os.path.basename(args.png)
    return doc


REPORT_COLUMNS = ["depth", "stable_vertices", "arcs", "faces", "branch_faces", "branch_arcs", "max_order",
                  "max_hops_to_branch", "max_face_diameter", "T_components", "T_max_diameter",
                  "unstable_side_length"]


def cmd_report(args) -> dict:
    from .render import lozi_scene, plot_series, scene_to_png
    from .treemodel import T_polygon, branch_census, build_tree

    p = _params(args)
    os.makedirs(args.outdir, exist_ok=True)
    rows = []
    for n in range(args.min_depth, args.max_depth + 1):
        tree = build_tree(p, n, budget=args.budget)
        c = branch_census(p, n, tree=tree)
        T = T_polygon(p, n)
        A, X = T.unstable_boundary()
        orders = list(c.face_histogram) + list(c.histogram)
        rows.append({
            "depth": n,
            "stable_vertices": len(tree.family.stable.polyline),
            "arcs": c.n_arcs,
            "faces": c.n_faces,
            "branch_faces": sum(c.face_histogram.values()),
            "branch_arcs": sum(c.histogram.values()),
            "max_order": max(orders) if orders else "",
            "max_hops_to_branch": tree.max_distance_to_branch() if tree.max_distance_to_branch() is not None else "",
            "max_face_diameter": f"{tree.max_face_diameter():.9f}",
            "T_components": len(T.components),
            "T_max_diameter": f"{T.max_diameter:.9f}",
            "unstable_side_length": f"{((A.x - X.x).to_float() ** 2 + (A.y - X.y).to_float() ** 2) ** 0.5:.9e}",
        })
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=REPORT_COLUMNS, lineterminator="\n")
    w.writeheader()
    w.writerows(rows)
    csv_path = os.path.join(args.outdir, "report.csv")
    with open(csv_path, "w", encoding="utf-8", newline="") as fh:
        fh.write(buf.getvalue())
    depths = [r["depth"] for r in rows]
    plot_series(os.path.join(args.outdir, "depth_stats.png"), depths,
                {"arcs": [r["arcs"] for r in rows], "branch faces": [r["branch_faces"] for r in rows],
                 "T components": [r["T_components"] for r in rows]},
                "depth", "finite tree statistics")
    scene = lozi_scene(p, args.max_depth, args.max_depth, region_depth=min(args.max_depth, 6), budget=args.budget)
    scene_to_png(scene, os.path.join(args.outdir, "manifolds.png"))
    doc = _header(args, "report")
    doc["files"] = ["report.csv", "depth_stats.png", "manifolds.png"]
    doc["rows"] = len(rows)
    return doc


# -- parser ---------------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="lozitree", description="Exact Lozi manifold and tree-model computations.")
    sub = ap.add_subparsers(dest="command", required=True)

    def common(sp, budget=True):
        sp.add_argument("--a", required=True, help="parameter a as p/q")
        sp.add_argument("--b", required=True, help="parameter b as p/q")
        sp.add_argument("-o", "--output", help="JSON output path (default: stdout)")
        if budget:
            sp.add_argument("--budget", type=int, default=None,
                            help="vertex budget (default: $LOZITREE_BUDGET or 10^6)")

    sp = sub.add_parser("params", help="derived points, Misiurewicz test, trapping check")
    common(sp, budget=False)
    sp.set_defaults(func=cmd_params)

    sp = sub.add_parser("manifold", help="stable and unstable polylines")
    common(sp)
    sp.add_argument("--stable-depth", type=_depth, default=4)
    sp.add_argument("--unstable-depth", type=_depth, default=4)
    sp.set_defaults(func=cmd_manifold)

    for name, func, helptext in (("vpoints", cmd_vpoints, "V-points with levels"),
                                 ("gamma", cmd_gamma, "arcs of the stable polyline inside Delta"),
                                 ("tree", cmd_tree, "face/arc incidence tree"),
                                 ("census", cmd_census, "branch order histogram"),
                                 ("stems", cmd_stems, "stems and branch levels")):
        sp = sub.add_parser(name, help=helptext)
        common(sp)
        sp.add_argument("--depth", type=_depth, required=True)
        sp.set_defaults(func=func)

    sp = sub.add_parser("henon", help="numeric Henon fixed point and manifold traces")
    sp.add_argument("--a", default="7/5")
    sp.add_argument("--b", default="3/10")
    sp.add_argument("--budget-arclength", type=float, default=10.0)
    sp.add_argument("--tol", type=float, default=1e-5)
    sp.add_argument("--svg", help="also write an SVG of the traces")
    sp.add_argument("-o", "--output")
    sp.set_defaults(func=cmd_henon)

    sp = sub.add_parser("render", help="SVG figure of Delta and the manifolds")
    common(sp)
    sp.add_argument("--stable-depth", type=_depth, default=10)
    sp.add_argument("--unstable-depth", type=_depth, default=10)
    sp.add_argument("--region-depth", type=_depth, default=None, help="draw stable boundaries of T_n components")
    sp.add_argument("--svg", "--out-svg", dest="output_svg", default="lozi.svg")
    sp.add_argument("--png", help="also write a PNG via matplotlib")
    sp.set_defaults(func=cmd_render)

    sp = sub.add_parser("report", help="CSV of per-depth statistics plus PNG figures")
    common(sp)
    sp.add_argument("--min-depth", type=_depth, default=1)
    sp.add_argument("--max-depth", type=_depth, default=8)
    sp.add_argument("--outdir", default="report")
    sp.set_defaults(func=cmd_report)
    return ap


def _render_output_alias(argv: List[str]) -> List[str]:
    # `render ... -o fig.svg` names the SVG; the JSON summary then goes to stdout
    if argv and argv[0] == "render" and ("-o" in argv or "--output" in argv):
        out = list(argv)
        flag = "-o" if "-o" in out else "--output"
        i = out.index(flag)
        if i + 1 < len(out) and out[i + 1].endswith(".svg") and "--svg" not in out:
            out[i] = "--svg"
        return out
    return argv


def main(argv: Optional[List[str]] = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        args = parser.parse_args(_render_output_alias(argv))
    except SystemExit as e:
        return EXIT_OK if e.code == 0 else EXIT_INPUT
    try:
        doc = args.func(args)
    except (UsageError, DomainError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_INPUT
    except (InvariantViolation, ConstructionError) as e:
        witness = getattr(e, "witness", None)
        print(jsonio.dumps({"schema": jsonio.SCHEMA, "error": "invariant violation", "message": str(e),
                            "witness": witness}), file=sys.stderr, end="")
        return EXIT_INVARIANT
    except (ResourceError, MemoryError) as e:
        print(jsonio.dumps({"schema": jsonio.SCHEMA, "error": "resource", "message": str(e),
                            "achieved_depth": getattr(e, "achieved", None)}), file=sys.stderr, end="")
        return EXIT_RESOURCE
    text = jsonio.dumps(doc)
    out = getattr(args, "output", None)
    if out:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
