"""Command-line entry point.

Results go to standard output as ``key value`` lines (or to files when an
output path is given); diagnostics go to standard error.  Exit status is 0 on
success, 1 when a size cap refuses the work, and 2 on bad input.
"""

from __future__ import annotations

import argparse
import sys
from fractions import Fraction
from pathlib import Path

from . import amplify, cbg, fixtures, mcf, netcode, sparsity, standard_form, tensor
from .graph_core import (
    INFINITE, ContractViolation, DualSolution, OrientedGraph, ParseError, Refusal,
    format_fraction, girth,
    graph_girth, parse_dual, parse_graph, parse_oriented, serialize_dual, serialize_graph,
    serialize_oriented,
)


def _fmt(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, Fraction):
        return format_fraction(value)
    if value is None:
        return "none"
    if value == INFINITE:
        return "inf"
    if isinstance(value, (list, tuple)):
        return " ".join(_fmt(v) for v in value)
    return str(value)


def _emit(out, pairs):
    for key, value in pairs:
        out.write(f"{key} {_fmt(value)}\n")


def _read(path) -> str:
    return Path(path).read_text(encoding="utf-8")


def _write(path, text, out):
    if path:
        Path(path).write_text(text, encoding="utf-8")
    else:
        out.write(text)


def _graph(path):
    return parse_graph(_read(path))


def _dual(path, g):
    return parse_dual(_read(path), g)


def _oriented(path, g):
    """An oriented graph file, or the half/half split of ``g`` when no path is given."""
    if path:
        og = parse_oriented(_read(path))
        if og.base != g:
            raise ContractViolation(f"{path}: oriented graph does not match the graph file")
        return og
    return OrientedGraph.half_split(g)


# ------------------------------------------------------------ subcommands

def cmd_mcf(args, out):
    g = _graph(args.input)
    flow = mcf.max_concurrent_flow(g)
    dual = mcf.optimal_dual(g)
    _emit(out, [("lambda", flow.rate), ("z", dual.objective)])
    if args.dual_out:
        _write(args.dual_out, serialize_dual(dual), out)
    if args.flow_out:
        _write(args.flow_out, mcf.serialize_flow(g, flow), out)


def cmd_dual(args, out):
    g = _graph(args.input)
    _write(args.output, serialize_dual(mcf.optimal_dual(g)), out)


def cmd_verify_dual(args, out):
    g = _graph(args.input)
    d = _dual(args.dual, g)
    feasible, objective, dist = mcf.verify_dual(g, d)
    _emit(out, [("feasible", feasible), ("objective", objective)])
    _emit(out, [(f"distance {i}", x) for i, x in enumerate(dist)])


def cmd_standard_form(args, out):
    g = _graph(args.input)
    d = _dual(args.dual, g)
    h, e = standard_form.standardize(g, d, Fraction(args.eps), Fraction(args.alpha),
                                     always_extend=not args.no_extend)
    cert = standard_form.is_standard_form(h, e)
    ok = isinstance(cert, standard_form.StandardFormCertificate)
    _emit(out, [("standard_form", ok), ("vertices", h.vertex_count), ("edges", h.m),
                ("commodities", h.k), ("z_before", d.objective), ("z_after", e.objective)])
    if ok:
        _emit(out, [("demand", cert.equal_demand), ("min_weight", cert.min_dual_weight)])
    else:
        _emit(out, [("violation", v) for v in cert])
    if args.graph_out:
        _write(args.graph_out, serialize_graph(h), out)
    if args.dual_out:
        _write(args.dual_out, serialize_dual(e), out)


def cmd_cbg(args, out):
    b = cbg.construct_cbg(args.r, args.s, args.g, size_cap=args.size_cap, seed=args.seed)
    _write(args.output, cbg.serialize_cbg(b), out)


def cmd_girth(args, out):
    if args.cbg:
        b = cbg.parse_cbg(_read(args.cbg))
        value = girth(b.n1 + b.n2, b.bipartite().flat_edges())
    else:
        value = graph_girth(_graph(args.input))
    _emit(out, [("girth", value)])


def _tensor_report(g1, g2, d1, d2, graph, cert, dual, certified):
    dist1 = mcf.shortest_pair_distances(g1, d1.weights)
    dist2 = mcf.shortest_pair_distances(g2, d2.weights)
    got = mcf.shortest_pair_distances(graph, dual.weights)
    want = tensor.expected_distances(cert, dist1, dist2)
    shorter = sum(1 for a, b in zip(got, want) if a < b)
    need = tensor.girth_requirement(dist1, dist2) if min(d1.weights + d2.weights) > 0 else None
    return [
        ("q", cert.q), ("girth_param", need), ("scaffold_n1", cert.scaffold.n1),
        ("scaffold_n2", cert.scaffold.n2), ("vertices", graph.vertex_count), ("edges", graph.m),
        ("commodities", graph.k), ("dropped_edges", cert.dropped_edges),
        ("certified", certified), ("z", dual.objective),
        ("z_product", dual.objective == cert.q * d1.objective * d2.objective),
        ("distance_product", list(got) == want), ("cheating_distances", shorter),
    ]


def cmd_tensor(args, out):
    g1, g2 = _graph(args.g1), _graph(args.g2)
    d1, d2 = _dual(args.d1, g1), _dual(args.d2, g2)
    g1p, g2p = _oriented(args.o1, g1), _oriented(args.o2, g2)
    if args.scaffold:
        b = cbg.parse_cbg(_read(args.scaffold))
    else:
        need = tensor.girth_requirement(mcf.shortest_pair_distances(g1, d1.weights),
                                        mcf.shortest_pair_distances(g2, d2.weights))
        b = cbg.construct_cbg(g1p.arc_count, g2.k, need, size_cap=args.size_cap, seed=args.seed)
    graph, cert = tensor.graph_tensor(g1p, g2p, b)
    try:
        dual = tensor.tensor_dual(g1, g2, d1, d2, (graph, cert))
        certified = True
    except tensor.UncertifiedDual as exc:
        print(f"warning: {exc}", file=sys.stderr)
        dual, certified = exc.dual, False
    _emit(out, _tensor_report(g1, g2, d1, d2, graph, cert, dual, certified))
    if args.graph_out:
        _write(args.graph_out, serialize_graph(graph), out)
    if args.dual_out:
        _write(args.dual_out, serialize_dual(dual), out)
    if args.oriented_out:
        _write(args.oriented_out, serialize_oriented(cert.oriented(graph)), out)


def _nc_report(report):
    pairs = [("valid", report.valid), ("rate", report.rate), ("correct", report.correct),
             ("causal", report.causal), ("capacity_ok", report.capacity_ok)]
    return pairs + [("violation", v) for v in report.violations]


def cmd_verify_nc(args, out):
    og = parse_oriented(_read(args.oriented)) if args.oriented else None
    g = og.base if og else _graph(args.input)
    n = netcode.parse_nc(_read(args.nc), g)
    report = netcode.verify_nc(og or g, n, message_cap=args.message_cap)
    _emit(out, _nc_report(report))
    if og is not None:
        _emit(out, [("respects_orientation", report.respects_orientation)])


def cmd_compose_nc(args, out):
    g1, g2 = _graph(args.g1), _graph(args.g2)
    n1 = netcode.parse_nc(_read(args.nc1), g1)
    n2 = netcode.parse_nc(_read(args.nc2), g2)
    g1p = tensor.orient_by_coding(g1, netcode.orientation_from_nc(g1, n1))
    g2p = tensor.orient_by_coding(g2, netcode.orientation_from_nc(g2, n2))
    b = cbg.parse_cbg(_read(args.scaffold))
    t = tensor.graph_tensor(g1p, g2p, b)
    n = netcode.compose_nc(n1, n2, b, t, message_cap=args.message_cap)
    r1 = netcode.verify_nc(g1, n1, message_cap=args.message_cap).rate
    r2 = netcode.verify_nc(g2, n2, message_cap=args.message_cap).rate
    report = netcode.verify_nc(t[0], n, message_cap=args.message_cap)
    _emit(out, _nc_report(report))
    _emit(out, [("rate_1", r1), ("rate_2", r2), ("q", t[1].q), ("scale_b", n.scale_b),
                ("meets_product", report.rate >= r1 * r2 * t[1].q)])
    if args.graph_out:
        _write(args.graph_out, serialize_graph(t[0]), out)
    if args.output:
        _write(args.output, netcode.serialize_nc(t[0], n), out)


def cmd_sparsity(args, out):
    g = _graph(args.input)
    cut = sparsity.sparsest_cut_bruteforce(g, args.max_vertices)
    _emit(out, [("side", list(cut.side_U)), ("capacity", cut.capacity), ("demand", cut.demand),
                ("sparsity", cut.sparsity)])
    if args.sandwich:
        rate, sp, ratio = sparsity.sandwich_report(g, args.max_vertices)
        _emit(out, [("lambda", rate), ("ratio", ratio)])


def cmd_check_product(args, out):
    g1, g2, t = _graph(args.g1), _graph(args.g2), _graph(args.tensor)
    lhs, rhs, holds = sparsity.check_sparsity_product(g1, g2, t, args.max_vertices)
    _emit(out, [("lhs", lhs), ("rhs", rhs), ("holds", holds)])


def _trace_lines(trace):
    lines = []
    for s in trace.steps:
        lines.append(
            f"step {s.iteration} v {s.vertex_count} m {s.edge_count} k {s.commodity_count} "
            f"d {_fmt(s.demand)} z {_fmt(s.z)} gap {_fmt(s.gap_claim)} g {_fmt(s.girth_param)} "
            f"w {_fmt(s.w_min)} l {_fmt(s.l_max)} n1 {_fmt(s.n1)} n2 {_fmt(s.n2)} q {_fmt(s.q)}")
        for key in sorted(s.checks):
            lines.append(f"check {s.iteration} {key} {_fmt(s.checks[key])}")
    lines.append(f"refusal {trace.refusal or 'none'}")
    return "\n".join(lines) + "\n"


def cmd_amplify(args, out):
    g = _graph(args.input)
    d = _dual(args.dual, g) if args.dual else mcf.optimal_dual(g)
    trace = amplify.iterate(g, d, Fraction(args.eps), args.iters, args.size_cap)
    text = _trace_lines(trace)
    _write(args.trace_out, text, out)
    if args.trace_out:
        _emit(out, [("iterations", len(trace.steps) - 1), ("refusal", trace.refusal)])


def cmd_estimate_size(args, out):
    est = amplify.size_estimate(args.cm, Fraction(args.c1), args.i)
    _emit(out, [("log2_bound", est.log2), ("log2_log2_bound", est.log2_log2)])
    if est.exact is not None and est.log2 <= 256:
        _emit(out, [("bound", est.exact)])


def cmd_demo(args, out):
    g = fixtures.four_cycle()
    flow = mcf.max_concurrent_flow(g)
    d = DualSolution.for_graph(g, [Fraction(1, 4)] * 4)
    _emit(out, [("base_lambda", flow.rate), ("base_z", d.objective)])
    graph, cert, dual = tensor.build_tensor(g, g, d, d, size_cap=args.size_cap, seed=args.seed)
    _emit(out, _tensor_report(g, g, d, d, graph, cert, dual, True))
    h = OrientedGraph.half_split(g)
    low = cbg.complete_scaffold(h.arc_count, g.k)
    lg, lc = tensor.graph_tensor(h, h, low)
    ld = DualSolution.for_graph(lg, tensor.product_weights(d, d, lc))
    report = _tensor_report(g, g, d, d, lg, lc, ld, False)
    _emit(out, [("low_girth_" + k, v) for k, v in report if k in ("q", "distance_product",
                                                                  "cheating_distances")])
    lhs, rhs, holds = sparsity.check_sparsity_product(g, g, lg)
    _emit(out, [("sparsity_lhs", lhs), ("sparsity_rhs", rhs), ("sparsity_holds", holds)])
    n1 = netcode.routing_as_nc(g, flow, 4)
    gp = tensor.orient_by_coding(g, netcode.orientation_from_nc(g, n1))
    t = tensor.graph_tensor(gp, gp, low)
    rep = netcode.verify_nc(t[0], netcode.compose_nc(n1, n1, low, t))
    _emit(out, [("composed_nc_valid", rep.valid), ("composed_nc_rate", rep.rate)])
    trace = amplify.iterate(fixtures.single_edge(), mcf.optimal_dual(fixtures.single_edge()),
                            Fraction(1), 2)
    out.write(_trace_lines(trace))


# ------------------------------------------------------------ parser

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="gaptensor", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("mcf", help="maximum concurrent flow and optimal dual")
    s.add_argument("--input", required=True)
    s.add_argument("--dual-out")
    s.add_argument("--flow-out")
    s.set_defaults(func=cmd_mcf)

    s = sub.add_parser("dual", help="write an optimal dual")
    s.add_argument("--input", required=True)
    s.add_argument("--output")
    s.set_defaults(func=cmd_dual)

    s = sub.add_parser("verify-dual", help="check a dual for feasibility")
    s.add_argument("--input", required=True)
    s.add_argument("--dual", required=True)
    s.set_defaults(func=cmd_verify_dual)

    s = sub.add_parser("standard-form", help="contract, equalize demands and extend")
    s.add_argument("--input", required=True)
    s.add_argument("--dual", required=True)
    s.add_argument("--eps", required=True)
    s.add_argument("--alpha", required=True)
    s.add_argument("--no-extend", action="store_true",
                   help="skip the extension when already in standard form")
    s.add_argument("--graph-out")
    s.add_argument("--dual-out")
    s.set_defaults(func=cmd_standard_form)

    s = sub.add_parser("cbg", help="build a colored bipartite scaffold")
    s.add_argument("--r", type=int, required=True)
    s.add_argument("--s", type=int, required=True)
    s.add_argument("--g", type=int, required=True)
    s.add_argument("--size-cap", type=int, default=5000)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--output")
    s.set_defaults(func=cmd_cbg)

    s = sub.add_parser("girth", help="girth of a graph or scaffold file")
    group = s.add_mutually_exclusive_group(required=True)
    group.add_argument("--input")
    group.add_argument("--cbg")
    s.set_defaults(func=cmd_girth)

    s = sub.add_parser("tensor", help="build the graph tensor and its product dual")
    for name in ("--g1", "--g2", "--d1", "--d2"):
        s.add_argument(name, required=True)
    s.add_argument("--o1", help="oriented graph file for g1 (default half/half)")
    s.add_argument("--o2", help="oriented graph file for g2 (default half/half)")
    group = s.add_mutually_exclusive_group(required=True)
    group.add_argument("--scaffold")
    group.add_argument("--auto-scaffold", action="store_true")
    s.add_argument("--size-cap", type=int, default=5000)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--graph-out")
    s.add_argument("--dual-out")
    s.add_argument("--oriented-out")
    s.set_defaults(func=cmd_tensor)

    s = sub.add_parser("verify-nc", help="verify a network coding solution")
    group = s.add_mutually_exclusive_group(required=True)
    group.add_argument("--input")
    group.add_argument("--oriented")
    s.add_argument("--nc", required=True)
    s.add_argument("--message-cap", type=int, default=netcode.DEFAULT_MESSAGE_CAP)
    s.set_defaults(func=cmd_verify_nc)

    s = sub.add_parser("compose-nc", help="compose two coding solutions over a scaffold")
    for name in ("--g1", "--g2", "--nc1", "--nc2", "--scaffold"):
        s.add_argument(name, required=True)
    s.add_argument("--message-cap", type=int, default=netcode.DEFAULT_MESSAGE_CAP)
    s.add_argument("--graph-out")
    s.add_argument("--output")
    s.set_defaults(func=cmd_compose_nc)

    s = sub.add_parser("sparsity", help="exact sparsest cut")
    s.add_argument("--input", required=True)
    s.add_argument("--max-vertices", type=int, default=sparsity.DEFAULT_VERTEX_CAP)
    s.add_argument("--sandwich", action="store_true", help="also report lambda and the ratio")
    s.set_defaults(func=cmd_sparsity)

    s = sub.add_parser("check-product", help="compare tensor sparsity with the factor product")
    for name in ("--g1", "--g2", "--tensor"):
        s.add_argument(name, required=True)
    s.add_argument("--max-vertices", type=int, default=sparsity.DEFAULT_VERTEX_CAP)
    s.set_defaults(func=cmd_check_product)

    s = sub.add_parser("amplify", help="standardize and self-tensor repeatedly")
    s.add_argument("--input", required=True)
    s.add_argument("--dual", help="dual file (default: an optimal dual)")
    s.add_argument("--eps", required=True)
    s.add_argument("--iters", type=int, default=2)
    s.add_argument("--size-cap", type=int, default=amplify.DEFAULT_SIZE_CAP)
    s.add_argument("--trace-out")
    s.set_defaults(func=cmd_amplify)

    s = sub.add_parser("estimate-size", help="closed-form edge-count bound")
    s.add_argument("--cm", type=int, required=True)
    s.add_argument("--c1", required=True)
    s.add_argument("--i", type=int, required=True)
    s.set_defaults(func=cmd_estimate_size)

    s = sub.add_parser("demo", help="end-to-end run on the 4-cycle")
    s.add_argument("--size-cap", type=int, default=5000)
    s.add_argument("--seed", type=int, default=0)
    s.set_defaults(func=cmd_demo)
    return p


def main(argv=None, out=None) -> int:
    out = out or sys.stdout
    args = build_parser().parse_args(argv)
    try:
        args.func(args, out)
    except Refusal as exc:
        print(f"refused: {exc}", file=sys.stderr)
        return 1
    except (ContractViolation, ParseError, OSError, ValueError, ZeroDivisionError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
