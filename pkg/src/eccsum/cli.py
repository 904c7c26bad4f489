"""Command-line entry point.

Exit codes: 0 success, 1 domain failure (invalid metric, infinite constant
under ``--require-finite``, failed inequality check, numerical failure),
2 usage or input errors.
"""

import argparse
import json
import math
import os
import sys

import numpy as np

from . import graphs, io, metric, summing
from .errors import InputError, NumericalFailure
from .tolerances import DEFAULT_TOL


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(2, f"{self.prog}: error: {message}\n")


def _ids(text):
    return [t.strip() for t in text.split(",") if t.strip()]


def _common(p, *, subset=False, measure=False, fmt=False):
    p.add_argument("--p", type=float, default=1.0, help="exponent p >= 1 (default 1)")
    p.add_argument("--tol-feas", type=float, default=None)
    p.add_argument("--tol-metric", type=float, default=None)
    p.add_argument("--output", "-o", default=None, help="write report here instead of stdout")
    if subset:
        p.add_argument("--subset", type=_ids, default=None,
                       help="comma-separated point ids (default: all points)")
    if measure:
        p.add_argument("--measure", default=None,
                       help="measure JSON file, or inline 'id=w,id=w'")
    if fmt:
        p.add_argument("--format", choices=("json", "csv"), default="json")


def build_parser():
    ap = _Parser(prog="eccsum", description=__doc__.splitlines()[0])
    ap.add_argument("--seed", type=int, default=0, help="seed for randomized internals")
    sub = ap.add_subparsers(dest="cmd", required=True, parser_class=_Parser)

    p = sub.add_parser("validate", help="check metric axioms")
    p.add_argument("space")
    _common(p)

    p = sub.add_parser("ecc-pseudo", help="eccentric pseudometric matrix")
    p.add_argument("space")
    _common(p, subset=True, fmt=True)

    p = sub.add_parser("seqdist", help="absolute / eccentric / weak sequence proximities")
    p.add_argument("space")
    p.add_argument("sequence")
    p.add_argument("--mode", choices=("auto", "exact", "bracket"), default="auto")
    p.add_argument("--starts", type=int, default=metric.DEFAULT_STARTS)
    p.add_argument("--seed", type=int, default=argparse.SUPPRESS,
                   help="seed for the multi-start ascent (overrides the global --seed)")
    _common(p, subset=True)

    p = sub.add_parser("ae-norm", help="Arens-Eells norm of a molecule")
    p.add_argument("space")
    p.add_argument("molecule")
    _common(p)

    p = sub.add_parser("pietsch", help="minimal eccentric p-summing constant")
    p.add_argument("space", help="metric space JSON, or graph JSON (uses q_r)")
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("--function", help="index JSON with the functional's values")
    g.add_argument("--map", help="map JSON {'mapping': {id: id}}")
    p.add_argument("--codomain", help="codomain space for --map (default: same space)")
    p.add_argument("--metric-p", type=float, default=1.0, help="r for graph inputs (q_r)")
    p.add_argument("--require-finite", action="store_true")
    _common(p, subset=True)

    p = sub.add_parser("approx", help="eccentrically p-approximating constant")
    p.add_argument("domain")
    p.add_argument("codomain")
    p.add_argument("map")
    p.add_argument("--subset2", type=_ids, default=None, help="codomain test points")
    p.add_argument("--mix", default=None, help="mixing measure over --subset2 (inline or file)")
    p.add_argument("--require-finite", action="store_true")
    _common(p, subset=True)

    p = sub.add_parser("graph", help="graph path matrices")
    p.add_argument("kind", choices=("qp", "dp", "dpmu", "ep"))
    p.add_argument("graph")
    p.add_argument("--metric", help="metric space JSON over the graph vertices")
    p.add_argument("--metric-p", type=float, default=1.0,
                   help="without --metric, use q_r of the graph with this r")
    p.add_argument("--index", help="index JSON (for ep)")
    p.add_argument("--query", action="append", default=[], help="'u,v' path query")
    _common(p, measure=True, fmt=True)

    p = sub.add_parser("symmetry", help="mu-symmetry classes of a graph")
    p.add_argument("graph")
    p.add_argument("--metric")
    p.add_argument("--metric-p", type=float, default=1.0)
    p.add_argument("--tol", type=float, default=graphs.SYMMETRY_TOL)
    _common(p, measure=True)

    p = sub.add_parser("check-t2", help="check best-path domination inequalities")
    p.add_argument("graph")
    p.add_argument("--index", required=True)
    p.add_argument("--metric")
    p.add_argument("--metric-p", type=float, default=1.0)
    _common(p, subset=True)

    p = sub.add_parser("gen", help="emit an example graph as JSON")
    p.add_argument("kind", choices=("sequence", "two-apex", "circle", "path"))
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--output", "-o", default=None)
    return ap


# ---------------------------------------------------------------------------


def _tol(args):
    return DEFAULT_TOL.override(feas_tol=args.tol_feas, metric_tol=args.tol_metric)


def _load_space(path, metric_p=1.0):
    doc = io.read_json(path)
    if isinstance(doc, dict) and "vertices" in doc:
        return graphs.graph_space(io.graph_from_json(doc, path), metric_p)
    return io.space_from_json(doc, path)


def _graph_metric(args, g):
    if args.metric:
        sp = io.space_from_json(io.read_json(args.metric), args.metric)
        if tuple(sp.points) != tuple(g.vertices):
            # reorder to the graph's vertex order
            order = [sp.index(v) for v in g.vertices]
            sp = metric.FiniteMetricSpace(g.vertices, sp.d[np.ix_(order, order)])
        return sp
    return graphs.graph_space(g, args.metric_p)


def _subset(ids, sel):
    if sel is None:
        return list(range(len(ids)))
    out = []
    for s in sel:
        if s not in ids:
            raise InputError(f"--subset: unknown id {s!r}")
        out.append(ids.index(s))
    return out


def _measure(text, ids, flag="--measure"):
    if text is None:
        raise InputError(f"{flag} is required here")
    if os.path.exists(text):
        return io.measure_from_json(io.read_json(text), ids, text)
    sup = {}
    for part in _ids(text):
        key, _, val = part.partition("=")
        if key not in ids:
            raise InputError(f"{flag}: unknown id {key!r}")
        try:
            sup[ids.index(key)] = float(val) if val else 1.0
        except ValueError:
            raise InputError(f"{flag}: bad weight {val!r}") from None
    try:
        return summing.ProbabilityMeasure(sup)
    except InputError as exc:
        raise InputError(f"{flag}: {exc}") from None


def _num(x):
    return "inf" if isinstance(x, float) and math.isinf(x) else x


def _emit(args, payload):
    text = payload if isinstance(payload, str) else json.dumps(payload, indent=2) + "\n"
    if args.output:
        with open(args.output, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _matrix_payload(args, ids, values, extra=None):
    if getattr(args, "format", "json") == "csv":
        return io.matrix_to_csv(ids, values)
    out = {"vertices": list(ids), "matrix": np.asarray(values).tolist()}
    out.update(extra or {})
    return out


# ---------------------------------------------------------------------------


def cmd_validate(args):
    sp = _load_space(args.space)
    rep = metric.validate_metric(sp, _tol(args))
    _emit(args, {
        "valid": rep.valid,
        "violations": [
            {"axiom": v.axiom, "witness": list(v.witness), "amount": v.amount}
            for v in rep.violations
        ],
    })
    return 0 if rep.valid else 1


def cmd_ecc_pseudo(args):
    sp = _load_space(args.space)
    s = _subset(sp.points, args.subset)
    mat = metric.eccentric_pseudometric(sp, s)
    _emit(args, _matrix_payload(args, sp.points, mat,
                                {"subset": [sp.points[i] for i in s]}))
    return 0


def cmd_seqdist(args):
    sp = _load_space(args.space)
    seq = io.sequence_from_json(io.read_json(args.sequence), sp.points, args.sequence)
    s = _subset(sp.points, args.subset)
    cc, y = metric.d_cc(sp, seq, args.p, s, return_witness=True)
    wc = metric.d_wc(sp, seq, args.p, args.mode, tol=_tol(args), starts=args.starts,
                     seed=args.seed)
    _emit(args, {
        "p": args.p,
        "d_ac": metric.d_ac(sp, seq, args.p),
        "d_cc": {"value": cc, "witness": sp.points[y], "subset": [sp.points[i] for i in s]},
        "d_wc": {"lower": wc.lower, "upper": wc.upper, "value": wc.value, "method": wc.method},
    })
    return 0


def cmd_ae_norm(args):
    sp = _load_space(args.space)
    m = io.molecule_from_json(io.read_json(args.molecule), sp, args.molecule)
    val, f = metric.ae_norm(sp, m, _tol(args))
    _emit(args, {"norm": val, "witness": {pid: float(x) for pid, x in zip(sp.points, f)}})
    return 0


def cmd_pietsch(args):
    sp = _load_space(args.space, args.metric_p)
    k = _subset(sp.points, args.subset)
    if args.function:
        f = io.index_from_json(io.read_json(args.function), sp.points, args.function)
        cert = summing.pietsch_functional(sp, f, k, args.p, _tol(args))
        mode = "functional"
    else:
        cod = _load_space(args.codomain, args.metric_p) if args.codomain else sp
        t = io.map_from_json(io.read_json(args.map), sp, cod, args.map)
        cert = summing.pietsch_map(t, k, args.p, _tol(args))
        mode = "map"
    out = io.certificate_to_json(cert, sp.points)
    out["mode"] = mode
    _emit(args, out)
    return 1 if args.require_finite and not cert.finite else 0


def cmd_approx(args):
    dom = _load_space(args.domain)
    cod = _load_space(args.codomain)
    t = io.map_from_json(io.read_json(args.map), dom, cod, args.map)
    k1 = _subset(dom.points, args.subset)
    k2 = _subset(cod.points, args.subset2)
    res = summing.approximating_constant(t, k1, k2, args.p, _tol(args))
    out = {
        "p": args.p,
        "constant": _num(res.constant),
        "per_point": {
            cod.points[z]: io.certificate_to_json(c, dom.points)
            for z, c in res.certificates.items()
        },
        "witness": None,
    }
    if res.witness:
        z, pair = res.witness
        out["witness"] = {"z": cod.points[z], "pair": [dom.points[a] for a in pair]}
    if args.mix and res.finite:
        nu = _measure(args.mix, cod.points, "--mix")
        mu_m = summing.mix_measures(res, nu)
        out["mixed_measure"] = io.measure_to_json(mu_m, dom.points)
        out["mixed_excess"] = summing.verify_mixed_domination(t, nu, mu_m, res.constant, args.p)
    _emit(args, out)
    return 1 if args.require_finite and not res.finite else 0


def cmd_graph(args):
    g = io.graph_from_json(io.read_json(args.graph), args.graph)
    if args.kind == "qp":
        pm = graphs.q_p(g, args.p)
    elif args.kind == "dp":
        pm = graphs.d_p(g, _graph_metric(args, g), args.p)
    elif args.kind == "dpmu":
        pm = graphs.d_p_mu(g, _graph_metric(args, g), args.p,
                           _measure(args.measure, g.vertices))
    else:
        if not args.index:
            raise InputError("graph ep needs --index")
        f = io.index_from_json(io.read_json(args.index), g.vertices, args.index)
        pm = graphs.e_p(g, f, args.p)
    paths = []
    for q in args.query:
        ends = _ids(q)
        if len(ends) != 2:
            raise InputError(f"--query expects 'u,v', got {q!r}")
        for e in ends:
            g.index(e)
        r = pm.path(*ends)
        paths.append({"from": ends[0], "to": ends[1], "value": r.value, "path": r.path})
    _emit(args, _matrix_payload(args, g.vertices, pm.values,
                                {"kind": args.kind, "p": args.p, "paths": paths}))
    return 0


def cmd_symmetry(args):
    g = io.graph_from_json(io.read_json(args.graph), args.graph)
    mu = _measure(args.measure, g.vertices)
    res = graphs.symmetry_classes(g, _graph_metric(args, g), args.p, mu, args.tol)
    _emit(args, {"classes": res.classes, "transitive": res.transitive,
                 "warnings": res.warnings, "tol": args.tol, "p": args.p})
    return 0


def cmd_check_t2(args):
    g = io.graph_from_json(io.read_json(args.graph), args.graph)
    sp = _graph_metric(args, g)
    f = io.index_from_json(io.read_json(args.index), g.vertices, args.index)
    k = _subset(g.vertices, args.subset)
    cert = summing.pietsch_functional(sp, f, k, args.p, _tol(args))
    rep = graphs.check_t2(g, sp, args.p, f, cert)
    _emit(args, {
        "passed": rep.passed,
        "lip": _num(rep.lip),
        "constant": _num(rep.constant),
        "part1": {"worst_excess": rep.worst_part1, "pair": rep.worst_pair1,
                  "max_ratio": rep.max_ratio1},
        "part2": None if not rep.part2_checked else {
            "worst_excess": rep.worst_part2, "pair": rep.worst_pair2,
            "max_ratio": rep.max_ratio2,
        },
        "certificate": io.certificate_to_json(cert, g.vertices),
    })
    return 0 if rep.passed else 1


def cmd_gen(args):
    make = {
        "sequence": graphs.sequence_graph,
        "two-apex": graphs.two_apex_graph,
        "circle": graphs.circle_graph,
        "path": graphs.path_graph,
    }[args.kind]
    _emit(args, io.graph_to_json(make(args.n)))
    return 0


COMMANDS = {
    "validate": cmd_validate,
    "ecc-pseudo": cmd_ecc_pseudo,
    "seqdist": cmd_seqdist,
    "ae-norm": cmd_ae_norm,
    "pietsch": cmd_pietsch,
    "approx": cmd_approx,
    "graph": cmd_graph,
    "symmetry": cmd_symmetry,
    "check-t2": cmd_check_t2,
    "gen": cmd_gen,
}


def run(argv=None):
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as exc:
        return exc.code
    try:
        return COMMANDS[args.cmd](args)
    except NumericalFailure as exc:
        print(f"eccsum: numerical failure: {exc} {exc.diagnostics}", file=sys.stderr)
        return 1
    except InputError as exc:
        print(f"eccsum: error: {exc}", file=sys.stderr)
        return 2


def main(argv=None):
    sys.exit(run(argv))


if __name__ == "__main__":
    main()
