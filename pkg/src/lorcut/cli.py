"""Command-line surface: JSON input/output for every module operation, seeded
reproduction of all headline numbers, and report emission.

Every run prints a single run report object on stdout.  Results are
byte-identical across repeated runs with the same command, inputs, seed, and
version.  Exit codes: 0 success, 1 property violation (with certificate),
2 usage error, 3 resource limit.
"""

import argparse
from fractions import Fraction
import hashlib
import json
import os
import sys
import time

from . import __version__
from ._util import scalar_to_json
from .constants import BarycentricRatio, estimate_sup, numeric_constant_n3, optimal_constant_n3, tp_constant_n3
from .cutcone import enumerate_facets, facets_to_json, orbit_classify, orbit_report_to_json
from .errors import DomainError, InvariantViolation, LorcutError, ResourceLimitError
from .matrices import SymMatrix, is_lorentzian, sample_rank2, witness_pentagonal, witness_tp
from .metrics import (
    cut_decomposition,
    four_point_check,
    gromov_tree_approx,
    hyperbolicity_delta,
    in_delta_tp,
    metric_from_json,
    metric_to_json,
    tree_reconstruct,
    tree_to_json,
)
from .ratios import (
    evaluate_with_flags,
    decompose,
    full_from_facet,
    is_bounded,
    normalize_ratio,
    ratio_from_json,
    ratio_to_json,
    tight_set_rank,
)
from .reproduce import DEFAULT_SEED, run_all, run_criterion
from .subfree import subfree_check


def _read_json(path):
    try:
        with open(path) as fh:
            return json.load(fh)
    except FileNotFoundError:
        raise DomainError(f"input file not found: {path}")
    except json.JSONDecodeError as exc:
        raise DomainError(f"invalid JSON in {path}: {exc}")


def _digest(path):
    with open(path, "rb") as fh:
        return "sha256:" + hashlib.sha256(fh.read()).hexdigest()[:12]


def _write_json(path, payload):
    with open(path, "w") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")


def _json_scalar(x):
    if isinstance(x, Fraction):
        return scalar_to_json(x)
    return x


def _certificate_json(cert):
    out = {"bounded": cert.bounded}
    if cert.violating_subset is not None:
        out["violating_subset"] = sorted(cert.violating_subset)
    else:
        out["tight_subsets"] = [sorted(s) for s in cert.tight_subsets]
    return out


# ---------------------------------------------------------------------------
# subcommand handlers: each returns (results_dict, exit_code, file_digests)


def _cmd_lorentzian(args):
    if args.action == "check":
        m = SymMatrix.from_json(_read_json(args.matrix))
        result = is_lorentzian(m)
        sig = result.signature
        return ({"lorentzian": result.lorentzian,
                 "signature": {"n_pos": sig.n_pos, "n_neg": sig.n_neg,
                               "n_zero": sig.n_zero, "rank": sig.rank}},
                0, {"matrix": _digest(args.matrix)})
    if args.action == "witness":
        if args.kind == "pentagonal":
            if args.t is None:
                raise DomainError("--t is required for the pentagonal witness")
            m = witness_pentagonal(Fraction(args.t))
        else:
            if args.p is None:
                raise DomainError("--p is required for the tp witness")
            m = witness_tp(Fraction(args.p))
        payload = m.to_json()
        if args.out:
            _write_json(args.out, payload)
        return ({"matrix": payload}, 0, {})
    if args.action == "sample":
        m = sample_rank2(args.n, args.seed)
        payload = m.to_json()
        if args.out:
            _write_json(args.out, payload)
        return ({"matrix": payload}, 0, {})
    raise DomainError(f"unknown lorentzian action {args.action!r}")


def _cmd_cutcone(args):
    facets = enumerate_facets(args.n)
    results = facets_to_json(args.n, facets)
    results["total"] = len(facets)
    if args.orbits:
        results["orbits"] = orbit_report_to_json(orbit_classify(facets, threads=args.threads))
    if args.out:
        _write_json(args.out, results)
    return results, 0, {}


def _cmd_ratio(args):
    digests = {"ratio": _digest(args.ratio)}
    r = ratio_from_json(_read_json(args.ratio))
    if args.action == "check":
        cert = is_bounded(r.reduced())
        out = _certificate_json(cert)
        if cert.bounded:
            out["tight_rank"] = tight_set_rank(r.reduced(), cert)
        return out, 0, digests
    if args.action == "eval":
        m = SymMatrix.from_json(_read_json(args.matrix))
        digests["matrix"] = _digest(args.matrix)
        value, flags = evaluate_with_flags(r, m)
        return {"value": _json_scalar(value), "flags": flags}, 0, digests
    if args.action == "normalize":
        normalized = normalize_ratio(r.reduced())
        from .ratios import complete_diagonal

        return {"ratio": ratio_to_json(complete_diagonal(normalized))}, 0, digests
    if args.action == "decompose":
        basis = enumerate_facets(r.n)
        found = decompose(r, basis)
        if found is None:
            return {"found": False}, 0, digests
        terms = [{"facet_index": idx, "facet": list(basis[idx].coords), "coefficient": k}
                 for idx, k in found]
        return {"found": True, "terms": terms}, 0, digests
    raise DomainError(f"unknown ratio action {args.action!r}")


def _cmd_metric(args):
    if args.action == "check":
        m = SymMatrix.from_json(_read_json(args.matrix))
        member = in_delta_tp(m, Fraction(args.p))
        return ({"member": member, "p": args.p}, 0, {"matrix": _digest(args.matrix)})
    d = metric_from_json(_read_json(args.metric))
    digests = {"metric": _digest(args.metric)}
    if args.action == "delta":
        return {"delta": _json_scalar(hyperbolicity_delta(d))}, 0, digests
    if args.action == "treeapprox":
        exact = d.to_exact() if not d.is_rational else d
        approx = gromov_tree_approx(exact, basepoint=args.basepoint)
        gaps = [a - b for a, b in zip(exact.d, approx.d)]
        out = {
            "approx": metric_to_json(approx),
            "max_gap": _json_scalar(max(gaps, default=Fraction(0))),
            "delta": _json_scalar(hyperbolicity_delta(exact)),
            "four_point": four_point_check(approx),
            "basepoint": args.basepoint,
        }
        if args.out:
            _write_json(args.out, out["approx"])
        return out, 0, digests
    if args.action == "decompose":
        tree = tree_reconstruct(d)
        dec = cut_decomposition(tree, root_leaf=args.basepoint)
        return ({"tree": tree_to_json(tree),
                 "terms": [{"subset": sorted(s), "weight": _json_scalar(w)}
                           for s, w in dec.terms]},
                0, digests)
    raise DomainError(f"unknown metric action {args.action!r}")


def _cmd_constant(args):
    if args.action == "n3":
        q = BarycentricRatio(args.a, args.b, args.c)
        out = {"constant": optimal_constant_n3(q)}
        if args.verify:
            numeric = numeric_constant_n3(q)
            out["numeric"] = numeric
            out["agreement"] = abs(numeric - out["constant"]) <= 1e-6
        if args.figure:
            from .reporting import save_constant_triangle_figure

            save_constant_triangle_figure(args.figure)
            out["figure"] = args.figure
        code = 0 if out.get("agreement", True) else 1
        return out, code, {}
    if args.action == "tp":
        return {"constant": tp_constant_n3(args.a, args.b, args.c, args.p)}, 0, {}
    if args.action == "estimate":
        r = ratio_from_json(_read_json(args.ratio))
        est = estimate_sup(r, args.iters, args.seed)
        return ({"empirical_sup": _json_scalar(est.empirical_sup),
                 "evaluations": est.evaluations,
                 "argmax": est.argmax.to_json()},
                0, {"ratio": _digest(args.ratio)})
    raise DomainError(f"unknown constant action {args.action!r}")


def _cmd_conjecture(args):
    facets = enumerate_facets(args.n)
    if args.facet_index is not None:
        if not 0 <= args.facet_index < len(facets):
            raise DomainError(f"facet index out of range 0..{len(facets) - 1}")
        targets = [(args.facet_index, facets[args.facet_index])]
    else:
        targets = list(enumerate(facets))
    reports = []
    all_hold = True
    for idx, facet in targets:
        report = subfree_check(full_from_facet(facet))
        all_hold &= report.holds
        reports.append({"facet_index": idx, "facet": list(facet.coords),
                        "report": report.to_json()})
    return {"n": args.n, "reports": reports, "all_hold": all_hold}, 0 if all_hold else 1, {}


def _cmd_reproduce(args):
    if args.criterion is not None:
        results = [run_criterion(args.criterion, seed=args.seed, threads=args.threads)]
    else:
        results = run_all(seed=args.seed, threads=args.threads)
    payload = {"criteria": [r.to_json() for r in results],
               "all_passed": all(r.passed for r in results)}
    if args.report_dir:
        os.makedirs(args.report_dir, exist_ok=True)
        _write_json(os.path.join(args.report_dir, "report.json"), payload)
        from .reporting import (
            save_constant_triangle_figure,
            save_criteria_csv,
            save_pentagonal_sweep_figure,
        )

        save_criteria_csv(os.path.join(args.report_dir, "criteria.csv"), results)
        save_constant_triangle_figure(os.path.join(args.report_dir, "constant_triangle.png"))
        save_pentagonal_sweep_figure(os.path.join(args.report_dir, "pentagonal_sweep.png"))
        payload["report_dir"] = args.report_dir
    return payload, 0 if payload["all_passed"] else 1, {}


# ---------------------------------------------------------------------------
# parser


def build_parser():
    parser = argparse.ArgumentParser(
        prog="lorcut",
        description="Exact verification and enumeration of multiplicative "
                    "inequalities on Lorentzian matrices.")
    parser.add_argument("--format", choices=("json", "table"), default="json")
    parser.add_argument("--seed", type=int, default=DEFAULT_SEED)
    parser.add_argument("--threads", type=int, default=os.cpu_count())
    sub = parser.add_subparsers(dest="command", required=True)

    lor = sub.add_parser("lorentzian", help="membership checks, witnesses, samples")
    lor_sub = lor.add_subparsers(dest="action", required=True)
    p = lor_sub.add_parser("check")
    p.add_argument("--matrix", required=True)
    p = lor_sub.add_parser("witness")
    p.add_argument("--kind", choices=("pentagonal", "tp"), required=True)
    p.add_argument("--t")
    p.add_argument("--p")
    p.add_argument("--out")
    p = lor_sub.add_parser("sample")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--seed", type=int, default=argparse.SUPPRESS)
    p.add_argument("--out")

    cc = sub.add_parser("cutcone", help="facet enumeration of the cut cone")
    cc_sub = cc.add_subparsers(dest="action", required=True)
    p = cc_sub.add_parser("facets")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--orbits", action="store_true")
    p.add_argument("--out")

    ra = sub.add_parser("ratio", help="ratio certification and evaluation")
    ra_sub = ra.add_subparsers(dest="action", required=True)
    for name in ("check", "eval", "normalize", "decompose"):
        p = ra_sub.add_parser(name)
        p.add_argument("--ratio", required=True)
        if name == "eval":
            p.add_argument("--matrix", required=True)

    me = sub.add_parser("metric", help="triangle classes, hyperbolicity, trees")
    me_sub = me.add_subparsers(dest="action", required=True)
    p = me_sub.add_parser("check")
    p.add_argument("--matrix", required=True)
    p.add_argument("--p", required=True)
    p = me_sub.add_parser("delta")
    p.add_argument("--metric", required=True)
    p = me_sub.add_parser("treeapprox")
    p.add_argument("--metric", required=True)
    p.add_argument("--basepoint", type=int, default=1)
    p.add_argument("--out")
    p = me_sub.add_parser("decompose")
    p.add_argument("--metric", required=True)
    p.add_argument("--basepoint", type=int, default=1)

    co = sub.add_parser("constant", help="optimal bounding constants")
    co_sub = co.add_subparsers(dest="action", required=True)
    p = co_sub.add_parser("n3")
    p.add_argument("--a", type=float, required=True)
    p.add_argument("--b", type=float, required=True)
    p.add_argument("--c", type=float, required=True)
    p.add_argument("--verify", action="store_true")
    p.add_argument("--figure")
    p = co_sub.add_parser("tp")
    p.add_argument("--p", type=float, required=True)
    p.add_argument("--a", type=float, required=True)
    p.add_argument("--b", type=float, required=True)
    p.add_argument("--c", type=float, required=True)
    p = co_sub.add_parser("estimate")
    p.add_argument("--ratio", required=True)
    p.add_argument("--iters", type=int, default=10000)
    p.add_argument("--seed", type=int, default=argparse.SUPPRESS)

    cj = sub.add_parser("conjecture", help="subtraction-free checks")
    cj_sub = cj.add_subparsers(dest="action", required=True)
    p = cj_sub.add_parser("subfree")
    p.add_argument("--n", type=int, required=True)
    group = p.add_mutually_exclusive_group()
    group.add_argument("--facet-index", type=int, default=None)
    group.add_argument("--all", action="store_true")

    rp = sub.add_parser("reproduce", help="run the full reproduction suite")
    rp.add_argument("--all", action="store_true")
    rp.add_argument("--criterion", type=int, default=None)
    rp.add_argument("--report-dir", default=None)
    rp.add_argument("--seed", type=int, default=argparse.SUPPRESS)

    return parser


_HANDLERS = {
    "lorentzian": _cmd_lorentzian,
    "cutcone": _cmd_cutcone,
    "ratio": _cmd_ratio,
    "metric": _cmd_metric,
    "constant": _cmd_constant,
    "conjecture": _cmd_conjecture,
    "reproduce": _cmd_reproduce,
}


def _render(report, fmt, stream):
    if fmt == "json":
        json.dump(report, stream, indent=2, sort_keys=True)
        stream.write("\n")
        return
    stream.write(f"command   : {report['command']}\n")
    stream.write(f"seed      : {report['seed']}\n")
    stream.write(f"version   : {report['version']}\n")
    stream.write(f"time (ms) : {report['wall_time_ms']}\n")
    stream.write("results:\n")
    for key, value in sorted(report["results"].items()):
        stream.write(f"  {key} = {json.dumps(value, sort_keys=True)}\n")


def run(argv, stream=None) -> int:
    """Dispatch a CLI invocation and print its run report; returns the exit code."""
    stream = stream or sys.stdout
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        if exc.code not in (0, None):
            json.dump({"error": {"code": "usage", "message": "invalid arguments",
                                 "context": {"argv": list(argv)}}},
                      stream, sort_keys=True)
            stream.write("\n")
            return 2
        return 0

    start = time.perf_counter()
    try:
        results, code, digests = _HANDLERS[args.command](args)
    except ResourceLimitError as exc:
        json.dump(exc.as_json(), stream, sort_keys=True)
        stream.write("\n")
        return 3
    except InvariantViolation as exc:
        json.dump(exc.as_json(), stream, sort_keys=True)
        stream.write("\n")
        return 1
    except LorcutError as exc:
        json.dump(exc.as_json(), stream, sort_keys=True)
        stream.write("\n")
        return 2
    except Exception as exc:  # never a bare crash
        json.dump({"error": {"code": "internal", "message": str(exc),
                             "context": {"type": type(exc).__name__}}},
                  stream, sort_keys=True)
        stream.write("\n")
        return 2

    wall_ms = int((time.perf_counter() - start) * 1000)
    flags = {k: v for k, v in vars(args).items()
             if k not in ("command", "format") and v is not None}
    report = {
        "command": " ".join([args.command] + ([args.action] if hasattr(args, "action") else [])),
        "inputs": {"flags": {k: str(v) for k, v in sorted(flags.items())},
                   "files": digests},
        "results": results,
        "seed": args.seed,
        "version": __version__,
        "wall_time_ms": wall_ms,
    }
    _render(report, args.format, stream)
    return code


def main():
    sys.exit(run(sys.argv[1:]))


if __name__ == "__main__":
    main()
