"""Command-line interface.

Every subcommand prints canonical JSON (sorted keys) on stdout.  Exit codes:
0 success, 1 mathematical failure (a check did not hold), 2 usage or
resource errors.
"""

from __future__ import annotations

import argparse
import itertools
import json
import sys
from typing import Any

from . import assembly, bn, chipfire, transmission, zperm
from .graph import GraphError
from .serialize import (
    divisor_from_json,
    divisor_to_json,
    dumps,
    graph_from_json,
    marked_from_json,
    marked_to_json,
    perm_from_json,
    perm_to_json,
)


class UsageError(Exception):
    pass


def _load(path: str) -> Any:
    try:
        with open(path) as fh:
            return json.load(fh)
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise UsageError(f"{path}: invalid JSON ({exc})") from None


def _graph_and_divisor(args):
    data = _load(args.graph)
    g = graph_from_json(data)
    d = divisor_from_json(_load(args.divisor), g.n)
    return data, g, d


def cmd_rank(args) -> tuple[dict, int]:
    _, g, d = _graph_and_divisor(args)
    return {"rank": chipfire.rank(g, d), "degree": d.degree, "genus": g.genus}, 0


def cmd_reduce(args) -> tuple[dict, int]:
    _, g, d = _graph_and_divisor(args)
    if not 0 <= args.base < g.n:
        raise UsageError(f"base vertex {args.base} out of range")
    red = chipfire.reduce(g, d, args.base)
    return {"base": args.base, "reduced": divisor_to_json(red), "degree": red.degree}, 0


def cmd_tau(args) -> tuple[dict, int]:
    data, g, d = _graph_and_divisor(args)
    mg = marked_from_json(data)
    rep = transmission.transmission_permutation(mg, d)
    out = rep.to_json()
    out["k"] = chipfire.torsion_order(mg)
    if rep.submodular and out["k"] >= 2:
        out["inv_k"] = zperm.inv_k(rep.tau, out["k"])
    return out, 0


def cmd_certify(args) -> tuple[dict, int]:
    mg = marked_from_json(_load(args.graph))
    rep = transmission.certify_k_general_transmission(
        mg,
        cap=args.cap,
        dump=args.dump_perms,
        large_k_surrogate=args.large_k_surrogate,
        workers=args.workers,
    )
    return rep.to_json(), 0 if rep.passed else 1


def _chain_spec(data: dict) -> assembly.ChainSpec:
    try:
        loops = tuple((int(l["l1"]), int(l["l2"])) for l in data["loops"])
    except (KeyError, TypeError) as exc:
        raise UsageError(f"malformed chain spec: {exc}") from None
    xi = data.get("xi")
    return assembly.ChainSpec(loops, tuple(int(x) for x in xi) if xi is not None else None)


def _chain_entry(spec: assembly.ChainSpec, mg) -> dict[str, Any]:
    d = assembly.break_divisor(spec)
    rep = transmission.transmission_permutation(mg, d)
    entry: dict[str, Any] = {"xi": list(spec.xi), "divisor": divisor_to_json(d)}
    entry.update(rep.to_json())
    if len(set(spec.torsions)) == 1 and rep.submodular:
        product = assembly.chain_break_product(spec)
        entry["demazure"] = perm_to_json(product)
        entry["agrees"] = product == rep.tau
    else:
        entry["agrees"] = None
    return entry


def cmd_chain(args) -> tuple[dict, int]:
    spec = _chain_spec(_load(args.spec))
    mg = assembly.build_chain(spec)
    out: dict[str, Any] = {
        "graph": marked_to_json(mg),
        "genus": mg.genus,
        "torsions": list(spec.torsions),
        "k": chipfire.torsion_order(mg),
    }
    code = 0
    if args.all_xi:
        ranges = [range(l1 + l2) for l1, l2 in spec.loops]
        entries = [_chain_entry(spec.with_xi(xi), mg) for xi in itertools.product(*ranges)]
        out["entries"] = entries
        out["all_agree"] = all(e["agrees"] is not False for e in entries)
        code = 0 if out["all_agree"] else 1
    elif spec.xi is not None:
        out["entry"] = _chain_entry(spec, mg)
        code = 0 if out["entry"]["agrees"] is not False else 1
    return out, code


def cmd_demazure(args) -> tuple[dict, int]:
    p = perm_from_json(_load(args.left))
    q = perm_from_json(_load(args.right))
    prod = zperm.demazure(p, q)
    out: dict[str, Any] = {"product": perm_to_json(prod)}
    code = 0
    if args.oracle:
        oracle = zperm.tropical_demazure(p, q)
        out["oracle"] = perm_to_json(oracle)
        out["agrees"] = oracle == prod
        code = 0 if out["agrees"] else 1
    return out, code


def cmd_glue(args) -> tuple[dict, int]:
    m1 = marked_from_json(_load(args.left))
    m2 = marked_from_json(_load(args.right))
    d1 = divisor_from_json(_load(args.d1), m1.n)
    d2 = divisor_from_json(_load(args.d2), m2.n)
    gg = assembly.vertex_glue(m1, m2)
    glued = assembly.glue_rank(gg, d1, d2)
    direct = chipfire.rank(gg.result.graph, gg.embed(d1, d2))
    out: dict[str, Any] = {
        "graph": marked_to_json(gg.result),
        "divisor": divisor_to_json(gg.embed(d1, d2)),
        "glue_rank": glued,
        "rank": direct,
        "agrees": glued == direct,
    }
    ok = glued == direct
    if args.verify_chaining:
        ch = assembly.verify_chaining(gg, d1, d2)
        out["chaining"] = ch.to_json()
        ok = ok and ch.tables_agree and ch.demazure_agrees is not False
    return out, 0 if ok else 1


def cmd_splitting(args) -> tuple[dict, int]:
    data, g, d = _graph_and_divisor(args)
    mg = marked_from_json(data)
    rep = bn.splitting_type(mg, d)
    return rep.to_json(), 0


def cmd_bn_check(args) -> tuple[dict, int]:
    data, g, d = _graph_and_divisor(args)
    mg = marked_from_json(data)
    if chipfire.rank(g, d) < 0:
        return {"rank": -1, "note": "no vanishing sequences for rank -1"}, 0
    rep = transmission.transmission_permutation(mg, d)
    if not rep.submodular:
        vd = bn.vanishing_data(mg, d)
        return {
            "r": vd.r,
            "a": list(vd.a),
            "b": list(vd.b),
            "rho": vd.rho,
            "submodular": False,
            "witness": list(rep.witness),
        }, 0
    report = bn.check_inv_bound(mg, d)
    return report.to_json(), 0 if report.ok else 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="twicemarked", description=__doc__.splitlines()[0])
    parser.add_argument("--format", choices=("json", "text"), default="json")
    parser.add_argument(
        "--rank-degree-cap", type=int, default=None, help=f"default {chipfire.RANK_DEGREE_CAP}"
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def with_graph_divisor(p):
        p.add_argument("--graph", required=True)
        p.add_argument("--divisor", required=True)
        return p

    with_graph_divisor(sub.add_parser("rank", help="Baker-Norine rank")).set_defaults(func=cmd_rank)
    p = with_graph_divisor(sub.add_parser("reduce", help="q-reduced representative"))
    p.add_argument("--base", type=int, required=True)
    p.set_defaults(func=cmd_reduce)
    with_graph_divisor(sub.add_parser("tau", help="transmission permutation")).set_defaults(func=cmd_tau)

    p = sub.add_parser("certify", help="certify k-general transmission")
    p.add_argument("--graph", required=True)
    p.add_argument("--dump-perms", action="store_true")
    p.add_argument("--cap", type=int, default=None, help=f"default {chipfire.PICARD_CAP}")
    p.add_argument("--large-k-surrogate", action="store_true")
    p.add_argument("--workers", type=int, default=1)
    p.set_defaults(func=cmd_certify)

    p = sub.add_parser("chain", help="build a chain of loops")
    p.add_argument("--spec", required=True)
    p.add_argument("--all-xi", action="store_true")
    p.set_defaults(func=cmd_chain)

    p = sub.add_parser("demazure", help="Demazure product of two permutations")
    p.add_argument("--left", required=True)
    p.add_argument("--right", required=True)
    p.add_argument("--oracle", action="store_true")
    p.set_defaults(func=cmd_demazure)

    p = sub.add_parser("glue", help="vertex gluing and the gluing rank formula")
    p.add_argument("--left", required=True)
    p.add_argument("--right", required=True)
    p.add_argument("--d1", required=True)
    p.add_argument("--d2", required=True)
    p.add_argument("--verify-chaining", action="store_true")
    p.set_defaults(func=cmd_glue)

    with_graph_divisor(sub.add_parser("splitting", help="splitting type for F = kv")).set_defaults(
        func=cmd_splitting
    )
    with_graph_divisor(sub.add_parser("bn-check", help="vanishing data and inversion bound")).set_defaults(
        func=cmd_bn_check
    )
    return parser


def _as_text(payload: Any, indent: str = "") -> str:
    lines = []
    for key in sorted(payload):
        value = payload[key]
        if isinstance(value, dict):
            lines.append(f"{indent}{key}:")
            lines.append(_as_text(value, indent + "  "))
        else:
            lines.append(f"{indent}{key}: {json.dumps(value, sort_keys=True)}")
    return "\n".join(lines)


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    saved_cap = chipfire.RANK_DEGREE_CAP
    if args.rank_degree_cap is not None:
        chipfire.RANK_DEGREE_CAP = args.rank_degree_cap
    try:
        payload, code = args.func(args)
    except (UsageError, GraphError, zperm.ZPermError, chipfire.ResourceLimitError,
            transmission.TransmissionError, bn.BNError) as exc:
        print(dumps({"error": str(exc), "type": type(exc).__name__}))
        return 2
    finally:
        chipfire.RANK_DEGREE_CAP = saved_cap
    if args.format == "text":
        print(_as_text(json.loads(dumps(payload))))
    else:
        print(dumps(payload))
    return code


if __name__ == "__main__":
    sys.exit(main())
