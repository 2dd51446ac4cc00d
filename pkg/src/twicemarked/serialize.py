"""JSON wire formats for graphs, divisors, permutations and chain specs."""

from __future__ import annotations

import json
from typing import Any

from .graph import Divisor, Graph, GraphError, MarkedGraph
from .zperm import INFINITE, Periodic, ShiftFinite, ZPerm, ZPermError


def graph_to_json(g: Graph, marks: tuple[int, int] | None = None) -> dict[str, Any]:
    out: dict[str, Any] = {"vertices": g.n, "edges": [list(e) for e in g.edges]}
    if marks is not None:
        out["marks"] = {"v": marks[0], "w": marks[1]}
    return out


def marked_to_json(mg: MarkedGraph) -> dict[str, Any]:
    return graph_to_json(mg.graph, (mg.v, mg.w))


def graph_from_json(data: dict[str, Any]) -> Graph:
    try:
        return Graph(int(data["vertices"]), [tuple(e) for e in data["edges"]])
    except (KeyError, TypeError) as exc:
        raise GraphError(f"malformed graph JSON: {exc}") from None


def marked_from_json(data: dict[str, Any]) -> MarkedGraph:
    g = graph_from_json(data)
    marks = data.get("marks")
    if not marks or "v" not in marks or "w" not in marks:
        raise GraphError("graph JSON lacks marks {'v': .., 'w': ..}")
    return MarkedGraph(g, int(marks["v"]), int(marks["w"]))


def divisor_to_json(d: Divisor) -> dict[str, Any]:
    return {"coeffs": {str(u): c for u, c in d.support().items()}}


def divisor_from_json(data: dict[str, Any], n: int) -> Divisor:
    coeffs = data.get("coeffs")
    if not isinstance(coeffs, dict):
        raise GraphError("divisor JSON needs a 'coeffs' object")
    return Divisor.from_mapping(n, {int(u): int(c) for u, c in coeffs.items()})


def perm_to_json(p: ZPerm) -> dict[str, Any]:
    if isinstance(p, Periodic):
        return {"kind": "periodic", "period": p.period, "values": list(p.values)}
    return {
        "kind": "shift-finite",
        "shift": p.shift,
        "exceptions": {str(n): t for n, t in p.exceptions},
    }


def perm_from_json(data: dict[str, Any]) -> ZPerm:
    kind = data.get("kind")
    if kind == "periodic":
        return Periodic(int(data["period"]), data["values"])
    if kind == "shift-finite":
        exc = {int(n): int(t) for n, t in data.get("exceptions", {}).items()}
        return ShiftFinite(int(data["shift"]), exc)
    raise ZPermError(f"unknown permutation kind {kind!r}")


def count_to_json(x):
    return "INFINITE" if x is INFINITE else x


def dumps(payload: Any) -> str:
    """Canonical JSON: sorted keys, fixed separators."""
    return json.dumps(payload, sort_keys=True, indent=2, default=_default)


def _default(obj):
    if obj is INFINITE:
        return "INFINITE"
    if isinstance(obj, ZPerm):
        return perm_to_json(obj)
    if isinstance(obj, Divisor):
        return list(obj)
    raise TypeError(f"cannot serialize {type(obj).__name__}")
