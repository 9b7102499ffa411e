"""Reading and writing rule systems, graphs, and DOT exports."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

from .algebras import (Algebra, AlgebraMorphism, FiniteEnum, LabelSet, Lit,
                       NatPlus, PLUS_SIGNATURE, TermAlg, TermSyntaxError,
                       Value, parse_term, render_value, value_sort_key)
from .attrgraphs import AttrMorphism, AttributedGraph
from .graphs import Graph, GraphMorphism, SortSignature
from .rewriting import WeakSpan


class ParseError(ValueError):
    """The file is not syntactically well formed."""


class ValidationError(ValueError):
    """The file parses but violates a structural invariant."""


@dataclass
class SystemSpec:
    """A sort signature, an algebra, a rule list, and an optional host graph."""

    signature: SortSignature
    algebra: Algebra
    rules: list[WeakSpan] = field(default_factory=list)
    host: Optional[AttributedGraph] = None


def _require(cond: bool, message: str) -> None:
    if not cond:
        raise ValidationError(message)


def _parse_signature(data) -> SortSignature:
    _require(isinstance(data, dict), "'sorts' must be an object")
    _require("nodes" in data, "'sorts' needs a 'nodes' list")
    _require("edges" in data, "'sorts' needs an 'edges' object")
    edges = {}
    for name, pair in data["edges"].items():
        _require(isinstance(pair, list) and len(pair) == 2,
                 f"edge sort {name!r} needs [source sort, target sort]")
        edges[name] = (pair[0], pair[1])
    try:
        return SortSignature(data["nodes"], edges)
    except ValueError as exc:
        raise ValidationError(str(exc)) from None


def _parse_algebra(data) -> Algebra:
    if data == "nat":
        return NatPlus()
    if isinstance(data, dict) and "enum" in data:
        return FiniteEnum(str(v) for v in data["enum"])
    if isinstance(data, dict) and "terms" in data:
        return TermAlg(PLUS_SIGNATURE, data["terms"])
    raise ValidationError(f"unknown algebra declaration {data!r}")


def _parse_label(raw, algebra: Algebra, where: str) -> Value:
    if isinstance(algebra, NatPlus):
        _require(isinstance(raw, int) and not isinstance(raw, bool) and raw >= 0,
                 f"{where}: natural-number label expected, got {raw!r}")
        return raw
    if isinstance(algebra, FiniteEnum):
        value = str(raw)
        _require(algebra.contains(value), f"{where}: label {raw!r} is not an enumerated value")
        return value
    if isinstance(raw, int):
        return Lit(raw)
    try:
        term = parse_term(str(raw))
    except TermSyntaxError as exc:
        raise ParseError(f"{where}: {exc}") from None
    _require(algebra.contains(term), f"{where}: term {raw!r} uses undeclared symbols")
    return term


def _parse_graph(data, signature: SortSignature, algebra: Algebra,
                 where: str) -> AttributedGraph:
    _require(isinstance(data, dict), f"{where} must be an object")
    nodes = {}
    edges = {}
    labeling = {}
    for entry in data.get("nodes", []):
        _require("id" in entry and "sort" in entry, f"{where}: node needs 'id' and 'sort'")
        nid = str(entry["id"])
        _require(nid not in nodes, f"{where}: duplicate node id {nid!r}")
        nodes[nid] = entry["sort"]
        labeling[nid] = [_parse_label(v, algebra, f"{where} node {nid!r}")
                         for v in entry.get("label", [])]
    for entry in data.get("edges", []):
        for key in ("id", "sort", "src", "tgt"):
            _require(key in entry, f"{where}: edge needs {key!r}")
        eid = str(entry["id"])
        _require(eid not in edges, f"{where}: duplicate edge id {eid!r}")
        _require(str(entry["src"]) in nodes,
                 f"{where}: edge {eid!r} names unknown source node {entry['src']!r}")
        _require(str(entry["tgt"]) in nodes,
                 f"{where}: edge {eid!r} names unknown target node {entry['tgt']!r}")
        edges[eid] = (entry["sort"], str(entry["src"]), str(entry["tgt"]))
        labeling[eid] = [_parse_label(v, algebra, f"{where} edge {eid!r}")
                         for v in entry.get("label", [])]
    try:
        graph = Graph(signature, nodes, edges)
        return AttributedGraph(graph, algebra, labeling)
    except ValueError as exc:
        raise ValidationError(f"{where}: {exc}") from None


def _parse_map(data, source: AttributedGraph, target: AttributedGraph,
               alpha: AlgebraMorphism, where: str) -> AttrMorphism:
    _require(isinstance(data, dict), f"{where} must be an object with 'nodes' and 'edges'")
    node_map = {str(k): str(v) for k, v in data.get("nodes", {}).items()}
    edge_map = {str(k): str(v) for k, v in data.get("edges", {}).items()}
    try:
        sigma = GraphMorphism(source.graph, target.graph, node_map, edge_map)
        return AttrMorphism(source, target, sigma, alpha)
    except ValueError as exc:
        raise ValidationError(f"{where}: {exc}") from None


def _parse_rule(data, signature: SortSignature, host_algebra: Algebra) -> WeakSpan:
    _require(isinstance(data, dict), "each rule must be an object")
    _require("name" in data, "rule needs a 'name'")
    name = str(data["name"])
    where = f"rule {name!r}"
    if isinstance(host_algebra, FiniteEnum):
        _require(not data.get("variables"),
                 f"{where}: enumerated systems use variable-free rules")
        rule_alg: Algebra = host_algebra
    else:
        rule_alg = TermAlg(PLUS_SIGNATURE, [str(v) for v in data.get("variables", [])])
    graphs = {}
    for tag in ("L", "K", "I", "R"):
        _require(tag in data, f"{where} needs graph {tag!r}")
        graphs[tag] = _parse_graph(data[tag], signature, rule_alg, f"{where} {tag}")
    ident = AlgebraMorphism.identity(rule_alg)
    l = _parse_map(data.get("l"), graphs["K"], graphs["L"], ident, f"{where} map l")
    i = _parse_map(data.get("i"), graphs["I"], graphs["K"], ident, f"{where} map i")
    r = _parse_map(data.get("r"), graphs["I"], graphs["R"], ident, f"{where} map r")
    try:
        return WeakSpan(name=name, L=graphs["L"], K=graphs["K"], I=graphs["I"],
                        R=graphs["R"], l=l, i=i, r=r)
    except ValueError as exc:
        raise ValidationError(f"{where}: {exc}") from None


def loads_system(text: str, source: str = "<string>") -> SystemSpec:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"{source}: line {exc.lineno}, column {exc.colno}: {exc.msg}") from None
    _require(isinstance(data, dict), f"{source}: top level must be an object")
    _require("sorts" in data, f"{source}: missing 'sorts'")
    _require("algebra" in data, f"{source}: missing 'algebra'")
    signature = _parse_signature(data["sorts"])
    algebra = _parse_algebra(data["algebra"])
    rules = [_parse_rule(entry, signature, algebra) for entry in data.get("rules", [])]
    host = None
    if "host" in data:
        host = _parse_graph(data["host"], signature, algebra, "host")
    elif "nodes" in data or "edges" in data:
        host = _parse_graph(data, signature, algebra, "host")
    return SystemSpec(signature=signature, algebra=algebra, rules=rules, host=host)


def load_system(path) -> SystemSpec:
    path = Path(path)
    return loads_system(path.read_text(), source=str(path))


def _signature_json(signature: SortSignature):
    return {"nodes": sorted(signature.node_sorts),
            "edges": {name: list(signature.edge_sorts[name])
                      for name in sorted(signature.edge_sorts)}}


def _algebra_json(algebra: Algebra):
    if isinstance(algebra, NatPlus):
        return "nat"
    if isinstance(algebra, FiniteEnum):
        return {"enum": sorted(algebra.values)}
    if isinstance(algebra, TermAlg):
        return {"terms": sorted(algebra.variables)}
    raise ValueError(f"cannot serialize algebra {algebra!r}")


def _label_json(v: Value):
    if isinstance(v, int):
        return v
    if isinstance(v, str):
        return v
    return render_value(v)


def _graph_json(graph: AttributedGraph):
    nodes = [{"id": n, "sort": graph.graph.nodes[n],
              "label": [_label_json(v) for v in sorted(graph.label(n), key=value_sort_key)]}
             for n in sorted(graph.graph.nodes)]
    edges = [{"id": e, "sort": graph.graph.edges[e][0],
              "src": graph.graph.edges[e][1], "tgt": graph.graph.edges[e][2],
              "label": [_label_json(v) for v in sorted(graph.label(e), key=value_sort_key)]}
             for e in sorted(graph.graph.edges)]
    return {"nodes": nodes, "edges": edges}


def _map_json(m: AttrMorphism):
    return {"nodes": {k: m.sigma.node_map[k] for k in sorted(m.sigma.node_map)},
            "edges": {k: m.sigma.edge_map[k] for k in sorted(m.sigma.edge_map)}}


def _rule_json(rule: WeakSpan):
    out = {"name": rule.name}
    if isinstance(rule.algebra, TermAlg):
        out["variables"] = sorted(rule.algebra.variables)
    for tag in ("L", "K", "I", "R"):
        out[tag] = _graph_json(getattr(rule, tag))
    out["l"] = _map_json(rule.l)
    out["i"] = _map_json(rule.i)
    out["r"] = _map_json(rule.r)
    return out


def save_graph(graph: AttributedGraph, path) -> None:
    """Write one graph as a standalone file that load_system reads back."""
    data = {"sorts": _signature_json(graph.graph.signature),
            "algebra": _algebra_json(graph.algebra)}
    data.update(_graph_json(graph))
    Path(path).write_text(json.dumps(data, indent=2) + "\n")


def save_system(system: SystemSpec, path) -> None:
    data = {"sorts": _signature_json(system.signature),
            "algebra": _algebra_json(system.algebra),
            "rules": [_rule_json(rule) for rule in system.rules]}
    if system.host is not None:
        data["host"] = _graph_json(system.host)
    Path(path).write_text(json.dumps(data, indent=2) + "\n")


def _dot_quote(text: str) -> str:
    return '"' + text.replace("\\", "\\\\").replace('"', '\\"') + '"'


def export_dot(graph: AttributedGraph, path) -> None:
    """Write a deterministic DOT rendering: labels as node text, sorts on edges."""
    lines = ["digraph weakspan {"]
    for n in sorted(graph.graph.nodes):
        text = f"{n} {graph.label(n).render()}"
        lines.append(f"  {_dot_quote(n)} [label={_dot_quote(text)}];")
    ordered = sorted(graph.graph.edges,
                     key=lambda e: (graph.graph.edges[e][1], graph.graph.edges[e][2],
                                    graph.graph.edges[e][0], e))
    for e in ordered:
        sort, src, tgt = graph.graph.edges[e]
        text = sort if not graph.label(e) else f"{sort} {graph.label(e).render()}"
        lines.append(f"  {_dot_quote(src)} -> {_dot_quote(tgt)} [label={_dot_quote(text)}];")
    lines.append("}")
    Path(path).write_text("\n".join(lines) + "\n")
