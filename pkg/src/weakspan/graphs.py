"""Finite sorted directed multigraphs and their structure-preserving maps."""

from __future__ import annotations

import itertools
from collections import Counter
from typing import Callable, Iterable, Mapping, Optional


class SortSignature:
    """Declares the node sorts and the edge sorts (with their endpoint sorts)."""

    def __init__(self, node_sorts: Iterable[str], edge_sorts: Mapping[str, tuple[str, str]]):
        self.node_sorts = frozenset(node_sorts)
        self.edge_sorts = {name: (src, tgt) for name, (src, tgt) in edge_sorts.items()}
        for name, (src, tgt) in self.edge_sorts.items():
            if src not in self.node_sorts or tgt not in self.node_sorts:
                raise ValueError(f"edge sort {name!r} references undeclared node sort")
        if self.node_sorts & set(self.edge_sorts):
            raise ValueError("node sorts and edge sorts must use distinct names")

    def __eq__(self, other) -> bool:
        return (isinstance(other, SortSignature)
                and self.node_sorts == other.node_sorts
                and self.edge_sorts == other.edge_sorts)

    def __ne__(self, other) -> bool:
        return not self.__eq__(other)

    def __repr__(self) -> str:
        return f"SortSignature({sorted(self.node_sorts)}, {self.edge_sorts})"


class Graph:
    """A finite directed multigraph whose nodes and edges carry sorts.

    ``nodes`` maps node id to node sort; ``edges`` maps edge id to
    ``(edge_sort, src_node_id, tgt_node_id)``.  Ids are opaque strings and
    must be unique across nodes and edges together, so an element of the
    graph is identified by its id alone.
    """

    def __init__(self, signature: SortSignature, nodes: Mapping[str, str],
                 edges: Mapping[str, tuple[str, str, str]]):
        self.signature = signature
        self.nodes = dict(nodes)
        self.edges = dict(edges)
        clash = set(self.nodes) & set(self.edges)
        if clash:
            raise ValueError(f"ids used for both a node and an edge: {sorted(clash)}")
        for nid, sort in self.nodes.items():
            if sort not in signature.node_sorts:
                raise ValueError(f"node {nid!r} has undeclared sort {sort!r}")
        for eid, (sort, src, tgt) in self.edges.items():
            if sort not in signature.edge_sorts:
                raise ValueError(f"edge {eid!r} has undeclared sort {sort!r}")
            want_src, want_tgt = signature.edge_sorts[sort]
            if src not in self.nodes:
                raise ValueError(f"edge {eid!r} has unknown source {src!r}")
            if tgt not in self.nodes:
                raise ValueError(f"edge {eid!r} has unknown target {tgt!r}")
            if self.nodes[src] != want_src or self.nodes[tgt] != want_tgt:
                raise ValueError(f"edge {eid!r} endpoint sorts do not match sort {sort!r}")

    def element_ids(self) -> list[str]:
        return sorted(self.nodes) + sorted(self.edges)

    def element_count(self) -> int:
        return len(self.nodes) + len(self.edges)

    def is_node(self, x: str) -> bool:
        return x in self.nodes

    def is_edge(self, x: str) -> bool:
        return x in self.edges

    def has_element(self, x: str) -> bool:
        return x in self.nodes or x in self.edges

    def sort_of(self, x: str) -> str:
        if x in self.nodes:
            return self.nodes[x]
        if x in self.edges:
            return self.edges[x][0]
        raise KeyError(x)

    def __eq__(self, other) -> bool:
        return (isinstance(other, Graph)
                and self.signature == other.signature
                and self.nodes == other.nodes
                and self.edges == other.edges)

    def __ne__(self, other) -> bool:
        return not self.__eq__(other)

    def __repr__(self) -> str:
        return f"Graph({len(self.nodes)} nodes, {len(self.edges)} edges)"


class GraphMorphism:
    """A sort- and incidence-preserving map between two graphs."""

    def __init__(self, source: Graph, target: Graph,
                 node_map: Mapping[str, str], edge_map: Mapping[str, str]):
        self.source = source
        self.target = target
        self.node_map = dict(node_map)
        self.edge_map = dict(edge_map)
        if set(self.node_map) != set(source.nodes):
            raise ValueError("node map is not total on the source nodes")
        if set(self.edge_map) != set(source.edges):
            raise ValueError("edge map is not total on the source edges")
        for n, image in self.node_map.items():
            if image not in target.nodes:
                raise ValueError(f"node {n!r} maps to unknown node {image!r}")
            if source.nodes[n] != target.nodes[image]:
                raise ValueError(f"node {n!r} changes sort under the map")
        for e, image in self.edge_map.items():
            if image not in target.edges:
                raise ValueError(f"edge {e!r} maps to unknown edge {image!r}")
            s_sort, s_src, s_tgt = source.edges[e]
            t_sort, t_src, t_tgt = target.edges[image]
            if s_sort != t_sort:
                raise ValueError(f"edge {e!r} changes sort under the map")
            if self.node_map[s_src] != t_src or self.node_map[s_tgt] != t_tgt:
                raise ValueError(f"edge {e!r} breaks incidence under the map")

    @staticmethod
    def identity(g: Graph) -> "GraphMorphism":
        return GraphMorphism(g, g, {n: n for n in g.nodes}, {e: e for e in g.edges})

    def apply(self, x: str) -> str:
        if x in self.node_map:
            return self.node_map[x]
        if x in self.edge_map:
            return self.edge_map[x]
        raise KeyError(x)

    def element_map(self) -> dict[str, str]:
        merged = dict(self.node_map)
        merged.update(self.edge_map)
        return merged

    def is_identity(self) -> bool:
        return (self.source == self.target
                and all(k == v for k, v in self.node_map.items())
                and all(k == v for k, v in self.edge_map.items()))

    def __eq__(self, other) -> bool:
        return (isinstance(other, GraphMorphism)
                and self.source == other.source
                and self.target == other.target
                and self.node_map == other.node_map
                and self.edge_map == other.edge_map)

    def __ne__(self, other) -> bool:
        return not self.__eq__(other)

    def __repr__(self) -> str:
        return f"GraphMorphism({self.node_map}, {self.edge_map})"


def compose(g: GraphMorphism, f: GraphMorphism) -> GraphMorphism:
    """The composite mapping x to g(f(x)); requires f.target == g.source."""
    if f.target != g.source:
        raise ValueError("composition mismatch: f.target differs from g.source")
    return GraphMorphism(
        f.source, g.target,
        {n: g.node_map[v] for n, v in f.node_map.items()},
        {e: g.edge_map[v] for e, v in f.edge_map.items()})


def is_mono(f: GraphMorphism) -> bool:
    """True when both the node map and the edge map are injective."""
    return (len(set(f.node_map.values())) == len(f.node_map)
            and len(set(f.edge_map.values())) == len(f.edge_map))


def _edge_index(g: Graph) -> dict[tuple[str, str, str], list[str]]:
    idx: dict[tuple[str, str, str], list[str]] = {}
    for eid, (sort, src, tgt) in g.edges.items():
        idx.setdefault((sort, src, tgt), []).append(eid)
    for lst in idx.values():
        lst.sort()
    return idx


def _node_order(pattern: Graph) -> list[str]:
    """Order pattern nodes so each one (after the first) touches an earlier one when possible."""
    adjacency: dict[str, set[str]] = {n: set() for n in pattern.nodes}
    for sort, src, tgt in pattern.edges.values():
        adjacency[src].add(tgt)
        adjacency[tgt].add(src)
    order: list[str] = []
    placed: set[str] = set()
    remaining = set(pattern.nodes)
    while remaining:
        scored = sorted(remaining, key=lambda n: (-len(adjacency[n] & placed), n))
        pick = scored[0]
        order.append(pick)
        placed.add(pick)
        remaining.remove(pick)
    return order


def enumerate_morphisms(pattern: Graph, host: Graph,
                        injective_only: bool = False) -> list[GraphMorphism]:
    """Every morphism from pattern into host, in a canonical deterministic order.

    The order is lexicographic on the tuple of host images taken over the
    sorted pattern node ids, then over the sorted pattern edge ids.
    """
    if pattern.signature != host.signature:
        raise ValueError("pattern and host use different sort signatures")

    host_edge_idx = _edge_index(host)
    host_by_sort: dict[str, list[str]] = {}
    for nid, sort in host.nodes.items():
        host_by_sort.setdefault(sort, []).append(nid)
    for lst in host_by_sort.values():
        lst.sort()
    # host adjacency indexed by (edge sort, endpoint) for candidate derivation
    out_by = {}  # (sort, src) -> set of tgt
    in_by = {}   # (sort, tgt) -> set of src
    for sort, src, tgt in host.edges.values():
        out_by.setdefault((sort, src), set()).add(tgt)
        in_by.setdefault((sort, tgt), set()).add(src)

    order = _node_order(pattern)
    pattern_edges = sorted(pattern.edges)
    results: list[GraphMorphism] = []

    def edge_candidates(pe: str, node_map: dict[str, str]) -> list[str]:
        sort, src, tgt = pattern.edges[pe]
        return host_edge_idx.get((sort, node_map[src], node_map[tgt]), [])

    def assign_edges(pos: int, node_map: dict[str, str],
                     edge_map: dict[str, str], used: set[str]) -> None:
        if pos == len(pattern_edges):
            results.append(GraphMorphism(pattern, host, dict(node_map), dict(edge_map)))
            return
        pe = pattern_edges[pos]
        for he in edge_candidates(pe, node_map):
            if injective_only and he in used:
                continue
            edge_map[pe] = he
            used.add(he)
            assign_edges(pos + 1, node_map, edge_map, used)
            used.discard(he)
            del edge_map[pe]

    def node_candidates(pn: str, node_map: dict[str, str]) -> list[str]:
        candidate_sets = []
        for sort, src, tgt in pattern.edges.values():
            if src == pn and tgt in node_map and tgt != pn:
                candidate_sets.append(in_by.get((sort, node_map[tgt]), set()))
            if tgt == pn and src in node_map and src != pn:
                candidate_sets.append(out_by.get((sort, node_map[src]), set()))
        if candidate_sets:
            cands = set.intersection(*candidate_sets) if len(candidate_sets) > 1 else set(candidate_sets[0])
            cands = {c for c in cands if host.nodes.get(c) == pattern.nodes[pn]}
            return sorted(cands)
        return host_by_sort.get(pattern.nodes[pn], [])

    def consistent(pn: str, image: str, node_map: dict[str, str]) -> bool:
        for sort, src, tgt in pattern.edges.values():
            if src == pn and (tgt == pn or tgt in node_map):
                t = image if tgt == pn else node_map[tgt]
                if (sort, image, t) not in host_edge_idx:
                    return False
            elif tgt == pn and src in node_map:
                if (sort, node_map[src], image) not in host_edge_idx:
                    return False
        return True

    def assign_nodes(pos: int, node_map: dict[str, str], used: set[str]) -> None:
        if pos == len(order):
            assign_edges(0, node_map, {}, set())
            return
        pn = order[pos]
        for c in node_candidates(pn, node_map):
            if injective_only and c in used:
                continue
            if not consistent(pn, c, node_map):
                continue
            node_map[pn] = c
            used.add(c)
            assign_nodes(pos + 1, node_map, used)
            used.discard(c)
            del node_map[pn]

    assign_nodes(0, {}, set())

    node_key_ids = sorted(pattern.nodes)
    edge_key_ids = pattern_edges
    results.sort(key=lambda m: (tuple(m.node_map[n] for n in node_key_ids),
                                tuple(m.edge_map[e] for e in edge_key_ids)))
    return results


def find_isomorphism(a: Graph, b: Graph,
                     node_key: Optional[Callable[[str], object]] = None,
                     edge_key: Optional[Callable[[str], object]] = None,
                     node_key_b: Optional[Callable[[str], object]] = None,
                     edge_key_b: Optional[Callable[[str], object]] = None) -> Optional[GraphMorphism]:
    """Find one bijective morphism a -> b compatible with the given element keys.

    Keys act as invariants: a node of ``a`` may only map to a node of ``b``
    with an equal key (and likewise for edges).  Used with label keys this
    gives attributed isomorphism search.
    """
    if a.signature != b.signature:
        raise ValueError("graphs use different sort signatures")
    nk_a = node_key or (lambda x: None)
    ek_a = edge_key or (lambda x: None)
    nk_b = node_key_b or nk_a
    ek_b = edge_key_b or ek_a

    if len(a.nodes) != len(b.nodes) or len(a.edges) != len(b.edges):
        return None

    def degree_profile(g: Graph, ek) -> dict[str, tuple]:
        outs: dict[str, Counter] = {n: Counter() for n in g.nodes}
        ins: dict[str, Counter] = {n: Counter() for n in g.nodes}
        for eid, (sort, src, tgt) in g.edges.items():
            outs[src][(sort, ek(eid))] += 1
            ins[tgt][(sort, ek(eid))] += 1
        return {n: (tuple(sorted(outs[n].items())), tuple(sorted(ins[n].items())))
                for n in g.nodes}

    prof_a = degree_profile(a, ek_a)
    prof_b = degree_profile(b, ek_b)

    def node_class(g, n, prof, nk):
        return (g.nodes[n], nk(n), prof[n])

    classes_a = Counter(node_class(a, n, prof_a, nk_a) for n in a.nodes)
    classes_b = Counter(node_class(b, n, prof_b, nk_b) for n in b.nodes)
    if classes_a != classes_b:
        return None

    # pairwise edge fingerprints between ordered node pairs (and loops)
    def pair_counts(g: Graph, ek) -> dict[tuple[str, str], Counter]:
        pc: dict[tuple[str, str], Counter] = {}
        for eid, (sort, src, tgt) in g.edges.items():
            pc.setdefault((src, tgt), Counter())[(sort, ek(eid))] += 1
        return pc

    pc_a = pair_counts(a, ek_a)
    pc_b = pair_counts(b, ek_b)

    b_by_class: dict[tuple, list[str]] = {}
    for n in sorted(b.nodes):
        b_by_class.setdefault(node_class(b, n, prof_b, nk_b), []).append(n)

    a_order = sorted(a.nodes, key=lambda n: (len(b_by_class[node_class(a, n, prof_a, nk_a)]), n))

    assignment: dict[str, str] = {}
    used: set[str] = set()

    def ok(n: str, c: str) -> bool:
        for m, d in assignment.items():
            if pc_a.get((n, m), Counter()) != pc_b.get((c, d), Counter()):
                return False
            if pc_a.get((m, n), Counter()) != pc_b.get((d, c), Counter()):
                return False
        if pc_a.get((n, n), Counter()) != pc_b.get((c, c), Counter()):
            return False
        return True

    def search(pos: int) -> bool:
        if pos == len(a_order):
            return True
        n = a_order[pos]
        for c in b_by_class[node_class(a, n, prof_a, nk_a)]:
            if c in used or not ok(n, c):
                continue
            assignment[n] = c
            used.add(c)
            if search(pos + 1):
                return True
            used.discard(c)
            del assignment[n]
        return False

    if not search(0):
        return None

    # pair edges between matched endpoints, grouped by (sort, key)
    edge_map: dict[str, str] = {}
    groups_a: dict[tuple, list[str]] = {}
    for eid, (sort, src, tgt) in a.edges.items():
        groups_a.setdefault((assignment[src], assignment[tgt], sort, ek_a(eid)), []).append(eid)
    groups_b: dict[tuple, list[str]] = {}
    for eid, (sort, src, tgt) in b.edges.items():
        groups_b.setdefault((src, tgt, sort, ek_b(eid)), []).append(eid)
    for key, ids_a in groups_a.items():
        ids_b = groups_b.get(key, [])
        if len(ids_a) != len(ids_b):
            return None
        for ea, eb in zip(sorted(ids_a), sorted(ids_b)):
            edge_map[ea] = eb
    return GraphMorphism(a, b, assignment, edge_map)


def is_isomorphic(a: Graph, b: Graph) -> Optional[GraphMorphism]:
    """A bijective sort- and incidence-preserving morphism a -> b, if one exists."""
    return find_isomorphism(a, b)


def disjoint_union(a: Graph, b: Graph) -> tuple[Graph, GraphMorphism, GraphMorphism]:
    """Fresh-renamed sum of two graphs with its two injections."""
    if a.signature != b.signature:
        raise ValueError("graphs use different sort signatures")
    ren_a = {x: f"du1:{x}" for x in itertools.chain(a.nodes, a.edges)}
    ren_b = {x: f"du2:{x}" for x in itertools.chain(b.nodes, b.edges)}
    nodes = {ren_a[n]: s for n, s in a.nodes.items()}
    nodes.update({ren_b[n]: s for n, s in b.nodes.items()})
    edges = {ren_a[e]: (sort, ren_a[src], ren_a[tgt]) for e, (sort, src, tgt) in a.edges.items()}
    edges.update({ren_b[e]: (sort, ren_b[src], ren_b[tgt]) for e, (sort, src, tgt) in b.edges.items()})
    total = Graph(a.signature, nodes, edges)
    inj_a = GraphMorphism(a, total, {n: ren_a[n] for n in a.nodes}, {e: ren_a[e] for e in a.edges})
    inj_b = GraphMorphism(b, total, {n: ren_b[n] for n in b.nodes}, {e: ren_b[e] for e in b.edges})
    return total, inj_a, inj_b


def rename_graph(g: Graph, mapping: Mapping[str, str]) -> Graph:
    """Rebuild a graph with element ids replaced per mapping (must stay unique)."""
    new_ids = [mapping.get(x, x) for x in g.element_ids()]
    if len(set(new_ids)) != len(new_ids):
        raise ValueError("renaming collapses element ids")
    nodes = {mapping.get(n, n): s for n, s in g.nodes.items()}
    edges = {mapping.get(e, e): (sort, mapping.get(src, src), mapping.get(tgt, tgt))
             for e, (sort, src, tgt) in g.edges.items()}
    return Graph(g.signature, nodes, edges)
