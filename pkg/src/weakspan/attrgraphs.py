"""Attributed graphs (graph + algebra + labeling) and their lax morphisms."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping, Optional

from .algebras import (Algebra, AlgebraMorphism, LabelSet, EMPTY_LABELS,
                       apply_to_labelset, render_value, value_sort_key)
from .graphs import Graph, GraphMorphism, compose, find_isomorphism, rename_graph


class AttributedGraph:
    """A finite sorted graph whose every element carries a finite label set.

    Elements missing from the supplied labeling get the empty label set, so
    the stored labeling is total on nodes and edges.
    """

    def __init__(self, graph: Graph, algebra: Algebra,
                 labeling: Optional[Mapping[str, object]] = None):
        self.graph = graph
        self.algebra = algebra
        labeling = dict(labeling or {})
        extra = set(labeling) - set(graph.element_ids())
        if extra:
            raise ValueError(f"labeling names unknown elements {sorted(extra)}")
        self.labeling: dict[str, LabelSet] = {}
        for x in graph.element_ids():
            labels = LabelSet(labeling.get(x, ()))
            for v in labels:
                if not algebra.contains(v):
                    raise ValueError(
                        f"label {render_value(v)} on element {x!r} is outside the carrier")
            self.labeling[x] = labels

    def label(self, x: str) -> LabelSet:
        return self.labeling[x]

    def element_ids(self) -> list[str]:
        return self.graph.element_ids()

    def element_count(self) -> int:
        return self.graph.element_count()

    def with_labels(self, updates: Mapping[str, object]) -> "AttributedGraph":
        merged = dict(self.labeling)
        for x, labels in updates.items():
            merged[x] = LabelSet(labels)
        return AttributedGraph(self.graph, self.algebra, merged)

    def __eq__(self, other) -> bool:
        return (isinstance(other, AttributedGraph)
                and self.graph == other.graph
                and self.algebra == other.algebra
                and self.labeling == other.labeling)

    def __ne__(self, other) -> bool:
        return not self.__eq__(other)

    def __repr__(self) -> str:
        parts = ", ".join(f"{x}:{self.labeling[x].render()}"
                          for x in self.element_ids() if self.labeling[x])
        return f"AttributedGraph({self.graph!r}; {parts})"


@dataclass
class Violation:
    element: str
    image: str
    mapped_labels: LabelSet
    target_labels: LabelSet

    def describe(self) -> str:
        return (f"element {self.element!r}: mapped labels {self.mapped_labels.render()} "
                f"not contained in {self.target_labels.render()} at {self.image!r}")


@dataclass
class ValidationReport:
    ok: bool
    violations: list = field(default_factory=list)

    def __bool__(self) -> bool:
        return self.ok

    def describe(self) -> str:
        if self.ok:
            return "valid"
        return "; ".join(v.describe() for v in self.violations)


class AttrMorphism:
    """A pair of a graph morphism and an algebra morphism, lax on labels.

    Lax means the image of each source label set is contained in the label
    set of the image element; a morphism is neutral when its algebra part is
    an identity.
    """

    def __init__(self, source: AttributedGraph, target: AttributedGraph,
                 sigma: GraphMorphism, alpha: AlgebraMorphism, check: bool = True):
        self.source = source
        self.target = target
        self.sigma = sigma
        self.alpha = alpha
        if sigma.source != source.graph or sigma.target != target.graph:
            raise ValueError("graph part does not run between the underlying graphs")
        if alpha.source != source.algebra or alpha.target != target.algebra:
            raise ValueError("algebra part does not run between the algebras")
        if check:
            report = validate_attr_morphism(self)
            if not report.ok:
                raise ValueError(f"label condition fails: {report.describe()}")

    @property
    def is_neutral(self) -> bool:
        return self.alpha.is_identity and self.source.algebra == self.target.algebra

    def apply(self, x: str) -> str:
        return self.sigma.apply(x)

    def is_mono(self) -> bool:
        from .graphs import is_mono
        return is_mono(self.sigma)

    def __eq__(self, other) -> bool:
        return (isinstance(other, AttrMorphism)
                and self.source == other.source
                and self.target == other.target
                and self.sigma == other.sigma
                and self.alpha == other.alpha)

    def __ne__(self, other) -> bool:
        return not self.__eq__(other)

    def __repr__(self) -> str:
        return f"AttrMorphism({self.sigma.node_map}, {self.alpha!r})"


def validate_attr_morphism(m: AttrMorphism) -> ValidationReport:
    """Check the label condition on every element; list each violation."""
    violations = []
    for x in m.source.element_ids():
        image = m.sigma.apply(x)
        mapped = apply_to_labelset(m.alpha, m.source.label(x))
        have = m.target.label(image)
        if not mapped <= have:
            violations.append(Violation(x, image, LabelSet(mapped), have))
    return ValidationReport(not violations, violations)


def compose_attr(g: AttrMorphism, f: AttrMorphism) -> AttrMorphism:
    """Componentwise composite g after f."""
    if f.target != g.source:
        raise ValueError("attributed morphisms do not compose")
    return AttrMorphism(f.source, g.target,
                        compose(g.sigma, f.sigma),
                        g.alpha.compose(f.alpha))


def identity_attr(a: AttributedGraph) -> AttrMorphism:
    return AttrMorphism(a, a, GraphMorphism.identity(a.graph),
                        AlgebraMorphism.identity(a.algebra))


def is_attr_isomorphic(a: AttributedGraph, b: AttributedGraph) -> Optional[AttrMorphism]:
    """A label-preserving isomorphism a -> b (label sets equal, not merely included)."""
    if a.algebra != b.algebra:
        return None
    if a.graph == b.graph and a.labeling == b.labeling:
        return identity_attr(a)

    def key_a(x: str):
        return tuple(sorted(a.labeling[x], key=value_sort_key))

    def key_b(x: str):
        return tuple(sorted(b.labeling[x], key=value_sort_key))

    iso = find_isomorphism(a.graph, b.graph,
                           node_key=key_a, edge_key=key_a,
                           node_key_b=key_b, edge_key_b=key_b)
    if iso is None:
        return None
    return AttrMorphism(a, b, iso, AlgebraMorphism.identity(a.algebra))


def rename_attributed(a: AttributedGraph, mapping: Mapping[str, str]) -> AttributedGraph:
    """Rename element ids throughout the graph and its labeling."""
    graph = rename_graph(a.graph, mapping)
    labeling = {mapping.get(x, x): labels for x, labels in a.labeling.items()}
    return AttributedGraph(graph, a.algebra, labeling)
