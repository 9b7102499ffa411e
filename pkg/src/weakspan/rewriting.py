"""Weak rewrite rules, matching, direct transformations, parallel coherence,
and the parallel coherent transformation."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Optional, Sequence

from .algebras import (Algebra, AlgebraMorphism, FiniteEnum, LabelSet, Lit,
                       NatPlus, OpApp, TermAlg, Value, Var,
                       render_value, term_variables, value_sort_key)
from .attrgraphs import (AttrMorphism, AttributedGraph, compose_attr,
                         identity_attr, validate_attr_morphism)
from .constructions import (colimit_of_neutrals, limit_of_neutrals,
                            pushout_along_neutral, pushout_complement)
from .graphs import GraphMorphism, enumerate_morphisms, is_mono


class IncoherentSetError(Exception):
    """A set of direct transformations fails pairwise coherence."""

    def __init__(self, pair: tuple[int, int], element: str | None, message: str):
        super().__init__(message)
        self.pair = pair
        self.element = element


def _labels_variables(g: AttributedGraph) -> set[str]:
    out: set[str] = set()
    for labels in g.labeling.values():
        for v in labels:
            if isinstance(v, (Var, Lit, OpApp)):
                out |= term_variables(v)
    return out


@dataclass
class WeakSpan:
    """A rewrite rule L <- K <- I -> R with neutral injective structure maps.

    K is what survives deletion; I is the part whose presence the rule
    actively requires when extending; R is what gets added.
    """

    name: str
    L: AttributedGraph
    K: AttributedGraph
    I: AttributedGraph
    R: AttributedGraph
    l: AttrMorphism
    i: AttrMorphism
    r: AttrMorphism

    def __post_init__(self):
        if not isinstance(self.L.algebra, (TermAlg, FiniteEnum)):
            raise ValueError("rule algebra must be a term algebra or a finite enumeration")
        for label, morph, src, tgt in (("l", self.l, self.K, self.L),
                                       ("i", self.i, self.I, self.K),
                                       ("r", self.r, self.I, self.R)):
            if morph.source != src or morph.target != tgt:
                raise ValueError(f"rule map {label} does not run between the right objects")
            if not morph.is_neutral:
                raise ValueError(f"rule map {label} must be neutral")
            if not is_mono(morph.sigma):
                raise ValueError(f"rule map {label} must be injective")
        if isinstance(self.L.algebra, TermAlg):
            in_left = _labels_variables(self.L)
            elsewhere = (_labels_variables(self.K) | _labels_variables(self.I)
                         | _labels_variables(self.R))
            declared = set(self.L.algebra.variables)
            if not elsewhere <= in_left:
                raise ValueError(
                    f"rule {self.name!r}: variables {sorted(elsewhere - in_left)} "
                    "do not occur in the left side")
            if not declared <= in_left:
                raise ValueError(
                    f"rule {self.name!r}: declared variables {sorted(declared - in_left)} "
                    "do not occur in the left side")

    @property
    def algebra(self) -> Algebra:
        return self.L.algebra

    def is_plain_span(self) -> bool:
        return self.I == self.K and self.i.sigma.is_identity()


@dataclass
class Match:
    """An injective occurrence of a rule's left side in a host graph."""

    rule: WeakSpan
    host: AttributedGraph
    m: AttrMorphism

    def __post_init__(self):
        if self.m.source != self.rule.L or self.m.target != self.host:
            raise ValueError("match morphism does not run from the rule's left side to the host")
        if not is_mono(self.m.sigma):
            raise ValueError("match must be injective")

    @property
    def alpha(self) -> AlgebraMorphism:
        return self.m.alpha


@dataclass
class DirectTransformation:
    """One rule application: the full double-square diagram record."""

    match: Match
    D: AttributedGraph
    k: AttrMorphism      # K -> D, carries alpha
    f: AttrMorphism      # D -> host, neutral
    H: AttributedGraph
    g: AttrMorphism      # D -> H, neutral
    n: AttrMorphism      # R -> H, carries alpha

    @property
    def rule(self) -> WeakSpan:
        return self.match.rule

    @property
    def host(self) -> AttributedGraph:
        return self.match.host


@dataclass
class CoherenceWitness:
    """A verified morphism from one rule's required part into another's context."""

    j: AttrMorphism
    from_index: int
    into_index: int


@dataclass
class CoherenceCheckResult:
    matrix: Optional[dict]
    failing_pair: Optional[tuple[int, int]] = None
    failing_element: Optional[str] = None
    reason: str = ""

    @property
    def ok(self) -> bool:
        return self.matrix is not None

    def __bool__(self) -> bool:
        return self.ok


@dataclass
class ParallelStep:
    """A parallel coherent transformation: contexts intersected, additions glued."""

    gammas: list
    witnesses: dict
    Dprime: AttributedGraph
    e_legs: list
    mediators: list
    H_primes: list
    Hprime: AttributedGraph
    h_legs: list


def _match_value(t: Value, w: Value, partial: dict, host_alg: Algebra) -> Iterable[dict]:
    """All extensions of a partial assignment sending term t to host value w."""
    if isinstance(t, Var):
        if t.name in partial:
            if partial[t.name] == w:
                yield partial
        else:
            ext = dict(partial)
            ext[t.name] = w
            yield ext
    elif isinstance(t, Lit):
        if isinstance(host_alg, NatPlus):
            if w == t.value:
                yield partial
        elif t == w:
            yield partial
    elif isinstance(t, OpApp):
        if isinstance(host_alg, NatPlus) and t.op == "+":
            if isinstance(w, int):
                for part in range(w + 1):
                    for mid in _match_value(t.args[0], part, partial, host_alg):
                        yield from _match_value(t.args[1], w - part, mid, host_alg)
        elif isinstance(host_alg, TermAlg):
            if isinstance(w, OpApp) and w.op == t.op and len(w.args) == len(t.args):
                states = [partial]
                for ta, wa in zip(t.args, w.args):
                    states = [ext for st in states for ext in _match_value(ta, wa, st, host_alg)]
                yield from states
    else:
        # ground enumerated value
        if t == w:
            yield partial


def _term_size(t: Value) -> int:
    if isinstance(t, OpApp):
        return 1 + sum(_term_size(a) for a in t.args)
    return 1


def _solve_label_constraints(constraints: list[tuple[Value, LabelSet]],
                             host_alg: Algebra) -> list[dict]:
    """All variable assignments under which every term lands in its allowed set."""
    ordered = sorted(set((t, s) for t, s in constraints),
                     key=lambda c: (_term_size(c[0]), render_value(c[0]), c[1].render()))
    solutions: list[dict] = []

    def walk(idx: int, partial: dict) -> None:
        if idx == len(ordered):
            solutions.append(partial)
            return
        t, allowed = ordered[idx]
        for w in sorted(allowed, key=value_sort_key):
            for ext in _match_value(t, w, partial, host_alg):
                walk(idx + 1, ext)

    walk(0, {})
    unique = []
    seen = set()
    for sol in solutions:
        key = tuple(sorted((v, render_value(x)) for v, x in sol.items()))
        if key not in seen:
            seen.add(key)
            unique.append(sol)
    return unique


def find_matches(rule: WeakSpan, host: AttributedGraph) -> list[Match]:
    """All injective matches of the rule's left side, each with every variable
    assignment that satisfies the label condition, in canonical order."""
    rule_alg = rule.algebra
    if isinstance(rule_alg, FiniteEnum) and rule_alg != host.algebra:
        raise ValueError("an enumerated rule only matches hosts over the same algebra")
    matches: list[Match] = []
    for sigma in enumerate_morphisms(rule.L.graph, host.graph, injective_only=True):
        constraints = []
        feasible = True
        for x in rule.L.element_ids():
            allowed = host.label(sigma.apply(x))
            for t in rule.L.label(x):
                if not allowed:
                    feasible = False
                    break
                constraints.append((t, allowed))
            if not feasible:
                break
        if not feasible:
            continue
        if isinstance(rule_alg, FiniteEnum):
            ok = all(t in s for t, s in constraints)
            assignments = [{}] if ok else []
        else:
            assignments = _solve_label_constraints(constraints, host.algebra)
        assignments.sort(key=lambda a: tuple(sorted((v, render_value(x)) for v, x in a.items())))
        for assignment in assignments:
            alpha = AlgebraMorphism(rule_alg, host.algebra, assignment)
            m = AttrMorphism(rule.L, host, sigma, alpha)
            matches.append(Match(rule, host, m))
    return matches


def apply_direct(match: Match) -> DirectTransformation:
    """Weak double-pushout application of a rule at a match."""
    comp = pushout_complement(match.rule.l, match.m)
    ki = compose_attr(comp.k_to_complement, match.rule.i)
    po = pushout_along_neutral(match.rule.r, ki)
    return DirectTransformation(
        match=match,
        D=comp.complement,
        k=comp.k_to_complement,
        f=comp.complement_to_host,
        H=po.apex,
        g=po.leg_from_other_side,
        n=po.leg_from_neutral_side)


def associated_span(rule: WeakSpan) -> tuple[WeakSpan, AttrMorphism]:
    """The plain span obtained by pushing the right side out along the
    required-part inclusion; returns it with the comparison map R -> R'."""
    po = pushout_along_neutral(rule.r, rule.i)
    r_prime = po.leg_from_other_side       # K -> R', neutral
    i_prime = po.leg_from_neutral_side     # R -> R'
    span = WeakSpan(
        name=f"{rule.name}~",
        L=rule.L, K=rule.K, I=rule.K, R=po.apex,
        l=rule.l, i=identity_attr(rule.K), r=r_prime)
    return span, i_prime


def apply_span_dpo(span_rule: WeakSpan, match: Match) -> DirectTransformation:
    """Classical double-pushout application of a plain span (I equals K)."""
    if not span_rule.is_plain_span():
        raise ValueError("rule is not a plain span (its required part must equal K)")
    rebased = match if match.rule is span_rule else Match(span_rule, match.host, match.m)
    return apply_direct(rebased)


def _context_witness(required: AttributedGraph, via: AttrMorphism,
                     ctx: DirectTransformation) -> tuple[Optional[AttrMorphism], Optional[tuple[str, str]]]:
    """The unique j with ctx.f o j == via, if it exists.

    ``via`` runs from ``required`` into the common host.  Returns either the
    witness or (element, reason) for the first obstruction.
    """
    preimage = {}
    for x in ctx.D.element_ids():
        preimage[ctx.f.apply(x)] = x
    node_map: dict[str, str] = {}
    edge_map: dict[str, str] = {}
    for x in required.element_ids():
        target = via.apply(x)
        if target not in preimage:
            return None, (x, f"host element {target!r} is deleted from the context")
        if required.graph.is_node(x):
            node_map[x] = preimage[target]
        else:
            edge_map[x] = preimage[target]
    sigma = GraphMorphism(required.graph, ctx.D.graph, node_map, edge_map)
    j = AttrMorphism(required, ctx.D, sigma, via.alpha, check=False)
    report = validate_attr_morphism(j)
    if not report.ok:
        worst = report.violations[0]
        return None, (worst.element, worst.describe())
    if compose_attr(ctx.f, j) != via:
        return None, (required.element_ids()[0] if required.element_ids() else "",
                      "witness does not commute")
    return j, None


def check_parallel_coherent(g1: DirectTransformation,
                            g2: DirectTransformation) -> Optional[tuple[CoherenceWitness, CoherenceWitness]]:
    """Witnesses embedding each rule's required part into the other's context."""
    if g1.host != g2.host:
        raise ValueError("direct transformations live on different hosts")
    via1 = compose_attr(g1.f, compose_attr(g1.k, g1.rule.i))
    via2 = compose_attr(g2.f, compose_attr(g2.k, g2.rule.i))
    j1, _ = _context_witness(g1.rule.I, via1, g2)
    if j1 is None:
        return None
    j2, _ = _context_witness(g2.rule.I, via2, g1)
    if j2 is None:
        return None
    return (CoherenceWitness(j1, from_index=0, into_index=1),
            CoherenceWitness(j2, from_index=1, into_index=0))


def check_parallel_independent(g1: DirectTransformation,
                               g2: DirectTransformation) -> Optional[tuple[CoherenceWitness, CoherenceWitness]]:
    """Witnesses embedding each full left side into the other's context."""
    if g1.host != g2.host:
        raise ValueError("direct transformations live on different hosts")
    j1, _ = _context_witness(g1.rule.L, g1.match.m, g2)
    if j1 is None:
        return None
    j2, _ = _context_witness(g2.rule.L, g2.match.m, g1)
    if j2 is None:
        return None
    return (CoherenceWitness(j1, from_index=0, into_index=1),
            CoherenceWitness(j2, from_index=1, into_index=0))


def coherent_set_check(gammas: Sequence[DirectTransformation]) -> CoherenceCheckResult:
    """Pairwise coherence over a whole set, assembling the full witness matrix.

    The matrix maps (a, b) to the witness from rule a's required part into
    context b; diagonal entries are the composites through the rule's own
    context.
    """
    if not gammas:
        raise ValueError("need at least one direct transformation")
    host = gammas[0].host
    for g in gammas[1:]:
        if g.host != host:
            raise ValueError("direct transformations live on different hosts")
    matrix: dict[tuple[int, int], CoherenceWitness] = {}
    vias = []
    for a, ga in enumerate(gammas):
        ki = compose_attr(ga.k, ga.rule.i)
        vias.append(compose_attr(ga.f, ki))
        matrix[(a, a)] = CoherenceWitness(ki, from_index=a, into_index=a)
    for a, ga in enumerate(gammas):
        for b, gb in enumerate(gammas):
            if a == b:
                continue
            j, obstruction = _context_witness(ga.rule.I, vias[a], gb)
            if j is None:
                element, reason = obstruction
                return CoherenceCheckResult(
                    matrix=None, failing_pair=(a, b), failing_element=element,
                    reason=reason)
            matrix[(a, b)] = CoherenceWitness(j, from_index=a, into_index=b)
    return CoherenceCheckResult(matrix=matrix)


def pct(gammas: Sequence[DirectTransformation]) -> ParallelStep:
    """Parallel coherent transformation of a host by a coherent set.

    Intersects all contexts, maps each rule's required part into the
    intersection, pushes out each right side there, and glues the results.
    """
    gammas = list(gammas)
    check = coherent_set_check(gammas)
    if not check.ok:
        raise IncoherentSetError(
            check.failing_pair, check.failing_element,
            f"pair {check.failing_pair} is not parallel coherent at "
            f"element {check.failing_element!r}: {check.reason}")
    for g in gammas:
        if not (g.f.is_neutral and g.g.is_neutral):
            raise ValueError("direct transformations must have neutral context legs")

    dprime, e_legs = limit_of_neutrals([g.f for g in gammas])
    index: dict[tuple, str] = {}
    for z in dprime.element_ids():
        key = tuple(leg.apply(z) for leg in e_legs)
        if key in index:
            raise RuntimeError("limit legs fail to separate elements")
        index[key] = z

    mediators = []
    p = len(gammas)
    for c, gc in enumerate(gammas):
        node_map: dict[str, str] = {}
        edge_map: dict[str, str] = {}
        for x in gc.rule.I.element_ids():
            key = tuple(check.matrix[(c, a)].j.apply(x) for a in range(p))
            z = index.get(key)
            if z is None:
                raise RuntimeError("witness images miss the limit object")
            if gc.rule.I.graph.is_node(x):
                node_map[x] = z
            else:
                edge_map[x] = z
        sigma = GraphMorphism(gc.rule.I.graph, dprime.graph, node_map, edge_map)
        d_c = AttrMorphism(gc.rule.I, dprime, sigma, gc.match.alpha)
        for a in range(p):
            if compose_attr(e_legs[a], d_c) != check.matrix[(c, a)].j:
                raise RuntimeError("mediator disagrees with a coherence witness")
        mediators.append(d_c)

    h_primes = [pushout_along_neutral(gc.rule.r, d_c)
                for gc, d_c in zip(gammas, mediators)]
    hprime, h_legs = colimit_of_neutrals([po.leg_from_other_side for po in h_primes])
    return ParallelStep(
        gammas=gammas, witnesses=check.matrix, Dprime=dprime, e_legs=e_legs,
        mediators=mediators, H_primes=h_primes, Hprime=hprime, h_legs=h_legs)


def _rename_rule_variables(rule: WeakSpan, taken: set[str]) -> WeakSpan:
    alg = rule.algebra
    if not isinstance(alg, TermAlg):
        return rule
    renaming: dict[str, str] = {}
    for v in sorted(alg.variables):
        fresh = v
        while fresh in taken:
            fresh += "'"
        renaming[v] = fresh
        taken.add(fresh)
    if all(k == v for k, v in renaming.items()):
        return rule
    new_alg = TermAlg(alg.signature, renaming.values())

    def rename_term(t: Value) -> Value:
        if isinstance(t, Var):
            return Var(renaming[t.name])
        if isinstance(t, OpApp):
            return OpApp(t.op, tuple(rename_term(a) for a in t.args))
        return t

    def rename_obj(obj: AttributedGraph) -> AttributedGraph:
        labeling = {x: LabelSet(rename_term(v) for v in labels)
                    for x, labels in obj.labeling.items()}
        return AttributedGraph(obj.graph, new_alg, labeling)

    L, K, I, R = map(rename_obj, (rule.L, rule.K, rule.I, rule.R))
    ident = AlgebraMorphism.identity(new_alg)
    return WeakSpan(
        name=rule.name, L=L, K=K, I=I, R=R,
        l=AttrMorphism(K, L, rule.l.sigma, ident),
        i=AttrMorphism(I, K, rule.i.sigma, ident),
        r=AttrMorphism(I, R, rule.r.sigma, ident))


def coproduct_rule(r1: WeakSpan, r2: WeakSpan) -> WeakSpan:
    """Componentwise disjoint union of two rules over a merged algebra."""
    from .graphs import disjoint_union, compose as compose_graph

    alg1, alg2 = r1.algebra, r2.algebra
    if isinstance(alg1, FiniteEnum) or isinstance(alg2, FiniteEnum):
        if alg1 != alg2:
            raise ValueError("enumerated rules must share their algebra")
        combined: Algebra = alg1
        rr1, rr2 = r1, r2
    else:
        if alg1.signature != alg2.signature:
            raise ValueError("term rules must share their operation signature")
        taken = set(alg1.variables)
        rr2 = _rename_rule_variables(r2, taken)
        combined = TermAlg(alg1.signature, alg1.variables | rr2.algebra.variables)
        rr1 = r1

    def widen(obj: AttributedGraph) -> AttributedGraph:
        return AttributedGraph(obj.graph, combined, obj.labeling)

    parts = {}
    injections = {}
    for tag in ("L", "K", "I", "R"):
        a, b = getattr(rr1, tag), getattr(rr2, tag)
        total, in_a, in_b = disjoint_union(a.graph, b.graph)
        labeling = {in_a.apply(x): a.label(x) for x in a.element_ids()}
        labeling.update({in_b.apply(x): b.label(x) for x in b.element_ids()})
        parts[tag] = AttributedGraph(total, combined, labeling)
        injections[tag] = (in_a, in_b)

    ident = AlgebraMorphism.identity(combined)

    def sum_map(tag_src: str, tag_tgt: str, m1: AttrMorphism, m2: AttrMorphism) -> AttrMorphism:
        src, tgt = parts[tag_src], parts[tag_tgt]
        in_src = injections[tag_src]
        in_tgt = injections[tag_tgt]
        node_map: dict[str, str] = {}
        edge_map: dict[str, str] = {}
        for side, m in ((0, m1), (1, m2)):
            for n in m.source.graph.nodes:
                node_map[in_src[side].apply(n)] = in_tgt[side].apply(m.apply(n))
            for e in m.source.graph.edges:
                edge_map[in_src[side].apply(e)] = in_tgt[side].apply(m.apply(e))
        return AttrMorphism(src, tgt, GraphMorphism(src.graph, tgt.graph, node_map, edge_map), ident)

    return WeakSpan(
        name=f"{rr1.name}+{rr2.name}",
        L=parts["L"], K=parts["K"], I=parts["I"], R=parts["R"],
        l=sum_map("K", "L", rr1.l, rr2.l),
        i=sum_map("I", "K", rr1.i, rr2.i),
        r=sum_map("I", "R", rr1.r, rr2.r))


def derive_span_from_pct(rules: Sequence[WeakSpan],
                         matches: Optional[Sequence[Match]] = None) -> WeakSpan:
    """Collapse rules sharing one left side into a single plain span.

    Runs the parallel coherent transformation with the shared left side as
    its own host (identity matches) and reads off L <- D' -> H'.
    """
    if not rules:
        raise ValueError("need at least one rule")
    shared_l = rules[0].L
    for rule in rules[1:]:
        if rule.L != shared_l:
            raise ValueError("rules do not share an identical left side")
    if matches is None:
        matches = [Match(rule, shared_l, identity_attr(shared_l)) for rule in rules]
    else:
        matches = list(matches)
        for match in matches:
            if match.host != shared_l or not match.m.sigma.is_identity() \
                    or not match.m.is_neutral:
                raise ValueError("matches must be identity occurrences of the shared left side")
    gammas = [apply_direct(m) for m in matches]
    step = pct(gammas)
    left_leg = compose_attr(gammas[0].f, step.e_legs[0])
    right_leg = compose_attr(step.h_legs[0], step.H_primes[0].leg_from_other_side)
    return WeakSpan(
        name="+".join(r.name for r in rules),
        L=shared_l, K=step.Dprime, I=step.Dprime, R=step.Hprime,
        l=left_leg, i=identity_attr(step.Dprime), r=right_leg)
