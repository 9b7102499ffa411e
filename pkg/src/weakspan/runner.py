"""Iterated rewriting: one engine step applies every available match.

Parallel mode intersects all contexts and glues all additions in one move.
Sequential mode replays the same match list one at a time, skipping matches
invalidated by earlier applications; it exists for comparison runs.

Both modes rename result elements so that surviving elements keep their host
ids and created elements get fresh `s<step>:<match>:<id>` names.  Ids then
stay stable across steps, which keeps reports readable and lets matches be
carried from one intermediate graph to the next.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .attrgraphs import AttrMorphism, AttributedGraph, compose_attr, rename_attributed
from .constructions import GluingError
from .graphs import GraphMorphism
from .fileio import SystemSpec
from .hexgrid import HexGridSpec, hex_system, live_cells
from .rewriting import (DirectTransformation, Match, ParallelStep, apply_direct,
                        find_matches, pct)


@dataclass
class StepReport:
    """What one engine step did, in fixed fields plus a rendered form."""

    index: int
    mode: str
    matches_per_rule: dict[str, int] = field(default_factory=dict)
    skipped_gluing: list[str] = field(default_factory=list)
    skipped_invalid: list[str] = field(default_factory=list)
    applied: int = 0
    coherent: bool | None = None
    witness_count: int | None = None
    dprime_elements: int | None = None
    hprime_elements: int | None = None
    fixpoint: bool = False

    def describe(self) -> str:
        parts = [f"step {self.index} [{self.mode}]"]
        if self.fixpoint:
            parts.append("no matches: fixpoint reached")
            return " ".join(parts)
        counts = ", ".join(f"{name}: {n}" for name, n in sorted(self.matches_per_rule.items()))
        parts.append(f"matches {{{counts}}}")
        if self.skipped_gluing:
            parts.append(f"gluing-skipped [{'; '.join(self.skipped_gluing)}]")
        if self.skipped_invalid:
            parts.append(f"invalidated [{'; '.join(self.skipped_invalid)}]")
        if self.coherent is not None:
            parts.append(f"coherence matrix {self.applied}x{self.applied} "
                         f"({self.witness_count} witnesses)")
            parts.append(f"D' {self.dprime_elements} elements,"
                         f" H' {self.hprime_elements} elements")
        else:
            parts.append(f"applied {self.applied}")
        return " ".join(parts)


@dataclass
class RunResult:
    final: AttributedGraph
    steps: list[StepReport]
    history: list[AttributedGraph]

    def report_text(self) -> str:
        return "\n".join(step.describe() for step in self.steps)


def _fresh_id(candidate: str, used: set[str]) -> str:
    while candidate in used:
        candidate += "'"
    used.add(candidate)
    return candidate


def relabel_parallel_result(step: ParallelStep, step_index: int) -> AttributedGraph:
    """Rename the glued result back onto host ids plus fresh ids for additions."""
    through_first = compose_attr(step.h_legs[0], step.H_primes[0].leg_from_other_side)
    into_host = compose_attr(step.gammas[0].f, step.e_legs[0])
    mapping: dict[str, str] = {}
    used: set[str] = set()
    for z in step.Dprime.element_ids():
        mapping[through_first.apply(z)] = _fresh_id(into_host.apply(z), used)
    for c, (gamma, po, leg) in enumerate(zip(step.gammas, step.H_primes, step.h_legs)):
        born = compose_attr(leg, po.leg_from_neutral_side)
        for x in gamma.rule.R.element_ids():
            y = born.apply(x)
            if y not in mapping:
                mapping[y] = _fresh_id(f"s{step_index}:{c}:{x}", used)
    return rename_attributed(step.Hprime, mapping)


def relabel_direct_result(gamma: DirectTransformation, step_index: int,
                          match_index: int) -> AttributedGraph:
    """Rename a single application's result: context ids survive, additions fresh."""
    kept = {gamma.g.apply(z) for z in gamma.D.element_ids()}
    mapping: dict[str, str] = {}
    used = set(kept)
    for x in gamma.rule.R.element_ids():
        y = gamma.n.apply(x)
        if y not in kept and y not in mapping:
            mapping[y] = _fresh_id(f"s{step_index}:{match_index}:{x}", used)
    return rename_attributed(gamma.H, mapping)


def transport_match(match: Match, host: AttributedGraph) -> Match:
    """Re-anchor a match on another graph by element ids, with full revalidation.

    Raises ValueError when the target elements are gone or no longer carry the
    labels the left side requires.
    """
    sigma = GraphMorphism(match.rule.L.graph, host.graph,
                          match.m.sigma.node_map, match.m.sigma.edge_map)
    return Match(match.rule, host, AttrMorphism(match.rule.L, host, sigma, match.m.alpha))


def all_matches(system: SystemSpec, host: AttributedGraph) -> list[Match]:
    """Every match of every rule, rules in declaration order."""
    found = []
    for rule in system.rules:
        found.extend(find_matches(rule, host))
    return found


def apply_parallel_step(system: SystemSpec, host: AttributedGraph,
                        step_index: int) -> tuple[AttributedGraph, StepReport]:
    report = StepReport(index=step_index, mode="pct")
    gammas = []
    for rule in system.rules:
        matches = find_matches(rule, host)
        report.matches_per_rule[rule.name] = len(matches)
        for pos, match in enumerate(matches):
            try:
                gammas.append(apply_direct(match))
            except GluingError as err:
                report.skipped_gluing.append(f"{rule.name}#{pos}: {err}")
    if not gammas:
        report.fixpoint = True
        return host, report
    report.applied = len(gammas)
    step = pct(gammas)
    report.coherent = True
    report.witness_count = len(step.witnesses)
    report.dprime_elements = step.Dprime.graph.element_count()
    report.hprime_elements = step.Hprime.graph.element_count()
    return relabel_parallel_result(step, step_index), report


def apply_sequential_step(system: SystemSpec, host: AttributedGraph, step_index: int,
                          order: list[int] | None = None) -> tuple[AttributedGraph, StepReport]:
    """Apply the step-start matches one at a time, skipping stale ones.

    The optional order permutes the canonical match list; it must cover the
    whole list exactly once.
    """
    report = StepReport(index=step_index, mode="sequential")
    matches = all_matches(system, host)
    for rule in system.rules:
        report.matches_per_rule[rule.name] = sum(
            1 for match in matches if match.rule.name == rule.name)
    if not matches:
        report.fixpoint = True
        return host, report
    if order is None:
        order = list(range(len(matches)))
    if sorted(order) != list(range(len(matches))):
        raise ValueError("order must be a permutation of the match indices")
    current = host
    for pos in order:
        match = matches[pos]
        try:
            carried = transport_match(match, current)
        except ValueError as err:
            report.skipped_invalid.append(f"{match.rule.name}@{pos}: {err}")
            continue
        try:
            gamma = apply_direct(carried)
        except GluingError as err:
            report.skipped_gluing.append(f"{match.rule.name}@{pos}: {err}")
            continue
        current = relabel_direct_result(gamma, step_index, pos)
        report.applied += 1
    return current, report


def cmd_run(system: SystemSpec, steps: int, mode: str = "pct") -> RunResult:
    """Iterate full engine steps from the system's host graph.

    Parallel mode raises IncoherentSetError when a step's match set cannot be
    applied jointly.  Iteration stops early when a step finds no matches.
    """
    if system.host is None:
        raise ValueError("system has no host graph to run on")
    if steps < 0:
        raise ValueError("steps must be nonnegative")
    if mode not in ("pct", "sequential", "seq"):
        raise ValueError(f"unknown mode {mode!r}: expected pct or sequential")
    stepper = apply_parallel_step if mode == "pct" else apply_sequential_step
    current = system.host
    reports: list[StepReport] = []
    history = [current]
    for index in range(steps):
        current, report = stepper(system, current, index)
        reports.append(report)
        history.append(current)
        if report.fixpoint:
            break
    return RunResult(final=current, steps=reports, history=history)


@dataclass
class HexcaResult:
    graphs: list[AttributedGraph]
    live_counts: list[int]
    live_sets: list[frozenset[tuple[int, int]]]
    steps: list[StepReport]


def cmd_hexca(grid: HexGridSpec, generations: int) -> HexcaResult:
    """Grow the one-live-neighbour automaton on a bounded disk.

    The disk must leave a margin: every cell that can be born within the
    requested number of generations needs its full neighbourhood inside the
    disk, so the radius must exceed the generation count.
    """
    if generations < 0:
        raise ValueError("generations must be nonnegative")
    if grid.radius < generations + 1:
        raise ValueError(
            f"margin violation: radius {grid.radius} cannot host {generations} "
            f"generations; need radius >= generations + 1")
    system = hex_system(grid)
    run = cmd_run(system, generations, mode="pct")
    live = [live_cells(g) for g in run.history]
    return HexcaResult(graphs=run.history, live_counts=[len(s) for s in live],
                       live_sets=live, steps=run.steps)
