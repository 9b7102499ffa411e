import pytest

from weakspan import (
    HexGridSpec,
    LabelSet,
    RunResult,
    all_matches,
    apply_direct,
    apply_parallel_step,
    apply_sequential_step,
    ca_oracle,
    cmd_hexca,
    cmd_run,
    fibonacci_system,
    find_matches,
    transport_match,
)
from weakspan.runner import relabel_direct_result, relabel_parallel_result
from weakspan.rewriting import pct


@pytest.fixture
def fib():
    return fibonacci_system()


def fib_pair(graph):
    x = sorted(graph.label("x"))
    y = sorted(graph.label("y"))
    return (x[0] if x else None, y[0] if y else None)


class TestRelabeling:
    def test_parallel_result_lands_back_on_host_ids(self, fib):
        gammas = [apply_direct(m) for m in all_matches(fib, fib.host)]
        renamed = relabel_parallel_result(pct(gammas), step_index=0)
        assert renamed.element_ids() == ["x", "y", "e"]
        assert renamed.label("x") == LabelSet([2])
        assert renamed.label("y") == LabelSet([3])

    def test_direct_result_marks_created_elements(self, fib):
        shift = fib.rules[0]
        gamma = apply_direct(find_matches(shift, fib.host)[0])
        renamed = relabel_direct_result(gamma, step_index=4, match_index=1)
        # this rule creates nothing, so ids pass through untouched
        assert renamed.element_ids() == ["x", "y", "e"]
        assert gamma.H.labeling == renamed.labeling


class TestTransport:
    def test_match_carries_to_a_graph_with_the_same_ids(self, fib):
        match = find_matches(fib.rules[1], fib.host)[0]
        twin = fib.host.with_labels({"e": []})
        carried = transport_match(match, twin)
        assert carried.host is twin
        assert carried.m.apply("x") == "x"
        assert carried.alpha == match.alpha

    def test_transport_fails_when_the_labels_are_gone(self, fib):
        shift, total = fib.rules
        match = find_matches(total, fib.host)[0]     # binds u=1, v=2
        gamma = apply_direct(find_matches(shift, fib.host)[0])
        after_shift = relabel_direct_result(gamma, 0, 0)   # x now holds 2
        with pytest.raises(ValueError, match="label condition"):
            transport_match(match, after_shift)

    def test_transport_fails_when_an_element_is_deleted(self, fib):
        match = find_matches(fib.rules[0], fib.host)[0]
        smaller = fib.host.with_labels({})
        pruned = type(smaller)(
            _graph_without_edge(smaller), smaller.algebra,
            {"x": smaller.label("x"), "y": smaller.label("y")})
        with pytest.raises(ValueError):
            transport_match(match, pruned)


def _graph_without_edge(attributed):
    from weakspan import Graph
    g = attributed.graph
    return Graph(g.signature, dict(g.nodes), {})


class TestParallelStep:
    def test_fibonacci_single_step(self, fib):
        result, report = apply_parallel_step(fib, fib.host, 0)
        assert fib_pair(result) == (2, 3)
        assert report.matches_per_rule == {"shift": 1, "sum": 1}
        assert report.applied == 2
        assert report.coherent is True
        assert report.witness_count == 4
        assert report.dprime_elements == 3
        assert report.hprime_elements == 3
        assert not report.fixpoint

    def test_report_renders_the_step_summary(self, fib):
        _, report = apply_parallel_step(fib, fib.host, 0)
        text = report.describe()
        assert text == ("step 0 [pct] matches {shift: 1, sum: 1} "
                        "coherence matrix 2x2 (4 witnesses) D' 3 elements, H' 3 elements")

    def test_no_matches_is_a_fixpoint(self, fib):
        silent = fib.host.with_labels({"x": [], "y": []})
        result, report = apply_parallel_step(fib, silent, 3)
        assert result is silent
        assert report.fixpoint
        assert report.describe() == "step 3 [pct] no matches: fixpoint reached"


class TestSequentialStep:
    def test_second_match_is_invalidated_by_the_first(self, fib):
        result, report = apply_sequential_step(fib, fib.host, 0)
        # shift rewrites x to 2, invalidating the sum match that read u=1
        assert fib_pair(result) == (2, 2)
        assert report.applied == 1
        assert len(report.skipped_invalid) == 1
        assert report.skipped_invalid[0].startswith("sum@1")
        assert "invalidated" in report.describe()

    def test_order_changes_the_outcome(self, fib):
        result, report = apply_sequential_step(fib, fib.host, 0, order=[1, 0])
        # the sum fires first; the shift match froze v=2, which y no longer holds
        assert fib_pair(result) == (1, 3)
        assert report.applied == 1
        assert len(report.skipped_invalid) == 1
        assert report.skipped_invalid[0].startswith("shift@0")

    def test_order_must_be_a_permutation(self, fib):
        with pytest.raises(ValueError, match="permutation"):
            apply_sequential_step(fib, fib.host, 0, order=[0, 0])


class TestRun:
    def test_fibonacci_trajectory(self, fib):
        run = cmd_run(fib, steps=5, mode="pct")
        pairs = [fib_pair(g) for g in run.history]
        assert pairs == [(1, 2), (2, 3), (3, 5), (5, 8), (8, 13), (13, 21)]
        assert isinstance(run, RunResult)
        assert len(run.steps) == 5
        assert run.report_text().count("\n") == 4

    def test_sequential_mode_runs_to_completion(self, fib):
        run = cmd_run(fib, steps=2, mode="sequential")
        # step one reaches (2, 2); on equal registers both matches stay
        # valid after the shift, so the sum then writes 2 + 2
        assert fib_pair(run.final) == (2, 4)
        assert all(step.mode == "sequential" for step in run.steps)

    def test_run_stops_at_a_fixpoint(self, fib):
        silent = fibonacci_system()
        silent.host = silent.host.with_labels({"x": [], "y": []})
        run = cmd_run(silent, steps=10, mode="pct")
        assert len(run.steps) == 1
        assert run.steps[0].fixpoint
        assert run.final is silent.host

    def test_argument_validation(self, fib):
        with pytest.raises(ValueError, match="unknown mode"):
            cmd_run(fib, steps=1, mode="both")
        with pytest.raises(ValueError, match="nonnegative"):
            cmd_run(fib, steps=-1)
        headless = fibonacci_system()
        headless.host = None
        with pytest.raises(ValueError, match="no host"):
            cmd_run(headless, steps=1)


class TestHexca:
    def test_growth_matches_the_reference_simulation(self):
        grid = HexGridSpec(radius=4)
        result = cmd_hexca(grid, generations=3)
        assert result.live_counts == [1, 7, 13, 31]
        assert result.live_sets == ca_oracle(grid, 3)

    def test_decentered_seed_follows_the_oracle(self):
        grid = HexGridSpec(radius=4, seeds=((1, 1),))
        result = cmd_hexca(grid, generations=2)
        assert result.live_sets == ca_oracle(grid, 2)

    def test_margin_rule_is_enforced(self):
        with pytest.raises(ValueError, match="margin violation"):
            cmd_hexca(HexGridSpec(radius=2), generations=2)
        with pytest.raises(ValueError, match="nonnegative"):
            cmd_hexca(HexGridSpec(radius=2), generations=-1)

    def test_zero_generations_is_just_the_seed(self):
        result = cmd_hexca(HexGridSpec(radius=1), generations=0)
        assert result.live_counts == [1]
        assert result.steps == []
