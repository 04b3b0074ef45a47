import random
from fractions import Fraction

import pytest

from conflictsched.core import Instance, Schedule, objective_value, validate_schedule
from conflictsched.matching import (
    Matching,
    NODE_DUPLICATE,
    NODE_JOB,
    NODE_PADDING,
    NoPerfectMatchingError,
    WeightedGraph,
    brute_force_perfect_matching,
    build_transformed_graph,
    duplicate_node,
    graph_from_dimacs,
    graph_to_dimacs,
    job_node,
    matching_to_schedule,
    max_weight_perfect_matching,
    padding_nodes,
)
from oracles import random_uet_instance


def uet(n, m, D, w, conflicts=()):
    return Instance(n=n, m=m, deadline=D, p=(1,) * n, w=w, conflicts=conflicts)


def random_pm_graph(rng, max_nodes=12):
    """Random graph guaranteed to admit a perfect matching (one is planted)."""
    n = rng.choice(range(4, max_nodes + 1, 2))
    perm = list(range(n))
    rng.shuffle(perm)
    edges = {tuple(sorted((perm[i], perm[i + 1]))) for i in range(0, n, 2)}
    pairs = [(a, b) for a in range(n) for b in range(a + 1, n)]
    rng.shuffle(pairs)
    for pair in pairs[: rng.randrange(0, len(pairs))]:
        edges.add(pair)
    weights = [
        Fraction(rng.randrange(0, 41), rng.randrange(1, 5)) for _ in range(len(edges))
    ]
    return WeightedGraph(
        num_nodes=n,
        edges=tuple((a, b, w) for (a, b), w in zip(sorted(edges), weights)),
    )


class TestWeightedGraph:
    def test_rejects_self_loop_parallel_and_negative(self):
        with pytest.raises(ValueError):
            WeightedGraph(num_nodes=2, edges=((0, 0, Fraction(1)),))
        with pytest.raises(ValueError):
            WeightedGraph(num_nodes=2, edges=((0, 1, Fraction(1)), (1, 0, Fraction(2))))
        with pytest.raises(ValueError):
            WeightedGraph(num_nodes=2, edges=((0, 1, Fraction(-1)),))

    def test_dimacs_round_trip(self):
        g = WeightedGraph(
            num_nodes=4,
            edges=((0, 1, Fraction(3, 2)), (2, 3, Fraction(5)), (0, 3, Fraction(0))),
        )
        text = graph_to_dimacs(g)
        back = graph_from_dimacs(text)
        assert back.num_nodes == g.num_nodes and back.edges == g.edges
        assert graph_to_dimacs(back) == text


class TestTransformedGraph:
    def test_counts_for_three_jobs(self):
        inst = uet(3, 2, 2, (1, 2, 3))
        g = build_transformed_graph(inst)
        assert g.num_nodes == 8
        assert sum(1 for k in g.node_kinds if k == NODE_PADDING) == 2
        dup_edges = [e for e in g.edges if g.node_kinds[e[1]] == NODE_DUPLICATE]
        pad_edges = [e for e in g.edges if NODE_PADDING in (g.node_kinds[e[0]], g.node_kinds[e[1]])]
        assert len(dup_edges) == 3
        assert len(pad_edges) == 2 * 6
        assert all(w == 0 for _, _, w in pad_edges)

    def test_single_conflict_complement(self):
        inst = uet(2, 2, 1, (5, 7), conflicts=((1, 2),))
        g = build_transformed_graph(inst)
        assert g.num_nodes == 6
        job_edges = [
            e
            for e in g.edges
            if g.node_kinds[e[0]] == NODE_JOB and g.node_kinds[e[1]] == NODE_JOB
        ]
        assert job_edges == []  # complement of the single edge is empty
        dup_edges = [e for e in g.edges if g.node_kinds[e[1]] == NODE_DUPLICATE]
        assert {(a, b): w for a, b, w in dup_edges} == {(0, 2): 5, (1, 3): 7}
        assert sum(1 for e in g.edges if w_is_zero(e)) == 8

    def test_duplicate_edge_weights_sum_to_total(self):
        rng = random.Random(5)
        for _ in range(20):
            inst = random_uet_instance(rng, rng.randrange(3, 9), 2, rng.randrange(1, 3), 0.4)
            if inst.n <= inst.deadline:
                continue
            g = build_transformed_graph(inst)
            dup_sum = sum(
                (w for a, b, w in g.edges if g.node_kinds[b] == NODE_DUPLICATE), Fraction(0)
            )
            assert dup_sum == inst.total_weight

    def test_preconditions(self):
        with pytest.raises(ValueError):
            build_transformed_graph(uet(2, 2, 2, (1, 1)))  # n <= D
        with pytest.raises(ValueError):
            build_transformed_graph(uet(2, 2, 0, (1, 1)))
        with pytest.raises(ValueError):
            build_transformed_graph(Instance(n=2, m=2, deadline=1, p=(1, 2), w=(1, 1)))


def w_is_zero(edge):
    return edge[2] == 0


class TestPerfectMatching:
    def test_two_nodes(self):
        g = WeightedGraph(num_nodes=2, edges=((0, 1, Fraction(5)),))
        got = max_weight_perfect_matching(g)
        assert got.edges == ((0, 1),) and got.weight == 5 and got.perfect

    def test_four_node_example(self):
        # three perfect matchings with weights 11, 4, 6
        g = WeightedGraph(
            num_nodes=4,
            edges=(
                (0, 1, Fraction(1)),
                (2, 3, Fraction(10)),
                (0, 2, Fraction(2)),
                (1, 3, Fraction(2)),
                (0, 3, Fraction(3)),
                (1, 2, Fraction(3)),
            ),
        )
        got = max_weight_perfect_matching(g)
        assert got.weight == 11
        assert got.edges == ((0, 1), (2, 3))

    def test_empty_graph(self):
        empty = WeightedGraph(num_nodes=0, edges=())
        assert brute_force_perfect_matching(empty).weight == 0
        assert max_weight_perfect_matching(empty).weight == 0

    def test_k4_tie_break_is_lexicographic(self):
        edges = tuple(
            (a, b, Fraction(1)) for a in range(4) for b in range(a + 1, 4)
        )
        g = WeightedGraph(num_nodes=4, edges=edges)
        for solver in (max_weight_perfect_matching, brute_force_perfect_matching):
            got = solver(g)
            assert got.weight == 2
            assert got.edges == ((0, 1), (2, 3))  # earliest edge indices win ties

    def test_agrees_with_brute_force(self):
        rng = random.Random(42)
        for _ in range(120):
            g = random_pm_graph(rng, max_nodes=10)
            fast = max_weight_perfect_matching(g)
            slow = brute_force_perfect_matching(g)
            assert fast.weight == slow.weight
            assert fast.edges == slow.edges

    def test_no_perfect_matching_reports_uncovered(self):
        odd = WeightedGraph(num_nodes=3, edges=((0, 1, Fraction(1)),))
        with pytest.raises(NoPerfectMatchingError):
            max_weight_perfect_matching(odd)
        isolated = WeightedGraph(num_nodes=4, edges=((0, 1, Fraction(1)),))
        with pytest.raises(NoPerfectMatchingError) as err:
            max_weight_perfect_matching(isolated)
        assert set(err.value.uncovered) == {2, 3}
        with pytest.raises(NoPerfectMatchingError) as err2:
            brute_force_perfect_matching(isolated)
        assert set(err2.value.uncovered) == {2, 3}

    def test_brute_force_refuses_large_graphs(self):
        g = WeightedGraph(num_nodes=18, edges=())
        with pytest.raises(ValueError):
            brute_force_perfect_matching(g)

    def test_determinism(self):
        rng = random.Random(9)
        g = random_pm_graph(rng)
        assert max_weight_perfect_matching(g) == max_weight_perfect_matching(g)


def induced_matching(inst, sched) -> Matching:
    """Schedule -> perfect matching of the transformed graph (test helper)."""
    n = inst.n
    slots: dict[int, list[int]] = {}
    for job, (_, start) in sched.assignments.items():
        slots.setdefault(start, []).append(job)
    edges = []
    for jobs in slots.values():
        if len(jobs) == 2:
            a, b = sorted(jobs)
            edges.append((job_node(a), job_node(b)))
        elif len(jobs) == 1:
            edges.append((job_node(jobs[0]), duplicate_node(jobs[0], n)))
        else:
            raise AssertionError("two-machine schedule with >2 jobs in a slot")
    covered = {v for e in edges for v in e}
    free = [v for v in range(2 * n) if v not in covered]
    pads = list(padding_nodes(n, inst.deadline))
    assert len(free) == len(pads)
    edges.extend(zip(pads, free))
    return Matching(
        edges=tuple(edges), weight=objective_value(inst, sched), perfect=True
    )


class TestMatchingScheduleCorrespondence:
    def test_singletons_only(self):
        inst = uet(3, 2, 1, (10, 1, 1), conflicts=((1, 2), (1, 3)))
        g = build_transformed_graph(inst)
        matching = max_weight_perfect_matching(g)
        sched = matching_to_schedule(inst, matching)
        assert sched.assignments == {1: (0, 0)}
        assert sched.tardy == (2, 3)
        assert objective_value(inst, sched) == 10

    def test_edge_split_counts(self):
        rng = random.Random(17)
        for _ in range(30):
            inst = random_uet_instance(rng, rng.randrange(3, 9), 2, rng.randrange(1, 4), 0.4)
            if inst.n <= inst.deadline:
                continue
            g = build_transformed_graph(inst)
            matching = max_weight_perfect_matching(g)
            pad_edges = sum(1 for a, b in matching.edges if max(a, b) >= 2 * inst.n)
            assert pad_edges == 2 * (inst.n - inst.deadline)
            assert len(matching.edges) - pad_edges == inst.deadline

    def test_objective_equals_matching_weight(self):
        rng = random.Random(23)
        for _ in range(40):
            inst = random_uet_instance(rng, rng.randrange(2, 9), 2, rng.randrange(1, 4), 0.4)
            if inst.n <= inst.deadline:
                continue
            matching = max_weight_perfect_matching(build_transformed_graph(inst))
            sched = matching_to_schedule(inst, matching)
            assert validate_schedule(inst, sched) is None
            assert objective_value(inst, sched) == matching.weight

    def test_round_trip_preserves_value(self):
        rng = random.Random(29)
        for _ in range(30):
            inst = random_uet_instance(rng, rng.randrange(3, 9), 2, rng.randrange(1, 4), 0.4)
            if inst.n <= inst.deadline:
                continue
            sched = matching_to_schedule(
                inst, max_weight_perfect_matching(build_transformed_graph(inst))
            )
            again = matching_to_schedule(inst, induced_matching(inst, sched))
            assert objective_value(inst, again) == objective_value(inst, sched)

    def test_rejects_wrong_matchings(self):
        inst = uet(3, 2, 1, (1, 1, 1))
        with pytest.raises(ValueError):
            matching_to_schedule(inst, Matching(edges=((0, 1),), weight=Fraction(2)))
