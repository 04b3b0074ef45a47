"""Independent exhaustive oracles used to verify the solvers.

These deliberately avoid the package's solution paths: unit-time optima come
from slot-partition enumeration, general optima from subset enumeration plus
start-vector search over chain-sum candidate times, and a position-space
enumerator cross-checks the tiniest cases through ordered machine sequences
with explicit conflict orientations.
"""

from __future__ import annotations

import itertools
import random
from fractions import Fraction
from math import lcm

import networkx as nx

from conflictsched.core import Instance


def _scaled_weights(inst: Instance) -> tuple[int, list[int]]:
    scale = lcm(*(wj.denominator for wj in inst.w))
    return scale, [wj.numerator * (scale // wj.denominator) for wj in inst.w]


def uet_brute_force(inst: Instance) -> Fraction:
    """Exact unit-time optimum by enumerating slot partitions.

    Slots are unlabeled (opening a new slot is a single branch), each slot
    holds at most m pairwise non-conflicting jobs, and at most D slots open.
    """
    assert inst.is_uet
    scale, w = _scaled_weights(inst)
    order = sorted(range(1, inst.n + 1), key=lambda j: (-w[j - 1], j))
    suffix = [0] * (len(order) + 1)
    for i in reversed(range(len(order))):
        suffix[i] = suffix[i + 1] + w[order[i] - 1]
    neighbors = inst.conflict_neighbors
    m, deadline = inst.m, inst.deadline
    best = 0
    slots: list[list[int]] = []

    def rec(i: int, value: int):
        nonlocal best
        if value + suffix[i] <= best:
            return
        if i == len(order):
            best = value
            return
        j = order[i]
        wj = w[j - 1]
        for slot in slots:
            if len(slot) < m and not any(g in neighbors[j - 1] for g in slot):
                slot.append(j)
                rec(i + 1, value + wj)
                slot.pop()
        if len(slots) < deadline:
            slots.append([j])
            rec(i + 1, value + wj)
            slots.pop()
        rec(i + 1, value)

    rec(0, 0)
    return Fraction(best, scale)


def _chain_sum_candidates(inst: Instance) -> list[int]:
    """Start times worth trying: sums of distinct processing times <= D.

    Any feasible schedule can be left-shifted until every job starts at 0 or
    at another job's completion, so optimal schedules exist with all starts in
    this set.
    """
    sums = {0}
    for pj in inst.p:
        sums |= {s + pj for s in sums if s + pj <= inst.deadline}
    return sorted(sums)


def _subset_feasible(inst: Instance, jobs: list[int], candidates: list[int]) -> bool:
    """Can every job in `jobs` run within the deadline (capacity m, conflicts
    disjoint)?  Machine assignment is implicit: an interval set is packable
    onto m machines iff no time point is covered more than m times."""
    deadline, m = inst.deadline, inst.m
    p = inst.p
    neighbors = inst.conflict_neighbors
    conflicted = [j for j in jobs if any(g in neighbors[j - 1] for g in jobs)]
    if not conflicted:
        # pure bin packing of processing times into m machines of capacity D
        items = sorted((p[j - 1] for j in jobs), reverse=True)
        loads = [0] * m

        def pack(i: int) -> bool:
            if i == len(items):
                return True
            tried = set()
            for b in range(m):
                if loads[b] + items[i] <= deadline and loads[b] not in tried:
                    tried.add(loads[b])
                    loads[b] += items[i]
                    if pack(i + 1):
                        loads[b] -= items[i]
                        return True
                    loads[b] -= items[i]
            return False

        return pack(0)

    free = [j for j in jobs if j not in conflicted]
    order = sorted(conflicted, key=lambda j: -p[j - 1]) + sorted(free, key=lambda j: -p[j - 1])
    placed: list[tuple[int, int, int]] = []  # (start, end, job)

    def capacity_ok(t: int, end: int) -> bool:
        events = {t}
        events.update(s for s, _, _ in placed if t < s < end)
        for e in events:
            cover = sum(1 for s, f, _ in placed if s <= e < f)
            if cover >= m:
                return False
        return True

    def dfs(i: int) -> bool:
        if i == len(order):
            return True
        j = order[i]
        pj = p[j - 1]
        adj = neighbors[j - 1]
        for t in candidates:
            end = t + pj
            if end > deadline:
                break
            if any(s < end and t < f for s, f, g in placed if g in adj):
                continue
            if not capacity_ok(t, end):
                continue
            placed.append((t, end, j))
            if dfs(i + 1):
                placed.pop()
                return True
            placed.pop()
        return False

    return dfs(0)


def max_weight_brute_force(inst: Instance) -> Fraction:
    """Exact optimum for arbitrary processing times (intended for n <= 10).

    Enumerates on-time subsets in non-increasing weight order and returns the
    weight of the first one that can actually be arranged.
    """
    scale, w = _scaled_weights(inst)
    n, m, deadline = inst.n, inst.m, inst.deadline
    p = inst.p
    candidates = _chain_sum_candidates(inst)
    masks = sorted(
        range(1 << n),
        key=lambda mask: -sum(w[j] for j in range(n) if mask >> j & 1),
    )
    for mask in masks:
        jobs = [j + 1 for j in range(n) if mask >> j & 1]
        if sum(p[j - 1] for j in jobs) > m * deadline:
            continue
        if any(
            inst.conflicting(a, b) and p[a - 1] + p[b - 1] > deadline
            for a, b in itertools.combinations(jobs, 2)
        ):
            continue
        if any(p[j - 1] > deadline for j in jobs):
            continue
        if _subset_feasible(inst, jobs, candidates):
            return Fraction(sum(w[j - 1] for j in jobs), scale)
    return Fraction(0)


def ilp1_space_optimum(inst: Instance) -> Fraction:
    """Exact optimum through the position-indexed decision space (n <= 6).

    For each on-time subset all ordered machine sequences and all orientations
    of its internal conflict pairs are enumerated; earliest starts then follow
    from longest paths in the induced precedence relation.
    """
    assert inst.n <= 6, "position-space enumeration is for tiny cases"
    scale, w = _scaled_weights(inst)
    n, m, deadline = inst.n, inst.m, inst.deadline
    p = inst.p

    def arrangement_exists(jobs: tuple[int, ...]) -> bool:
        pairs = [e for e in itertools.combinations(jobs, 2) if inst.conflicting(*e)]
        for assign in itertools.product(range(m), repeat=len(jobs)):
            groups: list[list[int]] = [[] for _ in range(m)]
            for j, g in zip(jobs, assign):
                groups[g].append(j)
            for perms in itertools.product(*(itertools.permutations(g) for g in groups)):
                base_edges = [
                    (seq[i], seq[i + 1]) for seq in perms for i in range(len(seq) - 1)
                ]
                for bits in itertools.product((0, 1), repeat=len(pairs)):
                    edges = list(base_edges)
                    edges += [(a, b) if bit == 0 else (b, a) for (a, b), bit in zip(pairs, bits)]
                    # longest path over the precedence relation
                    preds: dict[int, list[int]] = {j: [] for j in jobs}
                    for a, b in edges:
                        preds[b].append(a)
                    start: dict[int, int] = {}
                    indeg = {j: len(preds[j]) for j in jobs}
                    queue = [j for j in jobs if indeg[j] == 0]
                    topo = []
                    succs: dict[int, list[int]] = {j: [] for j in jobs}
                    for a, b in edges:
                        succs[a].append(b)
                    while queue:
                        v = queue.pop()
                        topo.append(v)
                        for s in succs[v]:
                            indeg[s] -= 1
                            if indeg[s] == 0:
                                queue.append(s)
                    if len(topo) != len(jobs):
                        continue  # cyclic orientation
                    for v in topo:
                        start[v] = max((start[a] + p[a - 1] for a in preds[v]), default=0)
                    if all(start[v] + p[v - 1] <= deadline for v in topo):
                        return True
        return False

    best = Fraction(0)
    subsets = sorted(
        (tuple(c) for r in range(n + 1) for c in itertools.combinations(range(1, n + 1), r)),
        key=lambda jobs: -sum(w[j - 1] for j in jobs),
    )
    for jobs in subsets:
        if arrangement_exists(jobs):
            return Fraction(sum(w[j - 1] for j in jobs), scale)
    return best


def raw_agreement_matching_value(inst: Instance) -> Fraction:
    """Value of the naive approach for unit jobs on two machines: take a
    maximum-weight (not perfect) matching of the bare agreement graph, fill up
    to D slots with its heaviest pairs, then pad leftover slots with heaviest
    unmatched singletons.  Exists to show the padded construction matters.
    """
    assert inst.is_uet and inst.m == 2
    g = nx.Graph()
    g.add_nodes_from(range(1, inst.n + 1))
    for j in range(1, inst.n + 1):
        for h in range(j + 1, inst.n + 1):
            if not inst.conflicting(j, h):
                g.add_edge(j, h, weight=inst.w[j - 1] + inst.w[h - 1])
    mate = nx.max_weight_matching(g, maxcardinality=False)
    pairs = sorted(
        ((inst.w[a - 1] + inst.w[b - 1], tuple(sorted((a, b)))) for a, b in mate),
        key=lambda x: (-x[0], x[1]),
    )
    taken = pairs[: inst.deadline]
    used = {j for _, pair in taken for j in pair}
    value = sum((wsum for wsum, _ in taken), Fraction(0))
    leftover_slots = inst.deadline - len(taken)
    singles = sorted(
        (j for j in range(1, inst.n + 1) if j not in used),
        key=lambda j: (-inst.w[j - 1], j),
    )
    value += sum((inst.w[j - 1] for j in singles[:leftover_slots]), Fraction(0))
    return value


def random_uet_instance(
    rng: random.Random, n: int, m: int, deadline: int, edge_prob: float
) -> Instance:
    weights = tuple(Fraction(rng.randrange(1, 10)) for _ in range(n))
    conflicts = tuple(
        (j, g)
        for j in range(1, n + 1)
        for g in range(j + 1, n + 1)
        if rng.random() < edge_prob
    )
    return Instance(n=n, m=m, deadline=deadline, p=(1,) * n, w=weights, conflicts=conflicts)
