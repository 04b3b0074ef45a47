"""Maximum-weight perfect matching and the agreement-graph encoding of
two-machine unit-time scheduling.

The encoding works on the complement of the conflict graph: an edge means two
jobs may share a time slot and carries both their weights; every job also gets
a duplicate node whose connecting edge lets the job occupy a slot alone; and
2(n-D) padding nodes with zero-weight edges absorb the jobs that end up tardy.
A maximum-weight perfect matching of the padded graph then selects exactly D
slot contents of maximum total weight.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import lcm
from typing import Optional, Sequence

import networkx as nx

from .core import Instance, Schedule, as_weight

__all__ = [
    "WeightedGraph",
    "Matching",
    "NoPerfectMatchingError",
    "build_transformed_graph",
    "max_weight_perfect_matching",
    "brute_force_perfect_matching",
    "matching_to_schedule",
    "graph_to_dimacs",
    "graph_from_dimacs",
]

NODE_JOB = "job"
NODE_DUPLICATE = "duplicate"
NODE_PADDING = "padding"

BRUTE_FORCE_NODE_LIMIT = 16


class NoPerfectMatchingError(ValueError):
    """Raised when a graph admits no perfect matching.

    ``uncovered`` lists nodes left unmatched by a maximum-cardinality
    matching, i.e. a node set that cannot all be covered simultaneously.
    """

    def __init__(self, uncovered: Sequence[int]):
        self.uncovered = tuple(sorted(uncovered))
        super().__init__(f"no perfect matching: nodes {list(self.uncovered)} cannot all be covered")


@dataclass(frozen=True)
class WeightedGraph:
    """Undirected graph with nonnegative rational edge weights.

    ``edges`` keeps construction order; that order is the canonical edge
    order used to break ties between equally heavy matchings.  ``node_kinds``
    partitions nodes into job / duplicate / padding classes (plain graphs use
    all-job labels).
    """

    num_nodes: int
    edges: tuple[tuple[int, int, Fraction], ...]
    node_kinds: tuple[str, ...] = ()

    def __post_init__(self):
        kinds = self.node_kinds or tuple(NODE_JOB for _ in range(self.num_nodes))
        if len(kinds) != self.num_nodes:
            raise ValueError("node_kinds must label every node")
        for kind in kinds:
            if kind not in (NODE_JOB, NODE_DUPLICATE, NODE_PADDING):
                raise ValueError(f"unknown node kind {kind!r}")
        seen = set()
        norm = []
        for a, b, weight in self.edges:
            if a == b:
                raise ValueError(f"self-loop on node {a}")
            if not (0 <= a < self.num_nodes and 0 <= b < self.num_nodes):
                raise ValueError(f"edge ({a},{b}) outside 0..{self.num_nodes - 1}")
            key = (min(a, b), max(a, b))
            if key in seen:
                raise ValueError(f"parallel edge {key}")
            seen.add(key)
            wf = as_weight(weight)
            if wf < 0:
                raise ValueError(f"negative edge weight on {key}")
            norm.append((key[0], key[1], wf))
        object.__setattr__(self, "edges", tuple(norm))
        object.__setattr__(self, "node_kinds", kinds)

    def edge_weight(self, a: int, b: int) -> Fraction:
        key = (min(a, b), max(a, b))
        for x, y, w in self.edges:
            if (x, y) == key:
                return w
        raise KeyError(key)


@dataclass(frozen=True)
class Matching:
    """A set of node-disjoint edges with its total weight."""

    edges: tuple[tuple[int, int], ...]
    weight: Fraction
    perfect: bool = False

    def __post_init__(self):
        norm = tuple(sorted((min(a, b), max(a, b)) for a, b in self.edges))
        covered: set[int] = set()
        for a, b in norm:
            if a in covered or b in covered:
                raise ValueError(f"edges share node in {norm}")
            covered.update((a, b))
        object.__setattr__(self, "edges", norm)
        object.__setattr__(self, "weight", as_weight(self.weight))

    @property
    def covered_nodes(self) -> frozenset[int]:
        return frozenset(n for e in self.edges for n in e)


# --- transformed graph layout ------------------------------------------------
# Nodes 0..n-1 are jobs 1..n, nodes n..2n-1 their duplicates, and nodes
# 2n..2n+2(n-D)-1 the padding.


def job_node(j: int) -> int:
    return j - 1


def duplicate_node(j: int, n: int) -> int:
    return n + j - 1


def padding_nodes(n: int, deadline: int) -> range:
    return range(2 * n, 2 * n + 2 * (n - deadline))


def build_transformed_graph(inst: Instance) -> WeightedGraph:
    """Build the padded agreement graph whose maximum-weight perfect matchings
    correspond to optimal two-machine unit-time schedules.

    Requires unit processing times and n > D >= 1 (with n <= D a full on-time
    schedule is immediate and no padding is needed).
    """
    if not inst.is_uet:
        raise ValueError("transformed graph requires unit processing times")
    if inst.deadline < 1:
        raise ValueError("transformed graph requires D >= 1")
    if inst.n <= inst.deadline:
        raise ValueError(
            f"transformed graph requires n > D (got n={inst.n}, D={inst.deadline}); "
            "schedule each job in its own slot instead"
        )
    n = inst.n
    edges: list[tuple[int, int, Fraction]] = []
    # complement of the conflict graph, edge weight = sum of the two job weights
    for j in range(1, n + 1):
        for g in range(j + 1, n + 1):
            if not inst.conflicting(j, g):
                edges.append((job_node(j), job_node(g), inst.w[j - 1] + inst.w[g - 1]))
    for j in range(1, n + 1):
        edges.append((job_node(j), duplicate_node(j, n), inst.w[j - 1]))
    zero = Fraction(0)
    for q in padding_nodes(n, inst.deadline):
        for v in range(2 * n):
            edges.append((q, v, zero))
    kinds = (
        tuple(NODE_JOB for _ in range(n))
        + tuple(NODE_DUPLICATE for _ in range(n))
        + tuple(NODE_PADDING for _ in range(2 * (n - inst.deadline)))
    )
    return WeightedGraph(num_nodes=2 * n + 2 * (n - inst.deadline), edges=tuple(edges), node_kinds=kinds)


def _perturbed_integer_weights(g: WeightedGraph) -> list[int]:
    """Scale weights to integers and add per-edge tie-break bonuses.

    The bonuses are distinct powers of two summing to less than one scaled
    weight unit, so the true optimum set is unchanged while the optimum of the
    perturbed problem is unique: among maximum-weight perfect matchings it is
    the one whose sorted canonical edge-index list is lexicographically
    smallest.
    """
    m = len(g.edges)
    scale = lcm(*(w.denominator for _, _, w in g.edges)) if m else 1
    return [
        ((w.numerator * (scale // w.denominator)) << m) | (1 << (m - 1 - i))
        for i, (_, _, w) in enumerate(g.edges)
    ]


def max_weight_perfect_matching(g: WeightedGraph) -> Matching:
    """Exact maximum-weight perfect matching, deterministic under ties.

    Raises ``NoPerfectMatchingError`` when the graph (odd node count,
    isolated nodes, structural deficiency) admits no perfect matching.
    """
    if g.num_nodes == 0:
        return Matching(edges=(), weight=Fraction(0), perfect=True)
    if g.num_nodes % 2 == 1:
        raise NoPerfectMatchingError(range(g.num_nodes))
    nxg = nx.Graph()
    nxg.add_nodes_from(range(g.num_nodes))
    for (a, b, _), pw in zip(g.edges, _perturbed_integer_weights(g)):
        nxg.add_edge(a, b, weight=pw)
    mate = nx.max_weight_matching(nxg, maxcardinality=True)
    covered = {v for pair in mate for v in pair}
    if len(covered) != g.num_nodes:
        raise NoPerfectMatchingError(set(range(g.num_nodes)) - covered)
    matched = {frozenset(pair) for pair in mate}
    chosen = [(a, b, w) for a, b, w in g.edges if frozenset((a, b)) in matched]
    return Matching(
        edges=tuple((a, b) for a, b, _ in chosen),
        weight=sum((w for _, _, w in chosen), Fraction(0)),
        perfect=True,
    )


def brute_force_perfect_matching(g: WeightedGraph) -> Matching:
    """Exhaustive oracle over all perfect matchings, same tie-break rule.

    Refuses graphs with more than 16 nodes.
    """
    if g.num_nodes > BRUTE_FORCE_NODE_LIMIT:
        raise ValueError(f"brute force limited to {BRUTE_FORCE_NODE_LIMIT} nodes, got {g.num_nodes}")
    if g.num_nodes == 0:
        return Matching(edges=(), weight=Fraction(0), perfect=True)
    if g.num_nodes % 2 == 1:
        raise NoPerfectMatchingError(range(g.num_nodes))

    incident: list[list[int]] = [[] for _ in range(g.num_nodes)]
    for idx, (a, b, _) in enumerate(g.edges):
        incident[a].append(idx)
        incident[b].append(idx)

    best: Optional[tuple[Fraction, tuple[int, ...]]] = None
    best_cover = 0
    best_uncovered: tuple[int, ...] = tuple(range(g.num_nodes))
    full = (1 << g.num_nodes) - 1

    def search(covered: int, chosen: list[int], weight: Fraction):
        nonlocal best, best_cover, best_uncovered
        count = covered.bit_count()
        if count > best_cover:
            best_cover = count
            best_uncovered = tuple(v for v in range(g.num_nodes) if not covered & (1 << v))
        if covered == full:
            key = (weight, tuple(sorted(chosen)))
            if best is None or key[0] > best[0] or (key[0] == best[0] and key[1] < best[1]):
                best = key
            return
        u = min(v for v in range(g.num_nodes) if not covered & (1 << v))
        for idx in incident[u]:
            a, b, w = g.edges[idx]
            v = b if a == u else a
            if not covered & (1 << v):
                chosen.append(idx)
                search(covered | (1 << u) | (1 << v), chosen, weight + w)
                chosen.pop()

    search(0, [], Fraction(0))
    if best is None:
        raise NoPerfectMatchingError(best_uncovered)
    weight, indices = best
    return Matching(
        edges=tuple((g.edges[i][0], g.edges[i][1]) for i in indices),
        weight=weight,
        perfect=True,
    )


def matching_to_schedule(inst: Instance, matching: Matching) -> Schedule:
    """Turn a perfect matching of the transformed graph into a two-machine
    schedule: agreement edges become concurrent slot pairs, duplicate edges
    become singleton slots, padding edges mark tardy jobs.  Slots are assigned
    in increasing order of the smallest job index on the edge.
    """
    n = inst.n
    deadline = inst.deadline
    total_nodes = 2 * n + 2 * (n - deadline)
    if not matching.perfect or len(matching.edges) * 2 != total_nodes:
        raise ValueError("matching is not perfect on the transformed graph of this instance")

    slot_edges: list[tuple[int, tuple[int, ...]]] = []  # (sort key, jobs)
    tardy: list[int] = []
    for a, b in matching.edges:
        a, b = min(a, b), max(a, b)
        if b >= 2 * n:
            # padding edge: an original endpoint below n marks a tardy job
            if a >= 2 * n:
                raise ValueError(f"edge ({a},{b}) joins two padding nodes")
            if a < n:
                tardy.append(a + 1)
        elif b < n:
            slot_edges.append((a + 1, (a + 1, b + 1)))
        else:
            if b != a + n:
                raise ValueError(f"edge ({a},{b}) is not a job-duplicate pair")
            slot_edges.append((a + 1, (a + 1,)))
    if len(slot_edges) != deadline:
        raise ValueError(
            f"matching selects {len(slot_edges)} slot edges, expected D={deadline}"
        )
    slot_edges.sort()
    machine1: list[tuple[int, int]] = []
    machine2: list[tuple[int, int]] = []
    for slot, (_, jobs) in enumerate(slot_edges):
        machine1.append((jobs[0], slot))
        if len(jobs) == 2:
            machine2.append((jobs[1], slot))
    return Schedule(machine_sequences=(tuple(machine1), tuple(machine2)), tardy=tuple(tardy))


# --- DIMACS-style debugging format -------------------------------------------


def graph_to_dimacs(g: WeightedGraph) -> str:
    """Serialize as `p edge N M` plus 1-based `e a b w` lines."""
    lines = [f"p edge {g.num_nodes} {len(g.edges)}"]
    lines.extend(f"e {a + 1} {b + 1} {w}" for a, b, w in g.edges)
    return "\n".join(lines) + "\n"


def graph_from_dimacs(text: str) -> WeightedGraph:
    """Parse the edge-list format written by :func:`graph_to_dimacs`.

    Node class labels are not preserved; all nodes come back as plain jobs.
    """
    num_nodes = None
    edge_count = None
    edges: list[tuple[int, int, Fraction]] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("c"):
            continue
        parts = line.split()
        if parts[0] == "p":
            if len(parts) != 4 or parts[1] != "edge":
                raise ValueError(f"line {lineno}: bad problem line {line!r}")
            num_nodes, edge_count = int(parts[2]), int(parts[3])
        elif parts[0] == "e":
            if len(parts) != 4:
                raise ValueError(f"line {lineno}: bad edge line {line!r}")
            edges.append((int(parts[1]) - 1, int(parts[2]) - 1, Fraction(parts[3])))
        else:
            raise ValueError(f"line {lineno}: unknown record {line!r}")
    if num_nodes is None:
        raise ValueError("missing 'p edge' header")
    if edge_count is not None and edge_count != len(edges):
        raise ValueError(f"header promises {edge_count} edges, found {len(edges)}")
    return WeightedGraph(num_nodes=num_nodes, edges=tuple(edges))
