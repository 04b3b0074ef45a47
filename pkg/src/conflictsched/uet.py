"""Unit-time solvers: the exact two-machine algorithm, its greedy extension
to more machines (optimal within a factor of m/2), and worst-case instances
showing that factor is essentially unbeatable for two-machine-anchored
algorithms.
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

from .core import Instance, Schedule, objective_value
from .matching import build_transformed_graph, matching_to_schedule, max_weight_perfect_matching

__all__ = [
    "TightnessInstance",
    "RatioBoundReport",
    "solve_uet_two_machines",
    "solve_uet_anchored_greedy",
    "make_tightness_instance",
    "verify_ratio_bound",
]


def _require_uet(inst: Instance) -> None:
    if not inst.is_uet:
        raise ValueError("solver requires unit processing times")


def solve_uet_two_machines(inst: Instance) -> Schedule:
    """Exact maximum-weight on-time schedule for unit jobs on two machines.

    With D = 0 nothing fits; with n <= D every job gets its own slot; in the
    remaining (interesting) case the padded agreement graph is matched and the
    matching converted back to a schedule.
    """
    _require_uet(inst)
    if inst.m != 2:
        raise ValueError(f"two-machine solver needs m=2, got m={inst.m}")
    if inst.deadline == 0:
        return Schedule(machine_sequences=((), ()), tardy=tuple(range(1, inst.n + 1)))
    if inst.n <= inst.deadline:
        seq = tuple((j, j - 1) for j in range(1, inst.n + 1))
        return Schedule(machine_sequences=(seq, ()), tardy=())
    graph = build_transformed_graph(inst)
    matching = max_weight_perfect_matching(graph)
    return matching_to_schedule(inst, matching)


def solve_uet_anchored_greedy(inst: Instance) -> Schedule:
    """Schedule unit jobs on m >= 2 machines around the exact two-machine core.

    The optimal two-machine schedule is kept verbatim on machines 1-2, then
    the remaining jobs are scanned in non-increasing weight order (ties by job
    index) and each is put into the earliest slot that still has a free
    machine and no conflicting occupant.  The on-time set therefore always
    contains the two-machine optimum's, which bounds the optimal value by m/2
    times this schedule's value.
    """
    _require_uet(inst)
    two = solve_uet_two_machines(dataclasses.replace(inst, m=2))
    slots_jobs: list[list[int]] = [[] for _ in range(inst.deadline)]
    for job, (_, start) in two.assignments.items():
        slots_jobs[start].append(job)
    for jobs in slots_jobs:
        jobs.sort()

    remaining = sorted(two.tardy, key=lambda j: (-inst.w[j - 1], j))
    tardy: list[int] = []
    neighbors = inst.conflict_neighbors
    for job in remaining:
        placed = False
        for slot in range(inst.deadline):
            occupants = slots_jobs[slot]
            if len(occupants) >= inst.m:
                continue
            if any(g in neighbors[job - 1] for g in occupants):
                continue
            occupants.append(job)
            placed = True
            break
        if not placed:
            tardy.append(job)

    machines: list[list[tuple[int, int]]] = [[] for _ in range(inst.m)]
    for slot, jobs in enumerate(slots_jobs):
        for lane, job in enumerate(jobs):
            machines[lane].append((job, slot))
    return Schedule(
        machine_sequences=tuple(tuple(seq) for seq in machines),
        tardy=tuple(tardy),
    )


@dataclass(frozen=True)
class TightnessInstance:
    """Worst-case input for two-machine-anchored algorithms.

    The agreement graph is a complete graph on m*D equal-weight jobs plus D
    disjoint pairs of slightly heavier jobs.  Anchored algorithms take the
    heavy pairs and can add nothing (pair jobs conflict with everything else),
    scoring 2*D*(w+delta), while the true optimum packs the clique jobs for
    m*w*D; the ratio approaches m/2 as delta shrinks.
    """

    m: int
    deadline: int
    w: Fraction
    delta: Fraction
    epsilon: Fraction
    instance: Instance
    optimal_value: Fraction
    anchored_value: Fraction

    def __post_init__(self):
        limit = 2 * self.epsilon * self.w / (self.m - 2 * self.epsilon)
        if not 0 < self.delta < limit:
            raise ValueError(f"delta {self.delta} outside (0, {limit})")


def make_tightness_instance(
    m: int, epsilon, deadline: int, w
) -> TightnessInstance:
    """Build the tightness instance for a given machine count, gap epsilon in
    (0, 1/2], deadline and base weight; the perturbation is fixed at half its
    admissible upper bound so results are deterministic.
    """
    epsilon = Fraction(epsilon)
    w = Fraction(w)
    if m < 3:
        raise ValueError("tightness construction needs m >= 3")
    if not 0 < epsilon <= Fraction(1, 2):
        raise ValueError(f"epsilon must lie in (0, 1/2], got {epsilon}")
    if deadline < 1:
        raise ValueError("deadline must be >= 1")
    if w <= 0:
        raise ValueError("base weight must be positive")
    delta = epsilon * w / (m - 2 * epsilon)

    clique = m * deadline
    n = clique + 2 * deadline
    weights = tuple([w] * clique + [w + delta] * (2 * deadline))
    # agreement graph: complete on the clique jobs + one edge per heavy pair;
    # conflicts are the complement
    agree: set[tuple[int, int]] = set()
    for j in range(1, clique + 1):
        for g in range(j + 1, clique + 1):
            agree.add((j, g))
    for i in range(deadline):
        a = clique + 2 * i + 1
        agree.add((a, a + 1))
    conflicts = tuple(
        (j, g)
        for j in range(1, n + 1)
        for g in range(j + 1, n + 1)
        if (j, g) not in agree
    )
    inst = Instance(
        n=n,
        m=m,
        deadline=deadline,
        p=tuple([1] * n),
        w=weights,
        conflicts=conflicts,
    )
    return TightnessInstance(
        m=m,
        deadline=deadline,
        w=w,
        delta=delta,
        epsilon=epsilon,
        instance=inst,
        optimal_value=Fraction(m) * w * deadline,
        anchored_value=2 * deadline * (w + delta),
    )


@dataclass(frozen=True)
class RatioBoundReport:
    """Outcome of checking optimal/heuristic <= m/2 on one instance."""

    optimal_value: Fraction
    heuristic_value: Fraction
    bound: Fraction
    ratio: Optional[Fraction]
    satisfied: bool

    def __str__(self):
        ratio = "inf" if self.ratio is None else str(self.ratio)
        verdict = "ok" if self.satisfied else "VIOLATED"
        return (
            f"optimal={self.optimal_value} heuristic={self.heuristic_value} "
            f"ratio={ratio} bound={self.bound} -> {verdict}"
        )


def verify_ratio_bound(inst: Instance, sched_a: Schedule, opt_value) -> RatioBoundReport:
    """Check that the exact optimum is within m/2 of an anchored schedule's value."""
    opt_value = Fraction(opt_value)
    heuristic = objective_value(inst, sched_a)
    bound = Fraction(inst.m, 2)
    if heuristic == 0:
        # cannot happen for anchored schedules unless nothing fits at all
        satisfied = opt_value == 0
        return RatioBoundReport(opt_value, heuristic, bound, None if not satisfied else Fraction(1), satisfied)
    ratio = opt_value / heuristic
    return RatioBoundReport(opt_value, heuristic, bound, ratio, ratio <= bound)
