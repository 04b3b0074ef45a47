"""Problem data model: instances, schedules, validation and the objective.

Jobs are numbered 1..n.  A schedule assigns a subset of the jobs to machines
with integer start times; the remaining jobs are kept on an explicit tardy
list and carry no start time.  The objective is the total weight of the
scheduled (on-time) jobs.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import Iterable, Optional, Sequence

__all__ = [
    "Instance",
    "Schedule",
    "SlotProfile",
    "ScheduleViolation",
    "InvalidScheduleError",
    "InstanceFormatError",
    "objective_value",
    "validate_schedule",
    "slot_profile",
    "instance_to_text",
    "instance_from_text",
    "schedule_to_json",
    "schedule_from_json",
]


def as_weight(value) -> Fraction:
    """Coerce a weight-like value (int, str, Fraction) to an exact Fraction."""
    try:
        return Fraction(value)
    except (TypeError, ValueError) as exc:
        raise ValueError(f"not a rational weight: {value!r}") from exc


class InstanceFormatError(ValueError):
    """Raised when instance text cannot be parsed; carries the 1-based line."""

    def __init__(self, message: str, line: Optional[int] = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


@dataclass(frozen=True)
class Instance:
    """A scheduling instance.

    Attributes:
        n: number of jobs (>= 1).
        m: number of identical machines (>= 2).
        deadline: common deadline D (integer >= 0).
        p: per-job integer processing times, p[j-1] >= 1.
        w: per-job positive rational weights.
        conflicts: unordered pairs of jobs that may never run concurrently,
            stored canonically as (j, g) with j < g, sorted.
    """

    n: int
    m: int
    deadline: int
    p: tuple[int, ...]
    w: tuple[Fraction, ...]
    conflicts: tuple[tuple[int, int], ...] = ()

    def __post_init__(self):
        if not isinstance(self.n, int) or self.n < 1:
            raise ValueError(f"job count must be an integer >= 1, got {self.n}")
        if not isinstance(self.m, int) or self.m < 2:
            raise ValueError(f"machine count must be an integer >= 2, got {self.m}")
        if not isinstance(self.deadline, int) or self.deadline < 0:
            raise ValueError(f"deadline must be an integer >= 0, got {self.deadline}")
        p = tuple(self.p)
        w = tuple(as_weight(x) for x in self.w)
        if len(p) != self.n or len(w) != self.n:
            raise ValueError("p and w must both have exactly n entries")
        for j, pj in enumerate(p, start=1):
            if not isinstance(pj, int) or pj < 1:
                raise ValueError(f"processing time of job {j} must be an integer >= 1, got {pj!r}")
        for j, wj in enumerate(w, start=1):
            if wj <= 0:
                raise ValueError(f"weight of job {j} must be > 0, got {wj}")
        seen = set()
        edges = []
        for pair in self.conflicts:
            j, g = pair
            if j == g:
                raise ValueError(f"conflict self-loop on job {j}")
            if not (1 <= j <= self.n and 1 <= g <= self.n):
                raise ValueError(f"conflict pair {pair} references a job outside 1..{self.n}")
            key = (min(j, g), max(j, g))
            if key in seen:
                raise ValueError(f"duplicate conflict pair {key}")
            seen.add(key)
            edges.append(key)
        object.__setattr__(self, "p", p)
        object.__setattr__(self, "w", w)
        object.__setattr__(self, "conflicts", tuple(sorted(edges)))

    @cached_property
    def conflict_set(self) -> frozenset[tuple[int, int]]:
        return frozenset(self.conflicts)

    @cached_property
    def conflict_neighbors(self) -> tuple[frozenset[int], ...]:
        """Index j-1 -> jobs conflicting with job j."""
        adj: list[set[int]] = [set() for _ in range(self.n)]
        for j, g in self.conflicts:
            adj[j - 1].add(g)
            adj[g - 1].add(j)
        return tuple(frozenset(s) for s in adj)

    def conflicting(self, j: int, g: int) -> bool:
        return (min(j, g), max(j, g)) in self.conflict_set

    @property
    def is_uet(self) -> bool:
        """True when every processing time is one unit."""
        return all(pj == 1 for pj in self.p)

    @property
    def total_weight(self) -> Fraction:
        return sum(self.w, Fraction(0))


@dataclass(frozen=True)
class Schedule:
    """Per-machine ordered (job, start) sequences plus the tardy-job list.

    Tardy jobs are unscheduled and carry no start time.
    """

    machine_sequences: tuple[tuple[tuple[int, int], ...], ...]
    tardy: tuple[int, ...] = ()

    def __post_init__(self):
        seqs = tuple(tuple((int(j), int(s)) for j, s in seq) for seq in self.machine_sequences)
        object.__setattr__(self, "machine_sequences", seqs)
        object.__setattr__(self, "tardy", tuple(sorted(int(j) for j in self.tardy)))

    @cached_property
    def assignments(self) -> dict[int, tuple[int, int]]:
        """job -> (machine index, start); later duplicates overwrite earlier ones."""
        out: dict[int, tuple[int, int]] = {}
        for mi, seq in enumerate(self.machine_sequences):
            for job, start in seq:
                out[job] = (mi, start)
        return out

    @property
    def scheduled_jobs(self) -> tuple[int, ...]:
        return tuple(sorted(self.assignments))

    def job_count(self) -> int:
        return sum(len(seq) for seq in self.machine_sequences) + len(self.tardy)


@dataclass(frozen=True)
class ScheduleViolation:
    """First violated schedule invariant: kind, jobs involved, machine if any."""

    kind: str
    jobs: tuple[int, ...]
    machine: Optional[int] = None
    detail: str = ""

    def __str__(self):
        where = f" on machine {self.machine + 1}" if self.machine is not None else ""
        return f"{self.kind}{where}: jobs {list(self.jobs)} {self.detail}".rstrip()


class InvalidScheduleError(ValueError):
    def __init__(self, violation: ScheduleViolation):
        self.violation = violation
        super().__init__(str(violation))


def _structural_check(inst: Instance, sched: Schedule) -> None:
    if len(sched.machine_sequences) != inst.m:
        raise ValueError(
            f"schedule has {len(sched.machine_sequences)} machine sequences, instance has m={inst.m}"
        )
    for seq in sched.machine_sequences:
        for job, _ in seq:
            if not 1 <= job <= inst.n:
                raise ValueError(f"job index {job} out of range 1..{inst.n}")
    for job in sched.tardy:
        if not 1 <= job <= inst.n:
            raise ValueError(f"job index {job} out of range 1..{inst.n}")


def validate_schedule(inst: Instance, sched: Schedule) -> Optional[ScheduleViolation]:
    """Check all schedule invariants against the instance.

    Returns ``None`` when the schedule is valid, otherwise a report naming the
    first violated invariant.  Checks, in order: every job appears exactly
    once (``job-duplicated`` / ``job-missing``); per-machine sequences are in
    increasing start order without overlap (``machine-order`` /
    ``machine-overlap``); conflicting jobs never overlap in time
    (``conflict-overlap``); starts are nonnegative and completions meet the
    deadline (``negative-start`` / ``deadline-exceeded``).

    Structurally malformed schedules (job index out of range, wrong machine
    count) raise ``ValueError`` instead.
    """
    _structural_check(inst, sched)

    seen: set[int] = set()
    for mi, seq in enumerate(sched.machine_sequences):
        for job, _ in seq:
            if job in seen:
                return ScheduleViolation("job-duplicated", (job,), machine=mi)
            seen.add(job)
    for job in sched.tardy:
        if job in seen:
            return ScheduleViolation("job-duplicated", (job,))
        seen.add(job)
    missing = [j for j in range(1, inst.n + 1) if j not in seen]
    if missing:
        return ScheduleViolation("job-missing", tuple(missing))

    for mi, seq in enumerate(sched.machine_sequences):
        for (job_a, s_a), (job_b, s_b) in zip(seq, seq[1:]):
            if s_b < s_a:
                return ScheduleViolation("machine-order", (job_a, job_b), machine=mi)
            if s_b < s_a + inst.p[job_a - 1]:
                return ScheduleViolation("machine-overlap", (job_a, job_b), machine=mi)

    placed = sched.assignments
    for j, g in inst.conflicts:
        if j in placed and g in placed:
            s_j = placed[j][1]
            s_g = placed[g][1]
            if s_j < s_g + inst.p[g - 1] and s_g < s_j + inst.p[j - 1]:
                return ScheduleViolation("conflict-overlap", (j, g))

    for mi, seq in enumerate(sched.machine_sequences):
        for job, start in seq:
            if start < 0:
                return ScheduleViolation("negative-start", (job,), machine=mi)
            if start + inst.p[job - 1] > inst.deadline:
                return ScheduleViolation(
                    "deadline-exceeded",
                    (job,),
                    machine=mi,
                    detail=f"completes at {start + inst.p[job - 1]} > D={inst.deadline}",
                )
    return None


def objective_value(inst: Instance, sched: Schedule) -> Fraction:
    """Total weight of on-time (scheduled) jobs; raises on invalid schedules."""
    violation = validate_schedule(inst, sched)
    if violation is not None:
        raise InvalidScheduleError(violation)
    return sum((inst.w[j - 1] for j in sched.assignments), Fraction(0))


@dataclass(frozen=True)
class SlotProfile:
    """Per-slot occupancy of a unit-time schedule over slots 1..D.

    ``k(t)`` counts the jobs finishing at t, ``slot_weights(t)`` lists their
    weights in non-increasing order, and ``u(t)`` is zero for slots holding at
    most two jobs and the third-largest slot weight otherwise.
    """

    deadline: int
    weights_by_slot: tuple[tuple[Fraction, ...], ...]

    def _slot(self, t: int) -> tuple[Fraction, ...]:
        if not 1 <= t <= self.deadline:
            raise ValueError(f"slot {t} outside 1..{self.deadline}")
        return self.weights_by_slot[t - 1]

    def k(self, t: int) -> int:
        return len(self._slot(t))

    def slot_weights(self, t: int) -> tuple[Fraction, ...]:
        return self._slot(t)

    def u(self, t: int) -> Fraction:
        weights = self._slot(t)
        return weights[2] if len(weights) > 2 else Fraction(0)

    def on_time_count(self) -> int:
        return sum(len(ws) for ws in self.weights_by_slot)

    def total_weight(self) -> Fraction:
        return sum((w for ws in self.weights_by_slot for w in ws), Fraction(0))


def slot_profile(inst: Instance, sched: Schedule) -> SlotProfile:
    """Build the slot occupancy profile of a valid unit-time schedule."""
    if not inst.is_uet:
        raise ValueError("slot profile requires unit processing times")
    violation = validate_schedule(inst, sched)
    if violation is not None:
        raise InvalidScheduleError(violation)
    slots: list[list[Fraction]] = [[] for _ in range(inst.deadline)]
    for job, (_, start) in sched.assignments.items():
        slots[start].append(inst.w[job - 1])
    return SlotProfile(
        deadline=inst.deadline,
        weights_by_slot=tuple(tuple(sorted(ws, reverse=True)) for ws in slots),
    )


# --- text formats -----------------------------------------------------------
#
# Instance (one per file):
#   line 1: n m D
#   line 2: p_1 ... p_n
#   line 3: w_1 ... w_n          (integers or exact fractions like 7/2)
#   line 4: e
#   then e lines: j g            (1-based conflict pairs)
# Lines starting with '#' are ignored on input.
#
# Schedule: JSON object {"machines": [[[job, start], ...], ...], "tardy": [...]}.


def instance_to_text(inst: Instance) -> str:
    lines = [
        f"{inst.n} {inst.m} {inst.deadline}",
        " ".join(str(pj) for pj in inst.p),
        " ".join(str(wj) for wj in inst.w),
        str(len(inst.conflicts)),
    ]
    lines.extend(f"{j} {g}" for j, g in inst.conflicts)
    return "\n".join(lines) + "\n"


def instance_from_text(text: str) -> Instance:
    numbered = [
        (i, line.strip())
        for i, line in enumerate(text.splitlines(), start=1)
        if line.strip() and not line.lstrip().startswith("#")
    ]
    if len(numbered) < 4:
        raise InstanceFormatError("expected at least 4 data lines (n m D / p / w / e)")

    def ints(lineno: int, line: str, count: Optional[int] = None) -> list[int]:
        parts = line.split()
        if count is not None and len(parts) != count:
            raise InstanceFormatError(f"expected {count} values, got {len(parts)}", lineno)
        try:
            return [int(tok) for tok in parts]
        except ValueError:
            raise InstanceFormatError(f"non-integer token in {line!r}", lineno) from None

    lineno, header = numbered[0]
    head = ints(lineno, header, 3)
    n, m, deadline = head

    lineno, pline = numbered[1]
    p = ints(lineno, pline, n)

    lineno, wline = numbered[2]
    wparts = wline.split()
    if len(wparts) != n:
        raise InstanceFormatError(f"expected {n} weights, got {len(wparts)}", lineno)
    try:
        w = [Fraction(tok) for tok in wparts]
    except (ValueError, ZeroDivisionError):
        raise InstanceFormatError(f"bad weight token in {wline!r}", lineno) from None

    lineno, eline = numbered[3]
    (e,) = ints(lineno, eline, 1)
    if len(numbered) != 4 + e:
        raise InstanceFormatError(f"expected {e} conflict lines, found {len(numbered) - 4}", lineno)
    conflicts = []
    seen = set()
    for lineno, line in numbered[4:]:
        j, g = ints(lineno, line, 2)
        if j == g:
            raise InstanceFormatError(f"conflict self-loop on job {j}", lineno)
        key = (min(j, g), max(j, g))
        if key in seen:
            raise InstanceFormatError(f"duplicate conflict pair {key}", lineno)
        seen.add(key)
        conflicts.append(key)
    try:
        return Instance(n=n, m=m, deadline=deadline, p=tuple(p), w=tuple(w), conflicts=tuple(conflicts))
    except ValueError as exc:
        raise InstanceFormatError(str(exc)) from exc


def schedule_to_json(sched: Schedule) -> str:
    payload = {
        "machines": [[[job, start] for job, start in seq] for seq in sched.machine_sequences],
        "tardy": list(sched.tardy),
    }
    return json.dumps(payload, sort_keys=True, separators=(",", ":")) + "\n"


def schedule_from_json(text: str) -> Schedule:
    try:
        payload = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ValueError(f"bad schedule JSON: {exc}") from exc
    if not isinstance(payload, dict) or "machines" not in payload:
        raise ValueError("schedule JSON must be an object with a 'machines' array")
    machines = payload["machines"]
    tardy = payload.get("tardy", [])
    try:
        seqs = tuple(tuple((int(j), int(s)) for j, s in seq) for seq in machines)
        return Schedule(machine_sequences=seqs, tardy=tuple(int(j) for j in tardy))
    except (TypeError, ValueError) as exc:
        raise ValueError(f"bad schedule JSON structure: {exc}") from exc
