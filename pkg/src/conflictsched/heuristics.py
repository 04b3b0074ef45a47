"""List scheduling and neighborhood search for arbitrary processing times.

The search works on per-machine job orderings; after every move the start
times are recomputed by a deterministic repair that places the front job with
the globally smallest feasible start, drops jobs that can no longer meet the
deadline, and finally tries to re-insert tardy jobs in weighted-shortest-
processing-time order on the least loaded machines.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from math import lcm
from typing import Iterable, Iterator, Optional, Sequence

from .core import Instance, InvalidScheduleError, Schedule, validate_schedule

__all__ = [
    "SearchConfig",
    "wspt_list_schedule",
    "recompute_start_times",
    "vns",
    "ivns",
]

_ALL_NEIGHBORHOODS = (1, 2, 3, 4, 5, 6)


@dataclass(frozen=True)
class SearchConfig:
    """Knobs for the neighborhood search.

    ``shake_moves`` defaults to ceil(n/20) when left unset.  The random
    stream is a seeded Mersenne Twister (``random.Random``) consumed only
    through ``randrange`` in a fixed order (job, machine, position per shake
    move), so runs are reproducible across platforms.
    """

    neighborhood_order: tuple[int, ...] = _ALL_NEIGHBORHOODS
    shake_moves: Optional[int] = None
    restarts: int = 10
    rng_seed: int = 0

    def __post_init__(self):
        if tuple(sorted(self.neighborhood_order)) != _ALL_NEIGHBORHOODS:
            raise ValueError("neighborhood_order must be a permutation of 1..6")
        if self.restarts < 1:
            raise ValueError("restarts must be >= 1")
        if self.shake_moves is not None and self.shake_moves < 1:
            raise ValueError("shake_moves must be >= 1")

    def effective_shake_moves(self, n: int) -> int:
        return self.shake_moves if self.shake_moves is not None else max(1, -(-n // 20))


class _Ctx:
    """Precomputed per-instance data for the hot search loops."""

    __slots__ = ("inst", "n", "m", "deadline", "p", "adj", "w_scaled", "scale", "wspt_order", "wspt_rank")

    def __init__(self, inst: Instance):
        self.inst = inst
        self.n = inst.n
        self.m = inst.m
        self.deadline = inst.deadline
        self.p = (0,) + inst.p  # 1-based
        self.adj = ((),) + tuple(tuple(sorted(s)) for s in inst.conflict_neighbors)
        self.scale = lcm(*(wj.denominator for wj in inst.w))
        self.w_scaled = (0,) + tuple(wj.numerator * (self.scale // wj.denominator) for wj in inst.w)
        order = sorted(range(1, inst.n + 1), key=lambda j: (inst.p[j - 1] / inst.w[j - 1], j))
        self.wspt_order = tuple(order)
        self.wspt_rank = [0] * (inst.n + 1)
        for rank, job in enumerate(order):
            self.wspt_rank[job] = rank

    def to_fraction(self, scaled_value: int) -> Fraction:
        return Fraction(scaled_value, self.scale)


def _earliest(ctx: _Ctx, start_of: list[int], end_of: list[int], job: int, t0: int) -> int:
    """Smallest start >= t0 avoiding the placed intervals of conflicting jobs."""
    t = t0
    pj = ctx.p[job]
    ivs = [(start_of[g], end_of[g]) for g in ctx.adj[job] if start_of[g] >= 0]
    if ivs:
        ivs.sort()
        for s, e in ivs:
            if s < t + pj and e > t:
                t = e
    return t


def _repair(ctx: _Ctx, seqs: Sequence[Sequence[int]]):
    """Place the given per-machine orderings, evicting late jobs and refilling
    from the tardy list; returns (placed sequences with starts, tardy, value).

    Placement picks, among the front-most unplaced job of every machine, the
    one with the smallest feasible start (ties by machine index).  A front
    whose completion would exceed the deadline goes tardy and its successors
    shift forward.  Afterwards all unscheduled jobs are scanned in WSPT order
    and appended to machines in order of increasing availability when they
    still fit.  The value is returned in scaled-integer weight units.
    """
    m = ctx.m
    deadline = ctx.deadline
    p = ctx.p
    ptr = [0] * m
    avail = [0] * m
    placed: list[list[tuple[int, int]]] = [[] for _ in range(m)]
    start_of = [-1] * (ctx.n + 1)
    end_of = [0] * (ctx.n + 1)
    in_seqs = [False] * (ctx.n + 1)
    remaining = 0
    for seq in seqs:
        remaining += len(seq)
        for job in seq:
            in_seqs[job] = True

    value = 0
    while remaining:
        best_t = -1
        best_l = -1
        for l in range(m):
            i = ptr[l]
            if i < len(seqs[l]):
                t = _earliest(ctx, start_of, end_of, seqs[l][i], avail[l])
                if best_l < 0 or t < best_t:
                    best_t = t
                    best_l = l
        job = seqs[best_l][ptr[best_l]]
        ptr[best_l] += 1
        remaining -= 1
        end = best_t + p[job]
        if end <= deadline:
            placed[best_l].append((job, best_t))
            start_of[job] = best_t
            end_of[job] = end
            avail[best_l] = end
            value += ctx.w_scaled[job]

    # tardy refill: evicted and never-assigned jobs alike, in WSPT order
    tardy = [job for job in range(1, ctx.n + 1) if start_of[job] < 0]
    tardy.sort(key=lambda job: ctx.wspt_rank[job])
    still_tardy: list[int] = []
    for job in tardy:
        pj = p[job]
        done = False
        for l in sorted(range(m), key=lambda l: (avail[l], l)):
            t = _earliest(ctx, start_of, end_of, job, avail[l])
            if t + pj <= deadline:
                placed[l].append((job, t))
                start_of[job] = t
                end_of[job] = t + pj
                avail[l] = t + pj
                value += ctx.w_scaled[job]
                done = True
                break
        if not done:
            still_tardy.append(job)
    still_tardy.sort()
    return placed, still_tardy, value


def _to_schedule(placed, tardy) -> Schedule:
    return Schedule(
        machine_sequences=tuple(tuple(seq) for seq in placed),
        tardy=tuple(tardy),
    )


def wspt_list_schedule(inst: Instance) -> Schedule:
    """List scheduling in weighted-shortest-processing-time order.

    Each job goes to the machine that frees up first; its start is the
    earliest time on that machine compatible with the processing intervals of
    already scheduled conflicting jobs, and the job goes tardy when that start
    would push completion past the deadline.
    """
    ctx = _Ctx(inst)
    avail = [0] * ctx.m
    placed: list[list[tuple[int, int]]] = [[] for _ in range(ctx.m)]
    start_of = [-1] * (ctx.n + 1)
    end_of = [0] * (ctx.n + 1)
    tardy: list[int] = []
    for job in ctx.wspt_order:
        l = min(range(ctx.m), key=lambda l: (avail[l], l))
        t = _earliest(ctx, start_of, end_of, job, avail[l])
        end = t + ctx.p[job]
        if end <= ctx.deadline:
            placed[l].append((job, t))
            start_of[job] = t
            end_of[job] = end
            avail[l] = end
        else:
            tardy.append(job)
    return _to_schedule(placed, tardy)


def recompute_start_times(inst: Instance, assignment: Sequence[Sequence[int]]) -> Schedule:
    """Repair an explicit per-machine job ordering into a valid schedule.

    ``assignment`` holds one job-id sequence per machine; jobs absent from
    every sequence start out tardy.  Duplicate or out-of-range jobs raise
    ``ValueError``.
    """
    seqs = [[int(j) for j in seq] for seq in assignment]
    if len(seqs) != inst.m:
        raise ValueError(f"assignment has {len(seqs)} sequences, instance has m={inst.m}")
    flat = [j for seq in seqs for j in seq]
    for j in flat:
        if not 1 <= j <= inst.n:
            raise ValueError(f"job index {j} out of range 1..{inst.n}")
    if len(set(flat)) != len(flat):
        dupes = sorted({j for j in flat if flat.count(j) > 1})
        raise ValueError(f"duplicate jobs in assignment: {dupes}")
    placed, tardy, _ = _repair(_Ctx(inst), seqs)
    return _to_schedule(placed, tardy)


# --- neighborhoods ------------------------------------------------------------


def _copy(seqs):
    return [list(s) for s in seqs]


def _moves_swap_within(seqs, tardy) -> Iterator[list[list[int]]]:
    for i, seq in enumerate(seqs):
        for a in range(len(seq)):
            for b in range(a + 1, len(seq)):
                new = _copy(seqs)
                new[i][a], new[i][b] = new[i][b], new[i][a]
                yield new


def _moves_shift_within(seqs, tardy) -> Iterator[list[list[int]]]:
    for i, seq in enumerate(seqs):
        for a in range(len(seq)):
            for b in range(len(seq)):
                if b == a:
                    continue
                new = _copy(seqs)
                job = new[i].pop(a)
                new[i].insert(b, job)
                yield new


def _moves_swap_across(seqs, tardy) -> Iterator[list[list[int]]]:
    for i1 in range(len(seqs)):
        for i2 in range(i1 + 1, len(seqs)):
            for a in range(len(seqs[i1])):
                for b in range(len(seqs[i2])):
                    new = _copy(seqs)
                    new[i1][a], new[i2][b] = new[i2][b], new[i1][a]
                    yield new


def _moves_move_across(seqs, tardy) -> Iterator[list[list[int]]]:
    for i1 in range(len(seqs)):
        for a in range(len(seqs[i1])):
            for i2 in range(len(seqs)):
                if i2 == i1:
                    continue
                for b in range(len(seqs[i2]) + 1):
                    new = _copy(seqs)
                    job = new[i1].pop(a)
                    new[i2].insert(b, job)
                    yield new


def _moves_replace_with_tardy(seqs, tardy) -> Iterator[list[list[int]]]:
    for i in range(len(seqs)):
        for a in range(len(seqs[i])):
            for u in tardy:
                new = _copy(seqs)
                new[i][a] = u
                yield new


def _moves_insert_tardy(seqs, tardy) -> Iterator[list[list[int]]]:
    for u in tardy:
        for i in range(len(seqs)):
            for b in range(len(seqs[i]) + 1):
                new = _copy(seqs)
                new[i].insert(b, u)
                yield new


_MOVES = {
    1: _moves_swap_within,
    2: _moves_shift_within,
    3: _moves_swap_across,
    4: _moves_move_across,
    5: _moves_replace_with_tardy,
    6: _moves_insert_tardy,
}


def neighborhood_moves(k: int, seqs, tardy) -> Iterator[list[list[int]]]:
    """Enumerate neighborhood k's candidate orderings (exposed for tests)."""
    return _MOVES[k](seqs, tardy)


def _vnd(ctx: _Ctx, placed, tardy, value, order):
    """Variable neighborhood descent with best-improvement scans."""
    seqs = [[job for job, _ in seq] for seq in placed]
    k_idx = 0
    while k_idx < len(order):
        best = None
        best_val = value
        for cand in _MOVES[order[k_idx]](seqs, tardy):
            r_placed, r_tardy, r_val = _repair(ctx, cand)
            if r_val > best_val:
                best = (r_placed, r_tardy)
                best_val = r_val
        if best is not None:
            placed, tardy = best
            value = best_val
            seqs = [[job for job, _ in seq] for seq in placed]
            k_idx = 0
        else:
            k_idx += 1
    return placed, tardy, value


def _state_from_schedule(ctx: _Ctx, sched: Schedule):
    placed = [list(seq) for seq in sched.machine_sequences]
    tardy = list(sched.tardy)
    value = sum(ctx.w_scaled[job] for seq in placed for job, _ in seq)
    return placed, tardy, value


def vns(inst: Instance, start: Schedule, cfg: Optional[SearchConfig] = None) -> Schedule:
    """Variable neighborhood descent from a valid starting schedule.

    Scans the six neighborhoods in the configured order with best-improvement
    acceptance; an accepted move resets the scan to the first neighborhood.
    The result never scores below the start.
    """
    cfg = cfg or SearchConfig()
    violation = validate_schedule(inst, start)
    if violation is not None:
        raise InvalidScheduleError(violation)
    ctx = _Ctx(inst)
    placed, tardy, value = _state_from_schedule(ctx, start)
    placed, tardy, value = _vnd(ctx, placed, tardy, value, cfg.neighborhood_order)
    return _to_schedule(placed, tardy)


def _shake(ctx: _Ctx, seqs, rng: random.Random, moves: int):
    """Move `moves` random jobs to random positions; draws are
    (job, machine, position) triples via randrange."""
    seqs = _copy(seqs)
    for _ in range(moves):
        job = 1 + rng.randrange(ctx.n)
        for seq in seqs:
            if job in seq:
                seq.remove(job)
                break
        i = rng.randrange(ctx.m)
        pos = rng.randrange(len(seqs[i]) + 1)
        seqs[i].insert(pos, job)
    return seqs


def ivns(inst: Instance, cfg: Optional[SearchConfig] = None) -> Schedule:
    """Iterated variable neighborhood search.

    Runs descent from the WSPT schedule, then repeatedly shakes the incumbent
    (random job moves followed by repair) and descends again, keeping the best
    schedule over all restarts.  Deterministic for a fixed seed.
    """
    cfg = cfg or SearchConfig()
    ctx = _Ctx(inst)
    start = wspt_list_schedule(inst)
    placed, tardy, value = _state_from_schedule(ctx, start)
    best = _vnd(ctx, placed, tardy, value, cfg.neighborhood_order)
    rng = random.Random(cfg.rng_seed)
    moves = cfg.effective_shake_moves(inst.n)
    for _ in range(cfg.restarts - 1):
        seqs = [[job for job, _ in seq] for seq in best[0]]
        shaken = _shake(ctx, seqs, rng, moves)
        r_placed, r_tardy, r_val = _repair(ctx, shaken)
        state = _vnd(ctx, r_placed, r_tardy, r_val, cfg.neighborhood_order)
        if state[2] > best[2]:
            best = state
    return _to_schedule(best[0], best[1])
