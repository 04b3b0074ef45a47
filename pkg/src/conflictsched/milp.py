"""Integer programming formulations, LP-file export, and the exact solver.

Two formulations are built as solver-neutral models: a position-indexed one
(jobs at positions on machines, with linked start-time variables) and a
time-indexed one (one binary per feasible job start).  The exact solver
optimizes the time-indexed decision space and reports a proven upper bound on
the on-time weight whenever it is stopped early.
"""

from __future__ import annotations

import hashlib
import re
import time
from dataclasses import dataclass
from fractions import Fraction
from math import floor, lcm
from typing import Mapping, Optional, Sequence

import numpy as np
from scipy import sparse
from scipy.optimize import Bounds, LinearConstraint, milp

from .core import (
    Instance,
    InvalidScheduleError,
    Schedule,
    instance_to_text,
    objective_value,
    validate_schedule,
)

__all__ = [
    "IlpVariable",
    "IlpConstraint",
    "IlpModel",
    "BnbResult",
    "build_ilp1",
    "build_ilp2",
    "export_lp",
    "parse_lp",
    "read_lp",
    "lp_format",
    "solve_bnb",
    "extract_schedule",
    "position_count",
]

BINARY = "binary"
CONTINUOUS = "continuous"

_SENSES = ("<=", "=", ">=")


@dataclass(frozen=True)
class IlpVariable:
    name: str
    kind: str
    lower: Fraction = Fraction(0)
    upper: Optional[Fraction] = None  # None means +infinity

    def __post_init__(self):
        if self.kind not in (BINARY, CONTINUOUS):
            raise ValueError(f"unknown variable kind {self.kind!r}")
        object.__setattr__(self, "lower", Fraction(self.lower))
        if self.upper is not None:
            object.__setattr__(self, "upper", Fraction(self.upper))
        if self.kind == BINARY and (self.lower != 0 or self.upper != 1):
            raise ValueError(f"binary variable {self.name} must have bounds [0, 1]")


@dataclass(frozen=True)
class IlpConstraint:
    name: str
    terms: tuple[tuple[Fraction, str], ...]
    sense: str
    rhs: Fraction

    def __post_init__(self):
        if self.sense not in _SENSES:
            raise ValueError(f"bad constraint sense {self.sense!r}")
        object.__setattr__(self, "terms", tuple((Fraction(c), v) for c, v in self.terms))
        object.__setattr__(self, "rhs", Fraction(self.rhs))


@dataclass(frozen=True)
class IlpModel:
    """Solver-neutral minimization model plus provenance metadata."""

    formulation: str
    instance_fingerprint: str
    variables: tuple[IlpVariable, ...]
    constraints: tuple[IlpConstraint, ...]
    objective: tuple[tuple[Fraction, str], ...]

    def __post_init__(self):
        object.__setattr__(self, "objective", tuple((Fraction(c), v) for c, v in self.objective))
        names = {v.name for v in self.variables}
        if len(names) != len(self.variables):
            raise ValueError("duplicate variable names")
        for con in self.constraints:
            for _, var in con.terms:
                if var not in names:
                    raise ValueError(f"constraint {con.name} references undeclared {var}")
        for _, var in self.objective:
            if var not in names:
                raise ValueError(f"objective references undeclared {var}")
            if not var.startswith("U_"):
                raise ValueError("objective must reference only tardiness indicators")

    @property
    def binary_count(self) -> int:
        return sum(1 for v in self.variables if v.kind == BINARY)

    def variable(self, name: str) -> IlpVariable:
        for v in self.variables:
            if v.name == name:
                return v
        raise KeyError(name)


def instance_fingerprint(inst: Instance) -> str:
    return hashlib.sha256(instance_to_text(inst).encode()).hexdigest()[:12]


def position_count(inst: Instance) -> int:
    """Largest on-time position per machine: min(n, floor(D / min p))."""
    return min(inst.n, inst.deadline // min(inst.p))


def build_ilp1(inst: Instance) -> IlpModel:
    """Position-indexed formulation.

    Binary u_{j,k,l} places job j at position k of machine l, continuous
    t_{k,l} / tau_j carry start times linked through big-M terms (M = D), and
    directed y variables order each conflicting pair.  The position sum in the
    assignment constraints runs over 1..k_max only; later positions cannot
    host an on-time job and own no variables.
    """
    n, m, D = inst.n, inst.m, inst.deadline
    kmax = position_count(inst)
    K = range(1, kmax + 1)
    M = range(1, m + 1)

    variables: list[IlpVariable] = []
    for j in range(1, n + 1):
        for k in K:
            for l in M:
                variables.append(IlpVariable(f"u_{j}_{k}_{l}", BINARY, Fraction(0), Fraction(1)))
    for j in range(1, n + 1):
        variables.append(IlpVariable(f"U_{j}", BINARY, Fraction(0), Fraction(1)))
    for j, g in inst.conflicts:
        variables.append(IlpVariable(f"y_{j}_{g}", BINARY, Fraction(0), Fraction(1)))
        variables.append(IlpVariable(f"y_{g}_{j}", BINARY, Fraction(0), Fraction(1)))
    for k in K:
        for l in M:
            variables.append(IlpVariable(f"t_{k}_{l}", CONTINUOUS))
    for j in range(1, n + 1):
        variables.append(IlpVariable(f"tau_{j}", CONTINUOUS))

    one = Fraction(1)
    cons: list[IlpConstraint] = []
    for j in range(1, n + 1):
        terms = [(one, f"u_{j}_{k}_{l}") for k in K for l in M]
        terms.append((one, f"U_{j}"))
        cons.append(IlpConstraint(f"assign_{j}", tuple(terms), "=", one))
    for k in K:
        for l in M:
            cons.append(
                IlpConstraint(
                    f"pos_{k}_{l}",
                    tuple((one, f"u_{j}_{k}_{l}") for j in range(1, n + 1)),
                    "<=",
                    one,
                )
            )
    for k in range(1, kmax):
        for l in M:
            terms = [(one, f"t_{k}_{l}")]
            terms += [(Fraction(inst.p[j - 1]), f"u_{j}_{k}_{l}") for j in range(1, n + 1)]
            terms.append((-one, f"t_{k + 1}_{l}"))
            cons.append(IlpConstraint(f"chain_{k}_{l}", tuple(terms), "<=", Fraction(0)))
    for k in K:
        for l in M:
            terms = [(one, f"t_{k}_{l}")]
            terms += [(Fraction(inst.p[j - 1]), f"u_{j}_{k}_{l}") for j in range(1, n + 1)]
            cons.append(IlpConstraint(f"dl_{k}_{l}", tuple(terms), "<=", Fraction(D)))
    for j in range(1, n + 1):
        for k in K:
            for l in M:
                cons.append(
                    IlpConstraint(
                        f"tlo_{j}_{k}_{l}",
                        ((one, f"tau_{j}"), (-Fraction(D), f"u_{j}_{k}_{l}"), (-one, f"t_{k}_{l}")),
                        ">=",
                        -Fraction(D),
                    )
                )
                cons.append(
                    IlpConstraint(
                        f"thi_{j}_{k}_{l}",
                        ((one, f"t_{k}_{l}"), (-Fraction(D), f"u_{j}_{k}_{l}"), (-one, f"tau_{j}")),
                        ">=",
                        -Fraction(D),
                    )
                )
    for j, g in inst.conflicts:
        for a, b in ((j, g), (g, j)):
            cons.append(
                IlpConstraint(
                    f"prec_{a}_{b}",
                    (
                        (one, f"tau_{a}"),
                        (-Fraction(inst.p[a - 1]), f"U_{a}"),
                        (-Fraction(D), f"y_{a}_{b}"),
                        (-one, f"tau_{b}"),
                    ),
                    "<=",
                    -Fraction(inst.p[a - 1]),
                )
            )
        cons.append(
            IlpConstraint(f"excl_{j}_{g}", ((one, f"y_{j}_{g}"), (one, f"y_{g}_{j}")), "<=", one)
        )

    return IlpModel(
        formulation="ILP1",
        instance_fingerprint=instance_fingerprint(inst),
        variables=tuple(variables),
        constraints=tuple(cons),
        objective=tuple((inst.w[j - 1], f"U_{j}") for j in range(1, n + 1)),
    )


def _start_range(inst: Instance, j: int) -> range:
    return range(0, inst.deadline - inst.p[j - 1] + 1)


def build_ilp2(inst: Instance) -> IlpModel:
    """Time-indexed formulation: v_{j,t} = 1 when job j starts at t.

    Jobs with p_j > D get no start variables and are forced tardy by their
    choice constraint.  Machine capacity is enforced per unit time slot and
    conflicting pairs are serialized through big-M (M = D) precedences.
    """
    n, m, D = inst.n, inst.m, inst.deadline
    one = Fraction(1)
    variables: list[IlpVariable] = []
    for j in range(1, n + 1):
        for t in _start_range(inst, j):
            variables.append(IlpVariable(f"v_{j}_{t}", BINARY, Fraction(0), Fraction(1)))
    for j in range(1, n + 1):
        variables.append(IlpVariable(f"U_{j}", BINARY, Fraction(0), Fraction(1)))
    for j, g in inst.conflicts:
        variables.append(IlpVariable(f"y_{j}_{g}", BINARY, Fraction(0), Fraction(1)))
        variables.append(IlpVariable(f"y_{g}_{j}", BINARY, Fraction(0), Fraction(1)))

    cons: list[IlpConstraint] = []
    for j in range(1, n + 1):
        terms = [(one, f"v_{j}_{t}") for t in _start_range(inst, j)]
        terms.append((one, f"U_{j}"))
        cons.append(IlpConstraint(f"choose_{j}", tuple(terms), "=", one))
    for t in range(D):
        terms = []
        for j in range(1, n + 1):
            lo = max(0, t - inst.p[j - 1] + 1)
            hi = min(t, D - inst.p[j - 1])
            terms += [(one, f"v_{j}_{s}") for s in range(lo, hi + 1)]
        if terms:
            cons.append(IlpConstraint(f"cap_{t}", tuple(terms), "<=", Fraction(m)))
    for j, g in inst.conflicts:
        for a, b in ((j, g), (g, j)):
            terms = [(Fraction(t), f"v_{a}_{t}") for t in _start_range(inst, a) if t]
            terms.append((-Fraction(inst.p[a - 1]), f"U_{a}"))
            terms.append((-Fraction(D), f"y_{a}_{b}"))
            terms += [(-Fraction(t), f"v_{b}_{t}") for t in _start_range(inst, b) if t]
            cons.append(
                IlpConstraint(f"prec_{a}_{b}", tuple(terms), "<=", -Fraction(inst.p[a - 1]))
            )
        cons.append(
            IlpConstraint(f"excl_{j}_{g}", ((one, f"y_{j}_{g}"), (one, f"y_{g}_{j}")), "<=", one)
        )

    return IlpModel(
        formulation="ILP2",
        instance_fingerprint=instance_fingerprint(inst),
        variables=tuple(variables),
        constraints=tuple(cons),
        objective=tuple((inst.w[j - 1], f"U_{j}") for j in range(1, n + 1)),
    )


# --- LP text format -----------------------------------------------------------


def _format_number(value: Fraction) -> str:
    if value.denominator == 1:
        return str(value.numerator)
    den = value.denominator
    twos = fives = 0
    while den % 2 == 0:
        den //= 2
        twos += 1
    while den % 5 == 0:
        den //= 5
        fives += 1
    if den == 1:
        digits = max(twos, fives)
        scaled = value.numerator * 10**digits // value.denominator
        text = f"{scaled:0{digits + 1}d}" if scaled >= 0 else f"-{-scaled:0{digits + 1}d}"
        sign, mag = ("-", text[1:]) if text.startswith("-") else ("", text)
        out = f"{sign}{mag[:-digits] or '0'}.{mag[-digits:]}".rstrip("0").rstrip(".")
        return out
    # non-terminating decimal: nearest double, documented lossy case
    return repr(float(value))


def _format_terms(terms: Sequence[tuple[Fraction, str]]) -> str:
    parts: list[str] = []
    for coef, name in terms:
        mag = abs(coef)
        body = name if mag == 1 else f"{_format_number(mag)} {name}"
        if not parts:
            parts.append(f"- {body}" if coef < 0 else body)
        else:
            parts.append(f"{'-' if coef < 0 else '+'} {body}")
    return " ".join(parts)


def lp_format(model: IlpModel) -> str:
    """Render the model in CPLEX-style LP text with a canonical layout."""
    lines = [
        f"\\ formulation: {model.formulation}",
        f"\\ instance: {model.instance_fingerprint}",
        "Minimize",
        f" obj: {_format_terms(model.objective)}",
        "Subject To",
    ]
    for con in model.constraints:
        lines.append(f" {con.name}: {_format_terms(con.terms)} {con.sense} {_format_number(con.rhs)}")
    continuous = [v for v in model.variables if v.kind == CONTINUOUS]
    if continuous:
        lines.append("Bounds")
        for v in continuous:
            if v.upper is None:
                lines.append(f" {_format_number(v.lower)} <= {v.name}")
            else:
                lines.append(f" {_format_number(v.lower)} <= {v.name} <= {_format_number(v.upper)}")
    binaries = [v for v in model.variables if v.kind == BINARY]
    if binaries:
        lines.append("Binary")
        lines.extend(f" {v.name}" for v in binaries)
    lines.append("End")
    return "\n".join(lines) + "\n"


def export_lp(model: IlpModel, path) -> None:
    """Write the model to `path` in LP format."""
    with open(path, "w", encoding="ascii") as fh:
        fh.write(lp_format(model))


_NAME_RE = re.compile(r"[A-Za-z_][A-Za-z0-9_]*$")
_NUMBER_RE = re.compile(r"-?(\d+(\.\d*)?|\.\d+)$")


def _parse_terms(text: str, where: str) -> tuple[tuple[Fraction, str], ...]:
    tokens = text.split()
    terms: list[tuple[Fraction, str]] = []
    sign = Fraction(1)
    coef: Optional[Fraction] = None
    for tok in tokens:
        if tok == "+":
            sign, coef = Fraction(1), None
        elif tok == "-":
            sign, coef = Fraction(-1), None
        elif _NUMBER_RE.match(tok):
            if coef is not None:
                raise ValueError(f"{where}: dangling number before {tok!r}")
            coef = Fraction(tok)
        elif _NAME_RE.match(tok):
            terms.append((sign * (coef if coef is not None else 1), tok))
            sign, coef = Fraction(1), None
        else:
            raise ValueError(f"{where}: unexpected token {tok!r}")
    if coef is not None:
        raise ValueError(f"{where}: trailing number without variable")
    return tuple(terms)


def parse_lp(text: str) -> IlpModel:
    """Parse LP text written by :func:`lp_format` back into a model.

    The reconstruction is structural: variables come back ordered binaries
    after continuous, which re-exports byte-identically because sections
    preserve relative order.
    """
    formulation = "?"
    fingerprint = "?"
    section = None
    objective: tuple[tuple[Fraction, str], ...] = ()
    constraints: list[IlpConstraint] = []
    continuous: list[IlpVariable] = []
    binaries: list[IlpVariable] = []
    for raw in text.splitlines():
        line = raw.strip()
        if not line:
            continue
        if line.startswith("\\"):
            meta = line[1:].strip()
            if meta.startswith("formulation:"):
                formulation = meta.split(":", 1)[1].strip()
            elif meta.startswith("instance:"):
                fingerprint = meta.split(":", 1)[1].strip()
            continue
        if line in ("Minimize", "Subject To", "Bounds", "Binary", "End"):
            section = line
            continue
        if section == "Minimize":
            label, _, expr = line.partition(":")
            if label.strip() != "obj":
                raise ValueError(f"unexpected objective label {label!r}")
            objective = _parse_terms(expr, "objective")
        elif section == "Subject To":
            label, sep, rest = line.partition(":")
            if not sep:
                raise ValueError(f"constraint line without label: {line!r}")
            tokens = rest.split()
            sense_idx = next((i for i, t in enumerate(tokens) if t in _SENSES), None)
            if sense_idx is None or sense_idx != len(tokens) - 2:
                raise ValueError(f"constraint {label.strip()}: missing sense/rhs")
            terms = _parse_terms(" ".join(tokens[:sense_idx]), f"constraint {label.strip()}")
            constraints.append(
                IlpConstraint(label.strip(), terms, tokens[sense_idx], Fraction(tokens[-1]))
            )
        elif section == "Bounds":
            tokens = line.split()
            if len(tokens) == 3 and tokens[1] == "<=":
                continuous.append(IlpVariable(tokens[2], CONTINUOUS, Fraction(tokens[0])))
            elif len(tokens) == 5 and tokens[1] == tokens[3] == "<=":
                continuous.append(
                    IlpVariable(tokens[2], CONTINUOUS, Fraction(tokens[0]), Fraction(tokens[4]))
                )
            else:
                raise ValueError(f"bad bounds line: {line!r}")
        elif section == "Binary":
            binaries.append(IlpVariable(line, BINARY, Fraction(0), Fraction(1)))
        elif section == "End":
            raise ValueError(f"content after End: {line!r}")
        else:
            raise ValueError(f"content before any section: {line!r}")
    return IlpModel(
        formulation=formulation,
        instance_fingerprint=fingerprint,
        variables=tuple(continuous) + tuple(binaries),
        constraints=tuple(constraints),
        objective=objective,
    )


def read_lp(path) -> IlpModel:
    with open(path, "r", encoding="ascii") as fh:
        return parse_lp(fh.read())


# --- schedule extraction -------------------------------------------------------


def _schedule_from_starts(inst: Instance, starts: Mapping[int, int]) -> Schedule:
    """Assign started jobs to machines greedily by start time; the per-slot
    capacity bound guarantees a free machine exists for feasible inputs."""
    avail = [0] * inst.m
    lanes: list[list[tuple[int, int]]] = [[] for _ in range(inst.m)]
    for job, start in sorted(starts.items(), key=lambda kv: (kv[1], kv[0])):
        lane = next((l for l in range(inst.m) if avail[l] <= start), None)
        if lane is None:
            lane = 0  # overloaded slot; final validation will report it
        lanes[lane].append((job, start))
        avail[lane] = start + inst.p[job - 1]
    tardy = [j for j in range(1, inst.n + 1) if j not in starts]
    return Schedule(machine_sequences=tuple(tuple(l) for l in lanes), tardy=tuple(tardy))


def extract_schedule(inst: Instance, model: IlpModel, assignment: Mapping[str, object]) -> Schedule:
    """Recover a schedule from an integral-feasible variable assignment.

    For the position-indexed model job j sits on machine l starting at the
    value of t_{k,l}; for the time-indexed model job j starts at its selected
    t and machines are assigned greedily.  The result is validated and an
    ``InvalidScheduleError`` raised for infeasible assignments.
    """
    if model.instance_fingerprint != instance_fingerprint(inst):
        raise ValueError("model fingerprint does not match the given instance")

    def val(name: str) -> Fraction:
        return Fraction(assignment.get(name, 0))

    def is_on(name: str) -> bool:
        return val(name) > Fraction(1, 2)

    if model.formulation == "ILP2":
        starts: dict[int, int] = {}
        for j in range(1, inst.n + 1):
            if is_on(f"U_{j}"):
                continue
            for t in _start_range(inst, j):
                if is_on(f"v_{j}_{t}"):
                    starts[j] = t
                    break
        sched = _schedule_from_starts(inst, starts)
    elif model.formulation == "ILP1":
        kmax = position_count(inst)
        lanes: list[list[tuple[int, int, int]]] = [[] for _ in range(inst.m)]  # (k, job, start)
        tardy: list[int] = []
        for j in range(1, inst.n + 1):
            if is_on(f"U_{j}"):
                tardy.append(j)
                continue
            spot = next(
                (
                    (k, l)
                    for k in range(1, kmax + 1)
                    for l in range(1, inst.m + 1)
                    if is_on(f"u_{j}_{k}_{l}")
                ),
                None,
            )
            if spot is None:
                tardy.append(j)  # violates the assignment constraint; validation reports it
                continue
            k, l = spot
            start = val(f"t_{k}_{l}")
            if start.denominator != 1:
                raise ValueError(f"start time t_{k}_{l}={start} is not integral")
            lanes[l - 1].append((k, j, int(start)))
        seqs = tuple(tuple((j, s) for _, j, s in sorted(lane)) for lane in lanes)
        sched = Schedule(machine_sequences=seqs, tardy=tuple(tardy))
    else:
        raise ValueError(f"unknown formulation {model.formulation!r}")

    violation = validate_schedule(inst, sched)
    if violation is not None:
        raise InvalidScheduleError(violation)
    return sched


def _scaled_weights(inst: Instance) -> tuple[int, list[int]]:
    scale = lcm(*(wj.denominator for wj in inst.w))
    scaled = [wj.numerator * (scale // wj.denominator) for wj in inst.w]
    if any(abs(s) > 2**50 for s in scaled):
        raise ValueError("weights need more than 50 bits after scaling; solver precision unsafe")
    return scale, scaled


def solve_bnb(
    inst: Instance,
    time_limit: Optional[float] = None,
    node_limit: Optional[int] = None,
) -> BnbResult:
    """Exact branch-and-bound over the time-indexed decision space.

    Weights are scaled to integers so the optimum is proven exactly; the
    returned value is recomputed in rational arithmetic from the extracted
    schedule.  When a limit stops the search early the result carries the
    incumbent (if any) and a valid upper bound on the on-time weight.
    """
    t0 = time.perf_counter()
    fitting = [j for j in range(1, inst.n + 1) if inst.p[j - 1] <= inst.deadline]
    if not fitting:
        sched = Schedule(machine_sequences=((),) * inst.m, tardy=tuple(range(1, inst.n + 1)))
        return BnbResult(sched, Fraction(0), Fraction(0), "optimal", 0, time.perf_counter() - t0)

    scale, w_scaled = _scaled_weights(inst)
    n, m, D = inst.n, inst.m, inst.deadline

    # column layout: all v_{j,t} (j-major), then U_j, then y pairs
    v_col: dict[int, int] = {}
    ncols = 0
    for j in fitting:
        v_col[j] = ncols
        ncols += D - inst.p[j - 1] + 1
    u_col = {j: ncols + i for i, j in enumerate(range(1, n + 1))}
    ncols += n
    y_col: dict[tuple[int, int], int] = {}
    for j, g in inst.conflicts:
        y_col[(j, g)] = ncols
        y_col[(g, j)] = ncols + 1
        ncols += 2

    c = np.zeros(ncols)
    for j in range(1, n + 1):
        c[u_col[j]] = w_scaled[j - 1]

    rows_eq: list[np.ndarray] = []
    cols_eq: list[np.ndarray] = []
    eq_count = 0
    for j in range(1, n + 1):
        idx = [u_col[j]]
        if j in v_col:
            idx = list(range(v_col[j], v_col[j] + D - inst.p[j - 1] + 1)) + idx
        rows_eq.append(np.full(len(idx), eq_count))
        cols_eq.append(np.array(idx))
        eq_count += 1
    a_eq = sparse.coo_matrix(
        (np.ones(sum(len(x) for x in cols_eq)), (np.concatenate(rows_eq), np.concatenate(cols_eq))),
        shape=(eq_count, ncols),
    )

    rows_ub: list[np.ndarray] = []
    cols_ub: list[np.ndarray] = []
    data_ub: list[np.ndarray] = []
    ub_rhs: list[float] = []
    # capacity: each start column covers p_j consecutive unit slots
    for j in fitting:
        pj = inst.p[j - 1]
        starts = np.arange(D - pj + 1)
        rows_ub.append((starts[:, None] + np.arange(pj)[None, :]).ravel())
        cols_ub.append(np.repeat(v_col[j] + starts, pj))
        data_ub.append(np.ones((D - pj + 1) * pj))
    cap_rows = D
    ub_rhs.extend([float(m)] * cap_rows)
    row_base = cap_rows
    for j, g in inst.conflicts:
        for a, b in ((j, g), (g, j)):
            pa = inst.p[a - 1]
            idx: list[int] = []
            dat: list[float] = []
            if a in v_col:
                ts = np.arange(1, D - pa + 1)
                idx.extend(v_col[a] + ts)
                dat.extend(ts.astype(float))
            if b in v_col:
                ts = np.arange(1, D - inst.p[b - 1] + 1)
                idx.extend(v_col[b] + ts)
                dat.extend((-ts).astype(float))
            idx.extend([u_col[a], y_col[(a, b)]])
            dat.extend([-float(pa), -float(D)])
            rows_ub.append(np.full(len(idx), row_base))
            cols_ub.append(np.array(idx))
            data_ub.append(np.array(dat))
            ub_rhs.append(-float(pa))
            row_base += 1
        rows_ub.append(np.array([row_base, row_base]))
        cols_ub.append(np.array([y_col[(j, g)], y_col[(g, j)]]))
        data_ub.append(np.ones(2))
        ub_rhs.append(1.0)
        row_base += 1
    a_ub = sparse.coo_matrix(
        (np.concatenate(data_ub), (np.concatenate(rows_ub), np.concatenate(cols_ub))),
        shape=(row_base, ncols),
    )

    constraints = [
        LinearConstraint(a_eq, 1.0, 1.0),
        LinearConstraint(a_ub, -np.inf, np.array(ub_rhs)),
    ]
    options: dict = {"mip_rel_gap": 0.0}
    if time_limit is not None:
        options["time_limit"] = float(time_limit)
    if node_limit is not None:
        options["node_limit"] = int(node_limit)
    res = milp(
        c,
        constraints=constraints,
        integrality=np.ones(ncols),
        bounds=Bounds(0.0, 1.0),
        options=options,
    )
    elapsed = time.perf_counter() - t0
    nodes = int(getattr(res, "mip_node_count", 0) or 0)

    if res.status == 2:
        return BnbResult(None, None, inst.total_weight, "infeasible-model", nodes, elapsed)

    schedule = None
    value = None
    if res.x is not None:
        starts = {}
        for j in fitting:
            if res.x[u_col[j]] > 0.5:
                continue
            block = res.x[v_col[j] : v_col[j] + D - inst.p[j - 1] + 1]
            t = int(np.argmax(block))
            if block[t] > 0.5:
                starts[j] = t
        schedule = _schedule_from_starts(inst, starts)
        value = objective_value(inst, schedule)

    total_scaled = sum(w_scaled)
    if res.status == 0 and value is not None:
        return BnbResult(schedule, value, value, "optimal", nodes, elapsed)

    dual = getattr(res, "mip_dual_bound", None)
    if dual is None or not np.isfinite(dual):
        upper = inst.total_weight
    else:
        # dual bounds the scaled tardy weight from below; optimum is integral
        # in scaled units, so flooring with a small cushion stays valid
        upper = Fraction(floor(total_scaled - dual + 1e-6), scale)
    if value is not None and upper < value:
        upper = value
    return BnbResult(schedule, value, upper, "bound-only", nodes, elapsed)


@dataclass(frozen=True)
class BnbResult:
    """Outcome of the exact solver.

    ``status`` is one of ``optimal`` (value proven best), ``bound-only``
    (stopped by a limit; incumbent may be absent) or ``infeasible-model``.
    ``upper_bound`` always bounds the maximum on-time weight from above.
    """

    schedule: Optional[Schedule]
    value: Optional[Fraction]
    upper_bound: Fraction
    status: str
    node_count: int
    elapsed: float

    def __post_init__(self):
        if self.value is not None and self.value > self.upper_bound:
            raise ValueError("incumbent value exceeds the proven upper bound")
        if self.status == "optimal" and self.value != self.upper_bound:
            raise ValueError("optimal status requires value == upper bound")
