"""Seeded random instance generation and instance file I/O.

Processing times are uniform integers in [50, 150] and weights uniform
integers in [1, 5]; the common deadline follows D = 100 * delta * n / m
(rounded half-up) and exactly floor(c * n(n-1)/2) distinct conflict edges are
sampled without replacement.  All draws come from a seeded Mersenne Twister
through ``randrange`` only, in a fixed order (p's, then w's, then edges), so
instances are fully determined by their seed.
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Optional

from .core import Instance, InstanceFormatError, instance_from_text, instance_to_text

__all__ = [
    "GenParams",
    "generate_instance",
    "read_instance",
    "write_instance",
    "write_manifest",
    "read_manifest",
    "MANIFEST_NAME",
]

MANIFEST_NAME = "manifest.json"


@dataclass(frozen=True)
class GenParams:
    """Generator knobs: machine count, job count, time-window ratio delta,
    conflict density c, and the seed."""

    m: int
    n: int
    delta: Fraction
    c: Fraction
    seed: int
    p_range: tuple[int, int] = (50, 150)
    w_range: tuple[int, int] = (1, 5)

    def __post_init__(self):
        object.__setattr__(self, "delta", Fraction(self.delta))
        object.__setattr__(self, "c", Fraction(self.c))
        if self.m < 2:
            raise ValueError("m must be >= 2")
        if self.n < 1:
            raise ValueError("n must be >= 1")
        if self.delta <= 0:
            raise ValueError("delta must be > 0")
        if not 0 < self.c < 1:
            raise ValueError("c must lie in (0, 1)")
        for lo, hi in (self.p_range, self.w_range):
            if not (isinstance(lo, int) and isinstance(hi, int) and 1 <= lo <= hi):
                raise ValueError("ranges must be integer pairs with 1 <= lo <= hi")

    @property
    def edge_target(self) -> int:
        return int(self.c * self.n * (self.n - 1) // 2)

    @property
    def deadline(self) -> int:
        # round half-up on the exact rational
        exact = 100 * self.delta * self.n / Fraction(self.m)
        return int((exact + Fraction(1, 2)).__floor__())


def generate_instance(gp: GenParams) -> Instance:
    """Draw one instance; identical parameters and seed give identical output."""
    rng = random.Random(gp.seed)
    p = tuple(rng.randrange(gp.p_range[0], gp.p_range[1] + 1) for _ in range(gp.n))
    w = tuple(Fraction(rng.randrange(gp.w_range[0], gp.w_range[1] + 1)) for _ in range(gp.n))
    pairs = [(j, g) for j in range(1, gp.n + 1) for g in range(j + 1, gp.n + 1)]
    # partial Fisher-Yates: the first edge_target slots become the sample
    for i in range(gp.edge_target):
        k = i + rng.randrange(len(pairs) - i)
        pairs[i], pairs[k] = pairs[k], pairs[i]
    conflicts = tuple(sorted(pairs[: gp.edge_target]))
    return Instance(n=gp.n, m=gp.m, deadline=gp.deadline, p=p, w=w, conflicts=conflicts)


def read_instance(path) -> Instance:
    """Parse an instance file; raises InstanceFormatError with a line number."""
    text = Path(path).read_text(encoding="ascii")
    try:
        return instance_from_text(text)
    except InstanceFormatError as exc:
        err = InstanceFormatError(f"{path}: {exc}")
        err.line = exc.line
        raise err from exc


def write_instance(inst: Instance, path) -> None:
    Path(path).write_text(instance_to_text(inst), encoding="ascii")


def write_manifest(directory, params: GenParams, entries: list[dict]) -> None:
    """Record generation parameters and the per-instance seeds/files."""
    payload = {
        "params": {
            "m": params.m,
            "n": params.n,
            "delta": str(params.delta),
            "c": str(params.c),
            "seed": params.seed,
            "p_range": list(params.p_range),
            "w_range": list(params.w_range),
        },
        "instances": entries,
    }
    path = Path(directory) / MANIFEST_NAME
    path.write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n", encoding="ascii")


def read_manifest(directory) -> dict:
    path = Path(directory) / MANIFEST_NAME
    if not path.exists():
        raise FileNotFoundError(f"no {MANIFEST_NAME} in {directory}")
    return json.loads(path.read_text(encoding="ascii"))
