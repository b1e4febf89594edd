"""Periodic visit schedules and absence-based costs.

A :class:`Schedule` is one period of a cyclic walk, given as the sequence of
points visited; travel time between consecutive visits is the metric distance
and the walk wraps around from the last visit to the first.  The cost of a
schedule at a point is a function of that point's *absence lengths*: the
travel times between its consecutive visits within one period (cyclically).

Two costs matter most:

* ``p = inf`` — the longest absence (worst-case time away), and
* ``p = 2``  — sum(l^2) / sum(l), which is twice the mean time until the next
  visit seen from a uniformly random moment in the period.

Generic finite ``p >= 2`` is supported as ``sum(l^p) / sum(l^(p-1))``.
A point that never appears in the schedule has unbounded cost, reported as the
explicit value :data:`UNBOUNDED` (``math.inf``), never as an error.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Any, Iterable, Sequence

from .instance import Instance

UNBOUNDED = math.inf


def _collapse(seq: tuple[int, ...]) -> tuple[int, ...]:
    """Drop immediate repeats, including across the cyclic wrap-around."""
    out: list[int] = []
    for v in seq:
        if not out or out[-1] != v:
            out.append(v)
    while len(out) > 1 and out[0] == out[-1]:
        out.pop()
    return tuple(out)


@dataclass(frozen=True)
class Schedule:
    """One period of a cyclic visit sequence (point indices).

    Immediate repeats are collapsed on construction, cyclically, so two
    consecutive visits are always distinct unless the schedule is a single
    visit.
    """

    visits: tuple[int, ...]

    def __post_init__(self) -> None:
        visits = tuple(int(v) for v in self.visits)
        if not visits:
            raise ValueError("a schedule must contain at least one visit")
        object.__setattr__(self, "visits", _collapse(visits))

    def __len__(self) -> int:
        return len(self.visits)


def _check_points(visits: Iterable[int], inst: Instance) -> None:
    for v in visits:
        if not 0 <= v < inst.n:
            raise ValueError(f"schedule refers to unknown point index {v}")


def period_length(s: Schedule, inst: Instance) -> float:
    """Total travel time of one period, including the wrap-around hop."""
    _check_points(s.visits, inst)
    v = s.visits
    if len(v) == 1:
        return 0.0
    d = inst.dist
    total = d[v[-1], v[0]]
    for a, b in zip(v, v[1:]):
        total += d[a, b]
    return float(total)


def _profiles(visits: Sequence[int], dist: Any, n: int) -> tuple[list[list[float] | None], float]:
    """Absence profile for every point in one pass.

    Returns (profiles, period): ``profiles[x]`` is the list of cyclic gaps
    between consecutive visits of ``x`` (None if ``x`` never appears), in
    order of occurrence starting from x's first visit.
    """
    m = len(visits)
    if m == 1:
        profiles: list[list[float] | None] = [None] * n
        profiles[visits[0]] = [0.0]
        return profiles, 0.0
    # cum[i] = travel time from visits[0] to visits[i] along the schedule
    cum = [0.0] * m
    acc = 0.0
    for i in range(1, m):
        acc += dist[visits[i - 1]][visits[i]]
        cum[i] = acc
    period = acc + dist[visits[-1]][visits[0]]

    first: dict[int, float] = {}
    last: dict[int, float] = {}
    gaps: dict[int, list[float]] = {}
    for i, x in enumerate(visits):
        t = cum[i]
        if x in last:
            gaps[x].append(t - last[x])
        else:
            first[x] = t
            gaps[x] = []
        last[x] = t
    out: list[list[float] | None] = [None] * n
    for x, g in gaps.items():
        g.append(period - last[x] + first[x])  # wrap-around gap
        out[x] = g
    return out, period


def absence_profile(s: Schedule, x: int, inst: Instance) -> list[float] | None:
    """Cyclic absence lengths of point ``x``, or None if ``x`` is unvisited.

    The profile always sums to the period length.
    """
    _check_points(s.visits, inst)
    if not 0 <= x < inst.n:
        raise ValueError(f"unknown point index {x}")
    profiles, _ = _profiles(s.visits, inst.dist.tolist(), inst.n)
    return profiles[x]


def _validate_p(p: float) -> float:
    p = float(p)
    if math.isnan(p) or p < 2.0:
        raise ValueError(f"cost order p must be >= 2 or inf, got {p!r}")
    return p


def _cost_of_gaps(gaps: list[float] | None, p: float) -> float:
    if gaps is None:
        return UNBOUNDED
    if math.isinf(p):
        return max(gaps)
    if p == 2.0:
        num = 0.0
        den = 0.0
        for g in gaps:
            num += g * g
            den += g
    else:
        num = sum(g ** p for g in gaps)
        den = sum(g ** (p - 1.0) for g in gaps)
    if den == 0.0:
        return 0.0  # only when every gap is 0 (single-visit schedule)
    return num / den


def point_cost(s: Schedule, x: int, inst: Instance, p: float) -> float:
    """Absence cost of point ``x``: max gap for p=inf, sum(l^p)/sum(l^(p-1)) else.

    Returns :data:`UNBOUNDED` when ``x`` is not visited.
    """
    p = _validate_p(p)
    return _cost_of_gaps(absence_profile(s, x, inst), p)


def weighted_objective(s: Schedule, inst: Instance, p: float) -> float:
    """max over points x of weight(x) * point_cost(x).

    :data:`UNBOUNDED` as soon as any point is unvisited.
    """
    p = _validate_p(p)
    _check_points(s.visits, inst)
    profiles, _ = _profiles(s.visits, inst.dist.tolist(), inst.n)
    weights = inst.weights
    best = 0.0
    for x in range(inst.n):
        gaps = profiles[x]
        if gaps is None:
            return UNBOUNDED
        c = _cost_of_gaps(gaps, p)
        wc = weights[x] * c
        if wc > best:
            best = wc
    return float(best)


def schedule_from_document(doc: Any, inst: Instance) -> Schedule:
    """Build a Schedule from a ``{"visits": [label, ...]}`` document."""
    if not isinstance(doc, dict) or "visits" not in doc:
        raise ValueError("schedule document must be an object with a 'visits' array")
    visits = doc["visits"]
    if not isinstance(visits, list) or not visits:
        raise ValueError("'visits' must be a non-empty array of point labels")
    return Schedule(tuple(inst.index(str(lab)) for lab in visits))


def schedule_to_document(s: Schedule, inst: Instance) -> dict[str, Any]:
    _check_points(s.visits, inst)
    return {"visits": [inst.labels[v] for v in s.visits]}
