"""Point sets with positive importance weights on a validated finite metric.

An :class:`Instance` is the input to everything else in this package: a list
of labelled points, a strictly positive weight per point (normalized so the
largest weight is exactly 1), and a symmetric distance matrix satisfying the
triangle inequality up to a small relative tolerance.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Any, Sequence

import numpy as np

# Relative slack allowed when checking the triangle inequality.  Distances
# produced by floating-point geometry (hypot, shortest-path closures) can miss
# exact inequalities by a few ulps; anything worse than this is a real
# violation.
TRIANGLE_TOL = 1e-9

# How many witnesses per violation kind a MetricReport keeps.  Counts are
# always exact; only the witness lists are truncated.
_WITNESS_CAP = 50

GEOMETRIES = ("euclidean-plane", "random-closure")
WEIGHT_LAWS = ("equal", "uniform", "pareto")


class InstanceFormatError(ValueError):
    """An instance document is malformed (missing keys, bad shapes, ...)."""


class NonpositiveWeightError(ValueError):
    """A point weight is zero or negative."""


@dataclass(frozen=True)
class Violation:
    """One concrete failure of a metric axiom."""

    kind: str  # "nonfinite" | "asymmetry" | "diagonal" | "offdiagonal" | "triangle"
    where: tuple[int, ...]
    message: str


@dataclass(frozen=True)
class MetricReport:
    """Outcome of a metric validation pass.

    ``violations`` holds up to ``_WITNESS_CAP`` witnesses per kind;
    ``counts`` holds the exact number found per kind.  An empty report
    (``ok`` is True) certifies a valid metric.
    """

    n: int
    violations: tuple[Violation, ...]
    counts: dict[str, int]

    @property
    def ok(self) -> bool:
        return not self.violations

    def __str__(self) -> str:
        if self.ok:
            return f"metric ok ({self.n} points)"
        parts = [f"{kind}: {cnt}" for kind, cnt in sorted(self.counts.items())]
        head = ", ".join(parts)
        first = "; ".join(v.message for v in self.violations[:3])
        return f"metric invalid ({head}) e.g. {first}"


class MetricViolationError(ValueError):
    """Raised when a distance matrix fails metric validation."""

    def __init__(self, report: MetricReport):
        self.report = report
        super().__init__(str(report))


def validate_metric(dist: np.ndarray, tol: float = TRIANGLE_TOL) -> MetricReport:
    """Check symmetry, zero diagonal, positive off-diagonal, and triangles.

    The triangle inequality is checked for every ordered triple with relative
    tolerance ``tol``: ``d[i,k] > (d[i,j] + d[j,k]) * (1 + tol)`` counts as a
    violation.
    """
    d = np.asarray(dist, dtype=float)
    if d.ndim != 2 or d.shape[0] != d.shape[1]:
        raise InstanceFormatError(f"distance matrix must be square, got shape {d.shape}")
    n = d.shape[0]
    violations: list[Violation] = []
    counts: dict[str, int] = {}

    def add(kind: str, where: tuple[int, ...], message: str) -> None:
        counts[kind] = counts.get(kind, 0) + 1
        if counts[kind] <= _WITNESS_CAP:
            violations.append(Violation(kind, where, message))

    bad = ~np.isfinite(d)
    for i, j in np.argwhere(bad):
        add("nonfinite", (int(i), int(j)), f"dist[{i}][{j}] is not finite")

    if not bad.any():
        asym = np.argwhere(d != d.T)
        for i, j in asym:
            if i < j:
                add("asymmetry", (int(i), int(j)),
                    f"dist[{i}][{j}]={float(d[i, j])!r} != dist[{j}][{i}]={float(d[j, i])!r}")

        for i in np.flatnonzero(np.diagonal(d) != 0.0):
            add("diagonal", (int(i),), f"dist[{i}][{i}]={float(d[i, i])!r} must be 0")

        off = d <= 0.0
        np.fill_diagonal(off, False)
        for i, j in np.argwhere(off):
            if i < j:
                add("offdiagonal", (int(i), int(j)),
                    f"zero or negative distance {float(d[i, j])!r} between distinct points {i} and {j}")

        # d[i,k] <= (d[i,j] + d[j,k]) * (1 + tol) must hold for every j.
        limit = 1.0 + tol
        for j in range(n):
            lhs = d
            rhs = (d[:, j][:, None] + d[j, :][None, :]) * limit
            viol = lhs > rhs
            if viol.any():
                for i, k in np.argwhere(viol):
                    add("triangle", (int(i), int(j), int(k)),
                        f"dist[{i}][{k}]={float(d[i, k])!r} exceeds "
                        f"dist[{i}][{j}]+dist[{j}][{k}]={float(d[i, j] + d[j, k])!r}")

    return MetricReport(n=n, violations=tuple(violations), counts=counts)


@dataclass(frozen=True, eq=False)
class Instance:
    """Labelled points, normalized positive weights, and a valid metric.

    Construct through :func:`make_instance` / :func:`load_instance`; those
    normalize weights and validate the metric.  Arrays are frozen after
    construction.
    """

    labels: tuple[str, ...]
    weights: np.ndarray
    dist: np.ndarray
    _index: dict[str, int] = field(repr=False, default_factory=dict)

    def __post_init__(self) -> None:
        self.weights.flags.writeable = False
        self.dist.flags.writeable = False
        object.__setattr__(self, "_index", {lab: i for i, lab in enumerate(self.labels)})

    @property
    def n(self) -> int:
        return len(self.labels)

    def index(self, label: str) -> int:
        try:
            return self._index[label]
        except KeyError:
            raise ValueError(f"unknown point label {label!r}") from None

    def to_document(self) -> dict[str, Any]:
        return {
            "labels": list(self.labels),
            "weights": [float(w) for w in self.weights],
            "metric": {"type": "explicit",
                       "dist": [[float(x) for x in row] for row in self.dist]},
        }


def make_instance(labels: Sequence[str], weights: Sequence[float],
                  dist: np.ndarray, *, tol: float = TRIANGLE_TOL,
                  validate: bool = True) -> Instance:
    """Build an Instance: normalize weights (max becomes 1) and validate."""
    labels = tuple(str(x) for x in labels)
    if not labels:
        raise InstanceFormatError("instance needs at least one point")
    if len(set(labels)) != len(labels):
        raise InstanceFormatError("point labels must be unique")
    w = np.asarray(weights, dtype=float)
    if w.shape != (len(labels),):
        raise InstanceFormatError(
            f"expected {len(labels)} weights, got shape {w.shape}")
    if not np.isfinite(w).all() or (w <= 0.0).any():
        bad = int(np.argmin(w)) if np.isfinite(w).all() else int(np.flatnonzero(~np.isfinite(w))[0])
        raise NonpositiveWeightError(
            f"weights must be finite and strictly positive; weight[{bad}]={w[bad]!r}")
    w = w / w.max()

    d = np.asarray(dist, dtype=float)
    if d.shape != (len(labels), len(labels)):
        raise InstanceFormatError(
            f"expected a {len(labels)}x{len(labels)} distance matrix, got shape {d.shape}")
    if validate:
        report = validate_metric(d, tol)
        if not report.ok:
            raise MetricViolationError(report)
    return Instance(labels=labels, weights=w.copy(), dist=d.copy())


def instance_from_document(doc: Any, *, tol: float = TRIANGLE_TOL) -> Instance:
    """Build an Instance from a parsed JSON document.

    Two metric encodings are accepted: ``{"type": "explicit", "dist": [[...]]}``
    and ``{"type": "euclidean", "coords": [[x, y], ...]}`` (distances are
    computed at load time).
    """
    if not isinstance(doc, dict):
        raise InstanceFormatError("instance document must be a JSON object")
    try:
        labels = doc["labels"]
        weights = doc["weights"]
        metric = doc["metric"]
    except (KeyError, TypeError) as e:
        raise InstanceFormatError(f"instance document missing key: {e}") from None
    if not isinstance(labels, list) or not isinstance(weights, list):
        raise InstanceFormatError("'labels' and 'weights' must be arrays")
    if not isinstance(metric, dict) or "type" not in metric:
        raise InstanceFormatError("'metric' must be an object with a 'type'")

    kind = metric["type"]
    if kind == "explicit":
        if "dist" not in metric:
            raise InstanceFormatError("explicit metric needs a 'dist' matrix")
        dist = np.asarray(metric["dist"], dtype=float)
    elif kind == "euclidean":
        if "coords" not in metric:
            raise InstanceFormatError("euclidean metric needs a 'coords' array")
        coords = np.asarray(metric["coords"], dtype=float)
        if coords.ndim != 2 or coords.shape[0] != len(labels):
            raise InstanceFormatError(
                f"expected {len(labels)} coordinate pairs, got shape {coords.shape}")
        dist = _euclidean_matrix(coords)
    else:
        raise InstanceFormatError(f"unknown metric type {kind!r}")
    return make_instance(labels, weights, dist, tol=tol)


def load_instance(text: str, *, tol: float = TRIANGLE_TOL) -> Instance:
    """Parse an instance JSON document from a string."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as e:
        raise InstanceFormatError(f"invalid JSON: {e}") from None
    return instance_from_document(doc, tol=tol)


def serialize_instance(inst: Instance) -> str:
    """Serialize to JSON such that load/serialize round-trips exactly."""
    return json.dumps(inst.to_document(), indent=2, sort_keys=True)


def _euclidean_matrix(coords: np.ndarray) -> np.ndarray:
    diff = coords[:, None, :] - coords[None, :, :]
    return np.sqrt((diff * diff).sum(axis=-1))


def _shortest_path_closure(cost: np.ndarray) -> np.ndarray:
    """All-pairs shortest paths of a nonnegative cost matrix (Floyd-Warshall)."""
    d = cost.copy()
    for k in range(d.shape[0]):
        np.minimum(d, d[:, k][:, None] + d[k, :][None, :], out=d)
    return d


@dataclass(frozen=True)
class RandomSpec:
    """Shape of a random instance: size, weight distribution, geometry."""

    n: int
    weight_law: str = "uniform"
    geometry: str = "euclidean-plane"

    def __post_init__(self) -> None:
        if self.n < 3:
            raise ValueError(f"generated instances need n >= 3, got {self.n}")
        if self.weight_law not in WEIGHT_LAWS:
            raise ValueError(f"unknown weight law {self.weight_law!r}; pick one of {WEIGHT_LAWS}")
        if self.geometry not in GEOMETRIES:
            raise ValueError(f"unknown geometry {self.geometry!r}; pick one of {GEOMETRIES}")


def generate_random(spec: RandomSpec, seed: int) -> Instance:
    """Generate a random valid instance, deterministically from ``seed``.

    Geometries: ``euclidean-plane`` draws points in the unit square;
    ``random-closure`` draws symmetric positive costs and takes their
    shortest-path closure, which makes them a metric.
    """
    rng = np.random.default_rng(seed)
    n = spec.n
    if spec.geometry == "euclidean-plane":
        coords = rng.uniform(0.0, 1.0, size=(n, 2))
        dist = _euclidean_matrix(coords)
    else:
        raw = rng.uniform(0.1, 2.0, size=(n, n))
        upper = np.triu(raw, 1)
        dist = _shortest_path_closure(upper + upper.T)

    if spec.weight_law == "equal":
        weights = np.ones(n)
    elif spec.weight_law == "uniform":
        weights = rng.uniform(1e-3, 1.0, size=n)
    else:  # pareto: heavy-tailed, spreads points over many weight octaves
        weights = rng.pareto(1.5, size=n) + 1.0

    labels = [f"p{i}" for i in range(n)]
    return make_instance(labels, weights, dist)
