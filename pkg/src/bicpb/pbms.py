"""Bicomplex partial b-metric spaces.

Finite spaces carry an explicit distance table and are checked
exhaustively over every pair and triple.  Distances on infinite carriers are
wrapped in :class:`MetricFn` and checked by seeded sampling; such reports are
labelled ``"sampled"`` and never claim completeness.

Three families of axioms are supported, selected by ``kind``:

``"partial-b"``
    small self-distances, symmetry, equality, and
    ``d(x,y) <= s[d(x,z) + d(z,y)] - d(z,z)``.
``"generalized"``
    the same first three axioms with
    ``d(x,y) <= s[d(x,z) + d(z,y) - d(z,z)] + (1-s)/2 (d(x,x) + d(y,y))``.
``"b-metric"``
    zero self-distance and nonnegativity, symmetry, ``d(x,y) = 0 => x = y``,
    and ``d(x,y) <= s[d(x,z) + d(z,y)]``.

Every inequality goes through :func:`bicpb.bicomplex.compare`.
"""

from __future__ import annotations

import itertools
import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Callable, Hashable, Iterable, Mapping, Sequence

import numpy as np

from .bicomplex import DEFAULT_TOL, ZERO, Bicomplex, OrderRelation, compare, power
from .errors import AxiomViolation, MalformedTable, NonPositiveCone

AXIOMS = ("small-self-distance", "symmetry", "equality", "triangularity")
KINDS = ("partial-b", "generalized", "b-metric")

Point = Hashable


@dataclass(frozen=True)
class MetricFn:
    """A bicomplex distance on an arbitrary carrier with a declared coefficient."""

    evaluate: Callable[[Any, Any], Bicomplex]
    s: float = 1.0
    name: str = "metric"

    def __call__(self, x: Any, y: Any) -> Bicomplex:
        return self.evaluate(x, y)


@dataclass(frozen=True)
class FiniteSpace:
    """Finite point set with a bicomplex distance table.

    ``order[i][j]`` is true when point ``i`` precedes point ``j``.  Each entry of
    ``maps`` is a total self-map stored as a tuple of point indices.
    """

    points: tuple[str, ...]
    table: tuple[tuple[Bicomplex, ...], ...]
    order: tuple[tuple[bool, ...], ...] | None = None
    maps: Mapping[str, tuple[int, ...]] = field(default_factory=dict)
    meta: Mapping[str, Any] = field(default_factory=dict)

    def __post_init__(self) -> None:
        n = len(self.points)
        if n == 0:
            raise MalformedTable("a space needs at least one point")
        if len(set(self.points)) != n:
            raise MalformedTable("point labels must be distinct")
        if len(self.table) != n or any(len(row) != n for row in self.table):
            raise MalformedTable(f"distance table must be {n}x{n}")
        for i in range(n):
            for j in range(i + 1, n):
                a, b = self.table[i][j], self.table[j][i]
                if (a - b).norm() > DEFAULT_TOL * (1.0 + max(a.norm(), b.norm())):
                    raise MalformedTable(
                        f"table is not symmetric at ({self.points[i]}, {self.points[j]}): {a} != {b}"
                    )
        if self.order is not None and (len(self.order) != n or any(len(r) != n for r in self.order)):
            raise MalformedTable(f"order matrix must be {n}x{n}")
        for name, m in self.maps.items():
            if len(m) != n or any(not (0 <= k < n) for k in m):
                raise MalformedTable(f"map {name!r} is not a total function on the points")

    @property
    def n(self) -> int:
        return len(self.points)

    def index(self, label: Any) -> int:
        try:
            return self.points.index(str(label))
        except ValueError:
            raise KeyError(f"unknown point {label!r}") from None

    def delta(self, i: int, j: int) -> Bicomplex:
        return self.table[i][j]

    @property
    def metric(self) -> MetricFn:
        """The table as a distance on point labels."""
        return MetricFn(lambda x, y: self.table[self.index(x)][self.index(y)], name="table")

    def map_fn(self, name: str) -> Callable[[str], str]:
        m = self.maps[name]
        return lambda label: self.points[m[self.index(label)]]

    def precedes(self, i: int, j: int) -> bool:
        if self.order is None:
            raise KeyError("space has no order")
        return self.order[i][j]

    # -- serialization ----------------------------------------------------

    @classmethod
    def from_dict(cls, data: Mapping[str, Any]) -> FiniteSpace:
        try:
            points = tuple(str(p) for p in data["points"])
            table = tuple(tuple(Bicomplex.from_json(v) for v in row) for row in data["delta"])
        except (KeyError, TypeError, ValueError) as exc:
            raise MalformedTable(f"bad finite-space data: {exc}") from exc
        order = data.get("order")
        if order is not None:
            order = tuple(tuple(bool(x) for x in row) for row in order)
        maps = {}
        for name, images in (data.get("maps") or {}).items():
            try:
                maps[name] = tuple(points.index(str(lbl)) for lbl in images)
            except ValueError as exc:
                raise MalformedTable(f"map {name!r} names an unknown point") from exc
        return cls(points, table, order, maps, dict(data.get("meta") or {}))

    def to_dict(self) -> dict[str, Any]:
        out: dict[str, Any] = {
            "points": list(self.points),
            "delta": [[v.to_json() for v in row] for row in self.table],
        }
        if self.order is not None:
            out["order"] = [list(r) for r in self.order]
        if self.maps:
            out["maps"] = {k: [self.points[i] for i in m] for k, m in self.maps.items()}
        if self.meta:
            out["meta"] = dict(self.meta)
        return out

    @classmethod
    def load(cls, path: str | Path) -> FiniteSpace:
        return cls.from_dict(json.loads(Path(path).read_text(encoding="utf-8")))

    @classmethod
    def tabulate(
        cls,
        metric: Callable[[Any, Any], Bicomplex],
        points: Sequence[Any],
        labels: Sequence[str] | None = None,
        **kwargs: Any,
    ) -> FiniteSpace:
        """Evaluate ``metric`` on every pair of ``points``."""
        labels = tuple(labels) if labels is not None else tuple(str(p) for p in points)
        table = tuple(tuple(metric(x, y) for y in points) for x in points)
        return cls(labels, table, **kwargs)

    def restrict(self, labels: Iterable[Any]) -> FiniteSpace:
        idx = [self.index(lbl) for lbl in labels]
        table = tuple(tuple(self.table[i][j] for j in idx) for i in idx)
        order = None
        if self.order is not None:
            order = tuple(tuple(self.order[i][j] for j in idx) for i in idx)
        return FiniteSpace(tuple(self.points[i] for i in idx), table, order)

    def with_table(self, table: Sequence[Sequence[Bicomplex]]) -> FiniteSpace:
        return FiniteSpace(self.points, tuple(tuple(r) for r in table), self.order, self.maps, self.meta)


# -- reports ------------------------------------------------------------------


@dataclass(frozen=True)
class Violation:
    """One witnessed failure: ``lhs`` was required to precede ``rhs``."""

    axiom: str
    points: tuple[Any, ...]
    lhs: Bicomplex
    rhs: Bicomplex
    relation: OrderRelation
    ratio: float | None = None

    def to_dict(self, labels: Sequence[str] | None = None) -> dict[str, Any]:
        pts = [labels[p] for p in self.points] if labels is not None else [_jsonable(p) for p in self.points]
        return {
            "axiom": self.axiom,
            "points": pts,
            "lhs": self.lhs.to_json(),
            "rhs": self.rhs.to_json(),
            "relation": self.relation.value,
            "ratio": self.ratio,
        }

    @classmethod
    def from_dict(cls, data: Mapping[str, Any], labels: Sequence[str] | None = None) -> Violation:
        pts = tuple(labels.index(p) for p in data["points"]) if labels is not None else tuple(data["points"])
        return cls(
            data["axiom"],
            pts,
            Bicomplex.from_json(data["lhs"]),
            Bicomplex.from_json(data["rhs"]),
            OrderRelation(data["relation"]),
            data.get("ratio"),
        )


def _jsonable(p: Any) -> Any:
    if isinstance(p, (np.floating, np.integer)):
        return p.item()
    if isinstance(p, (int, float, str)):
        return p
    return repr(p)


@dataclass
class AxiomReport:
    kind: str
    s: float
    mode: str
    status: dict[str, bool]
    counterexamples: list[Violation]
    minimal_s: float | None = None
    nonzero_self_distances: list[Any] = field(default_factory=list)
    labels: tuple[str, ...] | None = None
    checked: int = 0

    @property
    def holds(self) -> bool:
        return all(self.status.values())

    def violations(self, axiom: str) -> list[Violation]:
        return [v for v in self.counterexamples if v.axiom == axiom]

    def to_dict(self) -> dict[str, Any]:
        ms = self.minimal_s
        if ms is not None and math.isinf(ms):
            ms = "infeasible"
        nz = self.nonzero_self_distances
        if self.labels is not None:
            nz = [self.labels[i] for i in nz]
        return {
            "kind": self.kind,
            "s": self.s,
            "mode": self.mode,
            "holds": self.holds,
            "status": {a: ("holds" if self.status[a] else "violated") for a in AXIOMS},
            "counterexamples": [v.to_dict(self.labels) for v in self.counterexamples],
            "minimal_s": ms,
            "nonzero_self_distances": [_jsonable(p) for p in nz],
            "points": list(self.labels) if self.labels is not None else None,
            "checked": self.checked,
        }

    @classmethod
    def from_dict(cls, data: Mapping[str, Any]) -> AxiomReport:
        labels = tuple(data["points"]) if data.get("points") is not None else None
        ms = data.get("minimal_s")
        if ms == "infeasible":
            ms = math.inf
        nz = list(data.get("nonzero_self_distances", []))
        if labels is not None:
            nz = [labels.index(p) for p in nz]
        return cls(
            kind=data["kind"],
            s=data["s"],
            mode=data["mode"],
            status={a: data["status"][a] == "holds" for a in AXIOMS},
            counterexamples=[Violation.from_dict(v, labels) for v in data["counterexamples"]],
            minimal_s=ms,
            nonzero_self_distances=nz,
            labels=labels,
            checked=data.get("checked", 0),
        )


# -- axiom evaluation -----------------------------------------------------------


def _ratio(lhs: Bicomplex, rhs: Bicomplex, tol: float) -> float | None:
    """Largest coordinate-wise ``lhs/rhs`` over coordinates where ``rhs`` is positive."""
    eps = tol * (1.0 + max(lhs.norm(), rhs.norm()))
    ratios = [a / b for a, b in zip(lhs.coefficients(), rhs.coefficients()) if b > eps]
    return max(ratios) if ratios else None


def triangle_rhs(kind: str, s: float, dxz: Bicomplex, dzy: Bicomplex, dzz: Bicomplex,
                 dxx: Bicomplex, dyy: Bicomplex) -> Bicomplex:
    """Right-hand side of the triangularity axiom for the given ``kind``."""
    if kind == "partial-b":
        return (dxz + dzy).scale(s) - dzz
    if kind == "generalized":
        return (dxz + dzy - dzz).scale(s) + (dxx + dyy).scale((1.0 - s) / 2.0)
    if kind == "b-metric":
        return (dxz + dzy).scale(s)
    raise ValueError(f"unknown axiom family {kind!r}")


class _Checker:
    def __init__(self, kind: str, s: float, tol: float):
        if kind not in KINDS:
            raise ValueError(f"kind must be one of {KINDS}, got {kind!r}")
        if not s >= 1.0:
            raise ValueError(f"coefficient s must be >= 1, got {s}")
        self.kind, self.s, self.tol = kind, float(s), tol
        self.violations: list[Violation] = []
        self.checked = 0

    def _require_le(self, axiom: str, pts: tuple, lhs: Bicomplex, rhs: Bicomplex, ratio: bool = False) -> None:
        self.checked += 1
        rel = compare(lhs, rhs, self.tol)
        if not rel.is_le:
            self.violations.append(
                Violation(axiom, pts, lhs, rhs, rel, _ratio(lhs, rhs, self.tol) if ratio else None)
            )

    def pair(self, x, y, dxx: Bicomplex, dyy: Bicomplex, dxy: Bicomplex, dyx: Bicomplex, same: bool) -> None:
        tol = self.tol
        self.checked += 1
        rel = compare(dxy, dyx, tol)
        if rel is not OrderRelation.EQUAL:
            self.violations.append(Violation("symmetry", (x, y), dxy, dyx, rel))
        if self.kind == "b-metric":
            if same:
                self._require_le("small-self-distance", (x, x), dxx, ZERO)
                self._require_le("small-self-distance", (x, x), ZERO, dxx)
            else:
                self._require_le("small-self-distance", (x, y), ZERO, dxy)
                self.checked += 1
                if compare(dxy, ZERO, tol) is OrderRelation.EQUAL:
                    self.violations.append(Violation("equality", (x, y), dxy, ZERO, OrderRelation.EQUAL))
            return
        if same:
            self._require_le("small-self-distance", (x, x), ZERO, dxx)
            return
        self._require_le("small-self-distance", (x, y), dxx, dxy)
        self.checked += 1
        if (compare(dxx, dxy, tol) is OrderRelation.EQUAL
                and compare(dxy, dyy, tol) is OrderRelation.EQUAL):
            self.violations.append(Violation("equality", (x, y), dxy, dxx, OrderRelation.EQUAL))

    def triple(self, x, y, z, dxy, dxz, dzy, dzz, dxx, dyy) -> None:
        rhs = triangle_rhs(self.kind, self.s, dxz, dzy, dzz, dxx, dyy)
        self._require_le("triangularity", (x, y, z), dxy, rhs, ratio=True)

    def report(self, mode: str, labels=None, nonzero_self=()) -> AxiomReport:
        status = {a: True for a in AXIOMS}
        for v in self.violations:
            status[v.axiom] = False
        ordered = sorted(self.violations, key=lambda v: (AXIOMS.index(v.axiom), _sort_key(v.points)))
        return AxiomReport(self.kind, self.s, mode, status, ordered,
                           nonzero_self_distances=list(nonzero_self), labels=labels, checked=self.checked)


def _sort_key(points: tuple) -> tuple:
    return tuple((0, p) if isinstance(p, (int, float)) and not isinstance(p, bool) else (1, repr(p)) for p in points)


def check_axioms(space: FiniteSpace, s: float = 1.0, *, kind: str = "partial-b",
                 tol: float = DEFAULT_TOL, with_minimal_s: bool = False) -> AxiomReport:
    """Exhaustively check every pair and triple of ``space``.

    All violations are collected; the report is sorted by axiom and then by
    point indices so its content does not depend on enumeration order.
    """
    checker = _Checker(kind, s, tol)
    n, t = space.n, space.table
    for i in range(n):
        for j in range(n):
            checker.pair(i, j, t[i][i], t[j][j], t[i][j], t[j][i], i == j)
    for i, j, k in itertools.product(range(n), repeat=3):
        checker.triple(i, j, k, t[i][j], t[i][k], t[k][j], t[k][k], t[i][i], t[j][j])
    nonzero = [i for i in range(n) if compare(t[i][i], ZERO, tol) is not OrderRelation.EQUAL]
    report = checker.report("exhaustive", space.points, nonzero)
    if with_minimal_s:
        report.minimal_s = _minimal_s(space, kind, tol)
    return report


def check_generalized_axioms(space: FiniteSpace, s: float = 1.0, **kwargs: Any) -> AxiomReport:
    return check_axioms(space, s, kind="generalized", **kwargs)


def check_b_metric_axioms(space: FiniteSpace, s: float = 1.0, **kwargs: Any) -> AxiomReport:
    return check_axioms(space, s, kind="b-metric", **kwargs)


def check_axioms_sampled(
    metric: Callable[[Any, Any], Bicomplex],
    sampler: Callable[[np.random.Generator], Any],
    s: float | None = None,
    *,
    kind: str = "partial-b",
    n_samples: int = 10_000,
    seed: int = 42,
    tol: float = DEFAULT_TOL,
) -> AxiomReport:
    """Check the axioms on ``n_samples`` random triples drawn by ``sampler``.

    The pair axioms are checked on the first two points of each triple, and
    additionally with both points equal so self-distance conditions are covered.
    """
    if s is None:
        s = getattr(metric, "s", 1.0)
    rng = np.random.default_rng(seed)
    checker = _Checker(kind, s, tol)
    nonzero: list[Any] = []
    for _ in range(n_samples):
        x, y, z = sampler(rng), sampler(rng), sampler(rng)
        dxx, dyy, dzz = metric(x, x), metric(y, y), metric(z, z)
        dxy, dyx = metric(x, y), metric(y, x)
        checker.pair(x, x, dxx, dxx, dxx, dxx, True)
        checker.pair(x, y, dxx, dyy, dxy, dyx, _same_point(x, y))
        checker.triple(x, y, z, dxy, metric(x, z), metric(z, y), dzz, dxx, dyy)
        if len(nonzero) < 10 and compare(dxx, ZERO, tol) is not OrderRelation.EQUAL:
            nonzero.append(x)
    return checker.report("sampled", None, nonzero)


def _same_point(x: Any, y: Any) -> bool:
    return bool(np.all(np.asarray(x) == np.asarray(y)))


def replay(space: FiniteSpace, violation: Violation, s: float, kind: str = "partial-b",
           tol: float = DEFAULT_TOL) -> bool:
    """Re-evaluate one counterexample from scratch; true if it is still a violation."""
    t = space.table
    if violation.axiom == "triangularity":
        i, j, k = violation.points
        rhs = triangle_rhs(kind, s, t[i][k], t[k][j], t[k][k], t[i][i], t[j][j])
        return not compare(t[i][j], rhs, tol).is_le
    i, j = violation.points
    if violation.axiom == "symmetry":
        return compare(t[i][j], t[j][i], tol) is not OrderRelation.EQUAL
    if violation.axiom == "equality":
        if kind == "b-metric":
            return i != j and compare(t[i][j], ZERO, tol) is OrderRelation.EQUAL
        return i != j and all(compare(a, b, tol) is OrderRelation.EQUAL
                              for a, b in ((t[i][i], t[i][j]), (t[i][j], t[j][j])))
    if kind == "b-metric":
        if i == j:
            return compare(t[i][i], ZERO, tol) is not OrderRelation.EQUAL
        return not compare(ZERO, t[i][j], tol).is_le
    if i == j:
        return not compare(ZERO, t[i][i], tol).is_le
    return not compare(t[i][i], t[i][j], tol).is_le


# -- minimal coefficient ----------------------------------------------------------


def minimal_coefficient(space: FiniteSpace, *, kind: str = "partial-b", tol: float = DEFAULT_TOL) -> float:
    """Smallest ``s >= 1`` for which triangularity holds on every triple.

    Each triple and real coordinate contributes a constraint ``s * D >= N``; the
    answer is the largest ratio ``N / D`` clamped below at 1.  Returns
    ``math.inf`` when some coordinate has ``D <= 0`` while ``N > 0``.

    Raises :class:`AxiomViolation` when axioms (i)-(iii) fail, since the
    coefficient is meaningless for such tables.
    """
    pre = check_axioms(space, 1.0, kind=kind, tol=tol)
    broken = [a for a in AXIOMS[:3] if not pre.status[a]]
    if broken:
        raise AxiomViolation(f"axioms {broken} fail; minimal coefficient undefined", pre)
    return _minimal_s(space, kind, tol)


def _minimal_s(space: FiniteSpace, kind: str, tol: float) -> float:
    t = np.array([[v.coefficients() for v in row] for row in space.table])  # (n, n, 4)
    n = space.n
    diag = t[np.arange(n), np.arange(n)]  # (n, 4)
    # index order: x, y, z
    dxy = t[:, :, None, :]
    dxz = t[:, None, :, :]
    dzy = t.transpose(1, 0, 2)[None, :, :, :]
    dzz = diag[None, None, :, :]
    dxx = diag[:, None, None, :]
    dyy = diag[None, :, None, :]
    if kind == "partial-b":
        num = dxy + dzz
        den = dxz + dzy
    elif kind == "generalized":
        half = (dxx + dyy) / 2.0
        num = dxy - half
        den = dxz + dzy - dzz - half
    elif kind == "b-metric":
        num = np.broadcast_to(dxy, (n, n, n, 4))
        den = dxz + dzy
    else:
        raise ValueError(f"unknown axiom family {kind!r}")
    num, den = np.broadcast_arrays(num, den)
    scale = 1.0 + np.abs(t).max()
    eps = tol * scale
    lower, upper = 1.0, math.inf
    pos = den > eps
    if np.any(pos):
        lower = max(lower, float(np.max(num[pos] / den[pos])))
    flat = (np.abs(den) <= eps) & (num > eps)
    if np.any(flat):
        return math.inf
    neg = den < -eps
    if np.any(neg):
        upper = float(np.min(num[neg] / den[neg]))
    if lower > upper * (1.0 + 1e-12):
        return math.inf
    return lower


# -- constructions ------------------------------------------------------------------


def sum_construction(p: MetricFn, d: MetricFn, s: float | None = None) -> MetricFn:
    """Pointwise sum of a partial metric and a b-metric; coefficient is the b-metric's."""
    coeff = d.s if s is None else s
    return MetricFn(lambda x, y: p(x, y) + d(x, y), coeff, f"({p.name}+{d.name})")


def power_construction(p: MetricFn, r: float, *, tol: float = DEFAULT_TOL) -> MetricFn:
    """``p(x, y) ** r`` with coefficient ``2 ** (r - 1)``."""
    if not r >= 1.0:
        raise ValueError(f"exponent must be >= 1, got {r}")

    def evaluate(x: Any, y: Any) -> Bicomplex:
        v = p(x, y)
        if not compare(ZERO, v, tol).is_le:
            raise NonPositiveCone(f"{p.name}({x!r}, {y!r}) = {v} is outside the nonnegative cone")
        return power(v, r)

    return MetricFn(evaluate, 2.0 ** (r - 1.0), f"{p.name}^{r:g}")


def induced_b_metric(delta: MetricFn) -> MetricFn:
    """``2 d(x, y) - d(x, x) - d(y, y)``; validity is left to the b-metric checker."""
    def evaluate(x: Any, y: Any) -> Bicomplex:
        return delta(x, y).scale(2.0) - delta(x, x) - delta(y, y)

    return MetricFn(evaluate, delta.s, f"induced({delta.name})")


def induced_table(space: FiniteSpace) -> FiniteSpace:
    t = space.table
    n = space.n
    return space.with_table(
        [[t[i][j].scale(2.0) - t[i][i] - t[j][j] for j in range(n)] for i in range(n)]
    )


def ball_contains(delta: Callable[[Any, Any], Bicomplex], center: Any, radius: Bicomplex | float,
                  candidate: Any, *, tol: float = DEFAULT_TOL) -> bool:
    """Membership in the open ball ``{y : d(c, y) < radius + d(c, c)}`` (strict case D).

    A real ``radius`` r is read as ``r + r*i2`` so that it lies strictly inside
    the cone.
    """
    if isinstance(radius, (int, float)):
        radius = Bicomplex(float(radius), 0.0, float(radius), 0.0)
    if not compare(ZERO, radius, tol).is_strictly_less:
        raise ValueError(f"radius {radius} must be strictly positive")
    return compare(delta(center, candidate), radius + delta(center, center), tol).is_strictly_less
