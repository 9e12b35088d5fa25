"""Common fixed points of two maps by alternating Picard iteration.

The iteration is ``x[2k+1] = U x[2k]`` and ``x[2k+2] = V x[2k+1]``.  Under the
rational contraction

    d(Ux, Vy) <= cv * d(x, Ux) d(y, Vy) / d(x, y) + cw * d(x, y)

with ``cv + cw < 1`` each step shrinks by ``h = cw / (1 - cv)``, which gives
the geometric envelope and tail bound monitored here.  On finite spaces the
hypotheses can be checked exhaustively before iterating.
"""

from __future__ import annotations

import enum
import logging
import math
from dataclasses import dataclass, field
from typing import Any, Callable, Sequence

import numpy as np

from .bicomplex import DEFAULT_TOL, ZERO, Bicomplex, OrderRelation, compare
from .errors import Diverged, InvalidParams, MissingOrder, NonFiniteIterate, NotFixed
from .pbms import FiniteSpace, MetricFn

logger = logging.getLogger(__name__)

SQRT2 = math.sqrt(2.0)


@dataclass(frozen=True)
class ContractionParams:
    curlyvee: float
    curlywedge: float
    s: float = 1.0

    def __post_init__(self) -> None:
        cv, cw, s = self.curlyvee, self.curlywedge, self.s
        if not all(math.isfinite(v) for v in (cv, cw, s)):
            raise InvalidParams("contraction parameters must be finite")
        if cv < 0 or cw < 0:
            raise InvalidParams(f"coefficients must be nonnegative (curlyvee={cv}, curlywedge={cw})")
        if cv + cw >= 1:
            raise InvalidParams(f"curlyvee + curlywedge must be < 1, got {cv + cw}")
        if s < 1:
            raise InvalidParams(f"s must be >= 1, got {s}")

    @property
    def h(self) -> float:
        return self.curlywedge / (1.0 - self.curlyvee)

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> ContractionParams:
        try:
            return cls(float(data["curlyvee"]), float(data["curlywedge"]), float(data.get("s", 1.0)))
        except (KeyError, TypeError, ValueError) as exc:
            if isinstance(exc, InvalidParams):
                raise
            raise InvalidParams(f"bad contraction parameters: {exc}") from exc

    def to_dict(self) -> dict[str, float]:
        return {"curlyvee": self.curlyvee, "curlywedge": self.curlywedge, "s": self.s, "h": self.h}


def cauchy_tail_bound(m: int, params: ContractionParams, d01: float) -> float:
    """Upper bound ``(s h)**m / (1 - s h) * d01`` on the distance between later iterates.

    Returns ``math.inf`` (and logs a warning) when ``s * h >= 1``.
    """
    if d01 == 0:
        return 0.0
    sh = params.s * params.h
    if sh >= 1.0:
        logger.warning("tail bound unavailable: s*h = %.6g >= 1", sh)
        return math.inf
    return sh ** m / (1.0 - sh) * d01


# -- hypothesis checks on finite spaces ----------------------------------------------


def _resolve_map(space: FiniteSpace, m: str | Sequence[int]) -> tuple[int, ...]:
    if isinstance(m, str):
        try:
            return space.maps[m]
        except KeyError:
            raise KeyError(f"space has no map named {m!r}") from None
    m = tuple(int(k) for k in m)
    if len(m) != space.n or any(not 0 <= k < space.n for k in m):
        raise ValueError("map table is not a total function on the points")
    return m


@dataclass(frozen=True)
class PairCheck:
    sigma: int
    theta: int
    lhs: Bicomplex
    rhs: Bicomplex | float
    relation: OrderRelation | None
    method: str  # "zero-distance", "exact", or "norm-checked"
    ok: bool


@dataclass
class ContractionReport:
    checks: list[PairCheck]
    labels: tuple[str, ...]
    params: ContractionParams | None = None

    @property
    def violations(self) -> list[PairCheck]:
        return [c for c in self.checks if not c.ok and c.relation is not OrderRelation.INCOMPARABLE]

    @property
    def indeterminate(self) -> list[PairCheck]:
        return [c for c in self.checks if not c.ok and c.relation is OrderRelation.INCOMPARABLE]

    @property
    def norm_checked(self) -> list[PairCheck]:
        return [c for c in self.checks if c.method == "norm-checked"]

    @property
    def holds(self) -> bool:
        return all(c.ok for c in self.checks)

    def to_dict(self) -> dict[str, Any]:
        def one(c: PairCheck) -> dict[str, Any]:
            rhs = c.rhs.to_json() if isinstance(c.rhs, Bicomplex) else c.rhs
            return {
                "pair": [self.labels[c.sigma], self.labels[c.theta]],
                "lhs": c.lhs.to_json(),
                "rhs": rhs,
                "relation": c.relation.value if c.relation is not None else None,
                "method": c.method,
            }

        return {
            "holds": self.holds,
            "pairs_checked": len(self.checks),
            "violations": [one(c) for c in self.violations],
            "indeterminate": [one(c) for c in self.indeterminate],
            "norm_checked": [one(c) for c in self.norm_checked],
        }


def check_rational_contraction(space: FiniteSpace, U: str | Sequence[int], V: str | Sequence[int],
                               params: ContractionParams, *, tol: float = DEFAULT_TOL) -> ContractionReport:
    """Check the rational contraction on every ordered pair of points.

    When ``d(x, y)`` is singular but nonzero the quotient does not exist; the
    pair is then checked with the norm inequality

        |d(Ux, Vy)| <= sqrt2 cv |d(x,Ux)| |d(y,Vy)| / |d(x,y)| + cw |d(x,y)|

    and labelled ``"norm-checked"``.  Pairs whose two sides are incomparable
    are reported separately as indeterminate, not as violations.
    """
    u, v = _resolve_map(space, U), _resolve_map(space, V)
    t = space.table
    cv, cw = params.curlyvee, params.curlywedge
    checks = []
    for i in range(space.n):
        for j in range(space.n):
            dij = t[i][j]
            lhs = t[u[i]][v[j]]
            if dij.norm() <= tol:
                ok = lhs.norm() <= tol * (1.0 + max(r.norm() for r in t[i]))
                checks.append(PairCheck(i, j, lhs, ZERO, None, "zero-distance", ok))
                continue
            a, b = t[i][u[i]], t[j][v[j]]
            if dij.is_singular(tol):
                bound = SQRT2 * cv * a.norm() * b.norm() / dij.norm() + cw * dij.norm()
                ok = lhs.norm() <= bound * (1.0 + 1e-12) + tol
                checks.append(PairCheck(i, j, lhs, bound, None, "norm-checked", ok))
                continue
            rhs = (a * b * dij.inverse(tol)).scale(cv) + dij.scale(cw)
            rel = compare(lhs, rhs, tol)
            checks.append(PairCheck(i, j, lhs, rhs, rel, "exact", rel.is_le))
    return ContractionReport(checks, space.points, params)


@dataclass
class OrderReport:
    """Violations of an order-type hypothesis: ``(point index, clause)`` entries."""

    violations: list[tuple[int, str]]
    labels: tuple[str, ...]

    @property
    def holds(self) -> bool:
        return not self.violations

    def to_dict(self) -> dict[str, Any]:
        return {"holds": self.holds,
                "violations": [{"point": self.labels[i], "clause": c} for i, c in self.violations]}


def check_weakly_increasing(space: FiniteSpace, U: str | Sequence[int], V: str | Sequence[int]) -> OrderReport:
    """``U x <= V U x`` and ``V x <= U V x`` for every point, in the space's order."""
    if space.order is None:
        raise MissingOrder("weak monotonicity needs an order on the points")
    u, v = _resolve_map(space, U), _resolve_map(space, V)
    bad = []
    for i in range(space.n):
        if not space.order[u[i]][v[u[i]]]:
            bad.append((i, "Ux <= VUx"))
        if not space.order[v[i]][u[v[i]]]:
            bad.append((i, "Vx <= UVx"))
    return OrderReport(bad, space.points)


def check_kannan(space: FiniteSpace, U: str | Sequence[int], lam: float, *,
                 tol: float = DEFAULT_TOL) -> ContractionReport:
    """``d(Ux, Uy) <= lam [d(x, Ux) + d(y, Uy)]`` on every ordered pair."""
    u = _resolve_map(space, U)
    t = space.table
    checks = []
    for i in range(space.n):
        for j in range(space.n):
            lhs = t[u[i]][u[j]]
            rhs = (t[i][u[i]] + t[j][u[j]]).scale(lam)
            rel = compare(lhs, rhs, tol)
            checks.append(PairCheck(i, j, lhs, rhs, rel, "exact", rel.is_le))
    return ContractionReport(checks, space.points)


# -- iteration ------------------------------------------------------------------


class Termination(enum.Enum):
    FIXED_POINT_REACHED = "fixed-point-reached"
    TOLERANCE_MET = "tolerance-met"
    MAX_ITERATIONS = "max-iterations"
    CONTRACTION_VIOLATED = "contraction-violated"


@dataclass
class IterationTrace:
    """Record of one Picard run.

    ``step_gap[n]`` is the displacement used for stopping and for the envelope
    check; it equals ``step_norm[n]`` unless a separate gap measure was given.
    """

    iterates: list[Any]
    maps_applied: list[str]
    step_distance: list[Bicomplex]
    step_norm: list[float]
    step_gap: list[float]
    bound_ok: list[bool]
    termination: Termination
    h: float
    violation_step: int | None = None
    evaluations: int = 0

    @property
    def final(self) -> Any:
        return self.iterates[-1]

    @property
    def converged(self) -> bool:
        return self.termination in (Termination.FIXED_POINT_REACHED, Termination.TOLERANCE_MET)

    def to_dict(self, encode: Callable[[Any], Any] = lambda x: x) -> dict[str, Any]:
        return {
            "iterates": [encode(x) for x in self.iterates],
            "maps_applied": list(self.maps_applied),
            "step_distance": [d.to_json() for d in self.step_distance],
            "step_norm": list(self.step_norm),
            "step_gap": list(self.step_gap),
            "bound_ok": list(self.bound_ok),
            "termination": self.termination.value,
            "violation_step": self.violation_step,
            "h": self.h,
            "evaluations": self.evaluations,
        }


def _check_finite(x: Any, step: int) -> None:
    values = getattr(x, "values", x)
    if isinstance(values, np.ndarray) and not np.all(np.isfinite(values)):
        raise NonFiniteIterate(f"iterate {step} contains non-finite values")
    if isinstance(values, float) and not math.isfinite(values):
        raise NonFiniteIterate(f"iterate {step} is not finite")


def _distance(metric: Callable[[Any, Any], Bicomplex], a: Any, b: Any, step: int) -> Bicomplex:
    try:
        return metric(a, b)
    except ValueError as exc:
        raise NonFiniteIterate(f"distance at step {step} is not finite: {exc}") from exc


def _picard(
    maps: Sequence[tuple[str, Callable[[Any], Any]]],
    start: Any,
    metric: Callable[[Any, Any], Bicomplex],
    h: float,
    tol: float,
    max_iter: int,
    gap: Callable[[Any, Any], float] | None,
    bound_slack: float,
    bound_floor: float,
    stop_on_violation: bool,
    divergence_window: int | None,
) -> IterationTrace:
    if gap is None:
        def gap(a: Any, b: Any) -> float:
            return metric(a, b).norm()

    _check_finite(start, 0)
    evaluations = 0

    def is_common_fixed(x: Any, known: dict[int, Any]) -> bool:
        nonlocal evaluations
        if gap(x, x) > tol:
            return False
        for k, (_, f) in enumerate(maps):
            if k not in known:
                known[k] = f(x)
                evaluations += 1
                _check_finite(known[k], 1)
            if gap(x, known[k]) > tol:
                return False
        return True

    cache: dict[int, Any] = {}
    if is_common_fixed(start, cache):
        return IterationTrace([start], [], [], [], [], [], Termination.FIXED_POINT_REACHED, h,
                              evaluations=evaluations)

    iterates, applied = [start], []
    dists: list[Bicomplex] = []
    norms: list[float] = []
    gaps: list[float] = []
    bound_ok: list[bool] = []
    rising = 0
    termination = Termination.MAX_ITERATIONS
    violation_step = None
    x = start
    for n in range(max_iter):
        name, f = maps[n % len(maps)]
        if n == 0 and 0 in cache:
            nxt = cache[0]
        else:
            nxt = f(x)
            evaluations += 1
        _check_finite(nxt, n + 1)
        d = _distance(metric, x, nxt, n)
        g = gap(x, nxt)
        if not math.isfinite(g):
            raise NonFiniteIterate(f"step gap at step {n} is not finite")
        iterates.append(nxt)
        applied.append(name)
        dists.append(d)
        norms.append(d.norm())
        gaps.append(g)
        envelope = h ** n * gaps[0] * (1.0 + bound_slack) + bound_floor
        ok = g <= envelope
        bound_ok.append(ok)
        if not ok and stop_on_violation:
            termination, violation_step = Termination.CONTRACTION_VIOLATED, n
            break
        if divergence_window is not None and n > 0:
            rising = rising + 1 if g > gaps[-2] else 0
            if rising >= divergence_window:
                trace = IterationTrace(iterates, applied, dists, norms, gaps, bound_ok,
                                       Termination.MAX_ITERATIONS, h, None, evaluations)
                raise Diverged(f"step distance increased for {rising} consecutive steps", trace)
        x = nxt
        if g <= tol and gap(x, x) <= tol:
            fixed = is_common_fixed(x, {})
            termination = Termination.FIXED_POINT_REACHED if fixed else Termination.TOLERANCE_MET
            break
    return IterationTrace(iterates, applied, dists, norms, gaps, bound_ok, termination, h,
                          violation_step, evaluations)


def iterate_alternating(
    U: Callable[[Any], Any],
    V: Callable[[Any], Any],
    start: Any,
    metric: Callable[[Any, Any], Bicomplex],
    params: ContractionParams,
    tol: float = 1e-12,
    max_iter: int = 1000,
    *,
    gap: Callable[[Any, Any], float] | None = None,
    bound_slack: float = 1e-6,
    bound_floor: float = 0.0,
    stop_on_violation: bool = False,
    divergence_window: int | None = None,
) -> IterationTrace:
    """Run ``x1 = U x0, x2 = V x1, ...`` until the step and self-distance fall below ``tol``.

    ``gap(a, b)`` measures displacement for stopping and envelope checks; by
    default it is the norm of ``metric(a, b)``.  Step ``n`` is expected to
    satisfy ``gap_n <= h**n * gap_0 * (1 + bound_slack) + bound_floor``, and the
    outcome is recorded in ``bound_ok``.  A start point that is already a
    common fixed point yields a trace with a single iterate.
    """
    return _picard((("U", U), ("V", V)), start, metric, params.h, tol, max_iter, gap,
                   bound_slack, bound_floor, stop_on_violation, divergence_window)


def iterate_kannan(
    U: Callable[[Any], Any],
    start: Any,
    metric: MetricFn | Callable[[Any, Any], Bicomplex],
    lam: float,
    tol: float = 1e-12,
    max_iter: int = 1000,
    *,
    s: float | None = None,
    gap: Callable[[Any, Any], float] | None = None,
    bound_slack: float = 1e-6,
    stop_on_violation: bool = False,
) -> IterationTrace:
    """Plain Picard iteration ``x[n+1] = U x[n]`` for a Kannan-type map.

    Requires ``0 <= lam <= 1/s``.  Steps shrink by ``lam / (1 - lam)``.
    """
    if s is None:
        s = getattr(metric, "s", 1.0)
    if not 0.0 <= lam <= 1.0 / s:
        raise InvalidParams(f"lambda must lie in [0, 1/s] = [0, {1.0 / s:g}], got {lam}")
    h = lam / (1.0 - lam) if lam < 1.0 else math.inf
    return _picard((("U", U),), start, metric, h, tol, max_iter, gap, bound_slack, 0.0,
                   stop_on_violation, None)


def iterate_on_space(space: FiniteSpace, U: str, V: str, start: str, params: ContractionParams,
                     tol: float = 1e-12, max_iter: int = 1000, **kwargs: Any) -> IterationTrace:
    """Alternating iteration on a finite space, with iterates given as labels."""
    space.index(start)
    return iterate_alternating(space.map_fn(U), space.map_fn(V), str(start), space.metric, params,
                               tol, max_iter, gap=lambda a, b: label_gap(space, a, b), **kwargs)


def label_gap(space: FiniteSpace, a: str, b: str) -> float:
    return space.table[space.index(a)][space.index(b)].norm()


def check_tail_bound(trace: IterationTrace, metric: Callable[[Any, Any], Bicomplex],
                     params: ContractionParams, *, gap: Callable[[Any, Any], float] | None = None,
                     slack: float = 1e-6) -> list[tuple[int, int, float, float]]:
    """Pairs ``(m, n)`` of recorded iterates whose distance exceeds the tail bound."""
    if gap is None:
        def gap(a: Any, b: Any) -> float:
            return metric(a, b).norm()
    if not trace.step_gap:
        return []
    d01 = trace.step_gap[0]
    bad = []
    xs = trace.iterates
    for m in range(len(xs)):
        bound = cauchy_tail_bound(m, params, d01)
        for n in range(m + 1, len(xs)):
            value = gap(xs[m], xs[n])
            if value > bound * (1.0 + slack):
                bad.append((m, n, value, bound))
    return bad


# -- certification ----------------------------------------------------------------


@dataclass
class FixedPointCertificate:
    point: Any
    self_distance: Bicomplex
    self_gap: float
    residual_U: float
    residual_V: float
    common_fixed_points: list[Any] = field(default_factory=list)
    unique_among: str = "not enumerated"

    @property
    def unique(self) -> bool | None:
        if self.unique_among == "not enumerated":
            return None
        return len(self.common_fixed_points) == 1

    def to_dict(self, encode: Callable[[Any], Any] = lambda x: x) -> dict[str, Any]:
        return {
            "point": encode(self.point),
            "self_distance": self.self_distance.to_json(),
            "self_gap": self.self_gap,
            "residual_U": self.residual_U,
            "residual_V": self.residual_V,
            "common_fixed_points": [encode(p) for p in self.common_fixed_points],
            "unique": self.unique,
            "unique_among": self.unique_among,
        }


def certify_fixed_point(space_or_metric: FiniteSpace | Callable[[Any, Any], Bicomplex],
                        U: Any, V: Any, candidate: Any, tol: float = 1e-12, *,
                        gap: Callable[[Any, Any], float] | None = None) -> FixedPointCertificate:
    """Certify ``candidate`` as a common fixed point with vanishing self-distance.

    On a finite space ``U`` and ``V`` are map names or index tables, the
    candidate is a label, and every point is enumerated to list all common
    fixed points.  Otherwise ``U`` and ``V`` are callables: residuals are
    ``gap(x, Ux)`` and ``gap(x, Vx)`` and uniqueness is not enumerated.

    Raises :class:`NotFixed` carrying the residuals.
    """
    if isinstance(space_or_metric, FiniteSpace):
        space = space_or_metric
        u, v = _resolve_map(space, U), _resolve_map(space, V)
        c = space.index(candidate)
        t = space.table
        self_distance = t[c][c]
        ru = 0.0 if u[c] == c else t[c][u[c]].norm()
        rv = 0.0 if v[c] == c else t[c][v[c]].norm()
        sg = self_distance.norm()
        common = [space.points[k] for k in range(space.n) if u[k] == k and v[k] == k]
        if u[c] != c or v[c] != c or sg > tol:
            raise NotFixed(f"{candidate!r} is not a common fixed point with zero self-distance", ru, rv, sg)
        return FixedPointCertificate(space.points[c], self_distance, sg, ru, rv, common,
                                     f"all {space.n} points")
    metric = space_or_metric
    if gap is None:
        def gap(a: Any, b: Any) -> float:
            return metric(a, b).norm()
    ux, vx = U(candidate), V(candidate)
    ru, rv = gap(candidate, ux), gap(candidate, vx)
    sg = gap(candidate, candidate)
    if ru > tol or rv > tol or sg > tol:
        raise NotFixed("candidate is not a common fixed point within tolerance", ru, rv, sg)
    return FixedPointCertificate(candidate, metric(candidate, candidate), sg, ru, rv, [candidate])

