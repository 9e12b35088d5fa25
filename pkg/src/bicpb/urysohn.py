"""Systems of Urysohn integral equations on a quadrature grid.

Both equations ``x(q) = b(q) + int_x^y G_k(q, s, x(s)) ds`` are discretized by a
fixed composite rule (Nystrom style): the unknown is its vector of node values
and each integral becomes a weighted sum over the nodes.  The two discrete
operators are then handed to the alternating iteration in :mod:`bicpb.fpsolve`.

Kernels and free terms come from registries of named, parameterized families
so that configuration files never carry code.  Kernels are vectorized: a
kernel is called as ``G(q, s, u)`` with ``q`` of shape ``(N,)``, ``s`` of
shape ``(M,)`` and ``u`` of shape ``(M, n)`` and returns ``(N, M, n)``.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Any, Callable, Mapping, Sequence

import numpy as np

from .bicomplex import Bicomplex
from .errors import (BadInterval, NonFiniteIterate, NonFiniteKernel, NotFixed, OddSimpson,
                     ShapeMismatch, UnknownFamily)
from .fpsolve import (ContractionParams, FixedPointCertificate, IterationTrace, certify_fixed_point,
                      iterate_alternating)
from .pbms import MetricFn

KernelFn = Callable[[np.ndarray, np.ndarray, np.ndarray], np.ndarray]
FreeTermFn = Callable[[np.ndarray, int], np.ndarray]


class Rule(str, enum.Enum):
    TRAPEZOID = "trapezoid"
    SIMPSON = "simpson"


@dataclass(frozen=True, eq=False)
class Grid:
    x: float
    y: float
    nodes: np.ndarray
    weights: np.ndarray
    rule: Rule

    @property
    def intervals(self) -> int:
        return len(self.nodes) - 1

    @property
    def length(self) -> float:
        return self.y - self.x

    def refined(self, factor: int = 2) -> Grid:
        return make_grid(self.x, self.y, self.intervals * factor, self.rule)


def make_grid(x: float, y: float, intervals: int, rule: Rule | str = Rule.SIMPSON) -> Grid:
    """Nodes and weights of the composite trapezoid or Simpson rule on ``[x, y]``.

    >>> make_grid(0, 1, 2, "trapezoid").weights.tolist()
    [0.25, 0.5, 0.25]
    """
    rule = Rule(rule)
    x, y = float(x), float(y)
    if not (math.isfinite(x) and math.isfinite(y) and x < y):
        raise BadInterval(f"need finite endpoints with x < y, got [{x}, {y}]")
    if int(intervals) != intervals or intervals < 2:
        raise BadInterval(f"need at least 2 intervals, got {intervals}")
    intervals = int(intervals)
    if rule is Rule.SIMPSON and intervals % 2:
        raise OddSimpson(f"Simpson's rule needs an even interval count, got {intervals}")
    nodes = np.linspace(x, y, intervals + 1)
    h = (y - x) / intervals
    if rule is Rule.TRAPEZOID:
        weights = np.full(intervals + 1, h)
        weights[[0, -1]] = h / 2.0
    else:
        weights = np.empty(intervals + 1)
        weights[1:-1:2] = 4.0
        weights[2:-1:2] = 2.0
        weights[[0, -1]] = 1.0
        weights *= h / 3.0
    nodes.flags.writeable = False
    weights.flags.writeable = False
    return Grid(x, y, nodes, weights, rule)


@dataclass(frozen=True, eq=False)
class GridFunction:
    """Node values of an ``R^n``-valued function, shape ``(nodes, components)``."""

    values: np.ndarray

    def __post_init__(self) -> None:
        arr = np.array(self.values, dtype=float)
        if arr.ndim == 1:
            arr = arr[:, None]
        if arr.ndim != 2:
            raise ShapeMismatch(f"grid function values must be 1-D or 2-D, got shape {arr.shape}")
        if not np.all(np.isfinite(arr)):
            raise NonFiniteIterate("grid function values must be finite")
        arr.flags.writeable = False
        object.__setattr__(self, "values", arr)

    @property
    def components(self) -> int:
        return self.values.shape[1]

    @property
    def n_nodes(self) -> int:
        return self.values.shape[0]

    @classmethod
    def constant(cls, grid: Grid, value: float | Sequence[float], components: int = 1) -> GridFunction:
        row = np.broadcast_to(np.asarray(value, dtype=float), (components,))
        return cls(np.tile(row, (len(grid.nodes), 1)))

    @classmethod
    def from_callable(cls, grid: Grid, f: Callable[[np.ndarray], np.ndarray]) -> GridFunction:
        return cls(f(np.asarray(grid.nodes)))

    def check(self, grid: Grid) -> None:
        if self.n_nodes != len(grid.nodes):
            raise ShapeMismatch(f"function has {self.n_nodes} node values, grid has {len(grid.nodes)} nodes")

    def to_json(self) -> list[list[float]]:
        return self.values.tolist()


# -- registries -------------------------------------------------------------------

_KERNELS: dict[str, Callable[..., KernelFn]] = {}
_FREE_TERMS: dict[str, Callable[..., FreeTermFn]] = {}


def register_kernel(name: str):
    """Decorator adding a kernel factory ``factory(**params) -> G`` to the registry."""
    def deco(factory: Callable[..., KernelFn]) -> Callable[..., KernelFn]:
        _KERNELS[name] = factory
        return factory
    return deco


def register_free_term(name: str):
    def deco(factory: Callable[..., FreeTermFn]) -> Callable[..., FreeTermFn]:
        _FREE_TERMS[name] = factory
        return factory
    return deco


def kernel_names() -> list[str]:
    return sorted(_KERNELS)


def free_term_names() -> list[str]:
    return sorted(_FREE_TERMS)


def _expand(values: np.ndarray, q: np.ndarray, u: np.ndarray) -> np.ndarray:
    return np.broadcast_to(values, (len(q),) + u.shape)


@register_kernel("zero")
def _zero_kernel() -> KernelFn:
    return lambda q, s, u: np.zeros((len(q),) + u.shape)


@register_kernel("constant")
def _constant_kernel(c: float | Sequence[float] = 0.0) -> KernelFn:
    c = np.asarray(c, dtype=float)
    return lambda q, s, u: _expand(np.broadcast_to(c, u.shape[-1:]), q, u).copy()


@register_kernel("linear")
def _linear_kernel(c: float = 1.0, matrix: Sequence[Sequence[float]] | None = None) -> KernelFn:
    """``c * u``, or ``A u`` when a matrix is given."""
    if matrix is not None:
        a = np.asarray(matrix, dtype=float)
        return lambda q, s, u: _expand(u @ a.T, q, u).copy()
    return lambda q, s, u: _expand(c * u, q, u).copy()


@register_kernel("separable")
def _separable_kernel(c: float = 1.0, alpha: float = 1.0, beta: float = 1.0, gamma: float = 1.0) -> KernelFn:
    """``c * q**alpha * s**beta * u**gamma``."""
    def G(q: np.ndarray, s: np.ndarray, u: np.ndarray) -> np.ndarray:
        with np.errstate(invalid="ignore", divide="ignore"):
            return c * (q ** alpha)[:, None, None] * (s ** beta)[None, :, None] * (u ** gamma)[None, :, :]
    return G


@register_kernel("exponential")
def _exponential_kernel(c: float = 1.0, a: float = 1.0, b: float = 1.0) -> KernelFn:
    """``c * exp(a q + b s) * u``."""
    def G(q: np.ndarray, s: np.ndarray, u: np.ndarray) -> np.ndarray:
        return c * np.exp(a * q[:, None] + b * s[None, :])[:, :, None] * u[None, :, :]
    return G


@register_kernel("sine")
def _sine_kernel(c: float = 1.0) -> KernelFn:
    """``c * sin(u)``: bounded nonlinearity."""
    return lambda q, s, u: _expand(c * np.sin(u), q, u).copy()


@register_free_term("constant")
def _constant_term(value: float | Sequence[float] = 1.0) -> FreeTermFn:
    v = np.asarray(value, dtype=float)
    return lambda q, n: np.tile(np.broadcast_to(v, (n,)), (len(q), 1))


@register_free_term("linear")
def _linear_term(a: float = 0.0, b: float = 1.0) -> FreeTermFn:
    return lambda q, n: np.repeat((a + b * q)[:, None], n, axis=1)


@register_free_term("exp")
def _exp_term(a: float = 1.0, k: float = 1.0) -> FreeTermFn:
    return lambda q, n: np.repeat((a * np.exp(k * q))[:, None], n, axis=1)


@dataclass(frozen=True)
class KernelSpec:
    """A registered kernel family plus its parameters."""

    name: str
    params: Mapping[str, Any] = field(default_factory=dict)

    @cached_property
    def fn(self) -> KernelFn:
        try:
            factory = _KERNELS[self.name]
        except KeyError:
            raise UnknownFamily(f"unknown kernel {self.name!r}; known: {kernel_names()}") from None
        return factory(**self.params)

    def __call__(self, q: np.ndarray, s: np.ndarray, u: np.ndarray) -> np.ndarray:
        return self.fn(q, s, u)

    @classmethod
    def from_dict(cls, data: Mapping[str, Any]) -> KernelSpec:
        return cls(data["name"], dict(data.get("params") or {}))

    def to_dict(self) -> dict[str, Any]:
        return {"name": self.name, "params": dict(self.params)}


def free_term(spec: Mapping[str, Any], grid: Grid, components: int = 1) -> GridFunction:
    name = spec["name"]
    try:
        factory = _FREE_TERMS[name]
    except KeyError:
        raise UnknownFamily(f"unknown free term {name!r}; known: {free_term_names()}") from None
    return GridFunction(factory(**dict(spec.get("params") or {}))(np.asarray(grid.nodes), components))


# -- operators and metric ---------------------------------------------------------


def _kernel_values(G: KernelSpec | KernelFn, grid: Grid, sigma: GridFunction) -> np.ndarray:
    q = np.asarray(grid.nodes)
    K = np.asarray(G(q, q, sigma.values), dtype=float)
    if K.shape != (len(q),) + sigma.values.shape:
        raise ShapeMismatch(f"kernel returned shape {K.shape}, expected {(len(q),) + sigma.values.shape}")
    if not np.all(np.isfinite(K)):
        raise NonFiniteKernel("kernel produced non-finite values on the grid")
    return K


def apply_operator(G: KernelSpec | KernelFn, b: GridFunction, sigma: GridFunction, grid: Grid) -> GridFunction:
    """``b(q_i) + sum_j w_j G(q_i, s_j, sigma(s_j))`` at every node."""
    b.check(grid)
    sigma.check(grid)
    if b.values.shape != sigma.values.shape:
        raise ShapeMismatch(f"free term shape {b.values.shape} != unknown shape {sigma.values.shape}")
    K = _kernel_values(G, grid, sigma)
    out = b.values + np.einsum("j,ijk->ik", grid.weights, K)
    if not np.all(np.isfinite(out)):
        raise NonFiniteIterate("operator output overflowed")
    return GridFunction(out)


def sup_distance(sigma: GridFunction, theta: GridFunction) -> float:
    """Largest pointwise Euclidean distance over the nodes."""
    if sigma.values.shape != theta.values.shape:
        raise ShapeMismatch(f"shapes differ: {sigma.values.shape} vs {theta.values.shape}")
    return float(np.max(np.linalg.norm(sigma.values - theta.values, axis=1)))


def app_metric(sigma: GridFunction, theta: GridFunction) -> Bicomplex:
    """``(D**2 + 2) + i2 (D**2 + 2)`` with ``D`` the sup distance."""
    t = sup_distance(sigma, theta) ** 2 + 2.0
    return Bicomplex(t, 0.0, t, 0.0)


APP_METRIC = MetricFn(app_metric, 1.0, "sup-offset")


def residual(G: KernelSpec | KernelFn, b: GridFunction, sigma: GridFunction, grid: Grid) -> float:
    return sup_distance(sigma, apply_operator(G, b, sigma, grid))


# -- hypothesis checks --------------------------------------------------------------


@dataclass
class ConditionReport:
    checked: int
    violations: list[dict[str, Any]]
    vacuous: list[dict[str, Any]] = field(default_factory=list)

    @property
    def holds(self) -> bool:
        return not self.violations

    def to_dict(self, limit: int = 20) -> dict[str, Any]:
        return {"holds": self.holds, "checked": self.checked, "violation_count": len(self.violations),
                "violations": self.violations[:limit], "vacuous_count": len(self.vacuous)}


def check_monotone_condition(G1: KernelSpec | KernelFn, G2: KernelSpec | KernelFn, b: GridFunction,
                             grid: Grid, samples: Sequence[GridFunction], *, tol: float = 1e-12) -> ConditionReport:
    """Check ``G1(q,s,x(s)) <= G2(q,s,Ux(s))`` and ``G2(q,s,x(s)) <= G1(q,s,Vx(s))``.

    Vectors are compared component-wise at every node pair for every sample.
    """
    violations = []
    checked = 0
    for k, sigma in enumerate(samples):
        usig = apply_operator(G1, b, sigma, grid)
        vsig = apply_operator(G2, b, sigma, grid)
        for clause, lo_k, hi_k, image in (("G1(x) <= G2(Ux)", G1, G2, usig), ("G2(x) <= G1(Vx)", G2, G1, vsig)):
            lo = _kernel_values(lo_k, grid, sigma)
            hi = _kernel_values(hi_k, grid, image)
            eps = tol * (1.0 + np.maximum(np.abs(lo), np.abs(hi)))
            bad = np.argwhere(lo > hi + eps)
            checked += lo.size
            for i, j, c in bad:
                violations.append({"sample": k, "clause": clause, "q": float(grid.nodes[i]),
                                   "s": float(grid.nodes[j]), "component": int(c),
                                   "lhs": float(lo[i, j, c]), "rhs": float(hi[i, j, c])})
    return ConditionReport(checked, violations)


def check_lipschitz_condition(G1: KernelSpec | KernelFn, G2: KernelSpec | KernelFn, grid: Grid,
                              sample_pairs: Sequence[tuple[GridFunction, GridFunction]],
                              *, tol: float = 1e-12) -> ConditionReport:
    """Check ``|G1(q,s,x(s)) - G2(q,s,z(s))| <= sqrt(D**2/(2L) - 2/L)`` with ``L = y - x``.

    ``D`` is the sup distance between the pair.  Where the radicand is negative
    the bound is not real; such pairs are listed as vacuous and make no claim.
    """
    L = grid.length
    violations, vacuous = [], []
    checked = 0
    for k, (sigma, theta) in enumerate(sample_pairs):
        D = sup_distance(sigma, theta)
        radicand = D * D / (2.0 * L) - 2.0 / L
        if radicand < 0:
            vacuous.append({"pair": k, "sup_distance": D, "radicand": radicand})
            continue
        bound = math.sqrt(radicand)
        diff = _kernel_values(G1, grid, sigma) - _kernel_values(G2, grid, theta)
        lhs = float(np.max(np.linalg.norm(diff, axis=2)))
        checked += 1
        if lhs > bound * (1.0 + 1e-12) + tol:
            violations.append({"pair": k, "sup_distance": D, "lhs": lhs, "bound": bound})
    return ConditionReport(checked, violations, vacuous)


# -- solver -----------------------------------------------------------------------


@dataclass
class UrysohnSolution:
    solution: GridFunction
    trace: IterationTrace
    residuals: tuple[float, float]
    verdict: bool
    grid: Grid
    contraction_ratio: float | None
    certificate: FixedPointCertificate | None = None

    def to_dict(self, include_iterates: bool = False) -> dict[str, Any]:
        trace = self.trace.to_dict(lambda g: g.to_json())
        if not include_iterates:
            trace.pop("iterates")
        return {
            "nodes": np.asarray(self.grid.nodes).tolist(),
            "solution": self.solution.to_json(),
            "residuals": list(self.residuals),
            "verdict": "common-solution" if self.verdict else "no-common-solution",
            "contraction_ratio": self.contraction_ratio,
            "steps": len(self.trace.step_gap),
            "trace": trace,
            "certificate": self.certificate.to_dict(lambda g: None) if self.certificate else None,
        }


def contraction_ratio(gaps: Sequence[float], floor: float = 1e-9) -> float | None:
    """Largest observed ``D[n+1] / D[n]`` among steps still above ``floor``."""
    ratios = [b / a for a, b in zip(gaps, gaps[1:]) if a > floor and b > floor]
    return max(ratios) if ratios else None


def solve_system(
    G1: KernelSpec | KernelFn,
    G2: KernelSpec | KernelFn,
    b: GridFunction,
    grid: Grid,
    tol: float = 1e-10,
    max_iter: int = 1000,
    *,
    curlywedge: float = 0.5,
    curlyvee: float = 0.0,
    divergence_window: int = 25,
    start: GridFunction | None = None,
) -> UrysohnSolution:
    """Solve both equations by alternating Picard iteration from ``start`` (default ``b``).

    Stopping and the geometric envelope use the sup distance ``D`` between
    iterates, since the offset metric never reaches zero.  A common solution is
    declared only when both equation residuals are at most ``tol``.

    Raises :class:`bicpb.errors.Diverged` if ``D`` increases for
    ``divergence_window`` consecutive steps.
    """
    b.check(grid)
    params = ContractionParams(curlyvee, curlywedge, 1.0)

    def U(sig: GridFunction) -> GridFunction:
        return apply_operator(G1, b, sig, grid)

    def V(sig: GridFunction) -> GridFunction:
        return apply_operator(G2, b, sig, grid)

    floor = 1e2 * np.finfo(float).eps * (1.0 + float(np.max(np.abs(b.values))))
    trace = iterate_alternating(U, V, b if start is None else start, APP_METRIC, params, tol, max_iter,
                                gap=sup_distance, bound_floor=floor, divergence_window=divergence_window)
    sol = trace.final
    r1, r2 = residual(G1, b, sol, grid), residual(G2, b, sol, grid)
    verdict = r1 <= tol and r2 <= tol
    cert = None
    if verdict:
        try:
            cert = certify_fixed_point(APP_METRIC, U, V, sol, tol, gap=sup_distance)
        except NotFixed:
            cert = None
    return UrysohnSolution(sol, trace, (r1, r2), verdict, grid, contraction_ratio(trace.step_gap, 1e3 * floor), cert)


@dataclass
class UrysohnConfig:
    grid: Grid
    G1: KernelSpec
    G2: KernelSpec
    b_spec: Mapping[str, Any]
    components: int = 1
    curlywedge: float = 0.5
    curlyvee: float = 0.0
    tol: float = 1e-10
    max_iter: int = 1000

    @classmethod
    def from_dict(cls, data: Mapping[str, Any]) -> UrysohnConfig:
        x, y = data["interval"]
        grid = make_grid(x, y, data.get("intervals", 16), data.get("rule", "simpson"))
        return cls(grid, KernelSpec.from_dict(data["G1"]), KernelSpec.from_dict(data["G2"]), dict(data["b"]),
                   int(data.get("components", 1)), float(data.get("curlywedge", 0.5)),
                   float(data.get("curlyvee", 0.0)), float(data.get("tol", 1e-10)),
                   int(data.get("max_iter", 1000)))

    def to_dict(self) -> dict[str, Any]:
        return {"interval": [self.grid.x, self.grid.y], "intervals": self.grid.intervals,
                "rule": self.grid.rule.value, "b": dict(self.b_spec), "G1": self.G1.to_dict(),
                "G2": self.G2.to_dict(), "curlywedge": self.curlywedge, "curlyvee": self.curlyvee,
                "tol": self.tol, "max_iter": self.max_iter, "components": self.components}

    def b_on(self, grid: Grid) -> GridFunction:
        return free_term(self.b_spec, grid, self.components)

    def solve(self, grid: Grid | None = None, tol: float | None = None, max_iter: int | None = None) -> UrysohnSolution:
        grid = grid or self.grid
        return solve_system(self.G1, self.G2, self.b_on(grid), grid,
                            self.tol if tol is None else tol,
                            self.max_iter if max_iter is None else max_iter,
                            curlywedge=self.curlywedge, curlyvee=self.curlyvee)


@dataclass
class RefinementRow:
    intervals: int
    error: float
    ratio: float | None


def refinement_study(config: UrysohnConfig, levels: int, *, reference_factor: int = 16,
                     tol: float = 1e-13, max_iter: int | None = None) -> list[RefinementRow]:
    """Errors on ``levels`` successively halved meshes against a much finer reference solve.

    Coarse nodes are a subset of the reference nodes, so errors are measured
    without interpolation.  Ratios below an error of 1e-13 are not reported.
    """
    if levels < 1:
        raise ValueError("levels must be >= 1")
    grids = [config.grid]
    for _ in range(levels - 1):
        grids.append(grids[-1].refined())
    ref_grid = grids[-1].refined(reference_factor)
    ref = config.solve(ref_grid, tol, max_iter).solution.values
    rows: list[RefinementRow] = []
    for g in grids:
        stride = ref_grid.intervals // g.intervals
        sol = config.solve(g, tol, max_iter).solution.values
        err = float(np.max(np.linalg.norm(sol - ref[::stride], axis=1)))
        ratio = None
        if rows and rows[-1].error > 1e-13 and err > 1e-13:
            ratio = rows[-1].error / err
        rows.append(RefinementRow(g.intervals, err, ratio))
    return rows
