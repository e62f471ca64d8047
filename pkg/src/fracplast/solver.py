"""Incremental nonlocal equilibrium of a 1D elasto-plastic bar.

Each load step solves the purely elastic incremental equilibrium

    d/dX (Grad dU) + db / E = 0

at the interior nodes, with the end displacement increments prescribed at
nodes ``0`` and ``n`` and copied onto the ``m`` fictitious nodes beyond each
end. Strain increments then come from the fractional strain stencils and
every physical node is updated by return mapping. Stresses are not
re-equilibrated after the plastic correction.

Node offsets in stencil vectors run from ``-(m+1)`` to ``m+1``; index
``k + m + 1`` holds offset ``k``.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Literal, Sequence

import numpy as np
from scipy.linalg import lapack

from .kernel import FractionalOperatorSpec, caputo_left_weights, caputo_right_weights, stencil_coefficients
from .plasticity import MaterialParams, update_field

__all__ = [
    "ConfigurationError",
    "SolverError",
    "Grid1D",
    "LoadProgram",
    "FieldState",
    "BandedSystem",
    "equilibrium_stencil",
    "strain_stencil",
    "assemble",
    "solve_increment",
    "strain_increments",
    "solve",
    "run",
]

log = logging.getLogger(__name__)

PositionClass = Literal["left_boundary", "interior", "right_boundary"]
_INNER_SCHEME = {"left_boundary": "forward", "interior": "central", "right_boundary": "backward"}


class ConfigurationError(ValueError):
    """Inconsistent grid, operator or loading data."""


class SolverError(RuntimeError):
    def __init__(self, message: str, pivot: int | None = None, step: int | None = None):
        super().__init__(message)
        self.pivot = pivot
        self.step = step


@dataclass(frozen=True)
class Grid1D:
    """Physical nodes ``X_0 .. X_n`` on ``[0, length]`` plus ``m`` fictitious nodes per side."""

    length: float
    n_intervals: int
    m: int

    def __post_init__(self):
        if not self.length > 0:
            raise ConfigurationError(f"bar length must be positive, got {self.length!r}")
        if self.n_intervals < 1:
            raise ConfigurationError(f"n_intervals must be >= 1, got {self.n_intervals!r}")
        if self.m < 2:
            raise ConfigurationError(f"m must be >= 2, got {self.m!r}")
        if self.m > self.n_intervals:
            raise ConfigurationError(
                f"nonlocal horizon ell = m*dx = {self.m * self.dx!r} exceeds the bar length {self.length!r}"
            )

    @classmethod
    def for_operator(cls, spec: FractionalOperatorSpec, length: float) -> "Grid1D":
        """Grid whose spacing equals the quadrature step, ``dx = ell / m``."""
        ratio = length / spec.h
        n = round(ratio)
        if n < 1 or abs(ratio - n) > 1e-9 * max(1.0, ratio):
            raise ConfigurationError(
                f"grid constraint dx = ell/m violated: length/(ell/m) = {ratio!r} is not an integer node count"
            )
        return cls(length, n, spec.m)

    @property
    def dx(self) -> float:
        return self.length / self.n_intervals

    @property
    def x(self) -> np.ndarray:
        return np.linspace(0.0, self.length, self.n_intervals + 1)

    @property
    def x_extended(self) -> np.ndarray:
        """Coordinates of nodes ``-m .. n+m``."""
        k = np.arange(-self.m, self.n_intervals + self.m + 1)
        return k * self.dx

    def check_operator(self, spec: FractionalOperatorSpec) -> None:
        if spec.m != self.m or not math.isclose(spec.h, self.dx, rel_tol=1e-9):
            raise ConfigurationError(
                f"grid/operator mismatch: need dx = ell/m = {spec.h!r} and m = {spec.m}, "
                f"grid has dx = {self.dx!r} and m = {self.m}"
            )


@dataclass(frozen=True)
class LoadProgram:
    """Prescribed end displacements reached in ``n_steps`` equal increments.

    ``body_force`` holds one value per physical node in N/m^3 and is applied
    proportionally with the end displacements.
    """

    u_bar: float
    n_steps: int = 100
    end_convention: Literal["outward", "both-positive"] = "outward"
    body_force: np.ndarray = field(default_factory=lambda: np.zeros(0))

    def __post_init__(self):
        if int(self.n_steps) != self.n_steps or self.n_steps < 1:
            raise ConfigurationError(f"n_steps must be an integer >= 1, got {self.n_steps!r}")
        if self.end_convention not in ("outward", "both-positive"):
            raise ConfigurationError(f"unknown end_convention {self.end_convention!r}")
        object.__setattr__(self, "body_force", np.asarray(self.body_force, dtype=float))

    @property
    def end_values(self) -> tuple[float, float]:
        """Final prescribed displacements at ``X = 0`` and ``X = l``."""
        if self.end_convention == "outward":
            return -self.u_bar, self.u_bar
        return self.u_bar, self.u_bar

    def load_factor(self, step: int) -> float:
        return step / self.n_steps

    def increment_factor(self, step_index: int) -> float:
        """Fraction of the full load applied in step ``step_index`` (0-based)."""
        return self.load_factor(step_index + 1) - self.load_factor(step_index)


@dataclass(frozen=True)
class FieldState:
    """Nodal fields on the physical nodes after a load step."""

    step: int
    U: np.ndarray
    eps_total: np.ndarray
    eps_plastic: np.ndarray
    sigma: np.ndarray
    dgamma: np.ndarray

    @property
    def eps_elastic(self) -> np.ndarray:
        return self.eps_total - self.eps_plastic


@dataclass(frozen=True)
class BandedSystem:
    """Equilibrium rows for the interior unknowns ``dU_1 .. dU_{n-1}``.

    ``ab`` uses LAPACK general-band layout with ``kl`` extra rows reserved
    for pivoting fill-in: ``A[i, j] == ab[kl + ku + i - j, j]``.
    """

    ab: np.ndarray
    kl: int
    ku: int
    rhs: np.ndarray
    left_increment: float
    right_increment: float

    @property
    def size(self) -> int:
        return self.rhs.size

    def dense(self) -> np.ndarray:
        n, kl, ku = self.size, self.kl, self.ku
        A = np.zeros((n, n))
        for i in range(n):
            for j in range(max(0, i - kl), min(n, i + ku + 1)):
                A[i, j] = self.ab[kl + ku + i - j, j]
        return A


def _rc_node_weights(spec: FractionalOperatorSpec) -> np.ndarray:
    """Weights on the ``2m + 1`` quadrature nodes so that ``Grad = F * sum(W * f')``."""
    m = spec.m
    W = np.zeros(2 * m + 1)
    W[: m + 1] += caputo_left_weights(spec)
    W[m:] += caputo_right_weights(spec)
    return W


def strain_stencil(spec: FractionalOperatorSpec, position_class: PositionClass) -> np.ndarray:
    """Coefficients of ``Grad dU`` at a node over offsets ``-(m+1) .. m+1``, including ``1/dx``."""
    try:
        scheme = _INNER_SCHEME[position_class]
    except KeyError:
        raise ValueError(f"unknown position class {position_class!r}") from None
    m, h = spec.m, spec.h
    scale = stencil_coefficients(spec).F * _rc_node_weights(spec)
    coef = np.zeros(2 * m + 3)
    q = np.arange(2 * m + 1) + 1  # stencil index of quadrature node offset -m..m
    if scheme == "forward":
        np.add.at(coef, q + 1, scale / h)
        np.add.at(coef, q, -scale / h)
    elif scheme == "backward":
        np.add.at(coef, q, scale / h)
        np.add.at(coef, q - 1, -scale / h)
    else:
        np.add.at(coef, q + 1, scale / (2 * h))
        np.add.at(coef, q - 1, -scale / (2 * h))
    return coef


def equilibrium_stencil(spec: FractionalOperatorSpec) -> np.ndarray:
    """Coefficients of ``d/dX(Grad dU)`` at node ``i`` over offsets ``-(m+1) .. m+1``.

    Forward inner differences inside ``Grad`` and a backward outer difference
    ``(Grad_i - Grad_{i-1}) / dx``; includes the ``1/dx^2`` factor.
    """
    g = strain_stencil(spec, "left_boundary")  # forward inner scheme, zero at offset -(m+1)
    s = g.copy()
    s[:-1] -= g[1:]  # Grad_{i-1} shifted one node left
    return s / spec.h


def assemble(
    spec: FractionalOperatorSpec,
    grid: Grid1D,
    params: MaterialParams,
    program: LoadProgram,
    step_index: int,
) -> BandedSystem:
    grid.check_operator(spec)
    n, m = grid.n_intervals, grid.m
    if program.body_force.size not in (0, n + 1):
        raise ConfigurationError(f"body force needs {n + 1} nodal values, got {program.body_force.size}")
    if n < 2:
        raise ConfigurationError("at least one interior node is required (n_intervals >= 2)")
    stencil = equilibrium_stencil(spec)
    half = m + 1
    factor = program.increment_factor(step_index)
    du_left, du_right = (factor * v for v in program.end_values)

    size = n - 1
    kl = ku = half
    ab = np.zeros((2 * kl + ku + 1, size))
    rhs = np.zeros(size)
    if program.body_force.size:
        rhs[:] = -factor * program.body_force[1:n] / params.E
    for row, node in enumerate(range(1, n)):
        for k in range(-half, half + 1):
            c = stencil[k + half]
            j = node + k
            if j <= 0:
                rhs[row] -= c * du_left
            elif j >= n:
                rhs[row] -= c * du_right
            else:
                col = j - 1
                ab[kl + ku + row - col, col] += c
    return BandedSystem(ab, kl, ku, rhs, du_left, du_right)


def solve_increment(system: BandedSystem) -> np.ndarray:
    """Banded LU with partial pivoting (LAPACK ``dgbsv``)."""
    if system.size == 0:
        return np.zeros(0)
    _, _, x, info = lapack.dgbsv(system.kl, system.ku, system.ab.copy(), system.rhs.copy())
    if info > 0:
        # info is the 1-based pivot row; unknown j sits at physical node j + 1
        raise SolverError(f"singular equilibrium matrix: zero pivot at node {info}", pivot=info)
    if info < 0:
        raise SolverError(f"dgbsv rejected argument {-info}")
    residual = _band_residual(system, x)
    bound = 1e-10 * max(np.abs(system.rhs).max(), np.finfo(float).tiny)
    if not np.all(np.isfinite(x)) or residual > bound:
        raise SolverError(f"linear solve inaccurate: residual {residual:.3e} exceeds {bound:.3e}")
    return x


def _band_residual(system: BandedSystem, x: np.ndarray) -> float:
    n, kl, ku = system.size, system.kl, system.ku
    Ax = np.zeros(n)
    for d in range(-kl, ku + 1):  # d = j - i
        band = system.ab[kl + ku - d]
        if d >= 0:
            Ax[: n - d] += band[d:] * x[d:]
        else:
            Ax[-d:] += band[: n + d] * x[: n + d]
    return float(np.abs(Ax - system.rhs).max())


def extend_increment(dU_interior: np.ndarray, du_left: float, du_right: float, m: int) -> np.ndarray:
    """Increment on nodes ``-m .. n+m`` with ends and fictitious nodes pinned."""
    return np.concatenate([np.full(m + 1, du_left), dU_interior, np.full(m + 1, du_right)])


def strain_increments(dU_extended: np.ndarray, spec: FractionalOperatorSpec, grid: Grid1D) -> np.ndarray:
    """Fractional strain increment at each physical node.

    ``dU_extended`` covers nodes ``-m .. n+m``. Node 0 uses forward inner
    differences, node ``n`` backward ones and the rest central ones.
    """
    grid.check_operator(spec)
    n, m = grid.n_intervals, grid.m
    dU = np.asarray(dU_extended, dtype=float)
    if dU.size != n + 2 * m + 1:
        raise ValueError(f"dU_extended must cover {n + 2 * m + 1} nodes, got {dU.size}")
    # pad one extra node each side so every stencil window has 2m + 3 entries; those
    # entries always carry zero weight for the scheme used at that node
    padded = np.concatenate([[dU[0]], dU, [dU[-1]]])
    windows = np.lib.stride_tricks.sliding_window_view(padded, 2 * m + 3)
    # window i is centered on physical node i
    d_eps = windows[1:n] @ strain_stencil(spec, "interior")
    first = windows[0] @ strain_stencil(spec, "left_boundary")
    last = windows[n] @ strain_stencil(spec, "right_boundary")
    return np.concatenate([[first], d_eps, [last]])


def solve(
    spec: FractionalOperatorSpec,
    grid: Grid1D,
    params: MaterialParams,
    program: LoadProgram,
) -> list[FieldState]:
    """March the loading program; one :class:`FieldState` per completed step."""
    grid.check_operator(spec)
    n, m = grid.n_intervals, grid.m
    U = np.zeros(n + 1)
    eps = np.zeros(n + 1)
    eps_p = np.zeros(n + 1)
    history = []
    for step in range(program.n_steps):
        try:
            system = assemble(spec, grid, params, program, step)
            dU_inner = solve_increment(system)
        except SolverError as exc:
            raise SolverError(f"load step {step + 1}: {exc}", pivot=exc.pivot, step=step + 1) from exc
        dU = extend_increment(dU_inner, system.left_increment, system.right_increment, m)
        U = U + dU[m : m + n + 1]
        d_eps = strain_increments(dU, spec, grid)
        eps, eps_p, sigma, dgamma = update_field(eps, eps_p, d_eps, params)
        history.append(FieldState(step + 1, U, eps, eps_p, sigma, dgamma))
    log.debug("completed %d load steps on %d intervals", program.n_steps, n)
    return history


def run(config) -> list[FieldState]:
    """Solve the problem described by a :class:`fracplast.config.RunConfig`."""
    return solve(config.operator_spec(), config.grid(), config.material(), config.load_program())


def nodal_body_force(x: Sequence[float] | np.ndarray, magnitude: float, profile: str = "uniform",
                     fraction: float = 1.0, table=None) -> np.ndarray:
    """Body force at the nodes ``x`` of a bar on ``[0, x[-1]]``.

    ``central_segment`` loads the middle ``fraction`` of the bar only;
    ``table`` linearly interpolates ``(X, b)`` pairs given relative to the bar
    length and scales them by ``magnitude``.
    """
    x = np.asarray(x, dtype=float)
    length = x[-1]
    if profile == "uniform":
        return np.full(x.size, float(magnitude))
    if profile == "central_segment":
        if not 0 < fraction <= 1:
            raise ConfigurationError(f"segment fraction must lie in (0,1], got {fraction!r}")
        lo, hi = 0.5 * length * (1 - fraction), 0.5 * length * (1 + fraction)
        tol = 1e-12 * length
        return np.where((x >= lo - tol) & (x <= hi + tol), float(magnitude), 0.0)
    if profile == "table":
        if table is None or len(table) < 2:
            raise ConfigurationError("table body force needs at least two (X/l, b) rows")
        pts = np.asarray(table, dtype=float)
        return magnitude * np.interp(x / length, pts[:, 0], pts[:, 1])
    raise ConfigurationError(f"unknown body force profile {profile!r}")
