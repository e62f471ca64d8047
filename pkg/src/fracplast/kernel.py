"""Riesz-Caputo fractional derivative on a finite symmetric interval.

The left and right Caputo derivatives of order ``0 < alpha <= 1`` are
approximated with the modified (product) trapezoidal rule on ``m`` equal
subintervals of each half-interval. The Riesz-Caputo (RC) derivative at a
point ``X`` combines both sides over ``[X - ell, X + ell]``::

    RC f(X) = E * (leftCaputo f(X) - rightCaputo f(X)),   E = Gamma(2 - alpha) / 2

where the right derivative already carries its ``(-1)`` sign. All quadrature
weights multiply classical first derivatives ``f'`` sampled on the
``2m + 1`` equispaced nodes of the interval.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Literal

import numpy as np

__all__ = [
    "FractionalOperatorSpec",
    "StencilCoefficients",
    "stencil_coefficients",
    "caputo_left_weights",
    "caputo_right_weights",
    "caputo_left",
    "caputo_right",
    "rc_derivative_from_fprime",
    "rc_derivative_of_sampled_function",
    "inner_derivatives",
]

Scheme = Literal["forward", "central", "backward"]
SCHEMES = ("forward", "central", "backward")


@dataclass(frozen=True)
class FractionalOperatorSpec:
    """Order, length scale and quadrature resolution of the nonlocal operator.

    ``ell`` is half the integration interval, so the interval length is
    ``2 * ell`` and the quadrature step is ``ell / m``.
    """

    alpha: float
    ell: float
    m: int

    def __post_init__(self):
        if not (0.0 < self.alpha <= 1.0) or not math.isfinite(self.alpha):
            raise ValueError(f"alpha must lie in (0,1], got {self.alpha!r}")
        if not (self.ell > 0.0) or not math.isfinite(self.ell):
            raise ValueError(f"ell must be positive and finite, got {self.ell!r}")
        if int(self.m) != self.m or self.m < 2:
            raise ValueError(f"m must be an integer >= 2, got {self.m!r}")
        object.__setattr__(self, "m", int(self.m))

    @property
    def n(self) -> int:
        """Integer order above ``alpha``; always 1 here."""
        return 1

    @property
    def h(self) -> float:
        return self.ell / self.m

    @property
    def interval_length(self) -> float:
        return 2.0 * self.ell


@dataclass(frozen=True)
class StencilCoefficients:
    """Scalar factors and middle weights of the discretized RC derivative.

    ``C[j-1]`` is the left weight at quadrature node ``j`` and ``D[j-1]``
    the right weight at node ``j`` (counted from the evaluation point), for
    ``j = 1 .. m-1``.
    """

    A: float
    B: float
    C: np.ndarray
    D: np.ndarray
    E: float
    F: float


def _base_weights(alpha: float, m: int) -> np.ndarray:
    """Left-sided trapezoidal weights ``w_0 .. w_m`` (node ``m`` is the evaluation point)."""
    p = 2.0 - alpha  # n - alpha + 1 with n = 1
    w = np.empty(m + 1)
    w[0] = (m - 1) ** p - (m - 2.0 + alpha) * m ** (1.0 - alpha)
    k = m - np.arange(1, m, dtype=float)
    w[1:m] = (k + 1.0) ** p - 2.0 * k**p + (k - 1.0) ** p
    w[m] = 1.0
    return w


def caputo_left_weights(spec: FractionalOperatorSpec) -> np.ndarray:
    """Weights over nodes ``a = X_0 .. X_m = X``; the factor ``A`` is not folded in."""
    return _base_weights(spec.alpha, spec.m)


def caputo_right_weights(spec: FractionalOperatorSpec) -> np.ndarray:
    """Weights over nodes ``X = X_0 .. X_m = b``, the mirror image of the left weights.

    The right Caputo derivative is ``-A * sum(v * f')``; the sign is applied
    in :func:`caputo_right`, not here.
    """
    return _base_weights(spec.alpha, spec.m)[::-1].copy()


def stencil_coefficients(spec: FractionalOperatorSpec) -> StencilCoefficients:
    alpha, m = spec.alpha, spec.m
    A = spec.h ** (1.0 - alpha) / math.gamma(3.0 - alpha)
    E = 0.5 * math.gamma(2.0 - alpha) / math.gamma(2.0)
    w = caputo_left_weights(spec)
    v = caputo_right_weights(spec)
    return StencilCoefficients(
        A=A,
        B=float(w[0]),
        C=w[1:m].copy(),
        D=v[1:m].copy(),
        E=E,
        F=spec.ell ** (alpha - 1.0) * E * A,
    )


def _check_length(samples, expected: int, what: str) -> np.ndarray:
    arr = np.asarray(samples, dtype=float)
    if arr.ndim != 1 or arr.size != expected:
        raise ValueError(f"{what} must be a vector of length {expected}, got shape {arr.shape}")
    return arr


def caputo_left(spec: FractionalOperatorSpec, fprime_samples) -> float:
    """Left Caputo derivative at the last node from ``f'`` on ``m + 1`` nodes."""
    fp = _check_length(fprime_samples, spec.m + 1, "fprime_samples")
    A = spec.h ** (1.0 - spec.alpha) / math.gamma(3.0 - spec.alpha)
    return A * float(caputo_left_weights(spec) @ fp)


def caputo_right(spec: FractionalOperatorSpec, fprime_samples) -> float:
    """Right Caputo derivative at the first node from ``f'`` on ``m + 1`` nodes."""
    fp = _check_length(fprime_samples, spec.m + 1, "fprime_samples")
    A = spec.h ** (1.0 - spec.alpha) / math.gamma(3.0 - spec.alpha)
    return -A * float(caputo_right_weights(spec) @ fp)


def rc_derivative_from_fprime(spec: FractionalOperatorSpec, fprime_samples) -> float:
    """RC derivative at the center of ``2m + 1`` samples of ``f'``.

    The center sample (index ``m``) is the evaluation point; the left
    operator uses samples ``0..m`` and the right one ``m..2m``.
    """
    m = spec.m
    fp = _check_length(fprime_samples, 2 * m + 1, "fprime_samples")
    E = 0.5 * math.gamma(2.0 - spec.alpha) / math.gamma(2.0)
    return E * (caputo_left(spec, fp[: m + 1]) - caputo_right(spec, fp[m:]))


def inner_derivatives(f_samples, h: float, scheme: Scheme) -> np.ndarray:
    """Classical first derivatives at the ``len(f) - 2`` inner nodes of ``f``.

    ``f`` is sampled with spacing ``h`` on one extra node at each end; the
    forward scheme ignores the first sample and the backward scheme the last.
    """
    f = np.asarray(f_samples, dtype=float)
    if scheme == "central":
        return (f[2:] - f[:-2]) / (2.0 * h)
    if scheme == "forward":
        return (f[2:] - f[1:-1]) / h
    if scheme == "backward":
        return (f[1:-1] - f[:-2]) / h
    raise ValueError(f"unknown finite-difference scheme {scheme!r}; expected one of {SCHEMES}")


def rc_derivative_of_sampled_function(
    spec: FractionalOperatorSpec, f_samples, scheme: Scheme = "central"
) -> float:
    """RC derivative at the center of ``2m + 3`` samples of ``f`` spaced ``ell / m``.

    ``f'`` at each of the ``2m + 1`` quadrature nodes comes from the chosen
    classical difference, applied uniformly.
    """
    f = _check_length(f_samples, 2 * spec.m + 3, "f_samples")
    return rc_derivative_from_fprime(spec, inner_derivatives(f, spec.h, scheme))
