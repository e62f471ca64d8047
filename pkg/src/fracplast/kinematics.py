"""Fractional kinematics in one and two dimensions.

Fractional deformation gradients are ``ell**(alpha - 1)`` times the RC
derivative of a motion, taken component by component along each coordinate
axis with the other coordinates frozen. The RC interval is centered at the
point of interest; its half-width defaults to ``ell`` (the choice that makes
rigid rotations come out exactly) but can be set separately to study other
terminals.

Motions are plain callables mapping an ``(N, d)`` array of points to an
``(N, d)`` array of images, sampled exactly at the quadrature nodes.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .kernel import FractionalOperatorSpec, rc_derivative_of_sampled_function

__all__ = [
    "DomainError",
    "SingularTensorError",
    "SampledMotion",
    "DeformationTensors",
    "StrainSet",
    "ObjectivityReport",
    "fractional_gradient",
    "fractional_deformation_gradient",
    "spatial_fractional_deformation_gradient",
    "composite_tensors",
    "rigid_motion_check",
    "objectivity_check",
    "strain_measures",
    "volume_surface_maps",
    "infinitesimal_fractional_strain",
    "rotation",
]

Field = Callable[[np.ndarray], np.ndarray]


class DomainError(ValueError):
    """Quadrature nodes fall outside the region where a motion is defined."""


class SingularTensorError(np.linalg.LinAlgError):
    pass


@dataclass(frozen=True)
class SampledMotion:
    """A motion ``phi`` and optionally its inverse ``varphi``.

    ``domain`` (lower and upper corner) bounds where ``phi`` may be
    evaluated; ``spatial_domain`` does the same for ``varphi``.
    """

    dimension: int
    phi: Field
    varphi: Field | None = None
    domain: tuple | None = None
    spatial_domain: tuple | None = None

    def __post_init__(self):
        if self.dimension not in (1, 2):
            raise ValueError(f"dimension must be 1 or 2, got {self.dimension!r}")

    @classmethod
    def affine(cls, M, c=None) -> "SampledMotion":
        """``phi(X) = M X + c`` with its exact inverse."""
        M = np.atleast_2d(np.asarray(M, dtype=float))
        d = M.shape[0]
        c = np.zeros(d) if c is None else np.asarray(c, dtype=float)
        Minv = np.linalg.inv(M)
        return cls(d, lambda X: X @ M.T + c, lambda x: (x - c) @ Minv.T)


def rotation(theta: float) -> np.ndarray:
    c, s = np.cos(theta), np.sin(theta)
    return np.array([[c, -s], [s, c]])


def _evaluate(fn: Field, pts: np.ndarray, d: int) -> np.ndarray:
    out = np.asarray(fn(pts), dtype=float)
    return out.reshape(pts.shape[0], d)


def fractional_gradient(
    fn: Field,
    point,
    spec: FractionalOperatorSpec,
    dimension: int | None = None,
    *,
    half_interval: float | None = None,
    scheme: str = "central",
    domain: tuple | None = None,
) -> np.ndarray:
    """``G[a, A] = ell**(alpha-1) * RC_A fn_a`` at ``point``.

    ``spec.ell`` is the length scale; the RC interval is
    ``[X_A - half_interval, X_A + half_interval]`` along each axis, with
    ``half_interval`` defaulting to ``spec.ell``.
    """
    X = np.atleast_1d(np.asarray(point, dtype=float))
    d = X.size if dimension is None else dimension
    if X.size != d:
        raise ValueError(f"point has {X.size} coordinates, expected {d}")
    half = spec.ell if half_interval is None else half_interval
    quad = FractionalOperatorSpec(spec.alpha, half, spec.m)
    offsets = np.arange(-(spec.m + 1), spec.m + 2) * quad.h
    scale = spec.ell ** (spec.alpha - 1.0)
    G = np.empty((d, d))
    for A in range(d):
        pts = np.repeat(X[None, :], offsets.size, axis=0)
        pts[:, A] += offsets
        if domain is not None:
            lo, hi = (np.atleast_1d(np.asarray(v, dtype=float)) for v in domain)
            if np.any(pts < lo) or np.any(pts > hi):
                raise DomainError(
                    f"RC interval around {X.tolist()} along axis {A} leaves the sampled domain; extend the sampling"
                )
        values = _evaluate(fn, pts, d)
        for a in range(d):
            G[a, A] = scale * rc_derivative_of_sampled_function(quad, values[:, a], scheme)
    return G


def fractional_deformation_gradient(motion: SampledMotion, point, spec: FractionalOperatorSpec, **kw) -> np.ndarray:
    """Material fractional deformation gradient of ``motion.phi`` at ``point``."""
    kw.setdefault("domain", motion.domain)
    return fractional_gradient(motion.phi, point, spec, motion.dimension, **kw)


def spatial_fractional_deformation_gradient(
    motion: SampledMotion, point, spec: FractionalOperatorSpec, **kw
) -> np.ndarray:
    """Spatial fractional deformation gradient of the inverse motion at spatial ``point``."""
    if motion.varphi is None:
        raise ValueError("motion has no inverse map (varphi)")
    kw.setdefault("domain", motion.spatial_domain)
    return fractional_gradient(motion.varphi, point, spec, motion.dimension, **kw)


@dataclass(frozen=True)
class DeformationTensors:
    F: np.ndarray
    F_tilde_X: np.ndarray
    F_tilde_x: np.ndarray
    F_alpha: np.ndarray
    F_alpha_x: np.ndarray
    F_alpha_X: np.ndarray
    J: float
    J_tilde_X: float
    J_tilde_x: float
    J_alpha: float
    J_alpha_x: float
    J_alpha_X: float


def _inverse(M: np.ndarray, name: str) -> np.ndarray:
    M = np.asarray(M, dtype=float)
    if not np.all(np.isfinite(M)):
        raise SingularTensorError(f"{name} has non-finite entries")
    if np.linalg.cond(M) > 1e13:
        raise SingularTensorError(f"{name} is singular (condition number {np.linalg.cond(M):.3e})")
    return np.linalg.inv(M)


def composite_tensors(F_tilde_X, F_tilde_x, F_classical) -> DeformationTensors:
    """Mixed fractional tensors built from the two fractional gradients and ``F``."""
    F_tilde_X = np.atleast_2d(np.asarray(F_tilde_X, dtype=float))
    F_tilde_x = np.atleast_2d(np.asarray(F_tilde_x, dtype=float))
    F = np.atleast_2d(np.asarray(F_classical, dtype=float))
    F_inv = _inverse(F, "F (classical deformation gradient)")
    Fx_inv = _inverse(F_tilde_x, "F_tilde_x (spatial fractional gradient)")
    _inverse(F_tilde_X, "F_tilde_X (material fractional gradient)")
    F_alpha = F_tilde_X @ F_inv @ Fx_inv
    F_alpha_x = F_tilde_x @ F
    F_alpha_X = F_tilde_X @ F_inv
    det = lambda M: float(np.linalg.det(M))
    return DeformationTensors(
        F=F,
        F_tilde_X=F_tilde_X,
        F_tilde_x=F_tilde_x,
        F_alpha=F_alpha,
        F_alpha_x=F_alpha_x,
        F_alpha_X=F_alpha_X,
        J=det(F),
        J_tilde_X=det(F_tilde_X),
        J_tilde_x=det(F_tilde_x),
        J_alpha=det(F_alpha),
        J_alpha_x=det(F_alpha_x),
        J_alpha_X=det(F_alpha_X),
    )


def rigid_motion_check(
    R, spec: FractionalOperatorSpec, interval_length: float | None = None, point=None
) -> float:
    """Max-norm deviation of the fractional gradient of ``X -> R X`` from ``R``.

    The RC interval length defaults to ``2 * spec.ell``.
    """
    R = np.atleast_2d(np.asarray(R, dtype=float))
    d = R.shape[0]
    L = 2.0 * spec.ell if interval_length is None else interval_length
    point = np.zeros(d) if point is None else point
    G = fractional_gradient(lambda X: X @ R.T, point, spec, d, half_interval=L / 2.0)
    return float(np.abs(G - R).max())


@dataclass(frozen=True)
class ObjectivityReport:
    """Residuals of the transformation rules under a superposed rotation ``Q``."""

    F: float
    F_tilde_X: float
    F_tilde_x: float
    F_alpha: float
    F_alpha_X: float
    F_alpha_x: float

    def as_dict(self) -> dict[str, float]:
        return dict(self.__dict__)

    @property
    def max(self) -> float:
        return max(self.as_dict().values())


def objectivity_check(tensors: DeformationTensors, Q) -> ObjectivityReport:
    """Recompute the composite tensors in the rotated frame and compare with the rules.

    Residuals are relative max-norm differences.
    """
    Q = np.atleast_2d(np.asarray(Q, dtype=float))
    d = Q.shape[0]
    if not np.allclose(Q.T @ Q, np.eye(d), atol=1e-12) or np.linalg.det(Q) <= 0:
        raise ValueError("Q must be proper orthogonal (Q^T Q = I, det Q = +1)")
    Q_inv = np.linalg.inv(Q)
    star = composite_tensors(Q @ tensors.F_tilde_X, tensors.F_tilde_x @ Q_inv, Q @ tensors.F)

    def rel(a, b):
        return float(np.abs(a - b).max() / max(np.abs(b).max(), 1e-300))

    return ObjectivityReport(
        F=rel(star.F, Q @ tensors.F),
        F_tilde_X=rel(star.F_tilde_X, Q @ tensors.F_tilde_X),
        F_tilde_x=rel(star.F_tilde_x, tensors.F_tilde_x @ Q.T),
        F_alpha=rel(star.F_alpha, Q @ tensors.F_alpha),
        F_alpha_X=rel(star.F_alpha_X, Q @ tensors.F_alpha_X @ Q.T),
        F_alpha_x=rel(star.F_alpha_x, tensors.F_alpha_x),
    )


@dataclass(frozen=True)
class StrainSet:
    E: np.ndarray
    e: np.ndarray
    C: np.ndarray
    c: np.ndarray
    eps_inf: np.ndarray
    roundtrip_residual: float


def strain_measures(F_diamond) -> StrainSet:
    """Green-Lagrange and Euler-Almansi type strains for any of the four gradients.

    ``roundtrip_residual`` is the larger of the pull-back and push-forward
    mismatches, relative to ``|E|`` and ``|e|``.
    """
    Fd = np.atleast_2d(np.asarray(F_diamond, dtype=float))
    I = np.eye(Fd.shape[0])
    Finv = _inverse(Fd, "F_diamond")
    C = Fd.T @ Fd
    c = Finv.T @ Finv
    E = 0.5 * (C - I)
    e = 0.5 * (I - c)
    pull = Fd.T @ e @ Fd
    push = Finv.T @ E @ Finv
    residual = max(
        np.abs(pull - E).max() / max(np.abs(E).max(), 1.0),
        np.abs(push - e).max() / max(np.abs(e).max(), 1.0),
    )
    G = Fd - I
    return StrainSet(E=E, e=e, C=C, c=c, eps_inf=0.5 * (G + G.T), roundtrip_residual=float(residual))


def volume_surface_maps(F_diamond, dV: float, dS) -> tuple[float, np.ndarray]:
    """``dv = det(F) dV`` and ``ds = det(F) F^-T dS``."""
    Fd = np.atleast_2d(np.asarray(F_diamond, dtype=float))
    Finv = _inverse(Fd, "F_diamond")
    J = float(np.linalg.det(Fd))
    return J * dV, J * Finv.T @ np.atleast_1d(np.asarray(dS, dtype=float))


def infinitesimal_fractional_strain(
    displacement: Field, point, spec: FractionalOperatorSpec, dimension: int | None = None, **kw
) -> np.ndarray:
    """Symmetric part of the fractional displacement gradient."""
    G = fractional_gradient(displacement, point, spec, dimension, **kw)
    return 0.5 * (G + G.T)
