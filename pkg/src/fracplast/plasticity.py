"""One-dimensional rate-independent perfect plasticity with radial return."""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

__all__ = [
    "MaterialParams",
    "PointState",
    "elastic_trial",
    "return_map",
    "update_point",
    "update_field",
]


@dataclass(frozen=True)
class MaterialParams:
    """Young's modulus ``E`` and flow stress ``sigma_Y``, both in Pa.

    ``sigma_Y = inf`` gives a purely elastic material.
    """

    E: float = 205e9
    sigma_Y: float = 1200e6

    def __post_init__(self):
        if not (self.E > 0 and math.isfinite(self.E)):
            raise ValueError(f"E must be positive and finite, got {self.E!r}")
        if not self.sigma_Y > 0:
            raise ValueError(f"sigma_Y must be positive, got {self.sigma_Y!r}")


@dataclass(frozen=True)
class PointState:
    eps_total: float = 0.0
    eps_plastic: float = 0.0
    sigma: float = 0.0
    dgamma_last: float = 0.0

    @property
    def eps_elastic(self) -> float:
        return self.eps_total - self.eps_plastic


def elastic_trial(state: PointState, d_eps: float, params: MaterialParams) -> tuple[float, float]:
    """Trial stress for the strain increment with plastic strain frozen, and its yield value."""
    sigma_trial = params.E * (state.eps_total + d_eps - state.eps_plastic)
    return sigma_trial, abs(sigma_trial) - params.sigma_Y


def return_map(sigma_trial: float, f_trial: float, state: PointState, params: MaterialParams) -> PointState:
    """Project a plastic trial state back onto the yield surface.

    ``state`` must already carry the updated total strain.
    """
    if not f_trial > 0:
        raise ValueError(f"return_map requires a plastic trial state (f_trial > 0), got {f_trial!r}")
    dgamma = f_trial / params.E
    sign = math.copysign(1.0, sigma_trial)
    return replace(
        state,
        eps_plastic=state.eps_plastic + dgamma * sign,
        sigma=sigma_trial - dgamma * params.E * sign,
        dgamma_last=dgamma,
    )


def update_point(state: PointState, d_eps: float, params: MaterialParams) -> PointState:
    sigma_trial, f_trial = elastic_trial(state, d_eps, params)
    trial = replace(state, eps_total=state.eps_total + d_eps, sigma=sigma_trial, dgamma_last=0.0)
    if f_trial <= 0:
        return trial
    return return_map(sigma_trial, f_trial, trial, params)


def update_field(
    eps_total: np.ndarray, eps_plastic: np.ndarray, d_eps: np.ndarray, params: MaterialParams
) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    """Vectorized :func:`update_point` over independent nodes.

    Returns ``(eps_total, eps_plastic, sigma, dgamma)`` as new arrays.
    """
    eps_new = eps_total + d_eps
    sigma_trial = params.E * (eps_new - eps_plastic)
    f_trial = np.abs(sigma_trial) - params.sigma_Y
    plastic = f_trial > 0
    dgamma = np.where(plastic, f_trial / params.E, 0.0)
    sign = np.copysign(1.0, sigma_trial)
    sigma = np.where(plastic, sigma_trial - dgamma * params.E * sign, sigma_trial)
    eps_p = np.where(plastic, eps_plastic + dgamma * sign, eps_plastic)
    return eps_new, eps_p, sigma, dgamma
