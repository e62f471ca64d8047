"""Local (classical) elasto-plastic bar, used as an independent oracle.

Second-order central differences for ``U'' = -b/E``, a Thomas tridiagonal
solve, forward/central/backward strain differences and an inline radial
return. Nothing here touches the fractional kernel.
"""

from __future__ import annotations

import numpy as np

from .solver import FieldState

__all__ = ["thomas", "classical_reference"]


def thomas(lower: np.ndarray, diag: np.ndarray, upper: np.ndarray, rhs: np.ndarray) -> np.ndarray:
    """Solve a tridiagonal system; ``lower[0]`` and ``upper[-1]`` are ignored."""
    n = diag.size
    c = np.zeros(n)
    d = np.zeros(n)
    c[0] = upper[0] / diag[0] if n > 1 else 0.0
    d[0] = rhs[0] / diag[0]
    for i in range(1, n):
        denom = diag[i] - lower[i] * c[i - 1]
        c[i] = upper[i] / denom if i < n - 1 else 0.0
        d[i] = (rhs[i] - lower[i] * d[i - 1]) / denom
    x = np.zeros(n)
    x[-1] = d[-1]
    for i in range(n - 2, -1, -1):
        x[i] = d[i] - c[i] * x[i + 1]
    return x


def classical_reference(config) -> list[FieldState]:
    """History of a :class:`fracplast.config.RunConfig` run with ``alpha`` forced to 1.

    The grid spacing is still ``ell / m`` from the configuration.
    """
    n = config.n_intervals
    dx = config.l / n
    E, sigma_Y = config.E, config.sigma_Y
    b = config.body_force_values()
    if config.end_convention == "outward":
        left, right = -config.u_bar, config.u_bar
    else:
        left, right = config.u_bar, config.u_bar

    U = np.zeros(n + 1)
    eps = np.zeros(n + 1)
    eps_p = np.zeros(n + 1)
    history = []
    for step in range(config.n_steps):
        frac = (step + 1) / config.n_steps - step / config.n_steps
        du_l, du_r = frac * left, frac * right
        size = n - 1
        rhs = -frac * b[1:n] / E * dx * dx
        rhs[0] -= du_l
        rhs[-1] -= du_r
        dU_in = thomas(np.ones(size), np.full(size, -2.0), np.ones(size), rhs)
        dU = np.concatenate([[du_l], dU_in, [du_r]])
        U = U + dU

        d_eps = np.empty(n + 1)
        d_eps[0] = (dU[1] - dU[0]) / dx
        d_eps[1:n] = (dU[2:] - dU[:-2]) / (2 * dx)
        d_eps[n] = (dU[n] - dU[n - 1]) / dx

        eps = eps + d_eps
        trial = E * (eps - eps_p)
        f = np.abs(trial) - sigma_Y
        dgamma = np.zeros(n + 1)
        sigma = trial.copy()
        eps_p = eps_p.copy()
        for i in range(n + 1):
            if f[i] > 0:
                dgamma[i] = f[i] / E
                s = 1.0 if trial[i] >= 0 else -1.0
                sigma[i] = trial[i] - dgamma[i] * E * s
                eps_p[i] += dgamma[i] * s
        history.append(FieldState(step + 1, U, eps, eps_p, sigma, dgamma))
    return history
