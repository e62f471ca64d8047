"""Invariant battery behind ``fracplast verify``.

Every check returns a worst-case residual and a tolerance. Values are drawn
from a fixed seed, so the report is reproducible.
"""

from __future__ import annotations

import contextlib
import math
from dataclasses import dataclass
from typing import Callable, Iterator, TextIO

import numpy as np

from . import kernel
from .classical import classical_reference
from .config import RunConfig
from .kernel import FractionalOperatorSpec, caputo_left, rc_derivative_of_sampled_function, stencil_coefficients
from .kinematics import (
    SampledMotion,
    composite_tensors,
    fractional_deformation_gradient,
    objectivity_check,
    rigid_motion_check,
    rotation,
    strain_measures,
)
from .plasticity import MaterialParams, update_field
from .solver import equilibrium_stencil, run, strain_stencil

__all__ = ["CheckResult", "perturb_weights", "run_checks", "format_report", "CHECKS"]

SEED = 20240601


@dataclass(frozen=True)
class CheckResult:
    name: str
    residual: float
    tolerance: float

    @property
    def passed(self) -> bool:
        return bool(np.isfinite(self.residual) and self.residual <= self.tolerance)


@contextlib.contextmanager
def perturb_weights(relative: float) -> Iterator[None]:
    """Scale every trapezoidal weight by ``1 + relative`` while the block runs."""
    original = kernel._base_weights

    def perturbed(alpha, m):
        return original(alpha, m) * (1.0 + relative)

    kernel._base_weights = perturbed
    try:
        yield
    finally:
        kernel._base_weights = original


def _rng() -> np.random.Generator:
    return np.random.default_rng(SEED)


def check_caputo_constant() -> float:
    worst = 0.0
    for alpha in np.linspace(0.1, 1.0, 10):
        for m in (2, 4, 10):
            spec = FractionalOperatorSpec(alpha, 0.1, m)
            worst = max(worst, abs(caputo_left(spec, np.zeros(m + 1))))
            f = np.full(2 * m + 3, 3.7)
            worst = max(worst, abs(rc_derivative_of_sampled_function(spec, f)))
    return worst


def check_rc_identity() -> float:
    worst = 0.0
    for alpha in np.linspace(0.1, 1.0, 10):
        for m in (2, 4, 10, 100):
            spec = FractionalOperatorSpec(alpha, 0.1, m)
            t = np.arange(-(m + 1), m + 2) * spec.h
            g = spec.ell ** (alpha - 1) * rc_derivative_of_sampled_function(spec, t)
            worst = max(worst, abs(g - 1.0))
    return worst


def check_alpha_one_coefficients() -> float:
    sc = stencil_coefficients(FractionalOperatorSpec(1.0, 0.3, 6))
    return max(abs(sc.A - 1), abs(sc.B), np.abs(sc.C).max(), np.abs(sc.D).max(), abs(sc.E - 0.5))


def _closed_form_m2(alpha: float, ell: float) -> dict[str, np.ndarray]:
    # closed forms for m = 2, independent of the weight routine
    dx = ell / 2
    B = 1.0 - alpha * 2.0 ** (1 - alpha)
    C = D = 2.0 ** (2 - alpha) - 2.0
    A = dx ** (1 - alpha) / math.gamma(3 - alpha)
    F = ell ** (alpha - 1) * 0.5 * math.gamma(2 - alpha) * A
    return {
        "equilibrium": F / dx**2 * np.array([B, C - 2 * B, B - 2 * C + 2, C + D - 4, B - 2 * D + 2, D - 2 * B, B]),
        "left_boundary": F / dx * np.array([0, -B, B - C, C - 2, 2 - D, D - B, B]),
        "interior": F / (2 * dx) * np.array([-B, -C, B - 2, C - D, 2 - B, D, B]),
        "right_boundary": F / dx * np.array([-B, B - C, C - 2, 2 - D, D - B, B, 0]),
    }


def check_closed_form_stencils() -> float:
    worst = 0.0
    for alpha in _rng().uniform(0.0, 1.0, 20):
        spec = FractionalOperatorSpec(alpha, 0.13, 2)
        for name, want in _closed_form_m2(alpha, 0.13).items():
            got = equilibrium_stencil(spec) if name == "equilibrium" else strain_stencil(spec, name)
            worst = max(worst, np.abs(got - want).max() / np.abs(want).max())
    return worst


def check_affine_exactness() -> float:
    rng = _rng()
    worst = 0.0
    for _ in range(20):
        M = np.eye(2) + 0.5 * rng.normal(size=(2, 2))
        mot = SampledMotion.affine(M, rng.normal(size=2))
        spec = FractionalOperatorSpec(rng.uniform(0.05, 1.0), rng.uniform(0.05, 0.5), int(rng.integers(2, 12)))
        G = fractional_deformation_gradient(mot, rng.normal(size=2), spec)
        worst = max(worst, np.abs(G - M).max())
    return worst


def check_rigid_body() -> float:
    rng = _rng()
    worst = 0.0
    for _ in range(10):
        R = rotation(rng.uniform(0, 2 * np.pi))
        spec = FractionalOperatorSpec(rng.uniform(0.05, 1.0), rng.uniform(0.05, 0.5), int(rng.integers(2, 11)))
        worst = max(worst, rigid_motion_check(R, spec))
    return worst


def check_rigid_body_length_scale() -> float:
    """Deviation for the interval length 2*ell must match |2^(alpha-1) - 1| max|R|."""
    worst = 0.0
    for alpha in (0.2, 0.5, 0.8):
        R = rotation(0.7)
        spec = FractionalOperatorSpec(alpha, 0.2, 2)
        dev = rigid_motion_check(R, spec, interval_length=spec.ell)
        worst = max(worst, abs(dev - abs(2 ** (alpha - 1) - 1) * np.abs(R).max()))
    return worst


def check_objectivity() -> float:
    rng = _rng()
    worst = 0.0
    for _ in range(20):
        t = composite_tensors(*(np.eye(2) + 0.3 * rng.normal(size=(2, 2)) for _ in range(3)))
        worst = max(worst, objectivity_check(t, rotation(rng.uniform(0, 2 * np.pi))).max)
    return worst


def check_strain_roundtrip() -> float:
    rng = _rng()
    worst = 0.0
    for _ in range(50):
        F = np.eye(2) + 0.3 * rng.normal(size=(2, 2))
        worst = max(worst, strain_measures(F).roundtrip_residual)
    return worst


def check_alpha_one_gradient() -> float:
    def phi(X):
        return np.column_stack([X[:, 0] + 0.1 * X[:, 0] ** 2, X[:, 1] + 0.2 * np.sin(X[:, 0])])

    X = np.array([0.4, -0.3])
    F = np.array([[1 + 0.2 * X[0], 0.0], [0.2 * np.cos(X[0]), 1.0]])
    G = fractional_deformation_gradient(SampledMotion(2, phi), X, FractionalOperatorSpec(1.0, 1e-3, 2))
    return np.abs(G - F).max()


def check_alpha_one_composites() -> float:
    F = np.array([[1.2, 0.1], [-0.05, 0.9]])
    t = composite_tensors(F, np.linalg.inv(F), F)
    I = np.eye(2)
    return max(np.abs(t.F_alpha - F).max(), np.abs(t.F_alpha_x - I).max(), np.abs(t.F_alpha_X - I).max())


def check_alpha_one_bar() -> float:
    cfg = RunConfig(alpha=1.0, ell_fraction=0.2, n_steps=20)
    worst = 0.0
    for a, b in zip(run(cfg), classical_reference(cfg)):
        for name in ("U", "eps_plastic", "sigma"):
            x, y = getattr(a, name), getattr(b, name)
            worst = max(worst, np.abs(x - y).max() / max(np.abs(y).max(), 1e-300))
    return worst


def check_kkt() -> float:
    """Worst violation of dgamma >= 0, f <= 0, dgamma * f = 0 and sign equivariance."""
    rng = _rng()
    params = MaterialParams()
    n = 1000
    eps = np.zeros(n)
    eps_p = np.zeros(n)
    eps_m = np.zeros(n)
    eps_pm = np.zeros(n)
    worst = 0.0
    for _ in range(30):
        d = rng.normal(scale=2e-3, size=n)
        eps, eps_p, sigma, dg = update_field(eps, eps_p, d, params)
        eps_m, eps_pm, sigma_m, _ = update_field(eps_m, eps_pm, -d, params)
        f = np.abs(sigma) - params.sigma_Y
        worst = max(
            worst,
            max(0.0, -dg.min()) * params.E / params.sigma_Y,
            max(0.0, f.max()) / params.sigma_Y,
            np.abs(dg * params.E * f).max() / params.sigma_Y**2,
            np.abs(sigma + sigma_m).max() / params.sigma_Y,
        )
    return worst


CHECKS: tuple[tuple[str, Callable[[], float], float], ...] = (
    ("caputo of constant", check_caputo_constant, 1e-14),
    ("RC identity ell^(alpha-1) RC[t] = 1", check_rc_identity, 1e-10),
    ("alpha=1 kernel coefficients", check_alpha_one_coefficients, 1e-15),
    ("closed-form m=2 stencils", check_closed_form_stencils, 1e-13),
    ("affine exactness", check_affine_exactness, 1e-10),
    ("rigid body, ell = L/2", check_rigid_body, 1e-10),
    ("rigid body, ell = L deviation formula", check_rigid_body_length_scale, 1e-12),
    ("objectivity residuals", check_objectivity, 1e-12),
    ("strain round-trip", check_strain_roundtrip, 1e-12),
    ("alpha=1 gradient vs classical", check_alpha_one_gradient, 1e-7),
    ("alpha=1 composite tensors", check_alpha_one_composites, 1e-14),
    ("alpha=1 bar vs classical reference", check_alpha_one_bar, 1e-10),
    ("plasticity KKT and sign equivariance", check_kkt, 1e-10),
)


def run_checks(perturbation: float = 0.0) -> list[CheckResult]:
    results = []
    ctx = perturb_weights(perturbation) if perturbation else contextlib.nullcontext()
    with ctx:
        for name, fn, tol in CHECKS:
            try:
                residual = float(fn())
            except Exception:  # a crashing check is a failing check
                residual = float("inf")
            results.append(CheckResult(name, residual, tol))
    return results


def format_report(results: list[CheckResult], out: TextIO) -> None:
    width = max(len(r.name) for r in results)
    out.write(f"{'check':<{width}}  {'residual':>10}  {'tolerance':>9}  result\n")
    for r in results:
        out.write(f"{r.name:<{width}}  {r.residual:10.3e}  {r.tolerance:9.1e}  {'PASS' if r.passed else 'FAIL'}\n")
    failed = sum(not r.passed for r in results)
    out.write(f"{len(results) - failed}/{len(results)} checks passed\n")
