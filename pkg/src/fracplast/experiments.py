"""Single runs, figure-family sweeps and their flat-file outputs."""

from __future__ import annotations

import csv
import io
import itertools
import json
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .config import RunConfig
from .solver import ConfigurationError, FieldState, SolverError, run

__all__ = [
    "PROFILE_HEADER",
    "PLASTIC_THRESHOLD",
    "PRESETS",
    "SweepSpec",
    "RunSummary",
    "format_value",
    "profile_csv",
    "plastic_zone_width",
    "run_single",
    "write_run",
    "run_sweep",
]

PROFILE_HEADER = ("x", "u", "eps_total", "eps_elastic", "eps_plastic", "sigma")
SUMMARY_HEADER = ("alpha", "ell_fraction", "m", "dx", "peak_eps_p", "plastic_zone_width", "max_U", "status")
PLASTIC_THRESHOLD = 1e-12

_R2_ALPHAS = (0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0)
_ELLS = (0.2, 0.1, 0.02)

# alpha list, ell list, m list
PRESETS: dict[str, tuple[tuple[float, ...], tuple[float, ...], tuple[int, ...]]] = {
    # delta X = ell/m in {0.2, 0.1, 0.02} with m = 2
    "fig-r1": ((1.0,), (0.4, 0.2, 0.04), (2,)),
    "fig-r2": (_R2_ALPHAS, (0.02, 0.1, 0.2), (2,)),
    "fig-r3": ((0.95,), _ELLS, (2, 4, 10)),
    "fig-r4": ((0.5,), _ELLS, (2, 4, 10)),
    "fig-r5": ((0.2,), _ELLS, (2, 4, 10)),
}


def format_value(v: float) -> str:
    """Positional decimal with 17 significant digits."""
    v = float(v) + 0.0  # drop negative zero
    return np.format_float_positional(v, precision=17, unique=False, fractional=False, trim="k")


def profile_csv(x: np.ndarray, state: FieldState) -> str:
    rows = [",".join(PROFILE_HEADER)]
    cols = (x, state.U, state.eps_total, state.eps_elastic, state.eps_plastic, state.sigma)
    for values in zip(*cols):
        rows.append(",".join(format_value(v) for v in values))
    return "\n".join(rows) + "\n"


def plastic_zone_width(eps_plastic: np.ndarray, dx: float) -> float:
    """Node count with ``|eps_p| > 1e-12`` times the grid spacing."""
    return float(np.count_nonzero(np.abs(eps_plastic) > PLASTIC_THRESHOLD)) * dx


def _history_csv(history: Sequence[FieldState], dx: float) -> str:
    rows = ["step,peak_eps_p,plastic_zone_width"]
    for s in history:
        peak = np.abs(s.eps_plastic).max()
        rows.append(f"{s.step},{format_value(peak)},{format_value(plastic_zone_width(s.eps_plastic, dx))}")
    return "\n".join(rows) + "\n"


_PLOT_SCRIPT = '''\
"""Plot eps_p against X from profile_final.csv (run: python plot_profile.py)."""
import csv
from pathlib import Path

import matplotlib.pyplot as plt

here = Path(__file__).resolve().parent
with open(here / "profile_final.csv", newline="") as fh:
    rows = list(csv.DictReader(fh))
x = [float(r["x"]) for r in rows]
eps_p = [float(r["eps_plastic"]) for r in rows]
plt.plot(x, eps_p, marker="o", ms=3)
plt.xlabel("X [m]")
plt.ylabel("plastic strain")
plt.title({title!r})
plt.grid(True, alpha=0.3)
plt.savefig(here / "profile_final.png", dpi=150)
'''


def write_run(config: RunConfig, history: Sequence[FieldState], out_dir: str | os.PathLike) -> Path:
    """Write the result files of a finished run into ``out_dir``."""
    out = Path(out_dir)
    try:
        out.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise OSError(f"cannot create output directory {out}: {exc.strerror}") from exc
    x = config.grid().x
    final = history[-1]
    _write_text(out / "profile_final.csv", profile_csv(x, final))
    _write_text(out / "history.csv", _history_csv(history, config.dx))
    title = f"alpha={config.alpha:g}, ell={config.ell_fraction:g} l, m={config.m}"
    _write_text(out / "plot_profile.py", _PLOT_SCRIPT.format(title=title))
    _write_text(out / "config.json", json.dumps(config.to_dict(), indent=2, sort_keys=True) + "\n")
    return out


def _write_text(path: Path, text: str) -> None:
    with open(path, "w", newline="\n") as fh:
        fh.write(text)


def run_single(config: RunConfig, out_dir: str | os.PathLike | None = None) -> list[FieldState]:
    """Run ``config`` and write its outputs to ``out_dir`` (default ``config.output``)."""
    history = run(config)
    write_run(config, history, config.output if out_dir is None else out_dir)
    return history


@dataclass(frozen=True)
class SweepSpec:
    alphas: tuple[float, ...]
    ells: tuple[float, ...]
    ms: tuple[int, ...]
    base: RunConfig | None = None

    @classmethod
    def preset(cls, name: str, base: RunConfig | None = None) -> "SweepSpec":
        if name not in PRESETS:
            raise ConfigurationError(f"unknown preset {name!r}; choose from {', '.join(PRESETS)}")
        a, l, m = PRESETS[name]
        return cls(a, l, m, base)

    def points(self) -> list[RunConfig]:
        """Validated configurations in sweep order (alpha, then ell, then m)."""
        if not (self.alphas and self.ells and self.ms):
            raise ConfigurationError("empty sweep: alpha, ell and m lists must all be non-empty")
        base = self.base or RunConfig(alpha=1.0, ell_fraction=0.1)
        return [
            base.replace(alpha=float(a), ell_fraction=float(l), m=int(m))
            for a, l, m in itertools.product(self.alphas, self.ells, self.ms)
        ]


@dataclass(frozen=True)
class RunSummary:
    alpha: float
    ell_fraction: float
    m: int
    dx: float
    peak_eps_p: float
    plastic_zone_width: float
    max_U: float
    status: str

    @property
    def name(self) -> str:
        return point_name(self.alpha, self.ell_fraction, self.m)


def point_name(alpha: float, ell: float, m: int) -> str:
    return f"a{alpha:g}_l{ell:g}_m{m}"


def _sweep_point(args: tuple[RunConfig, str]) -> RunSummary:
    config, out_dir = args
    nan = float("nan")
    try:
        history = run_single(config, out_dir)
    except (SolverError, ConfigurationError, FloatingPointError) as exc:
        status = f"failed: {exc}".replace("\n", " ").replace(",", ";")
        return RunSummary(config.alpha, config.ell_fraction, config.m, config.dx, nan, nan, nan, status)
    last = history[-1]
    return RunSummary(
        config.alpha,
        config.ell_fraction,
        config.m,
        config.dx,
        float(np.abs(last.eps_plastic).max()),
        plastic_zone_width(last.eps_plastic, config.dx),
        float(np.abs(last.U).max()),
        "ok",
    )


def _summary_csv(rows: Iterable[RunSummary]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(SUMMARY_HEADER)
    for r in rows:
        w.writerow(
            [
                format_value(r.alpha),
                format_value(r.ell_fraction),
                r.m,
                format_value(r.dx),
                format_value(r.peak_eps_p) if np.isfinite(r.peak_eps_p) else "nan",
                format_value(r.plastic_zone_width) if np.isfinite(r.plastic_zone_width) else "nan",
                format_value(r.max_U) if np.isfinite(r.max_U) else "nan",
                r.status,
            ]
        )
    return buf.getvalue()


def run_sweep(
    spec: SweepSpec, out_root: str | os.PathLike, workers: int | None = None
) -> list[RunSummary]:
    """Run every sweep point into ``out_root/<point>`` and write ``summary.csv``.

    Points are validated before anything runs. ``workers=1`` runs in-process;
    the default uses one worker per available CPU.
    """
    configs = spec.points()
    root = Path(out_root)
    root.mkdir(parents=True, exist_ok=True)
    jobs = [(c, str(root / point_name(c.alpha, c.ell_fraction, c.m))) for c in configs]
    if workers is None:
        workers = len(os.sched_getaffinity(0)) if hasattr(os, "sched_getaffinity") else os.cpu_count() or 1
    workers = max(1, min(workers, len(jobs)))
    if workers == 1:
        results = [_sweep_point(j) for j in jobs]
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_sweep_point, jobs))
    _write_text(root / "summary.csv", _summary_csv(results))
    return results
