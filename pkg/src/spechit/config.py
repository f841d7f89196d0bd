"""Numerical tolerances and size caps.

All tolerances live here rather than being scattered through the code:
construction-time checks are tighter (1e-12) than verification-time
checks (1e-10), and eigensolve-derived quantities get 1e-8.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, replace
from importlib import resources


@dataclass(frozen=True)
class Config:
    # construction-time validation
    row_sum_tol: float = 1e-12
    # verification-time identities (stationarity, detailed balance, ...)
    verify_tol: float = 1e-10
    # quantities that pass through a dense eigensolver
    eigen_tol: float = 1e-8
    # entrywise equality of matrices built two ways
    exact_tol: float = 1e-14
    # exhaustive subset enumeration is refused above this state count
    enum_cap: int = 14
    # dense linear algebra is used up to this state count; sparse/iterative above
    dense_cap: int = 4096
    # relative bisection tolerance for rel_geom and continuous mixing times
    bisect_rtol: float = 1e-6
    # per-trajectory step-cap multiplier for Monte-Carlo oracles
    mc_cap_factor: int = 200


DEFAULT = Config()


def with_enum_cap(cap: int) -> Config:
    return replace(DEFAULT, enum_cap=cap)


def load_calibrated_bands() -> dict:
    """Calibrated acceptance bands, recomputed by scripts/pilot_bands.py."""
    with resources.files("spechit.data").joinpath("calibrated_bands.json").open() as fh:
        return json.load(fh)
