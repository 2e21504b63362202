"""Gaussian heat kernel on R^m, its time derivative, and pointwise bounds.

All functions take the squared distance ``r2 = |x - y|^2`` instead of point
pairs, which makes symmetry and the radial structure structural.  Functions
are vectorized over ``r2``.

Underflow policy: exponents below -700 evaluate to exactly 0, so large-grid
sums stay finite without special number handling.
"""

from __future__ import annotations

import math

import numpy as np

__all__ = [
    "heat_kernel",
    "heat_kernel_dt",
    "kernel_dt_bound_check",
    "kernel_dt_bound_scan",
    "kernel_lower_bound",
]

_EXP_FLOOR = -700.0


def _check_args(m: int, t: float, r2) -> np.ndarray:
    if not (isinstance(m, (int, np.integer)) and m >= 1):
        raise ValueError("dimension m must be a positive integer")
    if not t > 0:
        raise ValueError("kernel time t must be positive")
    r2 = np.asarray(r2, dtype=float)
    if np.any(r2 < 0):
        raise ValueError("squared distance r2 must be non-negative")
    return r2


def _exp_floored(expo: np.ndarray) -> np.ndarray:
    out = np.exp(np.maximum(expo, _EXP_FLOOR))
    return np.where(expo < _EXP_FLOOR, 0.0, out)


def heat_kernel(m: int, t: float, r2):
    """Heat kernel value ``(4 pi t)^(-m/2) * exp(-r2 / (4 t))``."""
    r2 = _check_args(m, t, r2)
    pref = (4.0 * math.pi * t) ** (-0.5 * m)
    val = pref * _exp_floored(-r2 / (4.0 * t))
    return val if val.ndim else float(val)

def heat_kernel_dt(m: int, t: float, r2):
    """Time derivative of the heat kernel.

    Equals ``(1/t) * (-m/2 + r2/(4t)) * heat_kernel(m, t, r2)``; its sign is
    the sign of ``r2 - 2 m t``.
    """
    r2 = _check_args(m, t, r2)
    bracket = (-0.5 * m + r2 / (4.0 * t)) / t
    val = bracket * heat_kernel(m, t, r2)
    return val if np.ndim(val) else float(val)


def kernel_lower_bound(m: int, t: float) -> float:
    """Flat kernel lower bound ``exp(-1/8) * (4 pi t)^(-m/2)``.

    Valid for pairs with ``r2 <= t/2``; in particular throughout a domain of
    diameter ``diam`` whenever ``t >= 2 diam^2``.  The caller enforces the
    validity region.
    """
    if not t > 0:
        raise ValueError("kernel time t must be positive")
    return math.exp(-0.125) * (4.0 * math.pi * t) ** (-0.5 * m)


_BOUND_GRID_SIZE = 2048


def kernel_dt_bound_scan(m: int, t: float, diam: float):
    """Scan the decay bound ``dt p <= -((2m-1)/4) p / t`` over ``r2`` in ``[0, diam^2]``.

    Returns ``(margin, r2_at_min, lhs_at_min, rhs_at_min)`` where the margin
    is the minimum of ``rhs - lhs`` over a 2048-point uniform ``r2`` grid
    including both endpoints.  A non-negative margin certifies the bound on
    the grid; the margin is monotone in ``r2`` so endpoint inclusion makes
    the check conclusive in practice.
    """
    if not diam > 0:
        raise ValueError("diameter must be positive")
    if not t * (1.0 + 1e-9) >= diam * diam:
        raise ValueError(
            f"outside validity region: need t >= diam^2 = {diam * diam:g}, "
            f"got t = {t:g}"
        )
    # The grid top is clamped to t, which only matters within the rounding
    # slack of the precondition; the bound is algebraic for r2 <= t.
    r2 = np.linspace(0.0, min(diam * diam, t), _BOUND_GRID_SIZE)
    p = heat_kernel(m, t, r2)
    # rhs - lhs = (p/t) * (1/4 - r2/(4t)), written so the sign is exact
    # whenever r2 <= t.
    margins = (p / t) * (0.25 - r2 / (4.0 * t))
    k = int(np.argmin(margins))
    lhs = heat_kernel_dt(m, t, r2[k])
    rhs = -((2.0 * m - 1.0) / 4.0) * p[k] / t
    return float(margins[k]), float(r2[k]), float(lhs), float(rhs)


def kernel_dt_bound_check(m: int, t: float, diam: float) -> float:
    """Worst-case margin of the kernel decay bound over the ``r2`` grid.

    Requires ``t >= diam^2``; raises otherwise.
    """
    return kernel_dt_bound_scan(m, t, diam)[0]
