"""Finite-difference time derivatives of heat content with error tracking.

Central differences with Richardson extrapolation.  The base step is
proportional to ``t`` (the bounds of interest are power laws, so the natural
scale is logarithmic); each extrapolation level halves it.  Error estimates
combine the difference of the last two extrapolants with the engine's error
bound amplified by ``1 / step^order`` (``step`` being the base step).

Statistically noisy engines amplify catastrophically under difference
quotients, so estimates carrying a ``statistical_99`` bound are rejected for
orders above one.
"""

from __future__ import annotations

from dataclasses import dataclass

from .engines import Estimate
from .errors import NoisyEngineError

__all__ = [
    "DerivativeEstimate",
    "fd_derivative",
    "SignRow",
    "SignPatternReport",
    "sign_pattern",
]

BASE_STEP_FRACTION = 1e-2


@dataclass(frozen=True)
class DerivativeEstimate:
    """A finite-difference derivative with step and error metadata."""

    order: int
    value: float
    step: float
    error_estimate: float
    richardson_levels: int

    def __post_init__(self):
        if self.error_estimate < 0:
            raise ValueError("error estimates are non-negative")


def _eval(f, t: float, cache: dict):
    if t in cache:
        return cache[t]
    res = f(t)
    if isinstance(res, Estimate):
        out = (res.value, res.error_bound, res.kind)
    else:
        out = (float(res), 0.0, "certified")
    cache[t] = out
    return out


def _stencil(f, t: float, h: float, order: int, cache: dict):
    if order == 1:
        fp, ep, _ = _eval(f, t + h, cache)
        fm, em, _ = _eval(f, t - h, cache)
        return (fp - fm) / (2.0 * h), max(ep, em)
    if order == 2:
        fp, ep, _ = _eval(f, t + h, cache)
        f0, e0, _ = _eval(f, t, cache)
        fm, em, _ = _eval(f, t - h, cache)
        return (fp - 2.0 * f0 + fm) / (h * h), max(ep, e0, em)
    # order 3: five-point central stencil
    fp2, e1, _ = _eval(f, t + 2.0 * h, cache)
    fp1, e2, _ = _eval(f, t + h, cache)
    fm1, e3, _ = _eval(f, t - h, cache)
    fm2, e4, _ = _eval(f, t - 2.0 * h, cache)
    value = (fp2 - 2.0 * fp1 + 2.0 * fm1 - fm2) / (2.0 * h**3)
    return value, max(e1, e2, e3, e4)


def fd_derivative(f, t: float, order: int = 1, levels: int = 2) -> DerivativeEstimate:
    """Estimate the ``order``-th derivative of ``f`` at ``t``.

    ``f`` maps a positive time to an :class:`~heatcontent.engines.Estimate`
    (or a plain float, treated as exact).  ``levels`` counts Richardson
    extrapolation levels (>= 1); the stencil is evaluated ``levels + 1``
    times with halving steps.  The third derivative uses a five-point
    stencil at a single extrapolation level and its error estimate is
    widened tenfold.

    Raises :class:`NoisyEngineError` for statistical engines at order >= 2,
    and ``ValueError`` when the step underflows ``t``.
    """
    if order not in (1, 2, 3):
        raise ValueError("derivative order must be 1, 2 or 3")
    if not t > 0:
        raise ValueError("derivatives are taken at positive times")
    if levels < 1:
        raise ValueError("at least one Richardson level is required")
    if order == 3:
        levels = 1

    cache: dict = {}
    _, _, kind = _eval(f, t, cache)
    if kind == "statistical_99" and order >= 2:
        raise NoisyEngineError(
            f"engine too noisy for requested order {order} "
            "(statistical error amplifies as 1/step^order)"
        )

    h0 = BASE_STEP_FRACTION * t
    smallest = h0 / 2.0**levels
    span = 2.0 * smallest if order == 3 else smallest
    if t + span == t or t - 2.0 * smallest <= 0:
        raise ValueError("requested step underflows t")

    vals = []
    eng_err = 0.0
    for lvl in range(levels + 1):
        v, e = _stencil(f, t, h0 / 2.0**lvl, order, cache)
        vals.append(v)
        eng_err = max(eng_err, e)

    # Richardson table for an even error expansion (central stencils).
    table = [vals[0]]
    prev_best = vals[0]
    for i in range(1, len(vals)):
        row = [vals[i]]
        factor = 1.0
        for j in range(1, i + 1):
            factor *= 4.0
            row.append(row[j - 1] + (row[j - 1] - table[j - 1]) / (factor - 1.0))
        table = row
        extrap_diff = abs(table[-1] - prev_best)
        prev_best = table[-1]

    error = extrap_diff + eng_err / h0**order
    if order == 3:
        error *= 10.0
    return DerivativeEstimate(
        order=order,
        value=table[-1],
        step=h0,
        error_estimate=error,
        richardson_levels=levels,
    )


@dataclass(frozen=True)
class SignRow:
    """Heat content and its first three derivatives at one time point."""

    t: float
    h: float
    h_err: float
    d1: float
    d1_err: float
    d2: float
    d2_err: float
    d3: float
    d3_err: float

    def violations(self) -> tuple:
        """Deviations from the pattern H >= 0, H' <= 0, H'' >= 0, H''' <= 0.

        Each check allows the corresponding error estimate as tolerance.
        """
        bad = []
        if self.h < -self.h_err:
            bad.append(("H", self.h, self.h_err))
        if self.d1 > self.d1_err:
            bad.append(("dH", self.d1, self.d1_err))
        if self.d2 < -self.d2_err:
            bad.append(("d2H", self.d2, self.d2_err))
        if self.d3 > self.d3_err:
            bad.append(("d3H", self.d3, self.d3_err))
        return tuple(bad)


@dataclass(frozen=True)
class SignPatternReport:
    rows: tuple

    @property
    def violations(self) -> tuple:
        out = []
        for row in self.rows:
            for name, value, tol in row.violations():
                out.append((row.t, name, value, tol))
        return tuple(out)

    @property
    def ok(self) -> bool:
        return not self.violations


def sign_pattern(f, t_grid, levels: int = 2) -> SignPatternReport:
    """Evaluate H, H', H'', H''' of ``f`` on a time grid and check signs.

    The expected pattern (value non-negative, derivatives alternating) is
    checked per point with the derivative error estimates as tolerances;
    the report lists every violation.
    """
    t_grid = [float(t) for t in t_grid]
    if not t_grid or any(t <= 0 for t in t_grid):
        raise ValueError("time grid must be non-empty and positive")
    if sorted(t_grid) != t_grid:
        raise ValueError("time grid must be ascending")
    rows = []
    for t in t_grid:
        cache: dict = {}
        h_val, h_err, _ = _eval(f, t, cache)
        d1 = fd_derivative(f, t, 1, levels)
        d2 = fd_derivative(f, t, 2, levels)
        d3 = fd_derivative(f, t, 3, 1)
        rows.append(
            SignRow(
                t=t,
                h=h_val,
                h_err=h_err,
                d1=d1.value,
                d1_err=d1.error_estimate,
                d2=d2.value,
                d2_err=d2.error_estimate,
                d3=d3.value,
                d3_err=d3.error_estimate,
            )
        )
    return SignPatternReport(rows=tuple(rows))
