"""Catalog of heat-content decay and convexity bounds, and their verification.

Each case states, for a bounded open set of dimension ``m``, volume ``V``,
diameter ``D``, a bound of the form ``lhs <= rhs`` or ``lhs >= rhs`` valid on
a time window expressed in multiples of ``D^2``:

=========  =====================================================  ==============
case id    statement                                              window
=========  =====================================================  ==============
I04        pointwise kernel decay:  dp/dt <= -((2m-1)/4) p/t      [D^2, inf)
I05        H'(t) <= -((2m-1)/4) H(t)/t                            [D^2, inf)
I06        H''(t) >= ((2m-1)/2)^2 H(t)/t^2                        [2D^2, inf)
I07        H(t)  >= e^(-1/8) V^2 (4 pi t)^(-m/2)                  [2D^2, inf)
I08        H''(t) >= ((2m-1)/2)^2 e^(-1/8)(4pi)^(-m/2) V^2
                     * t^(-m/2-2)                                  [2D^2, inf)
I09        H'(t) <= -(m/2+1)^(-1) ((2m-1)/2)^2 e^(-1/8)
                     * (4pi)^(-m/2) V^2 t^(-m/2-1)                 [2D^2, inf)
I010       H'(t) <= (I09 right side frozen at t = 2D^2)           (0, 2D^2]
I011       H''(t) >= ((2m-1)/2)^2 e^(-1/8)(4pi)^(-m/2) V^2
                     * (2D^2)^(-m/2-2)                             (0, 2D^2]
BG24_MONO  H'(t) <= -(4m^2+4m-7)/(8(m+2)e^(1/4)) H(t)/t           [D^2, inf)
BG24_CONV  H''(t) >= (4m^2+4m-7)/16 H(t)/t^2                      [D^2, inf)
=========  =====================================================  ==============

The I-family carries the improved constants ((2m-1)/4 monotonicity,
((2m-1)/2)^2 convexity); the BG24 pair is the earlier baseline used for the
constant comparison.  Margins are direction-signed (rhs-lhs for <=, lhs-rhs
for >=), so non-negative means the bound holds.

Tolerance policy: a row passes when its margin exceeds minus (propagated
engine error + derivative error estimate + 1e-9 absolute floor).  The
bounds are analytic claims; a failure beyond propagated numerical error is
a genuine counterexample, and the verdict reports it as such.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .derivatives import fd_derivative
from .engines import EngineHandle, GridConfig, MCConfig, make_engine
from .geometry import Domain
from .kernel import kernel_dt_bound_scan

__all__ = [
    "CASE_IDS",
    "InequalityCase",
    "VerificationRow",
    "VerificationReport",
    "improved_constants",
    "bg24_constants",
    "compare_constants",
    "ConstantsRow",
    "sharpness_compare",
    "SharpnessVerdict",
    "build_case",
    "verify",
    "standard_t_grid",
]

CASE_IDS = (
    "I04",
    "I05",
    "I06",
    "I07",
    "I08",
    "I09",
    "I010",
    "I011",
    "BG24_MONO",
    "BG24_CONV",
)

TOLERANCE_FLOOR = 1e-9
_E8 = math.exp(-0.125)


def improved_constants(m: int) -> tuple[float, float]:
    """Improved (monotonicity, convexity) constants: (2m-1)/4 and ((2m-1)/2)^2."""
    if not (isinstance(m, (int, np.integer)) and m >= 1):
        raise ValueError("dimension m must be a positive integer")
    return (2.0 * m - 1.0) / 4.0, ((2.0 * m - 1.0) / 2.0) ** 2


def bg24_constants(m: int) -> tuple[float, float]:
    """Baseline (monotonicity, convexity) constants.

    Monotonicity ``(4m^2+4m-7) / (8(m+2)e^(1/4))`` and convexity
    ``(4m^2+4m-7)/16``.
    """
    if not (isinstance(m, (int, np.integer)) and m >= 1):
        raise ValueError("dimension m must be a positive integer")
    q = 4.0 * m * m + 4.0 * m - 7.0
    return q / (8.0 * (m + 2.0) * math.exp(0.25)), q / 16.0


@dataclass(frozen=True)
class ConstantsRow:
    m: int
    improved_mono: float
    bg24_mono: float
    ratio_mono: float
    improved_conv: float
    bg24_conv: float
    ratio_conv: float
    integrated_sharper: bool


def compare_constants(m_range) -> list[ConstantsRow]:
    """Ratio table improved/baseline for each dimension in ``m_range``."""
    rows = []
    for m in m_range:
        imp_mono, imp_conv = improved_constants(m)
        bg_mono, bg_conv = bg24_constants(m)
        rows.append(
            ConstantsRow(
                m=int(m),
                improved_mono=imp_mono,
                bg24_mono=bg_mono,
                ratio_mono=imp_mono / bg_mono,
                improved_conv=imp_conv,
                bg24_conv=bg_conv,
                ratio_conv=imp_conv / bg_conv,
                integrated_sharper=sharpness_compare(m).integrated_sharper,
            )
        )
    return rows


@dataclass(frozen=True)
class SharpnessVerdict:
    """Comparison of the two routes to the decay rate of H'.

    ``c_integrated`` is the I09 coefficient ``(2m-1)^2 / (2(m+2))`` obtained
    by integrating the convexity bound; ``c_direct`` is the coefficient
    ``(2m-1)/4`` obtained by combining I05 with the kernel lower bound.
    Both multiply the same power of t, so the larger coefficient is the
    sharper statement.
    """

    m: int
    c_direct: float
    c_integrated: float
    integrated_sharper: bool


def sharpness_compare(m: int) -> SharpnessVerdict:
    """Whether the integrated decay bound beats the direct one (true iff m >= 2)."""
    if not (isinstance(m, (int, np.integer)) and m >= 1):
        raise ValueError("dimension m must be a positive integer")
    c_direct = (2.0 * m - 1.0) / 4.0
    c_integrated = (2.0 * m - 1.0) ** 2 / (2.0 * (m + 2.0))
    return SharpnessVerdict(
        m=int(m),
        c_direct=c_direct,
        c_integrated=c_integrated,
        integrated_sharper=c_integrated > c_direct,
    )


@dataclass(frozen=True)
class InequalityCase:
    """One checkable bound: lhs quantity, rhs formula, direction, window."""

    case_id: str
    description: str
    lhs: str  # 'H' | 'dH' | 'd2H' | 'kernel_margin'
    direction: str  # '<=' | '>='
    window_lo_mult: float  # lower edge in multiples of diam^2 (0 = open at 0)
    window_hi_mult: float | None  # upper edge, None = unbounded
    rhs: object  # callable(m, t, vol, diam, H) -> float
    h_coeff: object = None  # callable(m, t) -> |d rhs / d H|, None if rhs is H-free

    @property
    def needs_h(self) -> bool:
        return self.h_coeff is not None

    def window(self, diam: float) -> tuple[float, float | None]:
        lo = self.window_lo_mult * diam * diam
        hi = None if self.window_hi_mult is None else self.window_hi_mult * diam * diam
        return lo, hi

    def in_window(self, t: float, diam: float) -> bool:
        lo, hi = self.window(diam)
        if self.window_lo_mult == 0:
            if t <= 0:
                return False
        elif t < lo * (1.0 - 1e-12):
            return False
        return hi is None or t <= hi * (1.0 + 1e-12)


def _i09_rhs(m, t, vol, diam, H):
    c = ((2.0 * m - 1.0) / 2.0) ** 2 / (0.5 * m + 1.0)
    return -c * _E8 * (4.0 * math.pi) ** (-0.5 * m) * vol * vol * t ** (-0.5 * m - 1.0)


def _case_table():
    cases = {}

    def add(case_id, description, lhs, direction, lo, hi, rhs, h_coeff=None):
        cases[case_id] = InequalityCase(
            case_id, description, lhs, direction, lo, hi, rhs, h_coeff
        )

    add(
        "I04",
        "pointwise kernel decay: dp/dt <= -((2m-1)/4) p/t on r2 <= diam^2",
        "kernel_margin",
        ">=",
        1.0,
        None,
        lambda m, t, vol, diam, H: 0.0,
    )
    add(
        "I05",
        "monotonicity with improved constant: H' <= -((2m-1)/4) H/t",
        "dH",
        "<=",
        1.0,
        None,
        lambda m, t, vol, diam, H: -((2.0 * m - 1.0) / 4.0) * H / t,
        lambda m, t: (2.0 * m - 1.0) / (4.0 * t),
    )
    add(
        "I06",
        "convexity with improved constant: H'' >= ((2m-1)/2)^2 H/t^2",
        "d2H",
        ">=",
        2.0,
        None,
        lambda m, t, vol, diam, H: ((2.0 * m - 1.0) / 2.0) ** 2 * H / (t * t),
        lambda m, t: ((2.0 * m - 1.0) / 2.0) ** 2 / (t * t),
    )
    add(
        "I07",
        "large-time floor: H >= e^(-1/8) V^2 (4 pi t)^(-m/2)",
        "H",
        ">=",
        2.0,
        None,
        lambda m, t, vol, diam, H: _E8 * vol * vol * (4.0 * math.pi * t) ** (-0.5 * m),
    )
    add(
        "I08",
        "convexity floor: H'' >= ((2m-1)/2)^2 e^(-1/8)(4pi)^(-m/2) V^2 t^(-m/2-2)",
        "d2H",
        ">=",
        2.0,
        None,
        lambda m, t, vol, diam, H: ((2.0 * m - 1.0) / 2.0) ** 2
        * _E8
        * (4.0 * math.pi) ** (-0.5 * m)
        * vol
        * vol
        * t ** (-0.5 * m - 2.0),
    )
    add(
        "I09",
        "integrated decay: H' <= -(m/2+1)^(-1)((2m-1)/2)^2 e^(-1/8)(4pi)^(-m/2) V^2 t^(-m/2-1)",
        "dH",
        "<=",
        2.0,
        None,
        _i09_rhs,
    )
    add(
        "I010",
        "small-time decay: H' <= I09 right side frozen at t = 2 diam^2",
        "dH",
        "<=",
        0.0,
        2.0,
        lambda m, t, vol, diam, H: _i09_rhs(m, 2.0 * diam * diam, vol, diam, H),
    )
    add(
        "I011",
        "small-time convexity: H'' >= ((2m-1)/2)^2 e^(-1/8)(4pi)^(-m/2) V^2 (2 diam^2)^(-m/2-2)",
        "d2H",
        ">=",
        0.0,
        2.0,
        lambda m, t, vol, diam, H: ((2.0 * m - 1.0) / 2.0) ** 2
        * _E8
        * (4.0 * math.pi) ** (-0.5 * m)
        * vol
        * vol
        * (2.0 * diam * diam) ** (-0.5 * m - 2.0),
    )
    add(
        "BG24_MONO",
        "baseline monotonicity: H' <= -(4m^2+4m-7)/(8(m+2)e^(1/4)) H/t",
        "dH",
        "<=",
        1.0,
        None,
        lambda m, t, vol, diam, H: -bg24_constants(m)[0] * H / t,
        lambda m, t: bg24_constants(m)[0] / t,
    )
    add(
        "BG24_CONV",
        "baseline convexity: H'' >= (4m^2+4m-7)/16 H/t^2",
        "d2H",
        ">=",
        1.0,
        None,
        lambda m, t, vol, diam, H: bg24_constants(m)[1] * H / (t * t),
        lambda m, t: bg24_constants(m)[1] / (t * t),
    )
    return cases


_CASES = _case_table()


def build_case(case_id: str) -> InequalityCase:
    """Look up a case by id; raises ``ValueError`` for unknown ids."""
    try:
        return _CASES[case_id]
    except KeyError:
        raise ValueError(
            f"unknown inequality case id {case_id!r}; known: {', '.join(CASE_IDS)}"
        ) from None


@dataclass(frozen=True)
class VerificationRow:
    t: float
    lhs: float
    rhs: float
    margin: float
    tolerance: float
    verdict: str  # 'pass' | 'fail' | 'clipped'


@dataclass(frozen=True)
class VerificationReport:
    """Per-time margins and verdicts for one case on one domain."""

    case_id: str
    domain_id: str
    m: int
    engine: str
    rows: tuple

    @property
    def overall_pass(self) -> bool:
        return all(r.verdict != "fail" for r in self.rows)

    @property
    def checked_rows(self) -> tuple:
        return tuple(r for r in self.rows if r.verdict != "clipped")

    def worst_margin(self) -> float:
        checked = self.checked_rows
        if not checked:
            return math.inf
        return min(r.margin for r in checked)

    def summary(self) -> str:
        n_fail = sum(r.verdict == "fail" for r in self.rows)
        n_clip = sum(r.verdict == "clipped" for r in self.rows)
        status = "pass" if self.overall_pass else "FAIL"
        extra = f", {n_clip} clipped" if n_clip else ""
        return (
            f"{self.case_id} on {self.domain_id} [{self.engine}]: {status} "
            f"({len(self.rows)} rows, {n_fail} failing{extra}, "
            f"worst margin {self.worst_margin():.3e})"
        )


def standard_t_grid(case: InequalityCase, d: Domain, n: int = 20) -> np.ndarray:
    """Default geometric time grid inside the case's validity window.

    Unbounded windows run from the lower edge to 100x ``diam^2`` beyond it;
    small-time windows start at ``0.05 diam^2``.
    """
    diam2 = d.diameter() ** 2
    lo, hi = case.window(d.diameter())
    if case.window_lo_mult == 0:
        lo = 0.05 * diam2
    if hi is None:
        hi = lo * 100.0
    return np.geomspace(lo, hi, n)


def _lhs_value(case, handle, t, levels):
    """Returns (lhs value, lhs error, engine value at t or None)."""
    if case.lhs == "H":
        est = handle(t)
        return est.value, est.error_bound, est
    order = {"dH": 1, "d2H": 2}[case.lhs]
    de = fd_derivative(handle, t, order=order, levels=levels)
    return de.value, de.error_estimate, None


def verify(
    case: InequalityCase | str,
    d: Domain,
    t_grid,
    engine: str | EngineHandle = "auto",
    *,
    levels: int = 2,
    grid_cfg: GridConfig | None = None,
    mc_cfg: MCConfig | None = None,
    raster_h: float | None = None,
    domain_id: str | None = None,
    tol_floor: float = TOLERANCE_FLOOR,
) -> VerificationReport:
    """Check one case on one domain over a time grid.

    Times outside the validity window are kept in the report as ``clipped``
    rows and excluded from the verdict.  Engine and derivative errors
    propagate into each row's tolerance; the overall verdict passes iff
    every in-window margin exceeds minus its tolerance.

    When the engine rasterizes the domain, the verified object is the
    rasterized set: its volume and diameter feed the right-hand sides and
    the validity window, and the report's domain label names it.
    """
    if isinstance(case, str):
        case = build_case(case)
    if isinstance(engine, EngineHandle):
        handle = engine
    else:
        handle = make_engine(
            d, engine, grid_cfg=grid_cfg, mc_cfg=mc_cfg, raster_h=raster_h
        )
    effective = handle.domain
    m = effective.dim
    vol = effective.volume()
    diam = effective.diameter()
    rows = []

    for t in t_grid:
        t = float(t)
        if not case.in_window(t, diam):
            rows.append(
                VerificationRow(t, math.nan, math.nan, math.nan, math.nan, "clipped")
            )
            continue
        if case.lhs == "kernel_margin":
            margin, _, lhs, rhs = kernel_dt_bound_scan(m, t, diam)
            tol = tol_floor
        else:
            lhs, lhs_err, _ = _lhs_value(case, handle, t, levels)
            h_val = None
            tol = lhs_err + tol_floor
            if case.needs_h:
                est = handle(t)
                h_val = est.value
                tol += case.h_coeff(m, t) * est.error_bound
            rhs = case.rhs(m, t, vol, diam, h_val)
            margin = rhs - lhs if case.direction == "<=" else lhs - rhs
        verdict = "pass" if margin >= -tol else "fail"
        rows.append(VerificationRow(t, lhs, rhs, margin, tol, verdict))

    return VerificationReport(
        case_id=case.case_id,
        domain_id=domain_id or handle.domain_label,
        m=m,
        engine=handle.name,
        rows=tuple(rows),
    )
