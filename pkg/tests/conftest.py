"""Shared fixtures: the five standard domains and closed-form oracles."""

import math

import numpy as np
import pytest

from heatcontent import Ball, Box, BoxUnion, Interval


@pytest.fixture
def interval():
    return Interval(1.0)


@pytest.fixture
def box12():
    return Box((1.0, 2.0))


@pytest.fixture
def ball2():
    return Ball((0.0, 0.0), 1.0)


@pytest.fixture
def box111():
    return Box((1.0, 1.0, 1.0))


@pytest.fixture
def boxunion():
    return BoxUnion((((0.0, 0.0), (1.0, 1.0)), ((2.0, 2.0), (1.0, 1.0))))


@pytest.fixture
def standard_domains(interval, box12, ball2, box111, boxunion):
    return {
        "interval": interval,
        "box12": box12,
        "ball2": ball2,
        "box111": box111,
        "boxunion": boxunion,
    }


# Closed-form heat content of an interval and its exact derivatives; the
# derivative formulas were cross-checked against 40-digit numerical
# differentiation of the erf expression.


def interval_h(length: float, t: float) -> float:
    if t == 0:
        return length
    z = length / (2.0 * math.sqrt(t))
    return length * math.erf(z) + 2.0 * math.sqrt(t / math.pi) * math.expm1(-z * z)


def interval_dh(length: float, t: float) -> float:
    return math.expm1(-length * length / (4.0 * t)) / math.sqrt(math.pi * t)


def interval_d2h(length: float, t: float) -> float:
    q = length * length / (4.0 * t)
    return (
        (math.exp(-q) * q - math.expm1(-q) / 2.0) / (math.sqrt(math.pi) * t**1.5)
    )


def box_h(lengths, t: float) -> float:
    return math.prod(interval_h(side, t) for side in lengths)


def box_dh(lengths, t: float) -> float:
    total = 0.0
    for i, side in enumerate(lengths):
        rest = math.prod(
            interval_h(other, t) for j, other in enumerate(lengths) if j != i
        )
        total += interval_dh(side, t) * rest
    return total


def box_d2h(lengths, t: float) -> float:
    n = len(lengths)
    total = 0.0
    for i in range(n):
        rest = math.prod(interval_h(side, t) for j, side in enumerate(lengths) if j != i)
        total += interval_d2h(lengths[i], t) * rest
        for j in range(n):
            if j == i:
                continue
            rest2 = math.prod(
                interval_h(side, t)
                for k, side in enumerate(lengths)
                if k not in (i, j)
            )
            total += interval_dh(lengths[i], t) * interval_dh(lengths[j], t) * rest2
    return total


@pytest.fixture
def closed_oracles():
    return {
        "H": interval_h,
        "dH": interval_dh,
        "d2H": interval_d2h,
        "box_H": box_h,
        "box_dH": box_dh,
        "box_d2H": box_d2h,
    }


def geom_grid(lo: float, hi: float, n: int) -> np.ndarray:
    return np.geomspace(lo, hi, n)
