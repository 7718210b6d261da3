"""Built-in test functions on [0, 1] with analytic derivatives."""

from __future__ import annotations

import math

import numpy as np

from .operators import FunctionBundle
from .ratpoly import RatPoly

_ORDER = 6


def _sin_pi(i: int):
    scale = math.pi**i
    phase = i * math.pi / 2
    return lambda t: scale * np.sin(math.pi * np.asarray(t, dtype=np.float64) + phase)


def _exp(t):
    return np.exp(np.asarray(t, dtype=np.float64))


def _abs_half(t):
    return np.abs(np.asarray(t, dtype=np.float64) - 0.5)


def _sqrt_abs_half(t):
    return np.sqrt(np.abs(np.asarray(t, dtype=np.float64) - 0.5))


def _poly(name: str, coeffs) -> FunctionBundle:
    b = FunctionBundle.from_poly(RatPoly(coeffs), _ORDER, name)
    return FunctionBundle(b.f, b.derivs, (1.0, 1.0), name)


def build_corpus() -> dict[str, FunctionBundle]:
    """Polynomials are RatPoly-backed, so they also work in rational mode.

    The two rough members carry no derivatives: |t - 1/2| is Lip_1(1) and
    |t - 1/2|^(1/2) is Lip_1(1/2), and neither is in C^1.
    """
    return {
        "one": _poly("one", [1]),
        "t": _poly("t", [0, 1]),
        "t2": _poly("t2", [0, 0, 1]),
        "t3": _poly("t3", [0, 0, 0, 1]),
        "sin": FunctionBundle(
            _sin_pi(0), tuple(_sin_pi(i) for i in range(1, _ORDER + 1)), (math.pi ** (_ORDER + 1), 1.0), "sin"
        ),
        "exp": FunctionBundle(_exp, (_exp,) * _ORDER, (math.e, 1.0), "exp"),
        "abs": FunctionBundle(_abs_half, (), (1.0, 1.0), "abs"),
        "sqrtabs": FunctionBundle(_sqrt_abs_half, (), (1.0, 0.5), "sqrtabs"),
    }


CORPUS = build_corpus()
SMOOTH = ("one", "t", "t2", "t3", "sin", "exp")
ROUGH = ("abs", "sqrtabs")


def get(name: str) -> FunctionBundle:
    try:
        return CORPUS[name]
    except KeyError:
        raise KeyError(f"unknown function {name!r}; choose from {', '.join(CORPUS)}") from None
