"""(p,q)-calculus primitives in exact rational or double precision arithmetic."""

from __future__ import annotations

import enum
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Union

from .ratpoly import RatPoly

Scalar = Union[float, Fraction]


class Mode(enum.Enum):
    FLOAT = "float"
    RATIONAL = "rational"


def parse_scalar(text: str, mode: Mode) -> Scalar:
    """Parse ``"3/4"``, ``"1"`` or ``"0.9"`` for the given arithmetic mode.

    Decimal literals are refused in rational mode; silently approximating
    them would defeat the point of exact identity checks.
    """
    text = text.strip()
    if mode is Mode.RATIONAL:
        if any(ch in text for ch in ".eE"):
            raise ValueError(f"decimal literal {text!r} not allowed in rational mode; use num/den")
        return Fraction(text)
    return float(Fraction(text)) if "/" in text else float(text)


@dataclass(frozen=True)
class PQParams:
    """The pair ``0 < q < p <= 1`` together with an arithmetic mode."""

    p: Scalar
    q: Scalar
    mode: Mode = Mode.FLOAT

    def __post_init__(self):
        mode = Mode(self.mode)
        object.__setattr__(self, "mode", mode)
        if mode is Mode.RATIONAL:
            for name in ("p", "q"):
                v = getattr(self, name)
                if isinstance(v, float):
                    raise TypeError(f"{name} must be an exact rational in rational mode")
                object.__setattr__(self, name, Fraction(v))
        else:
            object.__setattr__(self, "p", float(self.p))
            object.__setattr__(self, "q", float(self.q))
        if not (0 < self.q < self.p <= 1):
            raise ValueError(f"need 0 < q < p <= 1, got p={self.p}, q={self.q}")

    @classmethod
    def exact(cls, p, q) -> "PQParams":
        return cls(Fraction(p), Fraction(q), Mode.RATIONAL)

    @property
    def exact_mode(self) -> bool:
        return self.mode is Mode.RATIONAL

    def one(self) -> Scalar:
        return Fraction(1) if self.exact_mode else 1.0

    def zero(self) -> Scalar:
        return Fraction(0) if self.exact_mode else 0.0

    def to_float(self) -> "PQParams":
        return PQParams(float(self.p), float(self.q), Mode.FLOAT)


@dataclass(frozen=True)
class PQInt:
    n: int
    value: Scalar


def pq_int(n: int, params: PQParams) -> Scalar:
    """``[n]_{p,q}``, summed as ``p^0 q^(n-1) + ... + p^(n-1) q^0``.

    The quotient form ``(p^n - q^n)/(p - q)`` cancels badly when q is close
    to p, so it is never used in float mode.
    """
    if n < 0:
        raise ValueError("n must be nonnegative")
    p, q = params.p, params.q
    total = params.zero()
    for i in range(n):
        total += p**i * q ** (n - 1 - i)
    return total


def pq_int_table(n: int, params: PQParams) -> list:
    """``[0], [1], ..., [n]`` via ``[i+1] = q [i] + p^i`` (same positive terms)."""
    p, q = params.p, params.q
    out = [params.zero()]
    pk = params.one()
    for _ in range(n):
        out.append(q * out[-1] + pk)
        pk *= p
    return out


def pq_factorial(n: int, params: PQParams) -> Scalar:
    if n < 0:
        raise ValueError("n must be nonnegative")
    out = params.one()
    for i in range(1, n + 1):
        out *= pq_int(i, params)
    return out


def pq_binomial(n: int, k: int, params: PQParams) -> Scalar:
    """(p,q)-binomial coefficient by ``C(n,k+1) = C(n,k) [n-k]/[k+1]``."""
    if n < 0:
        raise ValueError("n must be nonnegative")
    if k < 0 or k > n:
        raise ValueError(f"need 0 <= k <= n, got n={n}, k={k}")
    ints = pq_int_table(n, params)
    c = params.one()
    for j in range(k):
        c = c * ints[n - j] / ints[j + 1]
    return c


def pq_power_rising(n: int, params: PQParams, a=1) -> RatPoly:
    """Expand ``(a + x)^n_{p,q} = prod_{s<n} (p^s a + q^s x)`` in x."""
    if not params.exact_mode:
        raise ValueError("pq_power_rising produces exact polynomials; use rational mode")
    p, q, a = params.p, params.q, Fraction(a)
    out = RatPoly([1])
    for s in range(n):
        out = out * RatPoly([p**s * a, q**s])
    return out


def pq_derivative_poly(poly: RatPoly, params: PQParams) -> RatPoly:
    """Apply ``D_{p,q}`` termwise: ``x^k -> [k] x^(k-1)``."""
    if not params.exact_mode:
        raise ValueError("pq_derivative_poly requires rational mode")
    ints = pq_int_table(max(poly.degree, 0), params)
    return RatPoly([ints[k] * c for k, c in enumerate(poly.coeffs)][1:])


def pq_derivative_numeric(f: Callable, x: Scalar, params: PQParams) -> Scalar:
    if x == 0:
        raise ValueError("D_{p,q} is undefined at x = 0")
    p, q = params.p, params.q
    return (f(p * x) - f(q * x)) / ((p - q) * x)
