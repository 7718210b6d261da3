"""Revised (p,q)-Bernstein operators and their r-th order generalization.

Float-mode weights are assembled in the log domain (see ``weight_matrix``);
rational-mode weights are exact products.  Every float entry point has a
grid form (``*_grid``) that evaluates many x at once through the kernels.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Callable, Optional

import numpy as np

from . import kernels
from .pq_core import PQParams, pq_binomial, pq_int_table, pq_power_rising
from .ratpoly import RatPoly

RENORM_TOL = 1e-13


@dataclass(frozen=True)
class BasisWeights:
    n: int
    x: object
    w: tuple

    def total(self):
        return sum(self.w)


@dataclass(frozen=True)
class NodeSet:
    n: int
    nodes: tuple


@dataclass(frozen=True)
class FunctionBundle:
    """A target function with its analytic derivatives on [0, 1].

    ``derivs[i - 1]`` is the i-th derivative.  ``lip = (M, alpha)`` declares
    that the highest supplied derivative lies in Lip_M(alpha).
    """

    f: Callable
    derivs: tuple = ()
    lip: Optional[tuple] = None
    name: str = "f"

    @property
    def r_max(self) -> int:
        return len(self.derivs)

    def derivative(self, i: int) -> Callable:
        if i == 0:
            return self.f
        if i > self.r_max:
            raise ValueError(f"{self.name}: derivative of order {i} not available (r_max={self.r_max})")
        return self.derivs[i - 1]

    @classmethod
    def from_poly(cls, poly: RatPoly, r_max: int = 6, name: str = "poly") -> "FunctionBundle":
        ds, cur = [], poly
        for _ in range(r_max):
            cur = cur.derivative()
            ds.append(cur)
        return cls(poly, tuple(ds), None, name)


def _check_x(x):
    if not (0 <= x <= 1):
        raise ValueError(f"x must lie in [0, 1], got {x}")


def _check_n(n: int):
    if n < 1:
        raise ValueError(f"degree n must be >= 1, got {n}")


@lru_cache(maxsize=256)
def _log_coefficients(n: int, p: float, q: float) -> np.ndarray:
    params = PQParams(p, q)
    ints = pq_int_table(n, params)
    logfact = np.concatenate([[0.0], np.cumsum(np.log(np.asarray(ints[1:], dtype=np.float64)))])
    k = np.arange(n + 1)
    logbinom = logfact[n] - logfact[k] - logfact[n - k]
    expo = (k * (k - 1)) // 2 - (n * (n - 1)) // 2
    out = logbinom + expo * math.log(p)
    out.setflags(write=False)
    return out


@lru_cache(maxsize=256)
def _powers(n: int, p: float, q: float):
    s = np.arange(n, dtype=np.float64)
    return p**s, q**s


def weight_matrix(n: int, params: PQParams, xs, renormalize: bool = True) -> np.ndarray:
    """Float weights ``w[i, k] = P_{n,k}(p,q;xs[i]) / p^{n(n-1)/2}``.

    Every factor ``p^s - q^s x`` is nonnegative on [0, 1], so the product is
    taken as a sum of logs and exponentiated once, which avoids the
    underflow of both the product and the normalizer at large n.  Rows whose
    sum drifts from 1 by more than 1e-13 are rescaled.
    """
    _check_n(n)
    xs = np.atleast_1d(np.asarray(xs, dtype=np.float64))
    if xs.size and (xs.min() < 0 or xs.max() > 1):
        raise ValueError("x must lie in [0, 1]")
    p, q = float(params.p), float(params.q)
    ppow, qpow = _powers(n, p, q)
    w = kernels.weight_matrix(_log_coefficients(n, p, q), ppow, qpow, xs)
    if renormalize:
        s = w.sum(axis=1)
        bad = np.abs(s - 1.0) > RENORM_TOL
        if bad.any():
            w[bad] /= s[bad, None]
    return w


def _exact_weights(n: int, params: PQParams, x) -> tuple:
    p, q = params.p, params.q
    x = Fraction(x)
    norm = p ** (n * (n - 1) // 2)
    out = []
    for k in range(n + 1):
        prod = Fraction(1)
        for s in range(n - k):
            prod *= p**s - q**s * x
        out.append(p ** (k * (k - 1) // 2) * pq_binomial(n, k, params) * x**k * prod / norm)
    return tuple(out)


def basis_weights(n: int, params: PQParams, x) -> BasisWeights:
    _check_n(n)
    _check_x(x)
    if params.exact_mode:
        return BasisWeights(n, Fraction(x), _exact_weights(n, params, x))
    return BasisWeights(n, float(x), tuple(weight_matrix(n, params, [x])[0]))


def _node_values(n: int, params: PQParams) -> list:
    ints = pq_int_table(n, params)
    p = params.p
    return [p ** (n - k) * ints[k] / ints[n] for k in range(n + 1)]


@lru_cache(maxsize=256)
def _float_nodes(n: int, p: float, q: float) -> np.ndarray:
    params = PQParams(p, q)
    ints = pq_int_table(n, params)
    k = np.arange(n + 1)
    lower = np.array([p ** (n - j) * ints[j] for j in k]) / ints[n]
    # [n] = p^(n-k)[k] + q^k[n-k], so the upper half is taken as a complement
    upper = 1.0 - np.array([q**j * ints[n - j] for j in k]) / ints[n]
    out = np.where(lower <= 0.5, lower, upper)
    # gaps near 1 are q^k/[n]; below an ulp rounding could reorder neighbours
    out = np.clip(np.maximum.accumulate(out), 0.0, 1.0)
    out.setflags(write=False)
    return out


def nodes(n: int, params: PQParams) -> NodeSet:
    """Nodes ``p^(n-k) [k] / [n]``, the positive-power form of the sample points."""
    _check_n(n)
    if params.exact_mode:
        return NodeSet(n, tuple(_node_values(n, params)))
    return NodeSet(n, tuple(_float_nodes(n, float(params.p), float(params.q))))


def node_array(n: int, params: PQParams) -> np.ndarray:
    _check_n(n)
    return _float_nodes(n, float(params.p), float(params.q))


def _sample(f: Callable, pts: np.ndarray) -> np.ndarray:
    vals = np.asarray(f(pts), dtype=np.float64)
    return np.broadcast_to(vals, pts.shape)


def apply(f: Callable, n: int, params: PQParams, x):
    """``B_{n,p,q}(f; x)``; f sees only the nodes.

    In float mode f must accept a numpy array of nodes.
    """
    _check_n(n)
    _check_x(x)
    if params.exact_mode:
        w = _exact_weights(n, params, x)
        return sum((wk * f(xk) for wk, xk in zip(w, _node_values(n, params))), Fraction(0))
    return float(apply_grid(f, n, params, [x])[0])


def apply_grid(f: Callable, n: int, params: PQParams, xs) -> np.ndarray:
    w = weight_matrix(n, params, xs)
    return w @ _sample(f, node_array(n, params))


@lru_cache(maxsize=64)
def _basis_polys(n: int, p: Fraction, q: Fraction) -> tuple:
    params = PQParams.exact(p, q)
    norm = p ** (n * (n - 1) // 2)
    out = []
    for k in range(n + 1):
        # prod_{s<n-k} (p^s - q^s x) is (1 + y)^{n-k}_{p,q} at y = -x
        tail = pq_power_rising(n - k, params).scale_argument(-1)
        c = p ** (k * (k - 1) // 2) * pq_binomial(n, k, params) / norm
        out.append(RatPoly.monomial(k, c) * tail)
    return tuple(out)


@lru_cache(maxsize=1024)
def _monomial_image(n: int, p: Fraction, q: Fraction, j: int) -> RatPoly:
    params = PQParams.exact(p, q)
    acc = RatPoly()
    for basis, node in zip(_basis_polys(n, p, q), _node_values(n, params)):
        acc = acc + basis * node**j
    return acc


def monomial_image(n: int, params: PQParams, j: int) -> RatPoly:
    """``B_{n,p,q}(t^j; x)`` as an exact polynomial in x."""
    if not params.exact_mode:
        raise ValueError("symbolic images need rational mode")
    _check_n(n)
    return _monomial_image(n, params.p, params.q, j)


def apply_poly(poly: RatPoly, n: int, params: PQParams) -> RatPoly:
    if not params.exact_mode:
        raise ValueError("apply_poly requires rational mode")
    _check_n(n)
    acc = RatPoly()
    for j, c in enumerate(poly.coeffs):
        if c:
            acc = acc + monomial_image(n, params, j) * c
    return acc


def apply_higher(bundle: FunctionBundle, r: int, n: int, params: PQParams, x):
    """r-th order operator: each node value is replaced by the degree-r
    Taylor polynomial of f at that node, evaluated at x."""
    if r < 0 or r > bundle.r_max:
        raise ValueError(f"order r={r} outside 0..{bundle.r_max} for {bundle.name}")
    if r == 0:
        return apply(bundle.f, n, params, x)
    _check_n(n)
    _check_x(x)
    if params.exact_mode:
        x = Fraction(x)
        w = _exact_weights(n, params, x)
        total = Fraction(0)
        for wk, xk in zip(w, _node_values(n, params)):
            inner = Fraction(0)
            for i in range(r + 1):
                inner += bundle.derivative(i)(xk) * (x - xk) ** i / math.factorial(i)
            total += wk * inner
        return total
    return float(apply_higher_grid(bundle, r, n, params, [x])[0])


def apply_higher_grid(bundle: FunctionBundle, r: int, n: int, params: PQParams, xs) -> np.ndarray:
    if r < 0 or r > bundle.r_max:
        raise ValueError(f"order r={r} outside 0..{bundle.r_max} for {bundle.name}")
    if r == 0:
        return apply_grid(bundle.f, n, params, xs)
    xs = np.atleast_1d(np.asarray(xs, dtype=np.float64))
    w = weight_matrix(n, params, xs)
    nd = node_array(n, params)
    diff = xs[:, None] - nd[None, :]
    taylor = np.broadcast_to(_sample(bundle.f, nd), diff.shape).copy()
    power = np.ones_like(diff)
    for i in range(1, r + 1):
        power = power * diff
        taylor += _sample(bundle.derivative(i), nd)[None, :] * power / math.factorial(i)
    return (w * taylor).sum(axis=1)


def q_bernstein_oracle(f: Callable, n: int, q, x):
    """Phillips q-Bernstein value by direct products (independent of the
    (p,q) machinery: Gaussian binomials come from the q-Pascal rule)."""
    one = Fraction(1) if isinstance(q, Fraction) else 1.0
    rows = [[one]]
    for m in range(1, n + 1):
        prev = rows[-1]
        row = [one]
        for k in range(1, m):
            row.append(prev[k - 1] + q**k * prev[k])
        row.append(one)
        rows.append(row)
    gauss = rows[n]
    qint = lambda j: sum((q**i for i in range(j)), 0 * one)
    total = 0 * one
    for k in range(n + 1):
        prod = one
        for s in range(n - k):
            prod *= one - q**s * x
        total += gauss[k] * x**k * prod * f(qint(k) / qint(n))
    return total


def classical_bernstein_oracle(f: Callable, n: int, x):
    one = Fraction(1) if isinstance(x, Fraction) else 1.0
    return sum(
        (math.comb(n, k) * x**k * (one - x) ** (n - k) * f(one * k / n) for k in range(n + 1)),
        0 * one,
    )
