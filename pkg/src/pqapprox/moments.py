"""Central moments of the revised (p,q)-Bernstein operator.

Symbolic moments are exact polynomials in x (rational mode).  Grid
moments are float direct sums against the weight matrix.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Sequence

import numpy as np

from .operators import _exact_weights, _node_values, monomial_image, node_array, weight_matrix
from .pq_core import PQParams, pq_derivative_poly, pq_int
from .ratpoly import RatPoly

X_ONE_MINUS_X = RatPoly([0, 1, -1])


class StructureViolation(ArithmeticError):
    """A moment polynomial does not have the x(1-x)-divisible shape."""


@dataclass(frozen=True)
class MomentPoly:
    n: int
    m: int
    kind: str  # "pq" or "ordinary"
    poly: RatPoly


@dataclass(frozen=True)
class MomentDecomposition:
    m: int
    n: int
    exponent: int
    b: tuple
    residual: RatPoly

    def reconstruct(self, params: PQParams) -> RatPoly:
        scale = Fraction(1) / pq_int(self.n, params) ** self.exponent
        return X_ONE_MINUS_X * RatPoly(self.b) * scale


@dataclass(frozen=True)
class ConstantEstimate:
    m: int
    n_list: tuple
    params: tuple
    kind: str
    C_hat: float
    K_hat: float


def _require_exact(params: PQParams):
    if not params.exact_mode:
        raise ValueError("symbolic moments require rational mode")


@lru_cache(maxsize=256)
def _pq_power_in_t(m: int, p: Fraction, q: Fraction) -> tuple:
    """Coefficients of t^j in prod_{s<m} (p^s t - q^s y), each a RatPoly in y."""
    coeffs = [RatPoly([1])]
    for s in range(m):
        a, b = p**s, -(q**s)
        nxt = [RatPoly()] * (len(coeffs) + 1)
        for j, c in enumerate(coeffs):
            nxt[j + 1] = nxt[j + 1] + c * a
            nxt[j] = nxt[j] + c * RatPoly([0, b])
        coeffs = nxt
    return tuple(coeffs)


def shifted_pq_moment(n: int, m: int, params: PQParams, shift=1) -> RatPoly:
    """``x -> B((t - c x)^m_{p,q}; c x)`` for a rational c.

    The product is expanded once in (t, y); the operator acts on t, giving
    sum_j c_j(y) B(t^j; z), and then y and z are both set to c x.
    """
    _require_exact(params)
    shift = Fraction(shift)
    acc = RatPoly()
    for j, cj in enumerate(_pq_power_in_t(m, params.p, params.q)):
        if cj.is_zero():
            continue
        acc = acc + cj.scale_argument(shift) * monomial_image(n, params, j).scale_argument(shift)
    return acc


def central_moment_pq(n: int, m: int, params: PQParams) -> MomentPoly:
    if m < 0:
        raise ValueError("moment order must be nonnegative")
    return MomentPoly(n, m, "pq", shifted_pq_moment(n, m, params, 1))


def central_moment_ordinary(n: int, m: int, params: PQParams, x=None):
    """``B((t - x)^m; x)``: a MomentPoly when x is None, else a scalar."""
    if m < 0:
        raise ValueError("moment order must be nonnegative")
    if x is None:
        _require_exact(params)
        acc = RatPoly()
        for j in range(m + 1):
            coeff = RatPoly.monomial(m - j, math.comb(m, j) * (-1) ** (m - j))
            acc = acc + coeff * monomial_image(n, params, j)
        return MomentPoly(n, m, "ordinary", acc)
    if params.exact_mode:
        x = Fraction(x)
        return sum(
            (w * (xk - x) ** m for w, xk in zip(_exact_weights(n, params, x), _node_values(n, params))),
            Fraction(0),
        )
    return float(moment_grid(n, m, params, [x], kind="ordinary")[0])


def _factor_matrix(n: int, m: int, params: PQParams, xs: np.ndarray, kind: str) -> np.ndarray:
    nd = node_array(n, params)
    if kind == "ordinary":
        return (nd[None, :] - xs[:, None]) ** m
    if kind == "pq":
        p, q = float(params.p), float(params.q)
        out = np.ones((xs.shape[0], nd.shape[0]))
        for s in range(m):
            out *= p**s * nd[None, :] - q**s * xs[:, None]
        return out
    raise ValueError(f"unknown moment kind {kind!r}")


def moment_grid(n: int, m: int, params: PQParams, xs, kind: str = "pq", absolute: bool = False) -> np.ndarray:
    """Float moments on a grid by direct summation.

    ``kind="pq"`` uses prod_s (p^s t - q^s x); its absolute version takes
    the product of absolute factors.  ``kind="ordinary"`` uses (t - x)^m.
    """
    xs = np.atleast_1d(np.asarray(xs, dtype=np.float64))
    w = weight_matrix(n, params.to_float() if params.exact_mode else params, xs)
    fac = _factor_matrix(n, m, params, xs, kind)
    if absolute:
        fac = np.abs(fac)
    return (w * fac).sum(axis=1)


def absolute_moment(n: int, m: int, params: PQParams, x, kind: str = "pq"):
    if not (0 <= x <= 1):
        raise ValueError(f"x must lie in [0, 1], got {x}")
    if params.exact_mode:
        x = Fraction(x)
        total = Fraction(0)
        for w, xk in zip(_exact_weights(n, params, x), _node_values(n, params)):
            if kind == "ordinary":
                val = abs(xk - x) ** m
            elif kind == "pq":
                val = Fraction(1)
                for s in range(m):
                    val *= abs(params.p**s * xk - params.q**s * x)
            else:
                raise ValueError(f"unknown moment kind {kind!r}")
            total += w * val
        return total
    return float(moment_grid(n, m, params, [x], kind=kind, absolute=True)[0])


def lemma2_residual(n: int, m: int, params: PQParams) -> RatPoly:
    """LHS minus RHS of the three-term moment recurrence, as an exact polynomial.

    M_{m+1}(x) = p^{m+n} x(1-x)/[n] * D_{p,q}[M_m(x/p)]
               + p^{m+n-1} [m] x(1-x)/[n] * M_{m-1}(qx/p)
               + [m] (p^n - q^n) x/[n] * M_m(x)
    where M_j(y) = B((t - y)^j_{p,q}; y).
    """
    _require_exact(params)
    if m < 1 or n < 1:
        raise ValueError("need m >= 1 and n >= 1")
    p, q = params.p, params.q
    N = pq_int(n, params)
    Nm = pq_int(m, params)
    lhs = shifted_pq_moment(n, m + 1, params)
    first = X_ONE_MINUS_X * pq_derivative_poly(shifted_pq_moment(n, m, params, 1 / p), params) * (p ** (m + n) / N)
    second = X_ONE_MINUS_X * shifted_pq_moment(n, m - 1, params, q / p) * (p ** (m + n - 1) * Nm / N)
    third = RatPoly.x() * shifted_pq_moment(n, m, params) * (Nm * (p**n - q**n) / N)
    return lhs - (first + second + third)


def lemma3_decompose(n: int, m: int, params: PQParams) -> MomentDecomposition:
    """Split the m-th (p,q)-moment as x(1-x) [n]^{-floor((m+1)/2)} sum_k b_k x^k."""
    _require_exact(params)
    if m < 2:
        raise ValueError("decomposition needs m >= 2 (the m = 1 moment is identically zero)")
    moment = central_moment_pq(n, m, params).poly
    quotient, residual = moment.divmod(X_ONE_MINUS_X)
    exponent = (m + 1) // 2
    if not residual.is_zero():
        raise StructureViolation(f"moment n={n} m={m} p={params.p} q={params.q} not divisible by x(1-x)")
    if quotient.degree > m - 2:
        raise StructureViolation(
            f"moment n={n} m={m} p={params.p} q={params.q}: quotient degree {quotient.degree} > {m - 2}"
        )
    b = quotient * pq_int(n, params) ** exponent
    coeffs = tuple(b[k] for k in range(m - 1))
    return MomentDecomposition(m, n, exponent, coeffs, residual)


def decomposition_coefficients_float(n: int, m: int, params: PQParams) -> np.ndarray:
    """Float b_{k,m,n} for large n, where exact expansion is too costly.

    Assumes the degree bound (checked exactly for small n): the quotient
    M_m / (x(1-x)) has degree m - 2, so m - 1 Chebyshev samples determine it.
    """
    if m < 2:
        raise ValueError("need m >= 2")
    fparams = params.to_float() if params.exact_mode else params
    j = np.arange(m - 1)
    xs = 0.5 - 0.4 * np.cos((2 * j + 1) * np.pi / (2 * (m - 1)))
    vals = moment_grid(n, m, fparams, xs, kind="pq") / (xs * (1 - xs))
    vander = np.vander(xs, m - 1, increasing=True)
    quot = np.linalg.solve(vander, vals)
    return quot * float(pq_int(n, fparams)) ** ((m + 1) // 2)


def constant_grid(grid_size: int = 1024) -> np.ndarray:
    """Interior grid i/grid_size, i = 1..grid_size-1 (x(1-x) > 0 there)."""
    return np.arange(1, grid_size) / grid_size


def estimate_constants(
    m: int,
    n_list: Sequence[int],
    param_list: Sequence[PQParams],
    kind: str = "pq",
    grid_size: int = 1024,
) -> ConstantEstimate:
    """Grid maxima of the normalized moment ratios.

    C: |moment| [n]^{floor((m+1)/2)} / (x(1-x)); K: absolute moment
    [n]^{m/2} / (x(1-x)).
    """
    if not n_list or not param_list:
        raise ValueError("empty grid")
    xs = constant_grid(grid_size)
    denom = xs * (1 - xs)
    c_hat = k_hat = 0.0
    for params in param_list:
        fp = params.to_float() if params.exact_mode else params
        for n in n_list:
            N = float(pq_int(n, fp))
            signed = moment_grid(n, m, fp, xs, kind=kind)
            absolute = moment_grid(n, m, fp, xs, kind=kind, absolute=True)
            if m != 1:  # the first moment vanishes identically; skip float noise
                c_hat = max(c_hat, float(np.max(np.abs(signed) * N ** ((m + 1) // 2) / denom)))
            k_hat = max(k_hat, float(np.max(absolute * N ** (m / 2) / denom)))
    return ConstantEstimate(m, tuple(n_list), tuple(param_list), kind, c_hat, k_hat)
