"""Modulus of continuity and the convergence experiments.

All sup-norms are maxima over the grid x = i/grid_size, so every reported
norm is a lower bound of the true one.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, Optional, Sequence

import numpy as np

from . import kernels
from .moments import estimate_constants, moment_grid
from .operators import FunctionBundle, apply_grid, apply_higher_grid
from .pq_core import Mode, PQParams, pq_int

DEFAULT_GRID = 1024
ZERO_ERROR = 1e-14


class DegenerateFit(ValueError):
    """Too few records with a positive error to fit a rate."""


def default_workers() -> int:
    raw = os.environ.get("PQAPPROX_THREADS", "").strip()
    if raw:
        try:
            return max(1, int(raw))
        except ValueError:
            raise ValueError(f"PQAPPROX_THREADS must be an integer, got {raw!r}") from None
    return 1


def _ordered_map(fn: Callable, items: Sequence, workers: Optional[int]):
    workers = default_workers() if workers is None else workers
    if workers <= 1 or len(items) <= 1:
        return [fn(it) for it in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))


def grid(grid_size: int = DEFAULT_GRID) -> np.ndarray:
    return np.arange(grid_size + 1) / grid_size


def modulus(f: Callable, delta: float, grid_size: int = DEFAULT_GRID) -> float:
    """Grid estimate of sup{|f(x) - f(y)| : |x - y| <= delta}."""
    if delta <= 0:
        raise ValueError("delta must be positive")
    if grid_size < 64:
        raise ValueError("grid_size must be at least 64")
    xs = grid(grid_size)
    vals = np.broadcast_to(np.asarray(f(xs), dtype=np.float64), xs.shape)
    max_lag = min(grid_size, int(math.floor(delta * grid_size + 1e-9)))
    if max_lag < 1:
        return 0.0
    return float(kernels.sup_modulus(np.ascontiguousarray(vals), max_lag))


@dataclass(frozen=True)
class ParamSequence:
    scheme: str  # "fixed", "one-minus-reciprocal" or "custom"
    generator: Callable[[int], tuple]

    def __call__(self, n: int) -> PQParams:
        p, q = self.generator(n)
        try:
            return PQParams(p, q, Mode.FLOAT)
        except ValueError as exc:
            raise ValueError(f"{self.scheme} sequence invalid at n={n}: {exc}") from None


def make_sequence(scheme: str, p=None, q=None, generator: Optional[Callable] = None) -> ParamSequence:
    """Parameter schemes (p_n, q_n).

    ``one-minus-reciprocal`` is p_n = 1 - 1/(n+1), q_n = 1 - 1/n (n >= 2);
    both tend to 1 and q_n^(n-1) -> 1/e keeps [n] growing like n.
    """
    if scheme == "fixed":
        params = PQParams(p, q)
        return ParamSequence("fixed", lambda n: (params.p, params.q))
    if scheme == "one-minus-reciprocal":

        def gen(n):
            if n < 2:
                raise ValueError(f"one-minus-reciprocal needs n >= 2, got {n}")
            return 1 - 1 / (n + 1), 1 - 1 / n

        return ParamSequence(scheme, gen)
    if scheme == "custom":
        if generator is None:
            raise ValueError("custom scheme needs a generator")
        return ParamSequence("custom", generator)
    raise ValueError(f"unknown scheme {scheme!r}")


@dataclass(frozen=True)
class ExperimentRecord:
    n: int
    p_n: float
    q_n: float
    bracket_n: float
    sup_error: float
    omega: float
    bound: float
    ratio: float


@dataclass(frozen=True)
class RateFit:
    slope: float
    intercept: float
    r_squared: float


def _record(bundle: FunctionBundle, r: int, seq: ParamSequence, n: int, grid_size: int) -> ExperimentRecord:
    params = seq(n)
    xs = grid(grid_size)
    bracket = float(pq_int(n, params))
    approx = apply_higher_grid(bundle, r, n, params, xs)
    exact = np.broadcast_to(np.asarray(bundle.f(xs), dtype=np.float64), xs.shape)
    sup_error = float(np.max(np.abs(approx - exact)))
    omega = modulus(bundle.derivative(r), bracket**-0.5, grid_size)
    bound = bracket ** (-r / 2) * omega
    # bound == 0 means f^(r) is constant, so the error is pure rounding
    ratio = sup_error / bound if bound > 0 else 0.0
    return ExperimentRecord(n, params.p, params.q, bracket, sup_error, omega, bound, ratio)


def run_bound_experiment(
    bundle: FunctionBundle,
    r: int,
    seq: ParamSequence,
    n_list: Sequence[int],
    grid_size: int = DEFAULT_GRID,
    workers: Optional[int] = None,
) -> list[ExperimentRecord]:
    if r > bundle.r_max:
        raise ValueError(f"order r={r} exceeds r_max={bundle.r_max} for {bundle.name}")
    if any(b < a for a, b in zip(n_list, n_list[1:])):
        raise ValueError("n_list must be non-decreasing")
    records = _ordered_map(lambda n: _record(bundle, r, seq, n, grid_size), list(n_list), workers)
    return sorted(records, key=lambda rec: rec.n)


def fit_rate(records: Sequence[ExperimentRecord]) -> RateFit:
    """Least-squares slope of log sup_error against log [n]."""
    pts = [(rec.bracket_n, rec.sup_error) for rec in records if rec.sup_error >= ZERO_ERROR]
    if len(pts) < 4:
        raise DegenerateFit(f"need at least 4 records with positive error, got {len(pts)}")
    lx = np.log([b for b, _ in pts])
    ly = np.log([e for _, e in pts])
    slope, intercept = np.polyfit(lx, ly, 1)
    resid = ly - (slope * lx + intercept)
    ss_tot = float(np.sum((ly - ly.mean()) ** 2))
    r2 = 1.0 - float(np.sum(resid**2)) / ss_tot if ss_tot > 0 else 1.0
    return RateFit(float(slope), float(intercept), r2)


@dataclass(frozen=True)
class ConvergenceVerdict:
    vanishing: bool
    error_decay: float  # relative drop of sup_error over the last three records
    bracket_growth: float  # [n] ratio between the last and third-to-last record


def convergence_verdict(records: Sequence[ExperimentRecord], min_decay: float = 0.05) -> ConvergenceVerdict:
    """Decide whether sup_error is still heading to zero.

    Along a scheme with [n] bounded the error settles at a positive floor;
    this reports that as non-vanishing instead of reading a small but
    stagnant error as convergence.
    """
    if len(records) < 3:
        raise ValueError("need at least three records")
    a, c = records[-3], records[-1]
    if a.sup_error < ZERO_ERROR:
        return ConvergenceVerdict(True, 1.0, c.bracket_n / a.bracket_n)
    decay = (a.sup_error - c.sup_error) / a.sup_error
    return ConvergenceVerdict(decay >= min_decay, decay, c.bracket_n / a.bracket_n)


@dataclass(frozen=True)
class VoronovskajaRow:
    n: int
    p_n: float
    q_n: float
    bracket_n: float
    deviation: float


def voronovskaja_table(
    bundle: FunctionBundle,
    seq: ParamSequence,
    n_list: Sequence[int],
    grid_size: int = DEFAULT_GRID,
    corrected: bool = False,
    workers: Optional[int] = None,
) -> list[VoronovskajaRow]:
    """sup_x |[n](B_n f - f)(x) - c_n x(1-x) f''(x)/2| per n.

    With ``corrected=False`` c_n = 1 (the textbook limit).  The exact second
    moment of the operator is p^(n-1) x(1-x)/[n], so ``corrected=True`` uses
    c_n = p_n^(n-1); the two agree only when p_n^n -> 1.
    """
    if bundle.r_max < 2:
        raise ValueError(f"{bundle.name} has no second derivative")
    xs = grid(grid_size)
    fx = np.broadcast_to(np.asarray(bundle.f(xs), dtype=np.float64), xs.shape)
    f2 = np.broadcast_to(np.asarray(bundle.derivative(2)(xs), dtype=np.float64), xs.shape)

    def row(n):
        params = seq(n)
        bracket = float(pq_int(n, params))
        scale = params.p ** (n - 1) if corrected else 1.0
        lhs = bracket * (apply_grid(bundle.f, n, params, xs) - fx)
        dev = float(np.max(np.abs(lhs - scale * xs * (1 - xs) * f2 / 2)))
        return VoronovskajaRow(n, params.p, params.q, bracket, dev)

    return sorted(_ordered_map(row, list(n_list), workers), key=lambda r: r.n)


@dataclass(frozen=True)
class RemainderCheck:
    lhs_sup: float
    rhs_bound: float
    ratio: float


def remainder_terms(bundle: FunctionBundle, r: int, n: int, params: PQParams, xs, coefficient: str = "stated"):
    """Pointwise B^[r]f - f minus the two leading moment terms.

    ``coefficient="stated"`` weights the (r+2)-moment term by
    (-1)^r/(r+2)!.  A direct Taylor expansion of the operator gives
    (-1)^r (r+1)/(r+2)! instead; ``coefficient="taylor"`` uses that, and
    the two coincide at r = 0.
    """
    if bundle.r_max < r + 2:
        raise ValueError(f"{bundle.name} needs derivatives up to order {r + 2}")
    if coefficient not in ("stated", "taylor"):
        raise ValueError(f"unknown coefficient convention {coefficient!r}")
    xs = np.atleast_1d(np.asarray(xs, dtype=np.float64))
    sign = (-1) ** r
    fx = np.broadcast_to(np.asarray(bundle.f(xs), dtype=np.float64), xs.shape)
    d1 = np.broadcast_to(np.asarray(bundle.derivative(r + 1)(xs), dtype=np.float64), xs.shape)
    d2 = np.broadcast_to(np.asarray(bundle.derivative(r + 2)(xs), dtype=np.float64), xs.shape)
    m1 = moment_grid(n, r + 1, params, xs, kind="ordinary")
    m2 = moment_grid(n, r + 2, params, xs, kind="ordinary")
    c2 = (r + 1 if coefficient == "taylor" else 1) / math.factorial(r + 2)
    return (
        apply_higher_grid(bundle, r, n, params, xs)
        - fx
        - sign * d1 * m1 / math.factorial(r + 1)
        - sign * c2 * d2 * m2
    )


def theorem10_check(
    bundle: FunctionBundle,
    r: int,
    params: PQParams,
    n: int,
    grid_size: int = DEFAULT_GRID,
    coefficient: str = "stated",
    k_estimates: Optional[dict] = None,
) -> RemainderCheck:
    """Compare the Voronovskaja-type remainder against its modulus bound.

    K_{r+2} and K_{r+4} default to grid estimates of the ordinary absolute
    moments at this (n, params); pass ``k_estimates`` to supply others.
    """
    if bundle.r_max < r + 2:
        raise ValueError(f"{bundle.name} needs derivatives up to order {r + 2}")
    xs = grid(grid_size)
    lhs_sup = float(np.max(np.abs(remainder_terms(bundle, r, n, params, xs, coefficient))))
    if k_estimates is None:
        k_estimates = {
            m: estimate_constants(m, [n], [params], kind="ordinary", grid_size=grid_size).K_hat
            for m in (r + 2, r + 4)
        }
    bracket = float(pq_int(n, params))
    delta = bracket**-0.5
    omega_sum = sum(
        modulus(bundle.derivative(r + 2 - i), delta, grid_size) / (math.factorial(i) * math.factorial(r + 2 - i))
        for i in range(r + 1)
    )
    envelope = xs * (1 - xs) / bracket ** (r / 2 + 1)
    rhs = (k_estimates[r + 2] + k_estimates[r + 4]) * float(np.max(envelope)) * omega_sum
    ratio = lhs_sup / rhs if rhs > 0 else 0.0
    return RemainderCheck(lhs_sup, rhs, ratio)
