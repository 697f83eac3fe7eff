# Copyright (C) 2022  Max Wiklund
#
# Licensed under the Apache License, Version 2.0 (the “License”);
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#   http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an “AS IS” BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

"""Evaluation of the trigonometric products Cl_{p;s}(t) and of the power-walk products.

Cl_{p;s}(t) = prod_{n>=1} [1 - p + p cos(t/n^s)] is the characteristic function of the random
Riemann-zeta walk. Factors n <= N are evaluated directly, the remaining log-tail is summed from
the Maclaurin series of ln(1 - p + p cos x) in x^2 using Hurwitz zeta values, and what is left
after that is bounded rigorously.

"""

import logging
import math
from dataclasses import dataclass
from typing import TYPE_CHECKING, List, Optional, Sequence, Tuple, Union

import numpy as np
from scipy import special

from zetawalk.config import BaseZetaConfig, PresetConfig
from zetawalk.errors import CapacityError, DomainError, SingularPointError
from zetawalk.params import ProductParams

if TYPE_CHECKING:
    from zetawalk.trend import TrendConstants

LOG = logging.getLogger(__name__)

ArrayLike = Union[float, Sequence[float], np.ndarray]

# Cauchy estimate on |x| = 1: |ln(1 - p(1 - cos x))| <= -ln(1 - (cosh(1) - 1)) < 0.8 for p <= 1.
_COEFF_BOUND = 0.8

POWER_KINDS = ("euler_sinc", "cantor", "morrison_p23", "morrison_general")


@dataclass(frozen=True)
class TruncationPlan:
    """Number of explicit factors and the bound on the log-tail error left after them."""

    n_terms: int
    tail_bound: float


def log_factor_coefficients(p: float, order: int) -> np.ndarray:
    """Maclaurin coefficients of ln(1 - p + p cos x) as a series in x^2.

    Args:
        p: Probability weight.
        order: Number of coefficients to return.

    Returns:
        Array ``a`` with ln(1 - p + p cos x) = sum_k a[k-1] x^(2k), k = 1..order.

    """
    k = np.arange(order + 1)
    y = p * (-1.0) ** k / special.factorial(2 * k)
    y[0] = 0.0  # p (cos x - 1) has no constant term.

    series = np.zeros(order + 1)
    power = np.zeros(order + 1)
    power[0] = 1.0
    for m in range(1, order + 1):
        power = np.convolve(power, y)[: order + 1]
        series += (-1) ** (m + 1) * power / m

    return series[1:]


def _residual_bound(t_abs: float, s: float, n_terms: int, order: int) -> float:
    x = t_abs / (n_terms + 1) ** s
    if x == 0.0:
        return 0.0
    q = (2 * order + 2) * s
    return _COEFF_BOUND * x ** (2 * order + 2) / (1.0 - x * x) * (1.0 + (n_terms + 1) / (q - 1.0))


def plan_for_terms(params: ProductParams, t: float, n_terms: int, config: BaseZetaConfig = None) -> TruncationPlan:
    """Truncation plan for a fixed number of explicit factors.

    Args:
        params: Product parameters.
        t: Evaluation point.
        n_terms: Number of explicit factors.
        config (optional): Numerical settings.

    Raises:
        DomainError: If the first omitted factor is outside the small-angle regime.

    Returns:
        Plan with the rigorous bound on the remaining log-tail.

    """
    config = config if config else PresetConfig()
    if n_terms < 1:
        raise DomainError(f"n_terms must be positive, got {n_terms}")

    t_abs = abs(float(t))
    if t_abs / (n_terms + 1) ** params.s > config.get("product", "small_angle"):
        raise DomainError(f"{n_terms} factors leave t/(N+1)^s outside the small-angle regime for t={t}")
    return TruncationPlan(n_terms, _residual_bound(t_abs, params.s, n_terms, config.get("product", "log_series_order")))


def truncation_plan(params: ProductParams, t: float, tol: float, config: BaseZetaConfig = None) -> TruncationPlan:
    """Choose the number of explicit factors for an absolute log-tail error below ``tol / 2``.

    Args:
        params: Product parameters.
        t: Evaluation point (the largest |t| of a batch).
        tol: Target absolute error.
        config (optional): Numerical settings.

    Raises:
        DomainError: If tol is not positive or t is not finite.
        CapacityError: If more factors than ``product.max_terms`` are required.

    Returns:
        Truncation plan.

    """
    config = config if config else PresetConfig()
    if not tol > 0:
        raise DomainError(f"tol must be positive, got {tol}")
    t_abs = abs(float(t))
    if not math.isfinite(t_abs):
        raise DomainError(f"t must be finite, got {t}")

    cap = config.get("product", "max_terms")
    order = config.get("product", "log_series_order")
    required = (t_abs / config.get("product", "small_angle")) ** (1.0 / params.s)
    if required > cap:
        raise CapacityError(f"Cl_{{{params.p:g};{params.s:g}}}({t:g}) needs more factors than allowed", required, cap)

    n_terms = max(1, math.ceil(required))
    bound = _residual_bound(t_abs, params.s, n_terms, order)
    while bound >= tol / 2:
        n_terms *= 2
        if n_terms > cap:
            raise CapacityError(f"tol={tol:g} is out of reach at t={t:g}", n_terms, cap)
        bound = _residual_bound(t_abs, params.s, n_terms, order)

    LOG.debug("Truncation for p=%g s=%g t=%g: %d factors, tail bound %.3g", params.p, params.s, t, n_terms, bound)
    return TruncationPlan(n_terms, bound)


def _tail_log(params: ProductParams, t: np.ndarray, n_terms: int, order: int) -> np.ndarray:
    """Sum of ln(1 - p + p cos(t/n^s)) over n > n_terms from the Maclaurin series."""
    k = np.arange(1, order + 1)
    coefficients = log_factor_coefficients(params.p, order) * special.zeta(2 * k * params.s, n_terms + 1)
    return np.polynomial.polynomial.polyval(t * t, np.concatenate(([0.0], coefficients)))


def _head_log_and_sign(
    params: ProductParams, t: np.ndarray, n_terms: int, chunk_elements: int
) -> Tuple[np.ndarray, np.ndarray]:
    """ln|prod_{n<=N} factor| and the sign of the product, 0 where a factor is exactly 0."""
    columns = min(n_terms, chunk_elements)
    rows = max(1, chunk_elements // columns)
    n_blocks = math.ceil(n_terms / columns)

    partials = np.zeros((t.size, n_blocks))
    negatives = np.zeros(t.size, dtype=np.int64)
    vanishing = np.zeros(t.size, dtype=bool)
    for block, start in enumerate(range(0, n_terms, columns)):
        scales = np.arange(start + 1, min(start + columns, n_terms) + 1, dtype=float) ** -params.s
        for r0 in range(0, t.size, rows):
            factors = 1.0 - params.p + params.p * np.cos(np.outer(t[r0 : r0 + rows], scales))
            negatives[r0 : r0 + rows] += np.count_nonzero(factors < 0.0, axis=1)
            vanishing[r0 : r0 + rows] |= np.any(factors == 0.0, axis=1)
            with np.errstate(divide="ignore"):
                logs = np.log(np.abs(factors))
            partials[r0 : r0 + rows, block] = [math.fsum(row) for row in logs]

    log_abs = np.array([math.fsum(row) for row in partials])
    sign = np.where(negatives % 2 == 1, -1.0, 1.0)
    sign[vanishing] = 0.0
    return log_abs, sign


def _log_abs_and_sign(
    params: ProductParams, t: ArrayLike, tol: Optional[float], config: BaseZetaConfig
) -> Tuple[np.ndarray, np.ndarray, TruncationPlan]:
    t_values = np.atleast_1d(np.asarray(t, dtype=float))
    tol = tol if tol is not None else config.get("product", "tol")
    t_max = float(np.max(np.abs(t_values))) if t_values.size else 0.0
    plan = truncation_plan(params, t_max, tol, config)
    log_abs, sign = _planned_log_abs_and_sign(params, t_values, plan, config)
    return log_abs, sign, plan


def _planned_log_abs_and_sign(
    params: ProductParams, t: np.ndarray, plan: TruncationPlan, config: BaseZetaConfig
) -> Tuple[np.ndarray, np.ndarray]:
    log_abs, sign = _head_log_and_sign(params, t, plan.n_terms, config.get("product", "chunk_elements"))
    return log_abs + _tail_log(params, t, plan.n_terms, config.get("product", "log_series_order")), sign


def cl_for_plan(params: ProductParams, t: ArrayLike, plan: TruncationPlan, config: BaseZetaConfig = None) -> np.ndarray:
    """Evaluate Cl_{p;s} with the explicit factor count of ``plan``.

    ln|Cl| is off by at most ``plan.tail_bound`` for |t| up to the t the plan was made for.

    """
    config = config if config else PresetConfig()
    log_abs, sign = _planned_log_abs_and_sign(params, np.atleast_1d(np.asarray(t, dtype=float)), plan, config)
    with np.errstate(under="ignore"):
        return sign * np.exp(log_abs)


def cl_values(params: ProductParams, t: ArrayLike, tol: float = None, config: BaseZetaConfig = None) -> np.ndarray:
    """Evaluate Cl_{p;s} on an array of points.

    Args:
        params: Product parameters.
        t: Evaluation points.
        tol (optional): Absolute error target per point.
        config (optional): Numerical settings.

    Returns:
        Array of product values.

    """
    config = config if config else PresetConfig()
    log_abs, sign, _ = _log_abs_and_sign(params, t, tol, config)
    with np.errstate(under="ignore"):
        return sign * np.exp(log_abs)


def eval_cl(params: ProductParams, t: float, tol: float = None, config: BaseZetaConfig = None) -> float:
    """Evaluate Cl_{p;s}(t) to absolute error ``tol``.

    Args:
        params: Product parameters.
        t: Evaluation point.
        tol (optional): Absolute error target, defaults to ``product.tol``.
        config (optional): Numerical settings.

    Raises:
        DomainError: If tol is not positive.
        CapacityError: If the required number of factors exceeds ``product.max_terms``.

    Returns:
        Product value, at most 1 in magnitude.

    """
    return float(cl_values(params, [t], tol, config)[0])


def finite_product(params: ProductParams, t: ArrayLike, n_terms: int) -> np.ndarray:
    """Exact N-factor partial product, the characteristic function of the N-step walk."""
    t_values = np.atleast_1d(np.asarray(t, dtype=float))
    if n_terms == 0:
        return np.ones_like(t_values)
    scales = np.arange(1, n_terms + 1, dtype=float) ** -params.s
    return np.prod(1.0 - params.p + params.p * np.cos(np.outer(t_values, scales)), axis=1)


def nearest_zero(params: ProductParams, t: float) -> Optional[float]:
    """Product zero closest to ``t`` (same sign as t), None when p < 1/2."""
    if not params.has_zeros:
        return None

    z0 = math.pi - math.acos((1.0 - params.p) / params.p)  # Smallest positive zero of a factor.
    t_abs = abs(float(t))
    n_hi = max(1, math.floor((2.0 * t_abs / z0) ** (1.0 / params.s)))
    scales = np.arange(1, n_hi + 1, dtype=float) ** params.s
    x = t_abs / scales

    m_plus = np.maximum(0.0, np.round((x - z0) / (2.0 * math.pi)))
    m_minus = np.maximum(1.0, np.round((x + z0) / (2.0 * math.pi)))
    candidates = np.concatenate(((2.0 * math.pi * m_plus + z0) * scales, (2.0 * math.pi * m_minus - z0) * scales))
    closest = candidates[np.argmin(np.abs(candidates - t_abs))]
    return math.copysign(float(closest), t) if t else float(closest)


def _check_regular(params: ProductParams, t: float, config: BaseZetaConfig) -> None:
    zero = nearest_zero(params, t)
    if zero is None:
        return
    if abs(abs(t) - abs(zero)) <= config.get("product", "zero_radius") * abs(zero):
        raise SingularPointError(f"t={t!r} is at a zero of Cl_{{{params.p:g};{params.s:g}}}", t, nearest_zero=zero)


def eval_log_cl(params: ProductParams, t: float, tol: float = None, config: BaseZetaConfig = None) -> float:
    """Evaluate ln|Cl_{p;s}(t)| as a sum of logarithms.

    Args:
        params: Product parameters.
        t: Evaluation point.
        tol (optional): Absolute error target on the logarithm.
        config (optional): Numerical settings.

    Raises:
        SingularPointError: If t lies within ``product.zero_radius`` (relative) of a zero.

    Returns:
        Logarithm of the absolute product value.

    """
    return float(log_cl_values(params, [t], tol, config)[0])


def log_cl_values(params: ProductParams, t: ArrayLike, tol: float = None, config: BaseZetaConfig = None) -> np.ndarray:
    """Vectorized `eval_log_cl`."""
    config = config if config else PresetConfig()
    t_values = np.atleast_1d(np.asarray(t, dtype=float))
    for value in t_values:
        _check_regular(params, float(value), config)

    log_abs, sign, _ = _log_abs_and_sign(params, t_values, tol, config)
    if np.any(sign == 0.0):
        index = int(np.argmax(sign == 0.0))
        point = float(t_values[index])
        raise SingularPointError(f"Cl vanishes at t={point!r}", point, nearest_zero=nearest_zero(params, point))
    return log_abs


def fluctuation_factor(
    params: ProductParams, t: float, trend: "TrendConstants", tol: float = None, config: BaseZetaConfig = None
) -> float:
    """Evaluate F_{p;s}(|t|) = Cl_{p;s}(t) exp(C_{p;s} |t|^{1/s}).

    Args:
        params: Product parameters.
        t: Evaluation point.
        trend: Trend constants computed for the same parameters.
        tol (optional): Absolute error target on ln|Cl|.
        config (optional): Numerical settings.

    Raises:
        DomainError: If the trend constants belong to other parameters.

    Returns:
        Fluctuation factor, with the sign of Cl(t).

    """
    config = config if config else PresetConfig()
    if (trend.p, trend.s) != (params.p, params.s):
        raise DomainError(f"Trend constants for p={trend.p:g} s={trend.s:g} do not match p={params.p:g} s={params.s:g}")

    log_abs, sign, _ = _log_abs_and_sign(params, [t], tol, config)
    if sign[0] == 0.0:
        return 0.0
    return float(sign[0] * math.exp(log_abs[0] + trend.c_ps * abs(t) ** (1.0 / params.s)))


def product_zeros(params: ProductParams, n_max: int, t_max: float, config: BaseZetaConfig = None) -> List[float]:
    """List the positive zeros of Cl_{p;s} up to ``t_max`` coming from factors n <= n_max.

    The zeros of factor n are t = n^s [(2j - 1) pi -+ arccos((1-p)/p)], j >= 1.

    Args:
        params: Product parameters.
        n_max: Largest factor index to scan.
        t_max: Upper end of the scanned interval.
        config (optional): Numerical settings.

    Raises:
        DomainError: If n_max < 1 or t_max <= 0.

    Returns:
        Sorted zeros, each verified against the vanishing factor.

    """
    config = config if config else PresetConfig()
    if n_max < 1 or not t_max > 0:
        raise DomainError(f"n_max must be >= 1 and t_max > 0, got n_max={n_max} t_max={t_max}")
    if not params.has_zeros:
        return []

    beta = math.acos((1.0 - params.p) / params.p)
    max_residual = config.get("product", "zero_residual")
    zeros = []
    for n in range(1, n_max + 1):
        scale = n**params.s
        j_max = math.floor((t_max / scale + beta + math.pi) / (2.0 * math.pi))
        if j_max < 1:
            break

        odd = (2.0 * np.arange(1, j_max + 1) - 1.0) * math.pi
        candidates = np.concatenate((scale * (odd - beta), scale * (odd + beta)))
        candidates = candidates[(candidates > 0.0) & (candidates <= t_max)]
        residual = np.abs(1.0 - params.p + params.p * np.cos(candidates / scale))
        if np.any(residual >= max_residual):
            LOG.warning("Dropping %d zero candidates of factor %d failing the residual check", np.sum(residual >= max_residual), n)
        zeros.extend(candidates[residual < max_residual].tolist())

    zeros.sort()
    unique = []
    for zero in zeros:
        if not unique or zero - unique[-1] > 1e-12 * zero:
            unique.append(zero)
    return unique


def power_factor_weights(kind: str, s: Optional[int] = None) -> Tuple[int, np.ndarray, np.ndarray]:
    """Base and cosine weights of a power-walk product prod_n sum_m w_m cos(m t / base^n).

    Args:
        kind: One of `POWER_KINDS`.
        s (optional): Base of ``morrison_general``, an integer >= 2.

    Raises:
        DomainError: For unknown kinds or an invalid base.

    Returns:
        (base, multipliers m, weights w).

    """
    if kind == "euler_sinc":
        return 2, np.array([-1.0, 1.0]), np.array([0.5, 0.5])
    if kind == "cantor":
        return 3, np.array([-1.0, 1.0]), np.array([0.5, 0.5])
    if kind == "morrison_p23":
        return 3, np.array([-1.0, 0.0, 1.0]), np.full(3, 1.0 / 3.0)
    if kind == "morrison_general":
        if s is None or int(s) != s or s < 2:
            raise DomainError(f"morrison_general needs an integer s >= 2, got {s!r}")
        s = int(s)
        m = np.arange(1 - s, s)
        w = (1 - (-1.0) ** (s + m)) / (2.0 * s)
        keep = w > 0.0
        return s, m[keep].astype(float), w[keep]
    raise DomainError(f"Unknown power product {kind!r}, choose from {', '.join(POWER_KINDS)}")


def power_product_values(
    kind: str, t: ArrayLike, tol: float = None, s: Optional[int] = None, config: BaseZetaConfig = None
) -> np.ndarray:
    """Vectorized `eval_power_product`."""
    config = config if config else PresetConfig()
    tol = tol if tol is not None else config.get("power", "tol")
    if not tol > 0:
        raise DomainError(f"tol must be positive, got {tol}")

    base, m, w = power_factor_weights(kind, s)
    t_values = np.atleast_1d(np.asarray(t, dtype=float))
    t_abs = float(np.max(np.abs(t_values))) if t_values.size else 0.0
    second_moment = float(np.sum(w * m * m))
    small_angle = config.get("product", "small_angle")
    cap = config.get("power", "max_factors")

    n_terms = 0
    while (
        np.max(np.abs(m)) * t_abs / base ** (n_terms + 1) > small_angle
        or 1.01 * 0.5 * second_moment * t_abs**2 * base ** (-2.0 * n_terms) / (base**2 - 1.0) >= tol / 2
    ):
        n_terms += 1
        if n_terms > cap:
            raise CapacityError(f"{kind} product at t={t_abs:g} needs too many factors", n_terms, cap)

    args = np.outer(t_values, float(base) ** -np.arange(1, n_terms + 1, dtype=float))
    factors = np.cos(args[..., np.newaxis] * m) @ w
    return np.prod(factors, axis=1)


def eval_power_product(kind: str, t: float, tol: float = None, s: Optional[int] = None, config: BaseZetaConfig = None) -> float:
    """Evaluate one of the power-walk products with a geometric tail bound.

    Args:
        kind: ``euler_sinc`` (prod cos(t/2^n)), ``cantor`` (prod cos(t/3^n)), ``morrison_p23``
            (prod [1/3 + 2/3 cos(t/3^n)]) or ``morrison_general`` (base ``s``).
        t: Evaluation point.
        tol (optional): Absolute error target.
        s (optional): Integer base for ``morrison_general``.
        config (optional): Numerical settings.

    Returns:
        Product value.

    """
    return float(power_product_values(kind, [t], tol, s, config)[0])
