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

"""Trend constants A_s, B_{p;s} and C_{p;s} of the products Cl_{p;s}, and the fluctuation fit K_{p;s}."""

import dataclasses
import logging
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, List, Optional, Sequence, Tuple

import numpy as np
from scipy import integrate, special

from zetawalk import product_eval
from zetawalk.config import BaseZetaConfig, PresetConfig
from zetawalk.errors import CapacityError, DomainError
from zetawalk.params import ProductParams

LOG = logging.getLogger(__name__)

METHODS = ("series", "quadrature", "closed_form_s1")


@dataclass(frozen=True)
class TrendConstants:
    """Class representing the constants of the trend exp(-C_{p;s} |t|^{1/s})."""

    p: float
    s: float
    a_s: float
    b_ps: Optional[float]  # Only defined for p < 1/2.
    c_ps: float
    method: str
    k_fit: Optional[float] = None

    def with_k(self, k_fit: float) -> "TrendConstants":
        """Copy of the constants carrying a fitted fluctuation bound."""
        return dataclasses.replace(self, k_fit=k_fit)


def a_s(s: float) -> float:
    """A_s = Gamma(1 - 1/s) cos(pi / 2s), continuous through s = 1 where it equals pi/2.

    Written as Gamma(1 + e) (pi/2) sinc(e/2) with e = 1 - 1/s, which has no removable singularity.

    """
    if not s > 0.5:
        raise DomainError(f"s must be greater than 1/2, got {s!r}")
    e = 1.0 - 1.0 / s
    return float(special.gamma(1.0 + e) * (math.pi / 2.0) * np.sinc(e / 2.0))


def _inner_binomial_sum(n: int, s: float) -> float:
    k = np.arange(0, n // 2 + 1, dtype=float)
    log_weight = special.gammaln(n + 1.0) - special.gammaln(k + 1.0) - special.gammaln(n - k + 1.0) - n * math.log(2.0)
    return float(np.sum(np.exp(log_weight) * (1.0 + n - 2.0 * k) ** (1.0 / s) / (1.0 + n - k)))


def b_ps(p: float, s: float, tol: float = None, config: BaseZetaConfig = None) -> float:
    """Sum the alternating series B_{p;s}.

    B_{p;s} = sum_n (-1)^n (p/(1-p))^{n+1} 2^{-n} sum_{k<=ceil((n-1)/2)} binom(n,k) (1+n-2k)^{1/s} / (1+n-k)

    Args:
        p: Probability weight, strictly below 1/2.
        s: Exponent.
        tol (optional): Stop once two consecutive terms are below tol/4.
        config (optional): Numerical settings.

    Raises:
        DomainError: If p >= 1/2, where the series diverges.
        CapacityError: If more than ``trend.series_max_terms`` terms are needed.

    Returns:
        Series value.

    """
    config = config if config else PresetConfig()
    tol = tol if tol is not None else config.get("trend", "tol")
    if not 0.0 < p < 0.5:
        raise DomainError(f"The B series needs p in (0, 1/2), got {p!r}")
    if not s > 0.5:
        raise DomainError(f"s must be greater than 1/2, got {s!r}")

    ratio = p / (1.0 - p)
    cap = config.get("trend", "series_max_terms")
    terms = []
    small = 0
    n = 0
    while small < 2:
        term = (-1.0) ** n * ratio ** (n + 1) * _inner_binomial_sum(n, s)
        terms.append(term)
        small = small + 1 if abs(term) < tol / 4 else 0
        n += 1
        if n > cap:
            raise CapacityError(f"B series for p={p:g} s={s:g} does not settle", n, cap)

    LOG.debug("B_{%g;%g} summed with %d terms", p, s, n)
    return math.fsum(terms)


def c_p1_closed(p: float) -> float:
    """C_{p;1} = (pi/2)(1 - sqrt(1 - 2p)) for p in (0, 1/2)."""
    if not 0.0 < p < 0.5:
        raise DomainError(f"The closed form of C_{{p;1}} holds for p in (0, 1/2), got {p!r}")
    return math.pi / 2.0 * (1.0 - math.sqrt(1.0 - 2.0 * p))


def _log_factor(p: float) -> Callable[[float], float]:
    def g(x: float) -> float:
        y = 2.0 * p * math.sin(0.5 * x) ** 2
        if y < 1.0:
            return math.log1p(-y)
        return math.log(y - 1.0) if y > 1.0 else -745.0

    return g


def _factor_roots(p: float) -> List[float]:
    """Zeros of 1 - p + p cos x in [0, 2 pi], once per factor of 2p sin((x - r1)/2) sin((x - r2)/2)."""
    if p < 0.5:
        return []
    beta = math.acos((1.0 - p) / p)
    return [math.pi - beta, math.pi + beta]


def _is_root(x: float, root: float) -> bool:
    k = (x - root) / (2.0 * math.pi)
    return abs(k - round(k)) < 1e-12


def _half_sinc(u: float) -> float:
    return math.sin(0.5 * u) / u if u else 0.5


def _quad(func: Callable, a: float, b: float, epsabs: float, limit: int, **kwargs) -> Tuple[float, float]:
    result = integrate.quad(func, a, b, epsabs=epsabs, epsrel=0.0, limit=limit, full_output=1, **kwargs)
    if len(result) > 3:
        LOG.debug("quad on [%g, %g]: %s", a, b, result[3])
    return result[0], result[1]


def _panel(
    p: float, roots: List[float], weight: Callable[[float], float], a: float, b: float, epsabs: float, limit: int
) -> Tuple[float, float]:
    """int_a^b ln|1 - p + p cos x| weight(x) dx where a or b may be zeros of the factor.

    ln|x - a| and ln|b - x| are split off and integrated against QUADPACK's logarithmic weights;
    the rest is smooth on the closed panel.

    """
    at_a = [r for r in roots if _is_root(a, r)]
    at_b = [r for r in roots if _is_root(b, r)]
    if not at_a and not at_b:
        g = _log_factor(p)
        return _quad(lambda x: g(x) * weight(x), a, b, epsabs, limit)

    log_2p = math.log(2.0 * p)

    def smooth(x: float) -> float:
        total = log_2p
        for r in roots:
            if r in at_a:
                total += math.log(abs(_half_sinc(x - a)))
            elif r in at_b:
                total += math.log(abs(_half_sinc(b - x)))
            else:
                total += math.log(abs(math.sin(0.5 * (x - r))))
        return total * weight(x)

    value, error = _quad(smooth, a, b, epsabs, limit)
    for count, kind in ((len(at_a), "alg-loga"), (len(at_b), "alg-logb")):
        if count:
            part, part_error = _quad(weight, a, b, epsabs, limit, weight=kind, wvar=(0.0, 0.0))
            value += count * part
            error += count * part_error
    return value, error


def c_ps_quadrature(p: float, s: float, tol: float = None, config: BaseZetaConfig = None) -> float:
    """Evaluate C_{p;s} = -(1/s) int_0^inf ln|1 - p + p cos x| x^{-1-1/s} dx.

    The first ``trend.head_periods`` periods are integrated with adaptive quadrature, weighting
    the origin with x^{1-1/s}. For p >= 1/2 the panels end on the zeros of the factor, where
    the logarithm is integrated against an exact log weight. Beyond the head, each period is
    expanded in powers of theta/(2 pi j) and the sums over j become Hurwitz zeta values
    multiplying the moments of ln|1 - p + p cos theta| on one period.

    Args:
        p: Probability weight in (0, 1].
        s: Exponent, greater than 1/2.
        tol (optional): Absolute error target.
        config (optional): Numerical settings.

    Raises:
        DomainError: For invalid parameters.
        CapacityError: If the quadrature or the tail expansion cannot reach tol.

    Returns:
        The trend constant.

    """
    config = config if config else PresetConfig()
    tol = tol if tol is not None else config.get("trend", "tol")
    ProductParams(p=p, s=s)

    alpha = 1.0 + 1.0 / s
    g = _log_factor(p)
    limit = config.get("trend", "quad_limit")
    periods = config.get("trend", "head_periods")
    two_pi = 2.0 * math.pi

    roots = _factor_roots(p)
    singular = sorted(set(roots))
    pieces = 3 * (3 * periods + 2)
    epsabs = tol / (10.0 * pieces)

    # Near the origin the integrand behaves like x^{1-1/s}.
    origin_end = singular[0] / 2.0 if singular else math.pi
    head, head_error = _quad(
        lambda x: g(x) / (x * x) if x else -0.5 * p, 0.0, origin_end, epsabs, limit, weight="alg", wvar=(1.0 - 1.0 / s, 0.0)
    )

    bounds = [origin_end] + [two_pi * j + x for j in range(periods) for x in singular + [two_pi]]
    bounds = sorted(b for b in set(bounds) if b >= origin_end)
    for a, b in zip(bounds[:-1], bounds[1:]):
        value, error = _panel(p, roots, lambda x: x**-alpha, a, b, epsabs, limit)
        head += value
        head_error += error

    tail, tail_error = _period_tail(p, roots, alpha, periods, epsabs, limit, tol, config)
    error = (head_error + tail_error) / s
    if error > 10.0 * tol:
        raise CapacityError(f"C_{{{p:g};{s:g}}} quadrature cannot reach tol={tol:g}", error, tol)

    LOG.debug("C_{%g;%g} quadrature: head %.16g tail %.16g error %.3g", p, s, head, tail, error)
    return -(head + tail) / s


def _period_tail(
    p: float,
    roots: List[float],
    alpha: float,
    periods: int,
    epsabs: float,
    limit: int,
    tol: float,
    config: BaseZetaConfig,
) -> Tuple[float, float]:
    """sum_{j >= periods} int_0^{2 pi} g(theta) (2 pi j + theta)^{-alpha} d theta."""
    two_pi = 2.0 * math.pi
    max_order = config.get("trend", "tail_max_order")
    edges = [0.0] + sorted(set(roots)) + [two_pi]

    terms = []
    error = 0.0
    binomial = 1.0
    small = 0
    for r in range(max_order + 1):
        if r:
            binomial *= (-alpha - r + 1.0) / r
        moment, moment_error = 0.0, 0.0
        for a, b in zip(edges[:-1], edges[1:]):
            value, value_error = _panel(p, roots, lambda x: (x / two_pi) ** r, a, b, epsabs, limit)
            moment += value
            moment_error += value_error
        weight = binomial * two_pi**-alpha * special.zeta(alpha + r, periods)
        term = weight * moment
        terms.append(term)
        error += abs(weight) * moment_error
        small = small + 1 if abs(term) < tol / 100.0 else 0
        if small == 2:
            return math.fsum(terms), error + abs(term)

    raise CapacityError("Period expansion of the trend integral does not settle", max_order + 1, max_order)


def trend_factor(c: float, s: float, t):
    """exp(-c |t|^{1/s}), the Levy-stable trend of Cl_{p;s}; accepts scalars or arrays."""
    if not c > 0:
        raise DomainError(f"c must be positive, got {c!r}")
    result = np.exp(-c * np.abs(np.asarray(t, dtype=float)) ** (1.0 / s))
    return float(result) if np.ndim(result) == 0 else result


def trend_constants(
    params: ProductParams, method: Optional[str] = None, tol: float = None, config: BaseZetaConfig = None
) -> TrendConstants:
    """Compute the trend constants by the requested (or best available) method.

    Args:
        params: Product parameters.
        method (optional): One of `METHODS`. Defaults to the closed form for s = 1 and p < 1/2,
            the series for other p < 1/2 and quadrature otherwise.
        tol (optional): Absolute error target.
        config (optional): Numerical settings.

    Raises:
        DomainError: If the method does not apply to the parameters.

    Returns:
        Trend constants.

    """
    config = config if config else PresetConfig()
    p, s = params.p, params.s
    if method is None:
        if p < 0.5:
            method = "closed_form_s1" if s == 1.0 else "series"
        else:
            method = "quadrature"

    a = a_s(s)
    if method == "series":
        b = b_ps(p, s, tol, config)
        return TrendConstants(p, s, a, b, a * b, method)
    if method == "closed_form_s1":
        if s != 1.0:
            raise DomainError(f"The closed form needs s = 1, got {s!r}")
        c = c_p1_closed(p)
        return TrendConstants(p, s, a, 1.0 - math.sqrt(1.0 - 2.0 * p), c, method)
    if method == "quadrature":
        c = c_ps_quadrature(p, s, tol, config)
        return TrendConstants(p, s, a, c / a if p < 0.5 else None, c, method)
    raise DomainError(f"Unknown method {method!r}, choose from {', '.join(METHODS)}")


def log_fluctuation(
    params: ProductParams, t_grid: Sequence[float], trend: TrendConstants, tol: float = None, config: BaseZetaConfig = None
) -> np.ndarray:
    """ln|F_{p;s}(|t|)| = ln|Cl_{p;s}(t)| + C_{p;s} |t|^{1/s} on a grid."""
    t_values = np.asarray(t_grid, dtype=float)
    log_cl = product_eval.log_cl_values(params, t_values, tol, config)
    return log_cl + trend.c_ps * np.abs(t_values) ** (1.0 / params.s)


def fit_k_from_values(t_grid: Sequence[float], log_abs_f: Sequence[float], s: float) -> float:
    """Smallest K with ln|F(t)| <= K |t|^{1/(s+1)} on the grid, clamped below at 0."""
    t_values = np.abs(np.asarray(t_grid, dtype=float))
    values = np.asarray(log_abs_f, dtype=float)
    if t_values.size == 0 or t_values.shape != values.shape:
        raise DomainError("t_grid must be nonempty and match the fluctuation values")
    if np.any(t_values == 0.0):
        raise DomainError("t_grid must not contain 0")
    return max(0.0, float(np.max(values / t_values ** (1.0 / (s + 1.0)))))


def fit_k(
    params: ProductParams, trend: TrendConstants, t_grid: Sequence[float], tol: float = None, config: BaseZetaConfig = None
) -> float:
    """Fit the fluctuation bound |F_{p;s}(|t|)| <= exp(K |t|^{1/(s+1)}) on a grid.

    Args:
        params: Product parameters.
        trend: Trend constants for the same parameters.
        t_grid: Nonzero evaluation points avoiding product zeros.
        tol (optional): Absolute error target on ln|Cl|.
        config (optional): Numerical settings.

    Raises:
        SingularPointError: If a grid point is at a product zero.

    Returns:
        The empirical K.

    """
    if len(t_grid) == 0:
        raise DomainError("t_grid must be nonempty")
    return fit_k_from_values(t_grid, log_fluctuation(params, t_grid, trend, tol, config), params.s)


def binom_midpoint_identity(n: int) -> Tuple[Fraction, Fraction]:
    """Both sides of sum_{k<=ceil((n-1)/2)} binom(n,k)(1+n-2k)/(1+n-k) = binom(n, floor(n/2)), exactly."""
    if n < 0:
        raise DomainError(f"n must be nonnegative, got {n}")
    lhs = sum(Fraction(math.comb(n, k) * (1 + n - 2 * k), 1 + n - k) for k in range(n // 2 + 1))
    return Fraction(lhs), Fraction(math.comb(n, n // 2))
