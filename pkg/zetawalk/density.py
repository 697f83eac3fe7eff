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

"""Probability densities from characteristic functions, and the Levy/Cauchy trend laws."""

import logging
import math
from dataclasses import dataclass, field
from typing import Any, Callable, Dict, Tuple

import numpy as np
from scipy import integrate, special, stats

from zetawalk import product_eval, trend
from zetawalk.config import BaseZetaConfig, PresetConfig
from zetawalk.errors import CapacityError, DependencyError, DomainError, SingularPointError, ZetaWalkError
from zetawalk.params import ProductParams

LOG = logging.getLogger(__name__)

CharFn = Callable[[np.ndarray], np.ndarray]


@dataclass(eq=False)
class DensityCurve:
    """Class representing a density sampled on a sorted grid."""

    grid: np.ndarray
    values: np.ndarray
    mass: float
    meta: Dict[str, Any] = field(default_factory=dict)
    clamp: float = 0.0  # Largest negative value removed by clamping.
    symmetric: bool = True


def _grid(grid) -> np.ndarray:
    values = np.asarray(grid, dtype=float)
    if values.ndim != 1 or values.size < 2 or np.any(np.diff(values) <= 0.0):
        raise DomainError("grid must be a strictly increasing sequence of at least 2 points")
    return values


def _make_curve(grid: np.ndarray, values: np.ndarray, meta: Dict[str, Any], clamp_floor: float = 0.0) -> DensityCurve:
    clamp = max(0.0, -float(np.min(values)))
    peak = float(np.max(values))
    if clamp > max(clamp_floor, 1e-6 * peak):
        LOG.warning("Clamped negative density values down to %.3g (peak %.3g)", -clamp, peak)
    values = np.maximum(values, 0.0)

    symmetric = bool(np.allclose(grid, -grid[::-1], rtol=0.0, atol=1e-12) and np.max(np.abs(values - values[::-1])) < 1e-6)
    return DensityCurve(grid, values, float(integrate.trapezoid(values, grid)), meta, clamp, symmetric)


def _panel_nodes(width: float, t_max: float, nodes_per_panel: int, max_nodes: float) -> Tuple[np.ndarray, np.ndarray]:
    n_panels = max(1, math.ceil(t_max / width))
    if n_panels * nodes_per_panel > max_nodes:
        raise CapacityError(f"Inversion up to t={t_max:g} needs too many nodes", n_panels * nodes_per_panel, max_nodes)
    x, w = np.polynomial.legendre.leggauss(nodes_per_panel)
    starts = np.arange(n_panels) * width
    nodes = (starts[:, np.newaxis] + 0.5 * width * (x + 1.0)).ravel()
    weights = np.tile(0.5 * width * w, n_panels)
    return nodes, weights


def _transform(kernel: Callable, points: np.ndarray, nodes: np.ndarray, weighted: np.ndarray, chunk_elements: int) -> np.ndarray:
    rows = max(1, chunk_elements // nodes.size)
    return np.concatenate(
        [kernel(np.outer(points[i : i + rows], nodes)) @ weighted for i in range(0, points.size, rows)]
    )


def cosine_inversion(
    char_fn: CharFn, grid, t_max: float, nodes_per_panel: int = None, config: BaseZetaConfig = None
) -> np.ndarray:
    """Invert a real, even characteristic function: f(w) = (1/pi) int_0^T cos(w t) phi(t) dt.

    Gauss-Legendre panels of width 2 pi / max(1, max|w|) resolve both the kernel and the unit
    frequency of the first product factor.

    Args:
        char_fn: Vectorized characteristic function.
        grid: Points w to evaluate the density at.
        t_max: Truncation point T.
        nodes_per_panel (optional): Gauss-Legendre order per panel.
        config (optional): Numerical settings.

    Raises:
        CapacityError: If more than ``density.max_nodes`` nodes are needed.

    Returns:
        Density values on the grid, unclamped.

    """
    config = config if config else PresetConfig()
    nodes_per_panel = nodes_per_panel if nodes_per_panel else config.get("density", "nodes_per_panel")
    points = np.asarray(grid, dtype=float)
    width = 2.0 * math.pi / max(1.0, math.ceil(float(np.max(np.abs(points)))))
    nodes, weights = _panel_nodes(width, t_max, nodes_per_panel, config.get("density", "max_nodes"))
    weighted = weights * np.real(char_fn(nodes))
    return _transform(np.cos, points, nodes, weighted, config.get("product", "chunk_elements")) / math.pi


def bin_masses_from_cf(char_fn: CharFn, edges, t_max: float, config: BaseZetaConfig = None) -> np.ndarray:
    """Probabilities of the bins between ``edges`` for a symmetric law with real characteristic function.

    P(a < X < b) = (1/pi) int_0^T [sin(b t) - sin(a t)] / t phi(t) dt, so atoms sitting on an
    edge are split evenly between its two bins.

    Raises:
        CapacityError: If more than ``density.max_nodes`` nodes are needed.

    """
    config = config if config else PresetConfig()
    points = np.asarray(edges, dtype=float)
    width = 2.0 * math.pi / max(1.0, math.ceil(float(np.max(np.abs(points)))))
    nodes, weights = _panel_nodes(
        width, t_max, config.get("density", "nodes_per_panel"), config.get("density", "max_nodes")
    )
    weighted = weights * np.real(char_fn(nodes)) / nodes
    half_cdf = _transform(np.sin, points, nodes, weighted, config.get("product", "chunk_elements")) / math.pi
    return np.diff(half_cdf)


def truncation_point(c: float, s: float, tol: float, margin: float) -> float:
    """T with exp(-c T^(1/s)) = tol/10, stretched by ``margin``."""
    return margin * (math.log(10.0 / tol) / c) ** s


def pdf_from_cf(
    params: ProductParams, grid, tol: float = None, trend_constants: trend.TrendConstants = None, config: BaseZetaConfig = None
) -> DensityCurve:
    """Recover the density of the infinite walk by inverting Cl_{p;s}.

    Args:
        params: Walk parameters.
        grid: Strictly increasing points w.
        tol (optional): Target accuracy, defaults to ``density.tol``.
        trend_constants (optional): Precomputed trend constants.
        config (optional): Numerical settings.

    Raises:
        DependencyError: If the trend constant needed for truncation cannot be computed.
        CapacityError: If the tolerance needs more nodes than allowed.

    Returns:
        Clamped density curve.

    """
    config = config if config else PresetConfig()
    tol = tol if tol is not None else config.get("density", "tol")
    if not tol > 0:
        raise DomainError(f"tol must be positive, got {tol}")
    points = _grid(grid)
    if trend_constants is None:
        try:
            trend_constants = trend.trend_constants(params, config=config)
        except ZetaWalkError as e:
            raise DependencyError(f"Trend constant for p={params.p:g} s={params.s:g} is unavailable: {e}") from e

    t_max = max(2.0 * math.pi, truncation_point(trend_constants.c_ps, params.s, tol, config.get("density", "envelope_margin")))
    cl_tol = tol / (10.0 * t_max)

    def char_fn(t: np.ndarray) -> np.ndarray:
        return product_eval.cl_values(params, t, cl_tol, config)

    values = cosine_inversion(char_fn, points, t_max, config=config)
    LOG.info("Inverted Cl_{%g;%g} up to t=%.4g on %d points", params.p, params.s, t_max, points.size)
    meta = {"p": params.p, "s": params.s, "tol": tol, "t_max": t_max, "c_ps": trend_constants.c_ps}
    return _make_curve(points, values, meta, config.get("density", "clamp_floor"))


def fresnel(u: float) -> Tuple[float, float]:
    """Fresnel integrals (C(u), S(u)) = int_0^u (cos, sin)(pi x^2 / 2) dx."""
    if not u >= 0:
        raise DomainError(f"u must be nonnegative, got {u!r}")
    s, c = special.fresnel(u)
    return float(c), float(s)


def _check_scale(c: float) -> None:
    if not c > 0:
        raise DomainError(f"c must be positive, got {c!r}")


def _levy_half_values(c: float, omega: np.ndarray) -> np.ndarray:
    u = c / np.sqrt(2.0 * math.pi * np.abs(omega))
    s, cf = special.fresnel(u)
    phase = 0.5 * math.pi * u * u
    g = np.sin(phase) * (0.5 - s) + np.cos(phase) * (0.5 - cf)
    return 2.0 * math.pi / (c * c) * u**3 * g


def levy_half_pdf(c: float, omega: float) -> float:
    """Density of the symmetric stable law with characteristic function exp(-c |t|^(1/2)).

    f(w) = (2 pi / c^2) u^3 [sin(pi u^2/2)(1/2 - S(u)) + cos(pi u^2/2)(1/2 - C(u))], u = c / sqrt(2 pi |w|).

    Raises:
        DomainError: If c <= 0.
        SingularPointError: At w = 0 where u is undefined, see `levy_half_peak`.

    """
    _check_scale(c)
    if omega == 0:
        raise SingularPointError("The Levy(1/2) parameterization is singular at omega=0", 0.0)
    return float(_levy_half_values(c, np.array([float(omega)]))[0])


def levy_half_tail(c: float, omega: float) -> float:
    """Leading tail c / (2 sqrt(2 pi)) |w|^(-3/2) of `levy_half_pdf`."""
    _check_scale(c)
    if omega == 0:
        raise SingularPointError("The Levy(1/2) tail is singular at omega=0", 0.0)
    return c / (2.0 * math.sqrt(2.0 * math.pi)) * abs(omega) ** -1.5


def levy_half_peak(c: float) -> float:
    """f(0) of `levy_half_pdf`, extrapolated from small |w| (f is smooth and even)."""
    _check_scale(c)
    h = 1e-3 * c * c
    f = _levy_half_values(c, np.array([h, h / 2.0, h / 4.0]))
    first = (4.0 * f[1] - f[0]) / 3.0
    second = (4.0 * f[2] - f[1]) / 3.0
    return float((16.0 * second - first) / 15.0)


def levy_half_curve(c: float, grid) -> DensityCurve:
    """`levy_half_pdf` on a grid, using `levy_half_peak` at w = 0."""
    _check_scale(c)
    points = _grid(grid)
    values = np.empty_like(points)
    zero = points == 0.0
    values[~zero] = _levy_half_values(c, points[~zero])
    values[zero] = levy_half_peak(c)
    return _make_curve(points, values, {"law": "levy_half", "c": c})


def cauchy_pdf(c: float, omega):
    """(1/pi) c / (c^2 + w^2), the law with characteristic function exp(-c |t|)."""
    _check_scale(c)
    result = stats.cauchy.pdf(omega, loc=0.0, scale=c)
    return float(result) if np.ndim(result) == 0 else result


def cauchy_curve(c: float, grid) -> DensityCurve:
    points = _grid(grid)
    return _make_curve(points, cauchy_pdf(c, points), {"law": "cauchy", "c": c})


def compare_curves(a: DensityCurve, b: DensityCurve) -> Tuple[float, float]:
    """Sup and trapezoid-L1 distance between two curves on the same grid.

    Raises:
        DomainError: If the grids differ.

    """
    if a.grid.shape != b.grid.shape or not np.array_equal(a.grid, b.grid):
        raise DomainError("Curves must share the same grid")
    diff = np.abs(a.values - b.values)
    return float(np.max(diff)), float(integrate.trapezoid(diff, a.grid))
