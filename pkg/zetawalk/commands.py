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

"""Commands producing the data tables behind the product, trend, density and walk plots."""

import logging
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Dict, List, Optional

import numpy as np
from scipy import special

from zetawalk import arithmetic, density, file_resources, lattice, montecarlo, product_eval, trend
from zetawalk.config import BaseZetaConfig, PresetConfig
from zetawalk.errors import DomainError
from zetawalk.file_resources import Table
from zetawalk.params import ProductParams, create_product_params

LOG = logging.getLogger(__name__)

SOURCES = ("mobius", "liouville", "all_ones", "sampled")


@dataclass
class RunConfig:
    """Class representing one validated command invocation."""

    command: str
    p: Optional[Fraction] = None
    s: Optional[float] = None
    p_grid: List[Fraction] = field(default_factory=list)
    t_max: float = 10.0
    points: int = 1000
    width: float = 2.0
    tol: Optional[float] = None
    method: Optional[str] = None
    seed: int = 0
    steps: int = 1000
    walks: int = 1
    bins: float = 0.02
    walk: str = "zeta"
    kind: str = "euler_sinc"
    source: str = "mobius"
    n: int = 1000000
    p_ref: Optional[float] = None
    eps: Optional[float] = None
    output: Optional[str] = None
    fmt: str = "csv"
    force: bool = False
    single_thread: bool = False
    settings: BaseZetaConfig = field(default_factory=PresetConfig)

    def params(self, p: Optional[Fraction] = None) -> ProductParams:
        """ProductParams for ``p`` (or the configured p) and the configured s."""
        p = p if p is not None else self.p
        if p is None or self.s is None:
            raise DomainError(f"{self.command} needs both --p and --s")
        return create_product_params(p, self.s)


def _meta(config: RunConfig, **extra) -> Dict:
    from zetawalk import __version__

    meta = {
        "command": config.command,
        "p": str(config.p) if config.p is not None else None,
        "s": config.s,
        "seed": config.seed,
        "tol": config.tol,
        "settings": config.settings.as_dict(),
        "version": __version__,
    }
    meta.update(extra)
    return meta


def _fit_grid(params: ProductParams, t: np.ndarray, cl: np.ndarray, settings: BaseZetaConfig) -> np.ndarray:
    candidates = t[(t > 0.0) & (cl != 0.0)]
    if not params.has_zeros:
        return candidates

    radius = 10.0 * settings.get("product", "zero_radius")
    keep = [abs(value - product_eval.nearest_zero(params, value)) > radius * value for value in candidates.tolist()]
    return candidates[np.asarray(keep, dtype=bool)]


def cmd_eval(config: RunConfig) -> Table:
    """Cl(t) with its trend and the fitted envelope exp(-C t^(1/s) + K t^(1/(s+1)))."""
    params = config.params()
    settings = config.settings
    t = np.linspace(0.0, config.t_max, config.points)
    cl = product_eval.cl_values(params, t, config.tol, settings)
    constants = trend.trend_constants(params, config=settings)

    fit_grid = _fit_grid(params, t, cl, settings)
    k_fit = trend.fit_k(params, constants, fit_grid, config.tol, settings) if fit_grid.size else 0.0
    envelope = np.exp(-constants.c_ps * t ** (1.0 / params.s) + k_fit * t ** (1.0 / (params.s + 1.0)))
    meta = _meta(config, c_ps=constants.c_ps, method=constants.method, k_fit=k_fit)
    return Table(
        ["t", "cl", "trend_factor", "upper_envelope"],
        [t, cl, trend.trend_factor(constants.c_ps, params.s, t), envelope],
        meta,
    )


def cmd_trend(config: RunConfig) -> Table:
    """C_{p;s} over a p-grid, each by the best method for its region."""
    p_values = config.p_grid if config.p_grid else [config.p]
    rows = []
    for p in p_values:
        constants = trend.trend_constants(config.params(p), config.method, config.tol, config.settings)
        LOG.info("C_{%s;%g} = %.12g (%s)", p, config.s, constants.c_ps, constants.method)
        rows.append((float(p), config.s, constants.c_ps, constants.method))
    columns = [list(column) for column in zip(*rows)]
    return Table(["p", "s", "c_ps", "method"], columns, _meta(config))


def cmd_pdf(config: RunConfig) -> Table:
    """Density of the infinite walk, next to the trend law when it has a closed form."""
    params = config.params()
    grid = np.linspace(-config.width, config.width, config.points)
    curve = density.pdf_from_cf(params, grid, config.tol, config=config.settings)
    c = curve.meta["c_ps"]
    if params.s == 2.0:
        law = density.levy_half_curve(c, grid).values
    elif params.s == 1.0:
        law = density.cauchy_curve(c, grid).values
    else:
        law = np.full(grid.size, np.nan)

    meta = _meta(config, mass=curve.mass, clamp=curve.clamp, symmetric=curve.symmetric, t_max=curve.meta["t_max"], c_ps=c)
    return Table(["omega", "density", "levy_or_cauchy"], [grid, curve.values, law], meta)


def cmd_sample(config: RunConfig) -> Table:
    """Histogram of Monte Carlo walk endpoints."""
    params = config.params()
    ensemble = montecarlo.run_ensemble(
        params, config.steps, config.walks, config.seed, config.walk, config.single_thread, config.settings
    )
    counts = montecarlo.histogram(ensemble, config.bins)
    mean, variance = ensemble.moments()
    meta = _meta(config, n_steps=config.steps, n_walks=config.walks, walk=config.walk, mean=mean, variance=variance)
    return Table(["bin_center", "count"], [[c for c, _ in counts], [n for _, n in counts]], meta)


def cmd_lattice(config: RunConfig) -> Table:
    """Exact atoms of the N-step walk."""
    dist = lattice.convolve_lattice(config.params(), config.steps, config=config.settings)
    mean, variance = lattice.lattice_moments(dist)
    meta = _meta(config, n_steps=config.steps, atoms=len(dist), collided=dist.collided, mean=mean, variance=variance)
    return Table(["omega", "probability"], [dist.omega, dist.prob], meta)


def _coefficients(config: RunConfig) -> montecarlo.CoefficientSequence:
    if config.source == "mobius":
        return arithmetic.mobius_sieve(config.n, config.settings)
    if config.source == "liouville":
        return arithmetic.liouville_sieve(config.n, config.settings)
    if config.source == "all_ones":
        return arithmetic.all_ones(config.n)
    if config.source == "sampled":
        if config.p is None:
            raise DomainError("Sampled coefficients need --p")
        return montecarlo.sample_coefficients(float(config.p), config.n, config.seed)
    raise DomainError(f"Unknown source {config.source!r}, choose from {', '.join(SOURCES)}")


def _default_p_ref(config: RunConfig) -> float:
    if config.source == "mobius":
        return 1.0 / float(special.zeta(2.0))
    if config.source == "sampled":
        return float(config.p)
    return 1.0


def cmd_typicality(config: RunConfig) -> Table:
    """Typicality features of a coefficient sequence and its scaled partial-sum curve."""
    coeffs = _coefficients(config)
    s = config.s if config.s is not None else 2.0
    p_ref = config.p_ref if config.p_ref is not None else _default_p_ref(config)
    report = arithmetic.typicality_report(coeffs, s, p_ref, config.eps, config.settings)
    summary = {
        "source": config.source,
        "n": report.n,
        "mean_coeff": report.mean_coeff,
        "nonzero_freq": report.nonzero_freq,
        "partial_sum_at_s": report.partial_sum_at_s,
        "sign_balance": report.sign_balance,
        "p_ref": report.p_ref,
        "nonzero_gap": report.nonzero_gap,
        "longest_zero_run": report.longest_zero_run,
        "longest_sign_run": report.longest_sign_run,
    }
    summary.update({f"pair[{key}]": count for key, count in report.pair_counts.items()})
    return Table(
        ["n", "growth"],
        [[n for n, _ in report.growth_curve], [g for _, g in report.growth_curve]],
        _meta(config, **summary),
        summary,
    )


def sinc_form(kind: str, t: np.ndarray) -> np.ndarray:
    """Closed form of a power product, NaN where none is known."""
    if kind in ("euler_sinc", "morrison_general"):
        return np.sinc(t / math.pi)
    if kind == "morrison_p23":
        return np.sinc(t / (2.0 * math.pi))
    return np.full(np.shape(t), np.nan)


def cmd_power(config: RunConfig) -> Table:
    """Power-walk product against its closed form."""
    t = np.linspace(-config.t_max, config.t_max, config.points)
    base = int(config.s) if config.kind == "morrison_general" and config.s is not None else None
    product = product_eval.power_product_values(config.kind, t, config.tol, base, config.settings)
    reference = sinc_form(config.kind, t)
    diff = np.abs(product - reference)
    max_diff = float(np.max(diff)) if np.all(np.isfinite(diff)) else None
    meta = _meta(config, kind=config.kind, max_diff=max_diff)
    return Table(["t", "product", "sinc_form", "abs_diff"], [t, product, reference, diff], meta)


COMMANDS: Dict[str, Callable[[RunConfig], Table]] = {
    "eval": cmd_eval,
    "trend": cmd_trend,
    "pdf": cmd_pdf,
    "sample": cmd_sample,
    "lattice": cmd_lattice,
    "typicality": cmd_typicality,
    "power": cmd_power,
}


def execute(config: RunConfig) -> Table:
    """Run a command and write its table.

    Args:
        config: Validated invocation.

    Raises:
        ZetaWalkError: If the computation fails.

    Returns:
        The table that was written.

    """
    table = COMMANDS[config.command](config)
    file_resources.write_table(table, config.output, config.fmt, config.force)
    return table
