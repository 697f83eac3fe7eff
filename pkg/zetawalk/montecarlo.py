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

"""Sample random Riemann-zeta walks and compute coin-sequence diagnostics."""

import logging
import math
from concurrent import futures
from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple, Union

import numpy as np

from zetawalk.config import BaseZetaConfig, PresetConfig, worker_count
from zetawalk.errors import CapacityError, DomainError
from zetawalk.params import ProductParams

LOG = logging.getLogger(__name__)

ORIGINS = ("sampled", "mobius", "liouville", "all_ones")
WALK_KINDS = ("zeta", "geometric")

_LANES = 4  # 64-bit outputs per Philox counter increment.


@dataclass(eq=False)
class CoefficientSequence:
    """Class representing the coefficients r(1), ..., r(N) of a walk, each in {-1, 0, 1}."""

    values: np.ndarray  # values[i] is r(i + 1).
    origin: str
    p: Optional[float] = None
    seed: Optional[int] = None

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=np.int8)
        if self.origin not in ORIGINS:
            raise DomainError(f"Unknown origin {self.origin!r}, choose from {', '.join(ORIGINS)}")
        if np.any(np.abs(self.values) > 1):
            raise DomainError("Coefficients must lie in {-1, 0, 1}")
        if self.origin == "all_ones" and not np.all(self.values == 1):
            raise DomainError("all_ones coefficients must all be 1")
        if self.origin == "liouville" and np.any(self.values == 0):
            raise DomainError("Liouville coefficients are never 0")

    @property
    def length(self) -> int:
        return self.values.size

    def at(self, n: int) -> int:
        """r(n) for 1 <= n <= N."""
        if not 1 <= n <= self.length:
            raise DomainError(f"n must lie in [1, {self.length}], got {n}")
        return int(self.values[n - 1])


@dataclass(eq=False)
class WalkEnsemble:
    """Class representing the endpoints of independent walks."""

    endpoints: np.ndarray
    n_steps: int
    n_walks: int
    params: ProductParams
    seed: int
    walk: str = "zeta"

    def moments(self) -> Tuple[float, float]:
        """Sample mean and (unbiased) variance of the endpoints."""
        ddof = 1 if self.n_walks > 1 else 0
        return float(np.mean(self.endpoints)), float(np.var(self.endpoints, ddof=ddof))


def _check_seed(seed: int) -> int:
    if int(seed) != seed or seed < 0:
        raise DomainError(f"seed must be a nonnegative integer, got {seed!r}")
    return int(seed)


def _categorical(u: np.ndarray, p: float) -> np.ndarray:
    return np.where(u < p / 2.0, -1, np.where(u < p, 1, 0)).astype(np.int8)


def sample_coefficients(p: float, n: int, seed: int) -> CoefficientSequence:
    """Draw i.i.d. coefficients with Prob(0) = 1 - p and Prob(-1) = Prob(1) = p/2.

    The sequence equals the coefficients of walk 0 of `run_ensemble` with the same seed.

    Args:
        p: Probability of a nonzero coefficient.
        n: Sequence length.
        seed: Nonnegative seed.

    Raises:
        DomainError: If n < 1, p is outside (0, 1] or the seed is negative.

    Returns:
        Sampled coefficients.

    """
    if n < 1:
        raise DomainError(f"n must be at least 1, got {n}")
    if not 0.0 < p <= 1.0:
        raise DomainError(f"p must lie in (0,1], got {p!r}")
    seed = _check_seed(seed)
    u = np.random.Generator(np.random.Philox(key=seed)).random(n)
    return CoefficientSequence(_categorical(u, p), "sampled", p=p, seed=seed)


def walk_trajectory(coeffs: CoefficientSequence, s: float) -> np.ndarray:
    """Partial sums sum_{n<=k} r(n)/n^s for k = 1..N."""
    if not s > 0.5:
        raise DomainError(f"s must be greater than 1/2, got {s!r}")
    steps = np.arange(1, coeffs.length + 1, dtype=float) ** -s
    return np.cumsum(coeffs.values * steps)


def step_sizes(params: ProductParams, n_steps: int, walk: str = "zeta") -> np.ndarray:
    """Step sizes n^-s of the zeta walk or s^-n of the geometric walk."""
    n = np.arange(1, n_steps + 1, dtype=float)
    if walk == "zeta":
        return n**-params.s
    if walk == "geometric":
        if not params.s > 1.0:
            raise DomainError(f"The geometric walk needs s > 1, got {params.s!r}")
        return params.s**-n
    raise DomainError(f"Unknown walk {walk!r}, choose from {', '.join(WALK_KINDS)}")


def _simulate_block(p: float, steps: np.ndarray, padded: int, seed: int, start: int, stop: int) -> np.ndarray:
    bit_generator = np.random.Philox(key=seed)
    bit_generator.advance(start * padded // _LANES)
    u = np.random.Generator(bit_generator).random((stop - start, padded))[:, : steps.size]
    return (_categorical(u, p) * steps).sum(axis=1)


def run_ensemble(
    params: ProductParams,
    n_steps: int = None,
    n_walks: int = 1,
    seed: int = 0,
    walk: str = "zeta",
    single_thread: bool = False,
    config: BaseZetaConfig = None,
) -> WalkEnsemble:
    """Simulate independent walks and keep their endpoints.

    Walk w consumes its own slice of one counter-based Philox stream keyed by the seed, so the
    endpoints do not depend on how walks are split across blocks or workers.

    Args:
        params: Walk parameters.
        n_steps (optional): Steps per walk, defaults to ``montecarlo.n_steps``.
        n_walks: Number of walks.
        seed: Nonnegative seed.
        walk: ``zeta`` (steps n^-s) or ``geometric`` (steps s^-n).
        single_thread: If True simulate in this process.
        config (optional): Numerical settings.

    Raises:
        DomainError: If n_walks or n_steps is below 1.
        CapacityError: If n_walks * n_steps exceeds ``montecarlo.max_draws``.

    Returns:
        Ensemble of endpoints ordered by walk index.

    """
    config = config if config else PresetConfig()
    n_steps = n_steps if n_steps is not None else config.get("montecarlo", "n_steps")
    seed = _check_seed(seed)
    if n_walks < 1 or n_steps < 1:
        raise DomainError(f"n_walks and n_steps must be at least 1, got {n_walks} and {n_steps}")

    padded = _LANES * math.ceil(n_steps / _LANES)
    cap = config.get("montecarlo", "max_draws")
    if n_walks * padded > cap:
        raise CapacityError(f"{n_walks} walks of {n_steps} steps need too many draws", n_walks * padded, cap)

    steps = step_sizes(params, n_steps, walk)
    rows = max(1, config.get("montecarlo", "block_draws") // padded)
    blocks = [(start, min(start + rows, n_walks)) for start in range(0, n_walks, rows)]
    workers = 1 if single_thread else worker_count(limit=len(blocks))
    LOG.debug("Simulating %d walks in %d blocks on %d workers", n_walks, len(blocks), workers)

    if workers == 1:
        parts = [_simulate_block(params.p, steps, padded, seed, start, stop) for start, stop in blocks]
    else:
        with futures.ProcessPoolExecutor(workers) as executor:
            jobs = [executor.submit(_simulate_block, params.p, steps, padded, seed, start, stop) for start, stop in blocks]
            parts = [job.result() for job in jobs]

    return WalkEnsemble(np.concatenate(parts), n_steps, n_walks, params, seed, walk)


def histogram(ensemble: Union[WalkEnsemble, Sequence[float]], bin_width: float) -> List[Tuple[float, int]]:
    """Count endpoints in bins centered on multiples of ``bin_width``.

    Args:
        ensemble: Ensemble or raw endpoints.
        bin_width: Width of each bin.

    Raises:
        DomainError: If bin_width is not positive.

    Returns:
        Sorted (bin_center, count) pairs for the nonempty bins.

    """
    if not bin_width > 0:
        raise DomainError(f"bin_width must be positive, got {bin_width!r}")
    endpoints = ensemble.endpoints if isinstance(ensemble, WalkEnsemble) else np.asarray(ensemble, dtype=float)
    index, counts = np.unique(np.rint(endpoints / bin_width).astype(np.int64), return_counts=True)
    return [(float(i * bin_width), int(c)) for i, c in zip(index, counts)]


def _check_signs(signs: Sequence[int]) -> np.ndarray:
    values = np.asarray(signs, dtype=np.int64)
    if not np.all(np.abs(values) == 1):
        raise DomainError("signs must lie in {-1, 1}")
    return values


def lil_statistic(signs: Sequence[int], eps: float, config: BaseZetaConfig = None) -> Tuple[int, int]:
    """Count how often a +-1 walk leaves the iterated-logarithm envelope.

    Args:
        signs: Steps of the walk.
        eps: Relative width around sqrt(2 N ln ln N).
        config (optional): Numerical settings, ``arithmetic.lil_n_min`` is the first N scanned.

    Raises:
        DomainError: If eps <= 0, the signs are not +-1 or the walk is shorter than 10 steps.

    Returns:
        (count of N with |S_N| > (1-eps) envelope, count of N with |S_N| > (1+eps) envelope).

    """
    config = config if config else PresetConfig()
    if not eps > 0:
        raise DomainError(f"eps must be positive, got {eps!r}")
    values = _check_signs(signs)
    if values.size < 10:
        raise DomainError(f"The walk needs at least 10 steps, got {values.size}")

    n_min = max(3, config.get("arithmetic", "lil_n_min"))
    partial = np.abs(np.cumsum(values))[n_min - 1 :]
    n = np.arange(n_min, values.size + 1, dtype=float)
    envelope = np.sqrt(2.0 * n * np.log(np.log(n)))
    return int(np.sum(partial > (1.0 - eps) * envelope)), int(np.sum(partial > (1.0 + eps) * envelope))


def log_checkpoints(n: int, per_decade: int) -> np.ndarray:
    """floor(10^(k/per_decade)) up to n, deduplicated, with n itself appended."""
    count = math.floor(per_decade * math.log10(n)) + 1
    grid = np.floor(10.0 ** (np.arange(count) / per_decade) * (1.0 + 1e-12)).astype(np.int64)
    grid = np.unique(np.append(grid[grid <= n], n))
    return grid


def denjoy_statistic(coeffs: CoefficientSequence, eps: float, config: BaseZetaConfig = None) -> List[Tuple[int, float]]:
    """Scaled partial sums N^(-1/2-eps) |sum_{n<=N} r(n)| on a logarithmic N-grid.

    Args:
        coeffs: Coefficient sequence.
        eps: Exponent offset.
        config (optional): Numerical settings, ``arithmetic.checkpoints_per_decade`` sets the grid.

    Raises:
        DomainError: If eps <= 0.

    Returns:
        (N, scaled value) pairs ending at N = len(coeffs).

    """
    config = config if config else PresetConfig()
    if not eps > 0:
        raise DomainError(f"eps must be positive, got {eps!r}")
    grid = log_checkpoints(coeffs.length, config.get("arithmetic", "checkpoints_per_decade"))
    partial = np.cumsum(coeffs.values, dtype=np.int64)[grid - 1]
    scaled = np.abs(partial) * grid.astype(float) ** (-0.5 - eps)
    return list(zip(grid.tolist(), scaled.tolist()))


def pattern_recurrence(values: Sequence[int], pattern: Sequence[int]) -> int:
    """Number of (overlapping) occurrences of ``pattern`` in ``values``."""
    data = np.asarray(values)
    target = np.asarray(pattern)
    if target.size == 0:
        raise DomainError("pattern must not be empty")
    if target.size > data.size:
        return 0
    windows = np.lib.stride_tricks.sliding_window_view(data, target.size)
    return int(np.sum(np.all(windows == target, axis=1)))


def longest_run(values: Sequence[int], value: int) -> int:
    """Length of the longest block of consecutive entries equal to ``value``."""
    hits = np.concatenate(([0], (np.asarray(values) == value).astype(np.int8), [0]))
    edges = np.flatnonzero(np.diff(hits))
    if edges.size == 0:
        return 0
    return int(np.max(edges[1::2] - edges[::2]))


def total_variation(ensemble: WalkEnsemble, dist, edges: Optional[Sequence[float]] = None) -> float:
    """Total-variation distance between the empirical endpoint law and an exact lattice.

    Without ``edges`` every endpoint is matched to the nearest atom; endpoints further than 1e-9
    from any atom count as mass missing from the lattice. With ``edges`` both laws are binned first.

    Args:
        ensemble: Simulated walks.
        dist: LatticeDistribution for the same parameters and step count.
        edges (optional): Bin edges for a binned comparison.

    Returns:
        Distance in [0, 1].

    """
    if edges is not None:
        edges = np.asarray(edges, dtype=float)
        empirical = np.histogram(ensemble.endpoints, bins=edges)[0] / ensemble.n_walks
        exact = np.histogram(dist.omega, bins=edges, weights=dist.prob)[0]
        return 0.5 * float(np.sum(np.abs(empirical - exact)))

    if dist.omega.size == 1:
        nearest = np.zeros(ensemble.n_walks, dtype=np.int64)
    else:
        index = np.clip(np.searchsorted(dist.omega, ensemble.endpoints), 1, dist.omega.size - 1)
        left = dist.omega[index - 1]
        right = dist.omega[index]
        nearest = np.where(np.abs(ensemble.endpoints - left) <= np.abs(ensemble.endpoints - right), index - 1, index)
    matched = np.abs(ensemble.endpoints - dist.omega[nearest]) <= 1e-9
    empirical = np.bincount(nearest[matched], minlength=dist.omega.size) / ensemble.n_walks
    unmatched = 1.0 - float(np.sum(empirical))
    return 0.5 * (float(np.sum(np.abs(empirical - dist.prob))) + unmatched)
