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

"""Exact distribution of the N-step walk as a weighted sum of point masses."""

import logging
from dataclasses import dataclass
from fractions import Fraction
from typing import List, Tuple, Union

import numpy as np

from zetawalk.config import BaseZetaConfig, PresetConfig
from zetawalk.errors import CapacityError, DomainError
from zetawalk.params import ProductParams

LOG = logging.getLogger(__name__)


@dataclass(eq=False)
class LatticeDistribution:
    """Class representing the atoms of the N-step walk, sorted by position."""

    omega: np.ndarray
    prob: np.ndarray
    n_steps: int
    params: ProductParams
    collided: bool = False  # True when distinct paths landed on the same position.

    @property
    def atoms(self) -> List[Tuple[float, float]]:
        """(position, probability) pairs."""
        return list(zip(self.omega.tolist(), self.prob.tolist()))

    def __len__(self) -> int:
        return self.omega.size


def _coalesce(omega: np.ndarray, prob: np.ndarray, merge_eps: float) -> Tuple[np.ndarray, np.ndarray, bool]:
    starts = np.flatnonzero(np.concatenate(([True], np.diff(omega) >= merge_eps)))
    if starts.size == omega.size:
        return omega, prob, False

    merged_prob = np.add.reduceat(prob, starts)
    counts = np.diff(np.append(starts, omega.size))
    merged_omega = np.where(counts > 1, np.add.reduceat(omega * prob, starts) / merged_prob, omega[starts])
    return merged_omega, merged_prob, True


def convolve_lattice(
    params: ProductParams, n_steps: int, merge_eps: float = None, config: BaseZetaConfig = None
) -> LatticeDistribution:
    """Convolve the step measures (p/2) d_{-1/n^s} + (1-p) d_0 + (p/2) d_{1/n^s} for n = 1..N.

    Args:
        params: Walk parameters.
        n_steps: Number of steps N.
        merge_eps (optional): Atoms closer than this are merged, probabilities added.
        config (optional): Numerical settings.

    Raises:
        DomainError: If n_steps is negative.
        CapacityError: If n_steps exceeds the configured cap.

    Returns:
        Exact distribution of the N-step walk.

    """
    config = config if config else PresetConfig()
    merge_eps = merge_eps if merge_eps is not None else config.get("lattice", "merge_eps")
    cap = config.get("lattice", "max_steps_binary" if params.p == 1.0 else "max_steps")
    if n_steps < 0:
        raise DomainError(f"n_steps must be nonnegative, got {n_steps}")
    if n_steps > cap:
        raise CapacityError(f"Exact lattice with {n_steps} steps is too large", n_steps, cap)

    half, stay = params.p / 2.0, 1.0 - params.p
    omega = np.zeros(1)
    prob = np.ones(1)
    collided = False
    for n in range(1, n_steps + 1):
        step = n**-params.s
        if stay > 0.0:
            omega = np.concatenate((omega - step, omega, omega + step))
            prob = np.concatenate((prob * half, prob * stay, prob * half))
        else:
            omega = np.concatenate((omega - step, omega + step))
            prob = np.concatenate((prob * half, prob * half))

        order = np.argsort(omega, kind="stable")
        omega, prob, merged = _coalesce(omega[order], prob[order], merge_eps)
        collided |= merged

    if collided:
        LOG.warning("Lattice for p=%g s=%g has colliding positions after %d steps", params.p, params.s, n_steps)
    return LatticeDistribution(omega, prob, n_steps, params, collided)


def atom_probability(params: ProductParams, n_steps: int, move_count: int, exact: bool = False) -> Union[float, Fraction]:
    """Probability (p/2)^m (1-p)^(N-m) of one path with m moves, independent of s.

    Args:
        params: Walk parameters.
        n_steps: Number of steps N.
        move_count: Number m of nonzero steps.
        exact: Use the exact fraction of p.

    Raises:
        DomainError: If m is outside [0, N].

    Returns:
        Path probability.

    """
    if not 0 <= move_count <= n_steps:
        raise DomainError(f"move_count must lie in [0, {n_steps}], got {move_count}")
    p = params.p_fraction if exact else params.p
    return (p / 2) ** move_count * (1 - p) ** (n_steps - move_count)


def lattice_char_fn(dist: LatticeDistribution, t):
    """sum prob * exp(i t omega), the characteristic function of the N-step walk."""
    t_values = np.asarray(t, dtype=float)
    result = np.exp(1j * np.outer(t_values.ravel(), dist.omega)) @ dist.prob
    return complex(result[0]) if t_values.ndim == 0 else result.reshape(t_values.shape)


def lattice_moments(dist: LatticeDistribution) -> Tuple[float, float]:
    """Mean and variance of the atoms."""
    mean = float(np.dot(dist.prob, dist.omega))
    return mean, float(np.dot(dist.prob, (dist.omega - mean) ** 2))


def binned_masses(dist: LatticeDistribution, edges) -> np.ndarray:
    """Probability of each bin [edges[i], edges[i+1])."""
    return np.histogram(dist.omega, bins=np.asarray(edges, dtype=float), weights=dist.prob)[0]
