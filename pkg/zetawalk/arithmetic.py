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

"""Number-theoretic coefficient sequences and typicality reports."""

import logging
import math
from dataclasses import dataclass, field
from typing import Dict, List, Tuple

import numpy as np

from zetawalk.config import BaseZetaConfig, PresetConfig
from zetawalk.errors import CapacityError, DomainError
from zetawalk.montecarlo import CoefficientSequence, denjoy_statistic, longest_run, pattern_recurrence

LOG = logging.getLogger(__name__)

_CHUNK = 1 << 20
PAIR_PATTERNS = [(a, b) for a in (-1, 0, 1) for b in (-1, 0, 1)]


@dataclass
class TypicalityReport:
    """Class representing the typicality features of a coefficient sequence at full length."""

    n: int
    mean_coeff: float  # (1/N) sum r(n)
    nonzero_freq: float  # (1/N) sum |r(n)|
    partial_sum_at_s: float  # sum r(n)/n^s
    growth_curve: List[Tuple[int, float]] = field(default_factory=list)
    sign_balance: float = 0.0  # Frequency of +1 minus frequency of -1 among nonzero values.
    p_ref: float = 1.0
    nonzero_gap: float = 0.0  # nonzero_freq - p_ref
    longest_zero_run: int = 0
    longest_sign_run: int = 0  # Longest block of equal nonzero values.
    pair_counts: Dict[str, int] = field(default_factory=dict)  # "a:b" -> overlapping occurrences of (a, b).


def _check_size(n: int, config: BaseZetaConfig) -> None:
    cap = config.get("arithmetic", "max_n")
    if n < 1:
        raise DomainError(f"n must be at least 1, got {n}")
    if n > cap:
        raise CapacityError(f"Sieve up to {n} is too large", n, cap)


def prime_sieve(n: int) -> np.ndarray:
    """Primes up to n by the sieve of Eratosthenes."""
    if n < 2:
        return np.array([], dtype=np.int64)
    is_prime = np.ones(n + 1, dtype=bool)
    is_prime[:2] = False
    for i in range(2, math.isqrt(n) + 1):
        if is_prime[i]:
            is_prime[i * i :: i] = False
    return np.flatnonzero(is_prime)


def mobius_sieve(n: int, config: BaseZetaConfig = None) -> CoefficientSequence:
    """Mobius function mu(1), ..., mu(n).

    Args:
        n: Sequence length.
        config (optional): Numerical settings, ``arithmetic.max_n`` caps n.

    Raises:
        DomainError: If n < 1.
        CapacityError: If n exceeds the cap.

    Returns:
        Coefficients with origin ``mobius``.

    """
    config = config if config else PresetConfig()
    _check_size(n, config)
    mu = np.ones(n + 1, dtype=np.int8)
    for p in prime_sieve(n).tolist():
        mu[p::p] *= -1
        if p * p <= n:
            mu[p * p :: p * p] = 0
    return CoefficientSequence(mu[1:], "mobius")


def liouville_sieve(n: int, config: BaseZetaConfig = None) -> CoefficientSequence:
    """Liouville function lambda(k) = (-1)^Omega(k) for k = 1..n, Omega counting multiplicity.

    Raises:
        DomainError: If n < 1.
        CapacityError: If n exceeds ``arithmetic.max_n``.

    """
    config = config if config else PresetConfig()
    _check_size(n, config)
    parity = np.zeros(n + 1, dtype=np.int8)
    for p in prime_sieve(n).tolist():
        power = p
        while power <= n:
            parity[power::power] ^= 1
            power *= p
    return CoefficientSequence(1 - 2 * parity[1:], "liouville")


def all_ones(n: int) -> CoefficientSequence:
    """The coefficients of zeta itself."""
    if n < 1:
        raise DomainError(f"n must be at least 1, got {n}")
    return CoefficientSequence(np.ones(n, dtype=np.int8), "all_ones")


def mertens(coeffs: CoefficientSequence) -> np.ndarray:
    """Partial sums sum_{k<=n} r(k), the Mertens function for Mobius coefficients."""
    return np.cumsum(coeffs.values, dtype=np.int64)


def zeta_partial(s: float, n: int) -> float:
    """sum_{k<=n} k^-s, summed from the small terms up.

    Raises:
        DomainError: If s <= 1 or n < 1.

    """
    if not s > 1.0:
        raise DomainError(f"s must be greater than 1, got {s!r}")
    if n < 1:
        raise DomainError(f"n must be at least 1, got {n}")
    chunks = []
    for stop in range(n, 0, -_CHUNK):
        k = np.arange(stop, max(stop - _CHUNK, 0), -1, dtype=float)
        chunks.append(float(np.sum(k**-s)))
    return math.fsum(chunks)


def _dirichlet_sum(values: np.ndarray, s: float) -> float:
    chunks = []
    for start in range(0, values.size, _CHUNK):
        k = np.arange(start + 1, min(start + _CHUNK, values.size) + 1, dtype=float)
        chunks.append(float(np.sum(values[start : start + _CHUNK] * k**-s)))
    return math.fsum(chunks)


def zeta_tail_bound(s: float, n: int) -> float:
    """Upper bound n^(1-s)/(s-1) on sum_{k>n} k^-s."""
    if not s > 1.0:
        raise DomainError(f"s must be greater than 1, got {s!r}")
    return n ** (1.0 - s) / (s - 1.0)


def typicality_report(
    coeffs: CoefficientSequence, s: float, p_ref: float, eps: float = None, config: BaseZetaConfig = None
) -> TypicalityReport:
    """Compute the typicality features of a coefficient sequence.

    Args:
        coeffs: Nonempty coefficient sequence.
        s: Exponent of the partial sum sum r(n)/n^s.
        p_ref: Reference probability the nonzero frequency is compared against.
        eps (optional): Exponent offset of the growth curve, defaults to ``arithmetic.denjoy_eps``.
        config (optional): Numerical settings.

    Raises:
        DomainError: If the sequence is empty or s <= 1/2.

    Returns:
        Report at full length.

    """
    config = config if config else PresetConfig()
    eps = eps if eps is not None else config.get("arithmetic", "denjoy_eps")
    if coeffs.length == 0:
        raise DomainError("coeffs must not be empty")
    if not s > 0.5:
        raise DomainError(f"s must be greater than 1/2, got {s!r}")

    values = coeffs.values
    n = coeffs.length
    nonzero = int(np.count_nonzero(values))
    total = int(np.sum(values, dtype=np.int64))
    nonzero_freq = nonzero / n
    report = TypicalityReport(
        n=n,
        mean_coeff=total / n,
        nonzero_freq=nonzero_freq,
        partial_sum_at_s=_dirichlet_sum(values, s),
        growth_curve=denjoy_statistic(coeffs, eps, config),
        sign_balance=total / nonzero if nonzero else 0.0,
        p_ref=p_ref,
        nonzero_gap=nonzero_freq - p_ref,
        longest_zero_run=longest_run(values, 0),
        longest_sign_run=max(longest_run(values, 1), longest_run(values, -1)),
        pair_counts={f"{a}:{b}": pattern_recurrence(values, [a, b]) for a, b in PAIR_PATTERNS},
    )
    LOG.debug("Typicality of %s at N=%d: nonzero frequency %g vs %g", coeffs.origin, n, nonzero_freq, p_ref)
    return report
