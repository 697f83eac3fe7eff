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

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Union

from zetawalk.errors import DomainError

ProbabilityLike = Union[str, float, int, Fraction]


@dataclass(frozen=True)
class ProductParams:
    """Class representing the (p, s) pair of a random Riemann-zeta walk.

    Each step moves by +-1/n^s with probability p/2 each and stays put with probability 1 - p.

    """

    p: float  # Probability of a non-zero coefficient.
    s: float  # Step-size exponent.
    p_exact: Optional[Fraction] = field(default=None, compare=False, repr=False)

    def __post_init__(self):
        if not 0.0 < self.p <= 1.0:
            raise DomainError(f"p must lie in (0,1], got {self.p!r}")
        if not self.s > 0.5:
            raise DomainError(f"s must be greater than 1/2, got {self.s!r}")

    @property
    def has_zeros(self) -> bool:
        """True when some factor 1 - p + p cos(t/n^s) vanishes for real t."""
        return self.p >= 0.5

    @property
    def p_fraction(self) -> Fraction:
        """Exact value of p, as given on input when it was a fraction."""
        return self.p_exact if self.p_exact is not None else Fraction(self.p)


def parse_probability(value: ProbabilityLike) -> Fraction:
    """Parse a probability written as a float, an int or a fraction string like ``1/3``.

    Args:
        value: Value to parse.

    Raises:
        DomainError: If the value is not a number.

    Returns:
        Exact fraction of the value.

    """
    if isinstance(value, Fraction):
        return value
    try:
        if isinstance(value, str):
            return Fraction(value.strip())
        return Fraction(value)
    except (ValueError, ZeroDivisionError, TypeError):
        raise DomainError(f"Invalid probability {value!r}")


def create_product_params(p: ProbabilityLike, s: float) -> ProductParams:
    """Convenience function to create ProductParams instances.

    Args:
        p: Probability weight, fractions such as ``"1/3"`` are kept exact.
        s: Exponent of the step sizes.

    Returns:
        Validated parameters.

    """
    p_exact = parse_probability(p)
    return ProductParams(p=float(p_exact), s=float(s), p_exact=p_exact)
