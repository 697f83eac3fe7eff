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

from typing import Optional


class ZetaWalkError(Exception):
    """Base class for all zetawalk failures."""


class DomainError(ZetaWalkError, ValueError):
    """Parameters outside the domain an operation is defined on."""


class CapacityError(ZetaWalkError):
    """A configured cap would have to be exceeded to honour the request."""

    def __init__(self, message: str, required: float, cap: float):
        super().__init__(f"{message} (requires {required:g}, cap is {cap:g})")
        self.required = required
        self.cap = cap


class SingularPointError(ZetaWalkError):
    """Evaluation at (or numerically next to) a singular point."""

    def __init__(self, message: str, point: float, nearest_zero: Optional[float] = None):
        super().__init__(message)
        self.point = point
        self.nearest_zero = nearest_zero


class DependencyError(ZetaWalkError):
    """A quantity an operation depends on could not be produced."""
