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

import copy
import functools
import json
import multiprocessing
import os
import pkgutil
from importlib import resources
from typing import Any, Dict

from zetawalk.errors import DomainError

CONFIG_OPTIONS = [
    f.name.replace(".json", "") for f in resources.files("zetawalk").joinpath("presets").iterdir() if f.name.endswith(".json")
]
CONFIG_OPTIONS.sort()
DEFAULT_PRESET = "default"
THREADS_ENV = "ZETAWALK_THREADS"


@functools.lru_cache(maxsize=None)
def _load_preset(name: str) -> str:
    return pkgutil.get_data("zetawalk", f"presets/{name}.json").decode("utf-8")


class BaseZetaConfig(object):
    """Base class for all config classes.

    If you implement your own config class you need to populate `self._settings`.

    """

    def __init__(self):
        """Construct class with no settings."""
        self._settings: Dict[str, Dict[str, Any]] = {}

    def get(self, section: str, key: str) -> Any:
        """Look up a numerical setting.

        Args:
            section: Module the setting belongs to, e.g. ``"product"``.
            key: Setting name.

        Raises:
            KeyError: If the setting does not exist.

        Returns:
            Setting value.

        """
        try:
            return self._settings[section][key]
        except KeyError:
            raise KeyError(f"Unknown setting {section}.{key}")

    def as_dict(self) -> Dict[str, Dict[str, Any]]:
        """Copy of all settings, used for run metadata."""
        return copy.deepcopy(self._settings)


class PresetConfig(BaseZetaConfig):
    """Class to manage settings shipped with the package."""

    def __init__(self, preset: str = DEFAULT_PRESET):
        """Construct class and load preset.

        Args:
            preset: Preset name, one of `CONFIG_OPTIONS`.

        """
        super().__init__()
        if preset not in CONFIG_OPTIONS:
            raise DomainError(f"Unknown preset {preset!r}, choose from {', '.join(CONFIG_OPTIONS)}")
        self.name = preset
        self._settings = json.loads(_load_preset(preset))


class FileConfig(BaseZetaConfig):
    """Class to manage settings from a user JSON file, overlaid on the default preset."""

    def __init__(self, file_path: str):
        """Construct class and load config.

        Args:
            file_path: Config file path to load.

        """
        super().__init__()
        if not os.path.exists(file_path):
            raise OSError(f'Config file "{file_path}" does not exist')

        self.name = file_path
        self._settings = json.loads(_load_preset(DEFAULT_PRESET))
        with open(file_path) as f:
            overrides = json.load(f)

        for section, values in overrides.items():
            self._settings.setdefault(section, {}).update(values)


def worker_count(limit: int = 0) -> int:
    """Number of worker processes to use.

    Args:
        limit: Upper bound from the caller, 0 for none.

    Raises:
        DomainError: If ``ZETAWALK_THREADS`` is set but not a positive integer.

    Returns:
        Worker count, at least 1.

    """
    workers = multiprocessing.cpu_count()
    env_value = os.environ.get(THREADS_ENV)
    if env_value is not None:
        try:
            requested = int(env_value)
        except ValueError:
            requested = 0
        if requested < 1:
            raise DomainError(f"{THREADS_ENV} must be a positive integer, got {env_value!r}")
        workers = min(workers, requested)

    if limit:
        workers = min(workers, limit)
    return max(workers, 1)
