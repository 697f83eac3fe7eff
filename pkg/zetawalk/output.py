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

import sys


def print_failed(msg: str) -> None:
    print(f"\033[31m{msg}\033[0m", file=sys.stderr)


def print_summary(msg: str) -> None:
    """Print a one line run summary to stderr, keeping stdout free for table output."""
    print(f"\033[1m{msg}\033[0m", file=sys.stderr)
    print("Done ✨", file=sys.stderr)
