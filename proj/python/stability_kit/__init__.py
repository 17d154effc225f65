#
# Copyright 2026 The stability-kit Authors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#      http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.
#

"""Python front end for the stability-kit C++ core."""

import json

from ._core import (
    InvalidArgument,
    RandomTape,
    consistent_sample,
    corr_samp,
    dp_selection,
    gm_dec,
    gm_enc,
    gm_keygen,
    induced_distribution,
    learner_sample_size,
    r_finite_learn,
    run_suite_json,
    suites,
    tv_distance,
)


def run_suite(config):
    """Run a suite from a config dict. Returns (report dict, passed, warnings)."""
    text, passed, warnings = run_suite_json(json.dumps(config))
    return json.loads(text), passed, warnings


__all__ = [
    "InvalidArgument",
    "RandomTape",
    "consistent_sample",
    "corr_samp",
    "dp_selection",
    "gm_dec",
    "gm_enc",
    "gm_keygen",
    "induced_distribution",
    "learner_sample_size",
    "r_finite_learn",
    "run_suite",
    "run_suite_json",
    "suites",
    "tv_distance",
]
