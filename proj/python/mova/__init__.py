# Copyright 2026 The mova Authors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#  http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.
"""Moving-speaker tracking and extraction toolkit."""

from ._mova import (
    DataError,
    UsageError,
    angular_error,
    das_power_map,
    decode_doa,
    encode_doa,
    expected_abs_displacement,
    istft,
    oracle_mask_extract,
    pf_track,
    run_cli,
    sample_trajectory,
    si_sdr,
    sigma_from_displacement,
    simulate_rir,
    stft,
)

__all__ = [
    "DataError",
    "UsageError",
    "angular_error",
    "das_power_map",
    "decode_doa",
    "encode_doa",
    "expected_abs_displacement",
    "istft",
    "oracle_mask_extract",
    "pf_track",
    "run_cli",
    "sample_trajectory",
    "si_sdr",
    "sigma_from_displacement",
    "simulate_rir",
    "stft",
]
