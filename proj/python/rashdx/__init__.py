# Copyright 2026 The rashdx Authors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
# http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.
"""Python bindings for the rashdx skin-rash diagnosis toolkit."""

from ._rashdx import (
    CLASS_NAMES,
    DEFAULT_THRESHOLD,
    Classifier,
    Error,
    __version__,
    class_distribution,
    f1_score,
    metrics_report,
    nt_xent_loss,
    nt_xent_loss_and_gradient,
    run_cli,
    split_manifest,
    threshold_report,
)

__all__ = [
    "CLASS_NAMES",
    "DEFAULT_THRESHOLD",
    "Classifier",
    "Error",
    "__version__",
    "class_distribution",
    "f1_score",
    "metrics_report",
    "nt_xent_loss",
    "nt_xent_loss_and_gradient",
    "run_cli",
    "split_manifest",
    "threshold_report",
]
