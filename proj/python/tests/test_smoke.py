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
import io
import math

import numpy as np
import pytest
from PIL import Image

import rashdx


def png_bytes(seed, size=48):
    rng = np.random.default_rng(seed)
    arr = rng.integers(0, 256, size=(size, size, 3), dtype=np.uint8)
    buf = io.BytesIO()
    Image.fromarray(arr).save(buf, format="PNG")
    return buf.getvalue()


def test_roster():
    assert len(rashdx.CLASS_NAMES) == 8
    assert list(rashdx.CLASS_NAMES) == sorted(rashdx.CLASS_NAMES)
    assert rashdx.DEFAULT_THRESHOLD == 0.6


def test_nt_xent_single_pair_and_two_pairs():
    z = np.random.default_rng(0).normal(size=(2, 5))
    assert abs(rashdx.nt_xent_loss(z, 0.5)) < 1e-12
    z = np.array([[1.0, 0.0], [1.0, 0.0], [0.0, 1.0], [0.0, 1.0]])
    assert rashdx.nt_xent_loss(z, 1.0) == pytest.approx(math.log(1 + 2 / math.e), abs=1e-12)
    loss, grad = rashdx.nt_xent_loss_and_gradient(z, 1.0)
    assert grad.shape == z.shape
    with pytest.raises(rashdx.Error):
        rashdx.nt_xent_loss(np.zeros((2, 3)), 0.5)


def test_metrics_and_f1():
    cm = np.diag(np.arange(1, 9)).tolist()
    cm[0][1] = 2
    report = rashdx.metrics_report(cm)
    assert report["accuracy"] == pytest.approx(36 / 38)
    assert report["per_class"]["Bullous"]["recall"] == pytest.approx(1 / 3)
    assert rashdx.f1_score(0.993, 0.941) == pytest.approx(0.966, abs=5e-4)


def test_threshold_report_counts():
    r = rashdx.threshold_report([0.9, 0.6, 0.3], [True, False, True])
    assert r["at_or_above"] == 2
    assert r["accuracy_below"] == 1.0


def test_classifier_diagnose():
    model = rashdx.Classifier.untrained("tiny_cnn", 1)
    probs = model.predict(png_bytes(1))
    assert set(probs) == set(rashdx.CLASS_NAMES)
    assert sum(probs.values()) == pytest.approx(1.0, abs=1e-6)
    result = model.diagnose(png_bytes(1))
    assert result["needs_manual_review"] == (result["probability"] < 0.6)
    with pytest.raises(rashdx.Error, match="decode"):
        model.predict(b"not an image")


def test_cli_synth_and_split(tmp_path):
    code, out, err = rashdx.run_cli(["dataset", "synth", "--out-dir", str(tmp_path), "--per-class", "5", "--size", "24"])
    assert code == 0, err
    manifest = tmp_path / "manifest.csv"
    assert sum(rashdx.class_distribution(manifest).values()) == 40
    train, test = rashdx.split_manifest(manifest, 0.8, 3, tmp_path)
    assert sum(rashdx.class_distribution(train).values()) == 32
    assert rashdx.run_cli(["no-such-command"])[0] == 2
