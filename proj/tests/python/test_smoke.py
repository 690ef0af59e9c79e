# Copyright 2026 The fedcia Authors
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

import json
import os
import subprocess

import numpy as np
import pytest

import fedcia


def test_gram_and_svd_round_trip():
    e = np.array([[1.0, 2.0], [0.0, 1.0]])
    c = fedcia.gram(e)
    np.testing.assert_array_equal(c, [[1.0, 2.0], [2.0, 5.0]])
    u, s = fedcia.truncated_svd(c, 2)
    np.testing.assert_allclose(fedcia.reconstruct(u, s), c, atol=1e-10)


def test_theorem_one_on_random_data():
    rng = np.random.default_rng(3)
    a = (rng.random((20, 15)) < 0.3).astype(float)
    local = [fedcia.build_linear_filter(a[u : u + 1]) for u in range(a.shape[0])]
    np.testing.assert_allclose(
        fedcia.aggregate_cia(local), fedcia.ideal_global_filter(a, True), atol=1e-9
    )


def test_wsa_cancellation_and_shape_error():
    e = np.arange(6.0).reshape(2, 3)
    np.testing.assert_array_equal(fedcia.aggregate_wsa([e, -e], [0.5, 0.5]), np.zeros((2, 3)))
    with pytest.raises(ValueError, match="incompatible architectures"):
        fedcia.aggregate_wsa([np.zeros((2, 3)), np.zeros((4, 3))], [0.5, 0.5])


def test_noise_is_symmetric_and_identity_at_zero():
    c = fedcia.gram(np.random.default_rng(1).normal(size=(3, 6)))
    np.testing.assert_array_equal(fedcia.add_laplace_noise(c, 0.0), c)
    noisy = fedcia.add_laplace_noise(c, 0.5, seed=4)
    np.testing.assert_array_equal(noisy, noisy.T)


def test_ranking_and_metrics():
    assert fedcia.rank_items([0.1, 0.9, 0.3, 0.9, 0.2], [1], 10) == [3, 2, 4, 0]
    m = fedcia.user_metrics(list(range(10, 20)), [10, 13], 10)
    assert m["f1"] == pytest.approx(1 / 3)
    assert m["ndcg"] == pytest.approx(0.8772, abs=1e-4)


def test_information_gap():
    a = np.random.default_rng(2).normal(size=(4, 3))
    s_ci, s_ws = fedcia.l1_information_gap(a, -a, 0, 2)
    assert s_ws == 0.0
    assert s_ci == pytest.approx(np.abs(a[:, 0] - a[:, 2]).sum())


def _write_data(tmp_path):
    rng = np.random.default_rng(5)
    lines = []
    for u in range(30):
        for i in range(20):
            if rng.random() < (0.5 if (i < 10) == (u % 2 == 0) else 0.05):
                lines.append(f"{u}\t{i}\t5\t0")
    path = tmp_path / "u.data"
    path.write_text("\n".join(lines) + "\n")
    return path


def test_run_experiment_is_deterministic(tmp_path):
    path = _write_data(tmp_path)
    data = fedcia.load_interactions(str(path))
    assert data.pairs().shape == (data.num_interactions, 2)
    cfg = {
        "dataset_path": str(path),
        "clients": 3,
        "aggregator": "cia",
        "com_num": 2,
        "epoch_c": 1,
        "epoch_i": 2,
        "dims": [4],
        "item_align_learning_rate": 10.0,
    }
    a = fedcia.run_experiment(cfg)
    b = fedcia.run_experiment(cfg)
    assert a == b
    assert len(a["rounds"]) == 2
    assert len(fedcia.config_hash(cfg)) == 16
    assert len(fedcia.expand_manifest({**cfg, "aggregator": ["cia", "independent"]})) == 2


def test_bad_config_raises():
    with pytest.raises(ValueError):
        fedcia.run_experiment({"no_such_key": 1})
    with pytest.raises(ValueError, match="incompatible architectures"):
        fedcia.run_experiment({"aggregator": "wsa", "dims": [8, 16]})


@pytest.mark.skipif("FEDCIA_CLI" not in os.environ, reason="CLI path not provided")
def test_cli_outputs_and_exit_codes(tmp_path):
    cli = os.environ["FEDCIA_CLI"]
    missing = subprocess.run([cli, "run", "--config", str(tmp_path / "nope.json")],
                             capture_output=True, text=True)
    assert missing.returncode == 1
    assert "config not found" in missing.stderr

    path = _write_data(tmp_path)
    manifest = tmp_path / "m.json"
    manifest.write_text(json.dumps({
        "dataset_path": path.name, "clients": 3, "aggregator": "cia", "com_num": 1,
        "epoch_c": 1, "epoch_i": 1, "dims": [4], "item_align_learning_rate": 10.0,
    }))
    out = tmp_path / "out"
    for _ in range(2):
        done = subprocess.run([cli, "run", "--config", str(manifest), "--out-dir", str(out),
                               "--snapshot-embeddings"], capture_output=True, text=True)
        assert done.returncode == 0, done.stderr
    reports = sorted(out.glob("*.report.json"))
    assert len(reports) == 1
    stem = reports[0].name.split(".")[0]
    assert (out / f"{stem}.curve.csv").exists()
    assert list(out.glob(f"{stem}.snap.init.0.csv"))

    seeded = subprocess.run([cli, "run", "--config", str(manifest), "--out-dir", str(out)],
                            env={**os.environ, "FEDCIA_SEED": "99"}, capture_output=True, text=True)
    assert seeded.returncode == 0
    assert len(list(out.glob("*.report.json"))) == 2

    theorem = subprocess.run([cli, "theorem1", "--users", "20", "--items", "15", "--seed", "7"],
                             capture_output=True, text=True)
    assert theorem.returncode == 0
    deviation = float(theorem.stdout.strip().split("=")[-1])
    assert deviation <= 1e-9
