import itertools
import json
import math
import os
import subprocess
from pathlib import Path

import numpy as np
import pytest

import upm

SCHEMAS = Path(os.environ.get("UPM_SCHEMAS", Path(__file__).resolve().parents[2] / "schemas"))
CLI = os.environ.get("UPM_CLI")


def validate(instance, name):
    jsonschema = pytest.importorskip("jsonschema")
    schema = json.loads((SCHEMAS / f"{name}.schema.json").read_text())
    jsonschema.validate(instance, schema)


def test_tensor_round_trip(tmp_path):
    a = np.random.default_rng(0).random((3, 4, 5), dtype=np.float32)
    upm.write_tensor(a, tmp_path / "a.npy")
    np.testing.assert_array_equal(upm.read_tensor(tmp_path / "a.npy"), a)
    # numpy reads what we write, and we read what numpy writes
    np.testing.assert_array_equal(np.load(tmp_path / "a.npy"), a)
    np.save(tmp_path / "b.npy", a.astype(np.float64))
    np.testing.assert_allclose(upm.read_tensor(tmp_path / "b.npy"), a)


def test_errors_carry_codes(tmp_path):
    (tmp_path / "bad.npy").write_bytes(b"nope")
    with pytest.raises(upm.UpmError) as info:
        upm.read_tensor(tmp_path / "bad.npy")
    assert info.value.code == "MalformedHeader"
    with pytest.raises(upm.UpmError) as info:
        upm.apriori([[0]], universe=1, beta=0.0)
    assert info.value.code == "InvalidBeta"


def test_bilinear_matches_corner_aligned_formula():
    a = np.arange(6, dtype=np.float32).reshape(1, 2, 3)
    out = upm.bilinear_resize(a, 3, 5)
    ys, xs = np.linspace(0, 1, 3), np.linspace(0, 2, 5)
    expected = ys[:, None] * 3 + xs[None, :]
    np.testing.assert_allclose(out[0], expected, atol=1e-6)


def test_apriori_matches_enumeration():
    rng = np.random.default_rng(3)
    for _ in range(20):
        universe = int(rng.integers(1, 9))
        db = [[i for i in range(universe) if rng.random() < 0.5] for _ in range(int(rng.integers(1, 15)))]
        beta = float(rng.choice([0.2, 0.4, 0.6]))
        expected = {}
        for size in (1, 2, 3):
            for items in itertools.combinations(range(universe), size):
                count = sum(all(i in t for i in items) for t in db)
                if count / len(db) >= beta:
                    expected[items] = count / len(db)
        got = {tuple(items): s for items, s in upm.apriori(db, universe, beta)}
        assert got.keys() == expected.keys()
        for k, v in expected.items():
            assert got[k] == pytest.approx(v)
        assert upm.apriori(db, universe, beta) == upm.brute_force_mine(db, universe, beta)


def test_planted_localization():
    stack, centers = upm.planted_fixture(seed=7)
    assert stack.shape == (1024, 28, 28)
    result = upm.localize(stack)
    validate(result["layout"], "layout")
    found = [p["center"] for p in result["layout"]["parts"]]
    assert len(found) == 4
    best = min(
        max(math.dist(found[j], centers[i]) for i, j in enumerate(perm)) for perm in itertools.permutations(range(4))
    )
    assert best <= 32


def test_kmeans_and_eigen():
    rng = np.random.default_rng(1)
    pts = np.vstack([rng.normal(0, 0.1, (20, 2)), rng.normal(5, 0.1, (20, 2))])
    _, labels, _, trace = upm.kmeans(pts, 2, seed=0)
    assert len(set(labels[:20])) == 1 and len(set(labels[20:])) == 1 and labels[0] != labels[20]
    assert all(b <= a for a, b in zip(trace, trace[1:]))
    m = rng.normal(size=(6, 6))
    m = m + m.T
    values, vectors = upm.sym_eigen(m)
    np.testing.assert_allclose(np.asarray(values), np.linalg.eigvalsh(m), atol=1e-10)


def test_fuse_and_svm():
    fused = upm.fuse_features([[3.0, 4.0]] * 6)
    assert len(fused) == 12
    assert math.isclose(np.linalg.norm(fused), math.sqrt(6))
    rng = np.random.default_rng(2)
    x = rng.uniform(-1, 1, (100, 2))
    x = x[np.abs(x[:, 0] - x[:, 1]) > 0.1]
    y = ["a" if p[0] > p[1] else "b" for p in x]
    model = upm.LinearModel.train(x, y)
    assert [model.predict(row) for row in x] == y
    validate(json.loads(model.to_json()), "model")


@pytest.mark.skipif(not CLI, reason="command-line tool not built")
def test_cli_outputs_match_schemas(tmp_path):
    data, mined, aligned = tmp_path / "data", tmp_path / "mined", tmp_path / "aligned"
    subprocess.run([CLI, "synth", "--out", data, "--count", "3"], check=True, capture_output=True)
    subprocess.run([CLI, "mine", "--features", data, "--out", mined], check=True, capture_output=True)
    subprocess.run(
        [CLI, "align", "--layouts", mined, "--features", data, "--out", aligned], check=True, capture_output=True
    )
    validate(json.loads((mined / "summary.json").read_text()), "summary")
    for layout in sorted(mined.glob("*.layout.json")):
        validate(json.loads(layout.read_text()), "layout")
    validate(json.loads((aligned / "alignment.json").read_text()), "alignment")
    bad = subprocess.run([CLI, "mine", "--features", tmp_path / "missing", "--out", mined], capture_output=True)
    assert bad.returncode == 2
