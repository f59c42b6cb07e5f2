"""End-to-end CLI behavior through main(argv)."""

import json

import numpy as np
import pytest

from spem import load_artifact, save_csv, save_matrix
from spem.cli import main
from spem.metrics import METRIC_COLUMNS


def run(*argv) -> int:
    return main([str(a) for a in argv])


@pytest.fixture(scope="module")
def workdir(tmp_path_factory):
    """A generated dataset plus one embedded artifact, shared read-only."""
    root = tmp_path_factory.mktemp("cli")
    assert run("gen", "swiss-roll", "--n", 120, "--noise", 0.3,
               "--seed", 1, "--out", root, "--name", "roll") == 0
    assert run("embed", root / "roll.spem", "--out", root / "roll.json",
               "--k", 8, "--epochs", 40, "--stages", 4, "--quiet") == 0
    return root


# --- gen -----------------------------------------------------------------------


def test_gen_writes_matrix_and_sidecar(tmp_path):
    assert run("gen", "multiscale-loop", "--n", 60, "--dims", 6,
               "--out", tmp_path, "--name", "loop") == 0
    matrix = tmp_path / "loop.spem"
    assert matrix.read_bytes()[:4] == b"SPEM"
    sidecar = json.loads((tmp_path / "loop.meta.json").read_text())
    assert sidecar["kind"] == "multiscale-loop"
    assert sidecar["n"] == 60
    assert sidecar["params"]["noise_sigma"] == 0.05  # loop-specific default
    assert len(sidecar["intrinsic"]["theta"]) == 60


def test_gen_blobs_writes_labels(tmp_path):
    assert run("gen", "gaussian-blobs", "--n", 50, "--dims", 3, "--blobs", 2,
               "--out", tmp_path, "--name", "blobs") == 0
    labels = np.loadtxt(tmp_path / "blobs.labels.csv", dtype=np.int64)
    assert labels.shape == (50,)
    assert set(labels) == {0, 1}


def test_gen_rejects_tiny_n(tmp_path):
    assert run("gen", "swiss-roll", "--n", 5, "--out", tmp_path) == 2


# --- embed ---------------------------------------------------------------------


def test_embed_default_stage_count(workdir):
    art = load_artifact(workdir / "roll.json")
    assert len(art.stages) == 4
    sizes = [st.s for st in art.stages]
    assert sizes == sorted(sizes)
    assert sizes[-1] == 119  # n - 1 modes at the final stage
    assert art.meta["schedule"]["mode"] == "equal"
    assert art.meta["timestamps"] is None  # deterministic mode
    # per-stage response equals the row norms of P
    for st in art.stages:
        np.testing.assert_allclose(st.response,
                                   np.linalg.norm(st.p, axis=1), atol=1e-15)


def test_embed_reruns_byte_identical(tmp_path, workdir):
    out1 = tmp_path / "a.json"
    out2 = tmp_path / "b.json"
    for out in (out1, out2):
        assert run("embed", workdir / "roll.spem", "--out", out,
                   "--k", 8, "--epochs", 40, "--stages", 4, "--quiet") == 0
    assert out1.read_bytes() == out2.read_bytes()
    # and matches the module-fixture artifact built from the same flags
    assert out1.read_bytes() == (workdir / "roll.json").read_bytes()


def test_embed_single_stage(tmp_path, workdir):
    out = tmp_path / "one.json"
    assert run("embed", workdir / "roll.spem", "--out", out, "--k", 8,
               "--epochs", 10, "--stages", 1, "--quiet") == 0
    art = load_artifact(out)
    assert [st.s for st in art.stages] == [119]


def test_embed_full_spectrum_flagged(tmp_path, workdir):
    out = tmp_path / "full.json"
    assert run("embed", workdir / "roll.spem", "--out", out, "--k", 8,
               "--epochs", 20, "--stages", 3, "--full-spectrum",
               "--quiet") == 0
    art = load_artifact(out)
    flags = [st.full for st in art.stages]
    assert flags == [False, False, False, True]
    assert art.stages[-1].s == 119
    assert art.final_stage.s == 119
    assert not art.final_stage.full  # final means last progressive stage


def test_embed_csv_label_column(tmp_path):
    rng = np.random.default_rng(5)
    pts = rng.standard_normal((40, 3))
    labels = rng.integers(0, 3, 40)
    save_csv(tmp_path / "pts.csv", pts, labels)
    out = tmp_path / "art.json"
    assert run("embed", tmp_path / "pts.csv", "--label-column", "--out", out,
               "--k", 5, "--epochs", 5, "--stages", 2, "--quiet") == 0
    art = load_artifact(out)
    np.testing.assert_array_equal(art.labels, labels)


def test_embed_labels_file(tmp_path):
    rng = np.random.default_rng(6)
    save_matrix(tmp_path / "pts.spem", rng.standard_normal((30, 3)))
    np.savetxt(tmp_path / "lab.csv", rng.integers(0, 2, 30), fmt="%d")
    out = tmp_path / "art.json"
    assert run("embed", tmp_path / "pts.spem", "--labels", tmp_path / "lab.csv",
               "--out", out, "--k", 5, "--epochs", 5, "--stages", 2,
               "--quiet") == 0
    assert load_artifact(out).labels.shape == (30,)


def test_embed_label_length_mismatch(tmp_path):
    rng = np.random.default_rng(7)
    save_matrix(tmp_path / "pts.spem", rng.standard_normal((30, 3)))
    np.savetxt(tmp_path / "lab.csv", np.zeros(29), fmt="%d")
    assert run("embed", tmp_path / "pts.spem", "--labels",
               tmp_path / "lab.csv", "--out", tmp_path / "a.json",
               "--quiet") == 2


def test_embed_missing_input(tmp_path):
    assert run("embed", tmp_path / "nope.spem", "--quiet") == 2


def test_embed_bad_k(tmp_path, workdir):
    assert run("embed", workdir / "roll.spem", "--k", 500,
               "--out", tmp_path / "a.json", "--quiet") == 2


# --- metrics -------------------------------------------------------------------


def test_metrics_outputs(tmp_path, workdir, capsys):
    json_out = tmp_path / "m.json"
    csv_out = tmp_path / "m.csv"
    assert run("metrics", workdir / "roll.json", workdir / "roll.spem",
               "--k", 6, "--demap-k", 6,
               "--out-json", json_out, "--out-csv", csv_out) == 0
    printed = capsys.readouterr().out
    lines = csv_out.read_text().strip().splitlines()
    assert lines[0] == ",".join(METRIC_COLUMNS)
    assert len(lines) == 5  # header + 4 stages
    assert printed == csv_out.read_text()
    doc = json.loads(json_out.read_text())
    final_s = max(int(s) for s in doc["per_stage"])
    assert doc["per_stage"][str(final_s)]["recon_error"] == 0.0
    assert doc["parameters"]["k_metric"] == 6


def test_metrics_attach(tmp_path, workdir):
    art_path = tmp_path / "roll.json"
    art_path.write_bytes((workdir / "roll.json").read_bytes())
    assert run("metrics", art_path, workdir / "roll.spem", "--k", 6,
               "--demap-k", 6, "--out-json", tmp_path / "m.json",
               "--out-csv", tmp_path / "m.csv", "--attach") == 0
    art = load_artifact(art_path)
    assert art.metrics is not None
    assert "per_stage" in art.metrics


def test_metrics_shape_mismatch(tmp_path, workdir):
    save_matrix(tmp_path / "other.spem",
                np.random.default_rng(8).standard_normal((77, 3)))
    assert run("metrics", workdir / "roll.json", tmp_path / "other.spem",
               "--out-json", tmp_path / "m.json",
               "--out-csv", tmp_path / "m.csv") == 2


def test_metrics_fragmented_graph_is_runtime_failure(tmp_path):
    # three tight, far-apart blobs: the demap geodesic graph at k=3 cannot
    # cover half the points, which is a numeric failure, not bad input
    assert run("gen", "gaussian-blobs", "--n", 30, "--dims", 2, "--blobs", 3,
               "--spread", 0.01, "--out", tmp_path, "--name", "frag") == 0
    out = tmp_path / "frag.json"
    assert run("embed", tmp_path / "frag.spem", "--out", out, "--k", 4,
               "--epochs", 5, "--stages", 2, "--quiet") == 0
    assert run("metrics", out, tmp_path / "frag.spem", "--k", 4,
               "--demap-k", 3, "--out-json", tmp_path / "m.json",
               "--out-csv", tmp_path / "m.csv") == 3


# --- grid ----------------------------------------------------------------------


def test_grid_aggregates_thumbnails(tmp_path):
    rng = np.random.default_rng(9)
    save_matrix(tmp_path / "img.spem", rng.uniform(0, 1, size=(50, 12)))
    out = tmp_path / "art.json"
    assert run("embed", tmp_path / "img.spem", "--out", out, "--k", 5,
               "--epochs", 5, "--stages", 2, "--quiet") == 0
    grid_out = tmp_path / "grid.json"
    assert run("grid", out, tmp_path / "img.spem", "--cols", 3, "--rows", 2,
               "--thumb-shape", "3x4", "--out", grid_out) == 0
    doc = json.loads(grid_out.read_text())
    assert doc["grid_cols"] == 3 and doc["grid_rows"] == 2
    assert doc["thumb_shape"] == [3, 4]
    assert sum(c["count"] for c in doc["cells"]) == 50
    assert all(len(c["mean_thumbnail"]) == 12 for c in doc["cells"])


def test_grid_wrong_thumb_shape(tmp_path):
    rng = np.random.default_rng(10)
    save_matrix(tmp_path / "img.spem", rng.uniform(0, 1, size=(40, 12)))
    out = tmp_path / "art.json"
    assert run("embed", tmp_path / "img.spem", "--out", out, "--k", 5,
               "--epochs", 5, "--stages", 2, "--quiet") == 0
    assert run("grid", out, tmp_path / "img.spem", "--thumb-shape", "5x5",
               "--out", tmp_path / "g.json") == 2
    assert run("grid", out, tmp_path / "img.spem", "--thumb-shape", "potato",
               "--out", tmp_path / "g.json") == 2


def test_grid_unknown_stage(tmp_path, workdir):
    assert run("grid", workdir / "roll.json", workdir / "roll.spem",
               "--thumb-shape", "1x3", "--stage", "7",
               "--out", tmp_path / "g.json") == 2


# --- serve ---------------------------------------------------------------------


def test_serve_missing_dir(tmp_path):
    assert run("serve", tmp_path / "absent") == 2
