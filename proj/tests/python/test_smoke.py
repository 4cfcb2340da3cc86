import json
import math
import os
import subprocess
import sys

import numpy as np
import pytest

try:
    import _fcnet as fcnet
except ImportError:  # installed as a package rather than a bare module
    from fcnet import _fcnet as fcnet


def rng():
    return np.random.default_rng(7)


def random_signal(t=40, r=8):
    return rng().normal(size=(t, r))


def test_atlas_labels():
    labels = fcnet.atlas_labels()
    assert len(labels) == 116
    assert labels[0] == "Precentral_L"
    assert len(set(labels)) == 116


def test_pearson_shape_and_symmetry():
    signal = random_signal()
    corr = fcnet.pearson(signal)
    assert corr.shape == (8, 8)
    assert np.array_equal(corr, corr.T)
    assert np.allclose(np.diag(corr), 1.0)
    assert np.all(np.abs(corr) <= 1.0)
    ref = np.corrcoef(signal.T)
    assert np.allclose(corr, ref, atol=1e-12)


def test_fisher_z_expands_pearson():
    signal = random_signal()
    z = fcnet.fisher_z(signal)
    r = fcnet.pearson(signal)
    off = ~np.eye(8, dtype=bool)
    assert np.allclose(z[off], np.arctanh(r[off]), atol=1e-12)
    assert np.allclose(np.diag(z), 0.0)


def test_fcn_adjacency_binary_symmetric():
    adj = fcnet.fcn_adjacency(random_signal(), method="pearson", tau=0.3)
    assert adj.shape == (8, 8)
    assert np.array_equal(adj, adj.T)
    assert set(np.unique(adj)) <= {0.0, 1.0}
    assert np.all(np.diag(adj) == 0.0)


def test_pca_embed_centered():
    coords = fcnet.pca_embed(random_signal())
    assert coords.shape == (8, 2)
    assert np.allclose(coords.mean(axis=0), 0.0, atol=1e-12)


def test_tsne_embed_deterministic():
    signal = random_signal()
    a = fcnet.tsne_embed(signal, perplexity=2.0, iterations=260, seed=3)
    b = fcnet.tsne_embed(signal, perplexity=2.0, iterations=260, seed=3)
    assert a.shape == (8, 2)
    assert np.array_equal(a, b)


def test_umap_embed_shape():
    coords = fcnet.umap_embed(random_signal(), n_neighbors=3, epochs=50, seed=5)
    assert coords.shape == (8, 2)
    assert np.all(np.isfinite(coords))


def test_mapper_adjacency_from_coords():
    coords = np.array([[0.0, 0.0], [0.5, 0.0], [10.0, 0.0], [10.5, 0.0]])
    adj = fcnet.mapper_adjacency(coords, intervals_x=1, intervals_y=1,
                                 overlap=0.3, cluster_eps=1.0)
    expected = np.zeros((4, 4))
    expected[0, 1] = expected[1, 0] = 1.0
    expected[2, 3] = expected[3, 2] = 1.0
    assert np.array_equal(adj, expected)


def test_attention_rows_stochastic():
    adj = fcnet.fcn_adjacency(random_signal(), method="pearson", tau=0.3)
    attn = fcnet.attention_rows(adj, n_heads=2, d_model=4, d_head=2, seed=1)
    assert attn.shape == (8, 8)
    assert np.allclose(attn.sum(axis=1), 1.0, atol=1e-9)
    assert np.all(attn >= 0.0)


def test_kld_matches_reference():
    p = np.array([0.5, 0.5])
    q = np.array([0.9, 0.1])
    val = fcnet.kld(p, q)
    ref = 0.5 * math.log(0.5 / 0.9) + 0.5 * math.log(0.5 / 0.1)
    assert abs(val - ref) < 1e-6
    assert fcnet.kld(p, p) <= 1e-12


def test_rank_rois_sorted():
    r = 6
    g = rng()
    mean_a = g.dirichlet(np.ones(r), size=r)
    mean_b = g.dirichlet(np.ones(r), size=r)
    entries = fcnet.rank_rois(mean_a, mean_b)
    assert len(entries) == r
    rois = [roi for roi, _ in entries]
    scores = [score for _, score in entries]
    assert sorted(rois) == list(range(1, r + 1))
    assert scores == sorted(scores, reverse=True)


def test_train_cv_tiny():
    g = rng()
    r = 6

    def graphs(shift):
        out = []
        for _ in range(4):
            m = (g.normal(size=(r, r)) + shift > 0).astype(float)
            m = np.triu(m, 1)
            out.append(m + m.T)
        return out

    res = fcnet.train_cv(graphs(-0.5), graphs(0.5), n_heads=2, d_model=4,
                         d_head=2, folds=2, epochs=2, seed=9)
    assert len(res["fold_accuracy"]) == 2
    assert 0.0 <= res["mean_accuracy"] <= 1.0
    assert len(res["attention"]) == 8
    for attn in res["attention"]:
        assert attn.shape == (r, r)
        assert np.allclose(attn.sum(axis=1), 1.0, atol=1e-9)


def test_lsirm_fit_tiny():
    g = rng()
    y = np.clip(g.uniform(0.05, 0.95, size=(5, 3)), 0, 1)
    fit = fcnet.lsirm_fit(y, n_iter=300, burn_in=100, thin=10, seed=2)
    assert fit["theta"].shape == (3,)
    assert fit["beta"].shape == (5,)
    assert fit["u"].shape == (3, 2)
    assert fit["v"].shape == (5, 2)
    assert fit["sigma2"] > 0.0
    assert set(fit["acceptance_rates"]) == {"theta", "beta", "u", "v"}


def test_run_id_stable():
    a = fcnet.run_id("")
    b = fcnet.run_id("")
    assert a == b
    assert len(a) == 16
    assert a != fcnet.run_id("[classifier]\nseed = 4\n")


def test_errors_surface_as_fcnet_error():
    with pytest.raises(fcnet.FcnetError):
        fcnet.fcn_adjacency(random_signal(), method="pearson", tau=0.0)


@pytest.mark.skipif("FCNET_CLI" not in os.environ,
                    reason="FCNET_CLI not set")
def test_cli_end_to_end(tmp_path):
    cli = os.environ["FCNET_CLI"]

    atlas = tmp_path / "atlas.txt"
    atlas.write_text("".join(f"Region_{i}\n" for i in range(1, 13)))
    spec = tmp_path / "cohort.ini"
    spec.write_text(
        "[cohort]\n"
        f"atlas = {atlas}\n"
        "groups = SYNTH_A:6, SYNTH_B:6\n"
        "t_count = 48\n"
        "n_blocks = 3\n"
        "noise_sd = 0.6\n"
        "seed = 11\n")
    data = tmp_path / "dataset"
    out = tmp_path / "out"
    config = tmp_path / "pipeline.ini"
    config.write_text(
        "[dataset]\n"
        f"manifest = {data / 'cohort.json'}\n"
        f"atlas = {atlas}\n"
        "[fcn]\n"
        "method = pearson\n"
        "tau = 0.3\n"
        "seed = 5\n"
        "[classifier]\n"
        "n_heads = 2\n"
        "d_model = 8\n"
        "d_head = 4\n"
        "folds = 2\n"
        "epochs = 2\n"
        "batch_size = 4\n"
        "seed = 17\n"
        "[featsel]\n"
        "k = 3\n"
        "[lsirm]\n"
        "n_iter = 220\n"
        "burn_in = 100\n"
        "thin = 10\n"
        "seed = 23\n"
        "[output]\n"
        f"dir = {out}\n")

    def run(*args):
        proc = subprocess.run([cli, *args], capture_output=True, text=True)
        assert proc.returncode == 0, proc.stderr
        return proc

    run("synth", "--spec", str(spec), "--out", str(data))
    run("ingest", "--config", str(config))
    run("fcn", "--config", str(config))
    run("classify", "--config", str(config), "--pair", "SYNTH_A:SYNTH_B")
    run("select", "--config", str(config), "--pair", "SYNTH_A:SYNTH_B")
    run("lsirm", "--config", str(config), "--pair", "SYNTH_A:SYNTH_B")
    run("report", "--config", str(config), "--pair", "SYNTH_A:SYNTH_B")

    bundle = json.loads((out / "report" / "bundle.json").read_text())
    assert bundle["pair"] == "SYNTH_A_vs_SYNTH_B"
    assert len(bundle["kinds"]) == 6
    manifest = json.loads((out / "manifest.json").read_text())
    assert set(manifest["stages"]) == {
        "ingest", "fcn", "classify:SYNTH_A_vs_SYNTH_B",
        "select:SYNTH_A_vs_SYNTH_B", "lsirm:SYNTH_A_vs_SYNTH_B"}


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-q"]))
