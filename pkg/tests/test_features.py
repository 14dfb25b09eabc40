import json
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from simcal.errors import ConvergenceError, InvalidInputError, WeightsFormatError
from simcal.features import (
    Conv1dLayer,
    DenseLayer,
    NeuralExtractor,
    PcaExtractor,
    SummaryStatsConfig,
    SummaryStatsExtractor,
    excess_kurtosis,
    extract,
    extract_matrix,
    fit_pca,
    load_weights_file,
    neural_forward,
    sample_acf,
    skewness,
    summary_stats_extract,
    summary_stats_matrix,
)


def conv1d_oracle(signal, kernel, stride, bias=0.0):
    """Manual single-channel valid convolution (cross-correlation)."""
    out = []
    for start in range(0, len(signal) - len(kernel) + 1, stride):
        acc = bias
        for j, w in enumerate(kernel):
            acc += w * signal[start + j]
        out.append(acc)
    return np.array(out)


# ---------------------------------------------------------------------------
# summary statistics
# ---------------------------------------------------------------------------


def test_summary_stats_hand_computed():
    cfg = SummaryStatsConfig(quantiles=(0.5,), acf_lags=(1,))
    f = summary_stats_extract(np.array([1.0, 2.0, 3.0, 4.0]), cfg)
    assert f[0] == pytest.approx(2.5)           # mean
    assert f[1] == pytest.approx(1.1180, abs=1e-4)  # population sd
    assert f[4] == pytest.approx(2.5)           # median, midpoint convention
    assert f.shape == (cfg.output_dim,)


def test_summary_stats_constant_series_conventions():
    cfg = SummaryStatsConfig(quantiles=(0.5,), acf_lags=(1, 2))
    f = summary_stats_extract(np.full(50, 7.0), cfg)
    assert f[0] == 7.0
    assert np.all(f[1:4] == 0.0)   # sd, skew, kurt
    assert f[4] == 7.0             # median
    assert np.all(f[5:] == 0.0)    # acfs


def test_summary_stats_too_short_rejected():
    cfg = SummaryStatsConfig(acf_lags=(10,))
    with pytest.raises(InvalidInputError):
        summary_stats_extract(np.arange(11.0), cfg)


def test_summary_matrix_equals_row_loop():
    cfg = SummaryStatsConfig()
    rng = np.random.default_rng(0)
    data = rng.normal(size=(20, 60))
    batch = summary_stats_matrix(data, cfg)
    rows = np.stack([summary_stats_extract(r, cfg) for r in data])
    assert np.allclose(batch, rows, atol=1e-12)


def test_moment_helpers_degenerate():
    assert skewness(np.ones(10)) == 0.0
    assert excess_kurtosis(np.ones(10)) == 0.0
    assert sample_acf(np.ones(10), 2) == 0.0


@given(st.lists(st.floats(-100, 100), min_size=12, max_size=60))
@settings(max_examples=100, deadline=None)
def test_summary_stats_always_finite(xs):
    cfg = SummaryStatsConfig()
    f = summary_stats_extract(np.array(xs), cfg)
    assert np.all(np.isfinite(f))


# ---------------------------------------------------------------------------
# PCA
# ---------------------------------------------------------------------------


def test_pca_rank1_line():
    rng = np.random.default_rng(4)
    direction = np.array([1.0, -2.0, 2.0]) / 3.0
    data = np.outer(rng.normal(size=40), direction)
    spec = fit_pca(data, K=1)
    v = spec.components[0]
    assert abs(abs(np.dot(v, direction)) - 1.0) < 1e-8
    recon = extract_matrix(spec, data) @ spec.components + spec.mean
    assert np.allclose(recon, data, atol=1e-8)


def test_pca_loadings_orthonormal():
    rng = np.random.default_rng(5)
    data = rng.normal(size=(60, 6))
    spec = fit_pca(data, K=4)
    gram = spec.components @ spec.components.T
    assert np.max(np.abs(gram - np.eye(4))) < 1e-6


def test_pca_top_eigenvalue_matches_dense_oracle():
    rng = np.random.default_rng(6)
    data = rng.normal(size=(50, 5)) * np.array([3.0, 1.0, 0.5, 0.2, 0.1])
    spec = fit_pca(data, K=1)
    centered = data - data.mean(axis=0)
    cov = centered.T @ centered / (len(data) - 1)
    w, v = np.linalg.eigh(cov)  # brute-force eigensolver oracle
    top = spec.components[0]
    lam = top @ cov @ top
    assert lam == pytest.approx(w[-1], abs=1e-6)
    assert abs(abs(np.dot(top, v[:, -1])) - 1.0) < 1e-6


def test_pca_centering_invariance():
    rng = np.random.default_rng(7)
    data = rng.normal(size=(30, 4))
    shift = np.array([5.0, -2.0, 0.5, 100.0])
    a = fit_pca(data, K=2)
    b = fit_pca(data + shift, K=2)
    assert np.allclose(a.components, b.components, atol=1e-8)
    x = rng.normal(size=4)
    assert np.allclose(extract(a, x), extract(b, x + shift), atol=1e-8)


def test_pca_validation():
    rng = np.random.default_rng(8)
    with pytest.raises(InvalidInputError):
        fit_pca(rng.normal(size=(10, 3)), K=4)
    with pytest.raises(InvalidInputError):
        fit_pca(rng.normal(size=(1, 3)), K=1)


def test_pca_nonconvergence_reports_residual():
    # nearly equal eigenvalues make the step size shrink at ~0.99 per
    # iteration, far too slowly for tol 1e-14 in 5 iterations
    base = np.array([[1.0, 1.0], [-1.0, 1.0], [1.0, -1.0], [-1.0, -1.0]] * 5)
    data = base * np.array([1.0, 0.995])
    with pytest.raises(ConvergenceError) as err:
        fit_pca(data, K=1, iters=5, tol=1e-14)
    assert err.value.residual is not None


# ---------------------------------------------------------------------------
# neural forward pass
# ---------------------------------------------------------------------------


def test_dense_identity_layer():
    spec = NeuralExtractor(3, 3, (DenseLayer(np.eye(3), np.zeros(3), "linear"),))
    x = np.array([0.5, -1.0, 2.0])
    assert np.allclose(neural_forward(spec, x), x)


def test_leaky_relu_value():
    layer = DenseLayer(np.eye(1), np.zeros(1), "leaky_relu", slope=0.2)
    spec = NeuralExtractor(1, 1, (layer,))
    assert neural_forward(spec, np.array([-1.0]))[0] == pytest.approx(-0.2)
    assert neural_forward(spec, np.array([3.0]))[0] == pytest.approx(3.0)


def test_conv1d_matches_manual_oracle():
    w = np.array([[[1.0, 1.0]]])  # 1 out, 1 in, kernel 2
    layer = Conv1dLayer(w, np.zeros(1), stride=2)
    spec = NeuralExtractor(4, 2, (layer,))
    got = neural_forward(spec, np.array([1.0, 2.0, 3.0, 4.0]))
    assert np.allclose(got, [3.0, 7.0])
    assert np.allclose(got, conv1d_oracle([1, 2, 3, 4], [1, 1], 2))


def test_conv1d_multichannel_against_oracle():
    rng = np.random.default_rng(9)
    w = rng.normal(size=(3, 2, 4))
    b = rng.normal(size=3)
    layer = Conv1dLayer(w, b, stride=2)
    first = Conv1dLayer(rng.normal(size=(2, 1, 3)), rng.normal(size=2), stride=1)
    x = rng.normal(size=20)
    spec = NeuralExtractor(20, 3 * 8, (first, layer))
    got = neural_forward(spec, x)
    state = np.stack([conv1d_oracle(x, first.weights[c, 0], 1, first.bias[c])
                      for c in range(2)])
    want = []
    for f in range(3):
        acc = None
        for c in range(2):
            part = conv1d_oracle(state[c], w[f, c], 2)
            acc = part if acc is None else acc + part
        want.append(acc + b[f])
    assert np.allclose(got, np.concatenate(want))


def test_dimension_chain_validated():
    with pytest.raises(InvalidInputError):
        NeuralExtractor(4, 4, (DenseLayer(np.eye(3), np.zeros(3)),))
    with pytest.raises(InvalidInputError):
        NeuralExtractor(3, 5, (DenseLayer(np.eye(3), np.zeros(3)),))


def test_forward_dimension_mismatch():
    spec = NeuralExtractor(3, 3, (DenseLayer(np.eye(3), np.zeros(3)),))
    with pytest.raises(InvalidInputError):
        neural_forward(spec, np.ones(4))


def test_hidden_sizes_preserved():
    # conv block then a dense head, for each benchmark feature width
    rng = np.random.default_rng(10)
    for k in (15, 29, 57, 113, 225, 450):
        conv = Conv1dLayer(rng.normal(size=(2, 1, 4)) * 0.1, np.zeros(2),
                           stride=2, activation="leaky_relu", slope=0.2)
        flat = 2 * ((1799 - 4) // 2 + 1)
        dense = DenseLayer(rng.normal(size=(k, flat)) * 0.01, np.zeros(k), "tanh")
        spec = NeuralExtractor(1799, k, (conv, dense))
        out = neural_forward(spec, rng.normal(size=1799))
        assert out.shape == (k,)


def test_batch_extraction_equals_elementwise():
    rng = np.random.default_rng(11)
    spec = NeuralExtractor(6, 2, (DenseLayer(rng.normal(size=(2, 6)),
                                             rng.normal(size=2), "sigmoid"),))
    data = rng.normal(size=(7, 6))
    batch = extract_matrix(spec, data)
    rows = np.stack([extract(spec, r) for r in data])
    assert np.allclose(batch, rows)


def test_batch_extraction_equals_elementwise_conv_stack():
    rng = np.random.default_rng(12)
    conv1 = Conv1dLayer(rng.normal(size=(3, 1, 4)), rng.normal(size=3),
                        stride=2, activation="leaky_relu", slope=0.2)
    conv2 = Conv1dLayer(rng.normal(size=(2, 3, 3)), rng.normal(size=2), stride=1)
    flat = 2 * ((((40 - 4) // 2 + 1) - 3) // 1 + 1)
    dense = DenseLayer(rng.normal(size=(5, flat)), rng.normal(size=5), "tanh")
    spec = NeuralExtractor(40, 5, (conv1, conv2, dense))
    data = rng.normal(size=(600, 40))  # crosses the 256-row chunk boundary
    batch = extract_matrix(spec, data)
    rows = np.stack([extract(spec, r) for r in data])
    assert np.allclose(batch, rows, atol=1e-12)


# ---------------------------------------------------------------------------
# weights file loading
# ---------------------------------------------------------------------------


def _write(tmp_path, doc):
    path = tmp_path / "weights.json"
    path.write_text(json.dumps(doc))
    return path


def test_load_minimal_identity_file(tmp_path):
    doc = {
        "input_dim": 2,
        "output_dim": 2,
        "layers": [{"type": "dense", "weights": [[1.0, 0.0], [0.0, 1.0]],
                    "bias": [0.0, 0.0], "activation": "linear"}],
    }
    spec = load_weights_file(_write(tmp_path, doc))
    x = np.array([3.0, -4.0])
    assert np.allclose(extract(spec, x), x)


def test_load_rejects_bad_bias_naming_layer(tmp_path):
    doc = {
        "input_dim": 2,
        "output_dim": 2,
        "layers": [{"type": "dense", "weights": [[1.0, 0.0], [0.0, 1.0]],
                    "bias": [0.0], "activation": "linear"}],
    }
    with pytest.raises(WeightsFormatError, match="layer 0"):
        load_weights_file(_write(tmp_path, doc))


def test_load_rejects_unknown_activation(tmp_path):
    doc = {
        "input_dim": 1,
        "output_dim": 1,
        "layers": [{"type": "dense", "weights": [[1.0]], "bias": [0.0],
                    "activation": "swish"}],
    }
    with pytest.raises(WeightsFormatError):
        load_weights_file(_write(tmp_path, doc))


def test_load_ignores_dropout_and_parses_conv(tmp_path):
    doc = {
        "input_dim": 4,
        "output_dim": 2,
        "layers": [
            {"type": "dropout", "probability": 0.2},
            {"type": "conv1d", "weights": [[[1.0, 1.0]]], "bias": [0.0],
             "activation": "leaky_relu:0.2", "kernel": 2, "stride": 2,
             "in_channels": 1, "out_channels": 1},
            {"type": "dropout", "probability": 0.5},
            {"type": "dense", "weights": [[1.0, 0.0], [0.0, 1.0]],
             "bias": [0.0, 0.0], "activation": "linear"},
        ],
    }
    spec = load_weights_file(_write(tmp_path, doc))
    assert len(spec.layers) == 2
    assert np.allclose(extract(spec, np.array([1.0, 2.0, 3.0, 4.0])), [3.0, 7.0])


def test_load_rejects_chain_break(tmp_path):
    doc = {
        "input_dim": 4,
        "output_dim": 3,
        "layers": [{"type": "dense", "weights": [[1.0, 0.0], [0.0, 1.0]],
                    "bias": [0.0, 0.0], "activation": "linear"}],
    }
    with pytest.raises(WeightsFormatError):
        load_weights_file(_write(tmp_path, doc))


def test_load_rejects_conv_shape_mismatch(tmp_path):
    doc = {
        "input_dim": 4,
        "output_dim": 2,
        "layers": [{"type": "conv1d", "weights": [[[1.0, 1.0]]], "bias": [0.0],
                    "activation": "linear", "kernel": 3, "stride": 2,
                    "in_channels": 1, "out_channels": 1}],
    }
    with pytest.raises(WeightsFormatError, match="layer 0"):
        load_weights_file(_write(tmp_path, doc))
