"""Feature extractors mapping a raw output vector in R^m to K features.

Three extractor families share the ``extract`` entry point:

* summary statistics (moments, quantiles, autocorrelations) in a frozen,
  documented order;
* PCA projections fitted by power iteration with deflation;
* neural forward passes over dense / conv1d layers loaded from a JSON
  weights file (the interchange format written by the trainer).

Degenerate-variance convention: when a sample has zero variance, its
skewness, kurtosis and autocorrelations are reported as 0 rather than NaN.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from .errors import ConvergenceError, InvalidInputError, NumericError, WeightsFormatError

# ---------------------------------------------------------------------------
# moment and autocorrelation helpers (shared with the realism metrics)
# ---------------------------------------------------------------------------


def skewness(x: np.ndarray, axis=-1) -> np.ndarray:
    """Population skewness; 0 when the variance (or its 1.5 power)
    degenerates to zero."""
    x = np.asarray(x, dtype=float)
    m = x.mean(axis=axis, keepdims=True)
    c = x - m
    m2 = np.mean(c * c, axis=axis)
    m3 = np.mean(c**3, axis=axis)
    denom = m2 ** 1.5  # can underflow to 0 even when m2 > 0
    with np.errstate(divide="ignore", invalid="ignore"):
        out = np.where(denom > 0, m3 / np.where(denom > 0, denom, 1.0), 0.0)
    return out


def excess_kurtosis(x: np.ndarray, axis=-1) -> np.ndarray:
    """Population excess kurtosis; 0 when the squared variance degenerates."""
    x = np.asarray(x, dtype=float)
    m = x.mean(axis=axis, keepdims=True)
    c = x - m
    m2 = np.mean(c * c, axis=axis)
    m4 = np.mean(c**4, axis=axis)
    denom = m2 * m2
    with np.errstate(divide="ignore", invalid="ignore"):
        out = np.where(denom > 0, m4 / np.where(denom > 0, denom, 1.0) - 3.0, 0.0)
    return out


def sample_acf(x: np.ndarray, lag: int, axis=-1) -> np.ndarray:
    """Sample autocorrelation c_lag / c_0 with the full-series denominator.

    This is the standard time-series estimator: both the mean and the
    normalization use the whole series, which shrinks estimates toward zero
    at lags close to the series length.  Zero-variance series yield 0.
    """
    x = np.asarray(x, dtype=float)
    n = x.shape[axis]
    if lag < 0 or lag >= n:
        raise InvalidInputError(f"lag {lag} out of range for length {n}")
    x = np.moveaxis(x, axis, -1)
    c = x - x.mean(axis=-1, keepdims=True)
    denom = np.sum(c * c, axis=-1)
    if lag == 0:
        return np.where(denom > 0, 1.0, 0.0)
    num = np.sum(c[..., :-lag] * c[..., lag:], axis=-1)
    with np.errstate(divide="ignore", invalid="ignore"):
        return np.where(denom > 0, num / np.where(denom > 0, denom, 1.0), 0.0)


# ---------------------------------------------------------------------------
# summary statistics extractor
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SummaryStatsConfig:
    """Feature layout: mean, sd, skew, excess kurtosis, the requested
    quantiles in order, ACF of the series at the requested lags, then ACF of
    the squared series at the same lags.  The order is a frozen contract.

    Quantiles use linear interpolation (the median of an even-length sample
    is the midpoint of the two central values).
    """

    quantiles: tuple[float, ...] = (0.05, 0.25, 0.5, 0.75, 0.95)
    acf_lags: tuple[int, ...] = (1, 2, 5, 10)

    def __post_init__(self):
        if any(not 0.0 <= q <= 1.0 for q in self.quantiles):
            raise InvalidInputError("quantiles must lie in [0, 1]")
        if any(l < 1 for l in self.acf_lags):
            raise InvalidInputError("acf lags must be >= 1")

    @property
    def output_dim(self) -> int:
        return 4 + len(self.quantiles) + 2 * len(self.acf_lags)

    def feature_names(self) -> list[str]:
        names = ["mean", "sd", "skew", "kurt"]
        names += [f"q{q:g}" for q in self.quantiles]
        names += [f"acf{l}" for l in self.acf_lags]
        names += [f"sq_acf{l}" for l in self.acf_lags]
        return names


@dataclass(frozen=True)
class SummaryStatsExtractor:
    config: SummaryStatsConfig = field(default_factory=SummaryStatsConfig)

    @property
    def output_dim(self) -> int:
        return self.config.output_dim


def summary_stats_matrix(samples: np.ndarray, config: SummaryStatsConfig) -> np.ndarray:
    """Summary features for each row of ``samples``; shape (rows, K)."""
    x = np.atleast_2d(np.asarray(samples, dtype=float))
    max_lag = max(config.acf_lags) if config.acf_lags else 0
    if x.shape[1] < max_lag + 2:
        raise InvalidInputError(
            f"series length {x.shape[1]} too short for acf lag {max_lag}")
    cols = [x.mean(axis=1), x.std(axis=1), skewness(x, axis=1),
            excess_kurtosis(x, axis=1)]
    for q in config.quantiles:
        cols.append(np.quantile(x, q, axis=1))
    sq = x * x
    for lag in config.acf_lags:
        cols.append(sample_acf(x, lag, axis=1))
    for lag in config.acf_lags:
        cols.append(sample_acf(sq, lag, axis=1))
    return np.stack(cols, axis=1)


def summary_stats_extract(sample: np.ndarray, config: SummaryStatsConfig) -> np.ndarray:
    """Feature vector of one sample, in the frozen documented order."""
    return summary_stats_matrix(np.asarray(sample, dtype=float)[None, :], config)[0]


# ---------------------------------------------------------------------------
# PCA extractor
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class PcaExtractor:
    mean: np.ndarray        # (m,)
    components: np.ndarray  # (K, m), rows orthonormal

    def __post_init__(self):
        mean = np.asarray(self.mean, dtype=float)
        comp = np.atleast_2d(np.asarray(self.components, dtype=float))
        gram = comp @ comp.T
        if not np.allclose(gram, np.eye(comp.shape[0]), atol=1e-8):
            raise InvalidInputError("PCA loadings must be orthonormal")
        object.__setattr__(self, "mean", mean)
        object.__setattr__(self, "components", comp)

    @property
    def output_dim(self) -> int:
        return self.components.shape[0]


def _power_iteration(mat: np.ndarray, iters: int, tol: float,
                     rng: np.random.Generator) -> tuple[np.ndarray, float]:
    v = rng.standard_normal(mat.shape[0])
    v /= np.linalg.norm(v)
    for _ in range(iters):
        w = mat @ v
        norm = np.linalg.norm(w)
        if norm == 0.0:
            return v, 0.0  # null space; any unit vector is an eigenvector
        w /= norm
        if np.dot(w, v) < 0:
            w = -w
        residual = float(np.linalg.norm(w - v))
        v = w
        if residual < tol:
            return v, float(v @ mat @ v)
    raise ConvergenceError(
        f"power iteration did not converge in {iters} iterations", residual)


def fit_pca(data: np.ndarray, K: int, iters: int = 2000,
            tol: float = 1e-9) -> PcaExtractor:
    """Top-K covariance eigenvectors by power iteration with deflation.

    Loadings are sign-fixed so the first nonzero component of each is
    positive.  Uses a fixed internal start-vector stream, so the fit is
    deterministic.
    """
    data = np.atleast_2d(np.asarray(data, dtype=float))
    n, m = data.shape
    if n < 2:
        raise InvalidInputError("need at least 2 rows to fit PCA")
    if not 1 <= K <= m:
        raise InvalidInputError(f"K must be in [1, {m}], got {K}")
    mean = data.mean(axis=0)
    centered = data - mean
    cov = centered.T @ centered / (n - 1)
    rng = np.random.default_rng(1234)
    comps = []
    for _ in range(K):
        v, lam = _power_iteration(cov, iters, tol, rng)
        nz = np.flatnonzero(np.abs(v) > 1e-12)
        if nz.size and v[nz[0]] < 0:
            v = -v
        comps.append(v)
        cov = cov - lam * np.outer(v, v)
    return PcaExtractor(mean=mean, components=np.stack(comps))


# ---------------------------------------------------------------------------
# neural forward pass
# ---------------------------------------------------------------------------

_ACTIVATIONS = ("linear", "relu", "leaky_relu", "sigmoid", "tanh")


def _apply_activation(x: np.ndarray, name: str, slope: float) -> np.ndarray:
    if name == "linear":
        return x
    if name == "relu":
        return np.maximum(x, 0.0)
    if name == "leaky_relu":
        return np.where(x >= 0, x, slope * x)
    if name == "sigmoid":
        return 1.0 / (1.0 + np.exp(-x))
    if name == "tanh":
        return np.tanh(x)
    raise InvalidInputError(f"unknown activation {name!r}")


@dataclass(frozen=True)
class DenseLayer:
    weights: np.ndarray  # (out, in), row-major: row i holds output unit i
    bias: np.ndarray     # (out,)
    activation: str = "linear"
    slope: float = 0.0

    def __post_init__(self):
        w = np.atleast_2d(np.asarray(self.weights, dtype=float))
        b = np.asarray(self.bias, dtype=float)
        if b.shape != (w.shape[0],):
            raise InvalidInputError("bias length must match the output dimension")
        object.__setattr__(self, "weights", w)
        object.__setattr__(self, "bias", b)
        _validate_activation(self.activation, self.slope)


@dataclass(frozen=True)
class Conv1dLayer:
    weights: np.ndarray  # (out_channels, in_channels, kernel)
    bias: np.ndarray     # (out_channels,)
    stride: int
    activation: str = "linear"
    slope: float = 0.0

    def __post_init__(self):
        w = np.asarray(self.weights, dtype=float)
        b = np.asarray(self.bias, dtype=float)
        if w.ndim != 3:
            raise InvalidInputError("conv1d weights must be (out_ch, in_ch, kernel)")
        if b.shape != (w.shape[0],):
            raise InvalidInputError("bias length must match out_channels")
        if self.stride < 1:
            raise InvalidInputError("stride must be >= 1")
        object.__setattr__(self, "weights", w)
        object.__setattr__(self, "bias", b)
        _validate_activation(self.activation, self.slope)


def _validate_activation(name: str, slope: float):
    if name not in _ACTIVATIONS:
        raise InvalidInputError(f"unknown activation {name!r}")
    if name == "leaky_relu" and not 0.0 < slope < 1.0:
        raise InvalidInputError("leaky_relu slope must be in (0, 1)")


@dataclass(frozen=True)
class NeuralExtractor:
    """Forward-pass evaluator.  State flows as (channels, length); dense
    layers consume the row-major flattening and emit a single channel."""

    input_dim: int
    output_dim: int
    layers: tuple

    def __post_init__(self):
        object.__setattr__(self, "layers", tuple(self.layers))
        shape = (1, self.input_dim)
        for i, layer in enumerate(self.layers):
            shape = _layer_output_shape(layer, shape, i)
        if shape[0] * shape[1] != self.output_dim:
            raise InvalidInputError(
                f"layers produce {shape[0] * shape[1]} outputs, "
                f"declared output_dim is {self.output_dim}")


def _layer_output_shape(layer, shape: tuple[int, int], index: int) -> tuple[int, int]:
    ch, length = shape
    if isinstance(layer, DenseLayer):
        if layer.weights.shape[1] != ch * length:
            raise InvalidInputError(
                f"layer {index}: dense expects {layer.weights.shape[1]} inputs, "
                f"gets {ch * length}")
        return (1, layer.weights.shape[0])
    if isinstance(layer, Conv1dLayer):
        out_ch, in_ch, kernel = layer.weights.shape
        if in_ch != ch:
            raise InvalidInputError(
                f"layer {index}: conv1d expects {in_ch} channels, gets {ch}")
        if kernel > length:
            raise InvalidInputError(
                f"layer {index}: kernel {kernel} longer than input {length}")
        out_len = (length - kernel) // layer.stride + 1
        return (out_ch, out_len)
    raise InvalidInputError(f"layer {index}: unsupported layer type {type(layer)!r}")


def _conv1d_forward(layer: Conv1dLayer, state: np.ndarray) -> np.ndarray:
    out_ch, in_ch, kernel = layer.weights.shape
    length = state.shape[1]
    out_len = (length - kernel) // layer.stride + 1
    starts = np.arange(out_len) * layer.stride
    # windows: (in_ch, out_len, kernel)
    idx = starts[:, None] + np.arange(kernel)[None, :]
    windows = state[:, idx]
    out = np.einsum("cok,fck->fo", windows, layer.weights) + layer.bias[:, None]
    return out


def _conv1d_forward_batch(layer: Conv1dLayer, state: np.ndarray) -> np.ndarray:
    # state: (batch, in_ch, length) -> (batch, out_ch, out_len)
    out_ch, in_ch, kernel = layer.weights.shape
    length = state.shape[2]
    out_len = (length - kernel) // layer.stride + 1
    idx = (np.arange(out_len) * layer.stride)[:, None] + np.arange(kernel)[None, :]
    windows = state[:, :, idx]  # (batch, in_ch, out_len, kernel)
    return np.einsum("bcok,fck->bfo", windows, layer.weights) \
        + layer.bias[None, :, None]


def neural_forward_batch(spec: NeuralExtractor, samples: np.ndarray) -> np.ndarray:
    """Forward pass over a batch of rows; equals row-wise evaluation."""
    x = np.atleast_2d(np.asarray(samples, dtype=float))
    if x.shape[1] != spec.input_dim:
        raise InvalidInputError(
            f"samples have {x.shape[1]} columns, extractor expects {spec.input_dim}")
    state = x[:, None, :]  # (batch, 1, length)
    for i, layer in enumerate(spec.layers):
        if isinstance(layer, DenseLayer):
            flat = state.reshape(state.shape[0], -1)
            state = (flat @ layer.weights.T + layer.bias)[:, None, :]
        else:
            state = _conv1d_forward_batch(layer, state)
        state = _apply_activation(state, layer.activation, layer.slope)
        if not np.all(np.isfinite(state)):
            raise NumericError(f"non-finite values after layer {i}")
    return state.reshape(state.shape[0], -1)


def neural_forward(spec: NeuralExtractor, sample: np.ndarray) -> np.ndarray:
    x = np.asarray(sample, dtype=float).ravel()
    if x.size != spec.input_dim:
        raise InvalidInputError(
            f"sample has {x.size} entries, extractor expects {spec.input_dim}")
    state = x[None, :]
    for i, layer in enumerate(spec.layers):
        if isinstance(layer, DenseLayer):
            state = (layer.weights @ state.ravel() + layer.bias)[None, :]
        else:
            state = _conv1d_forward(layer, state)
        state = _apply_activation(state, layer.activation, layer.slope)
        if not np.all(np.isfinite(state)):
            raise NumericError(f"non-finite values after layer {i}")
    return state.ravel()


# ---------------------------------------------------------------------------
# dispatch and weights-file loading
# ---------------------------------------------------------------------------


def extract(spec, sample: np.ndarray) -> np.ndarray:
    """Apply any extractor to one raw sample vector."""
    if isinstance(spec, SummaryStatsExtractor):
        return summary_stats_extract(sample, spec.config)
    if isinstance(spec, PcaExtractor):
        x = np.asarray(sample, dtype=float)
        if x.shape != spec.mean.shape:
            raise InvalidInputError(
                f"sample has {x.size} entries, extractor expects {spec.mean.size}")
        return spec.components @ (x - spec.mean)
    if isinstance(spec, NeuralExtractor):
        return neural_forward(spec, sample)
    raise InvalidInputError(f"unknown extractor type {type(spec)!r}")


def extract_matrix(spec, samples: np.ndarray) -> np.ndarray:
    """Apply an extractor to each row; equals row-wise :func:`extract`."""
    samples = np.atleast_2d(np.asarray(samples, dtype=float))
    if isinstance(spec, SummaryStatsExtractor):
        return summary_stats_matrix(samples, spec.config)
    if isinstance(spec, PcaExtractor):
        if samples.shape[1] != spec.mean.size:
            raise InvalidInputError(
                f"samples have {samples.shape[1]} columns, extractor expects "
                f"{spec.mean.size}")
        return (samples - spec.mean) @ spec.components.T
    if isinstance(spec, NeuralExtractor):
        # chunked to bound the conv window workspace
        chunks = [neural_forward_batch(spec, samples[i:i + 256])
                  for i in range(0, samples.shape[0], 256)]
        return np.concatenate(chunks, axis=0)
    return np.stack([extract(spec, row) for row in samples])


def _parse_activation(raw, index: int) -> tuple[str, float]:
    if not isinstance(raw, str):
        raise WeightsFormatError(f"layer {index}: activation must be a string")
    if raw.startswith("leaky_relu:"):
        try:
            slope = float(raw.split(":", 1)[1])
        except ValueError:
            raise WeightsFormatError(
                f"layer {index}: bad leaky_relu slope in {raw!r}") from None
        return "leaky_relu", slope
    if raw in ("linear", "relu", "sigmoid", "tanh"):
        return raw, 0.0
    raise WeightsFormatError(f"layer {index}: unknown activation {raw!r}")


def load_weights_file(path) -> NeuralExtractor:
    """Load a neural extractor from the JSON interchange format.

    Dropout layers in the file are ignored at inference.  Any schema or
    dimension-chain violation raises :class:`WeightsFormatError` naming the
    offending layer.
    """
    with open(path, "r", encoding="utf-8") as fh:
        doc = json.load(fh)
    try:
        input_dim = int(doc["input_dim"])
        output_dim = int(doc["output_dim"])
        raw_layers = doc["layers"]
    except (KeyError, TypeError) as exc:
        raise WeightsFormatError(f"missing top-level field: {exc}") from exc
    layers = []
    for i, raw in enumerate(raw_layers):
        kind = raw.get("type")
        if kind == "dropout":
            continue
        if kind == "dense":
            act, slope = _parse_activation(raw.get("activation", "linear"), i)
            try:
                layer = DenseLayer(np.array(raw["weights"], dtype=float),
                                   np.array(raw["bias"], dtype=float), act, slope)
            except (KeyError, ValueError, InvalidInputError) as exc:
                raise WeightsFormatError(f"layer {i}: {exc}") from exc
        elif kind == "conv1d":
            act, slope = _parse_activation(raw.get("activation", "linear"), i)
            try:
                w = np.array(raw["weights"], dtype=float)
                expected = (int(raw["out_channels"]), int(raw["in_channels"]),
                            int(raw["kernel"]))
                if w.shape != expected:
                    raise WeightsFormatError(
                        f"weights shape {w.shape} != declared {expected}")
                layer = Conv1dLayer(w, np.array(raw["bias"], dtype=float),
                                    int(raw["stride"]), act, slope)
            except (KeyError, ValueError, InvalidInputError) as exc:
                raise WeightsFormatError(f"layer {i}: {exc}") from exc
        else:
            raise WeightsFormatError(f"layer {i}: unknown type {kind!r}")
        layers.append(layer)
    try:
        return NeuralExtractor(input_dim, output_dim, tuple(layers))
    except InvalidInputError as exc:
        raise WeightsFormatError(str(exc)) from exc
