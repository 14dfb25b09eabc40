"""Acceptance checks for the trainer's exported weights.

Skipped when trainer/exports/ has not been produced yet (build the trainer
and run its export script first; see the README).
"""

import json
import math
import pathlib

import numpy as np
import pytest

from simcal.aggregation import sks_decide
from simcal.features import extract_matrix, load_weights_file
from simcal.seeding import child_seed
from simcal.simulators import appendix_configs, simulate_market_batch

from test_acceptance import criterion

EXPORT_DIR = pathlib.Path(__file__).resolve().parents[1] / "trainer" / "exports"
HIDDEN_SIZES = (15, 29, 57, 113, 225, 450)

pytestmark = pytest.mark.skipif(
    not EXPORT_DIR.is_dir(), reason="trainer exports not built")

PARITY_FILES = (
    "autoencoder_encoder_k15",
    "autoencoder_encoder_k450",
    "gan_disc_hidden_k15",
    "gan_disc_hidden_k450",
)


def test_cross_language_parity():
    with criterion("trainer forward pass matches the loader within 1e-5"):
        for stem in PARITY_FILES:
            spec = load_weights_file(EXPORT_DIR / f"{stem}.json")
            fixtures = json.loads((EXPORT_DIR / f"{stem}_fixtures.json").read_text())
            inputs = np.asarray(fixtures["inputs"], dtype=float)
            expected = np.asarray(fixtures["outputs"], dtype=float)
            assert inputs.shape[0] == 100, stem
            got = extract_matrix(spec, inputs)
            worst = float(np.max(np.abs(got - expected)))
            assert worst <= 1e-5, (stem, worst)


def test_disc_output_head_is_scalar():
    with criterion("discriminator output head exports with output_dim 1"):
        spec = load_weights_file(EXPORT_DIR / "gan_disc_output_k15.json")
        assert spec.output_dim == 1
        out = extract_matrix(spec, np.zeros((3, spec.input_dim)))
        assert np.all((out > 0.0) & (out < 1.0))


@pytest.fixture(scope="module")
def truth_run_pool():
    # 50 replications x (N=100 real + n=100 simulated) sessions at the truth
    cfg = appendix_configs()[1]
    reps, size = 50, 100
    real = [simulate_market_batch(cfg, size, child_seed(3100, r, 0))
            for r in range(reps)]
    sim = [simulate_market_batch(cfg, size, child_seed(3100, r, 1))
           for r in range(reps)]
    return real, sim


def test_hidden_size_sweep_gap_positive(truth_run_pool):
    with criterion("positive mean (threshold - SKS) for all six hidden sizes"):
        real_runs, sim_runs = truth_run_pool
        for k in HIDDEN_SIZES:
            spec = load_weights_file(EXPORT_DIR / f"autoencoder_encoder_k{k}.json")
            assert spec.output_dim == k
            gaps = []
            for real, sim in zip(real_runs, sim_runs):
                rep = sks_decide(extract_matrix(spec, real),
                                 extract_matrix(spec, sim),
                                 0.05, mode="two_sample")
                gaps.append(rep.threshold - rep.statistic)
            mean_gap = float(np.mean(gaps))
            assert mean_gap > 0.0, (k, mean_gap)
