"""Command-line front end.

Commands: simulate, extract, calibrate, typeerror, realism, bounds.

Configuration is a JSON document; command-line flags override config fields.
Every output file is self-describing: CSVs start with a ``#`` comment line
carrying the config hash and seed, JSON summaries embed them as fields.
Reruns with the same config and seed are byte-identical, except for the
``timestamp`` field of JSON summaries.

Exit codes: 0 ok, 2 invalid input, 3 I/O failure, 4 simulator failure.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import json
import math
import sys
import time
from concurrent.futures import ProcessPoolExecutor

import numpy as np

from . import aggregation, eligibility, features, realism
from .errors import InvalidInputError
from .seeding import REAL_STREAM, SIM_STREAM, child_seed
from .simulators import (
    Gg1Params,
    MarketConfig,
    Mm1Params,
    simulate_gg1_batch,
    simulate_market,
    simulate_mm1_batch,
)
from .stats_core import EmpiricalSample, ThresholdSpec

EXIT_OK = 0
EXIT_INVALID = 2
EXIT_IO = 3
EXIT_SIM_FAILURE = 4

MM1_PARAMS = ("lam", "mu")
GG1_PARAMS = ("k", "theta", "mu", "sigma")
MARKET_PARAMS = ("num_value_agents", "num_noise_agents", "r_bar", "kappa",
                 "lambda_a")
MARKET_INT_PARAMS = ("num_value_agents", "num_noise_agents")


_NON_SEMANTIC_KEYS = ("out", "out_decisions", "out_summary", "threads")


def config_hash(cfg: dict) -> str:
    """Hash of the semantic configuration (output paths and worker counts
    do not change results, so they are excluded)."""
    semantic = {k: v for k, v in cfg.items() if k not in _NON_SEMANTIC_KEYS}
    blob = json.dumps(semantic, sort_keys=True, default=str).encode()
    return hashlib.sha256(blob).hexdigest()[:12]


def load_config(path: str | None, overrides: dict) -> dict:
    cfg = {}
    if path:
        with open(path, "r", encoding="utf-8") as fh:
            cfg = json.load(fh)
        if not isinstance(cfg, dict):
            raise InvalidInputError("config file must hold a JSON object")
    for key, val in overrides.items():
        if val is not None:
            cfg[key] = val
    return cfg


def _require(cfg: dict, key: str):
    if cfg.get(key) is None:
        raise InvalidInputError(f"missing required option {key!r}")
    return cfg[key]


def _check_alpha(cfg: dict):
    alpha = cfg.get("alpha")
    if alpha is not None and not 0.0 < float(alpha) < 1.0:
        raise InvalidInputError(f"alpha must be in (0, 1), got {alpha}")


# ---------------------------------------------------------------------------
# simulators as named output samplers
# ---------------------------------------------------------------------------


def make_simulator(model: str, fixed: dict, param_names: tuple[str, ...]):
    """Returns (sampler, output_width).  The sampler maps a theta vector over
    ``param_names`` (plus ``fixed`` values) to a batch of model outputs."""

    def params_from(theta):
        vals = dict(fixed)
        vals.update({name: float(t) for name, t in zip(param_names, theta)})
        return vals

    def need(vals, name):
        if name not in vals:
            raise InvalidInputError(f"model {model!r} needs parameter {name!r}")
        return float(vals[name])

    if model == "mm1":
        def sampler(theta, n, seed):
            v = params_from(theta)
            p = Mm1Params(lam=need(v, "lam"), mu=need(v, "mu"),
                          num_customers=int(v.get("num_customers", 100)))
            return simulate_mm1_batch(p, n, np.random.default_rng(seed))
        return sampler, 1

    if model == "gg1":
        def sampler(theta, n, seed):
            v = params_from(theta)
            p = Gg1Params(k=need(v, "k"), theta=need(v, "theta"),
                          mu=need(v, "mu"), sigma=need(v, "sigma"),
                          num_customers=int(v.get("num_customers", 10)))
            return simulate_gg1_batch(p, n, np.random.default_rng(seed))
        width = int(fixed.get("num_customers", 10))
        return sampler, width

    if model == "market":
        def sampler(theta, n, seed):
            v = params_from(theta)
            cfg = MarketConfig(
                num_value_agents=int(round(v.get("num_value_agents", 100))),
                num_noise_agents=int(round(v.get("num_noise_agents", 1000))),
                r_bar=v.get("r_bar", 1e5),
                kappa=v.get("kappa", 1.67e-12),
                lambda_a=v.get("lambda_a", 1e-13),
                session_seconds=int(v.get("session_seconds", 1800)),
            )
            root = seed if isinstance(seed, np.random.SeedSequence) \
                else np.random.SeedSequence(seed)
            return np.stack([simulate_market(cfg, s) for s in root.spawn(n)])
        width = int(fixed.get("session_seconds", 1800)) - 1
        return sampler, width

    raise InvalidInputError(f"unknown model {model!r}")


_NAME_ALIASES = {"lambda": "lam"}


def canonical_name(name: str) -> str:
    return _NAME_ALIASES.get(name, name)


def gather_fixed(cfg: dict, model: str) -> dict:
    names = {"mm1": MM1_PARAMS, "gg1": GG1_PARAMS, "market": MARKET_PARAMS}[model]
    fixed = {canonical_name(k): v for k, v in cfg.get("fixed", {}).items()}
    for name in names + ("num_customers", "session_seconds"):
        if cfg.get(name) is not None:
            fixed[name] = cfg[name]
    return fixed


# ---------------------------------------------------------------------------
# CSV / JSON output helpers
# ---------------------------------------------------------------------------


def _fmt(x) -> str:
    if isinstance(x, (float, np.floating)):
        return repr(float(x))
    return str(x)


def write_csv(path: str, header: list[str], rows, meta: dict):
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write("# simcal " + " ".join(f"{k}={v}" for k, v in meta.items()) + "\n")
        writer = csv.writer(fh)
        writer.writerow(header)
        for row in rows:
            writer.writerow([_fmt(x) for x in row])


def read_csv_matrix(path: str) -> np.ndarray:
    rows = []
    with open(path, "r", encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            rows.append(line.split(","))
    if not rows:
        raise InvalidInputError(f"no data rows in {path}")
    try:
        float(rows[0][0])
        data_rows = rows
    except ValueError:
        data_rows = rows[1:]  # header row
    if not data_rows:
        raise InvalidInputError(f"no data rows in {path}")
    return np.array([[float(x) for x in r] for r in data_rows])


def write_json(path: str, doc: dict):
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(doc, fh, indent=2, sort_keys=True)
        fh.write("\n")


# ---------------------------------------------------------------------------
# extractors
# ---------------------------------------------------------------------------


def build_extractor(spec: dict | None, fit_data: np.ndarray | None):
    """Extractor from its config block; PCA fits on ``fit_data``."""
    if spec is None or spec.get("kind") in (None, "none", "identity"):
        return None
    kind = spec["kind"]
    if kind in ("summary", "summary_stats"):
        cfg = features.SummaryStatsConfig(
            quantiles=tuple(spec.get("quantiles", (0.05, 0.25, 0.5, 0.75, 0.95))),
            acf_lags=tuple(spec.get("acf_lags", (1, 2, 5, 10))),
        )
        return features.SummaryStatsExtractor(cfg)
    if kind == "pca":
        if fit_data is None:
            raise InvalidInputError("pca extractor needs data to fit on")
        return features.fit_pca(fit_data, K=int(spec.get("K", 5)))
    if kind == "neural":
        return features.load_weights_file(_require(spec, "weights"))
    raise InvalidInputError(f"unknown extractor kind {kind!r}")


def featureize(extractor, raw: np.ndarray) -> np.ndarray:
    raw = np.asarray(raw, dtype=float)
    if raw.ndim == 1:
        raw = raw[:, None]  # one scalar output per run
    if extractor is None:
        return raw
    return features.extract_matrix(extractor, raw)


# ---------------------------------------------------------------------------
# feature-space eligibility decision
# ---------------------------------------------------------------------------


def feature_decision(real_X: np.ndarray, sim_Y: np.ndarray, method: str,
                     alpha: float, mode: str, mc_draws: int, seed) -> tuple:
    """(statistic, threshold, eligible) for one candidate in feature space."""
    if method == "sks":
        rep = aggregation.sks_decide(real_X, sim_Y, alpha, mode=mode)
    elif method == "ssmd":
        rep = aggregation.ssmd_decide(real_X, sim_Y, alpha)
    elif method == "esmd":
        rep = aggregation.esmd_decide(real_X, sim_Y, alpha, mc_draws=mc_draws,
                                      seed=seed)
    else:
        raise InvalidInputError(f"unknown method {method!r}")
    return rep.statistic, rep.threshold, rep.eligible


def _candidate_rows(payload) -> list[dict]:
    """Evaluate a chunk of candidates; used directly and via worker pools."""
    (model, fixed, param_names, method, alpha, mode, n, seed, mc_draws,
     extractor_spec, real_raw, thetas, ids) = payload
    sampler, _ = make_simulator(model, fixed, param_names)
    extractor = build_extractor(extractor_spec, real_raw)
    real_X = featureize(extractor, real_raw)
    real_sample = None
    if method == "ks":
        real_sample = EmpiricalSample.from_data(real_X.ravel())
    spec = ThresholdSpec(alpha=alpha, mode=mode)
    rows = []
    for cid, theta in zip(ids, thetas):
        row = {"id": cid, "theta": list(map(float, theta)), "error": None}
        try:
            out = np.asarray(sampler(theta, n, child_seed(seed, SIM_STREAM, cid)))
            if method == "ks":
                d = eligibility.decide_candidate(real_sample, out.ravel(), spec)
                stat, thr, ok = d.statistic, d.threshold, d.eligible
            else:
                sim_Y = featureize(extractor, out)
                stat, thr, ok = feature_decision(
                    real_X, sim_Y, method, alpha, mode, mc_draws,
                    child_seed(seed, 9, cid))
            row.update(statistic=stat, threshold=thr, eligible=ok)
        except Exception as exc:
            row.update(statistic=float("nan"), threshold=float("nan"),
                       eligible=False, error=str(exc))
        rows.append(row)
    return rows


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------


def cmd_simulate(cfg: dict) -> int:
    _check_alpha(cfg)
    model = _require(cfg, "model")
    reps = int(_require(cfg, "reps"))
    seed = int(cfg.get("seed", 0))
    out = _require(cfg, "out")
    if reps < 1:
        raise InvalidInputError("reps must be >= 1")
    fixed = gather_fixed(cfg, model)
    sampler, width = make_simulator(model, fixed, ())
    raw = np.asarray(sampler((), reps, child_seed(seed, SIM_STREAM, 0)))
    data = raw[:, None] if raw.ndim == 1 else raw
    header = (["value"] if data.shape[1] == 1
              else [f"x{i + 1}" for i in range(data.shape[1])])
    meta = {"config_hash": config_hash(cfg), "seed": seed, "model": model}
    write_csv(out, header, data, meta)
    return EXIT_OK


def cmd_extract(cfg: dict) -> int:
    data = read_csv_matrix(_require(cfg, "data"))
    extractor = build_extractor(_require(cfg, "extractor"), data)
    feats = featureize(extractor, data)
    if isinstance(extractor, features.SummaryStatsExtractor):
        header = extractor.config.feature_names()
    else:
        header = [f"f{i + 1}" for i in range(feats.shape[1])]
    meta = {"config_hash": config_hash(cfg), "rows": feats.shape[0]}
    write_csv(_require(cfg, "out"), header, feats, meta)
    return EXIT_OK


def cmd_calibrate(cfg: dict) -> int:
    _check_alpha(cfg)
    model = _require(cfg, "model")
    alpha = float(_require(cfg, "alpha"))
    mode = cfg.get("mode", "two_sample")
    method = cfg.get("method", "ks")
    n = int(_require(cfg, "n"))
    m = int(_require(cfg, "m"))
    seed = int(cfg.get("seed", 0))
    mc_draws = int(cfg.get("mc_draws", 50_000))
    threads = max(1, int(cfg.get("threads", 1)))
    if m < 1:
        raise InvalidInputError("need at least one candidate (m >= 1)")

    bounds = _require(cfg, "bounds")
    space = eligibility.ParameterSpace.from_bounds(
        {canonical_name(k): tuple(v) for k, v in bounds.items()})
    candidates = eligibility.generate_candidates(
        space, m, cfg.get("candidate_mode", "uniform_random"), seed=seed)

    fixed = gather_fixed(cfg, model)
    sampler, _ = make_simulator(model, fixed, space.names)

    if cfg.get("real_data"):
        real_raw = read_csv_matrix(cfg["real_data"])
    else:
        truth_cfg = {canonical_name(k): v for k, v in _require(cfg, "truth").items()}
        N = int(_require(cfg, "N"))
        truth = np.array([float(truth_cfg[name]) for name in space.names])
        real_raw = np.atleast_2d(
            np.asarray(sampler(truth, N, child_seed(seed, REAL_STREAM, 0))))
        if real_raw.shape[0] != N:
            real_raw = real_raw.reshape(N, -1)

    payload_base = (model, fixed, tuple(space.names), method, alpha, mode, n,
                    seed, mc_draws, cfg.get("extractor"), real_raw)
    thetas = [c.theta for c in candidates]
    ids = [c.id for c in candidates]
    if threads > 1:
        chunks = []
        step = math.ceil(len(ids) / (threads * 4))
        for i in range(0, len(ids), step):
            chunks.append(payload_base + (thetas[i:i + step], ids[i:i + step]))
        rows = []
        with ProcessPoolExecutor(max_workers=threads) as pool:
            for part in pool.map(_candidate_rows, chunks):
                rows.extend(part)
    else:
        rows = _candidate_rows(payload_base + (thetas, ids))

    failures = sum(1 for r in rows if r["error"])
    eligible = sum(1 for r in rows if r["eligible"])
    meta = {"config_hash": config_hash(cfg), "seed": seed, "model": model,
            "method": method}
    dim = space.dim
    header = (["id"] + [f"theta_{i + 1}" for i in range(dim)]
              + ["statistic", "threshold", "eligible", "error_flag"])
    csv_rows = ([r["id"]] + r["theta"]
                + [r["statistic"], r["threshold"],
                   int(bool(r["eligible"])), int(bool(r["error"]))]
                for r in rows)
    write_csv(_require(cfg, "out_decisions"), header, csv_rows, meta)

    summary = {
        "config_hash": meta["config_hash"],
        "seed": seed,
        "alpha": alpha,
        "mode": mode,
        "method": method,
        "model": model,
        "m": len(rows),
        "n": n,
        "N": int(real_raw.shape[0]),
        "num_eligible": eligible,
        "num_errors": failures,
        "empty_eligible_set": eligible == 0,
        "errors": {str(r["id"]): r["error"] for r in rows if r["error"]},
        "parameter_names": list(space.names),
        "timestamp": time.strftime("%Y-%m-%dT%H:%M:%S"),
    }
    write_json(_require(cfg, "out_summary"), summary)
    if len(rows) and failures / len(rows) > 0.5:
        print(f"simulator failed on {failures}/{len(rows)} candidates",
              file=sys.stderr)
        return EXIT_SIM_FAILURE
    return EXIT_OK


def cmd_typeerror(cfg: dict) -> int:
    _check_alpha(cfg)
    model = _require(cfg, "model")
    alpha = float(_require(cfg, "alpha"))
    mode = cfg.get("mode", "two_sample")
    method = cfg.get("method", "ks")
    n = int(_require(cfg, "n"))
    N = int(_require(cfg, "N"))
    reps = int(_require(cfg, "reps"))
    seed = int(cfg.get("seed", 0))
    mc_draws = int(cfg.get("mc_draws", 50_000))
    if reps < 1:
        raise InvalidInputError("reps must be >= 1")

    truth_cfg = {canonical_name(k): v for k, v in _require(cfg, "truth").items()}
    names = tuple(truth_cfg)
    theta0 = np.array([float(truth_cfg[k]) for k in names])
    fixed = gather_fixed(cfg, model)
    sampler, _ = make_simulator(model, fixed, names)
    extractor_spec = cfg.get("extractor")

    rejections = failures = 0
    gaps = []
    spec = ThresholdSpec(alpha=alpha, mode=mode)
    for r in range(reps):
        try:
            real = np.atleast_2d(np.asarray(
                sampler(theta0, N, child_seed(seed, REAL_STREAM, r))))
            sim = np.atleast_2d(np.asarray(
                sampler(theta0, n, child_seed(seed, SIM_STREAM, r))))
            if real.shape[0] != N:
                real = real.reshape(N, -1)
            if sim.shape[0] != n:
                sim = sim.reshape(n, -1)
            extractor = build_extractor(extractor_spec, real)
            if method == "ks":
                d = eligibility.decide_candidate(real.ravel(), sim.ravel(), spec)
                stat, thr, ok = d.statistic, d.threshold, d.eligible
            else:
                stat, thr, ok = feature_decision(
                    featureize(extractor, real), featureize(extractor, sim),
                    method, alpha, mode, mc_draws, child_seed(seed, 9, r))
        except Exception:
            failures += 1
            continue
        if not ok:
            rejections += 1
        gaps.append(thr - stat)
    ok_reps = reps - failures
    rate = rejections / ok_reps if ok_reps else None
    se = (math.sqrt(rate * (1 - rate) / ok_reps)
          if rate is not None and ok_reps > 1 else None)
    doc = {
        "config_hash": config_hash(cfg),
        "seed": seed,
        "alpha": alpha,
        "mode": mode,
        "method": method,
        "model": model,
        "n": n,
        "N": N,
        "reps": reps,
        "failures": failures,
        "type1_rate": rate,
        "binomial_se": se,
        "gap_mean": float(np.mean(gaps)) if gaps else None,
        "gap_std": float(np.std(gaps)) if gaps else None,
        "timestamp": time.strftime("%Y-%m-%dT%H:%M:%S"),
    }
    write_json(_require(cfg, "out"), doc)
    return EXIT_OK


def cmd_realism(cfg: dict) -> int:
    _check_alpha(cfg)
    if cfg.get("data"):
        series = read_csv_matrix(cfg["data"])
    else:
        model = _require(cfg, "model")
        if model != "market":
            raise InvalidInputError("realism without --data requires the market model")
        reps = int(_require(cfg, "reps"))
        seed = int(cfg.get("seed", 0))
        fixed = gather_fixed(cfg, "market")
        sampler, _ = make_simulator("market", fixed, ())
        series = sampler((), reps, child_seed(seed, SIM_STREAM, 0))
    reports = [realism.stylized_fact_report(row).to_dict() for row in series]
    ac20 = [r["return_autocorr_at_lag"].get("20") for r in reports]
    ac20 = [v for v in ac20 if v is not None]
    kurts = [r["minutely_return_kurtosis"] for r in reports
             if r["minutely_return_kurtosis"] is not None]
    doc = {
        "config_hash": config_hash(cfg),
        "num_series": len(reports),
        "aggregate": {
            "median_abs_autocorr_20min": (float(np.median(np.abs(ac20)))
                                          if ac20 else None),
            "median_autocorr_20min": float(np.median(ac20)) if ac20 else None,
            "median_minutely_kurtosis": float(np.median(kurts)) if kurts else None,
        },
        "reports": reports,
        "timestamp": time.strftime("%Y-%m-%dT%H:%M:%S"),
    }
    write_json(_require(cfg, "out"), doc)
    return EXIT_OK


def cmd_bounds(cfg: dict) -> int:
    decisions = read_decisions_csv(_require(cfg, "decisions"))
    psi_rows = read_csv_matrix(_require(cfg, "psi"))
    psi = {int(r[0]): float(r[1]) for r in psi_rows}
    eligible = [d for d in decisions if d["eligible"]]
    doc = {"num_eligible": len(eligible),
           "timestamp": time.strftime("%Y-%m-%dT%H:%M:%S")}
    if not eligible:
        doc.update(lower=None, upper=None, empty_eligible_set=True)
    else:
        missing = [d["id"] for d in eligible if d["id"] not in psi]
        if missing:
            raise InvalidInputError(f"psi values missing for candidates {missing}")
        vals = [psi[d["id"]] for d in eligible]
        doc.update(lower=min(vals), upper=max(vals), empty_eligible_set=False)
    write_json(_require(cfg, "out"), doc)
    return EXIT_OK


def read_decisions_csv(path: str) -> list[dict]:
    out = []
    with open(path, "r", encoding="utf-8") as fh:
        reader = csv.reader(line for line in fh if not line.startswith("#"))
        header = next(reader, None)
        if header is None:
            raise InvalidInputError(f"no rows in {path}")
        idx = {name: i for i, name in enumerate(header)}
        for row in reader:
            out.append({
                "id": int(row[idx["id"]]),
                "statistic": float(row[idx["statistic"]]),
                "threshold": float(row[idx["threshold"]]),
                "eligible": row[idx["eligible"]] in ("1", "true", "True"),
                "error": row[idx["error_flag"]] not in ("0", "", "false"),
            })
    return out


# ---------------------------------------------------------------------------
# argument parsing
# ---------------------------------------------------------------------------


def _add_common(p: argparse.ArgumentParser):
    p.add_argument("--config", help="JSON config file; flags override its fields")
    p.add_argument("--seed", type=int)
    p.add_argument("--alpha", type=float)
    p.add_argument("--threads", type=int)


def _add_model_flags(p: argparse.ArgumentParser):
    p.add_argument("--model", choices=["mm1", "gg1", "market"])
    p.add_argument("--lambda", dest="lam", type=float)
    p.add_argument("--mu", type=float)
    p.add_argument("--k", type=float)
    p.add_argument("--theta", type=float)
    p.add_argument("--sigma", type=float)
    p.add_argument("--num-customers", dest="num_customers", type=int)
    p.add_argument("--value-agents", dest="num_value_agents", type=int)
    p.add_argument("--noise-agents", dest="num_noise_agents", type=int)
    p.add_argument("--r-bar", dest="r_bar", type=float)
    p.add_argument("--kappa", type=float)
    p.add_argument("--lambda-a", dest="lambda_a", type=float)
    p.add_argument("--session-seconds", dest="session_seconds", type=int)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="simcal",
                                     description="eligibility-set calibration")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="run a simulator, write one run per row")
    _add_common(p)
    _add_model_flags(p)
    p.add_argument("--reps", type=int)
    p.add_argument("-o", "--out")

    p = sub.add_parser("extract", help="extract features from a data CSV")
    _add_common(p)
    p.add_argument("--data")
    p.add_argument("--extractor-kind", dest="extractor_kind",
                   choices=["summary", "pca", "neural"])
    p.add_argument("--weights")
    p.add_argument("--pca-k", dest="pca_k", type=int)
    p.add_argument("-o", "--out")

    p = sub.add_parser("calibrate", help="build an eligibility set")
    _add_common(p)
    _add_model_flags(p)
    p.add_argument("--m", type=int)
    p.add_argument("--n", type=int)
    p.add_argument("--N", dest="N", type=int)
    p.add_argument("--mode", choices=["one_sample", "two_sample"])
    p.add_argument("--method", choices=["ks", "sks", "ssmd", "esmd"])
    p.add_argument("--candidate-mode", dest="candidate_mode",
                   choices=["grid", "uniform_random"])
    p.add_argument("--real-data", dest="real_data")
    p.add_argument("--out-decisions", dest="out_decisions")
    p.add_argument("--out-summary", dest="out_summary")

    p = sub.add_parser("typeerror", help="Monte Carlo Type I error at the truth")
    _add_common(p)
    _add_model_flags(p)
    p.add_argument("--n", type=int)
    p.add_argument("--N", dest="N", type=int)
    p.add_argument("--reps", type=int)
    p.add_argument("--mode", choices=["one_sample", "two_sample"])
    p.add_argument("--method", choices=["ks", "sks", "ssmd", "esmd"])
    p.add_argument("-o", "--out")

    p = sub.add_parser("realism", help="stylized-fact reports for return series")
    _add_common(p)
    _add_model_flags(p)
    p.add_argument("--data")
    p.add_argument("--reps", type=int)
    p.add_argument("-o", "--out")

    p = sub.add_parser("bounds", help="min/max of psi over the eligible set")
    _add_common(p)
    p.add_argument("--decisions")
    p.add_argument("--psi")
    p.add_argument("-o", "--out")

    return parser


_COMMANDS = {
    "simulate": cmd_simulate,
    "extract": cmd_extract,
    "calibrate": cmd_calibrate,
    "typeerror": cmd_typeerror,
    "realism": cmd_realism,
    "bounds": cmd_bounds,
}


def main(argv=None) -> int:
    parser = build_parser()
    args = vars(parser.parse_args(argv))
    command = args.pop("command")
    config_path = args.pop("config", None)
    if command == "extract" and args.get("extractor_kind"):
        args["extractor"] = {"kind": args.pop("extractor_kind"),
                             "weights": args.pop("weights", None),
                             "K": args.pop("pca_k", None) or 5}
    try:
        cfg = load_config(config_path, args)
        return _COMMANDS[command](cfg)
    except InvalidInputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
