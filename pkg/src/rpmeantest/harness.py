"""Simulation harness: ROC studies over the ten covariance/shift settings,
projection-dimension sweeps, p-value stability and covariance summary tables.

Every replication draws its covariance, shift, data and projections from
streams derived from ``(seed, setting, role, replication, purpose)``, so a
configuration always reproduces the same scores no matter how many worker
threads are used.
"""
from __future__ import annotations

import csv
import io
import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np

from .baselines import BASELINES
from .errors import ReplicationError
from .models import (
    CovarianceModel,
    ShiftModel,
    covariance_summaries,
    realize_covariance,
    sample_shift,
)
from .rp_test import (
    DEFAULT_PROJECTIONS,
    TwoSampleData,
    hotelling_statistic,
    null_moments,
    projection_terms,
    run_rp_test,
)
from .sampling import RngStream, as_generator, sample_mvn

# (covariance kind, decay, shift kind) for settings 1..10
SETTINGS = {
    1: ("diagonal", "slow", "uniform"),
    2: ("diagonal", "fast", "uniform"),
    3: ("random", "slow", "uniform"),
    4: ("random", "fast", "uniform"),
    5: ("block", None, "uniform"),
    6: ("diagonal", "slow", "tilted"),
    7: ("diagonal", "fast", "tilted"),
    8: ("random", "slow", "tilted"),
    9: ("random", "fast", "tilted"),
    10: ("block", None, "tilted"),
}


def setting_models(setting_id: int, p: int = 200) -> tuple[CovarianceModel, ShiftModel]:
    kind, decay, shift = SETTINGS[setting_id]
    if kind == "diagonal":
        cov = CovarianceModel.diagonal_decay(p, decay)
    elif kind == "random":
        cov = CovarianceModel.random_ortho_decay(p, decay)
    else:
        if p % 5:
            raise ValueError("block settings need p divisible by 5")
        cov = CovarianceModel.block(p // 5, 5, 0.8)
    shift_model = ShiftModel.uniform(1.0) if shift == "uniform" else ShiftModel.tilted(2.0, "norm")
    return cov, shift_model


@dataclass(frozen=True)
class ExperimentConfig:
    """A simulation recipe.

    ``methods`` entries are ``rp``, ``rp-<N>`` (RP averaged over N
    projections), ``bs``, ``cq``, ``sd`` or ``hotelling``. ``k=None`` means
    ``floor(n / 2)``.
    """

    setting_id: int | str = "custom"
    p: int = 200
    n1: int = 50
    n2: int = 50
    reps_null: int = 500
    reps_alt: int = 500
    alpha: float = 0.05
    k: int | None = None
    projections: int = DEFAULT_PROJECTIONS
    methods: tuple = ("rp", "bs", "cq", "sd")
    seed: int = 0
    covariance: CovarianceModel | None = field(default=None, compare=False)
    shift: ShiftModel | None = None

    def __post_init__(self):
        object.__setattr__(self, "methods", tuple(self.methods))
        if self.covariance is None or self.shift is None:
            if self.setting_id not in SETTINGS:
                raise ValueError(f"setting {self.setting_id!r} needs explicit covariance and shift models")
            cov, shift = setting_models(self.setting_id, self.p)
            if self.covariance is None:
                object.__setattr__(self, "covariance", cov)
            if self.shift is None:
                object.__setattr__(self, "shift", shift)
        if self.covariance.dim != self.p:
            raise ValueError(f"covariance dimension {self.covariance.dim} != p={self.p}")
        if self.reps_null < 1 or self.reps_alt < 1:
            raise ValueError("replication counts must be >= 1")
        if self.n1 < 2 or self.n2 < 2:
            raise ValueError("need n1, n2 >= 2")
        if self.k is not None and not 1 <= self.k <= min(self.n, self.p):
            raise ValueError(f"k={self.k} must satisfy 1 <= k <= min(n, p)")
        for m in self.methods:
            _parse_method(m, self.projections)

    @property
    def n(self) -> int:
        return self.n1 + self.n2 - 2

    @property
    def k_effective(self) -> int:
        return self.k if self.k is not None else max(1, min(self.n // 2, self.p))

    def to_dict(self) -> dict:
        out = {f: getattr(self, f) for f in ("setting_id", "p", "n1", "n2", "reps_null", "reps_alt",
                                              "alpha", "k", "projections", "seed")}
        out["methods"] = list(self.methods)
        out["covariance"] = self.covariance.to_dict()
        out["shift"] = self.shift.to_dict()
        return out

    @classmethod
    def from_dict(cls, spec: dict) -> "ExperimentConfig":
        spec = dict(spec)
        if "reps" in spec:
            reps = spec.pop("reps")
            spec.setdefault("reps_null", reps)
            spec.setdefault("reps_alt", reps)
        if spec.get("k") == "auto":
            spec["k"] = None
        if isinstance(spec.get("covariance"), dict):
            spec["covariance"] = CovarianceModel.from_dict(spec["covariance"])
        if isinstance(spec.get("shift"), dict):
            spec["shift"] = ShiftModel.from_dict(spec["shift"])
        return cls(**spec)

    @classmethod
    def from_json(cls, path) -> "ExperimentConfig":
        return cls.from_dict(json.loads(Path(path).read_text(encoding="utf-8")))


def _parse_method(label: str, default_projections: int) -> tuple[str, int | None]:
    if label == "rp":
        return "rp", default_projections
    if label.startswith("rp-"):
        try:
            N = int(label[3:])
        except ValueError:
            raise ValueError(f"bad method label {label!r}") from None
        if N < 1:
            raise ValueError(f"bad method label {label!r}")
        return "rp", N
    if label in BASELINES or label == "hotelling":
        return label, None
    raise ValueError(f"unknown method {label!r}")


@dataclass(frozen=True)
class RocCurve:
    fpr: np.ndarray
    tpr: np.ndarray
    auc: float
    method: str = ""
    n_null: int = 0
    n_alt: int = 0

    @property
    def points(self) -> list[tuple[float, float]]:
        return list(zip(self.fpr.tolist(), self.tpr.tolist()))

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["fpr", "tpr"])
        for a, b in zip(self.fpr, self.tpr):
            w.writerow([repr(float(a)), repr(float(b))])
        return buf.getvalue()


def roc_from_scores(null_scores, alt_scores, method: str = "") -> RocCurve:
    """ROC curve for "reject when score >= threshold", ties grouped, trapezoid AUC."""
    null = np.asarray(null_scores, dtype=float).ravel()
    alt = np.asarray(alt_scores, dtype=float).ravel()
    if null.size == 0 or alt.size == 0:
        raise ValueError("both score lists must be non-empty")
    thresholds = np.unique(np.concatenate([null, alt]))[::-1]
    null_sorted = np.sort(null)
    alt_sorted = np.sort(alt)
    fp = null.size - np.searchsorted(null_sorted, thresholds, side="left")
    tp = alt.size - np.searchsorted(alt_sorted, thresholds, side="left")
    fpr = np.concatenate([[0.0], fp / null.size])
    tpr = np.concatenate([[0.0], tp / alt.size])
    auc = float(np.trapezoid(tpr, fpr))
    return RocCurve(fpr, tpr, auc, method, int(null.size), int(alt.size))


def _score(method, N, data, k, stream: RngStream) -> float:
    if method == "rp":
        stat = float(projection_terms(data, k, N, stream.derive("proj", N)).mean())
        mu, sigma = null_moments(k, data.n)
        return (stat - mu) / sigma
    if method == "hotelling":
        return hotelling_statistic(data)
    return BASELINES[method](data).z_score


def _replication(config: ExperimentConfig, role: str, r: int, methods, k: int) -> dict:
    root = RngStream(config.seed).derive(config.setting_id, role, r)
    try:
        cov = realize_covariance(config.covariance, root.derive("sigma").generator())
        if role == "null":
            delta = np.zeros(config.p)
        else:
            delta = sample_shift(config.shift, cov, root.derive("shift").generator())
        gen = root.derive("data").generator()
        X = sample_mvn(delta, cov.sqrt_factor, config.n1, gen)
        Y = sample_mvn(np.zeros(config.p), cov.sqrt_factor, config.n2, gen)
        data = TwoSampleData(X, Y)
        return {label: _score(m, N, data, k, root) for label, (m, N) in methods.items()}
    except Exception as exc:
        raise ReplicationError(r, role, exc) from exc


def simulate_scores(config: ExperimentConfig, workers: int = 1) -> dict[str, tuple[np.ndarray, np.ndarray]]:
    """Null and alternative scores of every method, ordered by replication index."""
    methods = {label: _parse_method(label, config.projections) for label in config.methods}
    k = config.k_effective
    jobs = [("null", r) for r in range(config.reps_null)] + [("alt", r) for r in range(config.reps_alt)]

    def work(job):
        return _replication(config, job[0], job[1], methods, k)

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(work, jobs))
    else:
        results = [work(job) for job in jobs]
    out = {}
    for label in methods:
        scores = np.array([res[label] for res in results])
        out[label] = (scores[: config.reps_null], scores[config.reps_null:])
    return out


def run_setting(config: ExperimentConfig, workers: int = 1) -> dict[str, RocCurve]:
    scores = simulate_scores(config, workers)
    return {label: roc_from_scores(null, alt, label) for label, (null, alt) in scores.items()}


def sweep_projection_dimension(config: ExperimentConfig, y_grid, workers: int = 1) -> dict[float, RocCurve]:
    """RP-only ROC curves for ``k = floor(y n)`` over ``y_grid``.

    The data streams do not depend on ``k``, so all curves share the same
    simulated two-sample problems.
    """
    out = {}
    for y in y_grid:
        if not 0 < y < 1:
            raise ValueError(f"ratio {y} outside (0, 1)")
        k = int(math.floor(y * config.n))
        if k < 1:
            raise ValueError(f"ratio {y} gives k = 0 for n = {config.n}")
        sub = replace(config, k=k, methods=("rp",))
        out[y] = run_setting(sub, workers)["rp"]
    return out


@dataclass(frozen=True)
class PValueStabilityResult:
    pvalues: dict  # N -> array of repeated p-values

    def summaries(self) -> dict:
        return {
            N: {"min": float(v.min()), "max": float(v.max()), "std": float(v.std(ddof=1))}
            for N, v in self.pvalues.items()
        }


def pvalue_stability(data: TwoSampleData, N_grid, repeats: int = 100, rng=None, k: int | None = None) -> PValueStabilityResult:
    """Repeated RP p-values on one fixed dataset for each projection count in ``N_grid``."""
    if repeats < 2:
        raise ValueError("repeats must be >= 2")
    stream = rng if isinstance(rng, RngStream) else RngStream(int(as_generator(rng).integers(2**63)))
    out = {}
    for N in N_grid:
        out[N] = np.array([
            run_rp_test(data, k, N, 0.05, stream.derive("pvalue", N, i)).p_value for i in range(repeats)
        ])
    return PValueStabilityResult(out)


TABLE1_COLUMNS = (
    ("diagonal, slow decay", "diagonal", "slow"),
    ("diagonal, fast decay", "diagonal", "fast"),
    ("random, slow decay", "random", "slow"),
    ("random, fast decay", "random", "fast"),
    ("block structure", "block", None),
)


def table1_values(n_random_draws: int = 500, rng=None, p: int = 200) -> dict:
    """Covariance summaries for the five covariance choices.

    Random covariances are averaged over ``n_random_draws`` fresh realizations.
    """
    if n_random_draws < 1:
        raise ValueError("n_random_draws must be >= 1")
    gen = as_generator(rng)
    out = {}
    for label, kind, decay in TABLE1_COLUMNS:
        if kind == "block":
            model = CovarianceModel.block(p // 5, 5, 0.8)
        elif kind == "diagonal":
            model = CovarianceModel.diagonal_decay(p, decay)
        else:
            model = CovarianceModel.random_ortho_decay(p, decay)
        draws = n_random_draws if model.is_random else 1
        vals = np.array([covariance_summaries(realize_covariance(model, gen)).as_tuple() for _ in range(draws)])
        out[label] = vals.mean(axis=0)
    return out


def table1_report(n_random_draws: int = 500, rng=None, p: int = 200) -> str:
    """Covariance summary table as CSV text: one row per quantity, one column per covariance choice."""
    values = table1_values(n_random_draws, rng, p)
    labels = [c[0] for c in TABLE1_COLUMNS]
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["quantity"] + labels)
    for i, name in enumerate(("cq_dim", "sd_unif", "sd_tilt")):
        w.writerow([name] + [f"{values[label][i]:.6g}" for label in labels])
    return buf.getvalue()


def write_roc_outputs(curves: dict, config: ExperimentConfig, out_dir, extra: dict | None = None) -> Path:
    """One ``fpr,tpr`` CSV per method plus a ``manifest.json``."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    manifest = []
    for label, curve in curves.items():
        name = f"setting-{config.setting_id}_{label}.csv"
        (out_dir / name).write_text(curve.to_csv(), encoding="utf-8")
        method, N = _parse_method(label, config.projections) if label in config.methods else (label, None)
        entry = {
            "setting": config.setting_id,
            "method": label,
            "auc": curve.auc,
            "seed": config.seed,
            "reps": [config.reps_null, config.reps_alt],
            "k": config.k_effective,
            "N": N,
            "file": name,
        }
        if extra:
            entry.update(extra.get(label, {}))
        manifest.append(entry)
    path = out_dir / "manifest.json"
    path.write_text(json.dumps(manifest, indent=2) + "\n", encoding="utf-8")
    return path
