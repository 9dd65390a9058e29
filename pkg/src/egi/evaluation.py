"""Planted-anomaly synthesis, Score / HitRate metrics and the method comparison harness."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Mapping, Sequence

import numpy as np

from . import baselines
from .density import AnomalyCandidate
from .ensemble import EnsembleConfig, detect
from .series import TimeSeries, build_series, read_series_csv

N_NORMAL = 20
PLANT_RANGE = (0.4, 0.8)


@dataclass(frozen=True)
class GroundTruth:
    location: int
    length: int

    def __post_init__(self):
        if self.location < 0 or self.length < 1:
            raise ValueError("invalid ground truth")


@dataclass(frozen=True)
class EvalRecord:
    method: str
    score: float

    @property
    def hit(self) -> bool:
        return self.score > 0


def score(predict_location: int, gt: GroundTruth) -> float:
    """1 for an exact location match, falling linearly to 0 one instance length away."""
    return 1.0 - min(1.0, abs(predict_location - gt.location) / gt.length)


def best_score(candidates: Sequence[AnomalyCandidate], gt: GroundTruth) -> float:
    return max((score(c.start, gt) for c in candidates), default=0.0)


def hit_rate(records: Sequence[EvalRecord | float]) -> float:
    if len(records) == 0:
        raise ValueError("hit rate of an empty record list")
    scores = [r.score if isinstance(r, EvalRecord) else float(r) for r in records]
    return sum(s > 0 for s in scores) / len(scores)


def wins_ties_losses(ours: Sequence[float], baseline: Sequence[float]) -> tuple[int, int, int]:
    if len(ours) != len(baseline):
        raise ValueError(f"length mismatch: {len(ours)} vs {len(baseline)}")
    wins = sum(o > b for o, b in zip(ours, baseline))
    ties = sum(o == b for o, b in zip(ours, baseline))
    return wins, ties, len(ours) - wins - ties


def _check_pool(normal_instances, anomaly_instances) -> int:
    if len(normal_instances) == 0 or len(anomaly_instances) == 0:
        raise ValueError("normal and anomalous instance pools must be non-empty")
    lengths = {len(x) for x in list(normal_instances) + list(anomaly_instances)}
    if len(lengths) != 1:
        raise ValueError(f"instances must share one length, got {sorted(lengths)}")
    return lengths.pop()


def synth_series(normal_instances: Sequence[Sequence[float]], anomaly_instance: Sequence[float],
                 seed: int, n_normal: int = N_NORMAL,
                 plant_range: tuple[float, float] = PLANT_RANGE) -> tuple[TimeSeries, GroundTruth]:
    """Concatenate ``n_normal`` normal instances (drawn with replacement) and
    splice the anomaly in at the instance boundary nearest a uniform fraction
    of the final length within ``plant_range``.
    """
    m = _check_pool(normal_instances, [anomaly_instance])
    rng = np.random.default_rng(seed)
    picks = rng.integers(0, len(normal_instances), size=n_normal)
    total = (n_normal + 1) * m
    frac = rng.uniform(*plant_range)
    slot = int(min(max(math.floor(frac * total / m + 0.5), 0), n_normal))
    parts = [np.asarray(normal_instances[i], dtype=float) for i in picks]
    parts.insert(slot, np.asarray(anomaly_instance, dtype=float))
    return build_series(np.concatenate(parts)), GroundTruth(slot * m, m)


def synth_multi(normal_instances, anomaly_instances, seed: int, n_anomalies: int = 2,
                n_normal: int = N_NORMAL, min_gap: int = 3) -> tuple[TimeSeries, list[GroundTruth]]:
    """Series with several planted anomalies at random boundaries.

    Anomalies are drawn with replacement from ``anomaly_instances`` and are
    separated by at least ``min_gap`` normal instances.
    """
    m = _check_pool(normal_instances, anomaly_instances)
    rng = np.random.default_rng(seed)
    picks = rng.integers(0, len(normal_instances), size=n_normal)
    parts = [np.asarray(normal_instances[i], dtype=float) for i in picks]
    for _ in range(1000):
        slots = np.sort(rng.choice(n_normal + 1, size=n_anomalies, replace=False))
        if np.all(np.diff(slots) >= min_gap):
            break
    else:
        raise ValueError("cannot place anomalies with the requested gap")
    chosen = rng.integers(0, len(anomaly_instances), size=n_anomalies)
    gts = []
    for j, (slot, a) in enumerate(zip(slots, chosen)):
        # earlier insertions shift later boundaries by one instance each
        pos = int(slot) + j
        parts.insert(pos, np.asarray(anomaly_instances[a], dtype=float))
        gts.append(GroundTruth(pos * m, m))
    return build_series(np.concatenate(parts)), gts


# corpus I/O ----------------------------------------------------------------

def load_corpus(path) -> dict[str, list[np.ndarray]]:
    """Read ``manifest.json`` (``{class: [csv files]}``) from a corpus directory."""
    root = Path(path)
    manifest_path = root / "manifest.json" if root.is_dir() else root
    root = manifest_path.parent
    with open(manifest_path) as fh:
        manifest = json.load(fh)
    if not isinstance(manifest, dict) or not manifest:
        raise ValueError("corpus manifest must be a non-empty {class: [files]} object")
    corpus = {}
    for cls, files in manifest.items():
        corpus[str(cls)] = [read_series_csv(root / f) for f in files]
    return corpus


def split_classes(corpus: Mapping[str, list]) -> tuple[list, list]:
    """Class ``"0"`` (or the first listed class) is normal; all others are anomalous."""
    normal_key = "0" if "0" in corpus else next(iter(corpus))
    normal = list(corpus[normal_key])
    anomalous = [x for k, v in corpus.items() if k != normal_key for x in v]
    if not normal:
        raise ValueError("normal class has no instances")
    if not anomalous:
        raise ValueError("no anomalous class in corpus")
    return normal, anomalous


def synth_from_corpus(corpus: Mapping[str, list], count: int, seed: int) -> list[tuple[TimeSeries, GroundTruth]]:
    normal, anomalous = split_classes(corpus)
    rng = np.random.default_rng(seed)
    out = []
    for _ in range(count):
        anomaly = anomalous[int(rng.integers(len(anomalous)))]
        out.append(synth_series(normal, anomaly, int(rng.integers(2**63))))
    return out


def write_corpus(corpus: Mapping[str, list], path) -> None:
    root = Path(path)
    root.mkdir(parents=True, exist_ok=True)
    manifest = {}
    for cls, instances in corpus.items():
        manifest[cls] = []
        for i, inst in enumerate(instances):
            name = f"class{cls}_{i:03d}.csv"
            np.savetxt(root / name, np.asarray(inst), fmt="%.9g")
            manifest[cls].append(name)
    with open(root / "manifest.json", "w") as fh:
        json.dump(manifest, fh, indent=2)


# method comparison ----------------------------------------------------------

Detector = Callable[[TimeSeries, int, int, int], list[AnomalyCandidate]]


def make_methods(config: EnsembleConfig | None = None, sample_fraction: float = 0.1) -> dict[str, Detector]:
    """Detectors keyed by CLI method name; each takes ``(series, n, k, seed)``."""
    cfg = config or EnsembleConfig(n=10)
    w_max, a_max = cfg.w_max, cfg.a_max

    def ensemble(series, n, k, seed):
        return detect(series, EnsembleConfig(n, cfg.ensemble_size, min(w_max, n), a_max, cfg.tau, seed), k)

    return {
        "ensemble": ensemble,
        "gi-fix": lambda s, n, k, seed: baselines.detect_gi_fix(s, n, k),
        "gi-random": lambda s, n, k, seed: baselines.detect_gi_random(s, n, min(w_max, n), a_max, k, seed),
        "gi-select": lambda s, n, k, seed: baselines.detect_gi_select(s, n, min(w_max, n), a_max, k, sample_fraction),
        "discord": lambda s, n, k, seed: baselines.detect_discord(s, n, k),
    }


@dataclass
class EvalReport:
    methods: list[str]
    scores: dict[str, list[float]]  # per method, one best score per series

    def mean_score(self, method: str) -> float:
        return float(np.mean(self.scores[method]))

    def hit_rate(self, method: str) -> float:
        return hit_rate(self.scores[method])

    def wtl(self, method: str, reference: str = "ensemble") -> tuple[int, int, int]:
        return wins_ties_losses(self.scores[reference], self.scores[method])

    def summary(self) -> dict:
        table = [
            {"method": m, "mean_score": self.mean_score(m), "hit_rate": self.hit_rate(m)}
            for m in self.methods
        ]
        out = {"n_series": len(next(iter(self.scores.values()))), "summary": table}
        if "ensemble" in self.methods:
            out["wins_ties_losses"] = [
                dict(zip(("baseline", "wins", "ties", "losses"), (m, *self.wtl(m))))
                for m in self.methods if m != "ensemble"
            ]
        out["scores"] = self.scores
        return out


def evaluate(cases: Sequence[tuple[TimeSeries, GroundTruth]], methods: Sequence[str],
             k: int = 3, seed: int = 0, n: int | None = None,
             config: EnsembleConfig | None = None) -> EvalReport:
    """Run each method on each case with window length ``n`` (default: the anomaly length)."""
    registry = make_methods(config)
    unknown = [m for m in methods if m not in registry]
    if unknown:
        raise KeyError(f"unknown method(s): {', '.join(unknown)}")
    if not cases:
        raise ValueError("no series to evaluate")
    scores = {m: [] for m in methods}
    for i, (series, gt) in enumerate(cases):
        window = n or gt.length
        for m in methods:
            cands = registry[m](series, window, k, seed + i)
            scores[m].append(best_score(cands, gt))
    return EvalReport(list(methods), scores)


def gt_to_dict(gt: GroundTruth) -> dict:
    return {"gt_location": gt.location, "gt_length": gt.length}


def gt_from_dict(d: Mapping) -> GroundTruth:
    return GroundTruth(int(d["gt_location"]), int(d["gt_length"]))

