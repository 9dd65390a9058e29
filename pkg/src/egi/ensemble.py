"""Ensemble rule density curve.

Many single-run curves are built under distinct random ``(w, a)`` pairs. The
``ceil(tau * N)`` curves with the largest standard deviation are kept, each is
divided by its maximum (not min-max scaled, so zero density stays zero) and
the ensemble curve is their per-point median.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .density import AnomalyCandidate, build_density_curve, rank_anomalies
from .discretize import MAX_ALPHABET, MultiResolutionDiscretizer
from .errors import InputTooShortError, NoInformativeRulesError
from .sequitur import gc_paused, induce, rule_spans
from .series import as_series


@dataclass
class EnsembleConfig:
    n: int
    ensemble_size: int = 50
    w_max: int = 10
    a_max: int = 10
    tau: float = 0.4
    seed: int = 0

    def __post_init__(self):
        if self.w_max < 2 or self.a_max < 2:
            raise ValueError("w_max and a_max must be >= 2")
        if self.a_max > MAX_ALPHABET:
            raise ValueError(f"a_max must be <= {MAX_ALPHABET}")
        if self.w_max > self.n:
            raise ValueError(f"w_max={self.w_max} exceeds window length n={self.n}")
        if self.ensemble_size < 1:
            raise ValueError("ensemble_size must be >= 1")
        if not 0 < self.tau <= 1:
            raise ValueError("tau must be in (0, 1]")
        limit = (self.w_max - 1) * (self.a_max - 1)
        if self.ensemble_size > limit:
            warnings.warn(
                f"ensemble_size {self.ensemble_size} capped at {limit} distinct (w, a) pairs",
                stacklevel=3,
            )
            self.ensemble_size = limit

    @property
    def n_keep(self) -> int:
        # tolerance keeps e.g. 0.4 * 50 from rounding up to 21
        return max(1, math.ceil(self.tau * self.ensemble_size - 1e-9))

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "ensemble_size": self.ensemble_size,
            "w_max": self.w_max,
            "a_max": self.a_max,
            "tau": self.tau,
            "seed": self.seed,
        }


@dataclass(frozen=True)
class EnsembleMember:
    w: int
    a: int
    curve: np.ndarray = field(repr=False)
    std: float


@dataclass(frozen=True)
class EnsembleResult:
    curve: np.ndarray
    members: list[EnsembleMember]
    kept: list[EnsembleMember]


def generate_params(config: EnsembleConfig, rng: np.random.Generator | None = None) -> list[tuple[int, int]]:
    """Distinct ``(w, a)`` pairs drawn uniformly from ``[2, w_max] x [2, a_max]``.

    The default generator is numpy's PCG64 seeded with ``config.seed``.
    """
    if rng is None:
        rng = np.random.default_rng(config.seed)
    grid = [(w, a) for w in range(2, config.w_max + 1) for a in range(2, config.a_max + 1)]
    picks = rng.choice(len(grid), size=config.ensemble_size, replace=False)
    return [grid[i] for i in picks]


def curve_std(curve: Sequence[float]) -> float:
    x = np.asarray(curve, dtype=float)
    if x.size == 0:
        raise ValueError("empty curve")
    return float(x.std())


def normalize_curve(curve: Sequence[float]) -> np.ndarray:
    """Divide by the maximum; an all-zero curve is returned unchanged."""
    x = np.asarray(curve, dtype=float)
    top = x.max() if x.size else 0.0
    return x / top if top > 0 else x.copy()


def combine_curves(curves: Sequence[Sequence[float]]) -> np.ndarray:
    """Per-point median of the max-normalized curves."""
    if len(curves) == 0:
        raise ValueError("no curves to combine")
    return np.median(np.vstack([normalize_curve(c) for c in curves]), axis=0)


def grammar_density_curve(series, n: int, w: int, a: int,
                          discretizer: MultiResolutionDiscretizer | None = None) -> np.ndarray:
    """Single grammar-induction run: discretize, induce, map rules back, count coverage."""
    series = as_series(series)
    if w > n:
        raise ValueError(f"PAA size w={w} exceeds window length n={n}")
    if discretizer is None:
        discretizer = MultiResolutionDiscretizer(series, n, max(a, 2))
    tokens = discretizer.tokens(w, a)
    grammar = induce(tokens)
    spans = rule_spans(grammar, n, tokens.n_windows)
    return build_density_curve(spans, len(series))


def build_ensemble(series, config: EnsembleConfig,
                   params: Sequence[tuple[int, int]] | None = None) -> EnsembleResult:
    series = as_series(series)
    if len(series) < config.n:
        raise InputTooShortError(f"series of length {len(series)} shorter than window {config.n}")
    if params is None:
        params = generate_params(config)
    params = list(params)
    if len(set(params)) != len(params):
        raise ValueError("duplicate (w, a) pair in ensemble parameters")
    a_top = max(a for _, a in params)
    disc = MultiResolutionDiscretizer(series, config.n, max(a_top, 2))

    members = []
    with gc_paused():
        for w, a in params:
            curve = grammar_density_curve(series, config.n, w, a, disc)
            members.append(EnsembleMember(w, a, curve, curve_std(curve)))
    if all(not m.curve.any() for m in members):
        raise NoInformativeRulesError("no informative grammar rules: every member curve is zero")

    n_keep = max(1, math.ceil(config.tau * len(members) - 1e-9))
    ranked = sorted(members, key=lambda m: (-m.std, m.w, m.a))
    kept = ranked[:n_keep]
    return EnsembleResult(combine_curves([m.curve for m in kept]), members, kept)


def ensemble_curve(series, config: EnsembleConfig,
                   params: Sequence[tuple[int, int]] | None = None) -> np.ndarray:
    return build_ensemble(series, config, params).curve


def detect(series, config: EnsembleConfig, k: int = 3,
           edge_correction: bool = True) -> list[AnomalyCandidate]:
    """Top-``k`` anomaly candidates from the ensemble rule density curve."""
    return rank_anomalies(ensemble_curve(series, config), config.n, k, edge_correction)
