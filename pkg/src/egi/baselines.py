"""Baseline detectors: single-run grammar induction variants and brute-force discords."""

from __future__ import annotations

import math
from fractions import Fraction

import numpy as np

from .density import AnomalyCandidate, _select, rank_anomalies
from .discretize import MultiResolutionDiscretizer
from .ensemble import grammar_density_curve
from .errors import InputTooShortError
from .sequitur import induce
from .series import DEGENERATE_STD, as_series, sliding_stats

GI_FIX_PARAMS = (4, 4)


def detect_gi_single(series, n: int, w: int, a: int, k: int = 3,
                     edge_correction: bool = True) -> list[AnomalyCandidate]:
    """One grammar-induction run with fixed ``(w, a)``."""
    if w > n:
        raise ValueError(f"PAA size w={w} exceeds window length n={n}")
    curve = grammar_density_curve(series, n, w, a)
    return rank_anomalies(curve, n, k, edge_correction)


def detect_gi_fix(series, n: int, k: int = 3) -> list[AnomalyCandidate]:
    return detect_gi_single(series, n, *GI_FIX_PARAMS, k=k)


def random_params(w_max: int, a_max: int, seed: int) -> tuple[int, int]:
    rng = np.random.default_rng(seed)
    return int(rng.integers(2, w_max + 1)), int(rng.integers(2, a_max + 1))


def detect_gi_random(series, n: int, w_max: int = 10, a_max: int = 10, k: int = 3,
                     seed: int = 0) -> list[AnomalyCandidate]:
    w, a = random_params(w_max, a_max, seed)
    return detect_gi_single(series, n, w, a, k)


def compression_ratio(series, n: int, w: int, a: int) -> Fraction:
    """Input token count over total grammar size."""
    series = as_series(series)
    tokens = MultiResolutionDiscretizer(series, n, a).tokens(w, a)
    return Fraction(len(tokens), induce(tokens).size)


def select_params(series, n: int, w_max: int = 10, a_max: int = 10,
                  sample_fraction: float = 0.1) -> tuple[int, int]:
    """Grid-search ``(w, a)`` maximizing compression of the leading sample.

    The sample is at least ``2 n`` points (or the whole series) so that it
    holds more than one window. Ties go to the smallest pair.
    """
    if not 0 < sample_fraction <= 1:
        raise ValueError("sample_fraction must be in (0, 1]")
    series = as_series(series)
    size = max(math.ceil(sample_fraction * len(series)), min(len(series), 2 * n))
    sample = as_series(series.values[:size])
    disc = MultiResolutionDiscretizer(sample, n, a_max)
    best = None
    for w in range(2, min(w_max, n) + 1):
        for a in range(2, a_max + 1):
            tokens = disc.tokens(w, a)
            ratio = Fraction(len(tokens), induce(tokens).size)
            if best is None or ratio > best[0]:
                best = (ratio, w, a)
    return best[1], best[2]


def detect_gi_select(series, n: int, w_max: int = 10, a_max: int = 10, k: int = 3,
                     sample_fraction: float = 0.1) -> list[AnomalyCandidate]:
    w, a = select_params(series, n, w_max, a_max, sample_fraction)
    return detect_gi_single(series, n, w, a, k)


def discord_profile(series, n: int) -> np.ndarray:
    """Z-normalized Euclidean distance from every window to its nearest non-trivial match.

    Windows ``i`` and ``j`` are compared only when ``|i - j| >= n``. Windows
    without any such partner get ``inf``. Exact O(N^2) work, done one
    diagonal of the distance matrix at a time with prefix-sum dot products.
    """
    series = as_series(series)
    N = len(series)
    if n < 2 or N < 2 * n:
        raise InputTooShortError(f"discord search needs at least 2n={2 * n} points, got {N}")
    x = series.values - series.values.mean()
    m = N - n + 1
    mean, std = sliding_stats(as_series(x), n)
    sigma = std * math.sqrt((n - 1) / n)  # population std for the correlation
    degenerate = std < DEGENERATE_STD
    inv = np.where(degenerate, 0.0, 1.0 / np.where(degenerate, 1.0, sigma))
    half_deg = 0.5 * degenerate

    best = np.full(m, -np.inf)  # highest correlation seen per window
    for k in range(n, m):
        prod = x[:N - k] * x[k:]
        c = np.concatenate([[0.0], np.cumsum(prod)])
        length = m - k
        dot = c[n:n + length] - c[:length]
        corr = (dot / n - mean[:length] * mean[k:]) * inv[:length] * inv[k:]
        # a constant window is the zero vector after z-normalization
        corr += half_deg[:length] + half_deg[k:]
        np.maximum(best[:length], corr, out=best[:length])
        np.maximum(best[k:], corr, out=best[k:])
    dist = np.sqrt(np.maximum(2.0 * (n - 1) * (1.0 - np.minimum(best, 1.0)), 0.0))
    dist[~np.isfinite(best)] = np.inf
    return dist


def detect_discord(series, n: int, k: int = 3) -> list[AnomalyCandidate]:
    """Top-``k`` non-overlapping windows with the largest 1-NN distance."""
    dist = discord_profile(series, n)
    valid = np.isfinite(dist)
    return _select(np.where(valid, dist, -np.inf), n, k, lambda t: t, largest=True, valid=valid)
