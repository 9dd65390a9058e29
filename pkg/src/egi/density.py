"""Rule density curves and ranking of low-density anomaly candidates."""

from __future__ import annotations

import csv
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .fileio import atomic_open


@dataclass(frozen=True)
class AnomalyCandidate:
    start: int
    length: int
    score: float  # curve value at the selected point (1-NN distance for discords)
    rank: int

    @property
    def end(self) -> int:
        return self.start + self.length

    def overlaps(self, start: int, length: int) -> bool:
        return self.start < start + length and start < self.end


def build_density_curve(spans: Iterable[tuple[int, int, int]], n_points: int) -> np.ndarray:
    """Count, for every time point, how many ``(rule, start, end)`` spans cover it."""
    diff = np.zeros(n_points + 1, dtype=np.int64)
    spans = list(spans)
    if spans:
        arr = np.asarray([(s, e) for _, s, e in spans], dtype=np.int64)
        if arr.min() < 0 or arr.max() > n_points or np.any(arr[:, 0] > arr[:, 1]):
            raise ValueError(f"span outside [0, {n_points}]")
        np.add.at(diff, arr[:, 0], 1)
        np.add.at(diff, arr[:, 1], -1)
    return np.cumsum(diff[:-1]).astype(float)


def _select(values: np.ndarray, n: int, k: int, window_start, largest: bool,
            valid: np.ndarray | None = None) -> list[AnomalyCandidate]:
    """Greedy extreme-point selection with an exclusion zone.

    After picking point ``t``, every point within ``n`` of ``t`` is excluded,
    as is any point whose candidate window would overlap the chosen one.
    """
    m = len(values)
    available = np.ones(m, dtype=bool) if valid is None else valid.copy()
    starts = window_start(np.arange(m))
    order = np.lexsort((np.arange(m), -values if largest else values))
    out: list[AnomalyCandidate] = []
    for t in order:
        if len(out) == k:
            break
        if not available[t]:
            continue
        s = int(starts[t])
        out.append(AnomalyCandidate(s, n, float(values[t]), len(out) + 1))
        lo, hi = max(t - n, 0), min(t + n + 1, m)
        available[lo:hi] = False
        available[(starts > s - n) & (starts < s + n)] = False
    return out


def window_coverage(n_points: int, n: int) -> np.ndarray:
    """Number of length-``n`` sliding windows containing each time point."""
    t = np.arange(n_points)
    last = n_points - n
    return np.minimum(t, last) - np.maximum(0, t - n + 1) + 1


def coverage_normalize(curve: Sequence[float], n: int) -> np.ndarray:
    """Rescale density to what it would be with a full ``n`` covering windows.

    Points within ``n`` of either end are contained in fewer windows, so
    their raw density ramps towards zero regardless of the data. Interior
    points are unchanged.
    """
    values = np.asarray(curve, dtype=float)
    return values * n / window_coverage(len(values), n)


def rank_anomalies(curve: Sequence[float], n: int, k: int,
                   edge_correction: bool = False) -> list[AnomalyCandidate]:
    """Up to ``k`` non-overlapping windows centred on the lowest curve points.

    Ties go to the smallest index. Windows are clamped to the series bounds.
    With ``edge_correction`` the minima are searched on
    :func:`coverage_normalize` of the curve, only over points whose centred
    window fits without clamping, and scores are the corrected values.
    """
    raw = np.asarray(curve, dtype=float)
    if k < 1:
        raise ValueError("k must be >= 1")
    if n < 1 or len(raw) < n:
        raise ValueError(f"curve of length {len(raw)} shorter than window {n}")
    last = len(raw) - n
    if not edge_correction:
        return _select(raw, n, k, lambda t: np.clip(t - n // 2, 0, last), largest=False)
    values = coverage_normalize(raw, n)
    # points whose centred window would be clamped add no new window and are
    # covered by fewer than n/2 windows, so their estimate is left out
    t = np.arange(len(raw))
    valid = (t - n // 2 >= 0) & (t - n // 2 <= last)
    return _select(values, n, k, lambda t: np.clip(t - n // 2, 0, last), largest=False, valid=valid)


def write_curve_csv(curve: Sequence[float], path) -> None:
    """Write ``index,value`` rows for external plotting."""
    with atomic_open(path, newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["index", "value"])
        for i, v in enumerate(curve):
            writer.writerow([i, f"{v:.9g}"])
