"""Time series container with prefix-sum statistics.

Prefix sums use a leading zero sentinel, so the sum over ``values[s:s+n]`` is
``esum_x[s + n] - esum_x[s]`` and every window moment is O(1). They are
accumulated in extended precision (``np.longdouble``) because the variance
formula subtracts two large sums. Exactly constant windows are found from
equal-value run lengths rather than from the cancelled variance.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import NonFiniteValueError

#: Standard deviation below which a window is treated as constant.
DEGENERATE_STD = 1e-8
ACCUM = np.longdouble


@dataclass(frozen=True)
class TimeSeries:
    values: np.ndarray
    esum_x: np.ndarray
    esum_xx: np.ndarray
    # length of the run of equal values ending at each point
    run_length: np.ndarray = field(repr=False)

    def __len__(self) -> int:
        return len(self.values)

    @property
    def n_points(self) -> int:
        return len(self.values)

    def n_windows(self, n: int) -> int:
        """Number of sliding windows of length ``n``."""
        return max(len(self.values) - n + 1, 0)


@dataclass(frozen=True)
class WindowStats:
    start: int
    length: int
    mean: float
    std: float


def build_series(values: Sequence[float]) -> TimeSeries:
    arr = np.array(values, dtype=float).reshape(-1)
    bad = np.flatnonzero(~np.isfinite(arr))
    if bad.size:
        i = int(bad[0])
        raise NonFiniteValueError(i, float(arr[i]))
    ext = arr.astype(ACCUM)
    esum_x = np.zeros(len(arr) + 1, dtype=ACCUM)
    esum_xx = np.zeros(len(arr) + 1, dtype=ACCUM)
    np.cumsum(ext, out=esum_x[1:])
    np.cumsum(ext * ext, out=esum_xx[1:])
    idx = np.arange(len(arr))
    new_run = np.r_[True, arr[1:] != arr[:-1]][:len(arr)]
    run_length = idx - np.maximum.accumulate(np.where(new_run, idx, 0)) + 1
    for a in (arr, esum_x, esum_xx, run_length):
        a.setflags(write=False)
    return TimeSeries(arr, esum_x, esum_xx, run_length)


def _check_window(series: TimeSeries, start: int, n: int) -> None:
    if n < 2:
        raise ValueError(f"window length must be >= 2, got {n}")
    if start < 0 or start + n > len(series):
        raise IndexError(
            f"window [{start}, {start + n}) outside series of length {len(series)}"
        )


def window_moments(series: TimeSeries, starts, n: int) -> tuple[np.ndarray, np.ndarray]:
    """Extended-precision (mean, sample std) of the windows at ``starts``.

    Constant windows get their exact value as mean and a std of zero.
    """
    starts = np.asarray(starts)
    sx = series.esum_x[starts + n] - series.esum_x[starts]
    sxx = series.esum_xx[starts + n] - series.esum_xx[starts]
    mean = sx / n
    var = np.maximum((sxx - sx * sx / n) / (n - 1), 0)
    std = np.sqrt(var)
    constant = series.run_length[starts + n - 1] >= n if starts.size else np.zeros(0, bool)
    mean = np.where(constant, series.values[starts].astype(ACCUM), mean)
    std = np.where(constant, 0, std)
    return mean, std


def window_stats(series: TimeSeries, start: int, n: int) -> WindowStats:
    """Mean and sample standard deviation of ``values[start:start+n]`` in O(1)."""
    _check_window(series, start, n)
    mean, std = window_moments(series, np.array([start]), n)
    return WindowStats(start, n, float(mean[0]), float(std[0]))


def sliding_stats(series: TimeSeries, n: int) -> tuple[np.ndarray, np.ndarray]:
    """Vectorised :func:`window_stats` for every window start; returns (mean, std)."""
    if n < 2:
        raise ValueError(f"window length must be >= 2, got {n}")
    mean, std = window_moments(series, np.arange(series.n_windows(n)), n)
    return mean.astype(float), std.astype(float)


def znormalize(window: Sequence[float], epsilon: float = DEGENERATE_STD) -> np.ndarray:
    """Shift to zero mean and scale to unit sample std.

    Windows whose std falls below ``epsilon`` map to all zeros.
    """
    x = np.asarray(window, dtype=float)
    if x.size == 0:
        raise ValueError("cannot z-normalize an empty window")
    std = x.std(ddof=1) if x.size > 1 else 0.0
    if std < epsilon:
        return np.zeros_like(x)
    return (x - x.mean()) / std


def read_series_csv(path, column: str | int | None = None) -> np.ndarray:
    """Load one real value per row.

    A non-numeric first line is treated as a header. For multi-column files,
    ``column`` selects a field by header name or 0-based position.
    """
    with open(path, newline="") as fh:
        rows = [r for r in csv.reader(fh) if r and any(c.strip() for c in r)]
    if not rows:
        return np.zeros(0)
    header = None
    try:
        [float(c) for c in rows[0] if c.strip()]
    except ValueError:
        header, rows = [c.strip() for c in rows[0]], rows[1:]
    if column is None:
        idx = 0
    elif isinstance(column, int) or str(column).isdigit():
        idx = int(column)
    else:
        if header is None or column not in header:
            raise ValueError(f"column {column!r} not found in header")
        idx = header.index(column)
    out = []
    for lineno, row in enumerate(rows, start=2 if header else 1):
        try:
            out.append(float(row[idx]))
        except (IndexError, ValueError) as exc:
            raise ValueError(f"{path}: bad value on line {lineno}: {row!r}") from exc
    return np.asarray(out)


def as_series(x) -> TimeSeries:
    return x if isinstance(x, TimeSeries) else build_series(x)
