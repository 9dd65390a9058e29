"""PAA, Gaussian breakpoints, single- and multi-resolution SAX, numerosity reduction.

PAA segments for a window of length ``n`` split at ``floor(i * n / w)``; each
coefficient is the mean over its actual segment. Coefficients equal to a cut
fall into the region above it, so the ``a = 3`` regions are
``(-inf, -0.43)``, ``[-0.43, 0.43)`` and ``[0.43, inf)``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from typing import NamedTuple, Sequence

import numpy as np
from scipy.stats import norm

from .errors import InputTooShortError
from .series import DEGENERATE_STD, TimeSeries, _check_window, window_moments

MAX_ALPHABET = 26
_LETTERS = np.frombuffer(b"abcdefghijklmnopqrstuvwxyz", dtype=np.uint8)


@dataclass(frozen=True)
class BreakpointTable:
    alphabet_size: int
    cuts: tuple[float, ...]

    def symbol_index(self, x):
        """Region index of ``x`` (vectorised); values on a cut go up."""
        return np.searchsorted(self.cuts, x, side="right")


@dataclass(frozen=True)
class MultiResTable:
    a_max: int
    boundaries: np.ndarray
    # codes[j, a - 2] is the region index for alphabet size a in interval j
    codes: np.ndarray = field(repr=False)

    @property
    def cells(self) -> list[str]:
        return ["".join(chr(97 + c) for c in row) for row in self.codes]

    def interval(self, x):
        return np.searchsorted(self.boundaries, x, side="right")


@dataclass(frozen=True)
class SaxWordMatrix:
    window_offset: int
    words: dict[int, str]

    def row(self, a: int) -> str:
        return self.words[a]


class Token(NamedTuple):
    word: str
    offset: int


@dataclass(frozen=True)
class TokenSequence:
    """Numerosity-reduced tokens kept as parallel word and offset lists."""

    words: list[str]
    offsets: list[int]
    # Window count before numerosity reduction.
    n_windows: int

    def __post_init__(self):
        if len(self.words) != len(self.offsets):
            raise ValueError("words and offsets differ in length")

    @classmethod
    def from_tokens(cls, tokens, n_windows: int | None = None) -> "TokenSequence":
        toks = [Token(*t) for t in tokens]
        if n_windows is None:
            n_windows = toks[-1].offset + 1 if toks else 0
        return cls([t.word for t in toks], [int(t.offset) for t in toks], n_windows)

    @property
    def tokens(self) -> tuple[Token, ...]:
        return tuple(map(Token, self.words, self.offsets))

    def __len__(self) -> int:
        return len(self.words)

    def __iter__(self):
        return map(Token, self.words, self.offsets)

    def expand(self) -> list[str]:
        """Undo numerosity reduction: one word per original window."""
        out: list[str] = []
        ends = self.offsets[1:] + [self.n_windows]
        for word, start, end in zip(self.words, self.offsets, ends):
            out.extend([word] * (end - start))
        return out


def _check_alphabet(a: int) -> None:
    if not 2 <= a <= MAX_ALPHABET:
        raise ValueError(f"alphabet size must be in [2, {MAX_ALPHABET}], got {a}")


@lru_cache(maxsize=None)
def breakpoints(a: int) -> BreakpointTable:
    """Standard-normal quantiles at ``i / a`` for ``i = 1 .. a-1``."""
    _check_alphabet(a)
    lower = [float(norm.ppf(i / a)) for i in range(1, a // 2 + 1)]
    # mirror the lower half so the table is exactly symmetric
    if a % 2 == 0:
        cuts = lower[:-1] + [0.0] + [-c for c in reversed(lower[:-1])]
    else:
        cuts = lower + [-c for c in reversed(lower)]
    return BreakpointTable(a, tuple(cuts))


def paa(window: Sequence[float], w: int) -> np.ndarray:
    x = np.asarray(window, dtype=float)
    n = len(x)
    if not 1 <= w <= n:
        raise ValueError(f"PAA size must be in [1, {n}], got {w}")
    bounds = (np.arange(w + 1) * n) // w
    return np.array([x[bounds[i]:bounds[i + 1]].mean() for i in range(w)])


def _segment_bounds(n: int, w: int) -> np.ndarray:
    if not 1 <= w <= n:
        raise ValueError(f"PAA size must be in [1, {n}], got {w}")
    return (np.arange(w + 1) * n) // w


def fast_paa(series: TimeSeries, start: int, n: int, w: int) -> np.ndarray:
    """PAA of the z-normalized window ``values[start:start+n]`` in O(w)."""
    _check_window(series, start, n)
    bounds = _segment_bounds(n, w)
    mean, std = window_moments(series, np.array([start]), n)
    if std[0] < DEGENERATE_STD:
        return np.zeros(w)
    ex = series.esum_x[start + bounds]
    seg_means = np.diff(ex) / np.diff(bounds)
    return ((seg_means - mean[0]) / std[0]).astype(float)


def sliding_paa(series: TimeSeries, n: int, w: int) -> np.ndarray:
    """:func:`fast_paa` for every window start at once, shape ``(N - n + 1, w)``."""
    if len(series) < n:
        raise InputTooShortError(f"series of length {len(series)} shorter than window {n}")
    bounds = _segment_bounds(n, w)
    m = series.n_windows(n)
    mean, std = window_moments(series, np.arange(m), n)
    starts = np.arange(m)[:, None]
    ex = series.esum_x[starts + bounds[None, :]]
    seg_means = np.diff(ex, axis=1) / np.diff(bounds)[None, :]
    degenerate = std < DEGENERATE_STD
    safe_std = np.where(degenerate, 1, std)
    out = ((seg_means - mean[:, None]) / safe_std[:, None]).astype(float)
    out[degenerate] = 0.0
    return out


def sax_word(coeffs: Sequence[float], table: BreakpointTable) -> str:
    idx = table.symbol_index(np.asarray(coeffs, dtype=float))
    return "".join(chr(97 + int(i)) for i in np.atleast_1d(idx))


@lru_cache(maxsize=None)
def build_multi_res_table(a_max: int) -> MultiResTable:
    _check_alphabet(a_max)
    cuts = np.sort(np.concatenate([breakpoints(a).cuts for a in range(2, a_max + 1)]))
    keep = np.concatenate([[True], np.diff(cuts) > 1e-12])
    bounds = cuts[keep]
    # interval j covers [bounds[j-1], bounds[j]); its lower edge decides the symbol
    lower = np.concatenate([[-np.inf], bounds])
    codes = np.empty((len(lower), a_max - 1), dtype=np.uint8)
    for a in range(2, a_max + 1):
        codes[:, a - 2] = breakpoints(a).symbol_index(lower)
    bounds.setflags(write=False)
    codes.setflags(write=False)
    return MultiResTable(a_max, bounds, codes)


def multi_res_sax(coeffs: Sequence[float], table: MultiResTable,
                  window_offset: int = 0) -> SaxWordMatrix:
    """SAX words for every alphabet size ``2 .. a_max`` from one binary search per coefficient."""
    rows = table.codes[table.interval(np.asarray(coeffs, dtype=float))]
    words = {
        a: _LETTERS[rows[:, a - 2]].tobytes().decode("ascii")
        for a in range(2, table.a_max + 1)
    }
    return SaxWordMatrix(window_offset, words)


def numerosity_reduce(words: Sequence[str], offsets: Sequence[int] | None = None) -> TokenSequence:
    """Keep the first word of every run of identical consecutive words."""
    if offsets is None:
        offsets = range(len(words))
    kept_words, kept_offsets = [], []
    prev = None
    for word, off in zip(words, offsets):
        if word != prev:
            kept_words.append(word)
            kept_offsets.append(int(off))
            prev = word
    return TokenSequence(kept_words, kept_offsets, len(words))


def _reduce_symbol_rows(symbols: np.ndarray) -> TokenSequence:
    m, w = symbols.shape
    if m == 0:
        return TokenSequence([], [], 0)
    changed = np.any(symbols[1:] != symbols[:-1], axis=1)
    keep = np.concatenate([[0], np.flatnonzero(changed) + 1])
    letters = np.ascontiguousarray(_LETTERS[symbols[keep]])
    words = letters.view(f"S{w}").ravel().astype(f"U{w}").tolist()
    return TokenSequence(words, keep.tolist(), m)


def discretize_series(series: TimeSeries, n: int, w: int, a: int) -> TokenSequence:
    """Sliding-window SAX followed by numerosity reduction."""
    _check_alphabet(a)
    coeffs = sliding_paa(series, n, w)
    symbols = breakpoints(a).symbol_index(coeffs).astype(np.uint8)
    return _reduce_symbol_rows(symbols)


class MultiResolutionDiscretizer:
    """Shares PAA and interval lookups across every ``(w, a)`` pair of one series.

    PAA coefficients and their summary-line interval are computed once per
    ``w``; each alphabet size is then a column lookup.
    """

    def __init__(self, series: TimeSeries, n: int, a_max: int):
        if len(series) < n:
            raise InputTooShortError(f"series of length {len(series)} shorter than window {n}")
        self.series = series
        self.n = n
        self.table = build_multi_res_table(a_max)
        self._intervals: dict[int, np.ndarray] = {}

    def intervals(self, w: int) -> np.ndarray:
        if w not in self._intervals:
            coeffs = sliding_paa(self.series, self.n, w)
            self._intervals[w] = self.table.interval(coeffs)
        return self._intervals[w]

    def tokens(self, w: int, a: int) -> TokenSequence:
        if not 2 <= a <= self.table.a_max:
            raise ValueError(f"alphabet size {a} outside [2, {self.table.a_max}]")
        symbols = self.table.codes[self.intervals(w), a - 2]
        return _reduce_symbol_rows(symbols)
