"""Synthetic instance corpora and random walks for experiments and tests.

Each corpus maps class ``"0"`` to normal single-cycle instances and class
``"1"`` to anomalous ones, the layout :func:`egi.evaluation.load_corpus` reads.
"""

from __future__ import annotations

import numpy as np


def sine_corpus(seed: int, length: int = 100, n_normal: int = 30, n_anomalous: int = 10,
                noise: float = 0.1, depth: float = 0.6, width: float = 0.05) -> dict[str, list[np.ndarray]]:
    """One-period sine cycles with Gaussian noise.

    Anomalous cycles carry a localized Gaussian dip of the given ``depth``
    (relative width ``width``) centred somewhere in the middle 60% of the cycle.
    """
    rng = np.random.default_rng(seed)
    t = np.arange(length) / length
    base = np.sin(2 * np.pi * t)

    def noisy(x):
        return x + noise * rng.standard_normal(length)

    normal = [noisy(base) for _ in range(n_normal)]
    anomalous = []
    for _ in range(n_anomalous):
        centre = rng.uniform(0.2, 0.8)
        dip = depth * np.exp(-((t - centre) ** 2) / (2 * width**2))
        anomalous.append(noisy(base - dip))
    return {"0": normal, "1": anomalous}


def square_corpus(seed: int, length: int = 100, n_normal: int = 30, n_anomalous: int = 10,
                  noise: float = 0.1, duty: float = 0.5,
                  short_duty: tuple[float, float] = (0.3, 0.4)) -> dict[str, list[np.ndarray]]:
    """Square-wave cycles; anomalies have a shortened high phase."""
    rng = np.random.default_rng(seed)
    t = np.arange(length) / length

    def cycle(d):
        return np.where(t < d, 1.0, -1.0) + noise * rng.standard_normal(length)

    normal = [cycle(duty) for _ in range(n_normal)]
    anomalous = [cycle(rng.uniform(*short_duty)) for _ in range(n_anomalous)]
    return {"0": normal, "1": anomalous}


def random_walk(length: int, seed: int) -> np.ndarray:
    rng = np.random.default_rng(seed)
    return np.cumsum(rng.standard_normal(length))
