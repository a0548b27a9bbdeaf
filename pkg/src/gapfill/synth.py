"""Synthetic test signals that are sparse in a Gabor dictionary."""
from __future__ import annotations

from dataclasses import replace

import numpy as np

from .config import ExperimentConfig, GaborConfig


def sinusoid_mixture(rng: np.random.Generator, length: int, sample_rate: int,
                     n_min: int = 3, n_max: int = 8, f_lo: float = 80.0,
                     f_hi: float = 4000.0, am_max_hz: float = 2.0,
                     am_depth: float = 0.3) -> np.ndarray:
    """Sum of ``n_min..n_max`` stationary sinusoids with slow amplitude modulation.

    Peak-normalised to 0.9.
    """
    t = np.arange(length) / sample_rate
    k = rng.integers(n_min, n_max + 1)
    x = np.zeros(length)
    for _ in range(k):
        f = rng.uniform(f_lo, f_hi)
        amp = rng.uniform(0.2, 1.0)
        env = 1.0 + am_depth * rng.uniform(0, 1) * np.sin(
            2 * np.pi * rng.uniform(0.1, am_max_hz) * t + rng.uniform(0, 2 * np.pi))
        x += amp * env * np.sin(2 * np.pi * f * t + rng.uniform(0, 2 * np.pi))
    return 0.9 * x / np.max(np.abs(x))


def sinusoid_suite(count: int = 10, length: int = 16384, sample_rate: int = 16000,
                   seed: int = 2021) -> list[tuple[str, np.ndarray, int]]:
    rng = np.random.default_rng(seed)
    return [(f"mix{i:02d}", sinusoid_mixture(rng, length, sample_rate), sample_rate)
            for i in range(count)]


def desk_suite_config(**overrides):
    """Desk-scale sweep: the default frame durations at 16 kHz, 5 gaps per signal."""
    cfg = ExperimentConfig(gap_ms=(10.0, 20.0, 40.0), num_gaps=5, seeds=(0, 1, 2, 3, 4),
                           algos=("cp", "cp-learned"), guard_ms=100.0,
                           gabor=GaborConfig(win_len=1024, hop=256, M=1024))
    return replace(cfg, **overrides)
