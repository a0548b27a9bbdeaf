"""Autoregressive gap interpolation after Janssen, Veldhuis and Vries.

Each gap gets its own analysis frame centred on it. Inside the frame the
method alternates between fitting AR coefficients to the current estimate
(autocorrelation method) and choosing the missing samples that minimise
the energy of the AR prediction error.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np
from scipy import linalg
from scipy.signal import fftconvolve

from .errors import GapTooLongError, InvalidArgument
from .problem import ReliabilityMask

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class JanssenConfig:
    window_len: int = 2800
    hop: int = 700
    iterations: int = 50

    def __post_init__(self):
        if self.window_len <= 0:
            raise InvalidArgument("window_len must be positive")
        if self.iterations < 1:
            raise InvalidArgument("iterations must be >= 1")


def ar_order(num_missing: int, window_len: int) -> int:
    return min(3 * num_missing + 2, window_len // 3)


def autocorrelation(x: np.ndarray, maxlag: int) -> np.ndarray:
    r = fftconvolve(x, x[::-1], mode="full")[x.size - 1:]
    return r[:maxlag + 1]


def lpc(x: np.ndarray, order: int) -> np.ndarray:
    """Prediction-error filter ``[1, -a_1, ..., -a_p]`` by Levinson-Durbin."""
    r = autocorrelation(x, order)
    if r[0] <= 0:
        return np.concatenate(([1.0], np.zeros(order)))
    try:
        a = linalg.solve_toeplitz(r[:order], r[1:order + 1])
        ok = np.all(np.isfinite(a))
    except (linalg.LinAlgError, ValueError):
        ok = False
    if not ok:
        col = r[:order].copy()
        col[0] += 1e-9 * r[0]
        a = linalg.solve_toeplitz(col, r[1:order + 1])
    return np.concatenate(([1.0], -a))


def prediction_error_energy(x: np.ndarray, b: np.ndarray) -> float:
    e = fftconvolve(x, b, mode="full")
    return float(e @ e)


def _solve_missing(seg: np.ndarray, missing: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Missing samples minimising ``||b * seg||^2`` with the rest fixed."""
    p = b.size - 1
    rb = np.correlate(b, b, mode="full")  # lags -p..p, symmetric
    known = seg.copy()
    known[missing] = 0.0
    rhs = -fftconvolve(known, rb, mode="full")[p:p + seg.size][missing]
    col = np.zeros(missing.size)
    if np.all(np.diff(missing) == 1):
        col[:min(p + 1, missing.size)] = rb[p:p + min(p + 1, missing.size)]
        sol = linalg.solve_toeplitz(col, rhs)
        resid = linalg.matmul_toeplitz(col, sol) - rhs
        if np.linalg.norm(resid) <= 1e-8 * max(np.linalg.norm(rhs), 1e-300):
            return sol
    lag = np.abs(missing[:, None] - missing[None, :])
    T = np.where(lag <= p, rb[p + np.minimum(lag, p)], 0.0)
    return linalg.solve(T, rhs, assume_a="pos")


def _frame_bounds(start: int, length: int, W: int, L: int) -> tuple[int, int]:
    W = min(W, L)
    f0 = start + length // 2 - W // 2
    f0 = min(max(f0, 0), L - W)
    return f0, f0 + W


def janssen_inpaint(x, mask: ReliabilityMask, cfg: JanssenConfig = JanssenConfig(),
                    trace: list | None = None) -> np.ndarray:
    """Fill the unreliable samples of ``x`` gap by gap, left to right.

    If ``trace`` is a list, one list of prediction-error energies per gap
    (two entries per iteration: after the AR fit and after the sample
    update) is appended to it.
    """
    x = np.asarray(x, dtype=float)
    if x.shape != (mask.L,):
        raise InvalidArgument("signal and mask lengths differ")
    y = x.copy()
    for start, length in mask.runs():
        if 2 * length >= cfg.window_len:
            raise GapTooLongError(
                f"gap of {length} samples needs a window longer than {cfg.window_len}")
        f0, f1 = _frame_bounds(start, length, cfg.window_len, mask.L)
        seg = y[f0:f1].copy()
        missing = np.flatnonzero(mask.unreliable[f0:f1])
        seg[missing] = 0.0
        p = min(ar_order(missing.size, cfg.window_len), seg.size - 1)
        energies = []
        for _ in range(cfg.iterations):
            b = lpc(seg, p)
            energies.append(prediction_error_energy(seg, b))
            seg[missing] = _solve_missing(seg, missing, b)
            energies.append(prediction_error_energy(seg, b))
        if not np.all(np.isfinite(seg)):
            log.warning("non-finite estimate in gap at %d; leaving zeros", start)
            seg[missing] = 0.0
        y[f0:f1][missing] = seg[missing]
        if trace is not None:
            trace.append(energies)
    y[mask.reliable] = x[mask.reliable]
    return y
