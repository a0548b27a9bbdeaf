"""Signal-to-distortion ratio on the restored gaps."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import InvalidArgument, UndefinedReferenceError
from .problem import ReliabilityMask


def sdr(orig, inp) -> float:
    """``10 log10(||orig||^2 / ||orig - inp||^2)`` in dB; ``inf`` on exact match."""
    orig = np.asarray(orig, dtype=float)
    inp = np.asarray(inp, dtype=float)
    if orig.shape != inp.shape:
        raise InvalidArgument("sdr: arguments differ in shape")
    ref = float(orig @ orig)
    if ref == 0.0:
        raise UndefinedReferenceError("sdr: reference is all zero")
    err = orig - inp
    dist = float(err @ err)
    if dist == 0.0:
        return math.inf
    return 10.0 * math.log10(ref / dist)


@dataclass(frozen=True)
class SdrReport:
    per_gap: tuple[tuple[int, float], ...]
    overall: float


def sdr_on_gaps(orig, inp, mask: ReliabilityMask) -> SdrReport:
    orig = np.asarray(orig, dtype=float)
    inp = np.asarray(inp, dtype=float)
    if orig.shape != (mask.L,) or inp.shape != (mask.L,):
        raise InvalidArgument("signals and mask differ in length")
    runs = mask.runs()
    if not runs:
        raise InvalidArgument("mask has no gaps to evaluate")
    per_gap = tuple((i, sdr(orig[s:s + n], inp[s:s + n])) for i, (s, n) in enumerate(runs))
    gap = mask.unreliable
    return SdrReport(per_gap, sdr(orig[gap], inp[gap]))


def format_db(value: float) -> str:
    return "inf" if math.isinf(value) and value > 0 else repr(float(value))
