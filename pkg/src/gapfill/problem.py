"""Reliable/unreliable partition, the feasible set and gap neighborhoods."""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import EmptyNeighborhoodError, InvalidArgument
from .gabor import GaborFrame


@dataclass(frozen=True)
class GapSpec:
    """Consecutive runs of missing samples, as ``(start, length)`` pairs."""

    gaps: tuple[tuple[int, int], ...]
    signal_len: int
    sample_rate: int = 0

    def __post_init__(self):
        gaps = tuple(sorted((int(s), int(n)) for s, n in self.gaps))
        object.__setattr__(self, "gaps", gaps)
        if self.signal_len < 1:
            raise InvalidArgument("signal_len must be positive")
        end = 0
        for s, n in gaps:
            if n < 1:
                raise InvalidArgument(f"gap at {s} has non-positive length {n}")
            if s < 0 or s + n > self.signal_len:
                raise InvalidArgument(f"gap ({s}, {n}) outside [0, {self.signal_len})")
            if s < end:
                raise InvalidArgument(f"gap ({s}, {n}) overlaps its predecessor")
            end = s + n

    def __len__(self):
        return len(self.gaps)

    def to_dict(self) -> dict:
        return {
            "signal_len": self.signal_len,
            "sample_rate": self.sample_rate,
            "gaps": [{"start_sample": s, "length_samples": n} for s, n in self.gaps],
        }

    @classmethod
    def from_dict(cls, d: dict) -> "GapSpec":
        try:
            gaps = [(g["start_sample"], g["length_samples"]) for g in d["gaps"]]
            return cls(tuple(gaps), int(d["signal_len"]), int(d.get("sample_rate", 0)))
        except (KeyError, TypeError) as exc:
            raise InvalidArgument(f"malformed gap spec: {exc}") from exc

    def save(self, path) -> None:
        Path(path).write_text(json.dumps(self.to_dict(), indent=2) + "\n")

    @classmethod
    def load(cls, path) -> "GapSpec":
        try:
            d = json.loads(Path(path).read_text())
        except json.JSONDecodeError as exc:
            raise InvalidArgument(f"{path}: not a gap spec file ({exc})") from exc
        return cls.from_dict(d)


@dataclass(frozen=True, eq=False)
class ReliabilityMask:
    reliable: np.ndarray

    def __post_init__(self):
        r = np.array(self.reliable, dtype=bool).ravel()
        if r.size == 0:
            raise InvalidArgument("empty mask")
        if not r.any():
            raise InvalidArgument("mask has no reliable samples")
        r.setflags(write=False)
        object.__setattr__(self, "reliable", r)

    @property
    def L(self) -> int:
        return self.reliable.size

    @property
    def unreliable(self) -> np.ndarray:
        return ~self.reliable

    def runs(self) -> list[tuple[int, int]]:
        """Maximal runs of unreliable samples as ``(start, length)``."""
        d = np.diff(np.concatenate(([0], self.unreliable.view(np.int8), [0])))
        starts = np.flatnonzero(d == 1)
        stops = np.flatnonzero(d == -1)
        return [(int(s), int(e - s)) for s, e in zip(starts, stops)]

    def padded(self, L: int) -> "ReliabilityMask":
        """Extend to length ``L`` with reliable samples."""
        if L < self.L:
            raise InvalidArgument("cannot pad a mask to a shorter length")
        return ReliabilityMask(np.concatenate((self.reliable, np.ones(L - self.L, bool))))


def build_mask(gaps: GapSpec) -> ReliabilityMask:
    reliable = np.ones(gaps.signal_len, dtype=bool)
    for s, n in gaps.gaps:
        reliable[s:s + n] = False
    return ReliabilityMask(reliable)


def project_feasible(mask: ReliabilityMask, x, z) -> np.ndarray:
    """Projection onto signals agreeing with ``x`` on reliable samples."""
    x = np.asarray(x)
    z = np.asarray(z)
    if x.shape != (mask.L,) or z.shape != (mask.L,):
        raise InvalidArgument("mask, signal and point must have equal length")
    return np.where(mask.reliable, x, z.real).astype(float, copy=False)


@dataclass(frozen=True, eq=False)
class NeighborhoodSelection:
    frame_indices: np.ndarray
    context_frames: int
    clean: np.ndarray = field(repr=False, default=None)

    def __len__(self):
        return self.frame_indices.size


def clean_frames(frame: GaborFrame, mask: ReliabilityMask) -> np.ndarray:
    """Boolean per frame: window support holds reliable samples only."""
    if mask.L != frame.L:
        raise InvalidArgument("mask length does not match frame")
    return mask.reliable[frame.support].all(axis=1)


def select_neighborhood(frame: GaborFrame, mask: ReliabilityMask, K: int = 20,
                        gaps=None) -> NeighborhoodSelection:
    """Up to ``K`` clean frames on each side of every gap.

    Frames left of a gap have their time index before the gap start; frames
    right of it at or after the gap end. ``gaps`` defaults to the unreliable
    runs of ``mask``; it may name zero-length positions.
    """
    if K < 1:
        raise InvalidArgument("K must be >= 1")
    clean = clean_frames(frame, mask)
    if gaps is None:
        gaps = mask.runs()
    centers = np.arange(frame.N) * frame.hop
    chosen: set[int] = set()
    for start, length in gaps:
        left = np.flatnonzero(clean & (centers < start))[::-1][:K]
        right = np.flatnonzero(clean & (centers >= start + length))[:K]
        chosen.update(left.tolist())
        chosen.update(right.tolist())
    if not chosen:
        raise EmptyNeighborhoodError("no frame next to the gaps is free of missing samples")
    idx = np.array(sorted(chosen), dtype=int)
    idx.setflags(write=False)
    return NeighborhoodSelection(idx, K, clean)


def extract_neighborhood_coeffs(frame: GaborFrame, c, sel: NeighborhoodSelection) -> np.ndarray:
    """``M' x |sel|`` matrix of the selected frames' coefficients."""
    idx = np.asarray(sel.frame_indices)
    if idx.size == 0:
        raise InvalidArgument("empty neighborhood")
    if idx.min() < 0 or idx.max() >= frame.N:
        raise InvalidArgument("neighborhood frame index out of range")
    return frame.to_grid(c)[:, idx].copy()
