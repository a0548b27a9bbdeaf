"""Painless tight Gabor frames and the real discrete Gabor transform.

Coefficients of the half spectrum are stored as a flat complex vector with
the time-frequency index ``p = n + m*N`` (``m`` the frequency bin in
``[0, M')``, ``n`` the time frame in ``[0, N)``), which is the row-major
flattening of an ``M' x N`` array.

Phase convention is frequency invariant: the modulation is taken relative to
absolute time, ``exp(2j*pi*m*l/M)``, not relative to the frame position.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .errors import InvalidArgument, NotAFrameError


def hann_window(length: int) -> np.ndarray:
    """Periodic Hann window ``0.5 - 0.5*cos(2*pi*k/length)``."""
    if length < 2:
        raise InvalidArgument(f"window length must be >= 2, got {length}")
    k = np.arange(length)
    return 0.5 - 0.5 * np.cos(2.0 * np.pi * k / length)


def padded_length(n: int, hop: int, num_modulations: int) -> int:
    """Smallest multiple of lcm(hop, M) that is >= n."""
    step = math.lcm(hop, num_modulations)
    return max(1, -(-n // step)) * step


@dataclass(frozen=True, eq=False)
class GaborFrame:
    """Gabor system of a real window with hop ``hop`` and ``M`` modulations.

    The window is stored at its natural length ``w <= M`` and is placed so
    that sample ``w // 2`` sits on the frame's time index ``n*hop``.
    """

    window: np.ndarray
    hop: int
    M: int
    L: int

    def __post_init__(self):
        g = np.array(self.window, dtype=float).ravel()
        if g.size == 0 or not np.all(np.isfinite(g)):
            raise InvalidArgument("window must be non-empty and finite")
        for name in ("hop", "M", "L"):
            if int(getattr(self, name)) <= 0:
                raise InvalidArgument(f"{name} must be positive")
        if self.L % self.hop:
            raise InvalidArgument(f"hop {self.hop} does not divide L={self.L}")
        if self.L % self.M:
            raise InvalidArgument(f"M={self.M} does not divide L={self.L}")
        if g.size > self.M:
            raise InvalidArgument(
                f"window length {g.size} exceeds M={self.M} (non-painless case)")
        if g.size > self.L:
            raise InvalidArgument("window longer than the signal")
        g.setflags(write=False)
        object.__setattr__(self, "window", g)
        object.__setattr__(self, "hop", int(self.hop))
        object.__setattr__(self, "M", int(self.M))
        object.__setattr__(self, "L", int(self.L))

    @property
    def N(self) -> int:
        return self.L // self.hop

    @property
    def M_half(self) -> int:
        return self.M // 2 + 1

    @property
    def num_coeffs(self) -> int:
        return self.N * self.M_half

    @property
    def win_len(self) -> int:
        return self.window.size

    @cached_property
    def support(self) -> np.ndarray:
        """(N, w) array of the sample indices covered by each frame."""
        offs = np.arange(self.win_len) - self.win_len // 2
        idx = (np.arange(self.N)[:, None] * self.hop + offs[None, :]) % self.L
        idx.setflags(write=False)
        return idx

    @cached_property
    def _buffer_pos(self) -> np.ndarray:
        return (np.arange(self.win_len) - self.win_len // 2) % self.M

    @cached_property
    def _frame_phase(self) -> np.ndarray:
        # exp(-2j*pi*m*n*a/M), shape (N, M')
        shift = (np.arange(self.N) * self.hop) % self.M
        m = np.arange(self.M_half)
        return np.exp(-2j * np.pi * np.outer(shift, m) / self.M)

    @cached_property
    def frame_diagonal(self) -> np.ndarray:
        """Diagonal of the frame operator, ``M * sum_n g[l - n*a]**2``."""
        d = np.bincount(self.support.ravel(),
                        weights=np.tile(self.window ** 2, self.N),
                        minlength=self.L)
        return self.M * d

    @property
    def frame_bounds(self) -> tuple[float, float]:
        d = self.frame_diagonal
        return float(d.min()), float(d.max())

    @property
    def is_parseval(self) -> bool:
        lo, hi = self.frame_bounds
        return abs(lo - 1.0) <= 1e-12 and abs(hi - 1.0) <= 1e-12

    @cached_property
    def bin_multiplicity(self) -> np.ndarray:
        """How often each stored bin occurs in the full spectrum (1 or 2)."""
        mult = np.full(self.M_half, 2.0)
        mult[0] = 1.0
        if self.M % 2 == 0:
            mult[-1] = 1.0
        return mult

    def full_window(self) -> np.ndarray:
        """Window as a length-L vector centred at sample 0 (circularly)."""
        g = np.zeros(self.L)
        g[(np.arange(self.win_len) - self.win_len // 2) % self.L] = self.window
        return g

    def to_grid(self, c: np.ndarray) -> np.ndarray:
        """Flat coefficient vector -> (M', N) array."""
        c = np.asarray(c)
        if c.shape != (self.num_coeffs,):
            raise InvalidArgument(
                f"expected {self.num_coeffs} coefficients, got shape {c.shape}")
        return c.reshape(self.M_half, self.N)

    def scaled(self, factor: float) -> "GaborFrame":
        return GaborFrame(self.window * factor, self.hop, self.M, self.L)

    # thin method aliases
    def analyze(self, x):
        return analyze(self, x)

    def synthesize(self, c):
        return synthesize(self, c)

    def adjoint(self, c):
        return adjoint(self, c)


def make_tight(frame: GaborFrame) -> GaborFrame:
    """Rescale the window pointwise so the frame becomes Parseval (A = 1)."""
    if frame.hop > frame.win_len:
        raise NotAFrameError("hop exceeds window length; frame does not cover")
    d = frame.frame_diagonal
    if np.any(d <= 0.0):
        raise NotAFrameError("frame operator has zero diagonal entries")
    pos = (np.arange(frame.win_len) - frame.win_len // 2) % frame.L
    g = frame.window / np.sqrt(d[pos])
    return GaborFrame(g, frame.hop, frame.M, frame.L)


def hann_frame(win_len: int, hop: int, M: int, L: int) -> GaborFrame:
    """Parseval Gabor frame built from a periodic Hann window."""
    return make_tight(GaborFrame(hann_window(win_len), hop, M, L))


def _check_signal(frame: GaborFrame, x) -> np.ndarray:
    x = np.asarray(x)
    if x.shape != (frame.L,):
        raise InvalidArgument(f"signal length {x.shape} does not match L={frame.L}")
    if np.iscomplexobj(x):
        raise InvalidArgument("real DGT expects a real signal")
    return x.astype(float, copy=False)


def analyze(frame: GaborFrame, x) -> np.ndarray:
    """Half-spectrum analysis ``c_p = <x, g_p>`` for ``m < M'``."""
    x = _check_signal(frame, x)
    buf = np.zeros((frame.N, frame.M))
    buf[:, frame._buffer_pos] = x[frame.support] * frame.window
    C = np.fft.rfft(buf, axis=1) * frame._frame_phase
    return np.ascontiguousarray(C.T).ravel()


def synthesize(frame: GaborFrame, c) -> np.ndarray:
    """Real synthesis of half-spectrum coefficients.

    Equivalent to applying the full synthesis operator to the conjugate
    symmetric extension of ``c``; inverts :func:`analyze` for Parseval frames.
    """
    C = frame.to_grid(c).T * np.conj(frame._frame_phase)
    buf = np.fft.irfft(C, n=frame.M, axis=1) * frame.M
    seg = buf[:, frame._buffer_pos] * frame.window
    return np.bincount(frame.support.ravel(), weights=seg.ravel(),
                       minlength=frame.L)


def adjoint(frame: GaborFrame, c) -> np.ndarray:
    """Real part of the truncated synthesis ``Re(sum_{p<P'} c_p g_p)``.

    This is the adjoint of :func:`analyze` for the real inner product
    ``Re<c, d>`` on coefficients.
    """
    C = frame.to_grid(c) / frame.bin_multiplicity[:, None]
    return synthesize(frame, C.ravel())


def atom(frame: GaborFrame, p: int) -> np.ndarray:
    """Complex atom ``g_p[l] = g[l - n*a] * exp(2j*pi*m*l/M)``."""
    if not 0 <= p < frame.num_coeffs:
        raise InvalidArgument(f"atom index {p} out of range [0, {frame.num_coeffs})")
    m, n = divmod(p, frame.N)
    l = np.arange(frame.L)
    return np.roll(frame.full_window(), n * frame.hop) * np.exp(2j * np.pi * m * l / frame.M)
