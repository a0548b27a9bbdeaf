"""Energy-based weights: the share of an atom's energy on reliable samples."""
from __future__ import annotations

import numpy as np

from .dictlearn import Deformation
from .errors import InvalidArgument, NotAFrameError
from .gabor import GaborFrame
from .problem import ReliabilityMask


def _check(frame: GaborFrame, mask: ReliabilityMask):
    if mask.L != frame.L:
        raise InvalidArgument(f"mask length {mask.L} does not match L={frame.L}")


def energy_weights(frame: GaborFrame, mask: ReliabilityMask) -> np.ndarray:
    """``w_p = ||M_R g_p||^2 / ||g_p||^2`` for the plain Gabor atoms.

    ``|g_p|`` only depends on the time index, so N values are computed and
    repeated over the M' frequency bins.
    """
    _check(frame, mask)
    g2 = frame.window ** 2
    total = g2.sum()
    if total <= 0:
        raise NotAFrameError("window has zero energy")
    reliable = mask.reliable[frame.support]
    w_n = (reliable * g2).sum(axis=1) / total
    w_n[reliable.all(axis=1)] = 1.0
    return np.tile(w_n, frame.M_half)


def deformed_atom_profile(frame: GaborFrame, D: Deformation) -> np.ndarray:
    """``|h_m(j)|^2`` for ``h_m(j) = sum_k conj(D[m, k]) exp(2j*pi*k*j/M)``.

    A deformed atom is ``g[l - n*a] * h_m(l mod M)``, so its magnitude is the
    shifted window times this (M', M) profile.
    """
    Mh, M = frame.M_half, frame.M
    j = np.arange(M)
    h = np.zeros((Mh, M), dtype=complex)
    for k in range(-D.band_d, D.band_d + 1):
        diag = D.matrix.diagonal(k)
        if diag.size == 0:
            continue
        rows = np.arange(max(0, -k), max(0, -k) + diag.size)
        # relative modulation exp(2j*pi*k*j/M) after factoring out row m's own
        h[rows] += np.conj(diag)[:, None] * np.exp(2j * np.pi * k * j / M)[None, :]
    return h.real ** 2 + h.imag ** 2


def learned_energy_weights(frame: GaborFrame, mask: ReliabilityMask,
                           D: Deformation) -> np.ndarray:
    """Energy weights of the deformed atoms ``G_S D_block^H e_p``.

    Only frames whose window touches a gap are evaluated; every other atom
    lies entirely on reliable samples and gets weight 1.
    """
    _check(frame, mask)
    if D.size != frame.M_half:
        raise InvalidArgument(f"deformation size {D.size} does not match M'={frame.M_half}")
    if D.is_identity():
        return energy_weights(frame, mask)
    g2 = frame.window ** 2
    reliable = mask.reliable[frame.support]
    W = np.ones((frame.M_half, frame.N))
    dirty = np.flatnonzero(~reliable.all(axis=1))
    if dirty.size:
        H = deformed_atom_profile(frame, D)
        offs = np.arange(frame.win_len) - frame.win_len // 2
        for n in dirty:
            Hn = H[:, (n * frame.hop + offs) % frame.M]
            den = Hn @ g2
            if np.any(den <= 0):
                raise NotAFrameError(f"deformed atom in frame {n} has zero energy")
            W[:, n] = (Hn @ (g2 * reliable[n])) / den
    return W.ravel()
