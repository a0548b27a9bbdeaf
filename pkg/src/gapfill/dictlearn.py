"""Unitary banded deformations of the frequency axis, learned to sparsify.

A deformation ``D`` (``M' x M'``, unitary, ``D[i, j] = 0`` for ``|i - j| > d``)
acts on every time frame of a coefficient grid. A unitary matrix with that
band is a direct sum of unitary blocks on contiguous index ranges of size at
most ``d + 1``, so learning proceeds in two stages:

1. every candidate block is optimised independently by coordinate descent
   over complex Givens rotations on a smoothed l1,1 objective
   ``sum sqrt(|y|**2 + rho)`` with ``rho`` halved after every sweep;
2. a dynamic program picks the partition of ``0..M'-1`` into blocks that
   minimises the true l1,1 norm. Singletons (identity) are always
   available, so the result is never worse than no deformation.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from itertools import combinations
from pathlib import Path

import numpy as np
from scipy import sparse

from .errors import InvalidArgument

log = logging.getLogger(__name__)

_INV_PHI = (np.sqrt(5.0) - 1.0) / 2.0
_REL_IMPROVEMENT = 1e-12


@dataclass(frozen=True)
class LearnConfig:
    iter_max: int = 20
    band_d: int = 1
    rho_start: float = 1.0
    eps: float = 2.0 ** -20

    def __post_init__(self):
        if self.iter_max < 1:
            raise InvalidArgument("iter_max must be >= 1")
        if self.band_d < 0:
            raise InvalidArgument("band_d must be >= 0")
        if not 0 < self.eps < self.rho_start:
            raise InvalidArgument("need 0 < eps < rho_start")


@dataclass(frozen=True)
class LearnReport:
    iterations: int = 0
    initial_l11: float = 0.0
    final_l11: float = 0.0
    blocks: tuple[tuple[int, int], ...] = ()


@dataclass(frozen=True, eq=False)
class Deformation:
    matrix: np.ndarray
    band_d: int
    report: LearnReport = field(default_factory=LearnReport)

    def __post_init__(self):
        D = np.array(self.matrix, dtype=complex)
        if D.ndim != 2 or D.shape[0] != D.shape[1] or D.shape[0] < 1:
            raise InvalidArgument("deformation must be a non-empty square matrix")
        if self.band_d < 0:
            raise InvalidArgument("band_d must be >= 0")
        i, j = np.nonzero(D)
        if np.any(np.abs(i - j) > self.band_d):
            raise InvalidArgument(f"matrix has entries outside band {self.band_d}")
        D.setflags(write=False)
        object.__setattr__(self, "matrix", D)

    @property
    def size(self) -> int:
        return self.matrix.shape[0]

    @classmethod
    def identity(cls, size: int, band_d: int = 0, report: LearnReport | None = None):
        return cls(np.eye(size, dtype=complex), band_d, report or LearnReport())

    def is_identity(self) -> bool:
        return bool(np.array_equal(self.matrix, np.eye(self.size)))

    def unitarity_error(self) -> float:
        """Frobenius norm of ``D^H D - I``."""
        S = sparse.csr_matrix(self.matrix)
        E = (S.conj().T @ S - sparse.identity(self.size, format="csr")).toarray()
        return float(np.linalg.norm(E))

    def save(self, path) -> None:
        r = self.report
        with open(path, "wb") as fh:
            np.savez(fh, M_half=self.size, band_d=self.band_d, matrix=self.matrix,
                     iterations=r.iterations, initial_l11=r.initial_l11,
                     final_l11=r.final_l11,
                     blocks=np.array(r.blocks, dtype=np.int64).reshape(-1, 2))

    @classmethod
    def load(cls, path) -> "Deformation":
        try:
            with np.load(Path(path), allow_pickle=False) as z:
                D = z["matrix"]
                if D.shape != (int(z["M_half"]),) * 2:
                    raise InvalidArgument(f"{path}: header does not match matrix shape")
                report = LearnReport(int(z["iterations"]), float(z["initial_l11"]),
                                     float(z["final_l11"]),
                                     tuple(map(tuple, z["blocks"].tolist())))
                return cls(D, int(z["band_d"]), report)
        except (KeyError, ValueError, OSError) as exc:
            raise InvalidArgument(f"{path}: not a deformation file ({exc})") from exc


def l11(X) -> float:
    return float(np.abs(X).sum())


def _grid(D: Deformation, c) -> np.ndarray:
    c = np.asarray(c)
    if c.ndim != 1 or c.size % D.size:
        raise InvalidArgument(
            f"coefficient vector of length {c.size} does not fit M'={D.size}")
    return c.reshape(D.size, -1)


def _banded_product(A: np.ndarray, band: int, C: np.ndarray) -> np.ndarray:
    n = A.shape[0]
    out = np.zeros(C.shape, dtype=complex)
    for k in range(-min(band, n - 1), min(band, n - 1) + 1):
        diag = A.diagonal(k)[:, None]
        if k >= 0:
            out[:n - k] += diag * C[k:]
        else:
            out[-k:] += diag * C[:n + k]
    return out


def apply_deformation(D: Deformation, c) -> np.ndarray:
    """Block matrix ``D (x) I_N`` applied to a flat coefficient vector."""
    return _banded_product(D.matrix, D.band_d, _grid(D, c)).ravel()


def apply_deformation_adjoint(D: Deformation, q) -> np.ndarray:
    return _banded_product(D.matrix.conj().T, D.band_d, _grid(D, q)).ravel()


# --- learning -------------------------------------------------------------

def _rotate(a, b, theta, phi):
    """Rows after ``[[c, s e^{i phi}], [-s e^{-i phi}, c]]``; angles broadcast per block."""
    c = np.cos(theta)[:, None]
    s = np.sin(theta)[:, None]
    e = np.exp(1j * phi)[:, None]
    return c * a + s * e * b, c * b - s * np.conj(e) * a


def _pair_stats(a, b):
    """Mean/half-difference of row energies and the cross term, per entry."""
    A = a.real ** 2 + a.imag ** 2
    Bb = b.real ** 2 + b.imag ** 2
    cross = a * np.conj(b)
    return (A + Bb) / 2, (A - Bb) / 2, cross.real, cross.imag


def _pair_cost(stats, theta, phi, rho):
    # |a'|^2 = S + cos(2t) H + sin(2t) Re(e^{-i phi} a conj(b)), |b'|^2 mirrored
    S, H, P, Q = stats
    c2 = np.cos(2 * theta)[:, None]
    s2 = np.sin(2 * theta)[:, None]
    R = np.cos(phi)[:, None] * P + np.sin(phi)[:, None] * Q
    t = c2 * H + s2 * R
    return (np.sqrt(np.maximum(S + t, 0.0) + rho).sum(axis=-1)
            + np.sqrt(np.maximum(S - t, 0.0) + rho).sum(axis=-1))


def _golden(f, lo, hi, iters=24):
    """Vectorised golden-section minimisation on per-block brackets."""
    x1 = hi - _INV_PHI * (hi - lo)
    x2 = lo + _INV_PHI * (hi - lo)
    f1, f2 = f(x1), f(x2)
    for _ in range(iters):
        left = f1 < f2
        # keep [lo, x2] when the left probe is lower, else [x1, hi]
        hi = np.where(left, x2, hi)
        lo = np.where(left, lo, x1)
        x_new = np.where(left, hi - _INV_PHI * (hi - lo), lo + _INV_PHI * (hi - lo))
        f_new = f(x_new)
        x1, x2, f1, f2 = (np.where(left, x_new, x2), np.where(left, x1, x_new),
                          np.where(left, f_new, f2), np.where(left, f1, f_new))
    pick = f1 < f2
    return np.where(pick, x1, x2), np.where(pick, f1, f2)


def _pair_search(a, b, rho, real_only, start, coarse=True, n_theta=16, n_phi=8):
    """Best rotation of row pairs (a, b) for every block.

    Returns (theta, phi, cost, cost_at_identity). With ``coarse`` a grid
    over both angles seeds the local refinement; otherwise the search is
    local around theta = 0 and phi = ``start``.
    """
    B = a.shape[0]
    stats = _pair_stats(a, b)
    zero = np.zeros(B)
    cost0 = _pair_cost(stats, zero, zero, rho)
    best_t, best_p, best_f = zero.copy(), zero.copy(), cost0.copy()
    if coarse:
        thetas = np.linspace(-np.pi / 2, np.pi / 2, n_theta, endpoint=False)
        phis = np.linspace(0.0, np.pi, n_phi, endpoint=False)
        for p in phis:
            p_vec = np.where(real_only, 0.0, p)
            for t in thetas:
                f = _pair_cost(stats, np.full(B, t), p_vec, rho)
                better = f < best_f
                best_t = np.where(better, t, best_t)
                best_p = np.where(better, p_vec, best_p)
                best_f = np.where(better, f, best_f)
        dt, dp, rounds = np.pi / n_theta, np.pi / n_phi, 2
    else:
        best_p = np.where(real_only, 0.0, start)
        dt, dp, rounds = np.pi / 32, np.pi / 16, 1
    dp = np.where(real_only, 0.0, dp)
    for _ in range(rounds):
        t, f = _golden(lambda t: _pair_cost(stats, t, best_p, rho), best_t - dt, best_t + dt)
        upd = f < best_f
        best_t, best_f = np.where(upd, t, best_t), np.where(upd, f, best_f)
        p, f = _golden(lambda p: _pair_cost(stats, best_t, p, rho), best_p - dp, best_p + dp)
        upd = (f < best_f) & ~real_only
        best_p, best_f = np.where(upd, p, best_p), np.where(upd, f, best_f)
        dt, dp = dt / 4, dp / 4
    return best_t, best_p, best_f, cost0


def _learn_blocks(Y, real_rows, cfg: LearnConfig):
    """Coordinate descent for a stack of blocks ``Y`` (B, s, n).

    ``real_rows`` (B, s) marks rows whose rotations must stay real.
    Returns unitary factors ``U`` (B, s, s) and the number of sweeps.
    """
    B, s, _ = Y.shape
    Y = Y.copy()
    U = np.broadcast_to(np.eye(s, dtype=complex), (B, s, s)).copy()
    pairs = list(combinations(range(s), 2))
    last_phi = {pair: np.zeros(B) for pair in pairs}
    rho = cfg.rho_start
    sweeps = 0
    for _ in range(cfg.iter_max):
        sweeps += 1
        changed = False
        for j, k in pairs:
            real_only = real_rows[:, j] | real_rows[:, k]
            t, p, f, f0 = _pair_search(Y[:, j], Y[:, k], rho, real_only,
                                       last_phi[j, k], coarse=sweeps == 1)
            accept = f < f0 - _REL_IMPROVEMENT * f0
            if not accept.any():
                continue
            changed = True
            t = np.where(accept, t, 0.0)
            p = np.where(accept, p, 0.0)
            last_phi[j, k] = p
            Y[:, j], Y[:, k] = _rotate(Y[:, j], Y[:, k], t, p)
            U[:, j], U[:, k] = _rotate(U[:, j], U[:, k], t, p)
        if not changed:
            break
        rho /= 2.0
        if rho < cfg.eps:
            break
    return U, sweeps


def learn_deformation(X, cfg: LearnConfig = LearnConfig(), *, even_M: bool = True) -> Deformation:
    """Banded unitary ``D`` approximately minimising ``||D X||_{1,1}``.

    ``X`` holds neighborhood coefficients, one column per time frame and one
    row per frequency bin. Rows 0 and, for even ``M``, ``M'-1`` (DC and
    Nyquist) only take part in real rotations.
    """
    X = np.asarray(X, dtype=complex)
    if X.ndim != 2 or X.size == 0:
        raise InvalidArgument("X must be a non-empty 2-D array")
    if not np.all(np.isfinite(X)):
        raise InvalidArgument("X must be finite")
    Mh = X.shape[0]
    initial = l11(X)
    d = min(cfg.band_d, Mh - 1)
    if initial == 0.0 or d == 0:
        return Deformation.identity(Mh, cfg.band_d,
                                    LearnReport(0, initial, initial, ()))

    scale = np.sqrt(np.mean(np.abs(X) ** 2))
    Xn = X / scale
    is_real = np.zeros(Mh, dtype=bool)
    is_real[0] = True
    if even_M:
        is_real[-1] = True

    row_cost = np.abs(X).sum(axis=1)
    block_cost: dict[int, np.ndarray] = {1: row_cost}
    block_U: dict[int, np.ndarray] = {}
    iterations = 0
    for s in range(2, d + 2):
        starts = np.arange(Mh - s + 1)
        rows = starts[:, None] + np.arange(s)[None, :]
        U, sweeps = _learn_blocks(Xn[rows], is_real[rows], cfg)
        iterations = max(iterations, sweeps)
        block_U[s] = U
        block_cost[s] = np.abs(U @ X[rows]).sum(axis=(1, 2))
        log.debug("block size %d: %d sweeps", s, sweeps)

    # partition by dynamic programming; larger blocks need a real gain
    best = np.zeros(Mh + 1)
    choice = np.ones(Mh + 1, dtype=int)
    for i in range(1, Mh + 1):
        best[i] = best[i - 1] + row_cost[i - 1]
        for s in range(2, min(d + 1, i) + 1):
            cand = best[i - s] + block_cost[s][i - s]
            if cand < best[i] - _REL_IMPROVEMENT * max(best[i], 1e-300):
                best[i], choice[i] = cand, s
    D = np.eye(Mh, dtype=complex)
    blocks = []
    i = Mh
    while i > 0:
        s = choice[i]
        if s > 1:
            D[i - s:i, i - s:i] = block_U[s][i - s]
            blocks.append((i - s, s))
        i -= s
    final = l11(_banded_product(D, d, X))
    report = LearnReport(iterations, initial, final, tuple(sorted((int(a), int(b)) for a, b in blocks)))
    log.info("deformation learned: l11 %.6g -> %.6g, %d blocks", initial, final, len(blocks))
    return Deformation(D, cfg.band_d, report)
