"""Weighted l1 inpainting by the Chambolle-Pock primal-dual iteration.

The primal variable is a real signal constrained to agree with the observed
one on reliable samples, the dual variable lives on (deformed) half-spectrum
coefficients. One step reads::

    q <- clip_w(q + sigma * D_block G_A z)
    p_new <- proj_S(p - tau * G_S D_block^H q)
    z <- 2 p_new - p
"""
from __future__ import annotations

import csv
from dataclasses import dataclass, field

import numpy as np

from .dictlearn import Deformation, apply_deformation, apply_deformation_adjoint
from .errors import InvalidArgument
from .gabor import GaborFrame, adjoint, analyze, synthesize
from .problem import ReliabilityMask, project_feasible


@dataclass(frozen=True)
class SolverConfig:
    tau: float = 0.99
    sigma: float = 0.99
    tol_eps: float = 1e-8
    max_iters: int = 3000
    min_iters: int = 10

    def __post_init__(self):
        if self.tau <= 0 or self.sigma <= 0:
            raise InvalidArgument("step sizes must be positive")
        if self.tol_eps <= 0:
            raise InvalidArgument("tol_eps must be positive")
        if self.max_iters < 1 or self.min_iters < 0:
            raise InvalidArgument("need max_iters >= 1 and min_iters >= 0")


@dataclass
class SolveResult:
    restored: np.ndarray
    iterations: int
    converged: bool
    final_residual: float
    objective_trace: np.ndarray
    residual_trace: np.ndarray = field(repr=False, default=None)

    def write_trace(self, path) -> None:
        """Iteration diagnostics as CSV (iteration, residual, objective)."""
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["iteration", "residual", "objective"])
            for i, (r, o) in enumerate(zip(self.residual_trace, self.objective_trace)):
                w.writerow([i, repr(float(r)), repr(float(o))])


def clip(z, w) -> np.ndarray:
    """Cap the magnitude of every entry of ``z`` at ``w``, keeping the phase."""
    z = np.asarray(z)
    w = np.asarray(w, dtype=float)
    if z.shape != w.shape and w.ndim != 0:
        raise InvalidArgument("clip: shapes of z and w differ")
    if np.any(w < 0):
        raise InvalidArgument("clip: negative weight")
    mag = np.abs(z)
    over = mag > w
    scale = np.divide(w, mag, out=np.ones(mag.shape), where=over)
    out = z * scale
    # w / |z| underflows for tiny w; take the unit phase first there
    tiny = over & (scale < np.finfo(float).tiny)
    if tiny.any():
        wb = np.broadcast_to(w, z.shape)
        out = out.astype(complex)
        out[tiny] = np.exp(1j * np.angle(z[tiny])) * wb[tiny]
    return out


def estimate_frame_norm(frame: GaborFrame, iters: int = 50, seed: int = 0) -> float:
    """Power iteration on ``synthesize o analyze``; returns sqrt of its top eigenvalue."""
    rng = np.random.default_rng(seed)
    x = rng.standard_normal(frame.L)
    x /= np.linalg.norm(x)
    lam = 0.0
    for _ in range(iters):
        y = synthesize(frame, analyze(frame, x))
        lam = float(np.linalg.norm(y))
        if lam == 0.0:
            return 0.0
        x = y / lam
    return float(np.sqrt(lam))


def default_step_sizes(frame: GaborFrame, D_present: bool = False) -> tuple[float, float]:
    """``tau = sigma = 0.99 / ||K||``.

    The full-spectrum frame norm bounds the half-spectrum analysis operator,
    and a unitary deformation does not change it, so ``D_present`` does not
    enter the estimate.
    """
    if frame.is_parseval:
        return 0.99, 0.99
    lo, hi = frame.frame_bounds
    if np.isclose(lo, hi, rtol=1e-12, atol=0.0):
        # painless frames have a diagonal frame operator: norm^2 = bound
        norm = float(np.sqrt(hi))
    else:
        norm = estimate_frame_norm(frame)
    return 0.99 / norm, 0.99 / norm


def _check_inputs(frame, mask, x, w, cfg):
    x = np.asarray(x, dtype=float)
    if x.shape != (frame.L,) or mask.L != frame.L:
        raise InvalidArgument("signal, mask and frame lengths differ")
    w = np.asarray(w, dtype=float)
    if w.shape != (frame.num_coeffs,):
        raise InvalidArgument(f"weight vector must have length {frame.num_coeffs}")
    if np.any(w < 0):
        raise InvalidArgument("negative weight")
    lo, hi = frame.frame_bounds
    if cfg.tau * cfg.sigma * hi > 1.0 + 1e-12:
        raise InvalidArgument(
            f"step sizes violate tau*sigma*||K||^2 <= 1 (got {cfg.tau * cfg.sigma * hi:.6g})")
    return x, w


def _iterate(frame, mask, x, w, cfg, forward, backward) -> SolveResult:
    p = project_feasible(mask, x, np.zeros(frame.L))
    q = np.zeros(frame.num_coeffs, dtype=complex)
    z = p
    Az_prev = None
    residuals, objectives = [], []
    converged = False
    residual = np.inf
    i = 0
    while i < cfg.max_iters:
        Az = analyze(frame, z)
        KAz = forward(Az)
        objectives.append(float(np.sum(w * np.abs(KAz))))
        if Az_prev is not None:
            num = np.vdot(Az - Az_prev, Az - Az_prev).real
            den = np.vdot(Az_prev, Az_prev).real
            residual = num / den if den > 0 else (0.0 if num == 0 else np.inf)
            residuals.append(residual)
            if i >= cfg.min_iters and (num <= cfg.tol_eps * den if den > 0 else num == 0):
                converged = True
                break
        else:
            residuals.append(np.nan)
        q = clip(q + cfg.sigma * KAz, w)
        p_new = project_feasible(mask, x, p - cfg.tau * adjoint(frame, backward(q)))
        z = 2.0 * p_new - p
        p = p_new
        Az_prev = Az
        i += 1
    restored = project_feasible(mask, x, z)
    return SolveResult(restored, i, converged, float(residual),
                       np.array(objectives), np.array(residuals))


def solve_cp(frame: GaborFrame, mask: ReliabilityMask, x, w,
             cfg: SolverConfig = SolverConfig()) -> SolveResult:
    """Weighted l1 inpainting over the plain Gabor dictionary."""
    x, w = _check_inputs(frame, mask, x, w, cfg)
    return _iterate(frame, mask, x, w, cfg, lambda c: c, lambda q: q)


def solve_cp_learned(frame: GaborFrame, mask: ReliabilityMask, x, D: Deformation, w_L,
                     cfg: SolverConfig = SolverConfig()) -> SolveResult:
    """Weighted l1 inpainting over the deformed dictionary ``D_block``."""
    if D.size != frame.M_half:
        raise InvalidArgument(f"deformation size {D.size} does not match M'={frame.M_half}")
    x, w_L = _check_inputs(frame, mask, x, w_L, cfg)
    return _iterate(frame, mask, x, w_L, cfg,
                    lambda c: apply_deformation(D, c),
                    lambda q: apply_deformation_adjoint(D, q))
