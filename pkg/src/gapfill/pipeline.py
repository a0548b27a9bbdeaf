"""End-to-end restoration of one signal and the gap-length sweep."""
from __future__ import annotations

import csv
import logging
import statistics
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .audio import degrade, read_wav
from .config import ExperimentConfig
from .dictlearn import Deformation, learn_deformation
from .errors import InpaintError, InvalidArgument
from .gabor import analyze, hann_frame, padded_length
from .janssen import janssen_inpaint
from .metrics import format_db, sdr_on_gaps
from .problem import (ReliabilityMask, build_mask, extract_neighborhood_coeffs,
                      project_feasible, select_neighborhood)
from .solver import SolveResult, solve_cp, solve_cp_learned
from .weights import energy_weights, learned_energy_weights

log = logging.getLogger(__name__)

SWEEP_FIELDS = ("signal", "algo", "gap_ms", "seed", "gap_id", "sdr_db", "status", "config_hash")
SUMMARY_FIELDS = ("algo", "gap_ms", "count", "mean_sdr_db", "median_sdr_db")


@dataclass
class Padded:
    """Signal and mask extended with reliable zeros to a frame-compatible length."""

    x: np.ndarray
    mask: ReliabilityMask
    original_len: int


def pad_problem(x, mask: ReliabilityMask, cfg: ExperimentConfig) -> Padded:
    x = np.asarray(x, dtype=float)
    L = padded_length(x.size, cfg.gabor.hop, cfg.gabor.M)
    return Padded(np.concatenate((x, np.zeros(L - x.size))), mask.padded(L), x.size)


def frame_for(L: int, cfg: ExperimentConfig):
    g = cfg.gabor
    return hann_frame(g.win_len, g.hop, g.M, L)


def learn_for_signal(x, mask: ReliabilityMask, cfg: ExperimentConfig, gaps=None) -> Deformation:
    """Learn a deformation from the clean frames next to the gaps of ``x``."""
    pad = pad_problem(x, mask, cfg)
    frame = frame_for(pad.x.size, cfg)
    observed = np.where(pad.mask.reliable, pad.x, 0.0)
    sel = select_neighborhood(frame, pad.mask, cfg.neighborhood.context_frames, gaps)
    X = extract_neighborhood_coeffs(frame, analyze(frame, observed), sel)
    return learn_deformation(X, cfg.learn, even_M=cfg.gabor.M % 2 == 0)


def inpaint(x, mask: ReliabilityMask, algo: str, cfg: ExperimentConfig = ExperimentConfig(),
            deformation: Deformation | None = None) -> tuple[np.ndarray, SolveResult | None]:
    """Restore the unreliable samples of ``x`` with one algorithm.

    Returns the restored signal (original length) and, for the l1 solvers,
    the solver result of the last solve.
    """
    x = np.asarray(x, dtype=float)
    if x.shape != (mask.L,):
        raise InvalidArgument("signal and mask lengths differ")
    if mask.reliable.all():
        return x.copy(), None
    if algo == "zero-fill":
        return project_feasible(mask, x, np.zeros_like(x)), None
    if algo == "janssen":
        return janssen_inpaint(x, mask, cfg.janssen), None
    if algo not in ("cp", "cp-learned"):
        raise InvalidArgument(f"unknown algorithm {algo!r}")

    pad = pad_problem(x, mask, cfg)
    frame = frame_for(pad.x.size, cfg)
    if algo == "cp":
        res = solve_cp(frame, pad.mask, pad.x, energy_weights(frame, pad.mask), cfg.solver)
        return res.restored[:pad.original_len], res

    if deformation is not None or not cfg.neighborhood.per_gap:
        D = deformation if deformation is not None else learn_for_signal(x, mask, cfg)
        w = learned_energy_weights(frame, pad.mask, D)
        res = solve_cp_learned(frame, pad.mask, pad.x, D, w, cfg.solver)
        return res.restored[:pad.original_len], res

    # one deformation per gap; each solve contributes only its own gap
    out = project_feasible(mask, x, np.zeros_like(x))
    res = None
    for start, length in mask.runs():
        D = learn_for_signal(x, mask, cfg, gaps=[(start, length)])
        w = learned_energy_weights(frame, pad.mask, D)
        res = solve_cp_learned(frame, pad.mask, pad.x, D, w, cfg.solver)
        out[start:start + length] = res.restored[start:start + length]
    return out, res


# --- sweep ----------------------------------------------------------------

def _instance_rows(task):
    name, x, rate, sig_index, gap_ms, seed, cfg, chash = task
    rows = []
    try:
        degraded, spec = degrade(x, gap_ms, cfg.num_gaps, [seed, sig_index], rate, cfg.guard_ms)
    except InpaintError as exc:
        return [dict(signal=name, algo=a, gap_ms=gap_ms, seed=seed, gap_id="all",
                     sdr_db="", status=f"error: {exc}", config_hash=chash) for a in cfg.algos]
    mask = build_mask(spec)
    for algo in cfg.algos:
        base = dict(signal=name, algo=algo, gap_ms=gap_ms, seed=seed, config_hash=chash)
        try:
            restored, _ = inpaint(degraded, mask, algo, cfg)
            rep = sdr_on_gaps(x, restored, mask)
        except (InpaintError, np.linalg.LinAlgError) as exc:
            log.warning("%s/%s/%sms/seed %s failed: %s", name, algo, gap_ms, seed, exc)
            rows.append(dict(base, gap_id="all", sdr_db="", status=f"error: {exc}"))
            continue
        for gid, val in rep.per_gap:
            rows.append(dict(base, gap_id=str(gid), sdr_db=format_db(val), status="ok"))
        rows.append(dict(base, gap_id="all", sdr_db=format_db(rep.overall), status="ok"))
    return rows


def run_sweep(signals, cfg: ExperimentConfig, jobs: int = 1) -> list[dict]:
    """Degrade, restore and score every (signal, gap length, seed) instance.

    ``signals`` is a sequence of ``(name, samples, sample_rate)``. Rows come
    back in a fixed order regardless of ``jobs``.
    """
    chash = cfg.config_hash()
    tasks = [(name, np.asarray(x, float), int(rate), i, float(g), int(seed), cfg, chash)
             for i, (name, x, rate) in enumerate(signals)
             for g in cfg.gap_ms for seed in cfg.seeds]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            chunks = list(pool.map(_instance_rows, tasks))
    else:
        chunks = [_instance_rows(t) for t in tasks]
    return [row for chunk in chunks for row in chunk]


def summarize(rows) -> list[dict]:
    """Mean and median of the per-gap SDRs for each (algorithm, gap length)."""
    groups: dict[tuple[str, float], list[float]] = {}
    for r in rows:
        if r["status"] != "ok" or r["gap_id"] == "all":
            continue
        groups.setdefault((r["algo"], float(r["gap_ms"])), []).append(float(r["sdr_db"]))
    out = []
    for (algo, gap), vals in sorted(groups.items()):
        out.append(dict(algo=algo, gap_ms=gap, count=len(vals),
                        mean_sdr_db=format_db(statistics.fmean(vals)),
                        median_sdr_db=format_db(statistics.median(vals))))
    return out


def write_rows(path, rows, fieldnames, append: bool = False) -> None:
    path = Path(path)
    new = not (append and path.exists() and path.stat().st_size > 0)
    with open(path, "a" if append else "w", newline="") as fh:
        w = csv.DictWriter(fh, fieldnames=fieldnames, lineterminator="\n")
        if new:
            w.writeheader()
        w.writerows(rows)


def summary_path(path) -> Path:
    path = Path(path)
    return path.with_name(path.stem + "_summary.csv")


def load_signals(paths) -> list[tuple[str, np.ndarray, int]]:
    out = []
    for p in paths:
        wav = read_wav(p)
        out.append((Path(p).stem, wav.samples, wav.sample_rate))
    return out
