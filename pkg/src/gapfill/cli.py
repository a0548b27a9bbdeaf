"""Command line: ``gapfill {degrade,inpaint,eval,sweep,learn-dict}``.

Exit status is 0 on success; failures exit with the code of their error
family (see :mod:`gapfill.errors`), 9 for file system errors.
"""
from __future__ import annotations

import argparse
import csv
import dataclasses
import logging
import sys
from pathlib import Path

from . import pipeline
from .audio import WavFile, degrade, read_wav, write_wav
from .config import ALGORITHMS, ExperimentConfig, load_config
from .dictlearn import Deformation
from .errors import InpaintError, InvalidArgument
from .metrics import format_db, sdr_on_gaps
from .problem import GapSpec, build_mask

log = logging.getLogger("gapfill")

EXIT_IO = 9


def _floats(text: str) -> tuple[float, ...]:
    return tuple(float(v) for v in text.split(",") if v.strip())


def _ints(text: str) -> tuple[int, ...]:
    return tuple(int(v) for v in text.split(",") if v.strip())


def _algos(text: str) -> tuple[str, ...]:
    algos = tuple(v.strip() for v in text.split(",") if v.strip())
    for a in algos:
        if a not in ALGORITHMS:
            raise argparse.ArgumentTypeError(f"unknown algorithm {a!r}")
    return algos


def _config(args) -> ExperimentConfig:
    cfg = ExperimentConfig.paper_defaults() if args.paper_defaults else ExperimentConfig()
    if args.config:
        cfg = load_config(args.config, cfg)
    return cfg


def _gaps_path(wav_path) -> Path:
    p = Path(wav_path)
    return p.with_name(p.stem + ".gaps.json")


def _read_with_gaps(wav_path, gaps_path):
    wav = read_wav(wav_path)
    spec = GapSpec.load(gaps_path or _gaps_path(wav_path))
    if spec.signal_len != wav.samples.size:
        raise InvalidArgument(
            f"gap spec is for {spec.signal_len} samples, audio has {wav.samples.size}")
    return wav, spec


def cmd_degrade(args) -> None:
    wav = read_wav(args.input)
    y, spec = degrade(wav.samples, args.gap_ms, args.num_gaps, args.seed,
                      wav.sample_rate, args.guard_ms)
    write_wav(args.out, WavFile(y, wav.sample_rate))
    gaps = args.gaps or _gaps_path(args.out)
    spec.save(gaps)
    log.info("wrote %s and %s (%d gaps)", args.out, gaps, len(spec))


def cmd_inpaint(args) -> None:
    cfg = _config(args)
    wav, spec = _read_with_gaps(args.input, args.gaps)
    mask = build_mask(spec)
    D = Deformation.load(args.dict) if args.dict else None
    if D is not None and args.algo != "cp-learned":
        raise InvalidArgument("--dict only applies to --algo cp-learned")
    restored, res = pipeline.inpaint(wav.samples, mask, args.algo, cfg, deformation=D)
    write_wav(args.out, WavFile(restored, wav.sample_rate))
    if res is not None:
        log.info("%d iterations, converged=%s", res.iterations, res.converged)
        if args.trace:
            res.write_trace(args.trace)


def cmd_eval(args) -> None:
    orig = read_wav(args.original)
    restored, spec = _read_with_gaps(args.restored, args.gaps)
    if orig.samples.size != restored.samples.size:
        raise InvalidArgument("original and restored differ in length")
    rep = sdr_on_gaps(orig.samples, restored.samples, build_mask(spec))
    name = Path(args.restored).stem
    rows = [dict(signal=name, algo=args.algo, gap_id=str(i), sdr_db=format_db(v))
            for i, v in rep.per_gap]
    rows.append(dict(signal=name, algo=args.algo, gap_id="all", sdr_db=format_db(rep.overall)))
    fields = ("signal", "algo", "gap_id", "sdr_db")
    if args.out:
        pipeline.write_rows(args.out, rows, fields, append=True)
    else:
        w = csv.DictWriter(sys.stdout, fieldnames=fields, lineterminator="\n")
        w.writeheader()
        w.writerows(rows)


def cmd_sweep(args) -> None:
    cfg = _config(args)
    overrides = {}
    if args.gap_ms:
        overrides["gap_ms"] = args.gap_ms
    if args.seed:
        overrides["seeds"] = args.seed
    if args.algo:
        overrides["algos"] = args.algo
    if args.num_gaps is not None:
        overrides["num_gaps"] = args.num_gaps
    cfg = dataclasses.replace(cfg, **overrides)
    rows = pipeline.run_sweep(pipeline.load_signals(args.inputs), cfg, jobs=args.jobs)
    pipeline.write_rows(args.out, rows, pipeline.SWEEP_FIELDS)
    pipeline.write_rows(pipeline.summary_path(args.out), pipeline.summarize(rows),
                        pipeline.SUMMARY_FIELDS)
    log.info("%d rows -> %s", len(rows), args.out)


def cmd_learn_dict(args) -> None:
    cfg = _config(args)
    if args.context is not None:
        cfg = dataclasses.replace(
            cfg, neighborhood=dataclasses.replace(cfg.neighborhood, context_frames=args.context))
    wav, spec = _read_with_gaps(args.input, args.gaps)
    D = pipeline.learn_for_signal(wav.samples, build_mask(spec), cfg)
    D.save(args.out)
    r = D.report
    print(f"l11 {r.initial_l11:.6g} -> {r.final_l11:.6g} after {r.iterations} sweeps, "
          f"{len(r.blocks)} rotation blocks")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="gapfill", description=__doc__.splitlines()[0])
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p, config=True):
        if config:
            p.add_argument("--config", help="INI file with experiment settings")
            p.add_argument("--paper-defaults", action="store_true",
                           help="start from the published parameter set")

    p = sub.add_parser("degrade", help="punch random gaps into a WAV file")
    p.add_argument("input")
    p.add_argument("--gap-ms", type=float, default=20.0)
    p.add_argument("--num-gaps", type=int, default=5)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--guard-ms", type=float, default=200.0)
    p.add_argument("--gaps", help="gap spec output (default: <out>.gaps.json)")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_degrade)

    p = sub.add_parser("inpaint", help="restore the gaps of a degraded WAV file")
    p.add_argument("input")
    p.add_argument("--gaps", help="gap spec (default: <input>.gaps.json)")
    p.add_argument("--algo", choices=ALGORITHMS, default="cp-learned")
    p.add_argument("--dict", help="saved deformation; skips learning")
    p.add_argument("--trace", help="write solver iteration trace CSV here")
    p.add_argument("--out", required=True)
    common(p)
    p.set_defaults(func=cmd_inpaint)

    p = sub.add_parser("eval", help="SDR of a restoration inside the gaps")
    p.add_argument("original")
    p.add_argument("restored")
    p.add_argument("--gaps", help="gap spec (default: <restored>.gaps.json)")
    p.add_argument("--algo", default="")
    p.add_argument("--out", help="CSV to append to (default: stdout)")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("sweep", help="degrade/restore/score over gap lengths and seeds")
    p.add_argument("inputs", nargs="+")
    p.add_argument("--gap-ms", type=_floats)
    p.add_argument("--num-gaps", type=int)
    p.add_argument("--seed", type=_ints)
    p.add_argument("--algo", type=_algos)
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--out", required=True)
    common(p)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("learn-dict", help="learn and save a deformation for a degraded file")
    p.add_argument("input")
    p.add_argument("--gaps", help="gap spec (default: <input>.gaps.json)")
    p.add_argument("--context", type=int, help="clean frames per gap side")
    p.add_argument("--out", required=True)
    common(p)
    p.set_defaults(func=cmd_learn_dict)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        args.func(args)
    except InpaintError as exc:
        print(f"gapfill: {exc}", file=sys.stderr)
        return exc.exit_code
    except OSError as exc:
        print(f"gapfill: {exc}", file=sys.stderr)
        return EXIT_IO
    return 0


if __name__ == "__main__":
    sys.exit(main())
