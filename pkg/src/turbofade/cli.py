"""Command-line driver: config file in, CSV out.

Every subcommand is a pure function of (config file, --seed): outputs are
written without timestamps or wall-clock fields so a rerun overwrites its
files byte-identically. Heavy jobs run sequentially; --workers is accepted
for forward compatibility and recorded in the output metadata, but the
current build keeps every run single-process so results never depend on
scheduling.
"""
from __future__ import annotations

import argparse
import hashlib
import json
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .codec import LayoutError, build_code, code_to_text
from .config import ConfigError, ExperimentConfig, config_hash, load_config
from .density_evolution import evolve_awgn, evolve_fading, find_threshold
from .ensemble import (
    DegreeProfile,
    ProfileError,
    derive_code_params,
    singleton_diversity,
    validate_profile,
)
from .outage import (
    default_ray_angles,
    deo_boundary,
    information_outage_boundary,
    outage_probability_bpsk,
    p_deo,
)
from .simulate import StopRule, run_erasure_audit, run_wer_sweep, \
    sabotage_multiplexer

__all__ = ["main"]

_REGULAR = {2: 1}


def _profile_id(profile: DegreeProfile) -> str:
    return ";".join(f"{d}:{float(f):g}" for d, f in profile.fractions)


def _cell(value) -> str:
    if value is None:
        return "unbounded"
    if isinstance(value, float):
        return repr(value)
    return str(value)


def _write_csv(path: Path, meta: dict, columns: list[str], rows) -> None:
    lines = [f"# {key}: {value}" for key, value in meta.items()]
    lines.append(",".join(columns))
    lines.extend(",".join(_cell(v) for v in row) for row in rows)
    path.write_text("\n".join(lines) + "\n")


def _meta(args, command: str, **extra) -> dict:
    meta = {
        "command": command,
        "version": __version__,
        "config": config_hash(args.config),
        "seed": args.seed,
        "workers": args.workers,
    }
    meta.update(extra)
    return meta


def _params_table(cfg: ExperimentConfig) -> str:
    profile = cfg.require_profile()
    code = derive_code_params(
        profile,
        cfg.code.get("mother_rate", "1/2"),
        cfg.code.get("code_rate", "1/2"),
    )
    diversity = singleton_diversity(2, code.code_rate)
    rows = [
        ("profile", _profile_id(profile)),
        ("mean degree", f"{float(code.average_degree):.6g}"),
        ("mother rate", str(code.mother_rate)),
        ("code rate", str(code.code_rate)),
        ("constituent rate", str(code.constituent_rate)),
        ("puncture fraction", f"{float(code.puncture_fraction):.6g}"),
        ("segment count", str(code.segment_count)),
        ("segment puncture fraction",
         f"{float(code.segment_puncture_fraction):.6g}"),
        ("singleton diversity bound", str(diversity.singleton_bound)),
        ("full diversity possible",
         "yes" if diversity.full_diversity_possible else "no"),
    ]
    width = max(len(name) for name, _ in rows)
    return "\n".join(f"{name:<{width}}  {value}" for name, value in rows)


def cmd_params(cfg: ExperimentConfig, args) -> int:
    print(_params_table(cfg))
    return 0


def cmd_threshold(cfg: ExperimentConfig, args) -> int:
    profile = cfg.require_profile()
    section = cfg.threshold
    precision = section.get("precision_db", 0.02)
    bracket = (section.get("bracket_low_db", 0.0),
               section.get("bracket_high_db", 1.5))
    result = find_threshold(profile, precision_db=precision,
                            config=cfg.de_config(), seed=args.seed,
                            bracket_db=bracket)
    rows = [(_profile_id(profile), result.threshold_db, result.precision_db,
             db, verdict) for db, verdict in result.probes]
    _write_csv(args.out / "threshold.csv",
               _meta(args, "threshold", bracket_low_db=bracket[0],
                     bracket_high_db=bracket[1]),
               ["ensemble_id", "threshold_db", "precision_db", "probe_db",
                "probe_verdict"], rows)
    print(f"threshold {result.threshold_db:.4f} dB "
          f"(+/- {result.precision_db} dB)")
    return 0


def cmd_evolve(cfg: ExperimentConfig, args) -> int:
    profile = cfg.require_profile()
    if "ebn0_db" not in cfg.evolve:
        raise ConfigError("[evolve] needs ebn0_db")
    ebn0_db = cfg.evolve["ebn0_db"]
    gains = cfg.evolve.get("gains")
    if gains is not None and len(gains) != 2:
        raise ConfigError("[evolve] gains needs exactly two values")
    de = cfg.de_config()
    if gains is None:
        result = evolve_awgn(profile, ebn0_db, de, seed=args.seed)
        channel = "awgn"
    else:
        result = evolve_fading(profile, tuple(gains), ebn0_db, de,
                               seed=args.seed)
        channel = f"fading {gains[0]:g} {gains[1]:g}"
    rows = [(step.iteration, step.error_probability) for step in result.steps]
    _write_csv(args.out / "evolve.csv",
               _meta(args, "evolve", ensemble_id=_profile_id(profile),
                     ebn0_db=ebn0_db, channel=channel,
                     verdict=result.verdict),
               ["iteration", "error_probability"], rows)
    print(f"{result.verdict} after {result.iterations} iterations, "
          f"final error {result.final_error:.3e}")
    return 0


def cmd_boundary(cfg: ExperimentConfig, args) -> int:
    profile = cfg.require_profile()
    section = cfg.boundary
    ebn0_db = section.get("ebn0_db", 8.0)
    angles = default_ray_angles(section.get("rays", 17))
    cap = section.get("radius_cap", 8.0)
    precision = section.get("radius_precision", 0.05)
    include_axes = section.get("include_axes", True)
    de = cfg.de_config()

    info = {p.angle_deg: p.radius
            for p in information_outage_boundary(ebn0_db, angles, cap=cap)}
    ensembles = [profile]
    if section.get("compare_regular", False):
        ensembles.append(validate_profile(_REGULAR))
    rows = []
    for ensemble in ensembles:
        points = deo_boundary(ensemble, ebn0_db, angles, de, seed=args.seed,
                              cap=cap, precision=precision,
                              include_axes=include_axes)
        rows.extend((point.angle_deg, info.get(point.angle_deg),
                     point.radius, _profile_id(ensemble), ebn0_db)
                    for point in points)
    _write_csv(args.out / "boundary.csv",
               _meta(args, "boundary", radius_cap=cap,
                     radius_precision=precision),
               ["angle_deg", "radius_info_outage", "radius_deo",
                "ensemble_id", "ebn0_db"], rows)
    print(f"{len(rows)} boundary points at {ebn0_db} dB")
    return 0


def cmd_pdeo(cfg: ExperimentConfig, args) -> int:
    profile = cfg.require_profile()
    section = cfg.pdeo
    ebn0_db = section.get("ebn0_db", 8.0)
    report = p_deo(profile, ebn0_db, samples=section.get("samples", 500),
                   config=cfg.de_config(), seed=args.seed,
                   audit_samples=section.get("audit_samples", 50))
    est = report.estimate
    _write_csv(args.out / "pdeo.csv",
               _meta(args, "pdeo", ensemble_id=_profile_id(profile),
                     ebn0_db=ebn0_db, audit_samples=report.audit_samples,
                     audit_mismatches=report.audit_mismatches),
               ["value", "ci95", "samples", "seed"],
               [(est.probability, est.ci95_half_width, est.samples,
                 args.seed)])
    print(f"P_deo {est.probability:.4g} +/- {est.ci95_half_width:.2g} "
          f"({report.audit_mismatches}/{report.audit_samples} audit "
          f"corrections)")
    return 0


def cmd_outage(cfg: ExperimentConfig, args) -> int:
    section = cfg.outage
    if "ebn0_db" not in section:
        raise ConfigError("[outage] needs an ebn0_db grid")
    samples = section.get("samples", 1_000_000)
    rows = []
    for db in section["ebn0_db"]:
        est = outage_probability_bpsk(db, samples=samples, seed=args.seed)
        rows.append((db, est.probability, est.ci95_half_width, est.samples,
                     args.seed))
    _write_csv(args.out / "outage.csv", _meta(args, "outage"),
               ["ebn0_db", "value", "ci95", "samples", "seed"], rows)
    print(f"{len(rows)} outage points")
    return 0


def _build_instance(cfg: ExperimentConfig):
    profile = cfg.require_profile()
    return build_code(profile, cfg.code.get("k", 6000),
                      cfg.code.get("build_seed", 1))


def cmd_simulate(cfg: ExperimentConfig, args) -> int:
    section = cfg.simulate
    if "ebn0_db" not in section:
        raise ConfigError("[simulate] needs an ebn0_db grid")
    code = _build_instance(cfg)
    stop = StopRule(section.get("min_word_errors", 100),
                    section.get("max_frames", 1_000_000))
    result = run_wer_sweep(code, section["ebn0_db"],
                           mode=section.get("mode", "fading"), stop=stop,
                           seed=args.seed,
                           max_iters=cfg.code.get("decoder_iterations", 50))
    rows = [(row.ebn0_db, row.frames, row.word_errors, row.bit_errors,
             row.wer, row.ber, row.wer_ci95, row.mean_iterations, row.seed)
            for row in result.rows]
    _write_csv(args.out / "simulate.csv",
               _meta(args, "simulate", ensemble_id=_profile_id(code.profile),
                     k=code.k, mode=result.mode),
               ["ebn0_db", "frames", "word_errors", "bit_errors", "wer",
                "ber", "wer_ci95", "mean_iterations", "seed"], rows)
    sidecar = {
        "command": "simulate",
        "version": __version__,
        "config": config_hash(args.config),
        "code_instance": hashlib.sha256(
            code_to_text(code).encode()).hexdigest()[:16],
        "k": code.k,
        "mode": result.mode,
        "seed": args.seed,
    }
    (args.out / "simulate.meta.json").write_text(
        json.dumps(sidecar, indent=2, sort_keys=True) + "\n")
    worst = max(row.wer for row in result.rows)
    print(f"{len(rows)} points simulated, worst WER {worst:.3g}")
    return 0


def cmd_audit(cfg: ExperimentConfig, args) -> int:
    code = _build_instance(cfg)
    if cfg.audit.get("sabotage", False):
        code = sabotage_multiplexer(code)
    report = run_erasure_audit(code, cfg.audit.get("trials", 200),
                               seed=args.seed)
    rows = [(f.trial, f.erased_block, f.bit_mismatches, f.frame_seed)
            for f in report.failures]
    _write_csv(args.out / "audit.csv",
               _meta(args, "audit", ensemble_id=_profile_id(code.profile),
                     k=code.k, trials=report.trials,
                     sabotage=cfg.audit.get("sabotage", False),
                     passed=report.passed),
               ["trial", "erased_block", "bit_mismatches", "frame_seed"],
               rows)
    verdict = "passed" if report.passed else \
        f"FAILED {len(report.failures)} of {2 * report.trials} decodings"
    print(f"erasure audit {verdict} ({report.trials} trials, both blocks)")
    return 0


_COMMANDS = {
    "params": cmd_params,
    "threshold": cmd_threshold,
    "evolve": cmd_evolve,
    "boundary": cmd_boundary,
    "pdeo": cmd_pdeo,
    "outage": cmd_outage,
    "simulate": cmd_simulate,
    "audit": cmd_audit,
}


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="turbofade",
        description="Irregular self-concatenated turbo codes on block "
                    "fading: density evolution, outage geometry, Monte "
                    "Carlo.")
    shared = argparse.ArgumentParser(add_help=False)
    shared.add_argument("--config", required=True, type=Path,
                        help="experiment config file")
    shared.add_argument("--seed", type=int, default=0,
                        help="root seed for every random draw (default 0)")
    shared.add_argument("--workers", type=int, default=1,
                        help="worker budget hint, recorded in outputs; "
                             "runs are sequential either way")
    shared.add_argument("--out", type=Path, default=Path("."),
                        help="output directory (default .)")
    shared.add_argument("--dry-run", action="store_true",
                        help="validate the config, print derived code "
                             "parameters, compute nothing")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in _COMMANDS:
        sub.add_parser(name, parents=[shared])
    return parser


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        if args.seed < 0:
            raise ConfigError("--seed must be nonnegative")
        if args.workers < 1:
            raise ConfigError("--workers must be positive")
        cfg = load_config(args.config)
        if args.dry_run:
            if cfg.profile is not None:
                print(_params_table(cfg))
            cfg.de_config()
            print("config ok")
            return 0
        args.out.mkdir(parents=True, exist_ok=True)
        return _COMMANDS[args.command](cfg, args)
    except (ConfigError, ProfileError, LayoutError, ValueError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except KeyboardInterrupt:
        raise
    except Exception as exc:
        print(f"runtime failure: {type(exc).__name__}: {exc}",
              file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
