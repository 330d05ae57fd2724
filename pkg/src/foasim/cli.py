"""Command-line surface for dataset generation and verification.

Every subcommand prints a machine-readable JSON summary on stdout and
progress on stderr, and exits nonzero on invalid input or failed items so
the tool composes cleanly in shell pipelines.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import sys

import numpy as np

from foasim import pipeline
from foasim.dataio import PipelineConfig, read_manifest


def _fail(message: str) -> int:
    print(json.dumps({"error": message}), file=sys.stderr)
    return 2


def _load_config(args) -> PipelineConfig:
    config = (PipelineConfig.from_file(args.config) if args.config
              else PipelineConfig())
    overrides = {}
    for field in dataclasses.fields(PipelineConfig):
        flag = getattr(args, f"cfg_{field.name}", None)
        if flag is not None:
            overrides[field.name] = flag
    if overrides:
        config = PipelineConfig.from_dict({**config.to_dict(), **overrides})
    return config


def _add_config_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", help="JSON file of pipeline settings")
    group = parser.add_argument_group("config overrides")
    for field in dataclasses.fields(PipelineConfig):
        flag = "--" + field.name.replace("_", "-")
        kind = int if field.type == "int" else float
        group.add_argument(flag, dest=f"cfg_{field.name}", type=kind,
                           default=None, help=f"override {field.name}")


def _cmd_gen_irs(args) -> int:
    ids = pipeline.generate_ir_archive(
        args.out, args.count, args.seed,
        rt60_band=(args.rt60_min, args.rt60_max))
    print(json.dumps({"irs": len(ids), "out": str(args.out)}))
    return 0


def _cmd_spatialise(args) -> int:
    config = _load_config(args)
    summary = pipeline.run_spatialise(args.corpus, args.out, args.seed,
                                      config=config, ir_dir=args.irs,
                                      num_workers=args.workers)
    print(json.dumps(summary.to_dict(), sort_keys=True))
    return 1 if summary.num_failed else 0


def _cmd_mix(args) -> int:
    summary = pipeline.run_mix(args.manifest, args.out, args.seed,
                               noise_dir=args.noise, ir_dir=args.irs,
                               num_workers=args.workers)
    print(json.dumps(summary.to_dict(), sort_keys=True))
    return 1 if summary.num_failed else 0


def _cmd_labelgen(args) -> int:
    written = pipeline.regenerate_labels(args.manifest, args.out)
    print(json.dumps({"labels_written": written, "out": str(args.out)}))
    return 0


def _cmd_verify(args) -> int:
    ok, checks = pipeline.verify_dataset(args.dataset, noise_dir=args.noise,
                                         ir_dir=args.irs,
                                         deep_items=args.deep,
                                         seed=args.seed)
    for check in checks:
        print(json.dumps(check, sort_keys=True))
    print(json.dumps({"verified": ok}))
    return 0 if ok else 1


def _cmd_stats(args) -> int:
    header, records = read_manifest(args.manifest)
    ok = [r for r in records if r["status"] == "ok"]
    branches = [r.get("branch") for r in ok]
    mixes = [r["mix"] for r in ok if r.get("mix")]
    snrs = [m["snr_db"] for m in mixes]
    rate = header.get("config", {}).get("sample_rate_hz", 16000)
    out = {
        "items": len(records),
        "failed": len(records) - len(ok),
        "stationary": branches.count("stationary"),
        "moving": branches.count("moving"),
        "mixed": len(mixes),
        "mixed_noise": sum(1 for m in mixes if m["kind"] == "noise"),
        "mixed_speech": sum(1 for m in mixes if m["kind"] == "speech"),
        "snr_db": (None if not snrs else
                   {"min": round(min(snrs), 3), "max": round(max(snrs), 3),
                    "mean": round(float(np.mean(snrs)), 3)}),
        "audio_seconds": round(sum(r.get("num_samples", 0)
                                   for r in ok) / rate, 3),
    }
    print(json.dumps(out, sort_keys=True))
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="foasim",
        description="Simulated FOA training data with direction-of-arrival "
                    "labels")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen-irs", help="generate an impulse-response archive")
    p.add_argument("--count", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.add_argument("--rt60-min", type=float, default=0.1)
    p.add_argument("--rt60-max", type=float, default=1.2)
    p.set_defaults(func=_cmd_gen_irs)

    p = sub.add_parser("spatialise",
                       help="spatialise a mono corpus into FOA plus labels")
    p.add_argument("--corpus", required=True, help="directory of mono WAVs")
    p.add_argument("--out", required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--irs", help="impulse-response archive directory")
    p.add_argument("--workers", type=int, default=1)
    _add_config_flags(p)
    p.set_defaults(func=_cmd_spatialise)

    p = sub.add_parser("mix", help="mix interferers into a spatialised dataset")
    p.add_argument("--manifest", required=True,
                   help="manifest written by spatialise")
    p.add_argument("--out", required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--noise", help="directory of mono noise WAVs")
    p.add_argument("--irs", help="impulse-response archive directory")
    p.add_argument("--workers", type=int, default=1)
    p.set_defaults(func=_cmd_mix)

    p = sub.add_parser("labelgen",
                       help="regenerate label files from a manifest")
    p.add_argument("--manifest", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_labelgen)

    p = sub.add_parser("verify", help="run the invariant suite on a dataset")
    p.add_argument("--dataset", required=True)
    p.add_argument("--noise")
    p.add_argument("--irs")
    p.add_argument("--deep", type=int, default=0,
                   help="regenerate this many items from their seeds")
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=_cmd_verify)

    p = sub.add_parser("stats", help="summarise a manifest")
    p.add_argument("--manifest", required=True)
    p.set_defaults(func=_cmd_stats)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, FileNotFoundError, KeyError) as exc:
        return _fail(f"{type(exc).__name__}: {exc}")


if __name__ == "__main__":
    sys.exit(main())
