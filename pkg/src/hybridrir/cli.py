"""Command-line front end.

Subcommands::

    hybridrir generate  --config cfg.yaml --out DIR [--seed N] [--workers N] [--resume]
    hybridrir generate  --manifest DIR/manifest.json --out DIR2
    hybridrir synth     --room L W H --t60 T --source X Y Z --mic-center X Y Z out.wav
    hybridrir verify    DIR | rir.wav --meta rir.json
    hybridrir features  DIR --clips CLIP_DIR --out FEAT_DIR [--seed N]

Exit codes: 0 success, 2 usage, 3 config error, 4 infeasible DRR,
5 verification failure, 6 bad input data.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import logging
import math
import os
import sys
from pathlib import Path

import numpy as np
import yaml

from . import __version__
from .analysis import estimate_t60, measure_drr, schroeder_edc
from .core import DirectivityPattern, MicPair, Room, Scene, Source, SynthConfig
from .errors import (ConfigError, EstimationError, InfeasibleDrrError, RirError,
                     SamplerError, SignalError)
from .sampler import SamplerConfig, derive_seed, generate_dataset
from .signals import AudioClip, read_wav, render_mics, stft_features, write_features, write_wav
from .synth import drr_augment, synthesize, synthesize_ism_only

log = logging.getLogger("hybridrir")

EXIT_OK, EXIT_USAGE, EXIT_CONFIG, EXIT_INFEASIBLE, EXIT_VERIFY, EXIT_DATA = 0, 2, 3, 4, 5, 6
WORKERS_ENV = "HYBRIDRIR_WORKERS"
METADATA = "metadata.jsonl"
MANIFEST = "manifest.json"


class UsageError(Exception):
    """Command-line arguments are incomplete."""


# ---------------------------------------------------------------- config

def synth_config_from_dict(data: dict) -> SynthConfig:
    known = set(SynthConfig.field_names())
    for key in data:
        if key not in known:
            raise ConfigError(f"synth.{key}", "unknown field")
    try:
        return SynthConfig(**data)
    except (ValueError, TypeError) as exc:
        name = str(exc).split(":")[0].replace("invalid ", "").strip()
        path = f"synth.{name}" if name in known else "synth"
        raise ConfigError(path, str(exc))


def load_config(path) -> tuple[SamplerConfig, SynthConfig]:
    """Read a YAML (or JSON) file with optional ``sampler`` and ``synth`` sections."""
    try:
        data = yaml.safe_load(Path(path).read_text()) or {}
    except yaml.YAMLError as exc:
        raise ConfigError("<file>", f"not valid YAML: {exc}")
    if not isinstance(data, dict):
        raise ConfigError("<root>", "expected a mapping")
    unknown = set(data) - {"sampler", "synth"}
    if unknown:
        raise ConfigError(sorted(unknown)[0], "unknown section")
    try:
        sampler = SamplerConfig.from_dict(data.get("sampler") or {})
    except TypeError as exc:
        raise ConfigError("sampler", str(exc))
    return sampler, synth_config_from_dict(data.get("synth") or {})


# ---------------------------------------------------------------- helpers

def sha256(path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 20), b""):
            h.update(chunk)
    return h.hexdigest()


def record_dir(room_idx: int, const_idx: int) -> str:
    return f"room_{room_idx:05d}/const_{const_idx:02d}"


def _read_metadata(path: Path):
    lines = path.read_text().splitlines() if path.exists() else []
    return [json.loads(line) for line in lines if line.strip()]


def _default_workers() -> int:
    return int(os.environ.get(WORKERS_ENV, "1"))


# ---------------------------------------------------------------- generate

def cmd_generate(args) -> int:
    if args.manifest:
        manifest = json.loads(Path(args.manifest).read_text())
        sampler = SamplerConfig.from_dict(manifest["config"]["sampler"])
        synth_cfg = synth_config_from_dict(manifest["config"]["synth"])
    elif args.config:
        sampler, synth_cfg = load_config(args.config)
    else:
        raise UsageError("either --config or --manifest is required")
    if args.seed is not None:
        sampler = SamplerConfig.from_dict({**sampler.to_dict(), "seed": args.seed})

    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    meta_path = out / METADATA
    start = 0
    if args.resume and meta_path.exists():
        # keep only complete lines; a record cut off mid-write is regenerated
        text = meta_path.read_text()
        done = text[:text.rfind("\n") + 1]
        start = len(done.splitlines())
        meta_path.write_text(done)
        log.info("resuming at record %d", start)
    else:
        meta_path.write_text("")

    with open(meta_path, "a") as meta:
        for rec in generate_dataset(sampler, synth_cfg, workers=args.workers, start=start):
            rel = record_dir(rec.room_idx, rec.constellation_idx)
            (out / rel).mkdir(parents=True, exist_ok=True)
            entry = rec.metadata()
            for m, rir in enumerate(rec.rirs):
                name = f"{rel}/mic{m}.wav"
                write_wav(out / name, rir.samples, rir.fs)
                entry["mics"][m]["file"] = name
            meta.write(json.dumps(entry) + "\n")
            meta.flush()

    records = _read_metadata(meta_path)
    files = [m["file"] for r in records for m in r["mics"]] + [METADATA]
    manifest = {
        "tool": "hybridrir",
        "version": __version__,
        "config": {"sampler": sampler.to_dict(), "synth": synth_cfg.to_dict()},
        "seed": sampler.seed,
        "records": len(records),
        "checksums": {f: sha256(out / f) for f in files},
    }
    (out / MANIFEST).write_text(json.dumps(manifest, indent=2) + "\n")
    print(f"wrote {len(records)} records to {out}")
    return EXIT_OK


# ---------------------------------------------------------------- synth

def _scene_from_args(args) -> Scene:
    if args.scene:
        return Scene.from_dict(json.loads(Path(args.scene).read_text()))
    missing = [f for f in ("room", "t60", "source") if getattr(args, f) is None]
    if args.mics is None and args.mic_center is None:
        missing.append("mics or mic_center")
    if missing:
        raise UsageError(f"--{missing[0].replace('_', '-')} is required without --scene")
    room = Room(*args.room, args.t60)
    source = Source(args.source, math.radians(args.look_az), math.radians(args.look_el),
                    DirectivityPattern.named(args.pattern))
    if args.mics is not None:
        p = args.mics
        mics = MicPair((tuple(p[:3]), tuple(p[3:])), math.radians(args.orientation))
    else:
        mics = MicPair.from_center(args.mic_center, math.radians(args.orientation), args.spacing)
    return Scene(room, source, mics)


def cmd_synth(args) -> int:
    scene = _scene_from_args(args)
    overrides = {"fs": args.fs, "n_samples": args.length, "image_order": args.order}
    cfg = SynthConfig(**{k: v for k, v in overrides.items() if v is not None})
    rng = np.random.default_rng(args.seed)
    if args.method == "proposed":
        rirs = synthesize(scene, cfg, rng, alpha=args.alpha, seed=args.seed)
    else:
        order = cfg.image_order if args.order is not None else args.ism_order
        rirs = [synthesize_ism_only(scene, cfg, order, m) for m in range(2)]
        if args.method == "drr-aug":
            mode = {"target": "target_eq4", "random": "random_scale"}[args.aug_mode]
            alpha = args.alpha
            if mode == "target_eq4" and alpha is None:
                alpha = float(rng.uniform(*cfg.alpha_range))
            rirs = [drr_augment(r, scene, mode, rng, cfg, alpha=alpha) for r in rirs]
    write_wav(args.out, np.stack([r.samples for r in rirs], axis=1), cfg.fs)
    meta = {
        "file": str(args.out),
        "scene": scene.to_dict(),
        "synth": cfg.to_dict(),
        "mics": [r.metadata() for r in rirs],
    }
    json.dump(meta, sys.stdout, indent=2)
    sys.stdout.write("\n")
    return EXIT_OK


# ---------------------------------------------------------------- verify

def _check_rir(h, mic_meta, scene, cfg, drr_tol, t60_tol):
    m = mic_meta["mic_index"]
    expected_nd = int(round(scene.mic_distance(m) * cfg.fs / cfg.speed_of_sound))
    row = {"mic": m, "n_d": mic_meta["n_d"], "n_d_ok": mic_meta["n_d"] == expected_nd}
    target = mic_meta.get("target_drr")
    try:
        drr = measure_drr(h, mic_meta["n_d"], cfg.drr_window)
    except RirError:
        drr = 0.0
    row["target_drr"], row["measured_drr"] = target, drr
    row["drr_ok"] = True if target is None else abs(drr / target - 1.0) < drr_tol
    try:
        est = estimate_t60(schroeder_edc(h, cfg.fs))
    except (EstimationError, ValueError):
        est = float("nan")
    row["t60"], row["t60_est"] = scene.room.t60, est
    row["t60_ok"] = bool(abs(est / scene.room.t60 - 1.0) <= t60_tol)
    row["pass"] = bool(row["n_d_ok"] and row["drr_ok"])
    return row


def verify_records(records, cfg, load, drr_tol=1e-6, t60_tol=0.1):
    rows = []
    for rec in records:
        scene = Scene.from_dict(rec["scene"])
        for mic in rec["mics"]:
            h = load(rec, mic)
            row = _check_rir(h, mic, scene, cfg, drr_tol, t60_tol)
            row["record"] = rec.get("record", f"{rec.get('room_idx', 0)}/{rec.get('constellation_idx', 0)}")
            rows.append(row)
    return rows


def _print_report(rows, as_json: bool):
    if as_json:
        for r in rows:
            print(json.dumps(r))
        return
    print(f"{'record':>12} {'mic':>3} {'n_d':>6} {'target':>10} {'measured':>10} "
          f"{'t60':>6} {'t60_est':>7}  result")
    for r in rows:
        target = "-" if r["target_drr"] is None else f"{r['target_drr']:.5g}"
        print(f"{r['record']:>12} {r['mic']:>3} {r['n_d']:>6} {target:>10} "
              f"{r['measured_drr']:>10.5g} {r['t60']:>6.3f} {r['t60_est']:>7.3f}  "
              f"{'PASS' if r['pass'] else 'FAIL'}")
    n = len(rows)
    print(f"\nrirs: {n}  drr match: {sum(r['drr_ok'] for r in rows)}/{n}  "
          f"n_d match: {sum(r['n_d_ok'] for r in rows)}/{n}  "
          f"t60 within tolerance: {sum(r['t60_ok'] for r in rows)}/{n} (informational)")


def cmd_verify(args) -> int:
    path = Path(args.path)
    if path.is_dir():
        records = _read_metadata(path / METADATA)
        if not records:
            raise SignalError(f"no records found in {path}")
        manifest = json.loads((path / MANIFEST).read_text())
        cfg = synth_config_from_dict(manifest["config"]["synth"])
        load = lambda rec, mic: read_wav(path / mic["file"])[0]
    else:
        meta_path = Path(args.meta) if args.meta else path.with_suffix(".json")
        if not meta_path.exists():
            raise SignalError(f"metadata {meta_path} not found (use --meta)")
        meta = json.loads(meta_path.read_text())
        cfg = synth_config_from_dict(meta["synth"])
        data = read_wav(path)[0]
        data = data[:, None] if data.ndim == 1 else data
        records = [{**meta, "record": path.name}]
        load = lambda rec, mic: data[:, mic["mic_index"]]
    rows = verify_records(records, cfg, load, args.drr_tol, args.t60_tol)
    _print_report(rows, args.json)
    return EXIT_OK if all(r["pass"] for r in rows) else EXIT_VERIFY


# ---------------------------------------------------------------- features

def _clip_paths(items):
    paths = []
    for item in items:
        p = Path(item)
        if p.is_dir():
            paths += sorted(p.glob("*.wav"))
        elif p.suffix == ".txt":
            paths += [Path(line.strip()) for line in p.read_text().splitlines() if line.strip()]
        else:
            paths.append(p)
    if not paths:
        raise SignalError("no clips given")
    return paths


def cmd_features(args) -> int:
    data_dir, out = Path(args.dataset), Path(args.out)
    records = _read_metadata(data_dir / METADATA)
    if not records:
        raise SignalError(f"no records found in {data_dir}")
    clips = []
    for p in _clip_paths(args.clips):
        x, fs = read_wav(p)
        clips.append(AudioClip(x if x.ndim == 1 else x[:, 0], fs))
    out.mkdir(parents=True, exist_ok=True)
    labels = ["index,room_idx,constellation_idx,class,distance"]
    for i, rec in enumerate(records):
        rng = np.random.default_rng(derive_seed(args.seed, i))
        rirs = []
        for mic in rec["mics"]:
            h, fs = read_wav(data_dir / mic["file"])
            rirs.append(AudioClip(h, fs))
        clip = clips[int(rng.integers(len(clips)))]
        if clip.fs != rirs[0].fs:
            raise SignalError(f"clip rate {clip.fs} Hz does not match dataset rate {rirs[0].fs} Hz")
        n = int(round(args.duration * clip.fs))
        if len(clip.samples) < n:
            raise SignalError(f"clip shorter than {args.duration} s")
        offset = int(rng.integers(0, len(clip.samples) - n + 1))
        snr = float(rng.uniform(args.snr_min, args.snr_max))
        pair = render_mics(rirs, clip, snr, args.duration, rng, offset=offset)
        stem = f"rec_{i:06d}"
        write_wav(out / f"{stem}.wav", np.stack([c.samples for c in pair], axis=1), clip.fs)
        write_features(out / f"{stem}.f32", stft_features(pair))
        labels.append(f"{i},{rec['room_idx']},{rec['constellation_idx']},{rec['class']},{rec['distance']!r}")
    (out / "labels.csv").write_text("\n".join(labels) + "\n")
    print(f"wrote features for {len(records)} records to {out}")
    return EXIT_OK


# ---------------------------------------------------------------- main

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="hybridrir", description=__doc__.split("\n")[0])
    p.add_argument("--version", action="version", version=__version__)
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    g = sub.add_parser("generate", help="simulate a training data set")
    g.add_argument("--config", help="YAML/JSON config with sampler and synth sections")
    g.add_argument("--manifest", help="reproduce the run described by a manifest")
    g.add_argument("--out", required=True)
    g.add_argument("--seed", type=int)
    g.add_argument("--workers", type=int, default=_default_workers())
    g.add_argument("--resume", action="store_true", help="continue an interrupted run")
    g.set_defaults(func=cmd_generate)

    s = sub.add_parser("synth", help="synthesize the RIRs of one scene")
    s.add_argument("out")
    s.add_argument("--scene", help="scene JSON (as in dataset metadata)")
    s.add_argument("--room", type=float, nargs=3, metavar=("L", "W", "H"))
    s.add_argument("--t60", type=float)
    s.add_argument("--source", type=float, nargs=3, metavar=("X", "Y", "Z"))
    s.add_argument("--look-az", type=float, default=0.0, help="degrees")
    s.add_argument("--look-el", type=float, default=0.0, help="degrees")
    s.add_argument("--pattern", default="cardioid")
    s.add_argument("--mics", type=float, nargs=6, metavar="XYZ")
    s.add_argument("--mic-center", type=float, nargs=3, metavar=("X", "Y", "Z"))
    s.add_argument("--orientation", type=float, default=0.0, help="degrees")
    s.add_argument("--spacing", type=float, default=0.08)
    s.add_argument("--method", choices=["proposed", "ism", "drr-aug"], default="proposed")
    s.add_argument("--order", type=int, help="image order of the early part")
    s.add_argument("--ism-order", type=int, default=20, help="order for ism/drr-aug baselines")
    s.add_argument("--aug-mode", choices=["target", "random"], default="target")
    s.add_argument("--alpha", type=float)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--fs", type=float)
    s.add_argument("--length", type=int)
    s.set_defaults(func=cmd_synth)

    v = sub.add_parser("verify", help="check DRR, delay and T60 of generated RIRs")
    v.add_argument("path", help="dataset directory or WAV file")
    v.add_argument("--meta", help="metadata JSON for a single WAV")
    v.add_argument("--drr-tol", type=float, default=1e-6)
    v.add_argument("--t60-tol", type=float, default=0.1)
    v.add_argument("--json", action="store_true", help="one JSON record per line")
    v.set_defaults(func=cmd_verify)

    f = sub.add_parser("features", help="render microphone signals and STFT features")
    f.add_argument("dataset")
    f.add_argument("--clips", nargs="+", required=True, help="WAV files, directories or .txt lists")
    f.add_argument("--out", required=True)
    f.add_argument("--snr-min", type=float, default=40.0)
    f.add_argument("--snr-max", type=float, default=60.0)
    f.add_argument("--duration", type=float, default=1.0)
    f.add_argument("--seed", type=int, default=0)
    f.set_defaults(func=cmd_features)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        print(f"{parser.prog}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except InfeasibleDrrError as exc:
        print(f"infeasible: {exc} (requested {exc.requested:.6g}, "
              f"attainable bound {exc.attainable:.6g})", file=sys.stderr)
        return EXIT_INFEASIBLE
    except (SignalError, SamplerError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except RirError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
