#!/usr/bin/env python
# -*- coding: utf-8 -*-
# License: BSD-3 (https://tldrlegal.com/license/bsd-3-clause-license-(revised))
# Copyright (c) 2025, facedrive developers
# All rights reserved.

# =============================================================================
# DOCS
# =============================================================================

"""Command line interface of facedrive.

Every command prints its effective configuration as one JSON line on
stdout before working. Exit codes: 0 success, 2 configuration or input
error, 3 I/O error.

"""

# =============================================================================
# IMPORTS
# =============================================================================

import argparse
import json
import logging
import pathlib
import sys
from dataclasses import dataclass, field

import numpy as np

import pandas as pd

from tqdm import tqdm

from . import VERSION
from .container import TensorContainer
from .core import (
    ClipBundle,
    FaceModelAssets,
    generate_synthetic_assets,
    generate_synthetic_corpus,
)
from .diffusion import SHIFT_MODES, SPACINGS, DDIMSampler, add_noise
from .drivermap import (
    DriverMapMode,
    build_driver_map,
    encode_template,
    save_image,
)
from .drivermap.plot import CHANNEL_CMAP, MAGNITUDE_CMAP
from .metrics import (
    DELTA_CONVENTIONS,
    ExpressionFollow,
    HEFCalibrator,
    HeadPoseFollow,
    MetricReport,
    REPORT_SCHEMA_VERSION,
)
from .model import evaluate_mesh
from .render import depth_image, face_index_image, write_pgm
from .utils import atomic_write

# =============================================================================
# CONSTANTS
# =============================================================================

EXIT_OK = 0

EXIT_CONFIG = 2

EXIT_IO = 3

#: Encoding channels written by ``render-map --viz``: sin x at the lowest
#: and at the highest octave.
VIZ_CHANNELS = {"pe_low": 0, "pe_high": 6}

logger = logging.getLogger("facedrive")


# =============================================================================
# RUN CONFIG
# =============================================================================


@dataclass(frozen=True)
class RunConfig:
    """Effective configuration of one CLI run."""

    command: str
    flags: dict = field(default_factory=dict)
    version: str = VERSION

    @classmethod
    def from_namespace(cls, namespace):
        """Build from parsed arguments."""
        flags = {
            key: value
            for key, value in sorted(vars(namespace).items())
            if key not in ("command", "handler")
        }
        return cls(command=namespace.command, flags=flags, version=VERSION)

    def to_json(self):
        """One-line JSON representation."""
        data = {
            "command": self.command,
            "flags": self.flags,
            "version": self.version,
        }
        return json.dumps(data, sort_keys=True, default=str)


# =============================================================================
# ARGUMENT TYPES
# =============================================================================


def resolution(text):
    """Parse ``WxH`` into ``(width, height)``."""
    try:
        width, height = (int(part) for part in text.lower().split("x"))
    except ValueError:
        raise argparse.ArgumentTypeError(
            f"expected WIDTHxHEIGHT, found {text!r}"
        )
    if width < 1 or height < 1:
        raise argparse.ArgumentTypeError(f"invalid resolution {text!r}")
    return width, height


def positive_int(text):
    """Parse a strictly positive integer."""
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError(f"expected >= 1, found {value}")
    return value


def latent_shape(text):
    """Parse ``AxBxC`` into a shape tuple."""
    try:
        shape = tuple(int(part) for part in text.lower().split("x"))
    except ValueError:
        raise argparse.ArgumentTypeError(f"invalid shape {text!r}")
    if not shape or min(shape) < 1:
        raise argparse.ArgumentTypeError(f"invalid shape {text!r}")
    return shape


# =============================================================================
# HELPERS
# =============================================================================


def _progress(args, iterable=None, **kwargs):
    return tqdm(iterable, disable=args.quiet, file=sys.stderr, **kwargs)


def _load_clip(path, assets, resolution_override=None):
    clip = ClipBundle.load(path, n_beta=assets.n_beta, n_psi=assets.n_psi)
    if resolution_override is not None:
        camera = clip.camera.with_resolution(*resolution_override)
        clip = clip.replace(camera=camera)
    return clip


def _clip_paths(path):
    path = pathlib.Path(path)
    if path.is_dir():
        paths = sorted(path.glob("*.json"))
        if not paths:
            raise ValueError(f"no clip bundle found in {path}")
        return {p.stem: p for p in paths}
    return {path.stem: path}


def _frames(clip, frame):
    if frame is None:
        return list(range(clip.n_frames))
    if not 0 <= frame < clip.n_frames:
        raise ValueError(
            f"frame {frame} out of range for a clip of {clip.n_frames} frames"
        )
    return [frame]


def _map_path(out, index, single):
    out = pathlib.Path(out)
    if single:
        return out
    out.mkdir(parents=True, exist_ok=True)
    return out / f"frame_{index:04d}.lka"


def _write_viz(driver_maps, paths):
    """Magnitude and encoding PNGs plus the shared magnitude range."""
    vmax = max(float(dm.magnitude.max()) for dm in driver_maps) or 1.0
    for driver_map, path in zip(driver_maps, paths):
        stem = path.with_suffix("")
        save_image(
            f"{stem}_magnitude.png",
            driver_map.magnitude,
            MAGNITUDE_CMAP,
            0.0,
            vmax,
        )
        for name, channel in VIZ_CHANNELS.items():
            save_image(
                f"{stem}_{name}.png",
                driver_map.tensor[channel],
                CHANNEL_CMAP,
                -1.0,
                1.0,
            )
    sidecar = paths[0].parent / "viz.json"
    with atomic_write(sidecar, "w", encoding="utf-8") as fp:
        json.dump(
            {
                "magnitude_max": vmax,
                "magnitude_cmap": MAGNITUDE_CMAP,
                "channel_cmap": CHANNEL_CMAP,
                "channels": VIZ_CHANNELS,
            },
            fp,
            indent=1,
        )


# =============================================================================
# COMMANDS
# =============================================================================


def cmd_gen_assets(args):
    """Generate and write synthetic face-model assets."""
    assets = generate_synthetic_assets(
        seed=args.seed,
        n_vertices=args.n_vertices,
        n_beta=args.n_beta,
        n_psi=args.n_psi,
        n_joints=args.n_joints,
        inner_mouth_count=args.inner_mouth,
    )
    assets.save(args.out)
    logger.info("Wrote %r to %s", assets, args.out)


def cmd_gen_clips(args):
    """Generate a synthetic clip corpus as JSON bundles."""
    assets = FaceModelAssets.load(args.assets)
    width, height = args.resolution
    corpus = generate_synthetic_corpus(
        assets,
        args.n_clips,
        n_frames=args.n_frames,
        seed=args.seed,
        fps=args.fps,
        width=width,
        height=height,
    )
    out = pathlib.Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    for index, clip in enumerate(_progress(args, corpus, desc="clips")):
        clip.save(out / f"clip_{index:04d}.json")
    logger.info("Wrote %d clips to %s", len(corpus), out)


def cmd_eval_mesh(args):
    """Evaluate the face model on one frame and write the posed mesh."""
    assets = FaceModelAssets.load(args.assets)
    clip = _load_clip(args.clip, assets)
    (index,) = _frames(clip, args.frame)
    frame = clip.frames[index]
    mesh = evaluate_mesh(assets, clip.shape, frame.expression, frame)
    container = TensorContainer(
        {
            "vertices": mesh.vertices,
            "faces": mesh.faces.astype(np.int32),
            "expr_deformation": mesh.expr_deformation,
            "joints": mesh.joints_posed,
            "joint_transforms": mesh.joint_transforms,
        }
    )
    container.save(args.out)
    logger.info("Wrote %d vertices to %s", mesh.n_vertices, args.out)


def _render_sequence(args, assets, ref_clip, drv_clip, indices):
    encoded = encode_template(assets)
    single = args.frame is not None
    maps, paths = [], []
    digests = {"ref_hash": ref_clip.hash(), "drv_hash": drv_clip.hash()}
    for index in _progress(args, indices, desc="frames"):
        frame = drv_clip.frames[index]
        driver_map, raster = build_driver_map(
            assets,
            encoded,
            ref_clip.shape,
            frame.expression,
            frame,
            ref_clip.camera,
            args.mode,
            n_threads=args.threads,
            return_raster=True,
        )
        driver_map = driver_map.with_meta(**digests)
        path = _map_path(args.out, index, single)
        driver_map.save(path)
        if getattr(args, "debug_raster", None):
            prefix = args.debug_raster if single else (
                f"{args.debug_raster}_{index:04d}"
            )
            write_pgm(f"{prefix}_face.pgm", face_index_image(raster))
            write_pgm(f"{prefix}_depth.pgm", depth_image(raster))
        maps.append(driver_map)
        paths.append(path)
    if getattr(args, "viz", False):
        _write_viz(maps, paths)
    logger.info("Wrote %d driver maps to %s", len(maps), args.out)


def cmd_render_map(args):
    """Render the driver maps of a clip."""
    assets = FaceModelAssets.load(args.assets)
    clip = _load_clip(args.clip, assets, args.resolution)
    _render_sequence(args, assets, clip, clip, _frames(clip, args.frame))


def cmd_retarget(args):
    """Render the driver's motion on the reference identity and camera."""
    assets = FaceModelAssets.load(args.assets)
    ref_clip = _load_clip(args.ref, assets, args.resolution)
    drv_clip = _load_clip(args.drv, assets)
    args.frame = None
    _render_sequence(
        args, assets, ref_clip, drv_clip, list(range(drv_clip.n_frames))
    )


def cmd_metric(args):
    """Evaluate HPF or HEF on clip pairs and write CSV and JSON."""
    targets = _clip_paths(args.target)
    preds = _clip_paths(args.pred)
    if len(targets) != len(preds):
        raise ValueError(
            f"unpaired samples: {len(targets)} targets, {len(preds)} preds"
        )
    missing = sorted(set(targets).symmetric_difference(preds))
    if len(targets) > 1 and missing:
        raise ValueError(f"unpaired samples: {missing}")

    if args.metric == "hpf":
        assets = None
        metric = HeadPoseFollow(convention=args.convention)
    else:
        if args.assets is None:
            raise ValueError("metric hef needs --assets")
        assets = FaceModelAssets.load(args.assets)
        metric = ExpressionFollow(
            assets, articulated=args.articulated, n_threads=args.threads
        )

    reports = []
    pairs = list(zip(sorted(targets), sorted(preds)))
    for target_id, pred_id in _progress(args, pairs, desc="samples"):
        if assets is None:
            target = ClipBundle.load(targets[target_id])
            pred = ClipBundle.load(preds[pred_id])
        else:
            target = _load_clip(targets[target_id], assets, args.resolution)
            pred = _load_clip(preds[pred_id], assets, args.resolution)
        reports.append(metric.evaluate(target, pred, sample_id=target_id))

    table = pd.concat([report.to_frame() for report in reports])
    summary = MetricReport.aggregate(reports)
    summary["schema_version"] = REPORT_SCHEMA_VERSION
    summary["samples"] = [
        dict(report.summary(), sample_id=report.sample_id)
        for report in reports
    ]
    with atomic_write(f"{args.out}.csv", "w", encoding="utf-8") as fp:
        table.to_csv(fp, index=False, float_format="%.10g")
    with atomic_write(f"{args.out}.json", "w", encoding="utf-8") as fp:
        json.dump(summary, fp, indent=1)
    print(json.dumps({k: summary[k] for k in ("metric", "mean", "std", "n")}))


def cmd_calibrate(args):
    """Measure the HEF anchors of a corpus and write the table."""
    assets = FaceModelAssets.load(args.assets)
    if args.corpus is not None:
        paths = _clip_paths(args.corpus)
        corpus = [
            _load_clip(path, assets, args.resolution)
            for path in paths.values()
        ]
    else:
        width, height = args.resolution or (128, 128)
        corpus = generate_synthetic_corpus(
            assets,
            args.n_clips,
            n_frames=args.n_frames,
            seed=args.seed,
            width=width,
            height=height,
        )
    calibrator = HEFCalibrator(
        assets,
        n_pairs=args.n_pairs,
        seed=args.seed,
        near_window=args.near_window,
        percentile=args.percentile,
        n_threads=args.threads,
    )
    report = calibrator.calibrate(corpus)
    table = report.to_frame()
    with atomic_write(args.out, "w", encoding="utf-8") as fp:
        table.to_csv(fp, float_format="%.10g")
    print(table.to_string(float_format="{:.4f}".format))


def cmd_ddim_demo(args):
    """Oracle-denoiser DDIM run printing per-step reconstruction error."""
    sampler = DDIMSampler(
        n_inference=args.steps,
        n_train=args.n_train,
        zero_terminal=not args.no_zero_terminal,
        n_gen=args.n_gen,
        shift_mode=args.shift_mode,
        spacing=args.spacing,
    )
    schedule = sampler.schedule
    random = np.random.default_rng(args.seed)
    z0 = random.standard_normal(args.shape)
    eps = random.standard_normal(args.shape)
    z_T = add_noise(z0, eps, schedule, int(sampler.timesteps[0]))

    def oracle(z, t, conditional):
        alpha = schedule.alphas_cumprod[t]
        if alpha == 0:
            return z
        return (z - np.sqrt(alpha) * z0) / np.sqrt(1.0 - alpha)

    rows = []
    scale = float(np.linalg.norm(z0))

    def record(step, t, z, z0_hat):
        error = float(np.linalg.norm(z0_hat - z0)) / scale
        rows.append({"step": step, "t": int(t), "relative_error": error})

    result = sampler.sample(oracle, z_T, callback=record)
    final = float(np.linalg.norm(result - z0)) / scale
    table = pd.DataFrame(rows)
    if args.out is None:
        table.to_csv(sys.stdout, index=False, float_format="%.6e")
    else:
        with atomic_write(args.out, "w", encoding="utf-8") as fp:
            table.to_csv(fp, index=False, float_format="%.6e")
    logger.info("Final relative error %.3e", final)


# =============================================================================
# PARSER
# =============================================================================


def _common(parser, *, assets=True, mode=False, out_required=True):
    if assets:
        parser.add_argument(
            "--assets", required=True, help="face model assets (.lka)"
        )
    parser.add_argument(
        "--out", required=out_required, help="output path or prefix"
    )
    parser.add_argument("--seed", type=int, default=0, help="random seed")
    parser.add_argument(
        "--resolution",
        type=resolution,
        default=None,
        metavar="WxH",
        help="override the camera resolution",
    )
    if mode:
        parser.add_argument(
            "--mode",
            choices=[m.value for m in DriverMapMode],
            default="full",
            help="driver map channel groups",
        )


def create_parser():
    """Build the ``facedrive`` argument parser."""
    parser = argparse.ArgumentParser(
        prog="facedrive",
        description="Template-space driver maps and motion metrics.",
    )
    parser.add_argument(
        "--version", action="version", version=f"%(prog)s {VERSION}"
    )
    parser.add_argument(
        "-v",
        "--verbose",
        action="count",
        default=0,
        help="-v for INFO, -vv for DEBUG logging",
    )
    parser.add_argument(
        "--quiet", action="store_true", help="hide progress bars"
    )
    parser.add_argument(
        "--threads",
        type=positive_int,
        default=None,
        help="worker threads (overrides LOKI_THREADS)",
    )
    commands = parser.add_subparsers(dest="command", required=True)

    sub = commands.add_parser("gen-assets", help="synthetic assets")
    _common(sub, assets=False)
    sub.add_argument("--n-vertices", type=positive_int, default=5023)
    sub.add_argument("--n-beta", type=positive_int, default=150)
    sub.add_argument("--n-psi", type=positive_int, default=65)
    sub.add_argument("--n-joints", type=positive_int, default=5)
    sub.add_argument("--inner-mouth", type=int, default=200)
    sub.set_defaults(handler=cmd_gen_assets)

    sub = commands.add_parser("gen-clips", help="synthetic clip corpus")
    _common(sub)
    sub.add_argument("--n-clips", type=positive_int, default=50)
    sub.add_argument("--n-frames", type=positive_int, default=16)
    sub.add_argument("--fps", type=float, default=25.0)
    sub.set_defaults(handler=cmd_gen_clips, resolution=(128, 128))

    sub = commands.add_parser("eval-mesh", help="posed mesh of one frame")
    _common(sub)
    sub.add_argument("--clip", required=True)
    sub.add_argument("--frame", type=int, default=0)
    sub.set_defaults(handler=cmd_eval_mesh)

    sub = commands.add_parser("render-map", help="driver maps of a clip")
    _common(sub, mode=True)
    sub.add_argument("--clip", required=True)
    sub.add_argument(
        "--frame",
        type=int,
        default=None,
        help="single frame; --out is then a file, otherwise a directory",
    )
    sub.add_argument("--viz", action="store_true", help="write PNGs")
    sub.add_argument(
        "--debug-raster",
        default=None,
        metavar="PREFIX",
        help="write face index and depth PGMs",
    )
    sub.set_defaults(handler=cmd_render_map)

    sub = commands.add_parser("retarget", help="cross-identity driver maps")
    _common(sub, mode=True)
    sub.add_argument("--ref", required=True, help="reference clip bundle")
    sub.add_argument("--drv", required=True, help="driver clip bundle")
    sub.add_argument("--viz", action="store_true", help="write PNGs")
    sub.set_defaults(handler=cmd_retarget)

    sub = commands.add_parser("metric", help="HPF or HEF")
    sub.add_argument("metric", choices=["hpf", "hef"])
    _common(sub, assets=False)
    sub.add_argument("--assets", default=None, help="required for hef")
    sub.add_argument("--target", required=True, help="clip file or dir")
    sub.add_argument("--pred", required=True, help="clip file or dir")
    sub.add_argument(
        "--convention", choices=DELTA_CONVENTIONS, default="body"
    )
    sub.add_argument("--articulated", action="store_true")
    sub.set_defaults(handler=cmd_metric)

    sub = commands.add_parser("calibrate", help="HEF anchor table")
    _common(sub)
    sub.add_argument("--corpus", default=None, help="directory of clips")
    sub.add_argument("--n-clips", type=positive_int, default=50)
    sub.add_argument("--n-frames", type=positive_int, default=16)
    sub.add_argument("--n-pairs", type=positive_int, default=256)
    sub.add_argument("--near-window", type=positive_int, default=2)
    sub.add_argument("--percentile", type=float, default=99.0)
    sub.set_defaults(handler=cmd_calibrate)

    sub = commands.add_parser("ddim-demo", help="oracle DDIM sanity loop")
    sub.add_argument("--out", default=None, help="CSV path (default stdout)")
    sub.add_argument("--seed", type=int, default=0)
    sub.add_argument("--steps", type=positive_int, default=50)
    sub.add_argument("--n-train", type=positive_int, default=1000)
    sub.add_argument("--n-gen", type=positive_int, default=None)
    sub.add_argument("--spacing", choices=SPACINGS, default="trailing")
    sub.add_argument(
        "--shift-mode", choices=SHIFT_MODES, default="log_snr"
    )
    sub.add_argument("--shape", type=latent_shape, default=(4, 8, 8))
    sub.add_argument("--no-zero-terminal", action="store_true")
    sub.set_defaults(handler=cmd_ddim_demo)

    return parser


# =============================================================================
# MAIN
# =============================================================================


def main(argv=None):
    """Entry point of the ``facedrive`` command."""
    parser = create_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as err:
        return err.code

    levels = {0: logging.WARNING, 1: logging.INFO}
    level = levels.get(args.verbose, logging.DEBUG)
    logging.basicConfig(
        level=level, format="%(asctime)s %(name)s %(levelname)s %(message)s"
    )
    print(RunConfig.from_namespace(args).to_json(), flush=True)

    try:
        args.handler(args)
    except (ValueError, TypeError) as err:
        print(f"facedrive: error: {err}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as err:
        print(f"facedrive: error: {err}", file=sys.stderr)
        return EXIT_IO
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
