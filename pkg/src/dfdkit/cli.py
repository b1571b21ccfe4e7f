"""Command-line entry point exposing every pipeline stage as a subcommand.

Subcommands: synth, darkchannel, cues, mask, profile, metrics, loss, kde,
and dataset synth. Every run echoes its fully resolved configuration
(defaults included) to stderr so the run can be reproduced from the log.

Exit codes: 0 success, 1 validation error (bad flags or inconsistent
inputs), 2 I/O error (missing or malformed files), 3 partial dataset
failure.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import kde as kde_mod
from .cues import DEFAULT_THRESHOLD, LddcvMap, blur_cue_profile, lddcv, validity_mask
from .dark_channel import dark_channel
from .dataset import load_split, synthesize_dataset
from .losses import adversarial_loss_g, frequency_loss, spatial_fidelity, total_loss
from .metrics import evaluate
from .raster import (
    RAW_MAGIC,
    CameraParams,
    DepthMap,
    FileFormatError,
    ScalarMap,
    read_depth,
    read_map,
    read_rgb,
    write_map,
    write_rgb,
)
from .synth import blur_radius, synthesize_defocus

EXIT_OK = 0
EXIT_VALIDATION = 1
EXIT_IO = 2
EXIT_PARTIAL = 3


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    # argparse exits with code 2 on bad flags; route through our exit codes.
    def error(self, message):
        raise _UsageError(f"{self.prog}: {message}")


@dataclass(frozen=True)
class RunConfig:
    """Resolved subcommand name and flag values for one invocation."""

    subcommand: str
    options: dict

    @classmethod
    def from_args(cls, args):
        name = args.subcommand
        nested = getattr(args, "dataset_command", None)
        if nested is not None:
            name = f"{name} {nested}"
        opts = {}
        for key, value in sorted(vars(args).items()):
            if key in ("handler", "subcommand", "dataset_command"):
                continue
            if isinstance(value, Path):
                value = str(value.resolve())
            opts[key] = value
        return cls(subcommand=name, options=opts)

    def echo(self, stream=None):
        stream = sys.stderr if stream is None else stream
        payload = {"subcommand": self.subcommand, **self.options}
        print(f"config: {json.dumps(payload, sort_keys=True)}", file=stream)


def _is_raw(path) -> bool:
    with open(path, "rb") as fh:
        return fh.read(len(RAW_MAGIC)) == RAW_MAGIC


def _read_depth_any(path, scale, d_max) -> DepthMap:
    """Depth from a 16-bit PNG (scaled) or a raw float32 map (meters).

    In raw maps a value of 0 marks an invalid pixel, matching the PNG hole
    convention.
    """
    path = Path(path)
    if not path.is_file():
        raise FileNotFoundError(f"no such file: {path}")
    if _is_raw(path):
        data = read_map(path)
        if data.ndim != 2:
            raise FileFormatError(f"expected a single-channel depth map: {path}")
        return DepthMap(data, valid=data > 0, d_max=d_max)
    return read_depth(path, scale=scale, d_max=d_max)


def _read_lddcv(path) -> LddcvMap:
    data = read_map(path)
    if data.ndim != 3 or data.shape[2] != 2:
        raise FileFormatError(f"expected a dual-channel cue map: {path}")
    return LddcvMap(data)


def _read_values(path) -> np.ndarray:
    """Scalar samples from a raw float32 map or a CSV/whitespace number list."""
    path = Path(path)
    if not path.is_file():
        raise FileNotFoundError(f"no such file: {path}")
    if _is_raw(path):
        return read_map(path).ravel().astype(np.float64)
    text = path.read_text()
    tokens = [t for t in text.replace(",", " ").split() if t]
    try:
        return np.array([float(t) for t in tokens], dtype=np.float64)
    except ValueError as exc:
        raise FileFormatError(f"could not parse numbers from {path}: {exc}") from None


def _emit_json(payload, out_path):
    text = json.dumps(payload, indent=2, sort_keys=False)
    if out_path is None:
        print(text)
    else:
        Path(out_path).write_text(text + "\n")


def _emit_text(text, out_path):
    if out_path is None:
        sys.stdout.write(text)
    else:
        Path(out_path).write_text(text)


def _cam_from_args(args) -> CameraParams:
    return CameraParams(
        focal_length=args.focal,
        f_number=args.fnumber,
        focus_distance=args.focus,
        pixel_pitch=args.pixel_pitch,
    )


def _add_camera_flags(p):
    p.add_argument("--focal", type=float, default=0.009,
                   help="focal length in meters (default 0.009)")
    p.add_argument("--fnumber", type=float, default=2.0,
                   help="F-number, dimensionless (default 2)")
    p.add_argument("--focus", type=float, default=0.7,
                   help="in-focus plane distance in meters (default 0.7)")
    p.add_argument("--pixel-pitch", type=float, default=7.5e-6,
                   help="pixel pitch in meters (default 7.5e-6)")


def _cmd_synth(args):
    cam = _cam_from_args(args)
    img = read_rgb(args.rgb)
    depth = _read_depth_any(args.depth, args.depth_scale, args.d_max)
    out = synthesize_defocus(img, depth, cam, truncation=args.truncation)
    write_rgb(out, args.out, bit_depth=16)
    if args.out_radius is not None:
        write_map(blur_radius(depth, cam), args.out_radius, format="raw")
    return EXIT_OK


def _cmd_darkchannel(args):
    img = read_rgb(args.input)
    dark = dark_channel(img, window=args.window)
    if str(args.out).endswith(".raw"):
        write_map(dark, args.out, format="raw")
    else:
        write_map(dark, args.out, format="png16", scale=65535.0)
    return EXIT_OK


def _cmd_cues(args):
    img = read_rgb(args.input)
    dark_data = read_map(args.dark)
    if dark_data.ndim != 2:
        raise FileFormatError(f"expected a single-channel dark map: {args.dark}")
    cues = lddcv(ScalarMap(dark_data), img)
    write_map(cues, args.out, format="raw")
    return EXIT_OK


def _cmd_mask(args):
    cues = _read_lddcv(args.input)
    mask = validity_mask(cues, threshold=args.threshold)
    write_map(mask.data, args.out, format="png16", scale=65535.0)
    return EXIT_OK


def _cmd_profile(args):
    cues = _read_lddcv(args.cues)
    radii_data = read_map(args.radii)
    if radii_data.ndim != 2:
        raise FileFormatError(f"expected a single-channel radius map: {args.radii}")
    rows = blur_cue_profile(cues, ScalarMap(radii_data), n_bins=args.bins)
    lines = ["bin_center,mean_ldcv,mean_ldv,count"]
    for row in rows:
        lines.append(f"{row.center:.9g},{row.mean_ldcv:.9g},{row.mean_ldv:.9g},{row.count}")
    _emit_text("\n".join(lines) + "\n", args.out)
    return EXIT_OK


def _cmd_metrics(args):
    pred = _read_depth_any(args.pred, args.depth_scale, args.d_max)
    gt = _read_depth_any(args.gt, args.depth_scale, args.d_max)
    report = evaluate(pred, gt, cap=args.cap)
    _emit_json(report.as_dict(), args.out)
    return EXIT_OK


def _cmd_loss(args):
    pred = _read_depth_any(args.pred, args.depth_scale, args.d_max)
    gt = _read_depth_any(args.gt, args.depth_scale, args.d_max)
    l_spafid = spatial_fidelity(pred, gt)
    l_freq = frequency_loss(pred, gt)
    l_adv = None
    if args.scores is not None:
        l_adv = adversarial_loss_g(_read_values(args.scores))
    report = total_loss(l_spafid, l_freq, l_adv)
    _emit_json(report.as_dict(), args.out)
    return EXIT_OK


def _cmd_kde(args):
    values = _read_values(args.values)
    result = kde_mod.gaussian_kde(values)
    lines = [f"# bandwidth = {result.bandwidth:.12g}", "grid,density"]
    for g, d in zip(result.grid, result.density):
        lines.append(f"{g:.12g},{d:.12g}")
    _emit_text("\n".join(lines) + "\n", args.out)
    return EXIT_OK


def _cmd_dataset_synth(args):
    cam = _cam_from_args(args)
    split = load_split(args.split)
    summary = synthesize_dataset(
        args.root,
        split,
        cam,
        args.out,
        depth_scale=args.depth_scale,
        d_max=args.d_max,
        window=args.window,
        threshold=args.threshold,
        truncation=args.truncation,
        jobs=args.jobs,
        fail_fast=args.fail_fast,
    )
    _emit_json(summary.as_dict(), args.out_summary)
    return EXIT_OK if summary.n_failed == 0 else EXIT_PARTIAL


def _default_jobs():
    try:
        return max(1, int(os.environ.get("DFD_JOBS", "1")))
    except ValueError:
        return 1


def _add_depth_input_flags(p):
    p.add_argument("--depth-scale", type=float, default=1000.0,
                   help="depth units per meter for 16-bit PNG input (default 1000)")
    p.add_argument("--d-max", type=float, default=10.0,
                   help="maximum accepted depth in meters (default 10)")


def _build_parser():
    parser = _Parser(prog="dfdkit", description=__doc__,
                     formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = parser.add_subparsers(dest="subcommand", required=True, metavar="subcommand")

    p = sub.add_parser("synth", help="synthesize depth-dependent defocus from an RGB-D pair")
    p.add_argument("--rgb", type=Path, required=True, help="input all-in-focus RGB PNG")
    p.add_argument("--depth", type=Path, required=True,
                   help="input depth: 16-bit PNG (scaled) or raw float32 map in meters")
    _add_camera_flags(p)
    _add_depth_input_flags(p)
    p.add_argument("--truncation", type=float, default=3.0,
                   help="kernel truncation radius in blur radii (default 3.0)")
    p.add_argument("--out", type=Path, required=True, help="output defocused PNG (16-bit)")
    p.add_argument("--out-radius", type=Path, default=None,
                   help="optional output raw float32 blur-radius map in pixels")
    p.set_defaults(handler=_cmd_synth)

    p = sub.add_parser("darkchannel", help="dark channel of an RGB image")
    p.add_argument("--in", dest="input", type=Path, required=True, help="input RGB PNG")
    p.add_argument("--window", type=int, default=15,
                   help="odd window size in pixels (default 15)")
    p.add_argument("--out", type=Path, required=True,
                   help="output map: .raw for float32, otherwise 16-bit PNG")
    p.set_defaults(handler=_cmd_darkchannel)

    p = sub.add_parser("cues", help="dual-channel local variation cue map")
    p.add_argument("--in", dest="input", type=Path, required=True, help="input RGB PNG")
    p.add_argument("--dark", type=Path, required=True, help="dark channel map (raw float32)")
    p.add_argument("--out", type=Path, required=True, help="output cue map (raw float32)")
    p.set_defaults(handler=_cmd_cues)

    p = sub.add_parser("mask", help="binary validity mask from a cue map")
    p.add_argument("--in", dest="input", type=Path, required=True,
                   help="input cue map (raw float32)")
    p.add_argument("--threshold", type=float, default=DEFAULT_THRESHOLD,
                   help="strict cue threshold in [0, 1) (default 0.05)")
    p.add_argument("--out", type=Path, required=True, help="output mask PNG (16-bit, 0/65535)")
    p.set_defaults(handler=_cmd_mask)

    p = sub.add_parser("profile", help="mean cue level per normalized-blur bin")
    p.add_argument("--cues", type=Path, required=True, help="cue map (raw float32)")
    p.add_argument("--radii", type=Path, required=True,
                   help="blur radius map in pixels (raw float32)")
    p.add_argument("--bins", type=int, default=20, help="number of blur bins (default 20)")
    p.add_argument("--out", type=Path, default=None,
                   help="output CSV (bin_center,mean_ldcv,mean_ldv,count); stdout if omitted")
    p.set_defaults(handler=_cmd_profile)

    p = sub.add_parser("metrics", help="depth error metrics between two depth maps")
    p.add_argument("--pred", type=Path, required=True,
                   help="predicted depth: 16-bit PNG or raw float32 (meters)")
    p.add_argument("--gt", type=Path, required=True,
                   help="ground-truth depth: 16-bit PNG or raw float32 (meters)")
    _add_depth_input_flags(p)
    p.add_argument("--cap", type=float, default=10.0,
                   help="evaluate only pixels with ground truth <= cap meters (default 10)")
    p.add_argument("--out", type=Path, default=None, help="output JSON; stdout if omitted")
    p.set_defaults(handler=_cmd_metrics)

    p = sub.add_parser("loss", help="loss terms between two depth maps")
    p.add_argument("--pred", type=Path, required=True,
                   help="predicted depth: 16-bit PNG or raw float32 (meters)")
    p.add_argument("--gt", type=Path, required=True,
                   help="ground-truth depth: 16-bit PNG or raw float32 (meters)")
    _add_depth_input_flags(p)
    p.add_argument("--scores", type=Path, default=None,
                   help="optional CSV of discriminator scores for the adversarial term")
    p.add_argument("--out", type=Path, default=None, help="output JSON; stdout if omitted")
    p.set_defaults(handler=_cmd_loss)

    p = sub.add_parser("kde", help="Gaussian kernel density estimate with Silverman bandwidth")
    p.add_argument("--values", type=Path, required=True,
                   help="input samples: CSV of numbers or raw float32 map")
    p.add_argument("--out", type=Path, default=None,
                   help="output CSV (grid,density, bandwidth in header); stdout if omitted")
    p.set_defaults(handler=_cmd_kde)

    p = sub.add_parser("dataset", help="whole-dataset operations")
    dsub = p.add_subparsers(dest="dataset_command", required=True, metavar="command")
    p = dsub.add_parser("synth", help="synthesize defocus artifacts for every split sample")
    p.add_argument("--root", type=Path, required=True,
                   help="dataset root containing rgb/<id>.png and depth/<id>.png")
    p.add_argument("--split", type=Path, required=True, help="split file, one id per line")
    _add_camera_flags(p)
    _add_depth_input_flags(p)
    p.add_argument("--window", type=int, default=15,
                   help="dark channel window, odd pixels (default 15)")
    p.add_argument("--threshold", type=float, default=DEFAULT_THRESHOLD,
                   help="cue mask threshold in [0, 1) (default 0.05)")
    p.add_argument("--truncation", type=float, default=3.0,
                   help="kernel truncation radius in blur radii (default 3.0)")
    p.add_argument("--out", type=Path, required=True, help="output directory")
    p.add_argument("--jobs", type=int, default=_default_jobs(),
                   help="worker threads (default from DFD_JOBS, else 1)")
    p.add_argument("--fail-fast", action="store_true",
                   help="abort on the first failing sample instead of recording it")
    p.add_argument("--out-summary", type=Path, default=None,
                   help="output JSON summary; stdout if omitted")
    p.set_defaults(handler=_cmd_dataset_synth)

    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except _UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except SystemExit as exc:  # --help
        code = exc.code
        return EXIT_OK if code in (0, None) else EXIT_VALIDATION

    RunConfig.from_args(args).echo()
    try:
        return args.handler(args)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except (FileFormatError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
