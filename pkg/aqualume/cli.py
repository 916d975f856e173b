"""Aqualume command-line interface: train, restore, degrade, eval, mask and grid.

Exit codes: 0 success, 2 usage/config/precondition error, 1 runtime failure.
"""

from __future__ import annotations

import argparse
import logging
import sys
import time
from collections.abc import Callable, Sequence
from pathlib import Path

import numpy as np
import torch

from aqualume import __version__
from aqualume.config import Settings, get_settings
from aqualume.core import metrics
from aqualume.errors import (
    CheckpointError,
    ConfigError,
    ContractViolation,
    ImageReadError,
)
from aqualume.modules.data import (
    ParamSampler,
    SyntheticSample,
    UnpairedDataset,
    depth_from_descriptor,
    load_or_skip,
    make_synthetic,
)
from aqualume.modules.dcp import darkest_mask, dcp_map, masked_overlay
from aqualume.modules.imaging import compose_grid, list_images, load_image, resize_image, save_image
from aqualume.modules.metrics import evaluate_directory
from aqualume.modules.networks import decompose
from aqualume.modules.physics import (
    DEPTH_MAX,
    DegradationParams,
    degrade,
    estimate_backscatter,
    restore,
    transmission_maps,
)
from aqualume.modules.trainer import ablation_variants, load_generator, load_train_config, run
from aqualume.telemetry import capture_failure, configure_logging, init_sentry
from aqualume.utils.documents import dump_document, load_document
from aqualume.utils.storage import atomic_write

logger = logging.getLogger("aqualume.cli")

EXIT_OK = 0
EXIT_RUNTIME = 1
EXIT_USAGE = 2
MANIFEST_EXTRAS = ("depth", "source")


class UsageError(Exception):
    """Bad arguments or unmet preconditions detected by a command."""


def _device(args: argparse.Namespace, settings: Settings, configured: str | None = None) -> str:
    return settings.resolve_device(args.device or configured)


# -- train ---------------------------------------------------------------------------


def cmd_train(args: argparse.Namespace, settings: Settings) -> int:
    if args.resume:
        pinned = [
            flag
            for flag, value in (("--variant", args.variant), ("--seed", args.seed))
            if value is not None
        ]
        if pinned:
            raise UsageError(
                f"{' and '.join(pinned)} cannot be combined with --resume; "
                "the checkpoint's config fixes them"
            )
    cfg = load_train_config(
        args.config,
        total_epochs=args.total_epochs,
        seed=args.seed,
        underwater_dir=args.underwater_dir,
        terrestrial_dir=args.terrestrial_dir,
    )
    if args.variant:
        cfg = ablation_variants(cfg)[args.variant]
    if cfg.loader_jobs == 1 and settings.loader_jobs > 1:
        cfg = cfg.with_overrides(loader_jobs=settings.loader_jobs)
    for key in ("underwater_dir", "terrestrial_dir"):
        value = getattr(cfg, key)
        if not value or not Path(value).is_dir():
            raise UsageError(f"{key} is not a directory: {value!r}")
    if args.resume and not Path(args.resume).is_file():
        raise UsageError(f"checkpoint not found: {args.resume}")

    ds = UnpairedDataset.from_dirs(cfg.underwater_dir, cfg.terrestrial_dir, cfg.image_size)
    device = _device(args, settings, cfg.device)
    final = run(cfg, ds, args.out_dir, resume=args.resume, device=device)
    print(f"final checkpoint: {final}")
    return EXIT_OK


# -- restore -------------------------------------------------------------------------


def cmd_restore(args: argparse.Namespace, settings: Settings) -> int:
    if not Path(args.checkpoint).is_file():
        raise UsageError(f"checkpoint not found: {args.checkpoint}")
    device = _device(args, settings)
    generator, cfg = load_generator(args.checkpoint, "F", device)
    size = (cfg.image_size, cfg.image_size)
    out_dir = Path(args.output_dir)

    restored = failed = 0
    elapsed = 0.0
    for path in list_images(args.input_dir):
        original = load_or_skip(path)
        if original is None:
            continue
        native = tuple(original.shape[-2:])
        try:
            started = time.perf_counter()
            with torch.no_grad():
                small = resize_image(original, size).to(device)
                d = decompose(generator, small)
                clean = restore(small, d.depth, d.params).image
            if device.startswith("cuda"):
                torch.cuda.synchronize()
            elapsed += time.perf_counter() - started

            save_image(resize_image(clean.cpu(), native).clamp(0, 1), out_dir / f"{path.stem}.png")
            extras: dict[str, torch.Tensor] = {}
            if args.emit_depth:
                extras["depth"] = d.depth / DEPTH_MAX
            if args.emit_backscatter:
                extras["backscatter"] = estimate_backscatter(d.depth, d.params)
            if args.emit_transmission:
                extras["t_direct"], extras["t_backscatter"] = transmission_maps(d.depth, d.params)
            for suffix, tensor in extras.items():
                save_image(
                    resize_image(tensor.cpu(), native).clamp(0, 1),
                    out_dir / f"{path.stem}_{suffix}.png",
                )
            restored += 1
            metrics.IMAGES_RESTORED.inc()
        except Exception:
            failed += 1
            logger.exception("Restoration failed", extra={"path": str(path)})

    fps = restored / elapsed if elapsed > 0 else 0.0
    metrics.RESTORE_FPS.set(fps)
    logger.info("Restoration finished", extra={"images": restored, "failed": failed, "fps": fps})
    if settings.metrics_textfile:
        metrics.write_textfile(settings.metrics_textfile)
    return EXIT_RUNTIME if failed else EXIT_OK


# -- degrade -------------------------------------------------------------------------


def _fixed_params(path: str) -> DegradationParams:
    doc = {k: v for k, v in load_document(path).items() if k not in MANIFEST_EXTRAS}
    params = DegradationParams.from_document(doc, dtype=torch.float64)
    violations = params.validate()
    if violations:
        raise ConfigError("out-of-range parameters: " + "; ".join(violations), violations)
    return params


def _save_float(sample: SyntheticSample, path: Path) -> None:
    def _write(tmp: str) -> None:
        with open(tmp, "wb") as handle:
            np.savez(
                handle,
                degraded=sample.degraded.numpy(),
                clean=sample.clean.numpy(),
                depth=sample.depth.numpy(),
            )

    atomic_write(path, _write)


def cmd_degrade(args: argparse.Namespace, settings: Settings) -> int:
    fixed = _fixed_params(args.params) if args.params else None
    sampler = ParamSampler.seeded(args.sample) if fixed is None else None
    out_dir = Path(args.output_dir)

    written = 0
    for path in list_images(args.input_dir):
        loaded = load_or_skip(path, args.image_size)
        if loaded is None:
            continue
        clean = loaded.to(torch.float64)
        if sampler is not None:
            sample = make_synthetic(clean, args.depth, sampler)
        else:
            depth = depth_from_descriptor(args.depth, tuple(clean.shape[-2:]))
            degraded = degrade(clean, depth, fixed).image
            sample = SyntheticSample(clean, depth, fixed, degraded, args.depth)

        save_image(sample.degraded, out_dir / f"{path.stem}.png")
        manifest = {**sample.manifest(), "source": path.name}
        dump_document(manifest, out_dir / "manifests" / f"{path.stem}.yaml")
        if args.emit_float:
            _save_float(sample, out_dir / "float" / f"{path.stem}.npz")
        written += 1

    logger.info("Degradation finished", extra={"images": written, "depth": args.depth})
    return EXIT_OK


# -- eval ----------------------------------------------------------------------------


def cmd_eval(args: argparse.Namespace, settings: Settings) -> int:
    summary = evaluate_directory(
        args.input_dir,
        restored_dir=args.restored_dir,
        report_path=args.report,
        jobs=args.jobs or settings.eval_jobs,
    )
    for name in summary.unpaired:
        print(f"unpaired: {name}", file=sys.stderr)
    print(f"{len(summary.rows)} images scored -> {args.report}")
    return EXIT_OK


# -- mask ----------------------------------------------------------------------------


def cmd_mask(args: argparse.Namespace, settings: Settings) -> int:
    img = load_image(args.input, args.image_size)
    dcp = dcp_map(img)
    mask = darkest_mask(dcp, args.fraction, args.cap)
    prefix = str(args.output_prefix)
    save_image(dcp, f"{prefix}_dcp.png")
    save_image(mask, f"{prefix}_mask.png")
    save_image(masked_overlay(img, mask), f"{prefix}_overlay.png")
    logger.info("Mask written", extra={"prefix": prefix, "selected": int(mask.sum())})
    return EXIT_OK


# -- grid ----------------------------------------------------------------------------


def cmd_grid(args: argparse.Namespace, settings: Settings) -> int:
    listings = [{p.name: p for p in list_images(d)} for d in args.dirs]
    names = sorted(listings[0])
    for directory, listing in zip(args.dirs[1:], listings[1:], strict=True):
        if set(listing) != set(names):
            missing = sorted(set(names) - set(listing))
            extra = sorted(set(listing) - set(names))
            raise UsageError(f"{directory}: filenames differ (missing {missing}, extra {extra})")
    if not names:
        raise UsageError("no images to tile")

    size = (args.cell_size, args.cell_size)
    rows = [[resize_image(load_image(listing[n]), size) for n in names] for listing in listings]
    save_image(compose_grid(rows, gap=args.gap), args.output)
    logger.info("Grid written", extra={"rows": len(rows), "columns": len(names)})
    return EXIT_OK


# -- parser --------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="aqualume", description="Physics-guided unsupervised underwater image restoration"
    )
    parser.add_argument("--version", action="version", version=f"aqualume {__version__}")
    parser.add_argument("--log-level", default=None, help="Logging level (default from settings)")
    parser.add_argument("--device", choices=["auto", "cpu", "cuda"], default=None)

    subparsers = parser.add_subparsers(dest="command", required=True)

    train = subparsers.add_parser("train", help="Train the cyclic physics generators")
    train.add_argument("config", help="YAML training config")
    train.add_argument("--out-dir", default="runs/latest")
    train.add_argument("--resume", help="Checkpoint to continue from")
    train.add_argument("--variant", choices=["baseline", "hyp1", "hyp2", "full"])
    train.add_argument("--total-epochs", type=int)
    train.add_argument("--seed", type=int)
    train.add_argument("--underwater-dir")
    train.add_argument("--terrestrial-dir")
    train.set_defaults(func=cmd_train)

    restore_cmd = subparsers.add_parser("restore", help="Restore underwater images")
    restore_cmd.add_argument("checkpoint")
    restore_cmd.add_argument("input_dir")
    restore_cmd.add_argument("output_dir")
    restore_cmd.add_argument("--emit-depth", action="store_true")
    restore_cmd.add_argument("--emit-backscatter", action="store_true")
    restore_cmd.add_argument("--emit-transmission", action="store_true")
    restore_cmd.set_defaults(func=cmd_restore)

    degrade_cmd = subparsers.add_parser("degrade", help="Render clean images underwater")
    degrade_cmd.add_argument("input_dir")
    degrade_cmd.add_argument("output_dir")
    source = degrade_cmd.add_mutually_exclusive_group(required=True)
    source.add_argument("--params", help="YAML document with the nine parameters")
    source.add_argument("--sample", type=int, metavar="SEED", help="Draw parameters per image")
    degrade_cmd.add_argument(
        "--depth", default="gradient", help="constant:V | gradient | file:PATH (default gradient)"
    )
    degrade_cmd.add_argument("--image-size", type=int, help="Resize inputs first")
    degrade_cmd.add_argument("--emit-float", action="store_true", help="Also write float .npz")
    degrade_cmd.set_defaults(func=cmd_degrade)

    eval_cmd = subparsers.add_parser("eval", help="Score images with the metric suite")
    eval_cmd.add_argument("input_dir")
    eval_cmd.add_argument("report", help="CSV output path")
    eval_cmd.add_argument("--restored-dir")
    eval_cmd.add_argument("--jobs", type=int)
    eval_cmd.set_defaults(func=cmd_eval)

    mask_cmd = subparsers.add_parser("mask", help="Dark-channel map and darkest-pixel mask")
    mask_cmd.add_argument("input")
    mask_cmd.add_argument("output_prefix")
    mask_cmd.add_argument("--fraction", type=float, default=0.01)
    mask_cmd.add_argument("--cap", type=int, default=10_000)
    mask_cmd.add_argument("--image-size", type=int, help="Resize the input first")
    mask_cmd.set_defaults(func=cmd_mask)

    grid_cmd = subparsers.add_parser("grid", help="Side-by-side comparison figure")
    grid_cmd.add_argument("dirs", nargs="+", help="One directory per row")
    grid_cmd.add_argument("--output", required=True)
    grid_cmd.add_argument("--cell-size", type=int, default=256)
    grid_cmd.add_argument("--gap", type=int, default=4)
    grid_cmd.set_defaults(func=cmd_grid)
    return parser


USAGE_ERRORS: tuple[type[BaseException], ...] = (
    UsageError,
    ConfigError,
    ContractViolation,
    CheckpointError,
    ImageReadError,
)


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    settings = get_settings()
    configure_logging(args.log_level or settings.log_level)
    init_sentry(settings)

    handler: Callable[[argparse.Namespace, Settings], int] = args.func
    try:
        return handler(args, settings)
    except USAGE_ERRORS as exc:
        logger.error("%s failed: %s", args.command, exc)
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except KeyboardInterrupt:
        logger.warning("Interrupted")
        return EXIT_RUNTIME
    except Exception as exc:
        logger.exception("%s failed", args.command)
        capture_failure(exc)
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
