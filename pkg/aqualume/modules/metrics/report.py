"""Directory-level evaluation CSV: one row per image plus a mean footer."""

from __future__ import annotations

import csv
import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

import numpy as np
from joblib import Parallel, delayed

from aqualume.core import metrics
from aqualume.errors import ImageReadError
from aqualume.modules.imaging import list_images, load_image, resize_image
from aqualume.utils.storage import atomic_write

from .color import lab_u_index, uciqe
from .features import feature_counts, sift_match_count
from .structure import laplacian_variance, rms_contrast, ssim

logger = logging.getLogger("aqualume.metrics.report")

NO_REFERENCE_COLUMNS = (
    "sigma_c",
    "con_l",
    "mu_s",
    "uciqe",
    "d_o",
    "d_a",
    "d_b",
    "a_l",
    "u",
    "contrast",
    "laplacian_var",
    "sift",
    "harris",
)
REFERENCE_COLUMNS = ("ssim", "sift_matches")


@dataclass
class EvaluationSummary:
    rows: list[dict[str, Any]]
    footer: dict[str, Any]
    skipped: list[str] = field(default_factory=list)
    unpaired: list[str] = field(default_factory=list)


def score_image(path: Path, reference: Path | None = None) -> dict[str, Any] | None:
    """All metrics for one image; ``reference`` adds SSIM and SIFT matches against it."""
    try:
        img = load_image(path)
        ref = load_image(reference) if reference is not None else None
    except ImageReadError as exc:
        logger.warning("Skipping unreadable image", extra={"path": str(path), "error": str(exc)})
        return None

    counts = feature_counts(img)
    row: dict[str, Any] = {
        "image": path.name,
        **uciqe(img).as_dict(),
        **lab_u_index(img).as_dict(),
        "contrast": rms_contrast(img),
        "laplacian_var": laplacian_variance(img),
        "sift": counts.sift,
        "harris": counts.harris,
    }
    if ref is not None:
        if ref.shape != img.shape:
            ref = resize_image(ref, tuple(img.shape[-2:]))
        row["ssim"] = ssim(ref, img)
        row["sift_matches"] = sift_match_count(ref, img)
    return row


def _pair(
    inputs: list[Path], restored_dir: Path | None
) -> tuple[list[tuple[Path, Path | None]], list[str]]:
    if restored_dir is None:
        return [(p, None) for p in inputs], []
    restored = {p.stem: p for p in list_images(restored_dir)}
    jobs: list[tuple[Path, Path | None]] = []
    unpaired: list[str] = []
    for source in inputs:
        match = restored.get(source.stem)
        if match is None:
            unpaired.append(source.name)
            logger.warning("No restored counterpart", extra={"image": source.name})
            continue
        # score the restoration against its raw input
        jobs.append((match, source))
    return jobs, unpaired


def evaluate_directory(
    input_dir: str | Path,
    restored_dir: str | Path | None = None,
    report_path: str | Path | None = None,
    jobs: int = 1,
) -> EvaluationSummary:
    """Score every image; with ``restored_dir`` the restored files are scored and compared
    to their same-stem inputs. Writes the CSV when ``report_path`` is given.
    """
    inputs = list_images(input_dir)
    pairs, unpaired = _pair(inputs, Path(restored_dir) if restored_dir else None)
    results = Parallel(n_jobs=jobs, prefer="threads")(
        delayed(score_image)(target, reference) for target, reference in pairs
    )

    rows: list[dict[str, Any]] = []
    skipped: list[str] = []
    for (target, _), row in zip(pairs, results, strict=True):
        if row is None:
            skipped.append(target.name)
            metrics.record_skip("unreadable")
        else:
            rows.append(row)
    metrics.IMAGES_EVALUATED.inc(len(rows))

    columns = [*NO_REFERENCE_COLUMNS, *(REFERENCE_COLUMNS if restored_dir else ())]
    footer: dict[str, Any] = {"image": "mean"}
    for column in columns:
        values = [row[column] for row in rows]
        footer[column] = float(np.mean(values)) if values else float("nan")

    summary = EvaluationSummary(rows, footer, skipped, unpaired)
    if report_path is not None:
        write_report(summary, report_path, ["image", *columns])
    logger.info(
        "Evaluation finished",
        extra={"images": len(rows), "skipped": len(skipped), "unpaired": len(unpaired)},
    )
    return summary


def write_report(summary: EvaluationSummary, path: str | Path, columns: list[str]) -> Path:
    def _write(tmp: str) -> None:
        with open(tmp, "w", newline="", encoding="utf-8") as handle:
            writer = csv.DictWriter(handle, fieldnames=columns)
            writer.writeheader()
            writer.writerows(summary.rows)
            writer.writerow(summary.footer)

    return atomic_write(path, _write)
