# Prometheus instruments for training, restoration and evaluation

from __future__ import annotations

from pathlib import Path

from prometheus_client import CollectorRegistry, Counter, Gauge, Histogram, write_to_textfile

REGISTRY = CollectorRegistry()

# Training
TRAIN_ITERATIONS: Counter = Counter(
    "aqualume_train_iterations_total", "Total optimisation steps", registry=REGISTRY
)

TRAIN_STEP_DURATION: Histogram = Histogram(
    "aqualume_train_step_seconds",
    "Wall time of one training step",
    buckets=(0.05, 0.1, 0.25, 0.5, 1.0, 2.5, 5.0, 10.0, 30.0),
    registry=REGISTRY,
)

TRAIN_LOSS: Gauge = Gauge(
    "aqualume_train_loss", "Most recent value of each loss term", ["term"], registry=REGISTRY
)

NONFINITE_LOSSES: Counter = Counter(
    "aqualume_nonfinite_losses_total", "Training steps aborted on NaN/inf", registry=REGISTRY
)

# Inference
IMAGES_RESTORED: Counter = Counter(
    "aqualume_images_restored_total", "Images restored by the CLI", registry=REGISTRY
)

RESTORE_FPS: Gauge = Gauge(
    "aqualume_restore_fps", "Measured restoration throughput (frames/s)", registry=REGISTRY
)

# Evaluation
IMAGES_EVALUATED: Counter = Counter(
    "aqualume_images_evaluated_total", "Images scored by the metric suite", registry=REGISTRY
)

FILES_SKIPPED: Counter = Counter(
    "aqualume_files_skipped_total", "Files skipped by loaders", ["reason"], registry=REGISTRY
)


def record_loss_terms(terms: dict[str, float]) -> None:
    """Record the latest loss values."""
    for name, value in terms.items():
        TRAIN_LOSS.labels(term=name).set(value)


def record_skip(reason: str) -> None:
    """Record a skipped input file"""
    FILES_SKIPPED.labels(reason=reason).inc()


def write_textfile(path: str | Path) -> None:
    """Dump the registry in Prometheus text format (node-exporter textfile collector)."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    write_to_textfile(str(path), REGISTRY)
