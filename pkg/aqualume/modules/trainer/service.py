"""Cyclic adversarial training of the two physics generators."""

from __future__ import annotations

import csv
import logging
import math
import shutil
import time
from pathlib import Path
from typing import Any

import numpy as np
import torch
from torch import nn

from aqualume.config import get_settings
from aqualume.core import metrics
from aqualume.errors import CheckpointError, NonFiniteLoss
from aqualume.modules.data import UnpairedBatcher, UnpairedDataset
from aqualume.modules.dcp import darkest_mask, dcp_map
from aqualume.modules.imaging import compose_grid, save_image
from aqualume.modules.losses import (
    LossReport,
    PerceptualEncoder,
    adversarial_discriminator,
    adversarial_generator,
    backscatter_fidelity,
    cycle_consistency,
    perceptual,
    total,
)
from aqualume.modules.networks import (
    Decomposition,
    MultiScaleDiscriminator,
    PhysicsGenerator,
    discriminate,
    generate_terrestrial,
    generate_underwater,
    init_weights,
    load_checkpoint,
    save_checkpoint,
)
from aqualume.modules.physics import Rendered
from aqualume.utils.seeding import set_seeds
from aqualume.utils.storage import atomic_write, sha256_file

from .models import VARIANT_NAMES, TrainConfig, build_config
from .pool import ImagePool
from .schedule import lr_at

logger = logging.getLogger("aqualume.trainer")

LOG_COLUMNS = (
    "epoch",
    "iteration",
    *LossReport.FIELDS,
    "lr_depth",
    "lr_coeff",
    "lr_disc",
)
DEPTH_COLUMNS = ("epoch", "variant", "depth_mean", "depth_std")
CHECKPOINT_COLUMNS = ("epoch", "iteration", "checkpoint", "sha256")


def build_generator(cfg: TrainConfig) -> PhysicsGenerator:
    return PhysicsGenerator(
        image_size=cfg.image_size,
        ngf=cfg.ngf,
        residual_blocks=cfg.residual_blocks,
        nef=cfg.nef,
        encoder_blocks=cfg.encoder_blocks,
        hyp1=cfg.hyp1,
    )


def ablation_variants(cfg: TrainConfig) -> dict[str, TrainConfig]:
    """The four (hyp1, hyp2) configurations, keyed baseline / hyp1 / hyp2 / full."""
    return {
        name: cfg.with_overrides(hyp1=hyp1, hyp2=hyp2)
        for (hyp1, hyp2), name in VARIANT_NAMES.items()
    }


def _set_requires_grad(modules: list[nn.Module], flag: bool) -> None:
    for module in modules:
        for param in module.parameters():
            param.requires_grad_(flag)


def _grad_norm(module: nn.Module) -> float:
    squares = [p.grad.detach().pow(2).sum() for p in module.parameters() if p.grad is not None]
    if not squares:
        return 0.0
    return float(torch.stack(squares).sum().sqrt())


def _scalar(value: torch.Tensor | float) -> float:
    return float(value.detach()) if isinstance(value, torch.Tensor) else float(value)


class Trainer:
    """Owns both generators, both discriminators, their optimizers and the fake pools.

    All randomness comes from ``cfg.seed``: torch weights are initialised after
    seeding, and the loader and the two pools draw from numpy generators
    spawned from one seed sequence.
    """

    def __init__(
        self,
        cfg: TrainConfig,
        device: str | torch.device = "cpu",
        encoder: PerceptualEncoder | None = None,
    ) -> None:
        self.cfg = cfg
        self.device = torch.device(device)

        set_seeds(cfg.seed)
        loader_seed, underwater_seed, terrestrial_seed = np.random.SeedSequence(cfg.seed).spawn(3)
        self.loader_rng = np.random.default_rng(loader_seed)

        self.G = init_weights(build_generator(cfg)).to(self.device)
        self.F = init_weights(build_generator(cfg)).to(self.device)
        self.D_underwater = init_weights(MultiScaleDiscriminator(cfg.ndf)).to(self.device)
        self.D_terrestrial = init_weights(MultiScaleDiscriminator(cfg.ndf)).to(self.device)
        if encoder is None:
            encoder = PerceptualEncoder(cfg.perceptual_pretrained)
        self.encoder = encoder.to(self.device)

        betas = (cfg.adam_beta1, cfg.adam_beta2)
        depth_params = [*self.G.depth_net.parameters(), *self.F.depth_net.parameters()]
        coeff_params = [
            p
            for gen in (self.G, self.F)
            for name in ("atten_encoder", "backscatter_encoder", "veiling_encoder")
            for p in getattr(gen, name).parameters()
        ]
        self.optimizer_g = torch.optim.Adam(
            [
                {"params": depth_params, "lr": cfg.lr_depth, "group": "depth"},
                {"params": coeff_params, "lr": cfg.lr_coeff, "group": "coeff"},
            ],
            betas=betas,
        )
        self.optimizer_d_underwater = torch.optim.Adam(
            self.D_underwater.parameters(), lr=cfg.lr_disc, betas=betas
        )
        self.optimizer_d_terrestrial = torch.optim.Adam(
            self.D_terrestrial.parameters(), lr=cfg.lr_disc, betas=betas
        )
        self.pool_underwater = ImagePool(cfg.pool_size, np.random.default_rng(underwater_seed))
        self.pool_terrestrial = ImagePool(cfg.pool_size, np.random.default_rng(terrestrial_seed))

        self.epoch = 0
        self.iteration = 0
        self.last_grad_norms: dict[str, float] = {}
        self.last_decompositions: dict[str, Decomposition] = {}
        self.last_outputs: dict[str, torch.Tensor] = {}

    # -- schedule -----------------------------------------------------------------

    def set_epoch_lrs(self, epoch: int) -> dict[str, float]:
        rates = {name: lr_at(epoch, self.cfg, base) for name, base in self.cfg.base_rates().items()}
        for group in self.optimizer_g.param_groups:
            group["lr"] = rates[group["group"]]
        for optimizer in (self.optimizer_d_underwater, self.optimizer_d_terrestrial):
            for group in optimizer.param_groups:
                group["lr"] = rates["disc"]
        return rates

    def current_lrs(self) -> dict[str, float]:
        rates = {group["group"]: group["lr"] for group in self.optimizer_g.param_groups}
        rates["disc"] = self.optimizer_d_underwater.param_groups[0]["lr"]
        return rates

    # -- one iteration --------------------------------------------------------------

    def _mask(self, img: torch.Tensor) -> torch.Tensor:
        return darkest_mask(dcp_map(img), self.cfg.mask_fraction, self.cfg.mask_cap)

    def _check_finite(self, stage: str, values: dict[str, torch.Tensor | float]) -> None:
        bad = {k: _scalar(v) for k, v in values.items() if not math.isfinite(_scalar(v))}
        if not bad:
            return
        metrics.NONFINITE_LOSSES.inc()
        diagnostics: dict[str, Any] = {"stage": stage, "iteration": self.iteration, "losses": bad}
        for name, decomposition in self.last_decompositions.items():
            diagnostics[name] = decomposition.stats()
        logger.error("Non-finite loss", extra={"diagnostics": diagnostics})
        raise NonFiniteLoss(f"non-finite {stage} loss at iteration {self.iteration}", diagnostics)

    def _cycle(
        self, x: torch.Tensor, y: torch.Tensor
    ) -> tuple[Rendered, Decomposition, Rendered, Decomposition, Rendered, Rendered]:
        fake_y, d_x = generate_underwater(self.G, x)
        fake_x, d_y = generate_terrestrial(self.F, y)
        x_rec, _ = generate_terrestrial(self.F, fake_y.image)
        y_rec, _ = generate_underwater(self.G, fake_x.image)
        return fake_y, d_x, fake_x, d_y, x_rec, y_rec

    def training_step(self, x: torch.Tensor, y: torch.Tensor) -> LossReport:
        """One generator update on G and F, then one update per discriminator."""
        started = time.perf_counter()
        cfg = self.cfg
        x = x.to(self.device)
        y = y.to(self.device)
        for module in (self.G, self.F, self.D_underwater, self.D_terrestrial):
            module.train()
        discriminators = [self.D_underwater, self.D_terrestrial]

        _set_requires_grad(discriminators, False)
        fake_y, d_x, fake_x, d_y, x_rec, y_rec = self._cycle(x, y)
        self.last_decompositions = {"d_x": d_x.detach(), "d_y": d_y.detach()}

        l_g = adversarial_generator(discriminate(self.D_underwater, fake_y.image))
        l_g = l_g + adversarial_generator(discriminate(self.D_terrestrial, fake_x.image))
        l_cycle = cycle_consistency(x, x_rec.raw, y, y_rec.raw)
        l_perc = perceptual(x, x_rec.raw, self.encoder)
        if cfg.perceptual_both_directions:
            l_perc = l_perc + perceptual(y, y_rec.raw, self.encoder)
        if cfg.hyp2:
            l_bhat = backscatter_fidelity(y, d_y, self._mask(y))
            if cfg.bhat_on_generated:
                generated = fake_y.image.detach()
                l_bhat = l_bhat + backscatter_fidelity(fake_y.raw, d_x, self._mask(generated))
        else:
            l_bhat = torch.zeros((), device=self.device)

        components = {"l_g": l_g, "l_cycle": l_cycle, "l_perc": l_perc, "l_bhat": l_bhat}
        loss_g = total(components, cfg.weights)
        self._check_finite("generator", {**components, "total": loss_g})

        self.optimizer_g.zero_grad(set_to_none=True)
        loss_g.backward()
        self.last_grad_norms = {
            f"{label}.{name}": _grad_norm(module)
            for label, gen in (("G", self.G), ("F", self.F))
            for name, module in gen.sub_modules().items()
        }
        self.optimizer_g.step()

        _set_requires_grad(discriminators, True)
        pooled_y = self.pool_underwater.query(fake_y.image.detach())
        l_d_underwater = adversarial_discriminator(
            discriminate(self.D_underwater, y), discriminate(self.D_underwater, pooled_y)
        )
        self._check_finite("discriminator", {"l_d_underwater": l_d_underwater})
        self.optimizer_d_underwater.zero_grad(set_to_none=True)
        l_d_underwater.backward()
        self.optimizer_d_underwater.step()

        pooled_x = self.pool_terrestrial.query(fake_x.image.detach())
        l_d_terrestrial = adversarial_discriminator(
            discriminate(self.D_terrestrial, x), discriminate(self.D_terrestrial, pooled_x)
        )
        self._check_finite("discriminator", {"l_d_terrestrial": l_d_terrestrial})
        self.optimizer_d_terrestrial.zero_grad(set_to_none=True)
        l_d_terrestrial.backward()
        self.optimizer_d_terrestrial.step()

        l_d = l_d_underwater.detach() + l_d_terrestrial.detach()

        self.iteration += 1
        self.last_outputs = {
            "x": x.detach(),
            "fake_y": fake_y.image.detach(),
            "y": y.detach(),
            "fake_x": fake_x.image.detach(),
        }
        report = LossReport(
            l_g=_scalar(l_g),
            l_d=_scalar(l_d),
            l_cycle=_scalar(l_cycle),
            l_perc=_scalar(l_perc),
            l_bhat=_scalar(l_bhat),
            total=_scalar(loss_g),
        )
        metrics.TRAIN_ITERATIONS.inc()
        metrics.TRAIN_STEP_DURATION.observe(time.perf_counter() - started)
        metrics.record_loss_terms(report.as_dict())
        return report

    # -- persistence ---------------------------------------------------------------

    def state_dict(self) -> dict[str, Any]:
        return {
            "epoch": self.epoch,
            "iteration": self.iteration,
            "config": self.cfg.model_dump(mode="json"),
            "generators": {"G": self.G.state_dict(), "F": self.F.state_dict()},
            "discriminators": {
                "underwater": self.D_underwater.state_dict(),
                "terrestrial": self.D_terrestrial.state_dict(),
            },
            "optimizers": {
                "generators": self.optimizer_g.state_dict(),
                "underwater": self.optimizer_d_underwater.state_dict(),
                "terrestrial": self.optimizer_d_terrestrial.state_dict(),
            },
            "pools": {
                "underwater": self.pool_underwater.state_dict(),
                "terrestrial": self.pool_terrestrial.state_dict(),
            },
            "rng": {
                "torch": torch.get_rng_state(),
                "cuda": torch.cuda.get_rng_state_all() if torch.cuda.is_available() else [],
                "loader": self.loader_rng.bit_generator.state,
            },
        }

    def load_state_dict(self, archive: dict[str, Any]) -> None:
        try:
            self.G.load_state_dict(archive["generators"]["G"])
            self.F.load_state_dict(archive["generators"]["F"])
            self.D_underwater.load_state_dict(archive["discriminators"]["underwater"])
            self.D_terrestrial.load_state_dict(archive["discriminators"]["terrestrial"])
            self.optimizer_g.load_state_dict(archive["optimizers"]["generators"])
            self.optimizer_d_underwater.load_state_dict(archive["optimizers"]["underwater"])
            self.optimizer_d_terrestrial.load_state_dict(archive["optimizers"]["terrestrial"])
        except (KeyError, RuntimeError, ValueError) as exc:
            raise CheckpointError(f"checkpoint does not match this configuration: {exc}") from exc
        if "pools" in archive:
            self.pool_underwater.load_state_dict(archive["pools"]["underwater"], self.device)
            self.pool_terrestrial.load_state_dict(archive["pools"]["terrestrial"], self.device)
        rng = archive.get("rng", {})
        if "torch" in rng:
            torch.set_rng_state(rng["torch"])
        if rng.get("cuda") and torch.cuda.is_available():
            torch.cuda.set_rng_state_all(rng["cuda"])
        if "loader" in rng:
            self.loader_rng.bit_generator.state = rng["loader"]
        self.epoch = int(archive["epoch"])
        self.iteration = int(archive["iteration"])

    def save(self, path: str | Path, loader: UnpairedBatcher | None = None) -> Path:
        payload = self.state_dict()
        if loader is not None:
            payload["loader"] = loader.state_dict()
        return save_checkpoint(payload, path)

    @classmethod
    def from_checkpoint(
        cls,
        path: str | Path,
        device: str | torch.device = "cpu",
        encoder: PerceptualEncoder | None = None,
        overrides: dict[str, Any] | None = None,
    ) -> Trainer:
        archive = load_checkpoint(path, map_location=device)
        cfg = build_config({**archive["config"], **(overrides or {})})
        trainer = cls(cfg, device, encoder)
        trainer.load_state_dict(archive)
        return trainer


def load_generator(
    path: str | Path, which: str = "F", device: str | torch.device = "cpu"
) -> tuple[PhysicsGenerator, TrainConfig]:
    """Rebuild one generator (``G`` terrestrial->underwater, ``F`` underwater->terrestrial)."""
    archive = load_checkpoint(path, map_location=device)
    cfg = build_config(archive["config"])
    generator = build_generator(cfg)
    try:
        generator.load_state_dict(archive["generators"][which])
    except (KeyError, RuntimeError) as exc:
        raise CheckpointError(f"{path}: cannot load generator {which!r}: {exc}") from exc
    return generator.to(device).eval(), cfg


class TrainingLog:
    """Append-only CSV writer; the header is written once per file."""

    def __init__(self, path: Path, columns: tuple[str, ...]) -> None:
        self.path = path
        self.columns = columns
        if not path.exists() or path.stat().st_size == 0:
            with open(path, "w", newline="", encoding="utf-8") as handle:
                csv.writer(handle).writerow(columns)

    def append(self, row: dict[str, Any]) -> None:
        with open(self.path, "a", newline="", encoding="utf-8") as handle:
            csv.DictWriter(handle, fieldnames=self.columns).writerow(row)


def _publish_latest(
    trainer: Trainer, checkpoint: Path, latest: Path, ledger: TrainingLog
) -> None:
    """Copy to ``latest.pt`` and record the checkpoint digest in the ledger."""
    atomic_write(latest, lambda tmp: shutil.copyfile(checkpoint, tmp))
    ledger.append(
        {
            "epoch": trainer.epoch,
            "iteration": trainer.iteration,
            "checkpoint": checkpoint.name,
            "sha256": sha256_file(checkpoint),
        }
    )


def verify_checkpoint_digest(path: str | Path) -> str:
    """sha256 of a checkpoint; it must appear in the ledger next to it when one exists."""
    path = Path(path)
    digest = sha256_file(path)
    ledger = path.parent / "checkpoints.csv"
    if ledger.is_file():
        with open(ledger, newline="", encoding="utf-8") as handle:
            known = {row["sha256"] for row in csv.DictReader(handle)}
        if known and digest not in known:
            raise CheckpointError(f"{path}: sha256 {digest[:12]} is not recorded in {ledger}")
    return digest


def _write_samples(trainer: Trainer, out_dir: Path) -> Path:
    outputs = trainer.last_outputs
    count = min(4, outputs["x"].shape[0])
    rows = [
        [outputs[key][i] for key in ("x", "fake_y", "y", "fake_x")] for i in range(count)
    ]
    path = out_dir / "samples" / f"iter_{trainer.iteration:07d}.png"
    return save_image(compose_grid(rows), path)


def run(
    cfg: TrainConfig,
    ds: UnpairedDataset,
    out_dir: str | Path,
    resume: str | Path | None = None,
    device: str | torch.device = "cpu",
    encoder: PerceptualEncoder | None = None,
) -> Path:
    """Train for ``cfg.total_epochs`` epochs; returns the final checkpoint path.

    Writes ``checkpoint_epoch_NNN.pt`` after every epoch (plus the initial
    one), ``latest.pt``, ``train_log.csv``, ``depth_stats.csv``, a
    ``checkpoints.csv`` digest ledger and a sample grid every
    ``sample_every`` iterations. A resumed checkpoint must match its ledger.
    """
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)

    if resume is not None:
        archive = load_checkpoint(resume, map_location=device)
        digest = verify_checkpoint_digest(resume)
        logger.info("Resuming", extra={"checkpoint": str(resume), "sha256": digest})
        trainer = Trainer(build_config(archive["config"]), device, encoder)
        trainer.load_state_dict(archive)
        if cfg.total_epochs != trainer.cfg.total_epochs:
            trainer.cfg = trainer.cfg.with_overrides(total_epochs=cfg.total_epochs)
        loader_state = archive.get("loader")
    else:
        trainer = Trainer(cfg, device, encoder)
        loader_state = None
    cfg = trainer.cfg

    batcher = UnpairedBatcher(ds, cfg.batch_size, trainer.loader_rng, jobs=cfg.loader_jobs)
    if loader_state is not None:
        batcher.load_state_dict(loader_state)
    cfg.save(out_dir / "config.yaml")

    train_log = TrainingLog(out_dir / "train_log.csv", LOG_COLUMNS)
    depth_log = TrainingLog(out_dir / "depth_stats.csv", DEPTH_COLUMNS)
    ledger = TrainingLog(out_dir / "checkpoints.csv", CHECKPOINT_COLUMNS)

    latest = out_dir / "latest.pt"
    final = out_dir / f"checkpoint_epoch_{trainer.epoch:03d}.pt"
    if resume is None:
        trainer.save(final, batcher)
        _publish_latest(trainer, final, latest, ledger)
    logger.info(
        "Training started",
        extra={
            "variant": cfg.variant,
            "start_epoch": trainer.epoch,
            "total_epochs": cfg.total_epochs,
            "batches_per_epoch": ds.batches_per_epoch(cfg.batch_size),
            "device": str(trainer.device),
        },
    )

    settings_textfile = get_settings().metrics_textfile
    for epoch in range(trainer.epoch, cfg.total_epochs):
        rates = trainer.set_epoch_lrs(epoch)
        batcher.start_epoch()
        depth_means: list[float] = []
        depth_stds: list[float] = []
        while (batch := batcher.next_batch()) is not None:
            report = trainer.training_step(*batch)
            train_log.append(
                {
                    "epoch": epoch,
                    "iteration": trainer.iteration,
                    **report.as_dict(),
                    "lr_depth": rates["depth"],
                    "lr_coeff": rates["coeff"],
                    "lr_disc": rates["disc"],
                }
            )
            logger.debug("Step %d: %s", trainer.iteration, report.as_dict())
            stats = trainer.last_decompositions["d_y"].stats()
            depth_means.append(stats["depth_mean"])
            depth_stds.append(stats["depth_std"])
            if cfg.sample_every and trainer.iteration % cfg.sample_every == 0:
                _write_samples(trainer, out_dir)

        trainer.epoch = epoch + 1
        if depth_means:
            depth_log.append(
                {
                    "epoch": epoch,
                    "variant": cfg.variant,
                    "depth_mean": float(np.mean(depth_means)),
                    "depth_std": float(np.mean(depth_stds)),
                }
            )
        final = trainer.save(out_dir / f"checkpoint_epoch_{trainer.epoch:03d}.pt", batcher)
        _publish_latest(trainer, final, latest, ledger)
        logger.info(
            "Epoch finished",
            extra={"epoch": epoch, "iteration": trainer.iteration, "lr": rates},
        )
        if settings_textfile:
            metrics.write_textfile(settings_textfile)

    return final
