"""Logging and error-tracking bootstrap."""

from __future__ import annotations

import logging
import os

import sentry_sdk
from sentry_sdk.integrations.logging import LoggingIntegration

from aqualume import __version__
from aqualume.config import Settings

logger = logging.getLogger("aqualume.telemetry")

LOG_FORMAT = "%(asctime)s | %(levelname)s | %(name)s | %(message)s"


def configure_logging(level: str = "info") -> None:
    """Configure the global logging setup only once."""

    if logging.getLogger().handlers:
        logging.getLogger().setLevel(level.upper())
        return
    logging.basicConfig(level=level.upper(), format=LOG_FORMAT)
    logger.debug("Logging configured with level %s", level.upper())


def init_sentry(settings: Settings) -> bool:
    """Initialise Sentry when a DSN is configured; returns whether it is active."""

    dsn = settings.sentry_dsn or os.getenv("SENTRY_DSN", "")
    if not dsn:
        logger.debug("SENTRY_DSN not configured - error tracking disabled")
        return False

    sentry_sdk.init(
        dsn=dsn,
        integrations=[
            LoggingIntegration(
                level=logging.INFO,
                event_level=logging.ERROR,
            ),
        ],
        release=f"aqualume@{__version__}",
        environment=settings.environment,
        attach_stacktrace=True,
        send_default_pii=False,
        traces_sample_rate=0.0,
    )
    logger.info("Sentry initialized for error tracking (release: aqualume@%s)", __version__)
    return True


def capture_failure(exc: BaseException) -> None:
    """Forward an unexpected failure to Sentry (no-op when not initialised)."""
    sentry_sdk.capture_exception(exc)
