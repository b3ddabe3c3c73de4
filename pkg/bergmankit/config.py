import logging
import os

import sentry_sdk

logger = logging.getLogger(__name__)

DEFAULT_SIZE_CAP = 1_000_000
DEFAULT_SAMPLES = 5
DEFAULT_SEED = 0


def _int_from_env(name: str, default: int) -> int:
    value = os.getenv(name)
    if value is None or value == "":
        return default
    try:
        return int(value)
    except ValueError:
        invalid_value_message = f"Env variable {name} must be an integer, got '{value}'"
        raise ValueError(invalid_value_message) from None


def size_cap() -> int:
    """Largest number of entries allowed in a single wedge matrix."""
    return _int_from_env("BERGMANKIT_SIZE_CAP", DEFAULT_SIZE_CAP)


def default_samples() -> int:
    return _int_from_env("BERGMANKIT_SAMPLES", DEFAULT_SAMPLES)


def default_seed() -> int:
    return _int_from_env("BERGMANKIT_SEED", DEFAULT_SEED)


def configure_logging(*, verbose: bool = False) -> None:
    logging.basicConfig(
        level=logging.DEBUG if verbose else logging.INFO,
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
    )


def configure_sentry() -> str | None:
    env = os.getenv("WORKSPACE")
    if sentry_dsn := os.getenv("SENTRY_DSN"):
        sentry_sdk.init(dsn=sentry_dsn, environment=env, traces_sample_rate=1.0)
        logger.info(
            "Sentry DSN found, exceptions will be sent to Sentry with env=%s", env
        )
        return env
    logger.info("No Sentry DSN found, exceptions will not be sent to Sentry")
    return None
