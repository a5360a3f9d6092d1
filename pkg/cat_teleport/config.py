import logging
import os

logger = logging.getLogger(__name__)

DEFAULT_MAX_PHOTONS = 512
DEFAULT_MASS_TOLERANCE = 1e-10
DEFAULT_MIN_RETAINED_NORM = 0.999
DEFAULT_MAX_FOCK_ELEMENTS = 2 ** 23


class Settings:
    """Central configuration for environment variables."""

    @property
    def max_photons(self) -> int:
        return self._get_int("CAT_TELEPORT_MAX_PHOTONS", DEFAULT_MAX_PHOTONS)

    @property
    def mass_tolerance(self) -> float:
        return self._get_float("CAT_TELEPORT_MASS_TOLERANCE", DEFAULT_MASS_TOLERANCE)

    @property
    def min_retained_norm(self) -> float:
        return self._get_float("CAT_TELEPORT_MIN_RETAINED_NORM", DEFAULT_MIN_RETAINED_NORM)

    @property
    def max_fock_elements(self) -> int:
        return self._get_int("CAT_TELEPORT_MAX_FOCK_ELEMENTS", DEFAULT_MAX_FOCK_ELEMENTS)

    @property
    def log_level(self) -> str:
        return os.getenv("CAT_TELEPORT_LOG_LEVEL", "WARNING").upper()

    def _get_int(self, name: str, default: int) -> int:
        raw = os.getenv(name)
        if not raw:
            return default
        try:
            value = int(raw)
        except ValueError:
            logger.warning(f"Ignoring malformed {name}={raw!r}, using {default}")
            return default
        if value <= 0:
            logger.warning(f"Ignoring non-positive {name}={raw!r}, using {default}")
            return default
        return value

    def _get_float(self, name: str, default: float) -> float:
        raw = os.getenv(name)
        if not raw:
            return default
        try:
            value = float(raw)
        except ValueError:
            logger.warning(f"Ignoring malformed {name}={raw!r}, using {default}")
            return default
        if not 0.0 < value < 1.0:
            logger.warning(f"Ignoring out-of-range {name}={raw!r}, using {default}")
            return default
        return value


settings = Settings()
