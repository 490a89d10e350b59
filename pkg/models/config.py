import os
from typing import Optional

from models.errors import ConfigError

DEFAULT_N_CAP = 24
DEFAULT_ALPHA_CAP = 10 ** 6
DEFAULT_MAX_N_AUDIT = 3

N_CAP_ENV = "SDSLAB_N_CAP"
ALPHA_CAP_ENV = "SDSLAB_ALPHA_CAP"


def _env_int(name: str, default: int) -> int:
    raw = os.environ.get(name)
    if raw is None or raw.strip() == "":
        return default
    try:
        value = int(raw)
    except ValueError:
        raise ConfigError(f"environment variable {name} must be an integer, got {raw!r}") from None
    if value < 1:
        raise ConfigError(f"environment variable {name} must be positive, got {value}")
    return value


def n_cap(explicit: Optional[int] = None) -> int:
    """Vertex-count cap for exhaustive 2^n operations; an explicit value wins over the environment."""
    if explicit is not None:
        return explicit
    return _env_int(N_CAP_ENV, DEFAULT_N_CAP)


def alpha_cap(explicit: Optional[int] = None) -> int:
    """Size cap for alpha-class BFS and theta-set materialisation."""
    if explicit is not None:
        return explicit
    return _env_int(ALPHA_CAP_ENV, DEFAULT_ALPHA_CAP)
