"""Application configuration."""

from pathlib import Path

from dotenv import load_dotenv
from pydantic_settings import BaseSettings, SettingsConfigDict

load_dotenv()


class Settings(BaseSettings):
    """Application settings loaded from environment variables.

    Every field can be overridden with a ``MONOPOLE_LAB_`` prefixed variable,
    e.g. ``MONOPOLE_LAB_THREADS=4``.
    """

    # Paths
    BASE_DIR: Path = Path(__file__).parent.parent
    DATA_DIR: Path = BASE_DIR / "data"
    MANIFOLDS_DIR: Path = DATA_DIR / "manifolds"
    OUTPUT_DIR: Path = BASE_DIR / "runs"

    # Execution
    THREADS: int = 1
    LOG_LEVEL: str = "WARNING"

    # Lattice limits
    MAX_FLUX: int = 8
    MAX_SITES: int = 2_000_000

    # Tolerances
    GAUGE_TOL: float = 1e-10
    POISSON_MAX_ITERS: int = 10_000
    GRAD_TOL: float = 1e-8
    MAX_ITERS: int = 5_000
    GAUGE_FIX_PERIOD: int = 50

    # Weitzenböck refinement study
    WEITZENBOCK_SIZES: tuple[int, ...] = (8, 16, 32)

    model_config = SettingsConfigDict(
        env_file=".env", env_prefix="MONOPOLE_LAB_", extra="ignore"
    )


settings = Settings()
