import logging
import os
from dataclasses import dataclass
from importlib.resources import files
from importlib.resources.abc import Traversable
from pathlib import Path

logger = logging.getLogger(__name__)

CORPUS_DIR_ENV = "SKDIST_CORPUS_DIR"


@dataclass(frozen=True)
class SolverOptions:
    """Settings shared by the multi-start optimisers.

    A restart stops early once the objective improves by less than ``fatol``
    over ``patience`` iterations. ``tol`` bounds the Markov residuals of a
    certified one-way witness.
    """

    restarts: int = 32
    iterations: int = 2000
    seed: int = 0
    threads: int = 1
    tol: float = 1e-9
    patience: int = 50
    fatol: float = 1e-10

    def __post_init__(self) -> None:
        if self.restarts < 0:
            raise ValueError("restarts must be non-negative")
        if self.iterations < 1:
            raise ValueError("iterations must be positive")
        if self.threads < 1:
            raise ValueError("threads must be positive")
        if self.tol <= 0:
            raise ValueError("tol must be positive")
        if self.patience < 1:
            raise ValueError("patience must be positive")
        if self.seed < 0:
            raise ValueError("seed must be non-negative")


def corpus_directory() -> Traversable:
    """Directory holding the ``*.dist`` corpus files.

    ``SKDIST_CORPUS_DIR`` overrides the copy shipped inside the package.
    """
    override = os.environ.get(CORPUS_DIR_ENV)
    if override:
        path = Path(override)
        if not path.is_dir():
            logger.warning("%s=%s is not a directory", CORPUS_DIR_ENV, override)
        return path
    return files("skdist.resources").joinpath("corpus")
