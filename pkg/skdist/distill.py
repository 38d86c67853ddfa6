"""Privacy amplification on n copies of the common variable J_XY.

Alice and Bob both compute ``J_XY`` from their own symbols, so they agree
with probability one; the key is ``kappa(J^n)`` for a random function
``kappa``, and the leakage ``log|K| - H(kappa(J^n) | Z^n)`` is evaluated
exactly by enumerating the i.i.d. product.

Random numbers come from numpy's Philox counter-based generator. Trial i
uses child i of ``SeedSequence(seed)``; the sampled mode draws its copies
from ``SeedSequence([seed, 1])``.
"""

import logging
import math
from collections.abc import Callable
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from skdist.common import common_variable_joint
from skdist.dist import SUPPORT_TOL, TripartiteDistribution, entropy
from skdist.errors import SimulationSizeError
from skdist.types import FloatArray, IntArray, SimMode

logger = logging.getLogger(__name__)

STATE_LIMIT = 10**7

type HashFunction = Callable[[IntArray], IntArray]


@dataclass(frozen=True)
class SimConfig:
    n: int
    rate: float
    trials: int = 64
    seed: int = 0
    mode: SimMode = "exact"
    samples: int = 20_000
    threads: int = 1

    def __post_init__(self) -> None:
        if self.n < 1:
            raise ValueError("n must be positive")
        if not self.rate > 0:
            raise ValueError("rate must be positive")
        if self.trials < 1:
            raise ValueError("trials must be positive")
        if not 0 <= self.seed < 2**64:
            raise ValueError("seed must be a 64-bit unsigned integer")
        if self.mode not in ("exact", "sampled"):
            raise ValueError(f"unknown mode {self.mode!r}")
        if self.samples < 1:
            raise ValueError("samples must be positive")
        if self.threads < 1:
            raise ValueError("threads must be positive")

    @property
    def key_size(self) -> int:
        """``floor(2 ** (n * rate))``, with slack for rates like 1/3."""
        exponent = self.n * self.rate
        if exponent > math.log2(STATE_LIMIT):
            raise SimulationSizeError(
                f"key alphabet 2^{exponent:g} exceeds the limit of {STATE_LIMIT}"
            )
        return max(1, math.floor(2.0**exponent + 1e-9))


@dataclass(frozen=True)
class SimResult:
    config: SimConfig
    key_size: int
    agreement: float
    leakage: float
    rate_achieved: float
    trial_leakages: tuple[float, ...] = field(repr=False)
    best_trial: int = 0


@dataclass(frozen=True, eq=False)
class RandomHash:
    """Uniformly random function ``kappa(j) = floor(u_j * key_size)``.

    Drawing one uniform per input means that, for the same draws, the hash
    to ``key_size`` is a coarsening of the hash to any multiple of it.
    """

    uniforms: FloatArray
    key_size: int

    @classmethod
    def draw(
        cls, rng: np.random.Generator, inputs: int, key_size: int
    ) -> "RandomHash":
        return cls(rng.random(inputs), key_size)

    def __call__(self, indices: IntArray) -> IntArray:
        keys = np.floor(self.uniforms[indices] * self.key_size).astype(np.int64)
        return np.minimum(keys, self.key_size - 1)


def _check_exact_size(n_j: int, n_z: int, n: int) -> None:
    states = n_j**n * n_z**n
    if states > STATE_LIMIT:
        raise SimulationSizeError(
            f"exact enumeration needs {states} states (limit {STATE_LIMIT}); "
            "lower n or use the sampled mode"
        )


def _enumerate_copies(
    pjz: FloatArray, n: int
) -> tuple[IntArray, IntArray, FloatArray]:
    """Indices of ``J^n`` and ``Z^n`` and the probability of every support sequence.

    The first copy is the most significant digit of both indices.
    """
    js, zs = np.nonzero(pjz > SUPPORT_TOL)
    weights = pjz[js, zs]
    n_j, n_z = pjz.shape
    j_idx = np.zeros(1, dtype=np.int64)
    z_idx = np.zeros(1, dtype=np.int64)
    prob = np.ones(1)
    for _ in range(n):
        j_idx = (j_idx[:, None] * n_j + js[None, :]).ravel()
        z_idx = (z_idx[:, None] * n_z + zs[None, :]).ravel()
        prob = (prob[:, None] * weights[None, :]).ravel()
    return j_idx, z_idx, prob


def _sample_copies(
    pjz: FloatArray, n: int, samples: int, seed: int
) -> tuple[IntArray, IntArray, FloatArray]:
    js, zs = np.nonzero(pjz > SUPPORT_TOL)
    weights = pjz[js, zs]
    n_j, n_z = pjz.shape
    rng = np.random.Generator(np.random.Philox(np.random.SeedSequence([seed, 1])))
    draws = rng.choice(len(weights), size=(samples, n), p=weights / weights.sum())
    powers_j = n_j ** np.arange(n - 1, -1, -1, dtype=np.int64)
    powers_z = n_z ** np.arange(n - 1, -1, -1, dtype=np.int64)
    j_idx = js[draws] @ powers_j
    z_idx = zs[draws] @ powers_z
    return j_idx, z_idx, np.full(samples, 1.0 / samples)


def _leakage(
    keys: IntArray, z_idx: IntArray, prob: FloatArray, key_size: int
) -> float:
    _, z_compact = np.unique(z_idx, return_inverse=True)
    combined = z_compact.astype(np.int64) * key_size + keys
    _, cells = np.unique(combined, return_inverse=True)
    h_kz = entropy(np.bincount(cells, weights=prob)) - entropy(
        np.bincount(z_compact, weights=prob)
    )
    return math.log2(key_size) - h_kz


def leakage_oracle(
    d: TripartiteDistribution, n: int, hash_fn: HashFunction, key_size: int
) -> float:
    """Exact ``log|K| - H(hash_fn(J^n) | Z^n)`` by full enumeration.

    ``hash_fn`` maps ``J^n`` indices (first copy most significant) to keys
    in ``0..key_size-1``.
    """
    _, pjz = common_variable_joint(d)
    _check_exact_size(*pjz.shape, n)
    j_idx, z_idx, prob = _enumerate_copies(pjz, n)
    keys = np.asarray(hash_fn(j_idx), dtype=np.int64)
    if keys.size and (keys.min() < 0 or keys.max() >= key_size):
        raise ValueError("hash values must lie in 0..key_size-1")
    return _leakage(keys, z_idx, prob, key_size)


def simulate_privacy_amplification(
    d: TripartiteDistribution, cfg: SimConfig
) -> SimResult:
    """Best leakage over ``cfg.trials`` random hashes of ``J^n``."""
    _, pjz = common_variable_joint(d)
    n_j, n_z = pjz.shape
    key_size = cfg.key_size
    inputs = n_j**cfg.n
    if cfg.mode == "exact":
        _check_exact_size(n_j, n_z, cfg.n)
        j_idx, z_idx, prob = _enumerate_copies(pjz, cfg.n)
    else:
        if inputs > STATE_LIMIT:
            raise SimulationSizeError(
                f"hash table needs {inputs} entries (limit {STATE_LIMIT})"
            )
        j_idx, z_idx, prob = _sample_copies(pjz, cfg.n, cfg.samples, cfg.seed)

    children = np.random.SeedSequence(cfg.seed).spawn(cfg.trials)

    def trial(i: int) -> float:
        rng = np.random.Generator(np.random.Philox(children[i]))
        kappa = RandomHash.draw(rng, inputs, key_size)
        value = _leakage(kappa(j_idx), z_idx, prob, key_size)
        logger.debug("trial %d: leakage %.12g", i, value)
        return value

    if cfg.threads == 1:
        leakages = tuple(trial(i) for i in range(cfg.trials))
    else:
        with ThreadPoolExecutor(max_workers=cfg.threads) as pool:
            leakages = tuple(pool.map(trial, range(cfg.trials)))
    best = int(np.argmin(leakages))
    logger.info(
        "n=%d |K|=%d: minimum leakage %.6g (trial %d)",
        cfg.n,
        key_size,
        leakages[best],
        best,
    )
    return SimResult(
        config=cfg,
        key_size=key_size,
        agreement=1.0,
        leakage=leakages[best],
        rate_achieved=math.log2(key_size) / cfg.n,
        trial_leakages=leakages,
        best_trial=best,
    )
