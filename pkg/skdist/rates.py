"""Key-rate quantities: I(X:Y|Z), intrinsic information, one-way bounds and
the Markov-chain certificate for a one-way rate of I(X:Y|Z).
"""

import itertools
import logging
from collections.abc import Callable, Iterator, Sequence
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np
from scipy.optimize import OptimizeResult, minimize
from scipy.special import softmax

from skdist.common import (
    common_variable_joint,
    conditional_common_partition,
    helper_no_comm_key_rate,
    no_comm_key_rate,
)
from skdist.config import SolverOptions
from skdist.dist import (
    Alphabet,
    Channel,
    TripartiteDistribution,
    apply_channel_to_z,
    conditional_mutual_information,
    information_of,
    mutual_information,
    swap_xy,
)
from skdist.errors import AlphabetMismatchError, ProductAlphabetError
from skdist.types import Direction, FloatArray, Symbol

logger = logging.getLogger(__name__)

MARKOV_CHAINS = ("KU-X-YZ", "X-KUZ-Y", "U-Z-Y", "K-YU-Z")


# ----- Auxiliary systems -----


def _aux_alphabets(x: Alphabet) -> tuple[Alphabet, Alphabet]:
    size = len(x) + 1
    return Alphabet.range(size), Alphabet.range(size)


@dataclass(frozen=True, eq=False)
class AuxiliarySystem:
    """Channel ``p(k, u | x)`` with ``|K| = |U| = |X| + 1``.

    The channel output alphabet is the product ``K x U`` with labels ``"k|u"``.
    """

    channel: Channel

    def __post_init__(self) -> None:
        k, u = _aux_alphabets(self.channel.source)
        if self.channel.target != k.product(u):
            raise AlphabetMismatchError(
                "auxiliary channel must map X onto the product alphabet K x U "
                f"with {len(k)} symbols each"
            )

    @property
    def x(self) -> Alphabet:
        return self.channel.source

    @property
    def size(self) -> int:
        return len(self.x) + 1

    def tensor(self) -> FloatArray:
        """``t[x, k, u]``."""
        return self.channel.t.reshape(len(self.x), self.size, self.size)

    @classmethod
    def from_tensor(cls, x: Alphabet, t: FloatArray) -> "AuxiliarySystem":
        k, u = _aux_alphabets(x)
        return cls(Channel(x, k.product(u), np.asarray(t).reshape(len(x), -1)))

    @classmethod
    def from_logits(cls, x: Alphabet, logits: FloatArray) -> "AuxiliarySystem":
        k, u = _aux_alphabets(x)
        return cls(Channel.from_logits(x, k.product(u), logits))

    @classmethod
    def from_maps(
        cls, x: Alphabet, k_map: Sequence[int], u_map: Sequence[int]
    ) -> "AuxiliarySystem":
        """Deterministic ``K = k_map[X]``, ``U = u_map[X]``."""
        size = len(x) + 1
        if len(k_map) != len(x) or len(u_map) != len(x):
            raise ValueError("maps must assign one value per x symbol")
        t = np.zeros((len(x), size, size))
        for i, (k, u) in enumerate(zip(k_map, u_map)):
            if not (0 <= k < size and 0 <= u < size):
                raise ValueError(f"auxiliary values must lie in 0..{size - 1}")
            t[i, k, u] = 1.0
        return cls.from_tensor(x, t)


@dataclass(frozen=True)
class Lemma4Report:
    """Residuals of the four Markov chains, in ``MARKOV_CHAINS`` order."""

    residuals: tuple[float, float, float, float]
    objective: float
    cmi: float
    tol: float

    @property
    def certified(self) -> bool:
        return max(self.residuals) < self.tol

    @property
    def max_residual(self) -> float:
        return max(self.residuals)


def _oriented(
    d: TripartiteDistribution, direction: Direction
) -> TripartiteDistribution:
    if direction == "ab":
        return d
    if direction == "ba":
        return swap_xy(d)
    raise ValueError(f"direction must be 'ab' or 'ba', got {direction!r}")


def _kuxyz(d: TripartiteDistribution, t: FloatArray) -> FloatArray:
    return np.einsum("xku,xyz->kuxyz", t, d.p)


def _objective(joint: FloatArray) -> float:
    # axes: K=0 U=1 X=2 Y=3 Z=4
    return information_of(joint, (0,), (3,), (1,)) - information_of(
        joint, (0,), (4,), (1,)
    )


def check_lemma4_certificate(
    d: TripartiteDistribution,
    aux: AuxiliarySystem,
    tol: float = 1e-9,
    direction: Direction = "ab",
) -> Lemma4Report:
    """Evaluate the Markov chains certifying a one-way rate of ``I(X:Y|Z)``.

    For ``direction="ba"`` the roles of X and Y are exchanged first, so
    ``aux`` then acts on Bob's variable.
    """
    d = _oriented(d, direction)
    if aux.x != d.x:
        raise AlphabetMismatchError(
            "auxiliary system must act on the sender's alphabet"
        )
    joint = _kuxyz(d, aux.tensor())
    residuals = (
        0.0,
        information_of(joint, (2,), (3,), (0, 1, 4)),
        information_of(joint, (1,), (3,), (4,)),
        information_of(joint, (0,), (4,), (3, 1)),
    )
    return Lemma4Report(
        residuals=residuals,
        objective=_objective(joint),
        cmi=conditional_mutual_information(d),
        tol=tol,
    )


def _restricted_growth(n: int) -> Iterator[tuple[int, ...]]:
    """Maps ``range(n) -> range(n)`` up to relabelling of the outputs."""
    for labels in itertools.product(range(n), repeat=n):
        if labels[0] != 0:
            continue
        highest = 0
        ok = True
        for label in labels[1:]:
            if label > highest + 1:
                ok = False
                break
            highest = max(highest, label)
        if ok:
            yield labels


@dataclass(frozen=True)
class CertificateScan:
    certified: AuxiliarySystem | None
    best: Lemma4Report
    best_aux: AuxiliarySystem
    min_max_residual: float
    scanned: int


def deterministic_certificate_scan(
    d: TripartiteDistribution, direction: Direction = "ab", tol: float = 1e-9
) -> CertificateScan:
    """Try every deterministic ``K(X)``, ``U(X)`` as a Markov-chain certificate."""
    oriented = _oriented(d, direction)
    maps = list(_restricted_growth(len(oriented.x)))
    certified: AuxiliarySystem | None = None
    best: tuple[Lemma4Report, AuxiliarySystem] | None = None
    min_max = float("inf")
    for k_map in maps:
        for u_map in maps:
            aux = AuxiliarySystem.from_maps(oriented.x, k_map, u_map)
            report = check_lemma4_certificate(oriented, aux, tol)
            min_max = min(min_max, report.max_residual)
            if certified is None and report.certified:
                certified = aux
            if best is None or report.objective > best[0].objective:
                best = (report, aux)
    assert best is not None
    return CertificateScan(certified, best[0], best[1], min_max, len(maps) ** 2)


# ----- Multi-start search -----


class _Plateau:
    """Stops a run once the objective improves by less than ``fatol`` over
    ``patience`` iterations."""

    def __init__(self, patience: int, fatol: float) -> None:
        self.patience = patience
        self.fatol = fatol
        self.history: list[float] = []

    def __call__(self, intermediate_result: OptimizeResult) -> None:
        self.history.append(float(intermediate_result.fun))
        if len(self.history) > self.patience:
            if self.history[-self.patience - 1] - self.history[-1] < self.fatol:
                raise StopIteration


def _nelder_mead(
    fun: Callable[[FloatArray], float], x0: FloatArray, options: SolverOptions
) -> FloatArray:
    result = minimize(
        fun,
        x0,
        method="Nelder-Mead",
        callback=_Plateau(options.patience, options.fatol),
        options={
            "maxiter": options.iterations,
            "xatol": 1e-9,
            "fatol": options.fatol,
            "adaptive": True,
        },
    )
    return np.asarray(result.x)


def _restart_generators(options: SolverOptions) -> list[np.random.Generator]:
    # child i depends only on (seed, i), so more restarts only add starts
    children = np.random.SeedSequence(options.seed).spawn(options.restarts)
    return [np.random.Generator(np.random.Philox(child)) for child in children]


def _run_restarts[T](
    run: Callable[[int, np.random.Generator], T], options: SolverOptions
) -> list[T]:
    generators = _restart_generators(options)
    jobs = range(len(generators))
    if options.threads == 1:
        return [run(i, generators[i]) for i in jobs]
    with ThreadPoolExecutor(max_workers=options.threads) as pool:
        return list(pool.map(lambda i: run(i, generators[i]), jobs))


def _soft_logits(t: FloatArray, floor: float = 0.02) -> FloatArray:
    width = t.shape[-1]
    return np.log((1.0 - floor) * t + floor / width)


# ----- Intrinsic information -----


@dataclass(frozen=True)
class IntrinsicBound:
    value: float
    channel: Channel


def _cmi_after(d: TripartiteDistribution, t: FloatArray) -> float:
    return information_of(np.einsum("xyz,zw->xyw", d.p, t), (0,), (1,), (2,))


def _merge_channels(size: int) -> Iterator[FloatArray]:
    for labels in _restricted_growth(size):
        yield np.eye(size)[list(labels)]


def intrinsic_information_upper(
    d: TripartiteDistribution, options: SolverOptions | None = None
) -> IntrinsicBound:
    """Upper bound on ``I(X:Y↓Z)`` over channels with ``|Zbar| = |Z|``.

    Seeds the search with the identity and every deterministic merge of Z
    symbols, then runs softmax-parameterised Nelder-Mead restarts. The value
    is re-evaluated on the returned channel.
    """
    options = options or SolverOptions()
    nz = len(d.z)
    seeds = [np.eye(nz), *_merge_channels(nz)]
    seed_values = [_cmi_after(d, t) for t in seeds]
    best_seed = int(np.argmin(seed_values))

    def objective(theta: FloatArray) -> float:
        return _cmi_after(d, softmax(theta.reshape(nz, nz), axis=1))

    def run(index: int, rng: np.random.Generator) -> tuple[float, FloatArray]:
        if index == 0:
            x0 = _soft_logits(seeds[best_seed]).ravel()
        else:
            x0 = rng.normal(scale=2.0, size=nz * nz)
        theta = _nelder_mead(objective, x0, options)
        t = softmax(theta.reshape(nz, nz), axis=1)
        value = _cmi_after(d, t)
        logger.debug("intrinsic restart %d: %.12g", index, value)
        return value, t

    candidates = list(zip(seed_values, seeds)) + _run_restarts(run, options)
    # earliest candidate wins ties
    value, t = min(candidates, key=lambda item: item[0])
    channel = Channel(d.z, d.z, t)
    value = conditional_mutual_information(apply_channel_to_z(d, channel))
    logger.info("intrinsic information upper bound %.12g", value)
    return IntrinsicBound(value, channel)


# ----- One-way rates -----


def oneway_lower_bounds(d: TripartiteDistribution) -> tuple[float, float]:
    """``(I(X:Y) - I(X:Z), I(X:Y) - I(Y:Z))``, each clipped at zero."""
    ixy = mutual_information(d, "X", "Y")
    return (
        max(0.0, ixy - mutual_information(d, "X", "Z")),
        max(0.0, ixy - mutual_information(d, "Y", "Z")),
    )


@dataclass(frozen=True)
class OneWayBound:
    """Best-effort lower bound on the one-way key rate.

    ``certificate`` evaluates the Markov chains on ``aux`` with the solver
    tolerance; when it is certified the bound equals ``I(X:Y|Z)``.
    """

    value: float
    aux: AuxiliarySystem
    direction: Direction
    certificate: Lemma4Report


def ac_rate_optimize(
    d: TripartiteDistribution,
    options: SolverOptions | None = None,
    direction: Direction = "ab",
) -> OneWayBound:
    """Maximise ``I(K:Y|U) - I(K:Z|U)`` over auxiliary systems ``KU|X``.

    Every evaluated point is achievable, so the result is a valid lower
    bound; the maximum itself is not guaranteed.
    """
    options = options or SolverOptions()
    oriented = _oriented(d, direction)
    nx = len(oriented.x)
    size = nx + 1
    part, _ = common_variable_joint(oriented)
    common_labels = [max(int(k), 0) for k in part.x_labels]
    seeds = [
        AuxiliarySystem.from_maps(oriented.x, list(range(nx)), [0] * nx),
        AuxiliarySystem.from_maps(oriented.x, common_labels, [0] * nx),
        AuxiliarySystem.from_maps(oriented.x, [0] * nx, [0] * nx),
    ]
    seed_values = [_objective(_kuxyz(oriented, s.tensor())) for s in seeds]
    best_seed = int(np.argmax(seed_values))

    def to_tensor(theta: FloatArray) -> FloatArray:
        return softmax(theta.reshape(nx, size * size), axis=1).reshape(nx, size, size)

    def objective(theta: FloatArray) -> float:
        return -_objective(_kuxyz(oriented, to_tensor(theta)))

    def run(index: int, rng: np.random.Generator) -> tuple[float, AuxiliarySystem]:
        if index == 0:
            x0 = _soft_logits(seeds[best_seed].channel.t).ravel()
        else:
            x0 = rng.normal(scale=2.0, size=nx * size * size)
        aux = AuxiliarySystem.from_tensor(
            oriented.x, to_tensor(_nelder_mead(objective, x0, options))
        )
        value = _objective(_kuxyz(oriented, aux.tensor()))
        logger.debug("one-way restart %d (%s): %.12g", index, direction, value)
        return value, aux

    candidates = list(zip(seed_values, seeds)) + _run_restarts(run, options)
    value, aux = max(candidates, key=lambda item: item[0])
    certificate = check_lemma4_certificate(d, aux, options.tol, direction)
    return OneWayBound(value, aux, direction, certificate)


# ----- Double Markov chains -----


def split_product_z(
    d: TripartiteDistribution, sep: str = "|"
) -> tuple[Alphabet, Alphabet, FloatArray]:
    """Reshape a ``Z x W`` product alphabet into a joint ``p[x, y, z, w]``."""
    pairs: list[tuple[Symbol, Symbol]] = []
    for label in d.z:
        parts = label.split(sep)
        if len(parts) != 2 or not all(parts):
            raise ProductAlphabetError(f"label {label!r} is not of the form z{sep}w")
        pairs.append((parts[0], parts[1]))
    z = Alphabet(tuple(dict.fromkeys(a for a, _ in pairs)))
    w = Alphabet(tuple(dict.fromkeys(b for _, b in pairs)))
    if len(set(pairs)) != len(pairs) or len(pairs) != len(z) * len(w):
        raise ProductAlphabetError("product alphabet must list every (z, w) pair once")
    p4 = np.zeros((len(d.x), len(d.y), len(z), len(w)))
    for k, (a, b) in enumerate(pairs):
        p4[:, :, z.index(a), w.index(b)] = d.p[:, :, k]
    return z, w, p4


def join_product_z(
    p4: FloatArray, x: Alphabet, y: Alphabet, z: Alphabet, w: Alphabet, sep: str = "|"
) -> TripartiteDistribution:
    arr = np.asarray(p4, dtype=np.float64)
    return TripartiteDistribution.from_array(
        arr.reshape(len(x), len(y), len(z) * len(w)), x, y, z.product(w, sep)
    )


def double_markov_residual(
    d4: TripartiteDistribution, sep: str = "|"
) -> tuple[float, float]:
    """``(max(I(X:W|YZ), I(Y:W|XZ)), I(XY:W | J_XY|Z, Z))``.

    Both vanish together: W can satisfy X-YZ-W and Y-XZ-W only by
    depending on (X, Y) through the conditional common variable.
    """
    z, w, p4 = split_product_z(d4, sep)
    chains = max(
        information_of(p4, (0,), (3,), (1, 2)),
        information_of(p4, (1,), (3,), (0, 2)),
    )
    pxyz = TripartiteDistribution(d4.x, d4.y, z, p4.sum(axis=3))
    cond = conditional_common_partition(pxyz)
    labels = np.zeros((len(d4.x), len(z)), dtype=np.int64)
    for symbol, part in cond.partitions.items():
        labels[:, z.index(symbol)] = np.maximum(part.x_labels, 0)
    # J is a function of (X, Z): p[j, z, w]
    onehot = np.eye(len(d4.x))[labels]
    pjzw = np.einsum("xyzw,xzj->jzw", p4, onehot)
    criterion = information_of(p4, (0, 1), (3,), (2,)) - information_of(
        pjzw, (0,), (2,), (1,)
    )
    return chains, max(criterion, 0.0)


# ----- Report -----


@dataclass(frozen=True)
class RateReport:
    cmi: float
    no_comm: float
    helper_no_comm: float
    intrinsic_upper: float
    intrinsic_channel: Channel
    oneway_lb_ab: float
    oneway_lb_ba: float
    ac_opt_lb: float
    ac_witness: AuxiliarySystem | None = None
    ac_direction: Direction = "ab"
    ac_certified: bool = False


def rate_report(
    d: TripartiteDistribution, options: SolverOptions | None = None
) -> RateReport:
    options = options or SolverOptions()
    intrinsic = intrinsic_information_upper(d, options)
    lb_ab, lb_ba = oneway_lower_bounds(d)
    one_way = max(
        (ac_rate_optimize(d, options, direction) for direction in ("ab", "ba")),
        key=lambda bound: bound.value,
    )
    return RateReport(
        cmi=conditional_mutual_information(d),
        no_comm=no_comm_key_rate(d),
        helper_no_comm=helper_no_comm_key_rate(d),
        intrinsic_upper=intrinsic.value,
        intrinsic_channel=intrinsic.channel,
        oneway_lb_ab=lb_ab,
        oneway_lb_ba=lb_ba,
        ac_opt_lb=one_way.value,
        ac_witness=one_way.aux,
        ac_direction=one_way.direction,
        ac_certified=one_way.certificate.certified,
    )
