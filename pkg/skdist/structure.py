"""Structural classes of tripartite distributions and the two necessary
conditions for the one-way and two-way key rates to reach I(X:Y|Z).
"""

from dataclasses import dataclass, field

import numpy as np

from skdist.common import (
    CommonBlock,
    CommonPartition,
    conditional_common_partition,
    maximal_common_partition,
    no_comm_key_rate,
)
from skdist.dist import (
    SUPPORT_TOL,
    ZERO_INFO_TOL,
    BipartiteDistribution,
    Channel,
    TripartiteDistribution,
    apply_channel_to_z,
    condition_on_z,
    conditional_mutual_information,
    entropy,
    information_of,
    marginal_xy,
    slices,
)
from skdist.errors import (
    AlphabetMismatchError,
    PreconditionError,
    ReductionFailedError,
)
from skdist.types import DominanceCase, FloatArray, Symbol

THEOREM3_PASS = "pass"
THEOREM3_FAIL = "one-way K < I(X:Y|Z)"
THEOREM4_GAP = "K < I(X:Y|Z)"
THEOREM4_NONE = "no witness"

EPSILON_GRID = tuple(2.0**-k for k in range(1, 21))


@dataclass(frozen=True)
class UniformBlockCheck:
    holds: bool
    witness: Symbol | None
    residual: float


@dataclass(frozen=True)
class Theorem3Violation:
    z: Symbol
    block_i: CommonBlock
    block_j: CommonBlock
    mass: float


@dataclass(frozen=True)
class Dominance:
    case: DominanceCase
    swapped: bool


@dataclass(frozen=True)
class Theorem4Witness:
    z0: Symbol
    z1: Symbol
    case: DominanceCase
    swapped: bool
    pair: tuple[Symbol, Symbol]


@dataclass(frozen=True)
class Theorem4Result:
    witnesses: tuple[Theorem4Witness, ...]

    @property
    def verdict(self) -> str:
        return THEOREM4_GAP if self.witnesses else THEOREM4_NONE

    def for_pair(self, z0: Symbol, z1: Symbol) -> Theorem4Witness | None:
        for witness in self.witnesses:
            if witness.z0 == z0 and witness.z1 == z1:
                return witness
        return None


@dataclass(frozen=True)
class StructureReport:
    is_uniform_block: bool
    uniform_block_witness: Symbol | None
    uniform_block_residual: float
    is_ubi: bool
    thm3_violations: tuple[Theorem3Violation, ...]
    thm4_witnesses: tuple[Theorem4Witness, ...]
    verdicts: dict[str, str] = field(default_factory=dict)


@dataclass(frozen=True)
class MixingCurve:
    """Samples of ``f(t) = I(X:Y)`` along the mixture of two slices."""

    z0: Symbol
    z1: Symbol
    samples: tuple[tuple[float, float], ...]
    f0: float
    f1: float
    chord_gap: float
    gap_at: float
    convex_near_zero: bool


@dataclass(frozen=True)
class ReducingChannel:
    channel: Channel
    epsilon: float
    value: float
    baseline: float


# ----- Uniform block -----


def _global_labels_on_slice(
    part: CommonPartition, slice_part: CommonPartition
) -> set[int]:
    active = slice_part.x_labels >= 0
    return {int(k) for k in part.x_labels[active]}


def is_uniform_block(d: TripartiteDistribution) -> UniformBlockCheck:
    """UB iff ``H(J_XY|Z | Z, J_XY) < 1e-9``.

    The witness is the first z whose slice partition has more blocks than
    the unconditional blocks it meets.
    """
    part = maximal_common_partition(marginal_xy(d))
    cond = conditional_common_partition(d)
    # J_XY is a function of J_XY|Z=z on every slice, so the conditional
    # entropy is a difference of the two key rates
    residual = max(cond.entropy - no_comm_key_rate(d), 0.0)
    if residual < ZERO_INFO_TOL:
        return UniformBlockCheck(True, None, residual)
    witness = next(
        (
            z
            for z, slice_part in cond.partitions.items()
            if len(slice_part) > len(_global_labels_on_slice(part, slice_part))
        ),
        None,
    )
    return UniformBlockCheck(False, witness, residual)


def _with_common_axis(d: TripartiteDistribution, part: CommonPartition) -> FloatArray:
    labels = np.where(part.x_labels < 0, 0, part.x_labels)
    onehot = np.eye(len(part))[labels]
    return np.einsum("xyz,xj->xyzj", d.p, onehot)


def within_block_information(d: TripartiteDistribution) -> float:
    """``I(X:Y | Z, J_XY)``."""
    part = maximal_common_partition(marginal_xy(d))
    return information_of(_with_common_axis(d, part), (0,), (1,), (2, 3))


def is_ubi(d: TripartiteDistribution) -> bool:
    return (
        is_uniform_block(d).holds and within_block_information(d) < ZERO_INFO_TOL
    )


# ----- One-Way Block Condition -----


def check_theorem3(d: TripartiteDistribution) -> list[Theorem3Violation]:
    """Cross-block masses ``p_XY(X_i, Y_j)`` for distinct blocks of each slice.

    An empty list means the necessary condition for a one-way rate of
    ``I(X:Y|Z)`` holds in both directions.
    """
    pxy = marginal_xy(d).p
    violations: list[Theorem3Violation] = []
    for z, part in conditional_common_partition(d).partitions.items():
        for i, block_i in enumerate(part.blocks):
            rows = np.flatnonzero(part.x_labels == i)
            for j, block_j in enumerate(part.blocks):
                if i == j:
                    continue
                cols = np.flatnonzero(part.y_labels == j)
                mass = float(pxy[np.ix_(rows, cols)].sum())
                if mass > SUPPORT_TOL:
                    violations.append(Theorem3Violation(z, block_i, block_j, mass))
    return violations


# ----- Dominance and Two-Way Witnesses -----


def _is_uncorrelated(q: FloatArray) -> bool:
    return information_of(q / q.sum(), (0,), (1,)) < SUPPORT_TOL


def _dominates_oriented(q: FloatArray, p: FloatArray) -> DominanceCase | None:
    qx, qy = q.sum(axis=1) > SUPPORT_TOL, q.sum(axis=0) > SUPPORT_TOL
    px, py = p.sum(axis=1) > SUPPORT_TOL, p.sum(axis=0) > SUPPORT_TOL
    if np.any(qx & ~px):
        return None
    if _is_uncorrelated(q):
        return "i"
    outside = np.flatnonzero(qy & ~py)
    if outside.size == 0:
        return "ii"
    for col in outside:
        column = q[:, col]
        if entropy(column / column.sum()) >= ZERO_INFO_TOL:
            return None
    return "iii"


def dominates(q: BipartiteDistribution, p: BipartiteDistribution) -> Dominance | None:
    """The relation ``q ◀ p`` between two slices over the same alphabets.

    Tries the given orientation first, then X and Y exchanged in both
    distributions. Support inclusion is non-strict.
    """
    if q.x != p.x or q.y != p.y:
        raise AlphabetMismatchError("both slices must share the X and Y alphabets")
    case = _dominates_oriented(q.p, p.p)
    if case is not None:
        return Dominance(case, swapped=False)
    case = _dominates_oriented(q.p.T, p.p.T)
    if case is not None:
        return Dominance(case, swapped=True)
    return None


def check_theorem4(d: TripartiteDistribution) -> Theorem4Result:
    """Scan ordered slice pairs for a witness of ``K(X:Y||Z) < I(X:Y|Z)``."""
    present = list(slices(d))
    witnesses: list[Theorem4Witness] = []
    for z0, p0, _ in present:
        rows = p0.px > SUPPORT_TOL
        cols = p0.py > SUPPORT_TOL
        rectangle = np.outer(rows, cols)
        for z1, p1, _ in present:
            if z1 == z0:
                continue
            relation = dominates(p1, p0)
            if relation is None:
                continue
            hits = np.argwhere(rectangle & (p1.p > SUPPORT_TOL) & (p0.p <= SUPPORT_TOL))
            if len(hits) == 0:
                continue
            i, j = (int(v) for v in hits[0])
            witnesses.append(
                Theorem4Witness(
                    z0, z1, relation.case, relation.swapped, (d.x[i], d.y[j])
                )
            )
    return Theorem4Result(tuple(witnesses))


def construct_reducing_channel(
    d: TripartiteDistribution, z0: Symbol, z1: Symbol
) -> ReducingChannel:
    """Channel sending ``z1`` to ``z0`` with probability epsilon.

    Returns the largest epsilon in ``EPSILON_GRID`` that lowers ``I(X:Y|Z)``
    by more than 1e-9.

    Raises:
        PreconditionError: no two-way witness for ``(z0, z1)``.
        ReductionFailedError: no epsilon in the grid lowers the value.
    """
    if z0 == z1:
        raise PreconditionError("z0 and z1 must differ")
    if check_theorem4(d).for_pair(z0, z1) is None:
        raise PreconditionError(f"no two-way witness for z0={z0!r}, z1={z1!r}")
    i0, i1 = d.z.index(z0), d.z.index(z1)
    baseline = conditional_mutual_information(d)
    best = baseline
    for epsilon in EPSILON_GRID:
        t = np.eye(len(d.z))
        t[i1, i1] = 1.0 - epsilon
        t[i1, i0] = epsilon
        channel = Channel(d.z, d.z, t)
        value = conditional_mutual_information(apply_channel_to_z(d, channel))
        best = min(best, value)
        if value < baseline - ZERO_INFO_TOL:
            return ReducingChannel(channel, epsilon, value, baseline)
    raise ReductionFailedError(best, baseline)


# ----- Mixing curve -----


def mixing_curve(
    d: TripartiteDistribution, z0: Symbol, z1: Symbol, grid: int = 101
) -> MixingCurve:
    if grid < 3:
        raise ValueError("grid must contain at least 3 points")
    p0, _ = condition_on_z(d, z0)
    p1, _ = condition_on_z(d, z1)
    ts = np.linspace(0.0, 1.0, grid)
    f = np.array(
        [information_of((1.0 - t) * p0.p + t * p1.p, (0,), (1,)) for t in ts]
    )
    gaps = (1.0 - ts) * f[0] + ts * f[-1] - f
    k = int(np.argmax(gaps))
    head = f[: min(grid, 6)]
    return MixingCurve(
        z0=z0,
        z1=z1,
        samples=tuple((float(t), float(v)) for t, v in zip(ts, f)),
        f0=float(f[0]),
        f1=float(f[-1]),
        chord_gap=max(float(gaps[k]), 0.0),
        gap_at=float(ts[k]),
        convex_near_zero=bool(np.all(np.diff(head, 2) > 0)),
    )


# ----- Report -----


def classify(d: TripartiteDistribution) -> StructureReport:
    ub = is_uniform_block(d)
    ubi = ub.holds and within_block_information(d) < ZERO_INFO_TOL
    thm3 = tuple(check_theorem3(d))
    thm4 = check_theorem4(d)
    verdicts = {
        "uniform_block": "yes" if ub.holds else f"no (z={ub.witness})",
        "ubi": "K^c.r. = I(X:Y|Z)" if ubi else "K^c.r. < I(X:Y|Z)",
        "theorem3": THEOREM3_FAIL if thm3 else THEOREM3_PASS,
        "theorem4": thm4.verdict,
    }
    return StructureReport(
        is_uniform_block=ub.holds,
        uniform_block_witness=ub.witness,
        uniform_block_residual=ub.residual,
        is_ubi=ubi,
        thm3_violations=thm3,
        thm4_witnesses=thm4.witnesses,
        verdicts=verdicts,
    )
