"""Maximal common partitions and the common variables J_XY, J_XY|Z."""

from collections import deque
from collections.abc import Iterator, Mapping
from dataclasses import dataclass

import numpy as np

from skdist.dist import (
    SUPPORT_TOL,
    Alphabet,
    BipartiteDistribution,
    TripartiteDistribution,
    entropy,
    marginal_xy,
    slices,
)
from skdist.errors import EmptySupportError
from skdist.types import FloatArray, IntArray, Symbol


class UnionFind:
    """Disjoint sets over ``0..size-1`` with path compression."""

    def __init__(self, size: int) -> None:
        self.parents = list(range(size))
        self.num_components = size

    def find(self, elem: int) -> int:
        root = elem
        while root != self.parents[root]:
            root = self.parents[root]
        # compress
        while elem != root:
            self.parents[elem], elem = root, self.parents[elem]
        return root

    def union(self, a: int, b: int) -> None:
        ra, rb = self.find(a), self.find(b)
        if ra == rb:
            return
        # keep the smaller index as root so roots are stable
        if rb < ra:
            ra, rb = rb, ra
        self.parents[rb] = ra
        self.num_components -= 1

    def components(self) -> list[list[int]]:
        groups: dict[int, list[int]] = {}
        for i in range(len(self.parents)):
            groups.setdefault(self.find(i), []).append(i)
        return list(groups.values())


@dataclass(frozen=True)
class CommonBlock:
    xs: tuple[Symbol, ...]
    ys: tuple[Symbol, ...]
    weight: float


@dataclass(frozen=True, eq=False)
class CommonPartition:
    """Blocks ``(X_i, Y_i)`` of a maximal common partitioning.

    ``x_labels[i]`` is the block index of the i-th x symbol (the value of J),
    or -1 for a null symbol with zero marginal probability. Blocks are ordered
    by their smallest x index.
    """

    x: Alphabet
    y: Alphabet
    blocks: tuple[CommonBlock, ...]
    x_labels: IntArray
    y_labels: IntArray

    def __len__(self) -> int:
        return len(self.blocks)

    def __iter__(self) -> Iterator[CommonBlock]:
        return iter(self.blocks)

    @property
    def weights(self) -> FloatArray:
        return np.array([block.weight for block in self.blocks])

    @property
    def entropy(self) -> float:
        return entropy(self.weights)

    @property
    def null_x(self) -> tuple[Symbol, ...]:
        return tuple(s for s, k in zip(self.x, self.x_labels) if k < 0)

    @property
    def null_y(self) -> tuple[Symbol, ...]:
        return tuple(s for s, k in zip(self.y, self.y_labels) if k < 0)

    def block_of_x(self, symbol: Symbol) -> int:
        return int(self.x_labels[self.x.index(symbol)])

    def block_of_y(self, symbol: Symbol) -> int:
        return int(self.y_labels[self.y.index(symbol)])

    def block_sets(self) -> frozenset[tuple[frozenset[Symbol], frozenset[Symbol]]]:
        """Blocks as a label-free set, for comparing partitions."""
        return frozenset((frozenset(b.xs), frozenset(b.ys)) for b in self.blocks)


def maximal_common_partition(b: BipartiteDistribution) -> CommonPartition:
    """Connected components of the support graph of ``p_XY``.

    x and y are joined by an edge iff ``p(x, y) > 1e-12``; every component
    is one block. Symbols without an edge are null symbols.
    """
    support = b.p > SUPPORT_TOL
    nx, ny = support.shape
    if not support.any():
        raise EmptySupportError("distribution has empty support")
    uf = UnionFind(nx + ny)
    for i, j in np.argwhere(support):
        uf.union(int(i), nx + int(j))

    x_active = support.any(axis=1)
    y_active = support.any(axis=0)
    block_of_root: dict[int, int] = {}
    x_labels = np.full(nx, -1, dtype=np.int64)
    for i in range(nx):
        if x_active[i]:
            root = uf.find(i)
            x_labels[i] = block_of_root.setdefault(root, len(block_of_root))
    y_labels = np.full(ny, -1, dtype=np.int64)
    for j in range(ny):
        if y_active[j]:
            y_labels[j] = block_of_root[uf.find(nx + j)]

    blocks = tuple(
        CommonBlock(
            xs=tuple(b.x[i] for i in np.flatnonzero(x_labels == k)),
            ys=tuple(b.y[j] for j in np.flatnonzero(y_labels == k)),
            weight=float(b.p[x_labels == k].sum()),
        )
        for k in range(len(block_of_root))
    )
    x_labels.flags.writeable = False
    y_labels.flags.writeable = False
    return CommonPartition(b.x, b.y, blocks, x_labels, y_labels)


def common_variable_entropy(b: BipartiteDistribution) -> float:
    """Gács-Körner common information ``H(J_XY)``."""
    return maximal_common_partition(b).entropy


def connecting_path(
    b: BipartiteDistribution, x: Symbol, x_end: Symbol
) -> tuple[Symbol, ...]:
    """Shortest alternating path ``x, y1, x1, ..., x_end`` through the support.

    Every consecutive (x, y) pair on the path has ``p(x, y) > 1e-12``.

    Raises:
        ValueError: if the two symbols do not share a block.
    """
    support = b.p > SUPPORT_TOL
    start, goal = b.x.index(x), b.x.index(x_end)
    if not support[start].any() or not support[goal].any():
        raise ValueError("null symbols are not connected to anything")
    # nodes: ("x", i) / ("y", j)
    previous: dict[tuple[str, int], tuple[str, int] | None] = {("x", start): None}
    queue: deque[tuple[str, int]] = deque([("x", start)])
    while queue:
        node = queue.popleft()
        if node == ("x", goal):
            break
        side, idx = node
        if side == "x":
            neighbours = [("y", int(j)) for j in np.flatnonzero(support[idx])]
        else:
            neighbours = [("x", int(i)) for i in np.flatnonzero(support[:, idx])]
        for nxt in neighbours:
            if nxt not in previous:
                previous[nxt] = node
                queue.append(nxt)
    if ("x", goal) not in previous:
        raise ValueError(f"{x!r} and {x_end!r} lie in different blocks")

    path: list[Symbol] = []
    cursor: tuple[str, int] | None = ("x", goal)
    while cursor is not None:
        side, idx = cursor
        path.append(b.x[idx] if side == "x" else b.y[idx])
        cursor = previous[cursor]
    return tuple(reversed(path))


@dataclass(frozen=True)
class ConditionalCommonPartition:
    """Per-z maximal common partitions of ``p_XY|Z=z`` (positive-weight z only)."""

    z: Alphabet
    partitions: Mapping[Symbol, CommonPartition]
    weights: Mapping[Symbol, float]

    def __getitem__(self, z: Symbol) -> CommonPartition:
        return self.partitions[z]

    def __iter__(self) -> Iterator[Symbol]:
        return iter(self.partitions)

    @property
    def entropy(self) -> float:
        """``H(J_XY|Z | Z)``."""
        return float(
            sum(self.weights[z] * part.entropy for z, part in self.partitions.items())
        )


def conditional_common_partition(
    d: TripartiteDistribution,
) -> ConditionalCommonPartition:
    partitions: dict[Symbol, CommonPartition] = {}
    weights: dict[Symbol, float] = {}
    for z, slice_, weight in slices(d):
        partitions[z] = maximal_common_partition(slice_)
        weights[z] = weight
    return ConditionalCommonPartition(d.z, partitions, weights)


def common_variable_joint(
    d: TripartiteDistribution,
) -> tuple[CommonPartition, FloatArray]:
    """Partition of ``p_XY`` and the joint ``p[j, z]`` of ``J_XY`` with Z."""
    part = maximal_common_partition(marginal_xy(d))
    pjz = np.stack(
        [d.p[part.x_labels == k].sum(axis=(0, 1)) for k in range(len(part))]
    )
    return part, pjz


def no_comm_key_rate(d: TripartiteDistribution) -> float:
    """``H(J_XY|Z)``, the key rate with common randomness and no communication."""
    _, pjz = common_variable_joint(d)
    return max(entropy(pjz) - entropy(pjz.sum(axis=0)), 0.0)


def helper_no_comm_key_rate(d: TripartiteDistribution) -> float:
    """``H(J_XY|Z | Z)``, the private key rate when Eve helps."""
    return conditional_common_partition(d).entropy
