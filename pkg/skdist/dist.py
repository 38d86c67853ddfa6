"""Finite joint distributions and exact Shannon quantities (in bits)."""

from collections.abc import Iterable, Iterator, Mapping, Sequence
from dataclasses import dataclass
from typing import ClassVar

import numpy as np
import numpy.typing as npt
from scipy.special import entr, softmax

from skdist.errors import (
    AlphabetMismatchError,
    ChannelError,
    DistributionError,
    EmptySupportError,
    NegativeProbabilityError,
    NormalizationError,
    ZeroWeightError,
)
from skdist.types import FloatArray, Symbol

NORMALIZATION_TOL = 1e-9
SUPPORT_TOL = 1e-12
ZERO_INFO_TOL = 1e-9

_LN2 = float(np.log(2.0))
_RESERVED = frozenset("#:")


@dataclass(frozen=True)
class Alphabet:
    """Ordered set of distinct symbol labels.

    Labels may not contain whitespace, ``#`` or ``:`` so that every alphabet
    survives a round trip through the ``.dist`` text format.
    """

    labels: tuple[Symbol, ...]

    def __post_init__(self) -> None:
        labels = tuple(str(label) for label in self.labels)
        if not labels:
            raise ValueError("alphabet must contain at least one symbol")
        if len(set(labels)) != len(labels):
            raise ValueError(f"alphabet labels must be unique: {labels}")
        for label in labels:
            if not label or any(ch.isspace() or ch in _RESERVED for ch in label):
                raise ValueError(f"invalid symbol label {label!r}")
        object.__setattr__(self, "labels", labels)

    @classmethod
    def of(cls, *labels: object) -> "Alphabet":
        return cls(tuple(str(label) for label in labels))

    @classmethod
    def range(cls, size: int) -> "Alphabet":
        """Alphabet ``"0", "1", ..., str(size - 1)``."""
        if size < 1:
            raise ValueError("alphabet size must be positive")
        return cls(tuple(str(i) for i in range(size)))

    def product(self, other: "Alphabet", sep: str = "|") -> "Alphabet":
        return Alphabet(tuple(f"{a}{sep}{b}" for a in self for b in other))

    def index(self, label: Symbol) -> int:
        try:
            return self.labels.index(label)
        except ValueError:
            raise ValueError(f"unknown symbol {label!r}") from None

    def __len__(self) -> int:
        return len(self.labels)

    def __iter__(self) -> Iterator[Symbol]:
        return iter(self.labels)

    def __getitem__(self, index: int) -> Symbol:
        return self.labels[index]

    def __contains__(self, label: object) -> bool:
        return label in self.labels


def _frozen_array(values: npt.ArrayLike, ndim: int) -> FloatArray:
    arr = np.array(values, dtype=np.float64)
    if arr.ndim != ndim:
        raise AlphabetMismatchError(
            f"probability tensor must have {ndim} axes, got {arr.ndim}"
        )
    arr.flags.writeable = False
    return arr


def _check_shape(p: FloatArray, alphabets: Sequence[Alphabet]) -> None:
    expected = tuple(len(a) for a in alphabets)
    if p.shape != expected:
        raise AlphabetMismatchError(
            f"tensor shape {p.shape} does not match alphabet sizes {expected}"
        )


@dataclass(frozen=True, eq=False)
class TripartiteDistribution:
    """Dense joint pmf ``p[x, y, z]`` over three finite alphabets.

    The constructor only checks shapes; use :meth:`from_array` or
    :func:`validate` to enforce the probability invariants.
    """

    x: Alphabet
    y: Alphabet
    z: Alphabet
    p: FloatArray

    variables: ClassVar[tuple[str, ...]] = ("X", "Y", "Z")

    def __post_init__(self) -> None:
        p = _frozen_array(self.p, 3)
        _check_shape(p, (self.x, self.y, self.z))
        object.__setattr__(self, "p", p)

    @classmethod
    def from_array(
        cls,
        p: npt.ArrayLike,
        x: Alphabet | None = None,
        y: Alphabet | None = None,
        z: Alphabet | None = None,
    ) -> "TripartiteDistribution":
        arr = np.asarray(p, dtype=np.float64)
        if arr.ndim != 3:
            raise AlphabetMismatchError("probability tensor must have 3 axes")
        d = cls(
            x or Alphabet.range(arr.shape[0]),
            y or Alphabet.range(arr.shape[1]),
            z or Alphabet.range(arr.shape[2]),
            arr,
        )
        validate(d)
        return d

    @classmethod
    def from_entries(
        cls,
        entries: Mapping[tuple[Symbol, Symbol, Symbol], float],
        x: Alphabet,
        y: Alphabet,
        z: Alphabet,
    ) -> "TripartiteDistribution":
        arr = np.zeros((len(x), len(y), len(z)))
        for (a, b, c), value in entries.items():
            arr[x.index(a), y.index(b), z.index(c)] += value
        return cls.from_array(arr, x, y, z)

    @property
    def alphabets(self) -> tuple[Alphabet, ...]:
        return (self.x, self.y, self.z)

    @property
    def pz(self) -> FloatArray:
        return self.p.sum(axis=(0, 1))

    def z_weight(self, symbol: Symbol) -> float:
        return float(self.pz[self.z.index(symbol)])


@dataclass(frozen=True, eq=False)
class BipartiteDistribution:
    """Joint pmf ``p[x, y]``; also used for renormalised conditional slices."""

    x: Alphabet
    y: Alphabet
    p: FloatArray

    variables: ClassVar[tuple[str, ...]] = ("X", "Y")

    def __post_init__(self) -> None:
        p = _frozen_array(self.p, 2)
        _check_shape(p, (self.x, self.y))
        object.__setattr__(self, "p", p)

    @classmethod
    def from_array(
        cls,
        p: npt.ArrayLike,
        x: Alphabet | None = None,
        y: Alphabet | None = None,
    ) -> "BipartiteDistribution":
        arr = np.asarray(p, dtype=np.float64)
        if arr.ndim != 2:
            raise AlphabetMismatchError("probability matrix must have 2 axes")
        b = cls(
            x or Alphabet.range(arr.shape[0]), y or Alphabet.range(arr.shape[1]), arr
        )
        validate(b)
        return b

    @property
    def alphabets(self) -> tuple[Alphabet, ...]:
        return (self.x, self.y)

    @property
    def px(self) -> FloatArray:
        return self.p.sum(axis=1)

    @property
    def py(self) -> FloatArray:
        return self.p.sum(axis=0)

    def transpose(self) -> "BipartiteDistribution":
        return BipartiteDistribution(self.y, self.x, self.p.T)


@dataclass(frozen=True, eq=False)
class Marginal:
    """Joint pmf over a named subset of variables, axes in ``variables`` order."""

    variables: tuple[str, ...]
    alphabets: tuple[Alphabet, ...]
    p: FloatArray

    def __post_init__(self) -> None:
        if len(self.variables) != len(self.alphabets):
            raise AlphabetMismatchError("one alphabet per variable is required")
        p = _frozen_array(self.p, len(self.variables))
        _check_shape(p, self.alphabets)
        object.__setattr__(self, "p", p)


type Joint = TripartiteDistribution | BipartiteDistribution | Marginal


@dataclass(frozen=True)
class ValidationResult:
    total: float
    support: tuple[tuple[Symbol, ...], ...]

    @property
    def support_size(self) -> int:
        return len(self.support)


def validate(d: Joint) -> ValidationResult:
    """Check non-negativity and normalisation; report the support.

    Raises:
        NegativeProbabilityError: first negative entry in index order.
        NormalizationError: total differs from 1 by more than 1e-9.
    """
    p = d.p
    if not np.all(np.isfinite(p)):
        raise DistributionError("probabilities must be finite")
    negative = np.argwhere(p < 0)
    if len(negative):
        index = tuple(int(i) for i in negative[0])
        raise NegativeProbabilityError(index, float(p[index]))
    total = float(p.sum())
    if abs(total - 1.0) > NORMALIZATION_TOL:
        raise NormalizationError(abs(total - 1.0))
    support = tuple(
        tuple(alphabet[i] for alphabet, i in zip(d.alphabets, index))
        for index in np.argwhere(p > SUPPORT_TOL)
    )
    if not support:
        raise EmptySupportError("distribution has empty support")
    return ValidationResult(total=total, support=support)


def _axes(d: Joint, names: Iterable[str]) -> tuple[int, ...]:
    axes: list[int] = []
    for name in names:
        try:
            axis = d.variables.index(name.upper())
        except ValueError:
            raise ValueError(
                f"unknown variable {name!r}; expected one of {d.variables}"
            ) from None
        if axis in axes:
            raise ValueError(f"variable {name!r} listed twice")
        axes.append(axis)
    return tuple(axes)


def marginal(d: Joint, keep: str | Sequence[str]) -> Marginal:
    """Sum out every variable not in ``keep``; axes follow the order of ``keep``."""
    axes = _axes(d, keep)
    if not axes:
        raise ValueError("at least one variable must be kept")
    dropped = tuple(i for i in range(d.p.ndim) if i not in axes)
    summed = d.p.sum(axis=dropped) if dropped else d.p
    kept_sorted = sorted(axes)
    order = [kept_sorted.index(a) for a in axes]
    return Marginal(
        variables=tuple(d.variables[a] for a in axes),
        alphabets=tuple(d.alphabets[a] for a in axes),
        p=np.transpose(summed, order),
    )


def marginal_xy(d: TripartiteDistribution) -> BipartiteDistribution:
    return BipartiteDistribution(d.x, d.y, d.p.sum(axis=2))


def condition_on_z(
    d: TripartiteDistribution, z: Symbol
) -> tuple[BipartiteDistribution, float]:
    """Return ``p_{XY|Z=z}`` and the weight ``p_Z(z)``."""
    k = d.z.index(z)
    weight = float(d.p[:, :, k].sum())
    if weight <= SUPPORT_TOL:
        raise ZeroWeightError(z)
    return BipartiteDistribution(d.x, d.y, d.p[:, :, k] / weight), weight


def slices(
    d: TripartiteDistribution,
) -> Iterator[tuple[Symbol, BipartiteDistribution, float]]:
    """Yield ``(z, p_{XY|Z=z}, p_Z(z))`` for every z of positive weight."""
    weights = d.pz
    for k, z in enumerate(d.z):
        if weights[k] > SUPPORT_TOL:
            weight = float(weights[k])
            yield z, BipartiteDistribution(d.x, d.y, d.p[:, :, k] / weight), weight


def restrict_z(
    d: TripartiteDistribution, symbols: Iterable[Symbol]
) -> TripartiteDistribution:
    """Condition on the event ``Z in symbols`` and drop the other z values."""
    wanted = set(symbols)
    for symbol in wanted:
        d.z.index(symbol)
    keep = [k for k, z in enumerate(d.z) if z in wanted]
    sub = d.p[:, :, keep]
    total = float(sub.sum())
    if total <= SUPPORT_TOL:
        raise ZeroWeightError(",".join(sorted(wanted)))
    return TripartiteDistribution(
        d.x, d.y, Alphabet(tuple(d.z[k] for k in keep)), sub / total
    )


def swap_xy(d: TripartiteDistribution) -> TripartiteDistribution:
    return TripartiteDistribution(d.y, d.x, d.z, d.p.transpose(1, 0, 2))


# ----- Shannon quantities -----


def _h(p: npt.ArrayLike) -> float:
    return float(entr(np.asarray(p, dtype=np.float64)).sum() / _LN2)


def entropy_of(p: FloatArray, axes: Sequence[int]) -> float:
    """Entropy of the marginal of ``p`` on ``axes``."""
    if not axes:
        return 0.0
    dropped = tuple(i for i in range(p.ndim) if i not in axes)
    return _h(p.sum(axis=dropped) if dropped else p)


def information_of(
    p: FloatArray,
    a: Sequence[int],
    b: Sequence[int],
    given: Sequence[int] = (),
) -> float:
    """``I(A:B|C)`` for groups of axes of a joint tensor, clipped at zero."""
    c = tuple(given)
    value = (
        entropy_of(p, (*a, *c))
        + entropy_of(p, (*b, *c))
        - entropy_of(p, (*a, *b, *c))
        - entropy_of(p, c)
    )
    return max(value, 0.0)


def entropy(pmf: Joint | npt.ArrayLike) -> float:
    if isinstance(pmf, (TripartiteDistribution, BipartiteDistribution, Marginal)):
        return _h(pmf.p)
    return _h(pmf)


def conditional_entropy(d: Joint, target: str, given: str = "") -> float:
    t = _axes(d, target)
    c = _axes(d, given)
    return max(entropy_of(d.p, (*t, *c)) - entropy_of(d.p, c), 0.0)


def mutual_information(d: Joint, a: str = "X", b: str = "Y") -> float:
    return information_of(d.p, _axes(d, a), _axes(d, b))


def conditional_mutual_information(
    d: Joint, a: str = "X", b: str = "Y", given: str = "Z"
) -> float:
    """``I(A:B|C)`` in bits; defaults to ``I(X:Y|Z)``."""
    return information_of(d.p, _axes(d, a), _axes(d, b), _axes(d, given))


# ----- Channels -----


@dataclass(frozen=True, eq=False)
class Channel:
    """Row-stochastic matrix ``t[source, target]``."""

    source: Alphabet
    target: Alphabet
    t: FloatArray

    def __post_init__(self) -> None:
        t = np.array(self.t, dtype=np.float64)
        if t.shape != (len(self.source), len(self.target)):
            raise ChannelError(
                f"channel matrix shape {t.shape} does not match "
                f"({len(self.source)}, {len(self.target)})"
            )
        if np.any(t < 0):
            raise ChannelError("channel entries must be non-negative")
        rows = t.sum(axis=1)
        if np.any(np.abs(rows - 1.0) > NORMALIZATION_TOL):
            raise ChannelError("channel rows must sum to 1")
        t.flags.writeable = False
        object.__setattr__(self, "t", t)

    @classmethod
    def identity(cls, alphabet: Alphabet) -> "Channel":
        return cls(alphabet, alphabet, np.eye(len(alphabet)))

    @classmethod
    def constant(cls, source: Alphabet, target: Alphabet, symbol: Symbol) -> "Channel":
        t = np.zeros((len(source), len(target)))
        t[:, target.index(symbol)] = 1.0
        return cls(source, target, t)

    @classmethod
    def deterministic(
        cls,
        source: Alphabet,
        target: Alphabet,
        mapping: Mapping[Symbol, Symbol] | Sequence[int],
    ) -> "Channel":
        t = np.zeros((len(source), len(target)))
        if isinstance(mapping, Mapping):
            for a in source:
                t[source.index(a), target.index(mapping[a])] = 1.0
        else:
            if len(mapping) != len(source):
                raise ChannelError("mapping must give one output per input symbol")
            for i, j in enumerate(mapping):
                t[i, int(j)] = 1.0
        return cls(source, target, t)

    @classmethod
    def from_logits(
        cls, source: Alphabet, target: Alphabet, logits: npt.ArrayLike
    ) -> "Channel":
        theta = np.asarray(logits, dtype=np.float64).reshape(len(source), len(target))
        return cls(source, target, softmax(theta, axis=1))

    @property
    def is_deterministic(self) -> bool:
        return bool(np.all((self.t == 0.0) | (self.t == 1.0)))


def apply_channel_to_z(d: TripartiteDistribution, c: Channel) -> TripartiteDistribution:
    """Push Z through ``c``: ``p(x, y, zbar) = sum_z p(x, y, z) t[z, zbar]``."""
    if c.source != d.z:
        raise AlphabetMismatchError(
            "channel input alphabet must equal the distribution's Z alphabet"
        )
    return TripartiteDistribution(
        d.x, d.y, c.target, np.einsum("xyz,zw->xyw", d.p, c.t)
    )
