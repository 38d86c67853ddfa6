"""Line-oriented text format for tripartite distributions.

Example::

    # two perfectly correlated bits, Eve knows nothing
    x: 0 1
    y: 0 1
    z: e
    normalize: false
    0 0 e 1/2
    1 1 e 1/2

Probabilities are decimals or fractions. Entries not listed are zero.
"""

import re
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path

import numpy as np

from skdist.dist import NORMALIZATION_TOL, Alphabet, TripartiteDistribution
from skdist.errors import DistributionFileError

_HEADER_RE = re.compile(r"^(?P<key>[A-Za-z_]+)\s*:\s*(?P<value>.*)$")
_ALPHABET_KEYS = ("x", "y", "z")
_TRUE = {"true", "yes", "1"}
_FALSE = {"false", "no", "0"}


@dataclass(frozen=True)
class DistributionFile:
    distribution: TripartiteDistribution
    comments: tuple[str, ...] = ()
    normalize: bool = False

    @property
    def description(self) -> str:
        return "\n".join(self.comments)


def _parse_probability(token: str, line: int) -> Fraction:
    try:
        value = Fraction(token)
    except (ValueError, ZeroDivisionError):
        raise DistributionFileError(f"invalid probability {token!r}", line) from None
    if value < 0:
        raise DistributionFileError(f"negative probability {token}", line)
    return value


def parse(text: str) -> DistributionFile:
    """Parse a distribution document.

    Raises:
        DistributionFileError: syntax errors (with line numbers), duplicate
            entries, and totals off by more than 1e-9 without ``normalize``.
    """
    headers: dict[str, tuple[str, int]] = {}
    entries: list[tuple[tuple[str, str, str], Fraction, int]] = []
    comments: list[str] = []
    in_preamble = True

    for number, raw in enumerate(text.splitlines(), start=1):
        content, _, comment = raw.partition("#")
        line = content.strip()
        if not line:
            if in_preamble and raw.strip().startswith("#"):
                comments.append(comment.strip())
            continue
        in_preamble = False
        header = _HEADER_RE.match(line)
        if header:
            key = header["key"].lower()
            if key not in (*_ALPHABET_KEYS, "normalize"):
                raise DistributionFileError(f"unknown header {key!r}", number)
            if key in headers:
                raise DistributionFileError(f"duplicate header {key!r}", number)
            headers[key] = (header["value"].strip(), number)
            continue
        fields = line.split()
        if len(fields) != 4:
            raise DistributionFileError(
                f"expected 'x y z probability', got {len(fields)} fields", number
            )
        x, y, z, token = fields
        entries.append(((x, y, z), _parse_probability(token, number), number))

    alphabets: list[Alphabet] = []
    for key in _ALPHABET_KEYS:
        if key not in headers:
            raise DistributionFileError(f"missing alphabet header '{key}:'")
        value, number = headers[key]
        try:
            alphabets.append(Alphabet(tuple(value.split())))
        except ValueError as exc:
            raise DistributionFileError(str(exc), number) from None
    x_alph, y_alph, z_alph = alphabets

    normalize = False
    if "normalize" in headers:
        flag, number = headers["normalize"]
        if flag.lower() in _TRUE:
            normalize = True
        elif flag.lower() not in _FALSE:
            raise DistributionFileError(
                f"normalize must be true or false, got {flag!r}", number
            )

    values: dict[tuple[int, int, int], Fraction] = {}
    first_seen: dict[tuple[int, int, int], int] = {}
    for (x, y, z), value, number in entries:
        try:
            index = (x_alph.index(x), y_alph.index(y), z_alph.index(z))
        except ValueError as exc:
            raise DistributionFileError(str(exc), number) from None
        if index in values:
            raise DistributionFileError(
                f"duplicate entry ({x}, {y}, {z}), first given on line "
                f"{first_seen[index]}",
                number,
            )
        values[index] = value
        first_seen[index] = number

    total = sum(values.values(), Fraction(0))
    if total == 0:
        raise DistributionFileError("distribution has no positive entries")
    if normalize:
        values = {index: value / total for index, value in values.items()}
    elif abs(float(total - 1)) > NORMALIZATION_TOL:
        raise DistributionFileError(
            f"probabilities sum to {float(total):.12g} "
            f"(deviation {float(abs(total - 1)):.12g}); "
            "add 'normalize: true' to rescale"
        )

    p = np.zeros((len(x_alph), len(y_alph), len(z_alph)))
    for index, value in values.items():
        p[index] = float(value)
    return DistributionFile(
        TripartiteDistribution.from_array(p, x_alph, y_alph, z_alph),
        tuple(comments),
        normalize,
    )


def serialize(
    d: TripartiteDistribution, comments: tuple[str, ...] | list[str] = ()
) -> str:
    """Write ``d`` back in the text format; zero entries are omitted."""
    lines = [f"# {comment}".rstrip() for comment in comments]
    lines += [
        f"x: {' '.join(d.x)}",
        f"y: {' '.join(d.y)}",
        f"z: {' '.join(d.z)}",
    ]
    for i, j, k in np.argwhere(d.p > 0):
        lines.append(f"{d.x[i]} {d.y[j]} {d.z[k]} {float(d.p[i, j, k])!r}")
    return "\n".join(lines) + "\n"


def load(path: str | Path) -> DistributionFile:
    path = Path(path)
    try:
        return parse(path.read_text(encoding="utf-8"))
    except DistributionFileError as exc:
        raise DistributionFileError(f"{path}: {exc.message}", exc.line) from None


def save(
    path: str | Path,
    d: TripartiteDistribution,
    comments: tuple[str, ...] | list[str] = (),
) -> None:
    Path(path).write_text(serialize(d, comments), encoding="utf-8")
