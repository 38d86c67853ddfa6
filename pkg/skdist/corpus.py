"""Built-in example distributions and the properties each one must satisfy.

Distributions live in ``skdist/resources/corpus/*.dist``; the leading comment
block of each file is its description. Predicates are attached by entry name
and are re-checked every time the corpus is loaded with ``verify=True``.
"""

import logging
from collections.abc import Callable
from dataclasses import dataclass, field

from skdist.common import helper_no_comm_key_rate, no_comm_key_rate
from skdist.config import corpus_directory
from skdist.dist import (
    TripartiteDistribution,
    apply_channel_to_z,
    condition_on_z,
    conditional_mutual_information,
    restrict_z,
)
from skdist.errors import CorpusError, DistributionFileError
from skdist.fileformat import parse
from skdist.rates import (
    AuxiliarySystem,
    check_lemma4_certificate,
    deterministic_certificate_scan,
)
from skdist.structure import (
    check_theorem3,
    check_theorem4,
    construct_reducing_channel,
    dominates,
    is_ubi,
    is_uniform_block,
)
from skdist.types import Direction

logger = logging.getLogger(__name__)

type Check = Callable[[TripartiteDistribution], bool]


@dataclass(frozen=True)
class Predicate:
    description: str
    check: Check = field(repr=False)


@dataclass(frozen=True)
class CorpusEntry:
    name: str
    distribution: TripartiteDistribution
    description: str = ""
    predicates: tuple[Predicate, ...] = ()


@dataclass(frozen=True)
class PredicateOutcome:
    entry: str
    predicate: str
    passed: bool
    error: str | None = None


def _close(a: float, b: float, tol: float = 1e-9) -> bool:
    return abs(a - b) < tol


def _cmi(value: float) -> Predicate:
    return Predicate(
        f"I(X:Y|Z) = {value:.6g}",
        lambda d: _close(conditional_mutual_information(d), value),
    )


def _pair_prob(d: TripartiteDistribution, x: str, y: str, z: str) -> float:
    slice_, _ = condition_on_z(d, z)
    return float(slice_.p[d.x.index(x), d.y.index(y)])


def _witness(z0: str, z1: str, case: str | None = None) -> Predicate:
    def check(d: TripartiteDistribution) -> bool:
        witness = check_theorem4(d).for_pair(z0, z1)
        return witness is not None and (case is None or witness.case == case)

    label = f"two-way witness for (z0={z0}, z1={z1})"
    return Predicate(label + (f" in case ({case})" if case else ""), check)


def _reduces(z0: str, z1: str) -> Predicate:
    def check(d: TripartiteDistribution) -> bool:
        found = construct_reducing_channel(d, z0, z1)
        # recompute from the channel itself
        value = conditional_mutual_information(apply_channel_to_z(d, found.channel))
        return value <= conditional_mutual_information(d) - 1e-6

    return Predicate(f"mixing z={z1} into z={z0} lowers I(X:Y|Z)", check)


def _scan_fails(direction: Direction) -> Predicate:
    def check(d: TripartiteDistribution) -> bool:
        return deterministic_certificate_scan(d, direction).min_max_residual > 1e-6

    return Predicate(f"no deterministic certificate in direction {direction}", check)


def _fig4_bob_certificate(d: TripartiteDistribution) -> bool:
    aux = AuxiliarySystem.from_maps(d.y, [0, 1, 2], [1, 1, 0])
    report = check_lemma4_certificate(d, aux, direction="ba")
    return report.certified and _close(report.objective, 1 / 3)


def _fig3_no_dominance(d: TripartiteDistribution) -> bool:
    p0, _ = condition_on_z(d, "0")
    p1, _ = condition_on_z(d, "1")
    return dominates(p1, p0) is None and dominates(p0, p1) is None


_UB = Predicate("uniform block", lambda d: is_uniform_block(d).holds)
_NOT_UB = Predicate("not uniform block", lambda d: not is_uniform_block(d).holds)
_UBI = Predicate("UBI", is_ubi)
_NOT_UBI = Predicate("not UBI", lambda d: not is_ubi(d))
_THM3_PASS = Predicate("one-way block condition holds", lambda d: not check_theorem3(d))
_NO_WITNESS = Predicate(
    "no two-way witness", lambda d: not check_theorem4(d).witnesses
)


def _violations(count: int) -> Predicate:
    return Predicate(
        f"exactly {count} one-way block violation(s)",
        lambda d: len(check_theorem3(d)) == count,
    )


PREDICATES: dict[str, tuple[Predicate, ...]] = {
    "perfect-bit": (_cmi(1.0), _UBI, _NO_WITNESS),
    "independent-cube": (
        _cmi(0.0),
        Predicate("H(J_XY|Z) = 0", lambda d: _close(no_comm_key_rate(d), 0.0)),
    ),
    "mix-corr-uncorr": (
        _cmi(0.5),
        _NOT_UBI,
        _violations(2),
        _witness("corr", "unc", "i"),
        _reduces("corr", "unc"),
    ),
    "ubi-demo": (
        _cmi(0.5),
        Predicate("H(J_XY|Z) = 0.5", lambda d: _close(no_comm_key_rate(d), 0.5)),
        _UBI,
        _THM3_PASS,
        _NO_WITNESS,
    ),
    "not-ub-demo": (
        _NOT_UB,
        Predicate("H(J_XY|Z) = 0", lambda d: _close(no_comm_key_rate(d), 0.0)),
        Predicate(
            "H(J_XY|Z | Z) = 0.5",
            lambda d: _close(helper_no_comm_key_rate(d), 0.5),
        ),
        Predicate(
            "uniform block witness is z=0",
            lambda d: is_uniform_block(d).witness == "0",
        ),
    ),
    "ub-not-ubi-demo": (_UB, _NOT_UBI),
    "fig1a-demo": (_NOT_UB,),
    "fig1b-demo": (_UB, _NOT_UBI),
    "fig2a-demo": (_violations(1), _witness("1", "0", "ii")),
    "fig2b-demo": (
        Predicate(
            "p(1,1|z=1) = 1/3",
            lambda d: _close(_pair_prob(d, "1", "1", "1"), 1 / 3),
        ),
        Predicate("p(1,1|z=2) = 0", lambda d: _pair_prob(d, "1", "1", "2") == 0.0),
        _THM3_PASS,
        _witness("2", "1"),
        _reduces("2", "1"),
    ),
    "fig3-demo": (
        Predicate("p(0,1|z=0) > 0", lambda d: _pair_prob(d, "0", "1", "0") > 0.0),
        Predicate("p(0,1|z=1) = 0", lambda d: _pair_prob(d, "0", "1", "1") == 0.0),
        _violations(1),
        _NO_WITNESS,
        Predicate("slices 0 and 1 are not comparable", _fig3_no_dominance),
    ),
    "fig4-demo": (
        _cmi(1 / 3),
        _THM3_PASS,
        _scan_fails("ab"),
        Predicate("Bob certifies a one-way rate of 1/3", _fig4_bob_certificate),
        Predicate(
            "dropping z=2 restores Alice's certificate",
            lambda d: deterministic_certificate_scan(restrict_z(d, ("0", "1")))
            .certified
            is not None,
        ),
    ),
    "fig5-demo": (_THM3_PASS, _scan_fails("ab"), _scan_fails("ba")),
}


def _evaluate(
    name: str, predicate: Predicate, d: TripartiteDistribution
) -> PredicateOutcome:
    try:
        passed = bool(predicate.check(d))
    except ValueError as exc:
        return PredicateOutcome(name, predicate.description, False, str(exc))
    return PredicateOutcome(name, predicate.description, passed)


def verify_entry(entry: CorpusEntry) -> list[PredicateOutcome]:
    outcomes = [_evaluate(entry.name, p, entry.distribution) for p in entry.predicates]
    for outcome in outcomes:
        logger.debug(
            "%s: %s -> %s", outcome.entry, outcome.predicate, outcome.passed
        )
    return outcomes


def verify_corpus(entries: dict[str, CorpusEntry]) -> list[PredicateOutcome]:
    """Outcome of every predicate, ordered by entry name."""
    return [
        outcome for name in sorted(entries) for outcome in verify_entry(entries[name])
    ]


def load_corpus(verify: bool = True) -> dict[str, CorpusEntry]:
    """Read every ``*.dist`` file of the corpus directory, keyed by name.

    Raises:
        CorpusError: a file fails to parse or, with ``verify``, a predicate
            does not hold.
    """
    directory = corpus_directory()
    entries: dict[str, CorpusEntry] = {}
    try:
        files = sorted(
            (f for f in directory.iterdir() if f.name.endswith(".dist")),
            key=lambda f: f.name,
        )
    except OSError as exc:
        raise CorpusError(f"cannot read corpus directory {directory}: {exc}") from None
    for file in files:
        name = file.name.removesuffix(".dist")
        try:
            parsed = parse(file.read_text(encoding="utf-8"))
        except DistributionFileError as exc:
            raise CorpusError(f"{file.name}: {exc}") from None
        entries[name] = CorpusEntry(
            name, parsed.distribution, parsed.description, PREDICATES.get(name, ())
        )
    logger.info("loaded %d corpus entries from %s", len(entries), directory)

    if verify:
        failed = [o for o in verify_corpus(entries) if not o.passed]
        if failed:
            details = "; ".join(f"{o.entry}: {o.predicate}" for o in failed)
            raise CorpusError(f"{len(failed)} corpus predicate(s) failed: {details}")
    return entries


def get_entry(name: str, verify: bool = False) -> CorpusEntry:
    entries = load_corpus(verify=False)
    if name not in entries:
        raise CorpusError(
            f"unknown corpus entry {name!r}; available: {', '.join(sorted(entries))}"
        )
    entry = entries[name]
    if verify:
        failed = [o for o in verify_entry(entry) if not o.passed]
        if failed:
            raise CorpusError(
                f"{name}: predicate failed: {', '.join(o.predicate for o in failed)}"
            )
    return entry
