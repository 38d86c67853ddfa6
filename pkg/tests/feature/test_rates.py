import math

import numpy as np
import pytest
from scipy.special import entr

from skdist.config import SolverOptions
from skdist.dist import (
    Alphabet,
    Channel,
    TripartiteDistribution,
    conditional_mutual_information,
    restrict_z,
)
from skdist.errors import AlphabetMismatchError, ProductAlphabetError
from skdist.rates import (
    AuxiliarySystem,
    ac_rate_optimize,
    check_lemma4_certificate,
    deterministic_certificate_scan,
    double_markov_residual,
    intrinsic_information_upper,
    join_product_z,
    oneway_lower_bounds,
    rate_report,
    split_product_z,
)


def h2(q):
    return -q * math.log2(q) - (1 - q) * math.log2(1 - q)


def with_w(p3, w_of):
    """Append a binary W with ``P(W=0) = w_of(x, y)``; Z must be one symbol."""
    nx, ny, _ = p3.shape
    p4 = np.zeros((nx, ny, 1, 2))
    for x in range(nx):
        for y in range(ny):
            q = w_of(x, y)
            p4[x, y, 0] = p3[x, y, 0] * np.array([q, 1.0 - q])
    xs, ys = Alphabet.range(nx), Alphabet.range(ny)
    return join_product_z(p4, xs, ys, Alphabet.of("e"), Alphabet.of("a", "b"))


def grid_conditional_information(p, steps):
    """``I(X:Y|Zbar)`` for every binary channel ``[[1-a, a], [b, 1-b]]``."""
    a = steps[:, None]
    b = steps[None, :]
    t = np.stack(
        np.broadcast_arrays(
            np.stack(np.broadcast_arrays(1 - a, a), axis=-1),
            np.stack(np.broadcast_arrays(b, 1 - b), axis=-1),
        ),
        axis=-2,
    )
    q = np.einsum("xyz,...zw->...xyw", p, t)
    h_xyw = entr(q).sum(axis=(-3, -2, -1))
    h_xw = entr(q.sum(axis=-2)).sum(axis=(-2, -1))
    h_yw = entr(q.sum(axis=-3)).sum(axis=(-2, -1))
    h_w = entr(q.sum(axis=(-3, -2))).sum(axis=-1)
    return (h_xw + h_yw - h_xyw - h_w) / math.log(2)


# ----- AuxiliarySystem Tests -----
def test_from_maps_builds_deterministic_tensor():
    aux = AuxiliarySystem.from_maps(Alphabet.range(2), [1, 0], [0, 2])
    t = aux.tensor()

    assert aux.size == 3
    assert t.shape == (2, 3, 3)
    assert t[0, 1, 0] == 1.0 and t[1, 0, 2] == 1.0
    assert t.sum() == 2.0
    assert aux.channel.target.labels[1] == "0|1"


def test_from_maps_validates_inputs():
    bits = Alphabet.range(2)
    with pytest.raises(ValueError, match="one value per x"):
        AuxiliarySystem.from_maps(bits, [0], [0, 0])
    with pytest.raises(ValueError, match="0..2"):
        AuxiliarySystem.from_maps(bits, [0, 3], [0, 0])


def test_auxiliary_channel_must_target_product_alphabet():
    bits = Alphabet.range(2)
    with pytest.raises(AlphabetMismatchError, match="product alphabet"):
        AuxiliarySystem(Channel.identity(bits))


def test_from_logits_is_row_stochastic():
    aux = AuxiliarySystem.from_logits(Alphabet.range(2), np.zeros(18))
    assert aux.tensor().sum(axis=(1, 2)) == pytest.approx([1.0, 1.0])


# ----- Certificate Tests -----
def test_copying_x_certifies_a_perfect_bit(perfect_bit):
    aux = AuxiliarySystem.from_maps(perfect_bit.x, [0, 1], [0, 0])
    report = check_lemma4_certificate(perfect_bit, aux)

    assert report.certified
    assert report.objective == pytest.approx(1.0)
    assert report.cmi == pytest.approx(1.0)


def test_certified_objective_equals_conditional_information(ubi_demo):
    aux = AuxiliarySystem.from_maps(ubi_demo.x, [0, 1, 2], [0, 0, 0])
    report = check_lemma4_certificate(ubi_demo, aux)

    assert report.certified
    assert report.objective == pytest.approx(report.cmi)
    assert report.cmi == pytest.approx(0.5)


def test_bob_certifies_fig4(fig4_demo):
    aux = AuxiliarySystem.from_maps(fig4_demo.y, [0, 1, 2], [1, 1, 0])
    report = check_lemma4_certificate(fig4_demo, aux, direction="ba")

    assert report.certified
    assert report.objective == pytest.approx(1 / 3)


def test_certificate_rejects_foreign_alphabet_and_direction(perfect_bit):
    aux = AuxiliarySystem.from_maps(Alphabet.range(3), [0, 0, 0], [0, 0, 0])
    with pytest.raises(AlphabetMismatchError, match="sender"):
        check_lemma4_certificate(perfect_bit, aux)
    ok = AuxiliarySystem.from_maps(perfect_bit.x, [0, 1], [0, 0])
    with pytest.raises(ValueError, match="direction"):
        check_lemma4_certificate(
            perfect_bit, ok, direction="xy"  # type: ignore[arg-type]
        )


def test_scan_finds_certificate_for_ubi(ubi_demo):
    scan = deterministic_certificate_scan(ubi_demo)

    assert scan.certified is not None
    assert scan.scanned == 25
    assert scan.min_max_residual < 1e-9
    assert scan.best.objective == pytest.approx(0.5)


def test_scan_fails_for_alice_on_fig4(fig4_demo):
    scan = deterministic_certificate_scan(fig4_demo, "ab")

    assert scan.certified is None
    assert scan.scanned == 4
    assert scan.min_max_residual > 1e-6


def test_dropping_a_slice_restores_alices_certificate(fig4_demo):
    d = restrict_z(fig4_demo, ("0", "1"))
    assert deterministic_certificate_scan(d).certified is not None


def test_scan_fails_both_ways_on_fig5(corpus):
    d = corpus["fig5-demo"].distribution
    assert deterministic_certificate_scan(d, "ab").certified is None
    assert deterministic_certificate_scan(d, "ba").certified is None


# ----- Intrinsic Information Tests -----
def test_independent_eve_leaves_mutual_information(binary_symmetric, fast_options):
    bound = intrinsic_information_upper(binary_symmetric, fast_options)
    assert bound.value == pytest.approx(1 - h2(0.25), abs=1e-9)


def test_intrinsic_bound_for_ubi_is_tight(ubi_demo, fast_options):
    bound = intrinsic_information_upper(ubi_demo, fast_options)
    assert bound.value == pytest.approx(0.5, abs=1e-7)


def test_intrinsic_bound_below_plain_information(mix_corr_uncorr, fast_options):
    bound = intrinsic_information_upper(mix_corr_uncorr, fast_options)

    assert 0.0 <= bound.value <= 1 - h2(0.25) + 1e-12
    assert bound.channel.t.sum(axis=1) == pytest.approx([1.0, 1.0])


def test_intrinsic_bound_matches_channel_grid(mix_corr_uncorr):
    steps = np.linspace(0.0, 1.0, 1001)
    grid_min = float(grid_conditional_information(mix_corr_uncorr.p, steps).min())

    bound = intrinsic_information_upper(mix_corr_uncorr)

    assert bound.value == pytest.approx(grid_min, abs=1e-4)


def test_intrinsic_search_is_reproducible(mix_corr_uncorr):
    serial = SolverOptions(restarts=3, iterations=200, seed=7)
    threaded = SolverOptions(restarts=3, iterations=200, seed=7, threads=3)

    first = intrinsic_information_upper(mix_corr_uncorr, serial)
    again = intrinsic_information_upper(mix_corr_uncorr, serial)
    parallel = intrinsic_information_upper(mix_corr_uncorr, threaded)

    assert first.value == again.value == parallel.value


# ----- One-Way Rate Tests -----
def test_oneway_lower_bounds(perfect_bit, binary_symmetric, mix_corr_uncorr):
    assert oneway_lower_bounds(perfect_bit) == pytest.approx((1.0, 1.0))
    assert oneway_lower_bounds(binary_symmetric) == pytest.approx(
        (1 - h2(0.25), 1 - h2(0.25))
    )
    # Z is independent of X and of Y, so both bounds equal I(X:Y)
    assert oneway_lower_bounds(mix_corr_uncorr) == pytest.approx(
        (1 - h2(0.25), 1 - h2(0.25))
    )


def test_ac_rate_optimize_reaches_ubi_rate(ubi_demo, fast_options):
    bound = ac_rate_optimize(ubi_demo, fast_options)

    assert bound.direction == "ab"
    assert bound.value == pytest.approx(0.5, abs=1e-6)
    assert bound.aux.x == ubi_demo.x


def test_ac_rate_optimize_from_bob(perfect_bit, fast_options):
    bound = ac_rate_optimize(perfect_bit, fast_options, direction="ba")
    assert bound.direction == "ba"
    assert bound.value == pytest.approx(1.0, abs=1e-6)


def test_ac_rate_optimize_with_seeds_only(mix_corr_uncorr):
    bound = ac_rate_optimize(mix_corr_uncorr, SolverOptions(restarts=0))
    assert bound.value >= oneway_lower_bounds(mix_corr_uncorr)[0] - 1e-12


def test_ac_rate_optimize_certificate_uses_solver_tolerance(fig4_demo):
    strict = ac_rate_optimize(fig4_demo, SolverOptions(restarts=0))
    loose = ac_rate_optimize(fig4_demo, SolverOptions(restarts=0, tol=10.0))

    assert not strict.certificate.certified
    assert strict.certificate.tol == 1e-9
    assert loose.certificate.certified
    assert loose.value == strict.value


def test_ac_rate_optimize_certifies_ubi_witness(ubi_demo):
    bound = ac_rate_optimize(ubi_demo, SolverOptions(restarts=0))
    assert bound.certificate.certified
    assert bound.certificate.objective == pytest.approx(0.5, abs=1e-9)


def test_more_restarts_never_lower_the_one_way_bound(mix_corr_uncorr):
    values = [
        ac_rate_optimize(
            mix_corr_uncorr, SolverOptions(restarts=restarts, iterations=200)
        ).value
        for restarts in (0, 1, 3, 6)
    ]
    assert values == sorted(values)


def test_one_way_bound_is_never_negative(corpus):
    for entry in corpus.values():
        for direction in ("ab", "ba"):
            bound = ac_rate_optimize(
                entry.distribution, SolverOptions(restarts=0), direction
            )
            assert bound.value >= 0.0, entry.name


# ----- Product Alphabet Tests -----
def test_split_product_z_recovers_four_axes():
    p4 = np.full((2, 2, 2, 3), 1 / 24)
    d = join_product_z(
        p4,
        Alphabet.range(2),
        Alphabet.range(2),
        Alphabet.of("a", "b"),
        Alphabet.of("u", "v", "w"),
    )
    assert d.z.labels[:3] == ("a|u", "a|v", "a|w")

    z, w, back = split_product_z(d)
    assert z.labels == ("a", "b")
    assert w.labels == ("u", "v", "w")
    assert back == pytest.approx(p4)


def test_split_product_z_rejects_malformed_labels(mix_corr_uncorr):
    with pytest.raises(ProductAlphabetError, match="not of the form"):
        split_product_z(mix_corr_uncorr)

    p = np.zeros((1, 1, 2))
    p[0, 0, 0] = p[0, 0, 1] = 0.5
    d = TripartiteDistribution.from_array(
        p, Alphabet.range(1), Alphabet.range(1), Alphabet.of("0|a", "1|b")
    )
    with pytest.raises(ProductAlphabetError, match="every"):
        split_product_z(d)


# ----- Double Markov Tests -----
def test_independent_w_satisfies_both_chains(perfect_bit):
    d4 = with_w(perfect_bit.p, lambda x, y: 0.3)
    chains, criterion = double_markov_residual(d4)
    assert chains == pytest.approx(0.0, abs=1e-12)
    assert criterion == pytest.approx(0.0, abs=1e-12)


def test_w_through_common_variable_satisfies_both_chains(perfect_bit):
    d4 = with_w(perfect_bit.p, lambda x, y: 1.0 if x == 0 else 0.0)
    chains, criterion = double_markov_residual(d4)
    assert chains == pytest.approx(0.0, abs=1e-12)
    assert criterion == pytest.approx(0.0, abs=1e-12)


def test_w_copying_noisy_x_breaks_both(binary_symmetric):
    p = binary_symmetric.p.sum(axis=2, keepdims=True)
    d4 = with_w(p, lambda x, y: 1.0 if x == 0 else 0.0)
    chains, criterion = double_markov_residual(d4)
    assert chains == pytest.approx(h2(0.25))
    assert criterion == pytest.approx(1.0)


# ----- rate_report Tests -----
CORPUS_NAMES = [
    "fig1a-demo",
    "fig1b-demo",
    "fig2a-demo",
    "fig2b-demo",
    "fig3-demo",
    "fig4-demo",
    "fig5-demo",
    "independent-cube",
    "mix-corr-uncorr",
    "not-ub-demo",
    "perfect-bit",
    "ub-not-ubi-demo",
    "ubi-demo",
]


@pytest.mark.parametrize("name", CORPUS_NAMES)
def test_rate_report_ordering(corpus, fast_options, name):
    report = rate_report(corpus[name].distribution, fast_options)

    assert 0.0 <= report.no_comm <= report.helper_no_comm + 1e-12
    assert report.helper_no_comm <= report.cmi + 1e-9
    assert report.intrinsic_upper <= report.cmi + 1e-9
    assert max(report.oneway_lb_ab, report.oneway_lb_ba) <= report.ac_opt_lb + 1e-6
    assert report.ac_opt_lb <= report.cmi + 1e-6
    assert report.ac_direction in ("ab", "ba")
    assert report.intrinsic_upper >= -1e-12


def test_rate_report_for_ubi(ubi_demo, fast_options):
    report = rate_report(ubi_demo, fast_options)
    assert report.ac_opt_lb == pytest.approx(report.cmi, abs=1e-6)
    assert report.ac_certified
    assert report.intrinsic_upper == pytest.approx(report.cmi, abs=1e-7)
    assert report.cmi == pytest.approx(conditional_mutual_information(ubi_demo))
