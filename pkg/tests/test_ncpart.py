"""Tests for non-crossing partition combinatorics and cumulant conversions.

Brute-force oracles (restricted-growth enumeration of all set partitions,
direct NC sums) are defined here and the production recursions are checked
against them on small orders.
"""

import itertools
from fractions import Fraction

import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from freeconv import ncpart
from freeconv.ncpart import (
    NCWeight,
    SeqN,
    SetPartition,
    boolean_cumulants_from_moments,
    catalan,
    enumerate_nc,
    free_cumulants_from_moments,
    free_mult_moments,
    free_mult_moments_reference,
    kreweras,
    moments_from_boolean_cumulants,
    moments_from_free_cumulants,
    partition_weight,
    square_cumulants,
)


def all_set_partitions(n):
    """Oracle: every set partition of {1..n} via restricted growth strings."""
    if n == 0:
        yield SetPartition(0, ())
        return
    rgs = [0] * n
    while True:
        blocks = {}
        for i, c in enumerate(rgs):
            blocks.setdefault(c, []).append(i + 1)
        yield SetPartition(n, tuple(tuple(b) for b in blocks.values()))
        i = n - 1
        while i > 0:
            if rgs[i] <= max(rgs[:i]):
                break
            i -= 1
        if i == 0:
            return
        rgs[i] += 1
        for j in range(i + 1, n):
            rgs[j] = 0


def crossing_free_bruteforce(p):
    """Quadratic-pair oracle for the non-crossing property."""
    for b1, b2 in itertools.combinations(p.blocks, 2):
        for a, c in itertools.combinations(b1, 2):
            for b, d in itertools.combinations(b2, 2):
                if a < b < c < d or b < a < d < c:
                    return False
    return True


MOMENT_SEQS = {
    # semicircle(0,1): Catalan at even orders
    "semicircle": [0, 1, 0, 2, 0, 5, 0, 14],
    # free Poisson: Catalan numbers
    "free_poisson": [1, 2, 5, 14, 42, 132, 429, 1430],
    # symmetric Bernoulli at +-1
    "bernoulli": [0, 1, 0, 1, 0, 1, 0, 1],
}


def test_catalan_values():
    assert [catalan(n) for n in range(8)] == [1, 1, 2, 5, 14, 42, 132, 429]


def test_is_noncrossing_matches_bruteforce():
    for n in range(1, 7):
        for p in all_set_partitions(n):
            assert p.is_noncrossing() == crossing_free_bruteforce(p)


def test_enumerate_nc_counts():
    for n in range(0, 10):
        assert sum(1 for _ in enumerate_nc(n)) == catalan(n)


def test_enumerate_nc_matches_filtered_bruteforce():
    for n in range(1, 8):
        expected = {p for p in all_set_partitions(n) if p.is_noncrossing()}
        produced = set(enumerate_nc(n))
        assert produced == expected


def test_enumerate_nc_cap():
    # the documented guard: n = 14 streams lazily, n = 15 is rejected
    first = next(iter(enumerate_nc(14)))
    assert first.n == 14
    with pytest.raises(ValueError):
        list(enumerate_nc(15))


def test_partition_validation():
    with pytest.raises(ValueError):
        SetPartition(3, ((1, 2),))
    with pytest.raises(ValueError):
        SetPartition(3, ((1, 2), (2, 3)))


def test_kreweras_spec_example():
    p = SetPartition(4, ((1, 2), (3, 4)))
    assert kreweras(p).blocks == ((1,), (2, 4), (3,))


def test_kreweras_extremes():
    n = 5
    singletons = SetPartition(n, tuple((i,) for i in range(1, n + 1)))
    full = SetPartition(n, (tuple(range(1, n + 1)),))
    assert kreweras(singletons) == full
    assert kreweras(full) == singletons


def test_kreweras_size_identity_and_rotation():
    # |pi| + |K(pi)| = n + 1 and K(K(pi)) is pi rotated by one (e -> e - 1)
    for n in range(1, 8):
        for p in enumerate_nc(n):
            k = kreweras(p)
            assert k.is_noncrossing()
            assert len(p) + len(k) == n + 1
            rotated = SetPartition(
                n,
                tuple(
                    tuple(sorted((e - 2) % n + 1 for e in b)) for b in p.blocks
                ),
            )
            assert kreweras(k) == rotated


def test_kreweras_requires_noncrossing():
    with pytest.raises(ValueError):
        kreweras(SetPartition(4, ((1, 3), (2, 4))))


def test_moments_from_free_cumulants_examples():
    # semicircle: kappa = (0,1,0,...) -> Catalan at even orders
    kappa = SeqN("free_cumulant", [0, 1, 0, 0, 0, 0])
    assert moments_from_free_cumulants(kappa).values == (0, 1, 0, 2, 0, 5)
    # free Poisson: kappa_n = 1 -> Catalan numbers
    kappa = SeqN("free_cumulant", [1] * 6)
    assert moments_from_free_cumulants(kappa).values == (1, 2, 5, 14, 42, 132)


def test_free_cumulants_from_moments_examples():
    m = SeqN("moment", MOMENT_SEQS["free_poisson"])
    assert free_cumulants_from_moments(m).values == (1,) * 8
    m = SeqN("moment", MOMENT_SEQS["semicircle"])
    assert free_cumulants_from_moments(m).values == (0, 1, 0, 0, 0, 0, 0, 0)


def test_conversion_against_enumeration():
    # recursion agrees with the direct sum over NC(n) of kappa_pi
    kappa = tuple(Fraction(k, k + 2) for k in range(1, 9))
    mom = moments_from_free_cumulants(SeqN("free_cumulant", kappa))
    for n in range(1, 9):
        direct = ncpart.moments_from_free_cumulants_reference(kappa, n)
        assert mom.values[n - 1] == direct


def test_boolean_examples():
    m = SeqN("moment", MOMENT_SEQS["bernoulli"][:6])
    r = boolean_cumulants_from_moments(m)
    assert r.values == (0, 1, 0, 0, 0, 0)
    assert moments_from_boolean_cumulants(r).values == tuple(
        MOMENT_SEQS["bernoulli"][:6]
    )


def test_kind_mismatch_rejected():
    m = SeqN("moment", [1, 2, 3])
    with pytest.raises(ValueError):
        moments_from_free_cumulants(m)
    with pytest.raises(ValueError):
        boolean_cumulants_from_moments(SeqN("free_cumulant", [1, 2, 3]))
    with pytest.raises(ValueError):
        SeqN("weird", [1])


def test_conversion_cap():
    with pytest.raises(ValueError):
        moments_from_free_cumulants(SeqN("free_cumulant", [0] * 21))


rational_seqs = st.lists(
    st.fractions(
        min_value=-3, max_value=3, max_denominator=8
    ),
    min_size=1,
    max_size=10,
)


@given(rational_seqs)
def test_free_round_trip_rational(vals):
    m = SeqN("moment", vals)
    back = moments_from_free_cumulants(free_cumulants_from_moments(m))
    assert back.values == m.values


@given(rational_seqs)
def test_boolean_round_trip_rational(vals):
    m = SeqN("moment", vals)
    back = moments_from_boolean_cumulants(boolean_cumulants_from_moments(m))
    assert back.values == m.values


@given(
    st.lists(
        st.floats(min_value=-2, max_value=2, allow_nan=False),
        min_size=1,
        max_size=8,
    )
)
def test_free_round_trip_float(vals):
    m = SeqN("moment", vals)
    back = moments_from_free_cumulants(free_cumulants_from_moments(m))
    assert all(
        abs(a - b) <= 1e-10 * max(1.0, abs(a)) for a, b in zip(m.values, back.values)
    )


def test_ncweight_multiplicative():
    base = SeqN("free_cumulant", [2, 3, 5, 7])
    w = NCWeight(base)
    p = SetPartition(4, ((1, 4), (2, 3)))
    assert w.weight(p) == 9
    assert partition_weight(base.values, SetPartition(4, ((1, 2, 3, 4),))) == 7


def test_square_cumulants_semicircle():
    # alpha for the standard semicircle is (1,0,0,...); its square is the
    # free Poisson law, whose free cumulants are all 1
    alpha = SeqN("free_cumulant", [1, 0, 0, 0, 0])
    assert square_cumulants(alpha).values == (1,) * 5


def test_square_cumulants_is_moment_formula():
    alpha = tuple(Fraction(j, 3) for j in (1, 2, 1, 2))
    sq = square_cumulants(SeqN("free_cumulant", alpha))
    mom = moments_from_free_cumulants(SeqN("free_cumulant", alpha))
    assert sq.values == mom.values
    assert sq.kind == "free_cumulant"


def test_free_mult_fuss_catalan():
    cat = SeqN("moment", [1, 2, 5, 14, 42, 132])
    got = free_mult_moments(cat, cat)
    assert got.values == (1, 3, 12, 55, 273, 1428)


def test_free_mult_identity_element():
    # multiplying by delta_1 leaves moments unchanged
    cat = SeqN("moment", [1, 2, 5, 14])
    one = SeqN("moment", [1, 1, 1, 1])
    assert free_mult_moments(cat, one).values == cat.values
    assert free_mult_moments(one, cat).values == cat.values


def test_free_mult_matches_enumeration_oracle():
    mu = SeqN("moment", [Fraction(1, 2), Fraction(3, 4), Fraction(5, 4)])
    nu = SeqN("moment", [0, Fraction(2, 3), 0])
    got = free_mult_moments(mu, nu, 3)
    ref = free_mult_moments_reference(mu, nu, 3)
    assert got.values == ref.values


def test_free_mult_commutes():
    rng_pairs = [
        ([Fraction(1), Fraction(2), Fraction(5), Fraction(15)],
         [Fraction(1, 2), Fraction(1), Fraction(9, 4), Fraction(6)]),
        ([Fraction(2), Fraction(5), Fraction(13), Fraction(35)],
         [Fraction(1), Fraction(3), Fraction(10), Fraction(36)]),
    ]
    for a, b in rng_pairs:
        ab = free_mult_moments(SeqN("moment", a), SeqN("moment", b))
        ba = free_mult_moments(SeqN("moment", b), SeqN("moment", a))
        assert ab.values == ba.values


def test_free_mult_rejects_double_zero():
    z = SeqN("moment", [0, 0, 0])
    with pytest.raises(ValueError):
        free_mult_moments(z, z)


def test_free_mult_compound_poisson_route():
    # kappa_n(m x nu) = m_n(nu): multiplying by the free Poisson law
    # compounds the jump distribution
    cat = SeqN("moment", [1, 2, 5, 14, 42, 132])
    nu = SeqN("moment", [0, 1, 0, 1, 0, 1])  # symmetric Bernoulli
    prod = free_mult_moments(cat, nu)
    kappa = free_cumulants_from_moments(prod)
    assert kappa.values == nu.values


@settings(deadline=None)
@given(
    st.lists(st.fractions(min_value=-2, max_value=2, max_denominator=6),
             min_size=2, max_size=6),
    st.lists(st.fractions(min_value=-2, max_value=2, max_denominator=6),
             min_size=2, max_size=6),
)
def test_free_mult_dp_equals_oracle(a, b):
    assume(any(v != 0 for v in a) or any(v != 0 for v in b))
    n = min(len(a), len(b))
    got = free_mult_moments(SeqN("moment", a), SeqN("moment", b), n)
    ref = free_mult_moments_reference(SeqN("moment", a), SeqN("moment", b), n)
    assert got.values == ref.values
