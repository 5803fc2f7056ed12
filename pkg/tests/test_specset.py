import pytest
from hypothesis import given
from hypothesis import strategies as st

from polyalaw.specset import (
    ALL,
    EVEN,
    ODD,
    PRIMES,
    SpecSet,
    SpectrumPrefix,
    gcd_of,
    is_prime,
    member,
    odot,
    sum_shift,
    totient,
)
from strategies import spec_sets


def sp(*xs, horizon=40):
    return SpectrumPrefix.from_indices(xs, horizon)


def test_membership_examples():
    assert member(PRIMES, 7)
    assert not member(SpecSet.explicit([2, 3]), 1)
    assert not member(ODD, 6)
    assert 6 in EVEN and 1 in ALL


def test_empty_and_nonpositive_sets_rejected():
    with pytest.raises(ValueError):
        SpecSet("explicit", ())
    with pytest.raises(ValueError):
        SpecSet.explicit([0, 2])
    with pytest.raises(ValueError):
        SpecSet.ap(0, 2)


def test_harmonic_divergence():
    for M in (ALL, ODD, EVEN, PRIMES, SpecSet.ap(3, 7)):
        assert M.harmonic_divergent and not M.is_finite
    assert not SpecSet.explicit([1, 2, 3]).harmonic_divergent


def test_union():
    U = SpecSet.union(SpecSet.explicit([2]), ODD)
    assert U.members(8) == [1, 2, 3, 5, 7]
    assert U.min == 1 and U.gcd == 1 and not U.is_finite


@given(spec_sets)
def test_cached_attributes_agree_with_enumeration(M):
    els = M.members(64)
    assert els and all(e >= 1 for e in els)
    assert els == [m for m in range(1, 65) if member(M, m)]
    assert M.min == els[0]
    import math
    from functools import reduce

    assert M.gcd == reduce(math.gcd, els)
    if M.is_finite:
        assert M.max == els[-1]


def test_primes_and_totient():
    assert [p for p in range(30) if is_prime(p)] == [2, 3, 5, 7, 11, 13, 17, 19, 23, 29]
    assert [totient(n) for n in range(1, 11)] == [1, 1, 2, 2, 4, 2, 6, 4, 6, 4]


def test_sum_shift_examples():
    assert sum_shift(sp(1), sp(1)).elements == [2]
    assert sum_shift(sp(1, 3), sp(2)).elements == [3, 5]
    assert sum_shift(sp(1, 2), sp(1, 2)).elements == [2, 3, 4]


def test_odot_examples():
    assert odot(0, sp(1, 2)).elements == [0]
    assert odot(2, sp(1)).elements == [2]
    assert odot(2, sp(1, 2)).elements == [2, 3, 4]


def test_gcd_of_examples():
    assert gcd_of(sp(1, 3, 5, 7), 1) == 2
    assert gcd_of(sp(1), 1) == 0
    assert gcd_of(sp(2, 5), 0) == 1


small_sets = st.lists(st.integers(0, 20), min_size=1, max_size=6)


@given(small_sets, small_sets)
def test_sum_shift_is_sumset(a, b):
    expect = sorted({x + y for x in a for y in b if x + y <= 40})
    assert sum_shift(sp(*a), sp(*b)).elements == expect


@given(small_sets, st.integers(0, 4))
def test_odot_is_iterated_sumset(a, m):
    acc = {0}
    for _ in range(m):
        acc = {x + y for x in acc for y in a if x + y <= 40}
    assert odot(m, sp(*a)).elements == sorted(acc)
