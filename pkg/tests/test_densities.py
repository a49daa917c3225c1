import itertools
from collections import Counter
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from class_sieve.densities import (
    EXPONENTS, RAMIFIED, delta, delta0, delta0_from_exponents, density_csv, density_table,
    ell_threshold, normalizer, nu, split_density, splitting_types,
)
from oracles import trial_primes

PRIMES = trial_primes(200)


def cycle_type_frequencies(d):
    """Fraction of S_d with each cycle type, counted over all permutations."""
    counts = Counter()
    for perm in itertools.permutations(range(d)):
        seen, lengths = set(), []
        for i in range(d):
            if i in seen:
                continue
            n, j = 0, i
            while j not in seen:
                seen.add(j)
                j = perm[j]
                n += 1
            lengths.append(n)
        counts["".join(map(str, sorted(lengths)))] += 1
    total = sum(counts.values())
    return {k: Fraction(v, total) for k, v in counts.items()}


@pytest.mark.parametrize("d", [2, 3, 4, 5])
def test_unramified_weights_are_cycle_type_frequencies(d):
    freq = cycle_type_frequencies(d)
    assert sorted(freq) == sorted(t for t in splitting_types(d) if t != RAMIFIED)
    for p in (2, 3, 101):
        n = normalizer(d, p)
        for t, f in freq.items():
            assert delta(d, t, p) == f / n


@given(st.sampled_from([2, 3, 4, 5]), st.sampled_from(PRIMES))
def test_tables_sum_to_one(d, p):
    assert sum(density_table(d, p).values()) == 1


def test_frozen_values():
    assert split_density(2, 2) == Fraction(1, 3)
    assert split_density(3, 2) == Fraction(2, 21)
    assert delta(3, RAMIFIED, 2) == Fraction(3, 7)
    assert delta(2, "inert", 5) == Fraction(5, 12)
    assert split_density(3, 5) == Fraction(25, 186)
    assert nu(5, 2) == Fraction(154624381, 268435456)


def test_aliases():
    assert delta(2, "split", 7) == delta(2, "11", 7)
    assert delta(3, "split", 7) == delta(3, "111", 7)
    with pytest.raises(ValueError):
        delta(3, "inert", 7)
    with pytest.raises(ValueError):
        density_table(6, 2)


def test_nu_approaches_p_minus_two():
    for d in (4, 5):
        for p in trial_primes(1000)[-20:]:
            assert abs(p * p * nu(d, p) - 1) * p < 4


def test_delta0_table_from_exponents():
    for d, (s, t, g) in EXPONENTS.items():
        assert delta0_from_exponents(s, t, g, d) == delta0(d)
    assert [delta0(d) for d in (2, 3, 4, 5)] == [Fraction(1, 6), Fraction(2, 25),
                                                Fraction(1, 48), Fraction(1, 200)]
    with pytest.raises(ValueError):
        delta0_from_exponents(Fraction(1, 2), Fraction(79, 80), None, 5)


def test_thresholds():
    assert [ell_threshold(d) for d in (2, 3, 4, 5)] == [1, 1, 8, 25]


def test_csv_dump():
    text = density_csv([3], [2])
    lines = text.strip().splitlines()
    assert lines[0] == "d,p,type,delta,delta_float"
    assert "3,2,111,2/21,0.0952380952381" in lines
