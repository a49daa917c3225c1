from fractions import Fraction

import numpy as np
import pytest

from class_sieve.classgroup import UnsupportedCase, imaginary_class_data
from class_sieve.cubic import enumerate_cubic
from class_sieve.quadratic import enumerate_quadratic
from class_sieve.torsion import (
    DeltaConstraint, average_torsion, bad_set, bad_set_parameters, delta_limit,
    dh_prediction, dyadic_average_bound, ev_bound, ev_constants, report_json, saving,
    split_count, split_counts, split_profile, stated_exponents, torsion_experiment,
)
from oracles import sqrt_mod_exists, trial_primes


def test_split_counts_quadratic():
    cen = enumerate_quadratic(2000)
    got = split_counts(cen, 30)
    for D, n in zip(cen.discriminants.tolist()[::17], got[::17].tolist()):
        want = sum(1 for p in trial_primes(30) if D % p and
                   (D % 8 == 1 if p == 2 else sqrt_mod_exists(D, p)))
        assert n == want == split_count(D, 30)
    prof = split_profile(cen, 30)
    assert prof[0].field == -3 and prof[0].N == got[0]


def test_split_counts_cubic():
    cen = enumerate_cubic(2000)
    prof = split_profile(cen, 7)
    assert len(prof) == len(cen)
    assert isinstance(prof[0].field, tuple)
    assert max(p.N for p in prof) <= 4


def test_bad_set_is_monotone_in_M():
    cen = enumerate_quadratic(10**4)
    counts = split_counts(cen, 20)
    fr = [bad_set(cen, 20, M, counts).fraction for M in (0, 1, 2, 4, 8)]
    assert fr == sorted(fr) and fr[-1] == 1.0


def test_bad_set_parameters():
    Y, M = bad_set_parameters(2, 2 * 10**6, 0.5)
    assert Y == pytest.approx(10.0)
    assert M == pytest.approx(0.25 * 10 / np.log(10))


def test_average_torsion_small_cases():
    assert average_torsion(3, 4) == 2
    assert average_torsion(3, 22) == 8
    assert average_torsion(3, 23) == 11  # Cl(-23) is cyclic of order 3
    assert average_torsion(3, 100, "real") == 30
    cen = enumerate_quadratic(500)
    assert average_torsion(3, 500, census=cen) == average_torsion(3, 500)
    with pytest.raises(UnsupportedCase):
        average_torsion(2, 100, "real")


def test_dh_constants():
    assert dh_prediction("imaginary") == pytest.approx(0.607927, abs=1e-6)
    assert dh_prediction("real") == pytest.approx(2 / 3 * 0.607927, abs=1e-6)


def test_ev_bound():
    b = ev_bound(-10**6, 2, 3, Fraction(1, 7), M=4)
    assert b.bound == pytest.approx((10**6) ** 0.55 / 4)
    with pytest.raises(DeltaConstraint):
        ev_bound(-10**6, 2, 3, Fraction(1, 6))
    assert not ev_bound(-10**6, 2, 3, Fraction(1, 6), strict=False).delta_ok
    with pytest.raises(ZeroDivisionError):
        ev_bound(-10**6, 2, 3, Fraction(1, 7), M=0)
    assert delta_limit(4, 7) == Fraction(1, 42)


def test_ev_constants_exclude_fields_without_split_primes():
    data = imaginary_class_data(5000, 3)
    c = ev_constants(data.D, data.torsion, 0.12, 0.05)
    assert 0 < len(c) < len(data.D)
    assert np.all(c > 0)


@pytest.mark.parametrize("d,ell,exp", [
    (2, 4, Fraction(11, 8)), (3, 5, Fraction(3, 2) - Fraction(1, 20)),
    (4, 7, Fraction(71, 48)), (4, 8, Fraction(71, 48)), (4, 9, Fraction(3, 2) - Fraction(1, 54)),
    (5, 24, Fraction(299, 200)), (5, 25, Fraction(299, 200)), (5, 30, Fraction(3, 2) - Fraction(1, 240)),
])
def test_exponents(d, ell, exp):
    rep = dyadic_average_bound(d, ell)
    assert rep.exponent == exp == rep.stated
    assert stated_exponents(d, ell)["pointwise"] == exp - 1
    assert rep.source == "sieve"


def test_exponent_sources_for_small_ell():
    assert dyadic_average_bound(2, 2).source == "genus theory"
    assert dyadic_average_bound(2, 3).source == "Davenport-Heilbronn"
    assert dyadic_average_bound(3, 3).source == "external average result"
    assert saving(2, 3) == Fraction(1, 6)


def test_dyadic_ranges():
    data = imaginary_class_data(4096, 3)
    rep = dyadic_average_bound(2, 3, X=4096, measured=(data.D, data.torsion))
    assert len(rep.ranges) == 13
    assert sum(r["measured"] for r in rep.ranges) == int(data.torsion.sum())
    assert rep.as_dict()["exponent"] == "4/3"


def test_experiment_report_is_deterministic():
    a = report_json(torsion_experiment([1000, 10000]))
    b = report_json(torsion_experiment([10000, 1000]))
    assert a == b
    assert '"sum_torsion": 5167' in a
