import numpy as np
import pytest
from hypothesis import given, strategies as st

from class_sieve.arith import BoundExceeded, is_fundamental_discriminant, omega
from class_sieve.classgroup import (
    QuadForm, UnsupportedCase, class_group, compose, form_pow, imaginary_class_data,
    is_reduced, principal_form, reduce, reduction_cycle, torsion_count,
)
from oracles import class_number_analytic, reduced_forms_bruteforce

NEG = [D for D in range(-3000, -4) if is_fundamental_discriminant(D)]
POS = [D for D in range(5, 800) if is_fundamental_discriminant(D)]


def test_disc_23():
    G = class_group(-23)
    assert set(G.classes) == {(1, 1, 6), (2, -1, 3), (2, 1, 3)}
    assert compose(QuadForm(2, 1, 3), QuadForm(2, 1, 3)) == (2, -1, 3)
    assert reduce(QuadForm(3, 1, 2)) == (2, -1, 3)
    assert G.identity == (1, 1, 6)


def test_reduced_forms_match_search():
    for D in NEG[::7]:
        assert sorted(class_group(D).classes) == sorted(reduced_forms_bruteforce(D))


def test_class_numbers_match_analytic_formula():
    for D in NEG[::5]:
        assert class_group(D).h == class_number_analytic(D), D


def test_real_narrow_class_numbers():
    # narrow class numbers; 316 = 4*79 has h = 3 and a unit of norm +1
    assert {D: class_group(D).h for D in (5, 8, 12, 13, 21, 229, 316)} == \
        {5: 1, 8: 1, 12: 2, 13: 1, 21: 2, 229: 3, 316: 6}


def test_indefinite_cycles_are_closed():
    for D in (229, 316, 520):
        for f in class_group(D).classes:
            cyc = reduction_cycle(f)
            assert all(is_reduced(g) for g in cyc)
            assert all(g.disc == D for g in cyc)


@st.composite
def group_elements(draw, sign):
    D = draw(st.sampled_from(NEG if sign < 0 else POS))
    G = class_group(D)
    return G, draw(st.sampled_from(G.classes)), draw(st.sampled_from(G.classes)), \
        draw(st.sampled_from(G.classes))


@pytest.mark.parametrize("sign", [-1, 1])
@given(data=st.data())
def test_group_laws(sign, data):
    G, f, g, k = data.draw(group_elements(sign))
    e = G.identity
    assert G.mul(f, g) == G.mul(g, f)
    assert G.mul(G.mul(f, g), k) == G.mul(f, G.mul(g, k))
    assert G.mul(f, e) == G.key(f)
    assert G.mul(f, G.inv(f)) == e
    assert G.pow(f, G.h) == e
    assert G.mul(f, g) in G.classes


def test_genus_theory_imaginary():
    for D in NEG:
        assert torsion_count(class_group(D), 2).count == 2 ** (omega(D) - 1)


def test_odd_torsion_of_real_fields():
    # D = 229: cyclic of order 3
    assert torsion_count(class_group(229), 3).count == 3
    with pytest.raises(UnsupportedCase):
        torsion_count(class_group(229), 2)


def test_kernel_matches_python_path():
    data = imaginary_class_data(4000, 3)
    assert data.D.tolist() == [D for D in range(-3, -4001, -1) if is_fundamental_discriminant(D)]
    for D, h, t in zip(data.D[::3], data.h[::3], data.torsion[::3]):
        G = class_group(int(D))
        assert h == G.h
        assert t == torsion_count(G, 3).count
    five = imaginary_class_data(4000, 5)
    assert np.array_equal(five.h, data.h)


def test_form_pow_and_principal():
    f = QuadForm(2, 1, 3)
    assert form_pow(f, 3) == principal_form(-23)
    assert principal_form(-4) == (1, 0, 1)
    assert principal_form(12).disc == 12


def test_rejects_bad_input():
    with pytest.raises(ValueError):
        class_group(16)
    with pytest.raises(ValueError):
        class_group(-5)
    with pytest.raises(BoundExceeded):
        class_group(-10**9 - 3)
