import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import RegularRepresentation
from qtpinch.corpus import once_punctured_torus
from qtpinch.qalgebra import (ONE, LaurentQ, NotProportional, QTorusElement,
                              DimensionMismatch, commutation_exponent,
                              graph_length_element, h_element, ordered_product,
                              puncture_element, qpow, sigma_pairing,
                              weyl_monomial, weyl_prefactor)

TORUS_SIGMA = once_punctured_torus().poisson_matrix()


def gen(i, sigma=TORUS_SIGMA):
    return QTorusElement.generator(sigma, i)


# strategies

@st.composite
def antisymmetric(draw, n=3):
    S = np.zeros((n, n), dtype=int)
    for i in range(n):
        for j in range(i + 1, n):
            v = draw(st.integers(-2, 2))
            S[i, j], S[j, i] = v, -v
    return S


laurent = st.dictionaries(st.integers(-4, 4), st.integers(-3, 3), max_size=3).map(LaurentQ)
exponent = st.tuples(*[st.integers(-2, 2)] * 3)


@st.composite
def elements(draw, sigma):
    terms = draw(st.dictionaries(exponent, laurent, max_size=3))
    return QTorusElement(sigma, terms)


# Laurent coefficients

def test_laurent_arithmetic():
    a = LaurentQ({0: 1, 1: 2})
    b = LaurentQ({-1: 1})
    assert a * b == LaurentQ({-1: 1, 0: 2})
    assert a + b - b == a
    assert (a - a).is_zero()
    assert a.shift(3) == LaurentQ({3: 1, 4: 2})
    assert LaurentQ({5: 1, -1: 2}).reduce_mod(3) == LaurentQ({2: 3})
    assert LaurentQ.from_pairs(a.to_pairs()) == a
    assert a.evaluate(2) == 5


@given(laurent, laurent, laurent)
def test_laurent_ring_axioms(a, b, c):
    assert (a * b) * c == a * (b * c)
    assert a * (b + c) == a * b + a * c
    assert a * b == b * a


# pairing and Weyl ordering

def test_pairing_examples():
    assert sigma_pairing(TORUS_SIGMA, [1, 0, 0], [0, 1, 0]) == 2
    assert sigma_pairing(TORUS_SIGMA, [1, 2, 0], [1, 2, 0]) == 0
    p = once_punctured_torus().puncture_vectors()[0]
    for l in np.eye(3, dtype=int):
        assert sigma_pairing(TORUS_SIGMA, p, l) == 0
    with pytest.raises(DimensionMismatch):
        sigma_pairing(TORUS_SIGMA, [1, 0], [0, 1, 0])


def test_single_generator_monomial():
    for i in range(3):
        k = [0, 0, 0]
        k[i] = 1
        assert weyl_monomial(TORUS_SIGMA, k) == gen(i)
        assert weyl_monomial(TORUS_SIGMA, k).terms == {tuple(k): ONE}


def test_weyl_formula_two_generators():
    # sigma_12 = 2, so X_(1,1,0) = q^{-2} X_1 X_2
    assert weyl_prefactor(TORUS_SIGMA, [1, 1, 0]) == -2
    assert weyl_monomial(TORUS_SIGMA, [1, 1, 0]) == (gen(0) * gen(1)).scale(qpow(-2))


def test_h_is_weyl_product_of_all_generators():
    T = once_punctured_torus()
    assert h_element(T) == weyl_monomial(T.poisson_matrix(), [1, 1, 1])
    ordered = ordered_product(T.poisson_matrix(), [1, 1, 1])
    assert h_element(T) == ordered.scale(qpow(weyl_prefactor(T.poisson_matrix(), [1, 1, 1])))


def test_unit():
    A = gen(0) + gen(1).scale(qpow(3))
    one = QTorusElement.one(TORUS_SIGMA)
    assert A * one == A and one * A == A


def test_reordering_example():
    A = gen(0) * gen(1)
    # (X_1 X_2) X_1 = q^{2 sigma_21} X_1 (X_1 X_2) = q^{-4} X_1 (X_1 X_2)
    assert A * gen(0) == (gen(0) * A).scale(qpow(-4))


def test_commutation_exponent():
    k, l = [1, 0, 1], [0, 2, -1]
    A, B = weyl_monomial(TORUS_SIGMA, k), weyl_monomial(TORUS_SIGMA, l)
    assert commutation_exponent(A, B) == sigma_pairing(TORUS_SIGMA, k, l)
    assert commutation_exponent(A, A) == 0
    with pytest.raises(NotProportional):
        commutation_exponent(gen(0) + gen(1), gen(0))


def test_inverse_and_negative_powers():
    A = weyl_monomial(TORUS_SIGMA, [1, -1, 2]).scale(qpow(5))
    assert A * A.inverse() == QTorusElement.one(TORUS_SIGMA)
    assert A ** -2 == (A * A).inverse()


def test_serialization():
    A = gen(0).scale(LaurentQ({1: 2, -3: 1})) + weyl_monomial(TORUS_SIGMA, [1, 1, -1])
    assert QTorusElement.from_list(TORUS_SIGMA, A.to_list()) == A


def test_mixing_algebras_is_rejected():
    other = QTorusElement.generator(np.zeros((3, 3), dtype=int), 0)
    with pytest.raises(DimensionMismatch):
        gen(0) * other


# special elements

def test_torus_puncture_and_graph_length():
    T = once_punctured_torus()
    assert puncture_element(T, 0) == weyl_monomial(TORUS_SIGMA, [2, 2, 2])
    assert graph_length_element(T, [1, 1, 0]) == weyl_monomial(TORUS_SIGMA, [1, 1, 0])


def test_h_squared_is_product_of_punctures(corpus):
    for name, cs in corpus.items():
        for T in cs.triangulations:
            prod = QTorusElement.one(T.poisson_matrix())
            for j in range(T.s):
                prod = prod * puncture_element(T, j)
            assert h_element(T) * h_element(T) == prod, name


def test_punctures_are_central(corpus):
    for cs in corpus.values():
        for T in cs.triangulations:
            S = T.poisson_matrix()
            for j in range(T.s):
                P = puncture_element(T, j)
                for i in range(T.n):
                    assert P * QTorusElement.generator(S, i) == QTorusElement.generator(S, i) * P


# properties

@settings(max_examples=60, deadline=None)
@given(st.data())
def test_associativity(data):
    S = data.draw(antisymmetric())
    a, b, c = (data.draw(elements(S)) for _ in range(3))
    assert (a * b) * c == a * (b * c)
    assert a * (b + c) == a * b + a * c


@settings(max_examples=60, deadline=None)
@given(antisymmetric(), exponent, exponent)
def test_weyl_multiplication_rule(S, k, l):
    lhs = weyl_monomial(S, k) * weyl_monomial(S, l)
    kl = tuple(a + b for a, b in zip(k, l))
    assert lhs == weyl_monomial(S, kl).scale(qpow(sigma_pairing(S, k, l)))


@settings(max_examples=40, deadline=None)
@given(antisymmetric(), exponent, st.sampled_from([3, 5, 7]))
def test_weyl_power(S, k, N):
    # X_k^N = X_{Nk}; modulo q^N - 1 the generator powers X_i^N are central
    Xk = weyl_monomial(S, k)
    assert Xk ** N == weyl_monomial(S, [N * x for x in k])
    for i in range(3):
        XN = QTorusElement.generator(S, i, N)
        assert (XN * Xk).reduce_mod(N) == (Xk * XN).reduce_mod(N)


@settings(max_examples=25, deadline=None)
@given(st.data())
def test_matches_regular_representation(data):
    S = data.draw(antisymmetric())
    rep = RegularRepresentation(S, 3)
    a, b = data.draw(elements(S)), data.draw(elements(S))
    assert np.allclose(rep.element(a * b), rep.element(a) @ rep.element(b))


def test_regular_representation_ordered_products():
    rep = RegularRepresentation(TORUS_SIGMA, 5)
    X = [rep.monomial(np.eye(3, dtype=int)[i]) for i in range(3)]
    for k in ([1, 1, 0], [2, -1, 1], [1, 1, 1]):
        direct = np.eye(rep.dim, dtype=complex)
        for i, ki in enumerate(k):
            direct = direct @ np.linalg.matrix_power(X[i], ki % 5)
        elem = ordered_product(TORUS_SIGMA, k)
        assert np.allclose(rep.element(elem), direct)
