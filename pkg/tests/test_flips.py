import numpy as np
import pytest

from oracles import RegularRepresentation, classical_flip, value_at_q_one
from qtpinch.flips import (FlipError, QRational, RationalZ, UnsupportedFlipKind,
                           ZPoly, check_inducedmap, compose_is_identity,
                           flip_factor, phi_flip, psi_flip, side_occurrences)
from qtpinch.qalgebra import QTorusElement, qpow, weyl_monomial
from qtpinch.surface import FlipKind, SelfFoldedEdge, square


def flippable(corpus):
    for name, cs in corpus.items():
        for i, T in enumerate(cs.triangulations):
            for e in range(T.n):
                try:
                    sq = square(T, e)
                except SelfFoldedEdge:
                    continue
                yield "%s[%d]/%d" % (name, i, e), T, e, sq


# the pivot algebra

def test_rational_normal_form():
    f = RationalZ(ZPoly.factor(1) * ZPoly.factor(3), (1,))
    assert f == RationalZ(ZPoly.factor(3))
    g = RationalZ(ZPoly.const(1), (1,))
    assert g * RationalZ(ZPoly.factor(1)) == RationalZ.const(1)
    assert g.inverse() == RationalZ(ZPoly.factor(1))


def test_flip_factor_cases():
    q = qpow
    assert flip_factor(1, 0) == RationalZ(ZPoly({0: 1, 1: q(1)}))
    assert flip_factor(2, 0) == RationalZ(ZPoly({0: 1, 1: q(1) + q(3), 2: q(4)}))
    assert flip_factor(0, 1) == RationalZ(ZPoly({1: q(-1)}), (-1,))
    assert flip_factor(1, 1) == RationalZ.z_power(1)
    with pytest.raises(UnsupportedFlipKind):
        flip_factor(2, 1)


# the quantum flip

def test_embedded_flip_images(corpus):
    T = corpus["four_punctured_sphere"].triangulations[0]
    sq = square(T, 0)
    assert sq.kind is FlipKind.Embedded
    phi = phi_flip(T, 0)
    S = T.poisson_matrix()
    Z = QRational.from_qtorus(QTorusElement.generator(S, 0), 0)
    one = QRational.one(S, 0)
    X = [QRational.from_qtorus(QTorusElement.generator(S, i), 0) for i in range(T.n)]
    assert phi.images[0] == Z.inverse()
    for lab in (1, 3):
        i = sq.edges[lab]
        assert phi.images[i] == (one + Z.scale(qpow(1))) * X[i]
    for lab in (2, 4):
        i = sq.edges[lab]
        assert phi.images[i] == (one + Z.inverse().scale(qpow(1))).inverse() * X[i]
    untouched = set(range(T.n)) - set(sq.edges)
    for i in untouched:
        assert phi.images[i] == X[i]


def test_torus_flip_images():
    from qtpinch.corpus import once_punctured_torus
    T = once_punctured_torus()
    phi = phi_flip(T, 0)
    # edge 2 fills sides 1 and 3, edge 1 fills sides 2 and 4
    assert side_occurrences(square(T, 0), 0) == {2: (2, 0), 1: (0, 2)}
    assert phi.images[2].terms == {(0, 0, 1): RationalZ(ZPoly.factor(1) * ZPoly.factor(3))}
    assert phi.images[1].terms == {(0, 1, 0): RationalZ(ZPoly({2: qpow(-4)}), (-3, -1))}


def test_flip_preserves_relations(corpus):
    seen = set()
    for name, T, e, sq in flippable(corpus):
        phi = phi_flip(T, e)
        assert phi.preserves_relations(), name
        seen.add(sq.kind)
    assert seen == set(FlipKind)


def test_flip_back_is_identity(corpus):
    for name, T, e, _ in flippable(corpus):
        assert compose_is_identity(T, e), name


def test_classical_limit_is_geometric_flip(corpus):
    rng = np.random.default_rng(1)
    for name, T, e, _ in flippable(corpus):
        x = np.exp(rng.normal(size=T.n))
        phi = phi_flip(T, e)
        got = [value_at_q_one(img, x) for img in phi.images]
        want = classical_flip(T, e, x)
        assert np.allclose(got, want, rtol=1e-10), name


def test_flip_matches_regular_representation(corpus):
    # X'_i X'_j = q^{2 sigma'_ij} X'_j X'_i checked through matrices, N = 3
    T = corpus["four_punctured_sphere"].triangulations[0]
    phi = phi_flip(T, 2)
    S, S2 = T.poisson_matrix(), phi.target_sigma
    full = RegularRepresentation(S, 3)
    q = full.q
    Z = full.monomial(np.eye(T.n, dtype=int)[2])

    def mat(img):
        out = np.zeros((full.dim, full.dim), dtype=complex)
        for m, f in img.terms.items():
            out += f.evaluate(Z, lambda c: c.evaluate(q)) @ full.monomial(m)
        return out

    M = [mat(img) for img in phi.images]
    for i in range(T.n):
        for j in range(T.n):
            assert np.allclose(M[i] @ M[j], q ** (2 * S2[i, j]) * M[j] @ M[i])


# monomial limits

def test_psi_embedded_images(corpus):
    T = corpus["four_punctured_sphere"].triangulations[0]
    sq = square(T, 0)
    S = T.poisson_matrix()
    X = [QTorusElement.generator(S, i) for i in range(T.n)]
    v = psi_flip(T, 0, "vertical")
    h = psi_flip(T, 0, "horizontal")
    assert v.images[0] == X[0].inverse() == h.images[0]
    for lab in (1, 3):
        i = sq.edges[lab]
        assert v.images[i] == (X[0] * X[i]).scale(qpow(1))
        assert h.images[i] == X[i]
    for lab in (2, 4):
        i = sq.edges[lab]
        assert h.images[i] == (X[0] * X[i]).scale(qpow(-1))
        assert v.images[i] == X[i]


def test_psi_torus_images():
    from qtpinch.corpus import once_punctured_torus
    T = once_punctured_torus()
    S = T.poisson_matrix()
    X = [QTorusElement.generator(S, i) for i in range(3)]
    v = psi_flip(T, 0, "vertical")
    h = psi_flip(T, 0, "horizontal")
    assert v.images == [X[0].inverse(), X[1], (X[0] ** 2 * X[2]).scale(qpow(4))]
    assert h.images == [X[0].inverse(), (X[0] ** 2 * X[1]).scale(qpow(-4)), X[2]]
    # both are Weyl monomials
    assert v.images[2] == weyl_monomial(S, [2, 0, 1])
    assert h.images[1] == weyl_monomial(S, [2, 1, 0])


def test_psi_preserves_relations(corpus):
    for name, T, e, _ in flippable(corpus):
        for d in ("vertical", "horizontal"):
            assert psi_flip(T, e, d).preserves_relations(), (name, d)


def test_psi_direction_validated():
    from qtpinch.corpus import once_punctured_torus
    with pytest.raises(FlipError):
        psi_flip(once_punctured_torus(), 0, "diagonal")


def test_psi_is_leading_term_of_phi(corpus):
    # vertical: the highest power of the pivot; horizontal: the lowest
    for name, T, e, _ in flippable(corpus):
        phi = phi_flip(T, e)
        for d in ("vertical", "horizontal"):
            psi = psi_flip(T, e, d)
            for i, img in enumerate(phi.images):
                if i == e:
                    continue
                (m, f), = img.terms.items()
                num = f.num.c
                p = max(num) - len(f.den) if d == "vertical" else min(num)
                lead = num[max(num)] if d == "vertical" else num[min(num)]
                if d == "vertical":
                    # divide by the leading q-powers of the denominator factors
                    for c in f.den:
                        lead = lead * qpow(-c)
                S = T.poisson_matrix()
                leading = QTorusElement.generator(S, e, p) * weyl_monomial(S, m)
                assert leading.scale(lead) == psi.images[i], (name, d, i)


def test_apply_rejects_wrong_pivot():
    from qtpinch.corpus import once_punctured_torus
    T = once_punctured_torus()
    phi = phi_flip(T, 0)
    other = QRational.from_qtorus(QTorusElement.generator(phi.target_sigma, 0), 1)
    with pytest.raises(FlipError):
        phi.apply(other)


# compatibility with pinching

def test_inducedmap_all_cases(corpus):
    cases = set()
    for name, cs in corpus.items():
        for cn in cs.curves:
            T, curve = cs.curve(cn)
            for e in range(T.n):
                rep = check_inducedmap(T, curve, e)
                assert rep.ok, (name, cn, e, rep.case)
                cases.add(rep.case)
    assert cases == {1, 2, 3}


def test_inducedmap_torus_examples():
    from qtpinch.corpus import corpus
    T, a = corpus()["once_punctured_torus"].curve("a")
    assert check_inducedmap(T, a, 0).case == 3
    assert check_inducedmap(T, a, 1).case == 2
    rep = check_inducedmap(T, a, 2)
    assert rep.case == 1 and not rep.reversed and rep.ok


def test_inducedmap_with_crossed_diagonal(corpus):
    # corner strands cross the diagonal; one segment of it survives as an edge
    T, curve = corpus["twice_punctured_torus"].curve("pair")
    assert curve.edge_crossings()[4] > 0
    rep = check_inducedmap(T, curve, 4)
    assert rep.case == 1 and not rep.reversed and rep.ok


def test_inducedmap_corner_strands_on_both_diagonals():
    # after two flips the curve meets both diagonals of the square at edge 3
    from qtpinch.corpus import corpus
    from qtpinch.surface import flip, transport_curve
    T, curve = corpus()["twice_punctured_torus"].curve("right")
    for e in (3, 2):
        T2 = flip(T, e)[0]
        curve, T = transport_curve(T, curve, e, T2), T2
    T2 = flip(T, 3)[0]
    assert curve.edge_crossings()[3] and transport_curve(T, curve, 3, T2).edge_crossings()[3]
    rep = check_inducedmap(T, curve, 3)
    assert rep.case == 1 and rep.ok
