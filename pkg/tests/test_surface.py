import numpy as np
import pytest

from oracles import euler_characteristic
from qtpinch.corpus import (once_punctured_torus, thrice_punctured_sphere,
                            twice_punctured_torus)
from qtpinch.surface import (Backtracks, DanglingSide,
                             DegenerateComponent, EmptyMultiCurve, FlipKind,
                             MatchingFailure, NonOrientable, NotClosed,
                             SelfFoldedEdge, Triangulation, build_triangulation,
                             curve_from_dict, curve_from_dual_path,
                             curve_from_normal, cut_surface, flip, same_cycle,
                             square, square_strands, transport_curve,
                             validate_multicurve)


def all_triangulations(corpus):
    for name, cs in corpus.items():
        for i, T in enumerate(cs.triangulations):
            yield "%s[%d]" % (name, i), T


# construction

def test_once_punctured_torus_invariants():
    T = once_punctured_torus()
    assert (T.genus, T.s, T.n) == (1, 1, 3)
    # closed Euler characteristic 0 with one vertex; punctured: 2 - 2g - s = -1
    assert euler_characteristic(T) == (0, 1)
    assert T.euler_characteristic == -1


def test_thrice_punctured_sphere_invariants():
    T = thrice_punctured_sphere()
    assert (T.genus, T.s, T.n) == (0, 3, 3)
    assert euler_characteristic(T) == (2, 3)


def test_side_glued_to_itself():
    with pytest.raises((NonOrientable, DanglingSide)):
        Triangulation(1, [((0, 0), (0, 0)), ((0, 1), (0, 2))])


def test_dangling_side():
    with pytest.raises(DanglingSide):
        Triangulation(2, [((0, 0), (1, 0)), ((0, 1), (1, 1))])


def test_side_used_twice():
    with pytest.raises(DanglingSide):
        Triangulation(2, [((0, 0), (1, 0)), ((0, 0), (1, 1)), ((0, 2), (1, 2))])


def test_serialization_round_trip(corpus):
    for _, T in all_triangulations(corpus):
        d = T.to_dict()
        T2 = build_triangulation(d)
        assert T2 == T
        assert np.array_equal(T2.poisson_matrix(), T.poisson_matrix())


def test_unknown_fields_rejected():
    d = once_punctured_torus().to_dict()
    d["extra"] = 1
    with pytest.raises(DanglingSide):
        Triangulation.from_dict(d)


def test_edge_count_formula(corpus):
    for name, T in all_triangulations(corpus):
        chi, V = euler_characteristic(T)
        g = (2 - chi) // 2
        assert V == T.s, name
        assert g == T.genus, name
        assert T.n == 6 * g + 3 * T.s - 6, name


# Poisson matrix

def test_torus_sigma():
    S = once_punctured_torus().poisson_matrix()
    assert S.tolist() == [[0, 2, -2], [-2, 0, 2], [2, -2, 0]]


def test_sigma_invariants(corpus):
    for name, T in all_triangulations(corpus):
        S = T.poisson_matrix()
        assert np.array_equal(S, -S.T), name
        assert np.all(np.diag(S) == 0)
        assert S.min() >= -2 and S.max() <= 2
        P = T.puncture_vectors()
        assert np.all(S @ P.T == 0), name
        assert np.linalg.matrix_rank(S) == T.n - T.s, name
        # every edge has two ends
        assert np.all(P.sum(axis=0) == 2)


def test_torus_puncture_vector():
    assert once_punctured_torus().puncture_vectors().tolist() == [[2, 2, 2]]


# flips

def test_torus_flip_kinds():
    T = once_punctured_torus()
    assert all(square(T, e).kind is FlipKind.OnceTorus for e in range(3))


def test_four_sphere_embedded_flip(corpus):
    T = corpus["four_punctured_sphere"].triangulations[0]
    for e in range(T.n):
        assert square(T, e).kind is FlipKind.Embedded
        T2, relabel, kind = flip(T, e)
        assert kind is FlipKind.Embedded
        assert relabel == list(range(T.n))
        S = T2.poisson_matrix()
        assert np.array_equal(S, -S.T)
        assert np.all(S @ T2.puncture_vectors().T == 0)
        assert np.linalg.matrix_rank(S) == T2.n - T2.s


def test_flip_kinds_in_corpus(corpus):
    kinds = set()
    for _, T in all_triangulations(corpus):
        for e in range(T.n):
            try:
                kinds.add(square(T, e).kind)
            except SelfFoldedEdge:
                pass
    assert kinds == set(FlipKind)


def test_self_folded_edge_has_no_square(corpus):
    T = corpus["thrice_punctured_sphere"].triangulations[1]
    folded = [e for e in range(T.n) if len({t for t, _ in T.edge_sides(e)}) == 1]
    assert folded
    with pytest.raises(SelfFoldedEdge):
        square(T, folded[0])


def test_flip_is_involution(corpus):
    for name, T in all_triangulations(corpus):
        for e in range(T.n):
            try:
                T2, _, _ = flip(T, e)
            except SelfFoldedEdge:
                continue
            T3, _, _ = flip(T2, e)
            assert T3.isomorphic_to(T), (name, e)


def test_flip_changes_sigma_consistently(corpus):
    # flipping keeps the surface: same genus, punctures, edge count
    for _, T in all_triangulations(corpus):
        for e in range(T.n):
            try:
                T2, _, _ = flip(T, e)
            except SelfFoldedEdge:
                continue
            assert (T2.genus, T2.s, T2.n) == (T.genus, T.s, T.n)


# curves

def test_torus_curve_crossings():
    T = once_punctured_torus()
    c = curve_from_dual_path(T, [(0, 0, 2), (1, 2, 0)])
    assert c.edge_crossings().tolist() == [1, 1, 0]
    assert len(c.components) == 1


def test_empty_path():
    with pytest.raises(NotClosed):
        curve_from_dual_path(once_punctured_torus(), [])


def test_open_path():
    with pytest.raises(NotClosed):
        curve_from_dual_path(once_punctured_torus(), [(0, 0, 2)])


def test_backtracking_path():
    T = once_punctured_torus()
    with pytest.raises(Backtracks):
        curve_from_dual_path(T, [(0, 0, 0), (1, 0, 0)])


def test_dual_path_round_trip(corpus):
    for name, cs in corpus.items():
        for cn, (idx, paths) in cs.curves.items():
            T, curve = cs.curve(cn)
            if not isinstance(paths[0], list):
                paths = [paths]
            traced = [c.dual_path for c in curve.components]
            assert len(traced) == len(paths)
            for p in paths:
                assert any(same_cycle(p, q) for q in traced), (name, cn)


def test_curve_dict_round_trip(corpus):
    T, curve = corpus["twice_punctured_torus"].curve("pair")
    again = curve_from_dict(T, curve.to_dict())
    assert again == curve
    with pytest.raises(MatchingFailure):
        curve_from_dict(T, {"normal": curve.to_dict()["normal"], "extra": 0})
    with pytest.raises(MatchingFailure):
        curve_from_dict(T, {})


def test_cut_torus_gives_thrice_punctured_sphere():
    T = once_punctured_torus()
    c = curve_from_dual_path(T, [(0, 0, 2), (1, 2, 0)])
    res = cut_surface(T, c)
    Tc = res.surface
    assert (Tc.genus, Tc.s, Tc.n) == (0, 3, 3)
    assert Tc.euler_characteristic == -1
    assert res.K.tolist() == [[1, 1, 0], [1, 1, 0], [0, 0, 1]]


def test_parallel_copies_rejected():
    T = twice_punctured_torus()
    path = [(0, 0, 2), (3, 1, 2), (2, 1, 0)]
    doubled = curve_from_dual_path(T, [path, path])
    with pytest.raises(DegenerateComponent):
        validate_multicurve(T, doubled)


def test_empty_multicurve_rejected():
    T = once_punctured_torus()
    with pytest.raises(EmptyMultiCurve):
        validate_multicurve(T, curve_from_normal(T, np.zeros((2, 3), dtype=int)))


def test_mismatched_normal_coordinates():
    T = once_punctured_torus()
    with pytest.raises(MatchingFailure):
        curve_from_normal(T, [[1, 0, 0], [0, 0, 0]]).check_matching()


def test_two_component_cut(corpus):
    T, curve = corpus["twice_punctured_torus"].curve("pair")
    res = cut_surface(T, curve)
    Tc = res.surface
    assert len(Tc.components) == 2
    assert [(g, s) for g, s, _ in Tc.component_data] == [(0, 3), (0, 3)]


def test_square_strand_trichotomy(corpus):
    # a curve never crosses a square both vertically and horizontally
    for name, cs in corpus.items():
        for cn in cs.curves:
            T, curve = cs.curve(cn)
            for e in range(T.n):
                st = square_strands(T, curve, e)
                assert not (st.vertical and st.horizontal), (name, cn, e)


def test_transport_preserves_crossing_structure(corpus):
    for name, cs in corpus.items():
        for cn in cs.curves:
            T, curve = cs.curve(cn)
            for e in range(T.n):
                T2 = flip(T, e)[0]
                c2 = transport_curve(T, curve, e, T2)
                assert len(c2.components) == len(curve.components)
                # flipping back recovers the curve
                T3 = flip(T2, e)[0]
                c3 = transport_curve(T2, c2, e, T3)
                assert np.array_equal(c3.edge_crossings(), curve.edge_crossings()), (name, cn, e)
