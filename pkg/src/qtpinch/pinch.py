"""
Pinching along a multicurve: the induced triangulation of the cut surface,
the segment-count matrix ``K`` and the pinching homomorphism
``Theta(Y_i) = X_{k_i}`` from the cut surface's algebra into the original one.
"""

import itertools
from dataclasses import dataclass

import numpy as np

from .qalgebra import (DimensionMismatch, QTorusElement, apply_monomial_map,
                       graph_length_element, puncture_element, qpow,
                       sigma_pairing, weyl_monomial)
from .surface import cut_surface, validate_multicurve


class PinchError(ValueError):
    pass


class NoSolution(PinchError):
    """No exponent vector pairs with the curve to +-2."""


class NonPositive(PinchError):
    """Shear coordinates must be strictly positive."""


class OrderDependence(PinchError):
    """Cutting in different orders gave different results."""


@dataclass
class PinchData:
    """
    Result of pinching ``curve`` on ``source``.

    ``K[i, j]`` is the number of segments of edge ``j`` of the source making up
    edge ``i`` of ``surface``.  ``old_punctures[j]`` is the index in ``surface``
    of puncture ``j`` of the source; ``new_punctures[i]`` is the pair
    ``(v', v'')`` of punctures created by component ``i`` (left side, right side).
    """
    source: object
    curve: object
    surface: object
    K: np.ndarray
    crossings: tuple
    old_punctures: tuple
    new_punctures: tuple
    cut: object = None

    @property
    def k(self):
        return len(self.crossings)

    @property
    def tau(self):
        """``K sigma K^T``, predicted to equal the cut surface's Poisson matrix."""
        s = self.source.poisson_matrix()
        return self.K @ s @ self.K.T

    def puncture_map(self):
        """Rows ``(label, index)`` describing where each cut puncture comes from."""
        rows = [(("old", j), v) for j, v in enumerate(self.old_punctures)]
        for i, (a, b) in enumerate(self.new_punctures):
            rows.append((("new", i, "left"), a))
            rows.append((("new", i, "right"), b))
        return rows

    def to_dict(self):
        return {
            "surface": self.surface.to_dict(),
            "K": self.K.tolist(),
            "crossings": [list(map(int, c)) for c in self.crossings],
            "old_punctures": list(map(int, self.old_punctures)),
            "new_punctures": [list(map(int, p)) for p in self.new_punctures],
        }


def cut_along(T, curve):
    """Cut ``T`` along every component of ``curve``."""
    comps = validate_multicurve(T, curve)
    res = cut_surface(T, curve)
    Tc = res.surface
    old = tuple(res.puncture_index(("old", j)) for j in range(T.s))
    new = tuple((res.puncture_index(("new", c.index, 0)),
                 res.puncture_index(("new", c.index, 1))) for c in comps)
    crossings = tuple(np.array(c.crossings, dtype=int) for c in comps)
    return PinchData(T, curve, Tc, res.K, crossings, old, new, res)


def _side_key(T):
    """Edge ``j`` -> frozenset of its two (triangle, side) pairs."""
    return [frozenset(T.edge_sides(j)) for j in range(T.n)]


def cut_in_order(T, curve, order):
    """
    Cut one component at a time in the given order.  Returns the final cut
    triangulation and the composed matrix ``K_last ... K_first``.
    """
    comps = validate_multicurve(T, curve)
    index = [c.index for c in comps]
    if sorted(order) != sorted(index):
        raise PinchError("order must be a permutation of the component indices")
    # triangles keep their indices under cutting, so component identities are
    # tracked through the normal coordinates of the remaining curve
    cur_T, cur_curve, K = T, curve, np.eye(T.n, dtype=int)
    for target in order:
        want = next(c for c in comps if c.index == target)
        # find the component of the current curve matching ``want``'s arcs
        pos = _match_component(cur_curve, want, curve)
        res = cut_surface(cur_T, cur_curve, components=(pos,))
        K = res.K @ K
        cur_T = res.surface
        cur_curve = res.remaining
    return cur_T, K


def _match_component(cur_curve, want, original):
    """
    Index of the component of ``cur_curve`` that descends from ``want``.

    Components are identified by their arcs in the central pieces: cutting
    keeps arcs outside the cut ones, and each triangle keeps its index.
    """
    if cur_curve is original:
        return want.index
    corners = {(t, k) for t, k, _, _ in want.arcs}
    best = None
    for c in cur_curve.components:
        mine = {(t, k) for t, k, _, _ in c.arcs}
        if mine == corners and sum(1 for _ in c.arcs) == len(want.arcs):
            if best is not None:
                raise OrderDependence("ambiguous component identification")
            best = c.index
    if best is None:
        raise OrderDependence("lost track of a component while cutting")
    return best


def edge_matching(T1, T2):
    """
    Permutation ``perm`` with edge ``i`` of ``T1`` equal to edge ``perm[i]`` of
    ``T2``, when both are built on the same triangles; ``None`` otherwise.
    """
    if T1.triangle_count != T2.triangle_count or T1.n != T2.n:
        return None
    k2 = {key: j for j, key in enumerate(_side_key(T2))}
    perm = []
    for key in _side_key(T1):
        if key not in k2:
            return None
        perm.append(k2[key])
    return perm


def order_independent(T, curve, orders=None):
    """
    Check that cutting in every order (or the given ones) yields the same cut
    triangulation and the same ``K`` as cutting all components at once.
    """
    direct = cut_along(T, curve)
    comps = [c.index for c in direct.curve.components]
    if orders is None:
        orders = list(itertools.permutations(comps))
    for order in orders:
        Tc, K = cut_in_order(T, curve, order)
        perm = edge_matching(direct.surface, Tc)
        if perm is None:
            return False
        if not np.array_equal(direct.K, K[perm]):
            return False
    return True


# pinching homomorphism

@dataclass
class ThetaMap:
    data: PinchData
    images: list

    @property
    def source_sigma(self):
        return self.data.surface.poisson_matrix()

    def relation_defects(self):
        tau = self.source_sigma
        bad = []
        for i in range(len(self.images)):
            for j in range(i + 1, len(self.images)):
                a, b = self.images[i], self.images[j]
                if a * b != (b * a).scale(_q2(tau[i, j])):
                    bad.append((i, j))
        return bad


def _q2(a):
    return qpow(2 * int(a))


def theta(data):
    sigma = data.source.poisson_matrix()
    return ThetaMap(data, [weyl_monomial(sigma, row) for row in data.K])


def apply_theta(th, elem):
    """
    Image of an element of the cut surface's algebra.  Each Weyl monomial is
    expanded as an ordered product of generator images.
    """
    tau = th.source_sigma
    if not np.array_equal(elem.sigma, tau):
        raise DimensionMismatch("element does not live on the cut surface")
    sigma = th.data.source.poisson_matrix()
    out = QTorusElement.zero(sigma)
    for k, c in elem.terms.items():
        out = out + apply_monomial_map(th.images, tau, k).scale(c)
    return out


def puncture_checks(data):
    """
    Pinching identities for punctures: old punctures pull back to old ones and
    both new punctures of a component pull back to its graph length element.
    Returns a dict of booleans.
    """
    th = theta(data)
    T, Tc = data.source, data.surface
    out = {}
    for j, v in enumerate(data.old_punctures):
        out[("old", j)] = apply_theta(th, puncture_element(Tc, v)) == puncture_element(T, j)
    for i, (a, b) in enumerate(data.new_punctures):
        X = graph_length_element(T, data.crossings[i])
        out[("new", i, "left")] = apply_theta(th, puncture_element(Tc, a)) == X
        out[("new", i, "right")] = apply_theta(th, puncture_element(Tc, b)) == X
    return out


def skew_commutant(T, crossings):
    """
    Integer vector ``d`` with ``sigma(c, d) = 2``, so that ``X_c X_d = q^4 X_d X_c``.
    Built from an extended-gcd combination of the entries of ``c^T sigma``.
    """
    c = np.asarray(crossings, dtype=np.int64)
    w = c @ T.poisson_matrix()
    g, coeffs = 0, np.zeros(len(w), dtype=np.int64)
    for i, wi in enumerate(w):
        wi = int(wi)
        if wi == 0:
            continue
        if g == 0:
            g = abs(wi)
            coeffs[i] = 1 if wi > 0 else -1
            continue
        if abs(wi) % g == 0:
            continue
        ng, a, b = _ext_gcd(g, abs(wi))
        coeffs = coeffs * a
        coeffs[i] = b * (1 if wi > 0 else -1)
        g = ng
    if g == 0 or 2 % g != 0:
        raise NoSolution("sigma pairings of the curve have gcd %d" % g)
    d = coeffs * (2 // g)
    assert sigma_pairing(T.poisson_matrix(), c, d) == 2
    return d


def _ext_gcd(a, b):
    """``(g, x, y)`` with ``a x + b y = g = gcd(a, b)``."""
    x0, y0, x1, y1 = 1, 0, 0, 1
    while b:
        qq, a, b = a // b, b, a % b
        x0, x1 = x1, x0 - qq * x1
        y0, y1 = y1, y0 - qq * y1
    return a, x0, y0


def coordinate_limit(K, x):
    """``y_i = prod_j x_j^{K_ij}``, computed in log space."""
    x = np.asarray(x, dtype=float)
    if np.any(~(x > 0)):
        raise NonPositive("shear coordinates must be positive")
    return np.exp(np.asarray(K, dtype=float) @ np.log(x))


def dimension_drop(data):
    """Exponent of the representation dimension before and after pinching."""
    return data.source.rep_exponent(), data.surface.rep_exponent()
