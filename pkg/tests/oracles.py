"""
Independent reference computations used to derive and cross-check values.

Nothing here calls into the algorithms under test beyond reading the
combinatorial data of a triangulation (edge labels, partners, corner
punctures) and the stored terms of algebra elements.
"""

import itertools

import numpy as np


# hyperbolic geometry: developing ideal triangles in the upper half plane

def _proj(z):
    return np.array([1.0, 0.0]) if z == np.inf else np.array([z, 1.0], dtype=float)


def _through(A, B, C):
    """Matrix sending 0 -> A, infinity -> B, 1 -> C (projective vectors)."""
    M = np.column_stack([B, A])
    a, b = np.linalg.solve(M, C)
    return np.column_stack([b * A, a * B])


def _normalizer(C, P, Q):
    """Matrix sending C -> -1, P -> infinity, Q -> 0."""
    g = np.linalg.inv(_through(Q, P, C))          # Q -> 0, P -> inf, C -> 1
    return np.diag([-1.0, 1.0]) @ g


def developed_neighbour(C, P, Q, x):
    """
    Third vertex of the triangle glued to side ``PQ`` of the counterclockwise
    ideal triangle ``(C, P, Q)`` with shear parameter ``x``.
    """
    return np.linalg.solve(_normalizer(C, P, Q), _proj(x))


def shear(C, P, Q, D):
    """Shear parameter of side ``PQ`` between triangles ``(C, P, Q)`` and ``(D, Q, P)``."""
    z = _normalizer(C, P, Q) @ D
    return z[0] / z[1]


def developed_trace(T, x, dual_path):
    """
    ``|trace|`` of the holonomy of a closed dual path, obtained by developing
    triangles along the path and comparing the final triangle with the first.
    """
    x = np.asarray(x, dtype=float)
    start = [_proj(-1.0), _proj(0.0), _proj(np.inf)]
    cur = list(start)
    t = dual_path[0][0]
    for tt, _, b in dual_path:
        assert tt == t
        C, P, Q = cur[b], cur[(b + 1) % 3], cur[(b + 2) % 3]
        D = developed_neighbour(C, P, Q, x[T.edge(t, b)])
        u, r = T.partner(t, b)
        new = [None] * 3
        new[r], new[(r + 2) % 3], new[(r + 1) % 3] = D, P, Q
        cur, t = new, u
    M0 = _through(start[0], start[1], start[2])
    M1 = _through(cur[0], cur[1], cur[2])
    H = M1 @ np.linalg.inv(M0)
    H = H / np.sqrt(abs(np.linalg.det(H)))
    return abs(np.trace(H))


def developed_length(T, x, dual_path):
    return 2.0 * np.arccosh(developed_trace(T, x, dual_path) / 2.0)


def classical_flip(T, e, x):
    """
    Shear parameters after flipping ``e``, computed geometrically.

    The square is developed in the upper half plane; every square side keeps
    its outer neighbour, so its shear changes by the factor coming from the
    replaced inner triangle.  An edge on two sides of the square collects one
    factor per side.  Returns the new parameters indexed like the old edges.
    """
    x = np.asarray(x, dtype=float)
    (tA, sA), (tB, sB) = T.edge_sides(e)
    R, P, Q = _proj(-1.0), _proj(0.0), _proj(np.inf)
    S = developed_neighbour(R, P, Q, x[e])
    # square sides as (triangle, side, segment start, end, old inner, new inner)
    sides = [
        (tA, (sA + 2) % 3, R, P, Q, S),
        (tA, (sA + 1) % 3, Q, R, P, S),
        (tB, (sB + 1) % 3, P, S, Q, R),
        (tB, (sB + 2) % 3, S, Q, P, R),
    ]
    out = x.copy()
    out[e] = shear(P, S, R, Q)
    for t, k, U, V, old, new in sides:
        j = T.edge(t, k)
        outer = developed_neighbour(old, U, V, x[j])
        out[j] *= shear(new, U, V, outer) / shear(old, U, V, outer)
    return out


def value_at_q_one(elem, x):
    """
    Value of a pivot-rational flip image at ``q = 1`` on commuting positive
    reals ``x``: every term ``f(Z) X_m`` becomes ``f(x_pivot) prod x^m``.
    """
    x = np.asarray(x, dtype=float)
    z = x[elem.pivot]
    total = 0.0
    for m, f in elem.terms.items():
        num = sum(c.evaluate(1) * z ** p for p, c in f.num.c.items())
        den = np.prod([1.0 + z for _ in f.den])
        total += num / den * np.prod(x ** np.asarray(m))
    return total


# quantum torus: the regular representation on functions on (Z/N)^n

class RegularRepresentation:
    """
    ``W_k e_m = q^{sigma(k, m)} e_{m+k}`` on the basis ``e_m``, ``m`` in
    ``(Z/N)^n``.  These operators satisfy ``W_k W_l = q^{sigma(k,l)} W_{k+l}``,
    so they realize Weyl-ordered monomials directly.
    """

    def __init__(self, sigma, N, a=1):
        self.sigma = np.asarray(sigma, dtype=np.int64)
        self.N = N
        self.q = np.exp(2j * np.pi * a / N)
        n = self.sigma.shape[0]
        self.points = list(itertools.product(range(N), repeat=n))
        self.index = {m: i for i, m in enumerate(self.points)}
        self.dim = len(self.points)

    def monomial(self, k):
        k = np.asarray(k, dtype=np.int64)
        W = np.zeros((self.dim, self.dim), dtype=complex)
        for i, m in enumerate(self.points):
            m_arr = np.array(m, dtype=np.int64)
            target = tuple(int(v) for v in (m_arr + k) % self.N)
            W[self.index[target], i] = self.q ** int((k @ self.sigma @ m_arr) % (2 * self.N))
        return W

    def element(self, elem):
        """Matrix of a ``QTorusElement`` (read through its term dictionary)."""
        out = np.zeros((self.dim, self.dim), dtype=complex)
        for k, c in elem.terms.items():
            coeff = sum(v * self.q ** e for e, v in c.items())
            out += coeff * self.monomial(k)
        return out


# linear algebra

def dense_commutant_dimension(matrices, tol=1e-9):
    """Dimension of ``{M : M A = A M for all A}`` via a Kronecker null space."""
    d = matrices[0].shape[0]
    I = np.eye(d)
    rows = [np.kron(I, A) - np.kron(A.T, I) for A in matrices]
    sv = np.linalg.svd(np.vstack(rows), compute_uv=False)
    return int(np.sum(sv < tol * max(1.0, sv.max())))


# combinatorics

def euler_characteristic(T):
    """``V - E + F`` of the closed surface, punctures counted by walking around corners."""
    corners = {(t, k) for t in range(T.triangle_count) for k in range(3)}
    vertices = 0
    while corners:
        start = corners.pop()
        vertices += 1
        stack = [start]
        while stack:
            t, k = stack.pop()
            # corner k is vertex s+2 of side s = k+1 and vertex s+1 of side s = k+2;
            # gluing matches vertex s+1 with r+2 and s+2 with r+1
            for s, shift in (((k + 1) % 3, 1), ((k + 2) % 3, 2)):
                u, r = T.partner(t, s)
                nb = (u, (r + shift) % 3)
                if nb in corners:
                    corners.remove(nb)
                    stack.append(nb)
    return vertices - T.n + T.triangle_count, vertices
