"""
Ideal triangulations of punctured surfaces, their Poisson data, flips and
normal multicurves.

A triangulation is a finite set of counterclockwise triangles together with a
pairing of their sides.  Triangle sides are numbered 0, 1, 2 and side ``k`` is
opposite corner ``k``; side ``k`` runs from corner ``k+1`` to corner ``k+2``
(indices mod 3).  Gluing a side to another one always reverses orientation, so
the resulting surface is oriented.  Edges are numbered by the position of their
side pair in the gluing list.

Normal multicurves are stored by per-corner arc counts.  An arc at corner ``k``
joins side ``k+1`` to side ``k+2``; arcs at a corner are indexed by their
distance to the corner, starting at 0 for the innermost one.
"""

import enum
from dataclasses import dataclass, field

import numpy as np


class SurfaceError(ValueError):
    """Base class for invalid triangulations and curves."""


class DanglingSide(SurfaceError):
    """A triangle side is unpaired, paired twice, or out of range."""


class NonOrientable(SurfaceError):
    """A side is glued to itself."""


class ChiNonNegative(SurfaceError):
    """Some connected component has non-negative Euler characteristic."""


class SelfFoldedEdge(SurfaceError):
    """The edge is interior to a self-folded triangle and cannot be flipped."""


class Backtracks(SurfaceError):
    """A curve crosses the same edge twice in a row."""


class NotClosed(SurfaceError):
    """A dual path does not close up."""


class MatchingFailure(SurfaceError):
    """Arc counts on the two sides of an edge disagree."""


class DegenerateComponent(SurfaceError):
    """Cutting produces a piece with non-negative Euler characteristic."""


class EmptyMultiCurve(SurfaceError):
    """A multicurve needs at least one component."""


class _UnionFind:

    def __init__(self, items=()):
        self.parent = {}
        for x in items:
            self.parent[x] = x

    def add(self, x):
        self.parent.setdefault(x, x)

    def find(self, x):
        root = x
        while self.parent[root] != root:
            root = self.parent[root]
        while self.parent[x] != root:
            self.parent[x], x = root, self.parent[x]
        return root

    def union(self, a, b):
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            self.parent[rb] = ra


def _parse_side(side, triangle_count):
    try:
        t, s = side
        t, s = int(t), int(s)
    except (TypeError, ValueError):
        raise DanglingSide("malformed side %r" % (side,))
    if not (0 <= t < triangle_count and 0 <= s < 3):
        raise DanglingSide("side %r out of range" % (side,))
    return (t, s)


class Triangulation:
    r"""
    Ideal triangulation given by glued counterclockwise triangles.

    INPUT:

    - ``triangle_count`` -- number of triangles

    - ``gluing`` -- sequence of pairs ``((t, s), (t', s'))``; the ``i``-th pair
      becomes edge ``i``

    Derived data: punctures as classes of corners (numbered by first appearance
    when scanning triangles and corners in order), connected components with
    their genus and number of punctures.
    """

    def __init__(self, triangle_count, gluing):
        triangle_count = int(triangle_count)
        if triangle_count <= 0:
            raise DanglingSide("a triangulation needs at least one triangle")
        pairs = []
        edge_of = {}
        partner = {}
        for idx, pair in enumerate(gluing):
            try:
                a, b = pair
            except (TypeError, ValueError):
                raise DanglingSide("malformed gluing pair %r" % (pair,))
            a = _parse_side(a, triangle_count)
            b = _parse_side(b, triangle_count)
            if a == b:
                raise NonOrientable("side %r is glued to itself" % (a,))
            for x in (a, b):
                if x in edge_of:
                    raise DanglingSide("side %r appears in two gluing pairs" % (x,))
            edge_of[a] = edge_of[b] = idx
            partner[a] = b
            partner[b] = a
            pairs.append((a, b))
        for t in range(triangle_count):
            for s in range(3):
                if (t, s) not in edge_of:
                    raise DanglingSide("side %r is not glued" % ((t, s),))

        self.triangle_count = triangle_count
        self.gluing = tuple(pairs)
        self.n = len(pairs)
        self._edge = np.array([[edge_of[(t, s)] for s in range(3)]
                               for t in range(triangle_count)], dtype=int)
        self._partner = partner

        corners = _UnionFind((t, k) for t in range(triangle_count) for k in range(3))
        for a, b in pairs:
            (t, s), (u, r) = a, b
            corners.union((t, (s + 1) % 3), (u, (r + 2) % 3))
            corners.union((t, (s + 2) % 3), (u, (r + 1) % 3))
        labels = {}
        self._corner = np.zeros((triangle_count, 3), dtype=int)
        for t in range(triangle_count):
            for k in range(3):
                root = corners.find((t, k))
                if root not in labels:
                    labels[root] = len(labels)
                self._corner[t, k] = labels[root]
        self.s = len(labels)

        tri = _UnionFind(range(triangle_count))
        for (t, _), (u, _) in pairs:
            tri.union(t, u)
        comp_of = {}
        comps = []
        for t in range(triangle_count):
            root = tri.find(t)
            if root not in comp_of:
                comp_of[root] = len(comps)
                comps.append([])
            comps[comp_of[root]].append(t)
        self.components = tuple(tuple(c) for c in comps)
        self._triangle_component = np.array(
            [comp_of[tri.find(t)] for t in range(triangle_count)], dtype=int)

        info = []
        for c, tris in enumerate(self.components):
            F = len(tris)
            E = len({int(self._edge[t, s]) for t in tris for s in range(3)})
            V = len({int(self._corner[t, k]) for t in tris for k in range(3)})
            closed_chi = V - E + F
            if closed_chi % 2 or closed_chi > 2:
                raise NonOrientable("component %d is not a closed orientable surface" % c)
            g = (2 - closed_chi) // 2
            chi = 2 - 2 * g - V
            if chi >= 0:
                raise ChiNonNegative("component %d has Euler characteristic %d" % (c, chi))
            info.append((g, V, chi))
        self.component_data = tuple(info)

    # basic accessors

    def edge(self, t, s):
        """Edge index carried by side ``s`` of triangle ``t``."""
        return int(self._edge[t, s % 3])

    def partner(self, t, s):
        """The side glued to side ``s`` of triangle ``t``."""
        return self._partner[(t, s % 3)]

    def triangle_edges(self, t):
        return tuple(int(x) for x in self._edge[t])

    def edge_sides(self, j):
        """The two sides of edge ``j``, in gluing order."""
        return self.gluing[j]

    def corner_puncture(self, t, k):
        return int(self._corner[t, k % 3])

    def triangle_component(self, t):
        return int(self._triangle_component[t])

    @property
    def edge_array(self):
        return self._edge.copy()

    @property
    def is_connected(self):
        return len(self.components) == 1

    @property
    def genus(self):
        """Genus of a connected triangulation (sum over components otherwise)."""
        return sum(g for g, _, _ in self.component_data)

    @property
    def euler_characteristic(self):
        return sum(chi for _, _, chi in self.component_data)

    def edge_component(self, j):
        (t, _), _ = self.gluing[j]
        return self.triangle_component(t)

    def puncture_component(self, v):
        for t in range(self.triangle_count):
            for k in range(3):
                if self._corner[t, k] == v:
                    return self.triangle_component(t)
        raise IndexError(v)

    def rep_exponent(self):
        """The sum over components of ``3g + s - 3``."""
        return sum(3 * g + v - 3 for g, v, _ in self.component_data)

    def edge_endpoints(self, j):
        """Punctures at the start and end of edge ``j`` (oriented by its first side)."""
        (t, s), _ = self.gluing[j]
        return (self.corner_puncture(t, s + 1), self.corner_puncture(t, s + 2))

    # Poisson data

    def puncture_vectors(self):
        """Integer ``s x n`` matrix whose row ``v`` counts edge ends at puncture ``v``."""
        P = np.zeros((self.s, self.n), dtype=int)
        for j in range(self.n):
            a, b = self.edge_endpoints(j)
            P[a, j] += 1
            P[b, j] += 1
        return P

    def poisson_matrix(self):
        r"""
        The antisymmetric matrix ``sigma = a - a^T``.

        ``a[i, j]`` counts corners whose left side is edge ``i`` and right side
        is edge ``j`` when looking from the triangle into the corner.  At corner
        ``k`` the left side is ``k+2`` and the right side is ``k+1``.
        """
        a = np.zeros((self.n, self.n), dtype=int)
        for t in range(self.triangle_count):
            for k in range(3):
                a[self._edge[t, (k + 2) % 3], self._edge[t, (k + 1) % 3]] += 1
        return a - a.T

    # comparison and serialization

    def canonical_triangles(self, relabel=None):
        """Sorted list of edge triples, each rotated to start at its smallest rotation."""
        out = []
        for t in range(self.triangle_count):
            e = [int(x) for x in self._edge[t]]
            if relabel is not None:
                e = [relabel[x] for x in e]
            out.append(min(tuple(e[i:] + e[:i]) for i in range(3)))
        return sorted(out)

    def isomorphic_to(self, other, relabel=None):
        """
        Whether ``other`` is obtained from ``self`` by permuting and rotating
        triangles, with edge ``j`` of ``self`` sent to edge ``relabel[j]``.

        The edge labels of the sides determine the gluing, so the cyclic edge
        triples determine the triangulation.
        """
        if self.n != other.n or self.triangle_count != other.triangle_count:
            return False
        return self.canonical_triangles(relabel) == other.canonical_triangles()

    def to_dict(self):
        return {"triangles": self.triangle_count,
                "gluing": [[list(a), list(b)] for a, b in self.gluing]}

    @classmethod
    def from_dict(cls, data):
        if not isinstance(data, dict):
            raise DanglingSide("surface description must be a mapping")
        unknown = set(data) - {"triangles", "gluing"}
        if unknown:
            raise DanglingSide("unknown fields %s" % sorted(unknown))
        if "triangles" not in data or "gluing" not in data:
            raise DanglingSide("surface description needs 'triangles' and 'gluing'")
        return cls(data["triangles"], data["gluing"])

    def __eq__(self, other):
        return (isinstance(other, Triangulation)
                and self.triangle_count == other.triangle_count
                and self.gluing == other.gluing)

    def __hash__(self):
        return hash((self.triangle_count, self.gluing))

    def __repr__(self):
        if self.is_connected:
            return "Triangulation(g=%d, s=%d, n=%d)" % (self.genus, self.s, self.n)
        return "Triangulation(%d components, s=%d, n=%d)" % (
            len(self.components), self.s, self.n)


def build_triangulation(spec):
    """Build a triangulation from a mapping ``{"triangles": T, "gluing": [...]}``."""
    if isinstance(spec, Triangulation):
        return spec
    return Triangulation.from_dict(spec)


def poisson_matrix(T):
    return T.poisson_matrix()


# flips

class FlipKind(enum.Enum):
    """Side identification pattern of the square around a flipped edge."""
    Embedded = "embedded"
    Glued13 = "glued13"
    Glued12 = "glued12"
    OnceTorus = "once_torus"
    GluedAdjacentTwice = "glued_adjacent_twice"


# Labels of the square around a diagonal: position 0 is the diagonal, 1..4 the
# sides.  With triangles A = (d, a1, a2) and B = (d, b1, b2) read
# counterclockwise from the diagonal, the boundary of the square reads
# a1, a2, b1, b2 counterclockwise.  Sides 1 and 3 are the ones crossed by a
# strand going through the square "vertically".
SQUARE_LABELS = ("a1", "a2", "b1", "b2")


@dataclass(frozen=True)
class Square:
    """The two triangles on either side of an edge, with labelled sides."""
    diagonal: int
    tri_a: int
    side_a: int
    tri_b: int
    side_b: int
    sides: tuple      # label 1..4 -> (triangle, side)
    edges: tuple      # label 0..4 -> edge index
    kind: FlipKind

    def edge_multiplicity(self, j, labels):
        """Number of sides among ``labels`` carried by edge ``j``."""
        return sum(1 for lab in labels if self.edges[lab] == j)


def _square_positions(tA, sA, tB, sB):
    pos = {"a1": (tA, (sA + 1) % 3), "a2": (tA, (sA + 2) % 3),
           "b1": (tB, (sB + 1) % 3), "b2": (tB, (sB + 2) % 3)}
    return tuple(pos[name] for name in SQUARE_LABELS)


def _classify(edges):
    e1, e2, e3, e4 = edges[1:]
    same13, same24 = e1 == e3, e2 == e4
    adjacent = [e1 == e2, e2 == e3, e3 == e4, e4 == e1]
    if same13 and same24:
        return FlipKind.OnceTorus
    if same13 or same24:
        return FlipKind.Glued13
    if sum(adjacent) >= 2:
        return FlipKind.GluedAdjacentTwice
    if any(adjacent):
        return FlipKind.Glued12
    return FlipKind.Embedded


def square(T, e):
    """The labelled square around edge ``e``; raises ``SelfFoldedEdge``."""
    (tA, sA), (tB, sB) = T.edge_sides(e)
    if tA == tB:
        raise SelfFoldedEdge("edge %d has the same triangle on both sides" % e)
    sides = _square_positions(tA, sA, tB, sB)
    edges = (e,) + tuple(T.edge(t, s) for t, s in sides)
    return Square(e, tA, sA, tB, sB, sides, edges, _classify(edges))


def flip(T, e):
    r"""
    Diagonal exchange at edge ``e``.

    Returns ``(T', relabel, kind)``.  The new diagonal keeps the index ``e`` and
    every other edge keeps its index, so ``relabel`` is the identity list.  The
    triangles ``A``, ``B`` become ``(d, a2, b1)`` and ``(d, b2, a1)``.
    """
    sq = square(T, e)
    tA, sA, tB, sB = sq.tri_a, sq.side_a, sq.tri_b, sq.side_b
    move = {
        (tA, (sA + 1) % 3): (tB, (sB + 2) % 3),   # a1
        (tA, (sA + 2) % 3): (tA, (sA + 1) % 3),   # a2
        (tB, (sB + 1) % 3): (tA, (sA + 2) % 3),   # b1
        (tB, (sB + 2) % 3): (tB, (sB + 1) % 3),   # b2
    }
    gluing = []
    for a, b in T.gluing:
        gluing.append((move.get(a, a), move.get(b, b)))
    T2 = Triangulation(T.triangle_count, gluing)
    return T2, list(range(T.n)), sq.kind


# normal multicurves

def _normal_array(T, normal):
    try:
        arr = np.array([[int(x) for x in row] for row in normal], dtype=int)
    except (TypeError, ValueError):
        raise MatchingFailure("normal coordinates must be integers")
    if arr.shape != (T.triangle_count, 3):
        raise MatchingFailure("normal coordinates must have shape (%d, 3)" % T.triangle_count)
    if (arr < 0).any():
        raise MatchingFailure("normal coordinates must be non-negative")
    return arr


def side_crossings(normal, t, s):
    """Number of arcs meeting side ``s`` of triangle ``t``."""
    return int(normal[t, (s + 1) % 3] + normal[t, (s + 2) % 3])


def _arc_at(normal, t, s, i):
    """The arc ``(t, k, r)`` meeting side ``s`` of triangle ``t`` at position ``i``."""
    k1 = (s + 1) % 3
    if i < normal[t, k1]:
        return (t, k1, i)
    m = side_crossings(normal, t, s)
    return (t, (s + 2) % 3, m - 1 - i)


def _arc_position(normal, t, k, r, s):
    """Position of arc ``(t, k, r)`` on side ``s`` (which is ``k+1`` or ``k+2``)."""
    if s == (k + 2) % 3:
        return r
    m = side_crossings(normal, t, s)
    return m - 1 - r


@dataclass(frozen=True)
class CurveComponent:
    """One traced component: its dual path, arcs in order, and crossing vector."""
    index: int
    dual_path: tuple          # ((t, in_side, out_side), ...)
    arcs: tuple               # ((t, k, r, forward), ...); forward: from side k+1 to k+2
    crossings: tuple          # crossing count per edge


class MultiCurve:
    """
    Multicurve on a triangulation, in normal coordinates.

    ``normal[t][k]`` is the number of arcs of the curve cutting off corner ``k``
    of triangle ``t``.  Components are traced lazily.
    """

    def __init__(self, T, normal):
        self.surface = T
        self.normal = _normal_array(T, normal)
        self.normal.setflags(write=False)
        self._components = None

    def edge_crossings(self):
        T = self.surface
        out = np.zeros(T.n, dtype=int)
        for j in range(T.n):
            (t, s), _ = T.edge_sides(j)
            out[j] = side_crossings(self.normal, t, s)
        return out

    def check_matching(self):
        T = self.surface
        for j in range(T.n):
            (t, s), (u, r) = T.edge_sides(j)
            if side_crossings(self.normal, t, s) != side_crossings(self.normal, u, r):
                raise MatchingFailure("arc counts disagree across edge %d" % j)

    @property
    def components(self):
        if self._components is None:
            self._components = _trace(self)
        return self._components

    def arc_component(self):
        """Map from arc ``(t, k, r)`` to ``(component index, forward flag)``."""
        out = {}
        for comp in self.components:
            for t, k, r, fwd in comp.arcs:
                out[(t, k, r)] = (comp.index, fwd)
        return out

    def to_dict(self):
        return {"normal": [[int(x) for x in row] for row in self.normal]}

    def __eq__(self, other):
        return (isinstance(other, MultiCurve) and self.surface == other.surface
                and np.array_equal(self.normal, other.normal))

    def __hash__(self):
        return hash((self.surface, self.normal.tobytes()))

    def __repr__(self):
        return "MultiCurve(%s)" % self.normal.tolist()


def _trace(curve):
    curve.check_matching()
    T, normal = curve.surface, curve.normal
    seen = set()
    comps = []
    for t in range(T.triangle_count):
        for k in range(3):
            for r in range(normal[t, k]):
                if (t, k, r) in seen:
                    continue
                start = (t, k, r)
                arcs, path = [], []
                cur, in_side = start, (k + 1) % 3
                while True:
                    ct, ck, cr = cur
                    out_side = (ck + 2) % 3 if in_side == (ck + 1) % 3 else (ck + 1) % 3
                    if cur in seen:
                        raise MatchingFailure("arc %r reached twice while tracing" % (cur,))
                    seen.add(cur)
                    arcs.append((ct, ck, cr, in_side == (ck + 1) % 3))
                    path.append((ct, in_side, out_side))
                    pos = _arc_position(normal, ct, ck, cr, out_side)
                    u, s2 = T.partner(ct, out_side)
                    m = side_crossings(normal, u, s2)
                    nxt = _arc_at(normal, u, s2, m - 1 - pos)
                    if nxt == start:
                        if s2 != (k + 1) % 3:
                            raise MatchingFailure("tracing returned through the wrong side")
                        break
                    cur, in_side = nxt, s2
                crossings = np.zeros(T.n, dtype=int)
                for pt, _, out_side in path:
                    crossings[T.edge(pt, out_side)] += 1
                comps.append(CurveComponent(len(comps), tuple(path), tuple(arcs),
                                            tuple(int(x) for x in crossings)))
    return tuple(comps)


def _check_path(T, path):
    if len(path) == 0:
        raise NotClosed("empty dual path")
    steps = []
    for step in path:
        try:
            t, a, b = (int(x) for x in step)
        except (TypeError, ValueError):
            raise NotClosed("malformed dual path step %r" % (step,))
        if not (0 <= t < T.triangle_count and 0 <= a < 3 and 0 <= b < 3):
            raise NotClosed("dual path step %r out of range" % (step,))
        if a == b:
            raise Backtracks("step %r leaves through the side it entered" % (step,))
        steps.append((t, a, b))
    L = len(steps)
    for i, (t, a, b) in enumerate(steps):
        u, c, _ = steps[(i + 1) % L]
        if T.partner(t, b) != (u, c):
            raise NotClosed("step %d does not continue into step %d" % (i, (i + 1) % L))
        nxt = steps[(i + 1) % L]
        if T.edge(t, b) == T.edge(nxt[0], nxt[2]):
            raise Backtracks("edge %d crossed twice in a row" % T.edge(t, b))
    return steps


def _is_path_list(paths):
    try:
        first = paths[0]
        return len(first) > 0 and not np.isscalar(first[0])
    except (TypeError, IndexError, KeyError):
        return False


def curve_from_dual_path(T, path):
    """
    Multicurve traced by a cyclic list of ``(triangle, in_side, out_side)``.

    ``path`` may also be a list of such lists, one per component.
    """
    paths = path if _is_path_list(path) else [path]
    normal = np.zeros((T.triangle_count, 3), dtype=int)
    for p in paths:
        for t, a, b in _check_path(T, p):
            normal[t, 3 - a - b] += 1
    return MultiCurve(T, normal)


def curve_from_normal(T, normal):
    return MultiCurve(T, normal)


def curve_from_dict(T, data):
    if not isinstance(data, dict):
        raise MatchingFailure("curve description must be a mapping")
    unknown = set(data) - {"dual_path", "normal"}
    if unknown:
        raise MatchingFailure("unknown fields %s" % sorted(unknown))
    if ("dual_path" in data) == ("normal" in data):
        raise MatchingFailure("curve description needs exactly one of 'dual_path', 'normal'")
    if "dual_path" in data:
        return curve_from_dual_path(T, data["dual_path"])
    return curve_from_normal(T, data["normal"])


def same_cycle(p, q, allow_reverse=True):
    """Whether dual paths ``p`` and ``q`` agree up to rotation (and reversal)."""
    p = [tuple(x) for x in p]
    q = [tuple(x) for x in q]
    if len(p) != len(q):
        return False
    cands = [q]
    if allow_reverse:
        cands.append([(t, b, a) for t, a, b in reversed(q)])
    for c in cands:
        for i in range(len(c)):
            if c[i:] + c[:i] == p:
                return True
    return False


# cutting

@dataclass
class CutResult:
    """
    Outcome of cutting along some components of a multicurve.

    ``K[i, j]`` counts segments of edge ``j`` collapsed into edge ``i`` of the
    cut triangulation.  ``labels[v]`` names puncture ``v`` of the cut surface:
    ``("old", j)`` or ``("new", component, side)`` with side 0 for the left
    of the component and 1 for its right.
    """
    source: Triangulation
    curve: MultiCurve
    cut_components: tuple
    surface: Triangulation
    K: np.ndarray
    labels: tuple
    segment_class: dict = field(repr=False)
    remaining: MultiCurve = None
    remaining_components: tuple = ()

    def puncture_index(self, label):
        return self.labels.index(label)


def cut_surface(T, curve, components=None):
    """
    Cut ``T`` along the given components of ``curve`` and collapse bigons.

    Each triangle keeps one triangular piece (the part outside all cut corner
    arcs).  Every other piece is a bigon; chains of bigons are collapsed into
    single edges, whose segment counts form the rows of ``K``.  Raises
    ``DegenerateComponent`` if some chain of bigons closes up, which happens
    exactly when a cut piece is an annulus or a once-punctured disc.
    """
    comps = curve.components
    if not comps:
        raise EmptyMultiCurve("multicurve has no components")
    if components is None:
        components = tuple(c.index for c in comps)
    components = tuple(sorted(set(int(c) for c in components)))
    if not components:
        raise EmptyMultiCurve("nothing to cut along")
    cutset = set(components)
    normal = curve.normal
    arc_comp = curve.arc_component()
    F = T.triangle_count

    def is_cut(t, k, r):
        return arc_comp[(t, k, r)][0] in cutset

    # cut arcs per corner, ordered from the corner outwards
    cut_r = [[[r for r in range(normal[t, k]) if is_cut(t, k, r)] for k in range(3)]
             for t in range(F)]
    L = np.array([[len(cut_r[t][k]) for k in range(3)] for t in range(F)], dtype=int)

    def side_cuts(t, s):
        return int(L[t, (s + 1) % 3] + L[t, (s + 2) % 3])

    edge_cuts = []
    for j in range(T.n):
        (t, s), (u, r) = T.edge_sides(j)
        if side_cuts(t, s) != side_cuts(u, r):
            raise MatchingFailure("cut arcs disagree across edge %d" % j)
        edge_cuts.append(side_cuts(t, s))

    def segment(t, s, u):
        j = T.edge(t, s)
        first, _ = T.edge_sides(j)
        if first == (t, s % 3):
            return (j, u)
        return (j, edge_cuts[j] - u)

    uf = _UnionFind((j, u) for j in range(T.n) for u in range(edge_cuts[j] + 1))
    for t in range(F):
        for k in range(3):
            M = side_cuts(t, k + 1)
            for layer in range(L[t, k]):
                uf.union(segment(t, k + 2, layer), segment(t, k + 1, M - layer))

    central = {}
    for t in range(F):
        for s in range(3):
            root = uf.find(segment(t, s, L[t, (s + 1) % 3]))
            central.setdefault(root, []).append((t, s))
    members = {}
    for j in range(T.n):
        for u in range(edge_cuts[j] + 1):
            members.setdefault(uf.find((j, u)), []).append((j, u))
    for root in members:
        if root not in central:
            raise DegenerateComponent("a chain of bigons closes up: cut piece with chi >= 0")
        if len(central[root]) != 2:
            raise DegenerateComponent("malformed bigon chain")

    rows = {}
    for root, segs in members.items():
        row = np.zeros(T.n, dtype=int)
        for j, _ in segs:
            row[j] += 1
        rows[root] = row
    order = sorted(members, key=lambda rt: (tuple(-rows[rt]), min(members[rt])))
    gluing = [tuple(sorted(central[rt])) for rt in order]
    Tc = Triangulation(F, gluing)
    K = np.array([rows[rt] for rt in order], dtype=int)
    class_index = {rt: i for i, rt in enumerate(order)}
    segment_class = {sg: class_index[uf.find(sg)] for segs in members.values() for sg in segs}

    # puncture labels of the cut surface
    vlabel = {}
    for t in range(F):
        for k in range(3):
            if L[t, k] == 0:
                lab = ("old", T.corner_puncture(t, k))
            else:
                ci, fwd = arc_comp[(t, k, cut_r[t][k][-1])]
                # forward arcs keep the corner on their right, the central piece on the left
                lab = ("new", ci, 0 if fwd else 1)
            v = Tc.corner_puncture(t, k)
            if vlabel.setdefault(v, lab) != lab:
                raise DegenerateComponent("puncture labels collide after cutting")
    wanted = [("old", j) for j in range(T.s)]
    for ci in components:
        wanted += [("new", ci, 0), ("new", ci, 1)]
    if sorted(vlabel.values()) != sorted(wanted) or len(vlabel) != len(wanted):
        raise DegenerateComponent("cutting lost or merged punctures")
    labels = tuple(vlabel[v] for v in range(Tc.s))

    rest = [c.index for c in comps if c.index not in cutset]
    remaining = None
    if rest:
        rn = np.zeros((F, 3), dtype=int)
        for t in range(F):
            for k in range(3):
                top = cut_r[t][k][-1] if cut_r[t][k] else -1
                rn[t, k] = sum(1 for r in range(top + 1, normal[t, k])
                               if not is_cut(t, k, r))
        remaining = MultiCurve(Tc, rn)
    return CutResult(T, curve, components, Tc, K, labels, segment_class,
                     remaining, tuple(rest))


def validate_multicurve(T, curve):
    """
    Check a multicurve and return its traced components.

    Raises ``MatchingFailure``, ``EmptyMultiCurve``, ``Backtracks`` or
    ``DegenerateComponent``.
    """
    if curve.surface is not T and curve.surface != T:
        raise MatchingFailure("curve lives on a different triangulation")
    curve.check_matching()
    comps = curve.components
    if not comps:
        raise EmptyMultiCurve("multicurve has no components")
    for c in comps:
        edges = [T.edge(t, b) for t, _, b in c.dual_path]
        for i in range(len(edges)):
            if edges[i] == edges[(i + 1) % len(edges)]:
                raise Backtracks("component %d crosses edge %d twice in a row"
                                 % (c.index, edges[i]))
    cut_surface(T, curve)
    return comps


# strands through a flip square

@dataclass(frozen=True)
class SquareStrands:
    """Numbers of curve strands through a square, keyed by the pair of sides joined."""
    counts: dict

    @property
    def vertical(self):
        return self.counts[(1, 3)]

    @property
    def horizontal(self):
        return self.counts[(2, 4)]


def square_strands(T, curve, e):
    sq = square(T, e)
    n = curve.normal
    tA, sA, tB, sB = sq.tri_a, sq.side_a, sq.tri_b, sq.side_b
    # corners: in A, R = sA (between a1, a2), P = sA+1, Q = sA+2; in B, S = sB,
    # Q = sB+1, P = sB+2.  The diagonal runs from P to Q.
    nR, nPA, nQA = n[tA, sA], n[tA, (sA + 1) % 3], n[tA, (sA + 2) % 3]
    nS, nQB, nPB = n[tB, sB], n[tB, (sB + 1) % 3], n[tB, (sB + 2) % 3]
    if nPA + nQA != nPB + nQB:
        raise MatchingFailure("arc counts disagree across edge %d" % e)
    named = {
        frozenset(("a1", "a2")): int(nR),
        frozenset(("b1", "b2")): int(nS),
        frozenset(("a2", "b1")): int(min(nPA, nPB)),
        frozenset(("a1", "b2")): int(min(nQA, nQB)),
        frozenset(("a2", "b2")): int(max(0, nPA - nPB)),
        frozenset(("a1", "b1")): int(max(0, nPB - nPA)),
    }
    lab = {name: i + 1 for i, name in enumerate(SQUARE_LABELS)}
    counts = {}
    for key, val in named.items():
        a, b = sorted(lab[x] for x in key)
        counts[(a, b)] = val
    return SquareStrands(counts)


def transport_curve(T, curve, e, T2=None):
    """Normal coordinates of ``curve`` after flipping edge ``e``."""
    if T2 is None:
        T2, _, _ = flip(T, e)
    sq = square(T, e)
    tA, sA, tB, sB = sq.tri_a, sq.side_a, sq.tri_b, sq.side_b
    st = square_strands(T, curve, e).counts
    lab = {name: i + 1 for i, name in enumerate(SQUARE_LABELS)}

    def cnt(x, y):
        a, b = sorted((lab[x], lab[y]))
        return st[(a, b)]

    n2 = np.array(curve.normal, dtype=int)
    n2[tA, sA] = cnt("a2", "b1")                           # P
    n2[tA, (sA + 1) % 3] = cnt("b1", "b2") + cnt("a1", "b1")  # S
    n2[tA, (sA + 2) % 3] = cnt("a1", "a2") + cnt("a2", "b2")  # R
    n2[tB, sB] = cnt("a1", "b2")                           # Q
    n2[tB, (sB + 1) % 3] = cnt("a1", "a2") + cnt("a1", "b1")  # R
    n2[tB, (sB + 2) % 3] = cnt("b1", "b2") + cnt("a2", "b2")  # S
    return MultiCurve(T2, n2)
