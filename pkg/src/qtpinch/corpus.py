"""
Small library of triangulated surfaces and curves used by tests and the CLI.

Every surface comes with at least two triangulations (related by flips) and
a handful of essential multicurves given as dual paths.
"""

from dataclasses import dataclass, field

from .surface import Triangulation, curve_from_dual_path, flip, transport_curve


def triangulation_from_faces(faces):
    """
    Glue triangles given by vertex triples (counterclockwise) along shared
    vertex pairs.  Only valid when no two triangles share more than one side
    with the same endpoints, as on a simplicial sphere.
    """
    sides = {}
    gluing = []
    for t, f in enumerate(faces):
        for s in range(3):
            key = frozenset((f[(s + 1) % 3], f[(s + 2) % 3]))
            if key in sides:
                gluing.append((sides.pop(key), (t, s)))
            else:
                sides[key] = (t, s)
    return Triangulation(len(faces), gluing)


def once_punctured_torus():
    return Triangulation(2, [((0, 0), (1, 0)), ((0, 2), (1, 2)), ((0, 1), (1, 1))])


def thrice_punctured_sphere():
    return Triangulation(2, [((0, 0), (1, 0)), ((0, 1), (1, 2)), ((0, 2), (1, 1))])


def four_punctured_sphere():
    """Boundary of a tetrahedron with its four vertices removed."""
    return triangulation_from_faces([(0, 1, 2), (0, 3, 1), (1, 3, 2), (0, 2, 3)])


def twice_punctured_torus():
    """
    Square torus with one puncture at the corner and one at the centre; the
    four triangles join the centre to the four sides (bottom, right, top, left).
    Triangle ``i`` has the centre at corner 0.
    """
    gluing = [((i, 1), ((i + 1) % 4, 2)) for i in range(4)]
    gluing += [((0, 0), (2, 0)), ((1, 0), (3, 0))]
    return Triangulation(4, gluing)


@dataclass
class CorpusSurface:
    name: str
    triangulations: list
    curves: dict = field(default_factory=dict)   # name -> (triangulation index, dual paths)

    def curve(self, name):
        idx, paths = self.curves[name]
        T = self.triangulations[idx]
        return T, curve_from_dual_path(T, paths)


def _with_flip(T, e):
    return [T, flip(T, e)[0]]


def corpus():
    """All corpus surfaces, keyed by name."""
    torus = once_punctured_torus()
    sphere3 = thrice_punctured_sphere()
    sphere4 = four_punctured_sphere()
    torus2 = twice_punctured_torus()
    out = {
        "once_punctured_torus": CorpusSurface(
            "once_punctured_torus", [torus, flip(torus, 0)[0], flip(torus, 2)[0]],
            {"a": (0, [(0, 0, 2), (1, 2, 0)]),
             "b": (0, [(0, 1, 2), (1, 2, 1)]),
             "c": (0, [(0, 0, 1), (1, 1, 0)])}),
        "thrice_punctured_sphere": CorpusSurface(
            "thrice_punctured_sphere", [sphere3, flip(sphere3, 0)[0]]),
        "four_punctured_sphere": CorpusSurface(
            "four_punctured_sphere", _with_flip(sphere4, 0),
            {"sep01": (0, [(0, 0, 2), (1, 1, 2), (3, 1, 0), (2, 0, 1)]),
             "sep02": (0, [(3, 0, 2), (0, 1, 2), (1, 1, 0), (2, 2, 0)]),
             "sep03": (0, [(0, 0, 1), (3, 2, 1), (1, 2, 0), (2, 2, 1)])}),
        "twice_punctured_torus": CorpusSurface(
            "twice_punctured_torus", _with_flip(torus2, 0) + [flip(torus2, 4)[0]],
            {"left": (0, [(0, 0, 2), (3, 1, 2), (2, 1, 0)]),
             "right": (0, [(0, 0, 1), (1, 2, 1), (2, 2, 0)]),
             "pair": (0, [[(0, 0, 2), (3, 1, 2), (2, 1, 0)],
                          [(0, 0, 1), (1, 2, 1), (2, 2, 0)]])}),
    }
    return out


def transported(T, curve, edges):
    """Flip a sequence of edges, carrying the curve along."""
    for e in edges:
        T2 = flip(T, e)[0]
        curve = transport_curve(T, curve, e, T2)
        T = T2
    return T, curve
