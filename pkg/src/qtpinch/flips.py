"""
Flip coordinate changes in the Chekhov-Fock algebra and their degenerate
monomial limits.

The quantum flip at an edge ``e`` takes values in fractions that are rational
in the single pivot ``Z = X_e`` and polynomial in the other generators.  Such
elements are stored as sums ``f(Z) X_m`` with ``m_e = 0`` and ``f`` a rational
function whose denominator is a product of factors ``1 + q^c Z``.  Moving ``Z``
past ``X_m`` uses ``X_m Z = q^{2 sigma(m, e)} Z X_m``.
"""

from dataclasses import dataclass

import numpy as np

from .qalgebra import (LaurentQ, QTorusElement, AlgebraError, DimensionMismatch,
                       ONE, qpow, weyl_monomial, weyl_prefactor, _as_matrix)
from .surface import FlipKind, flip, square


class FlipError(ValueError):
    pass


class UnsupportedFlipKind(FlipError):
    """An edge occupies a combination of square sides the flip formula does not cover."""


# polynomials in the pivot

class ZPoly:
    """Laurent polynomial in ``Z`` with ``LaurentQ`` coefficients."""

    __slots__ = ("c",)

    def __init__(self, c=None):
        self.c = {int(e): LaurentQ.coerce(v) for e, v in (c or {}).items()
                  if not LaurentQ.coerce(v).is_zero()}

    @classmethod
    def const(cls, a=1):
        return cls({0: LaurentQ.coerce(a)})

    @classmethod
    def factor(cls, c):
        """``1 + q^c Z``."""
        return cls({0: ONE, 1: qpow(c)})

    def is_zero(self):
        return not self.c

    def __add__(self, other):
        out = dict(self.c)
        for e, v in other.c.items():
            out[e] = out[e] + v if e in out else v
        return ZPoly(out)

    def __neg__(self):
        return ZPoly({e: -v for e, v in self.c.items()})

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        if isinstance(other, LaurentQ):
            return ZPoly({e: v * other for e, v in self.c.items()})
        out = {}
        for e1, v1 in self.c.items():
            for e2, v2 in other.c.items():
                e = e1 + e2
                out[e] = out[e] + v1 * v2 if e in out else v1 * v2
        return ZPoly(out)

    def shift_z(self, k):
        """Multiply by ``Z^k``."""
        return ZPoly({e + k: v for e, v in self.c.items()})

    def rescale(self, s):
        """Substitute ``Z -> q^s Z``."""
        return ZPoly({e: v.shift(s * e) for e, v in self.c.items()})

    def invert_variable(self):
        """Substitute ``Z -> Z^-1``."""
        return ZPoly({-e: v for e, v in self.c.items()})

    def divide_factor(self, c):
        """Quotient by ``1 + q^c Z`` if exact, else ``None``."""
        if not self.c:
            return ZPoly()
        lo, hi = min(self.c), max(self.c)
        if lo == hi:
            return None
        b = {}
        prev = LaurentQ()
        for e in range(lo, hi):
            a = self.c.get(e, LaurentQ())
            cur = a - prev.shift(c)
            b[e] = cur
            prev = cur
        if prev.shift(c) != self.c.get(hi, LaurentQ()):
            return None
        return ZPoly(b)

    def evaluate(self, Zmat, identity, scalar):
        """Evaluate on a matrix, mapping coefficients through ``scalar``."""
        out = 0 * identity
        for e, v in self.c.items():
            out = out + scalar(v) * np.linalg.matrix_power(Zmat, e) if e >= 0 else \
                out + scalar(v) * np.linalg.matrix_power(np.linalg.inv(Zmat), -e)
        return out

    def __eq__(self, other):
        return isinstance(other, ZPoly) and self.c == other.c

    def __repr__(self):
        if not self.c:
            return "0"
        return " + ".join("(%r)Z^%d" % (v, e) for e, v in sorted(self.c.items()))


class RationalZ:
    """
    Rational function ``num / prod_c (1 + q^c Z)`` in the pivot ``Z``.

    The denominator multiset is kept sorted, and factors dividing the numerator
    are cancelled, which makes the representation unique.
    """

    __slots__ = ("num", "den")

    def __init__(self, num, den=()):
        num = num if isinstance(num, ZPoly) else ZPoly(num)
        den = list(den)
        if num.is_zero():
            den = []
        changed = True
        while changed and den:
            changed = False
            for c in sorted(set(den)):
                q = num.divide_factor(c)
                if q is not None:
                    num = q
                    den.remove(c)
                    changed = True
                    break
        self.num = num
        self.den = tuple(sorted(den))

    @classmethod
    def const(cls, a=1):
        return cls(ZPoly.const(a))

    @classmethod
    def z_power(cls, k, coeff=1):
        return cls(ZPoly({k: LaurentQ.coerce(coeff)}))

    def is_zero(self):
        return self.num.is_zero()

    def __add__(self, other):
        if self.is_zero():
            return other
        if other.is_zero():
            return self
        mine, theirs = list(self.den), list(other.den)
        common = []
        extra_self, extra_other = [], []
        for c in sorted(set(mine) | set(theirs)):
            a, b = mine.count(c), theirs.count(c)
            common += [c] * max(a, b)
            extra_self += [c] * (max(a, b) - a)
            extra_other += [c] * (max(a, b) - b)
        n1 = self.num
        for c in extra_self:
            n1 = n1 * ZPoly.factor(c)
        n2 = other.num
        for c in extra_other:
            n2 = n2 * ZPoly.factor(c)
        return RationalZ(n1 + n2, common)

    def __neg__(self):
        return RationalZ(-self.num, self.den)

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        if isinstance(other, (LaurentQ, int)):
            return RationalZ(self.num * LaurentQ.coerce(other), self.den)
        return RationalZ(self.num * other.num, self.den + other.den)

    def rescale(self, s):
        """Substitute ``Z -> q^s Z``."""
        return RationalZ(self.num.rescale(s), tuple(c + s for c in self.den))

    def invert_variable(self):
        """Substitute ``Z -> Z^-1``; ``1/(1 + q^c Z^-1) = q^-c Z / (1 + q^-c Z)``."""
        num = self.num.invert_variable()
        den = []
        for c in self.den:
            num = num.shift_z(1) * qpow(-c)
            den.append(-c)
        return RationalZ(num, den)

    def inverse(self):
        """Inverse, when the numerator is a unit times factors ``1 + q^c Z``."""
        if self.num.is_zero():
            raise ZeroDivisionError("inverse of zero")
        num = self.num
        lo = min(num.c)
        num = num.shift_z(-lo)
        factors = []
        while max(num.c) > 0:
            a0 = num.c.get(0)
            top = num.c[max(num.c)]
            if a0 is None:
                raise AlgebraError("numerator has no constant term")
            found = None
            span = 4 * (abs(top.max_exponent()) + abs(a0.max_exponent())
                        + abs(top.min_exponent()) + abs(a0.min_exponent())) + 8
            for c in range(-span, span + 1):
                qq = num.divide_factor(c)
                if qq is not None:
                    found = (c, qq)
                    break
            if found is None:
                raise AlgebraError("numerator is not a product of pivot factors")
            factors.append(found[0])
            num = found[1]
        unit = num.c[0]
        if not unit.is_monomial() or unit.items()[0][1] not in (1, -1):
            raise AlgebraError("numerator coefficient is not a unit")
        (e, v), = unit.items()
        inv_unit = LaurentQ.monomial(-e, v)
        out_num = ZPoly.const(inv_unit).shift_z(-lo)
        for c in self.den:
            out_num = out_num * ZPoly.factor(c)
        return RationalZ(out_num, factors)

    def evaluate(self, Zmat, scalar):
        """Matrix value at ``Z = Zmat``; ``scalar`` maps ``LaurentQ`` to numbers."""
        I = np.eye(Zmat.shape[0], dtype=complex)
        out = np.zeros_like(I)
        Zinv = None
        for e, v in self.num.c.items():
            if e >= 0:
                out = out + scalar(v) * np.linalg.matrix_power(Zmat, e)
            else:
                if Zinv is None:
                    Zinv = np.linalg.inv(Zmat)
                out = out + scalar(v) * np.linalg.matrix_power(Zinv, -e)
        for c in self.den:
            out = np.linalg.solve((I + scalar(qpow(c)) * Zmat).T, out.T).T
        return out

    def __eq__(self, other):
        return isinstance(other, RationalZ) and self.num == other.num and self.den == other.den

    def __repr__(self):
        if not self.den:
            return "[%r]" % self.num
        return "[%r] / %s" % (self.num, "".join("(1+q^%d Z)" % c for c in self.den))


class QRational:
    """
    Element ``sum_m f_m(Z) X_m`` of the fraction algebra, rational in the pivot
    ``Z = X_pivot`` and Laurent in the other generators.
    """

    __slots__ = ("sigma", "pivot", "terms", "_key")

    def __init__(self, sigma, pivot, terms=None):
        self.sigma = _as_matrix(sigma)
        self.pivot = int(pivot)
        self._key = self.sigma.tobytes()
        t = {}
        for m, f in (terms or {}).items():
            m = tuple(int(x) for x in m)
            if m[self.pivot] != 0:
                raise FlipError("pivot exponent must be absorbed into the coefficient")
            if m in t:
                f = t[m] + f
            if f.is_zero():
                t.pop(m, None)
            else:
                t[m] = f
        self.terms = t

    @property
    def n(self):
        return self.sigma.shape[0]

    def _pair(self, m):
        """``sigma(m, e_pivot)``."""
        return int(np.asarray(m, dtype=np.int64) @ self.sigma[:, self.pivot])

    @classmethod
    def from_qtorus(cls, elem, pivot):
        sigma = elem.sigma
        terms = {}
        for k, c in elem.terms.items():
            a = k[pivot]
            m = list(k)
            m[pivot] = 0
            # X_k = q^{-a sigma(e_p, m)} Z^a X_m
            e = -a * int(sigma[pivot] @ np.asarray(m, dtype=np.int64))
            f = RationalZ.z_power(a, c.shift(e))
            m = tuple(m)
            terms[m] = terms[m] + f if m in terms else f
        return cls(sigma, pivot, terms)

    @classmethod
    def scalar(cls, sigma, pivot, f):
        n = _as_matrix(sigma).shape[0]
        return cls(sigma, pivot, {(0,) * n: f})

    @classmethod
    def one(cls, sigma, pivot):
        return cls.scalar(sigma, pivot, RationalZ.const(1))

    def _check(self, other):
        if self._key != other._key or self.pivot != other.pivot:
            raise DimensionMismatch("elements live in different fraction algebras")

    def __add__(self, other):
        self._check(other)
        t = dict(self.terms)
        for m, f in other.terms.items():
            t[m] = t[m] + f if m in t else f
        return QRational(self.sigma, self.pivot, t)

    def __neg__(self):
        return QRational(self.sigma, self.pivot, {m: -f for m, f in self.terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def scale(self, c):
        c = LaurentQ.coerce(c)
        return QRational(self.sigma, self.pivot, {m: f * c for m, f in self.terms.items()})

    def __mul__(self, other):
        if isinstance(other, (int, LaurentQ)):
            return self.scale(other)
        self._check(other)
        s = self.sigma
        out = {}
        for m, f in self.terms.items():
            mv = np.asarray(m, dtype=np.int64)
            shift = 2 * self._pair(m)
            ms = mv @ s
            for l, g in other.terms.items():
                lv = np.asarray(l, dtype=np.int64)
                coeff = (f * g.rescale(shift)) * qpow(int(ms @ lv))
                key = tuple(int(x) for x in mv + lv)
                out[key] = out[key] + coeff if key in out else coeff
        return QRational(s, self.pivot, out)

    def inverse(self):
        if len(self.terms) != 1:
            raise AlgebraError("only single-term elements are inverted")
        (m, f), = self.terms.items()
        minus = tuple(-x for x in m)
        # (f X_m)^-1 = X_-m f^-1 = f^-1(q^{2 sigma(-m, e_p)} Z) X_-m
        return QRational(self.sigma, self.pivot,
                         {minus: f.inverse().rescale(2 * self._pair(minus))})

    def __pow__(self, k):
        k = int(k)
        if k < 0:
            return self.inverse() ** (-k)
        out = QRational.one(self.sigma, self.pivot)
        for _ in range(k):
            out = out * self
        return out

    def is_zero(self):
        return not self.terms

    def __eq__(self, other):
        if not isinstance(other, QRational):
            return NotImplemented
        return (self._key == other._key and self.pivot == other.pivot
                and (self - other).is_zero())

    def __hash__(self):
        return hash((self._key, self.pivot, len(self.terms)))

    def to_list(self):
        out = []
        for m, f in sorted(self.terms.items()):
            out.append({"monomial": list(m),
                        "numerator": [[e, v.to_pairs()] for e, v in sorted(f.num.c.items())],
                        "denominator": list(f.den)})
        return out

    def __repr__(self):
        if not self.terms:
            return "0"
        return " + ".join("%r*X%s" % (f, list(m)) for m, f in sorted(self.terms.items()))


# flip maps

@dataclass
class FlipMap:
    """
    Images of the generators ``X'_i`` of the flipped triangulation.

    ``images`` are ``QRational`` for the quantum flip and ``QTorusElement``
    for the degenerate monomial maps; ``direction`` is ``None``, ``"vertical"``
    or ``"horizontal"``.
    """
    source: object
    target: object
    edge: int
    kind: FlipKind
    images: list
    direction: str = None

    @property
    def target_sigma(self):
        return self.target.poisson_matrix()

    def relation_defects(self):
        """Pairs ``(i, j)`` where the image relation fails."""
        s2 = self.target_sigma
        bad = []
        for i in range(len(self.images)):
            for j in range(i + 1, len(self.images)):
                a, b = self.images[i], self.images[j]
                if a * b != (b * a).scale(qpow(2 * int(s2[i, j]))):
                    bad.append((i, j))
        return bad

    def preserves_relations(self):
        return not self.relation_defects()

    def apply(self, elem):
        """Image of a Weyl monomial sum (``QTorusElement``) or ``QRational`` of the target algebra."""
        if isinstance(elem, QTorusElement):
            out = None
            for k, c in elem.terms.items():
                term = self._apply_monomial(k).scale(c)
                out = term if out is None else out + term
            return out if out is not None else self._zero()
        if isinstance(elem, QRational):
            if self.direction is not None:
                raise FlipError("monomial maps act on Laurent elements only")
            if elem.pivot != self.edge:
                raise FlipError("pivot must be the flipped edge")
            out = self._zero()
            for m, f in elem.terms.items():
                out = out + self._apply_rational(f) * self._apply_monomial(m)
            return out
        raise TypeError("cannot apply flip map to %r" % (elem,))

    def _zero(self):
        sigma = self.source.poisson_matrix()
        if self.direction is None:
            return QRational(sigma, self.edge)
        return QTorusElement.zero(sigma)

    def _apply_rational(self, f):
        # the pivot Z' = X'_e maps to X_e^{-1}
        g = f.invert_variable()
        return QRational.scalar(self.source.poisson_matrix(), self.edge, g)

    def _apply_monomial(self, k):
        k = [int(x) for x in k]
        out = None
        for i, ki in enumerate(k):
            if ki:
                term = self.images[i] ** ki
                out = term if out is None else out * term
        if out is None:
            sigma = self.source.poisson_matrix()
            if self.direction is None:
                return QRational.one(sigma, self.edge)
            return QTorusElement.one(sigma)
        return out.scale(qpow(weyl_prefactor(self.target_sigma, k)))


def _vertical_factor(c):
    """``1 + q^c Z``."""
    return RationalZ(ZPoly.factor(c))


def _horizontal_factor(c):
    """``(1 + q^c Z^{-1})^{-1} = q^{-c} Z / (1 + q^{-c} Z)``."""
    return RationalZ(ZPoly({1: qpow(-c)}), (-c,))


def side_occurrences(sq, e):
    """Edge ``i != e`` -> ``(vertical, horizontal)`` counts of its sides in the square."""
    counts = {}
    for lab in (1, 2, 3, 4):
        i = sq.edges[lab]
        if i == e:
            continue
        v, h = counts.get(i, (0, 0))
        counts[i] = (v + (lab in (1, 3)), h + (lab in (2, 4)))
    return counts


def flip_factor(vertical, horizontal):
    r"""
    Left factor ``F(Z)`` in ``Phi(X'_i) = F(X_e) X_i`` for an edge occupying
    ``vertical`` of the sides 1, 3 and ``horizontal`` of the sides 2, 4.

    An edge fills at most two sides, so the cases are
    ``(1, 0): 1 + qZ``, ``(2, 0): (1 + qZ)(1 + q^3 Z)``,
    ``(0, 1): (1 + qZ^{-1})^{-1}``, ``(0, 2): (1 + qZ^{-1})^{-1}(1 + q^3 Z^{-1})^{-1}``
    and ``(1, 1): Z``, where the two factors cancel.
    """
    if vertical and horizontal:
        if (vertical, horizontal) != (1, 1):
            raise UnsupportedFlipKind("edge occupies %d sides of a square"
                                      % (vertical + horizontal))
        return RationalZ.z_power(1)
    f = RationalZ.const(1)
    for k in range(vertical):
        f = f * _vertical_factor(2 * k + 1)
    for k in range(horizontal):
        f = f * _horizontal_factor(2 * k + 1)
    return f


def phi_flip(T, e):
    r"""
    Quantum flip ``X'_i -> Phi(X'_i)`` for the diagonal exchange at ``e``.

    ``X'_e -> X_e^{-1}``; an edge on the sides of the square maps to
    ``F(X_e) X_i`` with ``F`` from ``flip_factor`` (in an embedded square: sides
    1 and 3 give ``(1 + q X_e) X_i``, sides 2 and 4 give
    ``(1 + q X_e^{-1})^{-1} X_i``); other generators are fixed.
    """
    T2, _, kind = flip(T, e)
    sq = square(T, e)
    sigma = T.poisson_matrix()
    n = T.n
    unit = np.eye(n, dtype=int)
    images = [QRational.from_qtorus(weyl_monomial(sigma, unit[i]), e) for i in range(n)]
    images[e] = QRational.from_qtorus(weyl_monomial(sigma, -unit[e]), e)
    for i, (v, h) in side_occurrences(sq, e).items():
        images[i] = QRational.scalar(sigma, e, flip_factor(v, h)) * images[i]
    return FlipMap(T, T2, e, kind, images)


# degenerate limits, as listed per square type: label -> (q exponent, power of X_0)
_PSI_TABLE = {
    FlipKind.Embedded: {
        "vertical": {1: (1, 1), 2: (0, 0), 3: (1, 1), 4: (0, 0)},
        "horizontal": {1: (0, 0), 2: (-1, 1), 3: (0, 0), 4: (-1, 1)},
    },
    FlipKind.Glued13: {
        "vertical": {1: (4, 2), 2: (0, 0), 4: (0, 0)},
        "horizontal": {1: (0, 0), 2: (-1, 1), 4: (-1, 1)},
    },
    FlipKind.Glued12: {
        "vertical": {1: (0, 1), 3: (1, 1), 4: (0, 0)},
        "horizontal": {1: (0, 1), 3: (0, 0), 4: (-1, 1)},
    },
    FlipKind.OnceTorus: {
        "vertical": {1: (4, 2), 2: (0, 0)},
        "horizontal": {1: (0, 0), 2: (-4, 2)},
    },
}


def _table_labels(sq):
    """
    Relabelling of the square matching the listed identification pattern, or
    ``None`` if the pattern is not one of the listed ones.  Swapping the two
    triangles exchanges labels 1 <-> 3 and 2 <-> 4.
    """
    e = sq.edges
    swap = {0: 0, 1: 3, 2: 4, 3: 1, 4: 2}
    ident = {i: i for i in range(5)}
    if sq.kind is FlipKind.Embedded or sq.kind is FlipKind.OnceTorus:
        return ident
    if sq.kind is FlipKind.Glued13:
        return ident if e[1] == e[3] else None
    if sq.kind is FlipKind.Glued12:
        if e[1] == e[2]:
            return ident
        if e[3] == e[4]:
            return swap
    return None


def psi_weyl_images(T, e, direction):
    """
    Monomial limit images as Weyl monomials: ``X'_i -> X_{e_i + m_i e_0}`` where
    ``m_i`` counts the sides of type 1/3 (vertical) or 2/4 (horizontal) carried
    by edge ``i``, and ``X'_0 -> X_0^{-1}``.
    """
    sq = square(T, e)
    sigma = T.poisson_matrix()
    labels = (1, 3) if direction == "vertical" else (2, 4)
    n = T.n
    images = []
    for i in range(n):
        k = np.zeros(n, dtype=int)
        if i == e:
            k[e] = -1
        else:
            k[i] = 1
            k[e] = sq.edge_multiplicity(i, labels)
        images.append(weyl_monomial(sigma, k))
    return images


def psi_flip(T, e, direction):
    """
    Degenerate monomial limit of the flip at ``e`` in the given direction
    (``"vertical"``: the pivot shear tends to infinity; ``"horizontal"``: to 0).
    """
    if direction not in ("vertical", "horizontal"):
        raise FlipError("direction must be 'vertical' or 'horizontal'")
    T2, _, kind = flip(T, e)
    sq = square(T, e)
    sigma = T.poisson_matrix()
    relabel = _table_labels(sq)
    if relabel is None:
        images = psi_weyl_images(T, e, direction)
        return FlipMap(T, T2, e, kind, images, direction)
    n = T.n
    X = [QTorusElement.generator(sigma, i) for i in range(n)]
    images = list(X)
    images[e] = X[e].inverse()
    table = _PSI_TABLE[kind][direction]
    for lab, (qe, p0) in table.items():
        i = sq.edges[relabel[lab]]
        images[i] = ((X[e] ** p0) * X[i]).scale(qpow(qe))
    return FlipMap(T, T2, e, kind, images, direction)


def compose_is_identity(T, e):
    """
    Check that flipping back undoes the quantum flip on every generator:
    the flip from the flipped triangulation, followed by the flip from ``T``,
    sends each ``X_i`` to itself.
    """
    fwd = phi_flip(T, e)          # generators of T' -> fractions over T
    T2 = fwd.target
    back = phi_flip(T2, e)        # generators of flip(T') -> fractions over T'
    T3 = back.target
    sigma = T.poisson_matrix()
    # flip(flip(T)) equals T with the two triangles of the square swapped
    if not T.isomorphic_to(T3):
        return False
    results = []
    for i in range(T.n):
        img = fwd.apply(back.images[i])
        want = QRational.from_qtorus(QTorusElement.generator(sigma, i), e)
        results.append(img == want)
    return all(results)


# compatibility with pinching

class InducedMapError(FlipError):
    pass


@dataclass
class InducedMapReport:
    """
    Outcome of comparing a flip with the pinching maps.

    ``case`` is 1 (the curve does not cross the square vertically or
    horizontally), 2 (vertical crossing) or 3 (horizontal crossing).
    ``reversed`` is set when case 1 was checked from the flipped side, because
    only there the curve avoids the diagonal.  ``verdicts[i]`` tells whether
    the two sides agree on generator ``i`` of the flipped cut triangulation.
    """
    case: int
    reversed: bool
    verdicts: list
    lhs: list
    rhs: list

    @property
    def ok(self):
        return all(self.verdicts)


def _class_matching(cut1, cut2, e):
    """
    Match edges of two cut triangulations whose sources differ by a flip at
    ``e``: classes sharing a segment of an edge other than ``e`` correspond,
    and the classes made only of pieces of ``e`` correspond to each other.
    Returns ``perm`` with class ``i`` of ``cut2`` equal to class ``perm[i]``
    of ``cut1``.
    """
    n = cut1.K.shape[0]
    perm = [None] * n
    for seg, c2 in cut2.segment_class.items():
        if seg[0] == e:
            continue
        c1 = cut1.segment_class.get(seg)
        if c1 is None:
            raise InducedMapError("segment %r missing after the flip" % (seg,))
        if perm[c2] is None:
            perm[c2] = c1
        elif perm[c2] != c1:
            raise InducedMapError("segments of one edge split between classes")
    free2 = [i for i in range(n) if perm[i] is None]
    free1 = sorted(set(range(n)) - set(p for p in perm if p is not None))
    if len(free2) != len(free1) or len(free2) > 1:
        raise InducedMapError("cannot match the classes around the diagonal")
    for a, b in zip(free2, free1):
        perm[a] = b
    if sorted(perm) != list(range(n)):
        raise InducedMapError("class matching is not a bijection")
    return perm


def check_inducedmap(T, curve, e):
    """
    Compare the flip at ``e`` with the pinching maps along ``curve``.

    Case 1: ``Phi o Theta' = Theta o Phi_gamma`` where ``Phi_gamma`` flips the
    cut triangulation at the edge formed by a single segment of the diagonal.  Cases 2 and 3:
    ``Psi o Theta' = Theta`` with the vertical/horizontal monomial limit.
    All comparisons are exact, generator by generator.
    """
    from .pinch import apply_theta, cut_along, theta
    from .surface import square_strands, transport_curve

    st = square_strands(T, curve, e)
    if st.vertical and st.horizontal:
        raise InducedMapError("curve crosses the square both vertically and horizontally")
    T2 = flip(T, e)[0]
    curve2 = transport_curve(T, curve, e, T2)
    D, D2 = cut_along(T, curve), cut_along(T2, curve2)
    th, th2 = theta(D), theta(D2)
    sigma = T.poisson_matrix()
    tau2 = D2.surface.poisson_matrix()
    perm = _class_matching(D.cut, D2.cut, e)
    n = D.surface.n

    if st.vertical or st.horizontal:
        direction = "vertical" if st.vertical else "horizontal"
        relabel = [perm.index(i) for i in range(n)]
        if not D.surface.isomorphic_to(D2.surface, relabel):
            raise InducedMapError("cut triangulations differ across a crossed flip")
        psi = psi_flip(T, e, direction)
        lhs, rhs, verdicts = [], [], []
        for i in range(n):
            a = psi.apply(apply_theta(th2, QTorusElement.generator(tau2, i)))
            b = apply_theta(th, QTorusElement.generator(D.surface.poisson_matrix(), perm[i]))
            lhs.append(a)
            rhs.append(b)
            verdicts.append(a == b)
        return InducedMapReport(2 if st.vertical else 3, False, verdicts, lhs, rhs)

    # the cut flip happens at the edge of the cut surface made of a single
    # segment of the diagonal; corner strands may cut other pieces off it
    mu0 = diagonal_class(D, e)
    if mu0 is None:
        if diagonal_class(D2, e) is None:
            raise InducedMapError("no segment of either diagonal is an edge of the cut surface")
        rep = check_inducedmap(T2, curve2, e)
        rep.reversed = True
        return rep

    phi_cut = phi_flip(D.surface, mu0)
    relabel = [perm.index(i) for i in range(n)]
    if not phi_cut.target.isomorphic_to(D2.surface, relabel):
        raise InducedMapError("flipped cut triangulation does not match the cut flip")
    phi = phi_flip(T, e)
    lhs, rhs, verdicts = [], [], []
    for i in range(n):
        a = phi.apply(apply_theta(th2, QTorusElement.generator(tau2, i)))
        b = _theta_rational(th, phi_cut.images[perm[i]], e, sigma)
        lhs.append(a)
        rhs.append(b)
        verdicts.append(a == b)
    return InducedMapReport(1, False, verdicts, lhs, rhs)


def diagonal_class(data, e):
    """
    Edge of the cut surface consisting of exactly one segment of edge ``e``
    of the source, or ``None`` if every segment of ``e`` is merged with others.
    """
    unit = np.eye(data.K.shape[1], dtype=int)[e]
    rows = [i for i in range(data.K.shape[0]) if np.array_equal(data.K[i], unit)]
    return rows[0] if len(rows) == 1 else None


def _theta_rational(th, elem, e, sigma):
    """Push a pivot-rational element of the cut algebra through the pinching map."""
    from .pinch import apply_theta
    tau = th.source_sigma
    K = th.data.K
    mu0 = elem.pivot
    if not (K[mu0] == np.eye(len(K[mu0]), dtype=int)[e]).all():
        raise InducedMapError("pivot edge of the cut surface is not the diagonal")
    out = QRational(sigma, e)
    for m, f in elem.terms.items():
        mono = apply_theta(th, weyl_monomial(tau, m))
        out = out + QRational.scalar(sigma, e, f) * QRational.from_qtorus(mono, e)
    return out
