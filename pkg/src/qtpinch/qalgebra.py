"""
Exact arithmetic in the Chekhov-Fock quantum torus.

Elements are finite sums of Weyl-ordered monomials ``X_k`` with coefficients in
``Z[q, q^-1]``.  The product rule is ``X_k X_l = q^{sigma(k, l)} X_{k+l}`` with
``sigma(k, l) = k^T sigma l``, so that ``X_i X_j = q^{2 sigma_ij} X_j X_i``.
"""

import numpy as np


class AlgebraError(ValueError):
    pass


class DimensionMismatch(AlgebraError):
    pass


class NotProportional(AlgebraError):
    """The two elements do not q-commute."""


class LaurentQ:
    """
    Laurent polynomial in a formal variable ``q`` with integer coefficients.

    Stored as a map exponent -> coefficient without zero entries.
    """

    __slots__ = ("_c",)

    def __init__(self, coeffs=None):
        c = {}
        if coeffs is None:
            pass
        elif isinstance(coeffs, LaurentQ):
            c = dict(coeffs._c)
        elif isinstance(coeffs, dict):
            for e, v in coeffs.items():
                v = int(v)
                if v:
                    c[int(e)] = c.get(int(e), 0) + v
            c = {e: v for e, v in c.items() if v}
        else:
            for e, v in coeffs:
                c[int(e)] = c.get(int(e), 0) + int(v)
            c = {e: v for e, v in c.items() if v}
        self._c = c

    @classmethod
    def monomial(cls, exponent=0, coeff=1):
        return cls({exponent: coeff})

    @classmethod
    def coerce(cls, x):
        if isinstance(x, LaurentQ):
            return x
        if isinstance(x, (int, np.integer)):
            return cls({0: int(x)})
        raise TypeError("cannot coerce %r to LaurentQ" % (x,))

    def items(self):
        return sorted(self._c.items())

    def is_zero(self):
        return not self._c

    def is_monomial(self):
        return len(self._c) == 1

    def min_exponent(self):
        return min(self._c)

    def max_exponent(self):
        return max(self._c)

    def __add__(self, other):
        other = LaurentQ.coerce(other)
        c = dict(self._c)
        for e, v in other._c.items():
            c[e] = c.get(e, 0) + v
        out = LaurentQ()
        out._c = {e: v for e, v in c.items() if v}
        return out

    __radd__ = __add__

    def __neg__(self):
        out = LaurentQ()
        out._c = {e: -v for e, v in self._c.items()}
        return out

    def __sub__(self, other):
        return self + (-LaurentQ.coerce(other))

    def __rsub__(self, other):
        return LaurentQ.coerce(other) - self

    def __mul__(self, other):
        if not isinstance(other, LaurentQ):
            try:
                other = LaurentQ.coerce(other)
            except TypeError:
                return NotImplemented
        c = {}
        for e1, v1 in self._c.items():
            for e2, v2 in other._c.items():
                c[e1 + e2] = c.get(e1 + e2, 0) + v1 * v2
        out = LaurentQ()
        out._c = {e: v for e, v in c.items() if v}
        return out

    __rmul__ = __mul__

    def shift(self, k):
        """Multiply by ``q^k``."""
        out = LaurentQ()
        out._c = {e + k: v for e, v in self._c.items()}
        return out

    def substitute_power(self, m):
        """Replace ``q`` by ``q^m``."""
        out = LaurentQ()
        out._c = {e * m: v for e, v in self._c.items()}
        return out

    def reduce_mod(self, N):
        """Reduce modulo ``q^N - 1`` (exponents taken in ``0..N-1``)."""
        return LaurentQ([(e % N, v) for e, v in self._c.items()]) if N else self

    def evaluate(self, q):
        return sum(v * q ** e for e, v in self._c.items()) if self._c else 0 * q

    def to_pairs(self):
        return [[int(e), int(v)] for e, v in self.items()]

    @classmethod
    def from_pairs(cls, pairs):
        return cls([(e, v) for e, v in pairs])

    def __eq__(self, other):
        if isinstance(other, (int, np.integer)):
            other = LaurentQ.coerce(other)
        return isinstance(other, LaurentQ) and self._c == other._c

    def __hash__(self):
        return hash(tuple(self.items()))

    def __repr__(self):
        if not self._c:
            return "0"
        parts = []
        for e, v in self.items():
            if e == 0:
                parts.append("%d" % v)
            else:
                parts.append("%s*q^%d" % (v, e) if v != 1 else "q^%d" % e)
        return " + ".join(parts)


ONE = LaurentQ.monomial(0)


def qpow(k):
    return LaurentQ.monomial(k)


def _as_matrix(sigma):
    s = np.asarray(sigma, dtype=np.int64)
    if s.ndim != 2 or s.shape[0] != s.shape[1]:
        raise DimensionMismatch("sigma must be square")
    return s


def sigma_pairing(sigma, k, l):
    """The integer ``k^T sigma l``."""
    s = _as_matrix(sigma)
    k = np.asarray(k, dtype=np.int64)
    l = np.asarray(l, dtype=np.int64)
    if k.shape != (s.shape[0],) or l.shape != (s.shape[0],):
        raise DimensionMismatch("exponent vectors must have length %d" % s.shape[0])
    return int(k @ s @ l)


def weyl_prefactor(sigma, k):
    """The exponent ``-sum_{i<j} k_i k_j sigma_ij`` relating ``X_k`` to the ordered product."""
    s = _as_matrix(sigma)
    k = np.asarray(k, dtype=np.int64)
    return -int(np.sum(np.triu(np.outer(k, k) * s, 1)))


class QTorusElement:
    """
    Finite sum ``sum_k c_k X_k`` in the Weyl basis.

    ``sigma`` is the ambient antisymmetric integer matrix; ``terms`` maps
    exponent tuples to ``LaurentQ`` coefficients.
    """

    __slots__ = ("sigma", "terms", "_key")

    def __init__(self, sigma, terms=None):
        self.sigma = _as_matrix(sigma)
        self._key = self.sigma.tobytes()
        n = self.sigma.shape[0]
        t = {}
        if terms:
            for k, c in terms.items():
                k = tuple(int(x) for x in k)
                if len(k) != n:
                    raise DimensionMismatch("exponent of length %d, expected %d" % (len(k), n))
                c = LaurentQ.coerce(c)
                if k in t:
                    c = t[k] + c
                if c.is_zero():
                    t.pop(k, None)
                else:
                    t[k] = c
        self.terms = t

    @property
    def n(self):
        return self.sigma.shape[0]

    @classmethod
    def one(cls, sigma):
        n = _as_matrix(sigma).shape[0]
        return cls(sigma, {(0,) * n: ONE})

    @classmethod
    def zero(cls, sigma):
        return cls(sigma, {})

    @classmethod
    def generator(cls, sigma, i, power=1):
        n = _as_matrix(sigma).shape[0]
        k = [0] * n
        k[i] = power
        return cls(sigma, {tuple(k): ONE})

    def _check(self, other):
        if not isinstance(other, QTorusElement):
            raise TypeError("expected a QTorusElement")
        if self._key != other._key or self.sigma.shape != other.sigma.shape:
            raise DimensionMismatch("elements live in different algebras")

    def __add__(self, other):
        if isinstance(other, (int, LaurentQ)):
            other = QTorusElement.one(self.sigma).scale(other)
        self._check(other)
        t = dict(self.terms)
        for k, c in other.terms.items():
            t[k] = t[k] + c if k in t else c
        return QTorusElement(self.sigma, {k: c for k, c in t.items() if not c.is_zero()})

    __radd__ = __add__

    def __neg__(self):
        return QTorusElement(self.sigma, {k: -c for k, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def scale(self, c):
        c = LaurentQ.coerce(c)
        return QTorusElement(self.sigma, {k: v * c for k, v in self.terms.items()})

    def __mul__(self, other):
        if isinstance(other, (int, np.integer, LaurentQ)):
            return self.scale(other)
        self._check(other)
        s = self.sigma
        out = {}
        for k, a in self.terms.items():
            kv = np.array(k, dtype=np.int64)
            ks = kv @ s
            for l, b in other.terms.items():
                lv = np.array(l, dtype=np.int64)
                e = int(ks @ lv)
                key = tuple(int(x) for x in kv + lv)
                c = (a * b).shift(e)
                out[key] = out[key] + c if key in out else c
        return QTorusElement(s, {k: c for k, c in out.items() if not c.is_zero()})

    def __rmul__(self, other):
        if isinstance(other, (int, np.integer, LaurentQ)):
            return self.scale(other)
        return NotImplemented

    def __pow__(self, m):
        m = int(m)
        if m < 0:
            return self.inverse() ** (-m)
        out = QTorusElement.one(self.sigma)
        base = self
        while m:
            if m & 1:
                out = out * base
            base = base * base
            m >>= 1
        return out

    def is_monomial(self):
        return len(self.terms) == 1

    def monomial(self):
        """``(exponent, coefficient)`` of a single-term element."""
        if len(self.terms) != 1:
            raise NotProportional("element is not a single monomial")
        (k, c), = self.terms.items()
        return k, c

    def inverse(self):
        k, c = self.monomial()
        if not c.is_monomial():
            raise AlgebraError("only monomials with unit coefficient are invertible")
        (e, v), = c.items()
        if v not in (1, -1):
            raise AlgebraError("only monomials with unit coefficient are invertible")
        return QTorusElement(self.sigma, {tuple(-x for x in k): LaurentQ.monomial(-e, v)})

    def reduce_mod(self, N):
        return QTorusElement(self.sigma, {k: c.reduce_mod(N) for k, c in self.terms.items()})

    def is_zero(self):
        return not self.terms

    def __eq__(self, other):
        if not isinstance(other, QTorusElement):
            return NotImplemented
        return self._key == other._key and self.terms == other.terms

    def __hash__(self):
        return hash((self._key, tuple(sorted((k, hash(c)) for k, c in self.terms.items()))))

    def to_list(self):
        """Serializable form: ``[[exponent vector, [[power, coeff], ...]], ...]``."""
        return [[list(k), c.to_pairs()] for k, c in sorted(self.terms.items())]

    @classmethod
    def from_list(cls, sigma, data):
        return cls(sigma, {tuple(k): LaurentQ.from_pairs(c) for k, c in data})

    def __repr__(self):
        if not self.terms:
            return "0"
        return " + ".join("(%r)*X%s" % (c, list(k)) for k, c in sorted(self.terms.items()))


def weyl_monomial(sigma, k):
    """The Weyl-ordered monomial ``X_k``."""
    return QTorusElement(sigma, {tuple(int(x) for x in k): ONE})


def multiply(A, B):
    return A * B


def ordered_product(sigma, k):
    """
    The ordered product ``X_1^{k_1} ... X_n^{k_n}``, built by multiplying
    generators one at a time.
    """
    s = _as_matrix(sigma)
    out = QTorusElement.one(s)
    for i, ki in enumerate(k):
        if ki:
            out = out * QTorusElement.generator(s, i) ** int(ki)
    return out


def commutation_exponent(A, B):
    """
    The integer ``alpha`` with ``A B = q^{2 alpha} B A``.

    Raises ``NotProportional`` when no such relation holds.
    """
    A._check(B)
    AB, BA = A * B, B * A
    if AB.is_zero() and BA.is_zero():
        raise NotProportional("zero product")
    if set(AB.terms) != set(BA.terms):
        raise NotProportional("elements do not q-commute")
    alpha = None
    for k, c in AB.terms.items():
        d = BA.terms[k]
        diff = c.min_exponent() - d.min_exponent()
        found = diff // 2 if diff % 2 == 0 and d.shift(diff) == c else None
        if found is None or (alpha is not None and found != alpha):
            raise NotProportional("elements do not q-commute")
        alpha = found
    return alpha


def puncture_element(T, j):
    """``P_j``: the Weyl monomial of the puncture vector of puncture ``j``."""
    return weyl_monomial(T.poisson_matrix(), T.puncture_vectors()[j])


def graph_length_element(T, crossings):
    """``X_gamma``: the Weyl monomial of a crossing vector."""
    if hasattr(crossings, "crossings"):
        crossings = crossings.crossings
    return weyl_monomial(T.poisson_matrix(), crossings)


def h_element(T):
    """``H = X_(1,...,1)``."""
    return weyl_monomial(T.poisson_matrix(), [1] * T.n)


def apply_monomial_map(images, sigma_source, k):
    """
    Image of the Weyl monomial ``X_k`` of the source algebra under the algebra
    map sending generator ``i`` to ``images[i]``.

    The image is computed by expanding ``X_k`` as ``q^c`` times the ordered
    product of generator powers, then multiplying the images in order.
    """
    s = _as_matrix(sigma_source)
    k = [int(x) for x in k]
    if len(k) != s.shape[0] or len(images) != s.shape[0]:
        raise DimensionMismatch("source exponent and images have different lengths")
    out = None
    for i, ki in enumerate(k):
        if ki:
            term = images[i] ** ki
            out = term if out is None else out * term
    if out is None:
        return QTorusElement.one(images[0].sigma)
    return out.scale(qpow(weyl_prefactor(s, k)))
