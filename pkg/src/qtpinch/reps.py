"""
Irreducible representations of the Chekhov-Fock algebra at an odd root of unity.

The lattice ``Z^n`` with the form ``sigma`` is brought to skew normal form
``U sigma U^T = diag([[0, d_k], [-d_k, 0]], 0)``.  Each hyperbolic pair acts on
its own copy of ``C^N`` by clock and shift matrices, radical directions act by
scalars, and the generators are recovered through ``U^-1``.  Magnitudes are the
positive real ``N``-th roots of the shear parameters and the remaining phases
are fixed by the puncture weights.
"""

import json
from dataclasses import dataclass, field
from math import gcd

import numpy as np
from scipy import sparse

from .qalgebra import DimensionMismatch, QTorusElement, weyl_prefactor, puncture_element


class RepresentationError(ValueError):
    pass


class DivisorNotCoprime(RepresentationError):
    """A skew divisor shares a factor with N; clock/shift cannot realize it."""


class WeightsUnreachable(RepresentationError):
    """The puncture weights cannot be reached by phases q^e_i."""


class CharacterInconsistent(RepresentationError):
    """Shear parameters do not satisfy the puncture monomial condition."""


class TooLarge(RepresentationError):
    """Representation too large for the dense commutant computation."""


class NonPositivePath(RepresentationError):
    """A shear path left the positive orthant."""


class InvalidRoot(RepresentationError):
    """N must be odd and at least 3, and a coprime to N."""


@dataclass(frozen=True)
class RootOfUnity:
    N: int
    a: int = 1

    def __post_init__(self):
        if self.N < 3 or self.N % 2 == 0:
            raise InvalidRoot("N must be odd and >= 3, got %d" % self.N)
        if gcd(self.a, self.N) != 1:
            raise InvalidRoot("a=%d is not coprime to N=%d" % (self.a, self.N))

    @property
    def value(self):
        return np.exp(2j * np.pi * self.a / self.N)

    def power(self, k):
        """``q^k`` computed from the reduced exponent."""
        return np.exp(2j * np.pi * ((self.a * int(k)) % self.N) / self.N)

    def log(self, z):
        """Integer ``k`` mod N with ``q^k`` closest to the unit complex ``z``."""
        m = int(np.round(np.angle(z) * self.N / (2 * np.pi))) % self.N
        return (m * pow(self.a, -1, self.N)) % self.N


# integer linear algebra

@dataclass
class SkewNormalForm:
    """``U sigma U^T = blocks``: ``divisors[k]`` sits at rows ``2k, 2k+1``."""
    U: np.ndarray
    divisors: tuple
    blocks: np.ndarray

    @property
    def rank(self):
        return 2 * len(self.divisors)

    @property
    def radical(self):
        """Rows of ``U`` spanning the kernel of ``sigma``."""
        return self.U[self.rank:]


def skew_normal_form(sigma):
    """Unimodular congruence bringing an integer antisymmetric matrix to block form."""
    A = np.array(sigma, dtype=object)
    n = A.shape[0]
    if A.shape != (n, n) or (A + A.T != 0).any():
        raise ValueError("sigma must be square and antisymmetric")
    U = np.eye(n, dtype=object)

    def swap(i, j):
        if i != j:
            A[[i, j]] = A[[j, i]]
            A[:, [i, j]] = A[:, [j, i]]
            U[[i, j]] = U[[j, i]]

    def add(src, dst, c):
        # index dst += c * index src, applied as a congruence
        if c:
            A[dst] += c * A[src]
            A[:, dst] += c * A[:, src]
            U[dst] += c * U[src]

    def negate(i):
        A[i] *= -1
        A[:, i] *= -1
        U[i] *= -1

    divisors = []
    k = 0
    while k < n - 1:
        nz = [(abs(int(A[i, j])), i, j) for i in range(k, n) for j in range(k, n)
              if A[i, j] != 0]
        if not nz:
            break
        _, i, j = min(nz)
        swap(k, i)
        if j == k:
            j = i
        swap(k + 1, j)
        if A[k, k + 1] < 0:
            negate(k + 1)
        while True:
            d = int(A[k, k + 1])
            for m in range(k + 2, n):
                add(k + 1, m, -(int(A[k, m]) // d))
                add(k, m, int(A[k + 1, m]) // d)
            rest = [m for m in range(k + 2, n) if A[k, m] != 0 or A[k + 1, m] != 0]
            if not rest:
                break
            m = rest[0]
            if A[k, m] == 0:
                # bring the remainder into row k
                swap(k, k + 1)
                negate(k + 1)
            swap(k + 1, m)
            if A[k, k + 1] < 0:
                negate(k + 1)
        divisors.append(int(A[k, k + 1]))
        k += 2
    U = np.array(U, dtype=np.int64)
    blocks = U @ np.asarray(sigma, dtype=np.int64) @ U.T
    return SkewNormalForm(U, tuple(divisors), blocks)


def _column_hnf_contains(M, b):
    """Whether the integer vector ``b`` lies in the column lattice of ``M``."""
    A = [list(map(int, row)) for row in np.asarray(M, dtype=object)]
    rows = len(A)
    cols = len(A[0]) if rows else 0
    b = list(map(int, b))
    piv_col = 0
    for r in range(rows):
        if piv_col >= cols:
            break
        # gcd-reduce row r over columns piv_col..end
        while True:
            nz = [c for c in range(piv_col, cols) if A[r][c] != 0]
            if len(nz) <= 1:
                break
            c0 = min(nz, key=lambda c: abs(A[r][c]))
            for c in nz:
                if c != c0:
                    f = A[r][c] // A[r][c0]
                    for rr in range(rows):
                        A[rr][c] -= f * A[rr][c0]
        nz = [c for c in range(piv_col, cols) if A[r][c] != 0]
        if not nz:
            if b[r] != 0:
                return False
            continue
        c0 = nz[0]
        for rr in range(rows):
            A[rr][piv_col], A[rr][c0] = A[rr][c0], A[rr][piv_col]
        if b[r] % A[r][piv_col] != 0:
            return False
        f = b[r] // A[r][piv_col]
        for rr in range(rows):
            b[rr] -= f * A[rr][piv_col]
        piv_col += 1
    return all(v == 0 for v in b)


def solve_mod(A, b, N):
    """
    Lexicographically smallest ``e`` in ``{0..N-1}^n`` with ``A e = b (mod N)``,
    or ``None``.  Entries are fixed one at a time, keeping the rest solvable.
    """
    A = np.asarray(A, dtype=np.int64)
    b = np.asarray(b, dtype=np.int64)
    m, n = A.shape

    def solvable(cols, rhs):
        M = np.hstack([A[:, cols], N * np.eye(m, dtype=np.int64)]) if cols else N * np.eye(m, dtype=np.int64)
        return _column_hnf_contains(M, rhs)

    if not solvable(list(range(n)), b):
        return None
    e = []
    rhs = b.copy()
    for i in range(n):
        for v in range(N):
            r2 = rhs - v * A[:, i]
            if solvable(list(range(i + 1, n)), r2):
                e.append(v)
                rhs = r2
                break
        else:
            return None
    return np.array(e, dtype=np.int64)


# representations

@dataclass
class Representation:
    sigma: np.ndarray
    root: RootOfUnity
    x: np.ndarray
    p: tuple
    matrices: list
    phases: np.ndarray = None
    unimodular: np.ndarray = None
    punctures: np.ndarray = None
    _inv: dict = field(default_factory=dict, repr=False)

    @property
    def dim(self):
        return self.matrices[0].shape[0]

    @property
    def n(self):
        return len(self.matrices)

    def inverse(self, i):
        if i not in self._inv:
            self._inv[i] = np.linalg.inv(self.matrices[i])
        return self._inv[i]

    def monomial(self, k):
        """``rho(X_k)`` via the Weyl prefactor and the ordered product."""
        d = self.dim
        out = np.eye(d, dtype=complex)
        for i, ki in enumerate(k):
            ki = int(ki)
            if ki > 0:
                out = out @ np.linalg.matrix_power(self.matrices[i], ki)
            elif ki < 0:
                out = out @ np.linalg.matrix_power(self.inverse(i), -ki)
        return self.root.power(weyl_prefactor(self.sigma, k)) * out

    def residuals(self):
        """Relative residuals of the relations, N-th powers and puncture values."""
        q = self.root
        rel = 0.0
        for i in range(self.n):
            for j in range(i + 1, self.n):
                A, B = self.matrices[i], self.matrices[j]
                r = np.linalg.norm(A @ B - q.power(2 * int(self.sigma[i, j])) * B @ A)
                rel = max(rel, r / (np.linalg.norm(A) * np.linalg.norm(B)))
        power = 0.0
        I = np.eye(self.dim)
        for i, A in enumerate(self.matrices):
            P = np.linalg.matrix_power(A, q.N)
            power = max(power, np.linalg.norm(P - self.x[i] * I) / (self.x[i] * np.sqrt(self.dim)))
        central = 0.0
        if self.punctures is not None:
            for j, pv in enumerate(self.punctures):
                M = self.monomial(pv)
                central = max(central, np.linalg.norm(M - q.power(self.p[j]) * I) / np.sqrt(self.dim))
        return {"relations": rel, "powers": power, "punctures": central}

    def to_text(self):
        """Generators as row-major text with 17 significant digits."""
        lines = []
        for i, A in enumerate(self.matrices):
            lines.append("# generator %d" % i)
            for row in A:
                lines.append(" ".join("%.17g%+.17gj" % (z.real, z.imag) for z in row))
        return "\n".join(lines) + "\n"

    def manifest(self):
        return {
            "N": self.root.N, "a": self.root.a, "x": [float(v) for v in self.x],
            "p": [int(v) for v in self.p], "d": self.dim,
            "phases": None if self.phases is None else [int(v) for v in self.phases],
            "residuals": self.residuals(),
        }

    def dump(self, path):
        with open(path, "w") as fh:
            fh.write(self.to_text())
        with open(str(path) + ".json", "w") as fh:
            json.dump(self.manifest(), fh, indent=2, sort_keys=True)


def _clock(N, step, root):
    return np.diag([root.power(step * j) for j in range(N)])


def _shift(N):
    return np.roll(np.eye(N, dtype=complex), 1, axis=0)


def _kron_factor(mats_per_pair, r, N):
    """Tensor product over the ``r`` factors, identity where nothing is given."""
    out = np.ones((1, 1), dtype=complex)
    for k in range(r):
        out = np.kron(out, mats_per_pair.get(k, np.eye(N, dtype=complex)))
    return out


def puncture_monomial_defect(T, x):
    """``max_j |log prod_i x_i^{p_ji}|``: zero for complete metrics."""
    P = T.puncture_vectors()
    return float(np.max(np.abs(P @ np.log(np.asarray(x, dtype=float))))) if len(P) else 0.0


def build_irrep(T, root, x, p, edge_order=None, tol=1e-10):
    """
    Irreducible representation with ``rho(X_i)^N = x_i`` and
    ``rho(P_j) = q^{p_j}``.  ``edge_order`` permutes the edges before the
    normal form, giving a different but isomorphic construction.
    """
    if not isinstance(root, RootOfUnity):
        root = RootOfUnity(*root) if isinstance(root, tuple) else RootOfUnity(int(root))
    N = root.N
    sigma = T.poisson_matrix()
    n = T.n
    x = np.asarray(x, dtype=float)
    if x.shape != (n,):
        raise DimensionMismatch("need %d shear parameters" % n)
    if np.any(~(x > 0)):
        raise CharacterInconsistent("shear parameters must be positive")
    P = T.puncture_vectors()
    p = tuple(int(v) % N for v in p)
    if len(p) != len(P):
        raise DimensionMismatch("need %d puncture weights" % len(P))
    if puncture_monomial_defect(T, x) > tol:
        raise CharacterInconsistent("puncture monomials differ from 1")

    order = list(range(n)) if edge_order is None else [int(i) for i in edge_order]
    if sorted(order) != list(range(n)):
        raise ValueError("edge_order must be a permutation")
    Pm = np.eye(n, dtype=np.int64)[order]
    snf = skew_normal_form(Pm @ sigma @ Pm.T)
    U = snf.U @ Pm
    for dk in snf.divisors:
        if gcd(dk, N) != 1:
            raise DivisorNotCoprime("divisor %d shares a factor with N=%d" % (dk, N))
    r = len(snf.divisors)
    dim = N ** r
    # images of the basis monomials W_a = X_{u_a}
    W = []
    for k, dk in enumerate(snf.divisors):
        W.append(_kron_factor({k: _clock(N, 2 * dk, root)}, r, N))
        W.append(_kron_factor({k: _shift(N)}, r, N))
    I = np.eye(dim, dtype=complex)
    W += [I] * (n - 2 * r)
    form = U @ sigma @ U.T
    Uinv = np.rint(np.linalg.inv(U)).astype(np.int64)
    if not (Uinv @ U == np.eye(n, dtype=np.int64)).all():
        raise RepresentationError("normal form transform is not unimodular")

    def w_power(a, m):
        if m >= 0:
            return np.linalg.matrix_power(W[a], m)
        return np.linalg.matrix_power(W[a].conj().T, -m)   # clock/shift are unitary

    base = []
    for i in range(n):
        v = Uinv[i]
        M = I.copy()
        for a in range(n):
            if v[a]:
                M = M @ w_power(a, int(v[a]))
        base.append(root.power(weyl_prefactor(form, v)) * M)

    # phases from the puncture weights
    rep0 = Representation(sigma, root, np.ones(n), p, base)
    b = []
    for pv in P:
        val = rep0.monomial(pv)[0, 0]
        b.append(root.log(val))
    target = (np.array(p, dtype=np.int64) - np.array(b, dtype=np.int64)) % N
    e = solve_mod(P, target, N) if len(P) else np.zeros(n, dtype=np.int64)
    if e is None:
        raise WeightsUnreachable("puncture weights %r cannot be reached" % (p,))
    mats = [x[i] ** (1.0 / N) * root.power(int(e[i])) * base[i] for i in range(n)]
    return Representation(sigma, root, x, p, mats, e, U, P)


def evaluate(elem, rep):
    """Matrix of an exact algebra element in a representation."""
    if not np.array_equal(elem.sigma, rep.sigma):
        raise DimensionMismatch("element and representation live on different algebras")
    out = np.zeros((rep.dim, rep.dim), dtype=complex)
    q = rep.root.value
    for k, c in elem.terms.items():
        out = out + c.evaluate(q) * rep.monomial(k)
    return out


def direct_sum(*reps):
    """Block-diagonal sum (used to exhibit reducible representations)."""
    from scipy.linalg import block_diag
    first = reps[0]
    mats = [block_diag(*[r.matrices[i] for r in reps]) for i in range(first.n)]
    return Representation(first.sigma, first.root, first.x, first.p, mats,
                          punctures=first.punctures)


# commutants and intertwiners

def _generic_hermitian(mats, scales, rng):
    d = mats[0].shape[0]
    B = np.zeros((d, d), dtype=complex)
    coeffs = []
    normed = [M / s for M, s in zip(mats, scales)]
    for M in normed:
        c = rng.normal() + 1j * rng.normal()
        coeffs.append(c)
        B += c * M
    for i in range(len(normed)):
        for j in range(i + 1, len(normed)):
            c = rng.normal() + 1j * rng.normal()
            coeffs.append(c)
            B += c * normed[i] @ normed[j]
    return B + B.conj().T, normed


def _clusters(vals, tol):
    groups = []
    start = 0
    for i in range(1, len(vals) + 1):
        if i == len(vals) or vals[i] - vals[i - 1] > tol:
            groups.append(list(range(start, i)))
            start = i
    return groups


def intertwiner_dimension(rep1, rep2, seed=0, tol=1e-8, max_dim=2000):
    """
    Dimension of ``{M : M rho1(X_i) = rho2(X_i) M for all i}``.

    The generators are normal, so any intertwiner also intertwines their
    adjoints and hence a generic Hermitian element ``B`` built from them.  The
    unknown is therefore block-sparse in eigenbases of ``B``; the remaining
    linear conditions are stacked and their nullity read off a Gram matrix.
    """
    d = rep1.dim
    if d != rep2.dim:
        return 0
    if d > max_dim:
        raise TooLarge("dimension %d exceeds %d" % (d, max_dim))
    rng = np.random.default_rng(seed)
    state = rng.bit_generator.state
    # both sides share one scale per generator, so magnitudes are compared too
    scales = [max(np.linalg.norm(A, 2), np.linalg.norm(B, 2))
              for A, B in zip(rep1.matrices, rep2.matrices)]
    B1, n1 = _generic_hermitian(rep1.matrices, scales, rng)
    rng.bit_generator.state = state
    B2, n2 = _generic_hermitian(rep2.matrices, scales, rng)
    w1, V1 = np.linalg.eigh(B1)
    w2, V2 = np.linalg.eigh(B2)
    scale = max(1.0, np.max(np.abs(w1)))
    c1 = _clusters(w1, tol * scale * 10)
    c2 = _clusters(w2, tol * scale * 10)
    # pair clusters with matching eigenvalues
    unknowns = []
    for g1 in c1:
        lam = np.mean(w1[g1])
        for g2 in c2:
            if abs(np.mean(w2[g2]) - lam) < 1e3 * tol * scale and len(g1) == len(g2):
                unknowns += [(s, t) for s in g2 for t in g1]
    if not unknowns:
        return 0
    A1 = [V1.conj().T @ M @ V1 for M in n1]
    A2 = [V2.conj().T @ M @ V2 for M in n2]
    rows, cols, vals = [], [], []
    base = 0
    for X1, X2 in zip(A1, A2):
        # equation (r, c): sum_s X2[r, s] M[s, c] - sum_t M[r, t] X1[t, c] = 0
        for u, (s, t) in enumerate(unknowns):
            col = X2[:, s]
            nz = np.nonzero(np.abs(col) > 1e-14)[0]
            rows += list(base + nz * d + t)
            cols += [u] * len(nz)
            vals += list(col[nz])
            row = X1[t, :]
            nz = np.nonzero(np.abs(row) > 1e-14)[0]
            rows += list(base + s * d + nz)
            cols += [u] * len(nz)
            vals += list(-row[nz])
        base += d * d
    C = sparse.coo_matrix((vals, (rows, cols)), shape=(base, len(unknowns))).tocsr()
    G = (C.conj().T @ C).toarray()
    ev = np.linalg.eigvalsh(G)
    return int(np.sum(ev < 1e-9 * max(1.0, ev.max())))


def commutant_dimension(rep, seed=0, max_dim=2000):
    return intertwiner_dimension(rep, rep, seed=seed, max_dim=max_dim)


def irreducible(rep, seed=0, max_dim=2000):
    return commutant_dimension(rep, seed=seed, max_dim=max_dim) == 1


def commutant_dimension_dense(rep, max_dim=64):
    """Independent check through the Kronecker form of ``M A - A M = 0``."""
    d = rep.dim
    if d > max_dim:
        raise TooLarge("dense commutant limited to d <= %d" % max_dim)
    I = np.eye(d)
    blocks = [np.kron(I, M / np.linalg.norm(M)) - np.kron((M / np.linalg.norm(M)).T, I)
              for M in rep.matrices]
    S = np.vstack(blocks)
    sv = np.linalg.svd(S, compute_uv=False)
    return int(np.sum(sv < 1e-9 * max(1.0, sv.max()))) + max(0, d * d - len(sv))


def continuous_family(rep, path):
    """
    ``t -> rho_t`` with ``rho_t(X_i) = (x_i(t) / x_i)^{1/N} rho(X_i)``: the
    phase parts stay fixed and the magnitudes follow ``x(t)``.
    """
    N = rep.root.N

    def at(t):
        xt = np.asarray(path(t), dtype=float)
        if xt.shape != rep.x.shape or np.any(~(xt > 0)):
            raise NonPositivePath("path value at t=%r is not positive" % (t,))
        mats = [(xt[i] / rep.x[i]) ** (1.0 / N) * M for i, M in enumerate(rep.matrices)]
        return Representation(rep.sigma, rep.root, xt, rep.p, mats, rep.phases,
                              rep.unimodular, rep.punctures)
    return at


def center_is_scalar(rep, T, tol=1e-10):
    """``rho`` of ``X_i^N``, ``P_j`` and ``H`` are multiples of the identity."""
    from .qalgebra import h_element
    N = rep.root.N
    elems = [QTorusElement.generator(rep.sigma, i, N) for i in range(rep.n)]
    elems += [puncture_element(T, j) for j in range(T.s)]
    elems.append(h_element(T))
    worst = 0.0
    for z in elems:
        M = evaluate(z, rep)
        s = np.trace(M) / rep.dim
        worst = max(worst, np.linalg.norm(M - s * np.eye(rep.dim)) / max(abs(s), 1e-300))
    return worst < tol, worst
