"""
Numerical degeneration experiments: pinching families of shear coordinates,
holonomy lengths, spectral splitting of representations along a family, and
the limiting behaviour of flips.

Holonomy convention: a curve given by its dual path picks up
``D(x_e) = diag(x_e^{1/2}, x_e^{-1/2})`` when crossing edge ``e`` and
``L = [[1, 1], [0, 1]]`` (left turn) or ``R = [[1, 0], [1, 1]]`` (right turn)
inside each triangle.  The trace of the product is ``2 cosh(l/2)``.  A turn is
to the left when the curve leaves a triangle through side ``in + 2``.
"""

import itertools
from dataclasses import dataclass, field

import numpy as np

from .flips import _class_matching, diagonal_class, phi_flip, psi_flip
from .pinch import apply_theta, cut_along, theta
from .qalgebra import puncture_element
from .reps import RootOfUnity, Representation, build_irrep, continuous_family, evaluate
from .surface import flip, square, square_strands, transport_curve


class DegenerationError(ValueError):
    pass


class EllipticHolonomy(DegenerationError):
    """Holonomy trace below 2: the shear parameters do not give a hyperbolic curve."""


class NoPinchDirection(DegenerationError):
    """No direction keeps the cut coordinates and cusps fixed."""


class InconsistentTarget(DegenerationError):
    """The target coordinates on the cut surface cannot be reached."""


class SpectrumMismatch(DegenerationError):
    """Eigenvalues of the curve operator are not at c(t) q^i."""


class SingularDenominator(DegenerationError):
    """A flip denominator is numerically singular."""


class NoCrossing(DegenerationError):
    """The curve does not cross the flip square vertically or horizontally."""


# holonomy

_LEFT = np.array([[1.0, 1.0], [0.0, 1.0]])
_RIGHT = np.array([[1.0, 0.0], [1.0, 1.0]])


@dataclass(frozen=True)
class HolonomyLength:
    length: float
    trace: float


def holonomy_matrix(T, x, dual_path):
    x = np.asarray(x, dtype=float)
    H = np.eye(2)
    for t, a, b in dual_path:
        turn = _LEFT if b == (a + 2) % 3 else _RIGHT
        z = x[T.edge(t, b)]
        H = H @ turn @ np.diag([np.sqrt(z), 1.0 / np.sqrt(z)])
    return H


def holonomy_length(T, x, component):
    """Hyperbolic length of a curve component for positive shear parameters."""
    x = np.asarray(x, dtype=float)
    if np.any(~(x > 0)):
        raise DegenerationError("shear parameters must be positive")
    path = component.dual_path if hasattr(component, "dual_path") else component
    tr = float(np.trace(holonomy_matrix(T, x, path)))
    if tr < 2.0 - 1e-12:
        raise EllipticHolonomy("trace %.6g < 2" % tr)
    return HolonomyLength(2.0 * np.arccosh(max(tr, 2.0) / 2.0), tr)


def graph_length(crossings, x):
    """Classical exponential graph length ``prod x_i^{c_i}``."""
    return float(np.exp(np.asarray(crossings, dtype=float) @ np.log(np.asarray(x, dtype=float))))


# pinching families

@dataclass
class ShearPath:
    """
    ``log x(t) = xi + (1/t - 1) w + t eta`` for ``t`` in ``(0, 1]``.

    ``K xi = log y``, ``w`` lies in the kernel of ``K`` and of all puncture
    and crossing rows, and ``eta`` (optional, zero by default) keeps the cusps
    but moves the cut coordinates, so that they approach ``y`` at rate ``t``.
    """
    xi: np.ndarray
    w: np.ndarray
    eta: np.ndarray
    y: np.ndarray
    data: object = field(repr=False)

    def log_x(self, t):
        return self.xi + (1.0 / t - 1.0) * self.w + t * self.eta

    def x(self, t):
        return np.exp(self.log_x(t))

    def curve_lengths(self, t):
        T = self.data.source
        return [holonomy_length(T, self.x(t), c).length
                for c in self.data.curve.components]

    def graph_lengths(self, t):
        return [graph_length(c, self.x(t)) for c in self.data.crossings]


def _null_space(A, tol=1e-10):
    u, s, vt = np.linalg.svd(A)
    rank = int(np.sum(s > tol * max(1.0, s.max() if len(s) else 1.0)))
    return vt[rank:].T


def pinching_family(T, curve, y=None, t_min=2.0 ** -12, spread=20.0, approach=0.0,
                    seed=0, attempts=32):
    """
    Shear path on ``T`` whose lengths of the curve components tend to zero and
    whose cut coordinates tend to ``y``.

    ``spread`` bounds ``|log x|`` growth at ``t_min``; ``approach`` scales the
    optional term ``t eta`` (see ``ShearPath``).
    """
    data = cut_along(T, curve)
    n = T.n
    if y is None:
        y = np.ones(n)
    y = np.asarray(y, dtype=float)
    if y.shape != (n,) or np.any(~(y > 0)):
        raise InconsistentTarget("target must be %d positive numbers" % n)
    P = T.puncture_vectors().astype(float)
    Cm = np.array(data.crossings, dtype=float)
    A = np.vstack([data.K.astype(float), P, Cm])
    rhs = np.concatenate([np.log(y), np.zeros(len(P) + len(Cm))])
    xi, *_ = np.linalg.lstsq(A, rhs, rcond=None)
    if np.max(np.abs(A @ xi - rhs)) > 1e-9:
        raise InconsistentTarget("target is not cusped on the cut surface")
    ker = _null_space(A)
    if ker.shape[1] == 0:
        raise NoPinchDirection("kernel of K, puncture and crossing rows is trivial")
    eta = np.zeros(n)
    if approach:
        # keep cusps, move the curve's graph length and the cut coordinates
        Pk = _null_space(P) if len(P) else np.eye(n)
        v = Pk @ (Pk.T @ Cm.sum(axis=0))
        if np.linalg.norm(v) < 1e-12:
            raise NoPinchDirection("no cusp-preserving direction moves the curve")
        eta = approach * v / np.linalg.norm(v)
    rng = np.random.default_rng(seed)
    for attempt in range(attempts):
        coeff = np.ones(ker.shape[1]) if attempt == 0 else rng.normal(size=ker.shape[1])
        w = ker @ coeff
        w = w / np.max(np.abs(w)) * spread / (1.0 / t_min - 1.0)
        for sign in (1.0, -1.0):
            path = ShearPath(xi, sign * w, eta, y, data)
            l1 = path.curve_lengths(1.0)
            lh = path.curve_lengths(0.5)
            lm = path.curve_lengths(t_min)
            if all(b < a for a, b in zip(l1, lh)) and all(c < b for b, c in zip(lh, lm)):
                return path
    raise NoPinchDirection("no kernel direction shortens every component")


def length_decreases(path, ts):
    """Whether every component's length strictly decreases along ``ts`` (descending t)."""
    ls = np.array([path.curve_lengths(t) for t in ts])
    return bool(np.all(np.diff(ls, axis=0) < 0)), ls


# spectral decomposition

@dataclass
class Block:
    weights: tuple
    projector: np.ndarray
    basis: np.ndarray
    matrices: list            # compressions of rho_t(Theta(Y_j)), j on the cut surface
    rep: Representation = None


@dataclass
class Decomposition:
    t: float
    x: np.ndarray
    rep: Representation
    blocks: list
    projector_residual: float
    curve_scales: list        # c(t) per component
    permutations: list        # eigenvalue ordering reported per component


def _curve_projectors(E, c, root, tol):
    """Spectral projectors of ``E`` onto the eigenvalues ``c q^k``, k = 0..N-1."""
    N = root.N
    d = E.shape[0]
    ev = np.linalg.eigvals(E)
    labels = []
    for lam in ev:
        dist = [abs(lam / c - root.power(k)) for k in range(N)]
        k = int(np.argmin(dist))
        if dist[k] > tol:
            raise SpectrumMismatch("eigenvalue %r not within %g of c q^k" % (lam, tol))
        labels.append(k)
    counts = np.bincount(labels, minlength=N)
    if not np.all(counts == d // N) or d % N:
        raise SpectrumMismatch("unequal eigenspaces: %r" % counts.tolist())
    powers = [np.eye(d, dtype=complex)]
    for _ in range(N - 1):
        powers.append(powers[-1] @ E)
    projs = []
    for k in range(N):
        lam = c * root.power(k)
        Pk = sum(lam ** (-m) * powers[m] for m in range(N)) / N
        projs.append(Pk)
    return projs, labels


def decompose_at(data, rep_t, x_t, tol=1e-6):
    """
    Split ``rep_t`` along the curve operators ``rho_t(X_gamma_i)`` and compress
    the pinched generators ``rho_t(Theta(Y_j))`` to each joint eigenspace.
    """
    root = rep_t.root
    N = root.N
    d = rep_t.dim
    per_curve, scales, perms = [], [], []
    for c in data.crossings:
        E = rep_t.monomial(c)
        ct = graph_length(c, x_t) ** (1.0 / N)
        projs, labels = _curve_projectors(E, ct, root, tol)
        per_curve.append(projs)
        scales.append(ct)
        perms.append(labels)
    gens = [rep_t.monomial(row) for row in data.K]
    tau = data.surface.poisson_matrix()
    blocks = []
    total = np.zeros((d, d), dtype=complex)
    for weights in itertools.product(range(N), repeat=len(per_curve)):
        Pw = np.eye(d, dtype=complex)
        for projs, k in zip(per_curve, weights):
            Pw = Pw @ projs[k]
        total = total + Pw
        u, s, _ = np.linalg.svd(Pw)
        rank = int(round(np.real(np.trace(Pw))))
        Q = u[:, :rank]
        mats = [Q.conj().T @ G @ Q for G in gens]
        blocks.append(Block(weights, Pw, Q, mats,
                            Representation(tau, root, None, None, mats)))
    res = np.linalg.norm(total - np.eye(d), 2)
    for a in range(len(blocks)):
        Pa = blocks[a].projector
        res = max(res, np.linalg.norm(Pa @ Pa - Pa, 2))
        for b in range(a + 1, len(blocks)):
            res = max(res, np.linalg.norm(Pa @ blocks[b].projector, 2))
    return Decomposition(None, x_t, rep_t, blocks, float(res), scales, perms)


# factorization report

@dataclass
class FactorizationRow:
    t: float
    weights: tuple
    r1: float
    r2: float
    r3: float
    lengths: list
    graph_lengths: list
    block_dim: int
    projector_residual: float
    condition: float
    new_puncture_weights: list


@dataclass
class Report:
    rows: list
    verdict: bool
    details: dict

    def columns(self):
        return list(self.rows[0].__dict__) if self.rows else []


def strictly_decreasing_tail(values, count=4):
    tail = list(values)[-count:]
    return len(tail) == count and all(b < a for a, b in zip(tail, tail[1:]))


def family_representation(T, path, N, p, a=1):
    """Representation at ``t = 1`` and the family ``t -> rho_t``."""
    root = RootOfUnity(N, a)
    rep1 = build_irrep(T, root, path.x(1.0), p)
    return root, continuous_family(rep1, path.x)


def factorization_report(T, curve, path, N, p, ts, a=1, threshold=1e-3):
    """
    Residuals of the block decomposition along ``path`` at the samples ``ts``
    (descending).  ``r1``: N-th powers of the block generators against the cut
    coordinates ``y``; ``r2``: old puncture elements against ``q^{p_l}``;
    ``r3``: eigenvalues of the new puncture elements against ``q^i``.
    """
    data = path.data
    root, family = family_representation(T, path, N, p, a)
    th = theta(data)
    tau = data.surface.poisson_matrix()
    old_elems = [apply_theta(th, puncture_element(data.surface, v)) for v in data.old_punctures]
    new_elems = [(apply_theta(th, puncture_element(data.surface, u)),
                  apply_theta(th, puncture_element(data.surface, v)))
                 for u, v in data.new_punctures]
    y = path.y
    rows = []
    d_expected = None
    dims_ok = True
    proj_ok = True
    for t in ts:
        x_t = path.x(t)
        rep_t = family(t)
        dec = decompose_at(data, rep_t, x_t)
        old_mats = [evaluate(z, rep_t) for z in old_elems]
        new_mats = [(evaluate(u, rep_t), evaluate(v, rep_t)) for u, v in new_elems]
        lengths = path.curve_lengths(t)
        glen = path.graph_lengths(t)
        cond = max(np.linalg.cond(M) for M in rep_t.matrices)
        d_expected = rep_t.dim // N ** len(data.crossings)
        proj_ok &= dec.projector_residual < 1e-10
        for blk in dec.blocks:
            dims_ok &= blk.basis.shape[1] == d_expected
            I = np.eye(blk.basis.shape[1])
            r1 = max(np.linalg.norm(np.linalg.matrix_power(B, N) - y[j] * I, 2)
                     for j, B in enumerate(blk.matrices))
            Pk = blk.projector
            r2 = 0.0
            for l, M in enumerate(old_mats):
                r2 = max(r2, np.linalg.norm(Pk @ M - root.power(p[l]) * Pk, 2))
            r3 = 0.0
            weights_seen = []
            Q = blk.basis
            for i, (Mu, Mv) in enumerate(new_mats):
                k = blk.weights[i]
                pair = []
                for M in (Mu, Mv):
                    ev = np.linalg.eigvals(Q.conj().T @ M @ Q)
                    r3 = max(r3, float(np.max(np.abs(ev - root.power(k)))))
                    pair.append(root.log(np.mean(ev) / abs(np.mean(ev))))
                weights_seen.append(tuple(pair))
            rows.append(FactorizationRow(float(t), blk.weights, float(r1), float(r2), float(r3),
                                         lengths, glen, blk.basis.shape[1],
                                         dec.projector_residual, float(cond), weights_seen))
    verdict, per_block = _verdict(rows, ("r1", "r2", "r3"), threshold)
    weights_ok = all(all(u == v == k for (u, v), k in zip(r.new_puncture_weights, r.weights))
                     for r in rows)
    details = {"per_block": per_block, "block_dims_ok": bool(dims_ok),
               "projectors_ok": bool(proj_ok), "weights_ok": bool(weights_ok),
               "block_dim": d_expected}
    return Report(rows, bool(verdict and dims_ok and proj_ok and weights_ok), details)


def _verdict(rows, names, threshold):
    per_block = {}
    ok = True
    for key in sorted({r.weights for r in rows}):
        series = [r for r in rows if r.weights == key]
        entry = {}
        for name in names:
            vals = [getattr(r, name) for r in series]
            dec = strictly_decreasing_tail(vals)
            small = vals[-1] < threshold
            entry[name] = {"decreasing": dec, "final": vals[-1], "below_threshold": small}
            ok &= dec and small
        per_block[key] = entry
    return ok, per_block


# flips along a family

def evaluate_rational(elem, rep, max_condition=1e12):
    """Matrix of a pivot-rational element; returns ``(matrix, worst condition)``."""
    q = rep.root.value
    n = rep.n
    Z = rep.monomial(np.eye(n, dtype=int)[elem.pivot])
    I = np.eye(rep.dim)
    worst = 1.0
    out = np.zeros((rep.dim, rep.dim), dtype=complex)
    for m, f in elem.terms.items():
        for c in f.den:
            k = np.linalg.cond(I + rep.root.power(c) * Z)
            worst = max(worst, k)
            if not np.isfinite(k) or k > max_condition:
                raise SingularDenominator("condition number %.3g" % k)
        out = out + f.evaluate(Z, lambda L: L.evaluate(q)) @ rep.monomial(m)
    return out, worst


@dataclass
class FlipLimitRow:
    t: float
    generator: int
    gap: float
    condition: float
    pivot: float


def flip_limit_report(T, curve, path, e, N, p, ts, a=1, threshold=1e-3):
    """
    Relative gap ``|rho_t Phi(X'_i) - rho_t Psi(X'_i)| / |rho_t Psi(X'_i)|`` per
    generator of the flipped triangulation, with ``Psi`` the monomial limit in
    the direction in which the curve crosses the square.
    """
    st = square_strands(T, curve, e)
    if not st.vertical and not st.horizontal:
        raise NoCrossing("curve crosses the square neither vertically nor horizontally")
    direction = "vertical" if st.vertical else "horizontal"
    phi = phi_flip(T, e)
    psi = psi_flip(T, e, direction)
    root, family = family_representation(T, path, N, p, a)
    rows = []
    for t in ts:
        rep_t = family(t)
        xe = float(path.x(t)[e])
        for i in range(T.n):
            A, cond = evaluate_rational(phi.images[i], rep_t)
            B = evaluate(psi.images[i], rep_t)
            gap = np.linalg.norm(A - B, 2) / np.linalg.norm(B, 2)
            rows.append(FlipLimitRow(float(t), i, float(gap), float(cond), xe))
    sq_edges = set(square(T, e).edges)
    per_gen = {}
    ok = True
    for i in range(T.n):
        vals = [r.gap for r in rows if r.generator == i]
        if i in sq_edges:
            # the diagonal maps to X_e^{-1} under both maps, so its gap is exactly 0
            exact = all(v == 0.0 for v in vals)
            entry = {"decreasing": strictly_decreasing_tail(vals), "exact": exact,
                     "final": vals[-1]}
            entry["ok"] = exact or (entry["decreasing"] and vals[-1] < threshold)
        else:
            entry = {"identically_zero": all(v == 0.0 for v in vals), "final": vals[-1]}
            entry["ok"] = entry["identically_zero"]
        ok &= entry["ok"]
        per_gen[i] = entry
    return Report(rows, bool(ok), {"direction": direction, "per_generator": per_gen})


# change of triangulation

@dataclass
class ChangeRow:
    t: float
    weights: tuple
    gap: float


def flipped_representation(rep, phi):
    """``rho o Phi``: a representation of the flipped triangulation's algebra."""
    mats = []
    for img in phi.images:
        M, _ = evaluate_rational(img, rep)
        mats.append(M)
    sigma2 = phi.target.poisson_matrix()
    return Representation(sigma2, rep.root, None, rep.p, mats)


def changetriang_report(T, curve, path, e, N, p, ts, a=1, threshold=1e-3):
    """
    Compare the block decompositions of ``rho_t`` (on ``T``) and of
    ``rho_t o Phi`` (on the flipped triangulation).

    Crossing case: compressed generators ``Pi'_k rho'(Theta'(Y'_j)) Pi'_k`` are
    compared with ``Pi_k rho(Theta(Y_j)) Pi_k`` through the identification of
    the two cut triangulations.  Non-crossing case: the flipped blocks are
    compared with the cut flip ``Phi_gamma`` evaluated in the original blocks.
    """
    st = square_strands(T, curve, e)
    crossing = bool(st.vertical or st.horizontal)
    T2 = flip(T, e)[0]
    curve2 = transport_curve(T, curve, e, T2)
    phi = phi_flip(T, e)
    D = path.data
    D2 = cut_along(T2, curve2)
    perm = _class_matching(D.cut, D2.cut, e)
    root, family = family_representation(T, path, N, p, a)
    rows = []
    phi_cut = None
    if not crossing:
        mu0 = diagonal_class(D, e)
        if mu0 is None:
            raise NoCrossing("no segment of the diagonal is an edge of the cut surface; "
                             "use the flipped side")
        phi_cut = phi_flip(D.surface, mu0)
    for t in ts:
        rep_t = family(t)
        rep2 = flipped_representation(rep_t, phi)
        dec = decompose_at(D, rep_t, path.x(t))
        gens2 = [rep2.monomial(row) for row in D2.K]
        for blk in dec.blocks:
            Pk = blk.projector
            gap = 0.0
            if crossing:
                P2 = _flipped_projector(rep2, D2, blk.weights, root)
                for j2 in range(D2.surface.n):
                    A = P2 @ gens2[j2] @ P2
                    B = Pk @ dec.rep.monomial(D.K[perm[j2]]) @ Pk
                    gap = max(gap, np.linalg.norm(A - B, 2) / np.linalg.norm(B, 2))
            else:
                Q = blk.basis
                for j2 in range(D2.surface.n):
                    A = Q.conj().T @ gens2[j2] @ Q
                    B, _ = evaluate_rational(phi_cut.images[perm[j2]], blk.rep)
                    gap = max(gap, np.linalg.norm(A - B, 2) / np.linalg.norm(B, 2))
            rows.append(ChangeRow(float(t), blk.weights, float(gap)))
    ok = True
    per_block = {}
    for key in sorted({r.weights for r in rows}):
        vals = [r.gap for r in rows if r.weights == key]
        if crossing:
            entry = {"decreasing": strictly_decreasing_tail(vals), "final": vals[-1],
                     "initial": vals[0]}
            entry["ok"] = entry["decreasing"] and vals[-1] < threshold
        else:
            entry = {"max": max(vals), "final": vals[-1]}
            entry["ok"] = max(vals) < threshold
        ok &= entry["ok"]
        per_block[key] = entry
    return Report(rows, bool(ok), {"crossing": crossing, "per_block": per_block,
                                   "non_limit_sample": float(ts[0])})


def _flipped_projector(rep2, D2, weights, root):
    d = rep2.dim
    Pw = np.eye(d, dtype=complex)
    for c, k in zip(D2.crossings, weights):
        E = rep2.monomial(c)
        N = root.N
        # c(t) from the spectrum: E^N is scalar
        scale = abs(np.linalg.matrix_power(E, N)[0, 0]) ** (1.0 / N)
        projs, _ = _curve_projectors(E, scale, root, 1e-6)
        Pw = Pw @ projs[k]
    return Pw
