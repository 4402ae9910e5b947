"""Action groupoids over matrix representations, the symplectic form on them,
restriction to transversals, and the pullback-groupoid model.

Group convention: the element attached to ``x in g`` is ``E(x) = exp(-rho(x))``.
With it the target map of the action groupoid on ``E(x)`` is the spray
exponential, ``t(E(x), xi) = xi o exp(ad_x)``. Tangent vectors to G are
left-trivialized as ``a = -rho^{-1}(g^{-1} dg)``, so the curve ``g E(t a)``
has tangent ``a``.

Arrows ``(g, xi)`` have source ``xi`` and target ``xi o Ad_{g^{-1}}``;
``m((g, t(h, eta)), (h, eta)) = (g h, eta)``.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import dirac, linalg, report
from .algebra import LieAlgebra, ad_matrix, coad_exp
from .errors import (
    BlockDimensionMismatch,
    DimensionDrop,
    InputError,
    NonConvergence,
    NotComposable,
    NotGraph,
    NotInAdjointImage,
    NotMember,
    NotTransversal,
)
from .fields import PointField, exterior_derivative
from .spray import omega_g_matrix, omega_V_on_conormal, sample_ball
from .transversal import AffineTransversal, local_model, transversal

HOM_TOL = 1e-12
SNAP_TOL = 1e-9


@dataclass(frozen=True, eq=False)
class MatrixRep:
    """Faithful representation ``rho: g -> gl(N)`` given on the basis."""

    algebra: LieAlgebra
    rho: np.ndarray  # (n, N, N)

    def __post_init__(self):
        r = np.array(self.rho, dtype=float)
        n = self.algebra.n
        if r.ndim != 3 or r.shape[0] != n or r.shape[1] != r.shape[2]:
            raise InputError(f"rho must have shape ({n}, N, N), got {r.shape}")
        r.setflags(write=False)
        object.__setattr__(self, "rho", r)
        flat = r.reshape(n, -1).T
        if linalg.rank(flat) != n:
            raise InputError("representation is not faithful")
        object.__setattr__(self, "_flat", flat)
        object.__setattr__(self, "_pinv", np.linalg.pinv(flat))
        err = self.homomorphism_error()
        if err > HOM_TOL * max(1.0, float(np.max(np.abs(r))) ** 2):
            raise InputError(f"rho is not a Lie algebra homomorphism (residual {err:.3e})")

    @property
    def N(self) -> int:
        return self.rho.shape[1]

    def homomorphism_error(self) -> float:
        r = self.rho
        comm = np.einsum("iab,jbc->ijac", r, r) - np.einsum("jab,ibc->ijac", r, r)
        img = np.einsum("kij,kac->ijac", self.algebra.c, r)
        return float(np.max(np.abs(comm - img)))

    def __call__(self, x) -> np.ndarray:
        return np.einsum("i,iab->ab", np.asarray(x, dtype=float), self.rho)

    def preimage(self, m, tol=1e-9) -> np.ndarray:
        """``x`` with ``rho(x) = m``; NotInAdjointImage if ``m`` is off the image."""
        m = np.asarray(m, dtype=float)
        x = self._pinv @ m.ravel()
        off = float(np.linalg.norm(self._flat @ x - m.ravel()))
        if off > tol * max(1.0, float(np.linalg.norm(m))):
            raise NotInAdjointImage(f"matrix is {off:.3e} away from the image of rho")
        return x

    def exp(self, x) -> np.ndarray:
        return linalg.expm(-self(x))

    def word(self, xs) -> np.ndarray:
        g = np.eye(self.N)
        for x in xs:
            g = g @ self.exp(x)
        return g

    def adjoint_inverse(self, g) -> np.ndarray:
        """Matrix of ``Ad_{g^{-1}} y = rho^{-1}(g^{-1} rho(y) g)``."""
        gi = np.linalg.inv(g)
        return np.array([self.preimage(gi @ self.rho[j] @ g) for j in range(self.algebra.n)]).T

    def left_trivialize(self, g, gdot) -> np.ndarray:
        return -self.preimage(np.linalg.solve(g, gdot))


def group_exp(rep: MatrixRep, x) -> np.ndarray:
    return rep.exp(x)


def rep_from_json(algebra: LieAlgebra, data) -> MatrixRep:
    try:
        rho = np.array(data["rho"], dtype=float)
        N = int(data.get("N", rho.shape[-1]))
    except (KeyError, TypeError, ValueError) as exc:
        raise InputError(f"malformed representation JSON: {exc}") from exc
    if rho.ndim != 3 or rho.shape[1:] != (N, N):
        raise InputError("rho matrices do not match N")
    return MatrixRep(algebra, rho)


def load_rep(algebra, path) -> MatrixRep:
    return rep_from_json(algebra, json.loads(Path(path).read_text()))


def rep_to_json(rep: MatrixRep) -> dict:
    return {"N": rep.N, "rho": rep.rho.tolist()}


def standard_rep(algebra: LieAlgebra) -> MatrixRep:
    """Defining representation for the catalogued algebras."""
    name = algebra.name
    E = lambda i, j, N: np.eye(N)[:, [i]] @ np.eye(N)[[j], :]
    if name == "so3":
        eps = np.zeros((3, 3, 3))
        for i, j, k in ((0, 1, 2), (1, 2, 0), (2, 0, 1)):
            eps[i, j, k], eps[j, i, k] = 1, -1
        rho = -eps
    elif name == "sl2":
        rho = [np.diag([1.0, -1.0]), E(0, 1, 2), E(1, 0, 2)]
    elif name == "borel_sl2":
        rho = [np.diag([1.0, -1.0]), E(0, 1, 2)]
    elif name == "aff1":
        rho = [E(0, 0, 2), E(0, 1, 2)]
    elif name == "aff1_x_aff1":
        rho = [E(0, 0, 4), E(0, 1, 4), E(2, 2, 4), E(2, 3, 4)]
    elif name == "heisenberg3":
        rho = [E(0, 1, 3), E(1, 2, 3), E(0, 2, 3)]
    elif name.startswith("abelian"):
        rho = [E(i, i, algebra.n) for i in range(algebra.n)]
    else:
        raise InputError(f"no standard representation for algebra {name!r}")
    return MatrixRep(algebra, np.array(rho, dtype=float))


# action groupoid -----------------------------------------------------------


@dataclass(frozen=True, eq=False)
class ActionGroupoidPoint:
    g: np.ndarray
    xi: np.ndarray

    def __post_init__(self):
        g = np.array(self.g, dtype=float)
        if abs(np.linalg.det(g)) <= 0:
            raise InputError("group element is singular")
        object.__setattr__(self, "g", g)
        object.__setattr__(self, "xi", np.array(self.xi, dtype=float))


def coadjoint_action(rep: MatrixRep, g, xi) -> np.ndarray:
    """``xi o Ad_{g^{-1}}``."""
    return rep.adjoint_inverse(g).T @ np.asarray(xi, dtype=float)


@dataclass(frozen=True, eq=False)
class GroupoidMaps:
    rep: MatrixRep

    def s(self, p: ActionGroupoidPoint) -> np.ndarray:
        return p.xi

    def t(self, p: ActionGroupoidPoint) -> np.ndarray:
        return coadjoint_action(self.rep, p.g, p.xi)

    def m(self, p: ActionGroupoidPoint, q: ActionGroupoidPoint) -> ActionGroupoidPoint:
        a, b = self.s(p), self.t(q)
        if np.linalg.norm(a - b) > SNAP_TOL * (1 + np.linalg.norm(a)):
            raise NotComposable(f"s(first) and t(second) differ by {np.linalg.norm(a - b):.3e}")
        return ActionGroupoidPoint(p.g @ q.g, q.xi)

    def inv(self, p: ActionGroupoidPoint) -> ActionGroupoidPoint:
        return ActionGroupoidPoint(np.linalg.inv(p.g), self.t(p))

    def unit(self, xi) -> ActionGroupoidPoint:
        return ActionGroupoidPoint(np.eye(self.rep.N), xi)


def groupoid_maps(rep: MatrixRep) -> GroupoidMaps:
    return GroupoidMaps(rep)


def _dist(p: ActionGroupoidPoint, q: ActionGroupoidPoint) -> float:
    return float(max(np.max(np.abs(p.g - q.g)), np.max(np.abs(p.xi - q.xi))))


def check_groupoid_axioms(rep: MatrixRep, words=1000, tol=1e-10, seed=42, scale=1.0):
    """Source/target of products, associativity, unit and inverse laws on
    random composable triples of words of one to three exponentials."""
    G = groupoid_maps(rep)
    rng = np.random.default_rng(seed)
    n = rep.algebra.n

    def element():
        return rep.word(scale * rng.normal(size=(rng.integers(1, 4), n)) / np.sqrt(n))

    res = []
    for _ in range(words):
        p3 = ActionGroupoidPoint(element(), rng.normal(size=n))
        p2 = ActionGroupoidPoint(element(), G.t(p3))
        p1 = ActionGroupoidPoint(element(), G.t(p2))
        p12, p23 = G.m(p1, p2), G.m(p2, p3)
        r = [
            np.max(np.abs(G.s(p12) - G.s(p2))),
            np.max(np.abs(G.t(p12) - G.t(p1))),
            _dist(G.m(p12, p3), G.m(p1, p23)),
            _dist(G.m(G.unit(G.t(p1)), p1), p1),
            _dist(G.m(p1, G.unit(G.s(p1))), p1),
            _dist(G.m(G.inv(p1), p1), G.unit(G.s(p1))),
            _dist(G.m(p1, G.inv(p1)), G.unit(G.t(p1))),
        ]
        res.append(float(max(r)))
    return report.from_residuals(f"groupoid_axioms[{rep.algebra.name or n}]", res, tol, seed)


def omega_G_matrix(L: LieAlgebra, xi0) -> np.ndarray:
    """Matrix of the symplectic form at an arrow with source ``xi0`` in
    left-trivialized coordinates ``(a, xi_dot)``."""
    return omega_g_matrix(L, np.zeros(L.n), xi0)


def omega_G(L: LieAlgebra, at: ActionGroupoidPoint, u, v) -> float:
    """``xi_u(b) - xi_v(a) + xi0([a, b])`` for ``u = (a, xi_u)``, ``v = (b, xi_v)``."""
    u = np.concatenate([np.ravel(u[0]), np.ravel(u[1])]) if isinstance(u, tuple) else np.asarray(u, dtype=float)
    v = np.concatenate([np.ravel(v[0]), np.ravel(v[1])]) if isinstance(v, tuple) else np.asarray(v, dtype=float)
    return float(u @ omega_G_matrix(L, at.xi) @ v)


# multiplicativity -----------------------------------------------------------


def _multiplicativity(pair_curve, tangent, form, samples, rng, h):
    """Residuals ``|m*w - pr1*w - pr2*w|`` on random tangent pairs.

    ``pair_curve(rng)`` returns ``curve(direction_index, tau) -> (p1, p2, p12)``;
    ``tangent(p_plus, p_minus, p0, h)`` differentiates an arrow curve.
    """
    res = []
    for _ in range(samples):
        curve = pair_curve(rng)
        vals = [0.0, 0.0, 0.0]
        tans = []
        for d in (0, 1):
            plus, minus, zero = curve(d, h), curve(d, -h), curve(d, 0.0)
            tans.append([tangent(plus[i], minus[i], zero[i], h) for i in range(3)])
        for i in range(3):
            vals[i] = form(zero[i], tans[0][i], tans[1][i])
        res.append(abs(vals[2] - vals[0] - vals[1]))
    return res


def _action_tangent(rep):
    def tangent(plus, minus, zero, h):
        a = rep.left_trivialize(zero.g, (plus.g - minus.g) / (2 * h))
        return np.concatenate([a, (plus.xi - minus.xi) / (2 * h)])

    return tangent


def check_multiplicative(rep: MatrixRep, form=None, samples=100, tol=1e-6, seed=42, radius=1.0, h=1e-5):
    """Multiplicativity of ``form(point, u, v)`` (default: the symplectic form)
    on composable pairs ``(g, t(h, eta)), (h, eta)`` moved along
    ``g E(tau a)``, ``h E(tau b)``, ``eta + tau eta_dot``."""
    L = rep.algebra
    n = L.n
    G = groupoid_maps(rep)
    if form is None:
        form = lambda p, u, v: float(u @ omega_G_matrix(L, p.xi) @ v)

    def pair_curve(rng):
        g0 = rep.exp(radius * rng.normal(size=n) / np.sqrt(n))
        h0 = rep.exp(radius * rng.normal(size=n) / np.sqrt(n))
        eta0 = rng.normal(size=n)
        dirs = rng.normal(size=(2, 3, n))

        def curve(d, tau):
            a, b, e = dirs[d]
            g, hh, eta = g0 @ rep.exp(tau * a), h0 @ rep.exp(tau * b), eta0 + tau * e
            second = ActionGroupoidPoint(hh, eta)
            first = ActionGroupoidPoint(g, G.t(second))
            return first, second, G.m(first, second)

        return curve

    res = _multiplicativity(pair_curve, _action_tangent(rep), form, samples, np.random.default_rng(seed), h)
    return report.from_residuals(f"multiplicative[{L.name or n}]", res, tol, seed)


def source_pullback(L: LieAlgebra, beta):
    """``form(p, u, v) = beta(s(p))(xi_u, xi_v)`` for a base two-form ``beta``."""
    n = L.n

    def form(p, u, v):
        B = beta(p.xi) if callable(beta) else np.asarray(beta, dtype=float)
        return float(u[n:] @ B @ v[n:])

    return form


# implicit charts -----------------------------------------------------------


class ImplicitChart:
    """Local parametrization of ``{c(z) = 0}`` near ``z0`` by the tangent
    space: ``z(w) = z0 + T w + N nu(w)`` with ``nu`` found by Newton."""

    def __init__(self, constraint, z0, jacobian=None, tol=1e-14, maxiter=30, project=False):
        self.c = constraint
        self.jac = jacobian or (lambda z: _fd_jac(constraint, z))
        self.z0 = np.asarray(z0, dtype=float)
        self.tol = tol
        self.maxiter = maxiter
        self._frame()
        if project:
            # move the centre onto the constraint set, then rebuild the frame
            self.z0 = self.point(np.zeros(self.dim))
            self._frame()

    def _frame(self):
        J = np.atleast_2d(self.jac(self.z0))
        self.T = linalg.null_space(J)
        self.N = linalg.orth(J.T)
        if self.T.shape[1] + self.N.shape[1] != self.z0.size:
            raise NonConvergence("constraint Jacobian is rank deficient at the chart centre")

    @property
    def dim(self) -> int:
        return self.T.shape[1]

    def point(self, w) -> np.ndarray:
        base = self.z0 + self.T @ np.asarray(w, dtype=float)
        if self.N.shape[1] == 0:
            return base
        nu = np.zeros(self.N.shape[1])
        scale = 1.0 + float(np.linalg.norm(base))
        for _ in range(self.maxiter):
            z = base + self.N @ nu
            r = np.asarray(self.c(z), dtype=float)
            if np.linalg.norm(r) <= self.tol * scale:
                return z
            step = np.linalg.solve(self.jac(z) @ self.N, -r)
            nu = nu + step
            if np.linalg.norm(step) <= 1e-3 * self.tol * scale:
                return base + self.N @ nu
        z = base + self.N @ nu
        if np.linalg.norm(self.c(z)) > 1e3 * self.tol * scale:
            raise NonConvergence("Newton projection onto the constraint set failed")
        return z

    def derivative(self, w) -> np.ndarray:
        """``dz/dw`` by the implicit function theorem."""
        z = self.point(w)
        if self.N.shape[1] == 0:
            return self.T.copy()
        J = self.jac(z)
        return self.T - self.N @ np.linalg.solve(J @ self.N, J @ self.T)


def _fd_jac(fn, z, h=1e-7):
    z = np.asarray(z, dtype=float)
    cols = []
    for i in range(z.size):
        e = np.zeros(z.size)
        e[i] = h
        cols.append((np.asarray(fn(z + e)) - np.asarray(fn(z - e))) / (2 * h))
    return np.array(cols).T


def _coad_exp_jacobians(L: LieAlgebra, u, xi):
    """Derivatives of ``(u, xi) -> xi o exp(ad_u)`` in ``u`` and ``xi``."""
    A = ad_matrix(L, u)
    Du = np.array([linalg.expm_frechet(A, ad_matrix(L, e)).T @ xi for e in np.eye(L.n)]).T
    return Du, linalg.expm(A).T


# restriction to a transversal ---------------------------------------------


@dataclass(frozen=True, eq=False)
class RestrictedGroupoid:
    """``G_X = (t, s)^{-1}(X x X)`` inside the action groupoid."""

    rep: MatrixRep
    T: AffineTransversal

    def __post_init__(self):
        if self.rep.algebra is not self.T.algebra and not np.array_equal(self.rep.algebra.c, self.T.algebra.c):
            raise InputError("representation and transversal live on different algebras")
        object.__setattr__(self, "_Lpinv", np.linalg.pinv(self.T.L) if self.T.k else np.zeros((0, self.T.n)))

    @property
    def algebra(self) -> LieAlgebra:
        return self.T.algebra

    @property
    def dim(self) -> int:
        return 2 * self.T.k

    def t(self, p: ActionGroupoidPoint) -> np.ndarray:
        return coadjoint_action(self.rep, p.g, p.xi)

    def off_X(self, mu) -> float:
        return float(np.linalg.norm(self.T.Lo.T @ (np.asarray(mu) - self.T.base)))

    def is_member(self, p: ActionGroupoidPoint, tol=SNAP_TOL) -> bool:
        scale = tol * (1 + float(np.linalg.norm(self.T.base)))
        return self.off_X(p.xi) <= scale and self.off_X(self.t(p)) <= scale

    def require_member(self, p):
        if not self.is_member(p):
            raise NotMember(f"arrow is off G_X (source {self.off_X(p.xi):.2e}, target {self.off_X(self.t(p)):.2e})")

    def coords(self, mu) -> np.ndarray:
        return self._Lpinv @ (np.asarray(mu, dtype=float) - self.T.base)

    def linearized_constraints(self, p: ActionGroupoidPoint) -> np.ndarray:
        """Derivative of ``(s, t)`` composed with ``Lo^T`` in ``(a, xi_dot)``."""
        Lo = self.T.Lo
        r, n = Lo.shape[1], self.T.n
        Ad = self.rep.adjoint_inverse(p.g)
        P = self.algebra.poisson_matrix(p.xi)
        C = np.zeros((2 * r, 2 * n))
        C[:r, n:] = Lo.T
        C[r:, :n] = Lo.T @ Ad.T @ P.T
        C[r:, n:] = Lo.T @ Ad.T
        return C

    def tangent_space(self, p: ActionGroupoidPoint) -> np.ndarray:
        self.require_member(p)
        return linalg.null_space(self.linearized_constraints(p))

    def omega_X(self, p: ActionGroupoidPoint):
        """``(w_X, basis)``: the symplectic form restricted to an orthonormal
        tangent basis of G_X at ``p``."""
        B = self.tangent_space(p)
        return B.T @ omega_G_matrix(self.algebra, p.xi) @ B, B

    def nondegeneracy(self, p) -> float:
        w, _ = self.omega_X(p)
        return linalg.min_singular_value(w)

    # local coordinates (u, xi) with g = g0 E(u)
    def _constraint(self, g0):
        T, L = self.T, self.algebra
        Lo = T.Lo
        Ad0 = self.rep.adjoint_inverse(g0)
        n = T.n

        def c(z):
            u, xi = z[:n], z[n:]
            return np.concatenate([Lo.T @ (xi - T.base), Lo.T @ (Ad0.T @ coad_exp(L, u, xi) - T.base)])

        def jac(z):
            u, xi = z[:n], z[n:]
            Du, Dxi = _coad_exp_jacobians(L, u, xi)
            top = np.hstack([np.zeros((Lo.shape[1], n)), Lo.T])
            return np.vstack([top, Lo.T @ Ad0.T @ np.hstack([Du, Dxi])])

        return c, jac, Ad0

    def chart(self, p: ActionGroupoidPoint) -> "GXChart":
        self.require_member(p)
        return GXChart(self, p)

    def unit(self, y) -> ActionGroupoidPoint:
        return ActionGroupoidPoint(np.eye(self.rep.N), self.T.point(y))

    def sample_members(self, rng, count, radius=0.3):
        """Members obtained by moving off units at random points of X."""
        out = []
        for _ in range(count):
            u0 = self.unit(rng.uniform(-radius, radius, self.T.k))
            ch = self.chart(u0)
            out.append(ch.arrow(rng.uniform(-radius, radius, ch.dim)))
        return out


class GXChart:
    """Chart of G_X around ``p0`` through ``(u, xi) -> (g0 E(u), xi)``."""

    def __init__(self, G: RestrictedGroupoid, p0: ActionGroupoidPoint):
        self.G = G
        self.p0 = p0
        c, jac, self.Ad0 = G._constraint(p0.g)
        n = G.T.n
        self.implicit = ImplicitChart(c, np.concatenate([np.zeros(n), p0.xi]), jac)
        if self.implicit.dim != G.dim:
            raise BlockDimensionMismatch(f"G_X has tangent dimension {self.implicit.dim}, expected {G.dim}")

    @property
    def dim(self) -> int:
        return self.implicit.dim

    def local(self, w):
        z = self.implicit.point(w)
        n = self.G.T.n
        return z[:n], z[n:]

    def arrow(self, w) -> ActionGroupoidPoint:
        u, xi = self.local(w)
        return ActionGroupoidPoint(self.p0.g @ self.G.rep.exp(u), xi)

    def target(self, u, xi) -> np.ndarray:
        return self.Ad0.T @ coad_exp(self.G.algebra, u, xi)

    def data(self, w):
        """Source/target coordinates, their derivatives in ``w``, and the
        pulled-back symplectic form at ``w``."""
        G, L = self.G, self.G.algebra
        n = L.n
        u, xi = self.local(w)
        dz = self.implicit.derivative(w)
        Du, Dxi = _coad_exp_jacobians(L, u, xi)
        ys, yt = G.coords(xi), G.coords(self.target(u, xi))
        dys = G._Lpinv @ dz[n:]
        dyt = G._Lpinv @ self.Ad0.T @ np.hstack([Du, Dxi]) @ dz
        # left-trivialized derivative of u -> E(u)
        Eu = G.rep.exp(u)
        A = np.array([G.rep.left_trivialize(Eu, linalg.expm_frechet(-G.rep(u), -G.rep(e))) for e in np.eye(n)]).T
        amb = np.vstack([A @ dz[:n], dz[n:]])
        w_form = amb.T @ omega_G_matrix(L, xi) @ amb
        return ys, yt, dys, dyt, w_form


def restrict_to_transversal(rep: MatrixRep, T: AffineTransversal) -> RestrictedGroupoid:
    return RestrictedGroupoid(rep, T)


def check_restriction(G: RestrictedGroupoid, samples=20, seed=42, radius=0.3, min_sv=1e-8):
    """Membership, tangent dimension ``2k`` and nondegeneracy of ``w_X`` at
    sampled members. The report's residual is the smallest singular value of
    ``w_X`` and passes when it exceeds ``min_sv``."""
    rng = np.random.default_rng(seed)
    members = G.sample_members(rng, samples, radius)
    dims, smins = [], []
    for p in members:
        w, B = G.omega_X(p)
        dims.append(B.shape[1])
        smins.append(linalg.min_singular_value(w) if w.size else float("inf"))
    worst = min(smins) if smins else float("inf")
    ok_dims = all(d == G.dim for d in dims)
    rep_ = report.threshold_report(
        f"restriction[{G.algebra.name or G.T.n}]",
        worst,
        min_sv,
        above=True,
        seed=seed,
        extra={"tangent_dims": sorted(set(dims)), "expected_dim": G.dim},
    )
    rep_.samples = len(members)
    rep_.passed = rep_.passed and ok_dims
    return rep_


# pullback model -------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class ModelArrow:
    """``(e_t, (g, xi), e_s)`` with ``p(e_t) = t(g, xi)`` and ``p(e_s) = xi``."""

    e_t: np.ndarray
    g: np.ndarray
    xi: np.ndarray
    e_s: np.ndarray


@dataclass(frozen=True, eq=False)
class PullbackModel:
    """The groupoid ``E x_X G_X x_X E`` over the conormal chart ``E`` of ``T``
    with ``w_E = -t*sigma + p*w_X + s*sigma``.

    ``GX`` is a restricted groupoid whose transversal has the same dimension
    as ``T``; affine coordinates on the two transversals are identified.
    """

    T: AffineTransversal
    GX: RestrictedGroupoid
    sigma: PointField

    def __post_init__(self):
        if self.GX.T.k != self.T.k:
            raise BlockDimensionMismatch(f"G_X lives over dimension {self.GX.T.k}, X has dimension {self.T.k}")

    @property
    def fibre_dim(self) -> int:
        return self.T.n - self.T.k

    @property
    def dim(self) -> int:
        return 2 * self.fibre_dim + self.GX.dim

    # structure maps on arrows
    def s(self, z: ModelArrow):
        return z.e_s

    def t(self, z: ModelArrow):
        return z.e_t

    def m(self, z1: ModelArrow, z2: ModelArrow) -> ModelArrow:
        if np.max(np.abs(z1.e_s - z2.e_t)) > SNAP_TOL * (1 + np.linalg.norm(z1.e_s)):
            raise NotComposable("source of the first arrow differs from target of the second")
        return ModelArrow(z1.e_t, z1.g @ z2.g, z2.xi, z2.e_s)

    def arrow(self, a_t, gamma: ActionGroupoidPoint, a_s) -> ModelArrow:
        G = self.GX
        e_t = np.concatenate([a_t, G.coords(G.t(gamma))])
        e_s = np.concatenate([a_s, G.coords(gamma.xi)])
        return ModelArrow(e_t, gamma.g, gamma.xi, e_s)

    def form_ambient(self, z: ModelArrow, U, V) -> float:
        """``w_E`` on tangents ``(de_t, a, xi_dot, de_s)`` of a model arrow."""
        n, m = self.T.n, self.GX.T.n
        sl = (slice(0, n), slice(n, n + 2 * m), slice(n + 2 * m, 2 * n + 2 * m))
        val = -U[sl[0]] @ self.sigma(z.e_t) @ V[sl[0]]
        val += U[sl[1]] @ omega_G_matrix(self.GX.algebra, z.xi) @ V[sl[1]]
        val += U[sl[2]] @ self.sigma(z.e_s) @ V[sl[2]]
        return float(val)

    def chart(self, gamma: ActionGroupoidPoint) -> "ModelChart":
        return ModelChart(self, self.GX.chart(gamma))

    def certify(self, samples=50, tol=1e-6, seed=42, radius=None, gx_radius=0.3, min_sv=1e-8, h=1e-5):
        """Closedness, nondegeneracy, multiplicativity and the forward-Dirac
        property of ``(t, s)`` onto ``(E, -pi_model) x (E, pi_model)``."""
        rng = np.random.default_rng(seed)
        r, k = self.fibre_dim, self.T.k
        if radius is None:
            radius = 0.1 * (1.0 + float(np.linalg.norm(self.T.base)))
        n_dim = self.dim
        closed, smins, dirac_res = [], [], []
        members = self.GX.sample_members(rng, samples, gx_radius)
        for idx, gamma in enumerate(members):
            ch = self.chart(gamma)
            z = np.concatenate([sample_ball(rng, r, radius, 1)[0], sample_ball(rng, 2 * k, 0.05, 1)[0], sample_ball(rng, r, radius, 1)[0]])
            w = ch.omega_E(z)
            smins.append(linalg.min_singular_value(w) if w.size else float("inf"))
            try:
                dirac_res.append(ch.forward_dirac_angle(z))
            except (NotGraph, NotTransversal, DimensionDrop):
                dirac_res.append(None)
            if idx < max(1, samples // 5) and n_dim >= 3:
                field = PointField("two-form", ch.omega_E, n_dim)
                closed.append(float(np.max(np.abs(exterior_derivative(field, z)))))
        mult = _multiplicativity(self._pair_curve(radius, gx_radius), self._tangent, self.form_ambient, samples, rng, h)
        name = f"[{self.T.algebra.name or self.T.n}]"
        smin = min(smins) if smins else float("inf")
        nondeg = report.threshold_report("model_nondegenerate" + name, smin, min_sv, above=True, seed=seed)
        nondeg.samples = len(smins)
        return [
            report.from_residuals("model_closed" + name, closed or [0.0], tol, seed),
            nondeg,
            report.from_residuals("model_multiplicative" + name, mult, tol, seed),
            report.from_residuals("model_forward_dirac" + name, dirac_res, tol, seed, notes=["residual is the largest principal angle"]),
        ]

    def _tangent(self, plus: ModelArrow, minus: ModelArrow, zero: ModelArrow, h):
        a = self.GX.rep.left_trivialize(zero.g, (plus.g - minus.g) / (2 * h))
        d = lambda f: (f(plus) - f(minus)) / (2 * h)
        return np.concatenate([d(lambda q: q.e_t), a, d(lambda q: q.xi), d(lambda q: q.e_s)])

    def _pair_curve(self, radius, gx_radius):
        G = self.GX
        r = self.fibre_dim
        n = G.T.n

        def pair_curve(rng):
            gamma2 = G.sample_members(rng, 1, gx_radius)[0]
            gamma1 = G.chart(ActionGroupoidPoint(np.eye(G.rep.N), G.t(gamma2))).arrow(rng.uniform(-gx_radius, gx_radius, G.dim))
            pc = _pair_chart(G, gamma1, gamma2)
            a0 = sample_ball(rng, 3 * r, radius, 1)[0] if r else np.zeros(0)
            dirs = rng.normal(size=(2, 3 * r + pc.dim))

            def curve(d, tau):
                theta = tau * dirs[d]
                a = a0 + theta[: 3 * r]
                zz = pc.point(theta[3 * r :])
                ug, uh, eta = zz[:n], zz[n : 2 * n], zz[2 * n :]
                g = gamma1.g @ G.rep.exp(ug)
                hh = gamma2.g @ G.rep.exp(uh)
                second = ActionGroupoidPoint(hh, eta)
                first = ActionGroupoidPoint(g, G.t(second))
                z2 = self.arrow(a[r : 2 * r], second, a[2 * r :])
                z1 = self.arrow(a[:r], first, a[r : 2 * r])
                return z1, z2, self.m(z1, z2)

            return curve

        return pair_curve


def _pair_chart(G: RestrictedGroupoid, gamma1: ActionGroupoidPoint, gamma2: ActionGroupoidPoint) -> ImplicitChart:
    """Composable pairs of G_X near ``(gamma1, gamma2)`` in coordinates
    ``(u_g, u_h, eta)`` with arrows ``(g1 E(u_g), t(h, eta))`` and ``(h2 E(u_h), eta)``."""
    T, L = G.T, G.algebra
    n, Lo = T.n, T.Lo
    Ag, Ah = G.rep.adjoint_inverse(gamma1.g), G.rep.adjoint_inverse(gamma2.g)

    def c(z):
        ug, uh, eta = z[:n], z[n : 2 * n], z[2 * n :]
        mid = Ah.T @ coad_exp(L, uh, eta)
        top = Ag.T @ coad_exp(L, ug, mid)
        return np.concatenate([Lo.T @ (eta - T.base), Lo.T @ (mid - T.base), Lo.T @ (top - T.base)])

    return ImplicitChart(c, np.concatenate([np.zeros(2 * n), gamma2.xi]), project=True)


class ModelChart:
    """Coordinates ``z = (a_t, w, a_s)`` on the model near ``(0, gamma, 0)``."""

    def __init__(self, model: PullbackModel, gx_chart: GXChart):
        self.model = model
        self.gx = gx_chart

    def split(self, z):
        r = self.model.fibre_dim
        z = np.asarray(z, dtype=float)
        return z[:r], z[r : z.size - r], z[z.size - r :]

    def arrow(self, z) -> ModelArrow:
        a_t, w, a_s = self.split(z)
        return self.model.arrow(a_t, self.gx.arrow(w), a_s)

    def _pieces(self, z):
        a_t, w, a_s = self.split(z)
        ys, yt, dys, dyt, wX = self.gx.data(w)
        r, d = self.model.fibre_dim, self.gx.dim
        k = ys.size
        JA = np.zeros((r + k, 2 * r + d))
        JA[:r, :r] = np.eye(r)
        JA[r:, r : r + d] = dyt
        JC = np.zeros((r + k, 2 * r + d))
        JC[:r, r + d :] = np.eye(r)
        JC[r:, r : r + d] = dys
        JB = np.zeros((d, 2 * r + d))
        JB[:, r : r + d] = np.eye(d)
        e_t = np.concatenate([a_t, yt])
        e_s = np.concatenate([a_s, ys])
        return e_t, e_s, JA, JB, JC, wX

    def omega_E(self, z) -> np.ndarray:
        e_t, e_s, JA, JB, JC, wX = self._pieces(z)
        sig = self.model.sigma
        w = -JA.T @ sig(e_t) @ JA + JB.T @ wX @ JB + JC.T @ sig(e_s) @ JC
        return 0.5 * (w - w.T)

    def ts_jacobian(self, z) -> np.ndarray:
        _, _, JA, _, JC, _ = self._pieces(z)
        return np.vstack([JA, JC])

    def forward_dirac_angle(self, z) -> float:
        """Largest principal angle between the forward image of ``graph(w_E)``
        under ``(t, s)`` and ``graph(-pi_model) x graph(pi_model)``."""
        e_t, e_s, JA, _, JC, _ = self._pieces(z)
        img = dirac.forward_image(np.vstack([JA, JC]), dirac.graph_of_twoform(self.omega_E(z)))
        T, sig = self.model.T, self.model.sigma
        target = dirac.product(
            dirac.graph_of_bivector(-local_model(T, sig, e_t)),
            dirac.graph_of_bivector(local_model(T, sig, e_s)),
        )
        return img.angle_to(target)


def build_pullback_model(T: AffineTransversal, GX: RestrictedGroupoid | None = None, sigma=None, rep=None) -> PullbackModel:
    """Pullback model over the conormal chart of ``T``. ``GX`` defaults to the
    restriction of ``rep``'s action groupoid to ``T``; ``sigma`` to the
    restricted two-form ``omega_V``."""
    if GX is None:
        if rep is None:
            raise InputError("either GX or rep is required")
        GX = restrict_to_transversal(rep, T)
    if sigma is None:
        sigma = omega_V_on_conormal(T)
    return PullbackModel(T, GX, sigma)


def isotropy_model(T: AffineTransversal, sigma=None) -> PullbackModel:
    """``V x (G_lambda x W) x V`` for a transversal ``lambda + g_lambda*``:
    the isotropy algebra acts on its own dual, whose affine coordinates are
    identified with those of ``T``."""
    L = T.algebra
    iso = linalg.null_space(L.poisson_matrix(T.base))
    if iso.shape[1] != T.k:
        raise BlockDimensionMismatch(f"isotropy algebra has dimension {iso.shape[1]}, X has dimension {T.k}")
    # coordinates of g_lambda dual to the directions of T
    basis = iso @ np.linalg.inv(T.L.T @ iso)
    sub, resid = L.subalgebra(basis)
    if resid > 1e-10:
        raise InputError("isotropy directions are not closed under the bracket")
    sub = LieAlgebra(sub.c, name="isotropy")
    rep = MatrixRep(sub, _regular_rep(sub))
    W = transversal(sub, np.zeros(sub.n), np.eye(sub.n))
    return PullbackModel(T, RestrictedGroupoid(rep, W), sigma if sigma is not None else omega_V_on_conormal(T))


def _regular_rep(L: LieAlgebra):
    """Faithful representation of a small algebra: the adjoint one when it is
    faithful, diagonal matrices when the algebra is abelian."""
    ads = np.array([ad_matrix(L, e) for e in np.eye(L.n)])
    if linalg.rank(ads.reshape(L.n, -1).T) == L.n:
        return ads
    if np.allclose(L.c, 0):
        n = L.n
        return np.array([np.eye(n)[:, [i]] @ np.eye(n)[[i], :] for i in range(n)])
    raise InputError("no faithful representation available for the isotropy algebra")
