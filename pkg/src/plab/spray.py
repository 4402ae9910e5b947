"""The canonical spray on g*, its exponential, the two-form on g x g*, and
verifiers for the dual pair, the normal form, and Poisson maps.

Tangent vectors to ``T*g* = g x g*`` are written ``(x, xi)`` with ``x in g``
(the cotangent fibre direction) and ``xi in g*`` (the base direction). A
two-form is represented by the matrix ``M`` with ``w(u, v) = u^T M v``; its
Poisson bivector is ``M^{-1}``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import linalg, report
from .algebra import LieAlgebra, coad_exp, is_morphism, xi_operator
from .errors import (
    EmptyPreimage,
    NotGraph,
    NotMorphism,
    NotTransversal,
    PreimageNotTransversal,
    SingularBase,
)
from .fields import PointField, exterior_derivative, fd_jacobian
from .transversal import (
    AffineTransversal,
    conormal_chart,
    is_transversal_at,
    local_model,
    split_at,
    tangential_bivector,
    transversal,
)

SINGULAR_TOL = 1e-8


@dataclass(frozen=True)
class SprayPoint:
    x: np.ndarray
    xi: np.ndarray

    @property
    def vec(self) -> np.ndarray:
        return np.concatenate([self.x, self.xi])

    @classmethod
    def from_vec(cls, v):
        v = np.asarray(v, dtype=float)
        n = v.size // 2
        return cls(v[:n], v[n:])


def spray_flow(L: LieAlgebra, t, p: SprayPoint) -> SprayPoint:
    x = np.asarray(p.x, dtype=float)
    return SprayPoint(x.copy(), coad_exp(L, t * x, p.xi))


def spray_exp(L: LieAlgebra, p: SprayPoint) -> np.ndarray:
    return coad_exp(L, p.x, p.xi)


def omega_g_matrix(L: LieAlgebra, x0, xi0) -> np.ndarray:
    """Matrix of the closed two-form at ``(x0, xi0)``:
    ``w((x, xi), (y, eta)) = xi(X y) - eta(X x) + xi0([X x, X y])`` with
    ``X`` the output of :func:`xi_operator`."""
    X = xi_operator(L, x0)
    P = L.poisson_matrix(xi0)
    n = L.n
    M = np.zeros((2 * n, 2 * n))
    M[:n, :n] = X.T @ P @ X
    M[:n, n:] = -X.T
    M[n:, :n] = X
    return M


def omega_g(L: LieAlgebra, base: SprayPoint, u: SprayPoint, v: SprayPoint) -> float:
    return float(u.vec @ omega_g_matrix(L, base.x, base.xi) @ v.vec)


def omega_g_field(L: LieAlgebra, fd_step=None) -> PointField:
    n = L.n
    return PointField("two-form", lambda p: omega_g_matrix(L, p[:n], p[n:]), 2 * n, fd_step)


def omega_V_on_conormal(T: AffineTransversal, scale=1.0, fd_step=None) -> PointField:
    """Minus the restriction of the two-form to the conormal chart."""
    chart = conormal_chart(T)
    E = chart.tangent_embedding

    def ev(e):
        x0, mu = chart.embed(e)
        return -scale * (E.T @ omega_g_matrix(T.algebra, x0, mu) @ E)

    return PointField("two-form", ev, chart.dim, fd_step)


def exp_on_chart(T: AffineTransversal):
    chart = conormal_chart(T)

    def fn(e):
        x, mu = chart.embed(e)
        return coad_exp(T.algebra, x, mu)

    return fn


def sample_ball(rng, dim, radius, count) -> np.ndarray:
    """Uniform samples in a ball of ``radius`` in ``R^dim``."""
    if dim == 0:
        return np.zeros((count, 0))
    g = rng.normal(size=(count, dim))
    g /= np.linalg.norm(g, axis=1, keepdims=True)
    r = radius * rng.uniform(size=(count, 1)) ** (1.0 / dim)
    return g * r


def default_radius(base) -> float:
    return 0.1 * (1.0 + float(np.linalg.norm(base)))


# verifiers ------------------------------------------------------------------


def verify_dual_pair(L: LieAlgebra, samples=100, tol=1e-6, seed=42, radius=1.0, points=None, fd_step=None):
    """Dual-pair check at samples ``(x0, xi0)`` with ``|x0| <= radius``.

    Per sample: the two-form is nondegenerate, the projection pushes its
    Poisson bivector to ``pi_g``, the spray exponential pushes it to
    ``-pi_g``, and the two pushforwards are orthogonal.
    """
    n = L.n
    if points is None:
        rng = np.random.default_rng(seed)
        xs = sample_ball(rng, n, radius, samples)
        xis = rng.normal(size=(samples, n))
        points = np.hstack([xs, xis])
    points = np.atleast_2d(np.asarray(points, dtype=float))
    Jpr = np.hstack([np.zeros((n, n)), np.eye(n)])
    expfn = lambda p: coad_exp(L, p[:n], p[n:])
    residuals, smins = [], []
    sub = {"pr_poisson": 0.0, "exp_anti_poisson": 0.0, "orthogonal": 0.0}
    for p in points:
        X = xi_operator(L, p[:n])
        sx = linalg.min_singular_value(X)
        if sx < SINGULAR_TOL:
            raise SingularBase(f"xi operator singular at x0 = {p[:n]} (min singular value {sx:.2e})")
        M = omega_g_matrix(L, p[:n], p[n:])
        smins.append(linalg.min_singular_value(M))
        Pi = np.linalg.inv(M)
        Jex = fd_jacobian(expfn, p, fd_step)
        r1 = np.max(np.abs(Jpr @ Pi @ Jpr.T - L.poisson_matrix(p[n:])))
        r2 = np.max(np.abs(Jex @ Pi @ Jex.T + L.poisson_matrix(expfn(p))))
        r3 = np.max(np.abs(Jpr @ Pi @ Jex.T))
        sub["pr_poisson"] = max(sub["pr_poisson"], float(r1))
        sub["exp_anti_poisson"] = max(sub["exp_anti_poisson"], float(r2))
        sub["orthogonal"] = max(sub["orthogonal"], float(r3))
        residuals.append(max(r1, r2, r3))
    return report.from_residuals(
        f"dual_pair[{L.name or L.n}]",
        residuals,
        tol,
        seed,
        extra={"subchecks": sub, "min_singular_value": min(smins) if smins else None},
    )


def check_closed(field: PointField, points, tol=1e-6, name="closedness", seed=None):
    res = [float(np.max(np.abs(exterior_derivative(field, p)))) if field.dim >= 3 else 0.0 for p in points]
    return report.from_residuals(name, res, tol, seed)


def verify_omega_g_closed(L: LieAlgebra, samples=20, tol=1e-6, seed=42, radius=1.0, fd_step=None):
    rng = np.random.default_rng(seed)
    pts = np.hstack([sample_ball(rng, L.n, radius, samples), rng.normal(size=(samples, L.n))])
    return check_closed(omega_g_field(L, fd_step), pts, tol, f"omega_g_closed[{L.name or L.n}]", seed)


def verify_normal_form(T: AffineTransversal, samples=200, tol=1e-6, seed=42, radius=None, sigma=None, points=None, fd_step=None):
    """Normal form on the conormal chart: the spray exponential carries
    the local model built from ``sigma`` (default: the restricted two-form)
    to the linear Poisson structure."""
    chart = conormal_chart(T)
    if sigma is None:
        sigma = omega_V_on_conormal(T)
    if radius is None:
        radius = default_radius(T.base)
    if points is None:
        rng = np.random.default_rng(seed)
        points = sample_ball(rng, chart.dim, radius, samples)
    expfn = exp_on_chart(T)
    residuals = []
    not_graph = 0
    for e in np.atleast_2d(points):
        try:
            Pm = local_model(T, sigma, e)
        except (NotGraph, NotTransversal):
            not_graph += 1
            residuals.append(None)
            continue
        J = fd_jacobian(expfn, e, fd_step)
        target = T.algebra.poisson_matrix(expfn(e))
        residuals.append(float(np.max(np.abs(J @ Pm @ J.T - target))))
    return report.from_residuals(
        f"normal_form[{T.algebra.name or T.n}]",
        residuals,
        tol,
        seed,
        extra={"not_graph": not_graph, "radius": radius},
    )


def fibre_block_check(T: AffineTransversal, y=None) -> float:
    """Fibre-fibre block of ``omega_V`` on the zero section against the normal
    block ``w_X`` of the split.

    Fibre coordinates ``a`` are identified with NX through ``a -> pi^#(Lo a)``,
    which is exactly the frame used by :func:`split_at`. Under this
    identification the block is the two-form inverse to ``w_X``; the usual
    sign in ``sigma|_X = -w_X`` comes from identifying by ``-pi^#`` instead.
    Returns the max-abs deviation.
    """
    y = np.zeros(T.k) if y is None else np.asarray(y, dtype=float)
    chart = conormal_chart(T)
    r = chart.fibre_dim
    if r == 0:
        return 0.0
    sig = omega_V_on_conormal(T)(chart.zero_section(y))[:r, :r]
    w = split_at(T, T.point(y)).normal
    return float(np.max(np.abs(sig @ w - np.eye(r))))


# Poisson maps -------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class PreimageTransversal:
    """``Y = (f^T)^{-1}(X)`` together with the bundle map ``F: N*Y -> N*X``
    in conormal-chart coordinates (an affine map ``e_X = D e_Y + offset``)."""

    X: AffineTransversal
    Y: AffineTransversal
    D: np.ndarray
    offset: np.ndarray

    def F(self, eY):
        return self.D @ np.asarray(eY, dtype=float) + self.offset


def preimage_transversal(Lg: LieAlgebra, Lh: LieAlgebra, f, X: AffineTransversal) -> PreimageTransversal:
    """``f: g -> h`` a Lie morphism (shape dim h x dim g), ``X`` in g*."""
    f = np.asarray(f, dtype=float)
    if is_morphism(Lg, Lh, f) > 1e-12 * max(1.0, float(np.max(np.abs(f)))) ** 2:
        raise NotMorphism("the linear map is not a Lie algebra morphism")
    ft = f.T  # h* -> g*
    A = np.hstack([ft, -X.L])
    sol, *_ = np.linalg.lstsq(A, X.base, rcond=None)
    if np.linalg.norm(A @ sol - X.base) > 1e-9 * (1 + np.linalg.norm(X.base)):
        raise EmptyPreimage("X does not meet the image of f^T")
    mu0 = sol[: Lh.n]
    K = linalg.null_space(A)
    dirs = linalg.orth(K[: Lh.n]) if K.size else np.zeros((Lh.n, 0))
    Y = transversal(Lh, mu0, dirs, check=False)
    ok, smin = is_transversal_at(Y, mu0)
    if not ok:
        raise PreimageNotTransversal(smin)
    # fibre part: f LoX aX = LoY aY
    fLo = f @ X.Lo
    Af, *_ = np.linalg.lstsq(fLo, Y.Lo, rcond=None)
    if Af.size and np.max(np.abs(fLo @ Af - Y.Lo)) > 1e-9:
        raise PreimageNotTransversal(0.0)
    Ab, *_ = np.linalg.lstsq(X.L, ft @ Y.L, rcond=None) if X.k else (np.zeros((0, Y.k)),)
    off_b, *_ = np.linalg.lstsq(X.L, ft @ mu0 - X.base, rcond=None) if X.k else (np.zeros(0),)
    rX, rY = X.n - X.k, Lh.n - Y.k
    D = np.zeros((X.n, Lh.n))
    D[:rX, :rY] = Af
    D[rX:, rY:] = Ab
    offset = np.concatenate([np.zeros(rX), off_b])
    return PreimageTransversal(X, Y, D, offset)


def poisson_map_normal_form(Lg, Lh, f, X: AffineTransversal, samples=100, tol=1e-6, seed=42, radius=None):
    """Normal form for the Poisson map ``f^T: h* -> g*`` around ``Y = (f^T)^{-1} X``.

    Sub-checks per sample ``e`` of the chart of N*Y: (a) the square with the
    spray exponentials commutes, (b) ``F`` pulls the restricted two-form back
    to the restricted two-form, (c) ``f^T`` restricted to Y is Poisson onto X.
    """
    f = np.asarray(f, dtype=float)
    pre = preimage_transversal(Lg, Lh, f, X)
    Y = pre.Y
    chartY = conormal_chart(Y)
    wX, wY = omega_V_on_conormal(X), omega_V_on_conormal(Y)
    expX, expY = exp_on_chart(X), exp_on_chart(Y)
    if radius is None:
        radius = default_radius(Y.base)
    rng = np.random.default_rng(seed)
    pts = sample_ball(rng, chartY.dim, radius, samples)
    sub = {"commute": 0.0, "pullback_forms": 0.0, "restriction_poisson": 0.0}
    residuals = []
    Db = pre.D[X.n - X.k :, Lh.n - Y.k :]
    for e in pts:
        eX = pre.F(e)
        ra = float(np.max(np.abs(expX(eX) - f.T @ expY(e))))
        rb = float(np.max(np.abs(pre.D.T @ wX(eX) @ pre.D - wY(e))))
        _, z = chartY.split(e)
        _, w = conormal_chart(X).split(eX)
        rc = 0.0
        if X.k:
            rc = float(np.max(np.abs(Db @ tangential_bivector(Y, z) @ Db.T - tangential_bivector(X, w))))
        sub["commute"] = max(sub["commute"], ra)
        sub["pullback_forms"] = max(sub["pullback_forms"], rb)
        sub["restriction_poisson"] = max(sub["restriction_poisson"], rc)
        residuals.append(max(ra, rb, rc))
    return report.from_residuals(
        f"poisson_map[{Lg.name or Lg.n}->{Lh.name or Lh.n}]",
        residuals,
        tol,
        seed,
        extra={"subchecks": sub, "preimage_dim": Y.k, "preimage_base": Y.base},
    )
