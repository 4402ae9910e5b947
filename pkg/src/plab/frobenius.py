"""Frobenius subalgebras ``h`` of ``g``: the two-form ``omega_lambda`` on ``h``,
the global splitting of ``g*`` along the fibres of ``r: g* -> h*``, the
horizontal/vertical decomposition of ``pi_g`` and transverse quadraticity.

``h`` is given by a basis matrix ``H`` (columns in g); ``r(xi) = H^T xi``.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import dirac, linalg, report
from .algebra import LieAlgebra, LinearSubspace, aff1_x_aff1, coad_exp, sl2, xi_operator
from .errors import InputError, NoFit, NotFrobenius, NotTransversal, SingularIsotropy
from .fields import PointField, fd_jacobian, fit_polynomial_degree, schouten
from .spray import sample_ball
from .transversal import AffineTransversal, is_transversal_at, split_at, transversal

CLOSURE_TOL = 1e-12
FROBENIUS_TOL = 1e-10


@dataclass(frozen=True, eq=False)
class FrobeniusPair:
    g: LieAlgebra
    h: LinearSubspace
    lam: np.ndarray  # covector on h, in the dual of the h-basis

    def __post_init__(self):
        lam = np.array(self.lam, dtype=float)
        H = self.h.basis
        if lam.shape != (H.shape[1],):
            raise InputError("lambda must have one entry per basis vector of h")
        object.__setattr__(self, "lam", lam)
        sub, resid = self.g.subalgebra(H)
        if resid > CLOSURE_TOL * max(1.0, float(np.max(np.abs(self.g.c)))):
            raise InputError(f"h is not closed under the bracket (residual {resid:.3e})")
        object.__setattr__(self, "h_algebra", sub)
        if H.shape[1] % 2:
            raise NotFrobenius("h has odd dimension, so lambda o [.,.] is degenerate")
        smin = linalg.min_singular_value(self.B) if H.shape[1] else float("inf")
        object.__setattr__(self, "min_singular_value", smin)
        if H.shape[1] == 0 or smin <= FROBENIUS_TOL * max(1.0, float(np.max(np.abs(self.B)))):
            raise NotFrobenius(f"lambda o [.,.] is degenerate on h (min singular value {smin:.3e})")

    @property
    def H(self) -> np.ndarray:
        return self.h.basis

    @property
    def m(self) -> int:
        return self.H.shape[1]

    @property
    def B(self) -> np.ndarray:
        return self.h_algebra.poisson_matrix(self.lam)

    def restrict(self, xi) -> np.ndarray:
        return self.H.T @ np.asarray(xi, dtype=float)

    def extension(self, mu=None) -> np.ndarray:
        """Least-norm ``xi`` with ``xi|_h = mu`` (default ``lambda``)."""
        mu = self.lam if mu is None else np.asarray(mu, dtype=float)
        return np.linalg.pinv(self.H.T) @ mu

    def fibre(self, mu=None, check=True) -> AffineTransversal:
        """``X_mu = r^{-1}(mu)`` with directions the annihilator of ``h``."""
        dirs = linalg.null_space(self.H.T)
        return transversal(self.g, self.extension(mu), dirs, check=check)


def frobenius_from_json(g: LieAlgebra, data) -> FrobeniusPair:
    try:
        H = np.array(data["h_basis"], dtype=float).T
        lam = np.array(data["lambda_on_h"], dtype=float)
    except (KeyError, TypeError, ValueError) as exc:
        raise InputError(f"malformed Frobenius JSON: {exc}") from exc
    return FrobeniusPair(g, LinearSubspace(g.n, H), lam)


def load_frobenius(g, path) -> FrobeniusPair:
    return frobenius_from_json(g, json.loads(Path(path).read_text()))


def omega_lambda_matrix(P: FrobeniusPair, x0) -> np.ndarray:
    """``omega(x, y) = -lambda([X x, X y])`` with ``X`` the operator on h."""
    X = xi_operator(P.h_algebra, x0)
    return -X.T @ P.B @ X


def omega_lambda(P: FrobeniusPair, x0, x, y) -> float:
    return float(np.asarray(x) @ omega_lambda_matrix(P, x0) @ np.asarray(y))


def nondegeneracy_radius(P: FrobeniusPair, radii=(0.05, 0.1, 0.2, 0.5, 1.0, 2.0), probes=50, seed=0, tol=1e-8):
    """Largest tested radius on whose sphere ``omega_lambda`` stays
    nondegenerate at every probe (empirical, not a proof)."""
    rng = np.random.default_rng(seed)
    best = 0.0
    for r in radii:
        dirs = rng.normal(size=(probes, P.m))
        dirs /= np.linalg.norm(dirs, axis=1, keepdims=True)
        if all(linalg.min_singular_value(omega_lambda_matrix(P, r * d)) > tol for d in dirs):
            best = r
        else:
            break
    return best


def weinstein_splitting_check(P: FrobeniusPair, samples=200, tol=1e-6, seed=42, radius=None, fd_step=None):
    """On ``U x X_lambda`` the map ``(x, xi) -> xi o exp(ad_x)`` intertwines
    ``x -> lambda o exp(ad_x)`` with ``r`` and carries
    ``omega_lambda^{-1} + pi_{X_lambda}`` to ``pi_g``."""
    X = P.fibre()
    ok, smin = is_transversal_at(X, X.base)
    if not ok:
        raise NotTransversal(smin)
    if radius is None:
        radius = 0.1 * (1.0 + float(np.linalg.norm(X.base)))
    rng = np.random.default_rng(seed)
    m, k = P.m, X.k
    pts = np.hstack([sample_ball(rng, m, radius, samples), sample_ball(rng, k, radius, samples)])

    def phi(p):
        return coad_exp(P.g, P.H @ p[:m], X.point(p[m:]))

    sub = {"commute": 0.0, "pushforward": 0.0}
    res = []
    for p in pts:
        x, y = p[:m], p[m:]
        rc = float(np.max(np.abs(P.restrict(phi(p)) - coad_exp(P.h_algebra, x, P.lam))))
        Pi = np.zeros((m + k, m + k))
        Pi[:m, :m] = np.linalg.inv(omega_lambda_matrix(P, x))
        Pi[m:, m:] = split_at(X, X.point(y)).tangential
        J = fd_jacobian(phi, p, fd_step)
        rp = float(np.max(np.abs(J @ Pi @ J.T - P.g.poisson_matrix(phi(p)))))
        sub["commute"] = max(sub["commute"], rc)
        sub["pushforward"] = max(sub["pushforward"], rp)
        res.append(max(rc, rp))
    return report.from_residuals(
        f"weinstein_splitting[{P.g.name or P.g.n}]",
        res,
        tol,
        seed,
        notes=["the quotient by the discrete stabilizer is not constructed"],
        extra={"subchecks": sub, "radius": radius},
    )


def horizontal_lift(P: FrobeniusPair, xi) -> np.ndarray:
    """``hor_xi: h* -> g*``, ``v -> ad_x^* xi`` where ``ad_x^* mu = v``."""
    xi = np.asarray(xi, dtype=float)
    Bmu = P.h_algebra.poisson_matrix(P.restrict(xi))
    if linalg.rank(Bmu) < P.m:
        raise SingularIsotropy("the form mu o [.,.] is degenerate on h at this point")
    # infinitesimal coadjoint action x -> ad_x^* xi has matrix P(xi)^T restricted to h
    return P.g.poisson_matrix(xi).T @ P.H @ np.linalg.inv(Bmu.T)


def vorobjev_decompose(P: FrobeniusPair, xi):
    """``(pi_v, pi_h)`` at ``xi`` with ``pi_h = hor pi_h(mu) hor^T``."""
    xi = np.asarray(xi, dtype=float)
    hor = horizontal_lift(P, xi)
    pi_h = hor @ P.h_algebra.poisson_matrix(P.restrict(xi)) @ hor.T
    pi_h = 0.5 * (pi_h - pi_h.T)
    return P.g.poisson_matrix(xi) - pi_h, pi_h


def _fields(P: FrobeniusPair, fd_step=None):
    n = P.g.n
    pv = PointField("bivector", lambda xi: vorobjev_decompose(P, xi)[0], n, fd_step)
    ph = PointField("bivector", lambda xi: vorobjev_decompose(P, xi)[1], n, fd_step)
    return pv, ph


def check_vorobjev(P: FrobeniusPair, samples=100, tol=1e-5, seed=42, radius=None, fd_step=None):
    """Range conditions, the three Schouten vanishings and the forward-Dirac
    property of ``r`` at samples around the extension of ``lambda``."""
    xi0 = P.extension()
    if radius is None:
        radius = 0.1 * (1.0 + float(np.linalg.norm(xi0)))
    rng = np.random.default_rng(seed)
    pts = xi0 + sample_ball(rng, P.g.n, radius, samples)
    pv, ph = _fields(P, fd_step)
    ann = linalg.null_space(P.H.T)
    sub = {"ranges": 0.0, "schouten": 0.0, "forward_dirac": 0.0}
    res = []
    for xi in pts:
        try:
            Pv, Ph = vorobjev_decompose(P, xi)
        except SingularIsotropy:
            res.append(None)
            continue
        orbit = P.g.poisson_matrix(xi) @ P.H
        r1 = max(_contained(Ph, orbit), _contained(Pv, ann))
        r2 = max(float(np.max(np.abs(schouten(a, b, xi)))) for a, b in ((pv, pv), (ph, ph), (pv, ph)))
        img = dirac.forward_image(P.H.T, dirac.graph_of_bivector(P.g.poisson_matrix(xi)))
        r3 = img.angle_to(dirac.graph_of_bivector(P.h_algebra.poisson_matrix(P.restrict(xi))))
        sub["ranges"] = max(sub["ranges"], r1)
        sub["schouten"] = max(sub["schouten"], r2)
        sub["forward_dirac"] = max(sub["forward_dirac"], r3)
        res.append(max(r1, r2, r3))
    return report.from_residuals(f"vorobjev[{P.g.name or P.g.n}]", res, tol, seed, extra={"subchecks": sub})


def _contained(M, space) -> float:
    """Distance of the columns of ``M`` from ``span(space)``, relative to ``|M|``."""
    if not np.any(M):
        return 0.0
    Q = linalg.orth(space) if space.size else np.zeros((M.shape[0], 0))
    R = M - Q @ (Q.T @ M)
    return float(np.max(np.abs(R))) / max(1.0, float(np.max(np.abs(M))))


def transverse_bivector(P: FrobeniusPair, X: AffineTransversal, y) -> np.ndarray:
    """``pi_v`` on ``X_mu`` in the affine coordinates of ``X``."""
    Lp = np.linalg.pinv(X.L)
    Pv, _ = vorobjev_decompose(P, X.point(y))
    return Lp @ Pv @ Lp.T


def transverse_quadraticity(P: FrobeniusPair, mu=None, radius=None, tol=1e-8, max_degree=3):
    """Fit ``y -> pi_{X_mu}(y)`` by polynomials. Passes when the fitted degree
    is at most two; the residual reported is the quadratic-fit residual, which
    bounds the cubic one."""
    X = P.fibre(mu)
    if radius is None:
        radius = 0.1 * (1.0 + float(np.linalg.norm(X.base)))
    field = lambda y: transverse_bivector(P, X, y)
    try:
        fit = fit_polynomial_degree(field, np.zeros(X.k), radius, max_degree, tol)
    except NoFit as exc:
        return report.VerificationReport(
            f"quadraticity[{P.g.name or P.g.n}]", 1, float("inf"), tol, False, notes=[f"no fit up to degree {max_degree}: {exc}"]
        )
    quad = fit.residuals[min(2, len(fit.residuals) - 1)]
    rep = report.threshold_report(
        f"quadraticity[{P.g.name or P.g.n}]",
        quad,
        tol,
        extra={"degree": fit.degree, "residuals": list(fit.residuals), "cubic_residual": fit.residuals[-1] if max_degree >= 3 else None},
    )
    rep.passed = rep.passed and fit.degree <= 2
    return rep


# shipped pairs -------------------------------------------------------------


def borel_in_sl2(lam=(0.0, 1.0)) -> FrobeniusPair:
    return FrobeniusPair(sl2(), LinearSubspace(3, np.array([[1.0, 0.0], [0.0, 1.0], [0.0, 0.0]])), np.array(lam))


def diagonal_in_aff1_x_aff1(lam=(0.0, 1.0)) -> FrobeniusPair:
    H = np.array([[1.0, 0.0], [0.0, 1.0], [1.0, 0.0], [0.0, 1.0]])
    return FrobeniusPair(aff1_x_aff1(), LinearSubspace(4, H), np.array(lam))
