"""Acceptance criteria at their stated tolerances.

Each test records its outcome through the ``criterion`` fixture; the run ends
with one PASS/FAIL line per criterion. Select with ``pytest -m acceptance``.
"""

import json
import math

import numpy as np
import pytest

from plab import algebra as alg, cli, data_path, fields, frobenius as fr, groupoid as gp, linalg, spray
from plab.transversal import load_transversal, split_at

from dirac_oracle import angle, random_instance

pytestmark = pytest.mark.acceptance

JACOBI_ALGEBRAS = ["so3", "sl2", "aff1", "aff1_x_aff1", "heisenberg3"]


@pytest.fixture(scope="module")
def so3_T():
    return load_transversal(alg.so3(), data_path("transversals", "so3_e3.json"))


@pytest.fixture(scope="module")
def sl2_T():
    return load_transversal(alg.sl2(), data_path("transversals", "sl2_h.json"))


def _fmt(x):
    return f"{x:.2e}"


class TestCriterion1Jacobi:
    @pytest.mark.parametrize("name", JACOBI_ALGEBRAS)
    def test_exact(self, name, criterion):
        L = alg.load_algebra(data_path("algebras", f"{name}.json"))
        assert L.is_integral()
        mx, _ = alg.jacobiator(L)
        f = fields.lie_poisson_field(L)
        zero = fields.schouten_poly(f, f).is_zero()
        ok = mx == 0 and zero
        criterion(1, "Jacobi exactness", ok, f"{name} jacobiator={mx} schouten_zero={zero}")
        assert ok


class TestCriterion2DualPair:
    @pytest.mark.parametrize("name", ["so3", "sl2"])
    def test_dual_pair(self, name, criterion):
        L = alg.CATALOG[name]()
        rep = spray.verify_dual_pair(L, samples=100, tol=1e-6, seed=42)
        closed = spray.verify_omega_g_closed(L, samples=20, tol=1e-6, seed=42)
        ok = rep.passed and closed.passed
        criterion(2, "full dual pair", ok, f"{name} dual={_fmt(rep.max_residual)} closed={_fmt(closed.max_residual)}")
        assert ok, (rep.line(), closed.line())

    def test_degenerate_at_two_pi(self, criterion):
        smin = linalg.min_singular_value(spray.omega_g_matrix(alg.so3(), [0, 0, 2 * math.pi], [0.3, -0.2, 1.0]))
        ok = smin <= 1e-8
        criterion(2, "full dual pair", ok, f"min sv at 2pi={_fmt(smin)}")
        assert ok


class TestCriterion3NormalForm:
    @pytest.mark.parametrize("which", ["so3_T", "sl2_T"])
    def test_normal_form(self, which, request, criterion):
        T = request.getfixturevalue(which)
        rep = spray.verify_normal_form(T, samples=200, tol=1e-6, seed=42)
        criterion(3, "normal form", rep.passed, f"{which[:-2]} max={_fmt(rep.max_residual)}")
        assert rep.passed, rep.line()

    def test_negative_control(self, so3_T, criterion):
        rep = spray.verify_normal_form(so3_T, samples=50, tol=1e-6, seed=42, sigma=spray.omega_V_on_conormal(so3_T, scale=1.1))
        ok = (not rep.passed) and rep.max_residual >= 1e-3
        criterion(3, "normal form", ok, f"scaled control residual={_fmt(rep.max_residual)}")
        assert ok


class TestCriterion4PoissonMap:
    def test_borel(self, criterion):
        Lg, Lh = alg.borel_sl2(), alg.sl2()
        f = np.array(json.loads(data_path("morphisms", "borel_in_sl2.json").read_text())["matrix"], dtype=float)
        X = load_transversal(Lg, data_path("transversals", "borel_point.json"))
        rep = spray.poisson_map_normal_form(Lg, Lh, f, X, samples=100, tol=1e-6, seed=42)
        pull = rep.extra["subchecks"]["pullback_forms"]
        ok = rep.passed and pull <= 1e-6
        criterion(4, "Poisson map normal form", ok, f"max={_fmt(rep.max_residual)} pullback_forms={_fmt(pull)}")
        assert ok, rep.line()


@pytest.fixture(scope="module")
def rep():
    return gp.standard_rep(alg.so3())


class TestCriterion5Groupoids:
    def test_axioms(self, rep, criterion):
        r = gp.check_groupoid_axioms(rep, 1000, 1e-10, 42)
        criterion(5, "symplectic groupoids", r.passed, f"axioms={_fmt(r.max_residual)}")
        assert r.passed, r.line()

    def test_multiplicative(self, rep, criterion):
        r = gp.check_multiplicative(rep, samples=100, tol=1e-6, seed=42)
        criterion(5, "symplectic groupoids", r.passed, f"multiplicative={_fmt(r.max_residual)}")
        assert r.passed, r.line()

    def test_restriction(self, rep, so3_T, criterion):
        r = gp.check_restriction(gp.restrict_to_transversal(rep, so3_T), 20, 42)
        ok = r.passed and r.max_residual > 1e-8
        criterion(5, "symplectic groupoids", ok, f"restriction min sv={_fmt(r.max_residual)}")
        assert ok, r.line()

    def test_pullback_model(self, rep, so3_T, criterion):
        checks = gp.build_pullback_model(so3_T, rep=rep).certify(50, 1e-6, 42)
        ok = len(checks) == 4 and all(c.passed for c in checks)
        criterion(5, "symplectic groupoids", ok, "model " + " ".join(f"{c.check.split('[')[0]}={_fmt(c.max_residual)}" for c in checks))
        assert ok, [c.line() for c in checks]


class TestCriterion6Decomposition:
    def test_mixed_block(self, so3_T, criterion):
        # lambda + g_lambda^* is the line through e3^*; skip the origin, where X is not transversal
        ts = np.linspace(-3.0, 3.0, 51)
        ts = ts[np.abs(1 + ts) > 1e-9][:50]
        worst = max(split_at(so3_T, so3_T.point([t])).mixed_error for t in ts)
        ok = len(ts) == 50 and worst <= 1e-10
        criterion(6, "split of pi_g along X", ok, f"mixed block max={_fmt(worst)} over {len(ts)} points")
        assert ok


class TestCriterion7Frobenius:
    @pytest.mark.parametrize("make", [fr.borel_in_sl2, fr.diagonal_in_aff1_x_aff1], ids=["borel", "aff1_x_aff1"])
    def test_suite(self, make, criterion):
        P = make()
        split = fr.weinstein_splitting_check(P, samples=200, tol=1e-6, seed=42)
        vor = fr.check_vorobjev(P, samples=100, tol=1e-5, seed=42)
        quad = fr.transverse_quadraticity(P, tol=1e-8)
        cubic = quad.extra["cubic_residual"]
        ok = split.passed and vor.passed and quad.passed and quad.extra["degree"] <= 2 and cubic <= 1e-8
        criterion(
            7,
            "Frobenius splitting",
            ok,
            f"{P.g.name} split={_fmt(split.max_residual)} vorobjev={_fmt(vor.max_residual)} degree={quad.extra['degree']} cubic={_fmt(cubic)}",
        )
        assert ok, (split.line(), vor.line(), quad.line())


class TestCriterion8Dirac:
    def test_oracle(self, criterion):
        rng = np.random.default_rng(8)
        worst, bad = 0.0, []
        for i in range(500):
            D, E, desc = random_instance(rng, max_n=4)
            a = angle(D, E)
            worst = max(worst, a)
            if not a <= 1e-8:
                bad.append((i, desc, a))
        ok = not bad
        criterion(8, "Dirac oracle equivalence", ok, f"500 instances, max angle={_fmt(worst)}")
        assert ok, bad[:5]


class TestCriterion9Determinism:
    @pytest.mark.parametrize(
        "argv",
        [
            ["dual-pair", "--algebra", "so3", "--samples", "10"],
            ["normal-form", "--algebra", "sl2", "--transversal", str(data_path("transversals", "sl2_h.json")), "--samples", "10"],
        ],
    )
    def test_digest(self, argv, capsys, criterion):
        bodies = []
        for _ in range(2):
            assert cli.main(argv) == 0
            bodies.append(json.loads(capsys.readouterr().out))
        strip = [{k: v for k, v in b.items() if k != "wall_time"} for b in bodies]
        ok = bodies[0]["digest"] == bodies[1]["digest"] and strip[0] == strip[1]
        criterion(9, "determinism", ok, f"{argv[0]} digest={bodies[0]['digest'][:12]}")
        assert ok
