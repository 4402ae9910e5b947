import itertools
import json
import math

import numpy as np
import pytest
import scipy.linalg
from hypothesis import given, strategies as st

from plab import algebra as alg, data_path, linalg
from plab.errors import AntisymmetryViolation, DimensionMismatch, InputError, NonConvergence

from conftest import SHIPPED, antisym, vectors


def brute_jacobi(L):
    """Loop over basis triples with the bracket as the only primitive."""
    E = np.eye(L.n)
    worst = 0.0
    for a, b, c in itertools.product(range(L.n), repeat=3):
        x, y, z = E[a], E[b], E[c]
        j = L.bracket(x, L.bracket(y, z)) + L.bracket(y, L.bracket(z, x)) + L.bracket(z, L.bracket(x, y))
        worst = max(worst, float(np.max(np.abs(j))))
    return worst


def series_exp(M, terms=40):
    out = np.eye(M.shape[0])
    term = np.eye(M.shape[0])
    for k in range(1, terms + 1):
        term = term @ M / k
        out = out + term
    return out


def broken_table():
    return alg.load_algebra(data_path("algebras", "broken.json"))


class TestJacobiator:
    @pytest.mark.parametrize("name", SHIPPED)
    def test_shipped_algebras_are_exact(self, name):
        L = alg.CATALOG[name]()
        mx, J = alg.jacobiator(L)
        assert mx == 0.0
        assert J.shape == (L.n,) * 4
        assert brute_jacobi(L) == 0.0

    def test_abelian(self):
        assert alg.jacobiator(alg.abelian(3))[0] == 0.0

    def test_broken_table_detected(self):
        L = broken_table()
        mx, _ = alg.jacobiator(L)
        assert mx > 0
        assert mx == brute_jacobi(L) == 1.0

    def test_textbook_candidate_is_actually_lie(self):
        # [e1,e2] = e3, [e1,e3] = e2 looks arbitrary but satisfies Jacobi
        L = alg.LieAlgebra.from_brackets(3, [(0, 1, 2, 1), (0, 2, 1, 1)])
        assert alg.jacobiator(L)[0] == 0.0
        assert brute_jacobi(L) == 0.0

    def test_antisymmetry_reported_first(self):
        c = np.zeros((2, 2, 2))
        c[0, 0, 1] = 1.0
        with pytest.raises(AntisymmetryViolation):
            alg.jacobiator(alg.LieAlgebra(c))

    def test_float_table_below_tolerance(self):
        L = alg.LieAlgebra(alg.so3().c * 0.1)
        assert alg.jacobiator(L)[0] < 1e-15


class TestAdMatrix:
    def test_so3_e3(self, so3):
        M = alg.ad_matrix(so3, [0, 0, 1])
        np.testing.assert_array_equal(M @ [1, 0, 0], [0, 1, 0])
        np.testing.assert_array_equal(M @ [0, 1, 0], [-1, 0, 0])

    def test_abelian_zero(self):
        assert not np.any(alg.ad_matrix(alg.abelian(4), np.arange(4.0)))

    @given(vectors(3), vectors(3), vectors(3))
    def test_linear_and_matches_bracket(self, x, y, z):
        L = alg.sl2()
        np.testing.assert_allclose(alg.ad_matrix(L, x + y), alg.ad_matrix(L, x) + alg.ad_matrix(L, y), atol=1e-12)
        np.testing.assert_allclose(alg.ad_matrix(L, x) @ z, L.bracket(x, z), atol=1e-12)

    def test_wrong_length(self, so3):
        with pytest.raises(DimensionMismatch):
            alg.ad_matrix(so3, [1.0, 2.0])


class TestExponential:
    @given(antisym(4, st.floats(-3, 3)) | vectors(16).map(lambda v: v.reshape(4, 4)))
    def test_expm_matches_scipy(self, M):
        np.testing.assert_allclose(linalg.expm(M), scipy.linalg.expm(M), rtol=1e-12, atol=1e-12)

    def test_expm_large_norm(self):
        M = np.array([[0.0, 30.0], [-30.0, 0.0]])
        np.testing.assert_allclose(linalg.expm(M), scipy.linalg.expm(M), atol=1e-11)

    def test_expm_rejects_nonfinite(self):
        with pytest.raises(NonConvergence):
            linalg.expm(np.array([[np.inf]]))

    def test_zero(self, so3):
        xi = np.array([0.3, -1.0, 2.0])
        np.testing.assert_array_equal(alg.coad_exp(so3, np.zeros(3), xi), xi)

    def test_abelian_identity(self):
        xi = np.array([1.0, 2.0, 3.0])
        np.testing.assert_array_equal(alg.coad_exp(alg.abelian(3), [4.0, 5.0, 6.0], xi), xi)

    @pytest.mark.parametrize("theta", [0.3, 1.0, math.pi / 2, 2.5])
    def test_so3_rotation(self, so3, theta):
        out = alg.coad_exp(so3, [0, 0, theta], [1, 0, 0])
        oracle = series_exp(alg.ad_matrix(so3, [0, 0, theta])).T @ [1, 0, 0]
        np.testing.assert_allclose(out, oracle, atol=1e-14)
        np.testing.assert_allclose(out, [math.cos(theta), -math.sin(theta), 0], atol=1e-14)

    @given(vectors(3, st.floats(-1, 1)), vectors(3))
    def test_series_oracle_sl2(self, x, xi):
        L = alg.sl2()
        oracle = series_exp(alg.ad_matrix(L, x)).T @ xi
        np.testing.assert_allclose(alg.coad_exp(L, x, xi), oracle, atol=1e-12)

    @given(vectors(3), st.floats(-1, 1), st.floats(-1, 1))
    def test_one_parameter_group(self, x, s, t):
        L = alg.so3()
        xi = np.array([1.0, -0.5, 0.25])
        lhs = alg.coad_exp(L, (s + t) * x, xi)
        rhs = alg.coad_exp(L, s * x, alg.coad_exp(L, t * x, xi))
        np.testing.assert_allclose(lhs, rhs, atol=1e-12)


class TestXiOperator:
    def test_zero_is_identity(self, so3):
        np.testing.assert_allclose(alg.xi_operator(so3, np.zeros(3)), np.eye(3), atol=1e-15)

    @pytest.mark.parametrize("name", ["so3", "sl2"])
    @given(x=vectors(3))
    def test_defining_identity(self, name, x):
        L = alg.CATALOG[name]()
        A = alg.ad_matrix(L, x)
        Xi = alg.xi_operator(L, x)
        np.testing.assert_allclose(A @ Xi, series_exp(A, 60) - np.eye(3), atol=1e-11)

    def test_degenerate_at_two_pi(self, so3):
        Xi = alg.xi_operator(so3, [0, 0, 2 * math.pi])
        assert abs(np.linalg.det(Xi)) < 1e-8
        assert linalg.min_singular_value(Xi) < 1e-8

    def test_derivative_of_exp(self, sl2, rng):
        # d/ds exp(ad_{x + s v}) at s=0 equals exp(ad_x) ad_{Xi v}
        x, v = rng.normal(size=3) * 0.7, rng.normal(size=3)
        lhs = linalg.expm_frechet(alg.ad_matrix(sl2, x), alg.ad_matrix(sl2, v))
        rhs = linalg.expm(alg.ad_matrix(sl2, x)) @ alg.ad_matrix(sl2, alg.xi_operator(sl2, -x) @ v)
        rhs2 = alg.ad_matrix(sl2, alg.xi_operator(sl2, x) @ v) @ linalg.expm(alg.ad_matrix(sl2, x))
        np.testing.assert_allclose(lhs, rhs, atol=1e-12)
        np.testing.assert_allclose(lhs, rhs2, atol=1e-12)


class TestMorphism:
    def test_identity(self, so3):
        assert alg.is_morphism(so3, so3, np.eye(3)) == 0.0

    def test_borel_inclusion(self):
        data = json.loads(data_path("morphisms", "borel_in_sl2.json").read_text())
        f = np.array(data["matrix"], dtype=float)
        assert alg.is_morphism(alg.borel_sl2(), alg.sl2(), f) == 0.0

    def test_not_a_morphism(self, so3):
        assert alg.is_morphism(so3, alg.abelian(3), np.eye(3)) > 0

    def test_shape_checked(self, so3):
        with pytest.raises(DimensionMismatch):
            alg.is_morphism(so3, so3, np.eye(2))


class TestAnnihilator:
    def test_coordinate_line(self):
        A = alg.annihilator(alg.LinearSubspace(3, [[1.0], [0.0], [0.0]]))
        assert A.dim == 2
        assert linalg.span_contained(A.basis, np.eye(3)[:, 1:]) < 1e-12

    def test_everything(self):
        assert alg.annihilator(alg.LinearSubspace(3, np.eye(3))).dim == 0

    def test_nothing(self):
        assert alg.annihilator(alg.LinearSubspace(3)).dim == 3

    @given(st.integers(1, 5).flatmap(lambda k: vectors(5 * k).map(lambda v: v.reshape(5, k))))
    def test_double_annihilator(self, B):
        if linalg.rank(B) != B.shape[1]:
            return
        S = alg.LinearSubspace(5, B)
        AA = alg.annihilator(alg.annihilator(S))
        assert AA.dim == S.dim
        assert scipy.linalg.subspace_angles(AA.basis, S.basis).max() < 1e-8
        Ao = alg.annihilator(S)
        assert Ao.dim == 5 - S.dim
        if Ao.dim:
            assert np.max(np.abs(Ao.basis.T @ B)) < 1e-10


class TestSubalgebra:
    def test_borel_inside_sl2(self, sl2):
        data = json.loads(data_path("morphisms", "borel_in_sl2.json").read_text())
        h, resid = sl2.subalgebra(np.array(data["matrix"], dtype=float))
        assert resid < 1e-14
        assert alg.jacobiator(h)[0] < 1e-14

    def test_non_closed_span(self, so3):
        _, resid = so3.subalgebra(np.eye(3)[:, :2])
        assert resid == 1.0


class TestJson:
    @pytest.mark.parametrize("name", SHIPPED)
    def test_round_trip(self, name):
        L = alg.CATALOG[name]()
        back = alg.algebra_from_json(json.loads(json.dumps(alg.algebra_to_json(L))))
        np.testing.assert_array_equal(back.c, L.c)

    @pytest.mark.parametrize("name", SHIPPED)
    def test_shipped_files_match_catalog(self, name):
        L = alg.load_algebra(data_path("algebras", f"{name}.json"))
        np.testing.assert_array_equal(L.c, alg.CATALOG[name]().c)

    def test_rational_strings(self):
        L = alg.algebra_from_json({"dim": 2, "brackets": [{"i": 0, "j": 1, "k": 1, "value": "1/2"}]})
        assert L.c[1, 0, 1] == 0.5

    @pytest.mark.parametrize(
        "data",
        [
            [],
            {"brackets": []},
            {"dim": 0},
            {"dim": 2, "brackets": [{"i": 1, "j": 0, "k": 0, "value": 1}]},
            {"dim": 2, "brackets": [{"i": 0, "j": 1, "value": 1}]},
            {"dim": 2, "brackets": [{"i": 0, "j": 1, "k": 0, "value": True}]},
            {"dim": 2, "brackets": [{"i": 0, "j": 1, "k": 0, "value": 1}] * 2},
        ],
    )
    def test_malformed(self, data):
        with pytest.raises(InputError):
            alg.algebra_from_json(data)
