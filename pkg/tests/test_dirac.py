import numpy as np
import pytest
from hypothesis import given, strategies as st

from plab import dirac
from plab.errors import DimensionMismatch, InputError, NotAntisymmetric, NotGraph

from conftest import antisym
from dirac_oracle import Exact, angle, random_instance


class TestGraphs:
    def test_zero_bivector(self):
        D = dirac.graph_of_bivector(np.zeros((3, 3)))
        assert np.max(np.abs(D.vectors)) == 0.0
        assert np.linalg.matrix_rank(D.covectors) == 3

    def test_plane(self):
        P = np.array([[0.0, 1.0], [-1.0, 0.0]])
        D = dirac.graph_of_bivector(P)
        assert D.isotropy_error() < 1e-15
        assert D.contains(np.array([0.0, -1.0, 1.0, 0.0]))  # (P e1*, e1*)
        assert D.contains(np.array([1.0, 0.0, 0.0, 1.0]))  # (P e2*, e2*)
        np.testing.assert_allclose(dirac.as_bivector(D), P, atol=1e-12)

    @given(st.integers(1, 5).flatmap(antisym))
    def test_bivector_round_trip(self, P):
        np.testing.assert_allclose(dirac.as_bivector(dirac.graph_of_bivector(P)), P, atol=1e-12 * (1 + np.abs(P).max()) ** 2)

    @given(st.integers(1, 5).flatmap(antisym))
    def test_twoform_round_trip(self, w):
        np.testing.assert_allclose(dirac.as_twoform(dirac.graph_of_twoform(w)), w, atol=1e-12 * (1 + np.abs(w).max()) ** 2)

    def test_tangent_space_is_not_a_graph(self):
        D = dirac.DiracSpace(3, np.vstack([np.eye(3), np.zeros((3, 3))]))
        with pytest.raises(NotGraph) as info:
            dirac.as_bivector(D)
        assert info.value.intersection_dim == 3

    def test_rejects_non_antisymmetric(self):
        with pytest.raises(NotAntisymmetric):
            dirac.graph_of_bivector(np.eye(2))

    def test_rejects_non_lagrangian_basis(self):
        with pytest.raises(InputError):
            dirac.DiracSpace(2, np.vstack([np.eye(2), np.eye(2)]))


class TestGauge:
    def test_zero_gauge(self, rng):
        P = rng.normal(size=(3, 3))
        D = dirac.graph_of_bivector(P - P.T)
        assert dirac.gauge(D, np.zeros((3, 3))).same_as(D)

    @given(antisym(4, st.floats(-1, 1)), antisym(4, st.floats(-1, 1)))
    def test_round_trip_through_inverse_gauge(self, P, s):
        if np.linalg.cond(np.eye(4) + s @ P) > 1e6:
            return
        Q = dirac.as_bivector(dirac.gauge(dirac.graph_of_bivector(P), s))
        back = dirac.as_bivector(dirac.gauge(dirac.graph_of_bivector(Q), -s))
        np.testing.assert_allclose(back, P, atol=1e-8)
        np.testing.assert_allclose(Q, P @ np.linalg.inv(np.eye(4) + s @ P), atol=1e-8)

    @given(antisym(3), antisym(3))
    def test_isotropy_preserved(self, P, s):
        assert dirac.gauge(dirac.graph_of_bivector(P), s).isotropy_error() < 1e-12

    def test_gauge_of_twoform_adds(self, rng):
        w, s = rng.normal(size=(2, 3, 3))
        w, s = w - w.T, s - s.T
        np.testing.assert_allclose(dirac.as_twoform(dirac.gauge(dirac.graph_of_twoform(w), s)), w + s, atol=1e-12)

    def test_dimension_checked(self):
        with pytest.raises(DimensionMismatch):
            dirac.gauge(dirac.graph_of_bivector(np.zeros((2, 2))), np.zeros((3, 3)))


class TestImages:
    def test_backward_identity(self, rng):
        P = rng.normal(size=(3, 3))
        D = dirac.graph_of_bivector(P - P.T)
        assert dirac.backward_image(np.eye(3), D).same_as(D)

    def test_backward_along_projection(self):
        # pulling back the zero bivector along a projection is not a graph
        p = np.array([[1.0, 0, 0], [0, 1.0, 0]])
        D = dirac.backward_image(p, dirac.graph_of_bivector(np.zeros((2, 2))))
        assert D.isotropy_error() < 1e-14
        with pytest.raises(NotGraph) as info:
            dirac.as_bivector(D)
        assert info.value.intersection_dim == 1
        assert D.angle_to(Exact_to_space(Exact.graph_of_bivector([[0, 0], [0, 0]]).backward(p.astype(int).tolist()))) < 1e-12

    def test_backward_then_forward_recovers(self, rng):
        # a bivector on R^2 pulled back along a surjection and pushed forward again
        P = np.array([[0.0, 1.5], [-1.5, 0.0]])
        f = np.array([[1.0, 0.0, 2.0], [0.0, 1.0, -1.0]])
        D = dirac.graph_of_bivector(P)
        assert dirac.forward_image(f, dirac.backward_image(f, D)).same_as(D)

    def test_forward_of_graph(self, rng):
        A = rng.normal(size=(2, 4))
        P = rng.normal(size=(4, 4))
        P = P - P.T
        np.testing.assert_allclose(dirac.as_bivector(dirac.forward_image(A, dirac.graph_of_bivector(P))), A @ P @ A.T, atol=1e-10)

    def test_backward_of_twoform(self, rng):
        A = rng.normal(size=(4, 2))
        w = rng.normal(size=(4, 4))
        w = w - w.T
        np.testing.assert_allclose(dirac.as_twoform(dirac.backward_image(A, dirac.graph_of_twoform(w))), A.T @ w @ A, atol=1e-10)

    def test_shape_errors(self):
        D = dirac.graph_of_bivector(np.zeros((3, 3)))
        with pytest.raises(DimensionMismatch):
            dirac.backward_image(np.eye(2), D)
        with pytest.raises(DimensionMismatch):
            dirac.forward_image(np.eye(2), D)

    def test_product(self):
        a = dirac.graph_of_bivector(np.array([[0.0, 1.0], [-1.0, 0.0]]))
        b = dirac.graph_of_twoform(np.zeros((1, 1)))
        prod = dirac.product(a, b)
        assert prod.n == 3 and prod.isotropy_error() < 1e-15


def Exact_to_space(E):
    from dirac_oracle import as_float

    B = as_float(E)
    return dirac.DiracSpace(E.n, B)


class TestOracle:
    @pytest.mark.parametrize("seed", range(5))
    def test_random_chains_match_exact_oracle(self, seed):
        rng = np.random.default_rng(seed)
        for _ in range(20):
            D, E, desc = random_instance(rng)
            assert angle(D, E) <= 1e-8, desc

    def test_json(self):
        D = dirac.from_json({"bivector": [[0, 2], [-2, 0]]})
        np.testing.assert_allclose(dirac.as_bivector(D), [[0, 2], [-2, 0]])
        assert dirac.from_json({"twoform": [[0, 1], [-1, 0]]}).n == 2
        with pytest.raises(InputError):
            dirac.from_json({"nothing": 1})
