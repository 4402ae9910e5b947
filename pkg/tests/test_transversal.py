import numpy as np
import pytest
from hypothesis import given, strategies as st

from plab import algebra as alg, data_path, dirac, spray
from plab.fields import fd_jacobian
from plab.errors import InputError, NotGraph, NotTransversal, PointNotOnX
from plab.transversal import (
    conormal_chart,
    is_transversal_at,
    load_transversal,
    local_model,
    local_model_or_none,
    split_at,
    transversal,
    transversal_from_json,
    transversality_criteria,
)

E3 = [[0.0], [0.0], [1.0]]


@pytest.fixture
def so3_T(so3):
    return transversal(so3, [0, 0, 1], E3)


@pytest.fixture
def sl2_T(sl2):
    return load_transversal(sl2, data_path("transversals", "sl2_h.json"))


class TestConstruction:
    def test_so3_min_singular_value(self, so3_T):
        ok, smin = is_transversal_at(so3_T, [0, 0, 1])
        assert ok and smin == pytest.approx(1.0)
        assert so3_T.Lo.shape == (3, 2)
        assert np.max(np.abs(so3_T.Lo.T @ so3_T.L)) < 1e-15

    def test_so3_origin_rejected(self, so3):
        with pytest.raises(NotTransversal) as info:
            transversal(so3, [0, 0, 0], E3)
        assert info.value.min_singular_value == 0.0

    def test_abelian_proper_subspace_rejected(self):
        with pytest.raises(NotTransversal):
            transversal(alg.abelian(3), [1, 2, 3], [[1.0], [0.0], [0.0]])

    def test_abelian_whole_space_accepted(self):
        T = transversal(alg.abelian(2), [1, 1], np.eye(2))
        assert T.k == 2 and T.Lo.shape == (2, 0)

    def test_odd_codimension(self, so3):
        with pytest.raises(NotTransversal):
            transversal(so3, [0, 0, 1], [[0.0, 1.0], [0.0, 0.0], [1.0, 0.0]])

    @pytest.mark.parametrize("mu", [[0, 0, 2.0], [0, 0, -0.5]])
    def test_along_the_line(self, so3_T, mu):
        form_ok, sum_ok, smin = transversality_criteria(so3_T, mu)
        assert form_ok and sum_ok and smin == pytest.approx(abs(mu[2]))

    def test_point_off_X(self, so3_T):
        with pytest.raises(PointNotOnX):
            so3_T.coords([1.0, 0, 1])

    def test_coords_round_trip(self, so3_T):
        assert so3_T.coords(so3_T.point([0.7]))[0] == pytest.approx(0.7)

    def test_shipped_fixtures(self, so3):
        T = load_transversal(so3, data_path("transversals", "so3_e3.json"))
        assert T.k == 1
        with pytest.raises(NotTransversal):
            load_transversal(so3, data_path("transversals", "so3_origin.json"))

    @pytest.mark.parametrize("data", [{}, {"lambda": [0, 0]}, {"lambda": [0, 0, 1], "directions": [[1, 0]]}, {"lambda": "x"}])
    def test_malformed_json(self, so3, data):
        with pytest.raises(InputError):
            transversal_from_json(so3, data)


class TestSplit:
    def test_so3_blocks(self, so3_T):
        s = split_at(so3_T, [0, 0, 1])
        assert s.tangential.shape == (1, 1) and s.tangential[0, 0] == 0
        assert s.normal.shape == (2, 2)
        assert abs(s.normal[0, 1]) == pytest.approx(1.0)
        assert s.mixed_error == 0.0

    def test_sl2_dimensions(self, sl2_T):
        s = split_at(sl2_T, sl2_T.base)
        assert s.tangential.shape == (1, 1) and s.normal.shape == (2, 2)
        assert np.linalg.matrix_rank(s.normal) == 2

    def test_whole_space(self):
        T = transversal(alg.abelian(2), [0, 0], np.eye(2))
        s = split_at(T, [0.3, 0.1])
        assert s.normal.shape == (0, 0)
        assert not np.any(s.tangential)

    @given(st.floats(-3, 3).filter(lambda t: abs(1 + t) > 0.1))
    def test_reassembly(self, t):
        L = alg.so3()
        T = transversal(L, [0, 0, 1], E3)
        mu = T.point([t])
        s = split_at(T, mu)
        np.testing.assert_allclose(s.reassembled(), L.poisson_matrix(mu), atol=1e-12)
        assert s.mixed_error <= 1e-10

    def test_aff1_x_aff1_fibre(self):
        # fibre of the diagonal Frobenius pair through lambda = (0, 1, 0, 1)
        L = alg.aff1_x_aff1()
        mu = [0.0, 1.0, 0.0, 1.0]
        T = transversal(L, mu, np.array([[1.0, 0, -1, 0], [0, 1.0, 0, -1]]).T)
        assert split_at(T, mu).mixed_error < 1e-10


class TestChartAndModel:
    def test_chart_shapes(self, sl2_T):
        ch = conormal_chart(sl2_T)
        assert (ch.dim, ch.fibre_dim) == (3, 2)
        a, mu = ch.embed(ch.zero_section([0.2]))
        assert not np.any(a)
        np.testing.assert_allclose(mu, sl2_T.point([0.2]))
        assert ch.tangent_embedding.shape == (6, 3)

    def test_model_without_normal_directions(self):
        T = transversal(alg.abelian(2), [0, 0], np.eye(2))
        P = local_model(T, np.zeros((2, 2)), np.array([0.1, 0.2]))
        assert not np.any(P)

    def test_zero_section_reproduces_split(self, so3_T, sl2_T):
        for T in (so3_T, sl2_T):
            sigma = spray.omega_V_on_conormal(T)
            ch = conormal_chart(T)
            for y in (0.0, 0.3):
                e = ch.zero_section([y])
                J = fd_jacobian(spray.exp_on_chart(T), e)
                P = local_model(T, sigma, e)
                np.testing.assert_allclose(J @ P @ J.T, T.algebra.poisson_matrix(T.point([y])), atol=1e-9)

    def test_zero_form_is_not_a_graph(self, so3_T):
        e = conormal_chart(so3_T).zero_section([0.0])
        assert local_model_or_none(so3_T, np.zeros((3, 3)), e) is None
        with pytest.raises(NotGraph):
            local_model(so3_T, np.zeros((3, 3)), e)

    def test_model_is_a_dirac_graph(self, sl2_T, rng):
        sigma = spray.omega_V_on_conormal(sl2_T)
        e = rng.normal(size=3) * 0.05
        P = local_model(sl2_T, sigma, e)
        np.testing.assert_allclose(P, -P.T, atol=1e-14)
        assert dirac.graph_of_bivector(P).isotropy_error() < 1e-12
