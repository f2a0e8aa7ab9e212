import numpy as np
import pytest

from bdris.errors import DegenerateChannelError, InvalidInputError
from bdris.linalg import dominant_svd, spectral_norm
from bdris.mimo import alternating_design, design_fc_no_direct, init_lower_bounds
from bdris.synthesis import received_power, synthesize_group


def random_matrix(rng, shape):
    return rng.standard_normal(shape) + 1j * rng.standard_normal(shape)


class TestDesignFcNoDirect:
    def test_siso_reduction(self):
        rng = np.random.default_rng(0)
        h_ri = random_matrix(rng, (1, 8))
        h_it = random_matrix(rng, (8, 1))
        rep = design_fc_no_direct(h_ri, h_it, p_t=2.0)
        sm = synthesize_group(0.0, h_ri.ravel(), h_it.ravel(), 8)
        p_siso = received_power(0.0, h_ri.ravel(), h_it.ravel(), sm, p_t=2.0)
        assert rep.power == pytest.approx(p_siso, rel=1e-12)

    def test_rank_one_channels(self):
        rng = np.random.default_rng(1)
        a = random_matrix(rng, 3)
        b = random_matrix(rng, 16)
        c = random_matrix(rng, 16)
        d = random_matrix(rng, 3)
        h_ri = np.outer(a, b)
        h_it = np.outer(c, d)
        rep = design_fc_no_direct(h_ri, h_it, p_t=1.0)
        sole = (np.linalg.norm(a) * np.linalg.norm(b) * np.linalg.norm(c) * np.linalg.norm(d)) ** 2
        assert rep.bound == pytest.approx(sole, rel=1e-12)
        assert rep.power == pytest.approx(rep.bound, rel=1e-9)

    def test_random_4x32x4(self):
        rng = np.random.default_rng(2)
        h_ri = random_matrix(rng, (4, 32))
        h_it = random_matrix(rng, (32, 4))
        rep = design_fc_no_direct(h_ri, h_it, p_t=1.0)
        ratio = rep.power / rep.bound
        assert 1.0 - 1e-9 <= ratio <= 1.0 + 1e-12
        assert rep.bound == pytest.approx(
            spectral_norm(h_ri) ** 2 * spectral_norm(h_it) ** 2, rel=1e-12
        )

    def test_cosine_similarity_is_one(self):
        rng = np.random.default_rng(3)
        h_ri = random_matrix(rng, (2, 16))
        h_it = random_matrix(rng, (16, 2))
        rep = design_fc_no_direct(h_ri, h_it)
        v_ri = dominant_svd(h_ri).v
        u_it = dominant_svd(h_it).u
        rho = abs(v_ri.conj() @ rep.theta.blocks[0] @ u_it) ** 2
        assert rho == pytest.approx(1.0, abs=1e-10)

    def test_beamformers_unit_norm(self):
        rng = np.random.default_rng(4)
        rep = design_fc_no_direct(random_matrix(rng, (3, 8)), random_matrix(rng, (8, 2)))
        assert np.linalg.norm(rep.pair.w) == pytest.approx(1.0, abs=1e-12)
        assert np.linalg.norm(rep.pair.g) == pytest.approx(1.0, abs=1e-12)

    def test_zero_channel_rejected(self):
        with pytest.raises(DegenerateChannelError):
            design_fc_no_direct(np.zeros((2, 4)), np.ones((4, 2)))


class TestInitLowerBounds:
    def test_no_direct_link_conventions(self):
        rng = np.random.default_rng(5)
        h_ri = random_matrix(rng, (2, 8))
        h_it = random_matrix(rng, (8, 2))
        h_rt = np.zeros((2, 2), dtype=complex)
        init = init_lower_bounds(h_rt, h_ri, h_it, 2, p_t=1.0)
        # direct-start formula with the basis-vector convention for the
        # undefined singular pair of the zero matrix
        h_r = h_ri[0]
        h_t = h_it[:, 0]
        expected_dir = sum(
            np.linalg.norm(h_r[2 * g : 2 * g + 2]) * np.linalg.norm(h_t[2 * g : 2 * g + 2])
            for g in range(4)
        ) ** 2
        assert init.p_dir == pytest.approx(expected_dir, rel=1e-12)
        assert init.chosen == ("dir" if init.p_dir >= init.p_refl else "refl")

    def test_fully_connected_reflected_bound(self):
        rng = np.random.default_rng(6)
        h_ri = random_matrix(rng, (2, 16))
        h_it = random_matrix(rng, (16, 2))
        init = init_lower_bounds(np.zeros((2, 2)), h_ri, h_it, 16, p_t=2.0)
        expected = 2.0 * spectral_norm(h_ri) ** 2 * spectral_norm(h_it) ** 2
        assert init.p_refl == pytest.approx(expected, rel=1e-12)

    def test_lower_bounds_final_power(self):
        rng = np.random.default_rng(7)
        for seed in range(5):
            rng = np.random.default_rng(100 + seed)
            h_rt = random_matrix(rng, (2, 2))
            h_ri = random_matrix(rng, (2, 8))
            h_it = random_matrix(rng, (8, 2))
            init = init_lower_bounds(h_rt, h_ri, h_it, 4)
            rep = alternating_design(h_rt, h_ri, h_it, 4)
            assert rep.power >= max(init.p_dir, init.p_refl) * (1 - 1e-12)


class TestAlternatingDesign:
    def test_no_direct_fully_connected_converges_fast(self):
        rng = np.random.default_rng(8)
        h_ri = random_matrix(rng, (2, 16))
        h_it = random_matrix(rng, (16, 2))
        closed = design_fc_no_direct(h_ri, h_it)
        rep = alternating_design(np.zeros((2, 2)), h_ri, h_it, 16)
        assert rep.converged and rep.iterations <= 2
        assert rep.power == pytest.approx(closed.power, rel=1e-9)

    def test_scalar_reduction(self):
        rng = np.random.default_rng(9)
        h_rt = random_matrix(rng, (1, 1))
        h_ri = random_matrix(rng, (1, 8))
        h_it = random_matrix(rng, (8, 1))
        rep = alternating_design(h_rt, h_ri, h_it, 2, p_t=3.0)
        sm = synthesize_group(complex(h_rt[0, 0]), h_ri.ravel(), h_it.ravel(), 2)
        p_siso = received_power(complex(h_rt[0, 0]), h_ri.ravel(), h_it.ravel(), sm, p_t=3.0)
        assert rep.power == pytest.approx(p_siso, rel=1e-12)

    def test_property_run(self):
        for seed in range(20):
            rng = np.random.default_rng(1000 + seed)
            h_rt = random_matrix(rng, (2, 2))
            h_ri = random_matrix(rng, (2, 16))
            h_it = random_matrix(rng, (16, 2))
            rep = alternating_design(h_rt, h_ri, h_it, 4, epsilon=1e-6)
            trace = np.array(rep.power_trace)
            assert np.all(np.diff(trace) >= -1e-12 * trace[:-1])
            assert rep.power >= rep.lower_bound * (1 - 1e-12)
            assert rep.power <= rep.bound * (1 + 1e-9)
            sym, uni = rep.theta.constraint_residuals()
            assert max(sym, uni) <= 1e-10

    def test_iteration_cap_reports_not_converged(self):
        rng = np.random.default_rng(10)
        h_rt = random_matrix(rng, (2, 2))
        h_ri = random_matrix(rng, (2, 8))
        h_it = random_matrix(rng, (8, 2))
        rep = alternating_design(h_rt, h_ri, h_it, 2, max_iters=1)
        assert not rep.converged
        assert rep.iterations == 1

    def test_invalid_epsilon(self):
        with pytest.raises(InvalidInputError):
            alternating_design(np.zeros((1, 1)), np.ones((1, 2)), np.ones((2, 1)), 1, epsilon=0.0)
