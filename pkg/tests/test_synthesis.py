import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from bdris.baselines import single_connected_design
from bdris.channel import transmissive_mask
from bdris.errors import (
    DegenerateChannelError,
    InternalConsistencyError,
    InvalidInputError,
)
from bdris.synthesis import (
    EPS_RANK,
    ScatteringMatrix,
    build_T,
    build_quadform,
    received_power,
    synthesize_block,
    synthesize_blocks,
    synthesize_group,
    upper_bounds,
    verify_propositions,
)

# frozen from the closed-form first column at delta = (2, -0.5, -1.5):
# entries (sqrt(1.5/3.5), 0, sqrt(2/3.5))
T1_N3 = (0.6546536707079771, 0.0, 0.7559289460184544)


def random_pair(rng, n):
    h_ri = rng.standard_normal(n) + 1j * rng.standard_normal(n)
    h_it = rng.standard_normal(n) + 1j * rng.standard_normal(n)
    return h_ri, h_it


def unit(v):
    return v / np.linalg.norm(v)


class TestBuildQuadform:
    def test_dependent_channels_zero_matrix(self):
        rng = np.random.default_rng(0)
        h = rng.standard_normal(4) + 1j * rng.standard_normal(4)
        qf = build_quadform(h, 2.5j * h)
        assert np.abs(qf.a).max() <= 1e-14

    def test_generic_n5_structure(self):
        rng = np.random.default_rng(1)
        h_ri, h_it = random_pair(rng, 5)
        qf = build_quadform(h_ri, h_it)
        assert np.array_equal(qf.a, qf.a.T)  # exactly symmetric by construction
        scale = np.abs(qf.delta).max()
        assert abs(np.trace(qf.a)) <= 1e-10 * scale
        assert int((np.abs(qf.delta) > EPS_RANK * scale).sum()) == 4
        assert int((qf.delta > EPS_RANK * scale).sum()) == 2
        assert int((qf.delta < -EPS_RANK * scale).sum()) == 2

    def test_generic_n3_full_rank(self):
        rng = np.random.default_rng(2)
        h_ri, h_it = random_pair(rng, 3)
        qf = build_quadform(h_ri, h_it)
        scale = np.abs(qf.delta).max()
        assert int((np.abs(qf.delta) > EPS_RANK * scale).sum()) == 3
        assert abs(qf.delta.sum()) <= 1e-10 * scale

    def test_zero_channel_rejected(self):
        with pytest.raises(DegenerateChannelError):
            build_quadform(np.zeros(3), np.ones(3))


class TestBuildT:
    def test_n2_exact(self):
        t = build_T([1.0, -1.0])
        h = math.sqrt(0.5)
        assert np.allclose(t, [[h, h], [h, -h]], atol=1e-15)

    def test_n3_first_column(self):
        t = build_T([2.0, -0.5, -1.5])
        assert np.allclose(t[:, 0], T1_N3, atol=1e-15)

    def test_n6_random_valid_spectrum(self):
        rng = np.random.default_rng(3)
        h_ri, h_it = random_pair(rng, 6)
        delta = build_quadform(h_ri, h_it).delta
        t = build_T(delta)
        assert np.abs(t.T @ t - np.eye(6)).max() <= 1e-10
        for col in t.T:
            assert abs(col @ (delta * col)) <= 1e-9

    def test_degenerate_pair_pattern(self):
        delta = np.array([2.0, 0.0, 0.0, -2.0])
        t = build_T(delta)
        assert np.abs(t.T @ t - np.eye(4)).max() <= 1e-12
        for col in t.T:
            assert abs(col @ (delta * col)) <= 1e-12

    def test_degenerate_triple_pattern(self):
        delta = np.array([3.0, 0.0, 0.0, -1.0, -2.0])
        t = build_T(delta)
        assert np.abs(t.T @ t - np.eye(5)).max() <= 1e-12
        for col in t.T:
            assert abs(col @ (delta * col)) <= 1e-12

    def test_all_zero_gives_identity(self):
        assert np.array_equal(build_T(np.zeros(4)), np.eye(4))

    def test_no_sign_change_rejected(self):
        with pytest.raises(InternalConsistencyError):
            build_T([3.0, 2.0, 1.0])

    def test_unsorted_rejected(self):
        with pytest.raises(InvalidInputError):
            build_T([1.0, 2.0, -3.0])

    def test_excess_signs_rejected(self):
        with pytest.raises(InternalConsistencyError):
            build_T([3.0, 2.0, 1.0, -1.0, -2.0, -3.0])


class TestSynthesizeBlock:
    def test_single_element_phase(self):
        h_ri = np.array([0.8 * np.exp(0.3j)])
        h_it = np.array([1.5 * np.exp(-1.1j)])
        th = synthesize_block(h_ri, h_it)
        expected = np.exp(1j * (-0.3 + 1.1))
        assert th.shape == (1, 1)
        assert abs(th[0, 0] - expected) <= 1e-14

    def test_dependent_channels_diagonal_branch(self):
        rng = np.random.default_rng(4)
        h = rng.standard_normal(5) + 1j * rng.standard_normal(5)
        th = synthesize_block(h, (0.5 - 2j) * h)
        assert np.abs(th - np.diag(np.diag(th))).max() == 0.0
        assert abs(unit(h) @ th @ unit((0.5 - 2j) * h)) == pytest.approx(1.0, abs=1e-10)

    def test_random_n8_meets_cauchy_schwarz(self):
        rng = np.random.default_rng(5)
        h_ri, h_it = random_pair(rng, 8)
        th = synthesize_block(h_ri, h_it)
        assert abs(unit(h_ri) @ th @ unit(h_it)) == pytest.approx(1.0, abs=1e-10)

    def test_zero_channel_rejected(self):
        with pytest.raises(DegenerateChannelError):
            synthesize_block(np.zeros(4), np.ones(4))

    @settings(max_examples=40, deadline=None)
    @given(st.integers(0, 2**32 - 1), st.integers(1, 12))
    def test_invariants(self, seed, n):
        rng = np.random.default_rng(seed)
        h_ri, h_it = random_pair(rng, n)
        batch = synthesize_blocks(unit(h_ri)[None], unit(h_it)[None])
        th = batch.theta[0]
        assert np.abs(th - th.T).max() <= 1e-10
        assert np.abs(th.conj().T @ th - np.eye(n)).max() <= 1e-10
        # cascade gain is 1 with phase zero before any direct-link lift
        assert batch.unit_gain[0].real == pytest.approx(1.0, abs=1e-10)
        assert abs(batch.unit_gain[0].imag) <= 1e-10
        # forward/backward image magnitudes match entrywise
        fwd = unit(h_ri) @ batch.v[0]
        bwd = batch.v[0].T @ unit(h_it)
        assert np.abs(np.abs(fwd) - np.abs(bwd)).max() <= 1e-9

    @settings(max_examples=25, deadline=None)
    @given(
        st.integers(0, 2**32 - 1),
        st.floats(-math.pi, math.pi),
        st.floats(-math.pi, math.pi),
    )
    def test_global_phase_covariance(self, seed, alpha, beta):
        rng = np.random.default_rng(seed)
        h_ri, h_it = random_pair(rng, 6)
        base = received_power(0.0, h_ri, h_it, synthesize_block(h_ri, h_it))
        rot = received_power(
            0.0,
            h_ri * np.exp(1j * alpha),
            h_it * np.exp(1j * beta),
            synthesize_block(h_ri * np.exp(1j * alpha), h_it * np.exp(1j * beta)),
        )
        assert rot == pytest.approx(base, rel=1e-12)

    def test_real_channel_rank_deficient_form(self):
        rng = np.random.default_rng(6)
        h_ri = rng.standard_normal(7).astype(complex)
        h_it = rng.standard_normal(7) + 1j * rng.standard_normal(7)
        th = synthesize_block(h_ri, h_it)
        assert abs(unit(h_ri) @ th @ unit(h_it)) == pytest.approx(1.0, abs=1e-10)
        assert np.abs(th.conj().T @ th - np.eye(7)).max() <= 1e-10


class TestSynthesizeGroup:
    def test_fully_connected_reduces_to_block(self):
        rng = np.random.default_rng(7)
        h_ri, h_it = random_pair(rng, 6)
        sm = synthesize_group(0.0, h_ri, h_it, 6)
        p = received_power(0.0, unit(h_ri), unit(h_it), sm)
        assert p == pytest.approx(1.0, abs=1e-10)

    def test_single_group_matches_diagonal_design(self):
        rng = np.random.default_rng(8)
        h_rt = rng.standard_normal() + 1j * rng.standard_normal()
        h_ri, h_it = random_pair(rng, 8)
        sm = synthesize_group(h_rt, h_ri, h_it, 1)
        _, p_sc = single_connected_design(h_rt, h_ri, h_it, p_t=3.0)
        p = received_power(h_rt, h_ri, h_it, sm, p_t=3.0)
        assert p == pytest.approx(p_sc, rel=1e-12)

    def test_group_power_formula(self):
        rng = np.random.default_rng(9)
        h_rt = rng.standard_normal() + 1j * rng.standard_normal()
        h_ri, h_it = random_pair(rng, 8)
        p_t = 2.5
        sm = synthesize_group(h_rt, h_ri, h_it, 2)
        p = received_power(h_rt, h_ri, h_it, sm, p_t=p_t)
        norm_sum = sum(
            np.linalg.norm(h_ri[2 * g : 2 * g + 2]) * np.linalg.norm(h_it[2 * g : 2 * g + 2])
            for g in range(4)
        )
        assert p == pytest.approx(p_t * (abs(h_rt) + norm_sum) ** 2, rel=1e-12)

    def test_masked_channels_identity_blocks(self):
        rng = np.random.default_rng(10)
        h_ri, h_it = random_pair(rng, 4)
        h_ri_m, h_it_m = transmissive_mask(h_ri[None, :], h_it[:, None])
        h_ri_m, h_it_m = h_ri_m.ravel(), h_it_m.ravel()
        sm = synthesize_group(0.3 + 0.4j, h_ri_m, h_it_m, 1)
        # per-element groups straddle the masked sector: zero gain, valid blocks
        p = received_power(0.3 + 0.4j, h_ri_m, h_it_m, sm)
        assert p == pytest.approx(abs(0.3 + 0.4j) ** 2, rel=1e-12)
        sym, uni = sm.constraint_residuals()
        assert max(sym, uni) <= 1e-10

    def test_bad_group_size(self):
        with pytest.raises(InvalidInputError):
            synthesize_group(0.0, np.ones(6), np.ones(6), 4)

    @settings(max_examples=25, deadline=None)
    @given(st.integers(0, 2**32 - 1), st.sampled_from([(4, 2), (8, 4), (8, 1), (12, 3)]))
    def test_bound_achievement(self, seed, size):
        n, n_g = size
        rng = np.random.default_rng(seed)
        h_rt = rng.standard_normal() + 1j * rng.standard_normal()
        h_ri, h_it = random_pair(rng, n)
        sm = synthesize_group(h_rt, h_ri, h_it, n_g)
        p = received_power(h_rt, h_ri, h_it, sm)
        ub = upper_bounds(h_rt, h_ri, h_it, n_g)
        assert abs(ub.group - p) <= 1e-9 * ub.group


class TestReceivedPowerAndBounds:
    def test_identity_unit_vectors(self):
        h_ri = np.zeros(3, dtype=complex)
        h_ri[0] = 1.0
        h_it = np.zeros(3, dtype=complex)
        h_it[0] = 1.0
        assert received_power(0.0, h_ri, h_it, np.eye(3)) == pytest.approx(1.0, abs=1e-15)

    def test_direct_only(self):
        h_rt = 1.5 - 0.5j
        p = received_power(h_rt, np.zeros(4), np.ones(4), np.eye(4), p_t=2.0)
        assert p == pytest.approx(2.0 * abs(h_rt) ** 2, rel=1e-14)

    def test_scattering_matrix_and_dense_agree(self):
        rng = np.random.default_rng(11)
        h_rt = rng.standard_normal() + 1j * rng.standard_normal()
        h_ri, h_it = random_pair(rng, 6)
        sm = synthesize_group(h_rt, h_ri, h_it, 2)
        p_blocks = received_power(h_rt, h_ri, h_it, sm)
        p_dense = received_power(h_rt, h_ri, h_it, sm.dense())
        assert p_blocks == pytest.approx(p_dense, rel=1e-13)

    def test_single_element_bounds_coincide(self):
        ub = upper_bounds(0.2 + 0.1j, np.array([1.0 + 1j]), np.array([2.0 - 1j]), 1)
        assert ub.single == pytest.approx(ub.group, rel=1e-15)
        assert ub.group == pytest.approx(ub.fully, rel=1e-15)

    def test_fully_connected_formula(self):
        rng = np.random.default_rng(12)
        h_rt = rng.standard_normal() + 1j * rng.standard_normal()
        h_ri, h_it = random_pair(rng, 5)
        ub = upper_bounds(h_rt, h_ri, h_it, 1, p_t=4.0)
        expected = 4.0 * (abs(h_rt) + np.linalg.norm(h_ri) * np.linalg.norm(h_it)) ** 2
        assert ub.fully == pytest.approx(expected, rel=1e-14)

    @settings(max_examples=30, deadline=None)
    @given(st.integers(0, 2**32 - 1))
    def test_nesting(self, seed):
        # monotone along nested refinement chains (each group a union of
        # smaller ones); incomparable groupings like 2 vs 3 are not ordered
        rng = np.random.default_rng(seed)
        h_rt = rng.standard_normal() + 1j * rng.standard_normal()
        h_ri, h_it = random_pair(rng, 12)
        for chain in ((1, 2, 4, 12), (1, 3, 6, 12)):
            bounds = [upper_bounds(h_rt, h_ri, h_it, g).group for g in chain]
            for small, large in zip(bounds[:-1], bounds[1:]):
                assert small <= large * (1 + 1e-12)
        ub = upper_bounds(h_rt, h_ri, h_it, 3)
        assert ub.single <= ub.group * (1 + 1e-12) <= ub.fully * (1 + 1e-12) ** 2


class TestScatteringMatrix:
    def test_dense_blocks_layout(self):
        blocks = (np.full((2, 2), 1j), np.full((2, 2), 2.0 + 0j))
        sm = ScatteringMatrix(blocks=blocks, group_size=2)
        dense = sm.dense()
        assert dense.shape == (4, 4)
        assert np.all(dense[:2, 2:] == 0) and np.all(dense[2:, :2] == 0)
        assert np.array_equal(dense[:2, :2], blocks[0])

    def test_apply_matches_dense(self):
        rng = np.random.default_rng(13)
        h_ri, h_it = random_pair(rng, 6)
        sm = synthesize_group(0.0, h_ri, h_it, 3)
        direct = h_ri @ sm.dense() @ h_it
        assert abs(sm.apply(h_ri, h_it) - direct) <= 1e-12 * abs(direct)


class TestVerifyPropositions:
    def test_n2_opposite_eigenvalues(self):
        rng = np.random.default_rng(14)
        qf = build_quadform(*random_pair(rng, 2))
        rep = verify_propositions(qf)
        assert rep.ok
        assert qf.delta[1] == pytest.approx(-qf.delta[0], abs=1e-12 * abs(qf.delta[0]))

    def test_n3_sum_rule(self):
        rng = np.random.default_rng(15)
        qf = build_quadform(*random_pair(rng, 3))
        rep = verify_propositions(qf)
        assert rep.ok and rep.rank == 3
        d = qf.delta
        assert d[1] == pytest.approx(-d[0] - d[2], abs=1e-12 * np.abs(d).max())

    def test_n4_positive_determinant(self):
        rng = np.random.default_rng(16)
        qf = build_quadform(*random_pair(rng, 4))
        rep = verify_propositions(qf)
        assert rep.ok and rep.det_positive is True
        assert np.linalg.det(qf.a) > 0

    def test_n10_sweep(self):
        rng = np.random.default_rng(17)
        for _ in range(100):
            qf = build_quadform(*random_pair(rng, 10))
            rep = verify_propositions(qf)
            assert rep.ok
            assert rep.rank == 4 and rep.sign_pattern == (2, 2) and rep.weyl_ok
