"""Poisson elimination, convolution, collisions and the midpoint residual."""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hermvlasov import (
    GridConfig,
    HermiteBasisParams,
    NeutralityError,
    SpectralState,
    collision_coefficient,
    convolve,
    poisson_field,
)
from hermvlasov.residual import make_context, pack, residual, unpack

from oracles import dense_residual_oracle, random_neutral_state


class TestPoisson:
    def test_uniform_plasma(self):
        C = np.zeros((2, 3, 4), dtype=complex)
        C[0, 0, 0] = 1.0
        C[1, 0, 0] = 1.0
        E = poisson_field(C, charges=(-1.0, 1.0), alphas=(1.0, 1.0), L=2 * math.pi)
        np.testing.assert_array_equal(E, np.zeros(4, dtype=complex))

    def test_two_species_cancellation(self):
        rng = np.random.default_rng(0)
        C = np.zeros((2, 2, 5), dtype=complex)
        row = rng.normal(size=5) + 1j * rng.normal(size=5)
        row[0] = row[0].real
        C[0, 0] = row
        C[1, 0] = 2.0 * row  # alpha ratio compensates the charge below
        E = poisson_field(C, charges=(-1.0, 1.0), alphas=(1.0, 0.5), L=5.0)
        np.testing.assert_allclose(E, 0.0, atol=1e-15)

    def test_single_mode_value(self):
        # L = 2 pi, k = 1: E_1 = -i q alpha C[0,1]
        C = np.zeros((1, 1, 2), dtype=complex)
        C[0, 0, 1] = 0.3 + 0.1j
        E = poisson_field(C, charges=(2.0,), alphas=(0.5,), L=2 * math.pi,
                          check_neutrality=False)
        assert E[1] == pytest.approx(-1j * 2.0 * 0.5 * (0.3 + 0.1j), rel=1e-14)
        assert E[0] == 0.0

    def test_neutrality_violation(self):
        C = np.zeros((1, 1, 2), dtype=complex)
        C[0, 0, 0] = 1.0
        with pytest.raises(NeutralityError):
            poisson_field(C, charges=(1.0,), alphas=(1.0,), L=1.0)
        # suppressed check must not raise
        poisson_field(C, charges=(1.0,), alphas=(1.0,), L=1.0, check_neutrality=False)


class TestConvolve:
    def test_delta_at_zero(self):
        rng = np.random.default_rng(1)
        a = rng.normal(size=4) + 1j * rng.normal(size=4)
        a[0] = a[0].real
        b = np.zeros(4, dtype=complex)
        b[0] = 0.7
        np.testing.assert_allclose(convolve(a, b), 0.7 * a, rtol=1e-14)

    def test_hand_computed(self):
        # a = delta_{k,1}, b = delta_{k,1}: output at k=2 is 1,
        # at k=0 the conjugate pairing gives a_{-1} b_{1} + a_{1} b_{-1} = 2
        a = np.zeros(3, dtype=complex)
        a[1] = 1.0
        out = convolve(a, a)
        np.testing.assert_allclose(out, [2.0, 0.0, 1.0], atol=1e-15)

    def test_matches_numpy_convolve(self):
        rng = np.random.default_rng(2)
        for _ in range(5):
            a = rng.normal(size=6) + 1j * rng.normal(size=6)
            b = rng.normal(size=6) + 1j * rng.normal(size=6)
            a[0] = a[0].real
            b[0] = b[0].real
            Nx = 5
            af = np.concatenate([np.conj(a[:0:-1]), a])
            bf = np.concatenate([np.conj(b[:0:-1]), b])
            full = np.convolve(af, bf)
            expected = full[2 * Nx : 3 * Nx + 1]
            np.testing.assert_allclose(convolve(a, b), expected, rtol=1e-13)

    @settings(max_examples=30, deadline=None)
    @given(seed=st.integers(0, 10_000))
    def test_linearity(self, seed):
        rng = np.random.default_rng(seed)
        a, b1, b2 = (rng.normal(size=5) + 1j * rng.normal(size=5) for _ in range(3))
        lhs = convolve(a, b1 + b2)
        rhs = convolve(a, b1) + convolve(a, b2)
        np.testing.assert_allclose(lhs, rhs, atol=1e-14)


class TestCollision:
    def test_first_three_modes_untouched(self):
        for n in (0, 1, 2):
            assert collision_coefficient(n, 10, 3.7) == 0.0

    def test_mode_three(self):
        assert collision_coefficient(3, 10, 1.0) == pytest.approx(-1.0 / 84.0, rel=1e-15)

    def test_top_mode(self):
        # n = Nv reduces to -nu * Nv / (Nv - 3)
        for Nv in (10, 25):
            assert collision_coefficient(Nv, Nv, 1.0) == pytest.approx(
                -Nv / (Nv - 3.0), rel=1e-14
            )

    def test_config_guard(self):
        with pytest.raises(ValueError):
            collision_coefficient(2, 3, 1.0)


def _make_ctx(rng, Nv=6, Nx=3, nu=1.3, dt=0.05):
    cfg = GridConfig(L=2 * math.pi, Nv=Nv, Nx=Nx, dt=dt, t_final=1.0, nu=nu)
    state = random_neutral_state(rng, Nv, Nx)
    return make_context(state, cfg), state


def _random_candidate(rng, shape):
    cand = rng.normal(size=shape) + 1j * rng.normal(size=shape)
    cand[..., 0] = cand[..., 0].real
    return cand


class TestResidual:
    def test_uniform_equilibrium_is_zero(self):
        cfg = GridConfig(L=2 * math.pi, Nv=8, Nx=3, dt=0.05, t_final=1.0, nu=2.0)
        shape = (2, 9, 4)
        C = np.zeros(shape, dtype=complex)
        C[0, 0, 0] = 1.0
        C[1, 0, 0] = 2.0  # alpha 0.5 below makes the state neutral
        state = SpectralState(
            coeffs=[C[0], C[1]],
            basis=[HermiteBasisParams(1.0, 0.7), HermiteBasisParams(0.5, -0.2)],
            efield=np.zeros(4, dtype=complex),
            time=0.0,
            L=cfg.L,
            charges=(-1.0, 1.0),
            masses=(1.0, 2.0),
        )
        ctx = make_context(state, cfg)
        res = residual(ctx, C.copy())
        np.testing.assert_array_equal(res, np.zeros(shape, dtype=complex))

    def test_mass_row(self):
        rng = np.random.default_rng(17)
        ctx, state = _make_ctx(rng, dt=0.05)
        cand = _random_candidate(rng, ctx.prev.shape)
        res = residual(ctx, cand)
        for s in range(2):
            expected = (cand[s, 0, 0] - ctx.prev[s, 0, 0]) / 0.05
            assert res[s, 0, 0] == pytest.approx(expected, rel=1e-14)

    def test_matches_dense_oracle(self):
        rng = np.random.default_rng(42)
        ctx, state = _make_ctx(rng)
        worst = 0.0
        for _ in range(20):
            cand = _random_candidate(rng, ctx.prev.shape)
            r_fast = residual(ctx, cand)
            r_dense = dense_residual_oracle(ctx, cand)
            worst = max(worst, float(np.max(np.abs(r_fast - r_dense))))
        assert worst < 1e-13

    def test_truncation_closure(self):
        # embedding the same data in a larger-Nv system with a zero top row
        # reproduces the smaller system's rows (collisionless comparison)
        rng = np.random.default_rng(3)
        cfg_small = GridConfig(L=2 * math.pi, Nv=5, Nx=3, dt=0.05, t_final=1.0, nu=0.0)
        state = random_neutral_state(rng, 5, 3)
        ctx_small = make_context(state, cfg_small)
        cand = _random_candidate(rng, ctx_small.prev.shape)

        cfg_big = GridConfig(L=2 * math.pi, Nv=6, Nx=3, dt=0.05, t_final=1.0, nu=0.0)
        big = random_neutral_state(rng, 6, 3)
        for s in range(2):
            big.coeffs[s][:] = 0.0
            big.coeffs[s][:6] = state.coeffs[s]
        big.basis = state.basis
        big.efield = state.efield
        ctx_big = make_context(big, cfg_big)
        cand_big = np.zeros_like(ctx_big.prev)
        cand_big[:, :6, :] = cand

        res_small = residual(ctx_small, cand)
        res_big = residual(ctx_big, cand_big)
        np.testing.assert_allclose(res_big[:, :5, :], res_small[:, :5, :], atol=1e-15)

    def test_collision_leaves_low_modes(self):
        rng = np.random.default_rng(8)
        ctx_coll, state = _make_ctx(rng, nu=4.0)
        cfg_free = GridConfig(
            L=2 * math.pi, Nv=6, Nx=3, dt=0.05, t_final=1.0, nu=0.0
        )
        ctx_free = make_context(state, cfg_free)
        cand = _random_candidate(rng, ctx_coll.prev.shape)
        r_coll = residual(ctx_coll, cand)
        r_free = residual(ctx_free, cand)
        np.testing.assert_array_equal(r_coll[:, :3, :], r_free[:, :3, :])
        assert np.max(np.abs(r_coll[:, 3:, :] - r_free[:, 3:, :])) > 0.0

    def test_dimension_mismatch(self):
        rng = np.random.default_rng(1)
        ctx, _ = _make_ctx(rng)
        with pytest.raises(ValueError):
            residual(ctx, np.zeros((2, 3, 4), dtype=complex))

    def test_neutrality_propagates(self):
        rng = np.random.default_rng(1)
        cfg = GridConfig(L=2 * math.pi, Nv=6, Nx=3, dt=0.05, t_final=1.0)
        state = random_neutral_state(rng, 6, 3)
        state.coeffs[0][0, 0] += 1.0  # break neutrality
        with pytest.raises(NeutralityError):
            make_context(state, cfg)


class TestPacking:
    @settings(max_examples=20, deadline=None)
    @given(seed=st.integers(0, 10_000))
    def test_round_trip(self, seed):
        rng = np.random.default_rng(seed)
        C = rng.normal(size=(3, 5, 4)) + 1j * rng.normal(size=(3, 5, 4))
        C[..., 0] = C[..., 0].real
        x = pack(C)
        assert x.shape == (3 * 5 * 7,)
        np.testing.assert_array_equal(unpack(x, 3, 4, 3), C)

    def test_layout_is_species_major(self):
        C = np.zeros((2, 2, 2), dtype=complex)
        C[0, 0, 0] = 1.0
        C[1, 1, 1] = 2.0 + 3.0j
        x = pack(C)
        assert x[0] == 1.0  # species 0, n=0, k=0 real
        assert x[-2] == 2.0 and x[-1] == 3.0  # last slot: species 1, n=1, k=1
