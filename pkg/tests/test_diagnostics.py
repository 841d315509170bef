"""Conserved-quantity formulas, extrema and L2 errors."""

import math

import numpy as np
import pytest

from hermvlasov import (
    GridConfig,
    HermiteBasisParams,
    SpectralState,
    f_extrema,
    kinetic_energy,
    l2_error,
    mass,
    momentum,
    potential_energy,
    reconstruct_f,
    two_stream_init,
)
from hermvlasov.diagnostics import field_l2_norm, momentum_species

CFG = GridConfig(L=2 * math.pi, Nv=12, Nx=4, dt=0.05, t_final=1.0)


def _beam_state(u=1.0, alpha=0.5, n0=0.5, m=1.0, Nv=6, Nx=3, L=2 * math.pi):
    C = np.zeros((Nv + 1, Nx + 1), dtype=complex)
    C[0, 0] = n0 / alpha
    return SpectralState(
        coeffs=[C],
        basis=[HermiteBasisParams(alpha, u)],
        efield=np.zeros(Nx + 1, dtype=complex),
        time=0.0,
        L=L,
        charges=(-1.0,),
        masses=(m,),
    )


class TestMoments:
    def test_beam_mass_is_pi(self):
        state = _beam_state()
        assert mass(state, 0) == pytest.approx(math.pi, rel=1e-14)

    def test_zero_state(self):
        state = _beam_state(n0=0.0)
        assert mass(state, 0) == 0.0
        assert momentum(state) == 0.0
        assert kinetic_energy(state, 0) == 0.0

    def test_single_beam_momentum(self):
        state = _beam_state(u=1.0)
        assert momentum(state) == pytest.approx(math.pi, rel=1e-14)

    def test_two_stream_total_momentum_vanishes(self):
        state = two_stream_init(CFG)
        assert momentum(state) == pytest.approx(0.0, abs=1e-14)
        # per-beam momenta are opposite
        assert momentum_species(state, 0) == pytest.approx(
            -momentum_species(state, 1), rel=1e-14
        )

    def test_beam_kinetic_energy(self):
        state = _beam_state(u=1.0, alpha=0.5)
        expected = (math.pi / 2.0) * (1.0 + 0.5**2 / 2.0)
        assert kinetic_energy(state, 0) == pytest.approx(expected, rel=1e-14)


class TestPotentialEnergy:
    def test_zero_field(self):
        assert potential_energy(_beam_state()) == 0.0

    def test_parseval_matches_grid_quadrature(self):
        rng = np.random.default_rng(6)
        state = _beam_state(Nx=5)
        E = rng.normal(size=6) + 1j * rng.normal(size=6)
        E[0] = 0.0
        state.efield = E
        # midpoint-rule quadrature of (1/2) int E(x)^2 dx on 1024 points
        x = np.linspace(0, state.L, 1024, endpoint=False)
        k = np.arange(6)
        phases = np.exp(2j * np.pi / state.L * np.outer(x, k))
        Ex = (phases @ E).real + (np.conj(phases[:, 1:]) @ np.conj(E[1:])).real
        quad = 0.5 * np.sum(Ex**2) * state.L / 1024
        assert potential_energy(state) == pytest.approx(quad, rel=1e-10)
        assert field_l2_norm(state) == pytest.approx(math.sqrt(2 * quad), rel=1e-10)


class TestExtrema:
    def test_two_stream_initial_peak(self):
        state = two_stream_init(CFG)
        fmin, fmax = f_extrema(state, [0, 1])
        # beam peak n0/(sqrt(pi) alpha) (1 + eps/2) plus the opposing tail
        expected = 0.5 / (math.sqrt(math.pi) * 0.5) * (1.0 + 5e-4)
        assert fmax == pytest.approx(expected, abs=2e-4)
        assert abs(fmin) < 1e-6

    def test_single_maxwellian_nonnegative(self):
        state = _beam_state()
        fmin, fmax = f_extrema(state, 0, window=(-6, 6))
        assert fmin >= 0.0
        assert fmax == pytest.approx(0.5 / (math.sqrt(math.pi) * 0.5), rel=1e-3)


class TestL2Error:
    def test_self_reference_is_zero(self):
        state = two_stream_init(CFG)

        def ref(x, v):
            return reconstruct_f(state, 0, x, v)

        assert l2_error(state, 0, ref) == 0.0

    def test_known_perturbation(self):
        state = _beam_state()
        xi_fn = lambda v: (v - 1.0) / 0.5

        def ref(x, v):
            base = 0.5 / (0.5 * math.sqrt(math.pi)) * np.exp(-xi_fn(v) ** 2)
            return np.broadcast_to(base, (len(x), len(v))).copy()

        assert l2_error(state, 0, ref) == pytest.approx(0.0, abs=1e-12)
        # doubling the reference amplitude gives relative error 1/2
        def ref2(x, v):
            return 2.0 * ref(x, v)

        assert l2_error(state, 0, ref2) == pytest.approx(0.5, rel=1e-10)

    def test_absolute_variant(self):
        state = _beam_state()

        def zero_ref(x, v):
            return np.zeros((len(x), len(v)))

        abs_err = l2_error(state, 0, zero_ref, relative=False)
        # equals the L2 norm of the beam itself: n0 sqrt(L / (alpha sqrt(2 pi)))
        expected = 0.5 * math.sqrt(2 * math.pi / (0.5 * math.sqrt(2 * math.pi)))
        assert abs_err == pytest.approx(expected, rel=1e-6)
