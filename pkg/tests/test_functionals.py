import numpy as np
import pytest

from delaywave.functionals import (
    basic_energy,
    dissipation_bound,
    equilibrium_chi,
    invariant_E,
    lyapunov_norm_sq,
    norm_equivalence_check,
    scheme_energies,
    standard_norm_sq,
)
from delaywave.grid import State, make_grid
from delaywave.params import ParameterError, make_params
from delaywave.scheme import acceleration
from delaywave.stepper import Scenario, run, step

from conftest import const, zero


def state(g, y=0.0, z=0.0, u=0.0):
    return State(np.full(g.N + 1, y), np.full(g.N + 1, z), np.full(g.M + 1, u))


@pytest.fixture
def g():
    return make_grid(1.0, 20, 8)


class TestClosedForms:
    def test_zero_state(self, params, g):
        assert lyapunov_norm_sq(state(g), params, g) == 0.0

    @pytest.mark.parametrize("c", [1.0, -2.0, 3.5])
    def test_constant_displacement(self, params, g, c):
        s = state(g, y=c)
        expected = params.varpi * params.gain_sum**2 * c * c
        assert lyapunov_norm_sq(s, params, g) == pytest.approx(expected, rel=1e-14)
        assert invariant_E(s, params, g) == pytest.approx(params.gain_sum * c)

    def test_unit_velocity(self, params, g):
        assert params.varpi == pytest.approx(0.45)
        s = state(g, z=1.0)
        assert lyapunov_norm_sq(s, params, g) == pytest.approx(1.45, rel=1e-14)
        assert invariant_E(s, params, g) == pytest.approx(1.0)
        assert basic_energy(s, params, g) == pytest.approx(1.0)

    def test_norm_ratio_of_constant(self, params, g):
        s = state(g, y=1.0)
        ratio = lyapunov_norm_sq(s, params, g) / standard_norm_sq(s, g)
        assert ratio == pytest.approx(1.0125, rel=1e-14)


class TestEquilibrium:
    def test_zero(self, params, g):
        assert equilibrium_chi(zero, zero, zero, params, g) == 0.0

    def test_constant(self, params, g):
        assert equilibrium_chi(const(1.7), zero, zero, params, g) == pytest.approx(1.7)

    def test_unit_velocity(self):
        p = make_params(1.0, 0.25, 0.5)
        g = make_grid(1.0, 200, 112)
        assert equilibrium_chi(zero, const(1.0), zero, p, g) == pytest.approx(0.8, rel=1e-14)

    def test_history_contributes(self, params, g):
        chi = equilibrium_chi(zero, zero, const(1.0), params, g)
        assert chi == pytest.approx(-params.beta * params.tau / params.gain_sum)

    def test_requires_admissible(self, g):
        p = make_params(1.0, 2.0, 1.0, unsafe=True)
        with pytest.raises(ParameterError):
            equilibrium_chi(zero, zero, zero, p, g)


class TestNormEquivalence:
    def test_bounds_and_reproducibility(self, params, g):
        a = norm_equivalence_check(params, g, 2000, rng_seed=5)
        b = norm_equivalence_check(params, g, 2000, rng_seed=5)
        assert a == b
        assert 0 < a[0] <= a[1] < np.inf

    def test_too_few_samples(self, params, g):
        with pytest.raises(ValueError):
            norm_equivalence_check(params, g, 10)


class TestSchemeEnergies:
    def test_invariant_exact_and_dissipation_identity(self):
        p = make_params(1.0, 0.5, 0.5)
        g = make_grid(1.0, 40, 24)
        rng = np.random.default_rng(11)
        s = State(rng.normal(size=41), rng.normal(size=41), rng.normal(size=25))
        s.u[0] = s.z[-1]
        dt = p.tau / g.M
        for _ in range(60):
            _, b0, i0 = scheme_energies(s, p, g)
            s1 = step(s, p, g)
            _, b1, i1 = scheme_energies(s1, p, g)
            assert i1 == pytest.approx(i0, abs=1e-12 * max(1.0, abs(i0)))
            bound = dissipation_bound(s1.z[-1], s.u[-2], p)
            assert b1 - b0 <= 2 * dt * bound + 1e-12 * b0
            s = s1

    def test_invariant_second_order_on_smooth_data(self):
        p = make_params(1.0, 0.5, 0.5)
        cosx = lambda x: np.cos(np.pi * x)
        drift = []
        for k, N in enumerate((25, 50, 100)):
            sc = Scenario(p, make_grid(1.0, N, 14 * 2**k), cosx, zero, zero, 5.0)
            E = run(sc).column("invariant_E")
            drift.append(np.abs(E - E[0]).max())
        assert 3.5 < drift[0] / drift[1] < 4.5
        assert 3.5 < drift[1] / drift[2] < 4.5

    def test_acceleration_folds_feedback(self, params, g):
        y = np.zeros(g.N + 1)
        a = acceleration(y, 1.0, 0.0, params, g)
        assert a[-1] == pytest.approx(-2 * params.alpha / g.dx)
        assert not a[:-1].any()
