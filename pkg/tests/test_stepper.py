import numpy as np
import pytest

from delaywave.grid import make_grid
from delaywave.params import make_params
from delaywave.stepper import (
    BlowUpError,
    CFLError,
    Forcing,
    Scenario,
    run,
    run_oracle,
    step,
)

from conftest import const, zero


def gauss(x):
    return np.exp(-(((x - 0.5) / 0.1) ** 2))


@pytest.fixture
def p():
    return make_params(1.0, 0.5, 0.5)


class TestRecords:
    def test_empty_run(self, p):
        ts = run(Scenario.build(p, 20, gauss, zero, zero, 0.0))
        assert len(ts) == 1
        assert ts.t[0] == 0.0

    def test_record_every(self, p):
        g = make_grid(1.0, 20, 12)
        sc = Scenario(p, g, gauss, zero, zero, 100 * p.tau / g.M, record_every=10)
        assert sc.n_steps == 100
        ts = run(sc)
        assert len(ts) == 11
        assert np.all(np.diff(ts.t) > 0)

    def test_zero_data_stays_zero(self, p):
        ts = run(Scenario.build(p, 20, zero, zero, zero, 2.0))
        for name in ("lyap_norm_sq", "basic_energy", "invariant_E", "boundary_velocity", "delayed_velocity"):
            assert not ts.column(name).any()

    def test_metadata(self, p):
        sc = Scenario.build(p, 20, gauss, zero, zero, 1.0, metadata={"seed": 7})
        meta = run(sc).metadata
        assert meta["M"] == sc.grid.M and meta["seed"] == 7
        assert meta["dt"] == pytest.approx(p.tau / sc.grid.M)


class TestDynamics:
    def test_constant_is_fixed_point(self, p):
        g = make_grid(1.0, 30, 20)
        sc = Scenario(p, g, const(3.0), zero, zero, 500 * p.tau / g.M)
        st = run(sc).final_state
        assert np.abs(st.y - 3.0).max() == 0.0
        assert not st.z.any() and not st.u.any()

    def test_step_matches_run(self, p):
        g = make_grid(1.0, 20, 12)
        sc = Scenario(p, g, gauss, zero, zero, 40 * p.tau / g.M)
        s = sc.initial_state()
        for _ in range(40):
            s = step(s, p, g, cfl=sc.cfl)
        final = run(sc).final_state
        assert np.array_equal(s.y, final.y)
        assert np.array_equal(s.u, final.u)

    def test_deterministic(self, p):
        sc = Scenario.build(p, 40, gauss, zero, zero, 3.0)
        a, b = run(sc), run(sc)
        assert [r.as_tuple() for r in a.records] == [r.as_tuple() for r in b.records]

    def test_energy_decreasing_after_transient(self, p):
        ts = run(Scenario.build(p, 100, gauss, zero, zero, 10.0))
        e, t = ts.column("basic_energy"), ts.t
        d = np.diff(e)
        assert d.max() <= 1e-14 * e[0]
        assert np.all(d[t[1:] > 1.0] < 0)

    def test_delay_line_holds_past_boundary_velocity(self, p):
        g = make_grid(1.0, 40, 24)
        sc = Scenario(p, g, gauss, zero, zero, 3.0, record_every=1)
        ts = run(sc)
        zL, uM = ts.column("boundary_velocity"), ts.column("delayed_velocity")
        np.testing.assert_array_equal(uM[g.M :], zL[: -g.M])

    def test_cfl_violation(self, p):
        g = make_grid(1.0, 40, 4)
        with pytest.raises(CFLError):
            run(Scenario(p, g, gauss, zero, zero, 1.0))

    def test_blow_up(self, p):
        sc = Scenario.build(p, 20, const(1e13), zero, zero, 1.0)
        with pytest.raises(BlowUpError) as info:
            run(sc)
        assert info.value.step_index == 1

    def test_manufactured_order(self, p):
        L, tau = 1.0, p.tau
        ys = lambda x, t: np.cos(np.pi * x) * np.cos(np.pi * t)
        yt = lambda x, t: -np.pi * np.cos(np.pi * x) * np.sin(np.pi * t)
        force = Forcing(boundary=lambda t: p.alpha * yt(L, t) + p.beta * yt(L, t - tau))
        errs = []
        for N, M in ((20, 12), (40, 24)):
            g = make_grid(L, N, M)
            sc = Scenario(p, g, lambda x: ys(x, 0), lambda x: yt(x, 0), lambda s: yt(L, s), 1.0, cfl=1.0)
            st = run(sc, forcing=force).final_state
            errs.append(np.abs(st.y - ys(g.x, st.t)).max())
        assert 3.6 < errs[0] / errs[1] < 4.4


class TestOracleRun:
    def test_zero_history_agrees_early(self, p):
        sc = Scenario.build(p, 50, gauss, zero, zero, 0.4)
        a, b = run(sc), run_oracle(sc)
        # zero history: nothing is fed back before t = tau
        assert not a.column("delayed_velocity").any()
        assert not b.column("delayed_velocity").any()
        assert b.metadata["delay_mode"] == "oracle"
