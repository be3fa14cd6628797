import numpy as np
import pytest

from delaywave.grid import State, make_grid
from delaywave.params import ParameterError, make_params
from delaywave.spectral import (
    SingularShiftError,
    assemble_generator,
    conserved_functional,
    deflate,
    eigenvalues,
    gram_matrix,
    resolvent_bvp_check,
    resolvent_norm,
    resolvent_sweep,
    spectral_report,
)


@pytest.fixture
def gen(params):
    return assemble_generator(params, make_grid(1.0, 16, 8))


class TestGenerator:
    def test_dimension(self, gen):
        assert gen.dim == 2 * 17 + 9
        assert gen.matrix.shape == (gen.dim, gen.dim)

    def test_constants_in_kernel(self, gen):
        g = gen.grid
        s = State(np.full(17, 2.0), np.zeros(17), np.zeros(g.M + 1))
        assert np.abs(gen.apply(s)).max() == 0.0

    def test_stencil_consistency(self, params):
        g = make_grid(1.0, 100, 8)
        A = assemble_generator(params, g)
        s = State(np.cos(np.pi * g.x), np.zeros(101), np.zeros(g.M + 1))
        out = A.apply(s)[A.iz]
        err = np.abs(out[1:-1] + np.pi**2 * np.cos(np.pi * g.x[1:-1])).max()
        assert err < 1e-2

    def test_velocity_rows(self, gen):
        rng = np.random.default_rng(0)
        v = rng.normal(size=gen.dim)
        assert np.array_equal((gen.matrix @ v)[gen.iy], v[gen.iz])

    def test_transport_rows(self, gen):
        # u_j' = -(u_j - u_{j-1})/(tau*drho) with z_N feeding u_1
        g, p = gen.grid, gen.params
        rng = np.random.default_rng(1)
        v = rng.normal(size=gen.dim)
        out = gen.matrix @ v
        u, zN = v[gen.iu], v[gen.iz][-1]
        c = 1.0 / (p.tau * g.drho)
        expected = -c * (u[1:] - np.concatenate([[zN], u[1:-1]]))
        np.testing.assert_allclose(out[gen.iu][1:], expected, rtol=1e-13)

    def test_real_nonsymmetric(self, gen):
        assert np.isrealobj(gen.matrix)
        assert not np.allclose(gen.matrix, gen.matrix.T)

    def test_requires_admissible(self):
        p = make_params(1.0, 2.0, 1.0, unsafe=True)
        with pytest.raises(ParameterError):
            assemble_generator(p, make_grid(1.0, 16, 8))


class TestDeflation:
    def test_functional_invariant_under_flow(self, gen):
        ell = conserved_functional(gen.params, gen.grid)
        rng = np.random.default_rng(2)
        for _ in range(20):
            v = rng.normal(size=gen.dim)
            assert abs(ell @ (gen.matrix @ v)) < 1e-9 * np.abs(gen.matrix @ v).max()

    def test_constant_mode_excluded(self, gen):
        ell = conserved_functional(gen.params, gen.grid)
        one = np.zeros(gen.dim)
        one[gen.iy] = 1.0
        assert ell @ one == pytest.approx(gen.params.gain_sum)

    def test_codimension_one(self, gen):
        d = deflate(gen)
        assert d.dim == gen.dim - 1
        assert d.residual < 1e-12
        np.testing.assert_allclose(d.basis.T @ d.basis, np.eye(d.dim), atol=1e-12)


class TestSpectrum:
    def test_zero_eigenvalue_with_constant_eigenvector(self, gen):
        w, V = np.linalg.eig(gen.matrix)
        k = np.argmin(np.abs(w))
        assert abs(w[k]) < 1e-10
        one = np.zeros(gen.dim)
        one[gen.iy] = 1.0
        cos = abs(np.vdot(V[:, k], one)) / (np.linalg.norm(V[:, k]) * np.linalg.norm(one))
        assert cos > 1 - 1e-8

    def test_deflated_stable(self, gen):
        lam = eigenvalues(deflate(gen).matrix)
        assert lam.real.max() < 0
        assert np.all(np.diff(lam.real) >= 0)

    def test_zero_shift_singular_before_deflation(self, gen):
        with pytest.raises(SingularShiftError):
            resolvent_norm(gen.matrix, 0.0)

    def test_zero_shift_finite_after_deflation(self, gen):
        assert np.isfinite(resolvent_norm(deflate(gen).matrix, 0.0))

    def test_resolvent_lower_bound(self, gen):
        A = deflate(gen).matrix
        gammas = np.linspace(0.0, 50.0, 11)
        norms, lower = resolvent_sweep(A, gammas)
        assert np.all(norms >= lower * (1 - 1e-8))

    def test_h_metric_norms(self, gen):
        G = gram_matrix(gen.params, gen.grid)
        np.linalg.cholesky(G)
        d = deflate(gen)
        Gd = d.basis.T @ G @ d.basis
        norms, _ = resolvent_sweep(d.matrix, np.array([0.0, 5.0]), gram=Gd)
        assert np.all(np.isfinite(norms))

    def test_dense_budget(self):
        with pytest.raises(ValueError):
            eigenvalues(np.zeros((2001, 2001)))

    def test_report(self, params):
        rep = spectral_report(params, make_grid(1.0, 16, 8), np.array([-1.0, 1.0]))
        assert rep.max_real_part < 0
        assert rep.resolvent_norms.shape == (2,)
        assert rep.metric == "euclidean"


class TestBVP:
    @pytest.fixture
    def setup(self, params):
        g = make_grid(1.0, 40, 16)
        return params, g, assemble_generator(params, g)

    def test_zero_rhs(self, setup):
        p, g, gen = setup
        res = resolvent_bvp_check(p, g, 1.0, np.zeros(gen.dim), gen=gen)
        assert np.abs(res.solution).max() == 0.0

    def test_round_trip(self, setup):
        p, g, gen = setup
        phi = np.random.default_rng(4).normal(size=gen.dim)
        rhs = phi - gen.matrix @ phi
        res = resolvent_bvp_check(p, g, 1.0, rhs, gen=gen)
        assert res.residual < 1e-10
        np.testing.assert_allclose(res.solution, phi, atol=1e-9)

    def test_complex_shift(self, setup):
        p, g, gen = setup
        rhs = np.random.default_rng(5).normal(size=gen.dim)
        lam = 0.5 + 3.0j
        res = resolvent_bvp_check(p, g, lam, rhs, gen=gen)
        dense = np.linalg.solve(lam * np.eye(gen.dim) - gen.matrix, rhs)
        assert np.abs(res.solution - dense).max() < 1e-10

    def test_exact_kernel_close(self, setup):
        p, g, gen = setup
        rhs = np.zeros(gen.dim)
        rhs[gen.iz] = np.cos(np.pi * g.x)
        a = resolvent_bvp_check(p, g, 1.0, rhs, gen=gen)
        b = resolvent_bvp_check(p, g, 1.0, rhs, kernel="exact", gen=gen)
        assert np.abs(a.y - b.y).max() < 0.1 * np.abs(a.y).max()

    def test_requires_right_half_plane(self, setup):
        p, g, gen = setup
        with pytest.raises(ValueError):
            resolvent_bvp_check(p, g, -1.0, np.zeros(gen.dim))
