import numpy as np
import pytest
import scipy.linalg

from lieadapt.error_dynamics import LinearModel, linearize
from lieadapt.lqr import (RiccatiError, dare_residual, riccati_step, solve_dare,
                          spectral_radius)


def scalar(a, b):
    return LinearModel(np.array([[a]]), np.array([[b]]), 1.0)


def test_scalar_closed_form():
    sol = solve_dare(scalar(2.0, 1.0), np.eye(1), np.eye(1))
    np.testing.assert_allclose(sol.p[0, 0], 2 + np.sqrt(5), atol=1e-10)
    np.testing.assert_allclose(sol.k[0, 0], -1.6180339887, atol=1e-9)
    np.testing.assert_allclose(2.0 + sol.k[0, 0], 0.3819660113, atol=1e-9)


def test_zero_dynamics_gives_q_and_zero_gain():
    sol = solve_dare(scalar(0.0, 1.0), np.eye(1), np.eye(1))
    np.testing.assert_allclose(sol.p, [[1.0]])
    np.testing.assert_allclose(sol.k, [[0.0]], atol=1e-15)


def test_paper_model(paper_params, paper_twist):
    model = linearize(paper_twist, paper_params, 0.01)
    for r in (np.eye(6), 1e-2 * np.eye(6)):
        sol = solve_dare(model, np.eye(12), r)
        assert sol.residual < 1e-9
        np.testing.assert_allclose(sol.p, sol.p.T, atol=1e-12)
        assert np.min(np.linalg.eigvalsh(sol.p)) > 0
        assert spectral_radius(model.a + model.b @ sol.k) < 1


def test_random_stabilizable_instances(rng):
    for _ in range(50):
        n, m = rng.integers(2, 7), rng.integers(1, 4)
        a = rng.normal(size=(n, n))
        a *= 1.2 / spectral_radius(a)
        b = rng.normal(size=(n, m))
        g = rng.normal(size=(n, n))
        q = g @ g.T + 0.1 * np.eye(n)
        r = np.diag(rng.uniform(0.1, 2.0, m))
        sol = solve_dare(LinearModel(a, b, 1.0), q, r)
        assert sol.residual < 1e-9
        assert spectral_radius(a + b @ sol.k) < 1
        np.testing.assert_allclose(sol.p, scipy.linalg.solve_discrete_are(a, b, q, r),
                                   rtol=1e-8, atol=1e-8)


def test_value_iteration_is_monotone(paper_params, paper_twist):
    model = linearize(paper_twist, paper_params, 0.01)
    q, r = np.eye(12), np.eye(6)
    p = q.copy()
    for _ in range(30):
        nxt = riccati_step(p, model.a, model.b, q, r)
        assert np.min(np.linalg.eigvalsh(nxt - p)) > -1e-10
        p = nxt
    assert dare_residual(p, model.a, model.b, q, r) > 0


def test_r_not_positive_definite(paper_params, paper_twist):
    model = linearize(paper_twist, paper_params, 0.01)
    with pytest.raises(ValueError):
        solve_dare(model, np.eye(12), np.zeros((6, 6)))
    with pytest.raises(ValueError):
        solve_dare(model, np.eye(12), -np.eye(6))


def test_non_convergence_raises():
    model = LinearModel(np.array([[2.0, 0.0], [0.0, 1.5]]), np.array([[1.0], [0.0]]), 1.0)
    with pytest.raises(RiccatiError):
        solve_dare(model, np.eye(2), np.eye(1), max_iter=200)


def test_iteration_cap_raises(paper_params, paper_twist):
    model = linearize(paper_twist, paper_params, 0.01)
    with pytest.raises(RiccatiError) as info:
        solve_dare(model, np.eye(12), np.eye(6), max_iter=5)
    assert info.value.residual > 0
