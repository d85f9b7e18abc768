import numpy as np
import pytest

import oracles
from cvmbqc.correction import (
    DB_PER_NEPER,
    MixedStateError,
    actual_output_cov,
    correction_displacement,
    correction_operators,
    db_to_epsilon,
    db_to_params,
    db_to_r,
    deviation,
    ec_unitary,
    j_k,
    r_to_db,
    sigma_matrices,
    step_correction,
    tmss_alpha,
    tmsv_cov,
)
from cvmbqc.gadgets import cluster_t, feedforward_single
from cvmbqc.gaussian import is_symplectic, two_mode_squeezer
from cvmbqc.randgen import random_pure_state
from cvmbqc.scenarios import example1, example1_closed_forms, example2, example2_closed_forms

GRID = [(s, e) for s in (0.25, 0.5, 2.0) for e in (0.05, 0.1, 0.3)]


def test_sigma_matrices():
    for arity in (1, 2):
        sm = sigma_matrices(0.2, arity)
        ref = oracles.noise_matrices(0.2, arity)
        for got, want in zip((sm.sigma1, sm.sigma2, sm.sigma3), ref):
            assert np.allclose(got, want)
    with pytest.raises(ValueError):
        sigma_matrices(1.0)
    with pytest.raises(ValueError):
        sigma_matrices(0.1, 3)


@pytest.mark.parametrize("s,eps", GRID)
def test_example1_closed_forms(s, eps):
    ref = oracles.example1_forms(s, eps)
    mine = example1_closed_forms(s, eps)
    for k, k2 in (("sigma_t", "sigma_t"), ("deviation", "deviation"), ("actual_cov", "sigma"), ("u_ec", "u_ec")):
        assert np.abs(mine[k] - ref[k2]).max() < 1e-12
    rep = example1(s, eps)
    assert rep.closed_form_residual < 1e-10
    assert rep.passed


@pytest.mark.parametrize("s,eps", GRID)
def test_deviation_defines_a(s, eps):
    st = oracles.example1_forms(s, eps)["sigma_t"]
    a = correction_operators(st, eps).A
    assert np.abs(a - np.linalg.inv(st) @ (np.eye(2) + deviation(st, eps))).max() < 1e-10


@pytest.mark.parametrize("r", [0.0, 0.3, 1.0, 2.0])
@pytest.mark.parametrize("eps", [0.05, 0.1, 0.3])
def test_example2_closed_forms(r, eps):
    j, k = j_k(r, eps)
    jo, ko = oracles.example2_jk(r, eps)
    assert abs(j - jo) < 1e-10 and abs(k - ko) < 1e-10
    assert abs(j * j - k * k - 1) < 1e-10
    st = tmsv_cov(r)
    assert np.abs(np.eye(4) + deviation(st, eps) - oracles.example2_one_plus_deviation(r, eps)).max() < 1e-10
    u = oracles.two_mode_squeezer(tmss_alpha(r, eps))
    act = actual_output_cov(st, eps)
    assert np.abs(u @ act @ u.T - st).max() < 1e-9
    assert np.abs(example2_closed_forms(r, eps)["recovery"] @ act - st).max() < 1e-9
    assert example2(r, eps).passed


def test_tmsv_cov():
    assert np.allclose(tmsv_cov(0.7), oracles.tmsv(0.7))


def test_alpha():
    assert tmss_alpha(0.0, 0.1) == 0.0
    assert np.arccosh(j_k(1.0, 0.1)[0]) / 2 == pytest.approx(tmss_alpha(1.0, 0.1), rel=1e-10)
    with pytest.raises(ValueError):
        tmss_alpha(-1, 0.1)
    with pytest.raises(ValueError):
        tmss_alpha(1, 0.0)


def test_d_zero_outcomes():
    st = oracles.example1_forms(0.5, 0.1)["sigma_t"]
    assert np.array_equal(correction_displacement(st, 0.1, (0, 0), (1.0, 0.2)), [0, 0])


def test_d_matches_oracle():
    st = oracles.example1_forms(0.5, 0.1)["sigma_t"]
    th = (1.1, -0.3)
    t = cluster_t(0.1)
    ff = feedforward_single(1.0, -1.0, *th, t)
    assert np.allclose(correction_displacement(st, 0.1, (1.0, -1.0), th), oracles.d_vector(st, 0.1, ff), atol=1e-12)


def test_d_vanishes_in_ideal_limit():
    st = oracles.example1_forms(0.5, 0.1)["sigma_t"]
    norms = [np.linalg.norm(correction_displacement(st, e, (1.0, -1.0), (1.1, -0.3))) for e in (1e-2, 1e-3, 1e-4)]
    assert norms[0] > norms[1] > norms[2]
    assert norms[2] < 1e-2


@pytest.mark.parametrize("arity", [1, 2])
def test_actual_is_pure_and_broadened(rng, arity):
    for _ in range(10):
        st = random_pure_state(arity, rng).cov
        act = actual_output_cov(st, 0.2)
        assert abs(np.linalg.det(2 * act) - 1) < 1e-9
        assert np.isclose(np.linalg.det(act), np.linalg.det(st))


def test_ec_unitary(rng):
    st = oracles.example1_forms(0.5, 0.1)["sigma_t"]
    assert np.allclose(ec_unitary(st, st).matrix, np.eye(2))
    for n in (1, 2, 3):
        a = random_pure_state(n, rng).cov
        b = random_pure_state(n, rng).cov
        u = ec_unitary(a, b).matrix
        assert is_symplectic(u, 1e-9)
        assert np.abs(u @ a @ u.T - b).max() < 1e-9
    with pytest.raises(MixedStateError):
        ec_unitary(np.eye(2), st)


def test_ec_unitary_example2_equals_tmss():
    st = tmsv_cov(1.0)
    act = actual_output_cov(st, 0.1)
    assert np.abs(ec_unitary(act, st).matrix - two_mode_squeezer(tmss_alpha(1.0, 0.1)).matrix).max() < 1e-12


def test_db_conversions():
    assert db_to_r(DB_PER_NEPER) == pytest.approx(1.0)
    assert r_to_db(db_to_r(7.3)) == pytest.approx(7.3)
    assert db_to_epsilon(10) == pytest.approx(0.1)
    assert db_to_params(0) == (0.0, 1.0)
    assert 10 * np.log10(np.exp(2 * db_to_r(3.0))) == pytest.approx(3.0)
    with pytest.raises(ValueError):
        db_to_r(-1)
    with pytest.raises(ValueError):
        db_to_epsilon(-1)


class TestStepCorrection:
    def test_reduces_to_single_step(self, rng):
        for arity in (1, 2):
            st = random_pure_state(arity, rng).cov
            c = step_correction(st, np.zeros(2 * arity), tuple(range(arity)), 0.15)
            assert np.abs(c.actual_cov - actual_output_cov(st, 0.15)).max() < 1e-12
            assert np.abs(c.offset).max() < 1e-14
            # gain maps gamma to S(1/t) D, the conditional mean of the output
            ops = correction_operators(st, 0.15)
            sinv = np.kron(np.eye(arity), np.diag([1 / cluster_t(0.15), cluster_t(0.15)]))
            g = np.ones(2 * arity)
            d = -np.linalg.solve(ops.A, ops.B @ g)
            assert np.allclose(c.predicted_means(g[None], np.ones(1))[0], sinv @ d)

    def test_restores_target(self, rng):
        st = random_pure_state(3, rng).cov
        mu = rng.normal(size=6)
        c = step_correction(st, mu, (1,), 0.2)
        u = c.unitary.matrix
        assert np.abs(u @ c.actual_cov @ u.T - st).max() < 1e-9
        gamma = rng.normal(size=(5, 2))
        w = np.ones(5)
        out = (c.predicted_means(gamma, w) + c.displacements(gamma, w)) @ u.T
        assert np.abs(out - mu).max() < 1e-9

    def test_without_displacement_keeps_spread(self, rng):
        st = random_pure_state(2, rng).cov
        c = step_correction(st, np.zeros(4), (0, 1), 0.2)
        gamma = rng.normal(size=(5, 4))
        w = np.ones(5)
        out = c.predicted_means(gamma, w) + c.displacements(gamma, w, use_displacement=False)
        assert np.abs(out).max() > 1e-3
