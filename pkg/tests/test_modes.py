"""Coherent mode decomposition of high-dimensional snapshot pairs."""

import numpy as np
import pytest

from cohsets import (
    InputError,
    Kernel,
    RegParam,
    SnapshotMatrices,
    TrajectoryPairs,
    cmd,
    evaluate_mode,
    kernel_cca,
)


def _cos(a, b):
    return abs(a @ b) / (np.linalg.norm(a) * np.linalg.norm(b))


def test_rank_one_sinusoid():
    rng = np.random.default_rng(0)
    u = rng.standard_normal(1000)
    n = 128  # sequential pairing caps rho_1 near cos(2*pi/n)
    Z = np.outer(u, np.sin(2 * np.pi * np.arange(n + 1) / n))
    snap = SnapshotMatrices.from_sequence(Z)
    res = cmd(snap, RegParam(1e-6), 1)
    assert res.rho[0] > 0.99
    assert _cos(res.xi_modes[:, 0], u) > 0.999
    assert _cos(res.eta_modes[:, 0], u) > 0.999


def test_identity_dynamics_reduction():
    """Y = X: rho are the eigenvalues of G (G + n*eps*I)^-1 and xi is
    proportional to eta for every mode."""
    rng = np.random.default_rng(1)
    X = rng.standard_normal((50, 12))
    snap = SnapshotMatrices(X, X)
    eps = 1e-4
    res = cmd(snap, RegParam(eps), 5)
    G = X.T @ X
    g = np.sort(np.linalg.eigvalsh(G))[::-1][:5]
    np.testing.assert_allclose(res.rho, g / (g + 12 * eps), atol=1e-8)
    for j in range(5):
        assert _cos(res.xi_modes[:, j], res.eta_modes[:, j]) > 1.0 - 1e-8


def test_cmd_equals_linear_uncentered_kernel_cca():
    rng = np.random.default_rng(2)
    d, n = 30, 15
    X = rng.standard_normal((d, n))
    Y = rng.standard_normal((d, n))
    eps = 0.1
    res = cmd(SnapshotMatrices(X, Y), RegParam(eps), 4)
    lin = Kernel.linear()
    ref = kernel_cca(
        TrajectoryPairs(X.T, Y.T), lin, lin, RegParam(eps), 4,
        centered=False, variant="i",
    )
    np.testing.assert_allclose(res.rho, ref.rho, atol=1e-8)
    # f evaluations agree: xi^T x_i vs the kernel-CCA training values
    f_cmd = X.T @ res.xi_modes
    for j in range(4):
        a, b = f_cmd[:, j], ref.f_on_X[:, j]
        sign = np.sign(a @ b)
        np.testing.assert_allclose(sign * b / np.linalg.norm(b),
                                   a / np.linalg.norm(a), atol=1e-7)


def test_orthogonal_invariance():
    rng = np.random.default_rng(3)
    d, n = 80, 20
    X = rng.standard_normal((d, n))
    Y = rng.standard_normal((d, n))
    Q, _ = np.linalg.qr(rng.standard_normal((d, d)))
    a = cmd(SnapshotMatrices(X, Y), RegParam(0.1), 3)
    b = cmd(SnapshotMatrices(Q @ X, Q @ Y), RegParam(0.1), 3)
    np.testing.assert_allclose(a.rho, b.rho, atol=1e-8)
    for j in range(3):
        assert _cos(Q @ a.xi_modes[:, j], b.xi_modes[:, j]) > 1.0 - 1e-8


def test_modes_live_in_snapshot_column_spaces():
    rng = np.random.default_rng(4)
    X = rng.standard_normal((60, 10))
    Y = rng.standard_normal((60, 10))
    res = cmd(SnapshotMatrices(X, Y), RegParam(0.1), 3)
    Px = X @ np.linalg.pinv(X)
    Py = Y @ np.linalg.pinv(Y)
    np.testing.assert_allclose(Px @ res.xi_modes, res.xi_modes, atol=1e-8)
    np.testing.assert_allclose(Py @ res.eta_modes, res.eta_modes, atol=1e-8)


def test_zero_correlation_modes_flagged():
    # orthogonal snapshot columns with two exactly-zero columns: the Gram
    # matrices are diagonal with exact zero eigenvalues beyond rank 2
    X = np.zeros((6, 4))
    Y = np.zeros((6, 4))
    X[0, 0], X[1, 1] = 2.0, 1.0
    Y[0, 0], Y[1, 1] = 1.5, 0.5
    with pytest.warns(RuntimeWarning, match="zero correlation"):
        res = cmd(SnapshotMatrices(X, Y), RegParam(1e-6), 3)
    assert res.eta_defined[0]
    assert not res.eta_defined[-1]
    assert np.all(np.isnan(res.eta_modes[:, ~res.eta_defined]))


def test_from_sequence_and_skip():
    Z = np.arange(30.0).reshape(3, 10)
    snap = SnapshotMatrices.from_sequence(Z)
    np.testing.assert_array_equal(snap.X, Z[:, :-1])
    np.testing.assert_array_equal(snap.Y, Z[:, 1:])
    skipped = SnapshotMatrices.from_sequence(Z, skip=4)
    np.testing.assert_array_equal(skipped.X, Z[:, 4:-1])
    assert skipped.n == 5
    with pytest.raises(InputError):
        SnapshotMatrices.from_sequence(Z[:, :2])
    with pytest.raises(InputError):
        SnapshotMatrices.from_sequence(Z, skip=8)


def test_snapshot_validation():
    with pytest.raises(InputError):
        SnapshotMatrices(np.ones((3, 5)), np.ones((3, 4)))
    with pytest.raises(InputError):
        SnapshotMatrices(np.ones((3, 5)), np.ones((2, 5)))


def test_evaluate_mode():
    rng = np.random.default_rng(6)
    X = rng.standard_normal((25, 9))
    Y = rng.standard_normal((25, 9))
    res = cmd(SnapshotMatrices(X, Y), RegParam(0.1), 2)
    state = rng.standard_normal(25)
    assert evaluate_mode(res, "f", 0, state) == pytest.approx(res.xi_modes[:, 0] @ state)
    assert evaluate_mode(res, "g", 1, state) == pytest.approx(res.eta_modes[:, 1] @ state)
    with pytest.raises(InputError):
        evaluate_mode(res, "f", 4, state)


def test_centered_flag_changes_result():
    rng = np.random.default_rng(7)
    X = rng.standard_normal((20, 12)) + 5.0  # strong mean component
    Y = rng.standard_normal((20, 12)) + 5.0
    a = cmd(SnapshotMatrices(X, Y), RegParam(0.1), 3, centered=False)
    b = cmd(SnapshotMatrices(X, Y), RegParam(0.1), 3, centered=True)
    assert not np.allclose(a.rho, b.rho, atol=1e-6)
