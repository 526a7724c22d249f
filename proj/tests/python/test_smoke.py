"""Smoke tests for the python bindings: anchor values, shapes, and the
in-process command line."""

import numpy as np
import pytest

import etaq


def test_sigma_anchors():
    assert etaq.sigma(1, np.array([2.0, 1.0, 0.0])) == pytest.approx(3.0)
    assert etaq.sigma(2, np.array([2.0, 1.0, 0.0])) == pytest.approx(2.0)
    assert etaq.sigma(3, np.array([2.0, 1.0, 0.0])) == pytest.approx(0.0)


def test_cone_membership():
    assert etaq.cone_contains(2, np.array([1.0, 1.0, 1.0]))
    assert not etaq.cone_contains(2, np.array([-1.0, -1.0, 0.5]))


def test_quotient_and_gradient():
    lam = np.array([1.0, 2.0, 3.0])
    assert etaq.quotient(3, 1, 0, lam) == pytest.approx(6.0)
    assert etaq.quotient(3, 2, 1, lam) == pytest.approx(11.0 / 6.0)

    # Central-difference check of one gradient entry.
    grad = etaq.quotient_gradient(3, 2, 1, lam)
    h = 1e-6
    bump = lam.copy()
    bump[0] += h
    drop = lam.copy()
    drop[0] -= h
    fd = (etaq.quotient(3, 2, 1, bump) - etaq.quotient(3, 2, 1, drop)) / (2 * h)
    assert grad[0] == pytest.approx(fd, rel=1e-6)

    hess = etaq.quotient_hessian(3, 2, 1, lam)
    assert hess.shape == (3, 3)
    assert hess == pytest.approx(hess.T)


def test_eta_spectrum_transform():
    eta = etaq.eta_spectrum(1.0, 1.0, np.array([2.0, 1.0, 0.0]))
    assert eta == pytest.approx(np.array([1.0, 2.0, 3.0]))


def test_key_lemma_anchor():
    # At kappa = (2, 1, 0) with (n, k, l) = (3, 2, 1) the diagonal
    # derivatives are (20, 26, 32)/36 and the smallest ratio 20/78.
    rep = etaq.key_lemma_ratio(3, 2, 1, 1.0, 1.0, np.array([2.0, 1.0, 0.0]))
    assert rep["f_diag"] == pytest.approx(np.array([20.0, 26.0, 32.0]) / 36.0, abs=1e-12)
    assert rep["kappa_desc"] == pytest.approx(np.array([2.0, 1.0, 0.0]))
    assert rep["min_ratio"] == pytest.approx(20.0 / 78.0, abs=1e-12)
    assert rep["second_min_ratio"] == pytest.approx(26.0 / 78.0, abs=1e-12)


def test_evaluate_matrix_form():
    W = np.diag([2.0, 1.0, 0.0])
    out = etaq.evaluate(3, 2, 1, 1.0, 1.0, W)
    assert out["lambda"] == pytest.approx(np.array([1.0, 2.0, 3.0]))
    assert out["value"] == pytest.approx(11.0 / 6.0)
    # For diagonal W the derivative dF/dW is diagonal, and these entries
    # are the key-lemma diagonal (20, 26, 32)/36 in W's own order.
    assert out["f_first"] == pytest.approx(np.diag([20.0, 26.0, 32.0]) / 36.0, abs=1e-12)


def test_inadmissible_point_raises():
    with pytest.raises(RuntimeError):
        etaq.quotient(3, 2, 1, np.array([-1.0, -1.0, 0.5]))


def test_sphere_oracle_values():
    assert etaq.sphere_oracle("linear", 0.5, 3.5, 2.0, 2, 1, 0) == pytest.approx(1.0)
    assert etaq.sphere_oracle("sine", 0.1, 1.5, np.pi / 4, 2, 1, 0) == pytest.approx(2.0)
    with pytest.raises(ValueError):
        etaq.sphere_oracle("spiral", 0.5, 3.5, 2.0, 2, 1, 0)


def test_expression_evaluation():
    assert etaq.eval_expression("2 + 0.1*(2 - r)", r=1.0) == pytest.approx(2.1)
    assert etaq.eval_expression("p1^2 + p2^2", p=np.array([3.0, 4.0])) == pytest.approx(25.0)
    with pytest.raises(ValueError):
        etaq.eval_expression("sin(")


def test_run_cli_barrier(tmp_path):
    spec = tmp_path / "barrier.json"
    spec.write_text(
        '{"warp": {"kind": "linear", "lo": 0.5, "hi": 3.5},'
        ' "psi": "(2 + 0.1*(2 - r))/r", "r1": 1.0, "r2": 3.0, "op": [3, 2, 1]}'
    )
    out = tmp_path / "out"
    assert etaq.run_cli(["barrier", "--spec", str(spec), "--out", str(out)]) == 0
    rows = (out / "barrier.csv").read_text().strip().splitlines()
    assert rows[0] == "condition,margin,holds"
    assert len(rows) == 4
    assert all(row.endswith(",1") for row in rows[1:])


def test_run_cli_bad_input():
    assert etaq.run_cli(["no-such-command"]) == 3
