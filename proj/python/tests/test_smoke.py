import math

import numpy as np
import pytest

import qadd


def test_av_minimum():
    r = qadd.minimize_divergence(qadd.plus_state(), qadd.ConvexSetSpec.av_qubit(0.4))
    assert r.converged
    assert abs(r.value - 0.780323874) < 1e-8
    assert np.allclose(r.sigma, np.diag([0.7, 0.3]))


def test_certificate_verdicts():
    c = qadd.additivity_check(qadd.plus_state(), qadd.ConvexSetSpec.av_qubit(0.4))
    assert c.verdict == qadd.Verdict.NonAdditive
    assert c.sup_value >= 1 / 0.84 + 1 / math.sqrt(0.84) - 1e-6
    c0 = qadd.additivity_check(qadd.plus_state(), qadd.ConvexSetSpec.av_qubit(0.0))
    assert c0.verdict == qadd.Verdict.Additive


def test_divergence_matches_numpy():
    rho = np.diag([0.9, 0.1])
    sigma = np.array([[0.5, 0.1], [0.1, 0.5]])
    w, v = np.linalg.eigh(sigma)
    log_sigma = v @ np.diag(np.log(w)) @ v.T
    ref = 0.9 * math.log(0.9) + 0.1 * math.log(0.1) - np.trace(rho @ log_sigma)
    d = qadd.divergence(qadd.DensityState(rho), sigma, qadd.DivergenceSpec.umegaki())
    assert abs(d - ref) < 1e-12


def test_stein_report_bounds():
    r = qadd.stein_report(qadd.plus_state(), qadd.ConvexSetSpec.av_qubit(0.4))
    assert abs(r.lower - math.log(2)) < 1e-6
    assert r.lower <= r.upper
    assert not r.certified
    assert '"kind":"stein"' in r.to_json()


def test_violation_integral():
    v = qadd.violation_integral(0.7, 5)
    assert abs(v.closed - v.quadrature) < 1e-10 * v.closed


def test_errors_carry_codes():
    with pytest.raises(qadd.QaddError) as e:
        qadd.DensityState(np.array([[1.0, 0.0], [0.0, 1.0]]))
    assert qadd.error_code(e.value) == "ValidationError"
    with pytest.raises(qadd.QaddError):
        qadd.HermitianOperator(np.array([[1.0, 1j], [1j, 1.0]]))


def test_audenaert_identity():
    a = np.diag([0.6, 0.4])
    b = np.array([[0.3, 0.1], [0.1, 0.7]])
    t = qadd.audenaert_test(a, b, 0.5)
    lhs = np.trace((np.eye(2) - t) @ a).real + np.trace(t @ b).real
    wa, va = np.linalg.eigh(a)
    wb, vb = np.linalg.eigh(b)
    rhs = np.trace(va @ np.diag(np.sqrt(wa)) @ va.T @ vb @ np.diag(np.sqrt(wb)) @ vb.T).real
    assert abs(lhs - rhs) < 1e-9


def test_load_problem():
    rho, s, d = qadd.load_problem('{"state":"werner(0,2)","set":{"type":"werner_rains","d":2}}')
    assert rho.dim == 4
    r = qadd.minimize_divergence(rho, s, d)
    assert abs(r.value - math.log(2)) < 1e-9
