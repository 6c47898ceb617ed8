import math

import numpy as np
import pytest

from specdist.algebra import MoyalElement, involution, star, zero
from specdist.calculus import dz, dzbar, radial_bump, staircase
from specdist.errors import PreconditionError
from specdist.lipschitz import (ENTRY_BOUND, ball_report, commutator_norm, op_norm,
                                radial_in_ball)

from conftest import THETAS, rand_coeffs, rand_element


def test_op_norm_partial_isometry():
    assert op_norm([[0, 1], [0, 0]]) == pytest.approx(1.0, abs=1e-15)


def test_op_norm_diagonal():
    assert op_norm(np.diag([0.5, -3.0, 2.0])) == pytest.approx(3.0, abs=1e-14)


def test_op_norm_empty_and_zero():
    assert op_norm(np.zeros((0, 0))) == 0.0
    assert op_norm(np.zeros((4, 4))) == 0.0


def test_op_norm_against_gram_eigenvalue_oracle(rng):
    for _ in range(25):
        m = rand_coeffs(rng, 8)
        oracle = math.sqrt(max(np.linalg.eigvalsh(m.conj().T @ m)))
        assert op_norm(m) == pytest.approx(oracle, rel=1e-10)


def test_power_iteration_path_matches_dense(rng):
    # beyond dimension 64 the norm comes from Gram power iteration
    m = rand_coeffs(rng, 80)
    dense = np.linalg.svd(m, compute_uv=False)[0]
    assert op_norm(m) == pytest.approx(dense, rel=1e-9)


def test_power_iteration_with_clustered_spectrum(rng):
    # nearly tied top singular values: the value estimate must still converge
    # even though the iterate wanders inside the near-degenerate subspace
    u, _ = np.linalg.qr(rand_coeffs(rng, 80))
    v, _ = np.linalg.qr(rand_coeffs(rng, 80))
    sigma = np.linspace(1.0, 0.1, 80)
    sigma[1] = sigma[0] * (1 - 1e-9)
    m = (u * sigma) @ v.conj().T
    assert op_norm(m) == pytest.approx(sigma[0], rel=1e-8)


def test_commutator_norm_of_staircase_is_one():
    for theta in THETAS:
        for m0 in (0, 3, 11):
            assert commutator_norm(staircase(m0, theta)) == pytest.approx(1.0, abs=1e-12)


def test_commutator_norm_zero_and_homogeneous(rng):
    assert commutator_norm(zero(1.0, 4)) == 0.0
    a = staircase(5, 1.0)
    for lam in (-2.5, 0.25, 3.0):
        assert commutator_norm(lam * a) == pytest.approx(abs(lam), rel=1e-12)


def test_ball_report_accepts_staircase():
    rep = ball_report(staircase(3, 1.0))
    assert rep.member
    assert rep.violations == ()
    assert rep.commutator_norm == pytest.approx(1.0, abs=1e-12)
    assert rep.slack == pytest.approx(0.0, abs=1e-12)


def test_ball_report_rejects_scaled_staircase():
    rep = ball_report(2.0 * staircase(3, 1.0))
    assert not rep.member
    assert rep.violations
    worst = max(v for (_, _, v) in rep.violations)
    assert worst == pytest.approx(math.sqrt(2.0), abs=1e-12)


def test_ball_report_zero_member_at_zero_tol():
    assert ball_report(zero(1.0, 3), tol=0.0).member


def test_ball_report_json():
    d = ball_report(2.0 * staircase(1, 1.0)).to_dict()
    assert set(d) == {"commutator_norm", "member", "violations"}
    assert all(len(v) == 3 for v in d["violations"])


def test_radial_membership():
    assert radial_in_ball(staircase(4, 0.5))
    assert radial_in_ball(radial_bump(2, 2.0))
    assert not radial_in_ball(3.0 * radial_bump(0, 2.0))


def test_radial_membership_requires_radial():
    with pytest.raises(PreconditionError):
        radial_in_ball(MoyalElement(1.0, [[0, 1], [0, 0]]))


def test_radial_membership_agrees_with_ball_report(rng):
    for i in range(40):
        theta = THETAS[i % 3]
        diag = rng.uniform(-1, 1, int(rng.integers(2, 10)))
        a = MoyalElement(theta, np.diag(diag.astype(complex)))
        cn = commutator_norm(a)
        if cn > 0:
            a = (float(rng.uniform(0.5, 1.5)) / cn) * a
        assert radial_in_ball(a) == ball_report(a).member


def test_ball_entry_bound_after_rescaling(rng):
    for _ in range(40):
        a = rand_element(rng, 1.0, 10)
        cn = commutator_norm(a)
        a = (1.0 / cn) * a
        worst = max(np.max(np.abs(dz(a).coeffs)), np.max(np.abs(dzbar(a).coeffs)))
        assert worst <= ENTRY_BOUND + 1e-9


def test_self_adjoint_derivative_norms_match(rng):
    for _ in range(20):
        a = rand_element(rng, 2.0, 10)
        sa = 0.5 * (a + involution(a))
        assert op_norm(dz(sa).coeffs) == pytest.approx(op_norm(dzbar(sa).coeffs), rel=1e-12)


def test_operator_norm_submultiplicative(rng):
    for _ in range(25):
        a = rand_element(rng, 1.0, 8)
        b = rand_element(rng, 1.0, 8)
        n = max(a.order, b.order)
        assert op_norm(star(a, b).coeffs) <= \
            op_norm(a.pad(n).coeffs) * op_norm(b.pad(n).coeffs) * (1 + 1e-12)


def test_norm_is_max_transport_ratio(rng):
    # ||L(a) phi|| / ||phi|| never exceeds the singular value, and the top
    # right singular vector achieves it
    a = rand_coeffs(rng, 8)
    nrm = op_norm(a)
    for _ in range(25):
        phi = rand_coeffs(rng, 8)
        assert np.linalg.norm(a @ phi) <= nrm * np.linalg.norm(phi) * (1 + 1e-12)
    _, _, vh = np.linalg.svd(a)
    phi = vh[0].conj().reshape(-1, 1)
    assert np.linalg.norm(a @ phi) == pytest.approx(nrm, rel=1e-10)
