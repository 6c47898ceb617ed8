import math

import numpy as np
import pytest

from specdist.algebra import basis, zero
from specdist.calculus import staircase
from specdist.errors import ParameterError
from specdist.states import (MoyalPureState, basis_state, diagonal_difference,
                             finite_state, zeta_state)
from specdist.zeta import zeta, zeta_partial


def test_basis_state_reads_diagonal():
    a = staircase(4, 1.0)
    for m in range(5):
        assert basis_state(m, 1.0).expect(a) == a.coeffs[m, m]


def test_expect_on_zero_element():
    assert basis_state(2, 1.0).expect(zero(1.0, 5)) == 0


def test_expect_offdiagonal_weights():
    st = finite_state([1.0, 1.0], 1.0)
    assert st.expect(basis(1.0, 0, 1)) == pytest.approx(0.5, abs=1e-15)
    st_i = finite_state([1.0, 1.0j], 1.0)
    assert st_i.expect(basis(1.0, 0, 1)) == pytest.approx(0.5j, abs=1e-15)


def test_expect_pads_small_elements():
    st = finite_state([1.0, 1.0, 1.0], 1.0)
    assert st.expect(basis(1.0, 0, 0)) == pytest.approx(1 / 3, abs=1e-15)


def test_basis_state_on_staircase_suffix_sums():
    theta = 2.0
    m0 = 6
    a = staircase(m0, theta)
    for n in range(m0 + 1):
        want = math.sqrt(theta / 2) * sum(1 / math.sqrt(k + 1) for k in range(n, m0 + 1))
        assert basis_state(n, theta).expect(a) == pytest.approx(want, abs=1e-13)
    assert basis_state(m0 + 1, theta).expect(a) == 0


def test_zeta_state_weights():
    st = zeta_state(2.0, 200000, 1.0)
    assert abs(st.c[0]) ** 2 == pytest.approx(1 / zeta(2.0), rel=1e-5)
    assert float(np.sum(np.abs(st.c) ** 2)) == pytest.approx(1.0, abs=1e-12)
    assert np.all(np.diff(np.abs(st.c)) < 0)


def test_zeta_state_metadata():
    st = zeta_state(1.5, 40000, 1.0)
    assert st.meta["partial_sum"] == pytest.approx(zeta_partial(1.5, 40001), rel=1e-14)
    assert st.meta["partial_sum"] / st.meta["zeta"] >= 0.99


def test_zeta_state_rejects_bad_exponent():
    with pytest.raises(ParameterError):
        zeta_state(1.0, 100, 1.0)
    with pytest.raises(ParameterError):
        zeta_state(0.5, 100, 1.0)


def test_finite_state_normalizes_and_records_factor():
    st = finite_state([3.0, 4.0], 1.0)
    assert st.meta["norm_factor"] == pytest.approx(5.0, abs=1e-14)
    assert float(np.sum(np.abs(st.c) ** 2)) == pytest.approx(1.0, abs=1e-15)


def test_finite_state_single_weight_is_basis_like():
    st = finite_state([1.0], 1.0)
    assert st.expect(basis(1.0, 0, 0)) == pytest.approx(1.0, abs=1e-15)


def test_diagonal_difference_examples():
    s0 = basis_state(0, 1.0)
    s1 = basis_state(1, 1.0)
    assert np.allclose(diagonal_difference(s1, s0), [-1.0, 1.0])
    assert not np.any(diagonal_difference(s0, s0))


def test_diagonal_difference_zeta_vs_basis():
    st = zeta_state(1.5, 50, 1.0)
    d = diagonal_difference(st, basis_state(0, 1.0))
    z = st.meta["partial_sum"]
    assert d[0] == pytest.approx(1.0 / z - 1.0, abs=1e-13)
    assert d[3] == pytest.approx(4.0 ** -1.5 / z, abs=1e-13)
    assert float(np.sum(d)) == pytest.approx(0.0, abs=1e-12)


def test_unnormalized_rejected():
    with pytest.raises(ParameterError):
        MoyalPureState(1.0, np.array([1.0, 1.0]))


def test_theta_mismatch_rejected():
    with pytest.raises(ParameterError):
        basis_state(0, 1.0).expect(basis(2.0, 0, 0))
    with pytest.raises(ParameterError):
        diagonal_difference(basis_state(0, 1.0), basis_state(0, 2.0))


def test_spec_strings():
    assert basis_state(3, 1.0).spec_string() == "basis:3"
    assert zeta_state(1.2, 100, 1.0).spec_string() == "zeta:1.2:100"
    assert finite_state([1, 2], 1.0).spec_string() == "finite[2]"


def test_state_serialization_is_self_describing():
    d = zeta_state(1.3, 20, 0.5).to_dict()
    assert d["kind"] == "zeta"
    assert d["meta"]["s"] == 1.3
    assert len(d["c_re"]) == 21
