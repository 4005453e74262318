"""Poisson structures, derivations along the flow, structure extension."""
import numpy as np
import pytest

import extkit as ek
from extkit import jets
from extkit.poisson import apply_xl, apply_xl2, base_flow, bracket, jacobi_residual


def harmonic():
    f = ek.ScalarField(lambda x: 0.5 * (x[0] ** 2 + x[1] ** 2), dim=2)
    return ek.HamiltonianSystem(ek.canonical_structure(2), f,
                                coord_names=("q", "p"))


def test_canonical_block_signs():
    m = ek.canonical_structure(4).matrix(np.zeros(4))
    expect = np.zeros((4, 4))
    expect[0, 2] = expect[1, 3] = 1.0
    expect[2, 0] = expect[3, 1] = -1.0
    np.testing.assert_array_equal(m, expect)


def test_canonical_bracket_of_coordinates():
    st = ek.canonical_structure(2)
    q = ek.ScalarField(lambda x: x[0], dim=2)
    p = ek.ScalarField(lambda x: x[1], dim=2)
    x = np.array([0.3, -1.2])
    assert bracket(st, q, p, x) == 1.0
    assert bracket(st, p, q, x) == -1.0
    assert bracket(st, q, q, x) == 0.0


def test_odd_canonical_dim_rejected():
    with pytest.raises(ValueError):
        ek.canonical_structure(3)


def test_antisymmetry_enforced_for_const():
    bad = np.array([[0.0, 1.0], [1.0, 0.0]])
    with pytest.raises(ValueError):
        ek.custom_structure(2, const=bad)


def test_ham_vector_field_harmonic():
    sys = harmonic()
    rhs = base_flow(sys)
    np.testing.assert_allclose(rhs(np.array([1.0, 2.0])), [2.0, -1.0])


def test_apply_xl_linear_growth():
    sys = harmonic()
    f = ek.ScalarField(lambda x: x[0], dim=2)
    # dq/dt = p
    assert apply_xl(sys, f, np.array([0.7, -0.3])) == -0.3


def test_apply_xl2_vs_nested_fd():
    sys = harmonic()
    f = ek.ScalarField(lambda x: x[0] ** 3 * x[1] + jets.sin(x[1]), dim=2)
    x = np.array([0.8, 0.5])
    got = apply_xl2(sys, f, x)

    rhs = base_flow(sys)

    def xlf(pt):
        j = f.jet1(pt)
        return float(np.real(j.grad @ rhs(pt)))

    h = 1e-5
    num = 0.0
    grad = np.zeros(2)
    for i in range(2):
        xp = x.copy(); xp[i] += h
        xm = x.copy(); xm[i] -= h
        grad[i] = (xlf(xp) - xlf(xm)) / (2 * h)
    num = grad @ rhs(x)
    assert abs(got - num) <= 1e-6 * max(1.0, abs(num))


def plane_entries(co):
    a = co[0] * co[1]
    return [[0.0, a], [-a, 0.0]]


def test_nonconstant_structure_gradients():
    st = ek.custom_structure(2, entries=plane_entries)
    x = np.array([1.5, -2.0])
    m, dm = st.matrix_with_grads(x)
    assert m[0, 1] == -3.0
    assert m[1, 0] == 3.0
    np.testing.assert_allclose(dm[0][0, 1], -2.0)  # d(x1 x2)/dx1 at x2=-2
    np.testing.assert_allclose(dm[1][0, 1], 1.5)


def test_jacobi_residual_zero_in_dim_two():
    st = ek.custom_structure(2, entries=plane_entries)
    assert jacobi_residual(st, np.array([0.4, 1.1])) <= 1e-9


def test_jacobi_residual_catches_violation():
    # pi_12 = x3, pi_13 = x1 fails the cyclic identity
    def entries(co):
        return [[0.0, co[2], co[0]],
                [-co[2], 0.0, 0.0],
                [-co[0], 0.0, 0.0]]

    st = ek.custom_structure(3, entries=entries)
    assert jacobi_residual(st, np.array([1.0, 2.0, 3.0])) > 0.1


def test_extend_structure_constant():
    st = ek.canonical_structure(2)
    ext = ek.extend_structure(st)
    m = ext.matrix(np.zeros(4))
    assert m[0, 1] == 1.0 and m[1, 0] == -1.0
    np.testing.assert_array_equal(m[2:, 2:], st.matrix(np.zeros(2)))
    assert np.all(m[0:2, 2:] == 0.0)


def test_extend_structure_entries():
    st = ek.custom_structure(2, entries=plane_entries)
    ext = ek.extend_structure(st)
    x = np.array([9.0, 9.0, 1.5, -2.0])  # u, p_u prepended
    m = ext.matrix(x)
    assert m[0, 1] == 1.0
    assert m[2, 3] == -3.0
    # gradients must live in the extended index space
    _, dm = ext.matrix_with_grads(x)
    assert dm.shape == (4, 4, 4)
    np.testing.assert_allclose(dm[2][2, 3], -2.0)
    np.testing.assert_allclose(dm[0][2, 3], 0.0)


def test_system_dim_consistency():
    f = ek.ScalarField(lambda x: x[0], dim=3)
    with pytest.raises(ValueError):
        ek.HamiltonianSystem(ek.canonical_structure(2), f)
