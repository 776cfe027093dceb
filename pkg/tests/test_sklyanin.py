import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from ellint import sklyanin as sk
from ellint.errors import DomainError
from ellint.special_fn import jacobi_theta, theta_bar

ETA = 0.13 + 0.17j
TAU = 0.1 + 0.8j
ELL = 0.7
Z = sk.halton_points(8)


def f_test(z):
    return theta_bar(3, z, TAU) + np.cos(2 * np.pi * z)


def test_halton_points_avoid_half_periods():
    z = sk.halton_points()
    assert len(z) == 20
    assert np.min(np.minimum(np.abs(z), np.abs(z - 0.5))) >= 1e-2
    assert np.array_equal(z, sk.halton_points())


@pytest.mark.parametrize("variant", sk.VARIANTS)
def test_quadratic_relations(variant):
    assert sk.quadratic_relations_residual(ELL, ETA, TAU, variant) < 1e-9


@pytest.mark.parametrize("variant", ["Standard", "Modified", "ModularPartner"])
def test_quadratic_relations_q_greater_one(variant):
    assert sk.quadratic_relations_residual(ELL, ETA.conjugate(), TAU, variant, "QGreater1") < 1e-9


@pytest.mark.parametrize("variant", sk.VARIANTS)
def test_casimirs_are_scalars(variant):
    assert sk.casimir_check(ELL, ETA, TAU, variant) < 1e-9


def test_wrong_spin_breaks_casimir_value():
    S = sk.generators(ELL, ETA, TAU)
    k0, _ = sk.casimir_values(ELL + 0.3, ETA, TAU)
    K0 = S[0] @ S[0] + S[1] @ S[1] + S[2] @ S[2] + S[3] @ S[3]
    diff = K0(f_test)(Z) - k0 * f_test(Z)
    assert np.max(np.abs(diff)) > 1e-3


@pytest.mark.parametrize("a", range(4))
def test_modified_is_gauge_conjugate_of_standard(a):
    Sm = sk.make_generator(a, ELL, ETA, TAU, "Modified")
    Ss = sk.make_generator(a, ELL, ETA, TAU, "Standard")
    e = lambda x: np.exp(1j * np.pi * np.asarray(x) ** 2 / ETA)
    conj = e(Z) * Ss(lambda x: f_test(x) / e(x))(Z)
    assert np.max(np.abs(Sm(f_test)(Z) - conj)) < 1e-12 * np.max(np.abs(conj))


@settings(max_examples=20, deadline=None)
@given(st.floats(0.05, 0.3), st.floats(0.05, 0.3), st.floats(-0.3, 0.3), st.floats(0.5, 1.2))
def test_structure_constants_even_in_eta(a, b, c, d):
    eta, tau = complex(a, b), complex(c, d)
    J, Jm = sk.structure_constants(eta, tau), sk.structure_constants(-eta, tau)
    for key in ("J12", "J23", "J31"):
        assert abs(J[key] - Jm[key]) <= 1e-12 * max(1.0, abs(J[key]))


def test_generator_index_and_regime_checks():
    with pytest.raises(DomainError):
        sk.make_generator(4, ELL, ETA, TAU)
    with pytest.raises(DomainError):
        sk.make_generator(0, ELL, ETA, TAU, "Standard", "QGreater1")
    with pytest.raises(DomainError):
        sk.variant_data("Other", ETA, TAU)


def test_difference_operator_algebra():
    A = sk.DifferenceOperator([(lambda z: 2 + 0 * z, 0.1)])
    B = sk.DifferenceOperator([(lambda z: z, -0.3)])
    f = lambda z: z ** 2
    z = np.array([0.2, 0.7])
    assert np.allclose((A @ B)(f)(z), 2 * (z + 0.1) * (z - 0.2) ** 2)
    assert np.allclose((A - A)(f)(z), 0)
    assert np.allclose((A @ B).shifts(), [-0.2])


def test_L_factorization():
    u1, u2 = 0.21 + 0.03j, -0.07 + 0.02j
    z = sk.halton_points()
    L = sk.L_operator(u1, u2, ETA, TAU)
    for f in sk.test_functions(TAU).values():
        direct = np.array([[L[i][k](f)(z) for k in range(2)] for i in range(2)])
        fact = sk.factorized_L_apply(u1, u2, ETA, TAU, f, z)
        mag = np.array([[L[i][k].magnitude(f)(z) for k in range(2)] for i in range(2)])
        assert np.max(np.abs(direct - fact) / mag) < 1e-10


def test_L_changes_sign_with_u_and_eta():
    u1, u2 = 0.21 + 0.03j, -0.07 + 0.02j
    L = sk.L_operator(u1, u2, ETA, TAU)
    Lm = sk.L_operator(-u1, -u2, -ETA, TAU)
    for i in range(2):
        for k in range(2):
            assert np.max(np.abs(L[i][k](f_test)(Z) + Lm[i][k](f_test)(Z))) < 1e-12


def test_spin_half_reduces_to_pauli():
    th1 = jacobi_theta(1, 2 * ETA, TAU)
    for a, m in enumerate(sk.spin_half_matrices(ETA, TAU)):
        assert np.max(np.abs(m - th1 * sk.PAULI[a])) < 1e-10


def test_spin_half_L_is_baxter_matrix():
    u = 0.23 + 0.05j
    u1, u2 = sk.spectral_pair(u, 0.5, ETA)
    L = sk.L_operator(u1, u2, ETA, TAU)
    z = sk.halton_points()
    basis = [lambda x: theta_bar(4, x, TAU), lambda x: theta_bar(3, x, TAU)]
    big = np.zeros((4, 4), dtype=complex)
    for i in range(2):
        for k in range(2):
            big[2 * i:2 * i + 2, 2 * k:2 * k + 2] = sk.operator_matrix_on_basis(L[i][k], basis, z)
    R = sk.baxter_R(u, ETA, TAU)
    assert np.max(np.abs(big - jacobi_theta(1, 2 * ETA, TAU) * R)) < 1e-10


@pytest.mark.parametrize("b", range(4))
def test_baxter_matrix_invariant_under_pauli_conjugation(b):
    R = sk.baxter_R(0.31 - 0.04j, ETA, TAU)
    X = np.kron(sk.PAULI[b], sk.PAULI[b])
    assert np.max(np.abs(X @ R @ X - R)) < 1e-13


@settings(max_examples=20, deadline=None)
@given(st.floats(-0.5, 0.5), st.floats(-0.1, 0.1), st.floats(-0.5, 0.5), st.floats(-0.1, 0.1))
def test_NM_product(ar, ai, br, bi):
    a, b = complex(ar, ai), complex(br, bi)
    M, N = sk.MN_matrices(a, b, TAU)
    expect = -2 * jacobi_theta(1, a - b, TAU) * jacobi_theta(1, a + b, TAU) * np.eye(2)
    assert np.max(np.abs(N @ M - expect)) < 1e-12 * max(1.0, np.max(np.abs(expect)))


@pytest.mark.parametrize("sigma3", [False, True])
def test_NM_closed_form(sigma3):
    a1, b1, a2, b2 = 0.11 + 0.02j, -0.27, 0.35 - 0.05j, 0.08 + 0.01j
    N = sk.MN_matrices(a1, b1, TAU)[1]
    M = sk.MN_matrices(a2, b2, TAU)[0]
    mid = sk.PAULI[3] if sigma3 else np.eye(2)
    rhs = sk.NM_product_rhs(a1, b1, a2, b2, TAU, sigma3)
    assert np.max(np.abs(N @ mid @ M - rhs)) < 1e-12
    if not sigma3:
        th1 = lambda x: jacobi_theta(1, x, TAU)
        assert abs(rhs[0, 1] + 2 * th1(b1 - b2) * th1(b1 + b2)) < 1e-12
