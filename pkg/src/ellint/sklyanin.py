"""Sklyanin-algebra generators as two-term difference operators, L-operators and their factorization.

Functions are callables of the additive variable z (y = e^{2 pi i z}).  A
difference operator is a list of (coefficient, shift) pairs acting as
f(z) -> sum_k c_k(z) f(z + delta_k); composition stays in that form.
"""
from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError
from .special_fn import jacobi_theta, theta_bar

VARIANTS = ("Standard", "Modified", "HalfShifted", "ModularPartner", "SecondDouble")

PAULI = (
    np.eye(2, dtype=complex),
    np.array([[0, 1], [1, 0]], dtype=complex),
    np.array([[0, -1j], [1j, 0]], dtype=complex),
    np.array([[1, 0], [0, -1]], dtype=complex),
)


@dataclass
class DifferenceOperator:
    terms: list = field(default_factory=list)
    variant: str = "Standard"

    def __call__(self, f):
        terms = list(self.terms)

        def g(z):
            z = np.asarray(z, dtype=complex)
            return sum(c(z) * f(z + d) for c, d in terms)
        return g

    def __add__(self, other):
        return DifferenceOperator(self.terms + other.terms, self.variant)

    def __sub__(self, other):
        return self + (-1) * other

    def __rmul__(self, scalar):
        return DifferenceOperator([(_times(c, scalar), d) for c, d in self.terms], self.variant)

    def __matmul__(self, other):
        """Composition: (self @ other) f = self(other(f))."""
        terms = [(_product(ca, cb, da), da + db) for ca, da in self.terms for cb, db in other.terms]
        return DifferenceOperator(terms, self.variant)

    def magnitude(self, f):
        """z -> sum_k |c_k(z)| |f(z + delta_k)|, the scale against which cancellations are judged."""
        terms = list(self.terms)

        def g(z):
            z = np.asarray(z, dtype=complex)
            return sum(np.abs(c(z) * f(z + d)) for c, d in terms)
        return g

    def shifts(self):
        return sorted({complex(d) for _, d in self.terms}, key=lambda x: (x.real, x.imag))


def _times(c, s):
    return lambda z: s * c(z)


def _product(ca, cb, da):
    return lambda z: ca(z) * cb(z + da)


@dataclass(frozen=True)
class VariantData:
    """Effective (eta, tau), spin offset, phase sign and z-scale of a variant."""

    eta: complex
    tau: complex
    offset: float
    sigma: int
    zscale: complex = 1.0
    gshift: complex = 0.0


def variant_data(variant, eta, tau, regime="QLess1"):
    eta, tau = complex(eta), complex(tau)
    flip = 1 if regime == "QGreater1" else -1
    if variant == "Standard":
        return VariantData(eta, tau, 0.0, 0)
    if variant == "HalfShifted":
        return VariantData(eta, tau, 0.5, 0)
    if variant == "Modified":
        return VariantData(eta, tau, 0.0, flip)
    if variant == "ModularPartner":
        if regime == "QGreater1":
            return VariantData(-tau / 2, -2 * eta, 0.0, 1)
        return VariantData(tau / 2, 2 * eta, 0.0, -1)
    if variant == "SecondDouble":
        # the modular transformation eta -> 1/(4 eta), tau -> tau/(2 eta), z -> z/(2 eta)
        e2 = 1 / (4 * eta)
        return VariantData(e2, tau / (2 * eta), 0.0, -1, 1 / (2 * eta), -e2)
    raise DomainError(f"unknown variant {variant!r}")


def spin_to_g(ell, eta):
    return complex(eta) * (2 * complex(ell) + 1)


def make_generator(a, ell, eta, tau, variant="Standard", regime="QLess1", g=None):
    """Generator S^a, a = 0..3, of the given realization.

    The spin enters only through g = eta (2 ell + 1); pass ``g`` to set it directly.
    """
    if a not in (0, 1, 2, 3):
        raise DomainError("generator index must be 0..3")
    if regime == "QGreater1" and complex(eta).imag >= 0:
        raise DomainError("QGreater1 generators need Im(eta) < 0")
    if regime == "QLess1" and complex(eta).imag <= 0 and variant != "Standard":
        raise DomainError("QLess1 generators need Im(eta) > 0")
    g = spin_to_g(ell, eta) if g is None else complex(g)
    v = variant_data(variant, eta, tau, regime)
    h, t, c, s, k = v.eta, v.tau, v.offset, v.sigma, v.zscale
    ge = g * k + v.gshift
    j = a + 1
    pref = (1j if a == 2 else 1.0) * np.exp(1j * np.pi * s * h) * jacobi_theta(j, h, t)
    plus = lambda z: pref * jacobi_theta(j, 2 * k * z - ge + h + c, t) * np.exp(2j * np.pi * s * k * z) \
        / jacobi_theta(1, 2 * k * z, t)
    minus = lambda z: -pref * jacobi_theta(j, -2 * k * z - ge + h + c, t) * np.exp(-2j * np.pi * s * k * z) \
        / jacobi_theta(1, 2 * k * z, t)
    step = h / k
    return DifferenceOperator([(plus, step), (minus, -step)], variant)


def generators(ell, eta, tau, variant="Standard", regime="QLess1", g=None):
    return [make_generator(a, ell, eta, tau, variant, regime, g) for a in range(4)]


def structure_constants(eta, tau):
    th = [jacobi_theta(j, eta, tau) for j in range(1, 5)]
    if min(abs(x) for x in th[1:]) < 1e-14:
        raise DomainError("theta_2,3,4(eta) must be nonzero")
    t1, t2, t3, t4 = th
    z = lambda j: jacobi_theta(j, 0, tau)
    d = lambda j: jacobi_theta(j, 2 * eta, tau)
    return {
        "J12": t1 ** 2 * t4 ** 2 / (t2 ** 2 * t3 ** 2),
        "J23": t1 ** 2 * t2 ** 2 / (t3 ** 2 * t4 ** 2),
        "J31": -t1 ** 2 * t3 ** 2 / (t2 ** 2 * t4 ** 2),
        "J1": d(2) * z(2) / t2 ** 2,
        "J2": d(3) * z(3) / t3 ** 2,
        "J3": d(4) * z(4) / t4 ** 2,
    }


def casimir_values(ell, eta, tau, variant="Standard", regime="QLess1", g=None):
    """Scalar values (K0, K2) taken by the Casimir operators."""
    g = spin_to_g(ell, eta) if g is None else complex(g)
    v = variant_data(variant, eta, tau, regime)
    ge = g * v.zscale + v.gshift
    j = 2 if v.offset else 1
    th = lambda x: jacobi_theta(j, x, v.tau)
    return 4 * th(ge) ** 2, 4 * th(ge + v.eta) * th(ge - v.eta)


# cyclic triples and the structure constant paired with each
CYCLIC = ((1, 2, 3, "J23"), (2, 3, 1, "J31"), (3, 1, 2, "J12"))


def halton_points(n=20, avoid=1e-2):
    """Real points in [0, 1) from the base-2 van der Corput sequence, kept away from 0 and 1/2."""
    out, k = [], 1
    while len(out) < n:
        x, f, m = 0.0, 0.5, k
        while m:
            x += f * (m & 1)
            m >>= 1
            f /= 2
        if min(abs(x), abs(x - 0.5), abs(1 - x)) >= avoid:
            out.append(x)
        k += 1
    return np.array(out)


def test_functions(tau):
    """The fixed family 1, y+1/y, y^2+1/y^2, theta3bar, theta4bar, theta3bar*theta4bar as callables of z."""
    return {
        "one": lambda z: np.ones_like(np.asarray(z, dtype=complex)),
        "cos1": lambda z: 2 * np.cos(2 * np.pi * np.asarray(z, dtype=complex)),
        "cos2": lambda z: 2 * np.cos(4 * np.pi * np.asarray(z, dtype=complex)),
        "th3": lambda z: theta_bar(3, z, tau),
        "th4": lambda z: theta_bar(4, z, tau),
        "th34": lambda z: theta_bar(3, z, tau) * theta_bar(4, z, tau),
    }


def _rel(diff, ref):
    return float(np.max(np.abs(diff)) / max(1.0, float(np.max(np.abs(ref)))))


def _scaled(diff, *mags):
    """Pointwise |diff| over the summed term magnitudes, maximized over points."""
    scale = sum(np.abs(m) for m in mags)
    return float(np.max(np.abs(diff) / np.maximum(scale, 1e-300)))


def quadratic_relations_residual(ell, eta, tau, variant="Standard", regime="QLess1", points=None, funcs=None):
    """Largest scaled residual of both families of quadratic relations over test functions and points."""
    S = generators(ell, eta, tau, variant, regime)
    v = variant_data(variant, eta, tau, regime)
    J = structure_constants(v.eta, v.tau)
    z = halton_points() if points is None else points
    z = z / v.zscale
    funcs = test_functions(tau) if funcs is None else funcs
    worst = 0.0
    for f in funcs.values():
        for al, be, ga, key in CYCLIC:
            op = S[al] @ S[be] - S[be] @ S[al] - 1j * (S[0] @ S[ga] + S[ga] @ S[0])
            worst = max(worst, _scaled(op(f)(z), op.magnitude(f)(z)))
            op = S[0] @ S[al] - S[al] @ S[0] - 1j * J[key] * (S[be] @ S[ga] + S[ga] @ S[be])
            worst = max(worst, _scaled(op(f)(z), op.magnitude(f)(z)))
    return worst


def casimir_check(ell, eta, tau, variant="Standard", regime="QLess1", funcs=None, points=None):
    """Residual of K0 f = K0_value f and K2 f = K2_value f, plus [K, S^a] = 0."""
    S = generators(ell, eta, tau, variant, regime)
    v = variant_data(variant, eta, tau, regime)
    J = structure_constants(v.eta, v.tau)
    k0, k2 = casimir_values(ell, eta, tau, variant, regime)
    z = (halton_points() if points is None else points) / v.zscale
    funcs = test_functions(tau) if funcs is None else funcs
    K0 = S[0] @ S[0] + S[1] @ S[1] + S[2] @ S[2] + S[3] @ S[3]
    K2 = J["J1"] * (S[1] @ S[1]) + J["J2"] * (S[2] @ S[2]) + J["J3"] * (S[3] @ S[3])
    worst = 0.0
    for f in funcs.values():
        fz = f(z)
        for K, val in ((K0, k0), (K2, k2)):
            worst = max(worst, _scaled(K(f)(z) - val * fz, K.magnitude(f)(z), val * fz))
            for a in range(4):
                op = K @ S[a] - S[a] @ K
                worst = max(worst, _scaled(op(f)(z), op.magnitude(f)(z)))
    return worst


def weights(u, eta, tau):
    """Baxter weights w_a(u) = theta_{a+1}(u + eta) / theta_{a+1}(eta)."""
    return [jacobi_theta(a + 1, u + eta, tau) / jacobi_theta(a + 1, eta, tau) for a in range(4)]


def L_operator(u1, u2, eta, tau, variant="Standard", regime="QLess1"):
    """2x2 matrix of difference operators sum_a w_a(u) sigma_a (x) S^a with u = u1 + u2, g = u1 - u2."""
    v = variant_data(variant, eta, tau, regime)
    S = generators(0, eta, tau, variant, regime, g=u1 - u2)
    w = weights(u1 + u2, v.eta, v.tau)
    return [[w[0] * S[0] + w[3] * S[3], w[1] * S[1] + (-1j * w[2]) * S[2]],
            [w[1] * S[1] + (1j * w[2]) * S[2], w[0] * S[0] + (-w[3]) * S[3]]]


def spectral_pair(u, ell, eta):
    """(u1, u2) = (u/2 + eta(ell + 1/2), u/2 - eta(ell + 1/2))."""
    h = complex(eta) * (complex(ell) + 0.5)
    return u / 2 + h, u / 2 - h


def MN_matrices(a, b, tau):
    """M(a;b) = [[th3(a), -th3(b)], [-th4(a), th4(b)]], N(a;b) = [[th4(b), th3(b)], [th4(a), th3(a)]] (bar thetas)."""
    t3 = lambda x: theta_bar(3, x, tau)
    t4 = lambda x: theta_bar(4, x, tau)
    M = np.array([[t3(a), -t3(b)], [-t4(a), t4(b)]], dtype=complex)
    N = np.array([[t4(b), t3(b)], [t4(a), t3(a)]], dtype=complex)
    return M, N


def NM_product_rhs(a1, b1, a2, b2, tau, sigma3=False):
    """Closed form of N(a1;b1) M(a2;b2), or of N sigma_3 M when sigma3 is set."""
    j = 4 if sigma3 else 1
    th = lambda x, y: jacobi_theta(j, x - y, tau) * jacobi_theta(j, x + y, tau)
    return 2 * np.array([[th(b1, a2), -th(b1, b2)], [th(a1, a2), -th(a1, b2)]], dtype=complex)


def factorized_L_apply(u1, u2, eta, tau, f, z):
    """Entries of (1/theta1(2z)) M(z-u1; z+u1) diag(e^{eta d}, e^{-eta d}) N(z-u2; z+u2) applied to f."""
    z = np.asarray(z, dtype=complex)
    out = np.zeros((2, 2) + z.shape, dtype=complex)
    Mz = MN_matrices(z - u1, z + u1, tau)[0]
    for sgn, j in ((1, 0), (-1, 1)):
        zs = z + sgn * eta
        Nz = MN_matrices(zs - u2, zs + u2, tau)[1]
        for i in range(2):
            for k in range(2):
                out[i, k] += Mz[i, j] * Nz[j, k] * f(zs)
    return out / jacobi_theta(1, 2 * z, tau)


def operator_matrix_on_basis(op, basis, points):
    """Matrix A with op(basis[j]) = sum_i A[i, j] basis[i], fitted by least squares at the points."""
    B = np.array([b(points) for b in basis]).T
    cols = [np.linalg.lstsq(B, op(b)(points), rcond=None)[0] for b in basis]
    return np.array(cols).T


def spin_half_matrices(eta, tau, points=None):
    """Matrices of the four standard generators at spin 1/2 in the basis (theta4bar, theta3bar)."""
    z = halton_points() if points is None else points
    basis = [lambda x: theta_bar(4, x, tau), lambda x: theta_bar(3, x, tau)]
    return [operator_matrix_on_basis(S, basis, z) for S in generators(0.5, eta, tau)]


def baxter_R(u, eta, tau):
    w = weights(u, eta, tau)
    return sum(w[a] * np.kron(PAULI[a], PAULI[a]) for a in range(4))
