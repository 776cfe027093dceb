"""Integral operators on even functions of the torus variables.

Everything is written in multiplicative variables y = e^{2 pi i z}.  The
S2-type operators are multiplications by elliptic gamma products, the
S1-type operators are kernel transforms over the unit circle, evaluated with
the trapezoid rule.  A TorusGrid holds samples of a function of one to three
variables on the circle nodes; the grid path is the fast route used for the
Yang-Baxter checks, while the ``*_at`` functions evaluate at arbitrary points
(needed when difference operators shift arguments off the circle).
"""

from dataclasses import dataclass

import numpy as np

from .contour import (RESIDUE_RADIUS, AnnulusEvaluator, Pole, circle_nodes, numeric_residue,
                      residue_corrected_integral)
from .errors import (BasisValidationError, DomainError, ExceptionalParameter,
                     NotApplicable, PoleProximity)
from .special_fn import (TWO_PI_I, elliptic_gamma, jacobi_theta, qpochhammer_inf,
                         theta_mult)

REGIMES = ("QLess1", "QGreater1")
MARGIN = 0.8
EXCEPTIONAL_GUARD = 1e-6


@dataclass(frozen=True)
class OperatorParams:
    """Moduli and regime shared by all kernels.

    ``tau`` and ``eta`` fix p = e^{2 pi i tau}, q = e^{4 pi i eta} together with
    the square roots of p and q, so sqrt(pq) has a definite branch.  For
    QGreater1 (Im eta < 0) the kernels use the base 1/q.  ``half_shift`` flips
    the sign of sqrt(pq) in the two-variable multiplier.
    """

    tau: complex
    eta: complex
    regime: str = "QLess1"
    half_shift: bool = False

    def __post_init__(self):
        if self.regime not in REGIMES:
            raise DomainError(f"unknown regime {self.regime!r}")
        if complex(self.tau).imag <= 0:
            raise DomainError("Im(tau) must be positive")
        im = complex(self.eta).imag
        if (self.regime == "QLess1" and im <= 0) or (self.regime == "QGreater1" and im >= 0):
            raise DomainError(f"Im(eta) has the wrong sign for {self.regime}")

    @property
    def sign(self):
        return 1 if self.regime == "QLess1" else -1

    @property
    def p(self):
        return np.exp(TWO_PI_I * complex(self.tau))

    @property
    def q(self):
        """The kernel base: q itself, or 1/q in the QGreater1 regime."""
        return np.exp(2 * TWO_PI_I * self.sign * complex(self.eta))

    @property
    def sqrt_p(self):
        return np.exp(1j * np.pi * complex(self.tau))

    @property
    def sqrt_q(self):
        return np.exp(TWO_PI_I * self.sign * complex(self.eta))

    @property
    def sqrt_pq(self):
        r = self.sqrt_p * self.sqrt_q
        return -r if self.half_shift else r

    @property
    def kappa(self):
        return complex(qpochhammer_inf(self.p, self.p) * qpochhammer_inf(self.q, self.q)) / 2

    def t_of(self, a):
        return np.exp(-TWO_PI_I * self.sign * complex(a))

    def s_of(self, a):
        return self.sqrt_pq * np.exp(TWO_PI_I * self.sign * complex(a))

    def gamma(self, x):
        return elliptic_gamma(x, self.p, self.q)

    def swapped(self):
        """The same kernels with the roles of p and q exchanged."""
        if self.regime != "QLess1":
            raise DomainError("p <-> q exchange is only set up for QLess1")
        return OperatorParams(2 * complex(self.eta), complex(self.tau) / 2, self.regime, self.half_shift)


def inv_gamma_pm2(y, params):
    """1/Gamma(y^{+-2}) = theta(y^2; p) theta(y^{-2}; q), finite at y = +-1."""
    y2 = np.asarray(y, dtype=complex) ** 2
    return theta_mult(y2, params.p) * theta_mult(1 / y2, params.q)


def check_exceptional(t, params, depth=12):
    """ExceptionalParameter when t^2 is within the guard of p^{-j} q^{-k} or p^{j+1} q^{k+1}."""
    t2 = complex(t) ** 2
    p, q = params.p, params.q
    for j in range(depth):
        for k in range(depth):
            for lat in (p ** -j * q ** -k, p ** (j + 1) * q ** (k + 1)):
                if abs(lat) > 1e12 or abs(lat) < 1e-12:
                    continue
                if abs(t2 - lat) < EXCEPTIONAL_GUARD * max(1.0, abs(lat)):
                    raise ExceptionalParameter(f"t^2 = {t2} sits on the lattice point {lat}")


def _trivial(t):
    """+1 or -1 when t is exactly the identity or parity point, else None."""
    for s in (1, -1):
        if abs(complex(t) - s) < 1e-14:
            return s
    return None


def _check_outputs(t, yout):
    yo = np.abs(np.asarray(yout))
    worst = abs(t) * max(np.max(yo), np.max(1 / yo))
    if worst >= 1:
        raise DomainError(f"|t y^(+-1)| = {worst:.3g} >= 1: kernel poles cross the unit circle")


# ---------------------------------------------------------------- multipliers

def s2_multiplier(a, y1, y2, params):
    """Gamma(s y1^{+-1} y2^{+-1}) with s = sqrt(pq) e^{2 pi i a} (regime-adjusted)."""
    s = params.s_of(a)
    y1 = np.asarray(y1, dtype=complex)
    y2 = np.asarray(y2, dtype=complex)
    g = params.gamma
    return g(s * y1 * y2) * g(s * y1 / y2) * g(s * y2 / y1) * g(s / (y1 * y2))


def S2_mult(a, params):
    """The two-variable multiplier as an evaluator."""
    s = abs(params.s_of(a))
    r = 1 / s if s > 0 else np.inf
    ann = ((1 / np.sqrt(r), np.sqrt(r)),) * 2
    return AnnulusEvaluator(lambda y1, y2: s2_multiplier(a, y1, y2, params), ann, (True, True))


def bailey_D(s, y, w, params):
    """D(s; y, w) = Gamma(sqrt(pq) s^{-1} y^{+-1} w^{+-1})."""
    c = params.sqrt_pq / complex(s)
    y = np.asarray(y, dtype=complex)
    w = np.asarray(w, dtype=complex)
    g = params.gamma
    return g(c * y * w) * g(c * y / w) * g(c * w / y) * g(c / (y * w))


# ---------------------------------------------------------------- kernels

def s1_kernel(t, yout, y, params):
    """K(yout_i, y_j) such that (S f)(yout_i) = mean_j K_ij f(y_j)."""
    yo = np.asarray(yout, dtype=complex).reshape(-1, 1)
    yy = np.asarray(y, dtype=complex).reshape(1, -1)
    g = params.gamma
    num = g(t * yo * yy) * g(t * yo / yy) * g(t * yy / yo) * g(t / (yo * yy))
    return params.kappa / g(t * t) * num * inv_gamma_pm2(yy, params)


def s1_matrix(a, N, params, yout=None, offset=0.0, t=None):
    """Quadrature matrix of S1(a) (or of M(t) when t is given).

    Without ``yout`` the outputs are the grid nodes themselves and the
    identity and parity points are returned as permutation matrices.
    """
    t = params.t_of(a) if t is None else complex(t)
    nodes = circle_nodes(N, offset)
    triv = _trivial(t)
    if triv is not None:
        if yout is not None:
            raise ExceptionalParameter("identity/parity point needs grid outputs")
        shift = 0 if triv == 1 else N // 2
        return np.eye(N, dtype=complex)[(np.arange(N) + shift) % N]
    check_exceptional(t, params)
    if yout is None:
        _check_outputs(t, nodes)
        gp, gq = _node_pair_tables(t, N, offset, params)
        ii, jj = np.meshgrid(np.arange(N), np.arange(N), indexing="ij")
        num = gp[(ii + jj) % N] * gq[(ii - jj) % N]
        return params.kappa / params.gamma(t * t) * num * inv_gamma_pm2(nodes, params)[None, :] / N
    yout = np.asarray(yout, dtype=complex).ravel()
    _check_outputs(t, yout)
    return s1_kernel(t, yout, nodes, params) / N


def _node_pair_tables(c, N, offset, params):
    """Gamma(c x) Gamma(c / x) for x = y_i y_j and x = y_i / y_j on the grid, indexed by i + j and i - j mod N."""
    g = params.gamma
    m = np.arange(N)
    prod = np.exp(TWO_PI_I * (m + 2 * offset) / N)
    quot = np.exp(TWO_PI_I * m / N)
    return g(c * prod) * g(c / prod), g(c * quot) * g(c / quot)


def s1_apply(a, f, yout, params, N=128, offset=0.0, t=None):
    """(S1(a) f)(yout) for a callable f of one variable, at arbitrary outputs."""
    t = params.t_of(a) if t is None else complex(t)
    yout = np.asarray(yout, dtype=complex)
    triv = _trivial(t)
    if triv is not None:
        return f(triv * yout)
    K = s1_matrix(a, N, params, yout=yout.ravel(), offset=offset, t=t)
    return (K @ f(circle_nodes(N, offset))).reshape(yout.shape)


def S1_transform(a, f, params, N=128, offset=0.0):
    """S1(a) f as an evaluator on the annulus |t| < |y| < 1/|t|."""
    t = abs(params.t_of(a))
    ann = ((t, 1 / t),) if t < 1 else ((1.0, 1.0),)
    return AnnulusEvaluator(lambda y: s1_apply(a, f, y, params, N, offset), ann, (True,))


def bailey_M(t, f, wout, params, N=128, offset=0.0):
    """M(t): w -> (p;p)(q;q)/(4 pi i) int_T Gamma(t w^{+-1} z^{+-1}) / Gamma(t^2, z^{+-2}) f(z) dz/z."""
    t = complex(t)
    check_exceptional(t, params)
    w = np.asarray(wout, dtype=complex)
    _check_outputs(t, w)
    z = circle_nodes(N, offset)
    pref = complex(qpochhammer_inf(params.p, params.p) * qpochhammer_inf(params.q, params.q))
    out = np.empty(w.size, dtype=complex)
    fz = f(z) * inv_gamma_pm2(z, params)
    for i, wi in enumerate(w.ravel()):
        ker = (elliptic_gamma(t * wi * z, params.p, params.q) * elliptic_gamma(t * z / wi, params.p, params.q)
               * elliptic_gamma(t * wi / z, params.p, params.q) * elliptic_gamma(t / (wi * z), params.p, params.q))
        # dz/z over T is 2 pi i times the mean over nodes
        out[i] = pref / (4j * np.pi) * TWO_PI_I * np.mean(ker * fz)
    return out.reshape(w.shape) / elliptic_gamma(t * t, params.p, params.q)


# ---------------------------------------------------------------- grids

@dataclass
class TorusGrid:
    """Samples of a function of ``values.ndim`` torus variables at circle_nodes(N, offset)."""

    values: np.ndarray
    offset: float = 0.0

    @property
    def N(self):
        return self.values.shape[0]

    @property
    def dims(self):
        return self.values.ndim

    @property
    def nodes(self):
        return circle_nodes(self.N, self.offset)

    @classmethod
    def sample(cls, f, dims, N, offset=0.0):
        if not 1 <= dims <= 3:
            raise DomainError("grids have one to three axes")
        y = circle_nodes(N, offset)
        mesh = np.meshgrid(*([y] * dims), indexing="ij")
        return cls(np.asarray(f(*mesh), dtype=complex), offset)

    def reflection(self):
        """Index permutation implementing y -> 1/y on the nodes."""
        if abs(2 * self.offset - round(2 * self.offset)) > 1e-12:
            raise DomainError("node set is not closed under y -> 1/y")
        return (self.N - np.arange(self.N) - int(round(2 * self.offset))) % self.N

    def symmetric_axes(self, tol=1e-12):
        ref = self.reflection()
        scale = max(np.max(np.abs(self.values)), 1e-300)
        return tuple(bool(np.max(np.abs(np.take(self.values, ref, axis=ax) - self.values)) <= tol * scale)
                     for ax in range(self.dims))

    def with_values(self, values):
        return TorusGrid(values, self.offset)


OPERATOR_AXES = {"S1": (0,), "S3": (1,), "S5": (2,), "S2": (0, 1), "S4": (1, 2)}


def apply_s1_grid(a, grid, axis, params):
    M = s1_matrix(a, grid.N, params, offset=grid.offset)
    out = np.tensordot(M, grid.values, axes=([1], [axis]))
    return grid.with_values(np.moveaxis(out, 0, axis))


def apply_s2_grid(a, grid, axes, params):
    N = grid.N
    gp, gq = _node_pair_tables(params.s_of(a), N, grid.offset, params)
    jj, kk = np.meshgrid(np.arange(N), np.arange(N), indexing="ij")
    mult = gp[(jj + kk) % N] * gq[(jj - kk) % N]
    shape = [1] * grid.dims
    shape[axes[0]] = shape[axes[1]] = grid.N
    return grid.with_values(grid.values * mult.reshape(shape))


def apply_operator(name, a, grid, params):
    axes = OPERATOR_AXES[name]
    if max(axes) >= grid.dims:
        raise DomainError(f"{name} needs a grid with {max(axes) + 1} axes")
    if len(axes) == 1:
        return apply_s1_grid(a, grid, axes[0], params)
    return apply_s2_grid(a, grid, axes, params)


def apply_word(word, grid, params):
    """Apply a product of operators written left to right, so the last factor acts first."""
    for name, a in reversed(list(word)):
        grid = apply_operator(name, a, grid, params)
    return grid


def permute_axes(grid, i, j):
    return grid.with_values(np.swapaxes(grid.values, i, j))


# ---------------------------------------------------------------- R-operators

def r_word(u, v, pair="12"):
    """The four-factor product S2(u1-v2) S1(u1-v1) S3(u2-v2) S2(u2-v1) on the given pair of sites."""
    (u1, u2), (v1, v2) = u, v
    names = {"12": ("S2", "S1", "S3"), "23": ("S4", "S3", "S5")}[pair]
    mid, left, right = names
    return [(mid, u1 - v2), (left, u1 - v1), (right, u2 - v2), (mid, u2 - v1)]


def R_factorized(u, v, grid, params, pair="12"):
    return apply_word(r_word(u, v, pair), grid, params)


def R_factorized_at(u, v, f, Y1, Y2, params, N=128, offset=0.5):
    """(R12(u|v) f)(Y1, Y2) at arbitrary points via the factorized form.

    The inner S3 kernel is sampled with outputs Y2 and the outer S1 kernel with
    outputs Y1, so the points may lie off the circle as long as the kernel
    poles stay on their side of it.  ``f`` may return a stack of shape
    (m, N, N); the result then has shape (m, len(Y1)).
    """
    (u1, u2), (v1, v2) = u, v
    Y1 = np.asarray(Y1, dtype=complex).ravel()
    Y2 = np.asarray(Y2, dtype=complex).ravel()
    x = circle_nodes(N, offset)
    X, Y = np.meshgrid(x, x, indexing="ij")
    gp, gq = _node_pair_tables(params.s_of(u2 - v1), N, offset, params)
    jj, kk = np.meshgrid(np.arange(N), np.arange(N), indexing="ij")
    F = np.asarray(f(X, Y), dtype=complex) * (gp[(jj + kk) % N] * gq[(jj - kk) % N])
    K3 = s1_matrix(u2 - v2, N, params, yout=Y2, offset=offset)
    K1 = s1_matrix(u1 - v1, N, params, yout=Y1, offset=offset)
    inner = np.einsum("pj,...jl,pl->...p", K1, F, K3)
    return inner * s2_multiplier(u1 - v2, Y1, Y2, params)


def R_direct(u, v, f, Z1, Z2, params, N=64, offset=0.5):
    """The permuted R-operator P R12 from its explicit double-integral kernel.

    [R f](z1, z2) = kappa^2 Gamma(sqrt(pq) z1^{+-} z2^{+-} e^{2 pi i (u1 - v2)})
        x int int Gamma(t1 z2^{+-} x^{+-}, t3 z1^{+-} y^{+-}, sqrt(pq) e^{2 pi i (u2 - v1)} x^{+-} y^{+-})
                  / Gamma(t1^2, t3^2, x^{+-2}, y^{+-2}) f(x, y) dx/(2 pi i x) dy/(2 pi i y)
    with t1 = e^{2 pi i (v1 - u1)}, t3 = e^{2 pi i (v2 - u2)} (directions flip for QGreater1).
    """
    (u1, u2), (v1, v2) = u, v
    sg = params.sign
    t1 = np.exp(TWO_PI_I * sg * (v1 - u1))
    t3 = np.exp(TWO_PI_I * sg * (v2 - u2))
    for t in (t1, t3):
        check_exceptional(t, params)
    c_out = params.sqrt_pq * np.exp(TWO_PI_I * sg * (u1 - v2))
    c_in = params.sqrt_pq * np.exp(TWO_PI_I * sg * (u2 - v1))
    g = params.gamma
    x = circle_nodes(N, offset)
    X, Y = np.meshgrid(x, x, indexing="ij")
    base = (g(c_in * X * Y) * g(c_in * X / Y) * g(c_in * Y / X) * g(c_in / (X * Y))
            * inv_gamma_pm2(X, params) * inv_gamma_pm2(Y, params) * f(X, Y))
    norm = params.kappa ** 2 / (g(t1 * t1) * g(t3 * t3))
    Z1 = np.asarray(Z1, dtype=complex).ravel()
    Z2 = np.asarray(Z2, dtype=complex).ravel()
    out = np.empty(Z1.size, dtype=complex)
    for i, (z1, z2) in enumerate(zip(Z1, Z2)):
        kx = g(t1 * z2 * x) * g(t1 * z2 / x) * g(t1 * x / z2) * g(t1 / (z2 * x))
        ky = g(t3 * z1 * x) * g(t3 * z1 / x) * g(t3 * x / z1) * g(t3 / (z1 * x))
        front = g(c_out * z1 * z2) * g(c_out * z1 / z2) * g(c_out * z2 / z1) * g(c_out / (z1 * z2))
        out[i] = front * norm * (kx @ base @ ky) / N ** 2
    return out


# ---------------------------------------------------------------- continuation

def _in_sequence(a, p, q, floor=1e-8):
    """a p^j q^k for the (j, k) with |p^j q^k| >= floor."""
    out = []
    j = 0
    while abs(p) ** j >= floor:
        k = 0
        while abs(p) ** j * abs(q) ** k >= floor:
            out.append(complex(a) * complex(p) ** j * complex(q) ** k)
            k += 1
        j += 1
    return out


def s1_continued(a, f, wout, params, f_in_poles=(), N=128, offset=0.5, t=None, magnitude=False):
    """S1(a) f beyond the ordinary domain, with the contour deformed past escaping poles.

    Poles of the integrand converging to zero ("in" poles: t w^{+-1} p^j q^k and
    the ``f_in_poles`` seeds times p^j q^k) that lie outside the unit circle
    are picked up with their residues; the y -> 1/y symmetry of the integrand
    supplies the mirrored "out" poles inside the circle.  With ``magnitude``
    the pair (value, scale) is returned, the scale being the mean modulus of
    the integrand on the circle plus the moduli of the residues taken.
    """
    t = params.t_of(a) if t is None else complex(t)
    check_exceptional(t, params)
    w = np.asarray(wout, dtype=complex)
    pref = params.kappa / params.gamma(t * t)
    g = params.gamma
    out = np.empty(w.size, dtype=complex)
    mag = np.empty(w.size)
    nodes = circle_nodes(N, offset)
    for i, wi in enumerate(w.ravel()):
        def integrand(y, wi=wi):
            ker = g(t * wi * y) * g(t * wi / y) * g(t * y / wi) * g(t / (wi * y))
            return pref * ker * inv_gamma_pm2(y, params) * f(y)

        seeds = [t * wi, t / wi] + list(f_in_poles)
        every = np.array([z for s in seeds for z in _in_sequence(s, params.p, params.q)])
        every = np.concatenate([every, 1 / every])
        escaped = [z for z in every[:every.size // 2] if abs(z) > 1]
        for z in escaped:
            if abs(abs(z) - 1) < 1e-6:
                raise PoleProximity(f"pole {z} sits on the unit circle")
        poles = [Pole(z, 1, True, "in") for z in escaped] + [Pole(1 / z, 1, True, "out") for z in escaped]

        def residue(a, integrand=integrand):
            # nearly pinched pairs sit O(t^2 - lattice) apart: keep the circle well inside the gap
            gaps = np.abs(every - a)
            gap = np.min(gaps[gaps > 1e-13 * max(1.0, abs(a))], initial=np.inf)
            r = numeric_residue(lambda y: integrand(y) / y, a, radius=min(RESIDUE_RADIUS, 0.3 * gap))
            taken.append(abs(r))
            return r

        taken = []
        out[i] = residue_corrected_integral(integrand, N, poles, residue=residue, offset=offset)
        if magnitude:
            mag[i] = np.mean(np.abs(integrand(nodes))) + sum(taken)
    if magnitude:
        return out.reshape(w.shape), mag.reshape(w.shape)
    return out.reshape(w.shape)


# ---------------------------------------------------------------- finite sector

def _half_int(x, name):
    if abs(2 * x - round(2 * x)) > 1e-12 or x < -0.5:
        raise DomainError(f"{name} = {x} must be a half-integer >= -1/2")
    return int(round(2 * x))


def discrete_t(ell_q, ell_p, sign, params):
    """t = sign q^{-ell_q - 1/2} p^{-ell_p - 1/2}."""
    nq = _half_int(ell_q, "ell_q") + 1
    np_ = _half_int(ell_p, "ell_p") + 1
    return sign * params.sqrt_q ** (-nq) * params.sqrt_p ** (-np_)


def _residue_weights(t, w, n, base, other):
    """A_k for k = 0..n: the residue weights along one base of the double sum."""
    tw2 = (t * w) ** 2
    out = []
    acc = np.ones_like(w)
    for k in range(n + 1):
        out.append(acc * theta_mult(tw2 * base ** (2 * k), other) / theta_mult(tw2, other))
        acc = acc * (theta_mult(t * t * base ** k, other) * theta_mult(tw2 * base ** k, other)
                     / (theta_mult(base ** (k + 1), other) * theta_mult(w * w * base ** (k + 1), other)))
    return out


def B_discrete(ell_q, ell_p, sign, params):
    """The terminating residue-sum operator at t = sign q^{-ell_q-1/2} p^{-ell_p-1/2}.

    Returns a function f -> (w -> [B f](w)) where
    [B f](w) = Gamma(w^{-2}) / Gamma(t^{-2} w^{-2})
               sum_{k<=N, j<=M} A_k(q; p) A_j(p; q) f(t q^k p^j w)
                 / (t^{4(jk+j+k)} w^{2(j+k)} p^{2jk+j^2} q^{2jk+k^2}),
    N = 2 ell_q + 1, M = 2 ell_p + 1.
    """
    if sign not in (1, -1):
        raise DomainError("sign must be +1 or -1")
    if params.regime != "QLess1":
        raise DomainError("the terminating sum is set up for |q| < 1")
    Nq = _half_int(ell_q, "ell_q") + 1
    Mp = _half_int(ell_p, "ell_p") + 1
    t = discrete_t(ell_q, ell_p, sign, params)
    p, q = params.p, params.q

    def apply(f):
        def g(w, magnitude=False):
            """[B f](w); with ``magnitude`` also the sum of the term moduli."""
            w = np.asarray(w, dtype=complex)
            if Nq == 0 and Mp == 0:
                val = f(t * w)
                return (val, np.abs(val)) if magnitude else val
            A = _residue_weights(t, w, Nq, q, p)
            B = _residue_weights(t, w, Mp, p, q)
            pref = params.gamma(w ** -2) / params.gamma(t ** -2 * w ** -2)
            total = np.zeros(w.shape, dtype=complex)
            mag = np.zeros(w.shape)
            for k in range(Nq + 1):
                for j in range(Mp + 1):
                    den = (t ** (4 * (j * k + j + k)) * w ** (2 * (j + k))
                           * p ** (2 * j * k + j * j) * q ** (2 * j * k + k * k))
                    term = pref * A[k] * B[j] * f(t * q ** k * p ** j * w) / den
                    total = total + term
                    mag = mag + np.abs(term)
            return (total, mag) if magnitude else total
        return g

    apply.t = t
    return apply


def theta_plus_basis(ell, base, params, n_check=12, tol=1e-10, seed=7):
    """Even theta functions of order 4 ell in y, quasi-periodic under y -> b y.

    Built as monomials thb4^{2 ell - k} thb3^k in the half-modulus thetas
    (modulus tau/2 for b = p, eta for b = q), each checked against
    f(1/y) = f(y) and f(b y) = (b y^2)^{-2 ell} f(y) before being returned.
    """
    n = _half_int(ell, "ell")
    if n < 0:
        raise DomainError("ell must be >= 0")
    if base == "p":
        mod, b = complex(params.tau) / 2, params.p
    elif base == "q":
        mod, b = complex(params.eta), params.q
    else:
        raise DomainError("base must be 'p' or 'q'")

    def make(k):
        def f(y):
            x = np.log(np.asarray(y, dtype=complex)) / TWO_PI_I
            return jacobi_theta(4, x, mod) ** (n - k) * jacobi_theta(3, x, mod) ** k
        return f

    rng = np.random.default_rng(seed)
    ys = np.exp(TWO_PI_I * (rng.uniform(0, 1, n_check) + 1j * rng.uniform(-0.05, 0.05, n_check)))
    out = []
    for k in range(n + 1):
        f = make(k)
        fy = f(ys)
        scale = np.maximum(np.abs(fy), 1e-300)
        even = np.max(np.abs(f(1 / ys) - fy) / scale)
        quasi = np.max(np.abs(f(b * ys) - (b * ys ** 2) ** (-n) * fy) / np.maximum(np.abs(f(b * ys)), scale))
        if even > tol or quasi > tol:
            raise BasisValidationError(f"candidate {k} of order {2 * n} fails: even {even:.2e}, quasi {quasi:.2e}")
        out.append(AnnulusEvaluator(f, ((0.0, np.inf),), (True,)))
    return out


def zero_mode_factors(ell_q, ell_p, i, j, params):
    """The pair of theta factors whose product is annihilated by B_discrete(ell_q, ell_p).

    For spin ell >= 0 the factor is the basis element theta+_{4 ell}; a spin of
    -1/2 contributes the reciprocal 1/theta+_2 of an order-two theta function
    in the other base (index j or i picks the order-two basis element).
    """
    if abs(ell_q + 0.5) < 1e-12 and abs(ell_p + 0.5) < 1e-12:
        raise NotApplicable("at ell_q = ell_p = -1/2 the operator is the identity or parity")

    def factor(ell, base, idx):
        if ell >= 0:
            return theta_plus_basis(ell, base, params)[idx]
        d = theta_plus_basis(0.5, base, params)[idx]
        return lambda y: 1 / d(y)

    return factor(ell_q, "p", i), factor(ell_p, "q", j)


def zero_mode_check(ell_q, ell_p, i, j, params, sign=1, n_points=20, seed=11):
    """|B f| over the summed moduli of its terms, maximized over sample points.

    f is the product of the two zero_mode_factors; the ratio measures the
    cancellation that makes f a zero mode.
    """
    fa, fb = zero_mode_factors(ell_q, ell_p, i, j, params)
    f = lambda y: fa(y) * fb(y)
    rng = np.random.default_rng(seed)
    w = np.exp(TWO_PI_I * (rng.uniform(0, 1, n_points) + 1j * rng.uniform(-0.05, 0.05, n_points)))
    val, mag = B_discrete(ell_q, ell_p, sign, params)(f)(w, magnitude=True)
    return float(np.max(np.abs(val) / np.maximum(mag, 1e-300)))


def meromorphic_zero_mode(t, t1, params):
    """f = Gamma(t1 y^{+-1}, t2 y^{+-1}) with t^2 t1 t2 = 1, and the seeds of its 'in' poles."""
    t2 = 1 / (complex(t) ** 2 * complex(t1))
    g = params.gamma

    def f(y):
        y = np.asarray(y, dtype=complex)
        return g(t1 * y) * g(t1 / y) * g(t2 * y) * g(t2 / y)

    return f, (t1, t2)
