"""Theta functions, q-products, the elliptic gamma function and its modified form.

Every product is evaluated as a sum of principal-branch logarithms of its
factors followed by a single exponentiation.  Only the exponential of the sum
is ever exposed, so branch ambiguities of the individual logs cancel out.
"""
from dataclasses import dataclass
from itertools import product

import numpy as np

from .errors import DomainError, PoleProximity

EPS_TRUNC = 1e-18
POLE_DISTANCE = 1e-10
BASE_MARGIN = 1e-3
_CHUNK = 4096

TWO_PI_I = 2j * np.pi


def _as_complex(x):
    return np.asarray(x, dtype=complex)


def _check_base(q, name="q"):
    if not abs(q) < 1.0 - BASE_MARGIN:
        raise DomainError(f"|{name}| = {abs(q):.6g} must be below {1 - BASE_MARGIN}")


def _n_terms(aq, scale=1.0):
    """Number of geometric terms k with aq**k * scale >= EPS_TRUNC."""
    if aq == 0.0:
        return 1
    return max(1, int(np.ceil(np.log(EPS_TRUNC / max(scale, 1.0)) / np.log(aq))) + 1)


def _log1m(x):
    with np.errstate(divide="ignore", invalid="ignore"):
        return np.log1p(-x)


def _finish(log_sum, shape):
    with np.errstate(over="ignore", under="ignore"):
        out = np.exp(log_sum)
    out = np.where(np.isneginf(log_sum.real), 0.0, out)
    return out.reshape(shape) if shape else complex(out.reshape(()))


@dataclass(frozen=True)
class EllipticModuli:
    """Modular parameter tau and eta, with the bases p = e^{2 pi i tau}, q = e^{4 pi i eta}.

    Quasi-periods (w1, w2, w3) are optional; when given they define the bases
    used by the modified gamma function.
    """

    tau: complex
    eta: complex
    omegas: tuple = None

    def __post_init__(self):
        if complex(self.tau).imag <= 0:
            raise DomainError("Im(tau) must be positive")
        if self.omegas is not None:
            check_incommensurate(self.omegas)

    @property
    def p(self):
        return np.exp(TWO_PI_I * complex(self.tau))

    @property
    def q(self):
        return np.exp(2 * TWO_PI_I * complex(self.eta))

    @property
    def regime(self):
        aq = abs(self.q)
        if abs(aq - 1.0) < 1e-14:
            return "QUnitCircle"
        return "QLess1" if aq < 1 else "QGreater1"

    def quasi_bases(self):
        """(q, p, r, q~, p~, r~) built from the quasi-periods."""
        if self.omegas is None:
            raise DomainError("no quasi-periods attached")
        return quasi_bases(self.omegas)


def check_incommensurate(omegas, nmax=8, tol=1e-9):
    w = [complex(x) for x in omegas]
    if any(x == 0 for x in w):
        raise DomainError("quasi-periods must be nonzero")
    scale = max(abs(x) for x in w)
    rng = range(-nmax, nmax + 1)
    for n in product(rng, repeat=3):
        if n == (0, 0, 0):
            continue
        if abs(n[0] * w[0] + n[1] * w[1] + n[2] * w[2]) < tol * scale:
            raise DomainError(f"quasi-periods are commensurate: {n}")


def quasi_bases(omegas):
    w1, w2, w3 = (complex(x) for x in omegas)
    e = lambda x: np.exp(TWO_PI_I * x)
    return {
        "q": e(w1 / w2), "p": e(w3 / w2), "r": e(w3 / w1),
        "qt": e(-w2 / w1), "pt": e(-w2 / w3), "rt": e(-w1 / w3),
    }


def qpochhammer_inf(x, q):
    """(x; q)_inf = prod_{k>=0} (1 - q^k x)."""
    _check_base(q)
    x = _as_complex(x)
    shape = x.shape
    flat = x.ravel()
    K = _n_terms(abs(q), float(np.max(np.abs(flat), initial=1.0)))
    qk = complex(q) ** np.arange(K)
    acc = np.zeros(flat.shape, dtype=complex)
    for start in range(0, flat.size, _CHUNK):
        blk = flat[start:start + _CHUNK]
        acc[start:start + _CHUNK] = _log1m(blk[:, None] * qk[None, :]).sum(axis=1)
    return _finish(acc, shape)


def theta_mult(t, p):
    """theta(t; p) = (t; p)_inf (p/t; p)_inf."""
    t = _as_complex(t)
    if np.any(t == 0):
        raise DomainError("theta(t; p) needs t != 0")
    return qpochhammer_inf(t, p) * qpochhammer_inf(p / t, p)


# characteristic shift of z, half-integer summation index, overall sign
_THETA_FORMS = {1: (0.5, True, -1.0), 2: (0.0, True, 1.0), 3: (0.0, False, 1.0), 4: (0.5, False, 1.0)}


def jacobi_theta(j, z, tau):
    """Jacobi theta_j(z | tau) from its Fourier series, j = 1..4.

    The term with index k has size exp(-pi Im(tau) (k + Im w / Im tau)^2) up to a
    common factor, so the window around the peak k* = -Im w / Im tau holding
    every term above EPS_TRUNC times the peak is known before summing.
    """
    tau = complex(tau)
    if tau.imag <= 0:
        raise DomainError("Im(tau) must be positive")
    if j not in _THETA_FORMS:
        raise DomainError(f"theta index {j} not in 1..4")
    shift, half, sign = _THETA_FORMS[j]
    z = _as_complex(z)
    w = (z + shift).ravel()
    if w.size == 0:
        return sign * np.zeros(z.shape, dtype=complex)
    peak = -w.imag / tau.imag
    width = np.sqrt((np.log(1 / EPS_TRUNC) + 4.0) / (np.pi * tau.imag))
    lo = int(np.floor(peak.min() - width)) - 1
    hi = int(np.ceil(peak.max() + width)) + 1
    k = np.arange(lo, hi + 1) + (0.5 if half else 0.0)
    total = np.zeros(w.shape, dtype=complex)
    for start in range(0, w.size, _CHUNK):
        blk = w[start:start + _CHUNK, None]
        total[start:start + _CHUNK] = np.exp(1j * np.pi * k * k * tau + TWO_PI_I * k * blk).sum(axis=1)
    out = (sign * total).reshape(z.shape)
    return out if out.shape else complex(out)


def theta_bar(j, z, tau):
    """theta_j(z | tau/2)."""
    return jacobi_theta(j, z, complex(tau) / 2)


def theta1_product(z, tau):
    """theta_1 through its product representation, an independent route to the series."""
    p = np.exp(TWO_PI_I * complex(tau))
    z = _as_complex(z)
    pref = 1j * np.exp(1j * np.pi * complex(tau) / 4) * np.exp(-1j * np.pi * z)
    return pref * qpochhammer_inf(p, p) * theta_mult(np.exp(TWO_PI_I * z), p)


def _gamma_lattice(p, q, scale):
    ap, aq = abs(p), abs(q)
    J = _n_terms(ap, scale)
    K = _n_terms(aq, scale)
    jj, kk = np.meshgrid(np.arange(J), np.arange(K), indexing="ij")
    mags = ap ** jj * aq ** kk
    keep = mags * scale >= EPS_TRUNC
    keep[0, 0] = True
    jj, kk = jj[keep], kk[keep]
    return complex(p) ** jj * complex(q) ** kk


def elliptic_gamma(t, p, q, check_poles=True):
    """Gamma(t; p, q) = prod_{j,k>=0} (1 - t^{-1} p^{j+1} q^{k+1}) / (1 - t p^j q^k).

    Raises PoleProximity within POLE_DISTANCE of the pole lattice t = p^{-j} q^{-k}.
    """
    _check_base(p, "p")
    _check_base(q, "q")
    t = _as_complex(t)
    if np.any(t == 0):
        raise DomainError("elliptic gamma needs t != 0")
    shape = t.shape
    flat = t.ravel()
    pq = complex(p) * complex(q)
    scale = max(float(np.max(np.abs(flat), initial=1.0)), float(np.max(np.abs(pq / flat), initial=1.0)))
    lattice = _gamma_lattice(p, q, scale)
    acc = np.zeros(flat.shape, dtype=complex)
    for start in range(0, flat.size, _CHUNK):
        blk = flat[start:start + _CHUNK, None]
        tc = blk * lattice[None, :]
        if check_poles:
            dist = np.abs(1.0 - tc) / np.abs(lattice)[None, :]
            if np.min(dist) < POLE_DISTANCE:
                bad = blk.ravel()[np.argmin(np.min(dist, axis=1))]
                raise PoleProximity(f"t = {bad} lies within {POLE_DISTANCE} of a pole of Gamma")
        acc[start:start + _CHUNK] = (_log1m((pq / blk) * lattice[None, :]) - _log1m(tc)).sum(axis=1)
    return _finish(acc, shape)


def elliptic_gamma_add(z, tau, two_eta):
    """Additive form Gamma(z | tau, 2 eta) = Gamma(e^{2 pi i z}; e^{2 pi i tau}, e^{2 pi i 2eta})."""
    return elliptic_gamma(np.exp(TWO_PI_I * _as_complex(z)),
                          np.exp(TWO_PI_I * complex(tau)), np.exp(TWO_PI_I * complex(two_eta)))


def gamma_pm(t, x, p, q):
    """Gamma(t x^{+-1}; p, q) as the product over both signs."""
    x = _as_complex(x)
    return elliptic_gamma(t * x, p, q) * elliptic_gamma(t / x, p, q)


def gamma_residue_factor(j, k, p, q):
    """Limit of (1 - a/z) Gamma(a' / z) at the pole z -> a = a' q^k p^j.

    (-1)^{jk+j+k} q^{(j+1)k(k+1)/2} p^{(k+1)j(j+1)/2}
    / ((p;p)(q;q) theta(q, ..., q^k; p) theta(p, ..., p^j; q))
    """
    if j < 0 or k < 0:
        raise DomainError("residue indices must be non-negative")
    _check_base(p, "p")
    _check_base(q, "q")
    p, q = complex(p), complex(q)
    num = (-1) ** (j * k + j + k) * q ** ((j + 1) * k * (k + 1) // 2) * p ** ((k + 1) * j * (j + 1) // 2)
    den = qpochhammer_inf(p, p) * qpochhammer_inf(q, q)
    for m in range(1, k + 1):
        den *= theta_mult(q ** m, p)
    for m in range(1, j + 1):
        den *= theta_mult(p ** m, q)
    return num / den


def bernoulli_B22(u, w1, w2):
    w1, w2 = complex(w1), complex(w2)
    if w1 == 0 or w2 == 0:
        raise DomainError("quasi-periods must be nonzero")
    u = _as_complex(u)
    return u * u / (w1 * w2) - u / w1 - u / w2 + w1 / (6 * w2) + w2 / (6 * w1) + 0.5


def bernoulli_B33(u, omegas):
    w = [complex(x) for x in omegas]
    if any(x == 0 for x in w):
        raise DomainError("quasi-periods must be nonzero")
    s = sum(w)
    x = _as_complex(u) - s / 2
    return x * (x * x - sum(v * v for v in w) / 4) / (w[0] * w[1] * w[2])


def _ordered_pair(w1, w2):
    """Order (w1, w2) so that Im(w1/w2) > 0; G is symmetric in the two."""
    im = (w1 / w2).imag
    if abs(im) < 1e-12:
        raise DomainError("w1/w2 must be non-real")
    return (w1, w2) if im > 0 else (w2, w1)


def modified_gamma_G(u, omegas, form="ProductForm"):
    """Modified elliptic gamma function G(u; w1, w2, w3).

    ProductForm:  Gamma(e^{2 pi i u/w2}; p, q) / Gamma(q~ e^{2 pi i u/w1}; q~, r)
    ModularForm:  e^{-pi i B33(u)/3} Gamma(e^{-2 pi i u/w3}; r~, p~)
    """
    w1, w2, w3 = (complex(x) for x in omegas)
    u = _as_complex(u)
    if form == "ProductForm":
        w1, w2 = _ordered_pair(w1, w2)
        b = quasi_bases((w1, w2, w3))
        for name in ("p", "q", "qt", "r"):
            _check_base(b[name], name)
        num = elliptic_gamma(np.exp(TWO_PI_I * u / w2), b["p"], b["q"])
        den = elliptic_gamma(b["qt"] * np.exp(TWO_PI_I * u / w1), b["qt"], b["r"])
        return num / den
    if form == "ModularForm":
        b = quasi_bases((w1, w2, w3))
        _check_base(b["rt"], "rt")
        _check_base(b["pt"], "pt")
        pref = np.exp(-1j * np.pi / 3 * bernoulli_B33(u, (w1, w2, w3)))
        return pref * elliptic_gamma(np.exp(-TWO_PI_I * u / w3), b["rt"], b["pt"])
    raise DomainError(f"unknown form {form!r}")


def theta_modular_check(u, w1, w2):
    """Residual, scaled by max(1, |rhs|), of theta(e^{-2 pi i u/w1}; e^{-2 pi i w2/w1}) = e^{pi i B22} theta(e^{2 pi i u/w2}; e^{2 pi i w1/w2}).

    The pair is ordered so that Im(w1/w2) > 0, which puts both nomes inside
    the unit disk; B22 is symmetric so nothing else changes.
    """
    w1, w2 = _ordered_pair(complex(w1), complex(w2))
    u = _as_complex(u)
    lhs = theta_mult(np.exp(-TWO_PI_I * u / w1), np.exp(-TWO_PI_I * w2 / w1))
    rhs = np.exp(1j * np.pi * bernoulli_B22(u, w1, w2)) * theta_mult(np.exp(TWO_PI_I * u / w2),
                                                                    np.exp(TWO_PI_I * w1 / w2))
    return float(np.max(np.abs(lhs - rhs)) / max(1.0, float(np.max(np.abs(rhs)))))
