"""Quadrature on the unit circle, pole bookkeeping and residue-corrected contours.

A deformed contour is always represented as the unit circle plus explicit
residue corrections, never as a reparameterized path.
"""
from dataclasses import dataclass, field

import numpy as np

from .errors import ConvergenceError, DomainError, ResidueError

RESIDUE_RADIUS = 1e-4
RESIDUE_NODES = 32


def circle_nodes(N, offset=0.0):
    """e^{2 pi i (j + offset) / N}; offset=0.5 keeps the nodes off y = +-1."""
    if N < 8 or N & (N - 1):
        raise DomainError(f"grid size {N} must be a power of two >= 8")
    return np.exp(2j * np.pi * (np.arange(N) + offset) / N)


@dataclass
class AnnulusEvaluator:
    """A pointwise function of one or more torus variables with its annulus of analyticity.

    ``annulus`` holds one (inner, outer) radius pair per variable; ``symmetric``
    flags y -> 1/y invariance per variable.
    """

    fn: callable
    annulus: tuple = ((0.0, np.inf),)
    symmetric: tuple = (True,)
    strict: bool = True

    @property
    def nvars(self):
        return len(self.annulus)

    def contains(self, *ys):
        for y, (lo, hi) in zip(ys, self.annulus):
            r = np.abs(np.asarray(y))
            if np.any(r <= lo) or np.any(r >= hi):
                return False
        return True

    def __call__(self, *ys):
        if self.strict and not self.contains(*ys):
            raise DomainError("evaluation point outside the declared annulus")
        return self.fn(*ys)

    def compose(self, other, fn):
        """Evaluator for fn built from self and other; the annuli intersect."""
        ann = tuple((max(a[0], b[0]), min(a[1], b[1])) for a, b in zip(self.annulus, other.annulus))
        sym = tuple(a and b for a, b in zip(self.symmetric, other.symmetric))
        return AnnulusEvaluator(fn, ann, sym, self.strict and other.strict)


def as_evaluator(f, annulus=(0.0, np.inf)):
    if isinstance(f, AnnulusEvaluator):
        return f
    return AnnulusEvaluator(f, (annulus,), (False,))


def circle_quadrature(f, N=128, offset=0.0):
    """(1/N) sum_j f(e^{2 pi i (j + offset) / N}), the trapezoid rule for the integral of f dy/(2 pi i y)."""
    f = as_evaluator(f)
    lo, hi = f.annulus[0]
    if not lo < 1.0 < hi:
        raise DomainError("unit circle is outside the evaluator's annulus")
    return complex(np.mean(f(circle_nodes(N, offset))))


def adaptive_circle(f, tol=1e-12, N0=32, cap=4096):
    """Double N from N0 until successive trapezoid sums agree.

    Returns (value, N) for the coarser grid of the agreeing pair, which already
    met the tolerance.
    """
    N = N0
    cur = circle_quadrature(f, N)
    while N < cap:
        prev, cur = cur, circle_quadrature(f, 2 * N)
        if abs(cur - prev) <= tol * max(1.0, abs(cur)):
            return prev, N
        N *= 2
    raise ConvergenceError(f"no convergence up to N={cap}", iterates=(prev, cur))


@dataclass(frozen=True)
class Pole:
    location: complex
    order: int = 1
    residue_available: bool = True
    kind: str = "in"


@dataclass
class PoleList:
    poles: list = field(default_factory=list)

    def __post_init__(self):
        uniq = []
        for pole in sorted(self.poles, key=lambda x: abs(x.location)):
            if not any(abs(pole.location - u.location) < 1e-12 and pole.kind == u.kind for u in uniq):
                uniq.append(pole)
        self.poles = uniq

    def __iter__(self):
        return iter(self.poles)

    def __len__(self):
        return len(self.poles)

    def min_distance_to_circle(self):
        if not self.poles:
            return np.inf
        return min(abs(abs(x.location) - 1.0) for x in self.poles)

    def pinch_distance(self):
        """Smallest gap between an 'in' and an 'out' pole; zero when the contour is pinched."""
        ins = np.array([x.location for x in self.poles if x.kind == "in"])
        outs = np.array([x.location for x in self.poles if x.kind == "out"])
        if not ins.size or not outs.size:
            return np.inf
        return float(np.min(np.abs(ins[:, None] - outs[None, :])))

    def misplaced(self):
        """'in' poles outside the circle and 'out' poles inside it."""
        return [x for x in self.poles
                if (x.kind == "in" and abs(x.location) > 1) or (x.kind == "out" and abs(x.location) < 1)]


def pole_scan(t, y1, p, q, floor=1e-6):
    """Poles in y of Gamma(t y1^{+-1} y^{+-1}; p, q).

    The sequences t y1^{+-1} p^j q^k converge to zero ('in'); their reciprocals
    run off to infinity ('out').  Terms with |p|^j |q|^k below ``floor`` are dropped.
    """
    poles = []
    J = int(np.log(floor) / np.log(abs(p))) + 1 if abs(p) > 0 else 1
    K = int(np.log(floor) / np.log(abs(q))) + 1 if abs(q) > 0 else 1
    for j in range(J):
        for k in range(K):
            c = complex(p) ** j * complex(q) ** k
            if abs(c) < floor:
                continue
            for s in (1, -1):
                a = complex(t) * complex(y1) ** s * c
                poles.append(Pole(a, 1, True, "in"))
                poles.append(Pole(1 / a, 1, True, "out"))
    return PoleList(poles)


def numeric_residue(g, a, radius=RESIDUE_RADIUS, nodes=RESIDUE_NODES, check_simple=True):
    """Residue of g at a from a small circle; ResidueError if the pole is not simple."""
    th = np.exp(2j * np.pi * (np.arange(nodes) + 0.5) / nodes)
    vals = g(a + radius * th)
    res = np.mean(vals * radius * th)
    if check_simple:
        c2 = np.mean(vals * (radius * th) ** 2)
        if abs(c2) > 1e-6 * max(abs(res), 1e-300) * radius + 1e-14 * radius:
            raise ResidueError(f"pole at {a} is not simple")
    return complex(res)


def residue_corrected_integral(f, N=128, corrections=(), residue=None, offset=0.0):
    """Integral of f(y) dy/(2 pi i y) over a deformed contour.

    ``corrections`` lists Pole objects: kind 'in' poles lying outside the unit
    circle are pulled inside the contour (+ residue), kind 'out' poles lying
    inside are pushed out (- residue).  ``residue`` optionally maps a pole
    location to the residue of f(y)/y there; otherwise it is computed on a
    small circle.
    """
    base = circle_quadrature(f, N, offset)
    g = lambda y: f.fn(y) / y if isinstance(f, AnnulusEvaluator) else f(y) / y
    total = base
    for pole in corrections:
        if pole.order != 1:
            raise ResidueError(f"pole at {pole.location} has order {pole.order}")
        r = residue(pole.location) if residue is not None else numeric_residue(g, pole.location)
        total += r if pole.kind == "in" else -r
    return total
