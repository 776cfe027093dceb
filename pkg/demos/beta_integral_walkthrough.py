"""Walk through the elliptic beta integral and the S1 operator built on it.

    python3 demos/beta_integral_walkthrough.py

Prints the two sides of the beta integral for a few seeded draws, shows the
quadrature converging as the grid doubles, and then uses the same integral to
check S1 on a product of gamma functions, first inside the ordinary domain and
then past |t| = 1 where residues have to be added.
"""
import numpy as np

from ellint import operators as ops
from ellint import relations as rel


def beta_sides():
    print("elliptic beta integral: kappa * int prod Gamma(t_k y^+-) / Gamma(y^+-2) vs prod Gamma(t_j t_k)")
    for seed in range(3):
        P, ts = rel.draw_beta(rel.Sampler(seed))
        lhs, rhs = rel.beta_integral_sides(ts, P)
        print(f"  seed {seed}: |p|={abs(P.p):.3f} |q|={abs(P.q):.3f}  lhs={lhs:.12f}  rhs={rhs:.12f}")
    P, ts = rel.draw_beta(rel.Sampler(0))
    rhs = rel.beta_integral_sides(ts, P, 8)[1]
    print("  grid doubling for seed 0:")
    for N in (8, 16, 32, 64, 128):
        lhs = rel.beta_integral_sides(ts, P, N)[0]
        print(f"    N={N:4d}  |lhs - rhs| = {abs(lhs - rhs):.2e}")


def s1_on_gamma_product():
    P = ops.OperatorParams(0.1 + 0.2j, 0.05 + 0.11j)
    rng = np.random.default_rng(3)
    base = list(0.75 * np.exp(2j * np.pi * rng.uniform(0, 1, 3)))
    w = np.exp(2j * np.pi * np.array([0.12, 0.31]))
    print("\nS1(a) on f = prod Gamma(t_k y^+-), closed form from the beta integral")
    for t in (0.6 * np.exp(1.1j), 1.15 * np.exp(0.5j)):
        ts = base + [P.p * P.q / (t * t * np.prod(base))]
        f = lambda y: np.prod([P.gamma(tk * y) * P.gamma(tk / y) for tk in ts], axis=0)
        closed = np.prod([P.gamma(t * tk * w) * P.gamma(t * tk / w) for tk in ts], axis=0)
        closed = closed * np.prod([P.gamma(ts[j] * ts[k]) for j in range(4) for k in range(j + 1, 4)])
        a = np.log(t) / (-2j * np.pi)
        if abs(t) < 1:
            val, how = ops.s1_apply(a, f, w, P), "plain circle"
        else:
            val, how = ops.s1_continued(a, f, w, P, f_in_poles=ts, N=256), "circle + residues"
        err = np.max(np.abs(val - closed)) / np.max(np.abs(closed))
        print(f"  |t| = {abs(t):.2f} ({how}): relative error {err:.2e}")


if __name__ == "__main__":
    beta_sides()
    s1_on_gamma_product()
