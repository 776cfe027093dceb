"""Acceptance criteria A1-A12.

Each test prints one PASS/FAIL line; the lines are repeated together in the
pytest terminal summary.  Run on its own with

    pytest tests/test_acceptance.py -v
"""
import time

import pytest

import conftest
from ellint import cli, perm_engine
from ellint import relations as rel

SEED = rel.DEFAULT_SEED


def criterion(code, title, ok, detail):
    line = f"{code} {'PASS' if ok else 'FAIL'}  {title}: {detail}"
    print(line)
    conftest.ACCEPTANCE_LINES.append(line)
    assert ok, line


def draws(fn, n, seed=SEED, **kw):
    return [fn(seed=seed + k, **kw) for k in range(n)]


def worst(reports):
    return max(r.residual for r in reports)


def all_pass(reports, tol=None):
    return all(r.passed and (tol is None or r.residual <= tol) for r in reports)


def summary(reports):
    return f"{len(reports)} draws, worst residual {worst(reports):.2e}"


def beta_block(regime):
    t0 = time.perf_counter()
    reps = draws(rel.check_beta_integral, 25, regime=regime)
    control = rel.check_beta_integral(seed=SEED, regime=regime, unbalance=0.01)
    elapsed = time.perf_counter() - t0
    ok = all_pass(reps, 1e-8) and control.residual > 1e-3 and elapsed < 10
    return ok, f"{summary(reps)}, control {control.residual:.2e}, {elapsed:.1f} s"


def intertwining_block(regime):
    reps = [r for which in ("S1", "S3") for variant in ("Modified", "ModularPartner")
            for r in draws(rel.check_intertwining, 10, which=which, variant=variant, regime=regime)]
    return all_pass(reps, 1e-7), summary(reps)


def coxeter_block(regime):
    parts = {
        "coxeter": (draws(rel.check_coxeter_cubic, 10, regime=regime), 1e-7),
        "STR": (draws(rel.check_bailey_STR, 10, regime=regime), 1e-7),
        "functional": (draws(rel.check_star_triangle_functional, 10, regime=regime), 1e-8),
    }
    ok = all(all_pass(reps, tol) for reps, tol in parts.values())
    return ok, "; ".join(f"{k} {worst(reps):.2e}" for k, (reps, _) in parts.items()) + " (10 draws each)"


def test_A1_beta_integral():
    criterion("A1", "elliptic beta integral", *beta_block("QLess1"))


def test_A2_appendix_sweep():
    t0 = time.perf_counter()
    reps = rel.appendix_sweep(SEED, n=200)
    elapsed = time.perf_counter() - t0
    ok = all(r.passed for r in reps) and elapsed < 30
    criterion("A2", "theta / gamma / G identity sweep", ok,
              f"{len(reps)} families x 200 draws, worst {worst(reps):.2e}, {elapsed:.1f} s")


def test_A3_sklyanin_algebra():
    t0 = time.perf_counter()
    reps = rel.sklyanin_suite(SEED)
    elapsed = time.perf_counter() - t0
    ok = all_pass(reps, 1e-9) and elapsed < 30
    criterion("A3", "Sklyanin algebra relations", ok, f"worst {worst(reps):.2e}, {elapsed:.1f} s")


def test_A4_intertwining():
    criterion("A4", "intertwining S1/S3 x Modified/ModularPartner", *intertwining_block("QLess1"))


def test_A5_coxeter_star_triangle():
    criterion("A5", "Coxeter cubic / Bailey star-triangle / functional", *coxeter_block("QLess1"))


def test_A6_inversion():
    strict = draws(rel.check_inversion, 10)
    weak = draws(rel.check_inversion, 5, weak=True)
    criterion("A6", "inversion", all_pass(strict + weak, 1e-7),
              f"strict {worst(strict):.2e} (10), weak {worst(weak):.2e} (5)")


def test_A7_bailey_lemma():
    reps = draws(rel.check_bailey_lemma, 5)
    criterion("A7", "Bailey lemma", all_pass(reps, 1e-7), summary(reps))


def test_A8_rll_and_cross_check():
    single = draws(rel.check_RLL, 5)
    double = draws(rel.check_RLL, 5, double=True)
    cross = draws(rel.check_R_cross, 5)
    ok = all_pass(single + double, 1e-6) and all_pass(cross, 1e-7) and perm_engine.rll_gate().passed
    criterion("A8", "RLL relations and factorized vs direct R", ok,
              f"RLL {worst(single):.2e}, RLL double {worst(double):.2e}, cross {worst(cross):.2e}")


def test_A9_yang_baxter():
    gate = perm_engine.ybe_gate()
    times, reps = [], []
    for k in range(3):
        t0 = time.perf_counter()
        reps.append(rel.check_YBE(seed=SEED + k, N=32))
        times.append(time.perf_counter() - t0)
    ok = gate.passed and all_pass(reps, 1e-6) and max(times) <= 300
    criterion("A9", "Yang-Baxter on N=32 grids", ok,
              f"word gate {'ok' if gate.passed else 'FAILED'}, {summary(reps)}, slowest draw {max(times):.1f} s")


def test_A10_finite_dimensional_sector():
    triv = rel.check_discrete_trivial(SEED)
    zm = rel.check_zero_modes(SEED)
    mero = draws(rel.check_meromorphic_zero_mode, 3)
    ok = triv.residual <= 1e-12 and zm.residual <= 1e-8 and all_pass(mero, 1e-7)
    criterion("A10", "finite-dimensional sector", ok,
              f"identity/parity {triv.residual:.1e}, zero modes {zm.residual:.1e}, meromorphic {worst(mero):.1e}")


def test_A11_q_greater_one():
    results = {"beta": beta_block("QGreater1"), "intertwining": intertwining_block("QGreater1"),
               "coxeter": coxeter_block("QGreater1")}
    ok = all(r[0] for r in results.values())
    criterion("A11", "A1/A4/A5 with |q| > 1", ok,
              " | ".join(f"{k}: {r[1]}" for k, r in results.items()))


def test_A12_determinism(tmp_path):
    outs = []
    for name in ("first", "second"):
        path = tmp_path / f"{name}.json"
        code = cli.main(["--suite", "beta,discrete,zero_modes,meromorphic", "--seed", str(SEED), "--draws", "2",
                         "--out", str(path)])
        outs.append((code, path.with_suffix(".csv").read_bytes()))
    ok = outs[0][0] == outs[1][0] == 0 and outs[0][1] == outs[1][1]
    criterion("A12", "byte-identical CSV across runs", ok, f"{len(outs[0][1])} bytes each")


if __name__ == "__main__":
    raise SystemExit(pytest.main([__file__, "-q"]))
