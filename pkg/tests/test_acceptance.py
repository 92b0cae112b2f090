"""Acceptance criteria, one test each.

Every test records a PASS/FAIL line (printed in the terminal summary and on
stdout) before asserting, so a full run lists all eleven outcomes.
"""
import math
import time

from conftest import ACCEPTANCE_LINES
from matula_asym.asymptotics import (
    PARTITION_COEFFS,
    corollary1_logP,
    lemma31_residual,
    lemma44_coeffs,
    lemma44_residual,
    theorem1_logM,
)
from matula_asym.constants import Dm, Dprime_m, Km, euler_gamma, finite_part_constants, stieltjes_gamma1, zeta
from matula_asym.counting import IntegerLambdaSystem, PrimeLambdaSystem, count_M2m, enumerate_Am, partition_sum_exact
from matula_asym.matula import count_height_le2, decode, encode, rooted_trees
from matula_asym.primes import loglog_remainder_ratios


def report(n, title, ok, detail):
    line = f"[{'PASS' if ok else 'FAIL'}] criterion {n:>2}: {title}: {detail}"
    ACCEPTANCE_LINES.append(line)
    print(line)
    assert ok, line


def strictly_decreasing(xs):
    return all(a > b for a, b in zip(xs, xs[1:]))


def strictly_increasing(xs):
    return all(a < b for a, b in zip(xs, xs[1:]))


def fmt(xs, spec=".4g"):
    return "[" + ", ".join(format(x, spec) for x in xs) + "]"


def test_01_counting_oracle(table):
    t0 = time.perf_counter()
    matches = 0
    bad = []
    for m in (2, 3, 4, 5):
        for e in range(1, 7):
            x = 10**e
            c = count_M2m(m, x, table).value
            n = len(enumerate_Am(m, x, table))
            if c == n:
                matches += 1
            else:
                bad.append((m, x, c, n))
    dt = time.perf_counter() - t0
    report(1, "count_M2m = len(enumerate_Am)", matches == 24 and dt < 10,
           f"{matches}/24 exact matches in {dt:.2f}s (limit 10s){' mismatches ' + str(bad) if bad else ''}")


def test_02_spot_values(table):
    got = (
        count_M2m(2, 10, table).value,
        count_M2m(2, 100, table).value,
        count_M2m(3, 10, table).value,
        count_M2m(2, 1, table).value,
    )
    report(2, "spot values", got == (7, 34, 5, 0),
           f"M22(10)={got[0]}, M22(100)={got[1]}, M23(10)={got[2]}, M22(1)={got[3]} (want 7, 34, 5, 0)")


def test_03_matula_bijection(table):
    t0 = time.perf_counter()
    trees = [t for n in range(1, 9) for t in rooted_trees(n)]
    tree_ok = all(decode(encode(t, table), table) == t for t in trees)
    code_ok = all(encode(decode(n, table), table) == n for n in range(1, 10**5 + 1))
    ident = {}
    for e in range(1, 6):
        x = 10**e
        ident[x] = (count_height_le2(x, table), count_M2m(2, x, table).value + 1)
    ident_ok = all(a == b for a, b in ident.values())
    dt = time.perf_counter() - t0
    report(3, "Matula bijection and height<=2 identity", tree_ok and code_ok and ident_ok,
           f"{len(trees)} trees round-trip={tree_ok}, codes<=1e5 round-trip={code_ok}, "
           f"identity {ident} ({dt:.1f}s)")


def test_04_dual_path(table):
    worst = 0.0
    for m in (2, 3, 4, 5):
        c = lemma44_coeffs(m, table)
        K = Km(m, table).value
        for u in (10.0, 100.0, 1000.0):
            a = corollary1_logP(c, u)
            b = theorem1_logM(m, table=table, K=K, log_x=u)
            worst = max(worst, abs(a - b) / abs(b))
    report(4, "corollary path = strong formula", worst < 1e-10,
           f"max relative difference {worst:.3g} (limit 1e-10)")


def test_05_hardy_ramanujan():
    t0 = time.perf_counter()
    errs = []
    for u in (100, 1000, 10**4):
        exact = partition_sum_exact(u)
        errs.append(abs(math.exp(math.log(exact) - corollary1_logP(PARTITION_COEFFS, u)) - 1))
    dt = time.perf_counter() - t0
    ok = errs[-1] < 0.1 and strictly_decreasing(errs) and dt <= 60
    report(5, "partition engine check", ok,
           f"|ratio-1| at u=1e2,1e3,1e4 = {fmt(errs)} (final < 0.1, strictly decreasing), {dt:.1f}s")


def test_06_averaged_counting_residual(table):
    sys_ = PrimeLambdaSystem(2, table)
    D = Dm(2, table).value
    gaps = [abs(lemma44_residual(sys_, u) - D) for u in (50, 100, 200, 350)]
    ok = strictly_decreasing(gaps) and gaps[-1] < 0.05
    report(6, "averaged-counting residual -> D_2", ok,
           f"D_2={D:.6f}, gaps at u=50,100,200,350 = {fmt(gaps)} (strictly decreasing, final < 0.05)")


def test_07_laplace_residual(table):
    sys_ = PrimeLambdaSystem(2, table)
    Dp = Dprime_m(2, table).value
    sigmas = (0.2, 0.1, 0.05, 0.02)
    gaps = [abs(lemma31_residual(sys_, s) - Dp) for s in sigmas]
    toy = abs(lemma31_residual(IntegerLambdaSystem(), 0.02, PARTITION_COEFFS) + 0.5 * math.log(2 * math.pi))
    mono = strictly_decreasing(gaps)
    ok = mono and gaps[-1] < 0.1 and toy < 0.02
    report(7, "Laplace-side residual -> D'_2", ok,
           f"D'_2={Dp:.6f}, gaps at sigma=0.2,0.1,0.05,0.02 = {fmt(gaps)} "
           f"(strictly decreasing: {mono}, final < 0.1: {gaps[-1] < 0.1}); toy gap at 0.02 = {toy:.3g} (< 0.02)")


def test_08_weak_asymptotics(table):
    t0 = time.perf_counter()
    ratios = []
    for x in (10**6, 10**9, 10**12):
        c = count_M2m(2, x, table).value
        ratios.append(math.log(c) / (math.pi * math.sqrt(2 * math.log(x) / (3 * math.log(2)))))
    dt = time.perf_counter() - t0
    ok = all(0.5 < r < 1 for r in ratios) and strictly_increasing(ratios) and dt < 60
    report(8, "weak asymptotic ratio", ok,
           f"ratios at 1e6,1e9,1e12 = {fmt(ratios, '.5f')} (in (0.5,1), strictly increasing), {dt:.1f}s")


def test_09_strong_asymptotics(table):
    t0 = time.perf_counter()
    K = Km(2, table).value
    resid = []
    nodes = 0
    for e in (6, 8, 10, 12, 14):
        x = 10**e
        r = count_M2m(2, x, table)
        nodes = r.nodes_visited
        resid.append(abs(math.log(r.value) - theorem1_logM(2, x, table, K=K)))
    dt = time.perf_counter() - t0
    mono = strictly_decreasing(resid)
    ok = mono and dt < 300 and nodes <= 4e7
    report(9, "strong asymptotic residual trend", ok,
           f"|log M - formula| at 1e6..1e14 = {fmt(resid, '.4g')} (strictly decreasing: {mono}); "
           f"{nodes} nodes at 1e14, {dt:.1f}s")


def test_10_constants():
    z = abs(zeta(2) - math.pi**2 / 6)
    g = abs(euler_gamma() - 0.5772156649)
    g1 = abs(stieltjes_gamma1() - -0.0728158455)
    K, _ = finite_part_constants()
    ok = z < 1e-12 and g < 1e-10 and g1 < 1e-8 and K == 0
    report(10, "constants sanity", ok,
           f"|zeta(2)-pi^2/6|={z:.2g}, |gamma-ref|={g:.2g}, |gamma_1-ref|={g1:.2g}, K={K}")


def test_11_remainder_witness(table):
    ratios = loglog_remainder_ratios(2, table)
    ks = sorted(ratios)
    top = ks[-1]
    run_before = max(ratios[k] for k in ks if k <= top - 10)
    run_all = max(ratios.values())
    ok = math.isfinite(run_all) and run_all <= run_before
    report(11, "log log p remainder witness", ok,
           f"k=2..{top}: running max {run_all:.4f}, max up to k={top - 10} is {run_before:.4f} "
           f"(no growth over the top decade); ratio at k={top} is {ratios[top]:.4f}")
