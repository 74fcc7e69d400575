"""Acceptance suite: the eight gating criteria at their stated tolerances.

Each test prints one PASS/FAIL line (run pytest with -s to see them inline).
"""

import time

import numpy as np
import pytest

from eigenflow.crossings import (
    detect_crossings,
    near_approach,
    refine_min_gap,
    suggest_touch,
)
from eigenflow.decomposition import (
    almost_touch,
    apply_touch,
    block_structure,
    infer_labels,
    min_blocks_oracle,
    validate_labels,
)
from eigenflow.crossings import build_R1, parse_R1, Crossing, CrossingSet
from eigenflow.flows import conjugate, gallery, hermitean11_blocks, random_unitary, scalar_shift
from eigenflow.formulas import derive_formula, propagate_polynomial
from eigenflow.tracker import ZNNConfig, oracle_trace, static_eigen, trace

SX6_PAIRS = {(1, 2), (1, 3), (1, 5), (1, 6), (2, 3), (2, 5), (3, 5), (4, 5), (4, 6)}


def report(num, text, ok):
    print(f"\n[{'PASS' if ok else 'FAIL'}] criterion {num}: {text}")
    assert ok, f"criterion {num}: {text}"


# ---------------------------------------------------------------------- 1 & 2

@pytest.fixture(scope="module")
def sx6_run():
    flow = gallery("stackexchange6", seed=7)
    cfg = ZNNConfig(tau=1e-4, eta=50.0, formula=(5, 6))
    w0 = time.perf_counter()
    trs = trace(flow, -0.3, 0.1, cfg)
    cs = detect_crossings(trs)
    ve = infer_labels(build_R1(cs, 6), 6)
    elapsed = time.perf_counter() - w0
    return flow, trs, cs, ve, elapsed


def test_criterion_1_six_by_six_regression(sx6_run):
    flow, trs, cs, ve, elapsed = sx6_run
    ok_pairs = cs.pairs() == SX6_PAIRS
    ok_ve = ve.tolist() == [1, -1, 2, 2, -2, -2]
    ok_sizes = block_structure(ve).sizes == (1, 1, 2, 2)
    oracle_cs = detect_crossings(oracle_trace(flow, -0.3, 0.1, 1e-4))
    omap = {}
    for c in oracle_cs:
        omap.setdefault((c.i, c.j), []).append(c.t_star)
    ok_times = all(
        any(abs(c.t_star - t) <= 1e-3 for t in omap.get((c.i, c.j), []))
        for c in cs)
    ok_time = elapsed <= 5.0
    report(1, f"6x6 regression (pairs={ok_pairs}, ve={ok_ve}, sizes={ok_sizes}, "
              f"t_star within 1e-3 of oracle={ok_times}, "
              f"runtime {elapsed:.2f}s <= 5s={ok_time})",
           ok_pairs and ok_ve and ok_sizes and ok_times and ok_time)


def test_criterion_2_znn_terminal_accuracy(sx6_run):
    flow, trs, *_ = sx6_run
    term = np.array([tr.values[-1] for tr in trs])
    ref = np.array([lam for lam, _ in static_eigen(flow.eval(0.1), hermitean=True)])
    rel = np.abs(np.sort(term.real) - np.sort(ref.real)) / np.abs(np.sort(ref.real))
    worst = float(rel.max())
    report(2, f"ZNN terminal relative error {worst:.2e} <= 1e-8 "
              f"(stretch 1e-11 met: {worst <= 1e-11})", worst <= 1e-8)


# ------------------------------------------------------------------------- 3

def _true_membership(t0):
    h7, h4 = hermitean11_blocks()
    w7 = np.linalg.eigvalsh(h7.eval(t0))
    w4 = np.linalg.eigvalsh(h4.eval(t0))
    tagged = [(w, 7) for w in w7] + [(w, 4) for w in w4]
    tagged.sort(key=lambda x: -x[0])
    return [b for (_, b) in tagged]


def _confirmed_touch_pipeline(flow, t0, tf, tau):
    """Trace, analyze, and merge with oracle-confirmed touch suggestions."""
    trs = trace(flow, t0, tf, ZNNConfig(tau=tau, eta=50.0, formula=(3, 5)))
    cs = detect_crossings(trs)
    R1 = build_R1(cs, flow.n)
    ve = infer_labels(R1, flow.n)
    members = _true_membership(t0)
    confirmed = [(c.i, c.j) for c in suggest_touch(trs, gap_threshold=0.6,
                                                   angle_window=40)
                 if members[c.i - 1] == members[c.j - 1]]
    ve, _ = apply_touch(ve, confirmed, R1, on_error="drop")
    return trs, ve


def test_criterion_3_hermitean_7_4_recovery():
    flow = gallery("hermitean11_analog", seed=0)
    wide_trs, wide_ve = _confirmed_touch_pipeline(flow, -7.0, 6.0, 1e-3)
    sizes = block_structure(wide_ve).sizes
    ok_sizes = sizes == (4, 7)
    narrow_trs, narrow_ve = _confirmed_touch_pipeline(flow, 0.0, 6.0, 1e-3)
    n_groups = len(set(narrow_ve.tolist()))
    ok_narrow = n_groups > 2
    dev = 0.0
    for (t0, tf, trs) in [(-7.0, 6.0, wide_trs), (0.0, 6.0, narrow_trs)]:
        ors = oracle_trace(flow, t0, tf, 1e-3)
        dev = max(dev, max(np.abs(a.values - b.values).max()
                           for a, b in zip(trs, ors)))
    ok_dev = dev <= 1e-5
    report(3, f"7+4 recovery (wide sizes {sizes}={ok_sizes}, narrow groups "
              f"{n_groups} > 2={ok_narrow}, znn-oracle dev {dev:.2e} <= 1e-5={ok_dev})",
           ok_sizes and ok_narrow and ok_dev)


# ------------------------------------------------------------------------- 4

def test_criterion_4_diag5_full_diagonalization():
    flow = gallery("diag5", seed=3)
    trs = trace(flow, 0.0, 6.0, ZNNConfig(tau=1e-3, eta=50.0, formula=(3, 5)))
    cs = detect_crossings(trs)
    ve = infer_labels(build_R1(cs, 5), 5)
    groups = len(set(ve.tolist()))
    sizes = block_structure(ve).sizes
    cands = suggest_touch(trs, gap_threshold=1e-2)
    report(4, f"diag5 diagonalization (groups {groups}==5, sizes {sizes}, "
              f"suggestions below 1e-2 gap: {len(cands)}==0)",
           groups == 5 and sizes == (1, 1, 1, 1, 1) and not cands)


# ------------------------------------------------------------------------- 5

def test_criterion_5_complex_near_approach_and_shift():
    a10 = gallery("a10")
    b10 = gallery("a10", seed=5)
    trs = trace(b10, -1.0, 4.0, ZNNConfig(tau=1e-4, eta=200.0, formula=(2, 4)))
    rc = near_approach(trs)
    best = min(rc.values(), key=lambda v: v.d_min)
    ok_d = 6.8e-3 <= best.d_min <= 8.4e-3
    ok_t = 0.807 <= best.t_min <= 0.827
    # compute the closing shift from the refined pass and apply it to the
    # tridiagonal block (indices 1..6), then re-obscure with the same seed
    t_star, gap, wa, wb = refine_min_gap(b10, best.t_min - 5e-3, best.t_min + 5e-3)
    M = a10.eval(t_star)
    w6 = np.linalg.eigvals(M[:6, :6])
    lam6, lam4 = (wa, wb) if np.abs(w6 - wa).min() < np.abs(w6 - wb).min() else (wb, wa)
    delta = lam6 - lam4
    shifted = conjugate(scalar_shift(a10, range(1, 7), delta), random_unitary(10, 5))
    _, gap2, *_ = refine_min_gap(shifted, t_star - 5e-3, t_star + 5e-3)
    ok_close = gap2 < 1e-12
    report(5, f"b10 near approach (d_min {best.d_min:.4g} in [6.8e-3, 8.4e-3]="
              f"{ok_d}, t {best.t_min:.4f} in [0.807, 0.827]={ok_t}); "
              f"shift delta={delta:.6g}; closed gap {gap2:.2e} < 1e-12={ok_close}",
           ok_d and ok_t and ok_close)


# ------------------------------------------------------------------------- 6

def test_criterion_6_real_conjugate_transition():
    flow = gallery("real2x2", seed=11)
    ors = oracle_trace(flow, -1.006, 0.0, 0.002)
    ts = ors[0].times
    up = 2 + np.sqrt((1 + ts ** 3).astype(complex))
    dn = 2 - np.sqrt((1 + ts ** 3).astype(complex))
    err = np.minimum(
        np.abs(ors[0].values - up) + np.abs(ors[1].values - dn),
        np.abs(ors[0].values - dn) + np.abs(ors[1].values - up))
    away = np.abs(ts + 1.0) >= 1e-2
    ok_match = float(err[away].max()) <= 1e-6

    # at exactly t = -1 (dyadic grid) the coalesced pair must sit at 2
    tau = 1.0 / 512.0
    micro = oracle_trace(flow, -1.0 - 2 * tau, -1.0 + 2 * tau, tau)
    k = 2
    assert micro[0].times[k] == -1.0
    ok_double = all(abs(tr.values[k] - 2.0) <= 1e-8 for tr in micro)

    trs = trace(flow, -1.006, 0.0,
                ZNNConfig(tau=0.002, eta=30.0, formula=(3, 3)))
    flagged = any(tr.degenerate for tr in trs)
    term = sorted(tr.values[-1].real for tr in trs)
    tracked = (abs(term[0] - 1.0) <= 1e-6 and abs(term[1] - 3.0) <= 1e-6
               and all(not tr.degenerate for tr in trs))
    ok_znn = tracked or flagged
    report(6, f"real 2x2 transition (oracle matches closed form away from -1: "
              f"{ok_match}; both eigenvalues 2 within 1e-8 at t=-1: {ok_double}; "
              f"ZNN {'tracked both branches' if tracked else 'flagged collapse' if flagged else 'SILENT WRONG ANSWER'})",
           ok_match and ok_double and ok_znn)


# ------------------------------------------------------------------------- 7

def _r1_of(rows, n):
    cs = CrossingSet([Crossing(i, j, 0.0, 1.0, 1.0)
                      for i, ps in rows.items() for j in ps])
    return build_R1(cs, n)


def test_criterion_7_heuristic_vs_oracle():
    # the four published instances with a final block answer
    instances = [
        ("11x11 wide", _r1_of({1: [2], 2: [3], 3: [5], 4: [5], 5: [6],
                               6: [8], 7: [8], 10: [11]}, 11),
         [(1, 3), (3, 4), (4, 6), (6, 7), (7, 9), (9, 10)], 11),
        ("6x6", _r1_of({1: [2, 3, 5, 6], 2: [3, 5], 3: [5], 4: [5, 6]}, 6), [], 6),
        ("diag5", _r1_of({1: [2, 3, 4, 5], 2: [3, 4, 5], 3: [4, 5], 4: [5]}, 5), [], 5),
        ("real 2x2", _r1_of({1: [2]}, 2), [], 2),
    ]
    ok_published = True
    for name, R1, touch, n in instances:
        ve = almost_touch(infer_labels(R1, n), touch, R1)
        heuristic = len(set(ve.tolist()))
        exact, _ = min_blocks_oracle(parse_R1(R1), touch, n)
        if heuristic != exact:
            ok_published = False

    rng = np.random.default_rng(2024)
    worst_gap, violations = 0, 0
    for _ in range(200):
        n = int(rng.integers(3, 11))
        blocks = rng.integers(1, 4)
        membership = rng.integers(0, blocks, n)
        crossing, touch = set(), []
        for i in range(n):
            for j in range(i + 1, n):
                if membership[i] != membership[j] and rng.random() < 0.35:
                    crossing.add((i + 1, j + 1))
                elif membership[i] == membership[j] and rng.random() < 0.25:
                    touch.append((i + 1, j + 1))
        R1 = _r1_of({i: sorted(j for (a, j) in crossing if a == i)
                     for i in {a for (a, _) in crossing}}, n)
        ve = infer_labels(R1, n)
        ve, dropped = apply_touch(ve, touch, R1, on_error="drop")
        kept = [p for p in touch if tuple(sorted(p)) not in
                {tuple(sorted(d)) for d in dropped}]
        exact, _ = min_blocks_oracle(crossing, kept, n)
        heuristic = len(set(ve.tolist()))
        if heuristic < exact:
            worst_gap += 1
        if validate_labels(ve, R1) is not None:
            violations += 1
    report(7, f"heuristic vs oracle (published instances equal: {ok_published}; "
              f"random sweep: heuristic<oracle count {worst_gap}==0, "
              f"crossing violations {violations}==0)",
           ok_published and worst_gap == 0 and violations == 0)


# ------------------------------------------------------------------------- 8

def test_criterion_8_formula_machinery():
    euler = derive_formula(1, 1)
    ok_euler = euler.alphas == (1.0,) and euler.beta == 1.0
    shipped = [(1, 1), (2, 2), (2, 3), (2, 4), (3, 4), (3, 5), (4, 6)]
    ok_orders, ok_poly, ok_stab = True, True, True
    for (j, s) in shipped:
        f = derive_formula(j, s)
        for m in range(j + 1):
            lhs = sum(a * (-float(i)) ** m for i, a in enumerate(f.alphas))
            if m == 1:
                lhs += f.beta
            if abs(lhs - 1.0) > 1e-12:
                ok_orders = False
        if any(propagate_polynomial(f, m, 0.01, 100) > 1e-10 for m in range(j + 1)):
            ok_poly = False
        roots = f.characteristic_roots()
        if not f.stability_ok or np.any(np.abs(roots) > 1.0 + 1e-9):
            ok_stab = False
    report(8, f"formula machinery (Euler={ok_euler}, order residuals<=1e-12="
              f"{ok_orders}, polynomial exactness<=1e-10={ok_poly}, "
              f"stability root test={ok_stab})",
           ok_euler and ok_orders and ok_poly and ok_stab)
