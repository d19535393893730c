"""Acceptance suite: the seven exit criteria, each at its stated tolerance.

Each criterion records a pass/fail line echoed in the terminal summary.
Criterion 5 asserts the stated growth-exponent band for the measured pure
high degree on the stated size grid; the witness's support parameter is an
integer floor that moves only once across that grid, so the measured
staircase cannot meet the band (see the certification report's
phd_growth_exponent observation for the measured values).
"""

import json
import math
import random
import time
from fractions import Fraction
from itertools import combinations

from starfree.cli import ExperimentConfig, fit_exponent, run_certification, run_scaling
from starfree.digraph import OracleView, PatternGraph
from starfree.dualpoly import (
    block_identity_check,
    block_l1,
    bound_formula,
    build_omega,
    build_psi,
    correlation,
    gapor_dual,
    phd_measure,
)
from starfree.grover import GroverModel
from starfree.instances import (
    IntegerSequence,
    gen_far_h_instance,
    gen_h_free_instance,
    has_k_collision,
    reduce_collision_to_star,
    reduce_dummy_collision,
)
from starfree.lin2 import (
    distinguishing_advantage,
    kwise_check,
    min_unsat_fraction,
    sample_lin2_matrix,
    sample_no,
    sample_yes,
    search_hard_matrix,
    yes_marginal_outcomes,
)
from starfree.seeds import split_seed
from starfree.testers import test_h_freeness_quantum as quantum_tester

from conftest import record_criterion

EPS = Fraction(1, 20)
GRID = (1024, 2048, 4096, 8192, 16384)
REP = 100


def _scaling_points(k: int, trials: int):
    pattern = PatternGraph.star(k)
    points = []
    rates = []
    for n in GRID:
        total = 0
        rejects = 0
        for trial in range(trials):
            g, cert = gen_far_h_instance(
                n, 1, pattern, EPS, split_seed(11, "gen", k, n, trial)
            )
            view = OracleView(g)
            verdict = quantum_tester(
                view,
                pattern,
                cert.epsilon,
                GroverModel(seed=split_seed(11, "test", k, n, trial)),
                repetition_multiplier=REP,
            )
            total += verdict.queries_total
            rejects += verdict.verdict == "reject"
        points.append((n, total / trials))
        rates.append(rejects / trials)
    return points, rates


def test_criterion_1_quantum_scaling_exponents():
    t0 = time.time()
    ok = True
    details = []
    for k, target in ((2, 1.0 / 3), (3, 3.0 / 7)):
        points, _ = _scaling_points(k, trials=50)
        slope, _, _ = fit_exponent(points)
        inside = abs(slope - target) <= 0.05
        ok &= inside
        details.append(f"k={k}: slope {slope:.4f} target {target:.4f}")
    elapsed = time.time() - t0
    ok &= elapsed <= 300
    details.append(f"{elapsed:.0f}s")
    record_criterion("1 quantum scaling exponent", ok, "; ".join(details))
    assert ok, details


def test_criterion_2_tester_correctness():
    n = 1024
    false_rejects = 0
    for k in (2, 3):
        pattern = PatternGraph.star(k)
        for trial in range(50):
            g = gen_h_free_instance(n, 1, pattern, split_seed(12, "free", k, trial))
            verdict = quantum_tester(
                OracleView(g),
                pattern,
                EPS,
                GroverModel(seed=split_seed(12, "freetest", k, trial)),
                repetition_multiplier=REP,
            )
            false_rejects += verdict.verdict == "reject"
    rejections = {2: 0, 3: 0}
    for k in (2, 3):
        pattern = PatternGraph.star(k)
        for trial in range(50):
            g, cert = gen_far_h_instance(
                n, 1, pattern, EPS, split_seed(12, "far", k, trial)
            )
            verdict = quantum_tester(
                OracleView(g),
                pattern,
                cert.epsilon,
                GroverModel(seed=split_seed(12, "fartest", k, trial)),
                repetition_multiplier=REP,
            )
            rejections[k] += verdict.verdict == "reject"
    ok = false_rejects == 0 and all(rejections[k] * 3 >= 2 * 50 for k in (2, 3))
    record_criterion(
        "2 tester correctness",
        ok,
        f"false rejects {false_rejects}/100; far rejections k=2: {rejections[2]}/50, "
        f"k=3: {rejections[3]}/50",
    )
    assert ok


def test_criterion_3_reduction_soundness():
    rng = random.Random(13)
    star_ok = True
    for _ in range(500):
        n = rng.randrange(1, 13)
        r = rng.randrange(1, 7)
        seq = IntegerSequence(n, r, tuple(rng.randrange(1, r + 1) for _ in range(n)))
        g = reduce_collision_to_star(seq)
        indeg = [0] * g.n
        for v in range(g.n):
            for w in g.adj[v]:
                indeg[w] += 1
        for k in (2, 3, 4):
            star_ok &= has_k_collision(seq, k) == any(d >= k for d in indeg)
    dummy_ok = True
    for _ in range(500):
        n = rng.randrange(1, 13)
        r = rng.randrange(1, 7)
        seq = IntegerSequence(
            n, r, tuple(rng.choice([0, 0] + list(range(1, r + 1))) for _ in range(n)), lo=0
        )
        out = reduce_dummy_collision(seq)
        dummy_ok &= has_k_collision(seq, 3, ignore_zero=True) == has_k_collision(out, 3)
        for v in range(1, r + 1):
            dummy_ok &= [i for i, x in enumerate(seq.values) if x == v] == [
                i for i, x in enumerate(out.values) if x == v
            ]
    ok = star_ok and dummy_ok
    record_criterion(
        "3 reduction soundness", ok, f"star equivalence: {star_ok}; dummy k=3: {dummy_ok}"
    )
    assert ok


def _exhaustive_phd_pointwise(psi, n, cap):
    """Plain 2^n enumeration, degree by degree, up to cap."""
    values = {}
    for mask in range(2**n):
        w = bin(mask).count("1")
        values[mask] = psi.point_value(w)
    for s in range(cap + 1):
        for S in combinations(range(n), s):
            smask = 0
            for i in S:
                smask |= 1 << i
            corr = Fraction(0)
            for mask, v in values.items():
                if v == 0:
                    continue
                chi = -1 if bin(mask & smask).count("1") % 2 else 1
                corr += v * chi
            if corr != 0:
                return s
    return cap + 1


def test_criterion_4_dual_certificate_exact_suite():
    t0 = time.time()
    details = []

    grid_ok = True
    for n in range(8, 65):
        for k in (2, 3):
            psi = build_psi(build_omega(n, k))
            grid_ok &= psi.point_l1() == 1
            grid_ok &= psi.total() == 0
            grid_ok &= psi.positive_mass() == Fraction(1, 2)
            grid_ok &= psi.negative_mass() == Fraction(1, 2)
    details.append(f"exact grid 8..64 x {{2,3}}: {grid_ok}")

    phd_ok = True
    for n, k in ((8, 2), (10, 2), (12, 2), (10, 3), (12, 3)):
        psi = build_psi(build_omega(n, k))
        fast = phd_measure(psi)
        slow = _exhaustive_phd_pointwise(psi, n, fast + 1)
        phd_ok &= fast == slow
    details.append(f"phd vs exhaustive parity (N<=12): {phd_ok}")

    psi3 = build_psi(build_omega(3, 2))
    phi2 = gapor_dual(2)
    rng = random.Random(14)
    points6 = [tuple(-1 if (m >> i) & 1 else 1 for i in range(6)) for m in range(64)]
    ident_ok = True
    for _ in range(20):
        chosen = set(rng.sample(points6, rng.randrange(0, 65)))
        (l1v, r1v), (l2v, r2v) = block_identity_check(
            phi2,
            psi3,
            lambda x: x in chosen,
            g=lambda bits: -1 if any(b == -1 for b in bits) else 1,
            h=lambda blk: -1 if sum(1 for b in blk if b == -1) >= 2 else 1,
        )
        ident_ok &= l1v == r1v and l2v == r2v
    details.append(f"identities at N=3,R=2: {ident_ok}")

    l1_ok = block_l1(phi2, psi3) == 1
    details.append(f"l1(composed) = 1: {l1_ok}")

    corr_ok = True
    for k, r in ((2, 24), (2, 40), (3, 64)):
        ck = math.ceil(20 * (2 * k) ** (k / 2))
        n = ck * r
        gamma = Fraction(1, 2 * ck * 4 ** (k - 1))
        psi = build_psi(build_omega(n, k))
        phi = gapor_dual(r)
        exact = correlation(phi, psi, k, gamma)
        bound = bound_formula(n, r, k, gamma)
        if bound > 0:
            corr_ok &= exact >= Fraction(bound).limit_denominator(10**15)
        corr_ok &= exact >= Fraction(9, 10)
    details.append(f"correlation >= bound and >= 9/10 at coupling: {corr_ok}")

    elapsed = time.time() - t0
    runtime_ok = elapsed <= 180
    details.append(f"{elapsed:.0f}s")
    ok = grid_ok and phd_ok and ident_ok and l1_ok and corr_ok and runtime_ok
    record_criterion("4 dual-certificate exact suite", ok, "; ".join(details))
    assert ok, details


def test_criterion_5_phd_growth_exponent():
    points = []
    for n in (16, 32, 64, 128, 256):
        psi = build_psi(build_omega(n, 2))
        points.append((n, phd_measure(psi)))
    slope, _, _ = fit_exponent(points)
    ok = abs(slope - 0.25) <= 0.1
    record_criterion(
        "5 phd growth exponent",
        ok,
        f"measured {points}; slope {slope:.4f} vs 0.25 +/- 0.1",
    )
    assert ok, (points, slope)


def test_criterion_6_lin2_suite():
    details = []
    mat = sample_lin2_matrix(10, 2, seed=15)
    yes_ok = True
    for s in range(20):
        inst = sample_yes(mat, split_seed(15, "yes", s))
        wmask = sum(b << i for i, b in enumerate(inst.witness))
        yes_ok &= inst.unsat_count(wmask) == 0
    details.append(f"yes satisfiable: {yes_ok}")

    far_mat = sample_lin2_matrix(12, 40, seed=16)
    hits = 0
    for s in range(50):
        inst = sample_no(far_mat, split_seed(16, "no", s))
        hits += min_unsat_fraction(inst) >= Fraction(2, 5)
    far_ok = hits * 3 >= 2 * 50
    details.append(f"no-side min_unsat >= 0.4: {hits}/50")

    hm = search_hard_matrix(10, 1, Fraction(6, 10), seed=17)
    hard_ok = hm is not None and hm.subset_size == 6
    marg_ok = False
    game_ok = False
    if hard_ok:
        outs = yes_marginal_outcomes(hm.matrix)
        rep = kwise_check(outs, m=10, k=6, subset_budget=1000, seed=17)
        marg_ok = rep.all_pass
        q = hm.subset_size // 3
        adv = distinguishing_advantage(hm.matrix, q)
        game_ok = adv <= Fraction(1, 10)
        details.append(f"marginals uniform to size 6: {marg_ok}")
        details.append(f"advantage at q={q}: {adv}")
    ok = yes_ok and far_ok and hard_ok and marg_ok and game_ok
    record_criterion("6 lin2 suite", ok, "; ".join(details))
    assert ok, details


def test_criterion_7_determinism(tmp_path):
    cfg = dict(
        problem="h-freeness",
        k=2,
        eps="0.05",
        n_grid=(256, 512, 1024, 2048),
        trials=3,
        seed=21,
        repetition_multiplier=25,
    )
    a = run_scaling(ExperimentConfig(**cfg))
    b = run_scaling(ExperimentConfig(**cfg))
    scaling_same = a.rows == b.rows and json.dumps(
        a.summary_obj(), sort_keys=True
    ) == json.dumps(b.summary_obj(), sort_keys=True)
    cert_a = run_certification(nk_grid=((8, 2), (16, 3)), coupling=((2, 24),),
                               phd_grid=(16, 32, 64, 128))
    cert_b = run_certification(nk_grid=((8, 2), (16, 3)), coupling=((2, 24),),
                               phd_grid=(16, 32, 64, 128))
    cert_same = json.dumps(cert_a, sort_keys=True) == json.dumps(cert_b, sort_keys=True)
    ok = scaling_same and cert_same
    record_criterion(
        "7 determinism", ok, f"scaling byte-identical: {scaling_same}; certify: {cert_same}"
    )
    assert ok
