"""Acceptance criteria, one test each.

Every test records a PASS or FAIL line; conftest prints them after the run.
Running this file directly executes all criteria and prints the same lines.
"""
from __future__ import annotations

import time
from fractions import Fraction as F
from itertools import product

import pytest

from lclab.asymptotics import convergence_report, extrema, limit_function
from lclab.automaton import AutomatonSpec
from lclab.complexity import ScanPolicy, block_sets, line_complexity
from lclab.genfun import (
    alpha_by_coeffrep,
    bridge_identity,
    build_framework,
    build_P_T,
    eta_closed_form,
    f_from_P,
    r_poly,
    series_inverse,
)
from lclab.gfpoly import GfpPoly
from lclab.recursion import (
    MIN_RUN,
    RecursionSpec,
    check_power_p_identity,
    check_relprime_invariance,
    verify_theorem_main,
)
from lclab.structure import (
    BlockMapKind,
    complexity_sequence,
    injectivity_bruteforce,
    intersection_table,
    theorem_verdict,
)

RESULTS: list[str] = []


def report(number: int, ok: bool, detail: str):
    RESULTS.append(f"criterion {number:2d} {'PASS' if ok else 'FAIL'}: {detail}")
    assert ok, detail


def framework(rule: str, k_max: int):
    s = AutomatonSpec.parse(rule)
    seq = complexity_sequence(s, k_max, scan_kmax=128)
    rec = verify_theorem_main(seq, s.n)
    return s, seq, rec, build_framework(seq, rec)


def limit_for(rule: str):
    # the same path as the `limit` subcommand: a(k) to 2^11 + n + 1
    s = AutomatonSpec.parse(rule)
    return framework(rule, 2048 + s.n + 1)


def test_criterion_01_example_one():
    t0 = time.perf_counter()
    _, _, _, fw = limit_for("1101")
    pq = limit_function(fw)
    ex = extrema(pq)
    elapsed = time.perf_counter() - t0
    want = [
        (F(1, 2), F(2, 3), F(-15, 32), F(7, 12), F(11, 6)),
        (F(2, 3), F(4, 5), F(-3, 32), F(1, 12), F(2)),
        (F(4, 5), F(8, 9), F(41, 96), F(-3, 4), F(7, 3)),
        (F(8, 9), F(1), F(83, 384), F(-3, 8), F(13, 6)),
    ]
    got = [(pc.lo, pc.hi, pc.a, pc.b, pc.c) for pc in pq.pieces]
    ok = got == want and (ex.sup, ex.inf) == (F(272, 135), F(493, 246)) and elapsed < 120
    report(1, ok, f"T=1+x+x^3: 4 pieces exact, sup={ex.sup}, inf={ex.inf}, {elapsed:.1f}s")


def test_criterion_02_example_two():
    t0 = time.perf_counter()
    _, _, _, fw = limit_for("11001")
    pq = limit_function(fw)
    ex = extrema(pq)
    elapsed = time.perf_counter() - t0
    ok = (len(pq.pieces) == 5 and pq.breakpoints == [F(8, 15), F(4, 7), F(8, 13), F(4, 5)]
          and (ex.sup, ex.inf) == (F(2791, 1234), F(2207, 980)) and elapsed < 180)
    report(2, ok, f"T=1+x+x^4: breakpoints {[str(b) for b in pq.breakpoints]}, "
                  f"sup={ex.sup}, inf={ex.inf}, {elapsed:.1f}s")


def test_criterion_03_injectivity_theorem():
    t0 = time.perf_counter()
    total = agree = 0
    refined_total = refined_agree = 0
    for n in range(1, 9):
        for tail in product((0, 1), repeat=n):
            t = GfpPoly(tail + (1,), 2)
            for kind in (BlockMapKind.B1, BlockMapKind.B2):
                predicted = theorem_verdict(kind, t)
                for k in range(n // 2, n // 2 + 4):
                    if k < 1:
                        continue  # an empty matrix has no rank to compare
                    same = injectivity_bruteforce(kind, t, k) == predicted
                    total += 1
                    agree += same
                    admissible = not (kind is BlockMapKind.B2 and n % 2 and k == n // 2)
                    if t[0] and admissible:
                        refined_total += 1
                        refined_agree += same
    elapsed = time.perf_counter() - t0
    ok = agree == total and elapsed < 60
    report(3, ok, f"literal: {agree}/{total} agree; with c0 != 0 and admissible k: "
                  f"{refined_agree}/{refined_total}; {elapsed:.1f}s")


def test_criterion_04_theorem_main():
    details = []
    ok = True
    for rule in ("11", "111", "1101", "11001"):
        s = AutomatonSpec.parse(rule)
        rec = verify_theorem_main(line_complexity(s, 160), s.n)
        if not isinstance(rec, RecursionSpec):
            ok = False
            details.append(f"{rule}: no fit")
            continue
        run = rec.verified_range[1] - rec.verified_range[0] + 1
        n = s.n
        ks = range(max(n + 1, rec.threshold), max(n + 1, rec.threshold) + 4)
        sets = block_sets(s, ks[-1] + n // 2 + 1)
        caps = [intersection_table(s, k, sets).c_cap for k in ks]
        good = run >= MIN_RUN and all(c == rec.constant for c in caps)
        ok &= good
        details.append(f"{rule}: C={rec.constant} K={rec.threshold} run={run} C_cap@{list(ks)}={caps}")
    report(4, ok, "; ".join(details))


def test_criterion_05_power_theorems():
    t0 = time.perf_counter()
    rules = checked = 0
    bad = []
    for p in (2, 3):
        for n in range(0, 4):
            for tail in product(range(p), repeat=n):
                if n and tail[0] == 0:
                    continue
                for lead in range(1, p):
                    coeffs = tail + (lead,)
                    for c in range(1, p):
                        s = AutomatonSpec(GfpPoly(coeffs, p), GfpPoly([c], p))
                        rep = check_power_p_identity(s, range(1, 41))
                        rules += 1
                        checked += rep.checked
                        if not rep.ok:
                            bad.append((p, coeffs, c, rep.mismatches[:2]))
    rel = []
    for p, m in ((2, 3), (2, 5), (3, 2)):
        for n in range(1, 4):
            for tail in product(range(p), repeat=n):
                if tail[0] == 0:
                    continue
                for lead in range(1, p):
                    s = AutomatonSpec(GfpPoly(tail + (lead,), p))
                    rr = check_relprime_invariance(s, m, 8)
                    rel.append(rr.ok)
    elapsed = time.perf_counter() - t0
    ok = not bad and all(rel)
    report(5, ok, f"power identity: {rules} automata, {checked} (k, r) checks, {len(bad)} failing; "
                  f"relprime set equality: {sum(rel)}/{len(rel)}; {elapsed:.1f}s")


def test_criterion_06_functional_equation():
    details = []
    ok = True
    for rule in ("1101", "11001"):
        s, seq, rec, fw = framework(rule, 400)
        P, N = build_P_T(seq, rec)
        n = rec.order
        support = all(2 * N - n - 1 <= e <= 4 * N + n for e, _ in P.terms())
        f = f_from_P(P, rec.constant, N, n, 200)
        regen = f[2 * N:] == [F(seq[k]) for k in range(2 * N, 201)]
        checks = fw.R[0] == 0 and fw.R(1) == 0 and bridge_identity(n)
        ok &= support and regen and checks
        details.append(f"{rule}: P on [{P.valuation}, {P.degree}] within [{2 * N - n - 1}, {4 * N + n}], "
                       f"regenerated to z^200: {regen}, R(0)=R(1)=0 and bridge: {checks}")
    report(6, ok, "; ".join(details))


def test_criterion_07_coeffrep():
    details = []
    ok = True
    for rule in ("1101", "11001"):
        _, seq, rec, fw = framework(rule, 400)
        start = fw.R.degree
        same = all(alpha_by_coeffrep(fw, k) == seq[k + rec.order + 1] for k in range(start, start + 64))
        ok &= same
        details.append(f"{rule}: k={start}..{start + 63} {'equal' if same else 'differ'}")
    report(7, ok, "; ".join(details))


def test_criterion_08_eta():
    ok = True
    for n in range(1, 7):
        inv = series_inverse(r_poly(n), 500)
        ok &= all(eta_closed_form(n, k) == inv[k] for k in range(501))
    report(8, ok, "eta_closed_form equals series inversion for n=1..6, k=0..500")


# max |alpha(k)/k^2 - f(x(k))| per octave for T=1+x+x^3, calibrated once from
# the exact computation (values 0.32520, 0.15845, 0.07831, 0.03889, 0.01939,
# 0.009679, 0.004836) and rounded up
OCTAVE_CEILINGS = {5: 0.3253, 6: 0.1585, 7: 0.07832, 8: 0.03890, 9: 0.01940, 10: 0.009680, 11: 0.004837}


def test_criterion_09_convergence():
    _, seq, _, fw = limit_for("1101")
    pq = limit_function(fw)
    rep = convergence_report(seq, fw, pq, 2 ** 5, 2 ** 11)
    errs = [rep.octave_max[o] for o in sorted(rep.octave_max)]
    monotone = all(a >= b for a, b in zip(errs, errs[1:]))
    under = all(rep.octave_max[o] <= F(str(c)) for o, c in OCTAVE_CEILINGS.items())
    ok = monotone and under and sorted(rep.octave_max) == sorted(OCTAVE_CEILINGS)
    shown = ", ".join(f"{o}:{float(e):.5f}" for o, e in sorted(rep.octave_max.items()))
    report(9, ok, f"octave maxima {shown}; nonincreasing: {monotone}; under ceilings: {under}")


def _invariant_rules(p, max_deg):
    for n in range(1, max_deg + 1):
        for coeffs in product(range(p), repeat=n + 1):
            if coeffs[-1] and sum(1 for c in coeffs if c) >= 2:
                yield coeffs


def test_criterion_10_invariants():
    failures = []
    count = 0
    for p, max_deg in ((2, 4), (3, 2), (5, 2)):
        for coeffs in _invariant_rules(p, max_deg):
            for c in range(1, p):
                s = AutomatonSpec(GfpPoly(coeffs, p), GfpPoly([c], p))
                seq = line_complexity(s, 8)
                count += 1
                if seq[0] != 1 or seq[1] != p:
                    failures.append(("a0/a1", p, coeffs, c))
                if any(seq[k] > seq[k + 1] for k in range(8)):
                    failures.append(("monotone", p, coeffs, c))
                if p in (3, 5):
                    sets = block_sets(s, 6)
                    if any(tuple(m * x % p for x in b) not in bs
                           for bs in sets.values() for b in bs.blocks for m in range(2, p)):
                        failures.append(("orbit", p, coeffs, c))
    policy = ScanPolicy()
    robust = 0
    for rule, p, init in (("1101", 2, "1"), ("11001", 2, "1"), ("11", 2, "101"), ("121", 3, "2"),
                          ("1201", 3, "1"), ("14", 5, "1"), ("132", 5, "3")):
        s = AutomatonSpec.parse(rule, p, init)
        a = line_complexity(s, 16, policy)
        b = line_complexity(s, 16, policy.doubled(16))
        robust += a.values == b.values
        if a.values != b.values:
            failures.append(("doubled", rule, p, init))
    report(10, not failures, f"{count} automata: a(0)=1, a(1)=p, monotone, scalar orbits; "
                             f"doubled window unchanged for {robust}/7; failures: {failures[:3]}")


if __name__ == "__main__":
    import sys

    status = 0
    for name, fn in sorted(globals().items()):
        if name.startswith("test_criterion_"):
            try:
                fn()
            except AssertionError:
                status = 1
    print("\n".join(RESULTS))
    sys.exit(status)
