from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import lclab.complexity as cx
from lclab.automaton import AutomatonSpec
from lclab.complexity import (
    ScanPolicy,
    accessible_blocks,
    berthe_ratio_report,
    block_sets,
    complexity_csv,
    line_complexity,
    scan_windows,
)
from lclab.gfpoly import GfpPoly, parse_poly
from oracles import certified_reference, naive_blocks


def spec(rule, p=2, initial="1"):
    return AutomatonSpec.parse(rule, p, initial)




def test_pascal_small_k():
    assert list(line_complexity(spec("11"), 3).values) == [1, 2, 4, 8]


def test_one_plus_x_squared_k2():
    assert line_complexity(spec("101"), 2)[2] == 3


@pytest.mark.parametrize("p", [2, 3, 5])
def test_pure_shift_has_k_plus_one_blocks(p):
    seq = line_complexity(spec("01", p), 12)
    assert list(seq.values[1:]) == [k + 1 for k in range(1, 13)]


def test_csv_header_and_rows():
    text = complexity_csv(line_complexity(spec("11"), 2))
    assert text == "k,a_k,exact\n0,1,true\n1,2,true\n2,4,true\n"


def test_berthe_report_exact():
    seq = line_complexity(spec("11"), 3)
    assert berthe_ratio_report(seq) == [(1, Fraction(2)), (2, Fraction(1)), (3, Fraction(8, 9))]


def test_k_max_validation():
    with pytest.raises(ValueError):
        line_complexity(spec("11"), 0)


# frozen from the certified reference scan

def test_rule_1011011_at_15():
    assert line_complexity(spec("1011011"), 15)[15] == 900


def test_late_blocks_are_caught():
    # new 15-blocks of 1+x^2+x^3+x^5+x^6 keep appearing at rows 3*2^j - 1
    assert line_complexity(spec("1011011"), 15, ScanPolicy(window=1))[15] == 900


@pytest.mark.parametrize("p,rule,initial", [
    (2, "11", "1"), (2, "111", "1"), (2, "1101", "1"), (2, "11001", "1"), (2, "11", "11"),
    (3, "11", "1"), (3, "12", "2"), (3, "121", "1"), (3, "1021", "12"),
    (5, "13", "1"), (5, "141", "3"), (7, "16", "1"),
])
@pytest.mark.parametrize("k", [1, 3, 7])
def test_matches_row_by_row_reference(p, rule, initial, k):
    t = parse_poly(rule, p)
    i = parse_poly(initial, p)
    s = AutomatonSpec(t, i)
    scan = scan_windows(s, k, ScanPolicy(window=20))
    if s.has_constant_initial():
        blocks, nrows = certified_reference(list(t.coeffs), list(i.coeffs), p, k, 20)
        assert scan.rows_scanned == nrows
    else:
        blocks = naive_blocks(list(t.coeffs), list(i.coeffs), p, k, scan.rows_scanned)
    assert scan.blocks(k) == blocks
    assert scan.prefix_counts()[k] == len(blocks)


@pytest.mark.parametrize("p,rule", [(2, "101"), (2, "10001"), (2, "1000101"), (3, "1001"), (3, "1000002"),
                                    (5, "100003"), (2, "0101")])
@pytest.mark.parametrize("k", [1, 2, 5, 9])
def test_decimated_scan_equals_plain_scan(monkeypatch, p, rule, k):
    s = spec(rule, p)
    fast = scan_windows(s, k, ScanPolicy(window=20))
    with monkeypatch.context() as m:
        m.setattr(cx, "_decimate", lambda sp: (sp, 1))
        plain = scan_windows(s, k, ScanPolicy(window=20))
    assert fast.blocks(k) == plain.blocks(k)
    assert (fast.rows_scanned, fast.last_new_row) == (plain.rows_scanned, plain.last_new_row)


def test_block_sets_are_prefix_consistent():
    sets = block_sets(spec("1101"), 8)
    for k in range(1, 8):
        assert {b[:k] for b in sets[k + 1].blocks} == set(sets[k].blocks)
    assert sets[5].blocks == accessible_blocks(spec("1101"), 5).blocks


@pytest.mark.parametrize("p", [2, 3, 5, 7, 17, 257, 65521])
def test_pack_unpack_round_trip(p):
    rng = np.random.default_rng(p)
    for k in (1, 3, 8, 13):
        sym = rng.integers(0, p, size=(20, k)).astype(np.uint16 if p > 256 else np.uint8)
        packed = cx._pack(sym, p)
        assert np.array_equal(cx._unpack(packed, p, k).astype(np.int64), sym.astype(np.int64))
        # byte order of packed rows is lexicographic order of symbol rows
        order_bytes = sorted(range(20), key=lambda i: bytes(packed[i]))
        order_syms = sorted(range(20), key=lambda i: tuple(sym[i]))
        assert [tuple(sym[i]) for i in order_bytes] == [tuple(sym[i]) for i in order_syms]


# invariants

nontrivial = st.sampled_from([2, 3, 5]).flatmap(
    lambda p: st.tuples(
        st.just(p),
        st.lists(st.integers(0, p - 1), min_size=2, max_size=4).filter(lambda cs: sum(1 for c in cs if c) >= 2),
        st.integers(1, p - 1),
    )
)


@settings(max_examples=40, deadline=None)
@given(nontrivial)
def test_basic_invariants(args):
    p, rule, c = args
    seq = line_complexity(AutomatonSpec(GfpPoly(rule, p), GfpPoly([c], p)), 8)
    assert seq.exact
    assert seq[0] == 1
    assert seq[1] == p
    for k in range(8):
        assert seq[k] <= seq[k + 1]
    for k in range(9):
        assert seq[k] <= p ** k


@settings(max_examples=25, deadline=None)
@given(nontrivial.filter(lambda a: a[0] > 2))
def test_scalar_orbit_closure(args):
    p, rule, _ = args
    sets = block_sets(AutomatonSpec(GfpPoly(rule, p)), 6)
    for k, bs in sets.items():
        for b in bs.blocks:
            for c in range(2, p):
                assert tuple(c * x % p for x in b) in bs


@pytest.mark.parametrize("p,rule,initial", [(2, "1101", "1"), (2, "11", "101"), (3, "121", "2"), (5, "14", "1")])
def test_doubled_window_changes_nothing(p, rule, initial):
    s = spec(rule, p, initial)
    policy = ScanPolicy()
    a = line_complexity(s, 12, policy)
    b = line_complexity(s, 12, policy.doubled(12))
    assert a.values == b.values
    assert policy.doubled(12).window == 2 * max(64, 48)


def test_row_limit_reports_inexact():
    seq = line_complexity(spec("1101"), 20, ScanPolicy(row_limit=3))
    assert not seq.exact
