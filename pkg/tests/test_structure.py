from itertools import product

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from lclab.automaton import AutomatonSpec
from lclab.complexity import block_sets, line_complexity
from lclab.gfpoly import GfpPoly, gcd, odd_even_parts, parse_poly, is_irreducible
from lclab.recursion import verify_theorem_main
from lclab.structure import (
    BlockMapKind,
    DecompositionCounter,
    apply_map,
    complexity_sequence,
    domain_length,
    injectivity_bruteforce,
    intersection_csv,
    intersection_table,
    map_matrix,
    suspicion,
    theorem_verdict,
)

B_KINDS = [BlockMapKind.B1, BlockMapKind.B2, BlockMapKind.B1p, BlockMapKind.B2p]
ALL_KINDS = list(BlockMapKind)


def binary_rules(max_deg, c0=None):
    for n in range(1, max_deg + 1):
        for tail in product((0, 1), repeat=n):
            if c0 is not None and tail[0] != c0:
                continue
            yield GfpPoly(tail + (1,), 2)


def admissible_start(kind, n):
    # an injective map needs at least as many outputs as inputs
    if kind is BlockMapKind.B2 and n % 2:
        return (n + 1) // 2
    return max(1, n // 2)


# schematic vectors

def test_b_maps_on_111():
    t = parse_poly("111")
    assert apply_map("B1", t, (1, 0, 1, 1)) == (1, 1, 0, 1, 1, 0)
    assert apply_map("B2", t, (1, 0, 1, 1)) == (1, 0, 1, 1, 0, 1)


def test_a_maps_interleave():
    t = parse_poly("11")
    assert apply_map("A1", t, (1, 1)) == (1, 0, 1, 0)
    assert apply_map("A2", t, (1, 1)) == (0, 1, 0, 1)


def test_apply_map_length_checks():
    t = parse_poly("111")
    with pytest.raises(ValueError):
        apply_map("B1", t, (1, 0, 1), k=3)
    with pytest.raises(ValueError):
        apply_map("B1", parse_poly("11", 3), (1, 0))


def test_map_matrix_rejects_small_k():
    with pytest.raises(ValueError):
        map_matrix("B1", parse_poly("11001"), 1)
    with pytest.raises(ValueError):
        map_matrix("A1", parse_poly("11"), 2)


def test_injectivity_vectors():
    assert injectivity_bruteforce("B1", parse_poly("1101"), 2)
    assert not injectivity_bruteforce("B1", parse_poly("11011"), 2)
    assert injectivity_bruteforce("B1", parse_poly("11"), 1)


def test_suspicion_vectors():
    ok = suspicion(parse_poly("1101"))
    assert ok.verdict == "nonsuspicious"
    assert ok.parts == {"B1": "iii", "B2": "iv"}
    bad = suspicion(parse_poly("11011"))
    assert bad.verdict == "suspicious"
    assert bad.to_dict()["gcd"] == "11"
    assert suspicion(parse_poly("0111")).verdict == "suspicious"


# matrix form against direct application

@pytest.mark.parametrize("kind", B_KINDS)
def test_matrix_agrees_with_apply_map(kind):
    for t in binary_rules(5):
        n = t.degree
        for k in range(max(1, n // 2), n // 2 + 3):
            m = map_matrix(kind, t, k)
            m_len = domain_length(kind, n, k)
            for b in product((0, 1), repeat=m_len):
                assert m.matvec(b) == apply_map(kind, t, b, k)


@pytest.mark.parametrize("kind", [BlockMapKind.A1, BlockMapKind.A2, BlockMapKind.A1p, BlockMapKind.A2p])
def test_a_maps_injective(kind):
    t = parse_poly("1101")
    for length in range(1, 13):
        if length - domain_length(kind, 3, 0) < 1:
            continue
        images = {apply_map(kind, t, b) for b in product((0, 1), repeat=length)}
        assert len(images) == 2 ** length


@settings(max_examples=200, deadline=None)
@given(st.integers(1, 8).flatmap(lambda n: st.tuples(
    st.lists(st.integers(0, 1), min_size=n, max_size=n), st.sampled_from(B_KINDS), st.integers(0, 3))))
def test_matrix_rank_equals_bruteforce_injectivity(args):
    tail, kind, dk = args
    t = GfpPoly(tuple(tail) + (1,), 2)
    k = max(1, t.degree // 2) + dk
    if domain_length(kind, t.degree, k) > 12:
        return
    images = {apply_map(kind, t, b, k) for b in product((0, 1), repeat=domain_length(kind, t.degree, k))}
    assert injectivity_bruteforce(kind, t, k) == (len(images) == 2 ** domain_length(kind, t.degree, k))


def test_injectivity_theorem_refined():
    """Rank verdicts agree with the gcd/c0 criterion when c0 != 0 and k is admissible."""
    cases = 0
    for t in binary_rules(8, c0=1):
        n = t.degree
        for kind in (BlockMapKind.B1, BlockMapKind.B2):
            k0 = admissible_start(kind, n)
            for k in range(k0, k0 + 4):
                assert injectivity_bruteforce(kind, t, k) == theorem_verdict(kind, t), (t, kind, k)
                cases += 1
    assert cases == 2040


def test_primed_maps_injective_for_nonsuspicious():
    for t in binary_rules(8, c0=1):
        if suspicion(t).verdict != "nonsuspicious":
            continue
        n = t.degree
        for kind in (BlockMapKind.B1p, BlockMapKind.B2p):
            for k in range(n // 2 + 1, n // 2 + 5):
                assert injectivity_bruteforce(kind, t, k), (t, kind, k)


def test_irreducible_rules_are_nonsuspicious():
    for t in binary_rules(8, c0=1):
        if t.degree >= 2 and is_irreducible(t):
            assert suspicion(t).verdict == "nonsuspicious", t


@settings(max_examples=100, deadline=None)
@given(st.lists(st.integers(0, 1), min_size=1, max_size=10))
def test_suspicion_matches_definition(tail):
    t = GfpPoly(tuple(tail) + (1,), 2)
    o, e = odd_even_parts(t)
    expected = t[0] != 0 and gcd(o, e).degree == 0
    assert (suspicion(t).verdict == "nonsuspicious") == expected


# intersections

@pytest.mark.parametrize("rule", ["11", "111", "1101", "11001"])
def test_intersection_tables(rule):
    s = AutomatonSpec.parse(rule)
    n = s.n
    sets = block_sets(s, n + 14 + n // 2 + 1)
    rec = verify_theorem_main(line_complexity(s, 160), n)
    tables = [intersection_table(s, k, sets, odd=odd) for k in range(n + 1, n + 15) for odd in (False, True)]
    for tb in tables:
        assert tb.sizes["A1&A2"] == 1  # only the zero block
    evens = [tb for tb in tables if not tb.odd]
    b12 = [tb.sizes["B1&B2"] for tb in evens]
    assert b12 == sorted(b12)
    settled = [tb.c_cap for tb in tables if tb.k >= rec.threshold]
    assert len(settled) >= 4 and set(settled) == {rec.constant}
    csv = intersection_csv(tables)
    assert csv.splitlines()[0].startswith("k,parity,A1,A2,B1,B2,A1&A2")
    assert len(csv.splitlines()) == len(tables) + 1


def test_intersection_requires_large_k():
    with pytest.raises(ValueError):
        intersection_table(AutomatonSpec.parse("1101"), 3)


# decomposition counter and extension

@pytest.mark.parametrize("rule", ["11", "111", "1101", "11001", "1011011"])
def test_decomposition_counter_matches_scan(rule):
    seq = line_complexity(AutomatonSpec.parse(rule), 40)
    counter = DecompositionCounter(parse_poly(rule))
    assert [counter.count(k) for k in range(1, 41)] == list(seq.values[1:])


def test_extension_matches_direct_scan():
    s = AutomatonSpec.parse("1101")
    ext = complexity_sequence(s, 200, scan_kmax=64)
    direct = line_complexity(s, 200)
    assert ext.values == direct.values
    assert ext.extension["method"] == "recursion"
    assert ext.scan_kmax == 64


def test_extension_needs_binary_unit_initial():
    with pytest.raises(ValueError):
        complexity_sequence(AutomatonSpec.parse("11", 3), 100, scan_kmax=40)
