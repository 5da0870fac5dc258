"""Block maps of the mod-2 even/odd row decomposition.

Row 2r of A_2(1; T) is the square of row r, so its blocks are row-r blocks
with zeros interleaved (maps A1, A2).  Row 2r+1 is T times row 2r; a block
of it is read off T * (0[b^2]0) after discarding the n entries at each end
that b does not determine (maps B1, B2).  Primed kinds produce odd-length
blocks.  For output length L the maps are

    kind  domain length         output        read from
    A1    k                     2k            x0 0 x1 0 ... x(k-1) 0
    A2    k                     2k            0 x0 0 x1 ... 0 x(k-1)
    B1    k + floor(n/2)        2k            t[n : n+2k]
    B2    k + floor((n+1)/2)    2k            t[n+1 : n+2k+1]
    A1'   k + 1                 2k+1          x0 0 x1 ... 0 xk
    A2'   k                     2k+1          0 x0 0 ... x(k-1) 0
    B1'   k + ceil(n/2)         2k+1          t[n : n+2k+1]
    B2'   k + floor(n/2) + 1    2k+1          t[n+1 : n+2k+2]

with t = T * (0[b^2]0).  In every B case the domain is the shortest block
whose squared, padded product determines the whole read-out range.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from enum import Enum
from itertools import combinations

from . import gf2
from .automaton import AutomatonSpec
from .complexity import BlockSet, ComplexitySeq, ScanPolicy, block_sets, line_complexity
from .gfpoly import GfpPoly, clmul, format_poly, gcd, odd_even_parts

__all__ = [
    "BlockMapKind",
    "domain_length",
    "apply_map",
    "map_matrix",
    "injectivity_bruteforce",
    "theorem_verdict",
    "SuspicionReport",
    "suspicion",
    "IntersectionTable",
    "intersection_table",
    "intersection_csv",
    "DecompositionCounter",
    "complexity_sequence",
]


class BlockMapKind(str, Enum):
    A1 = "A1"
    A2 = "A2"
    B1 = "B1"
    B2 = "B2"
    A1p = "A1'"
    A2p = "A2'"
    B1p = "B1'"
    B2p = "B2'"

    @property
    def primed(self) -> bool:
        return self.value.endswith("'")

    @property
    def family(self) -> str:
        return self.value[0]

    @property
    def index(self) -> int:
        return int(self.value[1])


EVEN_KINDS = (BlockMapKind.A1, BlockMapKind.A2, BlockMapKind.B1, BlockMapKind.B2)
ODD_KINDS = (BlockMapKind.A1p, BlockMapKind.A2p, BlockMapKind.B1p, BlockMapKind.B2p)


def _kind(kind) -> BlockMapKind:
    return kind if isinstance(kind, BlockMapKind) else BlockMapKind(kind)


def _domain_offset(kind: BlockMapKind, n: int) -> int:
    return {
        BlockMapKind.A1: 0,
        BlockMapKind.A2: 0,
        BlockMapKind.B1: n // 2,
        BlockMapKind.B2: (n + 1) // 2,
        BlockMapKind.A1p: 1,
        BlockMapKind.A2p: 0,
        BlockMapKind.B1p: (n + 1) // 2,
        BlockMapKind.B2p: n // 2 + 1,
    }[kind]


def domain_length(kind, n: int, k: int) -> int:
    return k + _domain_offset(_kind(kind), n)


def output_length(kind, k: int) -> int:
    return 2 * k + 1 if _kind(kind).primed else 2 * k


def _require_mod2(rule: GfpPoly) -> int:
    if rule.p != 2:
        raise ValueError("block maps are defined for p = 2")
    if rule.degree < 1:
        raise ValueError("block maps need a rule of degree >= 1")
    return rule.degree


def _to_int(b) -> int:
    return sum((int(x) & 1) << i for i, x in enumerate(b))


def _to_tuple(v: int, length: int) -> tuple[int, ...]:
    return tuple((v >> i) & 1 for i in range(length))


def _apply_bits(kind: BlockMapKind, rule_bits: int, n: int, b: int, k: int) -> int:
    """Image of the bit-encoded block b (bit i = symbol i)."""
    length = output_length(kind, k)
    if kind.family == "A":
        first = 0 if kind.index == 1 else 1
        m = domain_length(kind, n, k)
        out = 0
        for i in range(m):
            if (b >> i) & 1:
                out |= 1 << (first + 2 * i)
        return out
    s = 0
    i = 0
    while b >> i:
        if (b >> i) & 1:
            s |= 1 << (2 * i + 1)
        i += 1
    start = n + kind.index - 1
    return (clmul(rule_bits, s) >> start) & ((1 << length) - 1)


def apply_map(kind, rule: GfpPoly, b, k: int | None = None) -> tuple[int, ...]:
    """Apply a block map to the block b (sequence of 0/1).

    k is inferred from len(b) when not given.
    """
    kind = _kind(kind)
    n = _require_mod2(rule)
    inferred = len(b) - _domain_offset(kind, n)
    if k is None:
        k = inferred
    if k != inferred:
        raise ValueError(f"{kind.value} with k={k} needs blocks of length {domain_length(kind, n, k)}, got {len(b)}")
    if k < 1:
        raise ValueError(f"block of length {len(b)} is too short for {kind.value} (degree {n})")
    return _to_tuple(_apply_bits(kind, rule.bits, n, _to_int(b), k), output_length(kind, k))


def _map_columns(kind: BlockMapKind, rule: GfpPoly, k: int) -> list[int]:
    """Column j = x^(2j+1) T restricted to the read-out rows."""
    n = rule.degree
    start = n + kind.index - 1
    mask = (1 << output_length(kind, k)) - 1
    return [((rule.bits << (2 * j + 1)) >> start) & mask for j in range(domain_length(kind, n, k))]


def _unit_columns(kind: BlockMapKind, n: int, k: int) -> list[int]:
    first = 0 if kind.index == 1 else 1
    return [1 << (first + 2 * j) for j in range(domain_length(kind, n, k))]


def map_matrix(kind, rule: GfpPoly, k: int) -> gf2.Gf2Matrix:
    """Matrix of a B-type map over GF(2), shape output_length x domain_length."""
    kind = _kind(kind)
    if kind.family != "B":
        raise ValueError("map_matrix is defined for the B kinds")
    n = _require_mod2(rule)
    if k < max(1, n // 2):
        raise ValueError(f"k={k} is below floor(n/2)={n // 2}; the map cannot be injective")
    return gf2.Gf2Matrix.from_columns(output_length(kind, k), _map_columns(kind, rule, k))


def injectivity_bruteforce(kind, rule: GfpPoly, k: int) -> bool:
    """Full column rank of the map matrix over GF(2)."""
    m = map_matrix(kind, rule, k)
    return gf2.rank(m.columns()) == m.ncols


def theorem_verdict(kind, rule: GfpPoly) -> bool:
    """Predicted injectivity of B1/B2 on the whole space.

    Even n: B1 iff c0 != 0 and (o, e) = 1; B2 iff (o, e) = 1.
    Odd n:  B1 iff (o, e) = 1; B2 iff c0 != 0 and (o, e) = 1.
    """
    kind = _kind(kind)
    n = _require_mod2(rule)
    o, e = odd_even_parts(rule)
    coprime = gcd(o, e).degree == 0
    c0 = rule[0] != 0
    needs_c0 = (kind.index == 1) == (n % 2 == 0)
    return coprime and (c0 or not needs_c0)


@dataclass(frozen=True)
class SuspicionReport:
    rule: GfpPoly
    o: GfpPoly
    e: GfpPoly
    gcd: GfpPoly
    c0_nonzero: bool
    b1_injective: bool
    b2_injective: bool

    @property
    def verdict(self) -> str:
        ok = self.c0_nonzero and self.gcd.degree == 0
        return "nonsuspicious" if ok else "suspicious"

    @property
    def parts(self) -> dict[str, str]:
        """Which theorem parts govern B1 and B2 for this degree."""
        if self.rule.degree % 2 == 0:
            return {"B1": "i", "B2": "ii"}
        return {"B1": "iii", "B2": "iv"}

    def to_dict(self) -> dict:
        return {
            "rule": format_poly(self.rule),
            "degree": self.rule.degree,
            "o": format_poly(self.o),
            "e": format_poly(self.e),
            "gcd": format_poly(self.gcd),
            "c0_nonzero": self.c0_nonzero,
            "verdict": self.verdict,
            "B1": {"part": self.parts["B1"], "injective": self.b1_injective},
            "B2": {"part": self.parts["B2"], "injective": self.b2_injective},
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)


def suspicion(rule: GfpPoly) -> SuspicionReport:
    _require_mod2(rule)
    o, e = odd_even_parts(rule)
    return SuspicionReport(
        rule=rule,
        o=o,
        e=e,
        gcd=gcd(o, e),
        c0_nonzero=rule[0] != 0,
        b1_injective=theorem_verdict(BlockMapKind.B1, rule),
        b2_injective=theorem_verdict(BlockMapKind.B2, rule),
    )


SET_NAMES = ("A1", "A2", "B1", "B2")


@dataclass(frozen=True)
class IntersectionTable:
    """Sizes of the four image sets and of all their intersections.

    ``sizes`` is keyed by "A1", "A1&B1", "A1&A2&B1", ... .  For odd tables the
    names refer to the primed maps.
    """

    k: int
    odd: bool
    sizes: dict = field(compare=True)
    union: int
    exact: bool

    @property
    def c_cap(self) -> int:
        """-sum(pairs) + sum(triples) - quadruple."""
        total = 0
        for r, sign in ((2, -1), (3, 1), (4, -1)):
            for combo in combinations(SET_NAMES, r):
                total += sign * self.sizes["&".join(combo)]
        return total

    def to_row(self) -> dict:
        row = {"k": self.k, "parity": "odd" if self.odd else "even"}
        row.update(self.sizes)
        row.update({"union": self.union, "C_cap": self.c_cap, "exact": self.exact})
        return row


def _set_keys():
    keys = list(SET_NAMES)
    for r in (2, 3, 4):
        keys += ["&".join(c) for c in combinations(SET_NAMES, r)]
    return keys


def intersection_table(spec: AutomatonSpec, k: int, sets: dict[int, BlockSet] | None = None,
                       odd: bool = False, policy: ScanPolicy = ScanPolicy()) -> IntersectionTable:
    """Materialize A1, A2, B1, B2 at block length 2k (2k+1 if odd) and intersect."""
    rule = spec.rule
    n = _require_mod2(rule)
    if k < n + 1:
        raise ValueError(f"k={k} too small; need k >= n+1 = {n + 1}")
    kinds = ODD_KINDS if odd else EVEN_KINDS
    need = max(domain_length(kd, n, k) for kd in kinds)
    if sets is None:
        sets = block_sets(spec, need, policy)
    exact = all(sets[domain_length(kd, n, k)].exact for kd in kinds)
    if not exact:
        raise ValueError("block sets are not exact; refusing to report intersections")
    images = {}
    for name, kd in zip(SET_NAMES, kinds):
        src = sets[domain_length(kd, n, k)].blocks
        images[name] = {_apply_bits(kd, rule.bits, n, _to_int(b), k) for b in src}
    sizes = {}
    for key in _set_keys():
        parts = key.split("&")
        acc = images[parts[0]]
        for other in parts[1:]:
            acc = acc & images[other]
        sizes[key] = len(acc)
    union = len(set().union(*images.values()))
    return IntersectionTable(k, odd, sizes, union, exact)


def intersection_csv(tables) -> str:
    keys = ["k", "parity"] + _set_keys() + ["union", "C_cap", "exact"]
    lines = [",".join(keys)]
    for t in tables:
        row = t.to_row()
        lines.append(",".join(str(row[key]).lower() if isinstance(row[key], bool) else str(row[key])
                              for key in keys))
    return "\n".join(lines) + "\n"


class DecompositionCounter:
    """Exact a(L) for A_2(1; T) by the even/odd row decomposition alone.

    Every row is the square of a row (even case) or T times a square (odd
    case), so 𝒜(L) is the union of the four images of shorter accessible
    sets, and the accessible blocks of a fixed length L0 >= n + 2 are the
    least set containing the windows of row 0 and closed under the four maps.
    No rows are scanned.  Above the explicit base, sizes come from the
    (injective) images, and blocks lying in two or more images are found in
    the pairwise intersections of the linear images, which are small.
    """

    def __init__(self, rule: GfpPoly, base_length: int = 24):
        n = _require_mod2(rule)
        self.rule = rule
        self.n = n
        self.fixed_length = 2 * ((n + 1) // 2) + 2
        self.base_length = max(base_length, self.fixed_length)
        self._base: dict[int, set[int]] = {}
        self._closure()
        for length in range(self.fixed_length + 1, self.base_length + 1):
            self._base[length] = self._images(length, self._base)
        self._counts: dict[int, int] = {}
        self._parts: dict[int, list] = {}
        self._memo: dict[tuple[int, int], bool] = {}

    def _images(self, length: int, sets) -> set[int]:
        k, odd = divmod(length, 2)
        out = set()
        for kd in ODD_KINDS if odd else EVEN_KINDS:
            m = domain_length(kd, self.n, k)
            out.update(_apply_bits(kd, self.rule.bits, self.n, b, k) for b in sets[m])
        return out

    def _closure(self):
        top = self.fixed_length
        blocks = {0} | {1 << i for i in range(top)}
        while True:
            sets = {m: {b & ((1 << m) - 1) for b in blocks} for m in range(1, top + 1)}
            grown = blocks | self._images(top, sets)
            if grown == blocks:
                break
            blocks = grown
        self._base.update(sets)

    def _parts_for(self, length: int):
        parts = self._parts.get(length)
        if parts is None:
            k, odd = divmod(length, 2)
            parts = []
            for kd in ODD_KINDS if odd else EVEN_KINDS:
                if kd.family == "A":
                    cols = _unit_columns(kd, self.n, k)
                else:
                    cols = _map_columns(kd, self.rule, k)
                solver = gf2.ColumnSolver(cols)
                if not solver.injective:
                    raise ValueError(f"{kd.value} is not injective at length {length}")
                parts.append((domain_length(kd, self.n, k), cols, solver))
            self._parts[length] = parts
        return parts

    def accessible(self, block: int, length: int) -> bool:
        """Membership of a bit-encoded block (bit i = symbol i) in 𝒜(length)."""
        if length <= self.base_length:
            return block in self._base[length]
        key = (length, block)
        hit = self._memo.get(key)
        if hit is None:
            hit = any(self._member(part, block) for part in self._parts_for(length))
            self._memo[key] = hit
        return hit

    def _member(self, part, block: int) -> bool:
        m, _, solver = part
        pre = solver.solve(block)
        return pre is not None and self.accessible(pre, m)

    def count(self, length: int) -> int:
        if length < 1:
            raise ValueError("length must be positive")
        if length <= self.base_length:
            return len(self._base[length])
        if length in self._counts:
            return self._counts[length]
        parts = self._parts_for(length)
        total = sum(self.count(m) for m, _, _ in parts)
        shared = set()
        for a, b in combinations(parts, 2):
            shared.update(gf2.span(gf2.image_intersection(a[1], b[1])))
        for v in shared:
            mult = sum(1 for part in parts if self._member(part, v))
            if mult > 1:
                total -= mult - 1
        self._counts[length] = total
        return total


def _spot_lengths(lo: int, hi: int) -> list[int]:
    out = {hi, hi - 1}
    j = 1
    while j <= hi:
        out.update((j, 3 * j // 2 if j > 1 else 1))
        j *= 2
    return sorted(L for L in out if lo < L <= hi)


def complexity_sequence(spec: AutomatonSpec, k_max: int, policy: ScanPolicy = ScanPolicy(),
                        scan_kmax: int | None = None) -> ComplexitySeq:
    """a(0..k_max), row-scanned up to scan_kmax and extended above it.

    The extension needs p = 2, initial state 1 and a nonsuspicious rule.  The
    exact decomposition counter must reproduce the scan on 1..scan_kmax, the
    even/odd recursion is fitted on the scanned values and used to extend,
    and the counter independently recomputes the extension at powers of two,
    at 3*2^j and at the two top indices.
    """
    from .recursion import RecursionSpec, verify_theorem_main

    if scan_kmax is None or k_max <= scan_kmax:
        return line_complexity(spec, k_max, policy)
    if spec.p != 2 or spec.initial != GfpPoly.one(2):
        raise ValueError("values beyond the scan need p = 2 and initial state 1")
    scanned = line_complexity(spec, scan_kmax, policy)
    if not scanned.exact:
        raise ValueError("scan did not stabilize")
    counter = DecompositionCounter(spec.rule)
    for k in range(1, scan_kmax + 1):
        if counter.count(k) != scanned[k]:
            raise ValueError(f"scan and decomposition disagree at k={k}: {scanned[k]} vs {counter.count(k)}")
    n = spec.n
    rec = verify_theorem_main(scanned, n)
    if not isinstance(rec, RecursionSpec):
        raise ValueError(f"no recursion on the scanned range: {rec.reason}")
    a = list(scanned.values)
    lo, hi = n // 2, (n + 1) // 2
    for L in range(scan_kmax + 1, k_max + 1):
        k, odd = divmod(L, 2)
        if odd:
            a.append(a[k] + a[k + 1] + a[k + hi] + a[k + lo + 1] + rec.constant)
        else:
            a.append(2 * a[k] + a[k + lo] + a[k + hi] + rec.constant)
    checked = _spot_lengths(scan_kmax, k_max)
    for L in checked:
        if counter.count(L) != a[L]:
            raise ValueError(f"recursion extension disagrees with the exact count at k={L}")
    return ComplexitySeq(spec, tuple(a), policy, scanned.rows_scanned, True, scan_kmax=scan_kmax,
                         extension={"method": "recursion", "recursion": rec.to_dict(), "spot_checked": checked})
