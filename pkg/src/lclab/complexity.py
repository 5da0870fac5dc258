"""Accessible blocks and the line complexity sequence a_T(k).

A block of length k is accessible when it occurs in some row of the
automaton, the rows being embedded in an infinite zero background (windows
start at -(k-1)).  Rows are scanned in order until no new block has shown up
for ``window`` consecutive rows, or until the hard row limit; the second case
is reported through ``exact=False``.

For a constant initial state the scan also runs through row p*l + p - 1,
where l is the last row that produced a new window.  Row p*r + j equals
(row r)^p * T^j, so a window of row p*r + j is a function of a window of
row r no longer than the original (once the length is at least n + 1).  A
block first seen after row p*l + p - 1 would therefore need a parent first
seen after row l, which is impossible; under this rule the scan is exact.
The window length is raised to n + 1 internally when needed.

Every length-k window is the prefix of the length-K window with the same
start, so a single scan at K = k_max determines a(k) for all k <= k_max:
sort the distinct K-windows and count adjacent pairs whose common prefix is
shorter than k.
"""
from __future__ import annotations

import logging
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

from .automaton import AutomatonSpec
from .gfpoly import GfpPoly

log = logging.getLogger(__name__)

__all__ = [
    "ScanPolicy",
    "WindowScan",
    "BlockSet",
    "ComplexitySeq",
    "scan_windows",
    "accessible_blocks",
    "block_sets",
    "line_complexity",
    "berthe_ratio_report",
    "complexity_csv",
]

DEFAULT_ROW_LIMIT = 1 << 18


@dataclass(frozen=True)
class ScanPolicy:
    """Row-scan cutoff.  ``window=None`` means max(64, 4*k_max)."""

    window: int | None = None
    row_limit: int = DEFAULT_ROW_LIMIT

    def effective_window(self, k_max: int) -> int:
        if self.window is not None:
            return self.window
        return max(64, 4 * k_max)

    def doubled(self, k_max: int) -> "ScanPolicy":
        """Same policy with twice the stabilization window used at k_max."""
        return ScanPolicy(2 * self.effective_window(k_max), self.row_limit)


def _bits_per_symbol(p: int) -> int:
    for b in (1, 2, 4, 8):
        if p <= 1 << b:
            return b
    return 16


def _pack(sym: np.ndarray, p: int) -> np.ndarray:
    """Pack an (m, k) symbol matrix into fixed-width uint8 rows, MSB first.

    Byte order of the packed rows equals lexicographic order of the symbols.
    """
    b = _bits_per_symbol(p)
    m, k = sym.shape
    if b == 1:
        return np.packbits(sym, axis=1)
    if b == 16:
        return np.ascontiguousarray(sym.astype(">u2")).view(np.uint8).reshape(m, 2 * k)
    if b == 8:
        return np.ascontiguousarray(sym, dtype=np.uint8)
    per = 8 // b
    width = -(-k // per)
    full = np.zeros((m, width * per), dtype=np.uint8)
    full[:, :k] = sym
    full = full.reshape(m, width, per)
    out = np.zeros((m, width), dtype=np.uint8)
    for i in range(per):
        out |= full[:, :, i] << (8 - b * (i + 1))
    return out


def _unpack(packed: np.ndarray, p: int, k: int) -> np.ndarray:
    b = _bits_per_symbol(p)
    m = packed.shape[0]
    if b == 1:
        return np.unpackbits(packed, axis=1, count=k)
    if b == 16:
        return np.ascontiguousarray(packed).view(">u2").reshape(m, -1)[:, :k].astype(np.int64)
    if b == 8:
        return packed[:, :k]
    per = 8 // b
    mask = (1 << b) - 1
    parts = [(packed >> (8 - b * (i + 1))) & mask for i in range(per)]
    return np.stack(parts, axis=2).reshape(m, -1)[:, :k]


@dataclass(frozen=True)
class WindowScan:
    """Distinct windows of one length K, as rows of a uint8 matrix.

    Symbols are packed at 1, 2, 4, 8 or 16 bits (the least power of two
    holding p - 1), most significant first.  Rows are sorted, which is also
    the lexicographic order of the underlying symbol strings.
    """

    spec: AutomatonSpec
    k: int
    packed: np.ndarray
    rows_scanned: int
    last_new_row: int
    exact: bool

    def __len__(self):
        return self.packed.shape[0]

    def symbols(self) -> np.ndarray:
        return _unpack(self.packed, self.spec.p, self.k)

    def prefix_counts(self) -> list[int]:
        """[a(0), a(1), ..., a(K)] from the sorted distinct K-windows."""
        count = len(self)
        counts = [1] + [0] * self.k
        if count == 0:
            return counts
        lcp = _adjacent_lcp(self.packed, _bits_per_symbol(self.spec.p), self.k)
        hist = np.bincount(lcp, minlength=self.k + 1)
        # a(k) = 1 + #{adjacent pairs with lcp < k}
        running = 1
        for k in range(1, self.k + 1):
            running += int(hist[k - 1])
            counts[k] = running
        return counts

    def blocks(self, k: int | None = None) -> frozenset:
        """Distinct length-k prefixes as tuples of residues."""
        k = self.k if k is None else k
        if not 1 <= k <= self.k:
            raise ValueError(f"prefix length {k} outside [1, {self.k}]")
        sym = self.symbols()[:, :k]
        return frozenset(map(tuple, np.unique(sym, axis=0).tolist()))


def _adjacent_lcp(packed: np.ndarray, bits: int, k: int) -> np.ndarray:
    if packed.shape[0] < 2:
        return np.zeros(0, dtype=np.int64)
    diff = packed[1:] != packed[:-1]
    first = diff.argmax(axis=1).astype(np.int64)
    if bits == 16:
        return np.minimum(first // 2, k - 1)
    x = (packed[1:] ^ packed[:-1])[np.arange(first.size), first]
    lead = 7 - np.floor(np.log2(x.astype(np.float64))).astype(np.int64)
    return np.minimum(first * (8 // bits) + lead // bits, k - 1)


@dataclass(frozen=True)
class BlockSet:
    k: int
    blocks: frozenset
    rows_scanned: int
    exact: bool

    def __len__(self):
        return len(self.blocks)

    def __contains__(self, b):
        return tuple(b) in self.blocks


@dataclass(frozen=True)
class ComplexitySeq:
    """a(0..k_max) for one automaton.

    ``scan_kmax`` is the largest k produced by the row scan; values above it
    (if any) came from the method named in ``extension``.
    """

    spec: AutomatonSpec
    values: tuple[int, ...]
    policy: ScanPolicy
    rows_scanned: int
    exact: bool
    scan_kmax: int = -1
    extension: object = field(default=None, compare=False)

    def __post_init__(self):
        if self.scan_kmax < 0:
            object.__setattr__(self, "scan_kmax", len(self.values) - 1)

    @property
    def k_max(self) -> int:
        return len(self.values) - 1

    def __getitem__(self, k):
        return self.values[k]

    def __len__(self):
        return len(self.values)


def _threads() -> int:
    try:
        return max(1, int(os.environ.get("LCLAB_THREADS", "1")))
    except ValueError:
        return 1


BATCH_BYTES = 1 << 24


def _encode_windows(row: np.ndarray, k: int, p: int) -> np.ndarray:
    """Packed length-k windows of ``row`` on a zero background, one per start.

    Equivalent to packing the sliding-window matrix, but builds each packed
    byte once per position and reads the windows as a strided view.
    """
    b = _bits_per_symbol(p)
    if b == 16:
        pad = np.zeros(k - 1, dtype=row.dtype)
        return _pack(sliding_window_view(np.concatenate([pad, row, pad]), k), p)
    per = 8 // b
    width = -(-k // per)
    m = row.size + k - 1
    seq = np.zeros(k - 1 + row.size + (k - 1) + width * per, dtype=np.uint8)
    seq[k - 1:k - 1 + row.size] = row
    grams = np.zeros(seq.size - per + 1, dtype=np.uint8)
    for i in range(per):
        grams |= seq[i:i + grams.size] << (8 - b * (i + 1))
    out = np.lib.stride_tricks.as_strided(grams, shape=(m, width), strides=(1, per), writeable=False).copy()
    tail = k - (width - 1) * per
    if tail < per:
        out[:, -1] &= (0xFF << (8 - b * tail)) & 0xFF
    return out


_MIX = np.uint64(0x9E3779B97F4A7C15)


def _lanes(enc: np.ndarray) -> np.ndarray:
    m, w = enc.shape
    words = -(-w // 8)
    buf = np.zeros((m, words * 8), dtype=np.uint8)
    buf[:, :w] = enc
    return buf.view(np.uint64)


def _hash(lanes: np.ndarray) -> np.ndarray:
    h = np.zeros(lanes.shape[0], dtype=np.uint64)
    with np.errstate(over="ignore"):
        for j in range(lanes.shape[1]):
            h = (h ^ lanes[:, j]) * _MIX
            h ^= h >> np.uint64(29)
    return h


def _distinct_first(enc: np.ndarray, lanes: np.ndarray | None = None, h: np.ndarray | None = None) -> np.ndarray:
    """Indices of the first occurrence of each distinct row of ``enc``, sorted.

    Rows are hashed to 64 bits and grouped on the hash; every row is then
    compared with its group's representative, and a collision falls back to
    the exact byte sort.
    """
    m, w = enc.shape
    if m == 0:
        return np.zeros(0, dtype=np.int64)
    lanes = _lanes(enc) if lanes is None else lanes
    h = _hash(lanes) if h is None else h
    order = np.argsort(h, kind="stable")
    hs = h[order]
    start = np.empty(m, dtype=bool)
    start[0] = True
    np.not_equal(hs[1:], hs[:-1], out=start[1:])
    rep = order[start]
    if lanes.shape[1] == 1 or np.array_equal(lanes[order], lanes[rep[np.cumsum(start) - 1]]):
        return np.sort(rep)
    log.debug("hash collision in a batch of %d windows; using the byte sort", m)
    _, first = np.unique(np.ascontiguousarray(enc).view(np.dtype((np.void, w))).ravel(), return_index=True)
    return np.sort(first)


class _SeenIndex:
    """Sorted hashes of the windows seen so far, with the windows themselves.

    ``known`` marks rows whose hash is present and whose bytes equal the
    stored window for that hash; everything else goes through the exact set.
    """

    def __init__(self, words: int):
        self.h = np.zeros(0, dtype=np.uint64)
        self.lanes = np.zeros((0, words), dtype=np.uint64)

    def known(self, lanes: np.ndarray, h: np.ndarray) -> np.ndarray:
        if self.h.size == 0:
            return np.zeros(h.size, dtype=bool)
        pos = np.minimum(np.searchsorted(self.h, h), self.h.size - 1)
        hit = self.h[pos] == h
        idx = np.flatnonzero(hit)
        hit[idx] = (lanes[idx] == self.lanes[pos[idx]]).all(axis=1)
        return hit

    def add(self, lanes: np.ndarray, h: np.ndarray):
        allh = np.concatenate([self.h, h])
        order = np.argsort(allh, kind="stable")
        self.h = allh[order]
        self.lanes = np.concatenate([self.lanes, lanes])[order]


def _row_arrays(spec: AutomatonSpec):
    p = spec.p
    dtype = np.uint8 if p <= 256 else np.uint16
    rule = [(i, c) for i, c in enumerate(spec.rule.coeffs) if c]
    n = spec.rule.degree
    cur = np.array(spec.initial.coeffs, dtype=np.int64)
    while True:
        yield cur.astype(dtype)
        nxt = np.zeros(cur.size + n, dtype=np.int64)
        for i, c in rule:
            nxt[i:i + cur.size] += c * cur
        nxt %= p
        cur = nxt


class _Frobenius:
    """Row p*r + j of A(c; S) as (row r)^p * S^j, i.e. row r spread p apart times S^j."""

    def __init__(self, spec: AutomatonSpec):
        self.p = spec.p
        self.terms = []
        acc = np.array([1], dtype=np.int64)
        rule = np.array(spec.rule.coeffs, dtype=np.int64)
        for _ in range(self.p):
            self.terms.append([(i, int(c)) for i, c in enumerate(acc) if c])
            acc = np.convolve(acc, rule) % self.p

    def child(self, parent: np.ndarray, j: int) -> np.ndarray:
        p = self.p
        spread = (parent.size - 1) * p + 1
        terms = self.terms[j]
        out = np.zeros(spread + terms[-1][0], dtype=np.int64)
        for i, c in terms:
            out[i:i + spread:p] += c * parent.astype(np.int64)
        out %= p
        return out.astype(parent.dtype)


def _decimate(spec: AutomatonSpec) -> tuple[AutomatonSpec, int]:
    """(S, q) with rule T(x) = S(x^q) and initial I(x) = I'(x^q), q = p^j maximal.

    Row r of the automaton is then row r of A(I'; S) with q - 1 zeros
    inserted between consecutive cells.
    """
    p = spec.p
    q = 1
    rule, init = spec.rule.coeffs, spec.initial.coeffs
    while len(rule) > q * p and all(not c for i, c in enumerate(rule) if i % (q * p)) \
            and all(not c for i, c in enumerate(init) if i % (q * p)):
        q *= p
    if q == 1:
        return spec, 1
    return AutomatonSpec(GfpPoly(rule[::q], p), GfpPoly(init[::q], p)), q


def _has_zero_window(row: np.ndarray, q: int, k: int) -> bool:
    """Whether the row inflated by q has an all-zero length-k window."""
    nz = np.flatnonzero(row)
    if nz.size == 0 or nz[0] > 0 or nz[-1] < row.size - 1:
        return True
    return nz.size > 1 and int(np.diff(nz).max()) * q - 1 >= k


def _inflate(sym: np.ndarray, q: int, k: int) -> np.ndarray:
    """Nonzero length-k windows obtained by spreading base windows q apart, at every phase."""
    out = []
    for phi in range(min(q, k)):
        full = np.zeros((sym.shape[0], k), dtype=sym.dtype)
        full[:, phi::q] = sym[:, :-(-(k - phi) // q)]
        out.append(full[full.any(axis=1)])
    return np.concatenate(out)


def scan_windows(spec: AutomatonSpec, k: int, policy: ScanPolicy = ScanPolicy()) -> WindowScan:
    """Collect the distinct length-k windows over rows 0, 1, 2, ...

    Rows are taken in batches.  Each batch is deduplicated in numpy, keeping
    the first row in which every window occurs, and only its distinct windows
    meet the running set.  The stopping rule is evaluated row by row on the
    merged stream, so the result does not depend on batching.

    With a constant initial state, a nonzero window of row p*r + j is a
    function of a window of row r (for lengths >= max(n + 1, p)), so it can
    only be new if row r produced a new nonzero window; other rows are
    stepped over without encoding.  The zero window is tracked separately
    from the gaps between nonzero cells of every row; it is always part of
    the result, since every row sits on a zero background.

    When rule and initial state are polynomials in x^q, the rows of the
    smaller automaton are scanned with windows of length ceil(k/q): a nonzero
    window is fixed by its phase and the base cells it covers.
    """
    if k < 1:
        raise ValueError("window length must be >= 1")
    p = spec.p
    stable_for = policy.effective_window(k)
    certify = spec.has_constant_initial()
    width_k = max(k, spec.n + 1, p) if certify else k
    base, q = _decimate(spec)
    base_k = -(-width_k // q)
    base_width = _pack(np.zeros((1, base_k), dtype=np.uint8), p).shape[1]
    zero_key = bytes(base_width)
    index = _SeenIndex(-(-base_width // 8))
    seen: set[bytes] = set()
    productive: set[int] = set()
    zero_seen = False
    last_new = 0
    r = 0
    threads = _threads()
    gen = _row_arrays(base)
    exact = True
    pool = ThreadPoolExecutor(threads) if threads > 1 else None

    def stop_after(last: int) -> int:
        # rows done at which the scan halts if no row after ``last`` adds a window
        return max(last + 1 + stable_for, p * (last + 1) if certify else 0)

    def needs_scan(i: int) -> bool:
        return not certify or i // p >= r or i // p in productive

    frob = _Frobenius(base) if certify else None
    stored: dict[int, np.ndarray] = {}
    sequential = True

    try:
        while True:
            # once the zero window is known, only rows with a productive parent
            # are built, directly from the stored parent
            if sequential and certify and zero_seen and r >= 16:
                sequential = False
            batch: dict[int, np.ndarray] = {}
            size = 0
            cap = max(8, r // 4)
            end = r
            while end < policy.row_limit and size < BATCH_BYTES and end - r < cap:
                if sequential:
                    batch[end] = next(gen)
                elif needs_scan(end):
                    batch[end] = frob.child(stored[end // p], end % p)
                if end in batch and needs_scan(end):
                    size += (batch[end].size + base_k) * base_k
                end += 1
            if end == r:
                exact = False
                break
            todo = [i for i in range(r, end) if needs_scan(i)]
            rows = [batch[i] for i in todo]
            if pool is None:
                encoded = [_encode_windows(a, base_k, p) for a in rows]
            else:
                encoded = list(pool.map(lambda a: _encode_windows(a, base_k, p), rows))
            if encoded:
                row_of = np.repeat(np.array(todo, dtype=np.int64), [e.shape[0] for e in encoded])
                enc = np.ascontiguousarray(np.concatenate(encoded))
            else:
                row_of = np.zeros(0, dtype=np.int64)
                enc = np.zeros((0, base_width), dtype=np.uint8)
            lanes = _lanes(enc)
            h = _hash(lanes)
            cand = np.flatnonzero(~index.known(lanes, h))
            first = cand[_distinct_first(enc[cand], lanes[cand], h[cand])]
            uniq = enc[first].view(np.dtype((np.void, base_width))).ravel()
            fresh = np.array([i for i, w in enumerate(uniq.tolist()) if w not in seen and w != zero_key],
                             dtype=np.int64)
            fresh_rows = row_of[first[fresh]]
            zero_row = None
            if not zero_seen:
                zero_row = next((i for i, a in batch.items() if _has_zero_window(a, q, width_k)), None)
            new_rows = fresh_rows if zero_row is None else np.append(fresh_rows, zero_row)
            stop = None
            last = last_new
            for nr in np.unique(new_rows).tolist():
                if stop_after(last) <= nr:
                    break
                last = nr
            if stop_after(last) <= end:
                stop = max(stop_after(last), r + 1)
                keep = fresh_rows < stop
                fresh, fresh_rows = fresh[keep], fresh_rows[keep]
                if zero_row is not None and zero_row >= stop:
                    zero_row = None
            if fresh.size:
                seen.update(uniq[fresh].tolist())
                index.add(lanes[first[fresh]], h[first[fresh]])
                productive.update(fresh_rows.tolist())
                if certify:
                    stored.update((i, batch[i]) for i in set(fresh_rows.tolist()))
                last_new = max(last_new, int(fresh_rows.max()))
            if zero_row is not None:
                zero_seen = True
                last_new = max(last_new, zero_row)
            if stop is not None:
                r = stop
                break
            r = end
            for i in [i for i in stored if i < r // p]:
                del stored[i]
            if r >= policy.row_limit:
                exact = False
                break
    finally:
        if pool is not None:
            pool.shutdown()
    if not exact:
        log.warning("row limit %d reached before stabilization (k=%d)", policy.row_limit, k)
    ordered = sorted(seen)
    packed = np.frombuffer(b"".join(ordered), dtype=np.uint8).reshape(len(ordered), base_width)
    # the zero background makes the all-zero window accessible in every row;
    # zero_seen above only drives the stopping rule
    if q > 1:
        sym = _inflate(_unpack(packed, p, base_k), q, width_k)
        sym = np.concatenate([np.zeros((1, width_k), dtype=sym.dtype), sym])
        packed = _pack(np.unique(sym, axis=0), p)
    else:
        packed = np.concatenate([np.zeros((1, base_width), dtype=np.uint8), packed])
    if width_k > k:
        packed = _pack(np.unique(_unpack(packed, p, width_k)[:, :k], axis=0), p)
    return WindowScan(spec, k, packed, r, last_new, exact)


def accessible_blocks(spec: AutomatonSpec, k: int, policy: ScanPolicy = ScanPolicy()) -> BlockSet:
    scan = scan_windows(spec, k, policy)
    return BlockSet(k, scan.blocks(k), scan.rows_scanned, scan.exact)


def block_sets(spec: AutomatonSpec, k_max: int, policy: ScanPolicy = ScanPolicy()) -> dict[int, BlockSet]:
    """Block sets for every k in 1..k_max from one scan at k_max."""
    scan = scan_windows(spec, k_max, policy)
    sym = scan.symbols()
    out = {}
    for k in range(1, k_max + 1):
        blocks = frozenset(map(tuple, np.unique(sym[:, :k], axis=0).tolist()))
        out[k] = BlockSet(k, blocks, scan.rows_scanned, scan.exact)
    return out


def line_complexity(spec: AutomatonSpec, k_max: int, policy: ScanPolicy = ScanPolicy()) -> ComplexitySeq:
    if k_max < 1:
        raise ValueError("k_max must be >= 1")
    scan = scan_windows(spec, k_max, policy)
    values = scan.prefix_counts()
    return ComplexitySeq(spec, tuple(values), policy, scan.rows_scanned, scan.exact)


def berthe_ratio_report(seq: ComplexitySeq) -> list[tuple[int, Fraction]]:
    """(k, a(k)/k^2) for k = 1..k_max, exactly."""
    return [(k, Fraction(seq.values[k], k * k)) for k in range(1, seq.k_max + 1)]


def complexity_csv(seq: ComplexitySeq) -> str:
    lines = ["k,a_k,exact"]
    flag = "true" if seq.exact else "false"
    for k, a in enumerate(seq.values):
        lines.append(f"{k},{a},{flag}")
    return "\n".join(lines) + "\n"
