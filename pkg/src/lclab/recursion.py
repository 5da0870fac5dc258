"""Fitting and checking recursions for the line complexity sequence.

Two shapes are handled.  The mod-2 pair of displays

    a(2k)   = 2a(k) + a(k + floor(n/2)) + a(k + floor((n+1)/2)) + C
    a(2k+1) = a(k) + a(k+1) + a(k + floor((n+1)/2)) + a(k + floor(n/2) + 1) + C

and the order-n form for general p

    a(k) = sum_{j<p} sum_{r<p} a(floor((k + j*n + r)/p)) + C.

At p = 2 the second reduces to the first (k even or odd), with the
threshold measured on a different index.

Fits take C from the largest checkable index and sweep down to the
smallest K from which the identity holds throughout; a fit needs at least
MIN_RUN consecutive verified indices.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from math import gcd

from .automaton import AutomatonSpec
from .complexity import ScanPolicy, block_sets, line_complexity

__all__ = [
    "MIN_RUN",
    "RecursionSpec",
    "Counterexample",
    "theorem_main_residuals",
    "verify_theorem_main",
    "general_order_residuals",
    "fit_general_order",
    "PowerReport",
    "check_power_p_identity",
    "RelprimeReport",
    "check_relprime_invariance",
    "power_order",
    "p_adic_valuation",
]

MIN_RUN = 16

THEOREM_MAIN = "theorem_main_even_odd"
GENERAL_ORDER = "general_order"


@dataclass(frozen=True)
class RecursionSpec:
    p: int
    order: int
    constant: int
    threshold: int
    verified_range: tuple[int, int]
    flavor: str = THEOREM_MAIN

    def to_dict(self) -> dict:
        return {
            "p": self.p,
            "order": self.order,
            "constant": self.constant,
            "threshold": self.threshold,
            "verified_range": list(self.verified_range),
            "flavor": self.flavor,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_dict(cls, d: dict) -> "RecursionSpec":
        return cls(d["p"], d["order"], d["constant"], d["threshold"],
                   tuple(d["verified_range"]), d.get("flavor", THEOREM_MAIN))


@dataclass(frozen=True)
class Counterexample:
    """Failure of a fit.

    ``k`` is the largest index (below the settled tail) where the identity
    breaks; ``reason`` says why the fit was rejected.
    """

    k: int
    parity: str
    expected: int
    actual: int
    reason: str
    constants: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "k": self.k,
            "parity": self.parity,
            "expected": self.expected,
            "actual": self.actual,
            "reason": self.reason,
            "constants": self.constants,
        }


def _values(seq) -> tuple[int, ...]:
    if getattr(seq, "exact", True) is False:
        raise ValueError("sequence is not exact")
    return tuple(seq.values if hasattr(seq, "values") else seq)


def theorem_main_residuals(seq, n: int) -> tuple[dict[int, int], dict[int, int]]:
    """C(k) for the even and odd displays, k = 1..floor((k_max - n)/2)."""
    a = _values(seq)
    if n < 1:
        raise ValueError("degree must be >= 1")
    lo, hi = n // 2, (n + 1) // 2
    top = (len(a) - 1 - n) // 2
    even, odd = {}, {}
    for k in range(1, top + 1):
        even[k] = a[2 * k] - (2 * a[k] + a[k + lo] + a[k + hi])
        odd[k] = a[2 * k + 1] - (a[k] + a[k + 1] + a[k + hi] + a[k + lo + 1])
    return even, odd


def verify_theorem_main(seq, n: int) -> RecursionSpec | Counterexample:
    """Fit one constant C for both displays and the smallest threshold K."""
    spec = getattr(seq, "spec", None)
    if spec is not None and spec.p != 2:
        raise ValueError("the even/odd displays are stated for p = 2")
    even, odd = theorem_main_residuals(seq, n)
    top = max(even, default=0)
    if top < 4 * n:
        raise ValueError(f"sequence too short: {top} usable indices, need {4 * n}")
    c = even[top]
    if odd[top] != c:
        return Counterexample(top, "odd", c, odd[top], "parities disagree at the largest index",
                              {"even": c, "odd": odd[top]})
    k = top
    while k >= 1 and even[k] == c and odd[k] == c:
        k -= 1
    threshold = k + 1
    if top - threshold + 1 < MIN_RUN:
        parity = "even" if even[k] != c else "odd"
        actual = even[k] if parity == "even" else odd[k]
        return Counterexample(k, parity, c, actual,
                              f"only {top - threshold + 1} consecutive indices verify",
                              {"even": c, "odd": odd[top]})
    return RecursionSpec(2, n, c, threshold, (threshold, top), THEOREM_MAIN)


def general_order_residuals(seq, n: int, p: int) -> dict[int, int]:
    a = _values(seq)
    k_max = len(a) - 1
    out = {}
    for k in range(1, k_max + 1):
        if (k + (p - 1) * n + p - 1) // p > k_max:
            break
        rhs = sum(a[(k + j * n + r) // p] for j in range(p) for r in range(p))
        out[k] = a[k] - rhs
    return out


def fit_general_order(seq, n_max: int, p: int | None = None) -> RecursionSpec | None:
    """Smallest order n <= n_max with a verified order-n identity."""
    if p is None:
        p = seq.spec.p
    a = _values(seq)
    if len(a) - 1 < 2 * MIN_RUN:
        raise ValueError("sequence too short to fit a recursion")
    for n in range(1, n_max + 1):
        res = general_order_residuals(a, n, p)
        if not res:
            continue
        top = max(res)
        c = res[top]
        k = top
        while k >= 1 and res[k] == c:
            k -= 1
        if top - k >= MIN_RUN:
            return RecursionSpec(p, n, c, k + 1, (k + 1, top), GENERAL_ORDER)
    return None


@dataclass(frozen=True)
class PowerReport:
    p: int
    checked: int
    mismatches: tuple = ()

    @property
    def ok(self) -> bool:
        return not self.mismatches


def _require_constant_initial(spec: AutomatonSpec):
    if not spec.has_constant_initial():
        raise ValueError("a constant initial state is required")


def check_power_p_identity(spec: AutomatonSpec, k_range, r_range=None,
                           policy: ScanPolicy = ScanPolicy()) -> PowerReport:
    """Compare a_{T^p}(pk + r) with (p - r)a_T(k) + r a_T(k+1) + 1 - p."""
    _require_constant_initial(spec)
    p = spec.p
    ks = list(k_range)
    rs = list(range(p) if r_range is None else r_range)
    if not ks:
        return PowerReport(p, 0)
    if min(ks) < 1 or any(not 0 <= r < p for r in rs):
        raise ValueError("need k >= 1 and 0 <= r < p")
    base = line_complexity(spec, max(ks) + 1, policy)
    powered = line_complexity(spec.power(p), p * max(ks) + max(rs, default=0), policy)
    if not (base.exact and powered.exact):
        raise ValueError("scan did not stabilize")
    bad = []
    for k in ks:
        for r in rs:
            lhs = powered[p * k + r]
            rhs = (p - r) * base[k] + r * base[k + 1] + 1 - p
            if lhs != rhs:
                bad.append((k, r, lhs, rhs))
    return PowerReport(p, len(ks) * len(rs), tuple(bad))


@dataclass(frozen=True)
class RelprimeReport:
    n: int
    k_max: int
    differing: tuple = ()

    @property
    def ok(self) -> bool:
        return not self.differing


def check_relprime_invariance(spec: AutomatonSpec, n: int, k_max: int,
                              policy: ScanPolicy = ScanPolicy()) -> RelprimeReport:
    """Block sets of T and T^n coincide for every k <= k_max."""
    if n < 1:
        raise ValueError("power must be positive")
    if gcd(spec.p, n) != 1:
        raise ValueError(f"gcd(p, n) = gcd({spec.p}, {n}) != 1")
    _require_constant_initial(spec)
    if spec.is_trivial():
        raise ValueError("the rule must have at least two nonzero coefficients")
    ours = block_sets(spec, k_max, policy)
    theirs = block_sets(spec.power(n), k_max, policy)
    if not all(s.exact for s in (*ours.values(), *theirs.values())):
        raise ValueError("scan did not stabilize")
    differing = tuple(k for k in range(1, k_max + 1) if ours[k].blocks != theirs[k].blocks)
    return RelprimeReport(n, k_max, differing)


def p_adic_valuation(n: int, p: int) -> int:
    if n < 1:
        raise ValueError("valuation of a nonpositive integer")
    s = 0
    while n % p == 0:
        n //= p
        s += 1
    return s


def power_order(spec_order: RecursionSpec, n: int) -> int:
    """Predicted order for the rule T^n: r * p^s with s = v_p(n)."""
    return spec_order.order * spec_order.p ** p_adic_valuation(n, spec_order.p)
