"""Exact generating-function layer.

For a mod-2 rule whose complexity sequence obeys the even/odd recursion with
constant C from index N on, f(z) = sum_{k >= 2N} a(k) z^k satisfies

    f(z) = P(z) + C z^(2N)/(1 - z) + z^-(n+1) (1 + z^n)(1 + z)^2 f(z^2)

for a Laurent polynomial P.  With lambda = r_n = (1 - z^n)(1 - z)^2 and
phi = f / z^(n+1) this becomes lambda(z) phi(z) = R(z) + lambda(z^2) phi(z^2),
whose coefficients are alpha_k = sum_j c_j sum_{j p^t <= k} gamma(k - j p^t)
with gamma the coefficients of 1/lambda.

Everything is exact (fractions.Fraction).
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property

from .recursion import THEOREM_MAIN, RecursionSpec

__all__ = [
    "RationalPoly",
    "RationalSeries",
    "series_inverse",
    "eta_closed_form",
    "r_poly",
    "bridge_identity",
    "build_P_T",
    "f_from_P",
    "FrameworkInstance",
    "build_framework",
    "alpha_by_coeffrep",
    "phi_series",
    "phi_from_sequence",
    "framework_phi_check",
]


def _frac(x) -> Fraction:
    return x if isinstance(x, Fraction) else Fraction(x)


class RationalPoly:
    """Laurent polynomial sum_i coeffs[i] z^(offset + i) with rational coefficients."""

    __slots__ = ("coeffs", "offset")

    def __init__(self, coeffs=(), offset: int = 0):
        cs = [_frac(c) for c in coeffs]
        lo = 0
        while lo < len(cs) and cs[lo] == 0:
            lo += 1
        hi = len(cs)
        while hi > lo and cs[hi - 1] == 0:
            hi -= 1
        self.coeffs = tuple(cs[lo:hi])
        self.offset = offset + lo if self.coeffs else 0

    @classmethod
    def from_dict(cls, terms: dict) -> "RationalPoly":
        if not terms:
            return cls()
        lo, hi = min(terms), max(terms)
        return cls([terms.get(e, 0) for e in range(lo, hi + 1)], lo)

    @classmethod
    def monomial(cls, e: int, c=1) -> "RationalPoly":
        return cls([c], e)

    def is_zero(self) -> bool:
        return not self.coeffs

    @property
    def degree(self) -> int:
        """Top exponent; -1 for the zero polynomial."""
        return self.offset + len(self.coeffs) - 1 if self.coeffs else -1

    @property
    def valuation(self) -> int:
        """Lowest exponent with a nonzero coefficient."""
        if not self.coeffs:
            raise ValueError("zero polynomial has no valuation")
        return self.offset

    def is_polynomial(self) -> bool:
        return not self.coeffs or self.offset >= 0

    def __getitem__(self, e: int) -> Fraction:
        i = e - self.offset
        return self.coeffs[i] if 0 <= i < len(self.coeffs) else Fraction(0)

    def terms(self):
        for i, c in enumerate(self.coeffs):
            if c:
                yield self.offset + i, c

    def to_list(self) -> list[Fraction]:
        """Ascending coefficients from z^0 (polynomials only)."""
        if not self.is_polynomial():
            raise ValueError("negative exponents present")
        return [self[e] for e in range(self.degree + 1)]

    def __eq__(self, other):
        if not isinstance(other, RationalPoly):
            return NotImplemented
        return self.coeffs == other.coeffs and self.offset == other.offset

    def __hash__(self):
        return hash((self.coeffs, self.offset))

    def __repr__(self):
        return f"RationalPoly({[str(c) for c in self.coeffs]}, offset={self.offset})"

    def __add__(self, other):
        other = _as_poly(other)
        out = dict(self.terms())
        for e, c in other.terms():
            out[e] = out.get(e, 0) + c
        return RationalPoly.from_dict(out)

    __radd__ = __add__

    def __neg__(self):
        return RationalPoly([-c for c in self.coeffs], self.offset)

    def __sub__(self, other):
        return self + (-_as_poly(other))

    def __rsub__(self, other):
        return _as_poly(other) - self

    def __mul__(self, other):
        other = _as_poly(other)
        if self.is_zero() or other.is_zero():
            return RationalPoly()
        out = [Fraction(0)] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            if a:
                for j, b in enumerate(other.coeffs):
                    out[i + j] += a * b
        return RationalPoly(out, self.offset + other.offset)

    __rmul__ = __mul__

    def __pow__(self, e: int):
        out = RationalPoly([1])
        for _ in range(e):
            out = out * self
        return out

    def shift(self, k: int) -> "RationalPoly":
        """Multiply by z^k (k may be negative)."""
        return RationalPoly(self.coeffs, self.offset + k) if self.coeffs else RationalPoly()

    def substitute_power(self, m: int) -> "RationalPoly":
        """P(z^m)."""
        return RationalPoly.from_dict({e * m: c for e, c in self.terms()})

    def __call__(self, x) -> Fraction:
        x = _frac(x)
        if x == 0 and not self.is_polynomial():
            raise ZeroDivisionError("Laurent polynomial evaluated at 0")
        return sum((c * x ** e for e, c in self.terms()), Fraction(0))


def _as_poly(x) -> RationalPoly:
    return x if isinstance(x, RationalPoly) else RationalPoly([x])


@dataclass(frozen=True)
class RationalSeries:
    """Power series truncated after z^D."""

    D: int
    coeffs: tuple[Fraction, ...]

    def __post_init__(self):
        cs = tuple(_frac(c) for c in self.coeffs)[: self.D + 1]
        cs = cs + (Fraction(0),) * (self.D + 1 - len(cs))
        object.__setattr__(self, "coeffs", cs)

    @classmethod
    def from_poly(cls, q: RationalPoly, D: int) -> "RationalSeries":
        if not q.is_polynomial():
            raise ValueError("series need nonnegative exponents")
        return cls(D, tuple(q[e] for e in range(D + 1)))

    def __getitem__(self, k: int) -> Fraction:
        return self.coeffs[k]

    def __add__(self, other: "RationalSeries") -> "RationalSeries":
        D = min(self.D, other.D)
        return RationalSeries(D, tuple(self[i] + other[i] for i in range(D + 1)))

    def __mul__(self, other: "RationalSeries") -> "RationalSeries":
        D = min(self.D, other.D)
        out = [Fraction(0)] * (D + 1)
        for i in range(D + 1):
            a = self[i]
            if a:
                for j in range(D + 1 - i):
                    out[i + j] += a * other[j]
        return RationalSeries(D, tuple(out))


def series_inverse(q: RationalPoly, D: int) -> RationalSeries:
    """1/q up to z^D."""
    if not q.is_polynomial() or q[0] == 0:
        raise ValueError("series inverse needs q(0) != 0")
    q0 = q[0]
    out = [Fraction(0)] * (D + 1)
    out[0] = 1 / q0
    top = q.degree
    for k in range(1, D + 1):
        acc = Fraction(0)
        for i in range(1, min(k, top) + 1):
            c = q[i]
            if c:
                acc += c * out[k - i]
        out[k] = -acc / q0
    return RationalSeries(D, tuple(out))


def eta_closed_form(n: int, k: int) -> Fraction:
    """Coefficient of z^k in 1/((1 - z^n)(1 - z)^2)."""
    if n < 1 or k < 0:
        raise ValueError("need n >= 1 and k >= 0")
    q = k // n
    return (1 + q) * (k + 1 - Fraction(n, 2) * q)


def r_poly(n: int) -> RationalPoly:
    """(1 - z^n)(1 - z)^2."""
    return (1 - RationalPoly.monomial(n)) * RationalPoly([1, -1]) ** 2


def bridge_identity(n: int) -> bool:
    """lambda(z)(1 + z^n)(1 + z)^2 == lambda(z^2) for lambda = r_n."""
    lam = r_poly(n)
    lhs = lam * (1 + RationalPoly.monomial(n)) * RationalPoly([1, 1]) ** 2
    return lhs == lam.substitute_power(2)


def _q_poly(n: int) -> RationalPoly:
    return (1 + RationalPoly.monomial(n)) * RationalPoly([1, 1]) ** 2


def _values(seq):
    if getattr(seq, "exact", True) is False:
        raise ValueError("sequence is not exact")
    return tuple(seq.values if hasattr(seq, "values") else seq)


def _check_rec(rec: RecursionSpec):
    if rec.p != 2 or rec.flavor != THEOREM_MAIN:
        raise ValueError("need a verified mod-2 even/odd recursion")


def _third_term(a, n: int, N: int, q: RationalPoly, e: int) -> Fraction:
    """Coefficient of z^e in z^-(n+1) q(z) f(z^2)."""
    total = Fraction(0)
    for i, c in q.terms():
        m = e + n + 1 - i
        if m >= 0 and m % 2 == 0 and m // 2 >= 2 * N:
            total += c * a[m // 2]
    return total


def build_P_T(seq, rec: RecursionSpec, N: int | None = None) -> tuple[RationalPoly, int]:
    """The Laurent polynomial P as the residual of the functional equation.

    N defaults to the recursion threshold and may be raised.  Every computed
    coefficient above exponent 4N + n must vanish.
    """
    _check_rec(rec)
    a = _values(seq)
    n, C = rec.order, rec.constant
    N = rec.threshold if N is None else N
    if N < rec.threshold:
        raise ValueError("N must be at least the recursion threshold")
    D = len(a) - 1
    if D < 4 * N + 2 * n + 4:
        raise ValueError(f"sequence too short: need a(k) up to {4 * N + 2 * n + 4}")
    q = _q_poly(n)
    lo, hi = 2 * N - n - 1, 4 * N + n
    terms = {}
    for e in range(min(lo, 0), D + 1):
        f_e = a[e] if e >= 2 * N else 0
        r = f_e - (C if e >= 2 * N else 0) - _third_term(a, n, N, q, e)
        if r:
            if not lo <= e <= hi:
                raise ValueError(f"residual does not terminate: nonzero coefficient at z^{e}")
            terms[e] = r
    return RationalPoly.from_dict(terms), N


def f_from_P(P: RationalPoly, C, N: int, n: int, D: int) -> list[Fraction]:
    """Coefficients 0..D of f regenerated from P alone via the functional equation.

    f vanishes below z^(2N); above, each coefficient only refers to lower
    ones, which needs 2N > n + 1.
    """
    if 2 * N <= n + 1:
        raise ValueError("need 2N > n + 1 for the regeneration to be triangular")
    q = _q_poly(n)
    f = [Fraction(0)] * (D + 1)
    for e in range(2 * N, D + 1):
        val = P[e] + C
        for i, c in q.terms():
            m = e + n + 1 - i
            if m % 2 == 0:
                val += c * f[m // 2]
        f[e] = val
    return f


@dataclass(frozen=True)
class FrameworkInstance:
    """lambda(z) phi(z) = R(z) + lambda(z^p) phi(z^p) with 1/lambda = sum gamma(k) z^k.

    ``n`` is set when lambda = r_n, in which case gamma is the closed form
    eta; otherwise gamma comes from series inversion.  N and C_cap record
    the rule-derived construction (None for user frameworks).
    """

    p: int
    lam: RationalPoly
    R: RationalPoly
    C: Fraction
    n: int | None = None
    N: int | None = None
    C_cap: int | None = None
    _gamma_cache: dict = field(default_factory=dict, compare=False, repr=False)

    def __post_init__(self):
        if not self.lam.is_polynomial() or self.lam[0] != 1:
            raise ValueError("lambda must be a polynomial with lambda(0) = 1")
        if not self.R.is_polynomial():
            raise ValueError("R must be a polynomial")
        if self.R[0] != 0:
            raise ValueError("R(0) must vanish")
        if self.R(1) != 0:
            raise ValueError("R(1) must vanish")

    def gamma(self, k: int) -> Fraction:
        if self.n is not None:
            return eta_closed_form(self.n, k)
        cache = self._gamma_cache
        if k not in cache:
            inv = series_inverse(self.lam, max(2 * k, 64))
            cache.update(enumerate(inv.coeffs))
        return cache[k]

    @cached_property
    def c(self) -> dict[int, Fraction]:
        return dict(self.R.terms())

    def to_dict(self) -> dict:
        lam = self.lam.to_list()
        return {
            "p": self.p,
            "n": self.n,
            "lambda": [int(x) if x.denominator == 1 else str(x) for x in lam],
            "R": [str(x) for x in self.R.to_list()],
            "C": str(self.C),
            "N": self.N,
            "C_cap": self.C_cap,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_dict(cls, d: dict) -> "FrameworkInstance":
        return cls(
            p=d["p"],
            lam=RationalPoly([Fraction(x) for x in d["lambda"]]),
            R=RationalPoly([Fraction(x) for x in d["R"]]),
            C=Fraction(d["C"]),
            n=d.get("n"),
            N=d.get("N"),
            C_cap=d.get("C_cap"),
        )


def build_framework(seq, rec: RecursionSpec, N: int | None = None) -> FrameworkInstance:
    """Rule-derived framework: lambda = r_n, C = 1/(2n), gamma = eta.

    N defaults to max(K, ceil((n+2)/2)), the smallest choice for which R has
    no terms below z^1.
    """
    _check_rec(rec)
    n = rec.order
    if N is None:
        N = max(rec.threshold, (n + 3) // 2)
    P, N = build_P_T(seq, rec, N)
    lam = r_poly(n)
    tail = RationalPoly.monomial(2 * N, rec.constant) * (1 - RationalPoly.monomial(n)) * RationalPoly([1, -1])
    R = (lam * P + tail).shift(-(n + 1))
    if not R.is_polynomial():
        raise ValueError("z^(n+1) does not divide the numerator of R")
    if R[0] != 0 or R(1) != 0:
        raise ValueError("R violates R(0) = 0 or R(1) = 0")
    if not bridge_identity(n):
        raise ValueError("lambda(z)(1+z^n)(1+z)^2 != lambda(z^2)")
    return FrameworkInstance(2, lam, R, Fraction(1, 2 * n), n, N, rec.constant)


def alpha_by_coeffrep(fw: FrameworkInstance, k: int) -> Fraction:
    """alpha_k = sum_j c_j sum_{t: j p^t <= k} gamma(k - j p^t), for k >= deg R."""
    if k < fw.R.degree:
        raise ValueError(f"k={k} is below deg R = {fw.R.degree}")
    total = Fraction(0)
    for j, cj in fw.c.items():
        step = j
        while step <= k:
            total += cj * fw.gamma(k - step)
            step *= fw.p
    return total


def _lacunary(fw: FrameworkInstance, D: int) -> list[Fraction]:
    s = [Fraction(0)] * (D + 1)
    for j, cj in fw.c.items():
        step = j
        while step <= D:
            s[step] += cj
            step *= fw.p
    return s


def phi_series(fw: FrameworkInstance, D: int) -> RationalSeries:
    """(1/lambda) sum_t R(z^(p^t)) up to z^D."""
    return series_inverse(fw.lam, D) * RationalSeries(D, tuple(_lacunary(fw, D)))


def phi_from_sequence(seq, fw: FrameworkInstance, D: int) -> RationalSeries:
    """phi = f / z^(n+1) read off a rule's complexity sequence."""
    a = _values(seq)
    n, N = fw.n, fw.N
    if n is None or N is None:
        raise ValueError("framework is not rule-derived")
    if D + n + 1 > len(a) - 1:
        raise ValueError("sequence too short")
    return RationalSeries(D, tuple(a[k + n + 1] if k + n + 1 >= 2 * N else 0 for k in range(D + 1)))


def framework_phi_check(fw: FrameworkInstance, D: int, phi: RationalSeries | None = None) -> bool:
    """lambda * phi == sum_t R(z^(p^t)) up to z^D.

    With phi omitted this checks the iterated solution phi_series itself.
    """
    if D < fw.R.degree:
        raise ValueError("D must be at least deg R")
    phi = phi_series(fw, D) if phi is None else phi
    lhs = RationalSeries.from_poly(fw.lam, D) * phi
    return list(lhs.coeffs) == _lacunary(fw, D)
