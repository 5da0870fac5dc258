"""The piecewise quadratic limit of alpha(k)/k^2 and convergence reports.

With x(k) = p^-<log_p k> in [1/p, 1], alpha(k)/k^2 - f(x(k)) -> 0 where

    f(x) = C sum_j c_j ( p^(2 + 2<log_p j> - 2e_j) / (p^2 - 1) x^2
                         + 2 p^(1 + <log_p j> - e_j) / (1 - p) x
                         - floor(log_p j) - e_j )

and e_j(x) = 1 exactly when x > x_j = p^floor(log_p j) / j.  Since
p^<log_p j> = j / p^floor(log_p j), every coefficient is rational.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass
from fractions import Fraction

from .genfun import FrameworkInstance, alpha_by_coeffrep

__all__ = [
    "Piece",
    "PiecewiseQuadratic",
    "ExtremaReport",
    "floor_log",
    "breakpoint",
    "limit_function",
    "evaluate",
    "extrema",
    "garbe_subsequence",
    "x_of_k",
    "ConvergenceRow",
    "ConvergenceReport",
    "convergence_report",
]


@dataclass(frozen=True)
class Piece:
    lo: Fraction
    hi: Fraction
    a: Fraction
    b: Fraction
    c: Fraction

    def __call__(self, x) -> Fraction:
        return (self.a * x + self.b) * x + self.c

    def same_quadratic(self, other: "Piece") -> bool:
        return (self.a, self.b, self.c) == (other.a, other.b, other.c)

    def to_dict(self) -> dict:
        return {k: str(getattr(self, k)) for k in ("lo", "hi", "a", "b", "c")}


@dataclass(frozen=True)
class PiecewiseQuadratic:
    """Pieces [lo, hi) tiling [1/p, 1]; the last piece is closed at 1."""

    p: int
    pieces: tuple[Piece, ...]

    def __post_init__(self):
        ps = self.pieces
        if not ps:
            raise ValueError("no pieces")
        if ps[0].lo != Fraction(1, self.p) or ps[-1].hi != 1:
            raise ValueError("pieces must cover [1/p, 1]")
        for left, right in zip(ps, ps[1:]):
            if left.hi != right.lo:
                raise ValueError("pieces must tile without gaps")
        if any(pc.lo >= pc.hi for pc in ps):
            raise ValueError("empty piece")

    @property
    def breakpoints(self) -> list[Fraction]:
        return [pc.lo for pc in self.pieces[1:]]

    def is_continuous(self) -> bool:
        return all(l(l.hi) == r(r.lo) for l, r in zip(self.pieces, self.pieces[1:]))

    def merged(self) -> "PiecewiseQuadratic":
        out = [self.pieces[0]]
        for pc in self.pieces[1:]:
            if out[-1].same_quadratic(pc):
                last = out.pop()
                pc = Piece(last.lo, pc.hi, pc.a, pc.b, pc.c)
            out.append(pc)
        return PiecewiseQuadratic(self.p, tuple(out))

    def to_dict(self) -> dict:
        return {"p": self.p, "pieces": [pc.to_dict() for pc in self.pieces]}

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_dict(cls, d: dict) -> "PiecewiseQuadratic":
        pieces = tuple(Piece(*(Fraction(pc[k]) for k in ("lo", "hi", "a", "b", "c"))) for pc in d["pieces"])
        return cls(d["p"], pieces)


@dataclass(frozen=True)
class ExtremaReport:
    sup: Fraction
    inf: Fraction
    argmax: Fraction
    argmin: Fraction

    def to_dict(self) -> dict:
        return {k: str(getattr(self, k)) for k in ("sup", "inf", "argmax", "argmin")}


def floor_log(j: int, p: int) -> int:
    """floor(log_p j) for j >= 1, in integer arithmetic."""
    if j < 1:
        raise ValueError("floor_log needs j >= 1")
    e, q = 0, p
    while q <= j:
        q *= p
        e += 1
    return e


def breakpoint(j: int, p: int) -> Fraction:
    """x_j = p^floor(log_p j) / j = p^-<log_p j>."""
    return Fraction(p ** floor_log(j, p), j)


def _term(j: int, cj: Fraction, p: int, eps: int) -> tuple[Fraction, Fraction, Fraction]:
    frac_pow = Fraction(j, p ** floor_log(j, p))  # p^<log_p j>
    quad = Fraction(p) ** (2 - 2 * eps) * frac_pow ** 2 / (p * p - 1)
    lin = 2 * Fraction(p) ** (1 - eps) * frac_pow / (1 - p)
    const = -floor_log(j, p) - eps
    return cj * quad, cj * lin, cj * const


def _quadratic_at(fw: FrameworkInstance, x: Fraction) -> tuple[Fraction, Fraction, Fraction]:
    """Coefficients of f on the piece whose interior or left end contains x."""
    a = b = c = Fraction(0)
    for j, cj in fw.c.items():
        ta, tb, tc = _term(j, cj, fw.p, 1 if x > breakpoint(j, fw.p) else 0)
        a += ta
        b += tb
        c += tc
    return fw.C * a, fw.C * b, fw.C * c


def limit_function(fw: FrameworkInstance) -> PiecewiseQuadratic:
    """Exact f on [1/p, 1], minimal (adjacent equal pieces merged)."""
    p = fw.p
    if sum(fw.c.values()) != 0:
        raise ValueError("coefficients of R must sum to zero")
    lo, hi = Fraction(1, p), Fraction(1)
    cuts = sorted({breakpoint(j, p) for j in fw.c} | {lo, hi})
    cuts = [x for x in cuts if lo <= x <= hi]
    pieces = []
    for left, right in zip(cuts, cuts[1:]):
        # e_j is constant on (left, right]; evaluate the formula at the midpoint
        a, b, c = _quadratic_at(fw, (left + right) / 2)
        pieces.append(Piece(left, right, a, b, c))
    pq = PiecewiseQuadratic(p, tuple(pieces))
    if not pq.is_continuous():
        raise ArithmeticError("limit function is discontinuous")
    return pq.merged()


def evaluate(pq: PiecewiseQuadratic, x) -> Fraction:
    x = Fraction(x)
    if not Fraction(1, pq.p) <= x <= 1:
        raise ValueError(f"x={x} outside [1/{pq.p}, 1]")
    for pc in pq.pieces:
        if pc.lo <= x < pc.hi:
            return pc(x)
    return pq.pieces[-1](x)


def extrema(pq: PiecewiseQuadratic) -> ExtremaReport:
    candidates = []
    for pc in pq.pieces:
        candidates += [pc.lo, pc.hi]
        if pc.a != 0:
            v = -pc.b / (2 * pc.a)
            if pc.lo < v < pc.hi:
                candidates.append(v)
    values = [(evaluate(pq, x), x) for x in candidates]
    top = max(values, key=lambda t: (t[0], -t[1]))
    bottom = min(values, key=lambda t: (t[0], t[1]))
    return ExtremaReport(top[0], bottom[0], top[1], bottom[1])


def garbe_subsequence(p: int, x, k: int) -> int:
    """floor(p^k / x)."""
    x = Fraction(x)
    if not Fraction(1, p) <= x <= 1:
        raise ValueError("x must lie in [1/p, 1]")
    return math.floor(Fraction(p ** k) / x)


def x_of_k(k: int, p: int) -> Fraction:
    """p^-<log_p k> = p^floor(log_p k) / k."""
    return breakpoint(k, p)


@dataclass(frozen=True)
class ConvergenceRow:
    k: int
    logp_y: float
    f_at_x: Fraction
    alpha_ratio: Fraction
    a_ratio: Fraction

    @property
    def error(self) -> Fraction:
        return abs(self.alpha_ratio - self.f_at_x)


@dataclass(frozen=True)
class ConvergenceReport:
    p: int
    rows: tuple[ConvergenceRow, ...]
    octave_max: dict

    def to_csv(self) -> str:
        lines = ["logp_y,f_at_x,alpha_ratio,a_ratio"]
        for r in self.rows:
            lines.append(f"{r.logp_y:.6f},{float(r.f_at_x):.10f},{float(r.alpha_ratio):.10f},{float(r.a_ratio):.10f}")
        return "\n".join(lines) + "\n"

    def octave_csv(self) -> str:
        lines = ["octave,max_error"]
        for o, err in sorted(self.octave_max.items()):
            lines.append(f"{o},{float(err):.10f}")
        return "\n".join(lines) + "\n"


def convergence_report(seq, fw: FrameworkInstance, pq: PiecewiseQuadratic, y_min: int, y_max: int,
                       samples: int | None = None, use_coeffrep: bool = False) -> ConvergenceReport:
    """alpha(k)/k^2 against f(x(k)) for k in [y_min, y_max].

    With ``samples`` the k are logarithmically spaced (deduplicated);
    otherwise every k is used.  alpha(k) = a(k + n + 1), or the coefficient
    formula when use_coeffrep is set.  octave_max maps floor(log_p k) to the
    largest |alpha(k)/k^2 - f(x(k))| seen in that octave.
    """
    if getattr(seq, "exact", True) is False:
        raise ValueError("sequence is not exact")
    a = tuple(seq.values if hasattr(seq, "values") else seq)
    p, n = fw.p, fw.n or 0
    if y_min < 1 or y_max < y_min:
        raise ValueError("need 1 <= y_min <= y_max")
    if y_max + n + 1 > len(a) - 1:
        raise ValueError(f"sequence must reach k = {y_max + n + 1}")
    if samples:
        lo, hi = math.log(y_min, p), math.log(y_max, p)
        ks = sorted({min(y_max, max(y_min, math.floor(p ** (lo + (hi - lo) * i / max(1, samples - 1)))))
                     for i in range(samples)})
    else:
        ks = range(y_min, y_max + 1)
    rows = []
    octave: dict[int, Fraction] = {}
    for k in ks:
        alpha = alpha_by_coeffrep(fw, k) if use_coeffrep else Fraction(a[k + n + 1])
        row = ConvergenceRow(k, math.log(k, p), evaluate(pq, x_of_k(k, p)), alpha / (k * k), Fraction(a[k], k * k))
        rows.append(row)
        o = floor_log(k, p)
        octave[o] = max(octave.get(o, Fraction(0)), row.error)
    return ConvergenceReport(p, tuple(rows), octave)
