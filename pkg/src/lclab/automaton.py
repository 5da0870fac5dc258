"""Rows of the additive automaton A_p(I; T): row r is I * T^r over Z/p."""
from __future__ import annotations

from dataclasses import dataclass

from .gfpoly import GfpPoly, ModulusError, mul, parse_poly, pow as poly_pow

__all__ = ["AutomatonSpec", "Row", "row", "rows", "window", "render"]


@dataclass(frozen=True)
class AutomatonSpec:
    rule: GfpPoly
    initial: GfpPoly = None

    def __post_init__(self):
        if self.initial is None:
            object.__setattr__(self, "initial", GfpPoly.one(self.rule.p))
        if self.rule.p != self.initial.p:
            raise ModulusError("rule and initial state must share the modulus")
        if self.rule.is_zero():
            raise ValueError("rule must be nonzero")
        if self.initial.is_zero():
            raise ValueError("initial state must be nonzero")

    @classmethod
    def parse(cls, rule: str, p: int = 2, initial: str = "1") -> "AutomatonSpec":
        return cls(parse_poly(rule, p), parse_poly(initial, p))

    @property
    def p(self) -> int:
        return self.rule.p

    @property
    def n(self) -> int:
        return self.rule.degree

    def has_constant_initial(self) -> bool:
        return self.initial.degree == 0

    def is_trivial(self) -> bool:
        """At most one nonzero rule coefficient (pure shift/scale)."""
        return sum(1 for c in self.rule.coeffs if c) <= 1

    def power(self, m: int) -> "AutomatonSpec":
        """The automaton with rule T^m and the same initial state."""
        return AutomatonSpec(poly_pow(self.rule, m), self.initial)


@dataclass(frozen=True)
class Row:
    index: int
    coeffs: GfpPoly


def row(spec: AutomatonSpec, r: int) -> Row:
    if r < 0:
        raise ValueError("row index must be nonnegative")
    return Row(r, mul(spec.initial, poly_pow(spec.rule, r)))


def rows(spec: AutomatonSpec, start: int = 0):
    """Yield rows start, start+1, ... by repeated multiplication."""
    current = row(spec, start).coeffs
    r = start
    while True:
        yield Row(r, current)
        current = mul(current, spec.rule)
        r += 1


def window(rw: Row | GfpPoly, start: int, length: int) -> tuple[int, ...]:
    """Length-`length` slice of the row on an infinite zero background."""
    if length < 1:
        raise ValueError("window length must be positive")
    poly = rw.coeffs if isinstance(rw, Row) else rw
    return tuple(poly[i] for i in range(start, start + length))


def render(spec: AutomatonSpec, nrows: int, fmt: str = "text", pad: str = "0") -> bytes:
    """Render rows 0..nrows-1 left-aligned at exponent 0.

    The width is nrows*n + deg(initial) + 1.  ``pad`` fills the text format to
    the full width ("0" or " "; "" disables padding).  For p > 10 text cells
    are decimal residues separated by commas.  PBM output is plain (P1) with
    any nonzero residue drawn as 1.
    """
    if nrows < 1:
        raise ValueError("need at least one row")
    if fmt not in ("text", "pbm"):
        raise ValueError(f"unsupported format {fmt!r}")
    width = nrows * max(spec.n, 0) + spec.initial.degree + 1
    lines = []
    for rw, _ in zip(rows(spec), range(nrows)):
        cs = rw.coeffs.coeffs
        if fmt == "pbm":
            cells = ["1" if (cs[i] if i < len(cs) else 0) else "0" for i in range(width)]
            lines.append(" ".join(cells))
        else:
            cells = [str(c) for c in cs]
            if pad:
                cells += [pad] * (width - len(cells))
            lines.append(("," if spec.p > 10 else "").join(cells))
    if fmt == "pbm":
        return ("P1\n%d %d\n" % (width, nrows) + "\n".join(lines) + "\n").encode("ascii")
    return ("\n".join(lines) + "\n").encode("ascii")

