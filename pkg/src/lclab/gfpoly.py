"""Polynomials over the prime field Z/p.

Coefficients are stored in ascending degree order.  Over Z/2 the polynomial
is additionally packed into a Python integer (bit i = coefficient of x^i) and
products use carry-less multiplication on that integer.

Text encoding: ``"1101"`` is 1 + x + x^3 (ascending degree, one digit per
coefficient).  For p > 10 the coefficients are comma separated:
``"1,0,12,1"``.
"""
from __future__ import annotations

import builtins
from functools import lru_cache
from itertools import product as _cartesian

__all__ = [
    "GfpPoly",
    "ModulusError",
    "check_prime",
    "add",
    "sub",
    "mul",
    "pow",
    "divmod_",
    "gcd",
    "odd_even_parts",
    "resultant",
    "resultant_sylvester",
    "sylvester_matrix",
    "is_irreducible",
    "reverse",
    "parse_poly",
    "format_poly",
    "clmul",
]

MAX_PRIME = 1 << 16


class ModulusError(ValueError):
    """Raised when polynomials over different fields are combined."""


@lru_cache(maxsize=None)
def check_prime(p: int) -> int:
    """Return p if it is a prime in [2, 2^16], else raise ValueError."""
    if not isinstance(p, int) or isinstance(p, bool):
        raise TypeError("modulus must be an int")
    if p < 2 or p > MAX_PRIME:
        raise ValueError(f"modulus {p} outside [2, {MAX_PRIME}]")
    d = 2
    while d * d <= p:
        if p % d == 0:
            raise ValueError(f"modulus {p} is not prime")
        d += 1
    return p


def clmul(a: int, b: int) -> int:
    """Carry-less product of two bit-packed GF(2) polynomials."""
    if a.bit_length() < b.bit_length():
        a, b = b, a
    c = 0
    while b:
        low = b & -b
        c ^= a << (low.bit_length() - 1)
        b ^= low
    return c


def _bits_to_coeffs(bits: int) -> tuple[int, ...]:
    if not bits:
        return ()
    s = bin(bits)[2:][::-1]
    return tuple(1 if ch == "1" else 0 for ch in s)


def _coeffs_to_bits(coeffs) -> int:
    if not coeffs:
        return 0
    return int("".join("1" if c else "0" for c in reversed(coeffs)), 2)


class GfpPoly:
    """Immutable polynomial over Z/p.

    >>> GfpPoly([1, 1, 1]) * GfpPoly([1, 1, 1])
    GfpPoly('10101', p=2)
    """

    __slots__ = ("p", "coeffs", "bits")

    def __init__(self, coeffs=(), p: int = 2):
        check_prime(p)
        cs = [int(c) % p for c in coeffs]
        while cs and cs[-1] == 0:
            cs.pop()
        object.__setattr__(self, "p", p)
        object.__setattr__(self, "coeffs", tuple(cs))
        object.__setattr__(self, "bits", _coeffs_to_bits(cs) if p == 2 else None)

    @classmethod
    def from_bits(cls, bits: int) -> "GfpPoly":
        """Build a Z/2 polynomial from its bit-packed integer form."""
        if bits < 0:
            raise ValueError("negative bit pattern")
        obj = cls.__new__(cls)
        object.__setattr__(obj, "p", 2)
        object.__setattr__(obj, "coeffs", _bits_to_coeffs(bits))
        object.__setattr__(obj, "bits", bits)
        return obj

    @classmethod
    def monomial(cls, degree: int, p: int = 2, coeff: int = 1) -> "GfpPoly":
        return cls([0] * degree + [coeff], p)

    @classmethod
    def one(cls, p: int = 2) -> "GfpPoly":
        return cls([1], p)

    @classmethod
    def zero(cls, p: int = 2) -> "GfpPoly":
        return cls([], p)

    def __setattr__(self, name, value):
        raise AttributeError("GfpPoly is immutable")

    @property
    def degree(self) -> int:
        """Degree; -1 for the zero polynomial."""
        return len(self.coeffs) - 1

    def is_zero(self) -> bool:
        return not self.coeffs

    def lc(self) -> int:
        return self.coeffs[-1] if self.coeffs else 0

    def __getitem__(self, i: int) -> int:
        if 0 <= i < len(self.coeffs):
            return self.coeffs[i]
        return 0

    def __len__(self) -> int:
        return len(self.coeffs)

    def __iter__(self):
        return iter(self.coeffs)

    def __eq__(self, other):
        if not isinstance(other, GfpPoly):
            return NotImplemented
        return self.p == other.p and self.coeffs == other.coeffs

    def __hash__(self):
        return hash((self.p, self.coeffs))

    def __repr__(self):
        return f"GfpPoly({format_poly(self)!r}, p={self.p})"

    def __str__(self):
        return format_poly(self)

    def __add__(self, other):
        return add(self, other)

    def __sub__(self, other):
        return sub(self, other)

    def __mul__(self, other):
        return mul(self, other)

    def __pow__(self, r):
        return pow(self, r)

    def __call__(self, x: int) -> int:
        acc = 0
        for c in reversed(self.coeffs):
            acc = (acc * x + c) % self.p
        return acc

    def monic(self) -> "GfpPoly":
        if not self.coeffs:
            return self
        inv = _inverse(self.lc(), self.p)
        return GfpPoly([c * inv for c in self.coeffs], self.p)

    def scale(self, c: int) -> "GfpPoly":
        return GfpPoly([c * a for a in self.coeffs], self.p)

    def shift(self, k: int) -> "GfpPoly":
        """Multiply by x^k (k >= 0)."""
        if self.p == 2:
            return GfpPoly.from_bits(self.bits << k)
        if not self.coeffs:
            return self
        return GfpPoly([0] * k + list(self.coeffs), self.p)

    def inflate(self, k: int) -> "GfpPoly":
        """Substitute x -> x^k, i.e. spread coefficients k apart."""
        if k < 1:
            raise ValueError("inflation factor must be positive")
        if not self.coeffs:
            return self
        out = [0] * ((len(self.coeffs) - 1) * k + 1)
        out[::k] = self.coeffs
        return GfpPoly(out, self.p)


def _inverse(a: int, p: int) -> int:
    a %= p
    if a == 0:
        raise ZeroDivisionError("zero has no inverse")
    return builtins.pow(a, p - 2, p)


def _same_field(a: GfpPoly, b: GfpPoly) -> int:
    if a.p != b.p:
        raise ModulusError(f"modulus mismatch: {a.p} vs {b.p}")
    return a.p


def add(a: GfpPoly, b: GfpPoly) -> GfpPoly:
    p = _same_field(a, b)
    if p == 2:
        return GfpPoly.from_bits(a.bits ^ b.bits)
    n = max(len(a), len(b))
    return GfpPoly([a[i] + b[i] for i in range(n)], p)


def sub(a: GfpPoly, b: GfpPoly) -> GfpPoly:
    p = _same_field(a, b)
    if p == 2:
        return GfpPoly.from_bits(a.bits ^ b.bits)
    n = max(len(a), len(b))
    return GfpPoly([a[i] - b[i] for i in range(n)], p)


def mul(a: GfpPoly, b: GfpPoly) -> GfpPoly:
    p = _same_field(a, b)
    if p == 2:
        return GfpPoly.from_bits(clmul(a.bits, b.bits))
    if not a.coeffs or not b.coeffs:
        return GfpPoly((), p)
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a.coeffs):
        if x:
            for j, y in enumerate(b.coeffs):
                out[i + j] += x * y
    return GfpPoly(out, p)


def pow(a: GfpPoly, r: int) -> GfpPoly:
    """a**r using a(x)^(p^j) = a(x^(p^j)) on the base-p digits of r."""
    if r < 0:
        raise ValueError("negative exponent")
    p = a.p
    result = GfpPoly.one(p)
    j = 0
    while r:
        r, digit = divmod(r, p)
        if digit:
            frob = a.inflate(p ** j) if a.coeffs else a
            for _ in range(digit):
                result = mul(result, frob)
        j += 1
    return result


def divmod_(a: GfpPoly, b: GfpPoly) -> tuple[GfpPoly, GfpPoly]:
    p = _same_field(a, b)
    if b.is_zero():
        raise ZeroDivisionError("division by zero polynomial")
    if p == 2:
        q, r = 0, a.bits
        db = b.degree
        while r and r.bit_length() - 1 >= db:
            s = r.bit_length() - 1 - db
            q ^= 1 << s
            r ^= b.bits << s
        return GfpPoly.from_bits(q), GfpPoly.from_bits(r)
    rem = list(a.coeffs)
    db = b.degree
    inv = _inverse(b.lc(), p)
    quot = [0] * max(len(rem) - db, 0)
    for s in range(len(rem) - 1 - db, -1, -1):
        c = rem[s + db] * inv % p
        if c:
            quot[s] = c
            for i, bc in enumerate(b.coeffs):
                rem[s + i] = (rem[s + i] - c * bc) % p
    return GfpPoly(quot, p), GfpPoly(rem, p)


def gcd(a: GfpPoly, b: GfpPoly) -> GfpPoly:
    """Monic greatest common divisor."""
    _same_field(a, b)
    if a.is_zero() and b.is_zero():
        raise ValueError("gcd(0, 0) is undefined")
    while not b.is_zero():
        a, b = b, divmod_(a, b)[1]
    return a.monic()


def odd_even_parts(t: GfpPoly) -> tuple[GfpPoly, GfpPoly]:
    """Split t into (o, e) with t(x) = o(x^2)/x + e(x^2).

    o collects the odd-index coefficients c1, c3, ... starting at x^1 and e the
    even-index ones c0, c2, ... starting at x^0.
    """
    if t.p != 2:
        raise ValueError("odd/even parts are defined for p = 2")
    if t.is_zero():
        raise ValueError("odd/even parts of the zero polynomial")
    cs = t.coeffs
    o = GfpPoly((0,) + cs[1::2], 2)
    e = GfpPoly(cs[0::2], 2)
    return o, e


def sylvester_matrix(a: GfpPoly, b: GfpPoly) -> list[list[int]]:
    """Sylvester matrix, coefficients written from the leading term down."""
    m, n = a.degree, b.degree
    size = m + n
    rows = []
    ra = list(reversed(a.coeffs))
    rb = list(reversed(b.coeffs))
    for i in range(n):
        rows.append([0] * i + ra + [0] * (size - m - 1 - i))
    for i in range(m):
        rows.append([0] * i + rb + [0] * (size - n - 1 - i))
    return rows


def _det_mod(mat: list[list[int]], p: int) -> int:
    mat = [list(row) for row in mat]
    size = len(mat)
    det = 1
    for col in range(size):
        piv = next((r for r in range(col, size) if mat[r][col] % p), None)
        if piv is None:
            return 0
        if piv != col:
            mat[col], mat[piv] = mat[piv], mat[col]
            det = -det
        pv = mat[col][col] % p
        det = det * pv % p
        inv = _inverse(pv, p)
        for r in range(col + 1, size):
            f = mat[r][col] * inv % p
            if f:
                mat[r] = [(x - f * y) % p for x, y in zip(mat[r], mat[col])]
    return det % p


def _check_res_args(a: GfpPoly, b: GfpPoly) -> int:
    p = _same_field(a, b)
    if a.is_zero() or b.is_zero():
        raise ValueError("resultant with the zero polynomial")
    return p


def resultant_sylvester(a: GfpPoly, b: GfpPoly) -> int:
    """Resultant as the determinant of the Sylvester matrix (mod p)."""
    p = _check_res_args(a, b)
    return _det_mod(sylvester_matrix(a, b), p)


def resultant(a: GfpPoly, b: GfpPoly) -> int:
    """Resultant over Z/p via the Euclidean remainder scheme.

    Uses res(A, B) = lc(A)^(deg B - deg R) res(A, R) for B = QA + R and the
    swap rule res(A, B) = (-1)^(deg A deg B) res(B, A).  A nonzero constant c
    gives res(c, B) = c^deg B, so res(a, 1) = 1.
    """
    p = _check_res_args(a, b)
    acc = 1
    while True:
        m, n = a.degree, b.degree
        if m == 0:
            return acc * builtins.pow(a.lc(), n, p) % p
        if n == 0:
            return acc * builtins.pow(b.lc(), m, p) % p
        if m > n:
            if (m * n) % 2:
                acc = -acc % p
            a, b = b, a
            continue
        r = divmod_(b, a)[1]
        if r.is_zero():
            return 0
        acc = acc * builtins.pow(a.lc(), n - r.degree, p) % p
        b = r


def _monic_polys(degree: int, p: int):
    for tail in _cartesian(range(p), repeat=degree):
        yield GfpPoly(tail + (1,), p)


def is_irreducible(t: GfpPoly) -> bool:
    """Trial division by every monic polynomial of degree <= deg t / 2."""
    if t.degree < 1:
        raise ValueError("irreducibility needs degree >= 1")
    for d in range(1, t.degree // 2 + 1):
        for f in _monic_polys(d, t.p):
            if divmod_(t, f)[1].is_zero():
                return False
    return True


def reverse(t: GfpPoly) -> GfpPoly:
    """Reverse the coefficient string: block 1011 becomes 1101."""
    if t.is_zero():
        raise ValueError("reverse of the zero polynomial")
    return GfpPoly(tuple(reversed(t.coeffs)), t.p)


def parse_poly(text: str, p: int = 2) -> GfpPoly:
    """Parse the ascending-degree text encoding."""
    check_prime(p)
    text = text.strip()
    if not text:
        raise ValueError("empty polynomial string")
    if "," in text or p > 10:
        parts = [s.strip() for s in text.split(",")]
        if p > 10 and "," not in text and len(text) > 1:
            raise ValueError("comma-separated coefficients are required for p > 10")
    else:
        parts = list(text)
    coeffs = []
    for s in parts:
        if not s.isdigit():
            raise ValueError(f"bad coefficient {s!r} in {text!r}")
        c = int(s)
        if c >= p:
            raise ValueError(f"coefficient {c} is not a residue mod {p}")
        coeffs.append(c)
    return GfpPoly(coeffs, p)


def format_poly(t: GfpPoly) -> str:
    """Inverse of parse_poly; the zero polynomial is written "0"."""
    if not t.coeffs:
        return "0"
    if t.p > 10:
        return ",".join(str(c) for c in t.coeffs)
    return "".join(str(c) for c in t.coeffs)
