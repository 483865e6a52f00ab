"""Exact arithmetic in F_p, F_p(x) and the function field of y^2 = x^3 + a x + b.

Polynomials over F_p are dense coefficient lists, highest degree first, as
used by :mod:`sympy.polys.galoistools`.  Everything here is immutable.

Valuations at rational points are computed from truncated Laurent
expansions in a fixed uniformizer:

* ``x - x0`` at an affine point with ``y0 != 0``,
* ``y`` at an affine point of order two,
* ``x/y`` at the point at infinity.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Optional, Sequence

from sympy import isprime
from sympy.polys import galoistools as gt
from sympy.polys.domains import ZZ

from .errors import AtlasError, DivisionByZero, PrecisionExhausted

__all__ = [
    "CurveSpec",
    "CurvePoint",
    "INFINITY",
    "RationalFunction",
    "FunctionFieldElement",
    "Series",
    "LocalExpansion",
    "ff_arithmetic",
    "local_expand",
    "valuation",
    "poly_to_str",
    "poly_from_str",
]


# ---------------------------------------------------------------------------
# polynomials over F_p (thin layer over galoistools)

def _strip(f, p):
    return gt.gf_strip([int(c) % p for c in f])


def poly_deg(f) -> int:
    return len(f) - 1 if f else -1


def poly_eval(f, x0, p) -> int:
    return int(gt.gf_eval(list(f), x0 % p, p, ZZ))


def poly_roots(f, p) -> dict[int, int]:
    """Rational roots with multiplicity. Brute force over F_p."""
    roots = {}
    g = list(f)
    for r in range(p):
        lin = [1, (-r) % p]
        while poly_deg(g) >= 1:
            q, rem = gt.gf_div(g, lin, p, ZZ)
            if rem:
                break
            roots[r] = roots.get(r, 0) + 1
            g = q
    return roots


def poly_to_str(f, p=None) -> str:
    """Sparse notation ``c0+c1*x+c2*x^2``, lowest degree first."""
    if not f:
        return "0"
    terms = []
    d = poly_deg(f)
    for i, c in enumerate(f):
        k = d - i
        if c == 0:
            continue
        if k == 0:
            terms.append(f"{c}")
        elif k == 1:
            terms.append(f"{c}*x")
        else:
            terms.append(f"{c}*x^{k}")
    return "+".join(reversed(terms))


_TERM = re.compile(r"^([+-]?)(\d*)(\*?x(?:(?:\^|\*\*)(\d+))?)?$")


def poly_from_str(text: str, p: int):
    s = text.replace(" ", "")
    if not s:
        raise ValueError("empty polynomial")
    # split on + and - that are not part of an exponent marker
    pieces = re.findall(r"[+-]?[^+-]+", s)
    if "".join(pieces) != s:
        raise ValueError(f"cannot parse polynomial {text!r}")
    coeffs: dict[int, int] = {}
    for piece in pieces:
        m = _TERM.match(piece)
        if not m:
            raise ValueError(f"cannot parse term {piece!r} in {text!r}")
        sign, digits, xpart, exp = m.groups()
        if not digits and not xpart:
            raise ValueError(f"cannot parse term {piece!r}")
        if xpart and xpart.startswith("*") and not digits:
            raise ValueError(f"cannot parse term {piece!r}")
        c = int(digits) if digits else 1
        if sign == "-":
            c = -c
        k = 0 if not xpart else (int(exp) if exp else 1)
        coeffs[k] = coeffs.get(k, 0) + c
    if not coeffs:
        return []
    d = max(coeffs)
    return _strip([coeffs.get(k, 0) for k in range(d, -1, -1)], p)


# ---------------------------------------------------------------------------
# F_p(x)

class RationalFunction:
    """An element of F_p(x), stored as a reduced fraction with monic denominator."""

    __slots__ = ("p", "num", "den")

    def __init__(self, num, den=None, p: int = 0):
        if p <= 1:
            raise ValueError("a prime modulus is required")
        num = _strip(num, p)
        den = [1] if den is None else _strip(den, p)
        if not den:
            raise DivisionByZero("zero denominator")
        if not num:
            den = [1]
        else:
            g = gt.gf_gcd(num, den, p, ZZ)
            if poly_deg(g) > 0:
                num = gt.gf_quo(num, g, p, ZZ)
                den = gt.gf_quo(den, g, p, ZZ)
            lc = den[0]
            if lc != 1:
                inv = pow(lc, -1, p)
                num = gt.gf_mul_ground(num, inv, p, ZZ)
                den = gt.gf_mul_ground(den, inv, p, ZZ)
        self.p = p
        self.num = tuple(int(c) for c in num)
        self.den = tuple(int(c) for c in den)

    @classmethod
    def const(cls, c: int, p: int) -> "RationalFunction":
        return cls([c % p], None, p)

    @classmethod
    def x(cls, p: int) -> "RationalFunction":
        return cls([1, 0], None, p)

    def _coerce(self, other):
        if isinstance(other, RationalFunction):
            if other.p != self.p:
                raise AtlasError("moduli differ")
            return other
        if isinstance(other, int):
            return RationalFunction.const(other, self.p)
        return NotImplemented

    def __add__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        p = self.p
        num = gt.gf_add(gt.gf_mul(list(self.num), list(o.den), p, ZZ),
                        gt.gf_mul(list(o.num), list(self.den), p, ZZ), p, ZZ)
        return RationalFunction(num, gt.gf_mul(list(self.den), list(o.den), p, ZZ), p)

    __radd__ = __add__

    def __neg__(self):
        return RationalFunction(gt.gf_neg(list(self.num), self.p, ZZ), list(self.den), self.p)

    def __sub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return self + (-o)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        p = self.p
        return RationalFunction(gt.gf_mul(list(self.num), list(o.num), p, ZZ),
                                gt.gf_mul(list(self.den), list(o.den), p, ZZ), p)

    __rmul__ = __mul__

    def inverse(self) -> "RationalFunction":
        if not self.num:
            raise DivisionByZero("inverse of zero rational function")
        return RationalFunction(list(self.den), list(self.num), self.p)

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return self * o.inverse()

    def __rtruediv__(self, other):
        return self.inverse() * other

    def __pow__(self, k: int):
        if k < 0:
            return self.inverse() ** (-k)
        p = self.p
        return RationalFunction(gt.gf_pow(list(self.num), k, p, ZZ),
                                gt.gf_pow(list(self.den), k, p, ZZ), p)

    def __eq__(self, other):
        if isinstance(other, int):
            other = RationalFunction.const(other, self.p)
        if not isinstance(other, RationalFunction):
            return NotImplemented
        return self.p == other.p and self.num == other.num and self.den == other.den

    def __hash__(self):
        return hash((self.p, self.num, self.den))

    def is_zero(self) -> bool:
        return not self.num

    def is_constant(self) -> bool:
        return poly_deg(self.num) <= 0 and self.den == (1,)

    def constant_value(self) -> int:
        if not self.is_constant():
            raise AtlasError("not a constant")
        return self.num[0] if self.num else 0

    def evaluate(self, x0: int) -> int:
        d = poly_eval(list(self.den), x0, self.p)
        if d == 0:
            raise DivisionByZero(f"pole at x = {x0}")
        return poly_eval(list(self.num), x0, self.p) * pow(d, -1, self.p) % self.p

    def order_at(self, x0: int) -> int:
        """Order of vanishing as a function of x at x = x0."""
        if not self.num:
            raise AtlasError("order of the zero function")

        def mult(f):
            k, g, lin = 0, list(f), [1, (-x0) % self.p]
            while True:
                q, r = gt.gf_div(g, lin, self.p, ZZ)
                if r:
                    return k
                k, g = k + 1, q
        return mult(self.num) - mult(self.den)

    def x_degree(self) -> int:
        """deg(num) - deg(den); minus the order at x = infinity."""
        return poly_deg(self.num) - poly_deg(self.den)

    def to_str(self) -> str:
        n = poly_to_str(list(self.num))
        if self.den == (1,):
            return n
        return f"({n})/({poly_to_str(list(self.den))})"

    @classmethod
    def from_str(cls, text: str, p: int) -> "RationalFunction":
        s = text.replace(" ", "")
        depth, cut = 0, None
        for i, ch in enumerate(s):
            if ch == "(":
                depth += 1
            elif ch == ")":
                depth -= 1
            elif ch == "/" and depth == 0:
                cut = i
                break
        def unwrap(t):
            return t[1:-1] if t.startswith("(") and t.endswith(")") else t
        if cut is None:
            return cls(poly_from_str(unwrap(s), p), None, p)
        return cls(poly_from_str(unwrap(s[:cut]), p), poly_from_str(unwrap(s[cut + 1:]), p), p)

    def __repr__(self):
        return f"RationalFunction({self.to_str()} mod {self.p})"


# ---------------------------------------------------------------------------
# the curve

@dataclass(frozen=True, order=False)
class CurvePoint:
    """A rational point; ``x is None`` encodes the point at infinity."""

    x: Optional[int] = None
    y: Optional[int] = None

    @property
    def is_infinity(self) -> bool:
        return self.x is None

    def sort_key(self):
        return (-1, -1) if self.x is None else (self.x, self.y)

    def __lt__(self, other):
        return self.sort_key() < other.sort_key()

    def __str__(self):
        return "O" if self.x is None else f"({self.x},{self.y})"

    def __repr__(self):
        return "INFINITY" if self.x is None else f"CurvePoint({self.x}, {self.y})"


INFINITY = CurvePoint()


@dataclass(frozen=True)
class CurveSpec:
    p: int
    a: int
    b: int

    def __post_init__(self):
        if not isinstance(self.p, int) or self.p <= 3 or not isprime(self.p):
            raise ValueError(f"modulus must be a prime > 3, got {self.p}")
        object.__setattr__(self, "a", self.a % self.p)
        object.__setattr__(self, "b", self.b % self.p)
        if (4 * self.a ** 3 + 27 * self.b ** 2) % self.p == 0:
            raise ValueError("singular curve: discriminant vanishes")

    # y^2 = cubic(x)
    @property
    def cubic(self):
        return [1, 0, self.a, self.b]

    def rhs(self, x0: int) -> int:
        return (x0 * x0 * x0 + self.a * x0 + self.b) % self.p

    def contains(self, P: CurvePoint) -> bool:
        if P.is_infinity:
            return True
        return (P.y * P.y - self.rhs(P.x)) % self.p == 0

    def point(self, x0: int, y0: int) -> CurvePoint:
        P = CurvePoint(x0 % self.p, y0 % self.p)
        if not self.contains(P):
            raise ValueError(f"{P} is not on the curve")
        return P

    def points(self) -> tuple[CurvePoint, ...]:
        return _enumerate_points(self)

    def order(self) -> int:
        return len(self.points())

    def lift_x(self, x0: int) -> list[CurvePoint]:
        r = self.rhs(x0)
        return [CurvePoint(x0 % self.p, y) for y in _square_roots(self.p).get(r, ())]

    def neg(self, P: CurvePoint) -> CurvePoint:
        if P.is_infinity:
            return P
        return CurvePoint(P.x, (-P.y) % self.p)

    def add(self, P: CurvePoint, Q: CurvePoint) -> CurvePoint:
        p = self.p
        if P.is_infinity:
            return Q
        if Q.is_infinity:
            return P
        if P.x == Q.x:
            if (P.y + Q.y) % p == 0:
                return INFINITY
            s = (3 * P.x * P.x + self.a) * pow(2 * P.y, -1, p) % p
        else:
            s = (Q.y - P.y) * pow(Q.x - P.x, -1, p) % p
        x3 = (s * s - P.x - Q.x) % p
        return CurvePoint(x3, (s * (P.x - x3) - P.y) % p)

    def sub(self, P, Q):
        return self.add(P, self.neg(Q))

    def mul(self, n: int, P: CurvePoint) -> CurvePoint:
        if n < 0:
            return self.mul(-n, self.neg(P))
        acc, base = INFINITY, P
        while n:
            if n & 1:
                acc = self.add(acc, base)
            base = self.add(base, base)
            n >>= 1
        return acc

    def point_order(self, P: CurvePoint) -> int:
        Q, k = P, 1
        while not Q.is_infinity:
            Q, k = self.add(Q, P), k + 1
        return k

    def two_torsion(self) -> list[CurvePoint]:
        return [P for P in self.points() if P.is_infinity or P.y == 0]

    # function field shortcuts
    def x(self) -> "FunctionFieldElement":
        return FunctionFieldElement(self, RationalFunction.x(self.p), RationalFunction.const(0, self.p))

    def y(self) -> "FunctionFieldElement":
        return FunctionFieldElement(self, RationalFunction.const(0, self.p), RationalFunction.const(1, self.p))

    def const(self, c: int) -> "FunctionFieldElement":
        return FunctionFieldElement(self, RationalFunction.const(c, self.p), RationalFunction.const(0, self.p))

    def element(self, u, v=None) -> "FunctionFieldElement":
        def rf(obj):
            if obj is None:
                return RationalFunction.const(0, self.p)
            if isinstance(obj, RationalFunction):
                return obj
            if isinstance(obj, int):
                return RationalFunction.const(obj, self.p)
            if isinstance(obj, str):
                return RationalFunction.from_str(obj, self.p)
            return RationalFunction(list(obj), None, self.p)
        return FunctionFieldElement(self, rf(u), rf(v))

    def to_json(self) -> dict:
        return {"p": self.p, "a": self.a, "b": self.b}

    @classmethod
    def from_json(cls, data: dict) -> "CurveSpec":
        return cls(int(data["p"]), int(data["a"]), int(data["b"]))


@lru_cache(maxsize=None)
def _square_roots(p: int) -> dict[int, tuple[int, ...]]:
    table: dict[int, list[int]] = {}
    for y in range(p):
        table.setdefault(y * y % p, []).append(y)
    return {k: tuple(v) for k, v in table.items()}


@lru_cache(maxsize=None)
def _enumerate_points(curve: CurveSpec) -> tuple[CurvePoint, ...]:
    pts = [INFINITY]
    roots = _square_roots(curve.p)
    for x0 in range(curve.p):
        for y0 in roots.get(curve.rhs(x0), ()):
            pts.append(CurvePoint(x0, y0))
    return tuple(pts)


# ---------------------------------------------------------------------------
# function field k(C) = F_p(x)[y]/(y^2 - cubic)

class FunctionFieldElement:
    """``u + v*y`` with u, v in F_p(x)."""

    __slots__ = ("curve", "u", "v")

    def __init__(self, curve: CurveSpec, u: RationalFunction, v: RationalFunction):
        self.curve = curve
        self.u = u
        self.v = v

    @property
    def _f(self) -> RationalFunction:
        return RationalFunction(self.curve.cubic, None, self.curve.p)

    def _coerce(self, other):
        if isinstance(other, FunctionFieldElement):
            if other.curve != self.curve:
                raise AtlasError("elements live on different curves")
            return other
        if isinstance(other, int):
            return self.curve.const(other)
        if isinstance(other, RationalFunction):
            return FunctionFieldElement(self.curve, other, RationalFunction.const(0, self.curve.p))
        return NotImplemented

    def __add__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return FunctionFieldElement(self.curve, self.u + o.u, self.v + o.v)

    __radd__ = __add__

    def __neg__(self):
        return FunctionFieldElement(self.curve, -self.u, -self.v)

    def __sub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return self + (-o)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        u = self.u * o.u + self.v * o.v * self._f
        v = self.u * o.v + self.v * o.u
        return FunctionFieldElement(self.curve, u, v)

    __rmul__ = __mul__

    def conjugate(self) -> "FunctionFieldElement":
        return FunctionFieldElement(self.curve, self.u, -self.v)

    def norm(self) -> RationalFunction:
        return self.u * self.u - self.v * self.v * self._f

    def inverse(self) -> "FunctionFieldElement":
        if self.is_zero():
            raise DivisionByZero("inverse of zero")
        n = self.norm().inverse()
        return FunctionFieldElement(self.curve, self.u * n, -(self.v * n))

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return self * o.inverse()

    def __rtruediv__(self, other):
        return self.inverse() * other

    def __pow__(self, k: int):
        if k < 0:
            return self.inverse() ** (-k)
        acc, base = self.curve.const(1), self
        while k:
            if k & 1:
                acc = acc * base
            base = base * base
            k >>= 1
        return acc

    def __eq__(self, other):
        if isinstance(other, int):
            other = self.curve.const(other)
        if not isinstance(other, FunctionFieldElement):
            return NotImplemented
        return self.curve == other.curve and self.u == other.u and self.v == other.v

    def __hash__(self):
        return hash((self.curve, self.u, self.v))

    def is_zero(self) -> bool:
        return self.u.is_zero() and self.v.is_zero()

    def is_constant(self) -> bool:
        return self.v.is_zero() and self.u.is_constant()

    def evaluate(self, P: CurvePoint) -> int:
        """Value at an affine point where u and v are regular."""
        if P.is_infinity:
            raise AtlasError("use local_expand at infinity")
        return (self.u.evaluate(P.x) + self.v.evaluate(P.x) * P.y) % self.curve.p

    def to_json(self) -> dict:
        return {"u": self.u.to_str(), "v": self.v.to_str()}

    @classmethod
    def from_json(cls, curve: CurveSpec, data) -> "FunctionFieldElement":
        if isinstance(data, (int, str)):
            return curve.element(data)
        return curve.element(data.get("u", 0), data.get("v", 0))

    def __repr__(self):
        return f"<{self.u.to_str()} + ({self.v.to_str()})*y>"


def ff_arithmetic(lhs: FunctionFieldElement, rhs: FunctionFieldElement, op: str) -> FunctionFieldElement:
    if op == "add":
        return lhs + rhs
    if op == "sub":
        return lhs - rhs
    if op == "mul":
        return lhs * rhs
    if op == "div":
        if rhs.is_zero():
            raise DivisionByZero("division by the zero element")
        return lhs / rhs
    raise ValueError(f"unknown operation {op!r}")


# ---------------------------------------------------------------------------
# truncated Laurent series over F_p

class Series:
    """sum c_i t^(start + i) + O(t^prec); ``prec is None`` means exact."""

    __slots__ = ("p", "start", "coeffs", "prec")

    def __init__(self, p: int, start: int, coeffs: Sequence[int], prec: Optional[int]):
        cs = [int(c) % p for c in coeffs]
        if prec is not None:
            cs = cs[: max(0, prec - start)]
        i = 0
        while i < len(cs) and cs[i] == 0:
            i += 1
        j = len(cs)
        while j > i and cs[j - 1] == 0 and prec is None:
            j -= 1
        cs = cs[i:j]
        start += i
        if not cs and prec is not None:
            start = prec
        self.p = p
        self.start = start
        self.coeffs = tuple(cs)
        self.prec = prec

    @classmethod
    def monomial(cls, p, c, k):
        return cls(p, k, [c], None)

    def known_nonzero(self) -> bool:
        return bool(self.coeffs)

    @property
    def val(self) -> int:
        """Leading exponent (only meaningful when known_nonzero)."""
        if not self.coeffs:
            raise PrecisionExhausted("no nonzero coefficient known")
        return self.start

    def coeff(self, k: int) -> int:
        i = k - self.start
        if self.prec is not None and k >= self.prec:
            raise PrecisionExhausted(f"coefficient t^{k} beyond precision {self.prec}")
        if 0 <= i < len(self.coeffs):
            return self.coeffs[i]
        return 0

    def _lower(self):
        # lowest exponent that may carry a nonzero coefficient
        return self.start

    def __add__(self, other: "Series") -> "Series":
        if isinstance(other, int):
            other = Series(self.p, 0, [other], None)
        prec = _minp(self.prec, other.prec)
        lo = min(self.start, other.start)
        hi = max(self.start + len(self.coeffs), other.start + len(other.coeffs))
        if prec is not None:
            hi = min(hi, prec)
            lo = min(lo, prec)
        cs = [0] * max(0, hi - lo)
        for s in (self, other):
            for i, c in enumerate(s.coeffs):
                k = s.start + i - lo
                if 0 <= k < len(cs):
                    cs[k] += c
        return Series(self.p, lo, cs, prec)

    __radd__ = __add__

    def __neg__(self):
        return Series(self.p, self.start, [-c for c in self.coeffs], self.prec)

    def __sub__(self, other):
        if isinstance(other, int):
            other = Series(self.p, 0, [other], None)
        return self + (-other)

    def scale(self, c: int) -> "Series":
        c %= self.p
        if c == 0:
            return Series(self.p, 0, [], None)
        return Series(self.p, self.start, [c * x for x in self.coeffs], self.prec)

    def __mul__(self, other: "Series") -> "Series":
        if isinstance(other, int):
            return self.scale(other)
        p = self.p
        # absolute precision of the product
        cands = []
        if self.prec is not None:
            cands.append(self.prec + other.start)
        if other.prec is not None:
            cands.append(other.prec + self.start)
        prec = min(cands) if cands else None
        a, b = self.coeffs, other.coeffs
        start = self.start + other.start
        n = len(a) + len(b) - 1 if a and b else 0
        if prec is not None:
            n = min(n, max(0, prec - start))
        cs = [0] * n
        for i, x in enumerate(a):
            if x == 0:
                continue
            lim = min(len(b), n - i)
            for j in range(lim):
                cs[i + j] += x * b[j]
        return Series(p, start, [c % p for c in cs], prec)

    __rmul__ = __mul__

    def inverse(self, rel: Optional[int] = None) -> "Series":
        """Multiplicative inverse; exact inputs need a relative precision ``rel``."""
        if not self.coeffs:
            raise PrecisionExhausted("cannot invert a series with no known nonzero term")
        p = self.p
        if self.prec is None:
            if len(self.coeffs) == 1:
                return Series(p, -self.start, [pow(self.coeffs[0], -1, p)], None)
            if rel is None:
                raise ValueError("relative precision required to invert an exact series")
            r = rel
        else:
            r = self.prec - self.start
        a = list(self.coeffs) + [0] * max(0, r - len(self.coeffs))
        inv0 = pow(a[0], -1, p)
        out = [inv0]
        for k in range(1, r):
            s = 0
            for i in range(1, min(k, len(a) - 1) + 1):
                s += a[i] * out[k - i]
            out.append(-s * inv0 % p)
        return Series(p, -self.start, out, -self.start + r)

    def truncate(self, prec: int) -> "Series":
        return Series(self.p, self.start, self.coeffs, _minp(self.prec, prec))

    def __repr__(self):
        terms = " + ".join(f"{c}*t^{self.start + i}" for i, c in enumerate(self.coeffs) if c)
        tail = "" if self.prec is None else f" + O(t^{self.prec})"
        return f"Series({terms or '0'}{tail})"


def _minp(a, b):
    if a is None:
        return b
    if b is None:
        return a
    return min(a, b)


def _poly_at_series(f, s: Series) -> Series:
    acc = Series(s.p, 0, [], None)
    for c in f:
        acc = acc * s + Series(s.p, 0, [c], None)
    return acc


def _rf_at_series(r: RationalFunction, s: Series, rel: int) -> Series:
    num = _poly_at_series(r.num, s)
    if r.den == (1,):
        return num
    den = _poly_at_series(r.den, s)
    if den.prec is None and not den.coeffs:
        raise DivisionByZero("denominator vanishes identically")
    return num * den.inverse(rel)


# ---------------------------------------------------------------------------
# local expansions

@dataclass(frozen=True)
class LocalExpansion:
    point: CurvePoint
    uniformizer: str
    valuation: int
    coefficients: tuple[int, ...]

    @property
    def precision(self) -> int:
        return len(self.coefficients)

    @property
    def leading_coefficient(self) -> int:
        return self.coefficients[0]

    def truncated(self, m: int) -> "LocalExpansion":
        return LocalExpansion(self.point, self.uniformizer, self.valuation, self.coefficients[:m])


def uniformizer_tag(curve: CurveSpec, P: CurvePoint) -> str:
    if P.is_infinity:
        return "x/y"
    if P.y == 0:
        return "y"
    return "x-x0"


@lru_cache(maxsize=4096)
def _coordinate_series(curve: CurveSpec, P: CurvePoint, n: int) -> tuple[Series, Series]:
    """Series for x and y in the canonical uniformizer, each known to roughly n terms."""
    p = curve.p
    if P.is_infinity:
        # w = 1/y as a series in z = x/y:  w = z^3 + a z w^2 + b w^3
        m = n + 8
        w = [0] * m
        for k in range(m):
            acc = 1 if k == 3 else 0
            if curve.a:
                acc += curve.a * sum(w[i] * w[k - 1 - i] for i in range(k))
            if curve.b:
                acc += curve.b * sum(w[i] * w[j] * w[k - i - j]
                                     for i in range(k + 1) for j in range(k + 1 - i))
            w[k] = acc % p
        ws = Series(p, 0, w, m)
        ys = ws.inverse()
        xs = Series(p, 1, [1], None) * ys
        return xs, ys
    if P.y != 0:
        xs = Series(p, 0, [P.x, 1], None)
        cub = [curve.rhs(P.x), (3 * P.x * P.x + curve.a) % p, 3 * P.x % p, 1]
        m = n + 2
        ys = [P.y] + [0] * (m - 1)
        inv = pow(2 * P.y, -1, p)
        for k in range(1, m):
            target = cub[k] if k < 4 else 0
            s = sum(ys[i] * ys[k - i] for i in range(1, k))
            ys[k] = (target - s) * inv % p
        return xs, Series(p, 0, ys, m)
    # 2-torsion: t = y, x = x0 + s(t) with t^2 = c1 s + c2 s^2 + s^3
    c1 = (3 * P.x * P.x + curve.a) % p
    c2 = 3 * P.x % p
    inv = pow(c1, -1, p)
    m = n + 4
    s = [0] * m
    for k in range(m):
        acc = 1 if k == 2 else 0
        acc -= c2 * sum(s[i] * s[k - i] for i in range(k + 1))
        acc -= sum(s[i] * s[j] * s[k - i - j] for i in range(k + 1) for j in range(k + 1 - i))
        s[k] = acc * inv % p
    s[0] = P.x
    return Series(p, 0, s, m), Series(p, 1, [1], None)


def _expand_once(f: FunctionFieldElement, P: CurvePoint, n: int) -> Series:
    xs, ys = _coordinate_series(f.curve, P, n)
    rel = n + 8
    us = _rf_at_series(f.u, xs, rel)
    if f.v.is_zero():
        return us
    vs = _rf_at_series(f.v, xs, rel)
    return us + vs * ys


def local_expand(f: FunctionFieldElement, P: CurvePoint, precision: int,
                 adaptive: bool = True) -> LocalExpansion:
    """Laurent expansion of ``f`` at ``P`` with ``precision`` leading coefficients.

    With ``adaptive=False`` the working precision is exactly ``precision`` and
    :class:`PrecisionExhausted` is raised when that is not enough.
    """
    if precision < 1:
        raise ValueError("precision must be at least 1")
    if f.is_zero():
        raise AtlasError("zero function has no expansion")
    if not f.curve.contains(P):
        raise AtlasError(f"{P} is not on the curve")
    n = precision
    while True:
        s = _expand_once(f, P, n)
        if s.coeffs and (s.prec is None or s.prec - s.start >= precision):
            cs = list(s.coeffs[:precision]) + [0] * max(0, precision - len(s.coeffs))
            return LocalExpansion(P, uniformizer_tag(f.curve, P), s.start, tuple(cs))
        if not adaptive:
            raise PrecisionExhausted(
                f"leading term of {f!r} at {P} not determined with {precision} terms")
        n *= 2
        if n > 1 << 14:
            raise PrecisionExhausted("expansion did not stabilise")


def valuation(f: FunctionFieldElement, P: CurvePoint) -> int:
    """Order of vanishing of ``f`` at ``P``; negative for poles."""
    if f.is_zero():
        raise AtlasError("valuation of the zero function")
    n = 8
    while True:
        s = _expand_once(f, P, n)
        if s.coeffs:
            return s.start
        n *= 2
        if n > 1 << 14:
            raise PrecisionExhausted("valuation did not stabilise")


def leading_coefficient(f: FunctionFieldElement, P: CurvePoint) -> tuple[int, int]:
    """(valuation, leading coefficient) in the canonical uniformizer."""
    e = local_expand(f, P, 1)
    return e.valuation, e.coefficients[0]


def points_iter(curve: CurveSpec) -> Iterable[CurvePoint]:
    return iter(curve.points())
