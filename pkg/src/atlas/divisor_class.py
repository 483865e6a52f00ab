"""Divisors, divisor classes and Riemann-Roch spaces on an elliptic curve.

Two class-group backends are available.  The concrete backend reduces
divisors on a curve over F_p with the chord-tangent law, so every class has
finite order.  The abstract backend models Cl^0 as Z^r + Z/m_1 + ... and is
used wherever infinite order matters.  In both, a class is stored as a
degree together with its degree-zero part ``cl0`` (the class of
``D - deg(D)*O``).
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from itertools import product
from typing import Iterable, Optional, Sequence, Union

from .errors import (AtlasError, BackendMismatch, NoSuchFunction, NonZeroDegree,
                     UnsupportedSupport)
from .field_tower import (INFINITY, CurvePoint, CurveSpec, FunctionFieldElement,
                          RationalFunction, local_expand, poly_deg, poly_roots, valuation)

__all__ = [
    "Divisor", "ClassElement", "ClassGroup", "TrackedFunction", "RRBasis",
    "INFINITE_ORDER", "divisor_of", "rr_basis", "h0", "function_with_poles",
    "principal_function", "line_function", "vertical_function", "miller_reduce", "parse_point",
]

INFINITE_ORDER = math.inf

PointLike = Union[CurvePoint, str]


def _point_key(P: PointLike):
    if isinstance(P, CurvePoint):
        return (0,) + P.sort_key()
    return (1, len(P), P)


def _point_str(P: PointLike) -> str:
    return str(P)


def parse_point(text: str, curve: Optional[CurveSpec] = None) -> PointLike:
    s = text.replace(" ", "")
    if s in ("O", "inf", "infinity"):
        return INFINITY
    m = re.fullmatch(r"\((-?\d+),(-?\d+)\)", s)
    if m:
        x, y = int(m.group(1)), int(m.group(2))
        if curve is not None:
            return curve.point(x, y)
        return CurvePoint(x, y)
    if re.fullmatch(r"g\d+", s):
        return s
    raise ValueError(f"cannot parse point {text!r}")


# ---------------------------------------------------------------------------
# divisors

@dataclass(frozen=True)
class Divisor:
    """A finite formal sum of points, stored sorted with zero entries dropped."""

    terms: tuple = ()

    def __post_init__(self):
        acc: dict = {}
        for P, m in self.terms:
            acc[P] = acc.get(P, 0) + int(m)
        clean = tuple(sorted(((P, m) for P, m in acc.items() if m), key=lambda t: _point_key(t[0])))
        object.__setattr__(self, "terms", clean)

    @classmethod
    def of(cls, *pairs) -> "Divisor":
        return cls(tuple(pairs))

    @classmethod
    def point(cls, P: PointLike, m: int = 1) -> "Divisor":
        return cls(((P, m),))

    @property
    def degree(self) -> int:
        return sum(m for _, m in self.terms)

    @property
    def support(self) -> tuple:
        return tuple(P for P, _ in self.terms)

    def __getitem__(self, P) -> int:
        for Q, m in self.terms:
            if Q == P:
                return m
        return 0

    def __add__(self, other: "Divisor") -> "Divisor":
        return Divisor(self.terms + other.terms)

    def __neg__(self) -> "Divisor":
        return Divisor(tuple((P, -m) for P, m in self.terms))

    def __sub__(self, other: "Divisor") -> "Divisor":
        return self + (-other)

    def __mul__(self, k: int) -> "Divisor":
        return Divisor(tuple((P, k * m) for P, m in self.terms))

    __rmul__ = __mul__

    def is_effective(self) -> bool:
        return all(m > 0 for _, m in self.terms)

    def is_abstract(self) -> bool:
        return any(isinstance(P, str) for P, _ in self.terms)

    def positive_part(self) -> "Divisor":
        return Divisor(tuple(t for t in self.terms if t[1] > 0))

    def to_json(self) -> list:
        return [{"point": _point_str(P), "mult": m} for P, m in self.terms]

    @classmethod
    def from_json(cls, data, curve: Optional[CurveSpec] = None) -> "Divisor":
        if isinstance(data, str):
            return cls.parse(data, curve)
        return cls(tuple((parse_point(item["point"], curve), int(item["mult"])) for item in data))

    @classmethod
    def parse(cls, text: str, curve: Optional[CurveSpec] = None) -> "Divisor":
        """Parse ``"2*(1,5) - O + g1"`` style sums."""
        s = text.replace(" ", "")
        if s in ("", "0"):
            return cls()
        pieces = re.findall(r"[+-]?[^+-]+", s)
        terms = []
        for piece in pieces:
            sign = -1 if piece.startswith("-") else 1
            body = piece.lstrip("+-")
            m = re.fullmatch(r"(\d+)\*?(.*)", body)
            k = 1
            if m and m.group(2):
                k, body = int(m.group(1)), m.group(2)
            terms.append((parse_point(body, curve), sign * k))
        return cls(tuple(terms))

    def __str__(self):
        if not self.terms:
            return "0"
        out = []
        for P, m in self.terms:
            coef = "" if abs(m) == 1 else f"{abs(m)}*"
            out.append(("-" if m < 0 else "+") + coef + _point_str(P))
        s = "".join(out)
        return s[1:] if s.startswith("+") else s


# ---------------------------------------------------------------------------
# classes

@dataclass(frozen=True)
class ClassElement:
    """Divisor class: degree plus degree-zero part ``cl0``.

    ``cl0`` is a :class:`CurvePoint` in the concrete backend and a tuple of
    integers (free coordinates, then torsion coordinates) in the abstract one.
    """

    backend: str
    degree: int
    cl0: object
    group: "ClassGroup" = field(compare=False, hash=False, repr=False, default=None)

    def _check(self, other):
        if not isinstance(other, ClassElement) or other.backend != self.backend:
            raise BackendMismatch("classes from different backends")

    def __add__(self, other: "ClassElement") -> "ClassElement":
        self._check(other)
        g = self.group
        return ClassElement(self.backend, self.degree + other.degree, g._add0(self.cl0, other.cl0), g)

    def __neg__(self) -> "ClassElement":
        return ClassElement(self.backend, -self.degree, self.group._neg0(self.cl0), self.group)

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, k: int) -> "ClassElement":
        return ClassElement(self.backend, k * self.degree, self.group._mul0(k, self.cl0), self.group)

    __rmul__ = __mul__

    def is_trivial(self) -> bool:
        return self.degree == 0 and self.group._is_zero0(self.cl0)

    def cl0_is_zero(self) -> bool:
        return self.group._is_zero0(self.cl0)

    def key(self) -> tuple:
        if self.backend == "concrete":
            return (self.degree,) + self.cl0.sort_key()
        return (self.degree,) + tuple(self.cl0)

    def to_json(self) -> dict:
        c = str(self.cl0) if self.backend == "concrete" else list(self.cl0)
        return {"degree": self.degree, "cl0": c}

    def __str__(self):
        if self.backend == "concrete":
            return f"[deg {self.degree}, {self.cl0}]"
        return f"[deg {self.degree}, {list(self.cl0)}]"


class ClassGroup:
    """Configuration of the class-group backend plus the distinguished classes D0, Dsigma."""

    def __init__(self, backend: str = "abstract", curve: Optional[CurveSpec] = None,
                 rank: int = 1, torsion: Sequence[int] = (),
                 D0_class=None, Dsigma_class=None):
        if backend not in ("concrete", "abstract"):
            raise ValueError(f"unknown backend {backend!r}")
        self.backend = backend
        self.curve = curve
        if backend == "concrete":
            if curve is None:
                raise ValueError("the concrete backend needs a curve")
            self.rank, self.torsion = 0, ()
        else:
            if rank < 0 or any(m < 2 for m in torsion):
                raise ValueError("rank must be >= 0 and torsion orders >= 2")
            self.rank, self.torsion = int(rank), tuple(int(m) for m in torsion)
        self._D0 = self._parse_cl0(D0_class)
        self._Ds = self._parse_cl0(Dsigma_class)
        lhs = self._mul0(2, self._Ds)
        rhs = self._mul0(4, self._D0)
        if lhs != rhs:
            raise ValueError("distinguished classes violate 2*cl0(Dsigma) = 4*cl0(D0)")

    # -- cl0 arithmetic ---------------------------------------------------
    def _zero0(self):
        if self.backend == "concrete":
            return INFINITY
        return (0,) * (self.rank + len(self.torsion))

    def _reduce0(self, v):
        r = self.rank
        return tuple(int(c) for c in v[:r]) + tuple(int(c) % m for c, m in zip(v[r:], self.torsion))

    def _add0(self, a, b):
        if self.backend == "concrete":
            return self.curve.add(a, b)
        return self._reduce0([x + y for x, y in zip(a, b)])

    def _neg0(self, a):
        if self.backend == "concrete":
            return self.curve.neg(a)
        return self._reduce0([-x for x in a])

    def _mul0(self, k, a):
        if self.backend == "concrete":
            return self.curve.mul(k, a)
        return self._reduce0([k * x for x in a])

    def _is_zero0(self, a) -> bool:
        return a == self._zero0()

    def _parse_cl0(self, value):
        if value is None:
            return self._zero0()
        if isinstance(value, ClassElement):
            return value.cl0
        if self.backend == "concrete":
            if isinstance(value, CurvePoint):
                P = value
            else:
                P = parse_point(str(value), self.curve)
            if not self.curve.contains(P):
                raise ValueError(f"{P} is not on the curve")
            return P
        v = list(value)
        if len(v) != self.rank + len(self.torsion):
            raise ValueError(f"class vector {v} has the wrong length")
        return self._reduce0(v)

    # -- constructors -----------------------------------------------------
    def element(self, degree: int, cl0=None) -> ClassElement:
        return ClassElement(self.backend, int(degree), self._parse_cl0(cl0), self)

    def zero(self) -> ClassElement:
        return self.element(0)

    def generator(self, i: int) -> ClassElement:
        """Degree-zero class of ``g_i - O`` (1-based, free generators first)."""
        if self.backend != "abstract":
            raise BackendMismatch("generators exist only in the abstract backend")
        n = self.rank + len(self.torsion)
        if not 1 <= i <= n:
            raise ValueError(f"generator index {i} out of range 1..{n}")
        v = [0] * n
        v[i - 1] = 1
        return ClassElement("abstract", 0, self._reduce0(v), self)

    def D0(self) -> ClassElement:
        return ClassElement(self.backend, 2, self._D0, self)

    def Dsigma(self) -> ClassElement:
        return ClassElement(self.backend, 2, self._Ds, self)

    def point_class(self, P: PointLike) -> ClassElement:
        """Class of the degree-one divisor (P)."""
        if isinstance(P, str) and P.strip() == "O":
            P = INFINITY
        if isinstance(P, str):
            if self.backend != "abstract":
                raise BackendMismatch(f"abstract symbol {P} under the concrete backend")
            g = self.generator(int(P[1:]))
            return ClassElement("abstract", 1, g.cl0, self)
        if P.is_infinity:
            return ClassElement(self.backend, 1, self._zero0(), self)
        if self.backend != "concrete":
            raise BackendMismatch(f"curve point {P} under the abstract backend")
        return ClassElement("concrete", 1, P, self)

    # -- operations -------------------------------------------------------
    def class_of(self, D: Divisor) -> ClassElement:
        acc = self.zero()
        for P, m in D.terms:
            acc = acc + self.point_class(P) * m
        return acc

    def lin_equiv(self, D: Divisor, E: Divisor) -> bool:
        return self.class_of(D) == self.class_of(E)

    def is_principal(self, D: Divisor) -> bool:
        return self.class_of(D).is_trivial()

    def order_of(self, c: ClassElement):
        if c.degree != 0:
            raise NonZeroDegree(f"order of a class of degree {c.degree}")
        if self.backend == "concrete":
            p = self.curve.p
            hasse = p + 1 + 2 * math.isqrt(p) + 2
            Q, k = c.cl0, 1
            while not Q.is_infinity:
                Q, k = self.curve.add(Q, c.cl0), k + 1
                if k > hasse:
                    raise AtlasError("order exceeds the Hasse bound; curve arithmetic is broken")
            return k
        free = c.cl0[: self.rank]
        if any(free):
            return INFINITE_ORDER
        k = 1
        for x, m in zip(c.cl0[self.rank:], self.torsion):
            k = math.lcm(k, m // math.gcd(x, m))
        return k

    def m2_pullback(self, c: ClassElement) -> ClassElement:
        return ClassElement(self.backend, 4 * c.degree, self._mul0(2, c.cl0), self)

    def is_nontrivial_2divisor(self, D) -> bool:
        c = D if isinstance(D, ClassElement) else self.class_of(D)
        t = self.m2_pullback(c) - self.D0() * (2 * c.degree)
        assert t.degree == 0
        return not t.cl0_is_zero()

    def is_two_torsion(self, c: ClassElement) -> bool:
        return c.degree == 0 and self._is_zero0(self._mul0(2, c.cl0))

    def _torsion_exponent(self) -> int:
        if self.backend == "concrete":
            return self.curve.order()
        k = 1
        for m in self.torsion:
            k = math.lcm(k, m)
        return k

    def _free_vector(self, c: ClassElement) -> tuple:
        if self.backend == "concrete":
            return (c.degree,)
        return (c.degree,) + tuple(c.cl0[: self.rank])

    def _torsion_zero(self, c: ClassElement) -> bool:
        """Is the torsion component of c (degree ignored) trivial?"""
        if self.backend == "concrete":
            return c.cl0.is_infinity
        return not any(c.cl0[self.rank:])

    def exists_n_trivial(self, D: ClassElement, E: ClassElement) -> Optional[int]:
        """Some n with D + n*E trivial, or None when no integer n works."""
        fd, fe = self._free_vector(D), self._free_vector(E)
        if any(fe):
            cand = None
            for a, b in zip(fd, fe):
                if b:
                    if a % b:
                        return None
                    cand = -a // b
                    break
            if any(a + cand * b for a, b in zip(fd, fe)):
                return None
            return cand if (D + E * cand).is_trivial() else None
        if any(fd):
            return None
        if self.backend == "concrete":
            bound = self.order_of(ClassElement("concrete", 0, E.cl0, self))
        else:
            bound = self._torsion_exponent()
        for n in range(bound):
            if (D + E * n).is_trivial():
                return n
        return None

    def has_coprime_relation(self, D: ClassElement, E: ClassElement) -> bool:
        """Whether alpha*D + beta*E is trivial for some coprime integers alpha, beta."""
        fd, fe = self._free_vector(D), self._free_vector(E)
        rows = [(a, b) for a, b in zip(fd, fe) if a or b]
        L = self._torsion_exponent()
        if not rows:
            content = L
            for al, be in product(range(L), repeat=2):
                if (D * al + E * be).is_trivial():
                    content = math.gcd(content, math.gcd(al, be))
            return content == 1
        a, b = rows[0]
        g = math.gcd(a, b)
        k = (b // g, -a // g)
        if any(x * k[0] + y * k[1] for x, y in rows):
            return False
        c = D * k[0] + E * k[1]
        # c has zero free part; its order is the content of the relation lattice
        return self.order_of(c) == 1

    def key(self, c: ClassElement) -> tuple:
        return c.key()

    def class_from_json(self, data) -> ClassElement:
        if isinstance(data, ClassElement):
            return data
        if isinstance(data, (list, str)) and not (isinstance(data, list) and data and isinstance(data[0], int)):
            return self.class_of(Divisor.from_json(data, self.curve))
        if isinstance(data, dict):
            return self.element(int(data.get("degree", 0)), data.get("cl0"))
        raise ValueError(f"cannot read a divisor class from {data!r}")

    def to_json(self) -> dict:
        out = {"backend": self.backend}
        if self.backend == "abstract":
            out.update(rank=self.rank, torsion=list(self.torsion))
        def enc(c):
            return str(c) if self.backend == "concrete" else list(c)
        out.update(D0_class=enc(self._D0), Dsigma_class=enc(self._Ds))
        return out

    @classmethod
    def from_json(cls, data: dict, curve: Optional[CurveSpec] = None) -> "ClassGroup":
        return cls(data.get("backend", "abstract"), curve, int(data.get("rank", 1)),
                   tuple(data.get("torsion", ())), data.get("D0_class"), data.get("Dsigma_class"))


# ---------------------------------------------------------------------------
# tracked functions (products of lines and verticals)

def vertical_function(curve: CurveSpec, P: CurvePoint) -> FunctionFieldElement:
    if P.is_infinity:
        return curve.const(1)
    return curve.x() - P.x


def line_function(curve: CurveSpec, P: CurvePoint, Q: CurvePoint) -> FunctionFieldElement:
    """The line through P and Q (tangent when P = Q)."""
    if P.is_infinity and Q.is_infinity:
        return curve.const(1)
    if P.is_infinity:
        return vertical_function(curve, Q)
    if Q.is_infinity or (P.x == Q.x and (P.y + Q.y) % curve.p == 0):
        return vertical_function(curve, P)
    p = curve.p
    if P == Q:
        s = (3 * P.x * P.x + curve.a) * pow(2 * P.y, -1, p) % p
    else:
        s = (Q.y - P.y) * pow(Q.x - P.x, -1, p) % p
    x, y = curve.x(), curve.y()
    return y - P.y - (x - P.x) * s


@dataclass(frozen=True)
class TrackedFunction:
    """A constant times a product of line and vertical factors with known divisors."""

    curve: CurveSpec
    factors: tuple = ()
    constant: int = 1

    def __post_init__(self):
        acc: dict = {}
        for f, e in self.factors:
            f = _canon_factor(f)
            if f is None:
                continue
            acc[f] = acc.get(f, 0) + e
        clean = tuple(sorted(((f, e) for f, e in acc.items() if e), key=lambda t: _factor_key(t[0])))
        object.__setattr__(self, "factors", clean)
        object.__setattr__(self, "constant", self.constant % self.curve.p)

    @classmethod
    def one(cls, curve):
        return cls(curve)

    @classmethod
    def line(cls, curve, P, Q):
        return cls(curve, ((("line", P, Q), 1),))

    @classmethod
    def vertical(cls, curve, P):
        return cls(curve, ((("vert", P), 1),))

    def __mul__(self, other: "TrackedFunction") -> "TrackedFunction":
        return TrackedFunction(self.curve, self.factors + other.factors, self.constant * other.constant)

    def __pow__(self, k: int) -> "TrackedFunction":
        c = pow(self.constant, k, self.curve.p) if self.constant else 0
        return TrackedFunction(self.curve, tuple((f, e * k) for f, e in self.factors), c)

    def inverse(self) -> "TrackedFunction":
        return self ** -1

    def __truediv__(self, other):
        return self * other.inverse()

    def divisor(self) -> Divisor:
        total = Divisor()
        for f, e in self.factors:
            total = total + _factor_divisor(self.curve, f) * e
        return total

    def element(self) -> FunctionFieldElement:
        acc = self.curve.const(self.constant)
        for f, e in self.factors:
            base = line_function(self.curve, f[1], f[2]) if f[0] == "line" else vertical_function(self.curve, f[1])
            acc = acc * base ** e
        return acc


def _canon_factor(f):
    if f[0] == "vert":
        return None if f[1].is_infinity else f
    P, Q = f[1], f[2]
    if P.is_infinity and Q.is_infinity:
        return None
    if P.is_infinity:
        return ("vert", Q)
    if Q.is_infinity:
        return ("vert", P)
    if Q < P:
        P, Q = Q, P
    return ("line", P, Q)


def _factor_key(f):
    return (f[0],) + tuple(P.sort_key() for P in f[1:])


def _factor_divisor(curve, f) -> Divisor:
    if f[0] == "vert":
        P = f[1]
        return Divisor.of((P, 1), (curve.neg(P), 1), (INFINITY, -2))
    P, Q = f[1], f[2]
    R = curve.neg(curve.add(P, Q))
    return Divisor.of((P, 1), (Q, 1), (R, 1), (INFINITY, -3))


def _check_concrete(curve: CurveSpec, D: Divisor):
    if D.is_abstract():
        raise BackendMismatch("divisor contains abstract symbols")
    for P in D.support:
        if not curve.contains(P):
            raise UnsupportedSupport(f"{P} is not a rational point of the curve")


def miller_reduce(curve: CurveSpec, D: Divisor) -> tuple[CurvePoint, TrackedFunction]:
    """Find R and tracked h with D = (R) + (deg D - 1)(O) + div(h).

    When the degree-zero part is trivial R is O, i.e. D = deg(D)(O) + div(h).
    """
    _check_concrete(curve, D)
    h = TrackedFunction.one(curve)
    mults = {P: m for P, m in D.terms if not P.is_infinity}
    # negative points: -(P) = (-P) - 2(O) - div(v_P)
    for P in sorted(mults):
        m = mults[P]
        if m < 0:
            negP = curve.neg(P)
            del mults[P]
            mults[negP] = mults.get(negP, 0) - m
            h = h * TrackedFunction.vertical(curve, P) ** m
    pts = []
    for P in sorted(mults):
        pts.extend([P] * mults[P])
    # pair merge: (P) + (Q) = (P+Q) + (O) + div(l_PQ / v_{P+Q})
    R = INFINITY
    for P in pts:
        if R.is_infinity:
            R = P
            continue
        S = curve.add(R, P)
        h = h * TrackedFunction.line(curve, R, P) / TrackedFunction.vertical(curve, S)
        R = S
    return R, h


def principal_function(curve: CurveSpec, E: Divisor) -> TrackedFunction:
    """Tracked h with div(h) = E exactly, for a principal E."""
    if E.degree != 0:
        raise NoSuchFunction("a principal divisor has degree zero")
    R, h = miller_reduce(curve, E)
    if not R.is_infinity:
        raise NoSuchFunction(f"{E} is not principal")
    # E = -(O) + (O) + div(h) once R = O
    assert h.divisor() == E
    return h


def divisor_of(f, curve: Optional[CurveSpec] = None) -> Divisor:
    """Divisor of a tracked function, or of an element whose zeros and poles are all rational."""
    if isinstance(f, TrackedFunction):
        return f.divisor()
    if not isinstance(f, FunctionFieldElement):
        raise UnsupportedSupport("not a function-field element")
    if f.is_zero():
        raise UnsupportedSupport("the zero function has no divisor")
    C = f.curve
    p = C.p
    if f.is_constant():
        return Divisor()
    polys = [f.norm().num, f.norm().den, f.u.den, f.v.den]
    xs = set()
    for g in polys:
        if poly_deg(g) <= 0:
            continue
        roots = poly_roots(list(g), p)
        if sum(roots.values()) != poly_deg(g):
            raise UnsupportedSupport("zeros or poles over non-rational x-values")
        xs.update(roots)
    points = [INFINITY]
    for x0 in sorted(xs):
        above = C.lift_x(x0)
        if not above:
            raise UnsupportedSupport(f"no rational point above x = {x0}")
        points.extend(above)
    D = Divisor(tuple((P, valuation(f, P)) for P in points))
    if D.degree != 0:
        raise UnsupportedSupport("support not fully rational")
    return D


# ---------------------------------------------------------------------------
# Riemann-Roch spaces

@dataclass(frozen=True)
class RRBasis:
    divisor: Divisor
    basis: tuple

    @property
    def dimension(self) -> int:
        return len(self.basis)


def _monomial_basis(curve: CurveSpec, d: int) -> list[FunctionFieldElement]:
    x, y = curve.x(), curve.y()
    out = [curve.const(1)] if d >= 0 else []
    for order in range(2, d + 1):
        if order % 2 == 0:
            out.append(x ** (order // 2))
        else:
            out.append(x ** ((order - 3) // 2) * y)
    return out


def rr_basis(curve: CurveSpec, D: Divisor, verify: bool = True) -> RRBasis:
    _check_concrete(curve, D)
    d = D.degree
    if d < 0:
        return RRBasis(D, ())
    R, h = miller_reduce(curve, D)
    if R.is_infinity:
        base = _monomial_basis(curve, d)
    elif d == 0:
        base = []
    elif d == 1:
        base = [curve.const(1)]
    else:
        g = (curve.y() + R.y) / (curve.x() - R.x)
        base = _monomial_basis(curve, d - 1) + [g]
    hinv = h.inverse().element()
    basis = tuple(b * hinv for b in base)
    if verify:
        check = set(D.support) | set(h.divisor().support) | {INFINITY, R}
        for f in basis:
            for P in check:
                if valuation(f, P) + D[P] < 0:
                    raise AtlasError(f"basis element fails the pole bound at {P}")
    return RRBasis(D, basis)


def h0(curve: CurveSpec, D: Divisor) -> int:
    return rr_basis(curve, D, verify=False).dimension


def _coefficient_at(f: FunctionFieldElement, P: CurvePoint, k: int) -> int:
    e = local_expand(f, P, 1)
    if e.valuation > k:
        return 0
    e = local_expand(f, P, k - e.valuation + 1)
    return e.coefficients[k - e.valuation]


def function_with_poles(curve: CurveSpec, Dpoles: Divisor) -> FunctionFieldElement:
    """A function whose pole divisor is exactly ``Dpoles``."""
    if not Dpoles.is_effective():
        raise ValueError("pole divisor must be effective")
    if Dpoles.degree == 0:
        return curve.const(1)
    if Dpoles.degree == 1:
        raise NoSuchFunction("no function on a genus-one curve has a single simple pole")
    basis = rr_basis(curve, Dpoles).basis
    table = [[_coefficient_at(b, P, -m) for b in basis] for P, m in Dpoles.terms]
    for t in range(1, curve.p):
        c = [pow(t, i, curve.p) for i in range(len(basis))]
        if all(sum(ci * ri for ci, ri in zip(c, row)) % curve.p for row in table):
            f = curve.const(0)
            for ci, b in zip(c, basis):
                f = f + b * ci
            return f
    raise NoSuchFunction(f"no exact pole function for {Dpoles}")
