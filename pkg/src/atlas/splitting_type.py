"""Birkhoff splitting of 2x2 Laurent-polynomial cocycles and jumping fibers.

A matrix A with entries in F[y, 1/y] and det(A) = c*y^k is brought to the
form ``M^-1 A N = diag(y^m, y^n)`` with M invertible over F[1/y], N
invertible over F[y] and m >= n.  The coefficient field F is either F_p or
F_p(x).  Over F_p(x), evaluating at x = x0 gives the matrix of one fiber,
and ``m - n`` is the type of the Hirzebruch surface sitting over that point.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterable, Optional, Sequence

from .errors import (DivisionByZero, EvaluationPole, NotAJump, NotSplittable,
                     SingularFiber)
from .field_tower import RationalFunction

__all__ = [
    "PrimeField", "RationalFunctionField", "LaurentPoly", "LaurentMatrix",
    "SplittingCertificate", "JumpReport", "birkhoff_split", "fiber_type", "generic_type",
    "remove_jump", "remove_all_jumps", "scan_fibers", "planted_split_instance",
    "planted_jump_instance",
]


# ---------------------------------------------------------------------------
# coefficient fields

class PrimeField:
    def __init__(self, p: int):
        self.p = p
        self.zero = 0
        self.one = 1

    def __eq__(self, other):
        return isinstance(other, PrimeField) and other.p == self.p

    def __hash__(self):
        return hash(("Fp", self.p))

    def c(self, v) -> int:
        return int(v) % self.p

    def add(self, a, b):
        return (a + b) % self.p

    def sub(self, a, b):
        return (a - b) % self.p

    def mul(self, a, b):
        return a * b % self.p

    def neg(self, a):
        return (-a) % self.p

    def inv(self, a):
        if a % self.p == 0:
            raise DivisionByZero("inverse of 0")
        return pow(a, -1, self.p)

    def is_zero(self, a) -> bool:
        return a % self.p == 0

    def encode(self, a):
        return int(a)

    def decode(self, v):
        return int(v) % self.p


class RationalFunctionField:
    """F_p(x) together with a declared set of x-values where poles are allowed."""

    def __init__(self, p: int, allowed_poles: Iterable[int] = ()):
        self.p = p
        self.allowed_poles = frozenset(int(a) % p for a in allowed_poles)
        self.zero = RationalFunction.const(0, p)
        self.one = RationalFunction.const(1, p)

    def __eq__(self, other):
        return isinstance(other, RationalFunctionField) and other.p == self.p

    def __hash__(self):
        return hash(("Fp(x)", self.p))

    def c(self, v) -> RationalFunction:
        if isinstance(v, RationalFunction):
            return v
        if isinstance(v, int):
            return RationalFunction.const(v, self.p)
        if isinstance(v, str):
            return RationalFunction.from_str(v, self.p)
        return RationalFunction(list(v), None, self.p)

    def add(self, a, b):
        return a + b

    def sub(self, a, b):
        return a - b

    def mul(self, a, b):
        return a * b

    def neg(self, a):
        return -a

    def inv(self, a):
        return a.inverse()

    def is_zero(self, a) -> bool:
        return a.is_zero()

    def encode(self, a):
        return a.to_str()

    def decode(self, v):
        return self.c(v if not isinstance(v, int) else v % self.p)

    def evaluate(self, a: RationalFunction, x0: int) -> int:
        try:
            return a.evaluate(x0)
        except DivisionByZero as exc:
            raise EvaluationPole(f"coefficient {a.to_str()} has a pole at x = {x0}") from exc


# ---------------------------------------------------------------------------
# Laurent polynomials in y

class LaurentPoly:
    """Sum of c_e * y^e, stored as a sorted tuple of (e, c) with c != 0."""

    __slots__ = ("F", "terms")

    def __init__(self, F, terms=()):
        acc: dict = {}
        items = terms.items() if isinstance(terms, dict) else terms
        for e, c in items:
            c = F.c(c)
            e = int(e)
            acc[e] = F.add(acc[e], c) if e in acc else c
        self.F = F
        self.terms = tuple(sorted((e, c) for e, c in acc.items() if not F.is_zero(c)))

    @classmethod
    def monomial(cls, F, c, e):
        return cls(F, ((e, c),))

    @classmethod
    def constant(cls, F, c):
        return cls(F, ((0, c),))

    def is_zero(self) -> bool:
        return not self.terms

    @property
    def degree(self) -> int:
        return self.terms[-1][0] if self.terms else -10 ** 9

    @property
    def low(self) -> int:
        return self.terms[0][0] if self.terms else 10 ** 9

    def coeff(self, e: int):
        for k, c in self.terms:
            if k == e:
                return c
        return self.F.zero

    @property
    def leading(self):
        return self.terms[-1][1]

    def is_monomial(self) -> bool:
        return len(self.terms) == 1

    def __add__(self, other):
        return LaurentPoly(self.F, self.terms + other.terms)

    def __neg__(self):
        return LaurentPoly(self.F, tuple((e, self.F.neg(c)) for e, c in self.terms))

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        F = self.F
        if not self.terms or not other.terms:
            return LaurentPoly(F)
        acc: dict = {}
        for e1, c1 in self.terms:
            for e2, c2 in other.terms:
                e = e1 + e2
                v = F.mul(c1, c2)
                acc[e] = F.add(acc[e], v) if e in acc else v
        return LaurentPoly(F, acc)

    def scale(self, c):
        F = self.F
        return LaurentPoly(F, tuple((e, F.mul(c, v)) for e, v in self.terms))

    def shift(self, k: int):
        return LaurentPoly(self.F, tuple((e + k, c) for e, c in self.terms))

    def map_coeffs(self, F2, fn):
        return LaurentPoly(F2, tuple((e, fn(c)) for e, c in self.terms))

    def __eq__(self, other):
        return isinstance(other, LaurentPoly) and self.terms == other.terms

    def __hash__(self):
        return hash(self.terms)

    def to_json(self) -> dict:
        return {str(e): self.F.encode(c) for e, c in self.terms}

    def __repr__(self):
        if not self.terms:
            return "0"
        return " + ".join(f"{self.F.encode(c)}*y^{e}" for e, c in self.terms)


# ---------------------------------------------------------------------------
# 2x2 matrices

@dataclass(frozen=True)
class LaurentMatrix:
    F: object
    entries: tuple  # ((a11, a12), (a21, a22))

    @classmethod
    def from_rows(cls, F, rows) -> "LaurentMatrix":
        def lp(v):
            if isinstance(v, LaurentPoly):
                return v
            if isinstance(v, dict):
                return LaurentPoly(F, v)
            return LaurentPoly.constant(F, v)
        return cls(F, tuple(tuple(lp(v) for v in row) for row in rows))

    @classmethod
    def identity(cls, F) -> "LaurentMatrix":
        return cls.from_rows(F, [[1, 0], [0, 1]])

    @classmethod
    def diag(cls, F, m: int, n: int) -> "LaurentMatrix":
        return cls.from_rows(F, [[{m: 1}, 0], [0, {n: 1}]])

    def __getitem__(self, ij):
        i, j = ij
        return self.entries[i][j]

    def __matmul__(self, other: "LaurentMatrix") -> "LaurentMatrix":
        a, b = self.entries, other.entries
        rows = tuple(tuple(a[i][0] * b[0][j] + a[i][1] * b[1][j] for j in range(2)) for i in range(2))
        return LaurentMatrix(self.F, rows)

    def det(self) -> LaurentPoly:
        a = self.entries
        return a[0][0] * a[1][1] - a[0][1] * a[1][0]

    def inverse(self) -> "LaurentMatrix":
        d = self.det()
        if not d.is_monomial():
            raise NotSplittable("determinant is not a unit monomial")
        e, c = d.terms[0]
        ci = self.F.inv(c)
        a = self.entries
        def s(v):
            return v.scale(ci).shift(-e)
        return LaurentMatrix(self.F, ((s(a[1][1]), s(-a[0][1])), (s(-a[1][0]), s(a[0][0]))))

    def swap(self) -> "LaurentMatrix":
        """Conjugate by the permutation exchanging the two coordinates."""
        a = self.entries
        return LaurentMatrix(self.F, ((a[1][1], a[1][0]), (a[0][1], a[0][0])))

    def map_coeffs(self, F2, fn) -> "LaurentMatrix":
        return LaurentMatrix(F2, tuple(tuple(v.map_coeffs(F2, fn) for v in row) for row in self.entries))

    def exponents(self) -> list[int]:
        return [e for row in self.entries for v in row for e, _ in v.terms]

    def is_over_inverse_y(self) -> bool:
        return all(e <= 0 for e in self.exponents())

    def is_over_y(self) -> bool:
        return all(e >= 0 for e in self.exponents())

    def to_json(self) -> dict:
        out = {"entries": [[v.to_json() for v in row] for row in self.entries]}
        if isinstance(self.F, RationalFunctionField):
            out["field"] = "Fp(x)"
            out["allowed_poles"] = sorted(self.F.allowed_poles)
        else:
            out["field"] = "Fp"
        out["p"] = self.F.p
        return out

    @classmethod
    def from_json(cls, data: dict, p: Optional[int] = None) -> "LaurentMatrix":
        p = int(data.get("p", p or 0))
        if p <= 1:
            raise ValueError("matrix file lacks a modulus p")
        kind = data.get("field")
        if kind is None:
            kind = "Fp(x)" if _has_strings(data["entries"]) else "Fp"
        F = RationalFunctionField(p, data.get("allowed_poles", ())) if kind == "Fp(x)" else PrimeField(p)
        ent = data["entries"]
        if len(ent) != 2 or any(len(r) != 2 for r in ent):
            raise ValueError("matrix must be 2x2")
        rows = [[LaurentPoly(F, {int(e): F.decode(c) for e, c in v.items()}) for v in r] for r in ent]
        return cls.from_rows(F, rows)

    def __repr__(self):
        return f"LaurentMatrix({list(map(list, self.entries))})"


def _has_strings(ent) -> bool:
    return any(isinstance(c, str) for r in ent for v in r for c in v.values())


@dataclass(frozen=True)
class SplittingCertificate:
    M: LaurentMatrix
    N: LaurentMatrix
    m: int
    n: int

    @property
    def b(self) -> int:
        return self.m - self.n

    def verify(self, A: LaurentMatrix) -> bool:
        if not (self.M.is_over_inverse_y() and self.N.is_over_y()):
            return False
        for X in (self.M, self.N):
            d = X.det()
            if not (d.is_monomial() and d.terms[0][0] == 0):
                return False
        return self.M.inverse() @ A @ self.N == LaurentMatrix.diag(A.F, self.m, self.n)


# ---------------------------------------------------------------------------
# the splitting algorithm

def _det_monomial(A: LaurentMatrix) -> int:
    d = A.det()
    if not d.is_monomial():
        raise NotSplittable(f"det(A) = {d!r} is not a unit times a power of y")
    return d.terms[0][0]


def birkhoff_split(A: LaurentMatrix) -> SplittingCertificate:
    """Exact certificate ``M^-1 A N = diag(y^m, y^n)`` with m >= n."""
    F = A.F
    _det_monomial(A)
    shift = -min(A.exponents())
    cols = [[A[0, j].shift(shift), A[1, j].shift(shift)] for j in range(2)]
    N = [[LaurentPoly.constant(F, 1), LaurentPoly(F)], [LaurentPoly(F), LaurentPoly.constant(F, 1)]]

    def cdeg(j):
        return max(cols[j][0].degree, cols[j][1].degree)

    while True:
        d = [cdeg(0), cdeg(1)]
        lc = [[cols[j][i].coeff(d[j]) for j in range(2)] for i in range(2)]
        det_lc = F.sub(F.mul(lc[0][0], lc[1][1]), F.mul(lc[0][1], lc[1][0]))
        if not F.is_zero(det_lc):
            break
        # pivot: lowest column degree, ties to the lower index
        lo = 0 if d[0] <= d[1] else 1
        hi = 1 - lo
        r = 0 if not F.is_zero(lc[0][lo]) else 1
        c = F.mul(lc[r][hi], F.inv(lc[r][lo]))
        mult = LaurentPoly.monomial(F, c, d[hi] - d[lo])
        for i in range(2):
            cols[hi][i] = cols[hi][i] - cols[lo][i] * mult
            N[i][hi] = N[i][hi] - N[i][lo] * mult
    d = [cdeg(0), cdeg(1)]
    M = LaurentMatrix(F, tuple(tuple(cols[j][i].shift(-d[j]) for j in range(2)) for i in range(2)))
    Nm = LaurentMatrix(F, tuple(tuple(N[i][j] for j in range(2)) for i in range(2)))
    m, n = d[0] - shift, d[1] - shift
    if m < n:
        P = LaurentMatrix.from_rows(F, [[0, 1], [1, 0]])
        M, Nm, m, n = M @ P, Nm @ P, n, m
    cert = SplittingCertificate(M, Nm, m, n)
    if not cert.verify(A):
        raise AssertionError("splitting certificate failed to verify")
    return cert


def evaluate_at(A: LaurentMatrix, x0: int) -> LaurentMatrix:
    F = A.F
    if not isinstance(F, RationalFunctionField):
        return A
    if x0 % F.p in F.allowed_poles:
        raise EvaluationPole(f"x = {x0} lies in the allowed-pole set")
    Fp = PrimeField(F.p)
    return A.map_coeffs(Fp, lambda c: F.evaluate(c, x0))


def fiber_type(A: LaurentMatrix, x0: int) -> int:
    """Splitting type of the fiber over x = x0."""
    A0 = evaluate_at(A, x0)
    try:
        return birkhoff_split(A0).b
    except NotSplittable as exc:
        raise SingularFiber(f"fiber over x = {x0} is singular: {exc}") from exc


@lru_cache(maxsize=512)
def generic_type(A: LaurentMatrix) -> int:
    """Splitting type over the generic point; cached since scans ask repeatedly."""
    return birkhoff_split(A).b


def _lift(F, A0: LaurentMatrix) -> LaurentMatrix:
    return A0.map_coeffs(F, lambda c: F.c(int(c)))


def remove_jump(A: LaurentMatrix, x0: int) -> LaurentMatrix:
    """One elementary transformation at a jumping fiber.

    First the frame is changed by the (x-independent) splitting matrices of
    the fiber, so that A(x0) is diagonal.  Then A is conjugated by
    diag(x - x0, 1).
    """
    F = A.F
    b = generic_type(A)
    bt = fiber_type(A, x0)
    if bt <= b:
        raise NotAJump(f"fiber over x = {x0} has the generic type {b}")
    cert0 = birkhoff_split(evaluate_at(A, x0))
    Mt, Nt = _lift(F, cert0.M), _lift(F, cert0.N)
    B = Mt.inverse() @ A @ Nt
    t = RationalFunction([1, (-x0) % F.p], None, F.p)
    a = B.entries
    out = LaurentMatrix(F, ((a[0][0], a[0][1].scale(t.inverse())),
                            (a[1][0].scale(t), a[1][1])))
    return out


@dataclass(frozen=True)
class JumpReport:
    generic_type: int
    types: dict = field(default_factory=dict)

    @property
    def jumps(self) -> dict:
        """x-value -> epsilon for every jumping fiber in the scan."""
        return {x: (bt - self.generic_type) // 2 for x, bt in self.types.items() if bt != self.generic_type}


def scan_fibers(A: LaurentMatrix, points: Optional[Iterable[int]] = None) -> JumpReport:
    F = A.F
    pts = range(F.p) if points is None else points
    types = {}
    for x0 in pts:
        if x0 % F.p in F.allowed_poles:
            continue
        types[x0] = fiber_type(A, x0)
    return JumpReport(generic_type(A), types)


def remove_all_jumps(A: LaurentMatrix, points: Optional[Iterable[int]] = None,
                     max_passes: int = 64) -> tuple[LaurentMatrix, int]:
    """Apply :func:`remove_jump` until no fiber in ``points`` jumps. Returns (A, passes)."""
    pts = list(range(A.F.p) if points is None else points)
    passes = 0
    while passes < max_passes:
        rep = scan_fibers(A, pts)
        if not rep.jumps:
            return A, passes
        x0 = min(rep.jumps)
        A = remove_jump(A, x0)
        passes += 1
    raise RuntimeError("jump removal did not terminate")


# ---------------------------------------------------------------------------
# planted instances

def _elementary_chain(F, rng: random.Random, sign: int, max_deg: int, steps: int) -> LaurentMatrix:
    """Random unimodular matrix over F[y] (sign=+1) or F[1/y] (sign=-1)."""
    X = LaurentMatrix.from_rows(F, [[rng.randrange(1, F.p), 0], [0, rng.randrange(1, F.p)]])
    for k in range(steps):
        deg = rng.randint(0, max_deg)
        poly = {sign * e: rng.randrange(F.p) for e in range(deg // 2, deg + 1)}
        if k % 2 == 0:
            E = LaurentMatrix.from_rows(F, [[1, poly], [0, 1]])
        else:
            E = LaurentMatrix.from_rows(F, [[1, 0], [poly, 1]])
        Y = X @ E
        if max(abs(e) for e in Y.exponents()) > max_deg:
            continue
        X = Y
    return X


def planted_split_instance(p: int, m: int, n: int, rng: random.Random,
                           max_deg: int = 6) -> tuple[LaurentMatrix, int, int]:
    """A = M diag(y^m, y^n) N^-1 with entries of M, N of degree <= max_deg."""
    F = PrimeField(p)
    M = _elementary_chain(F, rng, -1, max_deg, 4)
    N = _elementary_chain(F, rng, +1, max_deg, 4)
    A = M @ LaurentMatrix.diag(F, m, n) @ N.inverse()
    return A, m, n


def planted_jump_instance(p: int, b: int, eps: int, x0: int, rng: random.Random,
                          base: int = 0) -> LaurentMatrix:
    """Generic type b with a single jump of type b + 2*eps over x = x0."""
    F = RationalFunctionField(p)
    t = RationalFunction([1, (-x0) % p], None, p)
    M_ = b + 2 * eps
    c = rng.randrange(1, p)
    upper = {base + eps: t ** eps * c}
    # harmless extra terms: exponents <= base or >= base + M_
    for e in (base - rng.randint(0, 2), base + M_ + rng.randint(0, 2)):
        coeffs = [rng.randrange(p) for _ in range(rng.randint(1, 3))]
        upper[e] = F.add(upper.get(e, F.zero), RationalFunction(coeffs, None, p))
    core = LaurentMatrix.from_rows(F, [[{base + M_: 1}, LaurentPoly(F, upper)], [0, {base: 1}]])
    R = _lift(F, _elementary_chain(PrimeField(p), rng, -1, 3, 3))
    Rp = _lift(F, _elementary_chain(PrimeField(p), rng, +1, 3, 3))
    return R @ core @ Rp
