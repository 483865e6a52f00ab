"""Two-chart transition data for F_b-bundles over ruled surfaces, and their normal forms.

Charts are ``U = C - S_U`` and ``V = C - S_V`` with disjoint finite sets of
rational points.  Going from the V-chart to the U-chart, the bundle is glued by

    (c, [y0 : y1 ; z0 : z1])  ->  (c, [y0 : lam*y1 + p(z)*y0 ; s(z)])

where ``p(z) = sum_k c_k z0^k z1^(b-k)`` and ``s`` is the transition of the
base surface: the identity for C x P1, ``[[1, 0], [xi, 1]]`` for A0 and
``diag(1, a)`` for P(O + L).  Changing the trivializations by
``y1 -> mu_u*y1 + q_u(z)*y0`` on U and ``mu_v, q_v`` on V replaces p with

    mu_u*p - mu_u*lam/mu_v * q_v + q_u(s z)

and lam with ``mu_u*lam/mu_v``.  The normalizers below reduce p with such
changes until only a canonical representative is left.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from functools import lru_cache
from typing import Optional, Sequence

from sympy import GF
from sympy.polys.matrices import DomainMatrix

from .divisor_class import (ClassElement, ClassGroup, Divisor, divisor_of, function_with_poles,
                            parse_point, principal_function, rr_basis)
from .errors import AtlasError, NoSuchFunction, OutOfFamily
from .field_tower import (INFINITY, CurvePoint, CurveSpec, FunctionFieldElement, RationalFunction,
                          local_expand, valuation)

__all__ = [
    "SurfaceTag", "Cover", "TransitionData", "DecForm", "IndecCP1", "IndecA0", "ASbnD",
    "BundleContext", "extract_invariants", "build_bundle", "normalize", "is_decomposable",
    "s_isomorphic", "fiber_product_decompose", "twist", "substitute_form", "projective_normalize",
    "TRIVIAL", "A0", "A1",
]


# ---------------------------------------------------------------------------
# tags and normal forms

_SEGRE = {"TrivialCP1": 0, "A0": 0, "A1": 1, "SL": 0}


@dataclass(frozen=True)
class SurfaceTag:
    kind: str
    L: Optional[ClassElement] = None

    def __post_init__(self):
        if self.kind not in _SEGRE:
            raise ValueError(f"unknown ruled surface {self.kind!r}")
        if self.kind == "SL":
            if self.L is None or self.L.degree != 0 or self.L.is_trivial():
                raise ValueError("SL needs a nontrivial class of degree zero")
        elif self.L is not None:
            raise ValueError(f"{self.kind} takes no class")

    @property
    def segre(self) -> int:
        return _SEGRE[self.kind]

    def __str__(self):
        return f"SL({self.L})" if self.kind == "SL" else self.kind


TRIVIAL = SurfaceTag("TrivialCP1")
A0 = SurfaceTag("A0")
A1 = SurfaceTag("A1")


@dataclass(frozen=True)
class DecForm:
    base: SurfaceTag
    b: int
    D: ClassElement


@dataclass(frozen=True)
class IndecCP1:
    b: int
    g: tuple

    def __post_init__(self):
        if not any(self.g):
            raise ValueError("the binary form g must be nonzero")
        if len(self.g) != self.b + 1:
            raise ValueError("g needs b + 1 coefficients")


@dataclass(frozen=True)
class IndecA0:
    b: int


@dataclass(frozen=True)
class ASbnD:
    L: ClassElement
    b: int
    n: int

    def __post_init__(self):
        if not 0 <= self.n <= self.b:
            raise ValueError("need 0 <= n <= b")


def projective_normalize(g: Sequence[int], p: int) -> tuple:
    """Scale so that the first nonzero coefficient is 1."""
    g = [int(c) % p for c in g]
    for c in g:
        if c:
            inv = pow(c, -1, p)
            return tuple(x * inv % p for x in g)
    raise ValueError("zero form")


# ---------------------------------------------------------------------------
# transition data

@dataclass(frozen=True)
class Cover:
    U_removed: tuple
    V_removed: tuple

    def __post_init__(self):
        object.__setattr__(self, "U_removed", tuple(sorted(set(self.U_removed))))
        object.__setattr__(self, "V_removed", tuple(sorted(set(self.V_removed))))
        if set(self.U_removed) & set(self.V_removed):
            raise ValueError("the two charts must cover the curve")
        if not self.U_removed or not self.V_removed:
            raise ValueError("each chart must omit at least one point")

    @property
    def bad_points(self) -> tuple:
        return tuple(sorted(self.U_removed + self.V_removed))


@dataclass(frozen=True)
class TransitionData:
    curve: CurveSpec
    base: SurfaceTag
    b: int
    cover: Cover
    lam: FunctionFieldElement
    form: tuple
    s21: Optional[FunctionFieldElement] = None   # lower-left entry of s (A0)
    s22: Optional[FunctionFieldElement] = None   # lower-right entry of s (SL)

    def __post_init__(self):
        if self.b < 0:
            raise ValueError("b must be >= 0")
        if len(self.form) != self.b + 1:
            raise ValueError("the form needs b + 1 coefficients")
        if self.base.kind == "A0" and self.s21 is None:
            raise ValueError("A0 data needs the entry xi of s")
        if self.base.kind == "SL" and self.s22 is None:
            raise ValueError("SL data needs the cocycle a of s")
        if self.base.kind == "A1":
            raise OutOfFamily("A1-based bundles are handled at the descriptor level only")

    def check_regularity(self) -> bool:
        pts = [P for P in self.curve.points() if P not in self.cover.bad_points]
        funcs = [c for c in self.form if not c.is_zero()]
        funcs += [x for x in (self.s21, self.s22) if x is not None and not x.is_zero()]
        for P in pts:
            if valuation(self.lam, P) != 0:
                return False
            if any(valuation(f, P) < 0 for f in funcs):
                return False
            if self.s22 is not None and valuation(self.s22, P) != 0:
                return False
        return True

    def to_json(self) -> dict:
        out = {
            "curve": self.curve.to_json(),
            "base": self.base.kind,
            "b": self.b,
            "cover": {"U_removed": [str(P) for P in self.cover.U_removed],
                      "V_removed": [str(P) for P in self.cover.V_removed]},
            "lambda": self.lam.to_json(),
            "form": [c.to_json() for c in self.form],
        }
        if self.s21 is not None:
            out["s21"] = self.s21.to_json()
        if self.s22 is not None:
            out["s22"] = self.s22.to_json()
        return out

    @classmethod
    def from_json(cls, data: dict, curve: CurveSpec, group: Optional[ClassGroup] = None) -> "TransitionData":
        if "curve" in data:
            curve = CurveSpec.from_json(data["curve"])
        cover = Cover(tuple(parse_point(s, curve) for s in data["cover"]["U_removed"]),
                      tuple(parse_point(s, curve) for s in data["cover"]["V_removed"]))
        el = lambda obj: FunctionFieldElement.from_json(curve, obj)
        kind = data["base"] if isinstance(data["base"], str) else data["base"]["kind"]
        s21 = el(data["s21"]) if "s21" in data else None
        s22 = el(data["s22"]) if "s22" in data else None
        if kind == "SL":
            if s22 is None:
                raise ValueError("SL data needs s22")
            group = group or ClassGroup("concrete", curve)
            base = SurfaceTag("SL", _class_of_cocycle(curve, group, s22, cover))
        else:
            base = SurfaceTag(kind)
        return cls(curve, base, int(data["b"]), cover, el(data["lambda"]),
                   tuple(el(c) for c in data["form"]), s21, s22)


def _class_of_cocycle(curve, group, lam, cover) -> ClassElement:
    D = divisor_of(lam)
    part = Divisor(tuple((P, m) for P, m in D.terms if P in cover.V_removed))
    if any(P not in cover.bad_points for P in D.support):
        raise AtlasError("cocycle has zeros or poles on the overlap")
    return group.class_of(part)


def extract_invariants(td: TransitionData, group: Optional[ClassGroup] = None):
    group = group or ClassGroup("concrete", td.curve)
    return td.base, td.b, _class_of_cocycle(td.curve, group, td.lam, td.cover)


# ---------------------------------------------------------------------------
# constructions

class BundleContext:
    """Deterministic point choices and cached auxiliary functions on one curve."""

    def __init__(self, curve: CurveSpec, group: Optional[ClassGroup] = None):
        self.curve = curve
        self.group = group or ClassGroup("concrete", curve)
        affine = [P for P in curve.points() if not P.is_infinity]
        ordinary = [P for P in affine if P.y != 0]
        if not ordinary:
            raise AtlasError("curve has too few points")
        self.p_point = ordinary[0]

    def point_class(self, R: CurvePoint) -> ClassElement:
        return self.group.element(0, R)

    def fresh_points(self, avoid, count):
        out = []
        for P in self.curve.points():
            if P in avoid or P in out:
                continue
            out.append(P)
            if len(out) == count:
                return out
        raise AtlasError("not enough rational points")

    def line_cocycle(self, D: ClassElement, avoid) -> tuple:
        """(U points, V points, lam) with lam a unit off those points and class D."""
        if D.degree != 0:
            raise OutOfFamily("only degree-zero classes have two-chart cocycles here")
        if D.is_trivial():
            return (), (), self.curve.const(1)
        R = D.cl0
        C = self.curve
        for T in C.points():
            RT = C.add(R, T)
            if len({RT, T}) < 2 or {RT, T} & set(avoid):
                continue
            for T2 in C.points():
                RT2 = C.add(R, T2)
                pts = {RT, T, RT2, T2}
                if len(pts) < 4 or pts & set(avoid):
                    continue
                E = Divisor.of((RT, 1), (T, -1), (RT2, -1), (T2, 1))
                lam = principal_function(C, E).element()
                return (RT2, T2), (RT, T), lam
        raise AtlasError("could not place a cocycle for the class")


@lru_cache(maxsize=2048)
def _poles_function(curve: CurveSpec, pts: tuple) -> FunctionFieldElement:
    return function_with_poles(curve, Divisor(pts))


def _xi(curve, p_u, p_v) -> FunctionFieldElement:
    return _poles_function(curve, ((p_u, 1), (p_v, 1)))


def build_bundle(nf, ctx: BundleContext) -> TransitionData:
    C = ctx.curve
    zero, one = C.const(0), C.const(1)
    p, O = ctx.p_point, INFINITY
    if isinstance(nf, IndecCP1):
        xi = _xi(C, p, O)
        form = tuple(xi * int(g) for g in nf.g)
        return TransitionData(C, TRIVIAL, nf.b, Cover((p,), (O,)), one, form)
    if isinstance(nf, IndecA0):
        xi = _xi(C, p, O)
        form = (xi,) + (zero,) * nf.b
        return TransitionData(C, A0, nf.b, Cover((p,), (O,)), one, form, s21=xi)
    if isinstance(nf, DecForm):
        if nf.b < 0:
            raise ValueError("use b >= 0")
        base = nf.base
        if base.kind == "A1":
            raise OutOfFamily("no concrete transition data over A1")
        U, V = [p], [O]
        extra = {}
        if base.kind == "A0":
            extra["s21"] = _xi(C, p, O)
        if base.kind == "SL":
            Ua, Va, a = ctx.line_cocycle(base.L, U + V)
            U += Ua
            V += Va
            extra["s22"] = a
        Ud, Vd, lam = ctx.line_cocycle(nf.D, U + V)
        U += Ud
        V += Vd
        return TransitionData(C, base, nf.b, Cover(tuple(U), tuple(V)), lam, (zero,) * (nf.b + 1), **extra)
    if isinstance(nf, ASbnD):
        Ua, Va, a = ctx.line_cocycle(nf.L, [p, O])
        U, V = (p,) + tuple(Ua), (O,) + tuple(Va)
        xi = _xi(C, p, O)
        lam = a ** nf.n
        form = [zero] * (nf.b + 1)
        form[nf.b - nf.n] = lam * xi
        return TransitionData(C, SurfaceTag("SL", nf.L), nf.b, Cover(U, V), lam, tuple(form), s22=a)
    raise TypeError(f"cannot build bundle data from {nf!r}")


# ---------------------------------------------------------------------------
# coboundary action

def _binom(n, k):
    return math.comb(n, k) if 0 <= k <= n else 0


def _apply(td: TransitionData, mu_u=None, mu_v=None, q_u=None, q_v=None) -> TransitionData:
    """Apply the change of trivializations (mu_u, q_u) on U and (mu_v, q_v) on V."""
    C = td.curve
    b = td.b
    one, zero = C.const(1), C.const(0)
    mu_u = one if mu_u is None else mu_u
    mu_v = one if mu_v is None else mu_v
    q_u = [zero] * (b + 1) if q_u is None else list(q_u)
    q_v = [zero] * (b + 1) if q_v is None else list(q_v)
    lam2 = mu_u * td.lam / mu_v
    new = [mu_u * c - lam2 * qv for c, qv in zip(td.form, q_v)]
    # q_u(s z)
    for k in range(b + 1):
        q = q_u[k]
        if q.is_zero():
            continue
        if td.base.kind == "A0":
            # z0^k (xi z0 + z1)^(b-k)
            for t in range(b - k + 1):
                new[k + t] = new[k + t] + q * td.s21 ** t * _binom(b - k, t)
        elif td.base.kind == "SL":
            new[k] = new[k] + q * td.s22 ** (b - k)
        else:
            new[k] = new[k] + q
    return replace(td, lam=lam2, form=tuple(new))


def twist(td: TransitionData, mu_u=None, mu_v=None, q_u=None, q_v=None) -> TransitionData:
    """Public version of the coboundary action; the result is S-isomorphic to ``td``."""
    return _apply(td, mu_u, mu_v, q_u, q_v)


def substitute_form(td: TransitionData, mat) -> TransitionData:
    """Replace p(z0, z1) with p(a z0 + b z1, c z0 + d z1) (C x P1 base only)."""
    if td.base.kind != "TrivialCP1":
        raise OutOfFamily("substitution only for the trivial base")
    (a, b_), (c, d) = mat
    deg = td.b
    C = td.curve
    pmod = C.p
    # expand (a z0 + b z1)^k (c z0 + d z1)^(deg-k) into coefficients of z0^j z1^(deg-j)
    new = [C.const(0)] * (deg + 1)
    for k, coeff in enumerate(td.form):
        if coeff.is_zero():
            continue
        poly = [1]  # coefficients in z0 power
        for _ in range(k):
            poly = _mul_lin(poly, a, b_, pmod)
        for _ in range(deg - k):
            poly = _mul_lin(poly, c, d, pmod)
        for j, w in enumerate(poly):
            if w:
                new[j] = new[j] + coeff * w
    return replace(td, form=tuple(new))


def _mul_lin(poly, a, b, p):
    # poly[j] is the coefficient of z0^j; multiply by (a z0 + b z1)
    out = [0] * (len(poly) + 1)
    for j, w in enumerate(poly):
        out[j + 1] = (out[j + 1] + w * a) % p
        out[j] = (out[j] + w * b) % p
    return out


# ---------------------------------------------------------------------------
# pole reduction for a cocycle of trivial class

def _lead(f: FunctionFieldElement, P: CurvePoint) -> tuple[int, int]:
    e = local_expand(f, P, 1)
    return e.valuation, e.coefficients[0]


def _reduction_step(c: FunctionFieldElement, cover: Cover, p_u, p_v):
    """One pole-lowering move for c modulo O(U) + O(V).

    Returns ``None`` when c has at most simple poles at p_u and p_v, otherwise
    ``(side, f)``: adding ``f`` on the U side (``c + f``) or subtracting it on
    the V side (``c - f``) lowers the pole multiplicity.
    """
    if c.is_zero():
        return None
    C = c.curve
    for side, pts, special in (("u", cover.U_removed, p_u), ("v", cover.V_removed, p_v)):
        for z in pts:
            if z == special:
                continue
            v, lc = _lead(c, z)
            if v >= 0:
                continue
            n = -v
            f = _poles_function(C, ((z, 1), (special, 1))) ** n
            _, lf = _lead(f, z)
            return side, f * (lc * pow(lf, -1, C.p) % C.p)
        v, lc = _lead(c, special)
        if v <= -2:
            n = -v
            f = _poles_function(C, ((special, n),))
            _, lf = _lead(f, special)
            return side, f * (lc * pow(lf, -1, C.p) % C.p)
    return None


def _reduce_trivial(c: FunctionFieldElement, cover: Cover, p_u, p_v, max_steps=10_000):
    """Reduce c, a cocycle for the trivial line bundle, to alpha*xi + beta.

    Returns (alpha, beta, sum of U-side corrections, sum of V-side corrections)
    with ``c + Qu - Qv = alpha*xi + beta``.
    """
    C = c.curve
    Qu, Qv = C.const(0), C.const(0)
    for _ in range(max_steps):
        step = _reduction_step(c, cover, p_u, p_v)
        if step is None:
            break
        side, f = step
        if side == "u":
            c, Qu = c - f, Qu - f
        else:
            c, Qv = c - f, Qv + f
    else:
        raise AtlasError("pole reduction did not terminate")
    alpha, beta = _split_alpha_beta(c, p_u, p_v)
    return alpha, beta, Qu, Qv


def _split_alpha_beta(c, p_u, p_v):
    C = c.curve
    if c.is_zero():
        return 0, 0
    xi = _xi(C, p_u, p_v)
    v, lc = _lead(c, p_u)
    alpha = 0
    if v == -1:
        _, lx = _lead(xi, p_u)
        alpha = lc * pow(lx, -1, C.p) % C.p
    rest = c - xi * alpha
    if not rest.is_constant():
        raise AtlasError("reduced cocycle is not in L(p_u + p_v)")
    beta = rest.u.constant_value() if not rest.is_zero() else 0
    return alpha, beta


def _gauge_to_one(td: TransitionData, group: ClassGroup, lam: FunctionFieldElement):
    """(mu_u, mu_v) with mu_u*lam/mu_v = 1 when lam has trivial class."""
    C = td.curve
    D = divisor_of(lam)
    EV = Divisor(tuple((P, m) for P, m in D.terms if P in td.cover.V_removed))
    if not group.class_of(EV).is_trivial():
        raise AtlasError("cocycle class is not trivial")
    h = principal_function(C, EV).element()
    return h / lam, h


# ---------------------------------------------------------------------------
# linear algebra for classes with vanishing H^1

def _solve_mod_p(rows, rhs, p):
    if not rows:
        return None
    K = GF(p)
    ncols = len(rows[0])
    aug = DomainMatrix([[K(v) for v in r] + [K(b)] for r, b in zip(rows, rhs)], (len(rows), ncols + 1), K)
    R, pivots = aug.rref()
    if ncols in pivots:
        return None
    sol = [0] * ncols
    Rl = R.to_list()
    for i, j in enumerate(pivots):
        sol[j] = int(Rl[i][ncols]) % p
    return sol


def _coeff_vector(funcs, p):
    """Coefficient vectors of u and v over a common denominator."""
    from sympy.polys import galoistools as gt
    from sympy.polys.domains import ZZ
    den = [1]
    for f in funcs:
        for r in (f.u, f.v):
            g = gt.gf_gcd(den, list(r.den), p, ZZ)
            den = gt.gf_quo(gt.gf_mul(den, list(r.den), p, ZZ), g, p, ZZ)
    vecs = []
    for f in funcs:
        parts = []
        for r in (f.u, f.v):
            q = gt.gf_quo(den, list(r.den), p, ZZ)
            parts.append([int(c) for c in gt.gf_mul(q, list(r.num), p, ZZ)])
        vecs.append(parts)
    width = [max(len(v[i]) for v in vecs) for i in range(2)]
    out = []
    for v in vecs:
        row = []
        for i in range(2):
            row += [0] * (width[i] - len(v[i])) + v[i]
        out.append(row)
    return out


def _kill_nontrivial(c: FunctionFieldElement, Lam: FunctionFieldElement, cover: Cover,
                     max_order: int = 12):
    """Find q_u in O(U), q_v in O(V) with c = Lam*q_v - q_u (trivial H^1)."""
    C = c.curve
    if c.is_zero():
        return C.const(0), C.const(0)
    start = 1 + max(0, max(-valuation(c, P) for P in cover.bad_points))
    for N in range(start, max_order + 1):
        Bu = rr_basis(C, Divisor(tuple((P, N) for P in cover.U_removed)), verify=False).basis
        Bv = rr_basis(C, Divisor(tuple((P, N) for P in cover.V_removed)), verify=False).basis
        cols = [Lam * f for f in Bv] + [-f for f in Bu]
        vecs = _coeff_vector(cols + [c], C.p)
        target = vecs[-1]
        rows = [[vecs[j][i] for j in range(len(cols))] for i in range(len(target))]
        sol = _solve_mod_p(rows, target, C.p)
        if sol is None:
            continue
        q_v = C.const(0)
        q_u = C.const(0)
        for w, f in zip(sol[: len(Bv)], Bv):
            q_v = q_v + f * w
        for w, f in zip(sol[len(Bv):], Bu):
            q_u = q_u + f * w
        if c != Lam * q_v - q_u:
            raise AtlasError("linear solve produced a wrong coboundary")
        return q_u, q_v
    raise OutOfFamily("no coboundary found within the pole bound")


# ---------------------------------------------------------------------------
# normalization

def _special_points(td: TransitionData):
    """Distinguished points p_u in S_U and p_v in S_V."""
    if td.base.kind == "A0":
        D = divisor_of(td.s21)
        poles = [P for P, m in D.terms if m < 0]
        pu = [P for P in poles if P in td.cover.U_removed]
        pv = [P for P in poles if P in td.cover.V_removed]
        if len(pu) != 1 or len(pv) != 1:
            raise OutOfFamily("A0 transition entry must have one simple pole in each removed set")
        return pu[0], pv[0]
    return td.cover.U_removed[0], td.cover.V_removed[0]


def normalize(td: TransitionData, group: Optional[ClassGroup] = None):
    """Canonical representative of the S-isomorphism class of ``td``."""
    group = group or ClassGroup("concrete", td.curve)
    base, b, D = extract_invariants(td, group)
    if D.degree != 0:
        raise OutOfFamily("only invariants of degree zero are normalized")
    kind = base.kind
    if b == 0:
        second = fiber_product_decompose(td, group)[1]
        if second.kind == "TrivialCP1":
            return DecForm(base, 0, D)
        if kind == "TrivialCP1" and second.kind == "A0":
            return IndecCP1(0, (1,))
        if kind == "A0" and second.kind == "A0":
            return IndecA0(0)
        if kind == "SL" and second.kind == "A0":
            return ASbnD(base.L, 0, 0)
        if second.kind == "SL":
            return DecForm(base, 0, D)
        raise OutOfFamily(f"b = 0 over {base} with factor {second}")
    if kind == "TrivialCP1":
        if D.is_trivial():
            alphas = _normalize_trivial_base(td, group)
            if any(alphas):
                return IndecCP1(b, projective_normalize(alphas, td.curve.p))
            return DecForm(base, b, D)
        _verify_decomposable(td, group)
        return DecForm(base, b, D)
    if kind == "A0":
        if not D.is_trivial():
            raise OutOfFamily("A0 base with a nontrivial class is not normalized concretely")
        if td.curve.p <= b:
            raise OutOfFamily("A0 reduction needs p > b")
        a0 = _normalize_A0(td, group)
        return IndecA0(b) if a0 else DecForm(base, b, D)
    if kind == "SL":
        return _normalize_SL(td, group)
    raise OutOfFamily(f"no normalizer for base {kind}")


def _normalize_trivial_base(td, group) -> list[int]:
    mu_u, mu_v = _gauge_to_one(td, group, td.lam)
    td = _apply(td, mu_u=mu_u, mu_v=mu_v)
    p_u, p_v = _special_points(td)
    return [_reduce_trivial(c, td.cover, p_u, p_v)[0] for c in td.form]


def _verify_decomposable(td, group):
    for c in td.form:
        q_u, q_v = _kill_nontrivial(c, td.lam, td.cover)
        # c - lam*q_v + q_u == 0 is the coboundary condition
        if not (c - td.lam * q_v + q_u).is_zero():
            raise AtlasError("form did not reduce to zero")


def _normalize_A0(td, group) -> int:
    """Iterative A0 reduction; returns the surviving coefficient a_0 (0 or nonzero)."""
    mu_u, mu_v = _gauge_to_one(td, group, td.lam)
    td = _apply(td, mu_u=mu_u, mu_v=mu_v)
    C = td.curve
    b = td.b
    p_u, p_v = _special_points(td)
    zero = C.const(0)
    alpha0 = 0
    for k in range(b + 1):
        while True:
            step = _reduction_step(td.form[k], td.cover, p_u, p_v)
            if step is None:
                break
            side, f = step
            q = [zero] * (b + 1)
            q[k] = -f if side == "u" else f
            td = _apply(td, q_u=q) if side == "u" else _apply(td, q_v=q)
        alpha, beta = _split_alpha_beta(td.form[k], p_u, p_v)
        if beta:
            q = [zero] * (b + 1)
            q[k] = C.const(-beta)
            td = _apply(td, q_u=q)
        if k == 0:
            alpha0 = alpha
            continue
        if alpha:
            gamma = C.const(-alpha * pow(b - k + 1, -1, C.p) % C.p)
            q = [zero] * (b + 1)
            q[k - 1] = gamma
            td = _apply(td, q_u=q, q_v=q)
        if not td.form[k].is_zero():
            raise AtlasError(f"coefficient {k} did not vanish")
    return alpha0


def _normalize_SL(td, group):
    C = td.curve
    b = td.b
    L = td.base.L
    _, _, D = extract_invariants(td, group)
    a = td.s22
    trivial_ks = [k for k in range(b + 1) if (D - L * (b - k)).is_trivial()]
    if len(trivial_ks) > 1:
        raise OutOfFamily("several coefficients carry a trivial class (torsion L)")
    survivor = None
    for k in range(b + 1):
        c = td.form[k]
        Lam = td.lam * a ** (-(b - k))
        ct = c * a ** (-(b - k))
        if k in trivial_ks:
            nu_u, _ = _gauge_to_one(td, group, Lam)
            p_u, p_v = _special_points(td)
            alpha, _, _, _ = _reduce_trivial(nu_u * ct, td.cover, p_u, p_v)
            survivor = (k, alpha)
        else:
            q_u, q_v = _kill_nontrivial(ct, Lam, td.cover)
            if not (ct - Lam * q_v + q_u).is_zero():
                raise AtlasError("coefficient did not reduce to zero")
    if survivor and survivor[1]:
        return ASbnD(L, b, b - survivor[0])
    return DecForm(td.base, b, D)


def is_decomposable(td: TransitionData, group: Optional[ClassGroup] = None) -> bool:
    return isinstance(normalize(td, group), DecForm)


def s_isomorphic(td1: TransitionData, td2: TransitionData, group: Optional[ClassGroup] = None) -> bool:
    if td1.base != td2.base:
        raise OutOfFamily("different base surfaces")
    if td1.b != td2.b:
        return False
    return normalize(td1, group) == normalize(td2, group)


def fiber_product_decompose(td: TransitionData, group: Optional[ClassGroup] = None):
    """For b = 0, identify the second ruled surface S' with X = S x_C S'."""
    if td.b != 0:
        raise ValueError("fiber products need b = 0")
    group = group or ClassGroup("concrete", td.curve)
    _, _, D = extract_invariants(td, group)
    if not D.is_trivial():
        if D.degree != 0:
            raise OutOfFamily("second factor would have a class of nonzero degree")
        return td.base, SurfaceTag("SL", D)
    mu_u, mu_v = _gauge_to_one(td, group, td.lam)
    td = _apply(td, mu_u=mu_u, mu_v=mu_v)
    p_u, p_v = _special_points(td)
    alpha = _reduce_trivial(td.form[0], td.cover, p_u, p_v)[0]
    return td.base, (A0 if alpha else TRIVIAL)
