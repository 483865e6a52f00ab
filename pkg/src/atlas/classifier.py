"""Relative maximality, stiffness and automorphism-group facts for bundle descriptors.

Every verdict names the rule that produced it.  Rule identifiers are stable
strings such as ``"sl-times-a1-onto-a1"`` or ``"degree-obstruction"``.
Conditions quantified over all integers n are decided exactly through the
``divisor_class`` predicates.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from typing import Optional

from .bundle_data import SurfaceTag
from .divisor_class import INFINITE_ORDER, ClassElement
from .errors import OutOfUniverse, SideConditionViolated
from .link_engine import (A0, A1, TRIVIAL, ASbnD, Boundary, Dec, FiberProduct, IndecCP1, XA0b0,
                          available_links, canonical, describe, descriptor_key, descriptor_to_json)

__all__ = [
    "Verdict", "StiffnessReport", "AutDescriptor", "BirVerdict", "ConjugacyFamily",
    "classify", "stiffness", "bir_maximality", "aut_descriptor", "conjugacy_family", "witness_path",
]


@dataclass
class Verdict:
    relatively_maximal: bool
    rule: str
    case: Optional[str] = None              # positive family of the classification, if any
    side_conditions: dict = field(default_factory=dict)
    witness: list = field(default_factory=list)

    def to_json(self) -> dict:
        return {
            "relatively_maximal": self.relatively_maximal,
            "rule": self.rule,
            "case": self.case,
            "side_conditions": self.side_conditions,
            "witness_path": self.witness,
        }


# ---------------------------------------------------------------------------
# conjugacy families

class ConjugacyFamily:
    """A closed set of descriptors, all square-conjugate to each other."""

    def __init__(self, kind: str, anchor: tuple, name: str):
        self.kind = kind
        self.anchor = anchor
        self.name = name

    def __repr__(self):
        return f"ConjugacyFamily({self.name})"

    def contains(self, d) -> bool:
        d = canonical(d)
        k = self.kind
        if k == "single":
            return descriptor_key(d) == descriptor_key(self.anchor[0])
        if k == "a1-4n":
            (D,) = self.anchor
            Ds = D.group.Dsigma()
            if isinstance(d, FiberProduct) and d.base == A1 and d.other.kind == "SL":
                return _same_up_to_sign(d.other.L, D)
            if isinstance(d, Dec) and d.base == A1 and d.b % 4 == 0:
                return _same_up_to_sign(d.D + Ds * (d.b // 4), D)
            return False
        if k == "a1-4n+2":
            (D,) = self.anchor
            Ds = D.group.Dsigma()
            if isinstance(d, Dec) and d.base == A1 and d.b % 4 == 2:
                X = d.D + Ds * ((d.b - 2) // 4)
                return X == D or X == -D - Ds
            return False
        if k == "asbnd":
            (L,) = self.anchor
            if isinstance(d, FiberProduct) and d.other == A0 and d.base.kind == "SL":
                return _same_up_to_sign(d.base.L, L)
            if isinstance(d, ASbnD):
                return _same_up_to_sign(d.L, L)
            return False
        if k == "a0":
            (D,) = self.anchor
            if isinstance(d, FiberProduct) and d.base == A0 and d.other.kind == "SL":
                return _same_up_to_sign(d.other.L, D)
            if isinstance(d, Dec) and d.base == A0:
                return _same_up_to_sign(d.D, D)
            return False
        if k == "sl-sl":
            E, D = self.anchor
            if isinstance(d, FiberProduct) and d.base.kind == "SL" and d.other.kind == "SL":
                tag, Y = d.base.L, d.other.L
            elif isinstance(d, Dec) and d.base.kind == "SL":
                tag, Y = d.base.L, d.D
            else:
                return False
            if not _same_up_to_sign(tag, E):
                return False
            g = E.group
            return g.exists_n_trivial(Y - D, E) is not None or g.exists_n_trivial(Y + D, E) is not None
        raise ValueError(k)

    def members(self, radius: int) -> list:
        """Canonical members with parameters bounded by ``radius``, deduplicated."""
        k = self.kind
        out = []
        if k == "single":
            out = [self.anchor[0]]
        elif k in ("a1-4n", "a1-4n+2"):
            (D,) = self.anchor
            Ds = D.group.Dsigma()
            off = 0 if k == "a1-4n" else 2
            out = [Dec(A1, 4 * n + off, D - Ds * n) for n in range(-radius, radius + 1)]
        elif k == "asbnd":
            (L,) = self.anchor
            out = [ASbnD(L, b, n) for b in range(radius + 1) for n in range(b + 1)]
        elif k == "a0":
            (D,) = self.anchor
            out = [Dec(A0, b, D) for b in range(-radius, radius + 1)]
        elif k == "sl-sl":
            E, D = self.anchor
            S = SurfaceTag("SL", E)
            out = [Dec(S, b, D + E * n) for b in range(-radius, radius + 1) for n in range(-radius, radius + 1)]
        uniq = {}
        for m in out:
            uniq.setdefault(descriptor_key(m), canonical(m))
        return [uniq[key] for key in sorted(uniq)]

    def to_json(self) -> dict:
        return {"kind": self.kind, "description": self.name}


def _same_up_to_sign(a: ClassElement, b: ClassElement) -> bool:
    return a == b or a == -b


# ---------------------------------------------------------------------------
# classification

def _is_infinite(c: ClassElement) -> bool:
    return c.group.order_of(c) == INFINITE_ORDER


def _order_str(c: ClassElement) -> str:
    o = c.group.order_of(c)
    return "infinite" if o == INFINITE_ORDER else str(o)


def _tags(d):
    if isinstance(d, FiberProduct):
        return [d.base, d.other]
    if isinstance(d, Dec):
        return [d.base]
    if isinstance(d, IndecCP1):
        return [TRIVIAL]
    if isinstance(d, XA0b0):
        return [A0]
    if isinstance(d, ASbnD):
        return [SurfaceTag("SL", d.L)]
    raise OutOfUniverse(f"not a descriptor: {d!r}")


def _classify_higher_genus(d) -> Verdict:
    tags = _tags(d)
    if any(t.kind in ("A0", "A1") for t in tags) or isinstance(d, (XA0b0, ASbnD)):
        raise OutOfUniverse("Atiyah surfaces exist only over elliptic curves")
    base = d.base if isinstance(d, (FiberProduct, Dec)) else TRIVIAL
    if base != TRIVIAL:
        raise OutOfUniverse("in genus >= 2 only bundles over C x P1 are classified")
    if isinstance(d, FiberProduct) and d.other == TRIVIAL:
        return Verdict(True, "higher-genus-trivial-product", "higher-genus-trivial-product")
    return Verdict(False, "higher-genus-trivial-product")


def _classify_genus_one(d) -> Verdict:
    if isinstance(d, FiberProduct):
        base, other = d.base, d.other
        kinds = (base.kind, other.kind)
        if base == TRIVIAL or other == TRIVIAL:
            return Verdict(True, "product-with-P1", "product-with-P1")
        if kinds == ("A0", "A1"):
            return Verdict(True, "a0-times-a1-onto-a0", "a0-times-a1")
        if kinds == ("A1", "A0"):
            return Verdict(False, "a0-times-a1-onto-a1")
        if kinds == ("A1", "A1"):
            return Verdict(True, "a1-times-a1", "a1-times-a1")
        if kinds == ("A0", "A0"):
            return Verdict(False, "a0-times-a0")
        if kinds == ("SL", "A1"):
            return Verdict(True, "sl-times-a1-onto-sl", "sl-times-a1")
        if kinds == ("A1", "SL"):
            D = other.L
            tors = D.group.is_two_torsion(D)
            sc = {"D_two_torsion": tors}
            if tors:
                return Verdict(False, "sl-times-a1-two-torsion", None, sc)
            return Verdict(True, "sl-times-a1-onto-a1", "sl-times-a1", sc)
        if kinds == ("SL", "A0"):
            sc = {"order(D)": _order_str(base.L)}
            if _is_infinite(base.L):
                return Verdict(True, "sl-times-a0-onto-sl", "sl-times-a0", sc)
            return Verdict(False, "sl-times-a0-finite-order", None, sc)
        if kinds == ("A0", "SL"):
            return Verdict(True, "sl-times-a0-onto-a0", "sl-times-a0", {"order(D)": _order_str(other.L)})
        if kinds == ("SL", "SL"):
            E, D = base.L, other.L
            n = E.group.exists_n_trivial(D, E)
            sc = {"n_with_D_plus_nE_trivial": n}
            if n is not None:
                return Verdict(False, "sl-times-sl-relation", None, sc)
            return Verdict(True, "sl-times-sl", "sl-times-sl", sc)
        raise OutOfUniverse(f"fiber product {describe(d)} is not in the candidate list")

    if isinstance(d, Dec):
        b, D, base = d.b, d.D, d.base
        if base == A1:
            sc = {"b": b, "deg(D)": D.degree}
            if b % 2 or 4 * D.degree + 2 * b != 0:
                return Verdict(False, "degree-obstruction", None, sc)
            nontriv = D.group.is_nontrivial_2divisor(D)
            sc["nontrivial_2_divisor"] = nontriv
            if not nontriv:
                return Verdict(False, "a1-trivial-invariant", None, sc)
            case = "a1-two-divisor" if b % 4 == 2 else "sl-times-a1"
            return Verdict(True, "a1-two-divisor", case, sc)
        sc = {"b": b, "deg(D)": D.degree}
        if D.degree != 0:
            return Verdict(False, "degree-obstruction", None, sc)
        if base == TRIVIAL:
            return Verdict(True, "decomposable-over-CxP1", "decomposable-over-CxP1", sc)
        if base == A0:
            if D.is_trivial():
                return Verdict(False, "a0-untwisted", None, sc)
            return Verdict(True, "a0-twisted", "sl-times-a0", sc)
        if base.kind == "SL":
            n = D.group.exists_n_trivial(D, base.L)
            sc["n_with_D_plus_nE_trivial"] = n
            if n is not None:
                return Verdict(False, "sl-decomposable-relation", None, sc)
            return Verdict(True, "sl-decomposable", "sl-times-sl", sc)
    if isinstance(d, IndecCP1):
        return Verdict(False, "indecomposable-over-CxP1", None, {"b": d.b})
    if isinstance(d, XA0b0):
        return Verdict(False, "a0-indecomposable", None, {"b": d.b})
    if isinstance(d, ASbnD):
        sc = {"order(L)": _order_str(d.L)}
        if _is_infinite(d.L):
            return Verdict(True, "asbnd-infinite-order", "sl-times-a0", sc)
        return Verdict(False, "asbnd-torsion", None, sc)
    raise OutOfUniverse(f"not a descriptor: {d!r}")


def witness_path(d, max_depth: int = 8) -> list:
    """Shortest chain of links from ``d`` ending in a non-conjugating link, or []."""
    start = canonical(d)
    seen = {descriptor_key(start)}
    queue = deque([(start, [])])
    while queue:
        node, path = queue.popleft()
        if len(path) >= max_depth:
            continue
        try:
            links = available_links(node, witness=True)
        except SideConditionViolated:
            continue
        links = [(c, r) for c, r in links if r.link_type == "II" and not isinstance(r.target, Boundary)]
        for c, r in links:
            if not r.conjugates_full_group:
                return path + [_step(c, r)]
        for c, r in links:
            key = descriptor_key(r.target)
            if key not in seen:
                seen.add(key)
                queue.append((r.target, path + [_step(c, r)]))
    return []


def _step(choice, result) -> dict:
    return {
        "selector": choice.selector,
        "target": describe(result.target),
        "descriptor": descriptor_to_json(result.target),
        "conjugates_full_group": result.conjugates_full_group,
        "rule": result.rule,
    }


def classify(d, genus: int = 1) -> Verdict:
    """Whether Aut°(X) is relatively maximal for the bundle named by ``d``."""
    if genus < 1:
        raise OutOfUniverse("the base curve must have positive genus")
    d = canonical(d)
    if genus >= 2:
        return _classify_higher_genus(d)
    v = _classify_genus_one(d)
    if not v.relatively_maximal:
        v.witness = witness_path(d)
    return v


# ---------------------------------------------------------------------------
# stiffness

@dataclass
class StiffnessReport:
    status: str                      # Superstiff | NotStiff | NotApplicable
    family: Optional[ConjugacyFamily] = None
    rule: str = ""

    def to_json(self) -> dict:
        return {"status": self.status, "family": self.family.to_json() if self.family else None,
                "rule": self.rule}


def _family_of(d) -> Optional[ConjugacyFamily]:
    """Closed conjugacy family of a relatively maximal genus-one descriptor."""
    if isinstance(d, FiberProduct):
        base, other = d.base, d.other
        if base == A1 and other.kind == "SL":
            return _a1_family(other.L)
        if base.kind == "SL" and other == A0:
            return _asbnd_family(base.L)
        if base == A0 and other.kind == "SL":
            return _a0_family(other.L)
        if base.kind == "SL" and other.kind == "SL":
            return _sl_family(base.L, other.L)
        return None
    if isinstance(d, Dec):
        if d.base == A1:
            Ds = d.D.group.Dsigma()
            if d.b % 4 == 0:
                return _a1_family(d.D + Ds * (d.b // 4))
            X = d.D + Ds * ((d.b - 2) // 4)
            anchor = min(X, -X - Ds, key=lambda c: c.key())
            return ConjugacyFamily("a1-4n+2", (anchor,),
                                   f"{{Dec(A1, 4n+2, D - n*Dsigma) : n in Z}} with D = {anchor}")
        if d.base == A0:
            return _a0_family(d.D)
        if d.base.kind == "SL":
            return _sl_family(d.base.L, d.D)
        return None
    if isinstance(d, ASbnD):
        return _asbnd_family(d.L)
    return None


def _a1_family(D):
    D = min(D, -D, key=lambda c: c.key())
    return ConjugacyFamily("a1-4n", (D,), f"{{Dec(A1, 4n, D - n*Dsigma) : n in Z}} with D = {D}")


def _asbnd_family(L):
    L = min(L, -L, key=lambda c: c.key())
    return ConjugacyFamily("asbnd", (L,), f"{{ASbnD(L, b, n) : b >= 0, 0 <= n <= b}} with L = {L}")


def _a0_family(D):
    D = min(D, -D, key=lambda c: c.key())
    return ConjugacyFamily("a0", (D,), f"{{Dec(A0, b, D) : b in Z}} with D = {D}")


def _sl_family(E, D):
    E = min(E, -E, key=lambda c: c.key())
    return ConjugacyFamily("sl-sl", (E, D), f"{{Dec(SL(E), b, D + nE) : b, n in Z}} with E = {E}, D = {D}")


def stiffness(d, genus: int = 1) -> StiffnessReport:
    d = canonical(d)
    v = classify(d, genus)
    if not v.relatively_maximal:
        rule = "not-relatively-maximal"
        if v.rule == "sl-times-a0-finite-order":
            rule += "; finite-order D: this bundle is also on the not-maximal-in-Bir list"
        return StiffnessReport("NotApplicable", None, rule)
    if genus >= 2:
        return StiffnessReport("Superstiff", ConjugacyFamily("single", (d,), describe(d)), "higher-genus-superstiff")
    fam = _family_of(d)
    if fam is None:
        return StiffnessReport("Superstiff", ConjugacyFamily("single", (d,), describe(d)), f"{v.case}-superstiff")
    return StiffnessReport("NotStiff", fam, f"{v.case}-family")


def conjugacy_family(d, genus: int = 1) -> Optional[ConjugacyFamily]:
    try:
        return stiffness(d, genus).family
    except OutOfUniverse:
        return None


# ---------------------------------------------------------------------------
# maximality in Bir(X)

@dataclass
class BirVerdict:
    status: str                      # Maximal | NotMaximal | Open
    rule: str

    def to_json(self) -> dict:
        return {"status": self.status, "rule": self.rule}


def bir_maximality(d, genus: int = 1) -> BirVerdict:
    d = canonical(d)
    v = classify(d, genus)
    if not v.relatively_maximal:
        return BirVerdict("NotMaximal", "not-relatively-maximal")
    if genus >= 2:
        return BirVerdict("Maximal", "higher-genus-trivial-product")
    case = v.case
    if case in ("product-with-P1", "a1-times-a1", "sl-times-a1", "a1-two-divisor"):
        return BirVerdict("Maximal", f"bir-{case}")
    if case == "a0-times-a1":
        return BirVerdict("NotMaximal", "bir-a0-times-a1")
    if case == "decomposable-over-CxP1":
        if d.b == 1:
            return BirVerdict("Open", "bir-decomposable-over-CxP1-b1-open")
        return BirVerdict("Maximal", "bir-decomposable-over-CxP1")
    if case == "sl-times-a0":
        L = _sl_times_a0_class(d)
        if not _is_infinite(L):
            return BirVerdict("NotMaximal", "bir-sl-times-a0-finite-order")
        return BirVerdict("Open", "bir-sl-times-a0-open")
    if case == "sl-times-sl":
        E, D = (d.base.L, d.other.L) if isinstance(d, FiberProduct) else (d.base.L, d.D)
        if E.group.has_coprime_relation(D, E):
            return BirVerdict("NotMaximal", "bir-sl-times-sl-coprime-relation")
        return BirVerdict("Open", "bir-sl-times-sl-open")
    raise OutOfUniverse(f"no maximality rule for case {case!r}")


def _sl_times_a0_class(d) -> ClassElement:
    if isinstance(d, FiberProduct):
        return d.base.L if d.base.kind == "SL" else d.other.L
    if isinstance(d, ASbnD):
        return d.L
    return d.D


# ---------------------------------------------------------------------------
# automorphism groups

@dataclass
class AutDescriptor:
    dimension: Optional[int]
    kernel: Optional[str]
    image_of_pi_star: Optional[str]
    note: str = ""

    def to_json(self) -> dict:
        return {"dimension": self.dimension, "kernel": self.kernel,
                "image_of_pi_star": self.image_of_pi_star, "note": self.note}


_SURFACE_AUT = {
    "TrivialCP1": (4, "PGL2", "Aut°(S) = Aut°(C) x PGL2"),
    "A0": (2, "Ga", "0 -> Ga -> Aut°(S) -> Aut°(C) -> 0"),
    "A1": (1, "(Z/2)^2", "0 -> (Z/2)^2 -> Aut°(S) -> Aut°(C) -> 0"),
    "SL": (2, "Gm", "0 -> Gm -> Aut°(S) -> Aut°(C) -> 0"),
}


def aut_descriptor(d) -> AutDescriptor:
    """Dimension of Aut°, the kernel of the structure map on Aut°, and its image.

    For a ruled surface the structure map is tau_* onto Aut°(C); for a bundle
    over a surface it is pi_* onto Aut°(S).  Fields the available facts leave
    undetermined are None.
    """
    if isinstance(d, SurfaceTag):
        dim, ker, note = _SURFACE_AUT[d.kind]
        return AutDescriptor(dim, ker, "full", note)
    d = canonical(d)
    if isinstance(d, FiberProduct):
        d1, _, n1 = _SURFACE_AUT[d.base.kind]
        d2, k2, _ = _SURFACE_AUT[d.other.kind]
        return AutDescriptor(d1 + d2 - 1, k2, "full",
                             f"Aut°(X) = Aut°({d.base}) x_Aut°(C) Aut°({d.other}); ker pi_* = ker of {d.other} -> C")
    if isinstance(d, Dec) and d.base == TRIVIAL:
        if d.D.is_trivial():
            return AutDescriptor(d.b + 6, "product", "full",
                                 f"X = C x F_{d.b}; ker pi_* = Ga^{d.b + 1} x| Gm")
        return AutDescriptor(5, "Gm", "full", "pi_* surjective with kernel Gm")
    if isinstance(d, IndecCP1):
        return AutDescriptor(None, None, "AutC_times_proper_subgroup",
                             f"image Aut°(C) x G with G the stabilizer of the binary form g = {list(d.g)}; "
                             f"ker pi_* contains k[z0,z1]_{d.b} = Ga^{d.b + 1}")
    if isinstance(d, Dec) and d.base == A0 and not d.D.is_trivial() and d.D.degree == 0:
        return AutDescriptor(None, None, "full", "pi_* surjective over A0")
    if isinstance(d, Dec) and d.base.kind == "SL" and _is_infinite(d.base.L) and d.D.degree == 0:
        return AutDescriptor(None, None, "full", "pi_* surjective over P(O + L) with L of infinite order")
    if isinstance(d, ASbnD) and _is_infinite(d.L):
        return AutDescriptor(None, None, "full", "pi_* surjective over P(O + L) with L of infinite order")
    if isinstance(d, Dec) and d.base == A1 and d.D.group.is_nontrivial_2divisor(d.D) \
            and 4 * d.D.degree + 2 * d.b == 0:
        return AutDescriptor(None, None, "full", "pi_* surjective; the two sections S0, S1 are invariant")
    return AutDescriptor(None, None, None, "no automorphism facts recorded for this descriptor")
