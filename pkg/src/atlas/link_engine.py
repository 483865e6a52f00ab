"""Descriptors of P1-bundles over ruled surfaces and the Sarkisov links between them.

A descriptor is a symbolic name for a bundle: the base surface, the generic
fiber type ``b`` and divisor-class data.  ``available_links`` returns every
equivariant link that leaves a descriptor, ``enumerate_orbit`` walks the
conjugating ones breadth-first, and ``is_conjugate`` combines that walk with
the closed conjugacy families known for relatively maximal bundles.

Fiber products are stored with the base of the projection first, so
``FiberProduct(A1, SL(D))`` is fibred over A1.
"""

from __future__ import annotations

import random
from collections import deque
from dataclasses import dataclass
from typing import Optional, Union

from sympy.polys.domains import ZZ
from sympy.polys.galoistools import gf_from_int_poly, gf_sqf_part, gf_degree

from .bundle_data import A0, A1, TRIVIAL, SurfaceTag, projective_normalize
from . import bundle_data
from .divisor_class import INFINITE_ORDER, ClassElement, ClassGroup
from .errors import InvalidChoice, SideConditionViolated
from .field_tower import poly_roots

__all__ = [
    "FiberProduct", "Dec", "IndecCP1", "XA0b0", "ASbnD", "Boundary", "LinkChoice", "LinkResult",
    "Descriptor", "OrbitGraph", "ConjugacyAnswer", "canonical", "canonical_tag", "descriptor_key",
    "available_links", "apply_link", "enumerate_orbit", "is_conjugate", "descriptor_from_json",
    "descriptor_to_json", "tag_from_json", "tag_to_json", "from_normal_form", "describe",
    "TRIVIAL", "A0", "A1", "SurfaceTag", "set_default_group", "default_group",
]


# ---------------------------------------------------------------------------
# descriptors

@dataclass(frozen=True)
class FiberProduct:
    """S_base x_C S_other, fibred over S_base."""

    base: SurfaceTag
    other: SurfaceTag
    family = "FiberProduct"


@dataclass(frozen=True)
class Dec:
    """The decomposable bundle P(O + O(b*sigma + tau^*D)) over ``base``."""

    base: SurfaceTag
    b: int
    D: ClassElement
    family = "Dec"


@dataclass(frozen=True)
class IndecCP1:
    """Indecomposable bundle over C x P1 with invariants (C x P1, b, 0) and form g.

    ``g[k]`` is the coefficient of z0^k z1^(b-k); the form matters up to a scalar mod p.
    """

    b: int
    g: tuple
    p: int = 101
    family = "IndecCP1"

    def __post_init__(self):
        object.__setattr__(self, "g", tuple(int(c) % self.p for c in self.g))
        if self.b < 1:
            raise ValueError("IndecCP1 needs b >= 1")
        if len(self.g) != self.b + 1:
            raise ValueError("g needs b + 1 coefficients")
        if not any(self.g):
            raise ValueError("the binary form g must be nonzero")


@dataclass(frozen=True)
class XA0b0:
    """The indecomposable bundle over A0 with invariants (A0, b, 0)."""

    b: int
    family = "XA0b0"

    def __post_init__(self):
        if self.b < 1:
            raise ValueError("XA0b0 needs b >= 1")


@dataclass(frozen=True)
class ASbnD:
    """The bundle A_(S, b, nL) over S = P(O + O(L)).

    The SL factor class is ``L`` itself, exposed also as ``D``.
    """

    L: ClassElement
    b: int
    n: int
    family = "ASbnD"

    def __post_init__(self):
        if self.b < 0 or not 0 <= self.n <= self.b:
            raise ValueError("need b >= 0 and 0 <= n <= b")
        if self.L.degree != 0 or self.L.is_trivial():
            raise ValueError("L must be a nontrivial class of degree zero")

    @property
    def D(self) -> ClassElement:
        return self.L


Descriptor = Union[FiberProduct, Dec, IndecCP1, XA0b0, ASbnD]


@dataclass(frozen=True)
class Boundary:
    kind: str = "P2-bundle"


@dataclass(frozen=True)
class LinkChoice:
    selector: str

    def to_json(self):
        return {"selector": self.selector}


@dataclass(frozen=True)
class LinkResult:
    target: Union[Descriptor, Boundary]
    conjugates_full_group: bool
    link_type: str
    rule: str


# ---------------------------------------------------------------------------
# canonical forms

def _class_min(c: ClassElement) -> ClassElement:
    return min(c, -c, key=lambda x: x.key())


def canonical_tag(tag: SurfaceTag) -> SurfaceTag:
    if tag.kind == "SL":
        return SurfaceTag("SL", _class_min(tag.L))
    return tag


def _tag_key(tag: SurfaceTag) -> tuple:
    tag = canonical_tag(tag)
    return (tag.kind, tag.L.key() if tag.L is not None else ())


def _class_tag(D: ClassElement) -> SurfaceTag:
    return TRIVIAL if D.is_trivial() else SurfaceTag("SL", D)


def canonical(d: Descriptor) -> Descriptor:
    """The representative used for deduplication."""
    if isinstance(d, FiberProduct):
        return FiberProduct(canonical_tag(d.base), canonical_tag(d.other))
    if isinstance(d, Dec):
        base, b, D = d.base, d.b, d.D
        if b < 0:
            b, D = -b, -D
        if b == 0 and D.degree == 0:
            return FiberProduct(canonical_tag(base), canonical_tag(_class_tag(D)))
        if base.kind == "SL":
            E = base.L
            if (-E).key() < E.key():
                base, D = SurfaceTag("SL", -E), D - E * b
        return Dec(base, b, D)
    if isinstance(d, IndecCP1):
        return IndecCP1(d.b, projective_normalize(d.g, d.p), d.p)
    if isinstance(d, XA0b0):
        return d
    if isinstance(d, ASbnD):
        if d.b == 0:
            return FiberProduct(canonical_tag(SurfaceTag("SL", d.L)), A0)
        if (-d.L).key() < d.L.key():
            return ASbnD(-d.L, d.b, d.b - d.n)
        return d
    raise TypeError(f"not a descriptor: {d!r}")


def _working_form(d: Descriptor) -> Descriptor:
    """Like ``canonical`` but keeps the caller's sign of every SL class.

    Selectors such as ``omega-S0`` or ``l01`` name curves relative to that
    frame, so the tables are evaluated before the frame is normalized.
    """
    if isinstance(d, Dec):
        b, D = d.b, d.D
        if b < 0:
            b, D = -b, -D
        if b == 0 and D.degree == 0:
            return FiberProduct(d.base, _class_tag(D))
        return Dec(d.base, b, D)
    if isinstance(d, IndecCP1):
        return canonical(d)
    if isinstance(d, ASbnD) and d.b == 0:
        return FiberProduct(SurfaceTag("SL", d.L), A0)
    return d


def descriptor_key(d: Descriptor) -> tuple:
    c = canonical(d)
    if isinstance(c, FiberProduct):
        return ("FiberProduct", _tag_key(c.base), _tag_key(c.other))
    if isinstance(c, Dec):
        return ("Dec", _tag_key(c.base), c.b, c.D.key())
    if isinstance(c, IndecCP1):
        return ("IndecCP1", c.b, c.g, c.p)
    if isinstance(c, XA0b0):
        return ("XA0b0", c.b)
    return ("ASbnD", c.b, c.n, c.L.key())


def describe(d) -> str:
    if isinstance(d, Boundary):
        return d.kind
    if isinstance(d, FiberProduct):
        return f"{d.base} x {d.other} -> {d.base}"
    if isinstance(d, Dec):
        return f"Dec({d.base}, b={d.b}, D={d.D})"
    if isinstance(d, IndecCP1):
        return f"IndecCP1(b={d.b}, g={list(d.g)})"
    if isinstance(d, XA0b0):
        return f"XA0b0(b={d.b})"
    return f"ASbnD(L={d.L}, b={d.b}, n={d.n})"


# ---------------------------------------------------------------------------
# link tables

def _link(selector, target, conj, link_type, rule):
    if not isinstance(target, Boundary):
        target = canonical(target)
    return (LinkChoice(selector), LinkResult(target, conj, link_type, rule))


def _boundary_links(d: Descriptor) -> list:
    """Type III and IV diagrams, which only depend on the generic fiber type."""
    if isinstance(d, FiberProduct):
        return [_link("swap", FiberProduct(d.other, d.base), True, "IV", "fiber-swap")]
    if getattr(d, "b", None) == 1:
        return [_link("contract", Boundary(), False, "III", "p2-contraction")]
    return []


def _a1_rows(b: int, D: ClassElement, conj: bool, rule: str) -> list:
    Ds = D.group.Dsigma()
    return [
        _link("omega-S0", Dec(A1, b + 4, D - Ds), conj, "II", rule),
        _link("omega-S1", Dec(A1, b - 4, D + Ds), conj, "II", rule),
    ]


def _sl_rows(E: ClassElement, b: int, Dp: ClassElement, witness_flags: bool) -> list:
    def flag(c):
        return not c.is_trivial() if witness_flags else True
    S = SurfaceTag("SL", E)
    rule = "sl-decomposable-table"
    return [
        _link("l00", Dec(S, b + 1, Dp), flag(Dp - E * (b + 1)), "II", rule),
        _link("l01", Dec(S, b + 1, Dp + E), flag(Dp + E), "II", rule),
        _link("l10", Dec(S, b - 1, Dp), flag(Dp - E * (b - 1)), "II", rule),
        _link("l11", Dec(S, b - 1, Dp - E), flag(Dp - E), "II", rule),
    ]


def _asbnd_rows(L: ClassElement, b: int, n: int) -> list:
    rule = "asbnd-table"
    if b == 0:
        moves = [("l00", 1, 0), ("l01", 1, 1)]
    elif n == 0:
        moves = [("l00", b + 1, 0), ("l01", b + 1, 1), ("l10", b - 1, 0)]
    elif n == b:
        moves = [("l00", b + 1, b), ("l01", b + 1, b + 1), ("l11", b - 1, b - 1)]
    else:
        moves = [("l00", b + 1, n), ("l01", b + 1, n + 1), ("l10", b - 1, n), ("l11", b - 1, n - 1)]
    return [_link(sel, ASbnD(L, bb, nn), True, "II", rule) for sel, bb, nn in moves]


def _invariant_linear_factor(g: tuple, p: int) -> tuple:
    """Coefficients (a, c) of an invariant constant section a*z0 + c*z1.

    With three or more distinct roots the connected stabilizer of g is trivial
    and z0 works; otherwise a rational root of g is invariant.
    """
    b = len(g) - 1
    f = [int(c) % p for c in reversed(g)]          # dehomogenized at z1 = 1, high to low
    while f and f[0] == 0:
        f = f[1:]
    finite_deg = len(f) - 1
    at_infinity = finite_deg < b
    distinct = gf_degree(gf_sqf_part(gf_from_int_poly(f, p), p, ZZ)) if finite_deg > 0 else 0
    if distinct + int(at_infinity) >= 3:
        return (1, 0)
    if at_infinity:
        return (0, 1)
    roots = sorted(poly_roots(tuple(reversed(f)), p))
    if not roots:
        raise SideConditionViolated("the binary form has no rational root, so no invariant constant section is defined over F_p")
    return (1, (-roots[0]) % p)


def _times_linear(g: tuple, a: int, c: int, p: int) -> tuple:
    out = [0] * (len(g) + 1)
    for k, gk in enumerate(g):
        out[k + 1] = (out[k + 1] + a * gk) % p
        out[k] = (out[k] + c * gk) % p
    return tuple(out)


def _side_conditions(d: Descriptor) -> Optional[str]:
    """Name of the failing hypothesis of the link table for ``d``, if any."""
    if isinstance(d, Dec):
        if d.base.kind == "A1":
            if d.b % 2 or 4 * d.D.degree + 2 * d.b != 0:
                return "deg(D) = -b/2 with b even"
            if not d.D.group.is_nontrivial_2divisor(d.D):
                return "D is a non-trivial 2-divisor"
            return None
        if d.D.degree != 0:
            return "deg(D) = 0"
        if d.base.kind == "SL" and d.D.group.exists_n_trivial(d.D, d.base.L) is not None:
            return "D' + nE nontrivial for every integer n"
        return None
    if isinstance(d, ASbnD):
        if d.L.group.order_of(d.L) != INFINITE_ORDER:
            return "L has infinite order"
        return None
    if isinstance(d, FiberProduct):
        base, other = d.base, d.other
        if base.kind == "SL" and other.kind == "A0" and base.L.group.order_of(base.L) != INFINITE_ORDER:
            return "L has infinite order"
        if base.kind == "SL" and other.kind == "SL":
            if base.L.group.exists_n_trivial(other.L, base.L) is not None:
                return "D' + nE nontrivial for every integer n"
    return None


def _type_two_links(d: Descriptor, witness: bool) -> list:
    failing = _side_conditions(d)
    if failing is not None:
        if not witness:
            raise SideConditionViolated(f"{describe(d)}: requires {failing}")
        return _witness_links(d, failing)

    if isinstance(d, FiberProduct):
        base, other = d.base, d.other
        if base.kind == "A1" and other.kind == "SL":
            D = other.L
            conj = not D.group.is_two_torsion(D)
            return _a1_rows(0, D, conj, "a1-fiber-product-link")
        if base.kind == "A1" and other.kind == "A0":
            Ds = default_group().Dsigma()
            return [_link("omega-S0", Dec(A1, 4, -Ds), False, "II", "a1-times-a0-orbit-link")]
        if base.kind == "A0" and other.kind == "SL":
            D = other.L
            return [
                _link("l0", Dec(A0, 1, D), True, "II", "a0-twisted-link"),
                _link("l1", Dec(A0, -1, D), True, "II", "a0-twisted-link"),
            ]
        if base.kind == "A0" and other.kind == "A0":
            return [_link("l00", XA0b0(1), False, "II", "a0-square-link")]
        if base.kind == "SL" and other.kind == "A0":
            return _asbnd_rows(base.L, 0, 0)
        if base.kind == "SL" and other.kind == "SL":
            return _sl_rows(base.L, 0, other.L, witness)
        return []
    if isinstance(d, Dec):
        if d.base.kind == "A1":
            return _a1_rows(d.b, d.D, True, "a1-orbit-link")
        if d.base.kind == "A0":
            if d.D.is_trivial():
                return [_link("sigma-curve", Dec(A0, d.b - 1, d.D), False, "II", "a0-untwisted-link")]
            return [
                _link("l0", Dec(A0, d.b + 1, d.D), True, "II", "a0-twisted-link"),
                _link("l1", Dec(A0, d.b - 1, d.D), True, "II", "a0-twisted-link"),
            ]
        if d.base.kind == "SL":
            return _sl_rows(d.base.L, d.b, d.D, witness)
        return []
    if isinstance(d, IndecCP1):
        a, c = _invariant_linear_factor(d.g, d.p)
        target = IndecCP1(d.b + 1, _times_linear(d.g, a, c, d.p), d.p)
        return [_link("constant-section", target, False, "II", "constant-section-link")]
    if isinstance(d, XA0b0):
        return [_link("min-section", Dec(A0, d.b + 1, default_group().zero()), False, "II",
                      "a0-indecomposable-link")]
    if isinstance(d, ASbnD):
        return _asbnd_rows(d.L, d.b, d.n)
    return []


# XA0b0 and A1 x A0 carry no class data, so the links that produce classes
# from them (Dec(A0, b+1, 0), Dec(A1, 4, -D_sigma)) take the group from here.
_DEFAULT_GROUP: list = [None]


def set_default_group(group: Optional[ClassGroup]) -> None:
    _DEFAULT_GROUP[0] = group


def default_group() -> ClassGroup:
    if _DEFAULT_GROUP[0] is None:
        _DEFAULT_GROUP[0] = ClassGroup("abstract", rank=2, torsion=(2,))
    return _DEFAULT_GROUP[0]


def _witness_links(d: Descriptor, failing: str) -> list:
    """Links that are still defined when a table hypothesis fails."""
    if isinstance(d, Dec) and d.base.kind == "A1" and failing == "D is a non-trivial 2-divisor":
        Ds = d.D.group.Dsigma()
        return [_link("omega-S0", Dec(A1, d.b + 4, d.D - Ds), False, "II", "a1-trivial-invariant-link")]
    if isinstance(d, Dec) and d.base.kind == "SL" and d.D.degree == 0:
        return _sl_rows(d.base.L, d.b, d.D, True)
    if isinstance(d, FiberProduct) and d.base.kind == "SL" and d.other.kind == "SL":
        return _sl_rows(d.base.L, 0, d.other.L, True)
    return []


def available_links(d: Descriptor, witness: bool = False) -> list:
    """All equivariant links leaving ``d`` as (choice, result) pairs.

    In the default mode a descriptor whose table hypotheses fail raises
    SideConditionViolated.  ``witness=True`` instead returns the links that
    remain defined, which the classifier uses to exhibit non-maximality.
    """
    d = _working_form(d)
    links = _type_two_links(d, witness) + _boundary_links(d)
    return sorted(links, key=lambda pair: pair[0].selector)


def apply_link(d: Descriptor, choice, witness: bool = False) -> LinkResult:
    if isinstance(choice, str):
        choice = LinkChoice(choice)
    for c, result in available_links(d, witness=witness):
        if c == choice:
            return result
    raise InvalidChoice(f"{choice.selector!r} is not a link from {describe(canonical(d))}")


# ---------------------------------------------------------------------------
# orbits

@dataclass
class OrbitGraph:
    start: Descriptor
    nodes: list
    edges: list           # (source key, selector, target key)
    depth: dict           # key -> BFS depth

    def keys(self) -> set:
        return {descriptor_key(n) for n in self.nodes}

    def to_dot(self) -> str:
        index = {descriptor_key(n): i for i, n in enumerate(self.nodes)}
        lines = ["digraph orbit {"]
        for i, n in enumerate(self.nodes):
            label = describe(n).replace('"', "'")
            lines.append(f'  n{i} [label="{label}"];')
        for src, sel, dst in self.edges:
            lines.append(f'  n{index[src]} -> n{index[dst]} [label="{sel}"];')
        lines.append("}")
        return "\n".join(lines)

    def to_json(self) -> dict:
        index = {descriptor_key(n): i for i, n in enumerate(self.nodes)}
        return {
            "start": descriptor_to_json(canonical(self.start)),
            "nodes": [{"id": i, "depth": self.depth[descriptor_key(n)], "descriptor": descriptor_to_json(n),
                       "label": describe(n)} for i, n in enumerate(self.nodes)],
            "edges": [{"from": index[s], "to": index[t], "selector": sel} for s, sel, t in self.edges],
        }


def _conjugating_moves(d: Descriptor) -> list:
    try:
        links = available_links(d)
    except SideConditionViolated:
        return []
    return [(c, r) for c, r in links
            if r.conjugates_full_group and r.link_type == "II" and not isinstance(r.target, Boundary)]


def enumerate_orbit(d: Descriptor, bound: int, shuffle_seed: Optional[int] = None) -> OrbitGraph:
    """Breadth-first closure under conjugating type II links, ``bound`` steps deep.

    ``shuffle_seed`` permutes the exploration order; the result does not depend on it.
    """
    if bound < 0:
        raise ValueError("bound must be >= 0")
    rng = random.Random(shuffle_seed) if shuffle_seed is not None else None
    start = canonical(d)
    k0 = descriptor_key(start)
    seen = {k0: start}
    depth = {k0: 0}
    edges = set()
    frontier = [start]
    for level in range(bound):
        if rng is not None:
            rng.shuffle(frontier)
        nxt = []
        for node in frontier:
            src = descriptor_key(node)
            moves = _conjugating_moves(node)
            if rng is not None:
                rng.shuffle(moves)
            for c, r in moves:
                dst = descriptor_key(r.target)
                edges.add((src, c.selector, dst))
                if dst not in seen:
                    seen[dst] = r.target
                    depth[dst] = level + 1
                    nxt.append(r.target)
        frontier = nxt
    order = sorted(seen)
    return OrbitGraph(start, [seen[k] for k in order], sorted(edges), depth)


@dataclass
class ConjugacyAnswer:
    status: str                  # "yes" | "no" | "unknown"
    path: Optional[list] = None  # list of (selector, descriptor) steps
    reason: str = ""


def _find_path(d1: Descriptor, d2: Descriptor, bound: int) -> Optional[list]:
    start, goal = canonical(d1), descriptor_key(d2)
    parent = {descriptor_key(start): None}
    queue = deque([(start, 0)])
    while queue:
        node, dist = queue.popleft()
        key = descriptor_key(node)
        if key == goal:
            path = []
            while parent[key] is not None:
                prev_key, sel, desc = parent[key]
                path.append((sel, desc))
                key = prev_key
            return path[::-1]
        if dist == bound:
            continue
        for c, r in _conjugating_moves(node):
            k = descriptor_key(r.target)
            if k not in parent:
                parent[k] = (key, c.selector, r.target)
                queue.append((r.target, dist + 1))
    return None


def is_conjugate(d1: Descriptor, d2: Descriptor, bound: int) -> ConjugacyAnswer:
    path = _find_path(d1, d2, bound)
    if path is not None:
        return ConjugacyAnswer("yes", path, "link path found")
    from .classifier import conjugacy_family
    for a, b in ((d1, d2), (d2, d1)):
        fam = conjugacy_family(a)
        if fam is not None:
            if fam.contains(b):
                return ConjugacyAnswer("unknown", None, f"both lie in {fam.name} but no path within {bound} links")
            return ConjugacyAnswer("no", None, f"{describe(canonical(b))} is outside {fam.name}")
    return ConjugacyAnswer("unknown", None, "no closed family recognized and the bound is exhausted")


# ---------------------------------------------------------------------------
# JSON

def tag_to_json(tag: SurfaceTag):
    if tag.kind == "SL":
        return {"kind": "SL", "L": tag.L.to_json()}
    return {"kind": tag.kind}


def tag_from_json(data, group: ClassGroup) -> SurfaceTag:
    if isinstance(data, str):
        data = {"kind": data}
    kind = data["kind"]
    if kind == "SL":
        return SurfaceTag("SL", group.class_from_json(data["L"]))
    return SurfaceTag(kind)


def descriptor_to_json(d: Descriptor) -> dict:
    if isinstance(d, FiberProduct):
        return {"family": "FiberProduct", "S1": tag_to_json(d.base), "S2": tag_to_json(d.other), "projection": 1}
    if isinstance(d, Dec):
        return {"family": "Dec", "base": tag_to_json(d.base), "b": d.b, "D": d.D.to_json()}
    if isinstance(d, IndecCP1):
        return {"family": "IndecCP1", "b": d.b, "g": list(d.g), "p": d.p}
    if isinstance(d, XA0b0):
        return {"family": "XA0b0", "b": d.b}
    return {"family": "ASbnD", "L": d.L.to_json(), "b": d.b, "n": d.n, "D": d.L.to_json()}


def descriptor_from_json(data: dict, group: ClassGroup) -> Descriptor:
    fam = data.get("family")
    if fam == "FiberProduct":
        S1, S2 = tag_from_json(data["S1"], group), tag_from_json(data["S2"], group)
        proj = int(data.get("projection", 1))
        if proj not in (1, 2):
            raise ValueError("projection must be 1 or 2")
        return FiberProduct(S1, S2) if proj == 1 else FiberProduct(S2, S1)
    if fam == "Dec":
        return Dec(tag_from_json(data["base"], group), int(data["b"]), group.class_from_json(data["D"]))
    if fam == "IndecCP1":
        return IndecCP1(int(data["b"]), tuple(int(c) for c in data["g"]), int(data.get("p", 101)))
    if fam == "XA0b0":
        return XA0b0(int(data["b"]))
    if fam == "ASbnD":
        L = group.class_from_json(data["L"])
        if "D" in data:
            D = group.class_from_json(data["D"])
            if D != L and D != -L:
                raise ValueError("ASbnD: the SL factor class must be L up to sign")
        return ASbnD(L, int(data["b"]), int(data["n"]))
    raise ValueError(f"unknown descriptor family {fam!r}")


def from_normal_form(nf, p: int = 101) -> Descriptor:
    """Descriptor of a normal form produced by bundle_data.normalize."""
    if isinstance(nf, bundle_data.DecForm):
        return canonical(Dec(nf.base, nf.b, nf.D))
    if isinstance(nf, bundle_data.IndecCP1):
        return canonical(IndecCP1(nf.b, nf.g, p))
    if isinstance(nf, bundle_data.IndecA0):
        return XA0b0(nf.b)
    if isinstance(nf, bundle_data.ASbnD):
        return canonical(ASbnD(nf.L, nf.b, nf.n))
    raise TypeError(f"not a normal form: {nf!r}")
