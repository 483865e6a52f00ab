import random

import pytest
from hypothesis import given
from hypothesis import strategies as st

from atlas.divisor_class import (INFINITE_ORDER, ClassGroup, Divisor, TrackedFunction, divisor_of,
                                 function_with_poles, h0, miller_reduce, principal_function, rr_basis)
from atlas.errors import BackendMismatch, NonZeroDegree, NoSuchFunction
from atlas.field_tower import INFINITY, CurveSpec, valuation

from fp2_oracle import Fp2Curve

CURVE = CurveSpec(101, 1, 3)
GROUP = ClassGroup("concrete", CURVE)
POINTS = CURVE.points()
AFFINE = [P for P in POINTS if not P.is_infinity]

FULL_TWO_TORSION = [CurveSpec(7, 6, 0), CurveSpec(13, 12, 0), CurveSpec(17, 16, 0),
                    CurveSpec(13, 1, 0), CurveSpec(17, 1, 0)]


def random_divisor(rng, degree, size=4):
    terms = [(rng.choice(AFFINE), rng.choice([-1, 1])) for _ in range(size)]
    d = sum(m for _, m in terms)
    return Divisor(tuple(terms) + ((INFINITY, degree - d),))


# -- parsing and basic structure ------------------------------------------

def test_parse_and_degree():
    D = Divisor.parse("2*(1,45) - O + (1,56)", CURVE)
    assert D.degree == 2
    assert D[INFINITY] == -1
    assert Divisor.from_json(D.to_json(), CURVE) == D


def test_abstract_parse_and_classes():
    G = ClassGroup("abstract", None, 2, (2,))
    c = G.class_of(Divisor.parse("g1 + g3 - 2*O"))
    assert c.degree == 0 and c.cl0 == (1, 0, 1)
    assert (c * 2).cl0 == (2, 0, 0)
    with pytest.raises(BackendMismatch):
        GROUP.class_of(Divisor.parse("g1 - O"))


def test_distinguished_classes_constraint():
    G = ClassGroup("abstract", None, 1, (2,), D0_class=[0, 1], Dsigma_class=[0, 0])
    assert (G.Dsigma() * 2).cl0 == (G.D0() * 4).cl0
    with pytest.raises(ValueError):
        ClassGroup("abstract", None, 1, (), D0_class=[1], Dsigma_class=[0])


# -- homomorphism and principal divisors ----------------------------------

@given(st.integers(0, 2 ** 32))
def test_class_of_is_a_homomorphism(seed):
    rng = random.Random(seed)
    D, E = random_divisor(rng, 0), random_divisor(rng, 0)
    assert GROUP.class_of(D + E) == GROUP.class_of(D) + GROUP.class_of(E)
    assert GROUP.class_of(-D) == -GROUP.class_of(D)


@given(st.integers(0, 2 ** 32))
def test_miller_reduce_identity(seed):
    rng = random.Random(seed)
    D = random_divisor(rng, rng.randint(-2, 4))
    R, h = miller_reduce(CURVE, D)
    expected = D - Divisor.point(R) - Divisor.point(INFINITY, D.degree - 1)
    assert h.divisor() == expected
    assert GROUP.class_of(h.divisor()).is_trivial()


def test_tracked_divisors_match_valuations():
    rng = random.Random(3)
    for _ in range(10):
        D = random_divisor(rng, 0, size=3)
        R, h = miller_reduce(CURVE, D)
        f = h.element()
        expected = h.divisor()
        for P in set(expected.support) | {INFINITY}:
            assert valuation(f, P) == expected[P]
        # the element itself has rational support, so the untracked path agrees
        assert divisor_of(f) == expected


def test_principal_function():
    P, Q = AFFINE[2], AFFINE[9]
    S = CURVE.add(P, Q)
    E = Divisor.of((P, 1), (Q, 1), (S, -1), (INFINITY, -1))
    h = principal_function(CURVE, E)
    assert divisor_of(h) == E
    with pytest.raises(NoSuchFunction):
        principal_function(CURVE, Divisor.of((P, 1), (INFINITY, -1)))


def test_line_function_divisor():
    P, Q = AFFINE[0], AFFINE[4]
    line = TrackedFunction.line(CURVE, P, Q)
    R = CURVE.neg(CURVE.add(P, Q))
    assert line.divisor() == Divisor.of((P, 1), (Q, 1), (R, 1), (INFINITY, -3))


# -- orders and relations --------------------------------------------------

def brute_order(P):
    k, Q = 1, P
    while not Q.is_infinity:
        Q, k = CURVE.add(Q, P), k + 1
    return k


def test_order_of_concrete_matches_brute_force():
    for P in POINTS:
        assert GROUP.order_of(GROUP.element(0, P)) == brute_order(P)
    with pytest.raises(NonZeroDegree):
        GROUP.order_of(GROUP.element(1))


def test_order_of_abstract():
    G = ClassGroup("abstract", None, 2, (2, 3))
    assert G.order_of(G.generator(1)) == INFINITE_ORDER
    assert G.order_of(G.generator(3) + G.generator(4)) == 6
    assert G.order_of(G.zero()) == 1


ABSTRACT = ClassGroup("abstract", None, 2, (2,))
vec = st.tuples(st.integers(-4, 4), st.integers(-4, 4), st.integers(0, 1))


def brute_exists_n(D, E, span=60):
    return any((D + E * n).is_trivial() for n in range(-span, span + 1))


def brute_coprime(D, E, span=12):
    from math import gcd
    return any(gcd(a, b) == 1 and (D * a + E * b).is_trivial()
               for a in range(-span, span + 1) for b in range(-span, span + 1))


@given(vec, vec)
def test_exists_n_trivial_matches_search(d, e):
    D, E = ABSTRACT.element(0, d), ABSTRACT.element(0, e)
    n = ABSTRACT.exists_n_trivial(D, E)
    assert (n is not None) == brute_exists_n(D, E)
    if n is not None:
        assert (D + E * n).is_trivial()


@given(vec, vec)
def test_coprime_relation_matches_search(d, e):
    D, E = ABSTRACT.element(0, d), ABSTRACT.element(0, e)
    assert ABSTRACT.has_coprime_relation(D, E) == brute_coprime(D, E)


def test_exists_n_trivial_concrete():
    E = GROUP.element(0, AFFINE[3])
    for k in (0, 1, 5):
        D = -(E * k)
        n = GROUP.exists_n_trivial(D, E)
        assert n is not None and (D + E * n).is_trivial()


# -- m2 pullback -----------------------------------------------------------

@pytest.mark.parametrize("curve", FULL_TWO_TORSION, ids=lambda c: f"p{c.p}a{c.a}")
def test_m2_pullback_matches_preimage_sums(curve):
    oracle = Fp2Curve(curve)
    group = ClassGroup("concrete", curve)
    assert len(oracle.preimages(INFINITY)) == 4
    assert len(curve.two_torsion()) == 4
    for P in curve.points():
        assert len(oracle.preimages(P)) == 4
        pulled = group.m2_pullback(group.element(0, P))
        assert pulled.degree == 0
        assert pulled.cl0 == oracle.preimage_sum(P)


@pytest.mark.parametrize("curve", FULL_TWO_TORSION[:3], ids=lambda c: f"p{c.p}")
def test_m2_pullback_arbitrary_degree(curve):
    oracle = Fp2Curve(curve)
    group = ClassGroup("concrete", curve)
    pts = curve.points()
    rng = random.Random(curve.p)
    for _ in range(40):
        terms = [(rng.choice(pts), rng.randint(-2, 2)) for _ in range(3)]
        D = Divisor(tuple(terms))
        # pull back term by term: every point contributes its four preimages
        total, acc = 0, None
        for P, m in D.terms:
            total += 4 * m
            for Q in oracle.preimages(P):
                for _ in range(abs(m)):
                    acc = oracle.point_add(acc, Q if m > 0 else (Q and (Q[0], oracle.neg(Q[1]))))
        pulled = group.m2_pullback(group.class_of(D))
        assert pulled.degree == total
        assert pulled.cl0 == oracle.descend(acc)


def test_m2_pullback_abstract_is_doubling_on_degree_zero():
    G = ClassGroup("abstract", None, 2, (2,))
    c = G.element(0, [3, -1, 1])
    assert G.m2_pullback(c) == c * 2
    assert G.m2_pullback(G.element(1, [1, 0, 0])).degree == 4


@given(st.integers(-3, 3), vec)
def test_nontrivial_2divisor_agrees_with_direct_definition(half_b, v):
    b = 2 * half_b
    D = ABSTRACT.element(-half_b, v)
    direct = ABSTRACT.m2_pullback(D) + ABSTRACT.D0() * b
    assert direct.degree == 0
    assert ABSTRACT.is_nontrivial_2divisor(D) == (not direct.is_trivial())


def test_nontrivial_2divisor_concrete():
    for P in POINTS[:20]:
        D = GROUP.element(-1, P)
        direct = GROUP.m2_pullback(D) + GROUP.D0() * 2
        assert GROUP.is_nontrivial_2divisor(D) == (not direct.is_trivial())


# -- Riemann-Roch ----------------------------------------------------------

def evaluation_rank(basis, D, p):
    """Rank over F_p of the evaluation matrix at points away from every pole."""
    from sympy import GF
    from sympy.polys.matrices import DomainMatrix
    rows = []
    for P in AFFINE:
        if P in D.support:
            continue
        try:
            rows.append([f.evaluate(P) for f in basis])
        except Exception:
            continue
        if len(rows) >= 3 * len(basis) + 4:
            break
    if not basis:
        return 0
    M = DomainMatrix([[GF(p)(v) for v in r] for r in rows], (len(rows), len(basis)), GF(p))
    return M.rank()


def check_pole_bound(basis, D):
    for f in basis:
        for P in set(D.support) | {INFINITY}:
            assert valuation(f, P) + D[P] >= 0
        for P in AFFINE[:12]:
            if P not in D.support:
                assert valuation(f, P) >= 0


def test_rr_examples():
    p, q = AFFINE[0], AFFINE[2]
    B = rr_basis(CURVE, Divisor.of((p, 1), (q, 1)))
    assert B.dimension == 2
    check_pole_bound(B.basis, B.divisor)
    for n in range(1, 7):
        assert h0(CURVE, Divisor.point(p, n)) == n
    assert h0(CURVE, Divisor.point(INFINITY, 0)) == 1
    assert h0(CURVE, Divisor.point(p, -1)) == 0


@given(st.integers(0, 2 ** 32))
def test_rr_dimension_and_independence(seed):
    rng = random.Random(seed)
    d = rng.randint(1, 5)
    D = random_divisor(rng, d, size=2)
    B = rr_basis(CURVE, D)
    assert B.dimension == d
    assert evaluation_rank(B.basis, D, CURVE.p) == d
    check_pole_bound(B.basis, D)


def test_function_with_poles_exact():
    p, q = AFFINE[1], AFFINE[5]
    D = Divisor.of((p, 2), (q, 1))
    f = function_with_poles(CURVE, D)
    assert valuation(f, p) == -2 and valuation(f, q) == -1
    with pytest.raises(NoSuchFunction):
        function_with_poles(CURVE, Divisor.point(p, 1))
