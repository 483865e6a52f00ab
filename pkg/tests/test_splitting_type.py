import json
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from sympy import GF
from sympy.polys.matrices import DomainMatrix

from atlas.errors import NotAJump, NotSplittable
from atlas.splitting_type import (LaurentMatrix, LaurentPoly, PrimeField, birkhoff_split, fiber_type,
                                  generic_type, planted_jump_instance, planted_split_instance,
                                  remove_all_jumps, remove_jump, scan_fibers)

P = 101
F = PrimeField(P)


def sections(A: LaurentMatrix, t: int) -> int:
    """dim { u in F[y]^2 : y^-t A u has no positive powers of y }, by linear algebra."""
    exps = A.exponents() + A.inverse().exponents()
    top = t + max(exps) + 1
    if top < 0:
        return 0
    nvars = 2 * (top + 1)
    rows = []
    for i in range(2):
        hi_exp = max(A[i, 0].degree, A[i, 1].degree) + top
        for j in range(t + 1, hi_exp + 1):
            row = [0] * nvars
            for col in range(2):
                for e, c in A[i, col].terms:
                    k = j - e
                    if 0 <= k <= top:
                        row[col * (top + 1) + k] = (row[col * (top + 1) + k] + c) % P
            rows.append(row)
    if not rows:
        return nvars
    M = DomainMatrix([[GF(P)(v) for v in r] for r in rows], (len(rows), nvars), GF(P))
    return nvars - M.rank()


def splitting_type_by_sections(A: LaurentMatrix):
    det = A.det()
    k = det.terms[0][0]
    candidates = []
    span = max(abs(e) for e in A.exponents()) + abs(k) + 2
    window = range(-span - 2, span + 3)
    table = {t: sections(A, t) for t in window}
    for n in range(-span, span + 1):
        m = k - n
        if m < n:
            continue
        if all(table[t] == max(0, t - m + 1) + max(0, t - n + 1) for t in window):
            candidates.append((m, n))
    assert len(candidates) == 1, candidates
    return candidates[0]


def test_identity_and_diagonal():
    cert = birkhoff_split(LaurentMatrix.identity(F))
    assert (cert.m, cert.n) == (0, 0)
    cert = birkhoff_split(LaurentMatrix.diag(F, -2, 3))
    assert (cert.m, cert.n) == (3, -2)
    assert cert.verify(LaurentMatrix.diag(F, -2, 3))


def test_known_small_example():
    # [[y, 1], [0, y^-1]] splits as O + O even though the diagonal suggests (1, -1)
    A = LaurentMatrix.from_rows(F, [[{1: 1}, 1], [0, {-1: 1}]])
    cert = birkhoff_split(A)
    assert (cert.m, cert.n) == (0, 0)
    assert splitting_type_by_sections(A) == (0, 0)


@settings(max_examples=25)
@given(st.integers(0, 2 ** 32), st.integers(-3, 3), st.integers(-3, 3))
def test_planted_types_agree_with_section_count(seed, m, n):
    A, m, n = planted_split_instance(P, m, n, random.Random(seed), max_deg=4)
    cert = birkhoff_split(A)
    expected = (max(m, n), min(m, n))
    assert (cert.m, cert.n) == expected
    assert cert.verify(A)
    assert splitting_type_by_sections(A) == expected


@given(st.integers(0, 2 ** 32))
def test_swap_invariance(seed):
    A, m, n = planted_split_instance(P, 2, -1, random.Random(seed), max_deg=4)
    assert generic_type(A.swap()) == generic_type(A) == 3


def test_certificate_tamper_detected():
    A, _, _ = planted_split_instance(P, 1, -1, random.Random(5))
    cert = birkhoff_split(A)
    bad = type(cert)(cert.M, cert.N, cert.m + 1, cert.n - 1)
    assert not bad.verify(A)


def test_non_unit_determinant_rejected():
    A = LaurentMatrix.from_rows(F, [[{0: 1, 1: 1}, 0], [0, 1]])
    with pytest.raises(NotSplittable):
        birkhoff_split(A)


def test_json_round_trip():
    A, _, _ = planted_split_instance(P, 2, 0, random.Random(9))
    B = LaurentMatrix.from_json(json.loads(json.dumps(A.to_json())))
    assert B == A
    J = planted_jump_instance(P, 1, 1, 3, random.Random(9))
    assert LaurentMatrix.from_json(json.loads(json.dumps(J.to_json()))) == J


@pytest.mark.parametrize("b,eps,x0", [(0, 1, 3), (1, 1, 10), (2, 2, 0), (0, 3, 50)])
def test_planted_jump_is_found_and_removed(b, eps, x0):
    A = planted_jump_instance(P, b, eps, x0, random.Random(b * 100 + eps))
    assert generic_type(A) == b
    report = scan_fibers(A, range(0, 60))
    assert report.jumps == {x0: eps}
    assert all((bt - b) % 2 == 0 for bt in report.types.values())
    with pytest.raises(NotAJump):
        remove_jump(A, (x0 + 1) % P)
    B, passes = remove_all_jumps(A, range(0, 60))
    assert passes <= eps + 2
    assert generic_type(B) == b
    assert not scan_fibers(B, range(0, 60)).jumps


def test_fiber_type_of_constant_matrix():
    A, _, _ = planted_split_instance(P, 1, 0, random.Random(2))
    assert fiber_type(A, 7) == generic_type(A) == 1
