from collections import Counter
from itertools import product

import pytest
from hypothesis import given, settings, strategies as st

from heckelab.finmod import DomainError, rank_mod_p
from heckelab.heckealg import (
    E427_G3,
    E618,
    E626,
    CongruenceSpec,
    Phi,
    R,
    SatakeParams,
    Tp,
    U_I,
    a_p1_residue,
    admissible_pairs,
    appendix1_pipeline,
    assemble_427,
    assemble_616,
    assemble_625,
    count_symmetric_corank,
    decomposition_coeffs,
    evaluate,
    monomial_str,
    phi_eigen_residues,
    satake_eigenvalue,
    specialize,
    verify_rcount,
)
from heckelab.lagrange import BudgetExceeded, count_lagrangian, gaussian_binomial
from heckelab.poly import P, LaurentPoly

SAT3 = SatakeParams(3, "b(g)-1")


def test_rcount_examples():
    assert count_symmetric_corank(1, 5, 1) == 1
    assert R(1, 1) == 1
    for p in (2, 3, 5):
        assert R(2, 1)(p) == p * p - 1 == count_symmetric_corank(2, p, 1)
    assert count_symmetric_corank(3, 2, 1) == 28 == R(3, 1)(2)


def _brute_corank(n, p):
    # independent of the package: symmetric matrices listed directly, rank via
    # counting the image of x -> Ax over all x
    idx = [(r, c) for r in range(n) for c in range(r, n)]
    out = Counter()
    vecs = list(product(range(p), repeat=n))
    for vals in product(range(p), repeat=len(idx)):
        m = [[0] * n for _ in range(n)]
        for (r, c), v in zip(idx, vals):
            m[r][c] = m[c][r] = v
        image = {tuple(sum(m[i][j] * x[j] for j in range(n)) % p for i in range(n)) for x in vecs}
        rank = len(image).bit_length() - 1 if p == 2 else round(__import__("math").log(len(image), p))
        out[n - rank] += 1
    return out


@pytest.mark.parametrize("n,p", [(2, 2), (2, 3), (3, 2), (3, 3), (2, 5)])
def test_closed_form_vs_brute_force(n, p):
    brute = _brute_corank(n, p)
    for i in range(n + 1):
        assert R(n, i)(p) == brute[i] == count_symmetric_corank(n, p, i)
    assert sum(R(n, i)(p) for i in range(n + 1)) == p ** (n * (n + 1) // 2)


def test_rcount_budget():
    with pytest.raises(BudgetExceeded):
        count_symmetric_corank(4, 3, 1, budget=100)
    assert verify_rcount(ps=(2, 3), nmax=3).passed


def test_decomposition_examples():
    c = decomposition_coeffs(3, 1)
    assert c[(0, 1)] == P**-1
    assert c[(0, 3)] == (P**3 - 1) * P**-4
    assert (0, 1) not in decomposition_coeffs(3, 2)
    with pytest.raises(DomainError):
        decomposition_coeffs(3, 3)


def test_assemble_616():
    y = assemble_616(3, 1)
    assert y["y02"] == P**6 - P**4 and y["y23"] == 1
    assert y["y01"] == P**8 and y["y12"] == P**3 and y["y13"] == P**2 - 1
    # the printed y03 entry is p^3 - 1; the decomposition gives p^5 - p^2
    assert y["y03"] == P**5 - P**2
    assert E618["y03"] != y["y03"]
    for key in ("y01", "y12", "y23", "y02", "y13"):
        assert y[key] == E618[key]


def test_assemble_625():
    z = assemble_625(3, 1)
    assert z["z01"] == P**8 + P**7 + P**6 - P**5
    assert z["z22"] == 1
    assert z["z02"] == P**6 + 2 * P**5 - 2 * P**2
    assert z == E626
    # substituting the printed y03 = p^3 - 1 instead breaks the z02 entry
    printed = assemble_625(3, 1, y_coeffs=E618)
    assert printed["z02"] == P**6 + P**5 + P**3 - P**2 - 1


def test_assemble_427():
    z = assemble_427(3)
    assert z == E427_G3
    z2 = assemble_427(2)
    total = sum(c(p) * gaussian_binomial(1, int(k[1:]), p) for k, c in z2.items() for p in [2])
    assert total == count_lagrangian(2, 2)
    for p in (2, 3, 5, 7):
        assert sum(c(p) * gaussian_binomial(2, int(k[1:]), p) for k, c in z.items()) == count_lagrangian(3, p)


def test_satake_examples():
    ev = satake_eigenvalue(U_I(3, {1, 2}), {3}, SAT3)
    assert monomial_str(ev, SAT3) == "a0*p*b2*b3"
    # T_p = a0 (p+1)(b2+1)(b3+1)
    ev = satake_eigenvalue(Tp(3), {3}, SAT3)
    expected = Counter()
    for e1, e2, e3 in product((0, 1), repeat=3):
        expected[(1, (e1, e2, e3))] += 1
    assert ev == expected
    for I in SAT3.basis():
        assert satake_eigenvalue(Tp(3), I, SAT3) == expected
    # Phi_0 on f_empty = V1V2V3 -> a0 (no b's: V_i acts by ahat for i not in I)
    ev0 = satake_eigenvalue(Phi(3, 0), set(), SAT3)
    assert monomial_str(ev0, SAT3) == "a0"


def test_satake_rejects():
    assert satake_eigenvalue(U_I(3, {1}), {3}, SAT3)
    with pytest.raises(DomainError):
        satake_eigenvalue(Counter({((1, 0, 0), (0, 0, 0)): 1}), {3}, SAT3)
    with pytest.raises(DomainError):
        satake_eigenvalue(Tp(3), {1}, SAT3)
    with pytest.raises(DomainError):
        SatakeParams(3, "heavy")


def test_congruence_spec_validation():
    with pytest.raises(DomainError):
        CongruenceSpec(3, 2, 1, 1)
    with pytest.raises(DomainError):
        CongruenceSpec(3, 2, 3, 1)
    with pytest.raises(DomainError):
        CongruenceSpec(2, 2, 1, 3)
    assert len(list(admissible_pairs(3, 1))) == 2


def test_specialize_examples():
    spec = CongruenceSpec(3, 2, 1, 2)
    assert phi_eigen_residues(spec) == [-1, 1, 1, -1]
    # V1V2V3 = Phi_0: a0 b3 = -1 on f_3 (the table row), a0 = 1 on f_empty
    assert specialize(satake_eigenvalue(Phi(3, 0), {3}, SAT3), spec)[0] == spec.M - 1
    assert specialize(satake_eigenvalue(Phi(3, 0), set(), SAT3), spec)[0] == 1
    for a, bb in admissible_pairs(3, 2):
        for t in range(3):
            s = CongruenceSpec(3, 2, a, bb, t=t)
            assert specialize(satake_eigenvalue(Tp(3), {3}, SAT3), s)[1] == 0
            assert phi_eigen_residues(s)[2] == 1


@settings(max_examples=60, deadline=None)
@given(st.sampled_from(list(admissible_pairs(3, 3))), st.integers(0, 26), st.integers(0, 26))
def test_appendix1_invariants(pair, t, s):
    spec = CongruenceSpec(3, 3, pair[0], pair[1], t=t, s=s)
    r = appendix1_pipeline(spec)
    assert r["z1"] == 0 and r["z0"] == r["z2"] == -1
    assert r["system_consistent"]
    assert r["B_p"] == 0


def test_weil_relation_pins_s():
    # a0^2 b1 b2 b3 = p^6 holds mod M^2 exactly when s = b - a - 5t mod M
    M = 9
    for a, bb in list(admissible_pairs(3, 2))[:6]:
        for t in range(M):
            good = [s for s in range(M) if CongruenceSpec(3, 2, a, bb, t=t, s=s).weil_consistent()]
            assert good == [(bb - a - 5 * t) % M]


def test_ap1_residue():
    for a, bb in admissible_pairs(3, 2):
        for t in (0, 4):
            r = a_p1_residue(CongruenceSpec(3, 2, a, bb, t=t, s=1))
            assert r["coeff_residues"] == {1: -1, 2: 0, 3: -2}
            assert r["residue"] == -1
            assert r["agrees_with_claim"] is False


def test_evaluate_negative_powers():
    ev = Counter({(0, (-1, 0, 0)): 1})
    assert evaluate(ev, {"a0": 1, "b1": 2, "b2": 1, "b3": 1}, 9) == 5
    with pytest.raises(DomainError):
        evaluate(ev, {"a0": 1, "b1": 3, "b2": 1, "b3": 1}, 9)
