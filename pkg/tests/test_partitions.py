import random
from collections import Counter

import pytest

from heckelab.cache import MemoryCache
from heckelab.finmod import DomainError, RingCtx, canonicalize, make_fp2, mat_mul, transpose, f_dim
from heckelab.lagrange import HeckeType, SymplecticSpace, enumerate_isotropic, enumerate_tp, enumerate_tpi, orthogonal
from heckelab.partitions import (
    A23_TABLE,
    A24_TABLE,
    FlagData,
    GrassmannianIndex,
    a2_flag,
    census,
    classify,
    fiber_stats,
    grassmannian,
    grassmannian_count,
    nonordinary_fp_flag,
    nonordinary_zp2_flag,
    ordinary_fp_flag,
    ordinary_zp2_flag,
    partition,
    random_symplectic,
    transform_submodule,
    unit_vector,
    verify_a23,
    verify_a24,
    verify_fiber_laws,
    verify_prop438,
    verify_lemma4312,
    SCHEMES,
)
from oracles import isotropic_brute, perp_set, span_set, submodule_set

cache = MemoryCache()


def tp(g, p):
    return cache.load_or_enumerate(g, p, HeckeType("Tp"))


def tp1(p):
    return cache.load_or_enumerate(3, p, HeckeType("Tpi", 1))


def symplectic_inverse(M, g, mod):
    """M^-1 = -J M^T J for symplectic M."""
    n = 2 * g
    J = [[(1 if j == i + g else -1 if i == j + g else 0) for j in range(n)] for i in range(n)]
    inv = mat_mul(mat_mul(J, transpose(M), mod), J, mod)
    return [[-x % mod for x in r] for r in inv]


def test_classify_trivial_example():
    fl = ordinary_fp_flag(3, 2)
    assert classify(fl.Dg, fl, "S_j").values == (3,)


def test_classify_rejects_mismatches():
    fl = ordinary_fp_flag(2, 3)
    w = tp(2, 3)[0]
    with pytest.raises(DomainError):
        classify(w, fl, "S_jk")
    with pytest.raises(DomainError):
        classify(w, fl, "Sstar_j")  # no D_{g-1}
    with pytest.raises(DomainError):
        classify(tp1(2)[0], fl, "S_j")
    with pytest.raises(DomainError):
        classify(w, fl, "nonsense")


def test_unique_free_rank2_intersection():
    fl = a2_flag(2)
    labels = [classify(w, fl, "Sstar_jk_mu").values for w in tp1(2)]
    assert labels.count((2, 2, 2)) == 1


def test_a24_census_at_p2():
    fl = a2_flag(2)
    got = Counter()
    for w in tp1(2):
        j, k, mu = classify(w, fl, "Sstar_jk_mu").values
        got[(j, k - j, mu)] += 1
    want = {key: row[2](2) for key, row in A24_TABLE.items() if row[2](2)}
    assert dict(got) == want


@pytest.mark.parametrize("g,p", [(2, 2), (3, 2), (2, 3)])
def test_labels_exhaustive_and_exclusive(g, p):
    subs = tp(g, p)
    fl = ordinary_fp_flag(g, p)
    cells = partition(subs, fl, "S_j")
    assert sum(len(c) for c in cells.values()) == len(subs)
    assert set().union(*map(set, cells.values())) == set(subs)
    assert set(cells) <= {(j,) for j in range(g + 1)}


def test_labels_exhaustive_zp2():
    fl = ordinary_zp2_flag(3, 2)
    cells = partition(tp1(2), fl, "S_jk")
    assert sum(map(len, cells.values())) == 2520
    for (j, k) in cells:
        assert 0 <= j <= k <= 3


@pytest.mark.parametrize("r,j,p", [(3, 1, 2), (3, 2, 3), (2, 0, 5), (4, 2, 2)])
def test_grassmannian_fp_count(r, j, p):
    ctx = RingCtx(p, 1)
    D = canonicalize([unit_vector(i, 2 * r) for i in range(r)], ctx, 2 * r)
    G = grassmannian(D, j)
    assert len(G) == grassmannian_count(r, j, p)
    assert len(set(G.points)) == len(G)


@pytest.mark.parametrize("j,k", [(0, 1), (1, 1), (0, 2), (1, 2), (2, 3), (1, 3), (0, 3)])
def test_grassmannian_zp2_count_vs_exhaustive(j, k):
    p, r = 2, 3
    ctx = RingCtx(p, 2)
    D = canonicalize([unit_vector(i, 2 * r) for i in range(r)], ctx, 2 * r)
    G = grassmannian(D, j, k)
    assert len(G) == grassmannian_count(r, j, p, k)
    # exhaustive: all subgroups of (Z/4)^3 built layer by layer as element sets,
    # then filtered by type (Z/2)^{k-j} + (Z/4)^j
    from itertools import product

    vecs = list(product(range(4), repeat=3))
    layer = {frozenset({(0, 0, 0)})}
    every = set(layer)
    for _ in range(3):
        layer = {span_set(list(S) + [v], 4, 3) for S in layer for v in vecs if v not in S}
        every |= layer
    subs = {S for S in every
            if len(S) == 2 ** (k - j) * 4**j and sum(1 for v in S if all(2 * x % 4 == 0 for x in v)) == 2**k}
    assert len(subs) == len(G)
    assert {frozenset(v[:3] for v in submodule_set(w)) for w in G.points} == subs


def test_fiber_stats_examples():
    fl = ordinary_fp_flag(3, 2)
    cell = partition(tp(3, 2), fl, "S_j")[(1,)]
    fr = fiber_stats(cell, fl.Dg, grassmannian(fl.Dg, 1), fl.S)
    assert fr.uniform and fr.common_count == 8 and fr.total == len(cell)

    fl3 = nonordinary_fp_flag(3, 3)
    cell = partition(tp(3, 3), fl3, "Sstar_j")[(0,)]
    fr = fiber_stats(cell, fl3.Dg1, grassmannian(fl3.Dg1, 0), fl3.S)
    assert fr.common_count == 972

    fr = fiber_stats([], fl.Dg, GrassmannianIndex("empty", []), fl.S)
    assert fr.counts == {} and fr.uniform and fr.total == 0


def test_fiber_stats_rejects_wrong_target():
    fl = ordinary_fp_flag(3, 2)
    cell = partition(tp(3, 2), fl, "S_j")[(1,)]
    with pytest.raises(DomainError):
        fiber_stats(cell, fl.Dg, grassmannian(fl.Dg, 2), fl.S)


def test_a23_against_element_set_oracle():
    # independent census by element sets, no echelon forms involved
    p, g = 2, 3
    D = span_set([unit_vector(0, 6), unit_vector(1, 6)], p, 6)
    got = Counter()
    for W in isotropic_brute(g, 2, p):
        Wp = perp_set(W, g, p)
        got[(len(W & D).bit_length() - 1, len(Wp & D).bit_length() - 1)] += 1
    want = {k: v(p) for k, v in A23_TABLE.items() if v(p)}
    assert dict(got) == want
    assert verify_a23(2).passed


def test_a23_p3():
    assert verify_a23(3).passed


@pytest.mark.parametrize("g,p", [(1, 2), (2, 2), (3, 2), (1, 3), (2, 3), (3, 3)])
def test_fiber_laws(g, p):
    rep = verify_fiber_laws(g, p, cache=cache)
    assert rep.passed, rep.failures()


def test_a24_p2_suite():
    rep = verify_a24(2, cache=cache)
    assert rep.passed, rep.failures()


# -- choice independence ------------------------------------------------------


def _prop438_numbers(rep):
    return {c.name: c.actual for c in rep.checks}


def test_omega_choice_independence_p3_conjugated():
    ctx = RingCtx(3, 1)
    f = make_fp2(3, ctx)
    base = _prop438_numbers(verify_prop438(3, cache=cache))
    rng = random.Random(11)
    for _ in range(2):
        M = random_symplectic(3, ctx, rng)
        Minv = symplectic_inverse(M, 3, 3)
        assert mat_mul(M, Minv, 3) == [[int(i == j) for j in range(6)] for i in range(6)]
        f2 = f.conjugate(M, Minv)
        fl = nonordinary_fp_flag(3, 3, f2)
        rep = verify_prop438(3, fp2=f2, flags=fl, cache=cache)
        assert rep.passed, rep.failures()
        assert _prop438_numbers(rep) == base


def test_omega_choice_independence_p5_two_nonresidues():
    reps = []
    for d in (2, 3):
        f = make_fp2(3, RingCtx(5, 1), d)
        rep = verify_lemma4312(5, fp2=f, flags=nonordinary_fp_flag(3, 5, f), cache=cache)
        assert rep.passed, rep.failures()
        reps.append(_prop438_numbers(rep))
    assert reps[0] == reps[1]


def test_flag_choice_independence_fp():
    p, g = 3, 3
    ctx = RingCtx(p, 1)
    subs = tp(g, p)
    fl0 = ordinary_fp_flag(g, p)
    fn0 = nonordinary_fp_flag(g, p)
    base_o = census(subs, fl0, "S_j")
    base_n = census(subs, fn0, "Sstar_j")
    base_w = census(subs, fn0, "Sdoubleprime_i")
    rng = random.Random(5)
    for _ in range(3):
        M = random_symplectic(g, ctx, rng)
        Minv = symplectic_inverse(M, g, p)
        fl = FlagData(fl0.S, Dg=transform_submodule(fl0.Dg, M))
        assert census(subs, fl, "S_j") == base_o
        D = transform_submodule(fn0.Dg1, M)
        fn = FlagData(fn0.S, Dg1=D, Dg1_perp=orthogonal(D, fn0.S), fp2=fn0.fp2.conjugate(M, Minv))
        assert census(subs, fn, "Sstar_j") == base_n
        assert census(subs, fn, "Sdoubleprime_i") == base_w


def test_flag_choice_independence_index():
    # different omega-stable D_2 candidates give the same good/bad fiber numbers
    base = _prop438_numbers(verify_prop438(3, cache=cache))
    for idx in (1, 5):
        fl = nonordinary_fp_flag(3, 3, index=idx)
        assert _prop438_numbers(verify_prop438(3, flags=fl, cache=cache)) == base


def test_flag_choice_independence_zp2():
    p = 2
    ctx = RingCtx(p, 2)
    subs = tp1(p)
    base_o = census(subs, ordinary_zp2_flag(3, p), "S_jk")
    base_n = census(subs, nonordinary_zp2_flag(3, p), "Sstar_jk_mu")
    rng = random.Random(9)
    for _ in range(3):
        M = random_symplectic(3, ctx, rng)
        o = ordinary_zp2_flag(3, p)
        fl = FlagData(o.S, Dg=transform_submodule(o.Dg, M))
        assert census(subs, fl, "S_jk") == base_o
        assert census(subs, nonordinary_zp2_flag(3, p, transform=M), "Sstar_jk_mu") == base_n


def test_all_schemes_listed():
    assert len(SCHEMES) == 5


@pytest.mark.slow
def test_a24_p3_suite():
    rep = verify_a24(3, cache=cache)
    assert rep.passed, rep.failures()
