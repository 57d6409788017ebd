"""Brute-force reference implementations used only by the tests.

Everything here works with explicit element sets, never with echelon forms,
so it shares no logic with the package.
"""
from __future__ import annotations

from itertools import product


def span_set(gens, mod, n):
    """All Z/mod-combinations of gens, as a frozenset of tuples."""
    gens = [tuple(x % mod for x in g) for g in gens]
    out = {tuple([0] * n)}
    frontier = list(out)
    while frontier:
        nxt = []
        for v in frontier:
            for g in gens:
                w = tuple((a + b) % mod for a, b in zip(v, g))
                if w not in out:
                    out.add(w)
                    nxt.append(w)
        frontier = nxt
    return frozenset(out)


def symp(x, y, g, mod):
    return sum(x[i] * y[g + i] - x[g + i] * y[i] for i in range(g)) % mod


def all_vectors(n, mod):
    return [tuple(v) for v in product(range(mod), repeat=n)]


def subspaces_brute(n, k, p):
    """All k-dim subspaces of F_p^n as element sets."""
    vecs = [v for v in all_vectors(n, p) if any(v)]
    seen = set()
    layer = {frozenset({tuple([0] * n)})}
    for _ in range(k):
        nxt = set()
        for S in layer:
            for v in vecs:
                if v not in S:
                    nxt.add(span_set(list(S) + [v], p, n))
        layer = nxt
    seen |= layer
    return seen


def isotropic_brute(g, k, p):
    return [S for S in subspaces_brute(2 * g, k, p) if all(symp(x, y, g, p) == 0 for x in S for y in S)]


def perp_set(S, g, mod):
    return frozenset(v for v in all_vectors(2 * g, mod) if all(symp(v, s, g, mod) == 0 for s in S))


def dim_of(S, p):
    n, d = len(S), 0
    while n > 1:
        n //= p
        d += 1
    return d


def naive_tp1(p=2):
    """Isotropic W in (Z/p^2)^6 with W = (Z/p^2)^2 + (Z/p)^2, as element sets.

    pW = V is an isotropic plane of F_p^6 and W cap pB = p V^perp, so each V
    contributes span(v_1 + p y_1, v_2 + p y_2, p V^perp) for y_i running over
    all of F_p^6; survivors are filtered by isotropy and order, then deduped.
    """
    g, mod = 3, p * p
    out = set()
    for V in isotropic_brute(g, 2, p):
        U = perp_set(V, g, p)
        basis = _basis_from_set(V, p)
        pU = [tuple(p * x for x in u) for u in U]
        reps = _coset_reps(U, p)
        for y1, y2 in product(reps, repeat=2):
            gens = [tuple((a + p * c) % mod for a, c in zip(basis[0], y1)),
                    tuple((a + p * c) % mod for a, c in zip(basis[1], y2))] + pU
            # bilinear, so isotropy on generators is enough
            if any(symp(x, y, g, mod) for x in gens for y in gens):
                continue
            W = span_set(gens, mod, 2 * g)
            if len(W) == p**6:
                out.add(W)
    return out


def _basis_from_set(S, p):
    basis = []
    cur = {tuple([0] * len(next(iter(S))))}
    for v in sorted(S):
        if v not in cur:
            basis.append(v)
            cur = span_set(basis, p, len(v))
    return basis


def _coset_reps(U, p):
    n = len(next(iter(U)))
    reps, covered = [], set()
    for v in all_vectors(n, p):
        if v in covered:
            continue
        reps.append(v)
        covered |= {tuple((a + b) % p for a, b in zip(v, u)) for u in U}
    return reps


def submodule_set(w):
    return span_set(w.gens, w.ctx.modulus, w.n)
