"""Symplectic ambient modules and enumeration of isotropic submodules.

The T_p index set S_g is the set of Lagrangian subspaces of F_p^{2g}; the
T_{p,i} index set S_{g,i} is the set of isotropic submodules of (Z/p^2)^{2g}
of type (Z/p^2)^{g-i} + (Z/p)^{2i}.

Enumeration fills reduced echelon forms row by row (last row first), each new
row constrained by linear isotropy conditions against the rows already placed,
so every leaf is a distinct subspace.  T_{p,i} submodules are built as lifts of
their reduction ``V = W mod p``: ``W cap pB = p V^perp`` and the lifts of a
basis of V form an affine family cut out by the mod-p^2 isotropy equations.
"""
from __future__ import annotations

import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from functools import reduce
from itertools import product
from typing import Iterator, Sequence

from .finmod import (
    DomainError,
    RingCtx,
    Submodule,
    canonicalize,
    kernel_gens,
    mat_mul,
    module_type,
    nullspace_mod_p,
    rref_mod_p,
    solve_affine_mod_p,
    standard_gram,
)

log = logging.getLogger(__name__)

DEFAULT_BUDGET = 10**7


class BudgetExceeded(RuntimeError):
    def __init__(self, what: str, predicted: int, cap: int):
        super().__init__(f"{what}: predicted {predicted} objects exceeds budget {cap}")
        self.predicted = predicted
        self.cap = cap


@dataclass(frozen=True)
class SymplecticSpace:
    ctx: RingCtx
    g: int

    @property
    def n(self) -> int:
        return 2 * self.g

    @property
    def gram(self) -> list[list[int]]:
        return standard_gram(self.g, self.ctx.modulus)


@dataclass(frozen=True)
class HeckeType:
    kind: str  # "Tp" or "Tpi"
    i: int = 0

    def __post_init__(self):
        if self.kind not in ("Tp", "Tpi"):
            raise DomainError(f"unknown Hecke type {self.kind!r}")

    @property
    def e(self) -> int:
        return 1 if self.kind == "Tp" else 2

    def label(self) -> str:
        return "Tp" if self.kind == "Tp" else f"Tp{self.i}"


def pairing(x: Sequence[int], y: Sequence[int], S: SymplecticSpace) -> int:
    g, mod = S.g, S.ctx.modulus
    return sum(x[i] * y[g + i] - x[g + i] * y[i] for i in range(g)) % mod


def _pair_int(x: Sequence[int], y: Sequence[int], g: int) -> int:
    return sum(x[i] * y[g + i] - x[g + i] * y[i] for i in range(g))


def is_isotropic(w: Submodule, S: SymplecticSpace) -> bool:
    rows = w.gens
    return all(pairing(a, b, S) == 0 for k, a in enumerate(rows) for b in rows[k + 1 :])


def orthogonal(w: Submodule, S: SymplecticSpace) -> Submodule:
    """W^perp = {v : <w, v> = 0 for all w in W}."""
    if not w.gens:
        return canonicalize([[int(i == j) for j in range(S.n)] for i in range(S.n)], S.ctx, S.n)
    gj = mat_mul(w.gens, S.gram, S.ctx.modulus)
    return canonicalize(kernel_gens(gj, S.n, S.ctx), S.ctx, S.n)


def intersect(a: Submodule, b: Submodule, S: SymplecticSpace) -> Submodule:
    """A cap B = (A^perp + B^perp)^perp."""
    ap, bp = orthogonal(a, S), orthogonal(b, S)
    return orthogonal(canonicalize(list(ap.gens) + list(bp.gens), S.ctx, S.n), S)


# ---------------------------------------------------------------------------
# closed-form counts


def gaussian_binomial(n: int, k: int, q: int) -> int:
    if k < 0 or k > n:
        return 0
    num = reduce(lambda acc, i: acc * (q ** (n - i) - 1), range(k), 1)
    den = reduce(lambda acc, i: acc * (q ** (i + 1) - 1), range(k), 1)
    return num // den


def count_isotropic(g: int, k: int, p: int) -> int:
    """Number of isotropic k-subspaces of symplectic F_p^{2g}."""
    if k > g:
        return 0
    return gaussian_binomial(g, k, p) * reduce(lambda acc, i: acc * (p ** (g - i) + 1), range(k), 1)


def count_lagrangian(g: int, p: int) -> int:
    return count_isotropic(g, g, p)


def count_tpi(g: int, p: int, i: int) -> int:
    m = g - i
    return count_isotropic(g, m, p) * p ** (m * (m + 1) // 2)


def _check_budget(what: str, predicted: int, budget: int | None) -> None:
    cap = DEFAULT_BUDGET if budget is None else budget
    if predicted > cap:
        raise BudgetExceeded(what, predicted, cap)


# ---------------------------------------------------------------------------
# echelon-form enumeration over F_p


def _fill_rows(n, k, p, gram, placed, next_pivot_bound):
    """Yield RREF row lists (top row first) completing ``placed`` (bottom rows)."""
    i = k - len(placed) - 1  # index of the row being placed
    if i < 0:
        yield list(placed)
        return
    later_pivots = [next(c for c, x in enumerate(r) if x) for r in placed]
    for c in range(next_pivot_bound - 1, i - 1, -1):
        free = [f for f in range(c + 1, n) if f not in later_pivots]
        if gram is None:
            for vals in product(range(p), repeat=len(free)):
                row = [0] * n
                row[c] = 1
                for f, x in zip(free, vals):
                    row[f] = x
                yield from _fill_rows(n, k, p, gram, [row] + placed, c)
            continue
        # linear conditions <row, r> = 0 for r in placed
        gr = [[sum(gram[a][b] * r[b] for b in range(n)) % p for a in range(n)] for r in placed]
        eqs = [[g_r[f] for f in free] for g_r in gr]
        rhs = [(-g_r[c]) % p for g_r in gr]
        sol = solve_affine_mod_p(eqs, rhs, len(free), p)
        if sol is None:
            continue
        x0, basis = sol
        for coeffs in product(range(p), repeat=len(basis)):
            row = [0] * n
            row[c] = 1
            for idx, f in enumerate(free):
                row[f] = (x0[idx] + sum(cf * b[idx] for cf, b in zip(coeffs, basis))) % p
            yield from _fill_rows(n, k, p, gram, [row] + placed, c)


def _shape_sublist(args):
    n, k, p, gram, last_pivot = args
    out = []
    # the bottom row has its pivot at last_pivot and every entry to its right free
    for vals in product(range(p), repeat=n - last_pivot - 1):
        row = [0] * n
        row[last_pivot] = 1
        row[last_pivot + 1 :] = list(vals)
        out.extend(tuple(map(tuple, rs)) for rs in _fill_rows(n, k, p, gram, [row], last_pivot))
    return out


def enumerate_subspaces(
    n: int, k: int, p: int, gram: Sequence[Sequence[int]] | None = None, workers: int = 1
) -> list[tuple[tuple[int, ...], ...]]:
    """All k-dim subspaces of F_p^n (isotropic for ``gram`` when given) as sorted RREF tuples."""
    if k == 0:
        return [()]
    g = None if gram is None else [[x % p for x in r] for r in gram]
    tasks = [(n, k, p, g, c) for c in range(k - 1, n)]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as ex:
            parts = list(ex.map(_shape_sublist, tasks))
    else:
        parts = [_shape_sublist(t) for t in tasks]
    out = [x for part in parts for x in part]
    out.sort()
    return out


def enumerate_isotropic(g: int, k: int, p: int, workers: int = 1, budget: int | None = None) -> list[Submodule]:
    _check_budget(f"isotropic {k}-subspaces of F_{p}^{2 * g}", count_isotropic(g, k, p), budget)
    ctx = RingCtx(p, 1)
    gram = standard_gram(g, p)
    return [Submodule(ctx, 2 * g, rows) for rows in enumerate_subspaces(2 * g, k, p, gram, workers)]


def enumerate_tp(g: int, p: int, workers: int = 1, budget: int | None = None) -> list[Submodule]:
    """All Lagrangian subspaces of F_p^{2g}, canonical and sorted."""
    _check_budget(f"T_p set for g={g}, p={p}", count_lagrangian(g, p), budget)
    return enumerate_isotropic(g, g, p, workers=workers, budget=budget)


# ---------------------------------------------------------------------------
# T_{p,i}


def _lift_family(v_rows: Sequence[Sequence[int]], g: int, p: int):
    """Affine family of lifts of an isotropic V (RREF over F_p) to Z/p^2.

    Returns (U rref, U pivots, quotient columns, particular solution, basis)
    or None if no isotropic lift exists.  Unknowns are y[r][q] for each row r
    of V and each quotient column q (non-pivot column of U = V^perp).
    """
    n = 2 * g
    gram = standard_gram(g, p)
    U_rows = nullspace_mod_p(mat_mul(v_rows, gram, p), n, p) if v_rows else [[int(i == j) for j in range(n)] for i in range(n)]
    urref, upiv = rref_mod_p(U_rows, p)
    qcols = [c for c in range(n) if c not in upiv]
    m = len(v_rows)
    nq = len(qcols)
    eqs, rhs = [], []
    for r in range(m):
        for s in range(r + 1, m):
            c0 = _pair_int(v_rows[r], v_rows[s], g)
            assert c0 % p == 0
            eq = [0] * (m * nq)
            # <v_r, y_s> + <y_r, v_s>
            for qi, q in enumerate(qcols):
                e_q = [int(t == q) for t in range(n)]
                eq[s * nq + qi] = _pair_int(v_rows[r], e_q, g) % p
                eq[r * nq + qi] = _pair_int(e_q, v_rows[s], g) % p
            eqs.append(eq)
            rhs.append((-(c0 // p)) % p)
    sol = solve_affine_mod_p(eqs, rhs, m * nq, p)
    if sol is None:
        return None
    return urref, upiv, qcols, sol[0], sol[1]


def lifts_of(v_rows: Sequence[Sequence[int]], g: int, p: int) -> Iterator[Submodule]:
    """All isotropic W over Z/p^2 with W mod p = V and W cap pB = p V^perp."""
    fam = _lift_family(v_rows, g, p)
    if fam is None:
        return
    urref, upiv, qcols, x0, basis = fam
    ctx2 = RingCtx(p, 2)
    mod = p * p
    m, nq = len(v_rows), len(qcols)
    prows = tuple(tuple(p * x for x in u) for u in urref)
    for coeffs in product(range(p), repeat=len(basis)):
        y = [(x0[t] + sum(c * b[t] for c, b in zip(coeffs, basis))) % p for t in range(m * nq)]
        lifts = []
        for r in range(m):
            row = list(v_rows[r])
            for qi, q in enumerate(qcols):
                row[q] = (row[q] + p * y[r * nq + qi]) % mod
            lifts.append(tuple(row))
        yield Submodule(ctx2, 2 * g, tuple(lifts) + prows)


def _tpi_chunk(args):
    vlist, g, p = args
    return [w for v in vlist for w in lifts_of(v, g, p)]


def enumerate_tpi(g: int, p: int, i: int, workers: int = 1, budget: int | None = None) -> list[Submodule]:
    """All isotropic submodules of (Z/p^2)^{2g} of type (Z/p^2)^{g-i} + F_p^{2i}."""
    if not 1 <= i <= g - 1:
        raise DomainError(f"T_(p,i) needs 1 <= i <= g-1, got g={g}, i={i}")
    _check_budget(f"T_(p,{i}) set for g={g}, p={p}", count_tpi(g, p, i), budget)
    vs = enumerate_subspaces(2 * g, g - i, p, standard_gram(g, p), workers)
    if workers > 1:
        chunks = [(vs[k::workers], g, p) for k in range(workers)]
        with ProcessPoolExecutor(max_workers=workers) as ex:
            parts = list(ex.map(_tpi_chunk, chunks))
        out = [w for part in parts for w in part]
    else:
        out = _tpi_chunk((vs, g, p))
    out.sort()
    return out


def enumerate_hecke(g: int, p: int, ht: HeckeType, workers: int = 1, budget: int | None = None) -> list[Submodule]:
    if ht.kind == "Tp":
        return enumerate_tp(g, p, workers=workers, budget=budget)
    return enumerate_tpi(g, p, ht.i, workers=workers, budget=budget)


def predicted_count(g: int, p: int, ht: HeckeType) -> int:
    return count_lagrangian(g, p) if ht.kind == "Tp" else count_tpi(g, p, ht.i)


def lift_count(w4: Submodule, g: int, p: int) -> int:
    """Number of type-T_{p,1} isotropic W with W cap pB equal to the given W4."""
    ctx = w4.ctx
    if ctx.e != 2 or ctx.p != p or w4.n != 2 * g:
        raise DomainError("W4 must be a submodule of (Z/p^2)^{2g}")
    if w4.lift_rows():
        raise DomainError("W4 must be p-torsion (contained in pB)")
    t = module_type(w4)
    if t.a != g + 1:
        raise DomainError(f"W4 must have rank g+1={g + 1}, got {t.a}")
    urows, _ = w4.torsion_space()
    gram = standard_gram(g, p)
    vrows = nullspace_mod_p(mat_mul(urows, gram, p), 2 * g, p)
    vrref, _ = rref_mod_p(vrows, p)
    # V = U^perp must be isotropic and satisfy V^perp = U
    if any(_pair_int(a, b, g) % p for a in vrref for b in vrref):
        raise DomainError("W4/p is not coisotropic")
    fam = _lift_family(vrref, g, p)
    if fam is None:
        return 0
    return p ** len(fam[4])
