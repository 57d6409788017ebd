"""Exact linear algebra over Z/p and Z/p^2.

Submodules of (Z/p^e)^n are stored as canonical generator matrices:

* e = 1: the reduced row echelon form.
* e = 2: rows ``v_i + p*y_i`` lifting the RREF of the reduction ``V = W mod p``,
  followed by rows ``p*u_j`` for the RREF of ``U = (W cap pB)/p``.  Each
  ``y_i`` is reduced modulo ``U`` (zero on the pivot columns of ``U``), which
  makes the form unique.

Two generator sets span the same submodule iff their canonical forms are equal,
so sets of submodules deduplicate by tuple equality.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

Row = tuple[int, ...]
Rows = tuple[Row, ...]


class DomainError(ValueError):
    """An operation was called outside its domain (wrong ring, shape, prime)."""


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    i = 2
    while i * i <= n:
        if n % i == 0:
            return False
        i += 1
    return True


@dataclass(frozen=True)
class RingCtx:
    p: int
    e: int = 1

    def __post_init__(self):
        if not is_prime(self.p):
            raise DomainError(f"p={self.p} is not prime")
        if self.e not in (1, 2):
            raise DomainError(f"exponent e={self.e} not supported (e in {{1, 2}})")

    @property
    def modulus(self) -> int:
        return self.p**self.e

    def residue(self) -> "RingCtx":
        return RingCtx(self.p, 1)


# ---------------------------------------------------------------------------
# F_p helpers


def rref_mod_p(rows: Iterable[Sequence[int]], p: int) -> tuple[list[list[int]], list[int]]:
    """Row reduce over F_p. Returns (nonzero RREF rows, pivot columns)."""
    mat = [[x % p for x in r] for r in rows]
    if not mat:
        return [], []
    ncols = len(mat[0])
    pivots: list[int] = []
    r = 0
    for c in range(ncols):
        if r == len(mat):
            break
        piv = next((i for i in range(r, len(mat)) if mat[i][c]), None)
        if piv is None:
            continue
        mat[r], mat[piv] = mat[piv], mat[r]
        inv = pow(mat[r][c], -1, p)
        row = [x * inv % p for x in mat[r]]
        mat[r] = row
        for i in range(len(mat)):
            if i != r and mat[i][c]:
                f = mat[i][c]
                mat[i] = [(x - f * y) % p for x, y in zip(mat[i], row)]
        pivots.append(c)
        r += 1
    return mat[:r], pivots


def rank_mod_p(rows: Iterable[Sequence[int]], p: int) -> int:
    return len(rref_mod_p(rows, p)[1])


def nullspace_mod_p(rows: Sequence[Sequence[int]], ncols: int, p: int) -> list[list[int]]:
    """Basis of {x : rows . x = 0} over F_p."""
    red, pivots = rref_mod_p(rows, p)
    free = [c for c in range(ncols) if c not in pivots]
    basis = []
    for f in free:
        v = [0] * ncols
        v[f] = 1
        for r, c in zip(red, pivots):
            v[c] = -r[f] % p
        basis.append(v)
    return basis


def solve_affine_mod_p(
    eqs: Sequence[Sequence[int]], rhs: Sequence[int], nvars: int, p: int
) -> tuple[list[int], list[list[int]]] | None:
    """Solve ``eqs . x = rhs`` over F_p.

    Returns a particular solution and a nullspace basis, or None when the
    system is inconsistent.
    """
    if not eqs:
        return [0] * nvars, [[int(i == j) for j in range(nvars)] for i in range(nvars)]
    aug = [list(e) + [b] for e, b in zip(eqs, rhs)]
    red, pivots = rref_mod_p(aug, p)
    if pivots and pivots[-1] == nvars:
        return None
    x = [0] * nvars
    for r, c in zip(red, pivots):
        x[c] = r[nvars]
    free = [c for c in range(nvars) if c not in pivots]
    basis = []
    for f in free:
        v = [0] * nvars
        v[f] = 1
        for r, c in zip(red, pivots):
            v[c] = -r[f] % p
        basis.append(v)
    return x, basis


def reduce_mod_subspace(v: Sequence[int], rref: Sequence[Sequence[int]], pivots: Sequence[int], p: int) -> list[int]:
    """Unique representative of v + span(rref) vanishing on the pivot columns."""
    out = [x % p for x in v]
    for r, c in zip(rref, pivots):
        f = out[c]
        if f:
            out = [(x - f * y) % p for x, y in zip(out, r)]
    return out


# ---------------------------------------------------------------------------
# Z/p^e matrices


def mat_mul(a: Sequence[Sequence[int]], b: Sequence[Sequence[int]], mod: int) -> list[list[int]]:
    bt = list(zip(*b))
    return [[sum(x * y for x, y in zip(row, col)) % mod for col in bt] for row in a]


def transpose(a: Sequence[Sequence[int]]) -> list[list[int]]:
    return [list(r) for r in zip(*a)]


def identity(n: int) -> list[list[int]]:
    return [[int(i == j) for j in range(n)] for i in range(n)]


def _valuation(x: int, p: int, e: int) -> int:
    """p-adic valuation of a residue mod p^e (e for zero)."""
    x %= p**e
    if x == 0:
        return e
    v = 0
    while x % p == 0:
        x //= p
        v += 1
    return v


def kernel_gens(a: Sequence[Sequence[int]], ncols: int, ctx: RingCtx) -> list[list[int]]:
    """Generators of {x : a . x = 0} over Z/p^e, via a local Smith reduction."""
    p, e, mod = ctx.p, ctx.e, ctx.modulus
    A = [[x % mod for x in r] for r in a]
    m = len(A)
    Q = identity(ncols)  # columns are tracked: A_orig . Q = P^-1 . A
    diag: list[int] = []
    t = 0
    while t < min(m, ncols):
        best = None
        for i in range(t, m):
            for j in range(t, ncols):
                v = _valuation(A[i][j], p, e)
                if v < e and (best is None or v < best[0]):
                    best = (v, i, j)
                    if v == 0:
                        break
            if best is not None and best[0] == 0:
                break
        if best is None:
            break
        v, i, j = best
        A[t], A[i] = A[i], A[t]
        for r in A:
            r[t], r[j] = r[j], r[t]
        for r in Q:
            r[t], r[j] = r[j], r[t]
        unit = A[t][t] // p**v
        inv = pow(unit, -1, mod)
        for r in A:
            r[t] = r[t] * inv % mod
        for r in Q:
            r[t] = r[t] * inv % mod
        piv = p**v
        for i2 in range(m):
            if i2 != t and A[i2][t]:
                f = A[i2][t] // piv
                A[i2] = [(x - f * y) % mod for x, y in zip(A[i2], A[t])]
        for j2 in range(t + 1, ncols):
            if A[t][j2]:
                f = A[t][j2] // piv
                for r in A:
                    r[j2] = (r[j2] - f * r[t]) % mod
                for r in Q:
                    r[j2] = (r[j2] - f * r[t]) % mod
        diag.append(v)
        t += 1
    gens = []
    for col in range(ncols):
        scale = p ** (e - diag[col]) if col < len(diag) else 1
        if scale % mod == 0:
            continue
        gens.append([Q[r][col] * scale % mod for r in range(ncols)])
    return gens


# ---------------------------------------------------------------------------
# Submodules


@dataclass(frozen=True, order=True)
class ModuleType:
    """Abstract type (Z/p)^a + (Z/p^2)^b."""

    a: int
    b: int

    def order_exponent(self) -> int:
        return self.a + 2 * self.b


@dataclass(frozen=True)
class Submodule:
    ctx: RingCtx
    n: int
    gens: Rows = field(default=())

    def sort_key(self):
        return self.gens

    def __lt__(self, other: "Submodule") -> bool:
        return self.gens < other.gens

    @property
    def ambient_rank(self) -> int:
        return self.n

    def rows(self) -> list[list[int]]:
        return [list(r) for r in self.gens]

    def lift_rows(self) -> list[Row]:
        """Rows with a unit entry (generators of the free part); empty for e=1."""
        if self.ctx.e == 1:
            return list(self.gens)
        p = self.ctx.p
        return [r for r in self.gens if any(x % p for x in r)]

    def reduction_space(self) -> tuple[list[list[int]], list[int]]:
        """RREF of W mod p (the space V)."""
        return rref_mod_p(self.gens, self.ctx.p)

    def torsion_space(self) -> tuple[list[list[int]], list[int]]:
        """RREF of (W cap pB)/p as an F_p-subspace (the space U); W itself for e=1."""
        p = self.ctx.p
        if self.ctx.e == 1:
            return rref_mod_p(self.gens, p)
        rows = [[x // p for x in r] for r in self.gens if not any(x % p for x in r)]
        return rref_mod_p(rows, p)

    def __len__(self) -> int:
        return len(self.gens)

    def __contains__(self, v: Sequence[int]) -> bool:
        return contains(self, v)


def zero_submodule(n: int, ctx: RingCtx) -> Submodule:
    return Submodule(ctx, n, ())


def full_submodule(n: int, ctx: RingCtx) -> Submodule:
    return canonicalize(identity(n), ctx, n)


def canonicalize(gens: Iterable[Sequence[int]], ctx: RingCtx, n: int | None = None) -> Submodule:
    """Canonical form of the submodule spanned by ``gens``."""
    rows = [list(r) for r in gens]
    if n is None:
        if not rows:
            raise DomainError("ambient rank needed for an empty generator list")
        n = len(rows[0])
    if any(len(r) != n for r in rows):
        raise DomainError("generator rows must have ambient_rank columns")
    p, mod = ctx.p, ctx.modulus
    if ctx.e == 1:
        red, _ = rref_mod_p(rows, p)
        return Submodule(ctx, n, tuple(tuple(r) for r in red))

    mat = [[x % mod for x in r] for r in rows]
    piv_rows: list[list[int]] = []
    rest = mat
    for c in range(n):
        k = next((i for i, r in enumerate(rest) if r[c] % p), None)
        if k is None:
            continue
        row = rest.pop(k)
        inv = pow(row[c], -1, mod)
        row = [x * inv % mod for x in row]
        rest = [[(x - r[c] * y) % mod for x, y in zip(r, row)] if r[c] else r for r in rest]
        piv_rows = [[(x - r[c] * y) % mod for x, y in zip(r, row)] if r[c] else r for r in piv_rows]
        piv_rows.append(row)
    vbar = [[x % p for x in r] for r in piv_rows]
    tors = [[x // p for x in r] for r in rest]
    urref, upiv = rref_mod_p(vbar + tors, p)
    lifts = []
    for r, v in zip(piv_rows, vbar):
        y = [(x - d) // p for x, d in zip(r, v)]
        y = reduce_mod_subspace(y, urref, upiv, p)
        lifts.append(tuple((d + p * t) % mod for d, t in zip(v, y)))
    lifts.sort(key=lambda r: [i for i, x in enumerate(r) if x % p][0])
    prows = [tuple(p * x for x in u) for u in urref]
    return Submodule(ctx, n, tuple(lifts) + tuple(prows))


def module_type(w: Submodule) -> ModuleType:
    if w.ctx.e == 1:
        return ModuleType(len(w.gens), 0)
    b = len(w.lift_rows())
    u = len(w.gens) - b
    return ModuleType(u - b, b)


def cardinality(w: Submodule) -> int:
    return w.ctx.p ** module_type(w).order_exponent()


def f_dim(w: Submodule) -> int:
    """F_p-dimension (e=1) or length log_p|W| (e=2)."""
    return module_type(w).order_exponent()


def submodule_sum(*ws: Submodule) -> Submodule:
    ctx, n = ws[0].ctx, ws[0].n
    return canonicalize([r for w in ws for r in w.gens], ctx, n)


def contains(w: Submodule, v: Sequence[int]) -> bool:
    return canonicalize(list(w.gens) + [list(v)], w.ctx, w.n) == w


def is_subset(a: Submodule, b: Submodule) -> bool:
    return submodule_sum(a, b) == b


def scale(w: Submodule, c: int) -> Submodule:
    """The submodule c*W."""
    return canonicalize([[c * x for x in r] for r in w.gens], w.ctx, w.n)


def reduce_mod_p(w: Submodule) -> Submodule:
    """Image of W in (Z/p)^n."""
    return canonicalize(w.gens, w.ctx.residue(), w.n)


def apply_matrix(w: Submodule, mat: Sequence[Sequence[int]]) -> Submodule:
    """Image of W under the linear map x -> mat . x (rows are transposed vectors)."""
    mod = w.ctx.modulus
    mt = transpose(mat)
    return canonicalize(mat_mul(w.gens, mt, mod) if w.gens else [], w.ctx, w.n)


def coordinates_to_ambient(coords: Iterable[Sequence[int]], basis: Sequence[Sequence[int]], ctx: RingCtx) -> Submodule:
    """Submodule spanned by coordinate rows taken relative to a basis of a free summand."""
    n = len(basis[0])
    rows = mat_mul(list(coords), basis, ctx.modulus) if basis else []
    return canonicalize(rows, ctx, n)


# ---------------------------------------------------------------------------
# F_{p^2}-structures


def nonresidue(p: int) -> int:
    if p == 2:
        raise DomainError("p=2 has no quadratic non-residue unit")
    for d in range(2, p):
        if pow(d, (p - 1) // 2, p) == p - 1:
            return d
    raise DomainError(f"no non-residue mod {p}")


def standard_gram(g: int, mod: int) -> list[list[int]]:
    """J_{2g} = [[0, I], [-I, 0]]."""
    n = 2 * g
    J = [[0] * n for _ in range(n)]
    for i in range(g):
        J[i][g + i] = 1
        J[g + i][i] = (-1) % mod
    return J


@dataclass(frozen=True)
class Fp2Structure:
    ctx: RingCtx
    g: int
    d: int
    omega: Rows

    def __post_init__(self):
        mod = self.ctx.modulus
        n = 2 * self.g
        om = [list(r) for r in self.omega]
        sq = mat_mul(om, om, mod)
        if sq != [[self.d * int(i == j) % mod for j in range(n)] for i in range(n)]:
            raise DomainError("omega^2 != d*I")
        J = standard_gram(self.g, mod)
        lhs = mat_mul(transpose(om), J, mod)
        rhs = mat_mul(J, om, mod)
        if any((x + y) % mod for rl, rr in zip(lhs, rhs) for x, y in zip(rl, rr)):
            raise DomainError("omega is not anti-self-adjoint for J")

    def apply(self, v: Sequence[int]) -> list[int]:
        mod = self.ctx.modulus
        return [sum(a * x for a, x in zip(row, v)) % mod for row in self.omega]

    def conjugate(self, s: Sequence[Sequence[int]], s_inv: Sequence[Sequence[int]]) -> "Fp2Structure":
        """The structure S omega S^-1, for S symplectic."""
        mod = self.ctx.modulus
        om = mat_mul(mat_mul(s, self.omega, mod), s_inv, mod)
        return Fp2Structure(self.ctx, self.g, self.d, tuple(tuple(r) for r in om))


def make_fp2(g: int, ctx: RingCtx, d: int | None = None) -> Fp2Structure:
    if ctx.p == 2:
        raise DomainError("F_{p^2}-structures via omega need odd p")
    if d is None:
        d = nonresidue(ctx.p)
    elif pow(d, (ctx.p - 1) // 2, ctx.p) != ctx.p - 1:
        raise DomainError(f"d={d} is not a non-residue mod {ctx.p}")
    mod = ctx.modulus
    n = 2 * g
    om = [[0] * n for _ in range(n)]
    for i in range(g):
        om[g + i][i] = 1
        om[i][g + i] = d % mod
    return Fp2Structure(ctx, g, d % mod, tuple(tuple(r) for r in om))


def omega_closure(w: Submodule, f: Fp2Structure) -> Submodule:
    return canonicalize(list(w.gens) + [f.apply(r) for r in w.gens], w.ctx, w.n)


def is_omega_stable(w: Submodule, f: Fp2Structure) -> bool:
    return omega_closure(w, f) == w


def omega_span_dim(w: Submodule, f: Fp2Structure) -> int:
    """Dimension over F_{p^2} of F_{p^2} W.

    For e=2 this is the minimal number of generators of the closure over
    O/p^2, i.e. (a + b)/2 for closure type (a, b).
    """
    cl = omega_closure(w, f)
    t = module_type(cl)
    return (t.a + t.b) // 2
