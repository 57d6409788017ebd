"""Hecke-algebra side: corank counts, decomposition coefficients, Satake action.

Coefficients are Laurent polynomials in a formal p.  Satake eigenvalues are
kept as exact monomial sums in the symbols ahat (ahat^g = a_0) and b_1..b_g.
"""
from __future__ import annotations

import time
from collections import Counter
from dataclasses import dataclass
from itertools import combinations, product
from math import prod

from .finmod import DomainError, rank_mod_p
from .lagrange import BudgetExceeded, DEFAULT_BUDGET
from .poly import P, LaurentPoly
from .report import VerificationReport


def b(n: int) -> int:
    return n * (n + 1) // 2


# ---------------------------------------------------------------------------
# symmetric matrices by corank


def count_symmetric_corank(n: int, p: int, i: int, budget: int | None = None) -> int:
    """Brute-force number of symmetric n x n matrices over F_p of corank exactly i."""
    return corank_distribution(n, p, budget)[i] if 0 <= i <= n else 0


_corank_memo: dict[tuple[int, int], dict[int, int]] = {}


def corank_distribution(n: int, p: int, budget: int | None = None) -> dict[int, int]:
    cap = DEFAULT_BUDGET if budget is None else budget
    total = p ** b(n)
    if total > cap:
        raise BudgetExceeded(f"symmetric {n}x{n} matrices over F_{p}", total, cap)
    if (n, p) in _corank_memo:
        return _corank_memo[(n, p)]
    idx = [(r, c) for r in range(n) for c in range(r, n)]
    dist = {i: 0 for i in range(n + 1)}
    for vals in product(range(p), repeat=len(idx)):
        m = [[0] * n for _ in range(n)]
        for (r, c), v in zip(idx, vals):
            m[r][c] = m[c][r] = v
        dist[n - rank_mod_p(m, p)] += 1
    _corank_memo[(n, p)] = dist
    return dist


def symmetric_rank_count(n: int, r: int) -> LaurentPoly:
    """Number of symmetric n x n matrices of rank r over F_p, as a polynomial in p (MacWilliams)."""
    if r < 0 or r > n:
        return LaurentPoly(0)
    s = r // 2
    num = LaurentPoly(1)
    den = LaurentPoly(1)
    for t in range(1, s + 1):
        num = num * P ** (2 * t)
        den = den * (P ** (2 * t) - 1)
    for t in range(r):
        num = num * (P ** (n - t) - 1)
    return num.divexact(den)


def R(n: int, i: int) -> LaurentPoly:
    """R_n(i): symmetric n x n matrices of corank exactly i, as a polynomial in p."""
    return symmetric_rank_count(n, n - i)


# ---------------------------------------------------------------------------
# decomposition coefficients


def _check_gi(g: int, i: int) -> None:
    if not (1 <= i <= g - 1) or g > 4:
        raise DomainError(f"need 1 <= i <= g-1 and g <= 4, got g={g}, i={i}")


def decomposition_coeffs(g: int, i: int) -> dict[tuple[int, int], LaurentPoly]:
    """(j, k) -> R_{k-j}(i) p^{-b(k-j)}, the coefficient of Phi_j Phi_k."""
    _check_gi(g, i)
    out = {}
    for j in range(g + 1):
        for k in range(j + i, g + 1):
            c = R(k - j, i)
            if c.terms:
                out[(j, k)] = c * P ** (-b(k - j))
    return out


def assemble_616(g: int, i: int) -> dict[str, LaurentPoly]:
    """Coefficients of y_{j,k} after Phi_j Phi_k(y) = p^{b(g-j)+b(g-k)} y_{j,k}."""
    out = {}
    for (j, k), c in decomposition_coeffs(g, i).items():
        coeff = c * P ** (b(g - j) + b(g - k))
        if not coeff.is_polynomial():
            raise DomainError(f"non-integral coefficient {coeff} for y{j}{k}")
        out[f"y{j}{k}"] = coeff
    return out


def assemble_625(g: int, i: int, y_coeffs: dict[str, LaurentPoly] | None = None) -> dict[str, LaurentPoly]:
    """Substitute the z-expansion of Phi_j Phi_k(y_1) into the y_{j,k} expansion.

    z_{j,k} is indexed by G(j, k, g-1), so terms with k > g-1 (or a negative
    index) drop out.  ``y_coeffs`` overrides the y_{j,k} coefficients, e.g. to
    substitute a printed table instead of the derived one.
    """
    ys = y_coeffs if y_coeffs is not None else assemble_616(g, i)
    out: dict[tuple[int, int], LaurentPoly] = {}

    def add(j, k, c):
        if 0 <= j <= k <= g - 1:
            out[(j, k)] = out.get((j, k), LaurentPoly(0)) + c

    for key, c in ys.items():
        j, k = int(key[1]), int(key[2])
        add(j, k, c)
        add(j - 1, k, c * P ** (g - j))
        add(j, k - 1, c * P ** (g - k))
        add(j - 1, k - 1, c * P ** (2 * g - j - k))
    return {f"z{j}{k}": c for (j, k), c in sorted(out.items()) if c.terms}


def assemble_427(g: int) -> dict[str, LaurentPoly]:
    """Sum over j of Phi_j(y_1) = p^{b(g-j)+g-j} z_{j-1} + p^{b(g-j)} z_j."""
    if g > 4 or g < 1:
        raise DomainError("g must be 1..4")
    out: dict[int, LaurentPoly] = {}
    for j in range(g + 1):
        for idx, c in ((j - 1, P ** (b(g - j) + g - j)), (j, P ** b(g - j))):
            if 0 <= idx <= g - 1:
                out[idx] = out.get(idx, LaurentPoly(0)) + c
    return {f"z{j}": out[j] for j in sorted(out)}


def phi_expansion_427(g: int) -> dict[int, dict[str, LaurentPoly]]:
    """Phi_j(y_1) in the z basis, one row per j."""
    rows = {}
    for j in range(g + 1):
        row = {}
        if j >= 1:
            row[f"z{j - 1}"] = P ** (b(g - j) + g - j)
        if j <= g - 1:
            row[f"z{j}"] = P ** b(g - j)
        rows[j] = row
    return rows


# ---------------------------------------------------------------------------
# Satake monomial engine
#
# An element of Z[U_i^{+-1}, V_i^{+-1}] is a Counter mapping (u_exps, v_exps) to
# integer coefficients.  Eigenvalues are Counters over (ahat_exp, b_exps).


def hecke_poly(g: int, terms: dict) -> Counter:
    return Counter({k: v for k, v in terms.items() if v})


def _poly_mul(x: Counter, y: Counter) -> Counter:
    out: Counter = Counter()
    for (u1, v1), c1 in x.items():
        for (u2, v2), c2 in y.items():
            key = (tuple(a + b_ for a, b_ in zip(u1, u2)), tuple(a + b_ for a, b_ in zip(v1, v2)))
            out[key] += c1 * c2
    return Counter({k: v for k, v in out.items() if v})


def U_I(g: int, I) -> Counter:
    """prod_{i in I} U_i prod_{i not in I} V_i (indices 1-based)."""
    u = tuple(int(t + 1 in I) for t in range(g))
    v = tuple(1 - x for x in u)
    return Counter({(u, v): 1})


def Phi(g: int, i: int) -> Counter:
    """S_T(Phi_i) = sum over #I = i of U_I."""
    out: Counter = Counter()
    for I in combinations(range(1, g + 1), i):
        out.update(U_I(g, set(I)))
    return out


def Tp(g: int) -> Counter:
    """prod_i (U_i + V_i), expanded."""
    out = Counter({(tuple([0] * g), tuple([0] * g)): 1})
    for t in range(g):
        e = tuple(int(s == t) for s in range(g))
        z = tuple([0] * g)
        out = _poly_mul(out, Counter({(e, z): 1, (z, e): 1}))
    return out


@dataclass(frozen=True)
class SatakeParams:
    g: int
    weight: str = "middle"  # or "b(g)-1", where b_1 = p

    def __post_init__(self):
        if self.weight not in ("middle", "b(g)-1"):
            raise DomainError(f"unknown weight class {self.weight!r}")

    def basis(self) -> list[frozenset]:
        idx = range(1, self.g + 1) if self.weight == "middle" else range(2, self.g + 1)
        idx = list(idx)
        return [frozenset(c) for r in range(len(idx) + 1) for c in combinations(idx, r)]


def satake_eigenvalue(op: Counter, I, params: SatakeParams) -> Counter:
    """Eigenvalue of op on f_I as a Counter over (a0_exp, (b_1..b_g exps)).

    U_i acts by ahat (i in I) or ahat b_i (i not in I); V_i by ahat b_i (i in I)
    or ahat (i not in I).  The ahat-exponent must be divisible by g and is
    returned as an a_0-exponent.
    """
    g = params.g
    I = frozenset(I)
    if params.weight == "b(g)-1" and 1 in I:
        raise DomainError("weight b(g)-1 basis uses I within {2..g}")
    if not I <= set(range(1, g + 1)):
        raise DomainError(f"I={set(I)} not within 1..{g}")
    out: Counter = Counter()
    for (u, v), c in op.items():
        ahat = sum(u) + sum(v)
        if ahat % g:
            raise DomainError(f"ahat exponent {ahat} not divisible by g={g}")
        bexp = tuple((u[t] if t + 1 not in I else 0) + (v[t] if t + 1 in I else 0) for t in range(g))
        out[(ahat // g, bexp)] += c
    return Counter({k: v for k, v in out.items() if v})


def monomial_str(ev: Counter, params: SatakeParams) -> str:
    parts = []
    for (a, bs), c in sorted(ev.items()):
        sym = ([f"a0^{a}" if a != 1 else "a0"] if a else [])
        for t, e in enumerate(bs):
            name = "p" if (t == 0 and params.weight == "b(g)-1") else f"b{t + 1}"
            if e:
                sym.append(name if e == 1 else f"{name}^{e}")
        m = "*".join(sym) or "1"
        parts.append(m if c == 1 else f"{c}*{m}")
    return " + ".join(parts) or "0"


def evaluate(ev: Counter, values: dict, modulus: int) -> int:
    """Residue of a monomial sum given residues a0, b1..bg (keys 'a0', 'b1', ...)."""
    total = 0
    for (a, bs), c in ev.items():
        term = c * _pow(values["a0"], a, modulus)
        for t, e in enumerate(bs):
            term *= _pow(values[f"b{t + 1}"], e, modulus)
        total += term
    return total % modulus


def _pow(x, e, mod):
    if e < 0:
        try:
            return pow(pow(x, -1, mod), -e, mod)
        except ValueError as exc:
            raise DomainError(f"{x} is not invertible mod {mod}") from exc
    return pow(x, e, mod)


def weil_residual(g: int, values: dict, modulus: int) -> int:
    """a_0^2 prod b_i - p^{b(g)} with p = b_1 (weight b(g)-1 convention)."""
    lhs = values["a0"] ** 2 * prod(values[f"b{t + 1}"] for t in range(g))
    return (lhs - values["b1"] ** b(g)) % modulus


# ---------------------------------------------------------------------------
# congruence data


def is_prime_small(n: int) -> bool:
    return n > 1 and all(n % d for d in range(2, int(n**0.5) + 1))


@dataclass(frozen=True)
class CongruenceSpec:
    """Frobenius eigenvalue data mod M = l^n and its mod-M^2 extension.

    a_0 = 1 + aM, b_3 = -1 + (a+b)M, p = -1 + tM, b_2 = 1 + sM (mod M^2).
    t and s are the free lifts; p_residue = -1 + tM.
    """

    l: int
    n: int
    a: int
    b: int
    t: int = 0
    s: int = 0

    def __post_init__(self):
        if self.l == 2 or not is_prime_small(self.l):
            raise DomainError(f"l must be an odd prime, got {self.l}")
        if self.n < 1:
            raise DomainError("n >= 1")
        if self.a % self.l == 0 or self.b % self.l == 0:
            raise DomainError("a, b must be units")
        if (self.a - self.b) % self.l == 0:
            raise DomainError("need a != b mod l")

    @property
    def M(self) -> int:
        return self.l**self.n

    @property
    def p_residue(self) -> int:
        return (-1 + self.t * self.M) % (self.M**2)

    def values(self, modulus: int | None = None) -> dict:
        M = self.M
        mod = modulus or M * M
        return {
            "a0": (1 + self.a * M) % mod,
            "b1": (-1 + self.t * M) % mod,
            "b2": (1 + self.s * M) % mod,
            "b3": (-1 + (self.a + self.b) * M) % mod,
        }

    def weil_consistent(self) -> bool:
        return weil_residual(3, self.values(), self.M**2) == 0


def admissible_pairs(l: int, n: int):
    M = l**n
    for a in range(1, M):
        if a % l == 0:
            continue
        for bb in range(1, M):
            if bb % l and (a - bb) % l:
                yield a, bb


def specialize(ev: Counter, spec: CongruenceSpec) -> tuple[int, int]:
    """(residue mod M, residue mod M^2)."""
    M = spec.M
    return evaluate(ev, spec.values(M), M), evaluate(ev, spec.values(), M * M)


def signed(x: int, mod: int) -> int:
    return x - mod if x > mod // 2 else x


F3 = frozenset({3})
SAT3 = SatakeParams(3, "b(g)-1")


_EV_MEMO: dict = {}


def _f3_eigen(name: str) -> Counter:
    if name not in _EV_MEMO:
        op = Tp(3) if name == "Tp" else Phi(3, int(name))
        _EV_MEMO[name] = satake_eigenvalue(op, F3, SAT3)
    return _EV_MEMO[name]


def phi_eigen_residues(spec: CongruenceSpec, reverse: bool = False) -> list[int]:
    """Phi_i eigenvalues on f_3 mod M, i = 0..3 (reverse: Phi_{g-i} convention)."""
    M = spec.M
    vals = [specialize(_f3_eigen(str(i)), spec)[0] for i in range(4)]
    return [signed(v, M) for v in (vals[::-1] if reverse else vals)]


def appendix1_pipeline(spec: CongruenceSpec, reverse: bool = False) -> dict:
    """Solve Phi_i(y_1) = lambda_i y_1 against the z-expansion, then assemble B_p mod M.

    All quantities are coefficients of y_1 in Z/M.
    """
    M = spec.M
    v = spec.values(M)
    p = v["b1"]
    lam = [x % M for x in phi_eigen_residues(spec, reverse)]
    # Phi_0 = p^6 z0, Phi_1 = p^5 z0 + p^3 z1, Phi_2 = p^2 z1 + p z2, Phi_3 = z2
    z0 = lam[0] * _pow(p, -6, M) % M
    z1 = (lam[1] - pow(p, 5, M) * z0) * _pow(p, -3, M) % M
    z2 = lam[3] % M
    consistent = (p * p * z1 + p * z2 - lam[2]) % M == 0
    y_p = ((pow(p, 5, M) - pow(p, 3, M)) * z0 + p * p * z1) % M
    y_bad = (pow(p, 3, M) * z0 + z2) % M
    kappa = y_bad  # y_bad = kappa_p y_1
    p2 = spec.values()["b1"]
    M2 = M * M
    ap = specialize(_f3_eigen("Tp"), spec)[1]
    if (p2 + 1) % M or ap % M:
        raise DomainError("need M | p+1 and M | a_p")
    u = (p2 + 1) % M2 // M
    w = ap // M
    B = (u * y_p - w + u * kappa) % M
    return {"lambda": [signed(x, M) for x in lam], "z0": signed(z0, M), "z1": signed(z1, M),
            "z2": signed(z2, M), "system_consistent": consistent, "y_p": y_p, "y_bad": y_bad,
            "kappa": kappa, "a_p_mod_M2": ap, "B_p": B}


def a_p1_residue(spec: CongruenceSpec) -> dict:
    """T_{p,1} eigenvalue on f_3 mod M via the (g=3, i=1) decomposition."""
    M = spec.M
    p = spec.values(M)["b1"]
    lam = phi_eigen_residues(spec)
    coeffs = decomposition_coeffs(3, 1)
    total = 0
    by_nu = {}
    for (j, k), c in coeffs.items():
        cr = c.eval_mod(p, M)
        by_nu[k - j] = signed(cr, M)
        total += cr * lam[j] * lam[k]
    total %= M
    return {"residue": signed(total, M), "coeff_residues": by_nu, "claim": 1, "agrees_with_claim": total == 1 % M}


# ---------------------------------------------------------------------------
# suites


def verify_rcount(ps=(2, 3, 5), nmax: int = 3, budget: int | None = None) -> VerificationReport:
    t0 = time.time()
    rep = VerificationReport("rcount", {"p": list(ps), "nmax": nmax})
    for p in ps:
        for n in range(1, nmax + 1):
            dist = corank_distribution(n, p, budget)
            rep.check(f"sum_i R_{n}(i) at p={p}", p ** b(n), sum(dist.values()), "TRIVIAL", "all symmetric matrices")
            closed = {i: R(n, i)(p) for i in range(n + 1)}
            rep.check(f"R_{n}(*) at p={p} = closed form", closed, dist, "DERIVED", "rank counts of symmetric matrices")
        rep.check(f"R_1(1) at p={p}", 1, count_symmetric_corank(1, p, 1), "TRIVIAL", "zero 1x1 matrix")
        if nmax >= 2:
            rep.check(f"R_2(1) at p={p}", p * p - 1, count_symmetric_corank(2, p, 1), "PAPER", "(6.1.2) (p^2-1)/p^3")
        if nmax >= 3:
            rep.check(f"R_3(1) at p={p}", p * p * (p**3 - 1), count_symmetric_corank(3, p, 1), "PAPER",
                      "(6.1.2) (p^3-1)/p^4 read as R_3(1) p^{-b(3)}, i.e. p^2(p^3-1)")
    for g in (2, 3, 4):
        for i in range(1, g):
            try:
                assemble_616(g, i)
                ok = True
            except DomainError:
                ok = False
            rep.check(f"integrality of combined coefficients g={g} i={i}", True, ok, "DERIVED", "(6.1.6)")
    rep.wall_time = time.time() - t0
    return rep


E612 = {(0, 1): P**-1, (1, 2): P**-1, (2, 3): P**-1,
        (0, 2): (P**2 - 1) * P**-3, (1, 3): (P**2 - 1) * P**-3,
        (0, 3): (P**3 - 1) * P**-4}
E618 = {"y01": P**8, "y12": P**3, "y23": LaurentPoly(1), "y02": P**6 - P**4, "y13": P**2 - 1, "y03": P**3 - 1}
E626 = {"z00": P**10, "z01": P**8 + P**7 + P**6 - P**5, "z11": P**4,
        "z02": P**6 + 2 * P**5 - 2 * P**2, "z12": P**3 + P**2 + P - 1, "z22": LaurentPoly(1)}
E427_G3 = {"z0": P**6 + P**5, "z1": P**3 + P**2, "z2": P + 1}


def verify_coefficients() -> VerificationReport:
    """Symbolic coefficient identities for g = 3, i = 1 and the single-Phi z-expansion."""
    rep = VerificationReport("coefficients", {"g": 3, "i": 1})
    dc = decomposition_coeffs(3, 1)
    for key, val in E612.items():
        rep.check(f"(6.1.2) coefficient {key}", str(val), str(dc.get(key)), "PAPER", "(6.1.2)")
    rep.check("(6.1.2) no Phi_j Phi_k with k-j < 1", sorted(E612), sorted(dc), "TRIVIAL")
    ys = assemble_616(3, 1)
    for key, val in E618.items():
        rep.check(f"(6.1.6) {key} vs printed (6.1.8)", str(val), str(ys[key]), "PAPER", f"(6.1.8) {val}")
    zs = assemble_625(3, 1)
    for key, val in E626.items():
        rep.check(f"(6.2.5) {key} vs (6.2.6)", str(val), str(zs.get(key)), "PAPER", f"(6.2.6) {val}")
    z_printed = assemble_625(3, 1, E618)
    rep.data["z02_from_printed_y03"] = str(z_printed["z02"])
    for g in (2, 3, 4):
        s = assemble_427(g)
        ok = all(s[f"z{j}"] == P ** b(g - j) + P ** (b(g - j) - 1) for j in range(g))
        rep.check(f"(4.2.7) from (4.2.2), g={g}", True, ok, "PAPER", "(4.2.7)")
    s3 = assemble_427(3)
    for key, val in E427_G3.items():
        rep.check(f"(4.2.7) g=3 {key}", str(val), str(s3[key]), "PAPER", "(4.2.7)")
    s2 = assemble_427(2)
    from .lagrange import gaussian_binomial
    for p in (2, 3, 5):
        tot = sum(s2[f"z{j}"](p) * gaussian_binomial(1, j, p) for j in range(2))
        rep.check(f"g=2 total count at p={p}", (p + 1) * (p * p + 1), tot, "DERIVED", "sum_j coeff |G(j,1)|")
    return rep


def verify_satake_identities(gmax: int = 4, Ms=(9, 27)) -> VerificationReport:
    t0 = time.time()
    rep = VerificationReport("satake-identities", {"gmax": gmax, "M": list(Ms)})
    for g in range(1, gmax + 1):
        lhs: Counter = Counter()
        for i in range(g + 1):
            lhs.update(Phi(g, i))
        rep.check(f"sum_i S_T(Phi_i) = prod(U_i+V_i), g={g}", True, lhs == Tp(g), "PAPER", "(4.4.5)")
        for params in (SatakeParams(g), SatakeParams(g, "b(g)-1")):
            for I in params.basis():
                tp_ev = satake_eigenvalue(Tp(g), I, params)
                exp = Counter()
                for S in range(1 << g):
                    exp[(1, tuple((S >> t) & 1 for t in range(g)))] += 1
                if tp_ev != exp:
                    rep.check(f"T_p eigenvalue = a0 prod(1+b_i), g={g} I={sorted(I)}", True, False, "DERIVED")
        rep.check(f"T_p eigenvalue = a0 prod(1+b_i) on every basis vector, g={g}", True,
                  not any(c.name.startswith("T_p eigenvalue =") and not c.passed for c in rep.checks), "DERIVED",
                  "(4.4.6) summed over I")
    # g = 3 table on f_3
    table = {
        "U1U2U3": ((1, 1, 1), (0, 0, 0), "a0*p*b2"), "U1U2V3": ((1, 1, 0), (0, 0, 1), "a0*p*b2*b3"),
        "U1V2U3": ((1, 0, 1), (0, 1, 0), "a0*p"), "U1V2V3": ((1, 0, 0), (0, 1, 1), "a0*p*b3"),
        "V1U2U3": ((0, 1, 1), (1, 0, 0), "a0*b2"), "V1U2V3": ((0, 1, 0), (1, 0, 1), "a0*b2*b3"),
        "V1V2U3": ((0, 0, 1), (1, 1, 0), "a0"), "V1V2V3": ((0, 0, 0), (1, 1, 1), "a0*b3"),
    }
    residues_M = {"U1U2U3": -1, "U1U2V3": 1, "U1V2U3": -1, "U1V2V3": 1,
                  "V1U2U3": 1, "V1U2V3": -1, "V1V2U3": 1, "V1V2V3": -1}
    table_ev = {name: satake_eigenvalue(Counter({(u, v): 1}), F3, SAT3) for name, (u, v, _) in table.items()}
    for name, (u, v, printed) in table.items():
        ev = table_ev[name]
        rep.check(f"{name} on f_3", printed, monomial_str(ev, SAT3), "PAPER", "Appendix 1 table")
    ev = satake_eigenvalue(Tp(3), F3, SAT3)
    rep.check("T_p on f_3", "a0*(p+1)(b2+1)(b3+1)", "a0*(p+1)(b2+1)(b3+1)" if ev == _ap_poly() else monomial_str(ev, SAT3),
              "PAPER", "§4.4 a_p = a0(p+1)(b2+1)(b3+1)")
    ev0 = satake_eigenvalue(Phi(3, 0), frozenset(), SAT3)
    rep.check("Phi_0 on f_empty", "a0", monomial_str(ev0, SAT3), "DERIVED", "(4.4.6) with I = empty")
    # residues mod M over all admissible data
    for M in Ms:
        l, n = _factor_prime_power(M)
        bad_table = bad_phi = bad_ap = bad_rev = 0
        cnt = 0
        for a, bb in admissible_pairs(l, n):
            spec = CongruenceSpec(l, n, a, bb)
            cnt += 1
            for name in table:
                if signed(specialize(table_ev[name], spec)[0], M) != residues_M[name]:
                    bad_table += 1
            if phi_eigen_residues(spec) != [-1, 1, 1, -1]:
                bad_phi += 1
            if phi_eigen_residues(spec, reverse=True) != [-1, 1, 1, -1]:
                bad_rev += 1
            # a_p mod M^2 is the only quantity that sees the free lifts
            for t in range(M):
                for s in range(M):
                    if specialize(ev, CongruenceSpec(l, n, a, bb, t, s))[1] != 0:
                        bad_ap += 1
        rep.check(f"Appendix 1 residues mod {M} over {cnt} (a, b) pairs", 0, bad_table, "PAPER", "Appendix 1 residue rows")
        rep.check(f"(A1.1) pattern mod {M}", 0, bad_phi, "PAPER", "(A1.1) -1, 1, 1, -1")
        rep.check(f"(A1.1) pattern mod {M}, reversed index convention", 0, bad_rev, "DERIVED",
                  "Phi_i <-> Phi_{g-i}: the pattern is palindromic")
        rep.check(f"a_p = 0 mod {M}^2", 0, bad_ap, "PAPER", "§4.4 a_p = 0 mod M^2")
    rep.wall_time = time.time() - t0
    return rep


def _ap_poly() -> Counter:
    # a0 (1+b1)(1+b2)(1+b3)
    out = Counter()
    for S in range(8):
        out[(1, tuple((S >> t) & 1 for t in range(3)))] += 1
    return out


def verify_appendix1(Ms=(9, 27)) -> VerificationReport:
    t0 = time.time()
    rep = VerificationReport("appendix1", {"M": list(Ms)})
    for M in Ms:
        l, n = _factor_prime_power(M)
        cnt = 0
        fails = Counter()
        weil_ok = 0
        for a, bb in admissible_pairs(l, n):
            for t in range(M):
                for s in range(M):
                    spec = CongruenceSpec(l, n, a, bb, t, s)
                    r = appendix1_pipeline(spec)
                    cnt += 1
                    fails["z1"] += r["z1"] != 0
                    fails["z0"] += r["z0"] != -1
                    fails["z2"] += r["z2"] != -1
                    fails["consistent"] += not r["system_consistent"]
                    fails["y_p"] += r["y_p"] != 0
                    fails["y_bad"] += r["y_bad"] != 0
                    fails["kappa"] += r["kappa"] != 0
                    fails["B_p"] += r["B_p"] != 0
                    weil_ok += spec.weil_consistent()
        rep.check(f"M={M}: z1 = 0", 0, fails["z1"], "PAPER", "Appendix 1: z_1 = 0")
        rep.check(f"M={M}: z0 = -y1", 0, fails["z0"], "PAPER", "Appendix 1: z_0 = -(y_1)")
        rep.check(f"M={M}: z2 = -y1", 0, fails["z2"], "PAPER", "Appendix 1: z_2 = -(y_1)")
        rep.check(f"M={M}: overdetermined row consistent", 0, fails["consistent"], "DERIVED", "(A1.2) Phi_2 row")
        rep.check(f"M={M}: y_p = 0", 0, fails["y_p"], "PAPER", "Appendix 1: (y_p) = 0")
        rep.check(f"M={M}: y_bad = 0, kappa_p = 0", 0, fails["y_bad"] + fails["kappa"], "PAPER", "kappa_p = 0 mod M")
        rep.check(f"M={M}: B_p = 0", 0, fails["B_p"], "PAPER", "§4.4: we get B_p = 0")
        rep.check(f"M={M}: specs swept", True, cnt > 0, "TRIVIAL")
        rep.data[f"M={M}"] = {"specs": cnt, "weil_consistent_specs": weil_ok}
    rep.wall_time = time.time() - t0
    return rep


def verify_ap1_residue(Ms=(9, 27)) -> VerificationReport:
    rep = VerificationReport("ap1-residue", {"M": list(Ms)})
    for M in Ms:
        l, n = _factor_prime_power(M)
        seen = set()
        coeff_seen = set()
        for a, bb in admissible_pairs(l, n):
            for t in range(M):
                r = a_p1_residue(CongruenceSpec(l, n, a, bb, t, 0))
                seen.add(r["residue"])
                coeff_seen.add(tuple(sorted(r["coeff_residues"].items())))
        rep.check(f"M={M}: coefficient residues (1/p, (p^2-1)/p^3, (p^3-1)/p^4)", [((1, -1), (2, 0), (3, -2))],
                  sorted(coeff_seen), "DERIVED", "evaluation at p = -1 mod M")
        rep.check(f"M={M}: residue independent of free lifts", 1, len(seen), "DERIVED", "sweep over (a, b, t)")
        val = seen.pop() if len(seen) == 1 else sorted(seen)
        rep.data[f"M={M}"] = {"a_p1_residue": val, "claimed": 1, "agrees": val == 1}
    return rep


def _factor_prime_power(M: int) -> tuple[int, int]:
    for l in range(2, M + 1):
        if M % l == 0:
            n = 0
            m = M
            while m % l == 0:
                m //= l
                n += 1
            if m != 1:
                raise DomainError(f"M={M} is not a prime power")
            return l, n
    raise DomainError(f"bad M={M}")
