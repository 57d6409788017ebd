"""Laurent polynomials in a formal variable p with integer coefficients."""
from __future__ import annotations

from fractions import Fraction
from typing import Mapping


class LaurentPoly:
    __slots__ = ("terms",)

    def __init__(self, terms: Mapping[int, int] | int = 0):
        if isinstance(terms, int):
            terms = {0: terms} if terms else {}
        self.terms = {e: c for e, c in terms.items() if c}

    @classmethod
    def var(cls) -> "LaurentPoly":
        return cls({1: 1})

    @classmethod
    def monomial(cls, exp: int, coeff: int = 1) -> "LaurentPoly":
        return cls({exp: coeff})

    @staticmethod
    def _coerce(x) -> "LaurentPoly":
        return x if isinstance(x, LaurentPoly) else LaurentPoly(int(x))

    def __add__(self, other):
        other = self._coerce(other)
        t = dict(self.terms)
        for e, c in other.terms.items():
            t[e] = t.get(e, 0) + c
        return LaurentPoly(t)

    __radd__ = __add__

    def __neg__(self):
        return LaurentPoly({e: -c for e, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        other = self._coerce(other)
        t: dict[int, int] = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                t[e1 + e2] = t.get(e1 + e2, 0) + c1 * c2
        return LaurentPoly(t)

    __rmul__ = __mul__

    def __pow__(self, n: int):
        if n < 0:
            if len(self.terms) != 1:
                raise ValueError("only monomials have Laurent inverses")
            (e, c), = self.terms.items()
            if abs(c) != 1:
                raise ValueError("monomial with non-unit coefficient")
            return LaurentPoly({e * n: c ** abs(n)})
        out = LaurentPoly(1)
        for _ in range(n):
            out = out * self
        return out

    def __eq__(self, other):
        if isinstance(other, int):
            other = LaurentPoly(other)
        if not isinstance(other, LaurentPoly):
            return NotImplemented
        return self.terms == other.terms

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def divexact(self, other: "LaurentPoly") -> "LaurentPoly":
        """Exact division; raises ValueError if a remainder is left."""
        other = self._coerce(other)
        if not other.terms:
            raise ZeroDivisionError
        dlead, dlow = max(other.terms), min(other.terms)
        dc = other.terms[dlead]
        num = self
        quot: dict[int, int] = {}
        while num.terms:
            lead = max(num.terms)
            # the remainder's lowest term can never be cancelled once lead drops below it
            if lead - dlead + dlow < min(num.terms):
                raise ValueError("non-exact division")
            c = num.terms[lead]
            if c % dc:
                raise ValueError("non-integral division")
            quot[lead - dlead] = c // dc
            num = num - LaurentPoly({lead - dlead: c // dc}) * other
        return LaurentPoly(quot)

    def is_polynomial(self) -> bool:
        return all(e >= 0 for e in self.terms)

    def min_exp(self) -> int:
        return min(self.terms) if self.terms else 0

    def __call__(self, p: int) -> Fraction | int:
        val = sum(Fraction(p) ** e * c for e, c in self.terms.items())
        return int(val) if val.denominator == 1 else val

    def eval_mod(self, p: int, modulus: int) -> int:
        """Value at p in Z/modulus; p must be a unit when negative powers occur."""
        total = 0
        for e, c in self.terms.items():
            if e < 0:
                try:
                    base = pow(p, -1, modulus)
                except ValueError as exc:
                    raise ValueError(f"p={p} is not invertible mod {modulus}") from exc
                total += c * pow(base, -e, modulus)
            else:
                total += c * pow(p, e, modulus)
        return total % modulus

    def __repr__(self):
        if not self.terms:
            return "0"
        parts = []
        for e in sorted(self.terms, reverse=True):
            c = self.terms[e]
            if e == 0:
                mono = str(abs(c))
            else:
                pe = "p" if e == 1 else f"p^{e}"
                mono = pe if abs(c) == 1 else f"{abs(c)}*{pe}"
            parts.append(("-" if c < 0 else "+", mono))
        s = ("-" if parts[0][0] == "-" else "") + parts[0][1]
        for sign, mono in parts[1:]:
            s += f" {sign} {mono}"
        return s

    __str__ = __repr__


P = LaurentPoly.var()
