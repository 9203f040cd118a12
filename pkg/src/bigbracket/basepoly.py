"""Rational polynomials in the even base coordinates x^1..x^n.

These are the coefficient entries of anchors, structure functions and
tensors.  Representation: exponent tuple -> Fraction, zero stored as the
empty dict.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Iterable


class BasePoly:
    __slots__ = ("base_dim", "_terms")

    def __init__(self, base_dim: int, terms: dict[tuple[int, ...], Fraction] | None = None):
        self.base_dim = base_dim
        clean: dict[tuple[int, ...], Fraction] = {}
        if terms:
            for exp, coeff in terms.items():
                if len(exp) != base_dim:
                    raise ValueError("exponent length does not match base_dim")
                if coeff:
                    clean[exp] = Fraction(coeff)
        self._terms = clean

    @classmethod
    def const(cls, base_dim: int, value) -> "BasePoly":
        v = Fraction(value)
        if not v:
            return cls(base_dim)
        return cls(base_dim, {(0,) * base_dim: v})

    @classmethod
    def var(cls, base_dim: int, i: int) -> "BasePoly":
        exp = [0] * base_dim
        exp[i] = 1
        return cls(base_dim, {tuple(exp): Fraction(1)})

    def is_zero(self) -> bool:
        return not self._terms

    def terms(self) -> Iterable[tuple[tuple[int, ...], Fraction]]:
        return self._terms.items()

    def __eq__(self, other) -> bool:
        if isinstance(other, (int, Fraction)):
            other = BasePoly.const(self.base_dim, other)
        if not isinstance(other, BasePoly):
            return NotImplemented
        return self.base_dim == other.base_dim and self._terms == other._terms

    def __hash__(self):
        raise TypeError("BasePoly is not hashable")

    def __add__(self, other) -> "BasePoly":
        other = self._coerce(other)
        out = dict(self._terms)
        for exp, c in other._terms.items():
            s = out.get(exp, Fraction(0)) + c
            if s:
                out[exp] = s
            else:
                out.pop(exp, None)
        return BasePoly(self.base_dim, out)

    def __neg__(self) -> "BasePoly":
        return BasePoly(self.base_dim, {e: -c for e, c in self._terms.items()})

    def __sub__(self, other) -> "BasePoly":
        return self + (-self._coerce(other))

    def __mul__(self, other) -> "BasePoly":
        other = self._coerce(other)
        out: dict[tuple[int, ...], Fraction] = {}
        for e1, c1 in self._terms.items():
            for e2, c2 in other._terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                s = out.get(e, Fraction(0)) + c1 * c2
                if s:
                    out[e] = s
                else:
                    out.pop(e, None)
        return BasePoly(self.base_dim, out)

    def __rmul__(self, other) -> "BasePoly":
        return self * other

    def scale(self, value) -> "BasePoly":
        v = Fraction(value)
        return BasePoly(self.base_dim, {e: v * c for e, c in self._terms.items()})

    def diff(self, i: int) -> "BasePoly":
        out: dict[tuple[int, ...], Fraction] = {}
        for exp, c in self._terms.items():
            e = exp[i]
            if e:
                out[exp[:i] + (e - 1,) + exp[i + 1:]] = c * e
        return BasePoly(self.base_dim, out)

    def _coerce(self, other) -> "BasePoly":
        if isinstance(other, BasePoly):
            if other.base_dim != self.base_dim:
                raise ValueError("base dimension mismatch")
            return other
        return BasePoly.const(self.base_dim, other)

    def __str__(self) -> str:
        if not self._terms:
            return "0"
        parts = []
        for exp, c in sorted(self._terms.items()):
            factors = [f"x{i+1}" + (f"^{e}" if e > 1 else "") for i, e in enumerate(exp) if e]
            body = "*".join(factors)
            if not body:
                parts.append(str(c))
            elif c == 1:
                parts.append(body)
            elif c == -1:
                parts.append("-" + body)
            else:
                parts.append(f"{c}*{body}")
        return " + ".join(parts).replace("+ -", "- ")

    def __repr__(self) -> str:
        return f"BasePoly({self})"


def zero(base_dim: int) -> BasePoly:
    return BasePoly(base_dim)


def const(base_dim: int, value) -> BasePoly:
    return BasePoly.const(base_dim, value)
