"""Exact sparse polynomial arithmetic on the graded coordinate ring of T*PiA.

Coordinates come in conjugate pairs: even base coordinates x^1..x^n with even
momenta p_1..p_n, and odd fibre coordinates xi^1..xi^r with odd momenta
th_1..th_r.  A monomial is kept in the normal order

    x-block  p-block  th-block  xi-block

with each odd block strictly increasing; Koszul signs produced by reordering
are tracked exactly.  Coefficients are rational (Fraction); zero coefficients
are never stored, so polynomial equality is dict equality.

The bidegree of a monomial is (eps, delta) = (#th + deg_p, #xi + deg_p).
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Iterator

# A monomial: (x_exponents, p_exponents, theta_indices, xi_indices).
# Exponent tuples have length base_dim; odd index tuples are strictly
# increasing 0-based coordinate indices.
Monomial = tuple[tuple[int, ...], tuple[int, ...], tuple[int, ...], tuple[int, ...]]


@dataclass(frozen=True)
class CoordinateSystem:
    """Fixed index ranges for one graded coordinate patch."""

    base_dim: int
    rank: int

    def __post_init__(self) -> None:
        if self.base_dim < 0:
            raise ValueError("base_dim must be >= 0")
        if self.rank < 1:
            raise ValueError("rank must be >= 1")

    @property
    def zero_exp(self) -> tuple[int, ...]:
        return (0,) * self.base_dim


class Bidegree(tuple):
    """(eps, delta) pair; eps counts th,p-degree and delta counts xi,p-degree."""

    def __new__(cls, eps: int, delta: int):
        return super().__new__(cls, (eps, delta))

    @property
    def eps(self) -> int:
        return self[0]

    @property
    def delta(self) -> int:
        return self[1]

    def shifted(self) -> tuple[int, int]:
        return (self[0] - 1, self[1] - 1)


def monomial_bidegree(m: Monomial) -> Bidegree:
    p_deg = sum(m[1])
    return Bidegree(len(m[2]) + p_deg, len(m[3]) + p_deg)


def monomial_parity(m: Monomial) -> int:
    return (len(m[2]) + len(m[3])) % 2


def _merge_odd(a: tuple[int, ...], b: tuple[int, ...]):
    """Merge two strictly increasing index tuples.

    Returns (sign, merged) where sign is the Koszul sign of interleaving the
    concatenation a+b into increasing order, or None when an index repeats
    (the odd square vanishes).
    """
    if not a:
        return 1, b
    if not b:
        return 1, a
    out = []
    i = j = 0
    inversions = 0
    la = len(a)
    while i < la and j < len(b):
        if a[i] == b[j]:
            return None
        if a[i] < b[j]:
            out.append(a[i])
            i += 1
        else:
            # b[j] hops over the remaining entries of a
            out.append(b[j])
            inversions += la - i
            j += 1
    out.extend(a[i:])
    out.extend(b[j:])
    return (-1 if inversions % 2 else 1), tuple(out)


def _mul_monomials(m1: Monomial, m2: Monomial):
    """Product of two normal-form monomials: (sign, monomial) or None."""
    # moving the th-block of m2 across the xi-block of m1
    sign = -1 if (len(m1[3]) * len(m2[2])) % 2 else 1
    th = _merge_odd(m1[2], m2[2])
    if th is None:
        return None
    xi = _merge_odd(m1[3], m2[3])
    if xi is None:
        return None
    sign *= th[0] * xi[0]
    x = tuple(e1 + e2 for e1, e2 in zip(m1[0], m2[0]))
    p = tuple(e1 + e2 for e1, e2 in zip(m1[1], m2[1]))
    return sign, (x, p, th[1], xi[1])


class GradedPoly:
    """Immutable exact polynomial over one CoordinateSystem."""

    __slots__ = ("coords", "_terms")

    def __init__(self, coords: CoordinateSystem, terms: dict[Monomial, Fraction] | None = None):
        self.coords = coords
        clean: dict[Monomial, Fraction] = {}
        if terms:
            for mono, coeff in terms.items():
                if coeff:
                    clean[mono] = coeff
        self._terms = clean

    # ------------------------------------------------------------------
    # construction helpers
    # ------------------------------------------------------------------

    @classmethod
    def _raw(cls, coords: CoordinateSystem, terms: dict[Monomial, Fraction]) -> "GradedPoly":
        """Wrap a term dict that is already free of zero coefficients."""
        out = cls.__new__(cls)
        out.coords = coords
        out._terms = terms
        return out

    @classmethod
    def zero(cls, coords: CoordinateSystem) -> "GradedPoly":
        return cls(coords)

    @classmethod
    def const(cls, coords: CoordinateSystem, value) -> "GradedPoly":
        c = Fraction(value)
        if not c:
            return cls(coords)
        m = (coords.zero_exp, coords.zero_exp, (), ())
        return cls(coords, {m: c})

    @classmethod
    def term(cls, coords: CoordinateSystem, coeff, x: Iterable[int] = (), p: Iterable[int] = (),
             theta: Iterable[int] = (), xi: Iterable[int] = ()) -> "GradedPoly":
        """Build coeff * x-part * p-part * th-part * xi-part.

        x and p are iterables of coordinate indices (repetition raises the
        exponent); theta and xi are odd indices in any order, the Koszul sign
        of sorting is applied, and a repeated odd index gives zero.
        """
        symbols = [("x", i) for i in x] + [("p", i) for i in p] \
            + [("theta", a) for a in theta] + [("xi", a) for a in xi]
        return normalize(coords, symbols, coeff)

    # ------------------------------------------------------------------
    # basic queries
    # ------------------------------------------------------------------

    def is_zero(self) -> bool:
        return not self._terms

    def terms(self) -> Iterator[tuple[Monomial, Fraction]]:
        return iter(self._terms.items())

    def __len__(self) -> int:
        return len(self._terms)

    def __eq__(self, other) -> bool:
        if not isinstance(other, GradedPoly):
            return NotImplemented
        return self.coords == other.coords and self._terms == other._terms

    def __hash__(self):
        raise TypeError("GradedPoly is not hashable")

    def coefficient(self, mono: Monomial) -> Fraction:
        return self._terms.get(mono, Fraction(0))

    def bidegree_components(self) -> dict[Bidegree, "GradedPoly"]:
        """Split into bihomogeneous components keyed by (eps, delta)."""
        buckets: dict[Bidegree, dict[Monomial, Fraction]] = {}
        for mono, coeff in self._terms.items():
            buckets.setdefault(monomial_bidegree(mono), {})[mono] = coeff
        return {bd: GradedPoly._raw(self.coords, t) for bd, t in buckets.items()}

    def bidegree(self) -> Bidegree | None:
        """The bidegree when bihomogeneous, else None (zero gives None)."""
        bds = {monomial_bidegree(m) for m in self._terms}
        if len(bds) == 1:
            return next(iter(bds))
        return None

    def parity_split(self) -> tuple["GradedPoly", "GradedPoly"]:
        """(even part, odd part) by total odd degree mod 2."""
        ev: dict[Monomial, Fraction] = {}
        od: dict[Monomial, Fraction] = {}
        for mono, coeff in self._terms.items():
            (od if monomial_parity(mono) else ev)[mono] = coeff
        return GradedPoly._raw(self.coords, ev), GradedPoly._raw(self.coords, od)

    def parity(self) -> int | None:
        """0 or 1 when homogeneous in parity, else None."""
        ps = {monomial_parity(m) for m in self._terms}
        if len(ps) == 1:
            return next(iter(ps))
        return None

    def max_eps(self) -> int:
        return max((monomial_bidegree(m).eps for m in self._terms), default=0)

    def max_delta(self) -> int:
        return max((monomial_bidegree(m).delta for m in self._terms), default=0)

    # ------------------------------------------------------------------
    # arithmetic
    # ------------------------------------------------------------------

    def _check(self, other: "GradedPoly") -> None:
        if self.coords != other.coords:
            raise ValueError("coordinate-system mismatch")

    def __add__(self, other: "GradedPoly") -> "GradedPoly":
        if not isinstance(other, GradedPoly):
            return NotImplemented
        self._check(other)
        if not self._terms:
            return other
        if not other._terms:
            return self
        out = dict(self._terms)
        for mono, coeff in other._terms.items():
            s = out.get(mono)
            if s is None:
                out[mono] = coeff
            else:
                s = s + coeff
                if s:
                    out[mono] = s
                else:
                    del out[mono]
        return GradedPoly._raw(self.coords, out)

    def __neg__(self) -> "GradedPoly":
        return GradedPoly._raw(self.coords, {m: -c for m, c in self._terms.items()})

    def __sub__(self, other: "GradedPoly") -> "GradedPoly":
        if not isinstance(other, GradedPoly):
            return NotImplemented
        return self + (-other)

    def scale(self, value) -> "GradedPoly":
        c = Fraction(value)
        if not c:
            return GradedPoly(self.coords)
        return GradedPoly._raw(self.coords, {m: c * v for m, v in self._terms.items()})

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.scale(other)
        if not isinstance(other, GradedPoly):
            return NotImplemented
        self._check(other)
        out: dict[Monomial, Fraction] = {}
        # iterate with the smaller factor outside
        a, b = (self, other) if len(self._terms) <= len(other._terms) else (other, self)
        flip = a is not self
        for m1, c1 in a._terms.items():
            for m2, c2 in b._terms.items():
                prod = _mul_monomials(m1, m2) if not flip else _mul_monomials(m2, m1)
                if prod is None:
                    continue
                sign, mono = prod
                c = c1 * c2 if sign > 0 else -(c1 * c2)
                s = out.get(mono)
                if s is None:
                    out[mono] = c
                else:
                    s = s + c
                    if s:
                        out[mono] = s
                    else:
                        del out[mono]
        return GradedPoly._raw(self.coords, out)

    def __rmul__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.scale(other)
        return NotImplemented

    # ------------------------------------------------------------------
    # derivatives
    # ------------------------------------------------------------------

    def d_x(self, i: int) -> "GradedPoly":
        out: dict[Monomial, Fraction] = {}
        for (x, p, th, xi), coeff in self._terms.items():
            e = x[i]
            if not e:
                continue
            nx = x[:i] + (e - 1,) + x[i + 1:]
            _acc(out, (nx, p, th, xi), coeff * e)
        return GradedPoly._raw(self.coords, out)

    def d_p(self, i: int) -> "GradedPoly":
        out: dict[Monomial, Fraction] = {}
        for (x, p, th, xi), coeff in self._terms.items():
            e = p[i]
            if not e:
                continue
            np_ = p[:i] + (e - 1,) + p[i + 1:]
            _acc(out, (x, np_, th, xi), coeff * e)
        return GradedPoly._raw(self.coords, out)

    def d_theta(self, a: int) -> "GradedPoly":
        """Left derivative by th_a: sign is the parity of preceding odd symbols."""
        out: dict[Monomial, Fraction] = {}
        for (x, p, th, xi), coeff in self._terms.items():
            try:
                pos = th.index(a)
            except ValueError:
                continue
            sign = -1 if pos % 2 else 1
            _acc(out, (x, p, th[:pos] + th[pos + 1:], xi), coeff if sign > 0 else -coeff)
        return GradedPoly._raw(self.coords, out)

    def d_xi(self, a: int) -> "GradedPoly":
        """Left derivative by xi^a; th-block precedes the xi-block."""
        out: dict[Monomial, Fraction] = {}
        for (x, p, th, xi), coeff in self._terms.items():
            try:
                pos = xi.index(a)
            except ValueError:
                continue
            sign = -1 if (len(th) + pos) % 2 else 1
            _acc(out, (x, p, th, xi[:pos] + xi[pos + 1:]), coeff if sign > 0 else -coeff)
        return GradedPoly._raw(self.coords, out)

    def derivative(self, kind: str, index: int) -> "GradedPoly":
        if kind == "x":
            ok = 0 <= index < self.coords.base_dim
            fn = self.d_x
        elif kind == "p":
            ok = 0 <= index < self.coords.base_dim
            fn = self.d_p
        elif kind == "theta":
            ok = 0 <= index < self.coords.rank
            fn = self.d_theta
        elif kind == "xi":
            ok = 0 <= index < self.coords.rank
            fn = self.d_xi
        else:
            raise ValueError(f"unknown symbol kind {kind!r}")
        if not ok:
            raise ValueError(f"symbol index {index} out of range for {kind}")
        return fn(index)

    # ------------------------------------------------------------------
    # presentation
    # ------------------------------------------------------------------

    def used_indices(self) -> tuple[set[int], set[int], set[int], set[int]]:
        """(x, p, theta, xi) index sets appearing in some term."""
        xs: set[int] = set()
        ps: set[int] = set()
        ths: set[int] = set()
        xis: set[int] = set()
        for (x, p, th, xi) in self._terms:
            xs.update(i for i, e in enumerate(x) if e)
            ps.update(i for i, e in enumerate(p) if e)
            ths.update(th)
            xis.update(xi)
        return xs, ps, ths, xis

    def __str__(self) -> str:
        if not self._terms:
            return "0"
        def key(item):
            (x, p, th, xi), _ = item
            return (sum(x) + sum(p) + len(th) + len(xi), p, th, xi, x)
        parts = []
        for (x, p, th, xi), coeff in sorted(self._terms.items(), key=key):
            factors = []
            for i, e in enumerate(x):
                if e:
                    factors.append(f"x{i+1}" + (f"^{e}" if e > 1 else ""))
            for i, e in enumerate(p):
                if e:
                    factors.append(f"p{i+1}" + (f"^{e}" if e > 1 else ""))
            factors.extend(f"th{a+1}" for a in th)
            factors.extend(f"xi{a+1}" for a in xi)
            body = "*".join(factors)
            if not body:
                parts.append(str(coeff))
            elif coeff == 1:
                parts.append(body)
            elif coeff == -1:
                parts.append("-" + body)
            else:
                parts.append(f"{coeff}*{body}")
        out = " + ".join(parts)
        return out.replace("+ -", "- ")

    def __repr__(self) -> str:
        return f"GradedPoly({self})"


def _acc(store: dict[Monomial, Fraction], mono: Monomial, coeff: Fraction) -> None:
    s = store.get(mono)
    if s is None:
        store[mono] = coeff
    else:
        s = s + coeff
        if s:
            store[mono] = s
        else:
            del store[mono]


def normalize(coords: CoordinateSystem, symbols: Iterable[tuple[str, int]], coeff=1) -> GradedPoly:
    """Canonical form of a raw symbol word with its Koszul sign.

    symbols is a sequence of (kind, index) pairs with kind in
    {"x", "p", "theta", "xi"}, read left to right; a repeated odd symbol
    yields the zero polynomial.
    """
    c = Fraction(coeff)
    if not c:
        return GradedPoly(coords)
    x = list(coords.zero_exp)
    p = list(coords.zero_exp)
    th: tuple[int, ...] = ()
    xi: tuple[int, ...] = ()
    sign = 1
    for kind, index in symbols:
        if kind == "x":
            if not 0 <= index < coords.base_dim:
                raise ValueError(f"x index {index} out of range")
            x[index] += 1
        elif kind == "p":
            if not 0 <= index < coords.base_dim:
                raise ValueError(f"p index {index} out of range")
            p[index] += 1
        elif kind == "theta":
            if not 0 <= index < coords.rank:
                raise ValueError(f"theta index {index} out of range")
            m = _merge_odd(th, (index,))
            if m is None:
                return GradedPoly(coords)
            # the new odd symbol also crosses the existing xi-block
            sign *= m[0] * (-1 if len(xi) % 2 else 1)
            th = m[1]
        elif kind == "xi":
            if not 0 <= index < coords.rank:
                raise ValueError(f"xi index {index} out of range")
            m = _merge_odd(xi, (index,))
            if m is None:
                return GradedPoly(coords)
            sign *= m[0]
            xi = m[1]
        else:
            raise ValueError(f"unknown symbol kind {kind!r}")
    mono = (tuple(x), tuple(p), th, xi)
    return GradedPoly(coords, {mono: c if sign > 0 else -c})
