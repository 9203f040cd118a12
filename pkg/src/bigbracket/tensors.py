"""Classical tensor data and its hamiltonian encoding on T*PiA.

Sign conventions (see CONVENTIONS.md; every choice is pinned by the
calibration test suite):

    algebroid (rho, c):   mu      = sum rho^i_a x-coeff p_i xi^a
                                    - 1/2 sum c^c_ab th_c xi^a xi^b
    bivector pi:          pi~     = 1/2 sum pi^ab th_a th_b
    endomorphism N:       N~      = - sum N^a_b th_a xi^b
    k-form (k=1,2,3):     omega~  = (1/k!) sum w_{a1..ak} xi^a1..xi^ak
    k-vector:             W~      = (1/k!) sum W^{a1..ak} th_a1..th_ak
    dual structure:       same shape with th and xi exchanged,
                          (2,1)-hamiltonian = sum r^ib p_i th_b
                                              - 1/2 sum g^ab_c th_a th_b xi^c

With these encodings the bracket action {s, J~} of J~ = pi~ + N~ + sigma~
on an encoded section s reproduces the block matrix
(N, pi-sharp; sigma-flat, -N-transpose), the deformed structures {N~, mu}
and {pi~, mu} decode to the classical N- and pi-deformations, and
{N~, omega~} equals the encoded degree-zero contraction i_N omega.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations, permutations
from typing import Iterable

from .basepoly import BasePoly
from .poly import CoordinateSystem, GradedPoly, Monomial

BIVECTOR = "bivector"
ENDOMORPHISM = "endomorphism"
TWO_FORM = "two_form"
THREE_FORM = "three_form"
THREE_VECTOR = "three_vector"

KIND_BIDEGREE = {
    BIVECTOR: (2, 0),
    ENDOMORPHISM: (1, 1),
    TWO_FORM: (0, 2),
    THREE_FORM: (0, 3),
    THREE_VECTOR: (3, 0),
}

_ALTERNATING = {BIVECTOR, TWO_FORM, THREE_FORM, THREE_VECTOR}


def _perm_sign(seq: tuple[int, ...]) -> int:
    sign = 1
    lst = list(seq)
    for i in range(len(lst)):
        for j in range(i + 1, len(lst)):
            if lst[i] > lst[j]:
                sign = -sign
    return sign


class TensorData:
    """Coefficient table of one classical tensor over a chosen basis.

    Alternating kinds are stored on strictly increasing index tuples; the
    accessor applies permutation signs.  The endomorphism kind stores the
    full square table N^a_b (N e_b = sum_a N^a_b e_a).
    """

    __slots__ = ("kind", "rank", "base_dim", "_table")

    def __init__(self, kind: str, rank: int, base_dim: int,
                 entries: dict[tuple[int, ...], BasePoly] | None = None):
        if kind not in KIND_BIDEGREE:
            raise ValueError(f"unknown tensor kind {kind!r}")
        self.kind = kind
        self.rank = rank
        self.base_dim = base_dim
        self._table: dict[tuple[int, ...], BasePoly] = {}
        if entries:
            for idx, value in entries.items():
                self.set_entry(idx, value)

    @classmethod
    def zero(cls, kind: str, rank: int, base_dim: int) -> "TensorData":
        return cls(kind, rank, base_dim)

    def degree(self) -> int:
        return {BIVECTOR: 2, ENDOMORPHISM: 2, TWO_FORM: 2, THREE_FORM: 3, THREE_VECTOR: 3}[self.kind]

    def _canon(self, idx: tuple[int, ...]):
        for i in idx:
            if not 0 <= i < self.rank:
                raise ValueError(f"index {i} out of range for rank {self.rank}")
        if self.kind == ENDOMORPHISM:
            return 1, idx
        if len(set(idx)) != len(idx):
            return 0, None
        key = tuple(sorted(idx))
        return _perm_sign(idx), key

    def entry(self, *idx: int) -> BasePoly:
        sign, key = self._canon(tuple(idx))
        if sign == 0:
            return BasePoly(self.base_dim)
        value = self._table.get(key)
        if value is None:
            return BasePoly(self.base_dim)
        return value if sign > 0 else -value

    def set_entry(self, idx: tuple[int, ...], value: BasePoly | int) -> None:
        if not isinstance(value, BasePoly):
            value = BasePoly.const(self.base_dim, value)
        if value.base_dim != self.base_dim:
            raise ValueError("entry base_dim mismatch")
        sign, key = self._canon(tuple(idx))
        if sign == 0:
            if not value.is_zero():
                raise ValueError("alternating tensor cannot have a repeated-index entry")
            return
        if value.is_zero():
            self._table.pop(key, None)
        else:
            self._table[key] = value if sign > 0 else -value

    def add_entry(self, idx: tuple[int, ...], value: BasePoly) -> None:
        self.set_entry(idx, self.entry(*idx) + value)

    def entries(self) -> Iterable[tuple[tuple[int, ...], BasePoly]]:
        return self._table.items()

    def is_zero(self) -> bool:
        return not self._table

    def __eq__(self, other) -> bool:
        if not isinstance(other, TensorData):
            return NotImplemented
        return (self.kind, self.rank, self.base_dim) == (other.kind, other.rank, other.base_dim) \
            and self._table == other._table

    def __hash__(self):
        raise TypeError("TensorData is not hashable")

    def __add__(self, other: "TensorData") -> "TensorData":
        if not isinstance(other, TensorData) or (self.kind, self.rank, self.base_dim) != \
                (other.kind, other.rank, other.base_dim):
            raise ValueError("tensor shape mismatch")
        out = TensorData(self.kind, self.rank, self.base_dim)
        keys = set(self._table) | set(other._table)
        for k in keys:
            out.set_entry(k, self.entry(*k) + other.entry(*k))
        return out

    def __neg__(self) -> "TensorData":
        return self.scale(-1)

    def __sub__(self, other: "TensorData") -> "TensorData":
        return self + (-other)

    def scale(self, value) -> "TensorData":
        out = TensorData(self.kind, self.rank, self.base_dim)
        for k, v in self._table.items():
            out.set_entry(k, v.scale(value))
        return out

    def __str__(self) -> str:
        if self.is_zero():
            return f"{self.kind}: 0"
        bits = []
        for k, v in sorted(self._table.items()):
            label = ",".join(str(i + 1) for i in k)
            bits.append(f"[{label}] = {v}")
        return f"{self.kind}: " + "; ".join(bits)

    __repr__ = __str__


@dataclass
class LieAlgebroidData:
    """Anchor components rho^i_a and structure functions c^c_ab.

    rho[a][i] is the x^i-component of the anchor of e_a; the c-table is
    stored on a < b with c^c_ab = -c^c_ba implied.
    """

    rank: int
    base_dim: int
    rho: dict[tuple[int, int], BasePoly] = field(default_factory=dict)
    c: dict[tuple[int, int, int], BasePoly] = field(default_factory=dict)

    def __post_init__(self) -> None:
        self.rho = {k: v for k, v in self.rho.items() if not v.is_zero()}
        clean: dict[tuple[int, int, int], BasePoly] = {}
        for (cc, a, b), v in self.c.items():
            if v.is_zero():
                continue
            if a == b:
                raise ValueError("structure functions must be antisymmetric in the lower pair")
            if a < b:
                key, val = (cc, a, b), v
            else:
                key, val = (cc, b, a), -v
            if key in clean:
                clean[key] = clean[key] + val
                if clean[key].is_zero():
                    del clean[key]
            else:
                clean[key] = val
        self.c = clean

    def anchor(self, a: int, i: int) -> BasePoly:
        return self.rho.get((a, i), BasePoly(self.base_dim))

    def structure(self, c: int, a: int, b: int) -> BasePoly:
        if a == b:
            return BasePoly(self.base_dim)
        if a < b:
            v = self.c.get((c, a, b))
            return v if v is not None else BasePoly(self.base_dim)
        v = self.c.get((c, b, a))
        return -v if v is not None else BasePoly(self.base_dim)

    def is_zero(self) -> bool:
        return not self.rho and not self.c

    def __eq__(self, other) -> bool:
        if not isinstance(other, LieAlgebroidData):
            return NotImplemented
        return (self.rank, self.base_dim, self.rho, self.c) == \
            (other.rank, other.base_dim, other.rho, other.c)


@dataclass
class DualStructureData:
    """Decoded (2,1)-hamiltonian: a bracket-with-anchor shape on the dual."""

    rank: int
    base_dim: int
    rho: dict[tuple[int, int], BasePoly] = field(default_factory=dict)   # rho*[b][i]
    gamma: dict[tuple[int, int, int], BasePoly] = field(default_factory=dict)  # g^ab_c on a < b

    def anchor(self, b: int, i: int) -> BasePoly:
        return self.rho.get((b, i), BasePoly(self.base_dim))

    def structure(self, a: int, b: int, c: int) -> BasePoly:
        """Coefficient of e^c in [e^a, e^b]."""
        if a == b:
            return BasePoly(self.base_dim)
        if a < b:
            v = self.gamma.get((a, b, c))
            return v if v is not None else BasePoly(self.base_dim)
        v = self.gamma.get((b, a, c))
        return -v if v is not None else BasePoly(self.base_dim)


@dataclass
class CpsTriple:
    pi: TensorData
    n: TensorData
    sigma: TensorData
    lam: int

    def __post_init__(self) -> None:
        if self.lam not in (-1, 0, 1):
            raise ValueError("lambda must be one of -1, 0, 1")


@dataclass
class PqnQuadruple:
    pi: TensorData
    n: TensorData
    psi: TensorData
    h: TensorData


class MatrixResidual:
    """A rank x rank table of base polynomials used as a check residual."""

    def __init__(self, rank: int, base_dim: int, entries=None):
        self.rank = rank
        self.base_dim = base_dim
        self._m = {k: v for k, v in (entries or {}).items() if not v.is_zero()}

    def set(self, a: int, b: int, value: BasePoly) -> None:
        if value.is_zero():
            self._m.pop((a, b), None)
        else:
            self._m[(a, b)] = value

    def get(self, a: int, b: int) -> BasePoly:
        return self._m.get((a, b), BasePoly(self.base_dim))

    def is_zero(self) -> bool:
        return not self._m

    def __str__(self) -> str:
        if self.is_zero():
            return "0"
        return "; ".join(f"[{a+1},{b+1}] = {v}" for (a, b), v in sorted(self._m.items()))

    __repr__ = __str__


@dataclass
class ConditionResult:
    name: str
    residual: object  # GradedPoly | TensorData | MatrixResidual
    passed: bool
    note: str = ""

    def residual_str(self) -> str:
        return str(self.residual)


class CheckReport:
    """Named exact residuals with per-condition and overall verdicts."""

    def __init__(self, title: str):
        self.title = title
        self.conditions: list[ConditionResult] = []

    def add(self, name: str, residual, note: str = "") -> ConditionResult:
        passed = residual_is_zero(residual)
        result = ConditionResult(name, residual, passed, note)
        self.conditions.append(result)
        return result

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.conditions)

    def failures(self) -> list[ConditionResult]:
        return [c for c in self.conditions if not c.passed]

    def __getitem__(self, name: str) -> ConditionResult:
        for c in self.conditions:
            if c.name == name:
                return c
        raise KeyError(name)

    def to_dict(self) -> dict:
        return {
            "title": self.title,
            "pass": self.passed,
            "checks": [
                {
                    "name": c.name,
                    "pass": c.passed,
                    "note": c.note,
                    "residual": None if c.passed else c.residual_str(),
                }
                for c in self.conditions
            ],
        }

    def __str__(self) -> str:
        lines = [f"{self.title}:"]
        for c in self.conditions:
            status = "ok  " if c.passed else "FAIL"
            line = f"  [{status}] {c.name}"
            if c.note:
                line += f"  ({c.note})"
            if not c.passed:
                line += f"  residual: {c.residual_str()}"
            lines.append(line)
        return "\n".join(lines)


def residual_is_zero(residual) -> bool:
    if isinstance(residual, (GradedPoly, TensorData, MatrixResidual, BasePoly)):
        return residual.is_zero()
    if isinstance(residual, dict):
        return all(residual_is_zero(v) for v in residual.values())
    if isinstance(residual, (list, tuple)):
        return all(residual_is_zero(v) for v in residual)
    raise TypeError(f"unsupported residual type {type(residual)!r}")


# ---------------------------------------------------------------------------
# encoding
# ---------------------------------------------------------------------------


def _x_monos(value: BasePoly, coords: CoordinateSystem):
    for exp, coeff in value.terms():
        yield exp, coeff


def encode_algebroid(data: LieAlgebroidData, coords: CoordinateSystem) -> GradedPoly:
    """mu = sum rho^i_a p_i xi^a - 1/2 sum c^c_ab th_c xi^a xi^b."""
    _check_shape(data.rank, data.base_dim, coords)
    terms: dict[Monomial, Fraction] = {}
    zero = coords.zero_exp
    for (a, i), value in data.rho.items():
        for exp, coeff in _x_monos(value, coords):
            p = list(zero)
            p[i] += 1
            terms[(exp, tuple(p), (), (a,))] = terms.get((exp, tuple(p), (), (a,)), Fraction(0)) + coeff
    for (cc, a, b), value in data.c.items():  # stored with a < b
        for exp, coeff in _x_monos(value, coords):
            mono = (exp, zero, (cc,), (a, b))
            terms[mono] = terms.get(mono, Fraction(0)) - coeff
    return GradedPoly(coords, terms)


def encode_tensor(t: TensorData, coords: CoordinateSystem) -> GradedPoly:
    _check_shape(t.rank, t.base_dim, coords)
    terms: dict[Monomial, Fraction] = {}
    zero = coords.zero_exp
    if t.kind == ENDOMORPHISM:
        for (a, b), value in t.entries():
            for exp, coeff in _x_monos(value, coords):
                mono = (exp, zero, (a,), (b,))
                terms[mono] = terms.get(mono, Fraction(0)) - coeff
    elif t.kind == BIVECTOR:
        for key, value in t.entries():
            for exp, coeff in _x_monos(value, coords):
                mono = (exp, zero, key, ())
                terms[mono] = terms.get(mono, Fraction(0)) + coeff
    elif t.kind == THREE_VECTOR:
        for key, value in t.entries():
            for exp, coeff in _x_monos(value, coords):
                mono = (exp, zero, key, ())
                terms[mono] = terms.get(mono, Fraction(0)) + coeff
    elif t.kind in (TWO_FORM, THREE_FORM):
        for key, value in t.entries():
            for exp, coeff in _x_monos(value, coords):
                mono = (exp, zero, (), key)
                terms[mono] = terms.get(mono, Fraction(0)) + coeff
    return GradedPoly(coords, terms)


def encode_section(vec: list[BasePoly] | None, cov: list[BasePoly] | None,
                   coords: CoordinateSystem) -> GradedPoly:
    """X + alpha -> sum X^a th_a + sum alpha_a xi^a."""
    terms: dict[Monomial, Fraction] = {}
    zero = coords.zero_exp
    if vec is not None:
        for a, value in enumerate(vec):
            for exp, coeff in value.terms():
                mono = (exp, zero, (a,), ())
                terms[mono] = terms.get(mono, Fraction(0)) + coeff
    if cov is not None:
        for a, value in enumerate(cov):
            for exp, coeff in value.terms():
                mono = (exp, zero, (), (a,))
                terms[mono] = terms.get(mono, Fraction(0)) + coeff
    return GradedPoly(coords, terms)


def encode(obj, coords: CoordinateSystem) -> GradedPoly:
    """Encode tensor data or algebroid data as a hamiltonian."""
    if isinstance(obj, LieAlgebroidData):
        return encode_algebroid(obj, coords)
    if isinstance(obj, TensorData):
        return encode_tensor(obj, coords)
    raise TypeError(f"cannot encode {type(obj)!r}")


# ---------------------------------------------------------------------------
# decoding
# ---------------------------------------------------------------------------


def _check_shape(rank: int, base_dim: int, coords: CoordinateSystem) -> None:
    if rank != coords.rank or base_dim != coords.base_dim:
        raise ValueError("tensor shape does not match the coordinate system")


def _collect_x(poly_terms, base_dim: int) -> BasePoly:
    out = BasePoly(base_dim)
    for exp, coeff in poly_terms:
        out = out + BasePoly(base_dim, {exp: coeff})
    return out


def decode_tensor(f: GradedPoly, kind: str) -> TensorData:
    """Inverse of encode_tensor; f must be bihomogeneous of the kind's bidegree."""
    coords = f.coords
    expected = KIND_BIDEGREE[kind]
    t = TensorData(kind, coords.rank, coords.base_dim)
    if f.is_zero():
        return t
    bd = f.bidegree()
    if bd is None or tuple(bd) != expected:
        raise ValueError(f"hamiltonian is not bihomogeneous of bidegree {expected}")
    buckets: dict[tuple, dict] = {}
    for (x, p, th, xi), coeff in f.terms():
        if any(p):
            raise ValueError("tensor hamiltonian cannot contain momenta")
        if kind == ENDOMORPHISM:
            key = (th[0], xi[0])
            coeff = -coeff
        elif kind in (BIVECTOR, THREE_VECTOR):
            key = th
        else:
            key = xi
        buckets.setdefault(key, {})[x] = coeff
    for key, terms in buckets.items():
        t.set_entry(key, BasePoly(coords.base_dim, terms))
    return t


def decode_algebroid(f: GradedPoly) -> LieAlgebroidData:
    """Inverse of encode_algebroid on a (1,2)-bidegree hamiltonian."""
    coords = f.coords
    rho: dict[tuple[int, int], BasePoly] = {}
    c: dict[tuple[int, int, int], BasePoly] = {}
    rho_b: dict[tuple[int, int], dict] = {}
    c_b: dict[tuple[int, int, int], dict] = {}
    for (x, p, th, xi), coeff in f.terms():
        if sum(p) == 1 and not th and len(xi) == 1:
            i = next(j for j, e in enumerate(p) if e)
            rho_b.setdefault((xi[0], i), {})[x] = coeff
        elif not any(p) and len(th) == 1 and len(xi) == 2:
            c_b.setdefault((th[0], xi[0], xi[1]), {})[x] = -coeff
        else:
            raise ValueError("hamiltonian is not of Lie-algebroid bidegree (1,2)")
    for key, terms in rho_b.items():
        rho[key] = BasePoly(coords.base_dim, terms)
    for key, terms in c_b.items():
        c[key] = BasePoly(coords.base_dim, terms)
    return LieAlgebroidData(coords.rank, coords.base_dim, rho, c)


def decode_dual_structure(f: GradedPoly) -> DualStructureData:
    """Decode a (2,1)-bidegree hamiltonian into dual anchor and bracket tables."""
    coords = f.coords
    rho_b: dict[tuple[int, int], dict] = {}
    g_b: dict[tuple[int, int, int], dict] = {}
    for (x, p, th, xi), coeff in f.terms():
        if sum(p) == 1 and len(th) == 1 and not xi:
            i = next(j for j, e in enumerate(p) if e)
            rho_b.setdefault((th[0], i), {})[x] = coeff
        elif not any(p) and len(th) == 2 and len(xi) == 1:
            g_b.setdefault((th[0], th[1], xi[0]), {})[x] = -coeff
        else:
            raise ValueError("hamiltonian is not of dual-structure bidegree (2,1)")
    out = DualStructureData(coords.rank, coords.base_dim)
    for key, terms in rho_b.items():
        out.rho[key] = BasePoly(coords.base_dim, terms)
    for key, terms in g_b.items():
        out.gamma[key] = BasePoly(coords.base_dim, terms)
    return out


def decode(f: GradedPoly, kind: str):
    if kind in KIND_BIDEGREE:
        return decode_tensor(f, kind)
    if kind == "algebroid":
        return decode_algebroid(f)
    if kind == "dual_structure":
        return decode_dual_structure(f)
    raise ValueError(f"unknown decode kind {kind!r}")


# ---------------------------------------------------------------------------
# small matrix algebra on tensor tables
# ---------------------------------------------------------------------------


def endo_compose(m1: TensorData, m2: TensorData) -> TensorData:
    """(m1 o m2)^a_b = sum_e m1^a_e m2^e_b."""
    out = TensorData(ENDOMORPHISM, m1.rank, m1.base_dim)
    for a in range(m1.rank):
        for b in range(m1.rank):
            acc = BasePoly(m1.base_dim)
            for e in range(m1.rank):
                acc = acc + m1.entry(a, e) * m2.entry(e, b)
            out.set_entry((a, b), acc)
    return out


def identity_endo(rank: int, base_dim: int) -> TensorData:
    out = TensorData(ENDOMORPHISM, rank, base_dim)
    for a in range(rank):
        out.set_entry((a, a), BasePoly.const(base_dim, 1))
    return out


def sharp(pi: TensorData, alpha: list[BasePoly]) -> list[BasePoly]:
    """pi-sharp of a covector: (pi-sharp alpha)^b = sum_a alpha_a pi^ab."""
    out = [BasePoly(pi.base_dim) for _ in range(pi.rank)]
    for b in range(pi.rank):
        acc = BasePoly(pi.base_dim)
        for a in range(pi.rank):
            acc = acc + alpha[a] * pi.entry(a, b)
        out[b] = acc
    return out


def flat(omega: TensorData, x: list[BasePoly]) -> list[BasePoly]:
    """omega-flat of a vector: (omega-flat X)_b = sum_a X^a omega_ab."""
    out = [BasePoly(omega.base_dim) for _ in range(omega.rank)]
    for b in range(omega.rank):
        acc = BasePoly(omega.base_dim)
        for a in range(omega.rank):
            acc = acc + x[a] * omega.entry(a, b)
        out[b] = acc
    return out


def endo_apply(n: TensorData, x: list[BasePoly]) -> list[BasePoly]:
    """(N X)^a = sum_b N^a_b X^b."""
    out = []
    for a in range(n.rank):
        acc = BasePoly(n.base_dim)
        for b in range(n.rank):
            acc = acc + n.entry(a, b) * x[b]
        out.append(acc)
    return out


def endo_transpose_apply(n: TensorData, alpha: list[BasePoly]) -> list[BasePoly]:
    """(tN alpha)_b = sum_a alpha_a N^a_b."""
    out = []
    for b in range(n.rank):
        acc = BasePoly(n.base_dim)
        for a in range(n.rank):
            acc = acc + alpha[a] * n.entry(a, b)
        out.append(acc)
    return out


def sharp_compose_flat(pi: TensorData, omega: TensorData) -> TensorData:
    """The endomorphism pi-sharp o omega-flat."""
    rank, base_dim = pi.rank, pi.base_dim
    out = TensorData(ENDOMORPHISM, rank, base_dim)
    for b in range(rank):
        col = sharp(pi, [omega.entry(b, d) for d in range(rank)])
        for a in range(rank):
            out.set_entry((a, b), col[a])
    return out


def np_commutation_residual(n: TensorData, pi: TensorData) -> MatrixResidual:
    """N o pi-sharp - pi-sharp o tN as a matrix on the dual basis."""
    rank, base_dim = n.rank, n.base_dim
    out = MatrixResidual(rank, base_dim)
    for a in range(rank):
        lhs = endo_apply(n, sharp(pi, [BasePoly.const(base_dim, 1) if d == a else BasePoly(base_dim)
                                       for d in range(rank)]))
        rhs = sharp(pi, endo_transpose_apply(n, [BasePoly.const(base_dim, 1) if d == a else BasePoly(base_dim)
                                                 for d in range(rank)]))
        for c in range(rank):
            out.set(a, c, lhs[c] - rhs[c])
    return out


def sigma_n_symmetry_residual(sigma: TensorData, n: TensorData) -> MatrixResidual:
    """sigma-flat o N - tN o sigma-flat on the basis."""
    rank, base_dim = n.rank, n.base_dim
    out = MatrixResidual(rank, base_dim)
    for b in range(rank):
        basis = [BasePoly.const(base_dim, 1) if d == b else BasePoly(base_dim) for d in range(rank)]
        lhs = flat(sigma, endo_apply(n, basis))
        rhs = endo_transpose_apply(n, flat(sigma, basis))
        for c in range(rank):
            out.set(b, c, lhs[c] - rhs[c])
    return out


def cps_algebraic_residual(triple: CpsTriple) -> MatrixResidual:
    """N^2 + pi-sharp o sigma-flat - lambda id."""
    n2 = endo_compose(triple.n, triple.n)
    ps = endo_compose_sharp_flat(triple.pi, triple.sigma)
    rank, base_dim = triple.n.rank, triple.n.base_dim
    out = MatrixResidual(rank, base_dim)
    lam = BasePoly.const(base_dim, triple.lam)
    for a in range(rank):
        for b in range(rank):
            val = n2.entry(a, b) + ps.entry(a, b)
            if a == b:
                val = val - lam
            out.set(a, b, val)
    return out


def endo_compose_sharp_flat(pi: TensorData, sigma: TensorData) -> TensorData:
    """pi-sharp o sigma-flat as an endomorphism of A."""
    rank, base_dim = pi.rank, pi.base_dim
    out = TensorData(ENDOMORPHISM, rank, base_dim)
    for b in range(rank):
        basis = [BasePoly.const(base_dim, 1) if d == b else BasePoly(base_dim) for d in range(rank)]
        col = sharp(pi, flat(sigma, basis))
        for a in range(rank):
            out.set_entry((a, b), col[a])
    return out


def omega_n_tensor(omega: TensorData, n: TensorData, require_antisymmetric: bool = True) -> TensorData:
    """omega_N = omega(N., .); validated for antisymmetry unless disabled."""
    rank, base_dim = omega.rank, omega.base_dim
    raw: dict[tuple[int, int], BasePoly] = {}
    for a in range(rank):
        for b in range(rank):
            acc = BasePoly(base_dim)
            for e in range(rank):
                acc = acc + n.entry(e, a) * omega.entry(e, b)
            raw[(a, b)] = acc
    if require_antisymmetric:
        for a in range(rank):
            if not raw[(a, a)].is_zero():
                raise ValueError("omega(N., .) is not antisymmetric")
            for b in range(a + 1, rank):
                if not (raw[(a, b)] + raw[(b, a)]).is_zero():
                    raise ValueError("omega(N., .) is not antisymmetric")
    out = TensorData(TWO_FORM, rank, base_dim)
    for a in range(rank):
        for b in range(a + 1, rank):
            val = raw[(a, b)] - raw[(b, a)]
            out.set_entry((a, b), val.scale(Fraction(1, 2)))
    return out
