"""Independent classical tensor calculus evaluated on explicit basis tuples.

Everything here works on coefficient tables (BasePoly entries) and the
displayed multilinear formulas: the Cartan differential, interior products,
Lie derivatives, the Schouten bracket on decomposable multivectors, the
deformed brackets attached to a (1,1)-tensor or a bivector, the Dorfman
bracket with background, and the torsion / compatibility residual tables.

None of it touches the graded-polynomial bracket; agreement of the two
routes is asserted by the cross-check suites.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations

from .basepoly import BasePoly
from .tensors import (
    BIVECTOR,
    ENDOMORPHISM,
    THREE_FORM,
    THREE_VECTOR,
    TWO_FORM,
    CpsTriple,
    LieAlgebroidData,
    MatrixResidual,
    TensorData,
    endo_apply,
    endo_transpose_apply,
    flat,
    sharp,
)

Vector = list[BasePoly]     # components over e_1..e_r
Covector = list[BasePoly]   # components over e^1..e^r


def basis_vector(rank: int, base_dim: int, a: int) -> Vector:
    return [BasePoly.const(base_dim, 1) if i == a else BasePoly(base_dim) for i in range(rank)]


@dataclass
class GeneralizedSection:
    """An element X + alpha of the double A + A*."""

    vec: Vector
    cov: Covector

    @classmethod
    def zero(cls, rank: int, base_dim: int) -> "GeneralizedSection":
        return cls([BasePoly(base_dim) for _ in range(rank)],
                   [BasePoly(base_dim) for _ in range(rank)])

    def __add__(self, other: "GeneralizedSection") -> "GeneralizedSection":
        return GeneralizedSection([a + b for a, b in zip(self.vec, other.vec)],
                                  [a + b for a, b in zip(self.cov, other.cov)])

    def __sub__(self, other: "GeneralizedSection") -> "GeneralizedSection":
        return GeneralizedSection([a - b for a, b in zip(self.vec, other.vec)],
                                  [a - b for a, b in zip(self.cov, other.cov)])

    def is_zero(self) -> bool:
        return all(v.is_zero() for v in self.vec) and all(v.is_zero() for v in self.cov)


def pairing(x: GeneralizedSection, y: GeneralizedSection) -> BasePoly:
    """<X+alpha, Y+beta> = beta(X) + alpha(Y)."""
    base_dim = x.vec[0].base_dim if x.vec else 0
    acc = BasePoly(base_dim)
    for a in range(len(x.vec)):
        acc = acc + y.cov[a] * x.vec[a] + x.cov[a] * y.vec[a]
    return acc


# ---------------------------------------------------------------------------
# anchored bracket and Cartan calculus
# ---------------------------------------------------------------------------


def anchor_apply(alg: LieAlgebroidData, x: Vector, f: BasePoly) -> BasePoly:
    """rho(X) f for a section X with polynomial components."""
    out = BasePoly(alg.base_dim)
    for a in range(alg.rank):
        if x[a].is_zero():
            continue
        for i in range(alg.base_dim):
            rho = alg.anchor(a, i)
            if rho.is_zero():
                continue
            out = out + x[a] * rho * f.diff(i)
    return out


def bracket_sections(alg: LieAlgebroidData, x: Vector, y: Vector) -> Vector:
    """[X, Y] with the Leibniz rule through the anchor."""
    out = [BasePoly(alg.base_dim) for _ in range(alg.rank)]
    for a in range(alg.rank):
        for b in range(alg.rank):
            coeff = x[a] * y[b]
            if not coeff.is_zero():
                for c in range(alg.rank):
                    s = alg.structure(c, a, b)
                    if not s.is_zero():
                        out[c] = out[c] + coeff * s
    for b in range(alg.rank):
        out[b] = out[b] + anchor_apply(alg, x, y[b]) - anchor_apply(alg, y, x[b])
    return out


def form_value(form: TensorData | BasePoly, args: list[Vector]) -> BasePoly:
    """Evaluate a k-form coefficient table on k vector sections."""
    if isinstance(form, BasePoly):
        if args:
            raise ValueError("a function takes no arguments")
        return form
    rank, base_dim = form.rank, form.base_dim
    k = form.degree()
    if len(args) != k:
        raise ValueError("wrong number of arguments")
    out = BasePoly(base_dim)
    for idx, value in form.entries():
        # sum over all assignments of the increasing index tuple to argument slots
        from itertools import permutations as _perms
        for perm in _perms(range(k)):
            sign = _permutation_sign(perm)
            coeff = BasePoly.const(base_dim, 1)
            for slot, pos in enumerate(perm):
                coeff = coeff * args[slot][idx[pos]]
                if coeff.is_zero():
                    break
            if not coeff.is_zero():
                out = out + value.scale(sign) * coeff
    return out


def _permutation_sign(perm) -> int:
    sign = 1
    p = list(perm)
    for i in range(len(p)):
        for j in range(i + 1, len(p)):
            if p[i] > p[j]:
                sign = -sign
    return sign


def one_form_value(alpha: Covector, x: Vector) -> BasePoly:
    out = BasePoly(alpha[0].base_dim)
    for a in range(len(alpha)):
        out = out + alpha[a] * x[a]
    return out


def cartan_d(alg: LieAlgebroidData, form: TensorData | BasePoly | Covector):
    """The Cartan differential on functions, 1-forms and 2-forms.

    d w (X_0..X_k) = sum_i (-1)^i rho(X_i) w(.. no X_i ..)
                   + sum_{i<j} (-1)^{i+j} w([X_i, X_j], .. no X_i, X_j ..).
    """
    rank, base_dim = alg.rank, alg.base_dim
    basis = [basis_vector(rank, base_dim, a) for a in range(rank)]

    if isinstance(form, BasePoly):
        out: Covector = []
        for a in range(rank):
            out.append(anchor_apply(alg, basis[a], form))
        return out

    if isinstance(form, list):  # 1-form as component list
        out2 = TensorData(TWO_FORM, rank, base_dim)
        for a, b in combinations(range(rank), 2):
            val = anchor_apply(alg, basis[a], form[b]) - anchor_apply(alg, basis[b], form[a])
            br = bracket_sections(alg, basis[a], basis[b])
            val = val - one_form_value(form, br)
            out2.set_entry((a, b), val)
        return out2

    if form.kind == TWO_FORM:
        out3 = TensorData(THREE_FORM, rank, base_dim)
        for a, b, c in combinations(range(rank), 3):
            val = BasePoly(base_dim)
            trip = (a, b, c)
            for i in range(3):
                rest = [basis[trip[j]] for j in range(3) if j != i]
                term = anchor_apply(alg, basis[trip[i]], form_value(form, rest))
                val = val + (term if i % 2 == 0 else -term)
            for i, j in combinations(range(3), 2):
                others = [basis[trip[k]] for k in range(3) if k not in (i, j)]
                br = bracket_sections(alg, basis[trip[i]], basis[trip[j]])
                term = form_value(form, [br] + others)
                val = val + (term if (i + j) % 2 else -term)
            out3.set_entry((a, b, c), val)
        return out3

    raise ValueError("cartan_d supports functions, 1-forms and 2-forms")


def interior_vector(x: Vector, form: TensorData) -> list | TensorData:
    """i_X of a 2- or 3-form; returns a 1-form list or a TWO_FORM table."""
    rank, base_dim = form.rank, form.base_dim
    basis = [basis_vector(rank, base_dim, a) for a in range(rank)]
    if form.kind == TWO_FORM:
        return [form_value(form, [x, basis[a]]) for a in range(rank)]
    if form.kind == THREE_FORM:
        out = TensorData(TWO_FORM, rank, base_dim)
        for a, b in combinations(range(rank), 2):
            out.set_entry((a, b), form_value(form, [x, basis[a], basis[b]]))
        return out
    raise ValueError("interior_vector supports 2- and 3-forms")


def interior_pair(x: Vector, y: Vector, form: TensorData) -> Covector:
    """i_{X ^ Y} H := i_Y i_X H = H(X, Y, .)."""
    rank, base_dim = form.rank, form.base_dim
    basis = [basis_vector(rank, base_dim, a) for a in range(rank)]
    return [form_value(form, [x, y, basis[a]]) for a in range(rank)]


def interior_endo(n: TensorData, form):
    """i_N: the degree-zero derivation sum_i w(.., N X_i, ..).

    Accepts 1-forms (lists), 2-forms and 3-forms.
    """
    rank, base_dim = n.rank, n.base_dim
    basis = [basis_vector(rank, base_dim, a) for a in range(rank)]
    nb = [endo_apply(n, basis[a]) for a in range(rank)]
    if isinstance(form, list):
        return endo_transpose_apply(n, form)
    if form.kind == TWO_FORM:
        out = TensorData(TWO_FORM, rank, base_dim)
        for a, b in combinations(range(rank), 2):
            out.set_entry((a, b), form_value(form, [nb[a], basis[b]]) + form_value(form, [basis[a], nb[b]]))
        return out
    if form.kind == THREE_FORM:
        out = TensorData(THREE_FORM, rank, base_dim)
        for a, b, c in combinations(range(rank), 3):
            val = form_value(form, [nb[a], basis[b], basis[c]]) \
                + form_value(form, [basis[a], nb[b], basis[c]]) \
                + form_value(form, [basis[a], basis[b], nb[c]])
            out.set_entry((a, b, c), val)
        return out
    raise ValueError("interior_endo supports 1-, 2- and 3-forms")


def lie_derivative(alg: LieAlgebroidData, x: Vector, form):
    """L_X = i_X d + d i_X on functions, 1-forms and 2-forms."""
    if isinstance(form, BasePoly):
        return anchor_apply(alg, x, form)
    if isinstance(form, list):  # 1-form
        d_form = cartan_d(alg, form)          # 2-form
        term1 = interior_vector(x, d_form)    # 1-form
        fx = one_form_value(form, x)
        term2 = cartan_d(alg, fx)             # 1-form
        return [a + b for a, b in zip(term1, term2)]
    if form.kind == TWO_FORM:
        d_form = cartan_d(alg, form)                     # 3-form
        term1 = interior_vector(x, d_form)               # 2-form
        ixf = interior_vector(x, form)                   # 1-form
        term2 = cartan_d(alg, ixf)                       # 2-form
        return term1 + term2
    raise ValueError("lie_derivative supports functions, 1-forms and 2-forms")


# ---------------------------------------------------------------------------
# Schouten bracket on low-degree multivectors
# ---------------------------------------------------------------------------

# A multivector is a dict: strictly increasing index tuple -> BasePoly;
# the empty tuple carries the function part.
Multivector = dict

def mv_zero() -> Multivector:
    return {}


def mv_from_tensor(t: TensorData) -> Multivector:
    if t.kind not in (BIVECTOR, THREE_VECTOR):
        raise ValueError("expected a multivector tensor")
    return {idx: val for idx, val in t.entries()}


def mv_to_tensor(mv: Multivector, kind: str, rank: int, base_dim: int) -> TensorData:
    out = TensorData(kind, rank, base_dim)
    for idx, val in mv.items():
        out.set_entry(idx, val)
    return out


def mv_add(a: Multivector, b: Multivector) -> Multivector:
    out = dict(a)
    for idx, val in b.items():
        s = out.get(idx)
        s = val if s is None else s + val
        if s.is_zero():
            out.pop(idx, None)
        else:
            out[idx] = s
    return out


def mv_scale(a: Multivector, value) -> Multivector:
    out = {}
    for idx, val in a.items():
        v = val.scale(value)
        if not v.is_zero():
            out[idx] = v
    return out


def mv_wedge_index(idx1: tuple[int, ...], idx2: tuple[int, ...]):
    merged = idx1 + idx2
    if len(set(merged)) != len(merged):
        return None
    order = sorted(range(len(merged)), key=lambda i: merged[i])
    sign = _permutation_sign(order)
    return sign, tuple(sorted(merged))


def mv_wedge(a: Multivector, b: Multivector) -> Multivector:
    out: Multivector = {}
    for i1, v1 in a.items():
        for i2, v2 in b.items():
            w = mv_wedge_index(i1, i2)
            if w is None:
                continue
            sign, idx = w
            term = (v1 * v2).scale(sign)
            s = out.get(idx)
            s = term if s is None else s + term
            if s.is_zero():
                out.pop(idx, None)
            else:
                out[idx] = s
    return out


def schouten(alg: LieAlgebroidData, p: Multivector, q: Multivector) -> Multivector:
    """The Schouten bracket, extended from

        [X, Y] = bracket_A,   [X, f] = rho(X) f,   [f, g] = 0

    by [P, Q ^ R] = [P, Q] ^ R + (-1)^{(p-1) q} Q ^ [P, R] and graded
    antisymmetry [P, Q] = -(-1)^{(p-1)(q-1)} [Q, P].
    """
    out = mv_zero()
    for i1, v1 in p.items():
        for i2, v2 in q.items():
            factors1 = [("f", v1)] + [("e", a) for a in i1]
            factors2 = [("f", v2)] + [("e", a) for a in i2]
            out = mv_add(out, _schouten_dec(alg, factors1, factors2))
    return out


def _factor_degree(f) -> int:
    return 1 if f[0] == "e" else 0


def _factors_degree(fs) -> int:
    return sum(_factor_degree(f) for f in fs)


def _mv_of_factors(alg: LieAlgebroidData, fs) -> Multivector:
    out: Multivector = {(): BasePoly.const(alg.base_dim, 1)}
    for f in fs:
        if f[0] == "f":
            out = mv_scale_bp(out, f[1])
        else:
            out = mv_wedge(out, {(f[1],): BasePoly.const(alg.base_dim, 1)})
    return out


def mv_scale_bp(a: Multivector, value: BasePoly) -> Multivector:
    out = {}
    for idx, val in a.items():
        v = val * value
        if not v.is_zero():
            out[idx] = v
    return out


def _schouten_dec(alg: LieAlgebroidData, fs1, fs2) -> Multivector:
    """Schouten bracket of two decomposables given as factor lists."""
    p = _factors_degree(fs1)
    q = _factors_degree(fs2)

    if len(fs2) > 1:
        # [P, v ^ B] = [P, v] ^ B + (-1)^{(p-1) deg v} v ^ [P, B]
        v, rest = fs2[0], fs2[1:]
        dv = _factor_degree(v)
        term1 = mv_wedge(_schouten_dec(alg, fs1, [v]), _mv_of_factors(alg, rest))
        sign = -1 if ((p - 1) * dv) % 2 else 1
        term2 = mv_scale(mv_wedge(_mv_of_factors(alg, [v]), _schouten_dec(alg, fs1, rest)), sign)
        return mv_add(term1, term2)

    if len(fs1) > 1:
        # antisymmetry then recurse on the (now shorter) second slot
        v = fs2[0]
        dv = _factor_degree(v)
        sign = -1 if ((p - 1) * (dv - 1)) % 2 else 1
        return mv_scale(_schouten_dec(alg, fs2, fs1), -sign)

    # two atoms
    u, v = fs1[0], fs2[0]
    if u[0] == "f" and v[0] == "f":
        return mv_zero()
    if u[0] == "e" and v[0] == "f":
        val = anchor_apply(alg, basis_vector(alg.rank, alg.base_dim, u[1]), v[1])
        return {(): val} if not val.is_zero() else mv_zero()
    if u[0] == "f" and v[0] == "e":
        val = -anchor_apply(alg, basis_vector(alg.rank, alg.base_dim, v[1]), u[1])
        return {(): val} if not val.is_zero() else mv_zero()
    br = bracket_sections(alg, basis_vector(alg.rank, alg.base_dim, u[1]),
                          basis_vector(alg.rank, alg.base_dim, v[1]))
    return {(a,): br[a] for a in range(alg.rank) if not br[a].is_zero()}


# ---------------------------------------------------------------------------
# Jacobi / anchor residuals
# ---------------------------------------------------------------------------


def jacobiator_residuals(alg: LieAlgebroidData):
    """Jacobiator values on basis triples plus anchor-morphism residuals.

    The structure is a Lie algebroid exactly when every returned entry is
    zero: the Jacobiator table covers the bracket, and the anchor table
    covers rho([X,Y]) = [rho X, rho Y] on the coordinate functions.
    """
    rank, base_dim = alg.rank, alg.base_dim
    basis = [basis_vector(rank, base_dim, a) for a in range(rank)]
    jac: dict[tuple[int, int, int], Vector] = {}
    for a, b, c in combinations(range(rank), 3):
        val = bracket_sections(alg, bracket_sections(alg, basis[a], basis[b]), basis[c])
        term = bracket_sections(alg, bracket_sections(alg, basis[b], basis[c]), basis[a])
        val = [x + y for x, y in zip(val, term)]
        term = bracket_sections(alg, bracket_sections(alg, basis[c], basis[a]), basis[b])
        val = [x + y for x, y in zip(val, term)]
        if any(not v.is_zero() for v in val):
            jac[(a, b, c)] = val
    anchor: dict[tuple[int, int, int], BasePoly] = {}
    for a, b in combinations(range(rank), 2):
        br = bracket_sections(alg, basis[a], basis[b])
        for i in range(base_dim):
            xi = BasePoly.var(base_dim, i)
            lhs = anchor_apply(alg, br, xi)
            rhs = anchor_apply(alg, basis[a], anchor_apply(alg, basis[b], xi)) \
                - anchor_apply(alg, basis[b], anchor_apply(alg, basis[a], xi))
            res = lhs - rhs
            if not res.is_zero():
                anchor[(a, b, i)] = res
    return jac, anchor


def is_lie_algebroid(alg: LieAlgebroidData) -> bool:
    jac, anchor = jacobiator_residuals(alg)
    return not jac and not anchor


# ---------------------------------------------------------------------------
# deformed structures
# ---------------------------------------------------------------------------


def bracket_deformed(alg: LieAlgebroidData, n: TensorData, x: Vector, y: Vector) -> Vector:
    """[X,Y]_N = [NX, Y] + [X, NY] - N [X, Y]."""
    t1 = bracket_sections(alg, endo_apply(n, x), y)
    t2 = bracket_sections(alg, x, endo_apply(n, y))
    t3 = endo_apply(n, bracket_sections(alg, x, y))
    return [a + b - c for a, b, c in zip(t1, t2, t3)]


def deformed_algebroid(alg: LieAlgebroidData, n: TensorData) -> LieAlgebroidData:
    """Structure tables of ([.,.]_N, rho o N) read off on basis pairs."""
    rank, base_dim = alg.rank, alg.base_dim
    basis = [basis_vector(rank, base_dim, a) for a in range(rank)]
    rho: dict[tuple[int, int], BasePoly] = {}
    for a in range(rank):
        na = endo_apply(n, basis[a])
        for i in range(base_dim):
            acc = BasePoly(base_dim)
            for b in range(rank):
                acc = acc + na[b] * alg.anchor(b, i)
            if not acc.is_zero():
                rho[(a, i)] = acc
    c: dict[tuple[int, int, int], BasePoly] = {}
    for a, b in combinations(range(rank), 2):
        br = bracket_deformed(alg, n, basis[a], basis[b])
        for cc in range(rank):
            if not br[cc].is_zero():
                c[(cc, a, b)] = br[cc]
    return LieAlgebroidData(rank, base_dim, rho, c)


def nijenhuis_torsion_table(alg: LieAlgebroidData, n: TensorData) -> LieAlgebroidData:
    """T_N(e_a, e_b) = [Ne_a, Ne_b] - N([e_a, e_b]_N) as a (1,2)-shaped table.

    The anchor slot of the returned table is always zero; the torsion is
    tensorial.
    """
    rank, base_dim = alg.rank, alg.base_dim
    basis = [basis_vector(rank, base_dim, a) for a in range(rank)]
    c: dict[tuple[int, int, int], BasePoly] = {}
    for a, b in combinations(range(rank), 2):
        t1 = bracket_sections(alg, endo_apply(n, basis[a]), endo_apply(n, basis[b]))
        t2 = endo_apply(n, bracket_deformed(alg, n, basis[a], basis[b]))
        val = [u - v for u, v in zip(t1, t2)]
        for cc in range(rank):
            if not val[cc].is_zero():
                c[(cc, a, b)] = val[cc]
    return LieAlgebroidData(rank, base_dim, {}, c)


def pi_bracket(alg: LieAlgebroidData, pi: TensorData, alpha: Covector, beta: Covector) -> Covector:
    """[alpha, beta]_pi = L_{pi# alpha} beta - L_{pi# beta} alpha - d pi(alpha, beta)."""
    pa = sharp(pi, alpha)
    pb = sharp(pi, beta)
    t1 = lie_derivative(alg, pa, beta)
    t2 = lie_derivative(alg, pb, alpha)
    pab = BasePoly(alg.base_dim)
    for a in range(alg.rank):
        for b in range(alg.rank):
            pab = pab + alpha[a] * beta[b] * pi.entry(a, b)
    t3 = cartan_d(alg, pab)
    return [u - v - w for u, v, w in zip(t1, t2, t3)]


def dual_structure_tables(alg: LieAlgebroidData, pi: TensorData):
    """([.,.]_pi, rho o pi#) on the dual basis: (rho*, gamma) tables."""
    rank, base_dim = alg.rank, alg.base_dim
    dual_basis = [basis_vector(rank, base_dim, a) for a in range(rank)]
    gamma: dict[tuple[int, int, int], BasePoly] = {}
    for a, b in combinations(range(rank), 2):
        br = pi_bracket(alg, pi, dual_basis[a], dual_basis[b])
        for c in range(rank):
            if not br[c].is_zero():
                gamma[(a, b, c)] = br[c]
    rho: dict[tuple[int, int], BasePoly] = {}
    for a in range(rank):
        pa = sharp(pi, dual_basis[a])
        for i in range(base_dim):
            acc = BasePoly(base_dim)
            for b in range(rank):
                acc = acc + pa[b] * alg.anchor(b, i)
            if not acc.is_zero():
                rho[(a, i)] = acc
    return rho, gamma


def pi_bracket_deformed_mu(alg_n: LieAlgebroidData, pi: TensorData,
                           alpha: Covector, beta: Covector) -> Covector:
    """[alpha, beta]_pi computed over a deformed algebroid structure table."""
    return pi_bracket(alg_n, pi, alpha, beta)


def c_pi_n_table(alg: LieAlgebroidData, pi: TensorData, n: TensorData):
    """C_{pi,N}(e^a, e^b) = ([.,.]_N)_pi - ([.,.]_pi)_{tN} on dual basis pairs."""
    rank, base_dim = alg.rank, alg.base_dim
    alg_n = deformed_algebroid(alg, n)
    dual_basis = [basis_vector(rank, base_dim, a) for a in range(rank)]
    table: dict[tuple[int, int], Covector] = {}
    for a, b in combinations(range(rank), 2):
        alpha, beta = dual_basis[a], dual_basis[b]
        first = pi_bracket(alg_n, pi, alpha, beta)
        tna = endo_transpose_apply(n, alpha)
        tnb = endo_transpose_apply(n, beta)
        second = pi_bracket(alg, pi, tna, beta)
        term = pi_bracket(alg, pi, alpha, tnb)
        second = [u + v for u, v in zip(second, term)]
        inner = pi_bracket(alg, pi, alpha, beta)
        second = [u - v for u, v in zip(second, endo_transpose_apply(n, inner))]
        val = [u - v for u, v in zip(first, second)]
        if any(not v.is_zero() for v in val):
            table[(a, b)] = val
    return table


def mathcal_h(h: TensorData, n: TensorData) -> TensorData:
    """curvature-type 3-form: cyclic sum of H(NX, NY, Z) over X, Y, Z."""
    rank, base_dim = h.rank, h.base_dim
    basis = [basis_vector(rank, base_dim, a) for a in range(rank)]
    nb = [endo_apply(n, basis[a]) for a in range(rank)]
    out = TensorData(THREE_FORM, rank, base_dim)
    for a, b, c in combinations(range(rank), 3):
        val = form_value(h, [nb[a], nb[b], basis[c]]) \
            + form_value(h, [nb[b], nb[c], basis[a]]) \
            + form_value(h, [nb[c], nb[a], basis[b]])
        out.set_entry((a, b, c), val)
    return out


# ---------------------------------------------------------------------------
# quadruple conditions in tensor form
# ---------------------------------------------------------------------------


def pqn_tensor_residuals(alg: LieAlgebroidData, pi: TensorData, n: TensorData,
                         psi: TensorData, h: TensorData) -> dict:
    """The four coupled quadruple conditions evaluated on basis tuples.

    Condition shapes (our conventions; the torsion line carries the sign
    that makes it equivalent to the graded-bracket form, see
    CONVENTIONS.md):

        1. [pi, pi] = 0
        2. C_{pi,N}(a, b) - 2 i_{pi#a ^ pi#b} H = 0
        3. T_N(X, Y) + pi#( i_{NX^Y} H - i_{NY^X} H + i_{X^Y} psi ) = 0
        4. d_N psi - d HN = 0 with HN the cyclic H(N., N., .) 3-form
    """
    rank, base_dim = alg.rank, alg.base_dim
    basis = [basis_vector(rank, base_dim, a) for a in range(rank)]
    out: dict[str, object] = {}

    mv_pi = mv_from_tensor(pi)
    sch = schouten(alg, mv_pi, mv_pi)
    out["poisson"] = mv_to_tensor(sch, THREE_VECTOR, rank, base_dim)

    c_table = c_pi_n_table(alg, pi, n)
    res2 = CovectorTableResidual(
        rank, base_dim,
        {(a, b): [c_table.get((a, b), [BasePoly(base_dim)] * rank)[c]
                  - interior_pair(sharp(pi, basis[a]), sharp(pi, basis[b]), h)[c].scale(2)
                  for c in range(rank)]
         for a, b in combinations(range(rank), 2)})
    out["pi-n-coupling"] = res2

    torsion = nijenhuis_torsion_table(alg, n)
    res3: dict[tuple[int, int, int], BasePoly] = {}
    for a, b in combinations(range(rank), 2):
        na = endo_apply(n, basis[a])
        nb = endo_apply(n, basis[b])
        cov = interior_pair(na, basis[b], h)
        term = interior_pair(nb, basis[a], h)
        cov = [u - v for u, v in zip(cov, term)]
        term = interior_pair(basis[a], basis[b], psi)
        cov = [u + v for u, v in zip(cov, term)]
        correction = sharp(pi, cov)
        for c in range(rank):
            v = torsion.structure(c, a, b) + correction[c]
            if not v.is_zero():
                res3[(c, a, b)] = v
    out["torsion"] = LieAlgebroidData(rank, base_dim, {}, res3)

    alg_n = deformed_algebroid(alg, n)
    d_n_psi = cartan_d_threeform(alg_n, psi)
    hn = mathcal_h(h, n)
    d_hn = cartan_d_threeform(alg, hn)
    out["coupled-closure"] = d_n_psi - d_hn
    return out


def cartan_d_threeform(alg: LieAlgebroidData, form: TensorData):
    """d of a 3-form, returned as a rank-4 alternating table dict."""
    rank, base_dim = alg.rank, alg.base_dim
    basis = [basis_vector(rank, base_dim, a) for a in range(rank)]
    out: dict[tuple[int, int, int, int], BasePoly] = {}
    for quad in combinations(range(rank), 4):
        val = BasePoly(base_dim)
        for i in range(4):
            rest = [basis[quad[j]] for j in range(4) if j != i]
            term = anchor_apply(alg, basis[quad[i]], form_value(form, rest))
            val = val + (term if i % 2 == 0 else -term)
        for i, j in combinations(range(4), 2):
            others = [basis[quad[k]] for k in range(4) if k not in (i, j)]
            br = bracket_sections(alg, basis[quad[i]], basis[quad[j]])
            term = form_value(form, [br] + others)
            val = val + (term if (i + j) % 2 else -term)
        if not val.is_zero():
            out[quad] = val
    return FourFormResidual(rank, base_dim, out)


class FourFormResidual:
    """Alternating degree-4 coefficient table used as a residual."""

    def __init__(self, rank: int, base_dim: int, entries: dict):
        self.rank = rank
        self.base_dim = base_dim
        self._table = {k: v for k, v in entries.items() if not v.is_zero()}

    def is_zero(self) -> bool:
        return not self._table

    def __sub__(self, other: "FourFormResidual") -> "FourFormResidual":
        keys = set(self._table) | set(other._table)
        zero = BasePoly(self.base_dim)
        return FourFormResidual(self.rank, self.base_dim,
                                {k: self._table.get(k, zero) - other._table.get(k, zero) for k in keys})

    def __str__(self) -> str:
        if self.is_zero():
            return "0"
        return "; ".join(f"[{','.join(str(i+1) for i in k)}] = {v}"
                         for k, v in sorted(self._table.items()))

    __repr__ = __str__


class CovectorTableResidual:
    """Residual holding one covector per index pair."""

    def __init__(self, rank: int, base_dim: int, table: dict):
        self.rank = rank
        self.base_dim = base_dim
        self._table = {}
        for key, cov in table.items():
            if any(not v.is_zero() for v in cov):
                self._table[key] = cov

    def is_zero(self) -> bool:
        return not self._table

    def __str__(self) -> str:
        if self.is_zero():
            return "0"
        bits = []
        for key, cov in sorted(self._table.items()):
            comps = ", ".join(f"e^{c+1}: {v}" for c, v in enumerate(cov) if not v.is_zero())
            bits.append(f"[{key[0]+1},{key[1]+1}] -> {comps}")
        return "; ".join(bits)

    __repr__ = __str__


def _covector_table_residual(rank: int, base_dim: int, table: dict) -> CovectorTableResidual:
    return CovectorTableResidual(rank, base_dim, table)


# ---------------------------------------------------------------------------
# Dorfman bracket with background and the double torsion
# ---------------------------------------------------------------------------


def dorfman(alg: LieAlgebroidData, h: TensorData, x: GeneralizedSection,
            y: GeneralizedSection) -> GeneralizedSection:
    """[X+a, Y+b] = [X,Y] + L_X b - i_Y da - i_{X^Y} H.

    The sign of the background term is the one for which this bracket is
    the derived bracket of the hamiltonian mu + H-encoding; see
    CONVENTIONS.md.
    """
    vec = bracket_sections(alg, x.vec, y.vec)
    cov = lie_derivative(alg, x.vec, y.cov)
    da = cartan_d(alg, x.cov)
    term = interior_vector(y.vec, da)
    cov = [u - v for u, v in zip(cov, term)]
    term = interior_pair(x.vec, y.vec, h)
    cov = [u - v for u, v in zip(cov, term)]
    return GeneralizedSection(vec, cov)


def j_apply(triple: CpsTriple, x: GeneralizedSection) -> GeneralizedSection:
    """The block matrix (N, pi#; sigma-flat, -tN) applied to X + alpha."""
    vec = endo_apply(triple.n, x.vec)
    vec = [u + v for u, v in zip(vec, sharp(triple.pi, x.cov))]
    cov = flat(triple.sigma, x.vec)
    cov = [u - v for u, v in zip(cov, endo_transpose_apply(triple.n, x.cov))]
    return GeneralizedSection(vec, cov)


def deformed_dorfman(alg: LieAlgebroidData, h: TensorData, triple: CpsTriple,
                     x: GeneralizedSection, y: GeneralizedSection) -> GeneralizedSection:
    """[X,Y]_J = [JX, Y] + [X, JY] - J [X, Y]."""
    t1 = dorfman(alg, h, j_apply(triple, x), y)
    t2 = dorfman(alg, h, x, j_apply(triple, y))
    t3 = j_apply(triple, dorfman(alg, h, x, y))
    return t1 + t2 - t3


def torsion_j(alg: LieAlgebroidData, h: TensorData, triple: CpsTriple,
              x: GeneralizedSection, y: GeneralizedSection) -> GeneralizedSection:
    """T_J(X, Y) = [JX, JY] - J([X, Y]_J)."""
    t1 = dorfman(alg, h, j_apply(triple, x), j_apply(triple, y))
    t2 = j_apply(triple, deformed_dorfman(alg, h, triple, x, y))
    return t1 - t2


def generalized_basis(rank: int, base_dim: int) -> list[GeneralizedSection]:
    out = []
    for a in range(rank):
        g = GeneralizedSection.zero(rank, base_dim)
        g.vec[a] = BasePoly.const(base_dim, 1)
        out.append(g)
    for a in range(rank):
        g = GeneralizedSection.zero(rank, base_dim)
        g.cov[a] = BasePoly.const(base_dim, 1)
        out.append(g)
    return out
