"""Quatuor engine: level stepping, fertility, shifts, combinations,
coefficient extraction, pole and exceptional sets, kolbergisation.

A level is the function F_k(t,y) = t^y * R_k(t,y) with R_k in Q(y)(t);
only R_k is stored.  Neighboring levels satisfy, in R-coordinates,

    R_k = (y*R_{k+1} + t * d/dt R_{k+1}) / (1 - t)

which is the derivative relation d/dt F_{k+1} = ((1-t)/t) F_k.  Going
down is that formula; going up means solving the first-order equation
y*S + t*S' = (1-t)*R_k inside the rational class, which either has a
unique solution or none (the homogeneous solution t^{-y} is not
rational), and failure is what "infertile" means.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from fractions import Fraction

from .assoc import CoeffSeq, from_associated
from .parsing import parse_qyt, print_canonical
from .rational import (
    QQ, QY, QYT,
    DomainError, PoleError, RatFunc, UniPoly,
    rational_roots, substitute_y,
)

Y = QYT.coerce(QY.gen)
T = QYT.gen


class InfertileError(Exception):
    """The up-step leaves the ad hoc class (no rational solution)."""

    def __init__(self, witness: str, level: int | None = None):
        self.witness = witness
        self.level = level
        super().__init__(f"infertile step: {witness}")


class VerificationError(Exception):
    """Stored level data violates the neighbor relation."""


@dataclass(frozen=True)
class AdHocFunction:
    """F(t,y) = t^y * R(t,y) with R a nonzero element of Q(y)(t)."""

    R: RatFunc

    def __post_init__(self):
        R = QYT.coerce(self.R) if not QYT.is_element(self.R) else self.R
        if R.is_zero:
            raise ValueError("ad hoc function requires a nonzero R")
        object.__setattr__(self, "R", R)

    def __str__(self):
        return f"t^y * ({print_canonical(self.R)})"


def step_down(F: AdHocFunction) -> AdHocFunction:
    """Level k from level k+1 via the derivative relation."""
    R = F.R
    S = (Y * R + T * R.diff()) / (1 - T)
    assert not S.is_zero
    return AdHocFunction(S)


def _t_shift(p: UniPoly, j: int) -> UniPoly:
    return UniPoly(p.field, p.var, (p.field.zero,) * j + p.coeffs)


def _solve_linear(M, rhs):
    """Reduced row echelon solve over Q(y).

    Returns (solution, None) or (None, residual of an inconsistent row).
    Free columns get 0; the caller verifies the candidate anyway.
    """
    rows = len(M)
    cols = len(M[0]) if rows else 0
    M = [list(row) for row in M]
    rhs = list(rhs)
    pivot_row_of_col = [None] * cols
    r = 0
    for c in range(cols):
        p = next((i for i in range(r, rows) if not M[i][c].is_zero), None)
        if p is None:
            continue
        M[r], M[p] = M[p], M[r]
        rhs[r], rhs[p] = rhs[p], rhs[r]
        inv = QY.one / M[r][c]
        M[r] = [e * inv for e in M[r]]
        rhs[r] = rhs[r] * inv
        for i in range(rows):
            if i != r and not M[i][c].is_zero:
                f = M[i][c]
                M[i] = [a - f * b for a, b in zip(M[i], M[r])]
                rhs[i] = rhs[i] - f * rhs[r]
        pivot_row_of_col[c] = r
        r += 1
    for i in range(r, rows):
        if not rhs[i].is_zero:
            return None, rhs[i]
    sol = [QY.zero] * cols
    for c, pr in enumerate(pivot_row_of_col):
        if pr is not None:
            sol[c] = rhs[pr]
    return sol, None


def step_up(F: AdHocFunction) -> AdHocFunction:
    """Level k+1 from level k, or raise InfertileError.

    Ansatz S = A(t)/D(t) with D the denominator of W = (1-t)*R_k and
    deg A <= deg num(W) + deg D + 1; the equation y*S + t*S' = W turns
    into a linear system over Q(y) because

        y*(t^j) + t*(t^j)' = (y + j) t^j

    acting through the quotient rule.  The candidate is verified by
    stepping back down before it is returned.
    """
    R = F.R
    W = (1 - T) * R
    numW, D = W.num, W.den
    dA = numW.degree + D.degree + 1
    Dp = D.diff()
    n_rows = dA + D.degree + 1
    columns = []
    for j in range(dA + 1):
        base = D * (QY.gen + j) - _t_shift(Dp, 1)
        columns.append(_t_shift(base, j))
    rhs_poly = numW * D
    M = [[columns[j].coeff(i) for j in range(dA + 1)] for i in range(n_rows)]
    rhs = [rhs_poly.coeff(i) for i in range(n_rows)]
    sol, residual = _solve_linear(M, rhs)
    if sol is None:
        witness = ("the linear system for the up-step is inconsistent; "
                   f"unmatched right-hand side {print_canonical(residual)}")
        raise InfertileError(witness)
    S = RatFunc(UniPoly(QY, "t", sol), D)
    if (Y * S + T * S.diff()) != W:
        raise InfertileError("candidate solution fails the back-check")
    return AdHocFunction(S)


@dataclass(frozen=True)
class FertilityReport:
    requested: tuple[int, int]
    achieved: tuple[int, int]
    failure_level: int | None = None
    failure_witness: str | None = None

    @property
    def fertile(self) -> bool:
        return self.failure_level is None

    def __str__(self):
        lo, hi = self.achieved
        if self.fertile:
            return f"fertile on [{lo}, {hi}]"
        return (f"fertile on [{lo}, {hi}]; infertile at level "
                f"{self.failure_level}: {self.failure_witness}")


class Quatuor:
    """Contiguous levels k_min..k_max, validated on construction."""

    __slots__ = ("k_min", "functions", "generator_level")

    def __init__(self, k_min: int, functions, generator_level: int):
        functions = tuple(functions)
        if not functions:
            raise ValueError("a quatuor needs at least one level")
        k_max = k_min + len(functions) - 1
        if not k_min <= generator_level <= k_max:
            raise ValueError("generator level outside the stored range")
        for i in range(len(functions) - 1):
            upper = functions[i + 1].R
            expect = (Y * upper + T * upper.diff()) / (1 - T)
            if functions[i].R != expect:
                raise VerificationError(
                    f"levels {k_min + i} and {k_min + i + 1} do not satisfy "
                    "the neighbor relation")
        object.__setattr__(self, "k_min", k_min)
        object.__setattr__(self, "functions", functions)
        object.__setattr__(self, "generator_level", generator_level)

    def __setattr__(self, name, value):
        raise AttributeError("Quatuor is immutable")

    @property
    def k_max(self) -> int:
        return self.k_min + len(self.functions) - 1

    @property
    def levels(self) -> dict[int, AdHocFunction]:
        return {self.k_min + i: f for i, f in enumerate(self.functions)}

    def level(self, k: int) -> AdHocFunction:
        if not self.k_min <= k <= self.k_max:
            raise KeyError(f"level {k} outside [{self.k_min}, {self.k_max}]")
        return self.functions[k - self.k_min]

    def __eq__(self, other):
        if not isinstance(other, Quatuor):
            return NotImplemented
        return (self.k_min == other.k_min
                and self.generator_level == other.generator_level
                and self.functions == other.functions)

    def __hash__(self):
        return hash((self.k_min, self.generator_level, self.functions))


def generate_range(generator, gen_level: int, k_min: int, k_max: int
                   ) -> tuple[Quatuor, FertilityReport]:
    """Fill levels around a generator; down always works, up may not."""
    if isinstance(generator, str):
        generator = parse_qyt(generator)
    F_gen = generator if isinstance(generator, AdHocFunction) \
        else AdHocFunction(generator)
    if not k_min <= gen_level <= k_max:
        raise ValueError("need k_min <= generator level <= k_max")
    below: list[AdHocFunction] = []
    cur = F_gen
    for _ in range(gen_level - k_min):
        cur = step_down(cur)
        below.append(cur)
    functions = below[::-1] + [F_gen]
    failure_level = None
    witness = None
    cur = F_gen
    for k in range(gen_level + 1, k_max + 1):
        try:
            cur = step_up(cur)
        except InfertileError as exc:
            failure_level = k
            witness = exc.witness
            break
        functions.append(cur)
    q = Quatuor(k_min, functions, gen_level)
    report = FertilityReport(
        requested=(k_min, k_max),
        achieved=(k_min, q.k_max),
        failure_level=failure_level,
        failure_witness=witness,
    )
    return q, report


def shift(q: Quatuor, d: int) -> Quatuor:
    """Level k of the result is level k + d of the input."""
    return Quatuor(q.k_min - d, q.functions, q.generator_level - d)


def linear_combine(terms) -> Quatuor:
    """Levelwise rational combination on the common range."""
    terms = [(QQ.coerce(lam), q) for lam, q in terms]
    if not terms:
        raise DomainError("no terms to combine")
    lo = max(q.k_min for _, q in terms)
    hi = min(q.k_max for _, q in terms)
    if lo > hi:
        raise DomainError("empty common level range")
    combined = []
    for k in range(lo, hi + 1):
        acc = QYT.zero
        for lam, q in terms:
            if lam != 0:
                acc = acc + lam * q.level(k).R
        combined.append(acc)
    if all(R.is_zero for R in combined):
        raise DomainError("combination is identically zero")
    gen = min(max(terms[0][1].generator_level, lo), hi)
    return Quatuor(lo, [AdHocFunction(R) for R in combined], gen)


def taylor_series(R: RatFunc, N: int, mu) -> list:
    """Coefficients c_0..c_N of R(t) * e^{mu*t} around t = 0.

    Generic over the coefficient ring of R (Q or Q(y)); mu must live in
    that ring.  The denominator is inverted as a power series, which
    needs D(0) != 0.
    """
    ring = R.num.field
    num, den = R.num, R.den
    d0 = den.coeff(0)
    if d0 == ring.zero:
        raise PoleError(f"pole at {R.var} = 0: denominator {den}")
    inv_d0 = ring.one / d0
    inv = [inv_d0]
    for k in range(1, N + 1):
        acc = ring.zero
        for i in range(1, min(k, den.degree) + 1):
            acc = acc + den.coeff(i) * inv[k - i]
        inv.append(-acc * inv_d0)
    r_ser = []
    for k in range(N + 1):
        acc = ring.zero
        for i in range(0, min(k, num.degree) + 1):
            acc = acc + num.coeff(i) * inv[k - i]
        r_ser.append(acc)
    mu = ring.coerce(mu)
    exp_ser = [ring.one]
    for j in range(1, N + 1):
        exp_ser.append(exp_ser[-1] * mu * Fraction(1, j))
    out = []
    for n in range(N + 1):
        acc = ring.zero
        for j in range(n + 1):
            acc = acc + r_ser[n - j] * exp_ser[j]
        out.append(acc)
    return out


def g_coeffs(F: AdHocFunction, N: int) -> CoeffSeq:
    """v_n = n! [t^n] (R * e^{y t}), the G-side coefficients."""
    series = taylor_series(F.R, N, QY.gen)
    values = [series[n] * math.factorial(n) for n in range(N + 1)]
    return CoeffSeq("v", QY, tuple(values))


def h_coeffs(F: AdHocFunction, N: int) -> CoeffSeq:
    """u_n for H(x,y) = sum u_n x^n/n!, via the inverse transform."""
    return from_associated(g_coeffs(F, N))


def kolberg_h_closed(k: int, n: int) -> RatFunc:
    """(y+n)^(n-k), the closed H-coefficient of the classical family."""
    if n < 0:
        raise ValueError("n must be nonnegative")
    return (QY.gen + n) ** (n - k)


def sharp_un_closed(n: int) -> RatFunc:
    """(y+2)(y^2 + 2ny + 2n^2 - n)(y+n)^(n-3), exact in Q(y)."""
    if n < 0:
        raise ValueError("n must be nonnegative")
    y = QY.gen
    return (y + 2) * (y * y + 2 * n * y + (2 * n * n - n)) * (y + n) ** (n - 3)


@dataclass(frozen=True)
class PoleSet:
    rational_poles: frozenset
    denominators: tuple

    def sorted_poles(self) -> list[Fraction]:
        return sorted(self.rational_poles)


def pole_set(q: Quatuor, levels) -> PoleSet:
    """Rational poles (and raw y-denominators) of coefficients at levels."""
    dens = []
    seen = set()
    for k in levels:
        R = q.level(k).R
        for side in (R.num, R.den):
            for c in side.coeffs:
                d = c.den
                if d.degree > 0 and d not in seen:
                    seen.add(d)
                    dens.append(d)
    poles = set()
    for d in dens:
        poles |= rational_roots(d)
    dens.sort(key=lambda d: (d.degree, print_canonical(d)))
    return PoleSet(frozenset(poles), tuple(dens))


def exceptional_set(g: RatFunc) -> set[int]:
    """Integers n with s^n * g(s) constant: {-m} when g = c*s^m, else empty."""
    if g.is_zero:
        raise ValueError("exceptional set of the zero function is undefined")
    num_terms = sum(1 for c in g.num.coeffs if c != g.num.field.zero)
    den_terms = sum(1 for c in g.den.coeffs if c != g.den.field.zero)
    if num_terms == 1 and den_terms == 1:
        lead_num = next(i for i, c in enumerate(g.num.coeffs) if c != 0)
        lead_den = next(i for i, c in enumerate(g.den.coeffs) if c != 0)
        return {-(lead_num - lead_den)}
    return set()


@dataclass(frozen=True)
class KolbergizeResult:
    g: RatFunc            # rational function of t over Q
    exponent: Fraction    # the power of t in t^r * g(t)
    exceptional: frozenset


def kolbergize(q: Quatuor, A: dict[int, Fraction], r) -> KolbergizeResult:
    """Specialize y := r in the combination sum_k A_k F_k = t^r * g(t).

    r must avoid the rational poles of the involved levels; the
    exceptional set of g is reported so the caller can check that the
    transcendence bookkeeping applies.
    """
    r = QQ.coerce(r)
    support = sorted(k for k, lam in A.items() if QQ.coerce(lam) != 0)
    if not support:
        raise DomainError("combination is identically zero")
    ps = pole_set(q, support)
    if r in ps.rational_poles:
        bad = next(d for d in ps.denominators if d.eval(r) == 0)
        raise PoleError(f"y = {r} is a pole: root of denominator {bad}")
    from .rational import QT
    acc = QT.zero
    for k in support:
        acc = acc + QQ.coerce(A[k]) * substitute_y(q.level(k).R, r)
    if acc.is_zero:
        raise DomainError("combination specializes to zero")
    return KolbergizeResult(acc, r, frozenset(exceptional_set(acc)))


def quatuor_to_json(q: Quatuor) -> str:
    obj = {
        "generator": print_canonical(q.level(q.generator_level).R),
        "generator_level": q.generator_level,
        "levels": {str(k): print_canonical(f.R) for k, f in q.levels.items()},
    }
    return json.dumps(obj, indent=2)


def quatuor_from_json(text: str) -> Quatuor:
    """Load and re-verify; neighbor-relation failure is a hard error."""
    obj = json.loads(text)
    gen_level = int(obj["generator_level"])
    items = sorted((int(k), v) for k, v in obj["levels"].items())
    ks = [k for k, _ in items]
    if ks != list(range(ks[0], ks[0] + len(ks))):
        raise VerificationError("levels must form a contiguous range")
    if not ks[0] <= gen_level <= ks[-1]:
        raise VerificationError("generator level outside the stored range")
    functions = [AdHocFunction(parse_qyt(expr)) for _, expr in items]
    gen_expr = parse_qyt(obj["generator"])
    if functions[gen_level - ks[0]].R != gen_expr:
        raise VerificationError("generator does not match its stored level")
    return Quatuor(ks[0], functions, gen_level)


def diese_generator() -> AdHocFunction:
    return AdHocFunction(parse_qyt("1 + 2/y + t^2"))


def diese_quatuor(k_min: int = -2, k_max: int = 3) -> Quatuor:
    q, report = generate_range(diese_generator(), 0, k_min, k_max)
    if not report.fertile:
        raise InfertileError(report.failure_witness or "",
                             report.failure_level)
    return q


def kolberg_quatuor(k_min: int = -2, k_max: int = 2) -> Quatuor:
    """Levels with H-coefficients (y+n)^(n-k); generator R_1 = 1/y.

    The factor 1/y normalizes level 1 so that u_n = (y+n)^(n-1)
    including u_0 = 1/y; the generator R = 1 would instead give
    u_n = y*(y+n)^(n-1).
    """
    gen = AdHocFunction(parse_qyt("1/y"))
    q, report = generate_range(gen, 1, k_min, k_max)
    if not report.fertile:
        raise InfertileError(report.failure_witness or "",
                             report.failure_level)
    return q
