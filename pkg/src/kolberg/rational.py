"""Exact arithmetic in the tower Q -> Q(y) -> Q(y)(t).

Values are immutable and kept in canonical form: numerator and
denominator are gcd-reduced and the denominator is monic, so equality
is structural.  The same two classes (UniPoly, RatFunc) serve every
layer; a field descriptor object names the coefficient field of each
polynomial layer.
"""

from __future__ import annotations

import math
from fractions import Fraction


class DomainError(ValueError):
    """Input outside the mathematical domain of an operation."""


class PoleError(DomainError):
    """A specialization point hits a pole; the message names the denominator."""


class RationalField:
    """The base field Q; elements are fractions.Fraction."""

    name = "Q"
    var = None
    zero = Fraction(0)
    one = Fraction(1)

    def coerce(self, value):
        if isinstance(value, Fraction):
            return value
        if isinstance(value, int):
            return Fraction(value)
        raise TypeError(f"cannot coerce {value!r} into Q")

    def is_element(self, value):
        return isinstance(value, Fraction)

    def __repr__(self):
        return "Q"


QQ = RationalField()


class UniPoly:
    """Dense univariate polynomial over a field, lowest degree first."""

    __slots__ = ("field", "var", "coeffs")

    def __init__(self, field, var, coeffs):
        cs = []
        for c in coeffs:
            cs.append(c if field.is_element(c) else field.coerce(c))
        while cs and cs[-1] == field.zero:
            cs.pop()
        object.__setattr__(self, "field", field)
        object.__setattr__(self, "var", var)
        object.__setattr__(self, "coeffs", tuple(cs))

    def __setattr__(self, name, value):
        raise AttributeError("UniPoly is immutable")

    @property
    def is_zero(self):
        return not self.coeffs

    @property
    def degree(self):
        return len(self.coeffs) - 1

    def coeff(self, i):
        if 0 <= i < len(self.coeffs):
            return self.coeffs[i]
        return self.field.zero

    @property
    def leading(self):
        if self.is_zero:
            raise ValueError("zero polynomial has no leading coefficient")
        return self.coeffs[-1]

    def _same(self, coeffs):
        return UniPoly(self.field, self.var, coeffs)

    def _coerce_operand(self, other):
        if isinstance(other, UniPoly):
            if other.var == self.var and other.field is self.field:
                return other
            return None
        try:
            return self._same([self.field.coerce(other)])
        except TypeError:
            return None

    def __add__(self, other):
        o = self._coerce_operand(other)
        if o is None:
            return NotImplemented
        n = max(len(self.coeffs), len(o.coeffs))
        return self._same([self.coeff(i) + o.coeff(i) for i in range(n)])

    __radd__ = __add__

    def __neg__(self):
        return self._same([-c for c in self.coeffs])

    def __sub__(self, other):
        o = self._coerce_operand(other)
        if o is None:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other):
        return -(self - other)

    def __mul__(self, other):
        o = self._coerce_operand(other)
        if o is None:
            return NotImplemented
        if self.is_zero or o.is_zero:
            return self._same([])
        out = [self.field.zero] * (len(self.coeffs) + len(o.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            if a == self.field.zero:
                continue
            for j, b in enumerate(o.coeffs):
                out[i + j] = out[i + j] + a * b
        return self._same(out)

    __rmul__ = __mul__

    def __pow__(self, k):
        if not isinstance(k, int) or k < 0:
            raise ValueError("UniPoly power needs a nonnegative integer")
        result = self._same([self.field.one])
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def __divmod__(self, other):
        o = self._coerce_operand(other)
        if o is None:
            return NotImplemented
        if o.is_zero:
            raise ZeroDivisionError("polynomial division by zero")
        quot = [self.field.zero] * max(len(self.coeffs) - len(o.coeffs) + 1, 0)
        rem = list(self.coeffs)
        dlead = o.leading
        while len(rem) >= len(o.coeffs) and rem:
            factor = rem[-1] / dlead
            shift = len(rem) - len(o.coeffs)
            quot[shift] = factor
            for j, b in enumerate(o.coeffs):
                rem[shift + j] = rem[shift + j] - factor * b
            while rem and rem[-1] == self.field.zero:
                rem.pop()
        return self._same(quot), self._same(rem)

    def exact_div(self, other):
        q, r = divmod(self, other)
        if not r.is_zero:
            raise ValueError("exact_div with nonzero remainder")
        return q

    def monic(self):
        if self.is_zero:
            return self
        lead = self.leading
        return self._same([c / lead for c in self.coeffs])

    def diff(self):
        return self._same(
            [i * c for i, c in enumerate(self.coeffs)][1:]
        )

    def eval(self, point):
        p = point if self.field.is_element(point) else self.field.coerce(point)
        acc = self.field.zero
        for c in reversed(self.coeffs):
            acc = acc * p + c
        return acc

    def map_coeffs(self, fn, field, var=None):
        return UniPoly(field, var or self.var, [fn(c) for c in self.coeffs])

    def __eq__(self, other):
        o = self._coerce_operand(other)
        if o is None:
            return NotImplemented
        return self.var == o.var and self.coeffs == o.coeffs

    def __hash__(self):
        return hash((self.var, self.coeffs))

    def __bool__(self):
        return not self.is_zero

    def __str__(self):
        return format_element(self)

    def __repr__(self):
        return f"UniPoly({self.field.name}[{self.var}]: {format_element(self)})"


def _gcd_scale(p: UniPoly) -> UniPoly:
    """Rescale by a unit so remainder-sequence coefficients stay small.

    Over Q the polynomial is scaled to integer coefficients with
    content 1; over a rational-function coefficient field it is made
    monic, which re-reduces every coefficient one layer down.  Without
    this the Euclidean remainders grow exponentially large even though
    the gcd itself is tiny.  Unit factors never change the monic gcd.
    """
    if p.is_zero:
        return p
    if isinstance(p.field, RationalField):
        scale = Fraction(
            math.lcm(*(c.denominator for c in p.coeffs)),
            math.gcd(*(c.numerator for c in p.coeffs)),
        )
        return p._same([c * scale for c in p.coeffs])
    return p.monic()


def _primitive_list(cs):
    """Divide a coefficient list over Q[x] by its content (poly and Q)."""
    cs = list(cs)
    while cs and cs[-1].is_zero:
        cs.pop()
    if not cs:
        return []
    g = None
    for c in cs:
        if c.is_zero:
            continue
        g = c if g is None else poly_gcd(g, c)
        if g.degree == 0:
            break
    if g.degree > 0:
        cs = [c if c.is_zero else c.exact_div(g) for c in cs]
    scale = Fraction(
        math.lcm(*(q.denominator for c in cs for q in c.coeffs)),
        math.gcd(*(q.numerator for c in cs for q in c.coeffs)),
    )
    if scale != 1:
        cs = [c * scale for c in cs]
    return cs


def _pseudo_rem(u, v):
    """Pseudo-remainder of coefficient lists over Q[x] (no divisions)."""
    lv = v[-1]
    r = list(u)
    while len(r) >= len(v):
        rl = r[-1]
        shift = len(r) - len(v)
        r = [lv * c for c in r[:-1]]
        for j in range(len(v) - 1):
            r[shift + j] = r[shift + j] - rl * v[j]
        while r and r[-1].is_zero:
            r.pop()
    return r


def _fracfield_gcd(a: UniPoly, b: UniPoly) -> UniPoly:
    """Monic gcd over Q(x)[t] via a primitive remainder sequence.

    Denominators are cleared so every step is polynomial arithmetic in
    Q[x][t]; stripping the content after each pseudo-division keeps
    coefficients small where a fraction-field Euclidean loop would let
    them grow without bound.
    """
    field = a.field

    def clear(p):
        den_l = p.coeffs[0].den
        for c in p.coeffs[1:]:
            den_l = poly_lcm(den_l, c.den)
        return _primitive_list(
            [c.num * den_l.exact_div(c.den) for c in p.coeffs])

    u, v = clear(a), clear(b)
    if len(u) < len(v):
        u, v = v, u
    while v:
        u, v = v, _primitive_list(_pseudo_rem(u, v))
    one = _one_poly(field.coeff_field, field.var)
    lifted = UniPoly(field, a.var, [RatFunc(c, one) for c in u])
    return lifted.monic()


def poly_gcd(a: UniPoly, b: UniPoly) -> UniPoly:
    """Monic gcd by the Euclidean algorithm; gcd(0, 0) = 0."""
    if (not a.is_zero and not b.is_zero
            and isinstance(a.field, FractionField)
            and isinstance(a.field.coeff_field, RationalField)):
        return _fracfield_gcd(a, b)
    a = _gcd_scale(a)
    b = _gcd_scale(b)
    while not b.is_zero:
        a, b = b, _gcd_scale(divmod(a, b)[1])
    return a.monic()


def poly_lcm(a: UniPoly, b: UniPoly) -> UniPoly:
    if a.is_zero or b.is_zero:
        return UniPoly(a.field, a.var, [])
    return (a * b).exact_div(poly_gcd(a, b)).monic()


class RatFunc:
    """Quotient of two UniPoly over the same field, in canonical form."""

    __slots__ = ("num", "den")

    def __init__(self, num: UniPoly, den: UniPoly):
        if den.is_zero:
            raise ZeroDivisionError("zero denominator")
        if num.is_zero:
            den = UniPoly(num.field, num.var, [num.field.one])
        else:
            if num.degree > 0 and den.degree > 0:
                g = poly_gcd(num, den)
                if g.degree > 0:
                    num = num.exact_div(g)
                    den = den.exact_div(g)
            lead = den.leading
            if lead != den.field.one:
                num = num._same([c / lead for c in num.coeffs])
                den = den.monic()
        object.__setattr__(self, "num", num)
        object.__setattr__(self, "den", den)

    def __setattr__(self, name, value):
        raise AttributeError("RatFunc is immutable")

    @property
    def var(self):
        return self.num.var

    @property
    def is_zero(self):
        return self.num.is_zero

    @property
    def is_constant(self):
        return self.num.degree <= 0 and self.den.degree == 0

    def constant_value(self):
        if not self.is_constant:
            raise ValueError("not a constant")
        if self.num.is_zero:
            return self.num.field.zero
        return self.num.coeffs[0] / self.den.coeffs[0]

    def _coerce_operand(self, other):
        if isinstance(other, RatFunc):
            if other.var == self.var and other.num.field is self.num.field:
                return other
            return None
        if isinstance(other, UniPoly):
            if other.var == self.var and other.field is self.num.field:
                return RatFunc(other, _one_poly(other.field, other.var))
            other = _try_coerce_scalar(self.num.field, other)
        else:
            other = _try_coerce_scalar(self.num.field, other)
        if other is None:
            return None
        f, v = self.num.field, self.var
        return RatFunc(UniPoly(f, v, [other]), _one_poly(f, v))

    def __add__(self, other):
        o = self._coerce_operand(other)
        if o is None:
            return NotImplemented
        return RatFunc(self.num * o.den + o.num * self.den, self.den * o.den)

    __radd__ = __add__

    def __neg__(self):
        return RatFunc(-self.num, self.den)

    def __sub__(self, other):
        o = self._coerce_operand(other)
        if o is None:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other):
        return -(self - other)

    def __mul__(self, other):
        o = self._coerce_operand(other)
        if o is None:
            return NotImplemented
        return RatFunc(self.num * o.num, self.den * o.den)

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = self._coerce_operand(other)
        if o is None:
            return NotImplemented
        if o.is_zero:
            raise ZeroDivisionError("division by zero rational function")
        return RatFunc(self.num * o.den, self.den * o.num)

    def __rtruediv__(self, other):
        o = self._coerce_operand(other)
        if o is None:
            return NotImplemented
        return o / self

    def __pow__(self, k):
        if not isinstance(k, int):
            raise ValueError("RatFunc power needs an integer exponent")
        if k < 0:
            if self.is_zero:
                raise ZeroDivisionError("zero to a negative power")
            return RatFunc(self.den, self.num) ** (-k)
        result = RatFunc(_one_poly(self.num.field, self.var),
                         _one_poly(self.num.field, self.var))
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def diff(self):
        """Formal derivative in this layer's variable (quotient rule)."""
        n, d = self.num, self.den
        return RatFunc(n.diff() * d - n * d.diff(), d * d)

    def eval(self, point):
        db = self.den.eval(point)
        if db == self.den.field.zero:
            raise PoleError(
                f"{self.var} = {point} is a root of denominator {self.den}")
        return self.num.eval(point) / db

    def __eq__(self, other):
        o = self._coerce_operand(other)
        if o is None:
            return NotImplemented
        return self.num == o.num and self.den == o.den

    def __hash__(self):
        return hash((self.num, self.den))

    def __bool__(self):
        return not self.is_zero

    def __str__(self):
        return format_element(self)

    def __repr__(self):
        return f"RatFunc({self.num.field.name}({self.var}): {format_element(self)})"


def _one_poly(field, var):
    return UniPoly(field, var, [field.one])


def _try_coerce_scalar(field, value):
    try:
        return field.coerce(value)
    except TypeError:
        return None


class FractionField:
    """Descriptor for a rational-function field over a coefficient field."""

    def __init__(self, coeff_field, var):
        self.coeff_field = coeff_field
        self.var = var
        self.name = f"{coeff_field.name}({var})"
        self.zero = RatFunc(UniPoly(coeff_field, var, []),
                            _one_poly(coeff_field, var))
        self.one = RatFunc(_one_poly(coeff_field, var),
                           _one_poly(coeff_field, var))

    def poly(self, coeffs):
        return UniPoly(self.coeff_field, self.var, coeffs)

    @property
    def gen(self):
        return RatFunc(self.poly([0, 1]), self.poly([1]))

    def coerce(self, value):
        if self.is_element(value):
            return value
        if isinstance(value, UniPoly) and value.var == self.var \
                and value.field is self.coeff_field:
            return RatFunc(value, self.poly([1]))
        c = _try_coerce_scalar(self.coeff_field, value)
        if c is not None:
            return RatFunc(self.poly([c]), self.poly([1]))
        raise TypeError(f"cannot coerce {value!r} into {self.name}")

    def is_element(self, value):
        return (isinstance(value, RatFunc) and value.var == self.var
                and value.num.field is self.coeff_field)

    def __repr__(self):
        return self.name


QY = FractionField(QQ, "y")     # Q(y)
QYT = FractionField(QY, "t")    # Q(y)(t)
QT = FractionField(QQ, "t")     # Q(t)
QS = FractionField(QQ, "s")     # Q(s)
QN = FractionField(QQ, "n")     # Q(n)


def substitute_y(R: RatFunc, r: Fraction) -> RatFunc:
    """Specialize y := r in an element of Q(y)(t), landing in Q(t).

    The denominator stays nonzero because it is monic in t over Q(y).
    Raises PoleError naming the offending denominator when r is a pole
    of any coefficient.
    """
    r = QQ.coerce(r)

    def at_r(c: RatFunc) -> Fraction:
        db = c.den.eval(r)
        if db == 0:
            raise PoleError(f"y = {r} is a root of denominator {c.den}")
        return c.num.eval(r) / db

    num = UniPoly(QQ, "t", [at_r(c) for c in R.num.coeffs])
    den = UniPoly(QQ, "t", [at_r(c) for c in R.den.coeffs])
    return RatFunc(num, den)


def lift_y_to_t(c: RatFunc) -> RatFunc:
    """Embed an element of Q(y) as a constant of Q(y)(t)."""
    return QYT.coerce(c)


def _divisors(n: int) -> list[int]:
    n = abs(n)
    small, large = [], []
    i = 1
    while i * i <= n:
        if n % i == 0:
            small.append(i)
            if i != n // i:
                large.append(n // i)
        i += 1
    return small + large[::-1]


def rational_roots(p: UniPoly) -> set[Fraction]:
    """Exactly the rational roots of a nonzero polynomial over Q.

    Candidates come from divisor enumeration over the integer-cleared
    coefficients; each candidate is confirmed by exact evaluation.
    """
    if p.is_zero:
        raise ValueError("zero polynomial has every point as a root")
    if not isinstance(p.field, RationalField):
        raise TypeError("rational_roots needs a polynomial over Q")
    if p.degree == 0:
        return set()
    lcm_den = 1
    for c in p.coeffs:
        lcm_den = lcm_den * c.denominator // math.gcd(lcm_den, c.denominator)
    ints = [int(c * lcm_den) for c in p.coeffs]
    roots: set[Fraction] = set()
    low = 0
    while ints[low] == 0:
        low += 1
    if low > 0:
        roots.add(Fraction(0))
        ints = ints[low:]
    if len(ints) == 1:
        return roots
    a0, an = ints[0], ints[-1]
    for num in _divisors(a0):
        for den in _divisors(an):
            if math.gcd(num, den) != 1:
                continue
            for cand in (Fraction(num, den), Fraction(-num, den)):
                if cand not in roots and p.eval(cand) == 0:
                    roots.add(cand)
    return roots


# ---------------------------------------------------------------------------
# Canonical printing.
#
# Grammar-compatible text: expanded numerator '/' expanded denominator,
# terms in decreasing degree.  Elements of Q(y)(t) are printed after
# clearing all y-denominators, so each side is a polynomial in t and y
# with rational coefficients (e.g. "(t^2*y + y + 2)/y").


def _mono_str(c: Fraction, heads: list[tuple[str, int]]) -> str:
    parts = []
    if abs(c) != 1 or all(p == 0 for _, p in heads):
        parts.append(str(abs(c)))
    for sym, p in heads:
        if p == 1:
            parts.append(sym)
        elif p > 1:
            parts.append(f"{sym}^{p}")
    return "*".join(parts)


def _join_monos(monos: list[tuple[Fraction, list[tuple[str, int]]]]) -> str:
    if not monos:
        return "0"
    pieces = []
    for i, (c, heads) in enumerate(monos):
        body = _mono_str(c, heads)
        if i == 0 and c < 0:
            # In the grammar '-' binds a whole base, so '-t^2' would read
            # as (-t)^2; spell the coefficient out instead.
            if "^" in body.split("*", 1)[0]:
                body = "1*" + body
            pieces.append("-" + body)
        elif i == 0:
            pieces.append(body)
        else:
            pieces.append((" - " if c < 0 else " + ") + body)
    return "".join(pieces)


def _univar_monos(p: UniPoly):
    out = []
    for i in range(p.degree, -1, -1):
        c = p.coeff(i)
        if c != 0:
            out.append((c, [(p.var, i)]))
    return out


def _bivar_monos(p: UniPoly, inner_var: str):
    out = []
    for i in range(p.degree, -1, -1):
        cy = p.coeff(i)
        if isinstance(cy, Fraction):
            if cy != 0:
                out.append((cy, [(p.var, i)]))
            continue
        for j in range(cy.degree, -1, -1):
            c = cy.coeff(j)
            if c != 0:
                out.append((c, [(p.var, i), (inner_var, j)]))
    return out


def _needs_parens_num(s: str) -> bool:
    return " + " in s or " - " in s


def _needs_parens_den(s: str) -> bool:
    return not s.replace("^", "").replace("/", "").isalnum() or "/" in s


def _clear_y_denominators(R: RatFunc):
    """Rewrite N(t)/D(t) over Q(y) as bivariate polys over Q via an lcm."""
    field_y = R.num.field.coeff_field  # UniPoly layer: coefficients in Q(y)
    lcm = UniPoly(field_y, "y", [Fraction(1)])
    for side in (R.num, R.den):
        for c in side.coeffs:
            lcm = poly_lcm(lcm, c.den)

    def cleared(side: UniPoly) -> UniPoly:
        coeffs = [c.num * lcm.exact_div(c.den) for c in side.coeffs]
        return UniPoly(_POLY_Y_FIELD, side.var, coeffs)

    return cleared(R.num), cleared(R.den)


class _PolyCoeffField:
    """Internal: Q[y] viewed as a coefficient ring for printing only."""

    name = "Q[y]"
    var = "y"

    def __init__(self):
        self.zero = UniPoly(QQ, "y", [])
        self.one = UniPoly(QQ, "y", [Fraction(1)])

    def coerce(self, value):
        if isinstance(value, UniPoly) and value.var == "y" and value.field is QQ:
            return value
        if isinstance(value, (int, Fraction)):
            return UniPoly(QQ, "y", [Fraction(value)])
        raise TypeError(f"cannot coerce {value!r} into Q[y]")

    def is_element(self, value):
        return isinstance(value, UniPoly) and value.var == "y" and value.field is QQ


_POLY_Y_FIELD = _PolyCoeffField()


def format_element(obj) -> str:
    """Canonical text form; parse(format_element(v)) recovers v exactly."""
    if isinstance(obj, Fraction):
        return str(obj)
    if isinstance(obj, UniPoly):
        if isinstance(obj.field, RationalField):
            return _join_monos(_univar_monos(obj))
        if isinstance(obj.field, _PolyCoeffField):
            return _join_monos(_bivar_monos(obj, "y"))
        return format_element(RatFunc(obj, _one_poly(obj.field, obj.var)))
    if not isinstance(obj, RatFunc):
        raise TypeError(f"cannot format {obj!r}")
    if isinstance(obj.num.field, RationalField):
        num_p, den_p = obj.num, obj.den
        num_s = _join_monos(_univar_monos(num_p))
        den_s = _join_monos(_univar_monos(den_p))
    else:
        num_p, den_p = _clear_y_denominators(obj)
        num_s = _join_monos(_bivar_monos(num_p, "y"))
        den_s = _join_monos(_bivar_monos(den_p, "y"))
    if den_s == "1":
        return num_s
    if _needs_parens_num(num_s):
        num_s = f"({num_s})"
    if _needs_parens_den(den_s):
        den_s = f"({den_s})"
    return f"{num_s}/{den_s}"
