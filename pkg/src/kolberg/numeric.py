"""Certified numeric evaluation.

Every reported value comes with an error bound that is sound by
construction: partial sums are computed in exact rational arithmetic,
series tails are bounded by elementary inequalities evaluated as exact
rationals (rounded only upward), and the few genuinely irrational
quantities (e^t, t^r, the tree-function branch) are enclosed in
interval arithmetic at the working precision.  The working precision is
the requested precision plus a fixed number of guard bits.

Tail bounds use three facts, each elementary:
  * n! >= (n/e)^n, since e^n = sum n^k/k! >= n^n/n!;
  * (1 + c/n)^n <= e^c for c >= 0;
  * the Cauchy bound |g_n| <= max_{|t|=tau} |G(t)| / tau^n for the
    Taylor coefficients of a function analytic on |t| <= tau.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from decimal import Decimal
from fractions import Fraction
from functools import lru_cache

import mpmath
from mpmath import iv, mp

from .assoc import CoeffSeq, from_associated
from .quatuor import AdHocFunction, taylor_series
from .rational import (
    QQ, QYT, DomainError, PoleError, RatFunc, UniPoly,
    rational_roots, substitute_y,
)

GUARD_BITS = 32


class _working:
    """Temporarily raise both mpmath contexts to precision + guard."""

    def __init__(self, precision: int):
        if precision < 64:
            raise ValueError("precision must be at least 64 bits")
        self.prec = precision + GUARD_BITS

    def __enter__(self):
        self._mp_old = mp.prec
        self._iv_old = iv.prec
        mp.prec = self.prec
        iv.prec = self.prec
        return self

    def __exit__(self, *exc):
        mp.prec = self._mp_old
        iv.prec = self._iv_old
        return False


def _iv_lo(x) -> mpmath.mpf:
    return mpmath.make_mpf(x._mpi_[0])


def _iv_hi(x) -> mpmath.mpf:
    return mpmath.make_mpf(x._mpi_[1])


def _iv_mid(x) -> mpmath.mpf:
    return (_iv_lo(x) + _iv_hi(x)) / 2


def _iv_rad(x) -> mpmath.mpf:
    return (_iv_hi(x) - _iv_lo(x)) / 2


def _iv_abs_sup(x) -> mpmath.mpf:
    return max(abs(_iv_lo(x)), abs(_iv_hi(x)))


def _mpf_from_fraction(fr: Fraction) -> mpmath.mpf:
    return mp.mpf(fr.numerator) / mp.mpf(fr.denominator)


def enclose_fraction(fr) -> "iv.mpf":
    """Interval guaranteed to contain the exact rational.

    The midpoint suffers at most three roundings (numerator,
    denominator, quotient), each within 2^-prec relative error, so a
    half-width of |v| * 2^-(prec-3) is a safe outward margin.
    """
    fr = Fraction(fr)
    if fr == 0:
        return iv.mpf(0)
    v = _mpf_from_fraction(fr)
    w = mpmath.ldexp(abs(v), -(mp.prec - 3))
    return iv.mpf([v - w, v + w])


def _pow_iv(base, r: Fraction):
    """base^r for an interval base; fractional r needs a positive base."""
    if r.denominator == 1:
        return base ** int(r)
    if not _iv_lo(base) > 0:
        raise DomainError(
            "fractional power needs a strictly positive base")
    return iv.exp(enclose_fraction(r) * iv.log(base))


def _eval_poly_iv(p: UniPoly, t):
    acc = iv.mpf(0)
    for c in reversed(p.coeffs):
        acc = acc * t + enclose_fraction(c)
    return acc


def _eval_ratfunc_iv(R: RatFunc, t):
    num = _eval_poly_iv(R.num, t)
    den = _eval_poly_iv(R.den, t)
    if _iv_lo(den) <= 0 <= _iv_hi(den):
        raise PoleError("denominator interval straddles zero")
    return num / den


# -- exact rational upper bounds ------------------------------------------


def exp_ub(z: Fraction) -> Fraction:
    """A rational upper bound on e^z, z >= 0, by truncation plus slack."""
    z = Fraction(z)
    if z < 0:
        raise ValueError("exp_ub needs z >= 0")
    K = max(2 * (int(z) + 1), 24)
    s = Fraction(0)
    term = Fraction(1)
    for k in range(K + 1):
        s += term
        term = term * z / (k + 1)
    # term = z^(K+1)/(K+1)! and the remaining ratio is at most
    # z/(K+2) <= 1/2, so the full tail is below 2*term.
    return s + 2 * term


E_UB = exp_ub(Fraction(1))


def _dyadic_up(fr: Fraction, bits: int = 64) -> Fraction:
    """Round a nonnegative rational up to a short dyadic, keeping >=."""
    if fr == 0:
        return Fraction(0)
    shift = bits - (fr.numerator.bit_length() - fr.denominator.bit_length())
    if shift >= 0:
        num = -((-fr.numerator << shift) // fr.denominator)
        return Fraction(num, 1 << shift)
    num = -((-fr.numerator) // (fr.denominator << -shift))
    return Fraction(num << -shift)


def require_x_domain(x: Fraction):
    """Certify 0 < |x| < 1/e using the rational upper bound on e."""
    x = Fraction(x)
    if x == 0 or abs(x) * E_UB >= 1:
        raise DomainError(f"need 0 < |x| < 1/e, got x = {x}")
    return x


def tol_fraction(tol) -> Fraction:
    """Exact rational reading of a tolerance ('1e-30', Fraction, ...)."""
    if isinstance(tol, Fraction):
        value = tol
    elif isinstance(tol, int):
        value = Fraction(tol)
    elif isinstance(tol, str):
        value = Fraction(Decimal(tol))
    elif isinstance(tol, float):
        value = Fraction(Decimal(repr(tol)))
    else:
        raise TypeError(f"cannot read tolerance {tol!r}")
    if value <= 0:
        raise ValueError("tolerance must be positive")
    return value


# -- tree-function branch --------------------------------------------------


def invert_xt(x, precision: int = 256) -> mpmath.mpf:
    """The branch of t e^{-t} = x through (0, 0), certified.

    Newton iteration from t_0 = x; afterwards the residual
    |t e^{-t} - x| is re-evaluated in interval arithmetic and must be
    below 2^-(precision-8).
    """
    t, _resid = invert_xt_certified(x, precision)
    return t


def invert_xt_certified(x, precision: int = 256):
    """invert_xt plus an upper bound on |t e^{-t} - x|."""
    x = Fraction(x)
    if x != 0 and abs(x) * E_UB >= 1:
        raise DomainError(f"need |x| < 1/e, got x = {x}")
    with _working(precision):
        if x == 0:
            return mp.mpf(0), mp.mpf(0)
        xv = _mpf_from_fraction(x)
        t = xv
        limit = mpmath.ldexp(1, -(precision + 16))
        for _ in range(400):
            w = xv * mp.exp(t)
            delta = (t - w) / (1 - w)
            t = t - delta
            if abs(delta) < limit:
                break
        else:
            raise ArithmeticError("Newton iteration did not converge")
        ti = iv.mpf(t)
        resid = ti * iv.exp(-ti) - enclose_fraction(x)
        bound = _iv_abs_sup(resid)
        if not bound < mpmath.ldexp(1, -(precision - 8)):
            raise ArithmeticError("residual certificate failed")
        return t, bound


def tree_t_interval(x, precision: int = 256):
    """An interval certified to contain the exact branch value t(x).

    The forward map s e^{-s} - x changes sign across the interval; the
    map is strictly increasing for s < 1, so the sign change brackets
    the root.
    """
    x = Fraction(x)
    with _working(precision):
        if x == 0:
            return iv.mpf(0)
        t = invert_xt(x, precision)
        x_iv = enclose_fraction(x)
        delta = mpmath.ldexp(max(abs(t), mp.mpf(1)), -(precision - 2))
        for _ in range(80):
            lo = t - delta
            hi = t + delta
            f_lo = iv.mpf(lo) * iv.exp(-iv.mpf(lo)) - x_iv
            f_hi = iv.mpf(hi) * iv.exp(-iv.mpf(hi)) - x_iv
            if _iv_hi(f_lo) < 0 and _iv_lo(f_hi) > 0:
                return iv.mpf([lo, hi])
            delta = delta * 8
        raise ArithmeticError("could not bracket the tree-function branch")


# -- closed-form side ------------------------------------------------------


def eval_F_closed(R, r, t, precision: int = 256) -> mpmath.mpf:
    """t^r * R(t, r) at the working precision (midpoint value)."""
    with _working(precision):
        return _iv_mid(eval_F_interval(R, r, t, precision))


def eval_F_interval(R, r, t, precision: int = 256):
    """Certified interval for t^r * R(t, r).

    R may be an element of Q(y)(t) (then y := r is substituted first)
    or already an element of Q(t); t may be a float, mpf, Fraction or
    interval.
    """
    r = Fraction(r)
    if isinstance(R, AdHocFunction):
        R = R.R
    if QYT.is_element(R):
        R = substitute_y(R, r)
    with _working(precision):
        if isinstance(t, iv.mpf):
            t_iv = t
        elif isinstance(t, Fraction):
            t_iv = enclose_fraction(t)
        else:
            t_iv = iv.mpf(mp.mpf(t))
        value = _eval_ratfunc_iv(R, t_iv)
        prefactor = _pow_iv(t_iv, r)
        return prefactor * value


# -- series families -------------------------------------------------------


@dataclass(frozen=True)
class SeriesSpec:
    """One member of the evaluated series families.

    family 'kolberg':   sum_{n>=1} (n+r)^(n-a) P(n) x^n / n!
    family 'sharp':     sum_{n>=0} (r^2+2nr+2n^2-n)(n+r)^(n-a) P(n) x^n / n!
    family 'example0':  sum_{n>=2} (n-1) n^(n+a) P(1/n) x^n / n!
    family 'custom-H':  sum_{n>=n0} u_n x^n / n! with a caller-supplied
        coefficient function, plus a caller-certified dominance model
        |u_n x^n / n!| <= bound_K * n^bound_delta * (E_UB*|x|)^n
        for n >= bound_from.
    """

    family: str
    x: Fraction
    a: int = 0
    r: Fraction = Fraction(0)
    P: UniPoly = None
    supplier: object = None
    bound_K: Fraction = None
    bound_delta: int = None
    bound_from: int = None

    def __post_init__(self):
        if self.family not in ("kolberg", "sharp", "example0", "custom-H"):
            raise ValueError(f"unknown family {self.family!r}")
        object.__setattr__(self, "x", Fraction(self.x))
        object.__setattr__(self, "r", Fraction(self.r))
        P = self.P
        if P is None:
            P = UniPoly(QQ, "n", [Fraction(1)])
        object.__setattr__(self, "P", P)
        if self.family == "custom-H":
            if (self.supplier is None or self.bound_K is None
                    or self.bound_delta is None or self.bound_from is None):
                raise ValueError(
                    "custom-H needs supplier, bound_K, bound_delta, bound_from")


@dataclass(frozen=True)
class EvalResult:
    value: mpmath.mpf
    error_bound: mpmath.mpf
    terms_used: int
    precision_bits: int

    def __str__(self):
        return (f"{mpmath.nstr(self.value, 30)} +/- "
                f"{mpmath.nstr(self.error_bound, 3)} "
                f"({self.terms_used} terms at {self.precision_bits} bits)")


def result_to_json(res: EvalResult) -> str:
    import json
    with _working(res.precision_bits):
        digits = max(int(res.precision_bits * 0.30103) - 2, 10)
        obj = {
            "value": mpmath.nstr(res.value, digits),
            "error_bound": mpmath.nstr(res.error_bound, 5),
            "terms": res.terms_used,
            "precision_bits": res.precision_bits,
        }
    return json.dumps(obj, indent=2)


def _fpow(base: Fraction, e: int) -> Fraction:
    """base^e with the series convention 0^0 = 1; 0^negative is a pole."""
    if base == 0:
        if e > 0:
            return Fraction(0)
        if e == 0:
            return Fraction(1)
        raise DomainError("zero base raised to a negative power")
    return base ** e


def _tail_after(K0: Fraction, delta: int, q: Fraction, N: int,
                q_pow: Fraction):
    """Upper bound on sum_{n>N} K0 n^delta q^n given q_pow >= q^(N+1).

    None when the simple geometric domination does not yet apply.
    """
    if delta <= 0:
        head = K0 * Fraction(N + 1) ** delta * q_pow
        return _dyadic_up(head / (1 - q))
    kappa = (Fraction(N + 1) / N) ** delta
    rho = kappa * q
    if rho >= 1:
        return None
    head = K0 * Fraction(N + 1) ** delta * q_pow
    return _dyadic_up(head / (1 - rho))


def _sum_series(term_fn, n_start: int, K0: Fraction, delta: int,
                q: Fraction, bound_from: int, tol_half: Fraction,
                cap: int = 60000):
    """Exact partial sum until the certified tail drops below tol_half."""
    if not 0 < q < 1:
        raise DomainError(f"geometric ratio {q} is not below 1")
    q = _dyadic_up(q)
    if q >= 1:
        raise DomainError("geometric ratio rounds to 1; x too close to 1/e")
    S = Fraction(0)
    N = n_start - 1
    q_pow = _dyadic_up(q ** n_start)
    while True:
        n = N + 1
        S += term_fn(n)
        N = n
        q_pow = _dyadic_up(q_pow * q)
        if N >= bound_from and N >= 1:
            tail = _tail_after(K0, delta, q, N, q_pow)
            if tail is not None and tail <= tol_half:
                return S, N, tail
        if N > cap:
            raise DomainError(
                "series did not meet the tolerance within the term cap")


def _family_plan(spec: SeriesSpec):
    """Term function plus certified dominance data for a family."""
    x = require_x_domain(spec.x)
    a, r, P = spec.a, spec.r, spec.P
    abs_x = abs(x)
    M_P = sum(abs(c) for c in P.coeffs) if not P.is_zero else Fraction(0)
    d = max(P.degree, 0)
    q = E_UB * abs_x

    if spec.family == "kolberg":
        if r.denominator == 1 and a >= 2 and -(a - 1) <= r <= -1:
            raise DomainError(
                f"family needs r outside {{-1, ..., {-(a - 1)}}}, got {r}")

        def term(n: int) -> Fraction:
            return (_fpow(n + r, n - a) * P.eval(Fraction(n))
                    * x ** n / math.factorial(n))

        C_r = exp_ub(abs(r)) * (1 + abs(r)) ** max(-a, 0)
        return term, 1, M_P * C_r, d - a, q, max(a, 1)

    if spec.family == "sharp":
        def term(n: int) -> Fraction:
            poly = r * r + 2 * n * r + 2 * n * n - n
            return (poly * _fpow(n + r, n - a) * P.eval(Fraction(n))
                    * x ** n / math.factorial(n))

        C_r = exp_ub(abs(r)) * (1 + abs(r)) ** max(-a, 0)
        C_2 = r * r + 2 * abs(r) + 3  # |r^2+2nr+2n^2-n| <= C_2 n^2, n >= 1
        return term, 0, M_P * C_r * C_2, d - a + 2, q, max(a, 1)

    if spec.family == "example0":
        def term(n: int) -> Fraction:
            return ((n - 1) * _fpow(Fraction(n), n + a)
                    * P.eval(Fraction(1, n)) * x ** n / math.factorial(n))

        # (n-1) n^(n+a) / n! <= n^(a+1) e^n for every n >= 1
        return term, 2, M_P, a + 1, q, 2

    # custom-H
    supplier = spec.supplier

    def term(n: int) -> Fraction:
        return Fraction(supplier(n)) * x ** n / math.factorial(n)

    return (term, spec.bound_from, Fraction(spec.bound_K),
            spec.bound_delta, q, spec.bound_from)


def eval_theorem_series(spec: SeriesSpec, precision: int = 256,
                        target_tol="1e-30") -> EvalResult:
    """Certified evaluation of one of the series families.

    The partial sum is exact; the reported error bound covers the
    series tail plus the final rounding of the exact sum to binary.
    """
    tol = tol_fraction(target_tol)
    term, n_start, K0, delta, q, bound_from = _family_plan(spec)
    S, N, tail = _sum_series(term, n_start, K0, delta, q, bound_from,
                             tol / 2)
    with _working(precision):
        enc = enclose_fraction(S)
        rounding = _iv_rad(enc)
        if not mp.mpf(rounding) < _mpf_from_fraction(tol / 2):
            raise DomainError(
                f"precision {precision} cannot meet tolerance {target_tol}")
        bound = _mpf_from_fraction(tail) * (1 + mpmath.ldexp(1, -8)) \
            + rounding
        return EvalResult(_iv_mid(enc), bound, N, precision)


# -- H-series of a quatuor level ------------------------------------------


@lru_cache(maxsize=256)
def _h_u_values(R_t: RatFunc, r: Fraction, N: int) -> tuple:
    """u_0(r)..u_N(r) for H(x, r), via the associated-series transform."""
    series = taylor_series(R_t, N, r)
    v = CoeffSeq("v", QQ, tuple(
        c * math.factorial(n) for n, c in enumerate(series)))
    return from_associated(v).values


def _h_tail_params(R_t: RatFunc, r: Fraction, x: Fraction):
    """(M, E, zeta) with |u_n x^n/n!| <= M*E*zeta^n for all n >= 1.

    Cauchy-bound route: on |t| = tau the associated function
    R(t) e^{r t} is bounded by M*E, so |v_m| <= m! M E / tau^m; pushing
    that through the inverse transform with the inequality
    binom(n-1, m-1) m! <= n! n^(n-m)/(n-m)! gives
    |u_n| <= M E n! (e^tau / tau)^n, hence the geometric form with
    zeta = |x| e^tau / tau.  tau is chosen below every pole radius.
    """
    den = R_t.den
    constraints = []
    work = den
    if den.degree > 0:
        for rho in sorted(rational_roots(den), key=abs):
            if rho == 0:
                raise PoleError("pole at t = 0")
            mult = 0
            factor = UniPoly(QQ, "t", [-rho, 1])
            while True:
                quot, rem = divmod(work, factor)
                if rem.is_zero:
                    work = quot
                    mult += 1
                else:
                    break
            constraints.append((abs(rho), mult))
    # 'work' now has no rational roots; w_0 != 0 since t = 0 was excluded
    tau = Fraction(9, 10)
    for rad, _ in constraints:
        tau = min(tau, Fraction(7, 8) * rad)
    for _ in range(300):
        lw = abs(work.coeff(0)) - sum(
            abs(work.coeff(i)) * tau ** i for i in range(1, work.degree + 1))
        zeta = abs(x) * exp_ub(tau) / tau
        if lw > 0 and zeta < 1 and all(rad > tau for rad, _ in constraints):
            num_bound = sum(abs(c) * tau ** i
                            for i, c in enumerate(R_t.num.coeffs))
            den_lower = lw
            for rad, mult in constraints:
                den_lower *= (rad - tau) ** mult
            M = num_bound / den_lower
            E = exp_ub(abs(r) * tau)
            return _dyadic_up(M), _dyadic_up(E), _dyadic_up(zeta)
        tau = tau * Fraction(3, 4)
    raise DomainError(
        "no certified radius for the tail bound; |x| may be too large "
        "for this level's pole structure")


def _h_tail_after(M: Fraction, E: Fraction, zeta: Fraction, N: int
                  ) -> Fraction:
    return _dyadic_up(M * E * zeta ** (N + 1) / (1 - zeta))


def eval_H_series(F: AdHocFunction, r, x, N: int | None = None,
                  precision: int = 256, target_tol="1e-30") -> EvalResult:
    """sum_{n<=N} u_n(r) x^n / n! with a certified tail bound.

    With N omitted, the smallest N meeting target_tol/2 is used.
    """
    r = Fraction(r)
    x = require_x_domain(x)
    R_t = substitute_y(F.R if isinstance(F, AdHocFunction) else F, r)
    M, E, zeta = _h_tail_params(R_t, r, x)
    if N is None:
        tol = tol_fraction(target_tol)
        N = 1
        while _h_tail_after(M, E, zeta, N) > tol / 2 and N < 60000:
            N += 1 + N // 8
        while N > 1 and _h_tail_after(M, E, zeta, N - 1) <= tol / 2:
            N -= 1
    tail = _h_tail_after(M, E, zeta, N)
    u = _h_u_values(R_t, r, N)
    S = Fraction(0)
    for n in range(N + 1):
        S += u[n] * x ** n / math.factorial(n)
    with _working(precision):
        enc = enclose_fraction(S)
        bound = _mpf_from_fraction(tail) * (1 + mpmath.ldexp(1, -8)) \
            + _iv_rad(enc)
        return EvalResult(_iv_mid(enc), bound, N, precision)


# -- identity certificate --------------------------------------------------


@dataclass(frozen=True)
class IdentityCertificate:
    passed: bool
    residual: mpmath.mpf
    slack: mpmath.mpf
    form: str           # 'K': x^r H(x) vs t^r R(t);  'G': H(x) e^{-rt} vs R(t)
    terms_used: int
    precision_bits: int

    def __str__(self):
        verdict = "PASS" if self.passed else "FAIL"
        return (f"{verdict} ({self.form}-form) residual "
                f"{mpmath.nstr(self.residual, 6)} with error slack "
                f"{mpmath.nstr(self.slack, 6)} "
                f"({self.terms_used} terms at {self.precision_bits} bits)")


def check_identity(F: AdHocFunction, r, x, tol="1e-30",
                   precision: int = 256, perturb=None) -> IdentityCertificate:
    """Certify K(x, r) = F(t, r) under x = t e^{-t}.

    For x > 0 (or integer r) the two sides are K = x^r sum u_n x^n/n!
    and F = t^r R(t); for x < 0 with fractional r both sides are
    divided by t^r and compared as H(x) e^{-r t} vs R(t).  The check
    passes when the midpoint residual is within tol plus all certified
    error contributions.  perturb maps indices to offsets added to u_n
    (a fault-injection hook for validating that the certificate can
    fail).
    """
    r = Fraction(r)
    x = require_x_domain(x)
    tol_f = tol_fraction(tol)
    R_qyt = F.R if isinstance(F, AdHocFunction) else F
    R_t = substitute_y(R_qyt, r)
    M, E, zeta = _h_tail_params(R_t, r, x)
    N = 1
    target = tol_f / 8
    while _h_tail_after(M, E, zeta, N) > target and N < 60000:
        N += 1 + N // 8
    while N > 1 and _h_tail_after(M, E, zeta, N - 1) <= target:
        N -= 1
    tail = _h_tail_after(M, E, zeta, N)
    u = list(_h_u_values(R_t, r, N))
    if perturb:
        for idx, delta in perturb.items():
            if 0 <= idx <= N:
                u[idx] += Fraction(delta)
    S = Fraction(0)
    for n in range(N + 1):
        S += u[n] * x ** n / math.factorial(n)
    with _working(precision):
        t_iv = tree_t_interval(x, precision)
        tail_sym = iv.mpf([-_mpf_from_fraction(tail),
                           _mpf_from_fraction(tail)])
        H_iv = enclose_fraction(S) + tail_sym
        if x > 0 or r.denominator == 1:
            form = "K"
            if r.denominator == 1:
                x_pow = enclose_fraction(x ** int(r))
            else:
                x_pow = _pow_iv(enclose_fraction(x), r)
            lhs = x_pow * H_iv
            rhs = _pow_iv(t_iv, r) * _eval_ratfunc_iv(R_t, t_iv)
        else:
            form = "G"
            lhs = H_iv * iv.exp(-enclose_fraction(r) * t_iv)
            rhs = _eval_ratfunc_iv(R_t, t_iv)
        resid = lhs - rhs
        residual = abs(_iv_mid(resid))
        slack = _iv_rad(resid)
        passed = bool(residual <= _mpf_from_fraction(tol_f) + slack)
        return IdentityCertificate(passed, residual, slack, form, N,
                                   precision)
