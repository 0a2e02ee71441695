"""Certified evaluation: enclosure soundness, oracles, certificates."""

import math
import random
from fractions import Fraction

import mpmath
import pytest
from mpmath import mp

from kolberg import (
    DomainError, SeriesSpec,
    check_identity, diese_quatuor, enclose_fraction, eval_F_closed,
    eval_H_series, eval_theorem_series, exp_ub, E_UB, invert_xt,
    invert_xt_certified, kolberg_quatuor, parse_poly, require_x_domain,
    tol_fraction, tree_t_interval,
)
from kolberg.numeric import _iv_hi, _iv_lo, _working


def mpf_to_fraction(x) -> Fraction:
    sign, man, exp, _ = x._mpf_
    if man == 0:
        return Fraction(0)
    v = Fraction(man) * Fraction(2) ** exp
    return -v if sign else v


def mpf_x(fr: Fraction):
    return mp.mpf(fr.numerator) / fr.denominator


class TestEnclosures:
    def test_enclose_fraction_contains_value(self):
        rng = random.Random(17)
        with _working(128):
            for _ in range(300):
                fr = Fraction(rng.getrandbits(300) - (1 << 299),
                              rng.getrandbits(280) + 1)
                e = enclose_fraction(fr)
                assert mpf_to_fraction(_iv_lo(e)) <= fr
                assert fr <= mpf_to_fraction(_iv_hi(e))

    def test_exp_ub_is_upper_bound(self):
        mp.prec = 300
        for z in [Fraction(0), Fraction(1), Fraction(1, 3), Fraction(7, 2),
                  Fraction(5)]:
            ub = exp_ub(z)
            assert mpf_x(Fraction(ub)) >= mp.exp(mpf_x(z))
            # and reasonably tight
            assert mpf_x(Fraction(ub)) <= mp.exp(mpf_x(z)) * (1 + mp.mpf(1e-9))

    def test_e_ub_brackets_e(self):
        assert Fraction(27182, 10000) < E_UB < Fraction(27183, 10000)

    def test_domain_gate(self):
        require_x_domain(Fraction(36, 100))
        require_x_domain(Fraction(-36, 100))
        for bad in [Fraction(0), Fraction(37, 100), Fraction(1, 2),
                    Fraction(-2)]:
            with pytest.raises(DomainError):
                require_x_domain(bad)

    def test_tol_fraction(self):
        assert tol_fraction("1e-30") == Fraction(1, 10 ** 30)
        assert tol_fraction(Fraction(1, 7)) == Fraction(1, 7)
        with pytest.raises(ValueError):
            tol_fraction("0")


class TestTreeFunction:
    def test_against_lambertw(self):
        mp.prec = 350
        for xs in ["1/10", "1/5", "-1/5", "1/3", "-9/25"]:
            x = Fraction(xs)
            t = invert_xt(x, 256)
            w = -mpmath.lambertw(-mpf_x(x))
            assert abs(t - w) < mpmath.ldexp(1, -250)

    def test_interval_brackets_root(self):
        mp.prec = 350
        for xs in ["1/10", "-1/5"]:
            x = Fraction(xs)
            box = tree_t_interval(x, 192)
            w = -mpmath.lambertw(-mpf_x(x))
            assert _iv_lo(box) <= w <= _iv_hi(box)

    def test_residual_certificate(self):
        _, resid = invert_xt_certified(Fraction(1, 7), 256)
        assert resid < mpmath.ldexp(1, -248)

    def test_zero(self):
        assert invert_xt(Fraction(0), 128) == 0

    def test_domain(self):
        with pytest.raises(DomainError):
            invert_xt(Fraction(1, 2), 128)

    def test_defining_equation(self):
        mp.prec = 320
        x = Fraction(3, 10)
        t = invert_xt(x, 256)
        assert abs(t * mp.exp(-t) - mpf_x(x)) < mpmath.ldexp(1, -240)


def brute_sum(term, n_start, count):
    S = Fraction(0)
    for n in range(n_start, n_start + count):
        S += term(n)
    return S


def family_term(spec: SeriesSpec):
    a, r, P, x = spec.a, spec.r, spec.P, spec.x

    def pw(base, e):
        if base == 0:
            return Fraction(1) if e == 0 else Fraction(0)
        return base ** e

    if spec.family == "kolberg":
        return lambda n: (pw(n + r, n - a) * P.eval(Fraction(n)) * x ** n
                          / math.factorial(n)), 1
    if spec.family == "sharp":
        return lambda n: ((r * r + 2 * n * r + 2 * n * n - n)
                          * pw(n + r, n - a) * P.eval(Fraction(n)) * x ** n
                          / math.factorial(n)), 0
    return lambda n: ((n - 1) * pw(Fraction(n), n + a)
                      * P.eval(Fraction(1, n)) * x ** n
                      / math.factorial(n)), 2


class TestTheoremSeries:
    def test_tree_function_identity(self):
        res = eval_theorem_series(
            SeriesSpec("kolberg", Fraction(1, 10), a=1), 256, "1e-40")
        t = invert_xt(Fraction(1, 10), 320)
        with _working(256):
            assert abs(res.value - t) < mpmath.mpf("1e-40")

    def test_geometric_identity(self):
        # a=0, r=0: sum n^n x^n / n! = t/(1-t)
        x = Fraction(-1, 5)
        res = eval_theorem_series(SeriesSpec("kolberg", x, a=0), 256, "1e-38")
        t = invert_xt(x, 320)
        with _working(256):
            assert abs(res.value - t / (1 - t)) < mpmath.mpf("1e-37")

    def test_error_bound_sound_random(self):
        # the certified bound must cover the gap to a much longer sum
        rng = random.Random(31)
        mp.prec = 700
        for _ in range(40):
            family = rng.choice(["kolberg", "sharp", "example0"])
            a = rng.randint(-2, 3)
            r = Fraction(rng.randint(-8, 8), rng.choice([1, 2, 3, 5]))
            if family == "kolberg" and r.denominator == 1 \
                    and a >= 2 and -(a - 1) <= r <= -1:
                r += Fraction(1, 2)
            P = parse_poly(f"{rng.randint(-3, 3)}*n^2 + {rng.randint(-3, 3)}")
            x = Fraction(rng.randint(1, 30), 100) * rng.choice([1, -1])
            spec = SeriesSpec(family, x, a=a, r=r, P=P)
            try:
                res = eval_theorem_series(spec, 256, "1e-25")
            except DomainError:
                continue  # term at n + r = 0 with negative exponent
            term, n_start = family_term(spec)
            far = brute_sum(term, n_start, res.terms_used + 150)
            gap = abs(mpf_x(far) - mpmath.mpf(res.value))
            assert gap <= mpmath.mpf(res.error_bound) * (1 + mp.mpf(1e-6)) \
                + mpmath.ldexp(1, -600), (family, a, str(r), str(x))

    def test_sharp_term_zero_power(self):
        # n = 0 with r = 0: base 0, exponent -a
        res = eval_theorem_series(
            SeriesSpec("sharp", Fraction(1, 10), a=0, r=Fraction(0)),
            128, "1e-20")
        assert res.terms_used >= 1

    def test_sharp_negative_power_of_zero_rejected(self):
        with pytest.raises(DomainError):
            eval_theorem_series(
                SeriesSpec("sharp", Fraction(1, 10), a=2, r=Fraction(0)),
                128, "1e-20")

    def test_excluded_r(self):
        with pytest.raises(DomainError):
            eval_theorem_series(
                SeriesSpec("kolberg", Fraction(1, 10), a=3, r=Fraction(-2)),
                128)

    def test_custom_h_matches_builtin(self):
        spec = SeriesSpec(
            "custom-H", Fraction(1, 10),
            supplier=lambda n: Fraction(n) ** (n - 1),
            bound_K=Fraction(1), bound_delta=-1, bound_from=1)
        res = eval_theorem_series(spec, 256, "1e-35")
        ref = eval_theorem_series(
            SeriesSpec("kolberg", Fraction(1, 10), a=1), 256, "1e-35")
        with _working(256):
            assert abs(res.value - ref.value) \
                <= res.error_bound + ref.error_bound

    def test_custom_h_needs_model(self):
        with pytest.raises(ValueError):
            SeriesSpec("custom-H", Fraction(1, 10),
                       supplier=lambda n: Fraction(1))

    def test_determinism(self):
        spec = SeriesSpec("kolberg", Fraction(1, 7), a=1, r=Fraction(1, 3))
        a = eval_theorem_series(spec, 256, "1e-30")
        b = eval_theorem_series(spec, 256, "1e-30")
        assert mpmath.nstr(a.value, 70) == mpmath.nstr(b.value, 70)
        assert a.terms_used == b.terms_used

    def test_precision_consistency(self):
        spec = SeriesSpec("kolberg", Fraction(1, 7), a=1, r=Fraction(1, 3))
        lo = eval_theorem_series(spec, 128, "1e-25")
        hi = eval_theorem_series(spec, 512, "1e-25")
        with _working(512):
            assert abs(mpmath.mpf(lo.value) - hi.value) \
                <= mpmath.mpf(lo.error_bound) + mpmath.mpf(hi.error_bound)

    def test_tolerance_unreachable_at_low_precision(self):
        with pytest.raises(DomainError):
            eval_theorem_series(
                SeriesSpec("kolberg", Fraction(1, 10), a=0), 64, "1e-40")

    def test_near_domain_edge(self):
        # x = 9/25 = 0.36 sits close to 1/e; the ratio is ~0.98 so the
        # sum is long but must still terminate with a sound bound
        x = Fraction(9, 25)
        res = eval_theorem_series(SeriesSpec("kolberg", x, a=1), 256,
                                  "1e-10")
        t = invert_xt(x, 320)
        with _working(256):
            assert abs(res.value - t) < mpmath.mpf("1e-10")
        assert res.terms_used > 400


class TestHSeries:
    def test_matches_closed_form_sum(self):
        mp.prec = 500
        q = diese_quatuor(-2, 3)
        r = Fraction(1, 2)
        rr = mpf_x(r)
        for lvl, xs in [(-2, "1/5"), (0, "-1/5"), (3, "1/10")]:
            x = Fraction(xs)
            res = eval_H_series(q.level(lvl), r, x, None, 256, "1e-34")
            brute = mp.mpf(0)
            for n in range(0, 250):
                u0 = (rr + 2) * (rr * rr + 2 * n * rr + 2 * n * n - n) \
                    * (rr + n) ** (n - 3)
                brute += u0 * (rr + n) ** (-lvl) * mpf_x(x) ** n \
                    / mp.factorial(n)
            assert abs(res.value - brute) < mpmath.mpf("1e-30"), (lvl, xs)

    def test_explicit_order_tail_still_sound(self):
        mp.prec = 500
        q = kolberg_quatuor(-2, 2)
        x = Fraction(1, 5)
        res = eval_H_series(q.level(0), Fraction(1, 3), x, N=25,
                            precision=256)
        ref = eval_H_series(q.level(0), Fraction(1, 3), x, None, 256,
                            "1e-45")
        assert abs(res.value - ref.value) \
            <= mpmath.mpf(res.error_bound) + mpmath.mpf(ref.error_bound)

    def test_pole_at_zero(self):
        from kolberg import AdHocFunction, parse_qyt, PoleError
        F = AdHocFunction(parse_qyt("1/t"))
        with pytest.raises(PoleError):
            eval_H_series(F, Fraction(1, 2), Fraction(1, 10))


class TestIdentityCertificate:
    def test_pass_grid(self):
        q = diese_quatuor(-2, 3)
        for lvl in (-2, 1, 3):
            for xs in ("1/10", "-1/5"):
                cert = check_identity(q.level(lvl), Fraction(1, 2),
                                      Fraction(xs), "1e-30", 256)
                assert cert.passed, (lvl, xs, str(cert))

    def test_forms(self):
        q = diese_quatuor(-2, 3)
        assert check_identity(q.level(0), Fraction(1, 2),
                              Fraction(1, 5)).form == "K"
        assert check_identity(q.level(0), Fraction(1, 2),
                              Fraction(-1, 5)).form == "G"
        assert check_identity(q.level(0), Fraction(2),
                              Fraction(-1, 5)).form == "K"

    def test_fault_injection_fails(self):
        q = diese_quatuor(-2, 3)
        cert = check_identity(q.level(0), Fraction(1, 2), Fraction(1, 5),
                              "1e-30", 256, perturb={3: Fraction(1, 10 ** 6)})
        assert not cert.passed
        assert cert.residual > mpmath.mpf("1e-12")

    def test_tiny_injection_below_tol_passes(self):
        q = diese_quatuor(-2, 3)
        cert = check_identity(q.level(0), Fraction(1, 2), Fraction(1, 5),
                              "1e-10", 256, perturb={3: Fraction(1, 10 ** 14)})
        assert cert.passed

    def test_wrong_function_fails(self):
        from kolberg import AdHocFunction, parse_qyt
        F = AdHocFunction(parse_qyt("1 + 2/y + t^2 + t^3"))
        cert = check_identity(F, Fraction(1, 2), Fraction(1, 5),
                              "1e-30", 256)
        # still an identity by construction of the series from F itself,
        # so this must PASS: the certificate checks internal consistency
        assert cert.passed

    def test_certificate_repr(self):
        q = diese_quatuor(0, 0)
        cert = check_identity(q.level(0), Fraction(1, 3), Fraction(1, 10))
        assert "PASS" in str(cert) and "residual" in str(cert)


class TestClosedEval:
    def test_polynomial_point(self):
        from kolberg import parse_qyt
        mp.prec = 300
        t = mp.mpf(1) / 4
        val = eval_F_closed(parse_qyt("1 + 2/y + t^2"), Fraction(2), t, 256)
        expect = t ** 2 * (1 + mp.mpf(1) + t * t)  # y=2: 1 + 1 + t^2, times t^2
        assert abs(val - expect) < mpmath.ldexp(1, -240)

    def test_negative_t_fractional_power_rejected(self):
        from kolberg import parse_qyt
        with pytest.raises(DomainError):
            eval_F_closed(parse_qyt("1 + t"), Fraction(1, 2),
                          mp.mpf(-0.25), 128)

    def test_pole_straddle(self):
        from kolberg import parse_qyt, PoleError
        with pytest.raises(PoleError):
            eval_F_closed(parse_qyt("1/(1 - t)"), Fraction(1),
                          mp.mpf(1.0), 128)
