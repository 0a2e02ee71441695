"""Coefficient transforms between a series and its associated series.

H(x) = sum u_n x^n/n! and G(t) = H(t*e^{-t}) = sum v_n t^n/n! determine
each other through a pair of binomial transforms:

    u_n = sum_{m=1..n} C(n-1, m-1) * n^(n-m) * v_m      (n >= 1)
    v_n = sum_{m=1..n} C(n, m) * (-m)^(n-m) * u_m       (n >= 1)

with u_0 = v_0.  The power convention 0^0 = 1 is forced by the m = n
term (it makes u_1 = v_1).  Entries live in Q or in Q(y); the formulas
are the same in both rings.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from fractions import Fraction

from .parsing import parse_to, print_canonical
from .rational import QQ, QY


def _ring_by_tag(tag: str):
    if tag == "Q":
        return QQ
    if tag == "Q(y)":
        return QY
    raise ValueError(f"unknown ring tag {tag!r}")


@dataclass(frozen=True)
class CoeffSeq:
    """Coefficients u_0..u_N (kind 'u') or v_0..v_N (kind 'v')."""

    kind: str
    ring: object
    values: tuple

    def __post_init__(self):
        if self.kind not in ("u", "v"):
            raise ValueError("kind must be 'u' or 'v'")
        object.__setattr__(
            self, "values",
            tuple(self.ring.coerce(v) for v in self.values))

    @property
    def order(self) -> int:
        return len(self.values) - 1

    def __len__(self):
        return len(self.values)

    def __getitem__(self, i):
        return self.values[i]


def _ipow(base: int, exp: int) -> int:
    # 0^0 = 1 by the series convention
    return 1 if exp == 0 else base ** exp


def to_associated(u: CoeffSeq, N: int | None = None) -> CoeffSeq:
    """G-coefficients of the associated series from H-coefficients."""
    if u.kind != "u":
        raise ValueError("to_associated expects H-coefficients (kind 'u')")
    if N is None:
        N = u.order
    if u.order < N:
        raise ValueError(f"need u_0..u_{N}, have only {u.order + 1} entries")
    zero = u.ring.zero
    out = [u.values[0]]
    for n in range(1, N + 1):
        acc = zero
        for m in range(1, n + 1):
            acc = acc + math.comb(n, m) * _ipow(-m, n - m) * u.values[m]
        out.append(acc)
    return CoeffSeq("v", u.ring, tuple(out))


def from_associated(v: CoeffSeq, N: int | None = None) -> CoeffSeq:
    """H-coefficients from the coefficients of the associated series."""
    if v.kind != "v":
        raise ValueError("from_associated expects G-coefficients (kind 'v')")
    if N is None:
        N = v.order
    if v.order < N:
        raise ValueError(f"need v_0..v_{N}, have only {v.order + 1} entries")
    zero = v.ring.zero
    out = [v.values[0]]
    for n in range(1, N + 1):
        acc = zero
        for m in range(1, n + 1):
            acc = acc + math.comb(n - 1, m - 1) * _ipow(n, n - m) * v.values[m]
        out.append(acc)
    return CoeffSeq("u", v.ring, tuple(out))


def compose_oracle(u: CoeffSeq, N: int | None = None) -> CoeffSeq:
    """G-coefficients by literal substitution, for cross-checking.

    Expands sum_n u_n * t^n * e^{-n t} / n! with each e^{-n t} as a
    truncated power series, multiplying series term by term; no
    binomial identity is used anywhere.
    """
    if u.kind != "u":
        raise ValueError("compose_oracle expects H-coefficients (kind 'u')")
    if N is None:
        N = u.order
    if u.order < N:
        raise ValueError(f"need u_0..u_{N}, have only {u.order + 1} entries")
    coeffs = [u.ring.zero] * (N + 1)
    coeffs[0] = u.values[0]
    for n in range(1, N + 1):
        inv_nfact = Fraction(1, math.factorial(n))
        # truncated series of e^{-n t}: sum_j (-n)^j t^j / j!
        for j in range(N - n + 1):
            scale = inv_nfact * Fraction(_ipow(-n, j), math.factorial(j))
            coeffs[n + j] = coeffs[n + j] + scale * u.values[n]
    values = [coeffs[k] * math.factorial(k) for k in range(N + 1)]
    return CoeffSeq("v", u.ring, tuple(values))


def sequence_to_json(seq: CoeffSeq) -> str:
    obj = {
        "ring": seq.ring.name,
        "kind": seq.kind,
        "coeffs": [print_canonical(v) for v in seq.values],
    }
    return json.dumps(obj, indent=2)


def sequence_from_json(text: str) -> CoeffSeq:
    obj = json.loads(text)
    ring = _ring_by_tag(obj["ring"])
    values = tuple(parse_to(c, ring) if ring is QY else _parse_q(c)
                   for c in obj["coeffs"])
    return CoeffSeq(obj["kind"], ring, values)


def _parse_q(text: str) -> Fraction:
    rf = parse_to(text, QY)
    if not rf.is_constant:
        raise ValueError(f"expected a rational constant, got {text!r}")
    return rf.constant_value()
