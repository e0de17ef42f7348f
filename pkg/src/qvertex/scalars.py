"""Exact arithmetic in the cyclotomic field Q(zeta_M).

Scalars are stored in the power basis 1, z, ..., z^(phi(M)-1) modulo the
M-th cyclotomic polynomial, with arbitrary-precision rational coordinates.
Equality is coordinate comparison, so the zero test is decidable, which is
what every identity check in the engine bottoms out on.
"""
from __future__ import annotations

import re
from fractions import Fraction
from typing import Iterable, Sequence, Union

RationalLike = Union[int, Fraction]


def _divisors(m: int) -> list[int]:
    out = [d for d in range(1, m + 1) if m % d == 0]
    return out


def _poly_mul(a: Sequence[Fraction], b: Sequence[Fraction]) -> list[Fraction]:
    out = [Fraction(0)] * (len(a) + len(b) - 1)
    for i, ai in enumerate(a):
        if not ai:
            continue
        for j, bj in enumerate(b):
            if bj:
                out[i + j] += ai * bj
    return out


def _poly_divmod(num: Sequence[Fraction], den: Sequence[Fraction]):
    """Exact division in Q[x]; coefficients ascending, den monic-or-not."""
    num = list(num)
    dd = len(den) - 1
    while len(den) > 1 and not den[-1]:
        den = den[:-1]
        dd -= 1
    lead = den[-1]
    q = [Fraction(0)] * max(1, len(num) - dd)
    for i in range(len(num) - 1, dd - 1, -1):
        c = num[i]
        if not c:
            continue
        f = c / lead
        q[i - dd] = f
        for j, dj in enumerate(den):
            num[i - dd + j] -= f * dj
    while len(num) > 1 and not num[-1]:
        num.pop()
    return q, num


_CYCLO_CACHE: dict[int, tuple[Fraction, ...]] = {}


def cyclotomic_polynomial(M: int) -> tuple[Fraction, ...]:
    """Coefficients (ascending) of Phi_M, by exact division of x^M - 1."""
    if M in _CYCLO_CACHE:
        return _CYCLO_CACHE[M]
    if M < 1:
        raise ValueError("cyclotomic order must be a positive integer")
    num = [Fraction(0)] * (M + 1)
    num[0], num[M] = Fraction(-1), Fraction(1)
    den = [Fraction(1)]
    for d in _divisors(M)[:-1]:
        den = _poly_mul(den, list(cyclotomic_polynomial(d)))
    q, rem = _poly_divmod(num, den)
    if any(rem[1:]) or rem[0]:
        raise ArithmeticError(f"inexact division computing Phi_{M}")
    phi = tuple(q)
    _CYCLO_CACHE[M] = phi
    return phi


class CycloContext:
    """The field Q(zeta_M): modulus Phi_M plus precomputed reduction data."""

    def __init__(self, M: int):
        if M < 1:
            raise ValueError("cyclotomic order must be a positive integer")
        self.M = M
        self.phi = cyclotomic_polynomial(M)
        self.degree = len(self.phi) - 1
        # power table: coordinates of z^e for e up to max(M, 2*degree-2),
        # enough for products and for arbitrary roots of unity z^(jM/N).
        d = self.degree
        top = max(M, 2 * d - 1)
        table: list[tuple[Fraction, ...]] = []
        cur = [Fraction(0)] * d
        if d > 0:
            cur[0] = Fraction(1)
        for _ in range(top + 1):
            table.append(tuple(cur))
            nxt = [Fraction(0)] + cur[:-1] if d > 1 else [Fraction(0)]
            carry = cur[-1]
            if carry:
                for i in range(d):
                    nxt[i] -= carry * self.phi[i]
            cur = nxt
        self._powers = table
        self.zero = Scalar(self, tuple(Fraction(0) for _ in range(d)))
        self.one = Scalar(self, self._powers[0])

    def __eq__(self, other) -> bool:
        return isinstance(other, CycloContext) and other.M == self.M

    def __hash__(self) -> int:
        return hash(("CycloContext", self.M))

    def __repr__(self) -> str:
        return f"CycloContext(M={self.M})"

    def from_rational(self, q: RationalLike) -> "Scalar":
        c = [Fraction(0)] * self.degree
        c[0] = Fraction(q)
        return Scalar(self, tuple(c))

    def from_coeffs(self, coeffs: Iterable[RationalLike]) -> "Scalar":
        cs = tuple(Fraction(c) for c in coeffs)
        if len(cs) != self.degree:
            raise ValueError(f"expected {self.degree} coordinates, got {len(cs)}")
        return Scalar(self, cs)

    def zeta(self, e: int = 1) -> "Scalar":
        return Scalar(self, self._powers[e % self.M])

    def root_of_unity(self, N: int, j: int = 1) -> "Scalar":
        """omega_N^j = zeta_M^(jM/N); requires N | M."""
        if N < 1 or self.M % N != 0:
            raise ValueError(f"N={N} does not divide the cyclotomic order M={self.M}")
        return self.zeta((j % N) * (self.M // N))

    def reduce(self, conv: Sequence[Fraction]) -> tuple[Fraction, ...]:
        d = self.degree
        out = list(conv[:d]) + [Fraction(0)] * (d - min(d, len(conv)))
        for e in range(d, len(conv)):
            c = conv[e]
            if c:
                row = self._powers[e]
                for i in range(d):
                    if row[i]:
                        out[i] += c * row[i]
        return tuple(out)

    # -- literal syntax ----------------------------------------------------
    _TERM = re.compile(
        r"^(?P<sign>[+-])?(?P<coef>\d+(?:/\d+)?)?"
        r"(?:\*?(?P<zeta>ζ|zeta)(?:\^(?P<pow>\d+))?)?$"
    )

    def parse(self, literal) -> "Scalar":
        """Parse a scalar literal: coordinate list ["p/q", ...] or a short
        expression like "1", "-1/2", "ζ", "2ζ^3 - 1"."""
        if isinstance(literal, Scalar):
            if literal.ctx != self:
                raise ValueError("scalar from a different cyclotomic context")
            return literal
        if isinstance(literal, (int, Fraction)):
            return self.from_rational(literal)
        if isinstance(literal, (list, tuple)):
            return self.from_coeffs(Fraction(str(c)) for c in literal)
        if not isinstance(literal, str):
            raise ValueError(f"cannot parse scalar literal {literal!r}")
        s = literal.replace(" ", "")
        if not s:
            raise ValueError("empty scalar literal")
        # split into signed terms
        terms, buf = [], ""
        for ch in s:
            if ch in "+-" and buf and buf[-1] not in "+-*/^":
                terms.append(buf)
                buf = ch
            else:
                buf += ch
        terms.append(buf)
        acc = self.zero
        for t in terms:
            m = self._TERM.match(t)
            if not m or (m.group("coef") is None and m.group("zeta") is None):
                raise ValueError(f"bad scalar term {t!r} in {literal!r}")
            q = Fraction(m.group("coef")) if m.group("coef") else Fraction(1)
            if m.group("sign") == "-":
                q = -q
            if m.group("zeta"):
                e = int(m.group("pow") or 1)
                acc = acc + self.zeta(e) * q
            else:
                acc = acc + self.from_rational(q)
        return acc


class Scalar:
    """An element of Q(zeta_M) in canonical power-basis coordinates."""

    __slots__ = ("ctx", "coeffs")

    def __init__(self, ctx: CycloContext, coeffs: tuple[Fraction, ...]):
        self.ctx = ctx
        self.coeffs = coeffs

    @property
    def is_zero(self) -> bool:
        return not any(self.coeffs)

    def __bool__(self) -> bool:
        return not self.is_zero

    def _check(self, other: "Scalar"):
        if self.ctx != other.ctx:
            raise ValueError("scalars from different cyclotomic contexts")

    def __add__(self, other: "Scalar") -> "Scalar":
        self._check(other)
        return Scalar(self.ctx, tuple(a + b for a, b in zip(self.coeffs, other.coeffs)))

    def __sub__(self, other: "Scalar") -> "Scalar":
        self._check(other)
        return Scalar(self.ctx, tuple(a - b for a, b in zip(self.coeffs, other.coeffs)))

    def __neg__(self) -> "Scalar":
        return Scalar(self.ctx, tuple(-a for a in self.coeffs))

    def __mul__(self, other) -> "Scalar":
        if isinstance(other, (int, Fraction)):
            return Scalar(self.ctx, tuple(a * other for a in self.coeffs))
        self._check(other)
        a, b = self.coeffs, other.coeffs
        d = self.ctx.degree
        if d == 1:
            return Scalar(self.ctx, (a[0] * b[0],))
        # rational operands scale coordinatewise (no reduction needed)
        if not any(b[1:]):
            q = b[0]
            return Scalar(self.ctx, tuple(ai * q for ai in a))
        if not any(a[1:]):
            q = a[0]
            return Scalar(self.ctx, tuple(bi * q for bi in b))
        conv = [Fraction(0)] * (2 * d - 1)
        for i, ai in enumerate(a):
            if not ai:
                continue
            for j, bj in enumerate(b):
                if bj:
                    conv[i + j] += ai * bj
        return Scalar(self.ctx, self.ctx.reduce(conv))

    __rmul__ = __mul__

    def inverse(self) -> "Scalar":
        """Multiplicative inverse by the extended Euclidean algorithm
        against Phi_M over the rationals."""
        if self.is_zero:
            raise ZeroDivisionError("inverse of zero scalar")
        d = self.ctx.degree
        if d == 1:
            return Scalar(self.ctx, (1 / self.coeffs[0],))
        # Bezout: find u with u*a = 1 mod phi
        r0, r1 = list(self.ctx.phi), list(self.coeffs)
        while len(r1) > 1 and not r1[-1]:
            r1.pop()
        s0, s1 = [Fraction(0)], [Fraction(1)]
        while len(r1) > 1 or r1[0]:
            q, rem = _poly_divmod(r0, r1)
            r0, r1 = r1, rem
            qs = _poly_mul(q, s1)
            news = [Fraction(0)] * max(len(s0), len(qs))
            for i, c in enumerate(s0):
                news[i] += c
            for i, c in enumerate(qs):
                news[i] -= c
            while len(news) > 1 and not news[-1]:
                news.pop()
            s0, s1 = s1, news
            if len(r1) == 1 and not r1[0]:
                break
        # r0 is the (nonzero constant) gcd; inverse = s0 / r0
        if len(r0) != 1 or not r0[0]:
            raise ArithmeticError("scalar is a zero divisor (Phi_M not coprime?)")
        inv_coeffs = [c / r0[0] for c in s0]
        inv_coeffs += [Fraction(0)] * (2 * d - len(inv_coeffs))
        return Scalar(self.ctx, self.ctx.reduce(inv_coeffs))

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, Scalar)
            and other.ctx == self.ctx
            and other.coeffs == self.coeffs
        )

    def __hash__(self) -> int:
        return hash((self.ctx.M, self.coeffs))

    def literal(self) -> list[str]:
        """Canonical exchange form: list of "p/q" strings, ascending powers."""
        return [f"{c.numerator}/{c.denominator}" for c in self.coeffs]

    def __repr__(self) -> str:
        if self.is_zero:
            return "0"
        parts = []
        for e, c in enumerate(self.coeffs):
            if not c:
                continue
            if e == 0:
                parts.append(str(c))
            else:
                z = "ζ" if e == 1 else f"ζ^{e}"
                if c == 1:
                    parts.append(z)
                elif c == -1:
                    parts.append(f"-{z}")
                else:
                    parts.append(f"{c}{z}")
        return " + ".join(parts).replace("+ -", "- ")


# -- spec operation wrappers ---------------------------------------------


def cyclo_context(M: int) -> CycloContext:
    return CycloContext(M)


def scalar_arith(op: str, a: Scalar, b: Scalar | None = None) -> Scalar:
    if op == "add":
        return a + b
    if op == "sub":
        return a - b
    if op == "mul":
        return a * b
    if op == "neg":
        return -a
    raise ValueError(f"unknown scalar op {op!r}")


def scalar_inv(a: Scalar) -> Scalar:
    return a.inverse()


def root_of_unity(ctx: CycloContext, N: int, j: int = 1) -> Scalar:
    return ctx.root_of_unity(N, j)
