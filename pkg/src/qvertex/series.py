"""Sparse formal series in up to three variables with exponents in (1/N)Z.

A FracSeries stores finitely many coefficients (a window of a possibly
infinite formal distribution); the support_class records which infinite
object the window was cut from.  All expansion conventions follow the
second-summand rule: (a +/- b)^alpha is expanded in nonnegative powers of b.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import ceil, floor
from typing import Iterable, Optional

from .scalars import CycloContext, Scalar

FINITE = "finite"
ITERATED = "lower_bounded_per_variable"
JOINT = "jointly_lower_bounded"


class SupportError(ValueError):
    """Raised when an operation's support preconditions are violated."""


class WindowError(ValueError):
    """Raised when a requested coefficient is not determined by the window."""


_BINOM_CACHE: dict[tuple[int, int, int], Fraction] = {}


def binom(alpha, t: int) -> Fraction:
    """Generalized binomial C(alpha, t) = alpha(alpha-1)...(alpha-t+1)/t!."""
    if t < 0:
        return Fraction(0)
    a = Fraction(alpha)
    key = (a.numerator, a.denominator, t)
    got = _BINOM_CACHE.get(key)
    if got is None:
        got = Fraction(1)
        for i in range(t):
            got = got * (a - i) / (i + 1)
        _BINOM_CACHE[key] = got
    return got


@dataclass(frozen=True)
class VarSet:
    names: tuple[str, ...]
    N: int = 1

    def __post_init__(self):
        if not (1 <= len(self.names) <= 3):
            raise ValueError("VarSet supports between one and three variables")
        if len(set(self.names)) != len(self.names):
            raise ValueError("variable tags must be distinct")
        if self.N < 1:
            raise ValueError("exponent denominator must be positive")

    def index(self, name: str) -> int:
        return self.names.index(name)


@dataclass(frozen=True)
class Window:
    """Per-variable closed exponent interval, endpoints in (1/N)Z."""

    bounds: tuple[tuple[Fraction, Fraction], ...]

    @staticmethod
    def cube(lo, hi, nvars: int = 1) -> "Window":
        b = (Fraction(lo), Fraction(hi))
        if b[0] > b[1]:
            raise ValueError("window lo must not exceed hi")
        return Window(tuple(b for _ in range(nvars)))

    def lo(self, i: int) -> Fraction:
        return self.bounds[i][0]

    def hi(self, i: int) -> Fraction:
        return self.bounds[i][1]

    def contains(self, exps: Iterable[Fraction]) -> bool:
        for i, e in enumerate(exps):
            lo, hi = self.bounds[i]
            if not (lo <= e <= hi):
                return False
        return True

    def lattice(self, i: int, N: int) -> list[Fraction]:
        lo, hi = self.bounds[i]
        return [Fraction(n, N) for n in range(ceil(lo * N), floor(hi * N) + 1)]

    def to_json(self):
        return [[str(lo), str(hi)] for lo, hi in self.bounds]


class FracSeries:
    """Sparse series: map exponent tuple -> coefficient (Scalar or state)."""

    __slots__ = ("vars", "terms", "support_class", "lower_bound", "window",
                 "dropped")

    def __init__(self, vars: VarSet, terms=None, support_class: str = FINITE,
                 lower_bound: Optional[Fraction] = None,
                 window: Optional[Window] = None):
        self.vars = vars
        self.terms: dict[tuple[Fraction, ...], object] = {}
        if terms:
            for k, v in terms.items():
                if v:
                    self.terms[tuple(Fraction(e) for e in k)] = v
        self.support_class = support_class
        self.lower_bound = lower_bound
        self.window = window
        self.dropped = False

    def coeff(self, *exps):
        key = tuple(Fraction(e) for e in exps)
        return self.terms.get(key)

    def is_empty(self) -> bool:
        return not self.terms

    def __bool__(self) -> bool:
        return bool(self.terms)

    def _like(self, terms, support_class=None) -> "FracSeries":
        return FracSeries(self.vars, terms,
                          support_class or self.support_class,
                          self.lower_bound, self.window)

    def __add__(self, other: "FracSeries") -> "FracSeries":
        if other.vars != self.vars:
            raise ValueError("series over different variable sets")
        out = dict(self.terms)
        for k, v in other.terms.items():
            cur = out.get(k)
            s = v if cur is None else cur + v
            if s:
                out[k] = s
            elif k in out:
                del out[k]
        return self._like(out)

    def __neg__(self) -> "FracSeries":
        return self._like({k: -v for k, v in self.terms.items()})

    def __sub__(self, other: "FracSeries") -> "FracSeries":
        return self + (-other)

    def scale(self, c) -> "FracSeries":
        if not c:
            return self._like({})
        return self._like({k: v * c for k, v in self.terms.items()})

    def __eq__(self, other) -> bool:
        return (isinstance(other, FracSeries) and other.vars == self.vars
                and other.terms == self.terms)

    def __hash__(self):
        raise TypeError("FracSeries is not hashable")

    def __repr__(self) -> str:
        if not self.terms:
            return "0"
        bits = []
        for k in sorted(self.terms):
            mono = " ".join(f"{n}^{e}" for n, e in zip(self.vars.names, k) if e)
            bits.append(f"({self.terms[k]})" + (f"*{mono}" if mono else ""))
        return " + ".join(bits)

    def to_json(self):
        """Serialization: exponent numerators over the header denominator."""
        N = self.vars.N
        rows = []
        for k in sorted(self.terms):
            coeff = self.terms[k]
            lit = coeff.literal() if hasattr(coeff, "literal") else repr(coeff)
            rows.append({"exponents": [int(e * N) for e in k], "coeff": lit})
        return {"denominator": N, "vars": list(self.vars.names), "terms": rows}


def series_mul(a: FracSeries, b: FracSeries, w: Window) -> FracSeries:
    """Cauchy product of two windowed series, restricted to w.

    Operands must be complete on windows wide enough that no pair of terms
    outside them lands inside w; with at least one finite operand that holds
    whenever the infinite operand covers w padded by the finite one's span.
    """
    if a.vars != b.vars:
        raise ValueError("series over different variable sets")
    inf_a = a.support_class != FINITE
    inf_b = b.support_class != FINITE
    if inf_a and inf_b:
        if a.support_class == ITERATED and b.support_class == ITERATED \
                and a.vars.names != b.vars.names:
            raise SupportError("iterated supports with incompatible variable order")
    scalar_a = all(isinstance(v, Scalar) for v in a.terms.values())
    scalar_b = all(isinstance(v, Scalar) for v in b.terms.values())
    if not (scalar_a or scalar_b):
        raise SupportError("cannot multiply two operator-valued series")
    out: dict[tuple[Fraction, ...], object] = {}
    dropped = False
    for ka, va in a.terms.items():
        for kb, vb in b.terms.items():
            key = tuple(x + y for x, y in zip(ka, kb))
            if not w.contains(key):
                dropped = True
                continue
            prod = va * vb if scalar_b else vb * va
            cur = out.get(key)
            s = prod if cur is None else cur + prod
            if s:
                out[key] = s
            elif key in out:
                del out[key]
    cls = FINITE if (a.support_class == FINITE and b.support_class == FINITE) \
        else (a.support_class if inf_a else b.support_class)
    res = FracSeries(a.vars, out, cls, window=w)
    res.dropped = dropped
    return res


def binom_expand(vars: VarSet, pair: tuple[str, str], sign: int, alpha,
                 w: Window) -> FracSeries:
    """(u +/- v)^alpha = sum_i C(alpha,i)(+/-1)^i u^(alpha-i) v^i, truncated
    to w in the second summand v."""
    alpha = Fraction(alpha)
    u, v = pair
    iu, iv = vars.index(u), vars.index(v)
    if (alpha * vars.N).denominator != 1:
        raise ValueError("alpha must lie on the exponent lattice")
    terms = {}
    i = 0
    hi = w.hi(iv)
    while i <= hi:
        c = binom(alpha, i) * ((1 if sign >= 0 else -1) ** i)
        if c:
            key = [Fraction(0)] * len(vars.names)
            key[iu] = alpha - i
            key[iv] = Fraction(i)
            terms[tuple(key)] = c
        i += 1
    out = FracSeries(vars, {}, ITERATED, window=w)
    out.terms = {k: v for k, v in terms.items()}
    return out


def subst_to_sum(F: FracSeries, orientation: str, w: Window,
                 out_vars: Optional[VarSet] = None) -> FracSeries:
    """Formal substitution per the second-summand expansion convention.

    Orientations (F lives in (x1, x2) unless noted):
      "x1->x2+x0": needs jointly lower-bounded F; image vars (x0, x2).
      "x1->x0+x2": needs iterated support, x1 outer; image vars (x0, x2).
      "x2->x1-x0": image vars (x0, x1).
    Stored terms are substituted exactly; truncation only by w.
    """
    N = F.vars.N
    if len(F.vars.names) != 2:
        raise SupportError("substitution expects a two-variable series")
    if orientation == "x1->x2+x0":
        if F.support_class not in (FINITE, JOINT):
            raise SupportError("x1->x2+x0 requires jointly lower-bounded support")
        vs = out_vars or VarSet(("x0", "x2"), N)

        def expand(gamma, beta, i):  # x1^g x2^b -> C(g,i) x0^i x2^(g+b-i)
            return binom(gamma, i), (Fraction(i), gamma + beta - i)
        src = 0
    elif orientation == "x1->x0+x2":
        if F.support_class not in (FINITE, ITERATED):
            raise SupportError("x1->x0+x2 requires iterated lower-bounded support")
        vs = out_vars or VarSet(("x0", "x2"), N)

        def expand(gamma, beta, i):  # x1^g x2^b -> C(g,i) x0^(g-i) x2^(b+i)
            return binom(gamma, i), (gamma - i, beta + i)
        src = 0
    elif orientation == "x2->x1-x0":
        if F.support_class not in (FINITE, JOINT):
            raise SupportError("x2->x1-x0 requires jointly lower-bounded support")
        vs = out_vars or VarSet(("x0", "x1"), N)

        def expand(gamma, beta, i):  # x1^b x2^g -> C(g,i)(-1)^i x0^i x1^(g+b-i)
            return binom(gamma, i) * (-1) ** i, (Fraction(i), gamma + beta - i)
        src = 1
    else:
        raise ValueError(f"unknown orientation {orientation!r}")
    out: dict[tuple[Fraction, ...], object] = {}
    i_hi = w.hi(0) if orientation != "x1->x0+x2" else None
    for key, c in F.terms.items():
        gamma = key[src]            # exponent being substituted
        beta = key[1 - src]         # spectator exponent
        i = 0
        while True:
            if orientation == "x1->x0+x2":
                # expansion index rides the x2 slot: stop past its window
                if beta + i > w.hi(1):
                    break
            elif i > i_hi:
                break
            coef, nk = expand(gamma, beta, i)
            if coef:
                nk = (Fraction(nk[0]), Fraction(nk[1]))
                if w.contains(nk):
                    cur = out.get(nk)
                    add = c * coef
                    s = add if cur is None else cur + add
                    if s:
                        out[nk] = s
                    elif nk in out:
                        del out[nk]
            i += 1
    return FracSeries(vs, out, F.support_class if F.support_class == FINITE else JOINT,
                      window=w)


def delta_expand(kind: str, w: Window, ctx: CycloContext, N: int = 1,
                 j: int = 0) -> FracSeries:
    """The three delta kernels of the Jacobi identities, windowed, in
    variables (x0, x1, x2).

    K1 = sum_n x0^(-n-1) (x1-x2)^n          (x2-expansion)
    K2 = sum_n (-x0)^(-n-1) (x2-x1)^n       (x1-expansion)
    K3 = sum_n w_N^(-jn) x2^(-1-n/N) (x1-x0)^(n/N)   (x0-expansion)
    """
    vs = VarSet(("x0", "x1", "x2"), N)
    terms: dict[tuple[Fraction, ...], Scalar] = {}

    def put(e0, e1, e2, c: Scalar):
        key = (Fraction(e0), Fraction(e1), Fraction(e2))
        if not w.contains(key):
            return
        cur = terms.get(key)
        s = c if cur is None else cur + c
        if s:
            terms[key] = s
        elif key in terms:
            del terms[key]

    if kind in ("K1", "K2"):
        # x0-exponent is -n-1, an integer inside the x0 window
        n_lo = ceil(-w.hi(0) - 1)
        n_hi = floor(-w.lo(0) - 1)
        iv = 2 if kind == "K1" else 1
        for n in range(n_lo, n_hi + 1):
            t = 0
            while t <= w.hi(iv):
                c = binom(n, t)
                if c:
                    if kind == "K1":
                        put(-n - 1, n - t, t, ctx.from_rational(c * (-1) ** t))
                    else:
                        # x0^{-1} delta((x2-x1)/(-x0)): row n carries (-1)^n,
                        # so that rows n >= 0 cancel against K1 exactly
                        put(-n - 1, t, n - t,
                            ctx.from_rational(c * (-1 if (n + t) & 1 else 1)))
                t += 1
        return FracSeries(vs, terms, JOINT, window=w)
    if kind == "K3":
        if ctx.M % N != 0:
            raise ValueError("K3 needs N | M for the root of unity")
        # x2-exponent is -1-n/N inside the x2 window
        n_lo = ceil((-1 - w.hi(2)) * N)
        n_hi = floor((-1 - w.lo(2)) * N)
        for n in range(n_lo, n_hi + 1):
            e2 = Fraction(-N - n, N)
            t = 0
            while t <= w.hi(0):
                c = binom(Fraction(n, N), t)
                if c:
                    val = ctx.root_of_unity(N, -j * n) * (c * (-1) ** t)
                    put(t, Fraction(n, N) - t, e2, val)
                t += 1
        return FracSeries(vs, terms, JOINT, window=w)
    raise ValueError(f"unknown delta kind {kind!r}")


def residue(F: FracSeries, variable: str) -> FracSeries:
    """Coefficient of variable^(-1), as a series in the remaining variables."""
    i = F.vars.index(variable)
    rest = tuple(n for n in F.vars.names if n != variable)
    vs = VarSet(rest or ("x0",), F.vars.N)
    out = {}
    for key, c in F.terms.items():
        if key[i] == -1:
            nk = tuple(e for p, e in enumerate(key) if p != i) or (Fraction(0),)
            cur = out.get(nk)
            s = c if cur is None else cur + c
            if s:
                out[nk] = s
            elif nk in out:
                del out[nk]
    return FracSeries(vs, out, F.support_class)


def derivative(F: FracSeries, variable: str) -> FracSeries:
    """Exact formal derivative; exponent alpha maps to alpha * (alpha - 1)."""
    i = F.vars.index(variable)
    out = {}
    for key, c in F.terms.items():
        a = key[i]
        if not a:
            continue
        nk = list(key)
        nk[i] = a - 1
        nk = tuple(nk)
        nc = c * a
        cur = out.get(nk)
        s = nc if cur is None else cur + nc
        if s:
            out[nk] = s
        elif nk in out:
            del out[nk]
    return FracSeries(F.vars, out, F.support_class)
