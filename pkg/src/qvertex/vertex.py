"""Vertex operators on the vacuum modules.

For a state a = u_{-n}b (u a generator, b a shorter monomial) the engine
computes the slice Y_W(a, x2)s from the weak-associativity identity

    (x2+x0)^(l+r/N) Y_W(Y(u,x0)b, x2)s
        = (x0+x2)^(l+r/N) Y_W(u, x0+x2) Y_W(b, x2)s,

reading coefficients of the right-hand side (all sums finite: annihilation
bounds truncate the generator action, an inductively certified lower bound
truncates the inner slice) and dividing off the binomial factor, which is
triangular in x0.  The exponent r is the twist degree of u; k bounds the
x0-pole of Y(u,x0)b and is computed exactly in the algebra; l clears the
x1-denominators and is conservative, backstopped by l-invariance tests.
The same assembly evaluates the abstract field products a(x)_n b(x).

Exponents are handled as integer numerators over the module lattice N;
the public slice API speaks Fractions.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import ceil
from typing import Callable, Optional, Union

from .algebra import KIND_X, KIND_Y, GenMode, Word, parse_word, valid_mode
from .fock import FockModule, StateVector
from .scalars import Scalar
from .series import FracSeries, VarSet, Window, WindowError, binom


class EngineError(RuntimeError):
    """Internal consistency violation (insufficient clearing exponent)."""


@dataclass
class VertexSlice:
    """Windowed slice of Y_W(a, x)s: exact StateVector coefficients."""

    a: StateVector
    s: StateVector
    window: Window
    coeffs: FracSeries

    def state_at(self, exp) -> StateVector:
        e = Fraction(exp)
        if not self.window.contains((e,)):
            raise WindowError(f"exponent {e} outside window")
        got = self.coeffs.terms.get((e,))
        return got if got is not None else self.s.module.zero()


def _theta_exponent(word: Word, N: int) -> int:
    return sum(1 if g.kind == KIND_X else -1 for g in word) % N


class VertexEngine:
    """Vertex operators for states of the untwisted module V acting on a
    (possibly twisted) module W over the same structure matrix."""

    def __init__(self, V: FockModule, W: Optional[FockModule] = None):
        if V.N != 1:
            raise ValueError("the state module V must be untwisted (N=1)")
        W = W or V
        if W.Q is not V.Q:
            raise ValueError("V and W must share one structure matrix")
        self.V = V
        self.W = W
        self.N = W.N
        self.ctx = V.ctx
        self._slice_cache: dict = {}
        self._cert_cache: dict = {}
        self._d_cache: dict[Word, StateVector] = {}

    # -- structural bounds ---------------------------------------------------
    def pole_k(self, g: GenMode, b: Word) -> int:
        """Exact x0-pole bound: 1 + the largest annihilator mode of g's kind
        that can pair inside b."""
        other = KIND_Y if g.kind == KIND_X else KIND_X
        best = -1
        for f in b:
            if f.kind == other and f.color == g.color:
                cand = int(-f.mode - 1)
                if cand > best:
                    best = cand
        return best + 1

    def _l_bound(self, k: int, s: StateVector, l_shift: int = 0) -> int:
        mu = self.W.min_factor_mode(s)
        return max(1, k, ceil(-mu)) + 2 + l_shift

    def _rho(self, kind: int) -> int:
        return 1 % self.N if kind == KIND_X else (self.N - 1) % self.N

    # -- support certificates --------------------------------------------------
    def support_min_n(self, a: Word, s: StateVector) -> int:
        """Certified lower bound (numerator over N) for supp Y_W(a, x)s."""
        key = (a, tuple(sorted(s.terms)))
        got = self._cert_cache.get(key)
        if got is not None:
            return got
        N = self.N
        if not a:
            out = 0
        elif len(a) == 1:
            g = a[0]
            n = int(-g.mode)
            base = self.W.generator_support_min(g.kind, g.color, s)
            out = int(base * N) - (n - 1) * N
        else:
            g, b = a[0], a[1:]
            n = int(-g.mode)
            k = self.pole_k(g, b)
            l = self._l_bound(k, s)
            Ln = l * N + self._rho(g.kind)
            out = self.support_min_n(b, s) - Ln - ((n - 1) + k) * N
        self._cert_cache[key] = out
        return out

    def support_min(self, a: Word, s: StateVector) -> Fraction:
        return Fraction(self.support_min_n(a, s), self.N)

    # -- the core assembly ---------------------------------------------------
    def _rows(self, left_eval: Callable, rho: int, k: int, l: int,
              rows: list[int], lo_n: int, hi_n: int,
              T: dict[int, StateVector], theta_exp: Optional[int],
              ) -> dict[int, dict[int, StateVector]]:
        """Rows p of (x2+x0)^{-(l+rho/N)} (x0+x2)^{l+rho/N} left(x0+x2) T(x2),
        i.e. of Y_W(Y(left,x0) right, x2)s, x2-exponent numerators in
        [lo_n, hi_n].

        left_eval(state, gamma_n) is the exact x1^(gamma_n/N) coefficient of
        the left field on the state.  T is the complete inner slice (integer
        numerator keys) above its certified minimum.
        """
        W = self.W
        N = self.N
        Ln = l * N + rho
        L = Fraction(Ln, N)
        zero = W.zero()
        t_supp = sorted(T)

        lhs_cache: dict[tuple[int, int], StateVector] = {}

        def lhs(a0: int, c_n: int) -> StateVector:
            key = (a0, c_n)
            got = lhs_cache.get(key)
            if got is not None:
                return got
            acc = zero
            base = a0 * N - Ln
            for d_n in t_supp:
                if d_n > c_n:
                    break
                tn = c_n - d_n
                if tn % N:
                    continue
                gamma_n = base + tn
                coef = binom(Fraction(Ln + gamma_n, N), tn // N)
                if coef:
                    val = left_eval(T[d_n], gamma_n)
                    if val:
                        acc = acc + val * coef
            lhs_cache[key] = acc
            return acc

        # guard: the cleared product must have no x0-poles below -k
        for c_probe in (lo_n + Ln, hi_n + Ln):
            if lhs(-k - 1, c_probe):
                raise EngineError(
                    "clearing exponent l insufficient (x0-support below -k)")

        out: dict[int, dict[int, StateVector]] = {p: {} for p in rows}
        for beta_n in range(lo_n, hi_n + 1):
            if theta_exp is not None and (beta_n + theta_exp) % N != 0:
                continue
            for p in rows:
                acc = zero
                for t2 in range(0, p + k + 1):
                    coef = binom(-L, t2)
                    if coef:
                        val = lhs(p - t2, beta_n + Ln + t2 * N)
                        if val:
                            acc = acc + val * coef
                if acc:
                    out[p][beta_n] = acc
        return out

    # -- vertex operators of states -------------------------------------------
    def _gen_eval(self, g_kind: int, g_color: int):
        W = self.W
        N = self.N
        resid = 1 if g_kind == KIND_X else N - 1

        def ev(state: StateVector, gamma_n: int) -> StateVector:
            # mode -gamma-1 must sit on the generator's lattice
            if (-gamma_n - N) % N != resid % N:
                return W.zero()
            gm = GenMode(g_kind, g_color, Fraction(-gamma_n - N, N))
            return W.apply_mode(gm, state)

        return ev

    def mono_slice_n(self, a: Word, s_word: Word, lo_n: int, hi_n: int,
                     k_shift: int = 0, l_shift: int = 0,
                     force_general: bool = False) -> dict[int, StateVector]:
        """Exact coefficients of Y_W(a, x)(s_word |0>); numerator keys."""
        key = (a, s_word, lo_n, hi_n, k_shift, l_shift, force_general)
        got = self._slice_cache.get(key)
        if got is not None:
            return got
        N = self.N
        s = StateVector(self.W, {s_word: self.ctx.one})
        if not a:
            out = {0: s} if lo_n <= 0 <= hi_n else {}
            self._slice_cache[key] = out
            return out
        if len(a) == 1 and not force_general:
            # Y_W(g_{-n}|0>, x) = (1/(n-1)!) d^{n-1}/dx^{n-1} Y_W(g, x):
            # coefficient at beta is C(beta+n-1, n-1) g_{-beta-n}s
            g = a[0]
            n = int(-g.mode)
            ev = self._gen_eval(g.kind, g.color)
            out = {}
            for beta_n in range(lo_n, hi_n + 1):
                shift_n = beta_n + (n - 1) * N
                c = binom(Fraction(shift_n, N), n - 1)
                if c:
                    val = ev(s, shift_n)
                    if val:
                        out[beta_n] = val * c
            self._slice_cache[key] = out
            return out
        g, b = a[0], a[1:]
        n = int(-g.mode)
        if n <= 0:
            raise ValueError(f"{g!r} is not a creator; not a basis monomial")
        p = n - 1
        k = self.pole_k(g, b) + k_shift
        l = self._l_bound(k, s, l_shift)
        rho = self._rho(g.kind)
        Ln = l * N + rho
        inner_lo = self.support_min_n(b, s)
        inner_hi = hi_n + Ln + (p + k) * N
        T = self.mono_slice_n(b, s_word, inner_lo, inner_hi)
        theta_exp = _theta_exponent(a, N) if N > 1 else None
        rows = self._rows(self._gen_eval(g.kind, g.color), rho, k, l,
                          [p], lo_n, hi_n, T, theta_exp)
        out = rows[p]
        self._slice_cache[key] = out
        return out

    def state_slice_n(self, a: StateVector, s: StateVector, lo_n: int,
                      hi_n: int, k_shift: int = 0, l_shift: int = 0
                      ) -> dict[int, StateVector]:
        out: dict[int, StateVector] = {}
        for aw, ca in a.terms.items():
            for sw, cs in s.terms.items():
                part = self.mono_slice_n(aw, sw, lo_n, hi_n, k_shift, l_shift)
                scale = ca * cs
                for e, st in part.items():
                    add = st * scale
                    cur = out.get(e)
                    tot = add if cur is None else cur + add
                    if tot:
                        out[e] = tot
                    elif e in out:
                        del out[e]
        return out

    def state_slice(self, a: StateVector, s: StateVector, lo, hi,
                    k_shift: int = 0, l_shift: int = 0
                    ) -> dict[Fraction, StateVector]:
        """Slice of Y_W(a, x)s for state vectors, by bilinearity."""
        N = self.N
        lo_n = ceil(Fraction(lo) * N)
        hi_n = (Fraction(hi) * N).__floor__()
        part = self.state_slice_n(a, s, lo_n, hi_n, k_shift, l_shift)
        return {Fraction(e, N): st for e, st in part.items()}

    def vertex_apply(self, a: StateVector, s: StateVector,
                     window: Window) -> VertexSlice:
        lo, hi = window.bounds[0]
        coeffs = self.state_slice(a, s, lo, hi)
        vs = VarSet(("x",), self.N)
        series = FracSeries(vs, {(e,): st for e, st in coeffs.items()},
                            support_class="lower_bounded_per_variable",
                            window=window)
        return VertexSlice(a, s, window, series)

    def product_coeff(self, a: StateVector, b: StateVector, s: StateVector,
                      gamma, delta) -> StateVector:
        """Coefficient of x1^gamma x2^delta in Y_W(a,x1)Y_W(b,x2)s."""
        N = self.N
        dn = int(Fraction(delta) * N)
        gn = int(Fraction(gamma) * N)
        inner = self.state_slice_n(b, s, dn, dn)
        t = inner.get(dn)
        if not t:
            return self.W.zero()
        outer = self.state_slice_n(a, t, gn, gn)
        got = outer.get(gn)
        return got if got else self.W.zero()

    # -- D, the conformal vector, Virasoro modes -------------------------------
    def d_op(self, v: StateVector) -> StateVector:
        """The translation operator D on V: [D, g_m] = -m g_{m-1}, D|0> = 0."""
        if v.module is not self.V:
            raise ValueError("D acts on states of V")
        out = self.V.zero()
        for w, c in v.terms.items():
            got = self._d_cache.get(w)
            if got is None:
                got = self.V.zero()
                for j, g in enumerate(w):
                    lowered = w[:j] + (GenMode(g.kind, g.color, g.mode - 1),) \
                        + w[j + 1:]
                    got = got + self.V.apply_word(lowered, self.V.vacuum()) \
                        * Fraction(-g.mode)
                self._d_cache[w] = got
            out = out + got * c
        return out

    def conformal_vector(self) -> StateVector:
        """omega = (1/2) sum_i (v_{-2}u^(i) - q_ii u_{-2}v^(i)) in normal form."""
        V = self.V
        half = Fraction(1, 2)
        out = V.zero()
        for i in range(1, V.Q.r + 1):
            first = V.state((GenMode(KIND_X, i, Fraction(-1)),
                             GenMode(KIND_Y, i, Fraction(-2))))
            second = V.state((GenMode(KIND_X, i, Fraction(-2)),
                              GenMode(KIND_Y, i, Fraction(-1))))
            out = out + first * (V.Q.qinv(i, i) * half) \
                - second * (V.Q.q(i, i) * half)
        return out

    def central_charge(self) -> Scalar:
        c = self.ctx.zero
        for q in self.V.Q.diagonal():
            c = c - q
        return c

    def virasoro_mode(self, m: int, s: StateVector,
                      omega: Optional[StateVector] = None) -> StateVector:
        """L_W(m)s = coefficient of x^(-m-2) in Y_W(omega, x)s."""
        omega = omega if omega is not None else self.conformal_vector()
        e = (-m - 2) * self.N
        got = self.state_slice_n(omega, s, e, e).get(e)
        return got if got else self.W.zero()

    def virasoro_table(self, s: StateVector, m_lo: int, m_hi: int,
                       omega: Optional[StateVector] = None
                       ) -> dict[int, StateVector]:
        """All L_W(m)s for m in [m_lo, m_hi] from one slice computation."""
        omega = omega if omega is not None else self.conformal_vector()
        lo_n, hi_n = (-m_hi - 2) * self.N, (-m_lo - 2) * self.N
        sl = self.state_slice_n(omega, s, lo_n, hi_n)
        out = {}
        for m in range(m_lo, m_hi + 1):
            got = sl.get((-m - 2) * self.N)
            out[m] = got if got else self.W.zero()
        return out


# -- abstract fields (the Y_E calculus) ------------------------------------


class LazyField:
    """A field description evaluable on module states."""

    def theta_exponent(self, N: int) -> int:
        raise NotImplementedError

    def depth(self) -> int:
        raise NotImplementedError


@dataclass(frozen=True)
class IdentityField(LazyField):
    def theta_exponent(self, N: int) -> int:
        return 0

    def depth(self) -> int:
        return 0

    def __repr__(self):
        return "1_W"


@dataclass(frozen=True)
class GeneratorField(LazyField):
    kind: int
    color: int

    def theta_exponent(self, N: int) -> int:
        return 1 % N if self.kind == KIND_X else (N - 1) % N

    def depth(self) -> int:
        return 1

    def __repr__(self):
        return f"{'XY'[self.kind]}_{self.color}(x)"


@dataclass(frozen=True)
class ProductField(LazyField):
    left: LazyField
    n: int
    right: LazyField

    def theta_exponent(self, N: int) -> int:
        return (self.left.theta_exponent(N) + self.right.theta_exponent(N)) % N

    def depth(self) -> int:
        return self.left.depth() + self.right.depth() + max(0, -self.n - 1)

    def __repr__(self):
        return f"({self.left!r})_{self.n}({self.right!r})"


def field_product(f: LazyField, n: int, g: LazyField) -> ProductField:
    return ProductField(f, n, g)


class FieldEvaluator:
    """Evaluates LazyFields on states of W, windowed, via the same
    weak-associativity assembly used for state slices."""

    def __init__(self, engine: VertexEngine):
        self.engine = engine
        self.W = engine.W
        self._cache: dict = {}

    def field_pole_k(self, f: LazyField, g: LazyField) -> int:
        return f.depth() + g.depth() + 1

    def support_min_n(self, f: LazyField, s: StateVector) -> int:
        W = self.W
        N = W.N
        if isinstance(f, IdentityField):
            return 0
        if isinstance(f, GeneratorField):
            best = None
            for w in s.terms:
                sv = StateVector(W, {w: W.ctx.one})
                cand = W.generator_support_min(f.kind, f.color, sv)
                best = cand if best is None else min(best, cand)
            return int((best if best is not None else 0) * N)
        assert isinstance(f, ProductField)
        k = self.field_pole_k(f.left, f.right)
        l = self.engine._l_bound(k, s)
        rho = f.left.theta_exponent(N)
        Ln = l * N + rho
        p = -f.n - 1
        return self.support_min_n(f.right, s) - Ln - (p + k) * N

    def coeff(self, f: LazyField, state: StateVector, gamma_n: int
              ) -> StateVector:
        """Exact x^(gamma_n/N) coefficient of f(x) applied to state."""
        W = self.W
        if not state:
            return W.zero()
        if isinstance(f, IdentityField):
            return state if gamma_n == 0 else W.zero()
        if isinstance(f, GeneratorField):
            return self.engine._gen_eval(f.kind, f.color)(state, gamma_n)
        assert isinstance(f, ProductField)
        out = W.zero()
        for w, c in state.terms.items():
            part = self._mono_eval(f, w, gamma_n, gamma_n).get(gamma_n)
            if part:
                out = out + part * c
        return out

    def _mono_eval(self, f: ProductField, s_word: Word, lo_n: int,
                   hi_n: int) -> dict[int, StateVector]:
        key = (f, s_word, lo_n, hi_n)
        got = self._cache.get(key)
        if got is not None:
            return got
        eng = self.engine
        W = self.W
        N = W.N
        s = StateVector(W, {s_word: W.ctx.one})
        k = self.field_pole_k(f.left, f.right)
        p = -f.n - 1
        if p < -k:
            out = {}                      # truncation: a(x)_n b(x) = 0, n >= k
            self._cache[key] = out
            return out
        l = eng._l_bound(k, s)
        rho = f.left.theta_exponent(N)
        Ln = l * N + rho
        inner_lo = self.support_min_n(f.right, s)
        inner_hi = hi_n + Ln + (p + k) * N
        T: dict[int, StateVector] = {}
        for e in range(inner_lo, inner_hi + 1):
            val = self.coeff(f.right, s, e)
            if val:
                T[e] = val
        rows = eng._rows(lambda st, gn: self.coeff(f.left, st, gn),
                         rho, k, l, [p], lo_n, hi_n, T,
                         f.theta_exponent(N) if N > 1 else None)
        out = rows[p]
        self._cache[key] = out
        return out

    def field_eval(self, f: LazyField, s: StateVector,
                   window: Window) -> VertexSlice:
        N = self.W.N
        lo, hi = window.bounds[0]
        lo_n, hi_n = ceil(lo * N), (hi * N).__floor__()
        out: dict[Fraction, StateVector] = {}
        for e in range(lo_n, hi_n + 1):
            acc = self.W.zero()
            for w, c in s.terms.items():
                if isinstance(f, ProductField):
                    part = self._mono_eval(f, w, lo_n, hi_n).get(e)
                else:
                    part = self.coeff(f, StateVector(self.W, {w: self.W.ctx.one}), e)
                if part:
                    acc = acc + part * c
            if acc:
                out[Fraction(e, N)] = acc
        vs = VarSet(("x",), N)
        series = FracSeries(vs, {(e,): st for e, st in out.items()},
                            support_class="lower_bounded_per_variable",
                            window=window)
        a_desc = StateVector(self.W)  # field slices carry no state label
        return VertexSlice(a_desc, s, window, series)


def state_field(engine: VertexEngine, a: Union[Word, str]) -> LazyField:
    """The product tree mirroring a monomial: generators combine through
    the -n products that build u_{-n}b."""
    if isinstance(a, str):
        a = parse_word(a)
    if not a:
        return IdentityField()
    g, b = a[0], a[1:]
    gen = GeneratorField(g.kind, g.color)
    if not b:
        if g.mode == -1:
            return gen
        return ProductField(gen, int(g.mode), IdentityField())
    return ProductField(gen, int(g.mode), state_field(engine, b))
