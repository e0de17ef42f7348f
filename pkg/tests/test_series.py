import random
from fractions import Fraction

import pytest

from qvertex.scalars import CycloContext
from qvertex.series import (
    FINITE, ITERATED, JOINT, FracSeries, SupportError, VarSet, Window, binom,
    binom_expand, delta_expand, derivative, residue, series_mul, subst_to_sum,
)

CTX = CycloContext(1)


def S(vars, terms, support=FINITE):
    ctx_terms = {k: CTX.from_rational(v) for k, v in terms.items()}
    return FracSeries(vars, ctx_terms, support)


def test_binom_values():
    assert binom(Fraction(1, 2), 0) == 1
    assert binom(Fraction(1, 2), 1) == Fraction(1, 2)
    assert binom(Fraction(1, 2), 2) == Fraction(-1, 8)
    assert binom(-3, 2) == 6
    assert binom(5, 7) == 0


def test_series_mul_polynomials():
    v = VarSet(("x0",))
    a = S(v, {(0,): 1, (1,): 1})
    b = S(v, {(0,): 1, (1,): -1})
    w = Window.cube(-2, 2, 1)
    prod = series_mul(a, b, w)
    assert prod.coeff(0) == CTX.one
    assert prod.coeff(2) == CTX.from_rational(-1)
    assert prod.coeff(1) is None


def test_series_mul_geometric_inverse():
    # (sum_{n>=0} x^n) * (1 - x) = 1 on [0, 10]
    v = VarSet(("x0",))
    geo = S(v, {(n,): 1 for n in range(0, 13)}, ITERATED)
    one_minus = S(v, {(0,): 1, (1,): -1})
    w = Window.cube(0, 10, 1)
    prod = series_mul(geo, one_minus, w)
    assert prod.coeff(0) == CTX.one
    for n in range(1, 11):
        assert prod.coeff(n) is None


def test_delta_times_x1_minus_x2_vanishes():
    # delta(x1/x2) = sum_n x1^n x2^(-n); times (x1 - x2) -> 0 inside window
    v = VarSet(("x1", "x2"))
    w = Window.cube(-4, 4, 2)
    delta = S(v, {(n, -n): 1 for n in range(-6, 7)}, JOINT)
    lin = S(v, {(1, 0): 1, (0, 1): -1})
    prod = series_mul(delta, lin, w)
    assert prod.is_empty()


def test_series_mul_rejects_two_operator_series():
    v = VarSet(("x0",))

    class FakeState:
        def __bool__(self):
            return True

    a = FracSeries(v, {(Fraction(0),): FakeState()})
    b = FracSeries(v, {(Fraction(0),): FakeState()})
    with pytest.raises(SupportError):
        series_mul(a, b, Window.cube(-1, 1, 1))


def test_binom_expand_linear_and_sqrt():
    v = VarSet(("x2", "x0"), N=2)
    w = Window.cube(-3, 3, 2)
    lin = binom_expand(v, ("x2", "x0"), +1, 1, w)
    assert lin.coeff(1, 0) == Fraction(1)
    assert lin.coeff(0, 1) == Fraction(1)
    half = binom_expand(v, ("x2", "x0"), +1, Fraction(1, 2), w)
    assert half.coeff(Fraction(1, 2), 0) == 1
    assert half.coeff(Fraction(-1, 2), 1) == Fraction(1, 2)
    assert half.coeff(Fraction(-3, 2), 2) == Fraction(-1, 8)


def test_binom_expand_group_law():
    # (x2+x0)^a (x2+x0)^b = (x2+x0)^(a+b), window-exact
    v = VarSet(("x2", "x0"), N=3)
    w = Window.cube(-6, 6, 2)
    wide = Window.cube(-20, 20, 2)
    rng = random.Random(7)
    for _ in range(6):
        a = Fraction(rng.randint(-9, 9), 3)
        b = Fraction(rng.randint(-9, 9), 3)
        fa = binom_expand(v, ("x2", "x0"), +1, a, wide)
        fb = binom_expand(v, ("x2", "x0"), +1, b, wide)
        fab = binom_expand(v, ("x2", "x0"), +1, a + b, w)
        # scalar-coefficient product
        sa = FracSeries(v, {k: CTX.from_rational(c) for k, c in fa.terms.items()}, ITERATED)
        sb = FracSeries(v, {k: CTX.from_rational(c) for k, c in fb.terms.items()}, ITERATED)
        prod = series_mul(sa, sb, w)
        for key, c in fab.terms.items():
            if not w.contains(key):
                continue
            got = prod.terms.get(tuple(key))
            assert got == CTX.from_rational(c), (a, b, key)
        for key in prod.terms:
            assert tuple(key) in fab.terms


def test_binom_inverse_cancels():
    # (x2+x0)^(-3) * (x2+x0)^3 = 1 up to x0^8
    v = VarSet(("x2", "x0"))
    w = Window.cube(-10, 8, 2)
    neg = binom_expand(v, ("x2", "x0"), +1, -3, w)
    pos = binom_expand(v, ("x2", "x0"), +1, 3, w)
    sa = FracSeries(v, {k: CTX.from_rational(c) for k, c in neg.terms.items()}, ITERATED)
    sb = FracSeries(v, {k: CTX.from_rational(c) for k, c in pos.terms.items()})
    prod = series_mul(sa, sb, Window.cube(-8, 8, 2))
    # the positive power is an exact cubic, so every window coefficient is exact
    assert prod.terms == {(Fraction(0), Fraction(0)): CTX.one}


def test_subst_linear():
    # F = x1 - x2 |-> x0 under x1 -> x2+x0
    v = VarSet(("x1", "x2"))
    F = S(v, {(1, 0): 1, (0, 1): -1})
    out = subst_to_sum(F, "x1->x2+x0", Window.cube(-4, 4, 2))
    assert out.coeff(1, 0) == CTX.one
    assert len(out.terms) == 1


def test_subst_sqrt():
    v = VarSet(("x1", "x2"), N=2)
    F = FracSeries(v, {(Fraction(1, 2), Fraction(0)): CTX.one})
    out = subst_to_sum(F, "x1->x2+x0", Window.cube(-4, 4, 2))
    assert out.coeff(0, Fraction(1, 2)) == CTX.one
    assert out.coeff(1, Fraction(-1, 2)) == CTX.one * Fraction(1, 2)
    assert out.coeff(2, Fraction(-3, 2)) == CTX.one * Fraction(-1, 8)


def test_subst_composition_identity():
    # x2 -> x1-x0 then x1 -> x2+x0 equals direct x1 -> x2+x0 (Remark-style law)
    rng = random.Random(3)
    v = VarSet(("x1", "x2"), N=2)
    w = Window.cube(-6, 6, 2)
    big = Window.cube(-40, 40, 2)
    for _ in range(5):
        terms = {}
        for _ in range(6):
            g = Fraction(rng.randint(-4, 8), 2)
            b = Fraction(rng.randint(-4, 8), 2)
            terms[(g, b)] = CTX.from_rational(rng.randint(1, 5))
        F = FracSeries(v, terms, JOINT)
        direct = subst_to_sum(F, "x1->x2+x0", w)
        mid = subst_to_sum(F, "x2->x1-x0", big)  # lives in (x0, x1)
        # second substitution x1 -> x2+x0; the spectator x0 exponent folds
        # into the x0 produced by the expansion
        total = {}
        for (e0, e1), c in mid.terms.items():
            i = 0
            while e0 + i <= w.hi(0):
                coef = binom(e1, i)
                if coef:
                    key = (e0 + i, e1 - i)
                    if w.contains(key):
                        cur = total.get(key, CTX.zero) + c * coef
                        total[key] = cur
                i += 1
        total = {k: v_ for k, v_ in total.items() if v_}
        assert direct.terms == total


def test_subst_injective_on_finite():
    rng = random.Random(11)
    v = VarSet(("x1", "x2"))
    w = Window.cube(-10, 10, 2)
    for _ in range(10):
        terms = {}
        for _ in range(4):
            terms[(rng.randint(-3, 3), rng.randint(-3, 3))] = CTX.from_rational(
                rng.randint(-4, 4))
        F = FracSeries(v, terms, FINITE)
        if F.is_empty():
            continue
        out = subst_to_sum(F, "x1->x2+x0", w)
        assert not out.is_empty()


def test_subst_support_precondition():
    v = VarSet(("x1", "x2"))
    F = FracSeries(v, {(Fraction(0), Fraction(0)): CTX.one}, ITERATED)
    with pytest.raises(SupportError):
        subst_to_sum(F, "x1->x2+x0", Window.cube(-2, 2, 2))


def test_delta_k1_k2_classical_annihilation():
    # (K1 - K2) * (x1 - x2)^(s+1) = 0 window-exact
    ctx = CTX
    w = Window.cube(-3, 3, 3)
    pad = Window.cube(-8, 8, 3)
    k1 = delta_expand("K1", pad, ctx)
    k2 = delta_expand("K2", pad, ctx)
    diff = k1 - k2
    v3 = diff.vars
    lin = FracSeries(v3, {(Fraction(0), Fraction(1), Fraction(0)): ctx.one,
                          (Fraction(0), Fraction(0), Fraction(1)): -ctx.one})
    prod = diff
    for _ in range(4):
        prod = series_mul(prod, lin, pad)
    for key, c in prod.terms.items():
        if w.contains(key):
            raise AssertionError(f"nonzero residual at {key}: {c}")


def test_delta_k1_residue_in_x0():
    # Res_x0 K1 picks the n=0 row (x1-x2)^0 = 1
    ctx = CTX
    w = Window.cube(-3, 3, 3)
    k1 = delta_expand("K1", w, ctx)
    r = residue(k1, "x0")
    assert r.terms == {(Fraction(0), Fraction(0)): ctx.one}


def test_delta_k3_reduces_to_classical_at_N1():
    ctx = CTX
    w = Window.cube(-3, 3, 3)
    k3 = delta_expand("K3", w, ctx, N=1, j=0)
    # x2^{-1} delta((x1-x0)/x2) = sum_n (x1-x0)^n x2^(-n-1)
    assert k3.coeff(0, 0, -1) == ctx.one          # n = 0
    assert k3.coeff(0, 1, -2) == ctx.one          # n = 1, t = 0
    assert k3.coeff(1, 0, -2) == -ctx.one         # n = 1, t = 1
    assert k3.coeff(1, -2, 0) == ctx.one          # n = -1, t = 1: C(-1,1)(-1)^1 = 1


def test_delta_k3_orthogonality_sum():
    # sum_j (1/N) K3(j) keeps exactly the exponents n in N*Z
    M, N = 6, 3
    ctx = CycloContext(M)
    w = Window.cube(-3, 3, 3)
    total = None
    for j in range(N):
        k = delta_expand("K3", w, ctx, N=N, j=j)
        total = k if total is None else total + k
    scaled = total.scale(ctx.from_rational(Fraction(1, N)))
    classical = delta_expand("K3", w, CycloContext(1), N=1, j=0)
    got = {k: v for k, v in scaled.terms.items()}
    want = {k: ctx.from_coeffs([c.coeffs[0]] + [0] * (ctx.degree - 1))
            for k, c in classical.terms.items()}
    assert got == want


def test_residue_examples():
    v = VarSet(("x0",))
    F = S(v, {(-1,): 3, (0,): 5, (2,): 7})
    r = residue(F, "x0")
    assert r.coeff(0) == CTX.from_rational(3)


def test_derivative_power_rule():
    v = VarSet(("x0",), N=2)
    F = FracSeries(v, {(Fraction(1, 2),): CTX.one, (Fraction(0),): CTX.from_rational(9)})
    d = derivative(F, "x0")
    assert d.coeff(Fraction(-1, 2)) == CTX.one * Fraction(1, 2)
    assert len(d.terms) == 1


def test_derivative_matches_binomial_shift():
    # d/dx0 of (x2+x0)^(1/2) = (1/2)(x2+x0)^(-1/2), window-exact
    v = VarSet(("x2", "x0"), N=2)
    w = Window.cube(-6, 6, 2)
    f = binom_expand(v, ("x2", "x0"), +1, Fraction(1, 2), w)
    fs = FracSeries(v, {k: CTX.from_rational(c) for k, c in f.terms.items()}, ITERATED)
    lhs = derivative(fs, "x0")
    g = binom_expand(v, ("x2", "x0"), +1, Fraction(-1, 2), w)
    for key, c in lhs.terms.items():
        want = binom(Fraction(-1, 2), int(key[1])) * Fraction(1, 2)
        assert c == CTX.from_rational(want)
    # and term-for-term against the shifted expansion scaled by 1/2
    gs = {(k[0], k[1]): CTX.from_rational(c * Fraction(1, 2)) for k, c in g.terms.items()}
    for key, c in lhs.terms.items():
        assert gs.get(tuple(key)) == c
