from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qvertex.scalars import CycloContext, cyclotomic_polynomial, scalar_arith, scalar_inv


def coeffs(M):
    d = CycloContext(M).degree
    rat = st.builds(
        Fraction,
        st.integers(min_value=-30, max_value=30),
        st.integers(min_value=1, max_value=7),
    )
    return st.tuples(*([rat] * d))


def test_cyclotomic_small_orders():
    assert cyclotomic_polynomial(1) == (Fraction(-1), Fraction(1))
    assert cyclotomic_polynomial(2) == (Fraction(1), Fraction(1))
    assert cyclotomic_polynomial(4) == (Fraction(1), Fraction(0), Fraction(1))
    assert cyclotomic_polynomial(8) == (
        Fraction(1), Fraction(0), Fraction(0), Fraction(0), Fraction(1))
    assert cyclotomic_polynomial(3) == (Fraction(1), Fraction(1), Fraction(1))
    assert cyclotomic_polynomial(12) == (
        Fraction(1), Fraction(0), Fraction(-1), Fraction(0), Fraction(1))


def test_phi_divides_x_M_minus_1():
    # Phi_M * prod(Phi_d) == x^M - 1, so zeta^M == 1 in the quotient.
    for M in (1, 2, 3, 4, 6, 8, 12):
        ctx = CycloContext(M)
        z = ctx.zeta()
        p = ctx.one
        for _ in range(M):
            p = p * z
        assert p == ctx.one
        # primitivity: zeta^d != 1 for proper divisors d
        for d in range(1, M):
            if M % d == 0:
                assert ctx.zeta(d) != ctx.one


def test_zeta4_squares_to_minus_one():
    ctx = CycloContext(4)
    assert ctx.zeta() * ctx.zeta() == ctx.from_rational(-1)


def test_m8_reduction():
    ctx = CycloContext(8)
    z2 = ctx.zeta(2)
    assert z2 * z2 == ctx.from_rational(-1)  # zeta^4 = -1 mod x^4+1


@settings(max_examples=60)
@given(coeffs(8), coeffs(8), coeffs(8))
def test_field_laws_M8(a, b, c):
    ctx = CycloContext(8)
    x, y, z = ctx.from_coeffs(a), ctx.from_coeffs(b), ctx.from_coeffs(c)
    assert (x + y) + z == x + (y + z)
    assert x * y == y * x
    assert (x * y) * z == x * (y * z)
    assert x * (y + z) == x * y + x * z


@settings(max_examples=40)
@given(coeffs(12))
def test_inverse_M12(a):
    ctx = CycloContext(12)
    x = ctx.from_coeffs(a)
    if x.is_zero:
        with pytest.raises(ZeroDivisionError):
            x.inverse()
    else:
        assert x * x.inverse() == ctx.one


def test_inverse_examples():
    ctx = CycloContext(4)
    assert scalar_inv(ctx.one) == ctx.one
    # zeta_4^{-1} = -zeta_4
    assert scalar_inv(ctx.zeta()) == -ctx.zeta()
    assert scalar_inv(ctx.from_rational(2)) == ctx.from_rational(Fraction(1, 2))


def test_root_of_unity_orthogonality():
    # (1/N) sum_j omega^(jn) = [n = 0 mod N], for |n| <= 4N
    for M, N in ((2, 2), (6, 3), (4, 4), (12, 6)):
        ctx = CycloContext(M)
        for n in range(-4 * N, 4 * N + 1):
            tot = ctx.zero
            for j in range(N):
                tot = tot + ctx.root_of_unity(N, j * n)
            expect = ctx.from_rational(N if n % N == 0 else 0)
            assert tot == expect


def test_root_of_unity_requires_divisor():
    ctx = CycloContext(4)
    with pytest.raises(ValueError):
        ctx.root_of_unity(3)
    assert ctx.root_of_unity(2) == ctx.from_rational(-1)
    assert ctx.root_of_unity(2, 0) == ctx.one


def test_omega_has_exact_order():
    ctx = CycloContext(12)
    w = ctx.root_of_unity(6)
    p = ctx.one
    for k in range(1, 6):
        p = p * w
        assert p != ctx.one
    assert p * w == ctx.one


def test_literal_roundtrip_and_shorthand():
    ctx = CycloContext(4)
    x = ctx.parse("2ζ - 1/2")
    assert x == ctx.from_coeffs([Fraction(-1, 2), Fraction(2)])
    assert ctx.parse(x.literal()) == x
    assert ctx.parse("-1") == ctx.from_rational(-1)
    assert ctx.parse("zeta^2") == ctx.from_rational(-1)
    with pytest.raises(ValueError):
        ctx.parse("3x")


def test_scalar_arith_dispatch():
    ctx = CycloContext(1)
    two, three = ctx.from_rational(2), ctx.from_rational(3)
    assert scalar_arith("add", two, three) == ctx.from_rational(5)
    assert scalar_arith("sub", two, three) == ctx.from_rational(-1)
    assert scalar_arith("mul", two, three) == ctx.from_rational(6)
    assert scalar_arith("neg", two) == ctx.from_rational(-2)
    with pytest.raises(ValueError):
        scalar_arith("pow", two, three)


def test_context_mismatch_raises():
    a = CycloContext(4).one
    b = CycloContext(8).one
    with pytest.raises(ValueError):
        _ = a + b
