"""Words and normal ordering for the q-oscillator algebras.

Generators X_{i,m}, Y_{i,n} subject to

    X_{i,m} X_{j,n} = q_ij X_{j,n} X_{i,m}
    Y_{i,m} Y_{j,n} = q_ij Y_{j,n} Y_{i,m}
    X_{i,m} Y_{j,n} - q_ji Y_{j,n} X_{i,m} = delta_ij delta_{m+n+1,0}

on the integer mode lattice (untwisted) or on 1/N + Z for X and -1/N + Z
for Y (the twisted algebra).  Canonical words have all X factors before all
Y factors, each kind sorted by (color, mode); every delta correction comes
from an X/Y crossing.
"""
from __future__ import annotations

import re
from fractions import Fraction
from typing import Optional

from .scalars import CycloContext, Scalar

KIND_X = 0
KIND_Y = 1
_KIND_NAMES = ("X", "Y")


class GenMode:
    """A generator mode; hash precomputed (these sit in hot dict keys)."""

    __slots__ = ("kind", "color", "mode", "_hash")

    def __init__(self, kind: int, color: int, mode):
        self.kind = kind
        self.color = color
        self.mode = Fraction(mode)
        self._hash = hash((kind, color, self.mode))

    def __hash__(self) -> int:
        return self._hash

    def __eq__(self, other) -> bool:
        return (self._hash == other._hash and self.kind == other.kind
                and self.color == other.color and self.mode == other.mode)

    def __lt__(self, other) -> bool:
        return (self.kind, self.color, self.mode) < \
            (other.kind, other.color, other.mode)

    def __le__(self, other) -> bool:
        return (self.kind, self.color, self.mode) <= \
            (other.kind, other.color, other.mode)

    def __repr__(self) -> str:
        return f"{_KIND_NAMES[self.kind]}[{self.color},{self.mode}]"


Word = tuple  # tuple[GenMode, ...]


def X(color: int, mode) -> GenMode:
    return GenMode(KIND_X, color, Fraction(mode))


def Y(color: int, mode) -> GenMode:
    return GenMode(KIND_Y, color, Fraction(mode))


_WORD_TOKEN = re.compile(r"([XY])\[(\d+),(-?\d+(?:/\d+)?)\]")


def parse_word(text: str) -> Word:
    """Parse a word literal like "X[1,-1] Y[2,-3/2]"; "1" is the empty word."""
    s = text.strip()
    if s in ("", "1"):
        return ()
    out = []
    pos = 0
    for m in _WORD_TOKEN.finditer(s):
        if s[pos:m.start()].strip():
            raise ValueError(f"bad word literal {text!r}")
        kind = KIND_X if m.group(1) == "X" else KIND_Y
        out.append(GenMode(kind, int(m.group(2)), Fraction(m.group(3))))
        pos = m.end()
    if s[pos:].strip():
        raise ValueError(f"bad word literal {text!r}")
    return tuple(out)


def format_word(word: Word) -> str:
    return " ".join(repr(g) for g in word) if word else "1"


class QMatrix:
    """The structure matrix Q = (q_ij); entries are nonzero Scalars with
    q_ij q_ji = 1 off the diagonal.  delta_sign is a test hook that flips
    the sign of the X/Y pairing (negative-control fixtures)."""

    def __init__(self, ctx: CycloContext, entries, delta_sign: int = 1):
        self.ctx = ctx
        self.r = len(entries)
        self._q = []
        for i, row in enumerate(entries):
            if len(row) != self.r:
                raise ValueError("Q must be square")
            srow = []
            for j, e in enumerate(row):
                s = ctx.parse(e) if not isinstance(e, Scalar) else e
                if s.is_zero:
                    raise ValueError(f"q[{i + 1}][{j + 1}] must be nonzero")
                srow.append(s)
            self._q.append(srow)
        for i in range(self.r):
            for j in range(self.r):
                if i != j and self._q[i][j] * self._q[j][i] != ctx.one:
                    raise ValueError(
                        f"q[{i + 1}][{j + 1}]*q[{j + 1}][{i + 1}] != 1")
        self._qinv = [[s.inverse() for s in row] for row in self._q]
        self.delta_sign = delta_sign

    def q(self, i: int, j: int) -> Scalar:
        return self._q[i - 1][j - 1]

    def qinv(self, i: int, j: int) -> Scalar:
        return self._qinv[i - 1][j - 1]

    def diagonal(self) -> list[Scalar]:
        return [self._q[i][i] for i in range(self.r)]


def valid_mode(g: GenMode, N: int) -> bool:
    if g.kind == KIND_X:
        target = Fraction(1, N)
    else:
        target = Fraction(-1, N)
    return (g.mode - target).denominator == 1


def lattice_check(word: Word, N: int) -> bool:
    return all(valid_mode(g, N) for g in word)


def theta_scale(word: Word, N: int, ctx: CycloContext) -> Scalar:
    """Eigenvalue of theta_N on a word: omega_N^(#X - #Y)."""
    e = sum(1 if g.kind == KIND_X else -1 for g in word)
    return ctx.root_of_unity(N, e % N)


def braid(Q: QMatrix, g: GenMode, h: GenMode) -> Scalar:
    """Scalar picked up when g moves right past h (g h -> braid * h g).

    Same-kind same-color pairs keep only the relation instances with
    ascending modes (X_{i,m}X_{i,n} = q_ii X_{i,n}X_{i,m} for m < n); the
    delta-pairing hexagon forces this orientation, and for q_ii = +/-1 it
    agrees with the full two-sided family.
    """
    if g.kind == h.kind:
        if g.color != h.color:
            return Q.q(g.color, h.color)
        if g.mode < h.mode:
            return Q.q(g.color, g.color)
        return Q.qinv(g.color, g.color)
    if g.kind == KIND_X:
        return Q.q(h.color, g.color)      # X_i Y_j = q_ji Y_j X_i + delta
    return Q.qinv(g.color, h.color)       # Y_i X_j = q_ij^{-1}(X_j Y_i - d)


def delta_term(Q: QMatrix, g: GenMode, h: GenMode) -> Optional[Scalar]:
    """Delta correction when g crosses h, or None if the pairing is silent."""
    if g.kind == h.kind or g.color != h.color:
        return None
    if g.mode + h.mode + 1 != 0:
        return None
    one = Q.ctx.from_rational(Q.delta_sign)
    if g.kind == KIND_X:
        return one
    return -one * Q.qinv(g.color, h.color)


def _key(g: GenMode):
    return (g.kind, g.color, g.mode)


def admissible(Q: QMatrix, word: Word) -> bool:
    """No forbidden squares: a repeated factor X_{i,m}X_{i,m} (or Y^2)
    vanishes whenever q_ii != 1, since the relation gives (1-q_ii)X^2 = 0."""
    one = Q.ctx.one
    for a in range(len(word) - 1):
        g, h = word[a], word[a + 1]
        if g == h and Q.q(g.color, g.color) != one:
            return False
    return True


def insert_factor(Q: QMatrix, g: GenMode, word: Word,
                  module_mode: bool) -> dict[Word, Scalar]:
    """Multiply g onto the left of a canonical word and renormalize.

    In module mode annihilators (mode >= 0) walk to the vacuum and die;
    otherwise g is placed at its canonical position.  Delta corrections
    fire at every X/Y crossing with matching color and modes summing to -1.
    """
    ctx = Q.ctx
    out: dict[Word, Scalar] = {}

    def add(w: Word, c: Scalar):
        if not c:
            return
        cur = out.get(w)
        s = c if cur is None else cur + c
        if s:
            out[w] = s
        elif w in out:
            del out[w]

    acc = ctx.one
    walker = module_mode and g.mode >= 0
    gk = _key(g)
    i = 0
    while i < len(word):
        f = word[i]
        if not walker and gk <= _key(f):
            break
        d = delta_term(Q, g, f)
        if d is not None:
            add(word[:i] + word[i + 1:], acc * d)
        acc = acc * braid(Q, g, f)
        i += 1
    if not walker:
        placed = word[:i] + (g,) + word[i:]
        if admissible(Q, placed):
            add(placed, acc)
    return out


class NormalSum:
    """Scalar combination of canonical words (the PBW normal form)."""

    __slots__ = ("terms",)

    def __init__(self, terms: Optional[dict[Word, Scalar]] = None):
        self.terms = {w: c for w, c in (terms or {}).items() if c}

    def is_zero(self) -> bool:
        return not self.terms

    def __eq__(self, other) -> bool:
        return isinstance(other, NormalSum) and other.terms == self.terms

    def __repr__(self) -> str:
        if not self.terms:
            return "0"
        return " + ".join(f"({c})*{format_word(w)}"
                          for w, c in sorted(self.terms.items()))


def normal_order(word: Word, Q: QMatrix) -> NormalSum:
    """PBW normal form of a word in the algebra (no vacuum reduction)."""
    acc: dict[Word, Scalar] = {(): Q.ctx.one}
    for g in reversed(word):
        nxt: dict[Word, Scalar] = {}
        for w, c in acc.items():
            for w2, c2 in insert_factor(Q, g, w, module_mode=False).items():
                s = nxt.get(w2)
                t = c * c2 if s is None else s + c * c2
                if t:
                    nxt[w2] = t
                elif w2 in nxt:
                    del nxt[w2]
        acc = nxt
    return NormalSum(acc)


def _violation_positions(Q: QMatrix, word: Word) -> list[int]:
    pos = []
    for i in range(len(word) - 1):
        g, h = word[i], word[i + 1]
        if _key(g) > _key(h):
            pos.append(i)
        elif g == h and Q.q(g.color, g.color) != Q.ctx.one:
            pos.append(i)
    return pos


def naive_normal_order(word: Word, Q: QMatrix, strategy: str = "left") -> NormalSum:
    """Reference rewriting engine: repeatedly fix one adjacent violation.

    strategy picks the leftmost or rightmost violating position; used to
    exercise confluence against the production insertion fold.
    """
    ctx = Q.ctx
    acc: dict[Word, Scalar] = {word: ctx.one}
    done: dict[Word, Scalar] = {}

    def add(d, w, c):
        cur = d.get(w)
        s = c if cur is None else cur + c
        if s:
            d[w] = s
        elif w in d:
            del d[w]

    while acc:
        w, c = next(iter(sorted(acc.items()))) if strategy == "left" \
            else sorted(acc.items())[-1]
        del acc[w]
        pos = _violation_positions(Q, w)
        if not pos:
            if admissible(Q, w):
                add(done, w, c)
            continue
        i = pos[0] if strategy == "left" else pos[-1]
        g, h = w[i], w[i + 1]
        if g == h and Q.q(g.color, g.color) != ctx.one:
            continue  # forbidden square: the word is zero
        swapped = w[:i] + (h, g) + w[i + 2:]
        add(acc, swapped, c * braid(Q, g, h))
        d = delta_term(Q, g, h)
        if d is not None:
            add(acc, w[:i] + w[i + 2:], c * d)
    return NormalSum(done)
