"""Vacuum modules: the untwisted module (N=1, the algebra acting on itself
mod the annihilator ideal) and the twisted vacuum module on the fractional
lattice.  Annihilators are exactly the modes >= 0; basis states are
canonical creator words applied to the vacuum.
"""
from __future__ import annotations

from fractions import Fraction
from math import ceil
from typing import Iterable, Optional, Union

from .algebra import (
    KIND_X, KIND_Y, GenMode, QMatrix, Word, format_word, insert_factor,
    parse_word, theta_scale, valid_mode,
)
from .scalars import Scalar


class StateVector:
    """Finite scalar combination of creator basis words applied to |0>."""

    __slots__ = ("module", "terms")

    def __init__(self, module: "FockModule", terms=None):
        self.module = module
        self.terms: dict[Word, Scalar] = {w: c for w, c in (terms or {}).items() if c}

    def __bool__(self) -> bool:
        return bool(self.terms)

    @property
    def is_zero(self) -> bool:
        return not self.terms

    def __add__(self, other: "StateVector") -> "StateVector":
        if other.module is not self.module:
            raise ValueError("states from different modules")
        out = dict(self.terms)
        for w, c in other.terms.items():
            cur = out.get(w)
            s = c if cur is None else cur + c
            if s:
                out[w] = s
            elif w in out:
                del out[w]
        return StateVector(self.module, out)

    def __sub__(self, other: "StateVector") -> "StateVector":
        return self + (-other)

    def __neg__(self) -> "StateVector":
        return StateVector(self.module, {w: -c for w, c in self.terms.items()})

    def __mul__(self, c) -> "StateVector":
        if not c:
            return StateVector(self.module)
        return StateVector(self.module, {w: v * c for w, v in self.terms.items()})

    __rmul__ = __mul__

    def __eq__(self, other) -> bool:
        return (isinstance(other, StateVector) and other.module is self.module
                and other.terms == self.terms)

    def __repr__(self) -> str:
        if not self.terms:
            return "0"
        return " + ".join(f"({c})*{format_word(w)}|0>"
                          for w, c in sorted(self.terms.items()))

    def literal(self) -> dict[str, list[str]]:
        return {format_word(w) + " |0>": c.literal()
                for w, c in sorted(self.terms.items())}


class FockModule:
    """Vacuum module over the mode lattice with denominator N."""

    def __init__(self, Q: QMatrix, N: int = 1):
        if N < 1:
            raise ValueError("N must be a positive integer")
        if Q.ctx.M % N != 0:
            raise ValueError(f"twist order N={N} requires N | M={Q.ctx.M}")
        self.Q = Q
        self.N = N
        self.ctx = Q.ctx
        self._insert_cache: dict[tuple[GenMode, Word], dict[Word, Scalar]] = {}

    # -- construction ------------------------------------------------------
    def vacuum(self) -> StateVector:
        return StateVector(self, {(): self.ctx.one})

    def zero(self) -> StateVector:
        return StateVector(self)

    def state(self, word: Union[str, Word]) -> StateVector:
        if isinstance(word, str):
            word = parse_word(word.replace("|0>", "").strip())
        for g in word:
            if not valid_mode(g, self.N):
                raise ValueError(f"{g!r} is off the N={self.N} lattice")
            if g.mode >= 0:
                raise ValueError(f"{g!r} is an annihilator, not a basis factor")
        return StateVector(self, {tuple(word): self.ctx.one})

    # -- module action -----------------------------------------------------
    def apply_mode(self, g: GenMode, s: StateVector) -> StateVector:
        if s.module is not self:
            raise ValueError("state belongs to a different module")
        if not valid_mode(g, self.N):
            raise ValueError(f"{g!r} is off the N={self.N} lattice")
        out: dict[Word, Scalar] = {}
        for w, c in s.terms.items():
            key = (g, w)
            red = self._insert_cache.get(key)
            if red is None:
                red = insert_factor(self.Q, g, w, module_mode=True)
                self._insert_cache[key] = red
            for w2, c2 in red.items():
                cur = out.get(w2)
                t = c * c2 if cur is None else cur + c * c2
                if t:
                    out[w2] = t
                elif w2 in out:
                    del out[w2]
        return StateVector(self, out)

    def apply_word(self, word: Word, s: StateVector) -> StateVector:
        for g in reversed(word):
            s = self.apply_mode(g, s)
        return s

    def theta(self, s: StateVector) -> StateVector:
        """The order-N automorphism: each basis word scales by its
        theta eigenvalue omega_N^(#X - #Y)."""
        out = {w: c * theta_scale(w, self.N, self.ctx) for w, c in s.terms.items()}
        return StateVector(self, out)

    # -- bookkeeping -------------------------------------------------------
    @staticmethod
    def word_weight(word: Word) -> Fraction:
        return sum((-g.mode - Fraction(1, 2) for g in word), Fraction(0))

    def weight(self, s: StateVector):
        """Common weight of the monomials (sum of -mode-1/2 per factor),
        or "mixed"."""
        ws = {self.word_weight(w) for w in s.terms}
        if not ws:
            return Fraction(0)
        if len(ws) == 1:
            return ws.pop()
        return "mixed"

    def annihilation_bound(self, s: StateVector) -> Fraction:
        """B with: any generator mode m > B kills s.  Exact pairing bound:
        an annihilator survives only by pairing a factor of mode -m-1."""
        best = Fraction(0)
        for w in s.terms:
            for g in w:
                cand = -g.mode - 1
                if cand > best:
                    best = cand
        return best

    def min_factor_mode(self, s: StateVector) -> Fraction:
        m = Fraction(0)
        for w in s.terms:
            for g in w:
                if g.mode < m:
                    m = g.mode
        return m

    def generator_support_min(self, kind: int, color: int,
                              s: StateVector) -> Fraction:
        """Certified lower bound for the x-support of the generator field
        (kind,color) applied to s: exponents are -m-1 over modes m that can
        act without killing s."""
        # largest creator mode on this kind's lattice
        top = Fraction(1, self.N) - 1 if kind == KIND_X else Fraction(-1, self.N)
        best = top
        other = KIND_Y if kind == KIND_X else KIND_X
        for w in s.terms:
            for g in w:
                if g.kind == other and g.color == color:
                    cand = -g.mode - 1
                    if cand > best:
                        best = cand
        return -best - 1

    # -- enumeration -------------------------------------------------------
    def creator_modes(self, kind: int, floor: Fraction) -> list[Fraction]:
        base = Fraction(1, self.N) if kind == KIND_X else Fraction(-1, self.N)
        out = []
        k = 0
        while base - k >= floor:
            if base - k < 0:
                out.append(base - k)
            k += 1
        return sorted(out)

    def basis_words(self, depth: int, mode_floor) -> list[Word]:
        """All canonical creator words with at most `depth` factors and every
        mode >= mode_floor, in deterministic order."""
        floor = Fraction(mode_floor)
        slots = []
        for kind in (KIND_X, KIND_Y):
            for color in range(1, self.Q.r + 1):
                modes = self.creator_modes(kind, floor)
                q = self.Q.q(color, color)
                slots.append((kind, color, modes, q))
        one = self.ctx.one
        words: list[Word] = []

        def extend(slot_idx: int, prefix: list[GenMode], budget: int):
            if slot_idx == len(slots):
                words.append(tuple(prefix))
                return
            kind, color, modes, q = slots[slot_idx]
            if q == one:
                choices = self._multisets(modes, budget)
            elif (q * q) == one:
                choices = self._subsets(modes, budget)
            else:
                choices = [[]] + [[m] for m in modes]
            for ch in choices:
                if len(ch) <= budget:
                    extend(slot_idx + 1,
                           prefix + [GenMode(kind, color, m) for m in ch],
                           budget - len(ch))

        extend(0, [], depth)
        return sorted(set(words), key=lambda w: (len(w), w))

    @staticmethod
    def _multisets(modes, k):
        out = [[]]
        frontier = [[]]
        for _ in range(k):
            nxt = []
            for ms in frontier:
                start = modes.index(ms[-1]) if ms else 0
                for m in modes[start:]:
                    nxt.append(ms + [m])
            out.extend(nxt)
            frontier = nxt
        return out

    @staticmethod
    def _subsets(modes, k):
        out = [[]]
        frontier = [[]]
        for _ in range(k):
            nxt = []
            for ms in frontier:
                start = modes.index(ms[-1]) + 1 if ms else 0
                for m in modes[start:]:
                    nxt.append(ms + [m])
            out.extend(nxt)
            frontier = nxt
        return out

    def basis_words_by_weight(self, max_weight) -> list[Word]:
        """All basis words of weight <= max_weight; requires every creator
        to have positive weight (true for N <= 2)."""
        wmax = Fraction(max_weight)
        min_shift = Fraction(1, 2) - Fraction(1, self.N) if self.N > 1 else Fraction(1, 2)
        if min_shift <= 0:
            raise ValueError("weight enumeration needs positive creator weights")
        floor = -wmax - Fraction(1, 2)
        depth = int(wmax / min_shift)
        return [w for w in self.basis_words(depth, floor)
                if self.word_weight(w) <= wmax]

    # -- optional diagnostics ------------------------------------------------
    def graded_submodule_scan(self, depth: int = 2, mode_floor=-2) -> list[StateVector]:
        """Low-depth scan for singular vectors (states killed by every
        annihilator up to the pairing bound).  Reports candidates only;
        asserts nothing about irreducibility."""
        found = []
        for w in self.basis_words(depth, mode_floor):
            if not w:
                continue
            s = self.state(w)
            bound = self.annihilation_bound(s)
            killed = True
            for kind in (KIND_X, KIND_Y):
                base = Fraction(1, self.N) if kind == KIND_X else Fraction(-1, self.N)
                for color in range(1, self.Q.r + 1):
                    m = base - (base.__floor__())  # smallest annihilator mode
                    while killed and m <= bound:
                        if self.apply_mode(GenMode(kind, color, m), s):
                            killed = False
                        m += 1
                    if not killed:
                        break
                if not killed:
                    break
            if killed:
                found.append(s)
        return found


def vacuum(module: FockModule) -> StateVector:
    return module.vacuum()


def apply_mode(g: GenMode, s: StateVector) -> StateVector:
    return s.module.apply_mode(g, s)


def weight(s: StateVector):
    return s.module.weight(s)


def annihilation_bound(s: StateVector) -> Fraction:
    return s.module.annihilation_bound(s)
