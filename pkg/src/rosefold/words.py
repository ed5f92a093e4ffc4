"""Freely reduced words, cyclic words, and Nielsen moves on tuples.

Letters are signed integers: +g is the g-th generator, -g its formal
inverse, 1 <= g <= rank.  The empty word is a valid word at every rank,
so stabilized tuples (entries equal to the identity) are representable.

Text encoding: space-separated tokens ``a3`` / ``a3^-1``; the rank is
carried separately.  ``1`` is accepted as an alias for the empty word.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from typing import Iterator, Sequence


def check_letter(letter: int, rank: int) -> None:
    if letter == 0 or abs(letter) > rank:
        raise ValueError(f"letter {letter} outside rank-{rank} alphabet")


def letter_key(letter: int) -> tuple[int, int]:
    """Total order on letters: by generator, positive sign first."""
    return (abs(letter), 0 if letter > 0 else 1)


@dataclass(frozen=True)
class Word:
    """A freely reduced word over a rank-n alphabet."""

    rank: int
    letters: tuple[int, ...] = ()

    def __post_init__(self) -> None:
        if self.rank < 1:
            raise ValueError("rank must be >= 1")
        prev = 0
        for letter in self.letters:
            check_letter(letter, self.rank)
            if letter == -prev:
                raise ValueError("word is not freely reduced")
            prev = letter

    def __len__(self) -> int:
        return len(self.letters)

    def __iter__(self) -> Iterator[int]:
        return iter(self.letters)

    def __bool__(self) -> bool:
        return bool(self.letters)

    def __mul__(self, other: "Word") -> "Word":
        if self.rank != other.rank:
            raise ValueError("rank mismatch")
        return free_reduce(self.rank, self.letters + other.letters)

    def inverse(self) -> "Word":
        return Word(self.rank, tuple(-l for l in reversed(self.letters)))

    def subword(self, start: int, stop: int) -> "Word":
        return Word(self.rank, self.letters[start:stop])

    def key(self) -> tuple[tuple[int, int], ...]:
        return tuple(letter_key(l) for l in self.letters)

    @property
    def is_cyclically_reduced(self) -> bool:
        return len(self.letters) < 2 or self.letters[0] != -self.letters[-1]

    def __str__(self) -> str:
        return format_word(self)


def empty_word(rank: int) -> Word:
    return Word(rank, ())


def free_reduce(rank: int, letters: Sequence[int]) -> Word:
    """Cancel adjacent inverse pairs until none remain."""
    stack: list[int] = []
    for letter in letters:
        check_letter(letter, rank)
        if stack and stack[-1] == -letter:
            stack.pop()
        else:
            stack.append(letter)
    return Word(rank, tuple(stack))


def _least_rotation(letters: tuple[int, ...]) -> int:
    """Index of the lexicographically least rotation (Booth-style scan)."""
    if not letters:
        return 0
    keys = [letter_key(l) for l in letters]
    best = 0
    for cand in range(1, len(letters)):
        for off in range(len(letters)):
            a = keys[(best + off) % len(letters)]
            b = keys[(cand + off) % len(letters)]
            if a != b:
                if b < a:
                    best = cand
                break
    return best


@dataclass(frozen=True)
class CyclicWord:
    """A cyclically reduced word stored via its canonical rotation.

    The representative is the lexicographically least rotation, comparing
    (generator, sign) pairs, which makes equality of conjugacy classes of
    cyclically reduced words a plain dataclass equality.
    """

    word: Word

    def __post_init__(self) -> None:
        if not self.word.is_cyclically_reduced:
            raise ValueError("representative is not cyclically reduced")
        if _least_rotation(self.word.letters) != 0:
            raise ValueError("representative is not the canonical rotation")

    @classmethod
    def from_cyclically_reduced(cls, word: Word) -> "CyclicWord":
        k = _least_rotation(word.letters)
        return cls(Word(word.rank, word.letters[k:] + word.letters[:k]))

    def __len__(self) -> int:
        return len(self.word)

    @property
    def rank(self) -> int:
        return self.word.rank

    def rotations(self) -> Iterator[Word]:
        letters = self.word.letters
        for k in range(max(1, len(letters))):
            yield Word(self.word.rank, letters[k:] + letters[:k])

    def inverse(self) -> "CyclicWord":
        return CyclicWord.from_cyclically_reduced(self.word.inverse())

    def __str__(self) -> str:
        return format_word(self.word)


def cyclic_reduce(word: Word) -> tuple[CyclicWord, Word]:
    """Split ``word`` as conjugator * core * conjugator^-1.

    Returns the canonical cyclic word and the conjugator, so that the
    input equals conjugator * representative * conjugator.inverse() in
    the free group.
    """
    letters = list(word.letters)
    prefix: list[int] = []
    while len(letters) >= 2 and letters[0] == -letters[-1]:
        prefix.append(letters[0])
        letters = letters[1:-1]
    core = tuple(letters)
    k = _least_rotation(core)
    conjugator = free_reduce(word.rank, tuple(prefix) + core[:k])
    cyclic = CyclicWord(Word(word.rank, core[k:] + core[:k]))
    return cyclic, conjugator


def commutator_class(g1: Word, g2: Word) -> CyclicWord:
    """Canonical form of the conjugacy class of [g1, g2] up to inversion."""
    if g1.rank != g2.rank:
        raise ValueError("rank mismatch")
    comm = g1 * g2 * g1.inverse() * g2.inverse()
    cyc, _ = cyclic_reduce(comm)
    inv = cyc.inverse()
    return min(cyc, inv, key=lambda c: c.word.key())


@dataclass(frozen=True)
class GenTuple:
    """An ordered tuple of words sharing one rank."""

    rank: int
    entries: tuple[Word, ...]

    def __post_init__(self) -> None:
        for w in self.entries:
            if w.rank != self.rank:
                raise ValueError("tuple entries must share one rank")

    @property
    def arity(self) -> int:
        return len(self.entries)

    def __iter__(self) -> Iterator[Word]:
        return iter(self.entries)


def standard_tuple(rank: int, arity: int | None = None) -> GenTuple:
    """(a_1, ..., a_n, 1, ..., 1) padded with identities up to ``arity``."""
    if arity is None:
        arity = rank
    if arity < rank:
        raise ValueError("arity must be >= rank")
    entries = [Word(rank, (g,)) for g in range(1, rank + 1)]
    entries += [empty_word(rank)] * (arity - rank)
    return GenTuple(rank, tuple(entries))


@dataclass(frozen=True)
class NielsenMove:
    """Elementary move on a tuple: invert one entry, swap two, or
    multiply one entry by another (or its inverse) on the right."""

    kind: str  # "invert" | "swap" | "multiply"
    i: int
    j: int | None = None
    exponent: int = 1

    def __post_init__(self) -> None:
        if self.kind not in ("invert", "swap", "multiply"):
            raise ValueError(f"unknown move kind {self.kind!r}")
        if self.kind == "invert":
            if self.j is not None:
                raise ValueError("invert takes a single index")
        else:
            if self.j is None or self.j == self.i:
                raise ValueError(f"{self.kind} needs two distinct indices")
        if self.kind == "multiply" and self.exponent not in (1, -1):
            raise ValueError("exponent must be +1 or -1")

    def inverse(self) -> "NielsenMove":
        if self.kind == "multiply":
            return NielsenMove("multiply", self.i, self.j, -self.exponent)
        return self


def apply_nielsen(t: GenTuple, move: NielsenMove) -> GenTuple:
    entries = list(t.entries)
    if not (0 <= move.i < t.arity) or (move.j is not None and not (0 <= move.j < t.arity)):
        raise IndexError("move index outside tuple arity")
    if move.kind == "invert":
        entries[move.i] = entries[move.i].inverse()
    elif move.kind == "swap":
        entries[move.i], entries[move.j] = entries[move.j], entries[move.i]
    else:
        factor = entries[move.j]
        if move.exponent == -1:
            factor = factor.inverse()
        entries[move.i] = entries[move.i] * factor
    return GenTuple(t.rank, tuple(entries))


def random_nielsen_moves(rng: random.Random, arity: int, count: int) -> list[NielsenMove]:
    """A reproducible sequence of valid random moves for an ``arity``-tuple."""
    if arity < 2:
        raise ValueError("need arity >= 2 for swap/multiply moves")
    moves = []
    for _ in range(count):
        kind = rng.choice(("invert", "swap", "multiply"))
        i = rng.randrange(arity)
        if kind == "invert":
            moves.append(NielsenMove("invert", i))
        else:
            j = rng.randrange(arity - 1)
            if j >= i:
                j += 1
            exponent = rng.choice((1, -1)) if kind == "multiply" else 1
            moves.append(NielsenMove(kind, i, j, exponent))
    return moves


def random_reduced_letters(rng: random.Random, rank: int, length: int) -> tuple[int, ...]:
    """Uniform sample over the 2n(2n-1)^(length-1) reduced words of ``length``.

    First letter uniform over the 2n letters, each later letter uniform
    over the 2n-1 non-inverses of its predecessor; no rejection step.
    """
    if length == 0:
        return ()
    alphabet = [g for g in range(1, rank + 1)] + [-g for g in range(1, rank + 1)]
    letters = [alphabet[rng.randrange(2 * rank)]]
    for _ in range(length - 1):
        step = rng.randrange(2 * rank - 1)
        prev = letters[-1]
        choices = [l for l in alphabet if l != -prev]
        letters.append(choices[step])
    return tuple(letters)


def occurrences(w: Word, z: Word, include_inverses: bool = False) -> list[int]:
    """Start positions where z (and z^-1 when asked) occurs as a subword."""
    if len(z) == 0:
        raise ValueError("pattern must be nonempty")
    targets = [z.letters]
    if include_inverses and z.inverse().letters not in targets:
        targets.append(z.inverse().letters)
    hits = []
    for pos in range(len(w) - len(z) + 1):
        window = w.letters[pos:pos + len(z)]
        if any(window == t for t in targets):
            hits.append(pos)
    return hits


# ---------------------------------------------------------------------------
# text format


def format_letter(letter: int) -> str:
    return f"a{letter}" if letter > 0 else f"a{-letter}^-1"


def format_word(word: Word) -> str:
    return " ".join(format_letter(l) for l in word.letters)


def parse_letter(token: str, rank: int) -> int:
    body = token
    sign = 1
    if body.endswith("^-1"):
        body = body[:-3]
        sign = -1
    if not body.startswith("a") or not body[1:].isdigit():
        raise ValueError(f"bad letter token {token!r}")
    letter = sign * int(body[1:])
    check_letter(letter, rank)
    return letter


def parse_word(text: str, rank: int) -> Word:
    text = text.strip()
    if text in ("", "1"):
        return empty_word(rank)
    return free_reduce(rank, tuple(parse_letter(tok, rank) for tok in text.split()))
