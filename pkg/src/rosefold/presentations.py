"""Two-family presentations: substitute the first-family words into the
second family to derive one-relator-family presentations, trim the
surviving middles, compute small-cancellation piece statistics, and find
and apply long-overlap rewriting moves.

Pieces follow the symmetrized convention: a piece is a word that occurs
at two distinct cyclic sites (relator index, sign, cyclic offset), with
occurrences read cyclically and proper (shorter than the relator).  The
lambda value is max piece length over min relator length.
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass
from typing import Sequence

from . import strsearch
from .words import CyclicWord, Word, free_reduce, random_reduced_letters


class DegeneratePresentationError(ValueError):
    """Raised when cancellation destroys a substituted block entirely."""


@dataclass(frozen=True)
class SubstitutionSite:
    """Where one first-family block landed inside a derived relator.

    ``survived`` is the half-open interval of block positions (in the
    block's own reading direction) that outlived free and cyclic
    cancellation; cancellation in a product of reduced blocks only ever
    chews a prefix and a suffix off each block.
    """

    relator: int
    block: int
    word_index: int
    sign: int
    survived: tuple[int, int]


@dataclass
class Presentation:
    rank: int
    length: int
    v_words: tuple[Word, ...]
    u_words: tuple[Word, ...]
    relators: tuple[CyclicWord, ...]
    relator_words: tuple[Word, ...]  # cyclically reduced, pre-rotation
    sites: tuple[SubstitutionSite, ...]
    degenerate_indices: tuple[int, ...] = ()
    v_prime: tuple[Word, ...] | None = None
    v_prime_offsets: tuple[int, ...] | None = None
    n_prime: int | None = None

    @property
    def degenerate(self) -> bool:
        return bool(self.degenerate_indices)

    def to_dict(self) -> dict:
        out = {
            "rank": self.rank,
            "N": self.length,
            "v": [str(w) for w in self.v_words],
            "u": [str(w) for w in self.u_words],
            "U": [str(r.word) for r in self.relators],
            "degenerate": list(self.degenerate_indices),
        }
        if self.v_prime is not None:
            out["vPrime"] = [str(w) for w in self.v_prime]
            out["NPrime"] = self.n_prime
        return out

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)


def _reduce_with_provenance(
    blocks: Sequence[tuple[int, tuple[int, ...]]]
) -> list[tuple[int, int, int]]:
    """Free reduction of concatenated reduced blocks, tracking provenance.

    Each block is (block_id, letters).  Returns the surviving letters as
    (letter, block_id, offset_in_block).
    """
    stack: list[tuple[int, int, int]] = []
    for block_id, letters in blocks:
        for offset, letter in enumerate(letters):
            if stack and stack[-1][0] == -letter:
                stack.pop()
            else:
                stack.append((letter, block_id, offset))
    return stack


def build_relators(v_words: Sequence[Word], u_words: Sequence[Word]) -> Presentation:
    """Derive one relator per index: the generator inverse followed by the
    second-family word with every letter replaced by the corresponding
    first-family word, freely and cyclically reduced.

    Total cancellation of a relator is flagged, never silently accepted.
    """
    n = len(v_words)
    if len(u_words) != n:
        raise ValueError("need equally many words in both families")
    rank = v_words[0].rank
    lengths = {len(w) for w in v_words} | {len(w) for w in u_words}
    for w in list(v_words) + list(u_words):
        if w.rank != rank:
            raise ValueError("rank mismatch")
    if len(lengths) != 1:
        raise ValueError("all words must share one length")
    (length,) = lengths

    relators: list[CyclicWord] = []
    relator_words: list[Word] = []
    sites: list[SubstitutionSite] = []
    degenerate: list[int] = []
    for i, u in enumerate(u_words):
        blocks: list[tuple[int, tuple[int, ...]]] = [(-1, (-(i + 1),))]
        block_meta: list[tuple[int, int]] = []  # block_id -> (word_index, sign)
        for letter in u.letters:
            j = abs(letter) - 1
            sign = 1 if letter > 0 else -1
            v = v_words[j] if sign > 0 else v_words[j].inverse()
            block_id = len(block_meta)
            block_meta.append((j, sign))
            blocks.append((block_id, v.letters))
        surviving = _reduce_with_provenance(blocks)
        # cyclic cancellation trims matched prefix/suffix pairs
        lo, hi = 0, len(surviving)
        while hi - lo >= 2 and surviving[lo][0] == -surviving[hi - 1][0]:
            lo += 1
            hi -= 1
        trimmed = surviving[lo:hi]
        letters = tuple(rec[0] for rec in trimmed)
        word = Word(rank, letters)
        if len(word) == 0:
            degenerate.append(i)
            relator_words.append(word)
            relators.append(CyclicWord(word))
            continue
        relator_words.append(word)
        relators.append(CyclicWord.from_cyclically_reduced(word))
        per_block: dict[int, tuple[int, int]] = {}
        for letter, block_id, offset in trimmed:
            if block_id < 0:
                continue
            lo_off, hi_off = per_block.get(block_id, (offset, offset + 1))
            per_block[block_id] = (min(lo_off, offset), max(hi_off, offset + 1))
        for block_id, (word_index, sign) in enumerate(block_meta):
            span = per_block.get(block_id)
            if span is None:
                span = (0, 0)
            sites.append(SubstitutionSite(i, block_id, word_index, sign, span))
    return Presentation(
        rank=rank,
        length=length,
        v_words=tuple(v_words),
        u_words=tuple(u_words),
        relators=tuple(relators),
        relator_words=tuple(relator_words),
        sites=tuple(sites),
        degenerate_indices=tuple(degenerate),
    )


def trim_surviving_middles(
    p: Presentation, eps0: float | None = None
) -> Presentation:
    """Compute, per first-family word, the longest middle that survives
    uncancelled at every substitution site, then cut all of them to one
    common length.

    Raises DegeneratePresentationError when some word is consumed
    entirely at a site; with ``eps0`` given, also when the common length
    falls below (1 - eps0) * N.
    """
    if p.degenerate:
        raise DegeneratePresentationError("presentation has empty relators")
    n = len(p.v_words)
    intervals: list[tuple[int, int]] = [(0, p.length)] * n
    for site in p.sites:
        lo, hi = site.survived
        if site.sign < 0:
            # positions counted in the inverted block; mirror them
            lo, hi = p.length - hi, p.length - lo
        cur_lo, cur_hi = intervals[site.word_index]
        intervals[site.word_index] = (max(cur_lo, lo), min(cur_hi, hi))
    for j, (lo, hi) in enumerate(intervals):
        if hi <= lo:
            raise DegeneratePresentationError(
                f"word {j} has no commonly surviving middle"
            )
    n_prime = min(hi - lo for lo, hi in intervals)
    if eps0 is not None and n_prime < (1 - eps0) * p.length:
        raise DegeneratePresentationError(
            f"surviving middle length {n_prime} below (1-eps0)N"
        )
    v_prime = []
    offsets = []
    for j, (lo, hi) in enumerate(intervals):
        v_prime.append(p.v_words[j].subword(lo, lo + n_prime))
        offsets.append(lo)
    # re-scan: the trimmed middle must occur uncancelled at every site
    for site in p.sites:
        lo, hi = site.survived
        if site.sign < 0:
            lo, hi = p.length - hi, p.length - lo
        off = offsets[site.word_index]
        assert lo <= off and off + n_prime <= hi, "trimmed middle not covered at a site"
    p.v_prime = tuple(v_prime)
    p.v_prime_offsets = tuple(offsets)
    p.n_prime = n_prime
    return p


def sample_presentation(
    rank: int, length: int, seed: int, max_attempts: int = 64
) -> tuple[Presentation, int]:
    """Random presentation from uniformly sampled reduced words, retrying
    on degeneracy; returns the presentation and the rejection count."""
    rng = random.Random(seed)
    rejects = 0
    for _ in range(max_attempts):
        v_words = [Word(rank, random_reduced_letters(rng, rank, length)) for _ in range(rank)]
        u_words = [Word(rank, random_reduced_letters(rng, rank, length)) for _ in range(rank)]
        p = build_relators(v_words, u_words)
        if not p.degenerate:
            try:
                trim_surviving_middles(p)
                return p, rejects
            except DegeneratePresentationError:
                pass
        rejects += 1
    raise DegeneratePresentationError(
        f"no non-degenerate presentation in {max_attempts} attempts"
    )


# ---------------------------------------------------------------------------
# piece statistics


@dataclass
class PieceReport:
    max_piece_length: int
    min_relator_length: int
    lambda_value: float
    pair_table: dict[tuple[int, int], int]

    def satisfies(self, lam: float) -> bool:
        return self.lambda_value < lam

    def to_dict(self) -> dict:
        return {
            "max_piece_length": self.max_piece_length,
            "min_relator_length": self.min_relator_length,
            "lambda_value": self.lambda_value,
            "pair_table": {f"{i},{j}": v for (i, j), v in self.pair_table.items()},
        }


_HASH_MOD = (1 << 61) - 1
_HASH_BASE = 0x1F123BB5


class _CyclicWindows:
    """Rolling-hash index over all proper cyclic windows of the
    symmetrized relators; sites are (relator, sign, offset)."""

    def __init__(self, relators: Sequence[CyclicWord]):
        self.lengths = [len(r) for r in relators]
        self.texts: list[tuple[int, int, str]] = []
        for i, rel in enumerate(relators):
            for sign, base in ((1, rel.word), (-1, rel.word.inverse())):
                chars = strsearch.letters_to_chars(base.letters)
                self.texts.append((i, sign, chars + chars))
        self._prefix: list[list[int]] = []
        for _, _, doubled in self.texts:
            acc = [0]
            h = 0
            for ch in doubled:
                h = (h * _HASH_BASE + ord(ch)) % _HASH_MOD
                acc.append(h)
            self._prefix.append(acc)
        self._pow: list[int] = [1]

    def _power(self, m: int) -> int:
        while len(self._pow) <= m:
            self._pow.append(self._pow[-1] * _HASH_BASE % _HASH_MOD)
        return self._pow[m]

    def has_repeat(self, m: int, owners: tuple[int, int] | None = None) -> bool:
        """Is some window of length m shared by two distinct sites (for
        ``owners`` = (i, j) with i != j: sites in both relators)?"""
        if m <= 0:
            return True
        pm = self._power(m)
        counts: dict[int, int] = {}
        for t, (i, sign, doubled) in enumerate(self.texts):
            if owners is not None and i not in owners:
                continue
            L = self.lengths[i]
            if m >= L:
                continue
            acc = self._prefix[t]
            for off in range(L):
                h = (acc[off + m] - acc[off] * pm) % _HASH_MOD
                counts[h] = counts.get(h, 0) + 1
        hot = {h for h, c in counts.items() if c >= 2}
        if not hot:
            return False
        # verify hot hashes against collisions before declaring a piece
        by_string: dict[str, set[tuple[int, int, int]]] = {}
        for t, (i, sign, doubled) in enumerate(self.texts):
            if owners is not None and i not in owners:
                continue
            L = self.lengths[i]
            if m >= L:
                continue
            acc = self._prefix[t]
            for off in range(L):
                h = (acc[off + m] - acc[off] * pm) % _HASH_MOD
                if h in hot:
                    by_string.setdefault(doubled[off : off + m], set()).add((i, sign, off))
        for sites in by_string.values():
            if len(sites) < 2:
                continue
            if owners is None or owners[0] == owners[1]:
                return True
            if {site[0] for site in sites} >= set(owners):
                return True
        return False

    def max_piece(self, owners: tuple[int, int] | None = None, cap: int | None = None) -> int:
        hi = max(self.lengths) - 1
        if owners is not None:
            hi = max(self.lengths[owners[0]], self.lengths[owners[1]]) - 1
        if cap is not None:
            hi = min(hi, cap)
        lo = 0
        while lo < hi:
            mid = (lo + hi + 1) // 2
            if self.has_repeat(mid, owners):
                lo = mid
            else:
                hi = mid - 1
        return lo


def piece_report(relators: Sequence[CyclicWord]) -> PieceReport:
    """Maximum piece length over the symmetrized relator family, by binary
    search on the (monotone) existence of a repeated cyclic window; window
    matching is rolling-hash with exact verification."""
    relators = [r for r in relators]
    if not relators or any(len(r) == 0 for r in relators):
        raise ValueError("need nonempty relators")
    index = _CyclicWindows(relators)
    max_piece = index.max_piece()
    pair_table: dict[tuple[int, int], int] = {}
    for i in range(len(relators)):
        for j in range(i, len(relators)):
            pair_table[(i, j)] = index.max_piece(owners=(i, j), cap=max_piece)
    return PieceReport(
        max_piece_length=max_piece,
        min_relator_length=min(len(r) for r in relators),
        lambda_value=max_piece / min(len(r) for r in relators),
        pair_table=pair_table,
    )


# ---------------------------------------------------------------------------
# long-overlap rewriting moves


@dataclass(frozen=True)
class SCMove:
    """Replace w[start:start+length] (which matches a long prefix of a
    cyclic rotation of a relator or its inverse) by the inverse of the
    rotation's remainder."""

    start: int
    length: int
    relator: int
    sign: int
    rotation: int
    replacement: Word
    alpha_achieved: float


def _rotation_word(p: Presentation, relator: int, sign: int, rotation: int) -> Word:
    base = p.relator_words[relator] if sign > 0 else p.relator_words[relator].inverse()
    letters = base.letters
    return Word(p.rank, letters[rotation:] + letters[:rotation])


def relator_rotations(p: Presentation) -> set[tuple[int, ...]]:
    out: set[tuple[int, ...]] = set()
    for word in p.relator_words:
        for base in (word, word.inverse()):
            letters = base.letters
            for k in range(len(letters)):
                out.add(letters[k:] + letters[:k])
    return out


def find_sc_move(w: Word, p: Presentation, alpha: float) -> SCMove | None:
    """Longest subword of ``w`` matching at least an alpha fraction of some
    relator rotation; None when no match is long enough."""
    if not (0 < alpha < 1):
        raise ValueError("alpha must be in (0, 1)")
    if p.degenerate:
        raise DegeneratePresentationError("presentation has empty relators")
    chars = strsearch.letters_to_chars(w.letters)
    best: tuple[int, int, int, int, int] | None = None  # (length, -start, rel, sign, off)
    for rel_index, relator in enumerate(p.relator_words):
        L = len(relator)
        for sign, base in ((1, relator), (-1, relator.inverse())):
            rel_chars = strsearch.letters_to_chars(base.letters)
            doubled = rel_chars + rel_chars
            sam = strsearch.SuffixAutomaton(doubled)
            for pos, (m, endpos) in enumerate(sam.matching_statistics(chars)):
                m = min(m, L)
                if m == 0:
                    continue
                start = pos - m + 1
                rotation = (endpos - m + 1) % L
                if best is None or m > best[0] or (m == best[0] and -start > best[1]):
                    best = (m, -start, rel_index, sign, rotation)
    if best is None:
        return None
    length, neg_start, rel_index, sign, rotation = best
    L = len(p.relator_words[rel_index])
    if length < alpha * L:
        return None
    start = -neg_start
    rot = _rotation_word(p, rel_index, sign, rotation)
    assert rot.letters[:length] == w.letters[start : start + length]
    replacement = Word(p.rank, rot.letters[length:]).inverse()
    return SCMove(
        start=start,
        length=length,
        relator=rel_index,
        sign=sign,
        rotation=rotation,
        replacement=replacement,
        alpha_achieved=length / L,
    )


def apply_sc_move(w: Word, move: SCMove) -> Word:
    head = w.letters[: move.start]
    tail = w.letters[move.start + move.length :]
    return free_reduce(w.rank, head + move.replacement.letters + tail)


@dataclass
class RewriteOutcome:
    reached_target: bool
    already_target: bool
    moves_applied: int
    capped: bool
    final_length: int


def rewrite_toward(
    w: Word, target: Word, p: Presentation, alpha: float, max_moves: int = 64
) -> RewriteOutcome:
    """Apply the longest-overlap move repeatedly, aiming for ``target``.

    The move count has no a-priori bound, so the loop is capped and a
    capped run is reported as such rather than as a failure.
    """
    if w.letters == target.letters:
        return RewriteOutcome(True, True, 0, False, len(w))
    current = w
    for step in range(max_moves):
        if current.letters == target.letters:
            return RewriteOutcome(True, False, step, False, len(current))
        move = find_sc_move(current, p, alpha)
        if move is None:
            return RewriteOutcome(False, False, step, False, len(current))
        current = apply_sc_move(current, move)
    reached = current.letters == target.letters
    return RewriteOutcome(reached, False, max_moves, not reached, len(current))


def representative_rewrite_experiment(
    p: Presentation, trials: int, alpha: float, seed: int = 0, max_moves: int = 64
) -> dict:
    """Constructed-witness suite: splice a relator rotation into the i-th
    first-family word (same group element, different word) and check a
    long-overlap move exists; then iterate back toward the original."""
    rng = random.Random(seed)
    rotations: list[tuple[int, int, int]] = []
    for i, rel in enumerate(p.relator_words):
        for sign in (1, -1):
            for off in range(len(rel)):
                rotations.append((i, sign, off))
    found = 0
    vacuous = 0
    recovered = 0
    capped = 0
    for _ in range(trials):
        i = rng.randrange(len(p.v_words))
        target = p.v_words[i]
        rel, sign, off = rotations[rng.randrange(len(rotations))]
        rot = _rotation_word(p, rel, sign, off)
        w = target * rot
        if w.letters == target.letters:
            vacuous += 1
            continue
        move = find_sc_move(w, p, alpha)
        if move is not None:
            found += 1
            outcome = rewrite_toward(w, target, p, alpha, max_moves)
            if outcome.reached_target:
                recovered += 1
            elif outcome.capped:
                capped += 1
    scored = trials - vacuous
    return {
        "trials": trials,
        "vacuous": vacuous,
        "move_found": found,
        "move_found_fraction": found / scored if scored else 1.0,
        "recovered": recovered,
        "capped": capped,
    }
