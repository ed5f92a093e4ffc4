"""The relator-word calculus: factor-of-power certificates, minimal
segmentations into relator-power factors, the depth-bounded equivalence
ball behind the second complexity coordinate, and occurrence-replacement
reduction moves.

Terminology: given nonempty cyclically reduced relators U_1..U_n, a
"U-word" is any subword of a power of some U_i or its inverse.  c1(w)
is the least k with w a concatenation of k U-words; c2 sums the robust
lengths of the long factors.  The equivalence ball used for c2 has no
effective bound in general, so it is explored breadth-first to a stated
depth and all comparisons are made at equal depth.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterator, Sequence

from . import strsearch
from .words import CyclicWord, Word, free_reduce


@dataclass(frozen=True)
class UCert:
    """Certificate: the word occurs in (rotation of relator^sign)^power
    starting at the rotation boundary offset ``rotation``."""

    relator: int
    sign: int
    rotation: int
    power: int


@dataclass(frozen=True)
class Thresholds:
    """Desk-scale stand-ins for the asymptotic length constants, expressed
    as fractions of the longest relator length."""

    long_factor_fraction: float = 0.5
    zero_fraction: float = 0.85
    power_cap: int = 1
    max_decompositions: int = 64
    max_ball: int = 256

    def long_factor_letters(self, max_relator: int) -> int:
        return max(1, math.ceil(self.long_factor_fraction * max_relator))

    def zero_letters(self, max_relator: int) -> int:
        return max(1, math.ceil(self.zero_fraction * max_relator))


class UWordIndex:
    """Immutable matcher for factors of powers of the relators.

    Power windows use ceil(len/|U|)+1 periods: any factor of a power of
    that length occurs within such a window, by periodicity.
    """

    def __init__(self, relators: Sequence[Word | CyclicWord]):
        words = []
        for rel in relators:
            word = rel.word if isinstance(rel, CyclicWord) else rel
            if len(word) == 0:
                raise ValueError("relators must be nonempty")
            if not word.is_cyclically_reduced:
                raise ValueError("relators must be cyclically reduced")
            words.append(word)
        if not words:
            raise ValueError("need at least one relator")
        self.rank = words[0].rank
        self.relators: tuple[Word, ...] = tuple(words)
        self._chars: dict[tuple[int, int], str] = {}
        for i, word in enumerate(self.relators):
            self._chars[(i, 1)] = strsearch.letters_to_chars(word.letters)
            self._chars[(i, -1)] = strsearch.letters_to_chars(word.inverse().letters)
        self._powers: dict[tuple[int, int, int], str] = {}
        self._rev_sams: dict[tuple[int, int, int], strsearch.SuffixAutomaton] = {}
        self._rotations: set[tuple[int, ...]] | None = None

    def missing_letters(self) -> list[int]:
        present = {abs(l) for rel in self.relators for l in rel.letters}
        return [g for g in range(1, self.rank + 1) if g not in present]

    @property
    def max_relator_length(self) -> int:
        return max(len(r) for r in self.relators)

    @property
    def min_relator_length(self) -> int:
        return min(len(r) for r in self.relators)

    def _power_string(self, relator: int, sign: int, min_length: int) -> str:
        base = self._chars[(relator, sign)]
        periods = max(2, -(-min_length // len(base)) + 1)
        # round periods up to limit cache churn
        periods = 1 << (periods - 1).bit_length()
        key = (relator, sign, periods)
        cached = self._powers.get(key)
        if cached is None:
            cached = base * periods
            self._powers[key] = cached
        return cached

    def _reversed_sam(self, relator: int, sign: int, min_length: int):
        base = self._chars[(relator, sign)]
        periods = max(2, -(-min_length // len(base)) + 1)
        periods = 1 << (periods - 1).bit_length()
        key = (relator, sign, periods)
        sam = self._rev_sams.get(key)
        if sam is None:
            sam = strsearch.SuffixAutomaton((base * periods)[::-1])
            self._rev_sams[key] = sam
        return sam

    def rotation_set(self) -> set[tuple[int, ...]]:
        if self._rotations is None:
            out: set[tuple[int, ...]] = set()
            for word in self.relators:
                for base in (word, word.inverse()):
                    letters = base.letters
                    for k in range(len(letters)):
                        out.add(letters[k:] + letters[:k])
            self._rotations = out
        return self._rotations

    def is_u_word(self, z: Word) -> UCert | None:
        """First certificate in (relator, sign) order, or None."""
        if len(z) == 0:
            raise ValueError("the empty word is not certified as a relator factor")
        chars = strsearch.letters_to_chars(z.letters)
        for i in range(len(self.relators)):
            L = len(self.relators[i])
            for sign in (1, -1):
                hay = self._power_string(i, sign, len(z) + L)
                pos = hay.find(chars)
                if pos >= 0:
                    rotation = pos % L
                    power = math.ceil((rotation + len(z)) / L)
                    return UCert(i, sign, rotation, power)
        return None

    def certificates(self, z: Word) -> list[UCert]:
        """All certificates over (relator, sign); one rotation each."""
        if len(z) == 0:
            raise ValueError("the empty word is not certified as a relator factor")
        chars = strsearch.letters_to_chars(z.letters)
        out = []
        for i in range(len(self.relators)):
            L = len(self.relators[i])
            for sign in (1, -1):
                hay = self._power_string(i, sign, len(z) + L)
                pos = hay.find(chars)
                if pos >= 0:
                    rotation = pos % L
                    power = math.ceil((rotation + len(z)) / L)
                    out.append(UCert(i, sign, rotation, power))
        return out

    def rotation_word(self, cert: UCert) -> Word:
        base = self.relators[cert.relator]
        if cert.sign < 0:
            base = base.inverse()
        letters = base.letters
        return Word(self.rank, letters[cert.rotation :] + letters[: cert.rotation])

    def u_complement(self, z: Word, cert: UCert | None = None, extra_power: int = 0) -> Word:
        """Minimal V with z * V^-1 a power of the certified rotation;
        ``extra_power`` appends whole extra periods to the family."""
        if cert is None:
            cert = self.is_u_word(z)
            if cert is None:
                raise ValueError("word is not a relator-power factor")
        rot = self.rotation_word(cert)
        L = len(rot)
        m = max(1, math.ceil(len(z) / L)) + extra_power
        full = rot.letters * m
        if full[: len(z)] != z.letters:
            raise ValueError("certificate does not match the word")
        tail = full[len(z) :]
        return Word(self.rank, tail).inverse()

    def max_factor_starting(self, w: Word) -> list[int]:
        """For each position of w, the length of the longest factor of a
        relator power starting there (computed in one scan per relator
        sign via a reversed-text automaton)."""
        if len(w) == 0:
            return []
        chars = strsearch.letters_to_chars(w.letters)
        rev = chars[::-1]
        best = [0] * len(w)
        for i in range(len(self.relators)):
            for sign in (1, -1):
                sam = self._reversed_sam(i, sign, len(w) + len(self.relators[i]))
                stats = sam.matching_statistics(rev)
                for rev_pos, (m, _) in enumerate(stats):
                    pos = len(w) - 1 - rev_pos
                    if m > best[pos]:
                        best[pos] = m
        return best


@dataclass(frozen=True)
class Segmentation:
    """A factorization of a word into certified relator-power factors."""

    word: Word
    boundaries: tuple[int, ...]  # interior cut positions, increasing
    certificates: tuple[UCert, ...]

    @property
    def factor_count(self) -> int:
        return len(self.boundaries) + 1

    def spans(self) -> list[tuple[int, int]]:
        cuts = (0,) + self.boundaries + (len(self.word),)
        return [(cuts[i], cuts[i + 1]) for i in range(len(cuts) - 1)]

    def factors(self) -> list[Word]:
        return [self.word.subword(a, b) for a, b in self.spans()]

    def to_dict(self) -> dict:
        return {
            "word": str(self.word),
            "boundaries": list(self.boundaries),
            "certificates": [c.__dict__ for c in self.certificates],
        }


def _min_factor_tables(w: Word, maxstart: list[int]) -> tuple[list[int], list[int]]:
    """Forward and backward minimal factor counts: F[p] = c1 of w[:p],
    G[p] = c1 of w[p:]."""
    n = len(w)
    INF = n + 2
    F = [INF] * (n + 1)
    F[0] = 0
    for p in range(n):
        if F[p] >= INF:
            continue
        reach = maxstart[p]
        for q in range(p + 1, p + reach + 1):
            if F[p] + 1 < F[q]:
                F[q] = F[p] + 1
    G = [INF] * (n + 1)
    G[n] = 0
    for p in range(n - 1, -1, -1):
        reach = maxstart[p]
        best = INF
        for q in range(p + 1, p + reach + 1):
            if G[q] + 1 < best:
                best = G[q] + 1
        G[p] = best
    return F, G


def c1(w: Word, idx: UWordIndex) -> tuple[int, Segmentation]:
    """Minimal number of relator-power factors, with one witness
    segmentation (longest-first-factor among the minimal ones)."""
    if len(w) == 0:
        raise ValueError("c1 is undefined on the empty word")
    maxstart = idx.max_factor_starting(w)
    for pos, m in enumerate(maxstart):
        if m == 0:
            raise ValueError(
                f"letter at position {pos} is not a factor of any relator power"
            )
    F, G = _min_factor_tables(w, maxstart)
    k = G[0]
    cuts: list[int] = []
    pos = 0
    while pos < len(w):
        used = len(cuts) + 1
        # longest jump keeping the suffix solvable in the remaining budget
        q = None
        for jump in range(maxstart[pos], 0, -1):
            if G[pos + jump] == k - used:
                q = pos + jump
                break
        assert q is not None
        if q < len(w):
            cuts.append(q)
        pos = q
    factors = []
    lo = 0
    for cut in cuts + [len(w)]:
        factors.append(w.subword(lo, cut))
        lo = cut
    certs = []
    for factor in factors:
        cert = idx.is_u_word(factor)
        assert cert is not None
        certs.append(cert)
    return k, Segmentation(w, tuple(cuts), tuple(certs))


def brute_force_c1(w: Word, idx: UWordIndex) -> int:
    """Independent oracle: memoized exhaustive segmentation search using
    direct substring membership, no per-position maximal-factor table."""
    if len(w) == 0:
        raise ValueError("c1 is undefined on the empty word")
    chars = strsearch.letters_to_chars(w.letters)
    hays = [
        idx._power_string(i, sign, len(w) + len(idx.relators[i]))
        for i in range(len(idx.relators))
        for sign in (1, -1)
    ]

    @lru_cache(maxsize=None)
    def best(pos: int) -> int:
        if pos == len(chars):
            return 0
        out = len(chars) + 2
        for q in range(pos + 1, len(chars) + 1):
            piece = chars[pos:q]
            if any(piece in hay for hay in hays):
                sub = best(q)
                if 1 + sub < out:
                    out = 1 + sub
        return out

    result = best(0)
    best.cache_clear()
    return result


def exhaustive_cut_c1(w: Word, idx: UWordIndex) -> int:
    """Literal enumeration over all 2^(len-1) cut subsets; only sane for
    very short words, used to cross-check the other two routes."""
    n = len(w)
    if n == 0:
        raise ValueError("c1 is undefined on the empty word")
    if n > 16:
        raise ValueError("exhaustive cut enumeration limited to length 16")
    best = n + 2
    for mask in range(1 << (n - 1)):
        cuts = [0] + [i + 1 for i in range(n - 1) if mask >> i & 1] + [n]
        ok = True
        for a, b in zip(cuts, cuts[1:]):
            if idx.is_u_word(w.subword(a, b)) is None:
                ok = False
                break
        if ok:
            best = min(best, len(cuts) - 1)
    return best


def admissible_decompositions(
    w: Word, idx: UWordIndex, cap: int | None = 64
) -> Iterator[Segmentation]:
    """All segmentations into exactly c1(w) certified factors, in
    lexicographic cut order; stops after ``cap`` when given."""
    maxstart = idx.max_factor_starting(w)
    if any(m == 0 for m in maxstart):
        raise ValueError("some letter is not a factor of any relator power")
    F, G = _min_factor_tables(w, maxstart)
    k = G[0]
    emitted = 0
    stack: list[tuple[int, tuple[int, ...]]] = [(0, ())]
    while stack:
        pos, cuts = stack.pop()
        if pos == len(w):
            factors_ok = True
            certs = []
            lo = 0
            for cut in cuts + (len(w),):
                cert = idx.is_u_word(w.subword(lo, cut))
                if cert is None:
                    factors_ok = False
                    break
                certs.append(cert)
                lo = cut
            if factors_ok:
                yield Segmentation(w, cuts, tuple(certs))
                emitted += 1
                if cap is not None and emitted >= cap:
                    return
            continue
        used = len(cuts) + 1
        # push longer jumps last so the leftmost-shortest comes out first
        for jump in range(maxstart[pos], 0, -1):
            q = pos + jump
            if G[q] == k - used:
                stack.append((q, cuts + ((q,) if q < len(w) else ())))


def _max_ith_factor(w: Word, i: int, idx: UWordIndex) -> int:
    """Longest i-th factor over all admissible decompositions (1-based i),
    straight from the forward/backward tables."""
    maxstart = idx.max_factor_starting(w)
    F, G = _min_factor_tables(w, maxstart)
    k = G[0]
    if not (1 <= i <= k):
        return 0
    best = 0
    for p in range(len(w) + 1):
        if F[p] != i - 1:
            continue
        top = p + (maxstart[p] if p < len(w) else 0)
        for q in range(min(top, len(w)), p, -1):
            if G[q] == k - i:
                best = max(best, q - p)
                break
    return best


def elementary_i_equivalents(
    w: Word, i: int, idx: UWordIndex, thresholds: Thresholds = Thresholds()
) -> list[Word]:
    """Words obtained by replacing one long maximal factor other than the
    i-th by a long complementary word.  Candidates whose splice fails to
    stay freely reduced or to preserve c1 do not qualify and are dropped."""
    if len(w) == 0:
        return []
    maxstart = idx.max_factor_starting(w)
    if any(m == 0 for m in maxstart):
        raise ValueError("some letter is not a factor of any relator power")
    _, G = _min_factor_tables(w, maxstart)
    k = G[0]
    thr = thresholds.long_factor_letters(idx.max_relator_length)
    out: dict[tuple[int, ...], Word] = {}
    count = 0
    for seg in admissible_decompositions(w, idx, cap=thresholds.max_decompositions):
        count += 1
        spans = seg.spans()
        for j, (p, q) in enumerate(spans, start=1):
            if j == i:
                continue
            if q - p < thr:
                continue
            # maximality of the factor as a subword of w
            if p > 0 and maxstart[p - 1] >= q - p + 1:
                continue
            if q < len(w) and maxstart[p] >= q - p + 1:
                continue
            factor = w.subword(p, q)
            for cert in idx.certificates(factor):
                for extra in range(thresholds.power_cap + 1):
                    try:
                        comp = idx.u_complement(factor, cert, extra)
                    except ValueError:
                        continue
                    if len(comp) < thr:
                        continue
                    replacement = comp.inverse()
                    letters = (
                        w.letters[:p] + replacement.letters + w.letters[q:]
                    )
                    reduced = all(
                        a != -b for a, b in zip(letters, letters[1:])
                    )
                    if not reduced:
                        continue
                    candidate = Word(w.rank, letters)
                    if candidate.letters == w.letters:
                        continue
                    if candidate.letters in out:
                        continue
                    cand_max = idx.max_factor_starting(candidate)
                    if any(m == 0 for m in cand_max):
                        continue
                    _, cand_G = _min_factor_tables(candidate, cand_max)
                    if cand_G[0] != k:
                        continue
                    out[candidate.letters] = candidate
    return list(out.values())


def ell_hat(
    w: Word,
    i: int,
    idx: UWordIndex,
    thresholds: Thresholds = Thresholds(),
    depth: int = 1,
) -> int:
    """Max i-th factor length over the depth-bounded equivalence ball."""
    if len(w) == 0:
        return 0
    best = _max_ith_factor(w, i, idx)
    frontier = [w]
    seen = {w.letters}
    for _ in range(depth):
        next_frontier: list[Word] = []
        for node in frontier:
            for neighbor in elementary_i_equivalents(node, i, idx, thresholds):
                if neighbor.letters in seen:
                    continue
                seen.add(neighbor.letters)
                if len(seen) > thresholds.max_ball:
                    break
                best = max(best, _max_ith_factor(neighbor, i, idx))
                next_frontier.append(neighbor)
        frontier = next_frontier
        if not frontier:
            break
    return best


@dataclass(frozen=True)
class ComplexityValue:
    """(c1, c2) with per-index robust lengths; ordered lexicographically
    on the pair only."""

    c1: int
    c2: int
    per_index: tuple[int, ...] = ()
    depth: int = 0

    def key(self) -> tuple[int, int]:
        return (self.c1, self.c2)

    def __lt__(self, other: "ComplexityValue") -> bool:
        return self.key() < other.key()

    def __le__(self, other: "ComplexityValue") -> bool:
        return self.key() <= other.key()

    def to_dict(self) -> dict:
        return {
            "c1": self.c1,
            "c2": self.c2,
            "per_index": list(self.per_index),
            "depth": self.depth,
        }


def complexity(
    w: Word,
    idx: UWordIndex,
    thresholds: Thresholds = Thresholds(),
    depth: int = 1,
) -> ComplexityValue:
    """Depth-bounded complexity; the empty word is the bottom element."""
    if len(w) == 0:
        return ComplexityValue(0, 0, (), depth)
    k, _ = c1(w, idx)
    zero_at = thresholds.zero_letters(idx.max_relator_length)
    per = []
    for i in range(1, k + 1):
        hat = ell_hat(w, i, idx, thresholds, depth)
        per.append(hat if hat >= zero_at else 0)
    return ComplexityValue(k, sum(per), tuple(per), depth)


def tuple_complexity(
    words: Sequence[Word],
    idx: UWordIndex,
    thresholds: Thresholds = Thresholds(),
    depth: int = 1,
) -> tuple[ComplexityValue, ...]:
    """Complexity vector over the first n entries (n = relator count);
    the trailing stabilization entries are disregarded."""
    n = len(idx.relators)
    return tuple(complexity(w, idx, thresholds, depth) for w in words[:n])


def greedy_disjoint_occurrences(w: Word, pattern: Word) -> list[tuple[int, int]]:
    """Left-to-right disjoint occurrences of the pattern or its inverse:
    (position, sign) pairs."""
    hits: list[tuple[int, int]] = []
    L = len(pattern)
    inv = pattern.inverse().letters
    pos = 0
    while pos + L <= len(w):
        window = w.letters[pos : pos + L]
        if window == pattern.letters:
            hits.append((pos, 1))
            pos += L
        elif window == inv:
            hits.append((pos, -1))
            pos += L
        else:
            pos += 1
    return hits


@dataclass
class ReductionOutcome:
    word: Word
    before: ComplexityValue
    after: ComplexityValue
    replaced: list[tuple[int, int]]

    @property
    def relation(self) -> str:
        if self.after.key() < self.before.key():
            return "decreased"
        if self.after.key() == self.before.key():
            return "equal"
        return "increased"

    def to_dict(self) -> dict:
        return {
            "word": str(self.word),
            "before": self.before.to_dict(),
            "after": self.after.to_dict(),
            "relation": self.relation,
            "replaced": self.replaced,
        }


def reduction_move(
    w: Word,
    pattern: Word,
    replacement: Word,
    idx: UWordIndex,
    occurrence_set: Sequence[tuple[int, int]] | None = None,
    thresholds: Thresholds = Thresholds(),
    depth: int = 1,
) -> ReductionOutcome:
    """Replace designated disjoint occurrences of the pattern (sign -1
    means an occurrence of its inverse) by the replacement, reduce, and
    compare complexities at equal depth.

    The pattern-replacement pair must satisfy: pattern * replacement^-1
    is literally a rotation of a relator or of an inverse relator.
    """
    glued = pattern.letters + replacement.inverse().letters
    if tuple(glued) not in idx.rotation_set():
        raise ValueError("pattern * replacement^-1 is not a relator rotation")
    if occurrence_set is None:
        occurrence_set = greedy_disjoint_occurrences(w, pattern)
    L = len(pattern)
    inv = pattern.inverse().letters
    last_end = -1
    for pos, sign in sorted(occurrence_set):
        if pos < 0 or pos + L > len(w):
            raise ValueError("occurrence outside the word")
        if pos < last_end:
            raise ValueError("occurrences overlap")
        window = w.letters[pos : pos + L]
        expected = pattern.letters if sign > 0 else inv
        if window != expected:
            raise ValueError(f"no pattern occurrence at position {pos}")
        last_end = pos + L
    pieces: list[int] = []
    cursor = 0
    for pos, sign in sorted(occurrence_set):
        pieces.extend(w.letters[cursor:pos])
        rep = replacement.letters if sign > 0 else replacement.inverse().letters
        pieces.extend(rep)
        cursor = pos + L
    pieces.extend(w.letters[cursor:])
    new_word = free_reduce(w.rank, pieces)
    before = complexity(w, idx, thresholds, depth)
    after = complexity(new_word, idx, thresholds, depth)
    return ReductionOutcome(new_word, before, after, list(occurrence_set))
