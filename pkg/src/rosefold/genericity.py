"""Uniform random reduced words and desk-scale sampling statistics:
repeated subwords, disjoint-occurrence coverage, complementary-gap
distributions, and injectivity of lifts.

All sampling is seeded and per-sample seeds are derived from the run
seed by index, so runs are reproducible and samples can be evaluated
independently in any order.
"""

from __future__ import annotations

import json
import math
import random
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from . import strsearch
from .covers import enumerate_candidates, has_sub_cover, lift_paths
from .graphs import EdgePath, LabeledGraph
from .words import Word, random_reduced_letters

_SEED_STRIDE = 0x9E3779B97F4A7C15


def derived_seed(seed: int, index: int) -> int:
    return (seed * 6364136223846793005 + index * _SEED_STRIDE + 1) % (1 << 63)


@dataclass(frozen=True)
class SampleConfig:
    rank: int
    length: int
    samples: int
    seed: int = 0
    include_inverses: bool = True

    def __post_init__(self) -> None:
        if self.rank < 2 or self.length < 1 or self.samples < 1:
            raise ValueError("need rank >= 2, length >= 1, samples >= 1")

    def sample_rng(self, index: int) -> random.Random:
        return random.Random(derived_seed(self.seed, index))


def random_reduced_word(cfg: SampleConfig, index: int = 0) -> Word:
    """Uniform over the 2n(2n-1)^(N-1) reduced words of length N."""
    return Word(cfg.rank, random_reduced_letters(cfg.sample_rng(index), cfg.rank, cfg.length))


def longest_repeated_subword(w: Word, include_inverses: bool = True) -> int:
    """Longest length occurring at two distinct start positions; with the
    flag set, an occurrence of the inverse word also counts."""
    return strsearch.longest_repeated_length(
        strsearch.letters_to_chars(w.letters), include_inverses
    )


def disjoint_coverage(s: Word, gamma: Word) -> float:
    """|gamma| * (max number of pairwise disjoint occurrences) / |s|.

    The greedy left-to-right scan is optimal because all occurrence
    intervals share one length.
    """
    if len(gamma) == 0:
        raise ValueError("gamma must be nonempty")
    if len(s) == 0:
        return 0.0
    count = strsearch.disjoint_occurrence_count(
        strsearch.letters_to_chars(s.letters), strsearch.letters_to_chars(gamma.letters)
    )
    return len(gamma) * count / len(s)


def brute_force_max_disjoint(s: Word, gamma: Word) -> int:
    """Exhaustive maximum over subsets of occurrence positions; cross-check
    oracle for the greedy scan on short words."""
    positions = [
        p
        for p in range(len(s) - len(gamma) + 1)
        if s.letters[p : p + len(gamma)] == gamma.letters
    ]
    best = 0

    def rec(idx: int, chosen_end: int, count: int) -> None:
        nonlocal best
        best = max(best, count)
        for i in range(idx, len(positions)):
            if positions[i] >= chosen_end:
                rec(i + 1, positions[i] + len(gamma), count + 1)

    rec(0, -1, 0)
    return best


def repeated_subwords_at_least(w: Word, min_len: int, include_inverses: bool) -> list[Word]:
    """All distinct subwords of length >= ``min_len`` occurring at two
    distinct positions (inverse occurrences counted per the flag).  This
    window scan only pays when the repeat statistic reaches the bound,
    which is rare for generic samples."""
    chars = strsearch.letters_to_chars(w.letters)
    inv = strsearch.inverse_chars(chars)
    found: dict[str, None] = {}
    top = longest_repeated_subword(w, include_inverses)
    for length in range(min_len, top + 1):
        windows: dict[str, int] = {}
        for p in range(len(chars) - length + 1):
            sub = chars[p : p + length]
            windows[sub] = windows.get(sub, 0) + 1
        for sub, count in windows.items():
            total = count
            if include_inverses:
                total += len(strsearch.all_occurrences(inv, sub))
            if total >= 2:
                found.setdefault(sub)
    return [Word(w.rank, strsearch.chars_to_letters(s)) for s in found]


def disjoint_coverage_bidirectional(s: Word, gamma: Word) -> float:
    """Coverage where a disjoint collection may mix occurrences of gamma
    and of its inverse (the strictest reading of non-overlapping copies)."""
    if len(gamma) == 0:
        raise ValueError("gamma must be nonempty")
    if len(s) == 0:
        return 0.0
    chars = strsearch.letters_to_chars(s.letters)
    pattern = strsearch.letters_to_chars(gamma.letters)
    positions = set(strsearch.all_occurrences(chars, pattern))
    positions.update(strsearch.all_occurrences(chars, strsearch.inverse_chars(pattern)))
    count = 0
    free_from = 0
    for p in sorted(positions):
        if p >= free_from:
            count += 1
            free_from = p + len(gamma)
    return len(gamma) * count / len(s)


def complementary_distribution(s: Word, gamma: Word) -> dict[int, int]:
    """Histogram of gap lengths between consecutive greedy disjoint
    occurrences of ``gamma`` in ``s``."""
    if len(gamma) == 0:
        raise ValueError("gamma must be nonempty")
    chars = strsearch.letters_to_chars(s.letters)
    pattern = strsearch.letters_to_chars(gamma.letters)
    positions = strsearch.greedy_disjoint_positions(chars, pattern)
    if not positions:
        raise ValueError("gamma does not occur in s")
    hist: dict[int, int] = {}
    for a, b in zip(positions, positions[1:]):
        gap = b - (a + len(gamma))
        if gap > 0:
            hist[gap] = hist.get(gap, 0) + 1
    return hist


def alpha_injectivity(path: EdgePath) -> float:
    """Fraction of the path length covered by distinct topological edges."""
    if len(path) == 0:
        raise ValueError("alpha-injectivity needs a path of positive length")
    distinct = len({abs(tok) for tok in path.tokens})
    return distinct / len(path)


def wilson_interval(successes: int, trials: int, z: float = 1.96) -> tuple[float, float]:
    if trials == 0:
        return (0.0, 1.0)
    phat = successes / trials
    denom = 1 + z * z / trials
    center = (phat + z * z / (2 * trials)) / denom
    half = z * math.sqrt(phat * (1 - phat) / trials + z * z / (4 * trials * trials)) / denom
    return (max(0.0, center - half), min(1.0, center + half))


@dataclass
class StatsReport:
    """Per-sample metric rows plus aggregate pass fractions."""

    config: dict
    rows: list[dict] = field(default_factory=list)
    aggregate: dict = field(default_factory=dict)

    def fraction(self, predicate_name: str) -> float:
        hits = sum(1 for row in self.rows if row.get(predicate_name))
        return hits / len(self.rows) if self.rows else 0.0

    def finalize(self, predicates: Sequence[str]) -> None:
        out: dict = {"samples": len(self.rows)}
        for name in predicates:
            hits = sum(1 for row in self.rows if row.get(name))
            lo, hi = wilson_interval(hits, len(self.rows))
            out[name] = {
                "fraction": hits / len(self.rows) if self.rows else 0.0,
                "wilson_low": round(lo, 4),
                "wilson_high": round(hi, 4),
            }
        self.aggregate = out

    def to_json(self) -> str:
        return json.dumps(
            {"config": self.config, "samples": self.rows, "aggregate": self.aggregate},
            indent=2,
        )


def repeat_length_bound(rank: int, length: int) -> int:
    """ceil(C0 * ln N) with C0 = 11/ln(2n-1): the repeated-subword scale
    beyond which repeats are not expected in a random reduced word."""
    return math.ceil(11.0 / math.log(2 * rank - 1) * math.log(length))


def repeated_subword_experiment(cfg: SampleConfig, bound: int | None = None) -> StatsReport:
    """Longest repeated subword per sample, against the log-scale bound."""
    if bound is None:
        bound = repeat_length_bound(cfg.rank, cfg.length)
    report = StatsReport(config={**cfg.__dict__, "bound": bound})
    for i in range(cfg.samples):
        w = random_reduced_word(cfg, i)
        plain = longest_repeated_subword(w, include_inverses=False)
        with_inv = longest_repeated_subword(w, include_inverses=True)
        measured = with_inv if cfg.include_inverses else plain
        report.rows.append(
            {
                "sample": i,
                "longest_repeat": plain,
                "longest_repeat_with_inverses": with_inv,
                "within_bound": measured <= bound,
            }
        )
    report.finalize(["within_bound"])
    return report


def nonperiodic_coverage_experiment(
    cfg: SampleConfig, eps_target: float, min_len: int | None = None
) -> StatsReport:
    """Max disjoint coverage over repeated subwords of length >= min_len.

    Samples whose longest repeat stays below the scan bound contribute a
    coverage of zero; otherwise every repeated subword at or beyond the
    bound is scanned and the worst coverage recorded.
    """
    if min_len is None:
        min_len = repeat_length_bound(cfg.rank, cfg.length)
    report = StatsReport(
        config={**cfg.__dict__, "min_len": min_len, "eps_target": eps_target}
    )
    for i in range(cfg.samples):
        w = random_reduced_word(cfg, i)
        top = longest_repeated_subword(w, cfg.include_inverses)
        worst = 0.0
        worst_len = 0
        if top >= min_len:
            for gamma in repeated_subwords_at_least(w, min_len, cfg.include_inverses):
                if cfg.include_inverses:
                    cov = disjoint_coverage_bidirectional(w, gamma)
                else:
                    cov = disjoint_coverage(w, gamma)
                if cov > worst:
                    worst = cov
                    worst_len = len(gamma)
        report.rows.append(
            {
                "sample": i,
                "longest_repeat": top,
                "max_coverage": round(worst, 6),
                "worst_subword_len": worst_len,
                "within_eps": worst <= eps_target,
            }
        )
    report.finalize(["within_eps"])
    return report


def gap_distribution_experiment(
    cfg: SampleConfig, gamma_length: int = 2
) -> StatsReport:
    """Empirical gap histogram between disjoint occurrences of a short
    sampled pattern, with the mass-balance identity checked per sample."""
    report = StatsReport(config={**cfg.__dict__, "gamma_length": gamma_length})
    for i in range(cfg.samples):
        w = random_reduced_word(cfg, i)
        rng = cfg.sample_rng(i ^ 0x5F5F)
        gamma = Word(cfg.rank, random_reduced_letters(rng, cfg.rank, gamma_length))
        chars = strsearch.letters_to_chars(w.letters)
        pattern = strsearch.letters_to_chars(gamma.letters)
        positions = strsearch.greedy_disjoint_positions(chars, pattern)
        row: dict = {"sample": i, "gamma": str(gamma), "occurrences": len(positions)}
        if positions:
            hist = (
                complementary_distribution(w, gamma) if len(positions) > 1 else {}
            )
            covered = len(positions) * len(gamma)
            gaps = sum(length * count for length, count in hist.items())
            boundary = len(w) - covered - gaps
            row["gap_mass"] = gaps
            row["mass_balance_ok"] = boundary >= 0 and covered + gaps + boundary == len(w)
        else:
            row["mass_balance_ok"] = True
        report.rows.append(row)
    report.finalize(["mass_balance_ok"])
    return report


def alpha_injectivity_experiment(
    cfg: SampleConfig,
    graphs: Iterable[LabeledGraph] | None = None,
    alpha_target: float = 0.9,
    max_edges: int = 4,
    max_lifts: int = 16,
) -> StatsReport:
    """Over candidate graphs with no sub-cover of degree 1 or 2, measure
    the injectivity ratio of every lift of sampled reduced words;
    samples with no lift anywhere are recorded but not scored."""
    if graphs is None:
        graphs = [
            g
            for g in enumerate_candidates(cfg.rank, max_edges)
            if not has_sub_cover(g)
        ]
    else:
        graphs = list(graphs)
    report = StatsReport(
        config={**cfg.__dict__, "alpha_target": alpha_target, "graphs": len(graphs)}
    )
    for i in range(cfg.samples):
        w = random_reduced_word(cfg, i)
        worst: float | None = None
        lift_count = 0
        for g in graphs:
            for start in range(g.num_vertices):
                for lift in lift_paths(g, w, start, max_lifts=max_lifts):
                    ratio = alpha_injectivity(lift)
                    lift_count += 1
                    if worst is None or ratio < worst:
                        worst = ratio
        row: dict = {"sample": i, "lifts": lift_count}
        if worst is not None:
            row["min_alpha"] = round(worst, 6)
            row["alpha_ok"] = worst >= alpha_target
        report.rows.append(row)
    scored = [row for row in report.rows if "alpha_ok" in row]
    hits = sum(1 for row in scored if row["alpha_ok"])
    lo, hi = wilson_interval(hits, len(scored))
    report.finalize([])
    report.aggregate.update(
        {
            "lifting_samples": len(scored),
            "alpha_ok": {
                "fraction": hits / len(scored) if scored else 1.0,
                "wilson_low": round(lo, 4),
                "wilson_high": round(hi, 4),
            },
        }
    )
    return report
