"""Frequent-sequence mining over sequences of itemsets (PrefixSpan).

A sequence is an ordered list of itemsets; an itemset is a set of string
symbols. Mining grows patterns in lexicographic order with two extension
moves: appending a new single-item itemset (sequence extension) or adding
a larger item to the last itemset (itemset extension). Candidate counting
uses per-sequence frontier sets: all positions where the current pattern's
last itemset can be embedded.
"""

import math
from dataclasses import dataclass

from scistory.errors import ParameterError

Pattern = tuple[tuple[str, ...], ...]  # itemsets as sorted tuples


@dataclass(frozen=True)
class FrequentPattern:
    pattern: Pattern
    support_count: int
    support_ratio: float


def normalize_sequence(seq) -> tuple[frozenset[str], ...]:
    """Validate and freeze one sequence of itemsets."""
    out = []
    for itemset in seq:
        items = frozenset(itemset)
        if not items:
            raise ParameterError("empty itemset in sequence")
        for item in items:
            if not isinstance(item, str) or not item:
                raise ParameterError(f"invalid symbol {item!r}")
        out.append(items)
    return tuple(out)


def support_threshold(min_support_ratio: float, db_size: int) -> int:
    """Smallest count satisfying the ratio; tolerant of float representation."""
    return max(1, math.ceil(min_support_ratio * db_size - 1e-9))


def contains(seq, pattern) -> bool:
    """True iff pattern's itemsets embed into seq's itemsets in order, as subsets.

    Greedy leftmost matching is exact here: if any embedding exists, taking
    the earliest superset itemset at each step also succeeds.
    """
    pos = 0
    items = [frozenset(s) for s in seq]
    for wanted in pattern:
        wanted = frozenset(wanted)
        while pos < len(items) and not wanted <= items[pos]:
            pos += 1
        if pos == len(items):
            return False
        pos += 1
    return True


def _pattern_key(pattern: Pattern):
    return (len(pattern), pattern)


def prefixspan(db, min_support_ratio: float, max_len: int | None = None) -> list[FrequentPattern]:
    """Mine all patterns contained in >= ceil(ratio * |db|) sequences.

    Output is deterministic: sorted by pattern length, then lexicographically
    over the sorted-tuple representation of itemsets.
    """
    if not (0 < min_support_ratio <= 1):
        raise ParameterError(f"min_support_ratio must be in (0, 1], got {min_support_ratio}")
    sequences = [normalize_sequence(s) for s in db]
    if not sequences:
        return []
    threshold = support_threshold(min_support_ratio, len(sequences))

    results: list[FrequentPattern] = []

    def grow(pattern: list[tuple[str, ...]], frontiers: list[tuple[int, set[int]]]):
        """frontiers: (sequence index, positions where the last itemset matched)."""
        # sequence extensions: any item occurring strictly after a frontier position
        s_candidates: dict[str, list[tuple[int, set[int]]]] = {}
        # itemset extensions: items > max(last itemset) available at a frontier position
        i_candidates: dict[str, list[tuple[int, set[int]]]] = {}
        last = pattern[-1] if pattern else ()
        last_max = last[-1] if last else None
        last_set = frozenset(last)

        for si, positions in frontiers:
            seq = sequences[si]
            start = 0 if not pattern else min(positions) + 1
            seen: dict[str, set[int]] = {}
            for p in range(start, len(seq)):
                for item in seq[p]:
                    seen.setdefault(item, set()).add(p)
            for item, where in seen.items():
                s_candidates.setdefault(item, []).append((si, where))
            if pattern and last_max is not None:
                iseen: dict[str, set[int]] = {}
                for p in positions:
                    for item in seq[p]:
                        if item > last_max:
                            iseen.setdefault(item, set()).add(p)
                for item, where in iseen.items():
                    i_candidates.setdefault(item, []).append((si, where))

        extensions = []
        for item in sorted(i_candidates):
            supported = i_candidates[item]
            if len(supported) >= threshold:
                new_pattern = pattern[:-1] + [tuple([*last, item])]
                extensions.append((new_pattern, supported, len(supported)))
        if max_len is None or len(pattern) < max_len:
            for item in sorted(s_candidates):
                supported = s_candidates[item]
                if len(supported) >= threshold:
                    new_pattern = pattern + [(item,)]
                    extensions.append((new_pattern, supported, len(supported)))

        for new_pattern, supported, count in extensions:
            results.append(
                FrequentPattern(
                    pattern=tuple(new_pattern),
                    support_count=count,
                    support_ratio=count / len(sequences),
                )
            )
            grow(new_pattern, supported)

    grow([], [(si, set()) for si in range(len(sequences))])
    results.sort(key=lambda fp: _pattern_key(fp.pattern))
    return results
