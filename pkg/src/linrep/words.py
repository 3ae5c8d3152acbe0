"""Finite-word primitives and the factor language of a substitution.

Words are plain Python strings over single-character letters.  The factor
language of a substitution S collects every subword of every iterate
S^n(a), a in the alphabet, up to a requested length; it is computed as the
least fixed point of the subword-of-image closure and is exact when the
iteration saturates.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

Word = str


class UnsaturatedFactorSetError(ValueError):
    """An operation required a saturated factor set but got a capped one."""


def count_occurrences(pattern: Word, text: Word) -> int:
    """Number of (possibly overlapping) occurrences of `pattern` in `text`.

    The empty pattern is rejected: it would occur at every position and
    poisons every counting argument built on top of this.
    """
    if not pattern:
        raise ValueError("occurrence counting needs a nonempty pattern")
    count = 0
    start = 0
    while True:
        i = text.find(pattern, start)
        if i < 0:
            return count
        count += 1
        start = i + 1


def subwords(w: Word, max_length: int) -> set[Word]:
    """All nonempty factors of `w` of length <= max_length."""
    n = len(w)
    out: set[str] = set()
    for i in range(n):
        top = min(max_length, n - i)
        for length in range(1, top + 1):
            out.add(w[i : i + length])
    return out


@dataclass
class FactorSet:
    """Factors of a substitution language up to `max_length`.

    `saturated` is True when the closure iteration reached a fixed point, in
    which case `words` is exactly the set of nonempty factors of length
    <= max_length.  `witnesses` maps each factor w to a pair (a, n) with w a
    subword of S^n(a); witnesses are kept so they can be re-checked.
    """

    substitution: object
    max_length: int
    words: frozenset[Word]
    saturated: bool
    witnesses: dict[Word, tuple[str, int]]
    rounds: int
    _by_length: dict[int, tuple[Word, ...]] = field(default_factory=dict, repr=False)

    def __contains__(self, w: Word) -> bool:
        return w in self.words

    def words_of_length(self, length: int) -> tuple[Word, ...]:
        """Sorted tuple of the factors of exactly the given length."""
        if not self._by_length:
            grouped: dict[int, list[Word]] = {}
            for w in self.words:
                grouped.setdefault(len(w), []).append(w)
            for k, ws in grouped.items():
                ws.sort()
                self._by_length[k] = tuple(ws)
        return self._by_length.get(length, ())

    def complexity(self, length: int) -> int:
        """Factor-count p(length)."""
        return len(self.words_of_length(length))

    def require_saturated(self) -> None:
        if not self.saturated:
            raise UnsaturatedFactorSetError(
                "factor set was capped before reaching its fixed point "
                f"(max_length={self.max_length}, rounds={self.rounds})"
            )


def factor_language(
    s,
    max_length: int,
    *,
    max_rounds: int = 64,
    max_words: int = 10**6,
    max_chars_per_letter: int = 4 * 10**6,
) -> FactorSet:
    """Factors of length <= max_length of all iterates S^n(a).

    Closure semantics: seed with the single letters (level 0) and repeatedly
    add every subword of the image of anything already present, until
    nothing new appears.  The iteration is evaluated along the per-letter
    iterate strings S^n(a): one stable round certifies the fixed point,
    because a factor of S^m(a) has all its image's subwords inside
    S^(m+1)(a).  Hitting any cap yields an explicit unsaturated result,
    never a silent truncation.
    """
    if max_length < 1:
        raise ValueError("max_length must be >= 1")
    letters = list(s.letters)
    words: set[str] = set()
    witnesses: dict[str, tuple[str, int]] = {}

    def harvest(text: str, first_new_index: int, origin: tuple[str, int]) -> bool:
        # `words` stays prefix-closed: at each position add windows longest
        # first and stop at the first known one, whose prefixes are all known
        added = False
        n = len(text)
        lo = max(0, first_new_index - max_length + 1)
        for i in range(lo, n):
            top = min(max_length, n - i)
            length = top
            while length >= 1:
                w = text[i : i + length]
                if w in words:
                    break
                words.add(w)
                witnesses[w] = origin
                added = True
                length -= 1
        return added

    strings = {a: a for a in letters}
    for a in letters:
        harvest(a, 0, (a, 0))

    saturated = False
    rounds = 0
    truncated = False
    for n in range(1, max_rounds + 1):
        rounds = n
        added_this_round = False
        for a in letters:
            old = strings[a]
            new = s.apply(old)
            if len(new) > max_chars_per_letter:
                truncated = True
                new = new[:max_chars_per_letter]
            # when the new iterate extends the old one, only windows touching
            # the fresh suffix can be new
            start = len(old) if new.startswith(old) else 0
            strings[a] = new
            if harvest(new, start, (a, n)):
                added_this_round = True
        if len(words) > max_words:
            break
        if truncated:
            break
        if not added_this_round:
            saturated = True
            break

    if truncated and len(words) <= max_words:
        # iterate strings outgrew the budget before the window sets settled
        # (slow new factors riding on fast total growth): finish with the
        # word-by-word closure, which is slower but memory-flat
        saturated, extra_rounds = _closure_finish(
            s, max_length, words, witnesses, max_rounds, max_words
        )
        rounds += extra_rounds

    return FactorSet(
        substitution=s,
        max_length=max_length,
        words=frozenset(words),
        saturated=saturated,
        witnesses=witnesses,
        rounds=rounds,
    )


def _closure_finish(
    s,
    max_length: int,
    words: set[str],
    witnesses: dict[str, tuple[str, int]],
    max_rounds: int,
    max_words: int,
) -> tuple[bool, int]:
    """Literal closure: add subwords of the image of every word until stable.

    Only maximal pending words are expanded: a word inside another
    contributes a subset of its cover's image subwords, so skipping it
    changes nothing about the fixed point.
    """
    sep = _separator_for(s.letters)
    processed_join = sep
    pending = set(words)
    rounds = 0
    while pending and rounds < max_rounds:
        rounds += 1
        fresh: set[str] = set()
        batch: list[str] = []
        batch_join = sep
        for w in sorted(pending, key=len, reverse=True):
            if w in processed_join or w in batch_join:
                continue
            batch.append(w)
            batch_join += w + sep
        for w in batch:
            base = witnesses[w]
            image = s.apply(w)
            n = len(image)
            for i in range(n):
                top = min(max_length, n - i)
                length = top
                while length >= 1:  # words is prefix-closed, see harvest
                    u = image[i : i + length]
                    if u in words:
                        break
                    words.add(u)
                    witnesses[u] = (base[0], base[1] + 1)
                    fresh.add(u)
                    length -= 1
        processed_join += batch_join[1:]
        if len(words) > max_words:
            return False, rounds
        pending = fresh
    return (not pending), rounds


def _separator_for(letters) -> str:
    used = set(letters)
    for code in range(1, 0x110000):
        ch = chr(code)
        if ch not in used:
            return ch
    raise RuntimeError("no separator character available")


def repetitivity_function(factors: FactorSet, n: int) -> int | None:
    """Smallest L with: every factor of length L contains every factor of length n.

    Returns None when no such L exists within factors.max_length (the
    sentinel case; e.g. a letter that does not occur with bounded gaps).
    Monotone in L, so the first success of the upward scan is the minimum.
    """
    factors.require_saturated()
    if n < 1 or n > factors.max_length:
        raise ValueError(f"n={n} outside 1..{factors.max_length}")
    targets = factors.words_of_length(n)
    if not targets:
        raise ValueError(f"factor set has no words of length {n}")
    for L in range(n, factors.max_length + 1):
        candidates = factors.words_of_length(L)
        if candidates and all(t in w for w in candidates for t in targets):
            return L
    return None


def gap_bound(factors: FactorSet, v: Word) -> int | None:
    """Smallest L with: every factor of length L contains `v` (None if not found)."""
    factors.require_saturated()
    for L in range(len(v), factors.max_length + 1):
        candidates = factors.words_of_length(L)
        if candidates and all(v in w for w in candidates):
            return L
    return None


@dataclass(frozen=True)
class ReturnWordSet:
    """Return words of a word v, with a completeness certificate.

    `complete` is True when the factor set is provably deep enough to contain
    every return word: any return word x of v satisfies |x| <= kappa, where
    kappa is a certified gap bound for v (a strictly interior occurrence of v
    inside a window of length kappa would be a third occurrence), so depth
    kappa + |v| suffices.
    """

    base: Word
    words: frozenset[Word]
    complete: bool
    kappa: int | None
    max_observed_gap: int | None


def return_words(s, v: Word, factors: FactorSet) -> ReturnWordSet:
    """All x with xv in the language, xv starting with v and containing v exactly twice."""
    factors.require_saturated()
    if v not in factors:
        raise ValueError(f"{v!r} is not a factor at depth {factors.max_length}")
    found = set()
    max_gap = None
    for w in factors.words:
        if len(w) > len(v) and w.startswith(v) and w.endswith(v):
            if count_occurrences(v, w) == 2:
                x = w[: len(w) - len(v)]
                found.add(x)
                gap = len(x)
                max_gap = gap if max_gap is None else max(max_gap, gap)
    kappa = gap_bound(factors, v)
    complete = kappa is not None and factors.max_length >= kappa + len(v)
    return ReturnWordSet(
        base=v,
        words=frozenset(found),
        complete=complete,
        kappa=kappa,
        max_observed_gap=max_gap,
    )


def find_power(
    factors: FactorSet,
    base_constraint: Callable[[Word], bool],
    exponent: int,
) -> Word | None:
    """Shortest u with base_constraint(u) and u^exponent + u[0] in the language.

    Ties are broken lexicographically.  Returns None when nothing is found
    within the factor-set depth (a value, not an error: deeper sets may
    still succeed).
    """
    factors.require_saturated()
    if exponent < 1:
        raise ValueError("exponent must be >= 1")
    longest_base = (factors.max_length - 1) // exponent
    for m in range(1, longest_base + 1):
        for u in factors.words_of_length(m):
            if base_constraint(u) and (u * exponent + u[0]) in factors:
                return u
    return None


def palindromes(factors: FactorSet) -> list[Word]:
    """All palindromic factors, sorted by length then lexicographically."""
    factors.require_saturated()
    return sorted((w for w in factors.words if w == w[::-1]), key=lambda w: (len(w), w))


def distinct_windows(text: str, length: int) -> set[str]:
    """Distinct length-`length` windows of a long sample string."""
    return {text[i : i + length] for i in range(len(text) - length + 1)}
