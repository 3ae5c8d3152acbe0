"""Substitution morphisms: validity, bounded/growing letters, reduction, growth.

A substitution maps each letter of a finite alphabet to a nonempty word and
extends to words multiplicatively.  This module owns the exact combinatorial
machinery around it: the occurrence matrix (abelianization), the split of the
alphabet into bounded and growing letters, the reduced substitution obtained
by erasing bounded letters, primitivity, Perron growth constants, and the
compatibility check between the finite-word language and the two-sided
subshift it generates.

All counting is done with exact integer arithmetic (matrix powers over
Python ints); floating point only enters the growth-constant ratios.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

import numpy as np

from . import words as wd


class SubstitutionError(Exception):
    """Base error for invalid substitutions or unmet preconditions."""


class ErasingRuleError(SubstitutionError):
    pass


class UnknownLetterError(SubstitutionError):
    pass


class EmptySubshiftError(SubstitutionError):
    """No letter has unboundedly growing images; the subshift is empty."""


class NoGrowingLettersError(SubstitutionError):
    pass


class NotPrimitiveError(SubstitutionError):
    pass


class FixedPointError(SubstitutionError):
    pass


class Alphabet:
    """Ordered finite alphabet; every letter is one character carrying a real value.

    The values are the points of the real line the letters stand for; they
    are only consumed by the spectral operators.  Two letters may share a
    value only when explicitly allowed.
    """

    def __init__(
        self,
        letters: Iterable[str],
        values: Mapping[str, float] | None = None,
        *,
        allow_duplicate_values: bool = False,
    ):
        self.letters: tuple[str, ...] = tuple(letters)
        if not self.letters:
            raise SubstitutionError("alphabet must be nonempty")
        for ch in self.letters:
            if len(ch) != 1:
                raise SubstitutionError(f"letters must be single characters, got {ch!r}")
        if len(set(self.letters)) != len(self.letters):
            raise SubstitutionError("duplicate letters in alphabet")
        if values is None:
            values = {ch: float(i) for i, ch in enumerate(self.letters)}
        missing = [ch for ch in self.letters if ch not in values]
        if missing:
            raise SubstitutionError(f"missing values for letters {missing}")
        self.values: dict[str, float] = {ch: float(values[ch]) for ch in self.letters}
        if not allow_duplicate_values:
            if len({self.values[ch] for ch in self.letters}) != len(self.letters):
                raise SubstitutionError(
                    "duplicate letter values (pass allow_duplicate_values=True to permit)"
                )
        self._index = {ch: i for i, ch in enumerate(self.letters)}

    def index(self, ch: str) -> int:
        return self._index[ch]

    def value(self, ch: str) -> float:
        return self.values[ch]

    def __contains__(self, ch: str) -> bool:
        return ch in self._index

    def __len__(self) -> int:
        return len(self.letters)

    def __iter__(self):
        return iter(self.letters)

    def __repr__(self) -> str:
        return f"Alphabet({''.join(self.letters)!r})"


def mat_mul(a: Sequence[Sequence[int]], b: Sequence[Sequence[int]]) -> list[list[int]]:
    """Exact integer matrix product."""
    n, k, m = len(a), len(b), len(b[0])
    out = [[0] * m for _ in range(n)]
    for i in range(n):
        ai = a[i]
        oi = out[i]
        for t in range(k):
            c = ai[t]
            if c:
                bt = b[t]
                for j in range(m):
                    oi[j] += c * bt[j]
    return out


def mat_pow(a: Sequence[Sequence[int]], n: int) -> list[list[int]]:
    """Exact integer matrix power (n >= 0)."""
    size = len(a)
    result = [[1 if i == j else 0 for j in range(size)] for i in range(size)]
    base = [list(row) for row in a]
    while n > 0:
        if n & 1:
            result = mat_mul(result, base)
        base = mat_mul(base, base)
        n >>= 1
    return result


class Substitution:
    """A non-erasing substitution over an Alphabet.

    `rules[a]` is the image word of the letter a.  Instances are treated as
    immutable; derived data (occurrence matrix, image lengths) is cached.
    """

    def __init__(self, alphabet: Alphabet, rules: Mapping[str, str], name: str | None = None):
        self.alphabet = alphabet
        self.name = name
        self.rules: dict[str, str] = {}
        for ch in alphabet.letters:
            if ch not in rules:
                raise SubstitutionError(f"no rule for letter {ch!r}")
            image = rules[ch]
            if not image:
                raise ErasingRuleError(f"rule for {ch!r} is erasing (empty image)")
            for x in image:
                if x not in alphabet:
                    raise UnknownLetterError(f"rule for {ch!r} uses unknown letter {x!r}")
            self.rules[ch] = image
        extra = set(rules) - set(alphabet.letters)
        if extra:
            raise UnknownLetterError(f"rules given for letters outside the alphabet: {sorted(extra)}")
        self._lengths: list[dict[str, int]] = [{a: 1 for a in alphabet.letters}]

    @classmethod
    def from_rules(
        cls,
        rules: Mapping[str, str],
        name: str | None = None,
        values: Mapping[str, float] | None = None,
        *,
        allow_duplicate_values: bool = False,
    ) -> "Substitution":
        alphabet = Alphabet(sorted(rules), values, allow_duplicate_values=allow_duplicate_values)
        return cls(alphabet, rules, name)

    @property
    def letters(self) -> tuple[str, ...]:
        return self.alphabet.letters

    def apply(self, w: str) -> str:
        rules = self.rules
        return "".join(rules[ch] for ch in w)

    def iterate(self, w: str, n: int) -> str:
        for _ in range(n):
            w = self.apply(w)
        return w

    @property
    def max_image_length(self) -> int:
        return max(len(img) for img in self.rules.values())

    def abelianization(self) -> list[list[int]]:
        """Occurrence matrix M with M[i][j] = (count of letter j in the image of letter i)."""
        letters = self.letters
        return [[self.rules[a].count(b) for b in letters] for a in letters]

    def image_length(self, letter: str, n: int) -> int:
        """|S^n(letter)| by the exact length recursion."""
        while len(self._lengths) <= n:
            prev = self._lengths[-1]
            self._lengths.append(
                {a: sum(prev[b] for b in self.rules[a]) for a in self.letters}
            )
        return self._lengths[n][letter]

    def word_image_length(self, w: str, n: int) -> int:
        """|S^n(w)| for a word w, exact."""
        return sum(self.image_length(ch, n) for ch in w)

    def first_letter(self, ch: str) -> str:
        return self.rules[ch][0]

    def last_letter(self, ch: str) -> str:
        return self.rules[ch][-1]

    def reachable(self, start: Iterable[str]) -> frozenset[str]:
        """Letters occurring in some S^n(a), n >= 0, for a in start."""
        seen = set(start)
        frontier = list(seen)
        while frontier:
            nxt = []
            for a in frontier:
                for b in set(self.rules[a]):
                    if b not in seen:
                        seen.add(b)
                        nxt.append(b)
            frontier = nxt
        return frozenset(seen)

    def letter_set_orbit(self, letter: str) -> tuple[list[frozenset[str]], int, int]:
        """The sequence letters(S^n(letter)) up to its cycle.

        Returns (sets, preperiod, period) with sets[n] = letters of S^n(letter)
        for n < preperiod + period; the tail repeats with the given period.
        """
        seen: dict[frozenset[str], int] = {}
        sets: list[frozenset[str]] = []
        cur = frozenset({letter})
        while cur not in seen:
            seen[cur] = len(sets)
            sets.append(cur)
            cur = frozenset().union(*(frozenset(self.rules[x]) for x in cur))
        preperiod = seen[cur]
        period = len(sets) - preperiod
        return sets, preperiod, period

    def __repr__(self) -> str:
        rules = ", ".join(f"{a}->{self.rules[a]}" for a in self.letters)
        label = f" {self.name!r}" if self.name else ""
        return f"Substitution({rules}{label})"


@dataclass(frozen=True)
class AlphabetSplit:
    """Bounded letters B (images stay bounded) versus growing letters C.

    `eternally_single` are the letters whose every iterated image is a single
    letter; they form the core of B.  B is invariant under the substitution.
    """

    bounded: frozenset[str]
    growing: frozenset[str]
    eternally_single: frozenset[str]
    stabilization_depth: int


def bounded_letters(s: Substitution) -> AlphabetSplit:
    """Exact B/C split via letter-content cycles.

    A letter is bounded iff every letter set on the cycle of
    n |-> letters(S^n(a)) consists of eternally-single letters: image length
    is non-decreasing, and any recurring letter that ever branches pumps the
    length up unboundedly.  Terminates because there are at most 2^|A|
    letter sets.
    """
    single = {a for a in s.letters if len(s.rules[a]) == 1}
    while True:
        kept = {a for a in single if s.rules[a] in single}
        if kept == single:
            break
        single = kept
    eternally_single = frozenset(single)

    bounded = set()
    depth = 0
    for a in s.letters:
        sets, preperiod, period = s.letter_set_orbit(a)
        depth = max(depth, preperiod + period)
        cycle = sets[preperiod:]
        if all(st <= eternally_single for st in cycle):
            bounded.add(a)
    growing = frozenset(set(s.letters) - bounded)
    return AlphabetSplit(
        bounded=frozenset(bounded),
        growing=growing,
        eternally_single=eternally_single,
        stabilization_depth=depth,
    )


@dataclass
class ValidationReport:
    """Outcome of structural validation of a substitution.

    `witness` is a growing letter chosen to maximize reachability;
    `full_reachability` says whether every letter occurs in some iterate of
    the witness (after which no pruning is needed).  `reachable` is the
    pruned alphabet: the letters that survive restriction to the witness.
    """

    substitution: Substitution
    split: AlphabetSplit
    witness: str
    full_reachability: bool
    reachable: tuple[str, ...]

    @property
    def growing(self) -> frozenset[str]:
        return self.split.growing


def validate(definition: Mapping | Substitution) -> ValidationReport:
    """Build and validate a substitution from a definition mapping.

    The mapping uses the on-disk shape: {"name", "alphabet": [{"symbol",
    "value"}...], "rules": {...}}, or simply {"rules": ...}.  A Substitution
    instance is accepted as-is.  Raises EmptySubshiftError when no letter
    grows.
    """
    if isinstance(definition, Substitution):
        s = definition
    else:
        name = definition.get("name")
        rules = definition.get("rules")
        if not isinstance(rules, Mapping) or not rules:
            raise SubstitutionError("definition needs a nonempty 'rules' mapping")
        for k, v in rules.items():
            if not isinstance(k, str) or not isinstance(v, str):
                raise SubstitutionError(
                    f"rules must map symbol strings to word strings, got {k!r}: {v!r}"
                )
        allow_dupes = bool(definition.get("allow_duplicate_values", False))
        alpha_entries = definition.get("alphabet")
        if alpha_entries is not None:
            try:
                letters = [entry["symbol"] for entry in alpha_entries]
                values = {entry["symbol"]: float(entry["value"]) for entry in alpha_entries}
            except (TypeError, KeyError, ValueError) as exc:
                raise SubstitutionError(
                    "alphabet entries must be objects with 'symbol' and a real 'value' "
                    f"({exc!r})"
                ) from exc
            coupling = definition.get("potential_coupling")
            if coupling is not None:
                values = {ch: float(coupling) * v for ch, v in values.items()}
            alphabet = Alphabet(letters, values, allow_duplicate_values=allow_dupes)
        else:
            alphabet = Alphabet(sorted(rules), allow_duplicate_values=allow_dupes)
        s = Substitution(alphabet, rules, name)

    split = bounded_letters(s)
    if not split.growing:
        raise EmptySubshiftError(
            "no letter has unbounded image growth; the two-sided subshift is empty"
        )
    # pick the growing letter that reaches the most letters (ties: alphabet order)
    best = None
    best_reach: frozenset[str] = frozenset()
    for e in s.letters:
        if e not in split.growing:
            continue
        reach = s.reachable([e])
        if len(reach) > len(best_reach):
            best, best_reach = e, reach
    assert best is not None
    return ValidationReport(
        substitution=s,
        split=split,
        witness=best,
        full_reachability=(best_reach == frozenset(s.letters)),
        reachable=tuple(a for a in s.letters if a in best_reach),
    )


def prune_to_reachable(s: Substitution, witness: str) -> Substitution:
    """Restrict the substitution to the letters reachable from `witness`."""
    keep = s.reachable([witness])
    letters = [a for a in s.letters if a in keep]
    alphabet = Alphabet(
        letters,
        {a: s.alphabet.value(a) for a in letters},
        allow_duplicate_values=True,
    )
    return Substitution(alphabet, {a: s.rules[a] for a in letters}, s.name)


@dataclass
class ReducedSubstitution:
    """The substitution with bounded letters erased, acting on the growing letters.

    `base` is the reduced substitution itself; `original` is kept because
    growth estimates compare iterate lengths of the original against the
    Perron eigenvalue of the reduced one.  Nothing here assumes the reduced
    substitution is primitive or even growing: without a bounded-gaps
    certificate a growing letter may well reduce to a non-growing rule.
    """

    base: Substitution
    original: Substitution
    split: AlphabetSplit

    def project(self, w: str) -> str:
        growing = self.split.growing
        return "".join(ch for ch in w if ch in growing)

    def abelianization(self) -> list[list[int]]:
        return self.base.abelianization()

    @property
    def letters(self) -> tuple[str, ...]:
        return self.base.letters


def reduced_substitution(s: Substitution, split: AlphabetSplit) -> ReducedSubstitution:
    """Erase bounded letters from every rule; verify the erasure intertwines iteration."""
    if not split.growing:
        raise NoGrowingLettersError("cannot reduce: no growing letters")
    growing = [a for a in s.letters if a in split.growing]

    def project(w: str) -> str:
        return "".join(ch for ch in w if ch in split.growing)

    rules = {}
    for c in growing:
        image = project(s.rules[c])
        if not image:
            raise SubstitutionError(
                f"reduced rule for {c!r} is empty; {c!r} cannot be a growing letter"
            )
        rules[c] = image
    alphabet = Alphabet(
        growing,
        {a: s.alphabet.value(a) for a in growing},
        allow_duplicate_values=True,
    )
    base = Substitution(alphabet, rules, name=(s.name and s.name + "~"))
    reduced = ReducedSubstitution(base=base, original=s, split=split)

    # erasure must commute with iteration: check to depth 6 with a size guard
    for c in growing:
        w = c
        for n in range(1, 7):
            if len(w) > 20000:
                break
            w = s.apply(w)
            if project(w) != base.iterate(c, n):
                raise SubstitutionError(
                    f"erasure does not intertwine iteration at letter {c!r}, depth {n}"
                )
    return reduced


@dataclass(frozen=True)
class PrimitivityResult:
    primitive: bool
    power: int | None
    zero_entry: tuple[int, str, str] | None

    def __bool__(self) -> bool:
        return self.primitive


def is_primitive(s: Substitution | ReducedSubstitution) -> PrimitivityResult:
    """Primitivity via positivity of a power of the occurrence matrix.

    If M^r is entrywise positive for some r it already is for
    r = (n-1)^2 + 1, so scanning up to that bound decides.  A zero entry at
    the bound is returned as the certificate of failure.
    """
    letters = s.letters if isinstance(s, Substitution) else s.base.letters
    m = s.abelianization()
    n = len(m)
    bound = (n - 1) ** 2 + 1
    power = m
    for r in range(1, bound + 1):
        if all(x > 0 for row in power for x in row):
            return PrimitivityResult(primitive=True, power=r, zero_entry=None)
        if r < bound:
            power = mat_mul(power, m)
    for i, row in enumerate(power):
        for j, x in enumerate(row):
            if x == 0:
                return PrimitivityResult(
                    primitive=False, power=None, zero_entry=(bound, letters[i], letters[j])
                )
    raise AssertionError("unreachable")


def perron_eigenvalue(matrix: Sequence[Sequence[int]], *, rtol: float = 1e-12) -> float:
    """Dominant eigenvalue of a primitive nonnegative matrix by power iteration."""
    m = np.asarray(matrix, dtype=float)
    v = np.ones(m.shape[0])
    theta = 0.0
    stable = 0
    for _ in range(200000):
        w = m @ v
        nw = float(np.linalg.norm(w))
        if nw == 0.0:
            raise NotPrimitiveError("matrix power iteration collapsed to zero")
        new_theta = nw / float(np.linalg.norm(v))
        v = w / nw
        if theta and abs(new_theta - theta) <= rtol * abs(new_theta):
            stable += 1
            if stable >= 5:
                return new_theta
        else:
            stable = 0
        theta = new_theta
    return theta


@dataclass
class GrowthEstimate:
    """Window constants for the growth sandwich lambda*theta^n <= |S^n(v)| <= rho*theta^n.

    lambda/rho are the extreme ratios |S^n(v)| / theta^n over v in `words`
    and 1 <= n <= n_checked; by construction the sandwich holds on exactly
    that range and nothing beyond it is claimed.
    """

    theta: float
    lambda_v: float
    rho_v: float
    words: tuple[str, ...]
    n_checked: int

    def verify(self, s: Substitution, *, slack: float = 1e-9) -> bool:
        """Re-check the sandwich against exact iterate lengths."""
        for v in self.words:
            for n in range(1, self.n_checked + 1):
                length = s.word_image_length(v, n)
                scale = self.theta**n
                if not (self.lambda_v * scale * (1 - slack) <= length <= self.rho_v * scale * (1 + slack)):
                    return False
        return True


def perron_growth(
    reduced: ReducedSubstitution,
    words_with_growing: Iterable[str],
    n_max: int = 30,
    *,
    rtol: float = 1e-12,
) -> GrowthEstimate:
    """Growth constants for a finite set of words, each containing a growing letter.

    theta is the Perron eigenvalue of the reduced substitution (which must be
    primitive); the lambda/rho constants are empirical extrema of the exact
    integer lengths |S^n(v)| against theta^n for n up to n_max.
    """
    prim = is_primitive(reduced)
    if not prim.primitive:
        raise NotPrimitiveError(
            f"reduced substitution is not primitive (zero at {prim.zero_entry})"
        )
    word_list = tuple(sorted(set(words_with_growing)))
    if not word_list:
        raise ValueError("need at least one word")
    growing = reduced.split.growing
    for v in word_list:
        if not any(ch in growing for ch in v):
            raise ValueError(f"word {v!r} contains no growing letter")
    theta = perron_eigenvalue(reduced.abelianization(), rtol=rtol)
    s = reduced.original
    lo = math.inf
    hi = 0.0
    for v in word_list:
        for n in range(1, n_max + 1):
            ratio = s.word_image_length(v, n) / theta**n
            lo = min(lo, ratio)
            hi = max(hi, ratio)
    return GrowthEstimate(theta=theta, lambda_v=lo, rho_v=hi, words=word_list, n_checked=n_max)


def fixed_point_prefix(s: Substitution, letter: str, length: int) -> str:
    """First `length` letters of the one-sided fixed point grown from `letter`.

    Requires S^p(letter) to begin with `letter` for some power p (the letter's
    first-letter orbit returns to it) with eventually growing images.  When
    that structure is absent the caller should consult check_compatibility
    for what the language actually supports.
    """
    if letter not in s.alphabet:
        raise UnknownLetterError(f"unknown letter {letter!r}")
    if length < 0:
        raise ValueError("length must be >= 0")
    # first-letter orbit: find the return time of `letter`
    orbit = [letter]
    cur = letter
    period = None
    for _ in range(len(s.letters) + 1):
        cur = s.first_letter(cur)
        if cur == letter:
            period = len(orbit)
            break
        orbit.append(cur)
    if period is None:
        raise FixedPointError(
            f"{letter!r} is not on a first-letter cycle: no one-sided fixed point "
            "starts with it (see check_compatibility for alternatives)"
        )
    q = period
    for k in range(1, 64 * len(s.letters) + 1):
        if s.image_length(letter, k * period) >= 2:
            q = k * period
            break
    else:
        raise FixedPointError(f"images of {letter!r} never grow; no fixed point to expand")
    w = letter
    while len(w) < length:
        w = s.iterate(w[: max(length, 1)], q)
    return w[:length]


@dataclass
class CompatibilityResult:
    """Three-valued answer to: is every finite factor realized inside the subshift?

    status is one of "holds-certified", "fails-certified", "unknown".
    `detail` carries the machine-checkable certificate: a recurrence or
    seed-pair witness for holds, a one-sided-blocked factor for fails.
    """

    status: str
    detail: dict


def check_compatibility(s: Substitution, depth: int = 16) -> CompatibilityResult:
    """Decide (partially) whether the factor language equals the subshift language.

    Refutation: the factor language is exact up to its depth, so a factor
    with no single-letter extension on one side can never occur inside a
    two-sided sequence.  Certification: either some growing letter e recurs
    strictly inside S^p(e) and reaches every letter (every factor then sits
    inside some S^N(e) with margins growing along multiples of p), or a
    seed pair a.b of growing letters with S^p(a) ending in a, S^p(b)
    beginning with b and ab in the language builds two-sided fixed points of
    S^p covering everything the pair reaches.  Anything else: unknown.
    """
    split = bounded_letters(s)
    all_letters = frozenset(s.letters)
    factors = wd.factor_language(
        s, max(4, depth + 1), max_rounds=max(64, 3 * depth + 16)
    )
    if factors.saturated:
        # refutation scan, small words first
        for w in sorted(factors.words, key=lambda w: (len(w), w)):
            if len(w) >= factors.max_length:
                break
            if not any((w + x) in factors for x in s.letters):
                return CompatibilityResult(
                    "fails-certified", {"blocked_factor": w, "side": "right"}
                )
            if not any((x + w) in factors for x in s.letters):
                return CompatibilityResult(
                    "fails-certified", {"blocked_factor": w, "side": "left"}
                )

    # interior recurrence certificate
    for e in sorted(split.growing):
        if s.reachable([e]) != all_letters:
            continue
        w = e
        for p in range(1, depth + 1):
            if len(w) > 200000:
                break
            w = s.apply(w)
            idx = w.find(e, 1)
            if 0 < idx < len(w) - 1:
                return CompatibilityResult(
                    "holds-certified",
                    {"kind": "interior-recurrence", "letter": e, "power": p},
                )

    # seed-pair certificate
    if factors.saturated and factors.max_length >= 2:
        ends = {}
        begins = {}
        for x in sorted(split.growing):
            cur = x
            for p in range(1, depth + 1):
                cur = s.last_letter(cur)
                if cur == x:
                    ends[x] = p
                    break
            cur = x
            for p in range(1, depth + 1):
                cur = s.first_letter(cur)
                if cur == x:
                    begins[x] = p
                    break
        for x in sorted(ends):
            for y in sorted(begins):
                p = math.lcm(ends[x], begins[y])
                if p > depth:
                    continue
                if (x + y) in factors and (s.reachable([x]) | s.reachable([y])) == all_letters:
                    return CompatibilityResult(
                        "holds-certified",
                        {"kind": "seed-pair", "left": x, "right": y, "power": p},
                    )

    return CompatibilityResult("unknown", {"depth": depth})
