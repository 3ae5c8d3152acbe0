"""Unique 1-partitions for two-letter nonprimitive substitutions.

Throughout, the substitution acts on {a, b} with S(b) = b and |S(a)| > 1.
A 1-partition of a word chops it into blocks from {S(a), b} with a proper
suffix of a block in front and a proper prefix behind (full blocks are
canonically represented as blocks, not as boundary remainders).  For
minimal aperiodic systems all 1-partitions of a factor agree away from a
boundary strip of computable half-width L, which makes the cut positions
locally recognizable from (2L+1)-windows.

The half-width follows two routes: when the doubled growing letter occurs
inside S(a), L = L0 + 2|S(a)b| with L0 the length of the longest power of a
subword of S(a) inside the language; otherwise L = (N+2) * 2|S(a)| with N
the largest exponent any short factor achieves.
"""

from __future__ import annotations

from dataclasses import dataclass
from . import words as wd
from .classify import YES, ClassificationReport
from .substitution import Substitution, SubstitutionError


class ShapeError(SubstitutionError):
    """The substitution is not of the two-letter fixed-letter shape."""


MAX_PARTITIONS = 10**4


def shape_letters(s: Substitution) -> tuple[str, str]:
    """Return (growing, fixed) for the two-letter fixed-letter shape, or raise."""
    if len(s.letters) != 2:
        raise ShapeError("requires a two-letter alphabet")
    fixed = [x for x in s.letters if s.rules[x] == x]
    if len(fixed) != 1:
        raise ShapeError("requires exactly one letter fixed by the substitution")
    b = fixed[0]
    a = next(x for x in s.letters if x != b)
    if len(s.rules[a]) <= 1:
        raise ShapeError("the non-fixed letter must have an image of length > 1")
    return a, b


@dataclass(frozen=True)
class OnePartition:
    """A decomposition target = z0 . blocks . z_end with blocks in {S(a), b}.

    cut_positions holds every block boundary, starting at |z0| and ending at
    |target| - |z_end|; consecutive cuts delimit exactly one block.
    """

    target: str
    z0: str
    blocks: tuple[str, ...]
    z_end: str
    cut_positions: tuple[int, ...]

    def interior_cuts(self, half_width: int) -> tuple[int, ...]:
        lo, hi = half_width, len(self.target) - half_width
        return tuple(c for c in self.cut_positions if lo <= c <= hi)


def enumerate_one_partitions(s: Substitution, w: str) -> list[OnePartition]:
    """All 1-partitions of w, shorter front remainder first.

    Exhaustive search with memoization on the position; deterministic
    ordering.  Raises when w uses letters outside the two-letter alphabet.
    """
    a, b = shape_letters(s)
    alpha = s.rules[a]
    foreign = set(w) - {a, b}
    if foreign:
        raise ValueError(f"word uses letters {sorted(foreign)} outside the alphabet")
    n = len(w)

    memo: dict[int, list[tuple[int, ...]]] = {}

    def parse(i: int) -> list[tuple[int, ...]]:
        got = memo.get(i)
        if got is not None:
            return got
        res: list[tuple[int, ...]] = []
        tail_len = n - i
        if tail_len == 0 or (tail_len < len(alpha) and alpha.startswith(w[i:])):
            res.append((i,))
        if w.startswith(b, i):
            res.extend((i,) + rest for rest in parse(i + 1))
        if w.startswith(alpha, i):
            res.extend((i,) + rest for rest in parse(i + len(alpha)))
        if len(res) > MAX_PARTITIONS:
            raise RuntimeError(f"more than {MAX_PARTITIONS} partitions; refusing")
        memo[i] = res
        return res

    starts = [0] + [
        k for k in range(1, min(len(alpha), n + 1)) if alpha.endswith(w[:k])
    ]
    out = []
    for z0len in starts:
        for cuts in parse(z0len):
            blocks = tuple(w[c1:c2] for c1, c2 in zip(cuts, cuts[1:]))
            out.append(
                OnePartition(
                    target=w,
                    z0=w[:z0len],
                    blocks=blocks,
                    z_end=w[cuts[-1] :],
                    cut_positions=cuts,
                )
            )
    out.sort(key=lambda p: (len(p.z0), p.cut_positions))
    return out


def power_bound(s: Substitution, factors: wd.FactorSet) -> int:
    """L0: the longest |v^n| with v a subword of S(a) and v^n in the language.

    Certified: for the maximal exponent found, the (n+1)-st power still fits
    inside the factor-set depth, so its absence is meaningful.  Raises when
    the set is too shallow to certify.
    """
    a, _ = shape_letters(s)
    factors.require_saturated()
    alpha = s.rules[a]
    best = 0
    for v in sorted(wd.subwords(alpha, len(alpha))):
        n = 1
        while len(v) * (n + 1) <= factors.max_length and v * (n + 1) in factors:
            n += 1
        if len(v) * (n + 1) > factors.max_length:
            raise SubstitutionError(
                f"cannot certify the power bound: {v!r}^{n + 1} exceeds factor depth "
                f"{factors.max_length}"
            )
        best = max(best, len(v) * n)
    return best


def max_power_exponent(s: Substitution, factors: wd.FactorSet, max_base_length: int) -> int:
    """N: the largest n with v^n in the language over factors v of length <= max_base_length."""
    factors.require_saturated()
    best = 1
    for m in range(1, max_base_length + 1):
        for v in factors.words_of_length(m):
            n = 1
            while m * (n + 1) <= factors.max_length and v * (n + 1) in factors:
                n += 1
            if m * (n + 1) > factors.max_length:
                raise SubstitutionError(
                    f"cannot certify the exponent bound: {v!r}^{n + 1} exceeds factor depth"
                )
            best = max(best, n)
    return best


@dataclass
class WindowWidth:
    route: str  # "doubled-letter" | "no-doubled-letter"
    half_width: int
    power_bound: int | None
    max_exponent: int | None


def window_half_width(s: Substitution, factors: wd.FactorSet) -> WindowWidth:
    """The agreement half-width L for the system, by the applicable route."""
    a, b = shape_letters(s)
    alpha = s.rules[a]
    if a + a in alpha:
        L0 = power_bound(s, factors)
        return WindowWidth(
            route="doubled-letter",
            half_width=L0 + 2 * (len(alpha) + 1),
            power_bound=L0,
            max_exponent=None,
        )
    N = max_power_exponent(s, factors, 2 * len(alpha))
    return WindowWidth(
        route="no-doubled-letter",
        half_width=(N + 2) * 2 * len(alpha),
        power_bound=None,
        max_exponent=N,
    )


@dataclass
class Agreement:
    agree: bool
    half_width: int
    route: str
    partition_count: int
    violation: tuple[OnePartition, OnePartition] | None


def interior_agreement(
    s: Substitution,
    w: str,
    factors: wd.FactorSet,
    report: ClassificationReport | None = None,
) -> Agreement:
    """Check that all 1-partitions of w agree on cuts inside the safety strip.

    Preconditions: the two-letter shape, certified minimality and
    aperiodicity (pass a classification report to have them checked), and
    |w| > 2L.  A violation is returned as a counterexample pair, which would
    indicate an implementation fault rather than a property of the system.
    """
    _require_minimal_aperiodic(report)
    ww = window_half_width(s, factors)
    L = ww.half_width
    if len(w) <= 2 * L:
        raise ValueError(f"word of length {len(w)} too short for half-width {L}")
    parts = enumerate_one_partitions(s, w)
    if not parts:
        raise ValueError(f"{w!r} admits no 1-partition; is it a factor of the language?")
    reference = parts[0].interior_cuts(L)
    for p in parts[1:]:
        if p.interior_cuts(L) != reference:
            return Agreement(
                agree=False,
                half_width=L,
                route=ww.route,
                partition_count=len(parts),
                violation=(parts[0], p),
            )
    return Agreement(
        agree=True, half_width=L, route=ww.route, partition_count=len(parts), violation=None
    )


def _require_minimal_aperiodic(report: ClassificationReport | None) -> None:
    if report is None:
        return
    if report.primitive.primitive:
        raise ShapeError("requires a nonprimitive substitution")
    if report.minimal != YES:
        raise SubstitutionError(f"requires certified minimality (got {report.minimal!r})")
    if report.periodicity.status != "aperiodic-up-to-depth":
        raise SubstitutionError(
            f"requires aperiodicity (periodicity status {report.periodicity.status!r})"
        )


@dataclass
class RecognitionRule:
    """Cut positions are exactly the centers whose (2L+1)-window is in `windows`."""

    half_width: int
    route: str
    windows: frozenset[str]
    training_length: int
    validated_on: int

    def cuts(self, text: str) -> list[int]:
        L = self.half_width
        return [
            i
            for i in range(L, len(text) - L)
            if text[i - L : i + L + 1] in self.windows
        ]


def recognition_rule(
    s: Substitution,
    factors: wd.FactorSet,
    report: ClassificationReport | None = None,
    *,
    sample_depth: int = 10**4,
    validation_words: int = 120,
) -> RecognitionRule:
    """Harvest cut-centered windows from factor partitions, then validate them.

    Training: every 1-partition of every factor of length 4L contributes the
    (2L+1)-windows centered at its interior cuts.  Validation: on fresh
    longer samples, cuts re-derived from the window set alone must coincide
    with the enumerated partitions' interior cuts.
    """
    _require_minimal_aperiodic(report)
    a, b = shape_letters(s)
    ww = window_half_width(s, factors)
    L = ww.half_width
    training_len = 4 * L
    train = factors
    if train.max_length < training_len or not train.saturated:
        train = wd.factor_language(s, training_len, max_rounds=max(64, 3 * training_len + 16))
        train.require_saturated()

    windows: set[str] = set()
    for f in train.words_of_length(training_len):
        for p in enumerate_one_partitions(s, f):
            for c in p.cut_positions:
                if L <= c <= len(f) - 1 - L:
                    windows.add(f[c - L : c + L + 1])
    rule = RecognitionRule(
        half_width=L,
        route=ww.route,
        windows=frozenset(windows),
        training_length=training_len,
        validated_on=0,
    )

    # validation against fresh, longer samples drawn from a deep iterate
    sample = _long_sample(s, a, sample_depth)
    fresh_len = min(6 * L, len(sample))
    fresh = sorted(wd.distinct_windows(sample, fresh_len))
    stride = max(1, len(fresh) // validation_words)
    checked = 0
    for f in fresh[::stride]:
        parts = enumerate_one_partitions(s, f)
        if not parts:
            continue
        # windows are only computable for centers in [L, len-1-L]
        expect = {c for c in parts[0].interior_cuts(L) if c <= len(f) - 1 - L}
        got = set(rule.cuts(f))
        if got != expect:
            raise SubstitutionError(
                f"window rule failed validation on a fresh sample "
                f"(expected cuts {sorted(expect)[:8]}..., got {sorted(got)[:8]}...)"
            )
        checked += 1
    return RecognitionRule(
        half_width=L,
        route=ww.route,
        windows=rule.windows,
        training_length=training_len,
        validated_on=checked,
    )


def _long_sample(s: Substitution, seed: str, length: int) -> str:
    w = seed
    while len(w) < length:
        w = s.apply(w[:length])
    return w[:length]


def desubstitute(s: Substitution, window: str, rule: RecognitionRule) -> tuple[str, int]:
    """Invert one substitution level on the interior of a window.

    Cuts come from the rule's window set; the blocks between consecutive
    cuts must read S(a) or b and map back to single letters.  Returns the
    preimage of the interior and the offset of the first interior cut.
    """
    a, b = shape_letters(s)
    alpha = s.rules[a]
    L = rule.half_width
    if len(window) <= 4 * L + 2:
        raise ValueError(f"window must be longer than {4 * L + 2}, got {len(window)}")
    cuts = rule.cuts(window)
    if not cuts:
        raise SubstitutionError("no cut recognized in the interior; window too short or foreign")
    letters = []
    for c1, c2 in zip(cuts, cuts[1:]):
        block = window[c1:c2]
        if block == alpha:
            letters.append(a)
        elif block == b:
            letters.append(b)
        else:
            raise SubstitutionError(
                f"segment {block!r} between recognized cuts {c1}..{c2} is not a block"
            )
    return "".join(letters), cuts[0]


@dataclass
class UniquenessScan:
    """Global uniqueness audit over a coverage sample.

    For every window start, every admissible front remainder whose block
    chain survives into the safety strip must land on the same first cut at
    or past the strip; deterministic parsing then forces identical interior
    cuts for every window of length >= 4L+2.  Coverage of all factors up to
    `max_word_length` is certified by sizing the sample with the system's
    repetitivity constant.
    """

    ok: bool
    half_width: int
    positions_checked: int
    sample_length: int
    max_word_length: int
    violations: tuple[int, ...]


def uniqueness_scan(
    s: Substitution,
    report: ClassificationReport,
    factors: wd.FactorSet,
    *,
    max_word_length: int = 600,
) -> UniquenessScan:
    """Certify unique interior cut-sets for every factor up to max_word_length."""
    _require_minimal_aperiodic(report)
    if report.lr is None:
        raise SubstitutionError("needs the explicit repetitivity constant for coverage sizing")
    a, b = shape_letters(s)
    alpha = s.rules[a]
    if alpha[0] != a or alpha[-1] != a:
        raise SubstitutionError(
            "scan requires the image of the growing letter to start and end with it"
        )
    L = window_half_width(s, factors).half_width
    need = int(report.lr.value * max_word_length) + 2 * max_word_length
    sample = _long_sample(s, a, need)

    n = len(sample)
    width = len(alpha)
    nxt = [-1] * n
    for i in range(n):
        if sample[i] == b:
            nxt[i] = i + 1
        elif sample.startswith(alpha, i):
            nxt[i] = i + width

    violations: list[int] = []
    last_start = n - (4 * L + 2)
    for start in range(0, last_start + 1):
        strip = start + L
        landing = None
        consistent = True
        for o in range(width):
            if o and not alpha.endswith(sample[start : start + o]):
                continue
            p = start + o
            while p < strip:
                step = nxt[p] if p < n else -1
                if step < 0:
                    p = -1
                    break
                p = step
            if p < 0:
                continue
            if landing is None:
                landing = p
            elif p != landing:
                consistent = False
                break
        if landing is None or not consistent:
            violations.append(start)
            if len(violations) > 16:
                break
    return UniquenessScan(
        ok=not violations,
        half_width=L,
        positions_checked=last_start + 1,
        sample_length=n,
        max_word_length=max_word_length,
        violations=tuple(violations),
    )
