"""Minimality and linear repetitivity for substitution subshifts, with certificates.

The decision pipeline rests on two exact analyses that need no factor
enumeration at all:

* bounded-letter block analysis: the maximal bounded-letter runs occurring
  anywhere in the language are generated by finitely many seed runs evolving
  deterministically (image of the run plus boundary margins contributed by
  the neighbouring growing letters).  Run contexts cycle, and a run grows
  without bound exactly when the margins picked up along one context cycle
  are nonempty; otherwise all runs stay bounded and the maximum block length
  is computed by direct iteration.

* letter-content cycles: for a growing letter c the sets letters(S^n(c))
  are eventually periodic.  A candidate letter e occurs in every
  sufficiently long factor iff the bounded blocks are finite and every
  growing letter's cycle sets all contain e (a cycle set missing e pumps
  arbitrarily long e-free images; conversely, long factors contain deep
  images of growing letters once bounded blocks cannot stretch).

A positive decision is turned into a concrete certificate (gap bound kappa
by scanning the saturated factor set, reachability witnesses, block bound);
a negative one into a word-pumping counterexample.  Minimality and linear
repetitivity coincide for these systems, and the explicit repetitivity
constant (3 + G) * theta * rho / lambda is assembled from return words of
the certified letter.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from . import words as wd
from .substitution import (
    AlphabetSplit,
    GrowthEstimate,
    PrimitivityResult,
    Substitution,
    SubstitutionError,
    bounded_letters,
    check_compatibility,
    CompatibilityResult,
    is_primitive,
    perron_growth,
    reduced_substitution,
    validate,
)

YES = "yes"
NO = "no"
UNDECIDED = "undecided-at-depth"


# ---------------------------------------------------------------------------
# bounded-letter block analysis


@dataclass(frozen=True)
class _RunTriple:
    """A maximal bounded-letter run with its growing-letter contexts.

    `left`/`right` are the nearest growing letters (None at a word
    boundary); `origin` = (letter, depth) places the run inside the iterate
    S^depth(letter).
    """

    left: str | None
    run: str
    right: str | None
    origin: tuple[str, int]


@dataclass
class BlockPump:
    """Certificate that bounded-letter blocks grow without bound."""

    seed: tuple[str | None, str, str | None]
    origin: tuple[str, int]
    cycle_length: int
    cycle_margin: int
    steps_to_cycle: int


@dataclass
class BlockAnalysis:
    """Outcome of the bounded-letter block analysis.

    bounded is True/False when decided; None with `undecided_reason` set when
    an iteration cap was hit while measuring a bounded orbit.
    """

    bounded: bool | None
    max_block: int | None
    pump: BlockPump | None
    undecided_reason: str | None = None

    def pumped_block(self, s: Substitution, min_length: int) -> tuple[str, tuple[str, int]]:
        """Grow the pumped run until it reaches min_length; returns (run, origin)."""
        if self.pump is None:
            raise ValueError("no pump certificate")
        growing = bounded_letters(s).growing
        left, run, right = self.pump.seed
        letter, depth = self.pump.origin
        guard = 0
        while len(run) < min_length:
            left, run, right = _update_triple(s, growing, left, run, right)
            depth += 1
            guard += 1
            if guard > 10**6:
                raise RuntimeError("pump failed to grow (inconsistent certificate)")
        return run, (letter, depth)


def _b_prefix(word: str, growing: frozenset[str]) -> str:
    i = 0
    while i < len(word) and word[i] not in growing:
        i += 1
    return word[:i]


def _b_suffix(word: str, growing: frozenset[str]) -> str:
    i = len(word)
    while i > 0 and word[i - 1] not in growing:
        i -= 1
    return word[i:]


def _first_growing(word: str, growing: frozenset[str]) -> str:
    for ch in word:
        if ch in growing:
            return ch
    raise SubstitutionError("image of a growing letter lost all growing letters")


def _last_growing(word: str, growing: frozenset[str]) -> str:
    for ch in reversed(word):
        if ch in growing:
            return ch
    raise SubstitutionError("image of a growing letter lost all growing letters")


def _update_triple(
    s: Substitution, growing: frozenset[str], left: str | None, run: str, right: str | None
) -> tuple[str | None, str, str | None]:
    mid = s.apply(run)
    lpart = _b_suffix(s.rules[left], growing) if left is not None else ""
    rpart = _b_prefix(s.rules[right], growing) if right is not None else ""
    new_left = _last_growing(s.rules[left], growing) if left is not None else None
    new_right = _first_growing(s.rules[right], growing) if right is not None else None
    return new_left, lpart + mid + rpart, new_right


def _interior_triples(s: Substitution, c: str, growing: frozenset[str]) -> list[_RunTriple]:
    word = s.rules[c]
    positions = [i for i, ch in enumerate(word) if ch in growing]
    out = []
    for a, b in zip(positions, positions[1:]):
        out.append(_RunTriple(word[a], word[a + 1 : b], word[b], origin=(c, 1)))
    return out


def analyze_bounded_blocks(
    s: Substitution, split: AlphabetSplit, *, measure_cap: int = 4096
) -> BlockAnalysis:
    """Decide whether the bounded-letter-only factors have bounded length.

    The decision itself is exact (margin sum over the context cycle); the
    cap only limits the measurement of the maximal block length of orbits
    already known to be bounded.
    """
    growing = split.growing

    seeds: list[_RunTriple] = []
    for a in s.letters:
        if a in growing:
            seeds.append(_RunTriple(None, "", a, origin=(a, 0)))
            seeds.append(_RunTriple(a, "", None, origin=(a, 0)))
            seeds.extend(_interior_triples(s, a, growing))
        else:
            seeds.append(_RunTriple(None, a, None, origin=(a, 0)))

    max_block = 0
    for seed in seeds:
        # context pairs evolve independently of the run: find their cycle
        ctx = (seed.left, seed.right)
        seen: dict[tuple[str | None, str | None], int] = {}
        margins: list[int] = []
        contexts: list[tuple[str | None, str | None]] = []
        while ctx not in seen:
            seen[ctx] = len(contexts)
            contexts.append(ctx)
            l, r = ctx
            margin = 0
            if l is not None:
                margin += len(_b_suffix(s.rules[l], growing))
            if r is not None:
                margin += len(_b_prefix(s.rules[r], growing))
            margins.append(margin)
            ctx = (
                _last_growing(s.rules[l], growing) if l is not None else None,
                _first_growing(s.rules[r], growing) if r is not None else None,
            )
        start = seen[ctx]
        cycle_margin = sum(margins[start:])
        if cycle_margin > 0:
            return BlockAnalysis(
                bounded=False,
                max_block=None,
                pump=BlockPump(
                    seed=(seed.left, seed.run, seed.right),
                    origin=seed.origin,
                    cycle_length=len(margins) - start,
                    cycle_margin=cycle_margin,
                    steps_to_cycle=start,
                ),
            )
        # bounded orbit: measure its maximal run length by direct iteration
        state = (seed.left, seed.run, seed.right)
        visited = set()
        steps = 0
        while state not in visited:
            visited.add(state)
            max_block = max(max_block, len(state[1]))
            state = _update_triple(s, growing, *state)
            steps += 1
            if steps > measure_cap:
                return BlockAnalysis(
                    bounded=None,
                    max_block=None,
                    pump=None,
                    undecided_reason=(
                        f"bounded-block orbit did not close within {measure_cap} steps"
                    ),
                )
    return BlockAnalysis(bounded=True, max_block=max_block, pump=None)


# ---------------------------------------------------------------------------
# bounded gaps


@dataclass
class BGCertificate:
    """Witness that `letter` occurs with bounded gaps.

    kappa: every factor of length >= kappa contains the letter (scanned on a
    saturated factor set).  reachability_witnesses[c] is the first depth at
    which the letter shows up in the images of the growing letter c.
    bblock_bound is the maximal bounded-letter block length.
    """

    letter: str
    kappa: int
    reachability_witnesses: dict[str, int]
    bblock_bound: int
    factor_depth: int


@dataclass
class BGCounterexample:
    """Pump producing arbitrarily long factors that avoid the candidate letter."""

    letter: str
    kind: str  # "growing-letter-avoids" | "bounded-block-pump"
    detail: dict
    _s: Substitution = field(repr=False, default=None)
    _block_analysis: BlockAnalysis | None = field(repr=False, default=None)

    def avoiding_factor(self, min_length: int) -> tuple[str, tuple[str, int]]:
        """An actual factor of length >= min_length avoiding the letter, with provenance."""
        if self.kind == "bounded-block-pump":
            return self._block_analysis.pumped_block(self._s, min_length)
        c = self.detail["growing_letter"]
        n = self.detail["first_avoiding_depth"]
        period = self.detail["period"]
        word = self._s.iterate(c, n)
        while len(word) < min_length:
            word = self._s.iterate(word, period)
            n += period
        assert self.letter not in word
        return word, (c, n)


@dataclass
class BGDecision:
    status: str
    certificate: BGCertificate | None = None
    counterexample: BGCounterexample | None = None
    factors: wd.FactorSet | None = None
    note: str | None = None


def bounded_gaps(
    s: Substitution,
    split: AlphabetSplit,
    e: str,
    *,
    block_analysis: BlockAnalysis | None = None,
    kappa_depths: tuple[int, ...] = (16, 32, 64, 128, 256),
) -> BGDecision:
    """Decide whether the growing letter e occurs with bounded gaps.

    Exactly one of three things happens: a certificate with a concrete gap
    bound, a counterexample pump, or an honest undecided when a scan cap is
    hit (the block analysis caps, or kappa exceeding the deepest factor set).
    """
    if e not in split.growing:
        raise ValueError(f"candidate {e!r} is not a growing letter")
    if block_analysis is None:
        block_analysis = analyze_bounded_blocks(s, split)

    if block_analysis.bounded is None:
        return BGDecision(status=UNDECIDED, note=block_analysis.undecided_reason)
    if block_analysis.bounded is False:
        counter = BGCounterexample(
            letter=e,
            kind="bounded-block-pump",
            detail={
                "seed": list(block_analysis.pump.seed),
                "origin": list(block_analysis.pump.origin),
                "cycle_margin": block_analysis.pump.cycle_margin,
            },
            _s=s,
            _block_analysis=block_analysis,
        )
        return BGDecision(status=NO, counterexample=counter)

    # every growing letter must keep producing e along its whole letter-set cycle
    witnesses: dict[str, int] = {}
    for c in sorted(split.growing):
        sets, preperiod, period = s.letter_set_orbit(c)
        for idx in range(preperiod, preperiod + period):
            if e not in sets[idx]:
                counter = BGCounterexample(
                    letter=e,
                    kind="growing-letter-avoids",
                    detail={
                        "growing_letter": c,
                        "first_avoiding_depth": idx,
                        "period": period,
                    },
                    _s=s,
                )
                return BGDecision(status=NO, counterexample=counter)
        witnesses[c] = next(i for i, st in enumerate(sets) if e in st)

    # decided YES; pin kappa by scanning a saturated factor set
    bblock = block_analysis.max_block
    for depth in kappa_depths:
        fs = wd.factor_language(s, depth, max_rounds=max(64, 3 * depth + 16))
        if not fs.saturated:
            continue
        kappa = wd.gap_bound(fs, e)
        if kappa is not None and kappa + 1 <= fs.max_length:
            cert = BGCertificate(
                letter=e,
                kappa=kappa,
                reachability_witnesses=witnesses,
                bblock_bound=bblock,
                factor_depth=fs.max_length,
            )
            assert kappa >= bblock + 1
            return BGDecision(status=YES, certificate=cert, factors=fs)
    return BGDecision(
        status=UNDECIDED,
        note=f"gap bound for {e!r} exceeds the deepest scanned factor set "
        f"(depths {kappa_depths}); the cycle analysis still certifies bounded gaps",
    )


# ---------------------------------------------------------------------------
# linear repetitivity constant


@dataclass
class LRBound:
    """Explicit repetitivity constant (3 + G) * theta * rho / lambda.

    G is the smallest length such that every factor of length >= G contains
    every concatenation of two return words that is itself a factor.  Valid
    insofar as lambda/rho are (n <= growth.n_checked); carried as a caveat.
    """

    value: float
    G: int
    pair_set: tuple[str, ...]
    return_word_set: wd.ReturnWordSet
    growth: GrowthEstimate
    factor_depth: int
    caveats: tuple[str, ...]


def lr_constant_bound(
    s: Substitution,
    cert: BGCertificate,
    growth: GrowthEstimate,
    factors: wd.FactorSet,
    *,
    g_depths: tuple[int, ...] = (32, 64, 128, 256),
) -> LRBound:
    """Assemble the explicit linear-repetitivity constant from a bounded-gaps certificate."""
    rw = wd.return_words(s, cert.letter, factors)
    fs = factors
    if not rw.complete:
        for depth in g_depths:
            if depth <= fs.max_length:
                continue
            fs = wd.factor_language(s, depth, max_rounds=max(64, 3 * depth + 16))
            if fs.saturated:
                rw = wd.return_words(s, cert.letter, fs)
                if rw.complete:
                    break
        if not rw.complete:
            raise SubstitutionError(
                f"return words of {cert.letter!r} not certified complete at depth {fs.max_length}"
            )
    pairs = sorted(
        z1 + z2 for z1 in rw.words for z2 in rw.words if _pair_in(s, z1 + z2, fs, g_depths)
    )
    # re-evaluate on a set deep enough to contain the longest pair
    longest = max(len(p) for p in pairs)
    G = None
    used = fs
    for depth in (fs.max_length,) + g_depths:
        if depth < longest or depth < used.max_length:
            continue
        if depth > used.max_length:
            used = wd.factor_language(s, depth, max_rounds=max(64, 3 * depth + 16))
            if not used.saturated:
                continue
        G = _coverage_length(used, pairs)
        if G is not None:
            break
    if G is None:
        raise SubstitutionError(
            f"pair-coverage length not found within factor depth {used.max_length}"
        )
    assert G >= cert.kappa
    value = (3 + G) * growth.theta * growth.rho_v / growth.lambda_v
    caveats = (
        f"growth constants checked for n <= {growth.n_checked}",
        f"G scanned on factors up to length {used.max_length}",
    )
    return LRBound(
        value=value,
        G=G,
        pair_set=tuple(pairs),
        return_word_set=rw,
        growth=growth,
        factor_depth=used.max_length,
        caveats=caveats,
    )


def _pair_in(s, pair, fs, depths) -> bool:
    if len(pair) <= fs.max_length:
        return pair in fs
    deeper = wd.factor_language(s, len(pair), max_rounds=max(64, 3 * len(pair) + 16))
    return deeper.saturated and pair in deeper


def _coverage_length(fs: wd.FactorSet, targets) -> int | None:
    """Smallest L such that every factor of length L contains every target."""
    start = max(len(t) for t in targets)
    for L in range(start, fs.max_length + 1):
        candidates = fs.words_of_length(L)
        if candidates and all(t in w for w in candidates for t in targets):
            return L
    return None


# ---------------------------------------------------------------------------
# periodicity


@dataclass
class PeriodicityResult:
    status: str  # "periodic" | "aperiodic-up-to-depth" | UNDECIDED
    period: str | None
    depth: int
    note: str | None = None


def _minimal_period(u: str) -> int:
    n = len(u)
    for p in range(1, n + 1):
        if all(u[i] == u[i + p] for i in range(n - p)):
            return p
    return n


def extendable_core(factors: wd.FactorSet) -> frozenset[str]:
    """Prune factors that cannot be extended on both sides within the language.

    Removal is sound: a word all of whose one-letter extensions are gone can
    occur in no two-sided sequence.  Words of maximal length are kept
    unconditionally (nothing is known beyond the depth), so the core is only
    trustworthy with a margin below max_length.
    """
    factors.require_saturated()
    letters = factors.substitution.letters
    kept = set(factors.words)
    top = factors.max_length
    while True:
        doomed = [
            w
            for w in kept
            if len(w) < top
            and (
                not any(w + x in kept for x in letters)
                or not any(x + w in kept for x in letters)
            )
        ]
        if not doomed:
            return frozenset(kept)
        kept.difference_update(doomed)


def is_periodic(
    s: Substitution,
    depth: int = 40,
    factors: wd.FactorSet | None = None,
    *,
    core_margin: int = 8,
) -> PeriodicityResult:
    """Bounded periodicity decision via factor complexity of the extendable core.

    The subshift only sees two-sided-extendable factors, so complexity is
    read off the pruned core (with a safety margin below the factor-set
    depth).  Core complexity p(n) <= n at any n forces eventual
    periodicity; the period word is then extracted from a longest core
    factor and verified to tile every core factor.  Otherwise
    p(n) >= n + 1 throughout and the system is aperiodic up to the depth.
    """
    want = depth + core_margin
    if factors is None or factors.max_length < want:
        factors = wd.factor_language(s, want, max_rounds=max(64, 3 * want + 16))
    if not factors.saturated:
        return PeriodicityResult(
            status=UNDECIDED,
            period=None,
            depth=0,
            note=f"factor set did not saturate at depth {factors.max_length}",
        )
    core = extendable_core(factors)
    horizon = factors.max_length - core_margin + 1  # lengths safe from boundary effects
    by_len: dict[int, list[str]] = {}
    for w in core:
        if len(w) <= horizon:
            by_len.setdefault(len(w), []).append(w)
    for n in range(1, depth + 1):
        if len(by_len.get(n, ())) <= n:
            u = min(by_len[max(k for k in by_len if by_len[k])])
            q = _minimal_period(u)
            period = u[:q]
            tiling_ok = all(
                f in period * (len(f) // q + 2)
                for ws in by_len.values()
                for f in ws
            )
            if tiling_ok:
                canonical = min(period[i:] + period[:i] for i in range(q))
                return PeriodicityResult(status="periodic", period=canonical, depth=n)
            return PeriodicityResult(
                status=UNDECIDED,
                period=None,
                depth=n,
                note="low core complexity but no single periodic word tiles the core",
            )
    return PeriodicityResult(status="aperiodic-up-to-depth", period=None, depth=depth)


# ---------------------------------------------------------------------------
# full classification


@dataclass
class ClassificationReport:
    substitution: Substitution
    split: AlphabetSplit
    witness_pool: tuple[str, ...]
    compatibility: CompatibilityResult
    primitive: PrimitivityResult
    minimal: str
    certificate: BGCertificate | None
    counterexample: BGCounterexample | None
    linearly_repetitive: str
    uniquely_ergodic: str
    periodicity: PeriodicityResult
    growth: GrowthEstimate | None
    lr: LRBound | None
    factors: wd.FactorSet | None
    depth_caveats: tuple[str, ...]
    pruned_from: tuple[str, ...] | None = None

    def to_json_dict(self) -> dict:
        s = self.substitution
        out: dict = {
            "schema_version": "1",
            "name": s.name,
            "letters": list(s.letters),
            "rules": dict(s.rules),
            "growing_letters": sorted(self.split.growing),
            "bounded_letters": sorted(self.split.bounded),
            "witness_pool": list(self.witness_pool),
            "compatibility": {
                "status": self.compatibility.status,
                "detail": self.compatibility.detail,
            },
            "primitive": {
                "primitive": self.primitive.primitive,
                "power": self.primitive.power,
                "zero_entry": list(self.primitive.zero_entry) if self.primitive.zero_entry else None,
            },
            "minimal": {"status": self.minimal},
            "linearly_repetitive": {
                "status": self.linearly_repetitive,
                "note": "coincides with minimality for substitution subshifts",
            },
            "uniquely_ergodic": {
                "status": self.uniquely_ergodic,
                "note": "follows from linear repetitivity when minimal; "
                "not determined by this analysis otherwise",
            },
            "periodic": {
                "status": self.periodicity.status,
                "period": self.periodicity.period,
                "depth": self.periodicity.depth,
            },
            "depth_caveats": list(self.depth_caveats),
        }
        if self.certificate is not None:
            out["minimal"]["certificate"] = {
                "letter": self.certificate.letter,
                "kappa": self.certificate.kappa,
                "reachability_witnesses": dict(self.certificate.reachability_witnesses),
                "bblock_bound": self.certificate.bblock_bound,
                "factor_depth": self.certificate.factor_depth,
            }
        if self.counterexample is not None:
            sample, origin = self.counterexample.avoiding_factor(40)
            out["minimal"]["counterexample"] = {
                "letter": self.counterexample.letter,
                "kind": self.counterexample.kind,
                "detail": self.counterexample.detail,
                "sample_factor": sample[:60],
                "sample_origin": list(origin),
            }
        if self.growth is not None:
            out["growth"] = {
                "theta": self.growth.theta,
                "lambda": self.growth.lambda_v,
                "rho": self.growth.rho_v,
                "words": list(self.growth.words),
                "n_checked": self.growth.n_checked,
            }
        if self.lr is not None:
            out["lr_bound"] = {
                "value": self.lr.value,
                "G": self.lr.G,
                "pair_set": list(self.lr.pair_set),
                "return_words": sorted(self.lr.return_word_set.words),
                "kappa": self.lr.return_word_set.kappa,
                "factor_depth": self.lr.factor_depth,
                "caveats": list(self.lr.caveats),
            }
        if self.pruned_from is not None:
            out["pruned_from"] = list(self.pruned_from)
        return out


def classify(
    s: Substitution,
    *,
    compat_depth: int = 16,
    aperiodic_depth: int = 40,
    growth_nmax: int = 30,
    kappa_depths: tuple[int, ...] = (16, 32, 64, 128, 256),
    g_depths: tuple[int, ...] = (32, 64, 128, 256),
) -> ClassificationReport:
    """Full classification: compatibility, primitivity, minimality (with
    certificate or counterexample), linear repetitivity with its explicit
    constant, periodicity, unique ergodicity."""
    report = validate(s)
    split = report.split
    compatibility = check_compatibility(s, compat_depth)
    primitive = is_primitive(s)

    all_letters = frozenset(s.letters)
    candidates = tuple(
        e for e in s.letters if e in split.growing and s.reachable([e]) == all_letters
    )
    if not candidates:
        raise SubstitutionError(
            "no growing letter reaches the whole alphabet; prune unreachable letters first"
        )

    block_analysis = analyze_bounded_blocks(s, split)
    decision: BGDecision | None = None
    caveats: list[str] = []
    for e in candidates:
        d = bounded_gaps(s, split, e, block_analysis=block_analysis, kappa_depths=kappa_depths)
        if d.status == YES:
            decision = d
            break
        if decision is None or (decision.status == UNDECIDED and d.status == NO):
            decision = d
    assert decision is not None

    minimal = decision.status
    growth = None
    lr = None
    if minimal == YES:
        cert = decision.certificate
        factors = decision.factors
        reduced = reduced_substitution(s, split)
        try:
            lr = lr_constant_bound(
                s,
                cert,
                perron_growth(
                    reduced,
                    _return_word_pool(s, cert, factors, g_depths),
                    growth_nmax,
                ),
                factors,
                g_depths=g_depths,
            )
            growth = lr.growth
            caveats.extend(lr.caveats)
        except SubstitutionError as exc:
            caveats.append(f"repetitivity constant undecided: {exc}")
    elif minimal == UNDECIDED and decision.note:
        caveats.append(decision.note)

    periodicity = is_periodic(s, aperiodic_depth, factors=decision.factors)
    if compatibility.status != "holds-certified":
        caveats.append(
            "statements describe the finite-word language; its compatibility "
            f"with the two-sided subshift is {compatibility.status}, so the "
            "subshift itself may behave differently"
        )

    return ClassificationReport(
        substitution=s,
        split=split,
        witness_pool=candidates,
        compatibility=compatibility,
        primitive=primitive,
        minimal=minimal,
        certificate=decision.certificate,
        counterexample=decision.counterexample,
        linearly_repetitive=minimal,
        uniquely_ergodic=_unique_ergodicity(minimal),
        periodicity=periodicity,
        growth=growth,
        lr=lr,
        factors=decision.factors,
        depth_caveats=tuple(caveats),
    )


def _unique_ergodicity(minimal: str) -> str:
    # minimality forces unique ergodicity; the converse fails, so a
    # non-minimal system gets no verdict from this analysis
    return YES if minimal == YES else UNDECIDED


def _return_word_pool(s, cert, factors, g_depths) -> tuple[str, ...]:
    rw = wd.return_words(s, cert.letter, factors)
    if not rw.complete:
        for depth in g_depths:
            if depth <= factors.max_length:
                continue
            deeper = wd.factor_language(s, depth, max_rounds=max(64, 3 * depth + 16))
            if deeper.saturated:
                rw = wd.return_words(s, cert.letter, deeper)
                if rw.complete:
                    break
    return tuple(sorted(rw.words))


def empirical_repetitivity(s: Substitution, n: int, factors: wd.FactorSet) -> int | None:
    """Convenience wrapper: the repetitivity function on a saturated factor set."""
    return wd.repetitivity_function(factors, n)
