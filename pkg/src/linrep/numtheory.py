"""Stutter witnesses and digit expansions for two-letter fixed points.

For a nonprimitive minimal aperiodic substitution on {0, 1} fixing the
letter 1, the image of 0 begins and ends with 0 and has one of two shapes:
a separated run 0 1^k 0 w 0, or a doubled start 0 0 w 0 with w containing a
1.  Either shape plants a stutter 0 1^k 0 1^k 0 (resp. 0 0 0) in the second
iterate, which splits the fixed point as u = p . V V ... with

    U_n = S^n(p),   V_n = S^n(0 1^k),   V_n' = S^n(0)

(doubled case: V_n = V_n' = S^n(0)).  The Ferenczi-Mauduit transcendence
criterion then needs |V_n| -> infinity, |U_n| / |V_n| bounded above and
|V_n'| / |V_n| bounded below; we verify those premises numerically at a
stated depth and evaluate the expansion value exactly.  The module reports
premises, never the conclusion on its own authority.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .classify import NO, YES, ClassificationReport
from .substitution import Substitution, SubstitutionError, fixed_point_prefix

CASE_SEPARATED = "separated-run"  # S(0) = 0 1^k 0 w 0
CASE_DOUBLED = "doubled-start"    # S(0) = 0 0 w 0, w containing 1

ATTRIBUTION = (
    "premises of the Ferenczi-Mauduit transcendence criterion verified at the "
    "stated depth; for aperiodic substitution fixed points the criterion makes "
    "the expansion value transcendental"
)


class CaseDetectionError(SubstitutionError):
    pass


class PeriodicShapeError(CaseDetectionError):
    """S(0) = 0 1^k 0 exactly: the fixed point is periodic, outside scope."""


@dataclass
class StutterWitness:
    """Shape classification of S(0) plus the stutter prefix split of the fixed point.

    All letters are reported in the original alphabet; `zero`/`one` name the
    growing and the fixed letter.  `p` is the (possibly empty) prefix before
    the first stutter, re-checkable against the fixed point.  Length tables
    run over n = 1..depth.
    """

    case_tag: str
    zero: str
    one: str
    swapped: bool
    k: int | None
    w: str
    p: str
    depth: int
    u_lengths: tuple[int, ...]
    v_lengths: tuple[int, ...]
    v_prime_lengths: tuple[int, ...]


def _shape_letters(s: Substitution) -> tuple[str, str, bool]:
    """Identify (growing, fixed) letters of a two-letter system with a fixed letter."""
    if len(s.letters) != 2:
        raise CaseDetectionError("stutter analysis needs a two-letter alphabet")
    fixed = [a for a in s.letters if s.rules[a] == a]
    if not fixed:
        raise CaseDetectionError("no letter is fixed by the substitution")
    one = fixed[0]
    zero = next(a for a in s.letters if a != one)
    swapped = s.letters.index(one) == 0
    return zero, one, swapped


def detect_case(s: Substitution, report: ClassificationReport) -> StutterWitness:
    """Classify S(0) into the separated-run or doubled-start shape.

    Preconditions (checked): nonprimitive, certified minimal, aperiodic up
    to depth.  Primitive systems are out of scope here (handled by the
    constant-length / primitive theory elsewhere).  The skeleton witness has
    empty length tables; build_witness fills them.
    """
    if report.primitive.primitive:
        raise CaseDetectionError("primitive systems are out of scope for this analysis")
    if report.minimal != YES:
        raise CaseDetectionError(f"system is not certified minimal (status {report.minimal!r})")
    if report.periodicity.status == "periodic":
        raise CaseDetectionError("periodic systems are excluded")
    zero, one, swapped = _shape_letters(s)
    img = s.rules[zero]
    if not (img[0] == zero and img[-1] == zero and one in img):
        raise CaseDetectionError(
            f"image of {zero!r} must begin and end with {zero!r} and contain {one!r}; got {img!r}"
        )
    if img[1] == one:
        k = 1
        while img[1 + k] == one:
            k += 1
        rest = img[2 + k :]
        if rest == "":
            raise PeriodicShapeError(
                f"image {img!r} is exactly {zero}{one}^{k}{zero}: periodic fixed point"
            )
        return StutterWitness(
            case_tag=CASE_SEPARATED,
            zero=zero,
            one=one,
            swapped=swapped,
            k=k,
            w=rest[:-1],
            p="",
            depth=0,
            u_lengths=(),
            v_lengths=(),
            v_prime_lengths=(),
        )
    # img[1] == zero
    w = img[2:-1]
    if one not in w:
        raise CaseDetectionError(
            f"doubled-start image {img!r} must carry {one!r} strictly inside"
        )
    return StutterWitness(
        case_tag=CASE_DOUBLED,
        zero=zero,
        one=one,
        swapped=swapped,
        k=None,
        w=w,
        p="",
        depth=0,
        u_lengths=(),
        v_lengths=(),
        v_prime_lengths=(),
    )


def build_witness(s: Substitution, skeleton: StutterWitness, depth: int = 32) -> StutterWitness:
    """Locate the stutter prefix p in the fixed point and tabulate exact lengths."""
    zero, one = skeleton.zero, skeleton.one
    if skeleton.case_tag == CASE_SEPARATED:
        pattern = zero + one * skeleton.k + zero + one * skeleton.k + zero
        v_word = zero + one * skeleton.k
    else:
        pattern = zero * 3
        v_word = zero
    # the stutter shows up inside the second iterate alignment of the fixed point
    horizon = s.word_image_length(zero, 2) + len(pattern) + 2
    prefix = fixed_point_prefix(s, zero, horizon)
    idx = prefix.find(pattern)
    if idx < 0:
        raise CaseDetectionError(
            f"stutter pattern {pattern!r} not found within the first {horizon} letters; "
            "shape classification inconsistent, flag for review"
        )
    p = prefix[:idx]
    u_lengths = tuple(s.word_image_length(p, n) for n in range(1, depth + 1))
    v_lengths = tuple(s.word_image_length(v_word, n) for n in range(1, depth + 1))
    vp_lengths = tuple(s.word_image_length(zero, n) for n in range(1, depth + 1))
    return StutterWitness(
        case_tag=skeleton.case_tag,
        zero=zero,
        one=one,
        swapped=skeleton.swapped,
        k=skeleton.k,
        w=skeleton.w,
        p=p,
        depth=depth,
        u_lengths=u_lengths,
        v_lengths=v_lengths,
        v_prime_lengths=vp_lengths,
    )


@dataclass
class ConditionReport:
    """Tri-state premise checks on the tabulated lengths (depth-bounded statements)."""

    lengths_diverge: str
    prefix_ratio_bounded: str
    core_ratio_positive: str
    max_prefix_ratio: float
    min_core_ratio: float
    depth: int


def check_conditions(witness: StutterWitness, *, ratio_tol: float = 1e-6) -> ConditionReport:
    """Check the three premises at the witness depth.

    Divergence: |V_n| strictly increasing (integers, hence unbounded).
    Bounded prefix ratio: the tail of |U_n|/|V_n| has settled within
    ratio_tol.  Positive core ratio: min over the upper half of
    |V_n'|/|V_n| stays above ratio_tol.
    """
    n = witness.depth
    if n < 10:
        raise ValueError("need depth >= 10 to say anything as stated")
    v = witness.v_lengths
    diverge = YES if all(v[i] < v[i + 1] for i in range(n - 1)) else NO

    ratios_uv = [u / vv for u, vv in zip(witness.u_lengths, v)]
    tail = ratios_uv[-6:]
    settled = max(abs(tail[i + 1] - tail[i]) for i in range(len(tail) - 1))
    bounded = YES if settled <= ratio_tol else "undecided-at-depth"

    ratios_vpv = [vp / vv for vp, vv in zip(witness.v_prime_lengths, v)]
    half = ratios_vpv[n // 2 :]
    min_core = min(half)
    positive = YES if min_core > ratio_tol else "undecided-at-depth"
    return ConditionReport(
        lengths_diverge=diverge,
        prefix_ratio_bounded=bounded,
        core_ratio_positive=positive,
        max_prefix_ratio=max(ratios_uv),
        min_core_ratio=min_core,
        depth=n,
    )


class InsufficientDigitsError(ValueError):
    pass


@dataclass
class ExpansionValue:
    """A digit expansion evaluated as an exact dyadic rational to `bits` bits.

    value = mantissa / 2^bits; the truncation error of the partial sum is at
    most base^(-digits_used), recorded as error_exponent.
    """

    mantissa: int
    bits: int
    base: int
    digits_used: int

    @property
    def fraction(self) -> Fraction:
        return Fraction(self.mantissa, 1 << self.bits)

    def to_float(self) -> float:
        return self.mantissa / (1 << self.bits)

    @property
    def error_exponent(self) -> int:
        return -self.digits_used

    def decimal_string(self) -> str:
        digits10 = max(1, math.ceil(self.bits * math.log10(2)))
        scaled = self.mantissa * 10**digits10 // (1 << self.bits)
        return f"0.{scaled:0{digits10}d}"


def expansion_value(digits: Sequence[int] | str, base: int = 2, bits: int = 160) -> ExpansionValue:
    """Evaluate sum(d_n / base^n) over the given digits, rounded to `bits` bits.

    Requires enough digits that the truncated tail is below the rounding
    grain: len(digits) >= bits * ln 2 / ln base + 8.
    """
    if base < 2:
        raise ValueError("base must be >= 2")
    ds = [int(d) for d in digits]
    if any(d < 0 or d >= base for d in ds):
        raise ValueError(f"digits must lie in 0..{base - 1}")
    need = math.ceil(bits * math.log(2) / math.log(base)) + 8
    if len(ds) < need:
        raise InsufficientDigitsError(f"need at least {need} digits for {bits} bits, got {len(ds)}")
    num = 0
    for d in ds:
        num = num * base + d
    den = base ** len(ds)
    mantissa = ((num << bits) + den // 2) // den
    return ExpansionValue(mantissa=mantissa, bits=bits, base=base, digits_used=len(ds))


@dataclass
class TranscendenceReport:
    witness: StutterWitness
    conditions: ConditionReport
    value: ExpansionValue
    digit_letter_map: dict[str, int]
    attribution: str

    def to_json_dict(self) -> dict:
        w = self.witness
        return {
            "schema_version": "1",
            "depth_caveats": [
                f"premises checked for exponents n <= {w.depth}",
                f"value truncation error <= {self.value.base}^-{self.value.digits_used}",
            ],
            "case": {
                "tag": w.case_tag,
                "growing_letter": w.zero,
                "fixed_letter": w.one,
                "swapped": w.swapped,
                "k": w.k,
                "w": w.w,
                "prefix": w.p,
            },
            "lengths": {
                "depth": w.depth,
                "u": list(w.u_lengths),
                "v": list(w.v_lengths),
                "v_prime": list(w.v_prime_lengths),
            },
            "conditions": {
                "lengths_diverge": self.conditions.lengths_diverge,
                "prefix_ratio_bounded": self.conditions.prefix_ratio_bounded,
                "core_ratio_positive": self.conditions.core_ratio_positive,
                "max_prefix_ratio": self.conditions.max_prefix_ratio,
                "min_core_ratio": self.conditions.min_core_ratio,
            },
            "value": {
                "base": self.value.base,
                "bits": self.value.bits,
                "digits_used": self.value.digits_used,
                "decimal": self.value.decimal_string(),
            },
            "digit_letter_map": dict(self.digit_letter_map),
            "attribution": self.attribution,
        }


def transcendence_report(
    s: Substitution,
    report: ClassificationReport,
    *,
    depth: int = 32,
    bits: int = 160,
    base: int = 2,
) -> TranscendenceReport:
    """Full premise verification plus exact evaluation of the expansion value."""
    skeleton = detect_case(s, report)
    witness = build_witness(s, skeleton, depth)
    conditions = check_conditions(witness)

    digit_map = _digit_map(s, base)
    need = math.ceil(bits * math.log(2) / math.log(base)) + 8
    u = fixed_point_prefix(s, witness.zero, need)
    digits = [digit_map[ch] for ch in u]
    value = expansion_value(digits, base, bits)
    return TranscendenceReport(
        witness=witness,
        conditions=conditions,
        value=value,
        digit_letter_map=digit_map,
        attribution=ATTRIBUTION,
    )


def _digit_map(s: Substitution, base: int) -> dict[str, int]:
    """Letters as digits: letter values must be integers inside 0..base-1."""
    out = {}
    for ch in s.letters:
        v = s.alphabet.value(ch)
        if not float(v).is_integer() or not (0 <= int(v) < base):
            raise ValueError(
                f"letter {ch!r} has value {v}, not a digit in base {base}; "
                "assign integer digit values in the definition"
            )
        out[ch] = int(v)
    return out


def dump_digits(path, digits: Sequence[int]) -> None:
    """Raw digit dump, one byte per digit."""
    with open(path, "wb") as fh:
        fh.write(bytes(int(d) for d in digits))
