"""Log discrepancies, log canonical thresholds and minimal log
discrepancies of complete-ideal pairs on a cluster, together with the
classification of a divisor as computing an lct or being obstructed from
computing an mld.

Complete (integrally closed) ideals cosupported at the germ point are
represented by their antinef divisors on the top model.  All values are
exact rationals; the two infinities are dedicated sentinels, never
floats.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import cache

from . import germ, valuation
from .errors import MldMinusInfinity, NotAnLctComputer, NotAntinef
from .exact import format_rational, parse_rational


class _Infinity:
    """Signed infinity sentinel used only as a report value."""

    __slots__ = ("_sign",)

    def __init__(self, sign: int):
        self._sign = sign

    def __repr__(self) -> str:
        return "inf" if self._sign > 0 else "-inf"


PLUS_INFINITY = _Infinity(+1)
MINUS_INFINITY = _Infinity(-1)


def format_value(x) -> str:
    """Rational string, or "inf"/"-inf" for the sentinels."""
    if isinstance(x, _Infinity):
        return repr(x)
    return format_rational(x)


@dataclass(frozen=True)
class CompleteIdeal:
    """Antinef integral divisor of a complete ideal; the zero divisor
    stands for the full structure sheaf."""

    coeffs: tuple[int, ...]

    def is_zero(self) -> bool:
        return all(v == 0 for v in self.coeffs)


def complete_ideal(c: germ.Cluster, coeffs) -> CompleteIdeal:
    """Validate coefficients against the cluster: integral, >= 0 and
    antinef (nonpositive against every curve)."""
    d = valuation._int_vector(c, coeffs)
    m = germ.intersection_matrix(c)
    n = len(d)
    for j in range(n):
        if sum(m[j][i] * d[i] for i in range(n)) > 0:
            raise NotAntinef(f"ideal divisor meets curve {j} positively")
    return CompleteIdeal(tuple(d))


@dataclass(frozen=True)
class PairSpec:
    ideal: CompleteIdeal
    lam: Fraction


def pair_spec(c: germ.Cluster, coeffs, lam) -> PairSpec:
    lam = Fraction(lam)
    if lam < 0:
        raise ValueError("lambda must be >= 0")
    return PairSpec(complete_ideal(c, coeffs), lam)


@dataclass(frozen=True)
class LctReport:
    """Threshold value with the set of curves attaining it.

    ``prime_blowup_lct`` is filled for asymptotic reports only: it is the
    threshold seen from the one-divisor model, value - k."""

    value: Fraction | _Infinity
    argmin: frozenset[int]
    prime_blowup_lct: Fraction | None = None


@dataclass(frozen=True)
class Classification:
    curve: int
    verdict: str  # "ComputesLct" | "MldObstructed" | "Indeterminate"
    witness: int | None
    lct: Fraction
    gap: Fraction
    argmin: frozenset[int]


def log_discrepancy(c: germ.Cluster, p: PairSpec, f: int) -> Fraction:
    """k + 1 - lambda * (ideal coefficient at the curve)."""
    valuation._check_curve(c, f)
    k = germ.canonical_vector(c)
    return Fraction(k[f] + 1) - p.lam * p.ideal.coeffs[f]


def lct_ideal(c: germ.Cluster, a: CompleteIdeal) -> LctReport:
    """Log canonical threshold of a complete ideal: the minimum of
    (k+1)/coefficient over the curves in the divisor's support, or
    infinity for the structure sheaf."""
    k = germ.canonical_vector(c)
    support = [j for j, d in enumerate(a.coeffs) if d > 0]
    if not support:
        return LctReport(PLUS_INFINITY, frozenset())
    ratios = {j: Fraction(k[j] + 1, a.coeffs[j]) for j in support}
    value = min(ratios.values())
    return LctReport(value, frozenset(j for j, r in ratios.items() if r == value))


@cache
def asymptotic_lct(c: germ.Cluster, e: int) -> LctReport:
    """Asymptotic log canonical threshold of the graded sequence of E:
    the minimum of (k+1)/multiplicity over the model curves.  Always at
    most k[e] + 1, since the multiplicity at E itself is 1."""
    x = valuation.asymptotic_multiplicities(c, e)
    k = germ.canonical_vector(c)
    ratios = [Fraction(k[j] + 1) / x[j] for j in range(len(x))]
    value = min(ratios)
    argmin = frozenset(j for j, r in enumerate(ratios) if r == value)
    ke1 = Fraction(k[e] + 1)
    assert value <= ke1
    return LctReport(value, argmin, prime_blowup_lct=value - Fraction(k[e]))


def computes_lct(c: germ.Cluster, e: int) -> bool:
    k = germ.canonical_vector(c)
    return asymptotic_lct(c, e).value == k[e] + 1


def lct_gap(c: germ.Cluster, e: int) -> Fraction:
    """k + 1 minus the asymptotic threshold; zero exactly when the curve
    computes a log canonical threshold."""
    k = germ.canonical_vector(c)
    gap = Fraction(k[e] + 1) - asymptotic_lct(c, e).value
    assert gap >= 0
    return gap


def lct_witness_ideal(c: germ.Cluster, e: int) -> CompleteIdeal:
    """The valuation ideal at the finite-generation degree; its threshold
    is (k+1)/degree and is attained at E."""
    if not computes_lct(c, e):
        raise NotAnLctComputer(f"curve {e} does not compute an lct")
    m0 = valuation.fingen_degree(c, e)
    ideal = CompleteIdeal(valuation.valuation_ideal(c, e, m0))
    report = lct_ideal(c, ideal)
    k = germ.canonical_vector(c)
    assert report.value == Fraction(k[e] + 1, m0) and e in report.argmin
    return ideal


def plt_check(c: germ.Cluster, e: int) -> bool:
    """Strict inequality k[e]+1 < (k[f]+1)/multiplicity for every other
    model curve.  Certified over model divisors only: curves appearing on
    further blowups are not quantified here."""
    x = valuation.asymptotic_multiplicities(c, e)
    k = germ.canonical_vector(c)
    ke1 = Fraction(k[e] + 1)
    return all(Fraction(k[f] + 1) / x[f] > ke1 for f in range(len(x)) if f != e)


def unique_lc_place(c: germ.Cluster, a: CompleteIdeal) -> int | None:
    """The unique curve attaining the ideal's threshold, if there is one."""
    if a.is_zero():
        raise ValueError("the structure sheaf has no lc places")
    report = lct_ideal(c, a)
    if len(report.argmin) == 1:
        return next(iter(report.argmin))
    return None


def mld_at_origin(c: germ.Cluster, p: PairSpec) -> Fraction | _Infinity:
    """Minimal log discrepancy of the pair at the germ point: the minimum
    of the model-curve log discrepancies when all are nonnegative, else
    minus infinity.

    The model is a log resolution of the pair, so blowups beyond it can
    only raise the minimum while it is nonnegative; the enumeration
    harness re-checks this to bounded depth.
    """
    if c.curve_count() == 0:
        raise ValueError("cluster has no exceptional curves")
    k = germ.canonical_vector(c)
    values = [Fraction(k[j] + 1) - p.lam * p.ideal.coeffs[j] for j in range(len(k))]
    low = min(values)
    return MINUS_INFINITY if low < 0 else low


def computes_mld(c: germ.Cluster, e: int, p: PairSpec) -> bool:
    valuation._check_curve(c, e)
    mld = mld_at_origin(c, p)
    if mld is MINUS_INFINITY:
        raise MldMinusInfinity("the pair is not log canonical at the point")
    return log_discrepancy(c, p, e) == mld


def mld_obstruction(c: germ.Cluster, e: int) -> int | None:
    """A model curve F != E with k[F] <= k[E] whose ratio
    (k[F]+1)/multiplicity falls below k[E]+1; along every log canonical
    pair with nonzero ideal and positive exponent such an F keeps a
    strictly smaller log discrepancy than E.

    Ties are broken by smallest ratio, then smallest k, then smallest id.
    """
    x = valuation.asymptotic_multiplicities(c, e)
    k = germ.canonical_vector(c)
    ke1 = Fraction(k[e] + 1)
    best: tuple[Fraction, int, int] | None = None
    for f in range(len(x)):
        if f == e or k[f] > k[e]:
            continue
        ratio = Fraction(k[f] + 1) / x[f]
        if ratio < ke1:
            cand = (ratio, k[f], f)
            if best is None or cand < best:
                best = cand
    return None if best is None else best[2]


def classify(c: germ.Cluster, e: int) -> Classification:
    """Classify the curve after pruning the cluster to its ancestors.

    On the pruned model every curve has k at most k[e], so when the curve
    fails to compute an lct the threshold's argmin is itself an
    obstructing witness and the verdict is never Indeterminate over
    smooth or du Val bases.  Reported ids refer to the original cluster.
    """
    valuation._check_curve(c, e)
    pruned, old_to_new = germ.prune_to_ancestors(c, e)
    new_to_old = {v: o for o, v in old_to_new.items()}
    pe = old_to_new[e]
    report = asymptotic_lct(pruned, pe)
    k = germ.canonical_vector(pruned)
    gap = Fraction(k[pe] + 1) - report.value
    argmin = frozenset(new_to_old[j] for j in report.argmin)
    if gap == 0:
        return Classification(e, "ComputesLct", None, report.value, gap, argmin)
    w = mld_obstruction(pruned, pe)
    if w is not None:
        return Classification(e, "MldObstructed", new_to_old[w], report.value, gap, argmin)
    return Classification(e, "Indeterminate", None, report.value, gap, argmin)


# -- JSON wire format ---------------------------------------------------
#
# { "ideal": ["2", "3", "6"], "lambda": "5/6" }


def pair_to_json(p: PairSpec) -> dict:
    return {
        "ideal": [format_rational(v) for v in p.ideal.coeffs],
        "lambda": format_rational(p.lam),
    }


def pair_from_json(c: germ.Cluster, doc) -> PairSpec:
    if not isinstance(doc, dict):
        raise ValueError("pair document must be a JSON object")
    ideal_doc = doc.get("ideal")
    if not isinstance(ideal_doc, list):
        raise ValueError('"ideal" must be a list of rational strings')
    coeffs = [parse_rational(str(v)) for v in ideal_doc]
    lam_doc = doc.get("lambda")
    if not isinstance(lam_doc, str):
        raise ValueError('"lambda" must be a rational string')
    return pair_spec(c, coeffs, parse_rational(lam_doc))
