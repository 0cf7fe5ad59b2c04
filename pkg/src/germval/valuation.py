"""Graded sequences of valuation ideals attached to an exceptional curve.

For a curve E on the top model of a cluster, the functions here compute:

* the asymptotic multiplicity vector of the graded sequence of ideals of
  functions vanishing to order at least m along E, as the unique vector x
  with x[E] = 1 that is numerically trivial against every other curve;
* individual valuation ideals, realized as antinef closures by the
  classical unloading procedure;
* the degree in which the sequence is finitely generated;
* Rees valuations of antinef divisors.

The linear-algebra route and the unloading route compute the same objects
and are cross-validated against each other in the test harness.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import cache
from math import lcm

from . import germ
from .errors import NotAntinef, NotFound
from .exact import invert_symmetric

ExcDivisor = tuple  # coefficients per curve id; ints or Fractions, >= 0


def _check_curve(c: germ.Cluster, e: int) -> None:
    if not 0 <= e < c.curve_count():
        raise ValueError(f"no curve {e} (cluster has {c.curve_count()} curves)")


def _int_vector(c: germ.Cluster, z) -> list[int]:
    n = c.curve_count()
    if len(z) != n:
        raise ValueError(f"divisor has {len(z)} entries, cluster has {n} curves")
    out = []
    for v in z:
        if type(v) is not int:
            f = Fraction(v)
            if f.denominator != 1:
                raise ValueError(f"divisor entry {v} is not an integer")
            v = int(f)
        if v < 0:
            raise ValueError(f"divisor entry {v} is negative")
        out.append(v)
    return out


@cache
def _inverse(c: germ.Cluster) -> tuple[tuple[Fraction, ...], ...]:
    return invert_symmetric(germ.intersection_matrix(c))


@cache
def asymptotic_multiplicities(c: germ.Cluster, e: int) -> tuple[Fraction, ...]:
    """Asymptotic multiplicity of the graded sequence of E at every curve:
    the unique x with x[e] = 1 and (M.x)[j] = 0 for every j != e.

    Realized as the e-th column of the matrix inverse normalized by its
    diagonal entry, so all curves of one cluster share a single exact
    inversion.  Entries are all positive and the entry at e is exactly 1.
    """
    _check_curve(c, e)
    m = germ.intersection_matrix(c)
    n = len(m)
    inv = _inverse(c)
    dee = inv[e][e]
    x = tuple(inv[j][e] / dee for j in range(n))
    assert x[e] == 1
    assert all(v > 0 for v in x), "asymptotic multiplicities must be positive"
    assert sum(m[e][j] * x[j] for j in range(n)) < 0
    return x


def unload(c: germ.Cluster, z) -> tuple[int, ...]:
    """Antinef closure: the minimal integral divisor D >= Z with
    D.E_j <= 0 for every curve j.

    While some curve meets the divisor positively, the divisor is bumped
    by the smallest multiple of that curve that makes the product
    nonpositive; negative definiteness guarantees termination.
    """
    m = germ.intersection_matrix(c)
    d = _int_vector(c, z)
    n = len(d)
    prod = [0] * n
    for i in range(n):
        di = d[i]
        if di:
            row = m[i]
            for j in range(n):
                prod[j] += di * row[j]
    while True:
        for j in range(n):
            if prod[j] > 0:
                t = -(-prod[j] // -m[j][j])  # ceil(prod[j] / -m[j][j])
                d[j] += t
                row = m[j]
                for i in range(n):
                    prod[i] += t * row[i]
                break
        else:
            return tuple(d)


def valuation_ideal(c: germ.Cluster, e: int, m: int) -> tuple[int, ...]:
    """Divisor of the ideal of functions vanishing to order >= m along E:
    the antinef closure of m times the curve."""
    _check_curve(c, e)
    if m < 1:
        raise ValueError("m must be >= 1")
    z = [0] * c.curve_count()
    z[e] = m
    return unload(c, z)


def _divisors_ascending(n: int) -> list[int]:
    small, large = [], []
    i = 1
    while i * i <= n:
        if n % i == 0:
            small.append(i)
            if i != n // i:
                large.append(n // i)
        i += 1
    return small + large[::-1]


@cache
def fingen_degree(c: germ.Cluster, e: int) -> int:
    """Least m with m * dstar integral whose valuation ideal is exactly
    m * dstar; the graded sequence is then generated in degree m.

    Searches the divisors of the lcm of the dstar denominators in
    increasing order; the unloading equality keeps the answer sound even
    if that lcm were not the minimal candidate.
    """
    dstar = asymptotic_multiplicities(c, e)
    bound = lcm(*(v.denominator for v in dstar))
    for m in _divisors_ascending(bound):
        scaled = [v * m for v in dstar]
        if any(v.denominator != 1 for v in scaled):
            continue
        if valuation_ideal(c, e, m) == tuple(int(v) for v in scaled):
            return m
    raise NotFound(f"no finite-generation degree up to {bound} for curve {e}")


def rees_valuations(c: germ.Cluster, d) -> frozenset[int]:
    """Curves not contracted on the blowup of the ideal of the antinef
    divisor d: exactly those meeting d strictly negatively."""
    m = germ.intersection_matrix(c)
    dv = _int_vector(c, d)
    if all(v == 0 for v in dv):
        raise ValueError("zero divisor has no Rees valuations")
    n = len(dv)
    prod = [sum(m[j][i] * dv[i] for i in range(n)) for j in range(n)]
    bad = [j for j in range(n) if prod[j] > 0]
    if bad:
        raise NotAntinef(f"divisor meets curve {bad[0]} positively")
    return frozenset(j for j in range(n) if prod[j] < 0)


@dataclass(frozen=True)
class ValuationProfile:
    """Everything the thresholds layer needs about one curve's graded
    sequence: the canonical coefficient, the asymptotic multiplicities and
    the finite-generation degree."""

    curve: int
    k: int
    dstar: tuple[Fraction, ...]
    fingen_degree: int


def profile(c: germ.Cluster, e: int) -> ValuationProfile:
    dstar = asymptotic_multiplicities(c, e)
    m0 = fingen_degree(c, e)
    assert dstar[e] == 1
    return ValuationProfile(e, germ.canonical_vector(c)[e], dstar, m0)
