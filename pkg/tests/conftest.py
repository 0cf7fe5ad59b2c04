import time
from fractions import Fraction

import pytest

from germval import germ, valuation
from germval.cli import satellite_chain, single_blowup
from germval.explorer import EnumBudget, verify_theorems

__all__ = ["satellite_chain", "single_blowup"]


def chain2() -> germ.Cluster:
    """Two blowups: a free point, then a free point on its curve."""
    return germ.build(germ.SMOOTH, (germ.Free(None), germ.Free(0)))


def oracle_lct_unloading(c: germ.Cluster, e: int, mmax: int = 2000) -> Fraction:
    """Threshold of the graded sequence of E computed through unloading
    alone: find the degree where the valuation ideal becomes numerically
    trivial against the other curves, then take the minimal ratio.
    Independent of the linear-algebra multiplicity path."""
    m = germ.intersection_matrix(c)
    k = germ.canonical_vector(c)
    n = len(k)
    for mm in range(1, mmax + 1):
        z = [0] * n
        z[e] = mm
        d = valuation.unload(c, z)
        prods = [sum(m[j][i] * d[i] for i in range(n)) for j in range(n)]
        if all(prods[j] == 0 for j in range(n) if j != e):
            return min(Fraction((k[j] + 1) * mm, d[j]) for j in range(n))
    raise AssertionError(f"no stable degree below {mmax}")


@pytest.fixture(scope="session")
def sweep_a():
    """Criterion-scale sweep: smooth clusters up to 5 steps, ideal bound 3,
    exponent denominators up to 12, no model extensions.  Returns the
    report together with its wall-clock runtime."""
    budget = EnumBudget(
        max_steps=5,
        bases=(germ.SMOOTH,),
        ideal_coeff_bound=3,
        lambda_denominator_bound=12,
        extension_depth=0,
    )
    start = time.perf_counter()
    report = verify_theorems(budget)
    return report, time.perf_counter() - start


@pytest.fixture(scope="session")
def sweep_b():
    """Extension-guard sweep: smooth clusters up to 4 steps with model
    extensions explored to depth 3."""
    budget = EnumBudget(
        max_steps=4,
        bases=(germ.SMOOTH,),
        ideal_coeff_bound=3,
        lambda_denominator_bound=12,
        extension_depth=3,
    )
    start = time.perf_counter()
    report = verify_theorems(budget)
    return report, time.perf_counter() - start
