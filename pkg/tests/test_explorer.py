import io
import json
from fractions import Fraction
from itertools import product

import pytest

from germval import germ, thresholds, valuation
from germval.explorer import (
    ATLAS_COLUMNS,
    EnumBudget,
    antinef_ideals,
    atlas_rows,
    cluster_from_signature,
    cluster_signature,
    enumerate_clusters,
    enumerate_pairs,
    extension_forms,
    extremal_gaps,
    lambda_grid,
    verify_theorems,
    write_atlas_csv,
)

from conftest import chain2, satellite_chain, single_blowup


def smooth_budget(max_steps, **kw):
    return EnumBudget(max_steps=max_steps, bases=(germ.SMOOTH,), **kw)


def test_enumeration_counts_small():
    # hand-derived class counts over a smooth base (cumulative):
    # 1 step: the blowup of the point; 2 steps: one chain; 3 steps: two
    # free points / chain of three / one satellite; 15 at four steps.
    for max_steps, expected in ((1, 1), (2, 2), (3, 5), (4, 15)):
        assert len(list(enumerate_clusters(smooth_budget(max_steps)))) == expected


def brute_force_class_count(max_steps):
    """Independent oracle: DFS over all legal step sequences, grouping by
    signature."""
    seen = set()
    stack = [germ.build(germ.SMOOTH, (germ.Free(None),))]
    while stack:
        c = stack.pop()
        seen.add(cluster_signature(c))
        if len(c.steps) < max_steps:
            stack.extend(germ.extend(c, s) for s in germ.legal_steps(c))
    return len(seen)


@pytest.mark.parametrize("max_steps", [1, 2, 3, 4, 5])
def test_enumeration_matches_sequence_oracle(max_steps):
    enumerated = len(list(enumerate_clusters(smooth_budget(max_steps))))
    assert enumerated == brute_force_class_count(max_steps)


def test_enumeration_deterministic_and_unique():
    b = smooth_budget(4)
    runs = [[cluster_signature(c) for c in enumerate_clusters(b)] for _ in range(2)]
    assert runs[0] == runs[1]
    assert len(runs[0]) == len(set(runs[0]))


def test_enumeration_yields_canonical_representatives():
    for c in enumerate_clusters(smooth_budget(4)):
        sig = cluster_signature(c)
        assert cluster_from_signature(sig) == c


def test_enumeration_identifies_sibling_orderings():
    # the two orderings of "chain of two on one curve plus a bare sibling"
    a = germ.build(germ.SMOOTH, (germ.Free(None), germ.Free(0), germ.Free(0), germ.Free(1)))
    b = germ.build(germ.SMOOTH, (germ.Free(None), germ.Free(0), germ.Free(1), germ.Free(0)))
    assert a != b
    assert cluster_signature(a) == cluster_signature(b)


def test_enumeration_covers_du_val_zero_steps():
    b = EnumBudget(max_steps=1, bases=(germ.du_val("A1"), germ.SMOOTH))
    clusters = list(enumerate_clusters(b))
    assert germ.build(germ.du_val("A1"), ()) in clusters
    assert clusters[0].base.is_smooth  # smooth enumerates first


def test_antinef_ideals_examples():
    sb = single_blowup()
    assert antinef_ideals(sb, 2) == [(0,), (1,), (2,)]
    assert antinef_ideals(sb, 0) == [(0,)]
    # chain: closures of all bounded vectors, deduplicated
    expected = sorted({valuation.unload(chain2(), v) for v in product(range(3), repeat=2)})
    assert antinef_ideals(chain2(), 2) == expected
    assert (1, 2) in expected and (0, 0) in expected


def test_lambda_grid_contents():
    c = chain2()
    grid = lambda_grid(c, (1, 2), 4)
    lct = Fraction(3, 2)
    assert max(grid) == lct
    assert all(0 < lam <= lct for lam in grid)
    assert Fraction(1, 4) in grid and Fraction(5, 4) in grid
    # crossing of the two curves: (k0-k1)/(d0-d1) = 1
    assert Fraction(1) in grid
    assert grid == sorted(set(grid))


def test_lambda_grid_includes_off_grid_crossings():
    r4 = satellite_chain(4)
    coeffs = (2, 3, 6, 7)
    grid = lambda_grid(r4, coeffs, 2)
    # crossings finer than the q<=2 grid: e.g. curves 0 and 2 at
    # (1-4)/(2-6) = 3/4, curves 0 and 3 at 4/5, curves 1 and 2 at 2/3
    assert grid == [Fraction(1, 2), Fraction(2, 3), Fraction(3, 4), Fraction(4, 5)]


def test_lambda_grid_trivial_ideal():
    assert lambda_grid(chain2(), (0, 0), 6) == [Fraction(1)]


def test_enumerate_pairs_stream():
    pairs = list(enumerate_pairs(single_blowup(), smooth_budget(1, ideal_coeff_bound=2)))
    ideals = sorted({p.ideal.coeffs for p in pairs})
    assert ideals == [(0,), (1,), (2,)]
    for p in pairs:
        if p.ideal.coeffs == (2,):
            assert 0 < p.lam <= 1
    again = list(enumerate_pairs(single_blowup(), smooth_budget(1, ideal_coeff_bound=2)))
    assert again == pairs


def test_extension_forms_small():
    sb = single_blowup()
    assert extension_forms(sb, 0) == []
    assert extension_forms(sb, 1) == [(1, (1,))]
    depth2 = extension_forms(sb, 2)
    # free-on-free, and the satellite of the curve with its free child
    assert (2, (1,)) in depth2 and (2, (2,)) in depth2

    forms = extension_forms(chain2(), 1)
    assert (1, (1, 0)) in forms and (1, (0, 1)) in forms and (1, (1, 1)) in forms


def test_extension_forms_track_consumed_intersections():
    # depth-2 satellite forms on the chain: after the satellite of (0,1),
    # the pair (0,1) is consumed, so no form can weight it twice
    forms = extension_forms(chain2(), 2)
    assert (2, (2, 1)) in forms  # satellite of curve 0 with the first satellite
    assert (2, (1, 2)) in forms
    assert all(not (const == 2 and ws == (2, 2)) for const, ws in forms)


def test_verify_theorems_empty_budget():
    report = verify_theorems(EnumBudget(max_steps=3, bases=()))
    assert report.counts["clusters"] == 0
    assert report.counterexample_total() == 0
    assert all(s.checked == 0 for s in report.suites)


def test_verify_theorems_small_smooth():
    report = verify_theorems(
        smooth_budget(3, ideal_coeff_bound=2, lambda_denominator_bound=6, extension_depth=2)
    )
    assert report.counterexample_total() == 0
    for name in (
        "dstar_unit",
        "oracle_equivalence",
        "rees_singleton",
        "mld_implies_lct",
        "witness_strictness",
        "gap_inequality",
        "classification_decisive",
        "mld_extension_guard",
        "atlas_spot_check",
    ):
        assert report.suite(name).checked > 0, name
    doc = report.to_json()
    json.dumps(doc)  # must be serializable
    assert doc["seed"] == report.seed
    assert doc["total_counterexamples"] == 0


def test_verify_theorems_du_val_dichotomy():
    bases = tuple(germ.du_val(x) for x in ("A1", "A2", "A3", "D4", "E6", "E7", "E8"))
    report = verify_theorems(
        EnumBudget(max_steps=2, bases=bases, ideal_coeff_bound=1, lambda_denominator_bound=4)
    )
    assert report.counterexample_total() == 0
    decisive = report.suite("classification_decisive")
    assert decisive.checked > 1000 and not decisive.counterexamples


def test_counterexamples_are_reported_not_raised(monkeypatch):
    # break an implication on purpose: with plt reporting always-false,
    # every unique lc place becomes a recorded counterexample
    monkeypatch.setattr(thresholds, "plt_check", lambda c, e: False)
    report = verify_theorems(smooth_budget(2, ideal_coeff_bound=1))
    suite = report.suite("unique_place_plt")
    assert suite.counterexamples
    assert report.counterexample_total() == len(suite.counterexamples)
    doc = report.to_json()
    assert doc["total_counterexamples"] > 0


def test_atlas_rows_reproducible_and_deterministic():
    b = smooth_budget(3)
    rows1 = atlas_rows(b)
    rows2 = atlas_rows(b)
    assert rows1 == rows2
    for row in rows1[:8]:
        assert row.lct == thresholds.asymptotic_lct(row.cluster, row.curve).value
        assert row.fingen_degree == valuation.fingen_degree(row.cluster, row.curve)


def test_atlas_rows_parallel_matches_serial():
    b = smooth_budget(3)
    assert atlas_rows(b, jobs=2) == atlas_rows(b, jobs=1)


def test_extremal_gaps_ordering():
    b = smooth_budget(4, ideal_coeff_bound=0)
    rows = extremal_gaps(b)
    gaps = [r.gap for r in rows]
    assert gaps == sorted(gaps, reverse=True)
    assert rows[-1].gap == 0
    for r1, r2 in zip(rows, rows[1:]):
        if r1.gap == r2.gap:
            key1 = (r1.cluster.curve_count(), r1.enum_index, r1.curve)
            key2 = (r2.cluster.curve_count(), r2.enum_index, r2.curve)
            assert key1 <= key2
    # the depth-4 satellite chain carries a positive gap at its last curve
    assert any(r.gap == Fraction(1, 6) for r in rows)


def test_extremal_gaps_single_and_du_val_only():
    rows = extremal_gaps(smooth_budget(1))
    assert len(rows) == 1 and rows[0].gap == 0 and rows[0].verdict == "ComputesLct"

    duval_only = EnumBudget(max_steps=1, bases=(germ.du_val("A2"), germ.du_val("D4")))
    rows = extremal_gaps(duval_only)
    assert rows and all(not r.cluster.base.is_smooth for r in rows)


def test_atlas_csv_shape():
    b = smooth_budget(2)
    buf = io.StringIO()
    write_atlas_csv(atlas_rows(b), buf)
    lines = buf.getvalue().strip().splitlines()
    assert lines[0] == ",".join(ATLAS_COLUMNS)
    assert lines[1] == 'smooth,"[{""kind"":""free"",""on"":null}]",0,1,2,0,1,ComputesLct,'
    assert len(lines) == 1 + 1 + 2  # header + one 1-step row + two 2-step rows
