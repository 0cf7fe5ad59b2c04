from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from germval.errors import SingularMatrix
from germval.exact import (
    format_rational,
    invert_symmetric,
    is_negative_definite,
    leading_principal_minors,
    parse_rational,
    solve_symmetric,
)


def mat_vec(m, x):
    return tuple(sum(r * v for r, v in zip(row, x)) for row in m)


def det_cofactor(m):
    """Independent determinant for the minor oracle."""
    n = len(m)
    if n == 0:
        return Fraction(1)
    if n == 1:
        return Fraction(m[0][0])
    total = Fraction(0)
    for j in range(n):
        if m[0][j] == 0:
            continue
        sub = [row[:j] + row[j + 1 :] for row in m[1:]]
        total += (-1) ** j * m[0][j] * det_cofactor(sub)
    return total


def test_solve_one_by_one():
    assert solve_symmetric(((-1,),), (-1,)) == (Fraction(1),)


def test_solve_two_by_two():
    m = ((-2, 1), (1, -1))
    x = solve_symmetric(m, (-1, 0))
    assert x == (Fraction(1), Fraction(1))
    assert mat_vec(m, x) == (-1, 0)


def test_solve_three_by_three_satellite_matrix():
    # Verified by substitution: b = -e2 gives the integer solution, and
    # scaling b by 1/6 gives the normalized multiplicity vector.
    m = ((-3, 0, 1), (0, -2, 1), (1, 1, -1))
    x = solve_symmetric(m, (0, 0, -1))
    assert x == (Fraction(2), Fraction(3), Fraction(6))
    assert mat_vec(m, x) == (0, 0, -1)
    y = solve_symmetric(m, (0, 0, Fraction(-1, 6)))
    assert y == (Fraction(1, 3), Fraction(1, 2), Fraction(1))
    assert mat_vec(m, y) == (0, 0, Fraction(-1, 6))


def test_solve_singular_raises():
    with pytest.raises(SingularMatrix):
        solve_symmetric(((1, 1), (1, 1)), (1, 0))


def test_solve_dimension_mismatch():
    with pytest.raises(ValueError):
        solve_symmetric(((1, 0), (0, 1)), (1,))


def test_negative_definite_examples():
    assert is_negative_definite(((-1,),))
    assert is_negative_definite(((-2, 1), (1, -2)))
    assert not is_negative_definite(((0,),))
    assert not is_negative_definite(((2,),))
    assert not is_negative_definite(((-2, 3), (3, -2)))


def test_leading_minors_match_cofactor_oracle():
    m = ((-3, 0, 1), (0, -2, 1), (1, 1, -1))
    minors = leading_principal_minors(m)
    assert minors == tuple(
        det_cofactor([list(row[: k + 1]) for row in m[: k + 1]]) for k in range(3)
    )


small_ints = st.integers(min_value=-5, max_value=5)


@st.composite
def symmetric_matrix(draw, nmax=5):
    n = draw(st.integers(min_value=1, max_value=nmax))
    a = [[draw(small_ints) for _ in range(n)] for _ in range(n)]
    return [[a[i][j] + a[j][i] for j in range(n)] for i in range(n)]


@st.composite
def negative_definite_matrix(draw, nmax=5):
    n = draw(st.integers(min_value=1, max_value=nmax))
    a = [[draw(small_ints) for _ in range(n)] for _ in range(n)]
    return [
        [-(sum(a[i][l] * a[j][l] for l in range(n)) + (3 if i == j else 0)) for j in range(n)]
        for i in range(n)
    ]


@given(symmetric_matrix())
def test_negative_definite_matches_sign_oracle(m):
    minors = [det_cofactor([row[: k + 1] for row in m[: k + 1]]) for k in range(len(m))]
    expected = all(mi * (-1) ** (k + 1) > 0 for k, mi in enumerate(minors))
    assert is_negative_definite(m) == expected


@given(negative_definite_matrix(), st.data())
def test_solve_round_trip(m, data):
    n = len(m)
    x = tuple(
        data.draw(st.fractions(min_value=-8, max_value=8, max_denominator=6))
        for _ in range(n)
    )
    assert solve_symmetric(m, mat_vec(m, x)) == x


@given(negative_definite_matrix())
def test_inverse_times_matrix_is_identity(m):
    n = len(m)
    inv = invert_symmetric(m)
    prod = [
        [sum(m[i][l] * inv[l][j] for l in range(n)) for j in range(n)]
        for i in range(n)
    ]
    assert prod == [[1 if i == j else 0 for j in range(n)] for i in range(n)]


def test_inverse_needs_row_swap():
    assert invert_symmetric(((0, 1), (1, 0))) == (
        (Fraction(0), Fraction(1)),
        (Fraction(1), Fraction(0)),
    )


@given(st.integers(min_value=-40, max_value=40), st.integers(min_value=1, max_value=24))
def test_rational_string_round_trip(p, q):
    f = Fraction(p, q)
    assert parse_rational(format_rational(f)) == f


def test_format_rational():
    assert format_rational(Fraction(5, 1)) == "5"
    assert format_rational(Fraction(-5, 6)) == "-5/6"
    assert format_rational(3) == "3"


def test_parse_rational_rejects_garbage():
    with pytest.raises(ValueError):
        parse_rational("2/0")
    with pytest.raises(ValueError):
        parse_rational("x")
