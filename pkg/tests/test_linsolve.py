"""Exact linear solver: outcomes checked against a dense Fraction oracle."""

from fractions import Fraction

from hypothesis import given, settings, strategies as st

from sigma35.linsolve import graded_linear_solve
from sigma35.rationals import Q

from oracles import dumb_solve


def eq(coeffs, const):
    """Equation in the solver's convention: coeffs . x + const = 0."""
    return ({k: Q(v) for k, v in coeffs.items()}, Q(const))


def test_unique_two_by_two():
    res = graded_linear_solve(
        [eq({"x": 1, "y": 1}, -3), eq({"x": 1, "y": -1}, -1)], ["x", "y"]
    )
    assert res.status == "unique"
    assert res.rank == 2
    assert res.assignment == {"x": Q(2), "y": Q(1)}


def test_unique_rational_solution():
    res = graded_linear_solve([eq({"c": 2}, -1)], ["c"])
    assert res.status == "unique"
    assert res.assignment == {"c": Q(1, 2)}


def test_rational_coefficients():
    res = graded_linear_solve(
        [eq({"a": Q(1, 3), "b": Q(1, 6)}, Q(-1, 2)), eq({"a": 1, "b": -1}, 0)],
        ["a", "b"],
    )
    assert res.status == "unique"
    assert res.assignment == {"a": Q(1), "b": Q(1)}


def test_underdetermined_reports_free_unknowns():
    res = graded_linear_solve([eq({"x": 1, "y": 1}, 0)], ["x", "y"])
    assert res.status == "underdetermined"
    assert res.rank == 1
    assert res.free_unknowns == ["y"]


def test_no_equations_all_free():
    res = graded_linear_solve([], ["x", "y"])
    assert res.status == "underdetermined"
    assert set(res.free_unknowns) == {"x", "y"}


def test_zero_unknowns_consistent():
    res = graded_linear_solve([eq({}, 0)], [])
    assert res.status == "unique"
    assert res.assignment == {}


def test_inconsistent_with_witness():
    res = graded_linear_solve(
        [eq({"x": 1, "y": 1}, -1), eq({"x": 1, "y": 1}, -2)], ["x", "y"]
    )
    assert res.status == "inconsistent"
    assert res.witness is not None
    assert res.witness["const"] != "0"


def test_constant_only_contradiction():
    res = graded_linear_solve([eq({}, 5)], ["x"])
    assert res.status == "inconsistent"


def test_duplicate_and_scaled_rows_are_deduplicated():
    res = graded_linear_solve(
        [
            eq({"x": 1, "y": 2}, -3),
            eq({"x": 2, "y": 4}, -6),
            eq({"x": Q(1, 2), "y": 1}, Q(-3, 2)),
        ],
        ["x", "y"],
    )
    assert res.num_equations == 1
    assert res.status == "underdetermined"


def test_unknown_name_rejected():
    import pytest

    with pytest.raises(KeyError):
        graded_linear_solve([eq({"zz": 1}, 0)], ["x"])


def test_larger_unique_system():
    # x=1, y=-2, z=1/3 hidden in three shuffled equations.
    res = graded_linear_solve(
        [
            eq({"x": 2, "y": 1, "z": 3}, -1),
            eq({"y": 5, "z": -3}, 11),
            eq({"x": -1, "z": 6}, -1),
        ],
        ["x", "y", "z"],
    )
    assert res.status == "unique"
    assert res.assignment == {"x": Q(1), "y": Q(-2), "z": Q(1, 3)}


coeff = st.integers(-6, 6)


@settings(deadline=None, max_examples=120)
@given(
    st.integers(1, 4),
    st.lists(st.lists(coeff, min_size=5, max_size=5), max_size=6),
)
def test_agrees_with_dense_fraction_oracle(n, raw_rows):
    rows = [r[: n + 1] for r in raw_rows]
    equations = [
        eq({f"c{j}": row[j] for j in range(n)}, row[n]) for row in rows
    ]
    res = graded_linear_solve(equations, [f"c{j}" for j in range(n)])
    # Oracle convention is coeffs . x = const, so negate the constant column.
    status, sol = dumb_solve(
        [[Fraction(v) for v in row[:n]] + [Fraction(-row[n])] for row in rows], n
    )
    assert res.status == status
    if status == "unique":
        for j in range(n):
            got = res.assignment[f"c{j}"]
            assert Fraction(int(got.numerator), int(got.denominator)) == sol[j]


@settings(deadline=None, max_examples=60)
@given(
    st.integers(1, 4),
    st.data(),
)
def test_recovers_planted_solution(n, data):
    solution = [
        data.draw(st.fractions(min_value=-3, max_value=3, max_denominator=4))
        for _ in range(n)
    ]
    m = data.draw(st.integers(n, n + 2))
    equations = []
    for _ in range(m):
        coeffs = [data.draw(coeff) for _ in range(n)]
        const = -sum(c * s for c, s in zip(coeffs, solution))
        equations.append(
            eq({f"c{j}": coeffs[j] for j in range(n)}, const)
        )
    res = graded_linear_solve(equations, [f"c{j}" for j in range(n)])
    assert res.status in ("unique", "underdetermined")
    if res.status == "unique":
        for j in range(n):
            got = res.assignment[f"c{j}"]
            assert Fraction(int(got.numerator), int(got.denominator)) == solution[j]
