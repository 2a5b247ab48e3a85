"""Exact linear solving for graded coefficient systems.

Systems arriving here are small but must be solved exactly: the unknowns are
series coefficients fixed by homogeneous constraint equations

    sum_k  a_k * x_k + c = 0

with rational a_k, c.  Rows are normalised to integers, deduplicated, and
eliminated with fraction-free Bareiss cross-multiplication (every division in
the elimination is exact by the Sylvester identity; this is asserted).  The
outcome distinguishes a unique solution, an underdetermined system (free
unknowns reported by name), and an inconsistent system (the offending reduced
equation returned as a witness); all three are ordinary return values.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from math import gcd
from typing import Iterable, Mapping, Sequence

from .rationals import Q

Equation = tuple[Mapping[str, "Q"], "Q"]


@dataclass
class SolveResult:
    status: str  # "unique" | "underdetermined" | "inconsistent"
    rank: int
    assignment: dict[str, "Q"] | None = None
    free_unknowns: list[str] = field(default_factory=list)
    witness: dict | None = None
    num_equations: int = 0


def _normalise_row(coeffs: Mapping[str, "Q"], const: "Q", index: dict[str, int], n: int) -> tuple[int, ...] | None:
    """Integer row (a_0..a_{n-1}, c), gcd-reduced and sign-fixed; None if zero."""
    row = [Q(0)] * (n + 1)
    for name, a in coeffs.items():
        row[index[name]] += Q(a)
    row[n] = Q(const)
    dens = [int(x.denominator) for x in row if x != 0]
    if not dens:
        return None
    lcm = 1
    for d in dens:
        lcm = lcm * d // gcd(lcm, d)
    ints = [int(x * lcm) for x in row]
    g = 0
    for v in ints:
        g = gcd(g, abs(v))
    ints = [v // g for v in ints]
    for v in ints:
        if v != 0:
            if v < 0:
                ints = [-w for w in ints]
            break
    return tuple(ints)


def graded_linear_solve(
    equations: Iterable[Equation], unknowns: Sequence[str]
) -> SolveResult:
    """Solve an affine system over the named unknowns, exactly."""
    names = list(unknowns)
    n = len(names)
    index = {name: i for i, name in enumerate(names)}

    seen: set[tuple[int, ...]] = set()
    rows: list[list[int]] = []
    for coeffs, const in equations:
        for name in coeffs:
            if name not in index and coeffs[name] != 0:
                raise KeyError(f"equation mentions unknown unknown {name!r}")
        norm = _normalise_row(coeffs, const, index, n)
        if norm is None or norm in seen:
            continue
        seen.add(norm)
        rows.append(list(norm))
    m = len(rows)

    pivot_cols: list[int] = []
    pivot_rows: list[int] = []
    r = 0
    prev = 1
    for col in range(n):
        pivot = None
        best = None
        for i in range(r, m):
            v = rows[i][col]
            if v != 0 and (best is None or abs(v) < best):
                pivot, best = i, abs(v)
        if pivot is None:
            continue
        rows[r], rows[pivot] = rows[pivot], rows[r]
        prow = rows[r]
        pval = prow[col]
        for i in range(r + 1, m):
            irow = rows[i]
            f = irow[col]
            for j in range(col, n + 1):
                num = pval * irow[j] - f * prow[j]
                q, rem = divmod(num, prev)
                if rem:
                    raise ArithmeticError("fraction-free elimination division failed")
                irow[j] = q
        prev = pval
        pivot_cols.append(col)
        pivot_rows.append(r)
        r += 1
        if r == m:
            break

    rank = len(pivot_cols)

    # Any surviving row that is zero on the unknowns but not on the constant
    # witnesses inconsistency.
    for i in range(rank, m):
        row = rows[i]
        if any(row[j] for j in range(n)):
            continue
        if row[n] != 0:
            witness = {
                "coeffs": {},
                "const": str(row[n]),
                "note": "reduced equation 0 = nonzero constant",
            }
            return SolveResult(
                status="inconsistent", rank=rank, witness=witness, num_equations=m
            )

    free = [names[j] for j in range(n) if j not in set(pivot_cols)]
    if free:
        return SolveResult(
            status="underdetermined",
            rank=rank,
            free_unknowns=free,
            num_equations=m,
        )

    # Unique solution: back-substitute over the pivot rows.
    values: dict[int, Q] = {}
    for k in range(rank - 1, -1, -1):
        row = rows[pivot_rows[k]]
        col = pivot_cols[k]
        acc = Q(row[n])
        for j in range(col + 1, n):
            vj = values.get(j)
            if vj is not None and row[j]:
                acc += row[j] * vj
        values[col] = -acc / row[col]
    assignment = {names[j]: values.get(j, Q(0)) for j in range(n)}
    return SolveResult(
        status="unique", rank=rank, assignment=assignment, num_equations=m
    )
