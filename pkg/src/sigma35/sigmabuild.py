"""Grade-by-grade construction of the sigma expansion.

sigma is an even, weight-8-homogeneous series in u1..u4 whose lambda-grade-m
part pairs u-monomials of weight 8+3m with lambda-monomials of weight -3m.
Grade 0 is the fixed quasi-period polynomial; every later grade is the
unique solution of an exact affine system assembled from three sources:

  (a) vanishing on the three-point Abel stratum — sigma composed with
      u(t1)+u(t2)+u(t3) is identically zero, termwise in (t1, t2, t3) and
      per lambda-monomial;
  (b) two bilinear differential constraints, expressed through the Hirota
      subset expansion sigma^2 Q_S = -1/2 sum_{T of S} (-1)^{|T|}
      (multiplicity of T) sigma_T sigma_{S commat T}:
      the weight-12 constraint sigma^2 (Q_4444 + 3 p_33) = 0 and the
      weight-5 constraint sigma^2 (Q_1344 + p_12 - 2 lambda4 p_14) = 0;
  (c) one more bilinear relation of the same kind, sigma^2 (Q_3344 + p_23
      - 2 lambda4 p_34) = 0, which fixes the normalization that (a)+(b)
      genuinely leave open: rescaling sigma by exp(c u2 u3), with c any
      rational combination of lambda3 and lambda4^2, preserves stratum
      vanishing (the exponential never vanishes) and is invisible to both
      constraints in (b), but shifts p_23 by -c and so breaks (c) unless
      c = 0.

All three sources are block-diagonal in the lambda-grading, so each grade
is an exact linear solve over the rationals in the coefficients of that
grade's candidate monomials (even total degree, exponent class
a+b+2c+d = 2 mod 3).
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import lru_cache

from .curve import CurveParams
from .grading import (
    LAMBDA_ONE,
    T2_VARS,
    T3_VARS,
    T_VAR,
    U_VARS,
    WeightedSeries,
    lambda_monomials_of_weight,
    mul_lexp,
)
from .linsolve import graded_linear_solve
from .puiseux import multi_point_abel_sum
from .rationals import Q

_L4 = (0, 0, 0, 0, 1)

SCHUR_COEFFS = (
    ((0, 0, 0, 8), "1/448"),
    ((0, 2, 0, 0), "1"),
    ((0, 1, 1, 2), "1"),
    ((0, 0, 2, 4), "-1/8"),
    ((0, 0, 4, 0), "-1/4"),
    ((1, 0, 0, 1), "-1"),
)


def schur_weierstrass() -> WeightedSeries:
    """The weight-8 leading polynomial
    u4^8/448 + u2^2 + u2 u3 u4^2 - u3^2 u4^4/8 - u3^4/4 - u1 u4."""
    return WeightedSeries(
        U_VARS, {(m, LAMBDA_ONE): Q(c) for m, c in SCHUR_COEFFS}
    )


# ------------------------------------------------------------- candidates


@lru_cache(maxsize=None)
def _u_monomials_of_weight(weight: int) -> tuple[tuple[int, ...], ...]:
    out = []
    for a in range(weight // 7 + 1):
        for b in range((weight - 7 * a) // 4 + 1):
            for c in range((weight - 7 * a - 4 * b) // 2 + 1):
                d = weight - 7 * a - 4 * b - 2 * c
                out.append((a, b, c, d))
    return tuple(sorted(out))


def candidate_basis(grade: int) -> list[tuple[tuple[int, ...], tuple[int, ...]]]:
    """All (u-monomial, lambda-monomial) pairs allowed at the given grade:
    u-weight 8+3*grade against lambda-weight -3*grade, even total u-degree,
    and exponent class a+b+2c+d = 2 (mod 3)."""
    if grade < 1:
        raise ValueError("grade 0 is the fixed leading polynomial")
    pairs = []
    for mexp in _u_monomials_of_weight(8 + 3 * grade):
        a, b, c, d = mexp
        if (a + b + c + d) % 2:
            continue
        if (a + b + 2 * c + d) % 3 != 2:
            continue
        for lexp in lambda_monomials_of_weight(-3 * grade):
            pairs.append((mexp, lexp))
    return pairs


# ------------------------------------------------------- Hirota expansion


def _submultisets(counts: tuple[tuple[int, int], ...]):
    """(T, multiplicity) over submultisets of {index: count}."""
    ranges = [range(c + 1) for _, c in counts]
    for pick in itertools.product(*ranges):
        mult = 1
        chosen = []
        for (idx, c), k in zip(counts, pick):
            mult *= _binom(c, k)
            chosen.extend([idx] * k)
        yield tuple(chosen), mult


def _binom(n: int, k: int) -> int:
    out = 1
    for i in range(k):
        out = out * (n - i) // (i + 1)
    return out


class PartialCache:
    """Memoized multi-index partial derivatives of one series."""

    def __init__(self, series: WeightedSeries) -> None:
        self.base = series
        self.cache: dict[tuple[int, ...], WeightedSeries] = {(): series}

    def get(self, indices: tuple[int, ...]) -> WeightedSeries:
        got = self.cache.get(indices)
        if got is None:
            got = self.get(indices[:-1]).diff(f"u{indices[-1]}")
            self.cache[indices] = got
        return got


def hirota_cross(
    indices: tuple[int, ...], left: PartialCache, right: PartialCache
) -> WeightedSeries:
    """-1/2 sum over submultisets T of the index multiset of
    (-1)^|T| (multiplicity) left_T right_{complement}; with left = right =
    sigma this is sigma^2 Q_indices (four indices) or sigma^2 p_ij (two)."""
    counts = tuple(
        (idx, len(list(grp))) for idx, grp in itertools.groupby(sorted(indices))
    )
    acc = WeightedSeries(U_VARS, {})
    for chosen, mult in _submultisets(counts):
        complement = list(indices)
        for idx in chosen:
            complement.remove(idx)
        sign = -1 if len(chosen) % 2 else 1
        term = left.get(chosen).mul(right.get(tuple(sorted(complement))))
        acc = acc.add(term.scale(Q(sign * mult)))
    return acc.scale(Q(-1, 2))


def hirota_expression(indices, sigma) -> WeightedSeries:
    """sigma^2 Q_indices as the finite signed sum of sigma-partial products;
    accepts the built SigmaSeries or any weighted series in u1..u4."""
    indices = tuple(sorted(int(i) for i in indices))
    if len(indices) % 2:
        raise ValueError("derivative multisets of odd size are excluded")
    if not all(1 <= i <= 4 for i in indices):
        raise ValueError("indices run over the four Abel coordinates")
    series = sigma.series if isinstance(sigma, SigmaSeries) else sigma
    cache = PartialCache(series)
    return hirota_cross(indices, cache, cache)


#: The two differential constraints, as lists of (coefficient,
#: lambda-monomial, derivative multiset): each entry contributes
#: coeff * lambda^lexp * sigma^2 Q_multiset to the expression required
#: to vanish.
HIROTA_CONSTRAINTS = (
    (
        "Q4444 + 3*p33",
        ((Q(1), LAMBDA_ONE, (4, 4, 4, 4)), (Q(3), LAMBDA_ONE, (3, 3))),
    ),
    (
        "Q1344 + p12 - 2*l4*p14",
        (
            (Q(1), LAMBDA_ONE, (1, 3, 4, 4)),
            (Q(1), LAMBDA_ONE, (1, 2)),
            (Q(-2), _L4, (1, 4)),
        ),
    ),
)

#: The normalization-fixing relation (same encoding).  It pins the
#: exp(c u2 u3) rescaling freedom that the pair above cannot see, because
#: it is the lowest-weight catalog relation involving p_23.
GAUGE_CONSTRAINTS = (
    (
        "Q3344 + p23 - 2*l4*p34",
        (
            (Q(1), LAMBDA_ONE, (3, 3, 4, 4)),
            (Q(1), LAMBDA_ONE, (2, 3)),
            (Q(-2), _L4, (3, 4)),
        ),
    ),
)


# --------------------------------------------------------------- the build


@dataclass(frozen=True)
class GradeDiagnostics:
    grade: int
    candidates: int
    equations: int
    rank: int
    status: str
    free: tuple[str, ...]


@dataclass(frozen=True)
class SigmaSeries:
    """The built expansion plus its construction record."""

    series: WeightedSeries
    max_grade: int
    strata_order: int
    constraints: tuple[str, ...]
    diagnostics: tuple[GradeDiagnostics, ...]
    params: CurveParams

    def grade_part(self, grade: int) -> WeightedSeries:
        return self.series.lambda_grade_part(grade)

    def provenance(self) -> dict:
        return {
            "max_grade": self.max_grade,
            "strata_order": self.strata_order,
            "constraints": list(self.constraints),
            "params": self.params.label(),
            "per_grade_nullity": [len(d.free) for d in self.diagnostics],
        }


def _unknown_name(mexp, lexp) -> str:
    return "c[" + ",".join(map(str, mexp)) + "|" + ",".join(map(str, lexp)) + "]"


def _strata_rows(grade, sigma_partial, candidates, images, rows):
    """Vanishing of sigma on the three-point stratum, at this lambda grade.

    Because sigma is homogeneous of total weight 8, the grade-g sector of
    the composed series lives at t-weight exactly 8+3g; the candidate
    contributions are their compositions with the lambda = 0 images."""
    vars_ = images[0].vars
    known = sigma_partial.substitute(dict(zip(U_VARS.names, images)), vars_)
    sector = known.lambda_grade_part(grade)
    for (mexp, lexp), c in sector.terms.items():
        rows.setdefault(("strata", mexp, lexp), ({}, Q(0)))
        coeffs, const = rows[("strata", mexp, lexp)]
        rows[("strata", mexp, lexp)] = (coeffs, const + c)
    zero_images = {
        name: img.lambda_grade_part(0) for name, img in zip(U_VARS.names, images)
    }
    composed_cache: dict[tuple[int, ...], WeightedSeries] = {}
    for mexp, lexp in candidates:
        phi = composed_cache.get(mexp)
        if phi is None:
            mono = WeightedSeries.monomial(U_VARS, mexp)
            phi = mono.substitute(zero_images, vars_)
            composed_cache[mexp] = phi
        name = _unknown_name(mexp, lexp)
        for (tm, tl), c in phi.terms.items():
            key = ("strata", tm, mul_lexp(tl, lexp))
            rows.setdefault(key, ({}, Q(0)))
            rows[key][0][name] = rows[key][0].get(name, Q(0)) + c


def _hirota_rows(grade, sigma_partial, candidates, rows, table):
    """Bilinear constraints from `table` at this lambda grade: the cross
    terms pairing a candidate against the grade-0 polynomial are the affine
    part; pairs of already-fixed grades supply the constants."""
    partial_cache = PartialCache(sigma_partial)
    schur_cache = PartialCache(schur_weierstrass())
    mono_caches = {}
    for mexp, _ in candidates:
        if mexp not in mono_caches:
            mono_caches[mexp] = PartialCache(WeightedSeries.monomial(U_VARS, mexp))
    for label, terms in table:
        known = WeightedSeries(U_VARS, {})
        for coeff, lexp, multiset in terms:
            known = known.add(
                hirota_cross(multiset, partial_cache, partial_cache
                             ).scale(coeff, lexp)
            )
        sector = known.lambda_grade_part(grade)
        for (mexp, lexp), c in sector.terms.items():
            key = (label, mexp, lexp)
            rows.setdefault(key, ({}, Q(0)))
            coeffs, const = rows[key]
            rows[key] = (coeffs, const + c)
        for cand_mexp, cand_lexp in candidates:
            name = _unknown_name(cand_mexp, cand_lexp)
            cache = mono_caches[cand_mexp]
            linear = WeightedSeries(U_VARS, {})
            for coeff, lexp, multiset in terms:
                if any(lexp):
                    continue  # lambda-carrying terms pair into later grades
                cross = hirota_cross(multiset, cache, schur_cache).add(
                    hirota_cross(multiset, schur_cache, cache)
                )
                linear = linear.add(cross.scale(coeff, lexp))
            for (tm, tl), c in linear.terms.items():
                key = (label, tm, mul_lexp(tl, cand_lexp))
                rows.setdefault(key, ({}, Q(0)))
                rows[key][0][name] = rows[key][0].get(name, Q(0)) + c


def build_sigma(
    params: CurveParams | None = None,
    max_grade: int = 5,
    strata_order: int = 40,
    constraints: tuple[str, ...] = ("strata", "hirota", "gauge"),
) -> SigmaSeries:
    """Construct sigma through the requested lambda grade.

    The series is assembled with all five moduli symbolic (the grading that
    drives the solve lives on the lambda exponents); numeric moduli are
    specialized into the finished series.  Raises on an inconsistent
    system; an underdetermined grade completes with the free coefficients
    left at zero and reported in the diagnostics.

    With the constraint pair ("strata", "hirota") alone, the grade-2 block
    genuinely leaves the two u1*u2*u3*u4 coefficients free: rescaling by
    exp(q) with q a weight-0 quadratic is invisible to stratum vanishing
    (the exponential never vanishes), and of the three weight-admissible
    quadratics (l4*u3*u4, l3*u2*u3, l4^2*u2*u3) those two constraints only
    exclude the first.  Pinning the free coefficients to zero selects the
    same normalization as the default "gauge" source: the one in which the
    four-index relation catalog holds without constant corrections.  The
    tests exercise this adjudication both ways.
    """
    if not constraints:
        raise ValueError("at least one constraint source is required")
    unknown_sources = set(constraints) - {"strata", "hirota", "gauge"}
    if unknown_sources:
        raise ValueError(f"unknown constraint sources: {sorted(unknown_sources)}")
    params = params or CurveParams.symbolic()
    # Every equation through this grade lives at t-weight <= 8+3*max_grade,
    # so deeper strata windows cannot add information.
    window = min(strata_order, 8 + 3 * max_grade + 1)
    images = None
    if "strata" in constraints:
        images = multi_point_abel_sum(CurveParams.symbolic(), 3, window)
    sigma = schur_weierstrass()
    diagnostics = []
    for grade in range(1, max_grade + 1):
        candidates = candidate_basis(grade)
        names = [_unknown_name(m, l) for m, l in candidates]
        rows: dict = {}
        if "strata" in constraints:
            _strata_rows(grade, sigma, candidates, images, rows)
        if "hirota" in constraints:
            _hirota_rows(grade, sigma, candidates, rows, HIROTA_CONSTRAINTS)
        if "gauge" in constraints:
            _hirota_rows(grade, sigma, candidates, rows, GAUGE_CONSTRAINTS)
        equations = [rows[key] for key in sorted(rows)]
        result = graded_linear_solve(equations, names)
        if result.status == "inconsistent":
            raise ValueError(
                f"grade {grade} constraints are inconsistent: {result.witness}"
            )
        if result.status == "underdetermined":
            # Complete the build with the unfixed coefficients pinned to
            # zero; they stay on record in the diagnostics.
            pinned = equations + [
                ({name: Q(1)}, Q(0)) for name in result.free_unknowns
            ]
            assignment = graded_linear_solve(pinned, names).assignment
        else:
            assignment = result.assignment
        addition = WeightedSeries(U_VARS, {})
        for (mexp, lexp), name in zip(candidates, names):
            value = assignment.get(name, Q(0))
            if value != 0:
                addition = addition.add(
                    WeightedSeries.monomial(U_VARS, mexp, value, lexp)
                )
        sigma = sigma.add(addition)
        diagnostics.append(
            GradeDiagnostics(
                grade=grade,
                candidates=len(candidates),
                equations=len(equations),
                rank=result.rank,
                status=result.status,
                free=tuple(result.free_unknowns),
            )
        )
    if sigma.total_weight() != 8:
        raise AssertionError("built series lost weight homogeneity")
    for (mexp, _), _c in sigma.terms.items():
        a, b, c, d = mexp
        if (a + b + c + d) % 2 or (a + b + 2 * c + d) % 3 != 2:
            raise AssertionError("built series violates parity or equivariance")
    return SigmaSeries(
        series=params.apply(sigma),
        max_grade=max_grade,
        strata_order=strata_order,
        constraints=tuple(constraints),
        diagnostics=tuple(diagnostics),
        params=params,
    )


# ------------------------------------------------------------------ audits


def strata_vanishing_audit(sig: SigmaSeries, k: int) -> dict[int, bool]:
    """Does the built sigma vanish on the k-point stratum?  Checked per
    lambda grade through the built depth (deeper sectors are unfinished,
    so the composition is cut at t-weight 8+3*maxGrade first; with numeric
    moduli everything lands in grade 0)."""
    vars_ = {1: T_VAR, 2: T2_VARS, 3: T3_VARS}[k]
    window = 8 + 3 * sig.max_grade
    images = multi_point_abel_sum(sig.params, k, window + 1)
    composed = sig.series.substitute(dict(zip(U_VARS.names, images)), vars_)
    composed = composed.truncate(window)
    return {
        g: composed.lambda_grade_part(g).is_zero()
        for g in range(sig.max_grade + 1)
    }


def hirota_residual_audit(sig: SigmaSeries) -> dict[str, dict[int, bool]]:
    """Residuals of all three differential constraints, per lambda grade
    through the built depth (cut at the main weight the build determines).
    The normalization relation is audited even on builds that did not
    impose it: it holds exactly when the free grade-2 coefficients were
    pinned at zero, which is what the builder does."""
    cache = PartialCache(sig.series)
    out = {}
    for label, terms in HIROTA_CONSTRAINTS + GAUGE_CONSTRAINTS:
        expr = WeightedSeries(U_VARS, {})
        base = 16 - sum(U_VARS.weights[i - 1] for i in terms[0][2])
        for coeff, lexp, multiset in terms:
            expr = expr.add(hirota_cross(multiset, cache, cache).scale(coeff, lexp))
        expr = sig.params.apply(expr.truncate(base + 3 * sig.max_grade))
        out[label] = {
            g: expr.lambda_grade_part(g).is_zero()
            for g in range(sig.max_grade + 1)
        }
    return out
