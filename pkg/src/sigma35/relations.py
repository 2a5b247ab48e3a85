"""Exact verification of the relation catalog against a built sigma.

A catalog entry asserts that a polynomial in the p and Q functions
vanishes identically.  Multiplying through by a power of sigma clears
every pole, so the assertion becomes: a windowed power series is zero.
Each additive term is evaluated as numerator / sigma^power, all terms
are raised to the common power, and the numerators are summed.  Within
its reliable window the sum is the exact residual, which forces the
three-way verdict:

* ``FAIL`` -- the residual keeps a monomial inside the window.  That
  monomial belongs to the true residual, so the relation is false, full
  stop.
* ``PASS`` -- the residual is empty and the window reaches at least
  ``SLACK`` weight units beyond the lowest weight any constituent term
  could contribute, so a nonzero residual could not have hidden.
* ``INDETERMINATE`` -- the residual is empty but the surviving window is
  too narrow to certify the identity.  More sigma grades are needed;
  silence is never reported as success.

Verifiers share one calculus context, so p/Q series, sigma powers, and
factor products are computed once per suite rather than once per entry.
"""
from __future__ import annotations

import time
from dataclasses import dataclass, field

from .abelian import FracSeries, calculus
from .catalog import (
    SECTIONS,
    VARIANTS,
    RelationEntry,
    Term,
    load_catalog,
    load_controls,
    load_variants,
    parse_terms,
)
from .grading import U_VARS, WeightedSeries, sorted_term_keys
from .rationals import Q

#: Minimum distance, in weight units, between the lowest possible
#: constituent weight and the end of the residual window for a clean
#: residual to count as a PASS.
SLACK = 6


def _fmt_key(key) -> str:
    mexp, lexp = key
    parts = [
        name if e == 1 else f"{name}^{e}"
        for name, e in zip(U_VARS.names, mexp)
        if e
    ]
    parts += [
        f"l{j}" if e == 1 else f"l{j}^{e}"
        for j, e in enumerate(lexp)
        if e
    ]
    return "*".join(parts) or "1"


@dataclass(frozen=True)
class VerificationReport:
    """Outcome of one relation check, with enough context to audit it."""

    relation: str
    section: str
    verdict: str                    # PASS | FAIL | INDETERMINATE
    power: int                      # sigma power cleared from the residual
    window: tuple                   # (w_lo, w_hi) on the cleared numerator
    residual_terms: int
    lowest_residual: str | None    # monomial witnessing a FAIL
    runtime_s: float
    expected: str | None = None
    note: str = ""
    provenance: dict = field(default_factory=dict)

    @property
    def as_expected(self) -> bool | None:
        return None if self.expected is None else self.verdict == self.expected

    def line(self) -> str:
        w_lo, w_hi = self.window
        out = (
            f"{self.verdict:<13} {self.relation:<16} section={self.section}"
            f" power={self.power} window=[{w_lo},{w_hi}]"
            f" residual={self.residual_terms} time={self.runtime_s:.2f}s"
        )
        if self.lowest_residual is not None:
            out += f" lowest={self.lowest_residual}"
        if self.expected is not None:
            tag = "as expected" if self.as_expected else "UNEXPECTED"
            out += f" expected={self.expected} ({tag})"
        return out


@dataclass(frozen=True)
class Adjudication:
    """A suspect group's received form and variants, tried side by side."""

    group: str
    reports: tuple[VerificationReport, ...]   # received entry first
    passing: tuple[str, ...]                  # idents whose verdict is PASS

    def line(self) -> str:
        holds = ", ".join(self.passing) if self.passing else "none"
        return f"{self.group}: holds for {holds}"


class RelationVerifier:
    """Evaluates catalog entries over one sigma, reusing everything."""

    def __init__(self, sigma) -> None:
        self.calc = calculus(sigma)
        one = FracSeries(self.calc, WeightedSeries.constant(U_VARS, Q(1)), 0)
        self._products: dict[tuple, FracSeries] = {(): one}

    # -- evaluation ------------------------------------------------------

    def symbol(self, sym) -> FracSeries:
        kind, idx = sym[0], sym[1]
        if kind == "p":
            return self.calc.pfunction(idx)
        if kind == "q":
            return self.calc.qfunction(idx)
        if kind == "dq":
            return self.product((("q", idx),)).diff(f"u{sym[2]}")
        raise ValueError(f"unknown symbol kind {kind!r}")

    def product(self, factors: tuple) -> FracSeries:
        """Product of parsed factors, cached by (sorted) prefix."""
        got = self._products.get(factors)
        if got is None:
            got = self.product(factors[:-1]).mul(self.symbol(factors[-1]))
            self._products[factors] = got
        return got

    def term_series(self, term: Term) -> FracSeries:
        return self.product(term.factors).scale(term.coeff, term.lexp)

    def summed(self, terms) -> tuple[FracSeries, int | None]:
        """Sum of terms at the common sigma power, plus the lowest weight
        any constituent could contribute to the cleared numerator."""
        frs = [self.term_series(t) for t in terms]
        power = max((fr.power for fr in frs), default=0)
        raised = [fr.raise_to(power) for fr in frs]
        w_lo = None
        num = WeightedSeries.zero(U_VARS)
        for fr in raised:
            b = fr.minwt_bound()
            if b is not None and (w_lo is None or b < w_lo):
                w_lo = b
            num = num.add(fr.num)
        return FracSeries(self.calc, num, power), w_lo

    # -- verdicts ---------------------------------------------------------

    def _report(self, ident, section, residual, w_lo, t0,
                expected=None, note="") -> VerificationReport:
        w_hi = residual.reliable
        if residual.num.terms:
            verdict = "FAIL"
            lowest = _fmt_key(sorted_term_keys(residual.num)[0])
        else:
            lowest = None
            if w_hi is None or w_lo is None or w_hi >= w_lo + SLACK:
                verdict = "PASS"
            else:
                verdict = "INDETERMINATE"
        return VerificationReport(
            relation=ident,
            section=section,
            verdict=verdict,
            power=residual.power,
            window=(w_lo, w_hi),
            residual_terms=len(residual.num.terms),
            lowest_residual=lowest,
            runtime_s=time.perf_counter() - t0,
            expected=expected,
            note=note,
            provenance=dict(self.calc.provenance),
        )

    def verify(self, entry: RelationEntry) -> VerificationReport:
        t0 = time.perf_counter()
        if entry.section == "quad-four-index":
            residual, w_lo = self._quad_residual()
        else:
            residual, w_lo = self.summed(entry.zero_terms())
        return self._report(entry.ident, entry.section, residual, w_lo, t0,
                            expected=entry.expected, note=entry.note)

    def _quad_residual(self) -> tuple[FracSeries, int | None]:
        """Residual of the quadratic four-index consistency identity.

        Rather than expanding the product of right-hand sides into a few
        hundred degree-twelve terms, multiply the three evaluated sides:
        the catalog entry's term lists are exactly these products, so the
        residuals agree, and this route stays within seconds."""
        rhs = {
            e.ident: e.rhs
            for e in load_catalog("three-index-quadratic")
            if e.ident in ("p444^2", "p344^2", "p344*p444")
        }
        sides = {k: self.summed(v)[0] for k, v in rhs.items()}
        left = sides["p444^2"].mul(sides["p344^2"])
        right = sides["p344*p444"].mul(sides["p344*p444"])
        if left.power != right.power:
            raise ValueError("cleared powers diverged in the quad identity")
        bounds = [b for b in (left.minwt_bound(), right.minwt_bound())
                  if b is not None]
        w_lo = min(bounds, default=None)
        return left.sub(right), w_lo

    # -- suites -----------------------------------------------------------

    def run_section(self, section: str) -> list[VerificationReport]:
        return [self.verify(e) for e in load_catalog(section)]

    def run_controls(self) -> list[VerificationReport]:
        return [self.verify(e) for e in load_controls()]

    def adjudicate(self, group: str) -> Adjudication:
        entries = [
            e
            for section in SECTIONS
            for e in load_catalog(section)
            if e.suspect == group
        ]
        reports = [self.verify(e) for e in entries]
        reports += [self.verify(v) for v in load_variants(group)]
        passing = tuple(r.relation for r in reports if r.verdict == "PASS")
        return Adjudication(group, tuple(reports), passing)

    def adjudicate_all(self) -> dict[str, Adjudication]:
        return {group: self.adjudicate(group) for group in VARIANTS}

    def boussinesq_consequence(self) -> VerificationReport:
        """Differentiate the lowest relation p4444 = 6*p44^2 - 3*p33 twice
        by u4 and expand with the product rule; the result must vanish
        identically.  In the two u4-directions this is the Boussinesq
        equation satisfied by p44."""
        t0 = time.perf_counter()
        terms = parse_terms(
            "p444444 - 12*p444^2 - 12*p44*p4444 + 3*p3344"
        )
        residual, w_lo = self.summed(terms)
        return self._report("boussinesq-p44", "derived", residual, w_lo, t0,
                            expected="PASS",
                            note="second u4 derivative of p4444-pure")


def _verifier(sigma) -> RelationVerifier:
    return sigma if isinstance(sigma, RelationVerifier) else RelationVerifier(sigma)


def verify_relation(entry: RelationEntry, sigma) -> VerificationReport:
    """One-off check of a single entry (suites should share a verifier)."""
    return _verifier(sigma).verify(entry)


def run_suite(section: str, sigma) -> list[VerificationReport]:
    """Verify every entry of a catalog section over one shared context."""
    return _verifier(sigma).run_section(section)


def adjudicate_suspects(sigma) -> dict[str, Adjudication]:
    """Try each suspect group's received form and variants; report which
    members hold."""
    return _verifier(sigma).adjudicate_all()


def run_negative_controls(sigma) -> list[VerificationReport]:
    """Verify the deliberately false relations; every verdict must be FAIL."""
    return _verifier(sigma).run_controls()


def boussinesq_consequence(sigma) -> VerificationReport:
    return _verifier(sigma).boussinesq_consequence()
