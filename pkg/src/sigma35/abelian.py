"""Abelian-function calculus over a built sigma series.

Everything with a pole lives here as numerator over a sigma power: the
log-derivative functions p_ij and their higher derivatives, the bilinear
Q combinations, exact division by sigma for pole-order reduction, the
two-point substitutions u ± v, and the cyclic phase action on the
u-coordinates.  Denominators are never expanded as inverse series; every
identity downstream clears to a common sigma power and checks the
numerator inside its reliable window.

A built sigma is exact per lambda grade but stops at a finite grade, so
as an analytic object it is only trustworthy through main weight
8 + 3*max_grade; the calculus context stamps that window on the series
once and lets the ring operations propagate it.
"""

from __future__ import annotations

from dataclasses import dataclass

from .grading import LAMBDA_ONE, U_VARS, VarSpec, WeightedSeries, mul_lexp
from .rationals import Q
from .sigmabuild import PartialCache, SigmaSeries, hirota_cross

UV_VARS = VarSpec(
    ("u1", "u2", "u3", "u4", "v1", "v2", "v3", "v4"),
    (7, 4, 2, 1, 7, 4, 2, 1),
)


def _wshift(w: int | None, delta: int) -> int | None:
    return None if w is None else w + delta


def _wmin(a: int | None, b: int | None) -> int | None:
    if a is None:
        return b
    if b is None:
        return a
    return min(a, b)


# --- exact division ------------------------------------------------------------


def divide_by_sigma(num: WeightedSeries, sigma: WeightedSeries) -> WeightedSeries:
    """Exact quotient num / sigma in the weight-graded ring.

    Proceeds bucket by bucket from sigma's lowest main weight (the leading
    polynomial, whose lex-leading term is -u1*u4, an invertible
    coefficient), so divisibility is checked as the quotient is produced.
    The quotient window is the best one consistent with the product rule;
    content of num beyond its own window is ignored, never trusted.
    """
    if num.vars != sigma.vars:
        raise ValueError("dividend and divisor must share a variable set")
    if sigma.is_zero():
        raise ValueError("division by the zero series")
    sb = sigma.buckets()
    s_min = min(sb)
    lead = dict(sb[s_min])
    lm = max(k[0] for k in lead)
    lm_keys = [k for k in lead if k[0] == lm]
    if len(lm_keys) > 1 or any(lm_keys[0][1]):
        raise ValueError("divisor's lowest bucket has no invertible leading term")
    lc = lead[lm_keys[0]]

    if num.is_zero():
        return WeightedSeries.zero(num.vars, _wshift(num.reliable, -s_min))

    m_n = num.min_term_weight()
    window = _wmin(
        _wshift(num.reliable, -s_min),
        _wshift(sigma.reliable, m_n - 2 * s_min),
    )
    nb = num.buckets()
    w_stop = window if window is not None else max(nb) - s_min

    quotient: dict = {}
    q_buckets: dict[int, dict] = {}
    for w in range(m_n - s_min, w_stop + 1):
        tgt = dict(nb.get(w + s_min, ()))
        for s, terms in sb.items():
            prior = q_buckets.get(w + s_min - s)
            if s == s_min or not prior:
                continue
            for (sm, sl), sc in terms:
                for (qm, ql), qc in prior.items():
                    key = (tuple(a + b for a, b in zip(sm, qm)), mul_lexp(sl, ql))
                    acc = tgt.get(key, 0) - sc * qc
                    if acc == 0:
                        tgt.pop(key, None)
                    else:
                        tgt[key] = acc
        q_w: dict = {}
        while tgt:
            mmax = max(k[0] for k in tgt)
            if any(a < b for a, b in zip(mmax, lm)):
                raise ValueError(
                    f"series is not divisible by sigma at weight {w + s_min}"
                )
            qm = tuple(a - b for a, b in zip(mmax, lm))
            for key in [k for k in tgt if k[0] == mmax]:
                qc = tgt[key] / lc
                q_w[(qm, key[1])] = qc
                for (sm, sl), sc in lead.items():
                    k2 = (tuple(a + b for a, b in zip(sm, qm)), mul_lexp(sl, key[1]))
                    acc = tgt.get(k2, 0) - qc * sc
                    if acc == 0:
                        tgt.pop(k2, None)
                    else:
                        tgt[k2] = acc
        q_buckets[w] = q_w
        quotient.update(q_w)
    return WeightedSeries(num.vars, quotient, window)


# --- the calculus context -------------------------------------------------------


class AbelianCalc:
    """Shared context for p/Q work over one sigma: the windowed series, its
    partial-derivative cache, sigma powers, and memoized fractions.

    Cached values are immutable once inserted, so concurrent readers are
    safe and a duplicated insertion is idempotent.
    """

    def __init__(self, sigma: SigmaSeries) -> None:
        self.provenance = sigma.provenance()
        self.sigma = sigma.series.truncate(8 + 3 * sigma.max_grade)
        self.partials = PartialCache(self.sigma)
        self._powers: dict[int, WeightedSeries] = {
            0: WeightedSeries.constant(U_VARS, Q(1)),
            1: self.sigma,
        }
        self._p: dict[tuple[int, ...], FracSeries] = {}
        self._q: dict[tuple[int, ...], FracSeries] = {}

    def sigma_power(self, n: int) -> WeightedSeries:
        if n < 0:
            raise ValueError("sigma powers are nonnegative")
        got = self._powers.get(n)
        if got is None:
            got = self.sigma_power(n - 1).mul(self.sigma)
            self._powers[n] = got
        return got

    def pfunction(self, idx) -> "FracSeries":
        key = _pindex(idx, min_len=2)
        got = self._p.get(key)
        if got is None:
            if len(key) == 2:
                num = hirota_cross(key, self.partials, self.partials)
                got = FracSeries(self, num, 2)
            else:
                got = self.pfunction(key[:-1]).diff(f"u{key[-1]}")
            self._p[key] = got
        return got

    def qfunction(self, idx) -> "FracSeries":
        key = _pindex(idx, min_len=4)
        if len(key) not in (4, 6):
            raise ValueError("Q takes four or six indices")
        got = self._q.get(key)
        if got is None:
            if len(key) == 6:
                got = FracSeries(self, hirota_cross(key, self.partials, self.partials), 2)
            else:
                i, j, k, l = key
                combo = self.pfunction(key)
                for pair in (((i, j), (k, l)), ((i, k), (j, l)), ((i, l), (j, k))):
                    prod = self.pfunction(pair[0]).mul(self.pfunction(pair[1]))
                    combo = combo.sub(prod.scale(Q(2)))
                reduced = divide_by_sigma(divide_by_sigma(combo.num, self.sigma), self.sigma)
                got = FracSeries(self, reduced, 2)
            self._q[key] = got
        return got


def _pindex(idx, min_len: int) -> tuple[int, ...]:
    key = tuple(sorted(int(i) for i in idx))
    if len(key) < min_len:
        raise ValueError(f"index list needs at least {min_len} entries")
    if any(i < 1 or i > 4 for i in key):
        raise ValueError("indices must lie in 1..4")
    return key


def calculus(sigma) -> AbelianCalc:
    """Coerce a built sigma into a calculus context (idempotent)."""
    if isinstance(sigma, AbelianCalc):
        return sigma
    return AbelianCalc(sigma)


# --- fractions ------------------------------------------------------------------


@dataclass(frozen=True)
class FracSeries:
    """numerator / sigma^power, bound to the context that owns sigma.

    The window of the pair is the numerator's window; representation is
    canonical only up to a common sigma factor, so compare with
    :meth:`equals`, which clears to a common power first.
    """

    calc: AbelianCalc
    num: WeightedSeries
    power: int

    def __post_init__(self) -> None:
        if self.power < 0:
            raise ValueError("sigma-power denominators are nonnegative")

    @property
    def reliable(self) -> int | None:
        return self.num.reliable

    def minwt_bound(self) -> int | None:
        return self.num.minwt_bound()

    def is_zero(self) -> bool:
        return self.num.is_zero()

    def _join(self, other: "FracSeries") -> None:
        if self.calc is not other.calc:
            raise ValueError("fractions live over different sigma contexts")

    def raise_to(self, power: int) -> "FracSeries":
        if power < self.power:
            raise ValueError("cannot lower a denominator without dividing")
        if power == self.power:
            return self
        lift = self.calc.sigma_power(power - self.power)
        return FracSeries(self.calc, self.num.mul(lift), power)

    def add(self, other: "FracSeries") -> "FracSeries":
        self._join(other)
        p = max(self.power, other.power)
        return FracSeries(
            self.calc, self.raise_to(p).num.add(other.raise_to(p).num), p
        )

    def sub(self, other: "FracSeries") -> "FracSeries":
        return self.add(other.neg())

    def neg(self) -> "FracSeries":
        return FracSeries(self.calc, self.num.neg(), self.power)

    def scale(self, coeff: "Q", lexp=LAMBDA_ONE) -> "FracSeries":
        return FracSeries(self.calc, self.num.scale(coeff, lexp), self.power)

    def mul(self, other: "FracSeries") -> "FracSeries":
        self._join(other)
        return FracSeries(self.calc, self.num.mul(other.num), self.power + other.power)

    def diff(self, var: str) -> "FracSeries":
        sigma = self.calc.sigma
        i = U_VARS.index(var) + 1
        svar = self.calc.partials.get((i,))
        n = self.num.diff(var).mul(sigma).sub(self.num.mul(svar).scale(Q(self.power)))
        return FracSeries(self.calc, n, self.power + 1)

    def diff_multi(self, indices) -> "FracSeries":
        out = self
        for i in indices:
            out = out.diff(U_VARS.names[i - 1])
        return out

    def equals(self, other: "FracSeries") -> bool:
        return self.sub(other).num.is_zero()


def pfunction(idx, sigma) -> FracSeries:
    """The symmetric log-derivative function with the given indices, as
    numerator / sigma^len(idx)."""
    return calculus(sigma).pfunction(idx)


def qfunction(idx, sigma) -> FracSeries:
    """The bilinear four- or six-index combination, reduced to
    numerator / sigma^2 (the four-index reduction divides out sigma^2
    exactly and fails loudly if it cannot)."""
    return calculus(sigma).qfunction(idx)


# --- two-point substitution -----------------------------------------------------


def two_point_extend(sigma, form: str) -> WeightedSeries:
    """Sigma composed with u+v or u-v, as an eight-variable series.

    The substitution is linear and weight-homogeneous, so the window
    carries over unchanged.
    """
    signs = {"u+v": Q(1), "u-v": Q(-1)}
    if form not in signs:
        raise ValueError("form must be 'u+v' or 'u-v'")
    series = calculus(sigma).sigma if not isinstance(sigma, WeightedSeries) else sigma
    images = {}
    for i, name in enumerate(U_VARS.names):
        u_exp = tuple(1 if j == i else 0 for j in range(8))
        v_exp = tuple(1 if j == i + 4 else 0 for j in range(8))
        images[name] = [(Q(1), u_exp), (signs[form], v_exp)]
    return series.subs_linear(images, UV_VARS)


# --- cyclic phases ---------------------------------------------------------------


@dataclass(frozen=True)
class PhasedSeries:
    """Series split into the eigensectors of the cyclic action on u-space:
    (u1,u2,u4) scale by zeta^k and u3 by zeta^(2k), so a monomial picks up
    the phase k*(a+b+2c+d) mod 3 — which is k times its main weight mod 3,
    since the weights (7,4,2,1) reduce to (1,1,2,1).  Phases stay integer
    sector labels; no cyclotomic coefficient is ever stored."""

    sectors: tuple[WeightedSeries, WeightedSeries, WeightedSeries]

    def recombine(self) -> WeightedSeries:
        return self.sectors[0].add(self.sectors[1]).add(self.sectors[2])

    def phase(self) -> int | None:
        """The unique nonzero sector index, if there is exactly one."""
        live = [i for i, s in enumerate(self.sectors) if not s.is_zero()]
        if len(live) == 1:
            return live[0]
        return None if live else 0


def zeta_action_u(k: int, series: WeightedSeries) -> PhasedSeries:
    k = k % 3
    buckets: list[dict] = [{}, {}, {}]
    for key, c in series.terms.items():
        buckets[(k * series.vars.weight(key[0])) % 3][key] = c
    return PhasedSeries(
        tuple(WeightedSeries(series.vars, b, series.reliable) for b in buckets)
    )
