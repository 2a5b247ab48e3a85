"""Local expansions at the place above x = infinity and the Abel map.

The planar model has a single place at infinity, and the exact scale s with
x = s^-3 uniformizes it: the curve equation then solves in closed form as
y = s^-5 (1 + G)^(1/3),  G = lambda4 s^3 + lambda3 s^6 + lambda2 s^9
+ lambda1 s^12 + lambda0 s^15, a binomial series with rational coefficients.
First-kind integrals give the Abel coordinates u1..u4 with base point at
infinity; reverting u4(s) fixes the working parameter t with u4(t) = t
exactly.  Under that convention the leading signs come out as
x = -t^-3 + ..., y = -t^-5 + ... (the opposite choice is t -> -t, which an
even sigma cannot distinguish).

Everything is a LocalSeries: a Laurent series in one weight-1 parameter with
exact rational lambda-polynomial coefficients and the same truncation-window
semantics as the multivariate weighted series (window = highest trusted
exponent, None = exact).
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

from .curve import CurveParams, curve_poly, eta_numerators
from .grading import (
    LAMBDA_ONE,
    T2_VARS,
    T3_VARS,
    T_VAR,
    VarSpec,
    WeightedSeries,
    lambda_weight,
    mul_lexp,
)
from .rationals import Q

U_WEIGHTS = (7, 4, 2, 1)

_L = [tuple(1 if i == j else 0 for i in range(5)) for j in range(5)]


def _wmin(a: int | None, b: int | None) -> int | None:
    if a is None:
        return b
    if b is None:
        return a
    return min(a, b)


class LocalSeries:
    """Univariate Laurent series with lambda-polynomial coefficients.

    ``terms`` maps (exponent, lambda-exponent) to a rational; ``reliable``
    is the highest exponent the series is trusted at (None for exact).
    """

    __slots__ = ("terms", "reliable")

    def __init__(self, terms=None, reliable: int | None = None) -> None:
        data: dict = {}
        if terms:
            for (e, lexp), c in terms.items():
                if c == 0 or (reliable is not None and e > reliable):
                    continue
                key = (int(e), tuple(lexp))
                acc = data.get(key)
                val = Q(c)
                if acc is None:
                    data[key] = val
                else:
                    acc = acc + val
                    if acc == 0:
                        del data[key]
                    else:
                        data[key] = acc
        self.terms = data
        self.reliable = reliable

    # -- constructors -----------------------------------------------------

    @classmethod
    def zero(cls, reliable: int | None = None) -> "LocalSeries":
        return cls({}, reliable)

    @classmethod
    def param(cls, e: int = 1, coeff="1", lexp=LAMBDA_ONE) -> "LocalSeries":
        return cls({(e, tuple(lexp)): Q(coeff)})

    @classmethod
    def one(cls) -> "LocalSeries":
        return cls.param(0)

    # -- inspection --------------------------------------------------------

    def is_zero(self) -> bool:
        return not self.terms

    def __eq__(self, other: object) -> bool:
        return isinstance(other, LocalSeries) and self.terms == other.terms

    def __hash__(self):  # pragma: no cover
        return hash(frozenset(self.terms.items()))

    def __repr__(self) -> str:  # pragma: no cover
        n = len(self.terms)
        w = "inf" if self.reliable is None else str(self.reliable)
        return f"LocalSeries({n} terms, reliable={w})"

    def min_exp(self) -> int | None:
        """Lower bound for the lowest exponent (None for the exact zero)."""
        stored = min((e for e, _ in self.terms), default=None)
        if self.reliable is None:
            return stored
        bound = self.reliable + 1
        return bound if stored is None else min(stored, bound)

    def coeff(self, e: int, lexp=LAMBDA_ONE) -> "Q":
        return self.terms.get((e, tuple(lexp)), Q(0))

    def coefficient(self, e: int) -> dict:
        """All lambda-terms at one exponent."""
        return {lexp: c for (ee, lexp), c in self.terms.items() if ee == e}

    def total_weight(self) -> int | None:
        """The constant weight (exponent + lambda weight) if homogeneous."""
        tw: int | None = None
        for (e, lexp) in self.terms:
            w = e + lambda_weight(lexp)
            if tw is None:
                tw = w
            elif tw != w:
                raise ValueError(
                    f"series is not weight-homogeneous: found {tw} and {w}"
                )
        return tw

    # -- ring operations ----------------------------------------------------

    def add(self, other: "LocalSeries") -> "LocalSeries":
        out = dict(self.terms)
        for key, c in other.terms.items():
            acc = out.get(key)
            out[key] = c if acc is None else acc + c
        return LocalSeries(out, _wmin(self.reliable, other.reliable))

    def neg(self) -> "LocalSeries":
        return LocalSeries({k: -c for k, c in self.terms.items()}, self.reliable)

    def sub(self, other: "LocalSeries") -> "LocalSeries":
        return self.add(other.neg())

    def scale(self, coeff: "Q", lexp=LAMBDA_ONE) -> "LocalSeries":
        coeff = Q(coeff)
        lexp = tuple(lexp)
        return LocalSeries(
            {(e, mul_lexp(le, lexp)): c * coeff for (e, le), c in self.terms.items()},
            self.reliable,
        )

    def mul(self, other: "LocalSeries") -> "LocalSeries":
        window = None
        if self.reliable is not None or other.reliable is not None:
            ma, mb = self.min_exp(), other.min_exp()
            wa = _wadd(self.reliable, mb)
            wb = _wadd(other.reliable, ma)
            window = _wmin(wa, wb)
        out: dict = {}
        for (ea, la), ca in self.terms.items():
            for (eb, lb), cb in other.terms.items():
                e = ea + eb
                if window is not None and e > window:
                    continue
                key = (e, mul_lexp(la, lb))
                acc = out.get(key)
                prod = ca * cb
                out[key] = prod if acc is None else acc + prod
        return LocalSeries(out, window)

    def truncate(self, window: int | None) -> "LocalSeries":
        if window is None:
            return self
        if self.reliable is not None and self.reliable <= window:
            return self
        return LocalSeries(self.terms, window)

    def shift(self, k: int) -> "LocalSeries":
        return LocalSeries(
            {(e + k, le): c for (e, le), c in self.terms.items()},
            None if self.reliable is None else self.reliable + k,
        )

    def diff(self) -> "LocalSeries":
        out = {}
        for (e, le), c in self.terms.items():
            if e:
                out[(e - 1, le)] = c * e
        return LocalSeries(
            out, None if self.reliable is None else self.reliable - 1
        )

    def integrate(self) -> "LocalSeries":
        """Antiderivative with zero constant term; a t^-1 term is an error."""
        out = {}
        for (e, le), c in self.terms.items():
            if e == -1:
                raise ArithmeticError(
                    f"nonzero residue {c} * lambda^{le}: series has no antiderivative"
                )
            out[(e + 1, le)] = c / Q(e + 1)
        return LocalSeries(
            out, None if self.reliable is None else self.reliable + 1
        )

    def specialize_lambda(self, values: dict) -> "LocalSeries":
        out: dict = {}
        for (e, le), c in self.terms.items():
            rest = list(le)
            for j, v in values.items():
                if le[j]:
                    c = c * Q(v) ** le[j]
                    rest[j] = 0
            key = (e, tuple(rest))
            acc = out.get(key)
            out[key] = c if acc is None else acc + c
        return LocalSeries(out, self.reliable)


def _wadd(a: int | None, b: int | None) -> int | None:
    if a is None or b is None:
        return None
    return a + b


def binomial_power(tail: LocalSeries, alpha: "Q", window: int) -> LocalSeries:
    """(1 + tail)^alpha as a binomial series; tail must have positive
    minimal exponent so that the expansion is t-adically convergent."""
    m = tail.min_exp()
    if m is None:  # exact zero tail
        return LocalSeries.one().truncate(window)
    if m < 1:
        raise ValueError("binomial series needs a tail of positive order")
    alpha = Q(alpha)
    acc = LocalSeries.one().truncate(_wmin(window, tail.reliable))
    power = LocalSeries.one()
    coeff = Q(1)
    k = 0
    while (k + 1) * m <= window:
        k += 1
        coeff = coeff * (alpha - (k - 1)) / Q(k)
        if coeff == 0:  # alpha is a non-negative integer: series terminates
            break
        power = power.mul(tail).truncate(window)
        acc = acc.add(power.scale(coeff))
    return acc.truncate(window)


def invert(series: LocalSeries, window: int) -> LocalSeries:
    """Multiplicative inverse, trusted through the requested exponent.  The
    leading term must be a pure rational (no lambda content)."""
    if not series.terms:
        raise ZeroDivisionError("cannot invert the zero series")
    m = min(e for e, _ in series.terms)
    lead = [(le, c) for (e, le), c in series.terms.items() if e == m]
    if len(lead) != 1 or any(lead[0][0]):
        raise ValueError("inversion needs a pure rational leading coefficient")
    c0 = lead[0][1]
    tail = series.shift(-m).scale(1 / c0).sub(LocalSeries.one())
    inv_unit = binomial_power(tail, Q(-1), window + m)
    return inv_unit.scale(1 / c0).shift(-m)


def pow_int(series: LocalSeries, n: int, window: int) -> LocalSeries:
    if n < 0:
        return pow_int(invert(series, window - (n + 1) * _lead_exp(series)), -n, window)
    if n == 0:
        return LocalSeries.one().truncate(window)
    m = series.min_exp()
    if m is None:
        return LocalSeries.zero()
    acc = LocalSeries.one()
    for i in range(n):
        # Mid-chain truncation must leave room for the factors still to
        # come when the series dips below t^0.
        cap = window if m >= 0 else window - (n - 1 - i) * m
        acc = acc.mul(series).truncate(cap)
    return acc.truncate(window)


def _lead_exp(series: LocalSeries) -> int:
    return min(e for e, _ in series.terms)


def compose(outer: LocalSeries, inner: LocalSeries, window: int) -> LocalSeries:
    """outer(inner(t)) through the window; inner must vanish at t = 0.

    Powers of the inner series are built incrementally (one multiplication
    per exponent step), ascending for the Taylor part and descending from
    the inverse for the principal part."""
    mi = inner.min_exp()
    if mi is None or mi < 1:
        raise ValueError("composition needs an inner series of positive order")
    # Terms of the outer series beyond the window start at exponent > window
    # after substitution, so they never matter.
    acc = LocalSeries.zero(_wmin(window, outer.reliable))
    grouped: dict[int, LocalSeries] = {}
    for (e, le), c in outer.terms.items():
        if e > window:
            continue
        grouped[e] = grouped.get(e, LocalSeries.zero()).add(
            LocalSeries({(0, le): c})
        )
    if 0 in grouped:
        acc = acc.add(grouped[0])
    positives = sorted(e for e in grouped if e > 0)
    running = LocalSeries.one()
    at = 0
    for e in positives:
        for _ in range(e - at):
            running = running.mul(inner).truncate(window)
        at = e
        acc = acc.add(running.mul(grouped[e]))
    negatives = sorted((-e for e in grouped if e < 0))
    if negatives:
        deepest = negatives[-1]
        inv = invert(inner, window + (deepest - 1) * _lead_exp(inner))
        running = LocalSeries.one()
        at = 0
        for k in negatives:
            for _ in range(k - at):
                running = running.mul(inv)
            at = k
            acc = acc.add(running.mul(grouped[-k]).truncate(window))
    return acc.truncate(window)


def evaluate_on_branch(
    poly: WeightedSeries, x: LocalSeries, y: LocalSeries, window: int
) -> LocalSeries:
    """A curve-ring polynomial in the first point, restricted to a branch."""
    xpow: dict[int, LocalSeries] = {}
    ypow: dict[int, LocalSeries] = {}

    def cached(table: dict, base: LocalSeries, e: int) -> LocalSeries:
        got = table.get(e)
        if got is None:
            got = pow_int(base, e, window + 16)
            table[e] = got
        return got

    acc = LocalSeries.zero(window)
    for (m, lexp), c in poly.terms.items():
        ex, ey, ez, ew = m
        if ez or ew:
            raise ValueError("branch evaluation covers single-point polynomials")
        term = cached(xpow, x, ex).mul(cached(ypow, y, ey))
        acc = acc.add(term.scale(c, lexp))
    return acc.truncate(window)


# --- the chart at infinity -----------------------------------------------------


def _lambda_tail(params: CurveParams) -> LocalSeries:
    """G = lambda4 s^3 + lambda3 s^6 + lambda2 s^9 + lambda1 s^12
    + lambda0 s^15 (exact; numeric moduli fold into the coefficients)."""
    assign = params.assignments
    acc = LocalSeries.zero()
    for j in range(5):
        e = 3 * (5 - j)
        if j in assign:
            term = LocalSeries.param(e, coeff=assign[j])
        else:
            term = LocalSeries.param(e, lexp=_L[j])
        acc = acc.add(term)
    return acc


@dataclass(frozen=True)
class InfinityChart:
    """Everything the place at infinity yields at one truncation order:
    the curve branch in the exact scale s and in the Abel parameter t,
    the reversion s(t), and the Abel coordinate series."""

    order: int
    s_of_t: LocalSeries
    x: LocalSeries
    y: LocalSeries
    abel: tuple[LocalSeries, LocalSeries, LocalSeries, LocalSeries]


@lru_cache(maxsize=32)
def _chart(params: CurveParams, order: int) -> InfinityChart:
    window = order
    # Inversion and negative powers of s(t) erode the window, so the
    # reversion itself is carried with padding.
    s_window = window + 8
    tail = _lambda_tail(params)
    # Branch in the exact scale: x = s^-3, y = s^-5 (1+G)^(1/3).
    y_unit = binomial_power(tail, Q(1, 3), s_window + 5)
    y_s = y_unit.shift(-5)
    # dx / f_y = -s^6 (1+G)^(-2/3) ds.
    dx_over_fy = binomial_power(tail, Q(-2, 3), s_window + 16).shift(6).neg()
    y_third = binomial_power(tail, Q(-1, 3), s_window + 16)
    integrands = (
        dx_over_fy,
        dx_over_fy.shift(-3),
        y_third.shift(1).neg(),
        dx_over_fy.shift(-6),
    )
    u_s = tuple(g.truncate(s_window + 8).integrate() for g in integrands)
    # Revert u4(s) = -s - H(s) to enforce u4(t) = t: s = -t - H(s).
    u4 = u_s[3]
    H = u4.neg().sub(LocalSeries.param(1))
    m = H.min_exp()
    if m is not None and m < 4:
        raise AssertionError("last-coordinate series has an unexpected shape")
    s_of_t = LocalSeries.param(1, coeff=-1).truncate(s_window)
    while True:
        step = LocalSeries.param(1).add(compose(H, s_of_t, s_window)).neg()
        if step == s_of_t:
            break
        s_of_t = step
    check = compose(u4, s_of_t, s_window)
    if not check.sub(LocalSeries.param(1)).truncate(s_window).is_zero():
        raise AssertionError("reversion failed to normalize the last coordinate")
    x_t = pow_int(s_of_t, -3, window)
    y_t = compose(y_s.truncate(window + 5), s_of_t, window)
    abel = tuple(compose(u, s_of_t, window) for u in u_s[:3])
    # u4 equals t identically by construction; store it as exact.
    abel = abel + (LocalSeries.param(1),)
    if not params.values:
        for series, w in zip(abel, U_WEIGHTS):
            if series.total_weight() != w:
                raise AssertionError("Abel coordinate with unexpected weight")
    residual = evaluate_on_branch(curve_poly(params), x_t, y_t, window - 15)
    if not residual.is_zero():
        raise AssertionError("expansion does not satisfy the curve equation")
    return InfinityChart(order=order, s_of_t=s_of_t, x=x_t, y=y_t, abel=abel)


def expand_curve_at_infinity(
    params: CurveParams, order: int
) -> tuple[LocalSeries, LocalSeries]:
    """The branch (x(t), y(t)) through exponent ``order``, in the parameter
    normalized by u4(t) = t."""
    if order < 1:
        raise ValueError("order must be at least 1")
    chart = _chart(params, order)
    return chart.x, chart.y


@dataclass(frozen=True)
class AbelMapSeries:
    """The four Abel coordinates of a single moving point, as series in the
    normalized parameter: u4(t) = t exactly, the others Taylor with zero
    constant term, each homogeneous of its coordinate weight."""

    series: tuple[LocalSeries, LocalSeries, LocalSeries, LocalSeries]

    def __iter__(self):
        return iter(self.series)

    def __getitem__(self, i: int) -> LocalSeries:
        return self.series[i]


def abel_map_series(params: CurveParams, order: int) -> AbelMapSeries:
    if order < 1:
        raise ValueError("order must be at least 1")
    return AbelMapSeries(series=_chart(params, order).abel)


_KPOINT_VARS = {1: T_VAR, 2: T2_VARS, 3: T3_VARS}


def to_weighted(series: LocalSeries, vars_: VarSpec = T_VAR, slot: int = 0) -> WeightedSeries:
    """Taylor LocalSeries as a one-slot multivariate weighted series."""
    out = {}
    for (e, lexp), c in series.terms.items():
        if e < 0:
            raise ValueError("only Taylor series spread into weighted series")
        mexp = tuple(e if i == slot else 0 for i in range(vars_.arity))
        out[(mexp, lexp)] = c
    return WeightedSeries(vars_, out, series.reliable)


def multi_point_abel_sum(
    params: CurveParams, k: int, order: int
) -> tuple[WeightedSeries, ...]:
    """Abel image of a k-point divisor: u_i(t_1) + ... + u_i(t_k), the
    parametrization of the k-th stratum pulled back to k local parameters."""
    if k not in _KPOINT_VARS:
        raise ValueError("strata carry at most three moving points")
    vars_ = _KPOINT_VARS[k]
    single = abel_map_series(params, order)
    out = []
    for component in single:
        acc = WeightedSeries(vars_, {}, component.reliable)
        for slot in range(k):
            acc = acc.add(to_weighted(component, vars_, slot))
        out.append(acc)
    return tuple(out)


# --- residue screens ------------------------------------------------------------


def _residue(series: LocalSeries) -> dict:
    """The t^-1 coefficient as a lambda polynomial, guarded: the series must
    actually be trusted at exponent -1."""
    if series.reliable is not None and series.reliable < -1:
        raise ValueError("series window does not cover the residue exponent")
    return series.coefficient(-1)


def _branch_measure(chart: InfinityChart) -> LocalSeries:
    """dx / f_y along the branch, as a series in the normalized parameter."""
    pad = chart.order + 16
    fy = pow_int(chart.y, 2, pad).scale(3)
    return chart.x.diff().mul(invert(fy, pad))


def first_kind_residues(params: CurveParams, order: int = 12) -> list[dict]:
    """lambda-polynomial t^-1 coefficients of the four first-kind integrands
    along the branch; all must be empty."""
    chart = _chart(params, max(order, 12))
    window = chart.order
    numerators = (
        LocalSeries.one(),
        chart.x,
        chart.y,
        pow_int(chart.x, 2, window),
    )
    measure = _branch_measure(chart)
    return [_residue(n.mul(measure)) for n in numerators]


def second_kind_residues(
    params: CurveParams, variant: str = "klein", order: int = 24
) -> list[dict]:
    """lambda-polynomial t^-1 coefficients of the four second-kind density
    integrands h_j(x, y) dx / f_y along the branch; residue-freeness means
    all four come back empty."""
    chart = _chart(params, max(order, 24))
    measure = _branch_measure(chart)
    out = []
    for h in eta_numerators(params, "x", variant):
        along = evaluate_on_branch(h, chart.x, chart.y, chart.order - 14)
        out.append(_residue(along.mul(measure)))
    return out
