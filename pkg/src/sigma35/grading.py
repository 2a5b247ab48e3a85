"""Sato-graded sparse series with reliability windows.

Every object of the theory is graded by Sato weight.  The main variables
(u_i, or local parameters t_i) carry positive weights; the curve moduli
lambda_0..lambda_4 carry negative weights -(15-3j).  A WeightedSeries is a
sparse map

    (main exponent tuple, lambda exponent tuple)  ->  rational coefficient

together with a *reliable weight* window W: every term whose main-variable
weight is <= W is stored exactly, heavier terms are absent (a truncated tail
that is never trusted).  W is None for exact polynomials.

Weight-homogeneous series (the common case here) have constant total weight
(main weight + lambda weight) across all terms, so the truncation filtration
is necessarily the main-variable one; `weight_of` reports the total weight
used by homogeneity audits.

Window bookkeeping follows the factor-error rule: the unknown tail of a
factor starts at weight W+1, so a product is reliable through

    min over factors k of ( W_k + sum_{j != k} minwt_j )

where minwt_j is a proven lower bound for every term of factor j (stored
minimum, capped by W_j + 1 for the unseen tail).  Differentiation by a
variable of weight w shifts the window down by w.  Products drop all blocks
beyond the combined window during the convolution, which keeps long chains
of exact-series arithmetic from blowing up.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
import math
from typing import Callable, Iterable, Mapping

from .rationals import Q, ZERO

# --- lambda grading ---------------------------------------------------------

LAMBDA_NAMES: tuple[str, ...] = ("lambda0", "lambda1", "lambda2", "lambda3", "lambda4")
LAMBDA_WEIGHTS: tuple[int, ...] = (-15, -12, -9, -6, -3)
LAMBDA_ONE: tuple[int, ...] = (0, 0, 0, 0, 0)


def lambda_weight(lexp: tuple[int, ...]) -> int:
    """Weight of a lambda monomial: sum of e_j * (-(15-3j))."""
    return (
        -15 * lexp[0] - 12 * lexp[1] - 9 * lexp[2] - 6 * lexp[3] - 3 * lexp[4]
    )


def lambda_monomials_of_weight(w: int) -> list[tuple[int, ...]]:
    """All lambda exponent tuples of the given (non-positive) weight."""
    if w > 0:
        return []
    target = -w
    out: list[tuple[int, ...]] = []

    def rec(j: int, remaining: int, acc: list[int]) -> None:
        if j == 5:
            if remaining == 0:
                out.append(tuple(acc))
            return
        step = 15 - 3 * j
        for e in range(remaining // step + 1):
            rec(j + 1, remaining - e * step, acc + [e])

    rec(0, target, [])
    return sorted(out)


def mul_lexp(a: tuple[int, ...], b: tuple[int, ...]) -> tuple[int, ...]:
    return (a[0] + b[0], a[1] + b[1], a[2] + b[2], a[3] + b[3], a[4] + b[4])


# --- variable sets ----------------------------------------------------------


@dataclass(frozen=True)
class VarSpec:
    """Ordered main variables with their Sato weights."""

    names: tuple[str, ...]
    weights: tuple[int, ...]

    def __post_init__(self) -> None:
        if len(self.names) != len(self.weights):
            raise ValueError("names and weights must align")

    def index(self, name: str) -> int:
        return self.names.index(name)

    def weight(self, exp: tuple[int, ...]) -> int:
        return sum(e * w for e, w in zip(exp, self.weights))

    @property
    def arity(self) -> int:
        return len(self.names)


U_VARS = VarSpec(("u1", "u2", "u3", "u4"), (7, 4, 2, 1))
T_VAR = VarSpec(("t",), (1,))
T2_VARS = VarSpec(("t1", "t2"), (1, 1))
T3_VARS = VarSpec(("t1", "t2", "t3"), (1, 1, 1))
UV_VARS = VarSpec(
    ("u1", "u2", "u3", "u4", "v1", "v2", "v3", "v4"), (7, 4, 2, 1, 7, 4, 2, 1)
)


def weight_of(vars: VarSpec, mexp: tuple[int, ...], lexp: tuple[int, ...] = LAMBDA_ONE) -> int:
    """Total Sato weight of a monomial: main-variable weight + lambda weight."""
    return vars.weight(mexp) + lambda_weight(lexp)


# --- window arithmetic ------------------------------------------------------

# None plays the role of +infinity for reliable windows.


def _wmin(a: int | None, b: int | None) -> int | None:
    if a is None:
        return b
    if b is None:
        return a
    return min(a, b)


def _wadd(a: int | None, b: int | None) -> int | None:
    if a is None or b is None:
        return None
    return a + b


TermKey = tuple[tuple[int, ...], tuple[int, ...]]


class WeightedSeries:
    """Sparse lambda-coefficient series over a VarSpec, window-truncated.

    Instances are treated as immutable once constructed; all operations
    return new series.
    """

    __slots__ = ("vars", "terms", "reliable", "_buckets", "_minwt")

    def __init__(
        self,
        vars: VarSpec,
        terms: Mapping[TermKey, "Q"] | None = None,
        reliable: int | None = None,
    ) -> None:
        self.vars = vars
        data: dict[TermKey, Q] = {}
        if terms:
            for key, coeff in terms.items():
                if coeff == 0:
                    continue
                mexp, lexp = key
                if reliable is not None and vars.weight(mexp) > reliable:
                    continue
                data[(tuple(mexp), tuple(lexp))] = Q(coeff)
        self.terms = data
        self.reliable = reliable
        self._buckets: dict[int, list[tuple[TermKey, Q]]] | None = None
        self._minwt: int | None = None

    # -- constructors --------------------------------------------------------

    @classmethod
    def zero(cls, vars: VarSpec, reliable: int | None = None) -> "WeightedSeries":
        return cls(vars, {}, reliable)

    @classmethod
    def monomial(
        cls,
        vars: VarSpec,
        mexp: tuple[int, ...],
        coeff: "Q" = 1,
        lexp: tuple[int, ...] = LAMBDA_ONE,
        reliable: int | None = None,
    ) -> "WeightedSeries":
        return cls(vars, {(tuple(mexp), tuple(lexp)): Q(coeff)}, reliable)

    @classmethod
    def constant(cls, vars: VarSpec, coeff: "Q") -> "WeightedSeries":
        zero_exp = (0,) * vars.arity
        return cls(vars, {(zero_exp, LAMBDA_ONE): Q(coeff)})

    # -- inspection -----------------------------------------------------------

    def __bool__(self) -> bool:
        return bool(self.terms)

    def __len__(self) -> int:
        return len(self.terms)

    def coefficient(self, mexp: tuple[int, ...]) -> dict[tuple[int, ...], "Q"]:
        """Lambda-polynomial coefficient of a main monomial."""
        out = {}
        for (me, le), c in self.terms.items():
            if me == tuple(mexp):
                out[le] = c
        return out

    def coeff(self, mexp: tuple[int, ...], lexp: tuple[int, ...] = LAMBDA_ONE):
        return self.terms.get((tuple(mexp), tuple(lexp)), ZERO)

    def buckets(self) -> dict[int, list[tuple[TermKey, "Q"]]]:
        """Terms grouped by main-variable weight (cached)."""
        if self._buckets is None:
            b: dict[int, list[tuple[TermKey, Q]]] = {}
            wt = self.vars.weight
            for key, coeff in self.terms.items():
                b.setdefault(wt(key[0]), []).append((key, coeff))
            self._buckets = b
        return self._buckets

    def min_term_weight(self) -> int | None:
        """Smallest main weight among stored terms (None if empty)."""
        if self._minwt is None and self.terms:
            self._minwt = min(self.buckets())
        return self._minwt

    def minwt_bound(self) -> int | None:
        """Proven lower bound on the main weight of ANY term, stored or tail.

        The stored part is exact below the window, so an unseen term can only
        live at weight >= reliable + 1.  None means +infinity (a zero exact
        polynomial has no terms at all).
        """
        stored = self.min_term_weight()
        if self.reliable is None:
            return stored
        tail = self.reliable + 1
        return tail if stored is None else min(stored, tail)

    def total_weight(self) -> int | None:
        """The constant total weight if the series is homogeneous, else raises."""
        tw: int | None = None
        for (me, le) in self.terms:
            w = self.vars.weight(me) + lambda_weight(le)
            if tw is None:
                tw = w
            elif tw != w:
                raise ValueError(
                    f"series is not weight-homogeneous: found weights {tw} and {w}"
                )
        return tw

    def is_zero(self) -> bool:
        return not self.terms

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, WeightedSeries):
            return NotImplemented
        return self.vars == other.vars and self.terms == other.terms

    def __hash__(self):  # pragma: no cover - series are not meant to be dict keys
        raise TypeError("WeightedSeries is unhashable")

    def __repr__(self) -> str:
        n = len(self.terms)
        return (
            f"WeightedSeries({'/'.join(self.vars.names)}, {n} terms, "
            f"reliable={'inf' if self.reliable is None else self.reliable})"
        )

    # -- ring operations -------------------------------------------------------

    def truncate(self, window: int | None) -> "WeightedSeries":
        """Restrict to the given reliable window (never widens trust)."""
        new_w = _wmin(self.reliable, window)
        if new_w == self.reliable:
            return self
        return WeightedSeries(self.vars, self.terms, new_w)

    def neg(self) -> "WeightedSeries":
        return WeightedSeries(
            self.vars, {k: -c for k, c in self.terms.items()}, self.reliable
        )

    def add(self, other: "WeightedSeries") -> "WeightedSeries":
        if self.vars != other.vars:
            raise ValueError("variable sets differ")
        window = _wmin(self.reliable, other.reliable)
        out = dict(self.terms)
        for key, coeff in other.terms.items():
            acc = out.get(key)
            if acc is None:
                out[key] = coeff
            else:
                acc = acc + coeff
                if acc == 0:
                    del out[key]
                else:
                    out[key] = acc
        return WeightedSeries(self.vars, out, window)

    def sub(self, other: "WeightedSeries") -> "WeightedSeries":
        return self.add(other.neg())

    def scale(self, coeff: "Q", lexp: tuple[int, ...] = LAMBDA_ONE) -> "WeightedSeries":
        """Multiply by a rational times a lambda monomial (weight-neutral in u)."""
        coeff = Q(coeff)
        if coeff == 0:
            return WeightedSeries.zero(self.vars, self.reliable)
        if lexp == LAMBDA_ONE:
            data = {k: coeff * c for k, c in self.terms.items()}
        else:
            data = {
                (me, mul_lexp(le, lexp)): coeff * c
                for (me, le), c in self.terms.items()
            }
        return WeightedSeries(self.vars, data, self.reliable)

    def mul(self, other: "WeightedSeries") -> "WeightedSeries":
        if self.vars != other.vars:
            raise ValueError("variable sets differ")
        window = _wmin(
            _wadd(self.reliable, other.minwt_bound()),
            _wadd(other.reliable, self.minwt_bound()),
        )
        out: dict[TermKey, Q] = {}
        a_buckets = sorted(self.buckets().items())
        b_buckets = sorted(other.buckets().items())
        arity = self.vars.arity
        for wa, items_a in a_buckets:
            for wb, items_b in b_buckets:
                if window is not None and wa + wb > window:
                    break  # b_buckets ascend; later ones only heavier
                for (mea, lea), ca in items_a:
                    for (meb, leb), cb in items_b:
                        key = (
                            tuple(mea[i] + meb[i] for i in range(arity)),
                            mul_lexp(lea, leb),
                        )
                        acc = out.get(key)
                        prod = ca * cb
                        if acc is None:
                            out[key] = prod
                        else:
                            acc = acc + prod
                            if acc == 0:
                                del out[key]
                            else:
                                out[key] = acc
        return WeightedSeries(self.vars, out, window)

    def pow(self, n: int) -> "WeightedSeries":
        if n < 0:
            raise ValueError("negative powers are not defined for plain series")
        result = WeightedSeries.constant(self.vars, 1)
        base = self
        while n:
            if n & 1:
                result = result.mul(base)
            base = base.mul(base) if n > 1 else base
            n >>= 1
        return result

    def diff(self, var: str) -> "WeightedSeries":
        """Partial derivative; the window shifts down by the variable weight."""
        i = self.vars.index(var)
        wvar = self.vars.weights[i]
        window = None if self.reliable is None else self.reliable - wvar
        out: dict[TermKey, Q] = {}
        for (me, le), c in self.terms.items():
            e = me[i]
            if e == 0:
                continue
            nme = me[:i] + (e - 1,) + me[i + 1 :]
            key = (nme, le)
            acc = out.get(key)
            val = c * e
            out[key] = val if acc is None else acc + val
        return WeightedSeries(self.vars, out, window)

    def diff_multi(self, indices: Iterable[int]) -> "WeightedSeries":
        """Iterated derivative by 1-based variable positions, e.g. (4,4,4)."""
        s = self
        for i in indices:
            s = s.diff(self.vars.names[i - 1])
        return s

    # -- substitution ----------------------------------------------------------

    def substitute(
        self, images: Mapping[str, "WeightedSeries"], target: VarSpec
    ) -> "WeightedSeries":
        """General composition: each main variable maps to a series.

        Every image must have strictly positive minimum term weight so that
        the composition is t-adically convergent.  The resulting window is
        the conservative combination of the outer window (scaled by the
        slowest weight gain rho = min_i minwt(g_i)/w(u_i)) and the image
        windows.
        """
        gs: list[WeightedSeries] = []
        for name in self.vars.names:
            g = images[name]
            if g.vars != target:
                raise ValueError("image variable sets must all equal the target")
            mb = g.minwt_bound()
            if mb is not None and mb <= 0:
                raise ValueError(
                    f"image of {name} has non-positive minimum weight {mb}"
                )
            gs.append(g)

        rho: Fraction | None = None
        for name, g in zip(self.vars.names, gs):
            mb = g.minwt_bound()
            if mb is None:
                continue
            r = Fraction(mb, self.vars.weights[self.vars.index(name)])
            rho = r if rho is None else min(rho, r)
        window: int | None = None
        if self.reliable is not None:
            if rho is None:
                window = None  # all images identically zero and exact
            else:
                window = math.floor(rho * (self.reliable + 1)) - 1
        for g in gs:
            window = _wmin(window, g.reliable)

        power_cache: dict[tuple[int, int], WeightedSeries] = {}

        def g_power(i: int, e: int) -> WeightedSeries:
            key = (i, e)
            cached = power_cache.get(key)
            if cached is None:
                cached = (
                    WeightedSeries.constant(target, 1)
                    if e == 0
                    else g_power(i, e - 1).mul(gs[i]).truncate(window)
                )
                power_cache[key] = cached
            return cached

        acc = WeightedSeries.zero(target, window)
        for (me, le), c in self.terms.items():
            piece = WeightedSeries.constant(target, 1)
            for i, e in enumerate(me):
                if e:
                    piece = piece.mul(g_power(i, e)).truncate(window)
            acc = acc.add(piece.scale(c, le))
        return acc.truncate(window)

    def subs_linear(
        self,
        images: Mapping[str, list[tuple["Q", tuple[int, ...]]]],
        target: VarSpec,
    ) -> "WeightedSeries":
        """Compose with weight-homogeneous linear forms (exact, window kept).

        Each main variable maps to a list of (coefficient, target exponent)
        summands whose target weights all equal the source variable weight;
        e.g. u1 -> u1 + v1 or u1 -> 2*u1.  Such substitutions permute weight
        components, so the reliable window carries over unchanged.
        """
        for name in self.vars.names:
            w = self.vars.weights[self.vars.index(name)]
            for _, texp in images[name]:
                if target.weight(texp) != w:
                    raise ValueError("linear form is not weight-homogeneous")

        arity = target.arity
        form_cache: dict[tuple[int, int], dict[tuple[int, ...], Q]] = {}

        def form_power(i: int, e: int) -> dict[tuple[int, ...], Q]:
            key = (i, e)
            cached = form_cache.get(key)
            if cached is not None:
                return cached
            if e == 0:
                res = {(0,) * arity: Q(1)}
            else:
                prev = form_power(i, e - 1)
                form = images[self.vars.names[i]]
                res = {}
                for pexp, pc in prev.items():
                    for fc, fexp in form:
                        nexp = tuple(pexp[j] + fexp[j] for j in range(arity))
                        val = pc * fc
                        acc = res.get(nexp)
                        res[nexp] = val if acc is None else acc + val
            form_cache[key] = res
            return res

        out: dict[TermKey, Q] = {}
        for (me, le), c in self.terms.items():
            expansion: dict[tuple[int, ...], Q] = {(0,) * arity: Q(1)}
            for i, e in enumerate(me):
                if not e:
                    continue
                fp = form_power(i, e)
                nxt: dict[tuple[int, ...], Q] = {}
                for aexp, ac in expansion.items():
                    for bexp, bc in fp.items():
                        nexp = tuple(aexp[j] + bexp[j] for j in range(arity))
                        val = ac * bc
                        acc = nxt.get(nexp)
                        nxt[nexp] = val if acc is None else acc + val
                expansion = nxt
            for texp, tc in expansion.items():
                key = (texp, le)
                val = tc * c
                acc = out.get(key)
                if acc is None:
                    out[key] = val
                else:
                    acc = acc + val
                    if acc == 0:
                        del out[key]
                    else:
                        out[key] = acc
        return WeightedSeries(target, out, self.reliable)

    # -- lambda operations ------------------------------------------------------

    def specialize_lambda(self, values: Mapping[int, "Q"]) -> "WeightedSeries":
        """Substitute numeric values for some lambda_j (j in 0..4)."""
        out: dict[TermKey, Q] = {}
        for (me, le), c in self.terms.items():
            factor = Q(1)
            nle = list(le)
            for j, v in values.items():
                e = nle[j]
                if e:
                    factor *= Q(v) ** e
                    nle[j] = 0
            if factor == 0:
                continue
            key = (me, tuple(nle))
            val = c * factor
            acc = out.get(key)
            if acc is None:
                out[key] = val
            else:
                acc = acc + val
                if acc == 0:
                    del out[key]
                else:
                    out[key] = acc
        return WeightedSeries(self.vars, out, self.reliable)

    def lambda_grade_part(self, grade: int) -> "WeightedSeries":
        """Terms whose lambda weight is exactly -3*grade."""
        target = -3 * grade
        data = {
            (me, le): c
            for (me, le), c in self.terms.items()
            if lambda_weight(le) == target
        }
        return WeightedSeries(self.vars, data, self.reliable)

    def main_weight_part(self, w: int) -> "WeightedSeries":
        data = {
            (me, le): c for (me, le), c in self.terms.items()
            if self.vars.weight(me) == w
        }
        return WeightedSeries(self.vars, data, self.reliable)

    def map_coefficients(self, fn: Callable[["Q"], "Q"]) -> "WeightedSeries":
        return WeightedSeries(
            self.vars, {k: fn(c) for k, c in self.terms.items()}, self.reliable
        )


def sorted_term_keys(series: WeightedSeries) -> list[TermKey]:
    """Canonical graded-lex order: (main weight, exponents, lambda exponents)."""
    wt = series.vars.weight
    return sorted(series.terms, key=lambda k: (wt(k[0]), k[0], k[1]))
