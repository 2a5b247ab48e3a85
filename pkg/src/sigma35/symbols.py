"""Symbolic layer for p- and Q-function expressions.

Identities are stated as exact rational-coefficient polynomials in the
symbols

    p<indices>      multi-index p-function, e.g. p44, p344, p1444
    Q<ijkl>         four-index bilinear combination, e.g. Q4444
    D<k>(...)       derivative of a Q-symbol by u_k, e.g. D1(Q2444)
    l0..l4          curve coefficients lambda_0..lambda_4

An Expr is a canonical map  (atom multiset, lambda exponent) -> rational.
Each atom carries a definite Sato weight, so expressions can be screened
for weight-homogeneity before any series arithmetic happens, and evaluated
later in any ring through a small adaptor.

The string parser exists so that the large identity catalogue can be
transcribed in a form that is directly readable against the source
formulas; it supports + - * ^ ( ), integer and fraction literals, and the
atoms above.
"""
from __future__ import annotations

import re
from typing import Callable, Iterable, Mapping

from .grading import LAMBDA_ONE, lambda_weight, mul_lexp
from .rationals import Q

U_WEIGHTS = (7, 4, 2, 1)  # Sato weights of u1..u4

# Atoms: ("p", indices) | ("Q", indices) | ("Qd", indices, dindices)
Atom = tuple


def p_atom(*indices: int) -> Atom:
    if len(indices) < 2:
        raise ValueError("p-symbols carry at least two indices")
    return ("p", tuple(sorted(indices)))


def q_atom(*indices: int) -> Atom:
    if len(indices) != 4:
        raise ValueError("Q-symbols carry exactly four indices")
    return ("Q", tuple(sorted(indices)))


def qd_atom(indices: Iterable[int], dindices: Iterable[int]) -> Atom:
    return ("Qd", tuple(sorted(indices)), tuple(sorted(dindices)))


def atom_weight(atom: Atom) -> int:
    kind = atom[0]
    w = -sum(U_WEIGHTS[i - 1] for i in atom[1])
    if kind == "Qd":
        w -= sum(U_WEIGHTS[i - 1] for i in atom[2])
    return w


def atom_name(atom: Atom) -> str:
    if atom[0] == "p":
        return "p" + "".join(map(str, atom[1]))
    if atom[0] == "Q":
        return "Q" + "".join(map(str, atom[1]))
    body = "Q" + "".join(map(str, atom[1]))
    return f"D{''.join(map(str, atom[2]))}({body})"


TermKey = tuple[tuple[Atom, ...], tuple[int, ...]]


class Expr:
    """Canonical finite sum  sum  c * lambda^e * product(atoms)."""

    __slots__ = ("terms",)

    def __init__(self, terms: Mapping[TermKey, "Q"] | None = None) -> None:
        data: dict[TermKey, Q] = {}
        if terms:
            for (atoms, lexp), c in terms.items():
                if c == 0:
                    continue
                key = (tuple(sorted(atoms)), tuple(lexp))
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

    # -- constructors ---------------------------------------------------------

    @classmethod
    def zero(cls) -> "Expr":
        return cls()

    @classmethod
    def constant(cls, c: "Q", lexp: tuple[int, ...] = LAMBDA_ONE) -> "Expr":
        return cls({((), tuple(lexp)): Q(c)})

    @classmethod
    def atom(cls, atom: Atom) -> "Expr":
        return cls({((atom,), LAMBDA_ONE): Q(1)})

    # -- ring operations ------------------------------------------------------

    def add(self, other: "Expr") -> "Expr":
        out = dict(self.terms)
        for key, c in other.terms.items():
            acc = out.get(key)
            if acc is None:
                out[key] = c
            else:
                acc = acc + c
                if acc == 0:
                    del out[key]
                else:
                    out[key] = acc
        return Expr(out)

    def neg(self) -> "Expr":
        return Expr({k: -c for k, c in self.terms.items()})

    def sub(self, other: "Expr") -> "Expr":
        return self.add(other.neg())

    def scale(self, c: "Q", lexp: tuple[int, ...] = LAMBDA_ONE) -> "Expr":
        c = Q(c)
        if c == 0:
            return Expr()
        return Expr(
            {
                (atoms, mul_lexp(le, tuple(lexp))): v * c
                for (atoms, le), v in self.terms.items()
            }
        )

    def mul(self, other: "Expr") -> "Expr":
        out: dict[TermKey, Q] = {}
        for (aa, la), ca in self.terms.items():
            for (ab, lb), cb in other.terms.items():
                key = (tuple(sorted(aa + ab)), mul_lexp(la, lb))
                val = ca * cb
                acc = out.get(key)
                if acc is None:
                    out[key] = val
                else:
                    acc = acc + val
                    if acc == 0:
                        del out[key]
                    else:
                        out[key] = acc
        return Expr(out)

    def pow(self, n: int) -> "Expr":
        result = Expr.constant(Q(1))
        for _ in range(n):
            result = result.mul(self)
        return result

    # -- inspection -----------------------------------------------------------

    def is_zero(self) -> bool:
        return not self.terms

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Expr):
            return NotImplemented
        return self.terms == other.terms

    def __hash__(self):  # pragma: no cover
        raise TypeError("Expr is unhashable")

    def atoms(self) -> set[Atom]:
        out: set[Atom] = set()
        for atoms, _ in self.terms:
            out.update(atoms)
        return out

    def term_weights(self) -> set[int]:
        """Total Sato weight of every term (atom weights + lambda weight)."""
        out = set()
        for (atoms, lexp) in self.terms:
            out.add(sum(atom_weight(a) for a in atoms) + lambda_weight(lexp))
        return out

    def weight_screen(self) -> tuple[bool, set[int]]:
        """(is weight-homogeneous, set of term weights seen)."""
        ws = self.term_weights()
        return (len(ws) <= 1, ws)

    def __repr__(self) -> str:
        return f"Expr({format_expr(self)})"


def format_expr(expr: Expr) -> str:
    if not expr.terms:
        return "0"
    parts = []
    for (atoms, lexp), c in sorted(
        expr.terms.items(), key=lambda kv: (kv[0][1], tuple(map(atom_name, kv[0][0])))
    ):
        bits = []
        if c != 1 or (not atoms and lexp == LAMBDA_ONE):
            bits.append(str(c))
        for j, e in enumerate(lexp):
            if e:
                bits.append(f"l{j}" + (f"^{e}" if e > 1 else ""))
        for a in atoms:
            bits.append(atom_name(a))
        parts.append("*".join(bits))
    return " + ".join(parts).replace("+ -", "- ")


# --- parser -------------------------------------------------------------------

_TOKEN = re.compile(
    r"\s*(?:(?P<num>\d+(?:/\d+)?)|(?P<lam>l[0-4])|(?P<dq>D\d+\()"
    r"|(?P<psym>p\d{2,})|(?P<qsym>Q\d{4})|(?P<op>[-+*^()]))"
)


def _tokenize(text: str) -> list[str]:
    pos = 0
    out: list[str] = []
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            raise ValueError(f"cannot tokenize {text[pos:pos+20]!r}")
        out.append(m.group().strip())
        pos = m.end()
    return out


class _Parser:
    def __init__(self, tokens: list[str]) -> None:
        self.tokens = tokens
        self.pos = 0

    def peek(self) -> str | None:
        return self.tokens[self.pos] if self.pos < len(self.tokens) else None

    def take(self) -> str:
        tok = self.peek()
        if tok is None:
            raise ValueError("unexpected end of expression")
        self.pos += 1
        return tok

    def parse_expr(self) -> Expr:
        sign = 1
        tok = self.peek()
        if tok in ("+", "-"):
            self.take()
            sign = -1 if tok == "-" else 1
        acc = self.parse_term().scale(Q(sign))
        while self.peek() in ("+", "-"):
            op = self.take()
            term = self.parse_term()
            acc = acc.add(term) if op == "+" else acc.sub(term)
        return acc

    def parse_term(self) -> Expr:
        acc = self.parse_factor()
        while self.peek() == "*":
            self.take()
            acc = acc.mul(self.parse_factor())
        return acc

    def parse_factor(self) -> Expr:
        base = self.parse_atom()
        if self.peek() == "^":
            self.take()
            n = self.take()
            if not n.isdigit():
                raise ValueError(f"expected integer exponent, got {n!r}")
            base = base.pow(int(n))
        return base

    def parse_atom(self) -> Expr:
        tok = self.take()
        if tok == "(":
            inner = self.parse_expr()
            if self.take() != ")":
                raise ValueError("unbalanced parenthesis")
            return inner
        if tok == "-":
            return self.parse_factor().neg()
        if tok[0].isdigit():
            if "/" in tok:
                num, den = tok.split("/")
                return Expr.constant(Q(int(num), int(den)))
            return Expr.constant(Q(int(tok)))
        if tok.startswith("l") and len(tok) == 2:
            j = int(tok[1])
            lexp = tuple(1 if i == j else 0 for i in range(5))
            return Expr.constant(Q(1), lexp)
        if tok.startswith("p"):
            return Expr.atom(p_atom(*(int(ch) for ch in tok[1:])))
        if tok.startswith("Q"):
            return Expr.atom(q_atom(*(int(ch) for ch in tok[1:])))
        if tok.startswith("D"):
            dindices = tuple(int(ch) for ch in tok[1:-1])
            body = self.parse_expr()
            if self.take() != ")":
                raise ValueError("unbalanced derivative parenthesis")
            out = Expr()
            for (atoms, lexp), c in body.terms.items():
                if len(atoms) != 1 or atoms[0][0] != "Q":
                    raise ValueError(
                        "derivative notation D..(..) is reserved for single Q-symbols"
                    )
                atom = qd_atom(atoms[0][1], dindices)
                out = out.add(Expr({((atom,), lexp): c}))
            return out
        raise ValueError(f"unexpected token {tok!r}")


def parse_expr(text: str) -> Expr:
    parser = _Parser(_tokenize(text))
    expr = parser.parse_expr()
    if parser.peek() is not None:
        raise ValueError(f"trailing tokens at {parser.pos}: {parser.tokens[parser.pos:]}")
    return expr


def evaluate(
    expr: Expr,
    atom_value: Callable[[Atom], object],
    *,
    zero: object,
    add: Callable[[object, object], object],
    mul: Callable[[object, object], object],
    scale: Callable[[object, "Q", tuple[int, ...]], object],
    unit: object,
) -> object:
    """Evaluate in any ring: needs the ring ops and an atom-value lookup."""
    acc = zero
    for (atoms, lexp), c in sorted(
        expr.terms.items(), key=lambda kv: (kv[0][1], tuple(map(atom_name, kv[0][0])))
    ):
        piece = unit
        for atom in atoms:
            piece = mul(piece, atom_value(atom))
        acc = add(acc, scale(piece, c, lexp))
    return acc
