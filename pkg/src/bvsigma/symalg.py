"""Exact arithmetic on graded polynomials.

An :class:`Expr` is a canonical sum of (coefficient polynomial) x (ordered
graded monomial in fiber variables).  Coefficient polynomials live in the
commutative ring generated by explicit base variables ``phi_j`` and indexed
function symbols ``f[lower;upper]`` that can carry formal base derivatives.
All scalars are :class:`fractions.Fraction`; nothing here floats.

Exprs are immutable once built, so every operation is safe to run
concurrently on shared inputs.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping, Optional, Sequence

from .grading import BASE_BLOCK, GradedVar, sort_monomial

Rat = Fraction

ANTISYM = "antisym"
SYM = "sym"
LOWER = "lower"
UPPER = "upper"


class MixedContextError(ValueError):
    """Raised when combining expressions from different model contexts."""


class MissingSymbolError(KeyError):
    """Raised by substitution when a symbol has no assigned value."""


@dataclass(frozen=True, order=True)
class SymGroup:
    """A declared index symmetry: (anti)symmetric slots of one variance."""

    kind: str  # ANTISYM | SYM
    variance: str  # LOWER | UPPER
    slots: tuple[int, ...]


@dataclass(frozen=True, order=True)
class CoeffSymbol:
    """An indexed function symbol f[lower;upper], possibly differentiated.

    Stored in normal form: indices inside each declared symmetry group are
    sorted ascending (the sign, for antisymmetric groups, is pushed into the
    owning term's coefficient) and ``deriv`` is sorted because base partials
    commute.  Use :func:`make_symbol` to build one.
    """

    name: str
    lower: tuple[int, ...] = ()
    upper: tuple[int, ...] = ()
    deriv: tuple[int, ...] = ()
    groups: tuple[SymGroup, ...] = ()

    def with_deriv(self, j: int) -> "CoeffSymbol":
        deriv = tuple(sorted(self.deriv + (j,)))
        return CoeffSymbol(self.name, self.lower, self.upper, deriv, self.groups)

    def __str__(self) -> str:
        core = "%s[%s;%s]" % (
            self.name,
            ",".join(map(str, self.lower)),
            ",".join(map(str, self.upper)),
        )
        if self.deriv:
            return "d(%s)%s" % (",".join(map(str, self.deriv)), core)
        return core


def _perm_sign(perm: Sequence[int]) -> int:
    sign = 1
    seen = [False] * len(perm)
    for i in range(len(perm)):
        if seen[i]:
            continue
        j = i
        length = 0
        while not seen[j]:
            seen[j] = True
            j = perm[j]
            length += 1
        if length % 2 == 0:
            sign = -sign
    return sign


def make_symbol(
    name: str,
    lower: Sequence[int] = (),
    upper: Sequence[int] = (),
    deriv: Sequence[int] = (),
    groups: Sequence[SymGroup] = (),
) -> tuple[int, Optional[CoeffSymbol]]:
    """Normalize a symbol; returns (sign, symbol) or (0, None) if it vanishes.

    An antisymmetric group with a repeated index kills the symbol.
    """
    lower = list(lower)
    upper = list(upper)
    sign = 1
    for g in groups:
        indices = lower if g.variance == LOWER else upper
        vals = [indices[s] for s in g.slots]
        if g.kind == ANTISYM:
            if len(set(vals)) != len(vals):
                return 0, None
            order = sorted(range(len(vals)), key=lambda i: vals[i])
            sign *= _perm_sign(order)
            vals = sorted(vals)
        else:
            vals = sorted(vals)
        for s, v in zip(g.slots, vals):
            indices[s] = v
    sym = CoeffSymbol(
        name, tuple(lower), tuple(upper), tuple(sorted(deriv)), tuple(groups)
    )
    return sign, sym


# A coefficient-ring term key: (sorted symbols, sparse base monomial).
# Base monomials are tuples of (index, power) with power >= 1, sorted.
CKey = tuple[tuple[CoeffSymbol, ...], tuple[tuple[int, int], ...]]

_ONE_KEY: CKey = ((), ())


def _merge_base(a: tuple[tuple[int, int], ...], b: tuple[tuple[int, int], ...]):
    acc: dict[int, int] = dict(a)
    for j, p in b:
        acc[j] = acc.get(j, 0) + p
    return tuple(sorted((j, p) for j, p in acc.items() if p))


class CPoly:
    """Polynomial over Q in base variables and coefficient symbols."""

    __slots__ = ("terms",)

    def __init__(self, terms: Optional[Mapping[CKey, Rat]] = None):
        data: dict[CKey, Rat] = {}
        if terms:
            for k, v in terms.items():
                if v:
                    data[k] = Fraction(v)
        self.terms = data

    # -- constructors -----------------------------------------------------
    @staticmethod
    def zero() -> "CPoly":
        return CPoly()

    @staticmethod
    def scalar(c) -> "CPoly":
        return CPoly({_ONE_KEY: Fraction(c)})

    @staticmethod
    def base(j: int, power: int = 1) -> "CPoly":
        return CPoly({((), ((j, power),)): Fraction(1)})

    @staticmethod
    def symbol(sym: CoeffSymbol, coeff=1) -> "CPoly":
        return CPoly({((sym,), ()): Fraction(coeff)})

    # -- ring operations ---------------------------------------------------
    def __bool__(self) -> bool:
        return bool(self.terms)

    def __eq__(self, other) -> bool:
        return isinstance(other, CPoly) and self.terms == other.terms

    def __hash__(self):
        return hash(tuple(sorted(self.terms.items())))

    def __add__(self, other: "CPoly") -> "CPoly":
        acc = dict(self.terms)
        for k, v in other.terms.items():
            s = acc.get(k, Fraction(0)) + v
            if s:
                acc[k] = s
            else:
                acc.pop(k, None)
        out = CPoly()
        out.terms = acc
        return out

    def __neg__(self) -> "CPoly":
        out = CPoly()
        out.terms = {k: -v for k, v in self.terms.items()}
        return out

    def __sub__(self, other: "CPoly") -> "CPoly":
        return self + (-other)

    def __mul__(self, other: "CPoly") -> "CPoly":
        acc: dict[CKey, Rat] = {}
        for (s1, b1), v1 in self.terms.items():
            for (s2, b2), v2 in other.terms.items():
                key = (tuple(sorted(s1 + s2)), _merge_base(b1, b2))
                s = acc.get(key, Fraction(0)) + v1 * v2
                if s:
                    acc[key] = s
                else:
                    acc.pop(key, None)
        out = CPoly()
        out.terms = acc
        return out

    def scale(self, c) -> "CPoly":
        c = Fraction(c)
        if not c:
            return CPoly()
        out = CPoly()
        out.terms = {k: v * c for k, v in self.terms.items()}
        return out

    # -- calculus ----------------------------------------------------------
    def diff_base(self, j: int) -> "CPoly":
        """Partial derivative with respect to phi_j (Leibniz over terms)."""
        acc = CPoly()
        for (syms, base), v in self.terms.items():
            for pos, (bj, bp) in enumerate(base):
                if bj != j:
                    continue
                rest = base[:pos] + ((bj, bp - 1),) + base[pos + 1 :]
                rest = tuple(p for p in rest if p[1])
                acc = acc + CPoly({(syms, rest): v * bp})
            for pos, sym in enumerate(syms):
                new = tuple(sorted(syms[:pos] + (sym.with_deriv(j),) + syms[pos + 1 :]))
                acc = acc + CPoly({(new, base): v})
        return acc

    def evaluate(self, sym_values: Mapping[CoeffSymbol, Rat], base_values: Mapping[int, Rat]) -> Rat:
        """Exact value at a rational point; raises KeyError for an unknown symbol."""
        total = Fraction(0)
        for (syms, base), v in self.terms.items():
            val = v
            for sym in syms:
                val *= sym_values[sym]
            for j, p in base:
                val *= base_values[j] ** p
            total += val
        return total

    def symbols(self) -> set[CoeffSymbol]:
        out: set[CoeffSymbol] = set()
        for (syms, _), _v in self.terms.items():
            out.update(syms)
        return out

    def substitute(self, lookup) -> "CPoly":
        """Replace every symbol via ``lookup(sym) -> CPoly`` (symbol-free)."""
        acc = CPoly()
        for (syms, base), v in self.terms.items():
            part = CPoly({((), base): v})
            for sym in syms:
                part = part * lookup(sym)
            acc = acc + part
        return acc

    # -- presentation --------------------------------------------------------
    def sort_key(self):
        return tuple(sorted((_ckey_str(k), str(v)) for k, v in self.terms.items()))

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        parts = []
        for key in sorted(self.terms, key=_ckey_str):
            parts.append(_cterm_str(self.terms[key], key))
        return _join_signed(parts)

    def __repr__(self) -> str:
        return "CPoly(%s)" % self


def _ckey_str(key: CKey) -> str:
    syms, base = key
    bits = [str(s) for s in syms]
    bits += ["phi%d%s" % (j, "^%d" % p if p > 1 else "") for j, p in base]
    return "*".join(bits) if bits else "1"


def _cterm_str(coeff: Rat, key: CKey) -> str:
    body = _ckey_str(key)
    if body == "1":
        return str(coeff)
    if coeff == 1:
        return body
    if coeff == -1:
        return "-" + body
    return "%s*%s" % (coeff, body)


def _join_signed(parts: list[str]) -> str:
    out = parts[0]
    for p in parts[1:]:
        if p.startswith("-"):
            out += " - " + p[1:]
        else:
            out += " + " + p
    return out


Monomial = tuple[GradedVar, ...]


class Expr:
    """Canonical graded polynomial: sum of CPoly x fiber monomial.

    Two construction orders of the same expression compare equal because
    monomials are kept in canonical variable order with Koszul signs
    absorbed and odd squares eliminated.
    """

    __slots__ = ("terms", "scope")

    def __init__(self, terms: Optional[Mapping[Monomial, CPoly]] = None, scope: Optional[str] = None):
        data: dict[Monomial, CPoly] = {}
        if terms:
            for m, c in terms.items():
                if c:
                    data[m] = c
        self.terms = data
        self.scope = scope

    # -- constructors -----------------------------------------------------
    @staticmethod
    def zero(scope: Optional[str] = None) -> "Expr":
        return Expr({}, scope)

    @staticmethod
    def scalar(c, scope: Optional[str] = None) -> "Expr":
        c = Fraction(c)
        if not c:
            return Expr.zero(scope)
        return Expr({(): CPoly.scalar(c)}, scope)

    @staticmethod
    def from_cpoly(c: CPoly, scope: Optional[str] = None) -> "Expr":
        return Expr({(): c}, scope)

    @staticmethod
    def var(v: GradedVar, scope: Optional[str] = None) -> "Expr":
        if v.block == BASE_BLOCK:
            return Expr({(): CPoly.base(v.index)}, scope)
        return Expr({(v,): CPoly.scalar(1)}, scope)

    @staticmethod
    def base(j: int, scope: Optional[str] = None) -> "Expr":
        return Expr({(): CPoly.base(j)}, scope)

    @staticmethod
    def symbol(sym: CoeffSymbol, scope: Optional[str] = None) -> "Expr":
        return Expr({(): CPoly.symbol(sym)}, scope)

    # -- helpers -------------------------------------------------------------
    def _merged_scope(self, other: "Expr") -> Optional[str]:
        if self.scope is not None and other.scope is not None and self.scope != other.scope:
            raise MixedContextError(
                "mixed model contexts: %r vs %r" % (self.scope, other.scope)
            )
        return self.scope if self.scope is not None else other.scope

    def is_zero(self) -> bool:
        return not self.terms

    def __bool__(self) -> bool:
        return bool(self.terms)

    def __eq__(self, other) -> bool:
        return isinstance(other, Expr) and self.terms == other.terms

    def __hash__(self):
        return hash(tuple(sorted((m, c.sort_key()) for m, c in self.terms.items())))

    # -- arithmetic ---------------------------------------------------------
    def __add__(self, other: "Expr") -> "Expr":
        scope = self._merged_scope(other)
        acc = dict(self.terms)
        for m, c in other.terms.items():
            s = acc.get(m)
            s = c if s is None else s + c
            if s:
                acc[m] = s
            else:
                acc.pop(m, None)
        return Expr(acc, scope)

    def __neg__(self) -> "Expr":
        return Expr({m: -c for m, c in self.terms.items()}, self.scope)

    def __sub__(self, other: "Expr") -> "Expr":
        return self + (-other)

    def __mul__(self, other: "Expr") -> "Expr":
        scope = self._merged_scope(other)
        acc: dict[Monomial, CPoly] = {}
        for m1, c1 in self.terms.items():
            for m2, c2 in other.terms.items():
                sign, mono = sort_monomial(m1 + m2)
                if sign == 0:
                    continue
                part = (c1 * c2).scale(sign)
                prev = acc.get(mono)
                part = part if prev is None else prev + part
                if part:
                    acc[mono] = part
                else:
                    acc.pop(mono, None)
        return Expr(acc, scope)

    def scale(self, c) -> "Expr":
        c = Fraction(c)
        if not c:
            return Expr.zero(self.scope)
        return Expr({m: p.scale(c) for m, p in self.terms.items()}, self.scope)

    # -- degrees -------------------------------------------------------------
    def monomial_degrees(self) -> set[int]:
        return {sum(v.degree for v in m) for m in self.terms}

    def homogeneous_degree(self) -> Optional[int]:
        """Total degree if homogeneous and nonzero, else None."""
        degs = self.monomial_degrees()
        if len(degs) == 1:
            return degs.pop()
        return None

    # -- graded calculus ------------------------------------------------------
    def left_deriv(self, x: GradedVar) -> "Expr":
        """Left derivative: commute x to the leftmost position, then strip."""
        if x.block == BASE_BLOCK:
            return self.partial_base(x.index)
        acc: dict[Monomial, CPoly] = {}
        for m, c in self.terms.items():
            for pos, v in enumerate(m):
                if v != x:
                    continue
                sign = 1
                if x.parity:
                    for u in m[:pos]:
                        if u.parity:
                            sign = -sign
                rest = m[:pos] + m[pos + 1 :]
                part = c.scale(sign)
                prev = acc.get(rest)
                part = part if prev is None else prev + part
                if part:
                    acc[rest] = part
                else:
                    acc.pop(rest, None)
        return Expr(acc, self.scope)

    def right_deriv(self, x: GradedVar) -> "Expr":
        """Right derivative: commute x to the rightmost position, then strip."""
        if x.block == BASE_BLOCK:
            return self.partial_base(x.index)
        acc: dict[Monomial, CPoly] = {}
        for m, c in self.terms.items():
            for pos, v in enumerate(m):
                if v != x:
                    continue
                sign = 1
                if x.parity:
                    for u in m[pos + 1 :]:
                        if u.parity:
                            sign = -sign
                rest = m[:pos] + m[pos + 1 :]
                part = c.scale(sign)
                prev = acc.get(rest)
                part = part if prev is None else prev + part
                if part:
                    acc[rest] = part
                else:
                    acc.pop(rest, None)
        return Expr(acc, self.scope)

    def partial_base(self, j: int) -> "Expr":
        """Formal partial derivative with respect to phi_j."""
        acc: dict[Monomial, CPoly] = {}
        for m, c in self.terms.items():
            dc = c.diff_base(j)
            if dc:
                prev = acc.get(m)
                dc = dc if prev is None else prev + dc
                if dc:
                    acc[m] = dc
                else:
                    acc.pop(m, None)
        return Expr(acc, self.scope)

    # -- substitution and evaluation -----------------------------------------
    def substitute(self, data) -> "Expr":
        """Replace every coefficient symbol with its assigned base polynomial.

        ``data`` is a :class:`bvsigma.models.StructureData`.  Raises
        MissingSymbolError naming the first unassigned symbol met.
        """
        acc: dict[Monomial, CPoly] = {}
        for m, c in self.terms.items():
            sub = c.substitute(data.value_of)
            if sub:
                prev = acc.get(m)
                sub = sub if prev is None else prev + sub
                if sub:
                    acc[m] = sub
                else:
                    acc.pop(m, None)
        return Expr(acc, self.scope)

    def symbols(self) -> set[CoeffSymbol]:
        out: set[CoeffSymbol] = set()
        for c in self.terms.values():
            out |= c.symbols()
        return out

    # -- presentation ----------------------------------------------------------
    def __str__(self) -> str:
        if not self.terms:
            return "0"
        parts = []
        for m in sorted(self.terms):
            parts.append(_eterm_str(self.terms[m], m))
        return _join_signed(parts)

    def __repr__(self) -> str:
        return "Expr(%s)" % self


def monomial_str(m: Monomial) -> str:
    return "*".join(str(v) for v in m) if m else "1"


def _eterm_str(c: CPoly, m: Monomial) -> str:
    cs = str(c)
    if not m:
        return cs if len(c.terms) == 1 else "(%s)" % cs
    ms = monomial_str(m)
    if cs == "1":
        return ms
    if cs == "-1":
        return "-" + ms
    if len(c.terms) == 1:
        return "%s*%s" % (cs, ms)
    return "(%s)*%s" % (cs, ms)


# Module-level operation aliases matching the engine's public surface.
def add(a: Expr, b: Expr) -> Expr:
    return a + b


def mul(a: Expr, b: Expr) -> Expr:
    return a * b


def left_deriv(x: GradedVar, f: Expr) -> Expr:
    return f.left_deriv(x)


def right_deriv(f: Expr, x: GradedVar) -> Expr:
    return f.right_deriv(x)


def partial_base(j: int, f: Expr) -> Expr:
    return f.partial_base(j)


def substitute(f: Expr, data) -> Expr:
    return f.substitute(data)


def evaluate_random(p: CPoly, sym_values: Mapping[CoeffSymbol, Rat], base_values: Mapping[int, Rat]) -> Rat:
    return p.evaluate(sym_values, base_values)
