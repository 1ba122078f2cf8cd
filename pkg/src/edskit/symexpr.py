"""Rational functions in declared symbols, with chain-rule differentiation.

An :class:`Expr` is stored canonically as ``P/Q`` with ``P, Q`` sparse
polynomials over Q, ``gcd(P, Q) = 1`` and ``Q`` monic in graded lex order.  The
indeterminates are the declared parameters, free derivatives and constants,
every opaque unary function symbol, and the formal derivatives ``f'``,
``f''``, ... of function symbols that have no derivative rule.  Nothing is
assumed about relations between indeterminates, so ``sin(b)^2 + cos(b)^2 - 1``
is not zero here.

The polynomial arithmetic is delegated to sympy's sparse ``PolyElement``
rings; this module supplies the variable model, the parser hook-up, the chain
rule, the printer and exact evaluation.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

from sympy import Symbol
from sympy.polys.domains import QQ
from sympy.polys.orderings import grlex
from sympy.polys.rings import ring as _sympy_ring

from . import syntax
from .errors import EvaluationError, ParseError, UnknownIdentifier
from .linalg import to_rat

__all__ = ["VarTable", "Expr", "SamplePoint", "parse", "diff", "is_zero", "evaluate",
           "solve_linear_symbolic"]

KIND_ORDER = {"param": 0, "free": 1, "const": 2, "func": 3, "deriv": 4}

SamplePoint = Mapping[str, Fraction]


@dataclass(frozen=True)
class FunctionSymbol:
    name: str
    arg: str
    rule: str | None = None  # source text of f'(arg); None means formal


class VarTable:
    """Declared indeterminates of one system.

    ``funcs`` is a sequence of :class:`FunctionSymbol` (or ``(name, arg, rule)``
    triples).  Function symbols without a rule receive formal derivative
    symbols up to ``formal_order``.
    """

    def __init__(self, params: Sequence[str] = (), frees: Sequence[str] = (),
                 consts: Sequence[str] = (), funcs: Iterable = (), formal_order: int = 5):
        self.params = tuple(params)
        self.frees = tuple(frees)
        self.consts = tuple(consts)
        self.funcs: dict[str, FunctionSymbol] = {}
        for f in funcs:
            if not isinstance(f, FunctionSymbol):
                f = FunctionSymbol(*f)
            self.funcs[f.name] = f
        self.formal_order = formal_order

        names = list(self.params) + list(self.frees) + list(self.consts) + list(self.funcs)
        seen = set()
        for n in names:
            if n in seen:
                raise ParseError(f"name '{n}' declared twice")
            seen.add(n)
        self.variables = tuple(self.params) + tuple(self.frees) + tuple(self.consts)
        for f in self.funcs.values():
            if f.arg not in self.variables:
                raise UnknownIdentifier(f.arg)

        kinds: dict[str, str] = {}
        for n in self.params:
            kinds[n] = "param"
        for n in self.frees:
            kinds[n] = "free"
        for n in self.consts:
            kinds[n] = "const"
        # formal derivative bookkeeping: name -> (function, order)
        self.formal: dict[str, tuple[str, int]] = {}
        for f in self.funcs.values():
            kinds[f.name] = "func"
            if f.rule is None:
                for k in range(1, formal_order + 1):
                    dn = f.name + "'" * k
                    if dn in seen:
                        raise ParseError(f"name '{dn}' clashes with a formal derivative")
                    kinds[dn] = "deriv"
                    self.formal[dn] = (f.name, k)
        self.kinds = kinds
        self.gen_names = tuple(sorted(kinds, key=lambda n: (KIND_ORDER[kinds[n]], n)))
        if self.gen_names:
            self.ring, *gens = _sympy_ring([Symbol(n) for n in self.gen_names], QQ, grlex)
        else:
            self.ring, gens = _sympy_ring([Symbol("_unused")], QQ, grlex)[0], []
        self._gens = dict(zip(self.gen_names, gens))
        self._index = {n: i for i, n in enumerate(self.gen_names)}
        self._rules: dict[str, Expr] = {}
        for f in self.funcs.values():
            if f.rule is not None:
                self._rules[f.name] = parse(f.rule, self)
        self._deps = self._dependencies()

    # the variables x a generator depends on, with d(gen)/dx
    def _dependencies(self) -> dict[str, list[tuple[str, "Expr"]]]:
        deps: dict[str, list[tuple[str, Expr]]] = {n: [] for n in self.gen_names}
        for x in self.variables:
            deps[x].append((x, self.one))
        for f in self.funcs.values():
            if f.rule is not None:
                deps[f.name].append((f.arg, self._rules[f.name]))
            else:
                deps[f.name].append((f.arg, self.symbol(f.name + "'")))
        for dn, (fname, k) in self.formal.items():
            arg = self.funcs[fname].arg
            nxt = fname + "'" * (k + 1)
            if nxt in self.kinds:
                deps[dn].append((arg, self.symbol(nxt)))
            else:
                deps[dn].append((arg, None))
        return deps

    def __contains__(self, name: str) -> bool:
        return name in self.kinds

    def kind(self, name: str) -> str:
        return self.kinds[name]

    @property
    def one(self) -> "Expr":
        return Expr(self, self.ring.one, self.ring.one, _canonical=True)

    @property
    def zero(self) -> "Expr":
        return Expr(self, self.ring.zero, self.ring.one, _canonical=True)

    def const(self, q) -> "Expr":
        return Expr(self, self.ring.ground_new(QQ(*_qq(to_rat(q)))), self.ring.one, _canonical=True)

    def symbol(self, name: str) -> "Expr":
        if name not in self._gens:
            raise UnknownIdentifier(name)
        return Expr(self, self._gens[name], self.ring.one, _canonical=True)

    def parse(self, text: str) -> "Expr":
        return parse(text, self)


def _qq(q: Fraction):
    return (q.numerator, q.denominator)


def _to_fraction(c) -> Fraction:
    return Fraction(int(c.numerator), int(c.denominator))


class Expr:
    """Canonical rational function over a :class:`VarTable`."""

    __slots__ = ("table", "num", "den")

    def __init__(self, table: VarTable, num, den=None, *, _canonical=False):
        self.table = table
        if den is None:
            den = table.ring.one
        if not _canonical:
            num, den = _normalize(num, den)
        self.num = num
        self.den = den

    # -- coercion -------------------------------------------------------------
    def _lift(self, other) -> "Expr":
        if isinstance(other, Expr):
            if other.table is not self.table:
                raise TypeError("expressions belong to different variable tables")
            return other
        if isinstance(other, (int, Fraction)) and not isinstance(other, bool):
            return self.table.const(other)
        return NotImplemented

    def is_polynomial(self) -> bool:
        return self.den == 1

    # -- arithmetic -----------------------------------------------------------
    def __add__(self, other):
        o = self._lift(other)
        if o is NotImplemented:
            return o
        if self.den == 1 and o.den == 1:
            return Expr(self.table, self.num + o.num, _canonical=True)
        if self.den == o.den:
            return Expr(self.table, self.num + o.num, self.den)
        return Expr(self.table, self.num * o.den + o.num * self.den, self.den * o.den)

    __radd__ = __add__

    def __neg__(self):
        return Expr(self.table, -self.num, self.den, _canonical=True)

    def __sub__(self, other):
        o = self._lift(other)
        if o is NotImplemented:
            return o
        return self + (-o)

    def __rsub__(self, other):
        o = self._lift(other)
        if o is NotImplemented:
            return o
        return o + (-self)

    def __mul__(self, other):
        o = self._lift(other)
        if o is NotImplemented:
            return o
        if self.den == 1 and o.den == 1:
            return Expr(self.table, self.num * o.num, _canonical=True)
        return Expr(self.table, self.num * o.num, self.den * o.den)

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = self._lift(other)
        if o is NotImplemented:
            return o
        if o.num.is_zero:
            raise ZeroDivisionError("division by the zero expression")
        if o.den == 1 and o.num.is_ground:
            c = o.num.LC
            return Expr(self.table, self.num.quo_ground(c), self.den, _canonical=True)
        return Expr(self.table, self.num * o.den, self.den * o.num)

    def __rtruediv__(self, other):
        o = self._lift(other)
        if o is NotImplemented:
            return o
        return o / self

    def __pow__(self, k: int):
        if not isinstance(k, int):
            raise TypeError("exponent must be an integer")
        if k >= 0:
            return Expr(self.table, self.num ** k, self.den ** k, _canonical=True)
        if self.num.is_zero:
            raise ZeroDivisionError("zero to a negative power")
        return Expr(self.table, self.den ** (-k), self.num ** (-k))

    def __eq__(self, other):
        o = self._lift(other) if not isinstance(other, Expr) else other
        if o is NotImplemented or not isinstance(o, Expr):
            return NotImplemented
        return self.table is o.table and self.num == o.num and self.den == o.den

    def __hash__(self):
        return hash((id(self.table), str(self)))

    def __bool__(self):
        return not self.num.is_zero

    # -- queries ----------------------------------------------------------------
    def is_zero(self) -> bool:
        return self.num.is_zero

    def is_constant(self) -> bool:
        return self.num.is_ground and self.den.is_ground

    def constant_value(self) -> Fraction | None:
        if not self.is_constant():
            return None
        if self.num.is_zero:
            return Fraction(0)
        return _to_fraction(self.num.LC) / _to_fraction(self.den.LC)

    def symbols(self) -> set[str]:
        names = self.table.gen_names
        out = set()
        for poly in (self.num, self.den):
            for mon in poly.itermonoms():
                for i, e in enumerate(mon):
                    if e:
                        out.add(names[i])
        return out

    def depends_on(self, name: str) -> bool:
        return name in self.symbols()

    # -- calculus ---------------------------------------------------------------
    def partial(self, gen: str) -> "Expr":
        """Partial derivative treating every indeterminate as independent."""
        g = self.table._gens[gen]
        dn = self.num.diff(g)
        if self.den == 1:
            return Expr(self.table, dn, _canonical=True)
        dd = self.den.diff(g)
        return Expr(self.table, dn * self.den - self.num * dd, self.den ** 2)

    def diff(self, var: str) -> "Expr":
        """Total derivative with respect to a declared variable."""
        t = self.table
        if var not in t.variables:
            if var in t.kinds:
                raise ParseError(f"cannot differentiate with respect to function symbol '{var}'")
            raise UnknownIdentifier(var)
        out = t.zero
        for g in self.symbols():
            for x, dg in t._deps[g]:
                if x != var:
                    continue
                if dg is None:
                    raise EvaluationError(
                        f"derivative of '{g}' exceeds the formal order {t.formal_order}")
                out = out + self.partial(g) * dg
        return out

    # -- evaluation ---------------------------------------------------------------
    def eval(self, point: SamplePoint) -> Fraction:
        num = _eval_poly(self.num, self.table.gen_names, point)
        den = _eval_poly(self.den, self.table.gen_names, point)
        if den == 0:
            raise EvaluationError(f"division by zero: denominator {_print_poly(self.den, self.table)} "
                                  f"vanishes at the sample point")
        return num / den

    def subs(self, values: Mapping[str, "Expr | Fraction | int"]) -> "Expr":
        """Substitute expressions for indeterminates."""
        t = self.table
        repl = {n: (v if isinstance(v, Expr) else t.const(v)) for n, v in values.items()}
        return _subs_poly(self.num, t, repl) / _subs_poly(self.den, t, repl)

    def transfer(self, table: VarTable) -> "Expr":
        """The same rational function over another table with the indeterminates it uses."""
        if table is self.table:
            return self
        src = self.table.gen_names
        width = len(table.gen_names) or 1

        def conv(poly):
            terms = {}
            for mon, c in poly.iterterms():
                new = [0] * width
                for i, e in enumerate(mon):
                    if e:
                        j = table._index.get(src[i])
                        if j is None:
                            raise UnknownIdentifier(src[i])
                        new[j] = e
                terms[tuple(new)] = c
            return table.ring.from_dict(terms) if terms else table.ring.zero

        num, den = conv(self.num), conv(self.den)
        return Expr(table, num, den, _canonical=(self.den == 1))

    # -- printing ---------------------------------------------------------------------
    def __str__(self):
        num = _print_poly(self.num, self.table)
        if self.den == 1:
            return num
        den = _print_poly(self.den, self.table)
        if len(self.num.terms()) > 1:
            num = f"({num})"
        return f"{num}/({den})"

    def __repr__(self):
        return f"Expr({self})"

    def to_source(self) -> str:
        """Text that parses back to this expression (function symbols written as calls)."""
        t = self.table
        names = [f"{n}({t.funcs[n].arg})" if t.kinds[n] == "func" else n for n in t.gen_names]
        num = _print_poly(self.num, t, names)
        if self.den == 1:
            return num
        return f"({num})/({_print_poly(self.den, t, names)})"


def _normalize(num, den):
    if den.is_zero:
        raise ZeroDivisionError("zero denominator")
    if num.is_zero:
        return num, den.ring.one
    if den.is_ground:
        return num.quo_ground(den.LC), den.ring.one
    num, den = num.cancel(den)
    lc = den.LC
    if lc != 1:
        num = num.quo_ground(lc)
        den = den.quo_ground(lc)
    return num, den


def _eval_poly(poly, names, point) -> Fraction:
    total = Fraction(0)
    cache: dict[tuple[int, int], Fraction] = {}
    for mon, c in poly.iterterms():
        term = _to_fraction(c)
        for i, e in enumerate(mon):
            if e:
                key = (i, e)
                v = cache.get(key)
                if v is None:
                    name = names[i]
                    if name not in point:
                        raise EvaluationError(f"sample point does not assign '{name}'")
                    v = to_rat(point[name]) ** e
                    cache[key] = v
                term *= v
        total += term
    return total


def _subs_poly(poly, table: VarTable, repl: Mapping[str, Expr]) -> Expr:
    names = table.gen_names
    out = table.zero
    for mon, c in poly.iterterms():
        term = table.const(_to_fraction(c))
        for i, e in enumerate(mon):
            if e:
                base = repl.get(names[i])
                if base is None:
                    base = table.symbol(names[i])
                term = term * base ** e
        out = out + term
    return out


def _print_poly(poly, table: VarTable, names=None) -> str:
    if poly.is_zero:
        return "0"
    names = names or table.gen_names
    parts = []
    for mon, c in poly.terms():  # descending in grlex
        q = _to_fraction(c)
        factors = []
        for i, e in enumerate(mon):
            if e == 1:
                factors.append(names[i])
            elif e > 1:
                factors.append(f"{names[i]}^{e}")
        sign = "-" if q < 0 else "+"
        q = abs(q)
        if not factors:
            body = str(q)
        elif q == 1:
            body = "*".join(factors)
        else:
            body = f"{q}*" + "*".join(factors)
        parts.append((sign, body))
    first_sign, first = parts[0]
    s = ("-" if first_sign == "-" else "") + first
    for sign, body in parts[1:]:
        s += f" {sign} {body}"
    return s


# --- parser hook ----------------------------------------------------------------

def parse(text: str, table: VarTable, source: str | None = None) -> Expr:
    """Parse an expression over the names declared in ``table``."""
    node = syntax.parse_standalone(text, source)
    return expr_from_ast(node, table, source=source)


def expr_from_ast(node, table: VarTable, lookup=None, source: str | None = None):
    def default_lookup(name, tok):
        if name in table.kinds:
            return table.symbol(name)
        raise UnknownIdentifier(name, tok.line, tok.col, source)

    def call(fname, arg, tok):
        f = table.funcs.get(fname)
        if f is None:
            raise UnknownIdentifier(fname, tok.line, tok.col, source)
        if not isinstance(arg, syntax.Name) or arg.name != f.arg:
            raise ParseError(f"'{fname}' is declared as a function of '{f.arg}'",
                             tok.line, tok.col, source)
        return table.symbol(fname)

    value = syntax.evaluate(node, lookup or default_lookup, call, source=source)
    if isinstance(value, Fraction):
        return table.const(value)
    return value


# --- module-level functional API ---------------------------------------------------

def diff(e: Expr, var: str) -> Expr:
    return e.diff(var)


def is_zero(e: Expr) -> bool:
    return e.is_zero()


def evaluate(e: Expr, point: SamplePoint) -> Fraction:
    return e.eval(point)


# --- linear algebra over the field of rational functions -------------------------

def _complexity(e: Expr):
    c = e.constant_value()
    if c is not None:
        return (0, 0, abs(c.numerator).bit_length() + c.denominator.bit_length())
    return (1, len(e.num.terms()) + len(e.den.terms()), len(str(e)))


def solve_linear_symbolic(rows: Sequence[Sequence[Expr]], rhs: Sequence[Expr], table: VarTable):
    """Gaussian elimination over the fraction field.

    Returns ``(consistent, particular, kernel_basis, pivots)`` where ``pivots``
    lists the pivot expressions that were divided by; callers must make sure
    those do not vanish where the solution is used.  ``consistent`` is False
    when a reduced row reads ``0 = nonzero``.
    """
    nrows = len(rows)
    ncols = len(rows[0]) if rows else 0
    m = [list(r) + [b] for r, b in zip(rows, rhs)]
    pivot_cols = []
    pivots = []
    r = 0
    for c in range(ncols):
        best = None
        for i in range(r, nrows):
            e = m[i][c]
            if not e.is_zero():
                key = _complexity(e)
                if best is None or key < best[0]:
                    best = (key, i)
        if best is None:
            continue
        i = best[1]
        m[r], m[i] = m[i], m[r]
        p = m[r][c]
        pivots.append(p)
        if not (p.is_constant() and p.constant_value() == 1):
            m[r] = [x / p if not x.is_zero() else x for x in m[r]]
        for k in range(nrows):
            if k != r and not m[k][c].is_zero():
                f = m[k][c]
                m[k] = [a - f * b if not b.is_zero() else a for a, b in zip(m[k], m[r])]
        pivot_cols.append(c)
        r += 1
        if r == nrows:
            break
    consistent = all(m[i][ncols].is_zero() for i in range(r, nrows))
    zero = table.zero
    particular = [zero] * ncols
    for i, c in enumerate(pivot_cols):
        particular[c] = m[i][ncols]
    free = [c for c in range(ncols) if c not in pivot_cols]
    kernel = []
    for f in free:
        v = [zero] * ncols
        v[f] = table.one
        for i, c in enumerate(pivot_cols):
            if not m[i][f].is_zero():
                v[c] = -m[i][f]
        kernel.append(v)
    return consistent, particular, kernel, pivots
