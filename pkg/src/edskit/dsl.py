"""The declarative input language.

A file is a sequence of statements::

    system hessian;                       # optional name
    coframe w1 w2 w12;
    param K K1 K2;
    free b;
    const c1;
    function a(K) derivative a*b - K;     # rule optional: formal derivatives a', a'', ...
    relation sin(b)^2 + cos(b)^2 = 1;
    d w1 = -w12 ^ w2;                     # coframe, parameter or free-derivative rule
    d K = K1*w1 + K2*w2;
    sample { K: 1, K1: 3/5, K2: 4/5 }
    mode TYPE_A;                          # optional, normally inferred
    algebra so3 dim 3 basis { [0,-1,0; 1,0,0; 0,0,0], ... }
    ideal { dx^dz, dy^dz } element { @x, @y }

Declarations may appear in any order.  ``^`` wedges as soon as one side is a
form and is a power otherwise.  A ``d`` rule for a free derivative supplies
its G part.  ``@x`` is the vector dual to the coframe label ``dx`` (or ``x``).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path

from . import syntax
from .errors import EdsError, ParseError, UnknownIdentifier
from .exterior import MODES, Form, StructureSystem, wedge
from .symexpr import Expr, FunctionSymbol, VarTable, expr_from_ast

__all__ = ["AlgebraSpec", "IdealSpec", "Document", "parse_document", "load", "to_dsl"]


@dataclass
class AlgebraSpec:
    name: str
    m: int
    basis: list  # list of m×m lists of Fractions


@dataclass
class IdealSpec:
    labels: tuple
    generators: list
    element: list  # vectors in label coordinates; flag order


@dataclass
class Document:
    name: str
    system: StructureSystem | None = None
    algebras: list = field(default_factory=list)
    ideals: list = field(default_factory=list)
    source: str | None = None


@dataclass
class _Stmt:
    kind: str
    tok: syntax.Token
    data: dict


def _join_tokens(tokens) -> str:
    out = ""
    prev = None
    for t in tokens:
        if t.text in "+-" and prev is not None and prev not in "(*/^":
            out += f" {t.text} "
        else:
            out += t.text
        prev = t.text
    return out


_KEYWORDS = {"system", "coframe", "param", "params", "free", "const", "function", "relation",
             "d", "mode", "sample", "algebra", "ideal"}


def _ident_list(ts: syntax.TokenStream) -> list[syntax.Token]:
    out = []
    while ts.peek().kind == "ident":
        out.append(ts.next())
    ts.expect(";")
    return out


def _number_expr(node, source):
    def lookup(name, tok):
        raise UnknownIdentifier(name, tok.line, tok.col, source)
    value = syntax.evaluate(node, lookup, source=source)
    return Fraction(value)


def _matrix(ts: syntax.TokenStream, source) -> list:
    ts.expect("[")
    rows = [[]]
    while True:
        rows[-1].append(_number_expr(syntax.parse_expression(ts), source))
        if ts.accept(","):
            continue
        if ts.accept(";"):
            rows.append([])
            continue
        ts.expect("]")
        break
    width = len(rows[0])
    if any(len(r) != width for r in rows) or len(rows) != width:
        raise ts.error("matrix must be square with rows of equal length")
    return rows


def _vector(ts: syntax.TokenStream, source) -> list:
    """``[q *] @x (± [q *] @y)*`` as ``[(coef, name, tok)]``."""
    terms = []
    sign = Fraction(1)
    if ts.accept("-"):
        sign = Fraction(-1)
    else:
        ts.accept("+")
    while True:
        coef = Fraction(1)
        if ts.peek().kind == "number" or ts.at("("):
            coef = _number_expr(syntax._power(ts), source)
            if ts.accept("/"):
                coef /= _number_expr(syntax._power(ts), source)
            ts.expect("*")
        ts.expect("@")
        tok = ts.expect_ident()
        terms.append((sign * coef, tok.text, tok))
        if ts.accept("+"):
            sign = Fraction(1)
        elif ts.accept("-"):
            sign = Fraction(-1)
        else:
            return terms


def _statements(text: str, source) -> list[_Stmt]:
    ts = syntax.TokenStream(syntax.tokenize(text, source), source)
    out = []
    while ts.peek().kind != "eof":
        tok = ts.peek()
        if tok.kind != "ident" or tok.text not in _KEYWORDS:
            raise ts.error(f"expected a statement keyword but found '{tok.text}'", tok)
        ts.next()
        kw = tok.text
        if kw == "system":
            out.append(_Stmt(kw, tok, {"name": ts.expect_ident().text}))
            ts.expect(";")
        elif kw in ("coframe", "param", "params", "free", "const"):
            out.append(_Stmt("param" if kw == "params" else kw, tok, {"names": _ident_list(ts)}))
        elif kw == "function":
            name = ts.expect_ident()
            ts.expect("(")
            arg = ts.expect_ident()
            ts.expect(")")
            rule = None
            if ts.accept("derivative"):
                start = ts.i
                syntax.parse_expression(ts)
                rule = _join_tokens(ts.tokens[start:ts.i])
            ts.expect(";")
            out.append(_Stmt(kw, tok, {"name": name, "arg": arg, "rule": rule}))
        elif kw == "relation":
            lhs = syntax.parse_expression(ts)
            rhs = None
            if ts.accept("="):
                rhs = syntax.parse_expression(ts)
            ts.expect(";")
            out.append(_Stmt(kw, tok, {"lhs": lhs, "rhs": rhs}))
        elif kw == "d":
            target = ts.expect_ident()
            ts.expect("=")
            expr = syntax.parse_expression(ts)
            ts.expect(";")
            out.append(_Stmt(kw, tok, {"target": target, "expr": expr}))
        elif kw == "mode":
            out.append(_Stmt(kw, tok, {"mode": ts.expect_ident()}))
            ts.expect(";")
        elif kw == "sample":
            ts.expect("{")
            values = []
            while not ts.at("}"):
                key = ts.expect_ident()
                ts.expect(":")
                values.append((key, syntax.parse_expression(ts)))
                if not ts.accept(","):
                    break
            ts.expect("}")
            ts.accept(";")
            out.append(_Stmt(kw, tok, {"values": values}))
        elif kw == "algebra":
            name = ts.expect_ident()
            ts.expect("dim")
            dim_tok = ts.next()
            if dim_tok.kind != "number":
                raise ts.error("expected the matrix size after 'dim'", dim_tok)
            ts.expect("basis")
            ts.expect("{")
            mats = []
            while not ts.at("}"):
                mats.append(_matrix(ts, source))
                if not ts.accept(","):
                    break
            ts.expect("}")
            ts.accept(";")
            m = int(dim_tok.text)
            if any(len(x) != m for x in mats):
                raise ParseError(f"algebra '{name.text}' basis matrices must be {m}x{m}",
                                 name.line, name.col, source)
            out.append(_Stmt(kw, tok, {"name": name.text, "m": m, "basis": mats}))
        elif kw == "ideal":
            ts.expect("{")
            gens = []
            while not ts.at("}"):
                gens.append(syntax.parse_expression(ts))
                if not ts.accept(","):
                    break
            ts.expect("}")
            ts.expect("element")
            ts.expect("{")
            vecs = []
            while not ts.at("}"):
                vecs.append(_vector(ts, source))
                if not ts.accept(","):
                    break
            ts.expect("}")
            ts.accept(";")
            out.append(_Stmt(kw, tok, {"generators": gens, "element": vecs}))
    return out


def parse_document(text: str, source: str | None = None, name: str | None = None) -> Document:
    stmts = _statements(text, source)

    def names_of(kind):
        return [t for s in stmts if s.kind == kind for t in s.data["names"]]

    system_names = [s.data["name"] for s in stmts if s.kind == "system"]
    doc_name = system_names[-1] if system_names else (name or (Path(source).stem if source else "system"))
    coframe_toks = names_of("coframe")
    coframe = tuple(t.text for t in coframe_toks)
    if len(set(coframe)) != len(coframe):
        dup = next(t for i, t in enumerate(coframe_toks) if t.text in coframe[:i])
        raise ParseError(f"coframe label '{dup.text}' declared twice", dup.line, dup.col, source)
    params = [t.text for t in names_of("param")]
    frees = [t.text for t in names_of("free")]
    consts = [t.text for t in names_of("const")]
    funcs = [FunctionSymbol(s.data["name"].text, s.data["arg"].text, s.data["rule"])
             for s in stmts if s.kind == "function"]
    for label in coframe:
        if label in params or label in frees or label in consts or any(f.name == label for f in funcs):
            raise ParseError(f"'{label}' is both a coframe label and a variable", None, None, source)
    try:
        table = VarTable(params, frees, consts, funcs)
    except ParseError as exc:
        tok = next((s.tok for s in stmts if s.kind in ("param", "free", "const", "function")), None)
        if exc.line is None and tok is not None:
            raise ParseError(exc.message, tok.line, tok.col, source) from None
        raise

    doc = Document(doc_name, source=source)
    one = table.one

    def form_lookup(labels):
        def lookup(nm, tok):
            if nm in labels:
                return Form.basis(labels, labels.index(nm), one)
            if nm in table.kinds:
                return table.symbol(nm)
            raise UnknownIdentifier(nm, tok.line, tok.col, source)
        return lookup

    def evaluate(node, labels, tok):
        try:
            return expr_from_ast(node, table, lookup=form_lookup(labels), source=source) \
                if not labels else _eval_forms(node, table, labels, form_lookup(labels), source)
        except ValueError as exc:
            raise ParseError(str(exc), tok.line, tok.col, source) from None

    # structure equations
    d_rules = {}
    for s in stmts:
        if s.kind != "d":
            continue
        t = s.data["target"]
        if t.text in d_rules:
            raise ParseError(f"second 'd' rule for '{t.text}'", t.line, t.col, source)
        value = evaluate(s.data["expr"], coframe, t)
        d_rules[t.text] = (t, value)
    d_coframe = []
    F, G = {}, {}
    for key, (t, value) in d_rules.items():
        if key in coframe:
            want = 2
        elif key in params or key in frees:
            want = 1
        elif key in consts:
            raise ParseError(f"'{key}' is a constant; it has no 'd' rule", t.line, t.col, source)
        else:
            raise UnknownIdentifier(key, t.line, t.col, source)
        value = _as_form(value, coframe, want, t, source, table)
        if key in params:
            F[key] = value
        elif key in frees:
            G[key] = value
    if d_rules and any(k in coframe for k in d_rules):
        missing = [x for x in coframe if x not in d_rules]
        if missing:
            t = coframe_toks[coframe.index(missing[0])]
            raise ParseError(f"coframe element '{missing[0]}' has no 'd' rule", t.line, t.col, source)
        d_coframe = [_as_form(d_rules[x][1], coframe, 2, d_rules[x][0], source, table) for x in coframe]

    relations = []
    for s in stmts:
        if s.kind != "relation":
            continue
        lhs = evaluate(s.data["lhs"], (), s.tok)
        rhs = evaluate(s.data["rhs"], (), s.tok) if s.data["rhs"] is not None else table.zero
        relations.append(_as_expr(lhs, table) - _as_expr(rhs, table))

    samples = []
    for s in stmts:
        if s.kind != "sample":
            continue
        point = {}
        for key, node in s.data["values"]:
            if key.text not in table.kinds:
                raise UnknownIdentifier(key.text, key.line, key.col, source)
            point[key.text] = _number_expr(node, source)
        samples.append(point)

    modes = [s.data["mode"] for s in stmts if s.kind == "mode"]
    for m in modes:
        if m.text not in MODES:
            raise ParseError(f"unknown mode '{m.text}'", m.line, m.col, source)
    if d_coframe:
        try:
            doc.system = StructureSystem(doc_name, coframe, table, d_coframe, F, G or None,
                                         relations, samples, modes[-1].text if modes else "")
        except ParseError as exc:
            if exc.line is None:
                tok = coframe_toks[0]
                raise ParseError(exc.message, tok.line, tok.col, source) from None
            raise
    elif F or G:
        raise ParseError("parameter rules given without coframe rules", None, None, source)

    for s in stmts:
        if s.kind == "algebra":
            doc.algebras.append(AlgebraSpec(s.data["name"], s.data["m"], s.data["basis"]))
        elif s.kind == "ideal":
            if not coframe:
                raise ParseError("an ideal needs a 'coframe' declaration", s.tok.line, s.tok.col, source)
            gens = []
            for node in s.data["generators"]:
                g = evaluate(node, coframe, s.tok)
                if not isinstance(g, Form) or g.degree < 1:
                    raise ParseError("ideal generators must be forms of positive degree",
                                     s.tok.line, s.tok.col, source)
                gens.append(g.map_coeffs(lambda c: _rational(c, s.tok, source)))
            vecs = []
            for terms in s.data["element"]:
                v = [Fraction(0)] * len(coframe)
                for coef, nm, tok in terms:
                    idx = _dual_index(nm, coframe)
                    if idx is None:
                        raise UnknownIdentifier("@" + nm, tok.line, tok.col, source)
                    v[idx] += coef
                vecs.append(tuple(v))
            doc.ideals.append(IdealSpec(coframe, gens, vecs))
    return doc


def _dual_index(name: str, labels) -> int | None:
    for cand in ("d" + name, name):
        if cand in labels:
            return labels.index(cand)
    return None


def _rational(c, tok, source) -> Fraction:
    if isinstance(c, Expr):
        v = c.constant_value()
        if v is None:
            raise ParseError("ideal coefficients must be numbers", tok.line, tok.col, source)
        return v
    return Fraction(c)


def _as_expr(v, table):
    if isinstance(v, Expr):
        return v
    if isinstance(v, Form):
        raise ParseError("expected a scalar expression, found a form")
    return table.const(v)


def _as_form(value, labels, degree, tok, source, table) -> Form:
    if not isinstance(value, Form):
        e = _as_expr(value, table)
        if e.is_zero():
            return Form.zero(degree, labels)
        raise ParseError(f"'d {tok.text}' must be a {degree}-form", tok.line, tok.col, source)
    if value.degree != degree:
        raise ParseError(f"'d {tok.text}' must be a {degree}-form, got degree {value.degree}",
                         tok.line, tok.col, source)
    return value.map_coeffs(lambda c: _as_expr(c, table))


def _eval_forms(node, table, labels, lookup, source):
    def call(fname, arg, tok):
        f = table.funcs.get(fname)
        if f is None:
            raise UnknownIdentifier(fname, tok.line, tok.col, source)
        if not isinstance(arg, syntax.Name) or arg.name != f.arg:
            raise ParseError(f"'{fname}' is declared as a function of '{f.arg}'", tok.line, tok.col, source)
        return table.symbol(fname)

    value = syntax.evaluate(node, lookup, call, wedge=wedge, is_form=lambda v: isinstance(v, Form),
                            source=source)
    if isinstance(value, Fraction):
        return table.const(value)
    return value


def load(path) -> Document:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise EdsError(f"cannot read {path}: {exc}") from None
    return parse_document(text, source=str(path))


# ---------------------------------------------------------------------------------
# writing


def _coef_source(c) -> str:
    if isinstance(c, Expr):
        return c.to_source()
    q = Fraction(c)
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


def _form_source(f: Form) -> str:
    if not f.coeffs:
        return "0"
    parts = []
    for key in sorted(f.coeffs):
        mono = " ^ ".join(f.labels[i] for i in key)
        c = _coef_source(f.coeffs[key])
        if c == "1":
            parts.append(f"+ {mono}")
        elif c == "-1":
            parts.append(f"- {mono}")
        else:
            parts.append(f"+ ({c}) * {mono}")
    s = " ".join(parts)
    return s[2:] if s.startswith("+ ") else "-" + s[2:]


def to_dsl(sys: StructureSystem) -> str:
    """DSL text for a structure system; ``parse_document(to_dsl(s))`` rebuilds it."""
    t = sys.vars
    lines = [f"system {sys.name};", "coframe " + " ".join(sys.coframe) + ";"]
    for kw, names in (("param", t.params), ("free", t.frees), ("const", t.consts)):
        if names:
            lines.append(f"{kw} " + " ".join(names) + ";")
    for f in t.funcs.values():
        rule = f" derivative {f.rule}" if f.rule is not None else ""
        lines.append(f"function {f.name}({f.arg}){rule};")
    lines.append(f"mode {sys.mode};")
    for rel in sys.relations:
        lines.append(f"relation {_coef_source(rel)} = 0;")
    lines.append("")
    for label, f in zip(sys.coframe, sys.d_coframe):
        lines.append(f"d {label} = {_form_source(f)};")
    for a, f in sys.F.items():
        lines.append(f"d {a} = {_form_source(f)};")
    for b, f in (sys.G or {}).items():
        lines.append(f"d {b} = {_form_source(f)};")
    if sys.samples:
        lines.append("")
    for p in sys.samples:
        lines.append("sample { " + ", ".join(f"{k}: {_coef_source(v)}" for k, v in p.items()) + " }")
    return "\n".join(lines) + "\n"
