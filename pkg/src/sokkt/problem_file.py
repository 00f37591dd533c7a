"""Text format for problems, named points and config overrides.

Statements are separated by newlines or ``;``; ``#`` starts a comment::

    name = parabola
    n = 2
    objective f1 = -1*x2
    constraint g1 = 1*x2 - 1*x1^2
    point origin = 0, 0
    direction e1 = 1, 0
    config seed = 7

Terms are ``coef * x1^a * x2^b`` or ``coef * plusquad(affine)`` /
``coef * signquad(affine)`` where ``affine`` is a linear combination of
variables plus a constant.  Decimal literals are read exactly through
:class:`fractions.Fraction` before conversion to float.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from fractions import Fraction

from .model import FunctionSpec, KinkKind, ProblemSpec, kink, monomial

CONFIG_KEYS = {
    "seed": int,
    "samples": int,
    "radius": float,
    "resolution": int,
    "activity": float,
    "strict": float,
    "box_radius": float,
    "feas_tol": float,
    "dom_tol": float,
}

_TOKEN = re.compile(
    r"(?P<num>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)"
    r"|(?P<name>[A-Za-z_][A-Za-z0-9_.]*)"
    r"|(?P<op>[-+*^=(),])"
    r"|(?P<ws>[ \t]+)"
)


class ProblemFileError(ValueError):
    def __init__(self, message: str, line: int, column: int):
        super().__init__(f"line {line}, column {column}: {message}")
        self.message = message
        self.line = line
        self.column = column


@dataclass
class ProblemFile:
    problem: ProblemSpec
    points: dict = field(default_factory=dict)
    directions: dict = field(default_factory=dict)
    config: dict = field(default_factory=dict)


@dataclass
class _Tok:
    kind: str
    text: str
    line: int
    col: int


def _tokenize(text: str, line: int, col0: int) -> list:
    out = []
    pos = 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None:
            raise ProblemFileError(f"unexpected character {text[pos]!r}", line, col0 + pos)
        if m.lastgroup != "ws":
            out.append(_Tok(m.lastgroup, m.group(), line, col0 + pos))
        pos = m.end()
    return out


def _statements(text: str):
    """Yield (line, column, statement text) pairs."""
    for lineno, raw in enumerate(text.splitlines(), start=1):
        body = raw.split("#", 1)[0]
        start = 0
        for piece in body.split(";"):
            if piece.strip():
                lead = len(piece) - len(piece.lstrip())
                yield lineno, start + lead + 1, piece.strip()
            start += len(piece) + 1


class _Cursor:
    def __init__(self, toks, line, col):
        self.toks = toks
        self.i = 0
        self.line = line
        self.col = col

    def peek(self):
        return self.toks[self.i] if self.i < len(self.toks) else None

    def error(self, msg, tok=None):
        tok = tok or self.peek()
        if tok is None:
            last = self.toks[-1] if self.toks else None
            col = last.col + len(last.text) if last else self.col
            raise ProblemFileError(msg, self.line, col)
        raise ProblemFileError(msg, tok.line, tok.col)

    def take(self, kind=None, text=None):
        tok = self.peek()
        if tok is None or (kind and tok.kind != kind) or (text and tok.text != text):
            want = text or kind
            self.error(f"expected {want}" + (f", found {tok.text!r}" if tok else " before end of statement"))
        self.i += 1
        return tok

    def accept(self, text):
        tok = self.peek()
        if tok is not None and tok.kind == "op" and tok.text == text:
            self.i += 1
            return True
        return False

    def done(self):
        if self.peek() is not None:
            self.error(f"unexpected {self.peek().text!r}")


class _ExprParser:
    def __init__(self, cur: _Cursor, n: int):
        self.cur = cur
        self.n = n

    def _variable(self, tok) -> int:
        m = re.fullmatch(r"x(\d+)", tok.text)
        if m is None:
            self.cur.error(f"unknown function atom or variable {tok.text!r}", tok)
        k = int(m.group(1))
        if not 1 <= k <= self.n:
            self.cur.error(f"unknown variable {tok.text} (n = {self.n})", tok)
        return k - 1

    def _signed_number(self) -> Fraction:
        sign = -1 if self.cur.accept("-") else 1
        if sign == 1:
            self.cur.accept("+")
        return sign * Fraction(self.cur.take("num").text)

    def affine(self):
        a = [Fraction(0)] * self.n
        b = Fraction(0)
        first = True
        while True:
            tok = self.cur.peek()
            if tok is None or (tok.kind == "op" and tok.text == ")"):
                if first:
                    self.cur.error("empty affine expression")
                break
            sign = 1
            if self.cur.accept("-"):
                sign = -1
            elif not self.cur.accept("+") and not first:
                self.cur.error("expected '+' or '-'")
            coef = Fraction(1)
            tok = self.cur.peek()
            if tok is not None and tok.kind == "num":
                coef = Fraction(self.cur.take("num").text)
                if not self.cur.accept("*"):
                    b += sign * coef
                    first = False
                    continue
            var = self._variable(self.cur.take("name"))
            a[var] += sign * coef
            first = False
        return a, b

    def _factor(self, exps, kinks):
        tok = self.cur.take("name")
        low = tok.text.lower()
        if low in ("plusquad", "signquad"):
            if kinks:
                self.cur.error("kink atoms cannot be multiplied together", tok)
            self.cur.take("op", "(")
            a, b = self.affine()
            self.cur.take("op", ")")
            if not any(a):
                self.cur.error("kink argument must depend on a variable", tok)
            kinks.append((low, a, b))
            return
        var = self._variable(tok)
        power = 1
        if self.cur.accept("^"):
            power = int(self.cur.take("num").text)
        exps[var] += power

    def term(self, sign):
        coef = Fraction(sign)
        exps = [0] * self.n
        kinks = []
        tok = self.cur.peek()
        if tok is None:
            self.cur.error("expected a term")
        if tok.kind == "op" and tok.text in "+-":
            coef *= self._signed_number()
        elif tok.kind == "num":
            coef *= Fraction(self.cur.take("num").text)
        else:
            self._factor(exps, kinks)
        while self.cur.accept("*"):
            self._factor(exps, kinks)
        if kinks and any(exps):
            self.cur.error("kink atoms cannot be multiplied by monomials")
        return coef, exps, kinks

    def expression(self) -> FunctionSpec:
        poly, kts = [], []
        sign = -1 if self.cur.accept("-") else 1
        if sign == 1:
            self.cur.accept("+")
        while True:
            coef, exps, kinks = self.term(sign)
            if kinks:
                kind, a, b = kinks[0]
                kts.append(kink(float(coef), [float(v) for v in a], float(b), KinkKind(kind)))
            else:
                poly.append(monomial(float(coef), exps))
            if self.cur.peek() is None:
                break
            if self.cur.accept("+"):
                sign = 1
            elif self.cur.accept("-"):
                sign = -1
            else:
                self.cur.error("expected '+' or '-'")
        try:
            return FunctionSpec(self.n, tuple(poly), tuple(kts))
        except ValueError as err:
            self.cur.error(str(err), self.cur.toks[0])


def _vector(cur: _Cursor, n: int | None) -> tuple:
    vals = []
    paren = cur.accept("(")
    while True:
        vals.append(float(_ExprParser(cur, 0)._signed_number()))
        if not cur.accept(","):
            break
    if paren:
        cur.take("op", ")")
    cur.done()
    if n is not None and len(vals) != n:
        cur.error(f"vector has {len(vals)} entries, expected {n}", cur.toks[0])
    return tuple(vals)


def parse_problem(text: str) -> ProblemFile:
    name = "problem"
    n = None
    objectives, constraints = [], []
    points, directions, config = {}, {}, {}
    seen = set()
    for line, col, stmt in _statements(text):
        cur = _Cursor(_tokenize(stmt, line, col), line, col)
        head = cur.take("name")
        key = head.text
        if key == "name":
            cur.take("op", "=")
            name = cur.take("name").text
            cur.done()
        elif key == "n":
            if n is not None:
                cur.error("dimension declared twice", head)
            cur.take("op", "=")
            n = int(cur.take("num").text)
            if n < 1:
                cur.error("dimension must be positive", head)
            cur.done()
        elif key in ("objective", "constraint", "point", "direction"):
            if n is None:
                cur.error("declare n before functions and vectors", head)
            label = cur.take().text
            if (key, label) in seen:
                cur.error(f"duplicate {key} {label!r}", head)
            seen.add((key, label))
            cur.take("op", "=")
            if key in ("point", "direction"):
                (points if key == "point" else directions)[label] = _vector(cur, n)
            else:
                fn = _ExprParser(cur, n).expression()
                (objectives if key == "objective" else constraints).append(fn)
        elif key == "config":
            opt = cur.take("name")
            if opt.text not in CONFIG_KEYS:
                cur.error(f"unknown config key {opt.text!r}", opt)
            cur.take("op", "=")
            val = _ExprParser(cur, 0)._signed_number()
            cur.done()
            caster = CONFIG_KEYS[opt.text]
            if caster is int and val.denominator != 1:
                cur.error(f"config {opt.text} must be an integer", opt)
            config[opt.text] = caster(val)
        else:
            cur.error(f"unknown key {key!r}", head)
    if n is None:
        raise ProblemFileError("missing dimension declaration 'n = ...'", 1, 1)
    if not objectives:
        raise ProblemFileError("a problem needs at least one objective", 1, 1)
    return ProblemFile(ProblemSpec(n, tuple(objectives), tuple(constraints), name), points, directions, config)


def load_problem(path) -> ProblemFile:
    with open(path, encoding="utf-8") as fh:
        return parse_problem(fh.read())


# ---------------------------------------------------------------------------


def _num(v: float) -> str:
    return repr(float(v))


def _format_function(f: FunctionSpec) -> str:
    parts = []
    for c, e in f.poly:
        factors = [f"x{k + 1}" + (f"^{p}" if p > 1 else "") for k, p in enumerate(e) if p]
        parts.append("*".join([_num(c)] + factors))
    for kt in f.kinks:
        aff = [f"{_num(a)}*x{k + 1}" for k, a in enumerate(kt.normal) if a != 0.0]
        if kt.offset != 0.0:
            aff.append(_num(kt.offset))
        parts.append(f"{_num(kt.coeff)}*{kt.kind.value}({' + '.join(aff)})")
    return " + ".join(parts) if parts else "0.0"


def format_problem(P: ProblemSpec, points=None, directions=None, config=None) -> str:
    """Serialize so that :func:`parse_problem` recovers the same data."""
    lines = [f"name = {P.name}", f"n = {P.n}"]
    lines += [f"objective f{k + 1} = {_format_function(f)}" for k, f in enumerate(P.objectives)]
    lines += [f"constraint g{k + 1} = {_format_function(g)}" for k, g in enumerate(P.constraints)]
    for key, table in (("point", points or {}), ("direction", directions or {})):
        for label, vec in table.items():
            lines.append(f"{key} {label} = " + ", ".join(_num(v) for v in vec))
    for k, v in sorted((config or {}).items()):
        lines.append(f"config {k} = {v!r}")
    return "\n".join(lines) + "\n"
