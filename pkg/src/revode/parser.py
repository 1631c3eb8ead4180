"""Expression grammar for constants, rational functions, polynomials, maps and operators.

    expr   := ['+'|'-'] term (('+'|'-') term)*
    term   := factor (['*'|'/'] factor)*          juxtaposition multiplies
    factor := atom ['^' ['-'] (integer | '(' expr ')')]
    atom   := number | name | name "'"* | zeta '(' int [',' int] ')'
            | 'X[' int ',' int ']' | '(' expr ')'

Operators use ``D`` (the derivation) or ``y``, ``y'``, ``y''``... and may be
written as an equation ``... = 0``.  Maps are ``z -> expr`` or a bare
expression.  ``w`` is available only when a quadratic modulus is declared.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from gmpy2 import mpq

from .funcfield import MoebiusMap, QuadExt, RatFunc, RationalMap
from .scalars import DivisionByZero, scalar, zeta

KINDS = ("constant", "ratfunc", "polynomial", "map", "operator")


class ParseError(ValueError):
    def __init__(self, message, text="", pos=0, expected=()):
        self.pos = pos
        self.expected = tuple(expected)
        self.text = text
        msg = f"{message} at position {pos}"
        if expected:
            msg += f" (expected one of: {', '.join(expected)})"
        super().__init__(msg)


_TOKEN = re.compile(
    r"\s*(?:(?P<num>\d+)|(?P<xvar>X\[\s*\d+\s*,\s*\d+\s*\])|(?P<name>[A-Za-z_][A-Za-z_0-9]*'*)"
    r"|(?P<arrow>->|\|->|↦)|(?P<op>[-+*/^(),=]))"
)


@dataclass
class Tok:
    kind: str
    value: str
    pos: int


def tokenize(text):
    out, pos = [], 0
    text = text.replace("−", "-")
    while pos < len(text):
        if text[pos:].strip() == "":
            break
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            raise ParseError(f"unexpected character {text[pos].strip()!r}", text, pos)
        kind = m.lastgroup
        val = m.group(kind)
        if kind == "xvar":
            val = re.sub(r"\s+", "", val)
        out.append(Tok(kind, val, m.start(kind)))
        pos = m.end()
    out.append(Tok("end", "", len(text)))
    return out


# ---------------------------------------------------------------------------
# value domains


class _Domain:
    """Maps names and numbers to values; arithmetic is Python's."""

    def __init__(self, kind, var="z", variables=None, modulus=None, direction=None):
        self.kind = kind
        self.var = var
        self.variables = tuple(variables or ())
        self.modulus = modulus
        self.direction = direction

    def number(self, n):
        return mpq(int(n))

    def lift(self, x):
        if self.modulus is not None and not isinstance(x, QuadExt) and self.kind in ("ratfunc", "operator"):
            return QuadExt(x, 0, self.modulus)
        return x

    def name(self, tok, p):
        from .diffop import DiffOp

        s = tok.value
        primes = len(s) - len(s.rstrip("'"))
        base = s.rstrip("'")
        if self.kind == "polynomial":
            from .polys import MPoly

            if base in self.variables and not primes:
                return MPoly.var(self.variables, base)
            if base == "i" and "i" not in self.variables:
                return zeta(4)
            raise ParseError(f"unknown name {s!r}", p.text, tok.pos, self.variables)
        if base == "i" and not primes and base != self.var:
            return zeta(4)
        if self.kind == "constant":
            raise ParseError(f"unknown name {s!r}", p.text, tok.pos, ("number", "zeta(N)", "i"))
        if base == self.var and not primes:
            return self.lift(RatFunc.x())
        if base == "w" and not primes:
            if self.modulus is None:
                raise ParseError("'w' requires a declared modulus", p.text, tok.pos)
            return QuadExt.w(self.modulus)
        if self.kind == "operator" and (base == "y" or (base == "D" and not primes)):
            order = primes if base == "y" else 1
            if base == "y" and p.peek().value == "^" and p.peek(1).value == "(":
                order = p.derivative_order()
            return DiffOp([0] * order + [1], self.var, self.direction)
        raise ParseError(f"unknown name {s!r}", p.text, tok.pos, (self.var,) + (("D", "y") if self.kind == "operator" else ()))


def _zero_safe(f):
    """Evaluate an operator step; a vanishing operator becomes the scalar 0."""
    try:
        return f()
    except ValueError as e:
        if str(e) == "zero operator":
            return mpq(0)
        raise


class _Parser:
    def __init__(self, text, dom):
        self.text = text
        self.toks = tokenize(text)
        self.i = 0
        self.dom = dom

    def peek(self, k=0):
        return self.toks[min(self.i + k, len(self.toks) - 1)]

    def take(self):
        t = self.toks[self.i]
        self.i += 1
        return t

    def expect(self, value):
        t = self.take()
        if t.value != value:
            raise ParseError(f"unexpected {t.value or 'end of input'!r}", self.text, t.pos, (value,))
        return t

    def derivative_order(self):
        self.expect("^")
        self.expect("(")
        t = self.take()
        if t.kind != "num":
            raise ParseError("derivative order must be an integer", self.text, t.pos, ("integer",))
        self.expect(")")
        return int(t.value)

    # grammar -----------------------------------------------------------
    def expr(self):
        t = self.peek()
        sign = 1
        if t.value in "+-" and t.kind == "op":
            self.take()
            sign = -1 if t.value == "-" else 1
        acc = self.term()
        if sign < 0:
            acc = -acc
        while self.peek().value in ("+", "-") and self.peek().kind == "op":
            op = self.take().value
            nxt = self.peek()
            if nxt.kind == "op" and nxt.value in "+-*/^)=,":
                raise ParseError(f"unexpected {nxt.value!r}", self.text, nxt.pos, ("operand",))
            rhs = self.term()
            acc = _zero_safe(lambda: acc + rhs if op == "+" else acc - rhs)
        return acc

    def _starts_atom(self, t):
        return t.kind in ("num", "name", "xvar") or t.value == "("

    def term(self):
        acc = self.factor()
        while True:
            t = self.peek()
            if t.kind == "op" and t.value in "*/":
                self.take()
                nxt = self.peek()
                if nxt.value == "-" and nxt.kind == "op":
                    self.take()
                    rhs = -self.factor()
                else:
                    rhs = self.factor()
                acc = _zero_safe(lambda: acc * rhs if t.value == "*" else self._div(acc, rhs, t))
            elif self._starts_atom(t):
                rhs = self.factor()
                acc = _zero_safe(lambda: acc * rhs)
            else:
                return acc

    def _div(self, a, b, tok):
        from .diffop import DiffOp

        if isinstance(b, DiffOp):
            raise ParseError("cannot divide by an operator", self.text, tok.pos)
        try:
            if not isinstance(a, (RatFunc, QuadExt, DiffOp)) and isinstance(b, (RatFunc, QuadExt)):
                return b.__rtruediv__(a) if isinstance(b, QuadExt) else RatFunc(a) / b
            if isinstance(a, DiffOp):
                return a.left_mul(1 / b if not isinstance(b, QuadExt) else b.inverse())
            return a / b
        except (ZeroDivisionError, DivisionByZero) as e:
            raise ParseError("division by zero", self.text, tok.pos) from e

    def factor(self):
        base = self.atom()
        if self.peek().value == "^":
            tok = self.take()
            neg = False
            if self.peek().value == "-":
                self.take()
                neg = True
            t = self.peek()
            if t.kind == "num":
                self.take()
                e = int(t.value)
            elif t.value == "(":
                self.take()
                ev = _Parser.__new__(_Parser)
                ev.__dict__.update(self.__dict__)
                ev.dom = _Domain("constant")
                val = ev.expr()
                self.i = ev.i
                self.expect(")")
                val = mpq(val)
                if val.denominator != 1:
                    raise ParseError("exponent must be an integer", self.text, t.pos)
                e = int(val)
            else:
                raise ParseError("bad exponent", self.text, t.pos, ("integer", "("))
            e = -e if neg else e
            if e < 0:
                return self._div(self.dom.number(1), base**(-e), tok)
            return base**e
        return base

    def atom(self):
        t = self.peek()
        if t.kind == "num":
            self.take()
            return self.dom.number(t.value)
        if t.kind == "xvar":
            self.take()
            if self.dom.kind != "polynomial" or t.value not in self.dom.variables:
                raise ParseError(f"unknown variable {t.value}", self.text, t.pos)
            from .polys import MPoly

            return MPoly.var(self.dom.variables, t.value)
        if t.kind == "name":
            if t.value == "zeta" and self.peek(1).value == "(":
                self.take()
                self.take()
                n = self.take()
                if n.kind != "num":
                    raise ParseError("zeta needs an integer order", self.text, n.pos, ("integer",))
                k = 1
                if self.peek().value == ",":
                    self.take()
                    kt = self.take()
                    if kt.kind != "num":
                        raise ParseError("zeta power must be an integer", self.text, kt.pos, ("integer",))
                    k = int(kt.value)
                self.expect(")")
                return zeta(int(n.value), k)
            self.take()
            return self.dom.name(t, self)
        if t.value == "(":
            self.take()
            v = self.expr()
            self.expect(")")
            return v
        raise ParseError(f"unexpected {t.value or 'end of input'!r}", self.text, t.pos, ("number", "name", "("))


# ---------------------------------------------------------------------------


def _finish(p):
    t = p.peek()
    if t.kind != "end":
        raise ParseError(f"unexpected {t.value!r}", p.text, t.pos, ("end of input",))


def parse_expression(text: str, kind: str, var: str = "z", variables=None, modulus=None, direction=None):
    """Parse text into a typed exact value.

    kind: constant -> scalar; ratfunc -> RatFunc (QuadExt with a modulus);
    polynomial -> MPoly over ``variables``; map -> MoebiusMap or RationalMap;
    operator -> DiffOp (with ``direction`` as the derivation when a modulus
    is declared, default 2*w is not assumed).
    """
    if kind not in KINDS:
        raise ValueError(f"kind must be one of {KINDS}")
    if not isinstance(text, str):
        raise TypeError("text must be a string")
    if isinstance(modulus, str):
        modulus = parse_expression(modulus, "ratfunc", var).num
    if isinstance(direction, str):
        direction = parse_expression(direction, "ratfunc", var, modulus=modulus)
    if modulus is not None and direction is not None and not isinstance(direction, QuadExt):
        direction = QuadExt(direction, 0, modulus)
    body = text
    if kind == "map":
        m = re.match(r"\s*([A-Za-z_]\w*)\s*(?:->|\|->|↦)", body)
        if m:
            var = m.group(1)
            body = body[m.end() :]
            offset = m.end()
        else:
            offset = 0
    elif kind == "operator" and "=" in body:
        lhs, _, rhs = body.partition("=")
        if rhs.strip() not in ("0",):
            raise ParseError("operator equations must have right-hand side 0", text, len(lhs) + 1, ("0",))
        body = lhs
        offset = 0
    else:
        offset = 0
    if kind == "polynomial" and not variables:
        raise ValueError("polynomial parsing needs the variable list")
    dom = _Domain(kind if kind != "map" else "ratfunc", var, variables, modulus if kind != "map" else None, direction)
    p = _Parser(body, dom)
    if offset:
        for t in p.toks:
            t.pos += offset
        p.text = text
    if p.peek().kind == "end":
        raise ParseError("empty expression", text, offset, ("expression",))
    val = p.expr()
    _finish(p)
    return _coerce_kind(val, kind, dom, text)


def _coerce_kind(val, kind, dom, text):
    from .diffop import DiffOp
    from .polys import MPoly

    if kind == "constant":
        return scalar(val)
    if kind == "ratfunc":
        if isinstance(val, (RatFunc, QuadExt)):
            return val
        if dom.modulus is not None:
            return QuadExt(RatFunc(val), 0, dom.modulus)
        return RatFunc(val)
    if kind == "polynomial":
        if isinstance(val, MPoly):
            return val
        return MPoly.const(dom.variables, val)
    if kind == "map":
        f = val if isinstance(val, RatFunc) else RatFunc(val)
        if max(f.num.deg, f.den.deg) <= 1:
            try:
                return MoebiusMap.from_ratfunc(f)
            except ValueError:
                pass
        return RationalMap(f)
    if isinstance(val, DiffOp):
        return val.with_var(dom.var) if val.var != dom.var else val
    if not val:
        raise ParseError("zero operator", text, 0)
    if dom.direction is not None:
        return DiffOp([val], dom.var, dom.direction)
    return DiffOp([val], dom.var)


def print_value(x, var="z") -> str:
    """Printer matching parse_expression."""
    from .diffop import DiffOp
    from .polys import MPoly
    from .scalars import format_scalar

    if isinstance(x, (RatFunc, QuadExt, DiffOp, MoebiusMap, RationalMap)):
        return x.to_str(var)
    if isinstance(x, MPoly):
        return x.to_str()
    return format_scalar(x)
