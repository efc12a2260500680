"""
Textual function literals.

Grammar::

    function  = "piecewise" "on" domain "{" [ entry { ";" entry } [ ";" ] ] "}"
              | expr "on" domain
    domain    = "[" number "," number "]"
    entry     = "(" number "," number ")" ":" expr [ ".." expr ]
              | number ":" value
    value     = "[" bound "," bound "]" | bound
    bound     = number | [ "+" | "-" ] "inf"
    number    = [ "+" | "-" ] digits [ "." digits | "/" digits ]
    expr      = term { ( "+" | "-" ) term }
    term      = unary { ( "*" | "/" ) unary }
    unary     = ( "+" | "-" ) unary | power
    power     = atom [ "^" [ "-" ] digits ]
    atom      = digits [ "." digits ] | "x" | "(" expr ")"

Segment entries map open intervals to a rational expression or a pair ``lo .. hi``; point entries assign interval
values to breakpoints. Breakpoint values left out are completed by one-sided limits. The shorthand ``expr on [a,b]``
inserts breakpoints at the poles of ``expr``. Text from "#" to the end of a line is ignored.
"""
import logging
import re
from fractions import Fraction

from sympy import Rational

from hnfpyalgebra import errors
from hnfpyalgebra.intervals import XInterval, is_infinite, to_extreal, NEG_INF, POS_INF
from hnfpyalgebra.piecewise import PiecewiseFn, pw_build, pw_canon, pw_extend_dense, pw_from_rational
from hnfpyalgebra.rationals import RationalFunc, rf_arith, rf_constant, rf_identity

logger = logging.getLogger(__name__)

_TOKEN_PATTERNS = [
    ("NUMBER", r"\d+(?:\.\d+)?"),
    ("DOTS", r"\.\."),
    ("NAME", r"[A-Za-z_]+"),
    ("OP", r"[+\-*/^]"),
    ("PUNCT", r"[\[\]{}(),;:]"),
    ("NEWLINE", r"\n"),
    ("SKIP", r"[ \t\r]+"),
    ("COMMENT", r"#[^\n]*"),
    ("MISMATCH", r"."),
]
_TOKEN_RE = re.compile("|".join(f"(?P<{name}>{pattern})" for name, pattern in _TOKEN_PATTERNS))


class Token:
    """
    Lexical token with its source position
    """

    def __init__(self, kind: str, text: str, line: int, column: int):
        self.kind = kind
        self.text = text
        self.line = line
        self.column = column

    def __repr__(self):
        return f"Token({self.kind}, {self.text!r}, {self.line}:{self.column})"


def tokenize(text: str) -> list:
    tokens = []
    line, line_start = 1, 0
    for match in _TOKEN_RE.finditer(text):
        kind = match.lastgroup
        column = match.start() - line_start + 1
        if kind == "NEWLINE":
            line += 1
            line_start = match.end()
            continue
        if kind in ("SKIP", "COMMENT"):
            continue
        if kind == "MISMATCH":
            raise errors.ParseError(f"Unexpected character '{match.group()}'", line, column)
        tokens.append(Token(kind, match.group(), line, column))
    tokens.append(Token("EOF", "end of input", line, len(text) - line_start + 1))
    return tokens


def _with_span(ex: Exception, token: Token) -> Exception:
    ex.args = (f"{ex} (line {token.line}, column {token.column})",)
    ex.line = token.line
    ex.column = token.column
    return ex


class _Parser:

    def __init__(self, text: str):
        self.__tokens = tokenize(text)
        self.__pos = 0

    def peek(self) -> Token:
        return self.__tokens[self.__pos]

    def advance(self) -> Token:
        token = self.__tokens[self.__pos]
        if token.kind != "EOF":
            self.__pos += 1
        return token

    def at(self, text: str) -> bool:
        token = self.peek()
        return token.kind != "EOF" and token.text == text

    def expect(self, text: str) -> Token:
        token = self.peek()
        if token.kind == "EOF" or token.text != text:
            raise errors.ParseError(f"Expected '{text}', found '{token.text}'", token.line, token.column)
        return self.advance()

    def error(self, message: str, token: Token = None):
        token = token or self.peek()
        return errors.ParseError(message, token.line, token.column)

    def sign(self) -> int:
        if self.at("-") or self.at("+"):
            return -1 if self.advance().text == "-" else 1
        return 1

    def number(self):
        sign = self.sign()
        return sign * self.unsigned_number()

    def unsigned_number(self):
        token = self.peek()
        if token.kind != "NUMBER":
            raise self.error(f"Expected a number, found '{token.text}'")
        self.advance()
        value = Fraction(token.text)
        if self.at("/") and "." not in token.text:
            self.advance()
            denominator = self.peek()
            if denominator.kind != "NUMBER" or "." in denominator.text:
                raise self.error(f"Expected an integer denominator, found '{denominator.text}'")
            self.advance()
            if int(denominator.text) == 0:
                raise self.error("Zero denominator in a rational literal", denominator)
            value = value / int(denominator.text)
        return to_extreal(value)

    def bound(self):
        sign = self.sign()
        token = self.peek()
        if token.kind == "NAME" and token.text in ("inf", "oo"):
            self.advance()
            return NEG_INF if sign < 0 else POS_INF
        if token.kind != "NUMBER":
            raise self.error(f"Expected a number or 'inf', found '{token.text}'")
        return sign * self.unsigned_number()

    def value(self) -> XInterval:
        start = self.peek()
        if self.at("["):
            self.advance()
            lo = self.bound()
            self.expect(",")
            hi = self.bound()
            self.expect("]")
        else:
            lo = hi = self.bound()
        try:
            return XInterval(lo, hi)
        except ValueError as ex:
            raise errors.ParseError(str(ex), start.line, start.column)

    def domain(self) -> tuple:
        self.expect("[")
        a = self.number()
        self.expect(",")
        b = self.number()
        self.expect("]")
        return a, b

    def expr(self) -> RationalFunc:
        result = self.term()
        while self.at("+") or self.at("-"):
            op = self.advance()
            right = self.term()
            result = rf_arith("add", result, right if op.text == "+" else rf_arith("neg", right))
        return result

    def term(self) -> RationalFunc:
        result = self.unary()
        while self.at("*") or self.at("/"):
            op = self.advance()
            right = self.unary()
            if op.text == "*":
                result = rf_arith("mul", result, right)
            else:
                try:
                    result = rf_arith("mul", result, rf_arith("recip", right))
                except errors.ZeroReciprocal as ex:
                    raise _with_span(ex, op)
        return result

    def unary(self) -> RationalFunc:
        if self.at("-"):
            self.advance()
            return rf_arith("neg", self.unary())
        if self.at("+"):
            self.advance()
            return self.unary()
        return self.power()

    def power(self) -> RationalFunc:
        base = self.atom()
        if not self.at("^"):
            return base
        caret = self.advance()
        negative = False
        if self.at("-"):
            self.advance()
            negative = True
        token = self.peek()
        if token.kind != "NUMBER" or "." in token.text:
            raise self.error(f"Expected an integer exponent, found '{token.text}'")
        self.advance()
        result = rf_constant(1)
        for _ in range(int(token.text)):
            result = rf_arith("mul", result, base)
        if negative:
            try:
                result = rf_arith("recip", result)
            except errors.ZeroReciprocal as ex:
                raise _with_span(ex, caret)
        return result

    def atom(self) -> RationalFunc:
        token = self.peek()
        if token.kind == "NUMBER":
            self.advance()
            return rf_constant(to_extreal(token.text))
        if token.kind == "NAME" and token.text == "x":
            self.advance()
            return rf_identity()
        if self.at("("):
            self.advance()
            inner = self.expr()
            self.expect(")")
            return inner
        raise self.error(f"Expected an expression, found '{token.text}'")

    def function(self, complete: bool) -> PiecewiseFn:
        start = self.peek()
        if start.kind == "NAME" and start.text == "piecewise":
            self.advance()
            self.expect("on")
            domain_token = self.peek()
            domain = self.domain()
            f = self.entries(domain, domain_token, complete)
        else:
            expression = self.expr()
            self.expect("on")
            domain_token = self.peek()
            domain = self.domain()
            try:
                if not domain[0] < domain[1]:
                    raise errors.UnsortedBreakpoints(f"Domain [{domain[0]}, {domain[1]}] is empty or degenerate")
                f = pw_from_rational(expression, domain)
            except errors.HnfError as ex:
                raise _with_span(ex, start if not isinstance(ex, errors.UnsortedBreakpoints) else domain_token)
        end = self.peek()
        if end.kind != "EOF":
            raise self.error(f"Unexpected '{end.text}' after the function literal", end)
        return f

    def entries(self, domain: tuple, domain_token: Token, complete: bool) -> PiecewiseFn:
        a, b = domain
        self.expect("{")
        segments, points = [], {}
        while not self.at("}"):
            token = self.peek()
            if token.kind == "EOF":
                raise self.error("Unterminated function literal, expected '}'")
            if self.at("("):
                self.advance()
                p = self.number()
                self.expect(",")
                q = self.number()
                self.expect(")")
                self.expect(":")
                lo = self.expr()
                hi = lo
                if self.peek().kind == "DOTS":
                    self.advance()
                    hi = self.expr()
                if not p < q:
                    raise _with_span(errors.UnsortedBreakpoints(f"Empty segment ({p},{q})"), token)
                segments.append((p, q, lo, hi, token))
            else:
                p = self.number()
                self.expect(":")
                value = self.value()
                if p in points:
                    raise self.error(f"Duplicate value for breakpoint {p}", token)
                if p < a or p > b:
                    raise _with_span(errors.OutOfDomain(f"Breakpoint {p} lies outside [{a}, {b}]"), token)
                points[p] = (value, token)
            if not self.at("}"):
                self.expect(";")
        self.expect("}")
        if not a < b:
            raise _with_span(errors.UnsortedBreakpoints(f"Domain [{a}, {b}] is empty or degenerate"), domain_token)
        segments.sort(key=lambda s: s[0])
        if not segments:
            raise self.error("A piecewise literal needs at least one segment", domain_token)
        ends = [a] + [s[1] for s in segments]
        starts = [s[0] for s in segments] + [b]
        for k, (end, start) in enumerate(zip(ends, starts)):
            if end != start:
                token = segments[min(k, len(segments) - 1)][4]
                raise self.error(f"Segments must tile [{a}, {b}] without gaps or overlaps, mismatch at {end} / {start}",
                                 token)
        breakpoints = sorted({s[0] for s in segments} | {b} | set(points))
        pieces, owners = [], []
        k = 0
        for left, right in zip(breakpoints, breakpoints[1:]):
            while segments[k][1] <= left:
                k += 1
            pieces.append((segments[k][2], segments[k][3]))
            owners.append(segments[k][4])
        values = [points[p][0] if p in points else None for p in breakpoints]
        try:
            f = pw_build(domain, breakpoints, values, pieces)
        except errors.HnfError as ex:
            token = owners[ex.segment_index] if ex.segment_index is not None else domain_token
            raise _with_span(ex, token)
        if complete and f.is_partial:
            f = pw_extend_dense(f)
        return f


def parse_fn(text: str, complete: bool = True) -> PiecewiseFn:
    """
    Parses a function literal.

    Parameters
    ----------
    text: str
        Literal in the function grammar
    complete: bool
        Complete missing breakpoint values by one-sided limits. If False the result may be a partial function.

    Returns
    -------
    PiecewiseFn
        Validated function

    """
    return _Parser(text).function(complete)


def format_scalar(value, decimal: int = None) -> str:
    """
    Formats an extended real as 'p/q', an integer, 'inf' or '-inf'. With decimal digits given, finite values are
    rounded to that many fractional digits and marked with a trailing '~' if rounding changed them.
    """
    if is_infinite(value):
        return "inf" if value == POS_INF else "-inf"
    value = Rational(value)
    if decimal is None:
        return str(value)
    exact = Fraction(int(value.p), int(value.q))
    scaled = round(exact * 10 ** decimal)
    marker = "" if Fraction(scaled, 10 ** decimal) == exact else "~"
    sign = "-" if scaled < 0 else ""
    digits = str(abs(scaled)).rjust(decimal + 1, "0")
    if decimal == 0:
        return f"{sign}{digits}{marker}"
    return f"{sign}{digits[:-decimal]}.{digits[-decimal:]}{marker}"


def format_interval(value: XInterval, decimal: int = None) -> str:
    if value.lo == value.hi:
        return format_scalar(value.lo, decimal)
    return f"[{format_scalar(value.lo, decimal)},{format_scalar(value.hi, decimal)}]"


def format_fn(f: PiecewiseFn) -> str:
    """
    Canonical literal of a function: every breakpoint value and every segment, in domain order.
    """
    f = pw_canon(f)
    a, b = f.domain
    entries = []
    for j, point in enumerate(f.breakpoints):
        if f.values[j] is not None:
            entries.append(f"{format_scalar(point)}: {format_interval(f.values[j])}")
        if j < len(f.segments):
            lo, hi = f.segments[j]
            body = str(lo) if lo == hi else f"{lo} .. {hi}"
            entries.append(f"({format_scalar(point)},{format_scalar(f.breakpoints[j + 1])}): {body}")
    return f"piecewise on [{format_scalar(a)},{format_scalar(b)}] {{ {'; '.join(entries)} }}"
