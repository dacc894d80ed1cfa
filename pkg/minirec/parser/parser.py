"""
Set Parser - Converts set expressions into an AST

Recursive descent over the grammar

    expr     := shifted ('|' shifted)*
    shifted  := primary (('+' | '-') INTEGER)*
    primary  := 'all' | 'squares' | 'ap' '(' int ',' int ')'
              | 'shift' '(' expr ',' int ')' | 'union' '(' expr (',' expr)* ')'
              | ('bohr' | 'not_bohr') '(' '[' freq (',' freq)* ']' ',' number ')'
              | '{' ints '}' | 'list' '(' ints ')' | 'file' '(' STRING ')'
              | '(' expr ')'
    freq     := number ['+' sqrt] | sqrt
    sqrt     := 'sqrt' '(' INTEGER ')' ['/' INTEGER]

Every node prints back to text the parser accepts.
"""

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, List, Optional, Tuple

from .lexer import Lexer, ParseError, Token, TokenType


# ============================================================================
# AST Node Types
# ============================================================================

@dataclass(frozen=True)
class FreqTerm:
    """shift + sqrt(radicand)/scale, or the rational shift alone"""
    shift: Fraction = Fraction(0)
    radicand: Optional[int] = None
    scale: int = 1

    def __str__(self):
        if self.radicand is None:
            return str(self.shift)
        core = f"sqrt({self.radicand})" + (f"/{self.scale}" if self.scale != 1 else "")
        return core if self.shift == 0 else f"{self.shift}+{core}"


@dataclass(frozen=True)
class AllIntegers:
    def __str__(self):
        return "all"


@dataclass(frozen=True)
class Squares:
    def __str__(self):
        return "squares"


@dataclass(frozen=True)
class Progression:
    """{a + q t : t in Z}"""
    a: int
    q: int

    def __str__(self):
        return f"ap({self.a},{self.q})"


@dataclass(frozen=True)
class Shifted:
    inner: Any
    m: int

    def __str__(self):
        return f"shift({self.inner},{self.m})"


@dataclass(frozen=True)
class Union:
    parts: Tuple[Any, ...]

    def __str__(self):
        return "union(" + ",".join(str(p) for p in self.parts) + ")"


@dataclass(frozen=True)
class BohrSet:
    """Bohr(alpha, eta), or its complement when ``negated``"""
    freqs: Tuple[FreqTerm, ...]
    eta: Fraction
    negated: bool = False

    def __str__(self):
        name = "not_bohr" if self.negated else "bohr"
        return f"{name}([" + ",".join(str(f) for f in self.freqs) + f"],{self.eta})"


@dataclass(frozen=True)
class Explicit:
    values: Tuple[int, ...] = field(default_factory=tuple)

    def __str__(self):
        return "{" + ",".join(str(v) for v in self.values) + "}"


@dataclass(frozen=True)
class FileImport:
    """Members read from a WindowedSet JSON or a one-integer-per-line text file"""
    path: str

    def __str__(self):
        return 'file("' + self.path.replace('"', '\\"') + '")'


# ============================================================================
# Parser
# ============================================================================

class Parser:
    """Recursive descent parser for set expressions"""

    def __init__(self, tokens: List[Token]):
        self.tokens = tokens
        self.pos = 0

    def _current(self) -> Token:
        if self.pos >= len(self.tokens):
            return self.tokens[-1]
        return self.tokens[self.pos]

    def _peek(self, offset: int = 1) -> Token:
        pos = self.pos + offset
        if pos >= len(self.tokens):
            return self.tokens[-1]
        return self.tokens[pos]

    def _advance(self) -> Token:
        token = self._current()
        self.pos += 1
        return token

    def _match(self, *types: TokenType) -> bool:
        return self._current().type in types

    def _expect(self, token_type: TokenType, message: str = None) -> Token:
        if not self._match(token_type):
            msg = message or f"Expected {token_type.name}"
            raise ParseError(msg, self._current())
        return self._advance()

    def _consume_if(self, token_type: TokenType) -> bool:
        if self._match(token_type):
            self._advance()
            return True
        return False

    def parse(self) -> Any:
        """Parse a whole expression; trailing tokens are an error"""
        expr = self._parse_expression()
        if not self._match(TokenType.EOF):
            raise ParseError(f"Unexpected token: {self._current().value}", self._current())
        return expr

    def _parse_expression(self) -> Any:
        parts = [self._parse_shifted()]
        while self._consume_if(TokenType.PIPE):
            parts.append(self._parse_shifted())
        return parts[0] if len(parts) == 1 else Union(tuple(parts))

    def _parse_shifted(self) -> Any:
        expr = self._parse_primary()
        while self._match(TokenType.PLUS, TokenType.MINUS):
            sign = 1 if self._advance().type == TokenType.PLUS else -1
            m = self._expect(TokenType.INTEGER, "Expected an integer shift").value
            expr = Shifted(expr, sign * m)
        return expr

    def _parse_int(self) -> int:
        sign = -1 if self._consume_if(TokenType.MINUS) else 1
        return sign * self._expect(TokenType.INTEGER, "Expected an integer").value

    def _parse_int_list(self, closing: TokenType) -> Tuple[int, ...]:
        values = []
        if not self._match(closing):
            values.append(self._parse_int())
            while self._consume_if(TokenType.COMMA):
                values.append(self._parse_int())
        self._expect(closing)
        return tuple(values)

    def _parse_number(self) -> Fraction:
        """INTEGER, DECIMAL or INTEGER '/' INTEGER, exact"""
        sign = -1 if self._consume_if(TokenType.MINUS) else 1
        token = self._current()
        if self._consume_if(TokenType.DECIMAL):
            return sign * Fraction(token.value)
        num = self._expect(TokenType.INTEGER, "Expected a number").value
        if self._match(TokenType.SLASH) and self._peek().type == TokenType.INTEGER:
            self._advance()
            den = self._advance().value
            if den == 0:
                raise ParseError("Zero denominator", token)
            return sign * Fraction(num, den)
        return sign * Fraction(num)

    def _parse_sqrt(self, shift: Fraction) -> FreqTerm:
        token = self._expect(TokenType.SQRT)
        self._expect(TokenType.LPAREN)
        radicand = self._expect(TokenType.INTEGER, "Expected an integer under sqrt").value
        self._expect(TokenType.RPAREN)
        scale = 1
        if self._consume_if(TokenType.SLASH):
            scale = self._expect(TokenType.INTEGER, "Expected an integer scale").value
        if radicand < 2 or scale < 1:
            raise ParseError("sqrt needs an integer >= 2 and a positive scale", token)
        return FreqTerm(shift, radicand, scale)

    def parse_frequency(self) -> FreqTerm:
        if self._match(TokenType.SQRT):
            return self._parse_sqrt(Fraction(0))
        shift = self._parse_number()
        if self._match(TokenType.PLUS) and self._peek().type == TokenType.SQRT:
            self._advance()
            return self._parse_sqrt(shift)
        return FreqTerm(shift)

    def _parse_bohr(self, negated: bool) -> BohrSet:
        self._expect(TokenType.LPAREN)
        self._expect(TokenType.LBRACKET, "Expected '[' before the frequency list")
        freqs = [self.parse_frequency()]
        while self._consume_if(TokenType.COMMA):
            freqs.append(self.parse_frequency())
        self._expect(TokenType.RBRACKET)
        self._expect(TokenType.COMMA)
        token = self._current()
        eta = self._parse_number()
        if eta <= 0:
            raise ParseError("eta must be positive", token)
        self._expect(TokenType.RPAREN)
        return BohrSet(tuple(freqs), eta, negated)

    def _parse_primary(self) -> Any:
        token = self._current()

        if self._consume_if(TokenType.LPAREN):
            expr = self._parse_expression()
            self._expect(TokenType.RPAREN)
            return expr
        if self._consume_if(TokenType.ALL):
            return AllIntegers()
        if self._consume_if(TokenType.SQUARES):
            return Squares()
        if self._consume_if(TokenType.AP):
            self._expect(TokenType.LPAREN)
            a = self._parse_int()
            self._expect(TokenType.COMMA)
            q = self._parse_int()
            self._expect(TokenType.RPAREN)
            if q < 1:
                raise ParseError("ap step must be positive", token)
            return Progression(a, q)
        if self._consume_if(TokenType.SHIFT):
            self._expect(TokenType.LPAREN)
            inner = self._parse_expression()
            self._expect(TokenType.COMMA)
            m = self._parse_int()
            self._expect(TokenType.RPAREN)
            return Shifted(inner, m)
        if self._consume_if(TokenType.UNION):
            self._expect(TokenType.LPAREN)
            parts = [self._parse_expression()]
            while self._consume_if(TokenType.COMMA):
                parts.append(self._parse_expression())
            self._expect(TokenType.RPAREN)
            return Union(tuple(parts))
        if self._consume_if(TokenType.BOHR):
            return self._parse_bohr(False)
        if self._consume_if(TokenType.NOT_BOHR):
            return self._parse_bohr(True)
        if self._consume_if(TokenType.LBRACE):
            return Explicit(self._parse_int_list(TokenType.RBRACE))
        if self._consume_if(TokenType.LIST):
            self._expect(TokenType.LPAREN)
            return Explicit(self._parse_int_list(TokenType.RPAREN))
        if self._consume_if(TokenType.FILE):
            self._expect(TokenType.LPAREN)
            path = self._expect(TokenType.STRING, "Expected a quoted path").value
            self._expect(TokenType.RPAREN)
            return FileImport(path)

        raise ParseError(f"Unexpected token: {token.value}", token)


def parse_set(text: str) -> Any:
    """Parse a set expression into an AST"""
    tokens = Lexer(text).tokenize()
    return Parser(tokens).parse()


def parse_set_spec(data: Any) -> Any:
    """Accepts expression text or a JSON object {"expr": "..."}"""
    if isinstance(data, dict):
        if 'expr' not in data:
            raise ParseError("Set file needs an 'expr' field", Token(TokenType.EOF, None, 1, 1))
        data = data['expr']
    return parse_set(str(data))


def parse_frequency(text: str) -> FreqTerm:
    """Parse one frequency such as '1/3', 'sqrt(2)' or '1/4+sqrt(5)/8'"""
    parser = Parser(Lexer(text).tokenize())
    term = parser.parse_frequency()
    if not parser._match(TokenType.EOF):
        raise ParseError(f"Unexpected token: {parser._current().value}", parser._current())
    return term
