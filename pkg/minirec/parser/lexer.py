"""
Set Lexer - Tokenizes set expressions

Converts set expressions such as ``union(ap(0,3), squares) + 2`` or
``not_bohr([sqrt(2), 1/3+sqrt(5)/8], 0.1)`` into a stream of tokens.
"""

from dataclasses import dataclass
from enum import Enum, auto
from typing import Any, List, Optional

from ..core.errors import ValidationError


class TokenType(Enum):
    """Types of tokens in set expressions"""
    # Keywords
    ALL = auto()
    SQUARES = auto()
    AP = auto()
    SHIFT = auto()
    UNION = auto()
    BOHR = auto()
    NOT_BOHR = auto()
    LIST = auto()
    FILE = auto()
    SQRT = auto()

    # Operators
    PLUS = auto()
    MINUS = auto()
    SLASH = auto()
    PIPE = auto()

    # Punctuation
    LPAREN = auto()
    RPAREN = auto()
    LBRACKET = auto()
    RBRACKET = auto()
    LBRACE = auto()
    RBRACE = auto()
    COMMA = auto()

    # Literals
    INTEGER = auto()
    DECIMAL = auto()
    STRING = auto()
    IDENTIFIER = auto()

    EOF = auto()


@dataclass
class Token:
    """A single token"""
    type: TokenType
    value: Any
    line: int
    column: int

    def __repr__(self):
        return f"Token({self.type.name}, {self.value!r})"


class ParseError(ValidationError):
    """Set expression error with position information"""
    def __init__(self, message: str, token: Token):
        self.token = token
        super().__init__(f"{message} at line {token.line}, column {token.column}")


class Lexer:
    """Set expression lexer - converts text to tokens"""

    KEYWORDS = {
        'ALL': TokenType.ALL,
        'SQUARES': TokenType.SQUARES,
        'AP': TokenType.AP,
        'SHIFT': TokenType.SHIFT,
        'UNION': TokenType.UNION,
        'BOHR': TokenType.BOHR,
        'NOT_BOHR': TokenType.NOT_BOHR,
        'LIST': TokenType.LIST,
        'FILE': TokenType.FILE,
        'SQRT': TokenType.SQRT,
    }

    SINGLE_CHAR_TOKENS = {
        '+': TokenType.PLUS,
        '-': TokenType.MINUS,
        '/': TokenType.SLASH,
        '|': TokenType.PIPE,
        '(': TokenType.LPAREN,
        ')': TokenType.RPAREN,
        '[': TokenType.LBRACKET,
        ']': TokenType.RBRACKET,
        '{': TokenType.LBRACE,
        '}': TokenType.RBRACE,
        ',': TokenType.COMMA,
    }

    def __init__(self, text: str):
        self.text = text
        self.pos = 0
        self.line = 1
        self.column = 1

    def _current_char(self) -> Optional[str]:
        if self.pos >= len(self.text):
            return None
        return self.text[self.pos]

    def _peek(self, offset: int = 1) -> Optional[str]:
        pos = self.pos + offset
        if pos >= len(self.text):
            return None
        return self.text[pos]

    def _advance(self) -> str:
        char = self._current_char()
        self.pos += 1
        if char == '\n':
            self.line += 1
            self.column = 1
        else:
            self.column += 1
        return char

    def _skip_whitespace(self) -> None:
        while self._current_char() and self._current_char() in ' \t\r\n':
            self._advance()

    def _skip_comment(self) -> None:
        """'#' runs to the end of the line"""
        while self._current_char() and self._current_char() != '\n':
            self._advance()

    def _read_string(self, quote_char: str) -> Token:
        start_line = self.line
        start_col = self.column
        self._advance()

        value = []
        while self._current_char() and self._current_char() != quote_char:
            if self._current_char() == '\\' and self._peek() == quote_char:
                self._advance()
            value.append(self._advance())

        if self._current_char() != quote_char:
            raise ParseError("Unterminated string", Token(TokenType.STRING, None, start_line, start_col))
        self._advance()
        return Token(TokenType.STRING, ''.join(value), start_line, start_col)

    def _read_number(self) -> Token:
        """Integers stay int; decimals stay text so Fraction can read them exactly"""
        start_line = self.line
        start_col = self.column

        value = []
        has_dot = False
        while self._current_char() and (self._current_char().isdigit() or self._current_char() == '.'):
            if self._current_char() == '.':
                if has_dot:
                    break
                has_dot = True
            value.append(self._advance())

        num_str = ''.join(value)
        if has_dot:
            return Token(TokenType.DECIMAL, num_str, start_line, start_col)
        return Token(TokenType.INTEGER, int(num_str), start_line, start_col)

    def _read_identifier(self) -> Token:
        start_line = self.line
        start_col = self.column

        value = []
        while self._current_char() and (self._current_char().isalnum() or self._current_char() == '_'):
            value.append(self._advance())

        identifier = ''.join(value)
        upper_id = identifier.upper()
        if upper_id in self.KEYWORDS:
            return Token(self.KEYWORDS[upper_id], identifier.lower(), start_line, start_col)
        return Token(TokenType.IDENTIFIER, identifier, start_line, start_col)

    def tokenize(self) -> List[Token]:
        tokens = []

        while self._current_char() is not None:
            self._skip_whitespace()
            char = self._current_char()
            if char is None:
                break

            if char == '#':
                self._skip_comment()
                continue

            if char in '"\'':
                tokens.append(self._read_string(char))
                continue

            if char.isdigit() or (char == '.' and (self._peek() or '').isdigit()):
                tokens.append(self._read_number())
                continue

            if char.isalpha() or char == '_':
                tokens.append(self._read_identifier())
                continue

            if char in self.SINGLE_CHAR_TOKENS:
                start_line, start_col = self.line, self.column
                self._advance()
                tokens.append(Token(self.SINGLE_CHAR_TOKENS[char], char, start_line, start_col))
                continue

            raise ParseError(f"Unexpected character {char!r}", Token(TokenType.EOF, char, self.line, self.column))

        tokens.append(Token(TokenType.EOF, None, self.line, self.column))
        return tokens
