"""Parser module - Lexer and Parser for set expressions"""

from .lexer import Lexer, ParseError, Token, TokenType
from .parser import FreqTerm, Parser, parse_frequency, parse_set, parse_set_spec

__all__ = ['Lexer', 'ParseError', 'Token', 'TokenType', 'FreqTerm', 'Parser',
           'parse_frequency', 'parse_set', 'parse_set_spec']
