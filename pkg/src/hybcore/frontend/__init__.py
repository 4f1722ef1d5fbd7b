"""Concrete syntax: tokeniser, parser (with desugaring) and pretty-printer."""

from .lexer import Token, tokenize
from .parser import parse, parse_value
from .pretty import pretty

__all__ = ["Token", "tokenize", "parse", "parse_value", "pretty"]
