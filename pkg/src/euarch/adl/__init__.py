"""Textual language for styles (.eus) and architectures (.eua)."""

from .ast import ArchDecl, Diagnostic, ParseFailure, StyleDecl
from .parser import parse_architecture, parse_style
from .printer import print_decl
from .elaborate import instantiate, style_from_decl

__all__ = [
    "ArchDecl", "StyleDecl", "Diagnostic", "ParseFailure",
    "parse_style", "parse_architecture", "print_decl",
    "instantiate", "style_from_decl",
]
