"""Java-subset frontend: parse sources into a CodeTree aligned with the
rule language's element kinds, with source spans, canonical XML export,
and a pretty-printer.

The subset covers packages, imports, class and interface declarations
(nesting allowed), fields, methods (concrete and abstract), constructors,
parameters, annotations (kept as raw text), local variable declarations,
expression statements, return statements, and nested blocks.  Generics and
arrays stay as raw type text; lambda and anonymous-class bodies are
captured opaquely inside the surrounding expression text.  Enums, records,
and annotation declarations are skipped with a warning.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, field

from .diagnostics import Diagnostic, warning

PRIMITIVES = frozenset(
    ["int", "long", "short", "byte", "char", "boolean", "float", "double", "void"]
)
VISIBILITIES = frozenset(["public", "private", "protected"])
SPECIFIERS = frozenset(
    [
        "static",
        "final",
        "abstract",
        "synchronized",
        "native",
        "strictfp",
        "transient",
        "volatile",
        "default",
    ]
)

NODE_KINDS = (
    "compilationUnit",
    "packageDecl",
    "importDecl",
    "classDecl",
    "interfaceDecl",
    "fieldDecl",
    "methodDecl",
    "abstractMethodDecl",
    "constructorDecl",
    "parameter",
    "localDeclStmt",
    "expressionStmt",
    "returnStmt",
    "annotation",
    "block",
)

# Attribute emission order per kind; every listed attribute is always
# present on nodes of that kind (possibly empty, e.g. package-private
# visibility is "").
KIND_ATTRS: dict[str, tuple[str, ...]] = {
    "compilationUnit": (),
    "packageDecl": ("name",),
    "importDecl": ("name",),
    "classDecl": ("name", "visibility", "specifiers", "superclassText", "interfaceTexts"),
    "interfaceDecl": ("name", "visibility", "specifiers", "interfaceTexts"),
    "fieldDecl": ("name", "visibility", "specifiers", "typeText", "initializerText"),
    "methodDecl": ("name", "visibility", "specifiers", "typeText"),
    "abstractMethodDecl": ("name", "visibility", "specifiers", "typeText"),
    "constructorDecl": ("name", "visibility", "specifiers"),
    "parameter": ("name", "specifiers", "typeText"),
    "localDeclStmt": ("name", "visibility", "specifiers", "typeText", "initializerText"),
    "expressionStmt": ("expressionText",),
    "returnStmt": ("returnExprText",),
    "annotation": ("annotationText",),
    "block": (),
}


@dataclass(frozen=True)
class SourceSpan:
    """1-based line/column range; end column is exclusive."""

    file: str
    startLine: int
    startCol: int
    endLine: int
    endCol: int

    def key(self) -> tuple:
        return (self.file, self.startLine, self.startCol, self.endLine, self.endCol)

    def to_dict(self) -> dict:
        return {
            "file": self.file,
            "startLine": self.startLine,
            "startCol": self.startCol,
            "endLine": self.endLine,
            "endCol": self.endCol,
        }


@dataclass
class CodeNode:
    kind: str
    attributes: dict
    children: list["CodeNode"] = field(default_factory=list)
    span: SourceSpan | None = field(default=None, compare=False)

    def attr(self, name: str, default: str = "") -> str:
        return self.attributes.get(name, default)

    def walk(self):
        yield self
        for c in self.children:
            yield from c.walk()


@dataclass
class CodeTree:
    root: CodeNode
    sourceHash: str
    path: str
    sourceText: str = field(repr=False, default="")

    def snippet(self, span: SourceSpan) -> str:
        return extract_span(self.sourceText, span)


class JavaParseError(Exception):
    def __init__(self, message: str, line: int, col: int):
        super().__init__(f"{message} (line {line}, col {col})")
        self.message = message
        self.line = line
        self.col = col


def _line_starts(source: str) -> list[int]:
    starts = [0]
    for i, c in enumerate(source):
        if c == "\n":
            starts.append(i + 1)
    return starts


def extract_span(source: str, span: SourceSpan) -> str:
    starts = _line_starts(source)
    begin = starts[span.startLine - 1] + span.startCol - 1
    end = starts[span.endLine - 1] + span.endCol - 1
    return source[begin:end]


def normalize_expr(text: str) -> str:
    """Whitespace-insensitive canonical form for expression-like text."""
    return "".join(text.split())


# ---------------------------------------------------------------------------
# Lexer


@dataclass(frozen=True)
class _Tok:
    kind: str  # id | num | str | char | punct
    text: str
    start: int
    end: int
    line: int
    col: int


def _lex(source: str, path: str) -> list[_Tok]:
    toks: list[_Tok] = []
    i = 0
    n = len(source)
    line = 1
    col = 1

    def bump(text: str):
        nonlocal line, col
        nl = text.count("\n")
        if nl:
            line += nl
            col = len(text) - text.rfind("\n")
        else:
            col += len(text)

    while i < n:
        c = source[i]
        if c in " \t\r\n":
            bump(c)
            i += 1
            continue
        if c == "/" and i + 1 < n and source[i + 1] == "/":
            j = source.find("\n", i)
            j = n if j < 0 else j
            bump(source[i:j])
            i = j
            continue
        if c == "/" and i + 1 < n and source[i + 1] == "*":
            j = source.find("*/", i + 2)
            if j < 0:
                raise JavaParseError("unterminated comment", line, col)
            bump(source[i : j + 2])
            i = j + 2
            continue
        if c in "\"'":
            quote = c
            j = i + 1
            while j < n:
                if source[j] == "\\":
                    j += 2
                    continue
                if source[j] == quote:
                    break
                if source[j] == "\n":
                    j = n
                    break
                j += 1
            if j >= n:
                raise JavaParseError(
                    "unterminated string literal" if quote == '"' else "unterminated character literal",
                    line,
                    col,
                )
            text = source[i : j + 1]
            toks.append(_Tok("str" if quote == '"' else "char", text, i, j + 1, line, col))
            bump(text)
            i = j + 1
            continue
        if c.isdigit():
            j = i + 1
            while j < n and (source[j].isalnum() or source[j] in "._"):
                # avoid eating a method call after an int literal: 1.foo is not java
                if source[j] == "." and j + 1 < n and source[j + 1].isalpha():
                    break
                j += 1
            text = source[i:j]
            toks.append(_Tok("num", text, i, j, line, col))
            bump(text)
            i = j
            continue
        if c.isalpha() or c in "_$":
            j = i + 1
            while j < n and (source[j].isalnum() or source[j] in "_$"):
                j += 1
            text = source[i:j]
            toks.append(_Tok("id", text, i, j, line, col))
            bump(text)
            i = j
            continue
        toks.append(_Tok("punct", c, i, i + 1, line, col))
        bump(c)
        i += 1
    return toks


# ---------------------------------------------------------------------------
# Parser


class _JavaParser:
    def __init__(self, source: str, path: str):
        self.source = source
        self.path = path
        self.toks = _lex(source, path)
        self.n = len(self.toks)
        self.pos = 0
        self.warnings: list[Diagnostic] = []
        self.line_starts = _line_starts(source)

    # -- primitives

    def peek(self, off: int = 0) -> _Tok | None:
        p = self.pos + off
        return self.toks[p] if p < self.n else None

    def at(self, kind: str, text: str | None = None, off: int = 0) -> bool:
        t = self.peek(off)
        return t is not None and t.kind == kind and (text is None or t.text == text)

    def at_punct(self, ch: str, off: int = 0) -> bool:
        return self.at("punct", ch, off)

    def at_id(self, text: str | None = None, off: int = 0) -> bool:
        return self.at("id", text, off)

    def advance(self) -> _Tok:
        t = self.toks[self.pos]
        self.pos += 1
        return t

    def expect_punct(self, ch: str, what: str) -> _Tok:
        if not self.at_punct(ch):
            t = self.peek()
            if t is None:
                last = self.toks[-1] if self.toks else None
                line = last.line if last else 1
                col = last.col if last else 1
                raise JavaParseError(f"expected '{ch}' {what}, found end of file", line, col)
            raise JavaParseError(f"expected '{ch}' {what}, found {t.text!r}", t.line, t.col)
        return self.advance()

    def err_here(self, message: str) -> JavaParseError:
        t = self.peek()
        if t is None:
            last = self.toks[-1] if self.toks else None
            return JavaParseError(message, last.line if last else 1, last.col if last else 1)
        return JavaParseError(message, t.line, t.col)

    def span_of(self, start_tok: _Tok, end_tok: _Tok) -> SourceSpan:
        end_line = end_tok.line + end_tok.text.count("\n")
        if "\n" in end_tok.text:
            end_col = len(end_tok.text) - end_tok.text.rfind("\n")
        else:
            end_col = end_tok.col + len(end_tok.text)
        return SourceSpan(self.path, start_tok.line, start_tok.col, end_line, end_col)

    def raw(self, start_tok: _Tok, end_tok: _Tok) -> str:
        return self.source[start_tok.start : end_tok.end]

    # -- balanced scanning

    def skip_balanced(self, open_ch: str, close_ch: str) -> _Tok:
        """Consume from the current open delimiter through its match;
        returns the closing token."""
        opener = self.expect_punct(open_ch, "")
        depth = 1
        while self.pos < self.n:
            t = self.advance()
            if t.kind == "punct":
                if t.text == open_ch:
                    depth += 1
                elif t.text == close_ch:
                    depth -= 1
                    if depth == 0:
                        return t
        raise JavaParseError(
            f"unbalanced '{open_ch}'", opener.line, opener.col
        )

    def scan_expression(self, stop: frozenset[str]) -> tuple[_Tok, _Tok]:
        """Consume tokens until a stop punct at delimiter depth 0; returns
        (first, last) consumed tokens.  Parens, braces, and brackets nest
        (lambda and anonymous-class bodies ride along as opaque text)."""
        first = self.peek()
        if first is None or (first.kind == "punct" and first.text in stop):
            raise self.err_here("expected an expression")
        last = first
        depth = 0
        while self.pos < self.n:
            t = self.peek()
            if t.kind == "punct":
                if t.text in "({[":
                    depth += 1
                elif t.text in ")}]":
                    if depth == 0:
                        break
                    depth -= 1
                elif depth == 0 and t.text in stop:
                    break
            last = self.advance()
        if self.pos >= self.n:
            raise JavaParseError("unterminated expression", first.line, first.col)
        return first, last

    # -- types

    def try_parse_type(self) -> tuple[str, _Tok, _Tok] | None:
        """Parse a type reference; returns (normalized text, first, last)
        or None (position restored) when the tokens do not form a type."""
        save = self.pos
        t = self.peek()
        if t is None or t.kind != "id":
            return None
        first = self.advance()
        last = first
        if first.text not in PRIMITIVES:
            while self.at_punct(".") and self.at_id(off=1):
                self.advance()
                last = self.advance()
            if self.at_punct("<"):
                closing = self._try_skip_generics()
                if closing is None:
                    self.pos = save
                    return None
                last = closing
        while self.at_punct("[") and self.at_punct("]", off=1):
            self.advance()
            last = self.advance()
        if self.at_punct(".") and self.at_punct(".", off=1) and self.at_punct(".", off=2):
            self.advance()
            self.advance()
            last = self.advance()
        return normalize_expr(self.raw(first, last)), first, last

    def _try_skip_generics(self) -> _Tok | None:
        """From a '<', consume a balanced generic argument list; None when
        the brackets do not balance before ';', '{', '}', or ')'. """
        save = self.pos
        self.advance()  # <
        depth = 1
        while self.pos < self.n:
            t = self.peek()
            if t.kind == "punct":
                if t.text == "<":
                    depth += 1
                elif t.text == ">":
                    depth -= 1
                    if depth == 0:
                        return self.advance()
                elif t.text in ";{})=":
                    break
            self.advance()
        self.pos = save
        return None

    # -- modifiers and annotations

    def parse_modifiers(self) -> tuple[str, list[str], list[CodeNode], _Tok | None]:
        visibility = ""
        specifiers: list[str] = []
        annotations: list[CodeNode] = []
        first: _Tok | None = None
        while True:
            if self.at_punct("@") and self.at_id(off=1) and not self.at_id("interface", off=1):
                tok = self.peek()
                first = first or tok
                annotations.append(self.parse_annotation())
                continue
            t = self.peek()
            if t is not None and t.kind == "id" and t.text in VISIBILITIES:
                visibility = t.text
                first = first or t
                self.advance()
                continue
            if t is not None and t.kind == "id" and t.text in SPECIFIERS:
                specifiers.append(t.text)
                first = first or t
                self.advance()
                continue
            return visibility, specifiers, annotations, first

    def parse_annotation(self) -> CodeNode:
        at_tok = self.advance()  # @
        name_first = self.advance()
        last = name_first
        while self.at_punct(".") and self.at_id(off=1):
            self.advance()
            last = self.advance()
        if self.at_punct("("):
            last = self.skip_balanced("(", ")")
        text = normalize_expr(self.raw(name_first, last))
        return CodeNode("annotation", {"annotationText": text}, [], self.span_of(at_tok, last))

    # -- compilation unit

    def parse_compilation_unit(self) -> CodeNode:
        children: list[CodeNode] = []
        if self.at_id("package"):
            start = self.advance()
            first, last = self.scan_expression(frozenset(";"))
            end = self.expect_punct(";", "after package name")
            children.append(
                CodeNode(
                    "packageDecl",
                    {"name": normalize_expr(self.raw(first, last))},
                    [],
                    self.span_of(start, end),
                )
            )
        while self.at_id("import"):
            start = self.advance()
            first, last = self.scan_expression(frozenset(";"))
            end = self.expect_punct(";", "after import")
            children.append(
                CodeNode(
                    "importDecl",
                    {"name": normalize_expr(self.raw(first, last))},
                    [],
                    self.span_of(start, end),
                )
            )
        while self.pos < self.n:
            if self.at_punct(";"):
                self.advance()
                continue
            decl = self.parse_type_decl()
            if decl is not None:
                children.append(decl)
        if self.toks:
            span = self.span_of(self.toks[0], self.toks[-1])
        else:
            span = SourceSpan(self.path, 1, 1, 1, 1)
        return CodeNode("compilationUnit", {}, children, span)

    def parse_type_decl(self) -> CodeNode | None:
        visibility, specifiers, annotations, first = self.parse_modifiers()
        t = self.peek()
        if t is None:
            raise self.err_here("expected a type declaration")
        if self.at_punct("@") and self.at_id("interface", off=1):
            self._skip_unsupported_decl("annotation declaration", first or t)
            return None
        if self.at_id("enum") or self.at_id("record"):
            self._skip_unsupported_decl(f"{t.text} declaration", first or t)
            return None
        if self.at_id("class") or self.at_id("interface"):
            return self.parse_class_like(visibility, specifiers, annotations, first)
        raise self.err_here(f"unsupported top-level construct {t.text!r}")

    def _skip_unsupported_decl(self, what: str, first: _Tok):
        t = self.peek()
        while self.pos < self.n and not self.at_punct("{"):
            self.advance()
        if self.pos < self.n:
            self.skip_balanced("{", "}")
        if self.at_punct(";"):
            self.advance()
        self.warnings.append(
            warning(f"skipped unsupported {what}", first.start, first.end)
        )

    # -- class / interface

    def parse_class_like(
        self,
        visibility: str,
        specifiers: list[str],
        annotations: list[CodeNode],
        first: _Tok | None,
    ) -> CodeNode:
        kw = self.advance()  # class | interface
        first = first or kw
        is_interface = kw.text == "interface"
        if not self.at_id():
            raise self.err_here(f"expected a name after '{kw.text}'")
        name = self.advance().text
        if self.at_punct("<"):
            if self._try_skip_generics() is None:
                raise self.err_here("unbalanced type parameter list")
        superclass = ""
        interfaces: list[str] = []
        if self.at_id("extends"):
            self.advance()
            parsed = self.try_parse_type()
            if parsed is None:
                raise self.err_here("expected a type after 'extends'")
            if is_interface:
                interfaces.append(parsed[0])
                while self.at_punct(","):
                    self.advance()
                    nxt = self.try_parse_type()
                    if nxt is None:
                        raise self.err_here("expected a type after ','")
                    interfaces.append(nxt[0])
            else:
                superclass = parsed[0]
        if self.at_id("implements"):
            self.advance()
            while True:
                parsed = self.try_parse_type()
                if parsed is None:
                    raise self.err_here("expected a type after 'implements'")
                interfaces.append(parsed[0])
                if self.at_punct(","):
                    self.advance()
                    continue
                break
        self.expect_punct("{", "to open the body")
        members = annotations + self.parse_members(name)
        close = self.expect_punct("}", "to close the body")
        attrs = {
            "name": name,
            "visibility": visibility,
            "specifiers": specifiers,
        }
        if is_interface:
            attrs["interfaceTexts"] = interfaces
            kindname = "interfaceDecl"
        else:
            attrs["superclassText"] = superclass
            attrs["interfaceTexts"] = interfaces
            kindname = "classDecl"
        return CodeNode(kindname, attrs, members, self.span_of(first, close))

    def parse_members(self, class_name: str) -> list[CodeNode]:
        members: list[CodeNode] = []
        while self.pos < self.n and not self.at_punct("}"):
            if self.at_punct(";"):
                self.advance()
                continue
            visibility, specifiers, annotations, first = self.parse_modifiers()
            t = self.peek()
            if t is None:
                raise self.err_here("unbalanced '{' in class body")
            if self.at_punct("{"):
                # instance or static initializer block: outside the subset
                self.skip_balanced("{", "}")
                continue
            if self.at_punct("@") and self.at_id("interface", off=1):
                self._skip_unsupported_decl("annotation declaration", first or t)
                continue
            if self.at_id("enum") or self.at_id("record"):
                self._skip_unsupported_decl(f"{t.text} declaration", first or t)
                continue
            if self.at_id("class") or self.at_id("interface"):
                members.append(
                    self.parse_class_like(visibility, specifiers, annotations, first)
                )
                continue
            if self.at_punct("<"):
                if self._try_skip_generics() is None:
                    raise self.err_here("unbalanced type parameter list")
            if self.at_id(class_name) and self.at_punct("(", off=1):
                members.append(
                    self.parse_constructor(visibility, specifiers, annotations, first)
                )
                continue
            members.append(
                self.parse_field_or_method(visibility, specifiers, annotations, first)
            )
        return members

    def parse_constructor(
        self,
        visibility: str,
        specifiers: list[str],
        annotations: list[CodeNode],
        first: _Tok | None,
    ) -> CodeNode:
        name_tok = self.advance()
        first = first or name_tok
        params = self.parse_parameters()
        self._skip_throws()
        body, close = self.parse_block()
        node = CodeNode(
            "constructorDecl",
            {"name": name_tok.text, "visibility": visibility, "specifiers": specifiers},
            annotations + params + [body],
            self.span_of(first, close),
        )
        return node

    def parse_field_or_method(
        self,
        visibility: str,
        specifiers: list[str],
        annotations: list[CodeNode],
        first: _Tok | None,
    ) -> CodeNode:
        parsed = self.try_parse_type()
        if parsed is None:
            raise self.err_here("expected a type in member declaration")
        type_text, type_first, _ = parsed
        first = first or type_first
        if not self.at_id():
            raise self.err_here("expected a member name")
        name_tok = self.advance()
        if self.at_punct("("):
            params = self.parse_parameters()
            self._skip_throws()
            attrs = {
                "name": name_tok.text,
                "visibility": visibility,
                "specifiers": specifiers,
                "typeText": type_text,
            }
            if self.at_punct(";"):
                end = self.advance()
                return CodeNode(
                    "abstractMethodDecl",
                    attrs,
                    annotations + params,
                    self.span_of(first, end),
                )
            body, close = self.parse_block()
            return CodeNode(
                "methodDecl",
                attrs,
                annotations + params + [body],
                self.span_of(first, close),
            )
        return self.parse_declarators(
            "fieldDecl", type_text, name_tok, visibility, specifiers, annotations, first
        )

    def parse_declarators(
        self,
        kind: str,
        type_text: str,
        name_tok: _Tok,
        visibility: str,
        specifiers: list[str],
        annotations: list[CodeNode],
        first: _Tok,
    ) -> CodeNode | list[CodeNode]:
        """One node per declarator; all share the statement start so each
        span stays inside the parent and spans remain pairwise distinct."""
        nodes: list[CodeNode] = []
        while True:
            name = name_tok.text
            decl_type = type_text
            end_tok = name_tok
            while self.at_punct("[") and self.at_punct("]", off=1):
                self.advance()
                end_tok = self.advance()
                decl_type += "[]"
            init = ""
            if self.at_punct("="):
                self.advance()
                efirst, elast = self.scan_expression(frozenset({";", ","}))
                init = normalize_expr(self.raw(efirst, elast))
                end_tok = elast
            nodes.append(
                CodeNode(
                    kind,
                    {
                        "name": name,
                        "visibility": visibility,
                        "specifiers": specifiers,
                        "typeText": decl_type,
                        "initializerText": init,
                    },
                    list(annotations),
                    self.span_of(first, end_tok),
                )
            )
            if self.at_punct(","):
                self.advance()
                if not self.at_id():
                    raise self.err_here("expected a name after ','")
                name_tok = self.advance()
                continue
            self.expect_punct(";", "after declaration")
            break
        return nodes[0] if len(nodes) == 1 else nodes

    def parse_parameters(self) -> list[CodeNode]:
        self.expect_punct("(", "to open the parameter list")
        params: list[CodeNode] = []
        if self.at_punct(")"):
            self.advance()
            return params
        while True:
            first: _Tok | None = None
            specifiers: list[str] = []
            while True:
                if self.at_punct("@") and self.at_id(off=1):
                    tok = self.peek()
                    first = first or tok
                    self.parse_annotation()  # parameter annotations are dropped
                    continue
                if self.at_id("final"):
                    t = self.peek()
                    first = first or t
                    specifiers.append(self.advance().text)
                    continue
                break
            parsed = self.try_parse_type()
            if parsed is None:
                raise self.err_here("expected a parameter type")
            type_text, type_first, _ = parsed
            first = first or type_first
            if not self.at_id():
                raise self.err_here("expected a parameter name")
            name_tok = self.advance()
            last = name_tok
            while self.at_punct("[") and self.at_punct("]", off=1):
                self.advance()
                last = self.advance()
                type_text += "[]"
            params.append(
                CodeNode(
                    "parameter",
                    {"name": name_tok.text, "specifiers": specifiers, "typeText": type_text},
                    [],
                    self.span_of(first, last),
                )
            )
            if self.at_punct(","):
                self.advance()
                continue
            self.expect_punct(")", "to close the parameter list")
            break
        return params

    def _skip_throws(self):
        if self.at_id("throws"):
            self.advance()
            while True:
                if self.try_parse_type() is None:
                    raise self.err_here("expected an exception type after 'throws'")
                if self.at_punct(","):
                    self.advance()
                    continue
                break

    # -- statements

    def parse_block(self) -> tuple[CodeNode, _Tok]:
        open_tok = self.expect_punct("{", "to open a block")
        stmts: list[CodeNode] = []
        while self.pos < self.n and not self.at_punct("}"):
            self.parse_statement_into(stmts)
        close = self.expect_punct("}", "to close a block")
        return CodeNode("block", {}, stmts, self.span_of(open_tok, close)), close

    def parse_statement_into(self, out: list[CodeNode]):
        t = self.peek()
        if t is None:
            raise self.err_here("unbalanced '{'")
        if self.at_punct(";"):
            self.advance()
            return
        if self.at_punct("{"):
            block, _ = self.parse_block()
            out.append(block)
            return
        if t.kind == "id":
            word = t.text
            if word == "return":
                start = self.advance()
                expr = ""
                end = start
                if not self.at_punct(";"):
                    efirst, elast = self.scan_expression(frozenset(";"))
                    expr = normalize_expr(self.raw(efirst, elast))
                    end = elast
                end = self.expect_punct(";", "after return")
                out.append(
                    CodeNode(
                        "returnStmt",
                        {"returnExprText": expr},
                        [],
                        self.span_of(start, end),
                    )
                )
                return
            if word in ("if", "while", "switch", "synchronized"):
                self.advance()
                self.skip_balanced("(", ")")
                self.parse_statement_into(out)
                while self.at_id("else"):
                    self.advance()
                    self.parse_statement_into(out)
                return
            if word == "for":
                self.advance()
                self.skip_balanced("(", ")")
                self.parse_statement_into(out)
                return
            if word == "do":
                self.advance()
                self.parse_statement_into(out)
                if self.at_id("while"):
                    self.advance()
                    self.skip_balanced("(", ")")
                    if self.at_punct(";"):
                        self.advance()
                return
            if word == "try":
                self.advance()
                if self.at_punct("("):
                    self.skip_balanced("(", ")")  # try-with-resources header
                self.parse_statement_into(out)
                while self.at_id("catch"):
                    self.advance()
                    self.skip_balanced("(", ")")
                    self.parse_statement_into(out)
                if self.at_id("finally"):
                    self.advance()
                    self.parse_statement_into(out)
                return
            if word in ("case", "default"):
                self.advance()
                while self.pos < self.n and not self.at_punct(":"):
                    self.advance()
                if self.at_punct(":"):
                    self.advance()
                return
            if word in ("break", "continue", "throw", "assert", "yield"):
                self.advance()
                while self.pos < self.n and not self.at_punct(";"):
                    if self.at_punct("(") or self.at_punct("{") or self.at_punct("["):
                        ch = self.peek().text
                        self.skip_balanced(ch, {"(": ")", "{": "}", "[": "]"}[ch])
                        continue
                    self.advance()
                if self.at_punct(";"):
                    self.advance()
                return
        decl = self.try_parse_local_decl()
        if decl is not None:
            if isinstance(decl, list):
                out.extend(decl)
            else:
                out.append(decl)
            return
        efirst, elast = self.scan_expression(frozenset(";"))
        end = self.expect_punct(";", "after expression")
        out.append(
            CodeNode(
                "expressionStmt",
                {"expressionText": normalize_expr(self.raw(efirst, elast))},
                [],
                self.span_of(efirst, end),
            )
        )

    def try_parse_local_decl(self) -> CodeNode | list[CodeNode] | None:
        save = self.pos
        specifiers: list[str] = []
        annotations: list[CodeNode] = []
        first: _Tok | None = None
        while True:
            if self.at_id("final"):
                t = self.peek()
                first = first or t
                specifiers.append(self.advance().text)
                continue
            if self.at_punct("@") and self.at_id(off=1):
                t = self.peek()
                first = first or t
                annotations.append(self.parse_annotation())
                continue
            break
        parsed = self.try_parse_type()
        if parsed is None:
            self.pos = save
            return None
        type_text, type_first, _ = parsed
        if not self.at_id():
            self.pos = save
            return None
        nxt = self.peek(1)
        if nxt is None or nxt.kind != "punct" or nxt.text not in ("=", ",", ";", "["):
            self.pos = save
            return None
        name_tok = self.advance()
        return self.parse_declarators(
            "localDeclStmt",
            type_text,
            name_tok,
            "",
            specifiers,
            annotations,
            first or type_first,
        )


def parse_java(source: str, path: str) -> tuple[CodeTree, list[Diagnostic]]:
    """Parse source into a CodeTree.  Raises JavaParseError on fatal errors
    (unbalanced braces, unterminated literals or comments); skipped
    constructs come back as warnings."""
    parser = _JavaParser(source, path)
    root = parser.parse_compilation_unit()
    digest = hashlib.sha256(source.encode("utf-8")).hexdigest()
    return CodeTree(root, digest, path, source), parser.warnings


# ---------------------------------------------------------------------------
# XML export


def _xml_escape(value: str) -> str:
    return (
        value.replace("&", "&amp;")
        .replace("<", "&lt;")
        .replace(">", "&gt;")
        .replace('"', "&quot;")
    )


def _attr_str(node: CodeNode, name: str) -> str:
    v = node.attributes.get(name, "")
    if isinstance(v, list):
        return " ".join(v)
    return v


def export_xml(tree: CodeTree) -> str:
    """Deterministic XML: one element per node, kind as tag, attributes in
    a fixed order, children in source order, spans as attributes."""
    out: list[str] = ['<?xml version="1.0" encoding="UTF-8"?>']

    def emit(node: CodeNode, depth: int):
        pad = "  " * depth
        parts = [f"{pad}<{node.kind}"]
        if node.kind == "compilationUnit":
            parts.append(f' file="{_xml_escape(tree.path)}"')
        for name in KIND_ATTRS[node.kind]:
            parts.append(f' {name}="{_xml_escape(_attr_str(node, name))}"')
        s = node.span
        if s is not None:
            parts.append(
                f' startLine="{s.startLine}" startCol="{s.startCol}"'
                f' endLine="{s.endLine}" endCol="{s.endCol}"'
            )
        if node.children:
            out.append("".join(parts) + ">")
            for c in node.children:
                emit(c, depth + 1)
            out.append(f"{pad}</{node.kind}>")
        else:
            out.append("".join(parts) + "/>")

    emit(tree.root, 0)
    return "\n".join(out) + "\n"


# ---------------------------------------------------------------------------
# Pretty printer (subset source regeneration; used to check that reparsing
# a printed tree reproduces the tree)


def pretty_print(tree: CodeTree) -> str:
    lines: list[str] = []

    def head(node: CodeNode) -> str:
        bits = []
        if node.attr("visibility"):
            bits.append(node.attr("visibility"))
        bits.extend(node.attributes.get("specifiers", []))
        return " ".join(bits)

    def emit(node: CodeNode, depth: int):
        pad = "    " * depth
        kind = node.kind
        if kind == "compilationUnit":
            for c in node.children:
                emit(c, depth)
            return
        if kind == "packageDecl":
            lines.append(f"package {node.attr('name')};")
            return
        if kind == "importDecl":
            lines.append(f"import {node.attr('name')};")
            return
        annotations = [c for c in node.children if c.kind == "annotation"]
        rest = [c for c in node.children if c.kind != "annotation"]
        for a in annotations:
            lines.append(f"{pad}@{a.attr('annotationText')}")
        if kind in ("classDecl", "interfaceDecl"):
            kw = "class" if kind == "classDecl" else "interface"
            decl = " ".join(x for x in [head(node), kw, node.attr("name")] if x)
            if node.attr("superclassText"):
                decl += f" extends {node.attr('superclassText')}"
            itexts = node.attributes.get("interfaceTexts", [])
            if itexts:
                joiner = "extends" if kind == "interfaceDecl" else "implements"
                decl += f" {joiner} {', '.join(itexts)}"
            lines.append(f"{pad}{decl} {{")
            for c in rest:
                emit(c, depth + 1)
            lines.append(f"{pad}}}")
            return
        if kind in ("fieldDecl", "localDeclStmt"):
            decl = " ".join(
                x for x in [head(node), node.attr("typeText"), node.attr("name")] if x
            )
            if node.attr("initializerText"):
                decl += f" = {node.attr('initializerText')}"
            lines.append(f"{pad}{decl};")
            return
        if kind in ("methodDecl", "abstractMethodDecl", "constructorDecl"):
            params = [c for c in rest if c.kind == "parameter"]
            body = [c for c in rest if c.kind == "block"]
            sig_type = node.attr("typeText")
            bits = [head(node), sig_type, node.attr("name")]
            if kind == "constructorDecl":
                bits = [head(node), node.attr("name")]
            sig = " ".join(x for x in bits if x)
            plist = ", ".join(
                " ".join(
                    x
                    for x in [
                        " ".join(p.attributes.get("specifiers", [])),
                        p.attr("typeText"),
                        p.attr("name"),
                    ]
                    if x
                )
                for p in params
            )
            if kind == "abstractMethodDecl":
                lines.append(f"{pad}{sig}({plist});")
                return
            lines.append(f"{pad}{sig}({plist}) {{")
            for b in body:
                for c in b.children:
                    emit(c, depth + 1)
            lines.append(f"{pad}}}")
            return
        if kind == "block":
            lines.append(f"{pad}{{")
            for c in node.children:
                emit(c, depth + 1)
            lines.append(f"{pad}}}")
            return
        if kind == "expressionStmt":
            lines.append(f"{pad}{node.attr('expressionText')};")
            return
        if kind == "returnStmt":
            expr = node.attr("returnExprText")
            lines.append(f"{pad}return {expr};" if expr else f"{pad}return;")
            return
        raise ValueError(f"cannot print node kind {kind}")

    emit(tree.root, 0)
    return "\n".join(lines) + "\n"
