"""Parser and elaborator for the Net#-style network topology scripts.

Supports exactly the subset needed to declare dense feed-forward stacks:

    script := decl+
    decl   := "input" name "auto" ";"
            | "hidden" name "[" int "]" "from" name "all" ";"
            | "output" name "[" int "]" "sigmoid" "from" name "all" ";"

Keywords are case-sensitive; whitespace and newlines are free-form.
Anything outside this subset is rejected with a positioned diagnostic.
"""

from __future__ import annotations

import re
from dataclasses import dataclass


class ScriptSyntaxError(ValueError):
    def __init__(self, message: str, line: int, column: int):
        super().__init__(f"{line}:{column}: {message}")
        self.line = line
        self.column = column


class ScriptSemanticError(ValueError):
    def __init__(self, message: str, line: int = 0, column: int = 0):
        where = f"{line}:{column}: " if line else ""
        super().__init__(where + message)
        self.line = line
        self.column = column


class ShapeError(ValueError):
    pass


_KEYWORDS = {"input", "hidden", "output", "from", "all", "auto", "sigmoid"}
_TOKEN_RE = re.compile(r"\[|\]|;|[A-Za-z_][A-Za-z0-9_]*|\d+|\S")


@dataclass(frozen=True)
class Token:
    text: str
    line: int
    column: int


def _tokenize(text: str) -> list[Token]:
    tokens = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        for m in _TOKEN_RE.finditer(line):
            tokens.append(Token(m.group(), lineno, m.start() + 1))
    return tokens


@dataclass(frozen=True)
class LayerDecl:
    kind: str                 # "input" | "hidden" | "output"
    name: str
    size: int | None          # None means auto (input only)
    activation: str | None    # "sigmoid" on output; hidden defaults at elaboration
    source: str | None
    line: int = 0
    column: int = 0


@dataclass(frozen=True)
class NetScriptAst:
    decls: tuple[LayerDecl, ...]

    @property
    def input(self) -> LayerDecl:
        return next(d for d in self.decls if d.kind == "input")

    @property
    def output(self) -> LayerDecl:
        return next(d for d in self.decls if d.kind == "output")

    def hidden(self) -> list[LayerDecl]:
        return [d for d in self.decls if d.kind == "hidden"]


class _Parser:
    def __init__(self, tokens: list[Token]):
        self.tokens = tokens
        self.pos = 0

    def _here(self) -> tuple[int, int]:
        if self.pos < len(self.tokens):
            t = self.tokens[self.pos]
            return t.line, t.column
        if self.tokens:
            last = self.tokens[-1]
            return last.line, last.column + len(last.text)
        return 1, 1

    def peek(self) -> str | None:
        return self.tokens[self.pos].text if self.pos < len(self.tokens) else None

    def take(self, expected: str | None = None, what: str = "") -> Token:
        if self.pos >= len(self.tokens):
            line, col = self._here()
            raise ScriptSyntaxError(f"unexpected end of script, expected {expected or what}", line, col)
        tok = self.tokens[self.pos]
        if expected is not None and tok.text != expected:
            raise ScriptSyntaxError(f"expected {expected!r}, found {tok.text!r}", tok.line, tok.column)
        self.pos += 1
        return tok

    def take_name(self) -> Token:
        tok = self.take(what="a layer name")
        if tok.text in _KEYWORDS or not re.fullmatch(r"[A-Za-z_][A-Za-z0-9_]*", tok.text):
            raise ScriptSyntaxError(f"expected a layer name, found {tok.text!r}", tok.line, tok.column)
        return tok

    def take_size(self) -> tuple[int, Token]:
        self.take("[")
        tok = self.take(what="a layer size")
        if not tok.text.isdigit():
            raise ScriptSyntaxError(f"expected a layer size, found {tok.text!r}", tok.line, tok.column)
        self.take("]")
        return int(tok.text), tok

    def decl(self) -> LayerDecl:
        tok = self.take(what="'input', 'hidden' or 'output'")
        kind = tok.text
        if kind not in ("input", "hidden", "output"):
            raise ScriptSyntaxError(
                f"unsupported construct {kind!r} (only input/hidden/output declarations)",
                tok.line, tok.column,
            )
        name = self.take_name()
        if kind == "input":
            self.take("auto")
            self.take(";")
            return LayerDecl("input", name.text, None, None, None, tok.line, tok.column)
        size, size_tok = self.take_size()
        if size == 0:
            raise ScriptSemanticError("layer size must be positive", size_tok.line, size_tok.column)
        activation = None
        if kind == "output":
            act = self.take(what="'sigmoid'")
            if act.text != "sigmoid":
                raise ScriptSyntaxError(
                    f"unsupported activation {act.text!r} (only 'sigmoid')", act.line, act.column
                )
            activation = "sigmoid"
        self.take("from")
        source = self.take_name()
        self.take("all")
        self.take(";")
        return LayerDecl(kind, name.text, size, activation, source.text, tok.line, tok.column)


def parse(text: str) -> NetScriptAst:
    """Parse a topology script and validate its layer graph."""
    tokens = _tokenize(text)
    if not tokens:
        raise ScriptSyntaxError("empty script", 1, 1)
    parser = _Parser(tokens)
    decls = []
    while parser.peek() is not None:
        decls.append(parser.decl())

    seen: dict[str, LayerDecl] = {}
    inputs = [d for d in decls if d.kind == "input"]
    outputs = [d for d in decls if d.kind == "output"]
    for d in decls:
        if d.name in seen:
            raise ScriptSemanticError(f"duplicate layer name {d.name!r}", d.line, d.column)
        if d.source is not None and d.source not in seen:
            raise ScriptSemanticError(
                f"layer {d.name!r} reads from undeclared layer {d.source!r}", d.line, d.column
            )
        seen[d.name] = d
    if len(inputs) != 1:
        raise ScriptSemanticError(f"expected exactly one input layer, found {len(inputs)}")
    if len(outputs) != 1:
        raise ScriptSemanticError(f"expected exactly one output layer, found {len(outputs)}")
    if decls[-1].kind != "output":
        d = decls[-1]
        raise ScriptSemanticError("the output layer must be declared last", d.line, d.column)
    return NetScriptAst(tuple(decls))


def unparse(ast: NetScriptAst) -> str:
    """Canonical single-line rendering; parse(unparse(ast)) == parse-equal."""
    parts = []
    for d in ast.decls:
        if d.kind == "input":
            parts.append(f"input {d.name} auto;")
        elif d.kind == "hidden":
            parts.append(f"hidden {d.name} [{d.size}] from {d.source} all;")
        else:
            parts.append(f"output {d.name} [{d.size}] sigmoid from {d.source} all;")
    return " ".join(parts)


def total_hidden_nodes(ast: NetScriptAst) -> int:
    return sum(d.size for d in ast.hidden())


@dataclass(frozen=True)
class NetworkTopology:
    """Elaborated dense feed-forward stack: sizes plus per-layer activation
    for every layer after the input."""

    layer_sizes: tuple[int, ...]
    activations: tuple[str, ...]

    def __post_init__(self):
        if any(s < 1 for s in self.layer_sizes):
            raise ShapeError(f"zero-width layer in {self.layer_sizes}")
        if len(self.activations) != len(self.layer_sizes) - 1:
            raise ShapeError("one activation required per non-input layer")

    @property
    def input_width(self) -> int:
        return self.layer_sizes[0]

    @property
    def output_width(self) -> int:
        return self.layer_sizes[-1]

    @classmethod
    def dense(cls, sizes: list[int] | tuple[int, ...], activation: str = "sigmoid") -> "NetworkTopology":
        return cls(tuple(sizes), tuple(activation for _ in sizes[1:]))


def elaborate(ast: NetScriptAst, input_width: int, n_classes: int,
              hidden_activation: str = "sigmoid") -> NetworkTopology:
    """Resolve the auto input width and walk the source chain into a concrete
    topology.  The declared output size must match the requested class count."""
    out = ast.output
    if out.size != n_classes:
        raise ShapeError(f"output layer declares {out.size} units, expected {n_classes}")
    by_source = {}
    for d in ast.decls:
        if d.source is not None:
            if d.source in by_source:
                raise ScriptSemanticError(
                    f"layers {by_source[d.source].name!r} and {d.name!r} both read "
                    f"from {d.source!r}; only simple chains are supported",
                    d.line, d.column,
                )
            by_source[d.source] = d
    sizes = [input_width]
    activations = []
    current = ast.input
    while current.kind != "output":
        if current.name not in by_source:
            raise ScriptSemanticError(f"layer {current.name!r} feeds nothing")
        current = by_source[current.name]
        sizes.append(current.size)
        activations.append(current.activation or hidden_activation)
    if len(sizes) != len(ast.decls):
        unused = len(ast.decls) - len(sizes)
        raise ScriptSemanticError(f"{unused} declared layer(s) are not on the input-output chain")
    return NetworkTopology(tuple(sizes), tuple(activations))
