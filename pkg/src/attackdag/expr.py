"""Parser and renderer for the attack-expression DSL.

Grammar (lowest precedence first):

    expr   := term ("+" term)*          union of alternative step sequences
    term   := factor ("." factor)*      concatenation (temporal order)
    factor := atom "*"?                 star marks a repeatable step
    atom   := block | "(" expr ")"
    block  := "bb" "_" ident "(" balanced-text ")"

Whitespace between tokens is ignored.  The text inside a block's
parentheses is kept verbatim (any characters, parentheses balanced,
non-blank); the identifier after "bb_" is positional noise and is
discarded.  Blocks are matched by description, never by identifier.
"""

from __future__ import annotations

from dataclasses import dataclass

from .model import AttackExpr, Block, Concat, Star, UnionExpr, block, concat, star, union


class ExpressionSyntaxError(ValueError):
    """Malformed expression text.

    position is a 0-based character offset into the source; expected lists
    the token kinds that would have been legal there.
    """

    def __init__(self, message: str, position: int, expected: frozenset[str] = frozenset()):
        super().__init__(f"{message} at offset {position}")
        self.position = position
        self.expected = expected


class UnbalancedParens(ExpressionSyntaxError):
    def __init__(self, message: str, position: int):
        super().__init__(message, position, frozenset({")"}))


class EmptyBlockDescription(ExpressionSyntaxError):
    def __init__(self, position: int):
        super().__init__("block description is blank", position, frozenset({"text"}))


BLOCK_OPEN = "bb_"
IDENT = "ident"
LPAREN = "("
RPAREN = ")"
STAR = "*"
PLUS = "+"
DOT = "."
TEXT = "text"


@dataclass(frozen=True)
class ExprToken:
    kind: str
    text: str
    start: int
    end: int


def line_col(src: str, position: int) -> tuple[int, int]:
    """1-based (line, column) for a character offset."""
    prefix = src[:position]
    line = prefix.count("\n") + 1
    col = position - (prefix.rfind("\n") + 1) + 1
    return line, col


def tokenize(src: str) -> list[ExprToken]:
    """Scan source text into tokens.

    The scanner is stateful: immediately after "bb_" ident "(" it consumes
    one TEXT token running to the matching close paren, so operator
    characters inside descriptions stay literal.
    """
    tokens: list[ExprToken] = []
    i = 0
    n = len(src)
    while i < n:
        ch = src[i]
        if ch.isspace():
            i += 1
            continue
        if src.startswith(BLOCK_OPEN, i):
            tokens.append(ExprToken(BLOCK_OPEN, BLOCK_OPEN, i, i + 3))
            i += 3
            j = i
            while j < n and src[j].isalnum():
                j += 1
            if j == i:
                raise ExpressionSyntaxError("expected block identifier", i, frozenset({IDENT}))
            tokens.append(ExprToken(IDENT, src[i:j], i, j))
            i = j
            while i < n and src[i].isspace():
                i += 1
            if i >= n or src[i] != "(":
                raise ExpressionSyntaxError("expected '(' after block identifier", i, frozenset({LPAREN}))
            open_pos = i
            tokens.append(ExprToken(LPAREN, "(", i, i + 1))
            i += 1
            depth = 0
            j = i
            while j < n:
                if src[j] == "(":
                    depth += 1
                elif src[j] == ")":
                    if depth == 0:
                        break
                    depth -= 1
                j += 1
            if j >= n:
                raise UnbalancedParens("unclosed block description", open_pos)
            if not src[i:j].strip():
                raise EmptyBlockDescription(i)
            tokens.append(ExprToken(TEXT, src[i:j], i, j))
            tokens.append(ExprToken(RPAREN, ")", j, j + 1))
            i = j + 1
            continue
        if ch == "(":
            tokens.append(ExprToken(LPAREN, "(", i, i + 1))
        elif ch == ")":
            tokens.append(ExprToken(RPAREN, ")", i, i + 1))
        elif ch == "*":
            tokens.append(ExprToken(STAR, "*", i, i + 1))
        elif ch == "+":
            tokens.append(ExprToken(PLUS, "+", i, i + 1))
        elif ch == ".":
            tokens.append(ExprToken(DOT, ".", i, i + 1))
        else:
            raise ExpressionSyntaxError(
                f"unexpected character {ch!r}", i, frozenset({BLOCK_OPEN, LPAREN})
            )
        i += 1
    return tokens


class _Parser:
    def __init__(self, src: str, tokens: list[ExprToken]):
        self.src = src
        self.tokens = tokens
        self.pos = 0

    def peek(self) -> ExprToken | None:
        return self.tokens[self.pos] if self.pos < len(self.tokens) else None

    def _offset(self) -> int:
        tok = self.peek()
        return tok.start if tok else len(self.src)

    def fail(self, message: str, expected: frozenset[str]) -> ExpressionSyntaxError:
        return ExpressionSyntaxError(message, self._offset(), expected)

    def expect(self, kind: str) -> ExprToken:
        tok = self.peek()
        if tok is None or tok.kind != kind:
            raise self.fail(f"expected {kind!r}", frozenset({kind}))
        self.pos += 1
        return tok

    def parse(self) -> AttackExpr:
        result = self.expr()
        tok = self.peek()
        if tok is not None:
            if tok.kind == RPAREN:
                raise UnbalancedParens("unmatched ')'", tok.start)
            raise self.fail(f"unexpected {tok.kind!r}", frozenset({PLUS, DOT, STAR}))
        return result

    def expr(self) -> AttackExpr:
        node = self.term()
        while (tok := self.peek()) is not None and tok.kind == PLUS:
            self.pos += 1
            node = union(node, self.term())
        return node

    def term(self) -> AttackExpr:
        node = self.factor()
        while (tok := self.peek()) is not None and tok.kind == DOT:
            self.pos += 1
            node = concat(node, self.factor())
        return node

    def factor(self) -> AttackExpr:
        node = self.atom()
        if (tok := self.peek()) is not None and tok.kind == STAR:
            self.pos += 1
            node = star(node)
        return node

    def atom(self) -> AttackExpr:
        tok = self.peek()
        if tok is None:
            raise self.fail("expected a block or '('", frozenset({BLOCK_OPEN, LPAREN}))
        if tok.kind == BLOCK_OPEN:
            self.pos += 1  # bb_
            self.expect(IDENT)
            self.expect(LPAREN)
            text = self.expect(TEXT)
            self.expect(RPAREN)
            return block(text.text)
        if tok.kind == LPAREN:
            open_tok = tok
            self.pos += 1
            node = self.expr()
            closing = self.peek()
            if closing is None or closing.kind != RPAREN:
                raise UnbalancedParens("unclosed group", open_tok.start)
            self.pos += 1
            return node
        raise self.fail(f"unexpected {tok.kind!r}", frozenset({BLOCK_OPEN, LPAREN}))


def parse_expression(src: str) -> AttackExpr:
    return _Parser(src, tokenize(src)).parse()


# Rendering uses minimal parentheses.  Right-nested unions/concats are
# parenthesized so that parse(render(ast)) reproduces the ast exactly
# (the parser is left-associative).
_PREC = {UnionExpr: 0, Concat: 1, Star: 2, Block: 3}


def render_expression(expr: AttackExpr) -> str:
    counter = [0]

    def walk(node: AttackExpr, min_prec: int) -> str:
        prec = _PREC[type(node)]
        if isinstance(node, Block):
            counter[0] += 1
            text = f"bb_{counter[0]}({node.description})"
        elif isinstance(node, Star):
            text = walk(node.inner, 3) + "*"
        elif isinstance(node, Concat):
            text = walk(node.left, 1) + "." + walk(node.right, 2)
        else:
            text = walk(node.left, 0) + "+" + walk(node.right, 1)
        if prec < min_prec:
            return "(" + text + ")"
        return text

    return walk(expr, 0)
