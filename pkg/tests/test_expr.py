import random

import pytest

from attackdag.expr import (
    EmptyBlockDescription,
    ExpressionSyntaxError,
    UnbalancedParens,
    line_col,
    parse_expression,
    render_expression,
    tokenize,
)
from attackdag.model import Block, Concat, Star, UnionExpr, block, concat, star, union


class TestTokenize:
    def test_operators_inside_description_are_literal(self):
        toks = tokenize("bb_i(a + b.c * d)")
        kinds = [t.kind for t in toks]
        assert kinds == ["bb_", "ident", "(", "text", ")"]
        assert toks[3].text == "a + b.c * d"

    def test_nested_parens_in_description(self):
        toks = tokenize("bb_i(call f(x) twice)")
        assert toks[3].text == "call f(x) twice"

    def test_whitespace_between_tokens_ignored(self):
        assert [t.kind for t in tokenize(" bb_i ( x ) * ")] == [
            "bb_", "ident", "(", "text", ")", "*",
        ]

    def test_missing_ident(self):
        with pytest.raises(ExpressionSyntaxError) as exc:
            tokenize("bb_(x)")
        assert "ident" in exc.value.expected

    def test_unclosed_description(self):
        with pytest.raises(UnbalancedParens):
            tokenize("bb_i(never closed")

    def test_blank_description(self):
        with pytest.raises(EmptyBlockDescription):
            tokenize("bb_i(   )")

    def test_stray_character(self):
        with pytest.raises(ExpressionSyntaxError) as exc:
            tokenize("bb_i(x) & bb_j(y)")
        assert exc.value.position == 8


class TestParse:
    def test_single_block(self):
        assert parse_expression("bb_i(weak password)") == Block("weak password")

    def test_precedence_union_lowest(self):
        ast = parse_expression("bb_i(a).bb_j(b)+bb_k(c)")
        assert isinstance(ast, UnionExpr)
        assert isinstance(ast.left, Concat)

    def test_star_binds_tightest(self):
        ast = parse_expression("bb_i(a).bb_j(b)*")
        assert ast == concat(block("a"), star(block("b")))

    def test_group_star(self):
        ast = parse_expression("(bb_i(a).bb_j(b))*")
        assert ast == star(concat(block("a"), block("b")))

    def test_left_associative(self):
        ast = parse_expression("bb_i(a).bb_j(b).bb_k(c)")
        assert ast == concat(concat(block("a"), block("b")), block("c"))
        ast = parse_expression("bb_i(a)+bb_j(b)+bb_k(c)")
        assert ast == union(union(block("a"), block("b")), block("c"))

    def test_identifier_is_discarded(self):
        assert parse_expression("bb_alpha(x)") == parse_expression("bb_9(x)")

    def test_unmatched_close(self):
        with pytest.raises(UnbalancedParens):
            parse_expression("bb_i(a))")

    def test_unclosed_group(self):
        with pytest.raises(UnbalancedParens):
            parse_expression("(bb_i(a)")

    def test_trailing_operator(self):
        with pytest.raises(ExpressionSyntaxError):
            parse_expression("bb_i(a).")

    def test_leading_operator(self):
        with pytest.raises(ExpressionSyntaxError):
            parse_expression("+bb_i(a)")

    def test_empty_source(self):
        with pytest.raises(ExpressionSyntaxError):
            parse_expression("   ")

    def test_double_star_rejected(self):
        # factor takes at most one star; repetition of a starred atom needs
        # an explicit group: (bb_i(a)*)*.
        with pytest.raises(ExpressionSyntaxError):
            parse_expression("bb_i(a)**")
        assert parse_expression("(bb_i(a)*)*") == star(block("a"))

    def test_error_position_points_at_failure(self):
        with pytest.raises(ExpressionSyntaxError) as exc:
            parse_expression("bb_i(a).+bb_j(b)")
        assert exc.value.position == 8


class TestRender:
    def test_explicit_dots_and_sequential_ids(self):
        ast = concat(concat(block("a"), block("b")), block("c"))
        assert render_expression(ast) == "bb_1(a).bb_2(b).bb_3(c)"

    def test_union_inside_concat_parenthesized(self):
        ast = concat(union(block("a"), block("b")), block("c"))
        assert render_expression(ast) == "(bb_1(a)+bb_2(b)).bb_3(c)"

    def test_union_inside_star_parenthesized(self):
        ast = star(union(block("a"), block("b")))
        assert render_expression(ast) == "(bb_1(a)+bb_2(b))*"

    def test_concat_inside_star_parenthesized(self):
        ast = star(concat(block("a"), block("b")))
        assert render_expression(ast) == "(bb_1(a).bb_2(b))*"

    def test_no_redundant_parens(self):
        ast = union(concat(block("a"), star(block("b"))), block("c"))
        assert render_expression(ast) == "bb_1(a).bb_2(b)*+bb_3(c)"

    def test_right_nested_concat_keeps_parens(self):
        # concat(a, concat(b, c)) must not render as a.b.c, which would
        # re-parse left-associatively into a different tree.
        ast = concat(block("a"), concat(block("b"), block("c")))
        rendered = render_expression(ast)
        assert parse_expression(rendered) == ast

    def test_right_nested_union_keeps_parens(self):
        ast = union(block("a"), union(block("b"), block("c")))
        rendered = render_expression(ast)
        assert parse_expression(rendered) == ast


def random_ast(rng: random.Random, depth: int):
    roll = rng.random()
    if depth <= 0 or roll < 0.35:
        return block(rng.choice(["alpha", "beta b", "gamma (x)", "d.e+f*", "weak password"]))
    if roll < 0.55:
        return star(random_ast(rng, depth - 1))
    left = random_ast(rng, depth - 1)
    right = random_ast(rng, depth - 1)
    return concat(left, right) if roll < 0.8 else union(left, right)


class TestRoundTrip:
    def test_parse_render_parse_random(self):
        rng = random.Random(20260819)
        for _ in range(1000):
            ast = random_ast(rng, rng.randint(0, 8))
            rendered = render_expression(ast)
            assert parse_expression(rendered) == ast

    def test_render_parse_render_idempotent(self):
        rng = random.Random(7)
        for _ in range(200):
            ast = random_ast(rng, 6)
            once = render_expression(ast)
            again = render_expression(parse_expression(once))
            assert again == once

    def test_bundled_corpus_round_trips(self, corpus):
        for record in corpus.records:
            rendered = render_expression(record.expression)
            assert parse_expression(rendered) == record.expression


class TestLineCol:
    def test_first_line(self):
        assert line_col("abc", 1) == (1, 2)

    def test_after_newline(self):
        assert line_col("ab\ncd", 3) == (2, 1)
        assert line_col("ab\ncd", 4) == (2, 2)
