import numpy as np
import pytest

from kernelplan.errors import KindError, ParseError, UnboundNameError
from kernelplan.expr import (
    Binary,
    BinOp,
    Func,
    FuncId,
    MatLeaf,
    ScalarLeaf,
    VecLeaf,
    build_add,
    build_scalmul,
)
from kernelplan.kernels import Workspace
from kernelplan.lower import Mode, render_statement
from kernelplan.parser import TokenKind, parse_statement, tokenize
from kernelplan.randomstmt import iter_cases


@pytest.fixture
def env():
    ws = Workspace()
    for name in ("x", "y", "a", "b", "u1"):
        ws.bind_vector(name, np.ones(4))
    ws.bind_matrix("A", np.ones((4, 4)))
    for name in ("c", "c1"):
        ws.bind_scalar(name, 0.5)
    return ws


class TestTokenize:
    def test_plus_equals_statement(self):
        kinds = [t.kind for t in tokenize("y += c*x")]
        assert kinds == [TokenKind.IDENT, TokenKind.PLUSEQ, TokenKind.IDENT,
                         TokenKind.STAR, TokenKind.IDENT]

    def test_prefix_of_call(self):
        toks = tokenize("sin(")
        assert [(t.kind, t.text) for t in toks] == \
            [(TokenKind.IDENT, "sin"), (TokenKind.LPAREN, "(")]

    def test_invalid_character_column(self):
        with pytest.raises(ParseError, match="column 3") as err:
            tokenize("y $ x")
        assert err.value.pos == 3

    def test_columns_strictly_increase(self):
        toks = tokenize("y = a + 2.5*b - cos(x)")
        positions = [t.pos for t in toks]
        assert positions == sorted(set(positions))

    def test_numbers_with_exponents(self):
        toks = tokenize("x = 1e-3*a + 2.25*b")
        nums = [t.text for t in toks if t.kind is TokenKind.NUMBER]
        assert nums == ["1e-3", "2.25"]

    def test_malformed_number(self):
        with pytest.raises(ParseError, match="malformed number"):
            tokenize("x = 1.2.3*a")

    def test_comment_ends_scan(self):
        assert [t.text for t in tokenize("x = a # trailing note")] == \
            ["x", "=", "a"]

    def test_comma_is_a_token(self):
        assert tokenize("a, b")[1].kind is TokenKind.COMMA


class TestParse:
    def test_matvec_disambiguation(self, env):
        stmt = parse_statement("x = A*y", env)
        assert stmt == Statement_x_assign(
            Binary(BinOp.MATVEC, MatLeaf("A"), VecLeaf("y")))

    def test_scalar_product_either_order(self, env):
        left = parse_statement("x = c*y", env).rhs
        right = parse_statement("x = y*c", env).rhs
        assert left == right == Binary(BinOp.SCALMUL, ScalarLeaf("c"),
                                       VecLeaf("y"))

    def test_vector_vector_product_rejected(self, env):
        with pytest.raises(KindError, match="two vectors"):
            parse_statement("x = a*b", env)

    def test_scalar_scalar_product_rejected(self, env):
        with pytest.raises(KindError, match="two scalars"):
            parse_statement("x = c*c1*y", env)

    def test_leftmost_alias_chain_structure(self, env):
        stmt = parse_statement("y = y + c*u1 + c1*b", env)
        want = build_add(
            build_add(VecLeaf("y"), build_scalmul("c", VecLeaf("u1"))),
            build_scalmul("c1", VecLeaf("b")),
        )
        assert stmt.rhs == want

    def test_function_over_sum(self, env):
        stmt = parse_statement("x = sin(a + b + y)", env)
        assert stmt.rhs == Func(
            FuncId.SIN,
            build_add(build_add(VecLeaf("a"), VecLeaf("b")), VecLeaf("y")),
        )

    def test_precedence_star_binds_tighter(self, env):
        stmt = parse_statement("x = a + c*b", env)
        assert stmt.rhs == build_add(
            VecLeaf("a"), build_scalmul("c", VecLeaf("b")))

    def test_parens_override(self, env):
        stmt = parse_statement("x = c*(a + b)", env)
        assert stmt.rhs == build_scalmul(
            "c", build_add(VecLeaf("a"), VecLeaf("b")))

    def test_modes(self, env):
        assert parse_statement("x = a", env).mode is Mode.ASSIGN
        assert parse_statement("x += a", env).mode is Mode.PLUS_ASSIGN
        assert parse_statement("x -= a", env).mode is Mode.MINUS_ASSIGN

    def test_unknown_function(self, env):
        with pytest.raises(ParseError, match="unknown function name"):
            parse_statement("x = tan(a)", env)

    def test_unbound_identifier(self, env):
        with pytest.raises(UnboundNameError):
            parse_statement("x = a + ghost", env)

    def test_destination_must_be_vector(self, env):
        with pytest.raises(KindError, match="destination"):
            parse_statement("c = a", env)

    def test_trailing_garbage(self, env):
        with pytest.raises(ParseError, match="unexpected"):
            parse_statement("x = a b", env)

    def test_missing_rhs(self, env):
        with pytest.raises(ParseError):
            parse_statement("x =", env)

    def test_unclosed_paren(self, env):
        with pytest.raises(ParseError, match="'\\)'"):
            parse_statement("x = sin(a", env)

    def test_no_unary_minus(self, env):
        with pytest.raises(ParseError):
            parse_statement("x = -a", env)

    def test_matrix_alone_rejected(self, env):
        with pytest.raises(KindError):
            parse_statement("x = A", env)

    def test_shape_checked_eagerly(self, env):
        env.bind_vector("short", np.ones(2))
        from kernelplan.errors import ShapeError
        with pytest.raises(ShapeError):
            parse_statement("x = a + short", env)


def Statement_x_assign(rhs):
    from kernelplan.lower import Statement

    return Statement("x", Mode.ASSIGN, rhs)


def test_round_trip_random_trees():
    """render -> parse -> structurally identical, over generated cases."""
    for case in iter_cases(trials=500, max_depth=6, length=4, seed=77):
        text = render_statement(case.statement)
        reparsed = parse_statement(text, case.workspace)
        assert reparsed == case.statement, text


def test_render_then_parse_fixed_example(env):
    stmt = parse_statement("y = y + c*u1 - cos(c1*b + a)", env)
    assert parse_statement(render_statement(stmt), env) == stmt
