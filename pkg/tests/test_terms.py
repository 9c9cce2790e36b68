import itertools

import pytest
from hypothesis import given, strategies as st

from relalg import build_lpn
from relalg.errors import ParseError, ResourceBudgetError
from relalg.terms import (
    Comp,
    Const,
    Conv,
    Equation,
    Join,
    Meet,
    Not,
    Var,
    equation_length,
    eval_term,
    falsify,
    parse,
    parse_equation,
    parse_term,
    print_equation,
    print_term,
    variables,
)


def test_parse_identity_law():
    eq = parse("x1 ; e = x1")
    assert eq == Equation(Comp(Var(1), Const("e")), Var(1))


def test_parse_de_morgan():
    eq = parse("-(x1 + x2) = -x1 & -x2")
    assert eq == Equation(
        Not(Join(Var(1), Var(2))), Meet(Not(Var(1)), Not(Var(2)))
    )


def test_parse_triangle_law_shape():
    eq = parse("x1~ ; -(x1 ; x2) + -x2 = -x2")
    assert eq == Equation(
        Join(Comp(Conv(Var(1)), Not(Comp(Var(1), Var(2)))), Not(Var(2))),
        Not(Var(2)),
    )


def test_precedence_loosest_to_tightest():
    # + is loosest, then &, then ;
    t = parse_term("x1+x2&x3;x4")
    assert t == Join(Var(1), Meet(Var(2), Comp(Var(3), Var(4))))


def test_unary_binding():
    assert parse_term("-x1~") == Not(Conv(Var(1)))
    assert parse_term("(-x1)~") == Conv(Not(Var(1)))
    assert parse_term("x1~~") == Conv(Conv(Var(1)))
    assert parse_term("--x1") == Not(Not(Var(1)))


def test_parse_errors_carry_positions():
    with pytest.raises(ParseError) as err:
        parse_term("x1 + ")
    assert err.value.position == 5
    with pytest.raises(ParseError):
        parse_term("(x1")
    with pytest.raises(ParseError):
        parse_term("x0")
    with pytest.raises(ParseError):
        parse_equation("x1 + x2")
    with pytest.raises(ParseError):
        parse_term("x1 ? x2")


@pytest.mark.parametrize(
    "canonical",
    [
        "x1;e = x1",
        "-(x1+x2) = -x1&-x2",
        "x1~;-(x1;x2)+-x2 = -x2",
        "(x1+x2)&x3 = x1&x3+x2&x3",
        "x1;(x2;x3) = x1;x2;x3",
        "(-x1)~ = -x1~",
        "0+1&e = e",
    ],
)
def test_print_parse_round_trip_on_canonical_strings(canonical):
    assert print_equation(parse_equation(canonical)) == canonical


_terms = st.deferred(
    lambda: st.one_of(
        st.integers(min_value=1, max_value=3).map(Var),
        st.sampled_from(["0", "1", "e"]).map(Const),
        _terms.map(Not),
        _terms.map(Conv),
        st.tuples(_terms, _terms).map(lambda lr: Join(*lr)),
        st.tuples(_terms, _terms).map(lambda lr: Meet(*lr)),
        st.tuples(_terms, _terms).map(lambda lr: Comp(*lr)),
    )
)


@given(_terms)
def test_parse_print_round_trip_on_asts(t):
    assert parse_term(print_term(t)) == t


@given(_terms, _terms)
def test_equation_round_trip(lhs, rhs):
    eq = Equation(lhs, rhs)
    assert parse_equation(print_equation(eq)) == eq


def test_equation_length_examples():
    assert equation_length(parse_equation("(x1+x2)&x3 = x1&x3 + x2&x3")) == 12
    assert equation_length(parse_equation("x1 = x1")) == 2
    # constants count as operation symbols, '=' does not: x1, ;, e | x1
    assert equation_length(parse_equation("x1;e = x1")) == 4
    assert equation_length(parse_equation("x1~ = -0")) == 4


# -- evaluation ----------------------------------------------------------------


def test_eval_examples(l32):
    a0 = l32.parse_element("a0")
    t1 = l32.parse_element("t1")
    assert eval_term(parse_term("x1;e"), l32, {1: a0}) == a0
    assert eval_term(parse_term("x1;x1"), l32, {1: t1}) == l32.parse_element(
        "1'+a0+a1+a2+a3"
    )
    with pytest.raises(ValueError):
        eval_term(parse_term("x1;x2"), l32, {1: a0})


@given(_terms, st.data())
def test_eval_is_homomorphic_in_structure(t, data):
    alg = build_lpn(3, 1)
    vs = sorted(variables(t)) or [1]
    asg = {
        v: alg.element(data.draw(st.integers(min_value=0, max_value=alg.top_mask)))
        for v in vs
    }
    if isinstance(t, (Join, Meet, Comp)):
        left = eval_term(t.left, alg, asg)
        right = eval_term(t.right, alg, asg)
        whole = eval_term(t, alg, asg)
        op = {Join: "join", Meet: "meet", Comp: "compose"}[type(t)]
        assert whole == getattr(left, op)(right)
    elif isinstance(t, Not):
        assert eval_term(t, alg, asg) == ~eval_term(t.arg, alg, asg)
    elif isinstance(t, Conv):
        assert eval_term(t, alg, asg) == eval_term(t.arg, alg, asg).converse()


@given(st.data())
def test_eval_absorbs_into_generated_subalgebra(data):
    # assignments into a generated subalgebra evaluate inside it
    from relalg import generate_subalgebra

    alg = build_lpn(3, 2)
    gen = alg.element(data.draw(st.integers(min_value=1, max_value=alg.top_mask)))
    sub = generate_subalgebra(alg, [gen])
    masks = sorted(sub.element_masks())
    t = data.draw(_terms)
    asg = {
        v: alg.element(masks[data.draw(st.integers(min_value=0, max_value=len(masks) - 1))])
        for v in sorted(variables(t)) or [1]
    }
    assert sub.contains(eval_term(t, alg, asg))


# -- falsification -------------------------------------------------------------


def test_falsify_first_witness_is_frozen(l32):
    # scan order: elements by increasing bitset value; masks 0 (zero) and
    # 1 (identity) satisfy x;x = x, mask 2 (a0) is the first failure
    res = falsify(parse_equation("x1;x1 = x1"), l32)
    assert res.falsified
    assert res.assignment[1] == l32.parse_element("a0")
    assert res.tried == 3


def test_falsify_axioms_valid(l32):
    assert falsify(parse_equation("x1;e = x1"), l32).status == "valid"
    l41 = build_lpn(4, 1)
    assert falsify(parse_equation("x1+x2 = x2+x1"), l41).status == "valid"


def test_falsify_budget_error(l32):
    with pytest.raises(ResourceBudgetError):
        falsify(parse_equation("x1;x2;x3;x4 = x4;x3;x2;x1"), l32)


def test_falsify_random_mode_deterministic(l32):
    eq = parse_equation("x1;x1 = x1")
    a = falsify(eq, l32, mode="random", seed=11, trials=50)
    b = falsify(eq, l32, mode="random", seed=11, trials=50)
    assert a.assignment == b.assignment and a.tried == b.tried
    valid = falsify(parse_equation("x1;e = x1"), l32, mode="random", seed=3, trials=20)
    assert valid.status == "unknown"


def _nested_loop_oracle(eq, alg):
    """Independent exhaustive check by plain nested loops over Elements."""
    vs = sorted(variables(eq))
    for combo in itertools.product(range(alg.top_mask + 1), repeat=len(vs)):
        asg = {v: alg.element(m) for v, m in zip(vs, combo)}
        if eval_term(eq.lhs, alg, asg) != eval_term(eq.rhs, alg, asg):
            return dict(zip(vs, combo))
    return None


@given(_terms, _terms)
def test_falsify_matches_nested_loop_oracle(lhs, rhs):
    alg = build_lpn(3, 0)
    eq = Equation(lhs, rhs)
    if len(variables(eq)) > 2:
        return  # keep the oracle affordable
    res = falsify(eq, alg)
    oracle = _nested_loop_oracle(eq, alg)
    if oracle is None:
        assert res.status == "valid"
    else:
        assert res.falsified
        assert {v: e.bits for v, e in res.assignment.items()} == oracle
