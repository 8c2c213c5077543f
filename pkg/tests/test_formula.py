import random

import pytest
from hypothesis import given, strategies as st

from sheafforcing import formula as F


def test_parse_precedence():
    phi = F.parse("a in b and b in c -> not a = c or c : set")
    assert isinstance(phi, F.Implies)
    assert isinstance(phi.left, F.And)
    assert isinstance(phi.right, F.Or) and isinstance(phi.right.left, F.Not)


def test_implication_is_right_associative():
    phi = F.parse("a = a -> b = b -> c = c")
    assert isinstance(phi.right, F.Implies)


def test_unicode_aliases():
    assert F.parse("∀x. x ∈ b → ¬ x = a") == F.parse("forall x . x in b -> not x = a")


def test_bounded_quantifiers_parse():
    phi = F.parse("forall x in b . exists y in x . y = a")
    assert isinstance(phi, F.BoundedForall) and isinstance(phi.body, F.BoundedExists)
    assert F.free_vars(phi) == {"a", "b"}


@pytest.mark.parametrize("bad", ["a =", "forall . a = a", "(a = a", "a in", "a = a b"])
def test_syntax_errors(bad):
    with pytest.raises(F.FormulaSyntaxError):
        F.parse(bad)


def test_free_variable_restriction():
    with pytest.raises(F.UnboundVariableError):
        F.parse("a in b", free=["a"])


@given(st.integers(0, 2**32), st.integers(0, 5))
def test_print_parse_roundtrip(seed, depth):
    phi = F.random_delta0(random.Random(seed), ("a", "b", "c"), depth)
    assert F.parse(F.to_text(phi)) == phi
    assert F.depth(phi) <= depth and F.is_delta0(phi)
    assert F.free_vars(phi) <= {"a", "b", "c"}


@given(st.integers(0, 2**32))
def test_desugar_removes_bounded_quantifiers(seed):
    phi = F.random_delta0(random.Random(seed), ("a", "b"), 4)
    d = F.desugar(phi)
    assert F.free_vars(d) == F.free_vars(phi)

    def has_bounded(p):
        if isinstance(p, F.BOUNDED):
            return True
        if isinstance(p, F.BINARY):
            return has_bounded(p.left) or has_bounded(p.right)
        if isinstance(p, (F.Not,) + F.QUANT):
            return has_bounded(p.body)
        return False
    assert not has_bounded(d)


def test_desugar_avoids_capture():
    phi = F.BoundedForall("x", "x", F.Mem("x", "a"))
    d = F.desugar(phi)
    assert F.free_vars(d) == {"x", "a"}


def test_suites_have_the_required_sizes():
    assert len(F.tautology_suite()) >= 20
    assert len(F.non_theorem_suite()) >= 3


def test_axiom_instances_are_sentences():
    for ax in F.axiom_schedule():
        assert F.free_vars(ax.formula) <= set(dict(ax.params)), ax.name
