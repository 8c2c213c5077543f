import pytest

from sheafforcing import formula as F
from sheafforcing.catalog import CATALOG
from sheafforcing.izfa import BOUNDED, FULL, AxiomPlan, axiom_plans, check_axiom, check_axioms

PASSING = {"pass", "rank-relative pass"}


@pytest.mark.parametrize("key", sorted(CATALOG))
def test_all_axioms_at_rank_one(key):
    records = check_axioms(CATALOG[key](), n=1)
    assert [r.axiom for r in records] == [p.name for p in axiom_plans()]
    for r in records:
        assert r.status in PASSING, (r.axiom, r.status)
        assert (r.status == "pass") == (r.kind == FULL)


@pytest.mark.parametrize("key", ["1", "2", "2'"])
def test_literal_forms_agree_at_rank_one(key):
    site = CATALOG[key]()
    for plan in axiom_plans():
        lit = check_axiom(site, plan, 1, literal=True)
        eqv = check_axiom(site, plan, 1)
        assert lit.status == eqv.status, plan.name


def test_false_sentence_is_a_sound_failure():
    site = CATALOG["2"]()
    plan = AxiomPlan("AllAtoms", FULL, F.parse("forall x . x : atom"), F.parse("forall x . x : atom"),
                     {"x": lambda eng, D, env: iter(())})
    rec = check_axiom(site, plan, 1)
    assert rec.status == "fail"
    assert all(not v.value and v.exact for _, v in rec.verdicts)


def test_unwitnessed_existential_is_only_rank_relative():
    site = CATALOG["1"]()
    phi = F.parse("exists x . x in x")
    plan = AxiomPlan("SelfMember", BOUNDED, phi, phi, {"x": lambda eng, D, env: iter(())})
    assert check_axiom(site, plan, 1).status == "rank-relative fail"


def test_budget_is_reported_not_raised():
    site = CATALOG["chain3"]()
    rec = check_axiom(site, axiom_plans()[1], 2, budget=50)
    assert rec.status == "budget"


def test_records_serialise():
    rec = check_axioms(CATALOG["1"](), n=1)[0]
    doc = rec.to_json()
    assert doc["axiom"] == "SetExistence" and doc["objects"]["*"]["value"] is True
