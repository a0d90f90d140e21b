"""Unit tests for ``quantikit/core/qchu.py``.

Chu transforms and their validation, QChu (co)limits, the dom-initial
lifting, the generating family and the constructive separator.
"""
from __future__ import annotations

import pytest

from quantikit.core.errors import BadParameter, ChuViolation, NotACone, NotDistinct, TypeMismatch
from quantikit.core.qcat import QFunctor, product
from quantikit.core.qchu import (
    ChuDiagram,
    ChuTransform,
    chu_coequalizer,
    chu_coproduct,
    chu_equalizer,
    chu_product,
    compose_chu,
    dom_initial_lift,
    generator_family,
    identity_chu,
    separate,
    validate_chu_transform,
)
from quantikit.serialization.bundle import load_bundle
from quantikit.serialization.report import canonical_json, to_report

pytestmark = pytest.mark.unit


@pytest.fixture
def bundle(fixtures_dir):
    return load_bundle(str(fixtures_dir / "two.json"))


@pytest.fixture
def chu(bundle):
    return bundle.chu_objects


class TestChuTransforms:
    def test_fixture_transforms_validate(self, bundle):
        for t in bundle.transforms.values():
            validate_chu_transform(t)

    def test_chu_condition_violation_reports_pair(self, bundle, chu):
        ev = chu["ev"]
        bad = ChuTransform(ev, ev, bundle.functors["idP"], bundle.functors["cx"])
        with pytest.raises(ChuViolation) as excinfo:
            validate_chu_transform(bad)
        assert excinfo.value.witness["x"] == "p"
        assert excinfo.value.witness["z"] == "y"

    def test_forward_part_with_wrong_domain(self, bundle, chu):
        homA = chu["homA"]
        with pytest.raises(TypeMismatch):
            validate_chu_transform(ChuTransform(homA, homA, bundle.functors["px"], bundle.functors["idA"]))

    def test_composition_of_constant_pair(self, bundle):
        homA_c = bundle.transforms["homA_c"]
        assert compose_chu(homA_c, homA_c).same_as(homA_c)

    def test_identity_is_neutral(self, bundle, chu):
        homA_c = bundle.transforms["homA_c"]
        identity = identity_chu(chu["homA"])
        assert compose_chu(homA_c, identity).same_as(homA_c)
        assert compose_chu(identity, homA_c).same_as(homA_c)


class TestChuLimits:
    def test_product_swaps_product_and_coproduct(self, chu):
        cone = chu_product([chu["homA"], chu["pt"]])
        phi = cone.apex
        assert len(phi.domain) == 2
        assert phi.codomain.objects == ("0:x", "0:y", "1:p")
        assert phi("(y,p)@*", "0:x") == "0"
        assert phi("(x,p)@*", "1:p") == "1"
        assert [leg.name for leg in cone.legs] == ["pi0", "pi1"]

    def test_coproduct_swaps_coproduct_and_product(self, chu):
        cone = chu_coproduct([chu["homA"], chu["pt"]])
        phi = cone.apex
        assert phi.domain.objects == ("0:x", "0:y", "1:p")
        assert len(phi.codomain) == 2

    def test_empty_product_needs_a_quantaloid(self, two):
        with pytest.raises(BadParameter):
            chu_product([])

    def test_empty_product_is_terminal_to_initial(self, two):
        phi = chu_product([], two).apex
        assert phi.domain.objects == ("()@*",)
        assert len(phi.codomain) == 0

    def test_equalizer_of_identity_and_constant_pair(self, bundle):
        cone = chu_equalizer(bundle.transforms["homA_id"], bundle.transforms["homA_c"])
        assert cone.apex.domain.objects == ("x",)
        assert cone.apex.codomain.objects == ("{x,y}",)
        assert cone.apex("x", "{x,y}") == "1"

    def test_coequalizer_of_identity_and_constant_pair(self, bundle):
        cone = chu_coequalizer(bundle.transforms["homA_id"], bundle.transforms["homA_c"])
        assert cone.apex.domain.objects == ("{x,y}",)
        assert cone.apex.codomain.objects == ("y",)
        assert cone.apex("{x,y}", "y") == "1"

    def test_equalizer_needs_parallel_pair(self, bundle):
        with pytest.raises(TypeMismatch):
            chu_equalizer(bundle.transforms["homA_id"], bundle.transforms["top_id"])


class TestDomInitialLift:
    def test_discrete_diagram_reproduces_product(self, bundle, chu):
        diagram = bundle.diagrams["pair"]
        domains = product([chu["homA"].domain, chu["pt"].domain], bundle.quantaloid)
        lift = dom_initial_lift(diagram, domains.apex, {"homA": domains.legs[0], "pt": domains.legs[1]})
        expected = chu_product([chu["homA"], chu["pt"]]).apex
        assert canonical_json(to_report(lift.apex)) == canonical_json(to_report(expected))

    def test_empty_diagram_gives_distributor_into_empty(self, bundle):
        cone = bundle.cones["none"]
        lift = dom_initial_lift(bundle.diagrams["nothing"], cone.apex, cone.legs)
        assert lift.apex.domain.objects == ("p",)
        assert len(lift.colimit) == 0
        assert lift.apex.dist.value == {}

    def test_identity_cone_on_a_singleton_diagram(self, bundle, chu):
        homA = chu["homA"]
        diagram = ChuDiagram({"homA": homA}, {}, bundle.quantaloid)
        lift = dom_initial_lift(diagram, homA.domain, {"homA": bundle.functors["idA"]})
        delta = lift.legs["homA"].bwd
        for x in homA.domain.objects:
            for y in homA.codomain.objects:
                assert lift.apex(x, delta(y)) == homA(x, y)

    def test_arrow_glues_the_codomains(self, bundle):
        cone = bundle.cones["loopP"]
        lift = dom_initial_lift(bundle.diagrams["loop"], cone.apex, cone.legs)
        assert lift.colimit.objects == ("{0:x,0:y}",)
        assert lift.apex("p", "{0:x,0:y}") == "1"
        assert set(lift.debug) == {"kappa", "gamma_star", "delta", "transpose"}

    def test_missing_leg_is_not_a_cone(self, bundle):
        cone = bundle.cones["pairP"]
        with pytest.raises(NotACone):
            dom_initial_lift(bundle.diagrams["pair"], cone.apex, {"homA": cone.legs["homA"]})

    def test_non_commuting_legs_are_not_a_cone(self, bundle):
        diagram = bundle.diagrams["loop"]
        A = bundle.categories["A"]
        P = bundle.categories["P"]
        to_y = QFunctor(P, A, {"p": "y"})
        with pytest.raises(NotACone) as excinfo:
            dom_initial_lift(diagram, P, {"homA": to_y})
        assert excinfo.value.witness == {"arrow": "homA_c", "object": "p"}


class TestGeneratorFamily:
    def test_default_members(self, two):
        family = generator_family(two)
        assert sorted(family.members) == ["eta:*", "lambda:*"]
        assert len(family.doubled) == 4
        assert len(family.cogenerators["*"]) == 2

    def test_alternative_members(self, two):
        family = generator_family(two, "alternative")
        assert sorted(family.members) == ["lambda:*", "lambda:∅"]

    def test_unknown_mode(self, two):
        with pytest.raises(BadParameter):
            generator_family(two, "dual")

    def test_chain_family_builds(self, chain3):
        family = generator_family(chain3)
        assert len(family.doubled) == 2 * 4


class TestSeparate:
    def test_empty_domain_uses_cogenerator(self, bundle):
        result = separate(bundle.transforms["void_id"], bundle.transforms["void_swap"])
        assert result.case == 1
        assert result.generator == "eta:*"

    def test_empty_domain_in_alternative_mode(self, bundle):
        result = separate(bundle.transforms["void_id"], bundle.transforms["void_swap"], mode="alternative")
        assert result.case == 1
        assert result.generator == "lambda:∅"

    def test_forward_parts_differ(self, bundle):
        result = separate(bundle.transforms["homA_id"], bundle.transforms["homA_c"])
        assert result.case == 2
        assert result.generator == "lambda:*"
        assert result.morphism.fwd.mapping == {"*": "y"}

    def test_only_backward_parts_differ(self, bundle):
        result = separate(bundle.transforms["top_id"], bundle.transforms["top_swap"])
        assert result.case == 3
        t1, t2 = bundle.transforms["top_id"], bundle.transforms["top_swap"]
        assert not compose_chu(t1, result.morphism).same_as(compose_chu(t2, result.morphism))

    def test_equal_transforms_are_rejected(self, bundle):
        with pytest.raises(NotDistinct):
            separate(bundle.transforms["homA_id"], bundle.transforms["homA_id"])
