"""Unit tests for ``quantikit/core/qdist.py``.

Distributors, their composition and graphs, the presheaf category PX with
its Yoneda embedding, and the Kan pull-back along a distributor.
"""
from __future__ import annotations

import pytest

from quantikit.core.errors import BimoduleViolation, SizeCap, TypeMismatch
from quantikit.core.qcat import QFunctor, validate_functor
from quantikit.core.qdist import (
    Presheaf,
    QDistributor,
    compose_distributors,
    dist_leq,
    enumerate_presheaves,
    functor_star,
    graphs,
    identity_distributor,
    kan_star,
    presheaf_bound,
    presheaf_category,
    pull_back,
    transpose,
    transpose_at,
    validate_distributor,
    validate_presheaf,
    yoneda,
)

pytestmark = pytest.mark.unit


@pytest.fixture
def point_two(two, make_cat):
    return make_cat(two, ["p"], name="point")


class TestDistributors:
    def test_identity_distributor_validates(self, arrow_two):
        validate_distributor(identity_distributor(arrow_two))

    def test_right_action_violation(self, point_two, arrow_two):
        phi = QDistributor(point_two, arrow_two, {("p", "x"): "1", ("p", "y"): "0"})
        with pytest.raises(BimoduleViolation) as excinfo:
            validate_distributor(phi)
        assert excinfo.value.witness["quadruple"] == ["p", "p", "x", "y"]

    def test_missing_value(self, point_two, arrow_two):
        with pytest.raises(TypeMismatch):
            validate_distributor(QDistributor(point_two, arrow_two, {("p", "x"): "0"}))

    def test_identity_is_neutral_for_composition(self, point_two, arrow_two):
        phi = validate_distributor(QDistributor(point_two, arrow_two, {("p", "x"): "0", ("p", "y"): "1"}))
        assert compose_distributors(identity_distributor(arrow_two), phi).value == phi.value
        assert compose_distributors(phi, identity_distributor(point_two)).value == phi.value

    def test_composition_needs_matching_middle(self, point_two, arrow_two):
        phi = QDistributor(point_two, arrow_two, {("p", "x"): "0", ("p", "y"): "1"})
        with pytest.raises(TypeMismatch):
            compose_distributors(phi, phi)

    def test_graphs_of_a_functor(self, point_two, arrow_two):
        f = validate_functor(QFunctor(point_two, arrow_two, {"p": "x"}))
        lower, upper = graphs(f)
        assert lower.value == {("p", "x"): "1", ("p", "y"): "1"}
        assert upper.value == {("x", "p"): "1", ("y", "p"): "0"}
        validate_distributor(lower)
        validate_distributor(upper)

    def test_distributor_order(self, point_two, arrow_two):
        low = QDistributor(point_two, arrow_two, {("p", "x"): "0", ("p", "y"): "1"})
        high = QDistributor(point_two, arrow_two, {("p", "x"): "1", ("p", "y"): "1"})
        assert dist_leq(low, high)
        assert not dist_leq(high, low)


class TestPresheaves:
    def test_presheaves_on_arrow(self, arrow_two):
        names = [p.name for p in enumerate_presheaves(arrow_two)]
        assert names == ["*:[x=0,y=0]", "*:[x=1,y=0]", "*:[x=1,y=1]"]

    def test_presheaves_on_the_empty_category(self, two):
        from quantikit.core.qcat import initial

        assert [p.name for p in enumerate_presheaves(initial(two))] == ["*:[]"]

    def test_bound_is_product_of_hom_sizes(self, arrow_two):
        assert presheaf_bound(arrow_two) == 4

    def test_cap_is_enforced(self, arrow_two):
        with pytest.raises(SizeCap):
            presheaf_category(arrow_two, cap=2)

    def test_presheaf_category_homs(self, arrow_two):
        PX = presheaf_category(arrow_two)
        assert PX.category.a("*:[x=1,y=1]", "*:[x=1,y=0]") == "0"
        assert PX.category.a("*:[x=1,y=0]", "*:[x=1,y=1]") == "1"

    def test_lookup_rejects_non_presheaf(self, arrow_two):
        PX = presheaf_category(arrow_two)
        with pytest.raises(BimoduleViolation):
            PX.lookup(Presheaf(arrow_two, "*", {"x": "0", "y": "1"}))

    def test_validate_presheaf_accepts_enumerated_ones(self, arrow_two):
        for p in enumerate_presheaves(arrow_two):
            assert validate_presheaf(p) is p

    def test_validate_presheaf_reports_the_failing_pair(self, arrow_two):
        with pytest.raises(BimoduleViolation) as info:
            validate_presheaf(Presheaf(arrow_two, "*", {"x": "0", "y": "1"}))
        assert info.value.witness["pair"] == ["x", "y"]

    def test_validate_presheaf_missing_component(self, arrow_two):
        with pytest.raises(TypeMismatch):
            validate_presheaf(Presheaf(arrow_two, "*", {"x": "1"}))


class TestYoneda:
    def test_yoneda_is_fully_faithful(self, arrow_two):
        PX = presheaf_category(arrow_two)
        y = yoneda(arrow_two, PX)
        assert y.mapping == {"x": "*:[x=1,y=0]", "y": "*:[x=1,y=1]"}
        for a in arrow_two.objects:
            for b in arrow_two.objects:
                assert PX.category.a(y(a), y(b)) == arrow_two.a(a, b)

    def test_transpose_of_identity_is_yoneda(self, arrow_two):
        PX = presheaf_category(arrow_two)
        assert transpose(identity_distributor(arrow_two), PX).mapping == yoneda(arrow_two, PX).mapping

    def test_transpose_at_reads_a_column(self, point_two, arrow_two):
        phi = QDistributor(point_two, arrow_two, {("p", "x"): "0", ("p", "y"): "1"})
        assert transpose_at(phi, "y").components == {"p": "1"}


class TestKanStar:
    def test_pull_back_along_identity_is_identity(self, arrow_two):
        PX = presheaf_category(arrow_two)
        star = kan_star(identity_distributor(arrow_two), PX, PX)
        assert all(source == target for source, target in star.mapping.items())

    def test_pull_back_formula(self, point_two, arrow_two):
        phi = QDistributor(point_two, arrow_two, {("p", "x"): "0", ("p", "y"): "1"})
        psi = Presheaf(arrow_two, "*", {"x": "1", "y": "0"})
        assert pull_back(phi, psi).components == {"p": "0"}

    def test_functor_star_is_precomposition(self, point_two, arrow_two):
        f = validate_functor(QFunctor(point_two, arrow_two, {"p": "y"}))
        star = functor_star(f)
        validate_functor(star)
        assert star.mapping["*:[x=1,y=0]"] == "*:[p=0]"
