"""Unit tests for ``quantikit/core/qcat.py``."""
from __future__ import annotations

import itertools

import pytest

from quantikit.core import qcat
from quantikit.core.errors import BadParameter, ReflexivityViolation, SizeCap, TransitivityViolation, TypeMismatch
from quantikit.core.qcat import (
    QFunctor,
    coequalizer,
    coproduct,
    enumerate_functors,
    equalizer,
    free_structure,
    functor_leq,
    initial,
    is_partial_metric,
    make_category,
    opposite_category,
    partial_metric_category,
    product,
    terminal,
    total_part,
    validate_category,
    validate_functor,
)
from quantikit.core.quantaloid import QUANTALE_OBJECT, DiagonalConstruction, diagonal

pytestmark = pytest.mark.unit

Q_ = QUANTALE_OBJECT

X1_HOM = {("a", "b"): "1", ("b", "a"): "2", ("b", "c"): "2", ("c", "b"): "1", ("a", "c"): "3", ("c", "a"): "3"}
X2_HOM = {("p", "q"): "2", ("q", "p"): "4"}

PM_POINTS = ["p", "q", "r"]
PM_DISTANCE = {
    ("p", "p"): 1, ("q", "q"): 2, ("r", "r"): 0,
    ("p", "q"): 3, ("q", "p"): 3, ("r", "p"): 2, ("p", "r"): 2, ("r", "q"): 3, ("q", "r"): 3,
}


class TestValidateCategory:
    def test_reflexivity_violation(self, chain5):
        X = make_category(chain5, ["x"], {"x": Q_}, {("x", "x"): "1"})
        with pytest.raises(ReflexivityViolation):
            validate_category(X)

    def test_transitivity_violation_reports_triple(self, two):
        objects = ["x", "y", "z"]
        hom = {(a, b): ("1" if a == b else "0") for a in objects for b in objects}
        hom.update({("x", "y"): "1", ("y", "z"): "1"})
        with pytest.raises(TransitivityViolation) as excinfo:
            validate_category(make_category(two, objects, {o: Q_ for o in objects}, hom))
        assert excinfo.value.witness["triple"] == ["x", "y", "z"]

    def test_value_outside_hom_lattice(self, two):
        X = make_category(two, ["x"], {"x": Q_}, {("x", "x"): "7"})
        with pytest.raises(TypeMismatch):
            validate_category(X)

    def test_duplicate_objects(self, two):
        X = make_category(two, ["x", "x"], {"x": Q_}, {("x", "x"): "1"})
        with pytest.raises(BadParameter):
            validate_category(X)

    def test_unknown_structure_mode(self, two):
        with pytest.raises(BadParameter):
            free_structure("chaotic", two, {"x": Q_})


class TestEnumerateFunctors:
    def test_empty_source_has_one_functor(self, two, arrow_two):
        assert len(enumerate_functors(initial(two), arrow_two)) == 1

    def test_monotone_maps_on_arrow(self, arrow_two):
        maps = [f.mapping for f in enumerate_functors(arrow_two, arrow_two)]
        assert maps == [{"x": "x", "y": "x"}, {"x": "x", "y": "y"}, {"x": "y", "y": "y"}]

    def test_extent_mismatch_gives_nothing(self, two):
        D = diagonal(two).quantaloid
        X = validate_category(make_category(D, ["a"], {"a": "1"}, {("a", "a"): "1"}))
        Y = validate_category(make_category(D, ["b"], {"b": "0"}, {("b", "b"): "0"}))
        assert enumerate_functors(X, Y) == []

    def test_source_cap(self, arrow_two, monkeypatch):
        monkeypatch.setattr(qcat.Settings, "FUNCTOR_SOURCE_CAP", 1)
        with pytest.raises(SizeCap):
            enumerate_functors(arrow_two, arrow_two)

    def test_every_enumerated_map_validates(self, arrow_two):
        for f in enumerate_functors(arrow_two, arrow_two):
            validate_functor(f)


class TestLimits:
    def test_product_realizes_sup_metric(self, chain5, make_cat):
        X1 = make_cat(chain5, ["a", "b", "c"], X1_HOM)
        X2 = make_cat(chain5, ["p", "q"], X2_HOM)
        cone = product([X1, X2])
        P = validate_category(cone.apex)
        assert len(P) == 6
        first, second = cone.legs
        for u, v in itertools.product(P.objects, repeat=2):
            expected = max(int(X1.a(first(u), first(v))), int(X2.a(second(u), second(v))))
            assert P.a(u, v) == str(expected)

    def test_product_legs_are_functors(self, chain5, make_cat):
        cone = product([make_cat(chain5, ["a", "b", "c"], X1_HOM), make_cat(chain5, ["p", "q"], X2_HOM)])
        for leg in cone.legs:
            validate_functor(leg)

    def test_terminal_is_top_on_objects_of_q(self, two):
        T = terminal(two)
        assert T.objects == ("()@*",)
        assert T.a("()@*", "()@*") == "1"

    def test_coproduct_cross_homs_are_bottom(self, two, arrow_two, make_cat):
        point = make_cat(two, ["p"])
        C = validate_category(coproduct([arrow_two, point]).apex)
        assert C.a("0:x", "0:y") == "1"
        assert C.a("0:x", "1:p") == "0"
        assert C.a("1:p", "0:y") == "0"

    def test_initial_is_empty(self, two):
        assert len(initial(two)) == 0

    def test_equalizer_keeps_agreeing_points(self, arrow_two):
        identity = QFunctor(arrow_two, arrow_two, {"x": "x", "y": "y"})
        const = QFunctor(arrow_two, arrow_two, {"x": "x", "y": "x"})
        cone = equalizer(identity, const)
        assert cone.apex.objects == ("x",)
        validate_functor(cone.legs[0])

    def test_coequalizer_of_identity_and_constant_collapses(self, arrow_two):
        identity = QFunctor(arrow_two, arrow_two, {"x": "x", "y": "y"})
        const = QFunctor(arrow_two, arrow_two, {"x": "x", "y": "x"})
        cone = coequalizer(identity, const)
        assert cone.apex.objects == ("{x,y}",)
        assert cone.apex.a("{x,y}", "{x,y}") == "1"

    def test_coequalizer_hom_is_closure_of_class_joins(self, chain5, make_cat):
        X1 = make_cat(chain5, ["a", "b", "c"], X1_HOM)
        point = make_cat(chain5, ["o"])
        to_b = QFunctor(point, X1, {"o": "b"})
        to_c = QFunctor(point, X1, {"o": "c"})
        cone = coequalizer(to_b, to_c)
        quotient = validate_category(cone.apex)
        assert quotient.objects == ("a", "{b,c}")
        assert quotient.a("a", "{b,c}") == "1"
        assert quotient.a("{b,c}", "a") == "2"
        assert quotient.a("{b,c}", "{b,c}") == "0"
        validate_functor(cone.legs[0])

    def test_parallel_check(self, arrow_two, two, make_cat):
        point = make_cat(two, ["p"])
        f = QFunctor(arrow_two, arrow_two, {"x": "x", "y": "y"})
        g = QFunctor(point, arrow_two, {"p": "x"})
        with pytest.raises(TypeMismatch):
            equalizer(f, g)

    def test_coequalizer_closes_chains_through_glued_classes(self, two, make_cat):
        Y = make_cat(two, ["x", "y", "z", "w"], {("x", "y"): "1", ("z", "w"): "1"})
        point = make_cat(two, ["p"])
        cone = coequalizer(QFunctor(point, Y, {"p": "y"}), QFunctor(point, Y, {"p": "z"}))
        assert cone.apex.objects == ("x", "{y,z}", "w")
        assert cone.apex.a("x", "w") == "1"
        assert cone.apex.a("w", "x") == "0"

    def test_coequalizer_iteration_bound_is_a_size_cap(self, two, make_cat, monkeypatch):
        monkeypatch.setattr(qcat, "fixpoint_bound", lambda Q, classes: 0)
        Y = make_cat(two, ["x", "y", "z", "w"], {("x", "y"): "1", ("z", "w"): "1"})
        point = make_cat(two, ["p"])
        with pytest.raises(SizeCap) as excinfo:
            coequalizer(QFunctor(point, Y, {"p": "y"}), QFunctor(point, Y, {"p": "z"}))
        assert excinfo.value.witness["bound"] == 0
        assert excinfo.value.witness["classes"] == 3


class TestFreeStructures:
    def test_every_map_out_of_discrete_is_a_functor(self, two, arrow_two):
        D = free_structure("discrete", two, {"x": Q_, "y": Q_})
        functors = enumerate_functors(D, arrow_two)
        assert len(functors) == 4
        for f in functors:
            for u, v in itertools.product(D.objects, repeat=2):
                assert two.leq(Q_, Q_, D.a(u, v), arrow_two.a(f(u), f(v)))

    def test_every_map_into_indiscrete_is_a_functor(self, two, arrow_two):
        indiscrete = free_structure("indiscrete", two, {"x": Q_, "y": Q_})
        assert len(enumerate_functors(arrow_two, indiscrete)) == 4

    def test_discrete_target_only_admits_constant_maps_from_the_arrow(self, two, arrow_two):
        D = free_structure("discrete", two, {"x": Q_, "y": Q_})
        maps = [f.mapping for f in enumerate_functors(arrow_two, D)]
        assert maps == [{"x": "x", "y": "x"}, {"x": "y", "y": "y"}]

    def test_discrete_hom_is_identity_on_the_diagonal(self, chain5):
        D = free_structure("discrete", chain5, {"x": Q_, "y": Q_})
        assert D.a("x", "x") == chain5.identity(Q_)
        assert D.a("x", "y") == chain5.bottom(Q_, Q_)


class TestOrderAndOpposite:
    def test_functor_order(self, arrow_two):
        identity = QFunctor(arrow_two, arrow_two, {"x": "x", "y": "y"})
        const_y = QFunctor(arrow_two, arrow_two, {"x": "y", "y": "y"})
        assert functor_leq(identity, const_y)
        assert not functor_leq(const_y, identity)

    def test_opposite_category_reverses_homs(self, arrow_two):
        op = validate_category(opposite_category(arrow_two))
        assert op.a("y", "x") == "1"
        assert op.a("x", "y") == "0"


class TestPartialMetrics:
    def test_fixture_distance_is_a_partial_metric(self):
        assert is_partial_metric(PM_POINTS, PM_DISTANCE, 5)

    def test_self_distance_larger_than_distance_is_rejected(self):
        distance = {("x", "x"): 3, ("x", "y"): 1, ("y", "x"): 1, ("y", "y"): 0}
        assert not is_partial_metric(["x", "y"], distance, 5)

    def test_partial_metric_category_over_diagonal(self, chain5):
        construction = diagonal(chain5)
        X = validate_category(partial_metric_category(construction, PM_POINTS, PM_DISTANCE))
        assert X.extent == {"p": "1", "q": "2", "r": "0"}
        assert X.a("p", "p") == "1"

    def test_total_part_keeps_zero_self_distance(self, chain5):
        construction = diagonal(chain5)
        X = partial_metric_category(construction, PM_POINTS, PM_DISTANCE)
        total = validate_category(total_part(X, construction))
        assert total.objects == ("r",)
        assert total.quantaloid is chain5

    def test_total_part_needs_matching_quantaloid(self, chain5, make_cat):
        with pytest.raises(TypeMismatch):
            total_part(make_cat(chain5, ["a"]), diagonal(chain5))

    def test_partial_metric_needs_a_quantale(self, two):
        D = diagonal(two).quantaloid
        construction = DiagonalConstruction(quantaloid=D, base=D, arrow_of={}, embedding={})
        with pytest.raises(BadParameter):
            partial_metric_category(construction, ["x"], {("x", "x"): 0})
