# quantikit/services/oracle.py
import concurrent.futures
import itertools
import logging
import time
from dataclasses import dataclass, field
from typing import Any, Callable, Dict, Iterable, List, Optional, Sequence

from quantikit.config.settings import Settings
from quantikit.core.errors import QuantikitError, SizeCap, ValidationFailure
from quantikit.core.qcat import (
    Cone,
    QCategory,
    QFunctor,
    coequalizer,
    compose_functors,
    coproduct,
    enumerate_functors,
    equalizer,
    free_structure,
    functor_leq,
    initial,
    make_category,
    product,
    validate_category,
    validate_functor,
)
from quantikit.core.qchu import (
    ChuDiagram,
    ChuObject,
    ChuTransform,
    GeneratorFamily,
    LiftResult,
    compose_chu,
    generator_family,
    separate,
    singleton,
    validate_chu_transform,
)
from quantikit.core.qdist import QDistributor, compose_distributors, dist_leq, graphs, validate_distributor
from quantikit.core.quantaloid import Quantaloid

logger = logging.getLogger(__name__)

QCAT_KINDS = ('product', 'coproduct', 'equalizer', 'coequalizer', 'terminal', 'initial')
QCHU_KINDS = ('chu-product', 'chu-coproduct', 'chu-equalizer', 'chu-coequalizer')


@dataclass
class Certificate:
    """oracle 的結果：certified 為 False 時附上反例"""
    kind: str
    certified: bool
    checked: int = 0
    counterexample: Optional[Dict[str, Any]] = None
    details: Dict[str, Any] = field(default_factory=dict)

    def to_dict(self) -> Dict[str, Any]:
        return {
            'kind': self.kind,
            'certified': self.certified,
            'checked': self.checked,
            'counterexample': self.counterexample,
            'details': self.details,
        }


@dataclass(frozen=True)
class TestSuite:
    """探針：小型 Q-category 與 Chu 物件"""
    __test__ = False

    quantaloid: Quantaloid
    categories: Dict[str, QCategory]
    chu_objects: Dict[str, ChuObject]


def build_suite(quantaloid: Quantaloid, categories: Optional[Dict[str, QCategory]] = None,
                chu_objects: Optional[Dict[str, ChuObject]] = None, defaults: bool = True) -> TestSuite:
    """
    建立探針組並檢查大小上限

    參數:
        categories / chu_objects: 額外的探針（例如來自 bundle）
        defaults: 是否加入預設探針
    """
    Q = quantaloid
    for (q, r), lattice in Q.homs.items():
        if len(lattice) > Settings.PROBE_LATTICE_CAP:
            raise SizeCap(f"hom-lattice Q({q},{r}) has {len(lattice)} elements, probe cap is "
                          f"{Settings.PROBE_LATTICE_CAP}", {'hom': [q, r], 'cap': Settings.PROBE_LATTICE_CAP})
    cats: Dict[str, QCategory] = default_categories(Q) if defaults else {}
    chus: Dict[str, ChuObject] = default_chu_objects(Q, cats) if defaults else {}
    cats.update(categories or {})
    chus.update(chu_objects or {})
    for name, X in cats.items():
        if len(X) > Settings.PROBE_OBJECT_CAP:
            raise SizeCap(f"probe category {name} has {len(X)} objects, cap is {Settings.PROBE_OBJECT_CAP}",
                          {'probe': name, 'cap': Settings.PROBE_OBJECT_CAP})
        validate_category(X)
    for name, phi in chus.items():
        if max(len(phi.domain), len(phi.codomain)) > Settings.PROBE_OBJECT_CAP:
            raise SizeCap(f"probe Chu object {name} exceeds {Settings.PROBE_OBJECT_CAP} objects",
                          {'probe': name, 'cap': Settings.PROBE_OBJECT_CAP})
        validate_distributor(phi.dist)
    return TestSuite(Q, cats, chus)


def middle_value(Q: Quantaloid, q: str) -> Optional[str]:
    """Q(q,q) 中第一個不是 ⊤、⊥ 或 1_q 的元素；沒有時為 None"""
    lattice = Q.hom(q, q)
    for element in lattice:
        if element not in (lattice.top, lattice.bottom, Q.identity(q)):
            return element
    return None


def default_categories(Q: Quantaloid) -> Dict[str, QCategory]:
    """
    預設的 Q-category 探針

    Q(q,q) 有中間值 m 時另加 arrow:mid（a(x,y) = m），
    例如 chain:3 的 m = 2；two 沒有中間值。
    """
    q = Q.objects[0]
    pair = {'x': q, 'y': q}
    chain_hom = {('x', 'x'): Q.identity(q), ('y', 'y'): Q.identity(q),
                 ('x', 'y'): Q.top(q, q), ('y', 'x'): Q.bottom(q, q)}
    cats = {'empty': initial(Q)}
    for t in Q.objects:
        cats[f"point:{t}"] = singleton(Q, t)
    cats['discrete'] = free_structure('discrete', Q, pair, name='discrete')
    cats['indiscrete'] = free_structure('indiscrete', Q, pair, name='indiscrete')
    cats['arrow'] = make_category(Q, ['x', 'y'], pair, chain_hom, name='arrow')
    middle = middle_value(Q, q)
    if middle is not None:
        cats['arrow:mid'] = make_category(Q, ['x', 'y'], pair, {**chain_hom, ('x', 'y'): middle},
                                          name='arrow:mid')
    return cats


def default_chu_objects(Q: Quantaloid, cats: Dict[str, QCategory]) -> Dict[str, ChuObject]:
    q = Q.objects[0]
    point, empty = cats[f"point:{q}"], cats['empty']
    middle = middle_value(Q, q)

    def chu(name: str, source: QCategory, target: QCategory, value: Dict) -> ChuObject:
        return ChuObject(QDistributor(source, target, value), name=name)

    chus = {
        'hom:arrow': chu('hom:arrow', cats['arrow'], cats['arrow'], dict(cats['arrow'].hom)),
        'hom:discrete': chu('hom:discrete', cats['discrete'], cats['discrete'], dict(cats['discrete'].hom)),
        'empty>discrete': chu('empty>discrete', empty, cats['discrete'], {}),
        'empty>point': chu('empty>point', empty, point, {}),
        'point>empty': chu('point>empty', point, empty, {}),
        'point>point:top': chu('point>point:top', point, point, {(q, q): Q.top(q, q)}),
        'point>indiscrete:top': chu('point>indiscrete:top', point, cats['indiscrete'],
                                    {(q, 'x'): Q.top(q, q), (q, 'y'): Q.top(q, q)}),
    }
    if middle is not None and 'arrow:mid' in cats:
        mid = cats['arrow:mid']
        chus['hom:arrow:mid'] = chu('hom:arrow:mid', mid, mid, dict(mid.hom))
        chus['point>point:mid'] = chu('point>point:mid', point, point, {(q, q): middle})
    return chus


def enumerate_chu_transforms(phi: ChuObject, psi: ChuObject, capped: bool = True) -> List[ChuTransform]:
    """
    窮舉 φ → ψ 的所有 Chu 變換

    對每個 f 先算出滿足 ψ(f(x),z) = φ(x,w) 的候選 w，再以回溯列舉 g。
    """
    X, W, Y, Z = phi.domain, phi.codomain, psi.domain, psi.codomain
    result = []
    for f in enumerate_functors(X, Y, capped=capped):
        allowed = {
            z: [w for w in W.objects
                if W.extent[w] == Z.extent[z] and all(psi(f.mapping[x], z) == phi(x, w) for x in X.objects)]
            for z in Z.objects
        }
        for g in enumerate_functors(Z, W, allowed=allowed, capped=capped):
            result.append(ChuTransform(phi, psi, f, g))
    return result


class _CatWorld:
    name = 'QCat'

    @staticmethod
    def hom(A: QCategory, B: QCategory) -> List[QFunctor]:
        return enumerate_functors(A, B)

    @staticmethod
    def compose(g: QFunctor, f: QFunctor) -> QFunctor:
        return compose_functors(g, f)

    @staticmethod
    def same(a: QFunctor, b: QFunctor) -> bool:
        return a.mapping == b.mapping

    @staticmethod
    def validate(m: QFunctor) -> None:
        validate_functor(m)

    @staticmethod
    def describe(m: QFunctor) -> Dict[str, Any]:
        return {'map': dict(m.mapping)}


class _ChuWorld:
    name = 'QChu'

    @staticmethod
    def hom(A: ChuObject, B: ChuObject) -> List[ChuTransform]:
        return enumerate_chu_transforms(A, B)

    @staticmethod
    def compose(g: ChuTransform, f: ChuTransform) -> ChuTransform:
        return compose_chu(g, f)

    @staticmethod
    def same(a: ChuTransform, b: ChuTransform) -> bool:
        return a.same_as(b)

    @staticmethod
    def validate(m: ChuTransform) -> None:
        validate_chu_transform(m)

    @staticmethod
    def describe(m: ChuTransform) -> Dict[str, Any]:
        return {'fwd': dict(m.fwd.mapping), 'bwd': dict(m.bwd.mapping)}


class OracleService:
    """窮舉式的泛性質驗證；ORACLE_WORKERS > 1 時以執行緒池平行處理探針"""

    def __init__(self, suite: TestSuite, workers: Optional[int] = None):
        self.suite = suite
        self.workers = Settings.ORACLE_WORKERS if workers is None else workers

    def _map(self, fn: Callable, items: Sequence) -> List:
        # executor.map 保持輸入順序，結果與平行度無關
        if self.workers <= 1 or len(items) <= 1:
            return [fn(item) for item in items]
        with concurrent.futures.ThreadPoolExecutor(max_workers=self.workers,
                                                   thread_name_prefix="oracle") as executor:
            return list(executor.map(fn, items))

    def check_universal(self, kind: str, construction) -> Certificate:
        """
        驗證 (余)極限的泛性質

        參數:
            kind: QCAT_KINDS 或 QCHU_KINDS 之一
            construction: qcat.Cone 或 qchu.ChuCone
        返回:
            Certificate（失敗時 counterexample 帶有見證 cone）
        """
        start_time = time.time()
        if kind in QCAT_KINDS:
            world, probes = _CatWorld, self.suite.categories
        elif kind in QCHU_KINDS:
            world, probes = _ChuWorld, self.suite.chu_objects
        else:
            raise ValueError(f"unknown universal kind {kind!r}")
        base = kind.replace('chu-', '')

        for i, leg in enumerate(construction.legs):
            try:
                world.validate(leg)
            except ValidationFailure as e:
                return Certificate(kind, False, 0, {'reason': 'leg', 'leg': i, 'error': e.to_dict()})

        limit = base in ('product', 'equalizer', 'terminal')
        if base in ('product', 'coproduct', 'terminal', 'initial'):
            targets = list(construction.family)
            constraint = None
        else:
            first, second = construction.parallel
            if base == 'equalizer':
                targets = [first.source]
                def constraint(cone, first=first, second=second):
                    return world.same(world.compose(first, cone[0]), world.compose(second, cone[0]))
            else:
                targets = [first.target]
                def constraint(cone, first=first, second=second):
                    return world.same(world.compose(cone[0], first), world.compose(cone[0], second))

        def run(item):
            probe_name, probe = item
            return probe_name, self._check_probe(world, construction, targets, constraint, limit, probe)

        checked = 0
        for probe_name, (count, failure) in self._map(run, list(probes.items())):
            checked += count
            if failure is not None:
                failure['probe'] = probe_name
                logger.warning(f"[{kind}] 泛性質失敗於探針 {probe_name}")
                return Certificate(kind, False, checked, failure)
        logger.info(f"[{kind}] 泛性質驗證通過: {checked} 個 cone ⏱️ {time.time() - start_time:.2f}s")
        return Certificate(kind, True, checked, details={'probes': len(probes), 'world': world.name})

    @staticmethod
    def _check_probe(world, construction, targets, constraint, limit: bool, probe):
        legs = construction.legs
        apex = construction.apex
        if limit:
            choices = [world.hom(probe, t) for t in targets]
            mediators = world.hom(probe, apex)
        else:
            choices = [world.hom(t, probe) for t in targets]
            mediators = world.hom(apex, probe)
        count = 0
        for cone in itertools.product(*choices):
            if constraint is not None and not constraint(cone):
                continue
            count += 1
            if limit:
                factoring = [m for m in mediators
                             if all(world.same(world.compose(leg, m), c) for leg, c in zip(legs, cone))]
            else:
                factoring = [m for m in mediators
                             if all(world.same(world.compose(m, leg), c) for leg, c in zip(legs, cone))]
            if len(factoring) != 1:
                return count, {
                    'reason': 'no mediator' if not factoring else 'several mediators',
                    'cone': [world.describe(c) for c in cone],
                    'mediators': [world.describe(m) for m in factoring],
                }
        return count, None

    def check_generating(self, mode: str = 'default') -> Certificate:
        """對所有相異平行 Chu 變換對執行 separate，確認合成不同"""
        start_time = time.time()
        family = generator_family(self.suite.quantaloid, mode)
        objects = list(self.suite.chu_objects.items())
        pairs = list(itertools.product(objects, repeat=2))

        def run(item):
            (a_name, a), (b_name, b) = item
            transforms = enumerate_chu_transforms(a, b)
            outcomes = []
            for t1, t2 in itertools.combinations(transforms, 2):
                try:
                    result = separate(t1, t2, family)
                except QuantikitError as e:
                    outcomes.append(('failure', {'source': a_name, 'target': b_name, 't1': _ChuWorld.describe(t1),
                                                 't2': _ChuWorld.describe(t2), 'error': e.to_dict()}))
                    continue
                outcomes.append(('ok', result.case))
            return outcomes

        cases = {1: 0, 2: 0, 3: 0}
        total = 0
        for outcomes in self._map(run, pairs):
            for status, payload in outcomes:
                total += 1
                if status == 'failure':
                    return Certificate('generating', False, total, payload)
                cases[payload] += 1
        logger.info(f"[generating] {total} 對平行變換全部分離 ⏱️ {time.time() - start_time:.2f}s")
        return Certificate('generating', True, total,
                           details={'mode': mode, 'cases': {str(k): v for k, v in cases.items()}})

    def check_initial_lift(self, diagram: ChuDiagram, lift: LiftResult) -> Certificate:
        """
        對每個探針 ψ、每個 cone Θ 與每個 t: dom ψ → X（γ∘Δt = dom Θ），
        恰有一個 Chu 變換 (t,g) 使 Γ∘Δ(t,g) = Θ
        """
        nodes = list(diagram.nodes)
        phi = lift.apex
        checked = 0
        for probe_name, psi in self.suite.chu_objects.items():
            choices = [enumerate_chu_transforms(psi, diagram.nodes[n]) for n in nodes]
            candidates = enumerate_chu_transforms(psi, phi)
            for theta in itertools.product(*choices):
                legs = dict(zip(nodes, theta))
                if not all(compose_chu(t, legs[j]).same_as(legs[k]) for j, k, t in diagram.arrows.values()):
                    continue
                for t in enumerate_functors(psi.domain, phi.domain):
                    if not all(compose_functors(lift.legs[n].fwd, t).mapping == legs[n].fwd.mapping for n in nodes):
                        continue
                    checked += 1
                    lifts = [m for m in candidates if m.fwd.mapping == t.mapping
                             and all(compose_chu(lift.legs[n], m).same_as(legs[n]) for n in nodes)]
                    if len(lifts) != 1:
                        return Certificate('initial-lift', False, checked, {
                            'probe': probe_name,
                            'cone': {n: _ChuWorld.describe(legs[n]) for n in nodes},
                            'fwd': dict(t.mapping),
                            'lifts': [_ChuWorld.describe(m) for m in lifts],
                        })
        return Certificate('initial-lift', True, checked, details={'probes': len(self.suite.chu_objects)})

    def check_mono_characterization(self, family: Optional[GeneratorFamily] = None) -> Certificate:
        """探針上可消去的 (f,g) 必有 f 單射、g 滿射；生成族成員一併作為探針"""
        family = family or generator_family(self.suite.quantaloid)
        probes = list(self.suite.chu_objects.values()) + list(family.members.values())
        objects = list(self.suite.chu_objects.items())
        transforms = monos = 0
        for (a_name, a), (b_name, b) in itertools.product(objects, repeat=2):
            for t in enumerate_chu_transforms(a, b):
                transforms += 1
                if not self._is_mono(t, probes):
                    continue
                monos += 1
                injective = len(set(t.fwd.mapping.values())) == len(t.fwd.mapping)
                surjective = set(t.bwd.mapping.values()) == set(t.bwd.target.objects)
                if not (injective and surjective):
                    return Certificate('mono', False, transforms, {
                        'source': a_name, 'target': b_name, 'transform': _ChuWorld.describe(t),
                        'injective': injective, 'surjective': surjective})
        return Certificate('mono', True, transforms, details={'monos': monos})

    @staticmethod
    def _is_mono(t: ChuTransform, probes: Iterable[ChuObject]) -> bool:
        for P in probes:
            arrows = enumerate_chu_transforms(P, t.source, capped=False)
            images = [compose_chu(t, m) for m in arrows]
            for (m1, i1), (m2, i2) in itertools.combinations(zip(arrows, images), 2):
                if i1.same_as(i2):
                    return False
        return True

    def check_adjunctions(self) -> Certificate:
        """探針間所有 Q-functor 的 f_♮ ⊣ f^♮，以及平行對的順序等價"""
        start_time = time.time()
        cats = list(self.suite.categories.items())

        def run(item):
            (a_name, A), (b_name, B) = item
            functors = enumerate_functors(A, B)
            for f in functors:
                cert = check_graph_adjunction(f)
                if not cert.certified:
                    return len(functors), dict(cert.counterexample, source=a_name, target=b_name,
                                               map=dict(f.mapping))
            for f, g in itertools.product(functors, repeat=2):
                if not check_order_equivalence(f, g):
                    return len(functors), {'side': 'order', 'source': a_name, 'target': b_name,
                                           'f': dict(f.mapping), 'g': dict(g.mapping)}
            return len(functors), None

        checked = 0
        for count, failure in self._map(run, list(itertools.product(cats, repeat=2))):
            checked += count
            if failure is not None:
                return Certificate('adjunction', False, checked, failure)
        logger.info(f"[adjunction] {checked} 個函子通過 ⏱️ {time.time() - start_time:.2f}s")
        return Certificate('adjunction', True, checked, details={'probes': len(cats)})

    def check_mutants(self) -> Certificate:
        """每個刻意破壞的構造都必須得到反例"""
        Q = self.suite.quantaloid
        cats = default_categories(Q)
        q = Q.objects[0]
        point, arrow = cats[f"point:{q}"], cats['arrow']
        to_x = QFunctor(point, cats['discrete'], {q: 'x'})
        seeds = {
            'product-join': product([arrow, arrow], Q),
            'product-discrete': product([arrow, arrow], Q),
            'coproduct-top': coproduct([point, point], Q),
            'equalizer-drop': equalizer(to_x, to_x),
            'coequalizer-collapse': coequalizer(to_x, to_x),
        }
        killed = {}
        for how in MUTATIONS:
            broken = mutate(seeds[how], how)
            killed[how] = not self.check_universal(broken.kind, broken).certified
        survivors = [how for how, dead in killed.items() if not dead]
        if survivors:
            logger.warning(f"[mutants] 未被偵測的突變: {survivors}")
            return Certificate('mutants', False, len(killed), {'survivors': survivors}, details={'killed': killed})
        return Certificate('mutants', True, len(killed), details={'killed': killed})


def check_graph_adjunction(f: QFunctor, lower: Optional[QDistributor] = None,
                           upper: Optional[QDistributor] = None) -> Certificate:
    """a ≤ f^♮∘f_♮ 且 f_♮∘f^♮ ≤ b"""
    computed_lower, computed_upper = graphs(f)
    lower = lower or computed_lower
    upper = upper or computed_upper
    X, Y = f.source, f.target
    Q = X.quantaloid
    unit = compose_distributors(upper, lower)
    counit = compose_distributors(lower, upper)
    for x in X.objects:
        for x_ in X.objects:
            if not Q.leq(X.extent[x], X.extent[x_], X.hom[(x, x_)], unit.value[(x, x_)]):
                return Certificate('adjunction', False, 1, {'side': 'unit', 'pair': [x, x_],
                                                            'hom': X.hom[(x, x_)], 'composite': unit.value[(x, x_)]})
    for y in Y.objects:
        for y_ in Y.objects:
            if not Q.leq(Y.extent[y], Y.extent[y_], counit.value[(y, y_)], Y.hom[(y, y_)]):
                return Certificate('adjunction', False, 1, {'side': 'counit', 'pair': [y, y_],
                                                            'hom': Y.hom[(y, y_)], 'composite': counit.value[(y, y_)]})
    return Certificate('adjunction', True, 1, details={
        'unit_is_hom': unit.value == X.hom, 'counit_is_hom': counit.value == Y.hom})


def check_order_equivalence(f: QFunctor, g: QFunctor) -> bool:
    """f ≤ g ⟺ g_♮ ≤ f_♮ ⟺ f^♮ ≤ g^♮ 三者同時成立或同時不成立"""
    f_lower, f_upper = graphs(f)
    g_lower, g_upper = graphs(g)
    statements = {functor_leq(f, g), dist_leq(g_lower, f_lower), dist_leq(f_upper, g_upper)}
    return len(statements) == 1


def mutate(construction: Cone, how: str) -> Cone:
    """
    建立錯誤的 (余)極限以確認 oracle 會給出反例

    how: product-join | product-discrete | coproduct-top | equalizer-drop | coequalizer-collapse
    """
    apex = construction.apex
    Q = apex.quantaloid
    if how == 'product-join':
        components = [leg.mapping for leg in construction.legs]
        hom = {(x, y): Q.join(apex.extent[x], apex.extent[y],
                              (X.hom[(c[x], c[y])] for X, c in zip(construction.family, components)))
               for x in apex.objects for y in apex.objects}
        broken = make_category(Q, apex.objects, apex.extent, hom, name='product-join')
    elif how == 'product-discrete':
        broken = free_structure('discrete', Q, apex.extent, name='product-discrete')
    elif how == 'coproduct-top':
        hom = {key: (value if key[0].split(':', 1)[0] == key[1].split(':', 1)[0]
                     else Q.top(apex.extent[key[0]], apex.extent[key[1]]))
               for key, value in apex.hom.items()}
        broken = make_category(Q, apex.objects, apex.extent, hom, name='coproduct-top')
    elif how == 'equalizer-drop':
        if not apex.objects:
            raise ValueError("cannot drop a point from an empty equalizer")
        keep = apex.objects[:-1]
        broken = make_category(Q, keep, {x: apex.extent[x] for x in keep},
                               {(x, y): apex.hom[(x, y)] for x in keep for y in keep}, name='equalizer-drop')
        leg = construction.legs[0]
        inclusion = QFunctor(broken, leg.target, {x: leg.mapping[x] for x in keep})
        return Cone(construction.kind, broken, [inclusion], construction.parallel, construction.family, Q)
    elif how == 'coequalizer-collapse':
        extents = sorted(set(apex.extent.values()), key=Q.objects.index)
        broken = free_structure('indiscrete', Q, {f"*{q}": q for q in extents}, name='coequalizer-collapse')
        leg = construction.legs[0]
        projection = QFunctor(leg.source, broken, {y: f"*{leg.source.extent[y]}" for y in leg.source.objects})
        return Cone(construction.kind, broken, [projection], construction.parallel, construction.family, Q)
    else:
        raise ValueError(f"unknown mutation {how!r}")

    if construction.kind in ('product', 'equalizer', 'terminal'):
        legs = [QFunctor(broken, leg.target, dict(leg.mapping)) for leg in construction.legs]
    else:
        legs = [QFunctor(leg.source, broken, dict(leg.mapping)) for leg in construction.legs]
    return Cone(construction.kind, broken, legs, construction.parallel, construction.family, Q)


MUTATIONS = ('product-join', 'product-discrete', 'coproduct-top', 'equalizer-drop', 'coequalizer-collapse')


__all__ = [
    'Certificate', 'TestSuite', 'OracleService', 'build_suite', 'enumerate_functors', 'enumerate_chu_transforms',
    'check_graph_adjunction', 'check_order_equivalence', 'middle_value', 'mutate', 'MUTATIONS',
]
