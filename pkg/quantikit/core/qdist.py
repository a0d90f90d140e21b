# quantikit/core/qdist.py
import logging
import math
from dataclasses import dataclass, field
from typing import Dict, List, Mapping, Optional, Tuple

from quantikit.config.settings import Settings
from quantikit.core.errors import BimoduleViolation, FormulationMismatch, SizeCap, TypeMismatch
from quantikit.core.qcat import QCategory, QFunctor, make_category
from quantikit.utils.enumeration import backtrack, presheaf_name

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class QDistributor:
    """φ: X ⇸ Y，φ(x,y) ∈ Q(|x|,|y|)"""
    source: QCategory
    target: QCategory
    value: Dict[Tuple[str, str], str]
    name: Optional[str] = field(default=None, compare=False)

    def __call__(self, x: str, y: str) -> str:
        return self.value[(x, y)]


@dataclass(frozen=True)
class Presheaf:
    """X 上的 presheaf：extent s 與分量 φ_x ∈ Q(|x|, s)"""
    base: QCategory = field(compare=False, repr=False)
    extent: str
    components: Dict[str, str]

    @property
    def name(self) -> str:
        return presheaf_name(self.extent, self.components)

    def __getitem__(self, x: str) -> str:
        return self.components[x]


def validate_distributor(candidate: QDistributor) -> QDistributor:
    """
    驗證雙模條件 b(y,y')∘φ(x,y)∘a(x',x) ≤ φ(x',y')

    在 X、Y 反身的前提下等價於分別檢查左右兩側作用；之後再確認 φ∘a = φ = b∘φ。
    """
    X, Y = candidate.source, candidate.target
    Q = X.quantaloid
    if Y.quantaloid is not Q:
        raise TypeMismatch("source and target live over different quantaloids",
                           {'source': Q.name, 'target': Y.quantaloid.name})
    for x in X.objects:
        for y in Y.objects:
            if (x, y) not in candidate.value:
                raise TypeMismatch(f"missing value φ({x},{y})", {'pair': [x, y]})
            if candidate.value[(x, y)] not in Q.hom(X.extent[x], Y.extent[y]):
                raise TypeMismatch(f"φ({x},{y}) = {candidate.value[(x, y)]!r} is not in "
                                   f"Q({X.extent[x]},{Y.extent[y]})",
                                   {'pair': [x, y], 'value': candidate.value[(x, y)]})

    ext_x, ext_y, phi = X.extent, Y.extent, candidate.value
    for x_ in X.objects:
        for x in X.objects:
            for y in Y.objects:
                acted = Q.compose(phi[(x, y)], X.hom[(x_, x)], ext_x[x_], ext_x[x], ext_y[y])
                if not Q.leq(ext_x[x_], ext_y[y], acted, phi[(x_, y)]):
                    raise BimoduleViolation(
                        f"φ({x},{y})∘a({x_},{x}) = {acted} ≰ φ({x_},{y}) = {phi[(x_, y)]}",
                        {'quadruple': [x_, x, y, y], 'composite': acted, 'value': phi[(x_, y)]})
    for x in X.objects:
        for y in Y.objects:
            for y_ in Y.objects:
                acted = Q.compose(Y.hom[(y, y_)], phi[(x, y)], ext_x[x], ext_y[y], ext_y[y_])
                if not Q.leq(ext_x[x], ext_y[y_], acted, phi[(x, y_)]):
                    raise BimoduleViolation(
                        f"b({y},{y_})∘φ({x},{y}) = {acted} ≰ φ({x},{y_}) = {phi[(x, y_)]}",
                        {'quadruple': [x, x, y, y_], 'composite': acted, 'value': phi[(x, y_)]})

    if compose_distributors(candidate, identity_distributor(X)).value != phi:
        raise FormulationMismatch("φ∘a ≠ φ although the bimodule condition holds", {'side': 'source'})
    if compose_distributors(identity_distributor(Y), candidate).value != phi:
        raise FormulationMismatch("b∘φ ≠ φ although the bimodule condition holds", {'side': 'target'})
    return candidate


def identity_distributor(X: QCategory) -> QDistributor:
    """hom 結構 a: X ⇸ X"""
    return QDistributor(X, X, dict(X.hom), name=f"a_{X.name}" if X.name else None)


def compose_distributors(psi: QDistributor, phi: QDistributor) -> QDistributor:
    """(ψ∘φ)(x,z) = ⋁_y ψ(y,z)∘φ(x,y)"""
    if phi.target != psi.source:
        raise TypeMismatch("distributors are not composable", {'phi': phi.name, 'psi': psi.name})
    X, Y, Z = phi.source, phi.target, psi.target
    Q = X.quantaloid
    value = {}
    for x in X.objects:
        for z in Z.objects:
            value[(x, z)] = Q.join(X.extent[x], Z.extent[z], (
                Q.compose(psi.value[(y, z)], phi.value[(x, y)], X.extent[x], Y.extent[y], Z.extent[z])
                for y in Y.objects))
    return QDistributor(X, Z, value)


def graphs(f: QFunctor) -> Tuple[QDistributor, QDistributor]:
    """
    Q-functor 的兩個圖

    返回:
        (f_♮: X ⇸ Y，f_♮(x,y) = b(f(x),y)；f^♮: Y ⇸ X，f^♮(y,x) = b(y,f(x)))
    """
    X, Y = f.source, f.target
    lower = {(x, y): Y.hom[(f.mapping[x], y)] for x in X.objects for y in Y.objects}
    upper = {(y, x): Y.hom[(y, f.mapping[x])] for y in Y.objects for x in X.objects}
    return QDistributor(X, Y, lower), QDistributor(Y, X, upper)


def dist_leq(phi: QDistributor, other: QDistributor) -> bool:
    if phi.source != other.source or phi.target != other.target:
        raise TypeMismatch("distributors are not parallel", {'phi': phi.name, 'other': other.name})
    X, Y = phi.source, phi.target
    Q = X.quantaloid
    return all(Q.leq(X.extent[x], Y.extent[y], phi.value[(x, y)], other.value[(x, y)])
               for x in X.objects for y in Y.objects)


def validate_presheaf(p: Presheaf) -> Presheaf:
    X, Q = p.base, p.base.quantaloid
    for x in X.objects:
        if x not in p.components or p.components[x] not in Q.hom(X.extent[x], p.extent):
            raise TypeMismatch(f"component {x} of {p.name} is not in Q({X.extent[x]},{p.extent})",
                               {'presheaf': p.name, 'object': x})
    for x in X.objects:
        for y in X.objects:
            composite = Q.compose(p[y], X.hom[(x, y)], X.extent[x], X.extent[y], p.extent)
            if not Q.leq(X.extent[x], p.extent, composite, p[x]):
                raise BimoduleViolation(f"φ_{y}∘a({x},{y}) = {composite} ≰ φ_{x} = {p[x]}",
                                        {'presheaf': p.name, 'pair': [x, y]})
    return p


@dataclass(frozen=True)
class PresheafCategory:
    """PX 與 presheaf 名稱對照表"""
    base: QCategory
    category: QCategory
    presheaves: Dict[str, Presheaf]

    def lookup(self, p: Presheaf) -> str:
        name = p.name
        if name not in self.presheaves:
            raise BimoduleViolation(f"{name} is not a presheaf on {self.base.name}", {'presheaf': name})
        return name


def presheaf_bound(X: QCategory) -> int:
    """未剪枝的列舉上界 Σ_s Π_x |Q(|x|,s)|"""
    Q = X.quantaloid
    return sum(math.prod(len(Q.hom(X.extent[x], s)) for x in X.objects) for s in Q.objects)


def enumerate_presheaves(X: QCategory, cap: Optional[int] = None) -> List[Presheaf]:
    """依 Q 物件順序與分量字典序窮舉 X 上的所有 presheaf"""
    cap = Settings.PRESHEAF_CAP if cap is None else cap
    Q = X.quantaloid
    found: List[Presheaf] = []
    for s in Q.objects:
        def consistent(partial: Dict[str, str], key: str, s=s) -> bool:
            fk = partial[key]
            for y, fy in partial.items():
                if not Q.leq(X.extent[key], s, Q.compose(fy, X.hom[(key, y)], X.extent[key], X.extent[y], s), fk):
                    return False
                if not Q.leq(X.extent[y], s, Q.compose(fk, X.hom[(y, key)], X.extent[y], X.extent[key], s), fy):
                    return False
            return True

        for components in backtrack(X.objects, lambda x, s=s: Q.hom(X.extent[x], s).elements, consistent):
            found.append(Presheaf(X, s, components))
            if len(found) > cap:
                raise SizeCap(f"P({X.name}) has more than {cap} presheaves",
                              {'cap': cap, 'bound': presheaf_bound(X), 'category': X.name})
    return found


def presheaf_category(X: QCategory, cap: Optional[int] = None) -> PresheafCategory:
    """
    PX：X 上所有 presheaf，[φ,ψ] = ⋀_x ψ_x↙φ_x ∈ Q(|φ|,|ψ|)

    參數:
        X: 基底 Q-category
        cap: presheaf 數量上限，預設 Settings.PRESHEAF_CAP
    """
    Q = X.quantaloid
    presheaves = enumerate_presheaves(X, cap)
    names = [p.name for p in presheaves]
    extent = {p.name: p.extent for p in presheaves}
    hom = {}
    for p in presheaves:
        for r in presheaves:
            hom[(p.name, r.name)] = Q.meet(p.extent, r.extent, (
                Q.residual_left(r[x], p[x], X.extent[x], p.extent, r.extent) for x in X.objects))
    category = make_category(Q, names, extent, hom, name=f"P({X.name})" if X.name else 'P')
    logger.info(f"presheaf 範疇建立完成: {len(names)} 個 presheaf")
    return PresheafCategory(X, category, {p.name: p for p in presheaves})


def _ensure_presheaf_category(X: QCategory, PX: Optional[PresheafCategory]) -> PresheafCategory:
    if PX is None:
        return presheaf_category(X)
    if PX.base != X:
        raise TypeMismatch("presheaf category is built over a different category", {'category': X.name})
    return PX


def transpose_at(phi: QDistributor, y: str) -> Presheaf:
    """φ̃(y) = φ(−,y)，extent |y|"""
    X = phi.source
    return Presheaf(X, phi.target.extent[y], {x: phi.value[(x, y)] for x in X.objects})


def pull_back(phi: QDistributor, psi: Presheaf) -> Presheaf:
    """(φ*ψ)_x = ⋁_y ψ_y∘φ(x,y)"""
    X, Y = phi.source, phi.target
    Q = X.quantaloid
    s = psi.extent
    return Presheaf(X, s, {
        x: Q.join(X.extent[x], s, (Q.compose(psi[y], phi.value[(x, y)], X.extent[x], Y.extent[y], s)
                                   for y in Y.objects))
        for x in X.objects
    })


def yoneda(X: QCategory, PX: Optional[PresheafCategory] = None) -> QFunctor:
    """y: X → PX，x ↦ a(−,x)；並確認完全忠實 [y(x),y(y)] = a(x,y)"""
    PX = _ensure_presheaf_category(X, PX)
    mapping = {x: PX.lookup(transpose_at(identity_distributor(X), x)) for x in X.objects}
    for x in X.objects:
        for y in X.objects:
            if PX.category.hom[(mapping[x], mapping[y])] != X.hom[(x, y)]:
                raise FormulationMismatch(f"[y({x}),y({y})] ≠ a({x},{y})",
                                          {'pair': [x, y], 'presheaf_hom': PX.category.hom[(mapping[x], mapping[y])],
                                           'hom': X.hom[(x, y)]})
    return QFunctor(X, PX.category, mapping, name='yoneda')


def transpose(phi: QDistributor, PX: Optional[PresheafCategory] = None) -> QFunctor:
    """φ̃: Y → PX"""
    PX = _ensure_presheaf_category(phi.source, PX)
    mapping = {y: PX.lookup(transpose_at(phi, y)) for y in phi.target.objects}
    return QFunctor(phi.target, PX.category, mapping, name='transpose')


def kan_star(phi: QDistributor, PX: Optional[PresheafCategory] = None,
             PY: Optional[PresheafCategory] = None) -> QFunctor:
    """φ*: PY → PX，ψ ↦ ψ∘φ"""
    PX = _ensure_presheaf_category(phi.source, PX)
    PY = _ensure_presheaf_category(phi.target, PY)
    mapping = {name: PX.lookup(pull_back(phi, psi)) for name, psi in PY.presheaves.items()}
    return QFunctor(PY.category, PX.category, mapping, name='kan_star')


def functor_star(f: QFunctor, PX: Optional[PresheafCategory] = None,
                 PY: Optional[PresheafCategory] = None) -> QFunctor:
    """f* = (f_♮)*，並確認 (f*ψ)_x = ψ_{f(x)}"""
    PX = _ensure_presheaf_category(f.source, PX)
    PY = _ensure_presheaf_category(f.target, PY)
    star = kan_star(graphs(f)[0], PX, PY)
    for name, psi in PY.presheaves.items():
        direct = Presheaf(f.source, psi.extent, {x: psi[f.mapping[x]] for x in f.source.objects})
        if star.mapping[name] != direct.name:
            raise FormulationMismatch(f"(f_♮)*({name}) ≠ ψ∘f", {'presheaf': name, 'kan': star.mapping[name],
                                                                  'direct': direct.name})
    return star
