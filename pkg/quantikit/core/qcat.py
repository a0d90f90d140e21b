# quantikit/core/qcat.py
import itertools
import logging
from dataclasses import dataclass, field
from typing import Dict, List, Mapping, Optional, Sequence, Tuple

from quantikit.config.settings import Settings
from quantikit.core.errors import (
    BadParameter,
    ExtentMismatch,
    NotMonotone,
    ReflexivityViolation,
    SizeCap,
    TransitivityViolation,
    TypeMismatch,
)
from quantikit.core.quantaloid import DiagonalConstruction, Quantaloid
from quantikit.utils.enumeration import UnionFind, backtrack, class_name, tagged_name, tuple_name

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class QCategory:
    """Q-category：物件、extent |x| 與 hom 箭頭 a(x,y) ∈ Q(|x|,|y|)"""
    quantaloid: Quantaloid
    objects: Tuple[str, ...]
    extent: Dict[str, str]
    hom: Dict[Tuple[str, str], str]
    name: Optional[str] = field(default=None, compare=False)

    def a(self, x: str, y: str) -> str:
        return self.hom[(x, y)]

    def __len__(self) -> int:
        return len(self.objects)

    def __contains__(self, x: str) -> bool:
        return x in self.extent


@dataclass(frozen=True)
class QFunctor:
    """保持 extent 且 a(x,y) ≤ b(f(x),f(y)) 的映射"""
    source: QCategory
    target: QCategory
    mapping: Dict[str, str]
    name: Optional[str] = field(default=None, compare=False)

    def __call__(self, x: str) -> str:
        return self.mapping[x]


@dataclass(frozen=True)
class Cone:
    """(余)極限構造的輸出：apex 與各 leg；parallel 為 (余)等化子的平行對"""
    kind: str
    apex: QCategory
    legs: List[QFunctor]
    parallel: Tuple[QFunctor, ...] = ()
    family: Tuple[QCategory, ...] = ()
    quantaloid: Optional[Quantaloid] = None


def make_category(quantaloid: Quantaloid, objects: Sequence[str], extent: Mapping[str, str],
                  hom: Mapping[Tuple[str, str], str], name: Optional[str] = None) -> QCategory:
    return QCategory(quantaloid, tuple(objects), dict(extent), dict(hom), name)


def validate_category(candidate: QCategory) -> QCategory:
    """
    驗證 Q-category 公理

    1_{|x|} ≤ a(x,x)，a(y,z)∘a(x,y) ≤ a(x,z)
    """
    Q = candidate.quantaloid
    if len(set(candidate.objects)) != len(candidate.objects):
        raise BadParameter("duplicate objects in category", {'objects': list(candidate.objects)})
    for x in candidate.objects:
        if x not in candidate.extent:
            raise TypeMismatch(f"object {x!r} has no extent", {'object': x})
        if candidate.extent[x] not in Q.identities:
            raise TypeMismatch(f"extent {candidate.extent[x]!r} of {x!r} is not a Q-object",
                               {'object': x, 'extent': candidate.extent[x]})
    ext = candidate.extent
    for x in candidate.objects:
        for y in candidate.objects:
            if (x, y) not in candidate.hom:
                raise TypeMismatch(f"missing hom a({x},{y})", {'pair': [x, y]})
            value = candidate.hom[(x, y)]
            if value not in Q.hom(ext[x], ext[y]):
                raise TypeMismatch(f"a({x},{y}) = {value!r} is not in Q({ext[x]},{ext[y]})",
                                   {'pair': [x, y], 'value': value})

    for x in candidate.objects:
        q = ext[x]
        if not Q.leq(q, q, Q.identity(q), candidate.hom[(x, x)]):
            raise ReflexivityViolation(f"1_{q} ≰ a({x},{x}) = {candidate.hom[(x, x)]}",
                                       {'object': x, 'identity': Q.identity(q), 'value': candidate.hom[(x, x)]})
    for x, y, z in itertools.product(candidate.objects, repeat=3):
        composite = Q.compose(candidate.hom[(y, z)], candidate.hom[(x, y)], ext[x], ext[y], ext[z])
        if not Q.leq(ext[x], ext[z], composite, candidate.hom[(x, z)]):
            raise TransitivityViolation(
                f"a({y},{z})∘a({x},{y}) = {composite} ≰ a({x},{z}) = {candidate.hom[(x, z)]}",
                {'triple': [x, y, z], 'composite': composite, 'value': candidate.hom[(x, z)]})
    return candidate


def functor_violation(candidate: QFunctor) -> Optional[Tuple[str, dict]]:
    """第一個違反條件（'extent' 或 'monotone'）與見證；合法時回傳 None"""
    X, Y, f = candidate.source, candidate.target, candidate.mapping
    Q = X.quantaloid
    for x in X.objects:
        if x not in f or f[x] not in Y.extent:
            return 'map', {'object': x, 'image': f.get(x)}
        if X.extent[x] != Y.extent[f[x]]:
            return 'extent', {'object': x, 'image': f[x], 'extent': X.extent[x], 'image_extent': Y.extent[f[x]]}
    for x in X.objects:
        for y in X.objects:
            if not Q.leq(X.extent[x], X.extent[y], X.hom[(x, y)], Y.hom[(f[x], f[y])]):
                return 'monotone', {'pair': [x, y], 'source': X.hom[(x, y)], 'target': Y.hom[(f[x], f[y])]}
    return None


def validate_functor(candidate: QFunctor) -> QFunctor:
    """|x| = |f(x)| 且 a(x,y) ≤ b(f(x),f(y))"""
    if candidate.source.quantaloid is not candidate.target.quantaloid:
        raise TypeMismatch("source and target live over different quantaloids",
                           {'source': candidate.source.quantaloid.name, 'target': candidate.target.quantaloid.name})
    violation = functor_violation(candidate)
    if violation is None:
        return candidate
    kind, witness = violation
    if kind == 'map':
        raise TypeMismatch(f"object {witness['object']!r} is not mapped into the target", witness)
    if kind == 'extent':
        raise ExtentMismatch(f"|{witness['object']}| ≠ |{witness['image']}|", witness)
    x, y = witness['pair']
    raise NotMonotone(f"a({x},{y}) = {witness['source']} ≰ b(f{x},f{y}) = {witness['target']}", witness)


def enumerate_functors(X: QCategory, Y: QCategory, allowed: Optional[Mapping[str, Sequence[str]]] = None,
                       capped: bool = True) -> List[QFunctor]:
    """
    窮舉 X → Y 的所有 Q-functor（依 X 物件順序、Y 物件順序的字典序）

    參數:
        allowed: 每個 x 可用的像（預設為 extent 相同的所有 y）
        capped: 是否套用 Settings.FUNCTOR_SOURCE_CAP / FUNCTOR_TARGET_CAP
    """
    if capped and (len(X) > Settings.FUNCTOR_SOURCE_CAP or len(Y) > Settings.FUNCTOR_TARGET_CAP):
        raise SizeCap(f"functor enumeration {len(X)} → {len(Y)} objects exceeds caps "
                      f"{Settings.FUNCTOR_SOURCE_CAP} → {Settings.FUNCTOR_TARGET_CAP}",
                      {'source': len(X), 'target': len(Y),
                       'caps': [Settings.FUNCTOR_SOURCE_CAP, Settings.FUNCTOR_TARGET_CAP]})
    Q = X.quantaloid

    def candidates(x: str) -> List[str]:
        pool = Y.objects if allowed is None else allowed.get(x, ())
        return [y for y in pool if Y.extent.get(y) == X.extent[x]]

    def consistent(partial: Dict[str, str], x: str) -> bool:
        fx = partial[x]
        for x_, fx_ in partial.items():
            if not Q.leq(X.extent[x], X.extent[x_], X.hom[(x, x_)], Y.hom[(fx, fx_)]):
                return False
            if not Q.leq(X.extent[x_], X.extent[x], X.hom[(x_, x)], Y.hom[(fx_, fx)]):
                return False
        return True

    return [QFunctor(X, Y, mapping) for mapping in backtrack(X.objects, candidates, consistent)]


def identity_functor(X: QCategory) -> QFunctor:
    return QFunctor(X, X, {x: x for x in X.objects}, name=f"1_{X.name}" if X.name else None)


def compose_functors(g: QFunctor, f: QFunctor) -> QFunctor:
    """g∘f"""
    if f.target != g.source:
        raise TypeMismatch("functors are not composable", {'f': f.name, 'g': g.name})
    return QFunctor(f.source, g.target, {x: g.mapping[f.mapping[x]] for x in f.source.objects})


def free_structure(mode: str, quantaloid: Quantaloid, extent: Mapping[str, str],
                   name: Optional[str] = None) -> QCategory:
    """
    離散或不離散 Q-structure

    discrete:   a(x,x) = 1_{|x|}，其餘為 ⊥
    indiscrete: a(x,y) = ⊤
    """
    objects = list(extent)
    hom = {}
    for x in objects:
        for y in objects:
            qx, qy = extent[x], extent[y]
            if mode == 'discrete':
                hom[(x, y)] = quantaloid.identity(qx) if x == y else quantaloid.bottom(qx, qy)
            elif mode == 'indiscrete':
                hom[(x, y)] = quantaloid.top(qx, qy)
            else:
                raise BadParameter(f"unknown structure mode {mode!r}", {'mode': mode})
    return make_category(quantaloid, objects, extent, hom, name)


def _shared_quantaloid(family: Sequence[QCategory], quantaloid: Optional[Quantaloid]) -> Quantaloid:
    Q = quantaloid or (family[0].quantaloid if family else None)
    if Q is None:
        raise BadParameter("an empty family needs an explicit quantaloid")
    for X in family:
        if X.quantaloid is not Q:
            raise TypeMismatch(f"category {X.name} lives over {X.quantaloid.name}, expected {Q.name}",
                               {'category': X.name})
    return Q


def product(family: Sequence[QCategory], quantaloid: Optional[Quantaloid] = None) -> Cone:
    """
    乘積：extent 一致的 tuple（fibred product），hom 為各分量 hom 的 meet

    空族給出終物件 (ob Q, ⊤)。
    """
    Q = _shared_quantaloid(family, quantaloid)
    objects, extent, components = [], {}, {}
    for q in Q.objects:
        fibres = [[x for x in X.objects if X.extent[x] == q] for X in family]
        for tup in itertools.product(*fibres):
            name = tuple_name(tup, q)
            objects.append(name)
            extent[name] = q
            components[name] = tup
    hom = {}
    for x in objects:
        for y in objects:
            hom[(x, y)] = Q.meet(extent[x], extent[y],
                                 (X.hom[(xi, yi)] for X, xi, yi in zip(family, components[x], components[y])))
    apex = make_category(Q, objects, extent, hom, name='product')
    legs = [QFunctor(apex, X, {x: components[x][i] for x in objects}, name=f"p{i}")
            for i, X in enumerate(family)]
    logger.info(f"乘積建立完成: {len(family)} 個因子, {len(objects)} 個物件")
    return Cone('product', apex, legs, family=tuple(family), quantaloid=Q)


def terminal(quantaloid: Quantaloid) -> QCategory:
    return product([], quantaloid).apex


def coproduct(family: Sequence[QCategory], quantaloid: Optional[Quantaloid] = None) -> Cone:
    """集合上的不交聯集；跨分量的 hom 為 ⊥；空族給出初物件 ∅"""
    Q = _shared_quantaloid(family, quantaloid)
    objects, extent, origin = [], {}, {}
    for i, X in enumerate(family):
        for x in X.objects:
            name = tagged_name(i, x)
            objects.append(name)
            extent[name] = X.extent[x]
            origin[name] = (i, x)
    hom = {}
    for x in objects:
        for y in objects:
            (i, xi), (j, yj) = origin[x], origin[y]
            hom[(x, y)] = family[i].hom[(xi, yj)] if i == j else Q.bottom(extent[x], extent[y])
    apex = make_category(Q, objects, extent, hom, name='coproduct')
    legs = [QFunctor(X, apex, {x: tagged_name(i, x) for x in X.objects}, name=f"s{i}")
            for i, X in enumerate(family)]
    logger.info(f"餘積建立完成: {len(family)} 個分量, {len(objects)} 個物件")
    return Cone('coproduct', apex, legs, family=tuple(family), quantaloid=Q)


def initial(quantaloid: Quantaloid) -> QCategory:
    return coproduct([], quantaloid).apex


def _check_parallel(f: QFunctor, g: QFunctor) -> None:
    if f.source != g.source or f.target != g.target:
        raise TypeMismatch("functors are not parallel", {'f': f.name, 'g': g.name})


def equalizer(f: QFunctor, g: QFunctor) -> Cone:
    """{x : f(x) = g(x)} 上的完全子結構"""
    _check_parallel(f, g)
    X = f.source
    kept = [x for x in X.objects if f.mapping[x] == g.mapping[x]]
    apex = full_subcategory(X, kept, name='equalizer')
    inclusion = QFunctor(apex, X, {x: x for x in kept}, name='i')
    return Cone('equalizer', apex, [inclusion], parallel=(f, g), quantaloid=X.quantaloid)


def fixpoint_bound(Q: Quantaloid, classes: int) -> int:
    """餘等化子不動點迭代的上界：最大 hom 格大小 × 類別數²"""
    return max(len(L) for L in Q.homs.values()) * max(classes, 1) ** 2


def coequalizer(f: QFunctor, g: QFunctor) -> Cone:
    """
    Y/∼ 的商結構，∼ 為使 f(x)∼g(x) 的最小等價關係

    c 為 c ← c₀ ∨ (c∘c₀) 的最小不動點，c₀(ζ,ζ') = ⋁{b(y,y') : y∈ζ, y'∈ζ'}；
    相鄰的鏈結必須經過同一個 ∼ 類別。
    """
    _check_parallel(f, g)
    Y = f.target
    Q = Y.quantaloid
    classes = UnionFind(Y.objects)
    for x in f.source.objects:
        classes.union(f.mapping[x], g.mapping[x])
    groups = classes.groups()
    names = [class_name(members) for members in groups]
    projection = {y: name for name, members in zip(names, groups) for y in members}
    extent = {name: Y.extent[members[0]] for name, members in zip(names, groups)}

    base = {}
    for zn, zm in zip(names, groups):
        for wn, wm in zip(names, groups):
            base[(zn, wn)] = Q.join(extent[zn], extent[wn], (Y.hom[(y, w)] for y in zm for w in wm))

    current = dict(base)
    bound = fixpoint_bound(Q, len(names))
    iterations = 0
    while True:
        iterations += 1
        updated = {}
        for zn in names:
            for wn in names:
                steps = (Q.compose(current[(mid, wn)], base[(zn, mid)], extent[zn], extent[mid], extent[wn])
                         for mid in names)
                updated[(zn, wn)] = Q.join(extent[zn], extent[wn], itertools.chain([base[(zn, wn)]], steps))
        if updated == current:
            break
        current = updated
        if iterations > bound:
            raise SizeCap(f"coequalizer fixpoint did not settle within {bound} iterations",
                          {'iterations': iterations, 'bound': bound, 'classes': len(names)})
    logger.debug(f"餘等化子不動點於 {iterations} 次迭代收斂 (上界 {bound})")

    apex = make_category(Q, names, extent, current, name='coequalizer')
    pi = QFunctor(Y, apex, projection, name='pi')
    return Cone('coequalizer', apex, [pi], parallel=(f, g), quantaloid=Q)


def functor_leq(f: QFunctor, g: QFunctor) -> bool:
    """f ≤ g ⟺ 1_{|x|} ≤ b(f(x),g(x))（對所有 x）"""
    _check_parallel(f, g)
    Y = f.target
    Q = Y.quantaloid
    for x in f.source.objects:
        q = f.source.extent[x]
        if not Q.leq(q, q, Q.identity(q), Y.hom[(f.mapping[x], g.mapping[x])]):
            return False
    return True


def opposite_category(X: QCategory) -> QCategory:
    """X^op = (X, a°) over Q^op，a°(x,y) = a(y,x)"""
    return make_category(X.quantaloid.opposite(), X.objects, X.extent,
                         {(x, y): X.hom[(y, x)] for x in X.objects for y in X.objects},
                         name=f"{X.name}^op" if X.name else None)


def full_subcategory(X: QCategory, keep: Sequence[str], name: Optional[str] = None) -> QCategory:
    return make_category(X.quantaloid, keep, {x: X.extent[x] for x in keep},
                         {(x, y): X.hom[(x, y)] for x in keep for y in keep}, name=name)


def total_part(X: QCategory, construction: DiagonalConstruction) -> QCategory:
    """
    D(Q)-category 的 coreflection：只留下 extent 為單位元 1_q 的物件，
    並以原 quantaloid Q 重新標記（ParOrd → Ord、ParMet → Met）
    """
    if X.quantaloid is not construction.quantaloid:
        raise TypeMismatch("category is not over the given diagonal quantaloid", {'category': X.name})
    base = construction.base
    keep, extent = [], {}
    for x in X.objects:
        q, r, e = construction.arrow_of[X.extent[x]]
        if q == r and e == base.identity(q):
            keep.append(x)
            extent[x] = q
    return make_category(base, keep, extent, {(x, y): X.hom[(x, y)] for x in keep for y in keep},
                         name=f"total({X.name})" if X.name else None)


def is_partial_metric(points: Sequence[str], distance: Mapping[Tuple[str, str], int], cap: int) -> bool:
    """a(x,x) ≤ a(x,y)、a(x,z) ≤ a(x,y) − a(y,y) + a(y,z)（以 cap 截斷）"""
    for x, y in itertools.product(points, repeat=2):
        if distance[(x, x)] > distance[(x, y)] or distance[(y, y)] > distance[(x, y)]:
            return False
    for x, y, z in itertools.product(points, repeat=3):
        if distance[(x, z)] > min(distance[(x, y)] - distance[(y, y)] + distance[(y, z)], cap):
            return False
    return True


def partial_metric_category(construction: DiagonalConstruction, points: Sequence[str],
                            distance: Mapping[Tuple[str, str], int], name: Optional[str] = None) -> QCategory:
    """以部分度量建立 D(chain n)-category，extent |x| = a(x,x)"""
    D = construction.quantaloid
    base = construction.base
    if len(base.objects) != 1:
        raise BadParameter("partial metrics live over a one-object quantale", {'quantaloid': base.name})
    q = base.objects[0]
    extent = {x: construction.object_of(q, q, str(distance[(x, x)])) for x in points}
    hom = {(x, y): str(distance[(x, y)]) for x in points for y in points}
    return make_category(D, points, extent, hom, name=name)
