# quantikit/core/qchu.py
import logging
from dataclasses import dataclass, field
from typing import Any, Dict, List, Mapping, Optional, Sequence, Tuple

from quantikit.core.errors import (
    BadParameter,
    ChuViolation,
    FormulationMismatch,
    NotACone,
    NotDistinct,
    TypeMismatch,
    WitnessedIllDefinedness,
)
from quantikit.core.qcat import (
    QCategory,
    QFunctor,
    compose_functors,
    coproduct,
    coequalizer,
    enumerate_functors,
    equalizer,
    free_structure,
    identity_functor,
    initial,
    make_category,
    product,
    validate_functor,
)
from quantikit.core.qdist import (
    QDistributor,
    graphs,
    presheaf_category,
    pull_back,
    transpose_at,
    validate_distributor,
)
from quantikit.core.quantaloid import Quantaloid
from quantikit.utils.enumeration import doubled_name, presheaf_name, tagged_name

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class ChuObject:
    """以 Q-distributor φ: X ⇸ W 作為 Chu 物件"""
    dist: QDistributor
    name: Optional[str] = field(default=None, compare=False)

    @property
    def domain(self) -> QCategory:
        return self.dist.source

    @property
    def codomain(self) -> QCategory:
        return self.dist.target

    @property
    def quantaloid(self) -> Quantaloid:
        return self.dist.source.quantaloid

    def __call__(self, x: str, w: str) -> str:
        return self.dist.value[(x, w)]


@dataclass(frozen=True)
class ChuTransform:
    """(f,g): φ → ψ，f: X → Y、g: Z → W，ψ(f(x),z) = φ(x,g(z))"""
    source: ChuObject
    target: ChuObject
    fwd: QFunctor
    bwd: QFunctor
    name: Optional[str] = field(default=None, compare=False)

    def same_as(self, other: 'ChuTransform') -> bool:
        return self.fwd.mapping == other.fwd.mapping and self.bwd.mapping == other.bwd.mapping


@dataclass(frozen=True)
class ChuCone:
    """Chu (余)極限：apex 與各 leg；parallel 為 (余)等化子的平行對"""
    kind: str
    apex: ChuObject
    legs: List[ChuTransform]
    parallel: Tuple[ChuTransform, ...] = ()
    family: Tuple[ChuObject, ...] = ()
    quantaloid: Optional[Quantaloid] = None


def chu_condition_witness(source: ChuObject, target: ChuObject, fwd: QFunctor,
                          bwd: QFunctor) -> Optional[Dict[str, Any]]:
    """第一個使 ψ(f(x),z) ≠ φ(x,g(z)) 的 (x,z)；全部相等時回傳 None"""
    for x in source.domain.objects:
        for z in target.codomain.objects:
            left = target(fwd.mapping[x], z)
            right = source(x, bwd.mapping[z])
            if left != right:
                return {'x': x, 'z': z, 'target_value': left, 'source_value': right}
    return None


def presheaf_square_witness(source: ChuObject, target: ChuObject, fwd: QFunctor,
                            bwd: QFunctor) -> Optional[Dict[str, Any]]:
    """以 presheaf 形式檢查 f*∘ψ̃ = φ̃∘g，f* 以 Kan 公式 (f_♮)* 計算"""
    lower, _ = graphs(fwd)
    for z in target.codomain.objects:
        pulled = pull_back(lower, transpose_at(target.dist, z))
        direct = transpose_at(source.dist, bwd.mapping[z])
        if pulled.extent != direct.extent or pulled.components != direct.components:
            return {'z': z, 'pulled': pulled.name, 'transpose': direct.name}
    return None


def validate_chu_transform(candidate: ChuTransform) -> ChuTransform:
    """
    驗證 Chu 變換

    兩個分量必須是具有正確定義域的 Q-functor；逐點條件與 presheaf 方塊兩種寫法
    必須同時成立或同時失敗。
    """
    phi, psi = candidate.source, candidate.target
    f, g = candidate.fwd, candidate.bwd
    if f.source != phi.domain or f.target != psi.domain:
        raise TypeMismatch("forward part must map dom φ to dom ψ", {'transform': candidate.name})
    if g.source != psi.codomain or g.target != phi.codomain:
        raise TypeMismatch("backward part must map cod ψ to cod φ", {'transform': candidate.name})
    validate_functor(f)
    validate_functor(g)

    pointwise = chu_condition_witness(phi, psi, f, g)
    square = presheaf_square_witness(phi, psi, f, g)
    if (pointwise is None) != (square is None):
        raise FormulationMismatch("pointwise Chu condition and presheaf square disagree",
                                  {'pointwise': pointwise, 'square': square})
    if pointwise is not None:
        raise ChuViolation(f"ψ(f({pointwise['x']}),{pointwise['z']}) ≠ φ({pointwise['x']},g({pointwise['z']}))",
                           pointwise)
    return candidate


def identity_chu(phi: ChuObject) -> ChuTransform:
    return ChuTransform(phi, phi, identity_functor(phi.domain), identity_functor(phi.codomain))


def compose_chu(second: ChuTransform, first: ChuTransform) -> ChuTransform:
    """(f',g')∘(f,g) = (f'f, g g')"""
    if first.target != second.source:
        raise TypeMismatch("Chu transforms are not composable", {'first': first.name, 'second': second.name})
    return ChuTransform(first.source, second.target,
                        compose_functors(second.fwd, first.fwd),
                        compose_functors(first.bwd, second.bwd))


def _shared(family: Sequence[ChuObject], quantaloid: Optional[Quantaloid]) -> Quantaloid:
    Q = quantaloid or (family[0].quantaloid if family else None)
    if Q is None:
        raise BadParameter("an empty family needs an explicit quantaloid")
    return Q


def chu_product(family: Sequence[ChuObject], quantaloid: Optional[Quantaloid] = None) -> ChuCone:
    """dom = ∏ dom φ_i，cod = ∐ cod φ_i，φ(x, s_i(y)) = φ_i(x_i, y)"""
    Q = _shared(family, quantaloid)
    domains = product([phi.domain for phi in family], Q)
    codomains = coproduct([phi.codomain for phi in family], Q)
    X, W = domains.apex, codomains.apex
    value = {}
    for i, phi in enumerate(family):
        p = domains.legs[i].mapping
        for x in X.objects:
            for y in phi.codomain.objects:
                value[(x, tagged_name(i, y))] = phi(p[x], y)
    apex = ChuObject(validate_distributor(QDistributor(X, W, value)), name='chu_product')
    legs = [validate_chu_transform(ChuTransform(apex, phi, domains.legs[i], codomains.legs[i], name=f"pi{i}"))
            for i, phi in enumerate(family)]
    logger.info(f"Chu 乘積建立完成: {len(family)} 個因子")
    return ChuCone('chu-product', apex, legs, family=tuple(family), quantaloid=Q)


def chu_coproduct(family: Sequence[ChuObject], quantaloid: Optional[Quantaloid] = None) -> ChuCone:
    """dom = ∐ dom φ_i，cod = ∏ cod φ_i，φ(s_i(x), y) = φ_i(x, y_i)"""
    Q = _shared(family, quantaloid)
    domains = coproduct([phi.domain for phi in family], Q)
    codomains = product([phi.codomain for phi in family], Q)
    X, W = domains.apex, codomains.apex
    value = {}
    for i, phi in enumerate(family):
        p = codomains.legs[i].mapping
        for x in phi.domain.objects:
            for y in W.objects:
                value[(tagged_name(i, x), y)] = phi(x, p[y])
    apex = ChuObject(validate_distributor(QDistributor(X, W, value)), name='chu_coproduct')
    legs = [validate_chu_transform(ChuTransform(phi, apex, domains.legs[i], codomains.legs[i], name=f"iota{i}"))
            for i, phi in enumerate(family)]
    logger.info(f"Chu 餘積建立完成: {len(family)} 個分量")
    return ChuCone('chu-coproduct', apex, legs, family=tuple(family), quantaloid=Q)


def _check_parallel(t1: ChuTransform, t2: ChuTransform) -> None:
    if t1.source != t2.source or t1.target != t2.target:
        raise TypeMismatch("Chu transforms are not parallel", {'t1': t1.name, 't2': t2.name})


def _quotient_values(rows: Sequence[str], classes: Mapping[str, List[str]],
                     read) -> Dict[Tuple[str, str], str]:
    """在每個類別上讀值並確認所有代表元給出相同結果"""
    value = {}
    for r in rows:
        for cls, members in classes.items():
            seen = {read(r, m) for m in members}
            if len(seen) != 1:
                raise WitnessedIllDefinedness(f"value on class {cls} depends on the representative",
                                              {'row': r, 'class': cls, 'values': sorted(seen)})
            value[(r, cls)] = seen.pop()
    return value


def _members(projection: QFunctor) -> Dict[str, List[str]]:
    classes: Dict[str, List[str]] = {c: [] for c in projection.target.objects}
    for y in projection.source.objects:
        classes[projection.mapping[y]].append(y)
    return classes


def chu_equalizer(t1: ChuTransform, t2: ChuTransform) -> ChuCone:
    """
    U = Eq(f, f̄)、V = Coeq(g, ḡ)，χ(x, p(w)) = φ(i(x), w)
    """
    _check_parallel(t1, t2)
    phi = t1.source
    eq = equalizer(t1.fwd, t2.fwd)
    coeq = coequalizer(t1.bwd, t2.bwd)
    U, V = eq.apex, coeq.apex
    inclusion, projection = eq.legs[0], coeq.legs[0]
    value = _quotient_values(U.objects, _members(projection), lambda x, w: phi(inclusion.mapping[x], w))
    apex = ChuObject(validate_distributor(QDistributor(U, V, value)), name='chu_equalizer')
    leg = validate_chu_transform(ChuTransform(apex, phi, inclusion, projection, name='inclusion'))
    return ChuCone('chu-equalizer', apex, [leg], parallel=(t1, t2), quantaloid=phi.quantaloid)


def chu_coequalizer(t1: ChuTransform, t2: ChuTransform) -> ChuCone:
    """對偶：V' = Coeq(f, f̄)、E = Eq(g, ḡ)，χ(q(y), z) = ψ(y, j(z))"""
    _check_parallel(t1, t2)
    psi = t1.target
    coeq = coequalizer(t1.fwd, t2.fwd)
    eq = equalizer(t1.bwd, t2.bwd)
    V, E = coeq.apex, eq.apex
    projection, inclusion = coeq.legs[0], eq.legs[0]
    transposed = _quotient_values(E.objects, _members(projection), lambda z, y: psi(y, inclusion.mapping[z]))
    value = {(cls, z): v for (z, cls), v in transposed.items()}
    apex = ChuObject(validate_distributor(QDistributor(V, E, value)), name='chu_coequalizer')
    leg = validate_chu_transform(ChuTransform(psi, apex, projection, inclusion, name='projection'))
    return ChuCone('chu-coequalizer', apex, [leg], parallel=(t1, t2), quantaloid=psi.quantaloid)


@dataclass(frozen=True)
class ChuDiagram:
    """有限 QChu 圖：節點為 Chu 物件，箭頭為 Chu 變換"""
    nodes: Dict[str, ChuObject]
    arrows: Dict[str, Tuple[str, str, ChuTransform]]
    quantaloid: Quantaloid
    name: Optional[str] = field(default=None, compare=False)


@dataclass(frozen=True)
class LiftResult:
    """dom-initial lifting：φ: X ⇸ W、cone Γ = (γ, δ) 與中間值"""
    apex: ChuObject
    legs: Dict[str, ChuTransform]
    colimit: QCategory
    debug: Dict[str, Any]


def check_cone(diagram: ChuDiagram, apex: QCategory, legs: Mapping[str, QFunctor]) -> None:
    """γ_j: X → dom φ_j 必須是 Q-functor 且 f_a∘γ_j = γ_k"""
    for node, phi in diagram.nodes.items():
        if node not in legs:
            raise NotACone(f"cone has no leg for {node}", {'node': node})
        leg = legs[node]
        if leg.source != apex or leg.target != phi.domain:
            raise NotACone(f"leg {node} does not map the apex into dom {node}", {'node': node})
        validate_functor(leg)
    for name, (j, k, t) in diagram.arrows.items():
        left = compose_functors(t.fwd, legs[j]).mapping
        if left != legs[k].mapping:
            x = next(x for x in apex.objects if left[x] != legs[k].mapping[x])
            raise NotACone(f"f_{name}∘γ_{j} ≠ γ_{k}", {'arrow': name, 'object': x})


def dom_initial_lift(diagram: ChuDiagram, apex: QCategory, legs: Mapping[str, QFunctor]) -> LiftResult:
    """
    dom-initial lifting of a cone γ: ΔX → dom D

    W = colim cod D 以餘積再取餘等化子計算；φ̃: W → PX 由 φ̃∘δ_j = γ_j*∘κ̃_j 唯一決定，
    φ(x, w) = (φ̃(w))_x。
    """
    Q = diagram.quantaloid
    check_cone(diagram, apex, legs)
    nodes = list(diagram.nodes)
    position = {node: i for i, node in enumerate(nodes)}

    # cod D 是反變的：箭頭 a: j → k 給出 g_a: W_k → W_j
    summands = coproduct([diagram.nodes[n].codomain for n in nodes], Q)
    arrow_names = list(diagram.arrows)
    sources = coproduct([diagram.nodes[diagram.arrows[a][1]].codomain for a in arrow_names], Q)
    direct, via = {}, {}
    for i, a in enumerate(arrow_names):
        j, k, t = diagram.arrows[a]
        for z in t.bwd.source.objects:
            direct[tagged_name(i, z)] = tagged_name(position[k], z)
            via[tagged_name(i, z)] = tagged_name(position[j], t.bwd.mapping[z])
    glue = coequalizer(QFunctor(sources.apex, summands.apex, direct),
                       QFunctor(sources.apex, summands.apex, via))
    W = glue.apex
    pi = glue.legs[0].mapping
    delta = {n: QFunctor(diagram.nodes[n].codomain, W,
                         {y: pi[tagged_name(position[n], y)] for y in diagram.nodes[n].codomain.objects},
                         name=f"delta_{n}")
             for n in nodes}

    kappa, gamma_star = {}, {}
    for n in nodes:
        phi_n = diagram.nodes[n]
        kappa[n] = {y: transpose_at(phi_n.dist, y).name for y in phi_n.codomain.objects}
        gamma_star[n] = {}
        for y in phi_n.codomain.objects:
            pulled = pull_back(graphs(legs[n])[0], transpose_at(phi_n.dist, y))
            gamma_star[n][y] = pulled.name

    classes = _members(glue.legs[0])
    lifted = {}
    for w, members in classes.items():
        seen = {}
        for tagged in members:
            i, y = tagged.split(':', 1)
            n = nodes[int(i)]
            seen[n + '/' + y] = gamma_star[n][y]
        if len(set(seen.values())) != 1:
            raise WitnessedIllDefinedness(f"φ̃({w}) depends on the representative", {'class': w, 'values': seen})
        lifted[w] = next(iter(seen.values()))

    value = {}
    for w, members in classes.items():
        i, y = members[0].split(':', 1)
        n = nodes[int(i)]
        for x in apex.objects:
            value[(x, w)] = diagram.nodes[n](legs[n].mapping[x], y)
    phi = ChuObject(validate_distributor(QDistributor(apex, W, value)), name='lift')
    lifted_legs = {n: validate_chu_transform(ChuTransform(phi, diagram.nodes[n], legs[n], delta[n], name=f"Gamma_{n}"))
                   for n in nodes}
    debug = {
        'kappa': kappa,
        'gamma_star': gamma_star,
        'delta': {n: dict(delta[n].mapping) for n in nodes},
        'transpose': lifted,
    }
    logger.info(f"dom-initial lifting 完成: {len(nodes)} 個節點, |W| = {len(W)}")
    return LiftResult(phi, lifted_legs, W, debug)


@dataclass(frozen=True)
class GeneratorFamily:
    """
    生成族

    default:     {η_s: ∅ ⇸ D_s} ∪ {λ_t: {t} ⇸ Ĉ}
    alternative: {λ_∅: ∅ ⇸ Ĉ} ∪ {λ_t: {t} ⇸ Ĉ}
    """
    quantaloid: Quantaloid
    mode: str
    members: Dict[str, ChuObject]
    cogenerators: Dict[str, QCategory]
    doubled: QCategory
    singletons: Dict[str, QCategory]

    def hat_object(self, t: str, s: str, u: str, tag: int) -> str:
        """Ĉ 中代表箭頭 u: t → s 的物件 (u, tag)"""
        index = self.quantaloid.objects.index(t)
        return doubled_name(tagged_name(index, presheaf_name(s, {t: u})), tag)


def singleton(quantaloid: Quantaloid, t: str) -> QCategory:
    """離散的單物件 Q-category {t}"""
    return free_structure('discrete', quantaloid, {t: t}, name=f"{{{t}}}")


def cogenerator_probe(quantaloid: Quantaloid) -> Dict[str, QCategory]:
    """D_s = {s} + ob Q，extent 即自身，不離散結構"""
    result = {}
    for s in quantaloid.objects:
        extent = {tagged_name(0, s): s}
        extent.update({tagged_name(1, q): q for q in quantaloid.objects})
        result[s] = free_structure('indiscrete', quantaloid, extent, name=f"D_{s}")
    return result


def double(X: QCategory) -> QCategory:
    """X̂ = X × {1,2}，â((x,i),(y,j)) = a(x,y)"""
    objects = [doubled_name(x, i) for x in X.objects for i in (1, 2)]
    origin = {doubled_name(x, i): x for x in X.objects for i in (1, 2)}
    return make_category(X.quantaloid, objects, {o: X.extent[origin[o]] for o in objects},
                         {(o, p): X.hom[(origin[o], origin[p])] for o in objects for p in objects},
                         name=f"{X.name}^" if X.name else None)


def generator_family(quantaloid: Quantaloid, mode: str = 'default') -> GeneratorFamily:
    """
    建立生成族，並確認 [(u,i),(v,j)]∘λ_t(u,i) = (v↙u)∘u ≤ v

    參數:
        quantaloid: Q
        mode: 'default' 或 'alternative'
    """
    if mode not in ('default', 'alternative'):
        raise BadParameter(f"unknown generator mode {mode!r}", {'mode': mode})
    Q = quantaloid
    singletons = {t: singleton(Q, t) for t in Q.objects}
    pieces = [presheaf_category(singletons[t]) for t in Q.objects]
    C = coproduct([p.category for p in pieces], Q).apex
    C_hat = double(C)

    arrow_of: Dict[str, Tuple[str, str, str]] = {}
    for index, (t, piece) in enumerate(zip(Q.objects, pieces)):
        for pname, presheaf in piece.presheaves.items():
            for tag in (1, 2):
                arrow_of[doubled_name(tagged_name(index, pname), tag)] = (t, presheaf.extent, presheaf[t])

    members: Dict[str, ChuObject] = {}
    empty = initial(Q)
    cogenerators = cogenerator_probe(Q)
    if mode == 'default':
        for s, D_s in cogenerators.items():
            members[f"eta:{s}"] = ChuObject(validate_distributor(QDistributor(empty, D_s, {})), name=f"eta:{s}")
    else:
        members['lambda:∅'] = ChuObject(validate_distributor(QDistributor(empty, C_hat, {})), name='lambda:∅')

    for t in Q.objects:
        value = {}
        for obj in C_hat.objects:
            dom, cod, u = arrow_of[obj]
            value[(t, obj)] = u if dom == t else Q.bottom(t, cod)
        for obj in C_hat.objects:
            dom, s, u = arrow_of[obj]
            if dom != t:
                continue
            for other in C_hat.objects:
                dom_v, r, v = arrow_of[other]
                if dom_v != t:
                    continue
                residual = Q.residual_left(v, u, t, s, r)
                if C_hat.hom[(obj, other)] != residual:
                    raise FormulationMismatch(f"[{obj},{other}] ≠ {v}↙{u}", {'pair': [obj, other]})
                acted = Q.compose(residual, u, t, s, r)
                if not Q.leq(t, r, acted, v):
                    raise FormulationMismatch(f"({v}↙{u})∘{u} ≰ {v}", {'pair': [obj, other]})
        members[f"lambda:{t}"] = ChuObject(
            validate_distributor(QDistributor(singletons[t], C_hat, value)), name=f"lambda:{t}")
    logger.info(f"生成族建立完成 ({mode}): {len(members)} 個成員, |Ĉ| = {len(C_hat)}")
    return GeneratorFamily(Q, mode, members, cogenerators, C_hat, singletons)


@dataclass(frozen=True)
class Separation:
    """separate 的結果：使用的分支、生成元與 m: G → φ"""
    case: int
    generator: str
    morphism: ChuTransform


def separate(t1: ChuTransform, t2: ChuTransform, family: Optional[GeneratorFamily] = None,
             mode: str = 'default') -> Separation:
    """
    找出生成元 G 與 m: G → φ 使 t1∘m ≠ t2∘m

    Case 1：X = ∅，default 模式窮舉 (s, h: W → D_s)；alternative 模式改用 λ_∅ 與 ⊤
    Case 2：f(x₀) ≠ f̄(x₀)
    Case 3：X ≠ ∅ 且 g(z₀) ≠ ḡ(z₀)
    """
    _check_parallel(t1, t2)
    if t1.same_as(t2):
        raise NotDistinct("the transforms are equal; nothing to separate", {'t1': t1.name, 't2': t2.name})
    phi = t1.source
    Q = phi.quantaloid
    family = family or generator_family(Q, mode)
    X, W = phi.domain, phi.codomain
    f1, f2 = t1.fwd.mapping, t2.fwd.mapping
    g1, g2 = t1.bwd.mapping, t2.bwd.mapping
    z0 = next((z for z in t1.bwd.source.objects if g1[z] != g2[z]), None)

    if not X.objects:
        case = 1
        if family.mode == 'default':
            found = _search_cogenerator(family, W, g1, g2)
            generator, h = found
            fwd = identity_functor(X)
        else:
            q = Q.objects[0]
            generator = 'lambda:∅'
            h = {w: family.hat_object(q, W.extent[w], Q.top(q, W.extent[w]), 2 if w == g2[z0] else 1)
                 for w in W.objects}
            fwd = identity_functor(X)
    else:
        x_diff = next((x for x in X.objects if f1[x] != f2[x]), None)
        case = 2 if x_diff is not None else 3
        x0 = x_diff if x_diff is not None else X.objects[0]
        t = X.extent[x0]
        generator = f"lambda:{t}"
        marked = g2[z0] if case == 3 else None
        h = {w: family.hat_object(t, W.extent[w], phi(x0, w), 2 if w == marked else 1) for w in W.objects}
        G = family.members[generator].domain
        fwd = QFunctor(G, X, {t: x0})

    G_obj = family.members[generator]
    m = validate_chu_transform(ChuTransform(G_obj, phi, fwd, QFunctor(W, G_obj.codomain, h), name='m'))
    if compose_chu(t1, m).same_as(compose_chu(t2, m)):
        raise FormulationMismatch("separating morphism does not separate", {'case': case, 'generator': generator})
    logger.debug(f"分離完成: case {case}, 生成元 {generator}")
    return Separation(case, generator, m)


def _search_cogenerator(family: GeneratorFamily, W: QCategory, g1: Mapping[str, str],
                        g2: Mapping[str, str]) -> Tuple[str, Dict[str, str]]:
    """依 ob Q 與映射的字典序尋找 h: W → D_s 使 hg ≠ hḡ"""
    for s, D_s in family.cogenerators.items():
        for h in enumerate_functors(W, D_s, capped=False):
            if any(h.mapping[g1[z]] != h.mapping[g2[z]] for z in g1):
                return f"eta:{s}", h.mapping
    raise FormulationMismatch("no cogenerator map separates the backward parts", {})
