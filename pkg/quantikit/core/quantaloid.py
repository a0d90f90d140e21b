# quantikit/core/quantaloid.py
import itertools
import logging
from dataclasses import dataclass
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Tuple

from quantikit.config.settings import Settings
from quantikit.core.errors import (
    BadParameter,
    FormulationMismatch,
    NotAssociative,
    NotSupPreserving,
    NotUnital,
    SizeCap,
    TypeMismatch,
)
from quantikit.core.lattice import FiniteLattice, chain_lattice

logger = logging.getLogger(__name__)

HomKey = Tuple[str, str]
TripleKey = Tuple[str, str, str]
Arrow = Tuple[str, str, str]  # (dom, cod, element)

QUANTALE_OBJECT = '*'


class Quantaloid:
    """
    有限 quantaloid：物件、hom 格、合成表與單位元

    compose(g, f, q, r, s) 代表 g∘f，其中 f ∈ Q(q,r)、g ∈ Q(r,s)。
    左右剩餘 (d↙u, v↘d) 以窮舉求最大值，依 hom 三元組延遲快取。
    """

    def __init__(self, objects: Sequence[str], homs: Mapping[HomKey, FiniteLattice],
                 compose: Mapping[TripleKey, Mapping[Tuple[str, str], str]],
                 identities: Mapping[str, str], name: Optional[str] = None):
        self.objects: Tuple[str, ...] = tuple(objects)
        self.homs: Dict[HomKey, FiniteLattice] = dict(homs)
        self._compose: Dict[TripleKey, Dict[Tuple[str, str], str]] = {k: dict(v) for k, v in compose.items()}
        self.identities: Dict[str, str] = dict(identities)
        self.name = name or 'explicit'
        self._left: Dict[TripleKey, Dict[Tuple[str, str], str]] = {}
        self._right: Dict[TripleKey, Dict[Tuple[str, str], str]] = {}
        self._opposite: Optional['Quantaloid'] = None

    def __repr__(self) -> str:
        return f"Quantaloid({self.name}, objects={list(self.objects)})"

    def hom(self, q: str, r: str) -> FiniteLattice:
        try:
            return self.homs[(q, r)]
        except KeyError:
            raise TypeMismatch(f"no hom-lattice Q({q},{r})", {'hom': [q, r]}) from None

    def identity(self, q: str) -> str:
        try:
            return self.identities[q]
        except KeyError:
            raise TypeMismatch(f"unknown Q-object {q!r}", {'object': q}) from None

    def bottom(self, q: str, r: str) -> str:
        return self.hom(q, r).bottom

    def top(self, q: str, r: str) -> str:
        return self.hom(q, r).top

    def leq(self, q: str, r: str, a: str, b: str) -> bool:
        return self.hom(q, r).leq(a, b)

    def join(self, q: str, r: str, subset: Iterable[str]) -> str:
        return self.hom(q, r).join(subset)

    def meet(self, q: str, r: str, subset: Iterable[str]) -> str:
        return self.hom(q, r).meet(subset)

    def compose_table(self, q: str, r: str, s: str) -> Dict[Tuple[str, str], str]:
        try:
            return self._compose[(q, r, s)]
        except KeyError:
            raise TypeMismatch(f"no composition table for {q}->{r}->{s}", {'path': [q, r, s]}) from None

    def compose(self, g: str, f: str, q: str, r: str, s: str) -> str:
        """g∘f，f: q→r，g: r→s"""
        try:
            return self.compose_table(q, r, s)[(g, f)]
        except KeyError:
            raise TypeMismatch(f"cannot compose {g} ∈ Q({r},{s}) with {f} ∈ Q({q},{r})",
                               {'g': g, 'f': f, 'path': [q, r, s]}) from None

    def residual_left(self, d: str, u: str, q: str, r: str, s: str) -> str:
        """d↙u：使 z∘u ≤ d 的最大 z ∈ Q(r,s)，其中 d ∈ Q(q,s)、u ∈ Q(q,r)"""
        table = self._left.get((q, r, s))
        if table is None:
            table = self._left[(q, r, s)] = self._residual_table_left(q, r, s)
        try:
            return table[(d, u)]
        except KeyError:
            raise TypeMismatch(f"{d} ↙ {u} is not typed as Q({q},{s}) ↙ Q({q},{r})",
                               {'d': d, 'u': u, 'path': [q, r, s]}) from None

    def residual_right(self, v: str, d: str, q: str, r: str, s: str) -> str:
        """v↘d：使 v∘t ≤ d 的最大 t ∈ Q(q,r)，其中 v ∈ Q(r,s)、d ∈ Q(q,s)"""
        table = self._right.get((q, r, s))
        if table is None:
            table = self._right[(q, r, s)] = self._residual_table_right(q, r, s)
        try:
            return table[(v, d)]
        except KeyError:
            raise TypeMismatch(f"{v} ↘ {d} is not typed as Q({r},{s}) ↘ Q({q},{s})",
                               {'v': v, 'd': d, 'path': [q, r, s]}) from None

    def _residual_table_left(self, q: str, r: str, s: str) -> Dict[Tuple[str, str], str]:
        target, by, scan = self.hom(q, s), self.hom(q, r), self.hom(r, s)
        table = {}
        for d in target:
            for u in by:
                below = [z for z in scan if target.leq(self.compose(z, u, q, r, s), d)]
                table[(d, u)] = _largest(scan, below, witness={'d': d, 'u': u, 'path': [q, r, s]})
        return table

    def _residual_table_right(self, q: str, r: str, s: str) -> Dict[Tuple[str, str], str]:
        target, by, scan = self.hom(q, s), self.hom(r, s), self.hom(q, r)
        table = {}
        for v in by:
            for d in target:
                below = [t for t in scan if target.leq(self.compose(v, t, q, r, s), d)]
                table[(v, d)] = _largest(scan, below, witness={'v': v, 'd': d, 'path': [q, r, s]})
        return table

    def arrows(self) -> List[Arrow]:
        return [(q, r, e) for q in self.objects for r in self.objects for e in self.hom(q, r)]

    def opposite(self) -> 'Quantaloid':
        if self._opposite is None:
            self._opposite = opposite(self)
        return self._opposite


def _largest(lattice: FiniteLattice, candidates: List[str], witness: dict) -> str:
    for c in candidates:
        if all(lattice.leq(other, c) for other in candidates):
            return c
    raise NotSupPreserving("residual has no largest solution; composition does not preserve joins", witness)


def validate_quantaloid(objects: Sequence[str], homs: Mapping[HomKey, FiniteLattice],
                        compose: Mapping[TripleKey, Mapping[Tuple[str, str], str]],
                        identities: Mapping[str, str], name: Optional[str] = None) -> Quantaloid:
    """
    驗證 quantaloid 公理：合成表完整、單位律、結合律、對 join 保持（含空 join）

    任何違反都附帶具體的見證三元組。
    """
    objects = list(objects)
    for q in objects:
        for r in objects:
            if (q, r) not in homs:
                raise TypeMismatch(f"missing hom-lattice Q({q},{r})", {'hom': [q, r]})
        if q not in identities:
            raise TypeMismatch(f"missing identity for {q}", {'object': q})
        if identities[q] not in homs[(q, q)]:
            raise TypeMismatch(f"identity {identities[q]!r} is not in Q({q},{q})",
                               {'object': q, 'identity': identities[q]})

    for q, r, s in itertools.product(objects, repeat=3):
        table = compose.get((q, r, s))
        if table is None:
            raise TypeMismatch(f"missing composition table {q}->{r}->{s}", {'path': [q, r, s]})
        for g in homs[(r, s)]:
            for f in homs[(q, r)]:
                gf = table.get((g, f))
                if gf is None:
                    raise TypeMismatch(f"composition {g}∘{f} undefined on {q}->{r}->{s}",
                                       {'g': g, 'f': f, 'path': [q, r, s]})
                if gf not in homs[(q, s)]:
                    raise TypeMismatch(f"{g}∘{f} = {gf!r} is not in Q({q},{s})",
                                       {'g': g, 'f': f, 'value': gf, 'path': [q, r, s]})

    quantaloid = Quantaloid(objects, homs, compose, identities, name=name)
    _check_unital(quantaloid)
    _check_sup_preserving(quantaloid)
    _check_associative(quantaloid)
    logger.info(f"quantaloid {quantaloid.name} 驗證完成: {len(objects)} 個物件, {len(quantaloid.arrows())} 個態射")
    return quantaloid


def _check_unital(Q: Quantaloid) -> None:
    for q, r in itertools.product(Q.objects, repeat=2):
        for f in Q.hom(q, r):
            left = Q.compose(Q.identity(r), f, q, r, r)
            if left != f:
                raise NotUnital(f"1_{r}∘{f} = {left} ≠ {f}",
                                {'identity': Q.identity(r), 'f': f, 'composite': left, 'path': [q, r, r]})
            right = Q.compose(f, Q.identity(q), q, q, r)
            if right != f:
                raise NotUnital(f"{f}∘1_{q} = {right} ≠ {f}",
                                {'identity': Q.identity(q), 'f': f, 'composite': right, 'path': [q, q, r]})


def _check_sup_preserving(Q: Quantaloid) -> None:
    # 空 join 與二元 join 足以涵蓋有限格上的所有 join
    for q, r, s in itertools.product(Q.objects, repeat=3):
        lower, upper, target = Q.hom(q, r), Q.hom(r, s), Q.hom(q, s)
        for g in upper:
            if Q.compose(g, lower.bottom, q, r, s) != target.bottom:
                raise NotSupPreserving(f"{g}∘⊥ ≠ ⊥", {'g': g, 'f': lower.bottom, 'path': [q, r, s]})
            for f1, f2 in itertools.combinations(lower, 2):
                joined = Q.compose(g, lower.join2(f1, f2), q, r, s)
                expected = target.join2(Q.compose(g, f1, q, r, s), Q.compose(g, f2, q, r, s))
                if joined != expected:
                    raise NotSupPreserving(f"{g}∘({f1}∨{f2}) ≠ {g}∘{f1} ∨ {g}∘{f2}",
                                           {'g': g, 'f': [f1, f2], 'path': [q, r, s]})
        for f in lower:
            if Q.compose(upper.bottom, f, q, r, s) != target.bottom:
                raise NotSupPreserving(f"⊥∘{f} ≠ ⊥", {'g': upper.bottom, 'f': f, 'path': [q, r, s]})
            for g1, g2 in itertools.combinations(upper, 2):
                joined = Q.compose(upper.join2(g1, g2), f, q, r, s)
                expected = target.join2(Q.compose(g1, f, q, r, s), Q.compose(g2, f, q, r, s))
                if joined != expected:
                    raise NotSupPreserving(f"({g1}∨{g2})∘{f} ≠ {g1}∘{f} ∨ {g2}∘{f}",
                                           {'g': [g1, g2], 'f': f, 'path': [q, r, s]})


def _check_associative(Q: Quantaloid) -> None:
    for q, r, s, t in itertools.product(Q.objects, repeat=4):
        for h in Q.hom(s, t):
            for g in Q.hom(r, s):
                hg = Q.compose(h, g, r, s, t)
                for f in Q.hom(q, r):
                    left = Q.compose(hg, f, q, r, t)
                    right = Q.compose(h, Q.compose(g, f, q, r, s), q, s, t)
                    if left != right:
                        raise NotAssociative(f"({h}∘{g})∘{f} = {left} ≠ {right} = {h}∘({g}∘{f})",
                                             {'h': h, 'g': g, 'f': f, 'path': [q, r, s, t]})


def opposite(Q: Quantaloid) -> Quantaloid:
    """Q^op：Q^op(q,r) = Q(r,q)，g∘'f = f∘g；兩次取反得回原物件"""
    homs = {(q, r): Q.hom(r, q) for q in Q.objects for r in Q.objects}
    compose = {}
    for q, r, s in itertools.product(Q.objects, repeat=3):
        source = Q.compose_table(s, r, q)
        compose[(q, r, s)] = {(g, f): gf for (f, g), gf in source.items()}
    name = Q.name[3:-1] if Q.name.startswith('op(') and Q.name.endswith(')') else f"op({Q.name})"
    result = Quantaloid(Q.objects, homs, compose, Q.identities, name=name)
    result._opposite = Q
    return result


def builtin(name: str, n: Optional[int] = None) -> Quantaloid:
    """
    內建 quantale

    two:   {0<1}，∘ = ∧，單位元 1
    chain: {0..n}，quantale 順序為數值 ≥（bottom = n、top = 0），∘ = min(a+b, n)，單位元 0
    """
    q = QUANTALE_OBJECT
    if name == 'two':
        lattice = chain_lattice(['0', '1'])
        table = {(g, f): lattice.meet2(g, f) for g in lattice for f in lattice}
        return validate_quantaloid([q], {(q, q): lattice}, {(q, q, q): table}, {q: '1'}, name='two')
    if name == 'chain':
        if n is None or not isinstance(n, int) or isinstance(n, bool) or n < 1:
            raise BadParameter(f"chain needs a positive integer n, got {n!r}", {'n': n})
        lattice = chain_lattice([str(k) for k in range(n, -1, -1)])
        table = {(str(a), str(b)): str(min(a + b, n)) for a in range(n + 1) for b in range(n + 1)}
        return validate_quantaloid([q], {(q, q): lattice}, {(q, q, q): table}, {q: '0'}, name=f"chain:{n}")
    raise BadParameter(f"unknown builtin quantaloid {name!r}", {'name': name})


def resolve_builtin(reference: str) -> Quantaloid:
    """解析 'builtin:two' 或 'builtin:chain:5'"""
    parts = reference.split(':')
    if parts[0] != 'builtin' or len(parts) < 2:
        raise BadParameter(f"not a builtin reference: {reference!r}", {'reference': reference})
    if parts[1] == 'chain':
        if len(parts) != 3 or not parts[2].isdigit():
            raise BadParameter(f"chain builtin needs a size, e.g. builtin:chain:5 (got {reference!r})",
                               {'reference': reference})
        return builtin('chain', int(parts[2]))
    if len(parts) != 2:
        raise BadParameter(f"malformed builtin reference {reference!r}", {'reference': reference})
    return builtin(parts[1])


@dataclass(frozen=True)
class DiagonalConstruction:
    """D(Q) 與完全嵌入 Q → D(Q)"""
    quantaloid: Quantaloid
    base: Quantaloid
    arrow_of: Dict[str, Arrow]
    embedding: Dict[Arrow, Tuple[str, str, str]]

    def object_of(self, q: str, r: str, element: str) -> str:
        return arrow_name(self.base, q, r, element)


def arrow_name(Q: Quantaloid, q: str, r: str, element: str) -> str:
    """D(Q) 物件名稱；單物件 quantale 直接用元素名稱"""
    if len(Q.objects) == 1:
        return element
    return f"{q}~{r}:{element}"


def is_diagonal(Q: Quantaloid, d: str, u: Arrow, v: Arrow) -> bool:
    """(d↙u)∘u = d = v∘(v↘d)，d ∈ Q(dom u, cod v)"""
    (q, r, eu), (p, s, ev) = u, v
    left = Q.compose(Q.residual_left(d, eu, q, r, s), eu, q, r, s)
    right = Q.compose(ev, Q.residual_right(ev, d, q, p, s), q, p, s)
    return left == d and right == d


def diagonal(Q: Quantaloid) -> DiagonalConstruction:
    """
    對角線構造 D(Q)

    物件為 Q 的所有態射；hom(u,v) 為 Q(dom u, cod v) 中的對角線；
    合成 e◇d = (e↙v)∘d，並檢查與 e∘(v↘d) 一致；u 上的單位元為 u 本身。
    """
    arrows = Q.arrows()
    if len(arrows) > Settings.DIAGONAL_CAP:
        raise SizeCap(f"D(Q) needs {len(arrows)} objects, cap is {Settings.DIAGONAL_CAP}",
                      {'objects': len(arrows), 'cap': Settings.DIAGONAL_CAP})

    names = [arrow_name(Q, *a) for a in arrows]
    arrow_of = dict(zip(names, arrows))
    homs: Dict[HomKey, FiniteLattice] = {}
    for un, u in zip(names, arrows):
        for vn, v in zip(names, arrows):
            ambient = Q.hom(u[0], v[1])
            members = [d for d in ambient if is_diagonal(Q, d, u, v)]
            for a, b in itertools.combinations(members, 2):
                if ambient.join2(a, b) not in members:
                    raise NotSupPreserving(f"diagonals {a}, {b} from {un} to {vn} are not closed under joins",
                                           {'u': un, 'v': vn, 'pair': [a, b]})
            if ambient.bottom not in members:
                raise NotSupPreserving(f"⊥ is not a diagonal from {un} to {vn}", {'u': un, 'v': vn})
            homs[(un, vn)] = ambient.restrict(members)

    compose = {}
    for (un, u), (vn, v), (wn, w) in itertools.product(zip(names, arrows), repeat=3):
        q, s, t = u[0], v[1], w[1]
        table = {}
        for e in homs[(vn, wn)]:
            e_over_v = Q.residual_left(e, v[2], v[0], s, t)
            for d in homs[(un, vn)]:
                composite = Q.compose(e_over_v, d, q, s, t)
                other = Q.compose(e, Q.residual_right(v[2], d, q, v[0], s), q, v[0], t)
                if composite != other:
                    raise FormulationMismatch(f"(e↙v)∘d ≠ e∘(v↘d) for e={e}, d={d}",
                                              {'u': un, 'v': vn, 'w': wn, 'e': e, 'd': d,
                                               'left': composite, 'right': other})
                table[(e, d)] = composite
        compose[(un, vn, wn)] = table

    identities = {n: a[2] for n, a in zip(names, arrows)}
    result = validate_quantaloid(names, homs, compose, identities, name=f"diagonal({Q.name})")
    embedding = {
        (q, r, e): (arrow_name(Q, q, q, Q.identity(q)), arrow_name(Q, r, r, Q.identity(r)), e)
        for q, r, e in arrows
    }
    logger.info(f"D({Q.name}) 建立完成: {len(names)} 個物件")
    return DiagonalConstruction(quantaloid=result, base=Q, arrow_of=arrow_of, embedding=embedding)
