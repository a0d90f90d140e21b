# quantikit/serialization/bundle.py
import logging
import re
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Callable, Dict, Optional, Tuple

import ujson as json

from quantikit.config.settings import Settings
from quantikit.core.errors import (
    BadParameter,
    BundleSyntaxError,
    BundleValidationError,
    TypeMismatch,
    UnresolvedReference,
    ValidationFailure,
)
from quantikit.core.lattice import validate_lattice
from quantikit.core.qcat import QCategory, QFunctor, make_category, validate_category, validate_functor
from quantikit.core.qchu import ChuDiagram, ChuObject, ChuTransform, validate_chu_transform
from quantikit.core.qdist import QDistributor, validate_distributor
from quantikit.core.quantaloid import DiagonalConstruction, Quantaloid, builtin, diagonal, validate_quantaloid
from quantikit.serialization.schema import check_shape

logger = logging.getLogger(__name__)


# 預編譯正規表達式（模組層級，只編譯一次）
class BundlePatterns:
    """bundle 中 hom 與合成表的鍵格式"""
    HOM_KEY = re.compile(r'^(.+?)->(.+)$')
    COMPOSE_KEY = re.compile(r'^\((.+?)->(.+?)\)\*\((.+?)->(.+?)\)$')


@dataclass(frozen=True)
class BundleCone:
    """QCat 中指向某個 Chu 圖 dom 部分的 cone"""
    apex: QCategory
    diagram: str
    legs: Dict[str, QFunctor]


@dataclass
class DefinitionBundle:
    """解析並驗證完成的定義檔"""
    quantaloid: Quantaloid
    quantaloid_source: Dict[str, Any]
    format: int = Settings.BUNDLE_FORMAT_VERSION
    diagonal: Optional[DiagonalConstruction] = None
    categories: Dict[str, QCategory] = field(default_factory=dict)
    functors: Dict[str, QFunctor] = field(default_factory=dict)
    distributors: Dict[str, QDistributor] = field(default_factory=dict)
    transforms: Dict[str, ChuTransform] = field(default_factory=dict)
    diagrams: Dict[str, ChuDiagram] = field(default_factory=dict)
    cones: Dict[str, BundleCone] = field(default_factory=dict)

    @property
    def chu_objects(self) -> Dict[str, ChuObject]:
        return {name: ChuObject(phi, name=name) for name, phi in self.distributors.items()}

    def lookup(self, section: str, name: str, path: str):
        table = getattr(self, section)
        if name not in table:
            raise UnresolvedReference(f"{path}: unknown {section[:-1]} {name!r}",
                                      {'path': path, 'section': section, 'name': name})
        return table[name]


def _validated(path: str, build: Callable[[], Any]):
    """執行建構並把模組的驗證錯誤包成帶路徑的 BundleValidationError"""
    try:
        return build()
    except BundleValidationError:
        raise
    except ValidationFailure as e:
        raise BundleValidationError(path, e) from e


def resolve_quantaloid(section: Dict[str, Any], path: str = '/quantaloid') -> Tuple[Quantaloid, Optional[DiagonalConstruction]]:
    """
    解析 quantaloid 區段

    參數:
        section: {"builtin": "two"}、{"builtin": "chain", "n": 5}、{"builtin": "diagonal", "of": {...}} 或顯式表格
    返回:
        (Quantaloid, 若為對角線構造則附上 DiagonalConstruction)
    """
    if 'builtin' in section:
        kind = section['builtin']
        if kind == 'diagonal':
            if 'of' not in section:
                raise BadParameter(f"{path}: diagonal needs an 'of' quantaloid", {'path': path})
            base, _ = resolve_quantaloid(section['of'], f"{path}/of")
            construction = _validated(path, lambda: diagonal(base))
            return construction.quantaloid, construction
        if kind == 'chain' and 'n' not in section:
            raise BadParameter(f"{path}: chain needs n", {'path': path})
        return _validated(path, lambda: builtin(kind, section.get('n'))), None

    objects = list(section['objects'])
    homs = {}
    for key, body in section['homs'].items():
        match = BundlePatterns.HOM_KEY.match(key)
        if not match:
            raise BundleSyntaxError(f"{path}/homs/{key}: hom keys look like 'q->r'", {'path': f"{path}/homs/{key}"})
        pairs = [tuple(p) for p in body.get('leq', [])]
        homs[(match.group(1), match.group(2))] = _validated(
            f"{path}/homs/{key}", lambda body=body, pairs=pairs: validate_lattice(body['elements'], pairs))
    compose: Dict[Tuple[str, str, str], Dict[Tuple[str, str], str]] = {}
    for key, rows in section['compose'].items():
        match = BundlePatterns.COMPOSE_KEY.match(key)
        if not match or match.group(1) != match.group(4):
            raise BundleSyntaxError(f"{path}/compose/{key}: composition keys look like '(r->s)*(q->r)'",
                                    {'path': f"{path}/compose/{key}"})
        r, s, q = match.group(1), match.group(2), match.group(3)
        compose[(q, r, s)] = {(g, f): gf for g, f, gf in rows}
    return _validated(path, lambda: validate_quantaloid(
        objects, homs, compose, section['identities'], name=section.get('name'))), None


def _category(name: str, body: Dict[str, Any], Q: Quantaloid) -> QCategory:
    path = f"/categories/{name}"
    objects, extent = [], {}
    for i, item in enumerate(body['objects']):
        if isinstance(item, str):
            if len(Q.objects) != 1:
                raise BadParameter(f"{path}/objects/{i}: extent is required over a quantaloid with several objects",
                                   {'path': f"{path}/objects/{i}"})
            objects.append(item)
            extent[item] = Q.objects[0]
        else:
            objects.append(item['name'])
            if 'extent' in item:
                extent[item['name']] = item['extent']
            elif len(Q.objects) == 1:
                extent[item['name']] = Q.objects[0]
            else:
                raise BadParameter(f"{path}/objects/{i}: missing extent", {'path': f"{path}/objects/{i}"})
    for x in objects:
        if extent[x] not in Q.identities:
            raise BundleValidationError(path, TypeMismatch(f"unknown extent {extent[x]!r} for {x!r}",
                                                           {'object': x, 'extent': extent[x]}))
    hom = {}
    for x in objects:
        for y in objects:
            hom[(x, y)] = Q.identity(extent[x]) if x == y else Q.bottom(extent[x], extent[y])
    for i, (x, y, value) in enumerate(body.get('hom', [])):
        if x not in extent or y not in extent:
            raise UnresolvedReference(f"{path}/hom/{i}: unknown object in ({x}, {y})",
                                      {'path': f"{path}/hom/{i}", 'pair': [x, y]})
        hom[(x, y)] = value
    return _validated(path, lambda: validate_category(make_category(Q, objects, extent, hom, name=name)))


def parse_document(document: Dict[str, Any]) -> DefinitionBundle:
    """解析已載入的 JSON 文件（結構檢查、引用解析、語意驗證）"""
    check_shape(document)
    Q, construction = resolve_quantaloid(document['quantaloid'])
    bundle = DefinitionBundle(quantaloid=Q, quantaloid_source=document['quantaloid'],
                              format=document.get('format', Settings.BUNDLE_FORMAT_VERSION), diagonal=construction)

    for name, body in document.get('categories', {}).items():
        bundle.categories[name] = _category(name, body, Q)

    for name, body in document.get('functors', {}).items():
        path = f"/functors/{name}"
        X = bundle.lookup('categories', body['from'], f"{path}/from")
        Y = bundle.lookup('categories', body['to'], f"{path}/to")
        for x in X.objects:
            if x not in body['map']:
                raise BundleValidationError(path, TypeMismatch(f"object {x!r} is not mapped", {'object': x}))
        for x, y in body['map'].items():
            if x not in X.extent:
                raise UnresolvedReference(f"{path}/map/{x}: unknown source object", {'path': f"{path}/map/{x}"})
            if y not in Y.extent:
                raise UnresolvedReference(f"{path}/map/{x}: unknown target object {y!r}", {'path': f"{path}/map/{x}"})
        bundle.functors[name] = _validated(path, lambda X=X, Y=Y, body=body, name=name: validate_functor(
            QFunctor(X, Y, {x: body['map'][x] for x in X.objects}, name=name)))

    for name, body in document.get('distributors', {}).items():
        path = f"/distributors/{name}"
        X = bundle.lookup('categories', body['from'], f"{path}/from")
        Y = bundle.lookup('categories', body['to'], f"{path}/to")
        value = {(x, y): Q.bottom(X.extent[x], Y.extent[y]) for x in X.objects for y in Y.objects}
        for i, (x, y, v) in enumerate(body.get('value', [])):
            if (x, y) not in value:
                raise UnresolvedReference(f"{path}/value/{i}: unknown pair ({x}, {y})",
                                          {'path': f"{path}/value/{i}", 'pair': [x, y]})
            value[(x, y)] = v
        bundle.distributors[name] = _validated(path, lambda X=X, Y=Y, value=value, name=name: validate_distributor(
            QDistributor(X, Y, value, name=name)))

    chu = bundle.chu_objects
    for name, body in document.get('transforms', {}).items():
        path = f"/transforms/{name}"
        source = ChuObject(bundle.lookup('distributors', body['from'], f"{path}/from"), name=body['from'])
        target = ChuObject(bundle.lookup('distributors', body['to'], f"{path}/to"), name=body['to'])
        fwd = bundle.lookup('functors', body['fwd'], f"{path}/fwd")
        bwd = bundle.lookup('functors', body['bwd'], f"{path}/bwd")
        bundle.transforms[name] = _validated(path, lambda s=source, t=target, f=fwd, g=bwd, name=name:
                                             validate_chu_transform(ChuTransform(s, t, f, g, name=name)))

    for name, body in document.get('diagrams', {}).items():
        path = f"/diagrams/{name}"
        nodes = {}
        for n in body['objects']:
            bundle.lookup('distributors', n, f"{path}/objects")
            nodes[n] = chu[n]
        arrows = {}
        for a in body.get('arrows', []):
            t = bundle.lookup('transforms', a, f"{path}/arrows")
            j, k = document['transforms'][a]['from'], document['transforms'][a]['to']
            if j not in nodes or k not in nodes:
                raise UnresolvedReference(f"{path}/arrows: transform {a!r} leaves the diagram",
                                          {'path': f"{path}/arrows", 'arrow': a})
            arrows[a] = (j, k, t)
        bundle.diagrams[name] = ChuDiagram(nodes, arrows, Q, name=name)

    for name, body in document.get('cones', {}).items():
        path = f"/cones/{name}"
        apex = bundle.lookup('categories', body['apex'], f"{path}/apex")
        bundle.lookup('diagrams', body['diagram'], f"{path}/diagram")
        legs = {node: bundle.lookup('functors', f, f"{path}/legs/{node}") for node, f in body['legs'].items()}
        bundle.cones[name] = BundleCone(apex, body['diagram'], legs)

    logger.info(f"bundle 解析完成: {len(bundle.categories)} 個範疇, {len(bundle.functors)} 個函子, "
                f"{len(bundle.distributors)} 個分配子, {len(bundle.transforms)} 個 Chu 變換")
    return bundle


def parse_bundle(text: str) -> DefinitionBundle:
    """
    解析 bundle 文字

    參數:
        text: UTF-8 JSON
    返回:
        DefinitionBundle
    """
    try:
        document = json.loads(text)
    except ValueError as e:
        raise BundleSyntaxError(f"invalid JSON: {e}", {'path': '/'}) from None
    if not isinstance(document, dict):
        raise BundleSyntaxError("a bundle must be a JSON object", {'path': '/'})
    return parse_document(document)


def load_bundle(path: str) -> DefinitionBundle:
    """讀取檔案（'-' 代表標準輸入）並解析"""
    if path == '-':
        return parse_bundle(sys.stdin.read())
    try:
        text = Path(path).read_text(encoding='utf-8')
    except OSError as e:
        raise BadParameter(f"cannot read bundle {path}: {e.strerror}", {'path': path}) from None
    return parse_bundle(text)


def _dump_category(X: QCategory) -> Dict[str, Any]:
    return {
        'objects': [{'name': x, 'extent': X.extent[x]} for x in X.objects],
        'hom': [[x, y, X.hom[(x, y)]] for x in X.objects for y in X.objects],
    }


def _name_of(table: Dict[str, Any], item: Any) -> str:
    for name, candidate in table.items():
        if candidate is item:
            return name
    for name, candidate in table.items():
        if candidate == item:
            return name
    raise KeyError(item)


def dump_bundle(bundle: DefinitionBundle) -> Dict[str, Any]:
    """把 bundle 輸出回輸入格式（完整表格，不省略預設值）"""
    categories = bundle.categories
    document: Dict[str, Any] = {
        'format': bundle.format,
        'quantaloid': bundle.quantaloid_source,
        'categories': {name: _dump_category(X) for name, X in categories.items()},
        'functors': {
            name: {'from': _name_of(categories, f.source), 'to': _name_of(categories, f.target), 'map': dict(f.mapping)}
            for name, f in bundle.functors.items()
        },
        'distributors': {
            name: {'from': _name_of(categories, phi.source), 'to': _name_of(categories, phi.target),
                   'value': [[x, y, phi.value[(x, y)]] for x in phi.source.objects for y in phi.target.objects]}
            for name, phi in bundle.distributors.items()
        },
        'transforms': {
            name: {'from': t.source.name, 'to': t.target.name,
                   'fwd': _name_of(bundle.functors, t.fwd), 'bwd': _name_of(bundle.functors, t.bwd)}
            for name, t in bundle.transforms.items()
        },
        'diagrams': {
            name: {'objects': list(d.nodes), 'arrows': list(d.arrows)}
            for name, d in bundle.diagrams.items()
        },
        'cones': {
            name: {'apex': _name_of(categories, c.apex), 'diagram': c.diagram,
                   'legs': {node: _name_of(bundle.functors, f) for node, f in c.legs.items()}}
            for name, c in bundle.cones.items()
        },
    }
    return document
