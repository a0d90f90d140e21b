# quantikit/serialization/report.py
import functools
import itertools
import logging
from typing import Any, Dict

import ujson as json

from quantikit.config.settings import Settings
from quantikit.core.errors import QuantikitError
from quantikit.core.lattice import FiniteLattice
from quantikit.core.qcat import Cone, QCategory, QFunctor
from quantikit.core.qchu import ChuCone, ChuObject, ChuTransform, GeneratorFamily, LiftResult, Separation
from quantikit.core.qdist import Presheaf, PresheafCategory, QDistributor
from quantikit.core.quantaloid import DiagonalConstruction, Quantaloid
from quantikit.serialization.bundle import DefinitionBundle, dump_bundle
from quantikit.services.oracle import Certificate

logger = logging.getLogger(__name__)


@functools.singledispatch
def to_report(result: Any) -> Any:
    """
    把任何運算結果轉成可排序的 JSON 結構

    範疇只輸出物件與 hom 表（不含名稱），使同構的構造得到相同的報告。
    """
    raise TypeError(f"no report format for {type(result).__name__}")


@to_report.register(type(None))
@to_report.register(bool)
@to_report.register(int)
@to_report.register(str)
def _(result):
    return result


@to_report.register(dict)
def _(result: dict):
    return {str(k): to_report(v) for k, v in result.items()}


@to_report.register(list)
@to_report.register(tuple)
def _(result):
    return [to_report(item) for item in result]


@to_report.register(FiniteLattice)
def _(result: FiniteLattice):
    return {'elements': list(result.elements), 'leq': [list(p) for p in result.order_pairs()]}


@to_report.register(Quantaloid)
def _(result: Quantaloid):
    # 與 bundle 的顯式 quantaloid 區段同格式
    compose = {}
    for q, r, s in itertools.product(result.objects, repeat=3):
        table = result.compose_table(q, r, s)
        compose[f"({r}->{s})*({q}->{r})"] = [[g, f, gf] for (g, f), gf in table.items()]
    return {
        'name': result.name,
        'objects': list(result.objects),
        'homs': {f"{q}->{r}": to_report(lattice) for (q, r), lattice in result.homs.items()},
        'compose': compose,
        'identities': dict(result.identities),
    }


@to_report.register(DiagonalConstruction)
def _(result: DiagonalConstruction):
    return {
        'quantaloid': to_report(result.quantaloid),
        'base': result.base.name,
        'arrows': {name: list(arrow) for name, arrow in result.arrow_of.items()},
        'embedding': [[list(arrow), list(image)] for arrow, image in result.embedding.items()],
    }


@to_report.register(QCategory)
def _(result: QCategory):
    return {
        'objects': [{'name': x, 'extent': result.extent[x]} for x in result.objects],
        'hom': [[x, y, result.hom[(x, y)]] for x in result.objects for y in result.objects],
    }


@to_report.register(QFunctor)
def _(result: QFunctor):
    return {'map': dict(result.mapping)}


@to_report.register(Cone)
def _(result: Cone):
    return {'kind': result.kind, 'apex': to_report(result.apex), 'legs': to_report(result.legs)}


@to_report.register(QDistributor)
def _(result: QDistributor):
    return {
        'source': to_report(result.source),
        'target': to_report(result.target),
        'value': [[x, y, result.value[(x, y)]] for x in result.source.objects for y in result.target.objects],
    }


@to_report.register(Presheaf)
def _(result: Presheaf):
    return {'extent': result.extent, 'components': dict(result.components)}


@to_report.register(PresheafCategory)
def _(result: PresheafCategory):
    return {
        'category': to_report(result.category),
        'presheaves': {name: to_report(p) for name, p in result.presheaves.items()},
    }


@to_report.register(ChuObject)
def _(result: ChuObject):
    return to_report(result.dist)


@to_report.register(ChuTransform)
def _(result: ChuTransform):
    return {'fwd': dict(result.fwd.mapping), 'bwd': dict(result.bwd.mapping)}


@to_report.register(ChuCone)
def _(result: ChuCone):
    return {'kind': result.kind, 'apex': to_report(result.apex), 'legs': to_report(result.legs)}


@to_report.register(LiftResult)
def _(result: LiftResult):
    return {
        'kind': 'dom-lift',
        'apex': to_report(result.apex),
        'legs': {node: to_report(t) for node, t in result.legs.items()},
        'colimit': to_report(result.colimit),
    }


@to_report.register(GeneratorFamily)
def _(result: GeneratorFamily):
    return {
        'mode': result.mode,
        'members': {name: to_report(phi) for name, phi in result.members.items()},
    }


@to_report.register(Separation)
def _(result: Separation):
    return {'case': result.case, 'generator': result.generator, 'morphism': to_report(result.morphism)}


@to_report.register(Certificate)
def _(result: Certificate):
    return to_report(result.to_dict())


@to_report.register(QuantikitError)
def _(result: QuantikitError):
    return to_report(result.to_dict())


@to_report.register(DefinitionBundle)
def _(result: DefinitionBundle):
    return dump_bundle(result)


def canonical_json(payload: Dict[str, Any]) -> str:
    return json.dumps(payload, sort_keys=True, indent=Settings.REPORT_INDENT,
                      ensure_ascii=False, escape_forward_slashes=False) + '\n'


def emit_report(result: Any) -> str:
    """
    產生標準化的 JSON 報告

    參數:
        result: 任何運算結果、Certificate 或 QuantikitError
    返回:
        以排序鍵輸出的 JSON 文字（結尾換行）
    """
    return canonical_json(to_report(result))
