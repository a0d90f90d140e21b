# quantikit/serialization/schema.py
import logging
from typing import Any, Dict

from jsonschema import Draft202012Validator

from quantikit.core.errors import BundleSyntaxError

logger = logging.getLogger(__name__)

_NAME = {'type': 'string', 'minLength': 1}
_TRIPLES = {'type': 'array', 'items': {'type': 'array', 'prefixItems': [_NAME, _NAME, _NAME],
                                       'minItems': 3, 'maxItems': 3}}
_NAMES = {'type': 'array', 'items': _NAME}

_BUILTIN = {
    'type': 'object',
    'properties': {
        'builtin': {'enum': ['two', 'chain', 'diagonal']},
        'n': {'type': 'integer', 'minimum': 1},
        'of': {'$ref': '#/$defs/quantaloid'},
    },
    'required': ['builtin'],
    'additionalProperties': False,
}

_EXPLICIT = {
    'type': 'object',
    'properties': {
        'name': _NAME,
        'objects': {'type': 'array', 'items': _NAME, 'minItems': 1},
        'homs': {
            'type': 'object',
            'additionalProperties': {
                'type': 'object',
                'properties': {
                    'elements': {'type': 'array', 'items': _NAME, 'minItems': 1},
                    'leq': {'type': 'array', 'items': {'type': 'array', 'prefixItems': [_NAME, _NAME],
                                                       'minItems': 2, 'maxItems': 2}},
                },
                'required': ['elements'],
                'additionalProperties': False,
            },
        },
        'compose': {'type': 'object', 'additionalProperties': _TRIPLES},
        'identities': {'type': 'object', 'additionalProperties': _NAME},
    },
    'required': ['objects', 'homs', 'compose', 'identities'],
    'additionalProperties': False,
}

BUNDLE_SCHEMA: Dict[str, Any] = {
    '$schema': 'https://json-schema.org/draft/2020-12/schema',
    'title': 'quantikit definition bundle',
    'type': 'object',
    '$defs': {
        'quantaloid': {'oneOf': [_BUILTIN, _EXPLICIT]},
    },
    'properties': {
        'format': {'const': 1},
        'quantaloid': {'$ref': '#/$defs/quantaloid'},
        'categories': {
            'type': 'object',
            'additionalProperties': {
                'type': 'object',
                'properties': {
                    'objects': {'type': 'array', 'items': {'oneOf': [
                        _NAME,
                        {'type': 'object', 'properties': {'name': _NAME, 'extent': _NAME},
                         'required': ['name'], 'additionalProperties': False},
                    ]}},
                    'hom': _TRIPLES,
                },
                'required': ['objects'],
                'additionalProperties': False,
            },
        },
        'functors': {
            'type': 'object',
            'additionalProperties': {
                'type': 'object',
                'properties': {'from': _NAME, 'to': _NAME,
                               'map': {'type': 'object', 'additionalProperties': _NAME}},
                'required': ['from', 'to', 'map'],
                'additionalProperties': False,
            },
        },
        'distributors': {
            'type': 'object',
            'additionalProperties': {
                'type': 'object',
                'properties': {'from': _NAME, 'to': _NAME, 'value': _TRIPLES},
                'required': ['from', 'to'],
                'additionalProperties': False,
            },
        },
        'transforms': {
            'type': 'object',
            'additionalProperties': {
                'type': 'object',
                'properties': {'from': _NAME, 'to': _NAME, 'fwd': _NAME, 'bwd': _NAME},
                'required': ['from', 'to', 'fwd', 'bwd'],
                'additionalProperties': False,
            },
        },
        'diagrams': {
            'type': 'object',
            'additionalProperties': {
                'type': 'object',
                'properties': {'objects': _NAMES, 'arrows': _NAMES},
                'required': ['objects'],
                'additionalProperties': False,
            },
        },
        'cones': {
            'type': 'object',
            'additionalProperties': {
                'type': 'object',
                'properties': {'apex': _NAME, 'diagram': _NAME,
                               'legs': {'type': 'object', 'additionalProperties': _NAME}},
                'required': ['apex', 'diagram', 'legs'],
                'additionalProperties': False,
            },
        },
    },
    'required': ['quantaloid'],
    'additionalProperties': False,
}

_validator = Draft202012Validator(BUNDLE_SCHEMA)


def json_pointer(path) -> str:
    return '/' + '/'.join(str(p) for p in path) if path else '/'


def check_shape(document: Any) -> None:
    """
    以 JSON Schema 檢查 bundle 結構；第一個錯誤（依路徑排序）轉為 BundleSyntaxError

    參數:
        document: 已解析的 JSON 文件
    """
    errors = sorted(_validator.iter_errors(document), key=lambda e: [str(p) for p in e.absolute_path])
    if errors:
        first = errors[0]
        path = json_pointer(first.absolute_path)
        logger.warning(f"bundle 結構錯誤 ({len(errors)} 個)，第一個位於 {path}")
        raise BundleSyntaxError(f"{path}: {first.message}", {'path': path, 'errors': len(errors)})
