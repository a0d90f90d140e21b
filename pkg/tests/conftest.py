"""Shared pytest configuration for the quantikit test suite.

Responsibilities:
- Inject the project root into ``sys.path`` so tests import as
  ``from quantikit.core.x import y`` without an editable install.
- Load ``.env`` from the project root so cap overrides such as
  ``QUANTIKIT_CAP`` behave the same as on the command line.
- Provide the builtin quantales and small hand-written categories that most
  unit tests start from.
"""
from __future__ import annotations

import sys
from pathlib import Path

import pytest
from dotenv import load_dotenv

PROJECT_ROOT = Path(__file__).resolve().parent.parent
FIXTURES_DIR = PROJECT_ROOT / "fixtures"

if str(PROJECT_ROOT) not in sys.path:
    sys.path.insert(0, str(PROJECT_ROOT))

load_dotenv(PROJECT_ROOT / ".env")

from quantikit.core.qcat import make_category, validate_category  # noqa: E402
from quantikit.core.quantaloid import QUANTALE_OBJECT, builtin  # noqa: E402


@pytest.fixture
def fixtures_dir() -> Path:
    return FIXTURES_DIR


@pytest.fixture
def two():
    return builtin("two")


@pytest.fixture
def chain3():
    return builtin("chain", 3)


@pytest.fixture
def chain5():
    return builtin("chain", 5)


@pytest.fixture
def make_cat():
    """Build a validated category over a one-object quantale.

    Omitted off-diagonal entries default to ⊥ and the diagonal to the
    identity, the same defaults the bundle format uses.
    """

    def build(Q, objects, hom=None, name=None):
        q = QUANTALE_OBJECT
        table = {(x, y): (Q.identity(q) if x == y else Q.bottom(q, q)) for x in objects for y in objects}
        table.update(hom or {})
        return validate_category(make_category(Q, objects, {x: q for x in objects}, table, name=name))

    return build


@pytest.fixture
def arrow_two(two, make_cat):
    """x → y over two: a(x,y) = 1, a(y,x) = 0."""
    return make_cat(two, ["x", "y"], {("x", "y"): "1"}, name="arrow")
