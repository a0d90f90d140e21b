# quantikit/core/lattice.py
import logging
from functools import reduce
from typing import Iterable, List, Sequence, Tuple

import numpy as np

from quantikit.core.errors import BadParameter, CycleError, NotALattice, UnknownElement

logger = logging.getLogger(__name__)


class FiniteLattice:
    """
    有限完備格，作為 quantaloid 的 hom-set

    順序以布林矩陣儲存（已做反身遞移閉包），order[i, j] 表示 elements[i] ≤ elements[j]。
    建立後不可變更；請透過 validate_lattice 建立。
    """

    __slots__ = ('elements', '_index', '_order', '_join', '_meet', 'bottom', 'top')

    def __init__(self, elements: Sequence[str], order: np.ndarray):
        self.elements: Tuple[str, ...] = tuple(elements)
        self._index = {e: i for i, e in enumerate(self.elements)}
        order = np.array(order, dtype=bool)
        order.setflags(write=False)
        self._order = order
        n = len(self.elements)
        self._join = np.full((n, n), -1, dtype=np.int64)
        self._meet = np.full((n, n), -1, dtype=np.int64)
        for i in range(n):
            for j in range(i, n):
                self._join[i, j] = self._join[j, i] = self._least(order[i] & order[j])
                self._meet[i, j] = self._meet[j, i] = self._greatest(order[:, i] & order[:, j])
        self._join.setflags(write=False)
        self._meet.setflags(write=False)
        low = self._least(np.ones(n, dtype=bool))
        high = self._greatest(np.ones(n, dtype=bool))
        self.bottom = self.elements[low] if low >= 0 else None
        self.top = self.elements[high] if high >= 0 else None

    def _least(self, mask: np.ndarray) -> int:
        candidates = np.flatnonzero(mask)
        for k in candidates:
            if self._order[k, candidates].all():
                return int(k)
        return -1

    def _greatest(self, mask: np.ndarray) -> int:
        candidates = np.flatnonzero(mask)
        for k in candidates:
            if self._order[candidates, k].all():
                return int(k)
        return -1

    def __len__(self) -> int:
        return len(self.elements)

    def __contains__(self, element: str) -> bool:
        return element in self._index

    def __iter__(self):
        return iter(self.elements)

    def __eq__(self, other) -> bool:
        if not isinstance(other, FiniteLattice):
            return NotImplemented
        return self.elements == other.elements and bool(np.array_equal(self._order, other._order))

    def __hash__(self) -> int:
        return hash((self.elements, self._order.tobytes()))

    def __repr__(self) -> str:
        return f"FiniteLattice({list(self.elements)})"

    def index(self, element: str) -> int:
        try:
            return self._index[element]
        except KeyError:
            raise UnknownElement(f"unknown lattice element {element!r}",
                                 {'element': element, 'elements': list(self.elements)}) from None

    def leq(self, a: str, b: str) -> bool:
        return bool(self._order[self.index(a), self.index(b)])

    def join2(self, a: str, b: str) -> str:
        return self.elements[self._join[self.index(a), self.index(b)]]

    def meet2(self, a: str, b: str) -> str:
        return self.elements[self._meet[self.index(a), self.index(b)]]

    def join(self, subset: Iterable[str]) -> str:
        """最小上界；空集合的 join 為 bottom"""
        return reduce(self.join2, subset, self.bottom)

    def meet(self, subset: Iterable[str]) -> str:
        """最大下界；空集合的 meet 為 top"""
        return reduce(self.meet2, subset, self.top)

    def order_pairs(self) -> List[Tuple[str, str]]:
        """所有嚴格的 (a, b)，a < b"""
        rows, cols = np.nonzero(self._order)
        return [(self.elements[i], self.elements[j]) for i, j in zip(rows, cols) if i != j]

    def restrict(self, subset: Sequence[str]) -> 'FiniteLattice':
        """以繼承的順序建立子集合上的格（子集合必須本身是完備格）"""
        positions = [self.index(e) for e in subset]
        sub_order = self._order[np.ix_(positions, positions)]
        return validate_lattice(list(subset), [
            (subset[i], subset[j]) for i, j in zip(*np.nonzero(sub_order)) if i != j
        ])


def _transitive_closure(order: np.ndarray) -> np.ndarray:
    closed = order.copy()
    for k in range(closed.shape[0]):
        closed |= np.outer(closed[:, k], closed[k, :])
    return closed


def validate_lattice(elements: Sequence[str], order_pairs: Iterable[Tuple[str, str]]) -> FiniteLattice:
    """
    驗證元素與順序關係構成有限完備格

    參數:
        elements: 元素識別字串
        order_pairs: (a, b) 表示 a ≤ b，會自動補上反身與遞移閉包
    返回:
        FiniteLattice
    """
    elements = list(elements)
    if not elements:
        raise BadParameter("a lattice needs at least one element")
    if len(set(elements)) != len(elements):
        duplicates = sorted({e for e in elements if elements.count(e) > 1})
        raise BadParameter(f"duplicate lattice elements {duplicates}", {'duplicates': duplicates})

    index = {e: i for i, e in enumerate(elements)}
    order = np.eye(len(elements), dtype=bool)
    for a, b in order_pairs:
        for e in (a, b):
            if e not in index:
                raise UnknownElement(f"order pair references undeclared element {e!r}",
                                     {'pair': [a, b], 'element': e})
        order[index[a], index[b]] = True
    order = _transitive_closure(order)

    symmetric = order & order.T
    np.fill_diagonal(symmetric, False)
    if symmetric.any():
        i, j = (int(v) for v in np.argwhere(symmetric)[0])
        raise CycleError(f"antisymmetry violated: {elements[i]} ≤ {elements[j]} ≤ {elements[i]}",
                         {'pair': [elements[i], elements[j]]})

    lattice = FiniteLattice(elements, order)
    n = len(elements)
    for i in range(n):
        for j in range(i + 1, n):
            if lattice._join[i, j] < 0:
                raise NotALattice(f"{elements[i]} and {elements[j]} have no join",
                                  {'pair': [elements[i], elements[j]], 'missing': 'join'})
            if lattice._meet[i, j] < 0:
                raise NotALattice(f"{elements[i]} and {elements[j]} have no meet",
                                  {'pair': [elements[i], elements[j]], 'missing': 'meet'})
    logger.debug(f"驗證格完成: {n} 個元素")
    return lattice


def chain_lattice(labels: Sequence[str]) -> FiniteLattice:
    """labels 由小到大排列的全序格"""
    return validate_lattice(labels, list(zip(labels, labels[1:])))
