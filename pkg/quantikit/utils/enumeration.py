# quantikit/utils/enumeration.py
import logging
from typing import Callable, Dict, Iterator, List, Mapping, Sequence

logger = logging.getLogger(__name__)


def tuple_name(components: Sequence[str], extent: str) -> str:
    """乘積物件：(x1,...,xk)@q"""
    return f"({','.join(components)})@{extent}"


def tagged_name(index: int, name: str) -> str:
    """餘積物件：i:x"""
    return f"{index}:{name}"


def class_name(members: Sequence[str]) -> str:
    """商物件：單元素類別沿用原名，其餘為排序後的 {a,b,...}"""
    if len(members) == 1:
        return members[0]
    return '{' + ','.join(sorted(members)) + '}'


def presheaf_name(extent: str, components: Mapping[str, str]) -> str:
    """presheaf 的標準名稱：s:[x=e,...]（依 x 排序）"""
    body = ','.join(f"{x}={e}" for x, e in sorted(components.items()))
    return f"{extent}:[{body}]"


def doubled_name(name: str, tag: int) -> str:
    return f"{name}|{tag}"


class UnionFind:
    """等價類別；groups() 依原始順序排列類別與成員"""

    def __init__(self, items: Sequence[str]):
        self._order = list(items)
        self._parent = {x: x for x in self._order}

    def find(self, x: str) -> str:
        root = x
        while self._parent[root] != root:
            root = self._parent[root]
        while self._parent[x] != root:
            self._parent[x], x = root, self._parent[x]
        return root

    def union(self, x: str, y: str) -> None:
        rx, ry = self.find(x), self.find(y)
        if rx != ry:
            self._parent[ry] = rx

    def groups(self) -> List[List[str]]:
        grouped: Dict[str, List[str]] = {}
        for x in self._order:
            grouped.setdefault(self.find(x), []).append(x)
        return list(grouped.values())


def backtrack(keys: Sequence[str], candidates: Callable[[str], Sequence[str]],
              consistent: Callable[[Dict[str, str], str], bool]) -> Iterator[Dict[str, str]]:
    """
    依序為每個 key 指定候選值，並以 consistent 剪枝

    參數:
        keys: 指定順序
        candidates: key 的候選值（順序決定輸出順序）
        consistent: consistent(partial, key) 檢查剛指定的 key 與先前指定是否相容
    返回:
        所有完整指定（dict），依字典序產生
    """
    assignment: Dict[str, str] = {}

    def extend(position: int) -> Iterator[Dict[str, str]]:
        if position == len(keys):
            yield dict(assignment)
            return
        key = keys[position]
        for value in candidates(key):
            assignment[key] = value
            if consistent(assignment, key):
                yield from extend(position + 1)
            del assignment[key]

    yield from extend(0)
