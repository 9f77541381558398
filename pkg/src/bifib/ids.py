"""Canonical encoding and ordering of cell ids.

Cell ids are strings or (nested) tuples of ids. Every deterministic choice
in the package breaks ties by ``sort_key``, so certificates are byte-stable.
"""
from __future__ import annotations

import json
from typing import Any, Iterable


def to_jsonable(cell: Any) -> Any:
    if isinstance(cell, tuple):
        return [to_jsonable(c) for c in cell]
    if isinstance(cell, (str, int)):
        return cell
    raise TypeError(f"unsupported cell id {cell!r}")


def from_jsonable(obj: Any) -> Any:
    if isinstance(obj, list):
        return tuple(from_jsonable(o) for o in obj)
    return obj


def encode_id(cell: Any) -> str:
    """String form of an id; strings are returned unchanged."""
    if isinstance(cell, str):
        return cell
    return json.dumps(to_jsonable(cell), separators=(",", ":"))


def sort_key(cell: Any) -> str:
    return encode_id(cell)


def ordered(cells: Iterable[Any], order: str = "asc") -> list:
    if order not in ("asc", "desc"):
        raise ValueError(f"order must be 'asc' or 'desc', not {order!r}")
    return sorted(cells, key=sort_key, reverse=(order == "desc"))
