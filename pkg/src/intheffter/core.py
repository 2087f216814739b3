"""Array and interval primitives, support accounting and the axiomatic verifiers.

Arrays are stored as ``numpy`` integer grids. A :class:`PartialArray` uses ``0``
for an empty cell; this is unambiguous because a filled cell never holds ``0``.
"""

from __future__ import annotations

import json
from collections import Counter
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Optional, Sequence, Union

import numpy as np

from .errors import InvalidParameters

__all__ = [
    "Block",
    "PartialArray",
    "IntervalD",
    "FourSet",
    "SupportSet",
    "SumProfile",
    "Violation",
    "VerificationReport",
    "interval_set",
    "sum_profile",
    "support_of",
    "verify_integer_heffter",
    "verify_ihs",
    "block_transform",
    "format_text",
    "parse_text",
    "array_to_json",
    "array_from_json",
    "ihs_to_json",
    "ihs_from_json",
]


def _frozen_grid(rows) -> np.ndarray:
    grid = np.array(rows, dtype=np.int64)
    if grid.ndim != 2:
        raise InvalidParameters(f"expected a 2-dimensional grid, got shape {grid.shape}")
    grid.setflags(write=False)
    return grid


class SumProfile(tuple):
    """Pair ``(row_sums, col_sums)`` of integer tuples."""

    def __new__(cls, row_sums: Sequence[int], col_sums: Sequence[int]):
        return super().__new__(cls, (tuple(int(v) for v in row_sums), tuple(int(v) for v in col_sums)))

    @property
    def row_sums(self) -> tuple:
        return self[0]

    @property
    def col_sums(self) -> tuple:
        return self[1]

    def is_zero(self) -> bool:
        return not any(self.row_sums) and not any(self.col_sums)

    def __repr__(self) -> str:
        return f"SumProfile(rows={self.row_sums}, cols={self.col_sums})"


class Block:
    """A dense grid of nonzero integers, e.g. one member of a block family."""

    __slots__ = ("entries",)

    def __init__(self, rows):
        grid = rows.entries if isinstance(rows, Block) else _frozen_grid(rows)
        if grid.shape[0] < 1 or grid.shape[1] < 1:
            raise InvalidParameters("a block needs at least one row and one column")
        if (grid == 0).any():
            raise InvalidParameters("a block may not contain 0")
        self.entries = grid

    @property
    def rows(self) -> int:
        return self.entries.shape[0]

    @property
    def cols(self) -> int:
        return self.entries.shape[1]

    @property
    def shape(self) -> tuple:
        return self.entries.shape

    @property
    def T(self) -> "Block":
        return Block(self.entries.T)

    def __neg__(self) -> "Block":
        return Block(-self.entries)

    def __add__(self, delta) -> "Block":
        return Block(self.entries + np.asarray(delta, dtype=np.int64))

    def __eq__(self, other) -> bool:
        if isinstance(other, Block):
            return self.entries.shape == other.entries.shape and bool((self.entries == other.entries).all())
        return NotImplemented

    def __hash__(self) -> int:
        return hash((self.entries.shape, self.entries.tobytes()))

    def tolist(self) -> list:
        return self.entries.tolist()

    def profile(self) -> SumProfile:
        return sum_profile(self)

    def support(self) -> "SupportSet":
        return support_of([self])

    def __repr__(self) -> str:
        return f"Block({self.tolist()})"


class PartialArray:
    """An ``m x n`` grid whose cells are empty (``None``) or nonzero integers."""

    __slots__ = ("cells",)

    def __init__(self, cells):
        if isinstance(cells, PartialArray):
            grid = cells.cells
        elif isinstance(cells, np.ndarray):
            grid = cells.astype(np.int64, copy=True)
        else:
            rows = [[0 if v is None else _nonzero(v) for v in row] for row in cells]
            widths = {len(r) for r in rows}
            if len(widths) > 1:
                raise InvalidParameters("ragged rows")
            grid = np.array(rows, dtype=np.int64).reshape(len(rows), widths.pop() if widths else 0)
        if grid.ndim != 2 or grid.shape[0] < 1 or grid.shape[1] < 1:
            raise InvalidParameters("a partial array needs m, n >= 1")
        grid.setflags(write=False)
        self.cells = grid

    @classmethod
    def empty(cls, m: int, n: int) -> "PartialArray":
        return cls(np.zeros((m, n), dtype=np.int64))

    @property
    def m(self) -> int:
        return self.cells.shape[0]

    @property
    def n(self) -> int:
        return self.cells.shape[1]

    @property
    def shape(self) -> tuple:
        return self.cells.shape

    @property
    def T(self) -> "PartialArray":
        return PartialArray(self.cells.T.copy())

    def filled(self) -> np.ndarray:
        return self.cells != 0

    def get(self, i: int, j: int) -> Optional[int]:
        v = int(self.cells[i, j])
        return None if v == 0 else v

    def tolist(self) -> list:
        return [[None if v == 0 else v for v in row] for row in self.cells.tolist()]

    def __eq__(self, other) -> bool:
        if isinstance(other, PartialArray):
            return self.shape == other.shape and bool((self.cells == other.cells).all())
        return NotImplemented

    def __hash__(self) -> int:
        return hash((self.shape, self.cells.tobytes()))

    def __repr__(self) -> str:
        return f"PartialArray({self.m}x{self.n})"


def _nonzero(v) -> int:
    v = int(v)
    if v == 0:
        raise InvalidParameters("a filled cell may not hold 0")
    return v


@dataclass(frozen=True)
class IntervalD:
    """The progression ``{lo, lo+step, ..., hi}``; empty when ``lo > hi``."""

    lo: int
    hi: int
    step: int = 1

    def __post_init__(self):
        if self.step < 1:
            raise InvalidParameters(f"step must be positive, got {self.step}")
        if self.lo <= self.hi and (self.hi - self.lo) % self.step:
            raise InvalidParameters(f"malformed interval [{self.lo},{self.hi}]_{self.step}")

    def __iter__(self) -> Iterator[int]:
        return iter(range(self.lo, self.hi + 1, self.step))

    def __len__(self) -> int:
        return 0 if self.lo > self.hi else (self.hi - self.lo) // self.step + 1

    def __contains__(self, v) -> bool:
        return self.lo <= v <= self.hi and (v - self.lo) % self.step == 0

    def as_set(self) -> frozenset:
        return frozenset(self)


@dataclass(frozen=True)
class FourSet:
    """``{start, start+kind, start+2*kind, start+3*kind}`` for ``kind`` in 1, 2, 4."""

    start: int
    kind: int

    def __post_init__(self):
        if self.kind not in (1, 2, 4):
            raise InvalidParameters(f"4-set type must be 1, 2 or 4, got {self.kind}")

    @property
    def elements(self) -> tuple:
        return tuple(self.start + i * self.kind for i in range(4))

    def __iter__(self):
        return iter(self.elements)


class SupportSet(Counter):
    """Multiset of absolute values; a valid support has every multiplicity equal to 1."""

    def is_set(self) -> bool:
        return all(v == 1 for v in self.values())

    def duplicates(self) -> dict:
        return {k: v for k, v in self.items() if v > 1}

    def values_set(self) -> frozenset:
        return frozenset(k for k, v in self.items() if v > 0)

    def covers_exactly(self, lo: int, hi: int) -> bool:
        return self.is_set() and self.values_set() == frozenset(range(lo, hi + 1))

    def __eq__(self, other) -> bool:
        if isinstance(other, (set, frozenset)):
            return self.is_set() and self.values_set() == other
        return Counter.__eq__(self, other)

    __hash__ = None


def interval_set(a: int, b: int, d: int = 1) -> SupportSet:
    """Expand ``[a, b]_d`` into a support set."""
    return SupportSet(IntervalD(a, b, d))


def sum_profile(b: Union[Block, PartialArray]) -> SumProfile:
    grid = b.entries if isinstance(b, Block) else b.cells
    return SumProfile(grid.sum(axis=1).tolist(), grid.sum(axis=0).tolist())


def support_of(items: Iterable[Union[Block, PartialArray]]) -> SupportSet:
    """Fold the absolute values of every filled entry, keeping multiplicities."""
    out = SupportSet()
    for item in items:
        grid = item.entries if isinstance(item, Block) else item.cells
        vals = np.abs(grid[grid != 0])
        out.update(vals.tolist())
    return out


def block_transform(b: Block, t: str) -> Block:
    if t == "negate":
        return -b
    if t == "transpose":
        return b.T
    if t in ("negate-transpose", "negate_transpose"):
        return -(b.T)
    raise InvalidParameters(f"unknown transform {t!r}")


# ---------------------------------------------------------------------------
# verification

AXIOMS = (
    "row-count",
    "col-count",
    "row-sum",
    "col-sum",
    "support-range",
    "support-duplicate",
    "support-gap",
    "array-count",
    "shape",
)


@dataclass(frozen=True)
class Violation:
    axiom: str
    location: str
    detail: str


@dataclass
class VerificationReport:
    violations: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.violations

    def __bool__(self) -> bool:
        return self.passed

    def axioms(self) -> set:
        return {v.axiom for v in self.violations}

    def add(self, axiom: str, location: str, detail: str) -> None:
        self.violations.append(Violation(axiom, location, detail))

    def summary(self, limit: int = 10) -> str:
        if self.passed:
            return "passed"
        lines = [f"{len(self.violations)} violation(s):"]
        lines += [f"  [{v.axiom}] {v.location}: {v.detail}" for v in self.violations[:limit]]
        if len(self.violations) > limit:
            lines.append(f"  ... {len(self.violations) - limit} more")
        return "\n".join(lines)


def _check_sums(report: VerificationReport, grid: np.ndarray, prefix: str) -> None:
    for i, total in enumerate(grid.sum(axis=1).tolist()):
        if total:
            report.add("row-sum", f"{prefix}row {i}", f"sums to {total}")
    for j, total in enumerate(grid.sum(axis=0).tolist()):
        if total:
            report.add("col-sum", f"{prefix}col {j}", f"sums to {total}")


def _check_support(report: VerificationReport, supp: SupportSet, top: int) -> None:
    for v in sorted(k for k in supp if k < 1 or k > top):
        report.add("support-range", f"value {v}", f"outside [1,{top}]")
    for v, mult in sorted(supp.duplicates().items()):
        report.add("support-duplicate", f"value {v}", f"appears {mult} times")
    missing = sorted(set(range(1, top + 1)) - supp.values_set())
    if missing:
        shown = ", ".join(map(str, missing[:8])) + (" ..." if len(missing) > 8 else "")
        report.add("support-gap", f"{len(missing)} value(s)", f"missing from [1,{top}]: {shown}")


def _as_array(a) -> PartialArray:
    return a if isinstance(a, PartialArray) else PartialArray(a)


def verify_integer_heffter(a: PartialArray, s: int, k: int) -> VerificationReport:
    """Check the three clauses of an integer Heffter array H(m,n;s,k).

    Every clause is checked independently and every violation is reported.
    """
    report = VerificationReport()
    a = _as_array(a)
    grid = a.cells
    filled = grid != 0
    for i, cnt in enumerate(filled.sum(axis=1).tolist()):
        if cnt != s:
            report.add("row-count", f"row {i}", f"{cnt} filled cells, expected {s}")
    for j, cnt in enumerate(filled.sum(axis=0).tolist()):
        if cnt != k:
            report.add("col-count", f"col {j}", f"{cnt} filled cells, expected {k}")
    _check_support(report, support_of([a]), a.n * k)
    _check_sums(report, grid, "")
    return report


def verify_ihs(arrays: Sequence[PartialArray], m: int, n: int, c: int) -> VerificationReport:
    """Check that ``arrays`` is an integer Heffter array set IHS(m,n;c).

    Entries are read through their absolute values: a signed choice ``Omega``
    with ``{Omega, -Omega}`` partitioning ``{±1..±mnc}`` exists exactly when the
    absolute values cover ``[1, mnc]`` once each.
    """
    report = VerificationReport()
    arrays = [_as_array(a) for a in arrays]
    if len(arrays) != c:
        report.add("array-count", "set", f"{len(arrays)} arrays, expected {c}")
    good = []
    for idx, a in enumerate(arrays):
        if a.shape != (m, n):
            report.add("shape", f"array {idx}", f"shape {a.m}x{a.n}, expected {m}x{n}")
            continue
        good.append(a)
        filled = a.filled()
        for i, cnt in enumerate(filled.sum(axis=1).tolist()):
            if cnt != n:
                report.add("row-count", f"array {idx} row {i}", f"{cnt} filled cells, expected {n}")
        for j, cnt in enumerate(filled.sum(axis=0).tolist()):
            if cnt != m:
                report.add("col-count", f"array {idx} col {j}", f"{cnt} filled cells, expected {m}")
        _check_sums(report, a.cells, f"array {idx} ")
    _check_support(report, support_of(arrays), m * n * c)
    return report


# ---------------------------------------------------------------------------
# canonical formats

def format_text(a: PartialArray) -> str:
    return "\n".join(" ".join("." if v == 0 else str(v) for v in row) for row in a.cells.tolist())


def parse_text(text: str) -> list:
    """Parse one or more arrays in text form; arrays are separated by blank lines."""
    arrays, rows = [], []
    for line in text.splitlines() + [""]:
        line = line.strip()
        if not line:
            if rows:
                arrays.append(PartialArray(rows))
                rows = []
            continue
        rows.append([None if tok == "." else int(tok) for tok in line.split()])
    return arrays


def array_to_json(a: PartialArray) -> dict:
    return {"m": a.m, "n": a.n, "cells": a.tolist()}


def array_from_json(doc: dict) -> PartialArray:
    a = PartialArray(doc["cells"])
    if (a.m, a.n) != (doc.get("m", a.m), doc.get("n", a.n)):
        raise InvalidParameters(f"declared size {doc['m']}x{doc['n']} does not match cells {a.m}x{a.n}")
    return a


def ihs_to_json(arrays: Sequence[PartialArray], m: int, n: int, c: Optional[int] = None) -> dict:
    arrays = [_as_array(a) for a in arrays]
    return {
        "m": m,
        "n": n,
        "c": len(arrays) if c is None else c,
        "arrays": [array_to_json(a) for a in arrays],
    }


def ihs_from_json(doc) -> tuple:
    """Return ``(arrays, m, n, c)`` from an IHS JSON document (dict or string)."""
    if isinstance(doc, (str, bytes)):
        doc = json.loads(doc)
    arrays = [array_from_json(d) for d in doc["arrays"]]
    return arrays, int(doc["m"]), int(doc["n"]), int(doc.get("c", len(arrays)))
