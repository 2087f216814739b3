"""Brute-force checkers for small instances.

Nothing here reuses the builders' bookkeeping. Searches are exhaustive, and
family supports are re-expanded from their interval formulas with ``range``.
"""

from __future__ import annotations

import random
import time
from dataclasses import dataclass, field
from typing import Callable, Dict, Iterable, List, Optional, Sequence, Tuple, Union

import numpy as np

from . import blocks
from .core import FourSet, PartialArray, SupportSet, verify_integer_heffter
from .errors import HeffterError, InvalidParameters
from .ihs import PIECE_OFFSETS, PartitionSpec, Piece

__all__ = [
    "SearchBudget",
    "Exists",
    "NotExists",
    "Inconclusive",
    "brute_partition",
    "brute_heffter_small",
    "LemmaReport",
    "cross_check_lemma",
    "LEMMA_FAMILIES",
]


@dataclass(frozen=True)
class SearchBudget:
    max_nodes: int = 10_000_000
    max_seconds: float = 60.0


@dataclass
class Exists:
    witness: object
    nodes: int = 0

    def __bool__(self) -> bool:
        return True


@dataclass
class NotExists:
    nodes: int = 0
    reason: str = "exhaustive search"

    def __bool__(self) -> bool:
        return False


@dataclass
class Inconclusive:
    nodes: int = 0
    reason: str = "budget exhausted"

    def __bool__(self) -> bool:
        return False


Outcome = Union[Exists, NotExists, Inconclusive]


class _OutOfBudget(Exception):
    pass


class _Meter:
    def __init__(self, budget: SearchBudget):
        self.budget = budget
        self.nodes = 0
        self.deadline = time.monotonic() + budget.max_seconds

    def tick(self) -> None:
        self.nodes += 1
        if self.nodes > self.budget.max_nodes:
            raise _OutOfBudget("node budget exhausted")
        if not self.nodes & 0x3FF and time.monotonic() > self.deadline:
            raise _OutOfBudget("time budget exhausted")


# ---------------------------------------------------------------------------
# partitions

def brute_partition(s, spec, budget: Optional[SearchBudget] = None) -> Outcome:
    """Exhaustively cut ``s`` into the pieces of ``spec``.

    Every kind is tried at the smallest uncovered element, so a NotExists
    answer covers the whole search space.
    """
    budget = budget or SearchBudget()
    if not isinstance(spec, PartitionSpec):
        spec = PartitionSpec(spec)
    if isinstance(s, SupportSet):
        if not s.is_set():
            return NotExists(reason="support has repeated values")
        elems = sorted(s.values_set())
    else:
        elems = sorted(set(s))
    if spec.size != len(elems):
        return NotExists(reason=f"spec covers {spec.size} elements, set has {len(elems)}")

    free = set(elems)
    quota = {k: c for k, c in spec.wanted if c}
    chosen: List[Piece] = []
    meter = _Meter(budget)

    def go() -> bool:
        meter.tick()
        if not free:
            return True
        e = min(free)
        for kind in list(quota):
            if not quota[kind]:
                continue
            offs = PIECE_OFFSETS[kind]
            els = [e - offs[0] + o for o in offs]
            if not all(x in free for x in els):
                continue
            free.difference_update(els)
            quota[kind] -= 1
            chosen.append(Piece(kind, e - offs[0]))
            if go():
                return True
            chosen.pop()
            quota[kind] += 1
            free.update(els)
        return False

    try:
        found = go()
    except _OutOfBudget as exc:
        return Inconclusive(meter.nodes, str(exc))
    if found:
        return Exists(sorted(chosen, key=lambda p: p.first), meter.nodes)
    return NotExists(meter.nodes)


# ---------------------------------------------------------------------------
# small arrays

def brute_heffter_small(m: int, n: int, s: int, k: int, budget: Optional[SearchBudget] = None) -> Outcome:
    """Search for an integer H(m,n;s,k) cell by cell.

    Cells go in row-major order. Each cell tries signed values by increasing
    absolute value, positive first, then the empty option. The last filled
    cell of a row or column is forced to cancel its sum.
    """
    budget = budget or SearchBudget()
    if m * s != n * k:
        return NotExists(reason="ms != nk")
    if not (1 <= s <= n and 1 <= k <= m):
        return NotExists(reason="row or column count out of range")
    total = n * k
    grid = [[0] * n for _ in range(m)]
    used = [False] * (total + 1)
    row_sum, col_sum = [0] * m, [0] * n
    row_cnt, col_cnt = [0] * m, [0] * n
    meter = _Meter(budget)

    def top_free(count: int) -> int:
        acc = 0
        for v in range(total, 0, -1):
            if count == 0:
                break
            if not used[v]:
                acc += v
                count -= 1
        return acc

    def feasible(i: int, j: int) -> bool:
        # after a decision at (i, j), check the sums can still be cancelled
        rr = s - row_cnt[i]
        if rr == 0:
            if row_sum[i]:
                return False
        elif abs(row_sum[i]) > top_free(rr):
            return False
        cr = k - col_cnt[j]
        if cr == 0:
            if col_sum[j]:
                return False
        elif abs(col_sum[j]) > top_free(cr):
            return False
        return True

    def place(i: int, j: int, v: int) -> None:
        grid[i][j] = v
        used[abs(v)] = True
        row_sum[i] += v
        col_sum[j] += v
        row_cnt[i] += 1
        col_cnt[j] += 1

    def unplace(i: int, j: int, v: int) -> None:
        grid[i][j] = 0
        used[abs(v)] = False
        row_sum[i] -= v
        col_sum[j] -= v
        row_cnt[i] -= 1
        col_cnt[j] -= 1

    def go(pos: int) -> bool:
        meter.tick()
        if pos == m * n:
            return True
        i, j = divmod(pos, n)
        left_in_row, left_in_col = n - j, m - i
        need_r, need_c = s - row_cnt[i], k - col_cnt[j]
        can_fill = need_r > 0 and need_c > 0
        can_skip = need_r < left_in_row and need_c < left_in_col
        if can_fill:
            if need_r == 1 and need_c == 1:
                if row_sum[i] != col_sum[j]:
                    cands = []
                else:
                    cands = [-row_sum[i]]
            elif need_r == 1:
                cands = [-row_sum[i]]
            elif need_c == 1:
                cands = [-col_sum[j]]
            else:
                cands = [sgn * v for v in range(1, total + 1) if not used[v] for sgn in (1, -1)]
            for v in cands:
                if v == 0 or abs(v) > total or used[abs(v)]:
                    continue
                place(i, j, v)
                if feasible(i, j) and go(pos + 1):
                    return True
                unplace(i, j, v)
        if can_skip:
            if feasible(i, j) and go(pos + 1):
                return True
        return False

    try:
        found = go(0)
    except _OutOfBudget as exc:
        return Inconclusive(meter.nodes, str(exc))
    except RecursionError:  # pragma: no cover - only for absurd sizes
        return Inconclusive(meter.nodes, "recursion limit")
    if not found:
        return NotExists(meter.nodes)
    witness = PartialArray(np.array(grid, dtype=np.int64))
    report = verify_integer_heffter(witness, s, k)
    if not report.passed:  # pragma: no cover - would be a search bug
        raise AssertionError(f"brute-force witness failed verification\n{report.summary()}")
    return Exists(witness, meter.nodes)


# ---------------------------------------------------------------------------
# family cross-checks

def _expand(*intervals: Tuple[int, int, int]) -> List[int]:
    out: List[int] = []
    for lo, hi, d in intervals:
        out.extend(range(lo, hi + 1, d))
    return out


def _sums(rows) -> Tuple[Tuple[int, ...], Tuple[int, ...]]:
    rows = [[int(v) for v in r] for r in rows]
    return tuple(sum(r) for r in rows), tuple(sum(c) for c in zip(*rows))


@dataclass(frozen=True)
class _Spec:
    build: Callable
    # params -> interval list
    intervals: Callable
    # params -> {part: (count, row sums, column sums)}
    parts: Callable
    # rng -> params inside the domain
    sample: Callable


def _sample_a_alpha(r: random.Random):
    u = r.randint(1, 6)
    return (r.randint(0, 1), r.randint(16 * u - 1, 16 * u + 60), u)


def _sample_a2(r: random.Random):
    u = r.randint(1, 8)
    return (r.randint(8 * u + 24, 8 * u + 90), u)


def _sample_b_family(r: random.Random):
    l, u = r.randint(0, 5), r.randint(0, 5)
    if l + u == 0:
        u = 1
    return (r.randint(0, 1), r.randint(0, 60), l, u)


def _sample_b2(r: random.Random):
    l = r.randint(1, 6)
    return (r.randint(10 * l, 10 * l + 50), l, r.randint(0, l))


def _sample_b4(r: random.Random):
    b, l = 2 * r.randint(0, 20) + 1, 2 * r.randint(0, 8) + 1
    return (b, l, r.randint(b + 2 * l + 1, b + 2 * l + 60))


LEMMA_FAMILIES: Dict[str, _Spec] = {
    "a_alpha": _Spec(
        blocks.a_alpha,
        lambda a, b, u: [
            (1, 16 * u - 1, 2), (2, 8 * u - 2, 4), (b + 1, b + 4 * u, 1),
            (b + 10 * u + 1, b + 12 * u, 1), (b + 16 * u + 1, b + 18 * u, 1),
        ],
        lambda a, b, u: {"A": (2 * u, (0, 0, 0), (4 * a, -2 * a, -2 * a))},
        _sample_a_alpha,
    ),
    "a2": _Spec(
        blocks.a2,
        lambda b, u: [
            (9, 2 * u + 7, 2), (10, 4 * u + 6, 4), (2 * u + 17, 6 * u + 15, 2), (6 * u + 25, 8 * u + 23, 2),
            (b, b + u - 1, 1), (b + u + 8, b + 2 * u + 7, 1), (b + 5 * u + 16, b + 6 * u + 15, 1),
            (b + 8 * u + 32, b + 9 * u + 31, 1),
        ],
        lambda b, u: {"A": (u, (0, 0, 0), (0, 0, 0))},
        _sample_a2,
    ),
    "a3": _Spec(
        blocks.a3,
        lambda a, u: [
            (4 * a + 9, 2 * u + 4 * a + 7, 2), (2 * u + 4 * a + 8, 3 * u + 4 * a + 7, 1),
            (3 * u + 8 * a + 16, 5 * u + 8 * a + 15, 1), (5 * u + 12 * a + 24, 6 * u + 12 * a + 23, 1),
            (6 * u + 12 * a + 25, 8 * u + 12 * a + 23, 2), (9 * u + 16 * a + 32, 10 * u + 16 * a + 31, 1),
            (11 * u + 20 * a + 40, 12 * u + 20 * a + 39, 1), (14 * u + 28 * a + 56, 16 * u + 28 * a + 54, 2),
        ],
        lambda a, u: {"A": (u, (0, 0, 0), (0, 0, 0))},
        lambda r: (r.randint(0, 1), r.randint(1, 12)),
    ),
    "b_family": _Spec(
        blocks.b_family,
        lambda d, b, l, u: [
            (2 * b + 1, 2 * b + 8 * (u + l) - 1, 2),
            (2 * b + 8 * (u + l) + d, 2 * b + 12 * (u + l) + d - 1, 1),
            (4 * b + 12 * (u + l) + d, 4 * b + 16 * (u + l) + d - 1, 1),
        ],
        lambda d, b, l, u: {"prime": (2 * l, (0, 0), (-2, 1, 1)), "double": (2 * u, (0, 0), (-4, 2, 2))},
        _sample_b_family,
    ),
    "b2_family": _Spec(
        blocks.b2_family,
        lambda b, l, u: [(b - 6 * l + 1, b + 2 * l, 1), (2 * b - 8 * l + 2, 2 * b, 2)],
        lambda b, l, u: {"B1": (2 * u, (2, -2), (-4, 2, 2)), "B0": (2 * l - 2 * u, (0, 0), (-4, 2, 2))},
        _sample_b2,
    ),
    "b3_family": _Spec(
        blocks.b3_family,
        lambda u: [
            (24 * u + 36, 32 * u + 34, 2), (32 * u + 37, 36 * u + 47, 2), (40 * u + 49, 44 * u + 59, 2),
            (48 * u + 61, 96 * u + 83, 2), (96 * u + 84, 128 * u + 107, 1), (152 * u + 144, 158 * u + 149, 1),
            (162 * u + 150, 164 * u + 155, 1), (168 * u + 156, 192 * u + 167, 1),
        ],
        lambda u: {"I": (14 * u + 12, (0, 0), (-2, 1, 1)), "II": (2 * u, (-1, 1), (-2, 1, 1))},
        lambda r: (r.randint(0, 10),),
    ),
    "b4_family": _Spec(
        blocks.b4_family,
        lambda b, l, x: [(b, b + 2 * l, 2), (x, x + l, 1), (x + b + l, x + b + 2 * l, 1)],
        lambda b, l, x: {"B": ((l + 1) // 2, (0, 0), (-2, 1, 1))},
        _sample_b4,
    ),
}


@dataclass
class LemmaReport:
    family: str
    instances: int = 0
    mismatches: List[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return self.instances > 0 and not self.mismatches

    def summary(self) -> str:
        head = f"{self.family}: {self.instances} instances, {len(self.mismatches)} mismatches"
        return "\n".join([head] + [f"  {m}" for m in self.mismatches[:20]])


def _check_family(name: str, spec: _Spec, params: tuple, report: LemmaReport) -> None:
    tag = f"{name}{params}"
    try:
        fam = spec.build(*params)
    except HeffterError as exc:
        report.mismatches.append(f"{tag}: constructor raised {exc}")
        return
    want = spec.parts(*params)
    for part, (count, rows, cols) in want.items():
        members = fam.parts.get(part, [])
        if len(members) != count:
            report.mismatches.append(f"{tag}: part {part} has {len(members)} members, expected {count}")
        for idx, b in enumerate(members):
            got = _sums(b.entries.tolist())
            if got != (rows, cols):
                report.mismatches.append(f"{tag}: {part}[{idx}] sums {got} != {(rows, cols)}")
    extra = set(fam.parts) - set(want)
    if extra:
        report.mismatches.append(f"{tag}: unexpected parts {sorted(extra)}")
    seen = sorted(abs(int(v)) for b in fam.members for v in b.entries.ravel() if v)
    expected = sorted(_expand(*spec.intervals(*params)))
    if len(set(expected)) != len(expected):
        report.mismatches.append(f"{tag}: declared intervals overlap")
    if seen != expected:
        extra_v = sorted(set(seen) - set(expected))[:8]
        missing = sorted(set(expected) - set(seen))[:8]
        report.mismatches.append(f"{tag}: support differs (extra {extra_v}, missing {missing}, sizes {len(seen)} vs {len(expected)})")


def _random_pool(r: random.Random, n1: int, n2: int) -> Tuple[List[FourSet], List[FourSet]]:
    """Disjoint type-1 and type-2 4-sets laid out with random gaps; type-2 sets
    are sometimes interleaved in pairs."""
    kinds = ["1"] * n1 + ["2"] * n2
    r.shuffle(kinds)
    t1: List[FourSet] = []
    t2: List[FourSet] = []
    pos = r.randint(1, 9)
    idx = 0
    while idx < len(kinds):
        kind = kinds[idx]
        if kind == "1":
            t1.append(FourSet(pos, 1))
            pos += 4
            idx += 1
        elif idx + 1 < len(kinds) and kinds[idx + 1] == "2" and r.random() < 0.5:
            t2.extend([FourSet(pos, 2), FourSet(pos + 1, 2)])
            pos += 8
            idx += 2
        else:
            t2.append(FourSet(pos, 2))
            pos += 7
            idx += 1
        pos += r.randint(0, 3)
    return t1, t2


def _check_tiling(params: tuple, r: random.Random, report: LemmaReport) -> None:
    gamma, delta, alpha, beta = params
    t1, t2 = _random_pool(r, 2 * gamma, 2 * delta)
    tag = f"tile_blocks(gamma={gamma}, delta={delta}, alpha={alpha}, beta={beta})"
    feasible = 2 * alpha + 3 * beta == gamma + delta
    try:
        cs, ds = blocks.tile_blocks(t1, t2, alpha, beta)
    except InvalidParameters as exc:
        if feasible:
            report.mismatches.append(f"{tag}: rejected a feasible instance: {exc}")
        return
    except HeffterError as exc:
        report.mismatches.append(f"{tag}: {exc}")
        return
    if not feasible:
        report.mismatches.append(f"{tag}: accepted an infeasible instance")
        return
    if len(cs) != alpha or len(ds) != beta:
        report.mismatches.append(f"{tag}: got {len(cs)} C and {len(ds)} D blocks")
    for label, group, shape in (("C", cs, (4, 4)), ("D", ds, (6, 4))):
        for idx, b in enumerate(group):
            rows = b.entries.tolist()
            if (len(rows), len(rows[0])) != shape:
                report.mismatches.append(f"{tag}: {label}[{idx}] has shape {(len(rows), len(rows[0]))}")
            rs, cl = _sums(rows)
            if any(rs) or any(cl):
                report.mismatches.append(f"{tag}: {label}[{idx}] not zero-sum")
    seen = sorted(abs(int(v)) for b in cs + ds for v in b.entries.ravel() if v)
    expected = sorted(v for f in t1 + t2 for v in f.elements)
    if seen != expected:
        report.mismatches.append(f"{tag}: support differs from the pool")


def _sample_tiling(r: random.Random) -> tuple:
    alpha, beta = r.randint(0, 6), r.randint(0, 6)
    if alpha + beta == 0:
        alpha = 1
    total = 2 * alpha + 3 * beta
    gamma = r.randint(0, total)
    return (gamma, total - gamma, alpha, beta)


def cross_check_lemma(
    family: str,
    params: Optional[Iterable[tuple]] = None,
    trials: int = 50,
    seed: int = 0,
) -> LemmaReport:
    """Rebuild a family and compare it with its interval formulas and sum profiles.

    ``family`` is a constructor name from ``LEMMA_FAMILIES`` or ``"tile_blocks"``.
    Without ``params``, ``trials`` tuples are drawn from the family's domain.
    For ``tile_blocks`` a tuple is ``(gamma, delta, alpha, beta)`` and the 4-set
    pool is random; infeasible tuples must be rejected.
    """
    r = random.Random(seed)
    report = LemmaReport(family)
    if family == "tile_blocks":
        todo = list(params) if params is not None else [_sample_tiling(r) for _ in range(trials)]
        for p in todo:
            _check_tiling(tuple(p), r, report)
            report.instances += 1
        return report
    if family not in LEMMA_FAMILIES:
        raise InvalidParameters(f"unknown family {family!r}; choose from {sorted(LEMMA_FAMILIES)} or 'tile_blocks'")
    spec = LEMMA_FAMILIES[family]
    todo = list(params) if params is not None else [spec.sample(r) for _ in range(trials)]
    for p in todo:
        _check_family(family, spec, tuple(p), report)
        report.instances += 1
    return report
