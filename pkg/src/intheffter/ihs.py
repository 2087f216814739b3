"""Integer Heffter array sets IHS(m,n;c) for odd m, n >= 7.

One builder per congruence class of ``c`` (and of ``m``, ``n``) plus
:func:`build_ihs`, which dispatches and transposes. Every builder places
its fixed families first, recomputes what is left of ``[1, mnc]`` and checks it
against the expected interval formulas, cuts the remainder into pieces and
then fills the remaining blocks. The result is verified before it is returned.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from functools import lru_cache
from importlib import resources
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np

from .blocks import (
    TemplateParams,
    a2,
    a3,
    a_alpha,
    b2_family,
    b4_family,
    b_family,
    b3_family,
    c_pair_block,
    d_block,
    fm_block,
    instantiate_template,
    special_matrices,
    tile_blocks,
    u_block,
)
from .core import Block, FourSet, PartialArray, SupportSet, ihs_from_json, support_of, verify_ihs
from .errors import ConstructionError, ExternalConstruction, InfeasiblePartition, InvalidParameters

__all__ = [
    "IhsParams",
    "Piece",
    "PartitionSpec",
    "partition_pieces",
    "ihs_c0_n3",
    "ihs_c0_11",
    "ihs_c1",
    "ihs_c1_97",
    "ihs_c3",
    "ihs_c3_77",
    "build_ihs",
    "transpose_set",
    "appendix_manifest",
    "appendix_ihs",
]


# ---------------------------------------------------------------------------
# parameters

@dataclass(frozen=True)
class IhsParams:
    m: int
    n: int
    c: int

    def __post_init__(self):
        check_ihs_params(self.m, self.n, self.c)


def check_ihs_params(m: int, n: int, c: int) -> None:
    for name, v in (("m", m), ("n", n)):
        if not isinstance(v, (int, np.integer)) or v < 7 or v % 2 == 0:
            raise InvalidParameters(f"{name} must be an odd integer >= 7, got {v}")
    if not isinstance(c, (int, np.integer)) or c < 1:
        raise InvalidParameters(f"c must be a positive integer, got {c}")
    if (m * n * c) % 4 not in (0, 3):
        raise InvalidParameters(f"mnc = {m * n * c} is {(m * n * c) % 4} mod 4; it must be 0 or 3")
    if c % 4 == 2:
        raise InvalidParameters("c = 2 (mod 4) is impossible for odd m, n")


# ---------------------------------------------------------------------------
# pieces and partitions
#
# Each piece is named by the base used in the templates:
#   F: {w+4, w+8, w+12, w+16}   G: {x+2, x+4, x+6, x+8}   H: {y+1, .., y+4}
#   K: {z+1, .., z+8}           M: {y+1, .., y+12}

PIECE_OFFSETS: Dict[str, Tuple[int, ...]] = {
    "F": (4, 8, 12, 16),
    "G": (2, 4, 6, 8),
    "H": (1, 2, 3, 4),
    "K": tuple(range(1, 9)),
    "M": tuple(range(1, 13)),
}

_KIND_ALIASES = {
    "type4": "F", "four4": "F", 4: "F",
    "type2": "G", "four2": "G", 2: "G",
    "type1": "H", "four1": "H", 1: "H",
    "block8": "K", "eight": "K", 8: "K",
    "block12": "M", "twelve": "M", 12: "M",
}


def _kind(k) -> str:
    if k in PIECE_OFFSETS:
        return k
    try:
        return _KIND_ALIASES[k]
    except (KeyError, TypeError):
        raise InvalidParameters(f"unknown piece kind {k!r}") from None


@dataclass(frozen=True, order=True)
class Piece:
    kind: str
    base: int

    @property
    def elements(self) -> Tuple[int, ...]:
        return tuple(self.base + o for o in PIECE_OFFSETS[self.kind])

    @property
    def first(self) -> int:
        return self.base + PIECE_OFFSETS[self.kind][0]

    def four_set(self) -> FourSet:
        d = {"F": 4, "G": 2, "H": 1}.get(self.kind)
        if d is None:
            raise InvalidParameters(f"a {self.kind} piece is not a 4-set")
        return FourSet(self.first, d)

    def __len__(self) -> int:
        return len(PIECE_OFFSETS[self.kind])


class PartitionSpec:
    """Requested piece counts, in preference order (earlier kinds are tried first)."""

    def __init__(self, wanted):
        items = wanted.items() if isinstance(wanted, dict) else wanted
        self.wanted: Tuple[Tuple[str, int], ...] = tuple((_kind(k), int(c)) for k, c in items)
        if any(c < 0 for _, c in self.wanted):
            raise InvalidParameters("piece counts must be nonnegative")
        if len({k for k, _ in self.wanted}) != len(self.wanted):
            raise InvalidParameters("each piece kind may appear once")

    @property
    def size(self) -> int:
        return sum(len(PIECE_OFFSETS[k]) * c for k, c in self.wanted)

    def __repr__(self) -> str:
        return f"PartitionSpec({dict(self.wanted)})"


def _values(s) -> List[int]:
    if isinstance(s, SupportSet):
        if not s.is_set():
            raise InvalidParameters("cannot partition a multiset")
        return sorted(s.values_set())
    return sorted(set(s))


def partition_pieces(s, spec, budget: int = 200_000) -> List[Piece]:
    """Cut ``s`` into exactly the pieces of ``spec``.

    The smallest uncovered element is always covered next, by the first kind
    (in ``spec`` order) that still has quota and fits; dead ends backtrack.
    Pieces are returned in order of their smallest element.
    """
    if not isinstance(spec, PartitionSpec):
        spec = PartitionSpec(spec)
    elems = _values(s)
    if spec.size != len(elems):
        raise InvalidParameters(f"{spec} needs {spec.size} elements but the set has {len(elems)}")
    present = set(elems)
    covered: set = set()
    quota = dict(spec.wanted)
    kinds = [k for k, _ in spec.wanted]
    stack: List[Tuple[int, int, Piece]] = []
    out: List[Piece] = []
    i, opt, dead_ends = 0, 0, 0
    while True:
        while i < len(elems) and elems[i] in covered:
            i += 1
        if i == len(elems):
            return out
        e = elems[i]
        placed = False
        while opt < len(kinds):
            kind = kinds[opt]
            opt += 1
            if not quota[kind]:
                continue
            offs = PIECE_OFFSETS[kind]
            piece = Piece(kind, e - offs[0])
            els = piece.elements
            if all(x in present and x not in covered for x in els):
                covered.update(els)
                quota[kind] -= 1
                out.append(piece)
                stack.append((i, opt, piece))
                i, opt, placed = i + 1, 0, True
                break
        if placed:
            continue
        dead_ends += 1
        if not stack or dead_ends > budget:
            raise InfeasiblePartition(f"no partition of {len(elems)} elements into {spec}")
        i, opt, piece = stack.pop()
        out.pop()
        covered.difference_update(piece.elements)
        quota[piece.kind] += 1


# ---------------------------------------------------------------------------
# bookkeeping helpers

def _iv(lo: int, hi: int, d: int = 1) -> set:
    return set(range(lo, hi + 1, d)) if lo <= hi else set()


def _union(*parts: Iterable[int]) -> set:
    out: set = set()
    for p in parts:
        out |= set(p)
    return out


def _abs_values(blocks: Iterable[Block]) -> set:
    supp = support_of(blocks)
    if supp.duplicates():
        raise ConstructionError(f"blocks reuse values {sorted(supp.duplicates())[:10]}")
    return set(supp.values_set())


def _expect_leftover(used: set, total: int, expected: set, step: str) -> set:
    left = set(range(1, total + 1)) - used
    if left != expected:
        raise ConstructionError(
            f"{step}: leftover differs from the expected sets "
            f"(unexpected {sorted(left - expected)[:10]}, missing {sorted(expected - left)[:10]})"
        )
    return left


class _Queue:
    def __init__(self, items: Sequence, label: str):
        self.items, self.pos, self.label = list(items), 0, label

    def take(self):
        if self.pos >= len(self.items):
            raise ConstructionError(f"ran out of {self.label}")
        self.pos += 1
        return self.items[self.pos - 1]

    def take_n(self, k: int) -> list:
        return [self.take() for _ in range(k)]

    def left(self) -> list:
        return self.items[self.pos:]

    def drained(self) -> None:
        if self.pos != len(self.items):
            raise ConstructionError(f"{len(self.items) - self.pos} {self.label} left unused")


class _Sheet:
    def __init__(self, m: int, n: int):
        self.grid = np.zeros((m, n), dtype=np.int64)

    def put(self, r: int, c: int, blk) -> None:
        e = blk.entries if isinstance(blk, Block) else np.asarray(blk)
        region = self.grid[r:r + e.shape[0], c:c + e.shape[1]]
        if region.shape != e.shape or region.any():
            raise ConstructionError(f"cannot place a {e.shape} block at ({r},{c})")
        region[...] = e

    def frame(self, corner: Block, top: Sequence[Block], left: Sequence[Block]) -> None:
        """Corner at the origin, ``top`` blocks transposed along rows 0-2, ``left`` below the corner."""
        self.put(0, 0, corner)
        for j, b in enumerate(top):
            self.put(0, 3 + 2 * j, b.T)
        for i, b in enumerate(left):
            self.put(corner.rows + 2 * i, 0, b)

    def fill(self, rows: Sequence[int], cols: Sequence[int], pick) -> None:
        """Fill every empty cell of the band grid ``rows x cols`` with ``pick(h, w)``."""
        starts_r = np.cumsum([0] + list(rows))
        starts_c = np.cumsum([0] + list(cols))
        r0, c0 = self.grid.shape[0] - starts_r[-1], self.grid.shape[1] - starts_c[-1]
        for i, h in enumerate(rows):
            for j, w in enumerate(cols):
                r, c = int(r0 + starts_r[i]), int(c0 + starts_c[j])
                if not self.grid[r:r + h, c:c + w].any():
                    self.put(r, c, pick(h, w))

    def done(self) -> PartialArray:
        if (self.grid == 0).any():
            raise ConstructionError("array has unfilled cells")
        return PartialArray(self.grid)


def _alternate(blocks: Sequence[Block]) -> List[Block]:
    return [b if k % 2 == 0 else -b for k, b in enumerate(blocks)]


def _finish(arrays: List[PartialArray], m: int, n: int, c: int, label: str) -> List[PartialArray]:
    report = verify_ihs(arrays, m, n, c)
    if not report.passed:
        raise ConstructionError(f"{label}({m},{n};{c}) failed self-verification\n{report.summary()}")
    return arrays


def _template(name: str, w=(), x=(), y=(), z=()) -> Block:
    return instantiate_template(
        name,
        TemplateParams(w=[p.base for p in w], x=[p.base for p in x], y=[p.base for p in y], z=[p.base for p in z]),
    )


def _tile(hs: Sequence[Piece], gs: Sequence[Piece], n4: int, n6: int, step: str):
    try:
        return tile_blocks([p.four_set() for p in hs], [p.four_set() for p in gs], n4, n6)
    except InvalidParameters as exc:
        raise ConstructionError(f"{step}: {exc}") from exc


def _split(pieces: Sequence[Piece]) -> Dict[str, _Queue]:
    return {k: _Queue([p for p in pieces if p.kind == k], f"{k} pieces") for k in PIECE_OFFSETS}


def _require(cond: bool, msg: str) -> None:
    if not cond:
        raise InvalidParameters(msg)


# ---------------------------------------------------------------------------
# c = 0 (mod 4)

def ihs_c0_n3(m: int, n: int, t: int) -> List[PartialArray]:
    """IHS(m,n;4t) for odd m >= 7 and n = 3 (mod 4), n >= 7."""
    _require(m >= 7 and m % 2 == 1, f"m must be odd >= 7, got {m}")
    _require(n >= 7 and n % 4 == 3, f"n must be 3 mod 4 and >= 7, got {n}")
    _require(t >= 1, f"t must be >= 1, got {t}")
    alpha = ((m - 7) // 2) % 2
    v, w = (m - 7 - 2 * alpha) // 4, (n - 7) // 4
    x = 2 * v + 2 * w + alpha + 4
    mn, c = m * n, 4 * t

    fa = a_alpha(alpha, 4 * t * (mn - 9), 2 * t)
    # Y blocks take the +-2 row adjustment only when a Z_2 band is there to absorb it.
    n_y = 8 * t * (w + 1)
    fb = b2_family(2 * t * (mn - 9), 2 * t * x, n_y // 2 * alpha)
    used = _abs_values(fa.members + fb.members)
    T1 = _iv(4, 16 * t, 4)
    T2 = _iv(16 * t + 2, 32 * t, 2)
    T3 = _iv(4 * t * (mn - 9 - 4 * x) + 1, 4 * t * (mn - 9) - 1, 2)
    T4 = _iv(4 * t * (mn - 7) + 1, 4 * t * (mn - 4))
    T5 = _iv(4 * t * (mn - 3) + 1, 4 * t * (mn - 1))
    S1 = _union(T2, T5, _iv(32 * t + 1, 2 * t * (mn - 9 - 6 * x)))
    S2 = _union(T3, _iv(2 * t * (mn - 9 + 2 * x) + 1, 4 * t * (mn - 9 - 4 * x)))
    S3 = _union(T1, T4)
    _expect_leftover(used, c * mn, _union(S1, S2, S3), "after the X3/X2/Y2 families")

    def pairs(src: set) -> List[Block]:
        gs = partition_pieces(src, [("G", len(src) // 4)])
        return [c_pair_block(gs[2 * k].first, gs[2 * k + 1].first) for k in range(len(gs) // 2)]

    c1, c2 = pairs(S1), pairs(S2)
    n_z2 = 4 * t * (w + 1) * alpha
    z2 = c1[:n_z2]
    rest = c1[n_z2:]
    z4 = [_vstack(rest[2 * k], -rest[2 * k + 1]) for k in range(len(rest) // 2)]
    z4 += [_vstack(c2[2 * k], -c2[2 * k + 1]) for k in range(len(c2) // 2)]
    z4 += [d_block(j, 4 * t * (mn - 7), t) for j in range(t)]
    if len(z4) != 4 * t * (v + 1) * (w + 1) or len(rest) % 2 or len(c2) % 2:
        raise ConstructionError(f"c0_n3: got {len(z4)} Z4 blocks, expected {4 * t * (v + 1) * (w + 1)}")

    if alpha:
        ys, xs = _Queue(fb["B1"], "Y2 blocks"), _Queue(fb["B0"], "X2 blocks")
    else:
        ys, xs = _Queue(fb["B0"][:n_y], "Y2 blocks"), _Queue(fb["B0"][n_y:], "X2 blocks")
    q2, q4 = _Queue(z2, "Z2 blocks"), _Queue(z4, "Z4 blocks")
    arrays = []
    for k in range(c):
        sh = _Sheet(m, n)
        top = _alternate(ys.take_n(2 * (w + 1)))
        left = ([xs.take()] if alpha else []) + _alternate(xs.take_n(2 * (v + 1)))
        sh.frame(fa.members[k], top, left)
        pick = {(2, 4): q2.take, (4, 4): q4.take}
        sh.fill([2] * alpha + [4] * (v + 1), [4] * (w + 1), lambda h, wd: pick[(h, wd)]())
        arrays.append(sh.done())
    for q in (ys, xs, q2, q4):
        q.drained()
    return _finish(arrays, m, n, c, "ihs_c0_n3")


def _vstack(*blocks: Block) -> Block:
    return Block(np.vstack([b.entries for b in blocks]))


def _layout99(sh: _Sheet, m: int, n: int, corner, top, left, w6, z6: _Queue, z4: _Queue) -> None:
    sh.frame(corner, top, left)
    sh.put(3, 3, w6)

    def pick(h, wd):
        if (h, wd) == (6, 4):
            return z6.take()
        if (h, wd) == (4, 6):
            return z6.take().T
        return z4.take()

    sh.fill([6] + [4] * ((m - 9) // 4), [6] + [4] * ((n - 9) // 4), pick)


def ihs_c0_11(m: int, n: int, t: int) -> List[PartialArray]:
    """IHS(m,n;4t) for m = n = 1 (mod 4), both >= 9."""
    _require(m >= 9 and m % 4 == 1, f"m must be 1 mod 4 and >= 9, got {m}")
    _require(n >= 9 and n % 4 == 1, f"n must be 1 mod 4 and >= 9, got {n}")
    _require(t >= 1, f"t must be >= 1, got {t}")
    mn, c, s = m * n, 4 * t, m + n

    fa = a_alpha(0, 4 * t * (mn - 9), 2 * t)
    fb = b_family(1, 16 * t, (s - 10) * t, 4 * t)
    used = _abs_values(fa.members + fb.members)
    T1 = _iv(4, 16 * t, 4)
    T2 = _iv(16 * t + 2, 8 * t * (s - 6) + 32 * t, 2)
    T3 = _iv(12 * t * (s - 6) + 32 * t + 1, 12 * t * (s - 6) + 64 * t)
    T4 = _iv(16 * t * (s - 6) + 64 * t + 1, 4 * t * (mn - 9))
    T5 = _iv(4 * t * (mn - 7) + 1, 4 * t * (mn - 4))
    T6 = _iv(4 * t * (mn - 3) + 1, 4 * t * (mn - 1))
    _expect_leftover(used, c * mn, _union(T1, T2, T3, T4, T5, T6), "after the X3/X2/Y2 families")

    n_g, n_h = (s - 4) * t, ((m - 4) * (n - 4) - 14) * t
    F = _Queue(partition_pieces(T1, [("F", t)]), "F pieces")
    G = _Queue(partition_pieces(T2, [("G", n_g)]), "G pieces")
    H = _Queue(partition_pieces(_union(T4, T5), [("H", n_h)]), "H pieces")
    K = _Queue(partition_pieces(_union(T3, T6), [("K", 5 * t)]), "K pieces")

    w6 = [_template("P1", w=[F.take()], y=H.take_n(4), z=K.take_n(2)) for _ in range(t)]
    w6 += [_template("P2", x=G.take_n(7), z=[K.take()]) for _ in range(2 * t)]
    w6 += [_template("P3", y=H.take_n(7), z=[K.take()]) for _ in range(t)]
    z4, z6 = _tile(H.left(), G.left(), (m - 9) * (n - 9) * t // 4, (s - 18) * t, "c0_11 tiling")
    F.drained(); K.drained()

    xs, ys = _Queue(fb["prime"], "X2 blocks"), _Queue(fb["double"], "Y2 blocks")
    q6, q4 = _Queue(z6, "Z6 blocks"), _Queue(z4, "Z4 blocks")
    arrays = []
    for k in range(c):
        sh = _Sheet(m, n)
        top = [ys.take(), -xs.take(), -xs.take()] + _alternate(xs.take_n((n - 9) // 2))
        left = [ys.take(), -xs.take(), -xs.take()] + _alternate(xs.take_n((m - 9) // 2))
        _layout99(sh, m, n, fa.members[k], top, left, w6[k], q6, q4)
        arrays.append(sh.done())
    for q in (xs, ys, q6, q4):
        q.drained()
    return _finish(arrays, m, n, c, "ihs_c0_11")


# ---------------------------------------------------------------------------
# c = 1 (mod 4)

def ihs_c1(m: int, n: int, t: int) -> List[PartialArray]:
    """IHS(m,n;4t+1) for m = 1, n = 3 (mod 4), m >= 9, n >= 7, (m,n) != (9,7), t >= 1."""
    _require(m >= 9 and m % 4 == 1, f"m must be 1 mod 4 and >= 9, got {m}")
    _require(n >= 7 and n % 4 == 3, f"n must be 3 mod 4 and >= 7, got {n}")
    if (m, n) == (9, 7):
        raise InvalidParameters("(m,n) = (9,7) has its own construction: use ihs_c1_97")
    _require(t >= 1, f"t must be >= 1, got {t}")
    mn, c, s = m * n, 4 * t + 1, m + n
    a = c * mn - 36 * t - 31
    ell = c * (s - 8) // 4

    fa = a2(a, 4 * t)
    ap = special_matrices("c1_general", t)["A5"]
    fb = b_family(0, 16 * t + 12, ell, 2 * t)
    used = _abs_values(fa.members + [ap] + fb.members)
    Ts = [
        _iv(8, 16 * t + 4, 4),
        _iv(16 * t + 8, 16 * t + 14, 2),
        _iv(8 * t + 9, 8 * t + 15, 2),
        _iv(16 * t + 16, 24 * t + 14, 2),
        _iv(24 * t + 24, 32 * t + 22, 2),
        _iv(a + 4 * t, a + 4 * t + 7),
        _iv(a + 8 * t + 8, a + 20 * t + 15),
        _iv(a + 24 * t + 16, a + 32 * t + 31),
        _iv(32 * t + 24, 2 * c * (s - 4) + 16 * t + 14, 2),
        _iv(3 * c * (s - 4) + 8 * t + 12, 3 * c * (s - 4) + 40 * t + 35),
        _iv(4 * c * (s - 4) + 32 * t + 32, a - 1),
    ]
    T = dict(enumerate(Ts, start=1))
    _expect_leftover(used, c * mn, _union(*Ts), "after the X3/X5/X2/Y2 families")

    n_g = c * (s - 4) // 4 + 1
    n_h = (n - 7) // 4 * (m - 6) * c + (m - 9) // 4 * (12 * t + 1) + 7 * t + 2
    n_k = 2 * t + c * (n - 7) // 4 + (m - 9) // 4
    F = _Queue(partition_pieces(T[1], [("F", t)]), "F pieces")
    G = _Queue(partition_pieces(_union(T[2], T[3], T[4], T[5], T[9]), [("G", n_g)]), "G pieces")
    hk = _split(partition_pieces(_union(T[6], T[7], T[8], T[10], T[11]), [("K", n_k), ("H", n_h)]))
    H, K = hk["H"], hk["K"]

    z6 = [_template("Q1", x=[G.take()], y=H.take_n(3), z=[K.take()]) for _ in range(c * (n - 7) // 4)]
    z6 += [_template("Q2", w=[F.take()], y=[H.take()], z=K.take_n(2)) for _ in range(t)]
    z4 = [_template("R1", x=[G.take()], y=[H.take()], z=[K.take()]) for _ in range((m - 9) // 4)]
    F.drained(); K.drained()
    more4, more6 = _tile(H.left(), G.left(), (m - 9) // 4 * ((c * (n - 3) - 4) // 4), 3 * t + 1, "c1 tiling")
    q6, q4 = _Queue(z6 + more6, "Z6 blocks"), _Queue(z4 + more4, "Z4 blocks")

    xs, ys = _Queue(fb["prime"], "X2 blocks"), _Queue(fb["double"], "Y2 blocks")
    pick = {(6, 4): q6.take, (4, 4): q4.take}
    rows, cols = [6] + [4] * ((m - 9) // 4), [4] * ((n - 3) // 4)
    arrays = []
    for k in range(4 * t):
        sh = _Sheet(m, n)
        top = _alternate(xs.take_n((n - 3) // 2))
        left = [ys.take(), -xs.take(), -xs.take()] + _alternate(xs.take_n((m - 9) // 2))
        sh.frame(fa.members[k], top, left)
        sh.fill(rows, cols, lambda h, w: pick[(h, w)]())
        arrays.append(sh.done())
    sh = _Sheet(m, n)
    sh.frame(ap, _alternate(xs.take_n((n - 3) // 2)), _alternate(xs.take_n((m - 5) // 2)))
    sh.fill(rows, cols, lambda h, w: pick[(h, w)]())
    arrays.append(sh.done())
    for q in (xs, ys, q6, q4):
        q.drained()
    return _finish(arrays, m, n, c, "ihs_c1")


def ihs_c1_97(t: int) -> List[PartialArray]:
    """IHS(9,7;4t+1) for t >= 1."""
    if t == 0:
        raise ExternalConstruction("IHS(9,7;1) is a single integer H(9,7); no construction is implemented here")
    _require(t >= 1, f"t must be >= 1, got {t}")
    m, n, c = 9, 7, 4 * t + 1
    eps, tau = (t + 2) % 2, (t + 2) // 2

    fa = a3(0, 4 * t)
    ap = special_matrices("c1_97", t)["A5"]
    T = {
        1: _iv(48 * t + 40, 56 * t + 54, 2),
        2: _iv(40 * t + 32, 40 * t + 30 + 8 * tau, 2),
        3: _iv(32 * t + 24, 32 * t + 22 + 8 * tau, 2),
        4: _iv(20 * t + 16, 20 * t + 22, 2),
        5: _iv(12 * t + 8, 12 * t + 14, 2),
        6: _iv(8, 8 * t + 6, 2),
        7: _iv(24 * t + 24, 32 * t + 22, 2),
    }
    U = {
        1: _iv(48 * t + 41, 64 * t + 55, 2),
        2: _iv(40 * t + 33, 40 * t + 31 + 8 * tau, 2),
        3: _iv(32 * t + 25, 32 * t + 23 + 8 * tau, 2),
        4: _iv(20 * t + 17, 20 * t + 23, 2),
        5: _iv(12 * t + 9, 12 * t + 15, 2),
    }
    W = {2: _iv(40 * t + 32 + 8 * tau, 44 * t + 39), 3: _iv(32 * t + 24 + 8 * tau, 36 * t + 31)}
    used_a = _abs_values(fa.members + [ap])
    expected_a = (_iv(1, 64 * t + 55) - _union(*T.values(), *U.values(), *W.values())) | _iv(252 * t + 56, 252 * t + 63)
    if used_a != expected_a:
        raise ConstructionError("c1_97: support of the X3/X5 blocks differs from the expected sets")

    fams = []
    x_prev = ell_prev = None
    for j in range(1, 6):
        b = min(U[j])
        ell = len(U[j]) + 28 * t - 17 + 4 * eps if j == 1 else len(U[j]) - 1
        x = 120 * t + 24 + 8 * eps if j == 1 else x_prev + ell_prev + 1
        if j == 1 and x != b + 2 * ell + 1:
            raise ConstructionError("c1_97: x_1 != b_1 + 2 l_1 + 1")
        fams.append(b4_family(b, ell, x))
        x_prev, ell_prev = x, ell
    first = fams[0].members
    ys = []
    for j in range(2 * t):
        ys.append(first[2 * j] + [[0, 0, 0], [-2, 1, 1]])
        ys.append(first[2 * j + 1] + [[-2, 1, 1], [0, 0, 0]])
    xs = first[4 * t:] + [b for f in fams[1:] for b in f.members]
    if len(xs) != 4 * c:
        raise ConstructionError(f"c1_97: {len(xs)} X2 blocks, expected {4 * c}")

    Y = [
        _iv(64 * t + 56, 120 * t + 22 + 8 * eps, 2),
        _iv(160 * t + 32 + 8 * eps, 172 * t + 39 + 8 * eps),
        _iv(172 * t + 44 + 8 * eps, 180 * t + 43 + 8 * eps),
        _iv(180 * t + 48 + 8 * eps, 192 * t + 47 + 8 * eps),
        _iv(194 * t + 52 + 6 * eps, 198 * t + 51 + 10 * eps),
        _iv(200 * t + 56 + 8 * eps, 204 * t + 55 + 12 * eps),
        _iv(240 * t + 48 + 16 * eps, 252 * t + 55),
    ]
    used = used_a | _abs_values(ys + xs)
    _expect_leftover(used, c * 63, _union(*T.values(), W[2], W[3], *Y), "after the X2/Y2 families")

    if eps:
        t_prime = _iv(8, 14, 2)
        lo = 160 * t + 32 + 8 * eps
        y_prime = _iv(lo, lo + 19)
    else:
        t_prime, y_prime = set(), set()
    # Y[0] is an even progression, so it is cut into type-2 sets with the T's.
    g1 = _union(W[2], W[3], *Y[1:]) - y_prime
    g2 = _union(*T.values(), Y[0]) - t_prime
    hs = partition_pieces(g1, [("H", len(g1) // 4)])
    gs = partition_pieces(g2, [("G", len(g2) // 4)])
    _, z6 = _tile(hs, gs, 0, c - eps, "c1_97 tiling")
    if eps:
        extra = partition_pieces(t_prime | y_prime, [("G", 1), ("K", 1), ("H", 3)])
        q = _split(extra)
        z6.append(_template("Q1", x=[q["G"].take()], y=q["H"].take_n(3), z=[q["K"].take()]))

    qx, qy, q6 = _Queue(xs, "X2 blocks"), _Queue(ys, "Y2 blocks"), _Queue(z6, "Z6 blocks")
    arrays = []
    for k in range(c):
        sh = _Sheet(m, n)
        top = [qx.take(), -qx.take()]
        if k < 4 * t:
            sh.frame(fa.members[k], top, [qy.take(), -qx.take(), -qx.take()])
        else:
            sh.frame(ap, top, [qx.take(), -qx.take()])
        sh.put(3, 3, q6.take())
        arrays.append(sh.done())
    for q in (qx, qy, q6):
        q.drained()
    return _finish(arrays, m, n, c, "ihs_c1_97")


# ---------------------------------------------------------------------------
# c = 3 (mod 4)

_TILDE_33 = ([[0, -2, 0], [0, 0, 0]], [[0, -1, 0], [0, -3, 0]])
_TILDE_11 = (
    [[0, 0, 0], [0, 2, 0]],
    [[0, -2, 0], [0, -2, 0]],
    [[0, 2, 0], [0, 1, 0]],
    [[0, -1, 0], [0, -2, 0]],
)


def _tilde_33(bs: Sequence[Block]) -> List[Block]:
    return [b + _TILDE_33[i % 2] for i, b in enumerate(bs)]


def ihs_c3(m: int, n: int, t: int) -> List[PartialArray]:
    """IHS(m,n;4t+3) for m = n (mod 4), both >= 7, (m,n) != (7,7)."""
    _require(m >= 7 and n >= 7 and m % 2 == 1 and n % 2 == 1, f"m, n must be odd >= 7, got {(m, n)}")
    _require(m % 4 == n % 4, f"m and n must agree mod 4, got {(m, n)}")
    if (m, n) == (7, 7):
        raise InvalidParameters("(m,n) = (7,7) has its own construction: use ihs_c3_77")
    _require(t >= 0, f"t must be >= 0, got {t}")
    mn, c, s = m * n, 4 * t + 3, m + n
    ones = m % 4 == 1
    ell, u = (c * (s - 10) // 4, c) if ones else (c * (s - 6) // 4, 0)

    sp = special_matrices("c3_general", t)
    corners = (a_alpha(0, c * mn - 36 * t, 2 * t).members if t else []) + [sp["A1"], sp["A2"]]
    fb = b_family(0, 16 * t + 6, ell, u)
    used = _abs_values(corners + [sp["Atilde"]] + fb.members)
    T = {
        1: _iv(4, 16 * t, 4),
        2: _iv(16 * t + 2, 64 * t + 8, 2),
        3: _iv(64 * t + 40, 128 * t + 38, 2),
        4: _iv(128 * t + 46, 128 * t + 60, 2),
        5: _iv(128 * t + 68, 2 * c * (s - 6) + 32 * t + 10, 2),
        6: _iv(3 * c * (s - 6) + 32 * t + 12, 3 * c * (s - 6) + 64 * t + 23),
        7: _iv(4 * c * (s - 6) + 64 * t + 24, c * mn - 36 * t),
        8: _iv(c * mn - 28 * t + 1, c * mn - 16 * t),
        9: _iv(c * mn - 12 * t + 1, c * mn - 4 * t),
    }
    _expect_leftover(used, c * mn, _union(*T.values()), "after the X3/X2/Y2 families")
    F = _Queue(partition_pieces(T[1], [("F", t)]), "F pieces")
    prime = fb["prime"]
    xs = _Queue(prime[4:], "X2 blocks")
    arrays = []

    if not ones:
        bt = _tilde_33(prime[:4])
        n_g = c * (s - 18) // 4 + 14 * t + 5
        n_h = c * (m - 7) * (n - 7) // 4 + 3 * (4 * t + 1) * (s - 18) // 4 + 10 * t + 7
        n_k = 2 * t + 3 * (s - 10) // 4
        G = _Queue(partition_pieces(_union(T[2], T[3], T[4], T[5]), [("G", n_g)]), "G pieces")
        hk = _split(partition_pieces(_union(T[6], T[7], T[9]), [("K", n_k), ("H", n_h)]))
        H, K = hk["H"], hk["K"]
        M = _Queue(partition_pieces(T[8], [("M", t)]), "M pieces")
        z4 = [fm_block(F.take().base, M.take().base) for _ in range(t)]
        z4 += [_template("R1", x=[G.take()], y=[H.take()], z=[K.take()]) for _ in range(2 * t + 2 + 3 * (s - 14) // 4)]
        ell_blk = _template("L", y=H.take_n(2), z=[K.take()])
        for q in (F, K, M):
            q.drained()
        more, _ = _tile(H.left(), G.left(), c * (m - 7) * (n - 7) // 16 + (s - 13) * t, 0, "c3 tiling")
        q4 = _Queue(z4 + more, "Z4 blocks")
        rows, cols = [4] * ((m - 3) // 4), [4] * ((n - 3) // 4)
        for k in range(4 * t + 2):
            sh = _Sheet(m, n)
            sh.frame(corners[k], _alternate(xs.take_n((n - 3) // 2)), _alternate(xs.take_n((m - 3) // 2)))
            sh.fill(rows, cols, lambda h, w: q4.take())
            arrays.append(sh.done())
        sh = _Sheet(m, n)
        top = [bt[0], bt[1]] + _alternate(xs.take_n((n - 7) // 2))
        left = [bt[2], bt[3]] + _alternate(xs.take_n((m - 7) // 2))
        sh.frame(sp["Atilde"], top, left)
        sh.put(3, 3, ell_blk)
        sh.fill(rows, cols, lambda h, w: q4.take())
        arrays.append(sh.done())
        q4.drained()
    else:
        bt = [b + d for b, d in zip(prime[:4], _TILDE_11)]
        lo6 = 3 * c * (s - 6) + 32 * t + 12
        t6a, t6b = _iv(lo6, lo6 + 7), _iv(lo6 + 8, 3 * c * (s - 6) + 64 * t + 23)
        if t6a | t6b != T[6]:
            raise ConstructionError("c3: T6 split does not cover T6")
        n_g = c * (s - 18) // 4 + 14 * t + 7
        n_h = c * ((m - 9) * (n - 9) + 3 * (s - 18)) // 4 + 11 * t + 16
        n_k = c * (s - 18) // 4 + 5 * t + 2
        G = _Queue(partition_pieces(_union(T[2], T[3], T[4], T[5], t6a), [("G", n_g)]), "G pieces")
        hk = _split(partition_pieces(_union(t6b, T[7], T[8], T[9]), [("K", n_k), ("H", n_h)]))
        H, K = hk["H"], hk["K"]
        w6 = [_template("P1", w=[F.take()], y=H.take_n(4), z=K.take_n(2)) for _ in range(t)]
        w6 += [_template("P2", x=G.take_n(7), z=[K.take()]) for _ in range(2 * t + 1)]
        w6 += [_template("P3", y=H.take_n(7), z=[K.take()]) for _ in range(t + 1)]
        m6 = _template("M6", y=H.take_n(9))
        z6 = [_template("Q1", x=[G.take()], y=H.take_n(3), z=[K.take()]) for _ in range(c * (s - 18) // 4)]
        for q in (F, G, K):
            q.drained()
        z4, _ = _tile(H.left(), [], c * (m - 9) * (n - 9) // 16, 0, "c3 tiling")
        q6, q4 = _Queue(z6, "Z6 blocks"), _Queue(z4, "Z4 blocks")
        ys = _Queue(fb["double"], "Y2 blocks")
        for k in range(4 * t + 2):
            sh = _Sheet(m, n)
            top = [ys.take(), -xs.take(), -xs.take()] + _alternate(xs.take_n((n - 9) // 2))
            left = [ys.take(), -xs.take(), -xs.take()] + _alternate(xs.take_n((m - 9) // 2))
            _layout99(sh, m, n, corners[k], top, left, w6[k], q6, q4)
            arrays.append(sh.done())
        sh = _Sheet(m, n)
        top = [ys.take(), -bt[0], bt[1]] + _alternate(xs.take_n((n - 9) // 2))
        left = [ys.take(), -bt[2], bt[3]] + _alternate(xs.take_n((m - 9) // 2))
        _layout99(sh, m, n, sp["Atilde"], top, left, m6, q6, q4)
        arrays.append(sh.done())
        for q in (ys, q6, q4):
            q.drained()
    xs.drained()
    return _finish(arrays, m, n, c, "ihs_c3")


APPENDIX_T_MAX = 6


def ihs_c3_77(t: int) -> List[PartialArray]:
    """IHS(7,7;4t+3). Tabulated for t <= 6, constructed for t >= 7."""
    _require(t >= 0, f"t must be >= 0, got {t}")
    c = 4 * t + 3
    if t <= APPENDIX_T_MAX:
        return appendix_ihs(c)
    m = n = 7
    sp = special_matrices("c3_77")
    corners = a3(1, 4 * t).members + [sp["A1"], sp["A2"]]
    fb = b3_family(t)
    part1 = fb["I"]
    off = 2 * (t + 3)  # B_{2,0} sits after B_{0,*} and B_{1,*}
    bt = _tilde_33(part1[off:off + 4])
    xs = _Queue(part1[:off] + part1[off + 4:], "X2 blocks")
    ys = _Queue(fb["II"], "Y2 blocks")
    used = _abs_values(corners + [sp["Atilde"]] + fb.members)
    T = {
        1: _iv(2, 8, 2),
        2: _iv(46, 60, 2),
        3: _iv(68, 8 * t + 10, 2),
        4: _iv(12 * t + 12, 12 * t + 23),
        5: _iv(20 * t + 24, 20 * t + 35),
    }
    Q = {
        1: _iv(32 * t + 36, 36 * t + 46, 2),
        2: _iv(40 * t + 48, 44 * t + 58, 2),
        3: _iv(48 * t + 60, 56 * t + 82, 2),
        4: _iv(64 * t + 84, 96 * t + 82, 2),
        5: _iv(128 * t + 108, 152 * t + 143),
        6: _iv(158 * t + 150, 162 * t + 149),
        7: _iv(164 * t + 156, 168 * t + 155),
        8: _iv(192 * t + 168, 196 * t + 147),
    }
    _expect_leftover(used, 49 * c, _union(*T.values(), *Q.values()), "after the X3/X2/Y2 families")
    q5a = _iv(128 * t + 108, 128 * t + 111)
    q5b = _iv(128 * t + 112, 136 * t + 143)
    q5c = _iv(136 * t + 144, 152 * t + 143)

    H = _Queue(partition_pieces(q5c, [("H", 4 * t)]), "H pieces")
    zstar = [_template("Z4STAR", y=H.take_n(4)) for _ in range(t)]
    lq = _split(partition_pieces(T[4] | q5a, [("K", 1), ("H", 2)]))
    ell_blk = _template("L", y=lq["H"].take_n(2), z=[lq["K"].take()])
    gs = partition_pieces(_union(T[3], Q[3], Q[4], q5b), [("G", 8 * t + 4)])
    z4, _ = _tile([], gs, 2 * t + 1, 0, "c3_77 tiling")

    S = _union(T[1], T[2], T[5], Q[1], Q[2], Q[6], Q[7], Q[8])
    if t % 2:
        sq = _split(partition_pieces(S, [("K", 1), ("G", t + 6), ("H", 3 * t - 4)]))
        z4.append(_template("R1", x=[sq["G"].take()], y=[sq["H"].take()], z=[sq["K"].take()]))
        more, _ = _tile(sq["H"].left(), sq["G"].left(), t, 0, "c3_77 tail tiling")
    else:
        ub = u_block(t)
        rest = S - set(ub.support().values_set())
        if len(rest) != len(S) - 16:
            raise ConstructionError("c3_77: U block is not inside S")
        sq = _split(partition_pieces(rest, [("G", t + 2), ("H", 3 * t - 2)]))
        z4.append(ub)
        more, _ = _tile(sq["H"].left(), sq["G"].left(), t, 0, "c3_77 tail tiling")
    q4, qs = _Queue(z4 + more, "Z4 blocks"), _Queue(zstar, "Z4* blocks")

    arrays = []
    for k in range(4 * t + 2):
        sh = _Sheet(m, n)
        top = [xs.take(), -xs.take()]
        if k < 3 * t + 2:
            sh.frame(corners[k], top, [xs.take(), -xs.take()])
            sh.put(3, 3, q4.take())
        else:
            sh.frame(corners[k], top, [ys.take(), -ys.take()])
            sh.put(3, 3, qs.take())
        arrays.append(sh.done())
    sh = _Sheet(m, n)
    sh.frame(sp["Atilde"], [bt[0], bt[1]], [bt[2], bt[3]])
    sh.put(3, 3, ell_blk)
    arrays.append(sh.done())
    for q in (xs, ys, q4, qs):
        q.drained()
    return _finish(arrays, m, n, c, "ihs_c3_77")


# ---------------------------------------------------------------------------
# tabulated (7,7;c)

def _data_file(name: str):
    return resources.files("intheffter").joinpath("data").joinpath(name)


@lru_cache(maxsize=None)
def appendix_manifest() -> Tuple[Tuple[int, int, int], ...]:
    doc = json.loads(_data_file("manifest.json").read_text())
    return tuple((d["m"], d["n"], d["c"]) for d in doc["instances"])


@lru_cache(maxsize=None)
def _appendix_doc(c: int) -> str:
    if (7, 7, c) not in appendix_manifest():
        raise InvalidParameters(f"no tabulated IHS(7,7;{c})")
    return _data_file(f"ihs_7_7_{c}.json").read_text()


def appendix_ihs(c: int) -> List[PartialArray]:
    """The tabulated IHS(7,7;c), verified on load."""
    arrays, m, n, cc = ihs_from_json(_appendix_doc(c))
    if (m, n, cc) != (7, 7, c):
        raise ConstructionError(f"data file for c={c} declares ({m},{n},{cc})")
    return _finish(arrays, 7, 7, c, "appendix")


# ---------------------------------------------------------------------------
# dispatcher

def transpose_set(arrays: Sequence[PartialArray]) -> List[PartialArray]:
    return [a.T for a in arrays]


def build_ihs(m: int, n: int, c: int) -> List[PartialArray]:
    """A verified IHS(m,n;c) for odd m, n >= 7 with mnc = 0 or 3 (mod 4), c > 1."""
    check_ihs_params(m, n, c)
    r = c % 4
    if r == 0:
        t = c // 4
        if n % 4 == 3:
            out = ihs_c0_n3(m, n, t)
        elif m % 4 == 3:
            out = transpose_set(ihs_c0_n3(n, m, t))
        else:
            out = ihs_c0_11(m, n, t)
    elif r == 1:
        if c == 1:
            raise ExternalConstruction(f"IHS({m},{n};1) is an integer H({m},{n}); no construction is implemented here")
        t = (c - 1) // 4
        if m % 4 == 1:
            out = ihs_c1_97(t) if (m, n) == (9, 7) else ihs_c1(m, n, t)
        else:
            out = transpose_set(ihs_c1_97(t) if (n, m) == (9, 7) else ihs_c1(n, m, t))
    else:
        t = (c - 3) // 4
        out = ihs_c3_77(t) if (m, n) == (7, 7) else ihs_c3(m, n, t)
    return _finish(out, m, n, c, "build_ihs")
