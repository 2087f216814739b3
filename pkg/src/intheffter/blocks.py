"""Building blocks: the parametric 3x3 and 2x3 families, the fixed templates,
the 2x2 atoms built on 4-sets and the zero-sum tiling of those atoms.

Every constructor checks its own output (member sum profiles and the exact
support) before returning, and raises :class:`ConstructionError` otherwise.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Dict, Iterable, List, Sequence, Tuple

from .core import Block, FourSet, IntervalD, SumProfile, SupportSet, support_of
from .errors import ConstructionError, InvalidParameters

__all__ = [
    "BlockFamily",
    "a_alpha",
    "a2",
    "a3",
    "b_family",
    "b2_family",
    "b3_family",
    "b4_family",
    "TemplateParams",
    "TEMPLATE_ARITY",
    "TEMPLATE_PROFILES",
    "template_grid",
    "instantiate_template",
    "p2_uncorrected",
    "four_set_block",
    "solve_pqr",
    "solve_uvxy",
    "tile_blocks",
    "special_matrices",
    "c_pair_block",
    "d_block",
    "fm_block",
    "u_block",
]


def _union(*intervals: Tuple[int, int, int]) -> SupportSet:
    out = SupportSet()
    for lo, hi, d in intervals:
        out.update(IntervalD(lo, hi, d))
    return out


@dataclass
class BlockFamily:
    """Members of a block family, split into named classes in construction order.

    ``profiles`` maps each class name to the sum profile shared by all of its
    members; ``declared_support`` is the interval union stated for the family.
    """

    parts: Dict[str, List[Block]]
    profiles: Dict[str, SumProfile]
    declared_support: SupportSet = field(default_factory=SupportSet)

    @property
    def members(self) -> List[Block]:
        return [b for part in self.parts.values() for b in part]

    def __len__(self) -> int:
        return sum(len(p) for p in self.parts.values())

    def __iter__(self):
        return iter(self.members)

    def __getitem__(self, name: str) -> List[Block]:
        return self.parts[name]

    def support(self) -> SupportSet:
        return support_of(self.members)

    def mismatches(self) -> List[str]:
        problems = []
        for name, blocks in self.parts.items():
            want = self.profiles[name]
            for idx, b in enumerate(blocks):
                got = b.profile()
                if got != want:
                    problems.append(f"{name}[{idx}] profile {got} != {want}")
        supp = self.support()
        if supp.duplicates():
            problems.append(f"duplicate values {sorted(supp.duplicates())[:10]}")
        if supp != self.declared_support:
            extra = sorted(supp.values_set() - self.declared_support.values_set())
            missing = sorted(self.declared_support.values_set() - supp.values_set())
            problems.append(f"support mismatch: extra {extra[:10]}, missing {missing[:10]}")
        return problems

    def checked(self, label: str) -> "BlockFamily":
        problems = self.mismatches()
        if problems:
            raise ConstructionError(f"{label}: " + "; ".join(problems))
        return self


ZERO3 = SumProfile((0, 0, 0), (0, 0, 0))


def a_alpha(alpha: int, b: int, u: int) -> BlockFamily:
    """2u square matrices of size 3 with zero row sums and column sums (4a, -2a, -2a)."""
    if alpha not in (0, 1):
        raise InvalidParameters(f"alpha must be 0 or 1, got {alpha}")
    if u < 1 or b < 16 * u - 1:
        raise InvalidParameters(f"a_alpha needs u >= 1 and b >= 16u-1, got b={b}, u={u}")
    a = alpha
    members = []
    for i in range(u):
        members.append(Block([
            [8 * i + 4 * a + 2, 12 * u - 4 * i - 2 * a - 1, -(12 * u + 4 * i + 2 * a + 1)],
            [4 * u - 4 * i - 1, b + 2 * i + 1, -(b + 4 * u - 2 * i)],
            [-(4 * u + 4 * i + 1), -(b + 12 * u - 2 * i), b + 16 * u + 2 * i + 1],
        ]))
        members.append(Block([
            [-(8 * i - 4 * a + 6), -(12 * u - 4 * i + 2 * a - 3), 12 * u + 4 * i - 2 * a + 3],
            [-(4 * u - 4 * i - 3), -(b + 2 * i + 2), b + 4 * u - 2 * i - 1],
            [4 * u + 4 * i + 3, b + 12 * u - 2 * i - 1, -(b + 16 * u + 2 * i + 2)],
        ]))
    declared = _union(
        (1, 16 * u - 1, 2),
        (2, 8 * u - 2, 4),
        (b + 1, b + 4 * u, 1),
        (b + 10 * u + 1, b + 12 * u, 1),
        (b + 16 * u + 1, b + 18 * u, 1),
    )
    fam = BlockFamily({"A": members}, {"A": SumProfile((0, 0, 0), (4 * a, -2 * a, -2 * a))}, declared)
    return fam.checked(f"a_alpha({alpha},{b},{u})")


def a2(b: int, u: int) -> BlockFamily:
    """u zero-sum 3x3 matrices whose large entries start at ``b``."""
    if u < 1 or b < 8 * u + 24:
        raise InvalidParameters(f"a2 needs u >= 1 and b >= 8u+24, got b={b}, u={u}")
    members = [
        Block([
            [4 * i + 10, 6 * u - 2 * i + 15, -(6 * u + 2 * i + 25)],
            [2 * u - 2 * i + 7, b + i, -(b + 2 * u - i + 7)],
            [-(2 * u + 2 * i + 17), -(b + 6 * u - i + 15), b + 8 * u + i + 32],
        ])
        for i in range(u)
    ]
    declared = _union(
        (9, 2 * u + 7, 2),
        (10, 4 * u + 6, 4),
        (2 * u + 17, 6 * u + 15, 2),
        (6 * u + 25, 8 * u + 23, 2),
        (b, b + u - 1, 1),
        (b + u + 8, b + 2 * u + 7, 1),
        (b + 5 * u + 16, b + 6 * u + 15, 1),
        (b + 8 * u + 32, b + 9 * u + 31, 1),
    )
    return BlockFamily({"A": members}, {"A": ZERO3}, declared).checked(f"a2({b},{u})")


def a3(alpha: int, u: int) -> BlockFamily:
    """u zero-sum 3x3 matrices with support inside [9, 16u+82]; ``alpha`` shifts it."""
    if alpha not in (0, 1):
        raise InvalidParameters(f"alpha must be 0 or 1, got {alpha}")
    if u < 1:
        raise InvalidParameters(f"a3 needs u >= 1, got {u}")
    a = alpha
    members = [
        Block([
            [2 * i + 4 * a + 9, 3 * u - i + 4 * a + 7, -(3 * u + i + 8 * a + 16)],
            [5 * u - i + 8 * a + 15, 6 * u + 2 * i + 12 * a + 25, -(11 * u + i + 20 * a + 40)],
            [-(5 * u + i + 12 * a + 24), -(9 * u + i + 16 * a + 32), 14 * u + 2 * i + 28 * a + 56],
        ])
        for i in range(u)
    ]
    declared = _union(
        (4 * a + 9, 2 * u + 4 * a + 7, 2),
        (2 * u + 4 * a + 8, 3 * u + 4 * a + 7, 1),
        (3 * u + 8 * a + 16, 5 * u + 8 * a + 15, 1),
        (5 * u + 12 * a + 24, 6 * u + 12 * a + 23, 1),
        (6 * u + 12 * a + 25, 8 * u + 12 * a + 23, 2),
        (9 * u + 16 * a + 32, 10 * u + 16 * a + 31, 1),
        (11 * u + 20 * a + 40, 12 * u + 20 * a + 39, 1),
        (14 * u + 28 * a + 56, 16 * u + 28 * a + 54, 2),
    )
    return BlockFamily({"A": members}, {"A": ZERO3}, declared).checked(f"a3({alpha},{u})")


def b_family(delta: int, b: int, l: int, u: int) -> BlockFamily:
    """2x3 blocks: ``prime`` (2l of them, columns -2,1,1) and ``double`` (2u, columns -4,2,2)."""
    if delta not in (0, 1):
        raise InvalidParameters(f"delta must be 0 or 1, got {delta}")
    if min(b, l, u) < 0:
        raise InvalidParameters(f"b_family needs b, l, u >= 0, got {(b, l, u)}")
    d = delta
    b2, b3, b4 = b + 4 * u, b + 4 * u + 6 * l, b + 6 * u + 6 * l
    prime = [
        Block([
            [2 * b2 + 4 * j + 1, 2 * b3 + d - 2 * j - 1, -(2 * b2 + 2 * b3 + d + 2 * j)],
            [-(2 * b2 + 4 * j + 3), -(2 * b3 + d - 2 * j - 2), 2 * b2 + 2 * b3 + d + 2 * j + 1],
        ])
        for j in range(2 * l)
    ]
    double = []
    for j in range(u):
        double.append(Block([
            [2 * b + 8 * j + 1, 2 * b4 + d - 4 * j - 1, -(2 * b + 2 * b4 + d + 4 * j)],
            [-(2 * b + 8 * j + 5), -(2 * b4 + d - 4 * j - 3), 2 * b + 2 * b4 + d + 4 * j + 2],
        ]))
        double.append(Block([
            [2 * b + 8 * j + 3, 2 * b4 + d - 4 * j - 2, -(2 * b + 2 * b4 + d + 4 * j + 1)],
            [-(2 * b + 8 * j + 7), -(2 * b4 + d - 4 * j - 4), 2 * b + 2 * b4 + d + 4 * j + 3],
        ]))
    s = 4 * u + 4 * l
    declared = _union(
        (2 * b + 1, 2 * b + 2 * s - 1, 2),
        (2 * b + 2 * s + d, 2 * b + 3 * s + d - 1, 1),
        (4 * b + 3 * s + d, 4 * b + 4 * s + d - 1, 1),
    )
    fam = BlockFamily(
        {"prime": prime, "double": double},
        {"prime": SumProfile((0, 0), (-2, 1, 1)), "double": SumProfile((0, 0), (-4, 2, 2))},
        declared,
    )
    return fam.checked(f"b_family({delta},{b},{l},{u})")


def _b2_base(b: int, l: int, idx: int) -> List[List[int]]:
    j, odd = divmod(idx, 2)
    if not odd:
        return [
            [-(2 * b - 8 * j), b + 2 * l - 4 * j, b - 2 * l - 4 * j],
            [2 * b - 8 * j - 4, -(b + 2 * l - 4 * j - 2), -(b - 2 * l - 4 * j - 2)],
        ]
    return [
        [2 * b - 8 * j - 6, -(b + 2 * l - 4 * j - 3), -(b - 2 * l - 4 * j - 3)],
        [-(2 * b - 8 * j - 2), b + 2 * l - 4 * j - 1, b - 2 * l - 4 * j - 1],
    ]


def b2_family(b: int, l: int, u: int) -> BlockFamily:
    """2x3 blocks with columns (-4,2,2): ``B1`` (first 2u, rows (2,-2)) then ``B0`` (rows 0)."""
    if not (l >= u >= 0) or b < 10 * l:
        raise InvalidParameters(f"b2_family needs l >= u >= 0 and b >= 10l, got b={b}, l={l}, u={u}")
    shift = [[2, 0, 0], [-2, 0, 0]]
    b1 = [Block(_b2_base(b, l, i)) + shift for i in range(2 * u)]
    b0 = [Block(_b2_base(b, l, i)) for i in range(2 * u, 2 * l)]
    declared = _union((b - 6 * l + 1, b + 2 * l, 1), (2 * b - 8 * l + 2, 2 * b, 2))
    fam = BlockFamily(
        {"B1": b1, "B0": b0},
        {"B1": SumProfile((2, -2), (-4, 2, 2)), "B0": SumProfile((0, 0), (-4, 2, 2))},
        declared,
    )
    return fam.checked(f"b2_family({b},{l},{u})")


def b3_family(u: int) -> BlockFamily:
    """``I``: 14u+12 blocks with rows 0; ``II``: 2u blocks with rows (-1,1); all columns (-2,1,1)."""
    if u < 0:
        raise InvalidParameters(f"b3_family needs u >= 0, got {u}")

    def b_alpha(alpha: int, j: int) -> Block:
        p = 32 * u + 36 + (8 * u + 12) * alpha
        q = 124 * u + 108 - (2 * u + 6) * alpha
        return Block([
            [p + 4 * j + 1, q - 2 * j - 1, -(p + q + 2 * j)],
            [-(p + 4 * j + 3), -(q - 2 * j - 2), p + q + 2 * j + 1],
        ])

    part1 = [b_alpha(0, j) for j in range(u + 3)]
    part1 += [b_alpha(1, j) for j in range(u + 3)]
    part1 += [b_alpha(2, j) for j in range(12 * u + 6)]
    part2 = [
        Block([
            [24 * u + 4 * j + 36, 128 * u - 2 * j + 107, -(152 * u + 2 * j + 144)],
            [-(24 * u + 4 * j + 38), -(128 * u - 2 * j + 106), 152 * u + 2 * j + 145],
        ])
        for j in range(2 * u)
    ]
    declared = _union(
        (24 * u + 36, 32 * u + 34, 2),
        (32 * u + 37, 36 * u + 47, 2),
        (40 * u + 49, 44 * u + 59, 2),
        (48 * u + 61, 96 * u + 83, 2),
        (96 * u + 84, 128 * u + 107, 1),
        (152 * u + 144, 158 * u + 149, 1),
        (162 * u + 150, 164 * u + 155, 1),
        (168 * u + 156, 192 * u + 167, 1),
    )
    fam = BlockFamily(
        {"I": part1, "II": part2},
        {"I": SumProfile((0, 0), (-2, 1, 1)), "II": SumProfile((-1, 1), (-2, 1, 1))},
        declared,
    )
    return fam.checked(f"b3_family({u})")


def b4_family(b: int, l: int, x: int) -> BlockFamily:
    """(l+1)/2 blocks of size 2x3 with zero rows and columns (-2,1,1)."""
    if b < 1 or l < 1 or b % 2 == 0 or l % 2 == 0 or x <= b + 2 * l:
        raise InvalidParameters(f"b4_family needs odd b, l >= 1 and x > b+2l, got {(b, l, x)}")
    members = [
        Block([
            [b + 4 * h, x + l - 2 * h, -(x + b + l + 2 * h)],
            [-(b + 4 * h + 2), -(x + l - 2 * h - 1), x + b + l + 2 * h + 1],
        ])
        for h in range((l + 1) // 2)
    ]
    declared = _union((b, b + 2 * l, 2), (x, x + l, 1), (x + b + l, x + b + 2 * l, 1))
    fam = BlockFamily({"B": members}, {"B": SumProfile((0, 0), (-2, 1, 1))}, declared)
    return fam.checked(f"b4_family({b},{l},{x})")


# ---------------------------------------------------------------------------
# fixed templates
#
# Parameters are bases: w -> {w+4, w+8, w+12, w+16}, x -> {x+2, .., x+8},
# y -> {y+1, .., y+4}, z -> {z+1, .., z+8}.

@dataclass(frozen=True)
class TemplateParams:
    w: Tuple[int, ...] = ()
    x: Tuple[int, ...] = ()
    y: Tuple[int, ...] = ()
    z: Tuple[int, ...] = ()

    def __post_init__(self):
        for name in "wxyz":
            object.__setattr__(self, name, tuple(int(v) for v in getattr(self, name)))

    def arity(self) -> Tuple[int, int, int, int]:
        return len(self.w), len(self.x), len(self.y), len(self.z)

    def pieces(self) -> SupportSet:
        out = SupportSet()
        for w in self.w:
            out.update(IntervalD(w + 4, w + 16, 4))
        for x in self.x:
            out.update(IntervalD(x + 2, x + 8, 2))
        for y in self.y:
            out.update(IntervalD(y + 1, y + 4, 1))
        for z in self.z:
            out.update(IntervalD(z + 1, z + 8, 1))
        return out


TEMPLATE_ARITY = {
    "P1": (1, 0, 4, 2),
    "P2": (0, 7, 0, 1),
    "P3": (0, 0, 7, 1),
    "Q1": (0, 1, 3, 1),
    "Q2": (1, 0, 1, 2),
    "R1": (0, 1, 1, 1),
    "L": (0, 0, 2, 1),
    "M6": (0, 0, 9, 0),
    "Z4STAR": (0, 0, 4, 0),
}

TEMPLATE_PROFILES = {
    "P1": SumProfile((0,) * 6, (0,) * 6),
    "P2": SumProfile((0,) * 6, (0,) * 6),
    "P3": SumProfile((0,) * 6, (0,) * 6),
    "Q1": SumProfile((0,) * 6, (0,) * 4),
    "Q2": SumProfile((0,) * 6, (0,) * 4),
    "R1": SumProfile((0,) * 4, (0,) * 4),
    "L": SumProfile((2, 0, 1, 3), (2, 0, 1, 3)),
    "M6": SumProfile((0, 0, 2, 1, 1, 2), (0, 0, 0, 2, 2, 2)),
    # Only the columns vanish; the rows cancel against a stacked [Y; -Y] pair
    # whose blocks have row sums (-1, 1).
    "Z4STAR": SumProfile((1, -1, -1, 1), (0, 0, 0, 0)),
}


def _p1(w, x, y, z):
    (w1,), (y1, y2, y3, y4), (z1, z2) = w, y, z
    return [
        [w1 + 4, -(w1 + 8), -(z1 + 1), z1 + 3, -(z1 + 2), z1 + 4],
        [-(w1 + 12), w1 + 16, z1 + 5, -(z1 + 7), z1 + 6, -(z1 + 8)],
        [-(z2 + 1), z2 + 3, y1 + 1, -(y1 + 2), y3 + 1, -(y3 + 2)],
        [z2 + 5, -(z2 + 7), -(y1 + 3), y1 + 4, y4 + 2, -(y4 + 1)],
        [-(z2 + 2), z2 + 4, y2 + 1, -(y2 + 2), -(y4 + 4), y4 + 3],
        [z2 + 6, -(z2 + 8), -(y2 + 3), y2 + 4, -(y3 + 3), y3 + 4],
    ]


def _p2(w, x, y, z, uncorrected=False):
    x1, x2, x3, x4, x5, x6, x7 = x
    (z1,) = z
    # -(x2+4) here would repeat x2+4 and drop x3+4
    r2c5 = -(x2 + 4) if uncorrected else -(x3 + 4)
    return [
        [x1 + 8, -(x1 + 2), x2 + 2, -(x2 + 4), x3 + 2, -(x3 + 6)],
        [-(x1 + 6), x1 + 4, -(x2 + 8), x2 + 6, r2c5, x3 + 8],
        [-(x4 + 2), x4 + 4, -(x5 + 2), x5 + 4, z1 + 4, -(z1 + 8)],
        [x4 + 6, -(x4 + 8), x5 + 6, -(x5 + 8), z1 + 6, -(z1 + 2)],
        [x6 + 2, -(x6 + 4), x7 + 8, -(x7 + 2), -(z1 + 5), z1 + 1],
        [-(x6 + 8), x6 + 6, -(x7 + 6), x7 + 4, -(z1 + 3), z1 + 7],
    ]


def _p3(w, x, y, z):
    y1, y2, y3, y4, y5, y6, y7 = y
    (z1,) = z
    return [
        [y1 + 4, -(y1 + 1), y2 + 1, -(y2 + 2), y3 + 1, -(y3 + 3)],
        [-(y1 + 3), y1 + 2, -(y2 + 4), y2 + 3, -(y3 + 2), y3 + 4],
        [-(y4 + 1), y4 + 2, -(y5 + 1), y5 + 2, y6 + 1, -(y6 + 3)],
        [y4 + 3, -(y4 + 4), y5 + 3, -(y5 + 4), -(y6 + 2), y6 + 4],
        [y7 + 1, -(y7 + 2), z1 + 8, z1 + 2, -(z1 + 3), -(z1 + 6)],
        [-(y7 + 4), y7 + 3, -(z1 + 7), -(z1 + 1), z1 + 5, z1 + 4],
    ]


def _q1(w, x, y, z):
    (x1,), (y1, y2, y3), (z1,) = x, y, z
    return [
        [x1 + 2, -(x1 + 4), -(y1 + 1), y1 + 3],
        [-(x1 + 6), x1 + 8, y1 + 2, -(y1 + 4)],
        [-(y2 + 1), y2 + 2, y3 + 3, -(y3 + 4)],
        [y2 + 3, -(y2 + 4), -(y3 + 1), y3 + 2],
        [z1 + 8, z1 + 1, -(z1 + 5), -(z1 + 4)],
        [-(z1 + 6), -(z1 + 3), z1 + 2, z1 + 7],
    ]


def _q2(w, x, y, z):
    (w1,), (y1,), (z1, z2) = w, y, z
    return [
        [w1 + 4, -(w1 + 8), -(z1 + 1), z1 + 5],
        [-(w1 + 12), w1 + 16, z1 + 2, -(z1 + 6)],
        [-(z1 + 3), z1 + 4, y1 + 1, -(y1 + 2)],
        [z1 + 7, -(z1 + 8), -(y1 + 3), y1 + 4],
        [z2 + 5, z2 + 4, -(z2 + 6), -(z2 + 3)],
        [-(z2 + 1), -(z2 + 8), z2 + 7, z2 + 2],
    ]


def _r1(w, x, y, z):
    (x1,), (y1,), (z1,) = x, y, z
    return [
        [x1 + 2, -(x1 + 6), z1 + 8, -(z1 + 4)],
        [-(x1 + 4), x1 + 8, z1 + 1, -(z1 + 5)],
        [y1 + 4, -(y1 + 3), -(z1 + 3), z1 + 2],
        [-(y1 + 2), y1 + 1, -(z1 + 6), z1 + 7],
    ]


def _l(w, x, y, z):
    (y1, y2), (z1,) = y, z
    return [
        [y1 + 1, -(y1 + 2), z1 + 7, -(z1 + 4)],
        [-(z1 + 3), -(y2 + 2), z1 + 1, y2 + 4],
        [z1 + 8, y2 + 1, -(z1 + 5), -(y2 + 3)],
        [-(y1 + 4), y1 + 3, -(z1 + 2), z1 + 6],
    ]


def _m6(w, x, y, z):
    y1, y2, y3, y4, y5, y6, y7, y8, y9 = y
    return [
        [y1 + 1, -(y1 + 3), -(y2 + 1), y2 + 2, -(y3 + 1), y3 + 2],
        [-(y1 + 2), y1 + 4, y2 + 3, -(y2 + 4), y3 + 3, -(y3 + 4)],
        [-(y4 + 1), y4 + 2, y8 + 1, -(y7 + 1), y7 + 4, -(y8 + 3)],
        [y4 + 3, -(y4 + 4), -(y9 + 3), y7 + 3, -(y7 + 2), y9 + 4],
        [y5 + 1, -(y5 + 3), -(y8 + 2), y6 + 4, -(y6 + 3), y8 + 4],
        [-(y5 + 2), y5 + 4, y9 + 2, -(y6 + 2), y6 + 1, -(y9 + 1)],
    ]


def _z4star(w, x, y, z):
    y1, y2, y3, y4 = y
    return [
        [-(y1 + 1), y4 + 2, -(y4 + 4), y1 + 4],
        [y1 + 3, y2 + 1, -(y2 + 3), -(y1 + 2)],
        [-(y3 + 4), -(y4 + 1), y4 + 3, y3 + 1],
        [y3 + 2, -(y2 + 2), y2 + 4, -(y3 + 3)],
    ]


_TEMPLATES: Dict[str, Callable] = {
    "P1": _p1,
    "P2": _p2,
    "P3": _p3,
    "Q1": _q1,
    "Q2": _q2,
    "R1": _r1,
    "L": _l,
    "M6": _m6,
    "Z4STAR": _z4star,
}


def _check_arity(name: str, p: TemplateParams) -> None:
    if name not in _TEMPLATES:
        raise InvalidParameters(f"unknown template {name!r}")
    if p.arity() != TEMPLATE_ARITY[name]:
        raise InvalidParameters(
            f"template {name} takes (w,x,y,z) counts {TEMPLATE_ARITY[name]}, got {p.arity()}"
        )


def template_grid(name: str, p: TemplateParams) -> List[List[int]]:
    """Substitute ``p`` into template ``name`` without any checks."""
    _check_arity(name, p)
    return _TEMPLATES[name](p.w, p.x, p.y, p.z)


def p2_uncorrected(p: TemplateParams) -> List[List[int]]:
    """P2 with the known-bad row-2/column-5 entry -(x2+4), kept for regression tests."""
    _check_arity("P2", p)
    return _p2(p.w, p.x, p.y, p.z, uncorrected=True)


def check_template(name: str, grid, p: TemplateParams) -> Block:
    b = Block(grid)
    got = b.profile()
    if got != TEMPLATE_PROFILES[name]:
        raise ConstructionError(f"template {name}: profile {got} != {TEMPLATE_PROFILES[name]}")
    if b.support() != p.pieces():
        raise ConstructionError(f"template {name}: support does not match its parameter pieces")
    return b


def instantiate_template(name: str, p: TemplateParams) -> Block:
    return check_template(name, template_grid(name, p), p)


# ---------------------------------------------------------------------------
# 2x2 atoms and the zero-sum tiling

def four_set_block(f: FourSet) -> Block:
    """The 2x2 atom on a type-1 or type-2 4-set: anti-diagonal signs, rows (d,-d), cols (2d,-2d)."""
    if f.kind not in (1, 2):
        raise InvalidParameters("only type-1 and type-2 4-sets have a 2x2 atom")
    a, b, c, d = f.elements
    return Block([[-a, b], [c, -d]])


def solve_pqr(alpha: int, gamma: int, delta: int) -> Tuple[int, int, int]:
    """Lexicographically smallest (p,q,r) >= 0 with p+q+r = alpha, 2p+r <= gamma, 2q+r <= delta."""
    for p in range(alpha + 1):
        for q in range(alpha - p + 1):
            r = alpha - p - q
            if 2 * p + r <= gamma and 2 * q + r <= delta:
                return p, q, r
    raise InvalidParameters(f"no (p,q,r) for alpha={alpha}, gamma={gamma}, delta={delta}")


def solve_uvxy(gamma_p: int, delta_p: int) -> Tuple[int, int, int, int]:
    """(u,v,x,y) with gamma' = 3u+2x+y, delta' = 3v+2y+x and 2x+y <= 2."""
    for x, y in ((0, 0), (0, 1), (0, 2), (1, 0)):
        ru, rv = gamma_p - 2 * x - y, delta_p - 2 * y - x
        if ru >= 0 and rv >= 0 and ru % 3 == 0 and rv % 3 == 0:
            return ru // 3, rv // 3, x, y
    raise InvalidParameters(f"no (u,v,x,y) for gamma'={gamma_p}, delta'={delta_p}")


def _stack(rows_of_blocks: Sequence[Sequence[Block]]) -> Block:
    import numpy as np

    return Block(np.block([[b.entries for b in row] for row in rows_of_blocks]))


def tile_blocks(
    type1_sets: Sequence[FourSet],
    type2_sets: Sequence[FourSet],
    alpha: int,
    beta: int,
) -> Tuple[List[Block], List[Block]]:
    """Cut an even number of type-1 and type-2 4-sets into ``alpha`` zero-sum 4x4
    blocks and ``beta`` zero-sum 6x4 blocks. Atoms are consumed in input order."""
    if len(type1_sets) % 2 or len(type2_sets) % 2:
        raise InvalidParameters("tile_blocks needs an even number of 4-sets of each type")
    if any(f.kind != 1 for f in type1_sets) or any(f.kind != 2 for f in type2_sets):
        raise InvalidParameters("tile_blocks got a 4-set of the wrong type")
    gamma, delta = len(type1_sets) // 2, len(type2_sets) // 2
    if alpha < 0 or beta < 0 or 2 * alpha + 3 * beta != gamma + delta:
        raise InvalidParameters(
            f"tile_blocks: 2*alpha + 3*beta = {2 * alpha + 3 * beta} but gamma + delta = {gamma + delta}"
        )
    xs = iter([four_set_block(f) for f in type1_sets])
    ys = iter([four_set_block(f) for f in type2_sets])
    X = lambda: next(xs)  # noqa: E731
    Y = lambda: next(ys)  # noqa: E731

    p, q, r = solve_pqr(alpha, gamma, delta)
    u, v, x, y = solve_uvxy(gamma - 2 * p - r, delta - 2 * q - r)
    if u + v + x + y != beta:
        raise ConstructionError(f"tiling solver mismatch: u+v+x+y = {u + v + x + y} != beta = {beta}")

    cs: List[Block] = []
    for _ in range(p):
        cs.append(_stack([[X(), -X()], [-X(), X()]]))
    for _ in range(q):
        cs.append(_stack([[Y(), -Y()], [-Y(), Y()]]))
    for _ in range(r):
        cs.append(_stack([[X(), -X()], [-Y().T, Y().T]]))
    ds: List[Block] = []
    for _ in range(u):
        ds.append(_stack([[X(), -X()], [-X().T, X().T], [-X().T, X().T]]))
    for _ in range(v):
        ds.append(_stack([[Y(), -Y()], [-Y().T, Y().T], [-Y().T, Y().T]]))
    for _ in range(x):
        ds.append(_stack([[Y(), -Y()], [-X(), X()], [-X(), X()]]))
    for _ in range(y):
        ds.append(_stack([[-Y(), Y()], [Y().T, -Y().T], [X(), -X()]]))

    for blk in cs + ds:
        if not blk.profile().is_zero():
            raise ConstructionError(f"tiling produced a block with profile {blk.profile()}")
    want = SupportSet()
    for f in list(type1_sets) + list(type2_sets):
        want.update(f.elements)
    if support_of(cs + ds) != want:
        raise ConstructionError("tiling support differs from the input 4-sets")
    return cs, ds


# ---------------------------------------------------------------------------
# fixed matrices used by the assemblies

def _checked(label: str, rows, want: SumProfile) -> Block:
    b = Block(rows)
    if b.profile() != want:
        raise ConstructionError(f"{label}: profile {b.profile()} != {want}")
    return b


def special_matrices(context: str, t: int = 0) -> Dict[str, Block]:
    """The fixed small matrices used by the c = 1 and c = 3 (mod 4) assemblies.

    ``context`` is one of ``c1_general``, ``c1_97``, ``c3_general``, ``c3_77``.
    """
    if t < 0:
        raise InvalidParameters(f"t must be nonnegative, got {t}")
    zero5x3 = SumProfile((0,) * 5, (0,) * 3)
    if context in ("c1_general", "c1_97"):
        h = 24 * t + 16 if context == "c1_general" else 252 * t + 56
        rows = [
            [h, 3, -(h + 3)],
            [-(h + 4), h + 6, -2],
            [h + 2, -(h + 7), 5],
            [-(h + 5), 4, h + 1],
            [7, -6, -1],
        ]
        return {"A5": _checked(f"{context} A'", rows, zero5x3)}
    if context in ("c3_general", "c3_77"):
        if context == "c3_77":
            t = 0
        a1 = [
            [32 * t + 11, -(64 * t + 14), 32 * t + 3],
            [-(64 * t + 12), 32 * t + 5, 32 * t + 7],
            [32 * t + 1, 32 * t + 9, -(64 * t + 10)],
        ]
        a2_ = [
            [64 * t + 26, -(128 * t + 44), 64 * t + 18],
            [-(128 * t + 42), 64 * t + 20, 64 * t + 22],
            [64 * t + 16, 64 * t + 24, -(128 * t + 40)],
        ]
        at = [
            [64 * t + 38, -(128 * t + 64), 64 * t + 30],
            [-(128 * t + 62), 64 * t + 32, 64 * t + 34],
            [64 * t + 28, 64 * t + 36, -(128 * t + 66)],
        ]
        return {
            "A1": _checked(f"{context} A'", a1, ZERO3),
            "A2": _checked(f"{context} A''", a2_, ZERO3),
            "Atilde": _checked(f"{context} A~", at, SumProfile((4, 4, -2), (4, 4, -2))),
        }
    raise InvalidParameters(f"unknown context {context!r}")


def c_pair_block(a: int, b: int) -> Block:
    """2x4 block on ``[a,a+6]_2 u [b,b+6]_2``: rows 0, columns (-2,2,2,-2)."""
    if set(range(a, a + 7, 2)) & set(range(b, b + 7, 2)):
        raise InvalidParameters(f"c_pair_block: progressions from {a} and {b} overlap")
    return Block([
        [a, -(a + 4), -b, b + 4],
        [-(a + 2), a + 6, b + 2, -(b + 6)],
    ])


def fm_block(w: int, y: int) -> Block:
    """Zero-sum 4x4 block on ``{w+4,..,w+16}_4 u [y+1, y+12]``."""
    return Block([
        [w + 4, -(w + 8), y + 10, -(y + 6)],
        [-(w + 12), w + 16, y + 3, -(y + 7)],
        [-(y + 1), y + 4, -(y + 5), y + 2],
        [y + 9, -(y + 12), -(y + 8), y + 11],
    ])


def d_block(j: int, beta_base: int, t: int = None) -> Block:
    """The j-th block of the c = 0 (mod 4) D-family, with large part starting at ``beta_base``."""
    if j < 0 or (t is not None and j >= t):
        raise InvalidParameters(f"d_block index {j} out of range")
    return fm_block(16 * j, beta_base + 12 * j)


def u_block(t: int) -> Block:
    """Zero-sum 4x4 block used for even t in the (7,7) assembly."""
    return _checked("U block", [
        [2, -(40 * t + 56), 40 * t + 58, -4],
        [-(40 * t + 48), 40 * t + 52, 32 * t + 36, -(32 * t + 40)],
        [40 * t + 54, -(32 * t + 42), -(40 * t + 50), 32 * t + 38],
        [-8, 32 * t + 46, -(32 * t + 44), 6],
    ], SumProfile((0,) * 4, (0,) * 4))
