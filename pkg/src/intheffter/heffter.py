"""From IHS sets to integer Heffter arrays, and which H(m,n;s,k) can be built.

``ihs_to_heffter`` lays the members of a set along a wrapped block diagonal.
``classify`` says where a parameter quadruple stands.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import gcd
from typing import List, Optional, Sequence

import numpy as np

from .core import PartialArray, support_of, verify_ihs, verify_integer_heffter
from .errors import ConstructionError, ExternalConstruction, InvalidParameters, OpenCase
from .ihs import build_ihs

__all__ = [
    "HeffterParams",
    "Feasibility",
    "necessary_conditions",
    "ihs_to_heffter",
    "ihs_regroup",
    "classify",
    "build_integer_heffter",
]


@dataclass(frozen=True)
class HeffterParams:
    m: int
    n: int
    s: int
    k: int

    def __post_init__(self):
        problems = necessary_conditions(self.m, self.n, self.s, self.k)
        if problems:
            raise InvalidParameters("; ".join(problems))

    @property
    def d(self) -> int:
        return gcd(self.s, self.k)

    @property
    def k1(self) -> int:
        return self.k // self.d

    @property
    def s1(self) -> int:
        return self.s // self.d

    @property
    def c(self) -> int:
        return self.m // self.k1


def necessary_conditions(m: int, n: int, s: int, k: int) -> List[str]:
    """Return the violated necessary conditions for an integer H(m,n;s,k) (empty if none)."""
    problems = []
    if not 3 <= s <= n:
        problems.append(f"need 3 <= s <= n, got s={s}, n={n}")
    if not 3 <= k <= m:
        problems.append(f"need 3 <= k <= m, got k={k}, m={m}")
    if m * s != n * k:
        problems.append(f"need ms = nk, got {m * s} != {n * k}")
    if (n * k) % 4 not in (0, 3):
        problems.append(f"need nk = 0 or 3 mod 4, got nk = {n * k} = {(n * k) % 4} mod 4")
    return problems


# ---------------------------------------------------------------------------
# composition

def ihs_to_heffter(arrays: Sequence[PartialArray], a: int, b: int, e: int) -> PartialArray:
    """Compose an IHS(a, be; c) into an integer H(ac, bc; be, ae).

    Member ``l`` starts at row ``a*l`` and column ``b*l``; columns wrap modulo ``bc``.
    """
    arrays = [x if isinstance(x, PartialArray) else PartialArray(x) for x in arrays]
    c = len(arrays)
    if c < 1 or min(a, b, e) < 1:
        raise InvalidParameters("need c, a, b, e >= 1")
    if e > c:
        raise InvalidParameters(f"need e <= c, got e={e}, c={c}")
    report = verify_ihs(arrays, a, b * e, c)
    if not report.passed:
        raise InvalidParameters(f"input is not an IHS({a},{b * e};{c})\n{report.summary()}")
    out = np.zeros((a * c, b * c), dtype=np.int64)
    cols = np.arange(b * e)
    for ell, arr in enumerate(arrays):
        target = (b * ell + cols) % (b * c)
        rows = out[a * ell:a * (ell + 1)]
        if rows[:, target].any():
            raise ConstructionError(f"member {ell} would overwrite filled cells")
        rows[:, target] = arr.cells
    result = PartialArray(out)
    check = verify_integer_heffter(result, b * e, a * e)
    if not check.passed:
        raise ConstructionError(f"composition is not an H({a * c},{b * c};{b * e},{a * e})\n{check.summary()}")
    return result


def ihs_regroup(arrays: Sequence[PartialArray], e: int) -> List[PartialArray]:
    """Concatenate consecutive runs of ``e`` members: IHS(a,b;ce) -> IHS(a,be;c)."""
    arrays = [x if isinstance(x, PartialArray) else PartialArray(x) for x in arrays]
    if e < 1 or len(arrays) % e:
        raise InvalidParameters(f"{len(arrays)} members cannot be grouped in runs of {e}")
    out = [
        PartialArray(np.hstack([x.cells for x in arrays[i:i + e]]))
        for i in range(0, len(arrays), e)
    ]
    if support_of(out) != support_of(arrays):
        raise ConstructionError("regrouping changed the support")
    return out


# ---------------------------------------------------------------------------
# classification

KNOWN_CASES = {
    1: "s = k",
    2: "m = k and n = s",
    3: "s and k both even",
    4: "gcd(s,k) = 3 mod 4",
    5: "gcd(s,k) = 1 mod 4, gcd >= 5 and nk = 3 mod 4",
    6: "s = 0 mod 4 and k odd, k != 5",
}

OPEN_REASONS = {
    "k=5": "k = 5",
    "k<7d": "5 != k < 7 gcd(s,k) and s != 0 mod 4",
    "s in {3,5,6,10}": "k >= 7 gcd(s,k) and s in {3,5,6,10}",
    "unlisted": "matches no known construction and no listed open family",
}


@dataclass(frozen=True)
class Feasibility:
    """Where a quadruple stands. ``verdict`` is one of
    NecessaryFail, ConstructedHere, KnownElsewhere, Open."""

    verdict: str
    case: Optional[int] = None
    reason: Optional[str] = None
    transposed: bool = False
    detail: str = ""

    def __str__(self) -> str:
        if self.verdict == "KnownElsewhere":
            return f"KnownElsewhere({self.case})"
        if self.verdict == "Open":
            return f"Open({self.reason})"
        return self.verdict

    @property
    def buildable(self) -> bool:
        return self.verdict == "ConstructedHere"


def _route(m: int, n: int, s: int, k: int) -> Optional[str]:
    """Which IHS route builds H(m,n;s,k) directly, or None."""
    d = gcd(s, k)
    if k % 2 == 0 or k < 7 * d or s in (3, 5, 6, 10):
        return None
    c = m // (k // d)
    if s % 2 == 1 and s >= 7 and c >= 2:
        return "odd"
    if s % 4 == 2 and s >= 14:
        return "half"
    return None


def _known_case(m: int, n: int, s: int, k: int) -> Optional[int]:
    d = gcd(s, k)
    if s == k:
        return 1
    if m == k and n == s:
        return 2
    if s % 2 == 0 and k % 2 == 0:
        return 3
    if d % 4 == 3:
        return 4
    if d % 4 == 1 and d >= 5 and (n * k) % 4 == 3:
        return 5
    if s % 4 == 0 and k % 2 == 1 and k != 5:
        return 6
    return None


def _open_reason(m: int, n: int, s: int, k: int) -> Optional[str]:
    d = gcd(s, k)
    if k % 2 == 0 or s == k or k == m or d % 4 != 1:
        return None
    if d >= 5 and n % 4 != 0:
        return None
    if k == 5:
        return "k=5"
    if k < 7 * d and s % 4 != 0:
        return "k<7d"
    if k >= 7 * d and s in (3, 5, 6, 10):
        return "s in {3,5,6,10}"
    return None


def classify(m: int, n: int, s: int, k: int) -> Feasibility:
    """Classify (m,n,s,k); checks run in a fixed order and the first match wins."""
    problems = necessary_conditions(m, n, s, k)
    if problems:
        return Feasibility("NecessaryFail", detail="; ".join(problems))
    if _route(m, n, s, k):
        return Feasibility("ConstructedHere")
    if _route(n, m, k, s):
        return Feasibility("ConstructedHere", transposed=True)
    for quad, flipped in (((m, n, s, k), False), ((n, m, k, s), True)):
        case = _known_case(*quad)
        if case is not None:
            return Feasibility("KnownElsewhere", case=case, transposed=flipped, detail=KNOWN_CASES[case])
    for quad, flipped in (((m, n, s, k), False), ((n, m, k, s), True)):
        reason = _open_reason(*quad)
        if reason is not None:
            return Feasibility("Open", reason=reason, transposed=flipped, detail=OPEN_REASONS[reason])
    return Feasibility("Open", reason="unlisted", detail=OPEN_REASONS["unlisted"])


# ---------------------------------------------------------------------------
# end to end

def _build_direct(m: int, n: int, s: int, k: int, route: str) -> PartialArray:
    d = gcd(s, k)
    k1, s1 = k // d, s // d
    c = m // k1
    if route == "odd":
        ihs = build_ihs(k1, s, c)
    else:
        ihs = ihs_regroup(build_ihs(k1, s // 2, 2 * c), 2)
    return ihs_to_heffter(ihs, k1, s1, d)


def build_integer_heffter(m: int, n: int, s: int, k: int) -> PartialArray:
    """A verified integer H(m,n;s,k), when one of the IHS routes applies.

    If both orientations are buildable, the one with ``k <= s`` is used, so
    swapping (m,n,s,k) to (n,m,k,s) yields the transpose.
    """
    verdict = classify(m, n, s, k)
    if verdict.verdict == "NecessaryFail":
        raise InvalidParameters(f"H({m},{n};{s},{k}) violates the necessary conditions: {verdict.detail}")
    direct, flipped = _route(m, n, s, k), _route(n, m, k, s)
    if direct and (not flipped or k <= s):
        out = _build_direct(m, n, s, k, direct)
    elif flipped:
        out = _build_direct(n, m, k, s, flipped).T
    elif verdict.verdict == "KnownElsewhere":
        raise ExternalConstruction(
            f"H({m},{n};{s},{k}) exists by a construction not implemented here ({verdict.detail})", verdict
        )
    else:
        raise OpenCase(f"no construction is known for H({m},{n};{s},{k}) ({verdict.detail})", verdict)
    report = verify_integer_heffter(out, s, k)
    if not report.passed:
        raise ConstructionError(f"H({m},{n};{s},{k}) failed self-verification\n{report.summary()}")
    return out
