"""Random disjoint parameter layouts shared by several test modules."""

import random

from intheffter.blocks import TEMPLATE_ARITY, TemplateParams

# span of values claimed by each base kind, counted from base+1
SPAN = {"w": 16, "x": 8, "y": 4, "z": 8}


def random_template_params(name, rng: random.Random) -> TemplateParams:
    """Bases for ``name`` whose pieces are pairwise disjoint, in shuffled order with random gaps."""
    counts = dict(zip("wxyz", TEMPLATE_ARITY[name]))
    slots = [kind for kind, c in counts.items() for _ in range(c)]
    rng.shuffle(slots)
    bases = {k: [] for k in "wxyz"}
    pos = rng.randint(0, 20)
    for kind in slots:
        bases[kind].append(pos)
        pos += SPAN[kind] + rng.randint(0, 5)
    return TemplateParams(**bases)


def disjoint_pool(rng: random.Random, n1: int, n2: int):
    """``n1`` type-1 and ``n2`` type-2 FourSets, pairwise disjoint."""
    from intheffter.core import FourSet

    kinds = [1] * n1 + [2] * n2
    rng.shuffle(kinds)
    t1, t2, pos = [], [], rng.randint(1, 10)
    for d in kinds:
        (t1 if d == 1 else t2).append(FourSet(pos, d))
        pos += 3 * d + 1 + rng.randint(0, 3)
    return t1, t2
