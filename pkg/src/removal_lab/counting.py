"""Exact labeled-copy counting: plain, part-constrained, blow-up, anchored.

All counts follow the labeled convention: the value is the number of
injective edge-preserving maps under the stated constraints. Counters are
arbitrary-precision (n=4096, h=8 overflows 64 bits).
"""

from dataclasses import dataclass

from ._kernels import assignment_order, count_injective
from .errors import SizeBudgetError
from .graph import Graph, blow_up
from .util import node_budget

MAX_PATTERN_VERTICES = 8
MAX_CLIQUE_R = 8
MAX_CYCLE_LENGTH = 9


@dataclass(frozen=True)
class CopyCount:
    value: int
    n: int
    h: int

    @property
    def normalized(self) -> float:
        if self.n == 0:
            return 0.0
        return self.value / self.n**self.h


@dataclass(frozen=True)
class BlowupSpec:
    """Per-vertex multiplicities of a blow-up H[s_1..s_h]."""

    s: tuple

    def __post_init__(self):
        if not self.s or any(x <= 0 for x in self.s):
            raise ValueError("all multiplicities must be positive")

    @property
    def total(self):
        return sum(self.s)


def _as_mask(vertices, n):
    if isinstance(vertices, int):
        return vertices
    mask = 0
    for v in vertices:
        if not (0 <= v < n):
            raise ValueError(f"part vertex {v} out of range")
        mask |= 1 << v
    return mask


def count_restricted_copies(
    h: Graph, g: Graph, candidates=None, anchors=(), budget=None
) -> CopyCount:
    """General kernel: injective maps with per-vertex candidate masks and
    optional fixed assignments anchors = ((pattern_v, image_v), ...)."""
    budget = node_budget(budget)
    full = g.vertex_mask()
    if candidates is None:
        masks = [full] * h.n
    else:
        if len(candidates) != h.n:
            raise ValueError("one candidate set per pattern vertex")
        masks = [_as_mask(c, g.n) & full for c in candidates]
    anchored = []
    for pv, img in anchors:
        masks[pv] &= 1 << img
        anchored.append(pv)
    order = assignment_order(h.adjacency, anchors=anchored)
    value = count_injective(h.adjacency, order, g, masks, budget)
    return CopyCount(value, g.n, h.n)


def count_labeled_copies(h: Graph, g: Graph, budget=None) -> CopyCount:
    """Number of injective homomorphisms H -> G."""
    if h.n > MAX_PATTERN_VERTICES:
        raise SizeBudgetError(f"pattern capped at h={MAX_PATTERN_VERTICES}")
    return count_restricted_copies(h, g, budget=budget)


def count_constrained_copies(h: Graph, g: Graph, parts, budget=None) -> CopyCount:
    """Copies with the image of pattern vertex i restricted to parts[i].

    Parts need not be disjoint.
    """
    if h.n > MAX_PATTERN_VERTICES:
        raise SizeBudgetError(f"pattern capped at h={MAX_PATTERN_VERTICES}")
    return count_restricted_copies(h, g, candidates=parts, budget=budget)


def count_blowup_copies(
    h: Graph, spec: BlowupSpec, g: Graph, parts, budget=None
) -> CopyCount:
    """Copies of the blow-up H[s_1..s_h] with clone class i inside parts[i]."""
    if len(spec.s) != h.n:
        raise ValueError("spec length must match pattern order")
    if spec.total > MAX_PATTERN_VERTICES:
        raise SizeBudgetError(
            f"blown pattern capped at {MAX_PATTERN_VERTICES} vertices"
        )
    blown = blow_up(h, spec.s)
    expanded = []
    for i in range(h.n):
        expanded.extend([parts[i]] * spec.s[i])
    return count_restricted_copies(blown, g, candidates=expanded, budget=budget)


def count_anchored_copies(h: Graph, xy, g: Graph, ab, budget=None) -> CopyCount:
    """Copies mapping pattern edge (x, y) onto graph edge (a, b), in that
    orientation (x -> a, y -> b); callers sum both orientations if wanted."""
    x, y = xy
    a, b = ab
    if not h.has_edge(x, y):
        raise ValueError("anchor not an edge of the pattern")
    if not g.has_edge(a, b):
        raise ValueError("anchor not an edge")
    if h.n > MAX_PATTERN_VERTICES:
        raise SizeBudgetError(f"pattern capped at h={MAX_PATTERN_VERTICES}")
    return count_restricted_copies(
        h, g, anchors=((x, a), (y, b)), budget=budget
    )


def count_cliques(r: int, g: Graph, budget=None) -> CopyCount:
    """Labeled K_r copies via an ascending bitset intersection chain."""
    if not (1 <= r <= MAX_CLIQUE_R):
        raise SizeBudgetError(f"clique order must be in 1..{MAX_CLIQUE_R}")
    budget = node_budget(budget)
    gadj = g.adjacency
    nodes = 0

    def rec(cand, depth):
        nonlocal nodes
        if depth == r - 1:
            nodes += 1
            if nodes > budget:
                from .errors import BudgetExceededError
                raise BudgetExceededError(nodes)
            return cand.bit_count()
        total = 0
        while cand:
            low = cand & -cand
            cand ^= low
            v = low.bit_length() - 1
            nodes += 1
            if nodes > budget:
                from .errors import BudgetExceededError
                raise BudgetExceededError(nodes)
            # ascending: only candidates above v
            total += rec((cand | low) & gadj[v] & ~((1 << (v + 1)) - 1), depth + 1)
        return total

    if r == 1:
        return CopyCount(g.n, g.n, 1)
    unordered = rec(g.vertex_mask(), 0)
    labeled = unordered
    for i in range(2, r + 1):
        labeled *= i
    return CopyCount(labeled, g.n, r)


def count_odd_cycles(length: int, g: Graph, budget=None) -> CopyCount:
    """Labeled copies of the cycle C_length (length odd).

    Enumerates each simple cycle once (minimum vertex first, reflection
    fixed by second < last), then multiplies by the 2*length labelings.
    """
    if length % 2 == 0 or not (3 <= length <= MAX_CYCLE_LENGTH):
        raise SizeBudgetError(
            f"cycle length must be odd, 3..{MAX_CYCLE_LENGTH}"
        )
    budget = node_budget(budget)
    from .graph import bfs_layer_masks

    gadj = g.adjacency
    nodes = 0
    unordered = 0
    for v0 in range(g.n):
        layers = bfs_layer_masks(g, v0, length - 1)
        ball = []
        acc = 0
        for j in range(length):
            if j < len(layers):
                acc |= layers[j]
            ball.append(acc)
        if len(layers) < 2:
            continue
        above = ~((1 << (v0 + 1)) - 1)
        path = [v0]

        def rec(depth, used):
            nonlocal nodes, unordered
            remaining = length - depth
            cand = gadj[path[-1]] & above & ~used & ball[min(remaining, length - 1)]
            if depth == length - 1:
                cand &= gadj[v0] & ~((1 << (path[1] + 1)) - 1)
                nodes += 1
                if nodes > budget:
                    from .errors import BudgetExceededError
                    raise BudgetExceededError(nodes)
                unordered += cand.bit_count()
                return
            while cand:
                low = cand & -cand
                cand ^= low
                nodes += 1
                if nodes > budget:
                    from .errors import BudgetExceededError
                    raise BudgetExceededError(nodes)
                path.append(low.bit_length() - 1)
                rec(depth + 1, used | low)
                path.pop()

        rec(1, 1 << v0)
    return CopyCount(unordered * 2 * length, g.n, length)
