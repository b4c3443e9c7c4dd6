"""Shared backtracking kernels over bitset adjacency.

Injective edge-preserving maps (labeled copies) with per-vertex candidate
masks; used by the counting, homomorphism and packing modules.
"""

from .errors import BudgetExceededError
from .util import iter_bits


def peel_rank(h_adj):
    """Min-degree peeling rank per vertex (higher = peeled later)."""
    n = len(h_adj)
    alive = list(range(n))
    rows = list(h_adj)
    rank = [0] * n
    for r in range(n):
        v = min(alive, key=lambda u: (rows[u].bit_count(), u))
        rank[v] = r
        alive.remove(v)
        bit = ~(1 << v)
        for u in alive:
            rows[u] &= bit
    return rank


def assignment_order(h_adj, anchors=()):
    """Anchors first, then greedily the vertex with most ordered neighbors.

    Ties broken by peel rank (denser core first) then vertex id; gives a
    connected min-degeneracy style order that maximizes early pruning.
    """
    n = len(h_adj)
    rank = peel_rank(h_adj)
    order = list(anchors)
    placed = set(order)
    while len(order) < n:
        best, best_key = None, None
        for v in range(n):
            if v in placed:
                continue
            backdeg = sum(1 for w in iter_bits(h_adj[v]) if w in placed)
            key = (backdeg, rank[v], -v)
            if best_key is None or key > best_key:
                best, best_key = v, key
        order.append(best)
        placed.add(best)
    return order


def _prepare(h_adj, order):
    pos = {pv: i for i, pv in enumerate(order)}
    back = []
    for i, pv in enumerate(order):
        back.append(tuple(pos[w] for w in iter_bits(h_adj[pv]) if pos[w] < i))
    return back


def count_injective(h_adj, order, g, cand_masks, budget):
    """Exact number of injective maps pattern -> g respecting edges and
    per-pattern-vertex candidate masks. Budget in node expansions."""
    h = len(order)
    if h == 0:
        return 1
    back = _prepare(h_adj, order)
    gadj = g.adjacency
    images = [0] * h
    nodes = 0
    last = h - 1

    def rec(i, assigned):
        nonlocal nodes
        cand = cand_masks[order[i]] & ~assigned
        for b in back[i]:
            cand &= gadj[images[b]]
        if i == last:
            nodes += 1
            if nodes > budget:
                raise BudgetExceededError(nodes)
            return cand.bit_count()
        total = 0
        while cand:
            low = cand & -cand
            cand ^= low
            nodes += 1
            if nodes > budget:
                raise BudgetExceededError(nodes)
            images[i] = low.bit_length() - 1
            total += rec(i + 1, assigned | low)
        return total

    return rec(0, 0)


def find_injective(h_adj, order, g, cand_masks, budget):
    """First injective copy in deterministic DFS order, or None."""
    h = len(order)
    if h == 0:
        return ()
    back = _prepare(h_adj, order)
    gadj = g.adjacency
    images = [0] * h
    nodes = 0

    def rec(i, assigned):
        nonlocal nodes
        cand = cand_masks[order[i]] & ~assigned
        for b in back[i]:
            cand &= gadj[images[b]]
        while cand:
            low = cand & -cand
            cand ^= low
            nodes += 1
            if nodes > budget:
                raise BudgetExceededError(nodes)
            images[i] = low.bit_length() - 1
            if i == h - 1 or rec(i + 1, assigned | low):
                return True
        return False

    if not rec(0, 0):
        return None
    by_vertex = [0] * h
    for i, pv in enumerate(order):
        by_vertex[pv] = images[i]
    return tuple(by_vertex)
