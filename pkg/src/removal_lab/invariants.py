"""Exact structural invariants of small graphs.

Chromatic number (branch and bound), odd girth with witness (BFS layer
parity), critical edges, bipartiteness, and the minimum-degree/odd-girth
bipartiteness check.
"""

import math
from dataclasses import dataclass

from .errors import AuditError, BudgetExceededError, SizeBudgetError
from .graph import Graph, bfs_layer_masks, edge_key
from .util import iter_bits, node_budget

CHROMATIC_MAX_N = 64


@dataclass(frozen=True)
class OddGirth:
    """Length of a shortest odd cycle; value is math.inf iff bipartite."""

    value: object
    witness: tuple = None

    @property
    def is_finite(self):
        return self.value != math.inf


@dataclass(frozen=True)
class CriticalEdgeSet:
    chi: int
    edges: frozenset


@dataclass(frozen=True)
class AesReport:
    """Outcome of the min-degree + odd-girth bipartiteness test."""

    n: int
    k: int
    min_degree: int
    degree_threshold: float
    odd_girth: object
    hypotheses_hold: bool
    bipartite: bool
    counterexample: bool


# -- bipartiteness -----------------------------------------------------------

def is_bipartite(g: Graph):
    """2-coloring via BFS; returns (left, right) vertex lists or None.

    Deterministic: component roots ascending, each root colored left.
    """
    color = [-1] * g.n
    for root in range(g.n):
        if color[root] != -1:
            continue
        color[root] = 0
        frontier = [root]
        while frontier:
            nxt = []
            for u in frontier:
                cu = color[u]
                for v in g.neighbors(u):
                    if color[v] == -1:
                        color[v] = 1 - cu
                        nxt.append(v)
                    elif color[v] == cu:
                        return None
            frontier = nxt
    left = [v for v in range(g.n) if color[v] == 0]
    right = [v for v in range(g.n) if color[v] == 1]
    return left, right


# -- odd girth ---------------------------------------------------------------

def _min_odd_walk_length(g: Graph) -> object:
    """Minimum over roots/edges of dist(u)+dist(v)+1 with matching parity.

    Equals the odd girth (a minimum odd closed walk is a simple cycle).
    """
    best = math.inf
    for root in range(g.n):
        cap = g.n if best == math.inf else (best - 1) // 2
        layers = bfs_layer_masks(g, root, cap)
        for du in range(len(layers)):
            if 2 * du + 1 >= best:
                break
            for u in iter_bits(layers[du]):
                row = g.adjacency[u]
                # partners at depth dv >= du with dv = du (mod 2)
                for dv in range(du, len(layers), 2):
                    if du + dv + 1 >= best:
                        break
                    if row & layers[dv]:
                        best = du + dv + 1
                        break
    return best


def _lex_min_cycle(g: Graph, length: int):
    """Lexicographically least simple cycle of exactly `length`.

    Canonical form: starts at its minimum vertex, second element smaller
    than the last (reflection). Plain ascending DFS finds the lex-min
    sequence first; distance pruning keeps it cheap.
    """
    for v0 in range(g.n):
        layers = bfs_layer_masks(g, v0, length - 1)
        ball = [0] * length  # ball[j] = vertices within distance j of v0
        acc = 0
        for j in range(length):
            if j < len(layers):
                acc |= layers[j]
            ball[j] = acc
        above = ~((1 << (v0 + 1)) - 1)
        path = [v0]
        used = 1 << v0

        def dfs(depth):
            nonlocal used
            last = path[-1]
            # the new vertex sits `length - depth` edges from closing at v0
            remaining = length - depth
            cand = g.adjacency[last] & above & ~used & ball[min(remaining, length - 1)]
            if depth == length - 1:
                cand &= g.adjacency[v0]
                # reflection canonical form: path[1] < final vertex
                cand &= ~((1 << (path[1] + 1)) - 1)
            for w in iter_bits(cand):
                path.append(w)
                used |= 1 << w
                if depth == length - 1:
                    return True
                if dfs(depth + 1):
                    return True
                path.pop()
                used &= ~(1 << w)
            return False

        if dfs(1):
            return tuple(path)
    return None


def odd_girth(g: Graph) -> OddGirth:
    value = _min_odd_walk_length(g)
    if value == math.inf:
        return OddGirth(math.inf, None)
    witness = _lex_min_cycle(g, value)
    if witness is None:
        raise AuditError("odd walk of minimal length must yield a cycle")
    return OddGirth(value, witness)


def verify_cycle_witness(g: Graph, witness) -> bool:
    """Witness is a simple cycle of g of odd length."""
    k = len(witness)
    if k % 2 == 0 or len(set(witness)) != k:
        return False
    return all(
        g.has_edge(witness[i], witness[(i + 1) % k]) for i in range(k)
    )


# -- chromatic number --------------------------------------------------------

def _greedy_clique(g: Graph):
    """Deterministic greedy clique, best over all starting vertices."""
    order = sorted(range(g.n), key=lambda v: (-g.degree(v), v))
    best = []
    for start in order:
        clique = [start]
        cand = g.adjacency[start]
        for v in order:
            if (cand >> v) & 1:
                clique.append(v)
                cand &= g.adjacency[v]
        if len(clique) > len(best):
            best = clique
    return best


def _dsatur_upper(g: Graph):
    """DSATUR heuristic coloring; returns (num_colors, coloring list)."""
    n = g.n
    color = [-1] * n
    neighbor_colors = [set() for _ in range(n)]
    for _ in range(n):
        v = max(
            (u for u in range(n) if color[u] == -1),
            key=lambda u: (len(neighbor_colors[u]), g.degree(u), -u),
        )
        c = 0
        while c in neighbor_colors[v]:
            c += 1
        color[v] = c
        for w in g.neighbors(v):
            neighbor_colors[w].add(c)
    return max(color, default=-1) + 1, color


def _k_colorable(g: Graph, k: int, seed_clique, budget):
    """Backtracking k-colorability with clique symmetry breaking."""
    n = g.n
    color = [-1] * n
    for i, v in enumerate(seed_clique):
        if i >= k:
            return False
        color[v] = i
    nodes = 0

    def choose():
        pick, pick_sat = -1, (-1, -1)
        for u in range(n):
            if color[u] != -1:
                continue
            sat = len({color[w] for w in g.neighbors(u) if color[w] != -1})
            key = (sat, g.degree(u))
            if key > pick_sat:
                pick, pick_sat = u, key
        return pick

    def extend(remaining):
        nonlocal nodes
        if remaining == 0:
            return True
        u = choose()
        forbidden = {color[w] for w in g.neighbors(u) if color[w] != -1}
        max_used = max((c for c in color if c != -1), default=-1)
        for c in range(min(k, max_used + 2)):
            if c in forbidden:
                continue
            nodes += 1
            if nodes > budget:
                raise BudgetExceededError(nodes)
            color[u] = c
            if extend(remaining - 1):
                return True
            color[u] = -1
        return False

    return extend(n - len(seed_clique))


def chromatic_number(g: Graph, budget=None) -> int:
    if g.n > CHROMATIC_MAX_N:
        raise SizeBudgetError(
            f"exact coloring capped at n={CHROMATIC_MAX_N}, got {g.n}"
        )
    if g.n == 0:
        return 0
    if g.m == 0:
        return 1
    budget = node_budget(budget)
    clique = _greedy_clique(g)
    lb = len(clique)
    ub, _ = _dsatur_upper(g)
    for k in range(lb, ub):
        if _k_colorable(g, k, clique, budget):
            return k
    return ub


# -- critical edges ----------------------------------------------------------

def critical_edges(h: Graph, budget=None) -> CriticalEdgeSet:
    """Edges whose deletion strictly lowers the chromatic number.

    Recomputes chi per edge; correctness over speed (patterns are tiny).
    An empty edge set is meaningful: it signals that no edge is critical.
    """
    chi = chromatic_number(h, budget)
    crit = set()
    for u, v in h.edges():
        chi_minus = chromatic_number(h.with_edges_removed([(u, v)]), budget)
        if chi_minus not in (chi, chi - 1):
            raise AuditError("deleting one edge may lower chi by at most 1")
        if chi_minus < chi:
            crit.add(edge_key(u, v))
    return CriticalEdgeSet(chi, frozenset(crit))


# -- min-degree + odd-girth bipartiteness test -------------------------------

def check_aes_hypothesis(g: Graph, k: int) -> AesReport:
    """Check: delta(G) > 2n/(2k+1) and oddgirth(G) >= 2k+1 (k >= 2) force
    bipartiteness. The counterexample flag must never fire."""
    from .graph import min_degree

    delta = min_degree(g)
    threshold = 2 * g.n / (2 * k + 1)
    og = odd_girth(g)
    holds = k >= 2 and delta > threshold and og.value >= 2 * k + 1
    bip = is_bipartite(g) is not None
    return AesReport(
        n=g.n,
        k=k,
        min_degree=delta,
        degree_threshold=threshold,
        odd_girth=og.value,
        hypotheses_hold=holds,
        bipartite=bip,
        counterexample=holds and not bip,
    )
