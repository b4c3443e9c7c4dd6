"""Edge-disjoint copy packings, iterated cleaning, and cycle boosting."""

import math
from dataclasses import dataclass, field

from .errors import BudgetExceededError
from .graph import Graph, bfs_layer_masks, edge_key
from .util import iter_bits, node_budget, stream_rng


@dataclass(frozen=True)
class Packing:
    """Pairwise edge-disjoint labeled copies of a pattern in some host.

    copies[i] is a vertex map: copies[i][p] = host image of pattern vertex p.
    """

    pattern: Graph
    copies: tuple
    used_edges: frozenset = field(default=None)

    def __post_init__(self):
        if self.used_edges is None:
            used = set()
            for c in self.copies:
                for u, v in self.pattern.edges():
                    used.add(edge_key(c[u], c[v]))
            object.__setattr__(self, "used_edges", frozenset(used))

    def __len__(self):
        return len(self.copies)

    def validate(self, g: Graph):
        """Audit: per-copy correctness, pairwise edge-disjointness, and
        used_edges being exactly the union. Raises ValueError on failure."""
        seen = set()
        p_edges = self.pattern.edges()
        for c in self.copies:
            if len(c) != self.pattern.n or len(set(c)) != len(c):
                raise ValueError(f"copy {c} is not injective")
            for u, v in p_edges:
                a, b = c[u], c[v]
                if not g.has_edge(a, b):
                    raise ValueError(f"copy {c} misses edge {a}-{b}")
                key = edge_key(a, b)
                if key in seen:
                    raise ValueError(f"edge {key} used twice")
                seen.add(key)
        if seen != set(self.used_edges):
            raise ValueError("used_edges is not the union of copy edges")
        return True


@dataclass(frozen=True)
class CleanReport:
    """Fixed point of the low-multiplicity deletion loop."""

    surviving: Packing
    core_vertices: frozenset
    rounds: int


@dataclass
class BoostReport:
    ell: int
    k: int
    input_copies: int
    threshold_first: int
    cleaned_copies: int
    core_size: int
    per_root: list = field(default_factory=list)
    cycles_found: int = 0
    budget_exhausted: bool = False


def _is_odd_cycle_pattern(h: Graph):
    """Return L if the pattern is C_L with L odd, else None."""
    if h.n < 3 or h.m != h.n or any(d != 2 for d in h.degrees()):
        return None
    reach = 0
    for layer in bfs_layer_masks(h, 0, h.n):
        reach |= layer
    if reach != h.vertex_mask() or h.n % 2 == 0:
        return None
    return h.n


def canonical_cycle(seq):
    """Canonical form of a cyclic vertex sequence up to rotation/reflection."""
    best = None
    k = len(seq)
    for rev in (tuple(seq), tuple(reversed(seq))):
        for r in range(k):
            cand = rev[r:] + rev[:r]
            if best is None or cand < best:
                best = cand
    return best


# -- greedy maximal packing ----------------------------------------------------

class _PackingSearch:
    """Lexicographically ordered copy search over mutable availability masks.

    Pattern vertices are assigned in natural id order, so copies are found
    in lexicographic map order. Resuming from the last found key yields the
    same packing as restarting (the first-copy sequence is monotone:
    copies only die as edges get used).
    """

    def __init__(self, h: Graph, g: Graph, root_order):
        self.h = h
        self.g = g
        self.avail = list(g.adjacency)
        self.root_order = list(root_order)
        self.root_pos = {v: i for i, v in enumerate(self.root_order)}
        self.back = [
            [w for w in iter_bits(h.adjacency[i]) if w < i] for i in range(h.n)
        ]
        self.key = None  # resume key: (root position, v1, v2, ...)
        self.nodes = 0

    def take(self, copy):
        for u, v in self.h.edges():
            a, b = copy[u], copy[v]
            self.avail[a] &= ~(1 << b)
            self.avail[b] &= ~(1 << a)
        self.key = (self.root_pos[copy[0]],) + tuple(copy[1:])

    def residual_graph(self) -> Graph:
        return Graph(self.g.n, tuple(self.avail))

    def next_copy(self, node_cap):
        """First valid copy with key >= resume key, or None if exhausted.

        On budget exhaustion the resume key is checkpointed at the current
        DFS position (everything before it is already explored), so slices
        never repeat work.
        """
        h, g = self.h, self.g
        images = [0] * h.n
        full = g.vertex_mask()
        stop = self.nodes + node_cap
        key = self.key
        if key is None:
            key = (0,) + (0,) * (h.n - 1)

        def checkpoint(i, v):
            # v is a root POSITION at level 0, a vertex id elsewhere
            if i == 0:
                self.key = (v,) + (0,) * (h.n - 1)
            else:
                self.key = (
                    (self.root_pos[images[0]],)
                    + tuple(images[1:i])
                    + (v,)
                    + (0,) * (h.n - 1 - i)
                )

        def rec(i, assigned, tight):
            if i == h.n:
                return True
            if i == 0:
                start = key[0] if tight else 0
                for pos in range(start, len(self.root_order)):
                    v = self.root_order[pos]
                    self.nodes += 1
                    if self.nodes > stop:
                        checkpoint(0, pos)
                        raise BudgetExceededError(self.nodes)
                    images[0] = v
                    if rec(1, 1 << v, tight and pos == key[0]):
                        return True
                return False
            cand = full & ~assigned
            for b in self.back[i]:
                cand &= self.avail[images[b]]
            if tight:
                cand &= ~((1 << key[i]) - 1)
            while cand:
                low = cand & -cand
                cand ^= low
                v = low.bit_length() - 1
                self.nodes += 1
                if self.nodes > stop:
                    checkpoint(i, v)
                    raise BudgetExceededError(self.nodes)
                images[i] = v
                if rec(i + 1, assigned | low, tight and v == key[i]):
                    return True
            return False

        found = rec(0, 0, True)
        return tuple(images) if found else None


def greedy_packing(h: Graph, g: Graph, seed=0, shuffle=False, budget=None) -> Packing:
    """Maximal (not maximum) edge-disjoint packing of labeled H-copies.

    Repeatedly takes the lexicographically-first copy avoiding used edges;
    deterministic. With shuffle=True the seed permutes only the root-vertex
    order. For odd-cycle patterns, exhaustion may be certified early by an
    odd-girth check on the residual graph when the search budget runs out.
    """
    budget = node_budget(budget)
    root_order = list(range(g.n))
    if shuffle:
        stream_rng(seed, "packing-roots", h.n, g.n).shuffle(root_order)
    search = _PackingSearch(h, g, root_order)
    cycle_len = _is_odd_cycle_pattern(h)
    copies = []
    slice_cap = min(budget, 5_000_000)
    while True:
        try:
            copy = search.next_copy(slice_cap)
        except BudgetExceededError:
            if cycle_len is not None:
                from .invariants import odd_girth

                if odd_girth(search.residual_graph()).value > cycle_len:
                    break
            if search.nodes >= budget:
                raise
            continue
        if copy is None:
            break
        copies.append(copy)
        search.take(copy)
    return Packing(h, tuple(copies))


def residual_has_copy(h: Graph, g: Graph, used_edges, budget=None):
    """Exhaustive check used by maximality audits: is there a copy of H in
    G that avoids used_edges entirely? Returns the copy or None."""
    budget = node_budget(budget)
    residual = g.with_edges_removed(used_edges)
    from .homomorphism import find_injective_copy

    return find_injective_copy(h, residual, budget)


# -- iterated cleaning ----------------------------------------------------------

def clean_packing(g: Graph, packing: Packing, threshold: int) -> CleanReport:
    """Delete copies through low-multiplicity vertices to a fixed point.

    Per round, all copies through the lowest-indexed vertex lying in
    1..threshold-1 copies are removed (fixed order for determinism). In the
    result every vertex lies in 0 or >= threshold copies.
    """
    if threshold < 1:
        raise ValueError("threshold must be >= 1")
    copies = list(packing.copies)
    rounds = 0
    while True:
        load = {}
        for c in copies:
            for v in set(c):
                load[v] = load.get(v, 0) + 1
        violating = [v for v, cnt in load.items() if cnt < threshold]
        if not violating:
            core = frozenset(v for v, cnt in load.items() if cnt >= threshold)
            return CleanReport(
                Packing(packing.pattern, tuple(copies)), core, rounds
            )
        bad = min(violating)
        copies = [c for c in copies if bad not in set(c)]
        rounds += 1


# -- cycle boosting ---------------------------------------------------------------

def _good_orientation(cycle_map, center_ok, part_of, ell):
    """Oriented copy of the cycle with its center in part 0 and arms in
    matching parts, or None. First valid rotation/reflection wins."""
    L = len(cycle_map)
    for seq in (tuple(cycle_map), tuple(reversed(cycle_map))):
        for r in range(L):
            rot = seq[r:] + seq[:r]
            center = rot[ell]
            if not ((center_ok >> center) & 1) or part_of[center] != 0:
                continue
            if all(
                part_of[rot[ell - i]] == i and part_of[rot[ell + i]] == i
                for i in range(1, ell + 1)
            ):
                return rot
    return None


def boost_cycles(
    g: Graph,
    packing: Packing,
    k: int,
    seed=0,
    rounds: int = 8,
    budget=None,
    max_cycles: int = 10000,
):
    """Build C_{2k+1} copies out of an edge-disjoint C_{2l+1} packing.

    Constructive version of the boosting argument: clean the packing so
    every vertex is popular or absent, then per core vertex v0 draw seeded
    random partitions, keep good cycles, re-clean, and extend a path inside
    the innermost layer outward to the neighborhood of v0, closing through
    v0. Returns (cycles, report); cycles are distinct up to
    rotation/reflection, each starting at its v0.
    """
    ell2 = _is_odd_cycle_pattern(packing.pattern)
    if ell2 is None:
        raise ValueError("packing pattern must be an odd cycle")
    ell = (ell2 - 1) // 2
    if not (1 <= ell < k):
        raise ValueError(f"need 1 <= l < k, got l={ell}, k={k}")
    packing.validate(g)  # invalid packing is an error, not a silent skip
    budget = node_budget(budget)
    n = g.n

    t1 = max(1, math.ceil(len(packing) / (2 * n))) if n else 1
    cleaned = clean_packing(g, packing, t1)
    report = BoostReport(
        ell=ell,
        k=k,
        input_copies=len(packing),
        threshold_first=t1,
        cleaned_copies=len(cleaned.surviving),
        core_size=len(cleaned.core_vertices),
    )
    out = {}
    nodes = 0
    for v0 in sorted(cleaned.core_vertices):
        nbhd = g.adjacency[v0]
        pool = [
            c
            for c in cleaned.surviving.copies
            if v0 not in c and any((nbhd >> x) & 1 for x in c)
        ]
        if not pool:
            report.per_root.append((v0, 0, 0, 0))
            continue
        best_good, best_parts = [], None
        for r in range(rounds):
            rng = stream_rng(seed, "boost-partition", v0, r)
            part_of = [-1] * n
            for v in range(n):
                if v != v0:
                    part_of[v] = rng.randrange(ell + 1)
            good = []
            for c in pool:
                rot = _good_orientation(c, nbhd, part_of, ell)
                if rot is not None:
                    good.append(rot)
            if len(good) > len(best_good):
                best_good, best_parts = good, part_of
        if not best_good:
            report.per_root.append((v0, len(pool), 0, 0))
            continue
        part_of = best_parts
        t2 = max(1, math.ceil(len(best_good) / (2 * n)))
        recleaned = clean_packing(
            g, Packing(packing.pattern, tuple(best_good)), t2
        )
        w_mask = 0
        for v in recleaned.core_vertices:
            w_mask |= 1 << v
        part_mask = [0] * (ell + 1)
        for v in range(n):
            if v != v0 and part_of[v] >= 0:
                part_mask[part_of[v]] |= 1 << v
        found_here = 0

        # y-positions 1..2k (paper indexing); mid path lives in W & V_ell
        mid_len = 2 * k - 2 * ell
        inner = w_mask & part_mask[ell]
        close_mask = w_mask & part_mask[0] & nbhd

        def emit(ys):
            nonlocal found_here
            cyc = (v0,) + tuple(ys)
            key = canonical_cycle(cyc)
            if key not in out:
                out[key] = cyc
                found_here += 1

        def extend(ys, used, i):
            # ys covers positions i+1 .. 2k-i; grow both ends into layer i-1
            nonlocal nodes
            if i == 0:
                emit(ys)
                return
            layer = (w_mask & part_mask[i - 1]) if i > 1 else close_mask
            left = g.adjacency[ys[0]] & layer & ~used
            for a in iter_bits(left):
                nodes += 1
                if nodes > budget:
                    raise BudgetExceededError(nodes)
                right = g.adjacency[ys[-1]] & layer & ~used & ~(1 << a)
                for b in iter_bits(right):
                    nodes += 1
                    if nodes > budget:
                        raise BudgetExceededError(nodes)
                    extend((a,) + ys + (b,), used | (1 << a) | (1 << b), i - 1)
                    if len(out) >= max_cycles:
                        return

        def mid_paths(path, used, remaining):
            nonlocal nodes
            if remaining == 0:
                extend(tuple(path), used, ell)
                return
            cand = g.adjacency[path[-1]] & inner & ~used
            for v in iter_bits(cand):
                nodes += 1
                if nodes > budget:
                    raise BudgetExceededError(nodes)
                path.append(v)
                mid_paths(path, used | (1 << v), remaining - 1)
                path.pop()
                if len(out) >= max_cycles:
                    return

        try:
            for start in iter_bits(inner):
                mid_paths([start], (1 << start) | (1 << v0), mid_len - 1)
                if len(out) >= max_cycles:
                    break
        except BudgetExceededError:
            report.budget_exhausted = True
            report.per_root.append((v0, len(pool), len(best_good), found_here))
            break
        report.per_root.append((v0, len(pool), len(best_good), found_here))
        if len(out) >= max_cycles:
            break
    report.cycles_found = len(out)
    return list(out.values()), report
