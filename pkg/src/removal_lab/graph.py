"""Immutable simple graphs with bitset adjacency rows, plus builders.

Vertices are dense integer ids 0..n-1. Each adjacency row is a Python int
used as a bitset over [n]; all counting and search kernels reduce to row
intersections, which is why this representation was chosen. n is capped at
4096 by default (desk scale).
"""

from dataclasses import dataclass, field

from .errors import GenerationError, SizeBudgetError
from .util import iter_bits, stream_rng

DEFAULT_MAX_N = 4096


@dataclass(frozen=True)
class Edge:
    """Unordered edge stored with u < v."""

    u: int
    v: int

    def __post_init__(self):
        if self.u == self.v:
            raise ValueError(f"self-loop at vertex {self.u}")
        if self.u > self.v:
            object.__setattr__(self, "u", self.v)
            object.__setattr__(self, "v", self.u)

    def as_tuple(self):
        return (self.u, self.v)


def edge_key(u: int, v: int) -> tuple:
    """Normalized (min, max) form used internally for edge sets."""
    if u == v:
        raise ValueError(f"self-loop at vertex {u}")
    return (u, v) if u < v else (v, u)


@dataclass(frozen=True)
class Graph:
    """Immutable simple undirected graph.

    Invariants (enforced by the builders): adjacency is symmetric, no
    self-loops, and m equals half the total popcount of all rows. Safe for
    concurrent shared reads.
    """

    n: int
    adjacency: tuple
    m: int = field(default=-1)

    def __post_init__(self):
        if self.m < 0:
            object.__setattr__(
                self, "m", sum(row.bit_count() for row in self.adjacency) // 2
            )

    # -- queries ----------------------------------------------------------
    def adj(self, u: int) -> int:
        return self.adjacency[u]

    def has_edge(self, u: int, v: int) -> bool:
        return bool((self.adjacency[u] >> v) & 1)

    def degree(self, u: int) -> int:
        return self.adjacency[u].bit_count()

    def degrees(self):
        return [row.bit_count() for row in self.adjacency]

    def neighbors(self, u: int):
        return iter_bits(self.adjacency[u])

    def edges(self):
        """Edges as sorted (u, v) tuples with u < v, lexicographic order."""
        out = []
        for u in range(self.n):
            row = self.adjacency[u] >> (u + 1)
            for off in iter_bits(row):
                out.append((u, u + 1 + off))
        return out

    def vertex_mask(self) -> int:
        return (1 << self.n) - 1

    def check(self):
        """Full structural scan: symmetry, loop-freeness, edge count."""
        total = 0
        for u in range(self.n):
            row = self.adjacency[u]
            if (row >> u) & 1:
                raise ValueError(f"self-loop at {u}")
            if row >> self.n:
                raise ValueError(f"adjacency row {u} has bits beyond n")
            total += row.bit_count()
            for v in iter_bits(row):
                if not (self.adjacency[v] >> u) & 1:
                    raise ValueError(f"asymmetric edge {u}-{v}")
        if total != 2 * self.m:
            raise ValueError("edge count does not match adjacency popcount")
        return True

    # -- derived graphs ---------------------------------------------------
    def with_edges_removed(self, edges) -> "Graph":
        rows = list(self.adjacency)
        for e in edges:
            u, v = e.as_tuple() if isinstance(e, Edge) else edge_key(*e)
            rows[u] &= ~(1 << v)
            rows[v] &= ~(1 << u)
        return Graph(self.n, tuple(rows))

    def without_vertices(self, drop) -> "Graph":
        """Isolate the vertices in `drop` (ids kept stable)."""
        keep_mask = self.vertex_mask()
        for v in drop:
            keep_mask &= ~(1 << v)
        rows = [
            (self.adjacency[u] & keep_mask) if (keep_mask >> u) & 1 else 0
            for u in range(self.n)
        ]
        return Graph(self.n, tuple(rows))


def build_graph(n: int, edges, max_n: int = DEFAULT_MAX_N) -> Graph:
    """Build a Graph from an edge list; rejects loops, duplicates, bad ids."""
    if n < 0:
        raise ValueError("negative vertex count")
    if n > max_n:
        raise SizeBudgetError(f"n={n} exceeds cap {max_n}")
    rows = [0] * n
    seen = set()
    count = 0
    for e in edges:
        u, v = e.as_tuple() if isinstance(e, Edge) else edge_key(*e)
        if not (0 <= u < n and 0 <= v < n):
            raise ValueError(f"edge endpoint out of range: ({u},{v}) with n={n}")
        if (u, v) in seen:
            raise ValueError(f"duplicate edge ({u},{v})")
        seen.add((u, v))
        rows[u] |= 1 << v
        rows[v] |= 1 << u
        count += 1
    return Graph(n, tuple(rows), count)


# -- basic builders --------------------------------------------------------

def empty_graph(n: int) -> Graph:
    return Graph(n, tuple([0] * n), 0)


def complete_graph(n: int) -> Graph:
    full = (1 << n) - 1
    return Graph(n, tuple(full ^ (1 << u) for u in range(n)), n * (n - 1) // 2)


def cycle_graph(length: int) -> Graph:
    if length < 3:
        raise ValueError("cycle needs length >= 3")
    return build_graph(length, [(i, (i + 1) % length) for i in range(length)])


def path_graph(n_vertices: int) -> Graph:
    return build_graph(n_vertices, [(i, i + 1) for i in range(n_vertices - 1)])


def complete_bipartite(a: int, b: int) -> Graph:
    left = ((1 << b) - 1) << a
    right = (1 << a) - 1
    rows = [left] * a + [right] * b
    return Graph(a + b, tuple(rows), a * b)


def complete_multipartite(sizes) -> Graph:
    n = sum(sizes)
    full = (1 << n) - 1
    rows = []
    offset = 0
    for s in sizes:
        block = ((1 << s) - 1) << offset
        rows.extend([full ^ block] * s)
        offset += s
    return Graph(n, tuple(rows))


def petersen_graph() -> Graph:
    outer = [(i, (i + 1) % 5) for i in range(5)]
    spokes = [(i, i + 5) for i in range(5)]
    inner = [(5 + i, 5 + (i + 2) % 5) for i in range(5)]
    return build_graph(10, outer + spokes + inner)


def blow_up(g: Graph, sizes) -> Graph:
    """Replace vertex i by an independent set of `sizes[i]` clones; edges
    become complete bipartite graphs between clone classes."""
    if len(sizes) != g.n or any(s <= 0 for s in sizes):
        raise ValueError("need one positive multiplicity per vertex")
    offsets = [0] * g.n
    total = 0
    for i, s in enumerate(sizes):
        offsets[i] = total
        total += s
    masks = [((1 << sizes[i]) - 1) << offsets[i] for i in range(g.n)]
    rows = []
    for i in range(g.n):
        row = 0
        for j in g.neighbors(i):
            row |= masks[j]
        rows.extend([row] * sizes[i])
    return Graph(total, tuple(rows))


def disjoint_union(g1: Graph, g2: Graph) -> Graph:
    rows = list(g1.adjacency) + [row << g1.n for row in g2.adjacency]
    return Graph(g1.n + g2.n, tuple(rows), g1.m + g2.m)


def bfs_layer_masks(g: Graph, root: int, depth_cap: int):
    """BFS layer bitsets [L0, L1, ...] from root, out to depth_cap."""
    layers = [1 << root]
    visited = 1 << root
    frontier = 1 << root
    for _ in range(depth_cap):
        nxt = 0
        for u in iter_bits(frontier):
            nxt |= g.adjacency[u]
        nxt &= ~visited
        if not nxt:
            break
        layers.append(nxt)
        visited |= nxt
        frontier = nxt
    return layers


# -- degree statistics ------------------------------------------------------

def min_degree(g: Graph) -> int:
    if g.n == 0:
        return 0
    return min(g.degrees())


def codegree(g: Graph, u: int, v: int) -> int:
    """Size of the common neighborhood of two distinct vertices."""
    if u == v:
        raise ValueError("codegree needs two distinct vertices")
    return (g.adjacency[u] & g.adjacency[v]).bit_count()


# -- induced subgraph -------------------------------------------------------

def induced_subgraph(g: Graph, vertices):
    """Induced subgraph on `vertices` plus the relabeling map.

    Returns (subgraph, mapping) where mapping[new_id] = old_id; vertices are
    relabeled in increasing old-id order.
    """
    mapping = sorted(set(vertices))
    for v in mapping:
        if not (0 <= v < g.n):
            raise ValueError(f"vertex {v} out of range")
    index = {old: new for new, old in enumerate(mapping)}
    k = len(mapping)
    rows = [0] * k
    for new_u, old_u in enumerate(mapping):
        row = g.adjacency[old_u]
        for old_v in mapping[new_u + 1:]:
            if (row >> old_v) & 1:
                new_v = index[old_v]
                rows[new_u] |= 1 << new_v
                rows[new_v] |= 1 << new_u
    return Graph(k, tuple(rows)), mapping


# -- random regular bipartite gadget ----------------------------------------

def random_regular_bipartite(a: int, b: int, d: int, seed) -> Graph:
    """Bipartite graph, both sides d-regular: union of d random matchings.

    Only equal part sizes are supported (a == b), which is all the
    constructions need. Each matching is a fresh random permutation,
    rejected wholesale on any edge collision; gives exact regularity.
    Deterministic for a fixed seed.
    """
    if a != b:
        raise GenerationError("equal part sizes required (a == b)")
    if not (0 <= d <= a):
        raise GenerationError(f"infeasible degree d={d} for part size {a}")
    rng = seed if hasattr(seed, "random") else stream_rng(seed, "rrb", a, d)
    rows = [0] * (2 * a)
    placed = 0
    retries = 0
    while placed < d:
        perm = list(range(a))
        rng.shuffle(perm)
        if any((rows[i] >> (a + perm[i])) & 1 for i in range(a)):
            retries += 1
            if retries > 1000:
                raise GenerationError(
                    f"matching rejection limit hit (a={a}, d={d})"
                )
            continue
        for i in range(a):
            rows[i] |= 1 << (a + perm[i])
            rows[a + perm[i]] |= 1 << i
        placed += 1
    return Graph(2 * a, tuple(rows), a * d)


# -- labeled vertex partitions ----------------------------------------------

@dataclass(frozen=True)
class VertexPartition:
    """Partition of [n] into named parts with a declared allowed-edge relation.

    `allowed` holds unordered part-id pairs (self-pairs permitted) where
    edges of a bound graph may live.
    """

    part_of: tuple
    part_names: tuple
    allowed: frozenset

    @staticmethod
    def from_blocks(blocks, names, allowed_name_pairs, n=None):
        """blocks[i] = iterable of the vertices in part i."""
        if len(blocks) != len(names):
            raise ValueError("one name per block")
        if n is None:
            n = sum(len(list(b)) for b in blocks)
        part_of = [-1] * n
        for pid, block in enumerate(blocks):
            for v in block:
                if part_of[v] != -1:
                    raise ValueError(f"vertex {v} assigned to two parts")
                part_of[v] = pid
        if any(p == -1 for p in part_of):
            raise ValueError("every vertex needs exactly one part")
        name_to_id = {name: i for i, name in enumerate(names)}
        allowed = frozenset(
            tuple(sorted((name_to_id[x], name_to_id[y])))
            for x, y in allowed_name_pairs
        )
        return VertexPartition(tuple(part_of), tuple(names), allowed)

    def members(self, pid: int):
        return [v for v, p in enumerate(self.part_of) if p == pid]

    def blocks_by_name(self):
        out = {name: [] for name in self.part_names}
        for v, pid in enumerate(self.part_of):
            out[self.part_names[pid]].append(v)
        return out

    def is_valid_for(self, g: Graph) -> bool:
        return not self.violations(g)

    def violations(self, g: Graph):
        """Edges of g joining a part pair outside the allowed relation."""
        bad = []
        for u, v in g.edges():
            pair = tuple(sorted((self.part_of[u], self.part_of[v])))
            if pair not in self.allowed:
                bad.append((u, v))
        return bad
