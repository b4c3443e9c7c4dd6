"""Generators for the extremal constructions: Turán graphs, solution-free
sets, the shift gadget with its designed cycle packing, the padded
low-threshold construction, and both minimum-degree lower-bound graphs.

Every generator returns a ConstructionOutput carrying the graph, its
labeled partition with the declared allowed-edge relation, the designed
packing when one exists, and an echo of all parameters (rounding is
explicit: sizes come from largest-remainder apportionment, regular-gadget
degrees are exact integers d = round(eps*n), and reports echo d/n).
"""

import math
from dataclasses import dataclass

import numpy as np

from .errors import GenerationError
from .graph import (
    Graph,
    VertexPartition,
    build_graph,
    complete_multipartite,
    random_regular_bipartite,
)
from .packing import Packing
from .util import stream_rng


@dataclass(frozen=True)
class SolutionFreeSet:
    """B in [N] with no nontrivial solution of b_1+..+b_{2k} = 2k*b_0.

    For k=1 this is 3-AP-freeness (x + y = 2z only when x = y = z).
    """

    N: int
    B: tuple
    k: int

    def validate(self):
        """Exact audit via convolution powers: the only ordered 2k-tuple of
        B-elements summing to 2k*b0 must be the all-b0 tuple."""
        if any(not (1 <= b <= self.N) for b in self.B):
            raise ValueError("elements out of range")
        if len(set(self.B)) != len(self.B):
            raise ValueError("duplicate elements")
        if not self.B:
            return True
        vec = np.zeros(self.N + 1, dtype=np.int64)
        for b in self.B:
            vec[b] = 1
        ways = vec.copy()
        for _ in range(2 * self.k - 1):
            ways = np.convolve(ways, vec)
        for b in self.B:
            if ways[2 * self.k * b] != 1:
                raise ValueError(
                    f"nontrivial solution through b0={b} "
                    f"({int(ways[2 * self.k * b])} ordered tuples)"
                )
        return True


@dataclass(frozen=True)
class ConstructionOutput:
    graph: Graph
    partition: VertexPartition
    designed_packing: object  # Packing or None
    params: dict

    def audit(self):
        """Partition validity plus designed-packing validity."""
        ok_partition = self.partition.is_valid_for(self.graph)
        ok_packing = True
        if self.designed_packing is not None:
            try:
                self.designed_packing.validate(self.graph)
            except ValueError:
                ok_packing = False
        return {"partition_valid": ok_partition, "packing_valid": ok_packing}


def apportion(n: int, weights) -> list:
    """Largest-remainder apportionment of n into len(weights) parts."""
    total = float(sum(weights))
    quotas = [n * w / total for w in weights]
    sizes = [int(math.floor(q)) for q in quotas]
    short = n - sum(sizes)
    order = sorted(
        range(len(weights)), key=lambda i: (quotas[i] - sizes[i], -i), reverse=True
    )
    for i in order[:short]:
        sizes[i] += 1
    return sizes


# -- Turán graphs ------------------------------------------------------------

def turan_graph(n: int, parts: int) -> Graph:
    """Complete multipartite graph with balanced parts (sizes differ <= 1)."""
    if parts < 1:
        raise ValueError("need at least one part")
    sizes = apportion(n, [1] * parts)
    return complete_multipartite(sizes)


# -- solution-free sets --------------------------------------------------------

GREEDY_BOOST_MAX_N = 512


def _sphere_candidates(N: int, k: int):
    """Sphere construction: digit vectors in base d with digits <= t,
    (2k)t < d, grouped by squared norm; each radius class is solution-free."""
    best = ()
    for d in range(2 * k + 1, max(2 * k + 2, N + 1)):
        t = (d - 1) // (2 * k)
        if t < 1:
            continue
        m = 1
        while d**m <= N:
            m += 1
        if (t + 1) ** m > 200_000:
            continue
        by_radius = {}
        vec = [0] * m

        def fill(i, value, radius):
            if value > N - 1:
                return
            if i == m:
                by_radius.setdefault(radius, []).append(value + 1)
                return
            for a in range(t + 1):
                nv = value + a * d**i
                if nv > N - 1:
                    break
                fill(i + 1, nv, radius + a * a)

        fill(0, 0, 0)
        for group in by_radius.values():
            if len(group) > len(best):
                best = tuple(sorted(group))
        if d > N:
            break
    return best


def _greedy_solution_free(N: int, k: int):
    """Ascending greedy with the exact convolution audit per candidate."""
    chosen = []
    vec = np.zeros(N + 1, dtype=np.int64)
    for b in range(1, N + 1):
        vec[b] = 1
        ways = vec.copy()
        for _ in range(2 * k - 1):
            ways = np.convolve(ways, vec)
        ok = all(ways[2 * k * c] == 1 for c in chosen + [b])
        if ok:
            chosen.append(b)
        else:
            vec[b] = 0
    return tuple(chosen)


def solution_free_set(N: int, k: int) -> SolutionFreeSet:
    """Best of the sphere construction and (for small N) a greedy booster;
    the defining property is audited exactly before returning."""
    if N < 1 or k < 1:
        raise ValueError("need N >= 1 and k >= 1")
    best = _sphere_candidates(N, k)
    if N <= GREEDY_BOOST_MAX_N:
        greedy = _greedy_solution_free(N, k)
        if len(greedy) > len(best):
            best = greedy
    out = SolutionFreeSet(N, tuple(sorted(best)), k)
    out.validate()
    return out


def behrend_set(N: int) -> SolutionFreeSet:
    """3-AP-free subset of [N] (the k=1 case)."""
    return solution_free_set(N, 1)


# -- shift gadget (designed edge-disjoint odd cycles) ---------------------------

def rs_gadget(k: int, m: int, B: SolutionFreeSet) -> ConstructionOutput:
    """(2k+1)-partite shift graph; part i holds (i+1)*m integer slots.

    For every x in [m] and b in B, the designated cycle visits x + i*b in
    part i (closing edge back to part 0). Designated cycles are pairwise
    edge-disjoint by the uniqueness of the (x, b) solve per edge; the
    solution-free property kills every stray cycle.
    """
    if B.k != k:
        raise ValueError(f"set built for k={B.k}, gadget needs k={k}")
    B.validate()
    if B.B and max(B.B) > m:
        raise ValueError("set elements must be at most m")
    L = 2 * k + 1
    offsets = [0] * L
    total = 0
    for i in range(L):
        offsets[i] = total
        total += (i + 1) * m
    edges = []
    copies = []
    for x in range(m):
        for b in B.B:
            cyc = tuple(offsets[i] + x + i * b for i in range(L))
            copies.append(cyc)
            for i in range(L):
                edges.append((cyc[i], cyc[(i + 1) % L]))
    g = build_graph(total, set(map(lambda e: tuple(sorted(e)), edges)))
    names = [f"V{i + 1}" for i in range(L)]
    blocks = [
        range(offsets[i], offsets[i] + (i + 1) * m) for i in range(L)
    ]
    allowed = [(names[i], names[(i + 1) % L]) for i in range(L)]
    partition = VertexPartition.from_blocks(blocks, names, allowed, n=total)
    from .graph import cycle_graph

    packing = Packing(cycle_graph(L), tuple(copies))
    params = {"k": k, "m": m, "set_size": len(B.B), "N": B.N, "n": total}
    return ConstructionOutput(g, partition, packing, params)


# -- low-threshold construction (gadget plus covering sets) ---------------------

def lemma7_max_m(k: int, n: int, alpha: float) -> int:
    """Largest gadget scale m that fits the apportioned V parts."""
    L = 2 * k + 1
    weights = [alpha / L] * L + [(1 - alpha) / L] * L
    sizes = apportion(n, weights)
    return min(sizes[:L]) // L


def lemma7_construction(
    k: int, n: int, alpha: float, m: int, B: SolutionFreeSet
) -> ConstructionOutput:
    """Gadget on padded parts V_1..V_{2k+1} of ~alpha*n/(2k+1) vertices each,
    plus sets U_1..U_{2k+1} of ~(1-alpha)*n/(2k+1), complete bipartite
    (U_i, V_i) for all i and (U_i, U_{i+1}) for i <= 2k.

    Every odd (2k+1)-cycle stays inside the V-parts, and the minimum degree
    is (1-alpha)*n/(2k+1) up to apportionment rounding.
    """
    L = 2 * k + 1
    if not (0 < alpha < 1):
        raise ValueError("alpha must be in (0, 1)")
    weights = [alpha / L] * L + [(1 - alpha) / L] * L
    sizes = apportion(n, weights)
    v_sizes, u_sizes = sizes[:L], sizes[L:]
    if L * m > min(v_sizes):
        raise GenerationError(
            f"gadget needs {L * m} slots per part, smallest V part has "
            f"{min(v_sizes)}"
        )
    gadget = rs_gadget(k, m, B)
    # global layout: V_1..V_L blocks then U_1..U_L blocks
    v_offsets, acc = [], 0
    for s in v_sizes:
        v_offsets.append(acc)
        acc += s
    u_offsets = []
    for s in u_sizes:
        u_offsets.append(acc)
        acc += s
    assert acc == n
    # map gadget vertex -> global id (gadget part i occupies the first
    # (i+1)*m slots of V_{i+1})
    gmap = [0] * gadget.graph.n
    pos = 0
    for i in range(L):
        width = (i + 1) * m
        for j in range(width):
            gmap[pos + j] = v_offsets[i] + j
        pos += width
    edges = [(gmap[u], gmap[v]) for u, v in gadget.graph.edges()]
    for i in range(L):
        for u in range(u_offsets[i], u_offsets[i] + u_sizes[i]):
            for v in range(v_offsets[i], v_offsets[i] + v_sizes[i]):
                edges.append((u, v))
    for i in range(L - 1):
        for u in range(u_offsets[i], u_offsets[i] + u_sizes[i]):
            for w in range(u_offsets[i + 1], u_offsets[i + 1] + u_sizes[i + 1]):
                edges.append((u, w))
    g = build_graph(n, edges)
    names = [f"V{i + 1}" for i in range(L)] + [f"U{i + 1}" for i in range(L)]
    blocks = [range(v_offsets[i], v_offsets[i] + v_sizes[i]) for i in range(L)]
    blocks += [range(u_offsets[i], u_offsets[i] + u_sizes[i]) for i in range(L)]
    allowed = (
        [(f"V{i + 1}", f"V{(i + 1) % L + 1}") for i in range(L)]
        + [(f"U{i + 1}", f"V{i + 1}") for i in range(L)]
        + [(f"U{i + 1}", f"U{i + 2}") for i in range(L - 1)]
    )
    partition = VertexPartition.from_blocks(blocks, names, allowed, n=n)
    from .graph import cycle_graph

    copies = tuple(
        tuple(gmap[v] for v in c) for c in gadget.designed_packing.copies
    )
    packing = Packing(cycle_graph(L), copies)
    params = {
        "k": k,
        "n": n,
        "alpha": alpha,
        "m": m,
        "set_size": len(B.B),
        "v_sizes": v_sizes,
        "u_sizes": u_sizes,
        "target_min_degree": (1 - alpha) * n / L,
    }
    return ConstructionOutput(g, partition, packing, params)


# -- regular gadget inside one part ---------------------------------------------

def _regular_graph_edges(vertices, d: int, rng):
    """d-regular graph on `vertices`: union of Hamilton cycles plus one
    perfect matching when d is odd; whole-permutation rejection on
    collisions, abort after 1000 retries."""
    s = len(vertices)
    if d == 0:
        return []
    if d >= s or (d * s) % 2 == 1:
        raise GenerationError(f"infeasible regularity d={d} on {s} vertices")
    edges = set()

    def try_add(pairs):
        if any(tuple(sorted(p)) in edges for p in pairs):
            return False
        for p in pairs:
            edges.add(tuple(sorted(p)))
        return True

    cycles = d // 2
    for _ in range(cycles):
        retries = 0
        while True:
            perm = list(vertices)
            rng.shuffle(perm)
            pairs = [
                (perm[i], perm[(i + 1) % s]) for i in range(s)
            ]
            if try_add(pairs):
                break
            retries += 1
            if retries > 1000:
                raise GenerationError("regular gadget rejection limit hit")
    if d % 2 == 1:
        retries = 0
        while True:
            perm = list(vertices)
            rng.shuffle(perm)
            pairs = [(perm[2 * i], perm[2 * i + 1]) for i in range(s // 2)]
            if try_add(pairs):
                break
            retries += 1
            if retries > 1000:
                raise GenerationError("regular gadget rejection limit hit")
    return sorted(edges)


def thm9_no_critical_edge(r: int, n: int, eps: float, seed=0) -> ConstructionOutput:
    """Turán graph T(n, r-1) plus a round(eps*n)-regular graph inside V1."""
    if r < 3:
        raise ValueError("need r >= 3")
    sizes = apportion(n, [1] * (r - 1))
    d = round(eps * n)
    offsets, acc = [], 0
    for s in sizes:
        offsets.append(acc)
        acc += s
    edges = []
    for i in range(r - 1):
        for j in range(i + 1, r - 1):
            for u in range(offsets[i], offsets[i] + sizes[i]):
                for v in range(offsets[j], offsets[j] + sizes[j]):
                    edges.append((u, v))
    rng = stream_rng(seed, "thm9-nce", r, n, d)
    v1 = list(range(offsets[0], offsets[0] + sizes[0]))
    inside = _regular_graph_edges(v1, d, rng)
    g = build_graph(n, edges + list(inside))
    names = [f"V{i + 1}" for i in range(r - 1)]
    blocks = [range(offsets[i], offsets[i] + sizes[i]) for i in range(r - 1)]
    allowed = [
        (names[i], names[j]) for i in range(r - 1) for j in range(i + 1, r - 1)
    ] + [("V1", "V1")]
    partition = VertexPartition.from_blocks(blocks, names, allowed, n=n)
    params = {
        "r": r,
        "n": n,
        "eps": eps,
        "degree": d,
        "eps_realized": d / n if n else 0.0,
        "seed": seed,
        "sizes": sizes,
        "inside_edges": len(inside),
    }
    return ConstructionOutput(g, partition, None, params)


def thm9_general(r: int, n: int, eps: float, seed=0) -> ConstructionOutput:
    """Parts V0..V3 of ~n/(3r-5) and V4..Vr of ~3n/(3r-5); complete
    bipartite (V0,V1), (V0 u V1, V4 u .. u Vr), (Vi,Vj) for 2<=i<j<=r;
    round(eps*n)-regular bipartite gadgets on (V1,V2) and (V1,V3)."""
    if r < 3:
        raise ValueError("need r >= 3")
    weights = [1, 1, 1, 1] + [3] * (r - 3)
    sizes = apportion(n, weights)
    offsets, acc = [], 0
    for s in sizes:
        offsets.append(acc)
        acc += s
    blocks = [
        list(range(offsets[i], offsets[i] + sizes[i])) for i in range(r + 1)
    ]
    edges = set()

    def join(block_a, block_b):
        for u in block_a:
            for v in block_b:
                edges.add(tuple(sorted((u, v))))

    join(blocks[0], blocks[1])
    high = [v for i in range(4, r + 1) for v in blocks[i]]
    join(blocks[0] + blocks[1], high)
    for i in range(2, r + 1):
        for j in range(i + 1, r + 1):
            join(blocks[i], blocks[j])
    d = round(eps * n)
    for other, tag in ((2, "v1v2"), (3, "v1v3")):
        a, b = blocks[1], blocks[other]
        if len(a) != len(b):
            raise GenerationError("gadget parts must have equal sizes")
        if d > len(a):
            raise GenerationError(f"infeasible gadget degree d={d}")
        rng = stream_rng(seed, "thm9-general", r, n, d, tag)
        gadget = random_regular_bipartite(len(a), len(b), d, rng)
        for u, v in gadget.edges():
            edges.add(tuple(sorted((a[u], b[v - len(a)]))))
    g = build_graph(n, edges)
    names = [f"V{i}" for i in range(r + 1)]
    allowed = [("V0", "V1"), ("V1", "V2"), ("V1", "V3")]
    for i in (0, 1):
        for j in range(4, r + 1):
            allowed.append((names[i], names[j]))
    for i in range(2, r + 1):
        for j in range(i + 1, r + 1):
            allowed.append((names[i], names[j]))
    partition = VertexPartition.from_blocks(blocks, names, allowed, n=n)
    params = {
        "r": r,
        "n": n,
        "eps": eps,
        "degree": d,
        "eps_realized": d / n if n else 0.0,
        "seed": seed,
        "sizes": sizes,
        "min_degree_target": (3 * r - 8) / (3 * r - 5) * n,
    }
    return ConstructionOutput(g, partition, None, params)
