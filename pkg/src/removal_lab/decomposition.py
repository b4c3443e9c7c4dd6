"""Chi-3 decompositions of patterns and the host cleanup/refinement pipeline.

The decomposition splits a 3-chromatic pattern with a critical edge into
either a triangle-shaped partition (x, y, A3, B) or a (2k+1)-part odd-cycle
partition built from BFS layers. The cleanup pipeline packs short odd
cycles out of the host, removes their edges and the high-incidence
vertices, refines the residual into a bipartition or a 7-part structure,
and counts pattern copies anchored on the removed edge classes.
"""

import math
from dataclasses import dataclass, field

from .counting import CopyCount, count_restricted_copies
from .errors import AuditError, GenerationError
from .graph import Graph, VertexPartition, cycle_graph, edge_key, min_degree
from .homomorphism import find_homomorphism, find_injective_copy
from .invariants import critical_edges, chromatic_number, is_bipartite, odd_girth
from .packing import greedy_packing
from .util import iter_bits, node_budget


@dataclass(frozen=True)
class Chi3Decomposition:
    mode: str                    # "triangle" or "cycle"
    parts: VertexPartition
    critical_edge: tuple
    k: int                       # cycle mode: parts = 2k+1; triangle mode: 1

    def part_blocks(self):
        return self.parts.blocks_by_name()


def _fixed_bipartition(h_prime: Graph, x: int, y: int):
    """Bipartition of H - xy with x and y forced onto the same side.

    If x, y sit in different components the y-component is flipped; same
    component on different sides is impossible for a 3-chromatic H.
    """
    bip = is_bipartite(h_prime)
    if bip is None:
        raise AuditError("pattern minus its critical edge must be bipartite")
    side = [0] * h_prime.n
    for v in bip[1]:
        side[v] = 1
    if side[x] != side[y]:
        comp = 0
        frontier = [y]
        comp_mask = 1 << y
        while frontier:
            nxt = []
            for u in frontier:
                for w in iter_bits(h_prime.adjacency[u] & ~comp_mask):
                    comp_mask |= 1 << w
                    nxt.append(w)
            frontier = nxt
        if (comp_mask >> x) & 1:
            raise AuditError(
                "x and y on different sides of a shared component "
                "contradicts chi(H) = 3"
            )
        for v in iter_bits(comp_mask):
            side[v] = 1 - side[v]
    # convention: x's side is L
    if side[x] == 1:
        side = [1 - s for s in side]
    left = [v for v in range(h_prime.n) if side[v] == 0]
    right = [v for v in range(h_prime.n) if side[v] == 1]
    return left, right


def chi3_decompose(h: Graph, xy, mode: str = "auto", budget=None) -> Chi3Decomposition:
    """Partition a 3-chromatic pattern around a critical edge.

    Triangle mode: A1={x}, A2={y}, A3=the far side, B=the rest of x's side;
    every edge lies in (A3 x B) or among A1, A2, A3. Cycle mode (odd girth
    2k+1 >= 5): BFS layers from x and y assemble into 2k+1 cyclically
    ordered parts; the part map is then a homomorphism onto C_{2k+1}.
    All structural claims are verified; failures raise AuditError.
    """
    x, y = xy
    if not h.has_edge(x, y):
        raise ValueError("critical edge must be an edge of the pattern")
    if chromatic_number(h, budget) != 3:
        raise ValueError("pattern must be 3-chromatic")
    h_prime = h.with_edges_removed([(x, y)])
    if chromatic_number(h_prime, budget) != 2:
        raise ValueError("edge is not critical")
    og = odd_girth(h)
    if mode == "auto":
        mode = "cycle" if og.value >= 5 else "triangle"
    if mode == "triangle":
        left, right = _fixed_bipartition(h_prime, x, y)
        blocks = [
            [x],
            [y],
            right,
            [v for v in left if v not in (x, y)],
        ]
        names = ("A1", "A2", "A3", "B")
        allowed = [("A1", "A2"), ("A2", "A3"), ("A1", "A3"), ("A3", "B")]
        parts = VertexPartition.from_blocks(blocks, names, allowed, n=h.n)
        bad = parts.violations(h)
        if bad:
            raise AuditError(f"triangle-mode containment failed: {bad}")
        return Chi3Decomposition("triangle", parts, edge_key(x, y), 1)
    if mode != "cycle":
        raise ValueError(f"unknown mode {mode!r}")
    if og.value < 5:
        raise ValueError("cycle mode needs odd girth >= 5")
    k = (og.value - 1) // 2
    left, right = _fixed_bipartition(h_prime, x, y)
    from .graph import bfs_layer_masks

    lx = bfs_layer_masks(h_prime, x, k - 1)
    ly = bfs_layer_masks(h_prime, y, k - 1)
    xs = [set(iter_bits(m)) for m in lx[:k]]
    ys = [set(iter_bits(m)) for m in ly[:k]]
    xs += [set()] * (k - len(xs))
    ys += [set()] * (k - len(ys))
    for i, xi in enumerate(xs):
        for j, yj in enumerate(ys):
            if xi & yj:
                raise AuditError(
                    f"layer overlap X_{i + 1} and Y_{j + 1} would force a "
                    "short odd closed walk"
                )
    covered = set().union(*xs, *ys)
    l_rest = [v for v in left if v not in covered]
    r_rest = [v for v in right if v not in covered]
    # assembly around the cycle: X1, Y1..Y_{k-1}, Y_k + leftover of one
    # side, the other leftover, X_k down to X2
    if k % 2 == 0:
        mid_a = sorted(ys[k - 1] | set(r_rest))
        mid_b = l_rest
    else:
        mid_a = sorted(ys[k - 1] | set(l_rest))
        mid_b = r_rest
    blocks = [sorted(xs[0])]
    blocks += [sorted(ys[i]) for i in range(k - 1)]
    blocks += [mid_a, sorted(mid_b)]
    blocks += [sorted(xs[i]) for i in range(k - 1, 0, -1)]
    L = 2 * k + 1
    if len(blocks) != L:
        raise AuditError("assembled part count mismatch")
    names = tuple(f"A{i + 1}" for i in range(L))
    allowed = [(f"A{i + 1}", f"A{(i + 1) % L + 1}") for i in range(L)]
    parts = VertexPartition.from_blocks(blocks, names, allowed, n=h.n)
    bad = parts.violations(h)
    if bad:
        raise AuditError(f"cycle-mode containment failed: {bad}")
    return Chi3Decomposition("cycle", parts, edge_key(x, y), k)


# -- host cleanup ---------------------------------------------------------------

@dataclass(frozen=True)
class CleanupResult:
    g: Graph
    k: int
    alpha: float
    packings: dict           # ell -> Packing of C_{2*ell+1}
    e_c: frozenset
    s_vertices: frozenset
    kept_vertices: frozenset
    g_prime: Graph           # E_c removed, S isolated; vertex ids stable
    quantities: dict


def cleanup_short_cycles(g: Graph, k: int, alpha: float, seed=0, budget=None) -> CleanupResult:
    """Sequential maximal packings of C3, C5, .., C_{2k+1}; their edges form
    E_c, high-incidence vertices form S, and G' = G - E_c - S.

    Packings are taken each on G minus previously used edges, so E_c is
    well-defined without double counting and G' has odd girth > 2k+1.
    """
    if k < 1 or not (0 < alpha < 1):
        raise ValueError("need k >= 1 and alpha in (0, 1)")
    n = g.n
    packings = {}
    residual = g
    for ell in range(1, k + 1):
        p = greedy_packing(cycle_graph(2 * ell + 1), residual, seed=seed, budget=budget)
        packings[ell] = p
        residual = residual.with_edges_removed(p.used_edges)
    e_c = frozenset().union(*(p.used_edges for p in packings.values()))
    threshold = math.ceil(alpha * n / 10)
    incidence = [0] * n
    for u, v in e_c:
        incidence[u] += 1
        incidence[v] += 1
    s_vertices = frozenset(
        v for v in range(n) if incidence[v] >= max(threshold, 1)
    )
    kept = frozenset(range(n)) - s_vertices
    g_prime = g.with_edges_removed(e_c).without_vertices(s_vertices)
    delta_prime = min((g_prime.degree(v) for v in kept), default=0)
    eps_packing = sum(len(p) for p in packings.values()) / n**2 if n else 0.0
    og_prime = odd_girth(g_prime).value
    ec_exact = sum((2 * ell + 1) * len(packings[ell]) for ell in packings)
    quantities = {
        "n": n,
        "k": k,
        "alpha": alpha,
        "packing_sizes": {ell: len(packings[ell]) for ell in packings},
        "e_c_size": len(e_c),
        "e_c_identity_ok": len(e_c) == ec_exact,
        "s_threshold": max(threshold, 1),
        "s_size": len(s_vertices),
        "kept": len(kept),
        "delta_g": min_degree(g),
        "delta_g_prime": delta_prime,
        "odd_girth_g_prime": og_prime,
        "odd_girth_ok": og_prime > 2 * k + 1,
        "eps_packing": eps_packing,
        "delta_premise": min_degree(g) >= (0.25 + alpha) * n,
        "ec_hypothesis": len(e_c) <= k * (k + 2) * eps_packing * n**2,
        "eps_small": eps_packing < alpha**2 / (200 * k * (k + 2)),
        "claim_size_ok": len(kept) > (1 - alpha / 10) * n,
        "claim_s_ok": len(s_vertices) < alpha * n / 10,
        "claim_delta_ok": delta_prime > (0.25 + 0.8 * alpha) * n,
    }
    return CleanupResult(
        g, k, alpha, packings, e_c, s_vertices, kept, g_prime, quantities
    )


# -- refinement -------------------------------------------------------------------

@dataclass(frozen=True)
class RefinedPartition:
    kind: str                # "bipartite" or "c7"
    parts: VertexPartition
    g_dd: Graph              # G'' as an edge mask over G, same vertex ids
    quantities: dict

    def blocks(self):
        return self.parts.blocks_by_name()


def _mask_of(vertices):
    m = 0
    for v in vertices:
        m |= 1 << v
    return m


def refine_bipartite(g: Graph, clean: CleanupResult, alpha: float) -> RefinedPartition:
    """Fold S into the bipartition of G' where degrees allow.

    L1 (resp. R1) holds S-vertices with at most alpha*n/5 neighbors in L'
    (resp. R'); ties go to L1. G'' keeps exactly the (L'', R'') edges of G.
    """
    n = g.n
    bip = is_bipartite(clean.g_prime)
    if bip is None:
        raise ValueError("residual graph is not bipartite")
    kept = clean.kept_vertices
    l_prime = [v for v in bip[0] if v in kept]
    r_prime = [v for v in bip[1] if v in kept]
    l_mask, r_mask = _mask_of(l_prime), _mask_of(r_prime)
    cut = alpha * n / 5
    l1, r1, s_rest = [], [], []
    for v in sorted(clean.s_vertices):
        to_l = (g.adjacency[v] & l_mask).bit_count()
        to_r = (g.adjacency[v] & r_mask).bit_count()
        if to_l <= cut:
            l1.append(v)
        elif to_r <= cut:
            r1.append(v)
        else:
            s_rest.append(v)
    l_dd = sorted(l_prime + l1)
    r_dd = sorted(r_prime + r1)
    ldd_mask, rdd_mask = _mask_of(l_dd), _mask_of(r_dd)
    rows = [0] * n
    for v in l_dd:
        rows[v] = g.adjacency[v] & rdd_mask
    for v in r_dd:
        rows[v] = g.adjacency[v] & ldd_mask
    g_dd = Graph(n, tuple(rows))
    for u, v in clean.g_prime.edges():
        if not g_dd.has_edge(u, v):
            raise AuditError("G' must be an edge-subset of G''")
    names = ("Lpp", "Rpp", "Spp")
    parts = VertexPartition.from_blocks(
        [l_dd, r_dd, s_rest], names, [("Lpp", "Rpp")], n=n
    )
    body = l_dd + r_dd
    delta_dd = min((g_dd.degree(v) for v in body), default=0)
    quantities = {
        "l1": len(l1),
        "r1": len(r1),
        "s_rest": len(s_rest),
        "delta_g_dd": delta_dd,
        "delta_dd_ok": delta_dd >= (0.25 + alpha / 2) * n,
        "sides": (len(l_dd), len(r_dd)),
    }
    return RefinedPartition("bipartite", parts, g_dd, quantities)


def refine_c7(g: Graph, clean: CleanupResult, alpha: float, budget=None) -> RefinedPartition:
    """Fold S into a 7-part odd-cycle structure of G'.

    The structure comes from a homomorphism of G' onto C7; S_i holds
    S-vertices with at most 2*alpha*n/5 neighbors outside the two parts
    adjacent to slot i (lowest qualifying i wins). G'' keeps only edges
    between cyclically consecutive parts.
    """
    n = g.n
    if is_bipartite(clean.g_prime) is not None:
        raise ValueError("residual graph is bipartite; use refine_bipartite")
    kept = sorted(clean.kept_vertices)
    from .graph import induced_subgraph

    sub, mapping = induced_subgraph(g=clean.g_prime, vertices=kept)
    hom = find_homomorphism(sub, cycle_graph(7), budget)
    if hom is None:
        raise GenerationError("no homomorphism of the residual onto C7")
    v_prime = [[] for _ in range(7)]
    for local, target in enumerate(hom.map):
        v_prime[target].append(mapping[local])
    nonempty = all(v_prime[i] for i in range(7))
    kept_mask = _mask_of(kept)
    prime_masks = [_mask_of(b) for b in v_prime]
    cut = 2 * alpha * n / 5
    s_slot = {}
    for v in sorted(clean.s_vertices):
        for i in range(7):
            outside = kept_mask & ~(prime_masks[(i - 1) % 7] | prime_masks[(i + 1) % 7])
            if (g.adjacency[v] & outside).bit_count() <= cut:
                s_slot[v] = i
                break
    v_dd = [sorted(v_prime[i] + [v for v, s in s_slot.items() if s == i]) for i in range(7)]
    s_rest = sorted(v for v in clean.s_vertices if v not in s_slot)
    dd_masks = [_mask_of(b) for b in v_dd]
    rows = [0] * n
    for i in range(7):
        ring = dd_masks[(i - 1) % 7] | dd_masks[(i + 1) % 7]
        for v in v_dd[i]:
            rows[v] = g.adjacency[v] & ring
    g_dd = Graph(n, tuple(rows))
    for u, v in clean.g_prime.edges():
        if not g_dd.has_edge(u, v):
            raise AuditError("G' must be an edge-subset of G''")
    names = tuple(f"W{i + 1}" for i in range(7)) + ("Spp",)
    allowed = [(f"W{i + 1}", f"W{(i + 1) % 7 + 1}") for i in range(7)]
    parts = VertexPartition.from_blocks(
        v_dd + [s_rest], names, allowed, n=n
    )
    body = [v for b in v_dd for v in b]
    delta_dd = min((g_dd.degree(v) for v in body), default=0)

    # claim items (ii)-(iv)
    codeg_ok = True
    for i in range(7):
        for pair_mask in (dd_masks[i], dd_masks[(i + 2) % 7]):
            for u in v_dd[i]:
                others = pair_mask if pair_mask != dd_masks[i] else pair_mask & ~((1 << (u + 1)) - 1)
                for w in iter_bits(others):
                    if w == u:
                        continue
                    if (g_dd.adjacency[u] & g_dd.adjacency[w]).bit_count() < alpha * n:
                        codeg_ok = False
                        break
                if not codeg_ok:
                    break
            if not codeg_ok:
                break
        if not codeg_ok:
            break
    side_ok = True
    for i in range(7):
        for v in v_dd[i]:
            if (
                (g_dd.adjacency[v] & dd_masks[(i - 1) % 7]).bit_count() < alpha * n
                or (g_dd.adjacency[v] & dd_masks[(i + 1) % 7]).bit_count() < alpha * n
            ):
                side_ok = False
                break
        if not side_ok:
            break
    spp_ok = True
    spp_pairs = {}
    for a in s_rest:
        loads = [(g.adjacency[a] & dd_masks[i]).bit_count() for i in range(7)]
        found = None
        for i in range(7):
            for j in range(7):
                if (j - i) % 7 in (1, 3) and loads[i] > 2 * alpha * n / 25 and loads[j] > 2 * alpha * n / 25:
                    found = (i, j)
                    break
            if found:
                break
        if found is None:
            spp_ok = False
        else:
            spp_pairs[a] = found
    quantities = {
        "nonempty_parts": nonempty,
        "s_folded": len(s_slot),
        "s_rest": len(s_rest),
        "delta_g_dd": delta_dd,
        "delta_dd_ok": delta_dd >= (0.25 + alpha / 2) * n,
        "codegree_ok": codeg_ok,
        "side_neighbors_ok": side_ok,
        "spp_two_parts_ok": spp_ok,
        "spp_pairs": spp_pairs,
    }
    return RefinedPartition("c7", parts, g_dd, quantities)


# -- the copy-finding pipeline ------------------------------------------------------

def _recipe_count_triangle(h, decomp, g, a, b, budget):
    """Anchored copies via the triangle-shaped recipe: the far class goes
    into the common neighborhood of (a, b), the rest avoids {a, b}."""
    blocks = decomp.part_blocks()
    x = blocks["A1"][0]
    y = blocks["A2"][0]
    common = g.adjacency[a] & g.adjacency[b] & ~(1 << a) & ~(1 << b)
    rest = g.vertex_mask() & ~(1 << a) & ~(1 << b)
    cand = [0] * h.n
    cand[x] = 1 << a
    cand[y] = 1 << b
    for v in blocks["A3"]:
        cand[v] = common
    for v in blocks["B"]:
        cand[v] = rest
    return count_restricted_copies(
        h, g, candidates=cand, anchors=((x, a), (y, b)), budget=budget
    )


def _recipe_count_cycle5(h, decomp, g, a, b, a_set, b_set, budget):
    """Anchored copies via the 5-part recipe: A5 into a_set (neighbors of
    a), A3 into b_set (neighbors of b), A4 free of {a, b}."""
    blocks = decomp.part_blocks()
    x = blocks["A1"][0]
    y = blocks["A2"][0]
    drop = ~(1 << a) & ~(1 << b)
    cand = [0] * h.n
    cand[x] = 1 << a
    cand[y] = 1 << b
    for v in blocks["A5"]:
        cand[v] = a_set & drop
    for v in blocks["A3"]:
        cand[v] = b_set & drop
    for v in blocks["A4"]:
        cand[v] = g.vertex_mask() & drop
    return count_restricted_copies(
        h, g, candidates=cand, anchors=((x, a), (y, b)), budget=budget
    )


def find_h_copies_pipeline(h: Graph, g: Graph, alpha: float, seed=0, budget=None,
                           max_anchors=None):
    """Count pattern copies the constructive way: pack, clean, refine, and
    anchor on the removed edge classes.

    Returns (CopyCount, trace). Hypothesis violations are recorded in the
    trace, never silently ignored. Every counted copy is a valid labeled
    copy in the original host (the counting kernel checks all edges of the
    pattern against the host).
    """
    budget = node_budget(budget)
    n = g.n
    crit = critical_edges(h)
    if crit.chi != 3:
        raise ValueError("pattern must be 3-chromatic")
    if not crit.edges:
        raise ValueError("pattern has no critical edge")
    xy = min(crit.edges)
    og_h = odd_girth(h).value
    trace = {
        "critical_edge": xy,
        "odd_girth_h": og_h,
        "alpha": alpha,
        "flags": [],
        "anchors": [],
    }
    total = 0
    if og_h == 3:
        trace["case"] = "triangle"
        if min_degree(g) < (1 / 3 + alpha) * n:
            trace["flags"].append("min-degree below (1/3+alpha)n")
        decomp = chi3_decompose(h, xy, mode="triangle")
        packing = greedy_packing(h, g, seed=seed, budget=budget)
        trace["packing_size"] = len(packing)
        tri = find_injective_copy(cycle_graph(3), h, budget)
        if tri is None:
            raise AuditError("odd girth 3 pattern must contain a triangle")
        anchors = []
        for copy in packing.copies:
            u, v, w = (copy[t] for t in tri)
            best = None
            for (p, q) in ((u, v), (v, w), (u, w)):
                if (g.adjacency[p] & g.adjacency[q]).bit_count() >= alpha * n:
                    best = (p, q)
                    break
            if best is None:
                trace["flags"].append(
                    f"no high-codegree pair in packed copy {copy}"
                )
                continue
            anchors.append(best)
        if max_anchors is not None:
            anchors = anchors[:max_anchors]
        for (p, q) in anchors:
            got = 0
            for (a, b) in ((p, q), (q, p)):
                got += _recipe_count_triangle(h, decomp, g, a, b, budget).value
            trace["anchors"].append(("codegree", (p, q), got))
            total += got
        return CopyCount(total, n, h.n), trace

    # odd girth >= 5 case
    trace["case"] = "odd-girth-5"
    k = (og_h - 1) // 2
    if min_degree(g) < (0.25 + alpha) * n:
        trace["flags"].append("min-degree below (1/4+alpha)n")
    clean = cleanup_short_cycles(g, k, alpha, seed=seed, budget=budget)
    trace["cleanup"] = clean.quantities
    decomp_tri = chi3_decompose(h, xy, mode="triangle")
    decomp_c5 = chi3_decompose(h, xy, mode="cycle")
    if decomp_c5.k != 2:
        # the five-part recipe needs exactly A1..A5; rebuild at k=2
        decomp_c5 = _cycle_decomposition_at_k(h, xy, 2)
    if is_bipartite(clean.g_prime) is not None:
        trace["branch"] = "bipartite"
        refined = refine_bipartite(g, clean, alpha)
        blocks = refined.blocks()
        small, big = ("Lpp", "Rpp")
        if len(blocks["Lpp"]) > len(blocks["Rpp"]):
            small, big = big, small
        small_mask = _mask_of(blocks[small])
        big_mask = _mask_of(blocks[big])
        spp_mask = _mask_of(blocks["Spp"])
        type1, type2 = [], []
        for (u, v) in g.edges():
            if refined.g_dd.has_edge(u, v):
                continue
            su = (spp_mask >> u) & 1
            sv = (spp_mask >> v) & 1
            if su or sv:
                type2.append((v, u) if sv and not su else (u, v))
            else:
                type1.append((u, v))
        trace["type1_edges"] = len(type1)
        trace["type2_edges"] = len(type2)
        if max_anchors is not None:
            type1 = type1[:max_anchors]
            type2 = type2[:max_anchors]
        for (u, v) in type1:
            got = 0
            if (g.adjacency[u] & g.adjacency[v]).bit_count() >= alpha * n / 2:
                for (a, b) in ((u, v), (v, u)):
                    got += _recipe_count_triangle(h, decomp_tri, g, a, b, budget).value
                trace["anchors"].append(("I-codegree", (u, v), got))
            else:
                for (a, b) in ((u, v), (v, u)):
                    got += _recipe_count_cycle5(
                        h, decomp_c5, g, a, b,
                        refined.g_dd.adjacency[a], refined.g_dd.adjacency[b],
                        budget,
                    ).value
                trace["anchors"].append(("I-general", (u, v), got))
            total += got
        for (a, b) in type2:
            # the recipe needs a in S'' and b on the smaller side
            if not (spp_mask >> a) & 1 or not (small_mask >> b) & 1:
                continue
            a_set = g.adjacency[a] & big_mask
            b_set = refined.g_dd.adjacency[b]
            got = _recipe_count_cycle5(h, decomp_c5, g, a, b, a_set, b_set, budget).value
            trace["anchors"].append(("II", (a, b), got))
            total += got
        return CopyCount(total, n, h.n), trace

    trace["branch"] = "c7"
    if k > 2:
        trace["flags"].append("non-bipartite residual with k > 2")
    refined = refine_c7(g, clean, alpha, budget)
    blocks = refined.blocks()
    dd_masks = [_mask_of(blocks[f"W{i + 1}"]) for i in range(7)]
    slot = {}
    for i in range(7):
        for v in blocks[f"W{i + 1}"]:
            slot[v] = i
    spp = set(blocks["Spp"])
    type1, type2 = [], []
    for (u, v) in g.edges():
        if refined.g_dd.has_edge(u, v):
            continue
        if u in spp or v in spp:
            type2.append((u, v) if u in spp else (v, u))
        elif u in slot and v in slot:
            type1.append((u, v))
    trace["type1_edges"] = len(type1)
    trace["type2_edges"] = len(type2)
    if max_anchors is not None:
        type1 = type1[:max_anchors]
        type2 = type2[:max_anchors]
    for (u, v) in type1:
        i, j = slot[u], slot[v]
        diff = (j - i) % 7
        got = 0
        if diff in (0, 2, 5):
            for (a, b) in ((u, v), (v, u)):
                got += _recipe_count_triangle(h, decomp_tri, g, a, b, budget).value
            trace["anchors"].append(("I-codegree", (u, v), got))
        else:  # diff in (3, 4): an i, i+3 pair in some orientation
            a, b = (u, v) if diff == 3 else (v, u)
            ia = slot[a]
            a_set = g.adjacency[a] & dd_masks[(ia - 1) % 7]
            b_set = g.adjacency[b] & dd_masks[(ia - 3) % 7]
            got = 0
            got += _recipe_count_cycle5(h, decomp_c5, g, a, b, a_set, b_set, budget).value
            trace["anchors"].append(("I-general", (a, b), got))
        total += got
    pairs = refined.quantities["spp_pairs"]
    for (a, _) in type2:
        if a not in pairs:
            trace["flags"].append(f"S'' vertex {a} lacks the two-part property")
            continue
        i, j = pairs[a]
        for b in iter_bits(g.adjacency[a] & dd_masks[i]):
            a_set = g.adjacency[a] & dd_masks[j]
            b_set = g.adjacency[b] & dd_masks[(i + 1) % 7]
            got = _recipe_count_cycle5(h, decomp_c5, g, a, b, a_set, b_set, budget).value
            trace["anchors"].append(("II", (a, b), got))
            total += got
    return CopyCount(total, n, h.n), trace


def _cycle_decomposition_at_k(h: Graph, xy, k: int) -> Chi3Decomposition:
    """Cycle-mode decomposition with an explicit k (needs odd girth >= 2k+1)."""
    og = odd_girth(h).value
    if og < 2 * k + 1:
        raise ValueError("odd girth too small for requested k")
    full = chi3_decompose(h, xy, mode="cycle")
    if full.k == k:
        return full
    # rebuild with truncated layer depth
    x, y = xy
    h_prime = h.with_edges_removed([(x, y)])
    left, right = _fixed_bipartition(h_prime, x, y)
    from .graph import bfs_layer_masks

    lx = bfs_layer_masks(h_prime, x, k - 1)
    ly = bfs_layer_masks(h_prime, y, k - 1)
    xs = [set(iter_bits(m)) for m in lx[:k]]
    ys = [set(iter_bits(m)) for m in ly[:k]]
    xs += [set()] * (k - len(xs))
    ys += [set()] * (k - len(ys))
    covered = set().union(*xs, *ys)
    l_rest = [v for v in left if v not in covered]
    r_rest = [v for v in right if v not in covered]
    if k % 2 == 0:
        mid_a, mid_b = sorted(ys[k - 1] | set(r_rest)), l_rest
    else:
        mid_a, mid_b = sorted(ys[k - 1] | set(l_rest)), r_rest
    blocks = [sorted(xs[0])]
    blocks += [sorted(ys[i]) for i in range(k - 1)]
    blocks += [mid_a, sorted(mid_b)]
    blocks += [sorted(xs[i]) for i in range(k - 1, 0, -1)]
    L = 2 * k + 1
    names = tuple(f"A{i + 1}" for i in range(L))
    allowed = [(f"A{i + 1}", f"A{(i + 1) % L + 1}") for i in range(L)]
    parts = VertexPartition.from_blocks(blocks, names, allowed, n=h.n)
    bad = parts.violations(h)
    if bad:
        raise AuditError(f"truncated cycle containment failed: {bad}")
    return Chi3Decomposition("cycle", parts, edge_key(x, y), k)
